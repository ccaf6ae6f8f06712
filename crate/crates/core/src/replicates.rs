//! Replicate fan-out. Output order is replicate order whatever the number
//! of workers, so results depend only on the seed.

use crate::error::Result;

/// Run `f(0..count)` and collect the results in replicate order. `workers`
/// of `None` or `Some(0)` means all cores; `Some(1)` runs inline.
pub fn map_replicates<T, F>(count: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if workers != Some(1) && count > 1 {
            let run = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
            return match workers {
                Some(k) if k > 1 => rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map(|pool| pool.install(run))
                    .unwrap_or_else(|_| run()),
                _ => run(),
            };
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    (0..count).map(f).collect()
}
