//! Small statistical toolkit: streaming moments, Kolmogorov–Smirnov tests,
//! the inverse-Gaussian law and least-squares slopes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Welford accumulator of count, mean and second central moment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: u64,
    mean: f64,
    m2: f64,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Associative merge (Chan et al.).
    pub fn merge(&mut self, other: &Summary) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// Standard error of the sample variance for Gaussian data,
    /// `s² √(2/(k-1))`. See [`variance_with_se`] for the distribution-free
    /// version.
    pub fn variance_se_gaussian(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.variance() * (2.0 / (self.count - 1) as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Summary {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Summary::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Mean and standard error of the sample variance, estimated from the
/// sample itself (delta method with the empirical fourth central moment).
pub fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.len() < 4 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / k;
    let var = m2 * k / (k - 1.0);
    let se = ((m4 - m2 * m2) / k).max(0.0).sqrt();
    (var, se)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Two-sided normal tail probability `P(|Z| > |z|)`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    libm::erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// z-score of the difference of two independent estimates.
pub fn z_score(m1: f64, se1: f64, m2: f64, se2: f64) -> f64 {
    let se = (se1 * se1 + se2 * se2).sqrt();
    if se == 0.0 {
        if m1 == m2 {
            0.0
        } else {
            f64::INFINITY.copysign(m1 - m2)
        }
    } else {
        (m1 - m2) / se
    }
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (-1)^{j-1} exp(-2 j² λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

const KS_MIN_SAMPLE: usize = 20;

fn sorted_finite(xs: &[f64], name: &str) -> Result<Vec<f64>> {
    if xs.len() < KS_MIN_SAMPLE {
        return Err(SimError::SampleSize {
            needed: KS_MIN_SAMPLE,
            got: xs.len(),
        });
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(SimError::InvalidParams(format!("{name} contains NaN")));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let v = sorted_finite(xs, "sample")?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p(d, n),
    })
}

/// Two-sample KS test; ties are handled by stepping over equal values
/// together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted_finite(a, "first sample")?;
    let b = sorted_finite(b, "second sample")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(KsResult {
        statistic: d,
        p_value: ks_p(d, ne),
    })
}

/// Inverse-Gaussian law with the given mean and shape `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseGaussian {
    pub mean: f64,
    pub shape: f64,
}

impl InverseGaussian {
    pub fn new(mean: f64, shape: f64) -> Result<Self> {
        if !(mean > 0.0 && shape > 0.0) || !mean.is_finite() || !shape.is_finite() {
            return Err(SimError::InvalidParams(format!(
                "inverse Gaussian needs positive mean and shape, got {mean}, {shape}"
            )));
        }
        Ok(Self { mean, shape })
    }

    /// First time a Brownian motion started at `gap0 > 0` with drift
    /// `-drift` and variance `var` per unit time hits zero.
    pub fn first_passage(gap0: f64, drift: f64, var: f64) -> Result<Self> {
        if !(drift > 0.0) {
            return Err(SimError::Unsupported(format!(
                "first passage with nonpositive approach drift {drift} has no finite mean"
            )));
        }
        if !(gap0 > 0.0 && var > 0.0) {
            return Err(SimError::InvalidParams(format!(
                "first passage needs gap0 > 0 and var > 0, got {gap0}, {var}"
            )));
        }
        Self::new(gap0 / drift, gap0 * gap0 / var)
    }

    pub fn variance(&self) -> f64 {
        self.mean.powi(3) / self.shape
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (m, l) = (self.mean, self.shape);
        let s = (l / t).sqrt();
        let a = normal_cdf(s * (t / m - 1.0));
        // exp(2λ/m) Φ(-s(t/m+1)) overflows naively for large λ/m
        let arg = -s * (t / m + 1.0);
        let b = if arg < -30.0 {
            let log_phi = log_normal_tail(-arg);
            (2.0 * l / m + log_phi).exp()
        } else {
            (2.0 * l / m).exp() * normal_cdf(arg)
        };
        (a + b).clamp(0.0, 1.0)
    }
}

/// `ln P(Z > x)` for large positive `x`, by the asymptotic series.
fn log_normal_tail(x: f64) -> f64 {
    let x2 = x * x;
    let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    -0.5 * x2 - x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Weighted least squares `y = a + b x` with weights `1/σ²`; the slope
/// standard error propagates the supplied `σ`.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != sigma.len() || x.len() < 2 {
        return Err(SimError::InvalidParams(
            "linear fit needs at least two points of matching length".into(),
        ));
    }
    let w: Vec<f64> = sigma
        .iter()
        .map(|s| if *s > 0.0 { 1.0 / (s * s) } else { 1.0 })
        .collect();
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if det == 0.0 {
        return Err(SimError::InvalidParams("degenerate abscissae".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (sw / det).sqrt(),
    })
}
