//! Reference statistics written independently of the crate's own.
#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks2(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    (d, kolmogorov_tail(d, ne))
}

/// One-sample KS statistic and asymptotic p-value against `cdf`.
pub fn ks1(xs: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (k, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    (d, kolmogorov_tail(d, n))
}

/// `P(K > λ)` with the usual small-sample correction on `λ`.
fn kolmogorov_tail(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    let lambda = (s + 0.12 + 0.11 / s) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

pub fn normal_cdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    let n = Normal::new(mean, var.sqrt()).unwrap();
    move |x| n.cdf(x)
}

/// First time a Brownian motion with drift `drift > 0` and variance rate
/// `var` started at 0 reaches level `gap > 0`.
pub fn passage_cdf(gap: f64, drift: f64, var: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let s = (var * t).sqrt();
        let a = 0.5 * erfc((gap - drift * t) / (s * std::f64::consts::SQRT_2));
        let log_b = 2.0 * drift * gap / var;
        let tail = 0.5 * erfc((gap + drift * t) / (s * std::f64::consts::SQRT_2));
        let b = if tail == 0.0 { 0.0 } else { (log_b + tail.ln()).exp() };
        (a + b).min(1.0)
    }
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

pub fn variance(xs: &[f64]) -> f64 {
    let (m, _) = mean_se(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
