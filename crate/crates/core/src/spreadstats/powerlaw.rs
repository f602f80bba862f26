//! Discrete power-law exponent over a bounded window `[xmin, xmax]`.
//!
//! The estimate is the exact maximum-likelihood exponent of
//! `P(x) ∝ x^-α` restricted to the window: the root of
//! `E_α[ln x] = mean(ln x_i)`, where the expectation runs over the window.
//! The closed-form approximation `1 + n / Σ ln(x_i / (xmin - 1/2))` is
//! reported alongside; it is also the returned value when every observation
//! sits on a window edge, where the likelihood has no finite maximum.

use super::{RepetitionTable, StatsError};

pub const MIN_OBSERVATIONS: usize = 50;

/// Above this many terms the normalizing sums switch to an Euler–Maclaurin tail.
const DIRECT_TERMS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Exact,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub closed_form_alpha: f64,
    /// Observations inside the window.
    pub n: usize,
    pub xmin: u64,
    pub xmax: u64,
    pub method: FitMethod,
}

/// Fits the per-message repetition counts of `table`.
pub fn fit_power_law(table: &RepetitionTable, xmin: u64, xmax: u64) -> Result<PowerLawFit, StatsError> {
    let samples: Vec<u64> = table.counts.values().copied().collect();
    fit_power_law_samples(&samples, xmin, xmax)
}

pub fn fit_power_law_samples(samples: &[u64], xmin: u64, xmax: u64) -> Result<PowerLawFit, StatsError> {
    if xmin == 0 || xmax < xmin {
        return Err(StatsError::InvalidWindow { xmin, xmax });
    }
    // Sorting first makes the floating-point sums independent of input order.
    let mut obs: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin && x <= xmax).collect();
    obs.sort_unstable();
    if obs.len() < MIN_OBSERVATIONS {
        return Err(StatsError::InsufficientData {
            needed: MIN_OBSERVATIONS,
            found: obs.len(),
            xmin,
            xmax,
        });
    }
    let n = obs.len();
    let shift = xmin as f64 - 0.5;
    let closed_form_alpha = 1.0 + n as f64 / obs.iter().map(|&x| (x as f64 / shift).ln()).sum::<f64>();

    let base = PowerLawFit {
        alpha: closed_form_alpha,
        closed_form_alpha,
        n,
        xmin,
        xmax,
        method: FitMethod::ClosedForm,
    };
    if obs[0] == obs[n - 1] && (obs[0] == xmin || obs[0] == xmax) {
        return Ok(base);
    }

    let target = obs.iter().map(|&x| (x as f64).ln()).sum::<f64>() / n as f64;
    // E_α[ln x] decreases in α, from ln xmax (α → -∞) to ln xmin (α → ∞).
    let score = |alpha: f64| mean_log(alpha, xmin, xmax) - target;
    let (mut lo, mut hi) = (-100.0f64, 500.0f64);
    if score(lo) <= 0.0 || score(hi) >= 0.0 {
        return Ok(base);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(PowerLawFit {
        alpha: 0.5 * (lo + hi),
        method: FitMethod::Exact,
        ..base
    })
}

/// `Σ k^-α ln k / Σ k^-α` over `k ∈ [xmin, xmax]`.
fn mean_log(alpha: f64, xmin: u64, xmax: u64) -> f64 {
    // Factor out the largest term so nothing overflows for large |α|.
    let anchor = if alpha >= 0.0 { xmin } else { xmax } as f64;
    let scale = -alpha * anchor.ln();
    let f = |k: f64| (-alpha * k.ln() - scale).exp();

    let direct_end = xmax.min(xmin.saturating_add(DIRECT_TERMS));
    let mut z = 0.0;
    let mut zl = 0.0;
    for k in xmin..=direct_end {
        let kf = k as f64;
        let w = f(kf);
        z += w;
        zl += w * kf.ln();
    }
    if direct_end < xmax {
        // Σ_{k=a+1}^{b} via Euler–Maclaurin on [a+1, b].
        let a = (direct_end + 1) as f64;
        let b = xmax as f64;
        let e = (-scale).exp();
        let (int_f, int_g) = tail_integrals(alpha, a, b);
        let g = |k: f64| f(k) * k.ln();
        let df = |k: f64| -alpha * f(k) / k;
        let dg = |k: f64| f(k) / k * (1.0 - alpha * k.ln());
        z += e * int_f + 0.5 * (f(a) + f(b)) + (df(b) - df(a)) / 12.0;
        zl += e * int_g + 0.5 * (g(a) + g(b)) + (dg(b) - dg(a)) / 12.0;
    }
    zl / z
}

/// `∫_a^b k^-α dk` and `∫_a^b k^-α ln k dk`.
fn tail_integrals(alpha: f64, a: f64, b: f64) -> (f64, f64) {
    let s = 1.0 - alpha;
    if s.abs() < 1e-12 {
        let (la, lb) = (a.ln(), b.ln());
        return (lb - la, 0.5 * (lb * lb - la * la));
    }
    let prim_f = |k: f64| k.powf(s) / s;
    let prim_g = |k: f64| k.powf(s) * (k.ln() / s - 1.0 / (s * s));
    (prim_f(b) - prim_f(a), prim_g(b) - prim_g(a))
}
