//! m-out-of-n bootstrap interval for the value of an estimated rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimator::classical_one_step;
use crate::model::{Observation, DEFAULT_PROPENSITY_FLOOR};
use crate::nuisance::Learner;
use crate::rng::{self, derive_seed, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    /// Resample size.
    pub m: usize,
    /// Number of resamples.
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(m: usize, b: usize, alpha: f64, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("resample size m must be at least 1".into()));
        }
        if b < 2 {
            return Err(Error::InvalidArgument("at least 2 bootstrap draws are needed".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Self { m, b, alpha, seed })
    }
}

/// `m = 0.1 n, 0.2 n, ..., n` (rounded, at least 1, deduplicated).
pub fn default_m_grid(n: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (1..=10).map(|k| ((k * n) as f64 / 10.0).round().max(1.0) as usize).collect();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCi {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub m: usize,
    /// Draws on which the NPMLE was ill-defined (replaced by the fallback
    /// value, or discarded when there is none).
    pub ill_defined_count: usize,
}

/// Type-7 (linear interpolation) quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Centered percentile-of-roots interval: with `q_p` the `p`-quantile of
/// `sqrt(m) (psi*_b - point)`, returns
/// `[point - q_{1-alpha/2} / sqrt(n), point - q_{alpha/2} / sqrt(n)]`.
///
/// `point` is the classical one-step on the full data; each resample of size
/// `m` (with replacement) is re-estimated the same way, refitting the
/// learner. A resample on which the NPMLE is ill-defined contributes
/// `truth_fallback` when given and is dropped otherwise.
pub fn m_out_of_n_ci<L: Learner + ?Sized>(data: &[Observation], learner: &L, cfg: &BootstrapConfig, truth_fallback: Option<f64>) -> Result<BootstrapCi> {
    let point = classical_one_step(data, learner, derive_seed(cfg.seed, u64::MAX), DEFAULT_PROPENSITY_FLOOR)?.psi_hat;
    m_out_of_n_ci_at(data, learner, cfg, truth_fallback, point)
}

/// As [`m_out_of_n_ci`] with a precomputed full-data point estimate.
pub fn m_out_of_n_ci_at<L: Learner + ?Sized>(data: &[Observation], learner: &L, cfg: &BootstrapConfig, truth_fallback: Option<f64>, point: f64) -> Result<BootstrapCi> {
    let n = data.len();
    if cfg.m > n {
        return Err(Error::InvalidArgument(format!("resample size {} exceeds n = {n}", cfg.m)));
    }
    let root_m = (cfg.m as f64).sqrt();
    let mut roots = Vec::with_capacity(cfg.b);
    let mut ill_defined = 0;
    let mut resample = Vec::with_capacity(cfg.m);
    for draw in 0..cfg.b {
        let mut rng = rng::stream(cfg.seed, draw as u64, Purpose::Resample);
        resample.clear();
        resample.extend((0..cfg.m).map(|_| data[rng.random_range(0..n)]));
        let value = match classical_one_step(&resample, learner, derive_seed(cfg.seed, draw as u64), DEFAULT_PROPENSITY_FLOOR) {
            Ok(est) => est.psi_hat,
            Err(e) if e.is_ill_defined() => {
                ill_defined += 1;
                match truth_fallback {
                    Some(t) => t,
                    None => continue,
                }
            }
            Err(e) => return Err(e),
        };
        roots.push(root_m * (value - point));
    }
    if roots.len() < 2 {
        return Err(Error::Numerical(format!("only {} usable bootstrap draws", roots.len())));
    }
    roots.sort_by(f64::total_cmp);
    let root_n = (n as f64).sqrt();
    let q_lo = quantile_sorted(&roots, cfg.alpha / 2.0);
    let q_hi = quantile_sorted(&roots, 1.0 - cfg.alpha / 2.0);
    Ok(BootstrapCi {
        point,
        lower: point - q_hi / root_n,
        upper: point - q_lo / root_n,
        m: cfg.m,
        ill_defined_count: ill_defined,
    })
}
