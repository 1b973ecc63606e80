//! Browser bindings: kernel blip fits, a single online run, and a small
//! coverage study. Each binding wraps a plain Rust function so the logic is
//! testable natively.

use optvalue::dgp::DgpSpec;
use optvalue::estimator::{online_one_step, OnlineConfig, TermRecord};
use optvalue::harness::{fingerprint_grid, run_experiment, ExperimentConfig, Method};
use optvalue::model::{NuisanceModel, DEFAULT_PROPENSITY_FLOOR};
use optvalue::normal;
use optvalue::nuisance::kernel::cv_risks;
use optvalue::nuisance::{nw_blip, BandwidthGrid, Learner};
use optvalue::rng::derive_seed;
use wasm_bindgen::prelude::*;

fn js_err(e: optvalue::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn continuous(dgp: &str) -> optvalue::Result<DgpSpec> {
    let dgp: DgpSpec = dgp.parse()?;
    if dgp == DgpSpec::DiscreteExceptional {
        return Err(optvalue::Error::InvalidArgument("kernel fits need a continuous process (c-ne or c-e)".into()));
    }
    Ok(dgp)
}

/// True and kernel-estimated blip on a grid over `[-1, 1]`, with the
/// cross-validated risk of every candidate bandwidth.
#[wasm_bindgen]
pub struct BlipCurves {
    w: Vec<f64>,
    truth: Vec<f64>,
    estimate: Vec<f64>,
    candidates: Vec<f64>,
    risks: Vec<f64>,
    selected: f64,
    bandwidth: f64,
}

#[wasm_bindgen]
impl BlipCurves {
    #[wasm_bindgen(getter)]
    pub fn w(&self) -> Vec<f64> {
        self.w.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn candidates(&self) -> Vec<f64> {
        self.candidates.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn risks(&self) -> Vec<f64> {
        self.risks.clone()
    }
    /// Bandwidth with the smallest cross-validated risk.
    #[wasm_bindgen(getter)]
    pub fn selected(&self) -> f64 {
        self.selected
    }
    /// Bandwidth used for `estimate`.
    #[wasm_bindgen(getter)]
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

/// `h <= 0` uses the cross-validated bandwidth.
pub fn fit_blip(dgp: &str, n: usize, seed: u64, h: f64, points: usize) -> optvalue::Result<BlipCurves> {
    let dgp = continuous(dgp)?;
    let data = dgp.sample(n, seed)?;
    let grid = BandwidthGrid::default();
    let risks = cv_risks(data.records(), &grid, &dgp.oracle(), seed)?;
    let best = risks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| grid.candidates()[i])
        .expect("grid is nonempty");
    let bandwidth = if h > 0.0 { h } else { best };
    let fit = nw_blip(data.records(), bandwidth)?;
    let points = points.max(2);
    let w: Vec<f64> = (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64).collect();
    Ok(BlipCurves {
        truth: w.iter().map(|&x| dgp.blip0(x)).collect(),
        estimate: w.iter().map(|&x| fit.blip(x)).collect(),
        w,
        candidates: grid.candidates().to_vec(),
        risks,
        selected: best,
        bandwidth,
    })
}

#[wasm_bindgen(js_name = fitBlip)]
pub fn fit_blip_js(dgp: &str, n: usize, seed: u64, h: f64, points: usize) -> Result<BlipCurves, JsError> {
    fit_blip(dgp, n, seed, h, points).map_err(js_err)
}

/// One online run: the running estimate and interval after each scored
/// observation, plus the final interval and the true optimal value.
#[wasm_bindgen]
pub struct Trajectory {
    j: Vec<f64>,
    estimate: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    truth: f64,
    /// Decisions of the last fitted rule on a grid (continuous) or per stratum.
    rule: Vec<f64>,
}

#[wasm_bindgen]
impl Trajectory {
    #[wasm_bindgen(getter)]
    pub fn j(&self) -> Vec<f64> {
        self.j.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn lower(&self) -> Vec<f64> {
        self.lower.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn upper(&self) -> Vec<f64> {
        self.upper.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> f64 {
        self.truth
    }
    #[wasm_bindgen(getter)]
    pub fn rule(&self) -> Vec<f64> {
        self.rule.clone()
    }
}

fn running(log: &[TermRecord], alpha: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let z = normal::quantile(1.0 - alpha / 2.0);
    let (mut inv, mut weighted) = (0.0, 0.0);
    let mut out = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, t) in log.iter().enumerate() {
        inv += 1.0 / t.sigma;
        weighted += t.influence / t.sigma;
        let psi = weighted / inv;
        let half = z * ((k + 1) as f64).sqrt() / inv;
        out.0.push(t.j as f64);
        out.1.push(psi);
        out.2.push(psi - half);
        out.3.push(psi + half);
    }
    out
}

pub fn online_run(dgp: &str, n: usize, ell: usize, seed: u64, alpha: f64) -> optvalue::Result<Trajectory> {
    let dgp: DgpSpec = dgp.parse()?;
    let cfg = ExperimentConfig::new(dgp, n, ell);
    let schedule = cfg.validate()?;
    let oracle = dgp.oracle();
    let learner = cfg.mode.learner(oracle, &cfg.grid);
    let data = dgp.sample(n, seed)?;
    let est = online_one_step(
        data.records(),
        &schedule,
        &learner,
        &OnlineConfig {
            seed,
            keep_log: true,
            ..OnlineConfig::default()
        },
    )?;
    est.two_sided_ci(alpha)?;
    let (j, estimate, lower, upper) = running(est.log.as_deref().unwrap_or(&[]), alpha);
    let last = learner.fit(data.records(), seed)?;
    let rule = fingerprint_grid(dgp.covariate_kind())
        .into_iter()
        .map(|w| last.decide(w).map_or(f64::NAN, f64::from))
        .collect();
    Ok(Trajectory {
        j,
        estimate,
        lower,
        upper,
        truth: oracle.optimal_value,
        rule,
    })
}

#[wasm_bindgen(js_name = onlineRun)]
pub fn online_run_js(dgp: &str, n: usize, ell: usize, seed: u64, alpha: f64) -> Result<Trajectory, JsError> {
    online_run(dgp, n, ell, seed, alpha).map_err(js_err)
}

/// Counts from a batch of replicates, so a page can accumulate batches.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageBatch {
    pub online_ok: u32,
    pub online_covered: u32,
    pub online_width_sum: f64,
    pub classical_ok: u32,
    pub classical_covered: u32,
    pub classical_width_sum: f64,
    pub truth: f64,
}

/// `count` replicates of the online/classical comparison. Batch `batch`
/// draws from its own seed, so batches can be pooled.
pub fn coverage_batch(dgp: &str, n: usize, ell: usize, seed: u64, batch: u32, count: usize) -> optvalue::Result<CoverageBatch> {
    let dgp: DgpSpec = dgp.parse()?;
    let cfg = ExperimentConfig {
        replicates: count,
        seed: derive_seed(seed, u64::from(batch)),
        ..ExperimentConfig::new(dgp, n, ell)
    };
    let (report, records) = run_experiment(&cfg)?;
    let mut b = CoverageBatch {
        online_ok: 0,
        online_covered: 0,
        online_width_sum: 0.0,
        classical_ok: 0,
        classical_covered: 0,
        classical_width_sum: 0.0,
        truth: report.context.truth,
    };
    for r in &records {
        for o in &r.outcomes {
            let Ok(iv) = &o.result else { continue };
            let (ok, covered, width) = match o.method {
                Method::Online => (&mut b.online_ok, &mut b.online_covered, &mut b.online_width_sum),
                Method::Classical => (&mut b.classical_ok, &mut b.classical_covered, &mut b.classical_width_sum),
                Method::Bootstrap { .. } => continue,
            };
            *ok += 1;
            *covered += u32::from(iv.covers(r.truth));
            *width += iv.width();
        }
    }
    Ok(b)
}

#[wasm_bindgen(js_name = coverageBatch)]
pub fn coverage_batch_js(dgp: &str, n: usize, ell: usize, seed: u64, batch: u32, count: usize) -> Result<CoverageBatch, JsError> {
    coverage_batch(dgp, n, ell, seed, batch, count).map_err(js_err)
}

#[wasm_bindgen(js_name = propensityFloor)]
pub fn propensity_floor() -> f64 {
    DEFAULT_PROPENSITY_FLOOR
}
