//! Monte Carlo experiment driver: coverage, bias and width of the online,
//! classical and bootstrap intervals, plus the permutation, initial-chunk
//! and bootstrap-size studies.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::bootstrap::{m_out_of_n_ci_at, BootstrapConfig};
use crate::dgp::{DgpSpec, OracleTruth};
use crate::error::{Error, Result};
use crate::estimator::{classical_one_step_with, online_one_step, ChunkSchedule, OnlineConfig, RefitPolicy, DEFAULT_SIGMA_FLOOR};
use crate::model::{Covariate, CovariateKind, Dataset, FnRule, NuisanceModel, Observation, DEFAULT_PROPENSITY_FLOOR};
use crate::nuisance::{AnyLearner, AnyModel, BandwidthGrid, FixedLearner, KernelLearner, KernelRuleLearner, Learner, NpmleLearner};
use crate::rng::{self, derive_seed, Purpose};

/// An interval procedure compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Online,
    Classical,
    /// m-out-of-n bootstrap with resample size `m`.
    Bootstrap { m: usize },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Online => f.write_str("online"),
            Method::Classical => f.write_str("classical"),
            Method::Bootstrap { m } => write!(f, "bootstrap-m{m}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "online" => Ok(Method::Online),
            "classical" => Ok(Method::Classical),
            _ => s
                .strip_prefix("bootstrap-m")
                .and_then(|m| m.parse().ok())
                .filter(|&m| m > 0)
                .map(|m| Method::Bootstrap { m })
                .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

/// How the nuisances entering the influence terms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuisanceMode {
    /// Discrete data: cell means and proportions estimate everything.
    Npmle,
    /// True outcome regression and propensity; only the rule is learned,
    /// from a cross-validated kernel blip estimate.
    OracleKernelRule,
    /// Continuous data, everything estimated by kernel smoothing.
    Kernel,
    /// True nuisances and the true optimal rule; nothing is learned.
    Oracle,
}

impl NuisanceMode {
    pub const ALL: [NuisanceMode; 4] = [NuisanceMode::Npmle, NuisanceMode::OracleKernelRule, NuisanceMode::Kernel, NuisanceMode::Oracle];

    /// The simulation default: NPMLE for discrete covariates, true
    /// regression and propensity with a learned rule otherwise.
    pub fn default_for(dgp: DgpSpec) -> Self {
        match dgp.covariate_kind() {
            CovariateKind::Discrete => NuisanceMode::Npmle,
            CovariateKind::Continuous => NuisanceMode::OracleKernelRule,
        }
    }

    /// Cell-mean fits are cheap, so the NPMLE is refit before every
    /// observation; smoother-based modes refit once per block.
    pub fn default_refit(&self) -> RefitPolicy {
        match self {
            NuisanceMode::Npmle => RefitPolicy::EveryObservation,
            _ => RefitPolicy::Blocks,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NuisanceMode::Npmle => "npmle",
            NuisanceMode::OracleKernelRule => "oracle-q-kernel-rule",
            NuisanceMode::Kernel => "kernel",
            NuisanceMode::Oracle => "oracle",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            NuisanceMode::Npmle => "Q, g and rule all estimated by the NPMLE",
            NuisanceMode::OracleKernelRule => "true Q and g; rule from a cross-validated kernel blip",
            NuisanceMode::Kernel => "Q, g and rule all estimated by kernel smoothing",
            NuisanceMode::Oracle => "true Q, g and optimal rule",
        }
    }

    fn check(&self, dgp: DgpSpec) -> Result<()> {
        let ok = match self {
            NuisanceMode::Npmle => dgp.covariate_kind() == CovariateKind::Discrete,
            NuisanceMode::OracleKernelRule | NuisanceMode::Kernel => dgp.covariate_kind() == CovariateKind::Continuous,
            NuisanceMode::Oracle => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("nuisance mode `{}` does not apply to {dgp}", self.name())))
        }
    }

    /// The learner for this mode; `oracle` supplies the truths it injects.
    pub fn learner(&self, oracle: OracleTruth, grid: &BandwidthGrid) -> AnyLearner {
        match self {
            NuisanceMode::Npmle => AnyLearner::Npmle(NpmleLearner),
            NuisanceMode::OracleKernelRule => AnyLearner::KernelRule(KernelRuleLearner::new(oracle, grid.clone())),
            NuisanceMode::Kernel => AnyLearner::Kernel(KernelLearner {
                grid: grid.clone(),
                ..KernelLearner::default()
            }),
            NuisanceMode::Oracle => AnyLearner::Fixed(FixedLearner(oracle)),
        }
    }
}

impl fmt::Display for NuisanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NuisanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown nuisance mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dgp: DgpSpec,
    pub n: usize,
    pub ell_n: usize,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub mode: NuisanceMode,
    pub sigma_floor: f64,
    /// Resamples per bootstrap interval.
    pub bootstrap_draws: usize,
    pub grid: BandwidthGrid,
    /// Worker threads; `None` uses all available.
    pub threads: Option<usize>,
    /// Online refit schedule; `None` uses [`NuisanceMode::default_refit`].
    pub refit: Option<RefitPolicy>,
}

impl ExperimentConfig {
    /// Online and classical methods, 2000 replicates, default mode for `dgp`.
    pub fn new(dgp: DgpSpec, n: usize, ell_n: usize) -> Self {
        Self {
            dgp,
            n,
            ell_n,
            methods: vec![Method::Online, Method::Classical],
            replicates: 2000,
            alpha: 0.05,
            seed: 0,
            mode: NuisanceMode::default_for(dgp),
            sigma_floor: DEFAULT_SIGMA_FLOOR,
            bootstrap_draws: 500,
            grid: BandwidthGrid::default(),
            threads: None,
            refit: None,
        }
    }

    pub fn refit_policy(&self) -> RefitPolicy {
        self.refit.unwrap_or_else(|| self.mode.default_refit())
    }

    pub fn validate(&self) -> Result<ChunkSchedule> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("at least one replicate is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods selected".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 0.5), got {}", self.alpha)));
        }
        if !(self.sigma_floor > 0.0) || !self.sigma_floor.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma floor must be positive, got {}", self.sigma_floor)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        for m in &self.methods {
            if let Method::Bootstrap { m } = *m {
                BootstrapConfig::new(m, self.bootstrap_draws, self.alpha, 0)?;
                if m > self.n {
                    return Err(Error::InvalidArgument(format!("resample size {m} exceeds n = {}", self.n)));
                }
            }
        }
        self.mode.check(self.dgp)?;
        self.refit_policy().schedule(self.n, self.ell_n)
    }

    pub fn context(&self, truth: f64) -> ExperimentContext {
        ExperimentContext {
            dgp: self.dgp,
            n: self.n,
            ell_n: self.ell_n,
            mode: self.mode,
            alpha: self.alpha,
            truth,
        }
    }
}

/// Settings a report is labelled with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentContext {
    pub dgp: DgpSpec,
    pub n: usize,
    pub ell_n: usize,
    pub mode: NuisanceMode,
    pub alpha: f64,
    /// Optimal value of the process.
    pub truth: f64,
}

/// One method's interval on one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    /// Lower end of the one-sided interval, where the method has one.
    pub lower_one_sided: Option<f64>,
    /// Bootstrap draws on which the NPMLE was ill-defined.
    pub ill_defined_draws: usize,
}

impl Interval {
    pub fn covers(&self, target: f64) -> bool {
        self.lower <= target && target <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    /// The interval, or the failure message.
    pub result: std::result::Result<Interval, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub index: usize,
    /// Optimal value of the process.
    pub truth: f64,
    /// True value of the rule estimated on the whole replicate, when that
    /// fit succeeded.
    pub adaptive_truth: Option<f64>,
    /// Decisions of that rule on a fixed covariate grid, as `0`/`1` digits.
    pub fingerprint: String,
    pub outcomes: Vec<MethodOutcome>,
}

/// Mean with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub se: f64,
}

impl McEstimate {
    fn proportion(hits: usize, total: usize) -> Option<Self> {
        (total > 0).then(|| {
            let p = hits as f64 / total as f64;
            McEstimate {
                value: p,
                se: (p * (1.0 - p) / total as f64).sqrt(),
            }
        })
    }

    /// Sample mean and `sd / sqrt(k)` (NaN standard error below 2 values).
    fn mean(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let se = if xs.len() < 2 {
            f64::NAN
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0) / k).sqrt()
        };
        Some(McEstimate { value: mean, se })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub succeeded: usize,
    pub failed: usize,
    /// Two-sided coverage of the optimal value.
    pub coverage: Option<McEstimate>,
    /// Coverage of the optimal value by `[lower_one_sided, inf)`.
    pub one_sided_coverage: Option<McEstimate>,
    /// Two-sided coverage of the value of the full-sample rule.
    pub adaptive_coverage: Option<McEstimate>,
    /// Mean of `point - truth`.
    pub bias: Option<McEstimate>,
    /// Square of the mean bias, with delta-method standard error.
    pub squared_bias: Option<McEstimate>,
    pub width: Option<McEstimate>,
    pub ill_defined_draws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub context: ExperimentContext,
    pub replicates: usize,
    pub methods: Vec<MethodSummary>,
}

impl MonteCarloReport {
    /// Aggregates records in index order; methods keep their first-seen
    /// order.
    pub fn from_records(context: ExperimentContext, records: &[ReplicateRecord]) -> Self {
        let mut sorted: Vec<&ReplicateRecord> = records.iter().collect();
        sorted.sort_by_key(|r| r.index);
        let mut methods: Vec<Method> = Vec::new();
        for o in sorted.iter().flat_map(|r| &r.outcomes) {
            if !methods.contains(&o.method) {
                methods.push(o.method);
            }
        }
        let summaries = methods.iter().map(|&m| summarize_method(m, &sorted)).collect();
        MonteCarloReport {
            context,
            replicates: sorted.len(),
            methods: summaries,
        }
    }

    pub fn method(&self, m: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }
}

fn summarize_method(method: Method, records: &[&ReplicateRecord]) -> MethodSummary {
    let mut failed = 0;
    let mut ok: Vec<(Interval, &ReplicateRecord)> = Vec::new();
    for r in records {
        for o in r.outcomes.iter().filter(|o| o.method == method) {
            match &o.result {
                Ok(iv) => ok.push((*iv, r)),
                Err(_) => failed += 1,
            }
        }
    }
    let covered = ok.iter().filter(|(iv, r)| iv.covers(r.truth)).count();
    let one_sided: Vec<bool> = ok.iter().filter_map(|(iv, r)| iv.lower_one_sided.map(|lb| r.truth > lb)).collect();
    let adaptive: Vec<bool> = ok.iter().filter_map(|(iv, r)| r.adaptive_truth.map(|t| iv.covers(t))).collect();
    let errors: Vec<f64> = ok.iter().map(|(iv, r)| iv.point - r.truth).collect();
    let widths: Vec<f64> = ok.iter().map(|(iv, _)| iv.width()).collect();
    let bias = McEstimate::mean(&errors);
    MethodSummary {
        method,
        succeeded: ok.len(),
        failed,
        coverage: McEstimate::proportion(covered, ok.len()),
        one_sided_coverage: McEstimate::proportion(one_sided.iter().filter(|&&c| c).count(), one_sided.len()),
        adaptive_coverage: McEstimate::proportion(adaptive.iter().filter(|&&c| c).count(), adaptive.len()),
        bias,
        squared_bias: bias.map(|b| McEstimate {
            value: b.value * b.value,
            se: 2.0 * b.value.abs() * b.se,
        }),
        width: McEstimate::mean(&widths),
        ill_defined_draws: ok.iter().map(|(iv, _)| iv.ill_defined_draws).sum(),
    }
}

/// Covariate points at which rule fingerprints are taken.
pub fn fingerprint_grid(kind: CovariateKind) -> Vec<Covariate> {
    match kind {
        CovariateKind::Discrete => (0..4).map(Covariate::Stratum).collect(),
        CovariateKind::Continuous => (0..=40).map(|i| Covariate::Real(-1.0 + i as f64 / 20.0)).collect(),
    }
}

// Seed tags for the per-replicate derived seeds.
const TAG_ONLINE: u64 = 1;
const TAG_FULL_FIT: u64 = 2;
const TAG_BOOTSTRAP: u64 = 3;

/// Runs `f(0..count)` on the configured number of workers; results come
/// back in index order whatever the scheduling.
fn par_map<T: Send>(threads: Option<usize>, count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || (0..count).into_par_iter().map(&f).collect();
        match threads {
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("cannot start {k} worker threads: {e}")))?;
                Ok(pool.install(run))
            }
            None => Ok(run()),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok((0..count).map(f).collect())
    }
}

fn replicate_data(cfg: &ExperimentConfig, index: usize) -> Dataset {
    cfg.dgp.sample_with(cfg.n, &mut rng::stream(cfg.seed, index as u64, Purpose::Sample))
}

fn online_interval(data: &[Observation], schedule: &ChunkSchedule, learner: &AnyLearner, cfg: &ExperimentConfig, seed: u64) -> Result<Interval> {
    let online_cfg = OnlineConfig {
        sigma_floor: cfg.sigma_floor,
        propensity_floor: DEFAULT_PROPENSITY_FLOOR,
        seed,
        keep_log: false,
    };
    let est = online_one_step(data, schedule, learner, &online_cfg)?;
    let (lower, upper) = est.two_sided_ci(cfg.alpha)?;
    Ok(Interval {
        point: est.psi_hat,
        lower,
        upper,
        lower_one_sided: Some(est.lower_bound(cfg.alpha)?),
        ill_defined_draws: 0,
    })
}

/// True value of a fitted model's rule, or `None` if the rule cannot be
/// evaluated everywhere.
fn value_of_fitted_rule(dgp: DgpSpec, model: &AnyModel) -> Option<f64> {
    let failed = Cell::new(false);
    let value = dgp.value_of_rule(&FnRule(|w| {
        model.decide(w).unwrap_or_else(|_| {
            failed.set(true);
            0
        })
    }));
    (!failed.get()).then_some(value)
}

fn fingerprint(dgp: DgpSpec, model: &AnyModel) -> String {
    fingerprint_grid(dgp.covariate_kind())
        .into_iter()
        .map(|w| match model.decide(w) {
            Ok(0) => '0',
            Ok(_) => '1',
            Err(_) => '?',
        })
        .collect()
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    oracle: OracleTruth,
    learner: AnyLearner,
    schedule: ChunkSchedule,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let schedule = cfg.validate()?;
        let oracle = cfg.dgp.oracle();
        Ok(Self {
            cfg,
            oracle,
            learner: cfg.mode.learner(oracle, &cfg.grid),
            schedule,
        })
    }

    fn replicate(&self, index: usize) -> ReplicateRecord {
        let cfg = self.cfg;
        let data = replicate_data(cfg, index);
        let data = data.records();
        let rep_seed = derive_seed(cfg.seed, index as u64);
        let full = self.learner.fit(data, derive_seed(rep_seed, TAG_FULL_FIT));
        let classical = full
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|model| classical_one_step_with(data, model, DEFAULT_PROPENSITY_FLOOR));
        let outcomes = cfg
            .methods
            .iter()
            .map(|&method| {
                let result = match method {
                    Method::Online => online_interval(data, &self.schedule, &self.learner, cfg, derive_seed(rep_seed, TAG_ONLINE)),
                    Method::Classical => classical.clone().and_then(|est| {
                        let (lower, upper) = est.wald_ci(cfg.alpha)?;
                        Ok(Interval {
                            point: est.psi_hat,
                            lower,
                            upper,
                            lower_one_sided: Some(est.lower_bound(cfg.alpha)?),
                            ill_defined_draws: 0,
                        })
                    }),
                    Method::Bootstrap { m } => classical.clone().and_then(|est| {
                        let bcfg = BootstrapConfig::new(m, cfg.bootstrap_draws, cfg.alpha, derive_seed(rep_seed, TAG_BOOTSTRAP))?;
                        let ci = m_out_of_n_ci_at(data, &self.learner, &bcfg, Some(self.oracle.optimal_value), est.psi_hat)?;
                        Ok(Interval {
                            point: ci.point,
                            lower: ci.lower,
                            upper: ci.upper,
                            lower_one_sided: None,
                            ill_defined_draws: ci.ill_defined_count,
                        })
                    }),
                };
                MethodOutcome {
                    method,
                    result: result.map_err(|e| e.to_string()),
                }
            })
            .collect();
        let (adaptive_truth, fingerprint) = match &full {
            Ok(model) => (value_of_fitted_rule(cfg.dgp, model), fingerprint(cfg.dgp, model)),
            Err(_) => (None, String::new()),
        };
        ReplicateRecord {
            index,
            truth: self.oracle.optimal_value,
            adaptive_truth,
            fingerprint,
            outcomes,
        }
    }
}

/// Runs every replicate of `cfg` and aggregates. Per-replicate method
/// failures are kept in the records and counted in the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(MonteCarloReport, Vec<ReplicateRecord>)> {
    let runner = Runner::new(cfg)?;
    let records = par_map(cfg.threads, cfg.replicates, |i| runner.replicate(i))?;
    let report = MonteCarloReport::from_records(cfg.context(runner.oracle.optimal_value), &records);
    Ok((report, records))
}

/// Orderings compared by [`permutation_sensitivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    /// Both runs see the data in sampled order.
    Identity,
    /// Each run sees an independent seeded shuffle.
    Shuffle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationReport {
    pub replicates: usize,
    pub failed: usize,
    /// Share of replicates where both or neither interval covers the truth.
    pub agreement: Option<McEstimate>,
    /// Coverage of each of the two runs.
    pub coverage: [Option<McEstimate>; 2],
    /// Per replicate (index order), first estimate minus second.
    pub differences: Vec<f64>,
    pub difference_sd: f64,
    pub mean_abs_difference: f64,
}

/// Runs the online estimator twice per replicate on two orderings of the
/// same sample.
pub fn permutation_sensitivity(cfg: &ExperimentConfig, mode: PermutationMode) -> Result<PermutationReport> {
    let runner = Runner::new(cfg)?;
    let truth = runner.oracle.optimal_value;
    let pairs = par_map(cfg.threads, cfg.replicates, |i| -> Result<(Interval, Interval)> {
        let data = replicate_data(cfg, i);
        let online_seed = derive_seed(derive_seed(cfg.seed, i as u64), TAG_ONLINE);
        let run = |purpose: Purpose| {
            let mut order: Vec<usize> = (0..cfg.n).collect();
            if mode == PermutationMode::Shuffle {
                order.shuffle(&mut rng::stream(cfg.seed, i as u64, purpose));
            }
            online_interval(data.reordered(&order).records(), &runner.schedule, &runner.learner, cfg, online_seed)
        };
        Ok((run(Purpose::Permute)?, run(Purpose::PermuteAlt)?))
    })?;
    let ok: Vec<(Interval, Interval)> = pairs.iter().filter_map(|p| p.as_ref().ok().copied()).collect();
    let agree = ok.iter().filter(|(a, b)| a.covers(truth) == b.covers(truth)).count();
    let differences: Vec<f64> = ok.iter().map(|(a, b)| a.point - b.point).collect();
    let diff = McEstimate::mean(&differences);
    Ok(PermutationReport {
        replicates: cfg.replicates,
        failed: cfg.replicates - ok.len(),
        agreement: McEstimate::proportion(agree, ok.len()),
        coverage: [
            McEstimate::proportion(ok.iter().filter(|(a, _)| a.covers(truth)).count(), ok.len()),
            McEstimate::proportion(ok.iter().filter(|(_, b)| b.covers(truth)).count(), ok.len()),
        ],
        difference_sd: diff.map_or(f64::NAN, |d| d.se * (differences.len() as f64).sqrt()),
        mean_abs_difference: differences.iter().map(|d| d.abs()).sum::<f64>() / differences.len().max(1) as f64,
        differences,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllRow {
    pub ell_n: usize,
    pub coverage: Option<McEstimate>,
    pub width: Option<McEstimate>,
}

/// Mean width at `to` over mean width at `from`, on the same replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EllRatio {
    pub from: usize,
    pub to: usize,
    pub ratio: McEstimate,
    /// `sqrt((n - from) / (n - to))`, the change in the `1/sqrt(n - l)`
    /// factor alone.
    pub nominal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllReport {
    pub n: usize,
    /// Replicates on which every run succeeded; only these enter the table.
    pub used: usize,
    pub failed: usize,
    pub rows: Vec<EllRow>,
    pub ratios: Vec<EllRatio>,
}

/// Online intervals for several initial chunk sizes on the same replicates.
/// `cfg.ell_n` is ignored.
pub fn elln_sensitivity(cfg: &ExperimentConfig, ells: &[usize]) -> Result<EllReport> {
    if ells.is_empty() {
        return Err(Error::InvalidArgument("no initial chunk sizes given".into()));
    }
    let schedules = ells
        .iter()
        .map(|&l| cfg.refit_policy().schedule(cfg.n, l))
        .collect::<Result<Vec<_>>>()?;
    let base = ExperimentConfig {
        ell_n: ells[0],
        ..cfg.clone()
    };
    let runner = Runner::new(&base)?;
    let truth = runner.oracle.optimal_value;
    let runs = par_map(cfg.threads, cfg.replicates, |i| -> Result<Vec<Interval>> {
        let data = replicate_data(cfg, i);
        let seed = derive_seed(derive_seed(cfg.seed, i as u64), TAG_ONLINE);
        schedules
            .iter()
            .map(|s| online_interval(data.records(), s, &runner.learner, cfg, seed))
            .collect()
    })?;
    let ok: Vec<Vec<Interval>> = runs.into_iter().filter_map(|r| r.ok()).collect();
    let rows = ells
        .iter()
        .enumerate()
        .map(|(k, &ell_n)| EllRow {
            ell_n,
            coverage: McEstimate::proportion(ok.iter().filter(|r| r[k].covers(truth)).count(), ok.len()),
            width: McEstimate::mean(&ok.iter().map(|r| r[k].width()).collect::<Vec<_>>()),
        })
        .collect();
    let mut ratios = Vec::new();
    for a in 0..ells.len() {
        for b in a + 1..ells.len() {
            let wa: Vec<f64> = ok.iter().map(|r| r[a].width()).collect();
            let wb: Vec<f64> = ok.iter().map(|r| r[b].width()).collect();
            if let Some(ratio) = ratio_of_means(&wb, &wa) {
                ratios.push(EllRatio {
                    from: ells[a],
                    to: ells[b],
                    ratio,
                    nominal: ((cfg.n - ells[a]) as f64 / (cfg.n - ells[b]) as f64).sqrt(),
                });
            }
        }
    }
    Ok(EllReport {
        n: cfg.n,
        used: ok.len(),
        failed: cfg.replicates - ok.len(),
        rows,
        ratios,
    })
}

/// `mean(num) / mean(den)` for paired samples, with delta-method standard
/// error.
fn ratio_of_means(num: &[f64], den: &[f64]) -> Option<McEstimate> {
    let (mn, md) = (McEstimate::mean(num)?, McEstimate::mean(den)?);
    let r = mn.value / md.value;
    let resid: Vec<f64> = num.iter().zip(den).map(|(b, a)| b - r * a).collect();
    let se = McEstimate::mean(&resid)?.se / md.value.abs();
    Some(McEstimate { value: r, se })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: usize,
    pub coverage: Option<McEstimate>,
    pub width: Option<McEstimate>,
    /// Mean bootstrap width over mean online width.
    pub width_ratio: f64,
    pub ill_defined_draws: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub online_coverage: Option<McEstimate>,
    pub online_width: Option<McEstimate>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Reads the sweep off a report containing the online method and
    /// bootstrap methods.
    pub fn from_report(report: &MonteCarloReport) -> Result<Self> {
        let online = report
            .method(Method::Online)
            .ok_or_else(|| Error::InvalidArgument("bootstrap sweep needs the online method".into()))?;
        let online_width = online.width.map_or(f64::NAN, |w| w.value);
        let mut rows: Vec<SweepRow> = report
            .methods
            .iter()
            .filter_map(|s| match s.method {
                Method::Bootstrap { m } => Some(SweepRow {
                    m,
                    coverage: s.coverage,
                    width: s.width,
                    width_ratio: s.width.map_or(f64::NAN, |w| w.value / online_width),
                    ill_defined_draws: s.ill_defined_draws,
                    failed: s.failed,
                }),
                _ => None,
            })
            .collect();
        rows.sort_by_key(|r| r.m);
        Ok(SweepReport {
            online_coverage: online.coverage,
            online_width: online.width,
            rows,
        })
    }

    /// Resample size with the narrowest mean interval among those whose
    /// coverage reaches `min_coverage`.
    pub fn oracle_m(&self, min_coverage: f64) -> Option<usize> {
        self.rows
            .iter()
            .filter(|r| r.coverage.is_some_and(|c| c.value >= min_coverage))
            .filter(|r| r.width.is_some())
            .min_by(|a, b| a.width_ratio.total_cmp(&b.width_ratio))
            .map(|r| r.m)
    }
}

/// Online intervals and the m-out-of-n bootstrap at every `m` of `m_grid`
/// on the same replicates. `cfg.methods` is replaced.
pub fn bootstrap_sweep(cfg: &ExperimentConfig, m_grid: &[usize]) -> Result<(SweepReport, MonteCarloReport, Vec<ReplicateRecord>)> {
    if m_grid.is_empty() {
        return Err(Error::InvalidArgument("resample size grid is empty".into()));
    }
    let mut methods = vec![Method::Online];
    methods.extend(m_grid.iter().map(|&m| Method::Bootstrap { m }));
    let cfg = ExperimentConfig { methods, ..cfg.clone() };
    let (report, records) = run_experiment(&cfg)?;
    Ok((SweepReport::from_report(&report)?, report, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dgp: DgpSpec, n: usize, ell: usize, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            replicates: reps,
            seed: 11,
            ..ExperimentConfig::new(dgp, n, ell)
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Online, Method::Classical, Method::Bootstrap { m: 70 }] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("bootstrap-m0".parse::<Method>().is_err());
        assert!("wald".parse::<Method>().is_err());
        for mode in NuisanceMode::ALL {
            assert_eq!(mode.name().parse::<NuisanceMode>().unwrap(), mode);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let ok = small(DgpSpec::DiscreteExceptional, 200, 50, 1);
        assert_eq!(ok.validate().unwrap().blocks(), 150);
        let blocks = ExperimentConfig { refit: Some(RefitPolicy::Blocks), ..ok.clone() };
        assert_eq!(blocks.validate().unwrap().blocks(), 3);
        let ce = ExperimentConfig::new(DgpSpec::ContinuousExceptional, 1000, 25);
        assert_eq!(ce.validate().unwrap().blocks(), 39);
        for bad in [
            ExperimentConfig { replicates: 0, ..ok.clone() },
            ExperimentConfig { ell_n: 200, ..ok.clone() },
            ExperimentConfig { alpha: 0.5, ..ok.clone() },
            ExperimentConfig { methods: vec![], ..ok.clone() },
            ExperimentConfig { mode: NuisanceMode::Kernel, ..ok.clone() },
            ExperimentConfig { methods: vec![Method::Bootstrap { m: 201 }], ..ok.clone() },
            ExperimentConfig { threads: Some(0), ..ok.clone() },
        ] {
            assert!(run_experiment(&bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn single_replicate_report_is_that_record() {
        let cfg = ExperimentConfig {
            methods: vec![Method::Online],
            ..small(DgpSpec::DiscreteExceptional, 400, 100, 1)
        };
        let (report, records) = run_experiment(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        let iv = records[0].outcomes[0].result.clone().unwrap();
        let s = report.method(Method::Online).unwrap();
        assert_eq!(s.succeeded, 1);
        let truth = records[0].truth;
        assert!((truth - 0.45).abs() < 1e-12);
        assert_eq!(s.coverage.unwrap().value, f64::from(u8::from(iv.covers(truth))));
        assert_eq!(s.bias.unwrap().value, iv.point - truth);
        assert_eq!(s.width.unwrap().value, iv.width());
        assert_eq!(records[0].fingerprint.len(), 4);
    }

    #[test]
    fn unbounded_intervals_always_cover() {
        let rec = |index, truth| ReplicateRecord {
            index,
            truth,
            adaptive_truth: Some(truth + 0.1),
            fingerprint: String::new(),
            outcomes: vec![MethodOutcome {
                method: Method::Online,
                result: Ok(Interval {
                    point: 0.0,
                    lower: f64::NEG_INFINITY,
                    upper: f64::INFINITY,
                    lower_one_sided: Some(f64::NEG_INFINITY),
                    ill_defined_draws: 0,
                }),
            }],
        };
        let ctx = ExperimentConfig::new(DgpSpec::ContinuousExceptional, 10, 2).context(0.3);
        let report = MonteCarloReport::from_records(ctx, &[rec(0, 0.3), rec(1, 0.3)]);
        let s = &report.methods[0];
        assert_eq!(s.coverage.unwrap().value, 1.0);
        assert_eq!(s.one_sided_coverage.unwrap().value, 1.0);
        assert_eq!(s.adaptive_coverage.unwrap().value, 1.0);
        assert_eq!(s.coverage.unwrap().se, 0.0);
    }

    #[test]
    fn failures_are_counted_not_dropped() {
        let ok = Interval {
            point: 0.5,
            lower: 0.4,
            upper: 0.6,
            lower_one_sided: Some(0.42),
            ill_defined_draws: 0,
        };
        let records: Vec<ReplicateRecord> = (0..4)
            .map(|i| ReplicateRecord {
                index: i,
                truth: 0.45,
                adaptive_truth: None,
                fingerprint: String::new(),
                outcomes: vec![MethodOutcome {
                    method: Method::Classical,
                    result: if i == 2 { Err("boom".into()) } else { Ok(ok) },
                }],
            })
            .collect();
        let ctx = ExperimentConfig::new(DgpSpec::DiscreteExceptional, 10, 2).context(0.45);
        let report = MonteCarloReport::from_records(ctx, &records);
        let s = &report.methods[0];
        assert_eq!((s.succeeded, s.failed), (3, 1));
        assert_eq!(s.adaptive_coverage, None);
        assert!((s.bias.unwrap().value - 0.05).abs() < 1e-15);
        assert_eq!(s.bias.unwrap().se, 0.0);
    }

    #[test]
    fn coverage_flags_match_logged_endpoints() {
        let cfg = small(DgpSpec::ContinuousExceptional, 250, 25, 12);
        let (report, records) = run_experiment(&cfg).unwrap();
        for m in [Method::Online, Method::Classical] {
            let s = report.method(m).unwrap();
            let ivs: Vec<(Interval, &ReplicateRecord)> = records
                .iter()
                .flat_map(|r| r.outcomes.iter().filter(|o| o.method == m).filter_map(move |o| o.result.clone().ok().map(|iv| (iv, r))))
                .collect();
            let hits = ivs.iter().filter(|(iv, r)| iv.lower <= r.truth && r.truth <= iv.upper).count();
            assert_eq!(s.coverage.unwrap().value, hits as f64 / ivs.len() as f64);
            let adaptive = ivs.iter().filter(|(iv, r)| {
                let t = r.adaptive_truth.unwrap();
                iv.lower <= t && t <= iv.upper
            });
            assert_eq!(s.adaptive_coverage.unwrap().value, adaptive.count() as f64 / ivs.len() as f64);
        }
        // every adaptive truth is the value of some rule, so at most optimal
        assert!(records.iter().all(|r| r.adaptive_truth.unwrap() <= r.truth + 1e-12));
        assert!(records.iter().all(|r| r.fingerprint.len() == 41));
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let cfg = small(DgpSpec::DiscreteExceptional, 300, 50, 16);
        let one = run_experiment(&ExperimentConfig { threads: Some(1), ..cfg.clone() }).unwrap();
        let three = run_experiment(&ExperimentConfig { threads: Some(3), ..cfg.clone() }).unwrap();
        assert_eq!(one, three);
        let other = run_experiment(&ExperimentConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(one.1, other.1);
    }

    #[test]
    fn identity_permutations_agree_exactly() {
        let cfg = small(DgpSpec::ContinuousExceptional, 200, 25, 6);
        let rep = permutation_sensitivity(&cfg, PermutationMode::Identity).unwrap();
        assert_eq!(rep.agreement.unwrap().value, 1.0);
        assert!(rep.differences.iter().all(|&d| d == 0.0));
        let shuffled = permutation_sensitivity(&cfg, PermutationMode::Shuffle).unwrap();
        assert!(shuffled.differences.iter().any(|&d| d != 0.0));
    }

    #[test]
    fn elln_table_shapes() {
        let cfg = small(DgpSpec::DiscreteExceptional, 400, 100, 8);
        let single = elln_sensitivity(&cfg, &[100]).unwrap();
        assert!(single.ratios.is_empty());
        assert_eq!(single.rows.len(), 1);
        let pair = elln_sensitivity(&cfg, &[50, 100, 200]).unwrap();
        assert_eq!(pair.ratios.len(), 3);
        let r = &pair.ratios[0];
        assert_eq!((r.from, r.to), (50, 100));
        assert!((r.nominal - (350.0f64 / 300.0).sqrt()).abs() < 1e-15);
        assert!(elln_sensitivity(&cfg, &[400]).is_err());
    }

    #[test]
    fn ratio_of_identical_samples_is_one() {
        let xs = [1.0, 2.0, 3.5];
        let r = ratio_of_means(&xs, &xs).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.se, 0.0);
    }

    #[test]
    fn sweep_table_and_oracle_m() {
        let cfg = ExperimentConfig {
            bootstrap_draws: 50,
            ..small(DgpSpec::DiscreteExceptional, 200, 50, 6)
        };
        let (sweep, report, _) = bootstrap_sweep(&cfg, &[100, 20, 200]).unwrap();
        assert_eq!(sweep.rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![20, 100, 200]);
        let online = report.method(Method::Online).unwrap().width.unwrap().value;
        for row in &sweep.rows {
            assert_eq!(row.width_ratio, row.width.unwrap().value / online);
        }
        assert_eq!(sweep.oracle_m(1.1), None);
        let best = sweep.oracle_m(0.0).unwrap();
        assert!(sweep.rows.iter().all(|r| r.width_ratio >= sweep.rows.iter().find(|x| x.m == best).unwrap().width_ratio));
    }
}
