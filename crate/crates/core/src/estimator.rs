//! Online one-step estimation of the optimal value with martingale
//! confidence intervals, plus the classical one-step comparator.
//!
//! The sample is split into an initial block of `ell_n` observations and
//! `S` further blocks. Nuisances are refit at every block boundary on all
//! preceding observations; each observation `j` in a block is scored with the
//! fit from the block's start, so every term depends only on `O_1..O_{j-1}`.
//! Terms are weighted by the inverse of their estimated conditional standard
//! deviation.

use crate::error::{Error, Result};
use crate::model::{influence_term, NuisanceModel, Observation, DEFAULT_PROPENSITY_FLOOR};
use crate::normal;
use crate::nuisance::Learner;
use crate::rng::derive_seed;

/// Default floor on the estimated conditional variance.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-3;

/// Refit points of the online estimator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkSchedule {
    n: usize,
    ell_n: usize,
    boundaries: Vec<usize>,
}

impl ChunkSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell_n(&self) -> usize {
        self.ell_n
    }

    /// `ell_n = b_0 < b_1 < ... < b_S = n`. Block `k` scores observations
    /// `b_k + 1 ..= b_{k+1}` (1-based) with a fit on the first `b_k`.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Number of refit blocks after the initial one.
    pub fn blocks(&self) -> usize {
        self.boundaries.len() - 1
    }
}

/// How often the online estimator refits its nuisances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefitPolicy {
    /// `S = round((n - ell_n) / ell_n)` blocks.
    Blocks,
    /// Before every observation (`S = n - ell_n`).
    EveryObservation,
}

impl RefitPolicy {
    pub fn schedule(&self, n: usize, ell_n: usize) -> Result<ChunkSchedule> {
        match self {
            RefitPolicy::Blocks => build_chunk_schedule(n, ell_n, None),
            RefitPolicy::EveryObservation => build_chunk_schedule(n, ell_n, Some(n.saturating_sub(ell_n).max(1))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RefitPolicy::Blocks => "blocks",
            RefitPolicy::EveryObservation => "every",
        }
    }
}

impl std::fmt::Display for RefitPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RefitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blocks" => Ok(RefitPolicy::Blocks),
            "every" => Ok(RefitPolicy::EveryObservation),
            other => Err(Error::InvalidArgument(format!("unknown refit policy `{other}` (expected blocks or every)"))),
        }
    }
}

/// Splits `n - ell_n` observations into `s` blocks whose sizes differ by at
/// most one. Without `s`, uses `S = round((n - ell_n) / ell_n)` (at least 1).
pub fn build_chunk_schedule(n: usize, ell_n: usize, s: Option<usize>) -> Result<ChunkSchedule> {
    if ell_n == 0 {
        return Err(Error::Schedule("initial chunk size must be at least 1".into()));
    }
    if ell_n >= n {
        return Err(Error::Schedule(format!("initial chunk size {ell_n} must be below the sample size {n}")));
    }
    let rest = n - ell_n;
    let s = match s {
        Some(s) => s,
        None => ((rest as f64 / ell_n as f64).round() as usize).max(1),
    };
    if s == 0 || s > rest {
        return Err(Error::Schedule(format!("cannot split {rest} observations into {s} blocks")));
    }
    let (base, extra) = (rest / s, rest % s);
    let mut boundaries = Vec::with_capacity(s + 1);
    boundaries.push(ell_n);
    let mut at = ell_n;
    for k in 0..s {
        at += base + usize::from(k < extra);
        boundaries.push(at);
    }
    debug_assert_eq!(at, n);
    Ok(ChunkSchedule { n, ell_n, boundaries })
}

/// `sqrt(max(floor, Var))` with `Var` the plug-in (divide by count) variance
/// of the model's influence terms over `history`.
pub fn estimate_sigma<M: NuisanceModel + ?Sized>(model: &M, history: &[Observation], floor: f64, propensity_floor: f64) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::InvalidArgument("variance history is empty".into()));
    }
    let terms = history
        .iter()
        .enumerate()
        .map(|(i, o)| influence_term(model, o, propensity_floor).map_err(|e| e.at_observation(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(plug_in_variance(&terms).max(floor).sqrt())
}

fn plug_in_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Tuning for [`online_one_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineConfig {
    /// Floor on each estimated conditional variance.
    pub sigma_floor: f64,
    pub propensity_floor: f64,
    /// Seed for learner randomness; block `k` uses a seed derived from it.
    pub seed: u64,
    /// Keep the per-observation `(j, D, sigma)` log.
    pub keep_log: bool,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        Self {
            sigma_floor: DEFAULT_SIGMA_FLOOR,
            propensity_floor: DEFAULT_PROPENSITY_FLOOR,
            seed: 0,
            keep_log: false,
        }
    }
}

/// One scored observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermRecord {
    /// 1-based index of the observation.
    pub j: usize,
    pub influence: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineValueEstimate {
    pub psi_hat: f64,
    /// Mean inverse standard deviation over the scored observations.
    pub gamma_n: f64,
    pub n: usize,
    pub ell_n: usize,
    /// `1 / (gamma_n sqrt(n - ell_n))`.
    pub se: f64,
    pub log: Option<Vec<TermRecord>>,
}

fn check_alpha(alpha: f64, upper: f64) -> Result<()> {
    if alpha > 0.0 && alpha < upper {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, {upper}), got {alpha}")))
    }
}

impl OnlineValueEstimate {
    /// `psi_hat -+ z_{1-alpha/2} se`.
    pub fn two_sided_ci(&self, alpha: f64) -> Result<(f64, f64)> {
        check_alpha(alpha, 1.0)?;
        Ok(symmetric_interval(self.psi_hat, self.se, alpha))
    }

    /// `psi_hat - z_{1-alpha} se`, the lower end of the `1 - 2 alpha`
    /// two-sided interval.
    pub fn lower_bound(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha, 0.5)?;
        Ok(self.two_sided_ci(2.0 * alpha)?.0)
    }
}

fn symmetric_interval(center: f64, se: f64, alpha: f64) -> (f64, f64) {
    let half = normal::quantile(1.0 - alpha / 2.0) * se;
    (center - half, center + half)
}

/// Runs the online one-step estimator over `data` in order.
pub fn online_one_step<L: Learner + ?Sized>(data: &[Observation], schedule: &ChunkSchedule, learner: &L, cfg: &OnlineConfig) -> Result<OnlineValueEstimate> {
    if data.len() != schedule.n {
        return Err(Error::Schedule(format!("schedule is for n = {} but data has {} records", schedule.n, data.len())));
    }
    if !(cfg.sigma_floor > 0.0) {
        return Err(Error::InvalidArgument("sigma floor must be positive".into()));
    }
    let scored = schedule.n - schedule.ell_n;
    let mut log = cfg.keep_log.then(|| Vec::with_capacity(scored));
    let (mut weighted, mut weights) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sigma_min, mut sigma_max) = (f64::INFINITY, 0.0f64);

    for (block, pair) in schedule.boundaries.windows(2).enumerate() {
        let (start, end) = (pair[0], pair[1]);
        let history = &data[..start];
        let model = learner
            .fit(history, derive_seed(cfg.seed, block as u64))
            .map_err(|e| Error::Learner {
                block,
                source: Box::new(e),
            })?;
        let in_block = |e: Error| {
            if e.is_ill_defined() {
                Error::Learner {
                    block,
                    source: Box::new(e),
                }
            } else {
                e
            }
        };
        let sigma = estimate_sigma(&model, history, cfg.sigma_floor, cfg.propensity_floor).map_err(in_block)?;
        sigma_min = sigma_min.min(sigma);
        sigma_max = sigma_max.max(sigma);
        let inv = 1.0 / sigma;
        for (j, o) in data.iter().enumerate().take(end).skip(start) {
            let d = influence_term(&model, o, cfg.propensity_floor).map_err(|e| in_block(e.at_observation(j)))?;
            weighted += inv * d;
            weights += inv;
            lo = lo.min(d);
            hi = hi.max(d);
            if let Some(log) = log.as_mut() {
                log.push(TermRecord { j: j + 1, influence: d, sigma });
            }
        }
    }

    // Rounding can push a convex combination one ulp outside its range.
    let psi_hat = (weighted / weights).clamp(lo, hi);
    let gamma_n = (weights / scored as f64).clamp(1.0 / sigma_max, 1.0 / sigma_min);
    if !psi_hat.is_finite() || !gamma_n.is_finite() {
        return Err(Error::Numerical("non-finite online estimate".into()));
    }
    Ok(OnlineValueEstimate {
        psi_hat,
        gamma_n,
        n: schedule.n,
        ell_n: schedule.ell_n,
        se: 1.0 / (gamma_n * (scored as f64).sqrt()),
        log,
    })
}

/// Non-online one-step estimate with a Wald interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalEstimate {
    pub psi_hat: f64,
    /// Sample standard deviation of the influence values over `sqrt(n)`.
    pub se: f64,
}

impl ClassicalEstimate {
    pub fn wald_ci(&self, alpha: f64) -> Result<(f64, f64)> {
        check_alpha(alpha, 1.0)?;
        Ok(symmetric_interval(self.psi_hat, self.se, alpha))
    }

    pub fn lower_bound(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha, 0.5)?;
        Ok(self.wald_ci(2.0 * alpha)?.0)
    }
}

/// Classical one-step with nuisances already fit on all of `data`.
pub fn classical_one_step_with<M: NuisanceModel + ?Sized>(data: &[Observation], model: &M, propensity_floor: f64) -> Result<ClassicalEstimate> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument("classical one-step needs at least 2 observations".into()));
    }
    let terms = data
        .iter()
        .enumerate()
        .map(|(i, o)| influence_term(model, o, propensity_floor).map_err(|e| e.at_observation(i)))
        .collect::<Result<Vec<_>>>()?;
    let n = terms.len() as f64;
    let psi_hat = terms.iter().sum::<f64>() / n;
    let ss: f64 = terms.iter().map(|t| (t - psi_hat) * (t - psi_hat)).sum();
    Ok(ClassicalEstimate {
        psi_hat,
        se: (ss / (n - 1.0)).sqrt() / n.sqrt(),
    })
}

/// Fits the learner once on all of `data` and averages the influence terms.
pub fn classical_one_step<L: Learner + ?Sized>(data: &[Observation], learner: &L, seed: u64, propensity_floor: f64) -> Result<ClassicalEstimate> {
    let model = learner.fit(data, seed)?;
    classical_one_step_with(data, &model, propensity_floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::DgpSpec;
    use crate::model::{Covariate, WithRule};
    use crate::nuisance::{BandwidthGrid, KernelRuleLearner, NpmleLearner};
    use proptest::prelude::*;

    /// Learner returning the oracle regardless of data.
    struct Oracle(DgpSpec);

    impl Learner for Oracle {
        type Model = crate::dgp::OracleTruth;
        fn name(&self) -> &'static str {
            "oracle"
        }
        fn fit(&self, _: &[Observation], _: u64) -> Result<Self::Model> {
            Ok(self.0.oracle())
        }
    }

    #[test]
    fn schedules() {
        let s = build_chunk_schedule(1000, 100, None).unwrap();
        assert_eq!(s.blocks(), 9);
        assert!(s.boundaries().windows(2).all(|p| p[1] - p[0] == 100));
        let s = build_chunk_schedule(4, 1, Some(3)).unwrap();
        assert_eq!(s.boundaries(), &[1, 2, 3, 4]);
        let s = build_chunk_schedule(250, 25, None).unwrap();
        assert_eq!(s.blocks(), 9);
        assert!(s.boundaries().windows(2).all(|p| p[1] - p[0] == 25));
        assert_eq!(build_chunk_schedule(1000, 25, None).unwrap().blocks(), 39);
        let s = build_chunk_schedule(20, 3, Some(4)).unwrap();
        let sizes: Vec<usize> = s.boundaries().windows(2).map(|p| p[1] - p[0]).collect();
        assert_eq!(sizes, vec![5, 4, 4, 4]);
        assert!(build_chunk_schedule(10, 10, None).is_err());
        assert!(build_chunk_schedule(10, 0, None).is_err());
        assert!(build_chunk_schedule(10, 5, Some(6)).is_err());
    }

    #[test]
    fn refit_policies() {
        assert_eq!(RefitPolicy::Blocks.schedule(1000, 100).unwrap(), build_chunk_schedule(1000, 100, None).unwrap());
        let every = RefitPolicy::EveryObservation.schedule(8, 3).unwrap();
        assert_eq!(every.boundaries(), &[3, 4, 5, 6, 7, 8]);
        assert!(RefitPolicy::EveryObservation.schedule(3, 3).is_err());
        for p in [RefitPolicy::Blocks, RefitPolicy::EveryObservation] {
            assert_eq!(p.to_string().parse::<RefitPolicy>().unwrap(), p);
        }
    }

    #[test]
    fn sigma_hits_floor_on_constant_terms() {
        let s = DgpSpec::ContinuousExceptional;
        let oracle = s.oracle();
        // off-rule observations score Q(d(w), w) = 0.3 in the zero-blip region
        let hist: Vec<Observation> = (0..50)
            .map(|i| Observation::new(Covariate::Real(-0.4 + i as f64 * 0.01), 1, 0.0).unwrap())
            .collect();
        let sigma = estimate_sigma(&oracle, &hist, 1e-3, DEFAULT_PROPENSITY_FLOOR).unwrap();
        assert_eq!(sigma, 1e-3f64.sqrt());
        let data = s.sample(200, 1).unwrap();
        assert!(estimate_sigma(&oracle, data.records(), 1.0, DEFAULT_PROPENSITY_FLOOR).unwrap() >= 1.0);
        assert!(estimate_sigma(&oracle, &[], 1.0, DEFAULT_PROPENSITY_FLOOR).is_err());
    }

    #[test]
    fn sigma_matches_enumerated_variance() {
        let s = DgpSpec::DiscreteExceptional;
        let exact = s.influence_variance(&s.oracle().optimal_rule());
        let data = s.sample(10_000, 17).unwrap();
        let sigma = estimate_sigma(&s.oracle(), data.records(), 1e-3, DEFAULT_PROPENSITY_FLOOR).unwrap();
        assert!((sigma * sigma / exact - 1.0).abs() < 0.02, "{} vs {exact}", sigma * sigma);
    }

    #[test]
    fn unit_weights_reduce_to_plain_mean() {
        // a floor above every empirical variance makes all sigmas equal
        let s = DgpSpec::DiscreteExceptional;
        let data = s.sample(300, 2).unwrap();
        let sched = build_chunk_schedule(300, 30, None).unwrap();
        let cfg = OnlineConfig {
            sigma_floor: 4.0,
            keep_log: true,
            ..Default::default()
        };
        let est = online_one_step(data.records(), &sched, &Oracle(s), &cfg).unwrap();
        let log = est.log.as_ref().unwrap();
        assert!(log.iter().all(|t| t.sigma == 2.0));
        let mean = log.iter().map(|t| t.influence).sum::<f64>() / log.len() as f64;
        assert!((est.psi_hat - mean).abs() < 1e-14);
        assert_eq!(est.gamma_n, 0.5);
        assert_eq!(log.len(), 270);
        assert_eq!(log[0].j, 31);
    }

    #[test]
    fn ci_arithmetic() {
        let est = OnlineValueEstimate {
            psi_hat: 0.4,
            gamma_n: 2.0,
            n: 1000,
            ell_n: 100,
            se: 1.0 / (2.0 * 30.0),
            log: None,
        };
        let (lo, hi) = est.two_sided_ci(0.05).unwrap();
        assert!(((hi - lo) / 2.0 - 0.032_666).abs() < 1e-6);
        assert!(((hi + lo) / 2.0 - 0.4).abs() < 1e-15);
        assert_eq!(est.lower_bound(0.025).unwrap(), lo);
        let (lo, hi) = est.two_sided_ci(1.0 - 1e-12).unwrap();
        assert!(hi - lo < 1e-12);
        assert!(est.two_sided_ci(0.0).is_err());
        assert!(est.two_sided_ci(1.0).is_err());
        assert!(est.lower_bound(0.5).is_err());

        let unit = OnlineValueEstimate { gamma_n: 1.0, se: 0.1, ..est };
        assert!((unit.lower_bound(0.05).unwrap() - (0.4 - 0.164_485)).abs() < 1e-6);
    }

    #[test]
    fn online_npmle_near_truth() {
        let s = DgpSpec::DiscreteExceptional;
        let sched = build_chunk_schedule(4000, 100, None).unwrap();
        let mut close = 0;
        for seed in 0..40 {
            let data = s.sample(4000, seed).unwrap();
            let est = online_one_step(data.records(), &sched, &NpmleLearner, &OnlineConfig::default()).unwrap();
            close += usize::from((est.psi_hat - 0.45).abs() < 0.05);
        }
        assert!(close >= 38, "{close} of 40");
    }

    #[test]
    fn classical_with_oracle_is_aipw_for_fixed_rule() {
        let s = DgpSpec::ContinuousNonExceptional;
        let data = s.sample(500, 6).unwrap();
        let rule = crate::model::FnRule(|w: Covariate| u8::from(w.value() < 0.2));
        let model = WithRule { model: s.oracle(), rule };
        let est = classical_one_step_with(data.records(), &model, DEFAULT_PROPENSITY_FLOOR).unwrap();
        let manual: f64 = data
            .records()
            .iter()
            .map(|o| {
                let d = u8::from(o.w.value() < 0.2);
                let w = o.w.value();
                let ipw = if o.a == d { (o.y - s.q_bar0(o.a, w)) / s.g0(o.a, w) } else { 0.0 };
                ipw + s.q_bar0(d, w)
            })
            .sum::<f64>()
            / 500.0;
        assert!((est.psi_hat - manual).abs() < 1e-13);
        assert!(est.se > 0.0);
        let (lo, hi) = est.wald_ci(0.05).unwrap();
        assert!(lo < est.psi_hat && est.psi_hat < hi);
        assert_eq!(est.lower_bound(0.025).unwrap(), lo);
    }

    #[test]
    fn learner_failure_reports_block() {
        // all of the first block is treated, so the NPMLE has no control cells
        let mut recs: Vec<Observation> = (0..20).map(|i| Observation::new(Covariate::Stratum(i % 4), 1, 1.0).unwrap()).collect();
        recs.extend(DgpSpec::DiscreteExceptional.sample(80, 1).unwrap().records());
        let sched = build_chunk_schedule(100, 20, None).unwrap();
        let err = online_one_step(&recs, &sched, &NpmleLearner, &OnlineConfig::default()).unwrap_err();
        assert!(err.is_ill_defined());
        assert!(matches!(err, Error::Learner { block: 0, .. }), "{err}");
        let short = build_chunk_schedule(50, 20, None).unwrap();
        assert!(matches!(online_one_step(&recs, &short, &NpmleLearner, &OnlineConfig::default()), Err(Error::Schedule(_))));
    }

    fn run_kernel(data: &[Observation], seed: u64) -> OnlineValueEstimate {
        let s = DgpSpec::ContinuousExceptional;
        let learner = KernelRuleLearner::new(s.oracle(), BandwidthGrid::default());
        let sched = build_chunk_schedule(data.len(), 25, None).unwrap();
        let cfg = OnlineConfig {
            seed,
            keep_log: true,
            ..Default::default()
        };
        online_one_step(data, &sched, &learner, &cfg).unwrap()
    }

    #[test]
    fn deterministic_runs() {
        let data = DgpSpec::ContinuousExceptional.sample(300, 4).unwrap();
        assert_eq!(run_kernel(data.records(), 5), run_kernel(data.records(), 5));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn terms_are_predictable(seed in 0u64..10_000, cut in 30usize..250) {
            let s = DgpSpec::ContinuousExceptional;
            let data = s.sample(250, seed).unwrap();
            let base = run_kernel(data.records(), seed);
            let mut mutated = data.records().to_vec();
            let fresh = s.sample(250, seed + 1).unwrap();
            mutated[cut..].copy_from_slice(&fresh.records()[cut..]);
            let other = run_kernel(&mutated, seed);
            let (a, b) = (base.log.unwrap(), other.log.unwrap());
            // terms j <= cut see only O_1..O_cut; the weight of term cut + 1
            // is fixed before O_{cut+1} arrives
            for (x, y) in a.iter().zip(&b) {
                if x.j <= cut {
                    prop_assert_eq!(x, y);
                } else if x.j == cut + 1 {
                    prop_assert_eq!(x.sigma, y.sigma);
                }
            }
        }

        #[test]
        fn estimate_within_term_range(seed in 0u64..10_000) {
            let data = DgpSpec::ContinuousExceptional.sample(200, seed).unwrap();
            let est = run_kernel(data.records(), seed);
            let log = est.log.as_ref().unwrap();
            let lo = log.iter().map(|t| t.influence).fold(f64::INFINITY, f64::min);
            let hi = log.iter().map(|t| t.influence).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= est.psi_hat && est.psi_hat <= hi);
            let smin = log.iter().map(|t| t.sigma).fold(f64::INFINITY, f64::min);
            let smax = log.iter().map(|t| t.sigma).fold(0.0, f64::max);
            prop_assert!(1.0 / smax <= est.gamma_n && est.gamma_n <= 1.0 / smin);
            prop_assert!(log.iter().all(|t| t.sigma * t.sigma >= DEFAULT_SIGMA_FLOOR));
        }

        #[test]
        fn lower_bound_identity(psi in -1.0f64..1.0, se in 1e-4f64..1.0, alpha in 0.001f64..0.499) {
            let est = OnlineValueEstimate { psi_hat: psi, gamma_n: 1.0, n: 2, ell_n: 1, se, log: None };
            prop_assert_eq!(est.lower_bound(alpha).unwrap(), est.two_sided_ci(2.0 * alpha).unwrap().0);
        }
    }
}
