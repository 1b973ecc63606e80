//! Nuisance learners: the discrete NPMLE and Nadaraya-Watson blip
//! estimation, wrapped behind the [`Learner`] strategy the estimators call.

pub mod kernel;
pub mod npmle;

pub use kernel::{cv_select_bandwidth, epanechnikov, nw_blip, ArmSmoother, BandwidthGrid, KernelBlipFit};
pub use npmle::{fit_npmle, NpmleFit, StratumCell};

use crate::error::{Error, Result};
use crate::dgp::OracleTruth;
use crate::model::{Covariate, NuisanceModel, Observation};

/// A nuisance-fitting strategy. `seed` drives any internal randomness (fold
/// assignment); fits must be deterministic given `(train, seed)`.
pub trait Learner: Send + Sync {
    type Model: NuisanceModel;

    fn name(&self) -> &'static str;

    fn fit(&self, train: &[Observation], seed: u64) -> Result<Self::Model>;
}

/// Plug-in NPMLE for `Q`, `g` and the rule (discrete covariates).
#[derive(Debug, Clone, Copy, Default)]
pub struct NpmleLearner;

impl Learner for NpmleLearner {
    type Model = NpmleFit;

    fn name(&self) -> &'static str {
        "npmle"
    }

    fn fit(&self, train: &[Observation], _seed: u64) -> Result<NpmleFit> {
        fit_npmle(train)
    }
}

/// Takes `Q` and `g` from a fixed base model and learns only the rule, from a
/// kernel blip estimate with cross-validated bandwidth. The base model also
/// supplies the cross-validation loss.
#[derive(Debug, Clone)]
pub struct KernelRuleLearner<B> {
    pub base: B,
    pub grid: BandwidthGrid,
}

impl<B> KernelRuleLearner<B> {
    pub fn new(base: B, grid: BandwidthGrid) -> Self {
        Self { base, grid }
    }
}

/// Base `Q`/`g` paired with a kernel-estimated blip.
///
/// `blip` is the kernel estimate, not `q_bar(1, w) - q_bar(0, w)`: the rule
/// is learned while the outcome regression is held at the base model.
#[derive(Debug, Clone)]
pub struct KernelRuleModel<B> {
    pub base: B,
    pub fit: KernelBlipFit,
}

impl<B: NuisanceModel> NuisanceModel for KernelRuleModel<B> {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        self.base.q_bar(a, w)
    }

    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        self.base.g(a, w)
    }

    fn blip(&self, w: Covariate) -> Result<f64> {
        Ok(self.fit.blip(continuous(w)?))
    }
}

impl<B: NuisanceModel + Clone> Learner for KernelRuleLearner<B> {
    type Model = KernelRuleModel<B>;

    fn name(&self) -> &'static str {
        "kernel-rule"
    }

    fn fit(&self, train: &[Observation], seed: u64) -> Result<Self::Model> {
        let h = cv_select_bandwidth(train, &self.grid, &self.base, seed)?;
        Ok(KernelRuleModel {
            base: self.base.clone(),
            fit: nw_blip(train, h)?,
        })
    }
}

/// Fully data-driven kernel learner for continuous covariates.
///
/// A pilot fit at `pilot_bandwidth` gives stand-in `Q` and `g` for the
/// cross-validation loss; the selected bandwidth then fixes the arm-wise
/// outcome regressions (so `blip = Q(1, w) - Q(0, w)`). The propensity is a
/// kernel regression of `A` on `W` at the pilot bandwidth, clamped to
/// `[propensity_bound, 1 - propensity_bound]`.
#[derive(Debug, Clone)]
pub struct KernelLearner {
    pub grid: BandwidthGrid,
    pub pilot_bandwidth: f64,
    pub propensity_bound: f64,
}

impl Default for KernelLearner {
    fn default() -> Self {
        Self {
            grid: BandwidthGrid::default(),
            pilot_bandwidth: 0.2,
            propensity_bound: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelModel {
    outcome: KernelBlipFit,
    propensity: ArmSmoother,
    propensity_h: f64,
    bound: f64,
}

impl KernelModel {
    pub fn bandwidth(&self) -> f64 {
        self.outcome.bandwidth()
    }
}

impl NuisanceModel for KernelModel {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        Ok(self.outcome.arm_mean(a, continuous(w)?))
    }

    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        let p = self
            .propensity
            .predict(continuous(w)?, self.propensity_h)
            .clamp(self.bound, 1.0 - self.bound);
        Ok(if a == 1 { p } else { 1.0 - p })
    }
}

impl Learner for KernelLearner {
    type Model = KernelModel;

    fn name(&self) -> &'static str {
        "kernel"
    }

    fn fit(&self, train: &[Observation], seed: u64) -> Result<KernelModel> {
        let pilot_h = self.pilot_bandwidth;
        let propensity = ArmSmoother::new(
            train
                .iter()
                .map(|o| Ok((continuous(o.w)?, f64::from(o.a))))
                .collect::<Result<Vec<_>>>()?,
        );
        let pilot = KernelModel {
            outcome: nw_blip(train, pilot_h)?,
            propensity,
            propensity_h: pilot_h,
            bound: self.propensity_bound,
        };
        let h = cv_select_bandwidth(train, &self.grid, &pilot, seed)?;
        Ok(KernelModel {
            outcome: nw_blip(train, h)?,
            ..pilot
        })
    }
}

/// Returns the same model whatever the training data, e.g. the true
/// nuisances in a simulation.
#[derive(Debug, Clone)]
pub struct FixedLearner<M>(pub M);

impl<M: NuisanceModel + Clone> Learner for FixedLearner<M> {
    type Model = M;

    fn name(&self) -> &'static str {
        "fixed"
    }

    fn fit(&self, _train: &[Observation], _seed: u64) -> Result<M> {
        Ok(self.0.clone())
    }
}

/// Runtime choice among the built-in learners.
#[derive(Debug, Clone)]
pub enum AnyLearner {
    Npmle(NpmleLearner),
    KernelRule(KernelRuleLearner<OracleTruth>),
    Kernel(KernelLearner),
    Fixed(FixedLearner<OracleTruth>),
}

/// Fit produced by an [`AnyLearner`].
#[derive(Debug, Clone)]
pub enum AnyModel {
    Npmle(NpmleFit),
    KernelRule(KernelRuleModel<OracleTruth>),
    Kernel(KernelModel),
    Fixed(OracleTruth),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyModel::Npmle($m) => $body,
            AnyModel::KernelRule($m) => $body,
            AnyModel::Kernel($m) => $body,
            AnyModel::Fixed($m) => $body,
        }
    };
}

impl NuisanceModel for AnyModel {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        dispatch!(self, m => m.q_bar(a, w))
    }

    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        dispatch!(self, m => m.g(a, w))
    }

    fn blip(&self, w: Covariate) -> Result<f64> {
        dispatch!(self, m => m.blip(w))
    }

    fn decide(&self, w: Covariate) -> Result<u8> {
        dispatch!(self, m => m.decide(w))
    }
}

impl Learner for AnyLearner {
    type Model = AnyModel;

    fn name(&self) -> &'static str {
        match self {
            AnyLearner::Npmle(l) => l.name(),
            AnyLearner::KernelRule(l) => l.name(),
            AnyLearner::Kernel(l) => l.name(),
            AnyLearner::Fixed(l) => l.name(),
        }
    }

    fn fit(&self, train: &[Observation], seed: u64) -> Result<AnyModel> {
        Ok(match self {
            AnyLearner::Npmle(l) => AnyModel::Npmle(l.fit(train, seed)?),
            AnyLearner::KernelRule(l) => AnyModel::KernelRule(l.fit(train, seed)?),
            AnyLearner::Kernel(l) => AnyModel::Kernel(l.fit(train, seed)?),
            AnyLearner::Fixed(l) => AnyModel::Fixed(l.fit(train, seed)?),
        })
    }
}

fn continuous(w: Covariate) -> Result<f64> {
    match w {
        Covariate::Real(x) => Ok(x),
        Covariate::Stratum(_) => Err(Error::CovariateKind {
            learner: "kernel",
            expected: "continuous",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::DgpSpec;

    #[test]
    fn kernel_rule_model_keeps_base_regression() {
        let s = DgpSpec::ContinuousExceptional;
        let data = s.sample(500, 2).unwrap();
        let learner = KernelRuleLearner::new(s.oracle(), BandwidthGrid::default());
        let m = learner.fit(data.records(), 9).unwrap();
        let w = Covariate::Real(0.7);
        assert_eq!(m.q_bar(1, w).unwrap(), s.q_bar0(1, 0.7));
        assert_eq!(m.g(0, w).unwrap(), s.g0(0, 0.7));
        assert_eq!(m.decide(w).unwrap(), u8::from(m.fit.blip(0.7) > 0.0));
        // fit is reproducible for a fixed seed
        let again = learner.fit(data.records(), 9).unwrap();
        assert_eq!(m.fit, again.fit);
    }

    #[test]
    fn kernel_learner_is_a_plug_in_model() {
        let s = DgpSpec::ContinuousNonExceptional;
        let data = s.sample(2000, 3).unwrap();
        let m = KernelLearner::default().fit(data.records(), 1).unwrap();
        for i in 0..=20 {
            let w = Covariate::Real(-1.0 + i as f64 / 10.0);
            let b = m.blip(w).unwrap();
            assert_eq!(b, m.q_bar(1, w).unwrap() - m.q_bar(0, w).unwrap());
            let g1 = m.g(1, w).unwrap();
            assert!((0.01..=0.99).contains(&g1));
            assert!((g1 + m.g(0, w).unwrap() - 1.0).abs() < 1e-15);
            assert!((g1 - s.propensity(w.value())).abs() < 0.15);
        }
    }

    #[test]
    fn npmle_learner_rejects_continuous_data() {
        let data = DgpSpec::ContinuousExceptional.sample(20, 1).unwrap();
        assert!(NpmleLearner.fit(data.records(), 0).is_err());
    }
}
