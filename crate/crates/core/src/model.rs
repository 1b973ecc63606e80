//! Observations, treatment rules, nuisance models and the uncentered
//! influence term shared by every estimator.

use std::fmt;

use crate::error::{Error, Result};

/// Default propensity floor below which [`influence_term`] refuses to divide.
pub const DEFAULT_PROPENSITY_FLOOR: f64 = 1e-6;

/// Baseline covariate: an integer stratum label or a real value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Covariate {
    Stratum(u32),
    Real(f64),
}

impl Covariate {
    pub fn kind(&self) -> CovariateKind {
        match self {
            Covariate::Stratum(_) => CovariateKind::Discrete,
            Covariate::Real(_) => CovariateKind::Continuous,
        }
    }

    /// Numeric value; strata map to their label.
    pub fn value(&self) -> f64 {
        match *self {
            Covariate::Stratum(k) => k as f64,
            Covariate::Real(x) => x,
        }
    }
}

impl fmt::Display for Covariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covariate::Stratum(k) => write!(f, "{k}"),
            Covariate::Real(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateKind {
    Discrete,
    Continuous,
}

/// One `(W, A, Y)` record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub w: Covariate,
    pub a: u8,
    pub y: f64,
}

impl Observation {
    pub fn new(w: Covariate, a: u8, y: f64) -> Result<Self> {
        if a > 1 {
            return Err(Error::InvalidObservation(format!("treatment must be 0 or 1, got {a}")));
        }
        if !y.is_finite() {
            return Err(Error::InvalidObservation(format!("outcome must be finite, got {y}")));
        }
        if let Covariate::Real(x) = w {
            if !x.is_finite() {
                return Err(Error::InvalidObservation(format!("covariate must be finite, got {x}")));
            }
        }
        Ok(Self { w, a, y })
    }
}

/// An ordered sample. Order matters: the online estimator is order dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<Observation>,
    kind: CovariateKind,
}

impl Dataset {
    pub fn new(records: Vec<Observation>) -> Result<Self> {
        let kind = records.first().ok_or(Error::EmptyDataset)?.w.kind();
        if let Some(index) = records.iter().position(|o| o.w.kind() != kind) {
            return Err(Error::MixedCovariates { index });
        }
        Ok(Self { records, kind })
    }

    pub fn records(&self) -> &[Observation] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn kind(&self) -> CovariateKind {
        self.kind
    }

    /// The same records in the order given by `order` (a permutation of
    /// `0..len`).
    pub fn reordered(&self, order: &[usize]) -> Self {
        debug_assert_eq!(order.len(), self.records.len());
        Self {
            records: order.iter().map(|&i| self.records[i]).collect(),
            kind: self.kind,
        }
    }
}

/// A deterministic map from covariate value to treatment in {0, 1}.
pub trait TreatmentRule {
    fn decide(&self, w: Covariate) -> u8;
}

impl<R: TreatmentRule + ?Sized> TreatmentRule for &R {
    fn decide(&self, w: Covariate) -> u8 {
        (**self).decide(w)
    }
}

/// Rule given directly by a closure.
pub struct FnRule<F>(pub F);

impl<F: Fn(Covariate) -> u8> TreatmentRule for FnRule<F> {
    fn decide(&self, w: Covariate) -> u8 {
        (self.0)(w)
    }
}

/// Treat exactly where the blip is strictly positive.
pub struct BlipRule<F>(F);

impl<F: Fn(Covariate) -> f64> TreatmentRule for BlipRule<F> {
    fn decide(&self, w: Covariate) -> u8 {
        u8::from((self.0)(w) > 0.0)
    }
}

/// `w -> I(blip(w) > 0)`. Zero blip assigns control.
pub fn rule_from_blip<F: Fn(Covariate) -> f64>(blip: F) -> BlipRule<F> {
    BlipRule(blip)
}

/// Outcome regression, treatment mechanism and the induced rule.
///
/// `g(1, w) + g(0, w) = 1`. For plug-in models `blip` is
/// `q_bar(1, w) - q_bar(0, w)` and `decide` is `I(blip > 0)`; models that
/// pair a known outcome regression with a separately learned rule override
/// `blip` (and therefore `decide`).
pub trait NuisanceModel: Send + Sync {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64>;

    /// Probability of treatment `a` given `w`.
    fn g(&self, a: u8, w: Covariate) -> Result<f64>;

    fn blip(&self, w: Covariate) -> Result<f64> {
        Ok(self.q_bar(1, w)? - self.q_bar(0, w)?)
    }

    fn decide(&self, w: Covariate) -> Result<u8> {
        Ok(u8::from(self.blip(w)? > 0.0))
    }
}

impl<M: NuisanceModel + ?Sized> NuisanceModel for &M {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        (**self).q_bar(a, w)
    }
    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        (**self).g(a, w)
    }
    fn blip(&self, w: Covariate) -> Result<f64> {
        (**self).blip(w)
    }
    fn decide(&self, w: Covariate) -> Result<u8> {
        (**self).decide(w)
    }
}

/// A nuisance model whose rule is replaced by a fixed one.
pub struct WithRule<M, R> {
    pub model: M,
    pub rule: R,
}

impl<M: NuisanceModel, R: TreatmentRule + Send + Sync> NuisanceModel for WithRule<M, R> {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        self.model.q_bar(a, w)
    }
    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        self.model.g(a, w)
    }
    fn blip(&self, w: Covariate) -> Result<f64> {
        self.model.blip(w)
    }
    fn decide(&self, w: Covariate) -> Result<u8> {
        Ok(self.rule.decide(w))
    }
}

/// The uncentered influence value
/// `I(a = d(w)) / g(a|w) * (y - Q(a, w)) + Q(d(w), w)`.
///
/// Fails with [`Error::Positivity`] when `g(a|w)` is at or below `floor`.
pub fn influence_term<M: NuisanceModel + ?Sized>(model: &M, o: &Observation, floor: f64) -> Result<f64> {
    let d = model.decide(o.w)?;
    let g = model.g(o.a, o.w)?;
    if !(g > floor) {
        return Err(Error::Positivity {
            w: o.w,
            a: o.a,
            g,
            floor,
            index: None,
        });
    }
    let plug_in = model.q_bar(d, o.w)?;
    if o.a != d {
        return Ok(plug_in);
    }
    Ok((o.y - model.q_bar(o.a, o.w)?) / g + plug_in)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Closure-backed model for tests.
    struct Toy<Q, G> {
        q: Q,
        g1: G,
        rule: fn(Covariate) -> u8,
    }

    impl<Q, G> NuisanceModel for Toy<Q, G>
    where
        Q: Fn(u8, f64) -> f64 + Send + Sync,
        G: Fn(f64) -> f64 + Send + Sync,
    {
        fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
            Ok((self.q)(a, w.value()))
        }
        fn g(&self, a: u8, w: Covariate) -> Result<f64> {
            let p = (self.g1)(w.value());
            Ok(if a == 1 { p } else { 1.0 - p })
        }
        fn decide(&self, w: Covariate) -> Result<u8> {
            Ok((self.rule)(w))
        }
    }

    #[test]
    fn zero_regression_reduces_to_ipw() {
        let m = Toy {
            q: |_, _| 0.0,
            g1: |_| 0.5,
            rule: |_| 1,
        };
        let o = Observation::new(Covariate::Real(0.3), 1, 1.0).unwrap();
        assert_eq!(influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap(), 2.0);
    }

    #[test]
    fn zero_residual_gives_plug_in() {
        let m = Toy {
            q: |a, w| 0.2 + 0.1 * a as f64 + 0.05 * w,
            g1: |_| 0.7,
            rule: |_| 1,
        };
        let o = Observation::new(Covariate::Real(0.4), 1, 0.2 + 0.1 + 0.02).unwrap();
        let v = influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap();
        assert!((v - 0.32).abs() < 1e-15);
    }

    #[test]
    fn discrete_hand_substitution() {
        // Q(1,0) = 0.6, g(1|0) = 0.5, d(0) = 1, o = (0, 1, 1)
        let m = Toy {
            q: |a, w| if a == 1 && w == 0.0 { 0.6 } else { 0.4 },
            g1: |w| 0.5 + 0.1 * w,
            rule: |_| 1,
        };
        let o = Observation::new(Covariate::Stratum(0), 1, 1.0).unwrap();
        let v = influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap();
        assert!((v - 1.4).abs() < 1e-15);
    }

    #[test]
    fn positivity_floor_rejects() {
        let m = Toy {
            q: |_, _| 0.5,
            g1: |_| 1e-7,
            rule: |_| 1,
        };
        let o = Observation::new(Covariate::Real(0.0), 1, 1.0).unwrap();
        let err = influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap_err();
        assert!(matches!(err, Error::Positivity { a: 1, .. }));
        let err = err.at_observation(41);
        assert!(err.to_string().contains("observation 42"));
    }

    #[test]
    fn rule_from_blip_ties_go_to_control() {
        let r = rule_from_blip(|w: Covariate| w.value());
        assert_eq!(r.decide(Covariate::Real(0.2)), 1);
        assert_eq!(r.decide(Covariate::Real(0.0)), 0);
        assert_eq!(r.decide(Covariate::Real(-0.1)), 0);
    }

    #[test]
    fn observation_validation() {
        assert!(Observation::new(Covariate::Real(0.0), 2, 1.0).is_err());
        assert!(Observation::new(Covariate::Real(0.0), 1, f64::NAN).is_err());
        assert!(Observation::new(Covariate::Real(f64::INFINITY), 1, 0.0).is_err());
    }

    #[test]
    fn dataset_rejects_mixed_kinds() {
        let recs = vec![
            Observation::new(Covariate::Stratum(1), 0, 0.0).unwrap(),
            Observation::new(Covariate::Real(0.5), 1, 1.0).unwrap(),
        ];
        assert_eq!(Dataset::new(recs), Err(Error::MixedCovariates { index: 1 }));
        assert_eq!(Dataset::new(vec![]), Err(Error::EmptyDataset));
    }

    proptest! {
        #[test]
        fn off_rule_terms_equal_plug_in(w in -1.0f64..1.0, a in 0u8..2, y in 0.0f64..1.0, p in 0.05f64..0.95) {
            let m = Toy { q: |a, w| 0.3 + 0.2 * a as f64 * w, g1: move |_| p, rule: |w| u8::from(w.value() > 0.1) };
            let o = Observation::new(Covariate::Real(w), a, y).unwrap();
            let d = m.decide(o.w).unwrap();
            let v = influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap();
            if a != d {
                prop_assert_eq!(v, m.q_bar(d, o.w).unwrap());
            }
        }

        #[test]
        fn bounded_outcomes_give_bounded_terms(w in -1.0f64..1.0, a in 0u8..2, y in 0.0f64..=1.0,
                                               q1 in 0.0f64..=1.0, q0 in 0.0f64..=1.0, p in 0.1f64..=0.9) {
            let delta = p.min(1.0 - p);
            let m = Toy { q: move |a, _| if a == 1 { q1 } else { q0 }, g1: move |_| p, rule: |w| u8::from(w.value() > 0.0) };
            let o = Observation::new(Covariate::Real(w), a, y).unwrap();
            let v = influence_term(&m, &o, DEFAULT_PROPENSITY_FLOOR).unwrap();
            prop_assert!(v.abs() <= 1.0 / delta + 1.0 + 1e-12);
        }

        #[test]
        fn negated_blip_disagrees_exactly_off_zero(b in -1.0f64..1.0, zero in proptest::bool::ANY) {
            let b = if zero { 0.0 } else { b };
            let pos = rule_from_blip(move |_| b);
            let neg = rule_from_blip(move |_| -b);
            let w = Covariate::Real(0.0);
            prop_assert_eq!(pos.decide(w) != neg.decide(w), b != 0.0);
        }
    }
}
