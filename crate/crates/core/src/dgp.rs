//! Simulation data-generating processes with closed-form nuisance functions
//! and quadrature oracles.
//!
//! * `D-E`: `W ~ Uniform{0,1,2,3}`, `A|W ~ Bernoulli(0.5 + 0.1 W)`,
//!   `Y|A,W ~ Bernoulli(0.4 + 0.2 I(A = 1, W = 0))`. Exceptional.
//! * `C-NE`: `W ~ Uniform(-1, 1)`, same propensity, treated arm shifted by a
//!   piecewise cubic with an isolated zero at `w = 1/3`. Not exceptional.
//! * `C-E`: as `C-NE` but the blip vanishes on `[-1/2, 1/3]`. Exceptional.
//!
//! All continuous oracles integrate piecewise polynomials with a 64-node
//! Gauss-Legendre rule on each smooth segment.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{rule_from_blip, Covariate, CovariateKind, Dataset, NuisanceModel, Observation, TreatmentRule};
use crate::quadrature::{locate_changes, GaussLegendre};
use crate::rng::{self, Purpose};

/// Cells scanned when locating rule decision boundaries.
pub const BOUNDARY_SCAN_CELLS: usize = 10_000;
/// Gauss-Legendre order used on every segment.
pub const QUADRATURE_ORDER: usize = 64;

const CONTROL_MEAN: f64 = 0.3;

fn rule64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(QUADRATURE_ORDER))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DgpSpec {
    /// Discrete covariate, exceptional law.
    DiscreteExceptional,
    /// Continuous covariate, non-exceptional law.
    ContinuousNonExceptional,
    /// Continuous covariate, exceptional law.
    ContinuousExceptional,
}

impl DgpSpec {
    pub const ALL: [DgpSpec; 3] = [
        DgpSpec::DiscreteExceptional,
        DgpSpec::ContinuousNonExceptional,
        DgpSpec::ContinuousExceptional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DgpSpec::DiscreteExceptional => "d-e",
            DgpSpec::ContinuousNonExceptional => "c-ne",
            DgpSpec::ContinuousExceptional => "c-e",
        }
    }

    pub fn covariate_kind(&self) -> CovariateKind {
        match self {
            DgpSpec::DiscreteExceptional => CovariateKind::Discrete,
            _ => CovariateKind::Continuous,
        }
    }

    /// `g0(1 | w) = 0.5 + 0.1 w` for every process.
    pub fn propensity(&self, w: f64) -> f64 {
        0.5 + 0.1 * w
    }

    pub fn g0(&self, a: u8, w: f64) -> f64 {
        let p = self.propensity(w);
        if a == 1 {
            p
        } else {
            1.0 - p
        }
    }

    /// `Q0(1, w) - Q0(0, w)`.
    pub fn blip0(&self, w: f64) -> f64 {
        match self {
            DgpSpec::DiscreteExceptional => {
                if w == 0.0 {
                    0.2
                } else {
                    0.0
                }
            }
            DgpSpec::ContinuousNonExceptional => {
                if w >= 0.0 {
                    // -w^3 + w^2 - w/3 + 1/27
                    let t = w - 1.0 / 3.0;
                    -t * t * t
                } else {
                    0.75 * w * w * w + w * w - w / 3.0 + 1.0 / 27.0
                }
            }
            DgpSpec::ContinuousExceptional => {
                if w < -0.5 {
                    // with t = w + 5/6: -t^3 + t^2 - t/3 + 1/27 = -(w + 1/2)^3
                    let t = w + 0.5;
                    -t * t * t
                } else if w > 1.0 / 3.0 {
                    let t = w - 1.0 / 3.0;
                    -t * t * t
                } else {
                    0.0
                }
            }
        }
    }

    pub fn q_bar0(&self, a: u8, w: f64) -> f64 {
        match self {
            DgpSpec::DiscreteExceptional => {
                if a == 1 && w == 0.0 {
                    0.6
                } else {
                    0.4
                }
            }
            _ => {
                if a == 1 {
                    CONTROL_MEAN + self.blip0(w)
                } else {
                    CONTROL_MEAN
                }
            }
        }
    }

    /// `Var(Y | A = a, W = w)` for the Bernoulli outcome.
    pub fn cond_var0(&self, a: u8, w: f64) -> f64 {
        let q = self.q_bar0(a, w);
        q * (1.0 - q)
    }

    /// Boundaries of the smooth pieces of `Q0` on the support.
    fn breakpoints(&self) -> &'static [f64] {
        match self {
            DgpSpec::DiscreteExceptional => &[],
            DgpSpec::ContinuousNonExceptional => &[-1.0, 0.0, 1.0],
            DgpSpec::ContinuousExceptional => &[-1.0, -0.5, 1.0 / 3.0, 1.0],
        }
    }

    fn covariate(&self, w: f64) -> Covariate {
        match self {
            DgpSpec::DiscreteExceptional => Covariate::Stratum(w as u32),
            _ => Covariate::Real(w),
        }
    }

    /// Draws one observation.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Observation {
        let w = match self {
            DgpSpec::DiscreteExceptional => rng.random_range(0..4u32) as f64,
            _ => rng.random_range(-1.0..1.0),
        };
        let a = u8::from(rng.random::<f64>() < self.propensity(w));
        let y = if rng.random::<f64>() < self.q_bar0(a, w) { 1.0 } else { 0.0 };
        Observation {
            w: self.covariate(w),
            a,
            y,
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        let records = (0..n).map(|_| self.draw(rng)).collect();
        Dataset::new(records).expect("n >= 1")
    }

    /// `n` i.i.d. draws from the sampling stream of replicate 0 under `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be at least 1".into()));
        }
        Ok(self.sample_with(n, &mut rng::stream(seed, 0, Purpose::Sample)))
    }

    pub fn oracle(&self) -> OracleTruth {
        OracleTruth {
            spec: *self,
            optimal_value: self.compute_optimal_value(),
        }
    }

    fn compute_optimal_value(&self) -> f64 {
        match self {
            DgpSpec::DiscreteExceptional => (0..4)
                .map(|k| 0.25 * self.q_bar0(1, k as f64).max(self.q_bar0(0, k as f64)))
                .sum(),
            _ => {
                let gl = rule64();
                let mut breaks = self.breakpoints().to_vec();
                breaks.extend(locate_changes(-1.0, 1.0, BOUNDARY_SCAN_CELLS, |w| {
                    i64::from(self.blip0(w) > 0.0)
                }));
                sort_dedup(&mut breaks);
                CONTROL_MEAN + 0.5 * gl.integrate_segments(&breaks, |w| self.blip0(w).max(0.0))
            }
        }
    }

    /// Segments of `[-1, 1]` on which both `Q0` and `rule` are smooth/constant.
    fn rule_segments<R: TreatmentRule + ?Sized>(&self, rule: &R) -> Vec<f64> {
        let mut breaks = self.breakpoints().to_vec();
        breaks.extend(locate_changes(-1.0, 1.0, BOUNDARY_SCAN_CELLS, |w| {
            i64::from(rule.decide(Covariate::Real(w)))
        }));
        sort_dedup(&mut breaks);
        breaks
    }

    /// `E_W[f(d(W), W)]` for a rule `d` under the covariate law.
    fn expect_under_rule<R, F>(&self, rule: &R, f: F) -> f64
    where
        R: TreatmentRule + ?Sized,
        F: Fn(u8, f64) -> f64,
    {
        match self {
            DgpSpec::DiscreteExceptional => (0..4u32)
                .map(|k| 0.25 * f(rule.decide(Covariate::Stratum(k)), k as f64))
                .sum(),
            _ => {
                let gl = rule64();
                let breaks = self.rule_segments(rule);
                breaks
                    .windows(2)
                    .filter(|s| s[1] > s[0])
                    .map(|s| {
                        let d = rule.decide(Covariate::Real(0.5 * (s[0] + s[1])));
                        0.5 * gl.integrate(s[0], s[1], |w| f(d, w))
                    })
                    .sum()
            }
        }
    }

    /// `E_0 Q0(d(W), W)`, the mean outcome had everyone followed `rule`.
    pub fn value_of_rule<R: TreatmentRule + ?Sized>(&self, rule: &R) -> f64 {
        self.expect_under_rule(rule, |d, w| self.q_bar0(d, w))
    }

    /// `Var_0 D(d, Q0, g0)(O)` for a fixed rule `d`:
    /// `E[sigma0^2(d, W) / g0(d|W)] + Var[Q0(d(W), W)]`.
    pub fn influence_variance<R: TreatmentRule + ?Sized>(&self, rule: &R) -> f64 {
        let within = self.expect_under_rule(rule, |d, w| self.cond_var0(d, w) / self.g0(d, w));
        let mean = self.expect_under_rule(rule, |d, w| self.q_bar0(d, w));
        let second = self.expect_under_rule(rule, |d, w| self.q_bar0(d, w).powi(2));
        within + second - mean * mean
    }

    /// The set where the true blip is exactly zero.
    pub fn zero_blip_set(&self) -> ZeroBlipSet {
        match self {
            DgpSpec::DiscreteExceptional => ZeroBlipSet::Strata(vec![1, 2, 3]),
            DgpSpec::ContinuousNonExceptional => ZeroBlipSet::Points(vec![1.0 / 3.0]),
            DgpSpec::ContinuousExceptional => ZeroBlipSet::Intervals(vec![(-0.5, 1.0 / 3.0)]),
        }
    }

    /// Checks whether the law is exceptional: the zero-blip set carries
    /// positive probability on which some arm has positive outcome variance.
    pub fn is_exceptional(&self) -> ExceptionalDiagnosis {
        let arms_vary = |w: f64| self.cond_var0(0, w).max(self.cond_var0(1, w)) > 0.0;
        let witness = match self.zero_blip_set() {
            ZeroBlipSet::Strata(s) => ZeroBlipSet::Strata(s.into_iter().filter(|&k| arms_vary(k as f64)).collect()),
            ZeroBlipSet::Intervals(iv) => ZeroBlipSet::Intervals(
                iv.into_iter()
                    .filter(|&(lo, hi)| hi > lo && (0..=100).all(|i| arms_vary(lo + (hi - lo) * i as f64 / 100.0)))
                    .collect(),
            ),
            ZeroBlipSet::Points(_) => ZeroBlipSet::Points(vec![]),
        };
        let probability = self.probability_of(&witness);
        ExceptionalDiagnosis {
            exceptional: probability > 0.0,
            witness,
            probability,
        }
    }

    fn probability_of(&self, set: &ZeroBlipSet) -> f64 {
        match set {
            ZeroBlipSet::Strata(s) => 0.25 * s.len() as f64,
            ZeroBlipSet::Intervals(iv) => iv.iter().map(|(lo, hi)| 0.5 * (hi - lo)).sum(),
            ZeroBlipSet::Points(_) => 0.0,
        }
    }

    /// `P(0 < |blip0(W)| <= t)`.
    pub fn margin_probability(&self, t: f64) -> f64 {
        match self {
            DgpSpec::DiscreteExceptional => (0..4)
                .filter(|&k| {
                    let b = self.blip0(k as f64).abs();
                    b > 0.0 && b <= t
                })
                .count() as f64
                * 0.25,
            _ => {
                let within = |w: f64| self.blip0(w).abs() <= t;
                let mut breaks = self.breakpoints().to_vec();
                breaks.extend(locate_changes(-1.0, 1.0, BOUNDARY_SCAN_CELLS, |w| i64::from(within(w))));
                sort_dedup(&mut breaks);
                let mass: f64 = breaks
                    .windows(2)
                    .filter(|s| s[1] > s[0] && within(0.5 * (s[0] + s[1])))
                    .map(|s| 0.5 * (s[1] - s[0]))
                    .sum();
                (mass - self.probability_of(&self.zero_blip_set())).max(0.0)
            }
        }
    }
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup();
}

impl fmt::Display for DgpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DgpSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d-e" | "de" => Ok(DgpSpec::DiscreteExceptional),
            "c-ne" | "cne" => Ok(DgpSpec::ContinuousNonExceptional),
            "c-e" | "ce" => Ok(DgpSpec::ContinuousExceptional),
            other => Err(Error::InvalidArgument(format!("unknown data-generating process `{other}`"))),
        }
    }
}

/// Region where the true blip vanishes.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroBlipSet {
    Strata(Vec<u32>),
    /// Closed intervals of positive length.
    Intervals(Vec<(f64, f64)>),
    /// Isolated zeros (probability zero).
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalDiagnosis {
    pub exceptional: bool,
    /// Part of the zero-blip set with positive conditional outcome variance.
    pub witness: ZeroBlipSet,
    /// Probability of the witness region.
    pub probability: f64,
}

/// Closed-form truths for one process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTruth {
    pub spec: DgpSpec,
    pub optimal_value: f64,
}

impl OracleTruth {
    /// The true optimal rule `I(blip0 > 0)`.
    pub fn optimal_rule(&self) -> impl TreatmentRule + Send + Sync {
        let spec = self.spec;
        rule_from_blip(move |w: Covariate| spec.blip0(w.value()))
    }

    pub fn value_of_rule<R: TreatmentRule + ?Sized>(&self, rule: &R) -> f64 {
        self.spec.value_of_rule(rule)
    }

    fn check(&self, w: Covariate) -> Result<f64> {
        if w.kind() != self.spec.covariate_kind() {
            return Err(Error::CovariateKind {
                learner: "oracle",
                expected: match self.spec.covariate_kind() {
                    CovariateKind::Discrete => "discrete",
                    CovariateKind::Continuous => "continuous",
                },
            });
        }
        Ok(w.value())
    }
}

impl NuisanceModel for OracleTruth {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        Ok(self.spec.q_bar0(a, self.check(w)?))
    }

    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        Ok(self.spec.g0(a, self.check(w)?))
    }

    fn blip(&self, w: Covariate) -> Result<f64> {
        Ok(self.spec.blip0(self.check(w)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FnRule;

    const CNE_EXACT: f64 = 0.3 + 0.5 * (-3.0 / 16.0 + 1.0 / 3.0 + 1.0 / 6.0 + 1.0 / 27.0 + 1.0 / 324.0);

    #[test]
    fn factored_pieces_match_printed_polynomials() {
        for i in 0..=200 {
            let w = -1.0 + i as f64 / 100.0;
            let cne = DgpSpec::ContinuousNonExceptional.blip0(w);
            let printed = if w >= 0.0 {
                -w.powi(3) + w * w - w / 3.0 + 1.0 / 27.0
            } else {
                0.75 * w.powi(3) + w * w - w / 3.0 + 1.0 / 27.0
            };
            assert!((cne - printed).abs() < 1e-15);
            let t = w + 5.0 / 6.0;
            let ce_printed = if w < -0.5 {
                -t.powi(3) + t * t - t / 3.0 + 1.0 / 27.0
            } else if w > 1.0 / 3.0 {
                -w.powi(3) + w * w - w / 3.0 + 1.0 / 27.0
            } else {
                0.0
            };
            assert!((DgpSpec::ContinuousExceptional.blip0(w) - ce_printed).abs() < 1e-15);
        }
    }

    #[test]
    fn optimal_values() {
        assert!((DgpSpec::DiscreteExceptional.oracle().optimal_value - 0.45).abs() < 1e-15);
        let ce = DgpSpec::ContinuousExceptional.oracle().optimal_value;
        assert!((ce - (0.3 + 0.5 / 64.0)).abs() < 1e-12, "{ce}");
        let cne = DgpSpec::ContinuousNonExceptional.oracle().optimal_value;
        assert!((cne - CNE_EXACT).abs() < 1e-12, "{cne}");
    }

    #[test]
    fn ce_zero_set_endpoints_are_continuous() {
        let s = DgpSpec::ContinuousExceptional;
        assert_eq!(s.blip0(-0.5), 0.0);
        assert_eq!(s.blip0(1.0 / 3.0), 0.0);
        assert!(s.blip0(-0.5 - 1e-6).abs() < 1e-15);
        assert!(s.blip0(-0.5 - 1e-3) > 0.0 && s.blip0(1.0 / 3.0 + 1e-3) < 0.0);
        assert_eq!(s.zero_blip_set(), ZeroBlipSet::Intervals(vec![(-0.5, 1.0 / 3.0)]));
    }

    #[test]
    fn value_of_simple_rules() {
        let de = DgpSpec::DiscreteExceptional;
        assert!((de.value_of_rule(&FnRule(|_| 1)) - 0.45).abs() < 1e-15);
        assert!((de.value_of_rule(&FnRule(|_| 0)) - 0.4).abs() < 1e-15);
        for s in [DgpSpec::ContinuousNonExceptional, DgpSpec::ContinuousExceptional] {
            assert!((s.value_of_rule(&FnRule(|_| 0)) - 0.3).abs() < 1e-15);
            let opt = s.oracle();
            let v = s.value_of_rule(&opt.optimal_rule());
            assert!((v - opt.optimal_value).abs() < 1e-8);
            for cut in [-0.7, -0.2, 0.1, 0.5] {
                let v = s.value_of_rule(&FnRule(move |w: Covariate| u8::from(w.value() < cut)));
                assert!(v <= opt.optimal_value + 1e-8);
            }
        }
    }

    #[test]
    fn threshold_rule_value_matches_closed_form() {
        // C-E, treat iff w < c with c in the zero set: value = 0.3 + (1/2)(1/64)
        let s = DgpSpec::ContinuousExceptional;
        let v = s.value_of_rule(&FnRule(|w: Covariate| u8::from(w.value() < 0.0)));
        assert!((v - (0.3 + 0.5 / 64.0)).abs() < 1e-13);
        // treat everyone: 0.3 + (1/2)(1/64 - (2/3)^4/4)
        let v = s.value_of_rule(&FnRule(|_| 1));
        let exact = 0.3 + 0.5 * (1.0 / 64.0 - (2.0f64 / 3.0).powi(4) / 4.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn exceptional_diagnosis() {
        let de = DgpSpec::DiscreteExceptional.is_exceptional();
        assert!(de.exceptional);
        assert_eq!(de.witness, ZeroBlipSet::Strata(vec![1, 2, 3]));
        assert!((DgpSpec::DiscreteExceptional.cond_var0(1, 2.0) - 0.24).abs() < 1e-15);

        let cne = DgpSpec::ContinuousNonExceptional.is_exceptional();
        assert!(!cne.exceptional);
        assert_eq!(cne.probability, 0.0);

        let ce = DgpSpec::ContinuousExceptional.is_exceptional();
        assert!(ce.exceptional);
        assert_eq!(ce.witness, ZeroBlipSet::Intervals(vec![(-0.5, 1.0 / 3.0)]));
        assert!((ce.probability - 5.0 / 12.0).abs() < 1e-15);
        assert!((DgpSpec::ContinuousExceptional.cond_var0(1, 0.0) - 0.21).abs() < 1e-15);
    }

    #[test]
    fn cne_blip_has_only_isolated_zero() {
        let s = DgpSpec::ContinuousNonExceptional;
        let roots = locate_changes(-1.0, 1.0, BOUNDARY_SCAN_CELLS, |w| i64::from(s.blip0(w) > 0.0));
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((-1000..=1000).filter(|i| s.blip0(*i as f64 / 1000.0) == 0.0).count() <= 1);
    }

    #[test]
    fn margin_probability_closed_form() {
        // C-E: |blip| <= t  <=>  within t^(1/3) of either end of the zero set
        let s = DgpSpec::ContinuousExceptional;
        for t in [1e-3, 0.01, 0.05] {
            let r = f64::cbrt(t);
            let exact = 0.5 * (r.min(0.5) + r.min(2.0 / 3.0));
            assert!((s.margin_probability(t) - exact).abs() < 1e-9, "t = {t}");
        }
        assert_eq!(DgpSpec::DiscreteExceptional.margin_probability(0.1), 0.0);
        assert_eq!(DgpSpec::DiscreteExceptional.margin_probability(0.2), 0.25);
    }

    #[test]
    fn influence_variance_discrete_enumeration() {
        // brute-force enumeration over (w, a, y)
        let s = DgpSpec::DiscreteExceptional;
        let rule = s.oracle().optimal_rule();
        let (mut m1, mut m2) = (0.0, 0.0);
        for w in 0..4u32 {
            let wf = w as f64;
            let d = rule.decide(Covariate::Stratum(w));
            for a in 0..2u8 {
                for y in [0.0, 1.0] {
                    let q = s.q_bar0(a, wf);
                    let p = 0.25 * s.g0(a, wf) * if y == 1.0 { q } else { 1.0 - q };
                    let ind = if a == d { 1.0 / s.g0(a, wf) * (y - q) } else { 0.0 };
                    let v = ind + s.q_bar0(d, wf);
                    m1 += p * v;
                    m2 += p * v * v;
                }
            }
        }
        assert!((m1 - 0.45).abs() < 1e-15);
        assert!((s.influence_variance(&rule) - (m2 - m1 * m1)).abs() < 1e-14);
    }

    #[test]
    fn sampling_frequencies() {
        let n = 100_000;
        let de = DgpSpec::DiscreteExceptional.sample(n, 11).unwrap();
        let mut counts = [0usize; 4];
        let (mut n3, mut t3) = (0usize, 0usize);
        for o in de.records() {
            let Covariate::Stratum(k) = o.w else { panic!() };
            counts[k as usize] += 1;
            if k == 3 {
                n3 += 1;
                t3 += o.a as usize;
            }
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
        }
        assert!((t3 as f64 / n3 as f64 - 0.8).abs() < 0.01);

        let ce = DgpSpec::ContinuousExceptional.sample(n, 12).unwrap();
        let control: Vec<f64> = ce.records().iter().filter(|o| o.a == 0).map(|o| o.y).collect();
        let mean = control.iter().sum::<f64>() / control.len() as f64;
        assert!((mean - 0.3).abs() < 0.005);
    }

    #[test]
    fn sampling_moments_match_closed_forms() {
        let n = 100_000;
        for s in [DgpSpec::ContinuousNonExceptional, DgpSpec::ContinuousExceptional] {
            let data = s.sample(n, 99).unwrap();
            // ten equal cells of W, both arms
            for cell in 0..10 {
                let (lo, hi) = (-1.0 + 0.2 * cell as f64, -0.8 + 0.2 * cell as f64);
                for a in 0..2u8 {
                    let ys: Vec<f64> = data
                        .records()
                        .iter()
                        .filter(|o| o.a == a && (lo..hi).contains(&o.w.value()))
                        .map(|o| o.y)
                        .collect();
                    let emp = ys.iter().sum::<f64>() / ys.len() as f64;
                    // cell average of Q0 against the (propensity-tilted) conditional law of W
                    let gl = GaussLegendre::new(32);
                    let num = gl.integrate(lo, hi, |w| s.g0(a, w) * s.q_bar0(a, w));
                    let den = gl.integrate(lo, hi, |w| s.g0(a, w));
                    let q = num / den;
                    let se = (q * (1.0 - q) / ys.len() as f64).sqrt();
                    assert!((emp - q).abs() <= 4.0 * se, "{s} cell {cell} arm {a}: {emp} vs {q}");
                }
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = DgpSpec::ContinuousNonExceptional.sample(50, 3).unwrap();
        let b = DgpSpec::ContinuousNonExceptional.sample(50, 3).unwrap();
        assert_eq!(a, b);
        assert!(DgpSpec::ContinuousNonExceptional.sample(0, 3).is_err());
    }

    #[test]
    fn parse_names() {
        for s in DgpSpec::ALL {
            assert_eq!(s.name().parse::<DgpSpec>().unwrap(), s);
        }
        assert!("x".parse::<DgpSpec>().is_err());
    }
}
