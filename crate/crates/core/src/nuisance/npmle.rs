//! Nonparametric MLE for a discrete covariate: cell means and treated
//! proportions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Covariate, NuisanceModel, Observation};

/// Sufficient statistics for one stratum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StratumCell {
    pub n_w: usize,
    pub n_treated: usize,
    sum_y_treated: f64,
    sum_y_control: f64,
}

impl StratumCell {
    /// Mean outcome among treated, `None` when nobody was treated.
    pub fn mean_y_treated(&self) -> Option<f64> {
        (self.n_treated > 0).then(|| self.sum_y_treated / self.n_treated as f64)
    }

    pub fn mean_y_control(&self) -> Option<f64> {
        let n0 = self.n_w - self.n_treated;
        (n0 > 0).then(|| self.sum_y_control / n0 as f64)
    }
}

/// Plug-in fit over the observed strata.
#[derive(Debug, Clone, PartialEq)]
pub struct NpmleFit {
    strata: BTreeMap<u32, StratumCell>,
    n: usize,
}

impl NpmleFit {
    pub fn strata(&self) -> &BTreeMap<u32, StratumCell> {
        &self.strata
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn cell(&self, w: Covariate) -> Result<(u32, &StratumCell)> {
        let Covariate::Stratum(k) = w else {
            return Err(Error::CovariateKind {
                learner: "NPMLE",
                expected: "discrete",
            });
        };
        let cell = self.strata.get(&k).ok_or(Error::IllDefinedNpmle {
            stratum: k,
            arm: "any",
        })?;
        Ok((k, cell))
    }

    /// Plug-in value `sum_w p(w) Q(d(w), w)` with `d` the fitted rule.
    pub fn plug_in_value(&self) -> Result<f64> {
        let mut total = 0.0;
        for (&k, cell) in &self.strata {
            let w = Covariate::Stratum(k);
            total += cell.n_w as f64 / self.n as f64 * self.q_bar(self.decide(w)?, w)?;
        }
        Ok(total)
    }
}

/// Fits the NPMLE to a discrete sample.
pub fn fit_npmle(data: &[Observation]) -> Result<NpmleFit> {
    let mut strata: BTreeMap<u32, StratumCell> = BTreeMap::new();
    for o in data {
        let Covariate::Stratum(k) = o.w else {
            return Err(Error::CovariateKind {
                learner: "NPMLE",
                expected: "discrete",
            });
        };
        let cell = strata.entry(k).or_default();
        cell.n_w += 1;
        if o.a == 1 {
            cell.n_treated += 1;
            cell.sum_y_treated += o.y;
        } else {
            cell.sum_y_control += o.y;
        }
    }
    Ok(NpmleFit { strata, n: data.len() })
}

impl NuisanceModel for NpmleFit {
    fn q_bar(&self, a: u8, w: Covariate) -> Result<f64> {
        let (k, cell) = self.cell(w)?;
        let mean = if a == 1 { cell.mean_y_treated() } else { cell.mean_y_control() };
        mean.ok_or(Error::IllDefinedNpmle {
            stratum: k,
            arm: if a == 1 { "treated" } else { "control" },
        })
    }

    fn g(&self, a: u8, w: Covariate) -> Result<f64> {
        let (_, cell) = self.cell(w)?;
        let p = cell.n_treated as f64 / cell.n_w as f64;
        Ok(if a == 1 { p } else { 1.0 - p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::DgpSpec;
    use crate::model::{influence_term, DEFAULT_PROPENSITY_FLOOR};

    fn obs(w: u32, a: u8, y: f64) -> Observation {
        Observation::new(Covariate::Stratum(w), a, y).unwrap()
    }

    #[test]
    fn cell_means_and_proportions() {
        let mut data = vec![obs(2, 1, 1.0), obs(2, 1, 0.0), obs(2, 1, 1.0)];
        data.extend((0..7).map(|i| obs(2, 0, (i % 2) as f64)));
        let fit = fit_npmle(&data).unwrap();
        let w = Covariate::Stratum(2);
        assert!((fit.q_bar(1, w).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((fit.g(1, w).unwrap() - 0.3).abs() < 1e-15);
        assert!((fit.q_bar(0, w).unwrap() - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn empty_arm_is_ill_defined() {
        let fit = fit_npmle(&[obs(1, 1, 1.0), obs(1, 1, 0.0)]).unwrap();
        let err = fit.q_bar(0, Covariate::Stratum(1)).unwrap_err();
        assert_eq!(err, Error::IllDefinedNpmle { stratum: 1, arm: "control" });
        assert!(fit.decide(Covariate::Stratum(1)).unwrap_err().is_ill_defined());
        assert!(fit.g(1, Covariate::Stratum(5)).unwrap_err().is_ill_defined());
    }

    #[test]
    fn rejects_continuous() {
        let o = Observation::new(Covariate::Real(0.1), 1, 1.0).unwrap();
        assert!(matches!(fit_npmle(&[o]), Err(Error::CovariateKind { .. })));
    }

    #[test]
    fn converges_on_discrete_law() {
        let data = DgpSpec::DiscreteExceptional.sample(100_000, 5).unwrap();
        let fit = fit_npmle(data.records()).unwrap();
        assert!((fit.q_bar(1, Covariate::Stratum(0)).unwrap() - 0.6).abs() < 0.01);
        assert!((fit.g(1, Covariate::Stratum(3)).unwrap() - 0.8).abs() < 0.01);
    }

    #[test]
    fn one_step_at_npmle_equals_plug_in() {
        for seed in 0..20 {
            let data = DgpSpec::DiscreteExceptional.sample(400, seed).unwrap();
            let fit = fit_npmle(data.records()).unwrap();
            let terms: Vec<f64> = data
                .records()
                .iter()
                .map(|o| influence_term(&fit, o, DEFAULT_PROPENSITY_FLOOR).unwrap())
                .collect();
            let one_step = terms.iter().sum::<f64>() / terms.len() as f64;
            assert!((one_step - fit.plug_in_value().unwrap()).abs() < 1e-12);
        }
    }
}
