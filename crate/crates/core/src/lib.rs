//! Inference for the mean outcome under an optimal treatment rule that may
//! not be unique.
//!
//! The central piece is [`estimator::online_one_step`]: an online one-step
//! estimator whose terms are fit only on earlier observations and weighted by
//! their inverse estimated standard deviation. A martingale central limit
//! theorem then gives Wald-type intervals that stay valid at exceptional laws,
//! where the optimal value is not pathwise differentiable and ordinary
//! one-step or bootstrap intervals under-cover.
//!
//! Alongside it: nuisance learners ([`nuisance`]), the classical and
//! m-out-of-n bootstrap comparators ([`estimator`], [`bootstrap`]),
//! simulation laws with exact oracles ([`dgp`]) and a Monte Carlo driver
//! ([`harness`]).

pub mod bootstrap;
pub mod dgp;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod model;
pub mod normal;
pub mod nuisance;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
