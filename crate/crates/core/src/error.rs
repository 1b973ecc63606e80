use thiserror::Error;

use crate::model::Covariate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset mixes discrete and continuous covariates (record {index})")]
    MixedCovariates { index: usize },

    #[error("{learner} requires {expected} covariates")]
    CovariateKind {
        learner: &'static str,
        expected: &'static str,
    },

    #[error("propensity g({a}|{w}) = {g:e} is at or below the floor {floor:e}{}", fmt_index(.index))]
    Positivity {
        w: Covariate,
        a: u8,
        g: f64,
        floor: f64,
        index: Option<usize>,
    },

    #[error("NPMLE is ill-defined in stratum {stratum}: no {arm} observations")]
    IllDefinedNpmle { stratum: u32, arm: &'static str },

    #[error("learner failed on block {block}: {source}")]
    Learner {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid chunk schedule: {0}")]
    Schedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn fmt_index(index: &Option<usize>) -> String {
    match index {
        Some(i) => format!(" at observation {}", i + 1),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn at_observation(self, index: usize) -> Self {
        match self {
            Error::Positivity {
                w, a, g, floor, ..
            } => Error::Positivity {
                w,
                a,
                g,
                floor,
                index: Some(index),
            },
            other => other,
        }
    }

    /// True for the empty-cell NPMLE failure, possibly wrapped in a block error.
    pub fn is_ill_defined(&self) -> bool {
        match self {
            Error::IllDefinedNpmle { .. } => true,
            Error::Learner { source, .. } => source.is_ill_defined(),
            _ => false,
        }
    }
}
