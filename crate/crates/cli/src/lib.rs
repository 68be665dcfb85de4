//! Scenario ingestion, the verification pipeline, deterministic reports, the
//! golden-file corpus runner and parameter sweeps.

pub mod corpus;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod sweep;

use thiserror::Error;

use ffstark_core::classgrp::ClassGroupError;
use ffstark_core::ffield::FieldError;
use ffstark_core::grpring::GroupRingError;
use ffstark_core::lfunc::LfuncError;
use ffstark_core::rubin::RubinError;
use ffstark_core::units::UnitsError;

pub use pipeline::{run_verify, RunOptions};
pub use scenario::{parse_scenario, ParsedScenario};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("MALFORMED: {0}")]
    Malformed(String),
    #[error("NOT_IRREDUCIBLE: {0}")]
    NotIrreducible(String),
    #[error("OVERLAP: S and T share a place")]
    Overlap,
    #[error("MISSING_MODULUS: a > 1 needs a field modulus")]
    MissingModulus,
    #[error("HYPOTHESES_FAILED: {0}")]
    HypothesesFailed(String),
    #[error("GENUS_UNSUPPORTED: check {0} needs genus 0")]
    GenusUnsupported(String),
    #[error("CAPACITY: {0}")]
    Capacity(String),
    #[error("INTERNAL: {0}")]
    Internal(String),
    #[error("IO: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "MALFORMED",
            CliError::NotIrreducible(_) => "NOT_IRREDUCIBLE",
            CliError::Overlap => "OVERLAP",
            CliError::MissingModulus => "MISSING_MODULUS",
            CliError::HypothesesFailed(_) => "HYPOTHESES_FAILED",
            CliError::GenusUnsupported(_) => "GENUS_UNSUPPORTED",
            CliError::Capacity(_) => "CAPACITY",
            CliError::Internal(_) => "INTERNAL",
            CliError::Io(_) => "IO",
        }
    }

    /// Process exit status: 2 for input errors, 3 for capacity errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Capacity(_) => 3,
            CliError::Internal(_) => 1,
            _ => 2,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<LfuncError> for CliError {
    fn from(e: LfuncError) -> Self {
        match e {
            LfuncError::Field(f) => f.into(),
            LfuncError::GenusUnsupported => CliError::GenusUnsupported("euler".into()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<UnitsError> for CliError {
    fn from(e: UnitsError) -> Self {
        match e {
            UnitsError::Field(f) => f.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<GroupRingError> for CliError {
    fn from(e: GroupRingError) -> Self {
        match e {
            GroupRingError::Capacity(m) => CliError::Capacity(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ClassGroupError> for CliError {
    fn from(e: ClassGroupError) -> Self {
        match e {
            ClassGroupError::Units(u) => u.into(),
            ClassGroupError::GroupRing(g) => g.into(),
            ClassGroupError::Lfunc(l) => l.into(),
            ClassGroupError::GenusUnsupported => CliError::GenusUnsupported("classgroup".into()),
            e @ ClassGroupError::Uncertified { .. } => CliError::Capacity(e.to_string()),
        }
    }
}

impl From<RubinError> for CliError {
    fn from(e: RubinError) -> Self {
        match e {
            RubinError::Units(u) => u.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}
