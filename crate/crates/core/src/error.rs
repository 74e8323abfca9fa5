use std::fmt;

use thiserror::Error;

use crate::lattice::LatticeVector;

/// The reason a generator list was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationKind {
    NotSimplicial,
    ExtremalRaysNotIndependent,
    NotMinimal,
    NotSmallestOnRay,
    ZeroGenerator,
    NegativeCoordinate,
    DimensionMismatch,
    Overflow,
}

impl fmt::Display for ValidationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ValidationKind::NotSimplicial => "not simplicial",
            ValidationKind::ExtremalRaysNotIndependent => "extremal rays not independent",
            ValidationKind::NotMinimal => "not minimal",
            ValidationKind::NotSmallestOnRay => "not smallest on ray",
            ValidationKind::ZeroGenerator => "zero generator",
            ValidationKind::NegativeCoordinate => "negative coordinate",
            ValidationKind::DimensionMismatch => "dimension mismatch",
            ValidationKind::Overflow => "integer overflow",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub kind: ValidationKind,
    /// Index into the generator list as it was supplied, when one generator is at fault.
    pub index: Option<usize>,
    pub vector: Option<LatticeVector>,
    pub detail: String,
}

impl ValidationError {
    pub fn new(kind: ValidationKind, detail: impl Into<String>) -> Self {
        ValidationError {
            kind,
            index: None,
            vector: None,
            detail: detail.into(),
        }
    }

    pub fn at(mut self, index: usize, vector: &LatticeVector) -> Self {
        self.index = Some(index);
        self.vector = Some(vector.clone());
        self
    }

    pub fn overflow(detail: impl Into<String>) -> Self {
        ValidationError::new(ValidationKind::Overflow, detail)
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(i) = self.index {
            write!(f, " (generator #{i}")?;
            if let Some(v) = &self.vector {
                write!(f, " = {v}")?;
            }
            write!(f, ")")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid semigroup: {0}")]
    Validation(#[from] ValidationError),

    #[error("membership box for {target} has {cells} cells, over the budget of {budget}")]
    BoxTooLarge {
        target: LatticeVector,
        cells: u128,
        budget: u64,
    },

    #[error("no multiple l <= {l_max} of {generator} lies in the free span of the extremal rays")]
    LBoundExceeded {
        generator: LatticeVector,
        l_max: u64,
    },

    #[error("{0} is not an element of Ap(S,E)")]
    NotAperyElement(LatticeVector),

    #[error("{0} is not an element of the semigroup")]
    NotInSemigroup(LatticeVector),

    #[error("the semigroup ring is not Cohen-Macaulay")]
    NotCohenMacaulay,

    #[error("the Apéry set has not been attached to the membership engine")]
    AperyMissing,

    #[error("vector {vector} has dimension {found}, expected {expected}")]
    WrongDimension {
        vector: LatticeVector,
        expected: usize,
        found: usize,
    },

    #[error("ray index {index} out of range 1..={d}")]
    RayIndex { index: usize, d: usize },

    /// A structural fact that must hold for every Cohen-Macaulay simplicial
    /// semigroup failed. Never expected; surfaced rather than swallowed.
    #[error("internal consistency failure ({property}): {detail}")]
    Contradiction { property: String, detail: String },
}

impl Error {
    pub fn overflow(detail: impl Into<String>) -> Self {
        Error::Validation(ValidationError::overflow(detail))
    }

    /// True for the budget/bound errors the CLI maps to exit code 3.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::BoxTooLarge { .. } | Error::LBoundExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
