//! Wronskians of the +1 basis, their level-one lifts mod p, and extraction
//! of the Weierstrass divisor polynomial mod p.

pub mod exponents;
pub mod extract;
pub mod lift;
pub mod wronskian;

use thiserror::Error;

use crate::algebra::{AlgebraError, SeriesError};
use crate::level1::Level1Error;
use crate::modsym::ModSymError;
use crate::supersingular::SupersingularError;

pub use exponents::{elliptic_exponents, ExtractionExponents};
pub use extract::{verify, Artifacts, Computed, VerificationReport, VerifyOptions};
pub use lift::lift_to_level1;
pub use wronskian::{rational_wronskian, rational_wronskian_window, wronskian, WronskianData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeierstrassError {
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("the forms are linearly dependent (zero Wronskian)")]
    ZeroWronskian,
    #[error("form {index} has no weight p+1 level-one lift mod p")]
    NoLift { index: usize },
    #[error("form {index} is not p-integral")]
    NotPIntegral { index: usize },
    #[error("need precision {needed}, got {got}")]
    PrecisionTooSmall { needed: i64, got: i64 },
    #[error("genus {0} is below 2")]
    GenusTooSmall(usize),
    #[error("exponent of {factor} in the elliptic quotient is odd ({value})")]
    ParityViolation { factor: &'static str, value: i64 },
    #[error("epsilon_rho is not an integer")]
    NonIntegralExponent,
    #[error("division by {step} left a remainder")]
    InexactDivision { step: &'static str },
    #[error("H_1 is not a square: {0}")]
    NotSquare(AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Level1(#[from] Level1Error),
    #[error(transparent)]
    ModSym(#[from] ModSymError),
    #[error(transparent)]
    Supersingular(#[from] SupersingularError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl WeierstrassError {
    /// Errors that contradict a proved congruence rather than signal misuse
    /// or resource limits.
    pub fn is_falsifier(&self) -> bool {
        matches!(
            self,
            WeierstrassError::ParityViolation { .. }
                | WeierstrassError::NonIntegralExponent
                | WeierstrassError::InexactDivision { .. }
                | WeierstrassError::NotSquare(_)
                | WeierstrassError::NoLift { .. }
                | WeierstrassError::ZeroWronskian
        )
    }
}
