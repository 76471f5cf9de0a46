//! Weight-2 modular symbols for Γ0(p), Hecke and Atkin–Lehner operators, and
//! the echelon basis of the w_p = +1 cusp forms.

pub mod basis;
pub mod hecke;
pub mod p1;
pub mod space;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use basis::{good_basis, plus_dimension, wt_infinity, GaloisBlock, GoodBasis};
pub use space::ModSymSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModSymError {
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("sign must be -1, 0 or 1, got {0}")]
    InvalidSign(i32),
    #[error("T_{0} is not available (index must be positive and prime to the level)")]
    BadHeckeIndex(u64),
    #[error("subspace is not invariant under the operator")]
    NotInvariant,
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("need at least {needed} q-coefficients, got {got}")]
    PrecisionTooSmall { needed: i64, got: i64 },
    #[error("no Manin symbol generates the +1 space as a Hecke module")]
    NoCyclicVector,
    #[error("integer overflow while accumulating Hecke images")]
    CoefficientOverflow,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
