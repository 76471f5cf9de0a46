//! Supersingular polynomials mod p, Hilbert class polynomials and the
//! polynomial of w_p-fixed points.

pub mod classpoly;
pub mod oracle;
pub mod split;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::level1::Level1Error;

pub use classpoly::{
    class_poly, fixed_point_poly, reduced_forms, verify_fixedlinear, ClassPolyData, FixedLinearCheck, FixedPointPoly,
};
pub use oracle::ss_oracle;
pub use split::{ss_polys, supersingular_split, SupersingularSplit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SupersingularError {
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("S_q has an irreducible factor of degree {degree}")]
    SplitDegreeMismatch { degree: usize },
    #[error("oracle bound exceeded: p = {p} > {bound}")]
    BoundExceeded { p: u64, bound: u64 },
    #[error("oracle routes disagree for p = {0}")]
    OracleInconsistent(u64),
    #[error("-{0} is not a negative discriminant")]
    InvalidDiscriminant(u64),
    #[error("class polynomial of discriminant -{d} did not round cleanly at {bits} bits")]
    PrecisionExhausted { d: u64, bits: u32 },
    #[error(transparent)]
    Level1(#[from] Level1Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
