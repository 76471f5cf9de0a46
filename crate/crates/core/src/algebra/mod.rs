//! Exact arithmetic: fields, truncated q-series, polynomials, matrices,
//! factorisation and fixed-point complex numbers.

pub mod bigfloat;
pub mod factor;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod series;
pub mod zfactor;

use thiserror::Error;

pub use field::{Field, PrimeField, Rat, Rationals};
pub use matrix::Matrix;
pub use factor::{FpPoly, Factorization};
pub use poly::Poly;
pub use series::{FpSeries, QExpansion, Series};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("modulus {0} is not a prime in [5, 2^31)")]
    InvalidModulus(u64),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division leaves a nonzero remainder")]
    InexactDivision,
    #[error("polynomial is not a perfect square: factor of degree {degree} occurs to odd power {exponent}")]
    OddMultiplicity { degree: usize, exponent: usize },
    #[error("matrix dimensions do not match: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("the zero polynomial has no factorisation")]
    ZeroPolynomial,
    #[error("square root needs a monic polynomial")]
    NotMonic,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a zero series")]
    DivisionByZero,
    #[error("series live over different coefficient fields")]
    FieldMismatch,
    #[error("series have different levels ({0} vs {1})")]
    LevelMismatch(u64, u64),
    #[error("cannot add forms of weight {0} and {1}")]
    WeightMismatch(i64, i64),
    #[error("coefficient is not integral at {0}")]
    NotIntegral(u64),
}
