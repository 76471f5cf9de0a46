//! Exponents of x and x - 1728 in the extraction.

use super::WeierstrassError;
use crate::algebra::field::legendre;
use crate::level1::square_delta;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractionExponents {
    pub eps_rho: i64,
    pub eps_i: i64,
    pub k_tilde: i64,
    pub k_star: i64,
    pub alpha_rho: u32,
    pub alpha_i: u32,
    pub delta_rho: u32,
    pub delta_i: u32,
    /// Exponents of x and x - 1728 in G_p x^dr (x-1728)^di / (x^er (x-1728)^ei).
    pub quotient_rho: i64,
    pub quotient_i: i64,
}

/// Exponents of x and x - 1728 in the closed form of G_p.
pub fn gp_exponents(g: i64, p: u64) -> (i64, i64) {
    let n = g * g - g;
    let rho = if matches!(p % 12, 5 | 11) { (n + 2) / 3 } else { 0 };
    let i = if matches!(p % 12, 7 | 11) { n / 2 } else { 0 };
    (rho, i)
}

pub fn elliptic_exponents(p: u64, g: usize) -> Result<ExtractionExponents, WeierstrassError> {
    if g < 2 {
        return Err(WeierstrassError::GenusTooSmall(g));
    }
    let g = g as i64;
    let pi = p as i64;
    let s = g * g + g;
    let eps_i = s * (1 + legendre(-1, p) as i64) / 4;
    let k_tilde = s * (pi + 1);
    let k_star = k_tilde.rem_euclid(3);
    let num = s * (1 + legendre(-3, p) as i64) - k_star;
    if num % 3 != 0 {
        return Err(WeierstrassError::NonIntegralExponent);
    }
    let eps_rho = num / 3;
    let (delta_rho, delta_i) = square_delta(g * (g + pi));
    let (gr, gi) = gp_exponents(g, p);
    let quotient_rho = gr + delta_rho as i64 - eps_rho;
    let quotient_i = gi + delta_i as i64 - eps_i;
    if quotient_rho % 2 != 0 {
        return Err(WeierstrassError::ParityViolation {
            factor: "x",
            value: quotient_rho,
        });
    }
    if quotient_i % 2 != 0 {
        return Err(WeierstrassError::ParityViolation {
            factor: "x - 1728",
            value: quotient_i,
        });
    }
    Ok(ExtractionExponents {
        eps_rho,
        eps_i,
        k_tilde,
        k_star,
        alpha_rho: (p % 3 == 2) as u32,
        alpha_i: (p % 4 == 3) as u32,
        delta_rho,
        delta_i,
        quotient_rho,
        quotient_i,
    })
}
