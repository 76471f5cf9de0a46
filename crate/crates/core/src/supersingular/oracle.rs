//! Independent route to S_p: point counting for roots in F_p, and the
//! Hasse polynomial in the Legendre parameter pushed to the j-line by a
//! resultant.

use num_bigint::BigInt;
use num_integer::binomial;

use super::SupersingularError;
use crate::algebra::factor::{factor, linear_part};
use crate::algebra::field::{is_prime, Field, PrimeField};
use crate::algebra::poly::Poly;
use crate::algebra::FpPoly;

pub const DEFAULT_ORACLE_BOUND: u64 = 103;

/// Quadratic character table of F_p.
fn chi_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..p {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Trace of Frobenius of y^2 = x^3 + a x + b over F_p.
fn trace(p: u64, chi: &[i8], a: u64, b: u64) -> i64 {
    let s: i64 = (0..p)
        .map(|x| chi[((x * x % p * x + a * x + b) % p) as usize] as i64)
        .sum();
    -s
}

/// Whether some (any) curve over F_p with this j-invariant is supersingular.
pub fn is_supersingular_j(p: u64, j: u64, chi: &[i8]) -> bool {
    let j = j % p;
    let (a, b) = if j == 0 {
        (0, 1)
    } else if j == 1728 % p {
        (1, 0)
    } else {
        // j = 1728 * 4a^3 / (4a^3 + 27b^2) with a = 3j(1728-j), b = 2j(1728-j)^2
        let k = (1728 + p - j) % p * j % p;
        let a = 3 * k % p;
        let b = 2 * k % p * ((1728 + p - j) % p) % p;
        (a, b)
    };
    trace(p, chi, a, b) % p as i64 == 0
}

/// Supersingular j-invariants lying in F_p.
pub fn supersingular_in_fp(p: u64) -> Vec<u64> {
    let chi = chi_table(p);
    (0..p).filter(|&j| is_supersingular_j(p, j, &chi)).collect()
}

fn hasse_polynomial(field: PrimeField) -> FpPoly {
    let p = field.modulus();
    let m = (p - 1) / 2;
    let coeffs = (0..=m)
        .map(|i| {
            let c = binomial(BigInt::from(m), BigInt::from(i));
            field.from_bigint(&(&c * &c))
        })
        .collect();
    Poly::new(field, coeffs)
}

/// j λ^2 (1-λ)^2 - 256 (λ^2 - λ + 1)^3 as a polynomial in λ, for fixed j.
fn legendre_relation(field: PrimeField, j: u64) -> FpPoly {
    let lam = Poly::from_i64(field, &[0, 1]);
    let one_minus = Poly::from_i64(field, &[1, -1]);
    let quad = Poly::from_i64(field, &[1, -1, 1]);
    lam.pow(2)
        .mul(&one_minus.pow(2))
        .scale(&j)
        .sub(&quad.pow(3).scale(&field.from_i64(256)))
}

/// Lagrange interpolation through `(x_i, y_i)`.
fn interpolate(field: PrimeField, pts: &[(u64, u64)]) -> FpPoly {
    let mut out = Poly::zero(field);
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        let mut basis = Poly::one(field);
        let mut denom = field.one();
        for (k, &(xk, _)) in pts.iter().enumerate() {
            if k != i {
                basis = basis.mul(&Poly::linear(field, xk));
                denom = field.mul(&denom, &field.sub(&xi, &xk));
            }
        }
        let c = field.mul(&yi, &field.inv(&denom).expect("distinct nodes"));
        out = out.add(&basis.scale(&c));
    }
    out
}

/// S_p computed without modular forms. Errors above `bound`.
pub fn ss_oracle(p: u64, bound: u64) -> Result<FpPoly, SupersingularError> {
    if p < 5 || !is_prime(p) {
        return Err(SupersingularError::InvalidPrime(p));
    }
    if p > bound {
        return Err(SupersingularError::BoundExceeded { p, bound });
    }
    let field = PrimeField::new(p)?;
    let h = hasse_polynomial(field);
    // the resultant has degree <= deg h in j
    let pts: Vec<(u64, u64)> = (0..=h.deg() as u64)
        .map(|j| (j, h.resultant(&legendre_relation(field, j))))
        .collect();
    let res = interpolate(field, &pts);
    let special = [0, 1728 % p];
    let mut out = Poly::one(field);
    for f in factor(&res, 1)?.factors.into_iter().map(|(f, _)| f) {
        if f.deg() == 1 && special.contains(&field.neg(&f.coeff(0))) {
            continue;
        }
        out = out.mul(&f);
    }
    let in_fp = supersingular_in_fp(p);
    for s in special {
        if in_fp.contains(&s) {
            out = out.mul(&Poly::linear(field, s));
        }
    }
    // the two routes must agree on F_p-rational roots
    if linear_part(&out) != Poly::from_roots(field, &in_fp) {
        return Err(SupersingularError::OracleInconsistent(p));
    }
    Ok(out)
}
