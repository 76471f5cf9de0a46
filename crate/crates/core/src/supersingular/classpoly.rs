//! Hilbert class polynomials by evaluating j at CM points in fixed-point
//! arithmetic, and the fixed-point polynomial H_p of w_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::split::SupersingularSplit;
use super::SupersingularError;
use crate::algebra::bigfloat::{Complex, Fixed};
use crate::algebra::factor::squarefree_decomposition;
use crate::algebra::field::{Field, PrimeField, Rat, Rationals};
use crate::algebra::poly::Poly;
use crate::algebra::FpPoly;

/// Largest allowed rounding residual.
pub const ROUNDING_TOLERANCE: f64 = 0.01;
/// Escalation cap as a multiple of the starting precision.
pub const DEFAULT_MAX_FACTOR: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPolyData {
    pub d: u64,
    pub h: usize,
    pub reduced_forms: Vec<(i64, i64, i64)>,
    /// Integer coefficients, constant term first.
    pub coeffs: Vec<BigInt>,
    pub float_precision_bits: u32,
}

impl ClassPolyData {
    pub fn poly(&self) -> Poly<Rationals> {
        Poly::new(
            Rationals,
            self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect(),
        )
    }

    pub fn reduce_mod(&self, field: PrimeField) -> FpPoly {
        Poly::new(field, self.coeffs.iter().map(|c| field.from_bigint(c)).collect())
    }
}

/// Primitive reduced forms (a, b, c) of discriminant -D: |b| ≤ a ≤ c, with
/// b ≥ 0 when |b| = a or a = c.
pub fn reduced_forms(d: u64) -> Result<Vec<(i64, i64, i64)>, SupersingularError> {
    if d == 0 || !(d % 4 == 0 || d % 4 == 3) {
        return Err(SupersingularError::InvalidDiscriminant(d));
    }
    let d = d as i64;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in (1 - a)..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    Ok(out)
}

/// Bits of |j| at the CM point of the form, roughly π√D/(a ln 2).
fn j_size_bits(d: u64, a: i64) -> f64 {
    std::f64::consts::PI * (d as f64).sqrt() / (a as f64 * std::f64::consts::LN_2)
}

/// Heuristic starting precision for ℋ_D.
pub fn start_bits(d: u64) -> Result<u32, SupersingularError> {
    let forms = reduced_forms(d)?;
    let sum: f64 = forms.iter().map(|&(a, _, _)| j_size_bits(d, a)).sum();
    Ok(64 + sum.ceil() as u32 + 4 * forms.len() as u32)
}

fn sigma3(n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut k = 1;
    while k * k <= n {
        if n % k == 0 {
            s += BigInt::from(k).pow(3);
            let other = n / k;
            if other != k {
                s += BigInt::from(other).pow(3);
            }
        }
        k += 1;
    }
    s
}

/// j((-b + √-D)/(2a)) = E_4^3 / (q ∏(1-q^n)^24).
fn j_at_form(w: &Fixed, d: u64, a: i64, b: i64) -> Complex {
    let pi = w.pi();
    let sqrt_d = w.sqrt(&w.from_i64(d as i64));
    let t = w.div_int(&w.mul(&pi, &sqrt_d), a);
    let angle = w.div_int(&(&pi * BigInt::from(-b)), a);
    let q = w.c_polar(&w.exp(&-t.clone()), &angle);
    let q_inv = w.c_polar(&w.exp(&t), &-angle);
    let t_bits = j_size_bits(d, a);
    let terms = ((w.bits as f64 + 64.0) / t_bits).ceil() as u64 + 8;

    let mut powers = Vec::with_capacity(terms as usize + 1);
    powers.push(w.c_one());
    for n in 1..=terms as usize {
        let next = w.c_mul(&powers[n - 1], &q);
        powers.push(next);
    }
    let mut e4 = w.c_one();
    for n in 1..=terms {
        let c = sigma3(n) * 240;
        e4 = w.c_add(&e4, &w.c_scale_int(&powers[n as usize], &c));
    }
    // Euler's pentagonal series for ∏(1 - q^n)
    let mut eta = w.c_one();
    let mut k = 1u64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if e1 > terms {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        eta = w.c_add(&eta, &w.c_scale_int(&powers[e1 as usize], &BigInt::from(sign)));
        let e2 = k * (3 * k + 1) / 2;
        if e2 <= terms {
            eta = w.c_add(&eta, &w.c_scale_int(&powers[e2 as usize], &BigInt::from(sign)));
        }
        k += 1;
    }
    let num = w.c_mul(&w.c_pow(&e4, 3), &q_inv);
    w.c_div(&num, &w.c_pow(&eta, 24))
}

/// Rounds the product of (x - j_i); None if any coefficient is not within
/// tolerance of an integer.
fn round_product(w: &Fixed, roots: &[Complex]) -> Option<Vec<BigInt>> {
    let mut poly = vec![w.c_one()];
    for r in roots {
        let mut next = vec![w.c_zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = w.c_add(&next[i + 1], c);
            next[i] = w.c_sub(&next[i], &w.c_mul(c, r));
        }
        poly = next;
    }
    poly.iter()
        .map(|c| {
            let ok = w.distance_to_integer(&c.re) < ROUNDING_TOLERANCE
                && w.to_f64(&c.im.abs()) < ROUNDING_TOLERANCE;
            ok.then(|| w.round(&c.re))
        })
        .collect()
}

/// ℋ_D with an explicit precision schedule.
pub fn class_poly_with(d: u64, start: u32, max_factor: u32) -> Result<ClassPolyData, SupersingularError> {
    let forms = reduced_forms(d)?;
    let cap = start.saturating_mul(max_factor.max(1));
    let mut bits = start;
    loop {
        let w = Fixed::new(bits);
        let roots: Vec<Complex> = forms
            .par_iter()
            .map(|&(a, b, _)| j_at_form(&w, d, a, b))
            .collect();
        if let Some(coeffs) = round_product(&w, &roots) {
            return Ok(ClassPolyData {
                d,
                h: forms.len(),
                reduced_forms: forms,
                coeffs,
                float_precision_bits: bits,
            });
        }
        if bits >= cap {
            return Err(SupersingularError::PrecisionExhausted { d, bits });
        }
        bits = (bits * 2).min(cap);
    }
}

/// ℋ_D for a discriminant -D, with the default precision schedule.
pub fn class_poly(d: u64) -> Result<ClassPolyData, SupersingularError> {
    class_poly_with(d, start_bits(d)?, DEFAULT_MAX_FACTOR)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointPoly {
    pub p: u64,
    pub parts: Vec<ClassPolyData>,
    /// Integer coefficients, constant term first.
    pub coeffs: Vec<BigInt>,
}

impl FixedPointPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn reduce_mod(&self, field: PrimeField) -> FpPoly {
        Poly::new(field, self.coeffs.iter().map(|c| field.from_bigint(c)).collect())
    }
}

/// Discriminants whose class polynomials make up H_p.
pub fn fixed_point_discriminants(p: u64) -> Vec<u64> {
    if p % 4 == 1 {
        vec![4 * p]
    } else {
        vec![p, 4 * p]
    }
}

/// H_p from already computed class polynomials (in the order of
/// `fixed_point_discriminants`).
pub fn fixed_point_from_parts(p: u64, parts: Vec<ClassPolyData>) -> FixedPointPoly {
    let prod = parts
        .iter()
        .fold(Poly::one(Rationals), |acc, c| acc.mul(&c.poly()));
    let coeffs = prod.coeffs().iter().map(|c| c.to_integer()).collect();
    FixedPointPoly { p, parts, coeffs }
}

/// H_p = ℋ_{4p} if p ≡ 1 mod 4, else ℋ_p ℋ_{4p}.
pub fn fixed_point_poly(p: u64) -> Result<FixedPointPoly, SupersingularError> {
    let parts = fixed_point_discriminants(p)
        .into_iter()
        .map(class_poly)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(fixed_point_from_parts(p, parts))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedLinearCheck {
    pub h_mod_p: FpPoly,
    pub s_l_squared: FpPoly,
    pub pass: bool,
    pub s_l_squarefree: bool,
    pub degree_identity: bool,
}

/// H_p mod p against (S_p^(l))^2.
pub fn verify_fixedlinear(h: &FixedPointPoly, split: &SupersingularSplit) -> FixedLinearCheck {
    let field = *split.s_l.field();
    let h_mod_p = h.reduce_mod(field);
    let s_l_squared = split.s_l.mul(&split.s_l);
    let s_l_squarefree = squarefree_decomposition(&split.s_l)
        .iter()
        .all(|(_, m)| *m == 1);
    FixedLinearCheck {
        pass: h_mod_p == s_l_squared,
        degree_identity: h.degree() == 2 * split.s_l.deg(),
        h_mod_p,
        s_l_squared,
        s_l_squarefree,
    }
}
