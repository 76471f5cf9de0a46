//! Level-one modular forms: Eisenstein series, Δ, j, the Miller basis and
//! divisor polynomials.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::field::{Field, PrimeField, Rat, Rationals};
use crate::algebra::poly::Poly;
use crate::algebra::series::{QExpansion, Series};
use crate::algebra::{FpPoly, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Level1Error {
    #[error("weight {0} is not an even integer >= 4 (or 0)")]
    InvalidWeight(i64),
    #[error("quotient by Delta^m E~ is not a polynomial in j (residual at q^{exponent})")]
    NonPolynomialQuotient { exponent: i64 },
    #[error("need precision {needed} for the divisor polynomial, have {got}")]
    PrecisionTooSmall { needed: i64, got: i64 },
    #[error("the zero form has no divisor polynomial")]
    ZeroForm,
    #[error("form must have level 1, found level {0}")]
    NotLevelOne(u64),
    #[error("leading coefficient is not 1")]
    NotMonic,
    #[error("Eisenstein coefficient -2k/B_k is not defined in the coefficient field (k = {0})")]
    EisensteinNotIntegral(i64),
    #[error("product and closed form of G_p disagree for p = {p}, g = {g}")]
    ClosedFormMismatch { p: u64, g: u64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The correction factor E~_k = E_4^a E_6^b and the exponent m(k), with
/// `k = 12 m + 4 a + 6 b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EtildeSpec {
    pub k: i64,
    pub a: u32,
    pub b: u32,
    pub m: i64,
}

pub fn etilde_spec(k: i64) -> Result<EtildeSpec, Level1Error> {
    if k < 0 || k % 2 != 0 || k == 2 {
        return Err(Level1Error::InvalidWeight(k));
    }
    let (a, b) = match k % 12 {
        0 => (0, 0),
        2 => (2, 1),
        4 => (1, 0),
        6 => (0, 1),
        8 => (2, 0),
        _ => (1, 1),
    };
    let m = if k % 12 == 2 { k / 12 - 1 } else { k / 12 };
    Ok(EtildeSpec { k, a, b, m })
}

pub fn m_of(k: i64) -> Result<i64, Level1Error> {
    Ok(etilde_spec(k)?.m)
}

/// Exponents `(delta_rho, delta_i)` with F~(f^2) = x^dr (x-1728)^di F~(f)^2
/// for a form of weight k.
pub fn square_delta(k: i64) -> (u32, u32) {
    match k.rem_euclid(12) {
        2 => (1, 1),
        6 | 10 => (0, 1),
        8 => (1, 0),
        _ => (0, 0),
    }
}

fn bernoulli_cache() -> &'static RwLock<Vec<Rat>> {
    static CACHE: OnceLock<RwLock<Vec<Rat>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rat::from_integer(1.into())]))
}

/// Bernoulli number B_n (with B_1 = -1/2).
pub fn bernoulli(n: usize) -> Rat {
    if let Some(b) = bernoulli_cache().read().expect("cache lock").get(n) {
        return b.clone();
    }
    let mut cache = bernoulli_cache().write().expect("cache lock");
    while cache.len() <= n {
        let m = cache.len();
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = Rat::zero();
        for (k, bk) in cache.iter().enumerate() {
            if !bk.is_zero() {
                acc += Rat::from_integer(binomial(BigInt::from(m + 1), BigInt::from(k))) * bk;
            }
        }
        cache.push(-acc / Rat::from_integer(BigInt::from(m + 1)));
    }
    cache[n].clone()
}

/// `-2k / B_k`, the coefficient multiplying sigma_{k-1} in E_k.
pub fn eisenstein_constant(k: i64) -> Rat {
    let b = bernoulli(k as usize);
    Rat::from_integer(BigInt::from(-2 * k)) / b
}

/// E_k over an arbitrary field, to the given precision.
pub fn eisenstein_in<F: Field>(field: F, k: i64, prec: i64) -> Result<Series<F>, Level1Error> {
    if k < 4 || k % 2 != 0 {
        return Err(Level1Error::InvalidWeight(k));
    }
    let c = field
        .from_rat(&eisenstein_constant(k))
        .ok_or(Level1Error::EisensteinNotIntegral(k))?;
    let n = prec.max(0) as usize;
    let mut coeffs = vec![field.zero(); n];
    if n > 0 {
        coeffs[0] = field.one();
    }
    if !field.is_zero(&c) {
        let mut sigma = vec![field.zero(); n];
        for d in 1..n {
            let pw = field.pow(&field.from_i64(d as i64), (k - 1) as u64);
            let mut m = d;
            while m < n {
                sigma[m] = field.add(&sigma[m], &pw);
                m += d;
            }
        }
        for i in 1..n {
            coeffs[i] = field.mul(&c, &sigma[i]);
        }
    }
    Ok(Series::from_coeffs(field, 0, coeffs, prec).with_weight(k))
}

fn eisenstein_cache() -> &'static RwLock<HashMap<i64, QExpansion>> {
    static CACHE: OnceLock<RwLock<HashMap<i64, QExpansion>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// E_k with exact rational coefficients.
pub fn eisenstein(k: i64, prec: i64) -> Result<QExpansion, Level1Error> {
    if let Some(e) = eisenstein_cache().read().expect("cache lock").get(&k) {
        if e.precision() >= prec {
            return Ok(e.truncate(prec));
        }
    }
    let e = eisenstein_in(Rationals, k, prec)?;
    eisenstein_cache()
        .write()
        .expect("cache lock")
        .insert(k, e.clone());
    Ok(e)
}

/// Δ = q prod (1 - q^n)^24 over an arbitrary field.
pub fn delta_in<F: Field>(field: F, prec: i64) -> Series<F> {
    if prec <= 1 {
        return Series::zero(field, prec.max(1)).with_weight(12);
    }
    // Euler's pentagonal series for prod (1 - q^n), to relative precision prec - 1.
    let rel = (prec - 1) as usize;
    let mut euler = vec![field.zero(); rel];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = (kk * (3 * kk - 1) / 2) as usize;
            if e < rel {
                any = true;
                let s = if kk % 2 == 0 { field.one() } else { field.neg(&field.one()) };
                euler[e] = s;
            }
        }
        if !any && k > 0 {
            break;
        }
        k += 1;
    }
    let e = Series::from_coeffs(field, 0, euler, rel as i64);
    let e24 = e.pow(24).expect("same field");
    e24.shift(1).with_weight(12)
}

pub fn delta(prec: i64) -> QExpansion {
    delta_in(Rationals, prec)
}

/// j = E_4^3 / Δ, known for exponents below `prec`.
pub fn j_in<F: Field>(field: F, prec: i64) -> Result<Series<F>, Level1Error> {
    let e4 = eisenstein_in(field.clone(), 4, prec + 2)?;
    let d = delta_in(field, prec + 2);
    let j = e4.pow(3)?.div(&d)?;
    Ok(j.truncate(prec))
}

pub fn j_function(prec: i64) -> Result<QExpansion, Level1Error> {
    j_in(Rationals, prec)
}

/// E~_k over a field, to the given precision.
pub fn etilde_in<F: Field>(field: F, k: i64, prec: i64) -> Result<Series<F>, Level1Error> {
    let spec = etilde_spec(k)?;
    let mut out = Series::one(field.clone(), prec);
    if spec.a > 0 {
        out = out.mul(&eisenstein_in(field.clone(), 4, prec)?.pow(spec.a)?)?;
    }
    if spec.b > 0 {
        out = out.mul(&eisenstein_in(field, 6, prec)?)?;
    }
    Ok(out)
}

/// Smallest absolute precision of a weight-k form from which the divisor
/// polynomial can be extracted with one residual check coefficient.
pub fn minimal_precision(k: i64) -> Result<i64, Level1Error> {
    Ok(m_of(k)? + 2)
}

/// Working precision `m(k) + slack` (never below the minimum).
pub fn extraction_precision(k: i64, slack: i64) -> Result<i64, Level1Error> {
    let m = m_of(k)?;
    Ok((m + slack).max(m + 2))
}

/// The divisor polynomial F~(f, x): the unique polynomial with
/// F~(f, j) = f / (Δ^m(k) E~_k).
///
/// The top coefficient is peeled off against powers of j until nothing is
/// left; any leftover means the input was not a level-one form.
pub fn divisor_polynomial<F: Field>(f: &Series<F>) -> Result<Poly<F>, Level1Error> {
    let k = f.weight();
    let spec = etilde_spec(k)?;
    let m = spec.m;
    if f.level() != 1 {
        return Err(Level1Error::NotLevelOne(f.level()));
    }
    if f.is_zero() {
        return Err(Level1Error::ZeroForm);
    }
    let needed = m + 2;
    if f.precision() < needed {
        return Err(Level1Error::PrecisionTooSmall {
            needed,
            got: f.precision(),
        });
    }
    if f.valuation() < 0 {
        return Err(Level1Error::NonPolynomialQuotient {
            exponent: f.valuation() - m,
        });
    }
    let field = f.field().clone();
    let rel = f.relative_precision();
    let denom = delta_in(field.clone(), rel + 1)
        .pow(m as u32)?
        .mul(&etilde_in(field.clone(), k, rel)?)?;
    let mut g = f.div(&denom)?;
    let prec_g = g.precision();
    debug_assert_eq!(prec_g, f.precision() - m);

    let j = j_in(field.clone(), prec_g + m - 1)?;
    let mut powers = Vec::with_capacity(m as usize + 1);
    powers.push(Series::one(field.clone(), prec_g + m));
    for t in 1..=m as usize {
        let next = powers[t - 1].mul(&j)?;
        powers.push(next);
    }

    if g.valuation() < -m {
        return Err(Level1Error::NonPolynomialQuotient {
            exponent: g.valuation(),
        });
    }
    let mut coeffs = vec![field.zero(); m as usize + 1];
    for t in (0..=m).rev() {
        let c = g.coeff(-t);
        if field.is_zero(&c) {
            continue;
        }
        g = g.sub(&powers[t as usize].scale(&c))?;
        coeffs[t as usize] = c;
    }
    if !g.is_zero() {
        return Err(Level1Error::NonPolynomialQuotient {
            exponent: g.valuation(),
        });
    }
    Ok(Poly::new(field, coeffs))
}

fn monomial_exponents(k: i64) -> Option<(u32, u32)> {
    // 4a + 6b = k with b in {0, 1}
    for b in 0..2i64 {
        let rest = k - 6 * b;
        if rest >= 0 && rest % 4 == 0 {
            return Some(((rest / 4) as u32, b as u32));
        }
    }
    None
}

/// Dimension of M_k for even k >= 0.
pub fn dim_mk(k: i64) -> usize {
    if k < 0 || k % 2 != 0 || k == 2 {
        return 0;
    }
    if k % 12 == 2 {
        (k / 12) as usize
    } else {
        (k / 12) as usize + 1
    }
}

/// Miller basis h_0, ..., h_d of M_k over any field: h_i = q^i + O(q^(d+1)).
pub fn miller_basis_in<F: Field>(field: F, k: i64, prec: i64) -> Result<Vec<Series<F>>, Level1Error> {
    if k < 4 || k % 2 != 0 {
        return Err(Level1Error::InvalidWeight(k));
    }
    let dim = dim_mk(k);
    let e4 = eisenstein_in(field.clone(), 4, prec)?;
    let e6 = eisenstein_in(field.clone(), 6, prec)?;
    let d = delta_in(field.clone(), prec);
    let mut basis: Vec<Series<F>> = Vec::with_capacity(dim);
    for i in 0..dim as i64 {
        let (a, b) = monomial_exponents(k - 12 * i).ok_or(Level1Error::InvalidWeight(k))?;
        let mut mono = Series::one(field.clone(), prec);
        if i > 0 {
            mono = mono.mul(&d.pow(i as u32)?)?;
        }
        if a > 0 {
            mono = mono.mul(&e4.pow(a)?)?;
        }
        if b > 0 {
            mono = mono.mul(&e6)?;
        }
        basis.push(mono.truncate(prec));
    }
    // Clear the coefficients of q^(i+1), ..., q^d from h_i.
    for i in (0..dim).rev() {
        for jx in i + 1..dim {
            let c = basis[i].coeff(jx as i64);
            if !field.is_zero(&c) {
                basis[i] = basis[i].sub(&basis[jx].scale(&c))?;
            }
        }
    }
    Ok(basis)
}

pub fn miller_basis(k: i64, prec: i64) -> Result<Vec<QExpansion>, Level1Error> {
    miller_basis_in(Rationals, k, prec)
}

/// The factor C_p(k; x) relating F~(f E_{p-1}) to F~(E_{p-1}) F~(f).
pub fn cp_factor(k: i64, p: u64) -> Result<FpPoly, Level1Error> {
    let field = PrimeField::new(p).map_err(|_| Level1Error::InvalidWeight(k))?;
    Ok(cp_factor_in(field, k))
}

fn cp_factor_in(field: PrimeField, k: i64) -> FpPoly {
    let x = Poly::x(field);
    let x1728 = Poly::from_i64(field, &[-1728, 1]);
    let key = (k.rem_euclid(12), field.modulus() % 12);
    match key {
        (2, 5) | (8, 5) | (8, 11) => x,
        (2, 7) | (6, 7) | (10, 7) | (6, 11) | (10, 11) => x1728,
        (2, 11) => x.mul(&x1728),
        _ => Poly::one(field),
    }
}

/// Closed form x^ceil((g^2-g)/3) (x-1728)^((g^2-g)/2), gated by p mod 12.
fn gp_closed(g: u64, p: u64, field: PrimeField) -> FpPoly {
    let x = Poly::x(field);
    let x1728 = Poly::from_i64(field, &[-1728, 1]);
    let n = g * g - g;
    let rho = || x.pow(n.div_ceil(3));
    let i = || x1728.pow(n / 2);
    match p % 12 {
        1 => Poly::one(field),
        5 => rho(),
        7 => i(),
        _ => rho().mul(&i()),
    }
}

/// G_p(x) = prod_{s=1}^{g^2-g} C_p(2g(g+p) + (g^2-g-s)(p-1); x), checked
/// against its closed form.
pub fn gp_poly(g: u64, p: u64) -> Result<FpPoly, Level1Error> {
    let field = PrimeField::new(p).map_err(|_| Level1Error::InvalidWeight(0))?;
    let n = g * g - g;
    // C_p takes only four values; multiply them out by multiplicity.
    let mut counts: Vec<(FpPoly, u64)> = Vec::new();
    for s in 1..=n {
        let k = 2 * g * (g + p) + (n - s) * (p - 1);
        let c = cp_factor_in(field, k as i64);
        match counts.iter_mut().find(|(f, _)| *f == c) {
            Some((_, e)) => *e += 1,
            None => counts.push((c, 1)),
        }
    }
    let prod = counts
        .iter()
        .fold(Poly::one(field), |acc, (f, e)| acc.mul(&f.pow(*e)));
    let closed = gp_closed(g, p, field);
    if prod != closed {
        return Err(Level1Error::ClosedFormMismatch { p, g });
    }
    Ok(closed)
}

/// Outcome of checking F~(f^2) against x^dr (x-1728)^di F~(f)^2.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareDivisorCheck<F: Field> {
    pub weight: i64,
    pub delta: (u32, u32),
    pub lhs: Poly<F>,
    pub rhs: Poly<F>,
    pub pass: bool,
}

pub fn square_divisor_relation<F: Field>(f: &Series<F>) -> Result<SquareDivisorCheck<F>, Level1Error> {
    let k = f.weight();
    let field = f.field().clone();
    let single = divisor_polynomial(f)?;
    let sq = f.mul(f)?;
    let lhs = divisor_polynomial(&sq)?;
    let (dr, di) = square_delta(k);
    let x = Poly::x(field.clone());
    let x1728 = Poly::from_i64(field, &[-1728, 1]);
    let rhs = x.pow(dr as u64).mul(&x1728.pow(di as u64)).mul(&single.mul(&single));
    let pass = lhs == rhs;
    Ok(SquareDivisorCheck {
        weight: k,
        delta: (dr, di),
        lhs,
        rhs,
        pass,
    })
}

/// Checks that h = Δ^m E~_k F~(h, j) reproduces the input through its precision.
pub fn reconstructs<F: Field>(h: &Series<F>) -> Result<bool, Level1Error> {
    let k = h.weight();
    let m = etilde_spec(k)?.m;
    let poly = divisor_polynomial(h)?;
    let field = h.field().clone();
    let prec = h.precision() + m + 2;
    let j = j_in(field.clone(), prec)?;
    let mut sum = Series::zero(field.clone(), prec - m + 1);
    let mut jt = Series::one(field.clone(), prec + 1);
    for c in poly.coeffs() {
        sum = sum.add(&jt.scale(c))?;
        jt = jt.mul(&j)?;
    }
    let back = sum
        .mul(&delta_in(field.clone(), prec + 2).pow(m as u32)?)?
        .mul(&etilde_in(field, k, prec + 1)?)?;
    Ok(back.agrees_with(h, h.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ints(s: &QExpansion, lo: i64, hi: i64) -> Vec<i64> {
        s.coeffs_range(lo, hi)
            .iter()
            .map(|c| {
                assert!(c.is_integer());
                c.to_integer().to_i64().unwrap()
            })
            .collect()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), Rat::new((-1).into(), 2.into()));
        assert_eq!(bernoulli(4), Rat::new((-1).into(), 30.into()));
        assert_eq!(bernoulli(6), Rat::new(1.into(), 42.into()));
        assert_eq!(bernoulli(12), Rat::new((-691).into(), 2730.into()));
        assert!(bernoulli(13).is_zero());
    }

    #[test]
    fn eisenstein_leading_terms() {
        assert_eq!(ints(&eisenstein(4, 4).unwrap(), 0, 4), vec![1, 240, 2160, 6720]);
        assert_eq!(ints(&eisenstein(6, 3).unwrap(), 0, 3), vec![1, -504, -16632]);
        for k in (4..40).step_by(2) {
            assert_eq!(eisenstein(k, 2).unwrap().coeff(0), Rat::from_integer(1.into()));
        }
    }

    #[test]
    fn delta_and_j() {
        let d = delta(6);
        assert_eq!(ints(&d, 1, 6), vec![1, -24, 252, -1472, 4830]);
        let j = j_function(3).unwrap();
        assert_eq!(j.valuation(), -1);
        assert_eq!(ints(&j, -1, 3), vec![1, 744, 196884, 21493760]);
        // the defining identity E4^3 = (E4^3 - E6^2)/1728 * j
        let e4 = eisenstein(4, 12).unwrap();
        let e6 = eisenstein(6, 12).unwrap();
        let direct = e4.pow(3).unwrap().sub(&e6.pow(2).unwrap()).unwrap().scale(&Rat::new(1.into(), 1728.into()));
        assert!(direct.agrees_with(&delta(12), 12));
    }

    #[test]
    fn delta_matches_mod_p_reduction() {
        let f = PrimeField::new(67).unwrap();
        let over_q = delta(40).reduce_mod(&f).unwrap();
        assert_eq!(delta_in(f, 40), over_q);
    }

    #[test]
    fn etilde_table() {
        for k in (4..200).step_by(2) {
            let s = etilde_spec(k).unwrap();
            assert_eq!(k, 12 * s.m + 4 * s.a as i64 + 6 * s.b as i64, "k = {k}");
        }
        assert_eq!(etilde_spec(14).unwrap().m, 0);
        assert_eq!(etilde_spec(68).unwrap().m, 5);
        assert!(etilde_spec(7).is_err());
    }

    #[test]
    fn divisor_polynomial_simple_cases() {
        let d = delta(10);
        assert_eq!(divisor_polynomial(&d).unwrap(), Poly::one(Rationals));
        let e43 = eisenstein(4, 10).unwrap().pow(3).unwrap();
        assert_eq!(divisor_polynomial(&e43).unwrap(), Poly::x(Rationals));
        let e4 = eisenstein(4, 4).unwrap();
        assert_eq!(divisor_polynomial(&e4).unwrap(), Poly::one(Rationals));
    }

    #[test]
    fn divisor_polynomial_rejects_non_forms() {
        // q + q^2 + ... of weight 12 is not Δ.
        let fake = Series::from_coeffs(Rationals, 1, vec![Rat::from_integer(1.into()); 8], 9).with_weight(12);
        assert!(matches!(
            divisor_polynomial(&fake),
            Err(Level1Error::NonPolynomialQuotient { .. })
        ));
        let short = delta(2);
        assert!(matches!(
            divisor_polynomial(&short.with_weight(24)),
            Err(Level1Error::PrecisionTooSmall { .. })
        ));
    }

    #[test]
    fn miller_basis_shape() {
        let b12 = miller_basis(12, 8).unwrap();
        assert_eq!(b12.len(), 2);
        assert!(b12[1].agrees_with(&delta(8), 8));
        let b68 = miller_basis(68, 12).unwrap();
        assert_eq!(b68.len(), 6);
        for (i, h) in b68.iter().enumerate() {
            assert_eq!(h.valuation(), i as i64);
            for jx in 0..6 {
                let expect = if jx == i { 1 } else { 0 };
                assert_eq!(h.coeff(jx as i64), Rat::from_integer(expect.into()));
            }
            assert!(h.coeffs_range(0, 12).iter().all(|c| c.is_integer()));
        }
    }

    #[test]
    fn cp_table() {
        let f = PrimeField::new(23).unwrap();
        assert_eq!(cp_factor(2, 23).unwrap(), Poly::from_i64(f, &[0, -1728, 1]));
        let f5 = PrimeField::new(17).unwrap();
        assert_eq!(cp_factor(8, 17).unwrap(), Poly::x(f5));
        assert_eq!(cp_factor(0, 13).unwrap(), Poly::one(PrimeField::new(13).unwrap()));
    }

    #[test]
    fn gp_cases() {
        let f = PrimeField::new(67).unwrap();
        assert_eq!(gp_poly(2, 67).unwrap(), Poly::from_i64(f, &[14, 1]));
        for g in 2..10 {
            assert!(gp_poly(g, 13).unwrap().is_one());
        }
        let f11 = PrimeField::new(11).unwrap();
        assert_eq!(
            gp_poly(2, 11).unwrap(),
            Poly::from_i64(f11, &[0, -1728, 1])
        );
    }

    #[test]
    fn lemma_cases_small() {
        let d = delta(30);
        assert!(square_divisor_relation(&d).unwrap().pass);
        let e6d = eisenstein(6, 30).unwrap().mul(&d).unwrap();
        let chk = square_divisor_relation(&e6d).unwrap();
        assert!(chk.pass);
        assert_eq!(chk.delta, (0, 1));
        let e4d = eisenstein(4, 30).unwrap().mul(&d).unwrap();
        assert!(square_divisor_relation(&e4d).unwrap().pass);
    }
}
