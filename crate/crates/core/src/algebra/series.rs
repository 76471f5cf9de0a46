//! Truncated Laurent series in q with explicit precision bookkeeping.
//!
//! A [`Series`] knows its coefficients for every exponent `< precision`.
//! Arithmetic computes the exact precision of the result; nothing is ever
//! silently truncated or padded.

use std::fmt;

use super::field::{rat_is_p_integral, Field, PrimeField, Rationals};
use super::SeriesError;

/// Truncated q-series over a field, tagged with a weight and a level.
///
/// Invariants: `coeffs.len() == precision - valuation`, and the first stored
/// coefficient is nonzero unless the series is zero (in which case
/// `valuation == precision`).
#[derive(Clone, Debug, PartialEq)]
pub struct Series<F: Field> {
    field: F,
    valuation: i64,
    precision: i64,
    coeffs: Vec<F::Elem>,
    weight: i64,
    level: u64,
}

/// q-expansion with exact rational coefficients.
pub type QExpansion = Series<Rationals>;
/// q-expansion reduced modulo a prime.
pub type FpSeries = Series<PrimeField>;

impl<F: Field> Series<F> {
    /// Builds `sum coeffs[i] q^(start+i) + O(q^precision)`. Coefficients past
    /// `precision` are dropped; missing ones below it are zero.
    pub fn from_coeffs(field: F, start: i64, mut coeffs: Vec<F::Elem>, precision: i64) -> Self {
        assert!(precision >= start, "precision below starting exponent");
        let len = (precision - start) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, field.zero());
        let mut s = Series {
            field,
            valuation: start,
            precision,
            coeffs,
            weight: 0,
            level: 1,
        };
        s.normalize();
        s
    }

    pub fn zero(field: F, precision: i64) -> Self {
        Series {
            field,
            valuation: precision,
            precision,
            coeffs: Vec::new(),
            weight: 0,
            level: 1,
        }
    }

    pub fn one(field: F, precision: i64) -> Self {
        let one = field.one();
        Self::monomial(field, 0, one, precision)
    }

    pub fn monomial(field: F, exponent: i64, c: F::Elem, precision: i64) -> Self {
        if exponent >= precision {
            return Self::zero(field, precision);
        }
        Self::from_coeffs(field, exponent, vec![c], precision)
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_level(mut self, level: u64) -> Self {
        self.level = level;
        self
    }

    fn normalize(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| !self.field.is_zero(c))
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn valuation(&self) -> i64 {
        self.valuation
    }
    pub fn precision(&self) -> i64 {
        self.precision
    }
    /// Number of known coefficients starting at the valuation.
    pub fn relative_precision(&self) -> i64 {
        self.precision - self.valuation
    }
    pub fn weight(&self) -> i64 {
        self.weight
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^n`. Panics when `n` is not below the precision.
    pub fn coeff(&self, n: i64) -> F::Elem {
        assert!(
            n < self.precision,
            "coefficient q^{n} requested beyond precision {}",
            self.precision
        );
        if n < self.valuation {
            self.field.zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    /// Coefficients for exponents `start..end` (end clipped to the precision).
    pub fn coeffs_range(&self, start: i64, end: i64) -> Vec<F::Elem> {
        (start..end.min(self.precision)).map(|n| self.coeff(n)).collect()
    }

    pub fn leading_coefficient(&self) -> Option<&F::Elem> {
        self.coeffs.first()
    }

    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        let start = self.valuation.min(precision);
        let coeffs = self.coeffs_range(start, precision);
        Self::from_coeffs(self.field.clone(), start, coeffs, precision)
            .with_weight(self.weight)
            .with_level(self.level)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch);
        }
        if self.level != other.level {
            return Err(SeriesError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        if self.weight != other.weight {
            return Err(SeriesError::WeightMismatch(self.weight, other.weight));
        }
        let precision = self.precision.min(other.precision);
        let start = self.valuation.min(other.valuation).min(precision);
        let coeffs = (start..precision)
            .map(|n| {
                let a = self.coeff(n);
                let b = other.coeff(n);
                if subtract {
                    self.field.sub(&a, &b)
                } else {
                    self.field.add(&a, &b)
                }
            })
            .collect();
        Ok(Self::from_coeffs(self.field.clone(), start, coeffs, precision)
            .with_weight(self.weight)
            .with_level(self.level))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = self.field.neg(c);
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Self::from_coeffs(self.field.clone(), self.valuation, coeffs, self.precision)
            .with_weight(self.weight)
            .with_level(self.level)
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.valuation += k;
        out.precision += k;
        out
    }

    /// Product; weights add. Relative precision is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let rel = self.relative_precision().min(other.relative_precision());
        let valuation = self.valuation + other.valuation;
        let coeffs = self
            .field
            .convolve(&self.coeffs, &other.coeffs, rel.max(0) as usize);
        Ok(
            Self::from_coeffs(self.field.clone(), valuation, coeffs, valuation + rel)
                .with_weight(self.weight + other.weight)
                .with_level(self.level),
        )
    }

    /// Inverse of a series with nonzero leading coefficient.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        let n = self.relative_precision() as usize;
        let f = &self.field;
        let u0inv = f.inv(&self.coeffs[0]).ok_or(SeriesError::DivisionByZero)?;
        let mut inv = Vec::with_capacity(n);
        inv.push(u0inv.clone());
        for k in 1..n {
            let mut acc = f.zero();
            for i in 1..=k {
                if f.is_zero(&self.coeffs[i]) {
                    continue;
                }
                acc = f.add(&acc, &f.mul(&self.coeffs[i], &inv[k - i]));
            }
            inv.push(f.neg(&f.mul(&acc, &u0inv)));
        }
        let valuation = -self.valuation;
        Ok(
            Self::from_coeffs(f.clone(), valuation, inv, valuation + n as i64)
                .with_weight(-self.weight)
                .with_level(self.level),
        )
    }

    /// Quotient; the valuation of the divisor is subtracted and weights subtract.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        if other.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.field.clone(), self.precision - other.valuation)
                .with_weight(self.weight - other.weight)
                .with_level(self.level));
        }
        let rel = self.relative_precision().min(other.relative_precision());
        let inv = other.truncate(other.valuation + rel).inverse()?;
        let a = self.truncate(self.valuation + rel);
        a.mul(&inv)
    }

    pub fn pow(&self, mut e: u32) -> Result<Self, SeriesError> {
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| {
            Self::one(self.field.clone(), self.relative_precision().max(0))
                .with_level(self.level)
        }))
    }

    /// The operator q d/dq: multiplies the coefficient of `q^n` by n.
    /// Precision is preserved; the weight is bumped by 2.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = self.valuation + i as i64;
                self.field.mul(c, &self.field.from_i64(n))
            })
            .collect();
        Self::from_coeffs(self.field.clone(), self.valuation, coeffs, self.precision)
            .with_weight(self.weight + 2)
            .with_level(self.level)
    }

    /// True when both series agree for every exponent below `upto`.
    pub fn agrees_with(&self, other: &Self, upto: i64) -> bool {
        let end = upto.min(self.precision).min(other.precision);
        let start = self.valuation.min(other.valuation);
        (start..end).all(|n| self.coeff(n) == other.coeff(n))
    }

    /// Applies a coefficient map into another field.
    pub fn try_map<G: Field, E>(
        &self,
        target: G,
        mut f: impl FnMut(&F::Elem) -> Result<G::Elem, E>,
    ) -> Result<Series<G>, E> {
        let coeffs = self.coeffs.iter().map(&mut f).collect::<Result<Vec<_>, E>>()?;
        Ok(Series::from_coeffs(target, self.valuation, coeffs, self.precision)
            .with_weight(self.weight)
            .with_level(self.level))
    }
}

impl QExpansion {
    /// True iff no coefficient has a denominator divisible by p.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs.iter().all(|c| rat_is_p_integral(c, p))
    }

    /// Reduction modulo p; fails if some coefficient is not p-integral.
    pub fn reduce_mod(&self, fp: &PrimeField) -> Result<FpSeries, SeriesError> {
        self.try_map(*fp, |c| {
            fp.reduce_rat(c)
                .ok_or(SeriesError::NotIntegral(fp.modulus()))
        })
    }
}

impl<F: Field> fmt::Display for Series<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.field.is_zero(c) {
                continue;
            }
            let n = self.valuation + i as i64;
            let s = self.field.render(c);
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match n {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{n}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        if first {
            write!(f, "O(q^{})", self.precision)
        } else {
            write!(f, " + O(q^{})", self.precision)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Rat;
    use num_bigint::BigInt;

    fn q(coeffs: &[i64], start: i64, prec: i64) -> QExpansion {
        let c = coeffs.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect();
        Series::from_coeffs(Rationals, start, c, prec)
    }

    #[test]
    fn self_division_is_one() {
        let d = q(&[1, -24, 252, -1472], 1, 5);
        let one = d.div(&d).unwrap();
        assert_eq!(one.valuation(), 0);
        assert_eq!(one.precision(), 4);
        assert_eq!(one.coeffs_range(0, 4), q(&[1, 0, 0, 0], 0, 4).coeffs_range(0, 4));
    }

    #[test]
    fn precision_rules() {
        let a = q(&[1, 2, 3], 2, 5); // rel 3
        let b = q(&[1, 1, 1, 1, 1], 0, 5); // rel 5
        let m = a.mul(&b).unwrap();
        assert_eq!((m.valuation(), m.precision()), (2, 5));
        let d = b.div(&a).unwrap();
        assert_eq!((d.valuation(), d.precision()), (-2, 1));
        let s = a.add(&b).unwrap();
        assert_eq!(s.precision(), 5);
    }

    #[test]
    fn leading_cancellation_renormalizes() {
        let a = q(&[1, 2, 3], 0, 3);
        let b = q(&[1, 5, 0], 0, 3);
        let d = a.sub(&b).unwrap();
        assert_eq!(d.valuation(), 1);
        assert_eq!(d.coeff(1), Rat::from_integer((-3).into()));
    }

    #[test]
    fn division_by_zero_series() {
        let a = q(&[1], 0, 3);
        let z = Series::zero(Rationals, 3);
        assert_eq!(a.div(&z), Err(SeriesError::DivisionByZero));
    }

    #[test]
    fn mismatched_moduli_rejected() {
        let f67 = PrimeField::new(67).unwrap();
        let f71 = PrimeField::new(71).unwrap();
        let a = Series::from_coeffs(f67, 0, vec![1, 2], 2);
        let b = Series::from_coeffs(f71, 0, vec![1, 2], 2);
        assert_eq!(a.mul(&b), Err(SeriesError::FieldMismatch));
    }

    #[test]
    fn mismatched_levels_rejected() {
        let a = q(&[1], 0, 3).with_level(67);
        let b = q(&[1], 0, 3);
        assert!(matches!(a.add(&b), Err(SeriesError::LevelMismatch(67, 1))));
    }

    #[test]
    fn theta_multiplies_by_exponent() {
        let d = q(&[1, -24, 252, -1472], 1, 5);
        assert_eq!(d.theta(), q(&[1, -48, 756, -5888], 1, 5).with_weight(2));
    }

    #[test]
    fn p_integrality() {
        let half = Rat::new(1.into(), 2.into());
        let three_quarters = Rat::new(3.into(), 4.into());
        let s = Series::from_coeffs(Rationals, 0, vec![Rat::from_integer(1.into()), half, three_quarters], 3);
        assert!(s.is_p_integral(67));
        let t = Series::from_coeffs(
            Rationals,
            0,
            vec![Rat::from_integer(1.into()), Rat::new(1.into(), 67.into())],
            2,
        );
        assert!(!t.is_p_integral(67));
        assert!(t.reduce_mod(&PrimeField::new(67).unwrap()).is_err());
    }

    #[test]
    fn display() {
        let f = q(&[1, 0, -3, -3], 1, 5);
        assert_eq!(f.to_string(), "q - 3*q^3 - 3*q^4 + O(q^5)");
    }
}
