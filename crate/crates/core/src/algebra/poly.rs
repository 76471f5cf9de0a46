//! Dense univariate polynomials over a [`Field`].

use std::fmt;

use super::field::Field;
use super::AlgebraError;

/// Polynomial with coefficients stored low degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_i64(field: F, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&n| field.from_i64(n)).collect();
        Self::new(field, c)
    }

    pub fn zero(field: F) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Self::new(field, vec![one])
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// The polynomial x.
    pub fn x(field: F) -> Self {
        Self::monomial(field.clone(), 1, field.one())
    }

    pub fn monomial(field: F, degree: usize, c: F::Elem) -> Self {
        let mut coeffs = vec![field.zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(field, coeffs)
    }

    /// `x - a`.
    pub fn linear(field: F, a: F::Elem) -> Self {
        let one = field.one();
        let na = field.neg(&a);
        Self::new(field, vec![na, one])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = 0 (useful for counting).
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.field.is_one(c))
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Self::new(self.field.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.neg(a)).collect();
        Self::new(self.field.clone(), coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.field.clone(), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.field.clone(), coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field.clone());
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let coeffs = self.field.convolve(&self.coeffs, &other.coeffs, len);
        Self::new(self.field.clone(), coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(self.field.clone(), coeffs)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), AlgebraError> {
        let f = &self.field;
        let dl = d.leading().ok_or(AlgebraError::DivisionByZero)?;
        let dinv = f.inv(dl).ok_or(AlgebraError::DivisionByZero)?;
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return Ok((Self::zero(f.clone()), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![f.zero(); r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let c = f.mul(&r[i + dn - 1], &dinv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(&r[i + j], &f.mul(&c, dj));
            }
            q[i] = c;
        }
        r.truncate(dn - 1);
        Ok((Self::new(f.clone(), q), Self::new(f.clone(), r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, AlgebraError> {
        Ok(self.divrem(d)?.1)
    }

    /// Quotient of an exact division; errors if a remainder is left over.
    pub fn exact_div(&self, d: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.divrem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.rem(self).is_ok_and(|r| r.is_zero())
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u128, m: &Self) -> Result<Self, AlgebraError> {
        let mut base = self.rem(m)?;
        let mut acc = Self::one(self.field.clone()).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
            .collect();
        Self::new(f.clone(), coeffs)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// Substitutes `x -> -x`.
    pub fn negate_variable(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { f.neg(c) } else { c.clone() })
            .collect();
        Self::new(f.clone(), coeffs)
    }

    /// Product of `x - r` over the given roots.
    pub fn from_roots(field: F, roots: &[F::Elem]) -> Self {
        roots
            .iter()
            .fold(Self::one(field.clone()), |acc, r| {
                acc.mul(&Self::linear(field.clone(), r.clone()))
            })
    }

    /// Resultant of two polynomials (zero if either is zero).
    pub fn resultant(&self, other: &Self) -> F::Elem {
        let f = &self.field;
        let (mut a, mut b) = (self.clone(), other.clone());
        if a.is_zero() || b.is_zero() {
            return f.zero();
        }
        let mut acc = f.one();
        loop {
            let (n, m) = (a.deg(), b.deg());
            if m == 0 {
                return f.mul(&acc, &f.pow(b.leading().expect("nonzero"), n as u64));
            }
            let r = a.rem(&b).expect("nonzero divisor");
            if r.is_zero() {
                return f.zero();
            }
            // Res(a, b) = (-1)^{nm} lc(b)^{n - deg r} Res(b, r)
            if (n * m) % 2 == 1 {
                acc = f.neg(&acc);
            }
            acc = f.mul(&acc, &f.pow(b.leading().expect("nonzero"), (n - r.deg()) as u64));
            a = b;
            b = r;
        }
    }

    pub fn map<G: Field>(&self, target: G, f: impl Fn(&F::Elem) -> G::Elem) -> Poly<G> {
        Poly::new(target, self.coeffs.iter().map(f).collect())
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            let s = self.field.render(c);
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(out, "-")?;
                }
            } else {
                write!(out, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if mono.is_empty() {
                write!(out, "{mag}")?;
            } else if mag == "1" {
                write!(out, "{mono}")?;
            } else {
                write!(out, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}
