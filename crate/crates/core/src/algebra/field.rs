//! Coefficient fields: the rationals and prime fields F_p.
//!
//! Series, polynomials and matrices are generic over a [`Field`] context
//! object. The context carries whatever is needed to do arithmetic (the
//! modulus for F_p, nothing for Q) so elements themselves stay plain values.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::AlgebraError;

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rat = BigRational;

pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    /// Image of a rational number; `None` when its denominator is not invertible.
    fn from_rat(&self, r: &Rat) -> Option<Self::Elem>;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Human-readable rendering of an element.
    fn render(&self, a: &Self::Elem) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Truncated product: `out[k] = sum_{i+j=k} a[i]*b[j]` for `k < len`.
    fn convolve(&self, a: &[Self::Elem], b: &[Self::Elem], len: usize) -> Vec<Self::Elem> {
        let mut out = vec![self.zero(); len];
        for (i, ai) in a.iter().enumerate().take(len) {
            if self.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(len - i) {
                if self.is_zero(bj) {
                    continue;
                }
                let t = self.mul(ai, bj);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        out
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn from_i64(&self, n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> Rat {
        Rat::from_integer(n.clone())
    }
    fn from_rat(&self, r: &Rat) -> Option<Rat> {
        Some(r.clone())
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn inv(&self, a: &Rat) -> Option<Rat> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn render(&self, a: &Rat) -> String {
        a.to_string()
    }
}

/// The prime field F_p for an odd prime 5 <= p < 2^31.
///
/// Elements are residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const MAX_MODULUS: u64 = 1 << 31;

    /// Rejects composite moduli and the primes 2 and 3.
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p < 5 || p >= Self::MAX_MODULUS || !is_prime(p) {
            return Err(AlgebraError::InvalidModulus(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Reduces a rational number; `None` when p divides the denominator.
    pub fn reduce_rat(&self, r: &Rat) -> Option<u64> {
        let den = self.from_bigint(r.denom());
        let inv = self.inv(&den)?;
        Some(self.mul(&self.from_bigint(r.numer()), &inv))
    }

    /// Symmetric lift of a residue to `(-p/2, p/2]`.
    pub fn lift_symmetric(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits")
    }
    fn from_rat(&self, r: &Rat) -> Option<u64> {
        self.reduce_rat(r)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a % self.p == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd(*a as i64, self.p as i64);
        debug_assert_eq!(g, 1);
        Some(self.reduce_i64(x))
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }

    fn convolve(&self, a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
        // Products are < 2^62, so sixteen of them fit in a u128 many times
        // over; reduce once per output coefficient.
        let mut out = vec![0u64; len];
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = k.saturating_sub(b.len().saturating_sub(1));
            let hi = k.min(a.len().saturating_sub(1));
            if a.is_empty() || b.is_empty() || lo > hi {
                continue;
            }
            let mut acc: u128 = 0;
            for i in lo..=hi {
                acc += (a[i] * b[k - i]) as u128;
            }
            *slot = (acc % self.p as u128) as u64;
        }
        out
    }
}

/// Extended Euclid on machine integers: returns `(g, x, y)` with `a*x + b*y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Legendre symbol `(a/p)` for an odd prime p, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    assert!(p % 2 == 1 && is_prime(p), "legendre symbol needs an odd prime");
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut base = a as u128;
    let mut e = (p - 1) / 2;
    let m = p as u128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// True iff p does not divide the denominator.
pub fn rat_is_p_integral(r: &Rat, p: u64) -> bool {
    !r.denom().is_multiple_of(&BigInt::from(p))
}

/// Serializes a rational as `"num/den"` (denominator always written).
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    let bad = || AlgebraError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Least common multiple of the denominators of a list of rationals.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_brute(a: i64, p: u64) -> i32 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        assert_eq!(legendre(-1, 67), -1);
        assert_eq!(legendre(-3, 67), 1);
        assert_eq!(legendre(0, 67), 0);
        for p in primes_between(5, 200) {
            for a in -20..20 {
                assert_eq!(legendre(a, p), euler_brute(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn prime_field_rejects_small_and_composite() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(3).is_err());
        assert!(PrimeField::new(68).is_err());
        assert!(PrimeField::new(67).is_ok());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(67).unwrap();
        for a in 1..67 {
            let ai = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &ai), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1728), 14);
    }

    #[test]
    fn reduce_rational_mod_p() {
        let f = PrimeField::new(67).unwrap();
        let half = Rat::new(1.into(), 2.into());
        assert_eq!(f.mul(&f.reduce_rat(&half).unwrap(), &2), 1);
        assert_eq!(f.reduce_rat(&Rat::new(1.into(), 67.into())), None);
        assert!(rat_is_p_integral(&Rat::new(3.into(), 4.into()), 67));
        assert!(!rat_is_p_integral(&Rat::new(1.into(), 67.into()), 67));
    }

    #[test]
    fn rat_string_round_trip() {
        let r = Rat::new((-84).into(), 6.into());
        assert_eq!(rat_to_string(&r), "-14/1");
        assert_eq!(parse_rat("-14/1").unwrap(), r);
        assert_eq!(parse_rat("5").unwrap(), Rat::from_integer(5.into()));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn fp_convolution_matches_naive() {
        let f = PrimeField::new(101).unwrap();
        let a: Vec<u64> = (0..17).map(|i| (i * 37 + 5) % 101).collect();
        let b: Vec<u64> = (0..9).map(|i| (i * 53 + 11) % 101).collect();
        let fast = f.convolve(&a, &b, 20);
        let mut naive = vec![0u64; 20];
        for i in 0..a.len() {
            for j in 0..b.len() {
                if i + j < 20 {
                    naive[i + j] = (naive[i + j] + a[i] * b[j]) % 101;
                }
            }
        }
        assert_eq!(fast, naive);
    }
}
