//! Fixed-point real and complex arithmetic on big integers.
//!
//! A value `x` is stored as the integer `round(x * 2^bits)`. Absolute error
//! is what the caller controls; magnitudes are unbounded.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Precision context: number of fractional bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub bits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: BigInt,
    pub im: BigInt,
}

const GUARD: u32 = 64;

impl Fixed {
    pub fn new(bits: u32) -> Self {
        Fixed { bits }
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn from_int(&self, n: &BigInt) -> BigInt {
        n << self.bits
    }

    pub fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n) << self.bits
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    pub fn div_int(&self, a: &BigInt, n: i64) -> BigInt {
        a / BigInt::from(n)
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self, a: &BigInt) -> BigInt {
        assert!(!a.is_negative(), "square root of a negative value");
        (a << self.bits).sqrt()
    }

    /// Nearest integer.
    pub fn round(&self, a: &BigInt) -> BigInt {
        let half = BigInt::one() << (self.bits - 1);
        (a + half) >> self.bits
    }

    /// Distance from `a` to the nearest integer, as an f64.
    pub fn distance_to_integer(&self, a: &BigInt) -> f64 {
        let r = self.round(a);
        let diff = a - (r << self.bits);
        self.to_f64(&diff).abs()
    }

    pub fn to_f64(&self, a: &BigInt) -> f64 {
        let shift = a.bits().saturating_sub(60);
        let top = (a >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.bits as i32)
    }

    fn widen(&self) -> Fixed {
        Fixed::new(self.bits + GUARD)
    }

    fn narrow(&self, wide: &BigInt) -> BigInt {
        wide >> GUARD
    }

    fn arctan_inv(&self, n: i64) -> BigInt {
        // sum_k (-1)^k / ((2k+1) n^(2k+1))
        let n2 = BigInt::from(n * n);
        let mut power = self.one() / BigInt::from(n);
        let mut sum = power.clone();
        let mut k = 1i64;
        while !power.is_zero() {
            power = &power / &n2;
            let term = &power / BigInt::from(2 * k + 1);
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
        }
        sum
    }

    /// pi by Machin's formula.
    pub fn pi(&self) -> BigInt {
        let w = self.widen();
        let v = w.arctan_inv(5) * 16 - w.arctan_inv(239) * 4;
        self.narrow(&v)
    }

    /// e^x for real x.
    pub fn exp(&self, x: &BigInt) -> BigInt {
        let halvings = (x.abs() >> self.bits).bits() as u32 + 8;
        let w = Fixed::new(self.bits + GUARD + 2 * halvings);
        let y = (x << (w.bits - self.bits)) >> halvings;
        let mut term = w.one();
        let mut sum = w.one();
        let mut k = 1i64;
        while !term.is_zero() {
            term = w.mul(&term, &y) / BigInt::from(k);
            sum += &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = w.mul(&sum, &sum);
        }
        sum >> (w.bits - self.bits)
    }

    /// (cos x, sin x) for real x.
    pub fn cos_sin(&self, x: &BigInt) -> (BigInt, BigInt) {
        let w = self.widen();
        let y = x << GUARD;
        let y2 = w.mul(&y, &y);
        let mut cos = w.one();
        let mut sin = y.clone();
        let mut cterm = w.one();
        let mut sterm = y;
        let mut k = 1i64;
        while !cterm.is_zero() || !sterm.is_zero() {
            cterm = -w.mul(&cterm, &y2) / BigInt::from((2 * k - 1) * (2 * k));
            sterm = -w.mul(&sterm, &y2) / BigInt::from((2 * k) * (2 * k + 1));
            cos += &cterm;
            sin += &sterm;
            k += 1;
        }
        (self.narrow(&cos), self.narrow(&sin))
    }

    pub fn c_zero(&self) -> Complex {
        Complex {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn c_one(&self) -> Complex {
        self.c_real(self.one())
    }

    pub fn c_real(&self, re: BigInt) -> Complex {
        Complex {
            re,
            im: BigInt::zero(),
        }
    }

    pub fn c_add(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: &a.re + &b.re,
            im: &a.im + &b.im,
        }
    }

    pub fn c_sub(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: &a.re - &b.re,
            im: &a.im - &b.im,
        }
    }

    pub fn c_mul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.bits,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.bits,
        }
    }

    pub fn c_scale_int(&self, a: &Complex, n: &BigInt) -> Complex {
        Complex {
            re: &a.re * n,
            im: &a.im * n,
        }
    }

    pub fn c_div(&self, a: &Complex, b: &Complex) -> Complex {
        let den = &b.re * &b.re + &b.im * &b.im;
        let re = (&a.re * &b.re + &a.im * &b.im) << self.bits;
        let im = (&a.im * &b.re - &a.re * &b.im) << self.bits;
        Complex {
            re: re / &den,
            im: im / &den,
        }
    }

    pub fn c_pow(&self, a: &Complex, mut e: u32) -> Complex {
        let mut base = a.clone();
        let mut acc = self.c_one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.c_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.c_mul(&base, &base);
            }
        }
        acc
    }

    /// `r e^{i t}`.
    pub fn c_polar(&self, r: &BigInt, t: &BigInt) -> Complex {
        let (c, s) = self.cos_sin(t);
        Complex {
            re: self.mul(r, &c),
            im: self.mul(r, &s),
        }
    }

    /// log2 of |a| (approximate), or `-inf` for zero.
    pub fn c_log2_abs(&self, a: &Complex) -> f64 {
        let m = a.re.abs().max(a.im.abs());
        if m.is_zero() {
            return f64::NEG_INFINITY;
        }
        m.bits() as f64 - self.bits as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let f = Fixed::new(200);
        let pi = f.pi();
        // 10^40 * pi, floor
        let scaled: BigInt = (&pi * BigInt::from(10).pow(40u32)) >> 200;
        assert_eq!(scaled.to_string(), "31415926535897932384626433832795028841971");
    }

    #[test]
    fn exp_and_trig_identities() {
        let f = Fixed::new(160);
        let e = f.exp(&f.one());
        assert!((f.to_f64(&e) - std::f64::consts::E).abs() < 1e-14);
        let x = f.from_i64(-37);
        let ex = f.exp(&x);
        assert!((f.to_f64(&ex) / (-37f64).exp() - 1.0).abs() < 1e-12);
        let t = f.div(&f.pi(), &f.from_i64(3));
        let (c, s) = f.cos_sin(&t);
        assert!((f.to_f64(&c) - 0.5).abs() < 1e-15);
        let one = &f.mul(&c, &c) + &f.mul(&s, &s);
        assert!(f.to_f64(&(one - f.one())).abs() < 1e-40);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let f = Fixed::new(128);
        let a = Complex { re: f.from_i64(3), im: f.from_i64(-7) };
        let b = Complex { re: f.from_i64(2), im: f.from_i64(5) };
        let q = f.c_div(&f.c_mul(&a, &b), &b);
        assert!(f.to_f64(&(&q.re - &a.re)).abs() < 1e-30);
        assert!(f.to_f64(&(&q.im - &a.im)).abs() < 1e-30);
    }

    #[test]
    fn rounding() {
        let f = Fixed::new(64);
        let x = f.from_i64(-3375) + (BigInt::one() << 60);
        assert_eq!(f.round(&x), BigInt::from(-3375));
        assert!(f.distance_to_integer(&x) < 0.07);
        assert_eq!(f.sqrt(&f.from_i64(49)), f.from_i64(7));
    }
}
