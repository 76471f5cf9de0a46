//! Hecke operators and the Atkin–Lehner involution on Manin symbols.

use num_traits::Zero;

use super::p1::Mat2;
use super::space::ModSymSpace;
use super::ModSymError;
use crate::algebra::field::{is_prime, Rat, Rationals};
use crate::algebra::matrix::Matrix;

/// Cremona's Heilbronn matrices of determinant ℓ for a prime ℓ.
pub fn heilbronn_cremona(l: u64) -> Vec<Mat2> {
    assert!(is_prime(l), "Heilbronn-Cremona lists are for primes");
    let p = l as i64;
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out = vec![[1, 0, 0, p]];
    let half = p / 2;
    for r in -half..=half {
        let (mut x1, mut x2) = (p, -r);
        let (mut y1, mut y2) = (0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = (a as f64 / b as f64).round() as i64;
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// Merel's set: `[[a,b],[c,d]]` with `ad - bc = n`, `a > b >= 0`, `d > c >= 0`.
pub fn heilbronn_merel(n: u64) -> Vec<Mat2> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=n {
            let ad = a * d;
            if ad < n {
                continue;
            }
            for b in 0..a {
                if b == 0 {
                    if ad == n {
                        for c in 0..d {
                            out.push([a, 0, c, d]);
                        }
                    }
                    continue;
                }
                let rest = ad - n;
                if rest % b == 0 {
                    let c = rest / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..=n).find(|d| n % d == 0).expect("n >= 2")
}

/// Matrix of T_n on the whole space (row-vector convention), for n prime to p.
pub fn hecke_matrix(space: &ModSymSpace, n: u64) -> Result<Matrix<Rationals>, ModSymError> {
    let p = space.level();
    if n == 0 || n % p == 0 {
        return Err(ModSymError::BadHeckeIndex(n));
    }
    if n == 1 {
        return Ok(Matrix::identity(Rationals, space.dimension()));
    }
    if is_prime(n) {
        let h = heilbronn_cremona(n);
        return Ok(space.operator_matrix(|sym| space.act_sum(sym, &h)));
    }
    let l = smallest_prime_factor(n);
    let mut e = 0;
    let mut m = n;
    while m % l == 0 {
        m /= l;
        e += 1;
    }
    if m > 1 {
        return Ok(hecke_matrix(space, l.pow(e))?.mul(&hecke_matrix(space, m)?)?);
    }
    // T_{l^e} = T_l T_{l^{e-1}} - l T_{l^{e-2}}
    let tl = hecke_matrix(space, l)?;
    let prev = hecke_matrix(space, l.pow(e - 1))?;
    let prev2 = hecke_matrix(space, l.pow(e - 2))?;
    Ok(tl
        .mul(&prev)?
        .sub(&prev2.scale(&Rat::from_integer((l as i64).into())))?)
}

/// T_n computed directly from Merel's set (slow; for cross-checks).
pub fn hecke_matrix_merel(space: &ModSymSpace, n: u64) -> Result<Matrix<Rationals>, ModSymError> {
    if n == 0 || n % space.level() == 0 {
        return Err(ModSymError::BadHeckeIndex(n));
    }
    let h = heilbronn_merel(n);
    Ok(space.operator_matrix(|sym| space.act_sum(sym, &h)))
}

/// Continued-fraction decomposition of the modular symbol {0, a/b} (b > 0)
/// into Manin symbols `(c, d, multiplicity)`.
pub fn zero_to_rational(a: i64, b: i64) -> Vec<(i64, i64, i64)> {
    assert!(b > 0, "denominator must be positive");
    let mut out = vec![(0, 1, 1)];
    // convergents p_k/q_k with p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0
    let (mut pm2, mut qm2) = (0i64, 1i64);
    let (mut pm1, mut qm1) = (1i64, 0i64);
    let (mut num, mut den) = (a, b);
    let mut k = 0;
    loop {
        let ak = num.div_euclid(den);
        let pk = ak * pm1 + pm2;
        let qk = ak * qm1 + qm2;
        let sign = if k % 2 == 0 { -1 } else { 1 };
        out.push((sign * qk, qm1, 1));
        let r = num - ak * den;
        if r == 0 {
            break;
        }
        (num, den) = (den, r);
        (pm2, qm2, pm1, qm1) = (pm1, qm1, pk, qk);
        k += 1;
    }
    out
}

/// Image of a Manin symbol under w_p, as Manin symbols with multiplicities.
pub fn atkin_lehner_symbol(space: &ModSymSpace, sym: usize) -> Vec<(usize, i64)> {
    let p1 = space.p1();
    let p = space.level() as i64;
    let (c, d) = p1.rep(sym);
    let zero_inf = p1.index(0, 1).expect("defined");
    if d == 0 {
        // (1:0) = {inf, 0} -> {0, inf}
        return vec![(zero_inf, 1)];
    }
    if c == 0 {
        // {0, inf} -> {inf, 0}
        return vec![(zero_inf, -1)];
    }
    // (t:1) = {0, 1/t} -> {inf, -t/p} = -{0, inf} + {0, -t/p}
    let mut out = vec![(zero_inf, -1)];
    for (cc, dd, m) in zero_to_rational(-c, p) {
        if let Some(i) = p1.index(cc, dd) {
            out.push((i, m));
        }
    }
    out
}

pub fn atkin_lehner_matrix(space: &ModSymSpace) -> Matrix<Rationals> {
    space.operator_matrix(|sym| atkin_lehner_symbol(space, sym))
}

/// Row vectors spanning `{x : x M = c x}`.
pub fn eigenspace(m: &Matrix<Rationals>, c: i64) -> Vec<Vec<Rat>> {
    let n = m.rows();
    let shifted = m
        .sub(&Matrix::identity(Rationals, n).scale(&Rat::from_integer(c.into())))
        .expect("square");
    shifted.left_kernel()
}

/// Restriction of a row-vector operator to the span of the given rows, which
/// must be invariant. Returns the matrix in the basis of those rows.
pub fn restrict(m: &Matrix<Rationals>, rows: &[Vec<Rat>]) -> Result<Matrix<Rationals>, ModSymError> {
    let k = rows.len();
    let n = m.rows();
    let basis = Matrix::from_rows(Rationals, n, rows.to_vec())?;
    let bt = basis.transpose();
    let mut out = Vec::with_capacity(k);
    for r in rows {
        let image = m.vec_mul(r);
        let sol = bt.solve(&image).ok_or(ModSymError::NotInvariant)?;
        out.push(sol);
    }
    Ok(Matrix::from_rows(Rationals, k, out)?)
}

pub fn is_zero_matrix(m: &Matrix<Rationals>) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(|x| x.is_zero()))
}
