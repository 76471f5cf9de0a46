//! Factorisation of monic integer polynomials (Zassenhaus): factor modulo a
//! small prime, Hensel-lift, recombine.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::factor::{distinct_degree, equal_degree, FpPoly};
use super::field::{is_prime, Field, PrimeField, Rat, Rationals};
use super::poly::Poly;
use super::AlgebraError;

type ZPoly = Vec<BigInt>;

fn trim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn zsub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n)
        .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
        .collect())
}

/// Exact division by a monic polynomial over Z; `None` if not divisible.
fn zdiv_monic(a: &[BigInt], d: &[BigInt]) -> Option<ZPoly> {
    let dn = d.len();
    if a.len() < dn {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); r.len() - dn + 1];
    for i in (0..q.len()).rev() {
        let c = r[i + dn - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            r[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    if r.iter().all(|c| c.is_zero()) {
        Some(trim(q))
    } else {
        None
    }
}

fn to_fp(a: &[BigInt], f: PrimeField) -> FpPoly {
    Poly::new(f, a.iter().map(|c| f.from_bigint(c)).collect())
}

fn from_fp(a: &FpPoly) -> ZPoly {
    a.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

fn reduce_mod(a: &[BigInt], m: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m >> 1;
    trim(a
        .iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect())
}

/// `(s, t)` with `s a + t b = 1` for coprime a, b over F_r.
fn bezout(a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
    let f = *a.field();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
    let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1).expect("nonzero");
        r0 = std::mem::replace(&mut r1, r);
        let s = s0.sub(&q.mul(&s1));
        s0 = std::mem::replace(&mut s1, s);
        let t = t0.sub(&q.mul(&t1));
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = f.inv(r0.leading().expect("coprime inputs")).expect("unit");
    (s0.scale(&inv), t0.scale(&inv))
}

/// Lifts `f = g h mod r` (g, h monic and coprime mod r) to a factorisation
/// modulo `r^k`, returning integer representatives.
fn hensel_two(f: &[BigInt], g: &FpPoly, h: &FpPoly, r: u64, k: u32) -> (ZPoly, ZPoly) {
    let field = *g.field();
    let (_, t) = bezout(g, h);
    let rb = BigInt::from(r);
    let mut m = rb.clone();
    let mut gz = from_fp(g);
    let mut hz = from_fp(h);
    for _ in 1..k {
        let diff = zsub(f, &zmul(&gz, &hz));
        let e: ZPoly = diff.iter().map(|c| c / &m).collect();
        let er = to_fp(&e, field);
        let gr = to_fp(&gz, field);
        let hr = to_fp(&hz, field);
        let gcorr = t.mul(&er).rem(&gr).expect("monic");
        let hcorr = er.sub(&hr.mul(&gcorr)).exact_div(&gr).expect("bezout identity");
        let gc = from_fp(&gcorr);
        let hc = from_fp(&hcorr);
        let next = &m * &rb;
        let add = |base: &ZPoly, corr: &ZPoly| {
            let n = base.len().max(corr.len());
            let z = BigInt::zero();
            let v: ZPoly = (0..n)
                .map(|i| base.get(i).unwrap_or(&z) + &m * corr.get(i).unwrap_or(&z))
                .collect();
            reduce_mod(&v, &next)
        };
        gz = add(&gz, &gc);
        hz = add(&hz, &hc);
        m = next;
    }
    (gz, hz)
}

fn pick_prime(f: &[BigInt]) -> (PrimeField, Vec<FpPoly>) {
    let mut best: Option<(PrimeField, Vec<FpPoly>)> = None;
    let mut tried = 0;
    let mut r = 5u64;
    while tried < 8 {
        r += 1;
        if !is_prime(r) {
            continue;
        }
        let field = PrimeField::new(r).expect("prime");
        let fr = to_fp(f, field);
        if fr.deg() + 1 != f.len() || fr.gcd(&fr.derivative()).deg() > 0 {
            continue;
        }
        tried += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(r);
        let mut local = Vec::new();
        for (block, d) in distinct_degree(&fr) {
            local.extend(equal_degree(&block, d, &mut rng));
        }
        if best.as_ref().is_none_or(|(_, b)| local.len() < b.len()) {
            best = Some((field, local));
        }
    }
    best.expect("some prime keeps the polynomial squarefree")
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Irreducible factors of a squarefree monic integer polynomial.
fn factor_squarefree(f: &[BigInt]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let (field, local) = pick_prime(f);
    if local.len() == 1 {
        return vec![f.to_vec()];
    }
    let r = field.modulus();
    // Mignotte-style bound: every coefficient of a monic factor is at most 2^n |f|_2.
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (norm2.sqrt() + BigInt::one()) << (n + 1);
    let mut k = 1u32;
    let mut modulus = BigInt::from(r);
    while modulus <= bound {
        modulus *= r;
        k += 1;
    }
    // Lift the local factors one at a time.
    let mut lifted = Vec::new();
    let mut rest = f.to_vec();
    for (i, u) in local.iter().enumerate() {
        if i + 1 == local.len() {
            lifted.push(reduce_mod(&rest, &modulus));
            break;
        }
        let rest_r = to_fp(&rest, field);
        let cof = rest_r.exact_div(u).expect("local factor divides");
        let (g, h) = hensel_two(&rest, u, &cof, r, k);
        lifted.push(g);
        rest = h;
    }
    // Recombine.
    let mut out = Vec::new();
    let mut remaining: Vec<ZPoly> = lifted;
    let mut target = f.to_vec();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in subsets(remaining.len(), size) {
            let prod = subset
                .iter()
                .fold(vec![BigInt::one()], |acc, &i| reduce_mod(&zmul(&acc, &remaining[i]), &modulus));
            let cand = symmetric(&prod, &modulus);
            if let Some(q) = zdiv_monic(&target, &cand) {
                out.push(cand);
                target = q;
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, v)| v)
                    .collect();
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if target.len() > 1 {
        out.push(target);
    }
    out
}

fn rat_poly_to_z(f: &Poly<Rationals>) -> Result<ZPoly, AlgebraError> {
    f.coeffs()
        .iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(AlgebraError::Parse(format!("non-integral coefficient {c}")))
            }
        })
        .collect()
}

fn z_to_rat_poly(f: &[BigInt]) -> Poly<Rationals> {
    Poly::new(Rationals, f.iter().map(|c| Rat::from_integer(c.clone())).collect())
}

/// Factors a monic polynomial with integer coefficients into monic
/// irreducibles over Q, with multiplicities, sorted by degree then coefficients.
pub fn factor_over_z(f: &Poly<Rationals>) -> Result<Vec<(Poly<Rationals>, usize)>, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(AlgebraError::NotMonic);
    }
    rat_poly_to_z(f)?;
    let mut out = Vec::new();
    for (part, m) in rational_squarefree(f) {
        let z = rat_poly_to_z(&part)?;
        for g in factor_squarefree(&z) {
            out.push((z_to_rat_poly(&g), m));
        }
    }
    out.sort_by(|(a, _), (b, _)| {
        a.deg().cmp(&b.deg()).then_with(|| {
            let ka: Vec<i64> = a.coeffs().iter().rev().map(|c| c.to_integer().to_i64().unwrap_or(i64::MAX)).collect();
            let kb: Vec<i64> = b.coeffs().iter().rev().map(|c| c.to_integer().to_i64().unwrap_or(i64::MAX)).collect();
            ka.cmp(&kb)
        })
    });
    Ok(out)
}

/// Squarefree decomposition over Q (characteristic zero, so plain Yun).
fn rational_squarefree(f: &Poly<Rationals>) -> Vec<(Poly<Rationals>, usize)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c).expect("gcd divides").make_monic();
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides");
        if z.deg() > 0 {
            out.push((z.make_monic(), i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w).expect("gcd divides");
    }
    out
}

/// True iff every root of a real-rooted-looking polynomial is real and lies
/// in `[lo, hi]`, decided with a Sturm sequence.
pub fn all_roots_real_in(f: &Poly<Rationals>, lo: &Rat, hi: &Rat) -> bool {
    let n = f.deg();
    if n == 0 {
        return true;
    }
    let sq: Poly<Rationals> = rational_squarefree(f)
        .into_iter()
        .fold(Poly::one(Rationals), |acc, (g, _)| acc.mul(&g));
    let mut seq = vec![sq.clone(), sq.derivative()];
    while !seq[seq.len() - 1].is_zero() {
        let r = seq[seq.len() - 2].rem(&seq[seq.len() - 1]).expect("nonzero").neg();
        if r.is_zero() {
            break;
        }
        seq.push(r);
    }
    let changes = |x: &Rat| {
        let signs: Vec<i32> = seq
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    // Roots in (lo, hi] plus a possible root at lo.
    let at_lo = sq.eval(lo).is_zero() as usize;
    changes(lo) - changes(hi) + at_lo == sq.deg()
}
