//! Factorisation and square roots in F_p[x].
//!
//! Squarefree decomposition, then distinct-degree factorisation, then
//! Cantor–Zassenhaus equal-degree splitting driven by a seeded RNG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Field, PrimeField};
use super::poly::Poly;
use super::AlgebraError;

pub type FpPoly = Poly<PrimeField>;

pub const DEFAULT_SEED: u64 = 0x5eed_0067;

/// `unit * prod factor^multiplicity`, factors monic irreducible and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(FpPoly, usize)>,
}

impl Factorization {
    pub fn product(&self, field: PrimeField) -> FpPoly {
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit), |acc, (f, e)| {
                acc.mul(&f.pow(*e as u64))
            })
    }

    /// Degrees of the irreducible factors, with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        self.factors
            .iter()
            .flat_map(|(f, e)| std::iter::repeat_n(f.deg(), *e))
            .collect()
    }
}

fn pth_root(f: &FpPoly) -> FpPoly {
    let p = f.field().modulus() as usize;
    let coeffs = f.coeffs().iter().step_by(p).cloned().collect();
    Poly::new(*f.field(), coeffs)
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime
/// squarefree `a_i` with `f = prod a_i^{m_i}`.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let p = f.field().modulus() as usize;
    let df = f.derivative();
    if df.is_zero() {
        for (g, m) in squarefree_decomposition(&pth_root(f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c).expect("gcd divides");
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
    if c.deg() > 0 {
        for (g, m) in squarefree_decomposition(&pth_root(&c).make_monic()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree: returns `(product, degree)` pairs.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let field = *f.field();
    let p = field.modulus() as u128;
    let x = Poly::x(field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest).expect("nonzero");
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.powmod(p, &rest).expect("nonzero");
        let g = h.sub(&x).gcd(&rest);
        if g.deg() > 0 {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest).expect("nonzero");
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.make_monic()];
    }
    let field = *f.field();
    let p = field.modulus();
    loop {
        let a = Poly::new(field, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
        let mut frob = a.rem(f).expect("nonzero");
        let mut norm = frob.clone();
        for _ in 1..d {
            frob = frob.powmod(p as u128, f).expect("nonzero");
            norm = norm.mul(&frob).rem(f).expect("nonzero");
        }
        let b = norm.powmod(((p - 1) / 2) as u128, f).expect("nonzero");
        let g = b.sub(&Poly::one(field)).gcd(f);
        if g.deg() > 0 && g.deg() < n {
            let h = f.exact_div(&g).expect("gcd divides");
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

fn sort_key(f: &FpPoly) -> (usize, Vec<u64>) {
    (f.deg(), f.coeffs().iter().rev().cloned().collect())
}

/// Complete factorisation into monic irreducibles.
pub fn factor(f: &FpPoly, seed: u64) -> Result<Factorization, AlgebraError> {
    let unit = *f.leading().ok_or(AlgebraError::ZeroPolynomial)?;
    let monic = f.make_monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, m) in squarefree_decomposition(&monic) {
        for (block, d) in distinct_degree(&part) {
            for g in equal_degree(&block, d, &mut rng) {
                factors.push((g, m));
            }
        }
    }
    factors.sort_by_key(|(g, _)| sort_key(g));
    Ok(Factorization { unit, factors })
}

/// Monic square root of a monic polynomial, by halving multiplicities.
pub fn sqrt(f: &FpPoly) -> Result<FpPoly, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(AlgebraError::NotMonic);
    }
    let field = *f.field();
    let mut root = Poly::one(field);
    for (part, m) in squarefree_decomposition(f) {
        if m % 2 == 1 {
            return Err(AlgebraError::OddMultiplicity {
                degree: part.deg(),
                exponent: m,
            });
        }
        root = root.mul(&part.pow((m / 2) as u64));
    }
    Ok(root)
}

/// The product of the distinct linear factors: `gcd(f, x^p - x)`.
pub fn linear_part(f: &FpPoly) -> FpPoly {
    let field = *f.field();
    if f.is_zero() {
        return Poly::zero(field);
    }
    let x = Poly::x(field);
    let xp = x.powmod(field.modulus() as u128, f).expect("nonzero");
    xp.sub(&x).gcd(f)
}

/// Roots in F_p, sorted, without multiplicity.
pub fn roots(f: &FpPoly) -> Vec<u64> {
    let lin = linear_part(f);
    if lin.deg() == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut out: Vec<u64> = equal_degree(&lin, 1, &mut rng)
        .iter()
        .map(|g| f.field().neg(&g.coeff(0)))
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f67() -> PrimeField {
        PrimeField::new(67).unwrap()
    }

    fn p(c: &[i64]) -> FpPoly {
        Poly::from_i64(f67(), c)
    }

    #[test]
    fn supersingular_67_factors() {
        let s = p(&[1, 1])
            .mul(&p(&[14, 1]))
            .mul(&p(&[45, 8, 1]))
            .mul(&p(&[24, 44, 1]));
        let fac = factor(&s, DEFAULT_SEED).unwrap();
        assert_eq!(
            fac.factors,
            vec![
                (p(&[1, 1]), 1),
                (p(&[14, 1]), 1),
                (p(&[45, 8, 1]), 1),
                (p(&[24, 44, 1]), 1)
            ]
        );
        assert_eq!(linear_part(&s), p(&[1, 1]).mul(&p(&[14, 1])));
        assert_eq!(roots(&s), vec![53, 66]);
    }

    #[test]
    fn square_detected() {
        let h = p(&[62, 10, 1]);
        let fac = factor(&h.mul(&h), DEFAULT_SEED).unwrap();
        assert_eq!(fac.factors, vec![(h.clone(), 2)]);
        assert_eq!(sqrt(&h.mul(&h)).unwrap(), h);
        let x2 = p(&[0, 0, 1]);
        assert_eq!(factor(&x2, 1).unwrap().factors, vec![(p(&[0, 1]), 2)]);
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(sqrt(&p(&[1, 2, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(
            sqrt(&p(&[0, 0, 0, 1])),
            Err(AlgebraError::OddMultiplicity {
                degree: 1,
                exponent: 3
            })
        );
        assert_eq!(sqrt(&p(&[1, 2, 2])), Err(AlgebraError::NotMonic));
    }

    #[test]
    fn multiplicity_divisible_by_p() {
        let f = PrimeField::new(5).unwrap();
        let a = Poly::from_i64(f, &[2, 0, 1]); // x^2 + 2 irreducible mod 5
        let big = a.pow(10).mul(&Poly::from_i64(f, &[1, 1]).pow(5));
        let fac = factor(&big, 7).unwrap();
        assert_eq!(
            fac.factors,
            vec![(Poly::from_i64(f, &[1, 1]), 5), (a.clone(), 10)]
        );
        assert_eq!(sqrt(&a.pow(10)).unwrap(), a.pow(5));
    }

    fn irreducible_check(g: &FpPoly) -> bool {
        // Squarefree with a single distinct-degree block of full degree.
        let dd = distinct_degree(g);
        dd.len() == 1 && dd[0].1 == g.deg()
    }

    fn arb_monic(max_deg: usize) -> impl Strategy<Value = FpPoly> {
        prop::collection::vec(0u64..67, 0..max_deg).prop_map(|mut c| {
            c.push(1);
            Poly::new(f67(), c)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn factorisation_reconstructs(f in arb_monic(14), seed in any::<u64>()) {
            let fac = factor(&f, seed).unwrap();
            prop_assert_eq!(fac.product(f67()), f.clone());
            for (g, _) in &fac.factors {
                prop_assert!(g.is_monic());
                prop_assert!(irreducible_check(g));
            }
            for w in fac.factors.windows(2) {
                prop_assert_ne!(&w[0].0, &w[1].0);
            }
        }

        #[test]
        fn factor_of_product_is_union(f in arb_monic(8), g in arb_monic(8)) {
            let mut union: Vec<(FpPoly, usize)> = Vec::new();
            for (h, e) in factor(&f, 1).unwrap().factors.into_iter()
                .chain(factor(&g, 2).unwrap().factors) {
                match union.iter_mut().find(|(u, _)| *u == h) {
                    Some(slot) => slot.1 += e,
                    None => union.push((h, e)),
                }
            }
            union.sort_by_key(|(h, _)| sort_key(h));
            prop_assert_eq!(factor(&f.mul(&g), 3).unwrap().factors, union);
        }

        #[test]
        fn sqrt_of_square(f in arb_monic(10)) {
            let sq = f.mul(&f);
            prop_assert_eq!(sqrt(&sq).unwrap(), f);
        }
    }
}
