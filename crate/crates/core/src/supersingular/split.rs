//! S_p from the divisor polynomial of E_{p-1} mod p, and its split into
//! linear and quadratic parts.

use super::SupersingularError;
use crate::algebra::factor::{distinct_degree, linear_part, squarefree_decomposition};
use crate::algebra::field::{is_prime, Field, PrimeField};
use crate::algebra::poly::Poly;
use crate::algebra::{FpPoly, FpSeries};
use crate::level1::{divisor_polynomial, eisenstein_in, minimal_precision};

#[derive(Clone, Debug, PartialEq)]
pub struct SupersingularSplit {
    pub p: u64,
    pub s_p: FpPoly,
    /// Product of the linear factors (roots in F_p).
    pub s_l: FpPoly,
    /// Product of the irreducible quadratic factors.
    pub s_q: FpPoly,
    /// S_p with the factors x and x - 1728 removed.
    pub s_tilde: FpPoly,
    pub s_tilde_l: FpPoly,
    pub alpha_rho: u32,
    pub alpha_i: u32,
}

/// Splits S_p given S~_p = F~(E_{p-1}) mod p.
pub fn supersingular_split(p: u64, s_tilde: FpPoly) -> Result<SupersingularSplit, SupersingularError> {
    let field = *s_tilde.field();
    let s_tilde = s_tilde.make_monic();
    let alpha_rho = (p % 3 == 2) as u32;
    let alpha_i = (p % 4 == 3) as u32;
    let x = Poly::x(field);
    let x1728 = Poly::from_i64(field, &[-1728, 1]);
    let s_p = x
        .pow(alpha_rho as u64)
        .mul(&x1728.pow(alpha_i as u64))
        .mul(&s_tilde);
    let s_l = linear_part(&s_p);
    let s_q = s_p.exact_div(&s_l)?;
    for (f, mult) in squarefree_decomposition(&s_q) {
        if mult != 1 {
            return Err(SupersingularError::SplitDegreeMismatch { degree: f.deg() });
        }
        for (_, d) in distinct_degree(&f) {
            if d != 2 {
                return Err(SupersingularError::SplitDegreeMismatch { degree: d });
            }
        }
    }
    let s_tilde_l = linear_part(&s_tilde);
    Ok(SupersingularSplit {
        p,
        s_p,
        s_l,
        s_q,
        s_tilde,
        s_tilde_l,
        alpha_rho,
        alpha_i,
    })
}

/// S_p and its split from a reduction of E_{p-1} mod p.
pub fn ss_polys(p: u64, e_pm1: &FpSeries) -> Result<SupersingularSplit, SupersingularError> {
    let s_tilde = divisor_polynomial(e_pm1)?;
    supersingular_split(p, s_tilde)
}

/// Convenience: reduces E_{p-1} itself and splits.
pub fn ss_polys_for(p: u64) -> Result<SupersingularSplit, SupersingularError> {
    if p < 5 || !is_prime(p) {
        return Err(SupersingularError::InvalidPrime(p));
    }
    let field = PrimeField::new(p)?;
    let k = p as i64 - 1;
    let prec = minimal_precision(k)? + 2;
    let e = eisenstein_in(field, k, prec)?;
    debug_assert!(field.is_one(&e.coeff(0)));
    ss_polys(p, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::factor;
    use crate::algebra::field::primes_between;
    use crate::modsym::space::genus_formula;

    fn fp(p: u64, c: &[i64]) -> FpPoly {
        Poly::from_i64(PrimeField::new(p).unwrap(), c)
    }

    #[test]
    fn level_67() {
        let s = ss_polys_for(67).unwrap();
        assert_eq!(s.s_l, fp(67, &[1, 1]).mul(&fp(67, &[14, 1])));
        assert_eq!(s.s_q, fp(67, &[45, 8, 1]).mul(&fp(67, &[24, 44, 1])));
        assert_eq!((s.alpha_rho, s.alpha_i), (0, 1));
        let f = factor(&s.s_p, 1).unwrap();
        assert_eq!(f.degrees(), vec![1, 1, 2, 2]);
    }

    #[test]
    fn small_primes() {
        assert_eq!(ss_polys_for(5).unwrap().s_p, fp(5, &[0, 1]));
        let s11 = ss_polys_for(11).unwrap();
        assert_eq!(s11.s_p, fp(11, &[0, -1, 1]));
        assert_eq!(s11.s_q, fp(11, &[1]));
        assert_eq!(ss_polys_for(13).unwrap().s_p, fp(13, &[-5, 1]));
    }

    #[test]
    fn degree_is_genus_plus_one() {
        for p in primes_between(5, 200) {
            let s = ss_polys_for(p).unwrap();
            assert_eq!(s.s_p.deg() as i64, genus_formula(p) + 1, "p = {p}");
            assert_eq!(s.s_l.mul(&s.s_q), s.s_p);
            assert_eq!(s.s_tilde_l.mul(&s.s_q), s.s_tilde);
        }
    }

    #[test]
    fn rejects_composites() {
        assert!(matches!(ss_polys_for(21), Err(SupersingularError::InvalidPrime(21))));
    }
}
