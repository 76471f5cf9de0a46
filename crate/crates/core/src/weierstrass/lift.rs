//! Reduction mod p of weight-2 level-p forms into S_{p+1}(1).

use super::WeierstrassError;
use crate::algebra::field::{Field, PrimeField};
use crate::algebra::series::{FpSeries, QExpansion, Series};

/// The cusp forms h_1, ..., h_d of the Miller basis of weight p+1 over F_p,
/// h_i = q^i + O(q^{d+1}).
pub fn cuspidal_miller(miller: &[FpSeries]) -> &[FpSeries] {
    &miller[1..]
}

/// Writes f mod p as a combination of the cuspidal Miller basis and returns
/// the combination at the basis's precision. Every coefficient of f known
/// must be matched, or NoLift.
pub fn lift_to_level1(
    f: &QExpansion,
    index: usize,
    miller: &[FpSeries],
) -> Result<FpSeries, WeierstrassError> {
    let field = *miller[0].field();
    let p = field.modulus();
    if !f.is_p_integral(p) {
        return Err(WeierstrassError::NotPIntegral { index });
    }
    let cusp = cuspidal_miller(miller);
    let d = cusp.len() as i64;
    if f.precision() <= d {
        return Err(WeierstrassError::PrecisionTooSmall {
            needed: d + 1,
            got: f.precision(),
        });
    }
    let fbar = f.reduce_mod(&field)?;
    let prec = miller[0].precision();
    let mut b = Series::zero(field, prec)
        .with_weight(miller[0].weight())
        .with_level(1);
    if !field.is_zero(&fbar.coeff(0)) {
        return Err(WeierstrassError::NoLift { index });
    }
    for (i, h) in cusp.iter().enumerate() {
        let c = fbar.coeff(i as i64 + 1);
        if !field.is_zero(&c) {
            b = b.add(&h.scale(&c))?;
        }
    }
    let shared = prec.min(f.precision());
    if !(0..shared).all(|n| b.coeff(n) == fbar.coeff(n)) {
        return Err(WeierstrassError::NoLift { index });
    }
    Ok(b)
}

/// Lifts of all forms of a basis.
pub fn lift_all(forms: &[QExpansion], miller: &[FpSeries]) -> Result<Vec<FpSeries>, WeierstrassError> {
    forms
        .iter()
        .enumerate()
        .map(|(i, f)| lift_to_level1(f, i, miller))
        .collect()
}

/// Miller basis of weight p+1 over F_p.
pub fn miller_mod_p(p: u64, prec: i64) -> Result<Vec<FpSeries>, WeierstrassError> {
    let field = PrimeField::new(p)?;
    Ok(crate::level1::miller_basis_in(field, p as i64 + 1, prec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{Rat, Rationals};
    use crate::modsym::good_basis;

    #[test]
    fn level_67_lifts() {
        let b = good_basis(67, 30).unwrap();
        let miller = miller_mod_p(67, 60).unwrap();
        let lifts = lift_all(&b.forms, &miller).unwrap();
        let field = PrimeField::new(67).unwrap();
        for (f, l) in b.forms.iter().zip(&lifts) {
            assert_eq!(l.precision(), 60);
            assert!(l.agrees_with(&f.reduce_mod(&field).unwrap(), 30));
            assert_eq!(l.level(), 1);
            assert_eq!(l.weight(), 68);
        }
    }

    #[test]
    fn miller_element_lifts_to_itself() {
        let miller = miller_mod_p(67, 40).unwrap();
        let h = &miller[3];
        let f: QExpansion = Series::from_coeffs(
            Rationals,
            0,
            (0..40).map(|n| Rat::from_integer((h.coeff(n) as i64).into())).collect(),
            40,
        );
        assert_eq!(lift_to_level1(&f, 0, &miller).unwrap(), h.clone().with_level(1));
    }

    #[test]
    fn perturbed_form_has_no_lift() {
        let b = good_basis(67, 30).unwrap();
        let miller = miller_mod_p(67, 60).unwrap();
        let mut c = b.forms[0].coeffs_range(0, 30);
        c[25] += Rat::from_integer(1.into());
        let f = Series::from_coeffs(Rationals, 0, c, 30);
        assert_eq!(lift_to_level1(&f, 0, &miller), Err(WeierstrassError::NoLift { index: 0 }));
    }

    #[test]
    fn non_integral_rejected() {
        let miller = miller_mod_p(67, 30).unwrap();
        let f = Series::from_coeffs(Rationals, 1, vec![Rat::new(1.into(), 67.into())], 30);
        assert_eq!(lift_to_level1(&f, 2, &miller), Err(WeierstrassError::NotPIntegral { index: 2 }));
    }
}
