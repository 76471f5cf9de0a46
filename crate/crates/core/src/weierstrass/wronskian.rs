//! θ-Wronskians det[θ^i f_j] of q-expansions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::WeierstrassError;
use crate::algebra::field::{Field, Rat, Rationals};
use crate::algebra::series::{QExpansion, Series};
use crate::modsym::GoodBasis;

/// det[θ^i f_j] for 0 ≤ i < g, together with its leading coefficient.
///
/// Elimination runs over Laurent series, pivoting on the smallest valuation,
/// so the result is exact up to its reported precision.
pub fn wronskian<F: Field>(forms: &[Series<F>]) -> Result<(Series<F>, F::Elem), WeierstrassError> {
    let g = forms.len();
    if g == 0 {
        return Err(WeierstrassError::ZeroWronskian);
    }
    let field = forms[0].field().clone();
    // m[i][j] = θ^i f_j
    let mut m: Vec<Vec<Series<F>>> = Vec::with_capacity(g);
    m.push(forms.to_vec());
    for i in 1..g {
        let next = m[i - 1].iter().map(|f| f.theta()).collect();
        m.push(next);
    }
    let mut det: Option<Series<F>> = None;
    let mut negate = false;
    for col in 0..g {
        let pivot = (col..g)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].valuation())
            .ok_or(WeierstrassError::ZeroWronskian)?;
        if pivot != col {
            m.swap(pivot, col);
            negate = !negate;
        }
        let inv = m[col][col].inverse()?;
        for r in col + 1..g {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&inv)?;
            for c in col + 1..g {
                let t = factor.mul(&m[col][c])?;
                m[r][c] = m[r][c].sub(&t)?;
            }
        }
        det = Some(match det {
            None => m[col][col].clone(),
            Some(d) => d.mul(&m[col][col])?,
        });
    }
    let mut det = det.expect("g >= 1");
    if negate {
        det = det.neg();
    }
    let lead = det
        .leading_coefficient()
        .cloned()
        .ok_or(WeierstrassError::ZeroWronskian)?;
    if field.is_zero(&lead) {
        return Err(WeierstrassError::ZeroWronskian);
    }
    Ok((det, lead))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WronskianData {
    pub p: u64,
    pub g: usize,
    /// Normalized to leading coefficient 1.
    pub w_p: QExpansion,
    /// Leading coefficient of det[θ^i f_j].
    pub v: Rat,
    /// ∏_{j<k} (c_k - c_j).
    pub vandermonde: BigInt,
    pub p_integral: bool,
}

impl WronskianData {
    pub fn leading_is_vandermonde(&self) -> bool {
        self.v == Rat::from_integer(self.vandermonde.clone())
    }

    pub fn p_divides_v(&self) -> bool {
        (&self.vandermonde % BigInt::from(self.p)).is_zero()
    }

    /// Σ c_i, the expected valuation.
    pub fn valuation(&self) -> i64 {
        self.w_p.valuation()
    }
}

pub fn vandermonde(pivots: &[i64]) -> BigInt {
    let mut v = BigInt::one();
    for k in 0..pivots.len() {
        for j in 0..k {
            v *= BigInt::from(pivots[k] - pivots[j]);
        }
    }
    v
}

/// The rational Wronskian of a good basis, at the basis precision.
pub fn rational_wronskian(basis: &GoodBasis) -> Result<WronskianData, WeierstrassError> {
    wronskian_of(basis, &basis.forms)
}

/// The rational Wronskian known through roughly `terms` coefficients past its
/// leading one. Elimination cost grows like the cube of the input precision.
pub fn rational_wronskian_window(basis: &GoodBasis, terms: i64) -> Result<WronskianData, WeierstrassError> {
    let top = basis.pivots.last().copied().unwrap_or(0);
    let prec = (top + 1 + terms.max(1)).min(basis.precision);
    let forms: Vec<QExpansion> = basis.forms.iter().map(|f| f.truncate(prec)).collect();
    wronskian_of(basis, &forms)
}

fn wronskian_of(basis: &GoodBasis, forms: &[QExpansion]) -> Result<WronskianData, WeierstrassError> {
    let (w, v) = wronskian(forms)?;
    let inv = Rationals.inv(&v).ok_or(WeierstrassError::ZeroWronskian)?;
    let w_p = w.scale(&inv);
    Ok(WronskianData {
        p: basis.p,
        g: basis.g,
        p_integral: w_p.is_p_integral(basis.p),
        w_p,
        v,
        vandermonde: vandermonde(&basis.pivots),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::PrimeField;
    use crate::level1::delta;
    use crate::modsym::good_basis;

    fn q(c: &[i64], prec: i64) -> QExpansion {
        Series::from_coeffs(
            Rationals,
            0,
            c.iter().map(|&x| Rat::from_integer(x.into())).collect(),
            prec,
        )
    }

    #[test]
    fn theta_of_delta() {
        let t = delta(5).theta();
        assert_eq!(t.coeffs_range(0, 5), q(&[0, 1, -48, 756, -5888], 5).coeffs_range(0, 5));
    }

    #[test]
    fn single_form() {
        let f = q(&[0, 1, 2, 3], 4);
        let (w, v) = wronskian(std::slice::from_ref(&f)).unwrap();
        assert_eq!(w, f);
        assert!(v.is_one());
    }

    #[test]
    fn level_67() {
        let b = good_basis(67, 30).unwrap();
        let data = rational_wronskian(&b).unwrap();
        assert_eq!(
            data.w_p.coeffs_range(0, 9),
            q(&[0, 0, 0, 1, -2, -6, 6, 15, 8], 9).coeffs_range(0, 9)
        );
        assert!(data.leading_is_vandermonde() && data.p_integral && !data.p_divides_v());
        assert_eq!(data.valuation(), 3);
    }

    #[test]
    fn vandermonde_leading_term() {
        // f_j = q^{c_j}: det[c_j^i] q^{Σ c}
        let pivots = [1i64, 3, 4, 7];
        let forms: Vec<QExpansion> = pivots
            .iter()
            .map(|&c| Series::monomial(Rationals, c, Rat::one(), 30))
            .collect();
        let (w, v) = wronskian(&forms).unwrap();
        assert_eq!(v, Rat::from_integer(vandermonde(&pivots)));
        assert_eq!(w.valuation(), 15);
        assert_eq!(vandermonde(&pivots), BigInt::from(2 * 3 * 6 * 1 * 4 * 3));
    }

    #[test]
    fn dependent_forms_rejected() {
        let f = q(&[0, 1, 5, 2], 20);
        assert_eq!(wronskian(&[f.clone(), f.scale(&Rat::from_integer(3.into()))]), Err(WeierstrassError::ZeroWronskian));
    }

    #[test]
    fn mod_p_matches_reduction() {
        let fp = PrimeField::new(67).unwrap();
        let b = good_basis(67, 30).unwrap();
        let (w, _) = wronskian(&b.forms).unwrap();
        let reduced: Vec<_> = b.forms.iter().map(|f| f.reduce_mod(&fp).unwrap()).collect();
        let (wp, _) = wronskian(&reduced).unwrap();
        assert_eq!(w.reduce_mod(&fp).unwrap(), wp);
    }

    #[test]
    fn window_is_a_truncation() {
        let b = good_basis(109, 40).unwrap();
        let full = rational_wronskian(&b).unwrap();
        let short = rational_wronskian_window(&b, 8).unwrap();
        assert!(short.w_p.precision() >= short.w_p.valuation() + 8);
        assert!(short.w_p.precision() < full.w_p.precision());
        assert!(full.w_p.agrees_with(&short.w_p, short.w_p.precision()));
        assert_eq!(short.v, full.v);
        assert_eq!(short.valuation(), 1 + 2 + 4);
    }
}
