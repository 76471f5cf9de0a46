use wplus_core::algebra::field::{primes_between, PrimeField};
use wplus_core::modsym::{good_basis, wt_infinity};
use wplus_core::supersingular::classpoly::fixed_point_poly;
use wplus_core::supersingular::split::ss_polys_for;
use wplus_core::weierstrass::{verify, Computed, VerifyOptions, WeierstrassError};

#[test]
fn small_primes_all_pass() {
    for p in primes_between(5, 113) {
        let r = verify(p, &VerifyOptions::default(), &Computed).unwrap();
        assert!(r.good_basis, "p = {p}");
        assert!(r.passed(), "p = {p}: {:?}", r.failed_checks());
        let g = r.g as i64;
        assert_eq!(r.f_p.deg() as i64, 2 * (g * g * g - g - r.wt_inf), "p = {p}");
        assert_eq!(r.f_p, r.split.s_q.pow((g * g - g) as u64).mul(&r.h.mul(&r.h)), "p = {p}");
    }
}

#[test]
fn paranoid_mode_agrees() {
    for p in [67u64, 97, 109] {
        let plain = verify(p, &VerifyOptions::default(), &Computed).unwrap();
        let opts = VerifyOptions {
            paranoid: true,
            ..VerifyOptions::default()
        };
        let strict = verify(p, &opts, &Computed).unwrap();
        assert!(strict.passed(), "p = {p}: {:?}", strict.failed_checks());
        assert_eq!(strict.checks.get("square_divisor_lemma"), Some(&true));
        assert_eq!(plain.f_p, strict.f_p);
        assert_eq!(plain.h, strict.h);
    }
}

#[test]
fn seed_does_not_change_results() {
    let a = verify(73, &VerifyOptions::default(), &Computed).unwrap();
    let opts = VerifyOptions {
        seed: 12345,
        ..VerifyOptions::default()
    };
    let b = verify(73, &opts, &Computed).unwrap();
    assert_eq!((a.f_p, a.h), (b.f_p, b.h));
}

#[test]
fn infinity_weight_matches_pivots() {
    // pivots computed independently with PARI/GP
    for (p, pivots) in [(109u64, vec![1i64, 2, 4]), (173, vec![1, 2, 3, 6]), (197, vec![1, 2, 3, 4, 5, 7])] {
        let b = good_basis(p, 60).unwrap();
        assert_eq!(b.pivots, pivots, "p = {p}");
        let expected: i64 = pivots.iter().enumerate().map(|(j, c)| c - j as i64 - 1).sum();
        assert_eq!(wt_infinity(&b), expected);
    }
}

#[test]
fn fixed_points_square_to_linear_part() {
    for p in primes_between(5, 150) {
        let split = ss_polys_for(p).unwrap();
        let h = fixed_point_poly(p).unwrap();
        let field = PrimeField::new(p).unwrap();
        assert_eq!(h.reduce_mod(field), split.s_l.mul(&split.s_l), "p = {p}");
    }
}

#[test]
fn composite_and_tiny_inputs_rejected() {
    for n in [1u64, 2, 3, 4, 91, 221] {
        assert!(matches!(
            verify(n, &VerifyOptions::default(), &Computed),
            Err(WeierstrassError::InvalidPrime(_))
        ));
    }
}
