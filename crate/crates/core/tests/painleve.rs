use painleve_core::potentials::{consistency_offset, PotentialSpec};
use painleve_core::special::{p4_integrate, p4_residual, P4Solution, Rational};
use painleve_core::{CaseId, Error};

#[test]
fn integrator_tracks_rational_solutions() {
    for r in [Rational::A, Rational::B] {
        let exact = P4Solution::rational(r);
        let (f0, fp0) = exact.eval(1.0).unwrap();
        let sol = p4_integrate(exact.params, 1.0, f0, fp0, &[4.0], 1e-14).unwrap();
        for i in 0..=60 {
            let z = 1.0 + 0.05 * i as f64;
            let d = (sol.eval(z).unwrap().0 - exact.eval(z).unwrap().0).abs();
            assert!(d < 1e-8, "{r:?} at {z}: {d:e}");
        }
    }
}

#[test]
fn integrated_jet_satisfies_the_equation() {
    let exact = P4Solution::rational(Rational::B);
    let (f0, fp0) = exact.eval(0.5).unwrap();
    let sol = p4_integrate(exact.params, 0.5, f0, fp0, &[0.1, 3.0], 1e-12).unwrap();
    for z in [0.15, 0.4, 1.0, 1.7, 2.95] {
        let j = sol.jet(z).unwrap();
        assert!(p4_residual(j.v, j.d1, j.d2, z, sol.params).unwrap().abs() < 1e-12);
    }
}

#[test]
fn zero_of_case_a_halts_with_partial_trajectory() {
    let exact = P4Solution::rational(Rational::A);
    let (f0, fp0) = exact.eval(1.0).unwrap();
    let halted = p4_integrate(exact.params, 1.0, f0, fp0, &[0.5, 4.0], 1e-12).unwrap_err();
    let Error::ZeroCrossing { z } = halted.reason else { panic!("{:?}", halted.reason) };
    assert!((z - 0.5f64.sqrt()).abs() < 1e-3, "{z}");
    // the forward half is still usable
    let (f, _) = halted.partial.eval(3.0).unwrap();
    assert!((f - exact.eval(3.0).unwrap().0).abs() < 1e-8);
    assert!(halted.partial.eval(0.6).is_err());
}

#[test]
fn p4_route_matches_closed_forms_at_non_unit_scales() {
    let grid: Vec<f64> = (0..161).map(|i| -4.0 + 0.05 * i as f64 + 0.003).collect();
    for case in CaseId::all(0.3).into_iter().chain(CaseId::all(-1.0)) {
        let spec = PotentialSpec::catalogue(case, 1.3, 0.7).unwrap();
        let c = consistency_offset(&spec, case, &grid).unwrap();
        assert!(c.abs() < 1e-9, "{case}: {c}");
    }
}

#[test]
fn erfc_family_rejects_t_at_one_half() {
    assert!(matches!(P4Solution::erfc_family(0.5), Err(Error::Config(_))));
    assert!(P4Solution::erfc_family(0.49).is_ok());
}
