use proptest::prelude::*;

use symorth::basis::{Basis, GenericBasis, SubclassBasis};
use symorth::numerics::{beta_fn, gamma_fn, integrate, integrate_with, log_gamma, IntervalSpec, QuadConfig};
use symorth::subclasses::{hermite_norm, SubclassSpec};
use symorth::verify::{
    boundary_term, check_weight, generic_weight, gram_matrix, parity_integral, parity_interval,
    self_adjoint_factor, weight_star, EntryStatus, SLCoeffs,
};
use symorth::{Error, Params};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn gamma_and_beta_values() {
    assert!(close(gamma_fn(0.5).unwrap(), std::f64::consts::PI.sqrt(), 1e-14));
    assert!(close(gamma_fn(5.0).unwrap(), 24.0, 1e-14));
    assert!(close(beta_fn(1.5, 2.0).unwrap(), 4.0 / 15.0, 1e-14));
    assert!(close(log_gamma(20.0).unwrap(), (1..20).map(|k| (k as f64).ln()).sum(), 1e-14));
    assert!(matches!(gamma_fn(-2.0), Err(Error::Pole { .. })));
}

#[test]
fn quadrature_examples() {
    let sym = IntervalSpec::symmetric(1.0).unwrap();
    assert_eq!(integrate(|x| x, &sym.clone().with_symmetry(symorth::numerics::Symmetry::Odd), 1e-12).unwrap().value, 0.0);
    let line = IntervalSpec::symmetric(f64::INFINITY).unwrap();
    let g = integrate(|x| (-x * x).exp(), &line, 1e-12).unwrap();
    assert!(close(g.value, std::f64::consts::PI.sqrt(), 1e-10));

    let flat = line.clone().with_flat_point(0.0);
    let u = 1.5;
    let r = integrate(
        |x: f64| if x == 0.0 { 0.0 } else { x.abs().powf(-2.0 * u) * (-1.0 / (x * x)).exp() },
        &flat,
        1e-12,
    )
    .unwrap();
    assert!(close(r.value, 1.0, 1e-8), "{}", r.value);

    let r = integrate_with(
        |x: f64| if x == 0.0 { 0.0 } else { x * x * x.abs().powf(-2.0) * (-1.0 / (x * x)).exp() },
        &flat,
        &QuadConfig::default(),
    )
    .unwrap();
    assert!(r.diverged && !r.converged);
}

#[test]
fn closed_moments_match_quadrature() {
    let specs = [
        SubclassSpec::gup(0.0, 0.0).unwrap(),
        SubclassSpec::gup(1.0, 1.5).unwrap(),
        SubclassSpec::gup(-0.3, -0.5).unwrap(),
        SubclassSpec::gup(2.5, 4.0).unwrap(),
        SubclassSpec::gup(0.25, 0.75).unwrap(),
        SubclassSpec::ghp(0.0).unwrap(),
        SubclassSpec::ghp(-0.4).unwrap(),
        SubclassSpec::ghp(1.0).unwrap(),
        SubclassSpec::ghp(3.5).unwrap(),
        SubclassSpec::ghp(0.7).unwrap(),
        SubclassSpec::finite_one(0.3, 2.0).unwrap(),
        SubclassSpec::finite_one(-1.0, 7.0).unwrap(),
        SubclassSpec::finite_one(0.0, 1.0).unwrap(),
        SubclassSpec::finite_one(-0.5, 1.5).unwrap(),
        SubclassSpec::finite_one(0.45, 0.5).unwrap(),
        SubclassSpec::finite_two(1.5).unwrap(),
        SubclassSpec::finite_two(3.0).unwrap(),
        SubclassSpec::finite_two(4.5).unwrap(),
        SubclassSpec::finite_two(0.9).unwrap(),
        SubclassSpec::finite_two(6.0).unwrap(),
    ];
    for spec in specs {
        let quad = integrate_with(
            |x| spec.weight_at(x).unwrap(),
            &spec.pair_interval(0, 0),
            &QuadConfig::with_tolerances(1e-12, 1e-10),
        )
        .unwrap();
        assert!(quad.converged, "{spec}: {quad:?}");
        assert!(close(quad.value, spec.moment_zero().unwrap(), 1e-8), "{spec}: {} vs {}", quad.value, spec.moment_zero().unwrap());
    }
}

#[test]
fn generic_weight_reproduces_subclass_weights() {
    let specs = [
        SubclassSpec::gup(1.0, 1.5).unwrap(),
        SubclassSpec::ghp(2.0).unwrap(),
        SubclassSpec::finite_one(-1.0, 7.0).unwrap(),
        SubclassSpec::finite_two(4.5).unwrap(),
    ];
    for spec in specs {
        let params = spec.params();
        for x in [0.1, 0.35, 0.8, -0.6] {
            let a = generic_weight(&params, x);
            let b = spec.weight_at(x).unwrap();
            assert!(close(a, b, 1e-13), "{spec} {x}: {a} vs {b}");
        }
    }
}

#[test]
fn self_adjoint_factor_numeric_and_closed_agree() {
    let spec = SubclassSpec::gup(1.0, 1.0).unwrap();
    let (p, q, r, s) = spec.params().as_tuple();
    let numeric = SLCoeffs::new(
        Box::new(move |y| y * (p * y + q)),
        Box::new(move |y| r * y + s),
        Box::new(|y| y),
        Box::new(|_| 0.0),
        Box::new(move |_| -s),
        Box::new(move |n| -(n as f64) * (r + (n as f64 - 1.0) * p)),
        1.0,
    )
    .unwrap();
    let closed = SLCoeffs::for_subclass(&spec).unwrap();
    let c_half = self_adjoint_factor(&closed, 0.5).unwrap();
    let n_half = self_adjoint_factor(&numeric, 0.5).unwrap();
    for x in [0.1, 0.3, 0.7, 0.9, -0.45] {
        let a = self_adjoint_factor(&closed, x).unwrap() / c_half;
        let b = self_adjoint_factor(&numeric, x).unwrap() / n_half;
        assert!(close(a, b, 1e-8), "{x}: {a} vs {b}");
    }

    let trivial = SLCoeffs::new(
        Box::new(|_| 1.0),
        Box::new(|_| 0.0),
        Box::new(|_| 1.0),
        Box::new(|_| 0.0),
        Box::new(|_| 0.0),
        Box::new(|_| 0.0),
        1.0,
    )
    .unwrap();
    assert_eq!(self_adjoint_factor(&trivial, 0.3).unwrap(), 1.0);
    assert_eq!(weight_star(&trivial, -0.8).unwrap(), 1.0);
}

#[test]
fn nonpositive_weight_is_reported() {
    let sl = SLCoeffs::new(
        Box::new(|_| 1.0),
        Box::new(|_| 0.0),
        Box::new(|y| y - 0.25),
        Box::new(|_| 0.0),
        Box::new(|_| 0.0),
        Box::new(|_| 0.0),
        1.0,
    )
    .unwrap();
    assert!(matches!(weight_star(&sl, 0.1), Err(Error::NonpositiveWeight { .. })));
    let check = check_weight(&sl, &[0.9, 0.2]);
    assert!(!check.positive);
    assert_eq!(check.offending, Some(0.2));
}

#[test]
fn boundary_terms() {
    let value_and_slope = |spec: SubclassSpec, n: usize| {
        let poly = symorth::core_class::monic_coeffs(&spec.params(), n).unwrap();
        let d = poly.derivative();
        move |x: f64| (poly.eval(&x), d.eval(&x))
    };
    let gup = SubclassSpec::gup(1.0, 1.0).unwrap();
    let sl = SLCoeffs::for_subclass(&gup).unwrap();
    let (a, b) = (value_and_slope(gup, 2), value_and_slope(gup, 4));
    assert!(boundary_term(&sl, &a, &b, 1.0).unwrap().vanishes);

    let f2 = SubclassSpec::finite_two(4.5).unwrap();
    let sl = SLCoeffs::for_subclass(&f2).unwrap();
    let (a, b) = (value_and_slope(f2, 2), value_and_slope(f2, 2));
    assert!(boundary_term(&sl, &a, &b, 1.0).unwrap().vanishes);

    let f2 = SubclassSpec::finite_two(3.0).unwrap();
    let sl = SLCoeffs::for_subclass(&f2).unwrap();
    let (a, b) = (value_and_slope(f2, 2), value_and_slope(f2, 4));
    let bt = boundary_term(&sl, &a, &b, 1.0).unwrap();
    assert!(!bt.vanishes, "{bt:?}");
}

#[test]
fn parity_integral_short_circuits_and_cancels() {
    let ghp = SubclassSpec::ghp(1.0).unwrap();
    let sl = SLCoeffs::for_subclass(&ghp).unwrap();
    let basis = SubclassBasis::new(ghp).unwrap();
    let (p2, p3, p4) = (basis.function(2).unwrap(), basis.function(3).unwrap(), basis.function(4).unwrap());
    let panicking = |_: f64| -> f64 { panic!("equal parities must not be integrated") };
    assert_eq!(parity_integral(&sl, &panicking, &panicking, 2, 4, &parity_interval(&ghp, 2, 4)).unwrap(), 0.0);
    assert_eq!(parity_integral(&sl, &p2, &p4, 2, 4, &parity_interval(&ghp, 2, 4)).unwrap(), 0.0);
    let f = parity_integral(&sl, &p2, &p3, 2, 3, &parity_interval(&ghp, 2, 3)).unwrap();
    assert!(f.abs() <= 1e-10);
}

#[test]
fn gram_reports() {
    let hermite = SubclassBasis::new(SubclassSpec::ghp(0.0).unwrap()).unwrap();
    let report = gram_matrix(&hermite, 8, 1e-8);
    assert!(report.pass, "{:?}", report.failures);
    for n in 0..=8 {
        assert!(close(report.value(n, n), hermite_norm(n), 1e-10));
        for m in 0..=8 {
            assert_eq!(report.value(n, m), report.value(m, n));
        }
    }

    let gup = SubclassSpec::gup(0.5, 0.0).unwrap();
    let zero = gram_matrix(&SubclassBasis::new(gup).unwrap(), 0, 1e-8);
    assert_eq!(zero.entries.len(), 1);
    assert!(close(zero.value(0, 0), gup.moment_zero().unwrap(), 1e-9));

    let f2 = SubclassBasis::new(SubclassSpec::finite_two(3.0).unwrap()).unwrap();
    let beyond = gram_matrix(&f2, 3, 1e-7);
    assert!(!beyond.pass);
    assert_eq!(beyond.entry(3, 3).status, EntryStatus::Diverged);
    assert!(!beyond.entry(3, 3).validity.as_ref().unwrap().integrable);

    let clean = gram_matrix(&SubclassBasis::new(SubclassSpec::finite_two(5.0).unwrap()).unwrap(), 4, 1e-7);
    assert!(clean.pass, "{:?}", clean.failures);
}

#[test]
fn generic_basis_matches_subclass() {
    let spec = SubclassSpec::gup(1.0, 0.5).unwrap();
    let generic = GenericBasis::new(spec.params(), 1.0).unwrap();
    assert!(close(generic.moment(), spec.moment_zero().unwrap(), 1e-9));
    for n in 0..=5 {
        assert!(close(generic.closed_norm(n).unwrap(), spec.norm_squared(n).unwrap().value, 1e-9));
    }
    let report = gram_matrix(&generic, 5, 1e-7);
    assert!(report.pass, "{:?}", report.failures);

    let divergent = Params::new(0.0, 1.0, 2.0, 0.0).unwrap();
    assert!(matches!(
        GenericBasis::new(divergent, f64::INFINITY),
        Err(Error::DivergentMoment(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn subclass_weights_are_even_and_positive(
        u in -0.45f64..3.0, v in -0.9f64..3.0, x in 0.01f64..0.99
    ) {
        for spec in [
            SubclassSpec::gup(u, v).unwrap(),
            SubclassSpec::ghp(u).unwrap(),
        ] {
            let sl = SLCoeffs::for_subclass(&spec).unwrap();
            let check = check_weight(&sl, &[x]);
            prop_assert!(check.positive && check.even, "{} {:?}", spec, check);
        }
    }

    #[test]
    fn gup_gram_is_diagonal(u in -0.4f64..2.0, v in -0.5f64..2.0) {
        let basis = SubclassBasis::new(SubclassSpec::gup(u, v).unwrap()).unwrap();
        let report = gram_matrix(&basis, 5, 1e-7);
        prop_assert!(report.pass, "{:?}", report.failures);
    }

    #[test]
    fn ghp_norm_ratios_follow_the_recurrence(u in -0.4f64..3.0) {
        let spec = SubclassSpec::ghp(u).unwrap();
        let report = gram_matrix(&SubclassBasis::new(spec).unwrap(), 6, 1e-7);
        prop_assert!(report.pass, "{:?}", report.failures);
        for n in 1..=6 {
            let c = symorth::core_class::recurrence_c(&spec.params(), n).unwrap();
            let ratio = report.value(n, n) / report.value(n - 1, n - 1);
            prop_assert!(close(ratio, -c, 1e-7));
        }
    }
}
