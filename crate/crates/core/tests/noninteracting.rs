use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rydberg_eit::algebra::OperatorLabel as L;
use rydberg_eit::noninteracting::*;
use rydberg_eit::oracle::order_extract;
use rydberg_eit::params::AtomParams;
use rydberg_eit::perturbative::eit_denominator;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn two_level_weak_limit() {
    let p = AtomParams::default().with_intensity(1e-10);
    let s = steady_state_two_level(&p).unwrap();
    let chi = s.sigma12() / p.omega_p;
    assert!(rel(chi, C64::new(-25.0, -1.0) / 626.0) < 1e-8);
    assert_eq!(s.sigma33(), 0.0);
    assert_eq!(s.sigma13(), C64::new(0.0, 0.0));
}

#[test]
fn undriven_atoms() {
    let p = AtomParams::default();
    for s in [steady_state_two_level(&p).unwrap(), steady_state_three_level(&p).unwrap()] {
        assert!(s.values.iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn two_level_saturation() {
    let mut last = 0.0;
    for x in [0.1, 1.0, 10.0, 100.0, 1e4, 1e6] {
        let s = steady_state_two_level(&AtomParams::default().with_intensity(x)).unwrap();
        assert!(s.sigma22() > last);
        last = s.sigma22();
    }
    assert!((last - 0.5).abs() < 1e-3);
}

#[test]
fn dark_state() {
    let p = AtomParams { gamma13: 0.0, delta3: 0.0, ..AtomParams::default() }.with_intensity(0.3);
    let s = steady_state_three_level(&p).unwrap();
    assert!(s.sigma12().norm() < 1e-12);
}

#[test]
fn three_level_without_control_is_two_level() {
    let p = AtomParams::default().with_omega_c(0.0).with_intensity(0.7);
    let a = steady_state_three_level(&p).unwrap();
    let b = steady_state_two_level(&p).unwrap();
    assert!((a.sigma12() - b.sigma12()).norm() < 1e-12);
    assert!((a.sigma22() - b.sigma22()).abs() < 1e-12);
    assert!(a.sigma33().abs() < 1e-12);
}

#[test]
fn first_order_coefficients() {
    let p = AtomParams::default();
    let c = perturbative_coefficients(&p).unwrap();
    let d = eit_denominator(&p);
    assert!(rel(c.s13_1, -p.omega_c / d) < 1e-12);
    assert!(rel(c.s12_1, C64::new(0.0, -1.0) * p.big_gamma(1, 3) / d) < 1e-12);
    let w = p.with_intensity(1e-12);
    let s = steady_state_three_level(&w).unwrap();
    assert!(rel(s.sigma13() / w.omega_p, c.s13_1) < 1e-9);
    assert!((s.sigma33() / 1e-12 - c.s33_2.re).abs() < 1e-6 * c.s33_2.re);
    assert!(c.s33_2.im.abs() < 1e-15 && c.s22_2.im.abs() < 1e-15);
    assert!((c.s23_2 - c.s32_2.conj()).norm() < 1e-14);
}

#[test]
fn third_order_from_full_solve() {
    for d3 in [1.0 / 3.0, -0.5, 1.5] {
        let p = AtomParams::default().with_delta3(d3);
        let c = perturbative_coefficients(&p).unwrap();
        let f = |x: f64| {
            let s = steady_state_three_level(&p.with_probe(C64::new(x, 0.0))).unwrap();
            s.sigma12()
        };
        let x0 = WEAK_PROBE_INTENSITY.sqrt();
        // the simple quotient check
        let simple = (f(x0) - x0 * c.s12_1) / (x0 * x0 * x0);
        assert!(rel(simple, c.s12_3) < 1e-5, "{simple} vs {}", c.s12_3);
        let e = order_extract(&f, 3, 1, x0).unwrap();
        assert!(rel(e.value, c.s12_3) < 1e-6, "{} vs {}", e.value, c.s12_3);
        let e1 = order_extract(&f, 1, 1, x0).unwrap();
        assert!(rel(e1.value, c.s12_1) < 1e-6);
    }
}

#[test]
fn truncation_error_is_fifth_order() {
    let p = AtomParams::default();
    let e = single_expansion(&p, 3).unwrap();
    let mut ratios = vec![];
    for x in [0.04, 0.02, 0.01] {
        let q = p.with_probe(C64::new(x, 0.0));
        let full = steady_state_three_level(&q).unwrap().sigma12();
        let trunc = evaluate_expansion(&e, q.omega_p, 3)[L::S12.index()];
        ratios.push((full - trunc).norm() / x.powi(5));
    }
    assert!((ratios[2] / ratios[1] - 1.0).abs() < 0.01, "{ratios:?}");
}

proptest! {
    #[test]
    fn physical_states(
        x in 0.0..4.0f64, phase in 0.0..std::f64::consts::TAU, oc in 0.0..5.0f64,
        d2 in -30.0..30.0f64, d3 in -3.0..3.0f64, g33 in 0.0..0.1f64,
    ) {
        let p = AtomParams {
            omega_c: oc, delta2: d2, delta3: d3, gamma33: g33,
            gamma23: rydberg_eit::params::default_gamma23(1.0, 0.1, g33),
            ..AtomParams::default()
        }.with_probe(C64::from_polar(x.sqrt(), phase));
        let s = steady_state_three_level(&p).unwrap();
        prop_assert!(s.check_physical(1e-10).is_ok());
        let t = steady_state_two_level(&p).unwrap();
        prop_assert!(t.check_physical(1e-10).is_ok());
    }
}
