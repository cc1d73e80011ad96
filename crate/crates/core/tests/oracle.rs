use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rydberg_eit::algebra::{OperatorLabel, PairLabel};
use rydberg_eit::error::Error;
use rydberg_eit::noninteracting::steady_state_three_level;
use rydberg_eit::oracle::*;
use rydberg_eit::params::{AtomParams, InteractionParams};

/// γ23 chosen so that levels 1 and 2 dephase equally against level 3.
fn params(x: f64, gamma33: f64) -> AtomParams {
    AtomParams { gamma33, gamma23: 1.1, ..AtomParams::default() }.with_intensity(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_atom_matches_bloch_solve(x in 0.0f64..5.0, g33 in 0.0f64..0.1, d3 in -2.0f64..2.0) {
        let p = params(x, g33).with_delta3(d3);
        let rho = single_atom_density_matrix(&p).unwrap();
        let s = steady_state_three_level(&p).unwrap();
        for l in OperatorLabel::BASIS {
            prop_assert!((single_average(&rho, l) - s.get(l)).norm() < 1e-10);
        }
    }

    #[test]
    fn two_atom_marginals_match_single_atom(x in 0.0f64..3.0, k in -50.0f64..50.0) {
        let p = params(x, 0.02);
        let st = two_atom_steady_state_k(&p, k).unwrap();
        prop_assert!(st.check(1e-8).is_ok());
        if k == 0.0 {
            let s = steady_state_three_level(&p).unwrap();
            for l in OperatorLabel::BASIS {
                prop_assert!((st.single(l) - s.get(l)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn no_probe_leaves_atoms_in_ground_state() {
    let p = params(0.0, 0.0);
    let st = two_atom_steady_state_k(&p, -3.0).unwrap();
    assert!((st.rho[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
    let v = st.pair_vector();
    assert_eq!(v.len(), 36);
    assert!(v.iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn separation_form_matches_interaction_form() {
    let p = params(0.5, 0.0);
    let inter = InteractionParams::default();
    let r = 3.7;
    let a = two_atom_steady_state(&p, &inter, r).unwrap();
    let b = two_atom_steady_state_k(&p, -inter.c6 / r.powi(6)).unwrap();
    let l = PairLabel::new(OperatorLabel::S13, OperatorLabel::S33);
    assert!((a.pair(l) - b.pair(l)).norm() < 1e-14);
    assert!(two_atom_steady_state(&p, &inter, 0.0).is_err());
}

#[test]
fn extraction_of_known_series() {
    let f = |x: f64| C64::new(x + x.powi(3) - 2.0 * x.powi(5), 0.0);
    let one = order_extract(&f, 1, 1, 0.1).unwrap();
    assert!((one.value - C64::new(1.0, 0.0)).norm() < 1e-10);
    let three = order_extract(&f, 3, 1, 0.1).unwrap();
    assert!((three.value - C64::new(1.0, 0.0)).norm() < 1e-7);
    assert!(matches!(order_extract(&f, 2, 1, 0.1), Err(Error::Domain(_))));
    let nan = |_: f64| C64::new(f64::NAN, 0.0);
    assert!(matches!(order_extract(&nan, 1, 1, 0.1), Err(Error::Extrapolation(_))));
}

#[test]
fn reference_quadrature_of_simple_pole() {
    let inter = InteractionParams::default();
    let lam = C64::new(0.7, -0.2);
    let g = |k: f64| C64::new(1.0, 0.0) / (k - lam);
    let q = quadrature_reference(&g, inter.c6, inter.eta, lam.norm(), 1e-11).unwrap();
    let closed = rydberg_eit::collisional::f_lambda(lam, &inter).unwrap();
    assert!((q.value - closed).norm() < 1e-9 * closed.norm());
    let zero = quadrature_reference(&g, 0.0, inter.eta, 1.0, 1e-10).unwrap();
    assert_eq!(zero.value, C64::new(0.0, 0.0));
}

#[test]
fn jump_operators_reject_narrow_coherences() {
    let p = AtomParams { gamma33: 0.05, ..AtomParams::default() };
    assert!(jump_operators(&AtomParams { gamma23: 1.1 - 0.025, ..p }).is_err());
    let p = AtomParams { gamma12: 0.5, ..AtomParams::default() };
    assert!(matches!(jump_operators(&p), Err(Error::InvalidParameter(_))));
    assert!(jump_operators(&AtomParams::default()).unwrap().len() >= 2);
}
