use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rydberg_eit::algebra::{LadderVariant, OperatorLabel};
use rydberg_eit::collisional::*;
use rydberg_eit::error::Error;
use rydberg_eit::linalg::{self, CMatrix, CVector};
use rydberg_eit::noninteracting::{solve_single_atom, steady_state_three_level};
use rydberg_eit::params::{AtomParams, InteractionParams, StatePreset};
use rydberg_eit::quadrature::RadialOptions;

const ZERO: C64 = C64::new(0.0, 0.0);

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn preset(n: u32) -> (AtomParams, InteractionParams) {
    let s = StatePreset::lookup(n).unwrap();
    (s.atom(), s.interaction())
}

fn reduced_vs_full(p: &AtomParams, k: f64) -> f64 {
    let pq = assemble_pq(p, LadderVariant::Standard).unwrap();
    let red = schur_reduce(&pq).unwrap();
    let st = solve_single_atom(p, &[ZERO; 4]).unwrap();
    let r = pq.full_source(&st, &[C64::new(0.01, -0.003), C64::new(0.01, 0.003), ZERO, ZERO]);
    let (rp, rq) = pq.split_source(&r);
    let kappa = pq.pairs.interaction();
    let full = linalg::solve(&(pq.full_matrix() + CMatrix::from_diagonal(&(&kappa * C64::new(k, 0.0)))), &(-&r), "full").unwrap();
    let np = pq.p_labels.len();
    let lhs = CMatrix::identity(np, np) * C64::new(k, 0.0) - &red.m;
    let x = linalg::solve(&lhs, &red.reduced_source(&rp, &rq), "reduced").unwrap();
    let direct = CVector::from_fn(np, |i, _| full[pq.p_labels[i].index()]);
    (x - &direct).norm() / direct.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schur_reduction_matches_full_solve(k in -200.0f64..50.0, x in 0.01f64..2.0) {
        let (atom, _) = preset(56);
        let p = AtomParams { gamma33: 0.05, ..atom.with_intensity(x) };
        prop_assume!(k.abs() > 1e-6);
        prop_assert!(reduced_vs_full(&p, k) < 1e-8);
    }

    #[test]
    fn f_lambda_scaling(re in 0.01f64..50.0, im in -50.0f64..50.0) {
        let inter = InteractionParams::default();
        let lam = C64::new(re, im);
        let a = f_lambda(lam, &inter).unwrap();
        let b = f_lambda(4.0 * lam, &inter).unwrap();
        prop_assert!(rel(b, 0.5 * a) < 1e-13);
        // conjugate symmetric
        prop_assert!(rel(f_lambda(lam.conj(), &inter).unwrap(), a.conj()) < 1e-13);
    }
}

#[test]
fn schur_reduction_needs_ground_state_decay() {
    let (atom, _) = preset(50);
    let pq = assemble_pq(&atom.with_intensity(0.5), LadderVariant::Standard).unwrap();
    assert!(matches!(schur_reduce(&pq), Err(Error::IllConditioned { .. })));
    assert_eq!((pq.p_labels.len(), pq.q_labels.len()), (10, 26));
}

#[test]
fn spectral_decomposition_identities() {
    let (atom, inter) = preset(50);
    let p = AtomParams { gamma33: 0.05, ..atom.with_intensity(0.5) };
    let red = schur_reduce(&assemble_pq(&p, LadderVariant::Standard).unwrap()).unwrap();
    let s = spectral_decompose(&red.m, 1e-10).unwrap();
    let lam = CMatrix::from_diagonal(&CVector::from_vec(s.eigenvalues.clone()));
    let back = &s.u_inv * lam * &s.u;
    assert!((back - &red.m).norm() < 1e-9 * red.m.norm());
    let trace: C64 = s.eigenvalues.iter().sum();
    assert!(rel(trace, red.m.trace()) < 1e-10);
    assert!(s.integral_operator(&inter).is_ok());
}

#[test]
fn f_lambda_values_and_branches() {
    let inter = InteractionParams { c6: 5000.0, eta: 0.04 };
    assert!((f_lambda(C64::new(1.0, 0.0), &inter).unwrap().re - 18.6103).abs() < 1e-4);
    assert!(matches!(f_lambda(ZERO, &inter), Err(Error::BranchAmbiguity { .. })));
    assert!(matches!(f_lambda(C64::new(-2.0, 0.0), &inter), Err(Error::BranchAmbiguity { .. })));
    assert_eq!(f_lambda(C64::new(1.0, 1.0), &InteractionParams { c6: 0.0, ..inter }).unwrap(), ZERO);
}

#[test]
fn spectral_and_quadrature_kernels_agree() {
    let (atom, inter) = preset(50);
    let p = AtomParams { gamma33: 0.05, ..atom.with_intensity(0.3) };
    let q = RadialOptions { rel_tol: 1e-6, ..Default::default() };
    let a = build_kernel(&p, &inter, KernelRoute::Spectral, 1e-10, q).unwrap();
    let b = build_kernel(&p, &inter, KernelRoute::Quadrature, 1e-10, q).unwrap();
    assert_eq!(a.route, KernelRoute::Spectral);
    let d = (&a.matrix - &b.matrix).norm() / b.matrix.norm();
    assert!(d < 1e-5, "{d:e}");
}

#[test]
fn weak_probe_v13_frozen() {
    let (atom, inter) = preset(50);
    let v = solve_collisional_integrals(&atom.with_intensity(1e-4), &inter, &SolverOptions::default()).unwrap();
    assert!(rel(v.integrals.v13, C64::new(6.2542e-7, -2.392e-8)) < 2e-4, "{}", v.integrals.v13);
    assert!(v.regularized.is_some());
}

#[test]
fn integrals_are_conjugate_pairs() {
    let (atom, inter) = preset(61);
    let v = solve_collisional_integrals(&atom.with_intensity(2.0), &inter, &SolverOptions::default()).unwrap();
    let i = v.integrals;
    assert!((i.v31 - i.v13.conj()).norm() < 1e-8 * i.v13.norm());
    assert!((i.v32 - i.v23.conj()).norm() < 1e-8 * i.v13.norm());
    assert!(i.v23.norm() < 0.2 * i.v13.norm());
    let st = v.state;
    assert!((st.get(OperatorLabel::S21) - st.sigma12().conj()).norm() < 1e-10);
}

#[test]
fn no_interaction_gives_three_level_state() {
    let (atom, inter) = preset(50);
    let p = atom.with_intensity(1.0);
    let v = solve_collisional_integrals(&p, &InteractionParams { c6: 0.0, ..inter }, &SolverOptions::default()).unwrap();
    assert!(v.integrals.as_array().iter().all(|z| z.norm() < 1e-14));
    let s3 = steady_state_three_level(&p).unwrap();
    let back = reconstruct_averages(&p, &v.integrals).unwrap();
    assert!((back.sigma12() - s3.sigma12()).norm() < 1e-14);
}

#[test]
fn solve_is_deterministic() {
    let (atom, inter) = preset(56);
    let p = atom.with_intensity(3.0);
    let a = solve_collisional_integrals(&p, &inter, &SolverOptions::default()).unwrap();
    let b = solve_collisional_integrals(&p, &inter, &SolverOptions::default()).unwrap();
    assert_eq!(a.integrals, b.integrals);
}

#[test]
fn regularized_limit_matches_small_decay() {
    let (atom, inter) = preset(50);
    let p = atom.with_intensity(0.5);
    let opts = SolverOptions::default();
    let zero = solve_collisional_integrals(&p, &inter, &opts).unwrap().integrals.v13;
    let small = solve_collisional_integrals(&AtomParams { gamma33: 2e-6, ..p }, &inter, &opts).unwrap().integrals.v13;
    assert!(rel(zero, small) < 1e-4, "{zero} vs {small}");
}

#[test]
fn suppression_grows_with_c6() {
    let (atom, inter) = preset(50);
    let p = atom.with_intensity(1.0);
    let opts = SolverOptions::default();
    let s33: Vec<f64> = [1000.0, 5000.0, 20000.0]
        .iter()
        .map(|&c6| solve_collisional_integrals(&p, &InteractionParams { c6, ..inter }, &opts).unwrap().state.sigma33())
        .collect();
    assert!(s33[0] > s33[1] && s33[1] > s33[2], "{s33:?}");
    assert!(s33[2] > 0.0);
}

#[test]
fn strong_probe_points_frozen() {
    let (atom, inter) = preset(50);
    let opts = SolverOptions::default();
    for (x, v13, s33) in [(1.0, 6.60518e-2, 5.4742e-2), (26.0, 4.07114e-1, 1.6376e-1)] {
        let s = solve_collisional_integrals(&atom.with_intensity(x), &inter, &opts).unwrap();
        assert!((s.integrals.v13.re - v13).abs() < 1e-4 * v13, "I = {x}: {}", s.integrals.v13);
        assert!((s.state.sigma33() - s33).abs() < 1e-3 * s33, "I = {x}: {}", s.state.sigma33());
    }
}

#[test]
fn subtracted_ladder_stays_close() {
    let (atom, inter) = preset(46);
    let p = atom.with_intensity(0.5);
    let std = solve_collisional_integrals(&p, &inter, &SolverOptions::default()).unwrap().integrals.v13;
    let opts = SolverOptions { ladder: LadderVariant::Subtracted, ..SolverOptions::default() };
    let sub = solve_collisional_integrals(&p, &inter, &opts).unwrap().integrals.v13;
    assert!(sub.re.is_finite() && sub.im.is_finite());
    assert!(rel(sub, std) < 0.5, "{sub} vs {std}");
}

#[test]
fn invalid_inputs() {
    let (atom, inter) = preset(50);
    let opts = SolverOptions::default();
    assert!(solve_collisional_integrals(&atom, &InteractionParams { eta: -1.0, ..inter }, &opts).is_err());
    let bad = AtomParams { delta2: f64::NAN, ..atom };
    assert!(solve_collisional_integrals(&bad, &inter, &opts).is_err());
}
