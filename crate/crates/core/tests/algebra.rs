use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rydberg_eit::algebra::*;
use rydberg_eit::params::AtomParams;

const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() < 1e-12 * (1.0 + b.norm())
}

fn params() -> AtomParams {
    AtomParams { gamma33: 0.05, ..AtomParams::default() }
}

/// Expected coefficient on each unknown, from the hand-written Bloch equations.
fn expect_single(eq: &SingleEquation, expected: &[(OperatorLabel, Coefficient)], source: Coefficient) {
    for l in OperatorLabel::BASIS {
        let want = expected.iter().filter(|(m, _)| *m == l).fold(Coefficient::ZERO, |acc, (_, c)| acc + *c);
        let got = eq.coupling[l.index()];
        assert!(
            close(got.constant, want.constant) && close(got.probe, want.probe) && close(got.probe_conj, want.probe_conj),
            "sigma{} equation, coefficient on sigma{}: {:?} vs {:?}",
            eq.label,
            l,
            got,
            want
        );
    }
    assert!(close(eq.source.constant, source.constant));
    assert!(close(eq.source.probe, source.probe));
    assert!(close(eq.source.probe_conj, source.probe_conj));
}

fn k(z: C64) -> Coefficient {
    Coefficient::constant(z)
}
fn pp(z: C64) -> Coefficient {
    Coefficient { probe: z, ..Coefficient::ZERO }
}
fn pm(z: C64) -> Coefficient {
    Coefficient { probe_conj: z, ..Coefficient::ZERO }
}

#[test]
fn golden_bloch_equations() {
    use OperatorLabel as L;
    let p = params();
    let sys = generate_single_atom_equations(&p);
    let oc = c(p.omega_c, 0.0);
    let eq = |l: OperatorLabel| sys.equations.iter().find(|e| e.label == l).unwrap().clone();

    // dσ12/dt = −Γ12σ12 − i[Ω_p(1 − σ33 − 2σ22) + Ω_cσ13]
    expect_single(
        &eq(L::S12),
        &[(L::S12, k(-p.big_gamma(1, 2))), (L::S33, pp(I)), (L::S22, pp(2.0 * I)), (L::S13, k(-I * oc))],
        pp(-I),
    );
    // dσ13/dt = −Γ13σ13 − i[Ω_cσ12 − Ω_pσ23 + V13]
    expect_single(
        &eq(L::S13),
        &[(L::S13, k(-p.big_gamma(1, 3))), (L::S12, k(-I * oc)), (L::S23, pp(I))],
        Coefficient::ZERO,
    );
    assert_eq!(eq(L::S13).feedback, vec![(Feedback::V13, -I)]);
    // dσ23/dt = −Γ23σ23 − i[Ω_c(σ22 − σ33) − Ω_p*σ13 + V23]
    expect_single(
        &eq(L::S23),
        &[(L::S23, k(-p.big_gamma(2, 3))), (L::S22, k(-I * oc)), (L::S33, k(I * oc)), (L::S13, pm(I))],
        Coefficient::ZERO,
    );
    assert_eq!(eq(L::S23).feedback, vec![(Feedback::V23, -I)]);
    // dσ22/dt = −γ22σ22 − i[Ω_pσ21 − Ω_p*σ12 + Ω_c(σ23 − σ32)]
    expect_single(
        &eq(L::S22),
        &[
            (L::S22, k(c(-p.gamma22, 0.0))),
            (L::S21, pp(-I)),
            (L::S12, pm(I)),
            (L::S23, k(-I * oc)),
            (L::S32, k(I * oc)),
        ],
        Coefficient::ZERO,
    );
    assert!(eq(L::S22).feedback.is_empty());
    // dσ33/dt = −γ33σ33 − iΩ_c[σ32 − σ23]
    expect_single(
        &eq(L::S33),
        &[(L::S33, k(c(-p.gamma33, 0.0))), (L::S32, k(-I * oc)), (L::S23, k(I * oc))],
        Coefficient::ZERO,
    );
    assert!(eq(L::S33).feedback.is_empty());
}

#[test]
fn decoupled_sigma13_without_control() {
    use OperatorLabel as L;
    let p = params().with_omega_c(0.0);
    let sys = generate_single_atom_equations(&p);
    let e = &sys.equations[L::S13.index()];
    let nonzero: Vec<_> = OperatorLabel::BASIS.iter().filter(|l| !e.coupling[l.index()].is_zero()).collect();
    assert_eq!(nonzero, vec![&L::S13, &L::S23]);
}

#[test]
fn counts_and_classification() {
    let p = params();
    assert_eq!(generate_single_atom_equations(&p).equations.len(), 8);
    let sys = generate_pair_equations(&p, LadderVariant::Standard);
    assert_eq!(sys.equations.len(), 36);
    let all = PairLabel::all();
    for (i, l) in all.iter().enumerate() {
        assert_eq!(l.index(), i);
    }
    let (pl, ql) = classify_pq(&sys).unwrap();
    assert_eq!((pl.len(), ql.len()), (10, 26));
    use OperatorLabel as L;
    let expected_p = [
        (L::S13, L::S13),
        (L::S13, L::S23),
        (L::S13, L::S33),
        (L::S23, L::S23),
        (L::S23, L::S33),
        (L::S31, L::S31),
        (L::S31, L::S32),
        (L::S31, L::S33),
        (L::S32, L::S32),
        (L::S32, L::S33),
    ];
    for (a, b) in expected_p {
        assert!(pl.contains(&PairLabel::new(a, b)), "{a},{b} should be P");
    }
    assert!(ql.contains(&PairLabel::new(L::S33, L::S33)));
    assert_eq!(PairLabel::new(L::S33, L::S33).interaction(), c(0.0, 0.0));
    assert_eq!(PairLabel::new(L::S13, L::S33).interaction(), -I);
    assert_eq!(PairLabel::new(L::S31, L::S33).interaction(), I);
}

#[test]
fn grades() {
    use OperatorLabel as L;
    assert_eq!(PairLabel::new(L::S13, L::S33).grade(), (1, 3));
    assert_eq!(PairLabel::new(L::S23, L::S33).grade(), (0, 4));
    assert_eq!(PairLabel::new(L::S13, L::S31).grade(), (0, 2));
    assert_eq!(L::S21.grade(), (-1, 1));
}

#[test]
fn q_sources_from_single_averages() {
    use OperatorLabel as L;
    let p = params().with_probe(c(0.3, 0.1));
    let sys = generate_pair_equations(&p, LadderVariant::Standard);
    let row = |a, b| &sys.equations[PairLabel::new(a, b).index()];
    // {22,33}: no single-atom source at all
    assert!(row(L::S22, L::S33).single_source.iter().all(|c| c.is_zero()));
    assert!(row(L::S22, L::S33).ladder.is_empty());
    // {22,13}: sourced by the ladder term V13·σ22
    let l = &row(L::S22, L::S13).ladder;
    assert_eq!(l.len(), 1);
    assert_eq!((l[0].feedback, l[0].single), (Feedback::V13, L::S22));
}

/// Golden third-order system (γ33 = 0), multiplied by i so that it reads
/// LHS·x = Ω_c[...] + second-order sources.
#[test]
fn golden_third_order_pair_system() {
    use OperatorLabel as L;
    let p = AtomParams::default();
    let sys = generate_pair_equations(&p, LadderVariant::Standard);
    let g12 = p.big_gamma(1, 2);
    let g13 = p.big_gamma(1, 3);
    let g23 = p.big_gamma(2, 3);
    let g22 = c(p.gamma22, 0.0);
    let oc = p.omega_c;
    let pl = PairLabel::new;
    let x = [
        pl(L::S13, L::S33),
        pl(L::S13, L::S23),
        pl(L::S13, L::S32),
        pl(L::S12, L::S33),
        pl(L::S12, L::S23),
        pl(L::S13, L::S22),
        pl(L::S12, L::S32),
        pl(L::S12, L::S22),
    ];
    // (diagonal, [(unknown, ±Ω_c)], k coefficient on the left)
    type Row = (C64, Vec<(usize, f64)>, f64);
    let lhs: [Row; 8] = [
        (I * g13, vec![(3, 1.0), (1, -1.0), (2, 1.0)], -1.0),
        (I * (g13 + g23), vec![(4, 1.0), (5, 1.0), (0, -1.0)], -1.0),
        (I * (g23.conj() + g13), vec![(6, 1.0), (5, -1.0), (0, 1.0)], 0.0),
        (I * g12, vec![(0, 1.0), (6, 1.0), (4, -1.0)], 0.0),
        (I * (g12 + g23), vec![(7, 1.0), (3, -1.0), (1, 1.0)], 0.0),
        (I * (g13 + g22), vec![(7, 1.0), (1, 1.0), (2, -1.0)], 0.0),
        (I * (g23.conj() + g12), vec![(3, 1.0), (2, 1.0), (7, -1.0)], 0.0),
        (I * (g12 + g22), vec![(4, 1.0), (5, 1.0), (6, -1.0)], 0.0),
    ];
    let third: Vec<usize> = x.iter().map(|l| l.index()).collect();
    for (row, (diag, offd, kcoef)) in lhs.iter().enumerate() {
        let e = &sys.equations[x[row].index()];
        // LHS = −i·(generated diagonal); RHS terms = i·(generated off-diagonal)
        assert!(close(-I * e.coupling[x[row].index()].constant, *diag), "row {row} diagonal");
        assert!(close(-I * e.interaction, c(*kcoef, 0.0)), "row {row} k term");
        for (col, l) in third.iter().enumerate() {
            if col == row {
                continue;
            }
            let want: f64 = offd.iter().filter(|(j, _)| *j == col).map(|(_, s)| s * oc).sum();
            assert!(close(I * e.coupling[*l].constant, c(want, 0.0)), "row {row} col {col}");
        }
    }
    // second-order sources, per unit Ω_p or Ω_p*
    let src = |row: usize| &sys.equations[x[row].index()];
    let on = |row: usize, a: L, b: L| src(row).coupling[pl(a, b).index()];
    let single = |row: usize, l: L| src(row).single_source[l.index()];
    assert!(close(I * on(1, L::S13, L::S13).probe_conj, c(-1.0, 0.0)));
    assert!(close(I * on(2, L::S13, L::S31).probe, c(1.0, 0.0)));
    assert!(close(I * single(3, L::S33).probe, c(1.0, 0.0)));
    assert!(close(I * single(4, L::S23).probe, c(1.0, 0.0)));
    assert!(close(I * on(4, L::S13, L::S12).probe_conj, c(-1.0, 0.0)));
    assert!(close(I * on(5, L::S13, L::S21).probe, c(1.0, 0.0)));
    assert!(close(I * on(5, L::S13, L::S12).probe_conj, c(-1.0, 0.0)));
    assert!(close(I * on(6, L::S31, L::S12).probe, c(1.0, 0.0)));
    assert!(close(I * single(6, L::S32).probe, c(1.0, 0.0)));
    assert!(close(I * on(7, L::S12, L::S21).probe, c(1.0, 0.0)));
    assert!(close(I * on(7, L::S12, L::S12).probe_conj, c(-1.0, 0.0)));
    assert!(close(I * single(7, L::S22).probe, c(1.0, 0.0)));
}

fn conjugation_closure(p: &AtomParams) {
    let single = generate_single_atom_equations(p);
    for e in &single.equations {
        let f = &single.equations[e.label.flip().index()];
        for l in OperatorLabel::BASIS {
            assert_eq!(e.coupling[l.index()].conj(), f.coupling[l.flip().index()]);
        }
        assert_eq!(e.source.conj(), f.source);
        let mut fb: Vec<_> = e.feedback.iter().map(|(v, z)| (v.flip(), z.conj())).collect();
        fb.sort_by_key(|x| x.0);
        let mut ff = f.feedback.clone();
        ff.sort_by_key(|x| x.0);
        assert_eq!(fb, ff);
    }
    let pair = generate_pair_equations(p, LadderVariant::Standard);
    for e in &pair.equations {
        let f = &pair.equations[e.label.flip().index()];
        for l in PairLabel::all() {
            assert_eq!(e.coupling[l.index()].conj(), f.coupling[l.flip().index()]);
        }
        assert_eq!(e.interaction.conj(), f.interaction);
        for l in OperatorLabel::BASIS {
            assert_eq!(e.single_source[l.index()].conj(), f.single_source[l.flip().index()]);
        }
    }
}

#[test]
fn display_lists_every_equation() {
    let p = params();
    let s = generate_single_atom_equations(&p).to_string();
    assert_eq!(s.lines().count(), 8);
    let s = generate_pair_equations(&p, LadderVariant::Standard).to_string();
    assert_eq!(s.lines().count(), 36);
}

proptest! {
    #[test]
    fn conjugation_closure_holds(
        oc in 0.0..5.0f64, d2 in -30.0..30.0f64, d3 in -3.0..3.0f64,
        g13 in 0.0..1.0f64, g33 in 0.0..0.5f64,
    ) {
        let p = AtomParams { omega_c: oc, delta2: d2, delta3: d3, gamma13: g13, gamma33: g33, ..AtomParams::default() };
        conjugation_closure(&p);
    }

    #[test]
    fn coefficients_independent_of_probe(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let a = generate_pair_equations(&params(), LadderVariant::Standard);
        let b = generate_pair_equations(&params().with_probe(c(re, im)), LadderVariant::Standard);
        prop_assert_eq!(a, b);
    }
}
