//! Single-atom steady states without interactions, and the order-by-order
//! expansion in (Ω_p, Ω_p*).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::algebra::{generate_single_atom_equations, OperatorLabel, SingleAtomSystem, N_SINGLE};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::params::AtomParams;

/// Default weak probe intensity |Ω_p|² for numerical limits.
pub const WEAK_PROBE_INTENSITY: f64 = 1e-6;

/// The eight single-atom averages in basis order (12, 13, 21, 23, 31, 32, 22, 33).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleAtomState {
    pub values: [C64; N_SINGLE],
}

impl SingleAtomState {
    pub fn zero() -> Self {
        Self { values: [C64::new(0.0, 0.0); N_SINGLE] }
    }

    pub fn get(&self, label: OperatorLabel) -> C64 {
        self.values[label.index()]
    }

    pub fn sigma12(&self) -> C64 {
        self.get(OperatorLabel::S12)
    }

    pub fn sigma13(&self) -> C64 {
        self.get(OperatorLabel::S13)
    }

    pub fn sigma22(&self) -> f64 {
        self.get(OperatorLabel::S22).re
    }

    pub fn sigma33(&self) -> f64 {
        self.get(OperatorLabel::S33).re
    }

    /// Hermiticity and population bounds within `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        for l in OperatorLabel::BASIS {
            let d = (self.get(l) - self.get(l.flip()).conj()).norm();
            if d > tol {
                return Err(Error::Domain(format!("sigma{l} violates hermiticity by {d:.3e}")));
            }
        }
        let (p2, p3) = (self.get(OperatorLabel::S22), self.get(OperatorLabel::S33));
        if p2.im.abs() > tol || p3.im.abs() > tol {
            return Err(Error::Domain("complex population".into()));
        }
        if p2.re < -tol || p3.re < -tol || p2.re + p3.re > 1.0 + tol {
            return Err(Error::Domain(format!("populations out of bounds: {} {}", p2.re, p3.re)));
        }
        Ok(())
    }
}

impl SingleAtomSystem {
    /// Dense coefficient matrix at the given probe amplitude.
    pub fn matrix(&self, omega_p: C64) -> CMatrix {
        CMatrix::from_fn(N_SINGLE, N_SINGLE, |i, j| self.equations[i].coupling[j].eval(omega_p))
    }

    /// Matrix of one probe grade: 0 constant, 1 Ω_p part, 2 Ω_p* part.
    pub fn matrix_part(&self, part: u8) -> CMatrix {
        CMatrix::from_fn(N_SINGLE, N_SINGLE, |i, j| {
            let c = &self.equations[i].coupling[j];
            match part {
                0 => c.constant,
                1 => c.probe,
                _ => c.probe_conj,
            }
        })
    }

    pub fn source_part(&self, part: u8) -> CVector {
        CVector::from_fn(N_SINGLE, |i, _| {
            let c = &self.equations[i].source;
            match part {
                0 => c.constant,
                1 => c.probe,
                _ => c.probe_conj,
            }
        })
    }

    /// Source at the given probe and feedback integrals (ordered V13, V31, V23, V32).
    pub fn source(&self, omega_p: C64, feedback: &[C64; 4]) -> CVector {
        CVector::from_fn(N_SINGLE, |i, _| {
            let e = &self.equations[i];
            e.source.eval(omega_p)
                + e.feedback.iter().map(|(f, c)| c * feedback[f.index()]).sum::<C64>()
        })
    }
}

/// Rows that vanish identically (σ33 when Ω_c = 0 and γ33 = 0) are replaced by x = 0.
fn pin_empty_rows(a: &mut CMatrix, b: &mut CVector) {
    for i in 0..a.nrows() {
        if a.row(i).iter().all(|z| *z == C64::new(0.0, 0.0)) && b[i] == C64::new(0.0, 0.0) {
            a[(i, i)] = C64::new(1.0, 0.0);
        }
    }
}

fn describe(p: &AtomParams) -> String {
    format!(
        "single-atom system at Omega_p={}, Omega_c={}, Delta2={}, Delta3={}, gamma13={}, gamma33={}",
        p.omega_p, p.omega_c, p.delta2, p.delta3, p.gamma13, p.gamma33
    )
}

/// Linear solve of the single-atom system with feedback sources V.
pub fn solve_single_atom(p: &AtomParams, feedback: &[C64; 4]) -> Result<SingleAtomState> {
    let sys = generate_single_atom_equations(p);
    let mut a = sys.matrix(p.omega_p);
    let mut b = -sys.source(p.omega_p, feedback);
    pin_empty_rows(&mut a, &mut b);
    let x = linalg::solve(&a, &b, &describe(p))?;
    let mut values = [C64::new(0.0, 0.0); N_SINGLE];
    values.copy_from_slice(x.as_slice());
    Ok(SingleAtomState { values })
}

pub fn steady_state_three_level(p: &AtomParams) -> Result<SingleAtomState> {
    p.validate()?;
    solve_single_atom(p, &[C64::new(0.0, 0.0); 4])
}

/// Two-level atom (level 3 decoupled): only σ12, σ21, σ22 are nonzero.
pub fn steady_state_two_level(p: &AtomParams) -> Result<SingleAtomState> {
    p.validate()?;
    let q = p.with_omega_c(0.0);
    let sys = generate_single_atom_equations(&q);
    let idx = [OperatorLabel::S12, OperatorLabel::S21, OperatorLabel::S22].map(|l| l.index());
    let full = sys.matrix(q.omega_p);
    let src = sys.source(q.omega_p, &[C64::new(0.0, 0.0); 4]);
    let a = CMatrix::from_fn(3, 3, |i, j| full[(idx[i], idx[j])]);
    let b = CVector::from_fn(3, |i, _| -src[idx[i]]);
    let x = linalg::solve(&a, &b, &format!("two-level {}", describe(p)))?;
    let mut s = SingleAtomState::zero();
    for (k, &i) in idx.iter().enumerate() {
        s.values[i] = x[k];
    }
    Ok(s)
}

/// Expansion coefficients x^(a,b) of Ω_p^a (Ω_p*)^b, keyed by (a, b).
pub type Expansion = BTreeMap<(u32, u32), CVector>;

/// Solves A0 x^(a,b) = −(A+ x^(a−1,b) + A− x^(a,b−1) + s^(a,b)) up to total order `max_order`.
pub fn single_expansion(p: &AtomParams, max_order: u32) -> Result<Expansion> {
    let sys = generate_single_atom_equations(p);
    let a0 = sys.matrix_part(0);
    let (ap, am) = (sys.matrix_part(1), sys.matrix_part(2));
    let sources = [sys.source_part(0), sys.source_part(1), sys.source_part(2)];
    let mut a0p = a0.clone();
    let mut dummy = CVector::zeros(N_SINGLE);
    pin_empty_rows(&mut a0p, &mut dummy);
    let lu = a0p.lu();
    let mut out = Expansion::new();
    for order in 0..=max_order {
        for a in (0..=order).rev() {
            let b = order - a;
            let mut rhs = CVector::zeros(N_SINGLE);
            if a > 0 {
                rhs += &ap * &out[&(a - 1, b)];
            }
            if b > 0 {
                rhs += &am * &out[&(a, b - 1)];
            }
            match (a, b) {
                (0, 0) => rhs += &sources[0],
                (1, 0) => rhs += &sources[1],
                (0, 1) => rhs += &sources[2],
                _ => {}
            }
            let x = lu
                .solve(&(-rhs))
                .ok_or_else(|| Error::SingularSystem { context: format!("cascade {}", describe(p)) })?;
            out.insert((a, b), x);
        }
    }
    Ok(out)
}

/// Leading non-interacting expansion coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativeCoefficients {
    pub s12_1: C64,
    pub s13_1: C64,
    pub s22_2: C64,
    pub s33_2: C64,
    pub s23_2: C64,
    pub s32_2: C64,
    pub s12_3: C64,
}

pub fn perturbative_coefficients(p: &AtomParams) -> Result<PerturbativeCoefficients> {
    p.validate()?;
    let e = single_expansion(p, 3)?;
    let g = |a, b, l: OperatorLabel| e[&(a, b)][l.index()];
    Ok(PerturbativeCoefficients {
        s12_1: g(1, 0, OperatorLabel::S12),
        s13_1: g(1, 0, OperatorLabel::S13),
        s22_2: g(1, 1, OperatorLabel::S22),
        s33_2: g(1, 1, OperatorLabel::S33),
        s23_2: g(1, 1, OperatorLabel::S23),
        s32_2: g(1, 1, OperatorLabel::S32),
        s12_3: g(2, 1, OperatorLabel::S12),
    })
}

/// Evaluates a truncated expansion at the given probe amplitude.
pub fn evaluate_expansion(e: &Expansion, omega_p: C64, max_order: u32) -> CVector {
    let mut out = CVector::zeros(e.values().next().map(|v| v.len()).unwrap_or(0));
    for (&(a, b), v) in e {
        if a + b <= max_order {
            out += v * (omega_p.powu(a) * omega_p.conj().powu(b));
        }
    }
    out
}
