//! Brute-force references: the exact two-atom master equation at fixed
//! separation, extraction of expansion coefficients from full solves, and
//! a tanh-sinh radial quadrature independent of the Gauss–Kronrod one.
//!
//! Relaxation is modelled by local Lindblad operators: decay √γ22|1⟩⟨2|,
//! √γ33|1⟩⟨3|, and pure dephasing Σ_α x_α|α⟩⟨α| whose level "positions"
//! x_α ∈ ℝ² satisfy |x_α − x_β|² = 2(γ_αβ − natural width). This reproduces
//! every single-atom γ_αβ exactly.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;

use crate::algebra::{OperatorLabel, PairLabel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::params::{vdw_potential, AtomParams, InteractionParams};
use crate::quadrature::{QuadValue, QuadratureResult};

fn unit(n: usize, r: usize, c: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(r, c)] = C64::new(1.0, 0.0);
    m
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn hamiltonian(p: &AtomParams) -> CMatrix {
    let mut h = CMatrix::zeros(3, 3);
    h[(1, 1)] = C64::new(-p.delta2, 0.0);
    h[(2, 2)] = C64::new(-p.delta3, 0.0);
    h[(0, 1)] = p.omega_p.conj();
    h[(1, 0)] = p.omega_p;
    h[(1, 2)] = C64::new(p.omega_c, 0.0);
    h[(2, 1)] = C64::new(p.omega_c, 0.0);
    h
}

/// Local jump operators of one atom.
pub fn jump_operators(p: &AtomParams) -> Result<Vec<CMatrix>> {
    let mut ops = Vec::new();
    if p.gamma22 > 0.0 {
        ops.push(unit(3, 0, 1) * C64::new(p.gamma22.sqrt(), 0.0));
    }
    if p.gamma33 > 0.0 {
        ops.push(unit(3, 0, 2) * C64::new(p.gamma33.sqrt(), 0.0));
    }
    let d12 = p.gamma12 - 0.5 * p.gamma22;
    let d13 = p.gamma13 - 0.5 * p.gamma33;
    let d23 = p.gamma23 - 0.5 * (p.gamma22 + p.gamma33);
    let tol = 1e-12;
    if d12 < -tol || d13 < -tol || d23 < -tol {
        return Err(Error::InvalidParameter(format!(
            "coherence widths below natural widths (dephasing {d12}, {d13}, {d23})"
        )));
    }
    let (s12, s13, s23) = (2.0 * d12.max(0.0), 2.0 * d13.max(0.0), 2.0 * d23.max(0.0));
    let x2 = s12.sqrt();
    let (ax, ay) = if x2 > tol {
        let a = (s13 + s12 - s23) / (2.0 * x2);
        let b2 = s13 - a * a;
        if b2 < -1e-10 {
            return Err(Error::InvalidParameter("dephasing widths violate the triangle inequality".into()));
        }
        (a, b2.max(0.0).sqrt())
    } else {
        if (s13 - s23).abs() > 1e-10 {
            return Err(Error::InvalidParameter("dephasing widths violate the triangle inequality".into()));
        }
        (s13.sqrt(), 0.0)
    };
    for coords in [[0.0, x2, ax], [0.0, 0.0, ay]] {
        if coords.iter().any(|c| *c != 0.0) {
            let mut l = CMatrix::zeros(3, 3);
            for (i, c) in coords.iter().enumerate() {
                l[(i, i)] = C64::new(*c, 0.0);
            }
            ops.push(l);
        }
    }
    Ok(ops)
}

/// Row-major Liouvillian: vec(AXB) = (A ⊗ Bᵀ) vec(X).
fn liouvillian(h: &CMatrix, jumps: &[CMatrix]) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let i = C64::new(0.0, 1.0);
    let mut l = (kron(h, &id) - kron(&id, &h.transpose())) * (-i);
    for j in jumps {
        let jd = j.adjoint();
        let jdj = &jd * j;
        l += kron(j, &j.conjugate());
        l -= (kron(&jdj, &id) + kron(&id, &jdj.transpose())) * C64::new(0.5, 0.0);
    }
    l
}

fn steady_state(l: &CMatrix, n: usize, context: &str) -> Result<CMatrix> {
    let mut a = l.clone();
    let mut b = CVector::zeros(n * n);
    for c in 0..n * n {
        a[(0, c)] = C64::new(0.0, 0.0);
    }
    for d in 0..n {
        a[(0, d * n + d)] = C64::new(1.0, 0.0);
    }
    b[0] = C64::new(1.0, 0.0);
    let x = linalg::solve(&a, &b, context)?;
    Ok(CMatrix::from_row_slice(n, n, x.as_slice()))
}

/// Exact single-atom steady state from the same Lindblad model.
pub fn single_atom_density_matrix(p: &AtomParams) -> Result<CMatrix> {
    let l = liouvillian(&hamiltonian(p), &jump_operators(p)?);
    steady_state(&l, 3, "single-atom Liouvillian")
}

/// σ_αβ = ⟨|α⟩⟨β|⟩ = ρ_βα.
pub fn single_average(rho: &CMatrix, label: OperatorLabel) -> C64 {
    rho[(label.col as usize - 1, label.row as usize - 1)]
}

#[derive(Clone, Debug)]
pub struct TwoAtomState {
    pub rho: CMatrix,
    pub k: f64,
}

impl TwoAtomState {
    /// ⟨E_A ⊗ E_B⟩ = ρ_{(b,ν),(a,μ)} for A = |a⟩⟨b|, B = |μ⟩⟨ν|.
    pub fn pair(&self, label: PairLabel) -> C64 {
        let (a, b) = (label.first, label.second);
        let r = (a.col as usize - 1) * 3 + (b.col as usize - 1);
        let c = (a.row as usize - 1) * 3 + (b.row as usize - 1);
        self.rho[(r, c)]
    }

    /// Single-atom marginal of atom 1.
    pub fn single(&self, label: OperatorLabel) -> C64 {
        (0..3)
            .map(|m| self.rho[((label.col as usize - 1) * 3 + m, (label.row as usize - 1) * 3 + m)])
            .sum()
    }

    pub fn pair_vector(&self) -> Vec<C64> {
        PairLabel::all().into_iter().map(|l| self.pair(l)).collect()
    }

    /// Trace, hermiticity and positivity within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let tr: C64 = (0..9).map(|i| self.rho[(i, i)]).sum();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::Domain(format!("trace {tr}")));
        }
        let herm = (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > tol {
            return Err(Error::Domain(format!("hermiticity violated by {herm:.3e}")));
        }
        let sym = (&self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        let ev = SymmetricEigen::new(sym).eigenvalues;
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::Domain(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// Two-atom steady state at interaction energy k (no truncation).
pub fn two_atom_steady_state_k(p: &AtomParams, k: f64) -> Result<TwoAtomState> {
    p.validate()?;
    let h1 = hamiltonian(p);
    let id = CMatrix::identity(3, 3);
    let e33 = unit(3, 2, 2);
    let h = kron(&h1, &id) + kron(&id, &h1) + kron(&e33, &e33) * C64::new(k, 0.0);
    let mut jumps = Vec::new();
    for j in jump_operators(p)? {
        jumps.push(kron(&j, &id));
        jumps.push(kron(&id, &j));
    }
    let l = liouvillian(&h, &jumps);
    let rho = steady_state(&l, 9, &format!("two-atom Liouvillian at k = {k}"))?;
    Ok(TwoAtomState { rho, k })
}

/// Two-atom steady state at separation R (μm).
pub fn two_atom_steady_state(p: &AtomParams, inter: &InteractionParams, r: f64) -> Result<TwoAtomState> {
    two_atom_steady_state_k(p, vdw_potential(r, inter.c6)?)
}

/// Extracted coefficient with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extracted {
    pub value: C64,
    pub error: f64,
}

fn poly_coefficient(hs: &[f64], gs: &[C64], s: usize) -> Result<C64> {
    let n = hs.len();
    let scale = hs[0];
    let a = CMatrix::from_fn(n, n, |i, j| C64::new((hs[i] / scale).powi(j as i32), 0.0));
    let b = CVector::from_fn(n, |i, _| gs[i]);
    let c = linalg::solve(&a, &b, "extrapolation Vandermonde")?;
    Ok(c[s] / scale.powi(s as i32))
}

/// Coefficient of x^order in f(x) = Σ_m c_m x^(lowest + 2m), from samples at
/// x0·2^(−j/2) by polynomial extrapolation in x².
pub fn order_extract<F: Fn(f64) -> C64>(f: &F, order: u32, lowest: u32, x0: f64) -> Result<Extracted> {
    if order < lowest || !(order - lowest).is_multiple_of(2) {
        return Err(Error::Domain(format!("order {order} not reachable from lowest order {lowest}")));
    }
    let s = ((order - lowest) / 2) as usize;
    let n = s + 4;
    let xs: Vec<f64> = (0..n).map(|j| x0 * 2f64.powf(-0.5 * j as f64)).collect();
    let hs: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let gs: Vec<C64> = xs.iter().map(|&x| f(x) / x.powi(lowest as i32)).collect();
    if gs.iter().any(|g| !(g.re.is_finite() && g.im.is_finite())) {
        return Err(Error::Extrapolation("non-finite sample".into()));
    }
    let full = poly_coefficient(&hs, &gs, s)?;
    let fewer = poly_coefficient(&hs[1..], &gs[1..], s)?;
    let error = (full - fewer).norm();
    let scale = gs.iter().map(|g| g.norm()).fold(0.0, f64::max) / hs[0].powi(s as i32);
    if error > 1e-3 * full.norm().max(1e-12 * scale) {
        return Err(Error::Extrapolation(format!("estimate {full} with spread {error:.3e}")));
    }
    Ok(Extracted { value: full, error })
}

/// η∫d³R k·g(k) with the double-exponential substitution u = R³ = u_b·exp((π/2)sinh t).
pub fn quadrature_reference<T: QuadValue, G: Fn(f64) -> T>(
    g: &G,
    c6: f64,
    eta: f64,
    rate: f64,
    rel_tol: f64,
) -> Result<QuadratureResult<T>> {
    let g0 = g(0.0);
    if c6 == 0.0 {
        return Ok(QuadratureResult { value: g0.zeros_like(), error: 0.0, nodes: 1, converged: true });
    }
    let ub = (c6.abs() / rate).sqrt();
    let tmax = 3.6;
    let integrand = |t: f64| {
        let e = 0.5 * PI * t.sinh();
        let u = ub * e.exp();
        let k = -c6 / (u * u);
        let w = k * u * 0.5 * PI * t.cosh();
        let v = g(k);
        let mut out = v.zeros_like();
        out.add_scaled(w, &v);
        out
    };
    let mut h = 0.5;
    let mut sum = integrand(0.0);
    let mut nodes = 1;
    let mut t = h;
    while t <= tmax {
        sum.add_scaled(1.0, &integrand(t));
        sum.add_scaled(1.0, &integrand(-t));
        nodes += 2;
        t += h;
    }
    let mut est = sum.zeros_like();
    est.add_scaled(h, &sum);
    for _ in 0..14 {
        h *= 0.5;
        let mut t = h;
        while t <= tmax {
            sum.add_scaled(1.0, &integrand(t));
            sum.add_scaled(1.0, &integrand(-t));
            nodes += 2;
            t += 2.0 * h;
        }
        let mut next = sum.zeros_like();
        next.add_scaled(h, &sum);
        let mut diff = next.clone();
        diff.add_scaled(-1.0, &est);
        let err = diff.norm();
        est = next;
        if err <= rel_tol * est.norm() {
            let pref = 4.0 * PI * eta / 3.0;
            let mut value = est.zeros_like();
            value.add_scaled(pref, &est);
            return Ok(QuadratureResult { value, error: pref * err, nodes, converged: true });
        }
    }
    Err(Error::Quadrature { context: "tanh-sinh reference".into(), error: f64::NAN, nodes })
}
