//! Susceptibilities, normalized shifts and scaling parameters.

use num_complex::Complex64 as C64;

use crate::collisional::{solve_collisional_integrals, CollisionalIntegrals, CollisionalSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::noninteracting::{
    perturbative_coefficients, solve_single_atom, steady_state_three_level, steady_state_two_level,
    WEAK_PROBE_INTENSITY,
};
use crate::params::{AtomParams, InteractionParams};
use crate::perturbative::eit_denominator;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// σ12/Ω_p.
pub fn susceptibility(sigma12: C64, omega_p: C64) -> Result<C64> {
    if omega_p == ZERO {
        return Err(Error::Undefined("susceptibility at Omega_p = 0; use the weak-probe limit".into()));
    }
    Ok(sigma12 / omega_p)
}

fn denominator(d: C64) -> Result<C64> {
    if d.norm() <= 1e-14 {
        return Err(Error::Undefined("three-level and two-level responses coincide".into()));
    }
    Ok(d)
}

/// (σ12 − σ12²ˡᵉᵛ)/(σ12³ˡᵉᵛ − σ12²ˡᵉᵛ).
pub fn s_norm(sigma12: C64, sigma12_3lev: C64, sigma12_2lev: C64) -> Result<C64> {
    Ok((sigma12 - sigma12_2lev) / denominator(sigma12_3lev - sigma12_2lev)?)
}

/// Re[χ − χ²ˡᵉᵛ]/Re[χ³ˡᵉᵛ − χ²ˡᵉᵛ].
pub fn s_real(chi: C64, chi_3lev: C64, chi_2lev: C64) -> Result<f64> {
    let d = (chi_3lev - chi_2lev).re;
    if d.abs() <= 1e-14 {
        return Err(Error::Undefined("three-level and two-level dispersion coincide".into()));
    }
    Ok((chi - chi_2lev).re / d)
}

/// n_b = (σ12 − σ12³ˡᵉᵛ)/(σ33(σ12²ˡᵉᵛ − σ12³ˡᵉᵛ)).
pub fn nb_from_sigma(sigma12: C64, sigma12_3lev: C64, sigma12_2lev: C64, sigma33: f64) -> Result<C64> {
    if !(sigma33 > 0.0) {
        return Err(Error::Undefined("n_b without Rydberg excitation".into()));
    }
    Ok((sigma12 - sigma12_3lev) / (sigma33 * denominator(sigma12_2lev - sigma12_3lev)?))
}

/// ñ_b = (σ33³ˡᵉᵛ − σ33)/σ33².
pub fn nb_tilde(sigma33: f64, sigma33_3lev: f64) -> Result<f64> {
    if !(sigma33 > 0.0) {
        return Err(Error::Undefined("n_b tilde without Rydberg excitation".into()));
    }
    Ok((sigma33_3lev - sigma33) / (sigma33 * sigma33))
}

/// ñ_b = Re[c·n_b] = ξ1 Re n_b + ξ2 Im n_b in the weak-probe limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiCoefficients {
    pub xi1: f64,
    pub xi2: f64,
    pub c: C64,
}

pub fn xi_coefficients(p: &AtomParams) -> Result<XiCoefficients> {
    let pc = perturbative_coefficients(p)?;
    let g23 = p.gamma(2, 3);
    if g23 == 0.0 || p.omega_c == 0.0 {
        return Err(Error::Undefined("xi coefficients need gamma23 > 0 and Omega_c > 0".into()));
    }
    let c = p.big_gamma(2, 3).conj() / (g23 * eit_denominator(p) * pc.s33_2.re);
    Ok(XiCoefficients { xi1: c.re, xi2: -c.im, c })
}

/// Contributions of (V13, V31) and (V23, V32) to σ33 − σ33³ˡᵉᵛ in the weak-probe approximation.
pub fn sigma33_collisional_parts(p: &AtomParams, v: &CollisionalIntegrals) -> (f64, f64) {
    let g23 = p.gamma(2, 3);
    let from13 = (p.big_gamma(1, 2) * p.big_gamma(2, 3).conj() * p.omega_p.conj() * I * v.v13
        / (g23 * p.omega_c * eit_denominator(p)))
        .re;
    let from23 = (p.big_gamma(2, 3).conj() * v.v23 / (g23 * p.omega_c)).re;
    (from13, from23)
}

/// |V23 part|/|V13 part| of σ33 − σ33³ˡᵉᵛ.
pub fn v23_contribution_ratio(p: &AtomParams, v: &CollisionalIntegrals) -> f64 {
    let (a, b) = sigma33_collisional_parts(p, v);
    b.abs() / a.abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableSet {
    pub chi: C64,
    pub chi_3lev: C64,
    pub chi_2lev: C64,
    pub s: f64,
    pub s_norm: C64,
    pub nb: C64,
    pub nb_tilde: f64,
    /// Non-interacting Rydberg population σ33³ˡᵉᵛ.
    pub p3: f64,
    /// Interacting Rydberg population σ33.
    pub p_r: f64,
    pub sigma22: f64,
    pub integrals: CollisionalIntegrals,
    /// Ω_p = 0: χ and S are exact limits, n_b and ñ_b come from |Ω_p|² = 10⁻⁶.
    pub weak_probe: bool,
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub observables: ObservableSet,
    pub solution: Option<CollisionalSolution>,
}

fn finite_probe(p: &AtomParams, inter: &InteractionParams, opts: &SolverOptions) -> Result<PointResult> {
    let sol = solve_collisional_integrals(p, inter, opts)?;
    let s3 = steady_state_three_level(p)?;
    let s2 = steady_state_two_level(p)?;
    let st = &sol.state;
    let chi = susceptibility(st.sigma12(), p.omega_p)?;
    let chi_3lev = susceptibility(s3.sigma12(), p.omega_p)?;
    let chi_2lev = susceptibility(s2.sigma12(), p.omega_p)?;
    let sigma33 = st.sigma33();
    let obs = ObservableSet {
        chi,
        chi_3lev,
        chi_2lev,
        s: s_real(chi, chi_3lev, chi_2lev)?,
        s_norm: s_norm(st.sigma12(), s3.sigma12(), s2.sigma12())?,
        // NaN (and a flagged row) when σ33 ≤ 0
        nb: nb_from_sigma(st.sigma12(), s3.sigma12(), s2.sigma12(), sigma33)
            .unwrap_or(C64::new(f64::NAN, f64::NAN)),
        nb_tilde: nb_tilde(sigma33, s3.sigma33()).unwrap_or(f64::NAN),
        p3: s3.sigma33(),
        p_r: sigma33,
        sigma22: st.sigma22(),
        integrals: sol.integrals,
        weak_probe: false,
    };
    Ok(PointResult { observables: obs, solution: Some(sol) })
}

/// Full observable set at one parameter point.
pub fn observables(p: &AtomParams, inter: &InteractionParams, opts: &SolverOptions) -> Result<PointResult> {
    if p.omega_p != ZERO {
        return finite_probe(p, inter, opts);
    }
    p.validate()?;
    let weak = finite_probe(&p.with_intensity(WEAK_PROBE_INTENSITY), inter, opts)?.observables;
    let chi_3lev = perturbative_coefficients(p)?.s12_1;
    let chi_2lev = -I / p.big_gamma(1, 2);
    let obs = ObservableSet {
        chi: chi_3lev,
        chi_3lev,
        chi_2lev,
        s: 1.0,
        s_norm: C64::new(1.0, 0.0),
        nb: weak.nb,
        nb_tilde: weak.nb_tilde,
        p3: 0.0,
        p_r: 0.0,
        sigma22: 0.0,
        integrals: CollisionalIntegrals { v13: ZERO, v31: ZERO, v23: ZERO, v32: ZERO, iterations: 0, residual: 0.0 },
        weak_probe: true,
    };
    Ok(PointResult { observables: obs, solution: None })
}

/// ñ_b with the V23, V32 sources switched off in the single-atom solve.
pub fn nb_tilde_without_v23(p: &AtomParams, v: &CollisionalIntegrals) -> Result<f64> {
    let s = solve_single_atom(p, &[v.v13, v.v31, ZERO, ZERO])?;
    let s3 = steady_state_three_level(p)?;
    nb_tilde(s.sigma33(), s3.sigma33())
}
