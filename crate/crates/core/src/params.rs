//! Parameter records. Frequencies are in units of γ = γ12, lengths in μm,
//! densities in μm⁻³ and C6 in γ·μm⁶.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Drive, detuning and relaxation parameters of a single three-level atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomParams {
    pub omega_p: C64,
    pub omega_c: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
    pub gamma22: f64,
    pub gamma33: f64,
}

/// Default Raman-coherence width: γ12 + γ13 − γ33/2.
pub fn default_gamma23(gamma12: f64, gamma13: f64, gamma33: f64) -> f64 {
    gamma12 + gamma13 - 0.5 * gamma33
}

impl Default for AtomParams {
    fn default() -> Self {
        Self {
            omega_p: C64::new(0.0, 0.0),
            omega_c: 3.0,
            delta2: -25.0,
            delta3: 1.0 / 3.0,
            gamma12: 1.0,
            gamma13: 0.1,
            gamma23: default_gamma23(1.0, 0.1, 0.0),
            gamma22: 2.0,
            gamma33: 0.0,
        }
    }
}

impl AtomParams {
    pub fn with_probe(mut self, omega_p: C64) -> Self {
        self.omega_p = omega_p;
        self
    }

    /// Real probe amplitude with the given intensity |Ω_p|².
    pub fn with_intensity(self, omega_p2: f64) -> Self {
        self.with_probe(C64::new(omega_p2.max(0.0).sqrt(), 0.0))
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Self {
        self.omega_c = omega_c;
        self
    }

    pub fn with_delta3(mut self, delta3: f64) -> Self {
        self.delta3 = delta3;
        self
    }

    pub fn intensity(&self) -> f64 {
        self.omega_p.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_p.re, self.omega_p.im, self.omega_c, self.delta2, self.delta3,
            self.gamma12, self.gamma13, self.gamma23, self.gamma22, self.gamma33,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite atom parameter".into()));
        }
        if self.gamma12 != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma12 must be 1 (frequency unit), got {}",
                self.gamma12
            )));
        }
        for (name, g) in [
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
            ("gamma22", self.gamma22),
            ("gamma33", self.gamma33),
        ] {
            if g < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {g}")));
            }
        }
        if self.omega_c < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega_c must be >= 0, got {}",
                self.omega_c
            )));
        }
        Ok(())
    }

    /// Detuning Δ_α of level α, with Δ_1 = 0.
    pub fn detuning(&self, level: u8) -> f64 {
        match level {
            1 => 0.0,
            2 => self.delta2,
            3 => self.delta3,
            _ => panic!("level {level} out of range"),
        }
    }

    /// Decay rate γ_αβ; diagonal entries are population decay rates (γ11 = 0).
    pub fn gamma(&self, a: u8, b: u8) -> f64 {
        match (a.min(b), a.max(b)) {
            (1, 1) => 0.0,
            (2, 2) => self.gamma22,
            (3, 3) => self.gamma33,
            (1, 2) => self.gamma12,
            (1, 3) => self.gamma13,
            (2, 3) => self.gamma23,
            _ => panic!("levels ({a},{b}) out of range"),
        }
    }

    /// Γ_αβ = γ_αβ − i(Δ_β − Δ_α).
    pub fn big_gamma(&self, a: u8, b: u8) -> C64 {
        C64::new(self.gamma(a, b), -(self.detuning(b) - self.detuning(a)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationConstants {
    pub gamma12: C64,
    pub gamma13: C64,
    pub gamma23: C64,
}

pub fn relaxation_constants(p: &AtomParams) -> RelaxationConstants {
    RelaxationConstants {
        gamma12: p.big_gamma(1, 2),
        gamma13: p.big_gamma(1, 3),
        gamma23: p.big_gamma(2, 3),
    }
}

/// Effective two-photon relaxation constant T = Γ13 + Ω_c²/Γ12.
pub fn effective_t(p: &AtomParams) -> Result<C64> {
    let g = relaxation_constants(p);
    if g.gamma12.norm() == 0.0 {
        return Err(Error::SingularParameters("Gamma12 = 0".into()));
    }
    Ok(g.gamma13 + p.omega_c * p.omega_c / g.gamma12)
}

/// Dispersive approximations (Re T ≈ γ13 + Ω_c²/Δ2², −Im T ≈ Δ3 − Ω_c²/Δ2).
pub fn effective_t_dispersive(p: &AtomParams) -> (f64, f64) {
    let oc2 = p.omega_c * p.omega_c;
    (
        p.gamma13 + oc2 / (p.delta2 * p.delta2),
        p.delta3 - oc2 / p.delta2,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionParams {
    pub c6: f64,
    pub eta: f64,
}

impl Default for InteractionParams {
    fn default() -> Self {
        Self { c6: 5000.0, eta: 0.04 }
    }
}

impl InteractionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be > 0, got {}", self.eta)));
        }
        if !self.c6.is_finite() {
            return Err(Error::InvalidParameter("c6 must be finite".into()));
        }
        Ok(())
    }
}

/// k(r) = −C6/r⁶.
pub fn vdw_potential(r: f64, c6: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("separation must be > 0, got {r}")));
    }
    Ok(-c6 / r.powi(6))
}

/// Ω_c(n) = 3·(50/n)^{3/2}.
pub fn omega_c_for_state(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be > 0".into()));
    }
    Ok(3.0 * (50.0 / n as f64).powf(1.5))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatePreset {
    pub n: u32,
    pub c6: f64,
    pub omega_c: f64,
}

pub const PRESET_TABLE: [(u32, f64); 4] = [(46, 2400.0), (50, 5000.0), (56, 15000.0), (61, 36000.0)];

impl StatePreset {
    pub fn lookup(n: u32) -> Result<Self> {
        let c6 = PRESET_TABLE
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::Config(format!("no preset for n = {n}")))?;
        Ok(Self { n, c6, omega_c: omega_c_for_state(n)? })
    }

    pub fn all() -> Vec<Self> {
        PRESET_TABLE.iter().map(|(n, _)| Self::lookup(*n).unwrap()).collect()
    }

    pub fn atom(&self) -> AtomParams {
        AtomParams::default().with_omega_c(self.omega_c)
    }

    pub fn interaction(&self) -> InteractionParams {
        InteractionParams { c6: self.c6, ..Default::default() }
    }
}
