//! Commutator algebra over the three-level operator basis and generation of
//! the single-atom and two-body steady-state equations.
//!
//! Every equation is the Heisenberg generator d⟨A⟩/dt = i⟨[H, A]⟩ − γ_A⟨A⟩
//! written as `0 = Σ coupling·x + interaction·k·x + source`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::params::AtomParams;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorLabel {
    pub row: u8,
    pub col: u8,
}

impl OperatorLabel {
    pub const fn new(row: u8, col: u8) -> Self {
        Self { row, col }
    }

    pub const S12: Self = Self::new(1, 2);
    pub const S13: Self = Self::new(1, 3);
    pub const S21: Self = Self::new(2, 1);
    pub const S23: Self = Self::new(2, 3);
    pub const S31: Self = Self::new(3, 1);
    pub const S32: Self = Self::new(3, 2);
    pub const S22: Self = Self::new(2, 2);
    pub const S33: Self = Self::new(3, 3);

    /// Unknowns after eliminating σ11: coherences, then populations.
    pub const BASIS: [Self; 8] = [
        Self::S12, Self::S13, Self::S21, Self::S23, Self::S31, Self::S32, Self::S22, Self::S33,
    ];

    pub fn index(self) -> usize {
        match (self.row, self.col) {
            (1, 2) => 0,
            (1, 3) => 1,
            (2, 1) => 2,
            (2, 3) => 3,
            (3, 1) => 4,
            (3, 2) => 5,
            (2, 2) => 6,
            (3, 3) => 7,
            _ => panic!("{self} is not a basis label"),
        }
    }

    pub fn flip(self) -> Self {
        Self::new(self.col, self.row)
    }

    /// (net probe-photon number, leading power in Ω_p).
    pub fn grade(self) -> (i32, u32) {
        match (self.row, self.col) {
            (1, 2) | (1, 3) => (1, 1),
            (2, 1) | (3, 1) => (-1, 1),
            (1, 1) => (0, 0),
            _ => (0, 2),
        }
    }
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row, self.col)
    }
}

/// Unordered pair of basis labels, stored with `first.index() <= second.index()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairLabel {
    pub first: OperatorLabel,
    pub second: OperatorLabel,
}

pub const N_SINGLE: usize = 8;
pub const N_PAIR: usize = 36;
/// Width of the pair source basis: σ and the four products V_f·σ.
pub const N_SOURCE: usize = 40;

/// Weights w of the source basis.
pub fn source_weights(sigma: &[C64; N_SINGLE], feedback: &[C64; 4]) -> CVector {
    CVector::from_fn(N_SOURCE, |i, _| {
        let s = sigma[i % N_SINGLE];
        if i < N_SINGLE {
            s
        } else {
            feedback[i / N_SINGLE - 1] * s
        }
    })
}

impl PairLabel {
    pub fn new(a: OperatorLabel, b: OperatorLabel) -> Self {
        if a.index() <= b.index() {
            Self { first: a, second: b }
        } else {
            Self { first: b, second: a }
        }
    }

    pub fn all() -> Vec<Self> {
        let mut v = Vec::with_capacity(N_PAIR);
        for i in 0..N_SINGLE {
            for j in i..N_SINGLE {
                v.push(Self { first: OperatorLabel::BASIS[i], second: OperatorLabel::BASIS[j] });
            }
        }
        v
    }

    pub fn index(self) -> usize {
        let (i, j) = (self.first.index(), self.second.index());
        i * (2 * N_SINGLE + 1 - i) / 2 + (j - i)
    }

    pub fn flip(self) -> Self {
        Self::new(self.first.flip(), self.second.flip())
    }

    pub fn grade(self) -> (i32, u32) {
        let (q1, o1) = self.first.grade();
        let (q2, o2) = self.second.grade();
        (q1 + q2, o1 + o2)
    }

    /// Coefficient κ of the direct interaction term κ·k·σσ.
    pub fn interaction(self) -> C64 {
        let (a, b) = (self.first, self.second);
        let rows = (a.row == 3 && b.row == 3) as i32 as f64;
        let cols = (a.col == 3 && b.col == 3) as i32 as f64;
        I * (rows - cols)
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.first, self.second)
    }
}

/// Coefficient linear in the probe: constant + probe·Ω_p + probe_conj·Ω_p*.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Coefficient {
    pub constant: C64,
    pub probe: C64,
    pub probe_conj: C64,
}

impl Coefficient {
    pub const ZERO: Self = Self { constant: ZERO, probe: ZERO, probe_conj: ZERO };

    pub fn constant(c: C64) -> Self {
        Self { constant: c, ..Self::ZERO }
    }

    pub fn eval(&self, omega_p: C64) -> C64 {
        self.constant + self.probe * omega_p + self.probe_conj * omega_p.conj()
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// Coefficient of the conjugated equation: conj every part and swap Ω_p ↔ Ω_p*.
    pub fn conj(&self) -> Self {
        Self {
            constant: self.constant.conj(),
            probe: self.probe_conj.conj(),
            probe_conj: self.probe.conj(),
        }
    }
}

impl Add for Coefficient {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            constant: self.constant + o.constant,
            probe: self.probe + o.probe,
            probe_conj: self.probe_conj + o.probe_conj,
        }
    }
}

impl AddAssign for Coefficient {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Neg for Coefficient {
    type Output = Self;
    fn neg(self) -> Self {
        self * C64::new(-1.0, 0.0)
    }
}

impl Mul<C64> for Coefficient {
    type Output = Self;
    fn mul(self, s: C64) -> Self {
        Self { constant: self.constant * s, probe: self.probe * s, probe_conj: self.probe_conj * s }
    }
}

/// The four collisional integrals that feed back into the single-atom equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feedback {
    V13,
    V31,
    V23,
    V32,
}

impl Feedback {
    pub const ALL: [Self; 4] = [Self::V13, Self::V31, Self::V23, Self::V32];

    pub fn index(self) -> usize {
        self as usize
    }

    /// V_{αβ} = η∫d³R k⟨σ_αβ σ_33⟩: the pair label whose integral it is.
    pub fn pair(self) -> PairLabel {
        PairLabel::new(self.operator(), OperatorLabel::S33)
    }

    pub fn operator(self) -> OperatorLabel {
        match self {
            Self::V13 => OperatorLabel::S13,
            Self::V31 => OperatorLabel::S31,
            Self::V23 => OperatorLabel::S23,
            Self::V32 => OperatorLabel::S32,
        }
    }

    fn from_operator(op: OperatorLabel) -> Self {
        match (op.row, op.col) {
            (1, 3) => Self::V13,
            (3, 1) => Self::V31,
            (2, 3) => Self::V23,
            (3, 2) => Self::V32,
            _ => panic!("no feedback integral V{op}"),
        }
    }

    pub fn flip(self) -> Self {
        Self::from_operator(self.operator().flip())
    }
}

impl fmt::Display for Feedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.operator())
    }
}

/// Expansion of a single-site operator: index 0 is the identity, index l + 1
/// is basis label l.
type SiteExpansion = [Coefficient; N_SINGLE + 1];

fn add_matrix_unit(out: &mut SiteExpansion, row: u8, col: u8, c: Coefficient) {
    if row == 1 && col == 1 {
        // E11 = 1 − E22 − E33
        out[0] += c;
        out[1 + OperatorLabel::S22.index()] += -c;
        out[1 + OperatorLabel::S33.index()] += -c;
    } else {
        out[1 + OperatorLabel::new(row, col).index()] += c;
    }
}

/// i[h, E_αβ] = iΣ_γ h_γα E_γβ − iΣ_δ h_βδ E_αδ, accumulated with weight `part`.
fn commutator_into(out: &mut SiteExpansion, h: &[[C64; 3]; 3], label: OperatorLabel, part: u8) {
    let (a, b) = (label.row as usize - 1, label.col as usize - 1);
    let wrap = |z: C64| match part {
        0 => Coefficient::constant(z),
        1 => Coefficient { probe: z, ..Coefficient::ZERO },
        _ => Coefficient { probe_conj: z, ..Coefficient::ZERO },
    };
    for (g, row) in h.iter().enumerate() {
        let z = row[a];
        if z != ZERO {
            add_matrix_unit(out, g as u8 + 1, b as u8 + 1, wrap(I * z));
        }
    }
    for (d, &z) in h[b].iter().enumerate() {
        if z != ZERO {
            add_matrix_unit(out, a as u8 + 1, d as u8 + 1, wrap(-I * z));
        }
    }
}

/// Heisenberg generator of one site, without interactions.
fn site_generator(p: &AtomParams, label: OperatorLabel) -> SiteExpansion {
    let mut h0 = [[ZERO; 3]; 3];
    h0[1][1] = C64::new(-p.delta2, 0.0);
    h0[2][2] = C64::new(-p.delta3, 0.0);
    h0[1][2] = C64::new(p.omega_c, 0.0);
    h0[2][1] = C64::new(p.omega_c, 0.0);
    let mut hp = [[ZERO; 3]; 3];
    hp[1][0] = C64::new(1.0, 0.0);
    let mut hm = [[ZERO; 3]; 3];
    hm[0][1] = C64::new(1.0, 0.0);

    let mut out = [Coefficient::ZERO; N_SINGLE + 1];
    commutator_into(&mut out, &h0, label, 0);
    commutator_into(&mut out, &hp, label, 1);
    commutator_into(&mut out, &hm, label, 2);
    out[1 + label.index()] += Coefficient::constant(C64::new(-p.gamma(label.row, label.col), 0.0));
    out
}

/// Interaction feedback of one site: i(δ_α3 V_3β − δ_β3 V_α3).
fn site_feedback(label: OperatorLabel) -> Vec<(Feedback, C64)> {
    let mut v = Vec::new();
    if label.row == 3 && label.col != 3 {
        v.push((Feedback::from_operator(OperatorLabel::new(3, label.col)), I));
    }
    if label.col == 3 && label.row != 3 {
        v.push((Feedback::from_operator(OperatorLabel::new(label.row, 3)), -I));
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleEquation {
    pub label: OperatorLabel,
    pub coupling: [Coefficient; N_SINGLE],
    pub source: Coefficient,
    pub feedback: Vec<(Feedback, C64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleAtomSystem {
    pub equations: Vec<SingleEquation>,
}

pub fn generate_single_atom_equations(p: &AtomParams) -> SingleAtomSystem {
    let equations = OperatorLabel::BASIS
        .iter()
        .map(|&label| {
            let g = site_generator(p, label);
            let mut coupling = [Coefficient::ZERO; N_SINGLE];
            coupling.copy_from_slice(&g[1..]);
            SingleEquation { label, coupling, source: g[0], feedback: site_feedback(label) }
        })
        .collect();
    SingleAtomSystem { equations }
}

/// Ladder closure of the three-body sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LadderVariant {
    /// V_{α3}σ_{μν}.
    #[default]
    Standard,
    /// (V_{α3} − kσσ_{α3,33})σ_{μν}.
    Subtracted,
}

/// `coefficient · V_feedback · σ_single` in a pair equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderTerm {
    pub feedback: Feedback,
    pub single: OperatorLabel,
    pub coefficient: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairEquation {
    pub label: PairLabel,
    pub coupling: Vec<Coefficient>,
    pub interaction: C64,
    pub single_source: [Coefficient; N_SINGLE],
    pub ladder: Vec<LadderTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSystem {
    pub equations: Vec<PairEquation>,
    pub variant: LadderVariant,
}

pub fn generate_pair_equations(p: &AtomParams, variant: LadderVariant) -> PairSystem {
    let equations = PairLabel::all()
        .into_iter()
        .map(|label| {
            let mut coupling = vec![Coefficient::ZERO; N_PAIR];
            let mut single_source = [Coefficient::ZERO; N_SINGLE];
            let mut ladder = Vec::new();
            for (x, y) in [(label.first, label.second), (label.second, label.first)] {
                let g = site_generator(p, x);
                single_source[y.index()] += g[0];
                for (l, c) in g[1..].iter().enumerate() {
                    if !c.is_zero() {
                        coupling[PairLabel::new(OperatorLabel::BASIS[l], y).index()] += *c;
                    }
                }
                for (feedback, coefficient) in site_feedback(x) {
                    ladder.push(LadderTerm { feedback, single: y, coefficient });
                }
            }
            PairEquation { label, coupling, interaction: label.interaction(), single_source, ladder }
        })
        .collect();
    PairSystem { equations, variant }
}

/// Splits the 36 pair labels into P (nonzero diagonal k coefficient) and Q.
pub fn classify_pq(system: &PairSystem) -> Result<(Vec<PairLabel>, Vec<PairLabel>)> {
    let (p, q): (Vec<_>, Vec<_>) =
        system.equations.iter().map(|e| (e.label, e.interaction)).partition(|(_, k)| *k != ZERO);
    if p.len() != 10 || q.len() != 26 {
        return Err(Error::Generator(format!(
            "P/Q classification gave {}/{} instead of 10/26",
            p.len(),
            q.len()
        )));
    }
    Ok((p.into_iter().map(|x| x.0).collect(), q.into_iter().map(|x| x.0).collect()))
}

fn fmt_coefficient(c: &Coefficient) -> String {
    let mut parts = Vec::new();
    let f = |z: C64| format!("({:+.6}{:+.6}i)", z.re, z.im);
    if c.constant != ZERO {
        parts.push(f(c.constant));
    }
    if c.probe != ZERO {
        parts.push(format!("{}·Ωp", f(c.probe)));
    }
    if c.probe_conj != ZERO {
        parts.push(format!("{}·Ωp*", f(c.probe_conj)));
    }
    parts.join(" + ")
}

impl fmt::Display for SingleAtomSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            write!(f, "d σ{}/dt =", e.label)?;
            for (l, c) in e.coupling.iter().enumerate() {
                if !c.is_zero() {
                    write!(f, " + [{}] σ{}", fmt_coefficient(c), OperatorLabel::BASIS[l])?;
                }
            }
            if !e.source.is_zero() {
                write!(f, " + [{}]", fmt_coefficient(&e.source))?;
            }
            for (v, c) in &e.feedback {
                write!(f, " + ({:+}{:+}i) {}", c.re, c.im, v)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for PairSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            write!(f, "d σσ{}/dt =", e.label)?;
            if e.interaction != ZERO {
                write!(f, " + ({:+}{:+}i) k σσ{}", e.interaction.re, e.interaction.im, e.label)?;
            }
            for (l, c) in e.coupling.iter().enumerate() {
                if !c.is_zero() {
                    write!(f, " + [{}] σσ{}", fmt_coefficient(c), PairLabel::all()[l])?;
                }
            }
            for (l, c) in e.single_source.iter().enumerate() {
                if !c.is_zero() {
                    write!(f, " + [{}] σ{}", fmt_coefficient(c), OperatorLabel::BASIS[l])?;
                }
            }
            for t in &e.ladder {
                write!(f, " + ({:+}{:+}i) {} σ{}", t.coefficient.re, t.coefficient.im, t.feedback, t.single)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn pick(c: &Coefficient, part: u8) -> C64 {
    match part {
        0 => c.constant,
        1 => c.probe,
        _ => c.probe_conj,
    }
}

impl PairSystem {
    /// Coupling matrix at the given probe amplitude, without the k term.
    pub fn matrix(&self, omega_p: C64) -> CMatrix {
        CMatrix::from_fn(N_PAIR, N_PAIR, |i, j| self.equations[i].coupling[j].eval(omega_p))
    }

    /// One probe grade of the coupling matrix: 0 constant, 1 Ω_p, 2 Ω_p*.
    pub fn matrix_part(&self, part: u8) -> CMatrix {
        CMatrix::from_fn(N_PAIR, N_PAIR, |i, j| pick(&self.equations[i].coupling[j], part))
    }

    /// Diagonal interaction coefficients κ.
    pub fn interaction(&self) -> CVector {
        CVector::from_fn(N_PAIR, |i, _| self.equations[i].interaction)
    }

    /// 36×8 map from single-atom averages to pair sources, one probe grade.
    pub fn single_source_part(&self, part: u8) -> CMatrix {
        CMatrix::from_fn(N_PAIR, N_SINGLE, |i, j| pick(&self.equations[i].single_source[j], part))
    }

    /// Pair source r(σ, V) for the standard ladder closure.
    pub fn source(&self, omega_p: C64, sigma: &[C64; N_SINGLE], feedback: &[C64; 4]) -> CVector {
        CVector::from_fn(N_PAIR, |i, _| {
            let e = &self.equations[i];
            let s: C64 = e.single_source.iter().zip(sigma).map(|(c, x)| c.eval(omega_p) * x).sum();
            let l: C64 = e
                .ladder
                .iter()
                .map(|t| t.coefficient * feedback[t.feedback.index()] * sigma[t.single.index()])
                .sum();
            s + l
        })
    }

    /// 36×40 basis B with r = B·w: columns 0..8 carry σ, column 8 + 8f + j carries V_f·σ_j.
    pub fn source_basis(&self, omega_p: C64) -> CMatrix {
        let mut b = CMatrix::zeros(N_PAIR, N_SOURCE);
        for (i, e) in self.equations.iter().enumerate() {
            for j in 0..N_SINGLE {
                b[(i, j)] = e.single_source[j].eval(omega_p);
            }
            for t in &e.ladder {
                b[(i, N_SINGLE * (1 + t.feedback.index()) + t.single.index())] += t.coefficient;
            }
        }
        b
    }

    /// Extra coupling −k·coefficient·σ_single·σσ_{feedback pair} of the subtracted closure.
    pub fn subtracted_coupling(&self, k: f64, sigma: &[C64; N_SINGLE]) -> CMatrix {
        let mut m = CMatrix::zeros(N_PAIR, N_PAIR);
        if self.variant == LadderVariant::Subtracted {
            for (i, e) in self.equations.iter().enumerate() {
                for t in &e.ladder {
                    m[(i, t.feedback.pair().index())] -= t.coefficient * k * sigma[t.single.index()];
                }
            }
        }
        m
    }
}
