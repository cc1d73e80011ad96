//! Self-consistent collisional integrals.
//!
//! The 36 pair equations split into 10 P rows carrying a diagonal k term and
//! 26 Q rows without one:
//!
//!   kP = aP + bQ + R,    0 = cQ + dP + ℛ.
//!
//! Eliminating Q gives kP = MP + R̃ with M = a − bc⁻¹d and R̃ = R − bc⁻¹ℛ.
//! Projecting on the left eigenvectors of M turns the radial integral of
//! k·P into F(λ) = η∫d³R k/(k − λ) = (2π²η/3)√(C6/λ) per eigenvalue.
//!
//! Since A and κ do not depend on V, the ten integrals are a fixed linear
//! map (the kernel) of the 36-component pair source r(σ, V). The kernel is
//! built spectrally or, when c is singular or U near-defective, by radial
//! quadrature of the resolvent −[(A + κk)⁻¹]_P.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::algebra::{classify_pq, generate_pair_equations, Feedback, LadderVariant, PairLabel, PairSystem, N_PAIR};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::noninteracting::{solve_single_atom, SingleAtomState};
use crate::params::{AtomParams, InteractionParams};
use crate::quadrature::{radial_integral, RadialOptions};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct PqSystem {
    pub p_labels: Vec<PairLabel>,
    pub q_labels: Vec<PairLabel>,
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub kappa_p: CVector,
    pub pairs: PairSystem,
    pub omega_p: C64,
}

pub fn assemble_pq(p: &AtomParams, variant: LadderVariant) -> Result<PqSystem> {
    p.validate()?;
    let pairs = generate_pair_equations(p, variant);
    let (pl, ql) = classify_pq(&pairs)?;
    let full = pairs.matrix(p.omega_p);
    let kappa = pairs.interaction();
    let pi: Vec<usize> = pl.iter().map(|l| l.index()).collect();
    let qi: Vec<usize> = ql.iter().map(|l| l.index()).collect();
    let kappa_p = CVector::from_fn(pi.len(), |i, _| kappa[pi[i]]);
    let block = |rows: &[usize], cols: &[usize], scale: bool| {
        CMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            let x = full[(rows[i], cols[j])];
            if scale {
                -x / kappa[rows[i]]
            } else {
                x
            }
        })
    };
    Ok(PqSystem {
        a: block(&pi, &pi, true),
        b: block(&pi, &qi, true),
        c: block(&qi, &qi, false),
        d: block(&qi, &pi, false),
        p_labels: pl,
        q_labels: ql,
        kappa_p,
        pairs,
        omega_p: p.omega_p,
    })
}

impl PqSystem {
    /// Full 36-component source r(σ, V) of 0 = (A + κk)y + r.
    pub fn full_source(&self, sigma: &SingleAtomState, v: &[C64; 4]) -> CVector {
        self.pairs.source(self.omega_p, &sigma.values, v)
    }

    /// (R, ℛ): R = −r_P/κ_P and ℛ = r_Q.
    pub fn sources(&self, sigma: &SingleAtomState, v: &[C64; 4]) -> (CVector, CVector) {
        let r = self.full_source(sigma, v);
        self.split_source(&r)
    }

    pub fn split_source(&self, r: &CVector) -> (CVector, CVector) {
        let rp = CVector::from_fn(self.p_labels.len(), |i, _| -r[self.p_labels[i].index()] / self.kappa_p[i]);
        let rq = CVector::from_fn(self.q_labels.len(), |i, _| r[self.q_labels[i].index()]);
        (rp, rq)
    }

    pub fn full_matrix(&self) -> CMatrix {
        self.pairs.matrix(self.omega_p)
    }

    pub fn p_position(&self, label: PairLabel) -> Option<usize> {
        self.p_labels.iter().position(|l| *l == label)
    }
}

#[derive(Clone, Debug)]
pub struct SchurReduction {
    pub m: CMatrix,
    pub alpha: CMatrix,
    pub cond_c: f64,
}

impl SchurReduction {
    /// R̃ = R + αℛ.
    pub fn reduced_source(&self, r: &CVector, rq: &CVector) -> CVector {
        r + &self.alpha * rq
    }
}

pub const MAX_COND_C: f64 = 1e12;
pub const MAX_COND_U: f64 = 1e10;

pub fn schur_reduce(pq: &PqSystem) -> Result<SchurReduction> {
    let cond_c = linalg::condition_number(&pq.c);
    if !(cond_c <= MAX_COND_C) {
        return Err(Error::IllConditioned { cond: cond_c, point: format!("Omega_p = {}", pq.omega_p) });
    }
    let cinv_d = linalg::solve_matrix(&pq.c, &pq.d, "Q block c")?;
    let m = &pq.a - &pq.b * cinv_d;
    let cinv = linalg::inverse(&pq.c, "Q block c")?;
    let alpha = -(&pq.b * cinv);
    Ok(SchurReduction { m, alpha, cond_c })
}

/// Left eigen-structure of M: rows of `u` are eigenvectors of Mᵀ.
#[derive(Clone, Debug)]
pub struct SpectralSystem {
    pub eigenvalues: Vec<C64>,
    pub u: CMatrix,
    pub u_inv: CMatrix,
    pub cond_u: f64,
    pub residual: f64,
}

impl SpectralSystem {
    /// F̂: row m is F(λ_m)·(row m of U).
    pub fn f_matrix(&self, inter: &InteractionParams) -> Result<CMatrix> {
        let mut f = self.u.clone();
        for (m, lam) in self.eigenvalues.iter().enumerate() {
            let s = f_lambda(*lam, inter)?;
            for j in 0..f.ncols() {
                f[(m, j)] *= s;
            }
        }
        Ok(f)
    }

    /// G = U⁻¹F̂, so that the ten integrals are G·R̃.
    pub fn integral_operator(&self, inter: &InteractionParams) -> Result<CMatrix> {
        Ok(&self.u_inv * self.f_matrix(inter)?)
    }
}

pub fn spectral_decompose(m: &CMatrix, eig_tol: f64) -> Result<SpectralSystem> {
    let mt = m.transpose();
    let e = linalg::eig(&mt)?;
    let u = e.vectors.transpose();
    let cond_u = linalg::condition_number(&u);
    if !(cond_u <= MAX_COND_U) {
        return Err(Error::Defective { cond: cond_u });
    }
    let scale = linalg::max_abs(m).max(f64::MIN_POSITIVE);
    let mut residual: f64 = 0.0;
    for (i, lam) in e.values.iter().enumerate() {
        let v = e.vectors.column(i).into_owned();
        let r = (&mt * &v - &v * *lam).norm();
        residual = residual.max(r / scale);
    }
    if residual > eig_tol {
        return Err(Error::Eigen(format!("eigenpair residual {residual:.3e}")));
    }
    let u_inv = linalg::inverse(&u, "eigenvector matrix U")?;
    Ok(SpectralSystem { eigenvalues: e.values, u, u_inv, cond_u, residual })
}

/// F(λ) = (2π²η/3)√(C6/λ) = η∫d³R k/(k − λ), principal branch.
pub fn f_lambda(lambda: C64, inter: &InteractionParams) -> Result<C64> {
    if inter.c6 == 0.0 {
        return Ok(ZERO);
    }
    if lambda == ZERO {
        return Err(Error::BranchAmbiguity { ratio: C64::new(f64::INFINITY, 0.0) });
    }
    let z = inter.c6 / lambda;
    if z.re <= 0.0 && z.im.abs() <= 1e-12 * z.norm() {
        return Err(Error::BranchAmbiguity { ratio: z });
    }
    Ok(2.0 * PI * PI * inter.eta / 3.0 * z.sqrt())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelRoute {
    /// Spectral when c and U are well conditioned, otherwise quadrature.
    #[default]
    Auto,
    Spectral,
    Quadrature,
}

/// Linear map from the pair source r (36) to the ten integrals η∫d³R k·P.
#[derive(Clone, Debug)]
pub struct CollisionKernel {
    pub matrix: CMatrix,
    pub route: KernelRoute,
    pub p_labels: Vec<PairLabel>,
    pub note: String,
}

impl CollisionKernel {
    pub fn apply(&self, r: &CVector) -> CVector {
        &self.matrix * r
    }

    /// Rows of the four feedback integrals, ordered V13, V31, V23, V32.
    pub fn feedback_rows(&self) -> [usize; 4] {
        Feedback::ALL.map(|f| self.p_labels.iter().position(|l| *l == f.pair()).unwrap())
    }
}

fn spectral_kernel(pq: &PqSystem, inter: &InteractionParams, eig_tol: f64) -> Result<CMatrix> {
    let red = schur_reduce(pq)?;
    let eig = spectral_decompose(&red.m, eig_tol)?;
    let g = eig.integral_operator(inter)?;
    // r ↦ R̃ = −κ_P⁻¹ r_P + α r_Q
    let mut lift = CMatrix::zeros(pq.p_labels.len(), N_PAIR);
    for (i, l) in pq.p_labels.iter().enumerate() {
        lift[(i, l.index())] = -1.0 / pq.kappa_p[i];
    }
    for (j, l) in pq.q_labels.iter().enumerate() {
        for i in 0..pq.p_labels.len() {
            lift[(i, l.index())] = red.alpha[(i, j)];
        }
    }
    Ok(g * lift)
}

/// −[(A + κk + extra(k))⁻¹]_P integrated radially.
fn quadrature_kernel<E: Fn(f64) -> CMatrix>(
    pq: &PqSystem,
    inter: &InteractionParams,
    extra: &E,
    opts: RadialOptions,
) -> Result<CMatrix> {
    let a = pq.full_matrix();
    let kappa = pq.pairs.interaction();
    let np = pq.p_labels.len();
    let mut sel = CMatrix::zeros(N_PAIR, np);
    for (i, l) in pq.p_labels.iter().enumerate() {
        sel[(l.index(), i)] = C64::new(1.0, 0.0);
    }
    let nan = CMatrix::from_element(np, N_PAIR, C64::new(f64::NAN, f64::NAN));
    let g = |k: f64| {
        let m = &a + CMatrix::from_diagonal(&(&kappa * C64::new(k, 0.0))) + extra(k);
        // rows of the inverse: solve (A + κk)ᵀ Z = S, rows = Zᵀ
        match m.transpose().lu().solve(&sel) {
            Some(z) => -z.transpose(),
            None => nan.clone(),
        }
    };
    let d: Vec<f64> = (0..N_PAIR).map(|i| a[(i, i)].norm()).filter(|x| *x > 0.0).collect();
    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = d.iter().cloned().fold(0.0, f64::max);
    let r = radial_integral(&g, inter.c6, inter.eta, (lo, hi), opts)?;
    if r.value.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::SingularSystem { context: "resolvent inside kernel quadrature".into() });
    }
    Ok(r.value)
}

pub fn build_kernel(
    p: &AtomParams,
    inter: &InteractionParams,
    route: KernelRoute,
    eig_tol: f64,
    quad: RadialOptions,
) -> Result<CollisionKernel> {
    let pq = assemble_pq(p, LadderVariant::Standard)?;
    let none = |_: f64| CMatrix::zeros(N_PAIR, N_PAIR);
    let (matrix, used, note) = match route {
        KernelRoute::Spectral => (spectral_kernel(&pq, inter, eig_tol)?, KernelRoute::Spectral, String::new()),
        KernelRoute::Quadrature => {
            (quadrature_kernel(&pq, inter, &none, quad)?, KernelRoute::Quadrature, String::new())
        }
        KernelRoute::Auto => match spectral_kernel(&pq, inter, eig_tol) {
            Ok(m) => (m, KernelRoute::Spectral, String::new()),
            Err(e) => (quadrature_kernel(&pq, inter, &none, quad)?, KernelRoute::Quadrature, e.to_string()),
        },
    };
    Ok(CollisionKernel { matrix, route: used, p_labels: pq.p_labels, note })
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub damping: f64,
    pub max_iterations: usize,
    pub max_steps: usize,
    pub route: KernelRoute,
    pub ladder: LadderVariant,
    pub eig_tol: f64,
    pub quadrature: RadialOptions,
    /// Newton iteration budget per continuation step.
    pub newton_iterations: usize,
    /// Below this γ33 the result is the γ33 → 0⁺ limit, extrapolated from γ33 = ε, 2ε.
    pub gamma33_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            damping: 0.5,
            max_iterations: 500,
            max_steps: 50,
            route: KernelRoute::Auto,
            ladder: LadderVariant::Standard,
            eig_tol: 1e-10,
            quadrature: RadialOptions::default(),
            newton_iterations: 50,
            gamma33_floor: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionalIntegrals {
    pub v13: C64,
    pub v31: C64,
    pub v23: C64,
    pub v32: C64,
    pub iterations: usize,
    pub residual: f64,
}

impl CollisionalIntegrals {
    pub fn as_array(&self) -> [C64; 4] {
        [self.v13, self.v31, self.v23, self.v32]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    FixedPoint,
    Newton,
}

#[derive(Clone, Debug)]
pub struct CollisionalSolution {
    pub integrals: CollisionalIntegrals,
    /// All ten P integrals, in P-label order.
    pub all: Vec<(PairLabel, C64)>,
    pub state: SingleAtomState,
    pub route: KernelRoute,
    pub route_note: String,
    pub steps: usize,
    pub method: SolveMethod,
    /// Continuation rejected a corrector that converged away from the predicted branch.
    pub branch_jump: bool,
    /// ε used for the γ33 → 0⁺ extrapolation, if any.
    pub regularized: Option<f64>,
}

/// Φ(V) evaluator at one probe amplitude.
struct Map<'a> {
    p: AtomParams,
    pq: PqSystem,
    kernel: Option<CollisionKernel>,
    inter: &'a InteractionParams,
    opts: &'a SolverOptions,
    rows: [usize; 4],
}

impl<'a> Map<'a> {
    fn new(p: AtomParams, inter: &'a InteractionParams, opts: &'a SolverOptions) -> Result<Self> {
        let pq = assemble_pq(&p, opts.ladder)?;
        let kernel = match opts.ladder {
            LadderVariant::Standard => Some(build_kernel(&p, inter, opts.route, opts.eig_tol, opts.quadrature)?),
            LadderVariant::Subtracted => None,
        };
        let rows = Feedback::ALL.map(|f| pq.p_position(f.pair()).unwrap());
        Ok(Self { p, pq, kernel, inter, opts, rows })
    }

    fn all(&self, v: &[C64; 4]) -> Result<(CVector, SingleAtomState)> {
        let sigma = solve_single_atom(&self.p, v)?;
        let r = self.pq.full_source(&sigma, v);
        let out = match &self.kernel {
            Some(k) => k.apply(&r),
            None => {
                let extra = |k: f64| self.pq.pairs.subtracted_coupling(k, &sigma.values);
                quadrature_kernel(&self.pq, self.inter, &extra, self.opts.quadrature)? * r
            }
        };
        Ok((out, sigma))
    }

    fn eval(&self, v: &[C64; 4]) -> Result<[C64; 4]> {
        let (all, _) = self.all(v)?;
        Ok(self.rows.map(|i| all[i]))
    }
}

fn norm4(v: &[C64; 4]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn diff4(a: &[C64; 4], b: &[C64; 4]) -> [C64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn rel_residual(v: &[C64; 4], f: &[C64; 4]) -> f64 {
    let d = norm4(&diff4(f, v));
    let s = norm4(f).max(norm4(v));
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

struct StepResult {
    v: [C64; 4],
    iterations: usize,
    residual: f64,
    method: SolveMethod,
}

fn to_reals(v: &[C64; 4]) -> [f64; 8] {
    let mut x = [0.0; 8];
    for i in 0..4 {
        x[2 * i] = v[i].re;
        x[2 * i + 1] = v[i].im;
    }
    x
}

fn from_reals(x: &[f64]) -> [C64; 4] {
    [0, 1, 2, 3].map(|i| C64::new(x[2 * i], x[2 * i + 1]))
}

fn newton(map: &Map, start: [C64; 4], budget: usize, tol: f64) -> Result<StepResult> {
    let mut v = start;
    let mut f = map.eval(&v)?;
    let mut res = rel_residual(&v, &f);
    let mut it = 0;
    while it < budget {
        if res < tol {
            return Ok(StepResult { v, iterations: it, residual: res, method: SolveMethod::Newton });
        }
        it += 1;
        let x = to_reals(&v);
        let g0 = to_reals(&diff4(&f, &v));
        let h = 1e-6 * norm4(&v).max(norm4(&f)).max(f64::MIN_POSITIVE);
        let mut jac = nalgebra::DMatrix::<f64>::zeros(8, 8);
        for j in 0..8 {
            let mut xp = x;
            xp[j] += h;
            let vp = from_reals(&xp);
            let gp = to_reals(&diff4(&map.eval(&vp)?, &vp));
            for i in 0..8 {
                jac[(i, j)] = (gp[i] - g0[i]) / h;
            }
        }
        let rhs = nalgebra::DVector::from_iterator(8, g0.iter().map(|g| -g));
        let step = jac.lu().solve(&rhs).ok_or(Error::NonConvergence { iterations: it, residual: res, v })?;
        let gnorm = g0.iter().map(|g| g * g).sum::<f64>().sqrt();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let xn: Vec<f64> = (0..8).map(|i| x[i] + t * step[i]).collect();
            let vn = from_reals(&xn);
            let fn_ = map.eval(&vn)?;
            let gn = norm4(&diff4(&fn_, &vn));
            if gn < gnorm || gn == 0.0 {
                v = vn;
                f = fn_;
                res = rel_residual(&v, &f);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < tol {
        return Ok(StepResult { v, iterations: it, residual: res, method: SolveMethod::Newton });
    }
    Err(Error::NonConvergence { iterations: it, residual: res, v })
}

fn solve_step(map: &Map, start: [C64; 4]) -> Result<StepResult> {
    let opts = map.opts;
    let mut v = start;
    let mut prev = f64::INFINITY;
    let mut it = 0;
    while it < opts.max_iterations {
        let f = map.eval(&v)?;
        let res = rel_residual(&v, &f);
        it += 1;
        if res < opts.tol {
            return Ok(StepResult { v, iterations: it, residual: res, method: SolveMethod::FixedPoint });
        }
        if !(res < prev) || (it > 10 && res > 0.9 * prev) {
            break;
        }
        prev = res;
        for i in 0..4 {
            v[i] += opts.damping * (f[i] - v[i]);
        }
    }
    let mut r = newton(map, v, opts.newton_iterations, opts.tol)?;
    r.iterations += it;
    Ok(r)
}

/// Solves V = K·r(σ(V), V) for the four feedback integrals.
///
/// At γ33 = 0 the pencil A + κk has a Jordan block at infinity and the
/// radial integral of the exact resolvent diverges along the ladder
/// directions, while the γ33 → 0⁺ limit of V is finite and linear in γ33.
/// Below `gamma33_floor` the solve runs at γ33 = ε and 2ε and V is
/// extrapolated linearly to γ33.
pub fn solve_collisional_integrals(
    p: &AtomParams,
    inter: &InteractionParams,
    opts: &SolverOptions,
) -> Result<CollisionalSolution> {
    p.validate()?;
    inter.validate()?;
    let eps = opts.gamma33_floor;
    if eps > 0.0 && p.gamma33 < eps {
        let at = |g: f64| solve_regular(&AtomParams { gamma33: g, ..*p }, inter, opts);
        let s1 = at(eps)?;
        let s2 = at(2.0 * eps)?;
        let t = (p.gamma33 - eps) / eps;
        let lerp = |a: C64, b: C64| a + (b - a) * t;
        let v = [0, 1, 2, 3].map(|i| lerp(s1.integrals.as_array()[i], s2.integrals.as_array()[i]));
        let all = s1.all.iter().zip(&s2.all).map(|((l, a), (_, b))| (*l, lerp(*a, *b))).collect();
        let state = solve_single_atom(p, &v)?;
        return Ok(CollisionalSolution {
            integrals: CollisionalIntegrals {
                v13: v[0],
                v31: v[1],
                v23: v[2],
                v32: v[3],
                iterations: s1.integrals.iterations + s2.integrals.iterations,
                residual: s1.integrals.residual.max(s2.integrals.residual),
            },
            all,
            state,
            steps: s1.steps.max(s2.steps),
            branch_jump: s1.branch_jump || s2.branch_jump,
            regularized: Some(eps),
            ..s1
        });
    }
    solve_regular(p, inter, opts)
}

/// Relative deviation of a corrected point from its prediction above which
/// the continuation step is rejected.
const PREDICTION_TOL: f64 = 0.02;

/// Predictor–corrector continuation in t = |Ω_p|/|Ω_p,final|.
///
/// The predictor extrapolates w = V/t³ quadratically in ln t; the corrector is the
/// damped fixed point with Newton fallback. A step is halved when the
/// corrector fails or lands further than `PREDICTION_TOL` from the
/// prediction; a converged but rejected corrector is a detected branch jump.
fn solve_regular(p: &AtomParams, inter: &InteractionParams, opts: &SolverOptions) -> Result<CollisionalSolution> {
    if opts.ladder == LadderVariant::Subtracted {
        // the standard root pins the branch
        let std_opts = SolverOptions { ladder: LadderVariant::Standard, ..*opts };
        let base = solve_regular(p, inter, &std_opts)?;
        let map = Map::new(*p, inter, opts)?;
        let mut r = solve_step(&map, base.integrals.as_array())?;
        r.iterations += base.integrals.iterations;
        return finish(r, map, base.steps, base.branch_jump);
    }
    let intensity = p.intensity();
    if intensity == 0.0 {
        let map = Map::new(*p, inter, opts)?;
        let r = solve_step(&map, [ZERO; 4])?;
        return finish(r, map, 1, false);
    }
    let amp = p.omega_p;
    let at = |t: f64| if t >= 1.0 { *p } else { p.with_probe(amp * t) };
    let scale = |v: &[C64; 4], f: f64| v.map(|x| x * f);
    // first step stays in the perturbative regime
    let mut h = (1e-3 / intensity).sqrt().min(1.0);
    let mut t = 0.0;
    let mut hist: Vec<(f64, [C64; 4])> = vec![];
    let mut w = [ZERO; 4];
    let mut total = 0;
    let mut accepted = 0;
    let mut attempts = 0;
    let mut jump = false;
    let mut last: Option<(StepResult, Map)> = None;
    let mut last_err = None;
    while t < 1.0 {
        attempts += 1;
        if attempts > 4 * opts.max_steps || accepted >= opts.max_steps {
            return Err(last_err.unwrap_or(Error::NonConvergence {
                iterations: total,
                residual: f64::NAN,
                v: scale(&w, t * t * t),
            }));
        }
        let tn = (t + h).min(1.0);
        let w_pred = predict(&hist, tn).unwrap_or(w);
        let map = Map::new(at(tn), inter, opts)?;
        match solve_step(&map, scale(&w_pred, tn * tn * tn)) {
            Ok(r) => {
                total += r.iterations;
                let w_new = scale(&r.v, 1.0 / (tn * tn * tn));
                let dev = norm4(&diff4(&w_new, &w_pred)) / norm4(&w_new).max(f64::MIN_POSITIVE);
                if accepted > 0 && dev > PREDICTION_TOL {
                    jump = true;
                    h *= 0.5;
                    continue;
                }
                hist.push((tn, w_new));
                if hist.len() > 3 {
                    hist.remove(0);
                }
                w = w_new;
                t = tn;
                accepted += 1;
                h *= if accepted == 1 { 2.0 } else { (0.9 * (PREDICTION_TOL / dev.max(1e-12)).cbrt()).clamp(0.5, 2.0) };
                last = Some((StepResult { iterations: total, ..r }, map));
            }
            Err(e @ Error::NonConvergence { .. }) => {
                last_err = Some(e);
                h *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    let (r, map) = last.unwrap();
    finish(r, map, accepted, jump)
}

/// Lagrange extrapolation of w in ln t through the stored points.
fn predict(hist: &[(f64, [C64; 4])], t: f64) -> Option<[C64; 4]> {
    if hist.len() < 2 {
        return None;
    }
    let x = t.ln();
    let xs: Vec<f64> = hist.iter().map(|(t, _)| t.ln()).collect();
    let mut out = [ZERO; 4];
    for (j, (_, wj)) in hist.iter().enumerate() {
        let l: f64 = (0..xs.len()).filter(|&m| m != j).map(|m| (x - xs[m]) / (xs[j] - xs[m])).product();
        for i in 0..4 {
            out[i] += wj[i] * l;
        }
    }
    Some(out)
}

fn finish(r: StepResult, map: Map, steps: usize, branch_jump: bool) -> Result<CollisionalSolution> {
    let (all, state) = map.all(&r.v)?;
    let v = r.v;
    Ok(CollisionalSolution {
        integrals: CollisionalIntegrals {
            v13: v[0],
            v31: v[1],
            v23: v[2],
            v32: v[3],
            iterations: r.iterations,
            residual: r.residual,
        },
        all: map.pq.p_labels.iter().cloned().zip(all.iter().cloned()).collect(),
        state,
        route: map.kernel.as_ref().map(|k| k.route).unwrap_or(KernelRoute::Quadrature),
        route_note: map.kernel.as_ref().map(|k| k.note.clone()).unwrap_or_default(),
        steps,
        method: r.method,
        branch_jump,
        regularized: None,
    })
}

/// One corrector solve from a given starting point, without continuation.
pub fn solve_from(
    p: &AtomParams,
    inter: &InteractionParams,
    opts: &SolverOptions,
    start: [C64; 4],
) -> Result<CollisionalSolution> {
    p.validate()?;
    inter.validate()?;
    let map = Map::new(*p, inter, opts)?;
    let r = solve_step(&map, start)?;
    finish(r, map, 1, false)
}

/// Single-atom averages with the collisional integrals as sources.
pub fn reconstruct_averages(p: &AtomParams, v: &CollisionalIntegrals) -> Result<SingleAtomState> {
    solve_single_atom(p, &v.as_array())
}
