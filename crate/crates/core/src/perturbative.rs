//! Exact interacting third-order solution: k-resolved pair correlators of
//! second and third order, the radial integral V13^(3), and the closed-form
//! blockade estimates built on the effective relaxation constant T.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::algebra::{generate_pair_equations, LadderVariant, OperatorLabel, PairLabel, N_PAIR};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::noninteracting::{perturbative_coefficients, single_expansion, Expansion};
use crate::params::{effective_t, relaxation_constants, AtomParams, InteractionParams};
use crate::quadrature::{radial_integral, RadialOptions, RadialQuadratureResult};

/// Pair correlator expansion coefficients at fixed k and total order.
///
/// Entry l holds the coefficient of Ω_p^a (Ω_p*)^b with a + b = `order` and
/// a − b equal to the net probe-photon number of label l; labels whose
/// leading power exceeds `order` (or has the wrong parity) are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCorrelatorVector {
    pub k: f64,
    pub order: u32,
    pub values: [C64; N_PAIR],
}

impl PairCorrelatorVector {
    pub fn get(&self, label: PairLabel) -> C64 {
        self.values[label.index()]
    }
}

/// Pair labels carrying a coefficient at grade (a, b).
pub fn grade_labels(a: u32, b: u32) -> Vec<PairLabel> {
    let (q, n) = (a as i32 - b as i32, a + b);
    PairLabel::all()
        .into_iter()
        .filter(|l| {
            let (lq, lo) = l.grade();
            lq == q && lo <= n && (n - lo) % 2 == 0
        })
        .collect()
}

/// Order-by-order solver for the pair system at V = 0.
#[derive(Clone, Debug)]
pub struct PairCascade {
    a0: CMatrix,
    ap: CMatrix,
    am: CMatrix,
    kappa: CVector,
    s0: CMatrix,
    sp: CMatrix,
    sm: CMatrix,
    singles: Expansion,
}

/// Pair coefficients by grade, each a full 36-vector.
pub type PairExpansion = std::collections::BTreeMap<(u32, u32), CVector>;

impl PairCascade {
    pub fn new(p: &AtomParams) -> Result<Self> {
        p.validate()?;
        let sys = generate_pair_equations(p, LadderVariant::Standard);
        Ok(Self {
            a0: sys.matrix_part(0),
            ap: sys.matrix_part(1),
            am: sys.matrix_part(2),
            kappa: sys.interaction(),
            s0: sys.single_source_part(0),
            sp: sys.single_source_part(1),
            sm: sys.single_source_part(2),
            singles: single_expansion(p, 3)?,
        })
    }

    pub fn singles(&self) -> &Expansion {
        &self.singles
    }

    fn rhs(&self, lower: &PairExpansion, a: u32, b: u32) -> CVector {
        let mut r = &self.s0 * &self.singles[&(a, b)];
        if a > 0 {
            r += &self.ap * &lower[&(a - 1, b)] + &self.sp * &self.singles[&(a - 1, b)];
        }
        if b > 0 {
            r += &self.am * &lower[&(a, b - 1)] + &self.sm * &self.singles[&(a, b - 1)];
        }
        r
    }

    /// Solves grade (a, b) restricted to its labels.
    fn solve_grade(&self, k: f64, lower: &PairExpansion, a: u32, b: u32) -> Result<CVector> {
        let labels: Vec<usize> = grade_labels(a, b).iter().map(|l| l.index()).collect();
        let mut out = CVector::zeros(N_PAIR);
        if labels.is_empty() {
            return Ok(out);
        }
        let r = self.rhs(lower, a, b);
        let n = labels.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            let (ii, jj) = (labels[i], labels[j]);
            self.a0[(ii, jj)] + if ii == jj { self.kappa[ii] * k } else { C64::new(0.0, 0.0) }
        });
        let rhs = CVector::from_fn(n, |i, _| -r[labels[i]]);
        let x = linalg::solve(&m, &rhs, &format!("pair grade ({a},{b}) at k = {k}"))?;
        for (i, &l) in labels.iter().enumerate() {
            out[l] = x[i];
        }
        Ok(out)
    }

    /// All pair coefficients with a + b ≤ `max_order` at interaction k.
    pub fn expansion(&self, k: f64, max_order: u32) -> Result<PairExpansion> {
        let mut out = PairExpansion::new();
        for order in 0..=max_order {
            for a in (0..=order).rev() {
                let b = order - a;
                let x = self.solve_grade(k, &out, a, b)?;
                out.insert((a, b), x);
            }
        }
        Ok(out)
    }

    /// Grade (a, b) from the full 36-dimensional solve, for cross-checks.
    pub fn expansion_dense(&self, k: f64, max_order: u32) -> Result<PairExpansion> {
        let m = &self.a0 + CMatrix::from_diagonal(&(&self.kappa * C64::new(k, 0.0)));
        let mut out = PairExpansion::new();
        for order in 0..=max_order {
            for a in (0..=order).rev() {
                let b = order - a;
                let r = self.rhs(&out, a, b);
                out.insert((a, b), linalg::solve(&m, &(-r), "dense pair grade")?);
            }
        }
        Ok(out)
    }

    /// σσ^(3)_{13,33}(k): only the grades (2,0), (1,1), (2,1) are needed.
    pub fn sigma_13_33(&self, k: f64) -> Result<C64> {
        let mut lower = PairExpansion::new();
        let zero = CVector::zeros(N_PAIR);
        for g in [(0, 0), (1, 0), (0, 1)] {
            lower.insert(g, zero.clone());
        }
        lower.insert((2, 0), self.solve_grade(k, &lower, 2, 0)?);
        lower.insert((1, 1), self.solve_grade(k, &lower, 1, 1)?);
        let y = self.solve_grade(k, &lower, 2, 1)?;
        Ok(y[PairLabel::new(OperatorLabel::S13, OperatorLabel::S33).index()])
    }

    /// Magnitudes of the smallest and largest diagonal rates, used as pole scales.
    pub fn rate_scale(&self) -> (f64, f64) {
        let d: Vec<f64> = (0..N_PAIR).map(|i| self.a0[(i, i)].norm()).filter(|x| *x > 0.0).collect();
        (d.iter().cloned().fold(f64::INFINITY, f64::min), d.iter().cloned().fold(0.0, f64::max))
    }
}

fn collect(exp: &PairExpansion, order: u32, k: f64) -> PairCorrelatorVector {
    let mut values = [C64::new(0.0, 0.0); N_PAIR];
    for a in 0..=order {
        let v = &exp[&(a, order - a)];
        for (i, x) in v.iter().enumerate() {
            if *x != C64::new(0.0, 0.0) {
                values[i] = *x;
            }
        }
    }
    PairCorrelatorVector { k, order, values }
}

pub fn pair_correlators_order2(p: &AtomParams, k: f64) -> Result<PairCorrelatorVector> {
    let c = PairCascade::new(p)?;
    Ok(collect(&c.expansion(k, 2)?, 2, k))
}

pub fn pair_correlators_order3(p: &AtomParams, k: f64) -> Result<PairCorrelatorVector> {
    let c = PairCascade::new(p)?;
    Ok(collect(&c.expansion(k, 3)?, 3, k))
}

/// The eight third-order correlators with net probe-photon number +1, in
/// the order {13,33}, {13,23}, {13,32}, {12,33}, {12,23}, {13,22}, {12,32}, {12,22}.
pub fn third_order_labels() -> [PairLabel; 8] {
    use OperatorLabel as L;
    [
        PairLabel::new(L::S13, L::S33),
        PairLabel::new(L::S13, L::S23),
        PairLabel::new(L::S13, L::S32),
        PairLabel::new(L::S12, L::S33),
        PairLabel::new(L::S12, L::S23),
        PairLabel::new(L::S13, L::S22),
        PairLabel::new(L::S12, L::S32),
        PairLabel::new(L::S12, L::S22),
    ]
}

/// σσ^(3)_{13,33} ≈ σ^(1)_13 σ^(2)_33 · T/(T + ik).
pub fn sigma_13_33_approx(p: &AtomParams, k: f64) -> Result<C64> {
    let c = perturbative_coefficients(p)?;
    let t = effective_t(p)?;
    Ok(c.s13_1 * c.s33_2 * t / (t + C64::new(0.0, k)))
}

/// V13^(3) = η∫d³R k·σσ^(3)_{13,33}(k) by adaptive radial quadrature.
pub fn collisional_integral_v13_order3(
    p: &AtomParams,
    inter: &InteractionParams,
    opts: RadialOptions,
) -> Result<RadialQuadratureResult> {
    inter.validate()?;
    let cascade = PairCascade::new(p)?;
    let t = effective_t(p)?.norm();
    let (lo, hi) = cascade.rate_scale();
    let g = |k: f64| cascade.sigma_13_33(k).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let r = radial_integral(&g, inter.c6, inter.eta, (lo.min(t), hi.max(t)), opts)?;
    if !(r.value.re.is_finite() && r.value.im.is_finite()) {
        return Err(Error::SingularSystem { context: "pair system inside V13 quadrature".into() });
    }
    Ok(r)
}

/// I_b = η∫d³R ik/(T + ik) by radial quadrature.
pub fn ib_quadrature(p: &AtomParams, inter: &InteractionParams, opts: RadialOptions) -> Result<RadialQuadratureResult> {
    let t = effective_t(p)?;
    let g = |k: f64| C64::new(0.0, 1.0) / (t + C64::new(0.0, k));
    radial_integral(&g, inter.c6, inter.eta, (t.norm(), t.norm()), opts)
}

/// n_b = I_b = 2π²η/(3√(iT/C6)), principal branch.
pub fn nb_closed_form(p: &AtomParams, inter: &InteractionParams) -> Result<C64> {
    let t = effective_t(p)?;
    if inter.c6 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let z = C64::new(0.0, 1.0) * t / inter.c6;
    if z.re <= 0.0 && z.im.abs() <= 1e-12 * z.norm() {
        return Err(Error::BranchAmbiguity { ratio: 1.0 / z });
    }
    Ok(2.0 * PI * PI * inter.eta / (3.0 * z.sqrt()))
}

/// Dispersive approximation n_b ≈ 2π²η/(3√((Δ3 − Ω_c²/Δ2)/C6)).
pub fn nb_dispersive(p: &AtomParams, inter: &InteractionParams) -> Result<f64> {
    let x = (p.delta3 - p.omega_c * p.omega_c / p.delta2) / inter.c6;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("effective detuning and C6 have opposite signs ({x})")));
    }
    Ok(2.0 * PI * PI * inter.eta / (3.0 * x.sqrt()))
}

/// V13^(3) ≈ −iT σ^(1)_13 σ^(2)_33 I_b, from the T/(T + ik) correlator shape.
pub fn v13_order3_closed_form(p: &AtomParams, inter: &InteractionParams) -> Result<C64> {
    let c = perturbative_coefficients(p)?;
    let t = effective_t(p)?;
    Ok(C64::new(0.0, -1.0) * t * c.s13_1 * c.s33_2 * nb_closed_form(p, inter)?)
}

/// D = Γ12Γ13 + Ω_c².
pub fn eit_denominator(p: &AtomParams) -> C64 {
    let g = relaxation_constants(p);
    g.gamma12 * g.gamma13 + p.omega_c * p.omega_c
}

/// Third-order susceptibility coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThirdOrder {
    pub v13_3: C64,
    pub noninteracting: C64,
    pub collisional: C64,
    pub total: C64,
}

/// σ^(3)_12 = σ^(3)_12(non-interacting) − Ω_c V13^(3)/(Γ13Γ12 + Ω_c²).
pub fn chi3_interacting(p: &AtomParams, inter: &InteractionParams, opts: RadialOptions) -> Result<ThirdOrder> {
    let c = perturbative_coefficients(p)?;
    let v = collisional_integral_v13_order3(p, inter, opts)?.value;
    let coll = -p.omega_c * v / eit_denominator(p);
    Ok(ThirdOrder { v13_3: v, noninteracting: c.s12_3, collisional: coll, total: c.s12_3 + coll })
}

/// Leading σ12 response to a unit V13 source through the single-atom solve.
pub fn sigma12_response_to_v13(p: &AtomParams) -> Result<C64> {
    let sys = crate::algebra::generate_single_atom_equations(p);
    let a0 = sys.matrix_part(0);
    let mut v = [C64::new(0.0, 0.0); 4];
    v[0] = C64::new(1.0, 0.0);
    let src = sys.source(C64::new(0.0, 0.0), &v);
    let x = linalg::solve(&a0, &(-src), "single-atom response to V13")?;
    Ok(x[OperatorLabel::S12.index()])
}

/// Coefficients n_0..n_p and d_1..d_q (d_0 = 1) of a rational fit, and the
/// largest relative residual over the samples.
#[derive(Clone, Debug)]
pub struct RationalFit {
    pub numerator: Vec<C64>,
    pub denominator: Vec<C64>,
    pub residual: f64,
}

impl RationalFit {
    pub fn eval(&self, x: f64) -> C64 {
        let poly = |c: &[C64]| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * x + a);
        poly(&self.numerator) / poly(&self.denominator)
    }
}

/// Linearized least-squares fit N(x) − f(x)·(D(x) − 1) = f(x) with deg N = p, deg D = q.
pub fn rational_fit(xs: &[f64], fs: &[C64], p: usize, q: usize) -> Result<RationalFit> {
    let n = xs.len();
    let m = p + 1 + q;
    if n < m {
        return Err(Error::Domain(format!("need at least {m} samples, got {n}")));
    }
    let a = CMatrix::from_fn(n, m, |i, j| {
        if j <= p {
            C64::new(xs[i].powi(j as i32), 0.0)
        } else {
            -fs[i] * xs[i].powi((j - p) as i32)
        }
    });
    let b = CVector::from_fn(n, |i, _| fs[i]);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-300).map_err(|e| Error::Domain(e.to_string()))?;
    let numerator: Vec<C64> = (0..=p).map(|j| sol[j]).collect();
    let mut denominator = vec![C64::new(1.0, 0.0)];
    denominator.extend((0..q).map(|j| sol[p + 1 + j]));
    let mut fit = RationalFit { numerator, denominator, residual: 0.0 };
    fit.residual = xs
        .iter()
        .zip(fs)
        .map(|(x, f)| (fit.eval(*x) - f).norm() / f.norm())
        .fold(0.0, f64::max);
    Ok(fit)
}
