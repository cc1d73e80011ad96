//! Adaptive Gauss–Kronrod quadrature and the radial integral
//! η∫d³R k(R)·g(k(R)) for the van der Waals potential k = −C6/R⁶.
//!
//! In u = R³ the radial measure becomes (4πη/3) du and k = −C6/u². The
//! integrand k·g(k) tends to a constant for u → 0 and decays as u⁻² for
//! u → ∞. The finite part is integrated on s = ln u; the core [0, u_lo] is
//! taken as a constant plateau and the tail [u_hi, ∞) from the expansion
//! g(k) = g(0) + g'(0)k.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Values that can be integrated: a vector space with a norm.
pub trait QuadValue: Clone {
    fn zeros_like(&self) -> Self;
    fn add_scaled(&mut self, w: f64, x: &Self);
    fn norm(&self) -> f64;
}

impl QuadValue for C64 {
    fn zeros_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += x * w;
    }
    fn norm(&self) -> f64 {
        C64::norm(*self)
    }
}

impl QuadValue for CVector {
    fn zeros_like(&self) -> Self {
        CVector::zeros(self.len())
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        self.axpy(C64::new(w, 0.0), x, C64::new(1.0, 0.0));
    }
    fn norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl QuadValue for CMatrix {
    fn zeros_like(&self) -> Self {
        CMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        self.zip_apply(x, |a, b| *a += b * w);
    }
    fn norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error: f64,
    pub nodes: usize,
    pub converged: bool,
}

pub type RadialQuadratureResult = QuadratureResult<C64>;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc.zeros_like();
    let mut g = fc.zeros_like();
    k.add_scaled(WGK[7], &fc);
    g.add_scaled(WG[3], &fc);
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        k.add_scaled(WGK[j], &f1);
        k.add_scaled(WGK[j], &f2);
        if j % 2 == 1 {
            g.add_scaled(WG[j / 2], &f1);
            g.add_scaled(WG[j / 2], &f2);
        }
    }
    let mut diff = k.clone();
    diff.add_scaled(-1.0, &g);
    let mut out = k.zeros_like();
    out.add_scaled(h, &k);
    (out, h * diff.norm())
}

/// Adaptive bisection over an initial uniform partition of [a, b].
/// Panels are always summed in left-to-right order.
pub fn integrate_adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    initial_panels: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> QuadratureResult<T> {
    let n0 = initial_panels.max(1);
    let w = (b - a) / n0 as f64;
    let mut panels: Vec<(f64, f64, T, f64)> = (0..n0)
        .map(|i| {
            let (lo, hi) = (a + w * i as f64, if i + 1 == n0 { b } else { a + w * (i + 1) as f64 });
            let (v, e) = gk15(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    let total = |p: &[(f64, f64, T, f64)]| {
        let mut s = p[0].2.zeros_like();
        for x in p {
            s.add_scaled(1.0, &x.2);
        }
        let e: f64 = p.iter().map(|x| x.3).sum();
        (s, e)
    };
    loop {
        let (s, e) = total(&panels);
        let target = abs_tol.max(rel_tol * s.norm());
        if e <= target || panels.len() >= max_panels {
            return QuadratureResult { value: s, error: e, nodes: 15 * panels.len(), converged: e <= target };
        }
        let (imax, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = panels[imax].clone();
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        panels[imax] = (lo, mid, v1, e1);
        panels.insert(imax + 1, (mid, hi, v2, e2));
    }
}

/// Options for [`radial_integral`].
#[derive(Clone, Copy, Debug)]
pub struct RadialOptions {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_panels: 4000 }
    }
}

/// η∫d³R k·g(k) with k = −C6/R⁶.
///
/// `rates` is (smallest, largest) magnitude of the poles of g in k; it sets
/// the core and tail cutoffs.
pub fn radial_integral<T: QuadValue, G: Fn(f64) -> T>(
    g: &G,
    c6: f64,
    eta: f64,
    rates: (f64, f64),
    opts: RadialOptions,
) -> Result<QuadratureResult<T>> {
    let g0 = g(0.0);
    if c6 == 0.0 {
        return Ok(QuadratureResult { value: g0.zeros_like(), error: 0.0, nodes: 1, converged: true });
    }
    let (rmin, rmax) = (rates.0.max(1e-300), rates.1.max(rates.0).max(1e-300));
    let u_lo = 1e-8 * (c6.abs() / rmax).sqrt();
    let u_hi = 1e4 * (c6.abs() / rmin).sqrt();
    let pref = 4.0 * PI * eta / 3.0;

    let h = |u: f64| {
        let k = -c6 / (u * u);
        let v = g(k);
        let mut out = v.zeros_like();
        out.add_scaled(k, &v);
        out
    };
    let hs = |s: f64| {
        let u = s.exp();
        let v = h(u);
        let mut out = v.zeros_like();
        out.add_scaled(u, &v);
        out
    };
    let main = integrate_adaptive(&hs, u_lo.ln(), u_hi.ln(), 48, opts.rel_tol * 0.1, 0.0, opts.max_panels);

    // core plateau
    let h_lo = h(u_lo);
    let mut h_half = h(0.5 * u_lo);
    h_half.add_scaled(-1.0, &h_lo);
    let core_err = h_half.norm() * u_lo;

    // tail: ∫_{u_hi}^∞ (k g0 + k² g1) du = −C6 g0/u_hi + C6² g1/(3u_hi³)
    let dk = 1e-3 * rmin;
    let mut g1 = g(dk);
    g1.add_scaled(-1.0, &g(-dk));
    let mut tail = g0.zeros_like();
    tail.add_scaled(-c6 / u_hi, &g0);
    tail.add_scaled(c6 * c6 / (3.0 * u_hi.powi(3)) / (2.0 * dk), &g1);
    let tail_err = (c6 / (u_hi * u_hi)).powi(2) / rmin.powi(2) * tail.norm();

    let mut value = main.value.clone();
    value.add_scaled(u_lo, &h_lo);
    value.add_scaled(1.0, &tail);
    let mut scaled = value.zeros_like();
    scaled.add_scaled(pref, &value);
    let error = pref * (main.error + core_err + tail_err);
    let converged = main.converged;
    let result = QuadratureResult { value: scaled, error, nodes: main.nodes + 5, converged };
    if !converged {
        return Err(Error::Quadrature {
            context: format!("radial integral, C6 = {c6}, u in [{u_lo:.3e}, {u_hi:.3e}]"),
            error,
            nodes: result.nodes,
        });
    }
    Ok(result)
}
