//! Parameter sweeps, figure presets and CSV emission.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::LadderVariant;
use crate::collisional::{KernelRoute, SolverOptions};
use crate::error::{Error, Result};
use crate::noninteracting::{perturbative_coefficients, steady_state_three_level};
use crate::observables::{observables, PointResult};
use crate::params::{default_gamma23, AtomParams, InteractionParams, StatePreset};
use crate::perturbative::chi3_interacting;
use crate::quadrature::RadialOptions;

fn d_eta() -> f64 {
    0.04
}
fn d_delta2() -> f64 {
    -25.0
}
fn d_delta3() -> f64 {
    1.0 / 3.0
}
fn d_gamma13() -> f64 {
    0.1
}
fn d_gamma22() -> f64 {
    2.0
}
fn d_omega_p2() -> String {
    "0:0.5:26".into()
}
fn d_tol() -> f64 {
    1e-10
}
fn d_max_steps() -> usize {
    50
}
fn d_route() -> String {
    "auto".into()
}
fn d_ladder() -> String {
    "standard".into()
}

/// Sweep configuration. Keys match the CLI flag names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScanConfig {
    /// Principal quantum number of a preset state; sets C6 and Ω_c unless given.
    #[serde(default)]
    pub state: Option<u32>,
    /// Several preset states in one sweep; overrides `state`.
    #[serde(default)]
    pub states: Option<Vec<u32>>,
    #[serde(default)]
    pub c6: Option<f64>,
    #[serde(default)]
    pub omega_c: Option<f64>,
    #[serde(default = "d_eta")]
    pub eta: f64,
    #[serde(default = "d_delta2")]
    pub delta2: f64,
    #[serde(default = "d_delta3")]
    pub delta3: f64,
    /// "start:stop:count" or a list; overrides `delta3`.
    #[serde(default)]
    pub delta3_grid: Option<String>,
    #[serde(default = "d_gamma13")]
    pub gamma13: f64,
    #[serde(default = "d_gamma22")]
    pub gamma22: f64,
    #[serde(default)]
    pub gamma33: f64,
    /// Defaults to γ12 + γ13 − γ33/2.
    #[serde(default)]
    pub gamma23: Option<f64>,
    /// |Ω_p|² grid, "start:stop:count", a list or a single value.
    #[serde(default = "d_omega_p2")]
    pub omega_p2: String,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_steps")]
    pub max_steps: usize,
    /// auto, spectral or quadrature.
    #[serde(default = "d_route")]
    pub route: String,
    /// standard or subtracted.
    #[serde(default = "d_ladder")]
    pub ladder: String,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

/// Parses "start:stop:count" (inclusive, linear), a comma-separated list, or a single number.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("invalid grid '{s}', expected start:stop:count or a list"));
    let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    if s.contains(',') {
        return s.split(',').map(num).collect();
    }
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.parse().map_err(|_| bad())?;
            match n {
                0 => Err(Error::Config(format!("empty grid '{s}'"))),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(bad()),
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// One grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSpec {
    pub state: Option<u32>,
    pub atom: AtomParams,
    pub interaction: InteractionParams,
}

impl ScanConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let route = match self.route.as_str() {
            "auto" => KernelRoute::Auto,
            "spectral" => KernelRoute::Spectral,
            "quadrature" => KernelRoute::Quadrature,
            r => return Err(Error::Config(format!("unknown route '{r}'"))),
        };
        let ladder = match self.ladder.as_str() {
            "standard" => LadderVariant::Standard,
            "subtracted" => LadderVariant::Subtracted,
            l => return Err(Error::Config(format!("unknown ladder '{l}'"))),
        };
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max-steps must be at least 1".into()));
        }
        Ok(SolverOptions {
            tol: self.tol,
            max_steps: self.max_steps,
            route,
            ladder,
            quadrature: RadialOptions::default(),
            ..SolverOptions::default()
        })
    }

    fn state_list(&self) -> Vec<Option<u32>> {
        match (&self.states, self.state) {
            (Some(v), _) if !v.is_empty() => {
                let mut v = v.clone();
                v.sort_unstable();
                v.dedup();
                v.into_iter().map(Some).collect()
            }
            (_, s) => vec![s],
        }
    }

    fn base(&self, state: Option<u32>) -> Result<(AtomParams, InteractionParams)> {
        let preset = state.map(StatePreset::lookup).transpose().map_err(|e| Error::Config(e.to_string()))?;
        let c6 = self.c6.or(preset.map(|p| p.c6)).unwrap_or(InteractionParams::default().c6);
        let omega_c = self.omega_c.or(preset.map(|p| p.omega_c)).unwrap_or(AtomParams::default().omega_c);
        let atom = AtomParams {
            omega_c,
            delta2: self.delta2,
            delta3: self.delta3,
            gamma13: self.gamma13,
            gamma22: self.gamma22,
            gamma33: self.gamma33,
            gamma23: self.gamma23.unwrap_or(default_gamma23(1.0, self.gamma13, self.gamma33)),
            ..AtomParams::default()
        };
        let inter = InteractionParams { c6, eta: self.eta };
        Ok((atom, inter))
    }

    /// Grid points ordered by (state, Δ3, |Ω_p|²).
    pub fn points(&self) -> Result<Vec<PointSpec>> {
        let d3 = match &self.delta3_grid {
            Some(g) => sorted(parse_grid(g)?),
            None => vec![self.delta3],
        };
        let intens = sorted(parse_grid(&self.omega_p2)?);
        if intens.iter().any(|x| *x < 0.0) {
            return Err(Error::Config("omega-p2 must be non-negative".into()));
        }
        self.solver_options()?;
        let mut out = vec![];
        for s in self.state_list() {
            let (atom, inter) = self.base(s)?;
            for &d in &d3 {
                for &x in &intens {
                    let a = atom.with_delta3(d).with_intensity(x);
                    a.validate().map_err(|e| Error::Config(e.to_string()))?;
                    inter.validate().map_err(|e| Error::Config(e.to_string()))?;
                    out.push(PointSpec { state: s, atom: a, interaction: inter });
                }
            }
        }
        Ok(out)
    }
}

pub const COLUMNS: [&str; 36] = [
    "state", "c6", "eta", "omega_c", "delta2", "delta3", "gamma13", "gamma22", "gamma23", "gamma33", "omega_p2",
    "chi_re", "chi_im", "chi_3lev_re", "chi_3lev_im", "chi_2lev_re", "chi_2lev_im", "s", "s_norm_re",
    "s_norm_im", "v13_re", "v13_im", "v31_re", "v31_im", "v23_re", "v23_im", "v32_re", "v32_im", "sigma22",
    "sigma33", "nb_re", "nb_im", "nb_tilde", "iterations", "residual", "status",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResultRow {
    pub spec: PointSpec,
    pub chi: C64,
    pub chi_3lev: C64,
    pub chi_2lev: C64,
    pub s: f64,
    pub s_norm: C64,
    pub v13: C64,
    pub v31: C64,
    pub v23: C64,
    pub v32: C64,
    pub sigma22: f64,
    pub sigma33: f64,
    pub nb: C64,
    pub nb_tilde: f64,
    pub iterations: usize,
    pub residual: f64,
    /// "ok" or the reason the row is flagged.
    pub status: String,
}

impl ScanResultRow {
    pub fn flagged(&self) -> bool {
        self.status != "ok"
    }

    fn failed(spec: PointSpec, status: String) -> Self {
        let n = f64::NAN;
        let z = C64::new(n, n);
        Self {
            spec,
            chi: z,
            chi_3lev: z,
            chi_2lev: z,
            s: n,
            s_norm: z,
            v13: z,
            v31: z,
            v23: z,
            v32: z,
            sigma22: n,
            sigma33: n,
            nb: z,
            nb_tilde: n,
            iterations: 0,
            residual: n,
            status,
        }
    }

    fn from_result(spec: PointSpec, r: &PointResult, tol: f64) -> Self {
        let o = &r.observables;
        let v = &o.integrals;
        let mut row = Self {
            spec,
            chi: o.chi,
            chi_3lev: o.chi_3lev,
            chi_2lev: o.chi_2lev,
            s: o.s,
            s_norm: o.s_norm,
            v13: v.v13,
            v31: v.v31,
            v23: v.v23,
            v32: v.v32,
            sigma22: o.sigma22,
            sigma33: o.p_r,
            nb: o.nb,
            nb_tilde: o.nb_tilde,
            iterations: v.iterations,
            residual: v.residual,
            status: "ok".into(),
        };
        if !(row.residual < tol) {
            row.status = format!("flagged: residual {:.3e}", row.residual);
        }
        if !row.numbers().iter().all(|x| x.is_finite()) {
            row.status = "flagged: non-finite value".into();
        }
        if !o.weak_probe && !(o.p_r > 0.0) {
            row.status = format!("flagged: non-positive Rydberg population {:.3e}", o.p_r);
        }
        row
    }

    fn numbers(&self) -> Vec<f64> {
        let a = &self.spec.atom;
        let i = &self.spec.interaction;
        let mut v = vec![i.c6, i.eta, a.omega_c, a.delta2, a.delta3, a.gamma13, a.gamma22, a.gamma23, a.gamma33, a.intensity()];
        for z in [self.chi, self.chi_3lev, self.chi_2lev] {
            v.extend([z.re, z.im]);
        }
        v.extend([self.s, self.s_norm.re, self.s_norm.im]);
        for z in [self.v13, self.v31, self.v23, self.v32] {
            v.extend([z.re, z.im]);
        }
        v.extend([self.sigma22, self.sigma33, self.nb.re, self.nb.im, self.nb_tilde]);
        v
    }

    pub fn csv_line(&self) -> String {
        let mut s = self.spec.state.map(|n| n.to_string()).unwrap_or_default();
        for x in self.numbers() {
            s.push(',');
            s.push_str(&fmt_num(x));
        }
        write!(s, ",{},{},{}", self.iterations, fmt_num(self.residual), self.status.replace(',', ";")).unwrap();
        s
    }
}

/// 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // drop the sign of negative zero
        format!("{:.11e}", 0.0)
    } else {
        format!("{x:.11e}")
    }
}

pub fn solve_point(spec: PointSpec, opts: &SolverOptions) -> ScanResultRow {
    match observables(&spec.atom, &spec.interaction, opts) {
        Ok(r) => ScanResultRow::from_result(spec, &r, opts.tol),
        Err(e) => ScanResultRow::failed(spec, format!("flagged: {e}")),
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Solves every grid point; row order is the grid order.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanResultRow>> {
    let points = config.points()?;
    let opts = config.solver_options()?;
    with_pool(config.threads, || points.par_iter().map(|p| solve_point(*p, &opts)).collect())
}

fn header(config: &ScanConfig) -> String {
    format!("# config: {}\n", config.to_json())
}

pub fn rows_to_csv(config: &ScanConfig, rows: &[ScanResultRow]) -> String {
    let mut s = header(config);
    s.push_str(&COLUMNS.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// Recovers the configuration from the metadata line of an emitted CSV.
pub fn config_from_csv(csv: &str) -> Result<ScanConfig> {
    let line = csv
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| Error::Config("missing config metadata line".into()))?;
    ScanConfig::from_json(line)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            _ => Err(Error::Config(format!("unknown figure '{s}', expected fig2, fig3 or fig4"))),
        }
    }
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }

    pub fn config(&self) -> ScanConfig {
        let base = ScanConfig::default();
        match self {
            Figure::Fig2 => ScanConfig { states: Some(vec![46, 50, 56, 61]), ..base },
            Figure::Fig3 => ScanConfig {
                state: Some(61),
                omega_p2: "0.5".into(),
                delta3_grid: Some("-2:2:81".into()),
                ..base
            },
            Figure::Fig4 => ScanConfig { state: Some(50), delta3_grid: Some("0.3333333333333333,1,2".into()), ..base },
        }
    }
}

/// Main CSV plus named companion CSVs.
#[derive(Clone, Debug)]
pub struct FigureOutput {
    pub config: ScanConfig,
    pub rows: Vec<ScanResultRow>,
    pub csv: String,
    pub companions: Vec<(String, String)>,
}

impl FigureOutput {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged())
    }
}

/// dS/d|Ω_p|² at the origin from the third-order coefficients.
pub fn third_order_slope(p: &AtomParams, inter: &InteractionParams) -> Result<f64> {
    let t = chi3_interacting(p, inter, RadialOptions::default())?;
    let chi3 = perturbative_coefficients(p)?.s12_1;
    let chi2 = -C64::new(0.0, 1.0) / p.big_gamma(1, 2);
    Ok(t.collisional.re / (chi3 - chi2).re)
}

fn fig2_slopes(config: &ScanConfig) -> Result<String> {
    let mut s = header(config);
    s.push_str("state,c6,omega_c,slope,omega_p2,s_third_order\n");
    let grid = sorted(parse_grid(&config.omega_p2)?);
    let states = config.states.clone().unwrap_or_default();
    let slopes: Vec<Result<(u32, AtomParams, InteractionParams, f64)>> = states
        .par_iter()
        .map(|&n| {
            let (a, i) = config.base(Some(n))?;
            Ok((n, a, i, third_order_slope(&a, &i)?))
        })
        .collect();
    for r in slopes {
        let (n, a, i, k) = r?;
        for x in &grid {
            writeln!(s, "{n},{},{},{},{},{}", fmt_num(i.c6), fmt_num(a.omega_c), fmt_num(k), fmt_num(*x), fmt_num(1.0 + k * x))
                .unwrap();
        }
    }
    Ok(s)
}

/// Non-interacting χ and its third-order truncation χ^(1) + |Ω_p|²χ^(3).
pub fn truncated_chi(p: &AtomParams) -> Result<(C64, C64)> {
    let c = perturbative_coefficients(p)?;
    let x = p.intensity();
    let full = if x > 0.0 { steady_state_three_level(p)?.sigma12() / p.omega_p } else { c.s12_1 };
    Ok((full, c.s12_1 + x * c.s12_3))
}

fn fig3_truncation(config: &ScanConfig) -> Result<String> {
    let mut s = header(config);
    s.push_str("delta3,omega_p2,chi_3lev_re,chi_3lev_im,chi_trunc_re,chi_trunc_im,rel_error\n");
    let (atom, _) = config.base(config.state)?;
    let d3 = sorted(parse_grid(config.delta3_grid.as_deref().unwrap_or("0"))?);
    for x in sorted(parse_grid(&config.omega_p2)?) {
        for &d in &d3 {
            let (full, trunc) = truncated_chi(&atom.with_delta3(d).with_intensity(x))?;
            let err = (trunc - full).norm() / full.norm();
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                fmt_num(d),
                fmt_num(x),
                fmt_num(full.re),
                fmt_num(full.im),
                fmt_num(trunc.re),
                fmt_num(trunc.im),
                fmt_num(err)
            )
            .unwrap();
        }
    }
    Ok(s)
}

/// Runs a figure preset with an optional thread count.
pub fn run_figure(fig: Figure, threads: Option<usize>) -> Result<FigureOutput> {
    run_figure_config(fig, ScanConfig { threads, ..fig.config() })
}

/// Runs a figure with a caller-adjusted preset configuration.
pub fn run_figure_config(fig: Figure, config: ScanConfig) -> Result<FigureOutput> {
    let rows = run_scan(&config)?;
    let csv = rows_to_csv(&config, &rows);
    let companions = match fig {
        Figure::Fig2 => vec![("slopes".to_string(), with_pool(config.threads, || fig2_slopes(&config))??)],
        Figure::Fig3 => vec![("truncation".to_string(), fig3_truncation(&config)?)],
        Figure::Fig4 => vec![],
    };
    Ok(FigureOutput { config, rows, csv, companions })
}
