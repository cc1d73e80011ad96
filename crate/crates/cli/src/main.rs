use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rydberg_eit::algebra::{generate_pair_equations, generate_single_atom_equations, LadderVariant};
use rydberg_eit::scan::{self, Figure, ScanConfig, ScanResultRow};
use rydberg_eit::Error;
use rydberg_eit_validation as validate;

#[derive(Parser)]
#[command(name = "eitscan", version, about = "Dispersive Rydberg-EIT nonlinearity: points, sweeps and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single parameter point and print its CSV row.
    Point(Flags),
    /// Sweep a parameter grid and write CSV.
    Scan(Flags),
    /// Regenerate the data behind a figure.
    Figure {
        #[arg(value_enum)]
        which: FigureArg,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run the acceptance checks.
    Validate {
        #[arg(value_enum, default_value = "fast")]
        suite: Suite,
        /// Print the individual checks under each criterion.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Print the generated single-atom and pair equations.
    Equations(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fast,
    Full,
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// JSON configuration; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    state: Option<u32>,
    #[arg(long, value_name = "X")]
    c6: Option<f64>,
    #[arg(long, value_name = "X")]
    omega_c: Option<f64>,
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// A single detuning, or start:stop:count.
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    delta3: Option<String>,
    /// |Omega_p|^2 as start:stop:count or a single value.
    #[arg(long, value_name = "GRID")]
    omega_p2: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

impl Flags {
    fn apply(&self, mut c: ScanConfig) -> Result<ScanConfig, Error> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            c = ScanConfig::from_json(&text)?;
        }
        if let Some(n) = self.state {
            c.state = Some(n);
            c.states = None;
        }
        if self.c6.is_some() {
            c.c6 = self.c6;
        }
        if self.omega_c.is_some() {
            c.omega_c = self.omega_c;
        }
        if let Some(x) = self.delta2 {
            c.delta2 = x;
        }
        if let Some(d) = &self.delta3 {
            match d.parse::<f64>() {
                Ok(x) => {
                    c.delta3 = x;
                    c.delta3_grid = None;
                }
                Err(_) => c.delta3_grid = Some(d.clone()),
            }
        }
        if let Some(g) = &self.omega_p2 {
            c.omega_p2 = g.clone();
        }
        if let Some(p) = &self.out {
            c.out = Some(p.display().to_string());
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(t) = self.tol {
            c.tol = t;
        }
        c.points()?;
        Ok(c)
    }
}

enum Failure {
    Flagged,
    Config(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) => Failure::Config(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) ends the output quietly.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Failure::Other(format!("cannot create {}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| Failure::Other(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn report(rows: &[ScanResultRow]) -> Result<(), Failure> {
    let flagged: Vec<_> = rows.iter().filter(|r| r.flagged()).collect();
    for r in &flagged {
        eprintln!(
            "flagged: state {:?}, delta3 = {}, |Omega_p|^2 = {}: {}",
            r.spec.state,
            r.spec.atom.delta3,
            r.spec.atom.intensity(),
            r.status
        );
    }
    if flagged.is_empty() {
        Ok(())
    } else {
        Err(Failure::Flagged)
    }
}

/// `dir/stem_name.csv` next to the main output.
fn companion_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_{name}.csv"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Point(flags) => {
            let c = flags.apply(ScanConfig { omega_p2: "0.5".into(), ..ScanConfig::default() })?;
            let points = c.points()?;
            if points.len() != 1 {
                return Err(Failure::Config(format!(
                    "configuration error: point needs a single grid point, got {}",
                    points.len()
                )));
            }
            let rows = scan::run_scan(&c)?;
            write(c.out.as_deref().map(Path::new), &scan::rows_to_csv(&c, &rows))?;
            report(&rows)
        }
        Command::Scan(flags) => {
            let c = flags.apply(ScanConfig::default())?;
            let rows = scan::run_scan(&c)?;
            write(c.out.as_deref().map(Path::new), &scan::rows_to_csv(&c, &rows))?;
            report(&rows)
        }
        Command::Figure { which, flags } => {
            let fig = match which {
                FigureArg::Fig2 => Figure::Fig2,
                FigureArg::Fig3 => Figure::Fig3,
                FigureArg::Fig4 => Figure::Fig4,
            };
            let c = flags.apply(fig.config())?;
            let out = scan::run_figure_config(fig, c)?;
            let path = PathBuf::from(out.config.out.clone().unwrap_or_else(|| format!("{}.csv", fig.name())));
            write(Some(&path), &out.csv)?;
            eprintln!("wrote {}", path.display());
            for (name, text) in &out.companions {
                let p = companion_path(&path, name);
                write(Some(&p), text)?;
                eprintln!("wrote {}", p.display());
            }
            report(&out.rows)
        }
        Command::Validate { suite, verbose } => {
            let full = matches!(suite, Suite::Full);
            let ids: Vec<u8> = if full { (1..=10).collect() } else { validate::FAST.to_vec() };
            let mut failed = 0;
            for id in ids {
                let r = validate::criterion(id).expect("criterion id");
                emit(&format!("{}\n", r.line()));
                if verbose || !r.pass {
                    for d in &r.details {
                        emit(&format!("      {d}\n"));
                    }
                }
                failed += usize::from(!r.pass);
            }
            if failed > 0 {
                Err(Failure::Other(format!("{failed} criteria failed")))
            } else {
                Ok(())
            }
        }
        Command::Equations(flags) => {
            let c = flags.apply(ScanConfig { omega_p2: "0".into(), ..ScanConfig::default() })?;
            let p = c.points()?[0].atom;
            let text = format!(
                "# single-atom equations\n{}\n# pair equations\n{}",
                generate_single_atom_equations(&p),
                generate_pair_equations(&p, LadderVariant::Standard)
            );
            write(c.out.as_deref().map(Path::new), &text)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Flagged) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
