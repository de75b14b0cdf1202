use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kolmogorov::classify::EigenKind;
use kolmogorov::curves::{sample_curve, CurveId};
use kolmogorov::equilibria::analysable_case;
use kolmogorov::par::{with_threads, Execution};
use kolmogorov::portrait::{phase_portrait, PortraitSpec};
use kolmogorov::report::{analyze_point, class_tuple, emit_portrait, emit_sweep, sweep, write_document, Format};
use kolmogorov::sotomayor::{verify_all, CheckStatus};
use kolmogorov::{presets, Error, ParamPoint, Rect, SystemModel, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "kolmo", version, about = "Local bifurcation analysis of degenerate planar Kolmogorov systems")]
struct Cli {
    #[command(flatten)]
    source: ModelSource,

    /// Override the validity radius of the model.
    #[arg(long, global = true, value_name = "R")]
    radius: Option<f64>,

    /// Maximum worker threads for sweeps and portraits (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,

    /// Write the document here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(flatten)]
    tols: TolArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ModelSource {
    /// Model file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    model: Option<PathBuf>,

    /// Built-in model: ma, ma-mirror, mh, mb, g1..g9, f1..f4.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long, global = true, value_name = "TOL")]
    tol_newton: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_equilibrium: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_properness_tie: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_det: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_p: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_on_curve: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_zero_eigen: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_sotomayor: Option<f64>,
    #[arg(long, global = true, value_name = "TOL")]
    tol_hopf_p: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerances, Error> {
        let mut t = Tolerances::default();
        let slots: [(&str, Option<f64>, &mut f64); 9] = [
            ("newton", self.tol_newton, &mut t.newton),
            ("equilibrium", self.tol_equilibrium, &mut t.equilibrium),
            ("properness-tie", self.tol_properness_tie, &mut t.properness_tie),
            ("det", self.tol_det, &mut t.det),
            ("p", self.tol_p, &mut t.p),
            ("on-curve", self.tol_on_curve, &mut t.on_curve),
            ("zero-eigen", self.tol_zero_eigen, &mut t.zero_eigen),
            ("sotomayor", self.tol_sotomayor, &mut t.sotomayor),
            ("hopf-p", self.tol_hopf_p, &mut t.hopf_p),
        ];
        for (name, value, slot) in slots {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Validation(format!("--tol-{name} must be a finite nonnegative number")));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the degeneracy case of the model.
    Case,
    /// Equilibria, their classification and the region label at one parameter point.
    Analyze {
        #[arg(long, num_args = 2, value_names = ["MU1", "MU2"], allow_negative_numbers = true, required = true)]
        mu: Vec<f64>,
    },
    /// CSV of numerically located points on every bifurcation curve of the case.
    Curves {
        /// Points per curve branch.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// Largest curve parameter; defaults to half the validity radius.
        #[arg(long, allow_negative_numbers = true)]
        s_max: Option<f64>,
    },
    /// Classify every cell of a parameter-plane grid.
    Sweep {
        /// Parameter window; defaults to a square of half-width radius / 5.
        #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// First-quadrant phase portrait at one parameter point.
    Portrait {
        #[arg(long, num_args = 2, value_names = ["MU1", "MU2"], allow_negative_numbers = true, required = true)]
        mu: Vec<f64>,
        /// State-space window inside the first quadrant.
        #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], default_values_t = [0.0, 0.1, 0.0, 0.1])]
        window: Vec<f64>,
        #[arg(long, default_value_t = 6)]
        seeds: usize,
        #[arg(long, default_value_t = 2e4)]
        t_max: f64,
        #[arg(long, default_value_t = 1.0)]
        escape_radius: f64,
        /// Grid cells per side for the nullclines.
        #[arg(long, default_value_t = 96)]
        resolution: usize,
    },
    /// Sotomayor and Hopf certificates on every curve of the case.
    Verify,
}

/// Failure categories with their exit codes.
enum Failure {
    VerifyFailed,
    Invalid(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::VerifyFailed => 1,
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() || matches!(e, Error::Io(_)) {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn load_model(cli: &Cli) -> Result<SystemModel, Error> {
    let model = match (&cli.source.model, &cli.source.preset) {
        (Some(path), _) => SystemModel::load(path)?,
        (None, Some(name)) => presets::by_name(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::Validation(format!("unknown preset {name:?}")))?,
        (None, None) => return Err(Error::Validation("one of --model or --preset is required".into())),
    };
    match cli.radius {
        Some(r) => model.with_radius(r),
        None => Ok(model),
    }
}

fn rect(v: &[f64]) -> Rect {
    Rect::new(v[0], v[1], v[2], v[3])
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn analyze_text(model: &SystemModel, mu: ParamPoint, tols: &Tolerances) -> Result<String, Error> {
    let case = analysable_case(model)?;
    model.check_mu(mu)?;
    let cell = analyze_point(model, case, mu, tols);
    let mut out = String::new();
    let _ = writeln!(out, "case: {case:?}");
    let _ = writeln!(out, "mu: ({}, {})", num(mu.mu1), num(mu.mu2));
    match (&cell.region, &cell.region_error) {
        (Some(r), _) => {
            let _ = writeln!(out, "region: {}", r.name());
        }
        (None, Some(e)) => {
            let _ = writeln!(out, "region: error ({e})");
        }
        _ => {}
    }
    for e in &cell.inventory {
        let status = e.status.map(|s| s.name()).unwrap_or("error");
        let _ = write!(out, "{:<4} {:<8}", e.id.name(), status);
        if let Some(p) = e.point {
            let _ = write!(out, " ({}, {})", num(p.xi1), num(p.xi2));
        }
        if let Some(c) = e.class {
            let _ = write!(out, " {}", c.name());
        }
        match e.eigen.map(|r| r.kind) {
            Some(EigenKind::RealPair { l1, l2 }) => {
                let _ = write!(out, " eig [{}, {}]", num(l1), num(l2));
            }
            Some(EigenKind::ComplexPair { p, omega }) => {
                let _ = write!(out, " eig {} +- {}i", num(p), num(omega));
            }
            None => {}
        }
        if let Some(err) = &e.error {
            let _ = write!(out, " error: {err}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "tuple: {}", class_tuple(&cell));
    Ok(out)
}

fn curves_csv(model: &SystemModel, samples: usize, s_max: f64, tols: &Tolerances) -> Result<String, Error> {
    let case = analysable_case(model)?;
    let mut out = String::from("curve,s,mu1,mu2,residual\n");
    for id in CurveId::for_case(case) {
        for p in sample_curve(model, id, s_max, samples, tols) {
            let s = if id.param_is_mu2() { p.mu.mu2 } else { p.mu.mu1 };
            let _ = writeln!(out, "{},{},{},{},{}", id.name(), num(s), num(p.mu.mu1), num(p.mu.mu2), num(p.residual));
        }
    }
    Ok(out)
}

fn verify_doc(model: &SystemModel, tols: &Tolerances, format: Format) -> Result<(String, bool), Error> {
    let rows = verify_all(model, tols)?;
    let failed = rows.iter().any(|r| r.status == CheckStatus::Fail);
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("curve,s,mu1,mu2,status,detail\n");
            for r in &rows {
                let (m1, m2) = r.mu.map(|m| (num(m.mu1), num(m.mu2))).unwrap_or_default();
                let s = if r.s.is_finite() { num(r.s) } else { String::new() };
                let _ = writeln!(out, "{},{s},{m1},{m2},{},\"{}\"", r.curve.name(), r.status.name(), r.detail.replace('"', "'"));
            }
        }
        _ => {
            for r in &rows {
                let at = match r.mu {
                    Some(m) => format!("s={:<9} mu=({:.6e}, {:.6e})", format!("{:+.4}", r.s), m.mu1, m.mu2),
                    None => String::from("-"),
                };
                let _ = writeln!(out, "{:<4} {:<6} {:<44} {}", r.status.name(), r.curve.name(), at, r.detail);
            }
            let count = |s| rows.iter().filter(|r| r.status == s).count();
            let _ = writeln!(
                out,
                "summary: {} pass, {} fail, {} skip",
                count(CheckStatus::Pass),
                count(CheckStatus::Fail),
                count(CheckStatus::Skip)
            );
        }
    }
    Ok((out, failed))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let tols = cli.tols.resolve()?;
    eprintln!(
        "tolerances: newton={:e} equilibrium={:e} properness-tie={:e} det={:e} p={:e} on-curve={:e} zero-eigen={:e} sotomayor={:e} hopf-p={:e}",
        tols.newton, tols.equilibrium, tols.properness_tie, tols.det, tols.p, tols.on_curve, tols.zero_eigen, tols.sotomayor, tols.hopf_p
    );
    let model = load_model(cli)?;
    let fmt = |default: Format| cli.format.map(Format::from).unwrap_or(default);
    let mut failed = false;
    let doc = match &cli.command {
        Command::Case => format!("{:?}\n", model.classify_case()?),
        Command::Analyze { mu } => analyze_text(&model, ParamPoint::new(mu[0], mu[1]), &tols)?,
        Command::Curves { samples, s_max } => {
            curves_csv(&model, *samples, s_max.unwrap_or(0.5 * model.radius), &tols)?
        }
        Command::Sweep { window, resolution } => {
            let w = window.as_deref().map(rect).unwrap_or_else(|| Rect::centered(model.radius / 5.0));
            let s = with_threads(cli.threads, || sweep(&model, &w, *resolution, &tols, Execution::Parallel))?;
            emit_sweep(&s, &model, &tols, fmt(Format::Csv))?
        }
        Command::Portrait { mu, window, seeds, t_max, escape_radius, resolution } => {
            let spec = PortraitSpec {
                window: rect(window),
                seeds_per_side: *seeds,
                t_max: *t_max,
                escape_radius: *escape_radius,
                nullcline_resolution: *resolution,
            };
            let mu = ParamPoint::new(mu[0], mu[1]);
            let p = with_threads(cli.threads, || phase_portrait(&model, mu, &spec, &tols, Execution::Parallel))?;
            emit_portrait(&p, fmt(Format::Svg))?
        }
        Command::Verify => {
            let (doc, f) = verify_doc(&model, &tols, fmt(Format::Text))?;
            failed = f;
            doc
        }
    };
    match &cli.out {
        Some(path) => {
            write_document(path, &doc)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{doc}"),
    }
    if failed {
        Err(Failure::VerifyFailed)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::VerifyFailed => eprintln!("verification failed"),
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
