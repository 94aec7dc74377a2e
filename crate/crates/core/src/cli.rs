//! `wellinv` command line.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result, Stage, StageExt};
use crate::inverse::{
    end_to_end_1d, fitting_t_grid, recover_from_samples, InvariantSamples, RecoveryReport, RecoveryTolerances,
    Route,
};
use crate::invariants::{wave_invariant_at, EngineOptions};
use crate::io::{self, fmt17, Header};
use crate::oscillator::check_time_domain;
use crate::potential::{PotentialFile, SymmetryClass, TaylorPotential};
use crate::spectral::{self, SolverSettings};
use crate::trace::{self, CutoffFunction, TraceMode};

const DEMO_POTENTIAL: &str = include_str!("../data/sextic.json");

#[derive(Parser, Debug, Serialize)]
#[command(name = "wellinv", version, about = "Bottom-of-the-well wave invariants: forward formulas, spectra, traces, inversion")]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "WELLINV_THREADS")]
    pub threads: Option<usize>,
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write a gnuplot script next to each CSV.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// a_j(t) from the stationary-phase engine.
    Forward(ForwardArgs),
    /// Low-lying eigenvalues on an ħ grid.
    Spectrum(SpectrumArgs),
    /// Trace table over ħ and t.
    Trace(TraceArgs),
    /// Fit the ħ-expansion of a trace table.
    Extract(ExtractArgs),
    /// Recover frequencies and Taylor coefficients.
    Invert(InvertArgs),
    /// Built-in consistency checks.
    Verify(VerifyArgs),
    /// One-dimensional recovery on a bundled potential.
    Demo(DemoArgs),
}

/// `a:b:n` (n evenly spaced points, endpoints included) or a comma list.
#[derive(Clone, Debug, Serialize)]
pub struct Grid(pub Vec<f64>);

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let v = match parts.as_slice() {
            [a, b, n] => {
                let (a, b) = (num(a)?, num(b)?);
                let n: usize = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
                match n {
                    0 => return Err("grid needs at least one point".into()),
                    1 => vec![a],
                    _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                }
            }
            [_] => s.split(',').map(num).collect::<std::result::Result<_, _>>()?,
            _ => return Err(format!("expected a:b:n or a comma list, got {s:?}")),
        };
        Ok(Grid(v))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ForwardArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value = "0.2:1.2:20")]
    pub t_grid: Grid,
    /// Evaluate at `t − iε`.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum SolverArg {
    Hermite,
    Fd,
}

#[derive(Args, Debug, Serialize)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "hermite")]
    pub solver: SolverArg,
    /// Hermite basis size per axis.
    #[arg(long)]
    pub basis: Option<usize>,
    /// Finite-difference box half-width.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Finite-difference interior points.
    #[arg(long)]
    pub points: Option<usize>,
}

impl SolverArgs {
    fn settings(&self) -> SolverSettings {
        match self.solver {
            SolverArg::Hermite => SolverSettings::Hermite { basis: self.basis },
            SolverArg::Fd => SolverSettings::FiniteDifference {
                half_width: self.half_width,
                points: self.points,
            },
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub potential: PathBuf,
    /// ħ values.
    #[arg(long, default_value = "0.02,0.05,0.1")]
    pub hbar: Grid,
    #[arg(long, default_value_t = 0.5)]
    pub cutoff: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum ModeArg {
    Regularized,
    Truncated,
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    #[arg(long)]
    pub potential: PathBuf,
    /// Defaults to the fitting grid on [0.15, 0.9]·π/(2ω_max).
    #[arg(long)]
    pub t_grid: Option<Grid>,
    /// `lo:hi:n` is geometric here.
    #[arg(long, default_value = "0.02:0.1:8")]
    pub hbar_grid: String,
    #[arg(long, value_enum, default_value = "regularized")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.7)]
    pub eps: f64,
    /// Cutoff support for truncated mode; defaults to ½ min ω.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub plateau: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct InvertArgs {
    /// Trace table CSV (empirical route).
    #[arg(long, conflicts_with = "potential", required_unless_present = "potential")]
    pub table: Option<PathBuf>,
    /// Potential JSON (formula round trip).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub dimension: usize,
    #[arg(long, value_enum, default_value = "general")]
    pub symmetry: SymmetryArg,
    #[arg(long, default_value_t = 4)]
    pub target_order: u32,
    /// Extraction order for tables.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum SymmetryArg {
    General,
    Even,
    EvenPlusCubic,
}

impl From<SymmetryArg> for SymmetryClass {
    fn from(s: SymmetryArg) -> Self {
        match s {
            SymmetryArg::General => SymmetryClass::General,
            SymmetryArg::Even => SymmetryClass::Even,
            SymmetryArg::EvenPlusCubic => SymmetryClass::EvenPlusCubic,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: Suite,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
pub enum Suite {
    Hessian,
    Trig,
    ClosedForm,
    Oracle,
    Weyl,
    Minmax,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct DemoArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub route: DemoRoute,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
pub enum DemoRoute {
    Formula,
    Empirical,
    Both,
}

/// Parse `argv`, run, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut shown = e.to_string();
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                let msg = s.to_string();
                if !shown.contains(&msg) {
                    eprintln!("  caused by: {msg}");
                }
                shown = msg;
                src = s.source();
            }
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let header = Header::new(cli)?;
    match &cli.command {
        Command::Forward(a) => forward(a, cli, &header),
        Command::Spectrum(a) => spectrum(a, cli, &header),
        Command::Trace(a) => trace_cmd(a, cli, &header),
        Command::Extract(a) => extract(a, cli, &header),
        Command::Invert(a) => invert(a, cli),
        Command::Verify(a) => verify(a.suite, cli.seed),
        Command::Demo(a) => demo(a),
    }
}

fn load(path: &Path) -> Result<TaylorPotential> {
    TaylorPotential::load(path).stage(Stage::Config)
}

fn emit(out: Option<&Path>, header: &Header, cols: &[&str], rows: &[Vec<String>], plot: Option<(usize, &[(usize, &str)], &str)>, gnuplot: bool) -> Result<()> {
    match out {
        Some(p) => {
            io::write_csv(p, header, cols, rows)?;
            if gnuplot {
                if let Some((x, ys, label)) = plot {
                    let gp = io::write_gnuplot(p, x, ys, label)?;
                    eprintln!("wrote {}", gp.display());
                }
            }
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => io::write_csv_to(std::io::stdout().lock(), header, cols, rows),
    }
}

fn forward(a: &ForwardArgs, cli: &Cli, header: &Header) -> Result<()> {
    let pot = load(&a.potential)?;
    for &t in &a.t_grid.0 {
        check_time_domain(pot.frequencies(), t).stage(Stage::Config)?;
    }
    if a.eps < 0.0 {
        return Err(Error::InvalidArgument("ε must be non-negative".into()).at(Stage::Config));
    }
    let opts = EngineOptions::default();
    let mut rows = Vec::new();
    for &t in &a.t_grid.0 {
        let v = wave_invariant_at(&pot, a.j, C64::new(t, -a.eps), &opts)?.value;
        rows.push(vec![fmt17(t), a.j.to_string(), fmt17(v.re), fmt17(v.im)]);
    }
    emit(a.out.as_deref(), header, &["t", "j", "re", "im"], &rows, Some((1, &[(3, "Re a_j"), (4, "Im a_j")], "t")), cli.gnuplot)
}

fn spectrum(a: &SpectrumArgs, cli: &Cli, header: &Header) -> Result<()> {
    let pot = load(&a.potential)?;
    if a.hbar.0.iter().any(|&h| !(h > 0.0)) || !(a.cutoff > 0.0) {
        return Err(Error::InvalidArgument("ħ values and cutoff must be positive".into()).at(Stage::Config));
    }
    let settings = a.solver.settings();
    let sets = a
        .hbar
        .0
        .iter()
        .map(|&h| {
            spectral::solve(&pot, h, a.cutoff, &settings).map_err(|e| Error::AtHbar {
                hbar: h,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()
        .stage(Stage::Spectrum)?;
    let rows = io::eigenvalue_rows(&sets);
    emit(a.out.as_deref(), header, &io::EIGENVALUE_COLUMNS, &rows, Some((2, &[(3, "E_j")], "index")), cli.gnuplot)
}

fn hbar_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("bad ħ grid {spec:?}")).at(Stage::Config);
    if let [lo, hi, n] = parts.as_slice() {
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > lo && n >= 1) {
            return Err(bad());
        }
        return Ok(trace::geometric_grid(lo, hi, n));
    }
    spec.parse::<Grid>().map(|g| g.0).map_err(|_| bad())
}

fn trace_cmd(a: &TraceArgs, cli: &Cli, header: &Header) -> Result<()> {
    let pot = load(&a.potential)?;
    let ts = match &a.t_grid {
        Some(g) => g.0.clone(),
        None => fitting_t_grid(pot.max_frequency()),
    };
    for &t in &ts {
        check_time_domain(pot.frequencies(), t).stage(Stage::Config)?;
    }
    let hb = hbar_grid(&a.hbar_grid)?;
    let mode = match a.mode {
        ModeArg::Regularized => TraceMode::Regularized { eps: a.eps },
        ModeArg::Truncated => TraceMode::Truncated {
            cutoff: CutoffFunction::new(a.delta.unwrap_or(0.5 * pot.min_frequency()), a.plateau).stage(Stage::Config)?,
        },
    };
    let table = trace::hbar_sweep(&pot, mode, &ts, &hb, &a.solver.settings()).stage(Stage::Sweep)?;
    io::save_trace_table(&table, &a.out, header)?;
    if cli.gnuplot {
        io::write_gnuplot(&a.out, 2, &[(3, "Re"), (4, "Im")], "t")?;
    }
    eprintln!("wrote {} ({} ħ × {} t)", a.out.display(), hb.len(), ts.len());
    Ok(())
}

fn extract(a: &ExtractArgs, cli: &Cli, header: &Header) -> Result<()> {
    let table = io::load_trace_table(&a.table).stage(Stage::Config)?;
    // warnings already go through the logger
    let ex = trace::extract_invariants(&table, a.order, 1e-4).stage(Stage::Extract)?;
    emit(a.out.as_deref(), header, &io::EXTRACT_COLUMNS, &io::extraction_rows(&ex), Some((1, &[(3, "Re"), (4, "Im")], "t")), cli.gnuplot)
}

fn invert(a: &InvertArgs, cli: &Cli) -> Result<()> {
    let (report, truth) = match (&a.table, &a.potential) {
        (Some(t), _) => {
            let table = io::load_trace_table(t).stage(Stage::Config)?;
            let ex = trace::extract_invariants(&table, a.order, 1e-4).stage(Stage::Extract)?;
            let samples = InvariantSamples::from_extraction(&ex);
            let (pot, sign, stages) = recover_from_samples(
                &samples,
                a.dimension,
                a.target_order,
                a.symmetry.into(),
                RecoveryTolerances::empirical(),
                cli.seed,
            )?;
            let route = match table.provenance.mode {
                TraceMode::Regularized { eps } => Route::Empirical {
                    hbar_grid: table.hbar_grid.clone(),
                    eps,
                    max_j: a.order,
                    solver: table.provenance.solver,
                },
                TraceMode::Truncated { .. } => Route::Empirical {
                    hbar_grid: table.hbar_grid.clone(),
                    eps: 0.0,
                    max_j: a.order,
                    solver: table.provenance.solver,
                },
            };
            let report = RecoveryReport {
                route,
                target_order: a.target_order,
                frequencies: pot.frequencies().to_vec(),
                recovered: PotentialFile::from(&pot),
                sign_ambiguity: sign,
                stages,
            };
            (report, None)
        }
        (None, Some(p)) => {
            let pot = load(p)?;
            let order = a.target_order.max(pot.truncation_order());
            let pot = pot.with_truncation_order(order).stage(Stage::Config)?;
            let max_j = (a.target_order as usize).saturating_sub(2) / 2;
            let ts = fitting_t_grid(pot.max_frequency());
            let samples = InvariantSamples::from_formula(&pot, &ts, max_j, &EngineOptions::default()).stage(Stage::Sweep)?;
            let (rec, sign, stages) = recover_from_samples(
                &samples,
                pot.dimension(),
                a.target_order,
                pot.symmetry(),
                RecoveryTolerances::formula(),
                cli.seed,
            )?;
            let report = RecoveryReport {
                route: Route::Formula,
                target_order: a.target_order,
                frequencies: rec.frequencies().to_vec(),
                recovered: PotentialFile::from(&rec),
                sign_ambiguity: sign,
                stages,
            };
            (report, Some(pot))
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    print!("{}", report.table(truth.as_ref()));
    if let Some(out) = &a.out {
        io::write_json(out, &report)?;
        eprintln!("wrote {}", out.display());
    }
    Ok(())
}

fn verify(suite: Suite, seed: u64) -> Result<()> {
    use crate::verify::*;
    let all = suite == Suite::All;
    if all || suite == Suite::Hessian {
        println!("{:>2} {:>2} {:>10} {:>12} {:>12} {:>12} {:>4}", "l", "n", "t", "|HH⁻¹−I|", "det rel", "FD", "sgn");
        for r in hessian_rows(&[1, 2, 3, 4], &[1, 2, 3], 2, seed)? {
            println!(
                "{:>2} {:>2} {:>10.6} {:>12.2e} {:>12.2e} {:>12.2e} {:>4}",
                r.l, r.n, r.t, r.identity_error, r.det_error, r.fd_error, r.signature
            );
        }
    }
    if all || suite == Suite::Trig {
        println!("cot identity, 100 samples: max error {:.2e}", trig_identity_error(100, seed)?);
    }
    if all || suite == Suite::ClosedForm {
        println!("l = 1 closed form, j ≤ 3, n ≤ 2: max rel error {:.2e}", closed_form_error(3, 3, &[1, 2], seed)?);
    }
    if all || suite == Suite::Oracle {
        let pot = TaylorPotential::from_json_str(include_str!("../data/cubic_quartic.json"))?;
        println!("{:>2} {:>6} {:>44} {:>10}", "j", "t", "engine a_j", "rel");
        for r in oracle_rows(&pot, &[1], &[0.3, 0.7, 1.1, 1.5])? {
            println!("{:>2} {:>6.3} {:>44} {:>10.2e}", r.j, r.t, format!("{:.12}", r.engine), r.rel);
        }
    }
    if all || suite == Suite::Weyl {
        let pot = TaylorPotential::from_json_str(include_str!("../data/quartic.json"))?;
        let w = spectral::weyl_count_check(&pot, 0.005, 0.5, &SolverSettings::default(), seed)?;
        println!(
            "Weyl ħ=0.005 δ=0.5: count {} estimate {:.3} ratio {:.4}",
            w.count, w.phase_space_estimate, w.ratio
        );
    }
    if all || suite == Suite::Minmax {
        let pot = TaylorPotential::from_json_str(include_str!("../data/quartic.json"))?;
        let set = spectral::solve(&pot, 0.05, 0.5, &SolverSettings::default())?;
        let r = spectral::minmax_bound_check(&pot, &set, 3.0)?;
        println!(
            "min-max on [−3,3]: C = {:.4}, {} levels, holds {}, max violation {:.2e}",
            r.c, r.checked, r.holds, r.max_violation
        );
    }
    Ok(())
}

fn demo(a: &DemoArgs) -> Result<()> {
    let v = TaylorPotential::from_json_str(DEMO_POTENTIAL)?;
    let mut reports = Vec::new();
    if matches!(a.route, DemoRoute::Formula | DemoRoute::Both) {
        println!("formula route, target order 6");
        let r = end_to_end_1d(&v, 6, Route::Formula)?;
        print!("{}", r.table(Some(&v)));
        reports.push(r);
    }
    if matches!(a.route, DemoRoute::Empirical | DemoRoute::Both) {
        let v4 = v.filtered(|b| b.norm() <= 4);
        println!("empirical route (Hermite spectra, ħ ∈ [0.02, 0.1]), target order 4");
        let r = end_to_end_1d(&v4, 4, Route::empirical_default())?;
        print!("{}", r.table(Some(&v4)));
        reports.push(r);
    }
    if let Some(out) = &a.out {
        io::write_json(out, &reports)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!("0:1:3".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!("0.1,0.4".parse::<Grid>().unwrap().0, vec![0.1, 0.4]);
        assert!("1:2".parse::<Grid>().is_err());
    }

    #[test]
    fn parses_subcommands() {
        for argv in [
            vec!["wellinv", "forward", "--potential", "p.json", "--j", "1", "--t-grid", "0.2:1.2:20"],
            vec!["wellinv", "verify", "hessian"],
            vec!["wellinv", "demo"],
            vec!["wellinv", "invert", "--potential", "p.json", "--target-order", "6"],
            vec!["wellinv", "--threads", "2", "spectrum", "--potential", "p.json", "--solver", "fd"],
        ] {
            Cli::try_parse_from(argv).unwrap();
        }
        assert!(Cli::try_parse_from(["wellinv", "invert"]).is_err());
    }
}
