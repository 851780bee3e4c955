//! Command-line front end.
//!
//! Every subcommand writes one delimited table (see [`table`]) to `--output`,
//! to `$XYSTEER_OUT_DIR/<subcommand>.<ext>` when that variable is set, or to
//! stdout. Exit status is 0 on success, 2 for invalid input and 3 for
//! numerical failures or an unwritable output path.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::criticality::{self, HRange, Kappa1Config, ScalingConfig, Side, SweepConfig};
use crate::steering::{self, AxisSet};
use crate::xychain::{self, ChainParams, ChainSize};

pub mod plot;
pub mod table;

pub use plot::{emit_plotscript, Figure};
pub use table::{Format, Table};

use table::num;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "XYSTEER_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error("cannot read {}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Compute(e) if !e.is_numerical() => 2,
            CliError::Compute(_) | CliError::Output { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "xysteer",
    version,
    about = "Steerability of XY-chain ground states and its critical scaling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file [default: stdout, or $XYSTEER_OUT_DIR/<subcommand>.<ext>]
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spin correlators ⟨σᶻ⟩, ⟨σᶻσᶻ⟩, ⟨σˣσˣ⟩, ⟨σʸσʸ⟩ at one field
    Corr(PointArgs),
    /// Two-site reduced density matrix at one field
    State(PointArgs),
    /// Partial-transpose spectrum, steerability S and concurrence at one field
    Steer(PointArgs),
    /// N-setting steering inequality at one field
    Ineq(IneqArgs),
    /// S, dS/dh and related columns over a field grid
    Sweep(SweepArgs),
    /// Finite-size scaling: κ₁, κ₂ and ν
    Scaling(ScalingArgs),
    /// Gnuplot script laying out a table written by this tool
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Anisotropy γ in [0, 1]
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Site separation
    #[arg(long, default_value_t = 1)]
    pub r: usize,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct SizeArg {
    /// Odd chain length
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Thermodynamic limit (the default)
    #[arg(long)]
    pub limit: bool,
}

impl SizeArg {
    fn size(&self) -> ChainSize {
        self.n.map_or(ChainSize::Thermodynamic, ChainSize::Finite)
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Transverse field
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[command(flatten)]
    pub size: SizeArg,
}

impl PointArgs {
    fn params(&self) -> Result<ChainParams, CliError> {
        Ok(ChainParams::new(
            self.chain.gamma,
            self.h,
            self.size.size(),
            self.chain.r,
        )?)
    }
}

#[derive(Debug, Args)]
pub struct AxesArgs {
    /// Canonical axis set: 2, 3 or 10 settings
    #[arg(long, default_value_t = 10)]
    pub settings: usize,
    /// File with one axis per line (three reals); replaces --settings
    #[arg(long, value_name = "FILE", conflicts_with = "settings")]
    pub axes: Option<PathBuf>,
    /// Local-hidden-state bound for the axes in --axes
    #[arg(long, requires = "axes")]
    pub bound: Option<f64>,
}

impl AxesArgs {
    fn load(&self, table: &mut Table) -> Result<AxisSet, CliError> {
        let Some(path) = &self.axes else {
            table.meta("settings", self.settings);
            let axes = AxisSet::canonical(self.settings)?;
            if let Some(b) = axes.bound() {
                table.meta("bound", num(b));
            }
            return Ok(axes);
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
            path: path.clone(),
            source,
        })?;
        let (axes, warnings) = AxisSet::parse(&text, self.bound)?;
        table.meta("settings", axes.n_settings());
        table.meta("axes_file", path.display());
        for (i, a) in axes.axes().iter().enumerate() {
            table.meta(
                &format!("axis_{}", i + 1),
                format!("{} {} {}", a.x, a.y, a.z),
            );
        }
        if let Some(b) = axes.bound() {
            table.meta("bound", num(b));
        }
        for w in warnings {
            eprintln!("xysteer: warning: {w}");
            table.meta("warning", w);
        }
        Ok(axes)
    }
}

#[derive(Debug, Args)]
pub struct IneqArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub axes: AxesArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Field grid lo:hi:step
    #[arg(long, default_value = "0:2:0.002", value_parser = parse_h_range)]
    pub h_range: (f64, f64, f64),
    /// Odd chain lengths, comma separated
    #[arg(long = "N", value_name = "N", value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Include the thermodynamic limit (the default when no --N is given)
    #[arg(long)]
    pub limit: bool,
    /// Add inequality columns (S_ineq, S_ineq_canonical, dS_ineq_dh)
    #[arg(long)]
    pub ineq: bool,
    #[command(flatten)]
    pub axes: AxesArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Odd chain lengths for the peak fit, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "101,201,401,801,1601,3201"
    )]
    pub sizes: Vec<usize>,
    /// |h − 1| window d_lo:d_hi for the κ₁ fit
    #[arg(long, default_value = "1e-3:5e-2", value_parser = parse_window)]
    pub window: (f64, f64),
    /// Side of h = 1 whose κ₁ enters ν
    #[arg(long, value_enum, default_value_t = SideArg::Below)]
    pub side: SideArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SideArg {
    Below,
    Above,
    Both,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Below => Side::Below,
            SideArg::Above => Side::Above,
            SideArg::Both => Side::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Figure layout
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Table written by `sweep` or `scaling`
    pub table: PathBuf,
}

fn parse_h_range(s: &str) -> Result<(f64, f64, f64), String> {
    match parse_floats(s)[..] {
        [lo, hi, step] => Ok((lo, hi, step)),
        _ => Err(format!("expected lo:hi:step, got {s:?}")),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    match parse_floats(s)[..] {
        [lo, hi] => Ok((lo, hi)),
        _ => Err(format!("expected d_lo:d_hi, got {s:?}")),
    }
}

fn parse_floats(s: &str) -> Vec<f64> {
    let parts: Vec<_> = s.split(':').map(|p| p.trim().parse::<f64>()).collect();
    if parts.iter().any(Result::is_err) {
        return Vec::new();
    }
    parts.into_iter().map(Result::unwrap).collect()
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("xysteer: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let (name, bytes) = match &cli.command {
        Command::Corr(a) => ("corr", corr(a)?.render(&title("corr"), cli.format)),
        Command::State(a) => ("state", state(a)?.render(&title("state"), cli.format)),
        Command::Steer(a) => ("steer", steer(a)?.render(&title("steer"), cli.format)),
        Command::Ineq(a) => ("ineq", ineq(a)?.render(&title("ineq"), cli.format)),
        Command::Sweep(a) => ("sweep", sweep(a)?.render(&title("sweep"), cli.format)),
        Command::Scaling(a) => ("scaling", scaling(a)?.render(&title("scaling"), cli.format)),
        Command::Plot(a) => {
            let text = std::fs::read_to_string(&a.table).map_err(|source| CliError::Input {
                path: a.table.clone(),
                source,
            })?;
            let table = Table::parse(&text)?;
            let script = emit_plotscript(&a.table, &table, a.figure)?;
            let path = output_path(cli.output.as_deref(), &format!("{}.gp", a.figure.name()));
            return table::emit(script.as_bytes(), path.as_deref());
        }
    };
    let path = output_path(
        cli.output.as_deref(),
        &format!("{name}.{}", cli.format.extension()),
    );
    table::emit(&bytes, path.as_deref())
}

fn title(subcommand: &str) -> String {
    format!("xysteer {} {subcommand}", env!("CARGO_PKG_VERSION"))
}

fn output_path(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(default_name))
}

fn chain_meta(table: &mut Table, gamma: f64, r: usize) {
    table.meta("gamma", num(gamma)).meta("r", r);
}

fn point_meta(table: &mut Table, a: &PointArgs) {
    chain_meta(table, a.chain.gamma, a.chain.r);
    table.meta("h", num(a.h)).meta("N", a.size.size());
}

fn point_cells(a: &PointArgs) -> Vec<String> {
    vec![num(a.h), a.size.size().to_string(), a.chain.r.to_string()]
}

fn corr(a: &PointArgs) -> Result<Table, CliError> {
    let c = xychain::correlators(&a.params()?)?;
    let mut t = Table::new(&["h", "N", "r", "sz", "szsz", "sxsx", "sysy"]);
    point_meta(&mut t, a);
    let mut row = point_cells(a);
    row.extend([c.sz, c.szsz, c.sxsx, c.sysy].map(num));
    t.push(row);
    Ok(t)
}

fn state(a: &PointArgs) -> Result<Table, CliError> {
    let rho = xychain::reduced_state(&a.params()?)?;
    let mut t = Table::new(&["row", "col", "re", "im"]);
    point_meta(&mut t, a);
    t.meta("basis", "|00>, |01>, |10>, |11> with 0 = spin up along z");
    t.meta("min_eigenvalue", num(rho.min_eigenvalue()));
    let m = rho.matrix();
    for i in 0..4 {
        for j in 0..4 {
            let z = m[(i, j)];
            t.push(vec![i.to_string(), j.to_string(), num(z.re), num(z.im)]);
        }
    }
    Ok(t)
}

fn steer(a: &PointArgs) -> Result<Table, CliError> {
    let rho = xychain::reduced_state(&a.params()?)?;
    let pt = rho.pt_eigenvalues();
    let s = pt.steerability();
    let mut t = Table::new(&[
        "h",
        "N",
        "r",
        "lambda1",
        "lambda2",
        "lambda3",
        "lambda4",
        "S",
        "concurrence",
        "steerable",
    ]);
    point_meta(&mut t, a);
    let mut row = point_cells(a);
    row.extend(pt.values().map(num));
    row.extend([num(s), num(rho.concurrence()), (s < 0.0).to_string()]);
    t.push(row);
    Ok(t)
}

fn ineq(a: &IneqArgs) -> Result<Table, CliError> {
    let params = a.point.params()?;
    let mut t = Table::new(&[
        "h",
        "N",
        "r",
        "settings",
        "value",
        "canonical_value",
        "bound",
        "violated",
        "S",
    ]);
    point_meta(&mut t, &a.point);
    let axes = a.axes.load(&mut t)?;
    if axes.bound().is_none() {
        return Err(CliError::Usage(
            "--axes needs --bound for the ineq subcommand".into(),
        ));
    }
    let rho = xychain::reduced_state(&params)?;
    let v = steering::violation_with(&rho, &axes)?;
    let mut row = point_cells(&a.point);
    row.extend([
        axes.n_settings().to_string(),
        num(v.value),
        num(v.canonical_value),
        num(v.bound),
        v.violated.to_string(),
        num(rho.steerability()),
    ]);
    t.push(row);
    Ok(t)
}

fn sweep(a: &SweepArgs) -> Result<Table, CliError> {
    let (lo, hi, step) = a.h_range;
    let range = HRange::new(lo, hi, step)?;
    let mut sizes: Vec<ChainSize> = a.sizes.iter().copied().map(ChainSize::Finite).collect();
    if a.limit || sizes.is_empty() {
        sizes.push(ChainSize::Thermodynamic);
    }

    let mut header = vec!["N", "h", "S", "dS_dh", "lambda1", "concurrence"];
    if a.ineq {
        header.extend(["S_ineq", "S_ineq_canonical", "dS_ineq_dh"]);
    }
    let mut t = Table::new(&header);
    chain_meta(&mut t, a.chain.gamma, a.chain.r);
    t.meta("h_range", format!("{}:{}:{}", num(lo), num(hi), num(step)));
    t.meta(
        "sizes",
        sizes
            .iter()
            .map(ChainSize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    let axes = if a.ineq {
        Some(a.axes.load(&mut t)?)
    } else {
        None
    };

    // Reject every configuration before the first sweep starts.
    for &size in &sizes {
        ChainParams::new(a.chain.gamma, lo, size, a.chain.r)?;
        ChainParams::new(a.chain.gamma, hi, size, a.chain.r)?;
    }

    for size in sizes {
        let table = criticality::sweep(&SweepConfig {
            gamma: a.chain.gamma,
            size,
            r: a.chain.r,
            range,
            inequality: axes.clone(),
        })?;
        for row in &table.rows {
            let v = &row.values;
            let mut cells = vec![
                size.to_string(),
                num(row.h),
                num(v.s),
                num(row.ds_dh),
                num(v.lambda1),
                num(v.concurrence),
            ];
            if let (Some(x), Some(c), Some(d)) = (v.s_ineq, v.s_ineq_canonical, row.ds_ineq_dh) {
                cells.extend([num(x), num(c), num(d)]);
            }
            t.push(cells);
        }
    }
    Ok(t)
}

fn scaling(a: &ScalingArgs) -> Result<Table, CliError> {
    let config = ScalingConfig {
        gamma: a.chain.gamma,
        r: a.chain.r,
        kappa1: Kappa1Config {
            window: a.window,
            ..Kappa1Config::default()
        },
        headline_side: a.side.into(),
        sizes: a.sizes.clone(),
        ..ScalingConfig::default()
    };
    config.validate()?;
    let fit = criticality::scaling_analysis(&config)?;

    let mut t = Table::new(&["N", "ln_N", "h_m", "peak", "peak_fit"]);
    chain_meta(&mut t, config.gamma, config.r);
    t.meta(
        "sizes",
        config
            .sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    t.meta(
        "kappa1_window",
        format!("{}:{}", num(a.window.0), num(a.window.1)),
    );
    t.meta("kappa1_samples_per_side", config.kappa1.samples);
    for (label, f) in [
        ("below", &fit.below),
        ("above", &fit.above),
        ("both", &fit.pooled),
    ] {
        t.meta(&format!("kappa1_{label}"), num(f.kappa1()));
        t.meta(&format!("kappa1_{label}_rms"), num(f.fit.rms));
    }
    t.meta("kappa1_side", fit.kappa1_side);
    t.meta("kappa1", num(fit.kappa1));
    t.meta("kappa2", num(fit.kappa2.kappa2()));
    t.meta("kappa2_intercept", num(fit.kappa2.fit.intercept));
    t.meta("kappa2_rms", num(fit.kappa2.fit.rms));
    t.meta("nu", num(fit.nu));

    let line = &fit.kappa2.fit;
    for p in &fit.kappa2.peaks {
        let ln_n = (p.n as f64).ln();
        t.push(vec![
            p.n.to_string(),
            num(ln_n),
            num(p.h_m),
            num(p.peak),
            num(line.intercept + line.slope * ln_n),
        ]);
    }
    Ok(t)
}
