//! The `squeeze` command line.
//!
//! JSON documents carry `"schema": "1"`; floats are printed with 17
//! significant digits in both JSON and CSV so identical inputs give
//! byte-identical output.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classification::{
    build_su2_triple, decompose_subset, enumerate_classes_with_examples, subset_for_subspins,
    ClassRecord, IrrepDecomposition, VertexSubset,
};
use crate::coherent_dynamics::{
    css_expectation_perp, css_fluctuation, find_limit, linear_grid, log_grid, squeezing_parameter,
    sweep, CoherentSpec, EnsembleSpec, SqueezeTrace,
};
use crate::error::Error;
use crate::exact_oracle::{Discrepancy, OracleSystem};
use crate::lie_algebra::multipole_basis;
use crate::operator::CMatrix;
use crate::root_system::{compute_roots, CartanChoice};
use crate::scan_fit::{
    fit_power_law, log_spaced_n, n_scan, zeta_scan, ClassRef, PowerLawModel, Remainder, RowStatus,
    ScanConfig, ScanRow,
};
use crate::spin::SpinQuantum;

pub const SCHEMA: &str = "1";
/// `oracle-check` fails above this.
pub const ORACLE_TOLERANCE: f64 = 1e-8;
const ZETA_SUM_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "squeeze",
    version,
    about = "Squeezing classes and one-axis twisting in su(2J+1) spin ensembles"
)]
pub struct Cli {
    /// Worker threads for sweeps and scans
    #[arg(long, global = true, env = "SQUEEZE_THREADS")]
    pub threads: Option<usize>,
    /// Suppress the version line on stderr
    #[arg(long, global = true)]
    pub no_banner: bool,
    /// Reject zeta lists that are not normalized instead of rescaling them
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write data here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Traceless Hermitian multipole basis of su(2J+1)
    Generators(SpinArg),
    /// Roots and ladder operators for the diagonal Cartan subalgebra
    Roots(SpinArg),
    /// Unitary equivalence classes of su(2) subalgebras
    Classify {
        #[command(flatten)]
        spin: SpinArg,
        /// Include the O1, O2, O3 matrices of each class representative
        #[arg(long)]
        emit_matrices: bool,
    },
    /// Mean spin and fluctuations of the coherent state
    Coherent {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
    },
    /// Squeezing trace over a mu grid
    OatSweep {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        grid: MuGrid,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Minimal squeezing parameter and its mu
    Limits {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Squeezing limit against |zeta_1|^2
    ZetaScan {
        /// JSON scan configuration; replaces the flags below
        #[arg(long, conflicts_with_all = ["j", "class", "n", "grid", "grid_points"])]
        config: Option<PathBuf>,
        #[arg(long)]
        j: Option<SpinQuantum>,
        #[arg(long)]
        class: Option<ClassSelector>,
        /// Comma-separated particle numbers
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Comma-separated |zeta_1|^2 values
        #[arg(long, value_delimiter = ',', conflicts_with = "grid_points")]
        grid: Vec<f64>,
        /// Uniform |zeta_1|^2 grid on [0, 1] with this many points
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Squeezing limit against particle number
    NScan {
        #[arg(long)]
        j: SpinQuantum,
        #[arg(long)]
        class: ClassSelector,
        #[arg(long)]
        zeta: Option<ZetaList>,
        /// Comma-separated particle numbers; overrides the log grid
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1e3)]
        n_min: f64,
        #[arg(long, default_value_t = 1e6)]
        n_max: f64,
        #[arg(long, default_value_t = 12)]
        n_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Least-squares power law through CSV columns
    Fit {
        /// CSV with a header row; stdin when absent
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModelArg::Offset)]
        model: ModelArg,
        #[arg(long, default_value = "n")]
        x: String,
        #[arg(long, default_value = "xi2_min")]
        y: String,
    },
    /// Closed forms against brute-force evolution in the symmetric subspace
    OracleCheck {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 50)]
        mu_points: usize,
    },
}

#[derive(Args, Debug)]
pub struct SpinArg {
    /// Spin quantum number, e.g. 3/2
    #[arg(long)]
    pub j: SpinQuantum,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    /// Spin quantum number, e.g. 3/2
    #[arg(long)]
    pub j: SpinQuantum,
    /// Dynkin subset like 1,3 or subspins like 1/2+1/2
    #[arg(long)]
    pub class: ClassSelector,
    /// Particle number
    #[arg(long)]
    pub n: u64,
    /// Comma-separated weights per subspace, largest subspin first; complex
    /// entries as a+bi
    #[arg(long)]
    pub zeta: Option<ZetaList>,
}

#[derive(Args, Debug)]
pub struct MuGrid {
    #[arg(long, default_value_t = 0.0)]
    pub mu_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 101)]
    pub mu_points: usize,
    /// Log spacing (needs mu_min > 0)
    #[arg(long)]
    pub log: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// c + a N^-p + b/N
    Offset,
    /// a N^-p
    Power,
}

/// Either a vertex subset or a subspin multiset.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassSelector {
    Subset(Vec<usize>),
    Subspins(Vec<SpinQuantum>),
}

impl FromStr for ClassSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty class".into());
        }
        if s.contains('+') || s.contains('/') {
            if s.contains(',') {
                return Err(format!("class '{s}' mixes subset and subspin forms"));
            }
            s.split('+')
                .map(|t| t.parse::<SpinQuantum>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()
                .map(ClassSelector::Subspins)
        } else {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad vertex '{t}' in class '{s}'"))
                })
                .collect::<Result<_, _>>()
                .map(ClassSelector::Subset)
        }
    }
}

impl ClassSelector {
    fn class_ref(&self) -> ClassRef {
        match self {
            ClassSelector::Subset(v) => ClassRef::Subset(v.clone()),
            ClassSelector::Subspins(s) => ClassRef::Subspins(s.clone()),
        }
    }

    /// Subset realizing the class; the given one for the subset form.
    pub fn subset(&self, j: SpinQuantum) -> crate::Result<VertexSubset> {
        match self {
            ClassSelector::Subset(v) => VertexSubset::new(j, v.iter().copied()),
            ClassSelector::Subspins(s) => {
                let d = IrrepDecomposition::new(j, s.iter().copied())?;
                subset_for_subspins(j, d.subspins())
            }
        }
    }

    pub fn decomposition(&self, j: SpinQuantum) -> crate::Result<IrrepDecomposition> {
        Ok(decompose_subset(&self.subset(j)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaList(pub Vec<C64>);

impl FromStr for ZetaList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| C64::from_str(t.trim()).map_err(|_| format!("bad zeta entry '{t}'")))
            .collect::<Result<_, _>>()
            .map(ZetaList)
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// A numerical check failed after producing output.
    #[error("{0}")]
    Status(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Status(_) => 2,
            CliError::Lib(
                Error::NoSqueezingFound { .. }
                | Error::FitDiverged { .. }
                | Error::VanishingMeanSpin { .. }
                | Error::DegenerateRootSpace { .. }
                | Error::NotAnSu2Triple { .. },
            ) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Data goes to `out` unless `--output` is given.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    if !cli.no_banner {
        let _ = writeln!(err, "squeeze {}", env!("CARGO_PKG_VERSION"));
    }
    let mut notes = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut notes)),
            Err(e) => Err(CliError::Usage(format!("--threads: {e}"))),
        },
        None => dispatch(&cli, &mut notes),
    };
    let _ = err.write_all(&notes);
    let result = result.and_then(|(data, status)| {
        match &cli.output {
            Some(path) => fs::write(path, data)?,
            None => out.write_all(&data)?,
        }
        status.map_or(Ok(()), |msg| Err(CliError::Status(msg)))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// Runs the command; returns the bytes to emit and, for a failed numerical
/// check, a message that turns the exit code into 2.
fn dispatch(cli: &Cli, err: &mut Vec<u8>) -> CliResult<(Vec<u8>, Option<String>)> {
    let mut buf = Vec::new();
    let status = match &cli.command {
        Command::Generators(a) => generators(a.j, &mut buf),
        Command::Roots(a) => roots(a.j, &mut buf),
        Command::Classify {
            spin,
            emit_matrices,
        } => classify(spin.j, *emit_matrices, &mut buf),
        Command::Coherent { system, theta, phi } => {
            coherent(cli, system, *theta, *phi, err, &mut buf)
        }
        Command::OatSweep {
            system,
            grid,
            format,
        } => oat_sweep(cli, system, grid, *format, err, &mut buf),
        Command::Limits { system } => limits(cli, system, err, &mut buf),
        Command::ZetaScan {
            config,
            j,
            class,
            n,
            grid,
            grid_points,
            format,
        } => {
            let cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?
                }
                None => {
                    let j = j.ok_or_else(|| {
                        CliError::Usage("--j is required without --config".into())
                    })?;
                    let class = class.as_ref().ok_or_else(|| {
                        CliError::Usage("--class is required without --config".into())
                    })?;
                    if n.is_empty() {
                        return Err(CliError::Usage("--n is required without --config".into()));
                    }
                    let grid = match grid_points {
                        Some(k) if *k >= 2 => linear_grid(0.0, 1.0, *k),
                        Some(_) => {
                            return Err(CliError::Usage("--grid-points needs at least 2".into()))
                        }
                        None if grid.is_empty() => {
                            return Err(CliError::Usage(
                                "--grid or --grid-points is required".into(),
                            ))
                        }
                        None => grid.clone(),
                    };
                    ScanConfig {
                        j,
                        class: class.class_ref(),
                        n: n.clone(),
                        zeta1_sq_grid: grid,
                        remainder: Remainder::Second,
                    }
                }
            };
            let rows = zeta_scan(&cfg)?;
            write_rows(&rows, *format, &mut buf)
        }
        Command::NScan {
            j,
            class,
            zeta,
            n,
            n_min,
            n_max,
            n_points,
            format,
        } => {
            let ns = if n.is_empty() {
                if !(*n_min >= 1.0 && n_max > n_min && *n_points >= 2) {
                    return Err(CliError::Usage(
                        "need 1 <= --n-min < --n-max and --n-points >= 2".into(),
                    ));
                }
                log_spaced_n(*n_min, *n_max, *n_points)
            } else {
                n.clone()
            };
            let system = SystemArgs {
                j: *j,
                class: class.clone(),
                n: ns[0].max(1),
                zeta: zeta.clone(),
            };
            let spec = ensemble(cli, &system, None, err)?;
            let rows = n_scan(&spec, &ns)?;
            write_rows(&rows, *format, &mut buf)
        }
        Command::Fit { input, model, x, y } => {
            let text = match input {
                Some(path) => fs::read_to_string(path)?,
                None => io::read_to_string(io::stdin())?,
            };
            fit(&text, *model, x, y, &mut buf)
        }
        Command::OracleCheck { system, mu_points } => {
            oracle_check(cli, system, *mu_points, err, &mut buf)
        }
    };
    match status {
        Ok(()) => Ok((buf, None)),
        Err(CliError::Status(msg)) => Ok((buf, Some(msg))),
        Err(e) => Err(e),
    }
}

fn ensemble(
    cli: &Cli,
    a: &SystemArgs,
    angles: Option<(f64, f64)>,
    err: &mut dyn Write,
) -> CliResult<EnsembleSpec> {
    let d = a.class.decomposition(a.j)?;
    let mut zeta = match &a.zeta {
        Some(z) => z.0.clone(),
        None => {
            let mut z = vec![C64::new(0.0, 0.0); d.r()];
            z[0] = C64::new(1.0, 0.0);
            z
        }
    };
    if zeta.len() != d.r() {
        return Err(CliError::Usage(format!(
            "--zeta has {} entries, class {} needs {}",
            zeta.len(),
            d,
            d.r()
        )));
    }
    let sum: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    if (sum - 1.0).abs() > ZETA_SUM_TOL {
        if cli.strict || sum == 0.0 {
            return Err(CliError::Usage(format!(
                "--zeta: sum |zeta|^2 = {sum}, expected 1"
            )));
        }
        let _ = writeln!(err, "warning: --zeta rescaled (sum |zeta|^2 was {sum})");
    }
    // always rescale so tiny rounding in typed values does not trip the library check
    let scale = sum.sqrt().recip();
    zeta.iter_mut().for_each(|z| *z *= scale);
    let coherent = match angles {
        Some((theta, phi)) => CoherentSpec::new(theta, phi, zeta)?,
        None => CoherentSpec::equatorial(zeta)?,
    };
    Ok(EnsembleSpec::new(a.n, d, coherent)?)
}

// Output helpers.

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SigFigs;

impl serde_json::ser::Formatter for SigFigs {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn write_json<T: Serialize>(value: &T, buf: &mut Vec<u8>) -> CliResult<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *buf, SigFigs);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    buf.push(b'\n');
    Ok(())
}

fn matrix_json(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |f: fn(&C64) -> f64| {
        (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
            .collect()
    };
    (rows(|z| z.re), rows(|z| z.im))
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

// Subcommands.

fn generators(j: SpinQuantum, buf: &mut Vec<u8>) -> CliResult<()> {
    j.require_nontrivial()?;
    let basis = multipole_basis(j);
    let gens: Vec<Value> = basis
        .names()
        .iter()
        .zip(basis.generators())
        .map(|(name, g)| {
            let (re, im) = matrix_json(g.matrix());
            json!({"name": name, "re": re, "im": im})
        })
        .collect();
    write_json(&json!({"schema": SCHEMA, "j": j, "generators": gens}), buf)
}

fn roots(j: SpinQuantum, buf: &mut Vec<u8>) -> CliResult<()> {
    j.require_nontrivial()?;
    let basis = multipole_basis(j);
    let cartan = CartanChoice::standard(&basis)?;
    let roots: Vec<Value> = compute_roots(&basis, &cartan)?
        .iter()
        .map(|r| {
            let (re, im) = matrix_json(&r.ladder);
            json!({"root": r.root, "ladder_re": re, "ladder_im": im})
        })
        .collect();
    let cartan_names: Vec<&String> = cartan
        .indices()
        .iter()
        .map(|&i| &basis.names()[i])
        .collect();
    write_json(
        &json!({"schema": SCHEMA, "j": j, "cartan": cartan_names, "roots": roots}),
        buf,
    )
}

fn classify(j: SpinQuantum, emit_matrices: bool, buf: &mut Vec<u8>) -> CliResult<()> {
    j.require_nontrivial()?;
    let classes: Vec<Value> = enumerate_classes_with_examples(j)
        .iter()
        .map(|(d, subset)| {
            let rec = ClassRecord::from(d);
            let mut v = json!({
                "subspins": rec.subspins,
                "r": rec.r,
                "f": rec.f,
                "label": d.label(),
                "example_subset": subset.vertices(),
            });
            if emit_matrices {
                let triple = build_su2_triple(subset);
                let mats: Vec<Value> = triple
                    .operators()
                    .iter()
                    .map(|o| {
                        let (re, im) = matrix_json(o.matrix());
                        json!({"re": re, "im": im})
                    })
                    .collect();
                v["matrices"] = json!({"o1": mats[0], "o2": mats[1], "o3": mats[2]});
            }
            v
        })
        .collect();
    write_json(&json!({"schema": SCHEMA, "j": j, "classes": classes}), buf)
}

fn coherent(
    cli: &Cli,
    a: &SystemArgs,
    theta: f64,
    phi: f64,
    err: &mut dyn Write,
    buf: &mut Vec<u8>,
) -> CliResult<()> {
    let spec = ensemble(cli, a, Some((theta, phi)), err)?;
    let xi2 = squeezing_parameter(&spec, 0.0).ok();
    write_json(
        &json!({
            "schema": SCHEMA,
            "class": spec.decomposition().label(),
            "f": spec.f(),
            "n": spec.n(),
            "perp": css_expectation_perp(&spec),
            "variance": css_fluctuation(&spec, 0.0),
            "xi2": xi2,
        }),
        buf,
    )
}

fn mu_grid(g: &MuGrid) -> CliResult<Vec<f64>> {
    if g.mu_points == 0
        || g.mu_max.is_nan()
        || g.mu_min.is_nan()
        || g.mu_max < g.mu_min
        || g.mu_min < 0.0
    {
        return Err(CliError::Usage(
            "need 0 <= --mu-min <= --mu-max and --mu-points >= 1".into(),
        ));
    }
    if g.log {
        if g.mu_min <= 0.0 {
            return Err(CliError::Usage("--log needs --mu-min > 0".into()));
        }
        Ok(log_grid(g.mu_min, g.mu_max, g.mu_points))
    } else {
        Ok(linear_grid(g.mu_min, g.mu_max, g.mu_points))
    }
}

pub const TRACE_COLUMNS: [&str; 6] = ["mu", "perp", "var_min", "var_max", "nu_min", "xi2"];

fn oat_sweep(
    cli: &Cli,
    a: &SystemArgs,
    g: &MuGrid,
    format: Format,
    err: &mut dyn Write,
    buf: &mut Vec<u8>,
) -> CliResult<()> {
    let spec = ensemble(cli, a, None, err)?;
    let traces = sweep(&spec, &mu_grid(g)?)?;
    match format {
        Format::Json => write_json(
            &json!({"schema": SCHEMA, "class": spec.decomposition().label(), "n": spec.n(), "trace": traces}),
            buf,
        ),
        Format::Csv => {
            let mut w = csv_writer(buf);
            w.write_record(TRACE_COLUMNS)?;
            for t in &traces {
                w.write_record(
                    [
                        t.mu,
                        t.perp_expectation,
                        t.var_min,
                        t.var_max,
                        t.nu_min,
                        t.xi2,
                    ]
                    .map(fmt_f64),
                )?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn limits(cli: &Cli, a: &SystemArgs, err: &mut dyn Write, buf: &mut Vec<u8>) -> CliResult<()> {
    let spec = ensemble(cli, a, None, err)?;
    match find_limit(&spec) {
        Ok(l) => write_json(
            &json!({"schema": SCHEMA, "xi2_min": l.xi2_min, "mu_min": l.mu_min, "status": "ok", "iterations": l.iterations}),
            buf,
        ),
        Err(e @ Error::NoSqueezingFound { .. }) => {
            write_json(
                &json!({"schema": SCHEMA, "xi2_min": null, "mu_min": null, "status": "no_squeezing"}),
                buf,
            )?;
            Err(CliError::Status(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

pub const SCAN_COLUMNS: [&str; 5] = ["n", "zeta1_sq", "xi2_min", "mu_min", "status"];

fn status_str(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Ok => "ok",
        RowStatus::NoSqueezing => "no_squeezing",
        RowStatus::NoSpin => "no_spin",
    }
}

fn write_rows(rows: &[ScanRow], format: Format, buf: &mut Vec<u8>) -> CliResult<()> {
    match format {
        Format::Json => write_json(&json!({"schema": SCHEMA, "rows": rows}), buf),
        Format::Csv => {
            let mut w = csv_writer(buf);
            w.write_record(SCAN_COLUMNS)?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    fmt_f64(r.zeta1_sq),
                    opt(r.xi2_min),
                    opt(r.mu_min),
                    status_str(r.status).to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Reads `(x, y)` pairs from CSV text, skipping rows with an empty or
/// non-finite `y`.
pub fn read_points(text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("no column '{name}'"))
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        if field(yi).is_empty() {
            continue;
        }
        let parse = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|_| format!("row {}: bad number '{}'", line + 2, field(i)))
        };
        let (xv, yv) = (parse(xi)?, parse(yi)?);
        if yv.is_finite() {
            points.push((xv, yv));
        }
    }
    Ok(points)
}

fn fit(text: &str, model: ModelArg, x: &str, y: &str, buf: &mut Vec<u8>) -> CliResult<()> {
    let points = read_points(text, x, y).map_err(CliError::Usage)?;
    let model = match model {
        ModelArg::Offset => PowerLawModel::OffsetPowerInverse,
        ModelArg::Power => PowerLawModel::Power,
    };
    let result = fit_power_law(&points, model)?;
    write_json(
        &json!({
            "schema": SCHEMA,
            "x": x,
            "y": y,
            "points": points.len(),
            "model": result.model,
            "params": result.params,
            "residual_norm": result.residual_norm,
            "iterations": result.iterations,
        }),
        buf,
    )
}

pub const ORACLE_COLUMNS: [&str; 9] = [
    "mu",
    "perp_analytic",
    "perp_oracle",
    "var_min_analytic",
    "var_min_oracle",
    "var_max_analytic",
    "var_max_oracle",
    "xi2_analytic",
    "xi2_oracle",
];

fn oracle_check(
    cli: &Cli,
    a: &SystemArgs,
    mu_points: usize,
    err: &mut dyn Write,
    buf: &mut Vec<u8>,
) -> CliResult<()> {
    if mu_points == 0 {
        return Err(CliError::Usage("--mu-points must be at least 1".into()));
    }
    let spec = ensemble(cli, a, None, err)?;
    let n = u32::try_from(a.n)
        .map_err(|_| CliError::Usage(format!("--n {} too large for the oracle", a.n)))?;
    let system = OracleSystem::new(&a.class.subset(a.j)?, n)?;
    let mus = linear_grid(0.0, std::f64::consts::PI, mu_points);
    let analytic: Vec<SqueezeTrace> = sweep(&spec, &mus)?;
    let perp0 = css_expectation_perp(&spec);
    let mut worst = 0.0_f64;
    let mut w = csv_writer(buf);
    w.write_record(ORACLE_COLUMNS)?;
    for t in &analytic {
        let o = system.squeezing(&spec, t.mu)?;
        worst = worst.max(Discrepancy::new(t, &o, perp0).max());
        w.write_record(
            [
                t.mu,
                t.perp_expectation,
                o.perp,
                t.var_min,
                o.var_min,
                t.var_max,
                o.var_max,
                t.xi2,
                o.xi2,
            ]
            .map(fmt_f64),
        )?;
    }
    w.flush()?;
    drop(w);
    let _ = writeln!(err, "max_abs_discrepancy={}", fmt_f64(worst));
    if worst > ORACLE_TOLERANCE {
        return Err(CliError::Status(format!(
            "discrepancy {} exceeds {ORACLE_TOLERANCE:e}",
            fmt_f64(worst)
        )));
    }
    Ok(())
}
