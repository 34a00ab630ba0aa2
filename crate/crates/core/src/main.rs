use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vbip::decode::{decode_observed, Algorithm, DecoderConfig, TraceWriter, DEFAULT_EQ_TOL, DEFAULT_MAX_ITER};
use vbip::experiment::{parse_results, render_plot_svg, sweep, write_results, Level, SweepConfig};
use vbip::graph::{expand_qc, generate_regular, parse_alist, parse_base_matrix, write_alist, RegularParams, SensingMatrix, ShiftScaling};
use vbip::signal::{generate_signal, reconstruction_success, SparseSignal, DEFAULT_SUCCESS_TOL};
use vbip::{Error, Result};

#[derive(Parser)]
#[command(name = "vbip", version, about = "Message-passing reconstruction of nonnegative sparse signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sensing matrix and write it as alist.
    GenMatrix(GenMatrixArgs),
    /// Generate a random half-normal sparse signal.
    GenSignal(GenSignalArgs),
    /// Reconstruct a signal from its measurements.
    Decode(DecodeArgs),
    /// Monte Carlo success probability versus sparsity.
    Sweep(SweepArgs),
    /// Render a results table as an SVG plot.
    Plot(PlotArgs),
    /// Print dimensions, degrees and 4-cycle count of an alist matrix.
    Info {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Regular,
    Qc,
}

#[derive(Args)]
struct MatrixSpec {
    /// Generator: column-regular random or quasi-cyclic lift.
    #[arg(long = "type", value_enum, default_value = "regular")]
    kind: MatrixKind,
    /// Number of variables N (regular).
    #[arg(long)]
    n: Option<usize>,
    /// Number of checks M (regular).
    #[arg(long)]
    m: Option<usize>,
    /// Column degree (regular).
    #[arg(long, default_value_t = 3)]
    dv: usize,
    #[arg(long = "avoid-4cycles")]
    avoid_4cycles: bool,
    #[arg(long, default_value_t = 100)]
    max_attempts: usize,
    /// Base-matrix file (qc).
    #[arg(long)]
    base_file: Option<PathBuf>,
    /// Lift size; defaults to the z in the base file.
    #[arg(long)]
    z: Option<usize>,
    /// How shifts are adapted when --z differs from the file's z.
    #[arg(long, default_value = "floor")]
    scaling: String,
}

impl MatrixSpec {
    fn build(&self, seed: u64) -> Result<SensingMatrix> {
        match self.kind {
            MatrixKind::Regular => {
                let (Some(n), Some(m)) = (self.n, self.m) else {
                    return Err(Error::InvalidConfig("regular matrices need --n and --m".into()));
                };
                generate_regular(&RegularParams {
                    n_vars: n,
                    n_checks: m,
                    var_degree: self.dv,
                    seed,
                    avoid_4cycles: self.avoid_4cycles,
                    max_attempts: self.max_attempts,
                })
            }
            MatrixKind::Qc => {
                let path = self
                    .base_file
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("qc matrices need --base-file".into()))?;
                let mut base = parse_base_matrix(&read(path)?)?;
                let z = self.z.unwrap_or(base.lift);
                if z != base.lift {
                    base = base.rescaled(z, self.scaling.parse::<ShiftScaling>()?);
                }
                expand_qc(&base, z)
            }
        }
    }
}

#[derive(Args)]
struct GenMatrixArgs {
    #[command(flatten)]
    spec: MatrixSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output alist file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenSignalArgs {
    #[arg(long)]
    n: usize,
    /// Support size K, or a fraction K/N when written with a decimal point.
    #[arg(long)]
    k: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Sensing matrix (alist).
    #[arg(long)]
    matrix: PathBuf,
    /// Ground-truth signal file; measurements are computed from it.
    #[arg(long, conflicts_with = "y_file", required_unless_present = "y_file")]
    signal: Option<PathBuf>,
    /// Measurement vector, whitespace separated.
    #[arg(long)]
    y_file: Option<PathBuf>,
    #[arg(long, default_value = "vbip")]
    algo: String,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Equality tolerance, relative to max(1, max y).
    #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable the identical-residual rule.
    #[arg(long)]
    no_coincidence: bool,
    /// Per-iteration trace file ("-" for stderr).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Estimate output, one value per line (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sensing matrix (alist); otherwise one is generated from the flags below.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    spec: MatrixSpec,
    /// Seed of the generated matrix.
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
    /// Comma-separated sparsity levels (fractions like 0.1, or integer K).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k_min", "k_max", "k_step"])]
    k_list: Vec<String>,
    #[arg(long)]
    k_min: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    k_step: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "ip,vb,vbip")]
    algos: Vec<String>,
    #[arg(long, default_value_t = 100)]
    min_failures: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    min_trials: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SUCCESS_TOL)]
    success_tol: f64,
    #[arg(long)]
    no_coincidence: bool,
    /// Master seed of the trials.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results table (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the curves to this SVG file.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_level(s: &str) -> Result<Level> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) {
        s.parse()
            .map(Level::Fraction)
            .map_err(|_| Error::InvalidConfig(format!("bad sparsity {s:?}")))
    } else {
        s.parse()
            .map(Level::Count)
            .map_err(|_| Error::InvalidConfig(format!("bad support size {s:?}")))
    }
}

fn levels(args: &SweepArgs) -> Result<Vec<Level>> {
    if !args.k_list.is_empty() {
        return args.k_list.iter().map(|s| parse_level(s)).collect();
    }
    let (Some(lo), Some(hi), Some(step)) = (args.k_min, args.k_max, args.k_step) else {
        return Err(Error::InvalidConfig("give --k-list or all of --k-min/--k-max/--k-step".into()));
    };
    if step.is_nan() || step <= 0.0 || hi < lo {
        return Err(Error::InvalidConfig("need k-step > 0 and k-max >= k-min".into()));
    }
    // Index-based grid so accumulated rounding cannot drop the last point.
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let k = lo + step * i as f64;
            Level::Fraction((k * 1e12).round() / 1e12)
        })
        .collect())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMatrix(a) => {
            let h = a.spec.build(a.seed)?;
            emit(a.out.as_deref(), &write_alist(&h))
        }
        Command::GenSignal(a) => {
            let k = parse_level(&a.k)?.support_size(a.n);
            let x = generate_signal(a.n, k, a.seed)?;
            emit(a.out.as_deref(), &x.to_text())
        }
        Command::Decode(a) => {
            let h = parse_alist(&read(&a.matrix)?)?;
            let (truth, y) = match (&a.signal, &a.y_file) {
                (Some(p), _) => {
                    let x = SparseSignal::from_text(&read(p)?)?;
                    let y = h.measure(&x.to_dense())?;
                    (Some(x), y)
                }
                (None, Some(p)) => {
                    let y = read(p)?
                        .split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("bad measurement {t:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    (None, y)
                }
                (None, None) => unreachable!("clap requires one of --signal/--y-file"),
            };
            let algorithm: Algorithm = a.algo.parse()?;
            let cfg = DecoderConfig {
                max_iter: a.max_iter,
                eq_tol: a.tol,
                seed: a.seed,
                coincidence: !a.no_coincidence,
            };
            let result = match &a.trace {
                Some(p) if p.as_os_str() == "-" => {
                    decode_observed(algorithm, &h, &y, &cfg, &mut TraceWriter::new(io::stderr()))?
                }
                Some(p) => {
                    let mut tw = TraceWriter::new(io::BufWriter::new(fs::File::create(p)?));
                    let r = decode_observed(algorithm, &h, &y, &cfg, &mut tw)?;
                    tw.into_inner().flush()?;
                    r
                }
                None => decode_observed(algorithm, &h, &y, &cfg, &mut ())?,
            };
            let mut summary = format!(
                "algorithm={algorithm} converged={} iterations={} verified={}/{}",
                result.converged,
                result.iterations,
                result.final_verified().len(),
                h.n_vars()
            );
            if let Some(x) = &truth {
                let ok = reconstruction_success(x, &result.estimate, DEFAULT_SUCCESS_TOL)?;
                summary.push_str(&format!(" success={ok}"));
            }
            eprintln!("{summary}");
            let text: String = result.estimate.iter().map(|v| format!("{v:e}\n")).collect();
            emit(a.out.as_deref(), &text)
        }
        Command::Sweep(a) => {
            let h = match &a.matrix {
                Some(p) => parse_alist(&read(p)?)?,
                None => a.spec.build(a.matrix_seed)?,
            };
            let cfg = SweepConfig {
                levels: levels(&a)?,
                algorithms: a.algos.iter().map(|s| s.parse()).collect::<Result<_>>()?,
                max_iter: a.max_iter,
                eq_tol: a.tol,
                coincidence: !a.no_coincidence,
                min_failures: a.min_failures,
                max_trials: a.max_trials,
                min_trials: a.min_trials,
                master_seed: a.seed,
                success_tol: a.success_tol,
            };
            let points = sweep(&h, &cfg)?;
            emit(a.out.as_deref(), &write_results(&points))?;
            if let Some(p) = &a.plot {
                fs::write(p, render_plot_svg(&points))?;
            }
            Ok(())
        }
        Command::Plot(a) => {
            let points = parse_results(&read(&a.input)?)?;
            fs::write(&a.out, render_plot_svg(&points))?;
            Ok(())
        }
        Command::Info { matrix } => {
            let h = parse_alist(&read(&matrix)?)?;
            println!(
                "M={} N={} edges={} max_dv={} max_dc={} four_cycles={}",
                h.n_checks(),
                h.n_vars(),
                h.n_edges(),
                h.max_var_degree(),
                h.max_check_degree(),
                h.count_4cycles()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
