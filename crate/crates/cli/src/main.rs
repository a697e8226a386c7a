use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use renyi_core::density::{self, DensityCoeffs, DensityMap, FixedPoint};
use renyi_core::matrix::TruncatedMatrix;
use renyi_core::measure::{self, GridMeasure};
use renyi_core::report::{self, FstarJson};
use renyi_core::simulator::{self, MeanStd, StageStats};
use renyi_core::spectral::{self, EigenCertificate};
use renyi_core::Exec;

#[derive(Parser)]
#[command(
    name = "renyi",
    version,
    about = "Certified exhaustion rate of iterated Renyi parking"
)]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Matrix(MatrixCmd),
    #[command(subcommand)]
    Spectral(SpectralCmd),
    #[command(subcommand)]
    Density(DensityCmd),
    #[command(subcommand)]
    Measure(MeasureCmd),
    #[command(subcommand)]
    Sim(SimCmd),
    /// Cross-check a certificate against density and simulation results.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// Build the truncated interval matrix.
    Build {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
        m: u64,
        #[arg(long, default_value = "1")]
        rho: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the entry midpoints as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Certify the dominant eigenvalue and the spectral gap.
    Certify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=1024))]
        m: u64,
        #[arg(long, default_value_t = spectral::DEFAULT_H as u64)]
        h: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DensityCmd {
    /// Iterate the normalized density map to its fixed point.
    Iterate {
        #[arg(long, default_value_t = density::DEFAULT_ORDER as u64,
              value_parser = clap::value_parser!(u64).range(1..=4096))]
        m: u64,
        #[arg(long, default_value = "1e-10")]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// `uniform` or a JSON file holding `{"ell": .., "a": [..]}`.
        #[arg(long, default_value = "uniform")]
        init: String,
        /// Certificate whose left eigenvector screens out orthogonal starts.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Push a point mass through the normalized measure map.
    Orbit {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = measure::DEFAULT_BINS)]
        bins: usize,
        /// Fixed density to measure against; computed when absent.
        #[arg(long)]
        fstar: Option<PathBuf>,
        /// Left end of the window used for the distance to f*.
        #[arg(long, default_value = "0.1")]
        lower: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Simulate successive parking stages.
    Run(SimRunArgs),
    /// Estimate the single-stage jamming coverage.
    Renyi {
        #[arg(long, default_value = "1e6")]
        length: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimRunArgs {
    #[arg(long, default_value = "1e6")]
    length: f64,
    #[arg(long, default_value_t = 12)]
    stages: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long)]
    fstar: Option<PathBuf>,
    /// Stage CSV from `sim run`; may be repeated.
    #[arg(long)]
    sim: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Written to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Serialize, Deserialize)]
struct StageRow {
    stage: usize,
    car_length: f64,
    gap_count: usize,
    uncovered: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct TraceCsvRow {
    stage: usize,
    #[serde(rename = "C_s")]
    c: f64,
    #[serde(rename = "R_half")]
    r_half: f64,
    sup_diff: f64,
    residual: f64,
}

#[derive(Serialize)]
struct OrbitRow {
    step: usize,
    atom_count: usize,
    total_mass: f64,
    distance_to_fstar: Option<f64>,
}

#[derive(Serialize)]
struct CoverageSummary {
    length: f64,
    seed: u64,
    coverage: MeanStd,
    samples: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match run(cli.command, exec) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RENYI_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("RENYI_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<()> {
    Ok(())
}

/// `Ok(false)` means the command ran but one of its checks failed.
fn run(command: Command, exec: Exec) -> Result<bool> {
    match command {
        Command::Matrix(MatrixCmd::Build { m, rho, out, csv }) => {
            let a = TruncatedMatrix::build_with(m as usize, rho, exec)?;
            write_json(&out, &a)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                for row in a.midpoint_rows() {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
            Ok(true)
        }
        Command::Spectral(SpectralCmd::Certify { m, h, out }) => {
            let cert = spectral::certify_with(m as usize, h as usize)?;
            write_json(&out, &cert)?;
            println!("lambda in {}", cert.lambda);
            println!("R_half in {}", cert.r_half);
            for c in cert.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {}: {}", c.name, c.detail);
            }
            Ok(cert.all_checks_pass())
        }
        Command::Density(DensityCmd::Iterate {
            m,
            tol,
            max_iter,
            init,
            cert,
            out,
            trace,
        }) => {
            if tol.is_nan() || tol <= 0.0 {
                bail!("--tol must be positive, got {tol}");
            }
            let m = m as usize;
            let f0 = if init == "uniform" {
                DensityCoeffs::uniform(m)
            } else {
                read_json::<DensityCoeffs>(Path::new(&init))?
            };
            let cert = cert
                .map(|p| read_json::<EigenCertificate>(&p))
                .transpose()?;
            let map = DensityMap::new(m)?;
            let fp = density::iterate_to_fixed(
                &map,
                &f0,
                tol,
                max_iter,
                &density::default_grid(),
                cert.as_ref().map(|c| c.w.as_slice()),
            )?;
            write_json(&out, &FstarJson::from(&fp))?;
            if let Some(path) = trace {
                write_trace(&path, &fp)?;
            }
            println!(
                "C = {}, R_half = {} after {} steps",
                fp.c,
                fp.r_half,
                fp.steps()
            );
            Ok(true)
        }
        Command::Measure(MeasureCmd::Orbit {
            x,
            steps,
            bins,
            fstar,
            lower,
            out,
        }) => {
            let fstar = match fstar {
                Some(p) => read_json::<FstarJson>(&p)?.coeffs(),
                None => default_fstar()?.fstar,
            };
            let orbit = measure::delta_orbit_with(x, steps, bins, exec)?;
            let mut w = csv::Writer::from_path(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            for (step, mu) in orbit.iter().enumerate() {
                w.serialize(OrbitRow {
                    step,
                    atom_count: mu.atoms.len(),
                    total_mass: mu.total_mass(),
                    distance_to_fstar: orbit_distance(mu, &fstar, lower),
                })?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Sim(SimCmd::Run(args)) => {
            if !(args.length > 0.0 && args.length.is_finite()) {
                bail!("--length must be positive and finite, got {}", args.length);
            }
            if args.seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let mut w = csv::Writer::from_path(&args.out)
                .with_context(|| format!("creating {}", args.out.display()))?;
            for seed in args.seed..args.seed + args.seeds {
                for s in simulator::run_stages_with(args.length, args.stages, seed, exec) {
                    w.serialize(StageRow {
                        stage: s.stage,
                        car_length: s.car_length,
                        gap_count: s.gap_count,
                        uncovered: s.uncovered,
                        ratio: s.ratio,
                    })?;
                }
            }
            w.flush()?;
            Ok(true)
        }
        Command::Sim(SimCmd::Renyi {
            length,
            trials,
            seed,
            out,
        }) => {
            if !(length > 0.0 && length.is_finite()) || trials == 0 {
                bail!("--length must be positive and --trials at least 1");
            }
            let samples = simulator::renyi_coverage(length, trials, seed, exec);
            let coverage = MeanStd::of(&samples);
            println!(
                "coverage {:.6} ± {:.6} over {} trials",
                coverage.mean, coverage.std, coverage.n
            );
            if let Some(path) = out {
                write_json(
                    &path,
                    &CoverageSummary {
                        length,
                        seed,
                        coverage,
                        samples,
                    },
                )?;
            }
            Ok(true)
        }
        Command::Report(args) => run_report(args),
    }
}

fn run_report(args: ReportArgs) -> Result<bool> {
    let cert = args
        .cert
        .as_deref()
        .map(read_json::<EigenCertificate>)
        .transpose()?;
    let fstar = args
        .fstar
        .as_deref()
        .map(read_json::<FstarJson>)
        .transpose()?;
    let mut stats = Vec::new();
    for path in &args.sim {
        stats.extend(read_stages(path)?);
    }
    let stamp = (!args.no_timestamp).then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let sim = (!args.sim.is_empty()).then_some(stats.as_slice());
    let rep = report::build_report(cert.as_ref(), fstar.as_ref(), sim, stamp)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
        Format::Markdown => rep.to_markdown(),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    match rep.verdict() {
        Ok(()) => Ok(true),
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn default_fstar() -> Result<FixedPoint> {
    let map = DensityMap::new(density::DEFAULT_ORDER)?;
    Ok(density::iterate_to_fixed(
        &map,
        &DensityCoeffs::uniform(density::DEFAULT_ORDER),
        1e-10,
        10_000,
        &density::default_grid(),
        None,
    )?)
}

fn orbit_distance(mu: &GridMeasure, fstar: &DensityCoeffs, lower: f64) -> Option<f64> {
    measure::distance_to_fstar(mu, fstar, lower).ok()
}

fn read_stages(path: &Path) -> Result<Vec<StageStats>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize::<StageRow>()
        .map(|row| {
            let row = row.with_context(|| format!("parsing {}", path.display()))?;
            Ok(StageStats {
                stage: row.stage,
                car_length: row.car_length,
                uncovered: row.uncovered,
                gap_count: row.gap_count,
                ratio: row.ratio,
            })
        })
        .collect()
}

fn write_trace(path: &Path, fp: &FixedPoint) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in &fp.history {
        w.serialize(TraceCsvRow {
            stage: r.stage,
            c: r.c,
            r_half: r.r_half,
            sup_diff: r.sup_diff,
            residual: r.residual,
        })?;
    }
    w.flush()?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(std::io::BufReader::new(f))
        .with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
