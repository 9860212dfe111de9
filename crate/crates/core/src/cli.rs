//! Batch command-line front end and on-disk result formats.
//!
//! Every experiment writes a JSON record `<stem>.json` holding the config
//! echo and the payload, plus a CSV `<stem>.csv` for grid-shaped payloads.
//! Run metadata that legitimately varies between runs (worker count, wall
//! clock, timestamp) goes to a separate `<stem>.meta.json`, so the result
//! files themselves are bit-identical for a fixed config.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::DensitySpec;
use crate::checks::{all_checks, CheckReport};
use crate::error::{Error, Result};
use crate::experiments::{
    conversion_sweep, eigen_stats, map_chunks, persistence_histogram, pi_distribution,
    rescaled_pi_distribution, ExperimentConfig, Partner, Resolved, SweepRow,
};
use crate::fitstats::{bootstrap_errors, fit_power_law, total_variation, FitPoint, PowerLawFit, Window};
use crate::persistence::{sparre_andersen_pmf, ReferenceKind};
use crate::sampling::Method;
use crate::stats::{EmpiricalDistribution, Storage};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "locc-lab", version, about = "Monte Carlo laboratory for LOCC convertibility of random pure states")]
pub struct Cli {
    /// Suppress the summary printed to stdout.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump normalized spectra, one per row.
    Sample {
        #[command(flatten)]
        size: Size,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Estimate P(x ≺ y) over grids of n and m (or c).
    ConvertProb {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', conflicts_with = "c", required_unless_present = "c")]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Empirical distribution of Π, or of the rescaled deficit with --rescale.
    Distribution {
        #[command(flatten)]
        size: Size,
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Occupation-time histogram of the majorization bridge.
    Persistence {
        #[command(flatten)]
        size: Size,
        /// Keep both spectra in decreasing order (the default is a random order).
        #[arg(long)]
        ordered: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Moments of every ordered eigenvalue.
    Eigstats {
        #[command(flatten)]
        size: Size,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Power-law fit p̂ ≈ b·n^(-θ) of a convert-prob CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Fit the last K points.
        #[arg(long, default_value_t = 4)]
        window: usize,
        /// Fit every point, ignoring --window.
        #[arg(long)]
        all: bool,
        /// Parametric bootstrap replicates for the error bars (0 = off).
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a closed-form density on a grid.
    Exact {
        #[arg(long, value_enum)]
        density: DensityName,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the statistical validation suite.
    Validate {
        /// Multiplier on every sample size; smaller is faster and noisier.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Run only these criteria (1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        /// Added to every default seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Size {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "c", required_unless_present = "c")]
    pub m: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads: 0 = all available, 1 = sequential.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Sample through the dense Gaussian matrix instead (small n only).
    #[arg(long)]
    pub dense_oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityName {
    Q2m,
    Fcont,
    Fmin,
    Mp,
}

impl RunArgs {
    fn config(&self, n: usize, m: Option<usize>, c: Option<f64>) -> ExperimentConfig {
        ExperimentConfig {
            n,
            m,
            c,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            bins: self.bins,
            method: if self.dense_oracle { Method::Dense } else { Method::Tridiagonal },
        }
    }
}

/// Reproducible part of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub c: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub method: Method,
    pub version: String,
}

impl ConfigEcho {
    fn single(r: &Resolved, bins: usize) -> Self {
        Self {
            n: vec![r.n],
            m: vec![r.m],
            c: vec![r.c()],
            samples: r.samples,
            seed: r.seed,
            bins,
            method: r.method,
            version: VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord<P> {
    pub experiment: String,
    pub config: ConfigEcho,
    pub payload: P,
}

/// Per-run details that are not part of the reproducible result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub experiment: String,
    pub workers: usize,
    pub wall_clock_s: f64,
    pub timestamp_unix: u64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionPayload {
    pub rescaled: bool,
    pub scale_factor: Option<f64>,
    pub count: u64,
    pub atom_location: Option<f64>,
    pub atom_count: u64,
    pub atom_mass: f64,
    pub atom_stderr: f64,
    pub mean: f64,
    pub stderr_mean: f64,
    pub histogram_lo: f64,
    pub histogram_hi: f64,
    /// Continuous part only; the atom is reported separately.
    pub histogram: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencePayload {
    pub ordered: bool,
    pub counts: Vec<u64>,
    /// Distance to the uniform law on {1, …, n}, for unordered bridges.
    pub tv_to_uniform: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigstatsRow {
    pub k: usize,
    pub mean: f64,
    pub stderr_mean: f64,
    pub variance: f64,
    pub stderr_variance: f64,
    pub relative_fluctuation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPayload {
    pub input: String,
    pub fit: PowerLawFit,
    pub bootstrap: Option<BootstrapErrors>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapErrors {
    pub replicates: usize,
    pub seed: u64,
    pub theta_err: f64,
    pub b_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub x: f64,
    pub density: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{}", e.render());
            Ok(())
        }
        Err(e) => Err(Error::Usage(e.render().to_string())),
    }
}

/// Process exit status for an outcome of [`run`].
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(Error::Usage(_) | Error::InvalidParameter(_) | Error::InvalidInput(_)) => 2,
        Err(e) if e.is_numerical() => 3,
        Err(_) => 1,
    }
}

/// Machine-readable record of a numerical failure.
pub fn diagnostic(err: &Error, args: &[String]) -> String {
    serde_json::json!({
        "error": "numerical_failure",
        "message": err.to_string(),
        "args": args,
        "version": VERSION,
    })
    .to_string()
}

pub fn execute(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    let say = |s: &str| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.command {
        Command::Sample { size, run } => {
            let cfg = run.config(size.n, size.m, size.c);
            let r = cfg.resolve()?;
            let spectra = map_chunks(&r, |chunk| {
                let mut rows = Vec::with_capacity(chunk.len);
                for _ in 0..chunk.len {
                    rows.push(chunk.spectrum()?.into_vec());
                }
                Ok(rows)
            })?;
            let stem = stem("sample", &[r.n], &Partner::M(r.m), r.samples, r.seed);
            let mut csv = header((1..=r.n).map(|k| format!("lambda_{k}")));
            for row in spectra.iter().flatten() {
                push_row(&mut csv, row);
            }
            let record = ResultRecord {
                experiment: "sample".into(),
                config: ConfigEcho::single(&r, run.bins),
                payload: serde_json::json!({ "csv": format!("{stem}.csv"), "rows": r.samples }),
            };
            let files = write_outputs(&run.out, &stem, &record, Some(&csv))?;
            write_meta(&run.out, &stem, "sample", run.workers, start, files)?;
            say(&format!("wrote {} spectra of length {} to {}", r.samples, r.n, run.out.join(format!("{stem}.csv")).display()));
        }
        Command::ConvertProb { n, m, c, run } => {
            let partners: Vec<Partner> =
                if c.is_empty() { m.iter().map(|&m| Partner::M(m)).collect() } else { c.iter().map(|&c| Partner::C(c)).collect() };
            let base = run.config(n[0], None, Some(1.0));
            let rows = conversion_sweep(&base, n, &partners)?;
            let partner_tag = if c.is_empty() { list_tag("m", m) } else { list_tag("c", c) };
            let stem = format!("convert-prob-{}-{partner_tag}-M{}-s{}", list_tag("n", n), run.samples, run.seed);
            let mut csv = header(["n", "m", "c", "samples", "successes", "p_hat", "stderr"].map(String::from));
            for row in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    row.n,
                    row.m,
                    float(row.c),
                    row.samples,
                    row.successes,
                    float(row.p_hat),
                    float(row.stderr)
                );
            }
            let record = ResultRecord {
                experiment: "convert-prob".into(),
                config: ConfigEcho {
                    n: n.clone(),
                    m: m.clone(),
                    c: c.clone(),
                    samples: run.samples,
                    seed: run.seed,
                    bins: run.bins,
                    method: base.method,
                    version: VERSION.into(),
                },
                payload: rows.clone(),
            };
            let files = write_outputs(&run.out, &stem, &record, Some(&csv))?;
            write_meta(&run.out, &stem, "convert-prob", run.workers, start, files)?;
            for row in &rows {
                say(&serde_json::to_string(row)?);
            }
        }
        Command::Distribution { size, rescale, run } => {
            let cfg = run.config(size.n, size.m, size.c);
            let r = cfg.resolve()?;
            let (dist, factor) = if *rescale {
                (rescaled_pi_distribution(&cfg)?, Some(crate::analytic::scaling_factor(r.n, r.c())?))
            } else {
                (pi_distribution(&cfg)?, None)
            };
            let name = if *rescale { "distribution-rescaled" } else { "distribution" };
            let stem = stem(name, &[r.n], &Partner::M(r.m), r.samples, r.seed);
            let (lo, hi) = match (factor, dist.sorted_samples()) {
                (None, _) => (0.0, 1.0),
                (Some(_), Some(v)) => (0.0, v.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE)),
                (Some(_), None) => match dist.storage() {
                    Storage::Histogram { hi, .. } => (0.0, *hi),
                    Storage::Sorted(_) => unreachable!(),
                },
            };
            let payload = distribution_payload(&dist, *rescale, factor, lo, hi, run.bins);
            let csv = ecdf_csv(&dist);
            let record = ResultRecord { experiment: name.into(), config: ConfigEcho::single(&r, run.bins), payload };
            let files = write_outputs(&run.out, &stem, &record, Some(&csv))?;
            write_meta(&run.out, &stem, name, run.workers, start, files)?;
            say(&format!(
                "{name}: atom mass {:.6} ± {:.6}, mean {:.6} ± {:.6}",
                record.payload.atom_mass, record.payload.atom_stderr, record.payload.mean, record.payload.stderr_mean
            ));
        }
        Command::Persistence { size, ordered, run } => {
            let cfg = run.config(size.n, size.m, size.c);
            let r = cfg.resolve()?;
            let hist = persistence_histogram(&cfg, *ordered)?;
            let pmf = hist.pmf();
            let tv = if *ordered { None } else { Some(total_variation(&pmf, &sparre_andersen_pmf(r.n, ReferenceKind::Bridge)?)) };
            let name = if *ordered { "persistence-ordered" } else { "persistence" };
            let stem = stem(name, &[r.n], &Partner::M(r.m), r.samples, r.seed);
            let mut csv = header(["k", "count", "pmf"].map(String::from));
            for (k, (&count, &p)) in hist.counts.iter().zip(&pmf).enumerate() {
                let _ = writeln!(csv, "{k},{count},{}", float(p));
            }
            let record = ResultRecord {
                experiment: name.into(),
                config: ConfigEcho::single(&r, run.bins),
                payload: PersistencePayload { ordered: *ordered, counts: hist.counts.clone(), tv_to_uniform: tv },
            };
            let files = write_outputs(&run.out, &stem, &record, Some(&csv))?;
            write_meta(&run.out, &stem, name, run.workers, start, files)?;
            say(&format!("{name}: P(N = n) = {:.6}, P(N = 0) = {:.6}", pmf[r.n], pmf[0]));
        }
        Command::Eigstats { size, run } => {
            let cfg = run.config(size.n, size.m, size.c);
            let r = cfg.resolve()?;
            let stats = eigen_stats(&cfg)?;
            let rows: Vec<EigstatsRow> = stats
                .moments
                .iter()
                .enumerate()
                .map(|(i, mom)| EigstatsRow {
                    k: i + 1,
                    mean: mom.mean(),
                    stderr_mean: mom.stderr_mean(),
                    variance: mom.variance(),
                    stderr_variance: mom.stderr_variance(),
                    relative_fluctuation: mom.relative_fluctuation(),
                })
                .collect();
            let stem = stem("eigstats", &[r.n], &Partner::M(r.m), r.samples, r.seed);
            let mut csv = header(
                ["k", "mean", "stderr_mean", "variance", "stderr_variance", "relative_fluctuation"].map(String::from),
            );
            for row in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    row.k,
                    float(row.mean),
                    float(row.stderr_mean),
                    float(row.variance),
                    float(row.stderr_variance),
                    float(row.relative_fluctuation)
                );
            }
            let record = ResultRecord { experiment: "eigstats".into(), config: ConfigEcho::single(&r, run.bins), payload: rows };
            let files = write_outputs(&run.out, &stem, &record, Some(&csv))?;
            write_meta(&run.out, &stem, "eigstats", run.workers, start, files)?;
            let last = record.payload.last().expect("n >= 1");
            say(&format!("eigstats: smallest eigenvalue mean {:.6e}, variance {:.6e}", last.mean, last.variance));
        }
        Command::Fit { input, window, all, bootstrap, seed, out } => {
            let points = read_fit_points(input)?;
            let window = if *all { Window::All } else { Window::Last(*window) };
            let fit = fit_power_law(&points, window)?;
            let boot = if *bootstrap > 0 {
                let (theta_err, b_err) = bootstrap_errors(&points, window, *bootstrap, *seed)?;
                Some(BootstrapErrors { replicates: *bootstrap, seed: *seed, theta_err, b_err })
            } else {
                None
            };
            let payload = FitPayload { input: input.display().to_string(), fit, bootstrap: boot };
            let json = serde_json::to_string_pretty(&payload)?;
            if let Some(dir) = out {
                let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("fit-{stem}.json")), format!("{json}\n"))?;
            }
            say(&json);
        }
        Command::Exact { density, m, n, c, grid, out } => {
            let spec = density_spec(*density, *m, *n, *c)?;
            let rows = grid
                .iter()
                .map(|&x| spec.eval(x).map(|density| ExactRow { x, density }))
                .collect::<Result<Vec<_>>>()?;
            let mut csv = header(["x", "density"].map(String::from));
            for row in &rows {
                let _ = writeln!(csv, "{},{}", float(row.x), float(row.density));
            }
            if let Some(dir) = out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{}.csv", exact_stem(&spec))), &csv)?;
            }
            say(csv.trim_end());
        }
        Command::Validate { scale, only, seed } => {
            if !(*scale > 0.0 && scale.is_finite()) {
                return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
            }
            let mut failed = 0;
            for (id, check, default_seed) in all_checks() {
                if !only.is_empty() && !only.contains(&id) {
                    continue;
                }
                let report: CheckReport = check(*scale, default_seed + seed)?;
                if !report.passed {
                    failed += 1;
                }
                say(&report.to_string());
            }
            if failed > 0 {
                return Err(Error::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn density_spec(name: DensityName, m: Option<u32>, n: Option<u32>, c: Option<f64>) -> Result<DensitySpec> {
    let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| Error::Usage(format!("--density {name:?} needs --{flag}")));
    Ok(match name {
        DensityName::Q2m => DensitySpec::Q2m { m: need(m, "m")? },
        DensityName::Fcont => DensitySpec::Fcont2m { m: need(m, "m")? },
        DensityName::Fmin => DensitySpec::FminBalanced { n: need(n, "n")? },
        DensityName::Mp => DensitySpec::MarchenkoPastur { c: c.ok_or_else(|| Error::Usage("--density mp needs --c".into()))? },
    })
}

fn exact_stem(spec: &DensitySpec) -> String {
    match spec {
        DensitySpec::Q2m { m } => format!("exact-q2m-m{m}"),
        DensitySpec::Fcont2m { m } => format!("exact-fcont-m{m}"),
        DensitySpec::FminBalanced { n } => format!("exact-fmin-n{n}"),
        DensitySpec::MarchenkoPastur { c } => format!("exact-mp-c{c}"),
    }
}

/// `<name>-n<n>-m<m>-M<samples>-s<seed>`.
fn stem(name: &str, n: &[usize], partner: &Partner, samples: usize, seed: u64) -> String {
    let partner = match partner {
        Partner::M(m) => format!("m{m}"),
        Partner::C(c) => format!("c{c}"),
    };
    format!("{name}-{}-{partner}-M{samples}-s{seed}", list_tag("n", n))
}

fn list_tag<T: std::fmt::Display>(flag: &str, values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("{flag}{}", parts.join("_"))
}

/// Seventeen significant digits: enough to round-trip any f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(cols: impl IntoIterator<Item = String>) -> String {
    let cols: Vec<String> = cols.into_iter().collect();
    format!("{}\n", cols.join(","))
}

fn push_row(csv: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
    csv.push_str(&cells.join(","));
    csv.push('\n');
}

fn distribution_payload(
    dist: &EmpiricalDistribution,
    rescaled: bool,
    factor: Option<f64>,
    lo: f64,
    hi: f64,
    bins: usize,
) -> DistributionPayload {
    let histogram = match dist.continuous_samples() {
        Some(v) => crate::stats::bin_counts(&v, lo, hi, bins),
        None => dist.histogram(lo, hi, bins).unwrap_or_default(),
    };
    DistributionPayload {
        rescaled,
        scale_factor: factor,
        count: dist.count(),
        atom_location: dist.atom_location(),
        atom_count: dist.atom_count(),
        atom_mass: dist.atom_mass(),
        atom_stderr: dist.atom_stderr(),
        mean: dist.mean(),
        stderr_mean: dist.stderr_mean(),
        histogram_lo: lo,
        histogram_hi: hi,
        histogram,
    }
}

/// `value,ecdf` at every distinct sample (or bin edge when binned).
fn ecdf_csv(dist: &EmpiricalDistribution) -> String {
    let mut csv = header(["value", "ecdf"].map(String::from));
    let total = dist.count() as f64;
    match dist.storage() {
        Storage::Sorted(v) => {
            for (i, &x) in v.iter().enumerate() {
                if v.get(i + 1) == Some(&x) {
                    continue;
                }
                let _ = writeln!(csv, "{},{}", float(x), float((i + 1) as f64 / total));
            }
        }
        Storage::Histogram { lo, hi, counts } => {
            let width = (hi - lo) / counts.len() as f64;
            let mut acc = 0u64;
            for (i, &c) in counts.iter().enumerate() {
                acc += c;
                let _ = writeln!(csv, "{},{}", float(lo + (i + 1) as f64 * width), float(acc as f64 / total));
            }
        }
    }
    csv
}

fn write_outputs<P: Serialize>(dir: &Path, stem: &str, record: &P, csv: Option<&str>) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![format!("{stem}.json")];
    fs::write(dir.join(&files[0]), format!("{}\n", serde_json::to_string_pretty(record)?))?;
    if let Some(csv) = csv {
        files.push(format!("{stem}.csv"));
        fs::write(dir.join(&files[1]), csv)?;
    }
    Ok(files)
}

fn write_meta(dir: &Path, stem: &str, experiment: &str, workers: usize, start: Instant, files: Vec<String>) -> Result<()> {
    let meta = RunMeta {
        experiment: experiment.into(),
        workers,
        wall_clock_s: start.elapsed().as_secs_f64(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        files,
    };
    fs::write(dir.join(format!("{stem}.meta.json")), format!("{}\n", serde_json::to_string_pretty(&meta)?))?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct FitRow {
    n: f64,
    p_hat: f64,
    stderr: f64,
}

/// Reads `n`, `p_hat`, `stderr` columns by name; other columns are ignored.
pub fn read_fit_points(path: &Path) -> Result<Vec<FitPoint>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut points = Vec::new();
    for row in reader.deserialize() {
        let row: FitRow = row?;
        points.push(FitPoint::new(row.n, row.p_hat, row.stderr));
    }
    Ok(points)
}

/// Reads a convert-prob CSV back into sweep rows.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}
