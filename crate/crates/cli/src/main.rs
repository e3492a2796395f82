//! `histeq` — batch grayscale contrast enhancement.
//!
//! Subcommands: `enhance` (one method over many PGMs), `compare` (CLAHE
//! vs HKMDHE table over a corpus), `stats` (moments and split decision
//! for one image), `phantoms` (render the deterministic test corpus).
//!
//! Exit codes: 0 full success, 1 usage error, 2 when any input failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

mod imageio;

use histeq_core::metrics::measure;
use histeq_core::params::enhance;
use histeq_core::pgm::write_pgm;
use histeq_core::phantom::{default_corpus, generate, CorpusManifest, PhantomSpec};
use histeq_core::report::{summarize_by_method, write_report_csv, write_report_json, RunRecord};
use histeq_core::{
    moment_stats, select_split, EnhanceParams, GammaMode, GrayImage, Method, MmScale, OnConstant,
    PeakMode,
};

#[derive(Parser)]
#[command(name = "histeq", version, about = "Grayscale contrast enhancement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance grayscale images with one method
    Enhance(EnhanceCmd),
    /// Run CLAHE and HKMDHE over every input and print the PSNR/AMMBE table
    Compare(CompareCmd),
    /// Print moment statistics and the split decision for one image
    Stats(StatsCmd),
    /// Render the synthetic phantom corpus
    Phantoms(PhantomsCmd),
    /// Convert between PGM and PNG (extension-driven, grayscale only)
    Convert(ConvertCmd),
}

/// CLAHE tile grid in COLSxROWS form, e.g. `8x8`.
#[derive(Debug, Clone, Copy)]
struct TileGrid {
    x: u32,
    y: u32,
}

impl FromStr for TileGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s
            .split_once('x')
            .ok_or_else(|| format!("tiles must look like 8x8, got '{s}'"))?;
        let parse = |t: &str| -> Result<u32, String> {
            let n: u32 = t.parse().map_err(|_| format!("bad tile count '{t}'"))?;
            if n == 0 {
                return Err("tile counts must be at least 1".into());
            }
            Ok(n)
        };
        Ok(TileGrid {
            x: parse(x)?,
            y: parse(y)?,
        })
    }
}

/// Clip limit: a number greater than 1, or `inf` to disable clipping.
#[derive(Debug, Clone, Copy)]
struct ClipLimit(f64);

impl FromStr for ClipLimit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "inf" {
            return Ok(ClipLimit(f64::INFINITY));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("clip limit must be a number or 'inf', got '{s}'"))?;
        if v.is_nan() || v <= 1.0 {
            return Err(format!("clip limit must exceed 1, got {v}"));
        }
        Ok(ClipLimit(v))
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Hyper-kurtosis threshold selecting the split formula
    #[arg(long, default_value_t = 3.0)]
    tau: f64,

    /// Power-law exponent in [0, 1], or 'search' for the AMMBE-minimizing grid search
    #[arg(long, default_value = "0.75")]
    gamma: GammaMode,

    /// Scale convention for the modified-mean formulas: native or normalized
    #[arg(long = "mm-scale", default_value = "native")]
    mm_scale: MmScale,

    /// CLAHE tile grid as COLSxROWS
    #[arg(long, default_value = "8x8")]
    tiles: TileGrid,

    /// CLAHE clip limit as a multiple of the uniform bin height, or 'inf'
    #[arg(long, default_value = "2.0")]
    clip: ClipLimit,

    /// PSNR peak convention: max-output or fixed255
    #[arg(long = "peak-mode", default_value = "max-output")]
    peak_mode: PeakMode,

    /// Constant-image policy for the duo-histogram path: error or passthrough
    #[arg(long = "on-constant", default_value = "error")]
    on_constant: OnConstant,
}

impl ParamArgs {
    fn to_params(&self, method: Method) -> EnhanceParams {
        EnhanceParams {
            method,
            tau: self.tau,
            gamma: self.gamma,
            mm_scale: self.mm_scale,
            clahe: histeq_core::ClaheParams {
                tiles_x: self.tiles.x,
                tiles_y: self.tiles.y,
                clip_limit: self.clip.0,
            },
            peak_mode: self.peak_mode,
            on_constant: self.on_constant,
        }
    }
}

#[derive(Args)]
struct EnhanceCmd {
    /// Method to apply: he, clahe or hkmdhe
    #[arg(long)]
    method: Method,

    #[command(flatten)]
    params: ParamArgs,

    /// Directory for output images and report.json
    #[arg(short = 'o', long = "output-dir")]
    output_dir: PathBuf,

    /// Process inputs in parallel (HISTEQ_THREADS caps the pool size)
    #[arg(long)]
    parallel: bool,

    /// Input PGM files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct CompareCmd {
    #[command(flatten)]
    params: ParamArgs,

    /// Directory for report.json and report.csv
    #[arg(short = 'o', long = "output-dir", default_value = ".")]
    output_dir: PathBuf,

    /// Process inputs in parallel (HISTEQ_THREADS caps the pool size)
    #[arg(long)]
    parallel: bool,

    /// Input PGM files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct StatsCmd {
    #[command(flatten)]
    params: ParamArgs,

    /// Print the decision as JSON instead of text
    #[arg(long)]
    json: bool,

    /// Input PGM file
    input: PathBuf,
}

#[derive(Args)]
struct ConvertCmd {
    /// Source image (.pgm or .png)
    input: PathBuf,
    /// Destination image (.pgm or .png)
    output: PathBuf,
}

#[derive(Args)]
struct PhantomsCmd {
    /// Corpus manifest (JSON). Defaults to the built-in 20-phantom corpus,
    /// identical to data/phantom-corpus.json
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Directory for the rendered PGM files
    #[arg(short = 'o', long = "output-dir")]
    output_dir: PathBuf,

    /// Render phantoms in parallel (HISTEQ_THREADS caps the pool size)
    #[arg(long)]
    parallel: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Enhance(cmd) => cmd_enhance(cmd),
        Command::Compare(cmd) => cmd_compare(cmd),
        Command::Stats(cmd) => cmd_stats(cmd),
        Command::Phantoms(cmd) => cmd_phantoms(cmd),
        Command::Convert(cmd) => cmd_convert(cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn thread_cap() -> Option<usize> {
    std::env::var("HISTEQ_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over the inputs, optionally on a rayon pool capped by
/// HISTEQ_THREADS. Output order always matches input order.
fn map_inputs<I, T, F>(items: &[I], parallel: bool, f: F) -> anyhow::Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync,
{
    if parallel {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = thread_cap() {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().context("building thread pool")?;
        Ok(pool.install(|| items.par_iter().map(&f).collect()))
    } else {
        Ok(items.iter().map(f).collect())
    }
}

fn load_image(path: &Path) -> anyhow::Result<GrayImage> {
    imageio::load_gray(path)
}

fn sorted(mut inputs: Vec<PathBuf>) -> Vec<PathBuf> {
    inputs.sort();
    inputs
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// Per-file outcomes folded into the process exit code; failures are
/// listed on stderr as they are encountered.
fn finish_batch<T>(results: Vec<(PathBuf, anyhow::Result<T>)>) -> (Vec<T>, ExitCode) {
    let mut ok = Vec::new();
    let mut failures = 0usize;
    for (path, result) in results {
        match result {
            Ok(v) => ok.push(v),
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }
    let code = if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    (ok, code)
}

fn cmd_enhance(cmd: EnhanceCmd) -> anyhow::Result<ExitCode> {
    let params = cmd.params.to_params(cmd.method);
    params.gamma.validate().context("invalid gamma")?;
    std::fs::create_dir_all(&cmd.output_dir)
        .with_context(|| format!("creating {}", cmd.output_dir.display()))?;

    let inputs = sorted(cmd.inputs);
    let outcomes = map_inputs(&inputs, cmd.parallel, |path| {
        let record = enhance_one(path, &params, &cmd.output_dir);
        (path.clone(), record)
    })?;
    let (records, code) = finish_batch(outcomes);

    if !records.is_empty() {
        let report = write_report_json(&records).context("assembling report")?;
        let report_path = cmd.output_dir.join("report.json");
        std::fs::write(&report_path, report)
            .with_context(|| format!("writing {}", report_path.display()))?;
        println!(
            "enhanced {} image(s) with {}; report at {}",
            records.len(),
            params.method,
            report_path.display()
        );
    }
    Ok(code)
}

fn enhance_one(path: &Path, params: &EnhanceParams, outdir: &Path) -> anyhow::Result<RunRecord> {
    let img = load_image(path)?;
    let out = enhance(&img, params)?;
    let output_path = outdir.join(format!("{}.{}.pgm", stem_of(path), params.method));
    std::fs::write(&output_path, write_pgm(&out.image))
        .with_context(|| format!("writing {}", output_path.display()))?;

    // Metrics are best-effort for single-method runs: a constant
    // pass-through has no defined AMMBE, and that should not fail the file.
    let metrics = match measure(&img, &out.image, params) {
        Ok(m) => Some(m),
        Err(e) => {
            eprintln!("warning: {}: metrics unavailable: {e}", path.display());
            None
        }
    };
    Ok(RunRecord {
        input: path.display().to_string(),
        output: Some(output_path.display().to_string()),
        params: params.clone(),
        split: out.split,
        metrics,
        constant_passthrough: out.constant_passthrough,
        tool_version: tool_version(),
    })
}

fn cmd_compare(cmd: CompareCmd) -> anyhow::Result<ExitCode> {
    let base = cmd.params.to_params(Method::Hkmdhe);
    base.gamma.validate().context("invalid gamma")?;
    std::fs::create_dir_all(&cmd.output_dir)
        .with_context(|| format!("creating {}", cmd.output_dir.display()))?;

    let inputs = sorted(cmd.inputs);
    let outcomes = map_inputs(&inputs, cmd.parallel, |path| {
        (path.clone(), compare_one(path, &base))
    })?;
    let (pairs, code) = finish_batch(outcomes);
    let records: Vec<RunRecord> = pairs.into_iter().flatten().collect();

    if records.is_empty() {
        bail!("no input could be processed");
    }
    print_summary_table(&records);

    let json_path = cmd.output_dir.join("report.json");
    std::fs::write(&json_path, write_report_json(&records)?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    let csv_path = cmd.output_dir.join("report.csv");
    std::fs::write(&csv_path, write_report_csv(&records)?)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    println!(
        "reports at {} and {}",
        json_path.display(),
        csv_path.display()
    );
    Ok(code)
}

fn compare_one(path: &Path, base: &EnhanceParams) -> anyhow::Result<Vec<RunRecord>> {
    let img = load_image(path)?;
    let mut records = Vec::with_capacity(2);
    for method in [Method::Clahe, Method::Hkmdhe] {
        let params = EnhanceParams {
            method,
            ..base.clone()
        };
        let out = enhance(&img, &params)?;
        let metrics = measure(&img, &out.image, &params)
            .with_context(|| format!("computing metrics for {method}"))?;
        records.push(RunRecord {
            input: path.display().to_string(),
            output: None,
            params,
            split: out.split,
            metrics: Some(metrics),
            constant_passthrough: out.constant_passthrough,
            tool_version: tool_version(),
        });
    }
    Ok(records)
}

/// Two-row summary table: PSNR and AMMBE per method, cells "mean ± std"
/// (population standard deviation).
fn print_summary_table(records: &[RunRecord]) {
    let summary = summarize_by_method(records);
    if summary.is_empty() {
        return;
    }
    let mut header = format!("{:<10}", "");
    for method in summary.keys() {
        let _ = write!(header, "{method:>24}");
    }
    println!("{header}");

    let mut psnr_row = format!("{:<10}", "psnr_db");
    let mut ammbe_row = format!("{:<10}", "ammbe");
    for s in summary.values() {
        let _ = write!(psnr_row, "{:>24}", format!("{:.4} ± {:.4}", s.psnr_mean, s.psnr_std));
        let _ = write!(ammbe_row, "{:>24}", format!("{:.6} ± {:.6}", s.ammbe_mean, s.ammbe_std));
    }
    println!("{psnr_row}");
    println!("{ammbe_row}");

    if let (Some(c), Some(h)) = (summary.get("clahe"), summary.get("hkmdhe")) {
        if h.ammbe_mean > 0.0 {
            println!(
                "ammbe ratio (clahe / hkmdhe): {:.2}",
                c.ammbe_mean / h.ammbe_mean
            );
        }
        println!(
            "samples: clahe {} (excluded infinite psnr {}), hkmdhe {} (excluded infinite psnr {})",
            c.samples, c.excluded_infinite, h.samples, h.excluded_infinite
        );
    }
}

fn cmd_stats(cmd: StatsCmd) -> anyhow::Result<ExitCode> {
    let params = cmd.params.to_params(Method::Hkmdhe);
    params.gamma.validate().context("invalid gamma")?;
    let outcome = (|| -> anyhow::Result<()> {
        let img = load_image(&cmd.input)?;
        let stats = moment_stats(&img)?;
        let split = select_split(&img, &params)?;
        if cmd.json {
            let doc = serde_json::json!({
                "input": cmd.input.display().to_string(),
                "mean": stats.mean,
                "sigma": stats.sigma,
                "beta": stats.beta,
                "branch": split.branch,
                "gamma_used": split.gamma_used,
                "mm_raw": split.mm_raw,
                "split_level": split.split_level,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        } else {
            println!("input:       {}", cmd.input.display());
            println!("mean:        {:.4}", stats.mean);
            println!("sigma:       {:.4}", stats.sigma);
            println!("beta:        {:.6}", stats.beta);
            println!("branch:      {}", split.branch);
            match split.gamma_used {
                Some(g) => println!("gamma_used:  {g}"),
                None => println!("gamma_used:  -"),
            }
            println!("mm_raw:      {:.6}", split.mm_raw);
            println!("split_level: {}", split.split_level);
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => Ok(ExitCode::SUCCESS),
        Err(e) => {
            eprintln!("error: {}: {e:#}", cmd.input.display());
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_convert(cmd: ConvertCmd) -> anyhow::Result<ExitCode> {
    let img = imageio::load_gray(&cmd.input)?;
    if let Some(parent) = cmd.output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    imageio::save_gray(&cmd.output, &img)?;
    println!("{} -> {}", cmd.input.display(), cmd.output.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_phantoms(cmd: PhantomsCmd) -> anyhow::Result<ExitCode> {
    let specs: Vec<PhantomSpec> = match &cmd.manifest {
        Some(path) => {
            let bytes =
                std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let manifest = CorpusManifest::from_json(&bytes)
                .with_context(|| format!("parsing manifest {}", path.display()))?;
            manifest.phantoms
        }
        None => default_corpus(),
    };
    if specs.is_empty() {
        bail!("manifest lists no phantoms");
    }
    std::fs::create_dir_all(&cmd.output_dir)
        .with_context(|| format!("creating {}", cmd.output_dir.display()))?;

    let indexed: Vec<(usize, PhantomSpec)> = specs.into_iter().enumerate().collect();
    let outcomes = map_inputs(&indexed, cmd.parallel, |(i, spec)| {
        let path = cmd.output_dir.join(format!("phantom-{i:02}.pgm"));
        let result = generate(spec)
            .map_err(anyhow::Error::from)
            .and_then(|img| {
                std::fs::write(&path, write_pgm(&img))
                    .with_context(|| format!("writing {}", path.display()))
            });
        (path, result)
    })?;
    let total = outcomes.len();
    let (written, code) = finish_batch(outcomes);
    println!(
        "wrote {} of {} phantom(s) to {}",
        written.len(),
        total,
        cmd.output_dir.display()
    );
    Ok(code)
}
