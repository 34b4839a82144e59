//! The `cuntz` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 I/O error, 4 a
//! verification suite that ran but did not pass.

pub mod suites;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Number, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::disk::{bergman_model, szego_model};
use crate::halfplane::{HerglotzModel, DEFAULT_HARDY_TERMS};
use crate::julia::julia_model;
use crate::kernel::{KernelValue, TruncationPolicy};
use crate::render::{render_basin, render_basin_with_threads, ColorMode, Rect};
use crate::{Complex64, ComplexPoint, Error};
use suites::{run_suite, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cuntz", version, about = "Product kernels, Cuntz relations and basin rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a kernel at one pair of points.
    KernelEval(KernelEvalArgs),
    /// Run a seeded verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Render the basin of 0 for z^4 - 2z^2 as PGM/PPM.
    JuliaRender(RenderArgs),
}

#[derive(Debug, Args)]
struct TruncationArgs {
    /// Maximum number of product factors.
    #[arg(long)]
    nmax: Option<usize>,
    /// Certified tail tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl TruncationArgs {
    fn policy(&self) -> Result<TruncationPolicy, Error> {
        let d = TruncationPolicy::default();
        TruncationPolicy::new(
            self.nmax.unwrap_or(d.max_factors),
            self.tol.unwrap_or(d.tail_tolerance),
        )
    }
}

#[derive(Debug, Args)]
struct KernelEvalArgs {
    /// julia, szego, bergman or lphi (the latter with phi(z) = 1/z).
    #[arg(long)]
    model: String,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    z: ComplexPoint,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    w: ComplexPoint,
    #[command(flatten)]
    truncation: TruncationArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    samples: Option<usize>,
    /// Word length for the onb suite.
    #[arg(long, default_value_t = 5)]
    depth: usize,
    /// Hardy terms for the paris suite.
    #[arg(long, default_value_t = DEFAULT_HARDY_TERMS)]
    hardy_terms: usize,
    /// CSV file with header "re,im".
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    truncation: TruncationArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// re_min,re_max,im_min,im_max
    #[arg(long, allow_hyphen_values = true, default_value = "-2,2,-2,2")]
    rect: String,
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// status, depth or kernel.
    #[arg(long, default_value = "status")]
    color: String,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    truncation: TruncationArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Lib(Error::InvalidParameter(_) | Error::IndexOutOfRange { .. }) => EXIT_USAGE,
            Failure::Lib(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

fn parse_point(s: &str) -> Result<ComplexPoint, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate {t:?}: {e}"))
    };
    let z = Complex64::new(parse(re)?, parse(im)?);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite point {s:?}"));
    }
    Ok(z)
}

fn parse_rect(s: &str) -> Result<Rect, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("bad --rect {s:?}: {e}")))?;
    match parts[..] {
        [a, b, c, d] => Ok(Rect::new(a, b, c, d)?),
        _ => Err(Failure::Usage(format!("--rect needs four numbers, got {s:?}"))),
    }
}

/// Points file: CSV with header `re,im`.
pub fn read_points(path: &Path) -> Result<Vec<ComplexPoint>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    if headers.len() != 2 || &headers[0] != "re" || &headers[1] != "im" {
        return Err(format!("{}: header must be \"re,im\"", path.display()));
    }
    reader
        .deserialize::<(f64, f64)>()
        .map(|row| {
            let (re, im) = row.map_err(|e| e.to_string())?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

/// 17 significant digits; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}"))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn complex(z: Complex64) -> Value {
    json!({ "re": number(z.re), "im": number(z.im) })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn kernel_eval(args: &KernelEvalArgs, argv: &[String]) -> Result<i32, Failure> {
    let start = Instant::now();
    let policy = args.truncation.policy()?;
    let (z, w) = (args.z, args.w);
    let value = match args.model.as_str() {
        "julia" => julia_model(policy).eval_kernel(z, w)?,
        "szego" => szego_model(policy).eval_kernel(z, w)?,
        "bergman" => bergman_model(policy).eval_kernel(z, w)?,
        "lphi" => {
            let phi = HerglotzModel::reciprocal();
            KernelValue {
                value: phi.lphi_kernel(z, w)?,
                factors_used: phi.count(),
                tail_bound: 0.0,
                zero_factor: None,
            }
        }
        other => return Err(Failure::Usage(format!("unknown model {other:?}"))),
    };
    let report = json!({
        "command": argv.join(" "),
        "model": args.model,
        "z": complex(z),
        "w": complex(w),
        "value": complex(value.value),
        "factors_used": value.factors_used,
        "tail_bound": number(value.tail_bound),
        "zero_factor": value.zero_factor,
        "wall_time_ms": number(start.elapsed().as_secs_f64() * 1e3),
    });
    emit(&format!("{:.16e} {:.16e}", value.value.re, value.value.im), None)?;
    emit(&report.to_string(), None)?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs, argv: &[String]) -> Result<i32, Failure> {
    let start = Instant::now();
    let suite = Suite::from_str(&args.suite).map_err(|e| Failure::Usage(e.to_string()))?;
    let points = match &args.points {
        Some(path) => {
            let file_exists = path.is_file();
            Some(read_points(path).map_err(|m| if file_exists { Failure::Usage(m) } else { Failure::Io(m) })?)
        }
        None => None,
    };
    let cfg = SuiteConfig {
        suite,
        model: args.model.clone(),
        seed: args.seed,
        samples: args.samples,
        depth: args.depth,
        hardy_terms: args.hardy_terms,
        points,
        truncation: args.truncation.policy()?,
    };
    let outcome = run_suite(&cfg)?;
    let mut residuals = Map::new();
    for r in &outcome.residuals {
        residuals.insert(
            r.name.clone(),
            json!({ "max": number(r.max), "tolerance": number(r.tolerance), "pass": r.pass() }),
        );
    }
    let pass = outcome.pass();
    let report = json!({
        "command": argv.join(" "),
        "model": outcome.model,
        "parameters": {
            "suite": suite.name(),
            "seed": cfg.seed,
            "samples": cfg.points.as_ref().map_or(cfg.sample_count(), Vec::len),
            "depth": cfg.depth,
            "hardy_terms": cfg.hardy_terms,
            "nmax": cfg.truncation.max_factors,
            "tol": number(cfg.truncation.tail_tolerance),
            "points_file": args.points.as_ref().map(|p| p.display().to_string()),
        },
        "residuals": residuals,
        "pass": pass,
        "expected_negative": outcome.expected_negative,
        "wall_time_ms": number(start.elapsed().as_secs_f64() * 1e3),
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
    emit(&text, args.out.as_deref())?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

fn julia_render(args: &RenderArgs, argv: &[String]) -> Result<i32, Failure> {
    let start = Instant::now();
    let rect = parse_rect(&args.rect)?;
    let mode = ColorMode::from_str(&args.color).map_err(|e| Failure::Usage(e.to_string()))?;
    let model = julia_model(args.truncation.policy()?);
    let image = match args.threads {
        Some(t) => render_basin_with_threads(&model, rect, args.width, args.height, args.max_iter, mode, t)?,
        None => render_basin(&model, rect, args.width, args.height, args.max_iter, mode)?,
    };
    std::fs::write(&args.out, image.encode())
        .map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
    let report = json!({
        "command": argv.join(" "),
        "model": "julia",
        "out": args.out.display().to_string(),
        "width": image.width,
        "height": image.height,
        "color": mode,
        "unresolved_fraction": number(image.unresolved_fraction()),
        "wall_time_ms": number(start.elapsed().as_secs_f64() * 1e3),
    });
    emit(&report.to_string(), None)?;
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::KernelEval(a) => kernel_eval(a, &argv),
        Command::Verify(a) => verify(a, &argv),
        Command::JuliaRender(a) => julia_render(a, &argv),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
