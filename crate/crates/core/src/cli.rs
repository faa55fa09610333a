//! Command-line driver: verification suites, alpha sweeps, and the
//! counter-example demonstration, emitting CSV/JSON artifacts with stable
//! exit codes (0 success, 1 verification failure, 2 configuration error).
//!
//! Output is deterministic: identical configurations produce byte-identical
//! files. Floats are written with 17 significant digits so every double
//! round-trips exactly.

use crate::error::Result as CoreResult;
use crate::fourier_verify;
use crate::funcspace::{atom_a1, atom_a2, StepFunction};
use crate::hardy::{self, DilationGrid, Verdict};
use crate::operator::{self, OperatorInstance};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bifrac",
    about = "Numerical verification toolkit for the bilinear fractional integral operator",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the closed-form kernel transform by distributional pairing
    /// against Gaussian test functions.
    VerifyTransform(TransformArgs),
    /// Check the spatial integral identity by three independent routes.
    VerifyIdentity(IdentityArgs),
    /// Sweep the counter-example value over alpha and demonstrate the
    /// divergent maximal-function norm.
    Counterexample(CounterexampleArgs),
    /// Sample the operator output on an x grid.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Alpha values, as `start:stop:step` or a comma list.
    #[arg(long, default_value = "0.2,0.5,0.8")]
    pub alpha_grid: String,
    /// Relative tolerance each pairing case must meet.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Report path.
    #[arg(long, default_value = "transform_report.json")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Halve the singular constant before running (must make the suite fail).
    #[arg(long, hide = true)]
    pub corrupt_singular_constant: bool,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    /// Alpha values, as `start:stop:step` or a comma list.
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub alpha_grid: String,
    /// Increasing truncation radii; the largest two drive the extrapolation.
    #[arg(long, default_value = "8,16,32,64,128,256,512,1024")]
    pub radii: String,
    /// Relative tolerance for the pairwise route agreement.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value = "identity.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// Alpha values, as `start:stop:step` or a comma list.
    #[arg(long, default_value = "0.01:0.99:0.01")]
    pub alpha_grid: String,
    /// Threshold the closed-form value must exceed in absolute value.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Alphas for which the maximal-function divergence report is computed
    /// (comma list; empty string skips the reports).
    #[arg(long, default_value = "0.5")]
    pub divergence_alphas: String,
    /// Increasing truncation radii for the divergence reports.
    #[arg(long, default_value = "8,16,32,64,128,256")]
    pub radii: String,
    #[arg(long, default_value = "counterexample.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// The two operator inputs: built-in names (a1, a2), `box:c,d`, or paths
    /// to step-function JSON files, comma separated.
    #[arg(long, default_value = "a1,a2")]
    pub atoms: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Sample window as `min:max`.
    #[arg(long, default_value = "-8:8")]
    pub x_range: String,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.0625)]
    pub step: f64,
    #[arg(long, default_value = "eval.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

/// Errors carrying their CLI exit code.
#[derive(Debug)]
pub enum CmdError {
    Config(String),
    Failed(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => EXIT_CONFIG_ERROR,
            CmdError::Failed(_) => EXIT_VERIFICATION_FAILED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Config(m) | CmdError::Failed(m) => m,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CmdError> {
    Err(CmdError::Config(msg.into()))
}

fn io_err(e: std::io::Error, path: &Path) -> CmdError {
    CmdError::Failed(format!("io error on {}: {e}", path.display()))
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::VerifyTransform(args) => cmd_verify_transform(args, cli.quiet),
        Command::VerifyIdentity(args) => cmd_verify_identity(args, cli.quiet),
        Command::Counterexample(args) => cmd_counterexample(args, cli.quiet),
        Command::Eval(args) => cmd_eval(args, cli.quiet),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFICATION_FAILED,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// configuration parsing
// ---------------------------------------------------------------------------

/// Parse `start:stop:step` or a comma list into a float vector.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CmdError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return config_err(format!("expected start:stop:step, got `{text}`"));
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| CmdError::Config(format!("bad grid `{text}`: {e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return config_err(format!("bad grid `{text}`: need stop >= start, step > 0"));
        }
        let n = ((stop - start) / step).round() as usize;
        let mut grid = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let v = start + step * i as f64;
            if v <= stop + 1e-12 * step {
                grid.push(v);
            }
        }
        Ok(grid)
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| CmdError::Config(format!("bad number `{p}`: {e}")))
            })
            .collect()
    }
}

fn parse_alpha_grid(text: &str) -> Result<Vec<f64>, CmdError> {
    let grid = parse_grid(text)?;
    if grid.is_empty() {
        return config_err("alpha grid is empty");
    }
    for &a in &grid {
        if !(a > 0.0 && a < 1.0) {
            return config_err(format!("alpha {a} outside the open interval (0, 1)"));
        }
    }
    Ok(grid)
}

fn parse_radii(text: &str) -> Result<Vec<f64>, CmdError> {
    let radii = parse_grid(text)?;
    if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 {
        return config_err("radii must be at least two increasing positive values");
    }
    Ok(radii)
}

/// Resolve an atom argument: built-in registry (`a1`, `a2`, `box:c,d`) or a
/// step-function JSON file path.
pub fn parse_atom(text: &str) -> Result<StepFunction, CmdError> {
    let text = text.trim();
    match text {
        "a1" => return Ok(atom_a1()),
        "a2" => return Ok(atom_a2()),
        _ => {}
    }
    if let Some(body) = text.strip_prefix("box:") {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 2 {
            return config_err(format!("expected box:c,d, got `{text}`"));
        }
        let c = parts[0].trim().parse::<f64>();
        let d = parts[1].trim().parse::<f64>();
        return match (c, d) {
            (Ok(c), Ok(d)) => crate::funcspace::indicator(c, d)
                .map_err(|e| CmdError::Config(format!("bad box `{text}`: {e}"))),
            _ => config_err(format!("bad box bounds in `{text}`")),
        };
    }
    let raw = std::fs::read_to_string(text)
        .map_err(|e| CmdError::Config(format!("cannot read atom file `{text}`: {e}")))?;
    serde_json::from_str(&raw).map_err(|e| CmdError::Config(format!("bad atom json `{text}`: {e}")))
}

fn require_tol(tol: f64) -> Result<(), CmdError> {
    if !(tol > 0.0) {
        return config_err(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// deterministic emission
// ---------------------------------------------------------------------------

/// 17 significant digits: round-trip exact for every finite double.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CmdError> {
    let mut text = String::new();
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    std::fs::write(path, text).map_err(|e| io_err(e, path))
}

fn write_json_rows(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CmdError> {
    // numbers were already formatted; emit them as JSON strings so the file
    // stays byte-deterministic and lossless
    let objects: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let mut map = serde_json::Map::new();
            for (key, value) in header.iter().zip(row.iter()) {
                map.insert((*key).to_string(), serde_json::Value::String(value.clone()));
            }
            serde_json::Value::Object(map)
        })
        .collect();
    let text = serde_json::to_string_pretty(&objects)
        .map_err(|e| CmdError::Failed(format!("json encoding failed: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(e, path))
}

fn write_rows(
    path: &Path,
    format: OutputFormat,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CmdError> {
    match format {
        OutputFormat::Csv => write_csv(path, header, rows),
        OutputFormat::Json => write_json_rows(path, header, rows),
    }
}

fn sidecar(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

fn cmd_verify_transform(args: &TransformArgs, quiet: bool) -> Result<bool, CmdError> {
    let alphas = parse_alpha_grid(&args.alpha_grid)?;
    require_tol(args.tol)?;
    let cases = fourier_verify::default_suite(&alphas)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let scale = if args.corrupt_singular_constant { 0.5 } else { 1.0 };
    let report = fourier_verify::verify_fourier_pairing_scaled(&cases, args.tol, scale)
        .map_err(|e| CmdError::Failed(e.to_string()))?;

    match args.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CmdError::Failed(format!("json encoding failed: {e}")))?;
            std::fs::write(&args.out, text + "\n").map_err(|e| io_err(e, &args.out))?;
        }
        OutputFormat::Csv => {
            let header = [
                "s", "t", "alpha", "phi_id", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err",
                "rel_err", "pass",
            ];
            let rows: Vec<Vec<String>> = report
                .cases
                .iter()
                .map(|c| {
                    vec![
                        format_float(c.s),
                        format_float(c.t),
                        format_float(c.alpha),
                        c.phi_id.clone(),
                        format_float(c.lhs[0]),
                        format_float(c.lhs[1]),
                        format_float(c.rhs[0]),
                        format_float(c.rhs[1]),
                        format_float(c.abs_err),
                        format_float(c.rel_err),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            write_rows(&args.out, OutputFormat::Csv, &header, &rows)?;
        }
    }
    if !quiet {
        println!(
            "verify-transform: {} cases, max rel err {:.3e} -> {}",
            report.cases.len(),
            report.max_rel_err,
            if report.pass { "PASS" } else { "FAIL" }
        );
        println!("wrote {}", args.out.display());
    }
    Ok(report.pass)
}

fn cmd_verify_identity(args: &IdentityArgs, quiet: bool) -> Result<bool, CmdError> {
    let alphas = parse_alpha_grid(&args.alpha_grid)?;
    let radii = parse_radii(&args.radii)?;
    require_tol(args.tol)?;
    let base_radius = radii[radii.len() - 2];

    let compute = |alpha: f64| -> CoreResult<(f64, f64, f64)> {
        let op = OperatorInstance::new(atom_a1(), atom_a2(), alpha)?;
        let rhs = operator::integral_identity_rhs(&op)?;
        let truncated = operator::operator_integral_extrapolated(&op, base_radius)?;
        let mollified = fourier_verify::mollified_limit(&op, 1e-10)?;
        Ok((rhs, truncated, mollified))
    };

    use rayon::prelude::*;
    let results: Vec<(f64, CoreResult<(f64, f64, f64)>)> = alphas
        .par_iter()
        .map(|alpha| (*alpha, compute(*alpha)))
        .collect();

    let header = [
        "alpha",
        "rhs_closed",
        "lhs_truncated",
        "lhs_mollified",
        "relerr_1",
        "relerr_2",
    ];
    let mut rows = Vec::new();
    let mut all_within = true;
    for (alpha, outcome) in results {
        let (rhs, truncated, mollified) =
            outcome.map_err(|e| CmdError::Failed(format!("alpha {alpha}: {e}")))?;
        let relerr_1 = ((truncated - rhs) / rhs).abs();
        let relerr_2 = ((mollified - rhs) / rhs).abs();
        all_within &= relerr_1 <= args.tol && relerr_2 <= args.tol;
        rows.push(vec![
            format_float(alpha),
            format_float(rhs),
            format_float(truncated),
            format_float(mollified),
            format_float(relerr_1),
            format_float(relerr_2),
        ]);
    }
    write_rows(&args.out, args.format, &header, &rows)?;
    if !quiet {
        println!(
            "verify-identity: {} alphas, tol {:.1e} -> {}",
            rows.len(),
            args.tol,
            if all_within { "PASS" } else { "FAIL" }
        );
        println!("wrote {}", args.out.display());
    }
    Ok(all_within)
}

fn cmd_counterexample(args: &CounterexampleArgs, quiet: bool) -> Result<bool, CmdError> {
    let alphas = parse_alpha_grid(&args.alpha_grid)?;
    require_tol(args.tol)?;
    let divergence_alphas = if args.divergence_alphas.trim().is_empty() {
        Vec::new()
    } else {
        parse_alpha_grid(&args.divergence_alphas)?
    };
    let radii = parse_radii(&args.radii)?;

    use rayon::prelude::*;
    let sweep: Vec<(f64, CoreResult<(f64, f64)>)> = alphas
        .par_iter()
        .map(|alpha| {
            let out = operator::counterexample_value(*alpha).and_then(|closed| {
                let quad_val = operator::counterexample_value_quadrature(*alpha, 1e-9)?;
                Ok((closed, quad_val))
            });
            (*alpha, out)
        })
        .collect();

    let header = ["alpha", "closed_form_value", "quadrature_value", "nonzero_flag"];
    let mut rows = Vec::new();
    let mut all_nonzero = true;
    for (alpha, outcome) in sweep {
        let (closed, quad_val) =
            outcome.map_err(|e| CmdError::Failed(format!("alpha {alpha}: {e}")))?;
        let nonzero = closed.abs() > args.tol;
        all_nonzero &= nonzero;
        rows.push(vec![
            format_float(alpha),
            format_float(closed),
            format_float(quad_val),
            nonzero.to_string(),
        ]);
    }
    write_rows(&args.out, args.format, &header, &rows)?;
    if !quiet {
        println!(
            "counterexample: {} alphas, all nonzero beyond {:.1e}: {}",
            rows.len(),
            args.tol,
            all_nonzero
        );
        println!("wrote {}", args.out.display());
    }

    let mut all_diverging = true;
    let grid = DilationGrid::default();
    for alpha in divergence_alphas {
        let op = OperatorInstance::new(atom_a1(), atom_a2(), alpha)
            .map_err(|e| CmdError::Config(e.to_string()))?;
        let report = hardy::h1_divergence_report(&op, &radii, &grid, 1e-10)
            .map_err(|e| CmdError::Failed(format!("divergence at alpha {alpha}: {e}")))?;
        all_diverging &= report.verdict == Verdict::Diverging;

        let tag = format!("_divergence_alpha{alpha}");
        let json_path = sidecar(&args.out, &tag, "json");
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CmdError::Failed(format!("json encoding failed: {e}")))?;
        std::fs::write(&json_path, text + "\n").map_err(|e| io_err(e, &json_path))?;

        let csv_path = sidecar(&args.out, &tag, "csv");
        let norm_rows: Vec<Vec<String>> = report
            .norm_rows()
            .iter()
            .map(|(r, n)| vec![format_float(*r), format_float(*n)])
            .collect();
        write_csv(&csv_path, &["radius", "truncated_norm"], &norm_rows)?;
        if !quiet {
            println!(
                "divergence alpha {alpha}: slope {:.5} vs predicted {:.5} -> {:?}",
                report.fitted_slope_vs_log_r, report.predicted_slope, report.verdict
            );
            println!("wrote {} and {}", json_path.display(), csv_path.display());
        }
    }
    Ok(all_nonzero && all_diverging)
}

fn cmd_eval(args: &EvalArgs, quiet: bool) -> Result<bool, CmdError> {
    let atoms: Vec<&str> = args.atoms.split(',').collect();
    if atoms.len() != 2 {
        return config_err(format!("expected two atoms, got `{}`", args.atoms));
    }
    let f1 = parse_atom(atoms[0])?;
    let f2 = parse_atom(atoms[1])?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return config_err(format!("alpha {} outside (0, 1)", args.alpha));
    }
    if !(args.step > 0.0) {
        return config_err(format!("step must be positive, got {}", args.step));
    }
    let parts: Vec<&str> = args.x_range.split(':').collect();
    if parts.len() != 2 {
        return config_err(format!("expected min:max, got `{}`", args.x_range));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| CmdError::Config(format!("bad range: {e}")))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| CmdError::Config(format!("bad range: {e}")))?;
    if hi < lo {
        return config_err("x range is empty");
    }

    let op = OperatorInstance::new(f1, f2, args.alpha)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let n = ((hi - lo) / args.step).round() as usize;
    let rows: Vec<Vec<String>> = (0..=n)
        .map(|i| {
            let x = lo + args.step * i as f64;
            vec![format_float(x), format_float(operator::operator_eval(&op, x))]
        })
        .collect();
    write_rows(&args.out, args.format, &["x", "value"], &rows)?;
    if !quiet {
        println!("eval: {} rows over [{lo}, {hi}]", rows.len());
        println!("wrote {}", args.out.display());
    }
    Ok(true)
}
