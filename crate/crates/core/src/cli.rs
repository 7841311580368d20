//! Command-line front end.  `run` takes the argument list and output sinks
//! and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a theorem suite had a failing sample |
//! | 2 | unreadable or malformed input, unknown theorem, bad flags |
//! | 3 | the spec is inadmissible or the evaluation failed |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::eval::{self, EvalError, Evaluation};
use crate::foxwright;
use crate::harness::{self, HarnessError, SuiteConfig};
use crate::spec::{self, Convention, HFunctionSpec, ModelError, SpecInput};
use crate::transforms::{self, TransformError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub grid_count: usize,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tol: 1e-8, seed: 42, samples: 10, grid_count: 100, output_path: None }
    }
}

impl RunConfig {
    /// Suite settings: series and contours run two digits tighter than `tol`.
    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig { tol: self.tol * 1e-2, grid_count: self.grid_count, ..SuiteConfig::default() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "foxh", version, about = "Fox H-functions, Fox–Wright series and their positivity theorems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Target tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 100)]
    grid_count: usize,
    /// Emit JSON instead of labelled rows.
    #[arg(long, global = true)]
    json: bool,
    /// Output file (transform) or report path prefix (verify).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvalKind {
    H,
    Fw,
    Ml,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Laplace,
    Hankel,
    Invert,
    Scale,
    Shift,
    Reduce,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an H-function, a Fox–Wright series or a Mittag-Leffler function.
    Eval {
        kind: EvalKind,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
    },
    /// Print the convergence data of a spec.
    Classify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Rewrite a spec; with --z, also evaluate the transformed function there.
    Transform {
        kind: TransformKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,
        /// Hankel power ρ.
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        /// Hankel order ν.
        #[arg(long, allow_negative_numbers = true)]
        nu: Option<f64>,
        /// Hankel exponent σ, or the power shift.
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        /// Argument scale `b` of the Hankel profile `H[b r^σ]`.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Argument power of `scale`.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_enum, default_value = "paper")]
        convention: ConventionArg,
    },
    /// Run a theorem suite and write JSON and CSV reports.
    Verify { theorem: String },
    /// List the registered theorems.
    ListTheorems,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Eval(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Eval(_) => EXIT_EVAL,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(_) => CliError::Input(e.to_string()),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Model(m) => m.into(),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Model(m) => m.into(),
            TransformError::Eval(m) => m.into(),
            other => CliError::Eval(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownTheorem(_) | HarnessError::RejectedSample { .. } => CliError::Input(e.to_string()),
            other => CliError::Eval(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Ten decimals for moderate magnitudes, ten significant digits otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        format!("{x:.10}")
    } else {
        format!("{x:.9e}")
    }
}

fn load_spec(path: &Path) -> Result<SpecInput, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(spec::parse_spec(&text)?)
}

fn load_h(path: &Path) -> Result<HFunctionSpec, CliError> {
    match load_spec(path)? {
        SpecInput::H(s) => Ok(s),
        SpecInput::FoxWright(_) => Err(CliError::Input(format!("{}: expected an H-function spec", path.display()))),
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Output<'_> {
    fn rows(&mut self, rows: &[(&str, String)]) {
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let _ = writeln!(self.out, "{k:<width$}  {v}");
        }
    }

    fn json<T: Serialize>(&mut self, value: &T) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(value).expect("output serialises"));
    }
}

fn evaluation_rows(e: &Evaluation) -> Vec<(&'static str, String)> {
    let method = match e.method {
        eval::Method::Contour => "contour",
        eval::Method::Series => "series",
    };
    vec![
        ("value", format_number(e.value)),
        ("error", format_number(e.error)),
        ("method", method.into()),
        (if method == "contour" { "nodes" } else { "terms" }, e.work.to_string()),
        ("converged", e.converged.to_string()),
    ]
}

fn cmd_eval(
    o: &mut Output,
    kind: EvalKind,
    spec_path: Option<&Path>,
    z: f64,
    ml: (Option<f64>, Option<f64>, Option<f64>),
    cfg: &RunConfig,
) -> Result<i32, CliError> {
    // tighter than `tol` so the printed digits are stable
    let tol = cfg.tol * 1e-4;
    let need = || spec_path.ok_or_else(|| CliError::Input("--spec is required".into()));
    let evaluation = match kind {
        EvalKind::H => eval::evaluate(&load_h(need()?)?, z, tol)?,
        EvalKind::Fw => match load_spec(need()?)? {
            SpecInput::FoxWright(fw) => foxwright::eval_fw(&fw, z, tol)?,
            SpecInput::H(_) => return Err(CliError::Input("expected a Fox–Wright spec (\"kind\": \"fw\")".into())),
        },
        EvalKind::Ml => {
            let alpha = ml.0.ok_or_else(|| CliError::Input("--alpha is required".into()))?;
            foxwright::mittag_leffler(alpha, ml.1.unwrap_or(1.0), ml.2.unwrap_or(1.0), z, tol)?
        }
    };
    if o.json {
        o.json(&json!({ "z": z, "evaluation": evaluation }));
    } else {
        o.rows(&evaluation_rows(&evaluation));
    }
    Ok(EXIT_OK)
}

fn cmd_classify(o: &mut Output, path: &Path) -> Result<i32, CliError> {
    let report = match load_spec(path)? {
        SpecInput::H(s) => spec::convergence_params(&s),
        SpecInput::FoxWright(fw) => foxwright::classify(&fw),
    };
    if o.json {
        o.json(&report);
        return Ok(EXIT_OK);
    }
    let opt = |v: Option<f64>| v.map_or("none".to_string(), format_number);
    o.rows(&[
        ("Delta", format_number(report.delta)),
        ("rho", format_number(report.radius)),
        ("series radius", report.series_radius.map_or("infinite".into(), format_number)),
        ("mu", opt(report.mu)),
        ("C", format_number(report.big_c)),
        ("D", format_number(report.big_d)),
        ("c", opt(report.zero_exponent)),
        ("d", opt(report.inf_exponent)),
        ("Fox-Wright image", report.fox_wright_image.to_string()),
    ]);
    Ok(EXIT_OK)
}

struct TransformArgs {
    z: Option<f64>,
    rho: Option<f64>,
    nu: Option<f64>,
    sigma: Option<f64>,
    b: f64,
    k: Option<f64>,
    convention: Convention,
}

fn require(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Input(format!("--{flag} is required")))
}

fn cmd_transform(o: &mut Output, kind: TransformKind, path: &Path, a: TransformArgs, cfg: &RunConfig) -> Result<i32, CliError> {
    let input = load_h(path)?;
    let mut rows: Vec<(&str, String)> = Vec::new();
    let mut extra = serde_json::Map::new();
    let image = match kind {
        TransformKind::Laplace => {
            let img = transforms::laplace_of_h(&input)?;
            if let Some(s) = a.z {
                let v = transforms::laplace_closed_form(&img, s, cfg.tol)?;
                rows.push(("value", format_number(v)));
                extra.insert("value".into(), json!(v));
            }
            img
        }
        TransformKind::Hankel => {
            let sigma = a.sigma.unwrap_or(1.0);
            let img = transforms::hankel_of_h(&input, require(a.rho, "rho")?, require(a.nu, "nu")?, sigma)?;
            if let Some(x) = a.z {
                let v = img.evaluate(a.b, x, cfg.tol)?;
                rows.push(("value", format_number(v)));
                extra.insert("value".into(), json!(v));
            }
            img.spec
        }
        TransformKind::Invert => spec::invert_argument(&input),
        TransformKind::Scale => {
            let (img, factor) = spec::scale_argument(&input, require(a.k, "k")?)?;
            rows.push(("factor", format_number(factor)));
            extra.insert("factor".into(), json!(factor));
            img
        }
        TransformKind::Shift => spec::shift_power(&input, require(a.sigma, "sigma")?),
        TransformKind::Reduce => spec::reduce_matching_pair(&input)?,
    };
    let text = spec::spec_to_json(&image, a.convention);
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, format!("{text}\n")).map_err(|e| io_err(path, e))?;
    }
    if o.json {
        let doc: serde_json::Value = serde_json::from_str(&text).expect("spec JSON round-trips");
        extra.insert("spec".into(), doc);
        o.json(&serde_json::Value::Object(extra));
    } else {
        let _ = writeln!(o.out, "{text}");
        o.rows(&rows);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(o: &mut Output, theorem: &str, cfg: &RunConfig) -> Result<i32, CliError> {
    let report = harness::run_theorem_suite(theorem, cfg.samples, cfg.seed, &cfg.suite())?;
    let prefix = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from(format!("verify-{}", report.theorem_id)));
    let json_path = prefix.with_extension("json");
    let csv_path = prefix.with_extension("csv");
    std::fs::write(&json_path, report.to_json() + "\n").map_err(|e| io_err(&json_path, e))?;
    let file = std::fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    report.write_csv(file)?;
    if o.json {
        o.json(&report);
    } else {
        o.rows(&[
            ("theorem", report.theorem_id.clone()),
            ("hypothesis", report.hypothesis.clone()),
            ("samples", format!("{}/{}", report.samples_tested, report.samples_requested)),
            ("worst margin", report.worst_margin.map_or("none".into(), format_number)),
            ("passed", report.passed.to_string()),
            ("report", format!("{} {}", json_path.display(), csv_path.display())),
        ]);
        for note in &report.notes {
            let _ = writeln!(o.out, "note: {note}");
        }
        for s in &report.samples {
            let margin = s.worst_margin.map_or("none".into(), format_number);
            let status = if s.passed { "pass" } else { "FAIL" };
            let mut line = format!("sample {:>3}  {status}  margin {margin}", s.index);
            for n in &s.notes {
                line.push_str(&format!("  {n}"));
            }
            if let Some(e) = &s.error {
                line.push_str(&format!("  error: {e}"));
            }
            let _ = writeln!(o.out, "{line}");
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_list(o: &mut Output) -> i32 {
    let list = harness::list_theorems();
    if o.json {
        o.json(&list);
    } else {
        for t in list {
            let aliases = if t.aliases.is_empty() { String::new() } else { format!(" ({})", t.aliases.join(", ")) };
            let _ = writeln!(o.out, "{:<15} {:<6} {}{aliases}", t.id, t.hypothesis, t.claim);
        }
    }
    EXIT_OK
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let c = &cli.common;
    if !(c.tol > 0.0) || c.samples == 0 || c.grid_count < 2 {
        let _ = writeln!(err, "error: need --tol > 0, --samples ≥ 1 and --grid-count ≥ 2");
        return EXIT_INPUT;
    }
    let cfg = RunConfig { tol: c.tol, seed: c.seed, samples: c.samples, grid_count: c.grid_count, output_path: c.out.clone() };
    let mut o = Output { out, json: c.json };
    let result = match cli.command {
        Command::Eval { kind, spec, z, alpha, beta, gamma } => cmd_eval(&mut o, kind, spec.as_deref(), z, (alpha, beta, gamma), &cfg),
        Command::Classify { spec } => cmd_classify(&mut o, &spec),
        Command::Transform { kind, spec, z, rho, nu, sigma, b, k, convention } => {
            let convention = match convention {
                ConventionArg::Paper => Convention::Paper,
                ConventionArg::Standard => Convention::Standard,
            };
            cmd_transform(&mut o, kind, &spec, TransformArgs { z, rho, nu, sigma, b, k, convention }, &cfg)
        }
        Command::Verify { theorem } => cmd_verify(&mut o, &theorem, &cfg),
        Command::ListTheorems => Ok(cmd_list(&mut o)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("foxh").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn numbers() {
        assert_eq!(format_number(std::f64::consts::E), "2.7182818285");
        assert_eq!(format_number((-1f64).exp()), "0.3678794412");
        assert_eq!(format_number(1.5e-7), "1.500000000e-7");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn mittag_leffler_exponential() {
        let (code, out, _) = run_str(&["eval", "ml", "--alpha", "1", "--beta", "1", "--gamma", "1", "--z", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("2.7182818285"), "{out}");
        let (code, _, err) = run_str(&["eval", "ml", "--z", "1"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
        assert_eq!(run_str(&["classify", "--spec", "/nonexistent/spec.json"]).0, 2);
        assert_eq!(run_str(&["verify", "H99"]).0, 2);
        assert_eq!(run_str(&["eval", "ml", "--alpha", "1", "--z", "1", "--tol", "0"]).0, 2);
        let (code, out, _) = run_str(&["list-theorems"]);
        assert_eq!(code, 0);
        assert!(out.contains("thm-4.12") && out.contains("H8"));
    }

    fn write(dir: &std::path::Path, name: &str, body: &str) -> String {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    const EXP: &str = r#"{"m": 0, "n": 1, "upper": [[0, 1]], "lower": []}"#;

    #[test]
    fn eval_exponential_spec() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "exp.json", EXP);
        let (code, out, err) = run_str(&["eval", "h", "--spec", &spec, "--z", "1"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("0.3678794412"), "{out}");
        let (_, out, _) = run_str(&["--json", "eval", "h", "--spec", &spec, "--z", "2"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["evaluation"]["value"].as_f64().unwrap() - (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_is_inadmissible() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "bad.json", r#"{"m": 0, "n": 1, "upper": [[0, 0]], "lower": []}"#);
        let (code, _, err) = run_str(&["eval", "h", "--spec", &spec, "--z", "1"]);
        assert_eq!(code, EXIT_EVAL);
        assert!(err.contains("positive weights required"), "{err}");
    }

    #[test]
    fn classify_reports() {
        let dir = tempfile::tempdir().unwrap();
        let fw = write(dir.path(), "psi.json", r#"{"kind": "fw", "upper": [[1, 1]], "lower": []}"#);
        let (code, out, err) = run_str(&["--json", "classify", "--spec", &fw]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["delta"].as_f64(), v["radius"].as_f64()), (Some(0.0), Some(1.0)));

        let exp = write(dir.path(), "exp.json", EXP);
        let (_, out, _) = run_str(&["--json", "classify", "--spec", &exp]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["bigC"].as_f64(), v["bigD"].as_f64(), v["zeroExponent"].as_f64()), (Some(1.0), Some(1.0), Some(0.0)));

        let garbled = write(dir.path(), "garbled.json", "{ not json");
        assert_eq!(run_str(&["classify", "--spec", &garbled]).0, 2);
    }

    #[test]
    fn transform_writes_spec() {
        let dir = tempfile::tempdir().unwrap();
        let exp = write(dir.path(), "exp.json", EXP);
        let target = dir.path().join("inv.json");
        let (code, _, err) = run_str(&["--out", target.to_str().unwrap(), "transform", "invert", "--spec", &exp]);
        assert_eq!(code, 0, "{err}");
        let SpecInput::H(inv) = spec::parse_spec(&std::fs::read_to_string(&target).unwrap()).unwrap() else {
            panic!("expected an H spec")
        };
        assert_eq!((inv.m, inv.n, inv.lower), (1, 0, vec![(1.0, 1.0)]));
    }

    #[test]
    fn verify_exit_codes_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("h1");
        let (code, out, err) = run_str(&["--samples", "3", "--seed", "42", "--out", prefix.to_str().unwrap(), "verify", "H1"]);
        assert_eq!(code, 0, "{out}{err}");
        let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
        assert!(csv.starts_with("theorem,sample_index,param_json,worst_margin,passed"));
        assert!(prefix.with_extension("json").exists());

        let prefix = dir.path().join("h8");
        let (code, out, _) = run_str(&["--samples", "5", "--out", prefix.to_str().unwrap(), "verify", "H8"]);
        assert_eq!(code, 1);
        assert_eq!(out.matches("η₁ = ").count(), 5, "{out}");
        assert_eq!(run_str(&["--samples", "x", "verify", "H1"]).0, 2);
    }

    #[test]
    fn verify_reports_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let read = |p: &std::path::Path, ext: &str| std::fs::read(p.with_extension(ext)).unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        for p in [&a, &b] {
            assert_eq!(run_str(&["--samples", "4", "--seed", "9", "--out", p.to_str().unwrap(), "verify", "kummer"]).0, 0);
        }
        assert_eq!(read(&a, "json"), read(&b, "json"));
        assert_eq!(read(&a, "csv"), read(&b, "csv"));
    }
}
