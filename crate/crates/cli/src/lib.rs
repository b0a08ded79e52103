//! Front end for the `cpmult` command. [`run`] parses arguments, executes one
//! subcommand and returns the exit code with the rendered output, so the
//! binary and the tests share one code path.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 input error, 3 the
//! certification routes disagreed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use cpmult::approx;
use cpmult::crossed::DynamicalSystem;
use cpmult::hsmult::{self, CertifyOptions};
use cpmult::io::{self, LoadedSystem};
use cpmult::linalg;
use cpmult::nuc;
use cpmult::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cpmult",
    version,
    about = "Certify completely positive Schur and Herz-Schur multipliers"
)]
pub struct Cli {
    /// Residual tolerance for every check (overrides the config file).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed of the sampling route.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file with `tol`, `seed` and per-command `[overrides]`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Haagerup,
    Nuclearity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check group laws, automorphisms, the homomorphism property and trace invariance.
    Validate { system: PathBuf },
    /// Positive type of a Schur A-multiplier on a finite set.
    CheckSchur { system: PathBuf, phi: PathBuf },
    /// Complete positivity of a Herz-Schur multiplier.
    CheckHs {
        system: PathBuf,
        multiplier: PathBuf,
    },
    /// Consistency of the crossed product; optionally analyze one element.
    Crossed {
        system: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
    },
    /// Approximation report for a family of multipliers.
    Approx {
        system: PathBuf,
        family: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Build the multiplier of amenable-action data and a unital CP map.
    Amenable {
        system: PathBuf,
        data: PathBuf,
        phi: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::CheckSchur { .. } => "check-schur",
            Command::CheckHs { .. } => "check-hs",
            Command::Crossed { .. } => "crossed",
            Command::Approx { .. } => "approx",
            Command::Amenable { .. } => "amenable",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    /// Tolerance per subcommand name.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
}

pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// A failed command: exit code plus message.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    report: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            kind: e.kind(),
            message: e.to_string(),
            report: None,
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::RoutesDisagree(_) => EXIT_INCONSISTENT,
        Error::Invalid(_)
        | Error::ShapeMismatch(_)
        | Error::NonSquare { .. }
        | Error::AlgebraMismatch(_)
        | Error::NotInAlgebra(_)
        | Error::BadElement(_)
        | Error::SystemMismatch(_) => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        kind: "Io",
        message: format!("cannot read {}: {e}", path.display()),
        report: None,
    })
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let file = match &cli.config {
        Some(p) => toml::from_str::<ConfigFile>(&read(p)?).map_err(|e| Failure {
            code: EXIT_INPUT,
            kind: "Invalid",
            message: format!("cannot parse config {}: {e}", p.display()),
            report: None,
        })?,
        None => ConfigFile::default(),
    };
    let tol = cli
        .tol
        .or_else(|| file.overrides.get(cli.command.name()).copied())
        .or(file.tol)
        .unwrap_or(linalg::DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure {
            code: EXIT_INPUT,
            kind: "Invalid",
            message: format!("tolerance must be positive, got {tol}"),
            report: None,
        });
    }
    Ok(RunConfig {
        tol,
        seed: cli.seed.or(file.seed).unwrap_or(0),
    })
}

/// Loads a system; a failed validation is a mathematical failure carrying
/// the itemized report.
fn load_system(path: &Path, tol: f64) -> Result<DynamicalSystem, Failure> {
    let loaded = io::load_system(&read(path)?, tol)?;
    if !loaded.report.passed() {
        return Err(Failure {
            code: EXIT_FAIL,
            kind: "InvalidSystem",
            message: "system failed validation".into(),
            report: Some(json!({ "validation": loaded.report })),
        });
    }
    Ok(loaded.build(tol)?)
}

fn opts(cfg: &RunConfig) -> CertifyOptions {
    CertifyOptions {
        tol: cfg.tol,
        seed: cfg.seed,
        ..CertifyOptions::default()
    }
}

fn pass(ok: bool) -> u8 {
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_validate(path: &Path, cfg: &RunConfig) -> Result<(u8, Value), Failure> {
    let loaded: LoadedSystem = io::load_system(&read(path)?, cfg.tol)?;
    let passed = loaded.report.passed();
    Ok((
        pass(passed),
        json!({ "passed": passed, "items": loaded.report.items }),
    ))
}

fn cmd_check_schur(system: &Path, phi: &Path, cfg: &RunConfig) -> Result<(u8, Value), Failure> {
    let sys = load_system(system, cfg.tol)?;
    let phi = io::parse_phi(&read(phi)?, Some(sys.algebra()))?;
    let positive = phi.is_positive_type(cfg.tol);
    let min_choi = phi.min_choi_eigenvalue();
    let factor = phi.stinespring_multi(cfg.tol);
    let (route_factorization, dilation_dim, residual, v_norm) = match &factor {
        Ok(st) => {
            let r = phi.factorization_residual(st);
            let scale = phi.image_of_unit().op_norm().max(1.0);
            let v_norm = st
                .v_ops
                .iter()
                .map(|v| linalg::op_norm(v).powi(2))
                .fold(0.0, f64::max);
            (
                r <= cfg.tol * scale,
                Some(st.dilation_dim),
                Some(r),
                Some(v_norm),
            )
        }
        Err(_) => (false, None, None, None),
    };
    if positive != route_factorization {
        return Err(Error::RoutesDisagree(format!(
            "positive-type route says {positive}, factorization route says {route_factorization}"
        ))
        .into());
    }
    let norms = if positive {
        let alg = phi.algebra();
        let diag = (0..phi.points())
            .map(|x| linalg::op_norm(&phi.get(x, x).apply(&alg.unit()).embed()))
            .fold(0.0, f64::max);
        Some(json!({
            "cb_s_phi": phi.cb_norm(cfg.tol)?,
            "max_diagonal": diag,
            "max_dilation_norm": v_norm,
        }))
    } else {
        None
    };
    Ok((
        pass(positive),
        json!({
            "verdict": positive,
            "route_positive_type": positive,
            "route_factorization": route_factorization,
            "routes_agree": true,
            "min_choi_eigenvalue": min_choi,
            "dilation_dim": dilation_dim,
            "factorization_residual": residual,
            "norms": norms,
        }),
    ))
}

fn cmd_check_hs(system: &Path, mult: &Path, cfg: &RunConfig) -> Result<(u8, Value), Failure> {
    let sys = load_system(system, cfg.tol)?;
    let f = io::parse_multiplier(&sys, &read(mult)?)?;
    let v = hsmult::certify_cp(&sys, &f, &opts(cfg))?;
    let mut out = serde_json::to_value(&v).expect("serializable verdict");
    out["routes_agree"] = json!(true);
    Ok((pass(v.verdict), out))
}

fn cmd_crossed(
    system: &Path,
    element: Option<&Path>,
    cfg: &RunConfig,
) -> Result<(u8, Value), Failure> {
    let sys = load_system(system, cfg.tol)?;
    let alg = sys.algebra();
    let g = sys.group();
    let mut covariance = 0.0f64;
    for t in g.elements() {
        let l = sys.rep_lambda(t)?;
        for a in alg.basis() {
            let lhs = l.matmul(&sys.rep_pi(&a)).matmul(&l.adjoint());
            covariance = covariance.max(lhs.dist(&sys.rep_pi(&sys.alpha(t, &a))));
        }
    }
    let basis = sys.crossed_basis();
    let mut product = 0.0f64;
    let mut star = 0.0f64;
    for x in &basis {
        let sx = sys.synth(x);
        star = star.max(sys.synth(&sys.star(x)).dist(&sx.adjoint()));
        for y in &basis {
            product = product.max(
                sys.synth(&sys.multiply(x, y))
                    .dist(&sx.matmul(&sys.synth(y))),
            );
        }
    }
    let mut ok = covariance <= cfg.tol && product <= cfg.tol && star <= cfg.tol;
    let mut out = json!({
        "group_order": sys.order(),
        "algebra_blocks": alg.blocks(),
        "crossed_dim": sys.crossed_dim(),
        "rep_dim": sys.crossed_rep_dim(),
        "covariance_residual": covariance,
        "product_residual": product,
        "star_residual": star,
    });
    if let Some(path) = element {
        let x = io::parse_crossed_element(&sys, &read(path)?)?;
        let m = sys.synth(&x);
        let back = sys.analyze(&m, cfg.tol)?;
        let roundtrip = x
            .coeffs()
            .iter()
            .zip(back.coeffs())
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max);
        let translation = sys.translation_residual(&m)?;
        ok &= roundtrip <= cfg.tol && translation <= cfg.tol;
        out["element"] = json!({
            "norm": linalg::op_norm(&m),
            "support": x.support(cfg.tol),
            "expectation": io::element_to_wire(&sys.cond_exp(&m, cfg.tol)?),
            "adjoint": io::crossed_to_entries(&sys.star(&x)),
            "fourier_roundtrip_residual": roundtrip,
            "translation_residual": translation,
        });
    }
    out["passed"] = json!(ok);
    Ok((pass(ok), out))
}

fn cmd_approx(
    system: &Path,
    family: &Path,
    mode: Mode,
    cfg: &RunConfig,
) -> Result<(u8, Value), Failure> {
    let sys = load_system(system, cfg.tol)?;
    let fam = io::parse_family(&sys, &read(family)?)?;
    let o = opts(cfg);
    match mode {
        Mode::Haagerup => {
            sys.require_trace()?;
            let named: Vec<_> = fam.into_iter().map(|(n, f, _)| (n, f)).collect();
            let rep = approx::haagerup_report(&sys, &named, &o)?;
            let ok = rep.all_admissible();
            let failures: Vec<String> = rep
                .rows
                .iter()
                .filter_map(|r| r.flag.as_ref().map(|f| format!("{}: {f}", r.name)))
                .collect();
            let mut out = json!({ "mode": mode, "report": rep });
            if !ok {
                out["failures"] = json!(failures);
            }
            Ok((pass(ok), out))
        }
        Mode::Nuclearity => {
            let rep = nuc::nuclearity_report(&sys, &fam, &o)?;
            let failures: Vec<String> = rep
                .rows
                .iter()
                .flat_map(|r| {
                    let mut v = Vec::new();
                    if !r.cp {
                        v.push(format!("{}: not completely positive", r.name));
                    }
                    if r.rank_within_bound == Some(false) {
                        v.push(format!("{}: rank bound exceeded", r.name));
                    }
                    if !r.coupling_holds {
                        v.push(format!("{}: coupling inequality fails", r.name));
                    }
                    v
                })
                .collect();
            let ok = failures.is_empty();
            let mut out = json!({ "mode": mode, "report": rep });
            if !ok {
                out["failures"] = json!(failures);
            }
            Ok((pass(ok), out))
        }
    }
}

fn cmd_amenable(
    system: &Path,
    data: &Path,
    phi: &Path,
    cfg: &RunConfig,
) -> Result<(u8, Value), Failure> {
    let sys = load_system(system, cfg.tol)?;
    let data = io::parse_amenable(&sys, &read(data)?, cfg.tol)?;
    let phi = io::parse_cbmap(&read(phi)?)?;
    let check = nuc::check_amenable(&sys, &data)?;
    if check.sum_residual > cfg.tol {
        return Err(Failure {
            code: EXIT_FAIL,
            kind: "PreconditionFailed",
            message: format!(
                "sum of squares differs from 1 (residual {:.3e})",
                check.sum_residual
            ),
            report: Some(json!({ "check": check })),
        });
    }
    let f = nuc::build_amenable_multiplier(&sys, &data, &phi, cfg.tol)?;
    let v = hsmult::certify_cp(&sys, &f, &opts(cfg))?;
    let fe_norm = linalg::op_norm(&f.value(sys.identity()).apply(&sys.algebra().unit()).embed());
    Ok((
        pass(v.verdict),
        json!({
            "check": check,
            "verdict": v,
            "fe_unit_norm": fe_norm,
            "multiplier": io::multiplier_to_entries(&f),
            "notes": ["the normalization sum of T(s)^2 = 1 runs over the group elements s"],
        }),
    ))
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.is_empty(),
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
        _ => true,
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!(
            "[{}]",
            a.iter().map(scalar_text).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

fn execute(cli: &Cli) -> (u8, Value, String) {
    let name = cli.command.name();
    let cfg = match resolve_config(cli) {
        Ok(c) => c,
        Err(f) => {
            let body = json!({ "command": name, "status": "error", "exit_code": f.code, "error_kind": f.kind, "error": f.message });
            return (f.code, body, f.message);
        }
    };
    let result = match &cli.command {
        Command::Validate { system } => cmd_validate(system, &cfg),
        Command::CheckSchur { system, phi } => cmd_check_schur(system, phi, &cfg),
        Command::CheckHs { system, multiplier } => cmd_check_hs(system, multiplier, &cfg),
        Command::Crossed { system, element } => cmd_crossed(system, element.as_deref(), &cfg),
        Command::Approx {
            system,
            family,
            mode,
        } => cmd_approx(system, family, *mode, &cfg),
        Command::Amenable { system, data, phi } => cmd_amenable(system, data, phi, &cfg),
    };
    let mut body = json!({ "command": name, "seed": cfg.seed, "tol": cfg.tol });
    match result {
        Ok((code, value)) => {
            body["status"] = json!(if code == EXIT_PASS { "pass" } else { "fail" });
            body["exit_code"] = json!(code);
            body["result"] = value;
            (code, body, String::new())
        }
        Err(f) => {
            body["status"] = json!("error");
            body["exit_code"] = json!(f.code);
            body["error_kind"] = json!(f.kind);
            body["error"] = json!(f.message);
            if let Some(r) = f.report {
                body["result"] = r;
            }
            (f.code, body, format!("cpmult {name}: {}\n", f.message))
        }
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let (code, body, mut stderr) = execute(&cli);
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&body).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            render_text(&body, 0, &mut s);
            s
        }
    };
    match &cli.output {
        Some(path) => match std::fs::write(path, &rendered) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => {
                stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
                Outcome {
                    code: EXIT_INPUT,
                    stdout: rendered,
                    stderr,
                }
            }
        },
        None => Outcome {
            code,
            stdout: rendered,
            stderr,
        },
    }
}
