//! The subcommands, as functions from arguments to rendered output and an
//! exit code.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hecke::hyper::{normalize, to_series_known_to};
use hecke::lang::{eval_series, eval_symbolic, parse, Expr, LangError, ParseError};
use hecke::series::{first_mismatch, inner_product, u_apply, PowerSeries, DEFAULT_ORDER};
use hecke::spectral::{eigen_check_numeric, eigen_classify, multiplicative_classify, EigenReport};
use hecke::{GaussianRational, SpectralError};

use crate::verify::{run_suite, VerificationRun, SUITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Closed,
    Termwise,
    Both,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("closed form unavailable: {0}")]
    Unavailable(String),
    #[error("internal disagreement: {0}")]
    Disagreement(String),
}

impl CliError {
    /// 1 for a failed cross-check, 2 for unusable input, 3 when the request
    /// is well-formed but has no answer (no closed form, bad parameters).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Disagreement(_) => 1,
            CliError::Parse(_) | CliError::Invalid(_) => 2,
            CliError::Unavailable(_) => 3,
        }
    }
}

/// Rendered standard output and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn parse_expr(text: &str) -> Result<Expr, CliError> {
    Ok(parse(text)?)
}

fn series_of(e: &Expr, order: usize) -> Result<PowerSeries, CliError> {
    eval_series(e, order).map_err(|err| CliError::Invalid(err.to_string()))
}

fn series_table(s: &PowerSeries) -> String {
    let mut out = String::from("exponent\tcoefficient\n");
    for (e, c) in s.dense().iter().enumerate() {
        writeln!(out, "{e}\t{c}").expect("write to String");
    }
    out
}

pub fn expand(expr: &str, order: Option<usize>, format: Format) -> Result<Outcome, CliError> {
    let e = parse_expr(expr)?;
    let s = series_of(&e, order.unwrap_or(DEFAULT_ORDER))?;
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&s),
        Format::Table => series_table(&s),
    }))
}

pub fn transform(
    expr: &str,
    n: u64,
    mode: Mode,
    order: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let order = order.unwrap_or(DEFAULT_ORDER);
    let e = parse_expr(expr)?;
    let mut out = json!({ "n": n, "mode": format!("{mode:?}").to_lowercase() });
    let mut code = 0;

    let closed = if mode == Mode::Termwise {
        None
    } else {
        let t = eval_symbolic(&e).map_err(|err| match err {
            LangError::NotClosedForm(_) => CliError::Unavailable(err.to_string()),
            other => CliError::Invalid(other.to_string()),
        })?;
        let report =
            hecke::u_closed_form(n, &t).map_err(|err| CliError::Unavailable(err.to_string()))?;
        let series = to_series_known_to(&report.output, order);
        let mut value = serde_json::to_value(&report).expect("serializable");
        value["normalized"] =
            serde_json::to_value(normalize(&report.output)).expect("serializable");
        out["closed"] = value;
        out["closed_series"] = serde_json::to_value(&series).expect("serializable");
        Some(series)
    };

    let termwise = if mode == Mode::Closed {
        None
    } else {
        // Ask the leaves for n·order + n coefficients so the window is full.
        let depth = (n as usize)
            .saturating_mul(order)
            .saturating_add(n as usize);
        let source = series_of(&e, depth)?;
        let image = u_apply(n, &source)
            .map_err(|err| CliError::Invalid(err.to_string()))?
            .truncate(order);
        out["termwise"] = serde_json::to_value(&image).expect("serializable");
        Some(image)
    };

    if let (Some(closed), Some(termwise)) = (&closed, &termwise) {
        let mismatch = first_mismatch(closed, termwise, order).expect("both known to order");
        out["agree"] = json!(mismatch.is_none());
        if let Some(at) = mismatch {
            out["first_mismatch"] = json!(at);
            code = 1;
        }
    }

    let stdout = match format {
        Format::Json => to_json(&out),
        Format::Table => {
            let mut text = String::new();
            if let Some(report) = out.get("closed") {
                writeln!(text, "case_divides\t{}", report["case_divides"])
                    .expect("write to String");
                writeln!(text, "output\t{}", report["output"]).expect("write to String");
            }
            if let Some(agree) = out.get("agree") {
                writeln!(text, "agree\t{agree}").expect("write to String");
            }
            text += &series_table(
                closed
                    .as_ref()
                    .or(termwise.as_ref())
                    .expect("one side computed"),
            );
            text
        }
    };
    Ok(Outcome { stdout, code })
}

fn spectral_error(err: SpectralError) -> CliError {
    match err {
        SpectralError::Disagreement(msg) => CliError::Disagreement(msg),
        other => CliError::Unavailable(other.to_string()),
    }
}

pub fn eigen(
    expr: &str,
    n: u64,
    order: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let order = order.unwrap_or(DEFAULT_ORDER);
    let e = parse_expr(expr)?;
    let depth = (n as usize).saturating_mul(order);
    let numeric = eigen_check_numeric(&series_of(&e, depth)?, n).map_err(spectral_error)?;

    let mut report = numeric.clone();
    let mut class = None;
    if let Ok(t) = eval_symbolic(&e) {
        let (c, classified) = eigen_classify(&t, n).map_err(spectral_error)?;
        let conflict = c.is_eigen() != numeric.is_eigen
            || (c.is_eigen() && classified.eigenvalue != numeric.eigenvalue);
        if conflict && !t.is_terminating() {
            return Err(CliError::Disagreement(format!(
                "structure says {c:?}, the coefficient check to order {order} says {numeric:?}"
            )));
        }
        report = EigenReport {
            gamma: classified.gamma,
            ..numeric
        };
        class = Some(c);
    }

    let mut value = serde_json::to_value(&report).expect("serializable");
    if let Some(c) = class {
        value["class"] = serde_json::to_value(c).expect("serializable");
    }
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&value),
        Format::Table => key_values(&value),
    }))
}

fn key_values(value: &Value) -> String {
    let mut text = String::new();
    for (key, v) in value.as_object().expect("object") {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(text, "{key}\t{shown}").expect("write to String");
    }
    text
}

/// Parses a comma-separated scalar list; the empty string is the empty list.
pub fn parse_scalars(text: &str) -> Result<Vec<GaussianRational>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|err| CliError::Invalid(format!("parameter `{}`: {err}", item.trim())))
        })
        .collect()
}

pub fn classify_cm(a: &str, b: &str, bound: u64, format: Format) -> Result<Outcome, CliError> {
    let upper = parse_scalars(a)?;
    let mut lower = parse_scalars(b)?;
    if let Some(bad) = lower.iter().find(|x| x.is_nonpositive_integer()) {
        return Err(CliError::Invalid(format!(
            "lower parameter {bad} is a nonpositive integer"
        )));
    }
    lower.push(GaussianRational::one());
    let report = multiplicative_classify(&upper, &lower, bound).map_err(|err| match err {
        SpectralError::Disagreement(msg) => CliError::Disagreement(msg),
        other => CliError::Invalid(other.to_string()),
    })?;
    let mut value = serde_json::to_value(&report).expect("serializable");
    if let Some((m, k)) = report.witness {
        let c = hecke::spectral::cm_coefficients(&upper, &lower, bound);
        value["c_mk"] = json!(c[(m * k) as usize].to_string());
        value["c_m_times_c_k"] = json!((&c[m as usize] * &c[k as usize]).to_string());
    }
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&value),
        Format::Table => key_values(&value),
    }))
}

/// The `R²`-coefficients `c_k · conj(d_k)` of `⟨f, g⟩_R / 2πi`, optionally
/// summed at a given value of `R²`.
pub fn inner(
    left: &str,
    right: &str,
    r_squared: Option<&str>,
    order: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let order = order.unwrap_or(DEFAULT_ORDER);
    let f = series_of(&parse_expr(left)?, order)?;
    let g = series_of(&parse_expr(right)?, order)?;
    let s = inner_product(&f, &g);
    let mut value = json!({
        "known_to": s.len(),
        "coeffs": s.iter().map(|c| [c.re.to_string(), c.im.to_string()]).collect::<Vec<_>>(),
    });
    if let Some(text) = r_squared {
        let t: GaussianRational = text
            .parse()
            .map_err(|err| CliError::Invalid(format!("R² value `{text}`: {err}")))?;
        // Horner from the top coefficient down.
        let total = s
            .iter()
            .rev()
            .fold(GaussianRational::zero(), |acc, c| acc * &t + c);
        value["value"] = json!(total.to_string());
    }
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&value),
        Format::Table => {
            let mut text = String::from("k\ts_k\n");
            for (k, c) in s.iter().enumerate() {
                writeln!(text, "{k}\t{c}").expect("write to String");
            }
            if let Some(v) = value.get("value") {
                writeln!(text, "value\t{}", v.as_str().expect("string")).expect("write to String");
            }
            text
        }
    }))
}

/// `suite` is one of [`SUITES`] or `all`.
pub fn verify(
    suite: &str,
    trials: u64,
    seed: u64,
    order: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        vec![suite]
    };
    let runs = names
        .iter()
        .map(|name| {
            run_suite(name, trials, seed, order)
                .ok_or_else(|| CliError::Invalid(format!("unknown suite `{name}`")))
        })
        .collect::<Result<Vec<VerificationRun>, _>>()?;
    let code = if runs.iter().all(VerificationRun::passed) {
        0
    } else {
        1
    };
    let stdout = match format {
        Format::Json if suite == "all" => to_json(&json!({
            "suite": "all",
            "seed": seed,
            "trials": trials,
            "runs": runs,
        })),
        Format::Json => to_json(&runs[0]),
        Format::Table => {
            let mut text = String::from("suite\ttrials\torder\tfailures\n");
            for run in &runs {
                writeln!(
                    text,
                    "{}\t{}\t{}\t{}",
                    run.suite,
                    run.trials,
                    run.order,
                    run.failures.len()
                )
                .expect("write to String");
                for failure in &run.failures {
                    writeln!(text, "  trial {}: {}", failure.trial, failure.description)
                        .expect("write to String");
                }
            }
            text
        }
    };
    Ok(Outcome { stdout, code })
}
