//! Subcommand bodies. Each returns the bytes to emit plus an optional
//! verification failure, so the binary can write output before exiting.

use crate::error::{CliError, CliResult};
use crate::sweep::{render_report, run_sweep, Format};
use crate::{build_scheme, family_graph, Family, Mode, SchemeName};
use persuade_core::benchmarks::benchmark_report;
use persuade_core::graph::{gen_component_mix, Component, GraphJson, NumJson, WeightedGraph};
use persuade_core::lowerbounds::{search_step_certificate, verify_certificate_exhaustive, CertificateOutcome, DualCertificate};
use persuade_core::scalar::{approximate_fraction, parse_ratio, Scalar};
use persuade_core::schemes::{slack_report_mc, slack_report_exact, SchemeJson, SignalingScheme, SlackReport};
use persuade_core::BigRational;
use serde_json::{json, Value};

/// Command output and, when a check failed, the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: Vec<u8>,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(value: &impl serde::Serialize) -> CliResult<Self> {
        Ok(Self { body: to_bytes(value)?, failure: None })
    }
}

fn to_bytes(value: &impl serde::Serialize) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn need_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Input(format!("{what} is randomized and needs --seed")))
}

pub fn parse_graph(text: &str) -> CliResult<WeightedGraph> {
    let doc: GraphJson = serde_json::from_str(text)?;
    Ok(WeightedGraph::from_json(&doc)?)
}

/// Accepts a bare scheme document or the output of `construct`.
pub fn parse_scheme<T: Scalar>(n: usize, text: &str) -> CliResult<SignalingScheme<T>> {
    let value: Value = serde_json::from_str(text)?;
    let value = match value.get("scheme") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let doc: SchemeJson = serde_json::from_value(value)?;
    Ok(SignalingScheme::from_json(n, &doc)?)
}

pub fn parse_number_list(text: &str) -> CliResult<Vec<BigRational>> {
    text.split(',')
        .map(|t| parse_ratio(t).ok_or_else(|| CliError::Input(format!("not a number: `{t}`"))))
        .collect()
}

pub enum GenSpec {
    Family { family: Family, size: usize },
    Mix(String),
}

pub fn gen(spec: &GenSpec, mode: Mode) -> CliResult<Outcome> {
    let g = match spec {
        GenSpec::Family { family, size } => family_graph(family, *size)?,
        GenSpec::Mix(text) => {
            let parts = text.split(';').map(Component::parse).collect::<Result<Vec<_>, _>>()?;
            gen_component_mix(&parts)?
        }
    };
    Outcome::ok(&g.to_json(mode == Mode::Rational))
}

pub fn bench(g: &WeightedGraph, cap: usize, mode: Mode) -> CliResult<Outcome> {
    let report = match mode {
        Mode::Float => benchmark_report::<f64>(g, cap)?,
        Mode::Rational => benchmark_report::<BigRational>(g, cap)?,
    };
    Outcome::ok(&report)
}

fn construct_in<T: Scalar>(g: &WeightedGraph, name: SchemeName, seed: u64, delta: Option<&BigRational>) -> CliResult<Outcome> {
    let built = build_scheme::<T>(g, name, seed, delta.map(T::from_ratio))?;
    Outcome::ok(&json!({
        "scheme": built.scheme.to_json(),
        "report": built.report.to_json(),
        "params": built.params.to_json(),
    }))
}

pub fn construct(
    g: &WeightedGraph,
    name: SchemeName,
    seed: Option<u64>,
    delta: Option<&BigRational>,
    mode: Mode,
) -> CliResult<Outcome> {
    let seed = if name.randomized() { need_seed(seed, name.name())? } else { seed.unwrap_or(0) };
    match mode {
        Mode::Float => construct_in::<f64>(g, name, seed, delta),
        Mode::Rational => construct_in::<BigRational>(g, name, seed, delta),
    }
}

/// Monte Carlo estimates pass when every slack is within `z` standard errors of its target.
pub fn mc_consistent(report: &SlackReport<f64>, z: f64) -> bool {
    report.entries.iter().all(|e| {
        let band = z * e.stderr.unwrap_or(0.0) + 1e-12;
        if e.signal == 0.0 {
            e.delta >= -band
        } else {
            e.delta.abs() <= band
        }
    })
}

fn verify_in<T: Scalar>(g: &WeightedGraph, scheme_text: &str, mc: Option<(usize, u64)>) -> CliResult<Outcome> {
    let scheme = parse_scheme::<T>(g.n(), scheme_text)?;
    let (json, ok) = match mc {
        None => {
            let r = slack_report_exact(g, &scheme)?;
            (r.to_json(), r.persuasive())
        }
        Some((samples, seed)) => {
            let r = slack_report_mc(g, &scheme, samples, seed)?;
            (r.to_json(), mc_consistent(&r, 5.0))
        }
    };
    Ok(Outcome { body: to_bytes(&json)?, failure: (!ok).then(|| "scheme is not persuasive".to_string()) })
}

pub fn verify(g: &WeightedGraph, scheme_text: &str, mc: Option<usize>, seed: Option<u64>, mode: Mode) -> CliResult<Outcome> {
    let mc = match mc {
        Some(samples) => Some((samples, need_seed(seed, "Monte Carlo verification")?)),
        None => None,
    };
    match mode {
        Mode::Float => verify_in::<f64>(g, scheme_text, mc),
        Mode::Rational => verify_in::<BigRational>(g, scheme_text, mc),
    }
}

/// Test-function values: a JSON array aligned with the grid, or `{"f": [...]}`.
pub fn parse_test_function(text: &str) -> CliResult<Vec<BigRational>> {
    let value: Value = serde_json::from_str(text)?;
    let list = match value.get("f") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let nums: Vec<NumJson> = serde_json::from_value(list)?;
    Ok(nums.iter().map(NumJson::to_ratio).collect::<Result<_, _>>()?)
}

/// Certificate to check: explicit `f` and `C`, or a searched step function.
pub struct LowerBoundSpec {
    pub grid: Vec<BigRational>,
    pub f: Option<Vec<BigRational>>,
    pub c_bound: Option<BigRational>,
}

fn lowerbound_in<T: Scalar>(g: &WeightedGraph, grid: &[BigRational], f: &[BigRational], c: &BigRational, searched: Option<Value>) -> CliResult<Outcome> {
    let conv = |xs: &[BigRational]| xs.iter().map(T::from_ratio).collect::<Vec<T>>();
    let cert = DualCertificate::new(conv(grid), conv(f), T::from_ratio(c))?;
    let outcome = verify_certificate_exhaustive(g, &cert)?;
    let base = json!({
        "grid": grid.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "f": f.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "C": c.to_string(),
        "search": searched,
    });
    let (extra, failure) = match outcome {
        CertificateOutcome::Certified { lower_bound, tightest, labelings } => (
            json!({"certified": true, "lower_bound": lower_bound.to_string(), "tightest": tightest.to_string(), "labelings": labelings}),
            None,
        ),
        CertificateOutcome::Violation { labeling, lhs, rhs } => (
            json!({
                "certified": false,
                "violation": labeling.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "lhs": lhs.to_string(),
                "rhs": rhs.to_string(),
            }),
            Some("certificate violated".to_string()),
        ),
    };
    let mut doc = base;
    if let (Value::Object(a), Value::Object(b)) = (&mut doc, extra) {
        a.extend(b);
    }
    Ok(Outcome { body: to_bytes(&doc)?, failure })
}

/// Rounds a searched step certificate onto dyadic values so it can be checked exactly.
pub fn rounded_step(grid: &[BigRational], threshold: f64, high: f64, low: f64, c: f64) -> (Vec<BigRational>, BigRational) {
    let snap = |x: f64, den: f64| approximate_fraction((x * den).round() / den, den as i64);
    let hi = snap(high, 1024.0);
    let lo = snap(low.max(0.0), 1024.0);
    let f = grid
        .iter()
        .map(|t| if t.to_f64() >= threshold - 1e-12 { hi.clone() } else { lo.clone() })
        .collect();
    (f, snap((c * 64.0).floor() / 64.0, 64.0))
}

pub fn lowerbound(g: &WeightedGraph, spec: &LowerBoundSpec, mode: Mode) -> CliResult<Outcome> {
    let (f, c, searched) = match &spec.f {
        Some(f) => {
            let c = spec.c_bound.clone().ok_or_else(|| CliError::Input("--f needs --C".into()))?;
            (f.clone(), c, None)
        }
        None => {
            let grid: Vec<f64> = spec.grid.iter().map(Scalar::to_f64).collect();
            let s = search_step_certificate(g, &grid)?;
            let (f, c) = rounded_step(&spec.grid, s.threshold, s.high, s.low, s.c_bound);
            let c = spec.c_bound.clone().unwrap_or(c);
            let info = json!({"threshold": s.threshold, "high": s.high, "low": s.low, "c_bound": s.c_bound});
            (f, c, Some(info))
        }
    };
    if f.len() != spec.grid.len() {
        return Err(CliError::Input(format!("f has {} values for a grid of {}", f.len(), spec.grid.len())));
    }
    match mode {
        Mode::Float => lowerbound_in::<f64>(g, &spec.grid, &f, &c, searched),
        Mode::Rational => lowerbound_in::<BigRational>(g, &spec.grid, &f, &c, searched),
    }
}

pub fn sweep(family: &Family, sizes: &[usize], name: SchemeName, seed: Option<u64>, mode: Mode, format: Format) -> CliResult<Outcome> {
    let seed = if name.randomized() { need_seed(seed, name.name())? } else { seed.unwrap_or(0) };
    let result = run_sweep(family, sizes, name, seed, mode)?;
    Ok(Outcome { body: render_report(&result, format)?, failure: None })
}
