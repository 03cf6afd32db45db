//! Family sweeps, exponent fits and report emission.

use crate::error::{CliError, CliResult};
use crate::{build_scheme, family_graph, Family, Mode, SchemeName};
use persuade_core::benchmarks::{solve_opt, solve_opt_ir, solve_opt_stable, STABLE_CAP};
use persuade_core::scalar::Scalar;
use persuade_core::{BigRational, Error as CoreError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub k: usize,
    pub n: usize,
    pub opt: f64,
    pub opt_ir: f64,
    pub opt_stable: Option<f64>,
    pub scheme: String,
    pub cost: f64,
    pub persuasive: bool,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Size parameters whose row could not be built within the oracle cap.
    pub absent: Vec<usize>,
    /// `opt` or `opt_ir`, whichever the cost ratio is taken against.
    pub benchmark: String,
    pub exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
}

/// Ordinary least squares slope of `ln y` on `ln x`, with its standard error.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| *v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let stderr = if lx.len() > 2 {
        let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, stderr))
}

fn row<T: Scalar>(family: &Family, k: usize, scheme: SchemeName, seed: u64) -> CliResult<Option<SweepRow>> {
    let g = family_graph(family, k)?;
    let opt = solve_opt::<T>(&g)?.value.to_f64();
    let opt_ir = solve_opt_ir::<T>(&g)?.value.to_f64();
    let opt_stable = if g.n() <= STABLE_CAP {
        match solve_opt_stable::<T>(&g) {
            Ok(s) => Some(s.value.to_f64()),
            Err(CoreError::NoStableFound) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let built = match build_scheme::<T>(&g, scheme, seed, None) {
        Ok(b) => b,
        Err(CliError::Capacity(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !built.report.persuasive() {
        return Err(CliError::Verification(format!("{} on {} k={k} is not persuasive", scheme.name(), family.name())));
    }
    Ok(Some(SweepRow {
        family: family.name(),
        k,
        n: g.n(),
        opt,
        opt_ir,
        opt_stable,
        scheme: scheme.name().to_string(),
        cost: built.report.cost.to_f64(),
        persuasive: true,
        params: serde_json::to_value(built.params.to_json())?,
    }))
}

/// Builds `scheme` on every family member, in parallel, ordered by size parameter.
pub fn run_sweep(family: &Family, sizes: &[usize], scheme: SchemeName, seed: u64, mode: Mode) -> CliResult<SweepResult> {
    if sizes.is_empty() {
        return Err(CliError::Input("sweep needs at least one size".into()));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let rows: Vec<(usize, Option<SweepRow>)> = sizes
        .par_iter()
        .map(|&k| {
            let r = match mode {
                Mode::Float => row::<f64>(family, k, scheme, seed),
                Mode::Rational => row::<BigRational>(family, k, scheme, seed),
            };
            r.map(|x| (k, x))
        })
        .collect::<CliResult<_>>()?;
    let absent = rows.iter().filter(|(_, r)| r.is_none()).map(|(k, _)| *k).collect();
    let rows: Vec<SweepRow> = rows.into_iter().filter_map(|(_, r)| r).collect();
    let weighted = scheme.uses_ir_benchmark();
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.cost / if weighted { r.opt_ir } else { r.opt }).collect();
    let fit = fit_power_law(&xs, &ys);
    Ok(SweepResult {
        rows,
        absent,
        benchmark: if weighted { "opt_ir" } else { "opt" }.to_string(),
        exponent: fit.map(|f| f.0),
        exponent_stderr: fit.map(|f| f.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 9] = ["family", "k", "n", "opt", "opt_ir", "opt_stable", "scheme", "cost", "persuasive"];

/// Renders the result; identical inputs give identical bytes.
pub fn render_report(result: &SweepResult, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(result)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in &result.rows {
                w.write_record([
                    r.family.clone(),
                    r.k.to_string(),
                    r.n.to_string(),
                    r.opt.to_string(),
                    r.opt_ir.to_string(),
                    r.opt_stable.map(|x| x.to_string()).unwrap_or_default(),
                    r.scheme.clone(),
                    r.cost.to_string(),
                    r.persuasive.to_string(),
                ])?;
            }
            w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

pub fn emit_report(result: &SweepResult, path: &Path, format: Format) -> CliResult<()> {
    std::fs::write(path, render_report(result, format)?)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
