//! Run reports and their emission as JSON or CSV tables.
//!
//! Every numeric section carries its uncertainty or tolerance companion:
//! value tables come with residuals, Monte Carlo means with standard errors,
//! truncated solves with certified error bounds. CSV rendering is
//! deterministic: fixed row order and shortest-round-trip decimal rendering,
//! with the literal `inf` for `+∞`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use riskmdp_core::ext_real::ExtReal;
use riskmdp_core::simulate::McEstimate;
use riskmdp_core::solver::IterationTrace;

use crate::schema::PolicyFile;

/// A signed real that serializes infinities as the strings `"inf"`/`"-inf"`
/// instead of JSON null.
#[derive(Debug, Clone, Copy)]
pub struct JsonReal(pub f64);

impl Serialize for JsonReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSection {
    pub times: Vec<f64>,
    /// Per state label, one value per grid time.
    pub values: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// Echo of the invocation.
    pub command: String,
    pub model_path: String,
    pub model_kind: String,
    pub model_digest: String,
    /// Numeric knobs the run actually used.
    pub params: BTreeMap<String, f64>,
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<BTreeMap<String, ExtReal>>,
    /// Optimality-equation residual per finite-valued state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<BTreeMap<String, JsonReal>>,
    /// finite / infinite-exact / infinite-suspected per state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_classes: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<IterationTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    /// Monte Carlo estimates keyed by initial state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimates: Option<BTreeMap<String, McEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heavy_tail_warning: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_error: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub wall_clock_secs: f64,
}

impl RunReport {
    pub fn new(command: String, model_path: String, model_kind: &str, digest: String) -> RunReport {
        RunReport {
            command,
            model_path,
            model_kind: model_kind.to_string(),
            model_digest: digest,
            params: BTreeMap::new(),
            converged: None,
            value: None,
            residual: None,
            state_classes: None,
            policy: None,
            trace: None,
            grid: None,
            estimates: None,
            heavy_tail_warning: None,
            truncation_horizon: None,
            certified_error: None,
            notes: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }
}

/// Shortest decimal that round-trips, `inf` for `+∞`.
fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Tables the CSV format can emit: `(file name, header, rows)`.
///
/// Row order is the declared state order for value-like tables and
/// `(t, state)` for grids.
pub fn csv_tables(report: &RunReport, state_order: &[String]) -> Vec<(String, String)> {
    let mut tables = Vec::new();

    if let Some(value) = &report.value {
        let mut body = String::from("state,value\n");
        for s in state_order {
            if let Some(v) = value.get(s) {
                let _ = writeln!(body, "{s},{v}");
            }
        }
        tables.push(("value.csv".to_string(), body));
    }
    if let Some(residual) = &report.residual {
        let mut body = String::from("state,residual\n");
        for s in state_order {
            if let Some(r) = residual.get(s) {
                let _ = writeln!(body, "{s},{}", fmt_f64(r.0));
            }
        }
        tables.push(("residual.csv".to_string(), body));
    }
    if let Some(PolicyFile::Stationary { actions }) = &report.policy {
        let mut body = String::from("state,action\n");
        for s in state_order {
            if let Some(a) = actions.get(s) {
                let _ = writeln!(body, "{s},{a}");
            }
        }
        tables.push(("policy.csv".to_string(), body));
    }
    if let Some(PolicyFile::MarkovGrid { times, actions }) = &report.policy {
        let mut body = String::from("t,state,action\n");
        for (k, t) in times.iter().enumerate() {
            for s in state_order {
                if let Some(row) = actions.get(s) {
                    let _ = writeln!(body, "{},{s},{}", fmt_f64(*t), row[k]);
                }
            }
        }
        tables.push(("policy.csv".to_string(), body));
    }
    if let Some(trace) = &report.trace {
        let mut body = String::from("iter,delta,inf_count\n");
        for (i, step) in trace.steps.iter().enumerate() {
            let _ = writeln!(body, "{},{},{}", i + 1, step.delta, step.inf_count);
        }
        tables.push(("trace.csv".to_string(), body));
    }
    if let Some(grid) = &report.grid {
        let mut body = String::from("t,state,value\n");
        for (k, t) in grid.times.iter().enumerate() {
            for s in state_order {
                if let Some(vals) = grid.values.get(s) {
                    let _ = writeln!(body, "{},{s},{}", fmt_f64(*t), fmt_f64(vals[k]));
                }
            }
        }
        tables.push(("grid.csv".to_string(), body));
    }
    if let Some(estimates) = &report.estimates {
        let mut body =
            String::from("state,mean,std_error,n_samples,truncation_fraction,divergent_fraction,seed\n");
        for s in state_order {
            if let Some(e) = estimates.get(s) {
                let _ = writeln!(
                    body,
                    "{s},{},{},{},{},{},{}",
                    e.mean,
                    e.std_error,
                    e.n_samples,
                    fmt_f64(e.truncation_fraction),
                    fmt_f64(e.divergent_fraction),
                    e.seed
                );
            }
        }
        tables.push(("estimate.csv".to_string(), body));
    }
    tables
}

/// Writes the report: JSON to `out` (or stdout when absent), or CSV tables
/// into the directory `out`.
pub fn write_report(
    report: &RunReport,
    state_order: &[String],
    format: &str,
    out: Option<&Path>,
) -> std::io::Result<()> {
    match format {
        "json" => {
            let json = serde_json::to_string_pretty(report).expect("report serializes");
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
        }
        "csv" => {
            let dir = out.unwrap_or_else(|| Path::new("."));
            std::fs::create_dir_all(dir)?;
            for (name, body) in csv_tables(report, state_order) {
                std::fs::write(dir.join(name), body)?;
            }
        }
        other => {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("unknown format {other:?}"),
            ))
        }
    }
    Ok(())
}
