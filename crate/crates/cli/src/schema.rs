//! The on-disk JSON model format and its conversion to solver types.
//!
//! Documents are sparse and label-keyed: omitted rate entries mean zero, and
//! time-varying entries use piecewise polynomial specs. The canonical digest
//! is the SHA-256 of a normalized re-serialization (sorted keys, zero entries
//! dropped, metadata excluded), so cosmetic differences in a file never
//! change the digest.
//!
//! ```json
//! {
//!   "kind": "homogeneous",
//!   "states": ["work", "done"],
//!   "actions": ["go"],
//!   "rates": { "work": { "go": { "done": 2.0 } } },
//!   "costs": { "work": { "go": 1.0 } }
//! }
//! ```
//!
//! Time-varying entries replace the number with
//! `{"time_pieces": [{"until": 2.0, "coeffs": [1.0, 0.5]}, {"coeffs": [0.25]}]}`,
//! coefficients in the local variable `t - piece_start`; the final piece omits
//! `"until"` and extends to infinity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use riskmdp_core::ext_real::ExtReal;
use riskmdp_core::model::{
    validate_model, CtmdpModel, ModelDoc, ModelPayload, TerminalCost, TimeVaryingModel, Violation,
};
use riskmdp_core::profile::TimeProfile;
use riskmdp_core::solver::StationaryPolicy;
use riskmdp_core::timegrid::MarkovPolicyGrid;

/// Loading failures, split by exit class: malformed JSON, schema problems,
/// and invariant violations are reported distinctly.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violations:\n{}", format_violations(.0))]
    Invariant(Vec<Violation>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {}: {}", v.path, v.message))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One segment of a piecewise polynomial entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub until: Option<f64>,
    pub coeffs: Vec<f64>,
}

/// A rate or cost entry: a constant, or time pieces for time-varying kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Constant(f64),
    Pieces { time_pieces: Vec<PieceSpec> },
}

type RateMap = BTreeMap<String, BTreeMap<String, BTreeMap<String, Entry>>>;
type CostMap = BTreeMap<String, BTreeMap<String, Entry>>;

/// The raw document shape. Unknown fields are rejected so that a typo'd
/// `rates` key cannot silently load as an all-zero model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    #[serde(default)]
    pub rates: RateMap,
    #[serde(default)]
    pub costs: CostMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_g: Option<BTreeMap<String, f64>>,
}

/// A loaded model document plus its canonical digest.
#[derive(Debug)]
pub struct LoadedModel {
    pub doc: ModelDoc,
    pub digest: String,
    pub alpha: Option<f64>,
    pub horizon: Option<f64>,
}

pub fn load_model(path: &std::path::Path) -> Result<LoadedModel, LoadError> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| classify_serde_error(&text, e))?;
    model_from_file(file)
}

/// Syntax errors are parse errors; structurally valid JSON with the wrong
/// shape is a schema error.
fn classify_serde_error(text: &str, err: serde_json::Error) -> LoadError {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(_) => LoadError::Schema(err.to_string()),
        Err(_) => LoadError::Parse(err.to_string()),
    }
}

pub fn model_from_file(file: ModelFile) -> Result<LoadedModel, LoadError> {
    match file.kind.as_str() {
        "homogeneous" | "time-varying" | "finite-horizon" | "discounted" => {}
        other => {
            return Err(LoadError::Schema(format!(
                "unknown kind {other:?}; expected homogeneous, time-varying, finite-horizon \
                 or discounted"
            )))
        }
    }
    check_labels(&file)?;

    // Sign violations are data, not schema failures: collect them with field
    // paths before building anything.
    let raw = raw_violations(&file);
    if !raw.is_empty() {
        return Err(LoadError::Invariant(raw));
    }

    let doc = build_doc(&file)?;
    let violations = validate_model(&doc);
    if !violations.is_empty() {
        return Err(LoadError::Invariant(violations));
    }
    let digest = digest_file(&file);
    Ok(LoadedModel {
        doc,
        digest,
        alpha: file.alpha,
        horizon: file.horizon,
    })
}

fn check_labels(file: &ModelFile) -> Result<(), LoadError> {
    if file.states.is_empty() || file.actions.is_empty() {
        return Err(LoadError::Schema(
            "states and actions must be nonempty".into(),
        ));
    }
    for (labels, what) in [(&file.states, "state"), (&file.actions, "action")] {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LoadError::Schema(format!("duplicate {what} label {l:?}")));
            }
        }
    }
    let state_ok = |l: &String| file.states.contains(l);
    for (x, per_action) in &file.rates {
        if !state_ok(x) {
            return Err(LoadError::Schema(format!("rates: unknown state {x:?}")));
        }
        for (a, row) in per_action {
            if !file.actions.contains(a) {
                return Err(LoadError::Schema(format!(
                    "rates[{x:?}]: unknown action {a:?}"
                )));
            }
            for y in row.keys() {
                if !state_ok(y) {
                    return Err(LoadError::Schema(format!(
                        "rates[{x:?}][{a:?}]: unknown target state {y:?}"
                    )));
                }
                if y == x {
                    return Err(LoadError::Schema(format!(
                        "rates[{x:?}][{a:?}]: diagonal entry not allowed; exit rates are derived"
                    )));
                }
            }
        }
    }
    for (x, row) in &file.costs {
        if !state_ok(x) {
            return Err(LoadError::Schema(format!("costs: unknown state {x:?}")));
        }
        for a in row.keys() {
            if !file.actions.contains(a) {
                return Err(LoadError::Schema(format!(
                    "costs[{x:?}]: unknown action {a:?}"
                )));
            }
        }
    }
    if let Some(g) = &file.terminal_g {
        for x in g.keys() {
            if !state_ok(x) {
                return Err(LoadError::Schema(format!(
                    "terminal_g: unknown state {x:?}"
                )));
            }
        }
    }
    Ok(())
}

fn entry_violations(entry: &Entry, path: &str, out: &mut Vec<Violation>) {
    match entry {
        Entry::Constant(v) => {
            if !v.is_finite() || *v < 0.0 {
                out.push(Violation {
                    path: path.into(),
                    message: format!("must be finite and nonnegative, got {v}"),
                });
            }
        }
        Entry::Pieces { time_pieces } => {
            for (i, piece) in time_pieces.iter().enumerate() {
                if piece.coeffs.iter().any(|c| !c.is_finite()) {
                    out.push(Violation {
                        path: format!("{path}.time_pieces[{i}]"),
                        message: "non-finite coefficient".into(),
                    });
                }
            }
            if let Some(last) = time_pieces.last() {
                if let Some(&lead) = last.coeffs.iter().rev().find(|c| **c != 0.0) {
                    if lead < 0.0 {
                        out.push(Violation {
                            path: format!("{path}.time_pieces[{}]", time_pieces.len() - 1),
                            message: format!(
                                "final piece has negative leading coefficient {lead}"
                            ),
                        });
                    }
                }
            }
        }
    }
}

fn raw_violations(file: &ModelFile) -> Vec<Violation> {
    let mut out = Vec::new();
    for (x, per_action) in &file.rates {
        for (a, row) in per_action {
            for (y, entry) in row {
                entry_violations(entry, &format!("rates[{x:?}][{a:?}][{y:?}]"), &mut out);
            }
        }
    }
    for (x, row) in &file.costs {
        for (a, entry) in row {
            entry_violations(entry, &format!("costs[{x:?}][{a:?}]"), &mut out);
        }
    }
    if let Some(g) = &file.terminal_g {
        for (x, v) in g {
            if !v.is_finite() || *v < 0.0 {
                out.push(Violation {
                    path: format!("terminal_g[{x:?}]"),
                    message: format!("must be finite and nonnegative, got {v}"),
                });
            }
        }
    }
    match file.kind.as_str() {
        "discounted" => match file.alpha {
            Some(a) if a.is_finite() && a > 0.0 => {}
            other => out.push(Violation {
                path: "alpha".into(),
                message: format!("discounted models need alpha > 0, got {other:?}"),
            }),
        },
        "finite-horizon" => {
            match file.horizon {
                Some(t) if t.is_finite() && t > 0.0 => {}
                other => out.push(Violation {
                    path: "T".into(),
                    message: format!("finite-horizon models need T > 0, got {other:?}"),
                }),
            }
            if let Some(a) = file.alpha {
                if !a.is_finite() || a < 0.0 {
                    out.push(Violation {
                        path: "alpha".into(),
                        message: format!("must be nonnegative, got {a}"),
                    });
                }
            }
        }
        _ => {}
    }
    out
}

fn constant_entry(entry: &Entry, path: &str) -> Result<f64, LoadError> {
    match entry {
        Entry::Constant(v) => Ok(*v),
        Entry::Pieces { .. } => Err(LoadError::Schema(format!(
            "{path}: time pieces are only allowed in time-varying and finite-horizon models"
        ))),
    }
}

fn profile_entry(entry: &Entry, path: &str) -> Result<TimeProfile, LoadError> {
    match entry {
        Entry::Constant(v) => TimeProfile::constant(*v)
            .map_err(|e| LoadError::Schema(format!("{path}: {e}"))),
        Entry::Pieces { time_pieces } => {
            let segments = time_pieces
                .iter()
                .map(|p| (p.until, p.coeffs.clone()))
                .collect();
            TimeProfile::piecewise(segments)
                .map_err(|e| LoadError::Schema(format!("{path}: {e}")))
        }
    }
}

fn build_doc(file: &ModelFile) -> Result<ModelDoc, LoadError> {
    let n = file.states.len();
    let na = file.actions.len();
    let idx = |label: &String| file.states.iter().position(|s| s == label).unwrap();
    let aidx = |label: &String| file.actions.iter().position(|a| a == label).unwrap();

    let payload = match file.kind.as_str() {
        "homogeneous" | "discounted" => {
            let mut rates = vec![vec![vec![0.0; n]; na]; n];
            let mut costs = vec![vec![0.0; na]; n];
            for (x, per_action) in &file.rates {
                for (a, row) in per_action {
                    for (y, entry) in row {
                        rates[idx(x)][aidx(a)][idx(y)] =
                            constant_entry(entry, &format!("rates[{x:?}][{a:?}][{y:?}]"))?;
                    }
                }
            }
            for (x, row) in &file.costs {
                for (a, entry) in row {
                    costs[idx(x)][aidx(a)] =
                        constant_entry(entry, &format!("costs[{x:?}][{a:?}]"))?;
                }
            }
            let m = CtmdpModel::new(file.states.clone(), file.actions.clone(), rates, costs)
                .map_err(|e| LoadError::Schema(e.to_string()))?;
            if file.kind == "discounted" {
                ModelPayload::Discounted {
                    base: m,
                    alpha: file.alpha.unwrap(),
                }
            } else {
                ModelPayload::Homogeneous(m)
            }
        }
        "time-varying" | "finite-horizon" => {
            let zero = TimeProfile::zero();
            let mut rates = vec![vec![vec![zero.clone(); n]; na]; n];
            let mut costs = vec![vec![zero.clone(); na]; n];
            for (x, per_action) in &file.rates {
                for (a, row) in per_action {
                    for (y, entry) in row {
                        rates[idx(x)][aidx(a)][idx(y)] =
                            profile_entry(entry, &format!("rates[{x:?}][{a:?}][{y:?}]"))?;
                    }
                }
            }
            for (x, row) in &file.costs {
                for (a, entry) in row {
                    costs[idx(x)][aidx(a)] =
                        profile_entry(entry, &format!("costs[{x:?}][{a:?}]"))?;
                }
            }
            let m = TimeVaryingModel::new(
                file.states.clone(),
                file.actions.clone(),
                rates,
                costs,
                file.horizon,
            )
            .map_err(|e| LoadError::Schema(e.to_string()))?;
            if file.kind == "finite-horizon" {
                let mut g = vec![0.0; n];
                if let Some(map) = &file.terminal_g {
                    for (x, v) in map {
                        g[idx(x)] = *v;
                    }
                }
                ModelPayload::FiniteHorizon {
                    base: m,
                    horizon: file.horizon.unwrap(),
                    alpha: file.alpha.unwrap_or(0.0),
                    terminal: TerminalCost::new(g)
                        .map_err(|e| LoadError::Schema(e.to_string()))?,
                }
            } else {
                ModelPayload::TimeVarying(m)
            }
        }
        _ => unreachable!("kind was validated"),
    };
    Ok(ModelDoc {
        name: file.name.clone(),
        description: file.description.clone(),
        payload,
    })
}

/// Canonical digest: SHA-256 over the normalized model content (sorted keys,
/// zero entries dropped, name/description excluded).
pub fn digest_file(file: &ModelFile) -> String {
    #[derive(Serialize)]
    struct Canonical<'a> {
        kind: &'a str,
        states: &'a [String],
        actions: &'a [String],
        rates: RateMap,
        costs: CostMap,
        #[serde(skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        horizon: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        terminal_g: Option<BTreeMap<String, f64>>,
    }
    let is_zero = |e: &Entry| matches!(e, Entry::Constant(v) if *v == 0.0);
    let mut rates = file.rates.clone();
    for per_action in rates.values_mut() {
        for row in per_action.values_mut() {
            row.retain(|_, e| !is_zero(e));
        }
        per_action.retain(|_, row| !row.is_empty());
    }
    rates.retain(|_, per_action| !per_action.is_empty());
    let mut costs = file.costs.clone();
    for row in costs.values_mut() {
        row.retain(|_, e| !is_zero(e));
    }
    costs.retain(|_, row| !row.is_empty());
    let terminal_g = file.terminal_g.clone().map(|mut g| {
        g.retain(|_, v| *v != 0.0);
        g
    });
    let canonical = Canonical {
        kind: &file.kind,
        states: &file.states,
        actions: &file.actions,
        rates,
        costs,
        alpha: file.alpha,
        horizon: file.horizon,
        terminal_g: terminal_g.filter(|g| !g.is_empty()),
    };
    let json = serde_json::to_string(&canonical).expect("canonical form serializes");
    let hash = Sha256::digest(json.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Re-serializes a loaded document back into the file shape (homogeneous and
/// discounted kinds). Exercised by the digest round-trip test.
#[cfg(test)]
pub fn file_from_doc(doc: &ModelDoc, alpha: Option<f64>, horizon: Option<f64>) -> ModelFile {
    let (kind, m): (&str, &CtmdpModel) = match &doc.payload {
        ModelPayload::Homogeneous(m) => ("homogeneous", m),
        ModelPayload::Discounted { base, .. } => ("discounted", base),
        _ => panic!("only homogeneous and discounted documents are re-serialized"),
    };
    let mut rates: RateMap = BTreeMap::new();
    let mut costs: CostMap = BTreeMap::new();
    for (x, xs) in m.states().iter().enumerate() {
        for (a, als) in m.actions().iter().enumerate() {
            for (y, ys) in m.states().iter().enumerate() {
                let r = m.jump_rate(x, a, y);
                if r != 0.0 {
                    rates
                        .entry(xs.clone())
                        .or_default()
                        .entry(als.clone())
                        .or_default()
                        .insert(ys.clone(), Entry::Constant(r));
                }
            }
            let c = m.cost(x, a);
            if c != 0.0 {
                costs
                    .entry(xs.clone())
                    .or_default()
                    .insert(als.clone(), Entry::Constant(c));
            }
        }
    }
    ModelFile {
        kind: kind.into(),
        name: doc.name.clone(),
        description: doc.description.clone(),
        states: m.states().to_vec(),
        actions: m.actions().to_vec(),
        rates,
        costs,
        alpha,
        horizon,
        terminal_g: None,
    }
}

/// Policy file: a stationary selector or a grid Markov selector, label-keyed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PolicyFile {
    #[serde(rename = "stationary")]
    Stationary { actions: BTreeMap<String, String> },
    #[serde(rename = "markov-grid")]
    MarkovGrid {
        times: Vec<f64>,
        /// Per state, one action label per grid time.
        actions: BTreeMap<String, Vec<String>>,
    },
}

pub fn load_policy(path: &std::path::Path) -> Result<PolicyFile, LoadError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| classify_serde_error(&text, e))
}

pub fn stationary_policy(
    file: &PolicyFile,
    states: &[String],
    actions: &[String],
) -> Result<StationaryPolicy, LoadError> {
    let PolicyFile::Stationary { actions: map } = file else {
        return Err(LoadError::Schema(
            "expected a stationary policy file".into(),
        ));
    };
    let mut out = Vec::with_capacity(states.len());
    for s in states {
        let label = map.get(s).ok_or_else(|| {
            LoadError::Schema(format!("policy misses state {s:?}"))
        })?;
        let a = actions
            .iter()
            .position(|al| al == label)
            .ok_or_else(|| LoadError::Schema(format!("policy: unknown action {label:?}")))?;
        out.push(a);
    }
    Ok(StationaryPolicy::new(out))
}

pub fn markov_policy(
    file: &PolicyFile,
    states: &[String],
    actions: &[String],
) -> Result<MarkovPolicyGrid, LoadError> {
    let PolicyFile::MarkovGrid { times, actions: map } = file else {
        return Err(LoadError::Schema("expected a markov-grid policy file".into()));
    };
    if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LoadError::Schema(
            "markov-grid times must start at 0 and increase strictly".into(),
        ));
    }
    let mut grid = vec![vec![0usize; states.len()]; times.len()];
    for (x, s) in states.iter().enumerate() {
        let labels = map
            .get(s)
            .ok_or_else(|| LoadError::Schema(format!("policy misses state {s:?}")))?;
        if labels.len() != times.len() {
            return Err(LoadError::Schema(format!(
                "policy for state {s:?} has {} actions for {} grid times",
                labels.len(),
                times.len()
            )));
        }
        for (k, label) in labels.iter().enumerate() {
            let a = actions
                .iter()
                .position(|al| al == label)
                .ok_or_else(|| LoadError::Schema(format!("policy: unknown action {label:?}")))?;
            grid[k][x] = a;
        }
    }
    Ok(MarkovPolicyGrid::from_parts(times.clone(), grid))
}

/// Value-table file for the `check` subcommand: `{"values": {state: v}}`
/// with `"inf"` for `+∞`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesFile {
    pub values: BTreeMap<String, ExtReal>,
}

pub fn load_values(path: &std::path::Path) -> Result<ValuesFile, LoadError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| classify_serde_error(&text, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_json() -> String {
        r#"{
            "kind": "homogeneous",
            "name": "chain",
            "states": ["work", "done"],
            "actions": ["go"],
            "rates": {"work": {"go": {"done": 2.0}}},
            "costs": {"work": {"go": 1.0}}
        }"#
        .to_string()
    }

    #[test]
    fn loads_a_homogeneous_model() {
        let file: ModelFile = serde_json::from_str(&chain_json()).unwrap();
        let loaded = model_from_file(file).unwrap();
        assert_eq!(loaded.doc.kind(), "homogeneous");
        let ModelPayload::Homogeneous(m) = &loaded.doc.payload else {
            panic!()
        };
        assert_eq!(m.jump_rate(0, 0, 1), 2.0);
        assert_eq!(m.cost(0, 0), 1.0);
        assert_eq!(m.exit_rate(1, 0), 0.0);
    }

    #[test]
    fn negative_rate_is_an_invariant_violation_with_path() {
        let text = chain_json().replace("2.0", "-2.0");
        let file: ModelFile = serde_json::from_str(&text).unwrap();
        match model_from_file(file) {
            Err(LoadError::Invariant(violations)) => {
                assert_eq!(violations.len(), 1);
                assert!(violations[0].path.contains("rates[\"work\"][\"go\"][\"done\"]"));
            }
            other => panic!("expected invariant violations, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_a_schema_error() {
        let text = chain_json().replace("homogeneous", "mystery");
        let file: ModelFile = serde_json::from_str(&text).unwrap();
        assert!(matches!(model_from_file(file), Err(LoadError::Schema(_))));
    }

    #[test]
    fn digest_ignores_formatting_and_metadata() {
        let a: ModelFile = serde_json::from_str(&chain_json()).unwrap();
        let mut b = a.clone();
        b.name = Some("renamed".into());
        // An explicit zero entry must not change the digest either.
        b.rates
            .get_mut("work")
            .unwrap()
            .get_mut("go")
            .unwrap()
            .insert("work2".into(), Entry::Constant(0.0));
        assert_eq!(digest_file(&a), digest_file(&b));
    }

    #[test]
    fn round_trip_preserves_the_digest() {
        let file: ModelFile = serde_json::from_str(&chain_json()).unwrap();
        let digest_before = digest_file(&file);
        let loaded = model_from_file(file).unwrap();
        let written = file_from_doc(&loaded.doc, loaded.alpha, loaded.horizon);
        let json = serde_json::to_string(&written).unwrap();
        let reparsed: ModelFile = serde_json::from_str(&json).unwrap();
        let reload = model_from_file(reparsed).unwrap();
        assert_eq!(digest_before, reload.digest);
    }

    #[test]
    fn time_pieces_build_profiles() {
        let text = r#"{
            "kind": "finite-horizon",
            "states": ["s"],
            "actions": ["u"],
            "costs": {"s": {"u": {"time_pieces": [
                {"until": 1.0, "coeffs": [2.0]},
                {"coeffs": [0.5, 0.25]}
            ]}}},
            "T": 2.0,
            "alpha": 0.0,
            "terminal_g": {"s": 0.5}
        }"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        let loaded = model_from_file(file).unwrap();
        let ModelPayload::FiniteHorizon { base, terminal, .. } = &loaded.doc.payload else {
            panic!()
        };
        assert_eq!(base.cost_at(0.5, 0, 0), 2.0);
        assert_eq!(base.cost_at(1.5, 0, 0), 0.5 + 0.25 * 0.5);
        assert_eq!(terminal.get(0), 0.5);
    }

    #[test]
    fn pieces_in_homogeneous_models_are_schema_errors() {
        let text = r#"{
            "kind": "homogeneous",
            "states": ["s"],
            "actions": ["u"],
            "costs": {"s": {"u": {"time_pieces": [{"coeffs": [1.0]}]}}}
        }"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        assert!(matches!(model_from_file(file), Err(LoadError::Schema(_))));
    }

    #[test]
    fn policy_files_resolve_labels() {
        let states = vec!["work".to_string(), "done".to_string()];
        let actions = vec!["go".to_string(), "stop".to_string()];
        let file: PolicyFile = serde_json::from_str(
            r#"{"kind": "stationary", "actions": {"work": "stop", "done": "go"}}"#,
        )
        .unwrap();
        let policy = stationary_policy(&file, &states, &actions).unwrap();
        assert_eq!(policy.actions(), &[1, 0]);

        let file: PolicyFile = serde_json::from_str(
            r#"{"kind": "markov-grid", "times": [0.0, 1.0],
                "actions": {"work": ["go", "stop"], "done": ["go", "go"]}}"#,
        )
        .unwrap();
        let grid = markov_policy(&file, &states, &actions).unwrap();
        assert_eq!(grid.action(0, 0), 0);
        assert_eq!(grid.action(1, 0), 1);
        assert!(stationary_policy(&file, &states, &actions).is_err());
    }
}
