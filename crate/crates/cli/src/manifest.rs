//! Run manifest and its JSON/CSV encodings.

use std::collections::{BTreeMap, BTreeSet};

use entlab::bounds::{fmt_sig, round_sig, BoundReport, FixtureRow, ViolationRow};
use entlab::experiments::CampaignResult;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SIG_DIGITS: usize = 12;

/// Per-channel entropy estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinEntRow {
    pub channel: usize,
    pub s: usize,
    pub n: usize,
    pub d: usize,
    pub e_estimate: f64,
    pub probe_min: f64,
    pub restarts_run: usize,
    pub stalled_restarts: usize,
    pub product_at_max_entangled: Option<f64>,
    pub product_optimized: Option<f64>,
    pub delta_s_estimate: Option<f64>,
    pub prod_upper: Option<f64>,
    pub prod_upper_ok: Option<bool>,
}

/// Distribution summary over channels with the analytic bounds for context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinEntSummary {
    pub s: usize,
    pub n: usize,
    pub d: usize,
    pub channels: usize,
    pub h: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub thm1_rhs: f64,
    pub thm2_rhs: f64,
    pub hlw: Option<f64>,
    pub delta_s_lower: Option<f64>,
}

/// Violation table row with the first positive entry marked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEntry {
    #[serde(flatten)]
    pub row: ViolationRow,
    pub positive: bool,
    pub first_positive: bool,
}

/// Oracle regeneration summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub fixture_path: String,
    pub rows: usize,
    pub drift: Option<f64>,
    pub drift_tolerance: f64,
    pub reference: String,
    pub mu_tables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultRecord {
    Campaign(CampaignResult),
    Bound(BoundReport),
    Violation(ViolationEntry),
    ViolationCrossing(ViolationRow),
    MinEnt(MinEntRow),
    MinEntSummary(MinEntSummary),
    Fixture(FixtureRow),
    Oracle(OracleSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub results: Vec<ResultRecord>,
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x, SIG_DIGITS)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

impl RunManifest {
    /// JSON with every real rounded to 12 significant digits.
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut v = serde_json::to_value(self)?;
        round_value(&mut v);
        serde_json::to_string_pretty(&v)
    }

    /// Used by the integration tests; the binary itself only writes manifests.
    #[allow(dead_code)]
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One CSV row per result; nested objects are flattened with `.` keys.
    pub fn to_csv(&self) -> Result<String, Box<dyn std::error::Error>> {
        let mut rows: Vec<BTreeMap<String, String>> = Vec::new();
        for r in &self.results {
            let mut flat = BTreeMap::new();
            flatten("", &serde_json::to_value(r)?, &mut flat);
            rows.push(flat);
        }
        let mut keys: BTreeSet<String> = BTreeSet::new();
        for r in &rows {
            keys.extend(r.keys().cloned());
        }
        let mut header: Vec<String> = Vec::new();
        for first in ["kind", "name"] {
            if keys.remove(first) {
                header.push(first.to_string());
            }
        }
        header.extend(keys);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for r in &rows {
            w.write_record(header.iter().map(|k| r.get(k).map(String::as_str).unwrap_or("")))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Number(n) => {
            let s = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(x)) => fmt_sig(x, SIG_DIGITS),
                _ => n.to_string(),
            };
            out.insert(prefix.to_string(), s);
        }
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        Value::Bool(b) => {
            out.insert(prefix.to_string(), b.to_string());
        }
        Value::Null => {
            out.insert(prefix.to_string(), String::new());
        }
    }
}

/// Builds the `params` map from `(name, value)` pairs.
pub fn params<I, K>(items: I) -> BTreeMap<String, Value>
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    let mut m = Map::new();
    for (k, v) in items {
        m.insert(k.into(), v);
    }
    m.into_iter().collect()
}
