//! Output formats: versioned JSON with fixed-width floats, Hasse diagrams as DOT, and CSV
//! convergence traces.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::charts::Chart;
use crate::graph::EdgeSet;
use crate::lattice::SubgraphPoset;
use crate::renorm::{McEstimate, Scheme, TracePoint};

pub const SCHEMA: &str = "1";

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, Some(u), _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short scalar arrays stay on one line.
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, i, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, i, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, val)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key"));
                out.push_str(": ");
                write_value(out, val, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with a top-level "schema" field and every float printed with 17 significant digits.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut value = serde_json::to_value(v).expect("report types serialize");
    if let Value::Object(map) = &mut value {
        map.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

fn node_label(s: EdgeSet) -> String {
    if s.is_empty() {
        "o".to_string()
    } else {
        s.to_string()
    }
}

/// Hasse diagram, bottom to top, with nodes in canonical element order.
pub fn hasse_dot(p: &SubgraphPoset, name: &str) -> String {
    let mut out = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
    for (i, &e) in p.elements().iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", node_label(e)).unwrap();
    }
    for (a, b) in p.covers() {
        let (i, j) = (p.index(a).expect("element"), p.index(b).expect("element"));
        writeln!(out, "  n{i} -> n{j};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("samples,mean,stderr\n");
    for t in trace {
        writeln!(out, "{},{},{}", t.samples, format_float(t.mean), format_float(t.stderr)).unwrap();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentRow {
    pub member: EdgeSet,
    pub marked_coordinate: usize,
    pub constant: i64,
    pub s_coefficient: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartReport {
    pub id: String,
    pub nested: Vec<EdgeSet>,
    pub tree_edges: Vec<usize>,
    /// (member, edge, component) per nested member.
    pub marking: Vec<(EdgeSet, usize, usize)>,
    pub exponents: Vec<ExponentRow>,
}

pub fn chart_id(c: &Chart) -> String {
    let nested: Vec<String> = c.nested.iter().map(|n| n.to_string()).collect();
    let marks: Vec<String> = c.marking.iter().map(|(e, i)| format!("{e}.{i}")).collect();
    format!("N={};t={};m={}", nested.join("|"), c.basis.tree, marks.join(","))
}

pub fn chart_report(c: &Chart) -> ChartReport {
    ChartReport {
        id: chart_id(c),
        nested: c.nested.clone(),
        tree_edges: c.basis.tree_edges.clone(),
        marking: c.nested.iter().zip(&c.marking).map(|(&n, &(e, i))| (n, e, i)).collect(),
        exponents: c
            .nested
            .iter()
            .zip(c.pullback_exponents())
            .enumerate()
            .map(|(k, (&member, a))| ExponentRow {
                member,
                marked_coordinate: c.marked_coord(k),
                constant: a.constant,
                s_coefficient: a.s_coefficient,
            })
            .collect(),
    }
}

/// Result record for one estimate.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub stderr: f64,
    pub batch_stderr: f64,
    pub samples: u64,
    pub batches: u64,
    pub seed: u64,
    #[serde(rename = "chart-id")]
    pub chart_id: String,
    pub scheme: String,
    pub parameters: BTreeMap<String, f64>,
}

impl EstimateRecord {
    pub fn new(e: &McEstimate, chart: &Chart, scheme: &str, parameters: BTreeMap<String, f64>) -> Self {
        EstimateRecord {
            value: e.value,
            stderr: e.stderr,
            batch_stderr: e.batch_stderr,
            samples: e.samples,
            batches: e.batches,
            seed: e.seed,
            chart_id: chart_id(chart),
            scheme: scheme.to_string(),
            parameters,
        }
    }

    pub fn with_scheme(e: &McEstimate, chart: &Chart, scheme: &Scheme, mut parameters: BTreeMap<String, f64>) -> Self {
        match scheme {
            Scheme::Fixed(r) => {
                for (k, v) in r.iter().enumerate() {
                    parameters.insert(format!("nu_radius_{k}"), *v);
                }
            }
            Scheme::Ms(c) => {
                parameters.insert("cutoff".into(), *c);
            }
        }
        Self::new(e, chart, scheme.name(), parameters)
    }
}
