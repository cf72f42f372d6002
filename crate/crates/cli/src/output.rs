//! Self-describing scan output: CSV with a `# meta:` JSON line, or one JSON
//! document.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use bec_thermo::dephasing::QuadratureSpec;
use bec_thermo::params::PhysicalConfig;
use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Num(_) | Cell::Missing => s.serialize_none(),
        }
    }
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        match self {
            // Both forms are the shortest text that parses back to the same bits.
            Cell::Num(v) if *v == 0.0 || (1e-4..1e15).contains(&v.abs()) => {
                write!(out, "{v}").unwrap()
            }
            Cell::Num(v) if v.is_finite() => write!(out, "{v:e}").unwrap(),
            Cell::Num(v) => write!(out, "{v}").unwrap(),
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => {
                write!(out, "\"{}\"", t.replace('"', "\"\"")).unwrap()
            }
            Cell::Text(t) => out.push_str(t),
            Cell::Missing => {}
        }
    }
}

/// Everything needed to regenerate the rows.
#[derive(Debug, Clone, DeriveSerialize)]
pub struct Meta {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    /// Resolved SI inputs, after any `--eta` override.
    pub config: PhysicalConfig,
    /// SHA-256 of the canonical config text of `config`.
    pub config_sha256: String,
    pub eta: f64,
    pub seed: Option<u64>,
    pub quadrature: QuadratureSpec,
    pub units: BTreeMap<&'static str, &'static str>,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

pub fn config_sha256(config: &PhysicalConfig) -> String {
    Sha256::digest(config.to_config_string().as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct ScanResult {
    pub schema_version: u32,
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Points that failed to converge; recorded in-row, reported via exit code.
    #[serde(skip)]
    pub numerical_failures: usize,
}

#[derive(DeriveSerialize)]
struct MetaLine<'a> {
    schema_version: u32,
    #[serde(flatten)]
    meta: &'a Meta,
}

impl ScanResult {
    pub fn new(meta: Meta, columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        Self {
            schema_version: SCHEMA_VERSION,
            meta,
            columns,
            rows,
            numerical_failures: 0,
        }
    }

    pub fn to_csv(&self) -> String {
        let line = MetaLine {
            schema_version: self.schema_version,
            meta: &self.meta,
        };
        let mut out = format!("# meta: {}\n", serde_json::to_string(&line).unwrap());
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap();
        s.push('\n');
        s
    }

    pub fn write<W: Write>(&self, json: bool, mut w: W) -> std::io::Result<()> {
        let text = if json { self.to_json() } else { self.to_csv() };
        w.write_all(text.as_bytes())?;
        w.flush()
    }
}
