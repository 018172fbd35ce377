//! Diagnostics reports: ordered sections of named records and verdicts, each
//! verdict carrying the numbers it was decided on.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;
use crate::error::{Error, Result};
use crate::verdict::Verdict;

/// Bumped on any change to the report fields.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evidence {
    pub label: String,
    /// `None` for values that are not finite.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictEntry {
    pub name: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub name: String,
    pub records: BTreeMap<String, Value>,
    pub verdicts: Vec<VerdictEntry>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            records: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn record(&mut self, key: impl Into<String>, value: impl Serialize) -> Result<&mut Self> {
        self.records.insert(key.into(), serde_json::to_value(value)?);
        Ok(self)
    }

    /// Add a verdict. Evidence may not be empty.
    pub fn verdict<L: Into<String>>(
        &mut self,
        name: impl Into<String>,
        verdict: Verdict,
        evidence: impl IntoIterator<Item = (L, f64)>,
    ) -> Result<&mut Self> {
        let name = name.into();
        let evidence: Vec<Evidence> = evidence
            .into_iter()
            .map(|(l, v)| Evidence {
                label: l.into(),
                value: v.is_finite().then_some(v),
            })
            .collect();
        if evidence.is_empty() {
            return Err(Error::Validation(format!("verdict {name:?} has no evidence")));
        }
        self.verdicts.push(VerdictEntry {
            name,
            verdict,
            evidence,
        });
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.records.get(key)
    }

    pub fn verdict_of(&self, name: &str) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.name == name).map(|v| v.verdict)
    }

    /// Replace every verdict by `tainted`, keeping the evidence.
    pub fn taint(&mut self) {
        for v in &mut self.verdicts {
            v.verdict = Verdict::Tainted;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsReport {
    pub schema_version: String,
    pub meta: Meta,
    pub sections: Vec<Section>,
    /// Wall-clock milliseconds per section; absent when timing is off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl DiagnosticsReport {
    pub fn new(command: &str, seed: Option<u64>, config_hash: String) -> Self {
        DiagnosticsReport {
            schema_version: SCHEMA_VERSION.to_string(),
            meta: Meta {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                seed,
                config_hash,
            },
            sections: Vec::new(),
            timing: None,
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn verdicts(&self) -> impl Iterator<Item = (&str, &VerdictEntry)> {
        self.sections
            .iter()
            .flat_map(|s| s.verdicts.iter().map(move |v| (s.name.as_str(), v)))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat `section,kind,key,value` rows. Arrays and objects are expanded with
    /// dotted index paths, giving plot-ready series.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Validation(format!("csv output: {e}"));
        w.write_record(["section", "kind", "key", "value"]).map_err(csv_err)?;
        let meta = serde_json::to_value(&self.meta)?;
        let mut rows = Vec::new();
        flatten("schema_version", &Value::String(self.schema_version.clone()), &mut rows);
        flatten("", &meta, &mut rows);
        for (k, v) in rows.drain(..) {
            w.write_record(["meta", "meta", &k, &v]).map_err(csv_err)?;
        }
        for s in &self.sections {
            for (key, value) in &s.records {
                flatten(key, value, &mut rows);
                for (k, v) in rows.drain(..) {
                    w.write_record([s.name.as_str(), "record", &k, &v]).map_err(csv_err)?;
                }
            }
            for v in &s.verdicts {
                w.write_record([s.name.as_str(), "verdict", &v.name, v.verdict.as_str()])
                    .map_err(csv_err)?;
                for e in &v.evidence {
                    let key = format!("{}.{}", v.name, e.label);
                    let val = e.value.map_or_else(String::new, |x| x.to_string());
                    w.write_record([s.name.as_str(), "evidence", &key, &val])
                        .map_err(csv_err)?;
                }
            }
        }
        if let Some(t) = &self.timing {
            for (k, v) in t {
                w.write_record(["timing", "timing", k, &v.to_string()])
                    .map_err(csv_err)?;
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Validation(format!("csv output: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), item, out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                flatten(&join(k), item, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn save_report(report: &DiagnosticsReport, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn load_report(path: impl AsRef<Path>) -> Result<DiagnosticsReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    DiagnosticsReport::from_json(&text)
}
