//! Report types and their JSON, CSV and plain-text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::Tolerances;
use crate::spaces::DyadicWindow;

/// Non-finite numbers are written as the strings `"inf"`, `"-inf"` and `"nan"`.
pub(crate) mod num {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_json(v: f64) -> serde_json::Value {
        if v.is_finite() {
            serde_json::json!(v)
        } else if v.is_nan() {
            serde_json::json!("nan")
        } else if v > 0.0 {
            serde_json::json!("inf")
        } else {
            serde_json::json!("-inf")
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&to_json(*v), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_value(&serde_json::Value::deserialize(d)?).map_err(serde::de::Error::custom)
    }

    pub fn from_value(v: &serde_json::Value) -> Result<f64, String> {
        match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| "bad number".to_string()),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(format!("expected a number, got '{other}'")),
            },
            other => Err(format!("expected a number, got {other}")),
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let v = Option::<serde_json::Value>::deserialize(d)?;
            match v {
                None | Some(serde_json::Value::Null) => Ok(None),
                Some(v) => super::from_value(&v).map(Some).map_err(serde::de::Error::custom),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
    #[serde(rename = "DIVERGENT-AS-PREDICTED")]
    DivergentAsPredicted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::DivergentAsPredicted => "DIVERGENT-AS-PREDICTED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub case_id: String,
    pub theorem: String,
    pub quantity: String,
    #[serde(with = "num")]
    pub value: f64,
    #[serde(with = "num::option", default)]
    pub bound: Option<f64>,
    #[serde(with = "num::option", default)]
    pub margin: Option<f64>,
    pub verdict: Verdict,
    #[serde(default)]
    pub note: String,
}

/// A two-column curve for gnuplot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub theorem: String,
    /// Constants evaluated for the case (numbers, or `"divergent"`).
    pub constants: BTreeMap<String, serde_json::Value>,
    /// Tracked slack `K` multiplying the sharp constant in the upper bound.
    #[serde(with = "num::option", default)]
    pub slack: Option<f64>,
    pub corpus_evaluated: usize,
    pub corpus_skipped: usize,
    pub rows: Vec<ReportRow>,
    #[serde(default)]
    pub plots: Vec<PlotSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tolerances: Tolerances,
    pub dyadic_window: DyadicWindow,
    pub morrey_grid: String,
    pub version: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub divergent_as_predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub metadata: Metadata,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        num::to_json(v).as_str().unwrap_or("nan").to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl VerificationReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.cases.iter().flat_map(|c| c.rows.iter())
    }

    pub fn summarise(rows: &[&ReportRow]) -> Summary {
        let mut s = Summary::default();
        for r in rows {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Skipped => s.skipped += 1,
                Verdict::DivergentAsPredicted => s.divergent_as_predicted += 1,
            }
        }
        s
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> crate::Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Config { line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("case_id,theorem,quantity,value,bound,margin,verdict,note\n");
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&r.case_id),
                r.theorem,
                csv_field(&r.quantity),
                fmt_num(r.value),
                fmt_opt(r.bound),
                fmt_opt(r.margin),
                r.verdict.as_str(),
                csv_field(&r.note)
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:<26} {:>14} {:>14} {:>14}  verdict", "case", "quantity", "value", "bound", "margin");
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{:<24} {:<26} {:>14} {:>14} {:>14}  {}",
                r.case_id,
                r.quantity,
                fmt_num(r.value),
                fmt_opt(r.bound),
                fmt_opt(r.margin),
                r.verdict.as_str()
            );
        }
        let s = self.summary;
        let _ = writeln!(
            out,
            "\n{} PASS, {} FAIL, {} SKIPPED, {} DIVERGENT-AS-PREDICTED",
            s.pass, s.fail, s.skipped, s.divergent_as_predicted
        );
        out
    }

    /// `(file name, contents)` of every plot series, two columns each.
    pub fn plot_files(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for c in &self.cases {
            for p in &c.plots {
                let mut body = format!("# {}: {} vs {}\n", c.id, p.y_label, p.x_label);
                for (x, y) in &p.points {
                    let _ = writeln!(body, "{x} {}", fmt_num(*y));
                }
                out.push((format!("{}_{}.dat", c.id, p.name), body));
            }
        }
        out
    }

    /// Writes `report.json`, `report.csv` and the plot files into `dir`.
    pub fn write_artifacts(&self, dir: &std::path::Path) -> std::io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, body: &str| -> std::io::Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        put("report.json", &self.to_json_string())?;
        put("report.csv", &self.to_csv())?;
        for (name, body) in self.plot_files() {
            put(&name, &body)?;
        }
        Ok(written)
    }
}
