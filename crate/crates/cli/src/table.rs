//! Sweep tables and their CSV/JSON serialization.

use serde::Serialize;

pub const HEADER: [&str; 7] = ["param", "value", "metric", "std_err", "method", "flag", "quantity"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub param: String,
    pub value: Option<f64>,
    pub metric: Option<f64>,
    pub std_err: Option<f64>,
    pub method: String,
    pub flag: String,
    pub quantity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config_hash: String,
    pub model: String,
    pub evaluation: String,
    pub seed: u64,
    pub trials: u64,
    pub schema_version: u32,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub metadata: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Row>,
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepTable {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.flag.starts_with("error"))
    }

    /// Metadata as `# key: value` lines, then the header and rows.
    pub fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        for (k, v) in [
            ("config_hash", m.config_hash.clone()),
            ("model", m.model.clone()),
            ("evaluation", m.evaluation.clone()),
            ("seed", m.seed.to_string()),
            ("trials", m.trials.to_string()),
            ("schema_version", m.schema_version.to_string()),
            ("tool_version", m.tool_version.clone()),
        ] {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.param.clone(),
                num(r.value),
                num(r.metric),
                num(r.std_err),
                r.method.clone(),
                r.flag.clone(),
                r.quantity.clone(),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}
