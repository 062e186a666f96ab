//! Versioned JSON and CSV rendering. Every float is rounded to 12
//! significant digits before printing so that outputs compare byte for byte.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round12(x);
    if r == 0.0 || (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// Output of one command: a JSON body and a CSV table with `# key = value`
/// notes above it.
pub struct Doc {
    pub command: String,
    pub body: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, String)>,
}

impl Doc {
    pub fn new(command: &str, body: Value) -> Self {
        Doc {
            command: command.into(),
            body,
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn table(mut self, columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Self {
        self.columns = columns;
        self.rows = rows;
        self
    }

    pub fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("schema".into(), Value::String(format!("critline/{SCHEMA_VERSION}")));
                top.insert("command".into(), Value::String(self.command.clone()));
                top.insert("result".into(), round_value(self.body.clone()));
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# critline-csv {SCHEMA_VERSION} {}\n", self.command);
                for (k, v) in &self.notes {
                    s.push_str(&format!("# {k} = {v}\n"));
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                if !self.columns.is_empty() {
                    w.write_record(&self.columns).expect("csv");
                }
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::render)).expect("csv");
                }
                s.push_str(&String::from_utf8(w.into_inner().expect("csv")).expect("utf8"));
                s
            }
        }
    }
}

/// Round every float in a JSON tree; non-finite values become strings.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round12(x))
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(fmt12(x)))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(f64::INFINITY), "inf");
    }

    #[test]
    fn json_floats_are_rounded() {
        let v = round_value(serde_json::json!({"x": [1.0 / 3.0, 7], "y": f64::NAN}));
        assert_eq!(v["x"][0].as_f64(), Some(0.333333333333));
        assert_eq!(v["x"][1].as_i64(), Some(7));
    }

    #[test]
    fn csv_has_versioned_header() {
        let d = Doc::new("eval", Value::Null)
            .table(vec!["a", "b"], vec![vec![Cell::Num(0.5), Cell::Text("x".into())]])
            .note("family", "zeta2 (minus)");
        let out = d.render(Format::Csv);
        assert_eq!(out, "# critline-csv 1 eval\n# family = zeta2 (minus)\na,b\n0.5,x\n");
    }
}
