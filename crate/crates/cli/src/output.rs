use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{CliError, CliResult};

/// Decimal with exactly 17 significant digits; scientific notation outside
/// `1e-5 <= |x| < 1e17`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0000000000000000" } else { "0.0000000000000000" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..17).contains(&exp) {
        let e = if exp < 0 { format!("-{:02}", -exp) } else { format!("+{exp:02}") };
        return format!("{sign}{}.{}e{e}", &digits[..1], &digits[1..]);
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// JSON number in [`sig17`] form; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&sig17(x)).expect("valid decimal"))
    } else {
        Value::Null
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn interval(ci: Option<(f64, f64)>) -> Value {
    match ci {
        Some((lo, hi)) => Value::Array(vec![num(lo), num(hi)]),
        None => Value::Null,
    }
}

/// One reported quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub quantity: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    pub ci: Value,
    pub n_samples: usize,
    pub epsilon: Value,
    pub delta: Value,
    pub seed: u64,
    pub body_id: String,
}

impl Record {
    pub fn new(quantity: &str, value: Value, n_samples: usize, seed: u64, body_id: &str) -> Self {
        Record {
            quantity: quantity.into(),
            value,
            flag: None,
            ci: Value::Null,
            n_samples,
            epsilon: Value::Null,
            delta: Value::Null,
            seed,
            body_id: body_id.into(),
        }
    }

    pub fn flag(mut self, flag: Option<String>) -> Self {
        self.flag = flag;
        self
    }

    pub fn ci(mut self, ci: Option<(f64, f64)>) -> Self {
        self.ci = interval(ci);
        self
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.epsilon = num(eps);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = num(delta);
        self
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
