//! JSON model files: `{"W1": [[±1; 16]; 2], "W2": [[±1; 2]; 2],
//! "norm_flag": [bool; 2], "norm_para": [f64 in 0..=1; 2]}`.

use qmlp::model::{QnnModel, Sign, HIDDEN, OUTPUTS};
use qmlp::encoding::INPUT_LEN;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelFileError {
    #[error("model is not valid JSON: {0}")]
    Json(String),
    #[error("model field {path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: &str, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Schema { path: path.to_string(), message: message.into() }
}

fn field<'a>(root: &'a Value, name: &str) -> Result<&'a Value, ModelFileError> {
    root.get(name).ok_or_else(|| schema(name, "missing"))
}

fn array<'a>(v: &'a Value, path: &str, len: usize) -> Result<&'a [Value], ModelFileError> {
    let items = v.as_array().ok_or_else(|| schema(path, "expected an array"))?;
    if items.len() != len {
        return Err(schema(path, format!("expected {len} entries, found {}", items.len())));
    }
    Ok(items)
}

fn sign(v: &Value, path: &str) -> Result<Sign, ModelFileError> {
    match v.as_f64() {
        Some(1.0) => Ok(Sign::Plus),
        Some(-1.0) => Ok(Sign::Minus),
        _ => Err(schema(path, format!("expected 1 or -1, found {v}"))),
    }
}

fn sign_matrix<const R: usize, const C: usize>(root: &Value, name: &str) -> Result<[[Sign; C]; R], ModelFileError> {
    let rows = array(field(root, name)?, name, R)?;
    let mut out = [[Sign::Plus; C]; R];
    for (r, row) in rows.iter().enumerate() {
        let row_path = format!("{name}[{r}]");
        for (c, v) in array(row, &row_path, C)?.iter().enumerate() {
            out[r][c] = sign(v, &format!("{row_path}[{c}]"))?;
        }
    }
    Ok(out)
}

/// Parses and validates a model, naming the offending field on failure.
pub fn parse_model(text: &str) -> Result<QnnModel, ModelFileError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ModelFileError::Json(e.to_string()))?;
    if !root.is_object() {
        return Err(schema("$", "expected an object"));
    }
    let w1 = sign_matrix::<HIDDEN, INPUT_LEN>(&root, "W1")?;
    let w2 = sign_matrix::<OUTPUTS, HIDDEN>(&root, "W2")?;

    let mut norm_flag = [false; OUTPUTS];
    for (j, v) in array(field(&root, "norm_flag")?, "norm_flag", OUTPUTS)?.iter().enumerate() {
        norm_flag[j] = v.as_bool().ok_or_else(|| schema(&format!("norm_flag[{j}]"), "expected a boolean"))?;
    }
    let mut norm_para = [0.0; OUTPUTS];
    for (j, v) in array(field(&root, "norm_para")?, "norm_para", OUTPUTS)?.iter().enumerate() {
        let path = format!("norm_para[{j}]");
        let p = v.as_f64().ok_or_else(|| schema(&path, "expected a number"))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(schema(&path, format!("{p} is outside [0, 1]")));
        }
        norm_para[j] = p;
    }
    Ok(QnnModel { w1, w2, norm_flag, norm_para })
}

pub fn model_to_json(model: &QnnModel) -> String {
    let mut text = serde_json::to_string_pretty(model).expect("model serializes");
    text.push('\n');
    text
}
