//! The 16-2-2 binary-weight network.

use std::ops::Neg;

use serde::Serialize;

use crate::encoding::INPUT_LEN;
use crate::error::{Error, Result};

pub const HIDDEN: usize = 2;
pub const OUTPUTS: usize = 2;

/// A binary weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(field: &str, value: f64) -> Result<Sign> {
        if value == 1.0 {
            Ok(Sign::Plus)
        } else if value == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::InvalidWeight { field: field.to_string(), value })
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

/// Hidden weights `w1[i][k]` connect input amplitude k to hidden neuron i;
/// `w2[j][i]` connects hidden neuron i to output j. Output j is combined
/// with a γ-biased qubit (`norm_para[j]`) by AND when `norm_flag[j]` is set
/// and by OR otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnnModel {
    #[serde(rename = "W1")]
    pub w1: [[Sign; INPUT_LEN]; HIDDEN],
    #[serde(rename = "W2")]
    pub w2: [[Sign; HIDDEN]; OUTPUTS],
    pub norm_flag: [bool; OUTPUTS],
    pub norm_para: [f64; OUTPUTS],
}

impl QnnModel {
    pub fn new(
        w1: [[Sign; INPUT_LEN]; HIDDEN],
        w2: [[Sign; HIDDEN]; OUTPUTS],
        norm_flag: [bool; OUTPUTS],
        norm_para: [f64; OUTPUTS],
    ) -> Result<Self> {
        let model = QnnModel { w1, w2, norm_flag, norm_para };
        model.validate()?;
        Ok(model)
    }

    /// All weights +1, AND normalization with γ = 1.
    pub fn all_plus() -> Self {
        QnnModel {
            w1: [[Sign::Plus; INPUT_LEN]; HIDDEN],
            w2: [[Sign::Plus; HIDDEN]; OUTPUTS],
            norm_flag: [true; OUTPUTS],
            norm_para: [1.0; OUTPUTS],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (j, &gamma) in self.norm_para.iter().enumerate() {
            if !(0.0..=1.0).contains(&gamma) {
                return Err(Error::ParameterRange { field: format!("norm_para[{j}]"), value: gamma });
            }
        }
        Ok(())
    }
}

/// Parses a ±1 weight slice; `field` names the slice in error messages.
pub fn signs_from_values<const N: usize>(field: &str, values: &[f64]) -> Result<[Sign; N]> {
    if values.len() != N {
        return Err(Error::WeightLength { got: values.len(), expected: N });
    }
    let mut out = [Sign::Plus; N];
    for (k, (&v, slot)) in values.iter().zip(out.iter_mut()).enumerate() {
        *slot = Sign::from_value(&format!("{field}[{k}]"), v)?;
    }
    Ok(out)
}
