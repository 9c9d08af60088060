//! JSON documents for channels, code subspaces and states.
//!
//! Matrices are row-major arrays of rows, each entry a `[re, im]` pair.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{DensityOperator, EnvironmentModel, QuantumOperation};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};
use crate::reversal::CodeSubspace;

/// Agreement required between `kraus` and `env_model` when a file gives both.
pub const MODEL_AGREEMENT_TOL: f64 = 1e-9;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Decodes a matrix and checks its shape against `(rows, cols)`.
pub fn matrix_from_json(
    rows_json: &MatrixJson,
    rows: usize,
    cols: usize,
    what: &str,
) -> Result<ComplexMatrix> {
    if rows_json.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} rows, expected {rows}",
            rows_json.len()
        )));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (i, row) in rows_json.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{what} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = c64(re, im);
        }
    }
    Ok(m)
}

fn column_count(rows_json: &MatrixJson) -> usize {
    rows_json.first().map_or(0, Vec::len)
}

/// Coupling of the system to an environment that reproduces the channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvModelSpec {
    pub unitary: MatrixJson,
    pub env_state: MatrixJson,
    /// Orthonormal observation vectors as columns.
    pub observation_basis: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub dim: usize,
    pub kraus: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_model: Option<EnvModelSpec>,
}

impl ChannelSpec {
    pub fn from_operation(op: &QuantumOperation) -> Self {
        ChannelSpec {
            dim: op.dim(),
            kraus: op.kraus().iter().map(matrix_to_json).collect(),
            env_model: None,
        }
    }

    /// Builds the operation. When an environment model is present it is
    /// validated; an empty `kraus` list is then filled from the model, and a
    /// nonempty one must describe the same operation.
    pub fn to_operation(&self) -> Result<QuantumOperation> {
        let from_kraus = if self.kraus.is_empty() {
            None
        } else {
            let kraus = self
                .kraus
                .iter()
                .enumerate()
                .map(|(k, m)| matrix_from_json(m, self.dim, self.dim, &format!("kraus[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            Some(QuantumOperation::new(kraus)?)
        };
        let from_model = match &self.env_model {
            None => None,
            Some(spec) => Some(self.environment_model(spec)?.kraus()?),
        };
        match (from_kraus, from_model) {
            (Some(op), None) | (None, Some(op)) => Ok(op),
            (Some(op), Some(model)) => {
                let gap = op.superoperator().max_abs_diff(&model.superoperator());
                if gap > MODEL_AGREEMENT_TOL {
                    return Err(Error::NotEquivalent(gap));
                }
                Ok(op)
            }
            (None, None) => Err(Error::DimensionMismatch(
                "channel lists no operators and no environment model".into(),
            )),
        }
    }

    fn environment_model(&self, spec: &EnvModelSpec) -> Result<EnvironmentModel> {
        let env_dim = spec.env_state.len();
        let total = self.dim * env_dim;
        EnvironmentModel::new(
            self.dim,
            matrix_from_json(&spec.unitary, total, total, "env_model.unitary")?,
            matrix_from_json(&spec.env_state, env_dim, env_dim, "env_model.env_state")?,
            matrix_from_json(
                &spec.observation_basis,
                env_dim,
                column_count(&spec.observation_basis),
                "env_model.observation_basis",
            )?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub physical_dim: usize,
    pub logical_dim: usize,
    /// `physical_dim × logical_dim` matrix with the code basis as columns.
    pub isometry: MatrixJson,
}

impl CodeSpec {
    pub fn from_code(code: &CodeSubspace) -> Self {
        CodeSpec {
            physical_dim: code.physical_dim(),
            logical_dim: code.logical_dim(),
            isometry: matrix_to_json(code.isometry()),
        }
    }

    pub fn to_code(&self) -> Result<CodeSubspace> {
        CodeSubspace::new(matrix_from_json(
            &self.isometry,
            self.physical_dim,
            self.logical_dim,
            "isometry",
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub dim: usize,
    pub matrix: MatrixJson,
}

impl StateSpec {
    pub fn from_state(rho: &DensityOperator) -> Self {
        StateSpec {
            dim: rho.dim(),
            matrix: matrix_to_json(rho.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        DensityOperator::new(matrix_from_json(
            &self.matrix,
            self.dim,
            self.dim,
            "matrix",
        )?)
    }
}

/// Parses JSON text; failures name the source and the line and column.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: source.to_string(),
        message: format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            strip_position(&e)
        ),
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(cut) => text[..cut].to_string(),
        None => text,
    }
}

/// Reads and parses a JSON file.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, &path.display().to_string())
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}
