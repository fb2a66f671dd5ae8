//! JSON file formats for models, observable sets and states.
//!
//! Every complex matrix is written as nested rows of `{"re": .., "im": ..}`
//! objects. A model file is
//!
//! ```json
//! {"dim": 3,
//!  "hamiltonian": [[{"re": 0.0, "im": 0.0}, ...], ...],
//!  "jumps": [{"rate": 1.0, "matrix": [[...], ...]}]}
//! ```
//!
//! where an omitted `hamiltonian` means the zero matrix. Observable files are
//! a JSON array of such matrices and a state file is a single matrix.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::ComplexMatrix;
use crate::analysis::ObservableSet;
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, Jump, LindbladModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> Self {
        C64::new(e.re, e.im)
    }
}

pub type MatrixJson = Vec<Vec<ComplexEntry>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| z.into()).collect())
        .collect()
}

/// Converts nested rows to a matrix; `field` names the JSON location in errors.
pub fn matrix_from_json(rows: &MatrixJson, field: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&e| e.into()).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::Parse(format!("{field}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpFile {
    pub rate: f64,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixJson>,
    #[serde(default)]
    pub jumps: Vec<JumpFile>,
}

impl ModelFile {
    pub fn from_model(model: &LindbladModel) -> Self {
        Self {
            dim: model.dim(),
            hamiltonian: Some(matrix_to_json(model.hamiltonian())),
            jumps: model
                .jumps()
                .iter()
                .map(|j| JumpFile {
                    rate: j.rate,
                    matrix: matrix_to_json(&j.operator),
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<LindbladModel> {
        let n = self.dim;
        let hamiltonian = match &self.hamiltonian {
            Some(h) => matrix_from_json(h, "hamiltonian")?,
            None => ComplexMatrix::zeros(n, n),
        };
        let jumps = self
            .jumps
            .iter()
            .enumerate()
            .map(|(k, j)| {
                Ok(Jump {
                    rate: j.rate,
                    operator: matrix_from_json(&j.matrix, &format!("jumps[{k}].matrix"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LindbladModel::new(n, hamiltonian, jumps)
    }
}

fn json_err(what: &str) -> impl Fn(serde_json::Error) -> Error + '_ {
    move |e| Error::Parse(format!("{what}: {e}"))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_model(text: &str) -> Result<LindbladModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(json_err("model file"))?;
    file.to_model()
}

pub fn model_to_json(model: &LindbladModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes")
}

pub fn parse_observables(text: &str) -> Result<ObservableSet> {
    let raw: Vec<MatrixJson> = serde_json::from_str(text).map_err(json_err("observables file"))?;
    let mats = raw
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, &format!("observables[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    ObservableSet::new(mats).map_err(|e| Error::Parse(format!("observables file: {e}")))
}

pub fn observables_to_json(set: &ObservableSet) -> String {
    let raw: Vec<MatrixJson> = set.iter().map(matrix_to_json).collect();
    serde_json::to_string_pretty(&raw).expect("observables serialize")
}

/// Parses a state file. Malformed JSON is a parse error; a well-formed matrix
/// that is not a density matrix is [`Error::InvalidState`].
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let raw: MatrixJson = serde_json::from_str(text).map_err(json_err("state file"))?;
    DensityMatrix::new(matrix_from_json(&raw, "state")?)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&matrix_to_json(rho.matrix())).expect("state serializes")
}
