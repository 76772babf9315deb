//! JSON ensemble files.
//!
//! ```json
//! {
//!   "members": [
//!     { "weight": 0.5, "bloch": [0, 0, 1] },
//!     { "weight": 0.5, "rho": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]] }
//!   ],
//!   "tolerances": { "tol": 1e-9 }
//! }
//! ```
//!
//! Weights are used exactly as written. A `rho` entry must have unit trace: its trace is never
//! folded into the weight.

use std::path::Path;

use qubit_md::{from_density_matrix, BlochVector, Ensemble, Tolerances, WeightedState};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("member {index}: {message}")]
    Member { index: usize, message: String },
    #[error("expected 1 to 4 members, found {0}")]
    Count(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub members: Vec<MemberEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberEntry {
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    /// Row-major 2×2 matrix of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<[[[f64; 2]; 2]; 2]>,
}

impl EnsembleFile {
    pub fn from_ensemble(ensemble: &Ensemble) -> Self {
        Self {
            members: ensemble
                .members()
                .iter()
                .map(|m| MemberEntry {
                    weight: m.weight,
                    bloch: Some(m.bloch.to_array()),
                    rho: None,
                })
                .collect(),
            tolerances: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// File tolerances over the defaults.
    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    /// Validates every member; indices in errors are 1-based.
    pub fn ensemble(&self, tol: f64) -> Result<Ensemble, FileError> {
        if self.members.is_empty() || self.members.len() > Ensemble::MAX_MEMBERS {
            return Err(FileError::Count(self.members.len()));
        }
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(k, entry)| {
                entry.state(tol).map_err(|message| FileError::Member {
                    index: k + 1,
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ensemble::new(members).map_err(|e| FileError::Member {
            index: 0,
            message: e.to_string(),
        })
    }
}

impl MemberEntry {
    fn state(&self, tol: f64) -> Result<WeightedState, String> {
        let bloch = match (self.bloch, self.rho) {
            (Some(v), None) => BlochVector::from(v),
            (None, Some(rho)) => {
                let m = rho.map(|row| row.map(|[re, im]| qubit_md::bloch::Complex64::new(re, im)));
                let op = from_density_matrix(&m, tol).map_err(|e| e.to_string())?;
                if (op.trace - 1.0).abs() > tol {
                    return Err(format!(
                        "rho has trace {}, expected 1 (put the prior in \"weight\")",
                        op.trace
                    ));
                }
                op.bloch
            }
            (Some(_), Some(_)) => return Err("give either \"bloch\" or \"rho\", not both".into()),
            (None, None) => return Err("missing \"bloch\" or \"rho\"".into()),
        };
        WeightedState::new(self.weight, bloch, tol).map_err(|e| e.to_string())
    }
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message.to_string(),
    }
}
