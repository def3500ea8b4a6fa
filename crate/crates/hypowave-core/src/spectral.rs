//! Group-agnostic Fourier-side fields and their JSON interchange format.
//!
//! The two concrete field types ([`SpectralFieldSU2`], [`SpectralFieldHeis`])
//! share the operations the rest of the workbench needs — Plancherel norm,
//! row weights by functions of the sub-Laplacian, Sobolev norms — so this
//! module wraps them in one enum and defines a single on-disk JSON schema:
//!
//! ```json
//! {"group": "su2", "lmax2": 2, "coeffs": {"2": [[[re, im], ...], ...]}}
//! {"group": "heis", "trunc": 4, "lambdas": [...], "coeffs": [[[[re, im], ...], ...], ...]}
//! ```
//!
//! SU(2) coefficient keys are *doubled* representation labels (so `"1"` is
//! the spin-1/2 block); matrices are row-major with `[re, im]` entry pairs.
//! Parsing validates shapes against the labels and reports the offending key
//! in every error.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heisenberg::{HeisError, SpectralFieldHeis};
use crate::su2::{HalfInt, SpectralFieldSU2, Su2Error};

/// Errors from field construction or (de)serialisation.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Su2(#[from] Su2Error),
    #[error(transparent)]
    Heis(#[from] HeisError),
    #[error("JSON syntax: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coefficient key {key:?} is not a doubled representation label")]
    BadKey { key: String },
    #[error("coefficient at {key:?}: row {row} has {got} entries, expected {expected}")]
    RaggedMatrix { key: String, row: usize, expected: usize, got: usize },
}

/// A Fourier-side field on either group.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralField {
    Su2(SpectralFieldSU2),
    Heis(SpectralFieldHeis),
}

impl SpectralField {
    /// Short group tag used in reports and file names.
    pub fn group_name(&self) -> &'static str {
        match self {
            SpectralField::Su2(_) => "su2",
            SpectralField::Heis(_) => "heis",
        }
    }

    /// Plancherel norm of the field (group-appropriate normalisation).
    pub fn plancherel_norm(&self) -> f64 {
        match self {
            SpectralField::Su2(f) => f.plancherel_norm(),
            SpectralField::Heis(f) => f.plancherel_norm(),
        }
    }

    /// Applies a function of the sub-Laplacian: row weights `g(μ)` where `μ`
    /// runs over the per-row sub-Laplacian eigenvalues.
    pub fn weighted_rows(&self, g: impl Fn(f64) -> f64) -> Self {
        match self {
            SpectralField::Su2(f) => SpectralField::Su2(f.weighted_rows(g)),
            SpectralField::Heis(f) => SpectralField::Heis(f.weighted_rows(g)),
        }
    }

    /// Sobolev norm `‖(I + L)^{s/2} f‖` in the Plancherel normalisation.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_rows(|mu| (1.0 + mu).powf(s / 2.0)).plancherel_norm()
    }

    /// Scales every coefficient by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        match self {
            SpectralField::Su2(f) => SpectralField::Su2(f.scaled(factor)),
            SpectralField::Heis(f) => SpectralField::Heis(f.scaled(factor)),
        }
    }
}

impl From<SpectralFieldSU2> for SpectralField {
    fn from(f: SpectralFieldSU2) -> Self {
        SpectralField::Su2(f)
    }
}

impl From<SpectralFieldHeis> for SpectralField {
    fn from(f: SpectralFieldHeis) -> Self {
        SpectralField::Heis(f)
    }
}

/// Row-major complex matrix as nested `[re, im]` pairs.
type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "lowercase", deny_unknown_fields)]
enum FieldJson {
    Su2 {
        lmax2: u32,
        coeffs: BTreeMap<String, MatrixJson>,
    },
    Heis {
        trunc: usize,
        lambdas: Vec<f64>,
        coeffs: Vec<MatrixJson>,
    },
}

fn matrix_to_json(m: &DMatrix<Complex64>) -> MatrixJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Rebuilds a dense matrix, rejecting ragged rows with the offending key.
fn matrix_from_json(key: &str, rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<Complex64>, SpectralError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    for (row, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(SpectralError::RaggedMatrix {
                key: key.to_owned(),
                row,
                expected: ncols,
                got: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// Serialises a field to the interchange JSON (pretty-printed, stable order).
pub fn to_json_string(field: &SpectralField) -> Result<String, SpectralError> {
    let json = match field {
        SpectralField::Su2(f) => FieldJson::Su2 {
            lmax2: f.lmax().twice(),
            coeffs: f
                .iter()
                .map(|(l, m)| (l.twice().to_string(), matrix_to_json(m)))
                .collect(),
        },
        SpectralField::Heis(f) => FieldJson::Heis {
            trunc: f.trunc(),
            lambdas: f.lambdas().to_vec(),
            coeffs: f.iter().map(|(_, m)| matrix_to_json(m)).collect(),
        },
    };
    Ok(serde_json::to_string_pretty(&json)?)
}

/// Parses a field from the interchange JSON, validating every shape.
pub fn from_json_str(s: &str) -> Result<SpectralField, SpectralError> {
    match serde_json::from_str::<FieldJson>(s)? {
        FieldJson::Su2 { lmax2, coeffs } => {
            let mut field = SpectralFieldSU2::new(HalfInt::from_twice(lmax2));
            for (key, rows) in &coeffs {
                let twice: u32 =
                    key.parse().map_err(|_| SpectralError::BadKey { key: key.clone() })?;
                let matrix = matrix_from_json(key, rows)?;
                field.insert(HalfInt::from_twice(twice), matrix)?;
            }
            Ok(SpectralField::Su2(field))
        }
        FieldJson::Heis { trunc, lambdas, coeffs } => {
            let matrices = coeffs
                .iter()
                .enumerate()
                .map(|(i, rows)| matrix_from_json(&i.to_string(), rows))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SpectralField::Heis(SpectralFieldHeis::new(trunc, lambdas, matrices)?))
        }
    }
}
