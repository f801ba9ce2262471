//! TOML model files.
//!
//! ```toml
//! [system]
//! n0 = 2
//!
//! [[direction]]
//! kind = "infinite"          # or "periodic" (needs `period`) or "finite" (needs `extent`)
//! n_pos = 1
//! n_neg = 1
//!
//! [matrices]
//! A_TT = [["-0.5", "0"], ["0", "-1"]]
//! A_TS = [...]
//! A_ST = [...]
//! A_SS = [...]
//! ```
//!
//! Entries are strings so that decimals stay exact; `"1/3"` is accepted too.

use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use sistab_core::model::BoundarySpec;
use sistab_core::rational::{parse_rational, rat_to_text};
use sistab_core::{DirectionKind, DirectionSpec, RatMatrix, SisModel};

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] sistab_core::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSystem {
    n0: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDirection {
    kind: String,
    n_pos: usize,
    n_neg: usize,
    period: Option<u32>,
    extent: Option<u32>,
    boundary: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileMatrices {
    #[serde(rename = "A_TT")]
    a_tt: Vec<Vec<String>>,
    #[serde(rename = "A_TS")]
    a_ts: Vec<Vec<String>>,
    #[serde(rename = "A_ST")]
    a_st: Vec<Vec<String>>,
    #[serde(rename = "A_SS")]
    a_ss: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    system: FileSystem,
    direction: Vec<FileDirection>,
    matrices: FileMatrices,
}

fn matrix(name: &str, rows: &[Vec<String>], expect_rows: usize, expect_cols: usize) -> Result<RatMatrix, ModelFileError> {
    let shape_err = |found: String| {
        ModelFileError::Invalid(format!(
            "shape mismatch in {name}: expected {expect_rows}x{expect_cols}, got {found}"
        ))
    };
    if rows.len() != expect_rows {
        return Err(shape_err(format!("{} rows", rows.len())));
    }
    let mut data: Vec<BigRational> = Vec::with_capacity(expect_rows * expect_cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expect_cols {
            return Err(shape_err(format!("{} columns in row {}", row.len(), i + 1)));
        }
        for (j, s) in row.iter().enumerate() {
            let v = parse_rational(s).map_err(|e| {
                ModelFileError::Invalid(format!("{name}[{}][{}]: {e}", i + 1, j + 1))
            })?;
            data.push(v);
        }
    }
    Ok(RatMatrix::new(expect_rows, expect_cols, data)?)
}

pub fn parse_model_str(text: &str) -> Result<SisModel, ModelFileError> {
    let f: ModelFile = toml::from_str(text)?;
    let n0 = f.system.n0;
    if n0 == 0 {
        return Err(ModelFileError::Invalid("system.n0 must be positive".into()));
    }
    if f.direction.is_empty() {
        return Err(ModelFileError::Invalid("at least one [[direction]] is required".into()));
    }
    let mut dirs = Vec::with_capacity(f.direction.len());
    let mut boundaries = Vec::new();
    for (i, d) in f.direction.iter().enumerate() {
        let kind = match d.kind.as_str() {
            "infinite" => DirectionKind::Infinite,
            "periodic" => DirectionKind::Periodic(d.period.ok_or_else(|| {
                ModelFileError::Invalid(format!("direction {} is periodic but has no `period`", i + 1))
            })?),
            "finite" => {
                let extent = d.extent.ok_or_else(|| {
                    ModelFileError::Invalid(format!("direction {} is finite but has no `extent`", i + 1))
                })?;
                if let Some(b) = &d.boundary {
                    let k = b.len();
                    boundaries.push(BoundarySpec {
                        direction: i,
                        matrix: matrix(&format!("boundary of direction {}", i + 1), b, k, k)?,
                    });
                }
                DirectionKind::Finite { extent }
            }
            other => {
                return Err(ModelFileError::Invalid(format!(
                    "direction {}: unknown kind '{other}' (expected infinite, periodic or finite)",
                    i + 1
                )))
            }
        };
        dirs.push(DirectionSpec {
            kind,
            n_pos: d.n_pos,
            n_neg: d.n_neg,
        });
    }
    let n: usize = dirs.iter().map(|d| d.width()).sum();
    let m = &f.matrices;
    let a_tt = matrix("A_TT", &m.a_tt, n0, n0)?;
    let a_ts = matrix("A_TS", &m.a_ts, n0, n)?;
    let a_st = matrix("A_ST", &m.a_st, n, n0)?;
    let a_ss = matrix("A_SS", &m.a_ss, n, n)?;
    Ok(SisModel::with_boundaries(a_tt, a_ts, a_st, a_ss, dirs, boundaries)?)
}

pub fn parse_model(path: &Path) -> Result<SisModel, ModelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model_str(&text)
}

/// SHA-256 of a canonical rendering of the model, so that formatting and
/// equivalent spellings of the same rational ("0.5", "1/2") hash alike.
pub fn model_hash(m: &SisModel) -> String {
    let mut h = Sha256::new();
    h.update(format!("n0={}\n", m.n0()));
    for d in m.directions() {
        h.update(format!("dir={:?},{},{}\n", d.kind, d.n_pos, d.n_neg));
    }
    for b in m.boundaries() {
        h.update(format!("boundary={}\n", b.direction));
        write_matrix(&mut h, &b.matrix);
    }
    for (name, a) in [("A_TT", m.a_tt()), ("A_TS", m.a_ts()), ("A_ST", m.a_st()), ("A_SS", m.a_ss())] {
        h.update(format!("{name}\n"));
        write_matrix(&mut h, a);
    }
    hex::encode(h.finalize())
}

fn write_matrix(h: &mut Sha256, a: &RatMatrix) {
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| rat_to_text(a.get(i, j))).collect();
        h.update(row.join(" "));
        h.update("\n");
    }
}
