//! Certificate files: JSON with Gram matrices as row-major decimal strings.
//! Rust's shortest round-trip float formatting makes write → read exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sistab_core::sos::{CertBlock, Certificate, GramBasisSpec, VerificationReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFile {
    /// Index of the certified polynomial.
    pub poly: usize,
    /// Domain polynomial multiplying this block, if any.
    pub multiplier: Option<usize>,
    pub nhat: Vec<u32>,
    pub re: Vec<Vec<String>>,
    pub im: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub model_hash: String,
    pub epsilon: f64,
    pub blocks: Vec<BlockFile>,
    pub residual: f64,
    pub min_eig: f64,
    pub lower_bound: f64,
    pub valid: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CertFileError {
    #[error("invalid certificate: {0}")]
    Invalid(String),
    #[error("invalid certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn strings(m: &DMatrix<Complex64>, part: impl Fn(&Complex64) -> f64) -> Vec<Vec<String>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)]).to_string()).collect())
        .collect()
}

fn parse_matrix(rows: &[Vec<String>], n: usize, what: &str) -> Result<DMatrix<f64>, CertFileError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CertFileError::Invalid(format!("{what} must be {n}x{n}")));
    }
    let mut out = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, s) in r.iter().enumerate() {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| CertFileError::Invalid(format!("{what}[{i}][{j}] = '{s}' is not a decimal number")))?;
            if !v.is_finite() {
                return Err(CertFileError::Invalid(format!("{what}[{i}][{j}] is not finite")));
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

impl CertificateFile {
    pub fn new(cert: &Certificate, report: &VerificationReport, model_hash: String) -> Self {
        CertificateFile {
            model_hash,
            epsilon: cert.epsilon,
            blocks: cert
                .blocks
                .iter()
                .map(|b| BlockFile {
                    poly: b.poly,
                    multiplier: b.multiplier,
                    nhat: b.basis.nhat.clone(),
                    re: strings(&b.gram, |c| c.re),
                    im: strings(&b.gram, |c| c.im),
                })
                .collect(),
            residual: report.residual,
            min_eig: report.min_eig,
            lower_bound: report.lower_bound,
            valid: report.valid,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CertFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Gram data only; the recorded residual/validity are not trusted.
    pub fn to_certificate(&self) -> Result<Certificate, CertFileError> {
        if !self.epsilon.is_finite() {
            return Err(CertFileError::Invalid("epsilon is not finite".into()));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (k, b) in self.blocks.iter().enumerate() {
            let basis = GramBasisSpec::new(b.nhat.clone());
            let n = basis.len();
            let re = parse_matrix(&b.re, n, &format!("blocks[{k}].re"))?;
            let im = parse_matrix(&b.im, n, &format!("blocks[{k}].im"))?;
            blocks.push(CertBlock {
                poly: b.poly,
                multiplier: b.multiplier,
                basis,
                gram: DMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)])),
            });
        }
        Ok(Certificate {
            epsilon: self.epsilon,
            blocks,
            residual: f64::NAN,
            min_eig: f64::NAN,
        })
    }
}
