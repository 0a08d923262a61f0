//! JSON wire formats shared by the CLI: matrices, completion problems,
//! certificates, and algebra descriptions, plus a serializer that prints
//! every float with 17 significant digits so reports are byte-identical
//! across runs and round-trip losslessly.

use serde::{Deserialize, Serialize};

use crate::completion::{CompletionCertificate, CompletionProblem};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, HermMat};

/// Row-major complex matrix: `data[k] = [re, im]` for entry
/// `(k / cols, k % cols)`. Parsers reject non-finite entries and any
/// unknown fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let data = (0..m.rows())
            .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
            .map(|(r, c)| {
                let z = m[(r, c)];
                [z.re, z.im]
            })
            .collect();
        MatrixJson { rows: m.rows(), cols: m.cols(), data }
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimMismatch(format!(
                "matrix declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let entries = self.data.iter().map(|&[re, im]| c64(re, im)).collect();
        CMat::from_vec(self.rows, self.cols, entries)
    }

    pub fn to_herm(&self) -> Result<HermMat> {
        HermMat::new(self.to_cmat()?)
    }
}

/// A single matrix or a list of them; inputs naming an off-diagonal
/// tuple accept both spellings.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixListJson {
    One(MatrixJson),
    Many(Vec<MatrixJson>),
}

impl MatrixListJson {
    pub fn to_cmats(&self) -> Result<Vec<CMat>> {
        match self {
            MatrixListJson::One(m) => Ok(vec![m.to_cmat()?]),
            MatrixListJson::Many(ms) => ms.iter().map(MatrixJson::to_cmat).collect(),
        }
    }
}

/// `"identity"` or an explicit Hermitian matrix.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TargetSumJson {
    Keyword(String),
    Matrix(MatrixJson),
}

/// Completion problem: off-diagonal blocks, optional target sum
/// (defaults to the identity), optional strictness margin (defaults to
/// the caller-provided value).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub offdiag: MatrixListJson,
    #[serde(default)]
    pub target_sum: Option<TargetSumJson>,
    #[serde(default)]
    pub delta: Option<f64>,
}

impl ProblemJson {
    pub fn to_problem(&self, default_delta: f64) -> Result<CompletionProblem> {
        let offdiag = self.offdiag.to_cmats()?;
        let delta = self.delta.unwrap_or(default_delta);
        match &self.target_sum {
            None => CompletionProblem::with_identity_sum(offdiag, delta),
            Some(TargetSumJson::Keyword(k)) if k == "identity" => {
                CompletionProblem::with_identity_sum(offdiag, delta)
            }
            Some(TargetSumJson::Keyword(k)) => Err(Error::Json(format!(
                "target_sum keyword must be \"identity\", got {k:?}"
            ))),
            Some(TargetSumJson::Matrix(m)) => {
                CompletionProblem::new(offdiag, m.to_herm()?, delta)
            }
        }
    }
}

/// Completion certificate as emitted and re-read by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub blocks: Vec<MatrixJson>,
    pub lambda_min: f64,
    pub sum_residual: f64,
    pub iterations: usize,
}

impl CertificateJson {
    pub fn from_certificate(cert: &CompletionCertificate) -> Self {
        CertificateJson {
            blocks: cert.blocks.iter().map(|b| MatrixJson::from_cmat(b.mat())).collect(),
            lambda_min: cert.lambda_min_assembled,
            sum_residual: cert.sum_residual,
            iterations: cert.iterations,
        }
    }

    pub fn to_certificate(&self) -> Result<CompletionCertificate> {
        let blocks: Vec<HermMat> =
            self.blocks.iter().map(MatrixJson::to_herm).collect::<Result<_>>()?;
        Ok(CompletionCertificate {
            blocks,
            lambda_min_assembled: self.lambda_min,
            sum_residual: self.sum_residual,
            iterations: self.iterations,
        })
    }
}

/// Subalgebra description by generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub ambient_dim: usize,
    pub generators: Vec<MatrixJson>,
}

impl AlgebraJson {
    pub fn build(&self) -> Result<crate::subalgebra::StarAlgebraBasis> {
        let gens: Vec<CMat> =
            self.generators.iter().map(MatrixJson::to_cmat).collect::<Result<_>>()?;
        crate::subalgebra::build_algebra(self.ambient_dim, &gens)
    }
}

/// Formatter printing every finite float as `{:.16e}` (17 significant
/// digits — enough to reproduce the exact bits on parse).
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with the fixed-precision float format; deterministic for
/// deterministic inputs.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Json(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Json(e.to_string()))
}

/// Parse a JSON document, mapping syntax and schema problems onto the
/// crate's error type.
pub fn from_json_str<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let mut m = CMat::zeros(2, 3);
        m[(0, 0)] = c64(1.0 / 3.0, -2.0 / 7.0);
        m[(1, 2)] = c64(f64::MIN_POSITIVE, 1e300);
        m[(0, 2)] = c64(-0.0, 5.5e-17);
        let js = to_json_string(&MatrixJson::from_cmat(&m)).unwrap();
        let back: MatrixJson = from_json_str(&js).unwrap();
        let m2 = back.to_cmat().unwrap();
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(m[(r, c)], m2[(r, c)], "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn seventeen_digit_format() {
        let js = to_json_string(&0.5f64).unwrap();
        assert_eq!(js, "5.0000000000000000e-1");
    }

    #[test]
    fn rejects_nan_and_shape_lies() {
        let bad = r#"{"rows": 1, "cols": 1, "data": [[NaN, 0.0]]}"#;
        assert!(from_json_str::<MatrixJson>(bad).is_err());
        let short = MatrixJson { rows: 2, cols: 2, data: vec![[1.0, 0.0]] };
        assert!(short.to_cmat().is_err());
        let inf = MatrixJson { rows: 1, cols: 1, data: vec![[f64::INFINITY, 0.0]] };
        assert!(inf.to_cmat().is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = r#"{"rows": 1, "cols": 1, "data": [[0.0, 0.0]], "极": 1}"#;
        assert!(from_json_str::<MatrixJson>(bad).is_err());
        let bad = r#"{"offdiag": [], "Delta": 0.1}"#;
        assert!(from_json_str::<ProblemJson>(bad).is_err());
    }

    #[test]
    fn problem_target_sum_spellings() {
        let m = r#"{"rows":1,"cols":1,"data":[[0.4,0.0]]}"#;
        let with_kw: ProblemJson =
            from_json_str(&format!(r#"{{"offdiag":[{m}],"target_sum":"identity"}}"#)).unwrap();
        let p = with_kw.to_problem(1e-6).unwrap();
        assert_eq!(p.block_dim(), 1);
        assert_eq!(p.delta(), 1e-6);

        let with_mat: ProblemJson = from_json_str(&format!(
            r#"{{"offdiag":[{m}],"target_sum":{{"rows":1,"cols":1,"data":[[2.0,0.0]]}},"delta":0.0}}"#
        ))
        .unwrap();
        let p = with_mat.to_problem(1e-6).unwrap();
        assert_eq!(p.delta(), 0.0);
        assert_eq!(p.target_sum().get(0, 0).re, 2.0);

        let bad_kw: ProblemJson =
            from_json_str(&format!(r#"{{"offdiag":[{m}],"target_sum":"zero"}}"#)).unwrap();
        assert!(bad_kw.to_problem(1e-6).is_err());

        // A bare matrix is accepted for a single off-diagonal block.
        let bare: ProblemJson =
            from_json_str(&format!(r#"{{"offdiag":{m},"delta":1e-4}}"#)).unwrap();
        let p = bare.to_problem(1e-6).unwrap();
        assert_eq!(p.n_blocks(), 2);
        assert_eq!(p.delta(), 1e-4);
    }

    #[test]
    fn certificate_round_trip() {
        let cert = CompletionCertificate {
            blocks: vec![
                HermMat::scaled_identity(1, 0.8),
                HermMat::scaled_identity(1, 0.2),
            ],
            lambda_min_assembled: 0.0,
            sum_residual: 0.0,
            iterations: 3,
        };
        let js = to_json_string(&CertificateJson::from_certificate(&cert)).unwrap();
        let back = from_json_str::<CertificateJson>(&js).unwrap().to_certificate().unwrap();
        assert_eq!(back.blocks.len(), 2);
        assert_eq!(back.blocks[0].get(0, 0).re, 0.8);
        assert_eq!(back.iterations, 3);
    }
}
