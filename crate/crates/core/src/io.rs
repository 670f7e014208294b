//! JSON file formats.
//!
//! Every file is an object tagged by `"kind"`. Matrices are row-major arrays
//! of rows, each entry a `[re, im]` pair:
//!
//! ```text
//! {"kind":"density","dim":2,"matrix":[[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}
//! {"kind":"ensemble","dim":2,"items":[{"p":0.5,"matrix":...},...]}
//! {"kind":"bipartite","dims":[2,2],"matrix":...}
//! {"kind":"separable","dims":[2,2],"terms":[{"p":0.5,"a":...,"b":...},...]}
//! {"kind":"measurement","dim":2,"operators":[...],"form":"kraus"|"effects"}
//! {"kind":"basis","dim":2,"matrix":...}     (columns are the basis vectors)
//! ```
//!
//! Reals are written in shortest round-trip form (at most 17 significant
//! digits), so `load(save(x)) == x` bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::operations::{Measurement, OperatorForm, ProjectiveBasis};
use crate::states::{BipartiteState, DensityMatrix, Ensemble, SeparableSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixRepr(pub Vec<Vec<[f64; 2]>>);

impl From<&ComplexMatrix> for MatrixRepr {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixRepr(m.to_rows().into_iter().map(|row| row.into_iter().map(|z| [z.re, z.im]).collect()).collect())
    }
}

impl MatrixRepr {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_rows(
            self.0.iter().map(|row| row.iter().map(|&[re, im]| c(re, im)).collect()).collect(),
        )
    }

    fn square(&self, expected: usize, what: &str) -> Result<ComplexMatrix> {
        let m = self.to_matrix()?;
        if m.rows() != expected || m.cols() != expected {
            return Err(Error::Dimension(format!(
                "{what}: declared dimension {expected} but matrix is {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleItem {
    pub p: f64,
    pub matrix: MatrixRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub p: f64,
    pub a: MatrixRepr,
    pub b: MatrixRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Document {
    Density { dim: usize, matrix: MatrixRepr },
    Ensemble { dim: usize, items: Vec<EnsembleItem> },
    Bipartite { dims: [usize; 2], matrix: MatrixRepr },
    Separable { dims: [usize; 2], terms: Vec<SeparableTerm> },
    Measurement { dim: usize, operators: Vec<MatrixRepr>, form: OperatorForm },
    Basis { dim: usize, matrix: MatrixRepr },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Density { .. } => "density",
            Document::Ensemble { .. } => "ensemble",
            Document::Bipartite { .. } => "bipartite",
            Document::Separable { .. } => "separable",
            Document::Measurement { .. } => "measurement",
            Document::Basis { .. } => "basis",
        }
    }

    pub fn from_state(s: &DensityMatrix) -> Self {
        Document::Density { dim: s.dim(), matrix: s.matrix().into() }
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        Document::Ensemble {
            dim: e.dim(),
            items: e.iter().map(|(p, m)| EnsembleItem { p, matrix: m.matrix().into() }).collect(),
        }
    }

    pub fn from_bipartite(s: &BipartiteState) -> Self {
        let (da, db) = s.dims();
        Document::Bipartite { dims: [da, db], matrix: s.matrix().into() }
    }

    pub fn from_separable(spec: &SeparableSpec) -> Self {
        let (da, db) = spec.dims();
        Document::Separable {
            dims: [da, db],
            terms: spec
                .probs()
                .iter()
                .zip(spec.a_parts())
                .zip(spec.b_parts())
                .map(|((p, a), b)| SeparableTerm { p: *p, a: a.matrix().into(), b: b.matrix().into() })
                .collect(),
        }
    }

    pub fn from_measurement(m: &Measurement) -> Self {
        Document::Measurement {
            dim: m.dim(),
            operators: m.operators().iter().map(MatrixRepr::from).collect(),
            form: OperatorForm::Kraus,
        }
    }

    pub fn from_basis(b: &ProjectiveBasis) -> Self {
        Document::Basis { dim: b.dim(), matrix: b.unitary().into() }
    }

    fn wrong_kind(&self, expected: &str) -> Error {
        Error::Validation(format!("expected a {expected} file, found kind \"{}\"", self.kind()))
    }

    pub fn into_state(self) -> Result<DensityMatrix> {
        match self {
            Document::Density { dim, matrix } => {
                linalg::check_dim(dim)?;
                DensityMatrix::new(matrix.square(dim, "density")?)
            }
            other => Err(other.wrong_kind("density")),
        }
    }

    pub fn into_ensemble(self) -> Result<Ensemble> {
        match self {
            Document::Ensemble { dim, items } => {
                linalg::check_dim(dim)?;
                let mut probs = Vec::with_capacity(items.len());
                let mut members = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    probs.push(item.p);
                    let m = item.matrix.square(dim, &format!("items[{i}]"))?;
                    members.push(DensityMatrix::new(m).map_err(|e| context(e, &format!("items[{i}]")))?);
                }
                Ensemble::new(probs, members)
            }
            other => Err(other.wrong_kind("ensemble")),
        }
    }

    pub fn into_separable(self) -> Result<SeparableSpec> {
        match self {
            Document::Separable { dims: [da, db], terms } => {
                linalg::check_dim(da.saturating_mul(db))?;
                if terms.is_empty() {
                    return Err(Error::Validation("separable spec has no terms".into()));
                }
                let mut probs = Vec::new();
                let mut a_parts = Vec::new();
                let mut b_parts = Vec::new();
                for (i, t) in terms.iter().enumerate() {
                    probs.push(t.p);
                    let a = t.a.square(da, &format!("terms[{i}].a"))?;
                    let b = t.b.square(db, &format!("terms[{i}].b"))?;
                    a_parts.push(DensityMatrix::new(a).map_err(|e| context(e, &format!("terms[{i}].a")))?);
                    b_parts.push(DensityMatrix::new(b).map_err(|e| context(e, &format!("terms[{i}].b")))?);
                }
                SeparableSpec::new(probs, a_parts, b_parts)
            }
            other => Err(other.wrong_kind("separable")),
        }
    }

    /// Accepts bipartite files, and separable files (compiled).
    pub fn into_bipartite(self) -> Result<BipartiteState> {
        match self {
            Document::Bipartite { dims: [da, db], matrix } => {
                let n = da.checked_mul(db).ok_or_else(|| Error::Dimension("dims overflow".into()))?;
                linalg::check_dim(n)?;
                BipartiteState::new((da, db), DensityMatrix::new(matrix.square(n, "bipartite")?)?)
            }
            sep @ Document::Separable { .. } => sep.into_separable()?.compile(),
            other => Err(other.wrong_kind("bipartite")),
        }
    }

    pub fn into_measurement(self) -> Result<Measurement> {
        match self {
            Document::Measurement { dim, operators, form } => {
                linalg::check_dim(dim)?;
                let ops = operators
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.square(dim, &format!("operators[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Measurement::parse(ops, form, "file")
            }
            Document::Basis { .. } => Ok(self.into_basis()?.measurement()),
            other => Err(other.wrong_kind("measurement")),
        }
    }

    pub fn into_basis(self) -> Result<ProjectiveBasis> {
        match self {
            Document::Basis { dim, matrix } => {
                linalg::check_dim(dim)?;
                ProjectiveBasis::from_unitary(matrix.square(dim, "basis")?, "file")
            }
            other => Err(other.wrong_kind("basis")),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }
}

fn context(e: Error, at: &str) -> Error {
    match e {
        Error::Validation(m) => Error::Validation(format!("{at}: {m}")),
        Error::Dimension(m) => Error::Dimension(format!("{at}: {m}")),
        other => other,
    }
}

pub fn parse_document(text: &str, origin: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse { context: origin.to_string(), message: e.to_string() })
}

pub fn load_document(path: impl AsRef<Path>) -> Result<Document> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_document(&text, &path.display().to_string())
}

pub fn save_document(doc: &Document, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = doc.to_json();
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub fn load_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    load_document(path)?.into_state()
}

pub fn save_state(state: &DensityMatrix, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_state(state), path)
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    load_document(path)?.into_ensemble()
}

pub fn save_ensemble(e: &Ensemble, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_ensemble(e), path)
}

pub fn load_bipartite(path: impl AsRef<Path>) -> Result<BipartiteState> {
    load_document(path)?.into_bipartite()
}

pub fn save_bipartite(s: &BipartiteState, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_bipartite(s), path)
}

pub fn load_separable(path: impl AsRef<Path>) -> Result<SeparableSpec> {
    load_document(path)?.into_separable()
}

pub fn save_separable(spec: &SeparableSpec, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_separable(spec), path)
}

pub fn load_measurement(path: impl AsRef<Path>) -> Result<Measurement> {
    load_document(path)?.into_measurement()
}

pub fn save_measurement(m: &Measurement, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_measurement(m), path)
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<ProjectiveBasis> {
    load_document(path)?.into_basis()
}

pub fn save_basis(b: &ProjectiveBasis, path: impl AsRef<Path>) -> Result<()> {
    save_document(&Document::from_basis(b), path)
}
