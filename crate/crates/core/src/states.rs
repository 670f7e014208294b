//! Density matrices, ensembles and bipartite states.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, c, partial_trace, tensor, ComplexMatrix, Subsystem, C64};

/// Tolerance for the Hermitian, unit-trace and PSD checks.
pub const STATE_TOL: f64 = 1e-9;

/// One failed check with its measured deviation.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    TooLarge { dim: usize, max: usize },
    NotHermitian { deviation: f64 },
    Trace { deviation: f64 },
    NegativeEigenvalue { min_eigenvalue: f64 },
    Numerical(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Violation::TooLarge { dim, max } => write!(f, "dimension {dim} exceeds maximum {max}"),
            Violation::NotHermitian { deviation } => write!(f, "not Hermitian (deviation {deviation:e})"),
            Violation::Trace { deviation } => write!(f, "trace differs from 1 by {deviation:e}"),
            Violation::NegativeEigenvalue { min_eigenvalue } => {
                write!(f, "not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")
            }
            Violation::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }

    fn into_result(self) -> Result<()> {
        if self.accepted() {
            return Ok(());
        }
        let msg: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        Err(Error::Validation(format!("invalid density matrix: {}", msg.join("; "))))
    }
}

/// Checks every density-matrix invariant and reports all that fail.
pub fn validate(m: &ComplexMatrix) -> ValidationVerdict {
    let mut violations = Vec::new();
    if !m.is_square() {
        violations.push(Violation::NotSquare { rows: m.rows(), cols: m.cols() });
        return ValidationVerdict { violations };
    }
    let max = linalg::max_dim();
    if m.rows() > max {
        violations.push(Violation::TooLarge { dim: m.rows(), max });
        return ValidationVerdict { violations };
    }
    let herm = m.hermiticity_deviation();
    if herm > STATE_TOL {
        violations.push(Violation::NotHermitian { deviation: herm });
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > STATE_TOL {
        violations.push(Violation::Trace { deviation: (tr - 1.0).abs() });
    }
    // The spectrum is only meaningful once the matrix is Hermitian.
    if herm <= STATE_TOL {
        match linalg::eigenvalues_hermitian(m) {
            Ok(ev) => {
                let min = ev.last().copied().unwrap_or(0.0);
                if min < -STATE_TOL {
                    violations.push(Violation::NegativeEigenvalue { min_eigenvalue: min });
                }
            }
            Err(e) => violations.push(Violation::Numerical(e.to_string())),
        }
    }
    ValidationVerdict { violations }
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        validate(&mat).into_result()?;
        Ok(Self { mat: mat.symmetrized() })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("state vector must be nonzero and finite"));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&v))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// |i⟩⟨i| in dimension `dim`.
    pub fn basis_state(dim: usize, i: usize) -> Result<Self> {
        let mut v = vec![c(0.0, 0.0); dim];
        *v.get_mut(i).ok_or_else(|| Error::dim(format!("basis index {i} out of range for dim {dim}")))? =
            c(1.0, 0.0);
        Self::pure(&v)
    }

    /// (|0⟩ + |1⟩ + … + |d−1⟩)/√d projector.
    pub fn maximally_coherent(dim: usize) -> Result<Self> {
        Self::pure(&vec![c(1.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Eigenvalues clamped to [0, 1] and renormalized to unit sum, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut ev = linalg::eigenvalues_hermitian(&self.mat)?;
        for l in &mut ev {
            *l = l.clamp(0.0, 1.0);
        }
        let sum: f64 = ev.iter().sum();
        if sum > 0.0 && (sum - 1.0).abs() <= STATE_TOL {
            for l in &mut ev {
                *l /= sum;
            }
        }
        Ok(ev)
    }

    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// U ρ U†
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::dim("unitary does not match state dimension"));
        }
        Self::new(self.mat.conjugate_by(u))
    }

    /// Probability-weighted sum of states; weights must form a distribution.
    pub fn mixture(probs: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        check_probs(probs)?;
        if probs.len() != states.len() || states.is_empty() {
            return Err(Error::dim("mixture needs one probability per state"));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::dim("mixture members have different dimensions"));
        }
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, s) in probs.iter().zip(states) {
            acc = &acc + &s.mat.scale_real(*p);
        }
        Self::new(acc)
    }

    /// Wraps a matrix produced by an operation known to keep it a state
    /// (pinching, partial trace, channel output). Still validated.
    pub(crate) fn from_derived(mat: ComplexMatrix) -> Result<Self> {
        Self::new(mat)
    }
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::invalid("probability vector is empty"));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::invalid(format!("probability {p} is negative or not finite")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > STATE_TOL {
        return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

/// Alice's preparation: states `members[x]` drawn with probability `probs[x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    members: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, members: Vec<DensityMatrix>) -> Result<Self> {
        check_probs(&probs)?;
        if members.is_empty() {
            return Err(Error::invalid("ensemble has no members"));
        }
        if probs.len() != members.len() {
            return Err(Error::dim(format!(
                "{} probabilities for {} members",
                probs.len(),
                members.len()
            )));
        }
        let dim = members[0].dim();
        if let Some(x) = members.iter().position(|m| m.dim() != dim) {
            return Err(Error::dim(format!(
                "member {x} has dimension {}, expected {dim}",
                members[x].dim()
            )));
        }
        Ok(Self { probs, members })
    }

    pub fn uniform(members: Vec<DensityMatrix>) -> Result<Self> {
        let n = members.len().max(1);
        Self::new(vec![1.0 / n as f64; members.len()], members)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn members(&self) -> &[DensityMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.probs.iter().copied().zip(&self.members)
    }

    /// Bob's state Σ p_x ρ_x.
    pub fn mixture(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.probs, &self.members)
    }

    /// Applies the same unitary to every member.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        let members = self.members.iter().map(|m| m.evolve(u)).collect::<Result<Vec<_>>>()?;
        Self::new(self.probs.clone(), members)
    }
}

/// A state on a `d_A ⊗ d_B` space.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(dims: (usize, usize), state: DensityMatrix) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.0.checked_mul(dims.1) != Some(state.dim()) {
            return Err(Error::dim(format!(
                "dims {}x{} do not match a state of dimension {}",
                dims.0,
                dims.1,
                state.dim()
            )));
        }
        Ok(Self { dims, state })
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        Self::new((a.dim(), b.dim()), DensityMatrix::from_derived(tensor(a.matrix(), b.matrix())?)?)
    }

    /// (|00⟩ + |11⟩)/√2 on two qubits.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)];
        Self::new((2, 2), DensityMatrix::pure(&psi).expect("valid vector")).expect("2x2 dims")
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn reduced_a(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_derived(partial_trace(self.matrix(), self.dims, Subsystem::A)?)
    }

    pub fn reduced_b(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_derived(partial_trace(self.matrix(), self.dims, Subsystem::B)?)
    }

    /// Exchanges the roles of A and B.
    pub fn swapped(&self) -> Result<Self> {
        let (da, db) = self.dims;
        let idx = |i: usize| (i % db) * da + i / db;
        let m = self.matrix();
        let mut out = ComplexMatrix::zeros(da * db, da * db);
        for i in 0..da * db {
            for j in 0..da * db {
                out[(idx(i), idx(j))] = m[(i, j)];
            }
        }
        Self::new((db, da), DensityMatrix::from_derived(out)?)
    }
}

/// Σ_x p_x ρ_xa ⊗ ρ_xb with the decomposition kept, since the local
/// coherence bound checks depend on the A parts, not just on the compiled state.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSpec {
    probs: Vec<f64>,
    a_parts: Vec<DensityMatrix>,
    b_parts: Vec<DensityMatrix>,
}

impl SeparableSpec {
    pub fn new(probs: Vec<f64>, a_parts: Vec<DensityMatrix>, b_parts: Vec<DensityMatrix>) -> Result<Self> {
        check_probs(&probs)?;
        if probs.len() != a_parts.len() || probs.len() != b_parts.len() {
            return Err(Error::dim(format!(
                "separable spec has {} probabilities, {} A parts and {} B parts",
                probs.len(),
                a_parts.len(),
                b_parts.len()
            )));
        }
        let da = a_parts[0].dim();
        let db = b_parts[0].dim();
        if a_parts.iter().any(|a| a.dim() != da) || b_parts.iter().any(|b| b.dim() != db) {
            return Err(Error::dim("separable spec parts have inconsistent dimensions"));
        }
        linalg::check_dim(da * db)?;
        Ok(Self { probs, a_parts, b_parts })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn a_parts(&self) -> &[DensityMatrix] {
        &self.a_parts
    }

    pub fn b_parts(&self) -> &[DensityMatrix] {
        &self.b_parts
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a_parts[0].dim(), self.b_parts[0].dim())
    }

    /// Bob's side ensemble {p_x, ρ_xb}.
    pub fn b_ensemble(&self) -> Result<Ensemble> {
        Ensemble::new(self.probs.clone(), self.b_parts.clone())
    }

    pub fn compile(&self) -> Result<BipartiteState> {
        let (da, db) = self.dims();
        let mut acc = ComplexMatrix::zeros(da * db, da * db);
        for ((p, a), b) in self.probs.iter().zip(&self.a_parts).zip(&self.b_parts) {
            acc = &acc + &tensor(a.matrix(), b.matrix())?.scale_real(*p);
        }
        BipartiteState::new((da, db), DensityMatrix::from_derived(acc)?)
    }
}

/// Compiles a separable spec into its bipartite state.
pub fn compile_separable(spec: &SeparableSpec) -> Result<BipartiteState> {
    spec.compile()
}
