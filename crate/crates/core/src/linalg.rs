//! Dense complex matrix kernel.
//!
//! Everything the entropic formulas need lives here: products, Kronecker
//! products, partial traces, dephasing (full and on the B factor only) and a
//! Hermitian eigendecomposition. Matrices are small (at most
//! [`max_dim`] on a side), so a row-major `Vec` is all the storage we need.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on any matrix side length.
pub const DEFAULT_MAX_DIM: usize = 64;

/// Deviation from Hermiticity tolerated before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Unitarity tolerance for basis matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// Largest side length accepted by constructors that build new spaces
/// (tensor products, loaded files, generators). `QCOH_MAX_DIM` overrides it.
pub fn max_dim() -> usize {
    std::env::var("QCOH_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub(crate) fn check_dim(requested: usize) -> Result<()> {
    let max = max_dim();
    if requested > max {
        return Err(Error::SizeLimit { requested, max });
    }
    Ok(())
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Which factor of a bipartite space to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::dim(format!(
                "row {bad} has {} entries, expected {m}",
                rows[bad].len()
            )));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { c(0.0, 0.0) })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c(diag[i], 0.0) } else { c(0.0, 0.0) })
    }

    /// |v⟩⟨w|
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// |v⟩⟨v|
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    /// Square matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != n) {
            return Err(Error::dim("columns of unequal length"));
        }
        Self::new(n, columns.len(), {
            let mut data = Vec::with_capacity(n * columns.len());
            for r in 0..n {
                for col in columns {
                    data.push(col[r]);
                }
            }
            data
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.cols).map(<[C64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        self.diagonal().into_iter().map(|z| z.re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// Matrix product; panics on mismatched inner dimensions (use
    /// [`ComplexMatrix::try_matmul`] for a checked version).
    pub fn matmul(&self, other: &Self) -> Self {
        self.try_matmul(other).expect("matrix product dimension mismatch")
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// U† · self · U
    pub fn in_basis(&self, u: &Self) -> Self {
        u.adjoint().matmul(self).matmul(u)
    }

    /// ⟨v| self |v⟩
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// (m + m†)/2
    pub fn symmetrized(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + adj[(i, j)]) * 0.5)
    }

    /// max |U†U − I|
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + col]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or_else(|| Error::dim("tensor product overflow"))?;
    let cols = a.cols.checked_mul(b.cols).ok_or_else(|| Error::dim("tensor product overflow"))?;
    check_dim(rows.max(cols))?;
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    }))
}

fn check_bipartite(m: &ComplexMatrix, (da, db): (usize, usize)) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dim(format!("expected a square matrix, got {}x{}", m.rows, m.cols)));
    }
    if da == 0 || db == 0 || da.checked_mul(db) != Some(m.rows) {
        return Err(Error::dim(format!(
            "matrix of size {} does not factor as {da}x{db}",
            m.rows
        )));
    }
    Ok(())
}

/// Traces out one factor of a `d_A·d_B` square matrix and returns the other.
/// Row index `(a, b)` is stored at `a·d_B + b`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (da, db) = dims;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    })
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// V diag(λ) V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lam: Vec<C64> = self.eigenvalues.iter().map(|&l| c(l, 0.0)).collect();
        ComplexMatrix::from_diag(&lam).conjugate_by(&self.eigenvectors)
    }
}

fn hermitian_input(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::invalid(format!("matrix is not Hermitian (deviation {dev:e})")));
    }
    Ok(m.symmetrized())
}

/// Eigendecomposition of a Hermitian matrix (symmetrized first).
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let h = hermitian_input(m)?;
    let n = h.rows;
    let eig = SymmetricEigen::try_new(h.to_nalgebra(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Numerical { what: "Hermitian eigensolver did not converge".into(), residual: f64::NAN }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, col| vecs[(r, order[col])]);
    let out = EigenDecomposition { eigenvalues, eigenvectors };
    let scale = h.max_abs().max(1.0);
    let residual = out.reconstruct().max_abs_diff(&h) / scale;
    if residual > 1e-9 || !residual.is_finite() {
        return Err(Error::Numerical {
            what: "eigendecomposition failed to reconstruct its input".into(),
            residual,
        });
    }
    Ok(out)
}

/// Eigenvalues only, descending. Closed form for 1x1 and 2x2.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    match m.rows {
        1 if m.is_square() => Ok(vec![m[(0, 0)].re]),
        2 if m.is_square() => {
            let h = hermitian_input(m)?;
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(0, 1)].norm();
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            Ok(vec![mean + half_gap, mean - half_gap])
        }
        _ => Ok(eig_hermitian(m)?.eigenvalues),
    }
}

/// Square root of a positive semidefinite matrix via its spectrum; negative
/// eigenvalues within rounding are clamped to zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -HERMITIAN_TOL {
            return Err(Error::invalid(format!("matrix is not positive semidefinite (eigenvalue {min:e})")));
        }
    }
    let roots: Vec<C64> = eig.eigenvalues.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)).collect();
    Ok(ComplexMatrix::from_diag(&roots).conjugate_by(&eig.eigenvectors))
}

fn check_basis(basis: &ComplexMatrix, dim: usize) -> Result<()> {
    if basis.rows != dim || basis.cols != dim {
        return Err(Error::dim(format!(
            "basis is {}x{}, expected {dim}x{dim}",
            basis.rows, basis.cols
        )));
    }
    let dev = basis.unitarity_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::invalid(format!("basis matrix is not unitary (deviation {dev:e})")));
    }
    Ok(())
}

/// Diagonal part of `m` in the basis given by the columns of `basis`
/// (computational basis when `None`), expressed back in the original
/// coordinates: Σ_y |y⟩⟨y|m|y⟩⟨y|.
pub fn dephase(m: &ComplexMatrix, basis: Option<&ComplexMatrix>) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::dim("dephasing needs a square matrix"));
    }
    match basis {
        None => Ok(ComplexMatrix::from_diag(&m.diagonal())),
        Some(u) => {
            check_basis(u, m.rows)?;
            let local = m.in_basis(u);
            Ok(ComplexMatrix::from_diag(&local.diagonal()).conjugate_by(u))
        }
    }
}

/// Pinches the B factor only: Σ_i (1 ⊗ |i⟩⟨i|) m (1 ⊗ |i⟩⟨i|).
pub fn block_dephase_b(
    m: &ComplexMatrix,
    dims: (usize, usize),
    basis_b: Option<&ComplexMatrix>,
) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (da, db) = dims;
    let lift = match basis_b {
        Some(u) => {
            check_basis(u, db)?;
            Some(tensor(&ComplexMatrix::identity(da), u)?)
        }
        None => None,
    };
    let local = match &lift {
        Some(w) => m.in_basis(w),
        None => m.clone(),
    };
    let pinched = ComplexMatrix::from_fn(da * db, da * db, |i, j| {
        if i % db == j % db {
            local[(i, j)]
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(match &lift {
        Some(w) => pinched.conjugate_by(w),
        None => pinched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        (&g + &g.adjoint()).scale_real(0.5)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap()
    }

    fn plus() -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(s, 0.), c(s, 0.)]
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let p = tensor(&ComplexMatrix::from_real_diag(&[1., 0.]), &ComplexMatrix::from_real_diag(&[0., 1.]))
            .unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diag(&[0., 1., 0., 0.]));
    }

    #[test]
    fn tensor_x_x_flips_both_qubits() {
        let xx = tensor(&pauli_x(), &pauli_x()).unwrap();
        let ket00 = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        assert_eq!(xx.matvec(&ket00), vec![c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    }

    #[test]
    fn tensor_respects_dimension_cap() {
        let big = ComplexMatrix::identity(16);
        assert!(matches!(tensor(&big, &big), Err(Error::SizeLimit { requested: 256, .. })));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)];
        let rho = ComplexMatrix::projector(&phi);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for keep in [Subsystem::A, Subsystem::B] {
            assert!(partial_trace(&rho, (2, 2), keep).unwrap().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_non_factorizable_size() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(partial_trace(&m, (2, 3), Subsystem::A), Err(Error::Dimension(_))));
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let h = random_hermitian(4, 11);
        for keep in [Subsystem::A, Subsystem::B] {
            let t = partial_trace(&h, (2, 2), keep).unwrap().trace();
            assert!((t - h.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn eig_of_diagonal_and_projector() {
        let e = eig_hermitian(&ComplexMatrix::from_real_diag(&[0.25, 0.75])).unwrap();
        assert!((e.eigenvalues[0] - 0.75).abs() < 1e-14 && (e.eigenvalues[1] - 0.25).abs() < 1e-14);
        let e = eig_hermitian(&ComplexMatrix::projector(&plus())).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14 && e.eigenvalues[1].abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        for seed in 0..20 {
            let h = random_hermitian(4, seed);
            let e = eig_hermitian(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) <= 1e-10);
            assert!(e.eigenvectors.unitarity_deviation() <= 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((sum - h.trace().re).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_form_2x2_matches_general_solver() {
        for seed in 0..20 {
            let h = random_hermitian(2, seed);
            let fast = eigenvalues_hermitian(&h).unwrap();
            let slow = eig_hermitian(&h).unwrap().eigenvalues;
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(eig_hermitian(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn dephase_examples() {
        let rho = ComplexMatrix::projector(&plus());
        let out = dephase(&rho, None).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        let diag = ComplexMatrix::from_real_diag(&[0.2, 0.3, 0.5]);
        assert_eq!(dephase(&diag, None).unwrap(), diag);
    }

    #[test]
    fn dephase_in_eigenbasis_keeps_spectrum() {
        let h = random_hermitian(3, 5);
        let e = eig_hermitian(&h).unwrap();
        let d = dephase(&h, Some(&e.eigenvectors)).unwrap();
        let after = eig_hermitian(&d).unwrap().eigenvalues;
        for (a, b) in after.iter().zip(&e.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dephase_rejects_non_unitary_basis() {
        let h = random_hermitian(2, 1);
        let bad = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        assert!(matches!(dephase(&h, Some(&bad)), Err(Error::Validation(_))));
    }

    #[test]
    fn block_dephase_examples() {
        let rho_a = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let input = tensor(&rho_a, &ComplexMatrix::projector(&plus())).unwrap();
        let expected = tensor(&rho_a, &ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert!(block_dephase_b(&input, (2, 2), None).unwrap().max_abs_diff(&expected) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::projector(&[c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0., 0., 0.5]);
        assert!(block_dephase_b(&bell, (2, 2), None).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn block_dephase_is_idempotent_and_commutes_with_trace_over_b() {
        let h = random_hermitian(6, 9);
        let once = block_dephase_b(&h, (2, 3), None).unwrap();
        let twice = block_dephase_b(&once, (2, 3), None).unwrap();
        assert!(once.max_abs_diff(&twice) < 1e-15);
        let a_before = partial_trace(&h, (2, 3), Subsystem::A).unwrap();
        let a_after = partial_trace(&once, (2, 3), Subsystem::A).unwrap();
        assert!(a_before.max_abs_diff(&a_after) < 1e-12);
    }
}
