//! Measurements, Kraus instruments, the strictly-incoherent classifier and
//! the coherence-erasing channel.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, C64};
use crate::random;
use crate::states::DensityMatrix;

/// Completeness tolerance for Σ K†K = 1.
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// Magnitude below which a Kraus entry counts as zero in the structural test.
pub const NONZERO_TOL: f64 = 1e-9;

/// Trace gap a witness state must exceed.
pub const WITNESS_TOL: f64 = 1e-7;

/// Outcomes with smaller probability are dropped from post-measurement lists.
pub const MIN_OUTCOME_PROB: f64 = 1e-12;

/// Orthonormal basis stored as the columns of a unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveBasis {
    unitary: ComplexMatrix,
    label: String,
}

impl ProjectiveBasis {
    pub fn from_unitary(unitary: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::dim("basis matrix must be square"));
        }
        let dev = unitary.unitarity_deviation();
        if dev > linalg::UNITARY_TOL {
            return Err(Error::invalid(format!("basis matrix is not unitary (deviation {dev:e})")));
        }
        Ok(Self { unitary, label: label.into() })
    }

    pub fn computational(dim: usize) -> Self {
        Self { unitary: ComplexMatrix::identity(dim), label: "computational".into() }
    }

    /// {|+⟩, |−⟩}
    pub fn hadamard() -> Self {
        let s = FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(-s, 0.0) } else { c(s, 0.0) });
        Self { unitary: u, label: "hadamard".into() }
    }

    /// Discrete Fourier basis, |f_k⟩ = Σ_j ω^{jk}|j⟩/√d.
    pub fn fourier(dim: usize) -> Self {
        let norm = 1.0 / (dim as f64).sqrt();
        let u = ComplexMatrix::from_fn(dim, dim, |j, k| {
            C64::from_polar(norm, 2.0 * PI * (j * k) as f64 / dim as f64)
        });
        Self { unitary: u, label: "fourier".into() }
    }

    /// Qubit basis {|n⟩, |−n⟩} for the Bloch direction n(θ, φ).
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (s, co) = (0.5 * theta).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let up = [c(co, 0.0), e * s];
        let down = [-e.conj() * s, c(co, 0.0)];
        let u = ComplexMatrix::from_fn(2, 2, |i, j| if j == 0 { up[i] } else { down[i] });
        Self { unitary: u, label: format!("qubit(theta={theta:.6}, phi={phi:.6})") }
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.unitary.column(i)
    }

    /// The basis as a projective measurement {|y⟩⟨y|}.
    pub fn measurement(&self) -> Measurement {
        let ops = (0..self.dim()).map(|i| ComplexMatrix::projector(&self.vector(i))).collect();
        Measurement { operators: ops, label: format!("projective[{}]", self.label) }
    }

    /// Same basis after applying U to every vector.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::from_unitary(u.try_matmul(&self.unitary)?, format!("rotated[{}]", self.label))
    }

    /// Diagonal of ρ in this basis, i.e. the outcome distribution ⟨y|ρ|y⟩.
    pub fn diagonal_probs(&self, rho: &ComplexMatrix) -> Vec<f64> {
        (0..self.dim()).map(|i| rho.expectation(&self.vector(i)).re).collect()
    }
}

/// How operators in a measurement file are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorForm {
    Kraus,
    Effects,
}

/// Kraus instrument {K_l} with Σ K_l†K_l = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl Measurement {
    pub fn new(operators: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::invalid("measurement has no operators"));
        };
        let d = first.cols();
        if let Some(bad) = operators.iter().position(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::dim(format!(
                "operator {bad} is {}x{}, expected {d}x{d}",
                operators[bad].rows(),
                operators[bad].cols()
            )));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &operators {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > COMPLETENESS_TOL {
            return Err(Error::invalid(format!("Kraus operators are not complete (deviation {dev:e})")));
        }
        Ok(Self { operators, label: label.into() })
    }

    /// POVM given by effects E_l; Kraus operators are taken as √E_l.
    pub fn from_effects(effects: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let ops = effects.iter().map(linalg::sqrt_psd).collect::<Result<Vec<_>>>()?;
        Self::new(ops, label)
    }

    pub fn parse(operators: Vec<ComplexMatrix>, form: OperatorForm, label: impl Into<String>) -> Result<Self> {
        match form {
            OperatorForm::Kraus => Self::new(operators, label),
            OperatorForm::Effects => Self::from_effects(operators, label),
        }
    }

    /// Single-outcome "measurement" that learns nothing.
    pub fn trivial(dim: usize) -> Self {
        Self { operators: vec![ComplexMatrix::identity(dim)], label: "identity".into() }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].cols()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// {U K U†}: the same instrument with its reference frame moved by U.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() {
            return Err(Error::dim("unitary does not match measurement dimension"));
        }
        let ops = self.operators.iter().map(|k| k.conjugate_by(u)).collect();
        Self::new(ops, format!("conjugated[{}]", self.label))
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::dim(format!(
                "measurement acts on dimension {}, state has dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(())
    }

    /// Σ_l K_l ρ K_l†
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_state(rho)?;
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.operators {
            out = &out + &rho.matrix().conjugate_by(k);
        }
        DensityMatrix::from_derived(out)
    }
}

fn outcome_prob(k: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    rho.conjugate_by(k).trace().re
}

/// p_l = tr(K_l ρ K_l†)
pub fn measure_probs(m: &Measurement, rho: &DensityMatrix) -> Result<Vec<f64>> {
    m.check_state(rho)?;
    Ok(m.operators.iter().map(|k| outcome_prob(k, rho.matrix())).collect())
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub index: usize,
    pub prob: f64,
    pub state: DensityMatrix,
}

/// Normalized post-measurement states K_l ρ K_l† / p_l; outcomes with
/// p_l ≤ 1e-12 are omitted.
pub fn post_measurement_states(m: &Measurement, rho: &DensityMatrix) -> Result<Vec<Outcome>> {
    m.check_state(rho)?;
    let mut out = Vec::new();
    for (index, k) in m.operators.iter().enumerate() {
        let unnorm = rho.matrix().conjugate_by(k);
        let prob = unnorm.trace().re;
        if prob <= MIN_OUTCOME_PROB {
            continue;
        }
        out.push(Outcome { index, prob, state: DensityMatrix::from_derived(unnorm.scale_real(1.0 / prob))? });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

#[derive(Clone, Debug)]
pub enum SIWitness {
    /// A state on which tr(KρK†) ≠ tr(Kρ^d K†).
    TraceGap { operator: usize, state: DensityMatrix, gap: f64 },
    /// Two nonzero entries sharing a row or column of operator `operator`
    /// (in the reference basis); reported when the trace identity survives.
    Collision { operator: usize, axis: Axis, line: usize, entries: (usize, usize) },
}

#[derive(Clone, Debug)]
pub struct SIVerdict {
    /// At most one nonzero per row and per column in every operator.
    pub is_strictly_incoherent: bool,
    /// tr(KρK†) = tr(Kρ^dK†) for all ρ and every operator.
    pub preserves_trace_identity: bool,
    pub witness: Option<SIWitness>,
}

fn first_collision(k: &ComplexMatrix) -> Option<(Axis, usize, (usize, usize))> {
    let n = k.rows();
    let nz = |i: usize, j: usize| k[(i, j)].norm() > NONZERO_TOL;
    for col in 0..k.cols() {
        let hits: Vec<usize> = (0..n).filter(|&r| nz(r, col)).collect();
        if hits.len() > 1 {
            return Some((Axis::Column, col, (hits[0], hits[1])));
        }
    }
    for row in 0..n {
        let hits: Vec<usize> = (0..k.cols()).filter(|&j| nz(row, j)).collect();
        if hits.len() > 1 {
            return Some((Axis::Row, row, (hits[0], hits[1])));
        }
    }
    None
}

/// Best witness among (|i⟩ + e^{iφ}|j⟩)/√2, φ ∈ {0, π/2, π, 3π/2}, for
/// operator `k` written in the reference basis.
fn pair_witness(k: &ComplexMatrix) -> Option<(usize, usize, C64, f64)> {
    let d = k.cols();
    let effect = k.adjoint().matmul(k);
    let phases = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    let mut best: Option<(usize, usize, C64, f64)> = None;
    for i in 0..d {
        for j in i + 1..d {
            for &ph in &phases {
                // ⟨ψ|E|ψ⟩ − ⟨ψ|E^d|ψ⟩ = Re(e^{iφ} E_ij)
                let gap = (ph * effect[(i, j)]).re.abs();
                if best.is_none_or(|b| gap > b.3) {
                    best = Some((i, j, ph, gap));
                }
            }
        }
    }
    best
}

/// Structural strictly-incoherent test with a concrete witness on failure.
pub fn classify_strictly_incoherent(m: &Measurement, basis: &ProjectiveBasis) -> Result<SIVerdict> {
    if basis.dim() != m.dim() {
        return Err(Error::dim("basis and measurement dimensions differ"));
    }
    let u = basis.unitary();
    let local: Vec<ComplexMatrix> = m.operators.iter().map(|k| k.in_basis(u)).collect();

    let collision = local.iter().enumerate().find_map(|(idx, k)| first_collision(k).map(|c| (idx, c)));
    let Some((col_op, (axis, line, entries))) = collision else {
        return Ok(SIVerdict { is_strictly_incoherent: true, preserves_trace_identity: true, witness: None });
    };

    let mut best: Option<(usize, usize, usize, C64, f64)> = None;
    for (idx, k) in local.iter().enumerate() {
        if let Some((i, j, ph, gap)) = pair_witness(k) {
            if best.is_none_or(|b| gap > b.4) {
                best = Some((idx, i, j, ph, gap));
            }
        }
    }
    if let Some((operator, i, j, ph, _)) = best {
        let mut psi_local = vec![c(0.0, 0.0); m.dim()];
        psi_local[i] = c(FRAC_1_SQRT_2, 0.0);
        psi_local[j] = ph * FRAC_1_SQRT_2;
        let state = DensityMatrix::pure(&u.matvec(&psi_local))?;
        let k = &m.operators[operator];
        let dephased = linalg::dephase(state.matrix(), Some(u))?;
        let gap = (outcome_prob(k, state.matrix()) - outcome_prob(k, &dephased)).abs();
        if gap > WITNESS_TOL {
            return Ok(SIVerdict {
                is_strictly_incoherent: false,
                preserves_trace_identity: false,
                witness: Some(SIWitness::TraceGap { operator, state, gap }),
            });
        }
    }
    Ok(SIVerdict {
        is_strictly_incoherent: false,
        preserves_trace_identity: true,
        witness: Some(SIWitness::Collision { operator: col_op, axis, line, entries }),
    })
}

/// Uniform mixture of the diagonal phase unitaries of the erasing channel.
#[derive(Clone, Debug)]
pub struct ErasingChannel {
    pub weights: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
}

#[derive(Clone, Debug)]
pub struct ErasureOutput {
    pub output: DensityMatrix,
    pub channel: ErasingChannel,
}

/// U_k = Σ_j e^{2πi jk/d} |j⟩⟨j| (in the reference basis), k = 0..d−1, each
/// with weight 1/d. The average of U_k ρ U_k† is ρ with its off-diagonal
/// part removed.
pub fn erasing_channel(basis: &ProjectiveBasis) -> ErasingChannel {
    let d = basis.dim();
    let unitaries = (0..d)
        .map(|k| {
            let phases: Vec<C64> =
                (0..d).map(|j| C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / d as f64)).collect();
            ComplexMatrix::from_diag(&phases).conjugate_by(basis.unitary())
        })
        .collect();
    ErasingChannel { weights: vec![1.0 / d as f64; d], unitaries }
}

pub fn coherence_erasing_channel(rho: &DensityMatrix, basis: &ProjectiveBasis) -> Result<ErasureOutput> {
    if basis.dim() != rho.dim() {
        return Err(Error::dim("basis and state dimensions differ"));
    }
    let channel = erasing_channel(basis);
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (w, u) in channel.weights.iter().zip(&channel.unitaries) {
        acc = &acc + &rho.matrix().conjugate_by(u).scale_real(*w);
    }
    Ok(ErasureOutput { output: DensityMatrix::from_derived(acc)?, channel })
}

/// Random strictly incoherent instrument in the computational basis:
/// K_l = P_l D_l with P_l a random permutation and the column weights
/// |D_l(i)|² drawn from the simplex for each i.
#[allow(clippy::needless_range_loop)]
pub fn random_strictly_incoherent(dim: usize, n_ops: usize, rng: &mut impl Rng) -> Result<Measurement> {
    if n_ops == 0 {
        return Err(Error::invalid("instrument needs at least one operator"));
    }
    let weights: Vec<Vec<f64>> = (0..dim).map(|_| random::random_simplex(n_ops, rng)).collect();
    let mut ops = Vec::with_capacity(n_ops);
    for l in 0..n_ops {
        let mut perm: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut k = ComplexMatrix::zeros(dim, dim);
        for (i, &target) in perm.iter().enumerate() {
            let phase = rng.random_range(0.0..2.0 * PI);
            k[(target, i)] = C64::from_polar(weights[i][l].sqrt(), phase);
        }
        ops.push(k);
    }
    Measurement::new(ops, "random-strictly-incoherent")
}

/// Random instrument from a Haar isometry: K_l are the d×d blocks of the
/// first d columns of an (n·d)-dimensional unitary.
pub fn random_instrument(dim: usize, n_ops: usize, rng: &mut impl Rng) -> Result<Measurement> {
    if n_ops == 0 {
        return Err(Error::invalid("instrument needs at least one operator"));
    }
    let big = random::random_unitary(dim * n_ops, rng)?;
    let ops = (0..n_ops)
        .map(|l| ComplexMatrix::from_fn(dim, dim, |i, j| big[(l * dim + i, j)]))
        .collect();
    Measurement::new(ops, "random-instrument")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, seeded_rng};

    fn k(rows: Vec<Vec<f64>>) -> ComplexMatrix {
        ComplexMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| c(x, 0.0)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn computational_probs() {
        let m = ProjectiveBasis::computational(2).measurement();
        let p = measure_probs(&m, &DensityMatrix::diagonal(&[0.3, 0.7]).unwrap()).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-15 && (p[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn hadamard_on_zero_is_fair() {
        let m = ProjectiveBasis::hadamard().measurement();
        let p = measure_probs(&m, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_input_gives_effect_traces() {
        let mut rng = seeded_rng(2);
        let m = random_instrument(3, 4, &mut rng).unwrap();
        let p = measure_probs(&m, &DensityMatrix::maximally_mixed(3).unwrap()).unwrap();
        for (pl, kl) in p.iter().zip(m.operators()) {
            let expected = kl.adjoint().matmul(kl).trace().re / 3.0;
            assert!((pl - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_rejects_dimension_mismatch() {
        let m = ProjectiveBasis::computational(3).measurement();
        assert!(matches!(
            measure_probs(&m, &DensityMatrix::basis_state(2, 0).unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn incomplete_instrument_rejected() {
        assert!(Measurement::new(vec![k(vec![vec![1., 0.], vec![0., 0.]])], "half").is_err());
    }

    #[test]
    fn effects_are_square_rooted() {
        let plus = ProjectiveBasis::hadamard().vector(0);
        let minus = ProjectiveBasis::hadamard().vector(1);
        let m = Measurement::from_effects(
            vec![ComplexMatrix::projector(&plus), ComplexMatrix::projector(&minus)],
            "x",
        )
        .unwrap();
        let p = measure_probs(&m, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn post_measurement_states_are_projectors_and_skip_impossible_outcomes() {
        let basis = ProjectiveBasis::computational(3);
        let rho = DensityMatrix::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let out = post_measurement_states(&basis.measurement(), &rho).unwrap();
        assert_eq!(out.len(), 2);
        for o in &out {
            let expected = DensityMatrix::basis_state(3, o.index).unwrap();
            assert!(o.state.matrix().max_abs_diff(expected.matrix()) < 1e-15);
        }
    }

    #[test]
    fn post_measurement_mixture_reconstructs_channel_output() {
        let mut rng = seeded_rng(8);
        for _ in 0..20 {
            let m = random_instrument(3, 3, &mut rng).unwrap();
            let rho = random_density(3, 3, &mut rng).unwrap();
            let outs = post_measurement_states(&m, &rho).unwrap();
            let mut acc = ComplexMatrix::zeros(3, 3);
            for o in &outs {
                acc = &acc + &o.state.matrix().scale_real(o.prob);
            }
            assert!(acc.max_abs_diff(m.apply(&rho).unwrap().matrix()) < 1e-9);
        }
    }

    #[test]
    fn permutation_times_diagonal_is_strictly_incoherent() {
        let s = 0.5f64.sqrt();
        let m = Measurement::new(
            vec![k(vec![vec![0., s], vec![s, 0.]]), k(vec![vec![s, 0.], vec![0., -s]])],
            "perm-diag",
        )
        .unwrap();
        let v = classify_strictly_incoherent(&m, &ProjectiveBasis::computational(2)).unwrap();
        assert!(v.is_strictly_incoherent && v.preserves_trace_identity && v.witness.is_none());

        let dephasing = ProjectiveBasis::computational(3).measurement();
        assert!(classify_strictly_incoherent(&dephasing, &ProjectiveBasis::computational(3))
            .unwrap()
            .is_strictly_incoherent);
    }

    #[test]
    fn non_injective_kraus_has_trace_gap_witness() {
        // K1 = (|0⟩⟨0| + |0⟩⟨1|)/√2, completed by K2 = (|1⟩⟨0| − |1⟩⟨1|)/√2
        let s = 0.5f64.sqrt();
        let m = Measurement::new(
            vec![k(vec![vec![s, s], vec![0., 0.]]), k(vec![vec![0., 0.], vec![s, -s]])],
            "collapse",
        )
        .unwrap();
        let basis = ProjectiveBasis::computational(2);
        let v = classify_strictly_incoherent(&m, &basis).unwrap();
        assert!(!v.is_strictly_incoherent && !v.preserves_trace_identity);
        match v.witness {
            Some(SIWitness::TraceGap { operator, ref state, gap }) => {
                assert!(gap > WITNESS_TOL);
                let kk = &m.operators()[operator];
                let d = linalg::dephase(state.matrix(), None).unwrap();
                let direct = (outcome_prob(kk, state.matrix()) - outcome_prob(kk, &d)).abs();
                assert!((direct - gap).abs() < 1e-15);
            }
            ref other => panic!("expected trace-gap witness, got {other:?}"),
        }
    }

    #[test]
    fn column_spread_keeps_trace_identity_but_is_flagged() {
        // K1 = (|0⟩ + |1⟩)⟨0|/√2 style operators: K†K diagonal, K not incoherent.
        let s = 0.5f64.sqrt();
        let m = Measurement::new(
            vec![k(vec![vec![s, 0.], vec![s, 0.]]), k(vec![vec![0., s], vec![0., -s]])],
            "spread",
        )
        .unwrap();
        let v = classify_strictly_incoherent(&m, &ProjectiveBasis::computational(2)).unwrap();
        assert!(!v.is_strictly_incoherent && v.preserves_trace_identity);
        assert!(matches!(v.witness, Some(SIWitness::Collision { axis: Axis::Column, .. })));
    }

    #[test]
    fn classifier_respects_reference_basis() {
        let mut rng = seeded_rng(4);
        let si = random_strictly_incoherent(3, 3, &mut rng).unwrap();
        let u = random::random_unitary(3, &mut rng).unwrap();
        let moved = si.conjugated(&u).unwrap();
        let basis = ProjectiveBasis::from_unitary(u, "random").unwrap();
        assert!(classify_strictly_incoherent(&moved, &basis).unwrap().is_strictly_incoherent);
        assert!(!classify_strictly_incoherent(&moved, &ProjectiveBasis::computational(3))
            .unwrap()
            .is_strictly_incoherent);
    }

    #[test]
    fn erasing_channel_on_plus_is_maximally_mixed() {
        let plus = DensityMatrix::pure(&[c(1., 0.), c(1., 0.)]).unwrap();
        let out = coherence_erasing_channel(&plus, &ProjectiveBasis::computational(2)).unwrap();
        assert!(out.output.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).unwrap().matrix()) < 1e-15);
        assert_eq!(out.channel.unitaries.len(), 2);
    }

    #[test]
    fn erasing_channel_fixes_diagonal_states() {
        let mut rng = seeded_rng(12);
        for d in 2..=4 {
            let p = random::random_simplex(d, &mut rng);
            let rho = DensityMatrix::diagonal(&p).unwrap();
            let out = coherence_erasing_channel(&rho, &ProjectiveBasis::computational(d)).unwrap();
            assert!(out.output.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn qubit_basis_is_unitary() {
        for &(t, p) in &[(0.0, 0.0), (1.0, 2.0), (PI, 5.0), (0.3, -1.0)] {
            assert!(ProjectiveBasis::qubit(t, p).unitary().unitarity_deviation() < 1e-14);
        }
        assert!(ProjectiveBasis::fourier(5).unitary().unitarity_deviation() < 1e-14);
    }
}
