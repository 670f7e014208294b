//! Channel quantities: Holevo χ, measured mutual information, projective
//! accessible information and the information loss IL = χ − H(X:Y).

use serde::Serialize;

use crate::coherence::{self, shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::operations::{self, erasing_channel, Measurement, ProjectiveBasis};
use crate::optimize::{self, OptimizerOptions};
use crate::states::{DensityMatrix, Ensemble};

/// |IL − CL| above this is reported as an internal-consistency error.
pub const IDENTITY_ERROR_TOL: f64 = 1e-7;

/// χ = S(Σ p_x ρ_x) − Σ p_x S(ρ_x).
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    let avg: f64 = e.iter().map(|(p, rho)| Ok(p * von_neumann_entropy(rho)?)).sum::<Result<f64>>()?;
    Ok(von_neumann_entropy(&e.mixture()?)? - avg)
}

/// Mutual information of a joint distribution given as rows `joint[x][l]`.
pub fn joint_mutual_info(joint: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
    let n_out = joint.first().map_or(0, Vec::len);
    let pl: Vec<f64> = (0..n_out).map(|l| joint.iter().map(|row| row[l]).sum()).collect();
    let mut mi = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (l, &p) in row.iter().enumerate() {
            if p > 0.0 && px[x] > 0.0 && pl[l] > 0.0 {
                mi += p * (p / (px[x] * pl[l])).log2();
            }
        }
    }
    mi
}

/// H(X:Y) from the joint distribution P(x, l) = p_x tr(K_l ρ_x K_l†).
pub fn measured_mutual_info(e: &Ensemble, y: &Measurement) -> Result<f64> {
    let joint = e
        .iter()
        .map(|(p, rho)| {
            Ok(operations::measure_probs(y, rho)?.into_iter().map(|q| (p * q).max(0.0)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(joint_mutual_info(&joint))
}

fn dephased_mi_in(e: &Ensemble, u: &ComplexMatrix) -> f64 {
    let d = u.cols();
    let cols: Vec<_> = (0..d).map(|i| u.column(i)).collect();
    let mut mix = vec![0.0; d];
    let mut cond = 0.0;
    for (p, rho) in e.iter() {
        let q: Vec<f64> = cols.iter().map(|v| rho.matrix().expectation(v).re.max(0.0)).collect();
        for (m, qi) in mix.iter_mut().zip(&q) {
            *m += p * qi;
        }
        cond += p * shannon_entropy(&q);
    }
    shannon_entropy(&mix) - cond
}

/// S(ρ^d) − Σ p_x S(ρ_x^d): the information a measurement in `basis`
/// (computational if `None`) extracts.
pub fn dephased_mutual_info(e: &Ensemble, basis: Option<&ProjectiveBasis>) -> Result<f64> {
    match basis {
        Some(b) => {
            if b.dim() != e.dim() {
                return Err(Error::Dimension("basis and ensemble dimensions differ".into()));
            }
            Ok(dephased_mi_in(e, b.unitary()))
        }
        None => Ok(dephased_mi_in(e, &ComplexMatrix::identity(e.dim()))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelReport {
    pub chi: f64,
    pub h_xy: f64,
    pub il: f64,
    pub cl: f64,
    /// |il − cl|
    pub residual: f64,
    pub basis_label: String,
}

/// IL = χ − H(X:Y) next to CL for the same basis; fails if the two disagree
/// by more than [`IDENTITY_ERROR_TOL`].
pub fn information_loss(e: &Ensemble, basis: Option<&ProjectiveBasis>) -> Result<ChannelReport> {
    let chi = holevo_chi(e)?;
    let h_xy = dephased_mutual_info(e, basis)?;
    let il = chi - h_xy;
    let cl = coherence::coherence_loss(e, basis)?;
    let residual = (il - cl).abs();
    if residual > IDENTITY_ERROR_TOL {
        return Err(Error::InternalConsistency { what: "information loss differs from coherence loss".into(), residual });
    }
    Ok(ChannelReport {
        chi,
        h_xy,
        il,
        cl,
        residual,
        basis_label: basis.map_or("computational", ProjectiveBasis::label).to_string(),
    })
}

/// Capacity loss for the ensemble of phase copies {1/d, U_k ρ U_k†} that the
/// coherence-erasing channel mixes; its mixture is the dephased ρ.
pub fn erasure_information_loss(rho: &DensityMatrix, basis: &ProjectiveBasis) -> Result<ChannelReport> {
    let ch = erasing_channel(basis);
    let members = ch.unitaries.iter().map(|u| rho.evolve(u)).collect::<Result<Vec<_>>>()?;
    information_loss(&Ensemble::new(ch.weights, members)?, Some(basis))
}

#[derive(Clone, Debug)]
pub struct AccessibleInfoResult {
    /// Projective accessible information (bits).
    pub value: f64,
    pub best_basis: ProjectiveBasis,
    pub n_restarts: usize,
    pub converged: bool,
    pub chi: f64,
}

/// max over orthonormal bases of the dephased mutual information.
pub fn accessible_info(e: &Ensemble, opts: &OptimizerOptions) -> Result<AccessibleInfoResult> {
    let chi = holevo_chi(e)?;
    let res = optimize::maximize_over_bases(e.dim(), opts, |u| dephased_mi_in(e, u));
    Ok(AccessibleInfoResult {
        value: res.value,
        best_basis: res.basis.with_label("Y_max"),
        n_restarts: res.n_restarts,
        converged: res.converged,
        chi,
    })
}

/// Exhaustive (θ, φ) scan of qubit bases; the brute-force reference for
/// [`accessible_info`] on qubit ensembles.
pub fn grid_scan_accessible_info(e: &Ensemble, n_theta: usize, n_phi: usize) -> Result<(f64, ProjectiveBasis)> {
    if e.dim() != 2 {
        return Err(Error::Dimension("grid scan is only available for qubits".into()));
    }
    let g = optimize::grid_scan_qubit(n_theta, n_phi, |u| dephased_mi_in(e, u));
    Ok((g.value, ProjectiveBasis::qubit(g.theta, g.phi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::operations::random_strictly_incoherent;
    use crate::random::{random_ensemble, random_unitary, seeded_rng};

    const H_075: f64 = 0.811_278_124_459_132_9;
    const H_COS2_PI8: f64 = 0.600_876_036_692_856_2;

    fn zero() -> DensityMatrix {
        DensityMatrix::basis_state(2, 0).unwrap()
    }
    fn one() -> DensityMatrix {
        DensityMatrix::basis_state(2, 1).unwrap()
    }
    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1., 0.), c(1., 0.)]).unwrap()
    }

    #[test]
    fn holevo_anchors() {
        assert!((holevo_chi(&Ensemble::uniform(vec![zero(), one()]).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(holevo_chi(&Ensemble::new(vec![1.0], vec![plus()]).unwrap()).unwrap().abs() < 1e-12);
        let chi = holevo_chi(&Ensemble::uniform(vec![zero(), plus()]).unwrap()).unwrap();
        assert!((chi - H_COS2_PI8).abs() < 1e-9);
    }

    #[test]
    fn measured_mutual_info_anchors() {
        let comp = ProjectiveBasis::computational(2).measurement();
        let orth = Ensemble::uniform(vec![zero(), one()]).unwrap();
        assert!((measured_mutual_info(&orth, &comp).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(measured_mutual_info(&orth, &Measurement::trivial(2)).unwrap(), 0.0);
        let e = Ensemble::uniform(vec![zero(), plus()]).unwrap();
        assert!((measured_mutual_info(&e, &comp).unwrap() - (H_075 - 0.5)).abs() < 1e-12);
        assert!((dephased_mutual_info(&e, None).unwrap() - (H_075 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn dephased_mi_of_diagonal_ensemble_is_its_holevo() {
        let e = Ensemble::new(
            vec![0.2, 0.5, 0.3],
            vec![
                DensityMatrix::diagonal(&[0.1, 0.2, 0.7]).unwrap(),
                DensityMatrix::diagonal(&[0.5, 0.5, 0.0]).unwrap(),
                DensityMatrix::diagonal(&[0.0, 0.0, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        assert!((dephased_mutual_info(&e, None).unwrap() - holevo_chi(&e).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dephased_mi_invariant_under_basis_permutation() {
        let mut rng = seeded_rng(21);
        let e = random_ensemble(3, 3, &mut rng).unwrap();
        let perm = ComplexMatrix::from_fn(3, 3, |i, j| if (i + 1) % 3 == j { c(1., 0.) } else { c(0., 0.) });
        let moved = e.evolve(&perm).unwrap();
        let a = dephased_mutual_info(&e, None).unwrap();
        let b = dephased_mutual_info(&moved, None).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn information_loss_anchor() {
        let r = information_loss(&Ensemble::uniform(vec![zero(), plus()]).unwrap(), None).unwrap();
        let expected = 0.5 - (H_075 - H_COS2_PI8);
        assert!((r.il - expected).abs() < 1e-9 && (r.cl - expected).abs() < 1e-9);
        let diag = Ensemble::uniform(vec![zero(), DensityMatrix::diagonal(&[0.4, 0.6]).unwrap()]).unwrap();
        let r = information_loss(&diag, None).unwrap();
        assert!(r.il.abs() < 1e-12 && r.cl.abs() < 1e-12);
    }

    #[test]
    fn lemma1_consistency_and_si_bound_on_random_instances() {
        let mut rng = seeded_rng(5);
        for _ in 0..50 {
            let e = random_ensemble(3, 3, &mut rng).unwrap();
            let u = random_unitary(3, &mut rng).unwrap();
            let basis = ProjectiveBasis::from_unitary(u.clone(), "r").unwrap();
            let closed = dephased_mutual_info(&e, Some(&basis)).unwrap();
            let joint = measured_mutual_info(&e, &basis.measurement()).unwrap();
            assert!((closed - joint).abs() < 1e-9);
            let si = random_strictly_incoherent(3, 4, &mut rng).unwrap().conjugated(&u).unwrap();
            assert!(measured_mutual_info(&e, &si).unwrap() <= closed + 1e-8);
        }
    }

    #[test]
    fn erasure_loss_equals_coherence() {
        let mut rng = seeded_rng(9);
        for _ in 0..10 {
            let rho = crate::random::random_density(2, 1, &mut rng).unwrap();
            let b = ProjectiveBasis::computational(2);
            let r = erasure_information_loss(&rho, &b).unwrap();
            let cr = coherence::relative_entropy_coherence(&rho, Some(&b)).unwrap();
            assert!((r.il - cr).abs() < 1e-7);
            assert!(r.h_xy.abs() < 1e-9);
        }
    }

    #[test]
    fn accessible_info_of_orthogonal_states() {
        let e = Ensemble::new(vec![0.3, 0.7], vec![zero(), one()]).unwrap();
        let r = accessible_info(&e, &OptimizerOptions { restarts: 4, ..Default::default() }).unwrap();
        let hx = shannon_entropy(&[0.3, 0.7]);
        assert!((r.value - hx).abs() < 1e-9);
    }

    #[test]
    fn accessible_info_covariant_under_rotation() {
        let mut rng = seeded_rng(17);
        let u = random_unitary(2, &mut rng).unwrap();
        let e = Ensemble::uniform(vec![zero(), one()]).unwrap().evolve(&u).unwrap();
        for seed in 0..3 {
            let r = accessible_info(&e, &OptimizerOptions { restarts: 8, seed, ..Default::default() }).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_scan_rejects_qutrits() {
        let e = Ensemble::new(vec![1.0], vec![DensityMatrix::maximally_mixed(3).unwrap()]).unwrap();
        assert!(grid_scan_accessible_info(&e, 10, 10).is_err());
    }
}
