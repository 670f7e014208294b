//! Entropies and coherence functionals. All entropic quantities are in bits.

use serde::Serialize;

use crate::error::Result;
use crate::operations::ProjectiveBasis;
use crate::states::{DensityMatrix, Ensemble};

/// Eigenvalues (or probabilities) below this are treated as exactly zero.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// −Σ p log₂ p with 0·log 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p >= ENTROPY_CLAMP)
        .map(|&p| {
            let p = p.min(1.0);
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&rho.spectrum()?))
}

/// Outcome distribution of a measurement in `basis` (computational if
/// `None`), i.e. the spectrum of the dephased state.
pub(crate) fn dephased_probs(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> Vec<f64> {
    let p = match basis {
        Some(b) => b.diagonal_probs(rho.matrix()),
        None => rho.matrix().real_diagonal(),
    };
    p.into_iter().map(|x| x.max(0.0)).collect()
}

/// S(ρ^d) in the given basis.
pub fn dephased_entropy(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> f64 {
    shannon_entropy(&dephased_probs(rho, basis))
}

/// C_r(ρ) = S(ρ^d) − S(ρ).
pub fn relative_entropy_coherence(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> Result<f64> {
    check_basis(rho, basis)?;
    Ok((dephased_entropy(rho, basis) - von_neumann_entropy(rho)?).max(0.0))
}

/// Σ_{i≠j} |ρ_ij| in the given basis.
pub fn l1_coherence(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> Result<f64> {
    check_basis(rho, basis)?;
    let local = match basis {
        Some(b) => rho.matrix().in_basis(b.unitary()),
        None => rho.matrix().clone(),
    };
    let d = local.rows();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += local[(i, j)].norm();
            }
        }
    }
    Ok(total)
}

fn check_basis(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> Result<()> {
    if let Some(b) = basis {
        if b.dim() != rho.dim() {
            return Err(crate::Error::Dimension(format!(
                "basis has dimension {}, state has dimension {}",
                b.dim(),
                rho.dim()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    pub entropy: f64,
    pub c_r: f64,
    pub c_l1: f64,
    pub basis_label: String,
}

pub fn coherence_report(rho: &DensityMatrix, basis: Option<&ProjectiveBasis>) -> Result<CoherenceReport> {
    Ok(CoherenceReport {
        entropy: von_neumann_entropy(rho)?,
        c_r: relative_entropy_coherence(rho, basis)?,
        c_l1: l1_coherence(rho, basis)?,
        basis_label: basis.map_or("computational", ProjectiveBasis::label).to_string(),
    })
}

/// Σ_x p_x C_r(ρ_x).
pub fn ensemble_average_coherence(e: &Ensemble, basis: Option<&ProjectiveBasis>) -> Result<f64> {
    e.iter().map(|(p, rho)| Ok(p * relative_entropy_coherence(rho, basis)?)).sum()
}

/// CL = Σ_x p_x C_r(ρ_x) − C_r(Σ_x p_x ρ_x).
pub fn coherence_loss(e: &Ensemble, basis: Option<&ProjectiveBasis>) -> Result<f64> {
    Ok(ensemble_average_coherence(e, basis)? - relative_entropy_coherence(&e.mixture()?, basis)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1., 0.), c(1., 0.)]).unwrap()
    }

    fn zero() -> DensityMatrix {
        DensityMatrix::basis_state(2, 0).unwrap()
    }

    // H₂(0.75), H₂(cos²(π/8)) evaluated by hand from −Σ p log₂ p.
    const H_075: f64 = 0.811_278_124_459_132_9;
    const H_COS2_PI8: f64 = 0.600_876_036_692_856_2;

    #[test]
    fn entropy_anchors() {
        assert!(von_neumann_entropy(&plus()).unwrap().abs() < 1e-12);
        for d in 1..=5 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(d).unwrap()).unwrap();
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
        let s = von_neumann_entropy(&DensityMatrix::diagonal(&[0.75, 0.25]).unwrap()).unwrap();
        assert!((s - H_075).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_coherence_anchors() {
        assert_eq!(relative_entropy_coherence(&DensityMatrix::diagonal(&[0.4, 0.6]).unwrap(), None).unwrap(), 0.0);
        assert!((relative_entropy_coherence(&plus(), None).unwrap() - 1.0).abs() < 1e-9);
        let mix = DensityMatrix::mixture(&[0.5, 0.5], &[zero(), plus()]).unwrap();
        let cr = relative_entropy_coherence(&mix, None).unwrap();
        assert!((cr - (H_075 - H_COS2_PI8)).abs() < 1e-9);
        assert!((cr - 0.210402).abs() < 1e-6);
    }

    #[test]
    fn l1_anchors() {
        assert_eq!(l1_coherence(&DensityMatrix::diagonal(&[0.2, 0.8]).unwrap(), None).unwrap(), 0.0);
        assert!((l1_coherence(&plus(), None).unwrap() - 1.0).abs() < 1e-12);
        let max3 = DensityMatrix::maximally_coherent(3).unwrap();
        assert!((l1_coherence(&max3, None).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_basis_sees_plus_as_incoherent() {
        let h = ProjectiveBasis::hadamard();
        assert!(relative_entropy_coherence(&plus(), Some(&h)).unwrap() < 1e-9);
        assert!(l1_coherence(&plus(), Some(&h)).unwrap() < 1e-12);
        assert!((relative_entropy_coherence(&zero(), Some(&h)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn average_and_loss_anchors() {
        let e = Ensemble::uniform(vec![zero(), plus()]).unwrap();
        assert!((ensemble_average_coherence(&e, None).unwrap() - 0.5).abs() < 1e-9);
        let cl = coherence_loss(&e, None).unwrap();
        assert!((cl - (0.5 - (H_075 - H_COS2_PI8))).abs() < 1e-9);

        let diag = Ensemble::uniform(vec![zero(), DensityMatrix::diagonal(&[0.3, 0.7]).unwrap()]).unwrap();
        assert_eq!(ensemble_average_coherence(&diag, None).unwrap(), 0.0);

        let single = Ensemble::new(vec![1.0], vec![plus()]).unwrap();
        assert!(coherence_loss(&single, None).unwrap().abs() < 1e-12);
        let same = Ensemble::uniform(vec![plus(), plus(), plus()]).unwrap();
        assert!(coherence_loss(&same, None).unwrap().abs() < 1e-12);
    }

    #[test]
    fn basis_dimension_is_checked() {
        assert!(relative_entropy_coherence(&plus(), Some(&ProjectiveBasis::computational(3))).is_err());
    }
}
