//! Seeded instance generators.
//!
//! Every generator takes an explicit RNG so batches can give each instance
//! its own ChaCha stream; the `*_seeded` helpers cover the one-off case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, C64};
use crate::states::{DensityMatrix, Ensemble, SeparableSpec};

pub type QRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> QRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> QRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// G G† / tr(G G†) with G a `dim × rank` complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::invalid(format!("rank {rank} out of range 1..={dim}")));
    }
    linalg::check_dim(dim)?;
    let g = ginibre(dim, rank, rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr))
}

pub fn random_density_seeded(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density(dim, rank, &mut seeded_rng(seed))
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    random_density(dim, 1, rng)
}

/// Point drawn uniformly from the probability simplex (normalized Exp(1)).
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Haar-random unitary: Gram–Schmidt on the columns of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    linalg::check_dim(dim)?;
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // two passes keep the basis orthonormal to machine precision
        for _ in 0..2 {
            for q in &cols {
                let overlap: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// Ensemble with flat-simplex probabilities and members of random rank.
pub fn random_ensemble(dim: usize, n_members: usize, rng: &mut impl Rng) -> Result<Ensemble> {
    if n_members == 0 {
        return Err(Error::invalid("ensemble needs at least one member"));
    }
    let probs = random_simplex(n_members, rng);
    let members = (0..n_members)
        .map(|_| {
            let rank = rng.random_range(1..=dim.max(1));
            random_density(dim, rank, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(probs, members)
}

pub fn random_ensemble_seeded(dim: usize, n_members: usize, seed: u64) -> Result<Ensemble> {
    random_ensemble(dim, n_members, &mut seeded_rng(seed))
}

/// Term-wise random separable state: each factor drawn independently.
pub fn random_separable(dims: (usize, usize), n_terms: usize, rng: &mut impl Rng) -> Result<SeparableSpec> {
    if n_terms == 0 {
        return Err(Error::invalid("separable spec needs at least one term"));
    }
    let (da, db) = dims;
    linalg::check_dim(da.saturating_mul(db))?;
    let probs = random_simplex(n_terms, rng);
    let mut a_parts = Vec::with_capacity(n_terms);
    let mut b_parts = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let ra = rng.random_range(1..=da);
        a_parts.push(random_density(da, ra, rng)?);
        let rb = rng.random_range(1..=db);
        b_parts.push(random_density(db, rb, rng)?);
    }
    SeparableSpec::new(probs, a_parts, b_parts)
}
