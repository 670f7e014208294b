//! Multi-start derivative-free search over orthonormal bases.
//!
//! A basis of C^d is parametrized (up to column phases, which no projective
//! measurement can see) by a product of d(d−1)/2 complex Givens rotations,
//! one angle and one phase each. Each start runs a coordinate-wise
//! quadratic-fit refinement; the best start wins, ties going to the lowest
//! restart index.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, C64};
use crate::operations::ProjectiveBasis;
use crate::random::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Stop once a full sweep improves the objective by less than this and
    /// the step has shrunk below `MIN_STEP`.
    pub tol: f64,
    /// Maximum number of coordinate sweeps per start.
    pub max_iters: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0, tol: 1e-7, max_iters: 500 }
    }
}

const INITIAL_STEP: f64 = 0.4;
const MIN_STEP: f64 = 1e-5;

/// Ties within this margin keep the earlier restart.
const TIE_TOL: f64 = 1e-9;

pub fn n_params(dim: usize) -> usize {
    dim * dim.saturating_sub(1)
}

/// Π_{i<j} G(i, j, θ, φ), with G mixing columns i and j as
/// col_i ← cos θ·col_i + e^{iφ} sin θ·col_j,
/// col_j ← −e^{−iφ} sin θ·col_i + cos θ·col_j.
pub fn givens_unitary(dim: usize, params: &[f64]) -> ComplexMatrix {
    assert_eq!(params.len(), n_params(dim), "wrong parameter count");
    let mut u = ComplexMatrix::identity(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            let (s, co) = params[k].sin_cos();
            let e = C64::from_polar(1.0, params[k + 1]);
            k += 2;
            for r in 0..dim {
                let a = u[(r, i)];
                let b = u[(r, j)];
                u[(r, i)] = a * co + b * e * s;
                u[(r, j)] = -a * e.conj() * s + b * co;
            }
        }
    }
    u
}

#[derive(Clone, Debug)]
struct LocalResult {
    params: Vec<f64>,
    value: f64,
    converged: bool,
}

fn local_maximize(f: &(impl Fn(&[f64]) -> f64 + ?Sized), x0: Vec<f64>, opts: &OptimizerOptions) -> LocalResult {
    let mut x = x0;
    let mut fx = f(&x);
    if x.is_empty() {
        return LocalResult { params: x, value: fx, converged: true };
    }
    let mut h = INITIAL_STEP;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let start = fx;
        for i in 0..x.len() {
            let xi = x[i];
            x[i] = xi + h;
            let fp = f(&x);
            x[i] = xi - h;
            let fm = f(&x);
            let mut best = (fx, xi);
            if fp > best.0 {
                best = (fp, xi + h);
            }
            if fm > best.0 {
                best = (fm, xi - h);
            }
            let curvature = fp - 2.0 * fx + fm;
            if curvature < 0.0 {
                let t = (0.5 * h * (fm - fp) / curvature).clamp(-4.0 * h, 4.0 * h);
                if t.abs() > 1e-3 * h {
                    x[i] = xi + t;
                    let ft = f(&x);
                    if ft > best.0 {
                        best = (ft, xi + t);
                    }
                }
            }
            x[i] = best.1;
            fx = best.0;
        }
        if fx - start < opts.tol {
            if h <= MIN_STEP {
                converged = true;
                break;
            }
            h *= 0.5;
        }
    }
    LocalResult { params: x, value: fx, converged }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: f64,
    pub basis: ProjectiveBasis,
    pub restart_index: usize,
    pub n_restarts: usize,
    pub converged: bool,
}

/// Maximizes `objective(U)` over bases (columns of U). Restart 0 starts at
/// the computational basis; the others at uniformly random parameters drawn
/// from stream `r` of `opts.seed`.
pub fn maximize_over_bases<F>(dim: usize, opts: &OptimizerOptions, objective: F) -> SearchResult
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let restarts = opts.restarts.max(1);
    let np = n_params(dim);
    let f = |p: &[f64]| objective(&givens_unitary(dim, p));
    let results: Vec<LocalResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                vec![0.0; np]
            } else {
                let mut rng = stream_rng(opts.seed, r as u64);
                (0..np).map(|_| rng.random_range(-PI..PI)).collect()
            };
            local_maximize(&f, x0, opts)
        })
        .collect();
    let mut best_idx = 0;
    for (i, res) in results.iter().enumerate().skip(1) {
        if res.value > results[best_idx].value + TIE_TOL {
            best_idx = i;
        }
    }
    let best = &results[best_idx];
    let basis = ProjectiveBasis::from_unitary(givens_unitary(dim, &best.params), "optimized")
        .expect("Givens products are unitary");
    SearchResult { value: best.value, basis, restart_index: best_idx, n_restarts: restarts, converged: best.converged }
}

/// Minimization counterpart of [`maximize_over_bases`].
pub fn minimize_over_bases<F>(dim: usize, opts: &OptimizerOptions, objective: F) -> SearchResult
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let mut res = maximize_over_bases(dim, opts, |u| -objective(u));
    res.value = -res.value;
    res
}

#[derive(Clone, Debug)]
pub struct GridResult {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Exhaustive scan of qubit bases {|n⟩, |−n⟩} over θ_i = π i/(n_theta − 1)
/// and φ_j = 2π j/n_phi, maximizing `objective`.
pub fn grid_scan_qubit<F>(n_theta: usize, n_phi: usize, objective: F) -> GridResult
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let n_theta = n_theta.max(2);
    let n_phi = n_phi.max(1);
    (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = PI * i as f64 / (n_theta - 1) as f64;
            let mut best = GridResult { value: f64::NEG_INFINITY, theta, phi: 0.0 };
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let v = objective(ProjectiveBasis::qubit(theta, phi).unitary());
                if v > best.value {
                    best = GridResult { value: v, theta, phi };
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(GridResult { value: f64::NEG_INFINITY, theta: 0.0, phi: 0.0 }, |acc, g| {
            if g.value > acc.value {
                g
            } else {
                acc
            }
        })
}
