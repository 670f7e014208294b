//! Bipartite quantities for measurements on B: mutual information,
//! classical correlation J, basis-dependent discord δ(A←B), its coherence
//! form, optimized discord D(A←B), and the separable-state inequality checks.

use serde::Serialize;

use crate::coherence::{relative_entropy_coherence, shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::infotheory::{self, accessible_info};
use crate::io::MatrixRepr;
use crate::linalg::{self, ComplexMatrix};
use crate::operations::ProjectiveBasis;
use crate::optimize::{self, OptimizerOptions};
use crate::states::{BipartiteState, DensityMatrix, SeparableSpec};

/// Conditional outcomes with smaller probability are skipped.
pub const MIN_BRANCH_PROB: f64 = 1e-12;

/// Disagreement between the two routes to δ that is reported as an error.
pub const ROUTE_ERROR_TOL: f64 = 1e-6;

/// Largest B dimension accepted by the discord optimizer.
pub const MAX_OPTIMIZED_DIM_B: usize = 4;

/// Slack below −this counts as a violated inequality.
pub const SLACK_TOL: f64 = 1e-7;

/// Tolerance on avg B coherence minus local coherence.
pub const LEMMA2_SLACK_TOL: f64 = 1e-8;

/// Slack at or below this counts as equality.
pub const EQUALITY_SLACK: f64 = 1e-7;

/// Orthogonality defect at or below this counts as orthogonal A parts.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

fn entropy_of_unnormalized(m: &ComplexMatrix) -> Result<f64> {
    let mut ev = linalg::eigenvalues_hermitian(m)?;
    let total: f64 = ev.iter().map(|l| l.max(0.0)).sum();
    if total <= 0.0 {
        return Ok(0.0);
    }
    for l in &mut ev {
        *l = (l.max(0.0) / total).min(1.0);
    }
    Ok(shannon_entropy(&ev))
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB).
pub fn mutual_information(s: &BipartiteState) -> Result<f64> {
    Ok(von_neumann_entropy(&s.reduced_a()?)? + von_neumann_entropy(&s.reduced_b()?)?
        - von_neumann_entropy(s.state())?)
}

/// Σ_i q_i S(ρ_A|i) for the basis vectors in the columns of `u`.
fn conditional_entropy_in(s: &BipartiteState, u: &ComplexMatrix) -> Result<f64> {
    let (da, db) = s.dims();
    let rho = s.matrix();
    let mut total = 0.0;
    for i in 0..db {
        let v = u.column(i);
        let block = ComplexMatrix::from_fn(da, da, |a, a2| {
            let mut acc = linalg::c(0.0, 0.0);
            for k in 0..db {
                let vk = v[k].conj();
                if vk.norm_sqr() == 0.0 {
                    continue;
                }
                for k2 in 0..db {
                    acc += vk * rho[(a * db + k, a2 * db + k2)] * v[k2];
                }
            }
            acc
        });
        let q = block.trace().re;
        if q > MIN_BRANCH_PROB {
            total += q * entropy_of_unnormalized(&block)?;
        }
    }
    Ok(total)
}

fn check_basis_b(s: &BipartiteState, basis: Option<&ProjectiveBasis>) -> Result<()> {
    if let Some(b) = basis {
        if b.dim() != s.dims().1 {
            return Err(Error::Dimension(format!(
                "basis has dimension {}, subsystem B has dimension {}",
                b.dim(),
                s.dims().1
            )));
        }
    }
    Ok(())
}

fn basis_matrix(s: &BipartiteState, basis: Option<&ProjectiveBasis>) -> ComplexMatrix {
    basis.map_or_else(|| ComplexMatrix::identity(s.dims().1), |b| b.unitary().clone())
}

/// S(ρ_AB | {Π_i^B}) = Σ_i q_i S(ρ_A|i) with q_i = tr[(1 ⊗ Π_i) ρ].
pub fn conditional_entropy_after_b_measurement(s: &BipartiteState, basis_b: Option<&ProjectiveBasis>) -> Result<f64> {
    check_basis_b(s, basis_b)?;
    conditional_entropy_in(s, &basis_matrix(s, basis_b))
}

/// J(A:B) = S(ρ_A) − S(ρ_AB | {Π_i^B}).
pub fn classical_info_j(s: &BipartiteState, basis_b: Option<&ProjectiveBasis>) -> Result<f64> {
    Ok(von_neumann_entropy(&s.reduced_a()?)? - conditional_entropy_after_b_measurement(s, basis_b)?)
}

/// C_r^{A|B}(ρ) = S(ρ^{d_B}) − S(ρ), pinching only the B factor.
pub fn local_coherence_ab(s: &BipartiteState, basis_b: Option<&ProjectiveBasis>) -> Result<f64> {
    check_basis_b(s, basis_b)?;
    let pinched = linalg::block_dephase_b(s.matrix(), s.dims(), basis_b.map(ProjectiveBasis::unitary))?;
    let pinched = DensityMatrix::new(pinched)?;
    Ok((von_neumann_entropy(&pinched)? - von_neumann_entropy(s.state())?).max(0.0))
}

/// δ(A←B) = C_r^{A|B}(ρ_AB) − C_r(ρ_B).
pub fn delta_via_coherence(s: &BipartiteState, basis_b: Option<&ProjectiveBasis>) -> Result<f64> {
    Ok(local_coherence_ab(s, basis_b)? - relative_entropy_coherence(&s.reduced_b()?, basis_b)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscordReport {
    pub mutual_info: f64,
    pub classical_info_j: f64,
    pub delta: f64,
    pub basis_label: String,
    pub local_coherence_ab: f64,
    pub c_r_b: f64,
    /// |δ − (C_r^{A|B} − C_r(ρ_B))|
    pub route_gap: f64,
}

/// δ(A←B) = I(A:B) − J(A:B), cross-checked against the coherence route.
pub fn delta_discord(s: &BipartiteState, basis_b: Option<&ProjectiveBasis>) -> Result<DiscordReport> {
    let mutual_info = mutual_information(s)?;
    let j = classical_info_j(s, basis_b)?;
    let delta = mutual_info - j;
    let local = local_coherence_ab(s, basis_b)?;
    let c_r_b = relative_entropy_coherence(&s.reduced_b()?, basis_b)?;
    let route_gap = (delta - (local - c_r_b)).abs();
    if route_gap > ROUTE_ERROR_TOL {
        return Err(Error::InternalConsistency {
            what: "discord differs from local coherence minus coherence of B".into(),
            residual: route_gap,
        });
    }
    Ok(DiscordReport {
        mutual_info,
        classical_info_j: j,
        delta,
        basis_label: basis_b.map_or("computational", ProjectiveBasis::label).to_string(),
        local_coherence_ab: local,
        c_r_b,
        route_gap,
    })
}

/// δ as a function of a basis matrix, with the basis-independent part
/// I(A:B) − S(ρ_A) precomputed.
struct DeltaObjective<'a> {
    state: &'a BipartiteState,
    offset: f64,
}

impl<'a> DeltaObjective<'a> {
    fn new(state: &'a BipartiteState) -> Result<Self> {
        let offset = mutual_information(state)? - von_neumann_entropy(&state.reduced_a()?)?;
        Ok(Self { state, offset })
    }

    fn eval(&self, u: &ComplexMatrix) -> f64 {
        conditional_entropy_in(self.state, u).map_or(f64::NAN, |c| self.offset + c)
    }
}

#[derive(Clone, Debug)]
pub struct OptimizedDiscord {
    pub value: f64,
    pub best_basis: ProjectiveBasis,
    pub n_restarts: usize,
    pub converged: bool,
}

fn check_optimizable(s: &BipartiteState) -> Result<()> {
    if s.dims().1 > MAX_OPTIMIZED_DIM_B {
        return Err(Error::Validation(format!(
            "discord optimization supports d_B <= {MAX_OPTIMIZED_DIM_B}, got {}",
            s.dims().1
        )));
    }
    Ok(())
}

/// D(A←B): δ minimized over projective bases on B.
pub fn quantum_discord(s: &BipartiteState, opts: &OptimizerOptions) -> Result<OptimizedDiscord> {
    check_optimizable(s)?;
    let obj = DeltaObjective::new(s)?;
    let res = optimize::minimize_over_bases(s.dims().1, opts, |u| {
        let v = obj.eval(u);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    });
    Ok(OptimizedDiscord {
        value: res.value,
        best_basis: res.basis.with_label("discord-minimizer"),
        n_restarts: res.n_restarts,
        converged: res.converged,
    })
}

/// Exhaustive (θ, φ) scan for qubit B; returns the minimum δ.
pub fn grid_scan_discord(s: &BipartiteState, n_theta: usize, n_phi: usize) -> Result<(f64, ProjectiveBasis)> {
    if s.dims().1 != 2 {
        return Err(Error::Dimension("grid scan needs a qubit on B".into()));
    }
    let obj = DeltaObjective::new(s)?;
    let g = optimize::grid_scan_qubit(n_theta, n_phi, |u| -obj.eval(u));
    Ok((-g.value, ProjectiveBasis::qubit(g.theta, g.phi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    Eq5,
    Eq6,
    Eq7,
    Eq8,
    Lemma2,
}

/// One evaluated inequality lhs ≤ rhs, with slack = rhs − lhs.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityRecord {
    pub inequality: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub basis: MatrixRepr,
    pub seed: Option<u64>,
    pub converged: bool,
}

impl InequalityRecord {
    fn new(kind: InequalityKind, lhs: f64, rhs: f64, basis: &ComplexMatrix, seed: Option<u64>, converged: bool) -> Self {
        Self { inequality: kind, lhs, rhs, slack: rhs - lhs, basis: MatrixRepr::from(basis), seed, converged }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Record {
    /// C_r^{A|B}(ρ_AB)
    pub local_coherence: f64,
    /// Σ_x p_x C_r(ρ_xb)
    pub average_b_coherence: f64,
    pub slack: f64,
    /// max_{x≠x'} tr(ρ_xa ρ_x'a)
    pub orthogonality_defect: f64,
    pub equality_by_slack: bool,
    pub orthogonal_a_parts: bool,
    /// False when the two equality flags disagree (warning, not an error).
    pub flags_agree: bool,
    pub record: InequalityRecord,
}

impl Lemma2Record {
    pub fn holds(&self) -> bool {
        self.slack >= -LEMMA2_SLACK_TOL
    }
}

pub fn orthogonality_defect(parts: &[DensityMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, a) in parts.iter().enumerate() {
        for b in &parts[x + 1..] {
            worst = worst.max(a.matrix().matmul(b.matrix()).trace().re);
        }
    }
    worst
}

/// C_r^{A|B}(Σ p_x ρ_xa ⊗ ρ_xb) ≤ Σ p_x C_r(ρ_xb), with the equality
/// diagnosis against orthogonality of the A parts.
pub fn check_lemma2(spec: &SeparableSpec, basis_b: Option<&ProjectiveBasis>) -> Result<Lemma2Record> {
    let s = spec.compile()?;
    let lhs = local_coherence_ab(&s, basis_b)?;
    let rhs: f64 = spec
        .probs()
        .iter()
        .zip(spec.b_parts())
        .map(|(p, b)| Ok(p * relative_entropy_coherence(b, basis_b)?))
        .sum::<Result<f64>>()?;
    let slack = rhs - lhs;
    let defect = orthogonality_defect(spec.a_parts());
    let equality_by_slack = slack <= EQUALITY_SLACK;
    let orthogonal_a_parts = defect <= ORTHOGONALITY_TOL;
    Ok(Lemma2Record {
        local_coherence: lhs,
        average_b_coherence: rhs,
        slack,
        orthogonality_defect: defect,
        equality_by_slack,
        orthogonal_a_parts,
        flags_agree: equality_by_slack == orthogonal_a_parts,
        record: InequalityRecord::new(InequalityKind::Lemma2, lhs, rhs, &basis_matrix(&s, basis_b), None, true),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementarityRecord {
    pub chi: f64,
    pub accessible_info: f64,
    pub accessible_basis: MatrixRepr,
    /// Reference-basis quantities: δ is bounded by both CL_b and IL_b.
    pub cl_b: f64,
    pub il_b: f64,
    pub delta_reference: f64,
    /// δ at the accessible-information maximizer, bounded by χ − H(X:Y_max).
    pub delta_at_ymax: f64,
    /// IL_b at Y_max, i.e. χ − H(X:Y_max).
    pub il_b_min: f64,
    /// Smallest δ over every basis evaluated (optimizer, Y_max, reference).
    pub discord: f64,
    pub discord_basis: MatrixRepr,
    /// Largest δ over bases, for the reading where the δ side takes the
    /// δ-maximizer instead of Y_max. Recorded, not asserted.
    pub delta_max: f64,
    pub converged: bool,
    pub lower_confidence: bool,
    pub records: Vec<InequalityRecord>,
}

impl ComplementarityRecord {
    pub fn holds(&self) -> bool {
        self.records.iter().all(|r| r.holds(SLACK_TOL))
    }

    pub fn worst_slack(&self) -> f64 {
        self.records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }
}

/// Checks a separable state's discord bounds: δ against the coherence and
/// information loss of Bob's ensemble {p_x, ρ_xb}, and D(A←B) + H(X:Y_max)
/// against χ.
pub fn check_complementarity(
    spec: &SeparableSpec,
    opts: &OptimizerOptions,
    reference: Option<&ProjectiveBasis>,
) -> Result<ComplementarityRecord> {
    let s = spec.compile()?;
    check_optimizable(&s)?;
    check_basis_b(&s, reference)?;
    let seed = Some(opts.seed);
    let ens_b = spec.b_ensemble()?;
    let ref_u = basis_matrix(&s, reference);

    let cl_b = crate::coherence::coherence_loss(&ens_b, reference)?;
    let channel = infotheory::information_loss(&ens_b, reference)?;
    let chi = channel.chi;
    let il_b = channel.il;

    let obj = DeltaObjective::new(&s)?;
    let delta_reference = obj.eval(&ref_u);

    let acc = accessible_info(&ens_b, opts)?;
    let ymax = acc.best_basis.unitary().clone();
    let delta_at_ymax = obj.eval(&ymax);
    let il_b_min = chi - acc.value;

    let d = quantum_discord(&s, opts)?;
    let (mut discord, mut discord_basis) = (d.value, d.best_basis.unitary().clone());
    for (v, u) in [(delta_at_ymax, &ymax), (delta_reference, &ref_u)] {
        if v < discord {
            discord = v;
            discord_basis = u.clone();
        }
    }

    let alt_opts = OptimizerOptions { restarts: (opts.restarts / 4).max(1), ..*opts };
    let delta_max = optimize::maximize_over_bases(s.dims().1, &alt_opts, |u| {
        let v = obj.eval(u);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    })
    .value;

    let converged = acc.converged && d.converged;
    let records = vec![
        InequalityRecord::new(InequalityKind::Eq5, delta_reference, cl_b, &ref_u, seed, true),
        InequalityRecord::new(InequalityKind::Eq6, delta_reference, il_b, &ref_u, seed, true),
        InequalityRecord::new(InequalityKind::Eq7, delta_at_ymax, il_b_min, &ymax, seed, acc.converged),
        InequalityRecord::new(InequalityKind::Eq8, discord + acc.value, chi, &discord_basis, seed, converged),
    ];
    if records.iter().any(|r| r.lhs.is_nan()) {
        return Err(Error::Numerical { what: "conditional entropy evaluation failed".into(), residual: f64::NAN });
    }
    Ok(ComplementarityRecord {
        chi,
        accessible_info: acc.value,
        accessible_basis: MatrixRepr::from(&ymax),
        cl_b,
        il_b,
        delta_reference,
        delta_at_ymax,
        il_b_min,
        discord,
        discord_basis: MatrixRepr::from(&discord_basis),
        delta_max,
        converged,
        lower_confidence: !converged,
        records,
    })
}
