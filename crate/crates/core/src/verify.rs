//! Seeded randomized verification suites.
//!
//! Instance `i` of a suite draws from ChaCha stream `i` of the suite seed,
//! so results do not depend on how instances are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coherence::{coherence_loss, relative_entropy_coherence};
use crate::discord::{self, check_complementarity, check_lemma2};
use crate::error::{Error, Result};
use crate::infotheory::{dephased_mutual_info, holevo_chi, measured_mutual_info};
use crate::io::{Document, MatrixRepr};
use crate::operations::{random_strictly_incoherent, ProjectiveBasis};
use crate::optimize::OptimizerOptions;
use crate::random::{random_density, random_ensemble, random_pure, random_separable, random_unitary, stream_rng, QRng};
use crate::states::{DensityMatrix, Ensemble, SeparableSpec};

/// |IL − CL| allowed per basis.
pub const THEOREM1_TOL: f64 = 1e-9;
/// Closed-form vs joint-distribution mutual information.
pub const LEMMA1_CONSISTENCY_TOL: f64 = 1e-9;
/// Excess of a strictly incoherent instrument over the dephased value.
pub const LEMMA1_SI_TOL: f64 = 1e-8;
/// Lower bound on slack for overlapping A parts with coherent, distinct B parts.
pub const LEMMA2_STRICT_SLACK: f64 = 1e-4;

/// Guards that make B parts "coherent and distinct" in the overlapping
/// family: each carries at least this much C_r, and pairwise overlaps
/// tr(ρ ρ') stay below the second bound.
const MIN_B_COHERENCE: f64 = 0.1;
const MAX_B_OVERLAP: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Lemma1,
    Lemma2,
    Eq5to8,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Theorem1, Suite::Lemma1, Suite::Lemma2, Suite::Eq5to8];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Eq5to8 => "eq5to8",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown suite \"{s}\"")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n_instances: usize,
    pub seed: u64,
    /// (d_A, d_B) for the eq5to8 suite.
    pub dims: (usize, usize),
    pub opts: OptimizerOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { n_instances: 100, seed: 0, dims: (2, 2), opts: OptimizerOptions { restarts: 16, ..Default::default() } }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub suite: Suite,
    pub index: usize,
    pub seed: u64,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub n_instances: usize,
    pub n_passed: usize,
    /// Worst observed value per check (max residual or min slack, as named).
    pub worst: BTreeMap<String, f64>,
    /// Informational counters (e.g. equality-flag disagreements).
    pub notes: BTreeMap<String, u64>,
    pub counterexamples: Vec<Counterexample>,
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.n_passed == self.n_instances
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub n_instances: usize,
    pub n_passed: usize,
    pub suites: Vec<SuiteReport>,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn new(seed: u64, suites: Vec<SuiteReport>) -> Self {
        Self {
            tool: "qcoh".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            n_instances: suites.iter().map(|s| s.n_instances).sum(),
            n_passed: suites.iter().map(|s| s.n_passed).sum(),
            wall_time_s: suites.iter().map(|s| s.wall_time_s).sum(),
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Counterexample> {
        self.suites.iter().flat_map(|s| s.counterexamples.iter())
    }
}

/// Outcome of one instance: named measurements plus an optional failure.
struct InstanceResult {
    metrics: Vec<(&'static str, Extreme, f64)>,
    notes: Vec<&'static str>,
    failure: Option<Value>,
}

#[derive(Clone, Copy)]
enum Extreme {
    Max,
    Min,
}

fn aggregate(suite: Suite, cfg: &SuiteConfig, results: Vec<Result<InstanceResult>>, started: Instant) -> Result<SuiteReport> {
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut notes: BTreeMap<String, u64> = BTreeMap::new();
    let mut counterexamples = Vec::new();
    let n_instances = results.len();
    let mut n_passed = 0;
    for (index, r) in results.into_iter().enumerate() {
        let r = r?;
        for (name, ext, v) in r.metrics {
            let e = worst.entry(name.to_string()).or_insert(match ext {
                Extreme::Max => f64::NEG_INFINITY,
                Extreme::Min => f64::INFINITY,
            });
            *e = match ext {
                Extreme::Max => e.max(v),
                Extreme::Min => e.min(v),
            };
        }
        for n in r.notes {
            *notes.entry(n.to_string()).or_default() += 1;
        }
        match r.failure {
            None => n_passed += 1,
            Some(detail) => counterexamples.push(Counterexample { suite, index, seed: cfg.seed, detail }),
        }
    }
    Ok(SuiteReport {
        suite,
        seed: cfg.seed,
        n_instances,
        n_passed,
        worst,
        notes,
        counterexamples,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn random_basis(dim: usize, rng: &mut QRng) -> Result<ProjectiveBasis> {
    ProjectiveBasis::from_unitary(random_unitary(dim, rng)?, "haar")
}

fn random_small_ensemble(rng: &mut QRng) -> Result<Ensemble> {
    let dim = rng.random_range(2..=4);
    let n = rng.random_range(1..=5);
    random_ensemble(dim, n, rng)
}

fn theorem1_instance(seed: u64, i: usize) -> Result<InstanceResult> {
    let mut rng = stream_rng(seed, i as u64);
    let e = random_small_ensemble(&mut rng)?;
    let mut bases = vec![ProjectiveBasis::computational(e.dim())];
    for _ in 0..2 {
        bases.push(random_basis(e.dim(), &mut rng)?);
    }
    let chi = holevo_chi(&e)?;
    let mut worst: f64 = 0.0;
    let mut worst_basis = &bases[0];
    for b in &bases {
        let il = chi - dephased_mutual_info(&e, Some(b))?;
        let cl = coherence_loss(&e, Some(b))?;
        let r = (il - cl).abs();
        if r >= worst {
            worst = r;
            worst_basis = b;
        }
    }
    let failure = (worst > THEOREM1_TOL).then(|| {
        json!({
            "check": "il_equals_cl",
            "residual": worst,
            "basis": MatrixRepr::from(worst_basis.unitary()),
            "ensemble": Document::from_ensemble(&e),
        })
    });
    Ok(InstanceResult { metrics: vec![("max_abs_il_minus_cl", Extreme::Max, worst)], notes: vec![], failure })
}

fn lemma1_instance(seed: u64, i: usize) -> Result<InstanceResult> {
    let mut rng = stream_rng(seed, i as u64);
    let e = random_small_ensemble(&mut rng)?;
    let basis = random_basis(e.dim(), &mut rng)?;
    let closed = dephased_mutual_info(&e, Some(&basis))?;
    let joint = measured_mutual_info(&e, &basis.measurement())?;
    let gap = (closed - joint).abs();
    let mut metrics = vec![("max_consistency_gap", Extreme::Max, gap)];
    let mut failure = (gap > LEMMA1_CONSISTENCY_TOL).then(|| {
        json!({
            "check": "dephased_equals_measured",
            "gap": gap,
            "basis": MatrixRepr::from(basis.unitary()),
            "ensemble": Document::from_ensemble(&e),
        })
    });
    if i.is_multiple_of(5) {
        let n_ops = rng.random_range(1..=4);
        let si = random_strictly_incoherent(e.dim(), n_ops, &mut rng)?.conjugated(basis.unitary())?;
        let excess = measured_mutual_info(&e, &si)? - closed;
        metrics.push(("max_si_excess", Extreme::Max, excess));
        if excess > LEMMA1_SI_TOL && failure.is_none() {
            failure = Some(json!({
                "check": "strictly_incoherent_bound",
                "excess": excess,
                "basis": MatrixRepr::from(basis.unitary()),
                "instrument": Document::from_measurement(&si),
                "ensemble": Document::from_ensemble(&e),
            }));
        }
    }
    Ok(InstanceResult { metrics, notes: vec![], failure })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Lemma2Family {
    Random,
    Orthogonal,
    Overlapping,
}

/// Orthogonal pure A parts (columns of a Haar unitary), random B parts.
fn orthogonal_spec(rng: &mut QRng) -> Result<SeparableSpec> {
    let n = rng.random_range(2..=3);
    let da = rng.random_range(n..=3);
    let db = rng.random_range(2..=3);
    let u = random_unitary(da, rng)?;
    let probs = crate::random::random_simplex(n, rng);
    let a_parts = (0..n).map(|x| DensityMatrix::pure(&u.column(x))).collect::<Result<Vec<_>>>()?;
    let b_parts = (0..n)
        .map(|_| {
            let r = rng.random_range(1..=db);
            random_density(db, r, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    SeparableSpec::new(probs, a_parts, b_parts)
}

/// A parts sharing a common full-rank component; B parts pure, coherent
/// and pairwise distinct.
fn overlapping_spec(rng: &mut QRng) -> Result<SeparableSpec> {
    let n = rng.random_range(2..=4);
    let da = 2;
    let db = rng.random_range(2..=3);
    let common = random_density(da, da, rng)?;
    let a_parts = (0..n)
        .map(|_| {
            let own = random_density(da, da, rng)?;
            DensityMatrix::mixture(&[0.6, 0.4], &[common.clone(), own])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b_parts: Vec<DensityMatrix> = Vec::with_capacity(n);
    while b_parts.len() < n {
        let cand = random_pure(db, rng)?;
        if relative_entropy_coherence(&cand, None)? < MIN_B_COHERENCE {
            continue;
        }
        if b_parts.iter().any(|b| b.matrix().matmul(cand.matrix()).trace().re > MAX_B_OVERLAP) {
            continue;
        }
        b_parts.push(cand);
    }
    let probs = crate::random::random_simplex(n, rng);
    SeparableSpec::new(probs, a_parts, b_parts)
}

fn lemma2_instance(seed: u64, i: usize, family: Lemma2Family) -> Result<InstanceResult> {
    let mut rng = stream_rng(seed, i as u64);
    let (spec, basis) = match family {
        Lemma2Family::Random => {
            let da = rng.random_range(2..=3);
            let db = rng.random_range(2..=3);
            let n = rng.random_range(1..=4);
            let spec = random_separable((da, db), n, &mut rng)?;
            let basis = if i.is_multiple_of(2) { None } else { Some(random_basis(db, &mut rng)?) };
            (spec, basis)
        }
        Lemma2Family::Orthogonal => (orthogonal_spec(&mut rng)?, None),
        Lemma2Family::Overlapping => (overlapping_spec(&mut rng)?, None),
    };
    let r = check_lemma2(&spec, basis.as_ref())?;
    let (metric, ext, ok) = match family {
        Lemma2Family::Random => ("min_slack_random", Extreme::Min, r.holds()),
        Lemma2Family::Orthogonal => ("max_slack_orthogonal", Extreme::Max, r.holds() && r.slack <= discord::EQUALITY_SLACK),
        Lemma2Family::Overlapping => ("min_slack_overlapping", Extreme::Min, r.slack >= LEMMA2_STRICT_SLACK),
    };
    let notes = if r.flags_agree { vec![] } else { vec!["equality_flag_disagreements"] };
    let failure = (!ok).then(|| {
        json!({
            "family": format!("{family:?}").to_lowercase(),
            "record": r,
            "spec": Document::from_separable(&spec),
        })
    });
    Ok(InstanceResult { metrics: vec![(metric, ext, r.slack)], notes, failure })
}

fn eq5to8_instance(cfg: &SuiteConfig, i: usize) -> Result<InstanceResult> {
    let mut rng = stream_rng(cfg.seed, i as u64);
    let n = rng.random_range(1..=4);
    let spec = random_separable(cfg.dims, n, &mut rng)?;
    let reference = if i.is_multiple_of(2) { None } else { Some(random_basis(cfg.dims.1, &mut rng)?) };
    let opts = OptimizerOptions { seed: cfg.seed.wrapping_add(i as u64), ..cfg.opts };
    let rec = check_complementarity(&spec, &opts, reference.as_ref())?;
    let names = ["min_slack_eq5", "min_slack_eq6", "min_slack_eq7", "min_slack_eq8"];
    let metrics = names.iter().zip(&rec.records).map(|(n, r)| (*n, Extreme::Min, r.slack)).collect();
    let mut notes = vec![];
    if rec.lower_confidence {
        notes.push("lower_confidence");
    }
    if rec.delta_max > rec.il_b_min + discord::SLACK_TOL {
        notes.push("eq7_alternative_reading_exceeds_bound");
    }
    let failure = (!rec.holds()).then(|| json!({ "record": rec, "spec": Document::from_separable(&spec) }));
    Ok(InstanceResult { metrics, notes, failure })
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.n_instances == 0 {
        return Err(Error::Validation("suite needs at least one instance".into()));
    }
    let started = Instant::now();
    let n = cfg.n_instances;
    let results: Vec<Result<InstanceResult>> = match suite {
        Suite::Theorem1 => (0..n).into_par_iter().map(|i| theorem1_instance(cfg.seed, i)).collect(),
        Suite::Lemma1 => (0..n).into_par_iter().map(|i| lemma1_instance(cfg.seed, i)).collect(),
        Suite::Lemma2 => {
            let extra = (n / 5).max(1);
            let plan: Vec<Lemma2Family> = std::iter::repeat_n(Lemma2Family::Random, n)
                .chain(std::iter::repeat_n(Lemma2Family::Orthogonal, extra))
                .chain(std::iter::repeat_n(Lemma2Family::Overlapping, extra))
                .collect();
            plan.par_iter().enumerate().map(|(i, fam)| lemma2_instance(cfg.seed, i, *fam)).collect()
        }
        Suite::Eq5to8 => {
            if cfg.dims.1 > discord::MAX_OPTIMIZED_DIM_B {
                return Err(Error::Validation(format!(
                    "eq5to8 needs d_B <= {}, got {}",
                    discord::MAX_OPTIMIZED_DIM_B,
                    cfg.dims.1
                )));
            }
            (0..n).into_par_iter().map(|i| eq5to8_instance(cfg, i)).collect()
        }
    };
    aggregate(suite, cfg, results, started)
}

pub fn run_all(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let suites = Suite::ALL.iter().map(|&s| run_suite(s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new(cfg.seed, suites))
}

/// Writes each counterexample to `<dir>/<suite>-<seed>-<index>.json`.
pub fn write_counterexamples(report: &VerificationReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut written = Vec::new();
    for cx in report.counterexamples() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
        let path = dir.join(format!("{}-{}-{}.json", cx.suite, cx.seed, cx.index));
        let text = serde_json::to_string_pretty(cx).expect("counterexamples serialize");
        std::fs::write(&path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        written.push(path);
    }
    Ok(written)
}
