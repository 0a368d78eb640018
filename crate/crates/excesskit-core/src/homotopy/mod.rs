//! Numerical path tracking between square homogeneous systems.
//!
//! Two pipelines are built on one segment tracker. The first lifts a general
//! system over the monomialized ideal to a system over the original ideal;
//! parameter continuation makes its endpoints a superset of the isolated
//! target solutions, so counting endpoints off the variety is exact. The
//! second keeps the coefficient forms fixed and blends the generator column
//! with a unit complex factor; iterating over factors grows a certified lower
//! bound.
//!
//! Determinism contract: for a fixed seed every random draw happens in a
//! fixed construction order, paths carry no randomness of their own, and
//! parallel results merge in start-point order, so identical inputs produce
//! identical reports regardless of worker count.

mod linalg;
mod solve;
mod track;

pub use solve::{
    run_hit_iterations, run_hup, solve_monomial_bsystem, total_degree_solve, SolveBatch,
};
pub use track::{newton_refine, track_path, PathStats, PathStatus, RefineOutcome, TrackOutcome};

use crate::algebra::{
    jacobian, random_form_with, AlgebraError, IdealSpec, PolynomialSystem, SparsePolynomial,
};
use crate::polytope::PolytopeError;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("degree condition violated: min(d) = {min_d} < max(p) = {max_p}")]
    DegreeCondition { min_d: u32, max_p: u32 },
    #[error("system degrees must match the variable count: got {degrees} degrees for projective dimension {n}")]
    DegreeCount { degrees: usize, n: usize },
    #[error("start solving found {found} points but the mixed volume predicts {expected}; the run looks non-generic, re-seed")]
    NonGenericStart { expected: u64, found: u64 },
    #[error("inconclusive run: {failed} of {tracked} paths could not be classified")]
    Inconclusive { failed: usize, tracked: usize },
    #[error("monomial list mismatch: {0}")]
    MonomialMismatch(String),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Knobs for the predictor-corrector tracker.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Residual tolerance for the corrector and the final polish.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub max_steps: usize,
    /// Newton polish at t = 0 after the path lands.
    pub t_end_refine: bool,
    /// In-chart norm beyond which a path counts as diverged.
    pub divergence_threshold: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-7,
            max_step: 0.1,
            newton_tol: 1e-9,
            max_newton_iters: 4,
            max_steps: 10_000,
            t_end_refine: true,
            divergence_threshold: 1e8,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0)
        {
            return Err(EngineError::BadConfig(
                "need 0 < min_step <= initial_step <= max_step < 1".into(),
            ));
        }
        if self.newton_tol <= 0.0 {
            return Err(EngineError::BadConfig("newton_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Run-level options shared by the solve pipelines.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub tracker: TrackerConfig,
    pub membership_tol: f64,
    pub dedupe_tol: f64,
    /// Draw the target-side coefficient forms real, so the target system is
    /// real and its solution set is closed under conjugation.
    pub real_coefficients: bool,
    /// Fraction of unclassifiable paths above which a run is inconclusive.
    pub max_failure_fraction: f64,
    /// Record per-path accepted steps.
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            tracker: TrackerConfig::default(),
            membership_tol: 1e-6,
            dedupe_tol: 1e-6,
            real_coefficients: false,
            max_failure_fraction: 0.25,
            trace: false,
        }
    }
}

/// A generic chart `c . x = 1` in which projective paths are tracked.
#[derive(Debug, Clone)]
pub struct AffinePatch {
    coeffs: Vec<Complex64>,
}

impl AffinePatch {
    pub fn random<R: Rng>(n_plus_one: usize, rng: &mut R, real: bool) -> Self {
        let coeffs = (0..n_plus_one)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                if real {
                    Complex64::new(re, 0.0)
                } else {
                    Complex64::new(re, im)
                }
            })
            .collect();
        Self { coeffs }
    }

    /// The chart `x_index = 1`; used to polish at the reporting scale.
    pub fn coordinate(index: usize, n_plus_one: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_plus_one];
        coeffs[index] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn dot(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Rescale a projective representative onto the chart.
    pub fn project(&self, x: &[Complex64]) -> Result<Vec<Complex64>, EngineError> {
        let s = self.dot(x);
        if s.norm() < 1e-300 {
            return Err(EngineError::ZeroVector);
        }
        Ok(x.iter().map(|v| v / s).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomotopyKind {
    Hup,
    Hit,
    TotalDegree,
}

/// A segment family `H(x,t) = t g_s S(x) + (1-t) g_t T(x)` between two square
/// homogeneous systems of equal degrees; `t` runs from 1 (start) to 0.
#[derive(Debug, Clone)]
pub struct HomotopySystem {
    pub kind: HomotopyKind,
    start: PolynomialSystem,
    target: PolynomialSystem,
    start_jac: Vec<Vec<SparsePolynomial>>,
    target_jac: Vec<Vec<SparsePolynomial>>,
    gamma_start: Complex64,
    gamma_target: Complex64,
    degrees: Vec<u32>,
    pub seed: u64,
}

impl HomotopySystem {
    pub fn new(
        kind: HomotopyKind,
        start: PolynomialSystem,
        target: PolynomialSystem,
        gamma_start: Complex64,
        gamma_target: Complex64,
        seed: u64,
    ) -> Result<Self, EngineError> {
        let degrees: Vec<u32> = start.degrees().iter().map(|&d| d as u32).collect();
        let target_degrees: Vec<u32> = target.degrees().iter().map(|&d| d as u32).collect();
        if degrees != target_degrees {
            return Err(EngineError::MonomialMismatch(format!(
                "start degrees {degrees:?} differ from target degrees {target_degrees:?}"
            )));
        }
        let start_jac = jacobian(&start);
        let target_jac = jacobian(&target);
        Ok(Self {
            kind,
            start,
            target,
            start_jac,
            target_jac,
            gamma_start,
            gamma_target,
            degrees,
            seed,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.start.len(), self.start.vars().n_plus_one())
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn start_system(&self) -> &PolynomialSystem {
        &self.start
    }

    pub fn target_system(&self) -> &PolynomialSystem {
        &self.target
    }

    pub fn eval(&self, x: &[Complex64], t: f64) -> Result<Vec<Complex64>, AlgebraError> {
        let s = self.start.evaluate(x)?;
        let tv = self.target.evaluate(x)?;
        Ok(s.iter()
            .zip(&tv)
            .map(|(a, b)| a * self.gamma_start * t + b * self.gamma_target * (1.0 - t))
            .collect())
    }

    pub fn eval_dt(&self, x: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
        let s = self.start.evaluate(x)?;
        let tv = self.target.evaluate(x)?;
        Ok(s.iter()
            .zip(&tv)
            .map(|(a, b)| a * self.gamma_start - b * self.gamma_target)
            .collect())
    }

    /// Jacobian in x of H(., t), an n x (n+1) matrix.
    #[allow(clippy::needless_range_loop)]
    pub fn eval_dx(&self, x: &[Complex64], t: f64) -> Result<Vec<Vec<Complex64>>, AlgebraError> {
        let (n, width) = self.dims();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); width]; n];
        for i in 0..n {
            for j in 0..width {
                let a = self.start_jac[i][j].evaluate(x)?;
                let b = self.target_jac[i][j].evaluate(x)?;
                out[i][j] = a * self.gamma_start * t + b * self.gamma_target * (1.0 - t);
            }
        }
        Ok(out)
    }

    /// The blended system at a fixed t, expanded to explicit polynomials.
    pub fn blend_at(&self, t: f64) -> PolynomialSystem {
        let polys: Vec<SparsePolynomial> = self
            .start
            .polys()
            .iter()
            .zip(self.target.polys())
            .map(|(s, tp)| {
                s.scale(self.gamma_start * t)
                    .add(&tp.scale(self.gamma_target * (1.0 - t)))
                    .expect("widths match")
            })
            .collect();
        PolynomialSystem::new(polys, self.start.vars().clone()).expect("widths match")
    }
}

/// Rescale to coefficient 1-norm one so absolute residual tolerances are
/// meaningful; the zero set is unchanged.
fn unit_scale(p: SparsePolynomial) -> SparsePolynomial {
    let s = p.coeff_one_norm();
    if s > 0.0 {
        p.scale(Complex64::new(1.0 / s, 0.0))
    } else {
        p
    }
}

fn degree_condition(ideal: &IdealSpec, degrees: &[u32]) -> Result<(), EngineError> {
    let n = ideal.vars().n();
    if degrees.len() != n {
        return Err(EngineError::DegreeCount {
            degrees: degrees.len(),
            n,
        });
    }
    let max_p = ideal.degrees().into_iter().max().unwrap_or(0);
    let min_d = *degrees.iter().min().unwrap();
    if min_d < max_p {
        return Err(EngineError::DegreeCondition { min_d, max_p });
    }
    Ok(())
}

/// Builds the parameter homotopy from a general system over the monomialized
/// ideal (independent coefficient forms per scaled-monomial term at t = 1) to
/// a system over the original ideal (one coefficient form per generator at
/// t = 0, so the generators reassemble).
///
/// `real_target` draws the target-side coefficient forms real: the target is
/// then a real system (for real generators) whose solution set is closed
/// under conjugation. The start side stays complex either way, which keeps
/// the path family away from the real discriminant.
pub fn build_hup(
    ideal: &IdealSpec,
    degrees: &[u32],
    seed: u64,
    real_target: bool,
) -> Result<HomotopySystem, EngineError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    build_hup_with_rng(ideal, degrees, &mut rng, seed, real_target)
}

pub(crate) fn build_hup_with_rng<R: Rng>(
    ideal: &IdealSpec,
    degrees: &[u32],
    rng: &mut R,
    seed: u64,
    real_target: bool,
) -> Result<HomotopySystem, EngineError> {
    degree_condition(ideal, degrees)?;
    let vars = ideal.vars().clone();
    let width = vars.n_plus_one();
    let monomials = ideal.monomialize();
    let gen_degrees = ideal.degrees();
    let mono_degrees = monomials.degrees();

    let mut start_polys = Vec::with_capacity(degrees.len());
    for &d_i in degrees {
        let mut f = SparsePolynomial::zero(width);
        for (carrier, &p_m) in monomials.generators().iter().zip(&mono_degrees) {
            let alpha = random_form_with(d_i - p_m, &vars, rng, false);
            f = f.add(&alpha.mul(carrier)?)?;
        }
        start_polys.push(unit_scale(f));
    }
    let mut target_polys = Vec::with_capacity(degrees.len());
    for &d_i in degrees {
        let mut f = SparsePolynomial::zero(width);
        for (generator, &p_j) in ideal.generators().iter().zip(&gen_degrees) {
            let beta = random_form_with(d_i - p_j, &vars, rng, real_target);
            f = f.add(&beta.mul(generator)?)?;
        }
        target_polys.push(unit_scale(f));
    }
    HomotopySystem::new(
        HomotopyKind::Hup,
        PolynomialSystem::new_square(start_polys, vars.clone())?,
        PolynomialSystem::new_square(target_polys, vars)?,
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        seed,
    )
}

/// Builds the fixed-coefficient homotopy `[a_ij](t A + gamma (1-t) B)` between
/// the monomial column A and the generator column B.
pub fn build_hit(
    ideal: &IdealSpec,
    monomials: &IdealSpec,
    degrees: &[u32],
    gamma: Complex64,
    seed: u64,
    real: bool,
) -> Result<HomotopySystem, EngineError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let coeffs = hit_coefficients(ideal, monomials, degrees, &mut rng, real)?;
    build_hit_with_coeffs(ideal, monomials, &coeffs, gamma, seed)
}

/// The shared coefficient forms a_ij; drawn once and reused across factors.
pub fn hit_coefficients<R: Rng>(
    ideal: &IdealSpec,
    monomials: &IdealSpec,
    degrees: &[u32],
    rng: &mut R,
    real: bool,
) -> Result<Vec<Vec<SparsePolynomial>>, EngineError> {
    degree_condition(ideal, degrees)?;
    if monomials.generators().len() != ideal.generators().len() {
        return Err(EngineError::MonomialMismatch(format!(
            "{} monomials for {} generators",
            monomials.generators().len(),
            ideal.generators().len()
        )));
    }
    for (i, (a, b)) in monomials
        .generators()
        .iter()
        .zip(ideal.generators())
        .enumerate()
    {
        if a.num_terms() != 1 {
            return Err(EngineError::MonomialMismatch(format!(
                "entry {i} of the monomial list is not a monomial"
            )));
        }
        if a.degree() != b.degree() {
            return Err(EngineError::MonomialMismatch(format!(
                "entry {i}: monomial degree {} differs from generator degree {}",
                a.degree(),
                b.degree()
            )));
        }
    }
    let vars = ideal.vars();
    let gen_degrees = ideal.degrees();
    let mut coeffs = Vec::with_capacity(degrees.len());
    for &d_i in degrees {
        let row: Vec<SparsePolynomial> = gen_degrees
            .iter()
            .map(|&p_j| random_form_with(d_i - p_j, vars, rng, real))
            .collect();
        coeffs.push(row);
    }
    Ok(coeffs)
}

pub fn build_hit_with_coeffs(
    ideal: &IdealSpec,
    monomials: &IdealSpec,
    coeffs: &[Vec<SparsePolynomial>],
    gamma: Complex64,
    seed: u64,
) -> Result<HomotopySystem, EngineError> {
    let vars = ideal.vars().clone();
    let width = vars.n_plus_one();
    let mut start_polys = Vec::with_capacity(coeffs.len());
    let mut target_polys = Vec::with_capacity(coeffs.len());
    for row in coeffs {
        let mut fs = SparsePolynomial::zero(width);
        let mut ft = SparsePolynomial::zero(width);
        for ((a, mono), generator) in row
            .iter()
            .zip(monomials.generators())
            .zip(ideal.generators())
        {
            fs = fs.add(&a.mul(mono)?)?;
            ft = ft.add(&a.mul(generator)?)?;
        }
        // One common factor per component: rescaling start and target
        // separately would skew the blended family itself.
        let scale = ft.coeff_one_norm().max(fs.coeff_one_norm());
        if scale > 0.0 {
            let s = Complex64::new(1.0 / scale, 0.0);
            fs = fs.scale(s);
            ft = ft.scale(s);
        }
        start_polys.push(fs);
        target_polys.push(ft);
    }
    HomotopySystem::new(
        HomotopyKind::Hit,
        PolynomialSystem::new_square(start_polys, vars.clone())?,
        PolynomialSystem::new_square(target_polys, vars)?,
        Complex64::new(1.0, 0.0),
        gamma,
        seed,
    )
}

/// Scale a projective representative so its largest-modulus coordinate is 1.
pub fn normalize_point(x: &[Complex64]) -> Result<Vec<Complex64>, EngineError> {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, v) in x.iter().enumerate() {
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    if best_norm < 1e-300 {
        return Err(EngineError::ZeroVector);
    }
    let pivot = x[best];
    Ok(x.iter().map(|v| v / pivot).collect())
}

/// Max-norm distance between two max-normalized projective representatives,
/// aligning each to the other's pivot coordinate so near-tied pivots cannot
/// split one projective point into two.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dist_using = |pivot_of: &[Complex64], other: &[Complex64]| -> f64 {
        let mut best = 0usize;
        let mut best_norm = 0.0f64;
        for (i, v) in pivot_of.iter().enumerate() {
            let n = v.norm();
            if n > best_norm {
                best_norm = n;
                best = i;
            }
        }
        if other[best].norm() < 1e-150 {
            return f64::INFINITY;
        }
        let scale_a = pivot_of[best];
        let scale_b = other[best];
        pivot_of
            .iter()
            .zip(other)
            .map(|(x, y)| (x / scale_a - y / scale_b).norm())
            .fold(0.0, f64::max)
    };
    dist_using(a, b).min(dist_using(b, a))
}

/// True when every generator residual, scaled by the generator's coefficient
/// 1-norm, is below the tolerance at the (normalized) point.
pub fn membership_test(
    point: &[Complex64],
    ideal: &IdealSpec,
    tol: f64,
) -> Result<bool, EngineError> {
    if point.iter().all(|v| v.norm() < 1e-300) {
        return Err(EngineError::ZeroVector);
    }
    for g in ideal.generators() {
        let value = g.evaluate(point)?;
        let scale = g.coeff_one_norm();
        if value.norm() / scale >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One solution with its residual and, when tested, a membership verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPoint {
    pub point: Vec<Complex64>,
    pub residual: f64,
    pub on_variety: Option<bool>,
}

/// Deduplicated normalized projective points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionSet {
    pub points: Vec<SolutionPoint>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Greedy clustering under the projective max-norm distance; the
/// representative of each cluster is its smallest-residual member.
pub fn dedupe(points: &[SolutionPoint], tol: f64) -> SolutionSet {
    let mut out: Vec<SolutionPoint> = Vec::new();
    for p in points {
        match out
            .iter_mut()
            .find(|q| projective_distance(&p.point, &q.point) < tol)
        {
            Some(existing) => {
                if p.residual < existing.residual {
                    *existing = p.clone();
                }
            }
            None => out.push(p.clone()),
        }
    }
    SolutionSet { points: out }
}

/// Unit-modulus factor at a uniform angle, rejecting draws within 0.05
/// radians of previous ones so iterations stay distinct.
pub(crate) fn fresh_gamma<R: Rng>(rng: &mut R, previous: &[Complex64]) -> Complex64 {
    loop {
        let theta: f64 = rng.random::<f64>() * TAU;
        let candidate = Complex64::new(theta.cos(), theta.sin());
        let too_close = previous.iter().any(|g| {
            let delta = (candidate * g.conj()).arg().abs();
            delta < 0.05
        });
        if !too_close {
            return candidate;
        }
    }
}

/// True when every coefficient of every component is real.
pub(crate) fn system_is_real(sys: &PolynomialSystem) -> bool {
    sys.polys()
        .iter()
        .all(|p| p.terms().all(|(_, c)| c.im == 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
}

/// Per-run accounting; every start point lands in exactly one status bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathAccounting {
    pub converged: usize,
    pub diverged: usize,
    pub singular: usize,
    pub step_limit: usize,
}

impl PathAccounting {
    pub fn total(&self) -> usize {
        self.converged + self.diverged + self.singular + self.step_limit
    }
}

/// Aggregated cost counters over a batch of paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BatchStats {
    pub steps: usize,
    pub rejections: usize,
}

/// The record of one iteration of the lower-bound pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct HitIteration {
    pub gamma: Complex64,
    pub new_points: usize,
    pub cumulative: usize,
    pub accounting: PathAccounting,
}

/// Full report of a homotopy run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessRunReport {
    pub kind: HomotopyKind,
    pub degrees: Vec<u32>,
    pub start_count: usize,
    pub tracked_count: usize,
    pub converged_count: usize,
    pub on_variety_count: usize,
    pub excess_count: usize,
    /// Deduplicated converged endpoint count before the membership split.
    pub upper_bound: Option<usize>,
    pub bound_kind: BoundKind,
    pub solutions: SolutionSet,
    pub accounting: PathAccounting,
    pub stats: BatchStats,
    pub seed: u64,
    pub gamma_history: Vec<Complex64>,
    pub iterations: Vec<HitIteration>,
    /// Accepted tracker steps per path, present when tracing is on:
    /// (path index, t, step, residual).
    pub trace: Vec<(usize, f64, f64, f64)>,
}

impl ExcessRunReport {
    /// The structural invariants every report must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        if self.accounting.total() != self.tracked_count {
            return Err(format!(
                "path accounting {} does not cover tracked count {}",
                self.accounting.total(),
                self.tracked_count
            ));
        }
        if self.kind != HomotopyKind::Hit {
            if self.excess_count + self.on_variety_count > self.converged_count {
                return Err("classified endpoints exceed converged paths".into());
            }
            if self.converged_count > self.tracked_count {
                return Err("more conversions than tracked paths".into());
            }
        }
        Ok(())
    }
}
