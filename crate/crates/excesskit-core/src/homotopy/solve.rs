//! Run-level pipelines: the total-degree baseline solver, start-system
//! solving for monomial ideals, and the two excess-count runs.

use super::track::{track_path, PathStatus, TrackOutcome};
use super::{
    build_hit_with_coeffs, build_hup_with_rng, dedupe, fresh_gamma, hit_coefficients,
    membership_test, newton_refine, AffinePatch, BatchStats, BoundKind, EngineConfig, EngineError,
    ExcessRunReport, HitIteration, HomotopyKind, HomotopySystem, PathAccounting, SolutionPoint,
    SolutionSet,
};
use crate::algebra::{IdealSpec, PolynomialSystem, SparsePolynomial};
use crate::formula::DegreeVector;
use crate::polytope::excess_by_mixed_volume;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

const MAX_TOTAL_DEGREE_PATHS: u64 = 200_000;

/// Everything a batched solve produces: deduplicated converged endpoints plus
/// per-path outcomes in start order.
#[derive(Debug, Clone)]
pub struct SolveBatch {
    pub solutions: SolutionSet,
    pub accounting: PathAccounting,
    pub stats: BatchStats,
    pub outcomes: Vec<TrackOutcome>,
}

fn track_batch(
    h: &HomotopySystem,
    starts: &[Vec<Complex64>],
    patch: &AffinePatch,
    cfg: &EngineConfig,
) -> Result<(Vec<TrackOutcome>, PathAccounting, BatchStats), EngineError> {
    // Paths are independent; the ordered collect keeps reports deterministic
    // under any worker count.
    let outcomes: Result<Vec<TrackOutcome>, EngineError> = starts
        .par_iter()
        .map(|s| track_path(h, s, patch, &cfg.tracker, cfg.trace))
        .collect();
    let outcomes = outcomes?;
    let mut accounting = PathAccounting::default();
    let mut stats = BatchStats::default();
    for o in &outcomes {
        match o.status {
            PathStatus::Converged => accounting.converged += 1,
            PathStatus::Diverged => accounting.diverged += 1,
            PathStatus::Singular => accounting.singular += 1,
            PathStatus::StepLimit => accounting.step_limit += 1,
        }
        stats.steps += o.stats.steps;
        stats.rejections += o.stats.rejections;
    }
    Ok((outcomes, accounting, stats))
}

fn converged_points(outcomes: &[TrackOutcome]) -> Vec<SolutionPoint> {
    outcomes
        .iter()
        .filter_map(|o| {
            o.endpoint.as_ref().map(|p| SolutionPoint {
                point: p.clone(),
                residual: o.stats.final_residual,
                on_variety: None,
            })
        })
        .collect()
}

/// A non-converged path counts as a real failure only when it also stopped
/// far from the given variety; paths absorbed by positive-dimensional or
/// multiple solution sets stall there legitimately.
fn unresolved_failures(
    outcomes: &[TrackOutcome],
    ideal: &IdealSpec,
    cfg: &EngineConfig,
) -> Result<usize, EngineError> {
    let resolve_tol = cfg.membership_tol.sqrt().max(cfg.membership_tol);
    let mut failed = 0;
    for o in outcomes {
        if o.status == PathStatus::Converged {
            continue;
        }
        if o.status == PathStatus::Diverged {
            failed += 1;
            continue;
        }
        if !membership_test(&o.last_point, ideal, resolve_tol)? {
            failed += 1;
        }
    }
    Ok(failed)
}

/// The classical start system `x_i^{d_i} - x_0^{d_i}` with its root-of-unity
/// projective solutions.
fn total_degree_start(
    vars: &crate::algebra::VariableSet,
    degrees: &[u32],
) -> Result<(PolynomialSystem, Vec<Vec<Complex64>>), EngineError> {
    let width = vars.n_plus_one();
    let n = vars.n();
    let mut polys = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        let mut exps_i = vec![0u32; width];
        exps_i[i + 1] = d;
        let mut exps_0 = vec![0u32; width];
        exps_0[0] = d;
        let p = SparsePolynomial::monomial(width, exps_i, Complex64::new(1.0, 0.0))?.add(
            &SparsePolynomial::monomial(width, exps_0, Complex64::new(-1.0, 0.0))?,
        )?;
        polys.push(p);
    }
    let system = PolynomialSystem::new_square(polys, vars.clone())?;

    let total: u64 = degrees.iter().map(|&d| d as u64).product();
    if total > MAX_TOTAL_DEGREE_PATHS {
        return Err(EngineError::BadConfig(format!(
            "total-degree start would track {total} paths"
        )));
    }
    let mut starts = Vec::with_capacity(total as usize);
    let mut digits = vec![0u32; n];
    for _ in 0..total {
        let mut point = vec![Complex64::new(1.0, 0.0); width];
        for (i, &d) in degrees.iter().enumerate() {
            let angle = TAU * digits[i] as f64 / d as f64;
            point[i + 1] = Complex64::new(angle.cos(), angle.sin());
        }
        starts.push(point);
        for (i, &d) in degrees.iter().enumerate() {
            digits[i] += 1;
            if digits[i] < d {
                break;
            }
            digits[i] = 0;
        }
    }
    Ok((system, starts))
}

/// Solve a square homogeneous system by a total-degree segment homotopy with
/// a random unit blend factor; returns converged, deduplicated endpoints.
pub fn total_degree_solve(
    sys: &PolynomialSystem,
    patch: &AffinePatch,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<SolveBatch, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = fresh_gamma(&mut rng, &[]);
    total_degree_solve_with(sys, patch, cfg, gamma, seed)
}

fn total_degree_solve_with(
    sys: &PolynomialSystem,
    patch: &AffinePatch,
    cfg: &EngineConfig,
    gamma: Complex64,
    seed: u64,
) -> Result<SolveBatch, EngineError> {
    cfg.tracker.validate()?;
    let degrees: Vec<u32> = sys.degrees().iter().map(|&d| d as u32).collect();
    if degrees.contains(&0) {
        return Err(EngineError::BadConfig(
            "total-degree solve needs positive degrees".into(),
        ));
    }
    let (start_sys, starts) = total_degree_start(sys.vars(), &degrees)?;
    let h = HomotopySystem::new(
        HomotopyKind::TotalDegree,
        start_sys,
        sys.clone(),
        gamma,
        Complex64::new(1.0, 0.0),
        seed,
    )?;
    let (outcomes, accounting, stats) = track_batch(&h, &starts, patch, cfg)?;
    let solutions = dedupe(&converged_points(&outcomes), cfg.dedupe_tol);
    Ok(SolveBatch {
        solutions,
        accounting,
        stats,
        outcomes,
    })
}

/// Solve the start stage for a monomial ideal: run the total-degree homotopy
/// into `start_sys` (a generic system over the monomial ideal), then keep the
/// endpoints off the ideal's variety. The count must match the mixed-volume
/// prediction or the run is flagged non-generic.
fn solve_bprime_start(
    start_sys: &PolynomialSystem,
    mono_ideal: &IdealSpec,
    expected: u64,
    patch: &AffinePatch,
    gamma: Complex64,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<(SolutionSet, SolveBatch), EngineError> {
    let batch = total_degree_solve_with(start_sys, patch, cfg, gamma, seed)?;
    let failed = unresolved_failures(&batch.outcomes, mono_ideal, cfg)?;
    let tracked = batch.outcomes.len();
    if tracked > 0 && (failed as f64) / (tracked as f64) > cfg.max_failure_fraction {
        return Err(EngineError::Inconclusive { failed, tracked });
    }
    let mut off_variety = Vec::new();
    for p in &batch.solutions.points {
        if !membership_test(&p.point, mono_ideal, cfg.membership_tol)? {
            off_variety.push(SolutionPoint {
                on_variety: Some(false),
                ..p.clone()
            });
        }
    }
    if off_variety.len() as u64 != expected {
        return Err(EngineError::NonGenericStart {
            expected,
            found: off_variety.len() as u64,
        });
    }
    Ok((
        SolutionSet {
            points: off_variety,
        },
        batch,
    ))
}

/// Start solving with a few fresh blend factors: a lost path or an endpoint
/// collision is a bad-blend artifact, so redraw rather than fail the run.
fn solve_start_with_retries<R: rand::Rng>(
    start_sys: &PolynomialSystem,
    mono_ideal: &IdealSpec,
    expected: u64,
    patch: &AffinePatch,
    rng: &mut R,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<(SolutionSet, SolveBatch), EngineError> {
    const ATTEMPTS: usize = 3;
    let mut last_err = None;
    for _ in 0..ATTEMPTS {
        let gamma = fresh_gamma(rng, &[]);
        match solve_bprime_start(start_sys, mono_ideal, expected, patch, gamma, cfg, seed) {
            Ok(found) => return Ok(found),
            Err(e @ (EngineError::NonGenericStart { .. } | EngineError::Inconclusive { .. })) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Isolated solutions of a generic system over a monomial ideal, off the
/// ideal's variety; the cardinality equals the mixed volume of the system's
/// Newton polytopes.
pub fn solve_monomial_bsystem(
    ideal: &IdealSpec,
    d: &DegreeVector,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<SolutionSet, EngineError> {
    let degrees = d.degrees();
    let expected = excess_by_mixed_volume(ideal, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Build a generic system over the monomial ideal directly; the hup
    // construction with a monomial input has exactly this start structure.
    let h = build_hup_with_rng(ideal, degrees, &mut rng, seed, cfg.real_coefficients)?;
    let patch = AffinePatch::random(ideal.vars().n_plus_one(), &mut rng, false);
    let gamma = fresh_gamma(&mut rng, &[]);
    let (solutions, _) =
        solve_bprime_start(h.start_system(), ideal, expected, &patch, gamma, cfg, seed)?;
    Ok(solutions)
}

fn collect_trace(outcomes: &[TrackOutcome]) -> Vec<(usize, f64, f64, f64)> {
    let mut out = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        for &(t, step, residual) in &o.trace {
            out.push((i, t, step, residual));
        }
    }
    out
}

/// Upper-bound pipeline made exact by the membership split.
///
/// Solves a generic system over the monomialized ideal, tracks its solutions
/// through the parameter homotopy to a generic system over the original
/// ideal, and splits the converged endpoints by generator residual. Endpoint
/// continuation guarantees the isolated target solutions all appear, so the
/// off-variety count is the excess count itself.
pub fn run_hup(
    ideal: &IdealSpec,
    d: &DegreeVector,
    cfg: &EngineConfig,
    seed: u64,
) -> Result<ExcessRunReport, EngineError> {
    cfg.tracker.validate()?;
    let degrees = d.degrees();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = build_hup_with_rng(ideal, degrees, &mut rng, seed, cfg.real_coefficients)?;
    let patch = AffinePatch::random(ideal.vars().n_plus_one(), &mut rng, false);

    let monomialized = ideal.monomialize();
    let expected = excess_by_mixed_volume(&monomialized, d)?;
    let (starts, _td_batch) = solve_start_with_retries(
        h.start_system(),
        &monomialized,
        expected,
        &patch,
        &mut rng,
        cfg,
        seed,
    )?;

    let start_points: Vec<Vec<Complex64>> = starts.points.iter().map(|p| p.point.clone()).collect();
    let (outcomes, accounting, stats) = track_batch(&h, &start_points, &patch, cfg)?;

    let failed = unresolved_failures(&outcomes, ideal, cfg)?;
    if !outcomes.is_empty() && (failed as f64) / (outcomes.len() as f64) > cfg.max_failure_fraction
    {
        return Err(EngineError::Inconclusive {
            failed,
            tracked: outcomes.len(),
        });
    }

    let endpoints = dedupe(&converged_points(&outcomes), cfg.dedupe_tol);
    let upper_bound = endpoints.len();
    let mut classified = Vec::with_capacity(endpoints.len());
    let mut excess_count = 0;
    let mut on_variety_count = 0;
    for p in endpoints.points {
        let on = membership_test(&p.point, ideal, cfg.membership_tol)?;
        if on {
            on_variety_count += 1;
        } else {
            excess_count += 1;
        }
        classified.push(SolutionPoint {
            on_variety: Some(on),
            ..p
        });
    }

    let report = ExcessRunReport {
        kind: HomotopyKind::Hup,
        degrees: degrees.to_vec(),
        start_count: start_points.len(),
        tracked_count: start_points.len(),
        converged_count: accounting.converged,
        on_variety_count,
        excess_count,
        upper_bound: Some(upper_bound),
        bound_kind: BoundKind::Exact,
        solutions: SolutionSet { points: classified },
        accounting,
        stats,
        seed,
        gamma_history: Vec::new(),
        iterations: Vec::new(),
        trace: collect_trace(&outcomes),
    };
    debug_assert!(report.validate().is_ok(), "{:?}", report.validate());
    Ok(report)
}

/// Lower-bound pipeline: fixed coefficient forms, fresh unit blend factor per
/// iteration. Endpoint continuation does not apply here, so endpoints may
/// miss isolated targets; the union over iterations is monotone and every
/// kept point re-verifies on the fixed target system off the variety.
///
/// Later rounds re-randomize everything except the target: the blend factor
/// is redrawn, the degenerate column is remixed within equal-degree blocks
/// (the generated ideal and the start count are unchanged), paths are routed
/// through a random interior member of the blend family, and the found set
/// rides triangle loops through the family, which is what reaches branches
/// the straight segment keeps separated. The coefficient forms are drawn
/// real, so when the generators are real the target is a real system and the
/// conjugate of every verified solution is itself a solution; conjugates go
/// through the same verification gate.
pub fn run_hit_iterations(
    ideal: &IdealSpec,
    monomials: &IdealSpec,
    d: &DegreeVector,
    cfg: &EngineConfig,
    seed: u64,
    max_iters: usize,
    prior: &SolutionSet,
) -> Result<ExcessRunReport, EngineError> {
    cfg.tracker.validate()?;
    let degrees = d.degrees();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = hit_coefficients(ideal, monomials, degrees, &mut rng, true)?;
    let patch = AffinePatch::random(ideal.vars().n_plus_one(), &mut rng, false);

    let plain = build_hit_with_coeffs(ideal, monomials, &coeffs, Complex64::new(1.0, 0.0), seed)?;
    let target = plain.target_system().clone();
    let target_real = super::system_is_real(&target);

    let expected = excess_by_mixed_volume(monomials, d)?;

    // Verification gate shared by tracked endpoints, conjugate candidates and
    // prior solutions: refine on the target, then require off-variety.
    let verify = |candidate: &[Complex64]| -> Result<Option<SolutionPoint>, EngineError> {
        let refined = newton_refine(&target, &patch, candidate, cfg.tracker.newton_tol, 20)?;
        if !refined.converged {
            return Ok(None);
        }
        let normalized = super::normalize_point(&refined.point)?;
        if membership_test(&normalized, ideal, cfg.membership_tol)? {
            return Ok(None);
        }
        Ok(Some(SolutionPoint {
            point: normalized,
            residual: refined.residual,
            on_variety: Some(false),
        }))
    };

    let mut found: Vec<SolutionPoint> = Vec::new();
    for p in &prior.points {
        if let Some(v) = verify(&p.point)? {
            merge_solution(&mut found, v, cfg.dedupe_tol);
        }
    }

    let mut gamma_history = Vec::new();
    let mut iterations = Vec::new();
    let mut total_accounting = PathAccounting::default();
    let mut total_stats = BatchStats::default();
    let mut all_traces = Vec::new();
    let mut start_count = 0;
    for iter in 0..max_iters {
        // The first round is the plain construction. Later rounds remix the
        // monomial column and route the path through a random interior member
        // of the blend family; the interior system carries the full generic
        // solution fiber, so transporting through it can move a path onto a
        // branch the straight segment never meets.
        let gamma = fresh_gamma(&mut rng, &gamma_history);
        gamma_history.push(gamma);
        // A remix can, rarely, put two start solutions within the dedupe
        // tolerance of each other; redraw the column when the start count
        // comes up short.
        let mut column_attempt = 0;
        let (h, start_points) = loop {
            let column = if iter == 0 && column_attempt == 0 {
                monomials.clone()
            } else {
                remix_column(monomials, &mut rng)?
            };
            let h = build_hit_with_coeffs(ideal, &column, &coeffs, gamma, seed)?;
            match solve_start_with_retries(
                h.start_system(),
                monomials,
                expected,
                &patch,
                &mut rng,
                cfg,
                seed,
            ) {
                Ok((starts, _)) => {
                    let pts: Vec<Vec<Complex64>> =
                        starts.points.iter().map(|p| p.point.clone()).collect();
                    break (h, pts);
                }
                Err(
                    e @ (EngineError::NonGenericStart { .. } | EngineError::Inconclusive { .. }),
                ) if column_attempt < 2 => {
                    let _ = e;
                    column_attempt += 1;
                }
                Err(e) => return Err(e),
            }
        };
        start_count = start_points.len();

        // Track the start points: straight on the first round, then through
        // an interior transport. Also run the found set around a triangle
        // loop, which explores the target fiber from what is already known.
        let mut outcomes;
        let mut accounting;
        let mut stats;
        if iter == 0 {
            (outcomes, accounting, stats) = track_batch(&h, &start_points, &patch, cfg)?;
        } else {
            let route = route_via_interior(&h, gamma, &mut rng, seed)?;
            (outcomes, accounting, stats) = track_chain(&route, &start_points, &patch, cfg)?;
        }
        if iter > 0 && !found.is_empty() {
            let known: Vec<Vec<Complex64>> = found.iter().map(|p| p.point.clone()).collect();
            for _ in 0..3 {
                // each loop gets its own remixed pencil through the target
                let loop_column = remix_column(monomials, &mut rng)?;
                let loop_h = build_hit_with_coeffs(ideal, &loop_column, &coeffs, gamma, seed)?;
                let legs = loop_via_interior(&loop_h, gamma, &mut rng, seed)?;
                let (loop_outcomes, loop_acc, loop_stats) =
                    track_chain(&legs, &known, &patch, cfg)?;
                outcomes.extend(loop_outcomes);
                accounting.converged += loop_acc.converged;
                accounting.diverged += loop_acc.diverged;
                accounting.singular += loop_acc.singular;
                accounting.step_limit += loop_acc.step_limit;
                stats.steps += loop_stats.steps;
                stats.rejections += loop_stats.rejections;
            }
        }
        total_accounting.converged += accounting.converged;
        total_accounting.diverged += accounting.diverged;
        total_accounting.singular += accounting.singular;
        total_accounting.step_limit += accounting.step_limit;
        total_stats.steps += stats.steps;
        total_stats.rejections += stats.rejections;
        if cfg.trace {
            all_traces.extend(collect_trace(&outcomes));
        }

        let mut new_points = 0;
        for p in converged_points(&outcomes) {
            if let Some(v) = verify(&p.point)? {
                if merge_solution(&mut found, v, cfg.dedupe_tol) {
                    new_points += 1;
                }
            }
            if target_real {
                let conjugate: Vec<Complex64> = p.point.iter().map(|z| z.conj()).collect();
                if let Some(v) = verify(&conjugate)? {
                    if merge_solution(&mut found, v, cfg.dedupe_tol) {
                        new_points += 1;
                    }
                }
            }
        }
        iterations.push(HitIteration {
            gamma,
            new_points,
            cumulative: found.len(),
            accounting,
        });
    }

    if max_iters == 0 {
        start_count = expected as usize;
    }
    let report = ExcessRunReport {
        kind: HomotopyKind::Hit,
        degrees: degrees.to_vec(),
        start_count,
        tracked_count: total_accounting.total(),
        converged_count: total_accounting.converged,
        on_variety_count: 0,
        excess_count: found.len(),
        upper_bound: None,
        bound_kind: BoundKind::Lower,
        solutions: SolutionSet { points: found },
        accounting: total_accounting,
        stats: total_stats,
        seed,
        gamma_history,
        iterations,
        trace: all_traces,
    };
    debug_assert!(report.validate().is_ok(), "{:?}", report.validate());
    Ok(report)
}

/// Random invertible recombination of the column within equal-degree blocks.
/// The generated ideal, its variety and the Newton polytopes are unchanged,
/// but the solution curve the paths ride moves, so fresh draws can reach
/// endpoints that were disconnected from the start fiber before.
fn remix_column<R: rand::Rng>(
    monomials: &IdealSpec,
    rng: &mut R,
) -> Result<IdealSpec, EngineError> {
    use rand_distr::StandardNormal;
    let gens = monomials.generators();
    let degrees = monomials.degrees();
    let mut mixed: Vec<SparsePolynomial> = gens.to_vec();
    let mut seen = vec![false; gens.len()];
    for j in 0..gens.len() {
        if seen[j] {
            continue;
        }
        let block: Vec<usize> = (j..gens.len())
            .filter(|&k| degrees[k] == degrees[j])
            .collect();
        for &k in &block {
            seen[k] = true;
        }
        for &row in &block {
            let mut combo = SparsePolynomial::zero(monomials.vars().n_plus_one());
            for &col in &block {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                combo = combo.add(&gens[col].scale(Complex64::new(re, im)))?;
            }
            mixed[row] = combo;
        }
    }
    Ok(IdealSpec::new(mixed, monomials.vars().clone())?)
}

/// A random interior member of the blend family between a homotopy's start
/// and target systems, rescaled per component for residual sanity.
fn interior_blend<R: rand::Rng>(
    h: &HomotopySystem,
    rng: &mut R,
) -> Result<PolynomialSystem, EngineError> {
    use rand_distr::StandardNormal;
    let draw = |rng: &mut R| loop {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let v = Complex64::new(re, im);
        if v.norm() > 0.2 {
            break v;
        }
    };
    let a = draw(rng);
    let b = draw(rng);
    let polys: Vec<SparsePolynomial> = h
        .start_system()
        .polys()
        .iter()
        .zip(h.target_system().polys())
        .map(|(s, t)| {
            let combo = s.scale(a).add(&t.scale(b)).expect("widths match");
            let norm = combo.coeff_one_norm();
            if norm > 0.0 {
                combo.scale(Complex64::new(1.0 / norm, 0.0))
            } else {
                combo
            }
        })
        .collect();
    Ok(PolynomialSystem::new_square(
        polys,
        h.start_system().vars().clone(),
    )?)
}

/// Track a composite route given as consecutive segment legs; a path fails as
/// soon as one leg fails, and outcomes keep the original point order.
fn track_chain(
    legs: &[HomotopySystem],
    starts: &[Vec<Complex64>],
    patch: &AffinePatch,
    cfg: &EngineConfig,
) -> Result<(Vec<TrackOutcome>, PathAccounting, BatchStats), EngineError> {
    let mut final_outcomes: Vec<Option<TrackOutcome>> = vec![None; starts.len()];
    let mut alive: Vec<(usize, Vec<Complex64>)> = starts
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.clone()))
        .collect();
    let mut stats = BatchStats::default();
    for (li, leg) in legs.iter().enumerate() {
        let points: Vec<Vec<Complex64>> = alive.iter().map(|(_, p)| p.clone()).collect();
        let (outcomes, _, st) = track_batch(leg, &points, patch, cfg)?;
        stats.steps += st.steps;
        stats.rejections += st.rejections;
        let mut next_alive = Vec::new();
        for ((orig, _), outcome) in alive.into_iter().zip(outcomes) {
            let last_leg = li + 1 == legs.len();
            match (&outcome.endpoint, last_leg) {
                (Some(endpoint), false) => next_alive.push((orig, endpoint.clone())),
                _ => final_outcomes[orig] = Some(outcome),
            }
        }
        alive = next_alive;
    }
    let outcomes: Vec<TrackOutcome> = final_outcomes
        .into_iter()
        .map(|o| o.expect("every path accounted"))
        .collect();
    let mut accounting = PathAccounting::default();
    for o in &outcomes {
        match o.status {
            PathStatus::Converged => accounting.converged += 1,
            PathStatus::Diverged => accounting.diverged += 1,
            PathStatus::Singular => accounting.singular += 1,
            PathStatus::StepLimit => accounting.step_limit += 1,
        }
    }
    Ok((outcomes, accounting, stats))
}

/// A two-leg route from the start system to the target through a random
/// interior member of the blend family.
fn route_via_interior<R: rand::Rng>(
    h: &HomotopySystem,
    gamma: Complex64,
    rng: &mut R,
    seed: u64,
) -> Result<Vec<HomotopySystem>, EngineError> {
    let mid = interior_blend(h, rng)?;
    Ok(vec![
        HomotopySystem::new(
            HomotopyKind::Hit,
            h.start_system().clone(),
            mid.clone(),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            seed,
        )?,
        HomotopySystem::new(
            HomotopyKind::Hit,
            mid,
            h.target_system().clone(),
            Complex64::new(1.0, 0.0),
            gamma,
            seed,
        )?,
    ])
}

/// A triangle loop from the target through two interior members and back;
/// tracking known solutions around it permutes them within the target fiber,
/// which is how already-found solutions lead to new ones.
fn loop_via_interior<R: rand::Rng>(
    h: &HomotopySystem,
    gamma: Complex64,
    rng: &mut R,
    seed: u64,
) -> Result<Vec<HomotopySystem>, EngineError> {
    let mid_a = interior_blend(h, rng)?;
    let mid_b = interior_blend(h, rng)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(vec![
        HomotopySystem::new(
            HomotopyKind::Hit,
            h.target_system().clone(),
            mid_a.clone(),
            gamma,
            one,
            seed,
        )?,
        HomotopySystem::new(HomotopyKind::Hit, mid_a, mid_b.clone(), one, one, seed)?,
        HomotopySystem::new(
            HomotopyKind::Hit,
            mid_b,
            h.target_system().clone(),
            one,
            gamma,
            seed,
        )?,
    ])
}

/// Insert unless within tolerance of an existing member (which keeps its
/// smaller residual); true when the point was new.
fn merge_solution(set: &mut Vec<SolutionPoint>, candidate: SolutionPoint, tol: f64) -> bool {
    match set
        .iter_mut()
        .find(|q| super::projective_distance(&candidate.point, &q.point) < tol)
    {
        Some(existing) => {
            if candidate.residual < existing.residual {
                *existing = candidate;
            }
            false
        }
        None => {
            set.push(candidate);
            true
        }
    }
}
