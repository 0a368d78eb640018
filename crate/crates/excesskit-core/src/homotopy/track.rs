//! Predictor-corrector tracking of one path and Newton refinement.
//!
//! Paths live in a fixed affine chart. The predictor is an Euler step on the
//! implicit-derivative system `H_x dx/dt = -H_t`; the corrector is plain
//! Newton at fixed t with the chart equation appended to square the system.
//! Steps halve on corrector failure and grow after a run of accepted steps.

use super::linalg;
use super::{normalize_point, AffinePatch, EngineError, HomotopySystem, TrackerConfig};
use crate::algebra::{jacobian, PolynomialSystem, SparsePolynomial};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Converged,
    Diverged,
    Singular,
    StepLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathStats {
    pub steps: usize,
    pub rejections: usize,
    pub final_residual: f64,
}

/// Result of tracking one path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackOutcome {
    pub status: PathStatus,
    /// Normalized endpoint, present only for converged paths.
    pub endpoint: Option<Vec<Complex64>>,
    /// Wherever the path stopped, normalized; used to classify failures.
    pub last_point: Vec<Complex64>,
    pub stats: PathStats,
    /// (t, step, residual) per accepted step when tracing is on.
    pub trace: Vec<(f64, f64, f64)>,
}

/// Result of a Newton refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub point: Vec<Complex64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn residual_inf(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

struct SystemEvaluator<'a> {
    polys: &'a PolynomialSystem,
    jac: Vec<Vec<SparsePolynomial>>,
}

impl<'a> SystemEvaluator<'a> {
    fn new(polys: &'a PolynomialSystem) -> Self {
        Self {
            polys,
            jac: jacobian(polys),
        }
    }
}

/// Newton iteration on the square system `[F(x); c.x - 1]`.
///
/// The residual (infinity norm of F at the current chart point) decreases
/// monotonically or the iteration stops and reports its best iterate.
/// Convergence additionally requires the Newton correction at the final
/// iterate to be tiny: near a positive-dimensional or multiple solution set
/// the residual can dip below tolerance while the point is still far from
/// stationary, and the step size exposes that.
pub fn newton_refine(
    sys: &PolynomialSystem,
    patch: &AffinePatch,
    x0: &[Complex64],
    tol: f64,
    max_iters: usize,
) -> Result<RefineOutcome, EngineError> {
    let evaluator = SystemEvaluator::new(sys);
    let mut x = patch.project(x0)?;
    let mut residual = residual_inf(&sys.evaluate(&x)?);
    let mut iterations = 0;
    let mut done = residual < tol;
    while !done && iterations < max_iters {
        let step = newton_step(&evaluator, patch, &x)?;
        let next = match step {
            Some(next) => next,
            None => {
                return Ok(RefineOutcome {
                    point: x,
                    residual,
                    converged: false,
                    iterations,
                })
            }
        };
        let next_residual = residual_inf(&sys.evaluate(&next)?);
        iterations += 1;
        if next_residual >= residual {
            // no progress; keep the better iterate
            break;
        }
        x = next;
        residual = next_residual;
        done = residual < tol;
    }
    let converged = residual < tol && stationary(&evaluator, patch, &x, tol)?;
    Ok(RefineOutcome {
        point: x,
        residual,
        converged,
        iterations,
    })
}

/// True when the Newton correction at the point is negligible relative to it.
/// At a regular root with residual below `tol` the correction is about
/// `tol / sigma_min`, so the gate sits at `sqrt(tol)`, orders of magnitude
/// above that but far below the wandering steps seen near non-stationary
/// residual dips.
fn stationary(
    evaluator: &SystemEvaluator,
    patch: &AffinePatch,
    x: &[Complex64],
    tol: f64,
) -> Result<bool, EngineError> {
    let step = match newton_step(evaluator, patch, x)? {
        Some(next) => next,
        None => return Ok(false),
    };
    let delta = step
        .iter()
        .zip(x)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    Ok(delta <= tol.sqrt() * scale)
}

fn newton_step(
    evaluator: &SystemEvaluator,
    patch: &AffinePatch,
    x: &[Complex64],
) -> Result<Option<Vec<Complex64>>, EngineError> {
    let n = evaluator.polys.len();
    let width = x.len();
    let mut a = Vec::with_capacity(n + 1);
    for row in &evaluator.jac {
        let r: Result<Vec<Complex64>, _> = row.iter().map(|p| p.evaluate(x)).collect();
        a.push(r?);
    }
    a.push(patch.coeffs().to_vec());
    let mut b: Vec<Complex64> = evaluator.polys.evaluate(x)?.iter().map(|v| -v).collect();
    b.push(Complex64::new(1.0, 0.0) - patch.dot(x));
    debug_assert_eq!(a.len(), width);
    match linalg::solve(a, b) {
        None => Ok(None),
        Some(delta) => Ok(Some(x.iter().zip(&delta).map(|(v, d)| v + d).collect())),
    }
}

/// Euler predictor on `H_x dx = H_t dt` followed by the corrector.
fn step_once(
    h: &HomotopySystem,
    patch: &AffinePatch,
    x: &[Complex64],
    t: f64,
    h_step: f64,
    cfg: &TrackerConfig,
) -> Result<Option<Vec<Complex64>>, EngineError> {
    let predicted = {
        let hx = h.eval_dx(x, t)?;
        let ht = h.eval_dt(x)?;
        let mut a: Vec<Vec<Complex64>> = hx;
        a.push(patch.coeffs().to_vec());
        let mut b = ht;
        b.push(Complex64::new(0.0, 0.0));
        match linalg::solve(a, b) {
            Some(v) => x
                .iter()
                .zip(&v)
                .map(|(xi, vi)| xi + vi * h_step)
                .collect::<Vec<Complex64>>(),
            None => x.to_vec(),
        }
    };
    correct(h, patch, &predicted, t - h_step, cfg)
}

/// Corrector: Newton at fixed t on the homotopy plus chart equation.
fn correct(
    h: &HomotopySystem,
    patch: &AffinePatch,
    x: &[Complex64],
    t: f64,
    cfg: &TrackerConfig,
) -> Result<Option<Vec<Complex64>>, EngineError> {
    let (n, width) = h.dims();
    let mut current = x.to_vec();
    for _ in 0..cfg.max_newton_iters {
        let hv = h.eval(&current, t)?;
        if residual_inf(&hv) < cfg.newton_tol {
            return Ok(Some(current));
        }
        let hx = h.eval_dx(&current, t)?;
        let mut a = Vec::with_capacity(n + 1);
        for row in hx {
            a.push(row);
        }
        a.push(patch.coeffs().to_vec());
        let mut b: Vec<Complex64> = hv.iter().map(|v| -v).collect();
        b.push(Complex64::new(1.0, 0.0) - patch.dot(&current));
        debug_assert_eq!(a.len(), width);
        let delta = match linalg::solve(a, b) {
            Some(d) => d,
            None => return Ok(None),
        };
        for (v, d) in current.iter_mut().zip(&delta) {
            *v += d;
        }
    }
    let hv = h.eval(&current, t)?;
    if residual_inf(&hv) < cfg.newton_tol {
        Ok(Some(current))
    } else {
        Ok(None)
    }
}

/// Track one path of `H` from t = 1 down to t = 0 and polish the endpoint.
pub fn track_path(
    h: &HomotopySystem,
    start: &[Complex64],
    patch: &AffinePatch,
    cfg: &TrackerConfig,
    trace: bool,
) -> Result<TrackOutcome, EngineError> {
    cfg.validate()?;
    let mut stats = PathStats::default();
    let mut steps_trace = Vec::new();
    let mut x = patch.project(start)?;

    let fail = |status: PathStatus, x: &[Complex64], stats: PathStats, tr: Vec<(f64, f64, f64)>| {
        let last_point = normalize_point(x).unwrap_or_else(|_| x.to_vec());
        Ok(TrackOutcome {
            status,
            endpoint: None,
            last_point,
            stats,
            trace: tr,
        })
    };

    // The start must already solve H(., 1); re-center once if it is close.
    match correct(h, patch, &x, 1.0, cfg)? {
        Some(corrected) => x = corrected,
        None => return fail(PathStatus::Singular, &x, stats, steps_trace),
    }

    let mut t = 1.0f64;
    let mut step = cfg.initial_step;
    let mut accepted_streak = 0usize;
    while t > 0.0 {
        if stats.steps >= cfg.max_steps {
            return fail(PathStatus::StepLimit, &x, stats, steps_trace);
        }
        // Near the end keep tightening; at the floor, land exactly on 0.
        let h_step = if t < 1e-4 && t > 4.0 * cfg.min_step {
            step.min(t / 2.0)
        } else {
            step.min(t)
        };
        let t_new = t - h_step;

        // One full step checked against two half steps: near a tight passage
        // between two solution branches a coarse step can silently hop
        // sheets, and the two routes then disagree by the sheet distance.
        let full = step_once(h, patch, &x, t, h_step, cfg)?;
        let verified = match full {
            None => None,
            Some(full_point) => {
                if h_step <= 2.0 * cfg.min_step {
                    Some(full_point)
                } else {
                    let half = h_step / 2.0;
                    match step_once(h, patch, &x, t, half, cfg)? {
                        None => None,
                        Some(mid) => {
                            match step_once(h, patch, &mid, t - half, t - half - t_new, cfg)? {
                                None => None,
                                Some(fine) => {
                                    let dist = fine
                                        .iter()
                                        .zip(&full_point)
                                        .map(|(a, b)| (a - b).norm())
                                        .fold(0.0, f64::max);
                                    let scale =
                                        fine.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
                                    if dist <= 1e-5 * scale {
                                        Some(fine)
                                    } else {
                                        None
                                    }
                                }
                            }
                        }
                    }
                }
            }
        };

        match verified {
            Some(next) => {
                x = next;
                t = t_new;
                stats.steps += 1;
                accepted_streak += 1;
                if trace {
                    let res = residual_inf(&h.eval(&x, t)?);
                    steps_trace.push((t, h_step, res));
                }
                if x.iter().map(|v| v.norm()).fold(0.0, f64::max) > cfg.divergence_threshold {
                    return fail(PathStatus::Diverged, &x, stats, steps_trace);
                }
                if accepted_streak >= 3 {
                    step = (step * 2.0).min(cfg.max_step);
                    accepted_streak = 0;
                }
            }
            None => {
                stats.rejections += 1;
                accepted_streak = 0;
                step = h_step / 2.0;
                if step < cfg.min_step {
                    return fail(PathStatus::Singular, &x, stats, steps_trace);
                }
            }
        }
    }

    // Final polish in the max-coordinate chart, so the polished residual is
    // already at the scale of the normalized representative. A path only
    // counts as converged when the polish reaches a stationary point.
    let mut normalized = match normalize_point(&x) {
        Ok(p) => p,
        Err(_) => return fail(PathStatus::Singular, &x, stats, steps_trace),
    };
    let mut polish_ok = !cfg.t_end_refine;
    if cfg.t_end_refine {
        let pivot = normalized
            .iter()
            .position(|v| *v == Complex64::new(1.0, 0.0))
            .unwrap_or(0);
        let pivot_patch = AffinePatch::coordinate(pivot, normalized.len());
        if let Ok(refined) = newton_refine(
            h.target_system(),
            &pivot_patch,
            &normalized,
            cfg.newton_tol,
            30,
        ) {
            polish_ok = refined.converged;
            normalized = match normalize_point(&refined.point) {
                Ok(p) => p,
                Err(_) => return fail(PathStatus::Singular, &x, stats, steps_trace),
            };
        }
    }
    let final_residual = residual_inf(&h.target_system().evaluate(&normalized)?);
    stats.final_residual = final_residual;
    if final_residual < cfg.newton_tol && polish_ok {
        Ok(TrackOutcome {
            status: PathStatus::Converged,
            endpoint: Some(normalized.clone()),
            last_point: normalized,
            stats,
            trace: steps_trace,
        })
    } else {
        Ok(TrackOutcome {
            status: PathStatus::Singular,
            endpoint: None,
            last_point: normalized,
            stats,
            trace: steps_trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, PolynomialSystem, VariableSet};
    use crate::homotopy::HomotopyKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadric_system() -> (PolynomialSystem, VariableSet) {
        let vars = VariableSet::new(vec!["x", "y", "z"]).unwrap();
        let polys = vec![
            parse_polynomial("x^2 - y^2", &vars).unwrap(),
            parse_polynomial("y^2 - z^2", &vars).unwrap(),
        ];
        (
            PolynomialSystem::new_square(polys, vars.clone()).unwrap(),
            vars,
        )
    }

    #[test]
    fn refine_keeps_exact_roots() {
        let (sys, _) = quadric_system();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let patch = AffinePatch::random(3, &mut rng, false);
        let root = [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let out = newton_refine(&sys, &patch, &root, 1e-9, 10).unwrap();
        assert!(out.converged);
        assert!(out.residual < 1e-14);
        // unchanged up to the chart rescaling
        let expected = patch.project(&root).unwrap();
        for (a, b) in out.point.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn refine_converges_from_perturbed_root() {
        let (sys, _) = quadric_system();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let patch = AffinePatch::random(3, &mut rng, false);
        let perturbed = [c(1.0 + 1e-4, 0.0), c(1.0, -1e-4), c(1.0 - 1e-4, 0.0)];
        let out = newton_refine(&sys, &patch, &perturbed, 1e-12, 5).unwrap();
        assert!(out.converged, "residual {}", out.residual);
        assert!(out.iterations <= 5);
    }

    #[test]
    fn refine_rejects_zero_vector() {
        let (sys, _) = quadric_system();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let patch = AffinePatch::random(3, &mut rng, false);
        let zero = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            newton_refine(&sys, &patch, &zero, 1e-9, 5),
            Err(EngineError::ZeroVector)
        ));
    }

    #[test]
    fn constant_homotopy_keeps_endpoints() {
        let (sys, _) = quadric_system();
        let h = HomotopySystem::new(
            HomotopyKind::TotalDegree,
            sys.clone(),
            sys,
            c(1.0, 0.0),
            c(1.0, 0.0),
            0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let patch = AffinePatch::random(3, &mut rng, false);
        let start = [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let out = track_path(&h, &start, &patch, &TrackerConfig::default(), false).unwrap();
        assert_eq!(out.status, PathStatus::Converged);
        let end = normalize_point(&out.endpoint.unwrap()).unwrap();
        let want = normalize_point(&start).unwrap();
        for (a, b) in end.iter().zip(&want) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn linear_segment_reaches_the_target_solution() {
        // two generic linear systems in projective 2-space, one path
        let vars = VariableSet::new(vec!["x", "y", "z"]).unwrap();
        let start_sys = PolynomialSystem::new_square(
            vec![
                parse_polynomial("x - y", &vars).unwrap(),
                parse_polynomial("x - z", &vars).unwrap(),
            ],
            vars.clone(),
        )
        .unwrap();
        let target_sys = PolynomialSystem::new_square(
            vec![
                parse_polynomial("2*x + y - 3*z", &vars).unwrap(),
                parse_polynomial("x - 5*y + 2*z", &vars).unwrap(),
            ],
            vars.clone(),
        )
        .unwrap();
        let h = HomotopySystem::new(
            HomotopyKind::TotalDegree,
            start_sys,
            target_sys.clone(),
            c(0.8, 0.6),
            c(1.0, 0.0),
            0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let patch = AffinePatch::random(3, &mut rng, false);
        let start = [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let out = track_path(&h, &start, &patch, &TrackerConfig::default(), false).unwrap();
        assert_eq!(out.status, PathStatus::Converged);
        let endpoint = out.endpoint.unwrap();
        // solve the 2x2 affine target directly (z = 1): 2x + y = 3, x - 5y = -2
        let x_true = 13.0 / 11.0;
        let y_true = 7.0 / 11.0;
        let scaled: Vec<Complex64> = endpoint.iter().map(|v| v / endpoint[2]).collect();
        assert!((scaled[0] - c(x_true, 0.0)).norm() < 1e-8);
        assert!((scaled[1] - c(y_true, 0.0)).norm() < 1e-8);
        assert!(out.stats.final_residual < 1e-9);
    }
}
