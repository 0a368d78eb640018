//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible under `--nocapture`). Tolerances and budgets are
//! pinned in the assertions. The criteria share a lock so wall-clock budgets
//! are measured without contention from sibling tests.

use excesskit_core::{
    excess_by_mixed_volume, excess_powers, minkowski_sum, multilinear_volume_coefficient,
    newton_polytope_of_bsystem, projective_distance, run_hit_iterations, run_hup, slice_simplex,
    total_degree_solve, AffinePatch, BigRational, DegreeVector, EngineConfig, IdealSpec,
    LatticePolytope, PolynomialSystem, PowersIdealSpec, SolutionSet, VariableSet,
};
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Mutex;
use std::time::{Duration, Instant};

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(number: u32, name: &str, f: impl FnOnce() -> Result<(), String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    match f() {
        Ok(()) => println!("ACCEPTANCE {number} ({name}): PASS"),
        Err(message) => {
            println!("ACCEPTANCE {number} ({name}): FAIL - {message}");
            panic!("criterion {number} ({name}) failed: {message}");
        }
    }
}

fn twisted_cubic() -> IdealSpec {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    IdealSpec::parse(&["z^2 - y*w", "y*z - x*w", "y^2 - x*z"], vars).unwrap()
}

fn initial_degeneration() -> IdealSpec {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap()
}

#[test]
fn criterion_1_closed_formula() {
    criterion(1, "closed formula", || {
        let cases: &[(&[u32], &[u32], u64)] = &[
            (&[2, 2], &[3, 3, 3], 7),
            (&[3, 3], &[5, 5, 5], 44),
            (&[2], &[3, 3, 3], 1),
            (&[2, 2, 2], &[2, 2, 2], 0),
        ];
        // warm up allocators before taking timings
        let _ = excess_powers(
            &PowersIdealSpec::new(vec![2]).unwrap(),
            &DegreeVector::new(vec![2]).unwrap(),
        );
        for &(p, d, want) in cases {
            let powers = PowersIdealSpec::new(p.to_vec()).map_err(|e| e.to_string())?;
            let degrees = DegreeVector::new(d.to_vec()).map_err(|e| e.to_string())?;
            let started = Instant::now();
            let result = excess_powers(&powers, &degrees).map_err(|e| e.to_string())?;
            let elapsed = started.elapsed();
            let got = result.excess.to_u64().ok_or("excess out of range")?;
            if got != want {
                return Err(format!("excess_powers({p:?}, {d:?}) = {got}, want {want}"));
            }
            if &result.excess + &result.equivalence != result.bezout {
                return Err("excess + equivalence != bezout".into());
            }
            if elapsed > Duration::from_millis(1) {
                return Err(format!("case {p:?}/{d:?} took {elapsed:?}, budget 1 ms"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_mixed_volume_fixtures() {
    criterion(2, "mixed volume fixtures", || {
        let xyzw = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
        let wxyz = VariableSet::new(vec!["w", "x", "y", "z"]).unwrap();
        let cases: Vec<(IdealSpec, Vec<u32>, u64)> = vec![
            (
                IdealSpec::parse(&["z^2", "-y*w", "y*z", "-x*w", "y^2", "-x*z"], xyzw.clone())
                    .unwrap(),
                vec![2, 2, 2],
                4,
            ),
            (
                IdealSpec::parse(&["x^3", "y^3", "x*y"], wxyz.clone()).unwrap(),
                vec![5, 5, 5],
                65,
            ),
            (
                IdealSpec::parse(&["x^3", "y^3"], wxyz.clone()).unwrap(),
                vec![5, 5, 5],
                44,
            ),
            (
                IdealSpec::parse(&["x^3", "y^3", "x^2*y", "x*y^2"], wxyz.clone()).unwrap(),
                vec![5, 5, 5],
                44,
            ),
            (
                IdealSpec::parse(&["x^3", "y^3", "x^2*y^2"], wxyz).unwrap(),
                vec![5, 5, 5],
                44,
            ),
        ];
        for (ideal, d, want) in cases {
            let degrees = DegreeVector::new(d.clone()).map_err(|e| e.to_string())?;
            let started = Instant::now();
            let got = excess_by_mixed_volume(&ideal, &degrees).map_err(|e| e.to_string())?;
            let elapsed = started.elapsed();
            if got != want {
                return Err(format!("mixed volume at {d:?} = {got}, want {want}"));
            }
            if elapsed > Duration::from_secs(1) {
                return Err(format!("fixture took {elapsed:?}, budget 1 s"));
            }
        }
        Ok(())
    });
}

/// Non-decreasing tuples of the given length over lo..=hi.
fn multisets(len: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; len];
    fn rec(pos: usize, lo: u32, hi: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for v in lo..=hi {
            current[pos] = v;
            rec(pos + 1, v, hi, current, out);
        }
    }
    rec(0, lo, hi, &mut current, &mut out);
    out
}

fn powers_ideal(p: &[u32], n: usize) -> IdealSpec {
    let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
    let vars = VariableSet::new(names).unwrap();
    let gens: Vec<_> = p
        .iter()
        .enumerate()
        .map(|(i, &power)| {
            let mut exps = vec![0u32; n + 1];
            exps[i + 1] = power;
            excesskit_core::SparsePolynomial::monomial(
                n + 1,
                exps,
                excesskit_core::Complex64::new(1.0, 0.0),
            )
            .unwrap()
        })
        .collect();
    IdealSpec::new(gens, vars).unwrap()
}

#[test]
fn criterion_3_oracle_equivalence_grid() {
    criterion(3, "oracle equivalence grid", || {
        let started = Instant::now();
        let mut cases = 0usize;
        for n in 1..=4usize {
            for k in 1..=n {
                for p in multisets(k, 1, 5) {
                    let max_p = *p.iter().max().unwrap();
                    for d in multisets(n, max_p, 5) {
                        let formula = excess_powers(
                            &PowersIdealSpec::new(p.clone()).unwrap(),
                            &DegreeVector::new(d.clone()).unwrap(),
                        )
                        .map_err(|e| e.to_string())?
                        .excess
                        .to_u64()
                        .ok_or("overflow")?;
                        let ideal = powers_ideal(&p, n);
                        let degrees = DegreeVector::new(d.clone()).unwrap();
                        let by_volume =
                            excess_by_mixed_volume(&ideal, &degrees).map_err(|e| e.to_string())?;
                        let polytopes: Vec<LatticePolytope> = d
                            .iter()
                            .map(|&di| newton_polytope_of_bsystem(&ideal, di).unwrap())
                            .collect();
                        let interpolated = multilinear_volume_coefficient(&polytopes)
                            .map_err(|e| e.to_string())?;
                        if formula != by_volume || by_volume != interpolated {
                            return Err(format!(
                                "p = {p:?}, d = {d:?}: formula {formula}, \
                                 mixed volume {by_volume}, interpolation {interpolated}"
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
        let elapsed = started.elapsed();
        println!("  grid: {cases} cases in {elapsed:?}");
        if cases < 300 {
            return Err(format!("only {cases} cases enumerated"));
        }
        if elapsed > Duration::from_secs(120) {
            return Err(format!("grid took {elapsed:?}, budget 2 min"));
        }
        Ok(())
    });
}

#[test]
fn criterion_4_slice_equality() {
    criterion(4, "sliced simplex equals the scaled sum", || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let mut checked = 0;
        while checked < 20 {
            let n = rng.random_range(2..=4usize);
            let k = rng.random_range(1..=n);
            let p: Vec<u32> = (0..k).map(|_| rng.random_range(1..=3u32)).collect();
            let max_p = *p.iter().max().unwrap();
            let d: Vec<u32> = (0..n).map(|_| rng.random_range(max_p..=5u32)).collect();
            let lambda: Vec<u32> = (0..n).map(|_| rng.random_range(1..=3u32)).collect();

            let ideal = powers_ideal(&p, n);
            let mut sum: Option<LatticePolytope> = None;
            for (&di, &li) in d.iter().zip(&lambda) {
                let scaled = newton_polytope_of_bsystem(&ideal, di)
                    .map_err(|e| e.to_string())?
                    .scale(li as i64)
                    .map_err(|e| e.to_string())?;
                sum = Some(match sum {
                    None => scaled,
                    Some(acc) => minkowski_sum(&acc, &scaled).map_err(|e| e.to_string())?,
                });
            }
            let sum = sum.unwrap();
            let sliced = slice_simplex(&p, &d, &lambda).map_err(|e| e.to_string())?;
            let mut hull_vertices: Vec<Vec<BigRational>> = sum
                .vertices()
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|&x| BigRational::from(excesskit_core::BigInt::from(x)))
                        .collect()
                })
                .collect();
            hull_vertices.sort();
            let s1_vertices = sliced.s1_vertices().map_err(|e| e.to_string())?;
            if hull_vertices != s1_vertices {
                return Err(format!(
                    "vertex sets differ for p = {p:?}, d = {d:?}, lambda = {lambda:?}"
                ));
            }
            checked += 1;
        }
        Ok(())
    });
}

#[test]
fn criterion_5_hup_end_to_end() {
    criterion(5, "hup end to end", || {
        let ideal = twisted_cubic();
        let cfg = EngineConfig::default();
        if cfg.membership_tol != 1e-6 || cfg.dedupe_tol != 1e-6 {
            return Err("membership/dedupe tolerances must be 1e-6".into());
        }

        let d333 = DegreeVector::new(vec![3, 3, 3]).unwrap();
        let mut successes = 0;
        for seed in 1..=10u64 {
            let started = Instant::now();
            if let Ok(report) = run_hup(&ideal, &d333, &cfg, seed) {
                report.validate()?;
                if report.excess_count == 10 {
                    successes += 1;
                }
            }
            if started.elapsed() > Duration::from_secs(120) {
                return Err("a (3,3,3) run exceeded the 2 minute budget".into());
            }
        }
        if successes < 9 {
            return Err(format!("(3,3,3) gave 10 for only {successes} of 10 seeds"));
        }

        let d222 = DegreeVector::new(vec![2, 2, 2]).unwrap();
        let report = run_hup(&ideal, &d222, &cfg, 1).map_err(|e| e.to_string())?;
        if report.excess_count != 0 {
            return Err(format!("(2,2,2) gave {}, want 0", report.excess_count));
        }

        let d334 = DegreeVector::new(vec![3, 3, 4]).unwrap();
        let started = Instant::now();
        let report = run_hup(&ideal, &d334, &cfg, 1).map_err(|e| e.to_string())?;
        if report.excess_count != 16 {
            return Err(format!("(3,3,4) gave {}, want 16", report.excess_count));
        }
        if started.elapsed() > Duration::from_secs(120) {
            return Err("the (3,3,4) run exceeded the 2 minute budget".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_6_hit_end_to_end() {
    criterion(6, "hit end to end", || {
        let ideal = twisted_cubic();
        let monomials = initial_degeneration();
        let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
        let cfg = EngineConfig::default();
        let mut successes = 0;
        for seed in 1..=10u64 {
            let report = run_hit_iterations(
                &ideal,
                &monomials,
                &d,
                &cfg,
                seed,
                8,
                &SolutionSet::default(),
            )
            .map_err(|e| format!("seed {seed}: {e}"))?;
            report.validate()?;
            if report.start_count != 7 {
                return Err(format!(
                    "seed {seed}: {} start points per iteration, want 7",
                    report.start_count
                ));
            }
            if report.iterations.len() != 8 {
                return Err(format!("seed {seed}: expected 8 iterations"));
            }
            let mut last = 0;
            for it in &report.iterations {
                if it.cumulative < last {
                    return Err(format!("seed {seed}: cumulative count decreased"));
                }
                last = it.cumulative;
            }
            if report.excess_count > 10 {
                return Err(format!(
                    "seed {seed}: lower bound {} exceeds the true count",
                    report.excess_count
                ));
            }
            if report.excess_count == 10 {
                successes += 1;
            }
        }
        if successes < 8 {
            return Err(format!(
                "lower bound reached 10 within 8 iterations for only {successes} of 10 seeds"
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_7_tracker_properties() {
    criterion(7, "tracker properties", || {
        let ideal = twisted_cubic();
        let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
        let cfg = EngineConfig::default();

        // path conservation and polished residuals, on a run and a raw solve
        let report = run_hup(&ideal, &d, &cfg, 3).map_err(|e| e.to_string())?;
        if report.accounting.total() != report.tracked_count {
            return Err("path accounting does not cover every start".into());
        }
        for p in &report.solutions.points {
            if p.residual >= 1e-9 {
                return Err(format!("converged endpoint with residual {}", p.residual));
            }
        }
        let vars = ideal.vars().clone();
        let sys = PolynomialSystem::random_dense(&[2, 2, 2], &vars, 77, false)
            .map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let patch = AffinePatch::random(4, &mut rng, false);
        let batch = total_degree_solve(&sys, &patch, &cfg, 77).map_err(|e| e.to_string())?;
        if batch.accounting.total() != 8 {
            return Err("total-degree accounting does not cover every path".into());
        }

        // Conjugation closure of real-coefficient runs: the isolated
        // endpoints of a real target come in conjugate pairs. (Converged
        // endpoints on the variety sample a conjugation-closed continuum,
        // so pairwise closure is only meaningful for the isolated set.)
        let real_cfg = EngineConfig {
            real_coefficients: true,
            ..EngineConfig::default()
        };
        let mut closed_runs = 0;
        for seed in 1..=5u64 {
            let report = match run_hup(&ideal, &d, &real_cfg, seed) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let isolated: Vec<_> = report
                .solutions
                .points
                .iter()
                .filter(|p| p.on_variety == Some(false))
                .collect();
            if isolated.is_empty() {
                return Err(format!("seed {seed}: no isolated endpoints"));
            }
            for p in &isolated {
                let conjugate: Vec<excesskit_core::Complex64> =
                    p.point.iter().map(|c| c.conj()).collect();
                let nearest = isolated
                    .iter()
                    .map(|q| projective_distance(&conjugate, &q.point))
                    .fold(f64::INFINITY, f64::min);
                if nearest >= real_cfg.dedupe_tol {
                    return Err(format!(
                        "seed {seed}: conjugate of an isolated endpoint is {nearest:.2e} away"
                    ));
                }
            }
            closed_runs += 1;
        }
        if closed_runs < 2 {
            return Err("fewer than 2 successful real-coefficient runs".into());
        }

        // bit-identical reports under 1 and 8 workers
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| run_hup(&ideal, &d, &cfg, 5))
            .map_err(|e| e.to_string())?;
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| run_hup(&ideal, &d, &cfg, 5))
            .map_err(|e| e.to_string())?;
        if single != eight || format!("{single:?}") != format!("{eight:?}") {
            return Err("reports differ between 1 and 8 workers".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_8_upper_bound_inequality() {
    criterion(8, "start count bounds the excess count", || {
        let ideal = twisted_cubic();
        let monomialized = ideal.monomialize();
        let cfg = EngineConfig::default();
        for d in [vec![3u32, 3, 3], vec![3, 3, 4]] {
            let degrees = DegreeVector::new(d.clone()).unwrap();
            let predicted =
                excess_by_mixed_volume(&monomialized, &degrees).map_err(|e| e.to_string())?;
            for seed in 1..=20u64 {
                let report = run_hup(&ideal, &degrees, &cfg, seed)
                    .map_err(|e| format!("d = {d:?}, seed {seed}: {e}"))?;
                if report.start_count as u64 != predicted {
                    return Err(format!(
                        "d = {d:?}, seed {seed}: start count {} != mixed volume {predicted}",
                        report.start_count
                    ));
                }
                if report.excess_count > report.start_count {
                    return Err(format!(
                        "d = {d:?}, seed {seed}: excess exceeds start count"
                    ));
                }
            }
        }
        Ok(())
    });
}
