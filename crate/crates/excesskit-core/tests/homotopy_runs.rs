//! End-to-end homotopy runs on the twisted cubic and small monomial ideals.

use excesskit_core::{
    build_hit, build_hup, dedupe, membership_test, run_hit_iterations, run_hup,
    solve_monomial_bsystem, total_degree_solve, AffinePatch, BoundKind, DegreeVector, EngineConfig,
    IdealSpec, PolynomialSystem, SolutionPoint, SolutionSet, VariableSet,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn twisted_cubic() -> IdealSpec {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    IdealSpec::parse(&["z^2 - y*w", "y*z - x*w", "y^2 - x*z"], vars).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn total_degree_counts_dense_systems() {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    let cfg = EngineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let patch = AffinePatch::random(4, &mut rng, false);

    let sys = PolynomialSystem::random_dense(&[2, 2, 2], &vars, 17, false).unwrap();
    let batch = total_degree_solve(&sys, &patch, &cfg, 17).unwrap();
    assert_eq!(batch.solutions.len(), 8);
    assert_eq!(batch.accounting.total(), 8);

    let sys = PolynomialSystem::random_dense(&[1, 1, 1], &vars, 18, false).unwrap();
    let batch = total_degree_solve(&sys, &patch, &cfg, 18).unwrap();
    assert_eq!(batch.solutions.len(), 1);
}

#[test]
fn monomialized_twisted_cubic_start_count() {
    let ideal = twisted_cubic().monomialize();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    let sols = solve_monomial_bsystem(&ideal, &d, &cfg, 5).unwrap();
    assert_eq!(sols.len(), 23);
}

#[test]
fn initial_degeneration_start_count_is_seven() {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    let ideal = IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    let sols = solve_monomial_bsystem(&ideal, &d, &cfg, 3).unwrap();
    assert_eq!(sols.len(), 7);
    for p in &sols.points {
        assert!(!membership_test(&p.point, &ideal, cfg.membership_tol).unwrap());
    }
}

#[test]
fn powers_square_case_has_no_excess_solutions() {
    let vars = VariableSet::new(vec!["x0", "x1", "x2", "x3"]).unwrap();
    let ideal = IdealSpec::parse(&["x1^2", "x2^2"], vars).unwrap();
    let d = DegreeVector::new(vec![2, 2, 2]).unwrap();
    let cfg = EngineConfig::default();
    let sols = solve_monomial_bsystem(&ideal, &d, &cfg, 11).unwrap();
    assert_eq!(sols.len(), 0);
}

#[test]
fn hup_twisted_cubic_333_counts_ten() {
    let ideal = twisted_cubic();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    let report = run_hup(&ideal, &d, &cfg, 1).unwrap();
    assert_eq!(report.start_count, 23);
    assert_eq!(report.excess_count, 10);
    assert_eq!(report.bound_kind, BoundKind::Exact);
    report.validate().unwrap();
}

#[test]
fn hup_twisted_cubic_222_is_empty() {
    let ideal = twisted_cubic();
    let d = DegreeVector::new(vec![2, 2, 2]).unwrap();
    let cfg = EngineConfig::default();
    let report = run_hup(&ideal, &d, &cfg, 1).unwrap();
    assert_eq!(report.start_count, 4);
    assert_eq!(report.excess_count, 0);
}

#[test]
fn hup_structure_on_twisted_cubic() {
    let ideal = twisted_cubic();
    let h = build_hup(&ideal, &[3, 3, 3], 9, false).unwrap();
    // six scaled-monomial carriers, coefficient forms of degree one: the
    // expanded start and target components are homogeneous cubics
    for t in [0.0, 0.5, 1.0] {
        let blended = h.blend_at(t);
        for p in blended.polys() {
            assert!(p.is_homogeneous());
            assert_eq!(p.degree(), 3);
        }
    }
}

#[test]
fn hup_on_monomial_ideal_keeps_support() {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    let ideal = IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap();
    let h = build_hup(&ideal, &[3, 3, 3], 9, false).unwrap();
    for (s, t) in h
        .start_system()
        .polys()
        .iter()
        .zip(h.target_system().polys())
    {
        let support_s: Vec<_> = s.terms().map(|(e, _)| e.clone()).collect();
        let support_t: Vec<_> = t.terms().map(|(e, _)| e.clone()).collect();
        assert_eq!(support_s, support_t);
    }
}

#[test]
fn hit_structure_and_degenerate_gamma() {
    let ideal = twisted_cubic();
    let vars = ideal.vars().clone();
    let monomials = IdealSpec::parse(&["z^2", "y*z", "y^2"], vars.clone()).unwrap();
    let h = build_hit(&ideal, &monomials, &[3, 3, 3], c(0.6, 0.8), 21, false).unwrap();
    for t in [0.0, 0.5, 1.0] {
        for p in h.blend_at(t).polys() {
            assert!(p.is_homogeneous());
            assert_eq!(p.degree(), 3);
        }
    }

    // With gamma = 1 and a monomial ideal blended against itself, the family
    // is constant in t.
    let mono = IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap();
    let h = build_hit(&mono, &mono.clone(), &[3, 3, 3], c(1.0, 0.0), 21, false).unwrap();
    let a = h.blend_at(0.3);
    let b = h.blend_at(0.9);
    for (pa, pb) in a.polys().iter().zip(b.polys()) {
        let pt: Vec<Complex64> = (0..4).map(|i| c(0.3 + i as f64, 0.1 * i as f64)).collect();
        let va = pa.evaluate(&pt).unwrap();
        let vb = pb.evaluate(&pt).unwrap();
        assert!((va - vb).norm() < 1e-12 * va.norm().max(1.0));
    }
}

#[test]
fn hit_iterations_reach_ten_and_grow_monotonically() {
    let ideal = twisted_cubic();
    let monomials = IdealSpec::parse(&["z^2", "y*z", "y^2"], ideal.vars().clone()).unwrap();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    let report =
        run_hit_iterations(&ideal, &monomials, &d, &cfg, 2, 8, &SolutionSet::default()).unwrap();
    assert_eq!(report.start_count, 7);
    assert_eq!(report.bound_kind, BoundKind::Lower);
    let mut last = 0;
    for it in &report.iterations {
        assert!(it.cumulative >= last);
        last = it.cumulative;
    }
    assert!(report.excess_count <= 10);
    assert!(
        report.excess_count == 10,
        "expected the lower bound to reach 10 within 8 iterations, got {}",
        report.excess_count
    );
    report.validate().unwrap();
}

#[test]
fn hit_preseeded_with_full_solution_set_is_stable() {
    let ideal = twisted_cubic();
    let monomials = IdealSpec::parse(&["z^2", "y*z", "y^2"], ideal.vars().clone()).unwrap();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    let full =
        run_hit_iterations(&ideal, &monomials, &d, &cfg, 2, 8, &SolutionSet::default()).unwrap();
    assert_eq!(full.excess_count, 10);
    let again = run_hit_iterations(&ideal, &monomials, &d, &cfg, 2, 1, &full.solutions).unwrap();
    assert_eq!(again.excess_count, 10);
}

#[test]
fn membership_test_fixtures() {
    let ideal = twisted_cubic();
    let one = c(1.0, 0.0);
    assert!(membership_test(&[one, one, one, one], &ideal, 1e-6).unwrap());

    // an excess point reported by a converged run is far from the variety
    let s1 = [c(-6.1999, 0.0), c(5.9766, 0.0), c(-2.3702, 0.0), one];
    assert!(!membership_test(&s1, &ideal, 1e-6).unwrap());

    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    let mono = IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap();
    assert!(membership_test(&[one, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &mono, 1e-6).unwrap());
}

#[test]
fn dedupe_merges_copies_and_keeps_distinct_points() {
    let a = SolutionPoint {
        point: vec![c(1.0, 0.0), c(0.5, 0.5)],
        residual: 1e-12,
        on_variety: None,
    };
    let mut b = a.clone();
    b.residual = 1e-14;
    let merged = dedupe(&[a.clone(), b], 1e-6);
    assert_eq!(merged.len(), 1);
    assert_eq!(merged.points[0].residual, 1e-14);

    let far = SolutionPoint {
        point: vec![c(1.0, 0.0), c(0.5 + 1e-5, 0.5)],
        residual: 1e-12,
        on_variety: None,
    };
    let kept = dedupe(&[a, far], 1e-6);
    assert_eq!(kept.len(), 2);
}

#[test]
fn hup_paths_all_classify_across_seeds() {
    let ideal = twisted_cubic();
    let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
    let cfg = EngineConfig::default();
    for seed in 1..=5u64 {
        let report = run_hup(&ideal, &d, &cfg, seed).unwrap();
        assert_eq!(report.accounting.step_limit, 0, "seed {seed}");
        assert_eq!(report.accounting.total(), report.tracked_count);
    }
}

#[test]
fn hup_matches_the_closed_formula_on_powers_ideals() {
    use excesskit_core::{excess_powers, PowersIdealSpec, SparsePolynomial};
    let cases: &[(&[u32], &[u32])] = &[
        (&[1, 1], &[2, 2, 2]),
        (&[2, 1], &[2, 2, 2]),
        (&[2, 2], &[3, 3, 3]),
        (&[2], &[2, 2]),
    ];
    let cfg = EngineConfig::default();
    for &(p, d) in cases {
        let n = d.len();
        let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        let vars = VariableSet::new(names).unwrap();
        let gens: Vec<SparsePolynomial> = p
            .iter()
            .enumerate()
            .map(|(i, &power)| {
                let mut exps = vec![0u32; n + 1];
                exps[i + 1] = power;
                SparsePolynomial::monomial(n + 1, exps, c(1.0, 0.0)).unwrap()
            })
            .collect();
        let ideal = IdealSpec::new(gens, vars).unwrap();
        let degrees = DegreeVector::new(d.to_vec()).unwrap();
        let want = excess_powers(&PowersIdealSpec::new(p.to_vec()).unwrap(), &degrees)
            .unwrap()
            .excess;
        let report = run_hup(&ideal, &degrees, &cfg, 2).unwrap();
        assert_eq!(
            excesskit_core::BigInt::from(report.excess_count),
            want,
            "p = {p:?}, d = {d:?}"
        );
    }
}

#[test]
fn hup_determinism_for_fixed_seed() {
    let ideal = twisted_cubic();
    let d = DegreeVector::new(vec![2, 2, 2]).unwrap();
    let cfg = EngineConfig::default();
    let a = run_hup(&ideal, &d, &cfg, 77).unwrap();
    let b = run_hup(&ideal, &d, &cfg, 77).unwrap();
    assert_eq!(a, b);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
