//! Counting isolated solutions of square homogeneous systems away from the
//! variety of a given ideal.
//!
//! Three routes to the same number, cross-checkable against each other:
//!
//! * [`formula`] — a closed form for ideals generated by powers of variables,
//!   built from elementary and complete homogeneous symmetric functions.
//! * [`polytope`] — exact mixed volumes of the Newton polytopes of the
//!   system, which give the count for any monomial ideal.
//! * [`homotopy`] — numerical path tracking for arbitrary ideals: an
//!   endpoint-continuation run whose membership split is exact, and an
//!   iterated lower-bound run.
//!
//! [`algebra`] supplies the sparse complex polynomial substrate shared by all
//! three.

pub mod algebra;
pub mod formula;
pub mod homotopy;
pub mod polytope;

// the arithmetic types appearing in public signatures
pub use num_bigint::BigInt;
pub use num_complex::Complex64;
pub use num_rational::BigRational;

pub use algebra::{
    jacobian, parse_polynomial, random_form, AlgebraError, ExponentVector, IdealSpec,
    PolynomialSystem, SparsePolynomial, VariableSet,
};
pub use formula::{
    complete_homogeneous, correction_term, elementary_symmetric, excess_powers, excess_principal,
    simplex_integral_check, DegreeVector, ExcessResult, FormulaError, MethodTag, PowersIdealSpec,
};
pub use homotopy::{
    build_hit, build_hup, dedupe, membership_test, newton_refine, normalize_point,
    projective_distance, run_hit_iterations, run_hup, solve_monomial_bsystem, total_degree_solve,
    track_path, AffinePatch, BoundKind, EngineConfig, EngineError, ExcessRunReport, HomotopyKind,
    HomotopySystem, PathStatus, SolutionPoint, SolutionSet, SolveBatch, TrackOutcome,
    TrackerConfig,
};
pub use polytope::{
    convex_hull, enumerate_vertices, excess_by_mixed_volume, minkowski_sum, mixed_volume,
    multilinear_volume_coefficient, newton_polytope_of_bsystem, scaled_simplex, slice_simplex,
    volume, HalfSpace, LatticePolytope, PolytopeError, SlicedSimplex,
};
