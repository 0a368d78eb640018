//! Exact lattice-polytope geometry: convex hulls, Minkowski sums, volumes and
//! mixed volumes, plus the Newton polytopes of square systems built from a
//! monomial ideal. Excess counts of monomial ideals reduce to mixed volumes
//! of those Newton polytopes.
//!
//! All predicates are exact. Coordinates and determinants run on checked
//! 128-bit integers (overflow is reported, never wrapped); rational data uses
//! arbitrary precision.

mod hull;

use crate::algebra::IdealSpec;
use crate::formula::DegreeVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

pub const MAX_DIM: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum PolytopeError {
    #[error("no points given")]
    EmptyInput,
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ambient dimension {0} exceeds supported maximum {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("arithmetic overflow in exact geometry; inputs too large")]
    Overflow,
    #[error("generator {index} is not a monomial")]
    NonMonomialGenerator { index: usize },
    #[error("system degree {d} is smaller than generator degree {p}")]
    DegreeTooSmall { d: u32, p: u32 },
    #[error("expected {expected} polytopes in dimension {expected}, got {got}")]
    FamilySizeMismatch { expected: usize, got: usize },
    #[error("mixed volume was not a non-negative integer: {0}")]
    NotInteger(String),
    #[error("{0} requires a full-dimensional polytope")]
    NotFullDimensional(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal hull error: {0}")]
    Internal(String),
}

/// An integer-vertex polytope in V-representation; the stored vertex list is
/// hull-reduced (every vertex extreme), deduplicated and lexicographically
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    ambient_dim: usize,
    vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Dilation by a non-negative integer factor.
    pub fn scale(&self, k: i64) -> Result<LatticePolytope, PolytopeError> {
        if k < 0 {
            return Err(PolytopeError::Invalid("negative scale factor".into()));
        }
        if k == 0 {
            return Ok(LatticePolytope {
                ambient_dim: self.ambient_dim,
                vertices: vec![vec![0; self.ambient_dim]],
            });
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&x| x.checked_mul(k).ok_or(PolytopeError::Overflow))
                    .collect()
            })
            .collect::<Result<Vec<Vec<i64>>, _>>()?;
        let mut vertices = vertices;
        vertices.sort_unstable();
        Ok(LatticePolytope {
            ambient_dim: self.ambient_dim,
            vertices,
        })
    }

    /// One vertex per line as space-separated integers.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Deduplicated outward supporting hyperplanes (full-dimensional only).
    pub fn supporting_hyperplanes(&self) -> Result<Vec<HalfSpace>, PolytopeError> {
        let data = self.hull_data()?;
        if data.affine_dim < self.ambient_dim {
            return Err(PolytopeError::NotFullDimensional("supporting_hyperplanes"));
        }
        Ok(data
            .planes
            .iter()
            .map(|(n, o)| HalfSpace {
                normal: n
                    .iter()
                    .map(|&x| BigRational::from(BigInt::from(x)))
                    .collect(),
                offset: BigRational::from(BigInt::from(*o)),
            })
            .collect())
    }

    /// Exact membership for a rational point (full-dimensional only).
    pub fn contains(&self, point: &[BigRational]) -> Result<bool, PolytopeError> {
        if point.len() != self.ambient_dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.ambient_dim,
                got: point.len(),
            });
        }
        let planes = self.supporting_hyperplanes()?;
        Ok(planes.iter().all(|h| h.contains(point)))
    }

    fn int_vertices(&self) -> Vec<Vec<hull::Int>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(|&x| x as hull::Int).collect())
            .collect()
    }

    fn hull_data(&self) -> Result<hull::HullData, PolytopeError> {
        hull::compute(&self.int_vertices(), self.ambient_dim)
    }
}

/// A closed rational halfspace `normal . u <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: Vec<BigRational>,
    pub offset: BigRational,
}

impl HalfSpace {
    pub fn new(normal: Vec<BigRational>, offset: BigRational) -> Result<Self, PolytopeError> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(PolytopeError::Invalid("zero halfspace normal".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn contains(&self, point: &[BigRational]) -> bool {
        let lhs: BigRational = self.normal.iter().zip(point).map(|(a, b)| a * b).sum();
        lhs <= self.offset
    }

    pub fn on_boundary(&self, point: &[BigRational]) -> bool {
        let lhs: BigRational = self.normal.iter().zip(point).map(|(a, b)| a * b).sum();
        lhs == self.offset
    }

    /// Primitive integer form, unique per oriented halfspace; handy for
    /// comparing hyperplane sets.
    pub fn canonical_key(&self) -> (Vec<BigInt>, BigInt) {
        let mut lcm = BigInt::one();
        for r in self.normal.iter().chain(std::iter::once(&self.offset)) {
            let d = r.denom();
            let g = num_bigint_gcd(&lcm, d);
            lcm = &lcm / &g * d;
        }
        let mut ints: Vec<BigInt> = self
            .normal
            .iter()
            .map(|r| (r * BigRational::from(lcm.clone())).to_integer())
            .collect();
        let mut off = (&self.offset * BigRational::from(lcm.clone())).to_integer();
        let mut g = off.clone();
        if g.is_negative() {
            g = -g;
        }
        for x in &ints {
            let ax = if x.is_negative() { -x } else { x.clone() };
            g = num_bigint_gcd(&g, &ax);
        }
        if g > BigInt::one() {
            for x in ints.iter_mut() {
                *x = &*x / &g;
            }
            off = &off / &g;
        }
        (ints, off)
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.normal.iter().map(|x| x.to_string()).collect();
        write!(f, "{} <= {}", parts.join(" "), self.offset)
    }
}

fn num_bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = if a.is_negative() { -a } else { a.clone() };
    let mut b = if b.is_negative() { -b } else { b.clone() };
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

/// A scaled simplex sliced by the hyperplane `sum u_j / p_j = Lambda`.
///
/// `s0` holds the origin side, `s1` the far side; each is exactly the n+2
/// halfspaces of the slicing construction, and `s1` equals the scaled
/// Minkowski sum of the Newton polytopes of the matching powers-ideal
/// system.
#[derive(Debug, Clone)]
pub struct SlicedSimplex {
    pub simplex: LatticePolytope,
    pub s0: Vec<HalfSpace>,
    pub s1: Vec<HalfSpace>,
    pub lambda: Vec<u32>,
    pub p: Vec<u32>,
    pub d: Vec<u32>,
}

impl SlicedSimplex {
    pub fn s0_vertices(&self) -> Result<Vec<Vec<BigRational>>, PolytopeError> {
        enumerate_vertices(&self.s0, self.d.len())
    }

    pub fn s1_vertices(&self) -> Result<Vec<Vec<BigRational>>, PolytopeError> {
        enumerate_vertices(&self.s1, self.d.len())
    }

    pub fn s0_volume(&self) -> Result<BigRational, PolytopeError> {
        volume_of_rational_points(&self.s0_vertices()?, self.d.len())
    }

    pub fn s1_volume(&self) -> Result<BigRational, PolytopeError> {
        volume_of_rational_points(&self.s1_vertices()?, self.d.len())
    }

    /// H-representation dump, one halfspace per line, s0 block then s1 block.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for h in self.s0.iter().chain(&self.s1) {
            out.push_str(&h.to_string());
            out.push('\n');
        }
        out
    }
}

fn check_points(points: &[Vec<i64>], dim: usize) -> Result<(), PolytopeError> {
    if dim == 0 || dim > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(dim));
    }
    if points.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    for p in points {
        if p.len() != dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Minimal vertex set whose hull contains all input points.
pub fn convex_hull(points: &[Vec<i64>], dim: usize) -> Result<LatticePolytope, PolytopeError> {
    check_points(points, dim)?;
    let mut dedup: Vec<Vec<i64>> = points.to_vec();
    dedup.sort_unstable();
    dedup.dedup();
    let int_points: Vec<Vec<hull::Int>> = dedup
        .iter()
        .map(|p| p.iter().map(|&x| x as hull::Int).collect())
        .collect();
    let data = hull::compute(&int_points, dim)?;
    let vertices: Vec<Vec<i64>> = data.vertices.iter().map(|&i| dedup[i].clone()).collect();
    Ok(LatticePolytope {
        ambient_dim: dim,
        vertices,
    })
}

/// Hull of all pairwise vertex sums.
pub fn minkowski_sum(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Result<LatticePolytope, PolytopeError> {
    if p.ambient_dim != q.ambient_dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: p.ambient_dim,
            got: q.ambient_dim,
        });
    }
    let mut sums = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            let s: Result<Vec<i64>, _> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| x.checked_add(y).ok_or(PolytopeError::Overflow))
                .collect();
            sums.push(s?);
        }
    }
    convex_hull(&sums, p.ambient_dim)
}

/// Exact Euclidean n-volume; zero for lower-dimensional polytopes.
pub fn volume(p: &LatticePolytope) -> Result<BigRational, PolytopeError> {
    let data = p.hull_data()?;
    let numerator = hull::volume_numerator(&p.int_vertices(), &data, p.ambient_dim)?;
    let mut fact = BigInt::one();
    for f in 2..=p.ambient_dim {
        fact *= f as i64;
    }
    Ok(BigRational::new(BigInt::from(numerator), fact))
}

/// Exact volume of the hull of rational points, by clearing denominators.
pub fn volume_of_rational_points(
    points: &[Vec<BigRational>],
    dim: usize,
) -> Result<BigRational, PolytopeError> {
    if points.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    let mut lcm = BigInt::one();
    for p in points {
        for c in p {
            let d = c.denom();
            let g = num_bigint_gcd(&lcm, d);
            lcm = &lcm / &g * d;
        }
    }
    let scale = BigRational::from(lcm.clone());
    let mut scaled: Vec<Vec<hull::Int>> = Vec::with_capacity(points.len());
    for p in points {
        let row: Result<Vec<hull::Int>, _> = p
            .iter()
            .map(|c| {
                (c * &scale)
                    .to_integer()
                    .to_i128()
                    .ok_or(PolytopeError::Overflow)
            })
            .collect();
        scaled.push(row?);
    }
    scaled.sort_unstable();
    scaled.dedup();
    let data = hull::compute(&scaled, dim)?;
    let numerator = hull::volume_numerator(&scaled, &data, dim)?;
    let mut denom = BigInt::one();
    for f in 2..=dim {
        denom *= f as i64;
    }
    for _ in 0..dim {
        denom *= &lcm;
    }
    Ok(BigRational::new(BigInt::from(numerator), denom))
}

fn sum_of(polys: &[&LatticePolytope]) -> Result<LatticePolytope, PolytopeError> {
    let mut acc = polys[0].clone();
    for p in &polys[1..] {
        acc = minkowski_sum(&acc, p)?;
    }
    Ok(acc)
}

/// Mixed volume normalized as the coefficient of `l_1 .. l_n` in
/// `Vol(l_1 P_1 + .. + l_n P_n)`, computed by inclusion-exclusion over the
/// 2^n - 1 nonempty subset sums. With this normalization n identical copies
/// of P give `n! Vol(P)`, and the result is a non-negative integer for
/// lattice polytopes.
pub fn mixed_volume(polys: &[LatticePolytope]) -> Result<u64, PolytopeError> {
    let n = polys.len();
    if n == 0 || n > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(n));
    }
    for p in polys {
        if p.ambient_dim != n {
            return Err(PolytopeError::FamilySizeMismatch {
                expected: n,
                got: p.ambient_dim,
            });
        }
    }
    let masks: Vec<u32> = (1..(1u32 << n)).collect();
    // Subset volumes are independent; results merge in subset order.
    let volumes: Result<Vec<BigRational>, PolytopeError> = masks
        .par_iter()
        .map(|&mask| {
            let members: Vec<&LatticePolytope> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &polys[i])
                .collect();
            volume(&sum_of(&members)?)
        })
        .collect();
    let volumes = volumes?;
    let mut total = BigRational::zero();
    for (&mask, vol) in masks.iter().zip(&volumes) {
        let size = mask.count_ones() as usize;
        if (n - size).is_multiple_of(2) {
            total += vol;
        } else {
            total -= vol;
        }
    }
    rational_to_count(&total)
}

fn rational_to_count(value: &BigRational) -> Result<u64, PolytopeError> {
    if !value.is_integer() || value.is_negative() {
        return Err(PolytopeError::NotInteger(value.to_string()));
    }
    value.to_integer().to_u64().ok_or(PolytopeError::Overflow)
}

/// Newton polytope of a generic degree-`d_i` member of the square system
/// built on a monomial ideal: the hull of each dehomogenized generator
/// exponent translated by the scaled standard simplex `(d_i - p_j) * simplex`.
pub fn newton_polytope_of_bsystem(
    ideal: &IdealSpec,
    d_i: u32,
) -> Result<LatticePolytope, PolytopeError> {
    let n = ideal.vars().n();
    if n == 0 || n > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(n));
    }
    let mut points: Vec<Vec<i64>> = Vec::new();
    for (index, g) in ideal.generators().iter().enumerate() {
        if g.num_terms() != 1 {
            return Err(PolytopeError::NonMonomialGenerator { index });
        }
        let (e, _) = g.terms().next().unwrap();
        let p_j = e.total_degree();
        if d_i < p_j {
            return Err(PolytopeError::DegreeTooSmall { d: d_i, p: p_j });
        }
        let base = e.drop_first();
        let c = (d_i - p_j) as i64;
        points.push(base.clone());
        if c > 0 {
            for t in 0..n {
                let mut shifted = base.clone();
                shifted[t] += c;
                points.push(shifted);
            }
        }
    }
    convex_hull(&points, n)
}

/// Excess count of a monomial ideal as the mixed volume of the system's
/// Newton polytopes. Non-monomial generators are rejected; monomialize first
/// (the result is then only an upper bound for the original ideal).
pub fn excess_by_mixed_volume(ideal: &IdealSpec, d: &DegreeVector) -> Result<u64, PolytopeError> {
    let n = ideal.vars().n();
    if d.n() != n {
        return Err(PolytopeError::FamilySizeMismatch {
            expected: n,
            got: d.n(),
        });
    }
    let max_p = ideal.degrees().into_iter().max().unwrap_or(0);
    if d.min() < max_p {
        return Err(PolytopeError::DegreeTooSmall {
            d: d.min(),
            p: max_p,
        });
    }
    let polytopes: Vec<LatticePolytope> = d
        .degrees()
        .iter()
        .map(|&di| newton_polytope_of_bsystem(ideal, di))
        .collect::<Result<_, _>>()?;
    mixed_volume(&polytopes)
}

/// Builds the sliced scaled simplex for a powers ideal: `S` is the simplex
/// with vertices `0, D e_i` for `D = sum lambda_i d_i`, split by
/// `sum_{j<=k} u_j / p_j = Lambda` into the origin piece `s0` and the far
/// piece `s1`.
pub fn slice_simplex(p: &[u32], d: &[u32], lambda: &[u32]) -> Result<SlicedSimplex, PolytopeError> {
    let k = p.len();
    let n = d.len();
    if n == 0 || n > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(n));
    }
    if k == 0 || k > n {
        return Err(PolytopeError::Invalid(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if lambda.len() != n || lambda.contains(&0) {
        return Err(PolytopeError::Invalid(
            "lambda must have n positive entries".into(),
        ));
    }
    if p.contains(&0) {
        return Err(PolytopeError::Invalid("powers must be positive".into()));
    }
    let max_p = *p.iter().max().unwrap();
    let min_d = *d.iter().min().unwrap();
    if min_d < max_p {
        return Err(PolytopeError::DegreeTooSmall { d: min_d, p: max_p });
    }

    let big_d: i64 = d
        .iter()
        .zip(lambda)
        .map(|(&di, &li)| di as i64 * li as i64)
        .sum();
    let cap_lambda: i64 = lambda.iter().map(|&l| l as i64).sum();

    let mut simplex_points = vec![vec![0i64; n]];
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = big_d;
        simplex_points.push(v);
    }
    let simplex = convex_hull(&simplex_points, n)?;

    let rat = |v: i64| BigRational::from(BigInt::from(v));
    let mut s0 = Vec::with_capacity(n + 2);
    let mut s1 = Vec::with_capacity(n + 2);
    for i in 0..n {
        let mut neg = vec![BigRational::zero(); n];
        neg[i] = -BigRational::one();
        s0.push(HalfSpace::new(neg.clone(), BigRational::zero())?);
        s1.push(HalfSpace::new(neg, BigRational::zero())?);
    }
    let ones = vec![BigRational::one(); n];
    s0.push(HalfSpace::new(ones.clone(), rat(big_d))?);
    s1.push(HalfSpace::new(ones, rat(big_d))?);
    let mut hp = vec![BigRational::zero(); n];
    for j in 0..k {
        hp[j] = BigRational::new(BigInt::one(), BigInt::from(p[j]));
    }
    s0.push(HalfSpace::new(hp.clone(), rat(cap_lambda))?);
    let hp_neg: Vec<BigRational> = hp.iter().map(|x| -x).collect();
    s1.push(HalfSpace::new(hp_neg, -rat(cap_lambda))?);

    Ok(SlicedSimplex {
        simplex,
        s0,
        s1,
        lambda: lambda.to_vec(),
        p: p.to_vec(),
        d: d.to_vec(),
    })
}

/// All vertices of a bounded H-representation: basic solutions of every
/// dim-subset of boundary hyperplanes that satisfy all constraints.
pub fn enumerate_vertices(
    halfspaces: &[HalfSpace],
    dim: usize,
) -> Result<Vec<Vec<BigRational>>, PolytopeError> {
    let m = halfspaces.len();
    if m < dim {
        return Err(PolytopeError::Invalid(
            "fewer halfspaces than the dimension".into(),
        ));
    }
    let mut found: Vec<Vec<BigRational>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let rows: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&i| halfspaces[i].normal.clone())
            .collect();
        let rhs: Vec<BigRational> = subset
            .iter()
            .map(|&i| halfspaces[i].offset.clone())
            .collect();
        if let Some(point) = solve_rational(rows, rhs) {
            if halfspaces.iter().all(|h| h.contains(&point)) && !found.contains(&point) {
                found.push(point);
            }
        }
        // next dim-combination of 0..m
        let mut i = dim;
        loop {
            if i == 0 {
                found.sort();
                return Ok(found);
            }
            i -= 1;
            if subset[i] != i + m - dim {
                subset[i] += 1;
                for j in i + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact dense solve; returns None when the matrix is singular.
#[allow(clippy::needless_range_loop)]
fn solve_rational(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pv = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let v = &a[r][c] - &factor * &a[col][c];
                a[r][c] = v;
            }
            let v = &b[r] - &factor * &b[col];
            b[r] = v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Independent oracle for `mixed_volume`: evaluates the volume of the scaled
/// Minkowski sum on an interpolation grid, reconstructs the volume polynomial
/// (homogeneous of degree n, so the grid with the last weight pinned to 1 is
/// unisolvent), and reads off the coefficient of `l_1 .. l_n`.
pub fn multilinear_volume_coefficient(polys: &[LatticePolytope]) -> Result<u64, PolytopeError> {
    let n = polys.len();
    if n == 0 || n > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(n));
    }
    for p in polys {
        if p.ambient_dim != n {
            return Err(PolytopeError::FamilySizeMismatch {
                expected: n,
                got: p.ambient_dim,
            });
        }
    }
    if n == 1 {
        return rational_to_count(&volume(&polys[0])?);
    }
    let grid = interpolation_grid(n)?;
    let volumes: Result<Vec<BigRational>, PolytopeError> = grid
        .nodes
        .par_iter()
        .map(|node| {
            let mut scaled: Vec<LatticePolytope> = Vec::with_capacity(n);
            for (i, poly) in polys.iter().enumerate() {
                let factor = if i + 1 == n { 1 } else { node[i] };
                scaled.push(poly.scale(factor)?);
            }
            let refs: Vec<&LatticePolytope> = scaled.iter().collect();
            volume(&sum_of(&refs)?)
        })
        .collect();
    let volumes = volumes?;
    let mut coeff = BigRational::zero();
    for (w, v) in grid.weights.iter().zip(&volumes) {
        coeff += w * v;
    }
    rational_to_count(&coeff)
}

struct InterpolationGrid {
    /// Weight values for the first n-1 scale factors; the last is pinned to 1.
    nodes: Vec<Vec<i64>>,
    /// Extraction weights for the coefficient of the multilinear monomial.
    weights: Vec<BigRational>,
}

fn grid_cache() -> &'static Mutex<HashMap<usize, std::sync::Arc<InterpolationGrid>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<InterpolationGrid>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn interpolation_grid(n: usize) -> Result<std::sync::Arc<InterpolationGrid>, PolytopeError> {
    if let Some(grid) = grid_cache().lock().unwrap().get(&n) {
        return Ok(grid.clone());
    }
    let m = n - 1;
    // Monomial exponents of total degree <= n in m variables; nodes are the
    // matching principal lattice shifted to keep every weight positive.
    let mut exponents: Vec<Vec<u32>> = Vec::new();
    let mut current = vec![0u32; m];
    collect_exponents(&mut current, 0, n as u32, &mut exponents);
    let nodes: Vec<Vec<i64>> = exponents
        .iter()
        .map(|e| e.iter().map(|&x| x as i64 + 1).collect())
        .collect();
    let dim = exponents.len();
    let mut matrix: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); dim]; dim];
    for (r, node) in nodes.iter().enumerate() {
        for (c, exp) in exponents.iter().enumerate() {
            let mut value = BigInt::one();
            for (x, &e) in node.iter().zip(exp) {
                for _ in 0..e {
                    value *= *x;
                }
            }
            matrix[r][c] = BigRational::from(value);
        }
    }
    // Solve matrix^T w = e_target for the all-ones exponent row.
    let target_index = exponents
        .iter()
        .position(|e| e.iter().all(|&x| x == 1))
        .expect("multilinear exponent present");
    let mut transpose = vec![vec![BigRational::zero(); dim]; dim];
    for r in 0..dim {
        for c in 0..dim {
            transpose[r][c] = matrix[c][r].clone();
        }
    }
    let mut rhs = vec![BigRational::zero(); dim];
    rhs[target_index] = BigRational::one();
    let weights = solve_rational(transpose, rhs)
        .ok_or_else(|| PolytopeError::Internal("interpolation grid was singular".into()))?;
    let grid = std::sync::Arc::new(InterpolationGrid { nodes, weights });
    grid_cache().lock().unwrap().insert(n, grid.clone());
    Ok(grid)
}

fn collect_exponents(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for e in 0..=budget {
        current[pos] = e;
        collect_exponents(current, pos + 1, budget - e, out);
    }
    current[pos] = 0;
}

/// Standard simplex scaled by `d`, i.e. the Newton polytope of a dense
/// degree-`d` form after dehomogenization.
pub fn scaled_simplex(d: u32, n: usize) -> Result<LatticePolytope, PolytopeError> {
    let mut points = vec![vec![0i64; n]];
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = d as i64;
        points.push(v);
    }
    convex_hull(&points, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VariableSet;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn hull_reduces_to_simplex_vertices() {
        let points = vec![
            vec![0, 0, 0],
            vec![2, 0, 0],
            vec![0, 2, 0],
            vec![0, 0, 2],
            // midpoints
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
        ];
        let p = convex_hull(&points, 3).unwrap();
        assert_eq!(p.num_vertices(), 4);
        assert!(p.contains(&[rat(1, 2), rat(1, 2), rat(1, 2)]).unwrap());
        assert!(!p.contains(&[rat(2, 1), rat(2, 1), rat(0, 1)]).unwrap());
    }

    #[test]
    fn hull_of_single_point() {
        let p = convex_hull(&[vec![2, 3]], 2).unwrap();
        assert_eq!(p.vertices(), &[vec![2, 3]]);
    }

    #[test]
    fn powers_ideal_newton_polytope_has_six_vertices() {
        // Ideal (x1^p1, x2^p2) in four homogeneous variables: the Newton
        // polytope of a degree-d member is the hull of the eight translates
        // of the two generator exponents, of which six are vertices.
        let p1 = 2i64;
        let p2 = 3i64;
        let d = 4i64;
        let pts = vec![
            vec![p1, 0, 0],
            vec![d, 0, 0],
            vec![p1, d - p1, 0],
            vec![p1, 0, d - p1],
            vec![0, p2, 0],
            vec![0, d, 0],
            vec![d - p2, p2, 0],
            vec![0, p2, d - p2],
        ];
        let hull = convex_hull(&pts, 3).unwrap();
        assert_eq!(hull.num_vertices(), 6);
        let mut expected = [
            vec![p1, 0, 0],
            vec![d, 0, 0],
            vec![0, d, 0],
            vec![0, p2, 0],
            vec![p1, 0, d - p1],
            vec![0, p2, d - p2],
        ];
        expected.sort_unstable();
        assert_eq!(hull.vertices(), &expected[..]);

        let vars = VariableSet::new(vec!["x0", "x1", "x2", "x3"]).unwrap();
        let ideal = IdealSpec::parse(&["x1^2", "x2^3"], vars).unwrap();
        let newton = newton_polytope_of_bsystem(&ideal, d as u32).unwrap();
        assert_eq!(newton, hull);
    }

    #[test]
    fn minkowski_identity_and_simplex_scaling() {
        let p = scaled_simplex(2, 3).unwrap();
        let origin = convex_hull(&[vec![0, 0, 0]], 3).unwrap();
        assert_eq!(minkowski_sum(&p, &origin).unwrap(), p);

        let q = scaled_simplex(3, 3).unwrap();
        let sum = minkowski_sum(&p, &q).unwrap();
        assert_eq!(sum, scaled_simplex(5, 3).unwrap());
    }

    #[test]
    fn minkowski_sum_of_powers_polytopes_has_five_hyperplanes() {
        let vars = VariableSet::new(vec!["x0", "x1", "x2", "x3"]).unwrap();
        let ideal = IdealSpec::parse(&["x1^2", "x2^3"], vars).unwrap();
        let d = [3u32, 4, 5];
        let lambda = [1i64, 2, 1];
        let mut sum: Option<LatticePolytope> = None;
        for (di, li) in d.iter().zip(lambda) {
            let scaled = newton_polytope_of_bsystem(&ideal, *di)
                .unwrap()
                .scale(li)
                .unwrap();
            sum = Some(match sum {
                None => scaled,
                Some(acc) => minkowski_sum(&acc, &scaled).unwrap(),
            });
        }
        let sum = sum.unwrap();
        let planes = sum.supporting_hyperplanes().unwrap();
        assert_eq!(planes.len(), 5);

        let big_d: i64 = d.iter().zip(lambda).map(|(&di, li)| di as i64 * li).sum();
        let cap: i64 = lambda.iter().sum();
        let mut expected: Vec<(Vec<BigInt>, BigInt)> = vec![
            (vec![(-1).into(), 0.into(), 0.into()], 0.into()),
            (vec![0.into(), (-1).into(), 0.into()], 0.into()),
            (vec![0.into(), 0.into(), (-1).into()], 0.into()),
            (vec![1.into(), 1.into(), 1.into()], big_d.into()),
        ];
        // u1/2 + u2/3 >= cap, as an integer-normalized halfspace
        expected.push((
            vec![(-3).into(), (-2).into(), 0.into()],
            BigInt::from(-6 * cap),
        ));
        let mut got: Vec<(Vec<BigInt>, BigInt)> =
            planes.iter().map(|h| h.canonical_key()).collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn simplex_and_degenerate_volumes() {
        for n in 1..=4usize {
            for d in 1..=4u32 {
                let v = volume(&scaled_simplex(d, n).unwrap()).unwrap();
                let mut fact = BigInt::one();
                for f in 2..=n {
                    fact *= f as i64;
                }
                let mut num = BigInt::one();
                for _ in 0..n {
                    num *= d as i64;
                }
                assert_eq!(v, BigRational::new(num, fact));
            }
        }
        let segment = convex_hull(&[vec![0, 0], vec![3, 3]], 2).unwrap();
        assert_eq!(volume(&segment).unwrap(), BigRational::zero());

        let mut cube = Vec::new();
        for x in 0..2i64 {
            for y in 0..2i64 {
                for z in 0..2i64 {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        let cube = convex_hull(&cube, 3).unwrap();
        assert_eq!(volume(&cube).unwrap(), BigRational::one());
    }

    #[test]
    fn mixed_volume_of_simplices_is_bezout() {
        let p = scaled_simplex(3, 3).unwrap();
        assert_eq!(mixed_volume(&[p.clone(), p.clone(), p]).unwrap(), 27);
        for d in [[1u32, 2, 3], [2, 3, 4], [5, 1, 2]] {
            let polys: Vec<LatticePolytope> =
                d.iter().map(|&di| scaled_simplex(di, 3).unwrap()).collect();
            let want: u64 = d.iter().map(|&x| x as u64).product();
            assert_eq!(mixed_volume(&polys).unwrap(), want);
        }
    }

    #[test]
    fn mixed_volume_is_symmetric_and_diagonal_matches_volume() {
        let a = scaled_simplex(2, 2).unwrap();
        let b = convex_hull(&[vec![0, 0], vec![1, 0], vec![1, 2], vec![0, 1]], 2).unwrap();
        let ab = mixed_volume(&[a.clone(), b.clone()]).unwrap();
        let ba = mixed_volume(&[b.clone(), a.clone()]).unwrap();
        assert_eq!(ab, ba);
        let bb = mixed_volume(&[b.clone(), b.clone()]).unwrap();
        let vol_b = volume(&b).unwrap();
        assert_eq!(BigRational::from(BigInt::from(bb)), vol_b * rat(2, 1));
    }

    #[test]
    fn monomialized_twisted_cubic_fixture() {
        let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
        let ideal = IdealSpec::parse(&["z^2", "y*w", "y*z", "x*w", "y^2", "x*z"], vars).unwrap();
        let d = DegreeVector::new(vec![2, 2, 2]).unwrap();
        assert_eq!(excess_by_mixed_volume(&ideal, &d).unwrap(), 4);
    }

    #[test]
    fn principal_ideal_mixed_volume_matches_product() {
        let vars = VariableSet::new(vec!["x0", "x1", "x2", "x3"]).unwrap();
        let ideal = IdealSpec::parse(&["x1"], vars).unwrap();
        for d in 1..=4u32 {
            let dv = DegreeVector::new(vec![d; 3]).unwrap();
            let want = ((d - 1) as u64).pow(3);
            assert_eq!(excess_by_mixed_volume(&ideal, &dv).unwrap(), want);
        }
    }

    #[test]
    fn trivial_ideal_gives_bezout() {
        let vars = VariableSet::new(vec!["x0", "x1"]).unwrap();
        let ideal = IdealSpec::parse(&["1"], vars).unwrap();
        let d = DegreeVector::new(vec![4]).unwrap();
        assert_eq!(excess_by_mixed_volume(&ideal, &d).unwrap(), 4);
    }

    #[test]
    fn non_monomial_generators_are_rejected() {
        let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
        let ideal = IdealSpec::parse(&["z^2 - y*w"], vars).unwrap();
        let d = DegreeVector::new(vec![3, 3, 3]).unwrap();
        assert!(matches!(
            excess_by_mixed_volume(&ideal, &d),
            Err(PolytopeError::NonMonomialGenerator { index: 0 })
        ));
    }

    #[test]
    fn slice_simplex_univariate_edge_case() {
        let s = slice_simplex(&[1], &[1], &[1]).unwrap();
        // S = [0, 1]; the slicing hyperplane is u >= 1, so the far piece is
        // the single point {1} and the origin piece is all of S.
        let s1 = s.s1_vertices().unwrap();
        assert_eq!(s1, vec![vec![rat(1, 1)]]);
        let s0 = s.s0_vertices().unwrap();
        assert_eq!(s0, vec![vec![rat(0, 1)], vec![rat(1, 1)]]);
        assert_eq!(s.s1_volume().unwrap(), BigRational::zero());
        assert_eq!(s.s0_volume().unwrap(), BigRational::one());
    }

    #[test]
    fn slice_simplex_matches_minkowski_sum() {
        let vars = VariableSet::new(vec!["x0", "x1", "x2", "x3"]).unwrap();
        let p = [2u32, 2];
        let d = [3u32, 3, 3];
        let lambda = [1u32, 1, 1];
        let ideal = IdealSpec::parse(&["x1^2", "x2^2"], vars).unwrap();
        let mut sum: Option<LatticePolytope> = None;
        for (&di, &li) in d.iter().zip(&lambda) {
            let scaled = newton_polytope_of_bsystem(&ideal, di)
                .unwrap()
                .scale(li as i64)
                .unwrap();
            sum = Some(match sum {
                None => scaled,
                Some(acc) => minkowski_sum(&acc, &scaled).unwrap(),
            });
        }
        let sum = sum.unwrap();
        let sliced = slice_simplex(&p, &d, &lambda).unwrap();
        let mut hull_vertices: Vec<Vec<BigRational>> = sum
            .vertices()
            .iter()
            .map(|v| v.iter().map(|&x| rat(x, 1)).collect())
            .collect();
        hull_vertices.sort();
        assert_eq!(hull_vertices, sliced.s1_vertices().unwrap());
    }

    #[test]
    fn slice_simplex_volumes_partition_the_simplex() {
        let cases: &[(&[u32], &[u32], &[u32])] = &[
            (&[2, 2], &[3, 3, 3], &[1, 1, 1]),
            (&[2, 3], &[3, 4, 5], &[2, 1, 3]),
            (&[2], &[2, 3], &[1, 2]),
        ];
        for &(p, d, lambda) in cases {
            let s = slice_simplex(p, d, lambda).unwrap();
            let total = s.s0_volume().unwrap() + s.s1_volume().unwrap();
            let big_d: i64 = d
                .iter()
                .zip(lambda)
                .map(|(&di, &li)| di as i64 * li as i64)
                .sum();
            let n = d.len();
            let mut fact = BigInt::one();
            for f in 2..=n {
                fact *= f as i64;
            }
            let mut num = BigInt::one();
            for _ in 0..n {
                num *= big_d;
            }
            assert_eq!(total, BigRational::new(num, fact), "case {p:?} {d:?}");
        }
    }

    #[test]
    fn multilinear_coefficient_agrees_with_mixed_volume() {
        let a = scaled_simplex(3, 3).unwrap();
        assert_eq!(
            multilinear_volume_coefficient(&[a.clone(), a.clone(), a.clone()]).unwrap(),
            27
        );

        let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
        let ideal = IdealSpec::parse(&["z^2", "y*w", "y*z", "x*w", "y^2", "x*z"], vars).unwrap();
        let polys: Vec<LatticePolytope> = (0..3)
            .map(|_| newton_polytope_of_bsystem(&ideal, 2).unwrap())
            .collect();
        assert_eq!(multilinear_volume_coefficient(&polys).unwrap(), 4);
        assert_eq!(mixed_volume(&polys).unwrap(), 4);
    }

    #[test]
    fn debug_dumps_are_line_oriented() {
        let p = scaled_simplex(1, 2).unwrap();
        let dump = p.debug_dump();
        assert_eq!(dump, "0 0\n0 1\n1 0\n");
        let s = slice_simplex(&[1], &[2, 2], &[1, 1]).unwrap();
        assert!(s.debug_dump().lines().count() == 8);
        assert!(s.debug_dump().contains("<="));
    }
}
