//! Exact incremental convex hull over checked 128-bit integers.
//!
//! The beneath-beyond construction keeps a simplicial triangulation of the
//! boundary. A point is inserted only when it is strictly outside the current
//! hull, so every extreme point of the input ends up referenced; coplanar
//! insertions can leave non-extreme points referenced by facets, and the
//! final vertex set is therefore re-filtered by the rank of each point's
//! active supporting hyperplanes. All predicates are exact; arithmetic
//! overflow is detected and reported rather than wrapped.

use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

use super::PolytopeError;

pub(crate) type Int = i128;

#[derive(Debug, Clone)]
pub(crate) struct Facet {
    /// Sorted indices into the point list; always exactly `dim` of them.
    pub verts: Vec<usize>,
    /// Outward normal: `normal . x <= offset` for every hull point.
    pub normal: Vec<Int>,
    pub offset: Int,
}

#[derive(Debug)]
pub(crate) struct HullData {
    pub affine_dim: usize,
    /// Indices of the extreme points, sorted.
    pub vertices: Vec<usize>,
    /// Simplicial boundary facets (empty when the hull is not full-dimensional).
    pub facets: Vec<Facet>,
    /// Deduplicated primitive supporting hyperplanes.
    pub planes: Vec<(Vec<Int>, Int)>,
}

fn cmul(a: Int, b: Int) -> Result<Int, PolytopeError> {
    a.checked_mul(b).ok_or(PolytopeError::Overflow)
}

fn cadd(a: Int, b: Int) -> Result<Int, PolytopeError> {
    a.checked_add(b).ok_or(PolytopeError::Overflow)
}

fn csub(a: Int, b: Int) -> Result<Int, PolytopeError> {
    a.checked_sub(b).ok_or(PolytopeError::Overflow)
}

fn dot(a: &[Int], b: &[Int]) -> Result<Int, PolytopeError> {
    let mut acc: Int = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc = cadd(acc, cmul(x, y)?)?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Divide a normal/offset pair by the gcd of its entries.
fn reduce_plane(normal: &mut [Int], offset: &mut Int) {
    let mut g: u128 = offset.unsigned_abs();
    for &n in normal.iter() {
        g = gcd(g, n.unsigned_abs());
    }
    if g > 1 {
        for n in normal.iter_mut() {
            *n /= g as Int;
        }
        *offset /= g as Int;
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub(crate) fn det(mut m: Vec<Vec<Int>>) -> Result<Int, PolytopeError> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign: Int = 1;
    let mut prev: Int = 1;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0);
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = csub(cmul(m[i][j], m[k][k])?, cmul(m[i][k], m[k][j])?)?;
                m[i][j] = num / prev; // exact by Bareiss
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    cmul(sign, m[n - 1][n - 1])
}

/// Integer row echelon accumulator tracking pivot columns.
struct IntEchelon {
    rows: Vec<Vec<Int>>,
    pivots: Vec<usize>,
}

impl IntEchelon {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Returns true when the vector increased the rank.
    fn try_add(&mut self, mut v: Vec<Int>) -> Result<bool, PolytopeError> {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if v[pc] != 0 {
                let a = row[pc];
                let b = v[pc];
                for j in 0..v.len() {
                    v[j] = csub(cmul(v[j], a)?, cmul(row[j], b)?)?;
                }
            }
        }
        let pivot = match v.iter().position(|&x| x != 0) {
            Some(p) => p,
            None => return Ok(false),
        };
        let mut g: u128 = 0;
        for &x in &v {
            g = gcd(g, x.unsigned_abs());
        }
        if g > 1 {
            for x in v.iter_mut() {
                *x /= g as Int;
            }
        }
        self.rows.push(v);
        self.pivots.push(pivot);
        Ok(true)
    }
}

/// Rank over arbitrary-precision integers; used where entries may be large.
#[allow(clippy::needless_range_loop)]
fn bigint_rank(rows: &[Vec<Int>]) -> usize {
    let mut mat: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let cols = match mat.first() {
        Some(r) => r.len(),
        None => return 0,
    };
    let mut rank = 0;
    for col in 0..cols {
        let pivot_row = (rank..mat.len()).find(|&r| !mat[r][col].is_zero());
        let pr = match pivot_row {
            Some(r) => r,
            None => continue,
        };
        mat.swap(rank, pr);
        let pivot = mat[rank][col].clone();
        for r in rank + 1..mat.len() {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = mat[r][col].clone();
            for c in col..cols {
                let v = &mat[r][c] * &pivot - &mat[rank][c] * &factor;
                mat[r][c] = v;
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

/// Computes the hull of distinct points.
pub(crate) fn compute(points: &[Vec<Int>], dim: usize) -> Result<HullData, PolytopeError> {
    if points.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    if points.len() == 1 {
        return Ok(HullData {
            affine_dim: 0,
            vertices: vec![0],
            facets: Vec::new(),
            planes: Vec::new(),
        });
    }

    // Greedy affinely independent subset; pivot columns give an injective
    // coordinate projection of the affine span when the set is degenerate.
    let mut echelon = IntEchelon::new();
    let mut basis = vec![0usize];
    for i in 1..points.len() {
        let diff: Vec<Int> = points[i]
            .iter()
            .zip(&points[0])
            .map(|(&a, &b)| a - b)
            .collect();
        if echelon.try_add(diff)? {
            basis.push(i);
            if basis.len() == dim + 1 {
                break;
            }
        }
    }
    let affine_dim = basis.len() - 1;

    if affine_dim < dim {
        let cols = echelon.pivots.clone();
        let projected: Vec<Vec<Int>> = points
            .iter()
            .map(|p| cols.iter().map(|&c| p[c]).collect())
            .collect();
        let sub = compute(&projected, affine_dim)?;
        return Ok(HullData {
            affine_dim,
            vertices: sub.vertices,
            facets: Vec::new(),
            planes: Vec::new(),
        });
    }

    let facets = full_dim_hull(points, dim, &basis)?;

    // Deduplicate supporting hyperplanes.
    let mut plane_set: BTreeSet<(Vec<Int>, Int)> = BTreeSet::new();
    for f in &facets {
        let mut n = f.normal.clone();
        let mut o = f.offset;
        reduce_plane(&mut n, &mut o);
        plane_set.insert((n, o));
    }
    let planes: Vec<(Vec<Int>, Int)> = plane_set.into_iter().collect();

    // A referenced point is a vertex exactly when its active hyperplane
    // normals span the ambient space.
    let mut referenced: BTreeSet<usize> = BTreeSet::new();
    for f in &facets {
        referenced.extend(f.verts.iter().copied());
    }
    let mut vertices = Vec::new();
    for &pi in &referenced {
        let mut active: Vec<Vec<Int>> = Vec::new();
        for (n, o) in &planes {
            if dot(n, &points[pi])? == *o {
                active.push(n.clone());
            }
        }
        if bigint_rank(&active) == dim {
            vertices.push(pi);
        }
    }

    Ok(HullData {
        affine_dim,
        vertices,
        facets,
        planes,
    })
}

fn facet_plane(
    points: &[Vec<Int>],
    verts: &[usize],
    dim: usize,
    interior_ref: &[Int],
    interior_scale: Int,
) -> Result<Facet, PolytopeError> {
    // Generalized cross product of the edge vectors via cofactor expansion.
    let v0 = &points[verts[0]];
    let edges: Vec<Vec<Int>> = verts[1..]
        .iter()
        .map(|&vi| {
            points[vi]
                .iter()
                .zip(v0)
                .map(|(&a, &b)| a - b)
                .collect::<Vec<Int>>()
        })
        .collect();
    let mut normal = vec![0 as Int; dim];
    for (j, slot) in normal.iter_mut().enumerate() {
        let minor: Vec<Vec<Int>> = edges
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let d = det(minor)?;
        *slot = if j % 2 == 0 { d } else { -d };
    }
    if normal.iter().all(|&x| x == 0) {
        return Err(PolytopeError::Internal("degenerate facet".into()));
    }
    let mut offset = dot(&normal, v0)?;
    reduce_plane(&mut normal, &mut offset);
    let side = dot(&normal, interior_ref)?;
    let bound = cmul(offset, interior_scale)?;
    if side == bound {
        return Err(PolytopeError::Internal(
            "interior reference lies on a facet hyperplane".into(),
        ));
    }
    if side > bound {
        for x in normal.iter_mut() {
            *x = -*x;
        }
        offset = -offset;
    }
    Ok(Facet {
        verts: verts.to_vec(),
        normal,
        offset,
    })
}

fn full_dim_hull(
    points: &[Vec<Int>],
    dim: usize,
    basis: &[usize],
) -> Result<Vec<Facet>, PolytopeError> {
    // Centroid of the initial simplex, scaled by dim+1 to stay integral.
    let mut interior_ref = vec![0 as Int; dim];
    for &bi in basis {
        for (acc, &x) in interior_ref.iter_mut().zip(&points[bi]) {
            *acc = cadd(*acc, x)?;
        }
    }
    let interior_scale = (dim + 1) as Int;

    let mut facets: Vec<Facet> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    for omit in 0..=dim {
        let verts: Vec<usize> = basis
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != omit)
            .map(|(_, &v)| v)
            .collect();
        let mut verts = verts;
        verts.sort_unstable();
        facets.push(facet_plane(
            points,
            &verts,
            dim,
            &interior_ref,
            interior_scale,
        )?);
        alive.push(true);
    }

    let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
    for pi in 0..points.len() {
        if in_basis.contains(&pi) {
            continue;
        }
        let mut visible: Vec<usize> = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            if alive[fi] && dot(&f.normal, &points[pi])? > f.offset {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            continue;
        }
        // Horizon ridges appear in exactly one visible facet.
        let mut ridge_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &fi in &visible {
            for drop in 0..facets[fi].verts.len() {
                let ridge: Vec<usize> = facets[fi]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &v)| v)
                    .collect();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        for &fi in &visible {
            alive[fi] = false;
        }
        for (ridge, count) in ridge_count {
            if count != 1 {
                continue;
            }
            let mut verts = ridge;
            verts.push(pi);
            verts.sort_unstable();
            facets.push(facet_plane(
                points,
                &verts,
                dim,
                &interior_ref,
                interior_scale,
            )?);
            alive.push(true);
        }
    }

    Ok(facets
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(f, _)| f)
        .collect())
}

/// Euclidean volume of the full-dimensional hull, as (numerator, n!) before
/// division: the boundary cones over the first vertex partition the hull.
pub(crate) fn volume_numerator(
    points: &[Vec<Int>],
    data: &HullData,
    dim: usize,
) -> Result<Int, PolytopeError> {
    if data.affine_dim < dim {
        return Ok(0);
    }
    let origin = &points[data.vertices[0]];
    let mut total: Int = 0;
    for f in &data.facets {
        let m: Vec<Vec<Int>> = f
            .verts
            .iter()
            .map(|&vi| {
                points[vi]
                    .iter()
                    .zip(origin)
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        total = cadd(total, det(m)?.abs())?;
    }
    Ok(total)
}
