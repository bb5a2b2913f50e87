//! Polytopes of probability vectors.
//!
//! For a vector `x`, `A(x)` is the convex hull of all its coordinate
//! permutations `x M_pi`, and `A[x; B(G)]` is the hull of the images `x M(r)`
//! under the regular representation of a group `G`. Walks driven by matrices
//! in `B(G)` move inside these polytopes, which shrink step by step.
//!
//! Vertices are kept in full `n` coordinates.

use std::collections::HashSet;

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::birkhoff::ProbabilityVector;
use crate::error::{Result, WalkError};
use crate::group::GroupSpec;
use crate::linalg;
use crate::simplex::{self, LpOutcome};

/// Largest `n` accepted by [`full_polytope`] (8! permutations before dedup).
pub const MAX_FULL_DIM: usize = 8;
/// Max-norm distance under which two vertices are the same point.
pub const DEDUP_TOL: f64 = 1e-10;
/// Default max-norm residual accepted by [`contains`].
pub const CONTAINS_TOL: f64 = 1e-9;
/// Singular values above this count toward [`dimension`].
pub const RANK_TOL: f64 = 1e-9;
/// Combined spread of the principal axes [`residual`] may ignore.
const AXIS_DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Hull over the whole symmetric group.
    Full,
    /// Hull over the regular representation of a group.
    Subgroup(GroupSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbPolytope {
    vertices: Vec<ProbabilityVector>,
    ambient: usize,
    provenance: Provenance,
}

impl ProbPolytope {
    pub fn vertices(&self) -> &[ProbabilityVector] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Vertices in the reporting convention that drops the last coordinate.
    pub fn projected_vertices(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.as_slice()[..self.ambient - 1].to_vec())
            .collect()
    }

    /// Largest Euclidean distance from the uniform vector to a vertex.
    pub fn circumradius(&self) -> f64 {
        let u = 1.0 / self.ambient as f64;
        self.vertices
            .iter()
            .map(|v| {
                v.as_slice()
                    .iter()
                    .map(|x| (x - u).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds a polytope from arbitrary probability vectors, merging near-duplicates.
pub fn from_vertices(
    vertices: Vec<ProbabilityVector>,
    provenance: Provenance,
) -> Result<ProbPolytope> {
    let Some(first) = vertices.first() else {
        return Err(WalkError::invariant("polytope", "no vertices"));
    };
    let ambient = first.len();
    let mut kept: Vec<ProbabilityVector> = Vec::new();
    for v in vertices {
        WalkError::check_len(ambient, v.len())?;
        if !kept.iter().any(|k| k.max_abs_diff(&v) <= DEDUP_TOL) {
            kept.push(v);
        }
    }
    Ok(ProbPolytope {
        vertices: kept,
        ambient,
        provenance,
    })
}

/// Labels each entry of `x` by the cluster of values it falls in, so that two
/// rearrangements of `x` are the same vertex iff their label sequences match.
fn value_classes(x: &[f64]) -> Vec<u32> {
    let mut sorted: Vec<usize> = (0..x.len()).collect();
    sorted.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut class = vec![0u32; x.len()];
    let mut current = 0u32;
    for w in 0..sorted.len() {
        if w > 0 && x[sorted[w]] - x[sorted[w - 1]] > DEDUP_TOL {
            current += 1;
        }
        class[sorted[w]] = current;
    }
    class
}

fn rearrangements<I>(x: &ProbabilityVector, images: I, provenance: Provenance) -> ProbPolytope
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let xs = x.as_slice();
    let class = value_classes(xs);
    let mut seen = HashSet::new();
    let mut vertices = Vec::new();
    for image in images {
        let mut y = vec![0.0; xs.len()];
        let mut key = vec![0u32; xs.len()];
        for (a, &b) in image.iter().enumerate() {
            y[b] = xs[a];
            key[b] = class[a];
        }
        if seen.insert(key) {
            vertices.push(ProbabilityVector::from_raw(y));
        }
    }
    ProbPolytope {
        vertices,
        ambient: xs.len(),
        provenance,
    }
}

/// `A[x; B(G)]`: the hull of `x M(r)` over all `r` in `G`.
pub fn subgroup_polytope(x: &ProbabilityVector, spec: GroupSpec) -> Result<ProbPolytope> {
    WalkError::check_len(spec.order(), x.len())?;
    let images = spec.elements().map(|r| {
        spec.permutation_rep(r)
            .expect("element of spec")
            .image()
            .to_vec()
    });
    Ok(rearrangements(x, images, Provenance::Subgroup(spec)))
}

/// `A(x)`: the hull of every coordinate permutation of `x`.
pub fn full_polytope(x: &ProbabilityVector) -> Result<ProbPolytope> {
    let n = x.len();
    if n > MAX_FULL_DIM {
        return Err(WalkError::Capacity {
            what: "full permutation polytope",
            limit: MAX_FULL_DIM,
            requested: n,
        });
    }
    Ok(rearrangements(x, (0..n).permutations(n), Provenance::Full))
}

/// Max-norm residual `|sum_i lambda_i v_i - y|` of the convex combination
/// chosen by the membership solve.
///
/// The solve runs in the principal axes of the centred vertex cloud: one
/// equality row per axis plus `sum lambda = 1`, with a pair of nonnegative
/// residual columns per axis weighted by that axis' singular value, so the
/// simplex minimizes the L1 residual along the axes. Axes whose combined
/// spread is below `1e-12` are dropped. The result is zero up to rounding when
/// `y` lies in the hull; otherwise it is at least the max-norm distance to it.
pub fn residual(poly: &ProbPolytope, y: &ProbabilityVector) -> Result<f64> {
    WalkError::check_len(poly.ambient, y.len())?;
    let n = poly.ambient;
    let nv = poly.vertices.len();
    let centre: Vec<f64> = (0..n)
        .map(|k| poly.vertices.iter().map(|v| v.as_slice()[k]).sum::<f64>() / nv as f64)
        .collect();
    let spread = DMatrix::from_fn(nv, n, |i, k| poly.vertices[i].as_slice()[k] - centre[k]);
    let scale = spread.amax();
    if scale == 0.0 {
        return Ok(y
            .as_slice()
            .iter()
            .zip(&centre)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max));
    }
    // Walks shrink some Fourier modes much faster than others, leaving vertex
    // clouds that are flat to many digits. Rows in whitened coordinates stay
    // orthonormal however flat the cloud is.
    let linalg::ThinSvd { u, sigma, v_t } = linalg::thin_svd(&(spread / scale))?;
    let mut tail = 0.0;
    let mut r = sigma.len();
    while r > 0 && (tail + (sigma[r - 1] * scale).powi(2)).sqrt() <= AXIS_DROP_TOL {
        tail += (sigma[r - 1] * scale).powi(2);
        r -= 1;
    }
    // Columns: lambda (nv), then a positive and a negative residual per axis.
    let cols = nv + 2 * r;
    let mut a = Vec::with_capacity(r + 1);
    let mut b = Vec::with_capacity(r + 1);
    let mut c = vec![0.0; cols];
    for i in 0..r {
        let along: f64 = (0..n)
            .map(|k| v_t[(i, k)] * (y.as_slice()[k] - centre[k]) / scale)
            .sum();
        let mut row = vec![0.0; cols];
        for j in 0..nv {
            row[j] = u[(j, i)];
        }
        row[nv + 2 * i] = 1.0;
        row[nv + 2 * i + 1] = -1.0;
        a.push(row);
        b.push(along / sigma[i]);
        c[nv + 2 * i] = sigma[i];
        c[nv + 2 * i + 1] = sigma[i];
    }
    let mut sum_row = vec![0.0; cols];
    sum_row[..nv].iter_mut().for_each(|v| *v = 1.0);
    a.push(sum_row);
    b.push(1.0);
    let weights = match simplex::solve(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => x[..nv].to_vec(),
        other => {
            return Err(WalkError::Domain(format!(
                "membership LP did not solve: {other:?}"
            )))
        }
    };
    let total: f64 = weights.iter().sum();
    let residual = (0..n)
        .map(|k| {
            let s: f64 = poly
                .vertices
                .iter()
                .zip(&weights)
                .map(|(v, l)| l * v.as_slice()[k])
                .sum();
            (s / total - y.as_slice()[k]).abs()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

pub fn contains(poly: &ProbPolytope, y: &ProbabilityVector, tol: f64) -> Result<bool> {
    Ok(residual(poly, y)? <= tol)
}

pub fn is_subset(inner: &ProbPolytope, outer: &ProbPolytope, tol: f64) -> Result<bool> {
    WalkError::check_len(outer.ambient, inner.ambient)?;
    for v in &inner.vertices {
        if !contains(outer, v, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Affine dimension: rank of `{v_i - v_0}`.
pub fn dimension(poly: &ProbPolytope) -> Result<usize> {
    if poly.vertices.len() < 2 {
        return Ok(0);
    }
    let base = poly.vertices[0].as_slice();
    let rows = poly.vertices.len() - 1;
    let m = DMatrix::from_fn(rows, poly.ambient, |i, k| {
        poly.vertices[i + 1].as_slice()[k] - base[k]
    });
    Ok(linalg::singular_values(&m)?
        .iter()
        .filter(|&&s| s > RANK_TOL)
        .count())
}
