//! LFPP lengths, crossing distances and geodesics on a sampled field.
//!
//! Vertex `v` carries weight `eps * exp(xi * h(v))`; the length of a lattice
//! path is the sum of the weights of all its vertices, endpoints included.

mod dijkstra;

use serde::{Deserialize, Serialize};

use crate::field::{FieldSample, GridSpec, SamplerKind};
use crate::summation::CompensatedSum;
use crate::{Error, Result};
use dijkstra::GridSearch;

/// Largest `|xi h + log eps|` accepted when forming vertex weights.
pub const WEIGHT_EXPONENT_LIMIT: f64 = 700.0;

/// A lattice path with the field values it visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    /// Row-major vertex indices, in order.
    pub vertices: Vec<usize>,
    pub is_simple: bool,
    pub field_values: Vec<f64>,
}

impl PathRecord {
    /// Validates that consecutive vertices are nearest neighbours on the field's grid.
    pub fn new(vertices: Vec<usize>, field: &FieldSample) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyPath);
        }
        let spec = field.spec;
        let count = spec.vertex_count();
        if let Some(&bad) = vertices.iter().find(|&&v| v >= count) {
            return Err(Error::InvalidPath(format!(
                "vertex {bad} outside a grid of {count} vertices"
            )));
        }
        for w in vertices.windows(2) {
            if !adjacent(&spec, w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "vertices {} and {} are not nearest neighbours",
                    w[0], w[1]
                )));
            }
        }
        let mut seen = vec![false; count];
        let is_simple = vertices.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
        let field_values = vertices.iter().map(|&v| field.values[v]).collect();
        Ok(PathRecord {
            vertices,
            is_simple,
            field_values,
        })
    }

    /// Number of vertices, `#P`.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

fn adjacent(spec: &GridSpec, a: usize, b: usize) -> bool {
    let (ai, aj) = spec.coords(a);
    let (bi, bj) = spec.coords(b);
    ai.abs_diff(bi) + aj.abs_diff(bj) == 1
}

/// Side of the unit square used as a source or sink set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Column `i = 0`.
    Left,
    /// Column `i = n - 1`.
    Right,
    /// Row `j = 0`.
    Top,
    /// Row `j = n - 1`.
    Bottom,
}

impl Boundary {
    /// Whether vertex `v` of an `n x n` grid lies on this side.
    pub fn contains(self, n: usize, v: usize) -> bool {
        let (i, j) = (v % n, v / n);
        match self {
            Boundary::Left => i == 0,
            Boundary::Right => i + 1 == n,
            Boundary::Top => j == 0,
            Boundary::Bottom => j + 1 == n,
        }
    }

    pub fn vertices(self, n: usize) -> Vec<usize> {
        (0..n)
            .map(|t| match self {
                Boundary::Left => t * n,
                Boundary::Right => t * n + n - 1,
                Boundary::Top => t,
                Boundary::Bottom => (n - 1) * n + t,
            })
            .collect()
    }
}

/// Positive vertex weights on an `n x n` grid with nearest-neighbour edges.
///
/// This is the shortest-path layer under the field-based functions; it also
/// accepts grid sizes that are not of the form `2^k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n == 0 || weights.len() != n * n {
            return Err(Error::InvalidGrid(format!(
                "{} weights for a {n} x {n} grid",
                weights.len()
            )));
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::domain("weight", w, "(0, inf)"));
        }
        Ok(WeightedGrid { n, weights })
    }

    /// Weights `eps exp(xi h)` of a field.
    pub fn from_field(field: &FieldSample, xi: f64) -> Result<Self> {
        Ok(WeightedGrid {
            n: field.n_per_side(),
            weights: vertex_weights(field, xi)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of the weights along `path`, with compensated summation.
    pub fn path_length(&self, path: &[usize]) -> f64 {
        path.iter().map(|&v| self.weights[v]).collect::<CompensatedSum>().value()
    }

    /// Shortest path from any vertex of `from` to any vertex of `to`.
    pub fn crossing(&self, from: Boundary, to: Boundary) -> (f64, Vec<usize>) {
        let n = self.n;
        let mut search = GridSearch::new(n, &self.weights);
        let (target, distance) = search
            .run(&from.vertices(n), |v| to.contains(n, v))
            .expect("the grid is connected");
        (distance, search.path_to(target))
    }

    /// Shortest path between two vertices, both endpoints counted.
    pub fn point_path(&self, z: usize, w: usize) -> Result<(f64, Vec<usize>)> {
        let count = self.n * self.n;
        for v in [z, w] {
            if v >= count {
                return Err(Error::InvalidPath(format!(
                    "vertex {v} outside a grid of {count} vertices"
                )));
            }
        }
        let mut search = GridSearch::new(self.n, &self.weights);
        let (_, distance) = search.run(&[z], |v| v == w).expect("the grid is connected");
        Ok((distance, search.path_to(w)))
    }
}

/// Minimal crossing of the unit square with its geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub xi: f64,
    pub distance: f64,
    pub geodesic: PathRecord,
    /// `#P` of the geodesic.
    pub vertex_count: usize,
    pub seed: u64,
    pub level: u32,
    pub sampler: SamplerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub alpha: f64,
    pub level: u32,
    pub count: usize,
    pub epsilon: f64,
}

/// Both terms of the threshold split of a path's length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSplit {
    /// Vertices with `h < alpha log eps`.
    pub low_count: usize,
    /// `eps^(1 + alpha xi_tilde) * low_count`, bounding their contribution.
    pub low_term: f64,
    /// Exact contribution of the vertices with `h >= alpha log eps`.
    pub high_term: f64,
}

fn check_xi(xi: f64) -> Result<()> {
    if xi >= 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("xi", xi, "[0, inf)"))
    }
}

fn weight_exponent(xi: f64, h: f64, log_eps: f64) -> Result<f64> {
    let e = xi * h + log_eps;
    if e.abs() > WEIGHT_EXPONENT_LIMIT || !e.is_finite() {
        return Err(Error::WeightRange {
            exponent: e,
            limit: WEIGHT_EXPONENT_LIMIT,
        });
    }
    Ok(e)
}

/// Vertex weights `exp(xi h + log eps)` for the whole field.
pub fn vertex_weights(field: &FieldSample, xi: f64) -> Result<Vec<f64>> {
    check_xi(xi)?;
    let log_eps = field.spec.epsilon().ln();
    let (lo, hi) = field
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    weight_exponent(xi, lo, log_eps)?;
    weight_exponent(xi, hi, log_eps)?;
    Ok(field
        .values
        .iter()
        .map(|&h| (xi * h + log_eps).exp())
        .collect())
}

fn length_of(vertices: &[usize], field: &FieldSample, xi: f64) -> Result<f64> {
    let log_eps = field.spec.epsilon().ln();
    let mut sum = CompensatedSum::default();
    for &v in vertices {
        sum.add(weight_exponent(xi, field.values[v], log_eps)?.exp());
    }
    Ok(sum.value())
}

/// `L(P) = sum_j eps exp(xi h(P(j)))` over every vertex of the path.
pub fn lfpp_length(path: &PathRecord, field: &FieldSample, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    if path.vertices.is_empty() {
        return Err(Error::EmptyPath);
    }
    let count = field.spec.vertex_count();
    if path.vertices.iter().any(|&v| v >= count) {
        return Err(Error::InvalidPath("vertex outside the grid".into()));
    }
    length_of(&path.vertices, field, xi)
}

/// Minimal length over lattice paths from one side of the square to another.
pub fn boundary_crossing(
    field: &FieldSample,
    xi: f64,
    from: Boundary,
    to: Boundary,
) -> Result<CrossingResult> {
    let (distance, path) = WeightedGrid::from_field(field, xi)?.crossing(from, to);
    let geodesic = PathRecord::new(path, field)?;
    Ok(CrossingResult {
        xi,
        distance,
        vertex_count: geodesic.vertex_count(),
        geodesic,
        seed: field.seed,
        level: field.spec.level(),
        sampler: field.sampler_kind,
    })
}

/// Left-to-right crossing distance `D(left, right)` and its geodesic.
pub fn crossing_distance(field: &FieldSample, xi: f64) -> Result<CrossingResult> {
    boundary_crossing(field, xi, Boundary::Left, Boundary::Right)
}

/// Minimal length of a path from `z` to `w` together with the path.
pub fn point_geodesic(field: &FieldSample, xi: f64, z: usize, w: usize) -> Result<(f64, PathRecord)> {
    let count = field.spec.vertex_count();
    if z >= count || w >= count {
        return Err(Error::InvalidPath(format!(
            "endpoints ({z}, {w}) outside a grid of {count} vertices"
        )));
    }
    let (distance, path) = WeightedGrid::from_field(field, xi)?.point_path(z, w)?;
    Ok((distance, PathRecord::new(path, field)?))
}

/// Point-to-point distance `D(z, w)`; both endpoints are counted.
pub fn point_distance(field: &FieldSample, xi: f64, z: usize, w: usize) -> Result<f64> {
    point_geodesic(field, xi, z, w).map(|(d, _)| d)
}

/// Number of vertices with `h < alpha log eps`.
pub fn census(field: &FieldSample, alpha: f64) -> Result<CensusResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    let eps = field.spec.epsilon();
    let threshold = alpha * eps.ln();
    let count = field.values.iter().filter(|&&h| h < threshold).count();
    Ok(CensusResult {
        alpha,
        level: field.spec.level(),
        count,
        epsilon: eps,
    })
}

/// Splits the `xi_tilde`-length of a path at the threshold `alpha log eps`.
pub fn path_split(
    path: &PathRecord,
    field: &FieldSample,
    xi_tilde: f64,
    alpha: f64,
) -> Result<PathSplit> {
    check_xi(xi_tilde)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    if path.vertices.is_empty() {
        return Err(Error::EmptyPath);
    }
    let eps = field.spec.epsilon();
    let log_eps = eps.ln();
    let threshold = alpha * log_eps;
    let mut low_count = 0usize;
    let mut high = CompensatedSum::default();
    for &v in &path.vertices {
        let h = *field
            .values
            .get(v)
            .ok_or_else(|| Error::InvalidPath("vertex outside the grid".into()))?;
        if h < threshold {
            low_count += 1;
        } else {
            high.add(weight_exponent(xi_tilde, h, log_eps)?.exp());
        }
    }
    Ok(PathSplit {
        low_count,
        low_term: eps.powf(1.0 + alpha * xi_tilde) * low_count as f64,
        high_term: high.value(),
    })
}

/// Lengths of one fixed path under each parameter in `xi_list`.
pub fn multi_xi_evaluate(geodesic: &PathRecord, field: &FieldSample, xi_list: &[f64]) -> Result<Vec<f64>> {
    xi_list
        .iter()
        .map(|&xi| lfpp_length(geodesic, field, xi))
        .collect()
}
