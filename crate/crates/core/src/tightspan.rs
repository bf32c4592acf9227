//! The tight span `E(X)` of a finite metric space.
//!
//! `Δ(X)` is the polyhedron of functions with `f(x) + f(y) ≥ d(x,y)` for all
//! pairs (loops included); `E(X)` is the union of its bounded faces, i.e.
//! the minimal elements. A face is described by its equality graph, the set
//! of pairs where the inequality is tight. Vertices are found by solving
//! every square subsystem of pair equations; higher cells by intersecting
//! vertex tight sets and certifying each candidate with an exact LP.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::lp::{relative_interior_point, solve, LinearProgram, LpStatus};
use crate::metric::{trusted, FiniteMetricSpace};
use crate::scalar::Scalar;

pub const DEFAULT_VERTEX_BOUND: usize = 7;
pub const DEFAULT_CELL_BOUND: usize = 6;
/// Tight sets are `u64` masks over the `N(N+1)/2` pairs.
pub const HARD_POINT_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TightSpanError {
    #[error("function has {got} values for a space of {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("function is not admissible: f({x}) + f({y}) < d({x},{y})")]
    NotAdmissible { x: String, y: String },
    #[error("function is not extremal at `{0}`")]
    NotExtremal(String),
    #[error("order is not a permutation of the {0} points")]
    InvalidOrder(usize),
    #[error("equality graph leaves point `{0}` uncovered")]
    NotCovering(String),
    #[error("{size} points exceed the bound of {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// A rational function on the points of a space, stored by point index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricFunction {
    values: Vec<Scalar>,
}

impl MetricFunction {
    pub fn new(values: Vec<Scalar>) -> Self {
        MetricFunction { values }
    }

    /// `d_y = d(·, y)`.
    pub fn distance_to(x: &FiniteMetricSpace, y: usize) -> Self {
        MetricFunction::new((0..x.len()).map(|p| x.d(p, y).clone()).collect())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn get(&self, p: usize) -> &Scalar {
        &self.values[p]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `{"label": "p/q", ...}` in point order.
    pub fn to_json(&self, x: &FiniteMetricSpace) -> Value {
        let mut m = Map::new();
        for (p, v) in self.values.iter().enumerate() {
            m.insert(x.label(p).to_string(), Value::String(v.to_string()));
        }
        Value::Object(m)
    }
}

fn check_len(x: &FiniteMetricSpace, f: &MetricFunction) -> Result<(), TightSpanError> {
    if f.len() != x.len() {
        return Err(TightSpanError::LengthMismatch { expected: x.len(), got: f.len() });
    }
    Ok(())
}

pub fn check_admissible(x: &FiniteMetricSpace, f: &MetricFunction) -> Result<(), TightSpanError> {
    check_len(x, f)?;
    for a in 0..x.len() {
        for b in a..x.len() {
            if f.get(a) + f.get(b) < *x.d(a, b) {
                return Err(TightSpanError::NotAdmissible {
                    x: x.label(a).into(),
                    y: x.label(b).into(),
                });
            }
        }
    }
    Ok(())
}

pub fn is_admissible(x: &FiniteMetricSpace, f: &MetricFunction) -> bool {
    check_admissible(x, f).is_ok()
}

pub fn check_extremal(x: &FiniteMetricSpace, f: &MetricFunction) -> Result<(), TightSpanError> {
    check_admissible(x, f)?;
    let s = star(x, f)?;
    match (0..x.len()).find(|&p| s.get(p) != f.get(p)) {
        Some(p) => Err(TightSpanError::NotExtremal(x.label(p).into())),
        None => Ok(()),
    }
}

pub fn is_extremal(x: &FiniteMetricSpace, f: &MetricFunction) -> bool {
    check_extremal(x, f).is_ok()
}

/// `f*(x) = max_z (d(x,z) − f(z))`.
pub fn star(x: &FiniteMetricSpace, f: &MetricFunction) -> Result<MetricFunction, TightSpanError> {
    check_len(x, f)?;
    let n = x.len();
    let values = (0..n)
        .map(|p| (0..n).map(|z| x.d(p, z) - f.get(z)).max().expect("non-empty space"))
        .collect();
    Ok(MetricFunction::new(values))
}

/// `(f + f*) / 2`, admissible and below `f`.
pub fn q_map(x: &FiniteMetricSpace, f: &MetricFunction) -> Result<MetricFunction, TightSpanError> {
    check_admissible(x, f)?;
    let s = star(x, f)?;
    Ok(MetricFunction::new(
        f.values.iter().zip(&s.values).map(|(a, b)| (a + b).half()).collect(),
    ))
}

/// Lowers an admissible `f` to an extremal function below it with a single
/// pass over `order`, setting `f(p) := max(0, max_{z≠p} (d(p,z) − f(z)))`.
///
/// A coordinate made tight against `z` stays tight: later updates of `z`
/// cannot go below `d(p,z) − f(p)`.
pub fn extremal_below(
    x: &FiniteMetricSpace,
    f: &MetricFunction,
    order: &[usize],
) -> Result<MetricFunction, TightSpanError> {
    check_admissible(x, f)?;
    let n = x.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(TightSpanError::InvalidOrder(n));
    }
    let mut v = f.values.clone();
    for &p in order {
        let mut best = Scalar::zero();
        for z in (0..n).filter(|&z| z != p) {
            let c = x.d(p, z) - &v[z];
            if c > best {
                best = c;
            }
        }
        v[p] = best;
    }
    let out = MetricFunction::new(v);
    debug_assert!(is_extremal(x, &out));
    Ok(out)
}

/// The distance functions `d_y`, one per point.
pub fn canonical_embed(x: &FiniteMetricSpace) -> Vec<MetricFunction> {
    (0..x.len()).map(|y| MetricFunction::distance_to(x, y)).collect()
}

pub fn sup_distance(f: &MetricFunction, g: &MetricFunction) -> Result<Scalar, TightSpanError> {
    if f.len() != g.len() {
        return Err(TightSpanError::LengthMismatch { expected: f.len(), got: g.len() });
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).max().unwrap_or_default())
}

/// Unordered pairs `(a, b)` with `a ≤ b`, in row-major order. Bit `k` of a
/// tight-set mask refers to entry `k`.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

/// Tight pairs of `f` (loops included) as a mask over [`pair_list`].
pub fn tight_mask(x: &FiniteMetricSpace, f: &[Scalar]) -> u64 {
    pair_list(x.len())
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| &f[a] + &f[b] == *x.d(a, b))
        .fold(0u64, |m, (k, _)| m | (1 << k))
}

/// Graph on the points with an edge at every tight pair; loops allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EqualityGraph {
    points: usize,
    edges: Vec<(usize, usize)>,
}

impl EqualityGraph {
    pub fn new(points: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> =
            edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        EqualityGraph { points, edges: set.into_iter().collect() }
    }

    pub fn from_mask(points: usize, mask: u64) -> Self {
        let pairs = pair_list(points);
        EqualityGraph::new(
            points,
            (0..pairs.len()).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]),
        )
    }

    pub fn mask(&self) -> u64 {
        let pairs = pair_list(self.points);
        self.edges
            .iter()
            .map(|e| pairs.iter().position(|p| p == e).expect("edge within range"))
            .fold(0, |m, k| m | (1 << k))
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_loop(&self, p: usize) -> bool {
        self.edges.contains(&(p, p))
    }

    pub fn uncovered(&self) -> Option<usize> {
        (0..self.points).find(|&p| !self.edges.iter().any(|&(a, b)| a == p || b == p))
    }

    pub fn is_covering(&self) -> bool {
        self.uncovered().is_none()
    }

    /// Number of components with neither an odd cycle nor a loop, isolated
    /// points included.
    pub fn bipartite_components(&self) -> usize {
        let mut uf = ParityUnionFind::new(self.points);
        for &(a, b) in &self.edges {
            uf.add_edge(a, b);
        }
        uf.bipartite_components()
    }

    /// DOT rendering; loops are drawn red.
    pub fn to_dot(&self, labels: &[String], name: &str) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for l in labels {
            out.push_str(&format!("  \"{l}\";\n"));
        }
        for &(a, b) in &self.edges {
            let style = if a == b { " [color=red]" } else { "" };
            out.push_str(&format!("  \"{}\" -- \"{}\"{style};\n", labels[a], labels[b]));
        }
        out.push_str("}\n");
        out
    }
}

struct ParityUnionFind {
    parent: Vec<usize>,
    /// Parity of the path to the parent.
    parity: Vec<bool>,
    odd: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n).collect(), parity: vec![false; n], odd: vec![false; n] }
    }

    fn find(&mut self, p: usize) -> (usize, bool) {
        if self.parent[p] == p {
            return (p, false);
        }
        let (root, par) = self.find(self.parent[p]);
        self.parent[p] = root;
        self.parity[p] ^= par;
        (root, self.parity[p])
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa == pb {
                self.odd[ra] = true;
            }
        } else {
            self.parent[rb] = ra;
            self.parity[rb] = !(pa ^ pb);
            self.odd[ra] |= self.odd[rb];
        }
    }

    fn bipartite_components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&p| self.find(p).0 == p && !self.odd[p]).count()
    }
}

pub fn equality_graph(
    x: &FiniteMetricSpace,
    f: &MetricFunction,
) -> Result<EqualityGraph, TightSpanError> {
    check_extremal(x, f)?;
    Ok(EqualityGraph::from_mask(x.len(), tight_mask(x, &f.values)))
}

/// Dimension of the bounded face with equality graph `g`.
pub fn cell_dimension(x: &FiniteMetricSpace, g: &EqualityGraph) -> Result<usize, TightSpanError> {
    if let Some(p) = g.uncovered() {
        return Err(TightSpanError::NotCovering(x.label(p).into()));
    }
    Ok(g.bipartite_components())
}

fn check_bound(x: &FiniteMetricSpace, bound: usize) -> Result<(), TightSpanError> {
    let bound = bound.min(HARD_POINT_LIMIT);
    if x.len() > bound {
        return Err(TightSpanError::TooLarge { size: x.len(), bound });
    }
    Ok(())
}

/// Solves `f(a) + f(b) = d(a,b)` over `edges` when the system is square and
/// every component carries an odd cycle or a loop.
fn solve_pair_system(x: &FiniteMetricSpace, edges: &[(usize, usize)]) -> Option<Vec<Scalar>> {
    let n = x.len();
    let mut uf = ParityUnionFind::new(n);
    let mut covered = 0u64;
    for &(a, b) in edges {
        uf.add_edge(a, b);
        covered |= 1 << a | 1 << b;
    }
    if covered.count_ones() as usize != n || uf.bipartite_components() != 0 {
        return None;
    }
    // Each component is unicyclic: express f = sign·f(root) + offset along a
    // spanning tree, then the remaining edge pins f(root).
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        if a != b {
            adj[b].push((a, k));
        }
    }
    let mut sign = vec![0i8; n];
    let mut offset = vec![Scalar::zero(); n];
    let mut used = vec![false; edges.len()];
    let mut value = vec![Scalar::zero(); n];
    for root in 0..n {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut comp = vec![root];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &(v, k) in &adj[u] {
                if sign[v] == 0 {
                    used[k] = true;
                    sign[v] = -sign[u];
                    offset[v] = x.d(u, v) - &offset[u];
                    comp.push(v);
                }
            }
        }
        let k = (0..edges.len())
            .find(|&k| !used[k] && comp.contains(&edges[k].0))
            .expect("unicyclic component");
        let (a, b) = edges[k];
        let s = sign[a] + sign[b];
        if s == 0 {
            return None;
        }
        let root_value = (x.d(a, b) - &offset[a] - &offset[b]) / Scalar::from_integer(s as i64);
        for &v in &comp {
            value[v] = if sign[v] > 0 {
                &offset[v] + &root_value
            } else {
                &offset[v] - &root_value
            };
        }
    }
    Some(value)
}

/// All vertices of `E(X)`, sorted lexicographically by value vector.
pub fn enumerate_vertices(
    x: &FiniteMetricSpace,
    bound: usize,
) -> Result<Vec<MetricFunction>, TightSpanError> {
    check_bound(x, bound)?;
    let n = x.len();
    let pairs = pair_list(n);
    let m = pairs.len();
    let found: Vec<Vec<Scalar>> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let pairs = &pairs;
            (first + 1..m).combinations(n - 1).filter_map(move |rest| {
                let edges: Vec<(usize, usize)> =
                    std::iter::once(first).chain(rest).map(|k| pairs[k]).collect();
                solve_pair_system(x, &edges)
            })
        })
        .filter(|v| is_extremal(x, &MetricFunction::new(v.clone())))
        .collect();
    let set: BTreeSet<Vec<Scalar>> = found.into_iter().collect();
    Ok(set.into_iter().map(MetricFunction::new).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub edges: EqualityGraph,
    pub dimension: usize,
    /// Extremal, tight exactly on `edges`.
    pub interior_point: MetricFunction,
    /// Indices into the complex's vertex list.
    pub vertex_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightSpanComplex {
    pub space: FiniteMetricSpace,
    pub vertices: Vec<MetricFunction>,
    /// Sorted by dimension, then vertex set.
    pub cells: Vec<Cell>,
    pub f_vector: Vec<usize>,
}

impl TightSpanComplex {
    pub fn dimension(&self) -> usize {
        self.f_vector.len().saturating_sub(1)
    }

    pub fn to_json(&self) -> Value {
        let x = &self.space;
        json!({
            "vertices": self.vertices.iter().map(|v| json!({"values": v.to_json(x)})).collect::<Vec<_>>(),
            "cells": self.cells.iter().map(|c| json!({
                "dim": c.dimension,
                "edges": c.edges.edges().iter().map(|&(a, b)| [x.label(a), x.label(b)]).collect::<Vec<_>>(),
                "vertex_ids": c.vertex_ids,
            })).collect::<Vec<_>>(),
            "f_vector": self.f_vector,
        })
    }

    /// One DOT graph per cell, each drawing the cell's equality graph.
    pub fn to_dot(&self) -> String {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| c.edges.to_dot(self.space.labels(), &format!("cell{k}_dim{}", c.dimension)))
            .collect()
    }

    /// The vertices of `E(X)` as a metric space under sup-distance. Vertices
    /// equal to some `d_y` keep the label of `y`; the rest are `v<index>`.
    pub fn vertex_space(&self) -> FiniteMetricSpace {
        let embed = canonical_embed(&self.space);
        let labels = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| match embed.iter().position(|e| e == v) {
                Some(y) => self.space.label(y).to_string(),
                None => format!("v{k}"),
            })
            .collect();
        let matrix = self
            .vertices
            .iter()
            .map(|f| self.vertices.iter().map(|g| sup_distance(f, g).expect("same space")).collect())
            .collect();
        trusted(labels, matrix)
    }
}

/// Certification LP for an edge set: variables `f` and `t`, tight on the
/// edges, slack `≥ t` elsewhere, `t ≤ 1`, maximize `t`.
fn certify(x: &FiniteMetricSpace, mask: u64) -> Option<Vec<Scalar>> {
    let n = x.len();
    let mut lp = LinearProgram::with_dimension(n + 1);
    let mut obj = vec![Scalar::zero(); n + 1];
    obj[n] = Scalar::one();
    lp = lp.maximize(obj);
    for (k, (a, b)) in pair_list(n).into_iter().enumerate() {
        let mut row = vec![Scalar::zero(); n + 1];
        row[a] += Scalar::one();
        row[b] += Scalar::one();
        if mask >> k & 1 == 1 {
            lp.add_eq(row, x.d(a, b).clone());
        } else {
            row[n] = -Scalar::one();
            lp.add_geq(row, x.d(a, b).clone());
        }
    }
    let mut cap = vec![Scalar::zero(); n + 1];
    cap[n] = -Scalar::one();
    lp.add_geq(cap, -Scalar::one());
    let sol = solve(&lp).ok()?;
    if sol.status != LpStatus::Optimal || !sol.optimum.as_ref()?.is_positive() {
        return None;
    }
    let (mut point, _) = relative_interior_point(&lp, &sol).ok()?;
    point.truncate(n);
    Some(point)
}

/// Whether some point of `Δ(X)` is tight exactly on `mask`; returns one.
pub fn certify_edge_set(x: &FiniteMetricSpace, edges: &EqualityGraph) -> Option<MetricFunction> {
    certify(x, edges.mask()).map(MetricFunction::new)
}

fn covers(n: usize, pairs: &[(usize, usize)], mask: u64) -> bool {
    let mut seen = 0u64;
    for (k, &(a, b)) in pairs.iter().enumerate() {
        if mask >> k & 1 == 1 {
            seen |= 1 << a | 1 << b;
        }
    }
    seen.count_ones() as usize == n
}

/// All cells of `E(X)`.
pub fn enumerate_cells(x: &FiniteMetricSpace, bound: usize) -> Result<TightSpanComplex, TightSpanError> {
    check_bound(x, bound)?;
    let n = x.len();
    let pairs = pair_list(n);
    let vertices = enumerate_vertices(x, bound)?;
    let vmasks: Vec<u64> = vertices.iter().map(|v| tight_mask(x, v.values())).collect();

    let mut candidates: BTreeSet<u64> = vmasks.iter().copied().collect();
    let mut frontier: Vec<u64> = candidates.iter().copied().collect();
    while let Some(m) = frontier.pop() {
        for &v in &vmasks {
            let c = m & v;
            if covers(n, &pairs, c) && candidates.insert(c) {
                frontier.push(c);
            }
        }
    }

    let certified: Vec<(u64, Vec<Scalar>)> = candidates
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|m| certify(x, m).map(|p| (m, p)))
        .collect();

    let mut cells = Vec::with_capacity(certified.len());
    for (mask, point) in certified {
        let interior_point = MetricFunction::new(point);
        let edges = EqualityGraph::from_mask(n, mask);
        if !is_extremal(x, &interior_point) || tight_mask(x, interior_point.values()) != mask {
            return Err(TightSpanError::Internal(format!(
                "certified point for edges {:?} is not an extremal function tight exactly there",
                edges.edges()
            )));
        }
        let dimension = cell_dimension(x, &edges)?;
        let vertex_ids = (0..vertices.len()).filter(|&k| vmasks[k] & mask == mask).collect();
        cells.push(Cell { edges, dimension, interior_point, vertex_ids });
    }
    cells.sort_by(|a, b| (a.dimension, &a.vertex_ids).cmp(&(b.dimension, &b.vertex_ids)));
    let top = cells.iter().map(|c| c.dimension).max().unwrap_or(0);
    let mut f_vector = vec![0; top + 1];
    for c in &cells {
        f_vector[c.dimension] += 1;
    }
    if f_vector[0] != vertices.len() {
        return Err(TightSpanError::Internal(format!(
            "{} vertices but {} zero-dimensional cells",
            vertices.len(),
            f_vector[0]
        )));
    }
    Ok(TightSpanComplex { space: x.clone(), vertices, cells, f_vector })
}

pub fn tight_span_dimension(x: &FiniteMetricSpace, bound: usize) -> Result<usize, TightSpanError> {
    Ok(enumerate_cells(x, bound)?.dimension())
}

/// A pair `(p, q)` with `f(p) + ‖f − g‖∞ + g(q) = d(p, q)`, first in
/// row-major order.
pub fn attain_xfgy(
    x: &FiniteMetricSpace,
    f: &MetricFunction,
    g: &MetricFunction,
) -> Result<(usize, usize), TightSpanError> {
    check_extremal(x, f)?;
    check_extremal(x, g)?;
    let dist = sup_distance(f, g)?;
    let n = x.len();
    (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .find(|&(p, q)| f.get(p) + &dist + g.get(q) == *x.d(p, q))
        .ok_or_else(|| TightSpanError::Internal("no pair attains the sup-distance".into()))
}

#[cfg(test)]
mod tests;
