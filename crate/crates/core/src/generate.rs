//! Deterministic instance generators.
//!
//! All randomness comes from a ChaCha8 stream seeded with a single `u64`, so
//! a `(kind, parameters, seed)` triple always produces the same space on
//! every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::metric::{default_labels, validate_metric, FiniteMetricSpace, MetricError};
use crate::scalar::{Scalar, DEFAULT_DENOMINATOR_BOUND};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generated matrix is not a metric: {0}")]
    NotMetric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Leaf-to-leaf distances of a random tree with rational edge weights.
    RandomTree { leaves: usize },
    /// Shortest-path metric of a random connected graph with integer weights.
    RandomGraph { points: usize, edge_probability: f64, max_weight: u32 },
    /// `side^dim` lattice points, sup-norm distance times `scale`.
    LinfGrid { dim: usize, side: usize, scale: Scalar },
    /// `side^dim` lattice points, Euclidean distance times `scale`, with each
    /// surd `sqrt(m)` replaced by one shared rational convergent whose
    /// denominator is at most `denominator_bound`.
    L2Grid { dim: usize, side: usize, scale: Scalar, denominator_bound: u64 },
    /// Graph metric of the cycle `C_m`.
    Cycle { m: usize },
}

impl Generator {
    pub fn l2_grid(dim: usize, side: usize, scale: Scalar) -> Self {
        Generator::L2Grid { dim, side, scale, denominator_bound: DEFAULT_DENOMINATOR_BOUND }
    }

    pub fn linf_grid(dim: usize, side: usize, scale: Scalar) -> Self {
        Generator::LinfGrid { dim, side, scale }
    }
}

pub fn generate(kind: &Generator, seed: u64) -> Result<FiniteMetricSpace, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        Generator::RandomTree { leaves } => random_tree(*leaves, &mut rng),
        Generator::RandomGraph { points, edge_probability, max_weight } => {
            random_graph(*points, *edge_probability, *max_weight, &mut rng)
        }
        Generator::LinfGrid { dim, side, scale } => grid(*dim, *side, scale, None),
        Generator::L2Grid { dim, side, scale, denominator_bound } => {
            grid(*dim, *side, scale, Some(*denominator_bound))
        }
        Generator::Cycle { m } => cycle(*m),
    }
}

fn invalid(msg: impl Into<String>) -> GenerateError {
    GenerateError::InvalidParameter(msg.into())
}

pub fn cycle(m: usize) -> Result<FiniteMetricSpace, GenerateError> {
    if m < 2 {
        return Err(invalid(format!("cycle needs m >= 2, got {m}")));
    }
    let matrix = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let k = i.abs_diff(j);
                    Scalar::from_integer(k.min(m - k) as i64)
                })
                .collect()
        })
        .collect();
    Ok(validate_metric(default_labels(m), matrix)?)
}

fn random_weight(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.random_range(1..=8), rng.random_range(1..=4))
}

fn random_tree(leaves: usize, rng: &mut ChaCha8Rng) -> Result<FiniteMetricSpace, GenerateError> {
    if leaves < 2 {
        return Err(invalid(format!("tree needs at least 2 leaves, got {leaves}")));
    }
    // Grow by splitting a random edge with a fresh internal node and hanging
    // the new leaf from it.
    let mut edges: Vec<(usize, usize, Scalar)> = vec![(0, 1, random_weight(rng))];
    let mut leaf_nodes = vec![0usize, 1];
    let mut node_count = 2;
    for _ in 2..leaves {
        let e = rng.random_range(0..edges.len());
        let (u, v, _) = edges.swap_remove(e);
        let mid = node_count;
        let leaf = node_count + 1;
        node_count += 2;
        edges.push((u, mid, random_weight(rng)));
        edges.push((mid, v, random_weight(rng)));
        edges.push((mid, leaf, random_weight(rng)));
        leaf_nodes.push(leaf);
    }
    let mut adj: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); node_count];
    for (u, v, w) in &edges {
        adj[*u].push((*v, w.clone()));
        adj[*v].push((*u, w.clone()));
    }
    let matrix = leaf_nodes
        .iter()
        .map(|&src| {
            let mut dist: Vec<Option<Scalar>> = vec![None; node_count];
            dist[src] = Some(Scalar::zero());
            let mut stack = vec![src];
            while let Some(u) = stack.pop() {
                let du = dist[u].clone().unwrap();
                for (v, w) in &adj[u] {
                    if dist[*v].is_none() {
                        dist[*v] = Some(&du + w);
                        stack.push(*v);
                    }
                }
            }
            leaf_nodes.iter().map(|&t| dist[t].clone().unwrap()).collect()
        })
        .collect();
    Ok(validate_metric(default_labels(leaves), matrix)?)
}

fn random_graph(
    points: usize,
    edge_probability: f64,
    max_weight: u32,
    rng: &mut ChaCha8Rng,
) -> Result<FiniteMetricSpace, GenerateError> {
    if points < 2 {
        return Err(invalid(format!("graph needs at least 2 points, got {points}")));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(invalid(format!("edge probability {edge_probability} not in [0, 1]")));
    }
    if max_weight == 0 {
        return Err(invalid("max weight must be positive"));
    }
    let mut dist: Vec<Vec<Option<Scalar>>> = vec![vec![None; points]; points];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = Some(Scalar::zero());
    }
    let add_edge = |dist: &mut Vec<Vec<Option<Scalar>>>, i: usize, j: usize, w: Scalar| {
        let better = match &dist[i][j] {
            Some(old) => &w < old,
            None => true,
        };
        if better {
            dist[i][j] = Some(w.clone());
            dist[j][i] = Some(w);
        }
    };
    for i in 1..points {
        let j = rng.random_range(0..i);
        let w = Scalar::from_integer(rng.random_range(1..=max_weight) as i64);
        add_edge(&mut dist, i, j, w);
    }
    for i in 0..points {
        for j in (i + 1)..points {
            let coin: f64 = rng.random();
            let w = Scalar::from_integer(rng.random_range(1..=max_weight) as i64);
            if coin < edge_probability {
                add_edge(&mut dist, i, j, w);
            }
        }
    }
    // Floyd–Warshall.
    for k in 0..points {
        for i in 0..points {
            for j in 0..points {
                if let (Some(a), Some(b)) = (&dist[i][k], &dist[k][j]) {
                    let via = a + b;
                    if dist[i][j].as_ref().is_none_or(|cur| &via < cur) {
                        dist[i][j] = Some(via);
                    }
                }
            }
        }
    }
    let matrix = dist
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.expect("graph is connected")).collect())
        .collect();
    Ok(validate_metric(default_labels(points), matrix)?)
}

fn lattice(dim: usize, side: usize) -> Vec<Vec<i64>> {
    let mut pts = vec![vec![]];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..side as i64).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Splits `n` into `g^2 * m` with `m` squarefree.
fn square_part(mut n: u64) -> (u64, u64) {
    let (mut g, mut m) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        g *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    (g, m * n)
}

fn grid(
    dim: usize,
    side: usize,
    scale: &Scalar,
    l2_bound: Option<u64>,
) -> Result<FiniteMetricSpace, GenerateError> {
    if dim == 0 {
        return Err(invalid("grid dimension must be at least 1"));
    }
    if side < 2 {
        return Err(invalid(format!("grid side must be at least 2, got {side}")));
    }
    if !scale.is_positive() {
        return Err(invalid(format!("grid scale must be positive, got {scale}")));
    }
    let pts = lattice(dim, side);
    let labels = pts
        .iter()
        .map(|p| format!("({})", p.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    let mut surds = std::collections::HashMap::new();
    let mut matrix = Vec::with_capacity(pts.len());
    for p in &pts {
        let mut row = Vec::with_capacity(pts.len());
        for q in &pts {
            let diffs = p.iter().zip(q).map(|(a, b)| a.abs_diff(*b));
            let raw = match l2_bound {
                None => Scalar::from_integer(diffs.max().unwrap_or(0) as i64),
                Some(bound) => {
                    let sq: u64 = diffs.map(|d| d * d).sum();
                    let (g, m) = square_part(sq);
                    let root = surds
                        .entry(m)
                        .or_insert_with(|| Scalar::sqrt_approx(m, bound))
                        .clone();
                    Scalar::from_integer(g as i64) * root
                }
            };
            row.push(raw * scale);
        }
        matrix.push(row);
    }
    Ok(validate_metric(labels, matrix)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_four() {
        let c = cycle(4).unwrap();
        assert_eq!(c.d(0, 1), &Scalar::one());
        assert_eq!(c.d(0, 2), &Scalar::from_integer(2));
        assert_eq!(c.d(1, 3), &Scalar::from_integer(2));
        assert!(cycle(1).is_err());
    }

    #[test]
    fn linf_grid_two_by_two() {
        let g = generate(&Generator::linf_grid(2, 2, Scalar::one()), 0).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.labels()[3], "(1,1)");
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.d(i, j), &Scalar::from_integer(i64::from(i != j)));
            }
        }
    }

    #[test]
    fn l2_grid_shares_surds() {
        let g = generate(&Generator::l2_grid(2, 3, Scalar::one()), 0).unwrap();
        let a = g.index_of("(0,0)").unwrap();
        let b = g.index_of("(1,1)").unwrap();
        let c = g.index_of("(2,2)").unwrap();
        // collinear triple stays exactly additive
        assert_eq!(g.d(a, c), &(g.d(a, b) + g.d(b, c)));
        assert!((g.d(a, b).to_f64() - 2f64.sqrt()).abs() < 1e-10);
        let scaled = generate(&Generator::l2_grid(2, 3, Scalar::from_integer(10)), 0).unwrap();
        assert_eq!(scaled.d(a, b), &(g.d(a, b) * Scalar::from_integer(10)));
    }

    #[test]
    fn square_part_factors() {
        assert_eq!(square_part(8), (2, 2));
        assert_eq!(square_part(5), (1, 5));
        assert_eq!(square_part(36), (6, 1));
        assert_eq!(square_part(0), (1, 0));
    }

    #[test]
    fn generators_are_deterministic_and_metric() {
        for seed in 0..20 {
            let t = generate(&Generator::RandomTree { leaves: 6 }, seed).unwrap();
            assert_eq!(t, generate(&Generator::RandomTree { leaves: 6 }, seed).unwrap());
            let g = Generator::RandomGraph { points: 7, edge_probability: 0.4, max_weight: 5 };
            assert_eq!(generate(&g, seed).unwrap(), generate(&g, seed).unwrap());
        }
        assert_ne!(
            generate(&Generator::RandomTree { leaves: 6 }, 1).unwrap(),
            generate(&Generator::RandomTree { leaves: 6 }, 2).unwrap()
        );
    }

    #[test]
    fn bad_parameters() {
        assert!(generate(&Generator::RandomTree { leaves: 1 }, 0).is_err());
        assert!(generate(&Generator::linf_grid(2, 1, Scalar::one()), 0).is_err());
        assert!(generate(&Generator::linf_grid(0, 3, Scalar::one()), 0).is_err());
        assert!(generate(&Generator::linf_grid(2, 3, Scalar::zero()), 0).is_err());
        let g = Generator::RandomGraph { points: 4, edge_probability: 1.5, max_weight: 3 };
        assert!(generate(&g, 0).is_err());
    }
}
