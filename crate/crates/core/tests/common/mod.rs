#![allow(dead_code)]

use itertools::Itertools;
use nhyp_core::generate::{generate, Generator};
use nhyp_core::lp::{LinearConstraint, LinearProgram};
use nhyp_core::{FiniteMetricSpace, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random space with `lo ≤ |X| ≤ hi`: a tree, a graph metric, a cycle or
/// a small grid.
pub fn random_space(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> FiniteMetricSpace {
    let seed = rng.random::<u64>();
    let size = rng.random_range(lo..=hi);
    let kind = match rng.random_range(0..10) {
        0..=2 => Generator::RandomTree { leaves: size.max(2) },
        3..=6 => Generator::RandomGraph {
            points: size.max(2),
            edge_probability: rng.random_range(0.2..0.8),
            max_weight: rng.random_range(1..8),
        },
        7 if size >= 3 => Generator::Cycle { m: size },
        _ => {
            // grids whose size fits: 2x2 (4), 1 x size, 2x2x2 (8)
            let scale = Scalar::from_integer(rng.random_range(1..4));
            let (dim, side) = match size {
                4 => (2, 2),
                8 => (3, 2),
                s => (1, s.max(2)),
            };
            if rng.random::<bool>() {
                Generator::linf_grid(dim, side, scale)
            } else {
                Generator::l2_grid(dim, side, scale)
            }
        }
    };
    generate(&kind, seed).expect("generator parameters are valid")
}

fn solve_square(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> =
        a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        let pr = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for j in 0..=n {
                    row[j] -= &(&f * &pr[j]);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Vertices of a pointed LP polyhedron whose equality rows are independent,
/// by solving every square subsystem.
pub fn lp_vertices(lp: &LinearProgram) -> Vec<Vec<Scalar>> {
    let nv = lp.num_vars();
    let ne = lp.eq_constraints.len();
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for subset in (0..lp.geq_constraints.len()).combinations(nv - ne) {
        let rows: Vec<&LinearConstraint> = lp
            .eq_constraints
            .iter()
            .chain(subset.iter().map(|&j| &lp.geq_constraints[j]))
            .collect();
        let a: Vec<Vec<Scalar>> = rows.iter().map(|r| r.coeffs.clone()).collect();
        let b: Vec<Scalar> = rows.iter().map(|r| r.rhs.clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            if lp.is_feasible_point(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}
