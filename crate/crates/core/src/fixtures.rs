//! Small named spaces used throughout tests, docs and the CLI.

use crate::generate::cycle;
use crate::metric::{validate_metric, FiniteMetricSpace};
use crate::scalar::Scalar;

/// The 4-cycle `a b c d` with its graph metric.
pub fn c4() -> FiniteMetricSpace {
    cycle(4).expect("C4 is a metric")
}

/// Three points with `d(a,b) = 3`, `d(a,c) = 5`, `d(b,c) = 4`.
pub fn tripod_345() -> FiniteMetricSpace {
    FiniteMetricSpace::from_integer_matrix(&[&[0, 3, 5], &[3, 0, 4], &[5, 4, 0]]).unwrap()
}

/// Two points at distance `d`.
pub fn segment(d: Scalar) -> FiniteMetricSpace {
    FiniteMetricSpace::from_matrix(vec![vec![Scalar::zero(), d.clone()], vec![d, Scalar::zero()]])
        .expect("positive length")
}

/// Four leaves of a weighted tree.
pub fn tree4() -> FiniteMetricSpace {
    // a, b hang off u; c, d hang off v; u–v has length 2.
    FiniteMetricSpace::from_integer_matrix(&[
        &[0, 2, 4, 5],
        &[2, 0, 4, 5],
        &[4, 4, 0, 3],
        &[5, 5, 3, 0],
    ])
    .unwrap()
}

/// `{±s·e_i : i = 1..k} ⊂ ℓ∞^k`, labelled `+1, -1, +2, -2, …`. Antipodal
/// pairs are at distance `2s`, all other pairs at distance `s`.
pub fn orthoplex(k: usize, s: Scalar) -> FiniteMetricSpace {
    assert!(k >= 1 && s.is_positive());
    let m = 2 * k;
    let labels = (0..m)
        .map(|p| format!("{}{}", if p % 2 == 0 { '+' } else { '-' }, p / 2 + 1))
        .collect();
    let matrix = (0..m)
        .map(|p| {
            (0..m)
                .map(|q| {
                    if p == q {
                        Scalar::zero()
                    } else if p / 2 == q / 2 {
                        &s + &s
                    } else {
                        s.clone()
                    }
                })
                .collect()
        })
        .collect();
    validate_metric(labels, matrix).expect("orthoplex is a metric")
}
