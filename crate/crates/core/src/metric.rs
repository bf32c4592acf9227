//! Finite metric spaces with exact distance matrices.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

/// A single failed metric axiom. Indices refer to positions in the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateLabel { label: String },
    NonZeroDiagonal { point: usize },
    Asymmetric { a: usize, b: usize },
    NonPositive { a: usize, b: usize },
    /// `d(a, c) > d(a, via) + d(via, c)`.
    Triangle { a: usize, c: usize, via: usize },
}

impl Violation {
    pub fn describe(&self, labels: &[String], matrix: &[Vec<Scalar>]) -> String {
        let l = |i: usize| labels.get(i).map(String::as_str).unwrap_or("?");
        match self {
            Violation::DuplicateLabel { label } => format!("duplicate label `{label}`"),
            Violation::NonZeroDiagonal { point } => {
                format!("d({0},{0}) = {1} is not zero", l(*point), matrix[*point][*point])
            }
            Violation::Asymmetric { a, b } => format!(
                "asymmetry at ({},{}): {} != {}",
                l(*a),
                l(*b),
                matrix[*a][*b],
                matrix[*b][*a]
            ),
            Violation::NonPositive { a, b } => {
                format!("d({},{}) = {} must be positive", l(*a), l(*b), matrix[*a][*b])
            }
            Violation::Triangle { a, c, via } => format!(
                "triangle ({},{}) via {}: {} > {} + {}",
                l(*a),
                l(*c),
                l(*via),
                matrix[*a][*c],
                matrix[*a][*via],
                matrix[*via][*c]
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("{labels} labels for a {size}x{size} matrix")]
    LabelCount { labels: usize, size: usize },
    #[error("matrix violates {} metric axiom instance(s)", .0.len())]
    Violations(Vec<Violation>),
    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("subset must be non-empty")]
    EmptySubset,
}

/// A validated finite metric space. Points are addressed by position;
/// labels are only carried for I/O.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    matrix: Vec<Vec<Scalar>>,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteMetricSpace {:?}", self.points)?;
        for row in &self.matrix {
            writeln!(f, "  {:?}", row)?;
        }
        Ok(())
    }
}

/// Default labels `a, b, ..., z, aa, ab, ...`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|mut i| {
            let mut s = Vec::new();
            loop {
                s.push(b'a' + (i % 26) as u8);
                if i < 26 {
                    break;
                }
                i = i / 26 - 1;
            }
            s.reverse();
            String::from_utf8(s).unwrap()
        })
        .collect()
}

/// Checks every metric axiom and returns either the space or every violated
/// axiom instance.
pub fn validate_metric(
    points: Vec<String>,
    matrix: Vec<Vec<Scalar>>,
) -> Result<FiniteMetricSpace, MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
        }
    }
    if points.len() != n {
        return Err(MetricError::LabelCount { labels: points.len(), size: n });
    }

    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for p in &points {
        if !seen.insert(p.as_str()) {
            violations.push(Violation::DuplicateLabel { label: p.clone() });
        }
    }
    for i in 0..n {
        if !matrix[i][i].is_zero() {
            violations.push(Violation::NonZeroDiagonal { point: i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[i][j] != matrix[j][i] {
                violations.push(Violation::Asymmetric { a: i, b: j });
            }
            if !matrix[i][j].is_positive() || !matrix[j][i].is_positive() {
                violations.push(Violation::NonPositive { a: i, b: j });
            }
        }
    }
    for a in 0..n {
        for c in (a + 1)..n {
            for via in 0..n {
                if via == a || via == c {
                    continue;
                }
                if matrix[a][c] > &matrix[a][via] + &matrix[via][c] {
                    violations.push(Violation::Triangle { a, c, via });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(FiniteMetricSpace { points, matrix })
    } else {
        Err(MetricError::Violations(violations))
    }
}

impl FiniteMetricSpace {
    /// Builds a space with default labels.
    pub fn from_matrix(matrix: Vec<Vec<Scalar>>) -> Result<Self, MetricError> {
        let labels = default_labels(matrix.len());
        validate_metric(labels, matrix)
    }

    /// Convenience constructor from integer distances.
    pub fn from_integer_matrix(rows: &[&[i64]]) -> Result<Self, MetricError> {
        Self::from_matrix(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_integer(x)).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Scalar {
        &self.matrix[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn diameter(&self) -> Scalar {
        self.matrix
            .iter()
            .flat_map(|r| r.iter())
            .max()
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Restriction to the given points, in the order given.
    pub fn submetric(&self, labels: &[&str]) -> Result<Self, MetricError> {
        let idx = labels
            .iter()
            .map(|l| self.index_of(l).ok_or_else(|| MetricError::UnknownLabel(l.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.submetric_indices(&idx)
    }

    pub fn submetric_indices(&self, idx: &[usize]) -> Result<Self, MetricError> {
        if idx.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.len()) {
            return Err(MetricError::IndexOutOfRange(bad));
        }
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        let matrix = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.matrix[i][j].clone()).collect())
            .collect();
        // Repeated indices produce a zero off-diagonal distance; let validation
        // report it rather than silently returning a pseudometric.
        validate_metric(points, matrix)
    }

    /// Same distances under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Self, MetricError> {
        validate_metric(labels, self.matrix.clone())
    }

    /// Multiplies every distance by a positive factor.
    pub fn scaled(&self, factor: &Scalar) -> Self {
        assert!(factor.is_positive(), "scale factor must be positive");
        FiniteMetricSpace {
            points: self.points.clone(),
            matrix: self
                .matrix
                .iter()
                .map(|r| r.iter().map(|x| x * factor).collect())
                .collect(),
        }
    }
}

/// The ℓ∞-product: labels `(x,y)` in row-major order, distance the
/// coordinatewise maximum.
pub fn linf_product(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> FiniteMetricSpace {
    let mut points = Vec::with_capacity(a.len() * b.len());
    let mut coords = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            points.push(format!("({},{})", a.label(i), b.label(j)));
            coords.push((i, j));
        }
    }
    let matrix = coords
        .iter()
        .map(|&(i, j)| {
            coords
                .iter()
                .map(|&(k, l)| Scalar::max_of(a.d(i, k).clone(), b.d(j, l).clone()))
                .collect()
        })
        .collect();
    FiniteMetricSpace { points, matrix }
}

/// Builds a space from arbitrary exact values with no checks. Only for
/// constructions that are metric by definition (sup-distance between
/// distinct functions, products of valid spaces).
pub(crate) fn trusted(points: Vec<String>, matrix: Vec<Vec<Scalar>>) -> FiniteMetricSpace {
    debug_assert!(validate_metric(points.clone(), matrix.clone()).is_ok());
    FiniteMetricSpace { points, matrix }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from_integer(x)).collect()).collect()
    }

    pub(crate) fn c4() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integer_matrix(&[
            &[0, 1, 2, 1],
            &[1, 0, 1, 2],
            &[2, 1, 0, 1],
            &[1, 2, 1, 0],
        ])
        .unwrap()
    }

    #[test]
    fn smallest_metric_is_valid() {
        let x = FiniteMetricSpace::from_matrix(int(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn asymmetry_is_reported() {
        let err = FiniteMetricSpace::from_matrix(int(&[&[0, 1], &[2, 0]])).unwrap_err();
        assert_eq!(err, MetricError::Violations(vec![Violation::Asymmetric { a: 0, b: 1 }]));
    }

    #[test]
    fn triangle_failure_is_reported() {
        let m = int(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]);
        let err = FiniteMetricSpace::from_matrix(m.clone()).unwrap_err();
        let MetricError::Violations(v) = err else { panic!() };
        assert_eq!(v, vec![Violation::Triangle { a: 0, c: 2, via: 1 }]);
        let labels = default_labels(3);
        assert_eq!(v[0].describe(&labels, &m), "triangle (a,c) via b: 3 > 1 + 1");
    }

    #[test]
    fn every_violation_instance_is_listed() {
        let m = int(&[&[1, 0, 5], &[0, 0, 1], &[4, 1, 0]]);
        let MetricError::Violations(v) = FiniteMetricSpace::from_matrix(m).unwrap_err() else {
            panic!()
        };
        assert!(v.contains(&Violation::NonZeroDiagonal { point: 0 }));
        assert!(v.contains(&Violation::NonPositive { a: 0, b: 1 }));
        assert!(v.contains(&Violation::Asymmetric { a: 0, b: 2 }));
        assert!(v.contains(&Violation::Triangle { a: 0, c: 2, via: 1 }));
    }

    #[test]
    fn shape_errors() {
        assert_eq!(FiniteMetricSpace::from_matrix(vec![]).unwrap_err(), MetricError::Empty);
        let err = FiniteMetricSpace::from_matrix(vec![vec![Scalar::zero(), Scalar::one()]]);
        assert!(matches!(err, Err(MetricError::NotSquare { .. })));
        let dup = validate_metric(vec!["a".into(), "a".into()], int(&[&[0, 1], &[1, 0]]));
        assert!(matches!(dup, Err(MetricError::Violations(_))));
    }

    #[test]
    fn default_label_sequence() {
        let l = default_labels(28);
        assert_eq!(l[25], "z");
        assert_eq!(l[26], "aa");
        assert_eq!(l[27], "ab");
    }

    #[test]
    fn product_of_two_segments() {
        let seg = FiniteMetricSpace::from_integer_matrix(&[&[0, 1], &[1, 0]]).unwrap();
        let p = linf_product(&seg, &seg);
        assert_eq!(p.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0 } else { 1 };
                assert_eq!(p.d(i, j), &Scalar::from_integer(expect));
            }
        }
        assert_eq!(p.label(1), "(a,b)");
    }

    #[test]
    fn product_with_point_is_isometric() {
        let pt = FiniteMetricSpace::from_integer_matrix(&[&[0]]).unwrap();
        let x = c4();
        let p = linf_product(&x, &pt);
        assert_eq!(p.matrix(), x.matrix());
    }

    #[test]
    fn path_grid_corner_distance() {
        let p3 = FiniteMetricSpace::from_integer_matrix(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])
            .unwrap();
        let g = linf_product(&p3, &p3);
        assert_eq!(g.len(), 9);
        let aa = g.index_of("(a,a)").unwrap();
        let cc = g.index_of("(c,c)").unwrap();
        assert_eq!(g.d(aa, cc), &Scalar::from_integer(2));
        assert!(validate_metric(g.labels().to_vec(), g.matrix().to_vec()).is_ok());
    }

    #[test]
    fn submetric_cases() {
        let x = c4();
        let all: Vec<&str> = x.labels().iter().map(String::as_str).collect();
        assert_eq!(x.submetric(&all).unwrap(), x);
        let opp = x.submetric(&["a", "c"]).unwrap();
        assert_eq!(opp.d(0, 1), &Scalar::from_integer(2));
        let tri = FiniteMetricSpace::from_integer_matrix(&[&[0, 3, 5], &[3, 0, 4], &[5, 4, 0]])
            .unwrap();
        assert_eq!(tri.submetric(&["a", "b"]).unwrap().d(0, 1), &Scalar::from_integer(3));
        assert_eq!(x.submetric(&["q"]).unwrap_err(), MetricError::UnknownLabel("q".into()));
        assert_eq!(x.submetric(&[]).unwrap_err(), MetricError::EmptySubset);
    }
}
