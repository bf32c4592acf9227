//! Exact rational linear programming.
//!
//! Small dense problems: every variable is free, constraints are equalities
//! or `≥` inequalities, the objective is maximized. The solver is a
//! two-phase tableau simplex with Bland's rule, so it terminates on
//! degenerate problems and its answers are exact.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("the optimal face is empty")]
    InfeasibleFace,
    #[error("relative interior requested for a program without an optimum")]
    NotOptimal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Scalar>,
    pub rhs: Scalar,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Scalar>, rhs: Scalar) -> Self {
        LinearConstraint { coeffs, rhs }
    }

    fn lhs(&self, x: &[Scalar]) -> Scalar {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `a·x − b`.
    pub fn slack(&self, x: &[Scalar]) -> Scalar {
        self.lhs(x) - &self.rhs
    }
}

/// `maximize objective·x` subject to `eq` rows (`a·x = b`) and `geq` rows
/// (`a·x ≥ b`). Variables are unrestricted in sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    pub objective: Vec<Scalar>,
    pub eq_constraints: Vec<LinearConstraint>,
    pub geq_constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub optimum: Option<Scalar>,
    pub point: Option<Vec<Scalar>>,
    /// Indices of `geq` constraints active at `point`.
    pub tight_set: Vec<usize>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        LpSolution { status, optimum: None, point: None, tight_set: Vec::new() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new(variables: Vec<String>) -> Self {
        let n = variables.len();
        LinearProgram {
            variables,
            objective: vec![Scalar::zero(); n],
            eq_constraints: Vec::new(),
            geq_constraints: Vec::new(),
        }
    }

    pub fn with_dimension(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn maximize(mut self, objective: Vec<Scalar>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_eq(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) {
        self.eq_constraints.push(LinearConstraint::new(coeffs, rhs));
    }

    pub fn add_geq(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) {
        self.geq_constraints.push(LinearConstraint::new(coeffs, rhs));
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(LpError::Malformed(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.len()
            )));
        }
        for (kind, rows) in [("equality", &self.eq_constraints), ("inequality", &self.geq_constraints)] {
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.coeffs.len() != n) {
                return Err(LpError::Malformed(format!(
                    "{kind} {i} has {} coefficients for {n} variables",
                    r.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, x: &[Scalar]) -> bool {
        self.eq_constraints.iter().all(|c| c.slack(x).is_zero())
            && self.geq_constraints.iter().all(|c| !c.slack(x).is_negative())
    }

    pub fn objective_value(&self, x: &[Scalar]) -> Scalar {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn tight_set(&self, x: &[Scalar]) -> Vec<usize> {
        (0..self.geq_constraints.len())
            .filter(|&j| self.geq_constraints[j].slack(x).is_zero())
            .collect()
    }
}

struct Tableau {
    /// Constraint rows followed by the objective row; last column is the
    /// right-hand side.
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    active_cols: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs_col(&self) -> usize {
        self.rows[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let rhs = self.rhs_col();
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in 0..=rhs {
                if !pivot_row[j].is_zero() {
                    row[j] -= &(&f * &pivot_row[j]);
                }
            }
        }
        self.basis[r] = c;
    }

    /// Sets the objective row for `maximize cost·x` and prices out the basis.
    fn set_objective(&mut self, cost: &[Scalar]) {
        let m = self.m();
        let width = self.rows[0].len();
        let mut obj = vec![Scalar::zero(); width];
        for (j, c) in cost.iter().enumerate() {
            obj[j] = -c;
        }
        for i in 0..m {
            let b = self.basis[i];
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for j in 0..width {
                    if !self.rows[i][j].is_zero() {
                        obj[j] -= &(&f * &self.rows[i][j]);
                    }
                }
            }
        }
        self.rows[m] = obj;
    }

    fn run(&mut self) -> PivotOutcome {
        let m = self.m();
        let rhs = self.rhs_col();
        loop {
            // Bland: lowest-index improving column.
            let Some(c) = (0..self.active_cols).find(|&j| self.rows[m][j].is_negative()) else {
                return PivotOutcome::Optimal;
            };
            let mut best: Option<(usize, Scalar)> = None;
            for i in 0..m {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rows[i][rhs] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return PivotOutcome::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;
    let nv = lp.num_vars();
    let ng = lp.geq_constraints.len();
    let rows_in: Vec<(&LinearConstraint, bool)> = lp
        .eq_constraints
        .iter()
        .map(|c| (c, false))
        .chain(lp.geq_constraints.iter().map(|c| (c, true)))
        .collect();
    let m = rows_in.len();
    // Columns: x⁺ (nv), x⁻ (nv), surplus (ng), artificial (m), rhs.
    let surplus0 = 2 * nv;
    let art0 = surplus0 + ng;
    let width = art0 + m + 1;
    let mut rows = Vec::with_capacity(m + 1);
    let mut g = 0;
    for (i, (c, is_geq)) in rows_in.iter().enumerate() {
        let mut row = vec![Scalar::zero(); width];
        for (v, a) in c.coeffs.iter().enumerate() {
            row[v] = a.clone();
            row[nv + v] = -a;
        }
        if *is_geq {
            row[surplus0 + g] = -Scalar::one();
            g += 1;
        }
        row[width - 1] = c.rhs.clone();
        if c.rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
        row[art0 + i] = Scalar::one();
        rows.push(row);
    }
    rows.push(vec![Scalar::zero(); width]);
    let mut t = Tableau { rows, basis: (art0..art0 + m).collect(), active_cols: art0 + m };

    // Phase 1: maximize −Σ artificials.
    let mut phase1 = vec![Scalar::zero(); art0 + m];
    for x in &mut phase1[art0..] {
        *x = -Scalar::one();
    }
    t.set_objective(&phase1);
    t.run();
    if t.rows[m][width - 1].is_negative() {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    // Drive zero-level artificials out; drop rows that are redundant.
    let mut i = 0;
    while i < t.m() {
        if t.basis[i] >= art0 {
            match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 over structural and surplus columns only.
    t.active_cols = art0;
    let mut cost = vec![Scalar::zero(); art0];
    for (v, c) in lp.objective.iter().enumerate() {
        cost[v] = c.clone();
        cost[nv + v] = -c;
    }
    t.set_objective(&cost);
    if let PivotOutcome::Unbounded = t.run() {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }
    let mut col_value = vec![Scalar::zero(); art0];
    let rhs = t.rhs_col();
    for (i, &b) in t.basis.iter().enumerate() {
        if b < art0 {
            col_value[b] = t.rows[i][rhs].clone();
        }
    }
    let point: Vec<Scalar> = (0..nv).map(|v| &col_value[v] - &col_value[nv + v]).collect();
    debug_assert!(lp.is_feasible_point(&point));
    let optimum = lp.objective_value(&point);
    let tight_set = lp.tight_set(&point);
    Ok(LpSolution { status: LpStatus::Optimal, optimum: Some(optimum), point: Some(point), tight_set })
}

/// A point of the optimal face at which exactly the constraints that are
/// tight on the whole face are tight. Returns the point and its tight set.
///
/// Each `≥` constraint not yet known to be slack somewhere on the face is
/// maximized over the face (with its slack capped at 1); maximizers with
/// positive slack are collected and the collection is averaged.
pub fn relative_interior_point(
    lp: &LinearProgram,
    solution: &LpSolution,
) -> Result<(Vec<Scalar>, Vec<usize>), LpError> {
    let (Some(optimum), Some(start)) = (&solution.optimum, &solution.point) else {
        return Err(LpError::NotOptimal);
    };
    let mut face = lp.clone();
    face.add_eq(lp.objective.clone(), optimum.clone());
    let mut points = vec![start.clone()];
    for (j, c) in lp.geq_constraints.iter().enumerate() {
        if points.iter().any(|p| c.slack(p).is_positive()) {
            continue;
        }
        let mut probe = face.clone().maximize(c.coeffs.clone());
        probe.add_geq(c.coeffs.iter().map(|a| -a).collect(), -(&c.rhs + Scalar::one()));
        let sol = solve(&probe)?;
        match sol.status {
            LpStatus::Infeasible => return Err(LpError::InfeasibleFace),
            LpStatus::Unbounded => unreachable!("slack of constraint {j} is capped"),
            LpStatus::Optimal => {
                let p = sol.point.unwrap();
                if c.slack(&p).is_positive() {
                    points.push(p);
                }
            }
        }
    }
    let k = Scalar::from_integer(points.len() as i64);
    let nv = lp.num_vars();
    let avg: Vec<Scalar> = (0..nv)
        .map(|v| points.iter().map(|p| &p[v]).sum::<Scalar>() / &k)
        .collect();
    let tight = lp.tight_set(&avg);
    Ok((avg, tight))
}
