//! ℓ∞-orthoplex witnesses `{±s·e_i} ⊂ ℓ∞^{n+1}` inside the tight span.
//!
//! For a paired set `Z = {x_i : i ∈ I_n}` of distinct points, the *fiber*
//! is the affine space of functions with `f(x_i) + f(x_{-i}) = d(x_i, x_{-i})`
//! on every matched (red) pair. `M(f)` is the least slack
//! `f(x) + f(y) − d(x,y)` over the unmatched (blue) pairs. Maximizing `M`
//! by LP gives a scale `s`; when `s > 0` the tight blue pairs and the red
//! pairs contain an alternating structure that yields a permutation
//! `α ≠ -id` with
//!
//! ```text
//! Σ_i d(x_i, x_{-i}) = Σ_i d(x_i, x_{α(i)}) + k·s
//! ```
//!
//! and the functions `f ± s` on each red pair form an orthoplex of scale `s`
//! in `E(Z)`.

use itertools::Itertools;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::family::{opposite, signed_index, IndexPermutation, PairedFamily};
use crate::lp::{relative_interior_point, solve, LinearProgram, LpStatus};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;
use crate::tightspan::{check_extremal, sup_distance, MetricFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("orthoplex witnesses need n ≥ 1")]
    NeedsPositiveN,
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("fiber points must be pairwise distinct")]
    RepeatedPoint,
    #[error("scale {0} is not positive")]
    NonPositiveScale(Scalar),
    #[error("red pair at positions ({0}, {1}) is half covered by blue pairs")]
    BothOrNeither(usize, usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// The fiber LP over a paired family: variables are `f` by position, then
/// `t`; equalities on red pairs, `f(p) + f(q) − t ≥ d` on blue pairs
/// (listed as in [`blue_pairs`]); maximize `t`.
pub fn fiber_program(x: &FiniteMetricSpace, family: &PairedFamily) -> LinearProgram {
    let m = family.size();
    let mut obj = vec![Scalar::zero(); m + 1];
    obj[m] = Scalar::one();
    let mut lp = LinearProgram::with_dimension(m + 1).maximize(obj);
    let d = |p: usize, q: usize| x.d(family.at(p), family.at(q)).clone();
    for p in (0..m).step_by(2) {
        let mut row = vec![Scalar::zero(); m + 1];
        row[p] = Scalar::one();
        row[p + 1] = Scalar::one();
        lp.add_eq(row, d(p, p + 1));
    }
    for (p, q) in blue_pairs(family.n()) {
        let mut row = vec![Scalar::zero(); m + 1];
        row[p] = Scalar::one();
        row[q] = Scalar::one();
        row[m] = -Scalar::one();
        lp.add_geq(row, d(p, q));
    }
    lp
}

/// Position pairs `p < q` with `q ≠ -p`, row-major.
pub fn blue_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..2 * (n + 1)).tuple_combinations().filter(|&(p, q)| q != opposite(p)).collect()
}

fn check_fiber(x: &FiniteMetricSpace, family: &PairedFamily) -> Result<(), WitnessError> {
    if family.n() == 0 {
        return Err(WitnessError::NeedsPositiveN);
    }
    if let Some(&p) = family.entries().iter().find(|&&p| p >= x.len()) {
        return Err(WitnessError::PointOutOfRange(p));
    }
    if !family.is_injective() {
        return Err(WitnessError::RepeatedPoint);
    }
    Ok(())
}

/// `max M` over the fiber, without tie-breaking.
pub fn fiber_scale(x: &FiniteMetricSpace, family: &PairedFamily) -> Result<Scalar, WitnessError> {
    check_fiber(x, family)?;
    let sol = solve(&fiber_program(x, family)).map_err(|e| WitnessError::Internal(e.to_string()))?;
    match (sol.status, sol.optimum) {
        (LpStatus::Optimal, Some(s)) => Ok(s),
        (status, _) => Err(WitnessError::Internal(format!("fiber LP is {status:?}"))),
    }
}

/// A maximizer of `M` whose tight blue set is as small as possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberOptimum {
    pub s: Scalar,
    /// Values by position.
    pub f: Vec<Scalar>,
    /// Blue pairs (positions) attaining `M(f) = s`.
    pub blue: Vec<(usize, usize)>,
}

pub fn max_m(x: &FiniteMetricSpace, family: &PairedFamily) -> Result<FiberOptimum, WitnessError> {
    check_fiber(x, family)?;
    let lp = fiber_program(x, family);
    let internal = |e: crate::lp::LpError| WitnessError::Internal(e.to_string());
    let sol = solve(&lp).map_err(internal)?;
    let Some(s) = sol.optimum.clone() else {
        return Err(WitnessError::Internal(format!("fiber LP is {:?}", sol.status)));
    };
    let (mut f, tight) = relative_interior_point(&lp, &sol).map_err(internal)?;
    f.truncate(family.size());
    let pairs = blue_pairs(family.n());
    let blue = tight.into_iter().map(|j| pairs[j]).collect();
    Ok(FiberOptimum { s, f, blue })
}

/// Red/blue structure found by the alternating walk, in positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlternatingGraph {
    /// `v0 v1 … v_{2L-1}`: `v_{2j} v_{2j+1}` red, `v_{2j+1} v_{2j+2}` blue,
    /// closing edge blue.
    Cycle(Vec<usize>),
    /// Two loops based at `z` and `z'`, each starting and ending with a blue
    /// edge, joined by `path` from `z` to `z'` that starts and ends red.
    LoopsPath { first_loop: Vec<usize>, path: Vec<usize>, second_loop: Vec<usize> },
}

impl AlternatingGraph {
    pub fn kind(&self) -> &'static str {
        match self {
            AlternatingGraph::Cycle(_) => "cycle",
            AlternatingGraph::LoopsPath { .. } => "loops_path",
        }
    }
}

/// Follows alternating paths from the first red pair touching a blue pair.
pub fn build_alternating_graph(
    n: usize,
    s: &Scalar,
    blue: &[(usize, usize)],
) -> Result<AlternatingGraph, WitnessError> {
    if !s.is_positive() {
        return Err(WitnessError::NonPositiveScale(s.clone()));
    }
    let m = 2 * (n + 1);
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(p, q) in blue {
        nbrs[p].push(q);
        nbrs[q].push(p);
    }
    for v in nbrs.iter_mut() {
        v.sort_unstable();
    }
    for p in (0..m).step_by(2) {
        if nbrs[p].is_empty() != nbrs[p + 1].is_empty() {
            return Err(WitnessError::BothOrNeither(p, p + 1));
        }
    }
    let start = (0..m)
        .find(|&p| !nbrs[p].is_empty())
        .ok_or_else(|| WitnessError::Internal("no blue pairs".into()))?;

    // Walks red then blue from `from` until a vertex in `seen` (or on the
    // walk itself) comes up; returns the walk and the repeated vertex. The
    // repeat always arrives over a blue edge.
    let walk = |from: usize, seen: &[usize]| -> (Vec<usize>, usize) {
        let mut path = vec![from];
        let mut cur = from;
        loop {
            let red = opposite(cur);
            path.push(red);
            let next = nbrs[red][0];
            if path.contains(&next) || seen.contains(&next) {
                return (path, next);
            }
            path.push(next);
            cur = next;
        }
    };

    let (first, z) = walk(start, &[]);
    let j = first.iter().position(|&v| v == z).expect("repeat lies on the walk");
    if j % 2 == 0 {
        return Ok(AlternatingGraph::Cycle(first[j..].to_vec()));
    }
    // `z` was entered by red and left by blue: a loop based at `z`.
    let first_loop = first[j..].to_vec();
    let (second, z2) = walk(z, &first_loop[1..]);
    if let Some(t) = second.iter().position(|&v| v == z2) {
        if t % 2 == 0 {
            return Ok(AlternatingGraph::Cycle(second[t..].to_vec()));
        }
        return Ok(AlternatingGraph::LoopsPath {
            first_loop,
            path: second[..=t].to_vec(),
            second_loop: second[t..].to_vec(),
        });
    }
    // The second walk ran back into the first loop: splice an alternating
    // cycle out of the walk and one arc of the loop.
    let t = first_loop.iter().position(|&v| v == z2).expect("repeat lies on the loop");
    let mut cycle = second;
    if t % 2 == 1 {
        cycle.extend_from_slice(&first_loop[t..]);
    } else {
        cycle.extend(first_loop[1..=t].iter().rev());
    }
    Ok(AlternatingGraph::Cycle(cycle))
}

/// The permutation read off the alternating graph and its blue count `k`;
/// checks `Σ d(x_i, x_{-i}) = Σ d(x_i, x_{α(i)}) + k·s`.
pub fn extract_permutation(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
    s: &Scalar,
    graph: &AlternatingGraph,
) -> Result<(IndexPermutation, usize), WitnessError> {
    let n = family.n();
    let m = family.size();
    let mut image: Vec<usize> = (0..m).map(opposite).collect();
    let mut k = 0;
    let mut advance = |cycle: &[usize], image: &mut Vec<usize>| {
        for (i, &v) in cycle.iter().enumerate() {
            let w = cycle[(i + 1) % cycle.len()];
            image[v] = w;
            if w != opposite(v) {
                k += 1;
            }
        }
    };
    match graph {
        AlternatingGraph::Cycle(c) => advance(c, &mut image),
        AlternatingGraph::LoopsPath { first_loop, path, second_loop } => {
            advance(first_loop, &mut image);
            advance(second_loop, &mut image);
            for e in path[1..path.len() - 1].chunks(2) {
                image[e[0]] = e[1];
                image[e[1]] = e[0];
                k += 2;
            }
        }
    }
    let alpha = IndexPermutation::from_positions(n, image)
        .map_err(|e| WitnessError::Internal(format!("walk did not give a permutation: {e}")))?;
    let d = |p: usize, q: usize| x.d(family.at(p), family.at(q)).clone();
    let lhs: Scalar = (0..m).map(|p| d(p, opposite(p))).sum();
    let rhs: Scalar =
        (0..m).map(|p| d(p, alpha.image(p))).sum::<Scalar>() + s * Scalar::from_integer(k as i64);
    if lhs != rhs {
        return Err(WitnessError::Internal(format!(
            "permutation identity fails: {lhs} ≠ {rhs} with k = {k}"
        )));
    }
    if alpha.is_minus_id() || k < 2 || k > 2 * n {
        return Err(WitnessError::Internal(format!("blue count k = {k} outside [2, {}]", 2 * n)));
    }
    Ok((alpha, k))
}

/// `f_p = f` except `f_p(p) = f(p) + s` and `f_p(-p) = f(-p) − s`, for every
/// position `p`. Each is checked to be extremal on `zspace` and the family
/// to realize antipodal distance `2s` and all other distances `s`.
pub fn build_orthoplex(
    zspace: &FiniteMetricSpace,
    f: &[Scalar],
    s: &Scalar,
) -> Result<Vec<MetricFunction>, WitnessError> {
    if !s.is_positive() {
        return Err(WitnessError::NonPositiveScale(s.clone()));
    }
    let m = f.len();
    let functions: Vec<MetricFunction> = (0..m)
        .map(|p| {
            let mut v = f.to_vec();
            v[p] += s;
            v[opposite(p)] -= s;
            MetricFunction::new(v)
        })
        .collect();
    for (p, g) in functions.iter().enumerate() {
        check_extremal(zspace, g)
            .map_err(|e| WitnessError::Internal(format!("f_{}: {e}", signed_index(p))))?;
    }
    let two_s = s + s;
    for p in 0..m {
        for q in p + 1..m {
            let want = if q == opposite(p) { &two_s } else { s };
            let got = sup_distance(&functions[p], &functions[q]).expect("same length");
            if got != *want {
                return Err(WitnessError::Internal(format!(
                    "‖f_{} − f_{}‖ = {got}, expected {want}",
                    signed_index(p),
                    signed_index(q)
                )));
            }
        }
    }
    Ok(functions)
}

/// A verified orthoplex of scale `s` in `E(Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoplexWitness {
    pub family: PairedFamily,
    /// `Z` as a space, points in position order.
    pub zspace: FiniteMetricSpace,
    pub s: Scalar,
    pub f: Vec<Scalar>,
    pub blue: Vec<(usize, usize)>,
    pub graph: AlternatingGraph,
    pub alpha: IndexPermutation,
    pub k: usize,
    /// `f_i` by position.
    pub functions: Vec<MetricFunction>,
}

impl OrthoplexWitness {
    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn to_json(&self) -> Value {
        let z = &self.zspace;
        json!({
            "s": self.s.to_string(),
            "Z": z.labels(),
            "pairing": (0..self.family.size()).step_by(2)
                .map(|p| [z.label(p), z.label(p + 1)]).collect::<Vec<_>>(),
            "alpha": serde_json::to_value(&self.alpha).expect("serializable"),
            "k": self.k,
            "type": self.graph.kind(),
            "functions": self.functions.iter().enumerate().map(|(p, g)| json!({
                "index": signed_index(p),
                "values": g.to_json(z),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs the whole construction on one paired family. `Ok(None)` when the
/// fiber maximum is not positive.
pub fn orthoplex_witness(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
) -> Result<Option<OrthoplexWitness>, WitnessError> {
    let opt = max_m(x, family)?;
    if !opt.s.is_positive() {
        return Ok(None);
    }
    let graph = build_alternating_graph(family.n(), &opt.s, &opt.blue)?;
    let (alpha, k) = extract_permutation(x, family, &opt.s, &graph)?;
    let zspace = x
        .submetric_indices(family.entries())
        .map_err(|e| WitnessError::Internal(e.to_string()))?;
    let functions = build_orthoplex(&zspace, &opt.f, &opt.s)?;
    Ok(Some(OrthoplexWitness {
        family: family.clone(),
        zspace,
        s: opt.s,
        f: opt.f,
        blue: opt.blue,
        graph,
        alpha,
        k,
        functions,
    }))
}

/// Perfect matchings of `points`, smallest element paired first, partners
/// in increasing order.
fn matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let a = points[0];
    let mut out = Vec::new();
    for i in 1..points.len() {
        let rest: Vec<usize> =
            points[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &p)| p).collect();
        for mut m in matchings(&rest) {
            m.insert(0, (a, points[i]));
            out.push(m);
        }
    }
    out
}

/// Every paired family of distinct points, ordered by subset then matching.
pub fn paired_subsets(points: usize, n: usize) -> Vec<PairedFamily> {
    (0..points)
        .combinations(2 * (n + 1))
        .flat_map(|z| matchings(&z))
        .map(|pairs| PairedFamily::from_pairs(&pairs))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestScale {
    pub n: usize,
    /// `None` when `|X| < 2(n+1)`.
    pub s_hat: Option<Scalar>,
    /// First maximizing family.
    pub family: Option<PairedFamily>,
    pub witness: Option<OrthoplexWitness>,
    pub families_checked: usize,
}

/// Largest fiber scale over all paired subsets; the witness is built for
/// the first maximizer when the scale is positive.
pub fn best_scale(x: &FiniteMetricSpace, n: usize) -> Result<BestScale, WitnessError> {
    if n == 0 {
        return Err(WitnessError::NeedsPositiveN);
    }
    let families = paired_subsets(x.len(), n);
    let scales: Vec<Scalar> = families
        .par_iter()
        .map(|f| fiber_scale(x, f))
        .collect::<Result<_, _>>()?;
    let mut best: Option<usize> = None;
    for (i, s) in scales.iter().enumerate() {
        if best.is_none_or(|b| *s > scales[b]) {
            best = Some(i);
        }
    }
    let Some(b) = best else {
        return Ok(BestScale { n, s_hat: None, family: None, witness: None, families_checked: 0 });
    };
    let family = families[b].clone();
    let witness = orthoplex_witness(x, &family)?;
    Ok(BestScale {
        n,
        s_hat: Some(scales[b].clone()),
        family: Some(family),
        witness,
        families_checked: families.len(),
    })
}
