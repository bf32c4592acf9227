//! `(n, δ)`-hyperbolicity of finite metric spaces.
//!
//! For a family `(x_i)` indexed by `I_n` the *defect* is the smallest
//! `δ ≥ 0` with
//!
//! ```text
//! Σ_i d(x_i, x_{-i}) ≤ Σ_i d(x_i, x_{α(i)}) + 2δ   for some α ≠ -id,
//! ```
//!
//! and the least hyperbolicity constant of a space is the largest defect
//! over all families. The maximum over `α ≠ -id` is computed either by
//! enumerating every permutation (the reference oracle) or by solving
//! `2(n+1)` maximum-weight assignments, each forbidding one arc `(i, -i)`.

mod assignment;
mod weights;

use std::cmp::Reverse;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::family::{opposite, IndexPermutation, PairedFamily};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;
use weights::{ScaledSpace, Weight, Weights};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperbolicityError {
    #[error("permutation acts on I_{alpha} but the family is indexed by I_{family}")]
    IndexSetMismatch { family: usize, alpha: usize },
    #[error("family refers to point {0}, outside the space")]
    PointOutOfRange(usize),
    #[error("fixed-point-free permutations need n >= 1")]
    NeedsPositiveN,
}

/// How `max_{α ≠ -id} S(α)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Every permutation of `I_n`, lexicographic order; first maximizer wins.
    Brute,
    /// Restricted maximum-weight assignments.
    #[default]
    Assignment,
}

/// Which families `min_delta` ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    /// Arbitrary families, points may repeat.
    #[default]
    Full,
    /// Injective families only.
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub family: PairedFamily,
    /// `Σ d(x_i, x_{-i})`.
    pub lhs: Scalar,
    pub best_alpha: IndexPermutation,
    pub best_score: Scalar,
    /// `max(0, (lhs - best_score) / 2)`.
    pub defect: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinDelta {
    pub n: usize,
    pub delta: Scalar,
    /// A family attaining `delta` and its certifying permutation.
    pub witness: DefectReport,
    pub families_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperbolicityCheck {
    pub holds: bool,
    pub min_delta: Option<Scalar>,
    pub violating_family: Option<DefectReport>,
}

fn check_family(x: &FiniteMetricSpace, family: &PairedFamily) -> Result<(), HyperbolicityError> {
    match family.entries().iter().find(|&&p| p >= x.len()) {
        Some(&p) => Err(HyperbolicityError::PointOutOfRange(p)),
        None => Ok(()),
    }
}

/// `S(α) = Σ_i d(x_i, x_{α(i)})`.
pub fn permutation_score(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
    alpha: &IndexPermutation,
) -> Result<Scalar, HyperbolicityError> {
    if alpha.n() != family.n() {
        return Err(HyperbolicityError::IndexSetMismatch { family: family.n(), alpha: alpha.n() });
    }
    check_family(x, family)?;
    Ok((0..family.size()).map(|p| x.d(family.at(p), family.at(alpha.image(p)))).sum())
}

/// `Σ_i d(x_i, x_{-i})`.
pub fn paired_sum(x: &FiniteMetricSpace, family: &PairedFamily) -> Scalar {
    (0..family.size()).map(|p| x.d(family.at(p), family.at(opposite(p)))).sum()
}

/// Local weight matrix `w[p][q] = d(x_p, x_q)` of a family.
fn local<W: Weight>(d: &[Vec<W>], entries: &[usize]) -> Vec<Vec<W>> {
    entries.iter().map(|&a| entries.iter().map(|&b| d[a][b].clone()).collect()).collect()
}

fn score<W: Weight>(w: &[Vec<W>], perm: &[usize]) -> W {
    perm.iter().enumerate().fold(W::zero(), |acc, (p, &q)| acc + w[p][q].clone())
}

fn lhs<W: Weight>(w: &[Vec<W>]) -> W {
    (0..w.len()).fold(W::zero(), |acc, p| acc + w[p][opposite(p)].clone())
}

fn is_minus_id(perm: &[usize]) -> bool {
    perm.iter().enumerate().all(|(p, &q)| q == opposite(p))
}

/// In-place lexicographic successor; `false` after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Lexicographically first maximizer of `S` among permutations accepted by
/// `keep`.
fn brute_best<W: Weight>(w: &[Vec<W>], keep: impl Fn(&[usize]) -> bool) -> Option<(W, Vec<usize>)> {
    let mut perm: Vec<usize> = (0..w.len()).collect();
    let mut best: Option<(W, Vec<usize>)> = None;
    loop {
        if keep(&perm) {
            let s = score(w, &perm);
            if best.as_ref().is_none_or(|(b, _)| &s > b) {
                best = Some((s, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn assignment_best<W: Weight>(w: &[Vec<W>]) -> (W, Vec<usize>) {
    let mut best: Option<(W, Vec<usize>)> = None;
    for r in 0..w.len() {
        let perm = assignment::max_weight_assignment(w, Some((r, opposite(r))));
        let s = score(w, &perm);
        if best.as_ref().is_none_or(|(b, _)| &s > b) {
            best = Some((s, perm));
        }
    }
    best.expect("I_n is never empty")
}

fn best_excluding_minus_id<W: Weight>(w: &[Vec<W>], engine: Engine) -> (W, Vec<usize>) {
    match engine {
        Engine::Brute => brute_best(w, |p| !is_minus_id(p)).expect("identity is admissible"),
        Engine::Assignment => assignment_best(w),
    }
}

/// `2δ` for one family, in scaled units.
fn twice_defect<W: Weight>(w: &[Vec<W>], engine: Engine) -> W {
    let l = lhs(w);
    let (best, _) = best_excluding_minus_id(w, engine);
    if l > best {
        l - best
    } else {
        W::zero()
    }
}

macro_rules! with_weights {
    ($scaled:expr, |$d:ident| $body:expr) => {
        match &$scaled.weights {
            Weights::Small($d) => $body,
            Weights::Big($d) => $body,
        }
    };
}

/// Exact `max S(α)` over `α ≠ -id`, with its maximizer.
pub fn max_score_excluding_minus_id(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
    engine: Engine,
) -> Result<(Scalar, IndexPermutation), HyperbolicityError> {
    check_family(x, family)?;
    let scaled = ScaledSpace::new(x);
    let (s, perm) = with_weights!(scaled, |d| {
        let (s, perm) = best_excluding_minus_id(&local(d, family.entries()), engine);
        (scaled.to_scalar(&s), perm)
    });
    Ok((s, IndexPermutation::from_positions(family.n(), perm).unwrap()))
}

/// Exact `max S(α)` over fixed-point-free `α ≠ -id` (brute force; `n ≥ 1`).
pub fn max_score_fixed_point_free(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
) -> Result<(Scalar, IndexPermutation), HyperbolicityError> {
    if family.n() == 0 {
        return Err(HyperbolicityError::NeedsPositiveN);
    }
    check_family(x, family)?;
    let scaled = ScaledSpace::new(x);
    let (s, perm) = with_weights!(scaled, |d| {
        let w = local(d, family.entries());
        let (s, perm) = brute_best(&w, |p| {
            !is_minus_id(p) && p.iter().enumerate().all(|(i, &j)| i != j)
        })
        .expect("-id is not the only fixed-point-free permutation for n >= 1");
        (scaled.to_scalar(&s), perm)
    });
    Ok((s, IndexPermutation::from_positions(family.n(), perm).unwrap()))
}

pub fn family_defect(
    x: &FiniteMetricSpace,
    family: &PairedFamily,
    engine: Engine,
) -> Result<DefectReport, HyperbolicityError> {
    check_family(x, family)?;
    let (best_score, best_alpha) = max_score_excluding_minus_id(x, family, engine)?;
    let lhs = paired_sum(x, family);
    let defect = Scalar::max_of(Scalar::zero(), (&lhs - &best_score).half());
    Ok(DefectReport { family: family.clone(), lhs, best_alpha, best_score, defect })
}

/// Families up to the symmetries `i ↔ -i` and permutations of the pair
/// slots, in lexicographic order of their pair lists.
pub fn canonical_families(points: usize, n: usize, mode: FamilyMode) -> Vec<PairedFamily> {
    match mode {
        FamilyMode::Full => {
            let pairs: Vec<(usize, usize)> =
                (0..points).flat_map(|a| (a..points).map(move |b| (a, b))).collect();
            (0..pairs.len())
                .combinations_with_replacement(n + 1)
                .map(|c| PairedFamily::from_pairs(&c.iter().map(|&k| pairs[k]).collect::<Vec<_>>()))
                .collect()
        }
        FamilyMode::Distinct => {
            let pairs: Vec<(usize, usize)> =
                (0..points).tuple_combinations().collect();
            let mut out = Vec::new();
            let mut chosen = Vec::with_capacity(n + 1);
            disjoint_pairs(&pairs, 0, n + 1, &mut vec![false; points], &mut chosen, &mut out);
            out
        }
    }
}

fn disjoint_pairs(
    pairs: &[(usize, usize)],
    start: usize,
    remaining: usize,
    used: &mut Vec<bool>,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<PairedFamily>,
) {
    if remaining == 0 {
        out.push(PairedFamily::from_pairs(chosen));
        return;
    }
    for k in start..pairs.len() {
        let (a, b) = pairs[k];
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        chosen.push((a, b));
        disjoint_pairs(pairs, k + 1, remaining - 1, used, chosen, out);
        chosen.pop();
        used[a] = false;
        used[b] = false;
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DeltaOptions {
    pub engine: Engine,
    pub mode: FamilyMode,
}

/// Index and `2δ` of the worst family; earliest index wins ties.
fn worst_family<W: Weight>(d: &[Vec<W>], families: &[PairedFamily], engine: Engine) -> (usize, W) {
    let (w, Reverse(k)) = families
        .par_iter()
        .enumerate()
        .map(|(k, f)| (twice_defect(&local(d, f.entries()), engine), Reverse(k)))
        .reduce(|| (W::zero(), Reverse(usize::MAX)), |a, b| if b > a { b } else { a });
    (k, w)
}

/// The least `δ` for which `x` is `(n, δ)`-hyperbolic, with a family that
/// attains it.
///
/// When no family exists in the chosen mode (injective families on fewer
/// than `2(n+1)` points) the space is `(n, 0)`-hyperbolic and the reported
/// witness is the constant family at the first point.
pub fn min_delta(x: &FiniteMetricSpace, n: usize, options: DeltaOptions) -> MinDelta {
    let families = canonical_families(x.len(), n, options.mode);
    let scaled = ScaledSpace::new(x);
    let winner = if families.is_empty() {
        None
    } else {
        let k = with_weights!(scaled, |d| worst_family(d, &families, options.engine).0);
        Some(k)
    };
    let family = match winner {
        Some(k) if k < families.len() => families[k].clone(),
        _ => PairedFamily::new(n, vec![0; 2 * (n + 1)]).unwrap(),
    };
    let witness = family_defect(x, &family, options.engine).expect("family is in range");
    MinDelta { n, delta: witness.defect.clone(), witness, families_checked: families.len() }
}

/// Decides `(n, δ)`-hyperbolicity; on failure returns a violating family.
pub fn is_n_delta_hyperbolic(
    x: &FiniteMetricSpace,
    n: usize,
    delta: &Scalar,
    options: DeltaOptions,
) -> HyperbolicityCheck {
    // Every family has lhs ≤ 2(n+1)·diam and S(id) = 0.
    let trivial = Scalar::from_integer(n as i64 + 1) * x.diameter();
    if delta >= &trivial {
        return HyperbolicityCheck { holds: true, min_delta: None, violating_family: None };
    }
    let md = min_delta(x, n, options);
    let holds = &md.delta <= delta;
    HyperbolicityCheck {
        holds,
        violating_family: (!holds).then(|| md.witness.clone()),
        min_delta: Some(md.delta),
    }
}

/// Gromov's four-point constant with a maximizing quadruple
/// `(x, x', y, y')`.
pub fn gromov_witness(x: &FiniteMetricSpace) -> (Scalar, [usize; 4]) {
    let scaled = ScaledSpace::new(x);
    with_weights!(scaled, |d| {
        let (w, quad) = four_point(d);
        (scaled.half_to_scalar(&w), quad)
    })
}

/// `½ · max (d(x,x') + d(y,y') − max{d(x,y) + d(x',y'), d(x,y') + d(x',y)})`,
/// clamped at zero.
pub fn gromov_delta(x: &FiniteMetricSpace) -> Scalar {
    gromov_witness(x).0
}

fn four_point<W: Weight>(d: &[Vec<W>]) -> (W, [usize; 4]) {
    let n = d.len();
    let quads: Vec<[usize; 4]> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .flat_map(|(a, b)| (0..n).flat_map(move |c| (0..n).map(move |e| [a, b, c, e])))
        .collect();
    let (v, Reverse(k)) = quads
        .par_iter()
        .enumerate()
        .map(|(k, &[a, b, c, e])| {
            let left = d[a][b].clone() + d[c][e].clone();
            let cross = std::cmp::max(
                d[a][c].clone() + d[b][e].clone(),
                d[a][e].clone() + d[b][c].clone(),
            );
            let v = if left > cross { left - cross } else { W::zero() };
            (v, Reverse(k))
        })
        .reduce(|| (W::zero(), Reverse(usize::MAX)), |a, b| if b > a { b } else { a });
    (v, quads.get(k).copied().unwrap_or([0; 4]))
}
