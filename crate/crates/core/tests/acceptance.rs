//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use itertools::Itertools;
use nhyp_core::family::opposite;
use nhyp_core::fixtures::orthoplex;
use nhyp_core::generate::{generate, Generator};
use nhyp_core::hyperbolicity::{
    gromov_delta, max_score_excluding_minus_id, max_score_fixed_point_free, min_delta, DeltaOptions,
    Engine, FamilyMode,
};
use nhyp_core::tightspan::{
    attain_xfgy, canonical_embed, enumerate_cells, enumerate_vertices, extremal_below,
    is_admissible, is_extremal, sup_distance, tight_span_dimension, MetricFunction,
    DEFAULT_CELL_BOUND, DEFAULT_VERTEX_BOUND,
};
use nhyp_core::witness::{best_scale, OrthoplexWitness};
use nhyp_core::{linf_product, FiniteMetricSpace, PairedFamily, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn int(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn delta(x: &FiniteMetricSpace, n: usize) -> Scalar {
    min_delta(x, n, DeltaOptions::default()).delta
}

/// `min_delta` restricted to families of distinct points; equal to the full
/// value because repeated points never raise the defect.
fn delta_distinct(x: &FiniteMetricSpace, n: usize) -> Scalar {
    min_delta(x, n, DeltaOptions { mode: FamilyMode::Distinct, ..Default::default() }).delta
}

fn gromov_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for i in 0..200 {
        let x = common::random_space(&mut rng, 4, 8);
        let (a, b) = (delta(&x, 1), gromov_delta(&x));
        if a != b {
            return Err(format!("space {i}: min_delta {a} vs four-point {b}"));
        }
    }
    Ok(format!("200 spaces, |X| in 4..=8, {:.1?}", start.elapsed()))
}

fn small_dress_space(rng: &mut ChaCha8Rng, i: usize) -> FiniteMetricSpace {
    match i % 5 {
        // products of two small trees have 2-dimensional tight spans
        4 => {
            let a = generate(&Generator::RandomTree { leaves: 2 }, rng.random()).unwrap();
            let b = generate(&Generator::RandomTree { leaves: 3 }, rng.random()).unwrap();
            linf_product(&a, &b)
        }
        _ => common::random_space(rng, 1.max(i % 6), 6),
    }
}

fn dress_correspondence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut dims = [0usize; 4];
    for i in 0..100 {
        let x = small_dress_space(&mut rng, i);
        let dim = tight_span_dimension(&x, DEFAULT_CELL_BOUND).map_err(|e| e.to_string())?;
        let n = (0..).find(|&n| delta(&x, n).is_zero()).unwrap();
        if n != dim {
            return Err(format!("space {i} ({x:?}): least n with delta 0 is {n}, dimension {dim}"));
        }
        dims[dim.min(3)] += 1;
    }
    Ok(format!("100 spaces, |X| <= 6, dimensions 0/1/2/3: {dims:?}"))
}

/// Independent re-check of an emitted witness.
fn verify_witness(w: &OrthoplexWitness) -> Result<(), String> {
    let n = w.n();
    let z = &w.zspace;
    let m = 2 * (n + 1);
    let lhs: Scalar = (0..m).map(|p| z.d(p, opposite(p)).clone()).sum();
    let rhs: Scalar = (0..m).map(|p| z.d(p, w.alpha.image(p)).clone()).sum::<Scalar>()
        + &w.s * int(w.k as i64);
    if lhs != rhs {
        return Err(format!("identity {lhs} != {rhs}"));
    }
    if w.k < 2 || w.k > 2 * n {
        return Err(format!("k = {} outside [2, {}]", w.k, 2 * n));
    }
    for p in 0..m {
        if !is_extremal(z, &w.functions[p]) {
            return Err(format!("f at position {p} not extremal"));
        }
        for q in p + 1..m {
            let want = if q == opposite(p) { &w.s + &w.s } else { w.s.clone() };
            if sup_distance(&w.functions[p], &w.functions[q]).unwrap() != want {
                return Err(format!("distance pattern broken at ({p}, {q})"));
            }
        }
    }
    Ok(())
}

fn witness_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut witnesses = 0;
    for i in 0..100 {
        let x = common::random_space(&mut rng, 4, 8);
        for n in 1..=2 {
            let d = delta_distinct(&x, n);
            let b = best_scale(&x, n).map_err(|e| format!("space {i}, n {n}: {e}"))?;
            match b.s_hat {
                Some(s) if s.is_positive() => {
                    let upper = int(n as i64) * &s;
                    if !(s <= d && d <= upper) {
                        return Err(format!("space {i}, n {n}: s_hat {s}, min_delta {d}"));
                    }
                    let w = b.witness.ok_or(format!("space {i}, n {n}: no witness"))?;
                    verify_witness(&w).map_err(|e| format!("space {i}, n {n}: {e}"))?;
                    witnesses += 1;
                }
                s => {
                    if !d.is_zero() {
                        return Err(format!("space {i}, n {n}: s_hat {s:?} but min_delta {d}"));
                    }
                }
            }
        }
    }
    Ok(format!("100 spaces x n in {{1,2}}, {witnesses} witnesses verified, {:.1?}", start.elapsed()))
}

fn product_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    for i in 0..20 {
        let a = generate(&Generator::RandomTree { leaves: rng.random_range(3..=4) }, rng.random()).unwrap();
        let b = generate(&Generator::RandomTree { leaves: rng.random_range(3..=4) }, rng.random()).unwrap();
        let d = delta_distinct(&linf_product(&a, &b), 2);
        if !d.is_zero() {
            return Err(format!("tree pair {i}: min_delta(AxB, 2) = {d}"));
        }
    }
    for i in 0..10 {
        let mut factor = || {
            let kind = Generator::RandomGraph { points: rng.random_range(3..=4), edge_probability: 0.5, max_weight: 5 };
            generate(&kind, rng.random()).unwrap()
        };
        let (a, b) = (factor(), factor());
        let bound = Scalar::max_of(delta(&a, 1), delta(&b, 1));
        let d = delta_distinct(&linf_product(&a, &b), 2);
        if d > bound {
            return Err(format!("graph pair {i}: min_delta(AxB, 2) = {d} > {bound}"));
        }
    }
    Ok(format!("20 tree pairs at 0, 10 graph pairs within factor bound, {:.1?}", start.elapsed()))
}

fn rhombic_dodecahedron() -> Outcome {
    let start = Instant::now();
    let x = orthoplex(3, int(1));
    let c = enumerate_cells(&x, DEFAULT_CELL_BOUND).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if c.f_vector != [14, 24, 12, 1] || c.dimension() != 3 {
        return Err(format!("f-vector {:?}, dimension {}", c.f_vector, c.dimension()));
    }
    let points = canonical_embed(&x);
    let extra: Vec<&MetricFunction> = c.vertices.iter().filter(|v| !points.contains(v)).collect();
    let allowed = [Scalar::ratio(1, 2), Scalar::ratio(3, 2)];
    if extra.len() != 8 || !extra.iter().all(|v| v.values().iter().all(|s| allowed.contains(s))) {
        return Err(format!("{} extra vertices, values {:?}", extra.len(), extra));
    }
    if elapsed.as_secs_f64() >= 10.0 {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("f-vector (14, 24, 12, 1), dimension 3, 8 cube vertices, {elapsed:.1?}"))
}

fn hull_preserves_delta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut largest = 0;
    for i in 0..40 {
        let x = common::random_space(&mut rng, 3, 5);
        let c = enumerate_cells(&x, DEFAULT_CELL_BOUND).map_err(|e| e.to_string())?;
        let v = c.vertex_space();
        largest = largest.max(v.len());
        let (a, b) = (delta(&x, 1), delta(&v, 1));
        if a != b {
            return Err(format!("space {i}: min_delta(X,1) = {a}, on hull vertices {b}"));
        }
    }
    Ok(format!("40 spaces, |X| <= 5, up to {largest} hull vertices"))
}

fn flat_versus_polyhedral() -> Outcome {
    for scale in [int(1), int(10), Scalar::ratio(1, 3), Scalar::ratio(7, 2)] {
        let g = generate(&Generator::linf_grid(2, 3, scale.clone()), 0).unwrap();
        let d = delta(&g, 2);
        if !d.is_zero() {
            return Err(format!("l-infinity grid at scale {scale}: {d}"));
        }
    }
    let lambdas = [1, 10, 100];
    let deltas: Vec<Scalar> = lambdas
        .iter()
        .map(|&l| delta(&generate(&Generator::l2_grid(2, 3, int(l)), 0).unwrap(), 2))
        .collect();
    if !deltas.iter().tuple_windows().all(|(a, b)| a < b) {
        return Err(format!("euclidean deltas not increasing: {deltas:?}"));
    }
    let c = lambdas.iter().zip(&deltas).map(|(&l, d)| d / &int(l)).min().unwrap();
    if !c.is_positive() || !lambdas.iter().zip(&deltas).all(|(&l, d)| *d >= &c * &int(l)) {
        return Err(format!("no positive linear rate: c = {c}"));
    }
    Ok(format!("l-inf grids 0; l2 grids {} with c = {c} (~{:.4})", deltas.iter().join(" < "), c.to_f64()))
}

fn engine_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut x = common::random_space(&mut rng, 4, 8);
    for i in 0..10_000 {
        if i % 100 == 0 {
            x = common::random_space(&mut rng, 4, 8);
        }
        let n = rng.random_range(0..=2);
        let entries = (0..2 * (n + 1)).map(|_| rng.random_range(0..x.len())).collect();
        let fam = PairedFamily::new(n, entries).unwrap();
        let (a, _) = max_score_excluding_minus_id(&x, &fam, Engine::Assignment).unwrap();
        let (b, _) = max_score_excluding_minus_id(&x, &fam, Engine::Brute).unwrap();
        if a != b {
            return Err(format!("family {i}: assignment {a}, brute {b}"));
        }
        if n >= 1 {
            let (c, _) = max_score_fixed_point_free(&x, &fam).unwrap();
            if c != b {
                return Err(format!("family {i}: fixed-point-free max {c} below {b}"));
            }
        }
    }
    Ok("10000 families, n <= 2".into())
}

fn random_admissible(rng: &mut ChaCha8Rng, x: &FiniteMetricSpace) -> MetricFunction {
    let n = x.len();
    let noise = |rng: &mut ChaCha8Rng| Scalar::ratio(rng.random_range(0..7), rng.random_range(1..4));
    let base: Vec<Scalar> = if rng.random::<bool>() {
        canonical_embed(x).swap_remove(rng.random_range(0..n)).into_values()
    } else {
        vec![x.diameter().half(); n]
    };
    MetricFunction::new(base.into_iter().map(|v| v + noise(rng)).collect())
}

fn extremal_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut orders = 0usize;
    for i in 0..1000 {
        let x = common::random_space(&mut rng, 2, 6);
        let f = random_admissible(&mut rng, &x);
        if !is_admissible(&x, &f) {
            return Err(format!("function {i} is not admissible"));
        }
        let all: Vec<Vec<usize>> = if x.len() <= 5 {
            (0..x.len()).permutations(x.len()).collect()
        } else {
            (0..6).map(|_| {
                let mut o: Vec<usize> = (0..x.len()).collect();
                rand::seq::SliceRandom::shuffle(o.as_mut_slice(), &mut rng);
                o
            }).collect()
        };
        for order in all {
            let g = extremal_below(&x, &f, &order).map_err(|e| e.to_string())?;
            if !is_extremal(&x, &g) || g.values().iter().zip(f.values()).any(|(a, b)| a > b) {
                return Err(format!("function {i}, order {order:?}: {g:?}"));
            }
            orders += 1;
        }
    }
    let mut vertices = 0;
    let mut pairs = 0;
    for i in 0..40 {
        let x = common::random_space(&mut rng, 2, 5);
        let verts = enumerate_vertices(&x, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
        let embed = canonical_embed(&x);
        for f in &verts {
            for (y, dy) in embed.iter().enumerate() {
                if sup_distance(f, dy).unwrap() != *f.get(y) {
                    return Err(format!("space {i}: sup-distance to d_{y} differs from f({y})"));
                }
            }
            for g in &verts {
                let (p, q) = attain_xfgy(&x, f, g).map_err(|e| e.to_string())?;
                if f.get(p) + &sup_distance(f, g).unwrap() + g.get(q) != *x.d(p, q) {
                    return Err(format!("space {i}: pair ({p}, {q}) does not attain"));
                }
                pairs += 1;
            }
        }
        vertices += verts.len();
    }
    Ok(format!(
        "1000 functions over {orders} orders; {vertices} vertices checked against d_y; {pairs} vertex pairs attained"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("gromov equivalence", gromov_equivalence),
        ("dress correspondence", dress_correspondence),
        ("witness sandwich", witness_sandwich),
        ("product theorem", product_theorem),
        ("rhombic dodecahedron", rhombic_dodecahedron),
        ("hull preserves delta", hull_preserves_delta),
        ("flat vs polyhedral", flat_versus_polyhedral),
        ("engine equivalence", engine_equivalence),
        ("extremal machinery", extremal_machinery),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
