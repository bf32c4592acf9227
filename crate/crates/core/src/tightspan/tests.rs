use super::*;
use crate::fixtures::{c4, orthoplex, segment, tree4, tripod_345};
use crate::generate::{generate, Generator};
use proptest::prelude::*;

fn int(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn mf(v: &[i64]) -> MetricFunction {
    MetricFunction::new(v.iter().map(|&x| int(x)).collect())
}

fn half(n: i64) -> Scalar {
    Scalar::ratio(n, 2)
}

#[test]
fn star_examples() {
    let x = segment(int(1));
    assert_eq!(star(&x, &mf(&[1, 1])).unwrap(), mf(&[0, 0]));
    let t = tripod_345();
    let m = mf(&[2, 1, 3]);
    assert_eq!(star(&t, &m).unwrap(), m);
    for f in canonical_embed(&t) {
        assert_eq!(star(&t, &f).unwrap(), f);
    }
    assert!(matches!(star(&t, &mf(&[1])), Err(TightSpanError::LengthMismatch { .. })));
}

#[test]
fn q_map_examples() {
    let x = segment(int(1));
    let q = q_map(&x, &mf(&[1, 1])).unwrap();
    assert_eq!(q, MetricFunction::new(vec![half(1), half(1)]));
    assert!(is_extremal(&x, &q));
    assert_eq!(q_map(&x, &mf(&[2, 2])).unwrap(), q);
    assert_eq!(q_map(&x, &mf(&[0, 1])).unwrap(), mf(&[0, 1]));
    assert!(matches!(q_map(&x, &mf(&[0, 0])), Err(TightSpanError::NotAdmissible { .. })));
}

#[test]
fn extremal_below_examples() {
    let x = segment(int(1));
    assert_eq!(extremal_below(&x, &mf(&[2, 2]), &[0, 1]).unwrap(), mf(&[0, 1]));
    assert_eq!(extremal_below(&x, &mf(&[2, 2]), &[1, 0]).unwrap(), mf(&[1, 0]));
    let t = tripod_345();
    for order in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
        assert_eq!(extremal_below(&t, &mf(&[2, 1, 3]), &order).unwrap(), mf(&[2, 1, 3]));
    }
    let ones = mf(&[1, 1, 1, 1]);
    assert_eq!(extremal_below(&c4(), &ones, &[3, 1, 0, 2]).unwrap(), ones);
    assert_eq!(
        extremal_below(&x, &mf(&[2, 2]), &[0, 0]),
        Err(TightSpanError::InvalidOrder(2))
    );
}

#[test]
fn embedding_and_distances() {
    let x = segment(int(1));
    assert_eq!(canonical_embed(&x), vec![mf(&[0, 1]), mf(&[1, 0])]);
    assert_eq!(sup_distance(&mf(&[0, 1]), &mf(&[1, 0])).unwrap(), int(1));
    assert_eq!(sup_distance(&mf(&[0, 1]), &mf(&[0, 1])).unwrap(), int(0));
    assert_eq!(sup_distance(&mf(&[2, 1, 0, 1]), &mf(&[1, 2, 1, 0])).unwrap(), int(1));
    assert!(sup_distance(&mf(&[0]), &mf(&[0, 1])).is_err());
    let g = tree4();
    let e = canonical_embed(&g);
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(sup_distance(&e[a], &e[b]).unwrap(), *g.d(a, b));
        }
    }
}

#[test]
fn equality_graph_examples() {
    let t = tripod_345();
    let g = equality_graph(&t, &MetricFunction::distance_to(&t, 1)).unwrap();
    assert_eq!(g.edges(), &[(0, 1), (1, 1), (1, 2)]);
    assert!(g.has_loop(1));
    let g = equality_graph(&t, &mf(&[2, 1, 3])).unwrap();
    assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    assert_eq!(cell_dimension(&t, &g).unwrap(), 0);
    let o = orthoplex(3, int(1));
    let g = equality_graph(&o, &mf(&[1; 6])).unwrap();
    assert_eq!(g.edges(), &[(0, 1), (2, 3), (4, 5)]);
    assert_eq!(cell_dimension(&o, &g).unwrap(), 3);
    assert!(matches!(equality_graph(&t, &mf(&[3, 3, 3])), Err(TightSpanError::NotExtremal(_))));
}

#[test]
fn cell_dimension_examples() {
    let t = tripod_345();
    let star_graph = EqualityGraph::new(3, [(0, 0), (0, 1), (0, 2)]);
    assert_eq!(cell_dimension(&t, &star_graph).unwrap(), 0);
    let path = EqualityGraph::new(3, [(0, 1), (1, 2)]);
    assert_eq!(cell_dimension(&t, &path).unwrap(), 1);
    let open = EqualityGraph::new(3, [(0, 1)]);
    assert_eq!(cell_dimension(&t, &open), Err(TightSpanError::NotCovering("c".into())));
    let o = orthoplex(3, int(1));
    let even_cycle = EqualityGraph::new(6, [(0, 2), (2, 1), (1, 3), (3, 0), (4, 5)]);
    assert_eq!(cell_dimension(&o, &even_cycle).unwrap(), 2);
}

#[test]
fn mask_round_trip() {
    let g = EqualityGraph::new(4, [(3, 1), (0, 0), (2, 3)]);
    assert_eq!(EqualityGraph::from_mask(4, g.mask()), g);
    assert_eq!(pair_list(3), vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
}

#[test]
fn dot_marks_loops() {
    let t = tripod_345();
    let g = equality_graph(&t, &MetricFunction::distance_to(&t, 0)).unwrap();
    let dot = g.to_dot(t.labels(), "d_a");
    assert!(dot.contains("\"a\" -- \"a\" [color=red];"));
    assert!(dot.contains("\"a\" -- \"b\";"));
}

#[test]
fn vertices_of_small_spaces() {
    let x = segment(int(1));
    assert_eq!(enumerate_vertices(&x, 7).unwrap(), vec![mf(&[0, 1]), mf(&[1, 0])]);
    let t = tripod_345();
    let v = enumerate_vertices(&t, 7).unwrap();
    assert_eq!(v.len(), 4);
    assert!(v.contains(&mf(&[2, 1, 3])));
    for f in canonical_embed(&t) {
        assert!(v.contains(&f));
    }
    let pt = FiniteMetricSpace::from_integer_matrix(&[&[0]]).unwrap();
    assert_eq!(enumerate_vertices(&pt, 7).unwrap(), vec![mf(&[0])]);
    assert_eq!(
        enumerate_vertices(&t, 2),
        Err(TightSpanError::TooLarge { size: 3, bound: 2 })
    );
}

#[test]
fn orthoplex_vertices() {
    let o = orthoplex(3, int(1));
    let v = enumerate_vertices(&o, 7).unwrap();
    assert_eq!(v.len(), 14);
    let cube: Vec<&MetricFunction> = v.iter().filter(|f| !canonical_embed(&o).contains(f)).collect();
    assert_eq!(cube.len(), 8);
    for f in cube {
        for p in 0..6 {
            assert!(*f.get(p) == half(1) || *f.get(p) == half(3));
        }
    }
}

#[test]
fn complexes_of_small_spaces() {
    let c = enumerate_cells(&segment(int(1)), 6).unwrap();
    assert_eq!(c.f_vector, vec![2, 1]);
    let c = enumerate_cells(&tripod_345(), 6).unwrap();
    assert_eq!(c.f_vector, vec![4, 3]);
    let m = c.vertices.iter().position(|v| *v == mf(&[2, 1, 3])).unwrap();
    for cell in c.cells.iter().filter(|c| c.dimension == 1) {
        assert!(cell.vertex_ids.contains(&m));
    }
    assert_eq!(tight_span_dimension(&tree4(), 6).unwrap(), 1);
    assert_eq!(tight_span_dimension(&c4(), 6).unwrap(), 2);
    let pt = FiniteMetricSpace::from_integer_matrix(&[&[0]]).unwrap();
    assert_eq!(tight_span_dimension(&pt, 6).unwrap(), 0);
}

#[test]
fn c4_square_cell() {
    let c = enumerate_cells(&c4(), 6).unwrap();
    assert_eq!(c.f_vector, vec![4, 4, 1]);
    let square = c.cells.last().unwrap();
    assert_eq!(square.vertex_ids.len(), 4);
    assert_eq!(square.interior_point, mf(&[1, 1, 1, 1]));
    let json = c.to_json();
    assert_eq!(json["f_vector"], serde_json::json!([4, 4, 1]));
    assert_eq!(json["cells"][8]["dim"], 2);
    assert_eq!(json["vertices"][0]["values"]["a"], "0");
    assert_eq!(c.to_dot().matches("graph \"cell").count(), 9);
}

#[test]
fn rhombic_dodecahedron() {
    let c = enumerate_cells(&orthoplex(3, int(1)), 6).unwrap();
    assert_eq!(c.f_vector, vec![14, 24, 12, 1]);
    assert_eq!(c.cells.last().unwrap().vertex_ids.len(), 14);
}

#[test]
fn attain_examples() {
    let x = segment(int(1));
    assert_eq!(attain_xfgy(&x, &mf(&[0, 1]), &mf(&[1, 0])).unwrap(), (0, 1));
    let t = tripod_345();
    let e = canonical_embed(&t);
    assert_eq!(attain_xfgy(&t, &e[0], &e[2]).unwrap(), (0, 2));
    assert_eq!(attain_xfgy(&t, &mf(&[2, 1, 3]), &e[0]).unwrap(), (1, 0));
    assert!(attain_xfgy(&t, &mf(&[3, 3, 3]), &e[0]).is_err());
}

#[test]
fn vertex_space_contains_the_points() {
    let c = enumerate_cells(&tripod_345(), 6).unwrap();
    let v = c.vertex_space();
    assert_eq!(v.len(), 4);
    let sub = v.submetric(&["a", "b", "c"]).unwrap();
    assert_eq!(sub.matrix(), tripod_345().matrix());
    assert_eq!(v.labels(), &["a", "v1", "b", "c"]);
}

/// Affine dimension of a set of points, by exact elimination.
fn affine_rank(points: &[&MetricFunction]) -> usize {
    let base = points[0];
    let mut rows: Vec<Vec<Scalar>> = points[1..]
        .iter()
        .map(|p| p.values().iter().zip(base.values()).map(|(a, b)| a - b).collect())
        .collect();
    let cols = base.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, r);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for j in 0..cols {
                    row[j] -= &(&f * &pivot[j]);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn random_space() -> impl Strategy<Value = FiniteMetricSpace> {
    (0u64..10_000, 2usize..6, 0usize..3).prop_map(|(seed, size, kind)| {
        let g = match kind {
            0 => Generator::RandomTree { leaves: size.max(2) },
            1 => Generator::RandomGraph { points: size, edge_probability: 0.5, max_weight: 5 },
            _ => Generator::Cycle { m: size.max(3) },
        };
        generate(&g, seed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cells_are_well_formed(x in random_space()) {
        let c = enumerate_cells(&x, 6).unwrap();
        let embed = canonical_embed(&x);
        for e in &embed {
            prop_assert!(c.vertices.contains(e));
        }
        for v in &c.vertices {
            prop_assert!(is_extremal(&x, v));
            prop_assert_eq!(cell_dimension(&x, &equality_graph(&x, v).unwrap()).unwrap(), 0);
            // ‖f − d_y‖∞ = f(y)
            for (y, e) in embed.iter().enumerate() {
                prop_assert_eq!(&sup_distance(v, e).unwrap(), v.get(y));
            }
        }
        for cell in &c.cells {
            prop_assert!(cell.edges.is_covering());
            prop_assert!(is_extremal(&x, &cell.interior_point));
            let pts: Vec<&MetricFunction> = cell.vertex_ids.iter().map(|&k| &c.vertices[k]).collect();
            prop_assert_eq!(affine_rank(&pts), cell.dimension);
        }
    }

    #[test]
    fn loop_forces_distance_function(x in random_space()) {
        let c = enumerate_cells(&x, 6).unwrap();
        for f in c.vertices.iter().chain(c.cells.iter().map(|c| &c.interior_point)) {
            for p in 0..x.len() {
                if f.get(p).is_zero() {
                    prop_assert_eq!(f, &MetricFunction::distance_to(&x, p));
                }
            }
        }
    }

    #[test]
    fn extremal_machinery(
        x in random_space(),
        noise in proptest::collection::vec(0i64..6, 6),
        base in 0usize..64,
        rot in 0usize..6,
    ) {
        let verts = enumerate_vertices(&x, 7).unwrap();
        let v = &verts[base % verts.len()];
        let n = x.len();
        let f = MetricFunction::new(
            (0..n).map(|p| v.get(p) + Scalar::ratio(noise[p], 2)).collect(),
        );
        prop_assert!(is_admissible(&x, &f));
        let s = star(&x, &f).unwrap();
        for p in 0..n {
            prop_assert!(s.get(p) <= f.get(p));
        }
        let q = q_map(&x, &f).unwrap();
        prop_assert!(is_admissible(&x, &q));
        let order: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let e = extremal_below(&x, &f, &order).unwrap();
        prop_assert!(is_extremal(&x, &e));
        for p in 0..n {
            prop_assert!(e.get(p) <= f.get(p));
            for r in 0..n {
                // 1-Lipschitz
                prop_assert!((e.get(p) - e.get(r)).abs() <= *x.d(p, r));
            }
        }
        prop_assert_eq!(star(&x, &e).unwrap(), e);
    }
}
