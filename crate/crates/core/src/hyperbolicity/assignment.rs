//! Maximum-weight perfect assignment (Hungarian method with potentials).

use super::weights::{big_m, Weight};

/// Minimum-cost perfect assignment on a square cost matrix. Returns
/// `assign[row] = col`. `O(m³)`.
pub(crate) fn min_cost_assignment<W: Weight>(cost: &[Vec<W>]) -> Vec<usize> {
    let m = cost.len();
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![W::zero(); m + 1];
    let mut v = vec![W::zero(); m + 1];
    let mut matched_row = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|mv| &cur < mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().unwrap();
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column always remains");
            for j in 0..=m {
                if used[j] {
                    let r = matched_row[j];
                    u[r] = u[r].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(mv) = minv[j].take() {
                    minv[j] = Some(mv - delta.clone());
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; m];
    for j in 1..=m {
        assign[matched_row[j] - 1] = j - 1;
    }
    assign
}

/// Maximum-weight perfect assignment on non-negative weights, optionally
/// forbidding one arc `(row, col)`. Requires `m >= 2` when an arc is
/// forbidden.
pub(crate) fn max_weight_assignment<W: Weight>(
    weight: &[Vec<W>],
    forbidden: Option<(usize, usize)>,
) -> Vec<usize> {
    let big = big_m(weight);
    let cost: Vec<Vec<W>> = weight
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, w)| {
                    if forbidden == Some((i, j)) {
                        big.clone()
                    } else {
                        W::zero() - w.clone()
                    }
                })
                .collect()
        })
        .collect();
    min_cost_assignment(&cost)
}
