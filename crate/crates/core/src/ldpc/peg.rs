//! Degree sequences and progressive edge growth.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use super::DegreeDistribution;
use crate::error::{Error, Result};

fn largest_remainder(total: usize, dist: &DegreeDistribution) -> Vec<(usize, usize)> {
    let mut terms: Vec<(usize, f64)> = dist.0.clone();
    terms.sort_by_key(|t| t.0);
    let raw: Vec<f64> = terms.iter().map(|t| t.1 * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut left = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    terms.iter().map(|t| t.0).zip(counts).collect()
}

fn expand(counts: &[(usize, usize)]) -> Vec<usize> {
    counts.iter().flat_map(|&(d, c)| std::iter::repeat_n(d, c)).collect()
}

fn edges(counts: &[(usize, usize)]) -> usize {
    counts.iter().map(|&(d, c)| d * c).sum()
}

/// Shifts single nodes between adjacent degrees until `lo <= edges <= hi`.
fn steer(counts: &mut [(usize, usize)], lo: usize, hi: usize) -> bool {
    for _ in 0..counts.iter().map(|c| c.1).sum::<usize>() * counts.len() + 1 {
        let e = edges(counts);
        if e < lo {
            let Some(i) = (0..counts.len() - 1).find(|&i| counts[i].1 > 0) else { return false };
            counts[i].1 -= 1;
            counts[i + 1].1 += 1;
        } else if e > hi {
            let Some(i) = (1..counts.len()).rev().find(|&i| counts[i].1 > 0) else { return false };
            counts[i].1 -= 1;
            counts[i - 1].1 += 1;
        } else {
            return true;
        }
    }
    false
}

/// Check degree sequence carrying exactly `total_edges`, staying on the support of `rho`.
fn check_degrees(m: usize, rho: &DegreeDistribution, total_edges: usize) -> Result<Vec<usize>> {
    rho.validate()?;
    let mut counts = largest_remainder(m, rho);
    if edges(&counts) != total_edges && !(counts.len() > 1 && steer(&mut counts, total_edges, total_edges)) {
        return Err(Error::InfeasibleDegrees(format!(
            "{total_edges} edges cannot be spread over {m} checks with degrees {:?}",
            rho.0
        )));
    }
    Ok(expand(&counts))
}

/// Reconciles both sides: variable counts follow `lambda` by largest remainder and are nudged
/// by whole nodes when the checks could not otherwise carry the edge total.
pub fn degree_sequences(
    n: usize,
    m: usize,
    lambda: &DegreeDistribution,
    rho: &DegreeDistribution,
) -> Result<(Vec<usize>, Vec<usize>)> {
    lambda.validate()?;
    let mut v = largest_remainder(n, lambda);
    let c = largest_remainder(m, rho);
    let lo = m * c.iter().map(|t| t.0).min().unwrap();
    let hi = m * c.iter().map(|t| t.0).max().unwrap();
    if v.len() > 1 {
        steer(&mut v, lo, hi);
    }
    let vdeg = variable_degrees_from(&v, m)?;
    let cdeg = check_degrees(m, rho, vdeg.iter().sum())?;
    Ok((vdeg, cdeg))
}

fn variable_degrees_from(counts: &[(usize, usize)], m: usize) -> Result<Vec<usize>> {
    if counts.iter().any(|c| c.0 > m && c.1 > 0) {
        return Err(Error::InfeasibleDegrees(format!("variable degree exceeds {m} checks")));
    }
    Ok(expand(counts))
}

/// Greedy PEG: each new edge of a variable goes to a lowest-degree check among those farthest
/// from it in the current graph, preferring checks with spare target degree.
pub(crate) fn construct<R: Rng + ?Sized>(vdeg: &[usize], cdeg: &[usize], rng: &mut R) -> Vec<Vec<usize>> {
    let n = vdeg.len();
    let m = cdeg.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&v| vdeg[v]);
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut chk_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut depth_c = vec![usize::MAX; m];
    let mut seen_v = vec![usize::MAX; n];
    let mut stamp = 0usize;
    for &v in &order {
        for k in 0..vdeg[v] {
            let candidates: Vec<usize> = if k == 0 {
                (0..m).collect()
            } else {
                stamp += 1;
                bfs_far_checks(v, &var_adj, &chk_adj, &mut depth_c, &mut seen_v, stamp)
            };
            let pick = choose(&candidates, &var_adj[v], &chk_adj, cdeg, rng)
                .expect("a check not yet connected to this variable");
            var_adj[v].push(pick);
            chk_adj[pick].push(v);
        }
    }
    chk_adj
}

fn choose<R: Rng + ?Sized>(
    cands: &[usize],
    connected: &[usize],
    chk_adj: &[Vec<usize>],
    cdeg: &[usize],
    rng: &mut R,
) -> Option<usize> {
    let m = chk_adj.len();
    let open = |c: &usize| !connected.contains(c);
    let spare = |c: &usize| chk_adj[*c].len() < cdeg[*c];
    let tiers: [Vec<usize>; 3] = [
        cands.iter().copied().filter(|c| open(c) && spare(c)).collect(),
        (0..m).filter(|c| open(c) && spare(c)).collect(),
        (0..m).filter(open).collect(),
    ];
    let pool = tiers.into_iter().find(|t| !t.is_empty())?;
    let best = pool.iter().map(|&c| chk_adj[c].len()).min()?;
    let ties: Vec<usize> = pool.into_iter().filter(|&c| chk_adj[c].len() == best).collect();
    Some(ties[rng.random_range(0..ties.len())])
}

/// Checks unreachable from `v`, or if every check is reachable, those at the largest depth.
fn bfs_far_checks(
    v: usize,
    var_adj: &[Vec<usize>],
    chk_adj: &[Vec<usize>],
    depth_c: &mut [usize],
    seen_v: &mut [usize],
    stamp: usize,
) -> Vec<usize> {
    let m = chk_adj.len();
    let mut reached = vec![false; m];
    let mut count = 0;
    let mut frontier: VecDeque<(usize, usize)> = VecDeque::new();
    seen_v[v] = stamp;
    for &c in &var_adj[v] {
        if !reached[c] {
            reached[c] = true;
            depth_c[c] = 0;
            count += 1;
            frontier.push_back((c, 0));
        }
    }
    let mut last_layer: Vec<usize> = var_adj[v].clone();
    let mut cur_depth = 0;
    while let Some((c, d)) = frontier.pop_front() {
        if d > cur_depth {
            cur_depth = d;
        }
        for &u in &chk_adj[c] {
            if seen_v[u] == stamp {
                continue;
            }
            seen_v[u] = stamp;
            for &c2 in &var_adj[u] {
                if !reached[c2] {
                    reached[c2] = true;
                    depth_c[c2] = d + 1;
                    count += 1;
                    frontier.push_back((c2, d + 1));
                }
            }
        }
        if count == m {
            break;
        }
    }
    if count < m {
        return (0..m).filter(|&c| !reached[c]).collect();
    }
    let maxd = (0..m).map(|c| depth_c[c]).max().unwrap_or(0);
    last_layer.clear();
    last_layer.extend((0..m).filter(|&c| depth_c[c] == maxd));
    last_layer
}
