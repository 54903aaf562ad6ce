//! Dense GF(2) elimination on packed rows.

/// Reduces the parity matrix to row echelon form. Returns the pivot columns and, per pivot,
/// the free columns whose sum defines it.
pub(crate) fn systematic_rules(n: usize, checks: &[Vec<usize>]) -> (Vec<usize>, Vec<(usize, Vec<usize>)>) {
    let words = n.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = checks
        .iter()
        .map(|c| {
            let mut r = vec![0u64; words];
            for &v in c {
                r[v / 64] ^= 1 << (v % 64);
            }
            r
        })
        .collect();
    let get = |r: &[u64], c: usize| (r[c / 64] >> (c % 64)) & 1 == 1;
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(sel) = (rank..rows.len()).find(|&i| get(&rows[i], col)) else {
            continue;
        };
        rows.swap(rank, sel);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && get(row, col) {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let is_pivot = {
        let mut v = vec![false; n];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let rules = pivots
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, (0..n).filter(|&c| !is_pivot[c] && get(&rows[i], c)).collect()))
        .collect();
    (pivots, rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dependent_rows_lower_rank() {
        let checks = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let (p, r) = systematic_rules(3, &checks);
        assert_eq!(p, vec![0, 1]);
        assert_eq!(r, vec![(0, vec![2]), (1, vec![2])]);
    }
}
