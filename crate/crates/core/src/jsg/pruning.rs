//! eSNR-based selection of the cyclic shifts kept as live graph edges.

use serde::{Deserialize, Serialize};

use crate::channel::EffectiveChannel;

/// How the single merged message standing in for the pruned edges is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MergedPolicy {
    /// Mean of member posterior means; variance includes the spread of the means.
    #[default]
    MomentMatched,
    /// Plain average of member posterior means and variances.
    Mean,
    /// Fixed `(0, 1)`.
    FixedPrior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPruning {
    pub r: usize,
    pub t: usize,
    /// Average gain `G_s` per cyclic shift.
    pub g: Vec<f64>,
    pub kept: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnrPruning {
    pub threshold_db: f64,
    pub n0: f64,
    pub n: usize,
    pub n_t: usize,
    pub blocks: Vec<BlockPruning>,
}

impl EsnrPruning {
    pub fn block(&self, r: usize, t: usize) -> &BlockPruning {
        &self.blocks[r * self.n_t + t]
    }

    #[inline]
    pub fn is_kept(&self, r: usize, t: usize, shift: usize) -> bool {
        self.blocks[r * self.n_t + t].kept[shift]
    }

    /// Kept shifts `D_L` of a block.
    pub fn d_l(&self, r: usize, t: usize) -> Vec<usize> {
        let b = self.block(r, t);
        (0..self.n).filter(|&s| b.kept[s]).collect()
    }

    /// Dropped shifts with nonzero gain, `D_S`.
    pub fn d_s(&self, r: usize, t: usize) -> Vec<usize> {
        let b = self.block(r, t);
        (0..self.n).filter(|&s| !b.kept[s] && b.g[s] > 0.0).collect()
    }

    /// Fraction of shifts not kept, averaged over blocks.
    pub fn sparsity(&self) -> f64 {
        let dropped: usize = self.blocks.iter().map(|b| b.kept.iter().filter(|k| !**k).count()).sum();
        dropped as f64 / (self.blocks.len() * self.n) as f64
    }

    pub fn kept_count(&self) -> usize {
        self.blocks.iter().map(|b| b.kept.iter().filter(|k| **k).count()).sum()
    }
}

/// `G_s = (1/N) sum_n |H[n, (n+s) mod N]|^2` for every block.
pub fn shift_gains(h: &EffectiveChannel) -> Vec<Vec<f64>> {
    let n = h.n;
    let mut out = Vec::with_capacity(h.n_r * h.n_t);
    for r in 0..h.n_r {
        for t in 0..h.n_t {
            let mut g = vec![0.0; n];
            let b = h.block(r, t);
            for row in 0..n {
                for (m, v) in b.row(row) {
                    g[(m + n - row) % n] += v.norm_sqr();
                }
            }
            g.iter_mut().for_each(|x| *x /= n as f64);
            out.push(g);
        }
    }
    out
}

/// Keeps shift `s` iff `10 log10(G_s / n0) >= threshold_db`.
pub fn prune_esnr(h: &EffectiveChannel, n0: f64, threshold_db: f64) -> EsnrPruning {
    let blocks = shift_gains(h)
        .into_iter()
        .enumerate()
        .map(|(k, g)| {
            let kept = g
                .iter()
                .map(|&gs| {
                    if threshold_db == f64::NEG_INFINITY {
                        true
                    } else {
                        gs > 0.0 && 10.0 * (gs / n0).log10() >= threshold_db
                    }
                })
                .collect();
            BlockPruning { r: k / h.n_t, t: k % h.n_t, g, kept }
        })
        .collect();
    EsnrPruning { threshold_db, n0, n: h.n, n_t: h.n_t, blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afdm::AfdmConfig;
    use crate::channel::{build_effective, sample_paths, Band, ChannelRealization, PathSpec, PowerProfile};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extremes() {
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let p = sample_paths(3, 0.6, 4, 4, PowerProfile::Uniform, &mut rng).unwrap();
        let h = build_effective(&ChannelRealization::siso(p), &cfg, Band::Full).unwrap();
        let all = prune_esnr(&h, 0.1, f64::NEG_INFINITY);
        assert!(all.d_s(0, 0).is_empty());
        let none = prune_esnr(&h, 0.1, f64::INFINITY);
        assert!(none.d_l(0, 0).is_empty());
        assert_eq!(none.d_s(0, 0).len(), 16);
    }

    #[test]
    fn figure_six_shape() {
        // N = 16, c1 = 1/16: path 1 sits on shift 0, path 2 (d = 2, nu = 1 + 0.35) leaks around shift 5
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let paths = vec![
            PathSpec::new(Complex64::new(0.8, 0.0), 0, 0.0),
            PathSpec::new(Complex64::new(0.6, 0.0), 2, 1.0 - 0.05),
        ];
        let h = build_effective(&ChannelRealization::siso(paths), &cfg, Band::Full).unwrap();
        let pr = prune_esnr(&h, 0.01, -12.0);
        assert_eq!(pr.d_l(0, 0), vec![0, 4, 5, 6]);
    }

    #[test]
    fn single_integer_path_sparsity() {
        let cfg = AfdmConfig::with_default_chirps(32, 4).unwrap();
        let h = build_effective(
            &ChannelRealization::siso(vec![PathSpec::new(Complex64::new(1.0, 0.0), 1, 2.0)]),
            &cfg,
            Band::Full,
        )
        .unwrap();
        let pr = prune_esnr(&h, 0.1, -12.0);
        assert!((pr.sparsity() - 31.0 / 32.0).abs() < 1e-15);
        assert_eq!(pr.d_l(0, 0), vec![4]);
    }
}
