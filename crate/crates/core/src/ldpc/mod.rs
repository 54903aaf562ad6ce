//! Irregular LDPC codes: PEG construction, systematic encoding, sum-product decoding.

mod alist;
mod decode;
mod gf2;
mod peg;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

pub use alist::{from_alist, to_alist};
pub use decode::{boxplus, cn_update, ldpc_decode, ldpc_decode_counted, ldpc_decode_warm, phi, DecodeResult, LLR_CLIP};
pub(crate) use decode::cn_update_counted;
pub use peg::degree_sequences;

/// Node-perspective degree distribution: `(degree, fraction of nodes)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution(pub Vec<(usize, f64)>);

impl DegreeDistribution {
    pub fn regular(d: usize) -> Self {
        DegreeDistribution(vec![(d, 1.0)])
    }

    /// `0.4 x^2 + 0.4 x^3 + 0.2 x^5`.
    pub fn default_variable() -> Self {
        DegreeDistribution(vec![(2, 0.4), (3, 0.4), (5, 0.2)])
    }

    /// `0.5 x^6 + 0.5 x^7`.
    pub fn default_check() -> Self {
        DegreeDistribution(vec![(6, 0.5), (7, 0.5)])
    }

    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.0.iter().map(|t| t.1).sum();
        if self.0.is_empty() || self.0.iter().any(|t| t.0 == 0 || t.1 < 0.0) || (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidConfig(format!("bad degree distribution {:?}", self.0)));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().map(|&(d, f)| d as f64 * f).sum()
    }
}

/// Parity-check code with a Tanner graph in both orientations and a systematic encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    /// Variables of each check, sorted.
    checks: Vec<Vec<usize>>,
    /// Checks of each variable, sorted.
    vars: Vec<Vec<usize>>,
    /// Edge `e` of check `j` is `check_start[j] + position`.
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    info_positions: Vec<usize>,
    /// Parity position and the info positions it sums.
    parity_rules: Vec<(usize, Vec<usize>)>,
    frozen: Vec<usize>,
}

impl LdpcCode {
    /// Wraps a parity matrix given as check adjacency lists over `n` variables.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let mut checks = checks;
        for c in checks.iter_mut() {
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&v| v >= n) {
                return Err(Error::InvalidConfig("check references a variable out of range".into()));
            }
        }
        let m = checks.len();
        let mut vars = vec![Vec::new(); n];
        let mut check_start = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::new();
        let mut var_edges = vec![Vec::new(); n];
        for (j, c) in checks.iter().enumerate() {
            check_start.push(edge_var.len());
            for &v in c {
                vars[v].push(j);
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
        }
        check_start.push(edge_var.len());
        let (pivots, rules) = gf2::systematic_rules(n, &checks);
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let info_positions: Vec<usize> = (0..n).filter(|v| !pivot_set.contains(v)).collect();
        let k = info_positions.len();
        let parity_rules = rules;
        let frozen = Vec::new();
        Ok(LdpcCode { n, k, checks, vars, check_start, edge_var, var_edges, info_positions, parity_rules, frozen })
    }

    /// PEG construction. Rank-deficient draws are resampled up to ten times; after that the
    /// surplus free positions are frozen to zero so `k` keeps its design value.
    pub fn build<R: Rng + ?Sized>(
        n: usize,
        rate: f64,
        lambda: &DegreeDistribution,
        rho: &DegreeDistribution,
        rng: &mut R,
    ) -> Result<Self> {
        if n < 2 || !(rate > 0.0 && rate < 1.0) {
            return Err(Error::InvalidConfig(format!("bad code size n={n} rate={rate}")));
        }
        lambda.validate()?;
        rho.validate()?;
        let m = ((1.0 - rate) * n as f64).round() as usize;
        if m == 0 || m >= n {
            return Err(Error::InvalidConfig("rate leaves no checks or no information".into()));
        }
        let (vdeg, cdeg) = degree_sequences(n, m, lambda, rho)?;
        let mut last = None;
        for _ in 0..10 {
            let checks = peg::construct(&vdeg, &cdeg, rng);
            let code = LdpcCode::from_checks(n, checks)?;
            if code.k == n - m {
                return Ok(code);
            }
            last = Some(code);
        }
        Ok(last.expect("at least one draw").freeze_to(n - m))
    }

    /// Keeps the first `k` free positions as information bits and fixes the rest to zero.
    fn freeze_to(mut self, k: usize) -> Self {
        if self.k <= k {
            return self;
        }
        self.frozen = self.info_positions.split_off(k);
        self.k = k;
        let frozen: std::collections::HashSet<usize> = self.frozen.iter().copied().collect();
        for (_, deps) in self.parity_rules.iter_mut() {
            deps.retain(|d| !frozen.contains(d));
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.checks.len()
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn check_edges(&self, j: usize) -> std::ops::Range<usize> {
        self.check_start[j]..self.check_start[j + 1]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Free positions forced to zero because the parity matrix lost rank.
    pub fn frozen_positions(&self) -> &[usize] {
        &self.frozen
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        check_len(self.k, message.len())?;
        let mut c = vec![0u8; self.n];
        for (&p, &b) in self.info_positions.iter().zip(message) {
            c[p] = b & 1;
        }
        for (p, deps) in &self.parity_rules {
            c[*p] = deps.iter().fold(0u8, |acc, &d| acc ^ c[d]);
        }
        Ok(c)
    }

    pub fn extract_message(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| codeword[p]).collect()
    }

    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.checks.iter().all(|c| c.iter().fold(0u8, |a, &v| a ^ bits[v]) == 0)
    }

    pub fn rank(&self) -> usize {
        self.parity_rules.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn regular16() -> LdpcCode {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        LdpcCode::build(16, 0.5, &DegreeDistribution::regular(3), &DegreeDistribution::regular(6), &mut rng).unwrap()
    }

    #[test]
    fn regular_code_degrees() {
        let c = regular16();
        assert_eq!(c.m(), 8);
        assert!(c.vars().iter().all(|v| v.len() == 3));
        assert!(c.checks().iter().all(|v| v.len() == 6));
        assert_eq!(c.k() + c.frozen_positions().len(), 16 - c.rank());
        assert_eq!(c.k(), 8);
    }

    #[test]
    fn zero_message_zero_codeword() {
        let c = regular16();
        let w = c.encode(&vec![0; c.k()]).unwrap();
        assert!(w.iter().all(|&b| b == 0));
        assert!(c.syndrome_ok(&w));
    }

    #[test]
    fn random_messages_satisfy_dense_parity() {
        let c = regular16();
        let mut h = vec![vec![0u8; 16]; 8];
        for (j, row) in c.checks().iter().enumerate() {
            for &v in row {
                h[j][v] = 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..3 {
            let msg: Vec<u8> = (0..c.k()).map(|_| rng.random_range(0..2)).collect();
            let w = c.encode(&msg).unwrap();
            for row in &h {
                let s: u32 = row.iter().zip(&w).map(|(a, b)| (a * b) as u32).sum();
                assert_eq!(s % 2, 0);
            }
            assert_eq!(c.extract_message(&w), msg);
        }
        assert!(c.encode(&[0, 1]).is_err());
    }

    #[test]
    fn default_ensemble_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let lambda = DegreeDistribution::default_variable();
        let rho = DegreeDistribution::default_check();
        let c = LdpcCode::build(512, 0.5, &lambda, &rho, &mut rng).unwrap();
        let count = |d: usize| c.vars().iter().filter(|v| v.len() == d).count();
        assert_eq!((count(2), count(3), count(5)), (204, 206, 102));
        // 1536 edges over 256 checks leaves degree 6 everywhere
        assert!(c.checks().iter().all(|r| r.len() == 6));
        assert_eq!(c.k(), 256);
        assert!((c.rate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_distributions_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let bad = DegreeDistribution(vec![(3, 0.5)]);
        assert!(LdpcCode::build(16, 0.5, &bad, &DegreeDistribution::regular(6), &mut rng).is_err());
        // 16 degree-2 variables cannot fill 8 checks of degree 7
        assert!(matches!(
            LdpcCode::build(16, 0.5, &DegreeDistribution::regular(2), &DegreeDistribution::regular(7), &mut rng),
            Err(Error::InfeasibleDegrees(_))
        ));
    }
}
