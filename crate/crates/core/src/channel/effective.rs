use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ChannelRealization, PathSpec};
use crate::afdm::{cis_neg, AfdmConfig};
use crate::error::{check_len, Error, Result};

/// Entries whose fractional shift is below this are treated as integer.
const SHIFT_SNAP: f64 = 1e-9;

/// Band retained around each path's loop shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Full,
    HalfWidth(usize),
}

/// MIMO transmission scenario: independent streams or one stream repeated on every antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Scenario {
    Multiplexing,
    Diversity,
}

impl TryFrom<u8> for Scenario {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Scenario::Multiplexing),
            2 => Ok(Scenario::Diversity),
            _ => Err(format!("scenario must be 1 or 2, got {v}")),
        }
    }
}

impl From<Scenario> for u8 {
    fn from(s: Scenario) -> u8 {
        match s {
            Scenario::Multiplexing => 1,
            Scenario::Diversity => 2,
        }
    }
}

/// Integer loop shift `Ind_p` and the residual fractional shift `beta_p` (plus any non-integer
/// part of `2 N c1 d_p`).
pub fn path_shift(p: &PathSpec, cfg: &AfdmConfig) -> (usize, f64) {
    let n = cfg.n as f64;
    let real = p.alpha() as f64 + 2.0 * n * cfg.c1 * p.delay as f64;
    let rounded = real.round();
    let mut frac = real - rounded + p.beta();
    if frac.abs() < SHIFT_SNAP {
        frac = 0.0;
    }
    // keep the fractional part in (-1/2, 1/2]
    let mut ind = rounded;
    if frac > 0.5 {
        frac -= 1.0;
        ind += 1.0;
    } else if frac <= -0.5 {
        frac += 1.0;
        ind -= 1.0;
    }
    (ind.rem_euclid(n) as usize % cfg.n, frac)
}

fn gamma(q: i64, f: f64, n: usize) -> Complex64 {
    let nn = n as i64;
    let qm = q.rem_euclid(nn);
    let theta = qm as f64 + f;
    let den = (PI * theta / n as f64).sin();
    if den.abs() < 1e-12 {
        return Complex64::new(n as f64, 0.0);
    }
    let sign = if qm % 2 == 0 { 1.0 } else { -1.0 };
    let num = sign * (PI * f).sin();
    if num == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = cis_neg(theta * (n as f64 - 1.0) / (2.0 * n as f64));
    phase * (num / den)
}

fn eta(p: &PathSpec, cfg: &AfdmConfig, n: usize, m: usize) -> Complex64 {
    let nn = cfg.n as i64;
    let d = p.delay as i64;
    let (n, m) = (n as i64, m as i64);
    let t = (cfg.c1 * (d * d) as f64).rem_euclid(1.0) - ((m * d) % nn) as f64 / nn as f64
        + (cfg.c2 * (m * m) as f64).rem_euclid(1.0)
        - (cfg.c2 * (n * n) as f64).rem_euclid(1.0);
    cis_neg(-t)
}

/// `Hbar_p[n, m] = eta * gamma / N`, the DAFT-domain response of a unit-gain path.
pub fn effective_entry(p: &PathSpec, n: usize, m: usize, cfg: &AfdmConfig) -> Complex64 {
    let (ind, f) = path_shift(p, cfg);
    entry_with_shift(p, cfg, ind, f, n, m)
}

fn entry_with_shift(p: &PathSpec, cfg: &AfdmConfig, ind: usize, f: f64, n: usize, m: usize) -> Complex64 {
    let q = n as i64 - m as i64 + ind as i64;
    let g = gamma(q, f, cfg.n);
    if g.re == 0.0 && g.im == 0.0 {
        return g;
    }
    eta(p, cfg, n, m) * g / cfg.n as f64
}

/// One `N x N` block in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlock {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseBlock {
    pub fn zeros(n: usize) -> Self {
        SparseBlock { n, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    /// From dense rows; exact zeros are dropped.
    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let mut b = SparseBlock { n, row_ptr: Vec::with_capacity(n + 1), cols: Vec::new(), vals: Vec::new() };
        b.row_ptr.push(0);
        for r in 0..n {
            for c in 0..n {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    b.cols.push(c);
                    b.vals.push(v);
                }
            }
            b.row_ptr.push(b.cols.len());
        }
        b
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.cols[a..b].binary_search(&c) {
            Ok(i) => self.vals[a + i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    fn add(&self, other: &SparseBlock) -> SparseBlock {
        let mut dense = self.to_dense();
        dense += other.to_dense();
        SparseBlock::from_dense(&dense)
    }
}

/// Stacked DAFT-domain channel, `N n_r x N n_t`, stored as per-antenna-pair blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub n: usize,
    pub n_r: usize,
    pub n_t: usize,
    blocks: Vec<SparseBlock>,
    /// Loop shifts of the paths that built each block (empty after summation).
    pub ind: Vec<Vec<usize>>,
}

impl EffectiveChannel {
    pub fn from_blocks(n: usize, n_r: usize, n_t: usize, blocks: Vec<SparseBlock>) -> Result<Self> {
        if blocks.len() != n_r * n_t || blocks.iter().any(|b| b.n != n) {
            return Err(Error::DimensionMismatch("block grid does not match n_r x n_t of size N".into()));
        }
        let ind = vec![Vec::new(); blocks.len()];
        Ok(EffectiveChannel { n, n_r, n_t, blocks, ind })
    }

    pub fn block(&self, r: usize, t: usize) -> &SparseBlock {
        &self.blocks[r * self.n_t + t]
    }

    pub fn rows(&self) -> usize {
        self.n * self.n_r
    }

    pub fn cols(&self) -> usize {
        self.n * self.n_t
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(|b| b.nnz()).sum()
    }

    /// Nonzeros of global row `n_r * N + n` as `(global column, value)`.
    pub fn row_entries(&self, row: usize) -> Vec<(usize, Complex64)> {
        let (r, n) = (row / self.n, row % self.n);
        let mut out = Vec::new();
        for t in 0..self.n_t {
            out.extend(self.block(r, t).row(n).map(|(c, v)| (t * self.n + c, v)));
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.cols(), x.len())?;
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows()];
        for r in 0..self.n_r {
            for t in 0..self.n_t {
                let b = self.block(r, t);
                for n in 0..self.n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, v) in b.row(n) {
                        acc += v * x[t * self.n + c];
                    }
                    y[r * self.n + n] += acc;
                }
            }
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows(), self.cols());
        for r in 0..self.n_r {
            for t in 0..self.n_t {
                let b = self.block(r, t);
                for n in 0..self.n {
                    for (c, v) in b.row(n) {
                        m[(r * self.n + n, t * self.n + c)] = v;
                    }
                }
            }
        }
        m
    }
}

fn build_block(paths: &[PathSpec], cfg: &AfdmConfig, band: Band) -> (SparseBlock, Vec<usize>) {
    let n = cfg.n;
    let shifts: Vec<(usize, f64)> = paths.iter().map(|p| path_shift(p, cfg)).collect();
    let half = match band {
        Band::Full => None,
        Band::HalfWidth(k) if 2 * k + 1 >= n => None,
        Band::HalfWidth(k) => Some(k),
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut touched = vec![false; n];
    let mut b = SparseBlock { n, row_ptr: Vec::with_capacity(n + 1), cols: Vec::new(), vals: Vec::new() };
    b.row_ptr.push(0);
    for row in 0..n {
        for (p, &(ind, f)) in paths.iter().zip(&shifts) {
            let mut visit = |m: usize| {
                let v = entry_with_shift(p, cfg, ind, f, row, m);
                if v.re != 0.0 || v.im != 0.0 {
                    acc[m] += p.gain * v;
                    touched[m] = true;
                }
            };
            match half {
                None => (0..n).for_each(&mut visit),
                Some(k) => {
                    for off in -(k as i64)..=(k as i64) {
                        visit(((row + ind) as i64 + off).rem_euclid(n as i64) as usize);
                    }
                }
            }
        }
        for m in 0..n {
            if touched[m] {
                let v = acc[m];
                if v.re != 0.0 || v.im != 0.0 {
                    b.cols.push(m);
                    b.vals.push(v);
                }
                acc[m] = Complex64::new(0.0, 0.0);
                touched[m] = false;
            }
        }
        b.row_ptr.push(b.cols.len());
    }
    (b, shifts.into_iter().map(|s| s.0).collect())
}

/// Sums each path's (optionally band-limited) DAFT-domain response with its gain.
/// The result is the multiplexing (Scenario 1) stacking.
pub fn build_effective(ch: &ChannelRealization, cfg: &AfdmConfig, band: Band) -> Result<EffectiveChannel> {
    ch.validate(cfg)?;
    let mut blocks = Vec::with_capacity(ch.links.len());
    let mut inds = Vec::with_capacity(ch.links.len());
    for l in &ch.links {
        let (b, i) = build_block(l, cfg, band);
        blocks.push(b);
        inds.push(i);
    }
    let mut eff = EffectiveChannel::from_blocks(cfg.n, ch.n_r, ch.n_t, blocks)?;
    eff.ind = inds;
    Ok(eff)
}

/// Stacks single-link channels `blocks[r][t]`. Diversity sums the blocks of each receive antenna.
pub fn stack_mimo(blocks: &[Vec<EffectiveChannel>], scenario: Scenario) -> Result<EffectiveChannel> {
    let n_r = blocks.len();
    if n_r == 0 || blocks[0].is_empty() {
        return Err(Error::DimensionMismatch("empty block grid".into()));
    }
    let n_t = blocks[0].len();
    let n = blocks[0][0].n;
    for row in blocks {
        if row.len() != n_t {
            return Err(Error::DimensionMismatch("ragged block grid".into()));
        }
        for b in row {
            if b.n != n || b.n_r != 1 || b.n_t != 1 {
                return Err(Error::DimensionMismatch("blocks must be single-link with equal N".into()));
            }
        }
    }
    match scenario {
        Scenario::Multiplexing => {
            let mut out = Vec::with_capacity(n_r * n_t);
            let mut ind = Vec::with_capacity(n_r * n_t);
            for row in blocks {
                for b in row {
                    out.push(b.blocks[0].clone());
                    ind.push(b.ind[0].clone());
                }
            }
            let mut eff = EffectiveChannel::from_blocks(n, n_r, n_t, out)?;
            eff.ind = ind;
            Ok(eff)
        }
        Scenario::Diversity => {
            let mut out = Vec::with_capacity(n_r);
            for row in blocks {
                let mut acc = row[0].blocks[0].clone();
                for b in &row[1..] {
                    acc = acc.add(&b.blocks[0]);
                }
                out.push(acc);
            }
            EffectiveChannel::from_blocks(n, n_r, 1, out)
        }
    }
}

impl EffectiveChannel {
    /// Splits a multiplexing channel into single-link channels.
    pub fn split_links(&self) -> Vec<Vec<EffectiveChannel>> {
        (0..self.n_r)
            .map(|r| {
                (0..self.n_t)
                    .map(|t| {
                        let k = r * self.n_t + t;
                        EffectiveChannel {
                            n: self.n,
                            n_r: 1,
                            n_t: 1,
                            blocks: vec![self.blocks[k].clone()],
                            ind: vec![self.ind[k].clone()],
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Applies the transmission scenario to a multiplexing-stacked channel.
    pub fn for_scenario(&self, scenario: Scenario) -> Result<EffectiveChannel> {
        match scenario {
            Scenario::Multiplexing => Ok(self.clone()),
            Scenario::Diversity => stack_mimo(&self.split_links(), Scenario::Diversity),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afdm::daft_matrix;
    use crate::channel::{sample_paths, PowerProfile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_time_path(p: &PathSpec, cfg: &AfdmConfig) -> DMatrix<Complex64> {
        let n = cfg.n;
        DMatrix::from_fn(n, n, |row, col| {
            if col != (row + n - p.delay) % n {
                return Complex64::new(0.0, 0.0);
            }
            let g = if row < p.delay {
                let e = cfg.c1 * ((n * n) as f64 - 2.0 * n as f64 * (p.delay - row) as f64);
                Complex64::from_polar(1.0, -2.0 * PI * e)
            } else {
                Complex64::new(1.0, 0.0)
            };
            g * Complex64::from_polar(1.0, -2.0 * PI * p.doppler * row as f64 / n as f64)
        })
    }

    fn oracle(p: &PathSpec, cfg: &AfdmConfig) -> DMatrix<Complex64> {
        let a = daft_matrix(cfg);
        &a * dense_time_path(p, cfg) * a.adjoint()
    }

    #[test]
    fn peak_entry_has_unit_magnitude() {
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let p = PathSpec::new(Complex64::new(1.0, 0.0), 3, 2.0);
        let (ind, f) = path_shift(&p, &cfg);
        assert_eq!((ind, f), (8, 0.0));
        for n in 0..16 {
            assert!((effective_entry(&p, n, (n + ind) % 16, &cfg).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_dense_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let c1 = if rng.random::<bool>() { 1.0 / 16.0 } else { rng.random::<f64>() };
            let cfg = AfdmConfig::new(16, c1, rng.random::<f64>(), 5).unwrap();
            let p = PathSpec::new(Complex64::new(1.0, 0.0), rng.random_range(0..=5), rng.random_range(-2.5..2.5));
            let o = oracle(&p, &cfg);
            for n in 0..16 {
                for m in 0..16 {
                    assert!((effective_entry(&p, n, m, &cfg) - o[(n, m)]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn peak_is_at_loop_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cfg = AfdmConfig::with_default_chirps(32, 4).unwrap();
        for _ in 0..20 {
            let p = PathSpec::new(Complex64::new(1.0, 0.0), rng.random_range(0..=4), rng.random_range(-1.4..1.4));
            let (ind, _) = path_shift(&p, &cfg);
            for n in 0..32 {
                let peak = effective_entry(&p, n, (n + ind) % 32, &cfg).norm();
                for m in 0..32 {
                    assert!(effective_entry(&p, n, m, &cfg).norm() <= peak + 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_band_row_energy() {
        let cfg = AfdmConfig::with_default_chirps(32, 4).unwrap();
        let p = PathSpec::new(Complex64::new(0.6, -0.3), 2, 0.37);
        let eff = build_effective(&ChannelRealization::siso(vec![p]), &cfg, Band::Full).unwrap();
        for n in 0..32 {
            let e: f64 = eff.block(0, 0).row(n).map(|(_, v)| v.norm_sqr()).sum();
            assert!((e - p.gain.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_doppler_is_one_diagonal_per_path() {
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let p1 = PathSpec::new(Complex64::new(1.0, 0.0), 0, 1.0);
        let p2 = PathSpec::new(Complex64::new(0.5, 0.5), 3, -1.0);
        for band in [Band::HalfWidth(0), Band::Full] {
            let eff = build_effective(&ChannelRealization::siso(vec![p1, p2]), &cfg, band).unwrap();
            for n in 0..16 {
                let cols: Vec<usize> = eff.block(0, 0).row(n).map(|e| e.0).collect();
                let mut expect = vec![(n + 1) % 16, (n + 5) % 16];
                expect.sort();
                assert_eq!(cols, expect);
            }
            assert_eq!(eff.ind[0], vec![1, 5]);
        }
    }

    #[test]
    fn band_captured_energy_is_monotone() {
        let cfg = AfdmConfig::with_default_chirps(32, 4).unwrap();
        let p = PathSpec::new(Complex64::new(1.0, 0.0), 1, 0.3);
        let ch = ChannelRealization::siso(vec![p]);
        let mut last = 0.0;
        for k in 0..=16 {
            let eff = build_effective(&ch, &cfg, Band::HalfWidth(k)).unwrap();
            let e: f64 = eff.block(0, 0).row(5).map(|(_, v)| v.norm_sqr()).sum();
            assert!(e >= last - 1e-15);
            last = e;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ind_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = AfdmConfig::with_default_chirps(64, 10).unwrap();
        for _ in 0..100 {
            let p = sample_paths(1, 3.0, 0, 10, PowerProfile::Uniform, &mut rng).unwrap()[0];
            let p = PathSpec { delay: rng.random_range(0..=10), ..p };
            let expect = (p.alpha() + 2 * p.delay as i64).rem_euclid(64) as usize;
            let (ind, f) = path_shift(&p, &cfg);
            assert_eq!(ind, expect);
            assert!((f - p.beta()).abs() < 1e-12);
        }
    }

    #[test]
    fn stacking_scenarios() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cfg = AfdmConfig::with_default_chirps(8, 2).unwrap();
        let mk = |rng: &mut ChaCha8Rng| {
            let p = sample_paths(2, 0.8, 2, 2, PowerProfile::Uniform, rng).unwrap();
            build_effective(&ChannelRealization::siso(p), &cfg, Band::Full).unwrap()
        };
        let grid: Vec<Vec<EffectiveChannel>> = (0..2).map(|_| (0..2).map(|_| mk(&mut rng)).collect()).collect();
        let h = stack_mimo(&grid, Scenario::Multiplexing).unwrap();
        let x: Vec<Complex64> = (0..16).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let y = h.matvec(&x).unwrap();
        for r in 0..2 {
            let mut expect = [Complex64::new(0.0, 0.0); 8];
            for t in 0..2 {
                let part = grid[r][t].matvec(&x[t * 8..(t + 1) * 8]).unwrap();
                for (e, p) in expect.iter_mut().zip(part) {
                    *e += p;
                }
            }
            for n in 0..8 {
                assert!((y[r * 8 + n] - expect[n]).norm() < 1e-12);
            }
        }
        let same: Vec<Vec<EffectiveChannel>> = grid.iter().map(|row| vec![row[0].clone(), row[0].clone()]).collect();
        let d = stack_mimo(&same, Scenario::Diversity).unwrap();
        assert_eq!((d.rows(), d.cols()), (16, 8));
        let single = grid[0][0].to_dense();
        let blk = d.block(0, 0).to_dense();
        for i in 0..8 {
            for j in 0..8 {
                assert!((blk[(i, j)] - single[(i, j)] * 2.0).norm() < 1e-12);
            }
        }
        let one = stack_mimo(&[vec![grid[0][0].clone()]], Scenario::Multiplexing).unwrap();
        assert_eq!(one, grid[0][0]);
        let other = build_effective(
            &ChannelRealization::siso(vec![PathSpec::new(Complex64::new(1.0, 0.0), 0, 0.0)]),
            &AfdmConfig::with_default_chirps(4, 1).unwrap(),
            Band::Full,
        )
        .unwrap();
        assert!(stack_mimo(&[vec![grid[0][0].clone(), other]], Scenario::Multiplexing).is_err());
    }
}
