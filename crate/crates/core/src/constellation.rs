//! Linear-encoding constellations: `x = g . u / ||g||`, `u_i = 1 - 2 b_i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    /// Normalized generator weights, one per bit.
    generator: Vec<Complex64>,
    points: Vec<Complex64>,
}

impl Constellation {
    /// Builds the constellation spanned by `generator`. Point `a` uses `u_i = 1 - 2((a >> i) & 1)`.
    pub fn from_generator(generator: &[Complex64]) -> Result<Self> {
        if generator.is_empty() || generator.len() > 16 {
            return Err(Error::InvalidConfig("generator length must be in 1..=16".into()));
        }
        let norm = generator.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidConfig("generator must be nonzero".into()));
        }
        let g: Vec<Complex64> = generator.iter().map(|v| v / norm).collect();
        let q = g.len();
        let points: Vec<Complex64> = (0..1usize << q)
            .map(|a| (0..q).map(|i| g[i] * sign_of_label(a, i)).sum())
            .collect();
        for i in 0..points.len() {
            for j in 0..i {
                if (points[i] - points[j]).norm() < 1e-9 {
                    return Err(Error::InvalidConfig("generator produces coincident points".into()));
                }
            }
        }
        Ok(Constellation { generator: g, points })
    }

    /// QPSK with `g = [1, -j]`.
    pub fn qpsk() -> Self {
        Self::from_generator(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]).unwrap()
    }

    /// BPSK, `g = [1]`.
    pub fn bpsk() -> Self {
        Self::from_generator(&[Complex64::new(1.0, 0.0)]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.generator.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, a: usize) -> Complex64 {
        self.points[a]
    }

    pub fn generator(&self) -> &[Complex64] {
        &self.generator
    }

    /// `Psi_a[i]`.
    #[inline]
    pub fn label(&self, a: usize, i: usize) -> u8 {
        ((a >> i) & 1) as u8
    }

    pub fn index_of_bits(&self, bits: &[u8]) -> usize {
        bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (((b & 1) as usize) << i))
    }

    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let q = self.bits_per_symbol();
        if !bits.len().is_multiple_of(q) {
            return Err(Error::LengthMismatch { expected: bits.len().div_ceil(q) * q, got: bits.len() });
        }
        Ok(bits.chunks(q).map(|c| self.points[self.index_of_bits(c)]).collect())
    }

    /// Nearest-point index.
    pub fn nearest(&self, x: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (a, p) in self.points.iter().enumerate() {
            let d = (x - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = a;
            }
        }
        best
    }

    pub fn demap_hard(&self, x: &[Complex64]) -> Vec<u8> {
        let q = self.bits_per_symbol();
        let mut out = Vec::with_capacity(x.len() * q);
        for &v in x {
            let a = self.nearest(v);
            out.extend((0..q).map(|i| self.label(a, i)));
        }
        out
    }

    /// Checks `bits.len() == n_symbols * log2 M`.
    pub fn check_bits(&self, n_symbols: usize, bits: &[u8]) -> Result<()> {
        check_len(n_symbols * self.bits_per_symbol(), bits.len())
    }
}

#[inline]
pub fn sign_of_label(a: usize, i: usize) -> f64 {
    1.0 - 2.0 * ((a >> i) & 1) as f64
}
