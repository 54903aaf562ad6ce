//! Symbol/bit LLR conversion and interleaving.
//!
//! Bit LLRs are `log P(b = 0) / P(b = 1)`; symbol LLRs are log-probabilities up to a constant.
//! Every entry point bumps a per-thread call counter so callers can check which conversions a
//! receiver path actually performed.

use std::cell::Cell;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{check_len, Error, Result};
use crate::ops::OpCounts;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversionCalls {
    pub symbol_to_bit: u64,
    pub bit_to_symbol: u64,
    pub interleave: u64,
    pub deinterleave: u64,
}

impl ConversionCalls {
    pub fn total(&self) -> u64 {
        self.symbol_to_bit + self.bit_to_symbol + self.interleave + self.deinterleave
    }
}

thread_local! {
    static CALLS: Cell<ConversionCalls> = const { Cell::new(ConversionCalls { symbol_to_bit: 0, bit_to_symbol: 0, interleave: 0, deinterleave: 0 }) };
}

fn bump(f: impl FnOnce(&mut ConversionCalls)) {
    CALLS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// Calls made on this thread since the last reset.
pub fn conversion_calls() -> ConversionCalls {
    CALLS.with(|c| c.get())
}

pub fn reset_conversion_calls() {
    CALLS.with(|c| c.set(ConversionCalls::default()));
}

/// `log(1 + e^{-x})` without overflow.
#[inline]
fn softplus_neg(x: f64) -> f64 {
    (-x.abs()).exp().ln_1p() + (-x).max(0.0)
}

/// Exact log-sum-exp marginalization of consecutive `M`-entry symbol LLR vectors.
pub fn symbols_to_bits(sym: &[f64], c: &Constellation, out: &mut [f64], ops: &mut OpCounts) -> Result<()> {
    let (m, q) = (c.order(), c.bits_per_symbol());
    if !sym.len().is_multiple_of(m) {
        return Err(Error::LengthMismatch { expected: sym.len().div_ceil(m) * m, got: sym.len() });
    }
    check_len(sym.len() / m * q, out.len())?;
    bump(|v| v.symbol_to_bit += 1);
    for (s, o) in sym.chunks(m).zip(out.chunks_mut(q)) {
        let mx = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p = [0.0f64; 256];
        for a in 0..m {
            p[a] = (s[a] - mx).exp();
        }
        for (i, oi) in o.iter_mut().enumerate() {
            let (mut z0, mut z1) = (0.0, 0.0);
            for (a, pa) in p[..m].iter().enumerate() {
                if c.label(a, i) == 0 {
                    z0 += pa;
                } else {
                    z1 += pa;
                }
            }
            *oi = z0.max(f64::MIN_POSITIVE).ln() - z1.max(f64::MIN_POSITIVE).ln();
        }
        ops.exps(m as u64);
        ops.radd((m + q * m) as u64);
        ops.logs(2 * q as u64);
    }
    Ok(())
}

/// `L(a) = sum_i [-Psi_a[i] L_i - log(1 + e^{-L_i})]` for consecutive `log2 M` bit groups.
pub fn bits_to_symbols(bits: &[f64], c: &Constellation, out: &mut [f64], ops: &mut OpCounts) -> Result<()> {
    let (m, q) = (c.order(), c.bits_per_symbol());
    if !bits.len().is_multiple_of(q) {
        return Err(Error::LengthMismatch { expected: bits.len().div_ceil(q) * q, got: bits.len() });
    }
    check_len(bits.len() / q * m, out.len())?;
    bump(|v| v.bit_to_symbol += 1);
    for (b, o) in bits.chunks(q).zip(out.chunks_mut(m)) {
        let mut base = [0.0f64; 16];
        for i in 0..q {
            base[i] = softplus_neg(b[i]);
        }
        for (a, oa) in o.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..q {
                acc -= base[i];
                if c.label(a, i) == 1 {
                    acc -= b[i];
                }
            }
            *oa = acc;
        }
        ops.exps(q as u64);
        ops.logs(q as u64);
        ops.radd((2 * q + m * q) as u64);
    }
    Ok(())
}

pub fn llr_symbol_to_bit(sym: &[f64], c: &Constellation) -> Result<Vec<f64>> {
    let mut out = vec![0.0; sym.len() / c.order() * c.bits_per_symbol()];
    symbols_to_bits(sym, c, &mut out, &mut OpCounts::default())?;
    Ok(out)
}

pub fn llr_bit_to_symbol(bits: &[f64], c: &Constellation) -> Result<Vec<f64>> {
    let mut out = vec![0.0; bits.len() / c.bits_per_symbol() * c.order()];
    bits_to_symbols(bits, c, &mut out, &mut OpCounts::default())?;
    Ok(out)
}

/// `interleave(x)[i] = x[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn identity(n: usize) -> Self {
        Interleaver { perm: (0..n).collect() }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Interleaver { perm }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidConfig("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(Interleaver { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.perm.len(), x.len())?;
        bump(|v| v.interleave += 1);
        Ok(self.perm.iter().map(|&p| x[p]).collect())
    }

    pub fn deinterleave<T: Copy + Default>(&self, y: &[T]) -> Result<Vec<T>> {
        check_len(self.perm.len(), y.len())?;
        bump(|v| v.deinterleave += 1);
        let mut out = vec![T::default(); y.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = y[i];
        }
        Ok(out)
    }
}
