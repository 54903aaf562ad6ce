use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{CodedLink, ReceiverOutput};
use crate::channel::EffectiveChannel;
use crate::error::{check_len, Error, Result};
use crate::jsg::llr::symbols_to_bits;
use crate::ldpc::ldpc_decode_counted;
use crate::link::Segment;
use crate::ops::OpCounts;

/// Linear MMSE estimate with per-symbol unbiasing gain `[W H]_kk`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseEstimate {
    pub xhat: Vec<Complex64>,
    pub gain: Vec<f64>,
}

struct Equalizer {
    h: DMatrix<Complex64>,
    ginv: DMatrix<Complex64>,
}

impl Equalizer {
    fn new(h: DMatrix<Complex64>, n0: f64, ops: &mut OpCounts) -> Result<Self> {
        let (r, c) = (h.nrows() as u64, h.ncols() as u64);
        let mut g = h.adjoint() * &h;
        for k in 0..h.ncols() {
            g[(k, k)] += Complex64::new(n0, 0.0);
        }
        let ginv = g.cholesky().ok_or(Error::Singular)?.inverse();
        // Hermitian Gram, Cholesky factorization and inversion from the factor
        ops.cmul(c * (c + 1) / 2 * r + c * c * c / 6 + c * c * c / 3);
        ops.cadd(c * (c + 1) / 2 * r + c * c * c / 6 + c * c * c / 3);
        Ok(Equalizer { h, ginv })
    }

    fn apply(&self, y: &[Complex64], n0: f64, ops: &mut OpCounts) -> Result<MmseEstimate> {
        check_len(self.h.nrows(), y.len())?;
        let yv = DVector::from_column_slice(y);
        let xhat = &self.ginv * (self.h.adjoint() * yv);
        let (r, c) = (self.h.nrows() as u64, self.h.ncols() as u64);
        ops.cmul(r * c + c * c);
        ops.cadd(r * c + c * c);
        let gain = (0..self.h.ncols()).map(|k| 1.0 - n0 * self.ginv[(k, k)].re).collect();
        ops.rmul(c);
        ops.radd(c);
        Ok(MmseEstimate { xhat: xhat.iter().copied().collect(), gain })
    }
}

/// `xhat = (H^H H + n0 I)^{-1} H^H y`.
pub fn mmse_equalize(h: &EffectiveChannel, y: &[Complex64], n0: f64) -> Result<MmseEstimate> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidConfig("MMSE needs n0 > 0".into()));
    }
    let mut ops = OpCounts::default();
    Equalizer::new(h.to_dense(), n0, &mut ops)?.apply(y, n0, &mut ops)
}

/// Block MMSE equalization, unbiased Gaussian symbol LLRs, then LDPC decoding per codeword.
pub fn mmse_ldpc(segments: &[Segment], n0: f64, link: &CodedLink, iters: usize) -> Result<ReceiverOutput> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidConfig("MMSE needs n0 > 0".into()));
    }
    let c = &link.constellation;
    let m = c.order();
    let mut det = OpCounts::default();
    let mut sym_llr = Vec::new();
    let mut eq: Option<(&EffectiveChannel, Equalizer)> = None;
    for seg in segments {
        if eq.as_ref().is_none_or(|(h, _)| *h != &seg.h) {
            eq = Some((&seg.h, Equalizer::new(seg.h.to_dense(), n0, &mut det)?));
        }
        let est = eq.as_ref().expect("equalizer").1.apply(&seg.y, n0, &mut det)?;
        for (x, &mu) in est.xhat.iter().zip(&est.gain) {
            let mu = mu.clamp(1e-12, 1.0);
            let z = x / mu;
            let inv_var = 1.0 / ((1.0 - mu) / mu).max(1e-12);
            for a in 0..m {
                sym_llr.push(-(z - c.point(a)).norm_sqr() * inv_var);
            }
        }
        let k = est.xhat.len() as u64;
        det.rmul(4 * k);
        det.crmul(k);
        det.radd(k);
        det.cadd(k * m as u64);
        det.abs2(k * m as u64);
        det.rmul(k * m as u64);
    }
    let mut mapped = vec![0.0; sym_llr.len() / m * c.bits_per_symbol()];
    symbols_to_bits(&sym_llr, c, &mut mapped, &mut det)?;
    let coded = link.interleaver.deinterleave(&mapped)?;
    let mut dec = OpCounts::default();
    let mut hard = Vec::with_capacity(coded.len());
    let mut iterations = 0;
    for cw in coded.chunks(link.code.n()) {
        let r = ldpc_decode_counted(&link.code, cw, iters, &mut dec, None)?;
        iterations = iterations.max(r.iterations);
        hard.extend(r.bits);
    }
    let (bits, parity_ok) = link.finish(hard.clone());
    Ok(ReceiverOutput {
        bits,
        coded_bits: hard,
        iterations_used: iterations,
        op_counts: det + dec,
        ops_detector: det,
        ops_decoder: dec,
        parity_ok,
    })
}
