use serde::{Deserialize, Serialize};

use super::LdpcCode;
use crate::error::{check_len, Result};
use crate::ops::OpCounts;

pub const LLR_CLIP: f64 = 30.0;

/// `-ln tanh(x/2)` for `x >= 0`; an involution on `(0, inf)`.
#[inline]
pub fn phi(x: f64) -> f64 {
    (-x).exp().ln_1p() - (-(-x).exp_m1()).ln()
}

/// Exact pairwise boxplus.
pub fn boxplus(a: f64, b: f64) -> f64 {
    let s = a.signum() * b.signum();
    s * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Leave-one-out boxplus over a check: `out[i] = boxplus of inputs[j], j != i`.
/// Inputs are clipped to `LLR_CLIP`; an exact zero among the others yields zero.
pub fn cn_update(inputs: &[f64], out: &mut [f64]) {
    cn_update_counted(inputs, out, &mut OpCounts::default());
}

pub(crate) fn cn_update_counted(inputs: &[f64], out: &mut [f64], ops: &mut OpCounts) {
    let d = inputs.len();
    debug_assert_eq!(d, out.len());
    let mut mags = [0.0f64; 64];
    let mut heap;
    let mag: &mut [f64] = if d <= 64 {
        &mut mags[..d]
    } else {
        heap = vec![0.0; d];
        &mut heap[..]
    };
    let mut neg_total = false;
    for (m, &l) in mag.iter_mut().zip(inputs) {
        let c = l.clamp(-LLR_CLIP, LLR_CLIP);
        neg_total ^= c < 0.0;
        *m = phi(c.abs());
    }
    ops.exps(d as u64);
    ops.logs(d as u64);
    ops.rmul(d as u64);
    // prefix sums in `out`, suffix folded in on the way back
    let mut acc = 0.0;
    for i in 0..d {
        out[i] = acc;
        acc += mag[i];
    }
    let mut suf = 0.0;
    for i in (0..d).rev() {
        let s = out[i] + suf;
        suf += mag[i];
        let neg = neg_total ^ (inputs[i] < 0.0);
        let v = if s.is_infinite() { 0.0 } else { phi(s) };
        out[i] = if neg { -v } else { v };
    }
    ops.radd(3 * d as u64);
    ops.exps(d as u64);
    ops.logs(d as u64);
    ops.rmul(d as u64);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub success: bool,
    pub iterations: usize,
    /// A-posteriori LLRs, positive favouring bit 0.
    pub llrs: Vec<f64>,
}

/// Flooding sum-product decoding; stops once the hard decision satisfies every check.
pub fn ldpc_decode(code: &LdpcCode, llrs: &[f64], max_iter: usize) -> Result<DecodeResult> {
    ldpc_decode_counted(code, llrs, max_iter, &mut OpCounts::default(), None)
}

/// As [`ldpc_decode`], tallying operations and optionally recording the hard decision after
/// every iteration.
pub fn ldpc_decode_counted(
    code: &LdpcCode,
    llrs: &[f64],
    max_iter: usize,
    ops: &mut OpCounts,
    trajectory: Option<&mut Vec<Vec<u8>>>,
) -> Result<DecodeResult> {
    let mut c2v = vec![0.0; code.n_edges()];
    ldpc_decode_warm(code, llrs, max_iter, &mut c2v, ops, trajectory)
}

/// Decoding that resumes from check-to-variable messages `c2v` (all zero for a cold start)
/// and leaves the final ones there.
pub fn ldpc_decode_warm(
    code: &LdpcCode,
    llrs: &[f64],
    max_iter: usize,
    c2v: &mut [f64],
    ops: &mut OpCounts,
    mut trajectory: Option<&mut Vec<Vec<u8>>>,
) -> Result<DecodeResult> {
    check_len(code.n(), llrs.len())?;
    let e = code.n_edges();
    check_len(e, c2v.len())?;
    let warm = c2v.iter().any(|&c| c != 0.0);
    let mut v2c = vec![0.0; e];
    for v in 0..code.n() {
        let ve = code.var_edges(v);
        let total = llrs[v] + ve.iter().map(|&ed| c2v[ed]).sum::<f64>();
        for &ed in ve {
            v2c[ed] = total - c2v[ed];
        }
        if warm {
            ops.radd(2 * ve.len() as u64);
        }
    }
    let mut post = llrs.to_vec();
    let mut bits: Vec<u8> = post.iter().map(|&l| (l < 0.0) as u8).collect();
    let mut iterations = 0;
    let mut success = false;
    for _ in 0..max_iter {
        iterations += 1;
        for j in 0..code.m() {
            let r = code.check_edges(j);
            cn_update_counted(&v2c[r.clone()], &mut c2v[r], ops);
        }
        for v in 0..code.n() {
            let ve = code.var_edges(v);
            let total = llrs[v] + ve.iter().map(|&ed| c2v[ed]).sum::<f64>();
            for &ed in ve {
                v2c[ed] = total - c2v[ed];
            }
            post[v] = total;
            bits[v] = (total < 0.0) as u8;
            ops.radd(2 * ve.len() as u64);
        }
        if let Some(t) = trajectory.as_deref_mut() {
            t.push(bits.clone());
        }
        if code.syndrome_ok(&bits) {
            success = true;
            break;
        }
    }
    if max_iter == 0 {
        success = code.syndrome_ok(&bits);
    }
    Ok(DecodeResult { bits, success, iterations, llrs: post })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::DegreeDistribution;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tanh_oracle(others: &[f64]) -> f64 {
        2.0 * others.iter().map(|l| (l / 2.0).tanh()).product::<f64>().atanh()
    }

    fn code16() -> LdpcCode {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        LdpcCode::build(16, 0.5, &DegreeDistribution::regular(3), &DegreeDistribution::regular(6), &mut rng).unwrap()
    }

    #[test]
    fn hand_value() {
        let mut out = [0.0; 3];
        cn_update(&[1.0, -2.0, 0.7], &mut out);
        assert!((out[2] - (-0.735_325_664_055_519)).abs() < 1e-12);
        assert!((out[2] - tanh_oracle(&[1.0, -2.0])).abs() < 1e-12);
    }

    #[test]
    fn erasure_and_saturation() {
        let mut out = [0.0; 4];
        cn_update(&[0.0, 3.0, -1.0, 2.0], &mut out);
        assert_eq!(&out[1..], &[0.0, 0.0, 0.0]);
        assert!(out[0] != 0.0);
        let mut out = [0.0; 3];
        cn_update(&[f64::INFINITY, -1.3, 5.0], &mut out);
        assert!((out[2] - (-1.3)).abs() < 1e-9);
    }

    #[test]
    fn boxplus_matches_tanh() {
        for &(a, b) in &[(1.0, -2.0), (0.3, 0.4), (-7.0, -9.5), (25.0, 0.01)] {
            assert!((boxplus(a, b) - tanh_oracle(&[a, b])).abs() < 1e-9);
        }
    }

    #[test]
    fn noiseless_one_iteration() {
        let c = code16();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let msg: Vec<u8> = (0..c.k()).map(|_| rng.random_range(0..2)).collect();
        let w = c.encode(&msg).unwrap();
        let llr: Vec<f64> = w.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
        let r = ldpc_decode(&c, &llr, 10).unwrap();
        assert!(r.success);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.bits, w);
    }

    #[test]
    fn warm_start_continues_a_run() {
        let code = code16();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let llrs: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut ops = OpCounts::default();
        let full = ldpc_decode_counted(&code, &llrs, 6, &mut ops, None).unwrap();
        let mut c2v = vec![0.0; code.n_edges()];
        let a = ldpc_decode_warm(&code, &llrs, 3, &mut c2v, &mut ops, None).unwrap();
        if full.iterations == 6 && a.iterations == 3 && !a.success {
            let b = ldpc_decode_warm(&code, &llrs, 3, &mut c2v, &mut ops, None).unwrap();
            for (x, y) in b.llrs.iter().zip(&full.llrs) {
                assert!((x - y).abs() < 1e-12);
            }
        } else {
            panic!("fixture should not converge early");
        }
    }

    #[test]
    fn tie_is_zero() {
        let c = code16();
        let r = ldpc_decode(&c, &[0.0; 16], 0).unwrap();
        assert!(r.bits.iter().all(|&b| b == 0));
        assert!(r.success);
    }

    #[test]
    fn single_flip_corrected() {
        let c = code16();
        let w = c.encode(&vec![0; c.k()]).unwrap();
        for pos in 0..16 {
            let mut llr: Vec<f64> = w.iter().map(|_| 4.0).collect();
            llr[pos] = -4.0;
            let r = ldpc_decode(&c, &llr, 10).unwrap();
            assert!(r.success, "flip at {pos}");
            assert_eq!(r.bits, w);
        }
    }

    #[test]
    fn near_ml_on_short_code() {
        let c = code16();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let words: Vec<Vec<u8>> = (0..1usize << c.k())
            .map(|m| c.encode(&(0..c.k()).map(|i| ((m >> i) & 1) as u8).collect::<Vec<_>>()).unwrap())
            .collect();
        let n0 = 1.0 / (0.5 * 10f64.powf(0.6));
        let sigma = (n0 / 2.0).sqrt();
        let mut agree = 0;
        let trials = 400;
        for _ in 0..trials {
            let w = &words[rng.random_range(0..words.len())];
            let llr: Vec<f64> = w
                .iter()
                .map(|&b| {
                    let x = 1.0 - 2.0 * b as f64;
                    let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                    4.0 * (x + sigma * z) / (2.0 * n0) * 1.0
                })
                .collect();
            let ml = words
                .iter()
                .max_by(|a, b| {
                    let s = |w: &Vec<u8>| w.iter().zip(&llr).map(|(&b, l)| if b == 0 { *l } else { -*l }).sum::<f64>();
                    s(a).total_cmp(&s(b))
                })
                .unwrap();
            let r = ldpc_decode(&c, &llr, 20).unwrap();
            agree += (&r.bits == ml) as usize;
        }
        assert!(agree as f64 >= 0.95 * trials as f64, "{agree}/{trials}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn phi_is_involution(x in 1e-3f64..15.0) {
            prop_assert!((phi(phi(x)) - x).abs() < 1e-9);
        }

        #[test]
        fn matches_tanh_product(llrs in proptest::collection::vec(-12.0f64..12.0, 2..=8)) {
            let mut out = vec![0.0; llrs.len()];
            cn_update(&llrs, &mut out);
            for i in 0..llrs.len() {
                let others: Vec<f64> = llrs.iter().enumerate().filter(|e| e.0 != i).map(|e| *e.1).collect();
                let folded = others[1..].iter().fold(others[0], |a, &b| boxplus(a, b));
                prop_assert!((out[i] - folded).abs() < 1e-9);
            }
        }

        #[test]
        fn success_means_parity(seed in any::<u64>()) {
            let c = code16();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let llr: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..6.0)).collect();
            let r = ldpc_decode(&c, &llr, 15).unwrap();
            if r.success {
                prop_assert!(c.syndrome_ok(&r.bits));
            }
        }
    }
}
