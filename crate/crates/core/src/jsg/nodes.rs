//! Single-node update rules.

use num_complex::Complex64;

use super::graph::FnEdge;
use super::message::{clamp_var, damp, discrete_moments, extrinsic_scaled, GaussianMessage, NegativeVariance, VAR_MAX, VAR_MIN};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::ops::OpCounts;

/// Largest likelihood-node degree the max-log enumeration accepts.
pub const BP_DEGREE_CAP: usize = 8;

/// Pruned edges of one likelihood node folded into one term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergedTerm {
    pub sum_coef: Complex64,
    pub sum_abs2: f64,
    pub mean: Complex64,
    pub var: f64,
}

impl MergedTerm {
    #[inline]
    fn contribution(&self, ops: &mut OpCounts) -> (Complex64, f64) {
        ops.cmul(1);
        ops.rmul(1);
        (self.mean * self.sum_coef, self.var * self.sum_abs2)
    }
}

/// Adds `sum_coef * mu_S` to the interference mean and `sum_abs2 * xi_S` to its variance.
fn interference(
    edges: &[FnEdge],
    incoming: &[GaussianMessage],
    merged: Option<&MergedTerm>,
    real_means: bool,
    prods: &mut Vec<Complex64>,
    ops: &mut OpCounts,
) -> (Complex64, f64) {
    prods.clear();
    let mut z = Complex64::new(0.0, 0.0);
    let mut b = 0.0;
    for (e, m) in edges.iter().zip(incoming) {
        let p = if real_means { e.coef * m.mean.re } else { e.coef * m.mean };
        prods.push(p);
        z += p;
        b += e.abs2 * m.var;
    }
    let d = edges.len() as u64;
    if real_means {
        ops.crmul(d);
    } else {
        ops.cmul(d);
    }
    ops.cadd(d);
    ops.rmul(d);
    ops.radd(d);
    if let Some(t) = merged {
        let (mz, mb) = t.contribution(ops);
        z += mz;
        b += mb;
        ops.cadd(1);
        ops.radd(1);
    }
    (z, b)
}

#[allow(clippy::too_many_arguments)]
fn leave_one_out(
    y: Complex64,
    n0: f64,
    edges: &[FnEdge],
    incoming: &[GaussianMessage],
    z: Complex64,
    b: f64,
    prods: &[Complex64],
    out: &mut [GaussianMessage],
    ops: &mut OpCounts,
) {
    for k in 0..edges.len() {
        let zk = z - prods[k];
        let bk = (b - edges[k].abs2 * incoming[k].var).max(0.0);
        out[k] = GaussianMessage { mean: (y - zk) * edges[k].inv, var: clamp_var((n0 + bk) * edges[k].inv_abs2) };
    }
    let d = edges.len() as u64;
    ops.cadd(2 * d);
    ops.rmul(2 * d);
    ops.radd(2 * d);
    ops.cmul(d);
}

/// Likelihood-node Gaussian update: `mu = (y - Z_k) / h_k`, `xi = (N0 + B_k) / |h_k|^2` with
/// leave-one-out interference sums.
pub fn ep_fn_update(
    y: Complex64,
    n0: f64,
    edges: &[FnEdge],
    incoming: &[GaussianMessage],
    merged: Option<&MergedTerm>,
    out: &mut [GaussianMessage],
    ops: &mut OpCounts,
) {
    let mut prods = Vec::with_capacity(edges.len());
    let (z, b) = interference(edges, incoming, merged, false, &mut prods, ops);
    leave_one_out(y, n0, edges, incoming, z, b, &prods, out, ops);
}

/// Bit-node version of [`ep_fn_update`]; also returns `L = -4 Re(mu) / xi` per edge.
#[allow(clippy::too_many_arguments)]
pub fn ejsg_fn_update(
    y: Complex64,
    n0: f64,
    edges: &[FnEdge],
    incoming: &[GaussianMessage],
    merged: Option<&MergedTerm>,
    out: &mut [GaussianMessage],
    out_llr: &mut [f64],
    ops: &mut OpCounts,
) {
    let mut prods = Vec::with_capacity(edges.len());
    let (z, b) = interference(edges, incoming, merged, true, &mut prods, ops);
    leave_one_out(y, n0, edges, incoming, z, b, &prods, out, ops);
    for (l, m) in out_llr.iter_mut().zip(out.iter()) {
        *l = -4.0 * m.mean.re / m.var;
    }
    ops.rmul(2 * edges.len() as u64);
}

/// Max-log likelihood-node update over all joint symbol configurations. `incoming` and `out`
/// are `d x M` row-major; outputs are extrinsic and normalized to a zero maximum.
#[allow(clippy::too_many_arguments)]
pub fn bp_fn_update(
    y: Complex64,
    n0: f64,
    edges: &[FnEdge],
    incoming: &[f64],
    merged: Option<&MergedTerm>,
    c: &Constellation,
    out: &mut [f64],
    ops: &mut OpCounts,
) -> Result<()> {
    let d = edges.len();
    if d > BP_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { degree: d, cap: BP_DEGREE_CAP });
    }
    let m = c.order();
    out[..d * m].iter_mut().for_each(|o| *o = f64::NEG_INFINITY);
    if d == 0 {
        return Ok(());
    }
    let (mut yr, mut noise) = (y, n0);
    if let Some(t) = merged {
        let (mz, mb) = t.contribution(ops);
        yr -= mz;
        noise += mb;
    }
    let inv_noise = 1.0 / noise;
    let mut ha = vec![Complex64::new(0.0, 0.0); d * m];
    for k in 0..d {
        for a in 0..m {
            ha[k * m + a] = edges[k].coef * c.point(a);
        }
    }
    ops.cmul((d * m) as u64);
    let mut digits = vec![0usize; d];
    let total = m.pow(d as u32);
    for _ in 0..total {
        let mut s = yr;
        let mut prior = 0.0;
        for k in 0..d {
            s -= ha[k * m + digits[k]];
            prior += incoming[k * m + digits[k]];
        }
        let metric = -s.norm_sqr() * inv_noise + prior;
        for k in 0..d {
            let idx = k * m + digits[k];
            let v = metric - incoming[idx];
            if v > out[idx] {
                out[idx] = v;
            }
        }
        for dk in digits.iter_mut() {
            *dk += 1;
            if *dk < m {
                break;
            }
            *dk = 0;
        }
    }
    let t = total as u64;
    ops.cadd(d as u64 * t);
    ops.abs2(t);
    ops.rmul(t);
    ops.radd(3 * d as u64 * t);
    for k in 0..d {
        let row = &mut out[k * m..(k + 1) * m];
        let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.iter_mut().for_each(|v| *v -= mx);
    }
    ops.radd((d * m) as u64);
    Ok(())
}

/// Product of the incoming Gaussians as `(sum 1/xi, sum mu/xi)`.
pub fn gaussian_product(incoming: &[GaussianMessage], ops: &mut OpCounts) -> (f64, Complex64) {
    let mut p = 0.0;
    let mut q = Complex64::new(0.0, 0.0);
    for m in incoming {
        let w = 1.0 / m.var;
        p += w;
        q += m.mean * w;
    }
    let d = incoming.len() as u64;
    ops.rmul(d);
    ops.crmul(d);
    ops.radd(d);
    ops.cadd(d);
    (p, q)
}

/// Symbol log-likelihoods of the Gaussian product, `-|a|^2 P + 2 Re(conj(a) Q)`; equal to
/// `sum_k -|a - mu_k|^2 / xi_k` up to a constant.
pub fn product_symbol_llrs(p: f64, q: Complex64, c: &Constellation, out: &mut [f64], ops: &mut OpCounts) {
    for (a, o) in out.iter_mut().enumerate() {
        let x = c.point(a);
        *o = -x.norm_sqr() * p + 2.0 * (x.re * q.re + x.im * q.im);
    }
    let m = c.order() as u64;
    ops.rmul(5 * m);
    ops.radd(2 * m);
}

/// Symbol-node EP update. `vi_llrs` holds the aggregated likelihood-side symbol LLRs
/// (see [`product_symbol_llrs`]). Writes the posterior LLRs and damped extrinsic messages;
/// returns the posterior Gaussian.
#[allow(clippy::too_many_arguments)]
pub fn ep_avn_posterior(
    prior: &[f64],
    vi_llrs: &[f64],
    incoming: &[GaussianMessage],
    c: &Constellation,
    policy: NegativeVariance,
    damping: f64,
    post_llr: &mut [f64],
    out: &mut [GaussianMessage],
    ops: &mut OpCounts,
) -> GaussianMessage {
    let m = c.order();
    for a in 0..m {
        post_llr[a] = prior[a] + vi_llrs[a];
    }
    ops.radd(m as u64);
    let mut probs = [0.0f64; 256];
    let post = discrete_moments(post_llr, c, &mut probs[..m], ops);
    let post_prec = 1.0 / post.var;
    ops.rmul(1);
    for (k, inc) in incoming.iter().enumerate() {
        let fresh = match extrinsic_scaled(post.mean, post_prec, inc, 1.0, ops) {
            Some(msg) => msg,
            None => match policy {
                NegativeVariance::Uninformative => GaussianMessage { mean: post.mean, var: VAR_MAX },
                NegativeVariance::KeepPrevious => out[k],
            },
        };
        out[k] = damp(fresh, &out[k], damping, ops);
    }
    post
}

/// Full symbol-node EP update from the incoming likelihood messages.
#[allow(clippy::too_many_arguments)]
pub fn ep_avn_update(
    prior: &[f64],
    incoming: &[GaussianMessage],
    c: &Constellation,
    policy: NegativeVariance,
    damping: f64,
    post_llr: &mut [f64],
    out: &mut [GaussianMessage],
    ops: &mut OpCounts,
) -> GaussianMessage {
    let (p, q) = gaussian_product(incoming, ops);
    let mut vi = vec![0.0; c.order()];
    product_symbol_llrs(p, q, c, &mut vi, ops);
    ep_avn_posterior(prior, &vi, incoming, c, policy, damping, post_llr, out, ops)
}

/// Posterior of a ±1 bit node. LLRs follow `log P(u = -1) / P(u = +1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvnBelief {
    pub llr: f64,
    pub mean: f64,
    pub var: f64,
}

/// `mu = -tanh(L/2)`, `xi = 1 - mu^2`.
pub fn bit_moments(l: f64, ops: &mut OpCounts) -> (f64, f64) {
    let mu = -(0.5 * l).tanh();
    ops.exps(1);
    ops.rmul(2);
    ops.radd(1);
    (mu, (1.0 - mu * mu).max(VAR_MIN))
}

/// Bit-node update. `fn_llrs`/`fn_msgs` come from the likelihood side, `cn_llrs` from the
/// checks in the decoder convention `log P(0)/P(1)`, `prior_ldpc` is any extra prior in that
/// convention. Writes the decoder-convention messages to each check and damped Gaussian
/// messages to each likelihood node. `precision_scale` weights the incoming precision
/// removed from the posterior.
#[allow(clippy::too_many_arguments)]
pub fn ejsg_bvn_update(
    fn_llrs: &[f64],
    fn_msgs: &[GaussianMessage],
    cn_llrs: &[f64],
    prior_ldpc: f64,
    policy: NegativeVariance,
    damping: f64,
    precision_scale: f64,
    out_cn: &mut [f64],
    out_fn: &mut [GaussianMessage],
    ops: &mut OpCounts,
) -> BvnBelief {
    let vi: f64 = fn_llrs.iter().sum();
    let cn: f64 = cn_llrs.iter().sum();
    let to_dec = -vi + prior_ldpc;
    for (o, c) in out_cn.iter_mut().zip(cn_llrs) {
        *o = to_dec + cn - c;
    }
    let l = vi - prior_ldpc - cn;
    ops.radd((fn_llrs.len() + 2 * cn_llrs.len() + 2) as u64);
    let (mu, xi) = bit_moments(l, ops);
    let prec = 1.0 / xi;
    ops.rmul(1);
    let mean = Complex64::new(mu, 0.0);
    for (k, inc) in fn_msgs.iter().enumerate() {
        let inc_re = GaussianMessage { mean: Complex64::new(inc.mean.re, 0.0), var: inc.var };
        let fresh = match extrinsic_scaled(mean, prec, &inc_re, precision_scale, ops) {
            Some(m) => GaussianMessage { mean: Complex64::new(m.mean.re, 0.0), var: m.var },
            None => match policy {
                NegativeVariance::Uninformative => GaussianMessage { mean, var: VAR_MAX },
                NegativeVariance::KeepPrevious => out_fn[k],
            },
        };
        out_fn[k] = damp(fresh, &out_fn[k], damping, ops);
    }
    BvnBelief { llr: l, mean: mu, var: xi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn edges(h: &[Complex64]) -> Vec<FnEdge> {
        h.iter().map(|&v| FnEdge::new(v)).collect()
    }

    #[test]
    fn degree_one_ep_fn() {
        let y = c(0.3, -0.8);
        let mut out = [GaussianMessage::initial()];
        ep_fn_update(y, 0.2, &edges(&[c(1.0, 0.0)]), &[GaussianMessage::initial()], None, &mut out, &mut OpCounts::default());
        assert!((out[0].mean - y).norm() < 1e-15);
        assert!((out[0].var - 0.2).abs() < 1e-15);
    }

    #[test]
    fn degree_three_leave_one_out() {
        let h = [c(0.5, 0.1), c(-0.3, 0.7), c(0.2, -0.4)];
        let inc = [
            GaussianMessage::new(c(0.1, 0.2), 0.5),
            GaussianMessage::new(c(-0.7, 0.3), 0.1),
            GaussianMessage::new(c(0.4, -0.9), 2.0),
        ];
        let y = c(0.9, -0.1);
        let mut out = [GaussianMessage::initial(); 3];
        ep_fn_update(y, 0.3, &edges(&h), &inc, None, &mut out, &mut OpCounts::default());
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let z = h[i] * inc[i].mean + h[j] * inc[j].mean;
            let b = h[i].norm_sqr() * inc[i].var + h[j].norm_sqr() * inc[j].var;
            assert!((out[k].mean - (y - z) / h[k]).norm() < 1e-12);
            assert!((out[k].var - (0.3 + b) / h[k].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_of_coefficients() {
        let h = [c(0.5, 0.1), c(-0.3, 0.7)];
        let inc = [GaussianMessage::new(c(0.1, 0.2), 0.5), GaussianMessage::new(c(-0.7, 0.3), 0.1)];
        let y = c(0.4, 0.4);
        let rot = Complex64::from_polar(1.0, 0.7);
        let mut a = [GaussianMessage::initial(); 2];
        let mut b = [GaussianMessage::initial(); 2];
        ep_fn_update(y, 0.1, &edges(&h), &inc, None, &mut a, &mut OpCounts::default());
        let hr: Vec<Complex64> = vec![h[0] * rot, h[1]];
        ep_fn_update(y, 0.1, &edges(&hr), &inc, None, &mut b, &mut OpCounts::default());
        assert!((b[0].mean - a[0].mean * rot.conj()).norm() < 1e-12);
        assert!((b[0].var - a[0].var).abs() < 1e-12);
    }

    #[test]
    fn bp_degree_one_selects_symbol() {
        let q = Constellation::qpsk();
        let h = c(0.8, -0.3);
        for x0 in 0..4 {
            let y = h * q.point(x0);
            let mut out = [0.0; 4];
            bp_fn_update(y, 1e-6, &edges(&[h]), &[0.0; 4], None, &q, &mut out, &mut OpCounts::default()).unwrap();
            let best = (0..4).max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap();
            assert_eq!(best, x0);
            assert_eq!(out[x0], 0.0);
        }
    }

    #[test]
    fn bp_degree_two_matches_enumeration() {
        let q = Constellation::qpsk();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..20 {
            let h = [c(rng.random(), rng.random()), c(rng.random(), rng.random())];
            let y = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let inc: Vec<f64> = (0..8).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut out = [0.0; 8];
            bp_fn_update(y, 0.3, &edges(&h), &inc, None, &q, &mut out, &mut OpCounts::default()).unwrap();
            for k in 0..2 {
                let mut expect = [f64::NEG_INFINITY; 4];
                for a in 0..4 {
                    for b in 0..4 {
                        let s = y - h[0] * q.point(a) - h[1] * q.point(b);
                        let own = if k == 0 { a } else { b };
                        let other = if k == 0 { inc[4 + b] } else { inc[a] };
                        expect[own] = expect[own].max(-s.norm_sqr() / 0.3 + other);
                    }
                }
                let mx = expect.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for a in 0..4 {
                    assert!((out[k * 4 + a] - (expect[a] - mx)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bp_symmetric_under_negation() {
        let q = Constellation::qpsk();
        let h = [c(0.5, 0.2), c(-0.1, 0.9)];
        let mut out = [0.0; 8];
        bp_fn_update(c(0.0, 0.0), 0.5, &edges(&h), &[0.0; 8], None, &q, &mut out, &mut OpCounts::default()).unwrap();
        // index 3 - a is the negated point
        for k in 0..2 {
            for a in 0..4 {
                assert!((out[k * 4 + a] - out[k * 4 + 3 - a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bp_cap() {
        let q = Constellation::qpsk();
        let h = vec![c(1.0, 0.0); 9];
        let mut out = vec![0.0; 36];
        let r = bp_fn_update(c(0.0, 0.0), 1.0, &edges(&h), &[0.0; 36], None, &q, &mut out, &mut OpCounts::default());
        assert!(matches!(r, Err(Error::DegreeCapExceeded { degree: 9, cap: 8 })));
    }

    #[test]
    fn product_llrs_match_direct_sum() {
        let q = Constellation::qpsk();
        let inc = [GaussianMessage::new(c(0.2, 0.1), 0.4), GaussianMessage::new(c(-0.5, 0.9), 1.5)];
        let (p, s) = gaussian_product(&inc, &mut OpCounts::default());
        let mut fast = [0.0; 4];
        product_symbol_llrs(p, s, &q, &mut fast, &mut OpCounts::default());
        let direct: Vec<f64> =
            (0..4).map(|a| inc.iter().map(|m| -(q.point(a) - m.mean).norm_sqr() / m.var).sum()).collect();
        for a in 1..4 {
            assert!(((fast[a] - fast[0]) - (direct[a] - direct[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn bit_moment_values() {
        let mut o = OpCounts::default();
        assert_eq!(bit_moments(0.0, &mut o), (-0.0, 1.0));
        let (m, v) = bit_moments(30.0, &mut o);
        assert!((m + 1.0).abs() < 1e-12 && v == VAR_MIN);
        let (m, v) = bit_moments(1.0, &mut o);
        // two-point pmf: P(u=-1) = e/(1+e)
        let pm = 1f64.exp() / (1.0 + 1f64.exp());
        let mean = -pm + (1.0 - pm);
        assert!((m - mean).abs() < 1e-12 && (m + 0.4621).abs() < 1e-4);
        assert!((v - (1.0 - mean * mean)).abs() < 1e-12 && (v - 0.7864).abs() < 1e-4);
    }

    #[test]
    fn ejsg_degree_two_real_channel() {
        let h = [c(0.7, 0.0), c(-0.4, 0.0)];
        let n0 = 0.3;
        let y = c(0.35, 0.2);
        for &u2 in &[1.0, -1.0] {
            let inc = [GaussianMessage::initial(), GaussianMessage::real(u2, VAR_MIN)];
            let mut out = [GaussianMessage::initial(); 2];
            let mut l = [0.0; 2];
            ejsg_fn_update(y, n0, &edges(&h), &inc, None, &mut out, &mut l, &mut OpCounts::default());
            let lik = |u1: f64| -(y - h[0] * u1 - h[1] * u2).norm_sqr() / n0;
            assert!((l[0] - (lik(-1.0) - lik(1.0))).abs() < 1e-6);
        }
    }

    #[test]
    fn bvn_check_messages_are_extrinsic_sums() {
        let mut out_cn = [0.0; 3];
        let mut out_fn = [GaussianMessage::initial(); 2];
        let inc = [GaussianMessage::real(0.2, 0.5), GaussianMessage::real(-0.1, 0.9)];
        let b = ejsg_bvn_update(&[0.4, -1.1], &inc, &[0.5, 2.0, -0.3], 0.0, NegativeVariance::Uninformative, 1.0, 1.0, &mut out_cn, &mut out_fn, &mut OpCounts::default());
        assert!((out_cn[0] - (0.7 + 2.0 - 0.3)).abs() < 1e-12);
        assert!((b.llr - (-0.7 - 2.2)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn merged_term_identity(
            seed in any::<u64>(), live in 1usize..6, pruned in 1usize..8,
            mu in -1.0f64..1.0, xi in 0.05f64..2.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = live + pruned;
            let h: Vec<Complex64> = (0..d).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let mut inc: Vec<GaussianMessage> = (0..live).map(|_| GaussianMessage::real(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() + 0.1)).collect();
            inc.extend((0..pruned).map(|_| GaussianMessage::real(mu, xi)));
            let y = c(rng.random(), rng.random());
            let mut full = vec![GaussianMessage::initial(); d];
            let mut lf = vec![0.0; d];
            ejsg_fn_update(y, 0.2, &edges(&h), &inc, None, &mut full, &mut lf, &mut OpCounts::default());
            let merged = MergedTerm {
                sum_coef: h[live..].iter().sum(),
                sum_abs2: h[live..].iter().map(|v| v.norm_sqr()).sum(),
                mean: c(mu, 0.0),
                var: xi,
            };
            let mut part = vec![GaussianMessage::initial(); live];
            let mut lp = vec![0.0; live];
            ejsg_fn_update(y, 0.2, &edges(&h[..live]), &inc[..live], Some(&merged), &mut part, &mut lp, &mut OpCounts::default());
            for k in 0..live {
                prop_assert!((part[k].mean - full[k].mean).norm() < 1e-10);
                prop_assert!((part[k].var - full[k].var).abs() < 1e-10);
                prop_assert!((lp[k] - lf[k]).abs() < 1e-10 * (1.0 + lf[k].abs()));
            }
        }

        #[test]
        fn avn_extrinsic_recombines(seed in any::<u64>(), d in 1usize..6) {
            let q = Constellation::qpsk();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inc: Vec<GaussianMessage> = (0..d).map(|_| GaussianMessage::new(c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5), rng.random::<f64>() * 3.0 + 0.5)).collect();
            let prior: Vec<f64> = (0..4).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut post = [0.0; 4];
            let mut out = vec![GaussianMessage::initial(); d];
            let p = ep_avn_update(&prior, &inc, &q, NegativeVariance::Uninformative, 1.0, &mut post, &mut out, &mut OpCounts::default());
            for k in 0..d {
                if out[k].var >= VAR_MAX {
                    continue;
                }
                let prec = 1.0 / out[k].var + 1.0 / inc[k].var;
                let mean = (out[k].mean / out[k].var + inc[k].mean / inc[k].var) / prec;
                prop_assert!((1.0 / prec - p.var).abs() < 1e-8);
                prop_assert!((mean - p.mean).norm() < 1e-8);
            }
        }
    }
}
