//! Flooding schedule over a [`JsgGraph`], jointly with any attached LDPC codewords.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graph::{GraphMode, JsgGraph};
use super::llr::{bits_to_symbols, symbols_to_bits};
use super::message::{discrete_moments, GaussianMessage, NegativeVariance};
use super::nodes::{
    bp_fn_update, ejsg_bvn_update, ejsg_fn_update, ep_avn_posterior, ep_fn_update, gaussian_product,
    product_symbol_llrs, MergedTerm,
};
use super::pruning::MergedPolicy;
use crate::error::{Error, Result};
use crate::ldpc::cn_update_counted;
use crate::ldpc::LdpcCode;
use crate::ops::OpCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    /// Max-log discrete messages on symbol nodes.
    Bp,
    /// Gaussian messages on symbol nodes.
    Ep,
    /// Gaussian messages on bit nodes.
    EJsg,
}

impl MessageKind {
    pub fn mode(self) -> GraphMode {
        match self {
            MessageKind::Bp | MessageKind::Ep => GraphMode::Symbol,
            MessageKind::EJsg => GraphMode::Bit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleParams {
    pub kind: MessageKind,
    pub iters: usize,
    pub damping: f64,
    pub merged: MergedPolicy,
    pub negative_variance: NegativeVariance,
    pub bit_precision_scale: f64,
    pub early_stop: bool,
    pub record_hard: bool,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            kind: MessageKind::Ep,
            iters: 20,
            damping: 0.7,
            merged: MergedPolicy::MomentMatched,
            negative_variance: NegativeVariance::Uninformative,
            bit_precision_scale: 1.0,
            early_stop: true,
            record_hard: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScheduleOutput {
    /// `log P(0)/P(1)` posteriors: coded bits (codeword-major) with a code, mapped bits without.
    pub llrs: Vec<f64>,
    /// Likelihood-side extrinsic LLRs of the mapped bits.
    pub extrinsic: Vec<f64>,
    pub iterations: usize,
    pub parity_ok: bool,
    /// Whether every codeword satisfied its checks after each iteration.
    pub parity_trace: Vec<bool>,
    pub hard_trajectory: Vec<Vec<u8>>,
    pub ops_detector: OpCounts,
    pub ops_decoder: OpCounts,
}

impl ScheduleOutput {
    pub fn hard_bits(&self) -> Vec<u8> {
        self.llrs.iter().map(|&l| (l < 0.0) as u8).collect()
    }
}

struct Decoder<'a> {
    code: &'a LdpcCode,
    n: usize,
    el: usize,
    words: usize,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    ext: Vec<f64>,
    a: Vec<f64>,
}

impl Decoder<'_> {
    fn refresh_ext(&mut self, ops: &mut OpCounts) {
        for w in 0..self.words {
            for v in 0..self.n {
                let ve = self.code.var_edges(v);
                self.ext[w * self.n + v] = ve.iter().map(|&e| self.c2v[w * self.el + e]).sum();
                ops.radd(ve.len() as u64);
            }
        }
    }

    fn vn(&mut self, ops: &mut OpCounts) {
        for w in 0..self.words {
            for v in 0..self.n {
                let j = w * self.n + v;
                let total = self.a[j] + self.ext[j];
                for &e in self.code.var_edges(v) {
                    let e = w * self.el + e;
                    self.v2c[e] = total - self.c2v[e];
                }
                ops.radd(1 + self.code.var_edges(v).len() as u64);
            }
        }
    }

    fn cn(&mut self, ops: &mut OpCounts) {
        for w in 0..self.words {
            let base = w * self.el;
            for j in 0..self.code.m() {
                let r = self.code.check_edges(j);
                let r = base + r.start..base + r.end;
                cn_update_counted(&self.v2c[r.clone()], &mut self.c2v[r], ops);
            }
        }
    }

    fn posterior(&self) -> Vec<f64> {
        self.a.iter().zip(&self.ext).map(|(a, e)| a + e).collect()
    }

    fn parity(&self, bits: &[u8]) -> bool {
        bits.chunks(self.n).all(|cw| self.code.syndrome_ok(cw))
    }
}

struct Engine<'a> {
    g: &'a JsgGraph,
    p: &'a ScheduleParams,
    m: usize,
    vi_sym: Vec<f64>,
    vi_u: Vec<f64>,
    vi_bits: Vec<f64>,
    f2v: Vec<GaussianMessage>,
    f2v_llr: Vec<f64>,
    v2f: Vec<GaussianMessage>,
    v2f_llr: Vec<f64>,
    post: Vec<GaussianMessage>,
    prior_sym: Vec<f64>,
    mapped_prior: Vec<f64>,
    det: OpCounts,
    dec_ops: OpCounts,
    dec: Option<Decoder<'a>>,
}

impl<'a> Engine<'a> {
    fn new(g: &'a JsgGraph, p: &'a ScheduleParams) -> Self {
        let m = g.constellation.order();
        let (nv, ne) = (g.n_vars(), g.n_edges());
        let bp = p.kind == MessageKind::Bp;
        let dec = g.ldpc.as_ref().map(|l| {
            let (n, el) = (l.code.n(), l.code.n_edges());
            Decoder {
                code: &l.code,
                n,
                el,
                words: l.codewords,
                v2c: vec![0.0; l.codewords * el],
                c2v: vec![0.0; l.codewords * el],
                ext: vec![0.0; l.codewords * n],
                a: vec![0.0; l.codewords * n],
            }
        });
        Engine {
            g,
            p,
            m,
            vi_sym: vec![0.0; if g.mode == GraphMode::Symbol { nv * m } else { 0 }],
            vi_u: vec![0.0; if g.mode == GraphMode::Bit { nv } else { 0 }],
            vi_bits: vec![0.0; g.n_mapped_bits()],
            f2v: vec![GaussianMessage::initial(); if bp { 0 } else { ne }],
            f2v_llr: vec![0.0; if bp { ne * m } else if p.kind == MessageKind::EJsg { ne } else { 0 }],
            v2f: vec![GaussianMessage::initial(); if bp { 0 } else { ne }],
            v2f_llr: vec![0.0; if bp { ne * m } else { 0 }],
            post: vec![GaussianMessage::initial(); nv],
            prior_sym: vec![0.0; if g.mode == GraphMode::Symbol { nv * m } else { 0 }],
            mapped_prior: g.prior_bits.clone(),
            det: OpCounts::default(),
            dec_ops: OpCounts::default(),
            dec,
        }
    }

    fn gather(&mut self) -> Result<()> {
        let g = self.g;
        let m = self.m;
        match self.p.kind {
            MessageKind::Ep => {
                let mut inc = Vec::new();
                for v in 0..g.n_vars() {
                    inc.clear();
                    inc.extend(g.var_edges(v).iter().map(|&e| self.f2v[e]));
                    let (pp, qq) = gaussian_product(&inc, &mut self.det);
                    product_symbol_llrs(pp, qq, &g.constellation, &mut self.vi_sym[v * m..(v + 1) * m], &mut self.det);
                }
            }
            MessageKind::Bp => {
                for v in 0..g.n_vars() {
                    let acc = &mut self.vi_sym[v * m..(v + 1) * m];
                    acc.iter_mut().for_each(|x| *x = 0.0);
                    for &e in g.var_edges(v) {
                        for (x, l) in acc.iter_mut().zip(&self.f2v_llr[e * m..(e + 1) * m]) {
                            *x += l;
                        }
                    }
                    self.det.radd((g.var_degree(v) * m) as u64);
                }
            }
            MessageKind::EJsg => {
                // the bit-node update performs the same sum; counted there
                for v in 0..g.n_vars() {
                    self.vi_u[v] = g.var_edges(v).iter().map(|&e| self.f2v_llr[e]).sum();
                }
            }
        }
        match g.mode {
            GraphMode::Symbol => symbols_to_bits(&self.vi_sym, &g.constellation, &mut self.vi_bits, &mut self.det)?,
            GraphMode::Bit => {
                for (b, u) in self.vi_bits.iter_mut().zip(&self.vi_u) {
                    *b = -u;
                }
            }
        }
        Ok(())
    }

    fn convert_to_coded(&mut self) -> Result<()> {
        let g = self.g;
        if let Some(d) = self.dec.as_mut() {
            match g.ldpc.as_ref().and_then(|l| l.interleaver.as_ref()) {
                Some(p) => d.a = p.deinterleave(&self.vi_bits)?,
                None => d.a.copy_from_slice(&self.vi_bits),
            }
        }
        Ok(())
    }

    fn convert_to_mapped(&mut self) -> Result<()> {
        let g = self.g;
        if let Some(d) = self.dec.as_ref() {
            match g.ldpc.as_ref().and_then(|l| l.interleaver.as_ref()) {
                Some(p) => self.mapped_prior = p.interleave(&d.ext)?,
                None => self.mapped_prior.copy_from_slice(&d.ext),
            }
        }
        Ok(())
    }

    fn variable_step(&mut self) -> Result<()> {
        let g = self.g;
        let c = &g.constellation;
        let m = self.m;
        let p = self.p;
        match p.kind {
            MessageKind::Ep => {
                let mut post_llr = vec![0.0; m];
                let mut inc = Vec::new();
                let mut out = Vec::new();
                for v in 0..g.n_vars() {
                    let ve = g.var_edges(v);
                    inc.clear();
                    inc.extend(ve.iter().map(|&e| self.f2v[e]));
                    out.clear();
                    out.extend(ve.iter().map(|&e| self.v2f[e]));
                    self.post[v] = ep_avn_posterior(
                        &self.prior_sym[v * m..(v + 1) * m],
                        &self.vi_sym[v * m..(v + 1) * m],
                        &inc,
                        c,
                        p.negative_variance,
                        p.damping,
                        &mut post_llr,
                        &mut out,
                        &mut self.det,
                    );
                    for (&e, o) in ve.iter().zip(&out) {
                        self.v2f[e] = *o;
                    }
                }
            }
            MessageKind::Bp => {
                let merged = g.has_merged();
                let mut total = vec![0.0; m];
                let mut probs = vec![0.0; m];
                for v in 0..g.n_vars() {
                    for a in 0..m {
                        total[a] = self.prior_sym[v * m + a] + self.vi_sym[v * m + a];
                    }
                    for &e in g.var_edges(v) {
                        let o = &mut self.v2f_llr[e * m..(e + 1) * m];
                        let mut mx = f64::NEG_INFINITY;
                        for a in 0..m {
                            o[a] = total[a] - self.f2v_llr[e * m + a];
                            mx = mx.max(o[a]);
                        }
                        o.iter_mut().for_each(|x| *x -= mx);
                    }
                    self.det.radd((m + 2 * m * g.var_degree(v)) as u64);
                    if merged {
                        self.post[v] = discrete_moments(&total, c, &mut probs, &mut self.det);
                    }
                }
            }
            MessageKind::EJsg => {
                let mut fl = Vec::new();
                let mut inc = Vec::new();
                let mut out = Vec::new();
                let mut cn = Vec::new();
                let mut cn_out = Vec::new();
                let mut ids = Vec::new();
                for v in 0..g.n_vars() {
                    let ve = g.var_edges(v);
                    fl.clear();
                    fl.extend(ve.iter().map(|&e| self.f2v_llr[e]));
                    inc.clear();
                    inc.extend(ve.iter().map(|&e| self.f2v[e]));
                    out.clear();
                    out.extend(ve.iter().map(|&e| self.v2f[e]));
                    cn.clear();
                    ids.clear();
                    let prior = match self.dec.as_ref() {
                        Some(d) => {
                            let (w, lv) = (v / d.n, v % d.n);
                            for &e in d.code.var_edges(lv) {
                                ids.push(w * d.el + e);
                                cn.push(d.c2v[w * d.el + e]);
                            }
                            0.0
                        }
                        None => g.prior_bits[v],
                    };
                    cn_out.clear();
                    cn_out.resize(cn.len(), 0.0);
                    let b = ejsg_bvn_update(
                        &fl,
                        &inc,
                        &cn,
                        prior,
                        p.negative_variance,
                        p.damping,
                        p.bit_precision_scale,
                        &mut cn_out,
                        &mut out,
                        &mut self.det,
                    );
                    self.post[v] = GaussianMessage::real(b.mean, b.var);
                    for (&e, o) in ve.iter().zip(&out) {
                        self.v2f[e] = *o;
                    }
                    if let Some(d) = self.dec.as_mut() {
                        for (&e, o) in ids.iter().zip(&cn_out) {
                            d.v2c[e] = *o;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Running sums of posterior means, variances and squared means, so a member set stored
    /// as a complement costs one subtraction per range and per excluded variable.
    fn posterior_prefix(&self, ops: &mut OpCounts) -> Vec<(Complex64, f64, f64)> {
        let mut acc = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        let mut out = Vec::with_capacity(self.post.len() + 1);
        out.push(acc);
        for q in &self.post {
            acc.0 += q.mean;
            acc.1 += q.var;
            acc.2 += q.mean.norm_sqr();
            out.push(acc);
        }
        let n = self.post.len() as u64;
        ops.cadd(n);
        ops.radd(n);
        if self.p.merged == MergedPolicy::MomentMatched {
            ops.abs2(n);
            ops.radd(n);
        }
        out
    }

    fn merged_term(&self, f: usize, prefix: &[(Complex64, f64, f64)], ops: &mut OpCounts) -> Option<MergedTerm> {
        let members = self.g.merged_members(f);
        if members.is_empty() {
            return None;
        }
        let (sum_coef, sum_abs2) = self.g.merged_sums(f);
        let moment = self.p.merged == MergedPolicy::MomentMatched;
        let (mean, var) = match self.p.merged {
            MergedPolicy::FixedPrior => (Complex64::new(0.0, 0.0), 1.0),
            _ => {
                let k = members.len() as f64;
                let mut mu = Complex64::new(0.0, 0.0);
                let mut xi = 0.0;
                let mut e2 = 0.0;
                let terms = match self.g.merged_complement(f) {
                    Some((ranges, excluded)) => {
                        for &(a, b) in ranges {
                            mu += prefix[b].0 - prefix[a].0;
                            xi += prefix[b].1 - prefix[a].1;
                            e2 += prefix[b].2 - prefix[a].2;
                        }
                        for &v in excluded {
                            mu -= self.post[v].mean;
                            xi -= self.post[v].var;
                            e2 -= self.post[v].mean.norm_sqr();
                        }
                        let t = excluded.len() as u64;
                        if moment {
                            ops.abs2(t);
                        }
                        2 * ranges.len() as u64 + t
                    }
                    None => {
                        for &v in members {
                            mu += self.post[v].mean;
                            xi += self.post[v].var;
                            e2 += self.post[v].mean.norm_sqr();
                        }
                        if moment {
                            ops.abs2(members.len() as u64);
                        }
                        members.len() as u64
                    }
                };
                ops.cadd(terms);
                ops.radd(if moment { 2 * terms } else { terms });
                mu /= k;
                xi /= k;
                ops.crmul(1);
                ops.rmul(1);
                if moment {
                    xi += (e2 / k - mu.norm_sqr()).max(0.0);
                    ops.rmul(1);
                    ops.abs2(1);
                    ops.radd(2);
                }
                (mu, xi)
            }
        };
        Some(MergedTerm { sum_coef, sum_abs2, mean, var })
    }

    fn factor_step(&mut self) -> Result<()> {
        let g = self.g;
        let m = self.m;
        let mut merged_ops = OpCounts::default();
        let prefix = if g.has_complement() && self.p.merged != MergedPolicy::FixedPrior {
            self.posterior_prefix(&mut merged_ops)
        } else {
            Vec::new()
        };
        for f in 0..g.n_fns() {
            let merged = self.merged_term(f, &prefix, &mut merged_ops);
            let r = g.fn_edges(f);
            let edges = g.edge_slice(f);
            match self.p.kind {
                MessageKind::Ep => ep_fn_update(
                    g.y(f),
                    g.n0,
                    edges,
                    &self.v2f[r.clone()],
                    merged.as_ref(),
                    &mut self.f2v[r],
                    &mut self.det,
                ),
                MessageKind::EJsg => ejsg_fn_update(
                    g.y(f),
                    g.n0,
                    edges,
                    &self.v2f[r.clone()],
                    merged.as_ref(),
                    &mut self.f2v[r.clone()],
                    &mut self.f2v_llr[r],
                    &mut self.det,
                ),
                MessageKind::Bp => bp_fn_update(
                    g.y(f),
                    g.n0,
                    edges,
                    &self.v2f_llr[r.start * m..r.end * m],
                    merged.as_ref(),
                    &g.constellation,
                    &mut self.f2v_llr[r.start * m..r.end * m],
                    &mut self.det,
                )?,
            }
        }
        self.det += merged_ops;
        Ok(())
    }

    fn symbol_priors(&mut self) -> Result<()> {
        if self.g.mode == GraphMode::Symbol {
            bits_to_symbols(&self.mapped_prior, &self.g.constellation, &mut self.prior_sym, &mut self.det)?;
        }
        Ok(())
    }
}

/// Runs up to `params.iters` flooding iterations. Each iteration updates variable nodes
/// (and the code's bit nodes), then check nodes and likelihood nodes, then forms posteriors.
pub fn run_schedule(g: &JsgGraph, params: &ScheduleParams) -> Result<ScheduleOutput> {
    if params.kind.mode() != g.mode {
        return Err(Error::InvalidConfig(format!("{:?} messages need a {:?}-node graph", params.kind, params.kind.mode())));
    }
    if !(params.damping > 0.0 && params.damping <= 1.0) {
        return Err(Error::InvalidConfig(format!("damping must lie in (0, 1], got {}", params.damping)));
    }
    if params.kind == MessageKind::Bp && g.max_fn_degree() > super::nodes::BP_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { degree: g.max_fn_degree(), cap: super::nodes::BP_DEGREE_CAP });
    }
    let mut out = ScheduleOutput::default();
    let coded_len = g.ldpc.as_ref().map(|l| l.codewords * l.code.n());
    if params.iters == 0 {
        out.llrs = match coded_len {
            Some(n) => vec![0.0; n],
            None => g.prior_bits.clone(),
        };
        out.extrinsic = vec![0.0; g.n_mapped_bits()];
        return Ok(out);
    }
    let mut e = Engine::new(g, params);
    let coded = e.dec.is_some();
    if !coded {
        e.symbol_priors()?;
    }
    e.gather()?;
    e.convert_to_coded()?;
    for _ in 0..params.iters {
        out.iterations += 1;
        if coded {
            e.convert_to_mapped()?;
            e.symbol_priors()?;
            if params.kind != MessageKind::EJsg {
                let d = e.dec.as_mut().expect("decoder");
                d.vn(&mut e.dec_ops);
            }
        }
        e.variable_step()?;
        if let Some(d) = e.dec.as_mut() {
            d.cn(&mut e.dec_ops);
        }
        e.factor_step()?;
        e.gather()?;
        if coded {
            e.convert_to_coded()?;
            let d = e.dec.as_mut().expect("decoder");
            d.refresh_ext(&mut e.dec_ops);
            let post = d.posterior();
            let bits: Vec<u8> = post.iter().map(|&l| (l < 0.0) as u8).collect();
            let ok = d.parity(&bits);
            out.parity_trace.push(ok);
            out.parity_ok = ok;
            if params.record_hard {
                out.hard_trajectory.push(bits);
            }
            out.llrs = post;
            if ok && params.early_stop {
                break;
            }
        }
    }
    if !coded {
        out.llrs = match g.mode {
            GraphMode::Symbol => {
                let total: Vec<f64> = e.prior_sym.iter().zip(&e.vi_sym).map(|(a, b)| a + b).collect();
                let mut post = vec![0.0; g.n_mapped_bits()];
                symbols_to_bits(&total, &g.constellation, &mut post, &mut e.det)?;
                post
            }
            GraphMode::Bit => g.prior_bits.iter().zip(&e.vi_bits).map(|(a, b)| a + b).collect(),
        };
        out.extrinsic = out.llrs.iter().zip(&g.prior_bits).map(|(l, p)| l - p).collect();
        if params.record_hard {
            out.hard_trajectory.push(out.hard_bits());
        }
    } else {
        out.extrinsic = e.vi_bits.clone();
    }
    out.ops_detector = e.det;
    out.ops_decoder = e.dec_ops;
    Ok(out)
}
