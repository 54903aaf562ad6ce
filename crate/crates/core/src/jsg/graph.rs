use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::llr::Interleaver;
use super::pruning::{prune_esnr, EsnrPruning};
use crate::channel::complex_parts;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::ldpc::LdpcCode;
use crate::link::Segment;

/// Variable nodes carry whole symbols or the individual ±1 bits of the linear encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    Symbol,
    Bit,
}

/// Per-edge coefficient with the quantities the updates reuse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnEdge {
    pub coef: Complex64,
    pub inv: Complex64,
    pub abs2: f64,
    pub inv_abs2: f64,
}

impl FnEdge {
    pub fn new(coef: Complex64) -> Self {
        let abs2 = coef.norm_sqr();
        FnEdge { coef, inv: coef.conj() / abs2, abs2, inv_abs2: 1.0 / abs2 }
    }
}

#[derive(Debug, Clone)]
pub struct LdpcAttachment {
    pub code: Arc<LdpcCode>,
    pub codewords: usize,
    /// Mapped position `i` carries coded bit `perm[i]`; `None` means the identity.
    pub interleaver: Option<Arc<Interleaver>>,
}

/// Block ranges and excluded members of a complement-stored merged set.
pub type Complement<'a> = (&'a [(usize, usize)], &'a [usize]);

/// Factor graph of likelihood nodes over symbol or bit variables, optionally joined to the
/// Tanner graph of one or more LDPC codewords.
#[derive(Debug, Clone)]
pub struct JsgGraph {
    pub mode: GraphMode,
    pub constellation: Constellation,
    pub n0: f64,
    n_vars: usize,
    y: Vec<Complex64>,
    fn_start: Vec<usize>,
    edges: Vec<FnEdge>,
    edge_var: Vec<usize>,
    var_start: Vec<usize>,
    var_edge_list: Vec<usize>,
    ds_start: Vec<usize>,
    ds_var: Vec<usize>,
    ds_sum_coef: Vec<Complex64>,
    ds_sum_abs2: Vec<f64>,
    /// Per node: variable ranges and excluded variables whose difference is the member set,
    /// used when that is cheaper than listing the members.
    ds_complement: Vec<bool>,
    ds_rstart: Vec<usize>,
    ds_estart: Vec<usize>,
    ds_ranges: Vec<(usize, usize)>,
    ds_excluded: Vec<usize>,
    pub pruning: Vec<EsnrPruning>,
    pub ldpc: Option<LdpcAttachment>,
    /// Mapped-bit prior LLRs used when no code is attached.
    pub prior_bits: Vec<f64>,
}

impl JsgGraph {
    /// Builds the variable/likelihood graph for consecutive segments. With a threshold the
    /// shifts below it become a single merged contribution per likelihood node.
    pub fn build(
        segments: &[Segment],
        constellation: &Constellation,
        mode: GraphMode,
        n0: f64,
        threshold_db: Option<f64>,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::DimensionMismatch("no segments".into()));
        }
        if !(n0 > 0.0) {
            return Err(Error::InvalidConfig(format!("noise variance must be positive, got {n0}")));
        }
        let q = constellation.bits_per_symbol();
        let gen = constellation.generator().to_vec();
        let pruning: Vec<EsnrPruning> = match threshold_db {
            Some(th) => segments.iter().map(|s| prune_esnr(&s.h, n0, th)).collect(),
            None => Vec::new(),
        };
        let mut g = JsgGraph {
            mode,
            constellation: constellation.clone(),
            n0,
            n_vars: 0,
            y: Vec::new(),
            fn_start: vec![0],
            edges: Vec::new(),
            edge_var: Vec::new(),
            var_start: Vec::new(),
            var_edge_list: Vec::new(),
            ds_start: vec![0],
            ds_var: Vec::new(),
            ds_sum_coef: Vec::new(),
            ds_sum_abs2: Vec::new(),
            ds_complement: Vec::new(),
            ds_rstart: vec![0],
            ds_estart: vec![0],
            ds_ranges: Vec::new(),
            ds_excluded: Vec::new(),
            pruning,
            ldpc: None,
            prior_bits: Vec::new(),
        };
        let vq = match mode {
            GraphMode::Symbol => 1,
            GraphMode::Bit => q,
        };
        let mut is_member: Vec<bool> = Vec::new();
        let mut sym_off = 0;
        for (si, seg) in segments.iter().enumerate() {
            let h = &seg.h;
            let n = h.n;
            let mut touched = vec![false; h.cols() / n];
            for row in 0..h.rows() {
                touched.iter_mut().for_each(|b| *b = false);
                let ds_first = g.ds_var.len();
                g.y.push(seg.y[row]);
                let (r, nr) = (row / n, row % n);
                let mut sc = Complex64::new(0.0, 0.0);
                let mut sa = 0.0;
                for (col, v) in h.row_entries(row) {
                    let (t, m) = (col / n, col % n);
                    let shift = (m + n - nr) % n;
                    let live = g.pruning.get(si).is_none_or(|p| p.is_kept(r, t, shift));
                    let sym = sym_off + col;
                    let items: Vec<(usize, Complex64)> = match mode {
                        GraphMode::Symbol => vec![(sym, v)],
                        GraphMode::Bit => (0..q).map(|b| (sym * q + b, v * gen[b])).collect(),
                    };
                    for (var, coef) in items {
                        if live {
                            g.edges.push(FnEdge::new(coef));
                            g.edge_var.push(var);
                        } else {
                            touched[t] = true;
                            g.ds_var.push(var);
                            sc += coef;
                            sa += coef.norm_sqr();
                        }
                    }
                }
                g.fn_start.push(g.edges.len());
                g.ds_start.push(g.ds_var.len());
                let members = g.ds_var.len() - ds_first;
                let blocks: Vec<usize> = (0..touched.len()).filter(|&t| touched[t]).collect();
                let span = blocks.len() * n * vq;
                // complement cost: one range lookup per block plus the excluded variables
                if members > 0 && blocks.len() + (span - members) < members {
                    let lo = |t: usize| (sym_off + t * n) * vq;
                    let top = lo(blocks[blocks.len() - 1] + 1);
                    if is_member.len() < top {
                        is_member.resize(top, false);
                    }
                    for &v in &g.ds_var[ds_first..] {
                        is_member[v] = true;
                    }
                    for &t in &blocks {
                        let (a, b) = (lo(t), lo(t + 1));
                        g.ds_ranges.push((a, b));
                        g.ds_excluded.extend((a..b).filter(|&v| !is_member[v]));
                    }
                    for &v in &g.ds_var[ds_first..] {
                        is_member[v] = false;
                    }
                }
                g.ds_complement.push(g.ds_ranges.len() > *g.ds_rstart.last().expect("seeded"));
                g.ds_rstart.push(g.ds_ranges.len());
                g.ds_estart.push(g.ds_excluded.len());
                g.ds_sum_coef.push(sc);
                g.ds_sum_abs2.push(sa);
            }
            sym_off += h.cols();
        }
        g.n_vars = match mode {
            GraphMode::Symbol => sym_off,
            GraphMode::Bit => sym_off * q,
        };
        let mut counts = vec![0usize; g.n_vars + 1];
        for &v in &g.edge_var {
            counts[v + 1] += 1;
        }
        for i in 0..g.n_vars {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        g.var_edge_list = vec![0; g.edges.len()];
        for (e, &v) in g.edge_var.iter().enumerate() {
            g.var_edge_list[fill[v]] = e;
            fill[v] += 1;
        }
        g.var_start = counts;
        g.prior_bits = vec![0.0; g.n_mapped_bits()];
        Ok(g)
    }

    /// Joins `codewords` copies of `code`. Mapped bits must number exactly `codewords * n`.
    pub fn with_ldpc(mut self, code: Arc<LdpcCode>, interleaver: Option<Arc<Interleaver>>) -> Result<Self> {
        let bits = self.n_mapped_bits();
        if !bits.is_multiple_of(code.n()) {
            return Err(Error::DimensionMismatch(format!(
                "{bits} mapped bits is not a multiple of the code length {}",
                code.n()
            )));
        }
        if let Some(p) = &interleaver {
            if p.len() != bits {
                return Err(Error::DimensionMismatch("interleaver length differs from mapped bits".into()));
            }
        }
        self.ldpc = Some(LdpcAttachment { codewords: bits / code.n(), code, interleaver });
        Ok(self)
    }

    pub fn with_prior_bits(mut self, prior: Vec<f64>) -> Result<Self> {
        crate::error::check_len(self.n_mapped_bits(), prior.len())?;
        self.prior_bits = prior;
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_fns(&self) -> usize {
        self.y.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_mapped_bits(&self) -> usize {
        match self.mode {
            GraphMode::Symbol => self.n_vars * self.constellation.bits_per_symbol(),
            GraphMode::Bit => self.n_vars,
        }
    }

    pub fn y(&self, f: usize) -> Complex64 {
        self.y[f]
    }

    pub fn fn_edges(&self, f: usize) -> std::ops::Range<usize> {
        self.fn_start[f]..self.fn_start[f + 1]
    }

    pub fn fn_degree(&self, f: usize) -> usize {
        self.fn_start[f + 1] - self.fn_start[f]
    }

    pub fn max_fn_degree(&self) -> usize {
        (0..self.n_fns()).map(|f| self.fn_degree(f)).max().unwrap_or(0)
    }

    pub fn edge(&self, e: usize) -> &FnEdge {
        &self.edges[e]
    }

    pub fn edge_slice(&self, f: usize) -> &[FnEdge] {
        &self.edges[self.fn_edges(f)]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    /// Edge ids incident to variable `v`.
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edge_list[self.var_start[v]..self.var_start[v + 1]]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_start[v + 1] - self.var_start[v]
    }

    /// Neighbouring likelihood nodes of `v`, the transpose adjacency.
    pub fn var_fns(&self, v: usize) -> Vec<usize> {
        self.var_edges(v).iter().map(|&e| self.fn_of_edge(e)).collect()
    }

    pub fn fn_of_edge(&self, e: usize) -> usize {
        self.fn_start.partition_point(|&s| s <= e) - 1
    }

    /// Pruned member variables of likelihood node `f`.
    pub fn merged_members(&self, f: usize) -> &[usize] {
        &self.ds_var[self.ds_start[f]..self.ds_start[f + 1]]
    }

    /// Member set of node `f` as `(ranges, excluded)` when it is stored as a complement.
    pub fn merged_complement(&self, f: usize) -> Option<Complement<'_>> {
        if !self.ds_complement[f] {
            return None;
        }
        Some((
            &self.ds_ranges[self.ds_rstart[f]..self.ds_rstart[f + 1]],
            &self.ds_excluded[self.ds_estart[f]..self.ds_estart[f + 1]],
        ))
    }

    /// `(sum of pruned coefficients, sum of their squared magnitudes)`.
    pub fn merged_sums(&self, f: usize) -> (Complex64, f64) {
        (self.ds_sum_coef[f], self.ds_sum_abs2[f])
    }

    pub fn has_complement(&self) -> bool {
        !self.ds_ranges.is_empty()
    }

    pub fn has_merged(&self) -> bool {
        !self.ds_var.is_empty()
    }

    pub fn average_fn_degree(&self) -> f64 {
        self.n_edges() as f64 / self.n_fns() as f64
    }

    pub fn average_var_degree(&self) -> f64 {
        self.n_edges() as f64 / self.n_vars as f64
    }

    /// Coded-bit index carried by mapped bit `i`.
    #[inline]
    pub fn coded_index(&self, i: usize) -> usize {
        match self.ldpc.as_ref().and_then(|l| l.interleaver.as_ref()) {
            Some(p) => p.perm()[i],
            None => i,
        }
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump {
            mode: self.mode,
            n_vars: self.n_vars,
            n0: self.n0,
            factors: (0..self.n_fns())
                .map(|f| FactorDump {
                    id: f,
                    y: self.y[f],
                    edges: self
                        .fn_edges(f)
                        .map(|e| EdgeDump { var: self.edge_var[e], coef: self.edges[e].coef })
                        .collect(),
                    merged: self.merged_members(f).to_vec(),
                })
                .collect(),
            checks: self.ldpc.as_ref().map(|l| l.code.checks().to_vec()).unwrap_or_default(),
        }
    }

    pub fn dump_json(&self) -> String {
        serde_json::to_string_pretty(&self.dump()).expect("graph dump serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDump {
    pub var: usize,
    #[serde(with = "complex_parts")]
    pub coef: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDump {
    pub id: usize,
    #[serde(with = "complex_parts")]
    pub y: Complex64,
    pub edges: Vec<EdgeDump>,
    pub merged: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub mode: GraphMode,
    pub n_vars: usize,
    pub n0: f64,
    pub factors: Vec<FactorDump>,
    pub checks: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afdm::AfdmConfig;
    use crate::channel::{build_effective, Band, ChannelRealization, PathSpec};

    fn seg(paths: Vec<PathSpec>, n: usize, band: Band) -> Segment {
        let cfg = AfdmConfig::with_default_chirps(n, 4).unwrap();
        let h = build_effective(&ChannelRealization::siso(paths), &cfg, band).unwrap();
        let y = vec![Complex64::new(0.0, 0.0); h.rows()];
        Segment::new(h, y).unwrap()
    }

    #[test]
    fn single_integer_path_degrees() {
        let s = seg(vec![PathSpec::new(Complex64::new(1.0, 0.0), 1, 1.0)], 16, Band::Full);
        let g = JsgGraph::build(std::slice::from_ref(&s), &Constellation::qpsk(), GraphMode::Symbol, 0.1, None).unwrap();
        assert!((0..16).all(|f| g.fn_degree(f) == 1));
        assert!((0..16).all(|v| g.var_degree(v) == 1));
        let b = JsgGraph::build(&[s], &Constellation::qpsk(), GraphMode::Bit, 0.1, None).unwrap();
        assert_eq!(b.n_vars(), 32);
        assert!((0..16).all(|f| b.fn_degree(f) == 2));
        let h = Complex64::new(1.0, 0.0) * 0.5f64.sqrt();
        let e0 = b.edge(b.fn_edges(0).start).coef;
        let e1 = b.edge(b.fn_edges(0).start + 1).coef;
        let base = g.edge(g.fn_edges(0).start).coef;
        assert!((e0 - base * h).norm() < 1e-12);
        assert!((e1 - base * Complex64::new(0.0, -1.0) * h).norm() < 1e-12);
    }

    #[test]
    fn complement_encodes_member_set() {
        let paths = vec![PathSpec::new(Complex64::new(1.0, 0.0), 0, 0.3), PathSpec::new(Complex64::new(0.4, 0.1), 3, -1.4)];
        for mode in [GraphMode::Symbol, GraphMode::Bit] {
            let s = seg(paths.clone(), 16, Band::Full);
            let g = JsgGraph::build(&[s.clone(), s], &Constellation::qpsk(), mode, 0.1, Some(-3.0)).unwrap();
            assert!(g.has_complement());
            for f in 0..g.n_fns() {
                let mut direct = g.merged_members(f).to_vec();
                direct.sort_unstable();
                if let Some((ranges, excluded)) = g.merged_complement(f) {
                    let mut rebuilt: Vec<usize> =
                        ranges.iter().flat_map(|&(a, b)| a..b).filter(|v| !excluded.contains(v)).collect();
                    rebuilt.sort_unstable();
                    assert_eq!(rebuilt, direct, "node {f}");
                    assert!(excluded.len() < direct.len());
                }
            }
        }
    }

    #[test]
    fn banded_fractional_path_degree() {
        let s = seg(vec![PathSpec::new(Complex64::new(1.0, 0.0), 0, 0.3)], 16, Band::HalfWidth(2));
        let g = JsgGraph::build(&[s], &Constellation::qpsk(), GraphMode::Symbol, 0.1, None).unwrap();
        assert!((0..16).all(|v| g.var_degree(v) == 5));
        assert!((0..16).all(|f| g.fn_degree(f) == 5));
    }

    #[test]
    fn transpose_adjacency() {
        let s = seg(
            vec![PathSpec::new(Complex64::new(1.0, 0.0), 0, 0.3), PathSpec::new(Complex64::new(0.3, 0.2), 2, -1.2)],
            16,
            Band::HalfWidth(3),
        );
        let g = JsgGraph::build(&[s.clone(), s], &Constellation::qpsk(), GraphMode::Bit, 0.1, None).unwrap();
        for f in 0..g.n_fns() {
            for e in g.fn_edges(f) {
                let v = g.edge_var(e);
                assert!(g.var_fns(v).contains(&f));
            }
        }
        let total: usize = (0..g.n_vars()).map(|v| g.var_degree(v)).sum();
        assert_eq!(total, g.n_edges());
        let js = g.dump_json();
        let back: GraphDump = serde_json::from_str(&js).unwrap();
        assert_eq!(back.factors.len(), 32);
    }
}
