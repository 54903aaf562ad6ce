//! Complete receivers over one frame of received segments.

mod complexity;
mod jsg;
mod latency;
mod mmse;
mod turbo;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::jsg::{Interleaver, MergedPolicy, NegativeVariance};
use crate::ldpc::LdpcCode;
use crate::link::Segment;
use crate::ops::OpCounts;

pub use complexity::{count_ops_formula, FormulaParams};
pub use jsg::{ejsg_receive, jsg_receive};
pub use latency::{latency_model, LatencyParams};
pub use mmse::{mmse_equalize, mmse_ldpc, MmseEstimate};
pub use turbo::turbo_idd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReceiverKind {
    MmseLdpc,
    TurboIddBp,
    TurboIddEp,
    BpJsg,
    EpJsg,
    EJsg,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 6] = [
        ReceiverKind::MmseLdpc,
        ReceiverKind::TurboIddBp,
        ReceiverKind::TurboIddEp,
        ReceiverKind::BpJsg,
        ReceiverKind::EpJsg,
        ReceiverKind::EJsg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::MmseLdpc => "MMSE_LDPC",
            ReceiverKind::TurboIddBp => "TURBO_IDD_BP",
            ReceiverKind::TurboIddEp => "TURBO_IDD_EP",
            ReceiverKind::BpJsg => "BP_JSG",
            ReceiverKind::EpJsg => "EP_JSG",
            ReceiverKind::EJsg => "E_JSG",
        }
    }

    pub fn is_jsg(self) -> bool {
        matches!(self, ReceiverKind::BpJsg | ReceiverKind::EpJsg | ReceiverKind::EJsg)
    }

    /// Whether the transmitter interleaves coded bits before mapping for this receiver.
    pub fn uses_interleaver(self) -> bool {
        self != ReceiverKind::EJsg
    }
}

impl std::str::FromStr for ReceiverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        ReceiverKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::Parse(format!("unknown receiver kind '{s}'")))
    }
}

impl std::fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Receiver selection and iteration budget. `iters` is the joint iteration count for JSG
/// kinds and the decoder iteration count for MMSE-LDPC; Turbo-IDD uses `n_out`, `n_vi`,
/// `n_ldpc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReceiverConfig {
    pub kind: ReceiverKind,
    pub iters: usize,
    pub n_out: usize,
    pub n_vi: usize,
    pub n_ldpc: usize,
    pub esnr_threshold_db: Option<f64>,
    pub damping: f64,
    pub merged: MergedPolicy,
    pub negative_variance: NegativeVariance,
    pub bit_precision_scale: f64,
    pub early_stop: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        ReceiverConfig {
            kind: ReceiverKind::EpJsg,
            iters: 12,
            n_out: 4,
            n_vi: 3,
            n_ldpc: 3,
            esnr_threshold_db: None,
            damping: 0.7,
            merged: MergedPolicy::MomentMatched,
            negative_variance: NegativeVariance::Uninformative,
            bit_precision_scale: 1.0,
            early_stop: true,
        }
    }
}

impl ReceiverConfig {
    pub fn new(kind: ReceiverKind) -> Self {
        ReceiverConfig { kind, ..Default::default() }
    }

    pub fn with_threshold(mut self, th: Option<f64>) -> Self {
        self.esnr_threshold_db = th;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let counts = match self.kind {
            ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => [self.n_out, self.n_vi, self.n_ldpc],
            _ => [self.iters; 3],
        };
        if counts.contains(&0) {
            return Err(Error::InvalidConfig(format!("{} needs iteration counts >= 1", self.kind)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.bit_precision_scale > 0.0) {
            return Err(Error::InvalidConfig("bit_precision_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReceiverOutput {
    /// Decoded payload of all codewords, concatenated.
    pub bits: Vec<u8>,
    /// Hard decisions on all coded bits.
    pub coded_bits: Vec<u8>,
    pub iterations_used: usize,
    pub op_counts: OpCounts,
    pub ops_detector: OpCounts,
    pub ops_decoder: OpCounts,
    pub parity_ok: bool,
}

/// Code and mapping shared by the transmitter and every receiver of a link.
#[derive(Debug, Clone)]
pub struct CodedLink {
    pub code: Arc<LdpcCode>,
    pub constellation: Constellation,
    /// Permutation over all mapped bits of a frame; mapped bit `i` carries coded bit `perm[i]`.
    pub interleaver: Arc<Interleaver>,
}

impl CodedLink {
    pub fn codewords(&self) -> usize {
        self.interleaver.len() / self.code.n()
    }

    /// Maps coded bits to transmitted order for `kind`.
    pub fn mapped_bits(&self, kind: ReceiverKind, coded: &[u8]) -> Result<Vec<u8>> {
        if kind.uses_interleaver() {
            self.interleaver.interleave(coded)
        } else {
            Ok(coded.to_vec())
        }
    }

    fn finish(&self, coded_bits: Vec<u8>) -> (Vec<u8>, bool) {
        let n = self.code.n();
        let mut ok = true;
        let mut bits = Vec::with_capacity(coded_bits.len() / n * self.code.k());
        for cw in coded_bits.chunks(n) {
            ok &= self.code.syndrome_ok(cw);
            bits.extend(self.code.extract_message(cw));
        }
        (bits, ok)
    }
}

/// Runs the receiver selected by `cfg.kind`.
pub fn receive(segments: &[Segment], n0: f64, link: &CodedLink, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    cfg.validate()?;
    receive_unchecked(segments, n0, link, cfg)
}

/// [`receive`] without the iteration-count check, so studies can run zero iterations.
pub fn receive_unchecked(segments: &[Segment], n0: f64, link: &CodedLink, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    match cfg.kind {
        ReceiverKind::MmseLdpc => mmse_ldpc(segments, n0, link, cfg.iters),
        ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => turbo_idd(segments, n0, link, cfg),
        ReceiverKind::BpJsg | ReceiverKind::EpJsg | ReceiverKind::EJsg => jsg_receive(segments, n0, link, cfg),
    }
}
