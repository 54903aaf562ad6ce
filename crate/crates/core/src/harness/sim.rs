//! Frame generation and Monte Carlo accumulation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ChannelSection, SimConfig};
use crate::afdm::AfdmConfig;
use crate::channel::sample_channel;
use crate::error::{Error, Result};
use crate::jsg::Interleaver;
use crate::ldpc::LdpcCode;
use crate::link::{transmit, FrameLayout, LinkParams, Segment};
use crate::ops::{OpCounts, OpCountsF};
use crate::receivers::{self, CodedLink, ReceiverConfig, ReceiverKind, ReceiverOutput};

/// Worker-pool settings.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Thread count; `None` uses `AFDM_JSG_WORKERS` or all cores.
    pub workers: Option<usize>,
}

impl RunOptions {
    pub fn pool(&self) -> Result<rayon::ThreadPool> {
        let w = self
            .workers
            .or_else(|| std::env::var("AFDM_JSG_WORKERS").ok().and_then(|v| v.parse().ok()))
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
    }
}

/// Fixed parts of a simulated link: waveform, code, interleaver and frame layout.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub cfg: SimConfig,
    pub link: LinkParams,
    pub coded: CodedLink,
    pub layout: FrameLayout,
}

/// One transmitted frame. `interleaved` feeds receivers that interleave, `direct` the
/// bit-level receiver; both see the same payload, channel and noise samples.
#[derive(Debug, Clone)]
pub struct Frame {
    pub payload: Vec<u8>,
    pub coded: Vec<u8>,
    pub n0: f64,
    pub interleaved: Vec<Segment>,
    pub direct: Vec<Segment>,
}

impl Frame {
    pub fn segments(&self, kind: ReceiverKind) -> &[Segment] {
        if kind.uses_interleaver() {
            &self.interleaved
        } else {
            &self.direct
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameResult {
    pub bit_errors: usize,
    pub bits: usize,
    pub iterations: usize,
    pub parity_ok: bool,
    pub ops: OpCounts,
    pub ops_detector: OpCounts,
}

/// Running error and work totals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub frames: usize,
    pub frame_errors: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub iterations: usize,
    pub ops: OpCounts,
    pub ops_detector: OpCounts,
}

impl Tally {
    pub fn add(&mut self, r: &FrameResult) {
        self.frames += 1;
        self.frame_errors += (r.bit_errors > 0) as usize;
        self.bit_errors += r.bit_errors;
        self.bits += r.bits;
        self.iterations += r.iterations;
        self.ops += r.ops;
        self.ops_detector += r.ops_detector;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.frame_errors as f64 / self.frames as f64
        }
    }

    pub fn avg_iterations(&self) -> f64 {
        self.iterations as f64 / self.frames.max(1) as f64
    }

    pub fn ops_per_frame(&self) -> OpCountsF {
        self.ops.scaled(1.0 / self.frames.max(1) as f64)
    }

    pub fn detector_ops_per_frame(&self) -> OpCountsF {
        self.ops_detector.scaled(1.0 / self.frames.max(1) as f64)
    }
}

/// One row of a BER curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub receiver: ReceiverKind,
    pub ebn0_db: f64,
    pub n0: f64,
    pub ber: f64,
    pub fer: f64,
    pub frames: usize,
    pub frame_errors: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub avg_iterations: f64,
    /// Mean operations per frame, detector and decoder together.
    pub op_counts: OpCountsF,
    pub detector_op_counts: OpCountsF,
}

impl BerPoint {
    pub fn from_tally(receiver: ReceiverKind, ebn0_db: f64, n0: f64, t: &Tally) -> Self {
        BerPoint {
            receiver,
            ebn0_db,
            n0,
            ber: t.ber(),
            fer: t.fer(),
            frames: t.frames,
            frame_errors: t.frame_errors,
            bit_errors: t.bit_errors,
            bits: t.bits,
            avg_iterations: t.avg_iterations(),
            op_counts: t.ops_per_frame(),
            detector_op_counts: t.detector_ops_per_frame(),
        }
    }

    /// Binomial standard deviation of the BER estimate.
    pub fn sigma(&self) -> f64 {
        binomial_sigma(self.ber, self.bits)
    }
}

pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    // floor keeps the spread positive when no errors were seen
    let p = p.max(1.0 / n as f64);
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `(b - a) / sqrt(sigma_a^2 + sigma_b^2)`.
pub fn separation_sigmas(a: &BerPoint, b: &BerPoint) -> f64 {
    (b.ber - a.ber) / (a.sigma().powi(2) + b.sigma().powi(2)).sqrt()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream per `(seed, point, frame)`.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed));
    rng.set_stream(point);
    rng.set_word_pos((frame as u128) << 40);
    rng
}

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let afdm = cfg.afdm_config()?;
        let link = LinkParams {
            afdm,
            n_t: cfg.mimo.n_t,
            n_r: cfg.mimo.n_r,
            scenario: cfg.mimo.scenario,
            constellation: cfg.modulation.constellation(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(cfg.seed ^ 0xC0DE));
        let code = LdpcCode::build(cfg.code.n_bits, cfg.code.rate, &cfg.code.lambda, &cfg.code.rho, &mut rng)?;
        let layout = FrameLayout::new(link.bits_per_block(), code.n());
        let interleaver = Interleaver::random(layout.total_bits(), splitmix(cfg.seed ^ 0x1EAF));
        let coded = CodedLink { code: Arc::new(code), constellation: link.constellation.clone(), interleaver: Arc::new(interleaver) };
        Ok(Simulator { cfg: cfg.clone(), link, coded, layout })
    }

    /// Same code and interleaver on a different waveform.
    pub fn with_waveform(&self, afdm: AfdmConfig) -> Self {
        let mut s = self.clone();
        s.link.afdm = afdm;
        s.cfg.afdm.n_cpp = afdm.n_cpp;
        s
    }

    /// `N0 = 1 / (R log2 M 10^{Eb/N0 / 10})` for unit-energy symbols.
    pub fn n0(&self, ebn0_db: f64) -> f64 {
        let rate = self.coded.code.k() as f64 / self.coded.code.n() as f64;
        1.0 / (rate * self.link.constellation.bits_per_symbol() as f64 * 10f64.powf(ebn0_db / 10.0))
    }

    pub fn payload_bits(&self) -> usize {
        self.layout.codewords * self.coded.code.k()
    }

    pub fn draw_frame(&self, point: u64, index: u64, n0: f64, channel: &ChannelSection) -> Result<Frame> {
        let mut rng = frame_rng(self.cfg.seed, point, index);
        let payload: Vec<u8> = (0..self.payload_bits()).map(|_| rng.random::<bool>() as u8).collect();
        let mut coded = Vec::with_capacity(self.layout.total_bits());
        for msg in payload.chunks(self.coded.code.k()) {
            coded.extend(self.coded.code.encode(msg)?);
        }
        let ch = sample_channel(
            self.link.n_r,
            self.link.n_t,
            channel.paths,
            channel.nu_max,
            channel.delay_max,
            self.link.afdm.n_cpp,
            channel.profile,
            &mut rng,
        )?;
        let mapped = self.coded.interleaver.interleave(&coded)?;
        let interleaved = transmit(&self.link, &ch, &mapped, n0, &mut rng.clone())?;
        let direct = transmit(&self.link, &ch, &coded, n0, &mut rng)?;
        Ok(Frame { payload, coded, n0, interleaved, direct })
    }

    pub fn decode(&self, frame: &Frame, rc: &ReceiverConfig) -> Result<(FrameResult, ReceiverOutput)> {
        let out = receivers::receive_unchecked(frame.segments(rc.kind), frame.n0, &self.coded, rc)?;
        let bit_errors = out.bits.iter().zip(&frame.payload).filter(|(a, b)| a != b).count();
        Ok((
            FrameResult {
                bit_errors,
                bits: frame.payload.len(),
                iterations: out.iterations_used,
                parity_ok: out.parity_ok,
                ops: out.op_counts,
                ops_detector: out.ops_detector,
            },
            out,
        ))
    }

    /// Simulates frames `start..end` at one point for every receiver.
    pub fn run_frames(
        &self,
        point: u64,
        range: std::ops::Range<u64>,
        n0: f64,
        channel: &ChannelSection,
        receivers: &[ReceiverConfig],
    ) -> Result<Vec<Vec<FrameResult>>> {
        range
            .into_par_iter()
            .map(|i| {
                let f = self.draw_frame(point, i, n0, channel)?;
                receivers.iter().map(|rc| self.decode(&f, rc).map(|r| r.0)).collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    /// Frames in fixed-size batches until each receiver has `max_errors` bit errors or
    /// `max_frames` frames; a receiver stops at the first batch boundary past its target.
    pub fn run_point(&self, point: u64, n0: f64, channel: &ChannelSection, receivers: &[ReceiverConfig]) -> Result<Vec<Tally>> {
        let f = self.cfg.frames;
        let mut tallies = vec![Tally::default(); receivers.len()];
        let mut active: Vec<usize> = (0..receivers.len()).collect();
        let mut next = 0u64;
        while !active.is_empty() && (next as usize) < f.max_frames {
            let end = (next + f.batch as u64).min(f.max_frames as u64);
            let rcs: Vec<ReceiverConfig> = active.iter().map(|&k| receivers[k].clone()).collect();
            for frame in self.run_frames(point, next..end, n0, channel, &rcs)? {
                for (slot, r) in active.iter().zip(&frame) {
                    tallies[*slot].add(r);
                }
            }
            next = end;
            active.retain(|&k| tallies[k].bit_errors < f.max_errors);
        }
        Ok(tallies)
    }
}
