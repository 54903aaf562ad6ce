//! Transmit chain from mapped bits to received DAFT-domain segments.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::afdm::{add_cpp, AfdmConfig, Daft};
use crate::channel::{apply_time_domain, build_effective, Band, ChannelRealization, EffectiveChannel, Scenario};
use crate::constellation::Constellation;
use crate::error::{check_len, Error, Result};

/// `y = H x + w` for one AFDM block (all antennas stacked).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub h: EffectiveChannel,
    pub y: Vec<Complex64>,
}

impl Segment {
    pub fn new(h: EffectiveChannel, y: Vec<Complex64>) -> Result<Self> {
        check_len(h.rows(), y.len())?;
        Ok(Segment { h, y })
    }

    pub fn n_symbols(&self) -> usize {
        self.h.cols()
    }
}

/// Sizes of one frame: `blocks` AFDM blocks carrying `codewords` LDPC codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameLayout {
    pub bits_per_block: usize,
    pub code_len: usize,
    pub blocks: usize,
    pub codewords: usize,
}

impl FrameLayout {
    /// Smallest frame holding a whole number of both blocks and codewords.
    pub fn new(bits_per_block: usize, code_len: usize) -> Self {
        let l = lcm(bits_per_block, code_len);
        FrameLayout { bits_per_block, code_len, blocks: l / bits_per_block, codewords: l / code_len }
    }

    pub fn total_bits(&self) -> usize {
        self.blocks * self.bits_per_block
    }
}

/// Waveform, antenna and mapping parameters shared by transmitter and receivers.
#[derive(Debug, Clone)]
pub struct LinkParams {
    pub afdm: AfdmConfig,
    pub n_t: usize,
    pub n_r: usize,
    pub scenario: Scenario,
    pub constellation: Constellation,
}

impl LinkParams {
    pub fn siso(afdm: AfdmConfig, constellation: Constellation) -> Self {
        LinkParams { afdm, n_t: 1, n_r: 1, scenario: Scenario::Multiplexing, constellation }
    }

    /// Independent symbols per block: `N N_t` when multiplexing, `N` with diversity.
    pub fn symbols_per_block(&self) -> usize {
        match self.scenario {
            Scenario::Multiplexing => self.afdm.n * self.n_t,
            Scenario::Diversity => self.afdm.n,
        }
    }

    pub fn bits_per_block(&self) -> usize {
        self.symbols_per_block() * self.constellation.bits_per_symbol()
    }
}

/// Passes mapped bits block by block through the time-domain channel: IDAFT, prefix,
/// multipath, noise, DAFT of the post-prefix samples. All blocks share `ch`.
pub fn transmit<R: Rng + ?Sized>(
    params: &LinkParams,
    ch: &ChannelRealization,
    mapped_bits: &[u8],
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Segment>> {
    let bpb = params.bits_per_block();
    if !mapped_bits.len().is_multiple_of(bpb) {
        return Err(Error::LengthMismatch { expected: mapped_bits.len().div_ceil(bpb) * bpb, got: mapped_bits.len() });
    }
    if ch.n_t != params.n_t || ch.n_r != params.n_r {
        return Err(Error::DimensionMismatch(format!(
            "channel is {}x{}, link expects {}x{}",
            ch.n_r, ch.n_t, params.n_r, params.n_t
        )));
    }
    let cfg = &params.afdm;
    let n = cfg.n;
    let daft = Daft::new(cfg);
    let h = build_effective(ch, cfg, Band::Full)?.for_scenario(params.scenario)?;
    let mut out = Vec::with_capacity(mapped_bits.len() / bpb);
    for block in mapped_bits.chunks(bpb) {
        let x = params.constellation.map_bits(block)?;
        let tx: Vec<Vec<Complex64>> = (0..params.n_t)
            .map(|t| {
                let xt = match params.scenario {
                    Scenario::Multiplexing => &x[t * n..(t + 1) * n],
                    Scenario::Diversity => &x[..],
                };
                add_cpp(&daft.idaft(xt)?, cfg)
            })
            .collect::<Result<_>>()?;
        let rx = apply_time_domain(&tx, ch, cfg, n0, rng)?;
        let mut y = Vec::with_capacity(n * params.n_r);
        for r in rx {
            y.extend(daft.daft(&r)?);
        }
        out.push(Segment::new(h.clone(), y)?);
    }
    Ok(out)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        assert_eq!(FrameLayout::new(128, 256), FrameLayout { bits_per_block: 128, code_len: 256, blocks: 2, codewords: 1 });
        assert_eq!(FrameLayout::new(256, 256).blocks, 1);
        let l = FrameLayout::new(512, 256);
        assert_eq!((l.blocks, l.codewords), (1, 2));
        let l = FrameLayout::new(192, 256);
        assert_eq!((l.blocks, l.codewords, l.total_bits()), (4, 3, 768));
    }

    #[test]
    fn noiseless_transmit_matches_effective_model() {
        use crate::channel::{sample_channel, PowerProfile};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for scenario in [Scenario::Multiplexing, Scenario::Diversity] {
            let p = LinkParams {
                afdm: AfdmConfig::with_default_chirps(16, 4).unwrap(),
                n_t: 2,
                n_r: 2,
                scenario,
                constellation: Constellation::qpsk(),
            };
            let ch = sample_channel(2, 2, 3, 1.2, 4, 4, PowerProfile::Uniform, &mut rng).unwrap();
            let bits: Vec<u8> = (0..2 * p.bits_per_block()).map(|_| rng.random::<bool>() as u8).collect();
            let segs = transmit(&p, &ch, &bits, 0.0, &mut rng).unwrap();
            assert_eq!(segs.len(), 2);
            for (seg, b) in segs.iter().zip(bits.chunks(p.bits_per_block())) {
                let x = p.constellation.map_bits(b).unwrap();
                let hx = seg.h.matvec(&x).unwrap();
                for (a, b) in hx.iter().zip(&seg.y) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }
}
