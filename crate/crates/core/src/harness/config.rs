use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::afdm::AfdmConfig;
use crate::channel::{PowerProfile, Scenario};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::ldpc::DegreeDistribution;
use crate::receivers::{LatencyParams, ReceiverConfig, ReceiverKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AfdmSection {
    pub n: usize,
    /// Defaults to `1/N` when absent.
    pub c1: Option<f64>,
    /// Defaults to `1/N` when absent.
    pub c2: Option<f64>,
    pub n_cpp: usize,
}

impl Default for AfdmSection {
    fn default() -> Self {
        AfdmSection { n: 64, c1: None, c2: None, n_cpp: 24 }
    }
}

impl AfdmSection {
    pub fn config(&self) -> Result<AfdmConfig> {
        let d = 1.0 / self.n.max(1) as f64;
        AfdmConfig::new(self.n, self.c1.unwrap_or(d), self.c2.unwrap_or(d), self.n_cpp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MimoSection {
    pub n_t: usize,
    pub n_r: usize,
    /// 1 = multiplexing, 2 = diversity.
    pub scenario: Scenario,
}

impl Default for MimoSection {
    fn default() -> Self {
        MimoSection { n_t: 1, n_r: 1, scenario: Scenario::Multiplexing }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelSection {
    pub paths: usize,
    pub nu_max: f64,
    pub delay_max: usize,
    pub profile: PowerProfile,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection { paths: 2, nu_max: 0.0, delay_max: 6, profile: PowerProfile::Uniform }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodeSection {
    pub n_bits: usize,
    pub rate: f64,
    pub lambda: DegreeDistribution,
    pub rho: DegreeDistribution,
}

impl Default for CodeSection {
    fn default() -> Self {
        CodeSection {
            n_bits: 256,
            rate: 0.5,
            lambda: DegreeDistribution::default_variable(),
            rho: DegreeDistribution::default_check(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    Bpsk,
    #[default]
    Qpsk,
}

impl Modulation {
    pub fn constellation(self) -> Constellation {
        match self {
            Modulation::Bpsk => Constellation::bpsk(),
            Modulation::Qpsk => Constellation::qpsk(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    pub ebn0_db: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { ebn0_db: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FramesSection {
    pub max_frames: usize,
    pub max_errors: usize,
    /// Frames simulated between stopping checks.
    pub batch: usize,
}

impl Default for FramesSection {
    fn default() -> Self {
        FramesSection { max_frames: 10_000, max_errors: 200, batch: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceSection {
    /// Antenna setup of the study; receive diversity moves the operating point off the
    /// outage floor.
    pub mimo: MimoSection,
    pub ebn0_db: f64,
    pub iterations: Vec<usize>,
    pub frames: usize,
    pub receivers: Vec<ReceiverKind>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        ConvergenceSection {
            mimo: MimoSection { n_t: 1, n_r: 2, scenario: Scenario::Multiplexing },
            ebn0_db: 4.0,
            iterations: (0..=15).collect(),
            frames: 2000,
            receivers: vec![ReceiverKind::MmseLdpc, ReceiverKind::BpJsg, ReceiverKind::EpJsg, ReceiverKind::EJsg],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsnrSection {
    /// Operating point of the study.
    pub ebn0_db: f64,
    pub thresholds_db: Vec<f64>,
    pub frames: usize,
    pub receiver: ReceiverKind,
    pub paths: usize,
    pub nu_max: f64,
}

impl Default for EsnrSection {
    fn default() -> Self {
        EsnrSection {
            ebn0_db: 4.0,
            thresholds_db: vec![-20.0, -18.0, -16.0, -14.0, -12.0, -10.0, -8.0, -6.0, -4.0],
            frames: 500,
            receiver: ReceiverKind::EpJsg,
            paths: 4,
            nu_max: 0.075,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathStudySection {
    pub ebn0_db: f64,
    pub paths: Vec<usize>,
    pub nu_max: f64,
    pub frames: usize,
    pub receivers: Vec<ReceiverKind>,
}

impl Default for PathStudySection {
    fn default() -> Self {
        PathStudySection {
            ebn0_db: 2.0,
            paths: vec![1, 2, 3, 4, 5, 6],
            nu_max: 1.2,
            frames: 500,
            receivers: vec![ReceiverKind::MmseLdpc, ReceiverKind::EpJsg],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SparsitySection {
    pub n: usize,
    pub paths: usize,
    pub nu_max: f64,
    pub c1: Option<f64>,
    pub threshold_db: f64,
    /// Symbol SNR `Es/N0` at which gains are compared with the noise.
    pub snr_db: f64,
    pub delay_max: usize,
    pub realizations: usize,
}

impl Default for SparsitySection {
    fn default() -> Self {
        SparsitySection {
            n: 100,
            paths: 10,
            nu_max: 1.2,
            c1: None,
            threshold_db: -12.0,
            snr_db: 20.0,
            delay_max: 16,
            realizations: 100,
        }
    }
}

/// Complete experiment description. Every field has a default, so a config file only
/// needs the values it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub afdm: AfdmSection,
    pub mimo: MimoSection,
    pub channel: ChannelSection,
    pub code: CodeSection,
    pub modulation: Modulation,
    pub receivers: Vec<ReceiverConfig>,
    pub sweep: SweepSection,
    pub frames: FramesSection,
    pub seed: u64,
    pub convergence: ConvergenceSection,
    pub esnr: EsnrSection,
    pub paths: PathStudySection,
    pub sparsity: SparsitySection,
    pub latency: LatencyParams,
}

/// Pruning threshold used by default for the joint receivers.
pub const DEFAULT_ESNR_TH_DB: f64 = -12.0;

pub fn default_receivers() -> Vec<ReceiverConfig> {
    ReceiverKind::ALL
        .into_iter()
        .map(|k| ReceiverConfig::new(k).with_threshold(if k.is_jsg() { Some(DEFAULT_ESNR_TH_DB) } else { None }))
        .collect()
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            afdm: AfdmSection::default(),
            mimo: MimoSection::default(),
            channel: ChannelSection::default(),
            code: CodeSection::default(),
            modulation: Modulation::Qpsk,
            receivers: default_receivers(),
            sweep: SweepSection::default(),
            frames: FramesSection::default(),
            seed: 1,
            convergence: ConvergenceSection::default(),
            esnr: EsnrSection::default(),
            paths: PathStudySection::default(),
            sparsity: SparsitySection::default(),
            latency: LatencyParams::uniform(1.0),
        }
    }
}

impl SimConfig {
    /// Desk scale: `N = 64`, code length 256.
    pub fn desk() -> Self {
        SimConfig::default()
    }

    /// Full size: `N = 128`, code length 512.
    pub fn paper_scale() -> Self {
        let mut c = SimConfig::default();
        c.to_paper_scale();
        c
    }

    pub fn to_paper_scale(&mut self) {
        self.afdm.n = 128;
        self.code.n_bits = 512;
    }

    pub fn afdm_config(&self) -> Result<AfdmConfig> {
        self.afdm.config()
    }

    pub fn validate(&self) -> Result<()> {
        self.afdm_config()?;
        if self.mimo.n_t == 0 || self.mimo.n_r == 0 {
            return Err(Error::InvalidConfig("antenna counts must be >= 1".into()));
        }
        if self.channel.paths == 0 {
            return Err(Error::InvalidConfig("channel needs at least one path".into()));
        }
        if self.channel.delay_max > self.afdm.n_cpp {
            return Err(Error::DelayExceedsPrefix { delay: self.channel.delay_max, n_cpp: self.afdm.n_cpp });
        }
        if self.frames.max_frames == 0 || self.frames.batch == 0 {
            return Err(Error::InvalidConfig("frames.max_frames and frames.batch must be >= 1".into()));
        }
        if self.frames.max_errors == 0 {
            return Err(Error::InvalidConfig("frames.max_errors must be >= 1".into()));
        }
        if self.sweep.ebn0_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("Eb/N0 grid must be strictly increasing".into()));
        }
        if self.receivers.is_empty() {
            return Err(Error::InvalidConfig("no receivers configured".into()));
        }
        for r in &self.receivers {
            r.validate()?;
        }
        self.code.lambda.validate()?;
        self.code.rho.validate()?;
        self.latency.validate()?;
        Ok(())
    }

    /// Parses JSON, or TOML when the text does not start with `{`.
    pub fn from_str_any(text: &str) -> Result<Self> {
        let cfg: SimConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?
        };
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_any(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::desk().validate().unwrap();
        let p = SimConfig::paper_scale();
        p.validate().unwrap();
        assert_eq!((p.afdm.n, p.code.n_bits), (128, 512));
        let a = p.afdm_config().unwrap();
        assert_eq!((a.c1, a.c2, a.n_cpp), (1.0 / 128.0, 1.0 / 128.0, 24));
    }

    #[test]
    fn json_and_toml_round_trip() {
        let c = SimConfig::desk();
        assert_eq!(SimConfig::from_str_any(&c.to_json()).unwrap(), c);
        assert_eq!(SimConfig::from_str_any(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c = SimConfig::from_str_any("seed = 9\n[afdm]\nn = 32\n").unwrap();
        assert_eq!((c.seed, c.afdm.n, c.afdm.n_cpp), (9, 32, 24));
        let j = SimConfig::from_str_any(r#"{"receivers": [{"kind": "E_JSG", "iters": 5}]}"#).unwrap();
        assert_eq!(j.receivers.len(), 1);
        assert_eq!((j.receivers[0].kind, j.receivers[0].iters), (ReceiverKind::EJsg, 5));
    }

    #[test]
    fn rejects_bad_grids() {
        let mut c = SimConfig::desk();
        c.sweep.ebn0_db = vec![1.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = SimConfig::desk();
        c.channel.delay_max = 30;
        assert!(c.validate().is_err());
    }
}
