//! Doubly-selective channels: sampling, time-domain application and the
//! DAFT-domain effective channel.

mod effective;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::afdm::{cis_neg, AfdmConfig};
use crate::error::{check_len, Error, Result};

pub use effective::{
    build_effective, effective_entry, path_shift, stack_mimo, Band, EffectiveChannel, Scenario, SparseBlock,
};

/// One propagation path: gain, integer delay and normalized Doppler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    #[serde(with = "complex_parts")]
    pub gain: Complex64,
    pub delay: usize,
    pub doppler: f64,
}

impl PathSpec {
    pub fn new(gain: Complex64, delay: usize, doppler: f64) -> Self {
        PathSpec { gain, delay, doppler }
    }

    /// Integer Doppler part, `ceil(nu - 1/2)`.
    pub fn alpha(&self) -> i64 {
        (self.doppler - 0.5).ceil() as i64
    }

    /// Fractional Doppler part in `(-1/2, 1/2]`.
    pub fn beta(&self) -> f64 {
        self.doppler - self.alpha() as f64
    }
}

/// Serde adapter writing a complex number as `{"re": .., "im": ..}`.
pub mod complex_parts {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// Independent path lists for every (receive, transmit) antenna pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub n_r: usize,
    pub n_t: usize,
    /// Row-major over `(r, t)`.
    pub links: Vec<Vec<PathSpec>>,
}

impl ChannelRealization {
    pub fn siso(paths: Vec<PathSpec>) -> Self {
        ChannelRealization { n_r: 1, n_t: 1, links: vec![paths] }
    }

    pub fn link(&self, r: usize, t: usize) -> &[PathSpec] {
        &self.links[r * self.n_t + t]
    }

    pub fn validate(&self, cfg: &AfdmConfig) -> Result<()> {
        if self.n_r == 0 || self.n_t == 0 || self.links.len() != self.n_r * self.n_t {
            return Err(Error::DimensionMismatch(format!(
                "{} links for a {}x{} array",
                self.links.len(),
                self.n_r,
                self.n_t
            )));
        }
        for l in &self.links {
            if l.is_empty() {
                return Err(Error::InvalidConfig("every link needs at least one path".into()));
            }
            for p in l {
                if p.delay > cfg.n_cpp {
                    return Err(Error::DelayExceedsPrefix { delay: p.delay, n_cpp: cfg.n_cpp });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("realization serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Per-path mean powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PowerProfile {
    #[default]
    Uniform,
    /// Power of path `p` decays by `decay_db * p`, normalized to unit total power.
    Exponential { decay_db: f64 },
}

impl PowerProfile {
    pub fn powers(&self, p: usize) -> Vec<f64> {
        let raw: Vec<f64> = match *self {
            PowerProfile::Uniform => vec![1.0; p],
            PowerProfile::Exponential { decay_db } => {
                (0..p).map(|k| 10f64.powf(-decay_db * k as f64 / 10.0)).collect()
            }
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }
}

/// Draws `p` paths: `h ~ CN(0, power)`, `d_1 = 0`, other delays uniform on `0..=delay_max`,
/// `nu = nu_max cos(psi)` with `psi ~ U[-pi, pi]`.
pub fn sample_paths<R: Rng + ?Sized>(
    p: usize,
    nu_max: f64,
    delay_max: usize,
    n_cpp: usize,
    profile: PowerProfile,
    rng: &mut R,
) -> Result<Vec<PathSpec>> {
    if p == 0 {
        return Err(Error::InvalidConfig("path count must be >= 1".into()));
    }
    if delay_max > n_cpp {
        return Err(Error::DelayExceedsPrefix { delay: delay_max, n_cpp });
    }
    let powers = profile.powers(p);
    let mut out = Vec::with_capacity(p);
    for (k, pw) in powers.iter().enumerate() {
        let s = (pw / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let delay = if k == 0 { 0 } else { rng.random_range(0..=delay_max) };
        let psi: f64 = rng.random_range(-PI..PI);
        let doppler = if nu_max == 0.0 { 0.0 } else { nu_max * psi.cos() };
        out.push(PathSpec::new(Complex64::new(re * s, im * s), delay, doppler));
    }
    Ok(out)
}

/// Draws independent path lists for every antenna pair.
#[allow(clippy::too_many_arguments)]
pub fn sample_channel<R: Rng + ?Sized>(
    n_r: usize,
    n_t: usize,
    p: usize,
    nu_max: f64,
    delay_max: usize,
    n_cpp: usize,
    profile: PowerProfile,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let mut links = Vec::with_capacity(n_r * n_t);
    for _ in 0..n_r * n_t {
        links.push(sample_paths(p, nu_max, delay_max, n_cpp, profile, rng)?);
    }
    Ok(ChannelRealization { n_r, n_t, links })
}

/// Noiseless single-link channel on a prefixed signal. Returns the `N` samples after the prefix.
pub fn apply_paths(s: &[Complex64], paths: &[PathSpec], cfg: &AfdmConfig) -> Result<Vec<Complex64>> {
    check_len(cfg.n + cfg.n_cpp, s.len())?;
    let n = cfg.n;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for p in paths {
        if p.delay > cfg.n_cpp {
            return Err(Error::DelayExceedsPrefix { delay: p.delay, n_cpp: cfg.n_cpp });
        }
        for (k, o) in out.iter_mut().enumerate() {
            let dop = cis_neg(p.doppler * k as f64 / n as f64);
            *o += p.gain * dop * s[cfg.n_cpp + k - p.delay];
        }
    }
    Ok(out)
}

/// Adds `CN(0, n0)` samples in place.
pub fn add_noise<R: Rng + ?Sized>(y: &mut [Complex64], n0: f64, rng: &mut R) {
    if n0 <= 0.0 {
        return;
    }
    let s = (n0 / 2.0).sqrt();
    for v in y.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *v += Complex64::new(re * s, im * s);
    }
}

/// Time-domain MIMO channel. `tx[t]` is the prefixed signal of antenna `t`;
/// returns per receive antenna the `N` post-prefix samples plus noise.
pub fn apply_time_domain<R: Rng + ?Sized>(
    tx: &[Vec<Complex64>],
    ch: &ChannelRealization,
    cfg: &AfdmConfig,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    ch.validate(cfg)?;
    check_len(ch.n_t, tx.len())?;
    let mut rx = Vec::with_capacity(ch.n_r);
    for r in 0..ch.n_r {
        let mut acc = vec![Complex64::new(0.0, 0.0); cfg.n];
        for (t, s) in tx.iter().enumerate() {
            let part = apply_paths(s, ch.link(r, t), cfg)?;
            for (a, b) in acc.iter_mut().zip(part) {
                *a += b;
            }
        }
        add_noise(&mut acc, n0, rng);
        rx.push(acc);
    }
    Ok(rx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afdm::add_cpp;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    /// `h Gamma_CPP Delta_nu Pi^d` built entry by entry.
    fn dense_path_matrix(p: &PathSpec, cfg: &AfdmConfig) -> DMatrix<Complex64> {
        let n = cfg.n;
        let mut h = DMatrix::zeros(n, n);
        for row in 0..n {
            let col = (row + n - p.delay) % n;
            let g = if row < p.delay {
                let e = cfg.c1 * ((n * n) as f64 - 2.0 * n as f64 * (p.delay - row) as f64);
                Complex64::from_polar(1.0, -2.0 * PI * e)
            } else {
                Complex64::new(1.0, 0.0)
            };
            let dop = Complex64::from_polar(1.0, -2.0 * PI * p.doppler * row as f64 / n as f64);
            h[(row, col)] = p.gain * g * dop;
        }
        h
    }

    #[test]
    fn doppler_split() {
        for &(nu, a, b) in &[(0.0, 0, 0.0), (0.5, 0, 0.5), (-0.5, -1, 0.5), (1.2, 1, 0.2), (-1.7, -2, 0.3)] {
            let p = PathSpec::new(Complex64::new(1.0, 0.0), 0, nu);
            assert_eq!(p.alpha(), a);
            assert!((p.beta() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_channel() {
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let body = rand_vec(&mut rng, 16);
        let s = add_cpp(&body, &cfg).unwrap();
        let out = apply_paths(&s, &[PathSpec::new(Complex64::new(1.0, 0.0), 0, 0.0)], &cfg).unwrap();
        assert_eq!(out, body);
    }

    #[test]
    fn cyclic_shift_without_chirp() {
        let cfg = AfdmConfig::new(16, 0.0, 0.2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let body = rand_vec(&mut rng, 16);
        let s = add_cpp(&body, &cfg).unwrap();
        let out = apply_paths(&s, &[PathSpec::new(Complex64::new(1.0, 0.0), 2, 0.0)], &cfg).unwrap();
        for k in 0..16 {
            assert!((out[k] - body[(k + 14) % 16]).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let cfg = AfdmConfig::with_default_chirps(32, 6).unwrap();
            let paths = sample_paths(2, 1.3, 6, 6, PowerProfile::Uniform, &mut rng).unwrap();
            let body = rand_vec(&mut rng, 32);
            let s = add_cpp(&body, &cfg).unwrap();
            let out = apply_paths(&s, &paths, &cfg).unwrap();
            let mut h = DMatrix::zeros(32, 32);
            for p in &paths {
                h += dense_path_matrix(p, &cfg);
            }
            let expect = &h * nalgebra::DVector::from_vec(body.clone());
            for k in 0..32 {
                assert!((out[k] - expect[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sampler_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = sample_paths(4, 0.0, 3, 4, PowerProfile::Uniform, &mut rng).unwrap();
        assert!(p.iter().all(|x| x.doppler == 0.0));
        assert_eq!(p[0].delay, 0);
        assert!(p.iter().all(|x| x.delay <= 3));
        assert!(matches!(
            sample_paths(2, 0.0, 5, 4, PowerProfile::Uniform, &mut rng),
            Err(Error::DelayExceedsPrefix { .. })
        ));
        let a = sample_paths(2, 1.0, 4, 4, PowerProfile::Uniform, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_paths(2, 1.0, 4, 4, PowerProfile::Uniform, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_power_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 10_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let p = sample_paths(4, 1.0, 4, 4, PowerProfile::Uniform, &mut rng).unwrap();
            acc += p.iter().map(|x| x.gain.norm_sqr()).sum::<f64>();
        }
        assert!((acc / trials as f64 - 1.0).abs() < 0.05);
        let w = PowerProfile::Exponential { decay_db: 3.0 }.powers(3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12 && w[0] > w[1] && w[1] > w[2]);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let ch = sample_channel(2, 2, 3, 0.5, 4, cfg.n_cpp, PowerProfile::Uniform, &mut rng).unwrap();
        let js = ch.to_json();
        assert!(js.contains("\"re\"") && js.contains("\"delay\"") && js.contains("\"doppler\""));
        assert_eq!(ChannelRealization::from_json(&js).unwrap(), ch);
    }

    #[test]
    fn rejects_long_delay() {
        let cfg = AfdmConfig::with_default_chirps(16, 2).unwrap();
        let ch = ChannelRealization::siso(vec![PathSpec::new(Complex64::new(1.0, 0.0), 3, 0.0)]);
        let s = vec![Complex64::new(0.0, 0.0); 18];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(apply_time_domain(&[s], &ch, &cfg, 0.0, &mut rng).is_err());
    }
}
