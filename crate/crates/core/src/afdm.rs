//! DAFT kernels, modulation and the chirp-periodic prefix.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Chirp parameters of one AFDM block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfdmConfig {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub n_cpp: usize,
}

impl AfdmConfig {
    pub fn new(n: usize, c1: f64, c2: f64, n_cpp: usize) -> Result<Self> {
        let cfg = AfdmConfig { n, c1, c2, n_cpp };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `c1 = c2 = 1/N`.
    pub fn with_default_chirps(n: usize, n_cpp: usize) -> Result<Self> {
        Self::new(n, 1.0 / n as f64, 1.0 / n as f64, n_cpp)
    }

    /// OFDM special case, `c1 = c2 = 0`.
    pub fn ofdm(n: usize, n_cpp: usize) -> Result<Self> {
        Self::new(n, 0.0, 0.0, n_cpp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n must be >= 2, got {}", self.n)));
        }
        if self.n_cpp >= self.n {
            return Err(Error::InvalidConfig(format!(
                "n_cpp ({}) must be smaller than n ({})",
                self.n_cpp, self.n
            )));
        }
        if !(self.c1 >= 0.0 && self.c1.is_finite() && self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::InvalidConfig("chirp rates must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// `exp(-j 2 pi x)` with the argument reduced modulo one first.
#[inline]
pub fn cis_neg(x: f64) -> Complex64 {
    let r = x.rem_euclid(1.0);
    let (s, c) = (2.0 * PI * r).sin_cos();
    Complex64::new(c, -s)
}

/// `c * k^2` modulo one, exact for integer `k` well beyond the block sizes used here.
#[inline]
fn chirp_phase(c: f64, k: i64) -> f64 {
    (c * (k * k) as f64).rem_euclid(1.0)
}

/// Entry `A[n, m] = exp(-j2pi (c2 n^2 + nm/N + c1 m^2)) / sqrt(N)`.
pub fn kernel(cfg: &AfdmConfig, n: usize, m: usize) -> Complex64 {
    let nn = cfg.n as i64;
    let (n, m) = (n as i64, m as i64);
    let ph = chirp_phase(cfg.c2, n) + ((n * m) % nn) as f64 / nn as f64 + chirp_phase(cfg.c1, m);
    cis_neg(ph) / (cfg.n as f64).sqrt()
}

/// The DAFT matrix `A = L_c2 F L_c1`.
pub fn daft_matrix(cfg: &AfdmConfig) -> DMatrix<Complex64> {
    DMatrix::from_fn(cfg.n, cfg.n, |n, m| kernel(cfg, n, m))
}

/// Precomputed DAFT matrix shared by many transforms.
#[derive(Debug, Clone)]
pub struct Daft {
    cfg: AfdmConfig,
    a: DMatrix<Complex64>,
}

impl Daft {
    pub fn new(cfg: &AfdmConfig) -> Self {
        Daft { cfg: *cfg, a: daft_matrix(cfg) }
    }

    pub fn config(&self) -> &AfdmConfig {
        &self.cfg
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    /// `s = A^H x`.
    pub fn idaft(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.cfg.n, x.len())?;
        let n = self.cfg.n;
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        for (m, sm) in s.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, xk) in x.iter().enumerate() {
                acc += self.a[(k, m)].conj() * xk;
            }
            *sm = acc;
        }
        Ok(s)
    }

    /// `r = A r_time`.
    pub fn daft(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.cfg.n, r.len())?;
        let n = self.cfg.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, rm) in r.iter().enumerate() {
                acc += self.a[(k, m)] * rm;
            }
            *o = acc;
        }
        Ok(out)
    }
}

pub fn idaft(x: &[Complex64], cfg: &AfdmConfig) -> Result<Vec<Complex64>> {
    Daft::new(cfg).idaft(x)
}

pub fn daft(r: &[Complex64], cfg: &AfdmConfig) -> Result<Vec<Complex64>> {
    Daft::new(cfg).daft(r)
}

/// Phase applied to prefix sample `n` (negative): `exp(-j2pi c1 (N^2 + 2Nn))`.
pub fn cpp_phase(cfg: &AfdmConfig, n: i64) -> Complex64 {
    let nn = cfg.n as i64;
    cis_neg((cfg.c1 * (nn * nn + 2 * nn * n) as f64).rem_euclid(1.0))
}

/// Prepends the chirp-periodic prefix; output is `[s_{-Ncpp}, .., s_{-1}, s_0, .., s_{N-1}]`.
pub fn add_cpp(s: &[Complex64], cfg: &AfdmConfig) -> Result<Vec<Complex64>> {
    check_len(cfg.n, s.len())?;
    let (n, l) = (cfg.n as i64, cfg.n_cpp as i64);
    let mut out = Vec::with_capacity(s.len() + cfg.n_cpp);
    for k in -l..0 {
        out.push(s[(n + k) as usize] * cpp_phase(cfg, k));
    }
    out.extend_from_slice(s);
    Ok(out)
}

pub fn remove_cpp(s: &[Complex64], cfg: &AfdmConfig) -> Result<Vec<Complex64>> {
    check_len(cfg.n + cfg.n_cpp, s.len())?;
    Ok(s[cfg.n_cpp..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn max_dev_from_identity(a: &DMatrix<Complex64>) -> f64 {
        let p = a * a.adjoint();
        let mut worst = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - e).norm());
            }
        }
        worst
    }

    #[test]
    fn zero_chirps_give_unitary_dft() {
        let cfg = AfdmConfig::ofdm(8, 2).unwrap();
        let a = daft_matrix(&cfg);
        for n in 0..8 {
            for m in 0..8 {
                let ang = -2.0 * PI * (n * m) as f64 / 8.0;
                let f = Complex64::from_polar(1.0 / 8f64.sqrt(), ang);
                assert!((a[(n, m)] - f).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_entry_default_chirps() {
        let cfg = AfdmConfig::with_default_chirps(128, 24).unwrap();
        let a = daft_matrix(&cfg);
        assert!((a[(0, 0)] - Complex64::new(1.0 / 128f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn impulse_under_ofdm_is_flat() {
        let cfg = AfdmConfig::ofdm(16, 0).unwrap();
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        let s = idaft(&x, &cfg).unwrap();
        for v in &s {
            assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        }
        let back = daft(&s, &cfg).unwrap();
        assert!((back[0] - x[0]).norm() < 1e-12);
    }

    #[test]
    fn zero_in_zero_out() {
        let cfg = AfdmConfig::with_default_chirps(16, 4).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 16];
        assert!(idaft(&z, &cfg).unwrap().iter().all(|v| v.norm() == 0.0));
        assert!(daft(&z, &cfg).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn length_errors() {
        let cfg = AfdmConfig::with_default_chirps(8, 2).unwrap();
        let x = vec![Complex64::new(0.0, 0.0); 7];
        assert!(matches!(idaft(&x, &cfg), Err(Error::LengthMismatch { expected: 8, got: 7 })));
        assert!(daft(&x, &cfg).is_err());
        assert!(add_cpp(&x, &cfg).is_err());
        assert!(remove_cpp(&x, &cfg).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(AfdmConfig::new(1, 0.0, 0.0, 0).is_err());
        assert!(AfdmConfig::new(8, 0.0, 0.0, 8).is_err());
        assert!(AfdmConfig::new(8, -0.1, 0.0, 0).is_err());
    }

    #[test]
    fn prefix_phase_hand_value() {
        // exponent (64 - 16) / 8 = 6, a whole number of turns
        let cfg = AfdmConfig::new(8, 1.0 / 8.0, 0.0, 2).unwrap();
        let p = cpp_phase(&cfg, -1);
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn prefix_is_cyclic_for_zero_c1() {
        let cfg = AfdmConfig::new(8, 0.0, 0.3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = rand_vec(&mut rng, 8);
        let p = add_cpp(&s, &cfg).unwrap();
        assert_eq!(&p[..3], &s[5..]);
        let none = AfdmConfig::new(8, 0.2, 0.3, 0).unwrap();
        assert_eq!(add_cpp(&s, &none).unwrap(), s);
    }

    #[test]
    fn remove_undoes_add() {
        let cfg = AfdmConfig::with_default_chirps(16, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let s = rand_vec(&mut rng, 16);
            assert_eq!(remove_cpp(&add_cpp(&s, &cfg).unwrap(), &cfg).unwrap(), s);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unitary_for_any_chirps(n in 2usize..40, c1 in 0.0f64..1.0, c2 in 0.0f64..1.0) {
            let cfg = AfdmConfig::new(n, c1, c2, 0).unwrap();
            prop_assert!(max_dev_from_identity(&daft_matrix(&cfg)) < 1e-10);
        }

        #[test]
        fn parseval_and_round_trip(n in 2usize..40, c1 in 0.0f64..1.0, c2 in 0.0f64..1.0, seed in any::<u64>()) {
            let cfg = AfdmConfig::new(n, c1, c2, 0).unwrap();
            let d = Daft::new(&cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = rand_vec(&mut rng, n);
            let s = d.idaft(&x).unwrap();
            let e_x: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let e_s: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((e_x - e_s).abs() < 1e-10);
            let back = d.daft(&s).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }

        #[test]
        fn prefix_recurrence_holds(n in 4usize..40, c1 in 0.0f64..1.0, frac in 0.0f64..1.0, seed in any::<u64>()) {
            let n_cpp = ((n - 1) as f64 * frac) as usize;
            let cfg = AfdmConfig::new(n, c1, 0.0, n_cpp).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = rand_vec(&mut rng, n);
            let p = add_cpp(&s, &cfg).unwrap();
            for k in 1..=n_cpp {
                let idx = n_cpp - k;
                let ph = -2.0 * PI * c1 * ((n * n) as f64 - 2.0 * (n * k) as f64);
                let expect = s[n - k] * Complex64::from_polar(1.0, ph);
                prop_assert!((p[idx] - expect).norm() < 1e-9);
            }
        }
    }
}
