use serde::{Deserialize, Serialize};

use super::{ReceiverConfig, ReceiverKind};
use crate::error::{Error, Result};

/// Per-stage run times in arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct LatencyParams {
    pub t_vi_vn: f64,
    pub t_vi_fn: f64,
    pub t_ldpc_vn: f64,
    pub t_ldpc_cn: f64,
    pub t_res_mmse: f64,
    pub t_res_idd: f64,
    pub t_res_jsg: f64,
    pub t_mmse: f64,
}

impl LatencyParams {
    pub fn uniform(t: f64) -> Self {
        LatencyParams {
            t_vi_vn: t,
            t_vi_fn: t,
            t_ldpc_vn: t,
            t_ldpc_cn: t,
            t_res_mmse: t,
            t_res_idd: t,
            t_res_jsg: t,
            t_mmse: t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.t_vi_vn,
            self.t_vi_fn,
            self.t_ldpc_vn,
            self.t_ldpc_cn,
            self.t_res_mmse,
            self.t_res_idd,
            self.t_res_jsg,
            self.t_mmse,
        ];
        if all.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidConfig("latency parameters must be non-negative".into()));
        }
        Ok(())
    }
}

/// Parametric detection-and-decoding latency. Uses `cfg.iters` as `N_LDPC` for MMSE-LDPC and
/// as the joint iteration count for JSG kinds; Turbo-IDD uses `(n_out, n_vi, n_ldpc)`.
pub fn latency_model(kind: ReceiverKind, p: &LatencyParams, cfg: &ReceiverConfig) -> Result<f64> {
    p.validate()?;
    let ldpc = p.t_ldpc_vn + p.t_ldpc_cn;
    let joint = p.t_vi_vn.max(p.t_ldpc_vn) + p.t_vi_fn.max(p.t_ldpc_cn);
    Ok(match kind {
        ReceiverKind::MmseLdpc => p.t_mmse + cfg.iters as f64 * ldpc + p.t_res_mmse,
        ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => {
            cfg.n_out as f64 * (cfg.n_vi as f64 * (p.t_vi_vn + p.t_vi_fn) + cfg.n_ldpc as f64 * ldpc + p.t_res_idd)
        }
        ReceiverKind::BpJsg | ReceiverKind::EpJsg => cfg.iters as f64 * (joint + p.t_res_jsg),
        ReceiverKind::EJsg => cfg.iters as f64 * joint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(iters: usize) -> ReceiverConfig {
        ReceiverConfig { iters, ..Default::default() }
    }

    #[test]
    fn unit_times() {
        let p = LatencyParams::uniform(1.0);
        assert_eq!(latency_model(ReceiverKind::EJsg, &p, &cfg(12)).unwrap(), 24.0);
        assert_eq!(latency_model(ReceiverKind::EpJsg, &p, &cfg(12)).unwrap(), 36.0);
        assert_eq!(latency_model(ReceiverKind::MmseLdpc, &p, &cfg(12)).unwrap(), 26.0);
        // 4 * (3 * 2 + 3 * 2 + 1)
        assert_eq!(latency_model(ReceiverKind::TurboIddEp, &p, &cfg(12)).unwrap(), 52.0);
    }

    #[test]
    fn zero_iterations() {
        let p = LatencyParams::uniform(3.0);
        for k in [ReceiverKind::BpJsg, ReceiverKind::EpJsg, ReceiverKind::EJsg] {
            assert_eq!(latency_model(k, &p, &cfg(0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_negative() {
        let p = LatencyParams { t_vi_fn: -1.0, ..Default::default() };
        assert!(latency_model(ReceiverKind::EJsg, &p, &cfg(1)).is_err());
    }
}
