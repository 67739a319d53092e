//! Blind single-shot receiver: timing sync, fractional CFO removal,
//! multi-antenna zero testing and cyclic-shift resolution by the code.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::acpc::AcpcCode;
use crate::error::{Error, Result};
use crate::gf2::Word;
use crate::mocz::{derotate, estimate_fractional_cfo, simo_dizet_decode, BmoczParams};
use crate::sync::{summed_powers, synchronize};

#[derive(Clone, Debug)]
pub struct ReceiverConfig {
    pub params: BmoczParams,
    /// Outer code; `None` decodes the raw `K` bits.
    pub code: Option<Arc<AcpcCode>>,
    /// Maximum channel length.
    pub l_max: usize,
    /// Fractional CFO grid size.
    pub q_cfo: usize,
    /// Expected antenna count.
    pub m: usize,
    pub use_sync: bool,
    pub use_cfo: bool,
    /// Power decay assumed by the effective-length detector.
    pub decay: f64,
}

impl ReceiverConfig {
    pub fn new(params: BmoczParams, code: Option<Arc<AcpcCode>>, l_max: usize) -> Result<Self> {
        let cfg = Self {
            params,
            code,
            l_max,
            q_cfo: 16,
            m: 1,
            use_sync: true,
            use_cfo: true,
            decay: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(code) = &self.code {
            if code.n() != self.params.k {
                return Err(Error::InvalidParameter(format!(
                    "code length n={} differs from K={}",
                    code.n(),
                    self.params.k
                )));
            }
        }
        if self.l_max == 0 || self.q_cfo == 0 || self.m == 0 {
            return Err(Error::InvalidParameter(
                "L, Q and M must all be positive".into(),
            ));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "decay {} must lie in (0, 1]",
                self.decay
            )));
        }
        Ok(())
    }

    /// Message bits per packet.
    pub fn message_len(&self) -> usize {
        self.code.as_ref().map_or(self.params.k, |c| c.b())
    }
}

/// Known impairments injected when sync or CFO estimation is disabled.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Genie {
    pub tau0: Option<usize>,
    pub phi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub msg: Word,
    /// Raw zero-test decisions before the outer code.
    pub bits: Word,
    pub tau_hat: usize,
    pub l_eff_hat: usize,
    /// `θ̂ + shift_hat·θ_K` wrapped into `[0, 2π)`.
    pub phi_hat: f64,
    pub theta_hat: f64,
    /// Integer CFO in units of `θ_K`.
    pub shift_hat: usize,
    pub reliable: bool,
}

/// Copies `samples[start .. start+len]`, zero-padding past the end.
pub fn extract_window(samples: &[Complex64], start: usize, len: usize) -> Vec<Complex64> {
    (start..start + len)
        .map(|i| samples.get(i).copied().unwrap_or_default())
        .collect()
}

/// Blind reception of one packet seen by `observations.len()` antennas with
/// per-sample noise power `n0` on each.
pub fn receive<Y: AsRef<[Complex64]>>(
    observations: &[Y],
    cfg: &ReceiverConfig,
    n0: f64,
) -> Result<DecodeResult> {
    receive_with_genie(observations, cfg, n0, Genie::default())
}

/// [`receive`] with truth values standing in for disabled estimators.
pub fn receive_with_genie<Y: AsRef<[Complex64]>>(
    observations: &[Y],
    cfg: &ReceiverConfig,
    n0: f64,
    genie: Genie,
) -> Result<DecodeResult> {
    cfg.validate()?;
    let k = cfg.params.k;
    let first = observations
        .first()
        .ok_or_else(|| Error::InvalidParameter("no observations".into()))?;
    let nobs = first.as_ref().len();
    if nobs < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "observation of {nobs} samples is shorter than K+1={}",
            k + 1
        )));
    }
    if let Some(bad) = observations.iter().find(|o| o.as_ref().len() != nobs) {
        return Err(Error::LengthMismatch {
            expected: nobs,
            actual: bad.as_ref().len(),
        });
    }

    let (tau_hat, l_eff_hat) = if cfg.use_sync {
        let powers = summed_powers(observations);
        let m = observations.len() as f64;
        let est = synchronize(&powers, k, cfg.l_max, m * n0, cfg.decay);
        (est.tau_hat, est.l_eff)
    } else {
        (genie.tau0.unwrap_or(0), cfg.l_max)
    };

    let windows: Vec<Vec<Complex64>> = observations
        .iter()
        .map(|o| extract_window(o.as_ref(), tau_hat, k + l_eff_hat))
        .collect();

    let theta_hat = if cfg.use_cfo {
        estimate_fractional_cfo(&windows, &cfg.params, cfg.q_cfo).theta_hat
    } else {
        genie.phi.unwrap_or(0.0)
    };
    let windows: Vec<Vec<Complex64>> = windows.iter().map(|w| derotate(w, theta_hat)).collect();
    let bits = simo_dizet_decode(&windows, &cfg.params);

    let (msg, shift_hat, reliable) = match &cfg.code {
        Some(code) => {
            let d = code.decode(&bits)?;
            // the code reports the right rotation of the codeword; a CFO of
            // l·θ_K rotates the decisions left by l
            (d.msg, (k - d.shift) % k, d.reliable)
        }
        None => (bits, 0, true),
    };
    let phi_hat = (theta_hat + shift_hat as f64 * cfg.params.theta_k).rem_euclid(TAU);
    Ok(DecodeResult {
        msg,
        bits,
        tau_hat,
        l_eff_hat,
        phi_hat,
        theta_hat,
        shift_hat,
        reliable,
    })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > std::f64::consts::PI {
        w - TAU
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{transmit, ChannelRealization};
    use crate::mocz::encode_symbol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_identity_channel() {
        let code = Arc::new(AcpcCode::new(5, 4).unwrap());
        let params = BmoczParams::new(31).unwrap();
        let cfg = ReceiverConfig::new(params, Some(code.clone()), 1).unwrap();
        let msg = Word::from_bits(0b101101, 6);
        let x = encode_symbol(&code.encode(&msg).unwrap(), &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = transmit(
            &x,
            &ChannelRealization::impulse(1),
            0,
            0.0,
            0.0,
            64,
            &mut rng,
        )
        .unwrap();
        let r = receive(&[obs.samples], &cfg, 1e-12).unwrap();
        assert_eq!(r.msg, msg);
        assert_eq!(r.tau_hat, 0);
        assert!(r.reliable);
        assert!(wrap_angle(r.phi_hat).abs() < 1e-9);
    }

    #[test]
    fn rejects_short_or_ragged_input() {
        let params = BmoczParams::new(7).unwrap();
        let cfg = ReceiverConfig::new(params, None, 2).unwrap();
        let short = vec![Complex64::default(); 7];
        assert!(receive(&[short], &cfg, 0.1).is_err());
        let a = vec![Complex64::default(); 20];
        let b = vec![Complex64::default(); 21];
        assert!(receive(&[a, b], &cfg, 0.1).is_err());
        let empty: [Vec<Complex64>; 0] = [];
        assert!(receive(&empty, &cfg, 0.1).is_err());
    }

    #[test]
    fn code_length_must_match_k() {
        let code = Arc::new(AcpcCode::new(3, 1).unwrap());
        let params = BmoczParams::new(31).unwrap();
        assert!(ReceiverConfig::new(params, Some(code), 4).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(TAU + 0.1) - 0.1).abs() < 1e-12);
        assert!((wrap_angle(-0.1) + 0.1).abs() < 1e-12);
        assert!((wrap_angle(3.5) - (3.5 - TAU)).abs() < 1e-12);
    }
}
