//! Monte-Carlo link simulation over SNR grids.
//!
//! Every trial owns a ChaCha8 stream selected by `(SNR index, trial index)`
//! under the master seed, and trials are processed in fixed-size batches
//! whose integer counts are summed. Early termination is only checked
//! between batches, so results do not depend on the number of worker
//! threads.

mod config;
mod dpsk;

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{Impairments, Metric, Scheme, SimConfig};
pub use dpsk::{dpsk_demodulate, dpsk_modulate, dpsk_roundtrip, DpskParams};

use crate::acpc::AcpcCode;
use crate::channel::{draw_channel, n0_from_ebn0_db, n0_from_rsnr_db, transmit};
use crate::error::{Error, Result};
use crate::gf2::Word;
use crate::mocz::{encode_symbol, BmoczParams};
use crate::receiver::{receive_with_genie, wrap_angle, Genie, ReceiverConfig};

/// Trials per parallel batch.
pub const BATCH_SIZE: u64 = 200;

/// Aggregated statistics of one SNR point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub ber: f64,
    pub bler: f64,
    pub to_error_rate: f64,
    pub cfo_error_rate: f64,
    pub trials: u64,
    pub ber_ci_lo: f64,
    pub ber_ci_hi: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    trials: u64,
    bits: u64,
    bit_errors: u64,
    block_errors: u64,
    to_errors: u64,
    cfo_errors: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            trials: self.trials + o.trials,
            bits: self.bits + o.bits,
            bit_errors: self.bit_errors + o.bit_errors,
            block_errors: self.block_errors + o.block_errors,
            to_errors: self.to_errors + o.to_errors,
            cfo_errors: self.cfo_errors + o.cfo_errors,
        }
    }
}

/// 95% Wilson score interval for `errors` out of `n`.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    if errors == 0 {
        return (0.0, z * z / (n as f64 + z * z));
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Random generator of trial `trial` at SNR index `point`.
pub fn trial_rng(seed: u64, point: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) | trial);
    rng
}

enum Link {
    Bmocz {
        params: BmoczParams,
        code: Option<Arc<AcpcCode>>,
        receiver: ReceiverConfig,
    },
    Dpsk(DpskParams),
}

/// Validated simulation setup shared by all trials.
pub struct Simulation {
    cfg: SimConfig,
    link: Link,
    /// Packet length `K + L`.
    n: usize,
    bits: usize,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.channel.validate()?;
        if cfg.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if cfg.snr_db.is_empty() || cfg.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "SNR grid must be finite and nonempty".into(),
            ));
        }
        if cfg.m == 0 || cfg.q_cfo == 0 {
            return Err(Error::InvalidParameter("M and Q must be positive".into()));
        }
        let n = cfg.k + cfg.channel.l;
        let (link, bits) = match cfg.scheme {
            Scheme::OfdmDpsk => {
                let p = DpskParams::new(cfg.k, cfg.channel.l)?;
                (Link::Dpsk(p), p.bits())
            }
            Scheme::Bmocz | Scheme::BmoczAcpc => {
                let params = BmoczParams::new(cfg.k)?;
                let code = if cfg.scheme == Scheme::BmoczAcpc {
                    let j = cfg.outer_factors.ok_or_else(|| {
                        Error::InvalidParameter("coded scheme needs outer_factors".into())
                    })?;
                    let m = (cfg.k + 1).trailing_zeros() as usize;
                    if (1usize << m) != cfg.k + 1 {
                        return Err(Error::InvalidParameter(format!(
                            "coded scheme needs K = 2^m - 1, got {}",
                            cfg.k
                        )));
                    }
                    Some(Arc::new(AcpcCode::new(m, j)?))
                } else {
                    None
                };
                let mut receiver = ReceiverConfig::new(params, code.clone(), cfg.channel.l)?;
                receiver.q_cfo = cfg.q_cfo;
                receiver.m = cfg.m;
                receiver.use_sync = cfg.impairments.to;
                receiver.use_cfo = cfg.impairments.cfo;
                receiver.decay = cfg.channel.p;
                let bits = receiver.message_len();
                (
                    Link::Bmocz {
                        params,
                        code,
                        receiver,
                    },
                    bits,
                )
            }
        };
        Ok(Self { cfg, link, n, bits })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Message bits per packet.
    pub fn message_bits(&self) -> usize {
        self.bits
    }

    /// Per-sample noise variance at set point `snr_db`.
    pub fn noise_variance(&self, snr_db: f64) -> f64 {
        match self.cfg.metric {
            Metric::Rsnr => n0_from_rsnr_db(snr_db, self.n),
            Metric::Ebn0 => n0_from_ebn0_db(snr_db, self.bits, self.n),
        }
    }

    fn trial(&self, n0: f64, rng: &mut ChaCha8Rng) -> Result<Counts> {
        let bits: Vec<u8> = (0..self.bits).map(|_| rng.random_range(0..2u8)).collect();
        let mut c = Counts {
            trials: 1,
            bits: self.bits as u64,
            ..Counts::default()
        };
        match &self.link {
            Link::Dpsk(p) => {
                let hat = dpsk_roundtrip(&bits, p, &self.cfg.channel, self.cfg.m, n0, rng)?;
                c.bit_errors = bits.iter().zip(&hat).filter(|(a, b)| a != b).count() as u64;
            }
            Link::Bmocz {
                params,
                code,
                receiver,
            } => {
                let imp = self.cfg.impairments;
                let msg = Word::from_slice(&bits);
                let tau0 = if imp.to {
                    rng.random_range(0..=self.n)
                } else {
                    0
                };
                let phi = if imp.cfo {
                    rng.random_range(0.0..TAU)
                } else {
                    0.0
                };
                let nobs = if imp.to { 2 * self.n } else { self.n };
                let word = match code {
                    Some(code) => code.encode(&msg)?,
                    None => msg,
                };
                let x = encode_symbol(&word, params)?;
                let mut obs = Vec::with_capacity(self.cfg.m);
                for _ in 0..self.cfg.m {
                    let ch = draw_channel(&self.cfg.channel, rng)?;
                    obs.push(transmit(&x, &ch, tau0, phi, n0, nobs, rng)?.samples);
                }
                let genie = Genie {
                    tau0: Some(tau0),
                    phi: Some(phi),
                };
                let r = receive_with_genie(&obs, receiver, n0, genie)?;
                c.bit_errors = msg.distance(&r.msg) as u64;
                c.to_errors = (imp.to && r.tau_hat != tau0) as u64;
                if imp.cfo {
                    // without a code only the fractional part is resolvable
                    let err = match code {
                        Some(_) => wrap_angle(r.phi_hat - phi),
                        None => {
                            let d = (r.theta_hat - phi).rem_euclid(params.theta_k);
                            d.min(params.theta_k - d)
                        }
                    };
                    c.cfo_errors = (err.abs() >= params.theta_k / self.cfg.q_cfo as f64) as u64;
                }
            }
        }
        c.block_errors = (c.bit_errors > 0) as u64;
        Ok(c)
    }

    fn run_point(&self, point: usize, snr_db: f64) -> Result<ResultRow> {
        let n0 = self.noise_variance(snr_db);
        let mut total = Counts::default();
        let mut start = 0;
        while start < self.cfg.trials {
            let end = (start + BATCH_SIZE).min(self.cfg.trials);
            let batch = (start..end)
                .into_par_iter()
                .map(|t| self.trial(n0, &mut trial_rng(self.cfg.seed, point, t)))
                .try_reduce(Counts::default, |a, b| Ok(a + b))?;
            total = total + batch;
            start = end;
            if self.cfg.max_block_errors > 0 && total.block_errors >= self.cfg.max_block_errors {
                break;
            }
        }
        let t = total.trials as f64;
        let (lo, hi) = wilson_interval(total.bit_errors, total.bits);
        Ok(ResultRow {
            snr_db,
            ber: total.bit_errors as f64 / total.bits as f64,
            bler: total.block_errors as f64 / t,
            to_error_rate: total.to_errors as f64 / t,
            cfo_error_rate: total.cfo_errors as f64 / t,
            trials: total.trials,
            ber_ci_lo: lo,
            ber_ci_hi: hi,
        })
    }

    /// Runs every SNR point in order on the current rayon pool.
    pub fn run(&self) -> Result<Vec<ResultRow>> {
        self.cfg
            .snr_db
            .iter()
            .enumerate()
            .map(|(i, &s)| self.run_point(i, s))
            .collect()
    }
}

/// Validates `cfg` and runs the sweep on the global rayon pool.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<ResultRow>> {
    Simulation::new(cfg.clone())?.run()
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(cfg: &SimConfig, threads: usize) -> Result<Vec<ResultRow>> {
    let sim = Simulation::new(cfg.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(|| sim.run())
}

pub const CSV_HEADER: &str = "snr_db,ber,bler,to_err,cfo_err,trials,ber_ci_lo,ber_ci_hi";

pub fn write_results_csv<W: Write>(mut w: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.ber,
            r.bler,
            r.to_error_rate,
            r.cfo_error_rate,
            r.trials,
            r.ber_ci_lo,
            r.ber_ci_hi
        )?;
    }
    Ok(())
}

/// SNR at which `values` (indexed like `snr_db`) first crosses `target`
/// from above, by linear interpolation of `log10(value)`.
pub fn crossing_point(snr_db: &[f64], values: &[f64], target: f64) -> Option<f64> {
    let lt = target.log10();
    for i in 0..snr_db.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if a >= target && b <= target {
            if b <= 0.0 {
                return Some(snr_db[i + 1]);
            }
            let (la, lb) = (a.log10(), b.log10());
            if la == lb {
                return Some(snr_db[i]);
            }
            let f = (la - lt) / (la - lb);
            return Some(snr_db[i] + f * (snr_db[i + 1] - snr_db[i]));
        }
    }
    None
}
