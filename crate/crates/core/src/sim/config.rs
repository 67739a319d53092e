use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelProfile;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Uncoded BMOCZ, `B = K`.
    Bmocz,
    /// BMOCZ carrying an affine cyclically permutable codeword.
    #[serde(alias = "bmoczAcpc")]
    BmoczAcpc,
    /// Two-block differential OFDM reference.
    #[serde(alias = "ofdmDpsk")]
    OfdmDpsk,
}

/// Unit of the SNR grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Expected received packet energy over expected noise energy in the
    /// `K + L` packet samples.
    Rsnr,
    /// Received SNR per message bit, `rSNR/B`.
    Ebn0,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Impairments {
    /// Random carrier offset `φ ~ U[0, 2π)`, estimated blindly.
    #[serde(default)]
    pub cfo: bool,
    /// Random timing offset `τ0 ~ U[0, N]` in a `2N` window, estimated
    /// blindly.
    #[serde(default)]
    pub to: bool,
}

fn default_m() -> usize {
    1
}
fn default_q() -> usize {
    16
}
fn default_trials() -> u64 {
    10_000
}
fn default_max_block_errors() -> u64 {
    500
}

/// Declarative description of one SNR sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// Zeros per symbol (BMOCZ) or the matching length parameter (OFDM).
    pub k: usize,
    /// Primitive factors in the outer generator (coded scheme only).
    #[serde(default)]
    pub outer_factors: Option<usize>,
    pub channel: ChannelProfile,
    /// Receive antennas.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Fractional CFO grid size.
    #[serde(default = "default_q")]
    pub q_cfo: usize,
    pub metric: Metric,
    /// SNR set points in dB.
    pub snr_db: Vec<f64>,
    /// Trials per SNR point.
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub impairments: Impairments,
    /// Stop a point after this many block errors; 0 disables.
    #[serde(default = "default_max_block_errors")]
    pub max_block_errors: u64,
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}
