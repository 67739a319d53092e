use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::MAX_WORD_LEN;

/// Geometry of the binary MOCZ codebook for `K` zeros.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmoczParams {
    /// Zeros per symbol, equal to the message bits per symbol.
    pub k: usize,
    /// Outer zero radius; inner zeros sit at `1/r`.
    pub r: f64,
    /// Side-lobe level of the Huffman autocorrelation, `1/(R^K + R^-K)`.
    pub eta: f64,
    /// Angular spacing of the zeros, `2π/K`.
    pub theta_k: f64,
}

impl BmoczParams {
    /// Codebook with the noise-robust radius `sqrt(1 + sin(π/K))`.
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("K={k} must be at least 2")));
        }
        Self::with_radius(k, (1.0 + (PI / k as f64).sin()).sqrt())
    }

    pub fn with_radius(k: usize, r: f64) -> Result<Self> {
        if !(2..=MAX_WORD_LEN).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "K={k} must lie in [2, {MAX_WORD_LEN}]"
            )));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius {r} must exceed 1")));
        }
        let rk = r.powi(k as i32);
        Ok(Self {
            k,
            r,
            eta: 1.0 / (rk + 1.0 / rk),
            theta_k: 2.0 * PI / k as f64,
        })
    }
}
