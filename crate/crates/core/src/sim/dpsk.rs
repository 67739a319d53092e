//! Two-block OFDM differential 8-PSK reference scheme.
//!
//! The `N = K + L` samples are split into two OFDM blocks of `N/2` samples,
//! each with an `L-1` cyclic prefix. Block one carries all-one reference
//! symbols, block two the data phases `e^{i2πq/8}`; the receiver compares
//! the two blocks per subcarrier, so no channel knowledge is needed.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{complex_gaussian, convolve, draw_channel, ChannelProfile};
use crate::error::{Error, Result};
use crate::mocz::plan_fft;

const PSK_ORDER: usize = 8;
const BITS_PER_SYMBOL: usize = 3;

/// Block geometry of the differential OFDM scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpskParams {
    pub k: usize,
    pub l: usize,
    /// Samples per block including the prefix.
    pub n_dif: usize,
    /// Subcarriers per block.
    pub k_dif: usize,
}

impl DpskParams {
    /// Requires `K >= 3L - 2` and `K + L` even.
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if l == 0 || k + 2 < 3 * l || !(k + l).is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "differential OFDM needs K >= 3L-2 and K+L even (K={k}, L={l})"
            )));
        }
        let n_dif = (k + l) / 2;
        Ok(Self {
            k,
            l,
            n_dif,
            k_dif: n_dif - (l - 1),
        })
    }

    /// Message bits per packet.
    pub fn bits(&self) -> usize {
        BITS_PER_SYMBOL * self.k_dif
    }

    /// Transmit length `K + L`.
    pub fn len(&self) -> usize {
        2 * self.n_dif
    }

    pub fn is_empty(&self) -> bool {
        self.n_dif == 0
    }
}

fn unitary_dft(buf: &mut [Complex64], inverse: bool) {
    plan_fft(buf.len(), inverse).process(buf);
    let s = (buf.len() as f64).sqrt().recip();
    buf.iter_mut().for_each(|v| *v *= s);
}

fn phase_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .map(|(i, &b)| ((b & 1) as usize) << i)
        .sum()
}

/// Time-domain packet of length `K + L` with unit energy.
pub fn dpsk_modulate(bits: &[u8], params: &DpskParams) -> Result<Vec<Complex64>> {
    if bits.len() != params.bits() {
        return Err(Error::LengthMismatch {
            expected: params.bits(),
            actual: bits.len(),
        });
    }
    let reference = vec![Complex64::new(1.0, 0.0); params.k_dif];
    let data: Vec<Complex64> = bits
        .chunks(BITS_PER_SYMBOL)
        .map(|c| Complex64::from_polar(1.0, TAU * phase_index(c) as f64 / PSK_ORDER as f64))
        .collect();
    let mut out = Vec::with_capacity(params.len());
    for symbols in [reference, data] {
        let mut body = symbols;
        unitary_dft(&mut body, true);
        let cp = params.l - 1;
        out.extend_from_slice(&body[params.k_dif - cp..]);
        out.extend_from_slice(&body);
    }
    let norm = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    out.iter_mut().for_each(|c| *c /= norm);
    Ok(out)
}

/// Differential detection over all antennas.
pub fn dpsk_demodulate<Y: AsRef<[Complex64]>>(rx: &[Y], params: &DpskParams) -> Vec<u8> {
    let mut acc = vec![Complex64::new(0.0, 0.0); params.k_dif];
    let cp = params.l - 1;
    for y in rx {
        let y = y.as_ref();
        let block = |start: usize| -> Vec<Complex64> {
            let mut b: Vec<Complex64> = (start..start + params.k_dif)
                .map(|i| y.get(i).copied().unwrap_or_default())
                .collect();
            unitary_dft(&mut b, false);
            b
        };
        let r1 = block(cp);
        let r2 = block(params.n_dif + cp);
        for (a, (x1, x2)) in acc.iter_mut().zip(r1.iter().zip(&r2)) {
            *a += x2 * x1.conj();
        }
    }
    let mut bits = Vec::with_capacity(params.bits());
    for a in acc {
        let q = (a.arg() * PSK_ORDER as f64 / TAU).round() as i64;
        let q = q.rem_euclid(PSK_ORDER as i64) as usize;
        bits.extend((0..BITS_PER_SYMBOL).map(|i| ((q >> i) & 1) as u8));
    }
    bits
}

/// Sends `bits` through `m` independent channels with noise `N0` (no CFO,
/// no timing offset) and detects them.
pub fn dpsk_roundtrip<R: Rng + ?Sized>(
    bits: &[u8],
    params: &DpskParams,
    profile: &ChannelProfile,
    m: usize,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<u8>> {
    let x = dpsk_modulate(bits, params)?;
    let mut rx = Vec::with_capacity(m);
    for _ in 0..m {
        let ch = draw_channel(profile, rng)?;
        let mut y = convolve(&x, &ch.taps);
        if n0 > 0.0 {
            y.iter_mut().for_each(|s| *s += complex_gaussian(rng, n0));
        }
        rx.push(y);
    }
    Ok(dpsk_demodulate(&rx, params))
}
