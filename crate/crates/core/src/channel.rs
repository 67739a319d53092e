//! Tapped-delay-line channel: sparse exponentially decaying Rayleigh taps,
//! carrier frequency offset, timing offset and white Gaussian noise.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mocz::MoczSymbol;

/// Statistics of the channel impulse response.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelProfile {
    /// Maximum delay spread in taps.
    pub l: usize,
    /// Number of nonzero taps.
    pub s: usize,
    /// Power decay per tap, `E|h_l|² ∝ p^l`.
    pub p: f64,
    /// Always include the first tap in the support.
    #[serde(default)]
    pub los: bool,
}

impl ChannelProfile {
    /// All `L` taps active with a flat power profile.
    pub fn flat(l: usize) -> Self {
        Self {
            l,
            s: l,
            p: 1.0,
            los: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidParameter(
                "channel length L must be positive".into(),
            ));
        }
        if self.s == 0 || self.s > self.l {
            return Err(Error::InvalidParameter(format!(
                "support size S={} must lie in [1, L={}]",
                self.s, self.l
            )));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "decay p={} must lie in (0, 1]",
                self.p
            )));
        }
        Ok(())
    }
}

/// One draw of the channel impulse response.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<Complex64>,
    pub support: Vec<bool>,
}

impl ChannelRealization {
    /// Unit impulse of length `l`.
    pub fn impulse(l: usize) -> Self {
        let mut taps = vec![Complex64::new(0.0, 0.0); l.max(1)];
        taps[0] = Complex64::new(1.0, 0.0);
        let support = taps.iter().map(|t| t.norm_sqr() > 0.0).collect();
        Self { taps, support }
    }

    /// Taps given verbatim; support is the nonzero pattern.
    pub fn from_taps(taps: Vec<Complex64>) -> Self {
        let support = taps.iter().map(|t| t.norm_sqr() > 0.0).collect();
        Self { taps, support }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Circularly symmetric complex Gaussian sample with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Draws a support of size `S` uniformly (tap 0 forced under LOS) and
/// `CN(0, p^l)` taps on it, scaled by `1/sqrt(Σ_support p^l)`.
pub fn draw_channel<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    rng: &mut R,
) -> Result<ChannelRealization> {
    profile.validate()?;
    let l = profile.l;
    let mut support = vec![false; l];
    if profile.los {
        support[0] = true;
        for i in sample(rng, l - 1, profile.s - 1) {
            support[i + 1] = true;
        }
    } else {
        for i in sample(rng, l, profile.s) {
            support[i] = true;
        }
    }
    let mut taps = vec![Complex64::new(0.0, 0.0); l];
    let mut avg_power = 0.0;
    let mut power = 1.0;
    for (tap, &on) in taps.iter_mut().zip(&support) {
        if on {
            *tap = complex_gaussian(rng, power);
            avg_power += power;
        }
        power *= profile.p;
    }
    let scale = avg_power.sqrt().recip();
    for tap in &mut taps {
        *tap *= scale;
    }
    Ok(ChannelRealization { taps, support })
}

/// Linear convolution, output length `x.len() + h.len() - 1`.
pub fn convolve(x: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); x.len() + h.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in h.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Ground truth attached to an observation for scoring.
#[derive(Clone, Debug, PartialEq)]
pub struct Truth {
    pub tau0: usize,
    pub phi: f64,
    pub n0: f64,
    pub channel: ChannelRealization,
}

/// A received sample window with its hidden impairments.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub samples: Vec<Complex64>,
    pub truth: Truth,
}

/// Places `e^{inφ} (x∗h)[n - τ0]` into a window of `nobs` samples and adds
/// `CN(0, N0)` noise to every sample.
pub fn transmit<R: Rng + ?Sized>(
    x: &MoczSymbol,
    channel: &ChannelRealization,
    tau0: usize,
    phi: f64,
    n0: f64,
    nobs: usize,
    rng: &mut R,
) -> Result<Observation> {
    let packet = convolve(&x.coeffs, &channel.taps);
    transmit_samples(&packet, channel, tau0, phi, n0, nobs, rng)
}

/// [`transmit`] for an arbitrary already-convolved packet.
pub fn transmit_samples<R: Rng + ?Sized>(
    packet: &[Complex64],
    channel: &ChannelRealization,
    tau0: usize,
    phi: f64,
    n0: f64,
    nobs: usize,
    rng: &mut R,
) -> Result<Observation> {
    if tau0 + packet.len() > nobs {
        return Err(Error::WindowOverflow {
            tau0,
            needed: packet.len(),
            nobs,
        });
    }
    if n0.is_nan() || n0 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise density {n0} is negative"
        )));
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); nobs];
    for (i, &v) in packet.iter().enumerate() {
        let n = tau0 + i;
        samples[n] = v * Complex64::from_polar(1.0, phi * n as f64);
    }
    if n0 > 0.0 {
        for s in &mut samples {
            *s += complex_gaussian(rng, n0);
        }
    }
    Ok(Observation {
        samples,
        truth: Truth {
            tau0,
            phi,
            n0,
            channel: channel.clone(),
        },
    })
}

/// Per-sample noise variance for unit-energy symbols at received SNR
/// `rsnr_db`, where the received SNR is the expected packet energy over the
/// expected noise energy in the `n` packet samples.
pub fn n0_from_rsnr_db(rsnr_db: f64, n: usize) -> f64 {
    1.0 / (n as f64 * db_to_linear(rsnr_db))
}

/// Per-sample noise variance for `b` message bits in an `n`-sample packet,
/// with `E_b/N_0` taken as `rSNR/b`.
pub fn n0_from_ebn0_db(ebn0_db: f64, b: usize, n: usize) -> f64 {
    n0_from_rsnr_db(ebn0_db, n) / b as f64
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Smallest prefix length holding at least `fraction` of the tap energy.
pub fn energy_window(taps: &[Complex64], fraction: f64) -> usize {
    let total: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
    if total <= 0.0 {
        return taps.len().min(1);
    }
    let target = fraction * total;
    let mut acc = 0.0;
    for (i, t) in taps.iter().enumerate() {
        acc += t.norm_sqr();
        if acc >= target * (1.0 - 1e-12) {
            return i + 1;
        }
    }
    taps.len()
}

fn parse_pair(line: &str, lineno: usize) -> Result<(f64, f64)> {
    let mut it = line.split(',').map(str::trim);
    let mut next = |what: &str| -> Result<f64> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("line {lineno}: missing {what}")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("line {lineno}: {what}: {e}")))
    };
    Ok((next("re")?, next("im")?))
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#') || t.chars().next().is_some_and(|c| c.is_alphabetic())
}

/// Reads a CIR from CSV rows `re,im`. A header row and `#` comments are
/// skipped. With `normalize`, taps are scaled to unit energy.
pub fn read_cir_csv<R: BufRead>(reader: R, normalize: bool) -> Result<ChannelRealization> {
    let mut taps = Vec::new();
    for (lineno, line) in data_lines(reader) {
        let line = line?;
        if is_skippable(&line) {
            continue;
        }
        let (re, im) = parse_pair(&line, lineno)?;
        taps.push(Complex64::new(re, im));
    }
    if taps.is_empty() {
        return Err(Error::Parse("CIR file holds no taps".into()));
    }
    if normalize {
        let e: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        if e <= 0.0 {
            return Err(Error::Parse("CIR has zero energy".into()));
        }
        let s = e.sqrt().recip();
        taps.iter_mut().for_each(|t| *t *= s);
    }
    Ok(ChannelRealization::from_taps(taps))
}

/// Writes samples as CSV rows `n,re,im` with a header.
pub fn write_observation_csv<W: Write>(mut w: W, samples: &[Complex64]) -> Result<()> {
    writeln!(w, "n,re,im")?;
    for (n, s) in samples.iter().enumerate() {
        writeln!(w, "{n},{:e},{:e}", s.re, s.im)?;
    }
    Ok(())
}

/// Reads CSV rows `n,re,im`; rows must be in index order starting at 0.
pub fn read_observation_csv<R: BufRead>(reader: R) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in data_lines(reader) {
        let line = line?;
        if is_skippable(&line) {
            continue;
        }
        let (idx, rest) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected n,re,im")))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {lineno}: index: {e}")))?;
        if idx != out.len() {
            return Err(Error::Parse(format!(
                "line {lineno}: expected sample index {}, found {idx}",
                out.len()
            )));
        }
        let (re, im) = parse_pair(rest, lineno)?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}
