//! Blind timing and effective channel length estimation.
//!
//! The received powers are correlated with the two-impulse Huffman bracket
//! (impulses at lags 0 and K), whose maximum marks the strongest path's
//! copy of the trident center. A back-stepping search then walks towards
//! earlier significant samples, and an energy detector on the samples
//! following the symbol picks how many channel taps to keep.

use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;

/// Output of [`synchronize`].
#[derive(Clone, Debug, PartialEq)]
pub struct SyncEstimate {
    pub tau_hat: usize,
    pub l_eff: usize,
    pub t_hat: usize,
    pub rho0: f64,
    /// Bracket correlation, length `Nobs + K`.
    pub d: Vec<f64>,
}

fn at(powers: &[f64], i: isize) -> f64 {
    if i < 0 {
        0.0
    } else {
        powers.get(i as usize).copied().unwrap_or(0.0)
    }
}

/// `|r_n|²` summed over antennas.
pub fn summed_powers<Y: AsRef<[Complex64]>>(ys: &[Y]) -> Vec<f64> {
    let n = ys.iter().map(|y| y.as_ref().len()).max().unwrap_or(0);
    let mut out = vec![0.0; n];
    for y in ys {
        for (o, s) in out.iter_mut().zip(y.as_ref()) {
            *o += s.norm_sqr();
        }
    }
    out
}

/// `d_n = |r_{n-K}|² + |r_n|²` for `n` in `[0, Nobs + K)`.
pub fn bracket_correlate(powers: &[f64], k: usize) -> Vec<f64> {
    (0..powers.len() + k)
        .map(|n| at(powers, n as isize - k as isize) + at(powers, n as isize))
        .collect()
}

/// `argmax_{t ∈ [K, Nobs)} d_t - K`, smallest index on ties; 0 if the range
/// is empty.
pub fn locate_center_peak(d: &[f64], k: usize, nobs: usize) -> usize {
    let mut best = (f64::NEG_INFINITY, k);
    for (t, &v) in d.iter().enumerate().take(nobs).skip(k) {
        if v > best.0 {
            best = (v, t);
        }
    }
    best.1 - k
}

/// `max(ρ/10, 10·N0)` with `ρ` the mean of `d` over `[t̂+K, t̂+2K]`.
pub fn peak_threshold(d: &[f64], k: usize, t_hat: usize, n0: f64) -> f64 {
    let start = (t_hat + k) as isize;
    let rho = (0..=k as isize).map(|j| at(d, start + j)).sum::<f64>() / (k + 1) as f64;
    (rho / 10.0).max(10.0 * n0)
}

/// Center-peak back-step: returns the farthest `t̂ - b`, `b ≤ ⌊K/2⌋`, whose
/// power exceeds `ρ0` while the `b` preceding-window powers sum to more
/// than `b·ρ0/(1 + ln(b)/3)`.
pub fn cpbs(powers: &[f64], rho0: f64, k: usize, t_hat: usize) -> usize {
    let mut tau_hat = t_hat;
    let mut window = 0.0;
    for b in 1..=k / 2 {
        let p = at(powers, t_hat as isize - b as isize);
        window += p;
        let bf = b as f64;
        if p > rho0 && window > bf * rho0 / (1.0 + bf.ln() / 3.0) && b <= t_hat {
            tau_hat = t_hat - b;
        }
    }
    tau_hat
}

/// Floor on the estimated post-symbol energy.
pub const CIRED_ENERGY_FLOOR: f64 = 1e-12;

/// CIR energy detection: collects samples after the symbol until the
/// fraction `μ = p^(L·N0/(2E_r))` of the estimated channel energy `E_r` is
/// reached, returning the number of samples used (at most `L`).
pub fn cired(powers: &[f64], tau_hat: usize, n0: f64, k: usize, l: usize, p: f64) -> usize {
    let base = (tau_hat + k + 1) as isize;
    let e_r = ((1..=l as isize).map(|j| at(powers, base + j)).sum::<f64>() - l as f64 * n0)
        .max(CIRED_ENERGY_FLOOR);
    let mu = p.powf(l as f64 * n0 / (2.0 * e_r));
    let mut e_eff = at(powers, base);
    let mut l_eff = 1;
    while e_eff < mu * e_r && l_eff < l {
        l_eff += 1;
        e_eff += at(powers, (tau_hat + k + l_eff) as isize);
    }
    l_eff
}

/// Hard-threshold presence test: any `d_t > 10·N0·K`.
pub fn detect_packet(d: &[f64], n0: f64, k: usize) -> bool {
    let threshold = 10.0 * n0 * k as f64;
    d.iter().any(|&v| v > threshold)
}

/// Full timing and length estimation on (summed) powers. `n0` is the noise
/// power of `powers`, i.e. `M·N0` for `M` summed antennas. The effective
/// length is clipped so the window `[τ̂, τ̂+K+L_eff)` stays inside the
/// observation.
pub fn synchronize(powers: &[f64], k: usize, l: usize, n0: f64, p: f64) -> SyncEstimate {
    let nobs = powers.len();
    let d = bracket_correlate(powers, k);
    let t_hat = locate_center_peak(&d, k, nobs);
    let rho0 = peak_threshold(&d, k, t_hat, n0);
    let tau_hat = cpbs(powers, rho0, k, t_hat);
    let room = nobs.saturating_sub(tau_hat + k).max(1);
    let l_eff = cired(powers, tau_hat, n0, k, l, p).min(room).max(1);
    SyncEstimate {
        tau_hat,
        l_eff,
        t_hat,
        rho0,
        d,
    }
}

/// One row of the synchronization diagnostic dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyncDiagRow {
    pub tau0: usize,
    pub tau_hat: usize,
    pub l_eff_true: usize,
    pub l_eff_hat: usize,
}

/// CSV with header `tau0,tauHat,lEffTrue,lEffHat`.
pub fn write_sync_diagnostics<W: Write>(mut w: W, rows: &[SyncDiagRow]) -> Result<()> {
    writeln!(w, "tau0,tauHat,lEffTrue,lEffHat")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.tau0, r.tau_hat, r.l_eff_true, r.l_eff_hat
        )?;
    }
    Ok(())
}
