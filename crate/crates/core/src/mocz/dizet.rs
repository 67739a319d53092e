//! Direct zero testing and fractional CFO estimation.
//!
//! The received polynomial `Y(z) = Σ y_n z^n` is evaluated on the two
//! candidate circles at the `K` codebook angles. The FFT forms use an
//! unnormalized inverse DFT (kernel `e^{+i2πnj/len}`) of the radius-scaled
//! samples; samples beyond `len` are folded modulo `len`, which leaves the
//! values at the DFT bins unchanged, so any grid size is exact.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::BmoczParams;
use crate::gf2::Word;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// FFT plan from the per-thread planner cache.
pub(crate) fn plan_fft(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized inverse DFT of length `len` of `y_n r^n`.
pub fn scaled_idft(y: &[Complex64], r: f64, len: usize) -> Vec<Complex64> {
    assert!(len > 0, "DFT length must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (n, &v) in y.iter().enumerate() {
        buf[n % len] += v * r.powi(n as i32);
    }
    let fft = plan_fft(len, true);
    fft.process(&mut buf);
    buf
}

/// `conj(y_{N-1-n})`.
pub fn conj_reverse(y: &[Complex64]) -> Vec<Complex64> {
    y.iter().rev().map(|c| c.conj()).collect()
}

/// `y_n e^{inθ}`.
pub fn modulate(y: &[Complex64], theta: f64) -> Vec<Complex64> {
    y.iter()
        .enumerate()
        .map(|(n, &v)| v * Complex64::from_polar(1.0, theta * n as f64))
        .collect()
}

/// `y_n e^{-inθ}`.
pub fn derotate(y: &[Complex64], theta: f64) -> Vec<Complex64> {
    modulate(y, -theta)
}

fn horner(y: &[Complex64], z: Complex64) -> Complex64 {
    y.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Zero testing by direct polynomial evaluation: bit `k` is one iff
/// `|Y(R ω_k)| < R^(N-1) |Y(ω_k / R)|` with `ω_k = e^{i2πk/K}` and `N` the
/// length of `y`.
pub fn dizet_decode(y: &[Complex64], params: &BmoczParams) -> Word {
    assert!(!y.is_empty(), "empty observation");
    let weight = params.r.powi(y.len() as i32 - 1);
    let mut bits = Word::zeros(params.k);
    for k in 0..params.k {
        let w = Complex64::from_polar(1.0, params.theta_k * k as f64);
        let outer = horner(y, w * params.r).norm();
        let inner = horner(y, w / params.r).norm();
        bits.set(k, outer < weight * inner);
    }
    bits
}

/// Zero testing through two `QK`-point inverse DFTs sampled every `Q`-th
/// bin. Decisions match [`dizet_decode`].
pub fn dizet_decode_fft(y: &[Complex64], params: &BmoczParams, q: usize) -> Word {
    assert!(q >= 1, "oversampling must be at least 1");
    assert!(!y.is_empty(), "empty observation");
    let len = q * params.k;
    let weight = params.r.powi(y.len() as i32 - 1);
    let outer = scaled_idft(y, params.r, len);
    let inner = scaled_idft(y, 1.0 / params.r, len);
    let mut bits = Word::zeros(params.k);
    for k in 0..params.k {
        bits.set(k, outer[q * k].norm() < weight * inner[q * k].norm());
    }
    bits
}

/// Fractional CFO estimate on a grid of `Q` sub-bins per zero spacing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfoEstimate {
    pub q_hat: usize,
    /// `q_hat · θ_K / Q`.
    pub theta_hat: f64,
}

/// Picks the sub-bin `q` for which the received zeros sit closest to the
/// rotated codebook grid. For every angle `2π(Qk - q)/(QK)` the smaller of
/// the summed outer-circle magnitudes `Σ_m |Y_m(Rω)|` and the summed
/// conjugate-reversed magnitudes (equal to `R^(N-1) Σ_m |Y_m(ω/R)|`) is
/// accumulated; the smallest total wins, ties going to the smallest `q`.
/// A signal modulated by `e^{inφ}` with `φ = qθ_K/Q` yields `q_hat = q`.
pub fn estimate_fractional_cfo<Y: AsRef<[Complex64]>>(
    ys: &[Y],
    params: &BmoczParams,
    q: usize,
) -> CfoEstimate {
    assert!(q >= 1, "CFO grid size must be at least 1");
    assert!(!ys.is_empty(), "no antennas");
    let len = q * params.k;
    let mut outer = vec![0.0; len];
    let mut reversed = vec![0.0; len];
    for y in ys {
        let y = y.as_ref();
        let a = scaled_idft(y, params.r, len);
        let b = scaled_idft(&conj_reverse(y), params.r, len);
        for j in 0..len {
            outer[j] += a[j].norm();
            reversed[j] += b[j].norm();
        }
    }
    let mut best = (f64::INFINITY, 0);
    for shift in 0..q {
        let cost: f64 = (0..params.k)
            .map(|k| {
                let j = (q * k + len - shift) % len;
                outer[j].min(reversed[j])
            })
            .sum();
        if cost < best.0 {
            best = (cost, shift);
        }
    }
    CfoEstimate {
        q_hat: best.1,
        theta_hat: best.1 as f64 * params.theta_k / q as f64,
    }
}

/// Multi-antenna zero testing: bit `k` is one iff
/// `Σ_m |Y_m(R ω_k)|² < R^(2(N-1)) Σ_m |Y_m(ω_k / R)|²`.
pub fn simo_dizet_decode<Y: AsRef<[Complex64]>>(ys: &[Y], params: &BmoczParams) -> Word {
    assert!(!ys.is_empty(), "no antennas");
    let n = ys[0].as_ref().len();
    assert!(n > 0, "empty observation");
    let mut outer = vec![0.0; params.k];
    let mut inner = vec![0.0; params.k];
    for y in ys {
        let y = y.as_ref();
        assert_eq!(y.len(), n, "antenna windows must have equal length");
        let a = scaled_idft(y, params.r, params.k);
        let b = scaled_idft(y, 1.0 / params.r, params.k);
        for k in 0..params.k {
            outer[k] += a[k].norm_sqr();
            inner[k] += b[k].norm_sqr();
        }
    }
    let weight = params.r.powi(2 * (n as i32 - 1));
    let mut bits = Word::zeros(params.k);
    for k in 0..params.k {
        bits.set(k, outer[k] < weight * inner[k]);
    }
    bits
}
