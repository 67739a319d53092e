use num_complex::Complex64;

use super::{plan_fft, BmoczParams};
use crate::error::{Error, Result};
use crate::gf2::Word;

/// A unit-energy Huffman sequence of length `K+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoczSymbol {
    pub coeffs: Vec<Complex64>,
}

impl MoczSymbol {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Zero positions `R^(2m_k - 1) e^{i2π(k-1)/K}` selected by `bits`.
pub fn zero_codeword(bits: &Word, params: &BmoczParams) -> Result<Vec<Complex64>> {
    if bits.len() != params.k {
        return Err(Error::LengthMismatch {
            expected: params.k,
            actual: bits.len(),
        });
    }
    Ok((0..params.k)
        .map(|k| {
            let radius = if bits.get(k) {
                params.r
            } else {
                1.0 / params.r
            };
            Complex64::from_polar(radius, params.theta_k * k as f64)
        })
        .collect())
}

/// Expands the zero codeword into polynomial coefficients (lowest degree
/// first), normalizes to unit energy, and rotates so that `x_0 > 0`.
///
/// The polynomial is evaluated in product form on the `K+1` roots of unity
/// and interpolated with one DFT; expanding the product factor by factor
/// loses all precision for large `K`.
pub fn encode_symbol(bits: &Word, params: &BmoczParams) -> Result<MoczSymbol> {
    let zeros = zero_codeword(bits, params)?;
    let len = params.k + 1;
    let step = std::f64::consts::TAU / len as f64;
    let mut x: Vec<Complex64> = (0..len)
        .map(|n| {
            let w = Complex64::from_polar(1.0, step * n as f64);
            zeros.iter().map(|&a| w - a).product()
        })
        .collect();
    plan_fft(len, false).process(&mut x);
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let phase = Complex64::from_polar(1.0, -x[0].arg());
    let scale = phase / norm;
    for c in &mut x {
        *c *= scale;
    }
    x[0] = Complex64::new(x[0].re, 0.0);
    Ok(MoczSymbol { coeffs: x })
}
