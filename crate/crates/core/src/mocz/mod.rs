//! Binary modulation on conjugate-reciprocal zeros.

mod dizet;
mod params;
mod symbol;

pub(crate) use dizet::plan_fft;
pub use dizet::{
    conj_reverse, derotate, dizet_decode, dizet_decode_fft, estimate_fractional_cfo, modulate,
    scaled_idft, simo_dizet_decode, CfoEstimate,
};
pub use params::BmoczParams;
pub use symbol::{encode_symbol, zero_codeword, MoczSymbol};
