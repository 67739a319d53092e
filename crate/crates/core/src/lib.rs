//! Binary modulation on conjugate-reciprocal zeros (BMOCZ).
//!
//! Zero-pattern encoding with Huffman sequences, direct zero-testing
//! decoding, a tapped-delay-line channel simulator, blind timing and
//! carrier-offset estimation, cyclically permutable coding for CFO
//! invariance, and a Monte-Carlo link simulator.

pub mod acpc;
pub mod channel;
pub mod error;
pub mod gf2;
pub mod mocz;
pub mod receiver;
pub mod sim;
pub mod sync;

pub use error::{Error, Result};
