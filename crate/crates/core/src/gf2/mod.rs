//! Arithmetic over GF(2): polynomials, fixed-length words, and the nested
//! cyclic codes underlying the cyclically permutable code.

mod cyclic;
mod poly;
mod word;

pub use cyclic::{systematic_matrices, CyclicCodeSet, SyndromeTable};
pub use poly::{primitive_polys, Gf2Poly, SUPPORTED_DEGREES};
pub use word::{BitMatrix, Word, MAX_WORD_LEN};
