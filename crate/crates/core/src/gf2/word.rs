//! Short binary words and matrices over GF(2).
//!
//! Block lengths in this crate never exceed 127, so a word is a single
//! `u128` with bit `i` holding position `i` (the coefficient of `x^i` when
//! the word is read as a polynomial). Matrices act on row vectors:
//! `c = m·G` and syndromes are `s = v·Hᵀ`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_WORD_LEN: usize = 128;

/// A binary word of fixed length `len <= 128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u128,
    len: usize,
}

fn mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl Word {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_WORD_LEN, "word length {len} exceeds 128");
        Self { bits: 0, len }
    }

    pub fn ones(len: usize) -> Self {
        Self::from_bits(u128::MAX, len)
    }

    /// Truncates `bits` to the low `len` positions.
    pub fn from_bits(bits: u128, len: usize) -> Self {
        assert!(len <= MAX_WORD_LEN, "word length {len} exceeds 128");
        Self {
            bits: bits & mask(len),
            len,
        }
    }

    /// From a slice of 0/1 values, position 0 first.
    pub fn from_slice(bits: &[u8]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            w.set(i, b != 0);
        }
        w
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.bits ^= 1 << i;
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Cyclic shift to the right by `shift` positions (negative shifts go
    /// left): `out[j] = self[j - shift mod len]`. As a polynomial this is
    /// multiplication by `x^shift` modulo `x^len - 1`.
    pub fn rotate(&self, shift: isize) -> Self {
        if self.len == 0 {
            return *self;
        }
        let n = self.len;
        let s = shift.rem_euclid(n as isize) as usize;
        if s == 0 {
            return *self;
        }
        let bits = ((self.bits << s) | (self.bits >> (n - s))) & mask(n);
        Self { bits, len: n }
    }

    /// Hamming distance; lengths must match.
    pub fn distance(&self, other: &Word) -> u32 {
        debug_assert_eq!(self.len, other.len);
        (self.bits ^ other.bits).count_ones()
    }

    /// Lowercase hex of the integer encoding `Σ b_i 2^i`.
    pub fn to_hex(&self) -> String {
        format!("{:x}", self.bits)
    }

    /// Parses the integer encoding from hex (optional `0x` prefix).
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let digits = hex.trim().trim_start_matches("0x");
        let bits = u128::from_str_radix(digits, 16)
            .map_err(|_| Error::Parse(format!("invalid hex word '{hex}'")))?;
        if len > MAX_WORD_LEN || (len < 128 && bits >> len != 0) {
            return Err(Error::Parse(format!(
                "hex word '{hex}' does not fit into {len} bits"
            )));
        }
        Ok(Self::from_bits(bits, len))
    }
}

impl std::ops::BitXor for Word {
    type Output = Word;

    fn bitxor(self, rhs: Word) -> Word {
        debug_assert_eq!(self.len, rhs.len);
        Word {
            bits: self.bits ^ rhs.bits,
            len: self.len,
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "Word({s})")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A dense binary matrix stored as row words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<u128>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= MAX_WORD_LEN);
        Self {
            rows: vec![0; rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(c < self.cols);
        if value {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    pub fn row(&self, r: usize) -> Word {
        Word::from_bits(self.rows[r], self.cols)
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hcat(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows(), other.rows());
        let cols = self.cols + other.cols;
        assert!(cols <= MAX_WORD_LEN);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(&a, &b)| a | (b << self.cols))
            .collect();
        BitMatrix { rows, cols }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for r in 0..self.rows() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Row-vector product `v·M`; `v` has one bit per row.
    pub fn left_mul(&self, v: &Word) -> Word {
        assert_eq!(v.len(), self.rows(), "vector/matrix shape mismatch");
        let bits = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| v.get(*i))
            .fold(0u128, |acc, (_, &row)| acc ^ row);
        Word::from_bits(bits, self.cols)
    }

    /// `v·Mᵀ`, one output bit per row (the syndrome when `M` is a check
    /// matrix).
    pub fn syndrome(&self, v: &Word) -> u128 {
        debug_assert_eq!(v.len(), self.cols);
        self.rows.iter().enumerate().fold(0u128, |acc, (j, &row)| {
            acc | ((((row & v.bits()).count_ones() & 1) as u128) << j)
        })
    }

    /// Matrix product `self · other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows());
        let rows = (0..self.rows())
            .map(|r| other.left_mul(&self.row(r)).bits())
            .collect();
        BitMatrix {
            rows,
            cols: other.cols,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        for r in 0..self.rows() {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses a literal 0/1 string, position 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid bit character '{c}'"))),
            })
            .collect::<Result<_>>()?;
        if bits.len() > MAX_WORD_LEN {
            return Err(Error::Parse("bit string longer than 128".into()));
        }
        Ok(Word::from_slice(&bits))
    }
}
