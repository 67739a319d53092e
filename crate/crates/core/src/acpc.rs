//! Affine cyclically permutable code.
//!
//! Codewords are `c = msg·Gsys + g_out`, where `Gsys` generates the cyclic
//! code of `g = g_in·g_out` and `g_out` (the translation word) lies in the
//! outer code but not in the inner one. Every cyclic shift of a codeword is
//! again an outer codeword, and exactly one shift lands back in the affine
//! subcode, which identifies both the message and the shift.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf2::{CyclicCodeSet, Word};

/// Affine CPC over a [`CyclicCodeSet`].
#[derive(Clone, Debug)]
pub struct AcpcCode {
    set: CyclicCodeSet,
}

/// Output of [`AcpcCode::decode`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcpcDecoded {
    pub msg: Word,
    /// Right cyclic shift `l` such that the received word is
    /// `rotate(encode(msg), l)`.
    pub shift: usize,
    /// False when the outer syndrome had no table entry or when the number
    /// of shifts passing the inner check differs from one.
    pub reliable: bool,
}

impl AcpcCode {
    pub fn new(m: usize, j: usize) -> Result<Self> {
        Ok(Self {
            set: CyclicCodeSet::new(m, j)?,
        })
    }

    pub fn from_code_set(set: CyclicCodeSet) -> Self {
        Self { set }
    }

    pub fn code_set(&self) -> &CyclicCodeSet {
        &self.set
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }

    pub fn k(&self) -> usize {
        self.set.k()
    }

    pub fn m(&self) -> usize {
        self.set.m()
    }

    /// Message length.
    pub fn b(&self) -> usize {
        self.set.b()
    }

    /// Guaranteed correctable bit errors of the outer code.
    pub fn t(&self) -> usize {
        self.set.syndrome_table().correctable()
    }

    pub fn encode(&self, msg: &Word) -> Result<Word> {
        if msg.len() != self.b() {
            return Err(Error::LengthMismatch {
                expected: self.b(),
                actual: msg.len(),
            });
        }
        Ok(self.set.gsys().left_mul(msg) ^ self.set.g_out_word())
    }

    /// Corrects errors with the outer syndrome table, then searches the `n`
    /// cyclic shifts for the one whose translate lies in the inner code.
    /// When no single shift passes, the shift with the lightest inner
    /// syndrome (smallest on ties) is returned and flagged unreliable.
    pub fn decode(&self, v: &Word) -> Result<AcpcDecoded> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        let (corrected, table_hit) = match self.set.error_estimate(v) {
            Some(e) => (*v ^ e, true),
            None => (*v, false),
        };

        let g_out = self.set.g_out_word();
        let hsys = self.set.hsys();
        let mut passing = 0usize;
        let mut best: Option<(u32, usize, Word)> = None;
        for l in 0..n {
            let w = corrected.rotate(-(l as isize)) ^ g_out;
            let weight = hsys.syndrome(&w).count_ones();
            if weight == 0 {
                passing += 1;
            }
            if best.is_none_or(|(bw, _, _)| weight < bw) {
                best = Some((weight, l, w));
            }
        }
        let (_, shift, w) = best.expect("n >= 1");
        let b = self.b();
        let msg = Word::from_bits(w.bits() >> (n - b), b);
        Ok(AcpcDecoded {
            msg,
            shift,
            reliable: table_hit && passing == 1,
        })
    }
}

/// Number of cyclic equivalence classes of binary words of length `n`,
/// `(1/n) Σ_{d|n} φ(d) 2^(n/d)`.
pub fn crc_cardinality(n: u64) -> BigUint {
    assert!(n >= 1, "length must be positive");
    let mut sum = BigUint::from(0u32);
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        sum += BigUint::from(euler_phi(d)) << (n / d) as usize;
    }
    sum / BigUint::from(n)
}

/// Upper bound `(2^k - 2)/n` on the size of a cyclically permutable code
/// inside a cyclic `(n, k)` code of prime length.
pub fn cpc_bound(n: u64, k: u64) -> BigUint {
    ((BigUint::from(1u32) << k as usize) - 2u32) / BigUint::from(n)
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
