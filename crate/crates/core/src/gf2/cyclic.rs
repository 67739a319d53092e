//! Nested binary cyclic codes at Mersenne-prime block lengths.
//!
//! For `n = 2^m - 1` prime, `x^n + 1` splits into `x + 1` and the
//! `S = (n-1)/m` primitive polynomials of degree `m`. The outer code is
//! generated by the product of the last `J` of them (canonical order), the
//! inner generator is the first one, and their product `g` generates the
//! linear part of the affine cyclically permutable code.

use std::collections::HashMap;

use super::poly::{primitive_polys, Gf2Poly};
use super::word::{BitMatrix, Word};
use crate::error::{Error, Result};

/// Check-bit count up to which the syndrome table covers every syndrome.
const FULL_TABLE_MAX_CHECK_BITS: usize = 20;
/// Upper bound on error patterns enumerated while building a table.
const TABLE_PATTERN_BUDGET: u64 = 60_000_000;

/// Coset-leader lookup for the outer code.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    leaders: Leaders,
    correctable: usize,
}

#[derive(Clone, Debug)]
enum Leaders {
    /// Indexed by syndrome; every syndrome has a leader.
    Full(Vec<u128>),
    /// Leaders of weight at most `correctable` only.
    Bounded(HashMap<u128, u128>),
}

impl SyndromeTable {
    /// Builds minimum-weight coset leaders, ties going to the smallest
    /// integer encoding. `columns[i]` is the syndrome of the unit word `e_i`.
    fn build(n: usize, check_bits: usize, columns: &[u128]) -> Result<Self> {
        let full = check_bits <= FULL_TABLE_MAX_CHECK_BITS;
        let mut full_table = if full {
            vec![u128::MAX; 1usize << check_bits]
        } else {
            Vec::new()
        };
        let mut bounded: HashMap<u128, u128> = HashMap::new();
        let total = 1u128 << check_bits;
        let mut filled: u128 = 1;
        if full {
            full_table[0] = 0;
        } else {
            bounded.insert(0, 0);
        }

        let mut collision_weight = None;
        let mut enumerated = 0u64;
        'weights: for w in 1..=n {
            if full && filled == total && collision_weight.is_some() {
                break;
            }
            let mut added_this_weight = Vec::new();
            for pattern in Combinations::new(n, w) {
                enumerated += 1;
                if enumerated > TABLE_PATTERN_BUDGET {
                    return Err(Error::TableTooLarge { n, check_bits });
                }
                let s = syndrome_of(pattern, columns);
                let present = if full {
                    full_table[s as usize] != u128::MAX
                } else {
                    bounded.contains_key(&s)
                };
                if present {
                    collision_weight.get_or_insert(w);
                    if full && filled == total {
                        break 'weights;
                    }
                    if !full {
                        for key in added_this_weight {
                            bounded.remove(&key);
                        }
                        break 'weights;
                    }
                } else if full {
                    full_table[s as usize] = pattern;
                    filled += 1;
                } else {
                    bounded.insert(s, pattern);
                    added_this_weight.push(s);
                }
            }
        }
        // A collision always exists because there are more words than syndromes.
        let correctable = collision_weight.map_or(n, |w| w - 1);
        let leaders = if full {
            Leaders::Full(full_table)
        } else {
            Leaders::Bounded(bounded)
        };
        Ok(Self {
            leaders,
            correctable,
        })
    }

    /// Coset leader for `syndrome`, if the table holds one.
    pub fn leader(&self, syndrome: u128) -> Option<u128> {
        match &self.leaders {
            Leaders::Full(t) => t.get(syndrome as usize).copied(),
            Leaders::Bounded(t) => t.get(&syndrome).copied(),
        }
    }

    /// Largest weight `t` such that every error of weight `<= t` has its own
    /// syndrome, i.e. `floor((d_min - 1) / 2)`.
    pub fn correctable(&self) -> usize {
        self.correctable
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.leaders, Leaders::Full(_))
    }

    pub fn len(&self) -> usize {
        match &self.leaders {
            Leaders::Full(t) => t.len(),
            Leaders::Bounded(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn syndrome_of(mut pattern: u128, columns: &[u128]) -> u128 {
    let mut s = 0;
    while pattern != 0 {
        let i = pattern.trailing_zeros() as usize;
        s ^= columns[i];
        pattern &= pattern - 1;
    }
    s
}

/// Weight-`w` subsets of `n` positions in increasing integer order
/// (Gosper's hack).
struct Combinations {
    next: Option<u128>,
    limit: u128,
}

impl Combinations {
    fn new(n: usize, w: usize) -> Self {
        let next = if w == 0 || w > n {
            None
        } else {
            Some(if w == 128 {
                u128::MAX
            } else {
                (1u128 << w) - 1
            })
        };
        Self {
            next,
            limit: if n >= 128 { u128::MAX } else { 1u128 << n },
        }
    }
}

impl Iterator for Combinations {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        let x = self.next?;
        let c = x & x.wrapping_neg();
        let r = x.checked_add(c);
        self.next = r.and_then(|r| {
            let nx = (((r ^ x) >> 2) / c) | r;
            (nx < self.limit).then_some(nx)
        });
        Some(x)
    }
}

/// The inner, outer and combined cyclic codes plus their systematic forms.
#[derive(Clone, Debug)]
pub struct CyclicCodeSet {
    n: usize,
    m: usize,
    j: usize,
    k: usize,
    b: usize,
    g_in: Gf2Poly,
    g_out: Gf2Poly,
    g: Gf2Poly,
    gsys: BitMatrix,
    hsys: BitMatrix,
    gout_sys: BitMatrix,
    hout_sys: BitMatrix,
    g_out_word: Word,
    syndrome_table: SyndromeTable,
}

/// Systematic generator `[P I_r]` and check matrix `[I_{n-r} Pᵀ]` of the
/// cyclic `(n, r)` code generated by `g`, where row `r - i` of `P` holds the
/// remainder of `x^(n-i)` modulo `g`.
pub fn systematic_matrices(n: usize, g: &Gf2Poly) -> Result<(BitMatrix, BitMatrix)> {
    let deg = g.degree().ok_or(Error::DivisionByZero)?;
    if deg > n {
        return Err(Error::InvalidParameter(format!(
            "generator degree {deg} exceeds block length {n}"
        )));
    }
    let r = n - deg;
    let mut p = BitMatrix::zeros(r, n - r);
    for i in 1..=r {
        let rem = Gf2Poly::monomial(n - i).rem(g)?;
        for (c, bit) in rem.coeffs().into_iter().enumerate() {
            p.set(r - i, c, bit == 1);
        }
    }
    let gen = p.hcat(&BitMatrix::identity(r));
    let check = BitMatrix::identity(n - r).hcat(&p.transpose());
    Ok((gen, check))
}

impl CyclicCodeSet {
    /// Builds the code set for field degree `m` and `J` outer factors.
    pub fn new(m: usize, j: usize) -> Result<Self> {
        let prims = primitive_polys(m)?;
        let n = (1usize << m) - 1;
        let s = prims.len();
        debug_assert_eq!(s, (n - 1) / m);
        if j == 0 || j >= s {
            return Err(Error::InvalidParameter(format!(
                "outer factor count J={j} must satisfy 1 <= J < S={s} for m={m}"
            )));
        }
        let g_in = prims[0].clone();
        let g_out = prims[s - j..]
            .iter()
            .fold(Gf2Poly::one(), |acc, p| &acc * p);
        let g = &g_in * &g_out;
        let k = n - j * m;
        let b = k - m;

        let (gsys, hsys) = systematic_matrices(n, &g)?;
        let (gout_sys, hout_sys) = systematic_matrices(n, &g_out)?;
        debug_assert_eq!(gsys.rows(), b);
        debug_assert_eq!(gout_sys.rows(), k);

        let mut g_out_word = Word::zeros(n);
        for (i, c) in g_out.coeffs().into_iter().enumerate() {
            g_out_word.set(i, c == 1);
        }

        if hout_sys.syndrome(&Word::ones(n)) != 0 {
            return Err(Error::Internal(
                "all-ones word is not an outer codeword".into(),
            ));
        }

        let columns: Vec<u128> = (0..n)
            .map(|i| {
                let mut e = Word::zeros(n);
                e.set(i, true);
                hout_sys.syndrome(&e)
            })
            .collect();
        let syndrome_table = SyndromeTable::build(n, n - k, &columns)?;

        Ok(Self {
            n,
            m,
            j,
            k,
            b,
            g_in,
            g_out,
            g,
            gsys,
            hsys,
            gout_sys,
            hout_sys,
            g_out_word,
            syndrome_table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn j(&self) -> usize {
        self.j
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn g_in(&self) -> &Gf2Poly {
        &self.g_in
    }
    pub fn g_out(&self) -> &Gf2Poly {
        &self.g_out
    }
    pub fn g(&self) -> &Gf2Poly {
        &self.g
    }
    /// `B × n` systematic generator of the code generated by `g`.
    pub fn gsys(&self) -> &BitMatrix {
        &self.gsys
    }
    /// `(n-B) × n` check matrix matching [`Self::gsys`].
    pub fn hsys(&self) -> &BitMatrix {
        &self.hsys
    }
    /// `k × n` systematic generator of the outer code.
    pub fn gout_sys(&self) -> &BitMatrix {
        &self.gout_sys
    }
    /// `(n-k) × n` check matrix of the outer code.
    pub fn hout_sys(&self) -> &BitMatrix {
        &self.hout_sys
    }
    /// Coefficients of `g_out`, zero-padded to length `n`.
    pub fn g_out_word(&self) -> Word {
        self.g_out_word
    }
    pub fn syndrome_table(&self) -> &SyndromeTable {
        &self.syndrome_table
    }

    pub fn outer_syndrome(&self, v: &Word) -> u128 {
        self.hout_sys.syndrome(v)
    }

    /// Error word for `v` from the syndrome table, `None` when the syndrome
    /// has no stored leader.
    pub fn error_estimate(&self, v: &Word) -> Option<Word> {
        let s = self.outer_syndrome(v);
        self.syndrome_table
            .leader(s)
            .map(|e| Word::from_bits(e, self.n))
    }

    /// Removes the coset leader of `v`'s syndrome. Syndromes without a
    /// stored leader leave `v` unchanged.
    pub fn syndrome_correct(&self, v: &Word) -> Word {
        assert_eq!(v.len(), self.n, "word length must equal n");
        match self.error_estimate(v) {
            Some(e) => *v ^ e,
            None => *v,
        }
    }
}
