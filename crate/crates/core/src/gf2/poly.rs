//! Polynomials over GF(2).
//!
//! Coefficients are packed into 64-bit limbs, lowest degree first: bit `i`
//! of the packed representation is the coefficient of `x^i`. The packed
//! integer value `Σ c_i 2^i` is the canonical "integer encoding" used for
//! ordering and for hex output.

use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// A polynomial over GF(2) in canonical (trimmed) form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    // No trailing zero limbs; the zero polynomial is the empty vector.
    limbs: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { limbs: vec![1] }
    }

    /// `x^degree`.
    pub fn monomial(degree: usize) -> Self {
        let mut limbs = vec![0u64; degree / 64 + 1];
        limbs[degree / 64] = 1 << (degree % 64);
        Self { limbs }
    }

    /// Builds a polynomial from its integer encoding.
    pub fn from_u128(value: u128) -> Self {
        Self::from_limbs(vec![value as u64, (value >> 64) as u64])
    }

    /// Builds a polynomial from a coefficient list, lowest degree first.
    /// Any nonzero entry counts as a one.
    pub fn from_coeffs(coeffs: &[u8]) -> Self {
        let mut limbs = vec![0u64; coeffs.len().div_ceil(64)];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                limbs[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_limbs(limbs)
    }

    fn from_limbs(mut limbs: Vec<u64>) -> Self {
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
        Self { limbs }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.limbs.last()?;
        Some((self.limbs.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs
            .get(i / 64)
            .is_some_and(|limb| (limb >> (i % 64)) & 1 == 1)
    }

    /// Coefficients lowest degree first; empty for the zero polynomial.
    pub fn coeffs(&self) -> Vec<u8> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i) as u8).collect(),
        }
    }

    /// Integer encoding, if it fits into 128 bits.
    pub fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 | (self.limbs[1] as u128) << 64),
            _ => None,
        }
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Lowercase hexadecimal integer encoding without prefix, `"0"` for zero.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = format!("{:x}", self.limbs[self.limbs.len() - 1]);
        for limb in self.limbs.iter().rev().skip(1) {
            out.push_str(&format!("{limb:016x}"));
        }
        out
    }

    /// XORs `other · x^shift` into `self` (untrimmed).
    fn xor_shifted(limbs: &mut Vec<u64>, other: &[u64], shift: usize) {
        let (word, bit) = (shift / 64, shift % 64);
        let needed = other.len() + word + 1;
        if limbs.len() < needed {
            limbs.resize(needed, 0);
        }
        for (i, &o) in other.iter().enumerate() {
            limbs[i + word] ^= o << bit;
            if bit != 0 {
                limbs[i + word + 1] ^= o >> (64 - bit);
            }
        }
    }

    /// Euclidean division: returns `(q, r)` with `self = q·divisor + r` and
    /// `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let mut rem = self.limbs.clone();
        let mut quot = vec![0u64; self.limbs.len()];
        loop {
            let r = Gf2Poly::from_limbs(rem.clone());
            let Some(rd) = r.degree() else { break };
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot[shift / 64] |= 1 << (shift % 64);
            Self::xor_shifted(&mut rem, &divisor.limbs, shift);
        }
        Ok((Gf2Poly::from_limbs(quot), Gf2Poly::from_limbs(rem)))
    }

    pub fn rem(&self, divisor: &Gf2Poly) -> Result<Gf2Poly> {
        self.div_rem(divisor).map(|(_, r)| r)
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let n = self.limbs.len().max(rhs.limbs.len());
        let limbs = (0..n)
            .map(|i| self.limbs.get(i).unwrap_or(&0) ^ rhs.limbs.get(i).unwrap_or(&0))
            .collect();
        Gf2Poly::from_limbs(limbs)
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut acc = Vec::new();
        if let Some(d) = self.degree() {
            for i in (0..=d).filter(|&i| self.coeff(i)) {
                Gf2Poly::xor_shifted(&mut acc, &rhs.limbs, i);
            }
        }
        Gf2Poly::from_limbs(acc)
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly(0x{})", self.to_hex())
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return f.write_str("0");
        };
        let terms: Vec<String> = (0..=d)
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Field degrees with a Mersenne-prime block length `2^m - 1`.
pub const SUPPORTED_DEGREES: [usize; 4] = [2, 3, 5, 7];

/// All primitive polynomials of degree `m`, ascending by integer encoding.
pub fn primitive_polys(m: usize) -> Result<Vec<Gf2Poly>> {
    if !SUPPORTED_DEGREES.contains(&m) {
        return Err(Error::UnsupportedDegree(m));
    }
    let order = (1u64 << m) - 1;
    let factors = prime_factors(order);
    let polys = ((1u64 << m) + 1..1u64 << (m + 1))
        .step_by(2)
        .filter(|&p| is_irreducible(p, m))
        .filter(|&p| factors.iter().all(|&q| powmod_x(order / q, p, m) != 1))
        .map(|p| Gf2Poly::from_u128(p as u128))
        .collect();
    Ok(polys)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Small-degree helpers on integer-encoded polynomials (degree <= 31).

fn mulmod(a: u64, b: u64, p: u64, m: usize) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= p;
        }
    }
    acc
}

fn powmod_x(mut e: u64, p: u64, m: usize) -> u64 {
    let mut base = 2u64;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p, m);
        }
        base = mulmod(base, base, p, m);
        e >>= 1;
    }
    acc
}

fn is_irreducible(p: u64, m: usize) -> bool {
    let poly = Gf2Poly::from_u128(p as u128);
    (2u64..1 << (m / 2 + 1))
        .map(|d| Gf2Poly::from_u128(d as u128))
        .filter(|d| d.degree().is_some_and(|deg| deg >= 1 && deg <= m / 2))
        .all(|d| !poly.rem(&d).expect("nonzero divisor").is_zero())
}
