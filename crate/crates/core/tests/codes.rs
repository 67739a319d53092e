//! Code construction and ACPC decoding against independent oracles.

use std::collections::BTreeSet;

use bmocz::acpc::{cpc_bound, crc_cardinality, AcpcCode};
use bmocz::gf2::{primitive_polys, systematic_matrices, CyclicCodeSet, Gf2Poly, Word};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// oracles
// ---------------------------------------------------------------------------

fn schoolbook_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= x & y;
        }
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Multiplicative order of `x` modulo `p` (degree `m`), by stepping.
fn order_of_x(p: u64, m: usize) -> u64 {
    let mut v = 2u64;
    let mut order = 1;
    while v != 1 {
        v <<= 1;
        if v >> m & 1 == 1 {
            v ^= p;
        }
        order += 1;
        if order > 1 << m {
            return 0;
        }
    }
    order
}

fn brute_primitive(m: usize) -> Vec<u64> {
    let n = (1u64 << m) - 1;
    (1u64 << m..1u64 << (m + 1))
        .filter(|&p| p & 1 == 1 && order_of_x(p, m) == n)
        .collect()
}

fn poly_divides(word: &Word, g: &Gf2Poly) -> bool {
    Gf2Poly::from_coeffs(&word.to_vec())
        .rem(g)
        .unwrap()
        .is_zero()
}

fn parity(a: u128, b: u128) -> u32 {
    (a & b).count_ones() & 1
}

fn necklaces_brute(n: u32) -> u64 {
    let mask = (1u64 << n) - 1;
    (0..1u64 << n)
        .filter(|&w| {
            (1..n).all(|s| {
                let r = ((w >> s) | (w << (n - s))) & mask;
                r >= w
            })
        })
        .count() as u64
}

const CODE_PARAMS: [(usize, usize); 5] = [(3, 1), (5, 2), (5, 3), (5, 4), (7, 2)];

// ---------------------------------------------------------------------------
// polynomials
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn product_matches_schoolbook(
        a in proptest::collection::vec(0u8..2, 0..150),
        b in proptest::collection::vec(0u8..2, 0..150),
    ) {
        let prod = &Gf2Poly::from_coeffs(&a) * &Gf2Poly::from_coeffs(&b);
        prop_assert_eq!(prod.coeffs(), schoolbook_mul(&a, &b));
    }

    #[test]
    fn division_identity(
        a in proptest::collection::vec(0u8..2, 0..200),
        mut b in proptest::collection::vec(0u8..2, 1..80),
    ) {
        b.push(1);
        let (a, b) = (Gf2Poly::from_coeffs(&a), Gf2Poly::from_coeffs(&b));
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
    }
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(Gf2Poly::one().div_rem(&Gf2Poly::zero()).is_err());
}

#[test]
fn primitive_polynomials_match_order_search() {
    for m in [2, 3, 5, 7] {
        let ours: Vec<u64> = primitive_polys(m)
            .unwrap()
            .iter()
            .map(|p| p.to_u128().unwrap() as u64)
            .collect();
        assert_eq!(ours, brute_primitive(m), "m = {m}");
        assert_eq!(ours.len(), ((1 << m) - 2) / m);
    }
    assert!(primitive_polys(4).is_err());
}

#[test]
fn primitive_factors_times_x_plus_one_give_xn_plus_one() {
    for m in [3, 5, 7] {
        let n = (1usize << m) - 1;
        let prod = primitive_polys(m)
            .unwrap()
            .iter()
            .fold(Gf2Poly::from_u128(0b11), |acc, p| &acc * p);
        assert_eq!(prod, &Gf2Poly::monomial(n) + &Gf2Poly::one(), "m = {m}");
    }
}

// ---------------------------------------------------------------------------
// code set
// ---------------------------------------------------------------------------

#[test]
fn generator_rows_are_orthogonal_to_checks() {
    for (m, j) in CODE_PARAMS {
        let set = CyclicCodeSet::new(m, j).unwrap();
        for (g, h) in [(set.gsys(), set.hsys()), (set.gout_sys(), set.hout_sys())] {
            assert_eq!(g.cols(), set.n());
            assert_eq!(g.rows() + h.rows(), set.n());
            for r in 0..g.rows() {
                for c in 0..h.rows() {
                    assert_eq!(
                        parity(g.row(r).bits(), h.row(c).bits()),
                        0,
                        "(m,J)=({m},{j})"
                    );
                }
            }
        }
    }
}

#[test]
fn generator_rows_are_multiples_of_the_generator_polynomial() {
    for (m, j) in CODE_PARAMS {
        let set = CyclicCodeSet::new(m, j).unwrap();
        for r in 0..set.gsys().rows() {
            assert!(poly_divides(&set.gsys().row(r), set.g()));
        }
        for r in 0..set.gout_sys().rows() {
            assert!(poly_divides(&set.gout_sys().row(r), set.g_out()));
        }
    }
}

#[test]
fn dimensions_and_factor_choice() {
    for (m, j) in CODE_PARAMS {
        let set = CyclicCodeSet::new(m, j).unwrap();
        let prims = primitive_polys(m).unwrap();
        let n = (1 << m) - 1;
        assert_eq!(set.n(), n);
        assert_eq!(set.k(), n - j * m);
        assert_eq!(set.b(), n - (j + 1) * m);
        assert_eq!(set.g_in(), &prims[0]);
        let tail = prims[prims.len() - j..]
            .iter()
            .fold(Gf2Poly::one(), |a, p| &a * p);
        assert_eq!(set.g_out(), &tail);
        assert_eq!(set.g(), &(set.g_in() * set.g_out()));
    }
    let set = CyclicCodeSet::new(5, 4).unwrap();
    assert_eq!((set.n(), set.k(), set.b()), (31, 11, 6));
    let set = CyclicCodeSet::new(5, 2).unwrap();
    assert_eq!((set.n(), set.k(), set.b()), (31, 21, 16));
}

#[test]
fn out_of_range_factor_counts_are_rejected() {
    assert!(CyclicCodeSet::new(5, 0).is_err());
    assert!(CyclicCodeSet::new(5, 6).is_err());
    assert!(CyclicCodeSet::new(3, 2).is_err());
    assert!(CyclicCodeSet::new(4, 1).is_err());
}

#[test]
fn inner_code_is_a_subcode_of_the_outer_code() {
    for (m, j) in CODE_PARAMS {
        let set = CyclicCodeSet::new(m, j).unwrap();
        for r in 0..set.gsys().rows() {
            assert_eq!(set.outer_syndrome(&set.gsys().row(r)), 0);
        }
        assert_eq!(set.outer_syndrome(&Word::ones(set.n())), 0);
    }
}

/// Brute-force minimum distance of the outer code for small dimensions.
fn outer_min_distance(set: &CyclicCodeSet) -> u32 {
    let k = set.gout_sys().rows();
    let mut best = u32::MAX;
    for msg in 1u128..1 << k {
        let w = set.gout_sys().left_mul(&Word::from_bits(msg, k));
        best = best.min(w.weight());
    }
    best
}

#[test]
fn correcting_radius_follows_minimum_distance() {
    for (m, j) in [(3, 1), (5, 3), (5, 4)] {
        let set = CyclicCodeSet::new(m, j).unwrap();
        let d = outer_min_distance(&set);
        assert_eq!(
            set.syndrome_table().correctable() as u32,
            (d - 1) / 2,
            "(m,J)=({m},{j})"
        );
    }
}

#[test]
fn systematic_matrices_for_the_hamming_code() {
    let g = Gf2Poly::from_u128(0b1011);
    let (gen, check) = systematic_matrices(7, &g).unwrap();
    assert_eq!((gen.rows(), check.rows()), (4, 3));
    let words: BTreeSet<u128> = (0..16u128)
        .map(|m| gen.left_mul(&Word::from_bits(m, 4)).bits())
        .collect();
    assert_eq!(words.len(), 16);
    for &w in &words {
        assert!(poly_divides(&Word::from_bits(w, 7), &g));
    }
    assert!(systematic_matrices(3, &Gf2Poly::monomial(4)).is_err());
}

proptest! {
    #[test]
    fn codewords_stay_codewords_under_rotation(msg in any::<u64>(), shift in 0isize..31) {
        let set = CyclicCodeSet::new(5, 2).unwrap();
        let c = set.gsys().left_mul(&Word::from_bits(msg as u128, set.b()));
        prop_assert_eq!(set.hsys().syndrome(&c.rotate(shift)), 0);
    }
}

// ---------------------------------------------------------------------------
// cardinalities
// ---------------------------------------------------------------------------

#[test]
fn cyclic_classes_match_brute_force() {
    for n in 1..=16u32 {
        assert_eq!(
            crc_cardinality(n as u64),
            BigUint::from(necklaces_brute(n)),
            "n = {n}"
        );
    }
}

#[test]
fn cyclic_classes_prime_formula() {
    for n in [3u32, 7, 31, 127] {
        let expected = ((BigUint::from(1u32) << n as usize) + BigUint::from(2 * (n - 1))) / n;
        assert_eq!(crc_cardinality(n as u64), expected);
    }
    assert_eq!(crc_cardinality(3), BigUint::from(4u32));
    assert_eq!(crc_cardinality(31), BigUint::from(69_273_668u64));
}

#[test]
fn cpc_bound_values() {
    assert_eq!(cpc_bound(31, 21), BigUint::from(67_650u32));
    assert_eq!(cpc_bound(7, 4), BigUint::from(2u32));
}

// ---------------------------------------------------------------------------
// ACPC
// ---------------------------------------------------------------------------

#[test]
fn acpc_exhaustive_n7() {
    let code = AcpcCode::new(3, 1).unwrap();
    assert_eq!(code.t(), 1);
    for msg in 0..1u128 << code.b() {
        let msg = Word::from_bits(msg, code.b());
        let c = code.encode(&msg).unwrap();
        for shift in 0..7 {
            let rotated = c.rotate(shift as isize);
            for flip in std::iter::once(None).chain((0..7).map(Some)) {
                let mut v = rotated;
                if let Some(i) = flip {
                    v.flip(i);
                }
                let d = code.decode(&v).unwrap();
                assert_eq!(d.msg, msg);
                assert_eq!(d.shift, shift);
                assert!(d.reliable);
            }
        }
    }
}

fn random_roundtrips(m: usize, j: usize, trials: usize, seed: u64) {
    let code = AcpcCode::new(m, j).unwrap();
    let n = code.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let msg = Word::from_bits(rng.random::<u128>(), code.b());
        let shift = rng.random_range(0..n);
        let errors = rng.random_range(0..=code.t());
        let mut v = code.encode(&msg).unwrap().rotate(shift as isize);
        for i in sample(&mut rng, n, errors) {
            v.flip(i);
        }
        let d = code.decode(&v).unwrap();
        assert_eq!((d.msg, d.shift), (msg, shift), "(m,J)=({m},{j})");
    }
}

#[test]
fn acpc_random_roundtrip_n31() {
    for j in [2, 3, 4] {
        random_roundtrips(5, j, 1000, j as u64);
    }
}

#[test]
fn acpc_random_roundtrip_n127() {
    random_roundtrips(7, 2, 300, 11);
}

#[test]
fn acpc_codewords_have_distinct_rotations() {
    let code = AcpcCode::new(5, 4).unwrap();
    let mut seen = BTreeSet::new();
    for msg in 0..1u128 << code.b() {
        let c = code.encode(&Word::from_bits(msg, code.b())).unwrap();
        for s in 0..31 {
            assert!(seen.insert(c.rotate(s).bits()), "rotation collision");
        }
    }
    assert_eq!(seen.len(), 31 << code.b());
}

#[test]
fn acpc_message_length_is_checked() {
    let code = AcpcCode::new(5, 4).unwrap();
    assert!(code.encode(&Word::zeros(5)).is_err());
    assert!(code.decode(&Word::zeros(30)).is_err());
}
