//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Lines marked INFO are diagnostics, not criteria.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bmocz::acpc::{crc_cardinality, AcpcCode};
use bmocz::channel::*;
use bmocz::gf2::{CyclicCodeSet, Word};
use bmocz::mocz::*;
use bmocz::receiver::*;
use bmocz::sim::*;
use bmocz::sync::{summed_powers, synchronize};
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MINUTE: Duration = Duration::from_secs(60);

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, detail: String) {
        println!("INFO {id}: {detail}");
    }
}

fn random_word<R: Rng>(rng: &mut R, k: usize) -> Word {
    Word::from_bits(rng.random::<u128>(), k)
}

fn autocorrelation(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..2 * n - 1)
        .map(|lag| {
            (0..n)
                .filter_map(|i| {
                    let j = i as isize + n as isize - 1 - lag as isize;
                    (0..n as isize)
                        .contains(&j)
                        .then(|| x[i] * x[j as usize].conj())
                })
                .sum()
        })
        .collect()
}

fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn algebraic_identities(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_acf = 0.0f64;
    let mut worst_iso = 0.0f64;
    for k in [7, 31, 127] {
        let p = BmoczParams::new(k).unwrap();
        for _ in 0..1000 {
            let x = encode_symbol(&random_word(&mut rng, k), &p).unwrap();
            for (lag, v) in autocorrelation(&x.coeffs).iter().enumerate() {
                let want = if lag == k {
                    1.0
                } else if lag == 0 || lag == 2 * k {
                    -p.eta
                } else {
                    0.0
                };
                worst_acf = worst_acf.max((v - want).norm());
            }
            let l = rng.random_range(1..=k);
            let h: Vec<Complex64> = (0..l).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let eh = energy(&h);
            worst_iso = worst_iso.max((energy(&convolve(&x.coeffs, &h)) - eh).abs() / eh);
        }
    }
    let mut orthogonal = true;
    for (m, j) in [(3, 1), (5, 2), (5, 3), (5, 4), (7, 2)] {
        let set = CyclicCodeSet::new(m, j).unwrap();
        orthogonal &= set.gsys().mul(&set.hsys().transpose()).is_zero();
        orthogonal &= set.gout_sys().mul(&set.hout_sys().transpose()).is_zero();
    }
    let elapsed = start.elapsed();
    report.check(
        "1 algebraic identities",
        worst_acf < 1e-9 && worst_iso < 1e-9 && orthogonal && elapsed < MINUTE,
        format!(
            "autocorrelation err {worst_acf:.2e}, isometry rel err {worst_iso:.2e}, \
             G*H^T zero {orthogonal}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

fn necklaces_brute(n: u32) -> u64 {
    let mask = (1u32 << n) - 1;
    (0..1u32 << n)
        .filter(|&w| (1..n).all(|s| ((w << s | w >> (n - s)) & mask) >= w))
        .count() as u64
}

fn codec_oracles(report: &mut Report) {
    let mut failures = 0u64;
    let mut cases = 0u64;

    let code = AcpcCode::new(3, 1).unwrap();
    for msg in 0..1u128 << code.b() {
        let msg = Word::from_bits(msg, code.b());
        let c = code.encode(&msg).unwrap();
        for shift in 0..7 {
            for flip in std::iter::once(None).chain((0..7).map(Some)) {
                let mut v = c.rotate(shift as isize);
                if let Some(i) = flip {
                    v.flip(i);
                }
                let d = code.decode(&v).unwrap();
                cases += 1;
                failures += (d.msg != msg || d.shift != shift) as u64;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (m, j) in [(5, 2), (5, 3), (5, 4), (7, 2)] {
        let code = AcpcCode::new(m, j).unwrap();
        let n = code.n();
        for _ in 0..10_000 {
            let msg = random_word(&mut rng, code.b());
            let shift = rng.random_range(0..n);
            let mut v = code.encode(&msg).unwrap().rotate(shift as isize);
            let errors = rng.random_range(0..=code.t());
            for i in sample(&mut rng, n, errors) {
                v.flip(i);
            }
            let d = code.decode(&v).unwrap();
            cases += 1;
            failures += (d.msg != msg || d.shift != shift) as u64;
        }
    }

    let classes_ok =
        (1..=16).all(|n| crc_cardinality(n) == BigUint::from(necklaces_brute(n as u32)));
    let small = crc_cardinality(3) == BigUint::from(4u32);
    let n31 = crc_cardinality(31) == BigUint::from((1u64 << 31) + 60) / BigUint::from(31u32);
    report.check(
        "2 codec oracles",
        failures == 0 && classes_ok && small && n31,
        format!(
            "{failures}/{cases} roundtrip failures, classes n<=16 {classes_ok}, \
             crc(3)=4 {small}, crc(31) {n31}"
        ),
    );
}

fn decoder_equivalence(report: &mut Report) {
    let start = Instant::now();
    let k = 31;
    let p = BmoczParams::new(k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for l in [1, 16, 32] {
        let n0 = n0_from_rsnr_db(5.0, k + l);
        for _ in 0..1000 {
            let x = encode_symbol(&random_word(&mut rng, k), &p).unwrap();
            let ch = draw_channel(&ChannelProfile::flat(l), &mut rng).unwrap();
            let y = transmit(&x, &ch, 0, 0.0, n0, k + l, &mut rng)
                .unwrap()
                .samples;
            mismatches += (dizet_decode(&y, &p) != dizet_decode_fft(&y, &p, 1)) as u32;
        }
    }
    let elapsed = start.elapsed();
    report.check(
        "3 decoder equivalence",
        mismatches == 0 && elapsed < MINUTE,
        format!(
            "{mismatches}/3000 mismatches, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

fn noiseless_blind_pipeline(report: &mut Report) {
    let (k, l) = (31, 31);
    let n = k + l;
    let code = Arc::new(AcpcCode::new(5, 4).unwrap());
    let params = BmoczParams::new(k).unwrap();
    let cfg = ReceiverConfig::new(params, Some(code.clone()), l).unwrap();
    let n0 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 1000;
    let (mut ok, mut timing_ok) = (0, 0);
    for _ in 0..trials {
        let msg = random_word(&mut rng, code.b());
        let x = encode_symbol(&code.encode(&msg).unwrap(), &params).unwrap();
        let tau0 = rng.random_range(0..=n);
        let phi = rng.random_range(0.0..TAU);
        let ch = draw_channel(&ChannelProfile::flat(l), &mut rng).unwrap();
        let obs = transmit(&x, &ch, tau0, phi, n0, 2 * n, &mut rng).unwrap();
        let d = receive(&[obs.samples], &cfg, n0).unwrap();
        ok += (d.msg == msg) as u32;
        timing_ok += (d.tau_hat == tau0) as u32;
    }
    let rate = ok as f64 / trials as f64;
    report.check(
        "4 noiseless blind pipeline",
        rate >= 0.99,
        format!(
            "recovery {rate:.3} (target >= 0.99), exact timing {:.3}",
            timing_ok as f64 / trials as f64
        ),
    );
}

fn grid(lo: i32, hi: i32, step: i32) -> Vec<f64> {
    (lo..=hi).step_by(step as usize).map(f64::from).collect()
}

fn coded_config(outer_factors: usize, impairments: Impairments) -> SimConfig {
    SimConfig {
        scheme: Scheme::BmoczAcpc,
        k: 31,
        outer_factors: Some(outer_factors),
        channel: ChannelProfile::flat(16),
        m: 1,
        q_cfo: 16,
        metric: Metric::Rsnr,
        snr_db: grid(0, 20, 1),
        trials: 10_000,
        seed: 51,
        impairments,
        max_block_errors: 0,
    }
}

fn bler_crossing(cfg: &SimConfig) -> Option<f64> {
    let rows = run_sweep(cfg).unwrap();
    let bler: Vec<f64> = rows.iter().map(|r| r.bler).collect();
    crossing_point(&cfg.snr_db, &bler, 0.1)
}

fn fmt_db(x: Option<f64>) -> String {
    x.map_or("none in 0..20 dB".into(), |v| format!("{v:.2} dB"))
}

fn curve_reproduction(report: &mut Report) {
    let both = Impairments {
        cfo: true,
        to: true,
    };
    let cfo_only = Impairments {
        cfo: true,
        to: false,
    };

    let low_rate = bler_crossing(&coded_config(4, both));
    report.check(
        "5a BLER 0.1 crossing, ACPC-(31,6)",
        low_rate.is_some_and(|x| (4.5..=7.5).contains(&x)),
        format!("{} (target 4.5..7.5 dB), CFO and TO on", fmt_db(low_rate)),
    );

    let high_rate = bler_crossing(&coded_config(2, both));
    let gap = low_rate.zip(high_rate).map(|(a, b)| b - a);
    report.check(
        "5b rate 16/31 vs 6/31 gap",
        gap.is_some_and(|g| (g - 6.0).abs() <= 2.0),
        format!(
            "{} vs {}, gap {} (target 6 +- 2 dB), CFO and TO on",
            fmt_db(high_rate),
            fmt_db(low_rate),
            gap.map_or("undefined".into(), |g| format!("{g:.2} dB"))
        ),
    );

    let low_cfo = bler_crossing(&coded_config(4, cfo_only));
    let high_cfo = bler_crossing(&coded_config(2, cfo_only));
    report.info(
        "5a/5b CFO only",
        format!(
            "ACPC-(31,6) {}, ACPC-(31,16) {}, gap {}",
            fmt_db(low_cfo),
            fmt_db(high_cfo),
            low_cfo
                .zip(high_cfo)
                .map_or("undefined".into(), |(a, b)| format!("{:.2} dB", b - a))
        ),
    );

    let ber_crossing = |l: usize| {
        let cfg = SimConfig {
            scheme: Scheme::Bmocz,
            outer_factors: None,
            channel: ChannelProfile::flat(l),
            metric: Metric::Ebn0,
            snr_db: grid(-10, 20, 1),
            impairments: Impairments::default(),
            ..coded_config(4, Impairments::default())
        };
        let rows = run_sweep(&cfg).unwrap();
        let ber: Vec<f64> = rows.iter().map(|r| r.ber).collect();
        crossing_point(&cfg.snr_db, &ber, 1e-2)
    };
    let (flat_k, flat_1) = (ber_crossing(31), ber_crossing(1));
    let loss = flat_k.zip(flat_1).map(|(a, b)| a - b);
    report.check(
        "5c uncoded L=K vs L=1 loss at BER 1e-2",
        loss.is_some_and(|d| (d - 3.0).abs() <= 1.5),
        format!(
            "Eb/N0 {} vs {}, loss {} (target 3 +- 1.5 dB)",
            fmt_db(flat_k),
            fmt_db(flat_1),
            loss.map_or("undefined".into(), |d| format!("{d:.2} dB"))
        ),
    );

    let simo: Vec<Vec<f64>> = [1, 2, 4]
        .into_iter()
        .map(|m| {
            let cfg = SimConfig {
                scheme: Scheme::Bmocz,
                k: 127,
                outer_factors: None,
                channel: ChannelProfile {
                    l: 127,
                    s: 42,
                    p: 0.95,
                    los: true,
                },
                m,
                snr_db: grid(0, 20, 2),
                trials: 10_000,
                impairments: Impairments::default(),
                ..coded_config(4, Impairments::default())
            };
            run_sweep(&cfg).unwrap().iter().map(|r| r.ber).collect()
        })
        .collect();
    let ordered = (0..simo[0].len()).all(|i| simo[2][i] < simo[1][i] && simo[1][i] < simo[0][i]);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|b| format!("{b:.1e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    report.check(
        "5d SIMO monotonicity",
        ordered,
        format!(
            "BER M=1 [{}] M=2 [{}] M=4 [{}]",
            fmt(&simo[0]),
            fmt(&simo[1]),
            fmt(&simo[2])
        ),
    );
}

fn sync_properties(report: &mut Report) {
    let (k, l) = (31, 16);
    let n = k + l;
    let prof = ChannelProfile {
        l,
        s: l,
        p: 1.0,
        los: true,
    };
    let params = BmoczParams::new(k).unwrap();
    let n0 = n0_from_rsnr_db(14.0, n);
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let trials = 10_000;
    let mut exact = 0;
    for _ in 0..trials {
        let x = encode_symbol(&random_word(&mut rng, k), &params).unwrap();
        let tau0 = rng.random_range(0..=n);
        let phi = rng.random_range(0.0..TAU);
        let ch = draw_channel(&prof, &mut rng).unwrap();
        let obs = transmit(&x, &ch, tau0, phi, n0, 2 * n, &mut rng).unwrap();
        let est = synchronize(&summed_powers(&[obs.samples]), k, l, n0, prof.p);
        exact += (est.tau_hat == tau0) as u32;
    }
    let rate = exact as f64 / trials as f64;
    report.check(
        "6a timing accuracy",
        rate >= 0.95,
        format!("P(tauHat = tau0) {rate:.3} (target >= 0.95)"),
    );

    let (k, l) = (127, 127);
    let n = k + l;
    let prof = ChannelProfile {
        l,
        s: l,
        p: 0.98,
        los: false,
    };
    let params = BmoczParams::new(k).unwrap();
    let n0 = n0_from_rsnr_db(14.0, n);
    let trials = 2000;
    let mut within = 0;
    for _ in 0..trials {
        let x = encode_symbol(&random_word(&mut rng, k), &params).unwrap();
        let tau0 = rng.random_range(0..=n);
        let ch = draw_channel(&prof, &mut rng).unwrap();
        let obs = transmit(&x, &ch, tau0, 0.0, n0, 2 * n, &mut rng).unwrap();
        let est = synchronize(&summed_powers(&[obs.samples]), k, l, n0, prof.p);
        let window = energy_window(&ch.taps, 0.95);
        within += (est.l_eff.abs_diff(window) <= 10) as u32;
    }
    let rate = within as f64 / trials as f64;
    report.check(
        "6b effective length",
        rate >= 0.90,
        format!("lEff within 10 taps of the 95% window in {rate:.3} (target >= 0.90)"),
    );
}

fn determinism(report: &mut Report) {
    let cfg = SimConfig {
        snr_db: grid(0, 20, 2),
        trials: 2000,
        max_block_errors: 500,
        ..coded_config(
            4,
            Impairments {
                cfo: true,
                to: true,
            },
        )
    };
    let csv = |threads| {
        let mut out = Vec::new();
        write_results_csv(&mut out, &run_sweep_with_threads(&cfg, threads).unwrap()).unwrap();
        out
    };
    let (one, four) = (csv(1), csv(4));
    report.check(
        "7 determinism",
        one == four,
        format!(
            "1 vs 4 threads, {} CSV bytes, identical {}",
            one.len(),
            one == four
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    algebraic_identities(&mut report);
    codec_oracles(&mut report);
    decoder_equivalence(&mut report);
    noiseless_blind_pipeline(&mut report);
    curve_reproduction(&mut report);
    sync_properties(&mut report);
    determinism(&mut report);
    if report.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", report.failed);
        ExitCode::FAILURE
    }
}
