use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use bmocz::acpc::AcpcCode;
use bmocz::channel::{
    draw_channel, energy_window, n0_from_rsnr_db, read_cir_csv, read_observation_csv, transmit,
    write_observation_csv, ChannelProfile, ChannelRealization,
};
use bmocz::gf2::{CyclicCodeSet, Word};
use bmocz::mocz::{dizet_decode_fft, encode_symbol, BmoczParams, MoczSymbol};
use bmocz::receiver::{receive_with_genie, Genie, ReceiverConfig};
use bmocz::sim::{run_sweep, run_sweep_with_threads, write_results_csv, SimConfig};
use bmocz::sync::{summed_powers, synchronize, write_sync_diagnostics, SyncDiagRow};
use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "bmocz", version, about = "BMOCZ modem and link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the generator polynomials of a nested cyclic code pair.
    Codegen {
        /// Field degree, n = 2^m - 1.
        #[arg(long)]
        m: usize,
        /// Primitive factors in the outer generator.
        #[arg(long)]
        j: usize,
    },
    /// Encode a message into an affine cyclically permutable codeword.
    AcpcEncode {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        j: usize,
        /// Message bits as hex.
        #[arg(long)]
        msg: String,
    },
    /// Decode a possibly rotated and corrupted codeword.
    AcpcDecode {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        j: usize,
        /// Received word as hex.
        #[arg(long)]
        word: String,
    },
    /// Map K bits to a symbol, written as `re,im` CSV.
    Encode {
        #[arg(long)]
        k: usize,
        /// Bits as hex.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-test a received `re,im` CSV and print the K bits as hex.
    Decode {
        #[arg(long)]
        k: usize,
        input: PathBuf,
    },
    /// Send one packet through a random channel and dump the observation.
    Transmit(TransmitArgs),
    /// Blind reception of observation CSVs, one per antenna.
    Rx(RxArgs),
    /// Per-trial timing and effective-length estimates.
    SyncDiag(SyncDiagArgs),
    /// Run a Monte-Carlo sweep from a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output CSV, stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ChannelArgs {
    /// Delay spread in taps.
    #[arg(long)]
    l: usize,
    /// Nonzero taps, defaults to L.
    #[arg(long)]
    s: Option<usize>,
    /// Power decay per tap.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Force the first tap into the support.
    #[arg(long)]
    los: bool,
}

impl ChannelArgs {
    fn profile(&self) -> ChannelProfile {
        ChannelProfile {
            l: self.l,
            s: self.s.unwrap_or(self.l),
            p: self.p,
            los: self.los,
        }
    }
}

#[derive(Args)]
struct TransmitArgs {
    #[arg(long)]
    k: usize,
    /// Bits as hex; with --code these are the message bits.
    #[arg(long)]
    bits: String,
    /// Outer factor count J of an ACPC code of length K.
    #[arg(long)]
    code: Option<usize>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Use the taps of a `re,im` CSV instead of a random channel.
    #[arg(long)]
    cir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    tau0: usize,
    /// Carrier offset in radians per sample.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Received SNR in dB; noiseless if omitted.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Observation length, defaults to 2(K+L).
    #[arg(long)]
    nobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One output file per antenna; stdout for a single antenna if omitted.
    #[arg(long)]
    out: Vec<PathBuf>,
}

#[derive(Args)]
struct RxArgs {
    #[arg(long)]
    k: usize,
    /// Maximum channel length.
    #[arg(long)]
    l: usize,
    /// Outer factor count J of an ACPC code of length K.
    #[arg(long)]
    code: Option<usize>,
    /// Fractional CFO grid size.
    #[arg(long, default_value_t = 16)]
    q: usize,
    /// Received SNR in dB used to set the noise power.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "n0")]
    snr_db: Option<f64>,
    /// Per-sample noise power.
    #[arg(long)]
    n0: Option<f64>,
    /// Power decay assumed by the length estimator.
    #[arg(long, default_value_t = 1.0)]
    decay: f64,
    /// Known packet start; disables timing estimation.
    #[arg(long)]
    tau0: Option<usize>,
    /// Known carrier offset; disables CFO estimation.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct SyncDiagArgs {
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn field_degree(k: usize) -> Result<usize> {
    match k {
        7 => Ok(3),
        31 => Ok(5),
        127 => Ok(7),
        _ => bail!("coded operation needs K in {{7, 31, 127}}, got {k}"),
    }
}

fn codegen(m: usize, j: usize) -> Result<()> {
    let set = CyclicCodeSet::new(m, j)?;
    let dims = |r: usize, c: usize| json!([r, c]);
    let out = json!({
        "n": set.n(),
        "k": set.k(),
        "B": set.b(),
        "gIn": set.g_in().to_hex(),
        "gOut": set.g_out().to_hex(),
        "g": set.g().to_hex(),
        "Gsys": dims(set.gsys().rows(), set.gsys().cols()),
        "Hsys": dims(set.hsys().rows(), set.hsys().cols()),
        "GoutSys": dims(set.gout_sys().rows(), set.gout_sys().cols()),
        "HoutSys": dims(set.hout_sys().rows(), set.hout_sys().cols()),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn write_symbol(mut w: impl Write, x: &MoczSymbol) -> Result<()> {
    writeln!(w, "re,im")?;
    for c in &x.coeffs {
        writeln!(w, "{:e},{:e}", c.re, c.im)?;
    }
    w.flush()?;
    Ok(())
}

fn transmit_cmd(a: TransmitArgs) -> Result<()> {
    let params = BmoczParams::new(a.k)?;
    let word = match a.code {
        Some(j) => {
            let code = AcpcCode::new(field_degree(a.k)?, j)?;
            code.encode(&Word::from_hex(&a.bits, code.b())?)?
        }
        None => Word::from_hex(&a.bits, a.k)?,
    };
    let x = encode_symbol(&word, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let profile = a.channel.profile();
    let n = a.k + profile.l;
    let n0 = a.snr_db.map_or(0.0, |db| n0_from_rsnr_db(db, n));
    let nobs = a.nobs.unwrap_or(2 * n);
    let antennas = a.out.len().max(1);
    let mut writers: Vec<Box<dyn Write>> = if a.out.is_empty() {
        vec![output(None)?]
    } else {
        a.out
            .iter()
            .map(|p| output(Some(p)))
            .collect::<Result<_>>()?
    };
    let fixed = a
        .cir
        .as_deref()
        .map(|p| read_cir_csv(open(p)?, true).map_err(anyhow::Error::from))
        .transpose()?;
    for w in writers.iter_mut().take(antennas) {
        let ch: ChannelRealization = match &fixed {
            Some(ch) => ch.clone(),
            None => draw_channel(&profile, &mut rng)?,
        };
        let obs = transmit(&x, &ch, a.tau0, a.phi, n0, nobs, &mut rng)?;
        write_observation_csv(&mut *w, &obs.samples)?;
        w.flush()?;
    }
    Ok(())
}

fn rx(a: RxArgs) -> Result<()> {
    let params = BmoczParams::new(a.k)?;
    let code = match a.code {
        Some(j) => Some(Arc::new(AcpcCode::new(field_degree(a.k)?, j)?)),
        None => None,
    };
    let mut cfg = ReceiverConfig::new(params, code, a.l)?;
    cfg.q_cfo = a.q;
    cfg.m = a.inputs.len();
    cfg.decay = a.decay;
    cfg.use_sync = a.tau0.is_none();
    cfg.use_cfo = a.phi.is_none();
    let n0 = match (a.n0, a.snr_db) {
        (Some(n0), _) => n0,
        (None, Some(db)) => n0_from_rsnr_db(db, a.k + a.l),
        (None, None) => bail!("one of --n0 or --snr-db is required"),
    };
    let observations = a
        .inputs
        .iter()
        .map(|p| read_observation_csv(open(p)?).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let genie = Genie {
        tau0: a.tau0,
        phi: a.phi,
    };
    let d = receive_with_genie(&observations, &cfg, n0, genie)?;
    let out = json!({
        "msg": d.msg.to_hex(),
        "tauHat": d.tau_hat,
        "lEffHat": d.l_eff_hat,
        "phiHat": d.phi_hat,
        "shiftHat": d.shift_hat,
        "reliable": d.reliable,
    });
    println!("{out}");
    Ok(())
}

fn sync_diag(a: SyncDiagArgs) -> Result<()> {
    let params = BmoczParams::new(a.k)?;
    let profile = a.channel.profile();
    profile.validate()?;
    let n = a.k + profile.l;
    let n0 = n0_from_rsnr_db(a.snr_db, n);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::with_capacity(a.trials as usize);
    for _ in 0..a.trials {
        let bits = Word::from_bits((rng.next_u64() as u128) << 64 | rng.next_u64() as u128, a.k);
        let x = encode_symbol(&bits, &params)?;
        let tau0 = (rng.next_u64() % (n as u64 + 1)) as usize;
        let ch = draw_channel(&profile, &mut rng)?;
        let obs = transmit(&x, &ch, tau0, 0.0, n0, 2 * n, &mut rng)?;
        let est = synchronize(
            &summed_powers(&[obs.samples]),
            a.k,
            profile.l,
            n0,
            profile.p,
        );
        rows.push(SyncDiagRow {
            tau0,
            tau_hat: est.tau_hat,
            l_eff_true: energy_window(&ch.taps, 0.95),
            l_eff_hat: est.l_eff,
        });
    }
    let mut w = output(a.out.as_deref())?;
    write_sync_diagnostics(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

fn simulate(config: &Path, seed: Option<u64>, threads: usize, out: Option<&Path>) -> Result<()> {
    let mut cfg = SimConfig::from_file(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let rows = if threads == 0 {
        run_sweep(&cfg)?
    } else {
        run_sweep_with_threads(&cfg, threads)?
    };
    let mut w = output(out)?;
    write_results_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Codegen { m, j } => codegen(m, j),
        Command::AcpcEncode { m, j, msg } => {
            let code = AcpcCode::new(m, j)?;
            println!(
                "{}",
                code.encode(&Word::from_hex(&msg, code.b())?)?.to_hex()
            );
            Ok(())
        }
        Command::AcpcDecode { m, j, word } => {
            let code = AcpcCode::new(m, j)?;
            let d = code.decode(&Word::from_hex(&word, code.n())?)?;
            let out = json!({ "msg": d.msg.to_hex(), "shift": d.shift, "reliable": d.reliable });
            println!("{out}");
            Ok(())
        }
        Command::Encode { k, bits, out } => {
            let params = BmoczParams::new(k)?;
            let x = encode_symbol(&Word::from_hex(&bits, k)?, &params)?;
            write_symbol(output(out.as_deref())?, &x)
        }
        Command::Decode { k, input } => {
            let params = BmoczParams::new(k)?;
            let y = read_cir_csv(open(&input)?, false)?.taps;
            if y.len() <= k {
                bail!("need more than K={k} samples, got {}", y.len());
            }
            println!("{}", dizet_decode_fft(&y, &params, 1).to_hex());
            Ok(())
        }
        Command::Transmit(a) => transmit_cmd(a),
        Command::Rx(a) => rx(a),
        Command::SyncDiag(a) => sync_diag(a),
        Command::Simulate {
            config,
            seed,
            threads,
            out,
        } => simulate(&config, seed, threads, out.as_deref()),
    }
}
