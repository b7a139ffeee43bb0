//! `ldct` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 failed
//! verification (self-test failure or a container checksum mismatch). Errors
//! go to stderr as a single line starting with `ldct: <kind>:`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{full_report, histogram, scatter_sample, Direction, DEFAULT_SCATTER_SEED};
use crate::cipher::{decrypt_image, encrypt_image, CipherKeys, ROUNDS};
use crate::config::Config;
use crate::io::{
    histogram_csv, load_ppm, permutations_csv, read_bundle, save_ppm, scatter_csv, trajectory_csv,
    write_bundle, write_pgm,
};
use crate::keystream::{build_round_keystream, Component, KeystreamConfig};
use crate::lorenz::{derive_initial_conditions, integrate, SecretKey};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ldct", version, about = "Lorenz/DCT2 colour image cipher")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encrypt a square P6 PPM image into an LDCT container.
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        keys: KeyArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Decrypt an LDCT container into a P6 PPM image.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        keys: KeyArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Statistical report on an original image and its cipher / decryption.
    Analyze {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long)]
        decrypted: Option<PathBuf>,
        #[arg(long)]
        json: PathBuf,
        /// Directory for adjacent-pixel scatter samples.
        #[arg(long = "scatter-csv")]
        scatter_csv: Option<PathBuf>,
        /// Directory for per-component histograms.
        #[arg(long = "hist-csv")]
        hist_csv: Option<PathBuf>,
        #[arg(long = "scatter-count", default_value_t = 3000)]
        scatter_count: usize,
        #[arg(long = "scatter-seed", default_value_t = DEFAULT_SCATTER_SEED)]
        scatter_seed: u64,
    },
    /// Dump the trajectory generated by one key as CSV.
    Lorenz {
        #[arg(long)]
        key: String,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        rotations: Option<Vec<u8>>,
        #[arg(long)]
        dump: PathBuf,
        #[command(flatten)]
        lorenz: LorenzArgs,
    },
    /// Dump one key's keystream planes (PGM) and permutations (CSV).
    Keystream {
        #[arg(long)]
        key: String,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        rotations: Option<Vec<u8>>,
        #[arg(long)]
        size: usize,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        #[command(flatten)]
        lorenz: LorenzArgs,
        #[arg(long = "energy-fraction")]
        energy_fraction: Option<f64>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
struct KeyArgs {
    #[arg(long)]
    key1: String,
    #[arg(long)]
    key2: String,
    #[arg(long)]
    key3: String,
    /// Per-round shifts a,b,c.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    shifts: Option<Vec<u16>>,
    /// Three rotations shared by all keys, or nine (three per key).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    rotations: Option<Vec<u8>>,
}

#[derive(Args, Debug)]
struct LorenzArgs {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    lorenz: LorenzArgs,
    #[arg(long = "energy-fraction")]
    energy_fraction: Option<f64>,
}

enum Failure {
    Usage(String),
    Data(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Checksum { .. } => Failure::Verify(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn apply_lorenz(ks: &mut KeystreamConfig, a: &LorenzArgs) {
    ks.params.rho = a.rho.unwrap_or(ks.params.rho);
    ks.params.sigma = a.sigma.unwrap_or(ks.params.sigma);
    ks.params.beta = a.beta.unwrap_or(ks.params.beta);
    ks.t_end = a.t_end.unwrap_or(ks.t_end);
    ks.dt = a.dt.unwrap_or(ks.dt);
}

fn rotation_schedule(v: &[u8]) -> std::result::Result<[[u8; 3]; ROUNDS], Failure> {
    match v.len() {
        3 => Ok([[v[0], v[1], v[2]]; ROUNDS]),
        9 => Ok(std::array::from_fn(|k| {
            [v[3 * k], v[3 * k + 1], v[3 * k + 2]]
        })),
        n => Err(usage(format!("--rotations takes 3 or 9 values, got {n}"))),
    }
}

/// Builds the config from flags; `fallback` supplies shifts and rotations
/// not given on the command line (the container header when decrypting).
fn build_config(
    keys: &KeyArgs,
    pipeline: &PipelineArgs,
    fallback: Option<([u16; ROUNDS], [[u8; 3]; ROUNDS])>,
) -> std::result::Result<Config, Failure> {
    let mut cfg = Config::with_keys(&keys.key1, &keys.key2, &keys.key3);
    if let Some((shifts, rotations)) = fallback {
        cfg.shifts = shifts;
        cfg.rotations = rotations;
    }
    if let Some(s) = &keys.shifts {
        cfg.shifts = s
            .as_slice()
            .try_into()
            .map_err(|_| usage(format!("--shifts takes 3 values, got {}", s.len())))?;
    }
    if let Some(r) = &keys.rotations {
        cfg.rotations = rotation_schedule(r)?;
    }
    apply_lorenz(&mut cfg.keystream, &pipeline.lorenz);
    if let Some(f) = pipeline.energy_fraction {
        cfg.keystream.energy_fraction = f;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn single_key(
    key: &str,
    rotations: &Option<Vec<u8>>,
    lorenz: &LorenzArgs,
) -> std::result::Result<(SecretKey, KeystreamConfig), Failure> {
    let rot = match rotations {
        None => SecretKey::DEFAULT_ROTATIONS,
        Some(r) => r
            .as_slice()
            .try_into()
            .map_err(|_| usage(format!("--rotations takes 3 values, got {}", r.len())))?,
    };
    let key = SecretKey::new(key, rot).map_err(usage)?;
    let mut cfg = KeystreamConfig::default();
    apply_lorenz(&mut cfg, lorenz);
    cfg.params.validate().map_err(usage)?;
    Ok((key, cfg))
}

fn run_crypto(cfg: &Config, f: impl FnOnce(&CipherKeys<'_>) -> Outcome) -> Outcome {
    let keys = cfg.secret_keys().map_err(usage)?;
    f(&CipherKeys {
        keys: &keys,
        shifts: cfg.shifts,
        config: &cfg.keystream,
    })
}

fn write_text(path: &Path, s: &str) -> Outcome {
    fs::write(path, s).map_err(|e| Failure::Data(Error::file(path)(e)))
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    original: &Path,
    bundle: Option<&Path>,
    decrypted: Option<&Path>,
    json: &Path,
    scatter_dir: Option<&Path>,
    hist_dir: Option<&Path>,
    scatter_count: usize,
    seed: u64,
) -> Outcome {
    let orig = load_ppm(original)?;
    let enc = bundle.map(read_bundle).transpose()?.map(|b| b.difference);
    let dec = decrypted.map(load_ppm).transpose()?;
    let label = original
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = full_report(&label, &orig, enc.as_ref(), dec.as_ref())?;
    write_text(json, &report.to_json())?;

    let mut images: Vec<(&str, &[_; 3])> = vec![("original", orig.planes())];
    if let Some(e) = &enc {
        images.push(("encrypted", e));
    }
    if let Some(d) = &dec {
        images.push(("decrypted", d.planes()));
    }
    if let Some(dir) = hist_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::Data(Error::file(dir)(e)))?;
        for (name, planes) in &images {
            for c in Component::ALL {
                let h = histogram(&planes[c.index()]);
                write_text(
                    &dir.join(format!("{name}.{}.csv", c.name())),
                    &histogram_csv(&h),
                )?;
            }
        }
    }
    if let Some(dir) = scatter_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::Data(Error::file(dir)(e)))?;
        for (name, planes) in &images {
            for c in Component::ALL {
                for d in Direction::ALL {
                    let plane = &planes[c.index()];
                    let available = crate::analysis::adjacent_pairs(plane, d).len();
                    let s = scatter_sample(plane, d, scatter_count.min(available), seed)?;
                    let file = dir.join(format!("{name}.{}.{}.csv", c.name(), d.name()));
                    write_text(&file, &scatter_csv(&s))?;
                }
            }
        }
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Encrypt {
            input,
            out,
            keys,
            pipeline,
        } => {
            let cfg = build_config(&keys, &pipeline, None)?;
            let img = load_ppm(&input)?;
            run_crypto(&cfg, |ck| {
                write_bundle(&out, &encrypt_image(&img, ck)?)?;
                Ok(())
            })
        }
        Command::Decrypt {
            input,
            out,
            keys,
            pipeline,
        } => {
            let bundle = read_bundle(&input)?;
            let cfg = build_config(&keys, &pipeline, Some((bundle.shifts, bundle.rotations)))?;
            run_crypto(&cfg, |ck| {
                save_ppm(&out, &decrypt_image(&bundle, ck)?)?;
                Ok(())
            })
        }
        Command::Analyze {
            original,
            bundle,
            decrypted,
            json,
            scatter_csv,
            hist_csv,
            scatter_count,
            scatter_seed,
        } => analyze(
            &original,
            bundle.as_deref(),
            decrypted.as_deref(),
            &json,
            scatter_csv.as_deref(),
            hist_csv.as_deref(),
            scatter_count,
            scatter_seed,
        ),
        Command::Lorenz {
            key,
            rotations,
            dump,
            lorenz,
        } => {
            let (key, cfg) = single_key(&key, &rotations, &lorenz)?;
            let (p, s0) = (&cfg.params, derive_initial_conditions(&key));
            let traj = integrate(p, s0, cfg.t_start, cfg.t_end, cfg.dt)?;
            write_text(&dump, &trajectory_csv(&traj))
        }
        Command::Keystream {
            key,
            rotations,
            size,
            out_dir,
            lorenz,
            energy_fraction,
        } => {
            let (key, mut cfg) = single_key(&key, &rotations, &lorenz)?;
            if let Some(f) = energy_fraction {
                cfg.energy_fraction = f;
            }
            let round = build_round_keystream(&key, size, &cfg)?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure::Data(Error::file(&out_dir)(e)))?;
            for c in Component::ALL {
                let p = round.plane_for(c);
                let label = c.plane_label();
                write_pgm(out_dir.join(format!("{label}.pgm")), p.bytes())?;
                write_text(
                    &out_dir.join(format!("{label}_rows.csv")),
                    &permutations_csv(p.row_perm()),
                )?;
                write_text(
                    &out_dir.join(format!("{label}_cols.csv")),
                    &permutations_csv(p.col_perm()),
                )?;
            }
            Ok(())
        }
        Command::Selftest => {
            let checks = crate::selftest::run();
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verify(format!(
                    "{failed} of {} self-checks failed",
                    checks.len()
                )))
            }
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let mut lines = rendered.lines();
            let first = lines.next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("ldct: usage error: {first}");
            for l in lines {
                eprintln!("{l}");
            }
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("ldct: usage error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("ldct: data error: {e}");
            EXIT_DATA
        }
        Err(Failure::Verify(m)) => {
            eprintln!("ldct: verification failed: {m}");
            EXIT_VERIFY
        }
    }
}
