use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wplus::service::{self, ServiceError, EXIT_USAGE};
use wplus::{CachedArtifacts, Config};

#[derive(Parser, Debug)]
#[command(name = "wplus", version, about = "Weierstrass points on X0+(p) modulo p")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Cache directory (overrides WPLUS_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Largest prime checked against the independent supersingular oracle.
    #[arg(long, global = true)]
    oracle_bound: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Starting bits for CM evaluation.
    #[arg(long, global = true)]
    float_start_bits: Option<u32>,
    #[arg(long, global = true)]
    float_max_factor: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check for one prime.
    Verify {
        p: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        paranoid: bool,
        #[arg(long)]
        slack: Option<i64>,
    },
    /// Verify all primes in [a, b].
    Scan {
        a: u64,
        b: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        paranoid: bool,
        #[arg(long)]
        slack: Option<i64>,
    },
    /// Supersingular polynomial mod p.
    Ssing { p: u64 },
    /// Hilbert class polynomial of discriminant -D.
    Hilbert { d: u64 },
    /// Echelon basis of S_2^+(p).
    Basis {
        p: u64,
        #[arg(long)]
        slack: Option<i64>,
    },
}

fn config(global: &Global) -> Config {
    let mut c = Config::from_env();
    if let Some(dir) = &global.cache_dir {
        c.cache_dir = Some(dir.clone());
    }
    if let Some(b) = global.oracle_bound {
        c.oracle_bound = b;
    }
    if let Some(s) = global.seed {
        c.rng_seed = s;
    }
    c.float_start_bits = global.float_start_bits.or(c.float_start_bits);
    if let Some(f) = global.float_max_factor {
        c.float_max_factor = f;
    }
    c
}

fn run(cli: Cli) -> Result<i32, ServiceError> {
    let mut cfg = config(&cli.global);
    match cli.command {
        Command::Verify { p, json, paranoid, slack } => {
            cfg.paranoid = paranoid;
            cfg.precision_slack = slack.unwrap_or(cfg.precision_slack);
            let art = CachedArtifacts::new(&cfg);
            let result = service::run_verify(p, &cfg, &art)?;
            let status = service::status_of(&result);
            match &result {
                Ok(r) if json => {
                    let j = service::JsonReport::from_report(r);
                    println!("{}", serde_json::to_string_pretty(&j).expect("report serializes"));
                }
                Ok(r) => print!("{}", service::render_text(r, cfg.rng_seed)),
                Err(e) => eprintln!("p = {p}: {e}"),
            }
            Ok(status.exit_code())
        }
        Command::Scan { a, b, jobs, out, paranoid, slack } => {
            cfg.paranoid = paranoid;
            cfg.precision_slack = slack.unwrap_or(cfg.precision_slack);
            cfg.jobs = jobs.unwrap_or(cfg.jobs);
            let art = CachedArtifacts::new(&cfg);
            let report = service::scan(a, b, &cfg, &art)?;
            print!("{}", service::render_scan_text(&report));
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return Ok(3);
                }
            }
            Ok(report.exit_code())
        }
        Command::Ssing { p } => {
            print!("{}", service::ssing_text(p, &cfg)?);
            Ok(0)
        }
        Command::Hilbert { d } => {
            let art = CachedArtifacts::new(&cfg);
            print!("{}", service::hilbert_text(d, &art)?);
            Ok(0)
        }
        Command::Basis { p, slack } => {
            cfg.precision_slack = slack.unwrap_or(cfg.precision_slack);
            let art = CachedArtifacts::new(&cfg);
            print!("{}", service::basis_text(p, &cfg, &art)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
