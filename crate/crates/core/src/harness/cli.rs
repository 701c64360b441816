//! The `qnfl` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Result;
use crate::harness::config::SweepConfig;
use crate::harness::csv_io::{aggregate, read_trials_file, write_aggregate_file, write_trials_file};
use crate::harness::sweep::run_sweep;
use crate::harness::verify::{run_suite, Suite};
use crate::learner::Shots;
use crate::par;
use crate::theory::{
    active_branch, ideal_nfl_bound, nfl_bound_formal, nfl_bound_informal, ActiveBranch, BoundInput, DEFAULT_EPS_TILDE,
    DEFAULT_GAMMA, DEFAULT_LOG_MULTIPLIER,
};

#[derive(Parser, Debug)]
#[command(name = "qnfl", version, about = "Entangled-data quantum dynamics learning: sweeps, bounds and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a learning sweep and write one CSV row per trial.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Worker threads (0 = all cores); overrides the config file.
        #[arg(long)]
        jobs: Option<usize>,
        /// Master seed; overrides the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarise a trial CSV per grid point.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print lower-bound values over a parameter grid.
    Bound {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<Shots>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        train_size: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_EPS_TILDE)]
        eps_tilde: f64,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_LOG_MULTIPLIER)]
        log_multiplier: f64,
    },
    /// Run Monte-Carlo verification checks; exit 0 iff all pass.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Sweep { config, out, jobs, seed } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let records = run_sweep(&cfg)?;
            write_trials_file(&out, &records)?;
            log::info!("wrote {} trials to {}", records.len(), out.display());
            Ok(0)
        }
        Command::Aggregate { input, out } => {
            let rows = read_trials_file(&input)?;
            let summary = aggregate(&rows);
            write_aggregate_file(&out, &summary)?;
            log::info!("wrote {} summary rows to {}", summary.len(), out.display());
            Ok(0)
        }
        Command::Bound {
            n,
            r,
            m,
            train_size,
            eps_tilde,
            gamma,
            log_multiplier,
        } => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            print_bounds(&mut w, &n, &r, &m, &train_size, eps_tilde, gamma, log_multiplier)?;
            Ok(0)
        }
        Command::Verify {
            suite,
            samples,
            seed,
            jobs,
        } => {
            let checks = par::with_jobs(jobs, || run_suite(suite, samples, seed))?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            println!("{} checks, {failed} failed", checks.len());
            Ok(i32::from(failed > 0))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn print_bounds<W: Write>(
    w: &mut W,
    ns: &[u32],
    rs: &[usize],
    ms: &[Shots],
    train_sizes: &[usize],
    eps_tilde: f64,
    gamma: f64,
    log_multiplier: f64,
) -> Result<()> {
    let io = |e| crate::error::Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    writeln!(w, "# informal values carry the hidden constant set to 1 (gamma = 4)").map_err(io)?;
    writeln!(w, "n,d,r,m,N,formal,informal,ideal,formal_branch").map_err(io)?;
    for &n in ns {
        let d = 1usize << n.min(30);
        for &r in rs {
            for &m in ms {
                for &nn in train_sizes {
                    let b = BoundInput {
                        eps_tilde,
                        gamma,
                        log_multiplier,
                        ..BoundInput::new(d, nn, m, r)
                    };
                    let formal = nfl_bound_formal(&b)?;
                    let informal = nfl_bound_informal(n, nn, m, r, eps_tilde)?;
                    let ideal = if nn == 0 { 1.0 - 1.0 / (d as f64 + 1.0) } else { ideal_nfl_bound(d, r, nn)? };
                    let branch = match active_branch(&b) {
                        ActiveBranch::Shots => "shots",
                        ActiveBranch::RankLog => "rank_log",
                    };
                    writeln!(w, "{n},{d},{r},{m},{nn},{formal:.16e},{informal:.16e},{ideal:.16e},{branch}").map_err(io)?;
                }
            }
        }
    }
    Ok(())
}
