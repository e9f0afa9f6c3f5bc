//! Command-line front end. Every report goes to standard output (or
//! `--output`) as JSON, or as CSV rows with `--format csv`.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    bound_report, deadline_comparison, feasibility, persistent_distribution, solve_expectations, Semantics,
    DEFAULT_TRUNCATION_K,
};
use crate::engine::{simulate_with_threads, write_samples_csv, GameConfig, LatencyStats, DEFAULT_SLOT_CAP};
use crate::error::{ContentionError, Result};
use crate::probability::Probability;
use crate::protocols::ProtocolSpec;
use crate::schedule::{RationalParam, Schedule};

#[derive(Debug, Parser)]
#[command(
    name = "contention",
    version,
    about = "Age-based contention resolution: schedules, bounds and simulation"
)]
pub struct Cli {
    /// Seed for `simulate` (overrides the seed in the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Growth factor as `num/den`, an integer or a decimal.
    #[arg(long, default_value = "11/10")]
    pub c: RationalParam,

    #[arg(long, default_value = "0.75")]
    pub p: Probability,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-trivial transmission times s_0..=s_k.
    Schedule {
        #[arg(long, default_value = "11/10")]
        c: RationalParam,
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// Thresholds on c and the feasibility verdict; exits 2 when infeasible.
    Feasibility(ParamArgs),
    /// Closed-form latency bounds.
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        /// Truncation index; defaults to the smallest valid one.
        #[arg(long)]
        k1: Option<u32>,
        /// Largest k in the lone-player bound table.
        #[arg(long, default_value_t = 10)]
        table_k: u32,
    },
    /// Exact analysis: the persistent deviator distribution or the expectation enclosures.
    #[command(group = clap::ArgGroup::new("mode").required(true).args(["persistent", "expectations"]))]
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        persistent: bool,
        #[arg(long, default_value_t = 200)]
        zmax: usize,
        #[arg(long)]
        expectations: bool,
        #[arg(long, default_value = "literal")]
        semantics: Semantics,
        /// Truncation index of the recurrences.
        #[arg(long = "K", default_value_t = DEFAULT_TRUNCATION_K)]
        truncation_k: usize,
    },
    /// Monte Carlo run; prints LatencyStats (JSON) or per-trial samples (CSV).
    Simulate {
        /// Game config JSON; without it, `players` copies of P(c, p).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        focus: usize,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        slot_cap: Option<u64>,
        /// Also write per-trial samples as CSV here.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Lower bounds for a deadline deviator against the all-P bound.
    CompareDeadline {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t0: u64,
        /// Largest z_max in the table.
        #[arg(long, default_value_t = 600)]
        zmax: usize,
        #[arg(long, default_value_t = 50)]
        zstep: usize,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::Infeasible(violated)) => {
            let _ = writeln!(err, "infeasible parameters, violated: {}", violated.join("; "));
            2
        }
        Err(ContentionError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, ContentionError::Infeasible { .. }) {
                2
            } else {
                1
            }
        }
    }
}

enum Status {
    Ok,
    Infeasible(Vec<String>),
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Status> {
    let mut file;
    let out: &mut dyn Write = match &cli.output {
        Some(path) => {
            file = File::create(path)?;
            &mut file
        }
        None => stdout,
    };
    let format = cli.format;
    let mut status = Status::Ok;

    match &cli.command {
        Command::Schedule { c, k } => {
            let sched = Schedule::build(c.clone(), *k)?;
            match format {
                Format::Json => emit_json(out, &sched)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["k", "x", "s"])?;
                    for (i, (x, s)) in sched.x().iter().zip(sched.s()).enumerate() {
                        w.write_record([i.to_string(), x.to_string(), s.to_string()])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Feasibility(params) => {
            let report = feasibility(&params.c, params.p)?;
            match format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["field", "value"])?;
                    let t = &report.thresholds;
                    for (name, th) in [
                        ("inv_1mp", &t.inv_1mp),
                        ("inv_delta", &t.inv_delta),
                        ("inv_beta", &t.inv_beta),
                        ("persist_lb", &t.persist_lb),
                    ] {
                        w.write_record([name.to_string(), th.exact.to_string()])?;
                    }
                    w.write_record(["finite_all_p".to_string(), report.finite_all_p.to_string()])?;
                    w.write_record([
                        "persistent_diverges".to_string(),
                        report.persistent_diverges.to_string(),
                    ])?;
                    w.write_record(["feasible".to_string(), report.feasible.to_string()])?;
                    w.flush()?;
                }
            }
            if !report.feasible {
                status = Status::Infeasible(report.violated());
            }
        }
        Command::Bounds { params, k1, table_k } => {
            let report = bound_report(&params.c, params.p, *k1, *table_k)?;
            match format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["k", "y1k_upper"])?;
                    for (k, v) in report.y1k_upper.iter().enumerate() {
                        w.write_record([k.to_string(), v.to_string()])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Analyze {
            params,
            persistent,
            zmax,
            semantics,
            truncation_k,
            ..
        } => {
            if *persistent {
                let dist = persistent_distribution(&params.c, params.p, *zmax)?;
                match format {
                    Format::Json => emit_json(out, &dist)?,
                    Format::Csv => {
                        let mut w = csv::Writer::from_writer(out);
                        w.write_record(["z", "s", "pmf", "partial_expectation", "partial_mass"])?;
                        for z in 0..=dist.z_max {
                            w.write_record([
                                z.to_string(),
                                dist.support[z].to_string(),
                                dist.pmf[z].to_string(),
                                dist.partial_expectations[z].to_string(),
                                dist.partial_mass[z].to_string(),
                            ])?;
                        }
                        w.flush()?;
                    }
                }
            } else {
                let table = solve_expectations(&params.c, params.p, *semantics, *truncation_k)?;
                match format {
                    Format::Json => emit_json(out, &table)?,
                    Format::Csv => {
                        let mut w = csv::Writer::from_writer(out);
                        w.write_record([
                            "k", "y1_lower", "y1_upper", "y2_lower", "y2_upper", "y3_lower", "y3_upper",
                        ])?;
                        for k in 0..=table.truncation_k {
                            let (a, b, c) = (table.y1[k], table.y2[k], table.y3[k]);
                            w.write_record([
                                k.to_string(),
                                a.lower.to_string(),
                                a.upper.to_string(),
                                b.lower.to_string(),
                                b.upper.to_string(),
                                c.lower.to_string(),
                                c.upper.to_string(),
                            ])?;
                        }
                        w.flush()?;
                    }
                }
            }
        }
        Command::Simulate {
            config,
            params,
            players,
            trials,
            focus,
            threads,
            slot_cap,
            samples,
        } => {
            let mut game = match config {
                Some(path) => GameConfig::load(path)?,
                None => {
                    let spec = ProtocolSpec::age_based(params.c.clone(), params.p)?;
                    GameConfig::uniform(spec, *players, 0, DEFAULT_SLOT_CAP)?
                }
            };
            if let Some(seed) = cli.seed {
                game = game.with_seed(seed);
            }
            if let Some(cap) = slot_cap {
                game = game.with_slot_cap(*cap)?;
            }
            if *focus >= game.n() {
                return Err(ContentionError::InvalidArguments(format!(
                    "focus player {focus} out of range for {} players",
                    game.n()
                )));
            }
            let outcomes = simulate_with_threads(&game, *trials, *threads)?;
            if let Some(path) = samples {
                write_samples_csv(&outcomes, File::create(path)?)?;
            }
            match format {
                Format::Json => emit_json(out, &LatencyStats::from_outcomes(&outcomes, *focus, game.slot_cap()))?,
                Format::Csv => write_samples_csv(&outcomes, out)?,
            }
        }
        Command::CompareDeadline {
            params,
            t0,
            zmax,
            zstep,
        } => {
            if *zstep == 0 {
                return Err(ContentionError::InvalidArguments("--zstep must be >= 1".into()));
            }
            let mut grid: Vec<usize> = (0..=*zmax).step_by(*zstep).collect();
            if grid.last() != Some(zmax) {
                grid.push(*zmax);
            }
            let report = deadline_comparison(&params.c, params.p, *t0, &grid)?;
            match format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["z_max", "lower_bound"])?;
                    for b in &report.truncated_lower_bounds {
                        w.write_record([b.z_max.to_string(), b.lower_bound.to_string()])?;
                    }
                    w.flush()?;
                }
            }
        }
    }
    Ok(status)
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
