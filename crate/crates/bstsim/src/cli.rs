//! Command-line front end.
//!
//! Four subcommands: `constants` (solve and print the growth constants),
//! `run` (seeded trajectories or ensembles), `fringe` (deepest-levels
//! trace), and `validate` (the self-check suite). Every subcommand is
//! deterministic given its full flag set; numeric flags accept
//! scientific notation. Exit codes: 0 success, 1 check failure, 2 usage
//! error, 3 resource error.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{ensemble_run, fringe_trace_checked, Recentrer};
use crate::constants::constants_set;
use crate::error::{Error, Result};
use crate::io::{write_fringe_csv, write_json, TrajectoryCsvWriter};
use crate::profile::Trajectory;
use crate::rng::RandomStream;
use crate::schedule::CheckpointSchedule;
use crate::validate::{run_validation, ValidationScale};

/// Names the directory that receives default-named output files when
/// `--out` is not given. This is the only environment variable read.
pub const OUT_DIR_ENV: &str = "BSTSIM_OUT_DIR";

const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Normalized flag set a subcommand runs with.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub n_max: u64,
    pub members: u64,
    pub base_seed: u64,
    pub ratio: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub tol: f64,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("--n must be at least 1"));
        }
        if self.members < 1 {
            return Err(Error::invalid("--members must be at least 1"));
        }
        if !self.ratio.is_finite() || self.ratio <= 1.0 {
            return Err(Error::invalid(format!(
                "--ratio must be a finite number above 1, got {}",
                self.ratio
            )));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::invalid(format!(
                "--tol must be a finite positive number, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Unsigned integer, plain or in scientific notation (`1e6`).
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(format!("`{s}` is not an exactly representable nonnegative integer"));
    }
    Ok(v as u64)
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

#[derive(Parser)]
#[command(
    name = "bstsim",
    version,
    about = "Random-tree depth statistics: seeded simulation, exact oracles, self-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the growth constants and print them as JSON.
    Constants {
        /// Largest acceptable defining-equation or criticality residual.
        #[arg(long, value_parser = parse_float, default_value = "1e-12")]
        tol: f64,
    },
    /// Grow seeded trees: checkpoint CSV for one trajectory, ensemble
    /// summary JSON for several.
    Run {
        /// Final number of leaves.
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        n: u64,
        /// Base seed; omitted means 0, with a warning.
        #[arg(long, value_parser = parse_count)]
        seed: Option<u64>,
        /// Independent trajectories to aggregate (JSON output).
        #[arg(long, value_parser = parse_count, default_value = "1")]
        members: u64,
        /// Worker threads; default uses every core.
        #[arg(long, value_parser = parse_count)]
        jobs: Option<u64>,
        /// Geometric spacing between checkpoints.
        #[arg(long, value_parser = parse_float, default_value = "1.1")]
        ratio: f64,
        /// Output file; default is stdout, or a file under the directory
        /// named by BSTSIM_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Trace the leaf counts of the three deepest levels (CSV).
    Fringe {
        /// Final number of leaves.
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        n: u64,
        /// Base seed; omitted means 0, with a warning.
        #[arg(long, value_parser = parse_count)]
        seed: Option<u64>,
        /// Geometric spacing between checkpoints.
        #[arg(long, value_parser = parse_float, default_value = "1.1")]
        ratio: f64,
        /// Output file; default is stdout, or a file under the directory
        /// named by BSTSIM_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify the frontier window property after every step and
        /// report the tally on standard error.
        #[arg(long)]
        check_lemma: bool,
    },
    /// Run the seeded self-check suite and report per-check verdicts.
    Validate {
        /// Base seed; omitted means 0, with a warning.
        #[arg(long, value_parser = parse_count)]
        seed: Option<u64>,
        /// Reduced sample sizes with 4-standard-error bands.
        #[arg(long)]
        quick: bool,
        /// Report format; only json is meaningful here.
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Shorthand for `--format json`.
        #[arg(long)]
        json: bool,
        /// Worker threads; default uses every core.
        #[arg(long, value_parser = parse_count)]
        jobs: Option<u64>,
    },
}

/// Parse the real process arguments, dispatch, and return the exit code.
pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidArgument(_) => 2,
                Error::Resource(_) => 3,
                _ => 1,
            }
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            eprintln!("warning: no --seed given, using seed 0");
            0
        }
    }
}

/// Run `f` on a dedicated pool of `jobs` threads, or inline on the
/// default pool.
fn with_jobs<T: Send>(jobs: Option<u64>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("--jobs must be at least 1")),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j as usize)
                .build()
                .map_err(|e| Error::resource(format!("cannot build a {j}-thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Constants { tol } => {
            let config = RunConfig {
                subcommand: "constants",
                n_max: 1,
                members: 1,
                base_seed: 0,
                ratio: 2.0,
                out: None,
                format: OutputFormat::Json,
                tol,
            };
            config.validate()?;
            cmd_constants(&config)
        }
        Command::Run {
            n,
            seed,
            members,
            jobs,
            ratio,
            out,
            format,
        } => {
            let config = RunConfig {
                subcommand: "run",
                n_max: n,
                members,
                base_seed: resolve_seed(seed),
                ratio,
                out,
                format,
                tol: DEFAULT_TOL,
            };
            config.validate()?;
            with_jobs(jobs, || cmd_run(&config))?
        }
        Command::Fringe {
            n,
            seed,
            ratio,
            out,
            check_lemma,
        } => {
            let config = RunConfig {
                subcommand: "fringe",
                n_max: n,
                members: 1,
                base_seed: resolve_seed(seed),
                ratio,
                out,
                format: OutputFormat::Csv,
                tol: DEFAULT_TOL,
            };
            config.validate()?;
            cmd_fringe(&config, check_lemma)
        }
        Command::Validate {
            seed,
            quick,
            format,
            json,
            jobs,
        } => {
            if format == Some(OutputFormat::Csv) {
                return Err(Error::invalid(
                    "validation reports have no CSV form; use --format json",
                ));
            }
            let seed = resolve_seed(seed);
            let scale = if quick {
                ValidationScale::Quick
            } else {
                ValidationScale::Full
            };
            let as_json = json || format == Some(OutputFormat::Json);
            with_jobs(jobs, || cmd_validate(seed, scale, as_json))?
        }
    }
}

fn cmd_constants(config: &RunConfig) -> Result<i32> {
    let set = constants_set();
    let mut stdout = std::io::stdout().lock();
    write_json(&mut stdout, &set)?;
    let r = &set.residuals;
    let worst = r
        .height_equation
        .abs()
        .max(r.saturation_equation.abs())
        .max(r.height_criticality.abs())
        .max(r.saturation_criticality.abs());
    Ok(if worst <= config.tol { 0 } else { 1 })
}

fn cmd_run(config: &RunConfig) -> Result<i32> {
    let schedule = CheckpointSchedule::geometric(config.n_max, config.ratio)?;
    let stream = RandomStream::new(config.base_seed);
    match config.format {
        OutputFormat::Csv => {
            if config.members != 1 {
                return Err(Error::invalid(
                    "ensemble summaries are JSON; pass --format json with --members",
                ));
            }
            let sink = out_sink(config.out.as_deref(), "run.csv")?;
            let recentrer = Recentrer::new();
            let mut writer = TrajectoryCsvWriter::new(sink)?;
            for mut record in Trajectory::new(stream, &schedule)? {
                recentrer.fill(&mut record);
                writer.record(&record)?;
            }
        }
        OutputFormat::Json => {
            let summary = ensemble_run(stream, config.members, &schedule)?;
            let sink = out_sink(config.out.as_deref(), "ensemble.json")?;
            write_json(sink, &summary)?;
        }
    }
    Ok(0)
}

fn cmd_fringe(config: &RunConfig, check_lemma: bool) -> Result<i32> {
    if config.n_max < 2 {
        return Err(Error::invalid("the fringe trace needs --n of at least 2"));
    }
    let full = CheckpointSchedule::geometric(config.n_max, config.ratio)?;
    let targets: Vec<u64> = full.targets().iter().copied().filter(|&t| t >= 2).collect();
    let schedule = CheckpointSchedule::explicit(targets)?;
    let (rows, tally) = fringe_trace_checked(
        RandomStream::new(config.base_seed),
        &schedule,
        3,
        check_lemma,
    )?;
    let sink = out_sink(config.out.as_deref(), "fringe.csv")?;
    write_fringe_csv(sink, &rows)?;
    if let Some(tally) = tally {
        eprintln!(
            "frontier window check: {} failures over {} states ({} passes, {} not applicable)",
            tally.failures, tally.checked, tally.passes, tally.not_applicable
        );
        if tally.failures > 0 {
            return Ok(1);
        }
    }
    Ok(0)
}

fn cmd_validate(seed: u64, scale: ValidationScale, as_json: bool) -> Result<i32> {
    let report = run_validation(seed, scale)?;
    let mut stdout = std::io::stdout().lock();
    if as_json {
        write_json(&mut stdout, &report)?;
    } else {
        stdout.write_all(report.render_text().as_bytes())?;
        stdout.flush()?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

/// Resolve the output sink: an explicit path, a default-named file under
/// the BSTSIM_OUT_DIR directory, or standard output.
fn out_sink(out: Option<&Path>, default_name: &str) -> Result<Box<dyn Write>> {
    let path = match out {
        Some(p) => Some(p.to_path_buf()),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) => {
                let dir = PathBuf::from(dir);
                std::fs::create_dir_all(&dir)?;
                Some(dir.join(default_name))
            }
            None => None,
        },
    };
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("17").unwrap(), 17);
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("2.5e1").unwrap(), 25);
        assert_eq!(parse_count("1e0").unwrap(), 1);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("1e20").is_err());
        assert!(parse_count("abc").is_err());
        assert!(parse_count("inf").is_err());
    }

    #[test]
    fn config_invariants() {
        let base = RunConfig {
            subcommand: "run",
            n_max: 10,
            members: 1,
            base_seed: 0,
            ratio: 1.1,
            out: None,
            format: OutputFormat::Csv,
            tol: 1e-12,
        };
        assert!(base.validate().is_ok());
        assert!(RunConfig { n_max: 0, ..base.clone() }.validate().is_err());
        assert!(RunConfig { members: 0, ..base.clone() }.validate().is_err());
        assert!(RunConfig { ratio: 1.0, ..base.clone() }.validate().is_err());
        assert!(RunConfig { ratio: f64::NAN, ..base.clone() }.validate().is_err());
        assert!(RunConfig { tol: 0.0, ..base }.validate().is_err());
    }

    #[test]
    fn subcommand_parsing() {
        let cli = Cli::try_parse_from(["bstsim", "run", "--n", "1e3", "--seed", "7"]).unwrap();
        match cli.command {
            Command::Run { n, seed, members, .. } => {
                assert_eq!(n, 1000);
                assert_eq!(seed, Some(7));
                assert_eq!(members, 1);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["bstsim", "run", "--n", "x"]).is_err());
        assert!(Cli::try_parse_from(["bstsim"]).is_err());
    }
}
