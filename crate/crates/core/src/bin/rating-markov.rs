use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use rating_markov::cli::{self, RunConfig};
use rating_markov::WindowLength;

#[derive(Parser)]
#[command(version, about = "Rating transition diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Daily rated-bank counts and moving transitions per bank (output is a directory)
    Counts(Common),
    /// Moments of ratings and rating increments on each month start
    Moments(Common),
    /// Rolling time-homogeneity log-likelihood statistic
    Homogeneity(Common),
    /// Rolling Chapman-Kolmogorov deviation
    Ck(Common),
    /// Simulate a scenario file into an event CSV
    Simulate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = rating_markov::DEFAULT_TAU)]
    tau: i64,
    #[arg(long, default_value = "year", value_parser = ["month", "year"])]
    window: String,
    #[arg(long)]
    from: Option<NaiveDate>,
    #[arg(long)]
    to: Option<NaiveDate>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn into_config(self) -> RunConfig {
        RunConfig {
            input: self.input,
            output: self.output,
            from: self.from,
            to: self.to,
            tau: self.tau,
            window: self.window.parse().unwrap_or(WindowLength::Year),
            scenario: self.scenario,
            seed: self.seed,
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match args.command {
        Command::Counts(c) => cli::cmd_counts(&c.into_config()),
        Command::Moments(c) => cli::cmd_moments(&c.into_config()),
        Command::Homogeneity(c) => cli::cmd_homogeneity(&c.into_config()),
        Command::Ck(c) => cli::cmd_ck(&c.into_config()),
        Command::Simulate(c) => cli::cmd_simulate(&c.into_config()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
