// Copyright 2026 The epivote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Argument parsing and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use epivote_core::exact::DEFAULT_ENUMERATION_CAP;
use epivote_core::simulate::{Scenario, EXPERIMENTS};

use crate::commands;
use crate::error::CliError;
use crate::parallel::with_threads;
use crate::report::{format_value, write_rows, Format};
use crate::scenario::load_scenario;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_DRAWS: u64 = 1_000;

#[derive(Debug, Parser)]
#[command(
    name = "epivote",
    version,
    about = "Weighted voting, abstention and delegation under epistemic competence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Monte Carlo trials for `mc`; committee draws for `sortition`.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Largest voter count evaluated by full subset enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: usize,
    /// Worker threads for Monte Carlo; defaults to one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `liquid` only: write per-round holdings as CSV to this path.
    #[arg(long, global = true)]
    pub rounds_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal weight of every voter.
    Weights,
    /// Exact probability of a correct decision.
    Exact,
    /// Monte Carlo estimate of the same probability.
    Mc,
    /// Partial abstention plan and its effect.
    Abstain,
    /// List, one-step or three-step delegation.
    Delegate,
    /// Iterated liquid delegation.
    Liquid,
    /// Randomly drawn committees.
    Sortition,
    /// A registered experiment.
    Experiment {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENTS))]
        name: String,
    },
}

impl Cli {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let path = self
            .scenario
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --scenario <path>".to_string()))?;
        let mut sc = load_scenario(path)?;
        if let Some(seed) = self.seed {
            sc.seed = seed;
        }
        Ok(sc)
    }
}

/// Runs a parsed command line, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if cli.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".to_string()));
    }
    if cli.rounds_out.is_some() && !matches!(cli.command, Command::Liquid) {
        return Err(CliError::Usage(
            "--rounds-out applies to `liquid` only".to_string(),
        ));
    }
    let cap = cli.enumeration_cap;
    let rows = match &cli.command {
        Command::Weights => commands::cmd_weights(&cli.scenario()?),
        Command::Exact => commands::cmd_exact(&cli.scenario()?, cap)?,
        Command::Mc => {
            let sc = cli.scenario()?;
            let trials = cli.trials.unwrap_or(DEFAULT_TRIALS);
            with_threads(cli.threads, || commands::cmd_mc(&sc, trials))
                .map_err(CliError::Usage)??
        }
        Command::Abstain => commands::cmd_abstain(&cli.scenario()?, cap)?,
        Command::Delegate => commands::cmd_delegate(&cli.scenario()?, cap)?,
        Command::Liquid => {
            let (rows, history) = commands::cmd_liquid(&cli.scenario()?, cap)?;
            if let Some(path) = &cli.rounds_out {
                write_rounds(path, &history)?;
            }
            rows
        }
        Command::Sortition => {
            let draws = cli.trials.unwrap_or(DEFAULT_DRAWS);
            commands::cmd_sortition(&cli.scenario()?, draws, cap)?
        }
        Command::Experiment { name } => commands::cmd_experiment(name, cap)?,
    };
    write_rows(&rows, cli.format, out)
}

fn write_rounds(path: &PathBuf, history: &[Vec<f64>]) -> Result<(), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    w.write_record(["round", "voter_index", "holding"])
        .map_err(|e| io(&e))?;
    for (r, holdings) in history.iter().enumerate() {
        for (i, h) in holdings.iter().enumerate() {
            w.write_record([(r + 1).to_string(), i.to_string(), format_value(*h)])
                .map_err(|e| io(&e))?;
        }
    }
    w.flush().map_err(|e| io(&e))
}
