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

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every precondition failure the engine can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("competence {0} is outside [1e-9, 1 - 1e-9]")]
    CompetenceOutOfRange(f64),
    #[error("weight {0} is not finite")]
    NonFiniteWeight(f64),
    #[error("voting rights must be finite and nonnegative, got {0}")]
    InvalidRights(f64),
    #[error("voter profile is empty")]
    EmptyProfile,
    #[error("duplicate voter id {0}")]
    DuplicateVoter(u32),
    #[error("unknown voter id {0}")]
    UnknownVoter(u32),
    #[error("voter {voter} exercises {exercised} rights but holds only {rights}")]
    OverExercised {
        voter: u32,
        exercised: f64,
        rights: f64,
    },
    #[error("all voting rights are zero")]
    ZeroRights,
    #[error("{what}: length {got} does not match {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{voters} voters exceed the enumeration cap of {cap}; use blocks or Monte Carlo")]
    CapExceeded { voters: usize, cap: usize },
    #[error("exact margin distribution needs {cells} cells, above the limit of {limit}")]
    SupportTooLarge { cells: usize, limit: usize },
    #[error("voter index {index} out of range for {len} voters")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("at least {need} voters required, got {got}")]
    TooFewVoters { need: usize, got: usize },
    #[error("majority analysis needs an odd number of voters, got {0}")]
    EvenVoterCount(usize),
    #[error("competence {0} is below 0.5; flip the voter's stance first")]
    BelowHalf(f64),
    #[error("no voter has competence above 0.5")]
    AllIgnorant,
    #[error("rule weights are not the optimal log-odds weights (voter {index})")]
    NotOptimal { index: usize },
    #[error("parameter {name} = {value} is invalid")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("nothing is exercised, so abstention cannot be redistributed")]
    NothingExercised,
    #[error("signal {0} has no receivers")]
    UnreceivedSignal(u32),
    #[error("duplicate signal id {0}")]
    DuplicateSignal(u32),
    #[error("signal {signal}: declared {declared} receivers but incidence lists {actual}")]
    ReceiverCountMismatch {
        signal: u32,
        declared: usize,
        actual: usize,
    },
    #[error(
        "voter {0} is not minimally decisive; no transfer at this scale can change an outcome"
    )]
    NotMinimallyDecisive(u32),
    #[error("no available candidate has a positive weight")]
    NoAvailableCandidate,
    #[error("star cluster graph is not connected")]
    Disconnected,
    #[error("voter {0} must hold positive rights for weight recovery")]
    RecoveryNeedsRights(u32),
    #[error("optimal weight of voter {0} cannot be recovered from step-one delegations")]
    Unrecoverable(u32),
    #[error("willingness filtering left {available} voters for a committee of {size}")]
    PoolTooSmall { available: usize, size: usize },
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
