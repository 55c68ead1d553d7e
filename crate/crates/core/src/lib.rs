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

//! Epistemic analysis of weighted dichotomous voting.
//!
//! The crate computes the probability that a group reaches the correct
//! answer on a binary question, given each voter's competence (probability of
//! being right on their own) and the weights the voting rule assigns them.
//! On top of that engine it models the mechanisms that reshape those weights:
//! partial abstention, list-based and liquid transfer delegation, three-step
//! star-cluster coordination and sortition.
//!
//! Optimal weights are log-odds, `w = ln(p / (1 - p))`. Everything here is
//! `no_std` with `alloc`; file formats, the CLI and thread-parallel Monte
//! Carlo live in the `epivote` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod abstention;
pub mod delegation;
pub mod error;
pub mod exact;
pub mod model;
pub mod numeric;
pub mod signals;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{
    competence_from_weight, decide, normalize_rights, weight_from_competence, Alternative, Ballot,
    Competence, DecisionOutcome, Direction, VoteProfile, Voter, VoterId, VoterProfile, Weight,
};
