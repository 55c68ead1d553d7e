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

//! Scenario files.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "voters": [{"id": 0, "p": 0.7311, "rights": 10}, {"id": 1, "w": 0.1, "count": 3000}],
//!   "signals": [{"id": 0, "p": 0.525, "receivers": [[1, 3000]]}],
//!   "mechanism": {"kind": "liquid", "params": {"strategy": "max-competence"}},
//!   "rule": {"weights": "rights"},
//!   "seed": 7
//! }
//! ```
//!
//! `count` expands a voter entry into ids `id..id+count`; receivers are ids
//! or inclusive `[lo, hi]` ranges. Only `voters` is required. Every mechanism
//! kind except `none` needs a `params` object, possibly empty.

use std::path::Path;

use epivote_core::abstention::DEFAULT_R_TILDE;
use epivote_core::delegation::{
    DelegationList, SelectionWeighting, SortitionConfig, StarClusterGraph, Strategy, Visibility,
};
use epivote_core::model::{Competence, Voter, VoterId, VoterProfile};
use epivote_core::signals::{Signal, SignalIncidence};
use epivote_core::simulate::{Mechanism, RuleWeights, Scenario};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    voters: Vec<VoterEntry>,
    #[serde(default)]
    signals: Option<Vec<SignalEntry>>,
    #[serde(default)]
    mechanism: Option<MechanismEntry>,
    #[serde(default)]
    rule: Option<RuleEntry>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VoterEntry {
    id: u32,
    p: Option<f64>,
    w: Option<f64>,
    #[serde(default = "one")]
    rights: f64,
    #[serde(default = "one_count")]
    count: u32,
}

fn one() -> f64 {
    1.0
}

fn one_count() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalEntry {
    id: u32,
    p: Option<f64>,
    w: Option<f64>,
    receivers: Vec<Receivers>,
    /// Declared receiver count, checked against `receivers`.
    count: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Receivers {
    One(u32),
    Range([u32; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "kebab-case",
    deny_unknown_fields
)]
enum MechanismEntry {
    None,
    Abstention(#[serde(default)] AbstentionParams),
    DependentAbstention(#[serde(default)] AbstentionParams),
    List(ListParams),
    OneStep(OneStepParams),
    ThreeStep(#[serde(default)] GraphParams),
    Liquid(#[serde(default)] LiquidParams),
    Sortition(SortitionParams),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbstentionParams {
    /// Absent: the default substitute ratio. `null`: the exact ratio.
    #[serde(default, deserialize_with = "explicit_null")]
    r_tilde: Option<Option<f64>>,
}

fn explicit_null<'de, D>(d: D) -> Result<Option<Option<f64>>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    Option::<f64>::deserialize(d).map(Some)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListParams {
    lists: Vec<ListEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListEntry {
    delegator: u32,
    candidates: Vec<u32>,
    #[serde(default)]
    unavailable: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OneStepParams {
    voter: u32,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphParams {
    /// Knowledge sets by voter id; `None` means everyone knows everyone.
    clusters: Option<Vec<ClusterEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterEntry {
    voter: u32,
    knows: Vec<Receivers>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiquidParams {
    clusters: Option<Vec<ClusterEntry>>,
    #[serde(default)]
    strategy: StrategyEntry,
    max_rounds: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
enum StrategyEntry {
    None,
    #[default]
    MaxCompetence,
    ApprovedRandom {
        alpha: f64,
        seed: u64,
    },
    /// Delegation target id per voter id; missing voters hold.
    Explicit(Vec<[u32; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SortitionParams {
    size: usize,
    #[serde(default)]
    weighting: WeightingEntry,
    /// Per voter id; voters not listed are always willing.
    #[serde(default)]
    willingness: Vec<(u32, f64)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum WeightingEntry {
    #[default]
    Uniform,
    Rights,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    weights: serde_json::Value,
}

pub const DEFAULT_MAX_ROUNDS: usize = 100;

fn field(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Field {
        path: path.into(),
        message: message.into(),
    }
}

fn competence(path: &str, p: Option<f64>, w: Option<f64>) -> Result<Competence, CliError> {
    match (p, w) {
        (Some(p), None) => {
            Competence::new(p).map_err(|e| field(format!("{path}.p"), e.to_string()))
        }
        (None, Some(w)) => {
            Competence::from_weight(w).map_err(|e| field(format!("{path}.w"), e.to_string()))
        }
        (Some(_), Some(_)) => Err(field(path, "give exactly one of `p` and `w`, not both")),
        (None, None) => Err(field(path, "missing `p` or `w`")),
    }
}

fn expand(path: &str, rs: &[Receivers], profile: &VoterProfile) -> Result<Vec<VoterId>, CliError> {
    let mut out = Vec::new();
    for (k, r) in rs.iter().enumerate() {
        let (lo, hi) = match *r {
            Receivers::One(id) => (id, id),
            Receivers::Range([lo, hi]) => (lo, hi),
        };
        if lo > hi {
            return Err(field(
                format!("{path}[{k}]"),
                format!("empty range [{lo}, {hi}]"),
            ));
        }
        for id in lo..=hi {
            if profile.index_of(VoterId(id)).is_none() {
                return Err(field(
                    format!("{path}[{k}]"),
                    format!("unknown voter id {id}"),
                ));
            }
            out.push(VoterId(id));
        }
    }
    Ok(out)
}

fn index(path: &str, profile: &VoterProfile, id: u32) -> Result<usize, CliError> {
    profile
        .index_of(VoterId(id))
        .ok_or_else(|| field(path, format!("unknown voter id {id}")))
}

fn graph(
    path: &str,
    clusters: &Option<Vec<ClusterEntry>>,
    profile: &VoterProfile,
) -> Result<StarClusterGraph, CliError> {
    let Some(clusters) = clusters else {
        return Ok(StarClusterGraph::complete(profile.len()));
    };
    let mut known = Vec::with_capacity(clusters.len());
    for (k, c) in clusters.iter().enumerate() {
        let p = format!("{path}.clusters[{k}]");
        index(&format!("{p}.voter"), profile, c.voter)?;
        known.push((
            VoterId(c.voter),
            expand(&format!("{p}.knows"), &c.knows, profile)?,
        ));
    }
    StarClusterGraph::from_ids(profile, &known).map_err(|e| field(path, e.to_string()))
}

/// Parses a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut voters = Vec::new();
    for (k, v) in file.voters.iter().enumerate() {
        let path = format!("voters[{k}]");
        let c = competence(&path, v.p, v.w)?;
        if v.count == 0 {
            return Err(field(format!("{path}.count"), "must be at least 1"));
        }
        for j in 0..v.count {
            let id =
                v.id.checked_add(j)
                    .ok_or_else(|| field(format!("{path}.count"), "ids overflow u32"))?;
            voters.push(
                Voter::new(id, c, v.rights)
                    .map_err(|e| field(format!("{path}.rights"), e.to_string()))?,
            );
        }
    }
    let profile = VoterProfile::new(voters).map_err(|e| field("voters", e.to_string()))?;

    let signals = match &file.signals {
        None => None,
        Some(entries) => {
            let mut sigs = Vec::with_capacity(entries.len());
            let mut receivers = Vec::with_capacity(entries.len());
            let mut declared = Vec::with_capacity(entries.len());
            for (k, s) in entries.iter().enumerate() {
                let path = format!("signals[{k}]");
                sigs.push(Signal::new(s.id, competence(&path, s.p, s.w)?));
                let r = expand(&format!("{path}.receivers"), &s.receivers, &profile)?;
                declared.push(s.count.unwrap_or(r.len()));
                receivers.push(r);
            }
            let ids: Vec<VoterId> = profile.voters().iter().map(|v| v.id).collect();
            Some(
                SignalIncidence::new(sigs, &ids, &receivers, Some(&declared))
                    .map_err(|e| field("signals", e.to_string()))?,
            )
        }
    };

    let mechanism = match file.mechanism.unwrap_or(MechanismEntry::None) {
        MechanismEntry::None => Mechanism::None,
        MechanismEntry::Abstention(a) => Mechanism::Abstention {
            r_tilde: a.r_tilde.unwrap_or(Some(DEFAULT_R_TILDE)),
        },
        MechanismEntry::DependentAbstention(a) => Mechanism::DependentAbstention {
            r_tilde: a.r_tilde.unwrap_or(Some(DEFAULT_R_TILDE)),
        },
        MechanismEntry::List(l) => {
            let mut lists = Vec::with_capacity(l.lists.len());
            for (k, e) in l.lists.iter().enumerate() {
                let path = format!("mechanism.params.lists[{k}]");
                index(&format!("{path}.delegator"), &profile, e.delegator)?;
                let mut cands = Vec::with_capacity(e.candidates.len());
                for (c, &id) in e.candidates.iter().enumerate() {
                    let i = index(&format!("{path}.candidates[{c}]"), &profile, id)?;
                    cands.push((VoterId(id), profile.voters()[i].competence));
                }
                let mut list = DelegationList::new(VoterId(e.delegator), &cands)
                    .map_err(|err| field(&path, err.to_string()))?;
                for (c, &id) in e.unavailable.iter().enumerate() {
                    list.set_available(VoterId(id), false).map_err(|err| {
                        field(format!("{path}.unavailable[{c}]"), err.to_string())
                    })?;
                }
                lists.push(list);
            }
            Mechanism::ListDelegation { lists }
        }
        MechanismEntry::OneStep(o) => {
            index("mechanism.params.voter", &profile, o.voter)?;
            Mechanism::OneStep {
                voter: VoterId(o.voter),
            }
        }
        MechanismEntry::ThreeStep(g) => Mechanism::ThreeStep {
            graph: graph("mechanism.params", &g.clusters, &profile)?,
        },
        MechanismEntry::Liquid(l) => {
            let visibility = match &l.clusters {
                None => Visibility::Complete,
                Some(_) => Visibility::Graph(graph("mechanism.params", &l.clusters, &profile)?),
            };
            let strategy = match l.strategy {
                StrategyEntry::None => Strategy::None,
                StrategyEntry::MaxCompetence => Strategy::MaxCompetence,
                StrategyEntry::ApprovedRandom { alpha, seed } => {
                    Strategy::ApprovedRandom { alpha, seed }
                }
                StrategyEntry::Explicit(pairs) => {
                    let mut targets = vec![None; profile.len()];
                    for (k, [from, to]) in pairs.into_iter().enumerate() {
                        let path = format!("mechanism.params.strategy.explicit[{k}]");
                        let i = index(&path, &profile, from)?;
                        targets[i] = Some(index(&path, &profile, to)?);
                    }
                    Strategy::Explicit(targets)
                }
            };
            Mechanism::Liquid {
                visibility,
                strategy,
                max_rounds: l.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS),
            }
        }
        MechanismEntry::Sortition(s) => {
            let mut willingness = Vec::new();
            if !s.willingness.is_empty() {
                willingness = vec![1.0; profile.len()];
                for (k, &(id, q)) in s.willingness.iter().enumerate() {
                    let path = format!("mechanism.params.willingness[{k}]");
                    if !(0.0..=1.0).contains(&q) {
                        return Err(field(path, format!("willingness {q} outside [0, 1]")));
                    }
                    willingness[index(&path, &profile, id)?] = q;
                }
            }
            Mechanism::Sortition {
                config: SortitionConfig {
                    size: s.size,
                    weighting: match s.weighting {
                        WeightingEntry::Uniform => SelectionWeighting::Uniform,
                        WeightingEntry::Rights => SelectionWeighting::RightsProportional,
                    },
                    willingness,
                },
            }
        }
    };

    let rule = match &file.rule {
        None => RuleWeights::Rights,
        Some(r) => match &r.weights {
            serde_json::Value::String(s) if s == "rights" => RuleWeights::Rights,
            serde_json::Value::String(s) if s == "optimal" => RuleWeights::Optimal,
            serde_json::Value::Array(xs) => {
                let mut ws = Vec::with_capacity(xs.len());
                for (k, x) in xs.iter().enumerate() {
                    ws.push(
                        x.as_f64().ok_or_else(|| {
                            field(format!("rule.weights[{k}]"), "expected a number")
                        })?,
                    );
                }
                RuleWeights::Explicit(ws)
            }
            other => {
                return Err(field(
                    "rule.weights",
                    format!("expected \"rights\", \"optimal\" or an array of numbers, got {other}"),
                ))
            }
        },
    };

    Scenario::new(profile, signals, mechanism, rule, file.seed)
        .map_err(|e| field("scenario", e.to_string()))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}
