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

//! Dependent competences through shared independent signals.
//!
//! Every voter's information is a set of signals drawn from one canonical
//! list of mutually independent signals. A signal received by several voters
//! is realized once and seen identically by all of them.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{correct_probability, CorrectnessReport, Method, MethodDetail};
use crate::model::{is_tie, Competence, DecisionOutcome, Direction, VoterId};
use crate::numeric::{compensated_sum, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub id: u32,
    pub competence: Competence,
}

impl Signal {
    pub fn new(id: u32, competence: Competence) -> Self {
        Self { id, competence }
    }

    pub fn optimal_weight(&self) -> f64 {
        self.competence.weight().0
    }
}

/// Which voters receive which signals.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalIncidence {
    signals: Vec<Signal>,
    voters: Vec<VoterId>,
    /// Per signal, indices into `voters`.
    receivers: Vec<Vec<usize>>,
    /// Per voter, indices into `signals`.
    received: Vec<Vec<usize>>,
}

impl SignalIncidence {
    /// `receivers[s]` lists the voters receiving `signals[s]`. When
    /// `declared_counts` is given, each entry must equal the actual number of
    /// receivers of that signal.
    pub fn new(
        signals: Vec<Signal>,
        voters: &[VoterId],
        receivers: &[Vec<VoterId>],
        declared_counts: Option<&[usize]>,
    ) -> Result<Self> {
        if receivers.len() != signals.len() {
            return Err(Error::LengthMismatch {
                what: "signal receiver lists",
                expected: signals.len(),
                got: receivers.len(),
            });
        }
        if let Some(d) = declared_counts {
            if d.len() != signals.len() {
                return Err(Error::LengthMismatch {
                    what: "declared receiver counts",
                    expected: signals.len(),
                    got: d.len(),
                });
            }
        }
        let mut ids: Vec<u32> = signals.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSignal(w[0]));
        }
        let mut sorted_voters: Vec<(VoterId, usize)> = voters
            .iter()
            .copied()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        sorted_voters.sort_unstable();
        if let Some(w) = sorted_voters.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateVoter(w[0].0 .0));
        }
        let lookup = |v: VoterId| -> Result<usize> {
            sorted_voters
                .binary_search_by(|probe| probe.0.cmp(&v))
                .map(|k| sorted_voters[k].1)
                .map_err(|_| Error::UnknownVoter(v.0))
        };
        let mut recv_idx = Vec::with_capacity(signals.len());
        let mut received = vec![Vec::new(); voters.len()];
        for (s, list) in receivers.iter().enumerate() {
            let mut idx = Vec::with_capacity(list.len());
            for &v in list {
                idx.push(lookup(v)?);
            }
            idx.sort_unstable();
            if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateVoter(voters[w[0]].0));
            }
            if idx.is_empty() {
                return Err(Error::UnreceivedSignal(signals[s].id));
            }
            if let Some(d) = declared_counts {
                if d[s] != idx.len() {
                    return Err(Error::ReceiverCountMismatch {
                        signal: signals[s].id,
                        declared: d[s],
                        actual: idx.len(),
                    });
                }
            }
            for &j in &idx {
                received[j].push(s);
            }
            recv_idx.push(idx);
        }
        Ok(Self {
            signals,
            voters: voters.to_vec(),
            receivers: recv_idx,
            received,
        })
    }

    /// Every signal received by exactly one voter, voter `k` getting signal `k`.
    pub fn singletons(signals: Vec<Signal>, voters: &[VoterId]) -> Result<Self> {
        let receivers: Vec<Vec<VoterId>> = voters.iter().map(|&v| vec![v]).collect();
        Self::new(signals, voters, &receivers, None)
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn voters(&self) -> &[VoterId] {
        &self.voters
    }

    /// Indices of the voters receiving signal `s`.
    pub fn receivers(&self, s: usize) -> &[usize] {
        &self.receivers[s]
    }

    /// Indices of the signals received by voter index `j` (its `C_j`).
    pub fn received(&self, j: usize) -> &[usize] {
        &self.received[j]
    }

    pub fn receiver_count(&self, s: usize) -> usize {
        self.receivers[s].len()
    }
}

/// One draw of every signal. `Direction::A` marks the correct alternative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalRealization {
    pub directions: Vec<Direction>,
}

impl SignalRealization {
    pub fn sample<R: Rng + ?Sized>(signals: &[Signal], rng: &mut R) -> Self {
        let directions = signals
            .iter()
            .map(|s| {
                if rng.gen::<f64>() < s.competence.p() {
                    Direction::A
                } else {
                    Direction::B
                }
            })
            .collect();
        Self { directions }
    }

    /// Realization from a bit mask; bit `s` set means signal `s` is correct.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        Self {
            directions: (0..len)
                .map(|s| {
                    if mask >> s & 1 == 1 {
                        Direction::A
                    } else {
                        Direction::B
                    }
                })
                .collect(),
        }
    }
}

/// Weighted vote over the signals themselves with their optimal weights.
pub fn signal_weighted_decision(
    signals: &[Signal],
    realization: &SignalRealization,
    coin: impl FnOnce() -> bool,
) -> Result<DecisionOutcome> {
    if signals.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if realization.directions.len() != signals.len() {
        return Err(Error::LengthMismatch {
            what: "signal realization",
            expected: signals.len(),
            got: realization.directions.len(),
        });
    }
    let margin = compensated_sum(
        signals
            .iter()
            .zip(&realization.directions)
            .map(|(s, d)| s.optimal_weight() * d.sign()),
    );
    let scale = compensated_sum(signals.iter().map(|s| libm::fabs(s.optimal_weight())));
    Ok(DecisionOutcome::from_margin(margin, scale, coin))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedWeight {
    pub voter: VoterId,
    pub signal: u32,
    /// `w_s / K_s`, the signal's optimal weight over its receiver count.
    pub weight: f64,
}

pub fn adjusted_weights(incidence: &SignalIncidence) -> Vec<AdjustedWeight> {
    let mut out = Vec::new();
    for (j, signals) in incidence.received.iter().enumerate() {
        for &s in signals {
            let sig = &incidence.signals[s];
            out.push(AdjustedWeight {
                voter: incidence.voters[j],
                signal: sig.id,
                weight: sig.optimal_weight() / incidence.receiver_count(s) as f64,
            });
        }
    }
    out
}

/// Exact probability that the optimal signal-weighted decision is correct.
/// Signals take the place of voters.
pub fn dependence_correct_probability(
    signals: &[Signal],
    enumeration_cap: usize,
) -> Result<CorrectnessReport> {
    if signals.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let weights: Vec<f64> = signals.iter().map(Signal::optimal_weight).collect();
    let comps: Vec<Competence> = signals.iter().map(|s| s.competence).collect();
    correct_probability(&weights, &comps, enumeration_cap)
}

/// A voter's single undivided stance: the signal-weighted decision over the
/// signals it received, abstaining when they cancel.
pub fn voter_stance(
    incidence: &SignalIncidence,
    j: usize,
    realization: &SignalRealization,
) -> Direction {
    let received = &incidence.received[j];
    let margin = compensated_sum(
        received
            .iter()
            .map(|&s| incidence.signals[s].optimal_weight() * realization.directions[s].sign()),
    );
    let scale = compensated_sum(
        received
            .iter()
            .map(|&s| libm::fabs(incidence.signals[s].optimal_weight())),
    );
    if is_tie(margin, scale) {
        Direction::Abstain
    } else if margin > 0.0 {
        Direction::A
    } else {
        Direction::B
    }
}

/// Exact probability of a correct decision when every voter casts its
/// single stance with the given rule weight. Enumerates signal patterns.
pub fn stance_vote_correct_probability(
    incidence: &SignalIncidence,
    rule_weights: &[f64],
    enumeration_cap: usize,
) -> Result<CorrectnessReport> {
    let m = incidence.signals.len();
    if rule_weights.len() != incidence.voters.len() {
        return Err(Error::LengthMismatch {
            what: "rule weights",
            expected: incidence.voters.len(),
            got: rule_weights.len(),
        });
    }
    if m > enumeration_cap || m > 62 {
        return Err(Error::CapExceeded {
            voters: m,
            cap: enumeration_cap,
        });
    }
    let scale = compensated_sum(rule_weights.iter().map(|w| libm::fabs(*w)));
    let mut p = CompensatedSum::new();
    for mask in 0u64..(1u64 << m) {
        let real = SignalRealization::from_mask(m, mask);
        let ln_q = compensated_sum(incidence.signals.iter().enumerate().map(|(s, sig)| {
            if mask >> s & 1 == 1 {
                sig.competence.ln_p()
            } else {
                sig.competence.ln_q()
            }
        }));
        let margin = compensated_sum(
            (0..incidence.voters.len())
                .map(|j| rule_weights[j] * voter_stance(incidence, j, &real).sign()),
        );
        let q = libm::exp(ln_q);
        if is_tie(margin, scale) {
            p += 0.5 * q;
        } else if margin > 0.0 {
            p += q;
        }
    }
    Ok(CorrectnessReport {
        probability: p.value().clamp(0.0, 1.0),
        method: Method::Enumeration,
        detail: MethodDetail::Enumeration { subsets: 1u64 << m },
    })
}
