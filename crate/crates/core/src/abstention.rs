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

//! Partial abstention: exercising only part of one's voting rights so that
//! exercised rights become proportional to optimal weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    competence_from_weight, require_at_least_half, Competence, Direction, Voter, VoterId,
    VoterProfile, Weight,
};
use crate::numeric::{compensated_sum, softplus, LogProbability};
use crate::signals::{SignalIncidence, SignalRealization};

/// Default substitute ratio for approximate coordination.
pub const DEFAULT_R_TILDE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub voter: VoterId,
    pub rights: f64,
    pub abstained: f64,
    pub exercised: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstentionPlan {
    pub entries: Vec<PlanEntry>,
    /// The common weight-to-exercised ratio `R` (or the substitute `R̃`).
    pub reference_ratio: f64,
    /// Voters whose `w_i / R̃` exceeded their rights and were held at `t_i`.
    pub capped: Vec<VoterId>,
}

impl AbstentionPlan {
    pub fn exercised(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.exercised).collect()
    }

    pub fn total_exercised(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.exercised))
    }

    pub fn total_rights(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.rights))
    }

    /// Fraction of all rights that is exercised.
    pub fn exercised_share(&self) -> f64 {
        self.total_exercised() / self.total_rights()
    }

    /// Weight each voter ends up with, `R · t*_i`.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| e.exercised * self.reference_ratio)
            .collect()
    }
}

/// Flips every below-half voter (its vote is inverted by the caller), so the
/// returned profile satisfies `p >= 0.5` everywhere.
pub fn orient_profile(profile: &VoterProfile) -> Result<(VoterProfile, Vec<bool>)> {
    let mut flipped = Vec::with_capacity(profile.len());
    let voters: Vec<Voter> = profile
        .voters()
        .iter()
        .map(|v| {
            let (c, f) = v.competence.oriented();
            flipped.push(f);
            Voter {
                competence: c,
                ..*v
            }
        })
        .collect();
    Ok((VoterProfile::new(voters)?, flipped))
}

fn check_mechanism_profile(profile: &VoterProfile) -> Result<Vec<Competence>> {
    let comps = profile.competences();
    require_at_least_half(&comps)?;
    if comps.iter().all(|c| c.weight().0 <= 0.0) {
        return Err(Error::AllIgnorant);
    }
    Ok(comps)
}

/// Exact optimal abstention with `R = max w_i / t_i`.
pub fn optimal_abstention_independent(profile: &VoterProfile) -> Result<AbstentionPlan> {
    let comps = check_mechanism_profile(profile)?;
    let voters = profile.voters();
    let ratio = |k: usize| comps[k].weight().0 / voters[k].rights;
    let r = (0..voters.len())
        .filter(|&k| voters[k].rights > 0.0 && comps[k].weight().0 > 0.0)
        .map(ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    if !r.is_finite() {
        return Err(Error::NothingExercised);
    }
    let entries = voters
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = comps[k].weight().0;
            let exercised = if w <= 0.0 || v.rights == 0.0 {
                0.0
            } else if ratio(k) == r {
                v.rights
            } else {
                (w / r).min(v.rights)
            };
            PlanEntry {
                voter: v.id,
                rights: v.rights,
                abstained: v.rights - exercised,
                exercised,
            }
        })
        .collect();
    Ok(AbstentionPlan {
        entries,
        reference_ratio: r,
        capped: Vec::new(),
    })
}

/// Coordination on a substitute ratio: `t*_i = min(t_i, w_i / R̃)`.
pub fn approx_abstention(profile: &VoterProfile, r_tilde: f64) -> Result<AbstentionPlan> {
    let comps = check_mechanism_profile(profile)?;
    let voters: Vec<(VoterId, f64, f64)> = profile
        .voters()
        .iter()
        .zip(&comps)
        .map(|(v, c)| (v.id, c.weight().0, v.rights))
        .collect();
    approx_abstention_weights(&voters, r_tilde)
}

/// [`approx_abstention`] on raw `(id, weight, rights)` triples, for weights
/// too extreme to materialize as a competence.
pub fn approx_abstention_weights(
    voters: &[(VoterId, f64, f64)],
    r_tilde: f64,
) -> Result<AbstentionPlan> {
    if !(r_tilde.is_finite() && r_tilde > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r_tilde",
            value: r_tilde,
        });
    }
    let mut capped = Vec::new();
    let mut entries = Vec::with_capacity(voters.len());
    for &(voter, w, rights) in voters {
        if !w.is_finite() {
            return Err(Error::NonFiniteWeight(w));
        }
        if w < 0.0 {
            return Err(Error::BelowHalf(competence_from_weight(Weight(w))));
        }
        if !(rights.is_finite() && rights >= 0.0) {
            return Err(Error::InvalidRights(rights));
        }
        let target = w / r_tilde;
        if target > rights {
            capped.push(voter);
        }
        let exercised = target.min(rights);
        entries.push(PlanEntry {
            voter,
            rights,
            abstained: rights - exercised,
            exercised,
        });
    }
    Ok(AbstentionPlan {
        entries,
        reference_ratio: r_tilde,
        capped,
    })
}

/// `1 - σ(R̃) = 1 / (1 + e^R̃)`, the largest competence shortfall of a voter
/// whose weight is capped at `R̃`.
pub fn shortfall_bound(r_tilde: f64) -> Result<LogProbability> {
    if !(r_tilde.is_finite() && r_tilde >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "r_tilde",
            value: r_tilde,
        });
    }
    Ok(LogProbability::from_ln(-softplus(r_tilde)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    pub from: VoterId,
    pub to: VoterId,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelegationEquivalent {
    pub transfers: Vec<Transfer>,
    /// Rights held per voter after the transfers, all of them exercised.
    pub holdings: Vec<f64>,
}

/// Re-expresses an abstention plan as delegation: each voter's abstained
/// rights go to every exercising voter in proportion to what it exercises.
pub fn abstention_equivalence(plan: &AbstentionPlan) -> Result<DelegationEquivalent> {
    let total = plan.total_exercised();
    if total <= 0.0 {
        return Err(Error::NothingExercised);
    }
    let abstained = compensated_sum(plan.entries.iter().map(|e| e.abstained));
    let mut transfers = Vec::new();
    for from in plan.entries.iter().filter(|e| e.abstained > 0.0) {
        for to in plan.entries.iter().filter(|e| e.exercised > 0.0) {
            transfers.push(Transfer {
                from: from.voter,
                to: to.voter,
                amount: from.abstained * to.exercised / total,
            });
        }
    }
    let holdings = plan
        .entries
        .iter()
        .map(|e| e.exercised + abstained * e.exercised / total)
        .collect();
    Ok(DelegationEquivalent {
        transfers,
        holdings,
    })
}

/// Reference ratio used by the dependent-case algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioChoice {
    /// `R = sup w^a_i / r_ij`, assumed common knowledge.
    Exact,
    Substitute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationEntry {
    pub voter: VoterId,
    pub signal: u32,
    pub adjusted_weight: f64,
    pub allocated: f64,
    pub abstained: f64,
    pub exercised: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalAllocationPlan {
    pub entries: Vec<AllocationEntry>,
    pub reference_ratio: f64,
    /// Per voter, the range of `entries` belonging to it.
    spans: Vec<(usize, usize)>,
    /// Per entry, index of its signal in the incidence.
    signal_index: Vec<usize>,
    signal_count: usize,
}

impl SignalAllocationPlan {
    /// Exercised rights per signal summed over its receivers, `w_s / R`.
    pub fn signal_totals(&self) -> Vec<f64> {
        let mut parts = vec![Vec::new(); self.signal_count];
        for (e, &s) in self.entries.iter().zip(&self.signal_index) {
            parts[s].push(e.exercised);
        }
        parts.into_iter().map(compensated_sum).collect()
    }

    /// Each voter's single ballot after netting offsetting per-signal votes:
    /// direction and exercised amount.
    pub fn ballots(&self, realization: &SignalRealization) -> Vec<(Direction, f64)> {
        self.spans
            .iter()
            .map(|&(lo, hi)| {
                let net = compensated_sum((lo..hi).map(|k| {
                    self.entries[k].exercised * realization.directions[self.signal_index[k]].sign()
                }));
                if net > 0.0 {
                    (Direction::A, net)
                } else if net < 0.0 {
                    (Direction::B, -net)
                } else {
                    (Direction::Abstain, 0.0)
                }
            })
            .collect()
    }
}

/// Allocation, abstention and netting for voters that share signals.
/// `rights` defaults to one unit per voter.
pub fn dependent_abstention(
    incidence: &SignalIncidence,
    rights: Option<&[f64]>,
    ratio: RatioChoice,
) -> Result<SignalAllocationPlan> {
    let signals = incidence.signals();
    let comps: Vec<Competence> = signals.iter().map(|s| s.competence).collect();
    require_at_least_half(&comps)?;
    let n = incidence.voters().len();
    if let Some(r) = rights {
        if r.len() != n {
            return Err(Error::LengthMismatch {
                what: "voter rights",
                expected: n,
                got: r.len(),
            });
        }
        if let Some(&bad) = r.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidRights(bad));
        }
    }
    let adjusted: Vec<f64> = signals
        .iter()
        .enumerate()
        .map(|(s, sig)| sig.optimal_weight() / incidence.receiver_count(s) as f64)
        .collect();

    let mut entries = Vec::new();
    let mut spans = Vec::with_capacity(n);
    let mut signal_index = Vec::new();
    for j in 0..n {
        let t = rights.map_or(1.0, |r| r[j]);
        let own = incidence.received(j);
        let total = compensated_sum(own.iter().map(|&s| adjusted[s]));
        let lo = entries.len();
        for &s in own {
            let allocated = if total > 0.0 {
                t * adjusted[s] / total
            } else {
                0.0
            };
            entries.push(AllocationEntry {
                voter: incidence.voters()[j],
                signal: signals[s].id,
                adjusted_weight: adjusted[s],
                allocated,
                abstained: allocated,
                exercised: 0.0,
            });
            signal_index.push(s);
        }
        spans.push((lo, entries.len()));
    }

    let r = match ratio {
        RatioChoice::Exact => entries
            .iter()
            .filter(|e| e.allocated > 0.0 && e.adjusted_weight > 0.0)
            .map(|e| e.adjusted_weight / e.allocated)
            .fold(f64::NEG_INFINITY, f64::max),
        RatioChoice::Substitute(rt) => {
            if !(rt.is_finite() && rt > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "r_tilde",
                    value: rt,
                });
            }
            rt
        }
    };
    if !r.is_finite() {
        return Err(Error::NothingExercised);
    }
    for e in &mut entries {
        if e.allocated <= 0.0 || e.adjusted_weight <= 0.0 {
            continue;
        }
        let exercised = if e.adjusted_weight / e.allocated == r {
            e.allocated
        } else {
            (e.adjusted_weight / r).min(e.allocated)
        };
        e.exercised = exercised;
        e.abstained = e.allocated - exercised;
    }
    Ok(SignalAllocationPlan {
        entries,
        reference_ratio: r,
        spans,
        signal_index,
        signal_count: signals.len(),
    })
}
