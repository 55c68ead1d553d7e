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

//! Voters, ballots and the weighted dichotomous decision rule.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, ln_sigmoid};

/// Smallest competence accepted away from 0 and 1.
pub const COMPETENCE_EPSILON: f64 = 1e-9;

/// Relative width of the band around zero in which a weighted margin counts
/// as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Probability that a voter, acting alone, picks the correct alternative.
///
/// Stores both the probability and its log-odds so that a competence built
/// from a weight returns that weight bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Competence {
    p: f64,
    log_odds: f64,
}

impl Competence {
    pub fn new(p: f64) -> Result<Self> {
        if !(COMPETENCE_EPSILON..=1.0 - COMPETENCE_EPSILON).contains(&p) {
            return Err(Error::CompetenceOutOfRange(p));
        }
        let log_odds = libm::log(p) - libm::log1p(-p);
        Ok(Self { p, log_odds })
    }

    pub fn from_weight(w: f64) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::NonFiniteWeight(w));
        }
        let p = sigmoid(w);
        if !(COMPETENCE_EPSILON..=1.0 - COMPETENCE_EPSILON).contains(&p) {
            return Err(Error::CompetenceOutOfRange(p));
        }
        Ok(Self { p, log_odds: w })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    /// Optimal weight `ln(p / (1 - p))`.
    pub fn weight(self) -> Weight {
        Weight(self.log_odds)
    }

    /// `ln p`, accurate near 0 and 1.
    pub fn ln_p(self) -> f64 {
        ln_sigmoid(self.log_odds)
    }

    /// `ln(1 - p)`.
    pub fn ln_q(self) -> f64 {
        ln_sigmoid(-self.log_odds)
    }

    /// The competence of the mirrored stance, `1 - p`.
    pub fn complement(self) -> Self {
        Self {
            p: 1.0 - self.p,
            log_odds: -self.log_odds,
        }
    }

    /// Flips a below-half voter so the mechanism code only sees `p >= 0.5`.
    /// Returns the oriented competence and whether a flip happened.
    pub fn oriented(self) -> (Self, bool) {
        if self.log_odds < 0.0 {
            (self.complement(), true)
        } else {
            (self, false)
        }
    }
}

/// Log-odds voting weight.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Weight(pub f64);

impl Weight {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn sigmoid(w: f64) -> f64 {
    if w >= 0.0 {
        1.0 / (1.0 + libm::exp(-w))
    } else {
        let e = libm::exp(w);
        e / (1.0 + e)
    }
}

/// `ln(p / (1 - p))`.
pub fn weight_from_competence(p: Competence) -> Weight {
    p.weight()
}

/// Inverse of [`weight_from_competence`]: `1 / (1 + e^-w)`. Saturates to 0
/// or 1 for extreme weights instead of failing; use [`Competence::from_weight`]
/// for a validated competence.
pub fn competence_from_weight(w: Weight) -> f64 {
    sigmoid(w.0)
}

/// Rejects any competence below one half.
pub fn require_at_least_half(competences: &[Competence]) -> Result<()> {
    match competences.iter().find(|c| c.weight().0 < 0.0) {
        Some(c) => Err(Error::BelowHalf(c.p())),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoterId(pub u32);

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Voter {
    pub id: VoterId,
    pub competence: Competence,
    pub rights: f64,
}

impl Voter {
    pub fn new(id: u32, competence: Competence, rights: f64) -> Result<Self> {
        if !(rights.is_finite() && rights >= 0.0) {
            return Err(Error::InvalidRights(rights));
        }
        Ok(Self {
            id: VoterId(id),
            competence,
            rights,
        })
    }
}

/// Ordered list of voters with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct VoterProfile {
    voters: Vec<Voter>,
}

impl VoterProfile {
    pub fn new(voters: Vec<Voter>) -> Result<Self> {
        if voters.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let mut seen = BTreeMap::new();
        for (i, v) in voters.iter().enumerate() {
            if !(v.rights.is_finite() && v.rights >= 0.0) {
                return Err(Error::InvalidRights(v.rights));
            }
            if seen.insert(v.id, i).is_some() {
                return Err(Error::DuplicateVoter(v.id.0));
            }
        }
        Ok(Self { voters })
    }

    /// Convenience constructor: ids `0..n`, one right each.
    pub fn from_competences(ps: &[f64]) -> Result<Self> {
        let voters = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| Voter::new(i as u32, Competence::new(p)?, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(voters)
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn len(&self) -> usize {
        self.voters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voters.is_empty()
    }

    pub fn index_of(&self, id: VoterId) -> Option<usize> {
        self.voters.iter().position(|v| v.id == id)
    }

    pub fn get(&self, id: VoterId) -> Option<&Voter> {
        self.voters.iter().find(|v| v.id == id)
    }

    pub fn competences(&self) -> Vec<Competence> {
        self.voters.iter().map(|v| v.competence).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.voters
            .iter()
            .map(|v| v.competence.weight().0)
            .collect()
    }

    pub fn rights(&self) -> Vec<f64> {
        self.voters.iter().map(|v| v.rights).collect()
    }

    pub fn total_rights(&self) -> f64 {
        compensated_sum(self.voters.iter().map(|v| v.rights))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    A,
    B,
}

impl Alternative {
    pub fn other(self) -> Self {
        match self {
            Self::A => Self::B,
            Self::B => Self::A,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Self::A => Direction::A,
            Self::B => Direction::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    A,
    Abstain,
    B,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Self::A => 1.0,
            Self::Abstain => 0.0,
            Self::B => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ballot {
    pub voter: VoterId,
    pub direction: Direction,
    /// Rights actually exercised, at most the voter's holding.
    pub exercised: f64,
}

/// One validated ballot per participating voter, with the exercised share
/// `exercised / rights` precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteProfile {
    ballots: Vec<(Ballot, f64)>,
}

impl VoteProfile {
    pub fn new(profile: &VoterProfile, ballots: Vec<Ballot>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut out = Vec::with_capacity(ballots.len());
        for b in ballots {
            let voter = profile.get(b.voter).ok_or(Error::UnknownVoter(b.voter.0))?;
            if seen.insert(b.voter, ()).is_some() {
                return Err(Error::DuplicateVoter(b.voter.0));
            }
            let slack = 1e-12 * voter.rights.max(1.0);
            if !(b.exercised.is_finite()
                && b.exercised >= 0.0
                && b.exercised <= voter.rights + slack)
            {
                return Err(Error::OverExercised {
                    voter: b.voter.0,
                    exercised: b.exercised,
                    rights: voter.rights,
                });
            }
            let share = if voter.rights > 0.0 {
                (b.exercised / voter.rights).min(1.0)
            } else {
                0.0
            };
            out.push((b, share));
        }
        Ok(Self { ballots: out })
    }

    /// Every voter exercises all rights in the given direction.
    pub fn full(profile: &VoterProfile, directions: &[Direction]) -> Result<Self> {
        if directions.len() != profile.len() {
            return Err(Error::LengthMismatch {
                what: "directions",
                expected: profile.len(),
                got: directions.len(),
            });
        }
        let ballots = profile
            .voters()
            .iter()
            .zip(directions)
            .map(|(v, &direction)| Ballot {
                voter: v.id,
                direction,
                exercised: v.rights,
            })
            .collect();
        Self::new(profile, ballots)
    }

    pub fn ballots(&self) -> impl Iterator<Item = &Ballot> {
        self.ballots.iter().map(|(b, _)| b)
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub decision: Alternative,
    pub tie: bool,
    pub weighted_margin: f64,
}

impl DecisionOutcome {
    /// Applies the decision rule to a margin. `scale` is `Σ|w_i|`, which sets
    /// the tie band; `coin` is only called on a tie and returns `true` for A.
    pub fn from_margin(margin: f64, scale: f64, coin: impl FnOnce() -> bool) -> Self {
        let tie = is_tie(margin, scale);
        let decision = if tie {
            if coin() {
                Alternative::A
            } else {
                Alternative::B
            }
        } else if margin > 0.0 {
            Alternative::A
        } else {
            Alternative::B
        };
        Self {
            decision,
            tie,
            weighted_margin: margin,
        }
    }
}

pub(crate) fn is_tie(margin: f64, scale: f64) -> bool {
    margin == 0.0 || libm::fabs(margin) < TIE_TOLERANCE * scale
}

/// Seeded fair coin used to break ties.
pub fn tie_coin(seed: u64) -> bool {
    ChaCha8Rng::seed_from_u64(seed).gen_bool(0.5)
}

/// Weighted majority with a seeded coin flip on ties.
///
/// The margin is `Σ w_i · v_i · s_i`, where `s_i` is the share of its rights
/// the voter exercised.
pub fn decide(
    votes: &VoteProfile,
    weights: &BTreeMap<VoterId, f64>,
    tie_seed: u64,
) -> Result<DecisionOutcome> {
    let mut terms = Vec::with_capacity(votes.len());
    let mut scale = Vec::with_capacity(votes.len());
    for (b, share) in &votes.ballots {
        let w = *weights
            .get(&b.voter)
            .ok_or(Error::UnknownVoter(b.voter.0))?;
        if !w.is_finite() {
            return Err(Error::NonFiniteWeight(w));
        }
        terms.push(w * b.direction.sign() * share);
        scale.push(libm::fabs(w));
    }
    let margin = compensated_sum(terms);
    let scale = compensated_sum(scale);
    Ok(DecisionOutcome::from_margin(margin, scale, || {
        tie_coin(tie_seed)
    }))
}

/// Voting rights structure: `v_i = t_i / Σ t_j · total`.
pub fn normalize_rights(profile: &VoterProfile, total: f64) -> Result<Vec<f64>> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidParameter {
            name: "total",
            value: total,
        });
    }
    let sum = profile.total_rights();
    if sum <= 0.0 {
        return Err(Error::ZeroRights);
    }
    Ok(profile
        .voters()
        .iter()
        .map(|v| v.rights / sum * total)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(p: f64) -> Competence {
        Competence::new(p).unwrap()
    }

    #[test]
    fn weight_examples() {
        assert!((weight_from_competence(c(0.7311)).0 - 1.0).abs() < 5e-4);
        assert_eq!(weight_from_competence(c(0.5)).0, 0.0);
        assert!((weight_from_competence(c(0.8808)).0 - 2.0).abs() < 5e-4);
    }

    #[test]
    fn inverse_examples() {
        assert!((competence_from_weight(Weight(1.0)) - 0.7311).abs() < 5e-5);
        assert_eq!(competence_from_weight(Weight(0.0)), 0.5);
        assert!((competence_from_weight(Weight(-1.0)) - 0.2689).abs() < 5e-5);
        assert_eq!(competence_from_weight(Weight(1000.0)), 1.0);
        assert_eq!(competence_from_weight(Weight(-1000.0)), 0.0);
    }

    #[test]
    fn extreme_competence_is_rejected_not_clamped() {
        assert!(matches!(
            Competence::new(0.0),
            Err(Error::CompetenceOutOfRange(_))
        ));
        assert!(Competence::new(1.0).is_err());
        assert!(Competence::new(f64::NAN).is_err());
        assert!(Competence::new(1e-10).is_err());
        assert!(Competence::new(1e-9).is_ok());
        assert!(Competence::from_weight(25.0).is_err());
        assert!(Competence::from_weight(f64::INFINITY).is_err());
    }

    #[test]
    fn from_weight_keeps_weight_exactly() {
        let k = Competence::from_weight(0.1).unwrap();
        assert_eq!(k.weight().0, 0.1);
        assert!((k.ln_p().exp() + k.ln_q().exp() - 1.0).abs() < 1e-15);
    }

    fn profile3() -> VoterProfile {
        VoterProfile::from_competences(&[0.7, 0.7, 0.7]).unwrap()
    }

    fn wmap(ws: &[f64]) -> BTreeMap<VoterId, f64> {
        ws.iter()
            .enumerate()
            .map(|(i, &w)| (VoterId(i as u32), w))
            .collect()
    }

    #[test]
    fn decide_equal_weights_majority() {
        let p = profile3();
        let votes = VoteProfile::full(&p, &[Direction::A, Direction::A, Direction::B]).unwrap();
        let out = decide(&votes, &wmap(&[1.0, 1.0, 1.0]), 0).unwrap();
        assert_eq!(out.decision, Alternative::A);
        assert!(!out.tie);
        assert_eq!(out.weighted_margin, 1.0);
    }

    #[test]
    fn decide_heavier_voter_wins() {
        let p = VoterProfile::from_competences(&[0.7, 0.8]).unwrap();
        let votes = VoteProfile::full(&p, &[Direction::A, Direction::B]).unwrap();
        let out = decide(&votes, &wmap(&[1.0, 2.0]), 0).unwrap();
        assert_eq!(out.decision, Alternative::B);
        assert_eq!(out.weighted_margin, -1.0);
    }

    #[test]
    fn decide_tie_is_a_seeded_coin() {
        let p = VoterProfile::from_competences(&[0.7, 0.7]).unwrap();
        let votes = VoteProfile::full(&p, &[Direction::A, Direction::B]).unwrap();
        let mut seen_a = false;
        let mut seen_b = false;
        for seed in 0..64 {
            let first = decide(&votes, &wmap(&[1.0, 1.0]), seed).unwrap();
            let again = decide(&votes, &wmap(&[1.0, 1.0]), seed).unwrap();
            assert!(first.tie);
            assert_eq!(first, again);
            match first.decision {
                Alternative::A => seen_a = true,
                Alternative::B => seen_b = true,
            }
        }
        assert!(seen_a && seen_b);
    }

    #[test]
    fn decide_designed_equal_weights_tie() {
        // 0.1 + 0.2 vs 0.3 is not exactly zero in floating point
        let p = VoterProfile::from_competences(&[0.6, 0.6, 0.6]).unwrap();
        let votes = VoteProfile::full(&p, &[Direction::A, Direction::A, Direction::B]).unwrap();
        let out = decide(&votes, &wmap(&[0.1, 0.2, 0.3]), 3).unwrap();
        assert!(out.tie);
    }

    #[test]
    fn decide_all_abstain_is_tie() {
        let p = profile3();
        let votes = VoteProfile::full(&p, &[Direction::Abstain; 3]).unwrap();
        let out = decide(&votes, &wmap(&[1.0, 2.0, 3.0]), 11).unwrap();
        assert!(out.tie);
        assert_eq!(
            out.decision,
            decide(&votes, &wmap(&[1.0, 2.0, 3.0]), 11)
                .unwrap()
                .decision
        );
    }

    #[test]
    fn decide_uses_exercised_share() {
        let voters = vec![
            Voter::new(0, c(0.7), 10.0).unwrap(),
            Voter::new(1, c(0.7), 10.0).unwrap(),
        ];
        let p = VoterProfile::new(voters).unwrap();
        let votes = VoteProfile::new(
            &p,
            vec![
                Ballot {
                    voter: VoterId(0),
                    direction: Direction::A,
                    exercised: 3.0,
                },
                Ballot {
                    voter: VoterId(1),
                    direction: Direction::B,
                    exercised: 4.0,
                },
            ],
        )
        .unwrap();
        let out = decide(&votes, &wmap(&[10.0, 10.0]), 0).unwrap();
        assert_eq!(out.decision, Alternative::B);
        assert!((out.weighted_margin + 1.0).abs() < 1e-12);
    }

    #[test]
    fn decide_rejects_unknown_voter() {
        let p = profile3();
        let votes = VoteProfile::full(&p, &[Direction::A; 3]).unwrap();
        assert_eq!(
            decide(&votes, &wmap(&[1.0, 1.0]), 0),
            Err(Error::UnknownVoter(2))
        );
        let bad = VoteProfile::new(
            &p,
            vec![Ballot {
                voter: VoterId(9),
                direction: Direction::A,
                exercised: 1.0,
            }],
        );
        assert_eq!(bad, Err(Error::UnknownVoter(9)));
    }

    #[test]
    fn over_exercise_is_rejected() {
        let p = profile3();
        let bad = VoteProfile::new(
            &p,
            vec![Ballot {
                voter: VoterId(0),
                direction: Direction::A,
                exercised: 1.5,
            }],
        );
        assert!(matches!(bad, Err(Error::OverExercised { voter: 0, .. })));
    }

    #[test]
    fn normalize_examples() {
        let p = VoterProfile::from_competences(&[0.6; 4]).unwrap();
        assert_eq!(normalize_rights(&p, 4.0).unwrap(), vec![1.0; 4]);

        let voters = vec![
            Voter::new(0, c(0.7), 3.0).unwrap(),
            Voter::new(1, c(0.7), 1.0).unwrap(),
        ];
        let p = VoterProfile::new(voters).unwrap();
        assert_eq!(normalize_rights(&p, 1.0).unwrap(), vec![0.75, 0.25]);

        let mut whale = vec![Voter::new(0, c(0.731), 27_000.0).unwrap()];
        for i in 1..=3000 {
            whale.push(Voter::new(i, c(0.525), 1.0).unwrap());
        }
        let p = VoterProfile::new(whale).unwrap();
        let v = normalize_rights(&p, 301.0).unwrap();
        assert!((v[0] - 270.9).abs() < 1e-9);
        assert!((compensated_sum(v.iter().copied()) - 301.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_rejects_zero_rights() {
        let voters = vec![Voter::new(0, c(0.7), 0.0).unwrap()];
        let p = VoterProfile::new(voters).unwrap();
        assert_eq!(normalize_rights(&p, 1.0), Err(Error::ZeroRights));
    }

    #[test]
    fn profile_validation() {
        assert_eq!(VoterProfile::new(vec![]), Err(Error::EmptyProfile));
        let dup = vec![
            Voter::new(1, c(0.7), 1.0).unwrap(),
            Voter::new(1, c(0.6), 1.0).unwrap(),
        ];
        assert_eq!(VoterProfile::new(dup), Err(Error::DuplicateVoter(1)));
        assert!(Voter::new(0, c(0.7), -1.0).is_err());
    }

    #[test]
    fn orientation_flips_below_half() {
        let (o, flipped) = c(0.3).oriented();
        assert!(flipped);
        assert!((o.p() - 0.7).abs() < 1e-15);
        assert!(require_at_least_half(&[c(0.6), c(0.4)]).is_err());
        assert!(require_at_least_half(&[c(0.6), c(0.5)]).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip(p in 0.01f64..0.99) {
                let w = weight_from_competence(c(p));
                prop_assert!((competence_from_weight(w) - p).abs() < 1e-12);
            }

            #[test]
            fn antisymmetry(p in 0.01f64..0.99) {
                let a = weight_from_competence(c(p)).0;
                let b = weight_from_competence(c(1.0 - p)).0;
                prop_assert!((a + b).abs() < 1e-12);
                prop_assert_eq!(a > 0.0, p > 0.5);
            }

            #[test]
            fn weight_round_trip(w in -30.0f64..30.0) {
                let p = competence_from_weight(Weight(w));
                if (1e-9..=1.0 - 1e-9).contains(&p) {
                    let back = Competence::new(p).unwrap().weight().0;
                    // conditioning of the log-odds grows like 1 / (p (1 - p))
                    prop_assert!((back - w).abs() < 1e-12 / (p * (1.0 - p)));
                }
            }

            #[test]
            fn decision_is_scale_invariant(
                ws in proptest::collection::vec(-5.0f64..5.0, 1..8),
                dirs in proptest::collection::vec(0u8..3, 8),
                scale in 0.01f64..100.0,
            ) {
                let n = ws.len();
                let p = VoterProfile::from_competences(&alloc::vec![0.6; n]).unwrap();
                let directions: Vec<Direction> = dirs[..n].iter().map(|d| match d {
                    0 => Direction::A, 1 => Direction::Abstain, _ => Direction::B,
                }).collect();
                let votes = VoteProfile::full(&p, &directions).unwrap();
                let a = decide(&votes, &wmap(&ws), 1).unwrap();
                let scaled: Vec<f64> = ws.iter().map(|w| w * scale).collect();
                let b = decide(&votes, &wmap(&scaled), 1).unwrap();
                if !a.tie {
                    prop_assert!(!b.tie);
                    prop_assert_eq!(a.decision, b.decision);
                }
            }
        }
    }
}
