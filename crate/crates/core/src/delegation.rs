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

//! Transfer delegation: list-based allocation, the one-step minimal-gap
//! analysis, liquid democracy rounds, star-cluster coordination and
//! sortition.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{bipartition_gaps, correct_probability, CorrectnessReport, DEFAULT_GAP_CAP};
use crate::model::{require_at_least_half, Competence, VoterId, VoterProfile, TIE_TOLERANCE};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: VoterId,
    pub competence: Competence,
    pub available: bool,
}

/// A delegator's ranked candidates with target proportions fixed from their
/// optimal weights when the list is made.
#[derive(Debug, Clone, PartialEq)]
pub struct DelegationList {
    pub delegator: VoterId,
    candidates: Vec<Candidate>,
    targets: Vec<f64>,
}

impl DelegationList {
    pub fn new(delegator: VoterId, candidates: &[(VoterId, Competence)]) -> Result<Self> {
        let mut ids: Vec<u32> = candidates.iter().map(|c| c.0 .0).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVoter(w[0]));
        }
        let positive: Vec<f64> = candidates.iter().map(|c| c.1.weight().0.max(0.0)).collect();
        let total = compensated_sum(positive.iter().copied());
        if total <= 0.0 {
            return Err(Error::NoAvailableCandidate);
        }
        Ok(Self {
            delegator,
            candidates: candidates
                .iter()
                .map(|&(id, competence)| Candidate {
                    id,
                    competence,
                    available: true,
                })
                .collect(),
            targets: positive.iter().map(|w| w / total).collect(),
        })
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn target_proportions(&self) -> &[f64] {
        &self.targets
    }

    pub fn set_available(&mut self, id: VoterId, available: bool) -> Result<()> {
        let c = self
            .candidates
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or(Error::UnknownVoter(id.0))?;
        c.available = available;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub to: VoterId,
    pub proportion: f64,
    pub amount: f64,
}

/// Splits `rights` over the available candidates in proportion to their
/// original targets, renormalized.
pub fn list_based_allocate(list: &DelegationList, rights: f64) -> Result<Vec<Allocation>> {
    if !(rights.is_finite() && rights >= 0.0) {
        return Err(Error::InvalidRights(rights));
    }
    let total = compensated_sum(
        list.candidates
            .iter()
            .zip(&list.targets)
            .filter(|(c, _)| c.available)
            .map(|(_, &t)| t),
    );
    if total <= 0.0 {
        return Err(Error::NoAvailableCandidate);
    }
    Ok(list
        .candidates
        .iter()
        .zip(&list.targets)
        .filter(|(c, &t)| c.available && t > 0.0)
        .map(|(c, &t)| Allocation {
            to: c.id,
            proportion: t / total,
            amount: rights * t / total,
        })
        .collect())
}

/// A voter in `V̄`: exercises `exercised` rights and has the given competence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Participant {
    pub id: VoterId,
    pub exercised: f64,
    pub competence: Competence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recommendation {
    /// Transfer `amount` rights to `to`, a member of the losing coalition.
    Delegate {
        to: VoterId,
        amount: f64,
    },
    Hold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneStepAnalysis {
    /// `T*_{-i}`, the smallest gap in exercised rights.
    pub gap: f64,
    pub second_gap: Option<f64>,
    pub winning: Vec<VoterId>,
    pub losing: Vec<VoterId>,
    pub winning_weight: f64,
    pub losing_weight: f64,
    pub recommendation: Recommendation,
}

/// Whether voter `voter`, holding `own` rights outside `V̄`, should move a
/// small amount to the losing side of the closest coalition pair.
///
/// The transfer is sized between `T*` and the next smallest gap, so only that
/// pair's outcome changes.
pub fn one_step_minimal_gap_analysis(
    voter: VoterId,
    own: f64,
    others: &[Participant],
) -> Result<OneStepAnalysis> {
    if others.is_empty() {
        return Err(Error::TooFewVoters { need: 1, got: 0 });
    }
    if !(own.is_finite() && own >= 0.0) {
        return Err(Error::InvalidRights(own));
    }
    for p in others {
        if !(p.exercised.is_finite() && p.exercised >= 0.0) {
            return Err(Error::InvalidRights(p.exercised));
        }
    }
    let comps: Vec<Competence> = others.iter().map(|p| p.competence).collect();
    require_at_least_half(&comps)?;
    let t: Vec<f64> = others.iter().map(|p| p.exercised).collect();
    let g = bipartition_gaps(&t, DEFAULT_GAP_CAP)?;
    let band = TIE_TOLERANCE * (compensated_sum(t.iter().copied()) + own);
    if own - g.gap <= band {
        return Err(Error::NotMinimallyDecisive(voter.0));
    }
    let weight_of = |idx: &[usize]| compensated_sum(idx.iter().map(|&k| comps[k].weight().0));
    let winning_weight = weight_of(&g.heavier);
    let losing_weight = weight_of(&g.lighter);
    let recommendation = if losing_weight > winning_weight {
        let to = g
            .lighter
            .iter()
            .copied()
            .max_by(|&a, &b| {
                comps[a]
                    .weight()
                    .0
                    .total_cmp(&comps[b].weight().0)
                    .then(others[b].id.cmp(&others[a].id))
            })
            .expect("a heavier losing side is nonempty");
        let amount = match g.second_gap {
            Some(g2) if g2 > g.gap => own.min(0.5 * (g.gap + g2)),
            _ => own,
        };
        Recommendation::Delegate {
            to: others[to].id,
            amount,
        }
    } else {
        Recommendation::Hold
    };
    Ok(OneStepAnalysis {
        gap: g.gap,
        second_gap: g.second_gap,
        winning: g.heavier.iter().map(|&k| others[k].id).collect(),
        losing: g.lighter.iter().map(|&k| others[k].id).collect(),
        winning_weight,
        losing_weight,
        recommendation,
    })
}

/// Per-voter knowledge sets `N_i`, always containing `i`. Indices follow the
/// profile order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarClusterGraph {
    clusters: Vec<Vec<usize>>,
}

impl StarClusterGraph {
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        let n = clusters.len();
        let mut out = Vec::with_capacity(n);
        for (i, mut c) in clusters.into_iter().enumerate() {
            if let Some(&bad) = c.iter().find(|&&k| k >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            c.push(i);
            c.sort_unstable();
            c.dedup();
            out.push(c);
        }
        Ok(Self { clusters: out })
    }

    /// Knowledge sets given by voter id; voters without an entry know only
    /// themselves.
    pub fn from_ids(profile: &VoterProfile, known: &[(VoterId, Vec<VoterId>)]) -> Result<Self> {
        let mut clusters = vec![Vec::new(); profile.len()];
        for (owner, list) in known {
            let i = profile
                .index_of(*owner)
                .ok_or(Error::UnknownVoter(owner.0))?;
            for v in list {
                clusters[i].push(profile.index_of(*v).ok_or(Error::UnknownVoter(v.0))?);
            }
        }
        Self::new(clusters)
    }

    pub fn complete(n: usize) -> Self {
        Self {
            clusters: (0..n).map(|_| (0..n).collect()).collect(),
        }
    }

    pub fn isolated(n: usize) -> Self {
        Self {
            clusters: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster(&self, i: usize) -> &[usize] {
        &self.clusters[i]
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            core::cmp::Ordering::Less => self.parent[a] = b,
            core::cmp::Ordering::Greater => self.parent[b] = a,
            core::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// True when every pair of voters is joined by a chain of overlapping
/// clusters.
pub fn star_cluster_connected(graph: &StarClusterGraph) -> bool {
    let n = graph.len();
    let mut sets = DisjointSets::new(n);
    for (i, c) in graph.clusters.iter().enumerate() {
        for &k in c {
            sets.union(i, k);
        }
    }
    let root = if n == 0 { 0 } else { sets.find(0) };
    (0..n).all(|i| sets.find(i) == root)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStepOutcome {
    /// Holdings after every voter splits its rights over its own cluster.
    pub after_step_one: Vec<f64>,
    /// Optimal weights as reconstructed from step-one transfers, anchored at
    /// the reference voter's own knowledge.
    pub recovered_weights: Vec<f64>,
    /// Holdings after step two, all exercised in step three.
    pub final_holdings: Vec<f64>,
    pub reference: VoterId,
}

pub fn three_step_coordination(
    profile: &VoterProfile,
    graph: &StarClusterGraph,
) -> Result<ThreeStepOutcome> {
    let n = profile.len();
    if graph.len() != n {
        return Err(Error::LengthMismatch {
            what: "star cluster graph",
            expected: n,
            got: graph.len(),
        });
    }
    let comps = profile.competences();
    require_at_least_half(&comps)?;
    if !star_cluster_connected(graph) {
        return Err(Error::Disconnected);
    }
    let voters = profile.voters();
    if let Some(v) = voters.iter().find(|v| v.rights <= 0.0) {
        return Err(Error::RecoveryNeedsRights(v.id.0));
    }
    let w: Vec<f64> = comps.iter().map(|c| c.weight().0).collect();

    // Step 1: transfers[j] lists (recipient, amount) for voter j.
    let transfers: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|j| {
            let c = graph.cluster(j);
            let total = compensated_sum(c.iter().map(|&y| w[y]));
            if total > 0.0 {
                c.iter()
                    .map(|&y| (y, voters[j].rights * w[y] / total))
                    .collect()
            } else {
                vec![(j, voters[j].rights)]
            }
        })
        .collect();
    let mut after_step_one = vec![0.0; n];
    for list in &transfers {
        for &(y, a) in list {
            after_step_one[y] += a;
        }
    }

    // Weight recovery from the lowest-id voter's viewpoint.
    let reference = (0..n)
        .min_by_key(|&i| voters[i].id)
        .expect("profile is nonempty");
    let mut containing = vec![Vec::new(); n];
    for j in 0..n {
        for &y in graph.cluster(j) {
            containing[y].push(j);
        }
    }
    let mut known: Vec<Option<f64>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &y in graph.cluster(reference) {
        known[y] = Some(w[y]);
        queue.push_back(y);
    }
    let mut visited = vec![false; n];
    while let Some(k) = queue.pop_front() {
        let wk = known[k].expect("queued voters are known");
        if wk <= 0.0 {
            continue;
        }
        for &j in &containing[k] {
            if visited[j] {
                continue;
            }
            let amount_k = transfers[j].iter().find(|t| t.0 == k).map_or(0.0, |t| t.1);
            if amount_k <= 0.0 {
                continue;
            }
            visited[j] = true;
            for &(y, a) in &transfers[j] {
                if known[y].is_none() {
                    known[y] = Some(wk * a / amount_k);
                    queue.push_back(y);
                }
            }
        }
    }
    let mut recovered = Vec::with_capacity(n);
    for (i, k) in known.iter().enumerate() {
        recovered.push(k.ok_or(Error::Unrecoverable(voters[i].id.0))?);
    }

    let total_w = compensated_sum(recovered.iter().copied());
    if total_w <= 0.0 {
        return Err(Error::AllIgnorant);
    }
    let total_rights = profile.total_rights();
    let final_holdings = recovered
        .iter()
        .map(|x| total_rights * x / total_w)
        .collect();
    Ok(ThreeStepOutcome {
        after_step_one,
        recovered_weights: recovered,
        final_holdings,
        reference: voters[reference].id,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Visibility {
    Complete,
    Graph(StarClusterGraph),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    None,
    /// Delegate to the most competent visible voter that is strictly more
    /// competent than oneself; equal competences go to the lowest id.
    MaxCompetence,
    /// Delegate to a uniformly drawn member of
    /// `{j visible : p_j - p_i > alpha}`. Each voter draws once from its own
    /// substream of `seed`, so the choice is stable across rounds.
    ApprovedRandom {
        alpha: f64,
        seed: u64,
    },
    /// Fixed delegation target per voter (by profile index).
    Explicit(Vec<Option<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelegationState {
    pub holdings: Vec<f64>,
    pub round: usize,
}

impl DelegationState {
    pub fn initial(profile: &VoterProfile) -> Self {
        Self {
            holdings: profile.rights(),
            round: 0,
        }
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.holdings.iter().copied())
    }
}

/// Each voter's delegation target under `strategy`, or `None` to self-hold.
pub fn delegation_choices(
    profile: &VoterProfile,
    visibility: &Visibility,
    strategy: &Strategy,
) -> Result<Vec<Option<usize>>> {
    let n = profile.len();
    if let Visibility::Graph(g) = visibility {
        if g.len() != n {
            return Err(Error::LengthMismatch {
                what: "visibility graph",
                expected: n,
                got: g.len(),
            });
        }
    }
    let voters = profile.voters();
    let p = |i: usize| voters[i].competence.p();
    let visible = |i: usize| -> Vec<usize> {
        match visibility {
            Visibility::Complete => (0..n).collect(),
            Visibility::Graph(g) => g.cluster(i).to_vec(),
        }
    };
    match strategy {
        Strategy::None => Ok(vec![None; n]),
        Strategy::Explicit(targets) => {
            if targets.len() != n {
                return Err(Error::LengthMismatch {
                    what: "explicit delegation targets",
                    expected: n,
                    got: targets.len(),
                });
            }
            for (i, t) in targets.iter().enumerate() {
                if let Some(t) = *t {
                    if t >= n {
                        return Err(Error::IndexOutOfRange { index: t, len: n });
                    }
                    if t == i {
                        return Err(Error::InvalidScenario(alloc::format!(
                            "voter {} delegates to itself",
                            voters[i].id
                        )));
                    }
                }
            }
            Ok(targets.clone())
        }
        Strategy::MaxCompetence => {
            let better =
                |a: usize, b: usize| p(a) > p(b) || (p(a) == p(b) && voters[a].id < voters[b].id);
            let global_best = (0..n).reduce(|a, b| if better(b, a) { b } else { a });
            Ok((0..n)
                .map(|i| {
                    let best = match visibility {
                        Visibility::Complete => global_best,
                        Visibility::Graph(g) => g
                            .cluster(i)
                            .iter()
                            .copied()
                            .filter(|&j| j != i)
                            .reduce(|a, b| if better(b, a) { b } else { a }),
                    };
                    best.filter(|&j| j != i && p(j) > p(i))
                })
                .collect())
        }
        Strategy::ApprovedRandom { alpha, seed } => {
            if !(alpha.is_finite() && *alpha >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: *alpha,
                });
            }
            Ok((0..n)
                .map(|i| {
                    let approved: Vec<usize> = visible(i)
                        .into_iter()
                        .filter(|&j| j != i && p(j) - p(i) > *alpha)
                        .collect();
                    if approved.is_empty() {
                        return None;
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(i as u64);
                    Some(approved[rng.gen_range(0..approved.len())])
                })
                .collect())
        }
    }
}

/// One synchronous round: every delegating voter passes everything it holds
/// to its target.
pub fn transfer_round(choices: &[Option<usize>], state: &DelegationState) -> DelegationState {
    let mut next = vec![0.0; state.holdings.len()];
    for (i, &h) in state.holdings.iter().enumerate() {
        match choices[i] {
            Some(t) => next[t] += h,
            None => next[i] += h,
        }
    }
    DelegationState {
        holdings: next,
        round: state.round + 1,
    }
}

pub fn liquid_round(
    profile: &VoterProfile,
    visibility: &Visibility,
    strategy: &Strategy,
    state: &DelegationState,
) -> Result<DelegationState> {
    let choices = delegation_choices(profile, visibility, strategy)?;
    Ok(transfer_round(&choices, state))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiquidOutcome {
    /// Rights voted by each voter; rights trapped by cycles are removed.
    pub state: DelegationState,
    pub choices: Vec<Option<usize>>,
    /// Holdings after each round, starting with round 1.
    pub history: Vec<Vec<f64>>,
    pub converged: bool,
    /// Non-delegating voters holding rights at the end.
    pub gurus: Vec<VoterId>,
    /// Voters whose delegation chain runs into a cycle.
    pub cycle_abstained: Vec<VoterId>,
    pub abstained_rights: f64,
    /// Largest share of all rights held by a single voter.
    pub max_share: f64,
}

/// Marks every voter whose chain of choices never reaches a self-holder.
fn cycle_bound(choices: &[Option<usize>]) -> Vec<bool> {
    let n = choices.len();
    // 0 unknown, 1 in progress, 2 reaches a guru, 3 cycle-bound
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut cur = start;
        let verdict = loop {
            match state[cur] {
                2 => break 2,
                3 | 1 => break 3,
                _ => {}
            }
            state[cur] = 1;
            path.push(cur);
            match choices[cur] {
                None => break 2,
                Some(t) => cur = t,
            }
        };
        for k in path {
            state[k] = verdict;
        }
    }
    state.into_iter().map(|s| s == 3).collect()
}

pub fn run_liquid(
    profile: &VoterProfile,
    visibility: &Visibility,
    strategy: &Strategy,
    max_rounds: usize,
) -> Result<LiquidOutcome> {
    if max_rounds == 0 {
        return Err(Error::InvalidParameter {
            name: "max_rounds",
            value: 0.0,
        });
    }
    let choices = delegation_choices(profile, visibility, strategy)?;
    let mut state = DelegationState::initial(profile);
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_rounds {
        state = transfer_round(&choices, &state);
        history.push(state.holdings.clone());
        let moving = state
            .holdings
            .iter()
            .zip(&choices)
            .any(|(h, c)| c.is_some() && *h > 0.0);
        if !moving {
            converged = true;
            break;
        }
    }
    let trapped = cycle_bound(&choices);
    let voters = profile.voters();
    let mut abstained = Vec::new();
    for (i, &t) in trapped.iter().enumerate() {
        if t {
            abstained.push(state.holdings[i]);
            state.holdings[i] = 0.0;
        }
    }
    let total = profile.total_rights();
    let max = state.holdings.iter().copied().fold(0.0, f64::max);
    Ok(LiquidOutcome {
        gurus: (0..voters.len())
            .filter(|&i| choices[i].is_none() && state.holdings[i] > 0.0)
            .map(|i| voters[i].id)
            .collect(),
        cycle_abstained: (0..voters.len())
            .filter(|&i| trapped[i])
            .map(|i| voters[i].id)
            .collect(),
        abstained_rights: compensated_sum(abstained),
        max_share: if total > 0.0 { max / total } else { 0.0 },
        state,
        choices,
        history,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionWeighting {
    /// Uniform draw without replacement.
    Uniform,
    /// Draws proportional to rights, with replacement; a voter drawn more
    /// than once gets several seats.
    RightsProportional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortitionConfig {
    pub size: usize,
    pub weighting: SelectionWeighting,
    /// Per-voter probability of being willing to serve; empty means all 1.
    pub willingness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Committee {
    /// Profile index and seat count, in profile order.
    pub members: Vec<(usize, usize)>,
    pub pool_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortitionOutcome {
    pub committee: Committee,
    /// One vote per seat.
    pub majority: CorrectnessReport,
    /// Distinct members voting with optimal weights.
    pub optimal: CorrectnessReport,
    /// Seat-weighted mean competence of the committee.
    pub mean_competence: f64,
}

pub fn sortition_draw<R: Rng + ?Sized>(
    profile: &VoterProfile,
    config: &SortitionConfig,
    rng: &mut R,
    enumeration_cap: usize,
) -> Result<SortitionOutcome> {
    let n = profile.len();
    if config.size == 0 || config.size > n {
        return Err(Error::InvalidParameter {
            name: "committee size",
            value: config.size as f64,
        });
    }
    if !config.willingness.is_empty() && config.willingness.len() != n {
        return Err(Error::LengthMismatch {
            what: "willingness",
            expected: n,
            got: config.willingness.len(),
        });
    }
    if let Some(&bad) = config
        .willingness
        .iter()
        .find(|x| !(0.0..=1.0).contains(*x))
    {
        return Err(Error::InvalidParameter {
            name: "willingness",
            value: bad,
        });
    }
    let pool: Vec<usize> = (0..n)
        .filter(|&i| {
            let will = config.willingness.get(i).copied().unwrap_or(1.0);
            rng.gen::<f64>() < will
        })
        .collect();
    let voters = profile.voters();
    let mut seats = vec![0usize; n];
    match config.weighting {
        SelectionWeighting::Uniform => {
            if pool.len() < config.size {
                return Err(Error::PoolTooSmall {
                    available: pool.len(),
                    size: config.size,
                });
            }
            for k in rand::seq::index::sample(rng, pool.len(), config.size) {
                seats[pool[k]] += 1;
            }
        }
        SelectionWeighting::RightsProportional => {
            let dist =
                WeightedIndex::new(pool.iter().map(|&i| voters[i].rights)).map_err(|_| {
                    Error::PoolTooSmall {
                        available: 0,
                        size: config.size,
                    }
                })?;
            for _ in 0..config.size {
                seats[pool[dist.sample(rng)]] += 1;
            }
        }
    }
    let members: Vec<(usize, usize)> = seats
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .map(|(i, &s)| (i, s))
        .collect();
    let comps: Vec<Competence> = members.iter().map(|&(i, _)| voters[i].competence).collect();
    let seat_weights: Vec<f64> = members.iter().map(|&(_, s)| s as f64).collect();
    let optimal_weights: Vec<f64> = comps.iter().map(|c| c.weight().0).collect();
    let majority = correct_probability(&seat_weights, &comps, enumeration_cap)?;
    let optimal = correct_probability(&optimal_weights, &comps, enumeration_cap)?;
    let mean_competence = compensated_sum(
        members
            .iter()
            .map(|&(i, s)| voters[i].competence.p() * s as f64),
    ) / config.size as f64;
    Ok(SortitionOutcome {
        committee: Committee {
            members,
            pool_size: pool.len(),
        },
        majority,
        optimal,
        mean_competence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SortitionSummary {
    pub draws: u64,
    pub mean_majority: f64,
    pub mean_optimal: f64,
    pub mean_competence: f64,
}

/// Averages [`sortition_draw`] over `draws` committees; draw `k` uses
/// substream `k` of `seed`.
pub fn sortition_average(
    profile: &VoterProfile,
    config: &SortitionConfig,
    draws: u64,
    seed: u64,
    enumeration_cap: usize,
) -> Result<SortitionSummary> {
    if draws == 0 {
        return Err(Error::InvalidParameter {
            name: "draws",
            value: 0.0,
        });
    }
    let (mut maj, mut opt, mut comp) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let o = sortition_draw(profile, config, &mut rng, enumeration_cap)?;
        maj.push(o.majority.probability);
        opt.push(o.optimal.probability);
        comp.push(o.mean_competence);
    }
    let d = draws as f64;
    Ok(SortitionSummary {
        draws,
        mean_majority: compensated_sum(maj) / d,
        mean_optimal: compensated_sum(opt) / d,
        mean_competence: compensated_sum(comp) / d,
    })
}
