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

//! Scenarios, Monte Carlo estimation and the named experiments.
//!
//! Monte Carlo trial `k` draws from stream `k` of a ChaCha8 generator seeded
//! with the scenario seed, so any split of the trials across workers gives
//! the same success count.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::abstention::{
    approx_abstention, approx_abstention_weights, dependent_abstention,
    optimal_abstention_independent, shortfall_bound, RatioChoice, SignalAllocationPlan,
};
use crate::delegation::{
    list_based_allocate, one_step_minimal_gap_analysis, run_liquid, sortition_draw,
    three_step_coordination, DelegationList, Participant, Recommendation, SortitionConfig,
    StarClusterGraph, Strategy, Visibility,
};
use crate::error::{Error, Result};
use crate::exact::{
    block_correct_probability, correct_probability, exact_correct_probability, flooding_trajectory,
    halving_pairs, CorrectnessReport, Method, MethodDetail, VoterBlock, WeightedVoter,
    DEFAULT_ENUMERATION_CAP,
};
use crate::model::{
    competence_from_weight, is_tie, Competence, Direction, Voter, VoterId, VoterProfile, Weight,
};
use crate::numeric::{binomial_log_pmf, compensated_sum, CompensatedSum};
use crate::signals::{
    dependence_correct_probability, stance_vote_correct_probability, voter_stance, Signal,
    SignalIncidence, SignalRealization,
};

#[derive(Debug, Clone, PartialEq)]
pub enum RuleWeights {
    /// Exercised rights are the weights.
    Rights,
    /// Every participating voter votes with its log-odds weight.
    Optimal,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mechanism {
    None,
    /// `None` uses the exact ratio `R`, otherwise the substitute `R̃`.
    Abstention {
        r_tilde: Option<f64>,
    },
    DependentAbstention {
        r_tilde: Option<f64>,
    },
    /// Each list moves all of its delegator's rights.
    ListDelegation {
        lists: Vec<DelegationList>,
    },
    /// The named voter sits outside the exercising set and applies the
    /// minimal-gap analysis to everyone else's rights.
    OneStep {
        voter: VoterId,
    },
    ThreeStep {
        graph: StarClusterGraph,
    },
    Liquid {
        visibility: Visibility,
        strategy: Strategy,
        max_rounds: usize,
    },
    Sortition {
        config: SortitionConfig,
    },
}

impl Mechanism {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Abstention { .. } => "abstention",
            Self::DependentAbstention { .. } => "dependent-abstention",
            Self::ListDelegation { .. } => "list",
            Self::OneStep { .. } => "one-step",
            Self::ThreeStep { .. } => "three-step",
            Self::Liquid { .. } => "liquid",
            Self::Sortition { .. } => "sortition",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub profile: VoterProfile,
    pub signals: Option<SignalIncidence>,
    pub mechanism: Mechanism,
    pub rule: RuleWeights,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        profile: VoterProfile,
        signals: Option<SignalIncidence>,
        mechanism: Mechanism,
        rule: RuleWeights,
        seed: u64,
    ) -> Result<Self> {
        let n = profile.len();
        if let RuleWeights::Explicit(w) = &rule {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    what: "explicit rule weights",
                    expected: n,
                    got: w.len(),
                });
            }
            if let Some(&bad) = w.iter().find(|x| !x.is_finite()) {
                return Err(Error::NonFiniteWeight(bad));
            }
        }
        if let Some(inc) = &signals {
            let ids: Vec<VoterId> = profile.voters().iter().map(|v| v.id).collect();
            if inc.voters() != &ids[..] {
                return Err(Error::InvalidScenario(
                    "signal incidence must list the profile's voters in profile order".to_string(),
                ));
            }
        }
        match &mechanism {
            Mechanism::DependentAbstention { .. } => {
                if signals.is_none() {
                    return Err(Error::InvalidScenario(
                        "dependent-abstention needs signals".to_string(),
                    ));
                }
                if rule != RuleWeights::Rights {
                    return Err(Error::InvalidScenario(
                        "dependent-abstention votes with exercised rights only".to_string(),
                    ));
                }
            }
            Mechanism::ListDelegation { lists } => {
                for l in lists {
                    profile
                        .index_of(l.delegator)
                        .ok_or(Error::UnknownVoter(l.delegator.0))?;
                    for c in l.candidates() {
                        profile.index_of(c.id).ok_or(Error::UnknownVoter(c.id.0))?;
                    }
                }
            }
            Mechanism::OneStep { voter } => {
                profile
                    .index_of(*voter)
                    .ok_or(Error::UnknownVoter(voter.0))?;
            }
            Mechanism::ThreeStep { graph } => check_graph_len(graph, n)?,
            Mechanism::Liquid {
                visibility: Visibility::Graph(g),
                ..
            } => check_graph_len(g, n)?,
            _ => {}
        }
        Ok(Self {
            profile,
            signals,
            mechanism,
            rule,
            seed,
        })
    }
}

fn check_graph_len(g: &StarClusterGraph, n: usize) -> Result<()> {
    if g.len() != n {
        return Err(Error::LengthMismatch {
            what: "star cluster graph",
            expected: n,
            got: g.len(),
        });
    }
    Ok(())
}

/// How ballots arise from the truth.
#[derive(Debug, Clone, PartialEq)]
pub enum VoteModel {
    /// Each voter is independently correct with its competence.
    Independent,
    /// Each voter casts the stance implied by the signals it receives.
    SignalStance(SignalIncidence),
    /// Per-signal allocations netted into one ballot per voter; the margin is
    /// the sum over signals of `direction · totals[s]`.
    SignalAllocation {
        incidence: SignalIncidence,
        plan: SignalAllocationPlan,
    },
}

/// A scenario after its mechanism has run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub competences: Vec<Competence>,
    pub exercised: Vec<f64>,
    pub rule_weights: Vec<f64>,
    pub votes: VoteModel,
}

pub fn resolve(scenario: &Scenario) -> Result<Resolution> {
    let profile = &scenario.profile;
    let n = profile.len();
    let mut competences = profile.competences();
    let mut votes = match &scenario.signals {
        Some(inc) => VoteModel::SignalStance(inc.clone()),
        None => VoteModel::Independent,
    };
    let exercised: Vec<f64> = match &scenario.mechanism {
        Mechanism::None => profile.rights(),
        Mechanism::Abstention { r_tilde } => {
            let (oriented, _) = crate::abstention::orient_profile(profile)?;
            competences = oriented.competences();
            let plan = match r_tilde {
                None => optimal_abstention_independent(&oriented)?,
                Some(r) => approx_abstention(&oriented, *r)?,
            };
            plan.exercised()
        }
        Mechanism::DependentAbstention { r_tilde } => {
            let inc = scenario.signals.as_ref().expect("checked in Scenario::new");
            let ratio = r_tilde.map_or(RatioChoice::Exact, RatioChoice::Substitute);
            let plan = dependent_abstention(inc, Some(&profile.rights()), ratio)?;
            let mut exercised = vec![0.0; n];
            for e in &plan.entries {
                let j = profile
                    .index_of(e.voter)
                    .expect("incidence voters are profile voters");
                exercised[j] += e.exercised;
            }
            votes = VoteModel::SignalAllocation {
                incidence: inc.clone(),
                plan,
            };
            exercised
        }
        Mechanism::ListDelegation { lists } => {
            let mut held = profile.rights();
            for l in lists {
                let from = profile
                    .index_of(l.delegator)
                    .expect("checked in Scenario::new");
                let own = profile.voters()[from].rights;
                for a in list_based_allocate(l, own)? {
                    held[profile.index_of(a.to).expect("checked")] += a.amount;
                }
                held[from] -= own;
            }
            held
        }
        Mechanism::OneStep { voter } => {
            let i = profile.index_of(*voter).expect("checked in Scenario::new");
            let voters = profile.voters();
            let others: Vec<Participant> = voters
                .iter()
                .enumerate()
                .filter(|&(j, v)| j != i && v.rights > 0.0)
                .map(|(_, v)| Participant {
                    id: v.id,
                    exercised: v.rights,
                    competence: v.competence,
                })
                .collect();
            let analysis = one_step_minimal_gap_analysis(*voter, voters[i].rights, &others)?;
            let mut held = profile.rights();
            held[i] = 0.0;
            if let Recommendation::Delegate { to, amount } = analysis.recommendation {
                held[profile
                    .index_of(to)
                    .expect("participant ids come from the profile")] += amount;
            }
            held
        }
        Mechanism::ThreeStep { graph } => three_step_coordination(profile, graph)?.final_holdings,
        Mechanism::Liquid {
            visibility,
            strategy,
            max_rounds,
        } => {
            run_liquid(profile, visibility, strategy, *max_rounds)?
                .state
                .holdings
        }
        Mechanism::Sortition { config } => {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
            let out = sortition_draw(profile, config, &mut rng, DEFAULT_ENUMERATION_CAP)?;
            let mut seats = vec![0.0; n];
            for (i, s) in out.committee.members {
                seats[i] = s as f64;
            }
            seats
        }
    };
    let rule_weights = match &scenario.rule {
        RuleWeights::Rights => exercised.clone(),
        RuleWeights::Optimal => exercised
            .iter()
            .zip(&competences)
            .map(|(&e, c)| if e > 0.0 { c.weight().0 } else { 0.0 })
            .collect(),
        RuleWeights::Explicit(w) => exercised
            .iter()
            .zip(w)
            .map(|(&e, &x)| if e > 0.0 { x } else { 0.0 })
            .collect(),
    };
    Ok(Resolution {
        competences,
        exercised,
        rule_weights,
        votes,
    })
}

/// Exact probability of a correct decision for a resolved scenario.
pub fn resolution_probability(
    res: &Resolution,
    enumeration_cap: usize,
) -> Result<CorrectnessReport> {
    match &res.votes {
        VoteModel::Independent => {
            correct_probability(&res.rule_weights, &res.competences, enumeration_cap)
        }
        VoteModel::SignalStance(inc) => {
            stance_vote_correct_probability(inc, &res.rule_weights, enumeration_cap)
        }
        VoteModel::SignalAllocation { incidence, plan } => {
            let comps: Vec<Competence> = incidence.signals().iter().map(|s| s.competence).collect();
            correct_probability(&plan.signal_totals(), &comps, enumeration_cap)
        }
    }
}

pub fn exact_probability(scenario: &Scenario, enumeration_cap: usize) -> Result<CorrectnessReport> {
    resolution_probability(&resolve(scenario)?, enumeration_cap)
}

/// Per-voter ballots for one draw of the truth (A is correct).
pub fn sample_realization<R: Rng + ?Sized>(res: &Resolution, rng: &mut R) -> Vec<Direction> {
    match &res.votes {
        VoteModel::Independent => res
            .competences
            .iter()
            .map(|c| {
                if rng.gen::<f64>() < c.p() {
                    Direction::A
                } else {
                    Direction::B
                }
            })
            .collect(),
        VoteModel::SignalStance(inc) => {
            let real = SignalRealization::sample(inc.signals(), rng);
            (0..inc.voters().len())
                .map(|j| voter_stance(inc, j, &real))
                .collect()
        }
        VoteModel::SignalAllocation { incidence, plan } => {
            let real = SignalRealization::sample(incidence.signals(), rng);
            plan.ballots(&real).into_iter().map(|b| b.0).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Group {
    count: u64,
    p: f64,
    weight: f64,
}

/// Precomputed sampler for the trials of one resolved scenario.
#[derive(Debug, Clone)]
pub struct TrialSampler {
    kind: SamplerKind,
    scale: f64,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Groups(Vec<(Group, Option<Binomial>)>),
    Stance {
        incidence: SignalIncidence,
        rule_weights: Vec<f64>,
    },
    Allocation {
        signals: Vec<Signal>,
        totals: Vec<f64>,
    },
}

impl TrialSampler {
    pub fn new(res: &Resolution) -> Result<Self> {
        let (kind, scale) = match &res.votes {
            VoteModel::Independent => {
                let mut groups: Vec<Group> = Vec::new();
                for (&w, c) in res.rule_weights.iter().zip(&res.competences) {
                    if w == 0.0 {
                        continue;
                    }
                    match groups.iter_mut().find(|g| {
                        g.weight.to_bits() == w.to_bits() && g.p.to_bits() == c.p().to_bits()
                    }) {
                        Some(g) => g.count += 1,
                        None => groups.push(Group {
                            count: 1,
                            p: c.p(),
                            weight: w,
                        }),
                    }
                }
                let scale =
                    compensated_sum(groups.iter().map(|g| libm::fabs(g.weight) * g.count as f64));
                let mut out = Vec::with_capacity(groups.len());
                for g in groups {
                    let dist = if g.count > 1 {
                        Some(
                            Binomial::new(g.count, g.p).map_err(|_| Error::InvalidParameter {
                                name: "binomial p",
                                value: g.p,
                            })?,
                        )
                    } else {
                        None
                    };
                    out.push((g, dist));
                }
                (SamplerKind::Groups(out), scale)
            }
            VoteModel::SignalStance(inc) => (
                SamplerKind::Stance {
                    incidence: inc.clone(),
                    rule_weights: res.rule_weights.clone(),
                },
                compensated_sum(res.rule_weights.iter().map(|w| libm::fabs(*w))),
            ),
            VoteModel::SignalAllocation { incidence, plan } => {
                let totals = plan.signal_totals();
                let scale = compensated_sum(totals.iter().map(|w| libm::fabs(*w)));
                (
                    SamplerKind::Allocation {
                        signals: incidence.signals().to_vec(),
                        totals,
                    },
                    scale,
                )
            }
        };
        Ok(Self { kind, scale })
    }

    /// Whether trial `index` under `seed` decides correctly.
    pub fn trial(&self, seed: u64, index: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let margin = match &self.kind {
            SamplerKind::Groups(groups) => {
                let mut m = CompensatedSum::new();
                for (g, dist) in groups {
                    let correct = match dist {
                        Some(d) => d.sample(&mut rng),
                        None => u64::from(rng.gen::<f64>() < g.p),
                    };
                    m += g.weight * (2.0 * correct as f64 - g.count as f64);
                }
                m.value()
            }
            SamplerKind::Stance {
                incidence,
                rule_weights,
            } => {
                let real = SignalRealization::sample(incidence.signals(), &mut rng);
                compensated_sum(
                    (0..rule_weights.len())
                        .map(|j| rule_weights[j] * voter_stance(incidence, j, &real).sign()),
                )
            }
            SamplerKind::Allocation { signals, totals } => {
                let real = SignalRealization::sample(signals, &mut rng);
                compensated_sum(
                    totals
                        .iter()
                        .zip(&real.directions)
                        .map(|(t, d)| t * d.sign()),
                )
            }
        };
        if is_tie(margin, self.scale) {
            rng.gen_bool(0.5)
        } else {
            margin > 0.0
        }
    }

    /// Successes over trials `start..end`.
    pub fn successes(&self, seed: u64, start: u64, end: u64) -> u64 {
        (start..end).filter(|&k| self.trial(seed, k)).count() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub p_hat: f64,
    pub trials: u64,
    pub successes: u64,
    pub std_error: f64,
    pub seed: u64,
}

impl EstimateReport {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        Self {
            p_hat,
            trials,
            successes,
            std_error: libm::sqrt(p_hat * (1.0 - p_hat) / trials as f64),
            seed,
        }
    }

    pub fn as_correctness(&self) -> CorrectnessReport {
        CorrectnessReport {
            probability: self.p_hat,
            method: Method::MonteCarlo,
            detail: MethodDetail::MonteCarlo {
                trials: self.trials,
                std_error: self.std_error,
            },
        }
    }
}

/// Sequential estimator; the std companion crate splits the same trials
/// across threads.
pub fn monte_carlo_p(scenario: &Scenario, trials: u64) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
        });
    }
    let sampler = TrialSampler::new(&resolve(scenario)?)?;
    let successes = sampler.successes(scenario.seed, 0, trials);
    Ok(EstimateReport::from_counts(
        successes,
        trials,
        scenario.seed,
    ))
}

/// One line of an experiment or command report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub metric: String,
    pub value: f64,
    /// Base-10 logarithm, given for probabilities too small to read off
    /// `value` and for values that underflow.
    pub log10: Option<f64>,
    pub method: String,
    pub context: String,
}

impl ReportRow {
    pub fn new(
        id: &str,
        metric: impl Into<String>,
        value: f64,
        method: &str,
        context: impl Into<String>,
    ) -> Self {
        Self {
            id: id.to_string(),
            metric: metric.into(),
            value,
            log10: None,
            method: method.to_string(),
            context: context.into(),
        }
    }

    /// A probability row; small values also carry their log10.
    pub fn probability(
        id: &str,
        metric: impl Into<String>,
        report: &CorrectnessReport,
        context: impl Into<String>,
    ) -> Self {
        let mut row = Self::new(
            id,
            metric,
            report.probability,
            report.method.name(),
            context,
        );
        let mut ctx = row.context.clone();
        match report.detail {
            MethodDetail::Enumeration { subsets } => {
                push_ctx(&mut ctx, &format!("subsets={subsets}"))
            }
            MethodDetail::BlockBinomial { cells, grid } => {
                push_ctx(&mut ctx, &format!("cells={cells}"));
                if let crate::exact::Grid::Discretized {
                    probability_error_bound,
                    ..
                } = grid
                {
                    push_ctx(
                        &mut ctx,
                        &format!("discretization_error<={probability_error_bound:e}"),
                    );
                }
            }
            MethodDetail::MonteCarlo { trials, std_error } => push_ctx(
                &mut ctx,
                &format!("trials={trials} std_error={std_error:e}"),
            ),
        }
        row.context = ctx;
        row.log10 = small_log10(report.probability);
        row
    }
}

fn push_ctx(ctx: &mut String, s: &str) {
    if !ctx.is_empty() {
        ctx.push_str("; ");
    }
    ctx.push_str(s);
}

fn small_log10(p: f64) -> Option<f64> {
    (p > 0.0 && p < 1e-3).then(|| libm::log10(p))
}

pub const EXPERIMENTS: [&str; 6] = [
    "table1",
    "example-2.1",
    "example-3.7",
    "example-4.5",
    "example-5.2",
    "flooding",
];

pub const TABLE1_WEIGHTS: [f64; 10] = [-2.0, -1.0, -0.1, 0.0, 0.1, 1.0, 2.0, 4.0, 5.0, 10.0];

/// Runs a registered experiment.
pub fn run_experiment(name: &str, enumeration_cap: usize) -> Result<Vec<ReportRow>> {
    match name {
        "table1" => table1(),
        "example-2.1" => example_2_1(enumeration_cap),
        "example-3.7" => example_3_7(),
        "example-4.5" => example_4_5(enumeration_cap),
        "example-5.2" => example_5_2(enumeration_cap),
        "flooding" => flooding(),
        _ => Err(Error::UnknownExperiment(name.to_string())),
    }
}

fn table1() -> Result<Vec<ReportRow>> {
    let id = "table1";
    let mut rows = Vec::new();
    for w in TABLE1_WEIGHTS {
        let c = Competence::from_weight(w)?;
        let ctx = format!("w={w}");
        rows.push(ReportRow::new(
            id,
            format!("competence@w={w}"),
            competence_from_weight(Weight(w)),
            "closed_form",
            ctx.clone(),
        ));
        for n in [3usize, 5, 7] {
            let r = exact_correct_probability(&vec![1.0; n], &vec![c; n])?;
            rows.push(ReportRow::probability(
                id,
                format!("majority_{n}@w={w}"),
                &r,
                ctx.clone(),
            ));
        }
    }
    Ok(rows)
}

/// 3000 voters at `w = 0.1` plus an expert at `w = 1`.
pub fn example_2_1_blocks() -> Result<(VoterBlock, WeightedVoter)> {
    Ok((
        VoterBlock {
            count: 3000,
            competence: Competence::from_weight(0.1)?,
            weight: 0.1,
        },
        WeightedVoter {
            competence: Competence::from_weight(1.0)?,
            weight: 1.0,
        },
    ))
}

fn correlated_incidence(k: u32) -> Result<SignalIncidence> {
    let voters: Vec<VoterId> = (0..=k).map(VoterId).collect();
    SignalIncidence::new(
        vec![
            Signal::new(0, Competence::from_weight(0.1)?),
            Signal::new(1, Competence::from_weight(1.0)?),
        ],
        &voters,
        &[voters[..k as usize].to_vec(), vec![VoterId(k)]],
        None,
    )
}

/// Expert effect when the expert is worth 20 block
/// votes and a tied margin counts as a loss.
pub fn expert_delta_ties_lost() -> Result<f64> {
    let (block, expert) = example_2_1_blocks()?;
    let pmf = binomial_log_pmf(
        block.count,
        block.competence.ln_p(),
        block.competence.ln_q(),
    );
    let range = |lo: usize, hi: usize| compensated_sum((lo..=hi).map(|k| libm::exp(pmf[k])));
    let pe = expert.competence.p();
    Ok(pe * range(1491, 1500) - (1.0 - pe) * range(1501, 1510))
}

fn example_2_1(cap: usize) -> Result<Vec<ReportRow>> {
    let id = "example-2.1";
    let (block, expert) = example_2_1_blocks()?;
    let with = block_correct_probability(&[block], &[expert])?;
    let alone = block_correct_probability(&[block], &[])?;

    let inc = correlated_incidence(3000)?;
    let plan = dependent_abstention(&inc, None, RatioChoice::Exact)?;
    let effective: Vec<Signal> = inc
        .signals()
        .iter()
        .zip(plan.signal_totals())
        .map(|(s, t)| {
            Ok(Signal::new(
                s.id,
                Competence::from_weight(t * plan.reference_ratio)?,
            ))
        })
        .collect::<Result<_>>()?;
    let reweighted = dependence_correct_probability(&effective, cap)?;

    let mut naive_rule = vec![0.1; 3000];
    naive_rule.push(1.0);
    let naive = stance_vote_correct_probability(&inc, &naive_rule, cap)?;

    // smallest correlated group that outvotes the expert when weighted as
    // if independent
    let mut smallest = 0u32;
    for k in 1..=3000u32 {
        let inc = correlated_incidence(k)?;
        let mut rule = vec![0.1; k as usize];
        rule.push(1.0);
        let p = stance_vote_correct_probability(&inc, &rule, cap)?.probability;
        if p < 0.6 {
            smallest = k;
            break;
        }
    }

    let delta = with.probability - alone.probability;
    Ok(vec![
        ReportRow::probability(
            id,
            "independent_with_expert",
            &with,
            "3000 x w=0.1 plus expert w=1",
        ),
        ReportRow::probability(id, "independent_without_expert", &alone, "3000 x w=0.1"),
        ReportRow::new(
            id,
            "expert_delta",
            delta,
            "block_binomial",
            "decision rule d, ties split by coin",
        ),
        ReportRow::new(
            id,
            "expert_delta_twenty_units_ties_lost",
            expert_delta_ties_lost()?,
            "block_binomial",
            "expert counted as 20 block votes; ties lost",
        ),
        ReportRow::probability(
            id,
            "correlated_reweighted",
            &reweighted,
            "shared signal aggregated to w=0.1",
        ),
        ReportRow::probability(
            id,
            "correlated_naive",
            &naive,
            "shared signal counted 3000 x 0.1",
        ),
        ReportRow::new(
            id,
            "naive_smallest_dominating_group",
            smallest as f64,
            "enumeration",
            "correlated voters needed to outvote the expert",
        ),
    ])
}

fn example_3_7() -> Result<Vec<ReportRow>> {
    let id = "example-3.7";
    let mut rows = Vec::new();
    for r in [1000.0, 20.0] {
        let b = shortfall_bound(r)?;
        let (m, e) = b.scientific();
        rows.push(ReportRow {
            id: id.to_string(),
            metric: format!("shortfall_bound@r_tilde={r}"),
            value: b.value(),
            log10: Some(b.log10()),
            method: "log_space".to_string(),
            context: format!("{m:.10}e{e}"),
        });
    }
    // 100 voters with weights up to 5, each on one unit right
    let voters: Vec<(VoterId, f64, f64)> = (0..100u32)
        .map(|k| (VoterId(k), 0.05 * f64::from(k + 1), 1.0))
        .collect();
    let plan = approx_abstention_weights(&voters, 1000.0)?;
    let err = plan
        .effective_weights()
        .iter()
        .zip(&voters)
        .map(|(e, v)| libm::fabs(e - v.1))
        .fold(0.0, f64::max);
    rows.push(ReportRow::new(
        id,
        "r_tilde_1000_max_weight_error",
        err,
        "closed_form",
        "100 voters, max w = 5",
    ));
    rows.push(ReportRow::new(
        id,
        "r_tilde_1000_capped",
        plan.capped.len() as f64,
        "closed_form",
        "100 voters, max w = 5",
    ));

    let strong = [(VoterId(0), 1.0, 1.0), (VoterId(1), 25.0, 1.0)];
    let plan = approx_abstention_weights(&strong, 20.0)?;
    rows.push(ReportRow::new(
        id,
        "r_tilde_20_capped_weight",
        plan.effective_weights()[1],
        "closed_form",
        "true w = 25",
    ));
    Ok(rows)
}

/// The whale profile: 3000 voters at `w = 0.1` with one right each and a
/// `w = 1` voter with 27000 rights.
pub fn whale_profile() -> Result<VoterProfile> {
    let mut voters = vec![Voter::new(0, Competence::from_weight(1.0)?, 27_000.0)?];
    for k in 1..=3000 {
        voters.push(Voter::new(k, Competence::from_weight(0.1)?, 1.0)?);
    }
    VoterProfile::new(voters)
}

fn example_4_5(cap: usize) -> Result<Vec<ReportRow>> {
    let id = "example-4.5";
    let prof = whale_profile()?;
    let plan = optimal_abstention_independent(&prof)?;
    let comps = prof.competences();
    let before = correct_probability(&prof.rights(), &comps, cap)?;
    let after = correct_probability(&plan.exercised(), &comps, cap)?;
    Ok(vec![
        ReportRow::new(
            id,
            "whale_exercised",
            plan.entries[0].exercised,
            "closed_form",
            "of 27000 rights",
        ),
        ReportRow::new(
            id,
            "reference_ratio",
            plan.reference_ratio,
            "closed_form",
            "R = max w/t",
        ),
        ReportRow::new(
            id,
            "exercised_share",
            plan.exercised_share(),
            "closed_form",
            "3010 / 30000",
        ),
        ReportRow::probability(id, "p_full_exercise", &before, "weights = rights"),
        ReportRow::probability(
            id,
            "p_optimal_abstention",
            &after,
            "weights = exercised rights",
        ),
    ])
}

/// 3000 voters at `w = 0.1` with one right each and a `w = 1` expert with
/// ten.
pub fn liquid_profile() -> Result<VoterProfile> {
    let mut voters: Vec<Voter> = (0..3000)
        .map(|k| Voter::new(k, Competence::from_weight(0.1)?, 1.0))
        .collect::<Result<_>>()?;
    voters.push(Voter::new(3000, Competence::from_weight(1.0)?, 10.0)?);
    VoterProfile::new(voters)
}

fn example_5_2(cap: usize) -> Result<Vec<ReportRow>> {
    let id = "example-5.2";
    let prof = liquid_profile()?;
    let comps = prof.competences();
    let before = correct_probability(&prof.rights(), &comps, cap)?;
    let out = run_liquid(&prof, &Visibility::Complete, &Strategy::MaxCompetence, 100)?;
    let after = correct_probability(&out.state.holdings, &comps, cap)?;
    let ctx = format!(
        "complete visibility; max guru share {}; gurus {}; rounds {}; converged {}",
        out.max_share,
        out.gurus.len(),
        out.history.len(),
        out.converged
    );
    Ok(vec![
        ReportRow::probability(id, "majority_by_rights", &before, "no delegation"),
        ReportRow::probability(id, "liquid_max_competence", &after, ctx),
    ])
}

fn flooding() -> Result<Vec<ReportRow>> {
    let id = "flooding";
    let start = [Competence::from_weight(1.0)?];
    let t = flooding_trajectory(&start, halving_pairs(1.0), 0.05, 40)?;
    let mut rows = vec![ReportRow::new(
        id,
        "pairs=0",
        t.initial,
        "poisson_binomial",
        "single voter w = 1",
    )];
    for (k, &p) in t.values.iter().enumerate() {
        rows.push(ReportRow::new(
            id,
            format!("pairs={}", k + 1),
            p,
            "poisson_binomial",
            format!("added w/2^{} and w/2^{}", 2 * k + 1, 2 * k + 2),
        ));
    }
    rows.push(ReportRow::new(
        id,
        "pairs_to_threshold",
        if t.reached {
            t.values.len() as f64
        } else {
            f64::NAN
        },
        "poisson_binomial",
        "first P below 0.55",
    ));
    Ok(rows)
}
