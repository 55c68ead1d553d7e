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

//! One function per command, each returning report rows.

use epivote_core::abstention::{
    approx_abstention, dependent_abstention, optimal_abstention_independent, orient_profile,
    RatioChoice,
};
use epivote_core::delegation::{
    one_step_minimal_gap_analysis, run_liquid, sortition_average, three_step_coordination,
    Participant, Recommendation,
};
use epivote_core::exact::correct_probability;
use epivote_core::model::VoterProfile;
use epivote_core::simulate::{
    resolution_probability, resolve, run_experiment, Mechanism, ReportRow, RuleWeights, Scenario,
};

use crate::error::CliError;
use crate::parallel::monte_carlo_parallel;

fn ids(profile: &VoterProfile) -> impl Iterator<Item = u32> + '_ {
    profile.voters().iter().map(|v| v.id.0)
}

fn rule_name(rule: &RuleWeights) -> &'static str {
    match rule {
        RuleWeights::Rights => "rights",
        RuleWeights::Optimal => "optimal",
        RuleWeights::Explicit(_) => "explicit",
    }
}

fn context(sc: &Scenario) -> String {
    format!(
        "mechanism={} rule={} seed={}",
        sc.mechanism.kind(),
        rule_name(&sc.rule),
        sc.seed
    )
}

fn mismatch(command: &'static str, expected: &'static str, sc: &Scenario) -> CliError {
    CliError::MechanismMismatch {
        command,
        expected,
        found: sc.mechanism.kind(),
    }
}

/// P when every voter exercises all of its rights, weighted by rights, under
/// the scenario's signals if it has any.
fn full_exercise(sc: &Scenario, cap: usize) -> Result<ReportRow, CliError> {
    let base = Scenario::new(
        sc.profile.clone(),
        sc.signals.clone(),
        Mechanism::None,
        RuleWeights::Rights,
        sc.seed,
    )?;
    let r = resolution_probability(&resolve(&base)?, cap)?;
    Ok(ReportRow::probability(
        "",
        "p_full_exercise",
        &r,
        "weights = rights",
    ))
}

fn after(sc: &Scenario, cap: usize) -> Result<ReportRow, CliError> {
    let res = resolve(sc)?;
    let r = resolution_probability(&res, cap)?;
    Ok(ReportRow::probability("", "p_after", &r, context(sc)))
}

fn tag(id: &str, mut rows: Vec<ReportRow>) -> Vec<ReportRow> {
    for r in &mut rows {
        r.id = id.to_string();
    }
    rows
}

pub fn cmd_weights(sc: &Scenario) -> Vec<ReportRow> {
    let mut voters: Vec<_> = sc.profile.voters().to_vec();
    voters.sort_by_key(|v| v.id);
    let mut rows = Vec::with_capacity(2 * voters.len());
    for v in voters {
        let ctx = format!("voter={}", v.id.0);
        rows.push(ReportRow::new(
            "weights",
            format!("p[{}]", v.id.0),
            v.competence.p(),
            "closed_form",
            ctx.clone(),
        ));
        rows.push(ReportRow::new(
            "weights",
            format!("w[{}]", v.id.0),
            v.competence.weight().0,
            "closed_form",
            ctx,
        ));
    }
    rows
}

pub fn cmd_exact(sc: &Scenario, cap: usize) -> Result<Vec<ReportRow>, CliError> {
    let res = resolve(sc)?;
    let r = resolution_probability(&res, cap)?;
    Ok(vec![ReportRow::probability(
        "exact",
        "p_correct",
        &r,
        context(sc),
    )])
}

pub fn cmd_mc(sc: &Scenario, trials: u64) -> Result<Vec<ReportRow>, CliError> {
    let est = monte_carlo_parallel(sc, trials)?;
    let ctx = context(sc);
    let mut p = ReportRow::probability("mc", "p_hat", &est.as_correctness(), ctx.clone());
    p.context = format!("{ctx}; trials={trials}");
    Ok(vec![
        p,
        ReportRow::new("mc", "std_error", est.std_error, "monte_carlo", ctx.clone()),
        ReportRow::new(
            "mc",
            "successes",
            est.successes as f64,
            "monte_carlo",
            ctx.clone(),
        ),
        ReportRow::new("mc", "trials", est.trials as f64, "monte_carlo", ctx),
    ])
}

pub fn cmd_abstain(sc: &Scenario, cap: usize) -> Result<Vec<ReportRow>, CliError> {
    let id = "abstain";
    let mut rows = Vec::new();
    match &sc.mechanism {
        Mechanism::Abstention { r_tilde } => {
            let (oriented, flipped) = orient_profile(&sc.profile)?;
            let plan = match r_tilde {
                None => optimal_abstention_independent(&oriented)?,
                Some(r) => approx_abstention(&oriented, *r)?,
            };
            for (e, f) in plan.entries.iter().zip(&flipped) {
                let ctx = if *f {
                    "votes against its inclination"
                } else {
                    ""
                };
                rows.push(ReportRow::new(
                    id,
                    format!("exercised[{}]", e.voter.0),
                    e.exercised,
                    "closed_form",
                    ctx,
                ));
            }
            rows.push(ReportRow::new(
                id,
                "reference_ratio",
                plan.reference_ratio,
                "closed_form",
                ratio_ctx(*r_tilde),
            ));
            rows.push(ReportRow::new(
                id,
                "exercised_share",
                plan.exercised_share(),
                "closed_form",
                "",
            ));
            rows.push(ReportRow::new(
                id,
                "capped_voters",
                plan.capped.len() as f64,
                "closed_form",
                "",
            ));
        }
        Mechanism::DependentAbstention { r_tilde } => {
            let inc = sc.signals.as_ref().expect("validated with the scenario");
            let ratio = r_tilde.map_or(RatioChoice::Exact, RatioChoice::Substitute);
            let plan = dependent_abstention(inc, Some(&sc.profile.rights()), ratio)?;
            for e in &plan.entries {
                rows.push(ReportRow::new(
                    id,
                    format!("exercised[{}][signal {}]", e.voter.0, e.signal),
                    e.exercised,
                    "closed_form",
                    format!("allocated={}", e.allocated),
                ));
            }
            for (s, t) in inc.signals().iter().zip(plan.signal_totals()) {
                rows.push(ReportRow::new(
                    id,
                    format!("signal_total[{}]", s.id),
                    t,
                    "closed_form",
                    "",
                ));
            }
            rows.push(ReportRow::new(
                id,
                "reference_ratio",
                plan.reference_ratio,
                "closed_form",
                ratio_ctx(*r_tilde),
            ));
        }
        _ => return Err(mismatch("abstain", "abstention", sc)),
    }
    rows.push(full_exercise(sc, cap)?);
    rows.push(after(sc, cap)?);
    Ok(tag(id, rows))
}

fn ratio_ctx(r: Option<f64>) -> String {
    match r {
        None => "exact R".to_string(),
        Some(r) => format!("r_tilde={r}"),
    }
}

pub fn cmd_delegate(sc: &Scenario, cap: usize) -> Result<Vec<ReportRow>, CliError> {
    let id = "delegate";
    let mut rows = Vec::new();
    match &sc.mechanism {
        Mechanism::ListDelegation { .. } => {}
        Mechanism::OneStep { voter } => {
            let prof = &sc.profile;
            let i = prof.index_of(*voter).expect("validated with the scenario");
            let others: Vec<Participant> = prof
                .voters()
                .iter()
                .enumerate()
                .filter(|&(j, v)| j != i && v.rights > 0.0)
                .map(|(_, v)| Participant {
                    id: v.id,
                    exercised: v.rights,
                    competence: v.competence,
                })
                .collect();
            let a = one_step_minimal_gap_analysis(*voter, prof.voters()[i].rights, &others)?;
            rows.push(ReportRow::new(id, "gap", a.gap, "meet_in_the_middle", ""));
            if let Some(g2) = a.second_gap {
                rows.push(ReportRow::new(
                    id,
                    "second_gap",
                    g2,
                    "meet_in_the_middle",
                    "",
                ));
            }
            match a.recommendation {
                Recommendation::Delegate { to, amount } => rows.push(ReportRow::new(
                    id,
                    "delegated",
                    amount,
                    "meet_in_the_middle",
                    format!("to voter {}", to.0),
                )),
                Recommendation::Hold => rows.push(ReportRow::new(
                    id,
                    "delegated",
                    0.0,
                    "meet_in_the_middle",
                    "hold",
                )),
            }
        }
        Mechanism::ThreeStep { graph } => {
            let out = three_step_coordination(&sc.profile, graph)?;
            for (v, w) in ids(&sc.profile).zip(&out.recovered_weights) {
                rows.push(ReportRow::new(
                    id,
                    format!("recovered_w[{v}]"),
                    *w,
                    "closed_form",
                    format!("reference voter {}", out.reference.0),
                ));
            }
        }
        _ => return Err(mismatch("delegate", "list, one-step or three-step", sc)),
    }
    let res = resolve(sc)?;
    for (v, h) in ids(&sc.profile).zip(&res.exercised) {
        rows.push(ReportRow::new(
            id,
            format!("holding[{v}]"),
            *h,
            "closed_form",
            "",
        ));
    }
    rows.push(full_exercise(sc, cap)?);
    rows.push(after(sc, cap)?);
    Ok(tag(id, rows))
}

/// Report rows plus the holdings after every round.
pub fn cmd_liquid(sc: &Scenario, cap: usize) -> Result<(Vec<ReportRow>, Vec<Vec<f64>>), CliError> {
    let id = "liquid";
    let Mechanism::Liquid {
        visibility,
        strategy,
        max_rounds,
    } = &sc.mechanism
    else {
        return Err(mismatch("liquid", "liquid", sc));
    };
    let out = run_liquid(&sc.profile, visibility, strategy, *max_rounds)?;
    let mut rows = vec![
        ReportRow::new(
            id,
            "rounds",
            out.history.len() as f64,
            "simulation",
            format!("max_rounds={max_rounds}"),
        ),
        ReportRow::new(
            id,
            "converged",
            f64::from(u8::from(out.converged)),
            "simulation",
            "",
        ),
        ReportRow::new(id, "gurus", out.gurus.len() as f64, "simulation", ""),
        ReportRow::new(id, "max_share", out.max_share, "simulation", ""),
        ReportRow::new(
            id,
            "cycle_abstained_rights",
            out.abstained_rights,
            "simulation",
            format!("voters={}", out.cycle_abstained.len()),
        ),
    ];
    for (v, h) in ids(&sc.profile).zip(&out.state.holdings) {
        if *h > 0.0 {
            rows.push(ReportRow::new(
                id,
                format!("holding[{v}]"),
                *h,
                "simulation",
                "guru",
            ));
        }
    }
    rows.push(full_exercise(sc, cap)?);
    rows.push(after(sc, cap)?);
    Ok((tag(id, rows), out.history))
}

pub fn cmd_sortition(sc: &Scenario, draws: u64, cap: usize) -> Result<Vec<ReportRow>, CliError> {
    let id = "sortition";
    let Mechanism::Sortition { config } = &sc.mechanism else {
        return Err(mismatch("sortition", "sortition", sc));
    };
    let prof = &sc.profile;
    let comps = prof.competences();
    let n = prof.len();
    let ctx = format!("draws={draws} size={} seed={}", config.size, sc.seed);
    let s = sortition_average(prof, config, draws, sc.seed, cap)?;
    let majority = correct_probability(&vec![1.0; n], &comps, cap)?;
    let optimal: Vec<f64> = comps.iter().map(|c| c.weight().0).collect();
    let optimal = correct_probability(&optimal, &comps, cap)?;
    let mean = comps.iter().map(|c| c.p()).sum::<f64>() / n as f64;
    Ok(vec![
        ReportRow::probability(
            id,
            "population_majority",
            &majority,
            "every voter, one vote each",
        ),
        ReportRow::probability(
            id,
            "population_optimal",
            &optimal,
            "every voter, optimal weights",
        ),
        ReportRow::new(id, "population_mean_competence", mean, "closed_form", ""),
        ReportRow::new(
            id,
            "committee_majority",
            s.mean_majority,
            "monte_carlo",
            ctx.clone(),
        ),
        ReportRow::new(
            id,
            "committee_optimal",
            s.mean_optimal,
            "monte_carlo",
            ctx.clone(),
        ),
        ReportRow::new(
            id,
            "committee_mean_competence",
            s.mean_competence,
            "monte_carlo",
            ctx,
        ),
    ])
}

pub fn cmd_experiment(name: &str, cap: usize) -> Result<Vec<ReportRow>, CliError> {
    Ok(run_experiment(name, cap)?)
}
