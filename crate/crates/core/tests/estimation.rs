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

//! Monte Carlo against the exact engines, and experiment runtimes.

use std::time::{Duration, Instant};

use epivote_core::exact::DEFAULT_ENUMERATION_CAP;
use epivote_core::model::VoterProfile;
use epivote_core::simulate::{
    exact_probability, monte_carlo_p, run_experiment, Mechanism, RuleWeights, Scenario, EXPERIMENTS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_scenario(rng: &mut ChaCha8Rng, seed: u64) -> Scenario {
    let n = rng.gen_range(1..=8);
    let ps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..0.95)).collect();
    let rule = if rng.gen_bool(0.5) {
        RuleWeights::Optimal
    } else {
        RuleWeights::Explicit((0..n).map(|_| rng.gen_range(-2.0..3.0)).collect())
    };
    let prof = VoterProfile::from_competences(&ps).unwrap();
    Scenario::new(prof, None, Mechanism::None, rule, seed).unwrap()
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let runs = 200;
    let mut inside = 0;
    for seed in 0..runs {
        let sc = random_scenario(&mut rng, seed);
        let exact = exact_probability(&sc, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .probability;
        let est = monte_carlo_p(&sc, 4000).unwrap();
        // a degenerate estimate has zero spread; fall back to one trial's worth
        let se = est.std_error.max(1.0 / est.trials as f64);
        if (est.p_hat - exact).abs() <= 4.0 * se {
            inside += 1;
        }
    }
    assert!(
        inside * 100 >= runs * 99,
        "{inside} of {runs} within 4 standard errors"
    );
}

#[test]
fn standard_error_shrinks_with_root_trials() {
    let prof = VoterProfile::from_competences(&[0.6, 0.7, 0.55, 0.8, 0.65]).unwrap();
    let sc = Scenario::new(prof, None, Mechanism::None, RuleWeights::Rights, 17).unwrap();
    let se: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&t| monte_carlo_p(&sc, t).unwrap().std_error)
        .collect();
    for pair in se.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.15, "ratio {ratio}");
    }
}

#[test]
fn seeded_estimates_repeat() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sc = random_scenario(&mut rng, 99);
    assert_eq!(
        monte_carlo_p(&sc, 5000).unwrap(),
        monte_carlo_p(&sc, 5000).unwrap()
    );
}

#[test]
fn experiments_finish_within_a_minute() {
    for name in EXPERIMENTS {
        let start = Instant::now();
        let rows = run_experiment(name, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(!rows.is_empty());
        assert!(rows
            .iter()
            .all(|r| r.value.is_finite() || r.log10.is_some() || r.value.is_nan()));
        assert!(
            start.elapsed() < Duration::from_secs(60),
            "{name} took {:?}",
            start.elapsed()
        );
    }
}
