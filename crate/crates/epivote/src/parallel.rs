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

//! Monte Carlo over a rayon pool.

use epivote_core::error::Error as CoreError;
use epivote_core::simulate::{resolve, EstimateReport, Scenario, TrialSampler};
use rayon::prelude::*;

/// Trials per work item. Chunk boundaries do not affect the result.
const CHUNK: u64 = 4096;

pub fn monte_carlo_parallel(scenario: &Scenario, trials: u64) -> Result<EstimateReport, CoreError> {
    if trials == 0 {
        return Err(CoreError::InvalidParameter {
            name: "trials",
            value: 0.0,
        });
    }
    let sampler = TrialSampler::new(&resolve(scenario)?)?;
    let seed = scenario.seed;
    let successes = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| sampler.successes(seed, c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .sum();
    Ok(EstimateReport::from_counts(successes, trials, seed))
}

/// Runs `f` on a pool with `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, String> {
    match threads {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| e.to_string()),
    }
}
