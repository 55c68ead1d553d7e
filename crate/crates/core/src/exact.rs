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

//! Exact probability of a correct collective decision.
//!
//! Two routes compute the same quantity. [`exact_correct_probability`] sums
//! pattern probabilities over every subset of voters (split into two halves
//! that are joined through a sorted prefix sum), and
//! [`block_correct_probability`] convolves per-block binomial margin
//! distributions on an integer grid for large exchangeable groups. Exact ties
//! contribute half their pattern probability, the expectation of the coin
//! flip in the decision rule.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{is_tie, Competence, TIE_TOLERANCE};
use crate::numeric::{binomial_log_pmf, compensated_sum, gcd, rational_approx, CompensatedSum};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;
pub const DEFAULT_GAP_CAP: usize = 30;
pub const DEFAULT_DISTINGUISHED_CAP: usize = 16;
pub const DEFAULT_MAX_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Enumeration,
    BlockBinomial,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Enumeration => "enumeration",
            Self::BlockBinomial => "block_binomial",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    /// Weights are integer multiples of `unit`; margins are exact.
    Exact { unit: f64 },
    /// Weights rounded to multiples of `step`. Any margin within
    /// `max_margin_error` of zero may be misclassified, which moves the
    /// probability by at most `probability_error_bound`.
    Discretized {
        step: f64,
        max_margin_error: f64,
        probability_error_bound: f64,
    },
    /// Every joint count of correct voters per block was visited and its
    /// margin summed in floating point; no grid was needed.
    CountLattice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodDetail {
    Enumeration { subsets: u64 },
    BlockBinomial { cells: usize, grid: Grid },
    MonteCarlo { trials: u64, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectnessReport {
    pub probability: f64,
    pub method: Method,
    pub detail: MethodDetail,
}

/// Competences sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetenceStructure {
    competences: Vec<Competence>,
}

impl CompetenceStructure {
    pub fn new(mut competences: Vec<Competence>) -> Self {
        competences.sort_by(|a, b| b.p().total_cmp(&a.p()));
        Self { competences }
    }

    pub fn competences(&self) -> &[Competence] {
        &self.competences
    }

    pub fn optimal_weights(&self) -> Vec<f64> {
        self.competences.iter().map(|c| c.weight().0).collect()
    }
}

/// `count` exchangeable voters sharing a competence and a per-voter rule
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoterBlock {
    pub count: usize,
    pub competence: Competence,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedVoter {
    pub competence: Competence,
    pub weight: f64,
}

fn check_lengths(weights: &[f64], competences: &[Competence]) -> Result<()> {
    if weights.len() != competences.len() {
        return Err(Error::LengthMismatch {
            what: "rule weights",
            expected: competences.len(),
            got: weights.len(),
        });
    }
    if let Some(&w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::NonFiniteWeight(w));
    }
    Ok(())
}

fn abs_sum(weights: &[f64]) -> f64 {
    compensated_sum(weights.iter().map(|w| libm::fabs(*w)))
}

/// `q(S) = Π_{j∈S} p_j · Π_{k∉S} (1 - p_k)`, summed in log space.
pub fn pattern_probability(members: &[bool], competences: &[Competence]) -> f64 {
    debug_assert_eq!(members.len(), competences.len());
    let ln =
        compensated_sum(
            members
                .iter()
                .zip(competences)
                .map(|(&m, c)| if m { c.ln_p() } else { c.ln_q() }),
        );
    libm::exp(ln)
}

/// Orders `Σ_S w` against the weight of the complement, with the tie band
/// used by the decision rule.
pub fn coalition_comparison(members: &[bool], weights: &[f64]) -> Ordering {
    debug_assert_eq!(members.len(), weights.len());
    let diff = compensated_sum(
        members
            .iter()
            .zip(weights)
            .map(|(&m, &w)| if m { w } else { -w }),
    );
    if is_tie(diff, abs_sum(weights)) {
        Ordering::Equal
    } else if diff > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

struct HalfEntry {
    margin: f64,
    q: f64,
}

fn enumerate_half(weights: &[f64], competences: &[Competence]) -> Vec<HalfEntry> {
    let n = weights.len();
    let mut out = Vec::with_capacity(1 << n);
    let mut margin_terms = vec![0.0; n];
    let mut ln_terms = vec![0.0; n];
    for mask in 0u64..(1u64 << n) {
        for j in 0..n {
            if mask >> j & 1 == 1 {
                margin_terms[j] = weights[j];
                ln_terms[j] = competences[j].ln_p();
            } else {
                margin_terms[j] = -weights[j];
                ln_terms[j] = competences[j].ln_q();
            }
        }
        out.push(HalfEntry {
            margin: compensated_sum(margin_terms.iter().copied()),
            q: libm::exp(compensated_sum(ln_terms.iter().copied())),
        });
    }
    out
}

/// `Pr[M + offset > 0] + ½ Pr[M + offset ties]`, where `M` is the margin of
/// correct over incorrect rule weight. `band_scale` sets the tie band.
fn win_probability(
    weights: &[f64],
    competences: &[Competence],
    offset: f64,
    band_scale: f64,
) -> f64 {
    let n = weights.len();
    let h = n / 2;
    let lo = enumerate_half(&weights[..h], &competences[..h]);
    let mut hi = enumerate_half(&weights[h..], &competences[h..]);
    hi.sort_by(|a, b| a.margin.total_cmp(&b.margin));
    let mut prefix = Vec::with_capacity(hi.len() + 1);
    let mut acc = CompensatedSum::new();
    prefix.push(0.0);
    for e in &hi {
        acc += e.q;
        prefix.push(acc.value());
    }
    let total_hi = prefix[hi.len()];
    let mut p = CompensatedSum::new();
    for e in &lo {
        let lose_end = hi.partition_point(|x| {
            let t = e.margin + x.margin + offset;
            t < 0.0 && !is_tie(t, band_scale)
        });
        let tie_end = hi.partition_point(|x| {
            let t = e.margin + x.margin + offset;
            t <= 0.0 || is_tie(t, band_scale)
        });
        let win = total_hi - prefix[tie_end];
        let tie = prefix[tie_end] - prefix[lose_end];
        p += e.q * (win + 0.5 * tie);
    }
    p.value().clamp(0.0, 1.0)
}

/// Probability that decision rule `d` with the given rule weights picks the
/// correct alternative, by exhaustive subset enumeration.
pub fn exact_correct_probability(
    rule_weights: &[f64],
    competences: &[Competence],
) -> Result<CorrectnessReport> {
    exact_correct_probability_capped(rule_weights, competences, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_correct_probability_capped(
    rule_weights: &[f64],
    competences: &[Competence],
    cap: usize,
) -> Result<CorrectnessReport> {
    check_lengths(rule_weights, competences)?;
    let n = rule_weights.len();
    if n > cap || n > 62 {
        return Err(Error::CapExceeded { voters: n, cap });
    }
    let probability = win_probability(rule_weights, competences, 0.0, abs_sum(rule_weights));
    Ok(CorrectnessReport {
        probability,
        method: Method::Enumeration,
        detail: MethodDetail::Enumeration { subsets: 1u64 << n },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BlockOptions {
    pub distinguished_cap: usize,
    pub max_cells: usize,
    pub max_denominator: u64,
    pub allow_discretization: bool,
    /// Sum over joint block counts when weights have no common unit and the
    /// count lattice fits in `max_cells`.
    pub allow_lattice: bool,
}

impl Default for BlockOptions {
    fn default() -> Self {
        Self {
            distinguished_cap: DEFAULT_DISTINGUISHED_CAP,
            max_cells: DEFAULT_MAX_CELLS,
            max_denominator: 1_000_000,
            allow_discretization: true,
            allow_lattice: true,
        }
    }
}

/// Exact probability for exchangeable blocks plus a few distinguished voters.
pub fn block_correct_probability(
    blocks: &[VoterBlock],
    distinguished: &[WeightedVoter],
) -> Result<CorrectnessReport> {
    block_correct_probability_with(blocks, distinguished, BlockOptions::default())
}

struct IntegerGrid {
    block_steps: Vec<i64>,
    voter_steps: Vec<i64>,
    grid: Grid,
}

fn integer_grid(
    blocks: &[VoterBlock],
    distinguished: &[WeightedVoter],
    opts: &BlockOptions,
) -> Result<IntegerGrid> {
    let all: Vec<f64> = blocks
        .iter()
        .map(|b| b.weight)
        .chain(distinguished.iter().map(|d| d.weight))
        .collect();
    let counts: Vec<usize> = blocks
        .iter()
        .map(|b| b.count)
        .chain(distinguished.iter().map(|_| 1))
        .collect();
    let split = |steps: Vec<i64>| -> (Vec<i64>, Vec<i64>) {
        let mut steps = steps;
        let rest = steps.split_off(blocks.len());
        (steps, rest)
    };
    let cells_for = |steps: &[i64]| -> Option<usize> {
        let mut total: u128 = 0;
        for (s, &c) in steps.iter().zip(&counts) {
            total += s.unsigned_abs() as u128 * c as u128;
        }
        usize::try_from(2 * total + 1).ok()
    };

    if let Some(grid) = rational_grid(&all, opts.max_denominator) {
        let (unit, steps) = grid;
        if let Some(cells) = cells_for(&steps) {
            if cells <= opts.max_cells {
                let (block_steps, voter_steps) = split(steps);
                return Ok(IntegerGrid {
                    block_steps,
                    voter_steps,
                    grid: Grid::Exact { unit },
                });
            }
        }
    }
    let total_abs = compensated_sum(
        all.iter()
            .zip(&counts)
            .map(|(w, &c)| libm::fabs(*w) * c as f64),
    );
    if !opts.allow_discretization {
        let cells = cells_for(
            &all.iter()
                .map(|w| libm::round(*w / f64::EPSILON) as i64)
                .collect::<Vec<_>>(),
        )
        .unwrap_or(usize::MAX);
        return Err(Error::SupportTooLarge {
            cells,
            limit: opts.max_cells,
        });
    }
    // Rounding every weight to the nearest multiple of `step` keeps the
    // support within `max_cells`.
    let step = 2.0 * total_abs / (opts.max_cells as f64 - 1.0) * 1.000_001;
    let steps: Vec<i64> = all.iter().map(|w| libm::round(*w / step) as i64).collect();
    let max_margin_error = compensated_sum(
        all.iter()
            .zip(&steps)
            .zip(&counts)
            .map(|((w, &s), &c)| libm::fabs(*w - s as f64 * step) * c as f64),
    );
    let (block_steps, voter_steps) = split(steps);
    Ok(IntegerGrid {
        block_steps,
        voter_steps,
        grid: Grid::Discretized {
            step,
            max_margin_error,
            probability_error_bound: 0.0,
        },
    })
}

/// Finds `unit` with every weight an integer multiple of it.
fn rational_grid(weights: &[f64], max_den: u64) -> Option<(f64, Vec<i64>)> {
    let mut fracs = Vec::with_capacity(weights.len());
    let mut lcm: u64 = 1;
    for &w in weights {
        let (num, den) = rational_approx(w, max_den, 1e-12)?;
        lcm = lcm.checked_mul(den / gcd(lcm, den))?;
        if lcm > 1_000_000_000_000 {
            return None;
        }
        fracs.push((num, den));
    }
    let mut ints = Vec::with_capacity(fracs.len());
    let mut g: u64 = 0;
    for (num, den) in fracs {
        let k = num.checked_mul(i64::try_from(lcm / den).ok()?)?;
        g = gcd(g, k.unsigned_abs());
        ints.push(k);
    }
    if g == 0 {
        return Some((1.0, ints));
    }
    let steps = ints.into_iter().map(|k| k / g as i64).collect();
    Some((g as f64 / lcm as f64, steps))
}

pub fn block_correct_probability_with(
    blocks: &[VoterBlock],
    distinguished: &[WeightedVoter],
    opts: BlockOptions,
) -> Result<CorrectnessReport> {
    if distinguished.len() > opts.distinguished_cap {
        return Err(Error::CapExceeded {
            voters: distinguished.len(),
            cap: opts.distinguished_cap,
        });
    }
    if let Some(w) = blocks
        .iter()
        .map(|b| b.weight)
        .chain(distinguished.iter().map(|d| d.weight))
        .find(|w| !w.is_finite())
    {
        return Err(Error::NonFiniteWeight(w));
    }
    let blocks: Vec<VoterBlock> = blocks
        .iter()
        .copied()
        .filter(|b| b.count > 0 && b.weight != 0.0)
        .collect();
    let distinguished: Vec<WeightedVoter> = distinguished
        .iter()
        .copied()
        .filter(|d| d.weight != 0.0)
        .collect();
    let grid = match integer_grid(&blocks, &distinguished, &opts) {
        Ok(g) if matches!(g.grid, Grid::Exact { .. }) => g,
        other => {
            if opts.allow_lattice {
                if let Some(report) = count_lattice(&blocks, &distinguished, opts.max_cells) {
                    return Ok(report);
                }
            }
            other?
        }
    };

    // Margin distribution of all blocks; index `i` holds margin `i - radius`.
    let mut dist = vec![1.0f64];
    let mut radius: i64 = 0;
    for (b, &s) in blocks.iter().zip(&grid.block_steps) {
        let n = b.count;
        let pmf: Vec<f64> = binomial_log_pmf(n, b.competence.ln_p(), b.competence.ln_q())
            .into_iter()
            .map(libm::exp)
            .collect();
        let reach = s.unsigned_abs() as i64 * n as i64;
        let new_radius = radius + reach;
        let mut next = vec![0.0f64; (2 * new_radius + 1) as usize];
        for (i, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let m = i as i64 - radius;
            for (k, &pk) in pmf.iter().enumerate() {
                let delta = s * (2 * k as i64 - n as i64);
                next[(m + delta + new_radius) as usize] += mass * pk;
            }
        }
        dist = next;
        radius = new_radius;
    }
    let mut prefix = Vec::with_capacity(dist.len() + 1);
    let mut acc = CompensatedSum::new();
    prefix.push(0.0);
    for &x in &dist {
        acc += x;
        prefix.push(acc.value());
    }
    let total = prefix[dist.len()];
    // mass of block margins strictly above `threshold`
    let above = |threshold: i64| -> f64 {
        let idx = threshold + radius + 1;
        if idx <= 0 {
            total
        } else if idx as usize >= dist.len() {
            0.0
        } else {
            total - prefix[idx as usize]
        }
    };
    let at = |m: i64| -> f64 {
        let idx = m + radius;
        if idx < 0 || idx as usize >= dist.len() {
            0.0
        } else {
            dist[idx as usize]
        }
    };

    let d = distinguished.len();
    let mut p = CompensatedSum::new();
    let mut near_zero = CompensatedSum::new();
    let err_cells = match grid.grid {
        Grid::Discretized {
            step,
            max_margin_error,
            ..
        } => Some(libm::ceil(max_margin_error / step) as i64),
        Grid::Exact { .. } | Grid::CountLattice => None,
    };
    for mask in 0u64..(1u64 << d) {
        let mut margin: i64 = 0;
        let mut ln_terms = Vec::with_capacity(d);
        for (j, (v, &s)) in distinguished.iter().zip(&grid.voter_steps).enumerate() {
            if mask >> j & 1 == 1 {
                margin += s;
                ln_terms.push(v.competence.ln_p());
            } else {
                margin -= s;
                ln_terms.push(v.competence.ln_q());
            }
        }
        let q = libm::exp(compensated_sum(ln_terms));
        p += q * (above(-margin) + 0.5 * at(-margin));
        if let Some(e) = err_cells {
            near_zero += q * (above(-margin - e - 1) - above(-margin + e));
        }
    }
    let grid_out = match grid.grid {
        Grid::Discretized {
            step,
            max_margin_error,
            ..
        } => Grid::Discretized {
            step,
            max_margin_error,
            probability_error_bound: near_zero.value(),
        },
        g => g,
    };
    Ok(CorrectnessReport {
        probability: p.value().clamp(0.0, 1.0),
        method: Method::BlockBinomial,
        detail: MethodDetail::BlockBinomial {
            cells: dist.len(),
            grid: grid_out,
        },
    })
}

/// Sums over every tuple of per-block correct counts, if there are at most
/// `max_cells` of them. Exact for arbitrary real weights.
fn count_lattice(
    blocks: &[VoterBlock],
    distinguished: &[WeightedVoter],
    max_cells: usize,
) -> Option<CorrectnessReport> {
    let mut parts: Vec<(usize, f64, Vec<f64>)> = blocks
        .iter()
        .map(|b| {
            let pmf = binomial_log_pmf(b.count, b.competence.ln_p(), b.competence.ln_q());
            (b.count, b.weight, pmf)
        })
        .collect();
    for d in distinguished {
        parts.push((1, d.weight, vec![d.competence.ln_q(), d.competence.ln_p()]));
    }
    let mut points: usize = 1;
    for (n, _, _) in &parts {
        points = points.checked_mul(n + 1).filter(|&x| x <= max_cells)?;
    }
    let scale = compensated_sum(parts.iter().map(|(n, w, _)| libm::fabs(*w) * *n as f64));
    let mut counts = vec![0usize; parts.len()];
    let mut p = CompensatedSum::new();
    for _ in 0..points {
        let margin = compensated_sum(
            parts
                .iter()
                .zip(&counts)
                .map(|((n, w, _), &k)| w * (2.0 * k as f64 - *n as f64)),
        );
        let credit = if is_tie(margin, scale) {
            0.5
        } else if margin > 0.0 {
            1.0
        } else {
            0.0
        };
        if credit > 0.0 {
            let ln_q = compensated_sum(parts.iter().zip(&counts).map(|((_, _, pmf), &k)| pmf[k]));
            p += credit * libm::exp(ln_q);
        }
        // mixed-radix increment
        for (c, (n, _, _)) in counts.iter_mut().zip(&parts) {
            *c += 1;
            if *c <= *n {
                break;
            }
            *c = 0;
        }
    }
    Some(CorrectnessReport {
        probability: p.value().clamp(0.0, 1.0),
        method: Method::BlockBinomial,
        detail: MethodDetail::BlockBinomial {
            cells: points,
            grid: Grid::CountLattice,
        },
    })
}

/// Picks enumeration when the voter count allows it, otherwise groups
/// identical voters into blocks for the convolution engine. Zero-weight
/// voters never move a margin and are dropped first.
pub fn correct_probability(
    rule_weights: &[f64],
    competences: &[Competence],
    enumeration_cap: usize,
) -> Result<CorrectnessReport> {
    check_lengths(rule_weights, competences)?;
    let active: Vec<(f64, Competence)> = rule_weights
        .iter()
        .copied()
        .zip(competences.iter().copied())
        .filter(|(w, _)| *w != 0.0)
        .collect();
    if active.len() <= enumeration_cap {
        let (w, c): (Vec<f64>, Vec<Competence>) = active.into_iter().unzip();
        return exact_correct_probability_capped(&w, &c, enumeration_cap);
    }
    let mut blocks: Vec<VoterBlock> = Vec::new();
    for (w, c) in active {
        match blocks.iter_mut().find(|b| {
            b.weight.to_bits() == w.to_bits() && b.competence.p().to_bits() == c.p().to_bits()
        }) {
            Some(b) => b.count += 1,
            None => blocks.push(VoterBlock {
                count: 1,
                competence: c,
                weight: w,
            }),
        }
    }
    block_correct_probability(&blocks, &[])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartitionGap {
    /// `min |Σ_A w - Σ_B w|` over bipartitions of the voters considered.
    pub gap: f64,
    /// Indices (into the input slice) on the heavier side of the minimizer.
    pub heavier: Vec<usize>,
    pub lighter: Vec<usize>,
    /// Smallest gap over every other bipartition, if one exists.
    pub second_gap: Option<f64>,
}

fn signed_sums(values: &[f64]) -> Vec<(f64, u64)> {
    let n = values.len();
    let mut out = Vec::with_capacity(1 << n);
    let mut terms = vec![0.0; n];
    for mask in 0u64..(1u64 << n) {
        for j in 0..n {
            terms[j] = if mask >> j & 1 == 1 {
                values[j]
            } else {
                -values[j]
            };
        }
        out.push((compensated_sum(terms.iter().copied()), mask));
    }
    out
}

/// Smallest and second-smallest bipartition gaps by meet in the middle.
/// Element 0 is pinned to the `+` side so mirror images are counted once.
pub fn bipartition_gaps(values: &[f64], cap: usize) -> Result<BipartitionGap> {
    let n = values.len();
    if n == 0 {
        return Err(Error::TooFewVoters { need: 1, got: 0 });
    }
    if n > cap || n > 62 {
        return Err(Error::CapExceeded { voters: n, cap });
    }
    let h = n.div_ceil(2);
    // first half with element 0 pinned to +
    let left: Vec<(f64, u64)> = signed_sums(&values[..h])
        .into_iter()
        .filter(|(_, m)| m & 1 == 1)
        .collect();
    let mut right = signed_sums(&values[h..]);
    right.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: [(f64, u64); 2] = [(f64::INFINITY, 0), (f64::INFINITY, 0)];
    let consider = |gap: f64, mask: u64, best: &mut [(f64, u64); 2]| {
        if mask == best[0].1 && gap == best[0].0 || mask == best[1].1 && gap == best[1].0 {
            return;
        }
        if gap < best[0].0 {
            best[1] = best[0];
            best[0] = (gap, mask);
        } else if gap < best[1].0 {
            best[1] = (gap, mask);
        }
    };
    for &(x, lm) in &left {
        let pos = right.partition_point(|r| r.0 < -x);
        let from = pos.saturating_sub(2);
        let to = (pos + 2).min(right.len());
        for r in &right[from..to] {
            let gap = libm::fabs(x + r.0);
            consider(gap, lm | (r.1 << h), &mut best);
        }
    }
    let (gap, mask) = best[0];
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for j in 0..n {
        if mask >> j & 1 == 1 {
            plus.push(j);
        } else {
            minus.push(j);
        }
    }
    let sum_of = |idx: &[usize]| compensated_sum(idx.iter().map(|&j| values[j]));
    let (heavier, lighter) = if sum_of(&plus) >= sum_of(&minus) {
        (plus, minus)
    } else {
        (minus, plus)
    };
    let second_gap = if best[1].0.is_finite() {
        Some(best[1].0)
    } else {
        None
    };
    Ok(BipartitionGap {
        gap,
        heavier,
        lighter,
        second_gap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decisiveness {
    /// `S*_{-i}`.
    pub gap: f64,
    pub minimally_decisive: bool,
}

/// `S*_{-i}` and whether `|w_i|` exceeds it.
pub fn minimal_decisiveness_gap(rule_weights: &[f64], i: usize) -> Result<Decisiveness> {
    minimal_decisiveness_gap_capped(rule_weights, i, DEFAULT_GAP_CAP)
}

pub fn minimal_decisiveness_gap_capped(
    rule_weights: &[f64],
    i: usize,
    cap: usize,
) -> Result<Decisiveness> {
    let n = rule_weights.len();
    if n < 2 {
        return Err(Error::TooFewVoters { need: 2, got: n });
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let others: Vec<f64> = rule_weights
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &w)| w)
        .collect();
    let g = bipartition_gaps(&others, cap)?;
    let band = TIE_TOLERANCE * abs_sum(rule_weights);
    Ok(Decisiveness {
        gap: g.gap,
        minimally_decisive: libm::fabs(rule_weights[i]) - g.gap > band,
    })
}

/// `∂P/∂p_i` for fixed rule weights: the probability mass of the other
/// voters' configurations in which voter `i` changes the outcome, with
/// half-credit for configurations it turns into or out of a tie.
pub fn competence_sensitivity(
    rule_weights: &[f64],
    competences: &[Competence],
    i: usize,
) -> Result<f64> {
    check_lengths(rule_weights, competences)?;
    let n = rule_weights.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            voters: n,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let band = abs_sum(rule_weights);
    let (ws, cs): (Vec<f64>, Vec<Competence>) = rule_weights
        .iter()
        .zip(competences)
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, (&w, &c))| (w, c))
        .unzip();
    let w = rule_weights[i];
    let with = win_probability(&ws, &cs, w, band);
    let without = win_probability(&ws, &cs, -w, band);
    Ok(with - without)
}

/// Distribution of the number of correct voters (Poisson binomial).
pub fn correct_count_distribution(competences: &[Competence]) -> Vec<f64> {
    let mut dist = vec![1.0f64];
    for c in competences {
        let (p, q) = (c.p(), 1.0 - c.p());
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &m) in dist.iter().enumerate() {
            next[k] += m * q;
            next[k + 1] += m * p;
        }
        dist = next;
    }
    dist
}

/// Simple majority (one voter, one vote) with coin-flip ties.
pub fn majority_correct_probability(competences: &[Competence]) -> f64 {
    let n = competences.len();
    let dist = correct_count_distribution(competences);
    let mut s = CompensatedSum::new();
    for (k, &m) in dist.iter().enumerate() {
        match (2 * k).cmp(&n) {
            Ordering::Greater => s += m,
            Ordering::Equal => s += 0.5 * m,
            Ordering::Less => {}
        }
    }
    s.value().clamp(0.0, 1.0)
}

fn majority_preconditions(competences: &[Competence]) -> Result<()> {
    let n = competences.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenVoterCount(n));
    }
    if let Some(c) = competences.iter().find(|c| c.p() < 0.5) {
        return Err(Error::BelowHalf(c.p()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMajority {
    /// Probability exactly `(n - 1) / 2` voters are correct.
    pub a: f64,
    /// Probability exactly `(n + 1) / 2` voters are correct.
    pub b: f64,
    pub phi: f64,
    pub ln_phi: f64,
}

pub fn phi_majority(competences: &[Competence]) -> Result<PhiMajority> {
    majority_preconditions(competences)?;
    let n = competences.len();
    let dist = correct_count_distribution(competences);
    let a = dist[(n - 1) / 2];
    let b = dist[n.div_ceil(2)];
    Ok(PhiMajority {
        a,
        b,
        phi: b / a,
        ln_phi: libm::log(b) - libm::log(a),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAddition {
    /// Change in majority-rule correctness from adding the pair.
    pub delta: f64,
    /// `w_i + w_j`; `delta` has the sign of `weight_sum - ln_phi`.
    pub weight_sum: f64,
    pub ln_phi: f64,
}

/// `Δ = p_i p_j A - (1 - p_i)(1 - p_j) B` for adding two voters under
/// majority rule.
pub fn pair_addition_delta(
    competences: &[Competence],
    first: Competence,
    second: Competence,
) -> Result<PairAddition> {
    let phi = phi_majority(competences)?;
    let (pi, pj) = (first.p(), second.p());
    Ok(PairAddition {
        delta: pi * pj * phi.a - (1.0 - pi) * (1.0 - pj) * phi.b,
        weight_sum: first.weight().0 + second.weight().0,
        ln_phi: phi.ln_phi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodingTrajectory {
    /// Majority-rule correctness before any pair is added.
    pub initial: f64,
    /// Correctness after each added pair.
    pub values: Vec<f64>,
    /// Whether the run ended below `0.5 + epsilon`.
    pub reached: bool,
}

/// Keeps adding pairs of voters under majority rule until the exact
/// probability of a correct decision drops below `0.5 + epsilon` or
/// `max_pairs` pairs have been added.
pub fn flooding_trajectory<I>(
    start: &[Competence],
    pairs: I,
    epsilon: f64,
    max_pairs: usize,
) -> Result<FloodingTrajectory>
where
    I: IntoIterator<Item = (Competence, Competence)>,
{
    majority_preconditions(start)?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
        });
    }
    let threshold = 0.5 + epsilon;
    let mut voters = start.to_vec();
    let initial = majority_correct_probability(&voters);
    let mut values = Vec::new();
    if initial <= threshold {
        return Ok(FloodingTrajectory {
            initial,
            values,
            reached: true,
        });
    }
    for (a, b) in pairs.into_iter().take(max_pairs) {
        if a.p() < 0.5 || b.p() < 0.5 {
            return Err(Error::BelowHalf(a.p().min(b.p())));
        }
        voters.push(a);
        voters.push(b);
        let p = majority_correct_probability(&voters);
        values.push(p);
        if p < threshold {
            return Ok(FloodingTrajectory {
                initial,
                values,
                reached: true,
            });
        }
    }
    Ok(FloodingTrajectory {
        initial,
        values,
        reached: false,
    })
}

/// Pairs of voters whose optimal weights halve voter by voter:
/// `w/2, w/4` then `w/8, w/16`, and so on.
pub fn halving_pairs(base_weight: f64) -> impl Iterator<Item = (Competence, Competence)> {
    (1..).map_while(move |k: i32| {
        let a = Competence::from_weight(base_weight * libm::pow(2.0, -(2 * k - 1) as f64)).ok()?;
        let b = Competence::from_weight(base_weight * libm::pow(2.0, -(2 * k) as f64)).ok()?;
        Some((a, b))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddVoterEffect {
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    pub minimally_decisive: bool,
}

/// Effect of adding a voter when everyone votes with optimal weights.
pub fn add_voter_effect(
    rule_weights: &[f64],
    competences: &[Competence],
    new_voter: Competence,
) -> Result<AddVoterEffect> {
    check_lengths(rule_weights, competences)?;
    for (index, (w, c)) in rule_weights.iter().zip(competences).enumerate() {
        let opt = c.weight().0;
        if libm::fabs(w - opt) > 1e-9 * libm::fabs(opt).max(1.0) {
            return Err(Error::NotOptimal { index });
        }
    }
    if new_voter.p() < 0.5 {
        return Err(Error::BelowHalf(new_voter.p()));
    }
    let before = exact_correct_probability(rule_weights, competences)?.probability;
    let mut ws = rule_weights.to_vec();
    let mut cs = competences.to_vec();
    ws.push(new_voter.weight().0);
    cs.push(new_voter);
    // a coin-flip voter carries no weight and leaves every margin unchanged
    let after = if new_voter.weight().0 == 0.0 {
        before
    } else {
        exact_correct_probability(&ws, &cs)?.probability
    };
    let minimally_decisive = if ws.len() >= 2 {
        minimal_decisiveness_gap(&ws, ws.len() - 1)?.minimally_decisive
    } else {
        true
    };
    Ok(AddVoterEffect {
        before,
        after,
        delta: after - before,
        minimally_decisive,
    })
}
