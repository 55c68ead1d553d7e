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

//! Log-space helpers shared by the exact engine and the abstention bounds.

use alloc::vec::Vec;
use core::ops::AddAssign;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// `ln σ(x)` where `σ(x) = 1 / (1 + e^-x)`.
pub fn ln_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// `ln(Σ e^{x_i})`, `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let s = compensated_sum(xs.iter().map(|&x| libm::exp(x - max)));
    max + libm::log(s)
}

/// A probability carried by its natural logarithm, for values far below the
/// smallest positive `f64`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProbability {
    ln: f64,
}

impl LogProbability {
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(ln <= 0.0 || ln.is_nan());
        Self { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / core::f64::consts::LN_10
    }

    /// Linear value; underflows to zero below about `1e-308`.
    pub fn value(self) -> f64 {
        libm::exp(self.ln)
    }

    /// `(mantissa, exponent)` with `1 <= mantissa < 10`.
    pub fn scientific(self) -> (f64, i64) {
        let l = self.log10();
        let exponent = libm::floor(l);
        (libm::pow(10.0, l - exponent), exponent as i64)
    }
}

/// Log probability mass function of `Binomial(n, p)` for `k = 0..=n`, given
/// `ln p` and `ln(1 - p)`. Built by the ratio recurrence and renormalized, so
/// it stays accurate for thousands of trials.
pub fn binomial_log_pmf(n: usize, ln_p: f64, ln_q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = n as f64 * ln_q;
    out.push(cur);
    let log_odds = ln_p - ln_q;
    for k in 0..n {
        cur += libm::log((n - k) as f64) - libm::log((k + 1) as f64) + log_odds;
        out.push(cur);
    }
    let norm = log_sum_exp(&out);
    for v in &mut out {
        *v -= norm;
    }
    out
}

/// Best rational approximation `num / den` with `den <= max_den`, when it is
/// within `rel_tol` of `x`.
pub fn rational_approx(x: f64, max_den: u64, rel_tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some((0, 1));
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let ax = libm::fabs(x);
    // continued fraction convergents
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = ax;
    for _ in 0..64 {
        let a = libm::floor(r);
        if a > 1e15 {
            break;
        }
        let a_int = a as u64;
        let h2 = a_int.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a_int.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if libm::fabs(h1 as f64 / k1 as f64 - ax) <= rel_tol * ax {
            return Some((sign * h1 as i64, k1));
        }
        let frac = r - a;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 && libm::fabs(h1 as f64 / k1 as f64 - ax) <= rel_tol * ax {
        Some((sign * h1 as i64, k1))
    } else {
        None
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s += 1.0;
        for _ in 0..10_000 {
            s += 1e-16;
        }
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn softplus_is_stable_at_extremes() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0 && softplus(-1000.0) < 1e-300);
        assert!((softplus(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let p: f64 = 0.525;
        let pmf = binomial_log_pmf(3000, p.ln(), (1.0 - p).ln());
        let total = compensated_sum(pmf.iter().map(|&l| l.exp()));
        assert!((total - 1.0).abs() < 1e-12);
        // mode near n p
        let mode = pmf
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((mode as f64 - 1575.0).abs() <= 1.0);
    }

    #[test]
    fn small_binomial_matches_closed_form() {
        let p: f64 = 0.3;
        let pmf = binomial_log_pmf(4, p.ln(), (1.0 - p).ln());
        let expect = [0.2401, 0.4116, 0.2646, 0.0756, 0.0081];
        for (l, e) in pmf.iter().zip(expect) {
            assert!((l.exp() - e).abs() < 1e-14);
        }
    }

    #[test]
    fn rationals_are_recognized() {
        assert_eq!(rational_approx(0.1, 1_000_000, 1e-12), Some((1, 10)));
        assert_eq!(rational_approx(-2.5, 1_000_000, 1e-12), Some((-5, 2)));
        assert_eq!(rational_approx(1.0 / 3.0, 1_000_000, 1e-12), Some((1, 3)));
        assert_eq!(rational_approx(core::f64::consts::PI, 1000, 1e-12), None);
    }

    #[test]
    fn log_probability_scientific() {
        let lp = LogProbability::from_ln(-1000.0);
        let (m, e) = lp.scientific();
        assert_eq!(e, -435);
        assert!((m - 5.076).abs() < 1e-3);
        assert_eq!(lp.value(), 0.0);
    }
}
