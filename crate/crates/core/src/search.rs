//! Counterexample search for proportional consistency.
//!
//! Candidates are numbered; candidate `i` is generated and checked on its
//! own, so results do not depend on how work is spread over threads. Results
//! are merged in candidate order, which makes a run a pure function of its
//! configuration.

use std::ops::RangeInclusive;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::method::Method;
use crate::model::{Instance, TiePolicy};
use crate::properties::{check_pc, PCReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SearchMode {
    /// Every non-increasing population vector with entries in
    /// `1..=max_pop` and gcd 1, at every house size in range.
    Exhaustive,
    /// `trials` random candidates drawn from per-candidate ChaCha streams.
    Random { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub method: Method,
    pub states: RangeInclusive<usize>,
    pub max_pop: u64,
    pub houses: RangeInclusive<u64>,
    pub mode: SearchMode,
    /// Stop once this many violations are known.
    pub stop_after: Option<usize>,
    pub policy: TiePolicy,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if *self.states.start() == 0 || self.states.is_empty() {
            return bad("state count range must be nonempty and start at 1 or more");
        }
        if self.max_pop == 0 {
            return bad("population bound must be positive");
        }
        if *self.houses.start() == 0 || self.houses.is_empty() {
            return bad("house range must be nonempty and start at 1 or more");
        }
        if let SearchMode::Random { trials: 0, .. } = self.mode {
            return bad("trial count must be positive");
        }
        if self.stop_after == Some(0) {
            return bad("stop-after must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Tie-free failures, in candidate order.
    pub violations: Vec<PCReport>,
    /// Failures in which some evaluation hit a tie.
    pub advisories: Vec<PCReport>,
    /// (instance, house) pairs checked.
    pub checked: u64,
    /// Pairs whose allocation admitted no `λ`.
    pub vacuous: u64,
}

/// Random instance and house for candidate `index`, biased so the allocation
/// tends to have a common factor: with house `d·u`, populations sit within
/// about a seat of the quotas `d·c_i` for a random split `c` of `u`.
pub fn random_candidate(
    seed: u64,
    index: u64,
    states: &RangeInclusive<usize>,
    max_pop: u64,
    houses: &RangeInclusive<u64>,
) -> (Instance, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(states.clone());
    let (h_lo, h_hi) = (*houses.start(), *houses.end());
    let factors: Vec<u64> = (2..=12u64)
        .filter(|&d| h_lo.div_ceil(d).max(1) <= h_hi / d)
        .collect();
    if factors.is_empty() || rng.gen_ratio(1, 10) {
        let pops: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_pop)).collect();
        let instance = Instance::from_u64(&pops).expect("populations are positive");
        return (instance, rng.gen_range(houses.clone()));
    }
    let d = factors[rng.gen_range(0..factors.len())];
    let units = rng.gen_range(h_lo.div_ceil(d).max(1)..=h_hi / d);
    let mut parts = vec![0u64; n];
    for _ in 0..units {
        parts[rng.gen_range(0..n)] += 1;
    }
    let scale = (max_pop / (units + 1)).max(1);
    // a population error of `e` moves the quota by about `d·e/scale` seats
    let spread = scale * rng.gen_range(1..=4) / (4 * d);
    let pops: Vec<u64> = parts
        .iter()
        .map(|&c| {
            let centre = c * scale;
            let lo = centre.saturating_sub(spread).max(1);
            let hi = (centre + spread).clamp(lo, max_pop);
            rng.gen_range(lo..=hi)
        })
        .collect();
    let instance = Instance::from_u64(&pops).expect("populations are positive");
    (instance, d * units)
}

/// Non-increasing tuples of length `n` with entries in `1..=max` and gcd 1,
/// in lexicographic order.
pub fn primitive_tuples(n: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cap: u64, g: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            if g == 1 {
                out.push(cur.clone());
            }
            return;
        }
        for v in (1..=cap).rev() {
            cur.push(v);
            go(n, v, g.gcd(&v), cur, out);
            cur.pop();
        }
    }
    go(n, max, 0, &mut cur, &mut out);
    out
}

enum Found {
    Pass,
    Vacuous,
    Violation(PCReport),
    Advisory(PCReport),
}

fn classify(report: PCReport) -> Found {
    if report.verdicts.is_empty() {
        Found::Vacuous
    } else if report.overall {
        Found::Pass
    } else if report.tie_involved {
        Found::Advisory(report)
    } else {
        Found::Violation(report)
    }
}

const BLOCK: usize = 1024;

fn merge(outcome: &mut SearchOutcome, block: Vec<Result<Found>>) -> Result<()> {
    for found in block {
        outcome.checked += 1;
        match found? {
            Found::Pass => {}
            Found::Vacuous => outcome.vacuous += 1,
            Found::Violation(r) => outcome.violations.push(r),
            Found::Advisory(r) => outcome.advisories.push(r),
        }
    }
    Ok(())
}

fn done(outcome: &SearchOutcome, stop_after: Option<usize>) -> bool {
    stop_after.is_some_and(|k| outcome.violations.len() >= k)
}

pub fn search_pc_violations(config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let mut outcome = SearchOutcome {
        violations: Vec::new(),
        advisories: Vec::new(),
        checked: 0,
        vacuous: 0,
    };
    let check = |instance: &Instance, house: u64| -> Result<Found> {
        match check_pc(&config.method, instance, house, config.policy) {
            Ok(report) => Ok(classify(report)),
            // under fail-on-tie a tied evaluation is not a verdict
            Err(Error::Tie(_)) => Ok(Found::Pass),
            Err(e) => Err(e),
        }
    };
    match config.mode {
        SearchMode::Random { seed, trials } => {
            let mut start = 0u64;
            while start < trials && !done(&outcome, config.stop_after) {
                let end = (start + BLOCK as u64).min(trials);
                let block: Vec<Result<Found>> = (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let (instance, house) =
                            random_candidate(seed, i, &config.states, config.max_pop, &config.houses);
                        check(&instance, house)
                    })
                    .collect();
                merge(&mut outcome, block)?;
                start = end;
            }
        }
        SearchMode::Exhaustive => {
            'outer: for n in config.states.clone() {
                for chunk in primitive_tuples(n, config.max_pop).chunks(BLOCK) {
                    let block: Vec<Result<Found>> = chunk
                        .par_iter()
                        .flat_map_iter(|pops| {
                            let instance = Instance::from_u64(pops).expect("positive");
                            config
                                .houses
                                .clone()
                                .map(move |house| check(&instance, house))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    merge(&mut outcome, block)?;
                    if done(&outcome, config.stop_after) {
                        break 'outer;
                    }
                }
            }
        }
    }
    if let Some(k) = config.stop_after {
        outcome.violations.truncate(k);
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_counts() {
        // non-increasing pairs from 1..=4 with gcd 1:
        // (1,1) (2,1) (3,1) (3,2) (4,1) (4,3)
        assert_eq!(primitive_tuples(2, 4).len(), 6);
        assert_eq!(primitive_tuples(1, 9), vec![vec![1]]);
        assert!(primitive_tuples(3, 6).iter().all(|t| t.windows(2).all(|w| w[0] >= w[1])));
    }

    #[test]
    fn candidates_reproducible_and_in_range() {
        let states = 2..=6;
        let houses = 5..=60;
        for i in 0..200 {
            let (a, ha) = random_candidate(9, i, &states, 5000, &houses);
            let (b, hb) = random_candidate(9, i, &states, 5000, &houses);
            assert_eq!((a.populations(), ha), (b.populations(), hb));
            assert!(states.contains(&a.len()) && houses.contains(&ha));
            assert!(a.populations().iter().all(|v| *v >= 1.into() && *v <= 5000.into()));
        }
    }

    #[test]
    fn webster_small_random_search_is_clean() {
        let config = SearchConfig {
            method: "webster".parse().unwrap(),
            states: 2..=4,
            max_pop: 1000,
            houses: 1..=40,
            mode: SearchMode::Random { seed: 1, trials: 300 },
            stop_after: None,
            policy: TiePolicy::default(),
        };
        let out = search_pc_violations(&config).unwrap();
        assert!(out.violations.is_empty());
        assert_eq!(out.checked, 300);
        assert!(out.vacuous < 300);
    }

    #[test]
    fn rejects_bad_bounds() {
        let mut config = SearchConfig {
            method: "nis".parse().unwrap(),
            states: 0..=3,
            max_pop: 10,
            houses: 1..=5,
            mode: SearchMode::Exhaustive,
            stop_after: None,
            policy: TiePolicy::default(),
        };
        assert!(search_pc_violations(&config).is_err());
        config.states = 1..=3;
        config.houses = 0..=5;
        assert!(search_pc_violations(&config).is_err());
    }
}
