//! Quota-based methods: shift-quota (Hamilton at `s = 0`), LAR, SML, LQE,
//! SUQ, NIE and NIS.
//!
//! All quotas share the denominator `b·V` (for shift `a/b`), so floors,
//! remainders and nearest-integer roundings are computed on integer
//! numerators without building rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, seats_of};
use crate::error::{Error, Result, TieReport};
use crate::model::{check_shift, equal_population_split, Apportionment, Instance, TiePolicy};

/// Quotas `num_i / den` over a common denominator.
pub(crate) struct Shares {
    pub(crate) num: Vec<BigInt>,
    pub(crate) den: BigInt,
}

impl Shares {
    pub(crate) fn new(instance: &Instance, house: u64, shift: &BigRational) -> Self {
        let scale = BigInt::from(house) * shift.denom() + shift.numer();
        Shares {
            num: instance.populations().iter().map(|v| &scale * v).collect(),
            den: shift.denom() * instance.total(),
        }
    }

    pub(crate) fn standard(instance: &Instance, house: u64) -> Self {
        Shares {
            num: instance
                .populations()
                .iter()
                .map(|v| v * BigInt::from(house))
                .collect(),
            den: instance.total().clone(),
        }
    }

    pub(crate) fn floor(&self, i: usize) -> u64 {
        seats_of(&self.num[i].div_floor(&self.den))
    }

    pub(crate) fn remainder(&self, i: usize) -> BigInt {
        self.num[i].mod_floor(&self.den)
    }

    pub(crate) fn is_integer(&self, i: usize) -> bool {
        self.remainder(i).is_zero()
    }

    pub(crate) fn ceil(&self, i: usize) -> u64 {
        self.floor(i) + u64::from(!self.is_integer(i))
    }

    /// `[q_i]`, halves rounded up.
    pub(crate) fn nearest(&self, i: usize) -> u64 {
        let two = BigInt::from(2);
        seats_of(&(&self.num[i] * &two + &self.den).div_floor(&(&self.den * two)))
    }

    pub(crate) fn floors(&self) -> Vec<u64> {
        (0..self.num.len()).map(|i| self.floor(i)).collect()
    }
}

/// Lower quotas and what is left to distribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaSplit {
    pub floors: Vec<u64>,
    #[serde(with = "arith::serde_rational_vec")]
    pub remainders: Vec<BigRational>,
    /// `H - Σ⌊q_i⌋`, at most `n - 1`.
    pub deficit: u64,
    pub integer_mask: Vec<bool>,
}

pub fn quota_split(instance: &Instance, house: u64, shift: &BigRational) -> Result<QuotaSplit> {
    check_shift(shift)?;
    let sh = Shares::new(instance, house, shift);
    let floors = sh.floors();
    let remainders = (0..floors.len())
        .map(|i| BigRational::new(sh.remainder(i), sh.den.clone()))
        .collect::<Vec<_>>();
    let integer_mask = remainders.iter().map(|r| r.is_zero()).collect();
    Ok(QuotaSplit {
        deficit: house - floors.iter().sum::<u64>(),
        floors,
        remainders,
        integer_mask,
    })
}

fn settle(
    house: u64,
    seats: Vec<u64>,
    tie: Option<Vec<usize>>,
    policy: TiePolicy,
    context: &'static str,
) -> Result<Apportionment> {
    if let (TiePolicy::FailOnTie, Some(states)) = (policy, &tie) {
        return Err(Error::Tie(TieReport {
            house,
            states: states.clone(),
            context,
        }));
    }
    Ok(Apportionment::from_seats(seats).with_tie(tie.is_some()))
}

/// Shift-quota method: floors of `(H + s) v_i / V`, then one seat each to the
/// largest fractional remainders. `s = 0` is Hamilton's method.
pub fn shift_quota(
    instance: &Instance,
    house: u64,
    shift: &BigRational,
    policy: TiePolicy,
) -> Result<Apportionment> {
    check_shift(shift)?;
    let sh = Shares::new(instance, house, shift);
    let mut seats = sh.floors();
    let deficit = (house - seats.iter().sum::<u64>()) as usize;
    let rem: Vec<BigInt> = (0..seats.len()).map(|i| sh.remainder(i)).collect();
    let mut order: Vec<usize> = (0..seats.len()).collect();
    order.sort_by(|&a, &b| {
        rem[b]
            .cmp(&rem[a])
            .then_with(|| policy.rank(instance, a).cmp(&policy.rank(instance, b)))
    });
    for &i in &order[..deficit] {
        seats[i] += 1;
    }
    let tie = (deficit > 0 && deficit < order.len() && rem[order[deficit - 1]] == rem[order[deficit]])
        .then(|| {
            let cut = &rem[order[deficit]];
            order.iter().copied().filter(|&i| rem[i] == *cut).collect()
        });
    settle(house, seats, tie, policy, "remainder")
}

pub fn hamilton(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    shift_quota(instance, house, &BigRational::zero(), policy)
}

fn rank_extra(
    instance: &Instance,
    house: u64,
    policy: TiePolicy,
    largest_first: bool,
    context: &'static str,
) -> Result<Apportionment> {
    let sh = Shares::standard(instance, house);
    let mut seats = sh.floors();
    let deficit = (house - seats.iter().sum::<u64>()) as usize;
    let mut fractional: Vec<usize> = (0..seats.len()).filter(|&i| !sh.is_integer(i)).collect();
    if !largest_first {
        // smallest population first; equal populations still in input order
        fractional.sort_by(|&a, &b| {
            instance
                .population(a)
                .cmp(instance.population(b))
                .then_with(|| policy.rank(instance, a).cmp(&policy.rank(instance, b)))
        });
    }
    if fractional.len() < deficit {
        return Err(Error::Internal(format!(
            "{deficit} seats left but only {} fractional quotas",
            fractional.len()
        )));
    }
    for &i in &fractional[..deficit] {
        seats[i] += 1;
    }
    let tie = equal_population_split(instance, &seats);
    settle(house, seats, tie, policy, context)
}

/// Floors, then one extra seat each to the largest states with fractional
/// quotas.
pub fn lar(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    rank_extra(instance, house, policy, true, "population rank (LAR)")
}

/// Floors, then one extra seat each to the smallest states with fractional
/// quotas.
pub fn sml(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    rank_extra(instance, house, policy, false, "population rank (SML)")
}

/// Floors, with every leftover seat going to the largest state.
pub fn lqe(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    let mut seats = Shares::standard(instance, house).floors();
    seats[0] += house - seats.iter().sum::<u64>();
    let tie = equal_population_split(instance, &seats);
    settle(house, seats, tie, policy, "largest state (LQE)")
}

/// Upper quotas handed out in size order until the house runs out.
pub fn suq(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    let sh = Shares::standard(instance, house);
    let mut left = house;
    let seats: Vec<u64> = (0..instance.len())
        .map(|i| {
            let take = sh.ceil(i).min(left);
            left -= take;
            take
        })
        .collect();
    debug_assert_eq!(left, 0);
    let tie = equal_population_split(instance, &seats);
    settle(house, seats, tie, policy, "size order (SUQ)")
}

/// Nearest-integer extremes: round every quota, then give any shortfall to
/// the largest state or strip any surplus from the smallest states upward.
pub fn nie(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    let sh = Shares::standard(instance, house);
    let mut seats: Vec<u64> = (0..instance.len()).map(|i| sh.nearest(i)).collect();
    let total: u64 = seats.iter().sum();
    if total <= house {
        seats[0] += house - total;
    } else {
        let mut surplus = total - house;
        for k in seats.iter_mut().rev() {
            let take = (*k).min(surplus);
            *k -= take;
            surplus -= take;
            if surplus == 0 {
                break;
            }
        }
    }
    let tie = equal_population_split(instance, &seats);
    settle(house, seats, tie, policy, "size order (NIE)")
}

/// Nearest-integer sequential: round every quota, then add one seat each to
/// the largest states or remove one seat each from the smallest seated
/// states.
pub fn nis(instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
    let sh = Shares::standard(instance, house);
    let mut seats: Vec<u64> = (0..instance.len()).map(|i| sh.nearest(i)).collect();
    let total: u64 = seats.iter().sum();
    if total <= house {
        let short = (house - total) as usize;
        if short > seats.len() {
            return Err(Error::Degenerate(format!(
                "{short} seats short with only {} states",
                seats.len()
            )));
        }
        for k in &mut seats[..short] {
            *k += 1;
        }
    } else {
        let mut surplus = total - house;
        for k in seats.iter_mut().rev().filter(|k| **k > 0) {
            if surplus == 0 {
                break;
            }
            *k -= 1;
            surplus -= 1;
        }
        if surplus > 0 {
            return Err(Error::Degenerate(format!(
                "{surplus} surplus seats with no seated states left to trim"
            )));
        }
    }
    let tie = equal_population_split(instance, &seats);
    settle(house, seats, tie, policy, "size order (NIS)")
}

/// Which states sit at their lower and upper (shifted) quota.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperLowerSets {
    /// `h_i = ⌊q_i⌋`, including integer quotas.
    pub lower: Vec<usize>,
    /// `h_i = ⌈q_i⌉` with `q_i` fractional.
    pub upper: Vec<usize>,
}

pub fn upper_lower_sets(
    instance: &Instance,
    house: u64,
    h: &Apportionment,
    shift: &BigRational,
) -> Result<UpperLowerSets> {
    check_shift(shift)?;
    if h.seats().len() != instance.len() {
        return Err(Error::LengthMismatch {
            expected: instance.len(),
            got: h.seats().len(),
        });
    }
    let sh = Shares::new(instance, house, shift);
    let mut sets = UpperLowerSets {
        lower: Vec::new(),
        upper: Vec::new(),
    };
    for (i, &k) in h.seats().iter().enumerate() {
        let (lo, hi) = (sh.floor(i), sh.ceil(i));
        if k == lo {
            sets.lower.push(i);
        } else if k == hi {
            sets.upper.push(i);
        } else {
            return Err(Error::QuotaViolation {
                state: i,
                seats: k,
                lower: lo,
                upper: hi,
            });
        }
    }
    Ok(sets)
}

/// Whether `h` gives every state its lower or upper (standard) quota;
/// the first offending state otherwise.
pub fn quota_breach(instance: &Instance, h: &Apportionment) -> Option<usize> {
    let sh = Shares::standard(instance, h.house());
    h.seats()
        .iter()
        .enumerate()
        .find(|&(i, &k)| k < sh.floor(i) || k > sh.ceil(i))
        .map(|(i, _)| i)
}

#[cfg(test)]
pub(crate) fn one_half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}
