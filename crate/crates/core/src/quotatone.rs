//! Quotatone methods: house-monotone, quota-satisfying allocation built seat
//! by seat.
//!
//! With `h` apportioning `H` seats, seat `H + 1` may only go to a state in
//! `U ∩ L`:
//!
//! * `U = {i : h_i < (H+1) v_i / V}`: the seat would not break upper quota.
//! * `L_α = {i : ⌊(H+α) v_i / V⌋ - h_i ≥ 1}` and
//!   `g(α) = Σ_{i ∈ L_α} (⌊(H+α) v_i / V⌋ - h_i)`. With `α̃` the least
//!   `α ≥ 1` such that `g(α) ≥ α`, `L = L_α̃`; when there is no such `α`,
//!   `L` is every state.
//!
//! Among eligible states the seat goes to the largest divisor priority
//! `v_i / f(h_i)` of the underlying signpost rule. `α̃` never exceeds
//! `max_i ⌈(h_i - H v_i/V) / (v_i/V)⌉`, so the search for it stops there.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::divisor::{PriorityBoard, SignpostRule};
use crate::error::{Error, Result, TieReport};
use crate::model::{Apportionment, Instance, SeatAward, TiePolicy};

/// Eligibility bookkeeping for the next seat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilitySets {
    pub upper_ok: Vec<usize>,
    /// `(α, g(α))` for the `α` examined, listed where `g` changes and at the
    /// last `α`; `g` is constant between listed points.
    pub alpha_values: Vec<(u64, u64)>,
    /// Upper bound on `α̃`; absent when no state is above its exact quota.
    pub alpha_bound: Option<u64>,
    pub alpha_tilde: Option<u64>,
    pub lower_ok: Vec<usize>,
    pub eligible: Vec<usize>,
}

fn house_of(h: &[u64]) -> u64 {
    h.iter().sum()
}

fn check_len(instance: &Instance, h: &Apportionment) -> Result<()> {
    if h.seats().len() != instance.len() {
        return Err(Error::LengthMismatch {
            expected: instance.len(),
            got: h.seats().len(),
        });
    }
    Ok(())
}

fn upper_ok(instance: &Instance, seats: &[u64]) -> Vec<usize> {
    let next = BigInt::from(house_of(seats) + 1);
    let total = instance.total();
    seats
        .iter()
        .enumerate()
        .filter(|&(i, &k)| BigInt::from(k) * total < &next * instance.population(i))
        .map(|(i, _)| i)
        .collect()
}

/// `U(v, h)`: states that can take seat `H + 1` without exceeding upper quota.
pub fn upper_set(instance: &Instance, h: &Apportionment) -> Result<Vec<usize>> {
    check_len(instance, h)?;
    Ok(upper_ok(instance, h.seats()))
}

fn lower_floor(instance: &Instance, house: u64, i: usize) -> u64 {
    let n = BigInt::from(house) * instance.population(i);
    n.div_floor(instance.total())
        .to_u64()
        .expect("floor bounded by house")
}

/// `L_α(v, h)` and `g(α)`.
pub fn g_value(instance: &Instance, h: &Apportionment, alpha: u64) -> Result<(Vec<usize>, u64)> {
    check_len(instance, h)?;
    if alpha == 0 {
        return Err(Error::InvalidConfig("look-ahead depth must be at least 1".into()));
    }
    let target = h.house() + alpha;
    let mut set = Vec::new();
    let mut g = 0;
    for (i, &k) in h.seats().iter().enumerate() {
        let owed = lower_floor(instance, target, i).saturating_sub(k);
        if owed >= 1 {
            set.push(i);
            g += owed;
        }
    }
    Ok((set, g))
}

fn bound(instance: &Instance, seats: &[u64]) -> Option<u64> {
    let house = BigInt::from(house_of(seats));
    let total = instance.total();
    seats
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let v = instance.population(i);
            // ⌈(k·V - H·v) / v⌉
            let num = BigInt::from(k) * total - &house * v;
            -((-num).div_floor(v))
        })
        .max()
        .filter(|b| b.is_positive())
        .map(|b| b.to_u64().expect("bound fits in u64"))
}

/// `max_i ⌈(h_i - H v_i/V) / (v_i/V)⌉` when positive.
pub fn alpha_bound(instance: &Instance, h: &Apportionment) -> Result<Option<u64>> {
    check_len(instance, h)?;
    Ok(bound(instance, h.seats()))
}

/// Scans `α = 1..=B`. With `record`, keeps `(α, g(α))` wherever `g` changes
/// and at the last `α` examined.
fn scan(
    instance: &Instance,
    seats: &[u64],
    limit: Option<u64>,
    record: bool,
) -> (Option<u64>, Vec<(u64, u64)>) {
    let Some(limit) = limit else {
        return (None, Vec::new());
    };
    let house = house_of(seats);
    let total = instance.total();
    // floor and remainder of (H + α) v_i / V, advanced one α at a time
    let mut floors = Vec::with_capacity(seats.len());
    let mut rems = Vec::with_capacity(seats.len());
    for i in 0..seats.len() {
        let (q, r) = (BigInt::from(house + 1) * instance.population(i)).div_mod_floor(total);
        floors.push(q.to_u64().expect("floor bounded by house"));
        rems.push(r);
    }
    // remainders stay below V, so machine integers do whenever V does
    let small: Option<Vec<u128>> = instance.populations().iter().map(|v| v.to_u128()).collect();
    match (small, total.to_u128()) {
        (Some(pops), Some(v)) => {
            let rems = rems.iter().map(|r| r.to_u128().expect("below V")).collect();
            step_scan(&pops, &v, rems, floors, seats, limit, record)
        }
        _ => step_scan(instance.populations(), total, rems, floors, seats, limit, record),
    }
}

fn step_scan<T>(
    pops: &[T],
    total: &T,
    mut rems: Vec<T>,
    mut floors: Vec<u64>,
    seats: &[u64],
    limit: u64,
    record: bool,
) -> (Option<u64>, Vec<(u64, u64)>)
where
    T: Ord + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>,
{
    let mut values: Vec<(u64, u64)> = Vec::new();
    for alpha in 1..=limit {
        if alpha > 1 {
            for i in 0..seats.len() {
                rems[i] += &pops[i];
                if rems[i] >= *total {
                    rems[i] -= total;
                    floors[i] += 1;
                }
            }
        }
        let g: u64 = floors
            .iter()
            .zip(seats)
            .map(|(&f, &k)| f.saturating_sub(k))
            .sum();
        let found = g >= alpha;
        if record && (found || alpha == limit || values.last().map_or(true, |&(_, last)| last != g)) {
            values.push((alpha, g));
        }
        if found {
            return (Some(alpha), values);
        }
    }
    (None, values)
}

/// `α̃ = min {α ≥ 1 : g(α) ≥ α}`, searched up to its bound.
pub fn alpha_tilde(instance: &Instance, h: &Apportionment) -> Result<Option<u64>> {
    check_len(instance, h)?;
    let seats = h.seats();
    Ok(scan(instance, seats, bound(instance, seats), false).0)
}

fn sets_for(instance: &Instance, seats: &[u64], record: bool) -> EligibilitySets {
    let upper = upper_ok(instance, seats);
    let alpha_bound = bound(instance, seats);
    let (alpha_tilde, alpha_values) = scan(instance, seats, alpha_bound, record);
    let lower_ok: Vec<usize> = match alpha_tilde {
        Some(a) => {
            let target = house_of(seats) + a;
            (0..seats.len())
                .filter(|&i| lower_floor(instance, target, i) > seats[i])
                .collect()
        }
        None => (0..seats.len()).collect(),
    };
    let eligible = upper
        .iter()
        .copied()
        .filter(|i| lower_ok.binary_search(i).is_ok())
        .collect();
    EligibilitySets {
        upper_ok: upper,
        alpha_values,
        alpha_bound,
        alpha_tilde,
        lower_ok,
        eligible,
    }
}

/// Full eligibility bookkeeping for the seat after `h`.
pub fn eligibility(instance: &Instance, h: &Apportionment) -> Result<EligibilitySets> {
    check_len(instance, h)?;
    Ok(sets_for(instance, h.seats(), true))
}

struct Induction<'a> {
    instance: &'a Instance,
    board: PriorityBoard<'a>,
    policy: TiePolicy,
    seats: Vec<u64>,
    tie: bool,
    log: Option<Vec<SeatAward>>,
}

impl<'a> Induction<'a> {
    fn new(instance: &'a Instance, rule: &'a SignpostRule, policy: TiePolicy, trace: bool) -> Self {
        let seats = vec![0; instance.len()];
        Induction {
            instance,
            board: PriorityBoard::new(instance, rule, &seats),
            policy,
            seats,
            tie: false,
            log: trace.then(Vec::new),
        }
    }

    fn step(&mut self) -> Result<()> {
        let house = house_of(&self.seats);
        let sets = sets_for(self.instance, &self.seats, self.log.is_some());
        let (winner, tied) = self
            .board
            .best(sets.eligible.iter().copied(), self.policy)
            .ok_or_else(|| Error::Internal(format!("no eligible state for seat {}", house + 1)))?;
        if tied.len() > 1 {
            if self.policy == TiePolicy::FailOnTie {
                return Err(Error::Tie(TieReport {
                    house: house + 1,
                    states: tied,
                    context: "quotatone priority",
                }));
            }
            self.tie = true;
        }
        self.seats[winner] += 1;
        self.board.add_seat(winner, self.seats[winner]);
        if let Some(log) = self.log.as_mut() {
            log.push(SeatAward {
                house: house + 1,
                state: winner,
                tied: tied.len() > 1,
                eligibility: Some(sets),
            });
        }
        Ok(())
    }

    fn snapshot(&self) -> Apportionment {
        Apportionment::from_seats(self.seats.clone())
            .with_tie(self.tie)
            .with_trace(self.log.clone())
    }
}

/// Quotatone allocation of `house` seats for the given signpost rule.
/// With `trace`, every seat's eligibility sets are kept.
pub fn quotatone_apportion(
    instance: &Instance,
    house: u64,
    rule: &SignpostRule,
    policy: TiePolicy,
    trace: bool,
) -> Result<Apportionment> {
    let mut run = Induction::new(instance, rule, policy, trace);
    for _ in 0..house {
        run.step()?;
    }
    Ok(run.snapshot())
}

/// Allocations for every house size `0..=house_max` from one induction.
pub fn quotatone_series(
    instance: &Instance,
    house_max: u64,
    rule: &SignpostRule,
    policy: TiePolicy,
) -> Result<Vec<Apportionment>> {
    let mut run = Induction::new(instance, rule, policy, false);
    let mut out = vec![run.snapshot()];
    for _ in 0..house_max {
        run.step()?;
        out.push(run.snapshot());
    }
    Ok(out)
}
