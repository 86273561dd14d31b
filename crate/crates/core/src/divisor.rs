//! Divisor methods driven by signpost rounding rules.
//!
//! Seats are handed out one at a time to the state with the largest priority
//! `v_i / f(h_i)`. Priorities are compared exactly: rational signposts by
//! cross-multiplication, square-root signposts (Hill-Huntington) by comparing
//! squares. A finished allocation can be checked against the min/max divisor
//! inequalities with [`verify_certificate`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result, TieReport};
use crate::model::{Apportionment, Instance, SeatAward, TiePolicy};

/// The value of a rounding rule at some `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Signpost {
    Rational(BigRational),
    /// `√n`
    Sqrt(BigInt),
}

impl Signpost {
    pub fn is_zero(&self) -> bool {
        match self {
            Signpost::Rational(r) => r.is_zero(),
            Signpost::Sqrt(n) => n.is_zero(),
        }
    }

    /// `f(k)²`, always rational.
    pub fn squared(&self) -> BigRational {
        match self {
            Signpost::Rational(r) => r * r,
            Signpost::Sqrt(n) => BigRational::from_integer(n.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleKind {
    /// `f(k) = k + s`, `s ∈ [0, 1]`.
    Stationary(BigRational),
    /// `f(k) = √(k(k+1))`
    HillHuntington,
    /// `f(k) = k(k+1) / (k + 1/2)`
    Dean,
    /// Finitely many explicit signposts over a stationary default.
    Table {
        default: BigRational,
        overrides: BTreeMap<u64, BigRational>,
    },
}

/// A validated rounding rule `f` with `f(k) ∈ [k, k+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignpostRule {
    kind: RuleKind,
}

fn unit_interval(s: &BigRational) -> bool {
    !s.is_negative() && *s <= BigRational::one()
}

impl SignpostRule {
    pub fn stationary(shift: BigRational) -> Result<Self> {
        if !unit_interval(&shift) {
            return Err(Error::InvalidRule(format!(
                "stationary parameter {} outside [0, 1]",
                arith::format_fraction(&shift)
            )));
        }
        Ok(SignpostRule {
            kind: RuleKind::Stationary(shift),
        })
    }

    pub fn jefferson() -> Self {
        SignpostRule {
            kind: RuleKind::Stationary(BigRational::one()),
        }
    }

    pub fn webster() -> Self {
        SignpostRule {
            kind: RuleKind::Stationary(arith::ratio(1, 2)),
        }
    }

    pub fn adams() -> Self {
        SignpostRule {
            kind: RuleKind::Stationary(BigRational::zero()),
        }
    }

    pub fn hill_huntington() -> Self {
        SignpostRule {
            kind: RuleKind::HillHuntington,
        }
    }

    pub fn dean() -> Self {
        SignpostRule {
            kind: RuleKind::Dean,
        }
    }

    /// Explicit signposts `f(k)` for the keys of `overrides`, `k + default`
    /// everywhere else.
    pub fn table(default: BigRational, overrides: BTreeMap<u64, BigRational>) -> Result<Self> {
        if !unit_interval(&default) {
            return Err(Error::InvalidRule(format!(
                "table default {} outside [0, 1]",
                arith::format_fraction(&default)
            )));
        }
        for (&k, f) in &overrides {
            let lo = BigRational::from_integer(arith::int(k));
            if *f < lo || *f > &lo + BigRational::one() {
                return Err(Error::InvalidRule(format!(
                    "f({k}) = {} outside [{k}, {}]",
                    arith::format_fraction(f),
                    k + 1
                )));
            }
        }
        // Among positive k, f(a) = a + 1 and f(b) = b may not both occur. The
        // default covers infinitely many positive k.
        let shifts = overrides
            .iter()
            .filter(|(&k, _)| k > 0)
            .map(|(&k, f)| f - BigRational::from_integer(arith::int(k)))
            .chain(std::iter::once(default.clone()));
        let (mut up, mut down) = (false, false);
        for s in shifts {
            up |= s.is_one();
            down |= s.is_zero();
        }
        if up && down {
            return Err(Error::InvalidRule(
                "signposts at both ends of [k, k+1] for positive k".into(),
            ));
        }
        Ok(SignpostRule {
            kind: RuleKind::Table { default, overrides },
        })
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    /// `f(k)`.
    pub fn signpost(&self, k: u64) -> Signpost {
        let kk = || BigRational::from_integer(arith::int(k));
        match &self.kind {
            RuleKind::Stationary(s) => Signpost::Rational(kk() + s),
            RuleKind::HillHuntington => Signpost::Sqrt(arith::int(k) * arith::int(k + 1)),
            RuleKind::Dean => Signpost::Rational(BigRational::new(
                arith::int(2 * k) * arith::int(k + 1),
                arith::int(2 * k + 1),
            )),
            RuleKind::Table { default, overrides } => match overrides.get(&k) {
                Some(f) => Signpost::Rational(f.clone()),
                None => Signpost::Rational(kk() + default),
            },
        }
    }

    /// Priority `v / f(k)` of a state with population `v` holding `k` seats.
    pub fn priority(&self, population: &BigInt, k: u64) -> Priority {
        // built directly from f(k) = a/b; every form below is already reduced
        let make = |num: BigInt, den: BigInt, squared: bool| {
            if den.is_zero() {
                Priority::Infinite
            } else {
                Priority::Finite { num, den, squared }
            }
        };
        let shifted = |s: &BigRational| make(population * s.denom(), arith::int(k) * s.denom() + s.numer(), false);
        match &self.kind {
            RuleKind::Stationary(s) => shifted(s),
            RuleKind::HillHuntington => make(population * population, arith::int(k) * arith::int(k + 1), true),
            RuleKind::Dean => make(population * arith::int(2 * k + 1), arith::int(2 * k) * arith::int(k + 1), false),
            RuleKind::Table { default, overrides } => match overrides.get(&k) {
                Some(f) => make(population * f.denom(), f.numer().clone(), false),
                None => shifted(default),
            },
        }
    }
}

impl fmt::Display for SignpostRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RuleKind::Stationary(s) if s.is_one() => f.write_str("jefferson"),
            RuleKind::Stationary(s) if *s == arith::ratio(1, 2) => f.write_str("webster"),
            RuleKind::Stationary(s) if s.is_zero() => f.write_str("adams"),
            RuleKind::Stationary(s) => write!(f, "stationary:{}", arith::format_fraction(s)),
            RuleKind::HillHuntington => f.write_str("hill"),
            RuleKind::Dean => f.write_str("dean"),
            RuleKind::Table { default, overrides } => {
                write!(f, "table:default={}", arith::format_fraction(default))?;
                for (i, (k, v)) in overrides.iter().enumerate() {
                    let sep = if i == 0 { ';' } else { ',' };
                    write!(f, "{sep}{k}={}", arith::format_fraction(v))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SignpostRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidRule(format!("{s:?}: {why}"));
        match s {
            "jefferson" => return Ok(Self::jefferson()),
            "webster" => return Ok(Self::webster()),
            "adams" => return Ok(Self::adams()),
            "hill" => return Ok(Self::hill_huntington()),
            "dean" => return Ok(Self::dean()),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("stationary:") {
            return Self::stationary(arith::parse_rational(p)?);
        }
        if let Some(body) = s.strip_prefix("table:") {
            let (head, tail) = match body.split_once(';') {
                Some((h, t)) => (h, Some(t)),
                None => (body, None),
            };
            let default = head
                .strip_prefix("default=")
                .ok_or_else(|| bad("expected default=p/q"))?;
            let default = arith::parse_rational(default)?;
            let mut overrides = BTreeMap::new();
            for entry in tail.into_iter().flat_map(|t| t.split(',')) {
                let (k, v) = entry.split_once('=').ok_or_else(|| bad("expected k=f"))?;
                let k: u64 = k.trim().parse().map_err(|_| bad("bad key"))?;
                if overrides.insert(k, arith::parse_rational(v)?).is_some() {
                    return Err(bad("duplicate key"));
                }
            }
            return Self::table(default, overrides);
        }
        Err(Error::UnknownMethod(s.to_string()))
    }
}

/// A priority `v / f(k)`, possibly infinite (when `f(k) = 0`) or irrational
/// (square-root signposts).
#[derive(Debug, Clone)]
pub enum Priority {
    Infinite,
    Finite {
        num: BigInt,
        den: BigInt,
        /// The value is `√(num/den)` rather than `num/den`.
        squared: bool,
    },
}

impl Priority {
    pub fn new(population: &BigInt, signpost: &Signpost) -> Self {
        if signpost.is_zero() {
            return Priority::Infinite;
        }
        match signpost {
            Signpost::Rational(r) => Priority::Finite {
                num: population * r.denom(),
                den: r.numer().clone(),
                squared: false,
            },
            Signpost::Sqrt(n) => Priority::Finite {
                num: population * population,
                den: n.clone(),
                squared: true,
            },
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Priority::Infinite)
    }

    /// Exact value when it is rational.
    pub fn rational(&self) -> Option<BigRational> {
        match self {
            Priority::Infinite => None,
            Priority::Finite {
                num,
                den,
                squared: false,
            } => Some(BigRational::new(num.clone(), den.clone())),
            Priority::Finite { num, den, .. } => {
                let sq = BigRational::new(num.clone(), den.clone());
                let (n, d) = (sq.numer().sqrt(), sq.denom().sqrt());
                (&n * &n == *sq.numer() && &d * &d == *sq.denom())
                    .then(|| BigRational::new(n, d))
            }
        }
    }

    /// Square of the value.
    pub fn squared(&self) -> Option<BigRational> {
        match self {
            Priority::Infinite => None,
            Priority::Finite { num, den, squared } => {
                let r = BigRational::new(num.clone(), den.clone());
                Some(if *squared { r } else { &r * &r })
            }
        }
    }
}

impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        use Priority::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, _) => Ordering::Greater,
            (_, Infinite) => Ordering::Less,
            (
                Finite {
                    num: an,
                    den: ad,
                    squared: asq,
                },
                Finite {
                    num: bn,
                    den: bd,
                    squared: bsq,
                },
            ) => {
                if asq == bsq {
                    match (an.to_u64(), bd.to_u64(), bn.to_u64(), ad.to_u64()) {
                        (Some(an), Some(bd), Some(bn), Some(ad)) => {
                            (an as u128 * bd as u128).cmp(&(bn as u128 * ad as u128))
                        }
                        _ => (an * bd).cmp(&(bn * ad)),
                    }
                } else if *asq {
                    (an * bd * bd).cmp(&(bn * bn * ad))
                } else {
                    (an * an * bd).cmp(&(bn * ad * ad))
                }
            }
        }
    }
}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Priority {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Priority {}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self, self.rational()) {
            (Priority::Infinite, _) => f.write_str("inf"),
            (_, Some(r)) => f.write_str(&arith::format_fraction(&r)),
            (_, None) => write!(
                f,
                "sqrt({})",
                arith::format_fraction(&self.squared().expect("finite"))
            ),
        }
    }
}

impl Serialize for Priority {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exact comparison of `v_a / f(h_a)` against `v_b / f(h_b)`.
///
/// Two infinite priorities (`f = 0`, e.g. Adams at zero seats) are ordered by
/// population; `Equal` means a genuine tie left to the [`TiePolicy`].
pub fn priority_compare(
    rule: &SignpostRule,
    v_a: &BigInt,
    h_a: u64,
    v_b: &BigInt,
    h_b: u64,
) -> Ordering {
    let a = rule.priority(v_a, h_a);
    let b = rule.priority(v_b, h_b);
    rank(&a, v_a, &b, v_b)
}

fn rank(a: &Priority, v_a: &BigInt, b: &Priority, v_b: &BigInt) -> Ordering {
    match a.cmp(b) {
        Ordering::Equal if a.is_infinite() => v_a.cmp(v_b),
        o => o,
    }
}

/// Current priorities of every state, for seat-by-seat allocation.
pub(crate) struct PriorityBoard<'a> {
    instance: &'a Instance,
    rule: &'a SignpostRule,
    /// `v_i / f(h_i)`
    priorities: Vec<Priority>,
    /// `v_i / f(h_i - 1)`, for states holding a seat.
    held: Vec<Option<Priority>>,
}

impl<'a> PriorityBoard<'a> {
    pub(crate) fn new(instance: &'a Instance, rule: &'a SignpostRule, seats: &[u64]) -> Self {
        let pops = instance.populations();
        let priorities = seats.iter().zip(pops).map(|(&k, v)| rule.priority(v, k)).collect();
        let held = seats
            .iter()
            .zip(pops)
            .map(|(&k, v)| (k > 0).then(|| rule.priority(v, k - 1)))
            .collect();
        PriorityBoard {
            instance,
            rule,
            priorities,
            held,
        }
    }

    /// `state` has just gone up by one seat, to `seats`.
    pub(crate) fn add_seat(&mut self, state: usize, seats: u64) {
        let next = self.rule.priority(self.instance.population(state), seats);
        self.held[state] = Some(std::mem::replace(&mut self.priorities[state], next));
    }

    /// Highest-priority state among `candidates`, plus every state that
    /// matched it exactly.
    pub(crate) fn best(
        &self,
        candidates: impl IntoIterator<Item = usize>,
        policy: TiePolicy,
    ) -> Option<(usize, Vec<usize>)> {
        let pops = self.instance.populations();
        let mut top: Vec<usize> = Vec::new();
        for i in candidates {
            let Some(&lead) = top.first() else {
                top.push(i);
                continue;
            };
            match rank(&self.priorities[i], &pops[i], &self.priorities[lead], &pops[lead]) {
                Ordering::Greater => {
                    top.clear();
                    top.push(i);
                }
                Ordering::Equal => top.push(i),
                Ordering::Less => {}
            }
        }
        if top.is_empty() {
            return None;
        }
        Some((policy.pick(self.instance, &top), top))
    }
}

/// Square-root witnesses arise only from irrational bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Rational(BigRational),
    /// `√x`
    Sqrt(BigRational),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Rational(r) => f.write_str(&arith::format_fraction(r)),
            Witness::Sqrt(r) => write!(f, "sqrt({})", arith::format_fraction(r)),
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Evidence that a seat vector is a divisor-method outcome:
/// `max_j v_j/f(h_j) = lower ≤ upper = min_{h_i>0} v_i/f(h_i - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorCertificate {
    pub lower: Priority,
    pub upper: Priority,
    /// State attaining `lower`: the next in line for a seat.
    pub lower_state: usize,
    /// State attaining `upper` (none when no state holds a seat).
    pub upper_state: Option<usize>,
    /// A divisor in `[lower, upper]`; absent when `lower` is infinite.
    pub witness: Option<Witness>,
}

impl DivisorCertificate {
    fn witness_for(lower: &Priority, upper: &Priority) -> Option<Witness> {
        if lower.is_infinite() {
            return None;
        }
        if upper.is_infinite() {
            return Some(match lower.rational() {
                Some(r) => Witness::Rational(r),
                None => Witness::Sqrt(lower.squared().expect("finite")),
            });
        }
        if let Some(mid) = small_midpoint(lower, upper) {
            return Some(mid);
        }
        match (lower, upper) {
            (
                Priority::Finite { squared: false, .. },
                Priority::Finite { squared: false, .. },
            ) => {
                let mid = (lower.rational()? + upper.rational()?) / BigRational::from_integer(2.into());
                Some(Witness::Rational(mid))
            }
            _ => {
                let mid = (lower.squared()? + upper.squared()?) / BigRational::from_integer(2.into());
                Some(Witness::Sqrt(mid))
            }
        }
    }
}

/// `(a/b + c/d) / 2` in machine integers, when the terms are small enough.
fn small_midpoint(lower: &Priority, upper: &Priority) -> Option<Witness> {
    let (
        Priority::Finite { num: a, den: b, squared: sa },
        Priority::Finite { num: c, den: d, squared: sc },
    ) = (lower, upper)
    else {
        return None;
    };
    if sa != sc {
        return None;
    }
    let small = |x: &BigInt| x.to_u64().map(u128::from);
    let (a, b, c, d) = (small(a)?, small(b)?, small(c)?, small(d)?);
    let num = (a * d).checked_add(c * b)?;
    let den = (2 * b).checked_mul(d)?;
    let g = num_integer::gcd(num, den);
    let r = BigRational::new_raw(BigInt::from(num / g), BigInt::from(den / g));
    Some(if *sa { Witness::Sqrt(r) } else { Witness::Rational(r) })
}

fn check_len(instance: &Instance, seats: &[u64]) -> Result<()> {
    if seats.len() != instance.len() {
        return Err(Error::LengthMismatch {
            expected: instance.len(),
            got: seats.len(),
        });
    }
    Ok(())
}

/// Recomputes the divisor bounds for `h` from scratch.
pub fn verify_certificate(
    instance: &Instance,
    h: &Apportionment,
    rule: &SignpostRule,
) -> Result<DivisorCertificate> {
    let seats = h.seats();
    check_len(instance, seats)?;
    let board = PriorityBoard::new(instance, rule, seats);
    certificate(&board)
}

fn certificate(board: &PriorityBoard<'_>) -> Result<DivisorCertificate> {
    let next = &board.priorities;
    let mut lower_state = 0;
    for j in 1..next.len() {
        if next[j] > next[lower_state] {
            lower_state = j;
        }
    }
    let lower = next[lower_state].clone();
    let mut upper: Option<(usize, &Priority)> = None;
    for (i, p) in board.held.iter().enumerate() {
        if let Some(p) = p {
            if upper.map_or(true, |(_, u)| p < u) {
                upper = Some((i, p));
            }
        }
    }
    let (upper_state, upper) = match upper {
        Some((i, p)) => (Some(i), p.clone()),
        None => (None, Priority::Infinite),
    };
    if lower > upper {
        return Err(Error::Certificate {
            over: upper_state.expect("finite upper bound has a state"),
            under: lower_state,
        });
    }
    let witness = DivisorCertificate::witness_for(&lower, &upper);
    Ok(DivisorCertificate {
        lower,
        upper,
        lower_state,
        upper_state,
        witness,
    })
}

/// States whose relative placement was decided by a tie: some state's last
/// seat ranks exactly level with another state's next seat, so trading that
/// seat yields another valid outcome.
fn outcome_tie(board: &PriorityBoard<'_>) -> Option<Vec<usize>> {
    let pops = board.instance.populations();
    let next = &board.priorities;
    for (i, last) in board.held.iter().enumerate() {
        let Some(last) = last else { continue };
        for j in (0..next.len()).filter(|&j| j != i) {
            if rank(last, &pops[i], &next[j], &pops[j]) == Ordering::Equal {
                return Some(vec![i, j]);
            }
        }
    }
    None
}

pub fn apportion_divisor(
    instance: &Instance,
    house: u64,
    rule: &SignpostRule,
    policy: TiePolicy,
) -> Result<(Apportionment, DivisorCertificate)> {
    apportion_divisor_with(instance, house, rule, policy, false)
}

/// Greedy divisor allocation, optionally keeping the per-seat log.
pub fn apportion_divisor_with(
    instance: &Instance,
    house: u64,
    rule: &SignpostRule,
    policy: TiePolicy,
    trace: bool,
) -> Result<(Apportionment, DivisorCertificate)> {
    let mut run = Greedy::new(instance, rule, policy, trace);
    for _ in 0..house {
        run.step();
    }
    finish(house, &run.board, &run.seats, policy, run.log)
}

/// Allocations for every house size `0..=house_max` from one greedy run.
pub fn divisor_series(
    instance: &Instance,
    house_max: u64,
    rule: &SignpostRule,
    policy: TiePolicy,
) -> Result<Vec<(Apportionment, DivisorCertificate)>> {
    let mut run = Greedy::new(instance, rule, policy, false);
    let mut out = Vec::with_capacity(house_max as usize + 1);
    for house in 0..=house_max {
        if house > 0 {
            run.step();
        }
        out.push(finish(house, &run.board, &run.seats, policy, None)?);
    }
    Ok(out)
}

struct Greedy<'a> {
    board: PriorityBoard<'a>,
    policy: TiePolicy,
    seats: Vec<u64>,
    log: Option<Vec<SeatAward>>,
}

impl<'a> Greedy<'a> {
    fn new(instance: &'a Instance, rule: &'a SignpostRule, policy: TiePolicy, trace: bool) -> Self {
        let seats = vec![0u64; instance.len()];
        Greedy {
            board: PriorityBoard::new(instance, rule, &seats),
            policy,
            seats,
            log: trace.then(Vec::new),
        }
    }

    fn step(&mut self) {
        let n = self.seats.len();
        let (winner, tied) = self.board.best(0..n, self.policy).expect("nonempty instance");
        self.seats[winner] += 1;
        self.board.add_seat(winner, self.seats[winner]);
        if let Some(log) = self.log.as_mut() {
            log.push(SeatAward {
                house: self.seats.iter().sum(),
                state: winner,
                tied: tied.len() > 1,
                eligibility: None,
            });
        }
    }
}

fn finish(
    house: u64,
    board: &PriorityBoard<'_>,
    seats: &[u64],
    policy: TiePolicy,
    log: Option<Vec<SeatAward>>,
) -> Result<(Apportionment, DivisorCertificate)> {
    let tie = outcome_tie(board);
    if let (TiePolicy::FailOnTie, Some(states)) = (policy, &tie) {
        return Err(Error::Tie(TieReport {
            house,
            states: states.clone(),
            context: "divisor priority",
        }));
    }
    let h = Apportionment::from_seats(seats.to_vec())
        .with_tie(tie.is_some())
        .with_trace(log);
    let cert = certificate(board)
        .map_err(|e| Error::Internal(format!("greedy result failed its certificate: {e}")))?;
    Ok((h, cert))
}
