//! Reference implementations over `i128`, written straight from the
//! definitions and sharing no code with the library. Populations are passed
//! in non-increasing order, matching the library's sorted view.

#![allow(dead_code)]

pub mod lemmas;

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use apportion::model::{Instance, TiePolicy};
use apportion::search::random_candidate;
use apportion::Method;
use num_traits::ToPrimitive;

/// Rounding rules as plain numbers. Fractions are `(numerator, denominator)`.
#[derive(Debug, Clone)]
pub enum Rule {
    /// `f(k) = k + a/b`
    Stationary(i128, i128),
    Hill,
    Dean,
    /// `f(k) = k + default` except at the listed `k`.
    Table {
        default: (i128, i128),
        overrides: Vec<(u64, i128, i128)>,
    },
}

#[derive(Clone, Copy)]
enum Sp {
    Frac(i128, i128),
    /// `√m`
    Root(i128),
}

impl Rule {
    pub fn all_simple() -> Vec<Rule> {
        vec![
            Rule::Stationary(0, 1),
            Rule::Stationary(1, 4),
            Rule::Stationary(1, 2),
            Rule::Stationary(3, 4),
            Rule::Stationary(1, 1),
            Rule::Hill,
            Rule::Dean,
        ]
    }

    pub fn table_example() -> Rule {
        Rule::Table {
            default: (1, 1),
            overrides: vec![(2, 5, 2), (8, 17, 2), (14, 29, 2)],
        }
    }

    pub fn id(&self) -> String {
        match self {
            Rule::Stationary(a, b) => format!("stationary:{a}/{b}"),
            Rule::Hill => "hill".into(),
            Rule::Dean => "dean".into(),
            Rule::Table { default, overrides } => {
                let list: Vec<String> = overrides.iter().map(|(k, a, b)| format!("{k}={a}/{b}")).collect();
                format!("table:default={}/{};{}", default.0, default.1, list.join(","))
            }
        }
    }

    pub fn method(&self) -> Method {
        self.id().parse().expect("valid rule id")
    }

    fn signpost(&self, k: u64) -> Sp {
        let k = k as i128;
        match self {
            Rule::Stationary(a, b) => Sp::Frac(k * b + a, *b),
            Rule::Hill => Sp::Root(k * (k + 1)),
            Rule::Dean => Sp::Frac(2 * k * (k + 1), 2 * k + 1),
            Rule::Table { default, overrides } => match overrides.iter().find(|o| o.0 as i128 == k) {
                Some(&(_, a, b)) => Sp::Frac(a, b),
                None => Sp::Frac(k * default.1 + default.0, default.1),
            },
        }
    }

    /// Compares `va / f(ka)` with `vb / f(kb)`; division by zero is infinite
    /// and two infinities are ranked by population.
    pub fn cmp(&self, va: i128, ka: u64, vb: i128, kb: u64) -> Ordering {
        cmp_sp(va, &self.signpost(ka), vb, &self.signpost(kb))
    }

    /// The defining inequalities: every seat held outranks every seat not
    /// held.
    pub fn satisfied_by(&self, pops: &[i128], h: &[u64]) -> bool {
        (0..pops.len()).filter(|&i| h[i] > 0).all(|i| {
            (0..pops.len()).all(|j| self.cmp(pops[i], h[i] - 1, pops[j], h[j]) != Ordering::Less)
        })
    }
}

fn cmp_sp(va: i128, a: &Sp, vb: i128, b: &Sp) -> Ordering {
    match (*a, *b) {
        (Sp::Frac(na, da), Sp::Frac(nb, db)) => match (na == 0, nb == 0) {
            (true, true) => va.cmp(&vb),
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => (va * da * nb).cmp(&(vb * db * na)),
        },
        (Sp::Root(ma), Sp::Root(mb)) => match (ma == 0, mb == 0) {
            (true, true) => va.cmp(&vb),
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => (va * va * mb).cmp(&(vb * vb * ma)),
        },
        _ => unreachable!("one rule has one kind of signpost"),
    }
}

/// Every composition of `house` into `n` nonnegative parts.
pub fn compositions(n: usize, house: u64) -> Vec<Vec<u64>> {
    fn go(n: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, house, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Every composition satisfying the divisor inequalities for `rule`.
pub fn divisor_solutions(rule: &Rule, pops: &[i128], house: u64) -> Vec<Vec<u64>> {
    compositions(pops.len(), house)
        .into_iter()
        .filter(|h| rule.satisfied_by(pops, h))
        .collect()
}

/// As [`divisor_solutions`], building compositions state by state and
/// dropping a prefix as soon as some seat held ranks below some seat not
/// held. Priorities fall as `k` grows, so no solution is lost.
pub fn divisor_solutions_pruned(rule: &Rule, pops: &[i128], house: u64) -> Vec<Vec<u64>> {
    Ranks::new(rule, pops, house).solutions(house)
}

/// Dense ranks of `v_i / f(k)` for every state and `k ≤ kmax`, so that the
/// composition search compares integers. Equal priorities share a rank.
pub struct Ranks {
    rank: Vec<Vec<u32>>,
}

impl Ranks {
    pub fn new(rule: &Rule, pops: &[i128], kmax: u64) -> Self {
        let sp: Vec<Sp> = (0..=kmax).map(|k| rule.signpost(k)).collect();
        let mut slots: Vec<(usize, u64)> = (0..pops.len()).flat_map(|i| (0..=kmax).map(move |k| (i, k))).collect();
        let cmp = |a: &(usize, u64), b: &(usize, u64)| cmp_sp(pops[a.0], &sp[a.1 as usize], pops[b.0], &sp[b.1 as usize]);
        slots.sort_by(cmp);
        let mut rank = vec![vec![0u32; kmax as usize + 1]; pops.len()];
        let mut r = 0;
        for (n, s) in slots.iter().enumerate() {
            if n > 0 && cmp(&slots[n - 1], s) == Ordering::Less {
                r += 1;
            }
            rank[s.0][s.1 as usize] = r;
        }
        Ranks { rank }
    }

    fn at(&self, i: usize, k: u64) -> u32 {
        self.rank[i][k as usize]
    }

    /// Every composition of `house` that satisfies the defining inequalities.
    /// The search tracks the weakest seat held and the strongest seat not
    /// held, and prunes once the first falls below the second.
    pub fn solutions(&self, house: u64) -> Vec<Vec<u64>> {
        assert!(self.rank[0].len() as u64 > house, "table too short");
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.rank.len());
        self.go(house, None, None, &mut cur, &mut out);
        out
    }

    fn go(&self, left: u64, held: Option<u32>, next: Option<u32>, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let i = cur.len();
        let n = self.rank.len();
        if i == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let first = if i + 1 == n { left } else { 0 };
        for k in first..=left {
            let last = (k > 0).then(|| self.at(i, k - 1));
            // ranks fall as k grows, so no larger k can recover
            if let (Some(l), Some(x)) = (last, next) {
                if l < x {
                    break;
                }
            }
            let this_next = self.at(i, k);
            if held.is_some_and(|h| h < this_next) {
                continue;
            }
            let held2 = match (held, last) {
                (Some(h), Some(l)) => Some(h.min(l)),
                (h, l) => h.or(l),
            };
            let next2 = Some(next.map_or(this_next, |x| x.max(this_next)));
            cur.push(k);
            self.go(left - k, held2, next2, cur, out);
            cur.pop();
        }
    }
}

pub fn instance(pops: &[i128]) -> Instance {
    let v: Vec<u64> = pops.iter().map(|&p| p as u64).collect();
    Instance::from_u64(&v).unwrap()
}

/// Candidate `index` of the biased search generator, as sorted `i128`s.
pub fn candidate(
    seed: u64,
    index: u64,
    states: &RangeInclusive<usize>,
    max_pop: u64,
    houses: &RangeInclusive<u64>,
) -> (Vec<i128>, u64) {
    let (v, house) = random_candidate(seed, index, states, max_pop, houses);
    let pops = v.populations().iter().map(|p| p.to_i128().unwrap()).collect();
    (pops, house)
}

pub fn sorted_desc(mut pops: Vec<i128>) -> Vec<i128> {
    pops.sort_unstable_by(|a, b| b.cmp(a));
    pops
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

/// `[a/b]` with halves rounded up.
fn nearest(a: i128, b: i128) -> i128 {
    floor_div(2 * a + b, 2 * b)
}

/// Some pair of equal populations holds different seat counts.
pub fn equal_split(pops: &[i128], h: &[u64]) -> bool {
    (0..pops.len()).any(|i| (i + 1..pops.len()).any(|j| pops[i] == pops[j] && h[i] != h[j]))
}

/// A reference quota method result: seats and whether the outcome turned
/// on a tie.
pub struct Outcome {
    pub seats: Vec<u64>,
    pub tie: bool,
}

/// Largest remainders on `(H + a/b) v_i / V`.
pub fn shift_quota(pops: &[i128], house: u64, a: i128, b: i128) -> Outcome {
    let total: i128 = pops.iter().sum();
    let num = b * house as i128 + a;
    let den = b * total;
    let mut seats: Vec<i128> = pops.iter().map(|&v| floor_div(num * v, den)).collect();
    let rem: Vec<i128> = pops.iter().map(|&v| (num * v).rem_euclid(den)).collect();
    let short = (house as i128 - seats.iter().sum::<i128>()) as usize;
    let mut order: Vec<usize> = (0..pops.len()).collect();
    // stable: equal remainders keep size order
    order.sort_by(|&x, &y| rem[y].cmp(&rem[x]));
    for &i in &order[..short] {
        seats[i] += 1;
    }
    let tie = short > 0 && short < pops.len() && rem[order[short - 1]] == rem[order[short]];
    Outcome {
        seats: seats.into_iter().map(|k| k as u64).collect(),
        tie,
    }
}

fn floors(pops: &[i128], house: u64) -> Vec<i128> {
    let total: i128 = pops.iter().sum();
    pops.iter().map(|&v| floor_div(house as i128 * v, total)).collect()
}

fn fractional(pops: &[i128], house: u64) -> Vec<bool> {
    let total: i128 = pops.iter().sum();
    pops.iter().map(|&v| (house as i128 * v) % total != 0).collect()
}

fn finish(pops: &[i128], seats: Vec<i128>) -> Outcome {
    let seats: Vec<u64> = seats.into_iter().map(|k| k as u64).collect();
    Outcome {
        tie: equal_split(pops, &seats),
        seats,
    }
}

pub fn lar(pops: &[i128], house: u64) -> Outcome {
    let mut seats = floors(pops, house);
    let mut short = house as i128 - seats.iter().sum::<i128>();
    let frac = fractional(pops, house);
    for i in 0..pops.len() {
        if short > 0 && frac[i] {
            seats[i] += 1;
            short -= 1;
        }
    }
    finish(pops, seats)
}

pub fn sml(pops: &[i128], house: u64) -> Outcome {
    let mut seats = floors(pops, house);
    let mut short = house as i128 - seats.iter().sum::<i128>();
    let frac = fractional(pops, house);
    for i in (0..pops.len()).rev() {
        if short > 0 && frac[i] {
            seats[i] += 1;
            short -= 1;
        }
    }
    finish(pops, seats)
}

pub fn lqe(pops: &[i128], house: u64) -> Outcome {
    let mut seats = floors(pops, house);
    seats[0] += house as i128 - seats.iter().sum::<i128>();
    finish(pops, seats)
}

pub fn suq(pops: &[i128], house: u64) -> Outcome {
    let total: i128 = pops.iter().sum();
    let mut left = house as i128;
    let seats = pops
        .iter()
        .map(|&v| {
            let k = ceil_div(house as i128 * v, total).min(left);
            left -= k;
            k
        })
        .collect();
    finish(pops, seats)
}

fn rounded(pops: &[i128], house: u64) -> Vec<i128> {
    let total: i128 = pops.iter().sum();
    pops.iter().map(|&v| nearest(house as i128 * v, total)).collect()
}

pub fn nie(pops: &[i128], house: u64) -> Outcome {
    let mut seats = rounded(pops, house);
    let c = seats.iter().sum::<i128>() - house as i128;
    if c <= 0 {
        seats[0] -= c;
    } else {
        let mut c = c;
        for k in seats.iter_mut().rev() {
            let take = c.min(*k);
            *k -= take;
            c -= take;
        }
    }
    finish(pops, seats)
}

pub fn nis(pops: &[i128], house: u64) -> Outcome {
    let mut seats = rounded(pops, house);
    let c = seats.iter().sum::<i128>() - house as i128;
    if c <= 0 {
        for k in seats.iter_mut().take((-c) as usize) {
            *k += 1;
        }
    } else {
        let mut c = c;
        for k in seats.iter_mut().rev() {
            if c > 0 && *k > 0 {
                *k -= 1;
                c -= 1;
            }
        }
    }
    finish(pops, seats)
}

/// `(library id, reference)` for every quota method checked against a
/// reference.
pub fn quota_references() -> Vec<(&'static str, fn(&[i128], u64) -> Outcome)> {
    vec![
        ("hamilton", |p, h| shift_quota(p, h, 0, 1)),
        ("shiftquota:1/3", |p, h| shift_quota(p, h, 1, 3)),
        ("shiftquota:2/3", |p, h| shift_quota(p, h, 2, 3)),
        ("lar", lar),
        ("sml", sml),
        ("lqe", lqe),
        ("suq", suq),
        ("nie", nie),
        ("nis", nis),
    ]
}

/// Quotatone eligibility computed from the definition.
pub struct Eligible {
    pub upper: Vec<usize>,
    /// Least `α ≥ 1` with `g(α) ≥ α` among `1..=limit`.
    pub alpha_tilde: Option<u64>,
    pub lower: Vec<usize>,
    pub eligible: Vec<usize>,
}

fn owed(pops: &[i128], h: &[u64], target: u64) -> Vec<i128> {
    let total: i128 = pops.iter().sum();
    pops.iter()
        .zip(h)
        .map(|(&v, &k)| floor_div(target as i128 * v, total) - k as i128)
        .collect()
}

/// `max_i ⌈(h_i V − H v_i) / v_i⌉`, if positive.
pub fn alpha_bound(pops: &[i128], h: &[u64]) -> Option<u64> {
    let total: i128 = pops.iter().sum();
    let house: u64 = h.iter().sum();
    pops.iter()
        .zip(h)
        .map(|(&v, &k)| ceil_div(k as i128 * total - house as i128 * v, v))
        .max()
        .filter(|&b| b > 0)
        .map(|b| b as u64)
}

/// Eligible states for the seat after `h`, scanning `α` up to `limit`.
pub fn eligible(pops: &[i128], h: &[u64], limit: u64) -> Eligible {
    let total: i128 = pops.iter().sum();
    let house: u64 = h.iter().sum();
    let n = pops.len();
    let upper: Vec<usize> = (0..n)
        .filter(|&i| (h[i] as i128) * total < (house as i128 + 1) * pops[i])
        .collect();
    let alpha_tilde = (1..=limit).find(|&a| {
        let g: i128 = owed(pops, h, house + a).into_iter().filter(|&d| d >= 1).sum();
        g >= a as i128
    });
    let lower: Vec<usize> = match alpha_tilde {
        Some(a) => {
            let d = owed(pops, h, house + a);
            (0..n).filter(|&i| d[i] >= 1).collect()
        }
        None => (0..n).collect(),
    };
    let eligible = upper.iter().copied().filter(|i| lower.contains(i)).collect();
    Eligible {
        upper,
        alpha_tilde,
        lower,
        eligible,
    }
}

/// As [`eligible`], with `α̃` sought over every `α ≥ 1`. Past the bound no
/// state is owed a negative amount, so `g(α) = α − Σ frac((H+α) v_i / V)`
/// and the first hit is the first `α` making every such quota an integer.
pub fn eligible_unbounded(pops: &[i128], h: &[u64]) -> Eligible {
    let bound = alpha_bound(pops, h).unwrap_or(0);
    let near = eligible(pops, h, bound);
    if near.alpha_tilde.is_some() {
        return near;
    }
    let total: i128 = pops.iter().sum();
    let period = (total / pops.iter().fold(0, |g, &v| num_integer::gcd(g, v))) as u64;
    let house: u64 = h.iter().sum();
    let alpha = ((house + bound) / period + 1) * period - house;
    let d = owed(pops, h, house + alpha);
    assert_eq!(d.iter().filter(|&&x| x >= 1).sum::<i128>(), alpha as i128);
    let lower: Vec<usize> = (0..pops.len()).filter(|&i| d[i] >= 1).collect();
    let eligible = near.upper.iter().copied().filter(|i| lower.contains(i)).collect();
    Eligible {
        upper: near.upper,
        alpha_tilde: Some(alpha),
        lower,
        eligible,
    }
}

/// Quotatone allocations for `0..=house_max`, `α` scanned to the bound. The
/// flag records whether any award was decided by a tie.
pub fn quotatone_series(rule: &Rule, pops: &[i128], house_max: u64) -> (Vec<Vec<u64>>, bool) {
    let mut h = vec![0u64; pops.len()];
    let mut out = vec![h.clone()];
    let mut tie = false;
    for _ in 0..house_max {
        let e = eligible(pops, &h, alpha_bound(pops, &h).unwrap_or(0));
        let mut top = vec![e.eligible[0]];
        for &i in &e.eligible[1..] {
            match rule.cmp(pops[i], h[i], pops[top[0]], h[top[0]]) {
                Ordering::Greater => top = vec![i],
                Ordering::Equal => top.push(i),
                Ordering::Less => {}
            }
        }
        tie |= top.len() > 1;
        // populations are sorted, so the first is the larger
        let best = *top.iter().min().unwrap();
        h[best] += 1;
        out.push(h.clone());
    }
    (out, tie)
}

pub fn default_policy() -> TiePolicy {
    TiePolicy::default()
}
