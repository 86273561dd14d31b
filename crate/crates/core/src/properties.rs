//! Axiom checkers. Each returns `Ok(None)` when the property holds on the
//! inputs checked and a witness otherwise.
//!
//! State indices in witnesses and reports refer to the size-sorted order of
//! the instance.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::Result;
use crate::method::Method;
use crate::model::{admissible_lambdas, scale_apportionment, Apportionment, Instance, ScaleFactor, TiePolicy};

/// A state outside `{⌊q_i⌋, ⌈q_i⌉}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaBreach {
    pub house: u64,
    pub state: usize,
    pub seats: u64,
    pub lower: u64,
    pub upper: u64,
}

/// A state that lost a seat going from `house - 1` to `house`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneBreach {
    pub house: u64,
    pub state: usize,
}

/// `⌊H v_i / V⌋` and `⌈H v_i / V⌉` for every state.
pub fn quota_bounds(instance: &Instance, house: u64) -> Vec<(u64, u64)> {
    let h = BigInt::from(house);
    instance
        .populations()
        .iter()
        .map(|v| {
            let (q, r) = (&h * v).div_mod_floor(instance.total());
            let lo = arith::seats_of(&q);
            (lo, if r == BigInt::from(0) { lo } else { lo + 1 })
        })
        .collect()
}

/// First state of `h` outside its quota bounds.
pub fn quota_breach_of(instance: &Instance, h: &Apportionment) -> Option<QuotaBreach> {
    quota_bounds(instance, h.house())
        .into_iter()
        .zip(h.seats())
        .enumerate()
        .find(|(_, ((lo, hi), &k))| k < *lo || k > *hi)
        .map(|(state, ((lower, upper), &seats))| QuotaBreach {
            house: h.house(),
            state,
            seats,
            lower,
            upper,
        })
}

pub fn check_quota(
    method: &Method,
    instance: &Instance,
    house: u64,
    policy: TiePolicy,
) -> Result<Option<QuotaBreach>> {
    let h = method.apportion(instance, house, policy)?;
    Ok(quota_breach_of(instance, &h))
}

/// First place along a series where some state loses a seat.
pub fn monotone_breach_of(series: &[Apportionment]) -> Option<MonotoneBreach> {
    series.windows(2).find_map(|w| {
        w[0].seats()
            .iter()
            .zip(w[1].seats())
            .position(|(a, b)| b < a)
            .map(|state| MonotoneBreach {
                house: w[1].house(),
                state,
            })
    })
}

/// Evaluates every house size `0..=house_max`.
pub fn check_house_monotone(
    method: &Method,
    instance: &Instance,
    house_max: u64,
    policy: TiePolicy,
) -> Result<Option<MonotoneBreach>> {
    let series = method.series(instance, house_max, policy)?;
    Ok(monotone_breach_of(&series))
}

/// First multiplier `c` for which `c·v` is apportioned differently from `v`.
pub fn check_homogeneity(
    method: &Method,
    instance: &Instance,
    house: u64,
    multipliers: &[u64],
    policy: TiePolicy,
) -> Result<Option<u64>> {
    let base = method.apportion(instance, house, policy)?;
    for &c in multipliers {
        let scaled = instance.scaled(&BigInt::from(c))?;
        if method.apportion(&scaled, house, policy)?.seats() != base.seats() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Apportions `Σ q` seats to populations `q`, so that every quota is the
/// integer `q_i`. States with `q_i = 0` take no part and receive nothing.
/// Returns the differing allocation, in the order of `quota`, on failure.
pub fn check_weak_proportionality(
    method: &Method,
    quota: &[u64],
    policy: TiePolicy,
) -> Result<Option<Vec<u64>>> {
    let positive: Vec<u64> = quota.iter().copied().filter(|&q| q > 0).collect();
    let instance = Instance::from_u64(&positive)?;
    let house = positive.iter().sum();
    let h = method.apportion(&instance, house, policy)?;
    let mut placed = instance.input_order(h.seats()).into_iter();
    let actual: Vec<u64> = quota
        .iter()
        .map(|&q| if q == 0 { 0 } else { placed.next().expect("one per positive entry") })
        .collect();
    Ok((actual != quota).then_some(actual))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaVerdict {
    pub lambda: ScaleFactor,
    /// `λ·h`
    pub expected: Vec<u64>,
    /// `F(v, λH)`
    pub actual: Apportionment,
    pub pass: bool,
}

/// Outcome of a proportional-consistency audit at one house size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PCReport {
    pub method: Method,
    /// Size-sorted.
    #[serde(with = "arith::serde_bigint_vec")]
    pub populations: Vec<BigInt>,
    pub house: u64,
    pub base: Apportionment,
    pub verdicts: Vec<LambdaVerdict>,
    pub overall: bool,
    /// Some evaluation in the audit was decided by a tie-break.
    pub tie_involved: bool,
}

impl PCReport {
    pub fn failures(&self) -> impl Iterator<Item = &LambdaVerdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    /// A failure that does not rest on a tie-break.
    pub fn is_violation(&self) -> bool {
        !self.overall && !self.tie_involved
    }

    pub fn instance(&self) -> Result<Instance> {
        Instance::new(self.populations.clone())
    }
}

/// Compares `F(v, λH)` with `λ·F(v, H)` for every admissible `λ`.
pub fn check_pc(method: &Method, instance: &Instance, house: u64, policy: TiePolicy) -> Result<PCReport> {
    let base = method.apportion(instance, house, policy)?;
    let lambdas = if house == 0 {
        Vec::new()
    } else {
        admissible_lambdas(&base)?
    };
    let mut tie_involved = base.tie_flag();
    let mut verdicts = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let expected = scale_apportionment(&base, lambda)?.into_seats();
        let actual = method.apportion(instance, expected.iter().sum(), policy)?;
        tie_involved |= actual.tie_flag();
        verdicts.push(LambdaVerdict {
            lambda,
            pass: actual.seats() == expected.as_slice(),
            expected,
            actual,
        });
    }
    Ok(PCReport {
        method: method.clone(),
        populations: instance.populations().to_vec(),
        house,
        overall: verdicts.iter().all(|v| v.pass),
        base,
        verdicts,
        tie_involved,
    })
}
