//! Instances, quotas, seat vectors, scale factors and tie policy.
//!
//! Every method operates on the size-sorted view of an [`Instance`]: index 0
//! is the most populous state. The instance remembers where each sorted state
//! came from so results can be reported in the caller's order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::quotatone::EligibilitySets;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceWire", into = "InstanceWire")]
pub struct Instance {
    populations: Vec<BigInt>,
    order: Vec<usize>,
    total: BigInt,
    names: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    #[serde(with = "arith::serde_bigint_vec")]
    populations: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl TryFrom<InstanceWire> for Instance {
    type Error = Error;

    fn try_from(w: InstanceWire) -> Result<Self> {
        let inst = Instance::new(w.populations)?;
        match w.names {
            Some(names) => inst.with_names(names),
            None => Ok(inst),
        }
    }
}

impl From<Instance> for InstanceWire {
    fn from(inst: Instance) -> Self {
        InstanceWire {
            populations: inst.input_order(&inst.populations),
            names: inst.names,
        }
    }
}

impl Instance {
    /// Builds an instance from populations in input order.
    pub fn new(populations: Vec<BigInt>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::InvalidInstance("no states".into()));
        }
        if let Some(i) = populations.iter().position(|v| !v.is_positive()) {
            return Err(Error::InvalidInstance(format!(
                "population of state {i} is {}, must be positive",
                populations[i]
            )));
        }
        let mut order: Vec<usize> = (0..populations.len()).collect();
        // stable: equal populations keep input order
        order.sort_by(|&a, &b| populations[b].cmp(&populations[a]));
        let sorted: Vec<BigInt> = order.iter().map(|&i| populations[i].clone()).collect();
        let total = sorted.iter().sum();
        Ok(Instance {
            populations: sorted,
            order,
            total,
            names: None,
        })
    }

    pub fn from_u64(populations: &[u64]) -> Result<Self> {
        Self::new(populations.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Attaches display names, given in input order.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::InvalidInstance(format!(
                "{} names for {} states",
                names.len(),
                self.len()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }

    /// Populations in non-increasing order.
    pub fn populations(&self) -> &[BigInt] {
        &self.populations
    }

    pub fn population(&self, state: usize) -> &BigInt {
        &self.populations[state]
    }

    pub fn total(&self) -> &BigInt {
        &self.total
    }

    /// `order()[k]` is the input position of sorted state `k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Names in input order, if any were given.
    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Population share `v_i / V`.
    pub fn share(&self, state: usize) -> BigRational {
        BigRational::new(self.populations[state].clone(), self.total.clone())
    }

    /// Rearranges a per-state vector from sorted order back to input order.
    pub fn input_order<T: Clone>(&self, sorted: &[T]) -> Vec<T> {
        let mut out: Vec<Option<T>> = vec![None; sorted.len()];
        for (k, &pos) in self.order.iter().enumerate() {
            out[pos] = Some(sorted[k].clone());
        }
        out.into_iter().map(|x| x.expect("permutation")).collect()
    }

    /// Same instance with every population multiplied by `factor`.
    pub fn scaled(&self, factor: &BigInt) -> Result<Self> {
        let pops = self.input_order(&self.populations);
        let inst = Instance::new(pops.into_iter().map(|v| v * factor).collect())?;
        Ok(match &self.names {
            Some(n) => inst.with_names(n.clone())?,
            None => inst,
        })
    }

    /// Populations divided by their common gcd, in sorted order.
    pub fn primitive_populations(&self) -> Vec<BigInt> {
        let g = self
            .populations
            .iter()
            .fold(BigInt::zero(), |g, v| g.gcd(v));
        self.populations.iter().map(|v| v / &g).collect()
    }

    /// True when two states share a population.
    pub fn has_equal_populations(&self) -> bool {
        self.populations.windows(2).any(|w| w[0] == w[1])
    }
}

/// Shifted quotas `(H + s) v_i / V`; `s = 0` gives the standard quotas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotas {
    #[serde(with = "arith::serde_rational_vec")]
    pub values: Vec<BigRational>,
    pub house: u64,
    #[serde(with = "arith::serde_rational")]
    pub shift: BigRational,
}

pub(crate) fn check_shift(shift: &BigRational) -> Result<()> {
    if shift.is_negative() || *shift >= BigRational::one() {
        return Err(Error::InvalidShift(arith::format_rational(shift)));
    }
    Ok(())
}

pub fn quotas(instance: &Instance, house: u64, shift: &BigRational) -> Result<Quotas> {
    check_shift(shift)?;
    let scale = BigRational::from_integer(arith::int(house)) + shift;
    let values = instance
        .populations()
        .iter()
        .map(|v| &scale * BigRational::new(v.clone(), instance.total().clone()))
        .collect();
    Ok(Quotas {
        values,
        house,
        shift: shift.clone(),
    })
}

pub fn standard_quotas(instance: &Instance, house: u64) -> Quotas {
    quotas(instance, house, &BigRational::zero()).expect("zero shift is valid")
}

/// One step of a sequential (seat-by-seat) method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatAward {
    /// House size after this seat.
    pub house: u64,
    pub state: usize,
    /// Another candidate had exactly the same priority.
    pub tied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eligibility: Option<EligibilitySets>,
}

/// A seat vector in size-sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ApportionmentWire", into = "ApportionmentWire")]
pub struct Apportionment {
    seats: Vec<u64>,
    house: u64,
    tie_flag: bool,
    trace: Option<Vec<SeatAward>>,
}

#[derive(Serialize, Deserialize)]
struct ApportionmentWire {
    house: u64,
    seats: Vec<u64>,
    tie_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<SeatAward>>,
}

impl TryFrom<ApportionmentWire> for Apportionment {
    type Error = Error;

    fn try_from(w: ApportionmentWire) -> Result<Self> {
        let sum: u64 = w.seats.iter().sum();
        if sum != w.house {
            return Err(Error::InvalidInstance(format!(
                "seats sum to {sum}, house is {}",
                w.house
            )));
        }
        Ok(Apportionment {
            seats: w.seats,
            house: w.house,
            tie_flag: w.tie_flag,
            trace: w.trace,
        })
    }
}

impl From<Apportionment> for ApportionmentWire {
    fn from(a: Apportionment) -> Self {
        ApportionmentWire {
            house: a.house,
            seats: a.seats,
            tie_flag: a.tie_flag,
            trace: a.trace,
        }
    }
}

impl Apportionment {
    pub fn from_seats(seats: Vec<u64>) -> Self {
        let house = seats.iter().sum();
        Apportionment {
            seats,
            house,
            tie_flag: false,
            trace: None,
        }
    }

    pub fn zero(states: usize) -> Self {
        Self::from_seats(vec![0; states])
    }

    pub(crate) fn with_tie(mut self, tie_flag: bool) -> Self {
        self.tie_flag = tie_flag;
        self
    }

    pub(crate) fn with_trace(mut self, trace: Option<Vec<SeatAward>>) -> Self {
        self.trace = trace;
        self
    }

    pub fn seats(&self) -> &[u64] {
        &self.seats
    }

    pub fn house(&self) -> u64 {
        self.house
    }

    pub fn tie_flag(&self) -> bool {
        self.tie_flag
    }

    pub fn trace(&self) -> Option<&[SeatAward]> {
        self.trace.as_deref()
    }

    pub fn into_seats(self) -> Vec<u64> {
        self.seats
    }
}

/// A rational `p/q` with `0 < p < q` and `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ScaleFactor {
    num: u64,
    den: u64,
}

impl ScaleFactor {
    /// Reduces `p/q` and checks `0 < p/q < 1`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::InvalidScale(format!("{num}/{den} is not in (0, 1)")));
        }
        let g = num.gcd(&den);
        Ok(ScaleFactor {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_rational(&self) -> BigRational {
        arith::ratio(self.num as i64, self.den as i64)
    }

    /// `λ·k` when it is an integer.
    pub fn apply(&self, k: u64) -> Option<u64> {
        (k % self.den == 0).then(|| k / self.den * self.num)
    }
}

impl PartialOrd for ScaleFactor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaleFactor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ScaleFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidScale(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim().parse().map_err(|_| bad())?;
        ScaleFactor::new(p, q)
    }
}

impl TryFrom<String> for ScaleFactor {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ScaleFactor> for String {
    fn from(l: ScaleFactor) -> String {
        l.to_string()
    }
}

/// Every `λ < 1` for which `λ·h` is integral, in increasing order.
///
/// `λ = p/q` in lowest terms works exactly when `q` divides every nonzero
/// entry, i.e. when `q` divides their gcd.
pub fn admissible_lambdas(h: &Apportionment) -> Result<Vec<ScaleFactor>> {
    if h.house() == 0 {
        return Err(Error::EmptyHouse);
    }
    let g = h.seats().iter().fold(0u64, |g, &k| g.gcd(&k));
    let mut out = Vec::new();
    for den in (2..=g).filter(|d| g % d == 0) {
        for num in (1..den).filter(|p| p.gcd(&den) == 1) {
            out.push(ScaleFactor { num, den });
        }
    }
    out.sort();
    Ok(out)
}

pub fn scale_apportionment(h: &Apportionment, lambda: ScaleFactor) -> Result<Apportionment> {
    let seats: Option<Vec<u64>> = h.seats().iter().map(|&k| lambda.apply(k)).collect();
    match seats {
        Some(seats) => Ok(Apportionment::from_seats(seats)),
        None => Err(Error::NotAdmissible {
            lambda: lambda.to_string(),
            seats: h.seats().to_vec(),
        }),
    }
}

/// How exactly-tied candidates are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Larger population wins; equal populations fall back to input order.
    #[default]
    LargerPopulationFirst,
    /// Earlier position in the input wins.
    LowerIndexFirst,
    /// Any tie that changes the outcome is an error.
    FailOnTie,
}

impl TiePolicy {
    /// Rank key among tied sorted-state indices: lower wins.
    pub(crate) fn rank(&self, instance: &Instance, state: usize) -> usize {
        match self {
            TiePolicy::LowerIndexFirst => instance.order()[state],
            // the sorted view is already by population, then input order
            TiePolicy::LargerPopulationFirst | TiePolicy::FailOnTie => state,
        }
    }

    pub(crate) fn pick(&self, instance: &Instance, tied: &[usize]) -> usize {
        *tied
            .iter()
            .min_by_key(|&&s| self.rank(instance, s))
            .expect("at least one candidate")
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiePolicy::LargerPopulationFirst => "larger-population-first",
            TiePolicy::LowerIndexFirst => "lower-index-first",
            TiePolicy::FailOnTie => "fail-on-tie",
        })
    }
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "larger-population-first" | "population" => Ok(TiePolicy::LargerPopulationFirst),
            "lower-index-first" | "index" => Ok(TiePolicy::LowerIndexFirst),
            "fail-on-tie" | "fail" => Ok(TiePolicy::FailOnTie),
            other => Err(Error::InvalidConfig(format!("unknown tie policy {other:?}"))),
        }
    }
}

/// True when two states with the same population end up with different
/// seat counts. For methods that treat equal populations identically except
/// through rank, this is exactly when the tie-break changed the outcome.
pub(crate) fn equal_population_split(instance: &Instance, seats: &[u64]) -> Option<Vec<usize>> {
    let pops = instance.populations();
    (1..pops.len())
        .find(|&i| pops[i] == pops[i - 1] && seats[i] != seats[i - 1])
        .map(|i| vec![i - 1, i])
}
