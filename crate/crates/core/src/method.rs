//! A single handle over every implemented method, addressable by a string id.
//!
//! | id | method |
//! |----|--------|
//! | `jefferson`, `webster`, `adams`, `hill`, `dean`, `stationary:p/q`, `table:…` | divisor |
//! | `hamilton`, `shiftquota:p/q` | shift-quota |
//! | `lar`, `sml`, `lqe`, `suq`, `nie`, `nis` | quota variants |
//! | `quotatone:<rule>` | quotatone over any divisor rule |

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::divisor::{self, SignpostRule};
use crate::error::{Error, Result};
use crate::model::{self, Apportionment, Instance, TiePolicy};
use crate::quota_methods;
use crate::quotatone;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Method {
    Divisor(SignpostRule),
    /// Shift-quota with the given shift; zero is Hamilton.
    ShiftQuota(BigRational),
    Lar,
    Sml,
    Lqe,
    Suq,
    Nie,
    Nis,
    Quotatone(SignpostRule),
}

impl Method {
    pub fn hamilton() -> Self {
        Method::ShiftQuota(BigRational::zero())
    }

    pub fn shift_quota(shift: BigRational) -> Result<Self> {
        model::check_shift(&shift)?;
        Ok(Method::ShiftQuota(shift))
    }

    /// Seat-by-seat methods, the ones that can emit a trace.
    pub fn is_sequential(&self) -> bool {
        matches!(self, Method::Divisor(_) | Method::Quotatone(_))
    }

    /// Methods that always award every state its lower or upper quota.
    pub fn satisfies_quota(&self) -> bool {
        match self {
            Method::ShiftQuota(s) => s.is_zero(),
            Method::Lar | Method::Sml | Method::Quotatone(_) => true,
            _ => false,
        }
    }

    pub fn apportion(&self, instance: &Instance, house: u64, policy: TiePolicy) -> Result<Apportionment> {
        self.apportion_traced(instance, house, policy, false)
    }

    /// As [`Method::apportion`]; with `trace`, sequential methods keep their
    /// per-seat log. Other methods ignore the flag.
    pub fn apportion_traced(
        &self,
        instance: &Instance,
        house: u64,
        policy: TiePolicy,
        trace: bool,
    ) -> Result<Apportionment> {
        match self {
            Method::Divisor(rule) => {
                divisor::apportion_divisor_with(instance, house, rule, policy, trace).map(|(h, _)| h)
            }
            Method::ShiftQuota(s) => quota_methods::shift_quota(instance, house, s, policy),
            Method::Lar => quota_methods::lar(instance, house, policy),
            Method::Sml => quota_methods::sml(instance, house, policy),
            Method::Lqe => quota_methods::lqe(instance, house, policy),
            Method::Suq => quota_methods::suq(instance, house, policy),
            Method::Nie => quota_methods::nie(instance, house, policy),
            Method::Nis => quota_methods::nis(instance, house, policy),
            Method::Quotatone(rule) => quotatone::quotatone_apportion(instance, house, rule, policy, trace),
        }
    }

    /// Allocations for every house size `0..=house_max`.
    pub fn series(&self, instance: &Instance, house_max: u64, policy: TiePolicy) -> Result<Vec<Apportionment>> {
        match self {
            Method::Divisor(rule) => Ok(divisor::divisor_series(instance, house_max, rule, policy)?
                .into_iter()
                .map(|(h, _)| h)
                .collect()),
            Method::Quotatone(rule) => quotatone::quotatone_series(instance, house_max, rule, policy),
            _ => (0..=house_max)
                .map(|house| self.apportion(instance, house, policy))
                .collect(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Divisor(rule) => write!(f, "{rule}"),
            Method::ShiftQuota(s) if s.is_zero() => f.write_str("hamilton"),
            Method::ShiftQuota(s) => write!(f, "shiftquota:{}", arith::format_fraction(s)),
            Method::Lar => f.write_str("lar"),
            Method::Sml => f.write_str("sml"),
            Method::Lqe => f.write_str("lqe"),
            Method::Suq => f.write_str("suq"),
            Method::Nie => f.write_str("nie"),
            Method::Nis => f.write_str("nis"),
            Method::Quotatone(rule) => write!(f, "quotatone:{rule}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "hamilton" => return Ok(Method::hamilton()),
            "lar" => return Ok(Method::Lar),
            "sml" => return Ok(Method::Sml),
            "lqe" => return Ok(Method::Lqe),
            "suq" => return Ok(Method::Suq),
            "nie" => return Ok(Method::Nie),
            "nis" => return Ok(Method::Nis),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("shiftquota:") {
            return Method::shift_quota(arith::parse_rational(p)?);
        }
        if let Some(rule) = s.strip_prefix("quotatone:") {
            return Ok(Method::Quotatone(rule.parse()?));
        }
        s.parse().map(Method::Divisor)
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in [
            "jefferson",
            "webster",
            "adams",
            "hill",
            "dean",
            "stationary:1/4",
            "table:default=1;2=5/2,8=17/2,14=29/2",
            "hamilton",
            "shiftquota:1/3",
            "lar",
            "sml",
            "lqe",
            "suq",
            "nie",
            "nis",
            "quotatone:webster",
            "quotatone:stationary:3/4",
            "quotatone:hill",
        ] {
            let m: Method = id.parse().unwrap();
            assert_eq!(m.to_string(), id);
        }
    }

    #[test]
    fn aliases_normalize() {
        assert_eq!("shiftquota:0".parse::<Method>().unwrap().to_string(), "hamilton");
        assert_eq!("stationary:1/2".parse::<Method>().unwrap().to_string(), "webster");
        assert_eq!("quotatone:stationary:1".parse::<Method>().unwrap().to_string(), "quotatone:jefferson");
    }

    #[test]
    fn bad_ids() {
        assert!(matches!("borda".parse::<Method>(), Err(Error::UnknownMethod(_))));
        assert!("shiftquota:1".parse::<Method>().is_err());
        assert!("quotatone:nis".parse::<Method>().is_err());
        assert!("stationary:3/2".parse::<Method>().is_err());
    }

    #[test]
    fn series_matches_pointwise() {
        let v = Instance::from_u64(&[727, 633, 140]).unwrap();
        for id in ["hamilton", "webster", "quotatone:hill", "nis"] {
            let m: Method = id.parse().unwrap();
            let series = m.series(&v, 25, TiePolicy::default()).unwrap();
            for (house, h) in series.iter().enumerate() {
                let direct = m.apportion(&v, house as u64, TiePolicy::default()).unwrap();
                assert_eq!(h.seats(), direct.seats(), "{id} H={house}");
                assert_eq!(h.tie_flag(), direct.tie_flag(), "{id} H={house}");
            }
        }
    }
}
