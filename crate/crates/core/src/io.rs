//! Instance files.
//!
//! ```json
//! {"populations": [4600, 2500, 1000], "house": 27, "shift": "1/2", "names": ["A", "B", "C"]}
//! ```
//!
//! `house`, `shift` and `names` are optional. Populations may be written as
//! strings when they do not fit in 64 bits.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::Result;
use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(with = "arith::serde_bigint_vec")]
    pub populations: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub house: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub shift: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(r) => s.serialize_str(&crate::arith::format_fraction(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| crate::arith::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.instance()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn instance(&self) -> Result<Instance> {
        let inst = Instance::new(self.populations.clone())?;
        match &self.names {
            Some(names) => inst.with_names(names.clone()),
            None => Ok(inst),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_full_files() {
        let f = InstanceFile::parse(r#"{"populations": [5, 3, 1]}"#).unwrap();
        assert_eq!(f.house, None);
        let f = InstanceFile::parse(
            r#"{"populations": [1, "99999999999999999999999"], "house": 4, "shift": "1/3", "names": ["a", "b"]}"#,
        )
        .unwrap();
        assert_eq!(f.shift, Some(arith::ratio(1, 3)));
        assert_eq!(f.instance().unwrap().order(), &[1, 0]);
        assert_eq!(InstanceFile::parse(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            r#"{"populations": []}"#,
            r#"{"populations": [3, 0]}"#,
            r#"{"populations": [3, -2]}"#,
            r#"{"populations": [3], "names": ["a", "b"]}"#,
            r#"{"populations": [3], "shift": "x"}"#,
            r#"{"populations": [3], "colour": 1}"#,
            "not json",
        ] {
            assert!(InstanceFile::parse(text).is_err(), "{text}");
        }
    }
}
