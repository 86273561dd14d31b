//! Named reference cases with stored expected allocations, and a runner that
//! compares live results against them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::method::Method;
use crate::model::{Instance, ScaleFactor, TiePolicy};
use crate::properties::check_pc;

const DATA: &str = include_str!("../data/fixtures.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub id: String,
    pub title: String,
    pub populations: Vec<u64>,
    pub methods: Vec<String>,
    pub cases: Vec<Case>,
    #[serde(default)]
    pub pc_failures: Vec<PcFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub house: u64,
    pub expected: Vec<u64>,
}

/// A scale factor at which `F(v, λH) ≠ λ·F(v, H)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcFailure {
    pub house: u64,
    pub lambda: ScaleFactor,
    /// `λ·F(v, H)`
    pub expected: Vec<u64>,
    /// `F(v, λH)`
    pub actual: Vec<u64>,
}

#[derive(Deserialize)]
struct Table {
    fixture: Vec<Fixture>,
}

pub fn fixtures() -> Result<Vec<Fixture>> {
    Ok(toml::from_str::<Table>(DATA)?.fixture)
}

pub fn fixture(id: &str) -> Result<Fixture> {
    fixtures()?
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFixture(id.to_string()))
}

pub fn fixture_ids() -> Result<Vec<String>> {
    Ok(fixtures()?.into_iter().map(|f| f.id).collect())
}

impl Fixture {
    pub fn instance(&self) -> Result<Instance> {
        Instance::from_u64(&self.populations)
    }
}

/// One comparison of a live result with a stored one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub fixture: String,
    pub method: String,
    /// `H=27`, or `pc H=27 λ=2/3`.
    pub check: String,
    pub expected: Vec<u64>,
    pub actual: Vec<u64>,
    pub pass: bool,
}

/// Runs every method of the fixture at every listed house, plus the listed
/// proportional-consistency failures. Ties count as mismatches.
pub fn reproduce(fx: &Fixture) -> Result<Vec<Row>> {
    let instance = fx.instance()?;
    let policy = TiePolicy::FailOnTie;
    let top = fx.cases.iter().map(|c| c.house).max().unwrap_or(0);
    let mut rows = Vec::new();
    for id in &fx.methods {
        let method: Method = id.parse()?;
        let series = method.series(&instance, top, TiePolicy::default())?;
        let by_house: BTreeMap<u64, _> = series.iter().map(|h| (h.house(), h)).collect();
        for case in &fx.cases {
            let h = by_house[&case.house];
            rows.push(Row {
                fixture: fx.id.clone(),
                method: id.clone(),
                check: format!("H={}", case.house),
                expected: case.expected.clone(),
                actual: h.seats().to_vec(),
                pass: h.seats() == case.expected.as_slice() && !h.tie_flag(),
            });
        }
        for pc in &fx.pc_failures {
            let report = check_pc(&method, &instance, pc.house, policy)?;
            let verdict = report.verdicts.iter().find(|v| v.lambda == pc.lambda);
            let (actual, pass) = match verdict {
                Some(v) => (
                    v.actual.seats().to_vec(),
                    !v.pass && v.expected == pc.expected && v.actual.seats() == pc.actual.as_slice(),
                ),
                None => (Vec::new(), false),
            };
            rows.push(Row {
                fixture: fx.id.clone(),
                method: id.clone(),
                check: format!("pc H={} λ={}", pc.house, pc.lambda),
                expected: pc.actual.clone(),
                actual,
                pass: pass && !report.tie_involved,
            });
        }
    }
    Ok(rows)
}
