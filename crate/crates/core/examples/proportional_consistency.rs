//! Proportional-consistency audits: a method that passes and two that fail
//! at the same instance.

use apportion::{check_pc, Instance, Method, TiePolicy};

fn audit(id: &str, pops: &[u64], house: u64) -> apportion::Result<()> {
    let method: Method = id.parse()?;
    let report = check_pc(&method, &Instance::from_u64(pops)?, house, TiePolicy::default())?;
    println!("{id} H={house} base {:?}", report.base.seats());
    for v in &report.verdicts {
        let mark = if v.pass { "ok" } else { "FAIL" };
        println!("  λ={:<5} expected {:?} got {:?} {mark}", v.lambda.to_string(), v.expected, v.actual.seats());
    }
    println!("  violation: {}", report.is_violation());
    Ok(())
}

fn main() -> apportion::Result<()> {
    let p13 = [57535, 56825, 4027, 3318, 3295];
    audit("webster", &p13, 175)?;
    audit("quotatone:webster", &p13, 175)?;
    audit("nis", &[1000, 965, 965, 965, 965, 965, 625, 550], 70)?;
    Ok(())
}
