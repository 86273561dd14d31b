//! The quota-based methods side by side, with their quotas and the states
//! that end up at the upper quota.

use apportion::model::standard_quotas;
use apportion::arith::format_rational;
use apportion::properties::quota_breach_of;
use apportion::{Instance, Method, TiePolicy};

fn main() -> apportion::Result<()> {
    let v = Instance::from_u64(&[14375, 9350, 5425, 5425, 5425])?;
    let house = 32;
    let q = standard_quotas(&v, house);
    let shown: Vec<String> = q.values.iter().map(format_rational).collect();
    println!("quotas at H={house}: {}", shown.join(", "));

    for id in ["hamilton", "shiftquota:1/3", "lar", "sml", "lqe", "suq", "nie", "nis"] {
        let method: Method = id.parse()?;
        let h = method.apportion(&v, house, TiePolicy::default())?;
        let quota = match quota_breach_of(&v, &h) {
            None => "within quota".to_string(),
            Some(b) => format!("outside quota at state {}", b.state),
        };
        println!("{id:<15} {:?} tie={} {quota}", h.seats(), h.tie_flag());
    }
    Ok(())
}
