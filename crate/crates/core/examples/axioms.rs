//! Quota, house monotonicity, homogeneity and weak proportionality for a few
//! methods on one instance.

use apportion::properties::{check_homogeneity, check_house_monotone, check_quota, check_weak_proportionality};
use apportion::{Instance, Method, TiePolicy};

fn main() -> apportion::Result<()> {
    let p = TiePolicy::default();
    let v = Instance::from_u64(&[5, 4, 3, 2, 1])?;
    for id in ["webster", "hamilton", "lqe", "nis", "quotatone:hill"] {
        let m: Method = id.parse()?;
        let quota = (1..=40).find(|&h| check_quota(&m, &v, h, p).ok().flatten().is_some());
        let monotone = check_house_monotone(&m, &v, 40, p)?;
        let homogeneous = check_homogeneity(&m, &v, 11, &[2, 3, 7], p)?;
        let weak = check_weak_proportionality(&m, &[9, 6, 6, 3], p)?;
        let show = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        println!(
            "{id:<15} quota breach at H={:<3} monotone breach at H={:<3} homogeneity breach at c={:<3} weak proportionality breach {}",
            show(quota.map(|h| h.to_string())),
            show(monotone.map(|b| b.house.to_string())),
            show(homogeneous.map(|c| c.to_string())),
            show(weak.map(|w| format!("{w:?}")))
        );
    }
    Ok(())
}
