//! Every built-in divisor rule on one instance, plus a custom signpost table
//! and the certificate that proves an allocation is a divisor solution.

use apportion::divisor::{divisor_series, verify_certificate};
use apportion::{Instance, Method, TiePolicy};

fn main() -> apportion::Result<()> {
    let v = Instance::from_u64(&[4600, 2500, 1000])?;
    let policy = TiePolicy::default();

    for id in ["adams", "dean", "hill", "webster", "stationary:1/3", "jefferson"] {
        let method: Method = id.parse()?;
        let h = method.apportion(&v, 27, policy)?;
        println!("{id:<16} H=27 {:?}", h.seats());
    }

    // f(k) = k + 1 except at three thresholds, where it is k + 1/2
    let table: Method = "table:default=1;2=5/2,8=17/2,14=29/2".parse()?;
    for house in [18, 27] {
        println!("{table} H={house} {:?}", table.apportion(&v, house, policy)?.seats());
    }

    let Method::Divisor(rule) = table else { unreachable!() };
    let (h, cert) = divisor_series(&v, 27, &rule, policy)?.pop().unwrap();
    println!("certificate: {}", serde_json::to_string(&cert).unwrap());
    verify_certificate(&v, &h, &rule)?;
    println!("certificate re-verified");
    Ok(())
}
