//! Replays every built-in worked example and prints one row per check.

use apportion::fixtures::{fixtures, reproduce};

fn main() -> apportion::Result<()> {
    let mut failed = 0;
    for fx in fixtures()? {
        println!("{}: {}", fx.id, fx.title);
        for row in reproduce(&fx)? {
            failed += usize::from(!row.pass);
            println!(
                "  {:<22} {:<24} {:?} {}",
                row.method,
                row.check,
                row.actual,
                if row.pass { "ok" } else { "FAIL" }
            );
        }
    }
    println!("{failed} failing rows");
    Ok(())
}
