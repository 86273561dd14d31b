//! Random search for proportional-consistency violations. Pass a seed to
//! change the stream: `cargo run --example counterexample_search -- 11`.

use apportion::{search_pc_violations, Method, SearchConfig, SearchMode, TiePolicy};

fn main() -> apportion::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let config = SearchConfig {
        method: Method::Nis,
        states: 5..=5,
        max_pop: 20_000,
        houses: 1..=60,
        mode: SearchMode::Random { seed, trials: 200_000 },
        stop_after: Some(1),
        policy: TiePolicy::default(),
    };
    let out = search_pc_violations(&config)?;
    println!("checked {} candidates ({} vacuous)", out.checked, out.vacuous);
    match out.violations.first() {
        None => println!("no violation"),
        Some(r) => {
            let f = r.failures().next().unwrap();
            let pops: Vec<String> = r.populations.iter().map(|p| p.to_string()).collect();
            println!(
                "v=({}) H={} λ={}: expected {:?}, got {:?}",
                pops.join(", "),
                r.house,
                f.lambda,
                f.expected,
                f.actual.seats()
            );
        }
    }

    let exhaustive = SearchConfig {
        states: 1..=3,
        max_pop: 25,
        houses: 1..=30,
        mode: SearchMode::Exhaustive,
        stop_after: None,
        ..config
    };
    let out = search_pc_violations(&exhaustive)?;
    println!("exhaustive n≤3, v≤25, H≤30: {} pairs, {} violations", out.checked, out.violations.len());
    Ok(())
}
