//! Seat-by-seat trace of a quotatone method: the upper-quota set, the
//! lookahead α̃ and the eligible states before each award.

use apportion::{Instance, Method, TiePolicy};

fn main() -> apportion::Result<()> {
    let v = Instance::from_u64(&[48569, 41012, 8200, 1115, 1095])?;
    let method: Method = "quotatone:webster".parse()?;
    let h = method.apportion_traced(&v, 40, TiePolicy::default(), true)?;
    for award in h.trace().unwrap() {
        let sets = award.eligibility.as_ref().unwrap();
        println!(
            "seat {:>2} -> state {}  U={:?} α̃={:?} (bound {:?}) L={:?} eligible={:?}",
            award.house, award.state, sets.upper_ok, sets.alpha_tilde, sets.alpha_bound, sets.lower_ok, sets.eligible
        );
    }
    println!("final {:?}", h.seats());
    Ok(())
}
