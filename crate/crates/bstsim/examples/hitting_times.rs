//! First tree sizes at which the fringe returns to each even value 2k
//! after the height has outgrown the window floor(log2 2k) — the
//! empirical face of the fringe recurrence.
//!
//! The race bound printed alongside lower-bounds the per-opportunity
//! chance of such a return, so small hitting sizes for small k are no
//! accident.

use bstsim::analysis::{fringe_hitting_times, race_probability_bound};
use bstsim::RandomStream;

fn main() {
    let k_max = 6;
    let hitting = fringe_hitting_times(RandomStream::new(4), 10_000_000, k_max)
        .expect("within budget");
    print!("{}", bstsim::io::to_pretty_string(&hitting));
    for k in 1..=k_max {
        let bound = race_probability_bound(k).expect("k >= 1");
        let hit = match hitting[&(2 * k)] {
            Some(n) => format!("first hit at n = {n}"),
            None => "not hit in this run".into(),
        };
        eprintln!("fringe {:>2}: {hit:<24} catch-up race bound {bound:.3e}", 2 * k);
    }
}
