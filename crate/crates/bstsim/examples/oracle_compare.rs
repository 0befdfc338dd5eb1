//! Cross-check the two simulators against the exact law and against
//! each other with chi-square tests: the level-profile chain and the
//! explicit arena tree must agree on the joint depth statistics.

use bstsim::oracle::{compare_simulators, StatComparison};
use bstsim::RandomStream;

fn show(name: &str, c: &StatComparison) {
    println!(
        "  {name:<12} profile-vs-exact p={:.4}  explicit-vs-exact p={:.4}  profile-vs-explicit p={:.4}",
        c.profile_vs_exact.p_value, c.explicit_vs_exact.p_value, c.profile_vs_explicit.p_value
    );
}

fn main() {
    let trials = 200_000;
    for (block, n) in [4u64, 5, 8].into_iter().enumerate() {
        let stream = RandomStream::new(2).offset(block as u64 * (1 << 24));
        let report = compare_simulators(n, trials, stream).expect("exact range");
        println!("n = {n}, {trials} trials per simulator:");
        show("height", &report.height);
        show("saturation", &report.saturation);
        show("fringe", &report.fringe);
    }
    println!("small p-values (below 0.001) would indicate a simulator bug");
}
