//! Leaf counts of the three deepest levels along one long run — the
//! bottom of the tree stays remarkably thin while levels above it fill
//! up — plus the per-step frontier window tally.

use bstsim::analysis::fringe_trace_checked;
use bstsim::io::write_fringe_csv;
use bstsim::{CheckpointSchedule, RandomStream};

fn main() {
    let n_max = 1_000_000;
    let full = CheckpointSchedule::geometric(n_max, 2.0).expect("valid schedule");
    // the trace starts at two leaves; the single-leaf root state has no
    // fringe worth plotting
    let targets: Vec<u64> = full.targets().iter().copied().filter(|&t| t >= 2).collect();
    let schedule = CheckpointSchedule::explicit(targets).expect("nonempty");

    let (rows, tally) =
        fringe_trace_checked(RandomStream::new(11), &schedule, 3, true).expect("within budget");
    write_fringe_csv(std::io::stdout().lock(), &rows).expect("write");

    let tally = tally.expect("tally requested");
    eprintln!(
        "frontier window check: {} failures over {} states ({} passes, {} not applicable)",
        tally.failures, tally.checked, tally.passes, tally.not_applicable
    );
}
