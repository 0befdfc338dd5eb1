//! One seeded growth run, checkpointed geometrically, with the
//! recentred height and saturation columns filled in.
//!
//! Usage: trajectory [seed] [n_max]

use bstsim::analysis::Recentrer;
use bstsim::io::TrajectoryCsvWriter;
use bstsim::{CheckpointSchedule, RandomStream, Trajectory};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let n_max: u64 = args.next().map_or(1_000_000, |s| s.parse().expect("n_max"));

    let schedule = CheckpointSchedule::geometric(n_max, 1.5).expect("valid schedule");
    let recentrer = Recentrer::new();
    let mut writer = TrajectoryCsvWriter::new(std::io::stdout().lock()).expect("stdout");
    let trajectory = Trajectory::new(RandomStream::new(seed), &schedule).expect("within budget");
    for mut record in trajectory {
        recentrer.fill(&mut record);
        writer.record(&record).expect("write row");
    }
}
