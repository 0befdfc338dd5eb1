//! Exact rational distributions of height, saturation and fringe for
//! small trees, straight from the level-profile dynamic program.

use bstsim::io::distribution_table_json;
use bstsim::oracle::{exact_distribution, Statistic};

fn main() {
    for n in [4u64, 5] {
        for statistic in [Statistic::Height, Statistic::Saturation, Statistic::Fringe] {
            let table = exact_distribution(n, statistic).expect("within the exact range");
            print!("{}", distribution_table_json(&table));
        }
    }

    // the joint law shows the perfect tree (height 2, saturation 2,
    // fringe 4) against the three path-like shapes
    let joint = exact_distribution(4, Statistic::Joint).expect("within the exact range");
    print!("{}", distribution_table_json(&joint));
}
