//! Monte Carlo check of the exponential weight sum of the unit-time
//! branching walk: averaging sum_i exp(theta * X_i) over simulated
//! populations must reproduce exp(2 e^theta - 1).

use bstsim::constants::constants_set;
use bstsim::yule::psi_mc_estimate;
use bstsim::RandomStream;

fn main() {
    let set = constants_set();
    let trials = 50_000;
    // theta = a and theta = -alpha are where the criticality conditions
    // pin the height and saturation constants
    for (i, theta) in [0.0, 0.5, set.a, -set.alpha].into_iter().enumerate() {
        let stream = RandomStream::new(6).offset(i as u64 * (1 << 24));
        let est = psi_mc_estimate(stream, theta, trials).expect("estimate");
        println!(
            "theta {:+.4}: mc {:.4} +- {:.4}, closed form {:.4}, z = {:+.2}",
            est.theta, est.mc_mean, est.stderr, est.closed_form, est.z_score
        );
    }
}
