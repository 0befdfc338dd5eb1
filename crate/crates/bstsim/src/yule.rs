//! Continuous-time branching population on the integers.
//!
//! One particle sits at the origin at time zero. Each particle, after a
//! unit-rate exponential lifetime, is replaced by two children displaced
//! one step towards negative positions. Watched only at its branch times,
//! the population is exactly the leaf process of the growing tree: a
//! population of `n` particles branches next at a uniformly chosen member,
//! which is the uniform-leaf growth rule. Deepest and shallowest occupied
//! positions therefore mirror the tree's height and saturation level.
//!
//! The k-th birth time is reached by adding an `Exp(k-1)` gap to the
//! (k-1)-th, since `k-1` unit-rate clocks race for the next branch. The
//! recentred proxy `T_n - log n` stabilizes as `n` grows; its samples feed
//! the distributional checks in the validation layer.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::psi;
use crate::error::{Error, Result};
use crate::rng::{RandomStream, StreamRng};

/// Default cap on the particle count of a single population.
pub const DEFAULT_PARTICLE_CAP: u64 = 10_000_000;

/// Safe range for the weight exponent in the transform estimate.
pub const PSI_THETA_RANGE: (f64, f64) = (-2.0, 1.5);

/// Birth times `T_1 = 0 < T_2 < ...` of a population growing to `n`
/// particles. The gap `T_k - T_{k-1}` is `Exp(k-1)`, realized as a
/// unit-rate draw divided by `k - 1`.
pub fn birth_times(stream: RandomStream, n: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("the population starts with one particle"));
    }
    let mut rng = stream.rng();
    let mut times = Vec::with_capacity(n as usize);
    times.push(0.0);
    let mut t = 0.0f64;
    for k in 2..=n {
        t += rng.exp_1() / (k - 1) as f64;
        times.push(t);
    }
    Ok(times)
}

/// `m` independent samples of `T_{n_stop} - log n_stop`, the recentred
/// time at which the population reaches `n_stop` particles.
///
/// Sample `i` is drawn on sub-stream `i` of `stream`; samples are returned
/// in index order, so the output does not depend on thread scheduling.
pub fn zeta_samples(stream: RandomStream, n_stop: u64, m: u64) -> Result<Vec<f64>> {
    if n_stop < 2 {
        return Err(Error::invalid("zeta samples need n_stop >= 2"));
    }
    if m == 0 {
        return Err(Error::invalid("zeta samples need m >= 1"));
    }
    let log_n = (n_stop as f64).ln();
    Ok((0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.offset(i).rng();
            let mut t = 0.0f64;
            for k in 1..n_stop {
                t += rng.exp_1() / k as f64;
            }
            t - log_n
        })
        .collect())
}

/// A population of particles on the nonpositive integers.
#[derive(Clone, Debug)]
pub struct ParticleSet {
    /// position -> multiplicity
    positions: BTreeMap<i64, u64>,
    count: u64,
    time: f64,
}

impl ParticleSet {
    /// One particle at the origin at time zero.
    pub fn new() -> Self {
        let mut positions = BTreeMap::new();
        positions.insert(0, 1);
        ParticleSet {
            positions,
            count: 1,
            time: 0.0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn min_position(&self) -> i64 {
        *self.positions.keys().next().unwrap()
    }

    pub fn max_position(&self) -> i64 {
        *self.positions.keys().next_back().unwrap()
    }

    pub fn positions(&self) -> &BTreeMap<i64, u64> {
        &self.positions
    }

    /// Branch the `u`-th particle, `1 <= u <= count`, with particles
    /// ranked from the origin downwards. The particle is replaced by two
    /// children one step lower.
    pub fn branch_chosen(&mut self, u: u64) -> Result<i64> {
        if u == 0 || u > self.count {
            return Err(Error::contract(format!(
                "particle rank {u} outside 1..={}",
                self.count
            )));
        }
        let mut cum = 0u64;
        let mut chosen = None;
        for (&x, &mult) in self.positions.iter().rev() {
            cum += mult;
            if cum >= u {
                chosen = Some(x);
                break;
            }
        }
        let x = chosen.expect("multiplicities sum to count");
        let remaining = self.positions[&x] - 1;
        if remaining == 0 {
            self.positions.remove(&x);
        } else {
            self.positions.insert(x, remaining);
        }
        *self.positions.entry(x - 1).or_insert(0) += 2;
        self.count += 1;
        Ok(x)
    }

    /// Branch a uniformly chosen particle, drawing exactly one value from
    /// the stream. This is the same draw discipline as a profile growth
    /// step, which is what makes the two processes comparable step by step
    /// on a shared stream.
    pub fn branch_uniform(&mut self, rng: &mut StreamRng) -> i64 {
        let u = rng.uniform_index(self.count);
        self.branch_chosen(u).expect("rank is in range")
    }

    /// Sum of `exp(-theta * position)` over particles.
    pub fn weight_sum(&self, theta: f64) -> f64 {
        self.positions
            .iter()
            .map(|(&x, &mult)| mult as f64 * (-theta * x as f64).exp())
            .sum()
    }
}

impl Default for ParticleSet {
    fn default() -> Self {
        ParticleSet::new()
    }
}

/// Run the population until the next branch would pass `horizon`.
///
/// Each event consumes one exponential draw (the waiting time) followed by
/// one uniform draw (the branching particle). Populations larger than
/// `cap` abort with a resource error.
pub fn simulate_yule_capped(
    stream: RandomStream,
    horizon: f64,
    cap: u64,
) -> Result<ParticleSet> {
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(Error::invalid(format!(
            "horizon must be finite and nonnegative, got {horizon}"
        )));
    }
    let mut rng = stream.rng();
    let mut particles = ParticleSet::new();
    loop {
        let dt = rng.exp_1() / particles.count as f64;
        if particles.time + dt > horizon {
            break;
        }
        if particles.count >= cap {
            return Err(Error::resource(format!(
                "population exceeded the cap of {cap} particles before time {horizon}"
            )));
        }
        particles.time += dt;
        particles.branch_uniform(&mut rng);
    }
    particles.time = horizon;
    Ok(particles)
}

/// [`simulate_yule_capped`] with the default particle cap.
pub fn simulate_yule(stream: RandomStream, horizon: f64) -> Result<ParticleSet> {
    simulate_yule_capped(stream, horizon, DEFAULT_PARTICLE_CAP)
}

/// Monte Carlo estimate of the unit-time weight transform against its
/// closed form `exp(2 e^theta - 1)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PsiEstimate {
    pub theta: f64,
    pub mc_mean: f64,
    pub stderr: f64,
    pub closed_form: f64,
    pub z_score: f64,
}

/// Estimate `E[sum exp(-theta X_u)]` at unit time over `trials`
/// populations, one per sub-stream of `stream`.
pub fn psi_mc_estimate(stream: RandomStream, theta: f64, trials: u64) -> Result<PsiEstimate> {
    if !(PSI_THETA_RANGE.0..=PSI_THETA_RANGE.1).contains(&theta) {
        return Err(Error::invalid(format!(
            "theta {theta} outside the safe range [{}, {}]",
            PSI_THETA_RANGE.0, PSI_THETA_RANGE.1
        )));
    }
    if trials < 2 {
        return Err(Error::invalid("the transform estimate needs at least 2 trials"));
    }
    let weights: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let particles = simulate_yule(stream.offset(i), 1.0)
                .expect("unit-horizon population stays far below the cap");
            particles.weight_sum(theta)
        })
        .collect();
    // sums accumulate in index order, independent of worker threads
    let mean = weights.iter().sum::<f64>() / trials as f64;
    let var = weights.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>()
        / (trials - 1) as f64;
    let stderr = (var / trials as f64).sqrt();
    let closed_form = psi(theta);
    let z_score = if stderr > 0.0 {
        (mean - closed_form) / stderr
    } else {
        0.0
    };
    Ok(PsiEstimate {
        theta,
        mc_mean: mean,
        stderr,
        closed_form,
        z_score,
    })
}
