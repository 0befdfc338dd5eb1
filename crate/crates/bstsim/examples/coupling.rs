//! The discrete tree inside the continuous-time walk: feeding the same
//! random stream to the level-profile chain and to the particle system's
//! jump chain produces identical states at every population size, so
//! height and saturation are literally the extreme displacements.

use bstsim::yule::ParticleSet;
use bstsim::{LevelProfile, RandomStream};

fn main() {
    let seed = 13;
    let steps = 100_000;

    let mut profile = LevelProfile::new();
    let mut particles = ParticleSet::new();
    let mut rng_tree = RandomStream::new(seed).rng();
    let mut rng_walk = RandomStream::new(seed).rng();

    for _ in 0..steps {
        profile.step(&mut rng_tree);
        particles.branch_uniform(&mut rng_walk);
    }

    let obs = profile.observables();
    println!("after {steps} growth events on seed {seed}:");
    println!(
        "  tree:     height {:>3}  saturation {:>2}  ({} leaves)",
        obs.height,
        obs.saturation,
        profile.n()
    );
    println!(
        "  walk:     -min   {:>3}  -max       {:>2}  ({} particles)",
        -particles.min_position(),
        -particles.max_position(),
        particles.count()
    );
    assert_eq!(i64::from(obs.height), -particles.min_position());
    assert_eq!(i64::from(obs.saturation), -particles.max_position());
    assert_eq!(profile.n(), particles.count());
    println!("  exact match, as the shared stream guarantees");
}
