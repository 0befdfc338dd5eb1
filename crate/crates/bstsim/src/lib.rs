//! Extreme-depth statistics of randomly grown binary trees, with exact
//! oracles, solved growth constants and the equivalent continuous-time
//! branching walk.
//!
//! The tree model grows from a single leaf by repeatedly replacing a
//! uniformly chosen leaf with an internal node carrying two fresh
//! leaves. Three observables drive everything here: the height (depth
//! of the deepest leaf), the saturation level (deepest completely
//! filled level) and the fringe (number of leaves at the very bottom).
//! Per-level leaf counts are a sufficient state for all three, which is
//! what [`profile::LevelProfile`] simulates at millions of steps per
//! second; [`oracle`] cross-checks it against an explicit arena tree
//! and exact rational distributions; [`constants`] solves the
//! transcendental equations behind the recentred limits; [`yule`]
//! reruns the growth in continuous time, where depths become a
//! branching random walk.
//!
//! The `examples/` directory is the front door, one runnable program
//! per capability:
//!
//! - `constants` — solve the growth constants and inspect residuals.
//! - `exact_laws` — exact rational distributions for small trees.
//! - `trajectory` — one seeded growth run with recentred checkpoints.
//! - `oracle_compare` — both simulators against the exact law.
//! - `fringe_trace` — deepest-level leaf counts over a long run.
//! - `hitting_times` — first sizes at which the fringe revisits 2k.
//! - `ensemble` — many members, summarized per checkpoint.
//! - `zeta_limit` — continuous-time first-passage residuals and their law.
//! - `transform_check` — Monte Carlo mean of the exponential weight sum.
//! - `coupling` — the discrete tree inside the continuous-time walk.
//!
//! The `bstsim` binary wraps the same machinery for scripted use; see
//! [`cli`].

pub mod analysis;
pub mod cli;
pub mod constants;
pub mod error;
pub mod io;
mod levels;
pub mod oracle;
pub mod profile;
pub mod rng;
pub mod schedule;
pub mod stats;
pub mod validate;
pub mod yule;

pub use error::{Error, Result};
pub use profile::{LevelProfile, Observables, Trajectory, TrajectoryRecord};
pub use rng::RandomStream;
pub use schedule::CheckpointSchedule;
