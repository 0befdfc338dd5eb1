//! Leaf-profile simulator.
//!
//! A tree grown by repeatedly replacing a uniformly chosen leaf with an
//! internal node carrying two leaves is fully described, as far as extreme
//! depths are concerned, by the vector of leaf counts per depth. One growth
//! step moves a unit of mass from a depth chosen proportionally to its count
//! and deposits two units one level deeper. The state after `k` steps has
//! `k + 1` leaves and lives on O(log n) occupied levels, so trajectories of
//! 10^9 steps fit in a few hundred bytes of state.

use crate::error::{Error, Result};
use crate::levels::LevelIndex;
use crate::rng::{RandomStream, StreamRng};
use crate::schedule::CheckpointSchedule;

/// Hard cap on the number of growth steps a single trajectory may take.
pub const MAX_TRAJECTORY_STEPS: u64 = 1 << 40;

const INITIAL_LEVEL_CAPACITY: usize = 64;

/// Leaf counts per depth, with an index supporting O(log depth) sampling.
#[derive(Clone, Debug)]
pub struct LevelProfile {
    counts: Vec<u64>,
    index: LevelIndex,
    n: u64,
    min_level: u32,
    max_level: u32,
}

/// The three extreme-depth statistics of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observables {
    /// Greatest occupied depth.
    pub height: u32,
    /// Greatest depth down to which every slot is filled; equals the
    /// smallest occupied leaf depth.
    pub saturation: u32,
    /// Number of leaves at the greatest occupied depth.
    pub fringe: u64,
}

/// What one growth step did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub chosen_level: u32,
    pub height: u32,
    pub saturation: u32,
    pub fringe: u64,
}

impl LevelProfile {
    /// The one-leaf profile: a single leaf at depth 0.
    pub fn new() -> Self {
        let mut counts = vec![0u64; INITIAL_LEVEL_CAPACITY];
        counts[0] = 1;
        let index = LevelIndex::from_counts(&counts, INITIAL_LEVEL_CAPACITY);
        LevelProfile {
            counts,
            index,
            n: 1,
            min_level: 0,
            max_level: 0,
        }
    }

    /// Build a profile from explicit per-depth leaf counts.
    ///
    /// The counts must describe a tree reachable by leaf growth, i.e. a full
    /// binary tree: nonzero total mass, `counts[j] <= 2^j`, and depth
    /// weights `sum_j counts[j] * 2^-j` equal to exactly 1. Depths are
    /// limited to 127 here so the weight check stays exact.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let trimmed_len = counts.iter().rposition(|&c| c != 0).map(|i| i + 1);
        let Some(len) = trimmed_len else {
            return Err(Error::invalid("profile must contain at least one leaf"));
        };
        if len > 128 {
            return Err(Error::invalid("profile depth exceeds 127"));
        }
        let max_level = (len - 1) as u32;
        let mut kraft: u128 = 0;
        for (j, &c) in counts[..len].iter().enumerate() {
            if j < 64 && c > 1u64 << j {
                return Err(Error::invalid(format!(
                    "counts[{j}] = {c} exceeds the 2^{j} slots at that depth"
                )));
            }
            kraft = (c as u128)
                .checked_mul(1u128 << (len - 1 - j))
                .and_then(|w| kraft.checked_add(w))
                .ok_or_else(|| {
                    Error::invalid("counts do not form a full binary tree profile")
                })?;
        }
        if kraft != 1u128 << (len - 1) {
            return Err(Error::invalid(
                "counts do not form a full binary tree profile",
            ));
        }
        let n: u64 = counts[..len].iter().sum();
        let min_level = counts[..len].iter().position(|&c| c != 0).unwrap() as u32;
        let capacity = len.next_power_of_two().max(INITIAL_LEVEL_CAPACITY);
        let mut stored = counts[..len].to_vec();
        stored.resize(capacity, 0);
        let index = LevelIndex::from_counts(&stored, capacity);
        Ok(LevelProfile {
            counts: stored,
            index,
            n,
            min_level,
            max_level,
        })
    }

    /// Number of leaves.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Leaf counts for depths `0..=height`.
    pub fn counts(&self) -> &[u64] {
        &self.counts[..=self.max_level as usize]
    }

    pub fn observables(&self) -> Observables {
        Observables {
            height: self.max_level,
            saturation: self.min_level,
            fringe: self.counts[self.max_level as usize],
        }
    }

    /// Depth of the `u`-th leaf when leaves are ranked shallow to deep,
    /// `1 <= u <= n`. Does not modify the profile.
    pub fn sample_leaf_level(&self, u: u64) -> Result<u32> {
        if u == 0 || u > self.n {
            return Err(Error::contract(format!(
                "leaf rank {u} outside 1..={}",
                self.n
            )));
        }
        Ok(self.index.find_by_cumulative(u) as u32)
    }

    /// Perform one growth step, choosing the expanded depth with
    /// probability proportional to its leaf count.
    #[inline]
    pub fn step(&mut self, rng: &mut StreamRng) -> StepOutcome {
        let u = rng.uniform_index(self.n);
        let level = self.index.find_by_cumulative(u) as u32;
        self.expand(level)
    }

    /// Apply the growth move at a specific occupied depth.
    pub fn expand(&mut self, level: u32) -> StepOutcome {
        let j = level as usize;
        debug_assert!(j < self.counts.len() && self.counts[j] > 0);
        if j + 2 > self.counts.len() {
            self.grow(j + 2);
        }
        self.counts[j] -= 1;
        self.counts[j + 1] += 2;
        self.index.sub(j, 1);
        self.index.add(j + 1, 2);
        self.n += 1;
        if level == self.max_level {
            self.max_level += 1;
        }
        if level == self.min_level && self.counts[j] == 0 {
            self.min_level += 1;
        }
        StepOutcome {
            chosen_level: level,
            height: self.max_level,
            saturation: self.min_level,
            fringe: self.counts[self.max_level as usize],
        }
    }

    fn grow(&mut self, needed: usize) {
        let capacity = needed.next_power_of_two().max(2 * self.counts.len());
        self.counts.resize(capacity, 0);
        self.index = LevelIndex::from_counts(&self.counts, capacity);
    }

    /// Check internal consistency: mass accounting, level bounds and the
    /// sampling index all agreeing with the raw counts.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::contract(msg));
        let sum: u64 = self.counts.iter().sum();
        if sum != self.n {
            return fail(format!("count sum {sum} != n {}", self.n));
        }
        if self.counts[self.max_level as usize] == 0
            || self.counts[self.min_level as usize] == 0
            || self.counts[..self.min_level as usize].iter().any(|&c| c != 0)
            || self.counts[self.max_level as usize + 1..].iter().any(|&c| c != 0)
        {
            return fail("occupied range disagrees with min/max levels".into());
        }
        for (j, &c) in self.counts.iter().enumerate() {
            if j < 64 && c > 1u64 << j {
                return fail(format!("counts[{j}] = {c} exceeds 2^{j}"));
            }
        }
        for j in 0..self.counts.len() {
            let scan: u64 = self.counts[..=j].iter().sum();
            if self.index.prefix_sum(j) != scan {
                return fail(format!("index prefix at {j} disagrees with counts"));
            }
        }
        Ok(())
    }
}

impl Default for LevelProfile {
    fn default() -> Self {
        LevelProfile::new()
    }
}

/// One checkpoint of a growth trajectory.
///
/// The recentred columns are filled in by the analysis layer; the raw
/// simulator leaves them empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub n: u64,
    pub height: u32,
    pub saturation: u32,
    pub fringe: u64,
    pub r_height: Option<f64>,
    pub r_saturation: Option<f64>,
}

/// Lazily grows a tree, yielding one record per scheduled checkpoint.
#[derive(Debug)]
pub struct Trajectory {
    profile: LevelProfile,
    rng: StreamRng,
    targets: Vec<u64>,
    next_target: usize,
}

impl Trajectory {
    pub fn new(stream: RandomStream, schedule: &CheckpointSchedule) -> Result<Self> {
        if schedule.n_max() > MAX_TRAJECTORY_STEPS {
            return Err(Error::resource(format!(
                "run length {} exceeds the step budget {}",
                schedule.n_max(),
                MAX_TRAJECTORY_STEPS
            )));
        }
        Ok(Trajectory {
            profile: LevelProfile::new(),
            rng: stream.rng(),
            targets: schedule.targets().to_vec(),
            next_target: 0,
        })
    }

    /// The profile in its current state of growth.
    pub fn profile(&self) -> &LevelProfile {
        &self.profile
    }
}

impl Iterator for Trajectory {
    type Item = TrajectoryRecord;

    fn next(&mut self) -> Option<TrajectoryRecord> {
        let target = *self.targets.get(self.next_target)?;
        self.next_target += 1;
        while self.profile.n < target {
            self.profile.step(&mut self.rng);
        }
        let obs = self.profile.observables();
        Some(TrajectoryRecord {
            n: self.profile.n,
            height: obs.height,
            saturation: obs.saturation,
            fringe: obs.fringe,
            r_height: None,
            r_saturation: None,
        })
    }
}

/// Grow a tree to the schedule's final size, collecting checkpoint records.
pub fn run_trajectory(
    stream: RandomStream,
    schedule: &CheckpointSchedule,
) -> Result<Vec<TrajectoryRecord>> {
    Ok(Trajectory::new(stream, schedule)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_leaf_profile() {
        let p = LevelProfile::new();
        assert_eq!(p.n(), 1);
        assert_eq!(p.counts(), &[1]);
        let obs = p.observables();
        assert_eq!((obs.height, obs.saturation, obs.fringe), (0, 0, 1));
    }

    #[test]
    fn first_two_steps_are_forced() {
        let mut p = LevelProfile::new();
        let mut rng = RandomStream::new(0).rng();
        let out = p.step(&mut rng);
        assert_eq!(out.chosen_level, 0);
        assert_eq!((out.height, out.saturation, out.fringe), (1, 1, 2));
        assert_eq!(p.counts(), &[0, 2]);
        // both leaves sit at depth 1, so the next choice is forced too
        let out = p.step(&mut rng);
        assert_eq!(out.chosen_level, 1);
        assert_eq!(p.counts(), &[0, 1, 2]);
        let obs = p.observables();
        assert_eq!((obs.height, obs.saturation, obs.fringe), (2, 1, 2));
    }

    #[test]
    fn observables_of_fixed_profiles() {
        let p = LevelProfile::from_counts(&[0, 1, 2]).unwrap();
        let obs = p.observables();
        assert_eq!((obs.height, obs.saturation, obs.fringe), (2, 1, 2));

        let p = LevelProfile::from_counts(&[0, 0, 4]).unwrap();
        let obs = p.observables();
        assert_eq!((obs.height, obs.saturation, obs.fringe), (2, 2, 4));
    }

    #[test]
    fn leaf_ranks_map_to_depths_in_order() {
        let p = LevelProfile::from_counts(&[0, 1, 1, 2]).unwrap();
        assert_eq!(p.sample_leaf_level(1).unwrap(), 1);
        assert_eq!(p.sample_leaf_level(2).unwrap(), 2);
        assert_eq!(p.sample_leaf_level(3).unwrap(), 3);
        assert_eq!(p.sample_leaf_level(4).unwrap(), 3);
        assert!(p.sample_leaf_level(0).is_err());
        assert!(p.sample_leaf_level(5).is_err());
    }

    #[test]
    fn malformed_count_vectors_rejected() {
        assert!(LevelProfile::from_counts(&[]).is_err());
        assert!(LevelProfile::from_counts(&[0, 0]).is_err());
        // a lone leaf at depth 1 leaves its sibling slot unaccounted for
        assert!(LevelProfile::from_counts(&[0, 1]).is_err());
        // three leaves cannot share depth 1
        assert!(LevelProfile::from_counts(&[0, 3]).is_err());
        // under-filled: mass does not close the tree
        assert!(LevelProfile::from_counts(&[0, 1, 1]).is_err());
        assert!(LevelProfile::from_counts(&[2]).is_err());
    }

    #[test]
    fn height_jump_chance_matches_fringe_share() {
        // from {0,1,1,2} the height grows iff one of the 2 deepest of 4
        // leaves is chosen
        let trials = 20_000;
        let mut jumps = 0;
        for t in 0..trials {
            let mut p = LevelProfile::from_counts(&[0, 1, 1, 2]).unwrap();
            let mut rng = RandomStream::new(77).with_stream(t).rng();
            let out = p.step(&mut rng);
            if out.height == 4 {
                jumps += 1;
            }
        }
        let freq = jumps as f64 / trials as f64;
        // 5 sigma band around 1/2
        assert!((freq - 0.5).abs() < 0.018, "freq {freq}");
    }

    #[test]
    fn height_law_at_four_leaves() {
        // H over T_4 takes value 2 with probability 1/3, else 3
        let trials = 200_000u64;
        let mut twos = 0u64;
        for t in 0..trials {
            let mut p = LevelProfile::new();
            let mut rng = RandomStream::new(5).with_stream(t).rng();
            for _ in 0..3 {
                p.step(&mut rng);
            }
            match p.observables().height {
                2 => twos += 1,
                3 => {}
                other => panic!("impossible height {other} at four leaves"),
            }
        }
        let freq = twos as f64 / trials as f64;
        // s.e. = sqrt(2/9 / trials) ~ 0.00105; allow 5 s.e.
        assert!((freq - 1.0 / 3.0).abs() < 0.0053, "freq {freq}");
    }

    #[test]
    fn trivial_trajectory() {
        let schedule = CheckpointSchedule::geometric(1, 2.0).unwrap();
        let records = run_trajectory(RandomStream::new(123), &schedule).unwrap();
        assert_eq!(records.len(), 1);
        let r = records[0];
        assert_eq!((r.n, r.height, r.saturation, r.fringe), (1, 0, 0, 1));
        assert_eq!(r.r_height, None);
        assert_eq!(r.r_saturation, None);
    }

    #[test]
    fn records_land_exactly_on_targets() {
        let schedule = CheckpointSchedule::geometric(1000, 1.3).unwrap();
        let records = run_trajectory(RandomStream::new(8), &schedule).unwrap();
        let sizes: Vec<u64> = records.iter().map(|r| r.n).collect();
        assert_eq!(&sizes[..], schedule.targets());
    }

    #[test]
    fn identical_streams_identical_trajectories() {
        let schedule = CheckpointSchedule::geometric(20_000, 1.5).unwrap();
        let a = run_trajectory(RandomStream::new(31).with_stream(4), &schedule).unwrap();
        let b = run_trajectory(RandomStream::new(31).with_stream(4), &schedule).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_run_is_refused() {
        let schedule = CheckpointSchedule::explicit(vec![MAX_TRAJECTORY_STEPS + 1]).unwrap();
        match Trajectory::new(RandomStream::new(0), &schedule) {
            Err(Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn growth_preserves_invariants(seed in 0u64..1000, steps in 1usize..300) {
            let mut p = LevelProfile::new();
            let mut rng = RandomStream::new(seed).rng();
            let mut prev = p.observables();
            for k in 0..steps {
                let out = p.step(&mut rng);
                prop_assert_eq!(p.n(), k as u64 + 2);
                let obs = p.observables();
                prop_assert_eq!(obs.height, out.height);
                prop_assert_eq!(obs.saturation, out.saturation);
                prop_assert_eq!(obs.fringe, out.fringe);
                // extremes move up by at most one level per step
                prop_assert!(obs.height - prev.height <= 1);
                prop_assert!(obs.saturation - prev.saturation <= 1);
                prop_assert!(obs.saturation <= obs.height);
                // past the root, the deepest level always holds an even
                // number of at least 2 leaves
                prop_assert!(obs.fringe >= 2 && obs.fringe % 2 == 0);
                prev = obs;
            }
            p.validate().unwrap();
        }

        #[test]
        fn rank_queries_cover_all_leaves(seed in 0u64..200, steps in 0usize..60) {
            let mut p = LevelProfile::new();
            let mut rng = RandomStream::new(seed).rng();
            for _ in 0..steps {
                p.step(&mut rng);
            }
            let mut per_level = vec![0u64; p.counts().len()];
            for u in 1..=p.n() {
                per_level[p.sample_leaf_level(u).unwrap() as usize] += 1;
            }
            prop_assert_eq!(&per_level[..], p.counts());
        }
    }
}
