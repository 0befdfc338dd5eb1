//! Geometric checkpoint grids.
//!
//! Long runs are observed only at a sparse set of sizes growing
//! geometrically, so a full trajectory to 10^9 leaves yields a few hundred
//! records instead of 10^9.

use crate::error::{Error, Result};

/// Sorted, strictly increasing list of sizes at which to record state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointSchedule {
    targets: Vec<u64>,
}

impl CheckpointSchedule {
    /// The grid `{1} ∪ {⌈ratio^k⌉ : k ≥ 1} ∪ {n_max}` clipped to `[1, n_max]`,
    /// deduplicated. `ratio` must exceed 1.
    pub fn geometric(n_max: u64, ratio: f64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(Error::invalid(format!(
                "checkpoint ratio must be a finite number > 1, got {ratio}"
            )));
        }
        let mut targets = vec![1u64];
        let mut x = 1.0f64;
        loop {
            x *= ratio;
            let t = x.ceil() as u64;
            if t >= n_max {
                break;
            }
            if t > *targets.last().unwrap() {
                targets.push(t);
            }
        }
        if n_max > 1 {
            targets.push(n_max);
        }
        Ok(CheckpointSchedule { targets })
    }

    /// An explicit sorted list of distinct sizes; must end at the intended
    /// run length and contain no zeros.
    pub fn explicit(targets: Vec<u64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::invalid("schedule must contain at least one target"));
        }
        if targets[0] == 0 {
            return Err(Error::invalid("schedule targets must be at least 1"));
        }
        if !targets.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("schedule targets must be strictly increasing"));
        }
        Ok(CheckpointSchedule { targets })
    }

    pub fn targets(&self) -> &[u64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_max(&self) -> u64 {
        *self.targets.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn doubling_grid_to_ten() {
        let s = CheckpointSchedule::geometric(10, 2.0).unwrap();
        assert_eq!(s.targets(), &[1, 2, 4, 8, 10]);
    }

    #[test]
    fn single_leaf_run() {
        let s = CheckpointSchedule::geometric(1, 1.05).unwrap();
        assert_eq!(s.targets(), &[1]);
    }

    #[test]
    fn bad_arguments_rejected() {
        assert!(CheckpointSchedule::geometric(0, 2.0).is_err());
        assert!(CheckpointSchedule::geometric(10, 1.0).is_err());
        assert!(CheckpointSchedule::geometric(10, 0.5).is_err());
        assert!(CheckpointSchedule::geometric(10, f64::NAN).is_err());
        assert!(CheckpointSchedule::explicit(vec![]).is_err());
        assert!(CheckpointSchedule::explicit(vec![0, 3]).is_err());
        assert!(CheckpointSchedule::explicit(vec![3, 3]).is_err());
    }

    // Independent reconstruction of the grid via a set, for cross-checking
    // the streaming construction above. Powers are realized as the same
    // running product so the comparison exercises the set logic, not
    // floating-point pow rounding.
    fn reference_grid(n_max: u64, ratio: f64) -> Vec<u64> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(1);
        set.insert(n_max);
        let mut x = 1.0f64;
        loop {
            x *= ratio;
            let v = x.ceil() as u64;
            if v >= n_max {
                break;
            }
            if v >= 2 {
                set.insert(v);
            }
        }
        set.into_iter().collect()
    }

    #[test]
    fn matches_reference_at_large_scale() {
        let s = CheckpointSchedule::geometric(1_000_000_000, 1.05).unwrap();
        let reference = reference_grid(1_000_000_000, 1.05);
        assert_eq!(s.targets(), &reference[..]);
        // the grid has on the order of log(n)/log(ratio) entries; ceiling
        // collisions at small sizes shave some off
        assert!(
            (350..=426).contains(&s.len()),
            "unexpected grid size {}",
            s.len()
        );
    }

    proptest! {
        #[test]
        fn grid_structure(n_max in 1u64..200_000, ratio in 1.01f64..8.0) {
            let s = CheckpointSchedule::geometric(n_max, ratio).unwrap();
            let t = s.targets();
            prop_assert_eq!(t[0], 1);
            prop_assert_eq!(*t.last().unwrap(), n_max);
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
            // consecutive targets never jump by more than one ratio step
            for w in t.windows(2) {
                prop_assert!(w[1] <= (w[0] as f64 * ratio).ceil() as u64 + 1);
            }
        }
    }
}
