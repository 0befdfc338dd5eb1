//! Fenwick tree over depth levels: point update, prefix sum, and
//! find-by-cumulative-count in O(log capacity).

#[derive(Clone, Debug)]
pub(crate) struct LevelIndex {
    tree: Vec<u64>,
    capacity: usize,
}

impl LevelIndex {
    pub fn with_capacity(capacity: usize) -> Self {
        LevelIndex {
            tree: vec![0; capacity + 1],
            capacity,
        }
    }

    pub fn from_counts(counts: &[u64], capacity: usize) -> Self {
        debug_assert!(counts.len() <= capacity);
        let mut idx = LevelIndex::with_capacity(capacity);
        for (i, &c) in counts.iter().enumerate() {
            if c != 0 {
                idx.add(i, c);
            }
        }
        idx
    }

    /// Add `delta` (two's-complement for subtraction) to level `i`.
    pub fn add(&mut self, i: usize, delta: u64) {
        let mut j = i + 1;
        while j <= self.capacity {
            self.tree[j] = self.tree[j].wrapping_add(delta);
            j += j & j.wrapping_neg();
        }
    }

    pub fn sub(&mut self, i: usize, delta: u64) {
        self.add(i, delta.wrapping_neg());
    }

    /// Sum of counts over levels `0..=i`.
    pub fn prefix_sum(&self, i: usize) -> u64 {
        let mut j = (i + 1).min(self.capacity);
        let mut s = 0u64;
        while j > 0 {
            s = s.wrapping_add(self.tree[j]);
            j -= j & j.wrapping_neg();
        }
        s
    }

    /// Smallest level whose cumulative count reaches `u` (1-based rank).
    /// Requires `1 <= u <= total`.
    pub fn find_by_cumulative(&self, u: u64) -> usize {
        debug_assert!(u >= 1);
        let mut pos = 0usize;
        let mut rem = u;
        let mut bit = self.capacity.next_power_of_two();
        while bit > 0 {
            let next = pos + bit;
            if next <= self.capacity && self.tree[next] < rem {
                rem -= self.tree[next];
                pos = next;
            }
            bit >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_and_updates() {
        let mut idx = LevelIndex::with_capacity(16);
        idx.add(0, 1);
        idx.add(3, 5);
        idx.add(7, 2);
        assert_eq!(idx.prefix_sum(0), 1);
        assert_eq!(idx.prefix_sum(2), 1);
        assert_eq!(idx.prefix_sum(3), 6);
        assert_eq!(idx.prefix_sum(15), 8);
        idx.sub(3, 4);
        assert_eq!(idx.prefix_sum(3), 2);
    }

    #[test]
    fn find_matches_linear_scan() {
        let counts = [0u64, 3, 0, 2, 1, 0, 0, 4];
        let idx = LevelIndex::from_counts(&counts, 8);
        let total: u64 = counts.iter().sum();
        for u in 1..=total {
            let mut cum = 0;
            let expect = counts
                .iter()
                .position(|&c| {
                    cum += c;
                    cum >= u
                })
                .unwrap();
            assert_eq!(idx.find_by_cumulative(u), expect, "u={u}");
        }
    }

    #[test]
    fn find_at_nonpower_capacity() {
        let counts = [1u64, 1, 1, 1, 1];
        let idx = LevelIndex::from_counts(&counts, 5);
        for u in 1..=5 {
            assert_eq!(idx.find_by_cumulative(u), (u - 1) as usize);
        }
    }
}
