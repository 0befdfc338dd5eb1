//! Independent oracles for the profile simulator.
//!
//! Two cross-checks live here. [`ExplicitTree`] grows trees node by node
//! with none of the profile compression, deriving the saturation level from
//! the node set rather than from leaf depths, so agreement between the two
//! simulators is meaningful. [`exact_distribution`] computes the law of the
//! depth statistics in exact rational arithmetic for small sizes by dynamic
//! programming over reachable profiles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::{LevelProfile, Observables};
use crate::rng::RandomStream;
use crate::stats::{chi_square_gof, chi_square_two_sample, ChiSquareTest};

/// Leaf cap for explicit trees; the arena stores every node individually.
pub const MAX_EXPLICIT_LEAVES: u64 = 1_000_000;

/// Size cap for the exact distribution; state count and denominators grow
/// quickly beyond this.
pub const MAX_EXACT_N: u64 = 12;

#[derive(Clone, Copy, Debug)]
struct Node {
    depth: u32,
    children: Option<(u32, u32)>,
}

/// A fully materialized tree grown by uniform leaf expansion.
#[derive(Clone, Debug)]
pub struct ExplicitTree {
    nodes: Vec<Node>,
    leaves: Vec<u32>,
}

impl ExplicitTree {
    /// The single-leaf tree.
    pub fn new() -> Self {
        ExplicitTree {
            nodes: vec![Node {
                depth: 0,
                children: None,
            }],
            leaves: vec![0],
        }
    }

    pub fn leaf_count(&self) -> u64 {
        self.leaves.len() as u64
    }

    pub fn node_count(&self) -> u64 {
        self.nodes.len() as u64
    }

    /// Expand the leaf at position `rank` of the internal leaf list into an
    /// internal node with two child leaves.
    pub fn expand_rank(&mut self, rank: usize) {
        let leaf = self.leaves[rank];
        let depth = self.nodes[leaf as usize].depth;
        let left = self.nodes.len() as u32;
        let right = left + 1;
        self.nodes.push(Node {
            depth: depth + 1,
            children: None,
        });
        self.nodes.push(Node {
            depth: depth + 1,
            children: None,
        });
        self.nodes[leaf as usize].children = Some((left, right));
        self.leaves[rank] = left;
        self.leaves.push(right);
    }

    /// Grow by one uniformly chosen leaf.
    pub fn grow_step(&mut self, rng: &mut crate::rng::StreamRng) {
        let rank = rng.uniform_index(self.leaf_count()) as usize - 1;
        self.expand_rank(rank);
    }

    /// Depth statistics, with the saturation level derived from the node
    /// set: the deepest generation in which every one of the 2^k possible
    /// nodes is present.
    pub fn observables(&self) -> Observables {
        let mut leaf_max = 0u32;
        let mut leaf_min = u32::MAX;
        for &l in &self.leaves {
            let d = self.nodes[l as usize].depth;
            leaf_max = leaf_max.max(d);
            leaf_min = leaf_min.min(d);
        }
        let fringe = self
            .leaves
            .iter()
            .filter(|&&l| self.nodes[l as usize].depth == leaf_max)
            .count() as u64;

        let mut per_depth = vec![0u64; leaf_max as usize + 1];
        for node in &self.nodes {
            per_depth[node.depth as usize] += 1;
        }
        let mut saturation = 0u32;
        for (k, &count) in per_depth.iter().enumerate() {
            if k < 64 && count == 1u64 << k {
                saturation = k as u32;
            } else {
                break;
            }
        }
        debug_assert_eq!(
            saturation, leaf_min,
            "complete-generation count disagrees with the shallowest leaf"
        );
        Observables {
            height: leaf_max,
            saturation,
            fringe,
        }
    }
}

impl Default for ExplicitTree {
    fn default() -> Self {
        ExplicitTree::new()
    }
}

/// Grow an explicit tree to `n` leaves on the given stream.
pub fn grow_explicit(stream: RandomStream, n: u64) -> Result<ExplicitTree> {
    if n == 0 {
        return Err(Error::invalid("a tree has at least one leaf"));
    }
    if n > MAX_EXPLICIT_LEAVES {
        return Err(Error::resource(format!(
            "explicit trees are capped at {MAX_EXPLICIT_LEAVES} leaves, requested {n}"
        )));
    }
    let mut tree = ExplicitTree::new();
    let mut rng = stream.rng();
    while tree.leaf_count() < n {
        tree.grow_step(&mut rng);
    }
    Ok(tree)
}

/// Which statistic a distribution table describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    Height,
    Saturation,
    Fringe,
    /// The joint law of (height, saturation, fringe).
    Joint,
}

impl Statistic {
    /// Label used in serialized tables.
    pub fn label(self) -> &'static str {
        match self {
            Statistic::Height => "H",
            Statistic::Saturation => "h",
            Statistic::Fringe => "F",
            Statistic::Joint => "joint",
        }
    }
}

/// A value of one of the depth statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatValue {
    Scalar(u64),
    /// (height, saturation, fringe)
    Triple(u32, u32, u64),
}

impl std::fmt::Display for StatValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatValue::Scalar(v) => write!(f, "{v}"),
            StatValue::Triple(h, s, fr) => write!(f, "[{h},{s},{fr}]"),
        }
    }
}

/// Exact law of a statistic at a fixed size, as sorted
/// (value, probability) pairs with rational probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    pub n: u64,
    pub statistic: Statistic,
    pub entries: Vec<(StatValue, BigRational)>,
}

impl DistributionTable {
    /// Probabilities converted to floating point, preserving order.
    pub fn to_f64(&self) -> Vec<(StatValue, f64)> {
        self.entries
            .iter()
            .map(|(v, p)| (*v, rational_to_f64(p)))
            .collect()
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // exact for the denominators that occur at the sizes handled here
    let numer = r.numer().to_string().parse::<f64>().unwrap();
    let denom = r.denom().to_string().parse::<f64>().unwrap();
    numer / denom
}

/// One reachable profile with its exact probability.
#[derive(Clone, Debug)]
pub struct ProfileState {
    pub counts: Vec<u64>,
    pub probability: BigRational,
}

fn advance_layer(
    states: BTreeMap<Vec<u64>, BigRational>,
    leaf_count: u64,
) -> BTreeMap<Vec<u64>, BigRational> {
    let mut next: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    for (counts, p) in states {
        for j in 0..counts.len() {
            if counts[j] == 0 {
                continue;
            }
            let weight = BigRational::new(BigInt::from(counts[j]), BigInt::from(leaf_count));
            let mut child = counts.clone();
            child[j] -= 1;
            if j + 1 == child.len() {
                child.push(2);
            } else {
                child[j + 1] += 2;
            }
            let q = &p * weight;
            *next.entry(child).or_insert_with(BigRational::zero) += q;
        }
    }
    next
}

/// All profiles reachable at `n` leaves, with exact probabilities.
pub fn reachable_profiles(n: u64) -> Result<Vec<ProfileState>> {
    if n == 0 {
        return Err(Error::invalid("a tree has at least one leaf"));
    }
    if n > MAX_EXACT_N {
        return Err(Error::resource(format!(
            "exact enumeration is capped at n = {MAX_EXACT_N}, requested {n}"
        )));
    }
    let mut states = BTreeMap::new();
    states.insert(vec![1u64], BigRational::one());
    for m in 1..n {
        states = advance_layer(states, m);
    }
    Ok(states
        .into_iter()
        .map(|(counts, probability)| ProfileState {
            counts,
            probability,
        })
        .collect())
}

fn profile_statistic(counts: &[u64], statistic: Statistic) -> StatValue {
    let height = counts.len() as u32 - 1;
    let saturation = counts.iter().position(|&c| c != 0).unwrap() as u32;
    let fringe = *counts.last().unwrap();
    match statistic {
        Statistic::Height => StatValue::Scalar(height as u64),
        Statistic::Saturation => StatValue::Scalar(saturation as u64),
        Statistic::Fringe => StatValue::Scalar(fringe),
        Statistic::Joint => StatValue::Triple(height, saturation, fringe),
    }
}

/// Exact law of `statistic` over trees with `n` leaves, `n <= 12`.
pub fn exact_distribution(n: u64, statistic: Statistic) -> Result<DistributionTable> {
    let states = reachable_profiles(n)?;
    let mut law: BTreeMap<StatValue, BigRational> = BTreeMap::new();
    for state in states {
        let value = profile_statistic(&state.counts, statistic);
        *law.entry(value).or_insert_with(BigRational::zero) += state.probability;
    }
    Ok(DistributionTable {
        n,
        statistic,
        entries: law.into_iter().collect(),
    })
}

/// Leaf cap for exhaustive sequence enumeration; the sequence count is
/// `(n - 1)!`.
pub const MAX_ENUMERATION_N: u64 = 9;

/// Joint law of `(H, h, F)` by brute force: walk every leaf-choice sequence
/// on the explicit tree with its probability. Independent of the profile
/// dynamic programming, so the two can cross-check each other.
pub fn enumerated_joint_distribution(n: u64) -> Result<DistributionTable> {
    if !(1..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::invalid(format!(
            "enumeration needs 1 <= n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    fn recurse(
        tree: &ExplicitTree,
        n: u64,
        prob: BigRational,
        acc: &mut BTreeMap<StatValue, BigRational>,
    ) {
        let k = tree.leaf_count();
        if k == n {
            let obs = tree.observables();
            let key = StatValue::Triple(obs.height, obs.saturation, obs.fringe);
            *acc.entry(key).or_insert_with(BigRational::zero) += prob;
            return;
        }
        let share = &prob / BigRational::from(BigInt::from(k));
        for rank in 0..k as usize {
            let mut next = tree.clone();
            next.expand_rank(rank);
            recurse(&next, n, share.clone(), acc);
        }
    }
    let mut acc = BTreeMap::new();
    recurse(&ExplicitTree::new(), n, BigRational::one(), &mut acc);
    Ok(DistributionTable {
        n,
        statistic: Statistic::Joint,
        entries: acc.into_iter().collect(),
    })
}

/// Chi-square comparisons for one statistic.
#[derive(Clone, Copy, Debug)]
pub struct StatComparison {
    pub profile_vs_exact: ChiSquareTest,
    pub explicit_vs_exact: ChiSquareTest,
    pub profile_vs_explicit: ChiSquareTest,
}

/// Agreement report between the two simulators and the exact law.
#[derive(Clone, Copy, Debug)]
pub struct ComparisonReport {
    pub n: u64,
    pub trials: u64,
    pub height: StatComparison,
    pub saturation: StatComparison,
    pub fringe: StatComparison,
}

#[derive(Clone, Default)]
struct TrialCounts {
    profile: [BTreeMap<u64, u64>; 3],
    explicit: [BTreeMap<u64, u64>; 3],
}

impl TrialCounts {
    fn record(target: &mut [BTreeMap<u64, u64>; 3], obs: Observables) {
        *target[0].entry(obs.height as u64).or_insert(0) += 1;
        *target[1].entry(obs.saturation as u64).or_insert(0) += 1;
        *target[2].entry(obs.fringe).or_insert(0) += 1;
    }

    fn merge(mut self, other: TrialCounts) -> TrialCounts {
        for (mine, theirs) in self
            .profile
            .iter_mut()
            .chain(self.explicit.iter_mut())
            .zip(other.profile.into_iter().chain(other.explicit))
        {
            for (k, v) in theirs {
                *mine.entry(k).or_insert(0) += v;
            }
        }
        self
    }
}

/// Grow `trials` trees with both simulators and test the observed depth
/// statistics against the exact law and against each other.
///
/// Trial `t` uses sub-stream `t` of `stream` for the profile simulator and
/// sub-stream `trials + t` for the explicit simulator, so the two samples
/// are independent and the report is reproducible regardless of thread
/// count.
pub fn compare_simulators(n: u64, trials: u64, stream: RandomStream) -> Result<ComparisonReport> {
    if !(2..=MAX_EXACT_N).contains(&n) {
        return Err(Error::invalid(format!(
            "simulator comparison needs 2 <= n <= {MAX_EXACT_N}, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("simulator comparison needs at least one trial"));
    }
    let exact = [
        exact_distribution(n, Statistic::Height)?,
        exact_distribution(n, Statistic::Saturation)?,
        exact_distribution(n, Statistic::Fringe)?,
    ];

    let counts = (0..trials)
        .into_par_iter()
        .fold(TrialCounts::default, |mut acc, t| {
            let mut profile = LevelProfile::new();
            let mut rng = stream.offset(t).rng();
            for _ in 1..n {
                profile.step(&mut rng);
            }
            TrialCounts::record(&mut acc.profile, profile.observables());

            let mut tree = ExplicitTree::new();
            let mut rng = stream.offset(trials + t).rng();
            while tree.leaf_count() < n {
                tree.grow_step(&mut rng);
            }
            TrialCounts::record(&mut acc.explicit, tree.observables());
            acc
        })
        .reduce(TrialCounts::default, TrialCounts::merge);

    let mut comparisons = Vec::with_capacity(3);
    for i in 0..3 {
        comparisons.push(StatComparison {
            profile_vs_exact: against_exact(&counts.profile[i], &exact[i], trials)?,
            explicit_vs_exact: against_exact(&counts.explicit[i], &exact[i], trials)?,
            profile_vs_explicit: against_each_other(&counts.profile[i], &counts.explicit[i])?,
        });
    }
    let fringe = comparisons.pop().unwrap();
    let saturation = comparisons.pop().unwrap();
    let height = comparisons.pop().unwrap();
    Ok(ComparisonReport {
        n,
        trials,
        height,
        saturation,
        fringe,
    })
}

fn against_exact(
    observed: &BTreeMap<u64, u64>,
    exact: &DistributionTable,
    trials: u64,
) -> Result<ChiSquareTest> {
    let support: Vec<u64> = exact
        .entries
        .iter()
        .map(|(v, _)| match v {
            StatValue::Scalar(s) => *s,
            StatValue::Triple(..) => unreachable!("marginal tables are scalar"),
        })
        .collect();
    // a simulated value outside the exact support disproves agreement
    // outright, no test statistic needed
    if observed.keys().any(|v| !support.contains(v)) {
        return Ok(ChiSquareTest {
            statistic: f64::INFINITY,
            dof: support.len().saturating_sub(1),
            p_value: 0.0,
        });
    }
    let obs: Vec<u64> = support
        .iter()
        .map(|v| observed.get(v).copied().unwrap_or(0))
        .collect();
    let expected: Vec<f64> = exact
        .to_f64()
        .iter()
        .map(|(_, p)| p * trials as f64)
        .collect();
    chi_square_gof(&obs, &expected)
}

fn against_each_other(
    a: &BTreeMap<u64, u64>,
    b: &BTreeMap<u64, u64>,
) -> Result<ChiSquareTest> {
    let support: Vec<u64> = a.keys().chain(b.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let av: Vec<u64> = support.iter().map(|v| a.get(v).copied().unwrap_or(0)).collect();
    let bv: Vec<u64> = support.iter().map(|v| b.get(v).copied().unwrap_or(0)).collect();
    chi_square_two_sample(&av, &bv)
}
