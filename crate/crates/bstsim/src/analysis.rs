//! Trajectory post-processing: recentred ensembles, fringe dynamics and
//! the exponential-race bound behind the fringe hitting times.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{solve_height_constants, solve_saturation_constants};
use crate::error::{Error, Result};
use crate::profile::{Trajectory, TrajectoryRecord};
use crate::rng::RandomStream;
use crate::schedule::CheckpointSchedule;

/// Fills the recentred columns of trajectory records, caching the solved
/// constants across calls.
#[derive(Clone, Copy, Debug)]
pub struct Recentrer {
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
}

impl Recentrer {
    pub fn new() -> Self {
        let (a, b) = solve_height_constants();
        let (alpha, beta) = solve_saturation_constants();
        Recentrer { a, b, alpha, beta }
    }

    /// `(b log n - a H) / log log n`, or None below n = 3.
    pub fn height(&self, n: u64, height: u32) -> Option<f64> {
        if n < 3 {
            return None;
        }
        let lln = (n as f64).ln().ln();
        Some((self.b * (n as f64).ln() - self.a * height as f64) / lln)
    }

    /// `(alpha h - beta log n) / log log n`, or None below n = 3.
    pub fn saturation(&self, n: u64, saturation: u32) -> Option<f64> {
        if n < 3 {
            return None;
        }
        let lln = (n as f64).ln().ln();
        Some((self.alpha * saturation as f64 - self.beta * (n as f64).ln()) / lln)
    }

    pub fn fill(&self, record: &mut TrajectoryRecord) {
        record.r_height = self.height(record.n, record.height);
        record.r_saturation = self.saturation(record.n, record.saturation);
    }
}

impl Default for Recentrer {
    fn default() -> Self {
        Recentrer::new()
    }
}

/// Minimum and maximum of a series after discarding a leading burn-in
/// fraction of its entries.
pub fn running_extrema(values: &[f64], burn_in_fraction: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::invalid(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in_fraction}"
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("running extrema need NaN-free input"));
    }
    let skip = (burn_in_fraction * values.len() as f64).floor() as usize;
    let tail = &values[skip.min(values.len())..];
    if tail.is_empty() {
        return Err(Error::invalid("no values remain after burn-in"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in tail {
        min = min.min(v);
        max = max.max(v);
    }
    Ok((min, max))
}

/// Default burn-in fraction for per-member extrema summaries.
pub const DEFAULT_BURN_IN: f64 = 0.10;

/// Quantile levels reported per checkpoint.
pub const QUANTILE_PROBS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Per-checkpoint summary of one recentred statistic across members.
#[derive(Clone, Debug, Serialize)]
pub struct StatSummary {
    /// Per checkpoint; None where the statistic is undefined (n < 3).
    pub mean: Vec<Option<f64>>,
    pub variance: Vec<Option<f64>>,
    pub quantile_probs: Vec<f64>,
    pub quantiles: Vec<Option<Vec<f64>>>,
}

/// Per-member running extrema past burn-in.
#[derive(Clone, Debug, Serialize)]
pub struct MemberExtrema {
    pub burn_in_fraction: f64,
    pub r_height: Vec<(f64, f64)>,
    pub r_saturation: Vec<(f64, f64)>,
}

/// Cross-member summary of an ensemble of recentred trajectories.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleSummary {
    pub members: u64,
    pub targets: Vec<u64>,
    pub r_height: StatSummary,
    pub r_saturation: StatSummary,
    pub member_extrema: MemberExtrema,
}

/// Run `members` independent trajectories on sub-streams `0..members` of
/// `stream` and summarize the recentred statistics per checkpoint.
///
/// Members are simulated in parallel but collected and folded in member
/// order, so the summary is identical for any thread count.
pub fn ensemble_run(
    stream: RandomStream,
    members: u64,
    schedule: &CheckpointSchedule,
) -> Result<EnsembleSummary> {
    if members == 0 {
        return Err(Error::invalid("an ensemble needs at least one member"));
    }
    let recentrer = Recentrer::new();
    let trajectories: Vec<Vec<TrajectoryRecord>> = (0..members)
        .into_par_iter()
        .map(|i| {
            let mut records = Trajectory::new(stream.offset(i), schedule)?.collect::<Vec<_>>();
            for r in &mut records {
                recentrer.fill(r);
            }
            Ok(records)
        })
        .collect::<Result<_>>()?;

    let targets = schedule.targets().to_vec();
    let r_height = summarize(&trajectories, &targets, |r| r.r_height);
    let r_saturation = summarize(&trajectories, &targets, |r| r.r_saturation);

    let mut extrema = MemberExtrema {
        burn_in_fraction: DEFAULT_BURN_IN,
        r_height: Vec::with_capacity(members as usize),
        r_saturation: Vec::with_capacity(members as usize),
    };
    for member in &trajectories {
        let heights: Vec<f64> = member.iter().filter_map(|r| r.r_height).collect();
        let saturations: Vec<f64> = member.iter().filter_map(|r| r.r_saturation).collect();
        extrema.r_height.push(running_extrema(&heights, DEFAULT_BURN_IN)?);
        extrema
            .r_saturation
            .push(running_extrema(&saturations, DEFAULT_BURN_IN)?);
    }

    Ok(EnsembleSummary {
        members,
        targets,
        r_height,
        r_saturation,
        member_extrema: extrema,
    })
}

fn summarize(
    trajectories: &[Vec<TrajectoryRecord>],
    targets: &[u64],
    pick: impl Fn(&TrajectoryRecord) -> Option<f64>,
) -> StatSummary {
    let mut mean = Vec::with_capacity(targets.len());
    let mut variance = Vec::with_capacity(targets.len());
    let mut quantiles = Vec::with_capacity(targets.len());
    let members = trajectories.len();
    for c in 0..targets.len() {
        let values: Vec<f64> = trajectories
            .iter()
            .filter_map(|member| pick(&member[c]))
            .collect();
        if values.len() < members || values.is_empty() {
            mean.push(None);
            variance.push(None);
            quantiles.push(None);
            continue;
        }
        let m = values.iter().sum::<f64>() / members as f64;
        let v = if members > 1 {
            values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (members - 1) as f64
        } else {
            0.0
        };
        mean.push(Some(m));
        variance.push(Some(v));
        let mut sorted = values;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quantiles.push(Some(
            QUANTILE_PROBS.iter().map(|&q| quantile(&sorted, q)).collect(),
        ));
    }
    StatSummary {
        mean,
        variance,
        quantile_probs: QUANTILE_PROBS.to_vec(),
        quantiles,
    }
}

/// Linearly interpolated quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Verdict of the frontier support check on one profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierVerdict {
    /// Some leaf occupies the window of `floor(log2 F)` levels above the
    /// deepest level.
    Pass,
    /// The window above the deepest level is empty.
    Fail,
    /// The tree is too shallow for the window to exist.
    NotApplicable,
}

/// Check that a profile with fringe `F` and height above `floor(log2 F)`
/// keeps a leaf within `floor(log2 F)` levels of the bottom.
pub fn frontier_check(counts: &[u64]) -> FrontierVerdict {
    let height = counts.len() - 1;
    let fringe = counts[height];
    debug_assert!(fringe > 0, "last level of a profile is occupied");
    let window = fringe.ilog2() as usize;
    if height <= window {
        return FrontierVerdict::NotApplicable;
    }
    if counts[height - window..height].iter().any(|&c| c > 0) {
        FrontierVerdict::Pass
    } else {
        FrontierVerdict::Fail
    }
}

/// One row of a fringe trace: leaf counts at the deepest window levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FringeTraceRow {
    pub n: u64,
    /// `window[i]` is the leaf count at depth `height - i`, zero when that
    /// level lies above the root.
    pub window: Vec<u64>,
}

/// Tally of frontier checks along a trajectory.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct FrontierTally {
    pub checked: u64,
    pub passes: u64,
    pub failures: u64,
    pub not_applicable: u64,
}

fn window_row(counts: &[u64], window: usize, n: u64) -> FringeTraceRow {
    let height = counts.len() - 1;
    let row = (0..window)
        .map(|i| if i <= height { counts[height - i] } else { 0 })
        .collect();
    FringeTraceRow { n, window: row }
}

/// Leaf counts of the deepest `window` levels at each checkpoint,
/// optionally running the frontier check after every growth step.
///
/// The frontier tally reads states without consuming randomness, so runs
/// with and without it visit identical trees.
pub fn fringe_trace_checked(
    stream: RandomStream,
    schedule: &CheckpointSchedule,
    window: usize,
    check_frontier: bool,
) -> Result<(Vec<FringeTraceRow>, Option<FrontierTally>)> {
    if window == 0 {
        return Err(Error::invalid("fringe trace needs a window of at least 1"));
    }
    if schedule.n_max() > crate::profile::MAX_TRAJECTORY_STEPS {
        return Err(Error::resource(format!(
            "run length {} exceeds the step budget",
            schedule.n_max()
        )));
    }
    let mut profile = crate::profile::LevelProfile::new();
    let mut rng = stream.rng();
    let mut tally = check_frontier.then(FrontierTally::default);
    let mut rows = Vec::with_capacity(schedule.len());
    for &target in schedule.targets() {
        while profile.n() < target {
            profile.step(&mut rng);
            if let Some(t) = tally.as_mut() {
                t.checked += 1;
                match frontier_check(profile.counts()) {
                    FrontierVerdict::Pass => t.passes += 1,
                    FrontierVerdict::Fail => t.failures += 1,
                    FrontierVerdict::NotApplicable => t.not_applicable += 1,
                }
            }
        }
        rows.push(window_row(profile.counts(), window, profile.n()));
    }
    Ok((rows, tally))
}

/// Leaf counts of the deepest `window` levels at each checkpoint.
pub fn fringe_trace(
    stream: RandomStream,
    schedule: &CheckpointSchedule,
    window: usize,
) -> Result<Vec<FringeTraceRow>> {
    Ok(fringe_trace_checked(stream, schedule, window, false)?.0)
}

/// Full-trajectory fringe diagnostics.
#[derive(Clone, Debug)]
pub struct FringeScan {
    /// For each even fringe size `2k`, the first `n` at which the fringe
    /// equals `2k` while the height exceeds `floor(log2 2k)`; None when
    /// the run never got there.
    pub hitting: BTreeMap<u64, Option<u64>>,
    /// Smallest fringe over all states with `n >= 2`.
    pub min_fringe: u64,
    /// Largest fringe over all states with `n >= 2`.
    pub max_fringe: u64,
    /// Number of states with `n >= 2` whose fringe is exactly 2.
    pub f2_states: u64,
    /// Present when frontier checking was requested.
    pub frontier: Option<FrontierTally>,
}

/// Grow a tree to `n_max` leaves, recording fringe hitting times for
/// `k = 1..=k_max` and, optionally, frontier-check tallies at every state.
pub fn fringe_scan(
    stream: RandomStream,
    n_max: u64,
    k_max: u64,
    check_frontier: bool,
) -> Result<FringeScan> {
    if n_max < 2 {
        return Err(Error::invalid("a fringe scan needs n_max >= 2"));
    }
    if k_max == 0 {
        return Err(Error::invalid("a fringe scan needs k_max >= 1"));
    }
    if n_max > crate::profile::MAX_TRAJECTORY_STEPS {
        return Err(Error::resource(format!(
            "run length {n_max} exceeds the step budget"
        )));
    }
    let mut hitting: BTreeMap<u64, Option<u64>> =
        (1..=k_max).map(|k| (2 * k, None)).collect();
    let mut profile = crate::profile::LevelProfile::new();
    let mut rng = stream.rng();
    let mut min_fringe = u64::MAX;
    let mut max_fringe = 0u64;
    let mut f2_states = 0u64;
    let mut frontier = check_frontier.then(FrontierTally::default);
    while profile.n() < n_max {
        let out = profile.step(&mut rng);
        let fringe = out.fringe;
        min_fringe = min_fringe.min(fringe);
        max_fringe = max_fringe.max(fringe);
        if fringe == 2 {
            f2_states += 1;
        }
        if fringe <= 2 * k_max {
            if let Some(slot @ None) = hitting.get_mut(&fringe) {
                if u64::from(out.height) > fringe.ilog2() as u64 {
                    *slot = Some(profile.n());
                }
            }
        }
        if let Some(tally) = frontier.as_mut() {
            tally.checked += 1;
            match frontier_check(profile.counts()) {
                FrontierVerdict::Pass => tally.passes += 1,
                FrontierVerdict::Fail => tally.failures += 1,
                FrontierVerdict::NotApplicable => tally.not_applicable += 1,
            }
        }
    }
    Ok(FringeScan {
        hitting,
        min_fringe,
        max_fringe,
        f2_states,
        frontier,
    })
}

/// First passage sizes of the fringe: for each `k <= k_max`, the first
/// `n` with fringe `2k` and height above `floor(log2 2k)`.
pub fn fringe_hitting_times(
    stream: RandomStream,
    n_max: u64,
    k_max: u64,
) -> Result<BTreeMap<u64, Option<u64>>> {
    Ok(fringe_scan(stream, n_max, k_max, false)?.hitting)
}

/// Closed-form lower bound `(1 + 2k)^(-floor(log2 2k))` for the
/// probability that a catch-up sum of `floor(log2 2k)` unit exponentials
/// finishes before the first of `2k` racing unit exponentials.
pub fn race_probability_bound(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("the race bound needs k >= 1"));
    }
    let m = (2 * k).ilog2();
    Ok((1.0 + 2.0 * k as f64).powi(-(m as i32)))
}

/// Monte Carlo estimate of the race probability.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RaceEstimate {
    pub k: u64,
    pub trials: u64,
    pub mc_estimate: f64,
    pub stderr: f64,
    pub closed_form: f64,
    pub z_score: f64,
}

/// Play the race `trials` times: per trial, sum `floor(log2 2k)` unit
/// exponentials and compare against the minimum of `2k` fresh unit
/// exponentials, drawn in that order on sub-stream `trial`.
pub fn race_mc(stream: RandomStream, k: u64, trials: u64) -> Result<RaceEstimate> {
    let closed_form = race_probability_bound(k)?;
    if trials < 2 {
        return Err(Error::invalid("the race estimate needs at least 2 trials"));
    }
    let m = (2 * k).ilog2();
    let wins: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.offset(i).rng();
            let sum: f64 = (0..m).map(|_| rng.exp_1()).sum();
            let min = (0..2 * k)
                .map(|_| rng.exp_1())
                .fold(f64::INFINITY, f64::min);
            u64::from(sum < min)
        })
        .sum();
    let p = wins as f64 / trials as f64;
    let stderr = (p * (1.0 - p) / trials as f64).sqrt();
    let z_score = if stderr > 0.0 {
        (p - closed_form) / stderr
    } else {
        0.0
    };
    Ok(RaceEstimate {
        k,
        trials,
        mc_estimate: p,
        stderr,
        closed_form,
        z_score,
    })
}
