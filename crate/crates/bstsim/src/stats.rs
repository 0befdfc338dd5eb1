//! Goodness-of-fit machinery shared by the validation layers: a one-sample
//! Kolmogorov-Smirnov test and Pearson chi-square tests.

use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Reference distributions the KS test can compare against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceCdf {
    /// Unit-rate exponential.
    Exp1,
    /// Uniform on the unit interval.
    Uniform01,
    /// Standard Gumbel (location 0, scale 1).
    Gumbel,
}

impl ReferenceCdf {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ReferenceCdf::Exp1 => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-x).exp()
                }
            }
            ReferenceCdf::Uniform01 => x.clamp(0.0, 1.0),
            ReferenceCdf::Gumbel => (-(-x).exp()).exp(),
        }
    }
}

/// Result of a one-sample KS test.
#[derive(Clone, Copy, Debug)]
pub struct KsTest {
    /// Supremum distance between empirical and reference CDF.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    pub samples: usize,
}

/// One-sample KS test of `samples` against a reference CDF.
pub fn ks_statistic(samples: &[f64], reference: ReferenceCdf) -> Result<KsTest> {
    ks_statistic_fn(samples, |x| reference.eval(x))
}

/// One-sample KS test against an arbitrary CDF.
pub fn ks_statistic_fn(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsTest> {
    if samples.is_empty() {
        return Err(Error::invalid("KS test needs at least one sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("KS test samples must not contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_tail(m.sqrt() * d),
        samples: sorted.len(),
    })
}

/// Tail probability of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`,
/// truncated at 100 terms. Below `lambda = 0.04` the tail is 1 to within
/// 1e-12 and the truncated series is ill-behaved, so 1 is returned.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.04 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100u32 {
        let k = k as f64;
        sum += sign * (-2.0 * k * k * lambda * lambda).exp();
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Result of a Pearson chi-square test.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

const MIN_EXPECTED_PER_CELL: f64 = 5.0;

/// Chi-square goodness of fit of observed counts against expected counts.
///
/// Adjacent cells are pooled until every pooled cell has expected count at
/// least 5, the usual validity rule for the chi-square approximation.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != expected.len() {
        return Err(Error::invalid("observed/expected length mismatch"));
    }
    if observed.is_empty() {
        return Err(Error::invalid("chi-square needs at least one cell"));
    }
    if expected.iter().any(|&e| !(e >= 0.0) || !e.is_finite()) {
        return Err(Error::invalid("expected counts must be finite and nonnegative"));
    }
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(observed.len());
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        pool_obs += o as f64;
        pool_exp += e;
        if pool_exp >= MIN_EXPECTED_PER_CELL {
            cells.push((pool_obs, pool_exp));
            pool_obs = 0.0;
            pool_exp = 0.0;
        }
    }
    if pool_exp > 0.0 || pool_obs > 0.0 {
        // fold the undersized remainder into the last cell
        match cells.last_mut() {
            Some(last) => {
                last.0 += pool_obs;
                last.1 += pool_exp;
            }
            None => return Err(Error::invalid("expected counts sum below the pooling floor")),
        }
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let dof = cells.len() - 1;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: chi_square_tail(statistic, dof),
    })
}

/// Two-sample chi-square homogeneity test on paired count vectors.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareTest> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::invalid("two-sample chi-square needs equal, nonempty counts"));
    }
    let total_a: u64 = a.iter().sum();
    let total_b: u64 = b.iter().sum();
    if total_a == 0 || total_b == 0 {
        return Err(Error::invalid("two-sample chi-square needs nonzero totals"));
    }
    let grand = (total_a + total_b) as f64;
    let share_a = total_a as f64 / grand;
    let share_b = total_b as f64 / grand;
    // pool columns until each has an expected floor in the smaller row
    let floor = MIN_EXPECTED_PER_CELL / share_a.min(share_b);
    let mut cols: Vec<(f64, f64)> = Vec::with_capacity(a.len());
    let mut pa = 0.0;
    let mut pb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        pa += x as f64;
        pb += y as f64;
        if pa + pb >= floor {
            cols.push((pa, pb));
            pa = 0.0;
            pb = 0.0;
        }
    }
    if (pa > 0.0 || pb > 0.0) && !cols.is_empty() {
        let last = cols.last_mut().unwrap();
        last.0 += pa;
        last.1 += pb;
    }
    if cols.len() < 2 {
        return Err(Error::invalid("two-sample chi-square needs at least two cells after pooling"));
    }
    let mut statistic = 0.0;
    for &(x, y) in &cols {
        let col = x + y;
        let ea = col * share_a;
        let eb = col * share_b;
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let dof = cols.len() - 1;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: chi_square_tail(statistic, dof),
    })
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_tail(statistic: f64, dof: usize) -> f64 {
    if dof == 0 || statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}
