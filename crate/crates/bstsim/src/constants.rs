//! Growth constants of the extreme depth statistics, and the recentred
//! forms in which those statistics converge.
//!
//! The height of an n-leaf tree grows like (b/a) log n and the saturation
//! level like (beta/alpha) log n, where the two constant pairs solve
//!
//! ```text
//!   2 (a - 1) e^a + 1 = 0,        b = 2 a e^a  = 2 e^a - 1
//!   2 (alpha + 1) e^-alpha = 1,   beta = 2 alpha e^-alpha = 1 - 2 e^-alpha
//! ```
//!
//! Both equations are strictly monotone on the solver brackets used here,
//! so the roots are unique and a bracketed Newton iteration converges to
//! machine precision.
//!
//! The same constants arise as the critical points of the branching random
//! walk transform `psi(theta) = exp(2 e^theta - 1)`: `a` solves
//! `theta psi'(theta)/psi(theta) = log psi(theta)` and `alpha` solves the
//! mirrored equation for the walk reflected to positive displacements.

use serde::Serialize;

use crate::error::{Error, Result};

/// The four growth constants with the equation residuals at the solution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantsSet {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    /// The classical height growth rate b/a.
    pub c: f64,
    pub residuals: ConstantsResiduals,
    pub identities: ConstantsIdentities,
}

/// How well the solved constants satisfy their defining relations.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantsResiduals {
    /// `2 (a - 1) e^a + 1` at the solved `a`.
    pub height_equation: f64,
    /// `2 (alpha + 1) e^-alpha - 1` at the solved `alpha`.
    pub saturation_equation: f64,
    /// Criticality defect of `psi` at `a`.
    pub height_criticality: f64,
    /// Criticality defect of the reflected transform at `alpha`.
    pub saturation_criticality: f64,
}

/// Defects of the closed-form cross-identities tying the two constant
/// pairs together.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantsIdentities {
    /// `b - (2 e^a - 1)`.
    pub b_from_a: f64,
    /// `beta - (1 - 2 e^-alpha)`.
    pub beta_from_alpha: f64,
}

/// Bracketed Newton iteration; falls back to bisection whenever the Newton
/// step would leave the current sign-change interval.
fn newton_bisect(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    debug_assert!(f_lo * f(hi) < 0.0, "root must be bracketed");
    let rising = f_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let width = hi - lo;
        if width <= f64::EPSILON * x.abs() {
            break;
        }
        let step = fx / df(x);
        let next = x - step;
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}

/// Constants (a, b) governing the height: `a` solves `2(x-1)e^x + 1 = 0`
/// on (0, 1) and `b = 2 a e^a`.
pub fn solve_height_constants() -> (f64, f64) {
    let f = |x: f64| 2.0 * (x - 1.0) * x.exp() + 1.0;
    let df = |x: f64| 2.0 * x * x.exp();
    let a = newton_bisect(f, df, 0.1, 0.999);
    (a, 2.0 * a * a.exp())
}

/// Constants (alpha, beta) governing the saturation level: `alpha` solves
/// `2(x+1)e^-x = 1` on (1, 2.5) and `beta = 2 alpha e^-alpha`.
pub fn solve_saturation_constants() -> (f64, f64) {
    let f = |x: f64| 2.0 * (x + 1.0) * (-x).exp() - 1.0;
    let df = |x: f64| -2.0 * x * (-x).exp();
    let alpha = newton_bisect(f, df, 1.0, 2.5);
    (alpha, 2.0 * alpha * (-alpha).exp())
}

/// Expected particle weight of the unit-time branching walk:
/// `psi(theta) = exp(2 e^theta - 1)`.
pub fn psi(theta: f64) -> f64 {
    (2.0 * theta.exp() - 1.0).exp()
}

/// Defect of the criticality condition `theta psi'/psi = log psi` at
/// `theta`; zero exactly at `theta = a`.
pub fn criticality_residual(theta: f64) -> f64 {
    2.0 * theta * theta.exp() - (2.0 * theta.exp() - 1.0)
}

/// Criticality defect for the walk reflected to positive displacement,
/// whose transform is `exp(2 e^-theta - 1)`; zero exactly at
/// `theta = alpha`.
pub fn reflected_criticality_residual(theta: f64) -> f64 {
    -2.0 * theta * (-theta).exp() - (2.0 * (-theta).exp() - 1.0)
}

/// Solve both constant pairs and evaluate all residuals.
pub fn constants_set() -> ConstantsSet {
    let (a, b) = solve_height_constants();
    let (alpha, beta) = solve_saturation_constants();
    ConstantsSet {
        a,
        b,
        alpha,
        beta,
        c: b / a,
        residuals: ConstantsResiduals {
            height_equation: 2.0 * (a - 1.0) * a.exp() + 1.0,
            saturation_equation: 2.0 * (alpha + 1.0) * (-alpha).exp() - 1.0,
            height_criticality: criticality_residual(a),
            saturation_criticality: reflected_criticality_residual(alpha),
        },
        identities: ConstantsIdentities {
            b_from_a: b - (2.0 * a.exp() - 1.0),
            beta_from_alpha: beta - (1.0 - 2.0 * (-alpha).exp()),
        },
    }
}

fn log_log(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "recentred statistics need n >= 3, got {n}"
        )));
    }
    Ok((n as f64).ln().ln())
}

/// Height recentred to its fluctuation scale:
/// `(b log n - a H) / log log n`. Defined for `n >= 3`.
pub fn recentre_height(n: u64, height: u32) -> Result<f64> {
    let (a, b) = solve_height_constants();
    let lln = log_log(n)?;
    Ok((b * (n as f64).ln() - a * height as f64) / lln)
}

/// Saturation level recentred to its fluctuation scale:
/// `(alpha h - beta log n) / log log n`. Defined for `n >= 3`.
pub fn recentre_saturation(n: u64, saturation: u32) -> Result<f64> {
    let (alpha, beta) = solve_saturation_constants();
    let lln = log_log(n)?;
    Ok((alpha * saturation as f64 - beta * (n as f64).ln()) / lln)
}
