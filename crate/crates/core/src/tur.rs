//! Thermodynamic uncertainty relation for the cycle work.
//!
//! The tightest general bound on the relative work variance is
//! `f(Σ) = csch²(g(Σ/2))`, where `g` inverts `x·tanh(x)` on `x ≥ 0`.

use serde::Serialize;

use crate::cycle::{self, EngineParams};
use crate::error::{Error, Result};

/// Default relative tolerance for [`inverse_xtanh`].
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A cell satisfies the bound when `observed - bound >= -SLACK_FLOOR`.
pub const SLACK_FLOOR: f64 = 1e-10;

const SERIES_CUTOFF: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;

fn xtanh(x: f64) -> f64 {
    x * x.tanh()
}

fn xtanh_derivative(x: f64) -> f64 {
    let t = x.tanh();
    t + x * (1.0 - t * t)
}

/// Solves `x·tanh(x) = y` for `x ≥ 0`.
///
/// Safeguarded Newton iteration inside the bracket `[0, max(1, y) + 1]`.
/// Iterates to machine precision; `tol` sets the acceptance check
/// `|x·tanh(x) - y| <= tol·max(y, 1)` and must lie in `(0, 1e-3]`.
pub fn inverse_xtanh(y: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::invalid("tol", format!("must lie in (0, 1e-3], got {tol}")));
    }
    if y.is_nan() || y < 0.0 {
        return Err(Error::invalid("y", format!("must be non-negative, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if y < SERIES_CUTOFF {
        // x² = y + y²/3 + O(y³)
        return Ok(y.sqrt() * (1.0 + y / 6.0));
    }
    if y > 40.0 {
        // tanh(x) = 1 to double precision once x > 19.1, so x = y exactly.
        return Ok(y);
    }

    let (mut lo, mut hi) = (0.0, y.max(1.0) + 1.0);
    let mut x = if y < 1.0 { y.sqrt() } else { y };
    for _ in 0..MAX_ITERATIONS {
        let f = xtanh(x) - y;
        if f == 0.0 {
            return Ok(x);
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - f / xtanh_derivative(x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
            x = next;
            break;
        }
        x = next;
    }
    let residual = (xtanh(x) - y).abs();
    if residual > tol * y.max(1.0) {
        return Err(Error::invalid(
            "y",
            format!("root finding stalled at x = {x} (residual {residual})"),
        ));
    }
    Ok(x)
}

/// `f(Σ) = csch²(g(Σ/2))`. Returns `+∞` at `Σ = 0`.
pub fn tur_bound(sigma_mean: f64) -> Result<f64> {
    if sigma_mean.is_nan() || sigma_mean < 0.0 {
        return Err(Error::invalid(
            "sigma_mean",
            format!("entropy production must be non-negative, got {sigma_mean}"),
        ));
    }
    if sigma_mean == 0.0 {
        return Ok(f64::INFINITY);
    }
    let g = inverse_xtanh(0.5 * sigma_mean, DEFAULT_TOLERANCE)?;
    let s = g.sinh();
    Ok(1.0 / (s * s))
}

/// Comparison of the relative work variance against the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurEvaluation {
    pub sigma_mean: f64,
    pub bound: f64,
    /// `var_W / <W>²`.
    pub observed: f64,
    pub satisfied: bool,
    /// `observed - bound`.
    pub slack: f64,
}

/// Evaluates the bound for one parameter set.
///
/// Entropy production within rounding of zero (down to `-1e-12`) is clamped
/// to zero.
pub fn verify_tur(p: &EngineParams) -> Result<TurEvaluation> {
    let w = cycle::mean_work(p).total;
    if w == 0.0 {
        return Err(Error::UndefinedRelativeFluctuation);
    }
    let observed = cycle::work_variance(p).total / (w * w);
    let sigma = cycle::entropy_production(p);
    if sigma < -1e-12 {
        return Err(Error::invalid(
            "sigma_mean",
            format!("negative entropy production {sigma}"),
        ));
    }
    let sigma = sigma.max(0.0);
    let bound = tur_bound(sigma)?;
    let slack = observed - bound;
    Ok(TurEvaluation {
        sigma_mean: sigma,
        bound,
        observed,
        satisfied: slack >= -SLACK_FLOOR,
        slack,
    })
}
