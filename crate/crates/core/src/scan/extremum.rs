use serde::Serialize;

use super::{Axis, FixedParams, Observable, ScanCell, ScanParam, Spacing};
use crate::error::{Error, Result};

pub const DEFAULT_EXTREMUM_TOLERANCE: f64 = 1e-6;

/// Smallest coarse pre-grid used before local refinement.
pub const MIN_COARSE_POINTS: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Goal {
    Minimize,
    Maximize,
}

impl Goal {
    /// The natural direction for an objective: most work output, least
    /// relative fluctuation, highest efficiency.
    pub fn natural(objective: Observable) -> Goal {
        match objective {
            Observable::AbsMeanW
            | Observable::EtaTh
            | Observable::EtaEngine
            | Observable::MeanSigma
            | Observable::TurSlack => Goal::Maximize,
            _ => Goal::Minimize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremumResult {
    pub objective: Observable,
    pub goal: Goal,
    pub param: ScanParam,
    pub argument: f64,
    pub value: f64,
    /// Width of the final bracket, in parameter units.
    pub tolerance: f64,
    pub evaluations: usize,
}

/// Objective restricted to its domain. Anything other than the signed mean
/// work only counts on engine cells.
fn objective_at(
    objective: Observable,
    goal: Goal,
    fixed: &FixedParams,
    param: ScanParam,
    x: f64,
) -> Result<Option<f64>> {
    let p = fixed.with(&[(param, x)])?;
    let cell = ScanCell::evaluate(p, (0, 0), x, None);
    if objective != Observable::MeanW && !cell.is_engine() {
        return Ok(None);
    }
    Ok(cell.value(objective).filter(|v| v.is_finite()).map(|v| match goal {
        Goal::Minimize => v,
        Goal::Maximize => -v,
    }))
}

/// Global search over `interval`: a coarse grid of at least
/// [`MIN_COARSE_POINTS`] points (spaced like the interval), then
/// golden-section refinement around the best coarse point until the bracket
/// is no wider than `tol`.
pub fn find_extremum(
    objective: Observable,
    goal: Goal,
    interval: &Axis,
    fixed: &FixedParams,
    tol: f64,
) -> Result<ExtremumResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    let coarse = Axis {
        points: interval.points.max(MIN_COARSE_POINTS),
        ..*interval
    };
    let scanned = [interval.param];
    let mut problems = coarse.problems("interval");
    problems.extend(fixed.problems(&scanned));
    if !problems.is_empty() {
        return Err(Error::InvalidScanSpec(problems));
    }

    let param = interval.param;
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        Ok(objective_at(objective, goal, fixed, param, x)?.unwrap_or(f64::INFINITY))
    };

    let xs = coarse.values();
    let mut best = (usize::MAX, f64::INFINITY);
    for (k, &x) in xs.iter().enumerate() {
        let f = eval(x)?;
        if f < best.1 {
            best = (k, f);
        }
    }
    if best.0 == usize::MAX {
        return Err(Error::NoExtremum(objective.name().to_string()));
    }

    // Refine in the axis coordinate (log for log spacing).
    type Map = fn(f64) -> f64;
    let (to_u, from_u): (Map, Map) = match coarse.spacing {
        Spacing::Linear => (|x| x, |u| u),
        Spacing::Log => (f64::ln, f64::exp),
    };
    let k = best.0;
    let mut a = to_u(xs[k.saturating_sub(1)]);
    let mut b = to_u(xs[(k + 1).min(xs.len() - 1)]);
    let (mut arg, mut val) = (xs[k], best.1);

    let width = |a: f64, b: f64| (from_u(b) - from_u(a)).abs();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(from_u(c))?, eval(from_u(d))?);
    while width(a, b) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(from_u(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(from_u(d))?;
        }
        // Stop once the bracket no longer shrinks in floating point.
        if c <= a || d >= b || c >= d {
            break;
        }
    }
    for (u, f) in [(c, fc), (d, fd)] {
        if f < val {
            arg = from_u(u);
            val = f;
        }
    }
    let arg = arg.clamp(interval.min, interval.max);

    Ok(ExtremumResult {
        objective,
        goal,
        param,
        argument: arg,
        value: match goal {
            Goal::Minimize => val,
            Goal::Maximize => -val,
        },
        tolerance: width(a, b),
        evaluations,
    })
}
