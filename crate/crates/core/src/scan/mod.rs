//! Grid and line scans over `(T_c, T_h, J)` at fixed fields.

mod extremum;
mod observable;
pub mod presets;

pub use extremum::{find_extremum, ExtremumResult, Goal, DEFAULT_EXTREMUM_TOLERANCE, MIN_COARSE_POINTS};
pub use observable::Observable;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cycle::{self, CycleObservables, EngineParams, RegimeLabel};
use crate::error::{Error, Result};
use crate::tur::{self, TurEvaluation};

/// A scannable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScanParam {
    TCold,
    THot,
    Coupling,
}

impl ScanParam {
    pub const ALL: [ScanParam; 3] = [ScanParam::TCold, ScanParam::THot, ScanParam::Coupling];

    pub fn name(self) -> &'static str {
        match self {
            ScanParam::TCold => "Tc",
            ScanParam::THot => "Th",
            ScanParam::Coupling => "J",
        }
    }

    pub fn is_temperature(self) -> bool {
        self != ScanParam::Coupling
    }
}

impl fmt::Display for ScanParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Tc" | "T_c" => Ok(ScanParam::TCold),
            "Th" | "T_h" => Ok(ScanParam::THot),
            "J" => Ok(ScanParam::Coupling),
            _ => Err(Error::invalid(
                "axis",
                format!("unknown parameter `{s}` (expected Tc, Th or J)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn name(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(Error::invalid(
                "spacing",
                format!("expected `linear` or `log`, got `{s}`"),
            )),
        }
    }
}

/// One scanned direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub param: ScanParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: ScanParam, min: f64, max: f64, points: usize) -> Self {
        Axis {
            param,
            min,
            max,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(param: ScanParam, min: f64, max: f64, points: usize) -> Self {
        Axis {
            param,
            min,
            max,
            points,
            spacing: Spacing::Log,
        }
    }

    /// Coordinate of point `k`. Endpoints are exact, and point `k` of an
    /// `n`-point axis equals point `2k` of the `2n - 1`-point axis.
    pub fn value(&self, k: usize) -> f64 {
        let last = self.points - 1;
        if k == 0 {
            return self.min;
        }
        if k == last {
            return self.max;
        }
        let t = k as f64 / last as f64;
        match self.spacing {
            Spacing::Linear => self.min + (self.max - self.min) * t,
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (a + (b - a) * t).exp()
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.value(k)).collect()
    }

    /// Same range with `2n - 1` points.
    pub fn refined(&self) -> Axis {
        Axis {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    fn problems(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        let name = self.param.name();
        if !self.min.is_finite() || !self.max.is_finite() {
            out.push(format!("{label} ({name}): bounds must be finite"));
        } else if self.min >= self.max {
            out.push(format!(
                "{label} ({name}): min {} must be below max {}",
                self.min, self.max
            ));
        }
        if self.points < 2 {
            out.push(format!(
                "{label} ({name}): points must be at least 2, got {}",
                self.points
            ));
        }
        if self.spacing == Spacing::Log {
            if !self.param.is_temperature() {
                out.push(format!(
                    "{label} ({name}): log spacing is only allowed for temperatures"
                ));
            } else if self.min <= 0.0 {
                out.push(format!("{label} ({name}): log spacing requires min > 0"));
            }
        }
        if self.param.is_temperature() && self.min <= 0.0 && self.spacing == Spacing::Linear {
            out.push(format!("{label} ({name}): temperatures must be positive"));
        }
        out
    }
}

/// The held-constant part of an [`EngineParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedParams {
    pub h_initial: f64,
    pub h_final: f64,
    pub coupling: Option<f64>,
    pub t_cold: Option<f64>,
    pub t_hot: Option<f64>,
}

impl FixedParams {
    pub fn fields(h_initial: f64, h_final: f64) -> Self {
        FixedParams {
            h_initial,
            h_final,
            coupling: None,
            t_cold: None,
            t_hot: None,
        }
    }

    pub fn coupling(mut self, j: f64) -> Self {
        self.coupling = Some(j);
        self
    }

    pub fn t_cold(mut self, t: f64) -> Self {
        self.t_cold = Some(t);
        self
    }

    pub fn t_hot(mut self, t: f64) -> Self {
        self.t_hot = Some(t);
        self
    }

    pub fn get(&self, param: ScanParam) -> Option<f64> {
        match param {
            ScanParam::TCold => self.t_cold,
            ScanParam::THot => self.t_hot,
            ScanParam::Coupling => self.coupling,
        }
    }

    fn set(&mut self, param: ScanParam, value: f64) {
        match param {
            ScanParam::TCold => self.t_cold = Some(value),
            ScanParam::THot => self.t_hot = Some(value),
            ScanParam::Coupling => self.coupling = Some(value),
        }
    }

    /// Completes the parameters with the scanned values.
    pub fn with(&self, assignments: &[(ScanParam, f64)]) -> Result<EngineParams> {
        let mut full = *self;
        for &(param, value) in assignments {
            full.set(param, value);
        }
        let missing = |p: ScanParam| Error::invalid(p.name(), "not fixed and not scanned");
        EngineParams::new(
            full.coupling.ok_or_else(|| missing(ScanParam::Coupling))?,
            full.h_initial,
            full.h_final,
            full.t_cold.ok_or_else(|| missing(ScanParam::TCold))?,
            full.t_hot.ok_or_else(|| missing(ScanParam::THot))?,
        )
    }

    fn problems(&self, scanned: &[ScanParam]) -> Vec<String> {
        let mut out = Vec::new();
        for p in ScanParam::ALL {
            match (self.get(p), scanned.contains(&p)) {
                (Some(_), true) => out.push(format!("{p} is both fixed and scanned")),
                (None, false) => out.push(format!("{p} is neither fixed nor scanned")),
                _ => {}
            }
        }
        // Probe the fixed values with placeholders for the scanned ones.
        let placeholder: Vec<_> = scanned.iter().map(|&p| (p, 1.0)).collect();
        let mut probe = *self;
        for p in ScanParam::ALL {
            if probe.get(p).is_none() {
                probe.set(p, 1.0);
            }
        }
        if let Err(e) = probe.with(&placeholder) {
            out.push(e.to_string());
        }
        out
    }
}

/// A validated scan description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    fixed: FixedParams,
    axis1: Axis,
    axis2: Option<Axis>,
    quantities: Vec<Observable>,
}

impl ScanSpec {
    /// Validates every field and reports all problems at once.
    pub fn new(fixed: FixedParams, axis1: Axis, axis2: Option<Axis>, quantities: Vec<Observable>) -> Result<Self> {
        let mut problems = axis1.problems("axis1");
        let mut scanned = vec![axis1.param];
        if let Some(a2) = &axis2 {
            problems.extend(a2.problems("axis2"));
            if a2.param == axis1.param {
                problems.push(format!("axis1 and axis2 both scan {}", a2.param));
            } else {
                scanned.push(a2.param);
            }
        }
        problems.extend(fixed.problems(&scanned));
        if quantities.is_empty() {
            problems.push("no quantities requested".to_string());
        }
        if problems.is_empty() {
            Ok(ScanSpec {
                fixed,
                axis1,
                axis2,
                quantities,
            })
        } else {
            Err(Error::InvalidScanSpec(problems))
        }
    }

    pub fn grid(fixed: FixedParams, axis1: Axis, axis2: Axis, quantities: Vec<Observable>) -> Result<Self> {
        Self::new(fixed, axis1, Some(axis2), quantities)
    }

    pub fn line(fixed: FixedParams, axis: Axis, quantities: Vec<Observable>) -> Result<Self> {
        Self::new(fixed, axis, None, quantities)
    }

    pub fn fixed(&self) -> &FixedParams {
        &self.fixed
    }

    pub fn axis1(&self) -> &Axis {
        &self.axis1
    }

    pub fn axis2(&self) -> Option<&Axis> {
        self.axis2.as_ref()
    }

    pub fn quantities(&self) -> &[Observable] {
        &self.quantities
    }

    pub fn is_grid(&self) -> bool {
        self.axis2.is_some()
    }

    pub fn cell_count(&self) -> usize {
        self.axis1.points * self.axis2.map_or(1, |a| a.points)
    }

    /// The same scan with every axis refined to `2n - 1` points.
    pub fn refined(&self) -> ScanSpec {
        ScanSpec {
            axis1: self.axis1.refined(),
            axis2: self.axis2.map(|a| a.refined()),
            ..self.clone()
        }
    }

    fn params_at(&self, i: usize, j: Option<usize>) -> EngineParams {
        let mut assignments = vec![(self.axis1.param, self.axis1.value(i))];
        if let (Some(a2), Some(j)) = (&self.axis2, j) {
            assignments.push((a2.param, a2.value(j)));
        }
        // Validation guarantees every coordinate forms valid parameters.
        self.fixed.with(&assignments).expect("validated scan spec")
    }
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    /// Axis indices `(i, j)`; `j` is zero on lines.
    pub index: (usize, usize),
    pub x: f64,
    pub y: Option<f64>,
    pub params: EngineParams,
    pub observables: CycleObservables,
    /// `None` where `<W> = 0`.
    pub tur: Option<TurEvaluation>,
}

impl ScanCell {
    pub fn evaluate(params: EngineParams, index: (usize, usize), x: f64, y: Option<f64>) -> Self {
        ScanCell {
            index,
            x,
            y,
            params,
            observables: cycle::observables(&params),
            tur: tur::verify_tur(&params).ok(),
        }
    }

    pub fn regime(&self) -> RegimeLabel {
        self.observables.regime
    }

    /// False for every non-engine cell; plotting masks on this.
    pub fn is_engine(&self) -> bool {
        self.observables.is_engine()
    }

    pub fn value(&self, o: Observable) -> Option<f64> {
        o.value(&self.observables, self.tur.as_ref())
    }
}

/// Result of [`run_grid`] or [`run_line`]. Cells are row-major: the axis-1
/// index varies slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    spec: ScanSpec,
    cells: Vec<ScanCell>,
}

impl ScanGrid {
    pub fn spec(&self) -> &ScanSpec {
        &self.spec
    }

    pub fn cells(&self) -> &[ScanCell] {
        &self.cells
    }

    /// `(axis1 points, axis2 points)`; the second is 1 for lines.
    pub fn shape(&self) -> (usize, usize) {
        (self.spec.axis1.points, self.spec.axis2.map_or(1, |a| a.points))
    }

    pub fn cell(&self, i: usize, j: usize) -> &ScanCell {
        let (_, cols) = self.shape();
        &self.cells[i * cols + j]
    }
}

fn evaluate_all(spec: &ScanSpec) -> Vec<ScanCell> {
    let cols = spec.axis2.map_or(1, |a| a.points);
    let eval = |flat: usize| {
        let (i, j) = (flat / cols, flat % cols);
        let y_index = spec.axis2.map(|_| j);
        let params = spec.params_at(i, y_index);
        ScanCell::evaluate(params, (i, j), spec.axis1.value(i), spec.axis2.map(|a| a.value(j)))
    };
    let n = spec.cell_count();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(eval).collect()
    }
}

/// Evaluates a two-axis scan.
pub fn run_grid(spec: &ScanSpec) -> Result<ScanGrid> {
    if !spec.is_grid() {
        return Err(Error::InvalidScanSpec(vec!["grid scan needs two axes".to_string()]));
    }
    Ok(ScanGrid {
        spec: spec.clone(),
        cells: evaluate_all(spec),
    })
}

/// Evaluates a one-axis scan, ordered by the axis.
pub fn run_line(spec: &ScanSpec) -> Result<ScanGrid> {
    if spec.is_grid() {
        return Err(Error::InvalidScanSpec(vec![
            "line scan takes exactly one axis".to_string()
        ]));
    }
    Ok(ScanGrid {
        spec: spec.clone(),
        cells: evaluate_all(spec),
    })
}

/// Exact cell counts per regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RegimeCensus {
    counts: [usize; RegimeLabel::ALL.len()],
    anomalous: usize,
}

impl RegimeCensus {
    pub fn count(&self, label: RegimeLabel) -> usize {
        self.counts[label.code() as usize]
    }

    /// Engine plus counter-rotating engine.
    pub fn engine_cells(&self) -> usize {
        self.count(RegimeLabel::Engine) + self.count(RegimeLabel::CounterRotatingEngine)
    }

    pub fn anomalous(&self) -> usize {
        self.anomalous
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (RegimeLabel, usize)> + '_ {
        RegimeLabel::ALL.into_iter().map(|l| (l, self.count(l)))
    }
}

pub fn regime_census(grid: &ScanGrid) -> RegimeCensus {
    let mut census = RegimeCensus::default();
    for cell in &grid.cells {
        census.counts[cell.regime().code() as usize] += 1;
        census.anomalous += usize::from(cell.observables.anomalous);
    }
    census
}

/// A 4-connected set of engine cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineComponent {
    /// Axis index pairs, row-major sorted.
    pub cells: Vec<(usize, usize)>,
    pub engine: usize,
    pub counter_rotating: usize,
}

impl EngineComponent {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Connected components of engine-labelled cells under 4-neighbour adjacency,
/// in order of their first cell.
pub fn engine_components(grid: &ScanGrid) -> Vec<EngineComponent> {
    let (rows, cols) = grid.shape();
    let mut seen = vec![false; rows * cols];
    let mut components = Vec::new();
    for start in 0..rows * cols {
        if seen[start] || !grid.cells[start].is_engine() {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(flat) = queue.pop_front() {
            members.push(flat);
            let (i, j) = (flat / cols, flat % cols);
            let neighbours = [
                (i > 0).then(|| flat - cols),
                (i + 1 < rows).then(|| flat + cols),
                (j > 0).then(|| flat - 1),
                (j + 1 < cols).then(|| flat + 1),
            ];
            for n in neighbours.into_iter().flatten() {
                if !seen[n] && grid.cells[n].is_engine() {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        members.sort_unstable();
        let engine = members
            .iter()
            .filter(|&&f| grid.cells[f].regime() == RegimeLabel::Engine)
            .count();
        components.push(EngineComponent {
            counter_rotating: members.len() - engine,
            engine,
            cells: members.into_iter().map(|f| (f / cols, f % cols)).collect(),
        });
    }
    components
}

/// `n` seeded random points from the box `J ∈ [0, 10]`, `h_i ∈ [1, 5]`,
/// `h_f ∈ (h_i, 8]`, with both temperatures log-uniform on `[1e-2, 1e2]`.
pub fn random_points(seed: u64, n: usize) -> Vec<EngineParams> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |lo: f64, hi: f64| {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    };
    (0..n)
        .map(|_| {
            let j = uniform(0.0, 10.0);
            let hi = uniform(1.0, 5.0);
            let hf = 8.0 - uniform(0.0, 8.0 - hi);
            let tc = 10f64.powf(uniform(-2.0, 2.0));
            let th = 10f64.powf(uniform(-2.0, 2.0));
            EngineParams::new(j, hi, hf, tc, th).expect("box points are valid")
        })
        .collect()
}
