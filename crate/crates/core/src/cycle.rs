//! Closed-form observables of the four-stroke Otto cycle.
//!
//! Strokes: (1) field `h_i -> h_f` starting from equilibrium with the cold
//! bath, (2) thermalization with the hot bath at `h_f`, (3) field
//! `h_f -> h_i`, (4) thermalization with the cold bath at `h_i`.
//!
//! Sign convention: work and heat are counted as energy *received* by the
//! spins, so `<W> < 0` means work is extracted and a positive heat is absorbed
//! from the corresponding bath.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{stable_difference, MagneticObservables, ThermalPoint};

/// `|<W>|` at or below this is treated as zero work.
pub const DEGENERATE_WORK: f64 = 1e-14;

/// One Otto cycle: coupling, the two fields and the two bath temperatures.
///
/// The hot/cold names follow the stroke order, not the temperature order:
/// `t_hot` is the bath met after the field is raised. Either may be larger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineParams {
    coupling: f64,
    h_initial: f64,
    h_final: f64,
    t_cold: f64,
    t_hot: f64,
}

impl EngineParams {
    pub fn new(coupling: f64, h_initial: f64, h_final: f64, t_cold: f64, t_hot: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::invalid("J", format!("must be finite, got {coupling}")));
        }
        for (field, value) in [("h_i", h_initial), ("h_f", h_final)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(
                    field,
                    format!("must be positive and finite, got {value}"),
                ));
            }
        }
        if h_initial == h_final {
            return Err(Error::invalid(
                "h_f",
                format!("must differ from h_i (both {h_initial})"),
            ));
        }
        for (field, value) in [("T_c", t_cold), ("T_h", t_hot)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(
                    field,
                    format!("must be positive and finite, got {value}"),
                ));
            }
        }
        Ok(EngineParams {
            coupling,
            h_initial,
            h_final,
            t_cold,
            t_hot,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn h_initial(&self) -> f64 {
        self.h_initial
    }

    pub fn h_final(&self) -> f64 {
        self.h_final
    }

    pub fn t_cold(&self) -> f64 {
        self.t_cold
    }

    pub fn t_hot(&self) -> f64 {
        self.t_hot
    }

    pub fn beta_cold(&self) -> f64 {
        1.0 / self.t_cold
    }

    pub fn beta_hot(&self) -> f64 {
        1.0 / self.t_hot
    }

    /// `Δh = h_f - h_i`.
    pub fn delta_h(&self) -> f64 {
        self.h_final - self.h_initial
    }

    /// `x_c = β_c h_i`.
    pub fn x_cold(&self) -> f64 {
        self.h_initial / self.t_cold
    }

    /// `x_h = β_h h_f`.
    pub fn x_hot(&self) -> f64 {
        self.h_final / self.t_hot
    }

    /// Equilibrium with the cold bath at `h_i`, the state before stroke 1.
    pub fn cold_point(&self) -> ThermalPoint {
        ThermalPoint::new(self.beta_cold(), self.h_initial, self.coupling).expect("validated parameters")
    }

    /// Equilibrium with the hot bath at `h_f`, the state before stroke 3.
    pub fn hot_point(&self) -> ThermalPoint {
        ThermalPoint::new(self.beta_hot(), self.h_final, self.coupling).expect("validated parameters")
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(coupling, self.h_initial, self.h_final, self.t_cold, self.t_hot)
    }

    pub fn with_t_cold(&self, t_cold: f64) -> Result<Self> {
        Self::new(self.coupling, self.h_initial, self.h_final, t_cold, self.t_hot)
    }

    pub fn with_t_hot(&self, t_hot: f64) -> Result<Self> {
        Self::new(self.coupling, self.h_initial, self.h_final, self.t_cold, t_hot)
    }
}

/// Closed-form equilibrium ratios at one bath, from the explicit partition
/// function `Z = 1 + e^{βJ} + 2 cosh x` rescaled by its largest term.
#[derive(Debug, Clone, Copy)]
struct ClosedForm {
    /// `2 sinh(x)/Z`, the magnetization.
    sinh_ratio: f64,
    /// `1 - 2 sinh(x)/Z`.
    sinh_deficit: f64,
    /// `2 cosh(x)/Z`.
    cosh_ratio: f64,
    /// `e^{βJ}/Z`, the idle population.
    idle: f64,
    /// `1 - e^{βJ}/Z`.
    idle_deficit: f64,
}

impl ClosedForm {
    fn new(beta: f64, field: f64, coupling: f64) -> Self {
        let x = beta * field;
        let bj = beta * coupling;
        let shift = 0.0f64.max(bj).max(x.abs());
        let one = (-shift).exp();
        let up = (x - shift).exp();
        let down = (-x - shift).exp();
        let idle = (bj - shift).exp();
        let z = one + idle + up + down;
        ClosedForm {
            sinh_ratio: (up - down) / z,
            sinh_deficit: (one + idle + 2.0 * down) / z,
            cosh_ratio: (up + down) / z,
            idle: idle / z,
            idle_deficit: (one + up + down) / z,
        }
    }

    fn cold(p: &EngineParams) -> Self {
        Self::new(p.beta_cold(), p.h_initial, p.coupling)
    }

    fn hot(p: &EngineParams) -> Self {
        Self::new(p.beta_hot(), p.h_final, p.coupling)
    }
}

/// `<M_h^f> - <M_c^i>` from the closed forms.
fn magnetization_gap(cold: &ClosedForm, hot: &ClosedForm) -> f64 {
    stable_difference(cold.sinh_ratio, cold.sinh_deficit, hot.sinh_ratio, hot.sinh_deficit)
}

/// `p_h^J - p_c^J` from the closed forms.
fn idle_gap(cold: &ClosedForm, hot: &ClosedForm) -> f64 {
    stable_difference(cold.idle, cold.idle_deficit, hot.idle, hot.idle_deficit)
}

/// Mean work per unitary stroke and in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanWork {
    pub stroke1: f64,
    pub stroke2: f64,
    pub total: f64,
}

/// `<W1> = -2Δh sinh(x_c)/Z_c`, `<W2> = +2Δh sinh(x_h)/Z_h`.
pub fn mean_work(p: &EngineParams) -> MeanWork {
    let dh = p.delta_h();
    let (cold, hot) = (ClosedForm::cold(p), ClosedForm::hot(p));
    MeanWork {
        stroke1: -dh * cold.sinh_ratio,
        stroke2: dh * hot.sinh_ratio,
        total: dh * magnetization_gap(&cold, &hot),
    }
}

/// `<W> = Δh (<M_h^f> - <M_c^i>)` from the two equilibrium magnetizations.
pub fn mean_work_from_magnetization(p: &EngineParams) -> f64 {
    p.delta_h() * magnetization_gap_thermal(&p.cold_point(), &p.hot_point())
}

fn magnetization_gap_thermal(cold: &ThermalPoint, hot: &ThermalPoint) -> f64 {
    stable_difference(
        cold.magnetic_observables().mean_m,
        cold.magnetization_deficit(),
        hot.magnetic_observables().mean_m,
        hot.magnetization_deficit(),
    )
}

fn magnetic_pair(p: &EngineParams) -> (MagneticObservables, MagneticObservables) {
    (
        p.cold_point().magnetic_observables(),
        p.hot_point().magnetic_observables(),
    )
}

/// Work variance per stroke and in total. The strokes are uncorrelated because
/// each starts from a full thermalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkVariance {
    pub stroke1: f64,
    pub stroke2: f64,
    pub total: f64,
}

/// `σ²_{W_α} = (Δh)² σ²_{M_α}` with the magnetization variance of the
/// equilibrium state preceding the stroke.
pub fn work_variance(p: &EngineParams) -> WorkVariance {
    let dh2 = p.delta_h().powi(2);
    let (cold, hot) = magnetic_pair(p);
    let stroke1 = dh2 * cold.var_m;
    let stroke2 = dh2 * hot.var_m;
    WorkVariance {
        stroke1,
        stroke2,
        total: stroke1 + stroke2,
    }
}

/// `(Δh)² [2cosh(x)/Z - 4sinh²(x)/Z²]` per stroke, evaluated literally.
pub fn work_variance_closed_form(p: &EngineParams) -> WorkVariance {
    let dh2 = p.delta_h().powi(2);
    let per_stroke = |beta: f64, field: f64| {
        let cf = ClosedForm::new(beta, field, p.coupling);
        dh2 * (cf.cosh_ratio - cf.sinh_ratio * cf.sinh_ratio)
    };
    let stroke1 = per_stroke(p.beta_cold(), p.h_initial);
    let stroke2 = per_stroke(p.beta_hot(), p.h_final);
    WorkVariance {
        stroke1,
        stroke2,
        total: stroke1 + stroke2,
    }
}

/// `(Δh)² (T_c χ_c + T_h χ_h)`.
pub fn work_variance_from_susceptibility(p: &EngineParams) -> f64 {
    let (cold, hot) = magnetic_pair(p);
    p.delta_h().powi(2) * (p.t_cold * cold.chi + p.t_hot * hot.chi)
}

/// Mean heat absorbed from each bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanHeat {
    /// From the bath at `T_h` (stroke 2).
    pub hot: f64,
    /// From the bath at `T_c` (stroke 4).
    pub cold: f64,
}

/// `<Q_h> = J (p_c^J - p_h^J) - (h_f/Δh) <W>`; `<Q_c>` closes the energy balance.
pub fn mean_heat(p: &EngineParams) -> MeanHeat {
    let w = mean_work(p).total;
    let (cold, hot) = (ClosedForm::cold(p), ClosedForm::hot(p));
    let hot = -p.coupling * idle_gap(&cold, &hot) - p.h_final / p.delta_h() * w;
    MeanHeat { hot, cold: -w - hot }
}

/// Efficiencies of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiency {
    /// `-<W>/<Q_h>`; `None` when `<Q_h> = 0`.
    pub thermodynamic: Option<f64>,
    /// Bare Otto value `1 - h_i/h_f`.
    pub otto: f64,
    /// `1 - min(T)/max(T)`.
    pub carnot: f64,
    /// `(p_h^J - p_c^J) / (<M_h^f> - <M_c^i>)`; `None` when the magnetizations coincide.
    pub omega: Option<f64>,
    /// Extracted work over heat drawn from whichever bath is hotter. Equals
    /// `thermodynamic` when `T_h >= T_c`; for the counter-rotating engine the
    /// heat input is `<Q_c>`. `None` when that heat is zero.
    pub engine: Option<f64>,
}

pub fn otto_efficiency(p: &EngineParams) -> f64 {
    1.0 - p.h_initial / p.h_final
}

pub fn carnot_efficiency(p: &EngineParams) -> f64 {
    1.0 - p.t_cold.min(p.t_hot) / p.t_cold.max(p.t_hot)
}

/// `Ω`, or `None` when `ΔM = 0`.
pub fn omega(p: &EngineParams) -> Option<f64> {
    let (cold, hot) = (p.cold_point(), p.hot_point());
    let dm = magnetization_gap_thermal(&cold, &hot);
    let dp = stable_difference(
        cold.idle_population(),
        cold.idle_deficit(),
        hot.idle_population(),
        hot.idle_deficit(),
    );
    let value = dp / dm;
    (dm != 0.0 && value.is_finite()).then_some(value)
}

pub fn efficiency(p: &EngineParams) -> Efficiency {
    let w = mean_work(p).total;
    let heat = mean_heat(p);
    let otto = otto_efficiency(p);
    let omega = omega(p);

    let thermodynamic = (heat.hot != 0.0).then(|| {
        // Prefer η_0 / (1 + (J/h_f) Ω); fall back to the plain ratio where Ω
        // does not exist or the denominator vanishes.
        match omega {
            Some(om) => {
                let denom = 1.0 + p.coupling / p.h_final * om;
                let value = otto / denom;
                if denom != 0.0 && value.is_finite() {
                    value
                } else {
                    -w / heat.hot
                }
            }
            None => -w / heat.hot,
        }
    });

    let heat_in = if p.t_hot >= p.t_cold { heat.hot } else { heat.cold };
    let engine = (heat_in != 0.0).then(|| -w / heat_in);

    Efficiency {
        thermodynamic,
        otto,
        carnot: carnot_efficiency(p),
        omega,
        engine,
    }
}

/// `-<W>/<Q_h>`, or `None` when `<Q_h> = 0`.
pub fn efficiency_ratio_form(p: &EngineParams) -> Option<f64> {
    let heat = mean_heat(p);
    (heat.hot != 0.0).then(|| -mean_work(p).total / heat.hot)
}

/// Mean entropy production per cycle, `-β_h <Q_h> - β_c <Q_c>`: the entropy
/// gained by both baths. Valid for either temperature ordering.
pub fn entropy_production(p: &EngineParams) -> f64 {
    let heat = mean_heat(p);
    -p.beta_hot() * heat.hot - p.beta_cold() * heat.cold
}

/// `β_c <Q_h> (η_C - η_th)`, the same quantity written with efficiencies.
/// Only meaningful for `T_h >= T_c`; `None` otherwise or when `η_th` is undefined.
pub fn entropy_production_efficiency_form(p: &EngineParams) -> Option<f64> {
    if p.t_hot < p.t_cold {
        return None;
    }
    let eff = efficiency(p);
    let eta = eff.thermodynamic?;
    Some(p.beta_cold() * mean_heat(p).hot * (eff.carnot - eta))
}

/// Operating mode of the cycle.
///
/// Decision table (heats counted into the spins, "hotter"/"colder" by actual
/// temperature; the `T_h` bath counts as hotter on a tie):
///
/// | `<W>`        | condition                                   | label                    |
/// |--------------|---------------------------------------------|--------------------------|
/// | `|<W>|≤1e-14`| –                                           | `Degenerate`             |
/// | `< 0`        | `T_h > T_c`                                 | `Engine`                 |
/// | `< 0`        | `T_c > T_h`                                 | `CounterRotatingEngine`  |
/// | `> 0`        | heat drawn from the colder bath `> 0`       | `Refrigerator`           |
/// | `> 0`        | heat drawn from the hotter bath `> 0`       | `Accelerator`            |
/// | `> 0`        | otherwise (both baths receive heat)         | `Heater`                 |
///
/// Net extraction with `T_c = T_h`, or without heat drawn from the hotter bath,
/// would break the second law and is labelled `Degenerate` with
/// [`CycleObservables::anomalous`] set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegimeLabel {
    Engine,
    CounterRotatingEngine,
    Refrigerator,
    Heater,
    Accelerator,
    Degenerate,
}

impl RegimeLabel {
    pub const ALL: [RegimeLabel; 6] = [
        RegimeLabel::Engine,
        RegimeLabel::CounterRotatingEngine,
        RegimeLabel::Refrigerator,
        RegimeLabel::Heater,
        RegimeLabel::Accelerator,
        RegimeLabel::Degenerate,
    ];

    /// Net work extraction, in either rotation sense.
    pub fn is_engine(self) -> bool {
        matches!(self, RegimeLabel::Engine | RegimeLabel::CounterRotatingEngine)
    }

    pub fn name(self) -> &'static str {
        match self {
            RegimeLabel::Engine => "engine",
            RegimeLabel::CounterRotatingEngine => "counter-rotating-engine",
            RegimeLabel::Refrigerator => "refrigerator",
            RegimeLabel::Heater => "heater",
            RegimeLabel::Accelerator => "accelerator",
            RegimeLabel::Degenerate => "degenerate",
        }
    }

    /// Small integer code, stable across versions.
    pub fn code(self) -> u8 {
        match self {
            RegimeLabel::Engine => 0,
            RegimeLabel::CounterRotatingEngine => 1,
            RegimeLabel::Refrigerator => 2,
            RegimeLabel::Heater => 3,
            RegimeLabel::Accelerator => 4,
            RegimeLabel::Degenerate => 5,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn classify(p: &EngineParams, w: f64, heat: MeanHeat) -> (RegimeLabel, bool) {
    if w.abs() <= DEGENERATE_WORK {
        return (RegimeLabel::Degenerate, false);
    }
    let hot_is_t_h = p.t_hot >= p.t_cold;
    let (from_hotter, from_colder) = if hot_is_t_h {
        (heat.hot, heat.cold)
    } else {
        (heat.cold, heat.hot)
    };

    if w < 0.0 {
        if p.t_hot == p.t_cold || from_hotter <= 0.0 {
            return (RegimeLabel::Degenerate, true);
        }
        let label = if hot_is_t_h {
            RegimeLabel::Engine
        } else {
            RegimeLabel::CounterRotatingEngine
        };
        return (label, false);
    }

    let label = if from_colder > 0.0 {
        RegimeLabel::Refrigerator
    } else if from_hotter > 0.0 {
        RegimeLabel::Accelerator
    } else {
        RegimeLabel::Heater
    };
    (label, false)
}

pub fn classify_regime(p: &EngineParams) -> RegimeLabel {
    classify(p, mean_work(p).total, mean_heat(p)).0
}

/// Every closed-form observable of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleObservables {
    pub mean_w1: f64,
    pub mean_w2: f64,
    pub mean_w: f64,
    pub var_w1: f64,
    pub var_w2: f64,
    pub var_w: f64,
    pub mean_qh: f64,
    pub mean_qc: f64,
    pub eta_th: Option<f64>,
    pub eta_0: f64,
    pub eta_c: f64,
    pub eta_engine: Option<f64>,
    pub omega: Option<f64>,
    pub mean_sigma: f64,
    /// `|σ_W / <W>|`; `None` when `<W> = 0`.
    pub rel_fluct_w: Option<f64>,
    pub regime: RegimeLabel,
    /// Net extraction that the heat flows cannot support; see [`RegimeLabel`].
    pub anomalous: bool,
}

impl CycleObservables {
    pub fn sigma_w(&self) -> f64 {
        self.var_w.sqrt()
    }

    pub fn is_engine(&self) -> bool {
        self.regime.is_engine()
    }
}

pub fn observables(p: &EngineParams) -> CycleObservables {
    let work = mean_work(p);
    let var = work_variance(p);
    let heat = mean_heat(p);
    let eff = efficiency(p);
    let (regime, anomalous) = classify(p, work.total, heat);
    let rel_fluct_w = (work.total != 0.0).then(|| (var.total.sqrt() / work.total).abs());

    CycleObservables {
        mean_w1: work.stroke1,
        mean_w2: work.stroke2,
        mean_w: work.total,
        var_w1: var.stroke1,
        var_w2: var.stroke2,
        var_w: var.total,
        mean_qh: heat.hot,
        mean_qc: heat.cold,
        eta_th: eff.thermodynamic,
        eta_0: eff.otto,
        eta_c: eff.carnot,
        eta_engine: eff.engine,
        omega: eff.omega,
        mean_sigma: -p.beta_hot() * heat.hot - p.beta_cold() * heat.cold,
        rel_fluct_w,
        regime,
        anomalous,
    }
}

/// Limits for `T_c -> 0`, `T_h -> ∞` with `0 <= J < h_i < h_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticLimits {
    /// `-Δh`.
    pub mean_w: f64,
    /// `(Δh)²/2`.
    pub var_w: f64,
    /// `1/√2`.
    pub coefficient_of_variation: f64,
    /// `η_0 / (1 - J/4h_f)`.
    pub eta_th: f64,
    /// `η_0² / (2 (1 - J/4h_f)²)`.
    pub var_eta: f64,
}

pub fn asymptotic_limits(coupling: f64, h_initial: f64, h_final: f64) -> Result<AsymptoticLimits> {
    if !(coupling.is_finite() && h_initial.is_finite() && h_final.is_finite()) {
        return Err(Error::invalid("J, h_i, h_f", "must be finite"));
    }
    if coupling < 0.0 {
        return Err(Error::invalid("J", format!("requires 0 <= J, got {coupling}")));
    }
    if coupling >= h_initial {
        return Err(Error::invalid(
            "J",
            format!("requires J < h_i, got J={coupling}, h_i={h_initial}"),
        ));
    }
    if h_initial >= h_final {
        return Err(Error::invalid(
            "h_f",
            format!("requires h_i < h_f, got h_i={h_initial}, h_f={h_final}"),
        ));
    }
    let dh = h_final - h_initial;
    let eta_0 = 1.0 - h_initial / h_final;
    let factor = 1.0 - coupling / (4.0 * h_final);
    Ok(AsymptoticLimits {
        mean_w: -dh,
        var_w: dh * dh / 2.0,
        coefficient_of_variation: std::f64::consts::FRAC_1_SQRT_2,
        eta_th: eta_0 / factor,
        var_eta: eta_0 * eta_0 / (2.0 * factor * factor),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> EngineParams {
        EngineParams::new(2.0, 3.0, 4.0, 1.0, 5.0).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(matches!(
            EngineParams::new(1.0, 3.0, 3.0, 1.0, 2.0),
            Err(Error::InvalidParameter { field: "h_f", .. })
        ));
        assert!(EngineParams::new(1.0, 0.0, 3.0, 1.0, 2.0).is_err());
        assert!(EngineParams::new(1.0, 3.0, 4.0, -1.0, 2.0).is_err());
        assert!(EngineParams::new(1.0, 3.0, 4.0, 1.0, f64::INFINITY).is_err());
        assert!(EngineParams::new(f64::NAN, 3.0, 4.0, 1.0, 2.0).is_err());
        // T_c > T_h is allowed, and so is J < 0.
        assert!(EngineParams::new(-1.0, 3.0, 4.0, 5.0, 1.0).is_ok());
    }

    // Expected values below come from summing the 16 TPM trajectories at
    // 40-digit precision (independent of the closed forms).
    #[test]
    fn reference_point_values() {
        let o = observables(&reference());
        assert_relative_eq!(o.mean_w, -0.35862679491982108, max_relative = 1e-12);
        assert_relative_eq!(o.var_w, 0.61205039476900527, max_relative = 1e-12);
        assert_relative_eq!(o.mean_qh, 1.3751168318189072, max_relative = 1e-12);
        assert_relative_eq!(o.eta_th.unwrap(), 0.26079732763175834, max_relative = 1e-12);
        assert_relative_eq!(o.mean_sigma, 0.74146667053530468, max_relative = 1e-12);
        assert_eq!(o.eta_0, 0.25);
        assert_relative_eq!(o.eta_c, 0.8, max_relative = 1e-15);
        assert_eq!(o.regime, RegimeLabel::Engine);
        assert!(!o.anomalous);
        assert!(o.eta_th.unwrap() > o.eta_0);
    }

    #[test]
    fn zero_work_when_scaled_temperatures_match() {
        // x_c = x_h with J = 0: T_h = T_c h_f / h_i.
        let p = EngineParams::new(0.0, 2.0, 4.0, 1.0, 2.0).unwrap();
        let o = observables(&p);
        assert!(o.mean_w.abs() <= 1e-15);
        assert!(o.mean_qh.abs() <= 1e-14);
        assert!(o.mean_sigma.abs() <= 1e-14);
        assert_eq!(o.regime, RegimeLabel::Degenerate);
    }

    #[test]
    fn equal_temperatures_never_extract_work() {
        for j in [0.0, 1.0, 2.5, 5.0] {
            let p = EngineParams::new(j, 3.0, 4.0, 2.0, 2.0).unwrap();
            let o = observables(&p);
            assert!(o.mean_w >= 0.0);
            assert_relative_eq!(o.mean_sigma, o.mean_w / 2.0, max_relative = 1e-10);
            assert!(!o.is_engine());
        }
    }

    #[test]
    fn uncoupled_efficiency_is_otto() {
        for (tc, th) in [(1.0, 5.0), (0.3, 20.0), (4.0, 2.0)] {
            let p = EngineParams::new(0.0, 3.0, 4.0, tc, th).unwrap();
            let e = efficiency(&p);
            assert_relative_eq!(e.thermodynamic.unwrap(), 0.25, max_relative = 1e-12);
            let mw = mean_work(&p).total;
            assert_relative_eq!(mean_heat(&p).hot, -(4.0 / 1.0) * mw, max_relative = 1e-12);
        }
    }

    #[test]
    fn asymptotic_limits_values() {
        let lim = asymptotic_limits(0.0, 3.0, 4.0).unwrap();
        assert_eq!(lim.eta_th, 0.25);
        assert_relative_eq!(lim.coefficient_of_variation, std::f64::consts::FRAC_1_SQRT_2);
        let lim = asymptotic_limits(2.0, 3.0, 4.0).unwrap();
        assert_relative_eq!(lim.eta_th, 0.25 / (1.0 - 2.0 / 16.0), max_relative = 1e-15);
        assert_eq!(lim.mean_w, -1.0);
        assert_eq!(lim.var_w, 0.5);

        // The full formulas at extreme temperatures approach the limits.
        let p = EngineParams::new(2.0, 3.0, 4.0, 1e-6, 1e6).unwrap();
        let o = observables(&p);
        assert!((o.mean_w - lim.mean_w).abs() < 1e-3);
        assert!((o.var_w - lim.var_w).abs() < 1e-3);
        assert!((o.rel_fluct_w.unwrap() - lim.coefficient_of_variation).abs() < 1e-3);
        assert!((o.eta_th.unwrap() - lim.eta_th).abs() < 1e-3);

        assert!(asymptotic_limits(3.0, 3.0, 4.0).is_err());
        assert!(asymptotic_limits(-0.1, 3.0, 4.0).is_err());
        assert!(asymptotic_limits(1.0, 4.0, 3.0).is_err());
    }

    #[test]
    fn variance_vanishes_when_both_baths_freeze() {
        let p = EngineParams::new(2.0, 3.0, 4.0, 1e-3, 1e-3).unwrap();
        assert!(work_variance(&p).total < 1e-300);
    }

    #[test]
    fn counter_rotating_island() {
        let p = EngineParams::new(5.0, 3.0, 4.0, 5.0, 1e-4).unwrap();
        let o = observables(&p);
        assert_eq!(o.regime, RegimeLabel::CounterRotatingEngine);
        // Heat enters from the T_c bath, which is the hotter one here.
        assert!(o.mean_qc > 0.0 && o.mean_qh < 0.0);
        let eta = o.eta_engine.unwrap();
        assert!(eta > 0.0 && eta < o.eta_c);
        assert!(o.mean_sigma >= 0.0);
    }

    #[test]
    fn refrigerator_heater_accelerator() {
        let fridge = EngineParams::new(0.0, 3.0, 4.0, 1.0, 1.2).unwrap();
        assert_eq!(classify_regime(&fridge), RegimeLabel::Refrigerator);
        let accel = EngineParams::new(0.0, 3.0, 4.0, 1.4, 1.0).unwrap();
        assert_eq!(classify_regime(&accel), RegimeLabel::Accelerator);
        // Both baths heated needs the idle level: with J = 0 a consumed-work
        // cycle always pumps or leaks through the working levels alone.
        let heater = EngineParams::new(2.0, 3.0, 4.0, 1.4, 2.0).unwrap();
        assert_eq!(classify_regime(&heater), RegimeLabel::Heater);
        let h = mean_heat(&heater);
        assert!(h.hot < 0.0 && h.cold < 0.0);
    }

    #[test]
    fn entropy_forms_agree_for_normal_ordering() {
        let p = reference();
        let primary = entropy_production(&p);
        let secondary = entropy_production_efficiency_form(&p).unwrap();
        assert_relative_eq!(primary, secondary, max_relative = 1e-10);
        let swapped = EngineParams::new(2.0, 3.0, 4.0, 5.0, 1.0).unwrap();
        assert!(entropy_production_efficiency_form(&swapped).is_none());
    }

    #[test]
    fn work_variance_increases_with_temperature() {
        let temps: Vec<f64> = (0..400).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 399.0)).collect();
        for j in [0.0, 2.0, 5.0, 10.0] {
            let v1: Vec<f64> = temps
                .iter()
                .map(|&t| work_variance(&EngineParams::new(j, 3.0, 4.0, t, 5.0).unwrap()).stroke1)
                .collect();
            let v2: Vec<f64> = temps
                .iter()
                .map(|&t| work_variance(&EngineParams::new(j, 3.0, 4.0, 1.0, t).unwrap()).stroke2)
                .collect();
            // Below ~T=0.02 the variance underflows to exactly zero.
            for w in v1.windows(2).chain(v2.windows(2)) {
                assert!(w[1] > w[0] || (w[0] == 0.0 && w[1] == 0.0), "{w:?}");
            }
        }
    }

    fn arb_params() -> impl Strategy<Value = EngineParams> {
        (0.0f64..10.0, 1.0f64..5.0, 0.0f64..1.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(j, hi, frac, ltc, lth)| {
            let hf = hi + (8.0 - hi) * frac.max(1e-3);
            EngineParams::new(j, hi, hf, 10f64.powf(ltc), 10f64.powf(lth)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn work_dual_forms_agree(p in arb_params()) {
            let a = mean_work(&p).total;
            let b = mean_work_from_magnetization(&p);
            prop_assert!(close(a, b, 1e-12, 1e-14), "{a} vs {b}");
        }

        #[test]
        fn variance_fluctuation_identity(p in arb_params()) {
            let v = work_variance(&p);
            let literal = work_variance_closed_form(&p);
            let chi = work_variance_from_susceptibility(&p);
            prop_assert!(close(v.total, chi, 1e-12, 1e-14));
            prop_assert!(close(v.stroke1, literal.stroke1, 1e-12, 1e-14));
            prop_assert!(close(v.stroke2, literal.stroke2, 1e-12, 1e-14));
        }

        #[test]
        fn efficiency_duality(p in arb_params()) {
            let eff = efficiency(&p);
            if let (Some(eta), Some(ratio)) = (eff.thermodynamic, efficiency_ratio_form(&p)) {
                // Both forms divide by 1 + (J/h_f)Ω; near a root of that sum the
                // inputs' rounding is amplified by its condition number.
                let kappa = eff.omega.map_or(1.0, |om| {
                    let t = p.coupling / p.h_final * om;
                    1.0 + t.abs() / (1.0 + t).abs()
                });
                let rel = 1e-12f64.max(64.0 * f64::EPSILON * kappa);
                prop_assert!(close(eta, ratio, rel, 1e-14), "{eta} vs {ratio} (kappa {kappa})");
            }
        }

        #[test]
        fn first_and_second_law(p in arb_params()) {
            let o = observables(&p);
            prop_assert!((o.mean_w + o.mean_qh + o.mean_qc).abs() <= 1e-10);
            prop_assert!(o.mean_sigma >= -1e-12);
            prop_assert!(!o.anomalous);
            if o.is_engine() {
                let eta = o.eta_engine.unwrap();
                prop_assert!(eta > 0.0 && eta < o.eta_c);
            }
            if o.regime == RegimeLabel::Engine {
                let eta = o.eta_th.unwrap();
                prop_assert!(eta > 0.0 && eta < o.eta_c);
            }
        }
    }
}
