//! The two-spin Heisenberg working substance.
//!
//! Hamiltonian `H = J S1·S2 + h (S1z + S2z) - J/4`, whose eigenbasis does not
//! depend on the field. Energies are `+h`, `0`, `-J`, `-h`; the `0` and `-J`
//! levels are idle (they do not move with `h`). Units have `k_B = ħ = 1` and a
//! unit magnetic moment.
//!
//! Every array in this crate indexed by level uses the order of [`Level::ALL`]:
//! `(+h, 0, -J, -h)`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const LEVEL_COUNT: usize = 4;

/// `∂E_n/∂h` for each level, in canonical order.
pub const FIELD_SLOPES: [f64; LEVEL_COUNT] = [1.0, 0.0, 0.0, -1.0];

/// Energy eigenstates of the spin pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Level {
    /// `|11>`, energy `+h`.
    UpUp,
    /// `(|01> + |10>)/√2`, energy `0`.
    Triplet,
    /// `(|01> - |10>)/√2`, energy `-J`.
    Singlet,
    /// `|00>`, energy `-h`.
    DownDown,
}

impl Level {
    pub const ALL: [Level; LEVEL_COUNT] = [Level::UpUp, Level::Triplet, Level::Singlet, Level::DownDown];

    pub fn index(self) -> usize {
        match self {
            Level::UpUp => 0,
            Level::Triplet => 1,
            Level::Singlet => 2,
            Level::DownDown => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Level> {
        Level::ALL.get(index).copied()
    }

    pub fn energy(self, field: f64, coupling: f64) -> f64 {
        match self {
            Level::UpUp => field,
            Level::Triplet => 0.0,
            Level::Singlet => -coupling,
            Level::DownDown => -field,
        }
    }

    pub fn field_slope(self) -> f64 {
        FIELD_SLOPES[self.index()]
    }

    /// Idle levels keep their energy when the field changes.
    pub fn is_idle(self) -> bool {
        self.field_slope() == 0.0
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::UpUp => "11",
            Level::Triplet => "T0",
            Level::Singlet => "S",
            Level::DownDown => "00",
        }
    }
}

/// Level energies `(+h, 0, -J, -h)` at field `h` and coupling `J`.
pub fn energies(field: f64, coupling: f64) -> [f64; LEVEL_COUNT] {
    Level::ALL.map(|level| level.energy(field, coupling))
}

/// The spin pair at a fixed coupling `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPairModel {
    pub coupling: f64,
}

impl SpinPairModel {
    pub fn new(coupling: f64) -> Self {
        SpinPairModel { coupling }
    }

    pub fn energies(&self, field: f64) -> [f64; LEVEL_COUNT] {
        energies(field, self.coupling)
    }

    pub fn thermal_point(&self, beta: f64, field: f64) -> Result<ThermalPoint> {
        ThermalPoint::new(beta, field, self.coupling)
    }
}

/// Gibbs equilibrium of the spin pair at inverse temperature `beta`.
///
/// Populations are computed from Boltzmann weights shifted by the largest
/// exponent, so `beta` may be very large without overflow. The partition
/// function itself is kept as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalPoint {
    beta: f64,
    field: f64,
    coupling: f64,
    populations: [f64; LEVEL_COUNT],
    ln_partition: f64,
}

impl ThermalPoint {
    pub fn new(beta: f64, field: f64, coupling: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::invalid(
                "beta",
                format!("must be positive and finite, got {beta}"),
            ));
        }
        if !field.is_finite() {
            return Err(Error::invalid("h", format!("must be finite, got {field}")));
        }
        if !coupling.is_finite() {
            return Err(Error::invalid("J", format!("must be finite, got {coupling}")));
        }

        let exponents = energies(field, coupling).map(|e| -beta * e);
        let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights = exponents.map(|a| (a - shift).exp());
        let total: f64 = weights.iter().sum();
        let populations = weights.map(|w| w / total);

        Ok(ThermalPoint {
            beta,
            field,
            coupling,
            populations,
            ln_partition: shift + total.ln(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Dimensionless `βh`.
    pub fn x(&self) -> f64 {
        self.beta * self.field
    }

    pub fn populations(&self) -> &[f64; LEVEL_COUNT] {
        &self.populations
    }

    pub fn population(&self, level: Level) -> f64 {
        self.populations[level.index()]
    }

    pub fn ln_partition_function(&self) -> f64 {
        self.ln_partition
    }

    /// `Z`; overflows to infinity for extreme `β·max(|h|, J)`.
    pub fn partition_function(&self) -> f64 {
        self.ln_partition.exp()
    }

    /// Helmholtz free energy `F = -T ln Z`.
    pub fn free_energy(&self) -> f64 {
        -self.ln_partition / self.beta
    }

    pub fn mean_energy(&self) -> f64 {
        energies(self.field, self.coupling)
            .iter()
            .zip(&self.populations)
            .map(|(e, p)| e * p)
            .sum()
    }

    /// Population `p^J` of the idle `-J` level.
    pub fn idle_population(&self) -> f64 {
        self.population(Level::Singlet)
    }

    /// `1 - p^J`, summed from the other populations so it keeps full relative
    /// precision when the idle level is nearly fully occupied.
    pub fn idle_deficit(&self) -> f64 {
        let p = &self.populations;
        p[0] + p[1] + p[3]
    }

    /// `1 - <M>`, accurate when the magnetization is close to saturation.
    pub fn magnetization_deficit(&self) -> f64 {
        let p = &self.populations;
        2.0 * p[0] + p[1] + p[2]
    }

    pub fn magnetic_observables(&self) -> MagneticObservables {
        magnetic_observables(self)
    }
}

/// `b - a` for two quantities in `[0, 1]`, given their complements to one.
/// Near one the complements are subtracted instead, avoiding cancellation.
pub(crate) fn stable_difference(a: f64, a_deficit: f64, b: f64, b_deficit: f64) -> f64 {
    if a > 0.5 && b > 0.5 {
        a_deficit - b_deficit
    } else {
        b - a
    }
}

pub fn thermal_point(beta: f64, field: f64, coupling: f64) -> Result<ThermalPoint> {
    ThermalPoint::new(beta, field, coupling)
}

/// `1 + e^{βJ} + 2 cosh(βh)` evaluated directly. Overflows for large arguments;
/// [`ThermalPoint::ln_partition_function`] does not.
pub fn closed_form_partition_function(beta: f64, field: f64, coupling: f64) -> f64 {
    1.0 + (beta * coupling).exp() + 2.0 * (beta * field).cosh()
}

/// Equilibrium magnetic response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticObservables {
    /// `<M> = -Σ p_n ∂E_n/∂h`.
    pub mean_m: f64,
    /// `σ²_M`.
    pub var_m: f64,
    /// `χ = ∂<M>/∂h`; the curvature term `Σ p_n ∂²E_n/∂h²` is zero here.
    pub chi: f64,
    /// Population of the `-J` level.
    pub idle_pop: f64,
}

pub fn magnetic_observables(tp: &ThermalPoint) -> MagneticObservables {
    let p = &tp.populations;
    let mean_m: f64 = -p.iter().zip(FIELD_SLOPES).map(|(p, s)| p * s).sum::<f64>();

    // Susceptibility from the centered second moment of -∂H/∂h.
    let centered: f64 = p.iter().zip(FIELD_SLOPES).map(|(p, s)| p * (-s - mean_m).powi(2)).sum();
    let chi = tp.beta * centered;

    // Variance from the pairwise form Σ_{n<m} p_n p_m (s_n - s_m)², which equals
    // <M²> - <M>² without the cancellation of the raw-moment difference.
    let mut var_m = 0.0;
    for n in 0..LEVEL_COUNT {
        for m in (n + 1)..LEVEL_COUNT {
            var_m += p[n] * p[m] * (FIELD_SLOPES[n] - FIELD_SLOPES[m]).powi(2);
        }
    }

    MagneticObservables {
        mean_m,
        var_m,
        chi,
        idle_pop: tp.idle_population(),
    }
}
