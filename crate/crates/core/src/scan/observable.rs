use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cycle::CycleObservables;
use crate::error::Error;
use crate::tur::TurEvaluation;

/// A per-cell quantity that can be recorded by a scan or optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Observable {
    MeanW,
    AbsMeanW,
    MeanW1,
    MeanW2,
    VarW,
    VarW1,
    VarW2,
    SigmaW,
    RelFluctW,
    Log10RelFluctW,
    MeanQh,
    MeanQc,
    EtaTh,
    Eta0,
    EtaC,
    EtaEngine,
    Omega,
    MeanSigma,
    TurObserved,
    TurBound,
    TurSlack,
    TurSatisfied,
    Regime,
    Engine,
    Anomalous,
}

impl Observable {
    pub const ALL: [Observable; 25] = [
        Observable::MeanW,
        Observable::AbsMeanW,
        Observable::MeanW1,
        Observable::MeanW2,
        Observable::VarW,
        Observable::VarW1,
        Observable::VarW2,
        Observable::SigmaW,
        Observable::RelFluctW,
        Observable::Log10RelFluctW,
        Observable::MeanQh,
        Observable::MeanQc,
        Observable::EtaTh,
        Observable::Eta0,
        Observable::EtaC,
        Observable::EtaEngine,
        Observable::Omega,
        Observable::MeanSigma,
        Observable::TurObserved,
        Observable::TurBound,
        Observable::TurSlack,
        Observable::TurSatisfied,
        Observable::Regime,
        Observable::Engine,
        Observable::Anomalous,
    ];

    /// Column name used in CSV headers and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Observable::MeanW => "mean_W",
            Observable::AbsMeanW => "abs_mean_W",
            Observable::MeanW1 => "mean_W1",
            Observable::MeanW2 => "mean_W2",
            Observable::VarW => "var_W",
            Observable::VarW1 => "var_W1",
            Observable::VarW2 => "var_W2",
            Observable::SigmaW => "sigma_W",
            Observable::RelFluctW => "rel_fluct_W",
            Observable::Log10RelFluctW => "log10_rel_fluct_W",
            Observable::MeanQh => "mean_Qh",
            Observable::MeanQc => "mean_Qc",
            Observable::EtaTh => "eta_th",
            Observable::Eta0 => "eta_0",
            Observable::EtaC => "eta_C",
            Observable::EtaEngine => "eta_engine",
            Observable::Omega => "Omega",
            Observable::MeanSigma => "mean_Sigma",
            Observable::TurObserved => "tur_observed",
            Observable::TurBound => "tur_bound",
            Observable::TurSlack => "tur_slack",
            Observable::TurSatisfied => "tur_satisfied",
            Observable::Regime => "regime",
            Observable::Engine => "engine",
            Observable::Anomalous => "anomalous",
        }
    }

    /// True for 0/1 flags and the regime code.
    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            Observable::TurSatisfied | Observable::Regime | Observable::Engine | Observable::Anomalous
        )
    }

    /// Numeric value at one cell. `None` where the quantity is undefined.
    /// The regime is reported by its code.
    pub fn value(self, obs: &CycleObservables, tur: Option<&TurEvaluation>) -> Option<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Observable::MeanW => Some(obs.mean_w),
            Observable::AbsMeanW => Some(obs.mean_w.abs()),
            Observable::MeanW1 => Some(obs.mean_w1),
            Observable::MeanW2 => Some(obs.mean_w2),
            Observable::VarW => Some(obs.var_w),
            Observable::VarW1 => Some(obs.var_w1),
            Observable::VarW2 => Some(obs.var_w2),
            Observable::SigmaW => Some(obs.sigma_w()),
            Observable::RelFluctW => obs.rel_fluct_w,
            Observable::Log10RelFluctW => obs.rel_fluct_w.map(f64::log10),
            Observable::MeanQh => Some(obs.mean_qh),
            Observable::MeanQc => Some(obs.mean_qc),
            Observable::EtaTh => obs.eta_th,
            Observable::Eta0 => Some(obs.eta_0),
            Observable::EtaC => Some(obs.eta_c),
            Observable::EtaEngine => obs.eta_engine,
            Observable::Omega => obs.omega,
            Observable::MeanSigma => Some(obs.mean_sigma),
            Observable::TurObserved => tur.map(|t| t.observed),
            Observable::TurBound => tur.map(|t| t.bound),
            Observable::TurSlack => tur.map(|t| t.slack),
            Observable::TurSatisfied => tur.map(|t| flag(t.satisfied)),
            Observable::Regime => Some(f64::from(obs.regime.code())),
            Observable::Engine => Some(flag(obs.is_engine())),
            Observable::Anomalous => Some(flag(obs.anomalous)),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "|mean_W|" {
            return Ok(Observable::AbsMeanW);
        }
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::UnknownObservable(s.to_string()))
    }
}
