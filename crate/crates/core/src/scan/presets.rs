//! Named built-in scans. All use `h_i = 3`, `h_f = 4`.
//!
//! Presets whose axis ranges were chosen by eye rather than taken from stated
//! values carry `approximate = true`.

use serde::Serialize;

use super::{Axis, FixedParams, Observable, ScanParam, ScanSpec};
use crate::cycle::EngineParams;
use crate::error::{Error, Result};

/// Bumped whenever any preset's parameters change.
pub const PRESET_VERSION: u32 = 1;

pub const H_INITIAL: f64 = 3.0;
pub const H_FINAL: f64 = 4.0;

const GRID_POINTS: usize = 101;
const LINE_POINTS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub label: String,
    pub spec: ScanSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PresetKind {
    Grid(ScanSpec),
    /// Several line scans over the same axis.
    Lines(Vec<Curve>),
    /// A single parameter point whose efficiency distribution is wanted.
    Distribution(EngineParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub approximate: bool,
    pub kind: PresetKind,
}

fn fields() -> FixedParams {
    FixedParams::fields(H_INITIAL, H_FINAL)
}

fn temperature_grid(j: f64, t_max: f64, quantities: &[Observable]) -> PresetKind {
    let spec = ScanSpec::grid(
        fields().coupling(j),
        Axis::linear(ScanParam::TCold, 0.01, t_max, GRID_POINTS),
        Axis::linear(ScanParam::THot, 0.01, t_max, GRID_POINTS),
        quantities.to_vec(),
    )
    .expect("preset grid is valid");
    PresetKind::Grid(spec)
}

fn lines(fixed: &[(String, FixedParams)], axis: Axis, quantities: &[Observable]) -> PresetKind {
    PresetKind::Lines(
        fixed
            .iter()
            .map(|(label, f)| Curve {
                label: label.clone(),
                spec: ScanSpec::line(*f, axis, quantities.to_vec()).expect("preset line is valid"),
            })
            .collect(),
    )
}

fn coupling_lines(temps: &[(f64, f64)], quantities: &[Observable]) -> PresetKind {
    let fixed: Vec<_> = temps
        .iter()
        .map(|&(th, tc)| (format!("Th={th} Tc={tc}"), fields().t_hot(th).t_cold(tc)))
        .collect();
    lines(
        &fixed,
        Axis::linear(ScanParam::Coupling, 0.0, 2.999, LINE_POINTS),
        quantities,
    )
}

use Observable::*;

const WORK_MAP: &[Observable] = &[MeanW, Regime, Engine];
const SIGMA_MAP: &[Observable] = &[SigmaW, MeanW, Regime, Engine];
const FLUCT_MAP: &[Observable] = &[Log10RelFluctW, RelFluctW, MeanW, Regime, Engine];
const ETA_MAP: &[Observable] = &[EtaTh, EtaEngine, Eta0, EtaC, MeanW, Regime, Engine];
const ENTROPY_MAP: &[Observable] = &[MeanSigma, MeanW, Regime, Engine];

/// Every preset, in listing order.
pub fn all() -> Vec<Preset> {
    let mut out = Vec::new();
    // (family, panel names, couplings, temperature ceiling, quantities)
    type Panels = (
        &'static str,
        &'static [&'static str; 4],
        &'static [f64; 4],
        f64,
        &'static [Observable],
    );
    let grid_panels: [Panels; 4] = [
        (
            "fig1",
            &["fig1a", "fig1b", "fig1c", "fig1d"],
            &[0.0, 2.0, 5.0, 10.0],
            20.0,
            WORK_MAP,
        ),
        (
            "fig5",
            &["fig5a", "fig5b", "fig5c", "fig5d"],
            &[0.0, 2.0, 5.0, 10.0],
            10.0,
            SIGMA_MAP,
        ),
        (
            "fig6",
            &["fig6a", "fig6b", "fig6c", "fig6d"],
            &[0.0, 2.0, 5.0, 10.0],
            10.0,
            FLUCT_MAP,
        ),
        (
            "fig8",
            &["fig8a", "fig8b", "fig8c", "fig8d"],
            &[1.5, 2.0, 5.0, 10.0],
            20.0,
            ETA_MAP,
        ),
    ];
    let describe = |family: &str| -> &'static str {
        match family {
            "fig1" => "work output over (Tc, Th)",
            "fig5" => "work standard deviation over (Tc, Th)",
            "fig6" => "relative work fluctuation over (Tc, Th)",
            _ => "thermodynamic efficiency over (Tc, Th)",
        }
    };
    for (family, names, couplings, t_max, quantities) in grid_panels {
        for (name, &j) in names.iter().zip(couplings) {
            out.push(Preset {
                name,
                description: describe(family),
                approximate: true,
                kind: temperature_grid(j, t_max, quantities),
            });
        }
        if family == "fig1" {
            out.push(Preset {
                name: "fig2",
                description: "work output over (J, Th) at Tc = 0.1",
                approximate: true,
                kind: PresetKind::Grid(
                    ScanSpec::grid(
                        fields().t_cold(0.1),
                        Axis::linear(ScanParam::Coupling, 0.0, 2.99, GRID_POINTS),
                        Axis::linear(ScanParam::THot, 0.1, 10.0, GRID_POINTS),
                        WORK_MAP.to_vec(),
                    )
                    .expect("preset grid is valid"),
                ),
            });
            out.push(Preset {
                name: "fig3",
                description: "work against J in the weak-coupling regime",
                approximate: false,
                kind: coupling_lines(&[(100.0, 0.5), (5.0, 1.0), (5.0, 0.1), (5.0, 0.01)], &[MeanW, Regime]),
            });
            let fixed: Vec<_> = [100.0, 1e-4]
                .iter()
                .flat_map(|&th| {
                    [4.01, 4.5, 6.0].map(move |j| (format!("J={j} Th={th}"), fields().coupling(j).t_hot(th)))
                })
                .collect();
            out.push(Preset {
                name: "fig4",
                description: "work against Tc in the strong-coupling regime (both islands)",
                approximate: true,
                kind: lines(
                    &fixed,
                    Axis::log(ScanParam::TCold, 1e-2, 1e2, LINE_POINTS),
                    &[MeanW, Regime, Engine],
                ),
            });
        }
        if family == "fig6" {
            out.push(Preset {
                name: "fig7",
                description: "relative work fluctuation against J in the weak-coupling regime",
                approximate: false,
                kind: coupling_lines(
                    &[(100.0, 1e-3), (100.0, 0.5), (5.0, 1.0), (5.0, 0.1), (5.0, 0.01)],
                    &[RelFluctW, MeanW, Regime],
                ),
            });
        }
    }
    for (name, tc) in [("fig9-top", 1.0), ("fig9-bottom", 5.0)] {
        out.push(Preset {
            name,
            description: "efficiency distribution at Th = 20, J = 1.5",
            approximate: false,
            kind: PresetKind::Distribution(EngineParams::new(1.5, H_INITIAL, H_FINAL, tc, 20.0).expect("valid")),
        });
    }
    let fixed: Vec<_> = [2.0, 1.0, 0.0]
        .iter()
        .map(|&j| (format!("J={j}"), fields().coupling(j).t_hot(20.0)))
        .collect();
    out.push(Preset {
        name: "fig10",
        description: "relative work variance against the uncertainty bound, Th = 20",
        approximate: true,
        kind: lines(
            &fixed,
            Axis::log(ScanParam::TCold, 1e-2, 19.0, LINE_POINTS),
            &[TurObserved, TurBound, TurSlack, TurSatisfied, MeanSigma],
        ),
    });
    for (name, j) in [("fig11a", 2.0), ("fig11b", 5.0)] {
        out.push(Preset {
            name,
            description: "entropy production over (Tc, Th)",
            approximate: true,
            kind: temperature_grid(j, 20.0, ENTROPY_MAP),
        });
    }
    out
}

pub fn names() -> Vec<&'static str> {
    all().into_iter().map(|p| p.name).collect()
}

pub fn preset(name: &str) -> Result<Preset> {
    let presets = all();
    let available = presets.iter().map(|p| p.name.to_string()).collect();
    presets
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_complete() {
        let names = names();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for expected in [
            "fig1a",
            "fig1b",
            "fig1c",
            "fig1d",
            "fig2",
            "fig3",
            "fig4",
            "fig5a",
            "fig5d",
            "fig6b",
            "fig7",
            "fig8a",
            "fig8d",
            "fig9-top",
            "fig9-bottom",
            "fig10",
            "fig11a",
            "fig11b",
        ] {
            assert!(names.contains(&expected), "{expected}");
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        let Err(Error::UnknownPreset { available, .. }) = preset("fig99") else {
            panic!("expected error");
        };
        assert!(available.iter().any(|n| n == "fig1a"));
    }

    #[test]
    fn fig1b_fixes_coupling() {
        let PresetKind::Grid(spec) = preset("fig1b").unwrap().kind else {
            panic!("grid expected");
        };
        assert_eq!(spec.fixed().coupling, Some(2.0));
        assert_eq!(spec.fixed().h_initial, 3.0);
    }

    #[test]
    fn fig4_has_six_curves() {
        let PresetKind::Lines(curves) = preset("fig4").unwrap().kind else {
            panic!("lines expected");
        };
        assert_eq!(curves.len(), 6);
    }
}
