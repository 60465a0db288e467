//! Two-point-measurement statistics of one cycle.
//!
//! Energy is measured before and after each unitary stroke. With ideal
//! adiabatic strokes the occupation of each eigenstate is carried over
//! unchanged (the eigenbasis does not depend on `h`), so a trajectory is fully
//! specified by the level `n` drawn from the cold Gibbs state and the level `l`
//! drawn from the hot Gibbs state after thermalization. There are sixteen.

mod sampling;

pub use sampling::{sample_trajectories, EmpiricalTrajectories, GoodnessOfFit, SAMPLING_CHUNK};

use serde::Serialize;

use crate::cycle::EngineParams;
use crate::error::{Error, Result};
use crate::spectrum::{Level, LEVEL_COUNT};

/// Values closer than this are treated as the same support point.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// One measurement record `(n, l)` and the energies exchanged along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryAtom {
    /// Level measured at the start of stroke 1.
    pub initial: Level,
    /// Level measured after thermalization with the hot bath.
    pub thermalized: Level,
    /// `E_n(h_f) - E_n(h_i)`.
    pub w1: f64,
    /// `E_l(h_f) - E_n(h_f)`.
    pub qh: f64,
    /// `E_l(h_i) - E_l(h_f)`.
    pub w2: f64,
    /// `p_n^c p_l^h`.
    pub prob: f64,
}

impl TrajectoryAtom {
    pub fn work(&self) -> f64 {
        self.w1 + self.w2
    }
}

/// Joint distribution of `(W1, Q_h, W2)` over all sixteen trajectories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDistribution {
    params: EngineParams,
    atoms: Vec<TrajectoryAtom>,
}

impl TrajectoryDistribution {
    /// Builds the sixteen atoms from a probability table indexed `[n][l]`.
    pub(crate) fn from_table(params: EngineParams, table: [[f64; LEVEL_COUNT]; LEVEL_COUNT]) -> Self {
        let (hi, hf, j) = (params.h_initial(), params.h_final(), params.coupling());
        let mut atoms = Vec::with_capacity(LEVEL_COUNT * LEVEL_COUNT);
        for n in Level::ALL {
            for l in Level::ALL {
                atoms.push(TrajectoryAtom {
                    initial: n,
                    thermalized: l,
                    w1: n.energy(hf, j) - n.energy(hi, j),
                    qh: l.energy(hf, j) - n.energy(hf, j),
                    w2: l.energy(hi, j) - l.energy(hf, j),
                    prob: table[n.index()][l.index()],
                });
            }
        }
        TrajectoryDistribution { params, atoms }
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn atoms(&self) -> &[TrajectoryAtom] {
        &self.atoms
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Expectation of any per-trajectory quantity.
    pub fn expectation(&self, f: impl Fn(&TrajectoryAtom) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.prob * f(a)).sum()
    }

    /// Centered variance of any per-trajectory quantity.
    pub fn variance(&self, f: impl Fn(&TrajectoryAtom) -> f64) -> f64 {
        let mean = self.expectation(&f);
        self.expectation(|a| (f(a) - mean).powi(2))
    }

    pub fn mean_work(&self) -> f64 {
        self.expectation(TrajectoryAtom::work)
    }

    pub fn mean_heat_hot(&self) -> f64 {
        self.expectation(|a| a.qh)
    }

    /// `Cov(W1, W2)`, zero for a fully thermalizing hot stroke.
    pub fn work_covariance(&self) -> f64 {
        let m1 = self.expectation(|a| a.w1);
        let m2 = self.expectation(|a| a.w2);
        self.expectation(|a| (a.w1 - m1) * (a.w2 - m2))
    }

    /// Atoms with equal `(W1, Q_h, W2)` (within [`MERGE_TOLERANCE`]) combined.
    pub fn merged(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut merged: Vec<(f64, f64, f64, f64)> = Vec::new();
        for a in &self.atoms {
            let same = |m: &&mut (f64, f64, f64, f64)| {
                (m.0 - a.w1).abs() <= MERGE_TOLERANCE
                    && (m.1 - a.qh).abs() <= MERGE_TOLERANCE
                    && (m.2 - a.w2).abs() <= MERGE_TOLERANCE
            };
            match merged.iter_mut().find(same) {
                Some(m) => m.3 += a.prob,
                None => merged.push((a.w1, a.qh, a.w2, a.prob)),
            }
        }
        merged
    }
}

/// All sixteen trajectories with probabilities `p_n^c(β_c) p_l^h(β_h)`.
pub fn enumerate_trajectories(p: &EngineParams) -> TrajectoryDistribution {
    let cold = *p.cold_point().populations();
    let hot = *p.hot_point().populations();
    let table = cold.map(|pn| hot.map(|pl| pn * pl));
    TrajectoryDistribution::from_table(*p, table)
}

/// A finite distribution over real values, plus probability carried by
/// outcomes with no value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    support: Vec<(f64, f64)>,
    undefined_mass: f64,
    divergent_mass: f64,
}

impl DiscreteDistribution {
    /// Sorts and merges `(value, probability)` pairs closer than [`MERGE_TOLERANCE`].
    pub fn from_atoms(atoms: impl IntoIterator<Item = (f64, f64)>, undefined_mass: f64, divergent_mass: f64) -> Self {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (value, prob) in atoms {
            match support.last_mut() {
                Some(last) if value - last.0 <= MERGE_TOLERANCE => last.1 += prob,
                _ => support.push((value, prob)),
            }
        }
        DiscreteDistribution {
            support,
            undefined_mass,
            divergent_mass,
        }
    }

    /// `(value, probability)` sorted by value.
    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Mass of outcomes `0/0` (for the stochastic efficiency).
    pub fn undefined_mass(&self) -> f64 {
        self.undefined_mass
    }

    /// Mass of outcomes `x/0` with `x ≠ 0`.
    pub fn divergent_mass(&self) -> f64 {
        self.divergent_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|(_, p)| p).sum::<f64>() + self.undefined_mass + self.divergent_mass
    }

    pub fn min_value(&self) -> Option<f64> {
        self.support.first().map(|(v, _)| *v)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.support.last().map(|(v, _)| *v)
    }

    fn require_defined(&self) -> Result<()> {
        if self.undefined_mass != 0.0 || self.divergent_mass != 0.0 {
            return Err(Error::UndefinedMoments {
                undefined: self.undefined_mass,
                divergent: self.divergent_mass,
            });
        }
        Ok(())
    }

    /// Raw moment `Σ p v^order`.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order == 0 {
            return Err(Error::InvalidMomentOrder);
        }
        self.require_defined()?;
        Ok(self.support.iter().map(|(v, p)| p * v.powi(order as i32)).sum())
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1)
    }

    /// Centered second moment.
    pub fn variance(&self) -> Result<f64> {
        let mean = self.mean()?;
        Ok(self.support.iter().map(|(v, p)| p * (v - mean).powi(2)).sum())
    }
}

/// `<X^order>` of a fully defined distribution.
pub fn distribution_moments(d: &DiscreteDistribution, order: u32) -> Result<f64> {
    d.moment(order)
}

/// Distribution of `W = W1 + W2`; support within `{0, ±Δh, ±2Δh}`.
pub fn work_distribution(td: &TrajectoryDistribution) -> DiscreteDistribution {
    DiscreteDistribution::from_atoms(td.atoms.iter().map(|a| (a.work(), a.prob)), 0.0, 0.0)
}

/// Scaled fluctuating efficiency `η' = -W / <Q_h>`. Its mean is the
/// thermodynamic efficiency and its coefficient of variation is that of `W`.
///
/// `<Q_h>` comes from the closed form, which is exactly zero at reversible
/// points where the trajectory sum leaves rounding residue.
pub fn scaled_efficiency_distribution(td: &TrajectoryDistribution) -> Result<DiscreteDistribution> {
    let mean_qh = crate::cycle::mean_heat(&td.params).hot;
    if mean_qh == 0.0 || !mean_qh.is_finite() {
        return Err(Error::UndefinedEfficiency);
    }
    let work = work_distribution(td);
    Ok(DiscreteDistribution::from_atoms(
        work.support.iter().map(|&(w, p)| (-w / mean_qh, p)),
        0.0,
        0.0,
    ))
}

/// Stochastic efficiency `η = -W / Q_h` per trajectory.
///
/// Trajectories with `Q_h = 0` carry no value: `W = 0` goes to the undefined
/// mass and `W ≠ 0` to the divergent mass. "Zero" means within
/// [`MERGE_TOLERANCE`], i.e. merged with the exact zero atom.
pub fn stochastic_efficiency_distribution(td: &TrajectoryDistribution) -> DiscreteDistribution {
    let mut undefined = 0.0;
    let mut divergent = 0.0;
    let mut atoms = Vec::with_capacity(td.atoms.len());
    for a in &td.atoms {
        let w = a.work();
        if a.qh.abs() <= MERGE_TOLERANCE {
            if w.abs() <= MERGE_TOLERANCE {
                undefined += a.prob;
            } else {
                divergent += a.prob;
            }
        } else {
            atoms.push((-w / a.qh, a.prob));
        }
    }
    DiscreteDistribution::from_atoms(atoms, undefined, divergent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> EngineParams {
        EngineParams::new(2.0, 3.0, 4.0, 1.0, 5.0).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-14
    }

    #[test]
    fn reference_enumeration() {
        let p = reference();
        let td = enumerate_trajectories(&p);
        assert_eq!(td.atoms().len(), 16);
        assert!((td.total_probability() - 1.0).abs() <= 1e-12);

        // Ground state |00> kept through the hot bath.
        let a = td
            .atoms()
            .iter()
            .find(|a| a.initial == Level::DownDown && a.thermalized == Level::DownDown)
            .unwrap();
        assert_eq!((a.w1, a.qh, a.w2), (-1.0, 0.0, 1.0));
        let pc = (3.0f64).exp() / (1.0 + 2.0f64.exp() + 2.0 * 3.0f64.cosh());
        let ph = (0.8f64).exp() / (1.0 + 0.4f64.exp() + 2.0 * 0.8f64.cosh());
        assert_relative_eq!(a.prob, pc * ph, max_relative = 1e-13);

        for a in td.atoms().iter().filter(|a| a.initial.is_idle()) {
            assert_eq!(a.w1, 0.0);
        }

        let w = work_distribution(&td);
        assert_relative_eq!(w.mean().unwrap(), -0.35862679491982108, max_relative = 1e-12);
        assert_relative_eq!(w.variance().unwrap(), 0.61205039476900527, max_relative = 1e-12);
        assert_relative_eq!(td.mean_heat_hot(), 1.3751168318189072, max_relative = 1e-12);
        assert!(td.work_covariance().abs() <= 1e-14);
    }

    #[test]
    fn work_support_is_multiples_of_delta_h() {
        let td = enumerate_trajectories(&reference());
        let w = work_distribution(&td);
        assert_eq!(w.len(), 5);
        let values: Vec<f64> = w.support().iter().map(|(v, _)| *v).collect();
        assert_eq!(values, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn asymptotic_work_distribution() {
        let p = EngineParams::new(2.0, 3.0, 4.0, 1e-6, 1e6).unwrap();
        let w = work_distribution(&enumerate_trajectories(&p));
        assert!((w.mean().unwrap() + 1.0).abs() < 1e-3);
        // Cold start is |00>; the hot state is nearly uniform over four levels.
        let prob_of = |v: f64| {
            w.support()
                .iter()
                .find(|(x, _)| (x - v).abs() < 1e-9)
                .map_or(0.0, |(_, p)| *p)
        };
        assert!((prob_of(-2.0) - 0.25).abs() < 1e-3);
        assert!((prob_of(-1.0) - 0.5).abs() < 1e-3);
        assert!((prob_of(0.0) - 0.25).abs() < 1e-3);
        assert!(prob_of(1.0) < 1e-3 && prob_of(2.0) < 1e-3);
    }

    #[test]
    fn stochastic_efficiency_reference() {
        let p = reference();
        let td = enumerate_trajectories(&p);
        let d = stochastic_efficiency_distribution(&td);
        let cold = p.cold_point();
        let hot = p.hot_point();
        let diagonal: f64 = (0..4).map(|n| cold.populations()[n] * hot.populations()[n]).sum();
        assert_relative_eq!(d.undefined_mass(), diagonal, max_relative = 1e-12);
        assert_relative_eq!(d.undefined_mass(), 0.38504531873838608, max_relative = 1e-12);
        assert_eq!(d.divergent_mass(), 0.0);
        assert!((d.total_mass() - 1.0).abs() <= 1e-12);
        assert!(matches!(d.mean(), Err(Error::UndefinedMoments { .. })));
    }

    #[test]
    fn uncoupled_idle_degeneracy_has_no_divergence() {
        // J = 0 makes the two idle levels degenerate; Q_h = 0 then also forces W = 0.
        let p = EngineParams::new(0.0, 3.0, 4.0, 1.0, 5.0).unwrap();
        let d = stochastic_efficiency_distribution(&enumerate_trajectories(&p));
        assert_eq!(d.divergent_mass(), 0.0);
        assert!(d.undefined_mass() > 0.0);
    }

    #[test]
    fn crossing_at_final_field_diverges() {
        // J = h_f: the lowest field level and the singlet coincide at h_f, so
        // the two cross trajectories between them have Q_h = 0 and W = ±Δh.
        let p = EngineParams::new(4.0, 3.0, 4.0, 1.0, 5.0).unwrap();
        let td = enumerate_trajectories(&p);
        let d = stochastic_efficiency_distribution(&td);
        let (c, h) = (p.cold_point(), p.hot_point());
        let expected = c.population(Level::DownDown) * h.population(Level::Singlet)
            + c.population(Level::Singlet) * h.population(Level::DownDown);
        assert_relative_eq!(d.divergent_mass(), expected, max_relative = 1e-12);
        assert!((d.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn scaled_efficiency_fig9_shapes() {
        let top = EngineParams::new(1.5, 3.0, 4.0, 1.0, 20.0).unwrap();
        let bottom = EngineParams::new(1.5, 3.0, 4.0, 5.0, 20.0).unwrap();
        for p in [top, bottom] {
            let o = cycle::observables(&p);
            let d = scaled_efficiency_distribution(&enumerate_trajectories(&p)).unwrap();
            assert!(d.len() <= 5);
            assert!((d.total_mass() - 1.0).abs() <= 1e-12);
            assert!(close(d.mean().unwrap(), o.eta_th.unwrap()));
            assert!(d.support().iter().any(|(v, p)| *v < 0.0 && *p > 0.0));
            assert!(d.support().iter().any(|(v, p)| *v == 0.0 && *p > 0.0));
        }
        let o = cycle::observables(&top);
        let d = scaled_efficiency_distribution(&enumerate_trajectories(&top)).unwrap();
        let positive: Vec<f64> = d.support().iter().map(|(v, _)| *v).filter(|v| *v > 0.0).collect();
        assert!(
            positive.iter().all(|&v| v >= o.eta_th.unwrap() && v <= o.eta_c),
            "{positive:?}"
        );

        let o = cycle::observables(&bottom);
        let d = scaled_efficiency_distribution(&enumerate_trajectories(&bottom)).unwrap();
        assert!(d.max_value().unwrap() > o.eta_c);
    }

    #[test]
    fn scaled_efficiency_undefined_without_heat() {
        let p = EngineParams::new(0.0, 2.0, 4.0, 1.0, 2.0).unwrap();
        let td = enumerate_trajectories(&p);
        assert!(td.mean_heat_hot().abs() < 1e-15);
        assert_eq!(scaled_efficiency_distribution(&td), Err(Error::UndefinedEfficiency));
        let q = EngineParams::new(0.0, 3.0, 4.0, 3.0, 4.0).unwrap();
        assert_eq!(
            scaled_efficiency_distribution(&enumerate_trajectories(&q)),
            Err(Error::UndefinedEfficiency)
        );
    }

    #[test]
    fn moments_contract() {
        let d = DiscreteDistribution::from_atoms([(1.0, 0.5), (3.0, 0.5)], 0.0, 0.0);
        assert_eq!(distribution_moments(&d, 1).unwrap(), 2.0);
        assert_eq!(distribution_moments(&d, 2).unwrap(), 5.0);
        assert_eq!(d.variance().unwrap(), 1.0);
        assert_eq!(distribution_moments(&d, 0), Err(Error::InvalidMomentOrder));
        let d = DiscreteDistribution::from_atoms([(1.0, 0.5)], 0.25, 0.25);
        assert!(matches!(d.moment(1), Err(Error::UndefinedMoments { .. })));
    }

    #[test]
    fn merging_combines_near_values() {
        let d = DiscreteDistribution::from_atoms([(1.0, 0.25), (1.0 + 1e-14, 0.25), (0.5, 0.5)], 0.0, 0.0);
        assert_eq!(d.support(), &[(0.5, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn joint_merge_at_degenerate_point() {
        // With J = 0 the two idle levels give identical triples and merge.
        let p = EngineParams::new(0.0, 3.0, 4.0, 1.0, 5.0).unwrap();
        let td = enumerate_trajectories(&p);
        let merged = td.merged();
        assert_eq!(merged.len(), 9);
        let total: f64 = merged.iter().map(|m| m.3).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    fn arb_params() -> impl Strategy<Value = EngineParams> {
        (0.0f64..10.0, 1.0f64..5.0, 1e-3f64..1.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(j, hi, frac, ltc, lth)| {
            EngineParams::new(j, hi, hi + (8.0 - hi) * frac, 10f64.powf(ltc), 10f64.powf(lth)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn enumeration_matches_closed_forms(p in arb_params()) {
            let td = enumerate_trajectories(&p);
            let o = cycle::observables(&p);
            let w = work_distribution(&td);
            prop_assert!((td.total_probability() - 1.0).abs() <= 1e-12);
            prop_assert!(w.len() <= 5);
            prop_assert!(close(w.mean().unwrap(), o.mean_w), "{} vs {}", w.mean().unwrap(), o.mean_w);
            prop_assert!(close(w.variance().unwrap(), o.var_w));
            prop_assert!(close(td.mean_heat_hot(), o.mean_qh));
            prop_assert!(close(td.expectation(|a| a.w1), o.mean_w1));
            prop_assert!(close(td.variance(|a| a.w2), o.var_w2));
            prop_assert!(td.work_covariance().abs() <= 1e-14);
        }

        #[test]
        fn scaled_efficiency_inherits_work_statistics(p in arb_params()) {
            let td = enumerate_trajectories(&p);
            let o = cycle::observables(&p);
            if let (Ok(d), Some(eta)) = (scaled_efficiency_distribution(&td), o.eta_th) {
                prop_assert!(close(d.mean().unwrap(), eta));
                let rel_eta = d.variance().unwrap() / eta.powi(2);
                let rel_w = o.var_w / o.mean_w.powi(2);
                prop_assert!((rel_eta - rel_w).abs() <= 1e-12 * rel_w.max(rel_eta) + 1e-14 || !rel_w.is_finite());
            }
        }
    }
}
