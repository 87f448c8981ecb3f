//! Time-series drivers: evolve an initial state step by step and record
//! moments and bipartite entropy at every `t = 0..=steps`.

use serde::{Deserialize, Serialize};

use crate::engine::{EngineOptions, GrowthEvent, RotorEngine};
use crate::entanglement::{schmidt_purity, Bipartition, EntropyRecord};
use crate::error::{Error, Result};
use crate::initial::InitialState;
use crate::potential::PotentialSpec;
use crate::resonance::ResonancePlan;
use crate::rotor::{displacement_stats, measure_moments, MomentRecord, Moments, RotorLattice, RotorState};
use crate::tensor;
use crate::top::{TopEngine, TopState};

/// Extra momentum layers added beyond the kick bandwidth.
pub const WINDOW_MARGIN: u64 = 16;

/// Which propagator drives a rotor run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    /// Kick and free rotation, one period at a time.
    Generic,
    /// Single accumulated kick per time point; orders 1 and 2 only.
    Resonant,
    /// Commuting dressed factors; exact plans with the matching symmetry.
    Dressed,
    /// The fastest path the plan admits.
    Auto,
}

impl Propagation {
    /// Resolves `Auto` against `plan` and `v`.
    pub fn resolve(self, v: &PotentialSpec, plan: &ResonancePlan) -> Result<Self> {
        Ok(match self {
            Propagation::Auto if plan.is_low_order() => Propagation::Resonant,
            Propagation::Auto if plan.is_exact() && v.check_high_order_symmetry(plan)? => Propagation::Dressed,
            Propagation::Auto => Propagation::Generic,
            other => other,
        })
    }
}

/// Window covering the initial support plus `⌈steps·Σ|c||m_j|⌉ + margin·max|m_j|` on each side.
pub fn default_lattice(
    v: &PotentialSpec,
    initial: &InitialState,
    steps: usize,
    margin: u64,
    max_dimension: usize,
) -> Result<RotorLattice> {
    if initial.rotor_count() != v.rotor_count() {
        return Err(Error::DimensionMismatch(format!(
            "initial state on {} rotors, potential on {}",
            initial.rotor_count(),
            v.rotor_count()
        )));
    }
    let windows: Vec<(i64, i64)> = (0..v.rotor_count())
        .map(|j| {
            let (lo, hi) = initial.support(j);
            let pad = (steps as f64 * v.kick_action(j)).ceil() as i64 + (margin * v.max_mode(j).max(1)) as i64;
            (lo - pad, hi + pad)
        })
        .collect();
    RotorLattice::new(&windows, max_dimension)
}

/// Everything a rotor run needs.
#[derive(Debug, Clone)]
pub struct RotorRun {
    pub potential: PotentialSpec,
    pub plan: ResonancePlan,
    pub initial: InitialState,
    pub steps: usize,
    pub propagation: Propagation,
    /// Bipartition for the entropy series; `None` skips it.
    pub partition: Option<Bipartition>,
    pub options: EngineOptions,
    /// Starting lattice; defaults to [`default_lattice`].
    pub lattice: Option<RotorLattice>,
}

/// Output of a rotor run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotorSeries {
    pub propagation: Propagation,
    pub moments: Vec<MomentRecord>,
    pub entropy: Vec<EntropyRecord>,
    pub growth: Vec<GrowthEvent>,
    /// Window dimensions at the end of the run.
    pub dims: Vec<usize>,
}

impl RotorSeries {
    /// `⟨p_j²⟩` indexed by `t`.
    pub fn second_moments(&self, j: usize) -> Vec<f64> {
        self.moments.iter().map(|m| m.second[j]).collect()
    }
}

/// Main state plus the probes `p_j|ψ₀⟩/‖p_j|ψ₀⟩‖` needed for two-time correlations.
struct Ensemble {
    main: RotorState,
    probes: Vec<Option<(RotorState, f64)>>,
}

impl Ensemble {
    fn new(main: RotorState, with_probes: bool) -> Result<Self> {
        let n = main.lattice().rotor_count();
        let mut probes = Vec::with_capacity(n);
        for j in 0..n {
            if !with_probes {
                probes.push(None);
                continue;
            }
            let applied = main.momentum_applied(j)?;
            let norm = tensor::norm_sqr(&applied).sqrt();
            if norm == 0.0 {
                probes.push(None);
            } else {
                probes.push(Some((RotorState::from_amplitudes(main.lattice().clone(), applied)?, norm)));
            }
        }
        Ok(Self { main, probes })
    }

    fn states_mut(&mut self) -> impl Iterator<Item = &mut RotorState> {
        std::iter::once(&mut self.main).chain(self.probes.iter_mut().flatten().map(|(s, _)| s))
    }

    /// Embeds every member into the union of their windows.
    fn align(&mut self, max_dimension: usize) -> Result<()> {
        let mut lattice = self.main.lattice().clone();
        for (s, _) in self.probes.iter().flatten() {
            if s.lattice() != &lattice {
                lattice = lattice.union(s.lattice(), max_dimension)?;
            }
        }
        for s in self.states_mut() {
            if s.lattice() != &lattice {
                *s = s.embedded(&lattice)?;
            }
        }
        Ok(())
    }

    /// `Re⟨ψ(t)|p_j|χ_j(t)⟩` per rotor; zero when `p_j|ψ₀⟩` vanishes.
    fn correlations(&self) -> Result<Vec<f64>> {
        let n = self.probes.len();
        let mut out = vec![0.0; n];
        for (j, probe) in self.probes.iter().enumerate() {
            if let Some((chi, norm)) = probe {
                let p_psi = self.main.momentum_applied(j)?;
                out[j] = norm * tensor::inner(&p_psi, chi.amplitudes()).re;
            }
        }
        Ok(out)
    }
}

/// Runs a rotor experiment and records every step.
pub fn run_rotor(run: &RotorRun) -> Result<RotorSeries> {
    let v = &run.potential;
    let plan = &run.plan;
    if plan.rotor_count() != v.rotor_count() {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {} rotors, potential {}",
            plan.rotor_count(),
            v.rotor_count()
        )));
    }
    let propagation = run.propagation.resolve(v, plan)?;
    let lattice = match &run.lattice {
        Some(l) => l.clone(),
        None => default_lattice(v, &run.initial, run.steps, WINDOW_MARGIN, run.options.max_dimension)?,
    };
    let psi0 = run.initial.build(&lattice)?;
    let with_probes = !run.initial.is_uniform_in_angle();
    let initial = Ensemble::new(psi0, with_probes)?;
    let mut engine = RotorEngine::new(run.options.clone());

    let mut moments: Vec<(usize, Moments)> = Vec::with_capacity(run.steps + 1);
    let mut correlations: Vec<Vec<f64>> = Vec::with_capacity(run.steps + 1);
    let mut entropy = Vec::new();
    let mut record = |t: usize, e: &Ensemble| -> Result<()> {
        moments.push((t, measure_moments(&e.main)?));
        if with_probes {
            correlations.push(e.correlations()?);
        }
        if let Some(part) = &run.partition {
            entropy.push(EntropyRecord::new(t, schmidt_purity(e.main.amplitudes(), part)?));
        }
        Ok(())
    };

    let dims = match propagation {
        Propagation::Generic => {
            let mut e = initial;
            record(0, &e)?;
            for t in 1..=run.steps {
                for s in e.states_mut() {
                    engine.step(s, v, plan).map_err(|err| err.at_step(t))?;
                }
                e.align(run.options.max_dimension)?;
                record(t, &e)?;
            }
            e.main.lattice().dims().to_vec()
        }
        Propagation::Resonant | Propagation::Dressed => {
            let mut reference = initial;
            record(0, &reference)?;
            for t in 1..=run.steps {
                let mut e = Ensemble {
                    main: reference.main.clone(),
                    probes: reference.probes.clone(),
                };
                for s in e.states_mut() {
                    if propagation == Propagation::Resonant {
                        engine.evolve_resonant(s, v, plan, t)?;
                    } else {
                        engine.evolve_dressed(s, v, plan, t)?;
                    }
                }
                e.align(run.options.max_dimension)?;
                record(t, &e)?;
                // Later time points start from the widest window reached so far.
                let lattice = e.main.lattice().clone();
                if reference.main.lattice() != &lattice {
                    for s in reference.states_mut() {
                        *s = s.embedded(&lattice)?;
                    }
                }
            }
            reference.main.lattice().dims().to_vec()
        }
        Propagation::Auto => unreachable!("resolved above"),
    };

    let moments = displacement_stats(&moments, with_probes.then_some(correlations.as_slice()));
    Ok(RotorSeries {
        propagation,
        moments,
        entropy,
        growth: engine.take_growth_events(),
        dims,
    })
}

/// Output of a top run; moment fields refer to `J_z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopSeries {
    pub moments: Vec<MomentRecord>,
    pub entropy: Vec<EntropyRecord>,
    /// `⟨J_nx⟩` indexed by `t`.
    pub jx_mean: Vec<Vec<f64>>,
    /// `⟨J_nx²⟩` indexed by `t`.
    pub jx_second: Vec<Vec<f64>>,
}

/// Runs a top experiment and records every step.
pub fn run_top(engine: &TopEngine, initial: &TopState, steps: usize, partition: Option<&Bipartition>) -> Result<TopSeries> {
    let n = initial.top_count();
    let mut psi = initial.clone();
    let mut probes: Vec<Option<(TopState, f64)>> = Vec::with_capacity(n);
    for j in 0..n {
        let applied = engine.apply_jz(initial.amplitudes(), j);
        let norm = tensor::norm_sqr(&applied).sqrt();
        probes.push(if norm == 0.0 {
            None
        } else {
            Some((TopState::from_amplitudes(initial.spin(), applied)?, norm))
        });
    }

    let mut moments = Vec::with_capacity(steps + 1);
    let mut correlations = Vec::with_capacity(steps + 1);
    let mut entropy = Vec::new();
    let mut jx_mean = Vec::with_capacity(steps + 1);
    let mut jx_second = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        if t > 0 {
            engine.step(&mut psi)?;
            for (chi, _) in probes.iter_mut().flatten() {
                engine.step(chi)?;
            }
        }
        let z = engine.jz_moments(&psi);
        moments.push((t, Moments { mean: z.mean, second: z.second }));
        let corr: Vec<f64> = probes
            .iter()
            .enumerate()
            .map(|(j, p)| match p {
                Some((chi, norm)) => norm * tensor::inner(&engine.apply_jz(psi.amplitudes(), j), chi.amplitudes()).re,
                None => 0.0,
            })
            .collect();
        correlations.push(corr);
        let x = engine.jx_moments(&psi);
        jx_mean.push(x.mean);
        jx_second.push(x.second);
        if let Some(part) = partition {
            entropy.push(EntropyRecord::new(t, schmidt_purity(psi.amplitudes(), part)?));
        }
    }
    Ok(TopSeries {
        moments: displacement_stats(&moments, Some(&correlations)),
        entropy,
        jx_mean,
        jx_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::wavepacket_params;
    use crate::resonance::Resonance;

    fn principal_secondary() -> (PotentialSpec, ResonancePlan) {
        (
            PotentialSpec::cosines(2, &[(0.1, &[1, 0]), (0.2, &[0, 1]), (1.0, &[1, -1])]).unwrap(),
            ResonancePlan::exact(&[(1, 1), (1, 2)]).unwrap(),
        )
    }

    fn run(v: PotentialSpec, plan: ResonancePlan, initial: InitialState, steps: usize, propagation: Propagation) -> RotorSeries {
        run_rotor(&RotorRun {
            potential: v,
            plan,
            initial,
            steps,
            propagation,
            partition: Some(Bipartition::first(2).unwrap()),
            options: EngineOptions {
                auto_grow: true,
                ..EngineOptions::default()
            },
            lattice: None,
        })
        .unwrap()
    }

    #[test]
    fn generic_and_resonant_series_agree() {
        let (v, plan) = principal_secondary();
        let a = run(v.clone(), plan.clone(), InitialState::ground(2), 12, Propagation::Generic);
        let b = run(v, plan, InitialState::ground(2), 12, Propagation::Auto);
        assert_eq!(b.propagation, Propagation::Resonant);
        for (x, y) in a.moments.iter().zip(&b.moments) {
            for j in 0..2 {
                assert!((x.second[j] - y.second[j]).abs() < 1e-9);
            }
        }
        for (x, y) in a.entropy.iter().zip(&b.entropy) {
            assert!((x.s_lin - y.s_lin).abs() < 1e-9);
        }
    }

    #[test]
    fn principal_secondary_moment_law() {
        let (v, plan) = principal_secondary();
        let s = run(v.clone(), plan, InitialState::ground(2), 10, Propagation::Auto);
        let shifted = [1usize].into_iter().collect();
        let p2 = wavepacket_params(&v, 1, &shifted, &InitialState::ground(2)).unwrap();
        for rec in &s.moments {
            assert!((rec.squared_displacement[1] - p2.predict(rec.t).1).abs() < 1e-9);
        }
        assert!(s.entropy[2].s_lin.abs() < 1e-12);
    }

    #[test]
    fn coherent_start_obeys_exact_law() {
        // The rotor law holds for any initial state once the two-time correlation is kept.
        let v = PotentialSpec::cosines(2, &[(0.4, &[1, 0]), (0.3, &[0, 1]), (0.5, &[1, -1])]).unwrap();
        let plan = ResonancePlan::exact(&[(1, 2), (1, 1)]).unwrap();
        let initial = InitialState::Coherent {
            centers: vec![(0.9, 0.0), (-0.4, 1.0)],
            width: 0.7,
        };
        let s = run(v.clone(), plan.clone(), initial.clone(), 9, Propagation::Generic);
        let shifted = plan.even_set();
        for j in 0..2 {
            let p = wavepacket_params(&v, j, &shifted, &initial).unwrap();
            for rec in &s.moments {
                let (d, s2) = p.predict(rec.t);
                assert!((rec.displacement[j] - d).abs() < 1e-8, "D t={} j={j}", rec.t);
                assert!((rec.squared_displacement[j] - s2).abs() < 1e-8, "σ² t={} j={j}", rec.t);
            }
        }
    }

    #[test]
    fn detuned_auto_falls_back_to_generic() {
        let (v, _) = principal_secondary();
        let plan = ResonancePlan::new(vec![Resonance::detuned(1, 1, 1e-3), Resonance::exact(1, 2)]).unwrap();
        assert_eq!(Propagation::Auto.resolve(&v, &plan).unwrap(), Propagation::Generic);
    }

    #[test]
    fn dressed_series_matches_generic() {
        let v = PotentialSpec::cosines(2, &[(0.3, &[3, 0]), (0.2, &[0, 3]), (0.5, &[3, -3])]).unwrap();
        let plan = ResonancePlan::exact(&[(1, 3), (1, 3)]).unwrap();
        let go = |propagation| {
            run_rotor(&RotorRun {
                potential: v.clone(),
                plan: plan.clone(),
                initial: InitialState::ground(2),
                steps: 6,
                propagation,
                partition: Some(Bipartition::first(2).unwrap()),
                options: EngineOptions::default(),
                lattice: Some(RotorLattice::new(&[(-90, 90), (-90, 90)], 1 << 20).unwrap()),
            })
            .unwrap()
        };
        let a = go(Propagation::Generic);
        let b = go(Propagation::Auto);
        assert_eq!(b.propagation, Propagation::Dressed);
        for (x, y) in a.moments.iter().zip(&b.moments) {
            assert!((x.second[0] - y.second[0]).abs() < 1e-9);
        }
        for (x, y) in a.entropy.iter().zip(&b.entropy) {
            assert!((x.s_lin - y.s_lin).abs() < 1e-9);
        }
    }

    #[test]
    fn growth_keeps_series_consistent() {
        let (v, plan) = principal_secondary();
        let small = RotorLattice::new(&[(-4, 4), (-4, 4)], 1 << 20).unwrap();
        let grown = run_rotor(&RotorRun {
            potential: v.clone(),
            plan: plan.clone(),
            initial: InitialState::ground(2),
            steps: 20,
            propagation: Propagation::Resonant,
            partition: None,
            options: EngineOptions {
                auto_grow: true,
                ..EngineOptions::default()
            },
            lattice: Some(small),
        })
        .unwrap();
        assert!(!grown.growth.is_empty());
        let full = run(v, plan, InitialState::ground(2), 20, Propagation::Resonant);
        for (x, y) in grown.moments.iter().zip(&full.moments) {
            assert!((x.second[0] - y.second[0]).abs() < 1e-8);
        }
    }
}
