//! Floquet propagators for kicked rotors.
//!
//! One period is a kick `exp(−iV(θ))` followed by free rotation
//! `exp(−iΣ τ_j p_j²/2)`. Kicks are applied on an angle grid with as many
//! points as the momentum window, reached through unitary discrete Fourier
//! transforms.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{IndexSet, PotentialSpec};
use crate::resonance::ResonancePlan;
use crate::rotor::{Representation, RotorLattice, RotorState, DEFAULT_MAX_DIMENSION};
use crate::tensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Largest mass tolerated on the outer layers of any momentum window.
    pub tail_tolerance: f64,
    /// Grow the window and retry instead of failing on a tail violation.
    pub auto_grow: bool,
    /// Cap on the total lattice dimension.
    pub max_dimension: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-10,
            auto_grow: false,
            max_dimension: DEFAULT_MAX_DIMENSION,
        }
    }
}

/// A window enlargement performed during a kick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEvent {
    pub rotor: usize,
    pub tail_mass: f64,
    pub from: Vec<usize>,
    pub to: Vec<usize>,
}

struct KickCache {
    dims: Vec<usize>,
    potential: PotentialSpec,
    phases: ArrayD<Complex64>,
}

/// Propagator with cached FFT plans and kick phases.
pub struct RotorEngine {
    options: EngineOptions,
    planner: FftPlanner<f64>,
    kick_cache: Option<KickCache>,
    growth: Vec<GrowthEvent>,
}

impl Default for RotorEngine {
    fn default() -> Self {
        Self::new(EngineOptions::default())
    }
}

impl RotorEngine {
    pub fn new(options: EngineOptions) -> Self {
        Self {
            options,
            planner: FftPlanner::new(),
            kick_cache: None,
            growth: Vec::new(),
        }
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    /// Window enlargements performed so far.
    pub fn growth_events(&self) -> &[GrowthEvent] {
        &self.growth
    }

    pub fn take_growth_events(&mut self) -> Vec<GrowthEvent> {
        std::mem::take(&mut self.growth)
    }

    pub fn to_angle(&mut self, state: &mut RotorState) {
        if state.representation() == Representation::Angle {
            return;
        }
        let dims = state.lattice().dims().to_vec();
        for (axis, &m) in dims.iter().enumerate() {
            let fft = self.planner.plan_fft_inverse(m);
            tensor::transform_axis(state.amplitudes_mut(), axis, &fft, 1.0 / (m as f64).sqrt());
        }
        state.set_representation(Representation::Angle);
    }

    pub fn to_momentum(&mut self, state: &mut RotorState) {
        if state.representation() == Representation::Momentum {
            return;
        }
        let dims = state.lattice().dims().to_vec();
        for (axis, &m) in dims.iter().enumerate() {
            let fft = self.planner.plan_fft_forward(m);
            tensor::transform_axis(state.amplitudes_mut(), axis, &fft, 1.0 / (m as f64).sqrt());
        }
        state.set_representation(Representation::Momentum);
    }

    fn kick_phases(&mut self, dims: &[usize], v: &PotentialSpec) -> &ArrayD<Complex64> {
        let hit = matches!(&self.kick_cache, Some(c) if c.dims == dims && &c.potential == v);
        if !hit {
            self.kick_cache = Some(KickCache {
                dims: dims.to_vec(),
                potential: v.clone(),
                phases: kick_grid(dims, v),
            });
        }
        &self.kick_cache.as_ref().expect("cache filled above").phases
    }

    /// `exp(−iV(θ))`, growing the window on a tail violation when allowed.
    pub fn apply_kick(&mut self, state: &mut RotorState, v: &PotentialSpec) -> Result<()> {
        state.require_momentum()?;
        if v.rotor_count() != state.lattice().rotor_count() {
            return Err(Error::DimensionMismatch(format!(
                "potential on {} rotors, state on {}",
                v.rotor_count(),
                state.lattice().rotor_count()
            )));
        }
        if v.is_empty() {
            return Ok(());
        }
        loop {
            let mut kicked = state.clone();
            self.to_angle(&mut kicked);
            let phases = self.kick_phases(kicked.lattice().dims(), v);
            ndarray::Zip::from(kicked.amplitudes_mut())
                .and(phases)
                .for_each(|z, &p| *z *= p);
            self.to_momentum(&mut kicked);

            let (rotor, tail) = kicked.tail_mass();
            if tail <= self.options.tail_tolerance {
                *state = kicked;
                return Ok(());
            }
            if !self.options.auto_grow {
                return Err(Error::Truncation {
                    step: None,
                    rotor,
                    tail_mass: tail,
                    tolerance: self.options.tail_tolerance,
                });
            }
            let dims = state.lattice().dims().to_vec();
            let mut pad = vec![0usize; dims.len()];
            pad[rotor] = (dims[rotor] / 2).max(8);
            let grown = state.lattice().padded(&pad, self.options.max_dimension)?;
            self.growth.push(GrowthEvent {
                rotor,
                tail_mass: tail,
                from: dims,
                to: grown.dims().to_vec(),
            });
            *state = state.embedded(&grown)?;
        }
    }

    /// `exp(−iΣ τ_j l_j²/2)` with exact reduction of the rational part.
    pub fn apply_free(&mut self, state: &mut RotorState, plan: &ResonancePlan) -> Result<()> {
        state.require_momentum()?;
        check_plan(state.lattice(), plan)?;
        let lattice = state.lattice().clone();
        let factors: Vec<Vec<Complex64>> = (0..lattice.rotor_count())
            .map(|j| {
                let r = plan.resonance(j);
                lattice
                    .momenta(j)
                    .map(|l| Complex64::from_polar(1.0, -r.free_phase(l)))
                    .collect()
            })
            .collect();
        tensor::multiply_separable(state.amplitudes_mut(), &factors);
        Ok(())
    }

    /// One period: kick, then free rotation.
    pub fn step(&mut self, state: &mut RotorState, v: &PotentialSpec, plan: &ResonancePlan) -> Result<()> {
        self.apply_kick(state, v)?;
        self.apply_free(state, plan)
    }

    /// `t` periods by repeated [`step`](Self::step).
    pub fn evolve(
        &mut self,
        state: &mut RotorState,
        v: &PotentialSpec,
        plan: &ResonancePlan,
        t: usize,
    ) -> Result<()> {
        for k in 1..=t {
            self.step(state, v, plan).map_err(|e| e.at_step(k))?;
        }
        Ok(())
    }

    /// `t` periods in one kick by the accumulated potential, for plans with
    /// every rotor at principal or secondary resonance.
    pub fn evolve_resonant(
        &mut self,
        state: &mut RotorState,
        v: &PotentialSpec,
        plan: &ResonancePlan,
        t: usize,
    ) -> Result<()> {
        check_plan(state.lattice(), plan)?;
        if !plan.is_low_order() {
            return Err(Error::IneligiblePlan(
                "the single-kick path needs every rotor at order 1 or 2 with zero detuning".into(),
            ));
        }
        self.apply_accumulated(state, v, &plan.even_set(), t)
    }

    /// `t` periods through the commuting dressed factors, for exact plans of
    /// any order whose potential has the matching translation symmetry.
    pub fn evolve_dressed(
        &mut self,
        state: &mut RotorState,
        v: &PotentialSpec,
        plan: &ResonancePlan,
        t: usize,
    ) -> Result<()> {
        check_plan(state.lattice(), plan)?;
        if !plan.is_exact() {
            return Err(Error::IneligiblePlan(
                "the dressed path needs zero detuning on every rotor".into(),
            ));
        }
        if !v.check_high_order_symmetry(plan)? {
            let detail: Vec<String> = v
                .high_order_violations(plan)
                .iter()
                .map(|(j, term)| {
                    format!("term {term} breaks the translation symmetry of rotor {}", j + 1)
                })
                .collect();
            return Err(Error::IneligiblePlan(detail.join("; ")));
        }
        let even = plan.even_set();
        self.apply_accumulated(state, v, &even, t)?;
        if t == 0 {
            return Ok(());
        }
        let lattice = state.lattice().clone();
        let factors: Vec<Vec<Complex64>> = (0..lattice.rotor_count())
            .map(|j| {
                let r = plan.resonance(j);
                let in_e = even.contains(&j);
                lattice
                    .momenta(j)
                    .map(|l| Complex64::from_polar(1.0, -dressed_free_phase(r.numerator, r.order, in_e, l, t)))
                    .collect()
            })
            .collect();
        tensor::multiply_separable(state.amplitudes_mut(), &factors);
        Ok(())
    }

    fn apply_accumulated(
        &mut self,
        state: &mut RotorState,
        v: &PotentialSpec,
        shifted: &IndexSet,
        t: usize,
    ) -> Result<()> {
        state.require_momentum()?;
        if t == 0 {
            return Ok(());
        }
        let accumulated = v.accumulated(shifted, t as u64)?;
        self.apply_kick(state, &accumulated).map_err(|e| e.at_step(t))?;
        if t % 2 == 1 {
            apply_shift(state, shifted);
        }
        Ok(())
    }
}

/// Partial π-shift `exp(−iπ Σ_{j∈S} l_j)` as a momentum phase.
pub fn apply_shift(state: &mut RotorState, shifted: &IndexSet) {
    let lattice = state.lattice().clone();
    let factors: Vec<Vec<Complex64>> = (0..lattice.rotor_count())
        .map(|j| {
            lattice
                .momenta(j)
                .map(|l| {
                    if shifted.contains(&j) && l.rem_euclid(2) == 1 {
                        Complex64::new(-1.0, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    tensor::multiply_separable(state.amplitudes_mut(), &factors);
}

/// `t` powers of the dressed free factor: `π t (2 r l² − s l [j∈E]) / s mod 2π`.
fn dressed_free_phase(numerator: u64, order: u64, in_even_set: bool, l: i64, t: usize) -> f64 {
    let l = l as i128;
    let s = order as i128;
    let shift = if in_even_set { s * l } else { 0 };
    let per_step = (2 * numerator as i128 * l * l - shift).rem_euclid(2 * s);
    let residue = (per_step * t as i128).rem_euclid(2 * s);
    std::f64::consts::PI * residue as f64 / s as f64
}

fn check_plan(lattice: &RotorLattice, plan: &ResonancePlan) -> Result<()> {
    if plan.rotor_count() != lattice.rotor_count() {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {} rotors, state {}",
            plan.rotor_count(),
            lattice.rotor_count()
        )));
    }
    Ok(())
}

/// `exp(−iV(θ))` on the grid `θ_k = 2πk/M_j`.
fn kick_grid(dims: &[usize], v: &PotentialSpec) -> ArrayD<Complex64> {
    let mut values = ArrayD::<f64>::zeros(IxDyn(dims));
    let mut term_values = ArrayD::<Complex64>::zeros(IxDyn(dims));
    for term in v.terms() {
        term_values.fill(Complex64::from_polar(term.coefficient(), term.phase()));
        let factors: Vec<Vec<Complex64>> = dims
            .iter()
            .zip(term.modes())
            .map(|(&m, &mode)| {
                (0..m)
                    .map(|k| {
                        let reduced = (mode * k as i64).rem_euclid(m as i64);
                        Complex64::from_polar(1.0, std::f64::consts::TAU * reduced as f64 / m as f64)
                    })
                    .collect()
            })
            .collect();
        tensor::multiply_separable(&mut term_values, &factors);
        ndarray::Zip::from(&mut values)
            .and(&term_values)
            .for_each(|acc, z| *acc += z.re);
    }
    values.mapv(|x| Complex64::from_polar(1.0, -x))
}
