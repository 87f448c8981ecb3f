//! Product initial states and their angular distributions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotor::{coherent_amplitude, RotorLattice, RotorState};

/// Amplitude cut-off for coherent profiles, in units of the width.
const COHERENT_REACH: f64 = 12.0;

/// Descriptor of a product initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    /// `⊗_j |l_j⟩`.
    MomentumEigenstate { momenta: Vec<i64> },
    /// Wrapped Gaussians centred at `(θ₀_j, p₀_j)` with momentum width `w`.
    Coherent { centers: Vec<(f64, f64)>, width: f64 },
}

impl InitialState {
    pub fn ground(rotor_count: usize) -> Self {
        InitialState::MomentumEigenstate {
            momenta: vec![0; rotor_count],
        }
    }

    pub fn rotor_count(&self) -> usize {
        match self {
            InitialState::MomentumEigenstate { momenta } => momenta.len(),
            InitialState::Coherent { centers, .. } => centers.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rotor_count() == 0 {
            return Err(Error::InvalidArgument("initial state covers no rotors".into()));
        }
        if let InitialState::Coherent { centers, width } = self {
            if !(*width > 0.0 && width.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "coherent width {width} must be positive"
                )));
            }
            if centers.iter().any(|c| !c.0.is_finite() || !c.1.is_finite()) {
                return Err(Error::InvalidArgument("coherent centers must be finite".into()));
            }
        }
        Ok(())
    }

    /// Whether every angular density is uniform.
    pub fn is_uniform_in_angle(&self) -> bool {
        matches!(self, InitialState::MomentumEigenstate { .. })
    }

    /// Inclusive momentum window carrying the state's amplitude on rotor `j`.
    pub fn support(&self, j: usize) -> (i64, i64) {
        match self {
            InitialState::MomentumEigenstate { momenta } => (momenta[j], momenta[j]),
            InitialState::Coherent { centers, width } => {
                let reach = (COHERENT_REACH * width).ceil() + 1.0;
                let p0 = centers[j].1;
                ((p0 - reach).floor() as i64, (p0 + reach).ceil() as i64)
            }
        }
    }

    /// Normalised momentum amplitudes of rotor `j` over [`support`](Self::support).
    pub fn rotor_profile(&self, j: usize) -> (i64, Vec<Complex64>) {
        let (lo, hi) = self.support(j);
        match self {
            InitialState::MomentumEigenstate { .. } => (lo, vec![Complex64::new(1.0, 0.0)]),
            InitialState::Coherent { centers, width } => {
                let (theta0, p0) = centers[j];
                let mut amps: Vec<Complex64> = (lo..=hi)
                    .map(|l| coherent_amplitude(l, theta0, p0, *width))
                    .collect();
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                amps.iter_mut().for_each(|a| *a /= norm);
                (lo, amps)
            }
        }
    }

    pub fn build(&self, lattice: &RotorLattice) -> Result<RotorState> {
        self.validate()?;
        if lattice.rotor_count() != self.rotor_count() {
            return Err(Error::DimensionMismatch(format!(
                "initial state on {} rotors, lattice on {}",
                self.rotor_count(),
                lattice.rotor_count()
            )));
        }
        match self {
            InitialState::MomentumEigenstate { momenta } => {
                RotorState::momentum_eigenstate(lattice, momenta)
            }
            InitialState::Coherent { .. } => {
                let mut factors = Vec::with_capacity(self.rotor_count());
                for j in 0..self.rotor_count() {
                    let (lo, amps) = self.rotor_profile(j);
                    let hi = lo + amps.len() as i64 - 1;
                    if lo < lattice.l_min(j) || hi > lattice.l_max(j) {
                        let momentum = (0..self.rotor_count()).map(|k| self.support(k).0).collect();
                        return Err(Error::OutOfWindow { momentum });
                    }
                    let f: Vec<Complex64> = lattice
                        .momenta(j)
                        .map(|l| {
                            if (lo..=hi).contains(&l) {
                                amps[(l - lo) as usize]
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect();
                    factors.push(f);
                }
                RotorState::product(lattice, &factors)
            }
        }
    }

    pub fn angle_densities(&self) -> Vec<AngleDensity> {
        (0..self.rotor_count())
            .map(|j| {
                let (lo, amps) = self.rotor_profile(j);
                AngleDensity::new(lo, amps)
            })
            .collect()
    }
}

/// `ρ(θ) = |Σ_l a_l e^{ilθ}|² / 2π` for one rotor.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleDensity {
    l_min: i64,
    amplitudes: Vec<Complex64>,
    bound: f64,
}

impl AngleDensity {
    pub fn new(l_min: i64, amplitudes: Vec<Complex64>) -> Self {
        let l1: f64 = amplitudes.iter().map(|a| a.norm()).sum();
        Self {
            l_min,
            amplitudes,
            bound: l1 * l1 / TAU,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.amplitudes.len() == 1
    }

    /// Degree of `ρ` as a trigonometric polynomial.
    pub fn degree(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn eval(&self, theta: f64) -> f64 {
        if self.is_uniform() {
            return 1.0 / TAU;
        }
        // Σ a_n e^{inθ} by Horner in e^{iθ}; the l_min offset is a pure phase.
        let z = Complex64::from_polar(1.0, theta);
        let psi = self
            .amplitudes
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
        psi.norm_sqr() / TAU
    }

    /// Draws one angle in `[0, 2π)` by rejection against the bound `(Σ|a_l|)²/2π`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.is_uniform() {
            return rng.random::<f64>() * TAU;
        }
        loop {
            let theta = rng.random::<f64>() * TAU;
            if rng.random::<f64>() * self.bound <= self.eval(theta) {
                return theta;
            }
        }
    }

    pub fn l_min(&self) -> i64 {
        self.l_min
    }
}
