//! Four-point energy differences of the coupling potential and the entropy laws built on them.
//!
//! For independent copies `(θ_A, θ_B)` and `(θ_A', θ_B')` drawn from the initial
//! angular densities, `ε = V_I(θ_A,θ_B) + V_I(θ_A',θ_B') − V_I(θ_A',θ_B) − V_I(θ_A,θ_B')`,
//! split into `ε₊` and `ε₋` by the parity of the coupling terms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::initial::InitialState;
use crate::potential::{IndexSet, PotentialSpec};
use crate::predictor::params::cosine_pairing;
use crate::stats::Welford;

/// Smallest accepted Monte-Carlo sample count.
pub const MIN_SAMPLES: usize = 10_000;

const BLOCK: usize = 8192;

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl From<&Welford> for Estimate {
    fn from(w: &Welford) -> Self {
        Self {
            value: w.mean(),
            std_error: w.std_error(),
        }
    }
}

/// Second moments available in closed form for uniform angular densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactEpsilonMoments {
    pub plus_sq: f64,
    pub minus_sq: f64,
    pub cross: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonMoments {
    pub mean_plus: Estimate,
    pub mean_minus: Estimate,
    pub plus_sq: Estimate,
    pub minus_sq: Estimate,
    pub cross: Estimate,
    pub total_sq: Estimate,
    /// `√⟨ε²⟩`, from the closed form when available.
    pub norm: f64,
    /// `1 − ⟨cos ε⟩`.
    pub s_odd: Estimate,
    pub exact: Option<ExactEpsilonMoments>,
    pub samples: usize,
    pub seed: u64,
}

/// Sampled `(ε₊, ε₋)` pairs, reusable across time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSamples {
    plus: Vec<f64>,
    minus: Vec<f64>,
    exact: Option<ExactEpsilonMoments>,
    seed: u64,
}

impl EpsilonSamples {
    /// Draws `samples` four-block configurations; block `b` uses stream `b` of
    /// a ChaCha generator seeded with `seed`, so results do not depend on the
    /// worker count.
    pub fn draw(
        coupling: &PotentialSpec,
        shifted: &IndexSet,
        part: &Bipartition,
        initial: &InitialState,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "{samples} samples requested, at least {MIN_SAMPLES} required"
            )));
        }
        if coupling.is_empty() {
            return Err(Error::InvalidPotential("coupling potential has no terms".into()));
        }
        let n = coupling.rotor_count();
        if initial.rotor_count() != n || part.body_count() != n {
            return Err(Error::DimensionMismatch(format!(
                "coupling on {n} rotors, initial state on {}, bipartition on {}",
                initial.rotor_count(),
                part.body_count()
            )));
        }
        initial.validate()?;
        let (vp, vm) = coupling.decompose(shifted)?;
        let densities = initial.angle_densities();
        let in_a: Vec<bool> = (0..n).map(|j| part.a().contains(&j)).collect();

        let blocks = samples.div_ceil(BLOCK);
        let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK.min(samples - b * BLOCK);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let mut plus = Vec::with_capacity(len);
                let mut minus = Vec::with_capacity(len);
                let mut x = vec![0.0; n];
                let mut y = vec![0.0; n];
                let mut corners = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
                for _ in 0..len {
                    for j in 0..n {
                        x[j] = densities[j].sample(&mut rng);
                        y[j] = densities[j].sample(&mut rng);
                    }
                    // (A,B), (A',B'), (A',B), (A,B')
                    for j in 0..n {
                        corners[0][j] = x[j];
                        corners[1][j] = y[j];
                        corners[2][j] = if in_a[j] { y[j] } else { x[j] };
                        corners[3][j] = if in_a[j] { x[j] } else { y[j] };
                    }
                    let four = |v: &PotentialSpec| {
                        v.eval(&corners[0]) + v.eval(&corners[1]) - v.eval(&corners[2]) - v.eval(&corners[3])
                    };
                    plus.push(four(&vp));
                    minus.push(four(&vm));
                }
                (plus, minus)
            })
            .collect();
        let mut plus = Vec::with_capacity(samples);
        let mut minus = Vec::with_capacity(samples);
        for (p, m) in chunks {
            plus.extend(p);
            minus.extend(m);
        }
        let exact = initial
            .is_uniform_in_angle()
            .then(|| exact_moments(&vp, &vm));
        Ok(Self {
            plus,
            minus,
            exact,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    fn average(&self, f: impl Fn(f64, f64) -> f64) -> Estimate {
        let mut w = Welford::default();
        for (&p, &m) in self.plus.iter().zip(&self.minus) {
            w.push(f(p, m));
        }
        Estimate::from(&w)
    }

    pub fn moments(&self) -> EpsilonMoments {
        let total_sq = self.average(|p, m| (p + m) * (p + m));
        let norm = match &self.exact {
            Some(e) => (e.plus_sq + 2.0 * e.cross + e.minus_sq).sqrt(),
            None => total_sq.value.sqrt(),
        };
        EpsilonMoments {
            mean_plus: self.average(|p, _| p),
            mean_minus: self.average(|_, m| m),
            plus_sq: self.average(|p, _| p * p),
            minus_sq: self.average(|_, m| m * m),
            cross: self.average(|p, m| p * m),
            total_sq,
            norm,
            s_odd: self.average(|p, m| 1.0 - (p + m).cos()),
            exact: self.exact,
            samples: self.len(),
            seed: self.seed,
        }
    }

    /// `1 − ⟨cos(tε₊)⟩` at even `t`, `1 − ⟨cos(tε₊ + ε₋)⟩` at odd `t`.
    pub fn slin(&self, t: usize) -> Estimate {
        let tf = t as f64;
        if t % 2 == 0 {
            self.average(|p, _| 1.0 - (tf * p).cos())
        } else {
            self.average(|p, m| 1.0 - (tf * p + m).cos())
        }
    }
}

/// `⟨ε_X ε_Y⟩ = 4 Σ c c' ⟨cos cos⟩`: only identical corners with equal or
/// opposite mode vectors survive the uniform average.
fn exact_moments(plus: &PotentialSpec, minus: &PotentialSpec) -> ExactEpsilonMoments {
    let pair = |x: &PotentialSpec, y: &PotentialSpec| -> f64 {
        4.0 * x
            .terms()
            .iter()
            .flat_map(|a| y.terms().iter().map(move |b| a.coefficient() * b.coefficient() * cosine_pairing(a, b)))
            .sum::<f64>()
    };
    ExactEpsilonMoments {
        plus_sq: pair(plus, plus),
        minus_sq: pair(minus, minus),
        cross: pair(plus, minus),
    }
}

pub fn epsilon_moments(
    coupling: &PotentialSpec,
    shifted: &IndexSet,
    part: &Bipartition,
    initial: &InitialState,
    samples: usize,
    seed: u64,
) -> Result<EpsilonMoments> {
    Ok(EpsilonSamples::draw(coupling, shifted, part, initial, samples, seed)?.moments())
}

/// Closed-form linear entropy after `t` exact-resonance periods.
pub fn slin_exact(
    coupling: &PotentialSpec,
    shifted: &IndexSet,
    part: &Bipartition,
    initial: &InitialState,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(EpsilonSamples::draw(coupling, shifted, part, initial, samples, seed)?.slin(t))
}

/// `t* = 1/‖ε‖`.
pub fn crossover_time(moments: &EpsilonMoments) -> Result<f64> {
    if !(moments.norm > 0.0) {
        return Err(Error::InvalidArgument(
            "crossover time is undefined without coupling".into(),
        ));
    }
    Ok(1.0 / moments.norm)
}
