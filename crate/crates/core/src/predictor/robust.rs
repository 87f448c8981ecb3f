//! Sensitivity of resonant spreading to a small detuning of the kick period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{power_law_fit, LinearFit};

/// Default relative-deviation threshold defining the agreement time.
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Relative kinetic-energy deviation at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub t: usize,
    pub delta: f64,
}

/// `Δ(t) = |E₀(t) − E(t)| / E₀(t)` for `t ≥ 1`, where the slices are indexed by `t`.
pub fn deviation_series(detuned: &[f64], ideal: &[f64]) -> Result<Vec<Deviation>> {
    if detuned.len() != ideal.len() {
        return Err(Error::DimensionMismatch(format!(
            "detuned series has {} steps, ideal {}",
            detuned.len(),
            ideal.len()
        )));
    }
    (1..ideal.len())
        .map(|t| {
            if !(ideal[t] > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "ideal kinetic energy vanishes at t = {t}"
                )));
            }
            Ok(Deviation {
                t,
                delta: (ideal[t] - detuned[t]).abs() / ideal[t],
            })
        })
        .collect()
}

/// First step whose deviation reaches `threshold`; `None` when it never does.
pub fn agreement_time(series: &[Deviation], threshold: f64) -> Option<usize> {
    series.iter().find(|d| d.delta >= threshold).map(|d| d.t)
}

/// Power-law exponent of `Δ(t)` over `[⌈t_D/2⌉, t_D − 1]`.
pub fn early_deviation_exponent(series: &[Deviation], agreement: usize) -> Result<LinearFit> {
    let lo = agreement.div_ceil(2).max(1);
    let (t, d): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|p| p.t >= lo && p.t < agreement && p.delta > 0.0)
        .map(|p| (p.t as f64, p.delta))
        .unzip();
    if t.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "only {} usable points before the agreement time {agreement}",
            t.len()
        )));
    }
    power_law_fit(&t, &d)
}

/// Log–log fit of agreement time against detuning.
pub fn scaling_fit(pairs: &[(f64, usize)]) -> Result<LinearFit> {
    if pairs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "scaling fit needs at least 3 (detuning, agreement time) pairs, got {}",
            pairs.len()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().map(|&(d, t)| (d.abs(), t as f64)).unzip();
    power_law_fit(&x, &y)
}

/// Deviation series and agreement time for one detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub detuning: f64,
    pub threshold: f64,
    pub deviations: Vec<Deviation>,
    pub agreement_time: Option<usize>,
    pub early_exponent: Option<LinearFit>,
}

impl RobustnessResult {
    pub fn analyse(detuning: f64, detuned: &[f64], ideal: &[f64], threshold: f64) -> Result<Self> {
        let deviations = deviation_series(detuned, ideal)?;
        let agreement = agreement_time(&deviations, threshold);
        let early_exponent = agreement.and_then(|t| early_deviation_exponent(&deviations, t).ok());
        Ok(Self {
            detuning,
            threshold,
            deviations,
            agreement_time: agreement,
            early_exponent,
        })
    }
}
