//! Rational resonance plans `τ_j = 4π r_j/s_j + δτ_j`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::IndexSet;

/// Resonance of a single rotor (or top).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub numerator: u64,
    pub order: u64,
    pub detuning: f64,
}

impl Resonance {
    pub fn exact(numerator: u64, order: u64) -> Self {
        Self {
            numerator,
            order,
            detuning: 0.0,
        }
    }

    pub fn detuned(numerator: u64, order: u64, detuning: f64) -> Self {
        Self {
            numerator,
            order,
            detuning,
        }
    }

    fn validate(&self, j: usize) -> Result<()> {
        if self.numerator == 0 || self.order == 0 {
            return Err(Error::InvalidPlan(format!(
                "rotor {j}: numerator and order must be positive"
            )));
        }
        if gcd(self.numerator, self.order) != 1 {
            return Err(Error::InvalidPlan(format!(
                "rotor {j}: numerator {} and order {} are not coprime",
                self.numerator, self.order
            )));
        }
        if !self.detuning.is_finite() {
            return Err(Error::InvalidPlan(format!("rotor {j}: detuning is not finite")));
        }
        Ok(())
    }

    /// Free-rotation phase `τ l²/2` reduced into `[0, 2π)` for the rational part,
    /// plus the detuning contribution.
    ///
    /// The rational part is `2π r l²/s`; the reduction `r l² mod s` is done in
    /// integers so the phase error does not grow with `l`.
    pub fn free_phase(&self, l: i64) -> f64 {
        let l2 = (l as i128) * (l as i128);
        let s = self.order as i128;
        let residue = ((self.numerator as i128) * l2).rem_euclid(s);
        2.0 * PI * residue as f64 / s as f64 + 0.5 * self.detuning * (l as f64) * (l as f64)
    }

    /// `τ` as a float, for display only.
    pub fn period(&self) -> f64 {
        4.0 * PI * self.numerator as f64 / self.order as f64 + self.detuning
    }
}

/// Per-rotor resonance conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonancePlan {
    rotors: Vec<Resonance>,
}

impl ResonancePlan {
    pub fn new(rotors: Vec<Resonance>) -> Result<Self> {
        if rotors.is_empty() {
            return Err(Error::InvalidPlan("plan covers no rotors".into()));
        }
        for (j, r) in rotors.iter().enumerate() {
            r.validate(j)?;
        }
        Ok(Self { rotors })
    }

    /// Exact resonance from `(r, s)` pairs.
    pub fn exact(pairs: &[(u64, u64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(r, s)| Resonance::exact(r, s)).collect())
    }

    pub fn rotor_count(&self) -> usize {
        self.rotors.len()
    }

    pub fn rotors(&self) -> &[Resonance] {
        &self.rotors
    }

    pub fn order(&self, j: usize) -> u64 {
        self.rotors[j].order
    }

    pub fn resonance(&self, j: usize) -> &Resonance {
        &self.rotors[j]
    }

    /// Rotors at even order: the set shifted by π.
    pub fn even_set(&self) -> IndexSet {
        self.rotors
            .iter()
            .enumerate()
            .filter(|(_, r)| r.order % 2 == 0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.rotors.iter().all(|r| r.detuning == 0.0)
    }

    /// Every rotor at principal or secondary resonance with no detuning.
    pub fn is_low_order(&self) -> bool {
        self.is_exact() && self.rotors.iter().all(|r| r.order <= 2)
    }

    /// Same orders with every detuning set to zero.
    pub fn without_detuning(&self) -> Self {
        Self {
            rotors: self
                .rotors
                .iter()
                .map(|r| Resonance::exact(r.numerator, r.order))
                .collect(),
        }
    }

    pub fn with_detuning(&self, detuning: &[f64]) -> Result<Self> {
        if detuning.len() != self.rotors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} detunings for {} rotors",
                detuning.len(),
                self.rotors.len()
            )));
        }
        Self::new(
            self.rotors
                .iter()
                .zip(detuning)
                .map(|(r, &d)| Resonance::detuned(r.numerator, r.order, d))
                .collect(),
        )
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
