//! Kicking potentials as finite cosine series.
//!
//! A potential on `N` rotors is `V(θ) = Σ c · cos(m·θ + φ)` with integer mode
//! vectors `m`. Sine terms are written with `φ = −π/2`. The series is closed
//! under the partial π-shift `θ_j → θ_j + π (j ∈ S)`, which multiplies a term
//! by `(−1)^(Σ_{j∈S} m_j)`, so every symmetry question below is answered by
//! integer parity alone.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::ResonancePlan;

/// A set of zero-based rotor indices.
pub type IndexSet = BTreeSet<usize>;

/// One harmonic `c · cos(m·θ + φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    coefficient: f64,
    modes: Vec<i64>,
    phase: f64,
}

impl FourierTerm {
    /// Builds a term; the phase is wrapped into `[0, 2π)`.
    pub fn new(coefficient: f64, modes: Vec<i64>, phase: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidPotential("mode vector is empty".into()));
        }
        if modes.iter().all(|&m| m == 0) {
            return Err(Error::InvalidPotential(
                "constant term (all modes zero) only contributes a global phase".into(),
            ));
        }
        if !coefficient.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "non-finite coefficient or phase in term with modes {modes:?}"
            )));
        }
        Ok(Self {
            coefficient,
            modes,
            phase: wrap_phase(phase),
        })
    }

    pub fn cos(coefficient: f64, modes: &[i64]) -> Result<Self> {
        Self::new(coefficient, modes.to_vec(), 0.0)
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    fn argument(&self, theta: &[f64]) -> f64 {
        self.modes
            .iter()
            .zip(theta)
            .map(|(&m, &t)| m as f64 * t)
            .sum::<f64>()
            + self.phase
    }

    /// Indices of rotors with a nonzero mode.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(j, _)| j)
    }

    fn with_coefficient(&self, coefficient: f64) -> Self {
        Self {
            coefficient,
            ..self.clone()
        }
    }
}

impl fmt::Display for FourierTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·cos(", self.coefficient)?;
        let mut first = true;
        for (j, &m) in self.modes.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let sign = if m < 0 { "−" } else if first { "" } else { "+" };
            let mag = m.unsigned_abs();
            let coeff = if mag == 1 { String::new() } else { mag.to_string() };
            if first {
                write!(f, "{sign}{coeff}θ{}", j + 1)?;
            } else {
                write!(f, " {sign} {coeff}θ{}", j + 1)?;
            }
            first = false;
        }
        if self.phase != 0.0 {
            write!(f, " + {}", self.phase)?;
        }
        write!(f, ")")
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Parity of a term under the partial π-shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Symmetry class of a sub-potential under the partial π-shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryClass {
    Zero,
    Symmetric,
    Antisymmetric,
    Asymmetric,
}

impl SymmetryClass {
    pub fn from_parts(plus: &PotentialSpec, minus: &PotentialSpec) -> Self {
        match (plus.is_empty(), minus.is_empty()) {
            (true, true) => SymmetryClass::Zero,
            (false, true) => SymmetryClass::Symmetric,
            (true, false) => SymmetryClass::Antisymmetric,
            (false, false) => SymmetryClass::Asymmetric,
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymmetryClass::Zero => "zero",
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Antisymmetric => "antisymmetric",
            SymmetryClass::Asymmetric => "asymmetric",
        };
        f.write_str(s)
    }
}

/// `V(θ₁, …, θ_N)` as a finite cosine series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    rotor_count: usize,
    terms: Vec<FourierTerm>,
}

impl PotentialSpec {
    /// Builds a potential, merging terms that share both modes and phase.
    pub fn new(rotor_count: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        if rotor_count == 0 {
            return Err(Error::InvalidPotential("rotor count must be positive".into()));
        }
        let mut merged: Vec<FourierTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            if term.modes.len() != rotor_count {
                return Err(Error::InvalidPotential(format!(
                    "term has {} modes but the potential acts on {rotor_count} rotors",
                    term.modes.len()
                )));
            }
            match merged
                .iter_mut()
                .find(|t| t.modes == term.modes && t.phase == term.phase)
            {
                Some(existing) => existing.coefficient += term.coefficient,
                None => merged.push(term),
            }
        }
        Ok(Self {
            rotor_count,
            terms: merged,
        })
    }

    pub fn empty(rotor_count: usize) -> Self {
        Self {
            rotor_count,
            terms: Vec::new(),
        }
    }

    /// Convenience constructor from `(c, m)` pairs with zero phase.
    pub fn cosines(rotor_count: usize, terms: &[(f64, &[i64])]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(c, m)| FourierTerm::cos(c, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rotor_count, terms)
    }

    pub fn rotor_count(&self) -> usize {
        self.rotor_count
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn filtered(&self, keep: impl Fn(&FourierTerm) -> bool) -> Self {
        Self {
            rotor_count: self.rotor_count,
            terms: self.terms.iter().filter(|t| keep(t)).cloned().collect(),
        }
    }

    /// Concatenates the terms of two potentials on the same rotors.
    pub fn merged(&self, other: &PotentialSpec) -> Result<Self> {
        if other.rotor_count != self.rotor_count {
            return Err(Error::DimensionMismatch(format!(
                "cannot merge potentials on {} and {} rotors",
                self.rotor_count, other.rotor_count
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.rotor_count, terms)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rotor_count: self.rotor_count,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coefficient(t.coefficient * factor))
                .collect(),
        }
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.rotor_count);
        self.terms
            .iter()
            .map(|t| t.coefficient * t.argument(theta).cos())
            .sum()
    }

    /// `∂V/∂θ_j`.
    pub fn eval_gradient(&self, j: usize, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.rotor_count);
        self.terms
            .iter()
            .filter(|t| t.modes[j] != 0)
            .map(|t| -t.coefficient * t.modes[j] as f64 * t.argument(theta).sin())
            .sum()
    }

    /// Largest `|m_j|` over all terms.
    pub fn max_mode(&self, j: usize) -> u64 {
        self.terms
            .iter()
            .map(|t| t.modes[j].unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `Σ_terms |c|·|m_j|`, the largest momentum transfer per kick along rotor `j`.
    pub fn kick_action(&self, j: usize) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs() * t.modes[j].unsigned_abs() as f64)
            .sum()
    }

    fn check_set(&self, set: &IndexSet) -> Result<()> {
        match set.iter().next_back() {
            Some(&j) if j >= self.rotor_count => Err(Error::InvalidIndexSet(format!(
                "rotor index {j} out of range for {} rotors",
                self.rotor_count
            ))),
            _ => Ok(()),
        }
    }

    /// Splits `V` into its even (`V₊`) and odd (`V₋`) parts under the π-shift of `set`.
    pub fn decompose(&self, set: &IndexSet) -> Result<(PotentialSpec, PotentialSpec)> {
        self.check_set(set)?;
        let plus = self.filtered(|t| term_parity(t, set) == Parity::Even);
        let minus = self.filtered(|t| term_parity(t, set) == Parity::Odd);
        Ok((plus, minus))
    }

    pub fn symmetry_class(&self, set: &IndexSet) -> Result<SymmetryClass> {
        let (plus, minus) = self.decompose(set)?;
        Ok(SymmetryClass::from_parts(&plus, &minus))
    }

    /// The terms that depend on `θ_j`.
    pub fn effective_potential(&self, j: usize) -> Result<PotentialSpec> {
        if j >= self.rotor_count {
            return Err(Error::InvalidIndexSet(format!(
                "rotor index {j} out of range for {} rotors",
                self.rotor_count
            )));
        }
        Ok(self.filtered(|t| t.modes[j] != 0))
    }

    /// Routes each term to `V_A`, `V_B` or the coupling `V_I` by its support.
    pub fn split_interaction(
        &self,
        subsystem_a: &IndexSet,
    ) -> Result<(PotentialSpec, PotentialSpec, PotentialSpec)> {
        self.check_set(subsystem_a)?;
        if subsystem_a.is_empty() || subsystem_a.len() == self.rotor_count {
            return Err(Error::InvalidIndexSet(
                "subsystem A must be a nonempty proper subset of the rotors".into(),
            ));
        }
        let in_a = |t: &FourierTerm| t.support().all(|j| subsystem_a.contains(&j));
        let in_b = |t: &FourierTerm| t.support().all(|j| !subsystem_a.contains(&j));
        Ok((
            self.filtered(in_a),
            self.filtered(in_b),
            self.filtered(|t| !in_a(t) && !in_b(t)),
        ))
    }

    /// Accumulated potential after `t` exact-resonance kicks under the shift of `set`:
    /// `t·V₊` at even `t`, `t·V₊ + V₋` at odd `t`.
    pub fn accumulated(&self, set: &IndexSet, t: u64) -> Result<PotentialSpec> {
        self.check_set(set)?;
        let odd = (t % 2) as f64;
        Ok(Self {
            rotor_count: self.rotor_count,
            terms: self
                .terms
                .iter()
                .filter_map(|term| {
                    let factor = match term_parity(term, set) {
                        Parity::Even => t as f64,
                        Parity::Odd => odd,
                    };
                    (factor != 0.0).then(|| term.with_coefficient(term.coefficient * factor))
                })
                .collect(),
        })
    }

    /// Whether every term respects the higher-order translation symmetry of `plan`:
    /// `m_j` divisible by `s_j/2` for even orders and by `s_j` for odd orders.
    pub fn check_high_order_symmetry(&self, plan: &ResonancePlan) -> Result<bool> {
        if plan.rotor_count() != self.rotor_count {
            return Err(Error::DimensionMismatch(format!(
                "plan covers {} rotors, potential {}",
                plan.rotor_count(),
                self.rotor_count
            )));
        }
        Ok(self.terms.iter().all(|t| {
            t.modes.iter().enumerate().all(|(j, &m)| {
                let s = plan.order(j);
                let period = if s % 2 == 0 { s / 2 } else { s };
                m.unsigned_abs() % period == 0
            })
        }))
    }

    /// Terms that violate the higher-order translation symmetry, for error reporting.
    pub fn high_order_violations(&self, plan: &ResonancePlan) -> Vec<(usize, FourierTerm)> {
        let mut out = Vec::new();
        for t in &self.terms {
            for (j, &m) in t.modes.iter().enumerate() {
                if j >= plan.rotor_count() {
                    continue;
                }
                let s = plan.order(j);
                let period = if s % 2 == 0 { s / 2 } else { s };
                if m.unsigned_abs() % period != 0 {
                    out.push((j, t.clone()));
                }
            }
        }
        out
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Parity of `Σ_{j∈S} m_j`.
pub fn term_parity(term: &FourierTerm, set: &IndexSet) -> Parity {
    let sum: i64 = set
        .iter()
        .filter_map(|&j| term.modes.get(j))
        .copied()
        .sum();
    if sum.rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Applies the partial π-shift to a coordinate vector.
pub fn shift_coordinates(theta: &[f64], set: &IndexSet) -> Vec<f64> {
    theta
        .iter()
        .enumerate()
        .map(|(j, &t)| if set.contains(&j) { t + std::f64::consts::PI } else { t })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::Resonance;
    use std::f64::consts::PI;

    fn set(items: &[usize]) -> IndexSet {
        items.iter().copied().collect()
    }

    fn two_rotor_cosines(k1: f64, k2: f64, xi: f64) -> PotentialSpec {
        PotentialSpec::cosines(2, &[(k1, &[1, 0]), (k2, &[0, 1]), (xi, &[1, -1])]).unwrap()
    }

    #[test]
    fn parity_examples() {
        let t = FourierTerm::cos(1.0, &[1, 0]).unwrap();
        assert_eq!(term_parity(&t, &set(&[1])), Parity::Even);
        let t = FourierTerm::cos(1.0, &[1, -1]).unwrap();
        assert_eq!(term_parity(&t, &set(&[1])), Parity::Odd);
        let t = FourierTerm::cos(1.0, &[2, -1]).unwrap();
        assert_eq!(term_parity(&t, &set(&[0, 1])), Parity::Odd);
    }

    #[test]
    fn constant_term_rejected() {
        assert!(FourierTerm::cos(1.0, &[0, 0]).is_err());
    }

    #[test]
    fn duplicates_merge() {
        let v = PotentialSpec::cosines(2, &[(0.5, &[1, 0]), (0.25, &[1, 0])]).unwrap();
        assert_eq!(v.terms().len(), 1);
        assert_eq!(v.terms()[0].coefficient(), 0.75);
    }

    #[test]
    fn decompose_two_rotor_cosines_secondary_rotor() {
        let v = PotentialSpec::cosines(2, &[(0.1, &[1, 0]), (0.2, &[0, 1]), (1.0, &[1, -1])])
            .unwrap();
        let (plus, minus) = v.decompose(&set(&[1])).unwrap();
        assert_eq!(plus, PotentialSpec::cosines(2, &[(0.1, &[1, 0])]).unwrap());
        assert_eq!(
            minus,
            PotentialSpec::cosines(2, &[(0.2, &[0, 1]), (1.0, &[1, -1])]).unwrap()
        );
    }

    #[test]
    fn decompose_empty_set_is_identity() {
        let v = two_rotor_cosines(0.1, 0.2, 1.0);
        let (plus, minus) = v.decompose(&IndexSet::new()).unwrap();
        assert_eq!(plus, v);
        assert!(minus.is_empty());
    }

    #[test]
    fn decompose_purely_antisymmetric() {
        let v = PotentialSpec::cosines(2, &[(1.0, &[2, -1])]).unwrap();
        let (plus, minus) = v.decompose(&set(&[0, 1])).unwrap();
        assert!(plus.is_empty());
        assert_eq!(minus, v);
    }

    #[test]
    fn effective_potentials() {
        let v = two_rotor_cosines(2.0, 3.0, 0.1);
        assert_eq!(
            v.effective_potential(0).unwrap(),
            PotentialSpec::cosines(2, &[(2.0, &[1, 0]), (0.1, &[1, -1])]).unwrap()
        );
        assert_eq!(
            v.effective_potential(1).unwrap(),
            PotentialSpec::cosines(2, &[(3.0, &[0, 1]), (0.1, &[1, -1])]).unwrap()
        );
        let only1 = PotentialSpec::cosines(2, &[(1.0, &[1, 0])]).unwrap();
        let v2 = only1.effective_potential(1).unwrap();
        assert!(v2.is_empty());
        assert_eq!(
            v2.symmetry_class(&set(&[1])).unwrap(),
            SymmetryClass::Zero
        );
    }

    #[test]
    fn split_interaction_examples() {
        let v = two_rotor_cosines(2.0, 3.0, 0.1);
        let (a, b, i) = v.split_interaction(&set(&[0])).unwrap();
        assert_eq!(a, PotentialSpec::cosines(2, &[(2.0, &[1, 0])]).unwrap());
        assert_eq!(b, PotentialSpec::cosines(2, &[(3.0, &[0, 1])]).unwrap());
        assert_eq!(i, PotentialSpec::cosines(2, &[(0.1, &[1, -1])]).unwrap());

        let uncoupled = PotentialSpec::cosines(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        assert!(uncoupled.split_interaction(&set(&[0])).unwrap().2.is_empty());

        let v30 =
            PotentialSpec::cosines(2, &[(0.1, &[2, 0]), (0.1, &[0, 2]), (1.0, &[2, -1])]).unwrap();
        assert_eq!(
            v30.split_interaction(&set(&[0])).unwrap().2,
            PotentialSpec::cosines(2, &[(1.0, &[2, -1])]).unwrap()
        );
    }

    #[test]
    fn split_interaction_rejects_trivial_bipartitions() {
        let v = two_rotor_cosines(1.0, 1.0, 1.0);
        assert!(v.split_interaction(&IndexSet::new()).is_err());
        assert!(v.split_interaction(&set(&[0, 1])).is_err());
    }

    #[test]
    fn eval_examples() {
        let v = PotentialSpec::cosines(2, &[(1.0, &[1, 0])]).unwrap();
        assert_eq!(v.eval(&[0.0, 0.3]), 1.0);
        assert_eq!(v.eval_gradient(0, &[0.0, 0.3]), 0.0);
        let v = PotentialSpec::cosines(2, &[(1.0, &[1, -1])]).unwrap();
        assert!(v.eval(&[PI / 2.0, 0.0]).abs() < 1e-15);
        assert!((v.eval_gradient(0, &[PI / 2.0, 0.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_terms_via_phase() {
        let s = PotentialSpec::new(1, vec![FourierTerm::new(1.0, vec![1], -PI / 2.0).unwrap()])
            .unwrap();
        for &x in &[0.1, 1.0, 2.5] {
            assert!((s.eval(&[x]) - f64::sin(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn high_order_symmetry_examples() {
        let v = two_rotor_cosines(1.0, 2.0, 3.0);
        let low = ResonancePlan::new(vec![Resonance::exact(1, 1), Resonance::exact(1, 2)]).unwrap();
        assert!(v.check_high_order_symmetry(&low).unwrap());

        let s3 = ResonancePlan::new(vec![Resonance::exact(1, 3)]).unwrap();
        let c3 = PotentialSpec::cosines(1, &[(1.0, &[3])]).unwrap();
        let c1 = PotentialSpec::cosines(1, &[(1.0, &[1])]).unwrap();
        assert!(c3.check_high_order_symmetry(&s3).unwrap());
        assert!(!c1.check_high_order_symmetry(&s3).unwrap());

        let s4 = ResonancePlan::new(vec![Resonance::exact(1, 4)]).unwrap();
        let c2 = PotentialSpec::cosines(1, &[(1.0, &[2])]).unwrap();
        assert!(c2.check_high_order_symmetry(&s4).unwrap());
        assert!(!c1.check_high_order_symmetry(&s4).unwrap());
    }

    #[test]
    fn accumulated_potential_parities() {
        let v = two_rotor_cosines(0.1, 0.2, 1.0);
        let s = set(&[1]);
        let even = v.accumulated(&s, 4).unwrap();
        assert_eq!(even, PotentialSpec::cosines(2, &[(0.4, &[1, 0])]).unwrap());
        let odd = v.accumulated(&s, 3).unwrap();
        assert_eq!(
            odd,
            PotentialSpec::cosines(2, &[(0.30000000000000004, &[1, 0]), (0.2, &[0, 1]), (1.0, &[1, -1])])
                .unwrap()
        );
        assert!(v.accumulated(&s, 0).unwrap().is_empty());
    }

    #[test]
    fn display_renders_terms() {
        let v = two_rotor_cosines(0.1, 0.2, 1.0);
        assert_eq!(v.to_string(), "0.1·cos(θ1) + 0.2·cos(θ2) + 1·cos(θ1 − θ2)");
    }
}
