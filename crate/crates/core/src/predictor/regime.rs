//! Dynamical regimes implied by the symmetry classes of the effective and coupling potentials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::potential::{IndexSet, PotentialSpec, SymmetryClass};
use crate::resonance::ResonancePlan;

/// Momentum-spreading regime of one rotor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpreadingRegime {
    /// No kick acts on the rotor.
    Frozen,
    Quadratic,
    Oscillation,
    Hybrid,
}

/// Entanglement regime of the bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglementRegime {
    /// No coupling across the cut.
    Unentangled,
    QuadraticThenSaturation,
    Oscillation,
    HybridThenSaturation,
}

impl From<SymmetryClass> for SpreadingRegime {
    fn from(c: SymmetryClass) -> Self {
        match c {
            SymmetryClass::Zero => SpreadingRegime::Frozen,
            SymmetryClass::Symmetric => SpreadingRegime::Quadratic,
            SymmetryClass::Antisymmetric => SpreadingRegime::Oscillation,
            SymmetryClass::Asymmetric => SpreadingRegime::Hybrid,
        }
    }
}

impl From<SymmetryClass> for EntanglementRegime {
    fn from(c: SymmetryClass) -> Self {
        match c {
            SymmetryClass::Zero => EntanglementRegime::Unentangled,
            SymmetryClass::Symmetric => EntanglementRegime::QuadraticThenSaturation,
            SymmetryClass::Antisymmetric => EntanglementRegime::Oscillation,
            SymmetryClass::Asymmetric => EntanglementRegime::HybridThenSaturation,
        }
    }
}

impl fmt::Display for SpreadingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpreadingRegime::Frozen => "none",
            SpreadingRegime::Quadratic => "quadratic",
            SpreadingRegime::Oscillation => "period-2 oscillation",
            SpreadingRegime::Hybrid => "hybrid",
        })
    }
}

impl fmt::Display for EntanglementRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglementRegime::Unentangled => "none",
            EntanglementRegime::QuadraticThenSaturation => "quadratic growth then saturation",
            EntanglementRegime::Oscillation => "period-2 oscillation",
            EntanglementRegime::HybridThenSaturation => "hybrid then saturation",
        })
    }
}

/// How the plan qualifies for the factorised description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eligibility {
    /// Every rotor at order 1 or 2.
    LowOrder,
    /// Higher orders with the matching translation symmetry of the potential.
    HighOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotorRegime {
    pub rotor: usize,
    pub class: SymmetryClass,
    pub regime: SpreadingRegime,
    /// Class of the coupling terms acting on this rotor.
    pub coupling_class: SymmetryClass,
}

/// Outcome of the selection-rule checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRule {
    /// Symmetric coupling leaves no coupled rotor antisymmetric.
    pub symmetric_coupling_ok: bool,
    /// Antisymmetric coupling leaves no coupled rotor symmetric.
    pub antisymmetric_coupling_ok: bool,
}

impl SelectionRule {
    pub fn is_consistent(&self) -> bool {
        self.symmetric_coupling_ok && self.antisymmetric_coupling_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub eligibility: Eligibility,
    /// Rotors shifted by π (zero-based).
    pub shifted: IndexSet,
    pub rotors: Vec<RotorRegime>,
    pub interaction_class: SymmetryClass,
    pub interaction_regime: EntanglementRegime,
    pub selection_rule: SelectionRule,
}

/// Checks that `plan` admits the factorised description for `v`, returning the shifted set.
pub fn eligibility(v: &PotentialSpec, plan: &ResonancePlan) -> Result<(Eligibility, IndexSet)> {
    if plan.rotor_count() != v.rotor_count() {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {} rotors, potential {}",
            plan.rotor_count(),
            v.rotor_count()
        )));
    }
    if !plan.is_exact() {
        return Err(Error::IneligiblePlan(
            "detuned plans have no closed-form classification".into(),
        ));
    }
    if plan.is_low_order() {
        return Ok((Eligibility::LowOrder, plan.even_set()));
    }
    if v.check_high_order_symmetry(plan)? {
        return Ok((Eligibility::HighOrder, plan.even_set()));
    }
    let detail: Vec<String> = v
        .high_order_violations(plan)
        .iter()
        .map(|(j, term)| {
            let s = plan.order(*j);
            let period = if s % 2 == 0 { s / 2 } else { s };
            format!(
                "term {term}: mode {} on rotor {} is not a multiple of {period} (order {s})",
                term.modes()[*j],
                j + 1
            )
        })
        .collect();
    Err(Error::IneligiblePlan(format!(
        "potential lacks the translation symmetry of the resonance orders: {}",
        detail.join("; ")
    )))
}

pub fn classify_regimes(v: &PotentialSpec, plan: &ResonancePlan, part: &Bipartition) -> Result<RegimeReport> {
    let (eligibility, shifted) = eligibility(v, plan)?;
    let (_, _, coupling) = v.split_interaction(part.a())?;
    let interaction_class = coupling.symmetry_class(&shifted)?;
    let mut rotors = Vec::with_capacity(v.rotor_count());
    for j in 0..v.rotor_count() {
        let class = v.effective_potential(j)?.symmetry_class(&shifted)?;
        let coupling_class = coupling.effective_potential(j)?.symmetry_class(&shifted)?;
        rotors.push(RotorRegime {
            rotor: j,
            class,
            regime: class.into(),
            coupling_class,
        });
    }
    let coupled = || rotors.iter().filter(|r| r.coupling_class != SymmetryClass::Zero);
    let selection_rule = SelectionRule {
        symmetric_coupling_ok: interaction_class != SymmetryClass::Symmetric
            || coupled().all(|r| r.class != SymmetryClass::Antisymmetric),
        antisymmetric_coupling_ok: interaction_class != SymmetryClass::Antisymmetric
            || coupled().all(|r| r.class != SymmetryClass::Symmetric),
    };
    Ok(RegimeReport {
        eligibility,
        shifted,
        rotors,
        interaction_class,
        interaction_regime: interaction_class.into(),
        selection_rule,
    })
}
