//! Experiment configuration: a TOML document parsed strictly, validated with
//! field paths, and echoed back with every default filled in.
//!
//! Body labels in the file are 1-based; everything handed to the core crate
//! is 0-based.

use std::collections::BTreeSet;
use std::path::Path;

use resonance_core::engine::EngineOptions;
use resonance_core::entanglement::Bipartition;
use resonance_core::initial::InitialState;
use resonance_core::potential::{FourierTerm, PotentialSpec};
use resonance_core::predictor::epsilon::MIN_SAMPLES;
use resonance_core::predictor::robust::DEFAULT_THRESHOLD;
use resonance_core::resonance::{Resonance, ResonancePlan};
use resonance_core::series::{Propagation, WINDOW_MARGIN};
use resonance_core::top::{TopSpec, TopTerm};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum System {
    #[default]
    Rotor,
    Top,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub system: System,
    pub steps: usize,
    /// Rotor kicking potential, `Σ c·cos(m·θ + φ)`.
    #[serde(default)]
    pub potential: Vec<TermConfig>,
    /// One entry per body.
    pub resonance: Vec<ResonanceConfig>,
    pub initial: InitialConfig,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub predictor: PredictorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<TopConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detune: Option<DetuneConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coefficient: f64,
    pub modes: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    /// Period numerator: `τ = 4πr/s + delta` (rotors), `β = 4πj·r/s + delta` (tops).
    pub r: u64,
    pub s: u64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `momenta` are `l_j` for rotors and `m_n` (the `J_z` eigenvalues) for tops.
    MomentumEigenstate { momenta: Vec<i64> },
    /// Rotors only; `centers` holds `[θ₀, p₀]` per rotor.
    Coherent { centers: Vec<[f64; 2]>, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    /// Bodies in subsystem A, 1-based.
    pub a: Vec<usize>,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self { a: vec![1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub tail_tolerance: f64,
    pub window_margin: u64,
    pub auto_grow: bool,
    pub max_dimension: usize,
    pub propagation: Propagation,
    /// Explicit `[l_min, l_max]` per rotor; empty uses the padding rule.
    #[serde(default)]
    pub windows: Vec<[i64; 2]>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let o = EngineOptions::default();
        Self {
            tail_tolerance: o.tail_tolerance,
            window_margin: WINDOW_MARGIN,
            auto_grow: o.auto_grow,
            max_dimension: o.max_dimension,
            propagation: Propagation::Auto,
            windows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            samples: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopConfig {
    /// Integer spin `j`.
    pub spin: u32,
    pub terms: Vec<TopTermConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopTermConfig {
    pub coefficient: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuneConfig {
    /// Detunings applied to every rotor's period; zero is not allowed.
    pub delta_tau: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Rotor whose kinetic energy is compared, 1-based.
    #[serde(default = "default_observed")]
    pub rotor: usize,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_observed() -> usize {
    1
}

/// Collects validation failures as `path: message`.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(format!("{}: {}", path.into(), message.into()));
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(self.0.join("\n")))
        }
    }
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Config = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn body_count(&self) -> usize {
        self.resonance.len()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.body_count();
        let mut p = Problems::default();
        p.check(n >= 1, "resonance", "at least one body is required");
        for (i, r) in self.resonance.iter().enumerate() {
            p.check(r.s >= 1, format!("resonance[{i}].s"), "order must be at least 1");
            p.check(r.r >= 1, format!("resonance[{i}].r"), "numerator must be at least 1");
            p.check(r.delta.is_finite(), format!("resonance[{i}].delta"), "must be finite");
            if r.r >= 1 && r.s >= 1 {
                p.check(gcd(r.r, r.s) == 1, format!("resonance[{i}]"), format!("r = {} and s = {} must be coprime", r.r, r.s));
            }
        }
        match self.system {
            System::Rotor => {
                p.check(self.top.is_none(), "top", "only allowed with system = \"top\"");
                for (i, t) in self.potential.iter().enumerate() {
                    p.check(t.modes.len() == n, format!("potential[{i}].modes"), format!("needs {n} entries, one per rotor"));
                    p.check(t.modes.iter().any(|&m| m != 0), format!("potential[{i}].modes"), "constant terms are not allowed");
                    p.check(t.coefficient.is_finite(), format!("potential[{i}].coefficient"), "must be finite");
                    p.check(t.phase.is_finite(), format!("potential[{i}].phase"), "must be finite");
                }
            }
            System::Top => {
                p.check(self.potential.is_empty(), "potential", "rotor potentials are not allowed with system = \"top\"; use top.terms");
                match &self.top {
                    None => p.check(false, "top", "required with system = \"top\""),
                    Some(top) => {
                        p.check(top.spin >= 1, "top.spin", "must be a positive integer");
                        for (i, t) in top.terms.iter().enumerate() {
                            p.check(t.powers.len() == n, format!("top.terms[{i}].powers"), format!("needs {n} entries, one per top"));
                            p.check(t.powers.iter().any(|&k| k > 0), format!("top.terms[{i}].powers"), "at least one power must be positive");
                            p.check(t.coefficient.is_finite(), format!("top.terms[{i}].coefficient"), "must be finite");
                        }
                    }
                }
                p.check(
                    matches!(self.initial, InitialConfig::MomentumEigenstate { .. }),
                    "initial.type",
                    "tops start from a J_z eigenstate (momentum_eigenstate)",
                );
            }
        }
        match &self.initial {
            InitialConfig::MomentumEigenstate { momenta } => {
                p.check(momenta.len() == n, "initial.momenta", format!("needs {n} entries"));
                if let (System::Top, Some(top)) = (self.system, &self.top) {
                    p.check(
                        momenta.iter().all(|m| m.unsigned_abs() <= top.spin as u64),
                        "initial.momenta",
                        format!("J_z eigenvalues must lie in [-{0}, {0}]", top.spin),
                    );
                }
            }
            InitialConfig::Coherent { centers, width } => {
                p.check(centers.len() == n, "initial.centers", format!("needs {n} [theta, p] pairs"));
                p.check(centers.iter().flatten().all(|x| x.is_finite()), "initial.centers", "must be finite");
                p.check(*width > 0.0 && width.is_finite(), "initial.width", "must be positive");
            }
        }
        let a: BTreeSet<usize> = self.partition.a.iter().copied().collect();
        p.check(a.len() == self.partition.a.len(), "partition.a", "duplicate body labels");
        p.check(self.partition.a.iter().all(|&j| j >= 1 && j <= n), "partition.a", format!("labels must lie in 1..={n}"));
        p.check(n < 2 || (!a.is_empty() && a.len() < n), "partition.a", "must be a nonempty proper subset of the bodies");
        let e = &self.engine;
        p.check(e.tail_tolerance > 0.0 && e.tail_tolerance < 1.0, "engine.tail_tolerance", "must lie in (0, 1)");
        p.check(e.max_dimension >= 4, "engine.max_dimension", "must be at least 4");
        p.check(e.windows.is_empty() || e.windows.len() == n, "engine.windows", format!("needs {n} windows or none"));
        for (i, w) in e.windows.iter().enumerate() {
            p.check(w[1] - w[0] >= 3, format!("engine.windows[{i}]"), "window needs at least 4 momenta");
        }
        p.check(
            self.predictor.samples >= MIN_SAMPLES,
            "predictor.samples",
            format!("at least {MIN_SAMPLES} samples are required"),
        );
        if let Some(d) = &self.detune {
            p.check(!d.delta_tau.is_empty(), "detune.delta_tau", "at least one detuning is required");
            for (i, x) in d.delta_tau.iter().enumerate() {
                p.check(
                    *x != 0.0,
                    format!("detune.delta_tau[{i}]"),
                    "zero detuning is the reference run, not a scan point",
                );
                p.check(x.is_finite(), format!("detune.delta_tau[{i}]"), "must be finite");
            }
            p.check(d.threshold > 0.0 && d.threshold < 1.0, "detune.threshold", "must lie in (0, 1)");
            p.check(d.rotor >= 1 && d.rotor <= n, "detune.rotor", format!("must lie in 1..={n}"));
        }
        p.finish()
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, CliError> {
        let terms = self
            .potential
            .iter()
            .map(|t| FourierTerm::new(t.coefficient, t.modes.clone(), t.phase))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PotentialSpec::new(self.body_count(), terms)?)
    }

    pub fn plan(&self) -> Result<ResonancePlan, CliError> {
        Ok(ResonancePlan::new(
            self.resonance.iter().map(|r| Resonance::detuned(r.r, r.s, r.delta)).collect(),
        )?)
    }

    pub fn initial_state(&self) -> InitialState {
        match &self.initial {
            InitialConfig::MomentumEigenstate { momenta } => InitialState::MomentumEigenstate { momenta: momenta.clone() },
            InitialConfig::Coherent { centers, width } => InitialState::Coherent {
                centers: centers.iter().map(|c| (c[0], c[1])).collect(),
                width: *width,
            },
        }
    }

    /// `None` for a single body.
    pub fn bipartition(&self) -> Result<Option<Bipartition>, CliError> {
        if self.body_count() < 2 {
            return Ok(None);
        }
        let a = self.partition.a.iter().map(|j| j - 1).collect();
        Ok(Some(Bipartition::new(a, self.body_count())?))
    }

    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            tail_tolerance: self.engine.tail_tolerance,
            auto_grow: self.engine.auto_grow,
            max_dimension: self.engine.max_dimension,
        }
    }

    pub fn top_spec(&self) -> Result<TopSpec, CliError> {
        let top = self
            .top
            .as_ref()
            .ok_or_else(|| CliError::Validation("top: required with system = \"top\"".into()))?;
        let terms = top
            .terms
            .iter()
            .map(|t| TopTerm::new(t.coefficient, t.powers.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TopSpec::new(top.spin, self.plan()?, terms)?)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
