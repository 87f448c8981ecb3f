//! Many-body quantum kicked rotors and kicked tops held at quantum resonance.
//!
//! The crate is organised around a single symbolic description of the kicking
//! potential ([`potential::PotentialSpec`]) from which everything else is derived:
//!
//! * [`potential`]: Fourier-series algebra, partial π-shift parity and the
//!   higher-order translation condition.
//! * [`resonance`]: exact rational resonance plans with floating-point detuning.
//! * [`rotor`] and [`engine`]: truncated momentum lattices, split-step and
//!   factorised propagators, wavepacket moments.
//! * [`entanglement`]: bipartite purity and linear entropy.
//! * [`predictor`]: closed-form wavepacket and entropy laws, regime
//!   classification and detuning robustness analysis.
//! * [`top`]: the spin-`j` kicked top counterpart.
//!
//! Rotor indices are zero-based throughout the API.

pub mod engine;
pub mod entanglement;
pub mod error;
pub mod initial;
pub mod potential;
pub mod predictor;
pub mod resonance;
pub mod rotor;
pub mod series;
pub mod stats;
pub mod top;

mod tensor;

pub use error::{Error, Result};

pub use num_complex::Complex64;
