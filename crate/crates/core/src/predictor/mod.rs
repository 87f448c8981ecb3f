//! Closed-form wavepacket and entanglement laws at exact resonance, regime
//! classification, and detuning robustness analysis.

pub mod epsilon;
pub mod params;
pub mod regime;
pub mod robust;

pub use epsilon::{crossover_time, epsilon_moments, slin_exact, EpsilonMoments, EpsilonSamples, Estimate};
pub use params::{predict_moments, wavepacket_params, WavepacketParams};
pub use regime::{classify_regimes, EntanglementRegime, RegimeReport, SpreadingRegime};
pub use robust::{agreement_time, deviation_series, scaling_fit, RobustnessResult};
