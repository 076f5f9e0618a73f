//! Decoherence-time estimators for charged-ion and dipole couplings to a
//! thermal environment particle, cross-checked by a brute-force
//! phase-average quadrature oracle.
//!
//! The closed forms come in two flavors per interaction: a narrow-wavepacket
//! form valid when the thermal de Broglie wavelength is small against the
//! separation, and a broad-wavepacket form for the opposite limit. The
//! oracle evaluates the unapproximated ensemble average
//! `D(t) = |∫ w(x) exp(-i ΔV(x) t / ħ) dx| / ∫ w(x) dx` and the two are
//! compared in the regimes where each approximation should hold.

pub mod cli;
pub mod estimators;
pub mod evolution;
pub mod interactions;
pub mod quantities;
pub mod regimes;
pub mod scenarios;

pub use estimators::{Method, ScenarioParams, TauEstimate};
pub use evolution::{DecayCurve, EnsembleSpec, QuadratureConfig};
pub use interactions::Interaction;
pub use quantities::{Constants, Dimension, Quantity};
pub use regimes::{classify_regime, crossover_temperature, Regime};
pub use scenarios::{builtin_scenarios, table1_report, ComparisonReport};
