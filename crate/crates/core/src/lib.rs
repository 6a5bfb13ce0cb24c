//! Shaped-pulse position measurements on a qubit-coupled mechanical
//! resonator, and conditional preparation of resonator states from thermal
//! equilibrium.
//!
//! Positions are dimensionless with `sqrt(2) X = b + b^dag`; drive times are
//! in units of `1/lambda0`.

pub mod basis;
pub mod budget;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod grid;
pub mod operator;
pub mod params;
pub mod protocol;
pub mod pulse;
pub mod state;
pub mod synthesis;
pub mod targets;
pub mod validation;

pub use basis::BasisTransform;
pub use dynamics::{analytic_tophat, propagate_point, realize_operator, TwoLevelAmplitudes};
pub use engine::{
    apply_measurement, momentum_marginal, position_marginal, purity, rotate, state_fidelity,
    thermal_state, wigner, WignerMap,
};
pub use error::{Error, Result};
pub use grid::{GridFunction, PositionGrid};
pub use num_complex::Complex64 as C64;
pub use operator::MeasurementOperator;
pub use params::SystemParams;
pub use protocol::{ProtocolConfig, ProtocolResult, Steps};
pub use pulse::Pulse;
pub use state::QuantumState;
pub use synthesis::{operator_fidelity, optimize_chi, synthesize_pulse, ChiOptimum, SynthesisConfig};
pub use targets::TargetSpec;
