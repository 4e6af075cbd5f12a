//! Quantum limits to nanomechanical inertial mass sensing.
//!
//! Two sensors are modelled: a free cantilever driven on resonance, whose
//! frequency noise is set by thermal and zero-point motion, and a cantilever that
//! forms the end mirror of a laser-driven Fabry-Pérot cavity, where the linearised
//! optomechanical fluctuations set the mirror's displacement variance.
//!
//! All quantities are SI. Masses are converted to electron masses or daltons only
//! for display (see [`constants::MassUnit`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod constants;
pub mod free_sensor;
pub mod noise;
pub mod numerics;
pub mod params;
pub mod sweep;

pub use cavity::{cavity_min_mass, solve_lyapunov, solve_steady_state, stability_check};
pub use free_sensor::{min_detectable_mass, min_detectable_mass_classical, sweep_temperature};
pub use noise::BandIntegralMethod;
pub use params::{CavityInput, CavityParams, Detuning, FreeSensorInput, FreeSensorParams};
