//! Synthesis, LNN routing and hardware time-cost accounting for the quantum
//! Fourier transform on nuclear-spin quantum computers.
//!
//! The pipeline is `synth` (build and lower circuits), `route` (place them on
//! a linear nearest-neighbour chain), `cost` (exact time-cost under duration
//! or intensity control) with `simulate` as the small-register oracle.

pub mod circuit_ir;
pub mod cost;
pub mod dyadic;
pub mod error;
pub mod exec;
pub mod route;
pub mod simulate;
pub mod synth;

pub use circuit_ir::{gate_census, Census, Circuit, DyadicAngle, Gate, GateKind, Stage};
pub use cost::{ControlMode, CostReport, CurveKind, CurveRow, HardwareModel, UnitPolicy};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use exec::Execution;
