//! Quantum trajectory simulation of double-slit interference.
//!
//! Two trajectory schemes are supported over the same pair of wave models:
//!
//! * **dBB** — de Broglie–Bohm trajectories. The velocity field is the real
//!   part of `-i (ħ/m) ∇ψ/ψ` and the motion stays in real 3-space.
//! * **MdBB** — modified de Broglie–Bohm trajectories. The full complex
//!   velocity `-i (ħ/m) ∇ψ/ψ` is integrated in complexified space, so every
//!   coordinate carries a real and an imaginary part.
//!
//! The wave models are a two-Gaussian wave packet and a stationary
//! "dispherical" wave (two point sources), both describing a screen-and-two-
//! holes geometry. Ensembles of trajectories are integrated with a fixed-step
//! RK4 scheme, screen arrivals are collected, and the arrival histogram is
//! compared against the analytic `|ψ|²` density.

pub mod analysis;
pub mod crossings;
pub mod ensemble;
pub mod errors;
pub mod integrator;
pub mod point;
pub mod wavefield;

pub use errors::{ConfigError, FieldError};
pub use point::Complex3;
