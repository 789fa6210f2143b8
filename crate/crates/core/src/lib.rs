//! Slip detection and grasp/release control for a single-actuated,
//! cable-driven prosthetic hand, with a simulated hand and a scenario
//! harness.

pub mod control;
pub mod detector;
pub mod harness;
pub mod plant;
pub mod signal;
