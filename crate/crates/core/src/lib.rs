//! Predicted-occupancy grids for traffic scenes.
//!
//! The model-based path simulates weighted maneuver hypotheses of every traffic
//! participant and accumulates them into per-cell occupancy probabilities. The
//! learned path maps an augmented occupancy grid of the current scene to the
//! same grids with one random forest per cell and prediction instance.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod evaluation;
pub mod forest;
pub mod geometry;
pub mod grid;
pub mod hypotheses;
pub mod pipeline;
pub mod scenario;

pub use error::{Error, Result};
