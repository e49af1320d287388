//! Solver and simulator for a property-rights extension game.
//!
//! An initial elite decides how far to extend property rights before
//! agents invest and before the (new) elite choose between expropriation
//! and public-good provision. The crate solves the one-shot game in closed
//! form, cross-checks it by brute-force backward induction, simulates the
//! repeated game under learning-by-doing productivity growth, and solves a
//! variant with in-group altruism.

pub mod commands;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod identity;
pub mod oracle;
pub mod production;
pub mod report;
pub mod root;
pub mod sweep;

pub use error::{Error, Result};
pub use game::{EquilibriumOutcome, GameParams, Institution};
pub use production::{Marginal, ProductionSpec};
