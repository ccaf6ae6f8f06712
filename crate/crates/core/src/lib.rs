//! Simulation laboratory for the one-dimensional spatial Λ-Fleming-Viot
//! process with selection (SΛFVS) and its dual system of branching and
//! coalescing lineages.
//!
//! The crate is organised by subsystem:
//!
//! * [`model`]: parameters, the radius measure and closed-form limit constants.
//! * [`events`]: the driving Poisson point process of reproduction events.
//! * [`dual`]: the dual lineage process, extremal traces and net diagnostics.
//! * [`forward`]: the forward-in-time allele-frequency field.
//! * [`pair`]: the coupled left-most/right-most pair and its regime clocks.
//! * [`limit`]: scaling-limit reference samplers and statistical tests.
//! * [`path`]: càdlàg path spaces, compactification and Skorohod-type metrics.
//! * [`experiments`]: reproducible experiment drivers producing result tables.
//!
//! All coordinates are rescaled: at stage `n` an atom of radius `r` in the
//! radius measure produces events of radius `r / sqrt(n)` and time runs on
//! the rescaled clock.

pub mod dual;
pub mod error;
pub mod events;
pub mod experiments;
pub mod forward;
pub mod limit;
pub mod model;
pub mod pair;
pub mod path;
pub mod replicates;
pub mod rng;
pub mod stats;

pub use error::{Result, SimError};
pub use model::{LimitConstants, ModelParams, RadiusMeasure};
