//! Distance colorings of the face-centered cubic grid.
//!
//! * [`lattice`]: vertices in doubled coordinates, the closed-form distance
//!   and its breadth-first oracle, finite regions.
//! * [`balls`]: extremal balls and shells, and the clique lower bounds they give.
//! * [`colorings`]: explicit periodic colorings and their verifiers.
//! * [`search`]: exact k-colorability search, forced-color checks, fact
//!   scripts and DIMACS export.

pub mod balls;
pub mod colorings;
pub mod lattice;
pub mod search;

pub use lattice::{distance, Metric, Region, Site};
