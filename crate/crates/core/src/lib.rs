//! Exact regeneration, solving, and independent verification of the finite
//! certificates behind a 4-uniform matching-board bound.
//!
//! Everything here is exact: integers, rationals, bitmask set algebra. No
//! floating-point value ever influences an accept/reject decision.

pub mod board;
pub mod board11;
pub mod board15;
pub mod certio;
pub mod clauses;
pub mod ferrers;
pub mod lattice;
pub mod lp;
pub mod manifest;
pub mod notopstar;
pub mod orchestrator;
pub mod rat;
pub mod report;
pub mod threshold;
pub mod topstar;

pub use rat::Rat;
