//! Fixed-point iterations for nonexpansive operators on ℝⁿ.
//!
//! The crate provides Picard, Krasnosel'skiĭ–Mann (KM) and Halpern runners
//! together with diagnostics that re-check, iterate by iterate, the
//! inequalities their convergence theory rests on: Fejér monotonicity,
//! the KM key inequality, the Halpern coupling bound and exponential
//! estimate, and identification of the limit against exact projections.
//!
//! Modules, bottom-up:
//!
//! - [`hilbert`]: vectors, inner products, sequence convergence verdicts.
//! - [`sets`]: closed convex sets with exact projections and a sampling oracle.
//! - [`operators`]: composable nonexpansive operators and sampled certification.
//! - [`iterate`]: step-weight schedules and the three runners.
//! - [`diagnostics`]: per-trace checks of the convergence inequalities.
//! - [`cli`]: declarative experiment files, CSV traces and run summaries.

pub mod cli;
pub mod diagnostics;
mod error;
pub mod hilbert;
pub mod iterate;
pub mod operators;
pub(crate) mod rng;
pub mod sets;

pub use error::{Error, Result};
pub use hilbert::Vector;
pub use iterate::{IterationTrace, Method, Schedule, StopReason};
pub use operators::OperatorDesc;
pub use sets::ConvexSetDesc;
