//! Finite-dimensional iterated function systems on point clouds.
//!
//! The crate provides:
//!
//! * [`spaces`]: points, affine/clamped/builtin maps, words (finite
//!   compositions) and function systems on an axis-aligned domain box;
//! * [`metrics`]: pseudometric descriptors, multimetrics, diameters and the
//!   brute-force Hausdorff distance between point clouds;
//! * [`oscillation`]: empirical and analytic oscillation profiles and the
//!   six-way contractivity classifier (Banach, Rakotch, Krasnoselskii,
//!   Matkowski, eventual, Edelstein) with tri-state verdicts;
//! * [`hutchinson`]: the Hutchinson operator on clouds, deterministic
//!   attractor iteration, the chaos game and the symbolic coding map;
//! * [`remetrize`]: the sup-weighted remetrization `d̂` with a certified
//!   truncation tail, and the Banach-power metric;
//! * [`corpus`]: built-in fixture systems with pinned expected verdicts.
//!
//! The crate is `no_std` (with `alloc`); all types are immutable values and
//! all operations are pure functions, so everything is `Send + Sync`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod hutchinson;
pub mod metrics;
pub mod oscillation;
pub mod remetrize;
pub mod rng;
pub mod spaces;

pub use metrics::{Cloud, Multimetric, PseudometricDescriptor};
pub use oscillation::{ClassifyConfig, Condition, ContractivityReport, Verdict};
pub use spaces::{DomainBox, IfsSystem, MapDescriptor, Point, Word};
