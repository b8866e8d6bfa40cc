//! Event-driven simulation and analysis of inelastic collapse for three hard
//! spheres in dimension `dim ≥ 2`.
//!
//! The library has three layers:
//!
//! * **Exact dynamics** — [`engine`] integrates the r-inelastic hard-sphere
//!   flow for three unit-diameter, unit-mass spheres in absolute coordinates:
//!   free flight, cancellation-stable collision-time root solving, and the
//!   inelastic collision rule `η ↦ −rη` on the contact normal.
//! * **The collision map** — [`map`] expresses one collision in the frame of
//!   the central particle as a discrete dynamical system on
//!   `(ω₁, W₁, gap, ω₂, W₂)` and iterates it. A scaled-representation iterator
//!   ([`map::iterate_scaled`]) carries the collapsing scalars (gap, flight
//!   time, normal velocity components) with an extended binary exponent so
//!   that certified runs can resolve hundreds of collisions, far beyond the
//!   dynamic range of absolute `f64` positions.
//! * **Analysis** — [`analysis`] classifies collision orders and checks
//!   summability/convergence diagnostics; [`nearlinear`] builds the explicit
//!   nearly-linear-collapse construction (admissibility thresholds, the
//!   constant pipeline, a seeded sampler for certified initial data, and the
//!   ten-condition recursion verifier); [`triangular`] covers the triangular
//!   collision order: collision matrices, the limiting velocity matrix, its
//!   4×4 restriction and spectrum, admissibility cones, and the sign identity
//!   behind the order theorem.
//!
//! All public types are immutable values; every operation is a pure function
//! of its inputs. Randomness only enters through explicitly seeded generators,
//! so every result in the crate is reproducible bit-for-bit.

pub mod analysis;
pub mod complex;
pub mod core;
pub mod engine;
pub mod error;
pub mod map;
pub mod nearlinear;
pub mod tol;
pub mod triangular;
pub mod vec;
pub mod wide;

pub use crate::core::{NormalTangential, Pair, RelativeConfig, Restitution, SystemState};
pub use error::{Error, Result};
pub use vec::VecD;
pub use wide::Wide;
