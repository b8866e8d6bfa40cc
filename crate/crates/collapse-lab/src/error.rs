//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Variants are grouped by the
//! contract they enforce: construction of domain values, frame extraction,
//! collision preconditions, and the admissibility conditions of the
//! nearly-linear-collapse construction. Dynamical outcomes that are *data*
//! rather than failures (a run ending in a triple collision, a certificate
//! recording a violated condition) are not errors; they are reported through
//! the corresponding result types.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector or state was built with a spatial dimension below 2.
    #[error("spatial dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    /// A restitution coefficient outside the open interval (0, 1).
    #[error("restitution coefficient must satisfy 0 < r < 1, got {0}")]
    InvalidRestitution(f64),

    /// A generic invalid argument with context.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A direction vector that should be unit length is not.
    #[error("expected a unit vector, got norm {norm} (tolerance {tol})")]
    NonUnitVector { norm: f64, tol: f64 },

    /// Two spheres overlap beyond the allowed tolerance.
    #[error("overlapping spheres: pair {pair} at distance {distance}")]
    Overlap { pair: &'static str, distance: f64 },

    /// Frame extraction was asked for a contact pair that is not in contact.
    #[error("pair {pair} is not in contact: distance {distance} differs from 1 beyond tolerance")]
    NotInContact { pair: &'static str, distance: f64 },

    /// A collision was applied to a pair that is not approaching.
    #[error("pair {pair} is not approaching: normal relative velocity {eta} is nonnegative")]
    NotApproaching { pair: &'static str, eta: f64 },

    /// Free flight produced an overlap: the requested time step crossed a collision.
    #[error("free flight of {dt} overran a collision: pair {pair} ends at distance {distance}")]
    FlightOverrun {
        dt: f64,
        pair: &'static str,
        distance: f64,
    },

    /// Two distinct pairs reach contact within the triple-collision window.
    #[error("triple collision: pairs {first} and {second} collide within relative window {window:e}")]
    TripleCollision {
        first: &'static str,
        second: &'static str,
        window: f64,
    },

    /// The selected collision root is tangential to machine precision.
    #[error("grazing collision for pair {pair}: 1 - zeta = {one_minus_zeta:e} below the grazing guard")]
    Grazing {
        pair: &'static str,
        one_minus_zeta: f64,
    },

    /// The Zhou–Kadanoff parameter is undefined because the normal component vanishes.
    #[error("Zhou-Kadanoff parameter undefined: normal component eta2 is zero")]
    UndefinedParameter,

    /// The configuration is outside the collision map's domain.
    #[error("outside the collision-map domain: {0}")]
    MapDomain(String),

    /// No future collision exists for the requested pair.
    #[error("no collision scheduled: {0}")]
    NoCollision(String),

    /// The requested angle/restitution pair admits no collapse construction.
    #[error("no construction: {0}")]
    NoConstruction(String),

    /// An I/O failure, carried with the offending path.
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}
