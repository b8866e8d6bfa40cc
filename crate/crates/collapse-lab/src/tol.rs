//! Centralized numerical tolerances.
//!
//! Every tolerance used by the library lives here, with its rationale, so
//! tests and documentation can reference them by name instead of repeating
//! magic numbers. Two kinds of constants appear:
//!
//! * **absolute tolerances** on quantities with a fixed natural scale (unit
//!   vectors, sphere diameters normalized to 1);
//! * **relative factors** for quantities whose scale varies over hundreds of
//!   orders of magnitude along a collapse (flight times, discriminants). For
//!   these, an absolute threshold would be dimensionally meaningless: the
//!   guards are applied as fractions of the locally relevant scale.

/// Maximum allowed penetration of two spheres, as a deviation of the
/// center-to-center distance below 1. Collision events land on the contact
/// sphere to machine precision; this allows a comfortable margin of
/// accumulated rounding (~10⁴ ulps at unit scale) while still rejecting any
/// genuinely overlapping input.
pub const OVERLAP_TOL: f64 = 1e-12;

/// Maximum deviation of a contact pair's distance from 1 for operations that
/// require the pair to be exactly in contact (frame extraction, applying a
/// collision). Looser than [`OVERLAP_TOL`] because a flight lands on the
/// contact sphere with error proportional to the flight time times velocity,
/// not just rounding of the state itself.
pub const CONTACT_TOL: f64 = 1e-10;

/// Maximum deviation of a direction vector's norm from 1. Directions are
/// renormalized whenever they are produced, so anything beyond a few ulps
/// indicates a genuine construction error.
pub const UNIT_TOL: f64 = 1e-12;

/// Grazing guard, applied relative to the collision quadratic's scale: a
/// selected collision root is rejected as grazing when the discriminant
/// satisfies `Δ ≤ GRAZING_TOL · b²`, i.e. when `1 − ζ ≤ GRAZING_TOL`. At a
/// grazing collision the two quadratic roots coalesce and the contact normal
/// is orthogonal to the relative velocity to within rounding; the dynamics is
/// not trustworthy past that point, so the run reports it instead of
/// continuing silently.
pub const GRAZING_TOL: f64 = 1e-13;

/// Triple-collision guard, applied relative to the candidate times: two
/// distinct pairs reaching contact within `TRIPLE_TOL · max(t₁, t₂)` of each
/// other make the collision order ill-defined at working precision, and the
/// flow itself is ill-posed at an exact triple contact.
pub const TRIPLE_TOL: f64 = 1e-13;

/// Gap floor for iterating the collision map on plain `f64` configurations.
/// Below this, `gap(2+gap)` and the Zhou–Kadanoff parameter carry no correct
/// bits at unit scale; the map iteration reports a degenerate gap instead of
/// producing noise. (The scaled-representation iterator is exempt: its gap
/// carries its own exponent and never loses relative precision.)
pub const DEGENERATE_GAP: f64 = 1e-15;

/// Floor on the center separation excess used by the absolute-coordinate
/// engine's scheduler. When the closing pair's `|x|² − 1` falls below this,
/// the subtraction has lost most of its significant bits at unit scale
/// (machine epsilon sits at ~2.2e-16) and computed flight times would be
/// noise; the run terminates with a resolution outcome instead.
pub const ENGINE_GAP_FLOOR: f64 = 1e-13;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_are_positive_and_ordered() {
        assert!(OVERLAP_TOL > 0.0);
        assert!(CONTACT_TOL > 0.0);
        assert!(UNIT_TOL > 0.0);
        assert!(GRAZING_TOL > 0.0);
        assert!(TRIPLE_TOL > 0.0);
        assert!(DEGENERATE_GAP > 0.0);
        assert!(ENGINE_GAP_FLOOR > 0.0);
        // Contact checks must tolerate at least as much as state validity does,
        // and the engine's scheduling floor must sit above pure rounding noise.
        assert!(CONTACT_TOL > OVERLAP_TOL);
        assert!(ENGINE_GAP_FLOOR > f64::EPSILON);
        assert!(DEGENERATE_GAP > f64::EPSILON * 1e-3);
    }
}
