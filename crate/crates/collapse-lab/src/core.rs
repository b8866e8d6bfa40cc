//! Core state types for three unit-diameter, unit-mass hard spheres.
//!
//! The system is three spheres in dimension `d ≥ 2` moving ballistically
//! between binary collisions. A collision of pair `(i, j)` with unit contact
//! normal `ω` (pointing from `i` to `j`) and relative velocity `w = v_j - v_i`
//! reflects the normal component inelastically, `η = w·ω ↦ -r·η`, and leaves
//! the tangential part untouched. This module holds the absolute description
//! ([`SystemState`]), the pair bookkeeping ([`Pair`]), the normal/tangential
//! splitting ([`decompose`]), and the two-pair relative description
//! ([`RelativeConfig`]) used by the collision map: one pair exactly in
//! contact, the other separated by a small gap, both expressed relative to
//! their shared particle.

use crate::error::{Error, Result};
use crate::tol::{CONTACT_TOL, OVERLAP_TOL};
use crate::vec::VecD;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Normal restitution coefficient, restricted to the inelastic range
/// `0 < r < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Restitution(f64);

impl Restitution {
    pub fn new(r: f64) -> Result<Restitution> {
        if r.is_finite() && r > 0.0 && r < 1.0 {
            Ok(Restitution(r))
        } else {
            Err(Error::InvalidRestitution(r))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// One of the three unordered particle pairs, named by member indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    /// Particles 0 and 1.
    P01,
    /// Particles 0 and 2.
    P02,
    /// Particles 1 and 2.
    P12,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P01, Pair::P02, Pair::P12];

    /// Member indices `(i, j)` with `i < j`.
    #[inline]
    pub fn members(self) -> (usize, usize) {
        match self {
            Pair::P01 => (0, 1),
            Pair::P02 => (0, 2),
            Pair::P12 => (1, 2),
        }
    }

    /// The particle not belonging to this pair.
    #[inline]
    pub fn spectator(self) -> usize {
        match self {
            Pair::P01 => 2,
            Pair::P02 => 1,
            Pair::P12 => 0,
        }
    }

    /// The particle shared with another, distinct pair.
    /// Any two distinct pairs of three particles share exactly one member.
    pub fn common_member(self, other: Pair) -> Option<usize> {
        if self == other {
            return None;
        }
        let (a, b) = self.members();
        let (c, d) = other.members();
        if a == c || a == d {
            Some(a)
        } else {
            Some(b)
        }
    }

    /// The member of this pair that is not `particle`.
    pub fn partner_of(self, particle: usize) -> Option<usize> {
        let (i, j) = self.members();
        if particle == i {
            Some(j)
        } else if particle == j {
            Some(i)
        } else {
            None
        }
    }

    /// Two-digit label, e.g. `"02"`.
    pub fn label(self) -> &'static str {
        match self {
            Pair::P01 => "01",
            Pair::P02 => "02",
            Pair::P12 => "12",
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Pair> {
        match s {
            "01" | "0-1" => Ok(Pair::P01),
            "02" | "0-2" => Ok(Pair::P02),
            "12" | "1-2" => Ok(Pair::P12),
            other => Err(Error::InvalidArgument(format!(
                "unknown pair '{other}', expected 01, 02, or 12"
            ))),
        }
    }
}

/// Absolute phase-space state: time, positions, velocities of the three
/// spheres. All vectors share one dimension `d ≥ 2`; diameters are 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub t: f64,
    pub x: [VecD; 3],
    pub v: [VecD; 3],
}

impl SystemState {
    /// Validates dimensional consistency (`d ≥ 2`, all six vectors equal).
    pub fn new(t: f64, x: [VecD; 3], v: [VecD; 3]) -> Result<SystemState> {
        let d = x[0].dim();
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        for vec in x.iter().chain(v.iter()) {
            if vec.dim() != d {
                return Err(Error::InvalidDimension(vec.dim()));
            }
        }
        Ok(SystemState { t, x, v })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.x[0].dim()
    }

    /// Separation vector `x_j - x_i` for pair `(i, j)`, `i < j`.
    pub fn separation(&self, pair: Pair) -> VecD {
        let (i, j) = pair.members();
        &self.x[j] - &self.x[i]
    }

    /// Center distance of the pair.
    pub fn distance(&self, pair: Pair) -> f64 {
        self.separation(pair).norm()
    }

    /// Surface gap: center distance minus the contact distance 1.
    pub fn gap(&self, pair: Pair) -> f64 {
        self.distance(pair) - 1.0
    }

    /// Relative velocity `v_j - v_i` for pair `(i, j)`, `i < j`.
    pub fn relative_velocity(&self, pair: Pair) -> VecD {
        let (i, j) = pair.members();
        &self.v[j] - &self.v[i]
    }

    /// Rate of change of the pair's center distance; negative while the
    /// spheres approach.
    pub fn approach_rate(&self, pair: Pair) -> f64 {
        let p = self.separation(pair);
        let w = self.relative_velocity(pair);
        p.dot(&w) / p.norm()
    }
}

/// Normal/tangential splitting of a relative velocity along a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalTangential {
    /// Normal component `w·ω` (signed; negative means approaching when `ω`
    /// points from the first member toward the second).
    pub eta: f64,
    /// Tangential remainder `w - (w·ω)ω`, orthogonal to `ω`.
    pub tangential: VecD,
}

impl NormalTangential {
    /// Reassembles the vector `tangential + eta·ω`.
    pub fn recompose(&self, omega: &VecD) -> VecD {
        let mut out = self.tangential.clone();
        out.axpy(self.eta, omega);
        out
    }
}

/// Splits `w` into its component along the unit vector `ω` and the orthogonal
/// remainder. Fails if `ω` is not a unit vector.
pub fn decompose(w: &VecD, omega: &VecD) -> Result<NormalTangential> {
    omega.check_unit()?;
    let eta = w.dot(omega);
    let tangential = w.reject_from_unit(omega);
    Ok(NormalTangential { eta, tangential })
}

/// Two-pair relative description around a shared particle.
///
/// Slot 1 is the pair exactly in contact (center distance 1), slot 2 the pair
/// separated by a small surface gap `d ≥ 0`. All quantities are relative to
/// the shared particle: `ω_k` is the unit direction from the shared particle
/// to the slot-`k` partner, `W_k` the partner's velocity relative to the
/// shared particle, and `η_k = W_k·ω_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeConfig {
    pub omega1: VecD,
    pub omega2: VecD,
    pub w1: VecD,
    pub w2: VecD,
    pub eta1: f64,
    pub eta2: f64,
    /// Surface gap of the slot-2 pair (its center distance is `1 + gap`).
    pub gap: f64,
}

impl RelativeConfig {
    /// Validates unit normals, a nonnegative gap (up to the overlap
    /// tolerance), consistent dimensions, and `η_k = W_k·ω_k`.
    pub fn validate(&self) -> Result<()> {
        self.omega1.check_unit()?;
        self.omega2.check_unit()?;
        let d = self.omega1.dim();
        for v in [&self.omega2, &self.w1, &self.w2] {
            if v.dim() != d {
                return Err(Error::InvalidDimension(v.dim()));
            }
        }
        if self.gap < -OVERLAP_TOL {
            return Err(Error::Overlap {
                pair: "slot 2",
                distance: 1.0 + self.gap,
            });
        }
        let tol = 1e-9;
        if (self.w1.dot(&self.omega1) - self.eta1).abs() > tol * (1.0 + self.w1.norm()) {
            return Err(Error::InvalidArgument(
                "eta1 does not match w1 · omega1".into(),
            ));
        }
        if (self.w2.dot(&self.omega2) - self.eta2).abs() > tol * (1.0 + self.w2.norm()) {
            return Err(Error::InvalidArgument(
                "eta2 does not match w2 · omega2".into(),
            ));
        }
        Ok(())
    }
}

/// Extracts the two-pair relative description from an absolute state.
///
/// `contact` must be at center distance 1 (within the contact tolerance) and
/// `approaching` not overlapping; the two pairs determine the shared particle.
/// Each `ω_k` points from the shared particle to the respective partner.
pub fn to_relative_frame(
    state: &SystemState,
    contact: Pair,
    approaching: Pair,
) -> Result<RelativeConfig> {
    let shared = contact.common_member(approaching).ok_or_else(|| {
        Error::InvalidArgument("contact and approaching pair must be distinct".into())
    })?;
    let p1 = contact.partner_of(shared).expect("shared is a member");
    let p2 = approaching.partner_of(shared).expect("shared is a member");

    let r1 = &state.x[p1] - &state.x[shared];
    let dist1 = r1.norm();
    if (dist1 - 1.0).abs() > CONTACT_TOL {
        return Err(Error::NotInContact {
            pair: contact.label(),
            distance: dist1,
        });
    }
    let r2 = &state.x[p2] - &state.x[shared];
    let dist2 = r2.norm();
    if dist2 < 1.0 - OVERLAP_TOL {
        return Err(Error::Overlap {
            pair: approaching.label(),
            distance: dist2,
        });
    }

    let omega1 = r1.scale(1.0 / dist1);
    let omega2 = r2.scale(1.0 / dist2);
    let w1 = &state.v[p1] - &state.v[shared];
    let w2 = &state.v[p2] - &state.v[shared];
    let eta1 = w1.dot(&omega1);
    let eta2 = w2.dot(&omega2);
    Ok(RelativeConfig {
        omega1,
        omega2,
        w1,
        w2,
        eta1,
        eta2,
        gap: dist2 - 1.0,
    })
}

/// Embeds a relative description back into an absolute state at time `t`:
/// the shared particle sits at the origin with zero velocity, the slot-1
/// partner at `ω₁`, the slot-2 partner at `(1 + gap)·ω₂`.
///
/// This is a section of [`to_relative_frame`], not an inverse: the relative
/// description forgets the center of mass, which is immaterial to the
/// dynamics.
pub fn from_relative_frame(
    config: &RelativeConfig,
    contact: Pair,
    approaching: Pair,
    t: f64,
) -> Result<SystemState> {
    config.validate()?;
    let shared = contact.common_member(approaching).ok_or_else(|| {
        Error::InvalidArgument("contact and approaching pair must be distinct".into())
    })?;
    let p1 = contact.partner_of(shared).expect("shared is a member");
    let p2 = approaching.partner_of(shared).expect("shared is a member");

    let d = config.omega1.dim();
    let zero = VecD::zeros(d)?;
    let mut x: [VecD; 3] = [zero.clone(), zero.clone(), zero.clone()];
    let mut v = x.clone();
    x[p1] = config.omega1.clone();
    x[p2] = config.omega2.scale(1.0 + config.gap);
    v[p1] = config.w1.clone();
    v[p2] = config.w2.clone();
    SystemState::new(t, x, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restitution_enforces_open_interval() {
        assert!(Restitution::new(0.5).is_ok());
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                Restitution::new(bad),
                Err(Error::InvalidRestitution(_))
            ));
        }
    }

    #[test]
    fn pair_bookkeeping() {
        assert_eq!(Pair::P01.members(), (0, 1));
        assert_eq!(Pair::P01.spectator(), 2);
        assert_eq!(Pair::P01.common_member(Pair::P02), Some(0));
        assert_eq!(Pair::P01.common_member(Pair::P12), Some(1));
        assert_eq!(Pair::P02.common_member(Pair::P12), Some(2));
        assert_eq!(Pair::P01.common_member(Pair::P01), None);
        assert_eq!(Pair::P02.partner_of(0), Some(2));
        assert_eq!(Pair::P02.partner_of(1), None);
        assert_eq!("12".parse::<Pair>().unwrap(), Pair::P12);
        assert!("21".parse::<Pair>().is_err());
    }

    #[test]
    fn decompose_recovers_components() {
        let omega = VecD::new(vec![0.6, 0.8]).unwrap();
        let tang = VecD::new(vec![-0.8, 0.6]).unwrap();
        let mut w = omega.scale(-1.25);
        w.axpy(0.5, &tang);
        let nt = decompose(&w, &omega).unwrap();
        assert!((nt.eta - (-1.25)).abs() < 1e-14);
        assert!(nt.tangential.dot(&omega).abs() < 1e-14);
        let back = nt.recompose(&omega);
        assert!(back.distance(&w) < 1e-14);
    }

    #[test]
    fn decompose_rejects_non_unit_normal() {
        let omega = VecD::new(vec![1.0, 1.0]).unwrap();
        let w = VecD::zeros(2).unwrap();
        assert!(matches!(
            decompose(&w, &omega),
            Err(Error::NonUnitVector { .. })
        ));
    }

    fn sample_state() -> SystemState {
        // Particle 1 in contact with particle 0, particle 2 slightly away.
        let x = [
            VecD::new(vec![0.0, 0.0]).unwrap(),
            VecD::new(vec![1.0, 0.0]).unwrap(),
            VecD::new(vec![-0.3, 1.0]).unwrap(),
        ];
        let v = [
            VecD::new(vec![0.0, 0.0]).unwrap(),
            VecD::new(vec![0.2, 0.1]).unwrap(),
            VecD::new(vec![0.05, -0.4]).unwrap(),
        ];
        SystemState::new(0.0, x, v).unwrap()
    }

    #[test]
    fn relative_frame_roundtrip_preserves_relative_data() {
        let state = sample_state();
        let cfg = to_relative_frame(&state, Pair::P01, Pair::P02).unwrap();
        assert!((cfg.omega1.norm() - 1.0).abs() < 1e-14);
        assert!((cfg.gap - (state.distance(Pair::P02) - 1.0)).abs() < 1e-14);

        let back = from_relative_frame(&cfg, Pair::P01, Pair::P02, 0.0).unwrap();
        let cfg2 = to_relative_frame(&back, Pair::P01, Pair::P02).unwrap();
        assert!(cfg2.omega1.distance(&cfg.omega1) < 1e-13);
        assert!(cfg2.omega2.distance(&cfg.omega2) < 1e-13);
        assert!(cfg2.w1.distance(&cfg.w1) < 1e-13);
        assert!(cfg2.w2.distance(&cfg.w2) < 1e-13);
        assert!((cfg2.eta1 - cfg.eta1).abs() < 1e-13);
        assert!((cfg2.eta2 - cfg.eta2).abs() < 1e-13);
        assert!((cfg2.gap - cfg.gap).abs() < 1e-13);
    }

    #[test]
    fn relative_frame_requires_contact() {
        let mut state = sample_state();
        state.x[1] = VecD::new(vec![1.5, 0.0]).unwrap();
        assert!(matches!(
            to_relative_frame(&state, Pair::P01, Pair::P02),
            Err(Error::NotInContact { .. })
        ));
    }

    #[test]
    fn relative_frame_rejects_overlap() {
        let mut state = sample_state();
        state.x[2] = VecD::new(vec![0.3, 0.3]).unwrap();
        assert!(matches!(
            to_relative_frame(&state, Pair::P01, Pair::P02),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn approach_rate_sign_convention() {
        let x = [
            VecD::new(vec![0.0, 0.0]).unwrap(),
            VecD::new(vec![2.0, 0.0]).unwrap(),
            VecD::new(vec![0.0, 5.0]).unwrap(),
        ];
        let v = [
            VecD::new(vec![0.0, 0.0]).unwrap(),
            VecD::new(vec![-1.0, 0.0]).unwrap(),
            VecD::new(vec![0.0, 0.0]).unwrap(),
        ];
        let state = SystemState::new(0.0, x, v).unwrap();
        assert!(state.approach_rate(Pair::P01) < 0.0);
        assert_eq!(state.gap(Pair::P01), 1.0);
    }
}
