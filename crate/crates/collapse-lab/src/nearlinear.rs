//! Nearly-linear collapse: linearized theory, admissibility thresholds, and
//! the certified construction of collapsing initial data.
//!
//! When two pairs sharing a central particle alternate collisions, the
//! normal components obey, in the flat-surface limit, the linear recursion
//! with matrix `A = [[0, −r], [1, −(1+r)/2·cosθ̄]]` ([`limit_matrix`]). Its
//! spectrum yields two thresholds on the contact angle
//! ([`existence_threshold`], [`stability_threshold`]): real contracting
//! eigenvalues — hence a collapse — require `−cosθ̄` above them, which is
//! possible only for restitution below the critical values
//! `7 − 4√3 ≈ 0.0718` (existence) and `9 − 4√5 ≈ 0.0557` (stability).
//!
//! [`build_construction`] assembles, for admissible `(r, θ₀)`, the complete
//! family of constants (fixed points of the ratio homography, margins
//! δ₁…δ₅, h₄, h₅, contraction factor C_η, velocity window [V₀, V₁], and the
//! smallness bounds η̄, ζ̄, d̄) defining an explicit open set of initial
//! configurations whose trajectories collapse in a nearly-linear order.
//! [`sample_initial_configuration`] draws states from that set
//! reproducibly, and [`verify_recursion`] re-derives, for an iterated
//! trajectory, every inequality of the inductive argument (Cnd1–Cnd10, the
//! third-pair clearance, the ζ contraction, and the final-angle bound),
//! reporting them as a per-collision certificate.

use crate::complex::Complex;
use crate::core::{Restitution, SystemState};
use crate::error::{Error, Result};
use crate::map::{ScaledConfig, ScaledRun};
use crate::vec::VecD;
use crate::wide::Wide;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Largest restitution admitting any collapsing obtuse angle:
/// the existence threshold reaches 1 at `r = 7 − 4√3`.
pub fn critical_existence_restitution() -> f64 {
    bisect_root(&|r| existence_threshold_raw(r) - 1.0, 1e-6, 0.5, 1e-13)
}

/// Largest restitution admitting a *stable* nearly-linear collapse:
/// the stability threshold reaches 1 at `r = 9 − 4√5`.
pub fn critical_stability_restitution() -> f64 {
    bisect_root(&|r| stability_threshold_raw(r) - 1.0, 1e-6, 0.5, 1e-13)
}

fn existence_threshold_raw(r: f64) -> f64 {
    4.0 * r.sqrt() / (1.0 + r)
}

fn stability_threshold_raw(r: f64) -> f64 {
    let c = r.cbrt();
    2.0 * c * (1.0 + c) / (1.0 + r)
}

/// Minimum of `−cos θ̄` for real (collapsing) eigenvalues: `4√r/(1+r)`.
pub fn existence_threshold(r: Restitution) -> f64 {
    existence_threshold_raw(r.value())
}

/// Minimum of `−cos θ̄` for a stable collapse: `2r^{1/3}(1+r^{1/3})/(1+r)`.
pub fn stability_threshold(r: Restitution) -> f64 {
    stability_threshold_raw(r.value())
}

/// Bisection for a root of `f` in `[lo, hi]`, which must bracket a sign
/// change. Shared by the threshold inversions and the cubic solver.
pub(crate) fn bisect_root(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    assert!(
        f_lo * f(hi) <= 0.0,
        "bisection interval [{lo}, {hi}] does not bracket a root"
    );
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// The limiting 2×2 matrix.
// ---------------------------------------------------------------------------

/// The flat-surface limit matrix of the alternating normal-component
/// recursion, with its closed-form spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMatrix2 {
    /// Row-major entries of `A = [[0, −r], [1, −(1+r)/2·cosθ̄]]`.
    pub entries: [[f64; 2]; 2],
    pub eigenvalues: (Complex, Complex),
    pub spectral_radius: f64,
}

/// Builds the limit matrix for restitution `r` and limiting contact angle
/// cosine `cosθ̄ ∈ [−1, 0)`.
///
/// The eigenvalues are `(Tr ± √(Tr²−4r))/2`; when the discriminant is
/// negative they are conjugate with modulus exactly `√r` (the determinant
/// is `r`).
pub fn limit_matrix(r: Restitution, cos_theta_bar: f64) -> Result<LimitMatrix2> {
    if !(-1.0..0.0).contains(&cos_theta_bar) {
        return Err(Error::InvalidArgument(format!(
            "cos theta-bar must lie in [-1, 0), got {cos_theta_bar}"
        )));
    }
    let rv = r.value();
    let trace = -0.5 * (1.0 + rv) * cos_theta_bar;
    let entries = [[0.0, -rv], [1.0, trace]];
    let disc = trace * trace - 4.0 * rv;
    let (eigenvalues, spectral_radius) = if disc >= 0.0 {
        let root = disc.sqrt();
        let plus = Complex::real(0.5 * (trace + root));
        let minus = Complex::real(0.5 * (trace - root));
        (
            (plus, minus),
            plus.re.abs().max(minus.re.abs()),
        )
    } else {
        let im = 0.5 * (-disc).sqrt();
        (
            (Complex::new(0.5 * trace, im), Complex::new(0.5 * trace, -im)),
            rv.sqrt(),
        )
    };
    Ok(LimitMatrix2 {
        entries,
        eigenvalues,
        spectral_radius,
    })
}

/// Both fixed points `φ± = (α₀ ± √(α₀²−4r))/2` of the normal-ratio
/// homography `φ ↦ r/(α₀ − φ)`, returned as `(φ⁻, φ⁺)`.
///
/// Requires `α₀² > 4r` strictly (real fixed points); the smaller one is
/// automatically attracting since `|F′(φ⁻)| = φ⁻/φ⁺ < 1`.
pub fn homography_fixed_points(alpha0: f64, r: Restitution) -> Result<(f64, f64)> {
    let rv = r.value();
    let disc = alpha0 * alpha0 - 4.0 * rv;
    if !(disc > 0.0) {
        return Err(Error::NoConstruction(format!(
            "fixed points require alpha0^2 > 4r: alpha0 = {alpha0}, 4r = {}",
            4.0 * rv
        )));
    }
    let phi_plus = 0.5 * (alpha0 + disc.sqrt());
    let phi_minus = rv / phi_plus;
    Ok((phi_minus, phi_plus))
}

// ---------------------------------------------------------------------------
// The construction and its constants.
// ---------------------------------------------------------------------------

/// Every constant of the certified construction of collapsing initial data,
/// derived from `(r, θ₀, δ_θ)`.
///
/// `d̄` is the only non-scalar bound: a function of the initial approach
/// speed, stored as its constant part `d_bar_fixed` (minimum of the fixed
/// candidates) and the coefficient of its quadratic part (see
/// [`ZkConstruction::d_bar`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZkConstruction {
    pub r: f64,
    /// Contact angle θ₀ (radians, obtuse).
    pub theta0: f64,
    pub cos_theta0: f64,
    /// Requested tolerance on the final contact angle.
    pub delta_theta: f64,
    /// `α₀ = (1+r)/2·(−cosθ₀)`.
    pub alpha0: f64,
    pub phi_minus: f64,
    pub phi_plus: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub delta5: f64,
    pub h4: f64,
    pub h5: f64,
    /// Contraction factor of the approach speeds, `1 − δ₃`.
    pub c_eta: f64,
    pub v0: f64,
    pub v1: f64,
    /// `δ_x = δ_y = min(δ₁, …, δ₅)`.
    pub delta_x: f64,
    pub delta_y: f64,
    /// Bound on the initial normal-ratio offset `x₀`.
    pub x0_bound: f64,
    /// Bound on the per-run angle drift (also capped by `delta_theta`).
    pub dtheta_bound: f64,
    /// Bound on the initial approach speed `|η_{c,0}|`.
    pub eta_bar: f64,
    /// Bound on the collision parameter ζ along the run.
    pub zeta_bar: f64,
    /// Constant part of the initial-gap bound `d̄`.
    pub d_bar_fixed: f64,
    /// Coefficient of the quadratic part of `d̄`: `ζ̄/(2V₁)`.
    pub d_bar_coefficient: f64,
}

impl ZkConstruction {
    /// The initial-gap bound `d̄(−η_{c,0}) = min(d_bar_fixed,
    /// d_bar_coefficient · η²)`; the quadratic term keeps the initial ζ
    /// within ζ̄.
    pub fn d_bar(&self, minus_eta_c0: f64) -> f64 {
        self.d_bar_fixed
            .min(self.d_bar_coefficient * minus_eta_c0 * minus_eta_c0)
    }

    /// Velocity-drift envelope `E_n = 4(√V₁+2)·(Σ_{k<n} C_η^k)·(−η_{c,0})`.
    pub fn drift_envelope(&self, n: usize, minus_eta_c0: f64) -> f64 {
        let mut geo = 0.0;
        let mut pow = 1.0;
        for _ in 0..n {
            geo += pow;
            pow *= self.c_eta;
        }
        4.0 * (self.v1.sqrt() + 2.0) * geo * minus_eta_c0
    }

    /// Accumulated-angle envelope for `|(−cosθ_{n+1}) − (−cosθ₀)|`.
    pub fn angle_envelope(&self, n: usize, d0: f64, minus_eta_c0: f64) -> f64 {
        let sqrt_v1 = self.v1.sqrt();
        let mut geo = 0.0;
        let mut pow = self.c_eta;
        for _ in 1..=n {
            geo += pow;
            pow *= self.c_eta;
        }
        d0 + 11.0 * (sqrt_v1 / self.v0) * minus_eta_c0
            + (sqrt_v1 / (self.v0 * self.c_eta)) * (3.0 + 11.0 * self.c_eta) * geo * minus_eta_c0
    }

    /// Re-checks the structural invariants; returns human-readable
    /// violations (empty when sound).
    pub fn audit(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) {
                bad.push(format!("{name} = {v} is not strictly positive"));
            }
        };
        positive("delta1", self.delta1);
        positive("delta2", self.delta2);
        positive("delta3", self.delta3);
        positive("delta4", self.delta4);
        positive("delta5", self.delta5);
        positive("h4", self.h4);
        positive("h5", self.h5);
        positive("delta_x", self.delta_x);
        positive("x0_bound", self.x0_bound);
        positive("dtheta_bound", self.dtheta_bound);
        positive("eta_bar", self.eta_bar);
        positive("zeta_bar", self.zeta_bar);
        positive("d_bar_fixed", self.d_bar_fixed);
        positive("d_bar_coefficient", self.d_bar_coefficient);
        if !(0.0 < self.phi_minus && self.phi_minus < self.alpha0 / 2.0) {
            bad.push(format!(
                "ordering 0 < phi_minus < alpha0/2 fails: phi_minus = {}, alpha0/2 = {}",
                self.phi_minus,
                self.alpha0 / 2.0
            ));
        }
        if !(self.alpha0 / 2.0 < self.phi_plus) {
            bad.push(format!(
                "ordering alpha0/2 < phi_plus fails: phi_plus = {}",
                self.phi_plus
            ));
        }
        if (self.phi_minus * self.phi_plus - self.r).abs() > 1e-14 {
            bad.push(format!(
                "fixed-point product {} differs from r = {}",
                self.phi_minus * self.phi_plus,
                self.r
            ));
        }
        if !(self.c_eta > 0.0 && self.c_eta < 1.0) {
            bad.push(format!("c_eta = {} outside (0,1)", self.c_eta));
        }
        if ((1.0 - self.h5 / 2.0) / (1.0 - self.h5) - self.v1 / self.v0).abs() > 1e-12 {
            bad.push(format!(
                "v1/v0 = {} differs from (1-h5/2)/(1-h5)",
                self.v1 / self.v0
            ));
        }
        bad
    }
}

/// Builds the full constant family for a stable nearly-linear collapse.
///
/// Admissibility: `0 < r < 9 − 4√5` and
/// `−cos θ₀ > 2r^{1/3}(1 + r^{1/3})/(1 + r)` (the stability threshold;
/// it dominates the existence threshold, so real fixed points come for
/// free). `delta_theta` is the caller's tolerance on the final angle.
pub fn build_construction(
    r: Restitution,
    theta0: f64,
    delta_theta: f64,
) -> Result<ZkConstruction> {
    if !(delta_theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta_theta must be positive, got {delta_theta}"
        )));
    }
    let rv = r.value();
    let r_max = 9.0 - 4.0 * 5.0f64.sqrt();
    if !(rv < r_max) {
        return Err(Error::NoConstruction(format!(
            "stable collapse requires r < 9 - 4*sqrt(5) = {r_max:.8}, got r = {rv}"
        )));
    }
    let cos_theta0 = theta0.cos();
    let minus_cos = -cos_theta0;
    let threshold = stability_threshold_raw(rv);
    if !(minus_cos > threshold && minus_cos <= 1.0) {
        return Err(Error::NoConstruction(format!(
            "stable collapse requires -cos(theta0) > 2r^(1/3)(1+r^(1/3))/(1+r) = {threshold:.8}, \
             got -cos(theta0) = {minus_cos}"
        )));
    }

    let alpha0 = 0.5 * (1.0 + rv) * minus_cos;
    let (phi_minus, phi_plus) = homography_fixed_points(alpha0, r)?;
    let gap_fp = alpha0 - phi_minus; // = φ⁺ by Viète; kept as written below.

    let delta1 = alpha0 / 2.0 - phi_minus;
    let delta2 = gap_fp / 2.0;
    let delta3 = (1.0 - gap_fp) / 2.0;
    let c_eta = 1.0 - delta3;
    let h4 = 0.5 * (1.0 - rv / (gap_fp * gap_fp));
    let delta4 = phi_plus - (rv / (1.0 - h4)).sqrt();
    let h5 = 0.5 * (1.0 - phi_minus / (gap_fp * gap_fp));
    let delta5 = phi_plus - (phi_minus / (1.0 - h5)).sqrt();
    let v0 = 1.0;
    let v1 = (1.0 - h5 / 2.0) / (1.0 - h5);
    let delta_x = delta1.min(delta2).min(delta3).min(delta4).min(delta5);
    let delta_y = delta_x;

    let x0_bound = ((1.0 - h4) * delta_x).min((v0 / v1) * delta2 * delta2 * h5 / 12.0);
    let dtheta_bound = (minus_cos / 2.0)
        .min(h4 * delta_x / 8.0)
        .min(delta_theta);
    let sqrt_v1 = v1.sqrt();
    let eta_bar = 1.0f64
        .min((2.0f64.sqrt() - 1.0) / 16.0 * v0 / sqrt_v1)
        .min(v0 / (33.0 * sqrt_v1) * dtheta_bound)
        .min((1.0 - c_eta) * (v1 - v0) / (12.0 * (sqrt_v1 + 2.0)))
        .min(
            (v0 / sqrt_v1)
                * (2.0 / (15.0 * alpha0)
                    + h4 * delta2 / 6.0
                    + h4 / (12.0 * alpha0)
                    + h4 / 24.0)
                * delta_x,
        );
    let zeta_bar = (2.0 * (2.0f64.sqrt() - 1.0))
        .min(v0 * h5 * delta2 * delta2 / (3.0 * v1 * (alpha0 + 8.0 * v1 / v0)))
        .min((1.0 + 4.0 * delta2 + v0 / v1) * h4 * delta_x / 16.0);
    let d_bar_fixed = ((2.0f64.sqrt() - 1.0) / 4.0)
        .min(dtheta_bound / 3.0)
        .min((1.0 + delta2 * h4) * delta_x / 5.0)
        .min((1.0 + 2.0 * delta2) * h4 * delta_x / 4.0);
    let d_bar_coefficient = zeta_bar / (2.0 * v1);

    Ok(ZkConstruction {
        r: rv,
        theta0,
        cos_theta0,
        delta_theta,
        alpha0,
        phi_minus,
        phi_plus,
        delta1,
        delta2,
        delta3,
        delta4,
        delta5,
        h4,
        h5,
        c_eta,
        v0,
        v1,
        delta_x,
        delta_y,
        x0_bound,
        dtheta_bound,
        eta_bar,
        zeta_bar,
        d_bar_fixed,
        d_bar_coefficient,
    })
}

// ---------------------------------------------------------------------------
// Sampling the constructed set.
// ---------------------------------------------------------------------------

fn gaussian_vec<R: Rng>(rng: &mut R, dim: usize) -> VecD {
    let coords: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    VecD::new(coords).expect("dimension validated by caller")
}

/// A unit vector orthogonal to `omega`, drawn isotropically from the
/// orthogonal complement (in the plane this is one of the two normals).
fn random_tangent<R: Rng>(rng: &mut R, omega: &VecD) -> VecD {
    loop {
        let g = gaussian_vec(rng, omega.dim());
        let u = g.reject_from_unit(omega);
        if u.norm() > 1e-6 {
            // Second rejection pass tightens orthogonality to roundoff.
            let u = u.reject_from_unit(omega);
            return u.normalized().expect("norm checked above");
        }
    }
}

/// An orthonormal pair spanning a random 2-plane (double Gram–Schmidt).
fn random_frame<R: Rng>(rng: &mut R, dim: usize) -> (VecD, VecD) {
    loop {
        let g1 = gaussian_vec(rng, dim);
        if g1.norm() < 1e-6 {
            continue;
        }
        let e1 = g1.normalized().expect("norm checked above");
        let e2 = random_tangent(rng, &e1);
        return (e1, e2);
    }
}

/// Draws an initial configuration from the constructed collapsing set.
///
/// Particles 0 and 1 touch (post-collisional); particle 2 approaches 0
/// across a gap bounded by `d̄`. The sampler is rejection-free: each
/// quantity is drawn from its admissible interval in dependency order
/// (approach speed → ratio → gap → speed norms → geometry), staying inside
/// conservative sub-windows of the bounds. Identical seeds give
/// bit-identical states.
pub fn sample_initial_configuration(
    zk: &ZkConstruction,
    dim: usize,
    seed: u64,
) -> Result<SystemState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let minus_eta_c = rng.random_range(0.5..1.0) * zk.eta_bar;
    let ratio = zk.phi_minus + rng.random_range(-0.9..0.9) * zk.x0_bound;
    let eta_s = ratio * minus_eta_c;
    let gap = rng.random_range(0.2..0.5) * zk.d_bar(minus_eta_c);
    let band = (zk.v1 - zk.v0) / 3.0;
    let t_c = rng.random_range(zk.v0 + band..zk.v1 - band);
    let t_s = rng.random_range(zk.v0 + band..zk.v1 - band);

    let (e1, e2) = random_frame(&mut rng, dim);
    let omega_s = e1.clone();
    let mut omega_c = e1.scale(zk.cos_theta0);
    omega_c.axpy(zk.theta0.sin(), &e2);
    let omega_c = omega_c.normalized()?;

    let tangent_c = random_tangent(&mut rng, &omega_c);
    let tangent_s = random_tangent(&mut rng, &omega_s);

    let mut w_c = omega_c.scale(-minus_eta_c);
    w_c.axpy((t_c - minus_eta_c * minus_eta_c).sqrt(), &tangent_c);
    let mut w_s = omega_s.scale(eta_s);
    w_s.axpy((t_s - eta_s * eta_s).sqrt(), &tangent_s);

    let origin = VecD::zeros(dim)?;
    let x = [origin.clone(), omega_s.clone(), omega_c.scale(1.0 + gap)];
    let v = [origin, w_s, w_c];
    SystemState::new(0.0, x, v)
}

/// Re-verifies, from raw positions and velocities alone, that a state lies
/// in the constructed set. Returns human-readable violations (empty when
/// the state qualifies).
pub fn check_initial_configuration(state: &SystemState, zk: &ZkConstruction) -> Vec<String> {
    use crate::core::Pair;
    let mut bad = Vec::new();
    let slack = 1.0 + 1e-9;

    let dist01 = state.distance(Pair::P01);
    if (dist01 - 1.0).abs() > 1e-12 {
        bad.push(format!("particles 0,1 are not in contact: |x1-x0| = {dist01}"));
    }
    let omega_s = state.separation(Pair::P01).normalized().unwrap();
    let omega_c = state.separation(Pair::P02).normalized().unwrap();
    let w_s = state.relative_velocity(Pair::P01);
    let w_c = state.relative_velocity(Pair::P02);
    let eta_s = w_s.dot(&omega_s);
    let eta_c = w_c.dot(&omega_c);

    if !(eta_s > 0.0) {
        bad.push(format!("pair 0,1 is not post-collisional: eta = {eta_s}"));
    }
    if !(eta_c < 0.0) {
        bad.push(format!("pair 0,2 is not approaching: eta = {eta_c}"));
    }
    if eta_c.abs() > zk.eta_bar * slack {
        bad.push(format!(
            "|eta_c| = {} exceeds eta_bar = {}",
            eta_c.abs(),
            zk.eta_bar
        ));
    }
    if eta_c < 0.0 {
        let x0 = eta_s / (-eta_c) - zk.phi_minus;
        if x0.abs() > zk.x0_bound * slack {
            bad.push(format!(
                "ratio offset |x0| = {} exceeds bound {}",
                x0.abs(),
                zk.x0_bound
            ));
        }
        let gap = state.gap(Pair::P02);
        if !(gap > 0.0) || gap > zk.d_bar(-eta_c) * slack {
            bad.push(format!(
                "gap {} outside (0, d_bar = {}]",
                gap,
                zk.d_bar(-eta_c)
            ));
        }
    }
    let band = (zk.v1 - zk.v0) / 3.0;
    for (name, sq) in [("W_c", w_c.norm_sq()), ("W_s", w_s.norm_sq())] {
        if sq < (zk.v0 + band) / slack || sq > (zk.v1 - band) * slack {
            bad.push(format!(
                "|{name}|^2 = {sq} outside the middle band [{}, {}]",
                zk.v0 + band,
                zk.v1 - band
            ));
        }
    }
    let cos = omega_c.dot(&omega_s);
    if (cos - zk.cos_theta0).abs() > 1e-12 {
        bad.push(format!(
            "contact angle cosine {} differs from cos(theta0) = {}",
            cos, zk.cos_theta0
        ));
    }
    bad
}

// ---------------------------------------------------------------------------
// The recursion certificate.
// ---------------------------------------------------------------------------

/// Identifier of one inequality of the inductive argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionId {
    /// The candidate pair keeps approaching: `η_{c,n} < 0`.
    Cnd1,
    /// Approach speeds stay small and contract: `|η_{c,n}| ≤ η̄` and, for
    /// `n ≥ 1`, `|η_{c,n}| ≤ C_η·|η_{c,n−1}|`.
    Cnd2,
    /// A collision is scheduled: `ζ_n < 1`.
    Cnd3,
    /// The collision parameter stays small: `ζ_n ≤ ζ̄`.
    Cnd4,
    /// The spectator pair stays clear during the flight.
    CndT,
    /// Speed norms remain in the window: `V₀ ≤ |W_i|² ≤ V₁`.
    Cnd5,
    /// Odd-step velocity-drift bound (cross-role comparison to step 0).
    Cnd6,
    /// Even-step velocity-drift bound (same-role comparison to step 0).
    Cnd7,
    /// Accumulated contact-angle drift bound.
    Cnd8,
    /// Normal-ratio offset: `|x_n| ≤ δ_x`, strengthened for `n ≥ 1`.
    Cnd9,
    /// Speed-ratio offset: `|y_n| ≤ δ_y`.
    Cnd10,
    /// Geometric decay of the collision parameter:
    /// `ζ_{n+1} ≤ (1 − h₅/4)·ζ_n`.
    ZetaContraction,
    /// Final-angle tolerance `|cosθ_N − cosθ₀| ≤ δ_θ`.
    FinalAngle,
}

/// Outcome of every tracked inequality at one collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepFlags {
    pub index: usize,
    pub cnd1: bool,
    pub cnd2: bool,
    pub cnd3: bool,
    pub cnd4: bool,
    pub cnd_t: bool,
    pub cnd5: bool,
    pub cnd6: bool,
    pub cnd7: bool,
    pub cnd8: bool,
    pub cnd9: bool,
    pub cnd10: bool,
    pub zeta_contraction: bool,
}

impl StepFlags {
    fn first_failure(&self) -> Option<ConditionId> {
        [
            (self.cnd1, ConditionId::Cnd1),
            (self.cnd2, ConditionId::Cnd2),
            (self.cnd3, ConditionId::Cnd3),
            (self.cnd4, ConditionId::Cnd4),
            (self.cnd_t, ConditionId::CndT),
            (self.cnd5, ConditionId::Cnd5),
            (self.cnd6, ConditionId::Cnd6),
            (self.cnd7, ConditionId::Cnd7),
            (self.cnd8, ConditionId::Cnd8),
            (self.cnd9, ConditionId::Cnd9),
            (self.cnd10, ConditionId::Cnd10),
            (self.zeta_contraction, ConditionId::ZetaContraction),
        ]
        .into_iter()
        .find_map(|(ok, id)| (!ok).then_some(id))
    }

    fn all(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Per-collision record of the inductive inequalities for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionCertificate {
    /// One flag set per collision step.
    pub flags: Vec<StepFlags>,
    /// Earliest `(step index, condition)` that failed, if any (the
    /// final-angle check reports at the last step index).
    pub first_violation: Option<(usize, ConditionId)>,
    /// Normal-ratio offsets `x_n = η_{s,n}/(−η_{c,n}) − φ⁻` per state.
    pub x_n: Vec<f64>,
    /// Speed-ratio offsets `y_n = η_{c,n+1}/η_{c,n} − (α₀ − φ⁻)` per step.
    pub y_n: Vec<f64>,
    pub final_angle_ok: bool,
    /// Whether every condition held at every step.
    pub passed: bool,
}

/// State entering collision `n`: the initial datum for `n = 0`, otherwise
/// the post-state of the previous step.
fn state_of(run: &ScaledRun, n: usize) -> &ScaledConfig {
    if n == 0 {
        &run.initial
    } else {
        &run.steps[n - 1].state_after
    }
}

/// Collision parameter of a state, re-derived from its raw scalars.
fn zeta_of(s: &ScaledConfig) -> Wide {
    let one = Wide::ONE;
    let two = Wide::from_f64(2.0);
    s.gap * (two + s.gap) * Wide::from_f64(s.w_c_sq())
        / ((one + s.gap).square() * s.eta_c.square())
}

/// Normal-ratio offset `x = η_s/(−η_c) − φ⁻` of a state (NaN if the state
/// has no approach speed to compare against).
fn ratio_offset(s: &ScaledConfig, phi_minus: f64) -> f64 {
    if s.eta_c.is_zero() {
        return f64::NAN;
    }
    (s.eta_s / -s.eta_c).to_f64() - phi_minus
}

/// Evaluates all conditions of the inductive argument along a scaled run.
///
/// Every quantity is re-derived from the raw per-step states (extended-
/// precision scalars, `f64` geometry), independently of the values the
/// iterator reported, so iterator and verifier cross-validate. Violations
/// are recorded, never raised.
pub fn verify_recursion(run: &ScaledRun, zk: &ZkConstruction) -> RecursionCertificate {
    let n_steps = run.steps.len();

    let eta_bar = Wide::from_f64(zk.eta_bar);
    let c_eta = Wide::from_f64(zk.c_eta);
    let zeta_bar = Wide::from_f64(zk.zeta_bar);
    let contraction = Wide::from_f64(1.0 - zk.h5 / 4.0);
    let minus_eta_c0 = (-run.initial.eta_c).to_f64();
    let d0 = run.initial.gap.to_f64();
    let ratio_target = zk.alpha0 - zk.phi_minus;

    let mut flags = Vec::with_capacity(n_steps);
    let x_n: Vec<f64> = (0..=n_steps)
        .map(|n| ratio_offset(state_of(run, n), zk.phi_minus))
        .collect();
    let mut y_n = Vec::with_capacity(n_steps);

    for n in 0..n_steps {
        let s = state_of(run, n);
        let s_next = state_of(run, n + 1);
        let zeta = zeta_of(s);

        let cnd1 = s.eta_c.is_sign_negative() && !s.eta_c.is_zero();
        let cnd2 = s.eta_c.abs() <= eta_bar
            && (n == 0 || s.eta_c.abs() <= c_eta * state_of(run, n - 1).eta_c.abs());
        let cnd3 = zeta < Wide::ONE;
        let cnd4 = zeta <= zeta_bar;
        let cnd_t = run.steps[n].third_pair_min_dist > 1.0;

        let w_c_sq = s.w_c_sq();
        let w_s_sq = s.w_s_sq();
        let cnd5 = zk.v0 <= w_c_sq && w_c_sq <= zk.v1 && zk.v0 <= w_s_sq && w_s_sq <= zk.v1;

        let envelope = zk.drift_envelope(n, minus_eta_c0);
        let (cnd6, cnd7) = if n % 2 == 1 {
            (
                w_c_sq - run.w_s_sq_0 <= envelope && w_s_sq - run.w_c_sq_0 <= envelope,
                true,
            )
        } else {
            (
                true,
                w_c_sq - run.w_c_sq_0 <= envelope && w_s_sq - run.w_s_sq_0 <= envelope,
            )
        };

        let cos_next = s_next.cos_cs();
        let cnd8 =
            (cos_next - run.cos_cs_0).abs() <= zk.angle_envelope(n, d0, minus_eta_c0);

        let x_bound = if n == 0 {
            zk.delta_x
        } else {
            (1.0 - zk.h4 / 2.0) * zk.delta_x
        };
        let cnd9 = x_n[n].abs() <= x_bound;

        let y = (s_next.eta_c / s.eta_c).to_f64() - ratio_target;
        y_n.push(y);
        let cnd10 = y.abs() <= zk.delta_y;

        let zeta_contraction = n == 0 || zeta <= contraction * zeta_of(state_of(run, n - 1));

        flags.push(StepFlags {
            index: n,
            cnd1,
            cnd2,
            cnd3,
            cnd4,
            cnd_t,
            cnd5,
            cnd6,
            cnd7,
            cnd8,
            cnd9,
            cnd10,
            zeta_contraction,
        });
    }

    let final_cos = state_of(run, n_steps).cos_cs();
    let final_angle_ok = (final_cos - run.cos_cs_0).abs() <= zk.delta_theta;

    let mut first_violation = flags
        .iter()
        .find_map(|f| f.first_failure().map(|id| (f.index, id)));
    if first_violation.is_none() && !final_angle_ok {
        first_violation = Some((n_steps.saturating_sub(1), ConditionId::FinalAngle));
    }
    let passed = first_violation.is_none();

    RecursionCertificate {
        flags,
        first_violation,
        x_n,
        y_n,
        final_angle_ok,
        passed,
    }
}

/// Convenience: the canonical scaled state of a freshly sampled
/// configuration (pair 0–1 just collided, pair 0–2 approaching).
pub fn scaled_from_state(state: &SystemState) -> Result<ScaledConfig> {
    let cfg = crate::core::to_relative_frame(state, crate::core::Pair::P01, crate::core::Pair::P02)?;
    ScaledConfig::from_relative(&cfg)
}

/// Seeds derived reproducibly from a base seed for batch experiments.
pub fn batch_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut rng = StdRng::seed_from_u64(base);
    (0..count).map(|_| rng.random()).collect()
}
