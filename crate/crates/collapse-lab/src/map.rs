//! The single-collision mapping and its iteration.
//!
//! In the two-pair relative frame ([`RelativeConfig`]: slot 1 in contact and
//! post-collisional, slot 2 approaching across a gap `d`), the next collision
//! is determined by the Zhou–Kadanoff parameter
//!
//! ```text
//! ζ = d(2+d)|W₂|² / ((1+d)²η₂²),
//! ```
//!
//! scheduled iff `η₂ < 0` and `ζ < 1`, at flight time
//! `τ = (1+d)(−η₂)/|W₂|² · ζ/(1+√(1−ζ))`. [`apply_map`] evaluates the
//! complete post-collision configuration in closed form: new directions,
//! normal components, tangential parts, the new gap `d′` of the slot-1 pair,
//! and the contact angle `ω₁′·ω₂′`. Composed with [`swap_roles`] (which
//! exchanges the slots so the freshly collided pair becomes slot 1), iterating
//! the map is exactly the event-driven flow restricted to the alternating
//! collision order — the engine cross-validates this step for step.
//!
//! Along a collapse the scalars `η₁, η₂, d, τ` decay geometrically through
//! hundreds of orders of magnitude, far past `f64` underflow. The scaled
//! iterator ([`ScaledConfig`], [`iterate_scaled`]) therefore carries those
//! scalars as extended-exponent [`Wide`] values while keeping the O(1)
//! geometry — unit directions and tangential velocity components — in plain
//! `f64`, renormalized and reprojected every step. Normal components are
//! always propagated through the exact recursion, never recovered from
//! `O(1)·O(1)` dot products, which would lose them to cancellation.

use crate::core::{Pair, RelativeConfig, Restitution, SystemState};
use crate::error::{Error, Result};
use crate::tol::DEGENERATE_GAP;
use crate::vec::VecD;
use crate::wide::Wide;
use serde::Serialize;

/// The Zhou–Kadanoff parameter of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZkParameter {
    pub zeta: f64,
}

/// Computes `ζ = d(2+d)|W₂|²/((1+d)²η₂²)`; undefined when `η₂ = 0`.
pub fn zk_parameter(cfg: &RelativeConfig) -> Result<ZkParameter> {
    if cfg.eta2 == 0.0 {
        return Err(Error::UndefinedParameter);
    }
    let d = cfg.gap;
    let one_plus = 1.0 + d;
    let zeta = d * (2.0 + d) * cfg.w2.norm_sq() / (one_plus * one_plus * cfg.eta2 * cfg.eta2);
    Ok(ZkParameter { zeta })
}

/// Flight time to the slot-2 collision.
///
/// Requires `η₂ < 0` and `ζ < 1`. The form `ζ/(1+√(1−ζ))` is algebraically
/// `1−√(1−ζ)` but keeps full precision as `ζ → 0`, the collapse regime. The
/// result always satisfies the bracketing
/// `d(2+d)/(2(1+d)(−η₂)) ≤ τ ≤ d(2+d)/((1+d)(−η₂))`.
pub fn collision_time(cfg: &RelativeConfig) -> Result<f64> {
    if cfg.eta2 >= 0.0 {
        return Err(Error::NoCollision(format!(
            "slot-2 pair is not approaching (eta2 = {})",
            cfg.eta2
        )));
    }
    let zeta = zk_parameter(cfg)?.zeta;
    if zeta >= 1.0 {
        return Err(Error::NoCollision(format!(
            "Zhou-Kadanoff parameter {zeta} is not below 1"
        )));
    }
    let d = cfg.gap;
    Ok((1.0 + d) * (-cfg.eta2) / cfg.w2.norm_sq() * zeta / (1.0 + (1.0 - zeta).sqrt()))
}

/// One evaluated collision of the slot-2 pair.
///
/// `output` is in collision-instant orientation: its slot 2 is the freshly
/// collided pair (at contact, now separating with `eta2 > 0`) and its slot 1
/// is the previously-in-contact pair, drifted out to the new gap. Apply
/// [`swap_roles`] to restore the slot-1-contact convention before iterating.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapStep {
    pub input: RelativeConfig,
    pub tau: f64,
    pub output: RelativeConfig,
    pub eta1_post: f64,
    pub eta2_post: f64,
    /// Contact angle `ω₁′·ω₂′` after the collision.
    pub cos_angle_post: f64,
}

/// Evaluates the complete single-collision mapping.
///
/// Domain: `η₁ > 0` (slot 1 post-collisional), `η₂ < 0`, `ζ < 1`. All seven
/// output quantities are computed in closed form; the normal component of the
/// collided pair uses the exact identity `(1+d)η₂ + τ|W₂|² = (1+d)√(1−ζ)·η₂`
/// (the cancellation-free right-hand side), giving `η₂′ = −r(1+d)√(1−ζ)η₂`.
pub fn apply_map(cfg: &RelativeConfig, r: Restitution) -> Result<MapStep> {
    cfg.validate()?;
    if cfg.eta1 <= 0.0 {
        return Err(Error::MapDomain(format!(
            "slot-1 pair must be post-collisional (eta1 > 0), got {}",
            cfg.eta1
        )));
    }
    if cfg.eta2 >= 0.0 {
        return Err(Error::MapDomain(format!(
            "slot-2 pair must be approaching (eta2 < 0), got {}",
            cfg.eta2
        )));
    }
    let zeta = zk_parameter(cfg)?.zeta;
    if zeta >= 1.0 {
        return Err(Error::MapDomain(format!(
            "Zhou-Kadanoff parameter {zeta} is not below 1: no collision is scheduled"
        )));
    }

    let rv = r.value();
    let d = cfg.gap;
    let w1sq = cfg.w1.norm_sq();
    let w2sq = cfg.w2.norm_sq();
    let sqrt1mz = (1.0 - zeta).sqrt();
    let tau = (1.0 + d) * (-cfg.eta2) / w2sq * zeta / (1.0 + sqrt1mz);

    // Contact direction of the collided pair: (1+d)ω₂ + τW₂, unit up to
    // roundoff because the collision happens exactly at distance 1.
    let mut u = cfg.omega2.scale(1.0 + d);
    u.axpy(tau, &cfg.w2);
    let omega2_post = u.normalized()?;

    // μ = W₂·ω₂′ = (1+d)η₂ + τ|W₂|², evaluated in the stable product form.
    let mu = (1.0 + d) * sqrt1mz * cfg.eta2;
    let eta2_post = -rv * mu;

    // Slot-1 pair drifts for time τ: new gap from the expanded square root,
    // cancellation-free for small arguments.
    let s = tau * (2.0 * cfg.eta1 + tau * w1sq);
    let gap_post = s / (1.0 + (1.0 + s).sqrt());

    let mut v = cfg.omega1.clone();
    v.axpy(tau, &cfg.w1);
    let omega1_post = v.scale(1.0 / (1.0 + gap_post)).normalized()?;

    // Velocity updates: the shared particle receives the slot-2 impulse.
    let mut w2_post = cfg.w2.clone();
    w2_post.axpy(-(1.0 + rv) * mu, &omega2_post);
    let mut w1_post = cfg.w1.clone();
    w1_post.axpy(-0.5 * (1.0 + rv) * mu, &omega2_post);

    let cos_angle_post = omega1_post.dot(&omega2_post);
    let eta1_post =
        (cfg.eta1 + tau * w1sq) / (1.0 + gap_post) - 0.5 * (1.0 + rv) * cos_angle_post * mu;

    let output = RelativeConfig {
        omega1: omega1_post,
        omega2: omega2_post,
        w1: w1_post,
        w2: w2_post,
        eta1: eta1_post,
        eta2: eta2_post,
        gap: gap_post,
    };
    Ok(MapStep {
        input: cfg.clone(),
        tau,
        output,
        eta1_post,
        eta2_post,
        cos_angle_post,
    })
}

/// Exchanges the two slots: `(ω₁, W₁, η₁) ↔ (ω₂, W₂, η₂)`, gap unchanged.
///
/// On an [`apply_map`] output this restores the convention that slot 1 is the
/// pair in contact: the freshly collided pair (old slot 2, at distance 1)
/// becomes the new slot 1, and the drifted pair (old slot 1, at distance
/// `1 + gap`) becomes the new slot-2 collision candidate. An involution.
pub fn swap_roles(cfg: &RelativeConfig) -> RelativeConfig {
    RelativeConfig {
        omega1: cfg.omega2.clone(),
        omega2: cfg.omega1.clone(),
        w1: cfg.w2.clone(),
        w2: cfg.w1.clone(),
        eta1: cfg.eta2,
        eta2: cfg.eta1,
        gap: cfg.gap,
    }
}

/// The two-line flat-surface approximation of the normal-component recursion:
/// `η₁′ = η₁ − (1+r)/2·cosθ̄·η₂`, `η₂′ = −r·η₂`. A diagnostic/oracle for the
/// limiting linear system, not part of the exact dynamics.
pub fn flat_surface_step(
    eta1: f64,
    eta2: f64,
    cos_theta_bar: f64,
    r: Restitution,
) -> (f64, f64) {
    (
        eta1 - 0.5 * (1.0 + r.value()) * cos_theta_bar * eta2,
        -r.value() * eta2,
    )
}

/// Why an `f64` map iteration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapIterationEnd {
    /// Requested number of steps completed.
    Completed,
    /// The gap fell below [`DEGENERATE_GAP`]: `ζ` is meaningless in `f64`
    /// from here on (the scaled iterator has no such floor).
    DegenerateGap { at: usize },
    /// The configuration left the map's domain (not approaching, or ζ ≥ 1).
    DomainExit { at: usize, reason: String },
}

/// A sequence of map steps with its stopping reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapRun {
    pub steps: Vec<MapStep>,
    pub end: MapIterationEnd,
}

/// Iterates `swap_roles ∘ apply_map` in plain `f64`.
///
/// Useful for moderate-depth trajectories and diagnostics; deep collapses
/// underflow `f64` and belong to [`iterate_scaled`].
pub fn iterate_map(cfg: &RelativeConfig, r: Restitution, max_steps: usize) -> MapRun {
    let mut current = cfg.clone();
    let mut steps = Vec::new();
    for index in 0..max_steps {
        if current.gap < DEGENERATE_GAP {
            return MapRun {
                steps,
                end: MapIterationEnd::DegenerateGap { at: index },
            };
        }
        match apply_map(&current, r) {
            Ok(step) => {
                current = swap_roles(&step.output);
                steps.push(step);
            }
            Err(err) => {
                return MapRun {
                    steps,
                    end: MapIterationEnd::DomainExit {
                        at: index,
                        reason: err.to_string(),
                    },
                }
            }
        }
    }
    MapRun {
        steps,
        end: MapIterationEnd::Completed,
    }
}

// ---------------------------------------------------------------------------
// Scaled iteration: the collapse regime beyond f64 range.
// ---------------------------------------------------------------------------

/// Collapse-regime configuration in role variables.
///
/// Role `c` is the approaching pair (it collides next), role `s` the pair
/// that just collided and sits at contact; each collision swaps the roles.
/// The contracting scalars — normal components `η_c < 0 < η_s` and the gap
/// `d` of the `c` pair — are extended-exponent [`Wide`] values; directions
/// and tangential velocity parts are O(1) and stay `f64`. The full relative
/// velocity of a role is `W = W^⊥ + η·ω` with `W^⊥ ⊥ ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledConfig {
    pub omega_c: VecD,
    pub omega_s: VecD,
    pub w_c_perp: VecD,
    pub w_s_perp: VecD,
    pub eta_c: Wide,
    pub eta_s: Wide,
    pub gap: Wide,
}

impl ScaledConfig {
    /// Converts a slot-convention configuration (slot 1 in contact = role
    /// `s`, slot 2 approaching = role `c`) into role variables.
    pub fn from_relative(cfg: &RelativeConfig) -> Result<ScaledConfig> {
        cfg.validate()?;
        Ok(ScaledConfig {
            omega_c: cfg.omega2.clone(),
            omega_s: cfg.omega1.clone(),
            w_c_perp: cfg.w2.reject_from_unit(&cfg.omega2),
            w_s_perp: cfg.w1.reject_from_unit(&cfg.omega1),
            eta_c: Wide::from_f64(cfg.eta2),
            eta_s: Wide::from_f64(cfg.eta1),
            gap: Wide::from_f64(cfg.gap),
        })
    }

    /// `|W_c|² = |W_c^⊥|² + η_c²` (the `η²` term vanishes into roundoff deep
    /// in a collapse, which is exact to `f64` precision).
    pub fn w_c_sq(&self) -> f64 {
        self.w_c_perp.norm_sq() + self.eta_c.square().to_f64()
    }

    /// `|W_s|² = |W_s^⊥|² + η_s²`.
    pub fn w_s_sq(&self) -> f64 {
        self.w_s_perp.norm_sq() + self.eta_s.square().to_f64()
    }

    /// Contact angle `ω_c·ω_s`.
    pub fn cos_cs(&self) -> f64 {
        self.omega_c.dot(&self.omega_s)
    }

    /// Full relative velocity of the `c` pair, in `f64` (underflowed `η_c`
    /// contributes nothing, correctly).
    pub fn w_c_full(&self) -> VecD {
        let mut w = self.w_c_perp.clone();
        w.axpy(self.eta_c.to_f64(), &self.omega_c);
        w
    }

    /// Full relative velocity of the `s` pair, in `f64`.
    pub fn w_s_full(&self) -> VecD {
        let mut w = self.w_s_perp.clone();
        w.axpy(self.eta_s.to_f64(), &self.omega_s);
        w
    }
}

/// One scaled collision: the collision of the `c` pair, after which the
/// roles swap (`state_after.omega_s` is the fresh contact direction).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledStep {
    /// 0-based iterate index.
    pub index: usize,
    pub tau: Wide,
    pub zeta: Wide,
    /// `μ = W_c·ω at impact = (1+d)√(1−ζ)·η_c` (negative).
    pub mu: Wide,
    /// Accumulated time Στ after this collision.
    pub t: Wide,
    pub state_after: ScaledConfig,
    pub w_c_sq_after: f64,
    pub w_s_sq_after: f64,
    pub cos_cs_after: f64,
    /// Minimum center distance of the third pair over the flight segment.
    pub third_pair_min_dist: f64,
}

/// Why a scaled iteration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScaledEnd {
    /// Requested number of steps completed.
    Completed,
    /// `η_c ≥ 0`: the candidate pair is not approaching; the alternating
    /// order ends here.
    NotApproaching { at: usize },
    /// `ζ ≥ 1`: no collision of the candidate pair is scheduled.
    ZetaExceedsOne { at: usize },
    /// The third pair's center distance reached 1 during the flight: a
    /// collision outside the alternating order would occur first.
    ThirdPairContact { at: usize },
}

/// A scaled trajectory: initial role state, per-collision steps, stop reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledRun {
    pub initial: ScaledConfig,
    pub w_c_sq_0: f64,
    pub w_s_sq_0: f64,
    pub cos_cs_0: f64,
    pub steps: Vec<ScaledStep>,
    pub end: ScaledEnd,
}

/// Minimum of `|p + t·q|` over `t ∈ [0, t_max]`.
fn min_segment_distance(p: &VecD, q: &VecD, t_max: f64) -> f64 {
    let qq = q.norm_sq();
    let t_star = if qq > 0.0 {
        (-p.dot(q) / qq).clamp(0.0, t_max)
    } else {
        0.0
    };
    let mut best = p.norm_sq();
    for t in [t_star, t_max] {
        let mut moved = p.clone();
        moved.axpy(t, q);
        best = best.min(moved.norm_sq());
    }
    best.sqrt()
}

/// One collision in role variables. Returns the step, or the reason the
/// iteration must stop at this index.
fn step_scaled(state: &ScaledConfig, r: Restitution, index: usize, t: Wide) -> StepOutcome {
    if !state.eta_c.is_sign_negative() {
        return StepOutcome::End(ScaledEnd::NotApproaching { at: index });
    }
    let one = Wide::ONE;
    let two = Wide::from_f64(2.0);
    let d = state.gap;
    let one_plus_d = one + d;
    let w_c_sq = state.w_c_sq();
    let w_s_sq = state.w_s_sq();

    // ζ = d(2+d)|W_c|² / ((1+d)²η_c²), exact in extended precision.
    let zeta = d * (two + d) * Wide::from_f64(w_c_sq)
        / (one_plus_d.square() * state.eta_c.square());
    if zeta >= one {
        return StepOutcome::End(ScaledEnd::ZetaExceedsOne { at: index });
    }
    let sqrt1mz = (one - zeta).sqrt();
    // τ = d(2+d) / ((1+d)(−η_c)(1+√(1−ζ))): the cancellation-free form.
    let tau = d * (two + d) / (one_plus_d * (-state.eta_c) * (one + sqrt1mz));
    let mu = one_plus_d * sqrt1mz * state.eta_c;

    // Third-pair guard over the flight segment, O(1) geometry in f64.
    let d64 = d.to_f64();
    let tau64 = tau.to_f64();
    let w_c_full = state.w_c_full();
    let w_s_full = state.w_s_full();
    let mut p = state.omega_c.scale(1.0 + d64);
    p.axpy(-1.0, &state.omega_s);
    let mut q = w_c_full.clone();
    q.axpy(-1.0, &w_s_full);
    let third_min = min_segment_distance(&p, &q, tau64);
    if third_min <= 1.0 {
        return StepOutcome::End(ScaledEnd::ThirdPairContact { at: index });
    }

    // New contact direction: (1+d)ω_c + τW_c, renormalized.
    let mut u = state.omega_c.scale(1.0 + d64);
    u.axpy(tau64, &w_c_full);
    let omega_s_next = u.normalized().expect("contact direction near unit");

    // New gap of the old contact pair after drifting for τ:
    // d' = √(1 + 2η_sτ + |W_s|²τ²) − 1 via the expanded form.
    let s = two * state.eta_s * tau + tau.square() * Wide::from_f64(w_s_sq);
    let gap_next = s / (one + (one + s).sqrt());

    let mut v = state.omega_s.clone();
    v.axpy(tau64, &w_s_full);
    let omega_c_next = v.normalized().expect("drifted direction near unit");

    let rv = r.value();
    let mu64 = mu.to_f64();
    // Role s (just collided, old role c): full reflection.
    let mut w_s_next_full = w_c_full.clone();
    w_s_next_full.axpy(-(1.0 + rv) * mu64, &omega_s_next);
    // Role c (next collider, old role s): half impulse via the shared particle.
    let mut w_c_next_full = w_s_full.clone();
    w_c_next_full.axpy(-0.5 * (1.0 + rv) * mu64, &omega_s_next);

    let eta_s_next = Wide::from_f64(-rv) * mu;
    let cos_next = omega_c_next.dot(&omega_s_next);
    // The exact recursion for the next approach component — never a dot
    // product of O(1) vectors, which would lose it to cancellation.
    let eta_c_next = (state.eta_s + tau * Wide::from_f64(w_s_sq)) / (one + gap_next)
        - Wide::from_f64(0.5 * (1.0 + rv) * cos_next) * mu;

    let state_after = ScaledConfig {
        w_c_perp: w_c_next_full.reject_from_unit(&omega_c_next),
        w_s_perp: w_s_next_full.reject_from_unit(&omega_s_next),
        omega_c: omega_c_next,
        omega_s: omega_s_next,
        eta_c: eta_c_next,
        eta_s: eta_s_next,
        gap: gap_next,
    };
    let w_c_sq_after = state_after.w_c_sq();
    let w_s_sq_after = state_after.w_s_sq();
    let cos_cs_after = state_after.cos_cs();
    StepOutcome::Step(ScaledStep {
        index,
        tau,
        zeta,
        mu,
        t: t + tau,
        state_after,
        w_c_sq_after,
        w_s_sq_after,
        cos_cs_after,
        third_pair_min_dist: third_min,
    })
}

enum StepOutcome {
    Step(ScaledStep),
    End(ScaledEnd),
}

/// Iterates the scaled collision map for up to `max_steps` collisions.
pub fn iterate_scaled(initial: &ScaledConfig, r: Restitution, max_steps: usize) -> ScaledRun {
    let mut steps: Vec<ScaledStep> = Vec::with_capacity(max_steps.min(4096));
    let mut state = initial.clone();
    let mut t = Wide::ZERO;
    let mut end = ScaledEnd::Completed;
    for index in 0..max_steps {
        match step_scaled(&state, r, index, t) {
            StepOutcome::Step(step) => {
                state = step.state_after.clone();
                t = step.t;
                steps.push(step);
            }
            StepOutcome::End(reason) => {
                end = reason;
                break;
            }
        }
    }
    ScaledRun {
        initial: initial.clone(),
        w_c_sq_0: initial.w_c_sq(),
        w_s_sq_0: initial.w_s_sq(),
        cos_cs_0: initial.cos_cs(),
        steps,
        end,
    }
}

/// The pair tag of scaled step `k` when the initial contact pair is `(0,1)`
/// and the first collision is `(0,2)`: even steps hit `(0,2)`, odd `(0,1)`.
pub fn scaled_step_pair(step_index: usize) -> Pair {
    if step_index % 2 == 0 {
        Pair::P02
    } else {
        Pair::P01
    }
}

/// Embeds a role-variable state as an absolute [`SystemState`]: shared
/// particle 0 at the origin at rest, the `s` partner in contact at `ω_s`,
/// the `c` partner at `(1+d)ω_c`. Only meaningful while the scalars are
/// within `f64` range (e.g. the initial datum); deep-collapse states lose
/// their sub-roundoff scalars in the embedding.
pub fn embed_scaled(state: &ScaledConfig, s_particle: usize, c_particle: usize, t: f64) -> Result<SystemState> {
    if s_particle == c_particle || s_particle == 0 || c_particle == 0 || s_particle > 2 || c_particle > 2 {
        return Err(Error::InvalidArgument(
            "role particles must be 1 and 2 in some order".into(),
        ));
    }
    let dim = state.omega_c.dim();
    let zero = VecD::zeros(dim)?;
    let mut x: [VecD; 3] = [zero.clone(), zero.clone(), zero.clone()];
    let mut v = x.clone();
    x[s_particle] = state.omega_s.clone();
    x[c_particle] = state.omega_c.scale(1.0 + state.gap.to_f64());
    v[s_particle] = state.w_s_full();
    v[c_particle] = state.w_c_full();
    SystemState::new(t, x, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{to_relative_frame, Pair};
    use crate::engine;

    fn v2(x: f64, y: f64) -> VecD {
        VecD::new(vec![x, y]).unwrap()
    }

    /// A well-separated domain configuration: slot 1 in contact separating,
    /// slot 2 approaching head-on-ish with a moderate gap.
    fn sample_cfg() -> RelativeConfig {
        let omega1 = v2(1.0, 0.0);
        let omega2 = v2(-0.6, 0.8);
        let w1 = v2(0.4, 0.3); // eta1 = 0.4 > 0
        let w2 = v2(0.54, -0.72); // w2·omega2 = -0.9 < 0
        RelativeConfig {
            eta1: w1.dot(&omega1),
            eta2: w2.dot(&omega2),
            omega1,
            omega2,
            w1,
            w2,
            gap: 0.2,
        }
    }

    #[test]
    fn zeta_matches_definition_and_contact_limit() {
        let mut cfg = sample_cfg();
        let z = zk_parameter(&cfg).unwrap().zeta;
        let d = cfg.gap;
        let direct = d * (2.0 + d) * cfg.w2.norm_sq() / ((1.0 + d).powi(2) * cfg.eta2 * cfg.eta2);
        assert!((z - direct).abs() <= 1e-13 * direct.max(1.0));

        cfg.gap = 1e-300;
        assert!(zk_parameter(&cfg).unwrap().zeta < 1e-290);
    }

    #[test]
    fn zeta_undefined_without_normal_component() {
        let mut cfg = sample_cfg();
        cfg.w2 = v2(0.8, 0.6); // exactly tangential to omega2
        cfg.eta2 = 0.0;
        assert!(matches!(
            zk_parameter(&cfg),
            Err(Error::UndefinedParameter)
        ));
    }

    #[test]
    fn purely_normal_approach_keeps_zeta_below_one() {
        let mut cfg = sample_cfg();
        cfg.w2 = cfg.omega2.scale(-0.7);
        cfg.eta2 = -0.7;
        let z = zk_parameter(&cfg).unwrap().zeta;
        let d = cfg.gap;
        assert!((z - d * (2.0 + d) / (1.0 + d).powi(2)).abs() < 1e-15);
        assert!(z < 1.0);
    }

    #[test]
    fn collision_time_solves_known_quadratic() {
        // Purely normal approach, gap 0.5, eta2 = −1: |W|²τ² + 2(1+d)η₂τ +
        // d(2+d) = τ² − 3τ + 1.25, first root 0.5.
        let omega1 = v2(1.0, 0.0);
        let omega2 = v2(0.0, 1.0);
        let cfg = RelativeConfig {
            omega1: omega1.clone(),
            omega2: omega2.clone(),
            w1: omega1.scale(0.3),
            w2: omega2.scale(-1.0),
            eta1: 0.3,
            eta2: -1.0,
            gap: 0.5,
        };
        let tau = collision_time(&cfg).unwrap();
        assert!((tau - 0.5).abs() < 1e-14, "tau = {tau}");
    }

    #[test]
    fn collision_time_bracketing_holds() {
        let cfg = sample_cfg();
        let tau = collision_time(&cfg).unwrap();
        let d = cfg.gap;
        let hi = d * (2.0 + d) / ((1.0 + d) * (-cfg.eta2));
        assert!(tau >= hi / 2.0 && tau <= hi, "tau = {tau}, hi = {hi}");
    }

    #[test]
    fn collision_time_degenerates_gracefully() {
        let mut cfg = sample_cfg();
        cfg.w2 = cfg.omega2.scale(0.5);
        cfg.eta2 = 0.5;
        assert!(matches!(collision_time(&cfg), Err(Error::NoCollision(_))));
    }

    #[test]
    fn map_matches_one_engine_collision() {
        // Embed, run the engine for exactly one collision, re-extract, and
        // compare with the closed-form map output (canonical orientation).
        let cfg = sample_cfg();
        let r = Restitution::new(0.4).unwrap();
        let step = apply_map(&cfg, r).unwrap();

        let state = crate::core::from_relative_frame(&cfg, Pair::P01, Pair::P02, 0.0).unwrap();
        let sched = engine::next_collision(&state).unwrap().unwrap();
        assert_eq!(sched.pair, Pair::P02);
        assert!((sched.dt - step.tau).abs() < 1e-12);
        let at_contact = engine::free_flight(&state, sched.dt).unwrap();
        let collided = engine::apply_collision(&at_contact, Pair::P02, r).unwrap();
        let extracted = to_relative_frame(&collided, Pair::P02, Pair::P01).unwrap();

        let canonical = swap_roles(&step.output);
        assert!(extracted.omega1.distance(&canonical.omega1) < 1e-10);
        assert!(extracted.omega2.distance(&canonical.omega2) < 1e-10);
        assert!(extracted.w1.distance(&canonical.w1) < 1e-10);
        assert!(extracted.w2.distance(&canonical.w2) < 1e-10);
        assert!((extracted.eta1 - canonical.eta1).abs() < 1e-10);
        assert!((extracted.eta2 - canonical.eta2).abs() < 1e-10);
        assert!((extracted.gap - canonical.gap).abs() < 1e-10);
    }

    #[test]
    fn eta2_post_simplification_holds() {
        let cfg = sample_cfg();
        let r = Restitution::new(0.25).unwrap();
        let step = apply_map(&cfg, r).unwrap();
        // η₂′ = −r·(W₂·ω₂′) and equals the unsimplified form within 1e-12.
        let direct = -0.25 * cfg.w2.dot(&step.output.omega2);
        assert!((step.eta2_post - direct).abs() < 1e-12);
        let unstable = -0.25 * ((1.0 + cfg.gap) * cfg.eta2 + step.tau * cfg.w2.norm_sq());
        assert!((step.eta2_post - unstable).abs() < 1e-12);
        // Contact happens at distance 1: the pre-normalization direction has
        // unit norm within 1e-10.
        let mut u = cfg.omega2.scale(1.0 + cfg.gap);
        u.axpy(step.tau, &cfg.w2);
        assert!((u.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn collinear_configuration_is_invariant() {
        // 1D dynamics embedded in the plane: all directions ±e₁.
        let e = v2(1.0, 0.0);
        let cfg = RelativeConfig {
            omega1: e.clone(),
            omega2: e.scale(-1.0),
            w1: e.scale(0.2),
            w2: e.scale(0.5), // w2·omega2 = −0.5: approaching
            eta1: 0.2,
            eta2: -0.5,
            gap: 0.3,
        };
        let step = apply_map(&cfg, Restitution::new(0.5).unwrap()).unwrap();
        assert!(step.output.omega1.distance(&cfg.omega1) < 1e-14);
        assert!(step.output.omega2.distance(&cfg.omega2) < 1e-14);
        assert!((step.cos_angle_post + 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_is_an_involution() {
        let cfg = sample_cfg();
        assert_eq!(swap_roles(&swap_roles(&cfg)), cfg);
    }

    #[test]
    fn flat_surface_step_closed_form() {
        let r = Restitution::new(0.02).unwrap();
        let (e1, e2) = flat_surface_step(1.0, -1.0, -1.0, r);
        assert!((e1 - 0.49).abs() < 1e-15);
        assert!((e2 - 0.02).abs() < 1e-15);
        let (f1, f2) = flat_surface_step(0.7, 0.0, -0.9, r);
        assert_eq!((f1, f2), (0.7, 0.0));
    }

    #[test]
    fn map_domain_violations_are_rejected() {
        let r = Restitution::new(0.5).unwrap();
        let mut bad = sample_cfg();
        bad.w1 = bad.omega1.scale(-0.1);
        bad.eta1 = -0.1;
        assert!(matches!(apply_map(&bad, r), Err(Error::MapDomain(_))));

        let mut bad = sample_cfg();
        bad.w2 = bad.omega2.scale(0.4);
        bad.eta2 = 0.4;
        assert!(matches!(apply_map(&bad, r), Err(Error::MapDomain(_))));

        let mut bad = sample_cfg();
        // Huge tangential part drives ζ above 1.
        bad.w2 = v2(8.0 * 0.8, 8.0 * 0.6);
        bad.eta2 = bad.w2.dot(&bad.omega2);
        bad.w2.axpy(-bad.eta2 - 0.01, &bad.omega2);
        bad.eta2 = bad.w2.dot(&bad.omega2);
        assert!(bad.eta2 < 0.0);
        assert!(zk_parameter(&bad).unwrap().zeta > 1.0);
        assert!(matches!(apply_map(&bad, r), Err(Error::MapDomain(_))));
    }

    #[test]
    fn scaled_step_agrees_with_f64_map_at_moderate_scale() {
        // At O(1)–O(1e-3) scales both pipelines are exact; they must agree.
        let cfg = sample_cfg();
        let r = Restitution::new(0.4).unwrap();
        let f64_step = apply_map(&cfg, r).unwrap();
        let canonical = swap_roles(&f64_step.output);

        let scaled0 = ScaledConfig::from_relative(&cfg).unwrap();
        let run = iterate_scaled(&scaled0, r, 1);
        assert_eq!(run.steps.len(), 1);
        let after = &run.steps[0].state_after;

        assert!((run.steps[0].tau.to_f64() - f64_step.tau).abs() < 1e-13);
        // After the swap, canonical slot 1 = fresh contact = role s.
        assert!(after.omega_s.distance(&canonical.omega1) < 1e-12);
        assert!(after.omega_c.distance(&canonical.omega2) < 1e-12);
        assert!((after.eta_s.to_f64() - canonical.eta1).abs() < 1e-12);
        assert!((after.eta_c.to_f64() - canonical.eta2).abs() < 1e-12);
        assert!((after.gap.to_f64() - canonical.gap).abs() < 1e-12);
        let w_s = after.w_s_full();
        let w_c = after.w_c_full();
        assert!(w_s.distance(&canonical.w1) < 1e-12);
        assert!(w_c.distance(&canonical.w2) < 1e-12);
    }

    #[test]
    fn scaled_iteration_survives_far_below_f64_range() {
        // A symmetric collinear-ish chain contracts forever; push it far
        // past f64 underflow and check the scalars stay finite and tiny.
        let cfg = RelativeConfig {
            omega1: v2(1.0, 0.0),
            omega2: v2(-1.0, 0.0),
            w1: v2(0.05, 0.0),
            w2: v2(1.0, 0.0),
            eta1: 0.05,
            eta2: -1.0,
            gap: 1e-4,
        };
        let scaled0 = ScaledConfig::from_relative(&cfg).unwrap();
        let run = iterate_scaled(&scaled0, Restitution::new(0.02).unwrap(), 2000);
        assert_eq!(run.end, ScaledEnd::Completed, "end = {:?}", run.end);
        assert_eq!(run.steps.len(), 2000);
        let last = run.steps.last().unwrap();
        assert!(last.state_after.eta_c.is_sign_negative());
        // Far beyond f64: the decade count is in the thousands.
        assert!(last.state_after.gap.log10_abs() < -1000.0);
        assert!(last.tau.log10_abs() < -1000.0);
        // Times still converge: t is finite and O(gap₀/η).
        assert!(last.t.to_f64().is_finite());
    }

    #[test]
    fn scaled_pair_tags_alternate() {
        assert_eq!(scaled_step_pair(0), Pair::P02);
        assert_eq!(scaled_step_pair(1), Pair::P01);
        assert_eq!(scaled_step_pair(2), Pair::P02);
    }
}
