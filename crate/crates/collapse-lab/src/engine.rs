//! Event-driven simulation of the inelastic three-sphere flow.
//!
//! Between collisions the spheres move ballistically; a collision of pair
//! `(i, j)` happens when their center distance reaches 1 while approaching.
//! The next contact time of a pair solves the quadratic
//! `|w|²τ² + 2(p·w)τ + (|p|² − 1) = 0` in the pair's relative coordinates
//! `p = x_j − x_i`, `w = v_j − v_i`; the engine takes the smallest strictly
//! positive first-contact root over all three pairs, flies there, and applies
//! the inelastic reflection. Roots are evaluated in the cancellation-stable
//! form `q = −(b + sign(b)·√Δ)/2`, roots `q/a` and `c/q`.
//!
//! Two degeneracy guards keep the engine honest rather than silently wrong:
//! near-tangential impacts (discriminant within [`GRAZING_TOL`] of zero,
//! relative to `b²`) and two pairs reaching contact within a relative
//! [`TRIPLE_TOL`] window both end the run with a labeled outcome, because the
//! collision law is ill-posed there. Additionally, absolute `f64` coordinates
//! cannot resolve a surface gap once `gap·(2+gap)` falls below
//! [`ENGINE_GAP_FLOOR`] — the subtraction `|p|² − 1` is then dominated by
//! roundoff — so deep-collapse runs end with a gap-resolution outcome instead
//! of producing noise events. The scaled iterator in the `map` module exists
//! precisely to follow the dynamics beyond that floor.
//!
//! [`GRAZING_TOL`]: crate::tol::GRAZING_TOL
//! [`TRIPLE_TOL`]: crate::tol::TRIPLE_TOL
//! [`ENGINE_GAP_FLOOR`]: crate::tol::ENGINE_GAP_FLOOR

use crate::core::{Pair, Restitution, SystemState};
use crate::error::{Error, Result};
use crate::tol::{CONTACT_TOL, ENGINE_GAP_FLOOR, GRAZING_TOL, OVERLAP_TOL, TRIPLE_TOL};
use crate::vec::VecD;
use serde::{Deserialize, Serialize};

/// One recorded collision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    /// 1-based collision counter.
    pub index: usize,
    /// Absolute time of the impact.
    pub t: f64,
    pub pair: Pair,
    /// Normal relative velocity at contact, before the reflection (< 0).
    pub eta_pre: f64,
    /// Normal relative velocity after the reflection (= −r·eta_pre).
    pub eta_post: f64,
    /// Zhou–Kadanoff parameter `4ac/b²` of the scheduling quadratic.
    pub zeta: f64,
    /// Flight time since the previous event (or since the initial state).
    pub tau: f64,
}

/// Per-event geometric sample kept alongside the event log: the contact
/// normal at impact and the colliding pair's surface gap at scheduling time
/// (before the free flight). Analysis consumes these for direction-Cauchy
/// residuals and gap tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub pair: Pair,
    /// Unit contact normal (from the lower-indexed member to the higher).
    pub omega: VecD,
    /// Surface gap when the collision was scheduled.
    pub gap: f64,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    /// The collision budget was exhausted.
    MaxCollisions,
    /// The time horizon was reached.
    MaxTime,
    /// The inter-collision times contracted geometrically below the
    /// configured horizon: numerical evidence of an accumulation point.
    CollapseDetected { tau_star_estimate: f64 },
    /// No pair will ever reach contact again.
    Separation,
    /// Two pairs reached contact within the triple-collision window; the
    /// dynamics is ill-posed there.
    TripleCollision { first: Pair, second: Pair },
    /// The selected impact was tangential to machine precision.
    Grazing { pair: Pair },
    /// The colliding pair's gap fell below what absolute `f64` coordinates
    /// can resolve; continuing would produce roundoff noise, not dynamics.
    GapResolution { pair: Pair, gap: f64 },
}

/// Numerical criterion for declaring a collision accumulation.
///
/// Collapse is declared when `window` consecutive inter-collision ratios
/// `τ_{k+1}/τ_k` all stay at or below `rho_max` and the geometric tail bound
/// `τ_n·ρ/(1−ρ)` (with `ρ` the window's maximal ratio) drops below
/// `time_horizon_eps`. `min_events` additionally delays the check, letting
/// transients pass. This is a finite certificate for an asymptotic property;
/// the thresholds are policy, not theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseCriteria {
    pub window: usize,
    pub rho_max: f64,
    pub time_horizon_eps: f64,
    pub min_events: usize,
}

impl Default for CollapseCriteria {
    fn default() -> Self {
        CollapseCriteria {
            window: 64,
            rho_max: 0.999,
            time_horizon_eps: 1e-9,
            min_events: 0,
        }
    }
}

/// Stopping rules for [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    pub max_collisions: usize,
    pub max_time: f64,
    pub collapse: CollapseCriteria,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_collisions: 10_000,
            max_time: f64::INFINITY,
            collapse: CollapseCriteria::default(),
        }
    }
}

/// Complete record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub events: Vec<CollisionEvent>,
    pub samples: Vec<TrajectorySample>,
    pub final_state: SystemState,
    pub termination: Termination,
}

/// A pending collision: flight time from the current state, the pair, and
/// the Zhou–Kadanoff parameter `ζ = 4ac/b²` of its scheduling quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledCollision {
    pub dt: f64,
    pub pair: Pair,
    pub zeta: f64,
}

/// First future contact over all three pairs, or `None` if the spheres
/// never meet again.
///
/// A pair is a candidate when it is approaching (`b = 2p·w < 0`) and the
/// quadratic has a real root (`Δ = b² − 4ac > 0`). The first-contact root is
/// taken as `c/q` with `q = (|b| + √Δ)/2`, which is free of subtractive
/// cancellation for `b < 0`. Errors: a pair whose discriminant lies within
/// `±GRAZING_TOL·b²` of zero (tangency is numerically undecidable), or two
/// distinct pairs reaching contact within a relative `TRIPLE_TOL` window.
pub fn next_collision(state: &SystemState) -> Result<Option<ScheduledCollision>> {
    let mut candidates: Vec<ScheduledCollision> = Vec::with_capacity(3);
    for pair in Pair::ALL {
        let p = state.separation(pair);
        let w = state.relative_velocity(pair);
        let a = w.norm_sq();
        let b = 2.0 * p.dot(&w);
        let c = p.norm_sq() - 1.0;
        // c = gap(2+gap): overlap beyond tolerance is a corrupt state.
        if c < -2.0 * OVERLAP_TOL {
            return Err(Error::Overlap {
                pair: pair.label(),
                distance: p.norm(),
            });
        }
        if b >= 0.0 || a == 0.0 {
            continue; // receding or no relative motion: never reaches contact
        }
        let disc = b * b - 4.0 * a * c;
        let guard = GRAZING_TOL * b * b;
        if disc <= guard {
            if disc > -guard {
                // Tangency within machine resolution: real dynamics undecidable.
                return Err(Error::Grazing {
                    pair: pair.label(),
                    one_minus_zeta: disc / (b * b),
                });
            }
            continue; // clean miss
        }
        let q = -(b - disc.sqrt()) / 2.0; // b < 0, so q = (|b| + √Δ)/2 > 0
        let dt = if c >= 0.0 { c / q } else { 0.0 };
        candidates.push(ScheduledCollision {
            dt,
            pair,
            zeta: 4.0 * a * c / (b * b),
        });
    }
    candidates.sort_by(|x, y| x.dt.partial_cmp(&y.dt).unwrap());
    match candidates.as_slice() {
        [] => Ok(None),
        [only] => Ok(Some(*only)),
        [first, second, ..] => {
            let window = second.dt - first.dt;
            if window <= TRIPLE_TOL * second.dt.max(first.dt) {
                Err(Error::TripleCollision {
                    first: first.pair.label(),
                    second: second.pair.label(),
                    window,
                })
            } else {
                Ok(Some(*first))
            }
        }
    }
}

/// Inelastic reflection of a contact pair.
///
/// With `ω` the unit normal from member `i` to member `j` and
/// `η = (v_j − v_i)·ω < 0`, both members receive the impulse
/// `±(1+r)/2·η·ω`, flipping the normal relative component to `−r·η` and
/// leaving tangentials and the spectator untouched.
pub fn apply_collision(state: &SystemState, pair: Pair, r: Restitution) -> Result<SystemState> {
    apply_collision_unrestricted(state, pair, r.value())
}

/// Reflection with an arbitrary coefficient, admitting the elastic limit
/// `ratio = 1` — a validation hook for conservation harnesses, not part of
/// the physical API (the theory lives in `0 < r < 1`).
#[doc(hidden)]
pub fn apply_collision_unrestricted(
    state: &SystemState,
    pair: Pair,
    ratio: f64,
) -> Result<SystemState> {
    let (i, j) = pair.members();
    let p = state.separation(pair);
    let dist = p.norm();
    if (dist - 1.0).abs() > CONTACT_TOL {
        return Err(Error::NotInContact {
            pair: pair.label(),
            distance: dist,
        });
    }
    let omega = p.scale(1.0 / dist);
    let w = state.relative_velocity(pair);
    let eta = w.dot(&omega);
    if eta >= 0.0 {
        return Err(Error::NotApproaching {
            pair: pair.label(),
            eta,
        });
    }
    let impulse = 0.5 * (1.0 + ratio) * eta;
    let mut out = state.clone();
    out.v[i].axpy(impulse, &omega);
    out.v[j].axpy(-impulse, &omega);
    Ok(out)
}

/// Ballistic drift: `x_i ← x_i + dt·v_i`, clock advanced by `dt`.
///
/// The caller guarantees no collision occurs strictly inside `(0, dt)`; the
/// endpoint is checked, and a produced overlap reports a flight overrun.
pub fn free_flight(state: &SystemState, dt: f64) -> Result<SystemState> {
    if !(dt >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "free-flight duration must be nonnegative, got {dt}"
        )));
    }
    let mut out = state.clone();
    for i in 0..3 {
        out.x[i].axpy(dt, &state.v[i]);
    }
    out.t += dt;
    for pair in Pair::ALL {
        let dist = out.distance(pair);
        if dist < 1.0 - OVERLAP_TOL {
            return Err(Error::FlightOverrun {
                dt,
                pair: pair.label(),
                distance: dist,
            });
        }
    }
    Ok(out)
}

/// Total kinetic energy `½Σ|v_i|²` (unit masses).
pub fn kinetic_energy(state: &SystemState) -> f64 {
    0.5 * state.v.iter().map(VecD::norm_sq).sum::<f64>()
}

/// Total momentum `Σv_i`.
pub fn momentum(state: &SystemState) -> VecD {
    let mut total = state.v[0].clone();
    total.axpy(1.0, &state.v[1]);
    total.axpy(1.0, &state.v[2]);
    total
}

/// Runs the flow from `initial` until a limit or a degeneracy ends it.
///
/// The loop alternates [`next_collision`], [`free_flight`],
/// [`apply_collision`], recording every event. Triple collisions, grazing
/// impacts, and unresolvable gaps terminate with the corresponding labeled
/// outcome — they are dynamical data, not process failures. The run is a
/// pure function of its inputs.
pub fn run(initial: &SystemState, r: Restitution, limits: &RunLimits) -> Result<SimulationOutcome> {
    for pair in Pair::ALL {
        let dist = initial.distance(pair);
        if dist < 1.0 - OVERLAP_TOL {
            return Err(Error::Overlap {
                pair: pair.label(),
                distance: dist,
            });
        }
    }

    let mut state = initial.clone();
    let mut events: Vec<CollisionEvent> = Vec::new();
    let mut samples: Vec<TrajectorySample> = Vec::new();

    let termination = loop {
        if events.len() >= limits.max_collisions {
            break Termination::MaxCollisions;
        }
        let scheduled = match next_collision(&state) {
            Ok(Some(s)) => s,
            Ok(None) => break Termination::Separation,
            Err(Error::TripleCollision { first, second, .. }) => {
                break Termination::TripleCollision {
                    first: first.parse().expect("engine pair label"),
                    second: second.parse().expect("engine pair label"),
                }
            }
            Err(Error::Grazing { pair, .. }) => {
                break Termination::Grazing {
                    pair: pair.parse().expect("engine pair label"),
                }
            }
            Err(other) => return Err(other),
        };

        let gap_at_schedule = state.gap(scheduled.pair);
        if gap_at_schedule * (2.0 + gap_at_schedule) < ENGINE_GAP_FLOOR {
            break Termination::GapResolution {
                pair: scheduled.pair,
                gap: gap_at_schedule,
            };
        }
        if state.t + scheduled.dt > limits.max_time {
            let remaining = limits.max_time - state.t;
            if remaining > 0.0 {
                state = free_flight(&state, remaining)?;
            }
            break Termination::MaxTime;
        }

        state = free_flight(&state, scheduled.dt)?;
        let p = state.separation(scheduled.pair);
        let omega = p.scale(1.0 / p.norm());
        let eta_pre = state.relative_velocity(scheduled.pair).dot(&omega);
        state = apply_collision(&state, scheduled.pair, r)?;
        let eta_post = state.relative_velocity(scheduled.pair).dot(&omega);

        events.push(CollisionEvent {
            index: events.len() + 1,
            t: state.t,
            pair: scheduled.pair,
            eta_pre,
            eta_post,
            zeta: scheduled.zeta,
            tau: scheduled.dt,
        });
        samples.push(TrajectorySample {
            pair: scheduled.pair,
            omega,
            gap: gap_at_schedule,
        });

        if let Some(tau_star) = collapse_detected(&events, &limits.collapse) {
            break Termination::CollapseDetected {
                tau_star_estimate: tau_star,
            };
        }
    };

    Ok(SimulationOutcome {
        events,
        samples,
        final_state: state,
        termination,
    })
}

/// Evaluates the collapse criterion on the event tail; returns the τ*
/// estimate `t_n + τ_n·ρ/(1−ρ)` when it fires.
fn collapse_detected(events: &[CollisionEvent], criteria: &CollapseCriteria) -> Option<f64> {
    let n = events.len();
    if n < criteria.min_events || n < criteria.window + 1 {
        return None;
    }
    let tail = &events[n - criteria.window - 1..];
    let mut rho: f64 = 0.0;
    for pair in tail.windows(2) {
        let ratio = pair[1].tau / pair[0].tau;
        if !(ratio <= criteria.rho_max) {
            return None;
        }
        rho = rho.max(ratio);
    }
    let last = tail.last().expect("nonempty window");
    let tail_bound = last.tau * rho / (1.0 - rho);
    if tail_bound < criteria.time_horizon_eps {
        Some(last.t + tail_bound)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec::VecD;

    fn v2(x: f64, y: f64) -> VecD {
        VecD::new(vec![x, y]).unwrap()
    }

    fn head_on_state() -> SystemState {
        // Pair (0,1) at gap 1 closing at speed 1; particle 2 far and receding.
        SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(2.0, 0.0), v2(0.0, 50.0)],
            [v2(0.5, 0.0), v2(-0.5, 0.0), v2(0.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn head_on_pair_collides_at_unit_time() {
        let s = head_on_state();
        let sched = next_collision(&s).unwrap().unwrap();
        assert_eq!(sched.pair, Pair::P01);
        assert!((sched.dt - 1.0).abs() < 1e-14, "dt = {}", sched.dt);
    }

    #[test]
    fn receding_state_has_no_collision() {
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(2.0, 0.0), v2(0.0, 3.0)],
            [v2(-1.0, 0.0), v2(1.0, 0.0), v2(0.0, 1.0)],
        )
        .unwrap();
        assert!(next_collision(&s).unwrap().is_none());
    }

    #[test]
    fn flight_is_exact_and_a_semigroup() {
        let s = head_on_state();
        let a = free_flight(&free_flight(&s, 0.3).unwrap(), 0.45).unwrap();
        let b = free_flight(&s, 0.75).unwrap();
        for i in 0..3 {
            assert!(a.x[i].distance(&b.x[i]) < 1e-14);
            // Single-step flight is the closed form x + t·v exactly.
            let mut expect = s.x[i].clone();
            expect.axpy(0.75, &s.v[i]);
            assert_eq!(b.x[i], expect);
        }
        assert_eq!(free_flight(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn flight_overrun_is_reported() {
        let s = head_on_state();
        // The pair collides at t=1; flying to t=2 drives them into overlap.
        assert!(matches!(
            free_flight(&s, 2.0),
            Err(Error::FlightOverrun { .. })
        ));
    }

    #[test]
    fn collision_flips_normal_component() {
        let r = Restitution::new(0.3).unwrap();
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(1.0, 0.0), v2(0.0, 10.0)],
            [v2(1.0, 0.25), v2(-1.0, -0.5), v2(0.0, 0.0)],
        )
        .unwrap();
        let after = apply_collision(&s, Pair::P01, r).unwrap();
        let omega = v2(1.0, 0.0);
        let eta_pre = s.relative_velocity(Pair::P01).dot(&omega);
        let eta_post = after.relative_velocity(Pair::P01).dot(&omega);
        assert!((eta_post - (-0.3 * eta_pre)).abs() < 1e-14);
        // Tangential relative component bit-identical.
        assert_eq!(
            s.relative_velocity(Pair::P01)[1],
            after.relative_velocity(Pair::P01)[1]
        );
        // Spectator untouched.
        assert_eq!(s.v[2], after.v[2]);
        // Momentum conserved.
        assert!(momentum(&s).distance(&momentum(&after)) < 1e-14);
        // Energy drop (1−r²)/4·η².
        let drop = kinetic_energy(&s) - kinetic_energy(&after);
        let expected = (1.0 - 0.09) / 4.0 * eta_pre * eta_pre;
        assert!((drop - expected).abs() < 1e-13 * expected.abs().max(1.0));
    }

    #[test]
    fn collision_requires_contact_and_approach() {
        let r = Restitution::new(0.5).unwrap();
        let far = head_on_state();
        assert!(matches!(
            apply_collision(&far, Pair::P01, r),
            Err(Error::NotInContact { .. })
        ));
        let separating = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(1.0, 0.0), v2(0.0, 10.0)],
            [v2(-1.0, 0.0), v2(1.0, 0.0), v2(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            apply_collision(&separating, Pair::P01, r),
            Err(Error::NotApproaching { .. })
        ));
    }

    #[test]
    fn triple_collision_is_detected() {
        // Pairs (0,1) and (0,2) both reach contact at exactly t=1.
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(2.0, 0.0), v2(0.0, 2.0)],
            [v2(0.0, 0.0), v2(-1.0, 0.0), v2(0.0, -1.0)],
        )
        .unwrap();
        assert!(matches!(
            next_collision(&s),
            Err(Error::TripleCollision { .. })
        ));
    }

    #[test]
    fn grazing_impact_is_detected() {
        // Particle 1 flies past particle 0 with impact parameter exactly 1:
        // the discriminant of the contact quadratic is 0.
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(5.0, 1.0), v2(0.0, 40.0)],
            [v2(0.0, 0.0), v2(-1.0, 0.0), v2(0.0, 1.0)],
        )
        .unwrap();
        assert!(matches!(next_collision(&s), Err(Error::Grazing { .. })));
    }

    #[test]
    fn run_separation_with_no_events() {
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(2.0, 0.0), v2(0.0, 3.0)],
            [v2(-1.0, 0.0), v2(1.0, 0.0), v2(0.0, 2.0)],
        )
        .unwrap();
        let out = run(&s, Restitution::new(0.5).unwrap(), &RunLimits::default()).unwrap();
        assert!(out.events.is_empty());
        assert_eq!(out.termination, Termination::Separation);
    }

    #[test]
    fn run_records_strictly_increasing_times() {
        // A chain: particle 1 bounces between 0 and a slower 2 a few times.
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(1.5, 0.0), v2(3.0, 0.0)],
            [v2(0.0, 0.0), v2(1.0, 0.0), v2(-0.5, 0.0)],
        )
        .unwrap();
        let out = run(&s, Restitution::new(0.5).unwrap(), &RunLimits::default()).unwrap();
        assert!(!out.events.is_empty());
        for pair in out.events.windows(2) {
            assert!(pair[1].t > pair[0].t);
            assert!(pair[1].tau > 0.0);
        }
        for ev in &out.events {
            assert!((ev.eta_post + 0.5 * ev.eta_pre).abs() <= 1e-12);
        }
        assert_eq!(out.samples.len(), out.events.len());
    }

    #[test]
    fn max_time_flies_to_the_horizon() {
        let s = head_on_state();
        let limits = RunLimits {
            max_time: 0.25,
            ..RunLimits::default()
        };
        let out = run(&s, Restitution::new(0.5).unwrap(), &limits).unwrap();
        assert_eq!(out.termination, Termination::MaxTime);
        assert_eq!(out.final_state.t, 0.25);
        assert!(out.events.is_empty());
    }

    #[test]
    fn max_collisions_limit_respected() {
        let s = SystemState::new(
            0.0,
            [v2(0.0, 0.0), v2(1.5, 0.0), v2(3.0, 0.0)],
            [v2(0.0, 0.0), v2(1.0, 0.0), v2(-0.5, 0.0)],
        )
        .unwrap();
        let limits = RunLimits {
            max_collisions: 2,
            ..RunLimits::default()
        };
        let out = run(&s, Restitution::new(0.9).unwrap(), &limits).unwrap();
        assert_eq!(out.events.len(), 2);
        assert_eq!(out.termination, Termination::MaxCollisions);
    }
}
