//! Post-processing of collision sequences: collision-order structure,
//! convergence diagnostics, and decay-rate estimation.
//!
//! Three spheres admit only two eventual collision orders on the way to a
//! collapse: a *nearly linear* order alternating the two pairs that share a
//! central particle, and a *triangular* order cycling all three pairs. The
//! tools here recover that structure from recorded events — counting
//! functions and maximal gaps per pair ([`counting_functions`]), suffix
//! pattern classification ([`classify_order`], [`classify_run`]) — and
//! quantify convergence towards a finite-time singularity: square
//! summability of the normal components, summability of the flight times,
//! Cauchy decay of the contact directions, and a geometric-tail estimate of
//! the collapse time τ* ([`convergence_report`]). [`fit_eta_decay_rate`]
//! measures the exponential decay rate of the impact speeds for comparison
//! with the theoretical contraction bound, and [`zk_regime_report`] tracks
//! the regime variables `(ζ, φ₁, φ₂)` along a map iteration.

use crate::core::Pair;
use crate::engine::{CollisionEvent, SimulationOutcome, Termination, TrajectorySample};
use crate::error::{Error, Result};
use crate::map::{MapStep, ScaledRun};
use serde::Serialize;

/// Default number of full periods a cyclic suffix must exhibit before the
/// classifier commits to an order.
pub const DEFAULT_MIN_PERIODS: usize = 10;

fn pair_slot(pair: Pair) -> usize {
    match pair {
        Pair::P01 => 0,
        Pair::P02 => 1,
        Pair::P12 => 2,
    }
}

// ---------------------------------------------------------------------------
// Counting functions and maximal gaps.
// ---------------------------------------------------------------------------

/// Occurrence structure of one pair within an event sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairGaps {
    pub pair: Pair,
    /// 1-based indices of this pair's collisions — the counting function
    /// values φ^{(i,j)}, strictly increasing.
    pub indices: Vec<usize>,
    /// Maximal gap between consecutive collisions of this pair; `None` with
    /// fewer than two occurrences.
    pub max_gap: Option<usize>,
    /// Whether the trailing run without this pair already exceeds every gap
    /// realized so far — a hint (not proof) that the pair has dropped out of
    /// the order and its gap is unbounded.
    pub unbounded_hint: bool,
}

/// Counting functions and maximal gaps for all three pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub total_events: usize,
    pub per_pair: [PairGaps; 3],
}

impl GapReport {
    pub fn for_pair(&self, pair: Pair) -> &PairGaps {
        &self.per_pair[pair_slot(pair)]
    }

    /// Whether the three index lists partition `1..=total_events`.
    pub fn is_partition(&self) -> bool {
        let mut all: Vec<usize> = self
            .per_pair
            .iter()
            .flat_map(|p| p.indices.iter().copied())
            .collect();
        all.sort_unstable();
        all.len() == self.total_events && all.iter().copied().eq(1..=self.total_events)
    }
}

/// Builds the [`GapReport`] of a tag sequence.
///
/// The maximal gap of a pair is the largest difference between consecutive
/// occurrence indices (no boundary terms: runs before the first or after the
/// last occurrence do not count, but the trailing run feeds the
/// `unbounded_hint`).
pub fn counting_functions_from_tags(tags: &[Pair]) -> Result<GapReport> {
    if tags.is_empty() {
        return Err(Error::InvalidArgument(
            "counting functions need at least one event".into(),
        ));
    }
    let n = tags.len();
    let per_pair = Pair::ALL.map(|pair| {
        let indices: Vec<usize> = tags
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == pair)
            .map(|(k, _)| k + 1)
            .collect();
        let max_gap = indices
            .windows(2)
            .map(|w| w[1] - w[0])
            .max();
        let trailing = n - indices.last().copied().unwrap_or(0);
        let unbounded_hint = trailing >= 2 && trailing > max_gap.unwrap_or(0);
        PairGaps {
            pair,
            indices,
            max_gap,
            unbounded_hint,
        }
    });
    Ok(GapReport {
        total_events: n,
        per_pair,
    })
}

/// [`counting_functions_from_tags`] applied to recorded collision events.
pub fn counting_functions(events: &[CollisionEvent]) -> Result<GapReport> {
    let tags: Vec<Pair> = events.iter().map(|e| e.pair).collect();
    counting_functions_from_tags(&tags)
}

// ---------------------------------------------------------------------------
// Collision-order classification.
// ---------------------------------------------------------------------------

/// The eventual collision order of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    /// Two pairs sharing a central particle alternate strictly.
    NearlyLinear,
    /// All three pairs repeat in a fixed 3-periodic order.
    Triangular,
    /// The run ended with the spheres separating: finitely many collisions.
    Finite,
    /// No committed pattern (too short, mixed, or cut off by a degeneracy).
    Undetermined,
}

/// Classification result: the kind plus, for cyclic kinds, where the final
/// periodic suffix begins (0-based, earliest possible) and — for the
/// nearly-linear order — the shared central particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CollisionOrder {
    pub kind: OrderKind,
    pub period_start_index: Option<usize>,
    pub central_particle: Option<usize>,
}

impl CollisionOrder {
    fn undetermined() -> Self {
        CollisionOrder {
            kind: OrderKind::Undetermined,
            period_start_index: None,
            central_particle: None,
        }
    }
}

/// Pattern-only classification of a tag sequence.
///
/// Scans for the longest strictly 2-periodic suffix of two distinct pairs
/// (nearly linear; the central particle is their common member) and, failing
/// that, the longest 3-periodic suffix cycling all three pairs (triangular).
/// A pattern must contain at least `min_periods` full periods to count;
/// anything else is undetermined. The scan looks only at pair tags, so a run
/// truncated by a degeneracy is classified by the order it had established.
pub fn classify_order_tags(tags: &[Pair], min_periods: usize) -> CollisionOrder {
    let min_periods = min_periods.max(1);
    let n = tags.len();

    if n >= 2 {
        // Longest suffix with period 2: smallest s with tags[i] == tags[i+2]
        // for all i ≥ s within range.
        let mut s = n - 2;
        while s > 0 && tags[s - 1] == tags[s + 1] {
            s -= 1;
        }
        let a = tags[s];
        let b = tags[s + 1];
        if a != b && (n - s) >= 2 * min_periods {
            return CollisionOrder {
                kind: OrderKind::NearlyLinear,
                period_start_index: Some(s),
                central_particle: a.common_member(b),
            };
        }
    }

    if n >= 3 {
        let mut s = n - 3;
        while s > 0 && tags[s - 1] == tags[s + 2] {
            s -= 1;
        }
        let window = [tags[s], tags[s + 1], tags[s + 2]];
        let all_distinct =
            window[0] != window[1] && window[1] != window[2] && window[0] != window[2];
        if all_distinct && (n - s) >= 3 * min_periods {
            return CollisionOrder {
                kind: OrderKind::Triangular,
                period_start_index: Some(s),
                central_particle: None,
            };
        }
    }

    CollisionOrder::undetermined()
}

/// [`classify_order_tags`] applied to recorded collision events.
pub fn classify_order(events: &[CollisionEvent], min_periods: usize) -> CollisionOrder {
    let tags: Vec<Pair> = events.iter().map(|e| e.pair).collect();
    classify_order_tags(&tags, min_periods)
}

/// Classifies a finished run.
///
/// A run that ended in separation had finitely many collisions — that *is*
/// its classification. Every other termination (collision budget, collapse
/// detection, gap resolution, degeneracies) defers to the pattern scan; in
/// particular a degenerate ending never forces a cyclic label.
pub fn classify_run(outcome: &SimulationOutcome, min_periods: usize) -> CollisionOrder {
    if matches!(outcome.termination, Termination::Separation) {
        return CollisionOrder {
            kind: OrderKind::Finite,
            period_start_index: None,
            central_particle: None,
        };
    }
    classify_order(&outcome.events, min_periods)
}

// ---------------------------------------------------------------------------
// Convergence diagnostics.
// ---------------------------------------------------------------------------

/// A per-pair numeric series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSeries {
    pub pair: Pair,
    pub values: Vec<f64>,
}

/// Convergence diagnostics of a recorded run.
///
/// `tau_star_estimate` is `+∞` until the trailing flight times form a clean
/// geometric tail (JSON renders that as `null`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Running per-pair sums Σ ηₙ² over that pair's impact speeds.
    pub eta_l2_partial_sums: [PairSeries; 3],
    /// Running sum Σ τₙ of flight times over all events.
    pub tau_partial_sums: Vec<f64>,
    /// Per-pair residuals |ωₙ − ω_last| of the contact directions.
    pub omega_cauchy_residuals: [PairSeries; 3],
    /// Trailing pre-collision gaps of the scheduled pairs.
    pub gap_tail: Vec<f64>,
    /// `t_last + τ_last·ρ/(1−ρ)` with ρ the largest trailing flight-time
    /// ratio, once that window is entirely contractive.
    pub tau_star_estimate: f64,
}

/// Number of trailing gap samples kept in the report.
const GAP_TAIL_LEN: usize = 32;
/// Trailing flight-time ratios inspected for the τ* estimate.
const TAU_WINDOW: usize = 16;
/// Minimum number of contractive trailing ratios before τ* is estimated.
const TAU_MIN_RATIOS: usize = 4;

/// Estimates the total collapse time from the geometric tail of the flight
/// times; `+∞` while no clean contractive window exists.
pub fn tau_star_estimate(events: &[CollisionEvent]) -> f64 {
    let n = events.len();
    if n < TAU_MIN_RATIOS + 1 {
        return f64::INFINITY;
    }
    let start = n.saturating_sub(TAU_WINDOW + 1);
    let mut rho: f64 = 0.0;
    for k in start..n - 1 {
        let (prev, next) = (events[k].tau, events[k + 1].tau);
        if !(prev > 0.0) || !(next > 0.0) {
            return f64::INFINITY;
        }
        let ratio = next / prev;
        if !(ratio < 1.0) {
            return f64::INFINITY;
        }
        rho = rho.max(ratio);
    }
    let last = &events[n - 1];
    last.t + last.tau * rho / (1.0 - rho)
}

/// Builds the [`ConvergenceReport`] of a recorded run.
///
/// `samples` must parallel `events` (the engine produces both in lockstep).
/// Requires at least two events.
pub fn convergence_report(
    events: &[CollisionEvent],
    samples: &[TrajectorySample],
) -> Result<ConvergenceReport> {
    if events.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence report needs at least 2 events, got {}",
            events.len()
        )));
    }
    if events.len() != samples.len() {
        return Err(Error::InvalidArgument(format!(
            "events ({}) and trajectory samples ({}) must be parallel",
            events.len(),
            samples.len()
        )));
    }

    let eta_l2_partial_sums = Pair::ALL.map(|pair| {
        let mut sum = 0.0;
        let values = events
            .iter()
            .filter(|e| e.pair == pair)
            .map(|e| {
                sum += e.eta_pre * e.eta_pre;
                sum
            })
            .collect();
        PairSeries { pair, values }
    });

    let mut tau_sum = 0.0;
    let tau_partial_sums = events
        .iter()
        .map(|e| {
            tau_sum += e.tau;
            tau_sum
        })
        .collect();

    let omega_cauchy_residuals = Pair::ALL.map(|pair| {
        let omegas: Vec<_> = samples
            .iter()
            .filter(|s| s.pair == pair)
            .map(|s| &s.omega)
            .collect();
        let values = match omegas.last() {
            Some(last) => omegas.iter().map(|o| o.distance(last)).collect(),
            None => Vec::new(),
        };
        PairSeries { pair, values }
    });

    let gap_tail = samples
        .iter()
        .skip(samples.len().saturating_sub(GAP_TAIL_LEN))
        .map(|s| s.gap)
        .collect();

    Ok(ConvergenceReport {
        eta_l2_partial_sums,
        tau_partial_sums,
        omega_cauchy_residuals,
        gap_tail,
        tau_star_estimate: tau_star_estimate(events),
    })
}

// ---------------------------------------------------------------------------
// Decay-rate estimation.
// ---------------------------------------------------------------------------

/// Least-squares slope of `values` against their indices.
fn lsq_slope(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let x_mean = (m - 1.0) / 2.0;
    let y_mean = values.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, y) in values.iter().enumerate() {
        let dx = k as f64 - x_mean;
        num += dx * (y - y_mean);
        den += dx * dx;
    }
    num / den
}

/// Fits a per-collision decay rate to pre-supplied values of `ln|η|`.
///
/// Uses the trailing half of the sequence (the asymptotic regime) and
/// returns `exp(slope)` of the least-squares line. Needs at least four
/// finite entries overall.
pub fn fit_decay_rate_from_ln(ln_values: &[f64]) -> Result<f64> {
    if ln_values.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "decay-rate fit needs at least 4 values, got {}",
            ln_values.len()
        )));
    }
    let tail = &ln_values[ln_values.len() / 2..];
    if tail.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "decay-rate fit requires finite ln|eta| values".into(),
        ));
    }
    Ok(lsq_slope(tail).exp())
}

/// Fits the exponential decay rate of the impact speeds `|ηₙ|` of a run.
///
/// The theory bounds this rate by `max((1+r)/2·|cos θ̄|, r)` for a
/// nearly-linear collapse; compare with a small margin for fit noise.
pub fn fit_eta_decay_rate(events: &[CollisionEvent]) -> Result<f64> {
    let ln_values: Vec<f64> = events
        .iter()
        .map(|e| {
            let a = e.eta_pre.abs();
            if a > 0.0 {
                Ok(a.ln())
            } else {
                Err(Error::InvalidArgument(
                    "decay-rate fit requires nonzero impact speeds".into(),
                ))
            }
        })
        .collect::<Result<_>>()?;
    fit_decay_rate_from_ln(&ln_values)
}

// ---------------------------------------------------------------------------
// Zhou–Kadanoff regime variables.
// ---------------------------------------------------------------------------

/// One step's regime variables: the collision parameter `ζ`, the
/// normal-speed ratio `φ₁ = η₁/(−η₂)` and the scaled gap `φ₂ = d/η₂²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZkRegimeRow {
    pub zeta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

/// Regime variables along a trajectory with a monotonicity flag for `ζ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZkRegimeReport {
    pub rows: Vec<ZkRegimeRow>,
    /// Whether `ζ` was nonincreasing across all recorded steps.
    pub zeta_nonincreasing: bool,
}

/// Regime variables of an `f64` map iteration, one row per step (evaluated
/// on each step's input configuration).
pub fn zk_regime_report(steps: &[MapStep]) -> ZkRegimeReport {
    let rows: Vec<ZkRegimeRow> = steps
        .iter()
        .map(|step| {
            let cfg = &step.input;
            let d = cfg.gap;
            let e2 = cfg.eta2;
            ZkRegimeRow {
                zeta: d * (2.0 + d) * cfg.w2.norm_sq() / ((1.0 + d) * (1.0 + d) * e2 * e2),
                phi1: cfg.eta1 / (-e2),
                phi2: d / (e2 * e2),
            }
        })
        .collect();
    let zeta_nonincreasing = rows.windows(2).all(|w| w[1].zeta <= w[0].zeta);
    ZkRegimeReport {
        rows,
        zeta_nonincreasing,
    }
}

/// Regime variables of a scaled (extended-precision) run. Ratios are formed
/// in extended precision before conversion, so rows stay finite arbitrarily
/// deep into a collapse; the monotonicity flag compares the exact values.
pub fn zk_regime_rows_scaled(run: &ScaledRun) -> ZkRegimeReport {
    let rows: Vec<ZkRegimeRow> = run
        .steps
        .iter()
        .enumerate()
        .map(|(k, step)| {
            let input = if k == 0 {
                &run.initial
            } else {
                &run.steps[k - 1].state_after
            };
            ZkRegimeRow {
                zeta: step.zeta.to_f64(),
                phi1: (input.eta_s / -input.eta_c).to_f64(),
                phi2: (input.gap / input.eta_c.square()).to_f64(),
            }
        })
        .collect();
    let zeta_nonincreasing = run
        .steps
        .windows(2)
        .all(|w| w[1].zeta <= w[0].zeta);
    ZkRegimeReport {
        rows,
        zeta_nonincreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{RelativeConfig, Restitution};
    use crate::vec::VecD;

    fn tag(label: &str) -> Pair {
        label.parse().unwrap()
    }

    fn tags(labels: &[&str]) -> Vec<Pair> {
        labels.iter().map(|l| tag(l)).collect()
    }

    fn synthetic_events(tau: &[f64]) -> Vec<CollisionEvent> {
        let mut t = 0.0;
        tau.iter()
            .enumerate()
            .map(|(k, &dt)| {
                t += dt;
                CollisionEvent {
                    index: k + 1,
                    t,
                    pair: if k % 2 == 0 { Pair::P01 } else { Pair::P02 },
                    eta_pre: -1.0,
                    eta_post: 0.5,
                    zeta: 0.1,
                    tau: dt,
                }
            })
            .collect()
    }

    #[test]
    fn worked_twenty_event_sequence() {
        let seq = tags(&[
            "01", "12", "01", "02", "01", "12", "01", "12", "01", "02", "01", "02", "01", "02",
            "01", "02", "01", "02", "01", "02",
        ]);
        let report = counting_functions_from_tags(&seq).unwrap();
        assert_eq!(report.for_pair(Pair::P01).max_gap, Some(2));
        assert_eq!(report.for_pair(Pair::P02).max_gap, Some(6));
        assert_eq!(report.for_pair(Pair::P12).max_gap, Some(4));
        assert_eq!(
            report.for_pair(Pair::P12).indices,
            vec![2, 6, 8],
        );
        assert!(report.is_partition());
        // Pair 12 last appeared 12 events ago, beyond its realized gaps.
        assert!(report.for_pair(Pair::P12).unbounded_hint);
        assert!(!report.for_pair(Pair::P01).unbounded_hint);
        assert!(!report.for_pair(Pair::P02).unbounded_hint);
    }

    #[test]
    fn single_event_report() {
        let report = counting_functions_from_tags(&tags(&["02"])).unwrap();
        let own = report.for_pair(Pair::P02);
        assert_eq!(own.indices, vec![1]);
        assert_eq!(own.max_gap, None);
        assert!(!own.unbounded_hint);
        for pair in [Pair::P01, Pair::P12] {
            assert!(report.for_pair(pair).indices.is_empty());
            assert_eq!(report.for_pair(pair).max_gap, None);
            assert!(!report.for_pair(pair).unbounded_hint);
        }
        assert!(report.is_partition());
        assert!(counting_functions_from_tags(&[]).is_err());
    }

    #[test]
    fn classifies_alternating_pairs_as_nearly_linear() {
        let mut seq = Vec::new();
        for _ in 0..30 {
            seq.push(Pair::P01);
            seq.push(Pair::P02);
        }
        let order = classify_order_tags(&seq, DEFAULT_MIN_PERIODS);
        assert_eq!(order.kind, OrderKind::NearlyLinear);
        assert_eq!(order.central_particle, Some(0));
        assert_eq!(order.period_start_index, Some(0));

        // A noisy prefix moves the period start but keeps the label.
        let mut noisy = tags(&["12", "12"]);
        noisy.extend(seq.iter().copied());
        let order = classify_order_tags(&noisy, DEFAULT_MIN_PERIODS);
        assert_eq!(order.kind, OrderKind::NearlyLinear);
        assert_eq!(order.period_start_index, Some(2));
    }

    #[test]
    fn classifies_three_cycle_as_triangular() {
        let mut seq = Vec::new();
        for _ in 0..30 {
            seq.extend(tags(&["01", "02", "12"]));
        }
        let order = classify_order_tags(&seq, DEFAULT_MIN_PERIODS);
        assert_eq!(order.kind, OrderKind::Triangular);
        assert_eq!(order.period_start_index, Some(0));
        assert_eq!(order.central_particle, None);
    }

    #[test]
    fn short_or_mixed_sequences_stay_undetermined() {
        let order = classify_order_tags(&tags(&["01", "02", "01", "02"]), 10);
        assert_eq!(order.kind, OrderKind::Undetermined);
        let mixed: Vec<Pair> = (0..60)
            .map(|k| match k % 4 {
                0 => Pair::P01,
                1 => Pair::P02,
                2 => Pair::P12,
                _ => Pair::P02,
            })
            .collect();
        assert_eq!(
            classify_order_tags(&mixed, 10).kind,
            OrderKind::Undetermined
        );
        assert_eq!(
            classify_order_tags(&[], 10).kind,
            OrderKind::Undetermined
        );
        // A constant tag is not an alternation.
        assert_eq!(
            classify_order_tags(&vec![Pair::P01; 40], 10).kind,
            OrderKind::Undetermined
        );
    }

    #[test]
    fn relabeling_particles_permutes_the_central_particle() {
        // Swap labels 0 ↔ 2: pair 01 ↦ 12, pair 02 ↦ 02.
        let mut seq = Vec::new();
        for _ in 0..25 {
            seq.push(Pair::P01);
            seq.push(Pair::P02);
        }
        let relabeled: Vec<Pair> = seq
            .iter()
            .map(|p| match p {
                Pair::P01 => Pair::P12,
                Pair::P02 => Pair::P02,
                Pair::P12 => Pair::P01,
            })
            .collect();
        let base = classify_order_tags(&seq, 10);
        let perm = classify_order_tags(&relabeled, 10);
        assert_eq!(base.kind, perm.kind);
        assert_eq!(base.period_start_index, perm.period_start_index);
        assert_eq!(base.central_particle, Some(0));
        assert_eq!(perm.central_particle, Some(2));
    }

    #[test]
    fn convergence_report_on_two_events() {
        let events = synthetic_events(&[0.5, 0.25]);
        let samples: Vec<TrajectorySample> = events
            .iter()
            .map(|e| TrajectorySample {
                pair: e.pair,
                omega: VecD::basis(2, 0).unwrap(),
                gap: 0.1,
            })
            .collect();
        let report = convergence_report(&events, &samples).unwrap();
        assert_eq!(report.eta_l2_partial_sums[0].values, vec![1.0]);
        assert_eq!(report.eta_l2_partial_sums[1].values, vec![1.0]);
        assert!(report.eta_l2_partial_sums[2].values.is_empty());
        assert_eq!(report.tau_partial_sums, vec![0.5, 0.75]);
        assert_eq!(report.gap_tail, vec![0.1, 0.1]);
        assert!(report.tau_star_estimate.is_infinite());
        assert!(convergence_report(&events[..1], &samples[..1]).is_err());
    }

    #[test]
    fn tau_star_tightens_on_a_geometric_tail() {
        // Exactly geometric flight times: the estimate must engage, bound
        // the true limit from above, and be nonincreasing in n.
        let rho = 0.6;
        let tau: Vec<f64> = (0..40).map(|k| rho_pow(rho, k)).collect();
        let events = synthetic_events(&tau);
        let true_limit: f64 = 1.0 / (1.0 - rho);
        let mut prev = f64::INFINITY;
        for n in (TAU_MIN_RATIOS + 1)..=events.len() {
            let est = tau_star_estimate(&events[..n]);
            assert!(est.is_finite());
            assert!(est >= true_limit - 1e-12, "estimate undershoots: {est}");
            assert!(est <= prev + 1e-12, "estimate increased at n = {n}");
            prev = est;
        }
        assert!((prev - true_limit).abs() < 1e-9);

        // A growing tail never engages the estimate.
        let growing = synthetic_events(&[1.0, 1.1, 1.2, 1.3, 1.4, 1.5]);
        assert!(tau_star_estimate(&growing).is_infinite());
    }

    fn rho_pow(rho: f64, k: usize) -> f64 {
        rho.powi(k as i32)
    }

    #[test]
    fn decay_rate_fit_recovers_exact_geometric_decay() {
        let rate = 0.35;
        let mut events = synthetic_events(&vec![0.1; 24]);
        for (k, e) in events.iter_mut().enumerate() {
            e.eta_pre = -rho_pow(rate, k);
        }
        let fitted = fit_eta_decay_rate(&events).unwrap();
        assert!((fitted - rate).abs() < 1e-12, "fitted = {fitted}");

        let ln_values: Vec<f64> = (0..24).map(|k| (k as f64) * rate.ln()).collect();
        let from_ln = fit_decay_rate_from_ln(&ln_values).unwrap();
        assert!((from_ln - rate).abs() < 1e-12);
        assert!(fit_decay_rate_from_ln(&ln_values[..3]).is_err());
    }

    #[test]
    fn zk_rows_vanish_in_the_contact_limit() {
        let omega1 = VecD::new(vec![1.0, 0.0]).unwrap();
        let omega2 = VecD::new(vec![0.0, 1.0]).unwrap();
        let cfg = RelativeConfig {
            omega1: omega1.clone(),
            omega2: omega2.clone(),
            w1: omega1.scale(0.3),
            w2: omega2.scale(-0.8),
            eta1: 0.3,
            eta2: -0.8,
            gap: 0.0,
        };
        let step = crate::map::apply_map(&cfg, Restitution::new(0.5).unwrap()).unwrap();
        assert_eq!(step.tau, 0.0);
        let report = zk_regime_report(&[step]);
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].zeta, 0.0);
        assert_eq!(report.rows[0].phi2, 0.0);
        assert!((report.rows[0].phi1 - 0.375).abs() < 1e-15);
        assert!(report.zeta_nonincreasing);
    }
}
