//! Trajectory integration with collision continuation.

use super::dopri::{DenseSegment, Dopri5, StepOutcome};
use super::rhs::velocities;
use super::{
    degree_mix_admissible, resolve_collision, CollisionAction, CollisionEvent, FlowError,
    FlowKind, FlowSpec, Termination, TraceSample, TrajectoryTrace,
};
use crate::energy::{renormalized_energy_chart, Vortex, VortexConfiguration};
use crate::geometry::{chordal_distance_chart, stereo_project, ChartPoint};
use alloc::vec;
use alloc::vec::Vec;

/// Bisection width (in time) to which collision and escape events are
/// refined on the dense-output interpolant.
const EVENT_TIME_TOL: f64 = 1e-10;

struct SegmentState {
    /// Chart coordinates, flattened `(p1, p2)` per vortex.
    y: Vec<f64>,
    ids: Vec<u32>,
    degrees: Vec<i8>,
    t: f64,
}

impl SegmentState {
    fn from_configuration(cfg: &VortexConfiguration) -> Self {
        let mut y = Vec::with_capacity(2 * cfg.len());
        let mut ids = Vec::with_capacity(cfg.len());
        let mut degrees = Vec::with_capacity(cfg.len());
        for v in &cfg.vortices {
            y.push(v.position.p1);
            y.push(v.position.p2);
            ids.push(v.id);
            degrees.push(v.degree);
        }
        SegmentState { y, ids, degrees, t: cfg.time }
    }

    fn positions_of(y: &[f64]) -> Vec<ChartPoint> {
        y.chunks_exact(2).map(|c| ChartPoint::new(c[0], c[1])).collect()
    }

    fn configuration_at(&self, y: &[f64], t: f64) -> VortexConfiguration {
        let vortices = y
            .chunks_exact(2)
            .zip(self.ids.iter().zip(self.degrees.iter()))
            .map(|(c, (&id, &degree))| Vortex {
                id,
                position: ChartPoint::new(c[0], c[1]),
                degree,
            })
            .collect();
        VortexConfiguration { vortices, time: t }
    }
}

fn min_pair_chordal(y: &[f64]) -> f64 {
    let pts = SegmentState::positions_of(y);
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            best = best.min(chordal_distance_chart(&pts[i], &pts[j]));
        }
    }
    best
}

fn min_pair_chart(y: &[f64]) -> f64 {
    let pts = SegmentState::positions_of(y);
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            best = best.min(pts[i].distance(&pts[j]));
        }
    }
    best
}

fn max_chart_radius_sq(y: &[f64]) -> f64 {
    y.chunks_exact(2)
        .map(|c| c[0] * c[0] + c[1] * c[1])
        .fold(0.0, f64::max)
}

fn sample_from(cfg: VortexConfiguration, segment: u32, t: f64) -> TraceSample {
    let w = if cfg.is_empty() {
        0.0
    } else {
        // Positions are kept at least delta_c apart within a segment, so the
        // energy is always evaluable here.
        renormalized_energy_chart(&cfg).unwrap_or(f64::NAN)
    };
    let v0 = cfg.sphere_position_sum();
    let pair_sum = cfg.pair_distance_sq_sum();
    TraceSample { segment, t, configuration: cfg, w, v0, pair_sum }
}

/// Locates the earliest zero of `event` (negative-going) in `(t0, t1]` by
/// bisection on the dense interpolant, assuming `event(t0) > 0 >= event(t1)`.
fn bisect_event<F>(seg: &DenseSegment<'_>, event: F, dim: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut lo = seg.t0;
    let mut hi = seg.t1;
    let mut buf = vec![0.0; dim];
    while hi - lo > EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        seg.eval(mid, &mut buf);
        if event(&buf) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Partitions vortex indices into clusters by transitive closure of
/// "pairwise chordal distance < delta_c".  Returned clusters have size >= 2.
fn collision_clusters(positions: &[ChartPoint], delta_c: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in 0..i {
            // A hair of slack so the pair that triggered detection (sitting
            // essentially at the threshold) is always included.
            if chordal_distance_chart(&positions[i], &positions[j]) < delta_c * (1.0 + 1e-9) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        clusters[r].push(i);
    }
    clusters.retain(|c| c.len() >= 2);
    clusters
}

/// Applies the continuation rule to every collision cluster in `cfg`,
/// recording events.  Repeats until no pair is within `delta_c` (a merged
/// vortex may itself sit close to a survivor).  Returns the reduced
/// configuration.
fn resolve_all_collisions(
    mut cfg: VortexConfiguration,
    delta_c: f64,
    next_id: &mut u32,
    events: &mut Vec<CollisionEvent>,
) -> Result<VortexConfiguration, FlowError> {
    loop {
        let positions: Vec<ChartPoint> = cfg.vortices.iter().map(|v| v.position).collect();
        let clusters = collision_clusters(&positions, delta_c);
        if clusters.is_empty() {
            return Ok(cfg);
        }
        let mut remove = vec![false; cfg.len()];
        let mut additions: Vec<Vortex> = Vec::new();
        for cluster in &clusters {
            let members: Vec<(ChartPoint, i8)> = cluster
                .iter()
                .map(|&i| (cfg.vortices[i].position, cfg.vortices[i].degree))
                .collect();
            let k_plus = members.iter().filter(|&&(_, d)| d > 0).count();
            let k_minus = members.len() - k_plus;
            let net: i32 = members.iter().map(|&(_, d)| d as i32).sum();
            let resolution = resolve_collision(&members).map_err(|e| match e {
                FlowError::DegreeAssumptionViolated { net_degree, .. } => {
                    FlowError::DegreeAssumptionViolated { time: cfg.time, net_degree }
                }
                other => other,
            })?;
            debug_assert!(degree_mix_admissible(k_minus, k_plus));
            let location = match &resolution {
                Some((loc, _)) => *loc,
                None => {
                    // Annihilation: report the cluster centroid as the site.
                    let mut c = [0.0f64; 3];
                    for &(p, _) in &members {
                        let s = crate::geometry::stereo_unproject(&p);
                        c[0] += s.x1;
                        c[1] += s.x2;
                        c[2] += s.x3;
                    }
                    crate::geometry::SpherePoint::new(c[0], c[1], c[2])
                }
            };
            events.push(CollisionEvent {
                time: cfg.time,
                location,
                participants: cluster.iter().map(|&i| cfg.vortices[i].id).collect(),
                net_degree: net,
                action: if net == 0 { CollisionAction::Annihilate } else { CollisionAction::Merge },
            });
            for &i in cluster {
                remove[i] = true;
            }
            if let Some((loc, degree)) = resolution {
                let position = stereo_project(&loc).expect("merge location cannot be the north pole");
                additions.push(Vortex { id: *next_id, position, degree });
                *next_id += 1;
            }
        }
        let mut vortices: Vec<Vortex> = cfg
            .vortices
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !remove[*i])
            .map(|(_, v)| v)
            .collect();
        vortices.extend(additions);
        cfg = VortexConfiguration { vortices, time: cfg.time };
    }
}

/// Integrates a point-vortex configuration under the given flow.
///
/// The trace records samples on the stride grid plus one sample at every
/// segment boundary (initial state, the states immediately before and after
/// each collision, and the final state).
pub fn integrate(cfg0: &VortexConfiguration, spec: &FlowSpec) -> Result<TrajectoryTrace, FlowError> {
    spec.validate()?;
    cfg0.validate().map_err(FlowError::InvalidConfiguration)?;
    for v in &cfg0.vortices {
        if !v.position.p1.is_finite() || !v.position.p2.is_finite() {
            return Err(FlowError::InvalidSpec("non-finite initial position"));
        }
    }

    let t_start = cfg0.time;
    let t_end = t_start + spec.max_time;
    let kind = spec.kind;
    let delta_c = spec.collision_radius;
    let continue_through_collisions =
        kind == FlowKind::Gradient || spec.hamiltonian_continuation;

    let mut next_id = cfg0.vortices.iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut collisions: Vec<CollisionEvent> = Vec::new();
    let mut samples: Vec<TraceSample> = Vec::new();
    let mut segment: u32 = 0;

    // Stride grid anchored at the start time.
    let mut next_stride_idx: u64 = 1;
    let stride_time = |idx: u64| t_start + spec.output_stride * idx as f64;

    // Resolve any collision state present in the initial data.
    let mut cfg = cfg0.clone();
    if cfg.len() >= 2 && cfg.min_pair_chordal_distance() < delta_c {
        samples.push(sample_from(cfg.clone(), segment, t_start));
        if !continue_through_collisions {
            return Ok(TrajectoryTrace {
                kind,
                samples,
                collisions,
                termination: Termination::HaltedAtCollision,
            });
        }
        cfg = resolve_all_collisions(cfg, delta_c, &mut next_id, &mut collisions)?;
        segment += 1;
    }
    samples.push(sample_from(cfg.clone(), segment, t_start));

    'segments: loop {
        if cfg.is_empty() {
            return Ok(TrajectoryTrace {
                kind,
                samples,
                collisions,
                termination: Termination::AllAnnihilated,
            });
        }
        if cfg.time >= t_end {
            return Ok(TrajectoryTrace {
                kind,
                samples,
                collisions,
                termination: Termination::ReachedMaxTime,
            });
        }

        let state = SegmentState::from_configuration(&cfg);
        let degrees = state.degrees.clone();
        let rhs = |y: &[f64], out: &mut [f64]| -> bool {
            let positions = SegmentState::positions_of(y);
            for i in 0..positions.len() {
                for j in 0..i {
                    if positions[i].distance(&positions[j]) < 1e-13 {
                        return false;
                    }
                }
            }
            let v = velocities(&positions, &degrees, kind);
            for (i, vel) in v.iter().enumerate() {
                out[2 * i] = vel.x;
                out[2 * i + 1] = vel.y;
            }
            true
        };

        let dim = state.y.len();
        let mut solver = Dopri5::new(spec.rk_rel_tol, spec.rk_abs_tol, dim);
        let mut t = state.t;
        let mut y = state.y.clone();
        let mut f = vec![0.0; dim];
        if !rhs(&y, &mut f) {
            return Err(FlowError::NearCollision { i: 0, j: 0, chordal: 0.0 });
        }
        let mut h = spec.max_step.min(1e-3);

        loop {
            // Cap the step near close approaches so a singular passage cannot
            // be jumped over in a single step.
            let mut h_cap = spec.max_step;
            let d_chart = min_pair_chart(&y);
            if d_chart < 0.05 {
                h_cap = h_cap.min((0.05 * d_chart * d_chart).max(1e-13));
            }
            h = h.min(h_cap).min(t_end - t).max(1e-14);

            let outcome = solver.step(&y, &f, h, rhs);
            let (y_new, f_new, h_next, dense) = match outcome {
                StepOutcome::Accepted { y_new, f_new, h_next, dense } => {
                    (y_new, f_new, h_next, dense)
                }
                StepOutcome::Rejected { h_retry } => {
                    if h_retry < 1e-15 {
                        return Err(FlowError::InvalidSpec(
                            "step size underflow; configuration not integrable",
                        ));
                    }
                    h = h_retry;
                    continue;
                }
            };
            let t_new = t + h;
            let seg = DenseSegment { t0: t, t1: t_new, y0: &y, dense: &dense };

            // Pole escape: max chart radius crossing the cutoff.
            let pole_r_sq = spec.pole_escape_radius * spec.pole_escape_radius;
            let r_max_sq = max_chart_radius_sq(&y_new);
            let escape = r_max_sq > pole_r_sq;
            // Collision: min pairwise chordal distance crossing delta_c.
            let collided = state.ids.len() >= 2 && min_pair_chordal(&y_new) < delta_c;

            let mut event_time = f64::INFINITY;
            let mut event_is_escape = false;
            if collided {
                event_time = bisect_event(&seg, |b| min_pair_chordal(b) - delta_c, dim);
            }
            if escape {
                let te = bisect_event(&seg, |b| pole_r_sq - max_chart_radius_sq(b), dim);
                if te < event_time {
                    event_time = te;
                    event_is_escape = true;
                }
            }

            let t_stop = event_time.min(t_new);
            let boundary_sample_coming = event_time.is_finite() || t_new >= t_end - 1e-14;

            // Emit stride samples inside (t, t_stop].
            let mut buf = vec![0.0; dim];
            if spec.output_stride > 0.0 {
                while stride_time(next_stride_idx) <= t_stop + 1e-15 {
                    let ts = stride_time(next_stride_idx);
                    next_stride_idx += 1;
                    if ts <= t + 1e-15 {
                        continue;
                    }
                    if boundary_sample_coming && (ts - t_stop).abs() < 1e-12 {
                        break; // the boundary sample below covers it
                    }
                    seg.eval(ts, &mut buf);
                    samples.push(sample_from(state.configuration_at(&buf, ts), segment, ts));
                }
            }

            if event_time.is_finite() {
                seg.eval(event_time, &mut buf);
                let cfg_at_event = state.configuration_at(&buf, event_time);

                if event_is_escape {
                    let escaper = cfg_at_event
                        .vortices
                        .iter()
                        .max_by(|a, b| {
                            a.position.norm_sq().partial_cmp(&b.position.norm_sq()).unwrap()
                        })
                        .map(|v| v.id)
                        .unwrap_or(0);
                    samples.push(sample_from(cfg_at_event, segment, event_time));
                    return Ok(TrajectoryTrace {
                        kind,
                        samples,
                        collisions,
                        termination: Termination::PoleEscape { vortex_id: escaper, time: event_time },
                    });
                }

                // End-of-segment sample with the pre-collision state.
                samples.push(sample_from(cfg_at_event.clone(), segment, event_time));
                if !continue_through_collisions {
                    return Ok(TrajectoryTrace {
                        kind,
                        samples,
                        collisions,
                        termination: Termination::HaltedAtCollision,
                    });
                }
                let reduced =
                    resolve_all_collisions(cfg_at_event, delta_c, &mut next_id, &mut collisions)?;
                segment += 1;
                samples.push(sample_from(reduced.clone(), segment, event_time));
                cfg = reduced;
                continue 'segments;
            }

            t = t_new;
            y = y_new;
            f = f_new;
            h = h_next;

            if t >= t_end - 1e-14 {
                samples.push(sample_from(state.configuration_at(&y, t), segment, t));
                return Ok(TrajectoryTrace {
                    kind,
                    samples,
                    collisions,
                    termination: Termination::ReachedMaxTime,
                });
            }
        }
    }
}
