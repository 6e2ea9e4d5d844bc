//! Per-trace conservation / dissipation residuals.
//!
//! Between collisions the gradient flow satisfies
//!
//! * `V_0(t) = e^{t - t_0} V_0(t_0)` where `V_0` is the sum of sphere
//!   positions,
//! * the direction `V_0 / |V_0|` is constant when `V_0(t_0) != 0`,
//! * `d/dt sum_{i>j} |P_i - P_j|^2 = -2 |V_0(t)|^2`,
//! * `W` is non-increasing;
//!
//! and the Hamiltonian flow conserves `W`.  The exponential-growth residuals
//! are measured for both flows but are only meaningful assertions for the
//! gradient flow.

use super::{TrajectoryTrace, TraceSample};
use crate::math;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsReport {
    pub segments: usize,
    /// `max_t |V_0(t) - e^{t-t0} V_0(t0)|` over all segments.
    pub max_v0_residual: f64,
    /// Same residual scaled by `|V_0(t0)| e^{t-t0}` (skipped when `V_0(t0)`
    /// vanishes).
    pub max_v0_residual_scaled: f64,
    /// `max_t |V_0(t)/|V_0(t)| - V_0(t0)/|V_0(t0)||` (skipped near zero).
    pub max_direction_drift: f64,
    /// Centered-difference residual of
    /// `d/dt pair_sum + 2 |V_0(t)|^2` within segments.
    pub max_pair_decay_residual: f64,
    /// Largest increase of `W` between consecutive samples of a segment.
    pub max_w_increase: f64,
    /// Largest `|W(t) - W(t0)|` within a segment.
    pub max_w_drift: f64,
}

fn norm3(v: &[f64; 3]) -> f64 {
    math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

/// Computes the residual report for a trajectory trace.
pub fn diagnostics(trace: &TrajectoryTrace) -> DiagnosticsReport {
    let mut report = DiagnosticsReport::default();
    if trace.samples.is_empty() {
        return report;
    }
    let last_segment = trace.samples.last().map(|s| s.segment).unwrap_or(0);
    report.segments = last_segment as usize + 1;

    let mut segment_samples: Vec<&TraceSample> = Vec::new();
    for seg in 0..=last_segment {
        segment_samples.clear();
        segment_samples.extend(trace.samples.iter().filter(|s| s.segment == seg));
        if segment_samples.len() < 2 {
            continue;
        }
        let s0 = segment_samples[0];
        let v0_ref = s0.v0;
        let v0_ref_norm = norm3(&v0_ref);

        for s in &segment_samples[1..] {
            let growth = math::exp(s.t - s0.t);
            let diff = [
                s.v0[0] - v0_ref[0] * growth,
                s.v0[1] - v0_ref[1] * growth,
                s.v0[2] - v0_ref[2] * growth,
            ];
            let r = norm3(&diff);
            report.max_v0_residual = report.max_v0_residual.max(r);
            if v0_ref_norm > 1e-12 {
                report.max_v0_residual_scaled =
                    report.max_v0_residual_scaled.max(r / (v0_ref_norm * growth));
                let n = norm3(&s.v0);
                if n > 1e-12 {
                    let drift = norm3(&[
                        s.v0[0] / n - v0_ref[0] / v0_ref_norm,
                        s.v0[1] / n - v0_ref[1] / v0_ref_norm,
                        s.v0[2] / n - v0_ref[2] / v0_ref_norm,
                    ]);
                    report.max_direction_drift = report.max_direction_drift.max(drift);
                }
            }
        }

        for w in segment_samples.windows(2) {
            report.max_w_increase = report.max_w_increase.max(w[1].w - w[0].w);
        }
        for s in &segment_samples[1..] {
            report.max_w_drift = report.max_w_drift.max(math::abs(s.w - s0.w));
        }

        for w in segment_samples.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let d1 = b.t - a.t;
            let d2 = c.t - b.t;
            // Centered differences need the uniform stride grid; the extra
            // samples at segment boundaries produce lopsided windows whose
            // difference quotients amplify interpolation noise, so skip them.
            if d1 <= 0.0 || d2 <= 0.0 || math::abs(d1 - d2) > 1e-6 * d1.max(d2) {
                continue;
            }
            let slope = (c.pair_sum - a.pair_sum) / (d1 + d2);
            let v0_norm_sq = b.v0[0] * b.v0[0] + b.v0[1] * b.v0[1] + b.v0[2] * b.v0[2];
            let r = math::abs(slope + 2.0 * v0_norm_sq);
            report.max_pair_decay_residual = report.max_pair_decay_residual.max(r);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate, FlowSpec};
    use crate::energy::VortexConfiguration;
    use crate::geometry::ChartPoint;

    #[test]
    fn stationary_pair_has_zero_residuals() {
        let cfg = VortexConfiguration::new(
            &[(ChartPoint::new(1.0, 0.0), 1), (ChartPoint::new(-1.0, 0.0), -1)],
            0.0,
        )
        .unwrap();
        let mut spec = FlowSpec::gradient(1.0);
        spec.output_stride = 0.05;
        let trace = integrate(&cfg, &spec).unwrap();
        let report = diagnostics(&trace);
        // V0 = 0 throughout: absolute residual stays at roundoff, scaled
        // residuals are skipped.
        assert!(report.max_v0_residual < 1e-9, "{report:?}");
        assert!(report.max_v0_residual_scaled == 0.0);
        assert!(report.max_w_increase < 1e-10);
        assert!(report.max_pair_decay_residual < 1e-7);
    }

    #[test]
    fn generic_gradient_run_satisfies_exponential_law() {
        let cfg = VortexConfiguration::new(
            &[
                (ChartPoint::new(0.35, 0.2), 1),
                (ChartPoint::new(-0.3, 0.25), -1),
                (ChartPoint::new(0.15, -0.45), 1),
                (ChartPoint::new(-0.2, -0.5), -1),
            ],
            0.0,
        )
        .unwrap();
        let mut spec = FlowSpec::gradient(0.3);
        spec.output_stride = 1e-4;
        spec.rk_rel_tol = 1e-12;
        spec.rk_abs_tol = 1e-13;
        let trace = integrate(&cfg, &spec).unwrap();
        let report = diagnostics(&trace);
        assert!(report.max_v0_residual_scaled < 1e-6, "{report:?}");
        assert!(report.max_direction_drift < 1e-8, "{report:?}");
        assert!(report.max_pair_decay_residual < 1e-5, "{report:?}");
        assert!(report.max_w_increase <= 1e-9, "{report:?}");
    }

    #[test]
    fn hamiltonian_run_conserves_w() {
        let cfg = VortexConfiguration::new(
            &[
                (ChartPoint::new(0.5, 0.1), 1),
                (ChartPoint::new(-0.45, 0.2), -1),
                (ChartPoint::new(0.2, -0.6), -1),
                (ChartPoint::new(-0.15, 0.7), 1),
            ],
            0.0,
        )
        .unwrap();
        let mut spec = FlowSpec::hamiltonian(1.0);
        spec.output_stride = 0.01;
        let trace = integrate(&cfg, &spec).unwrap();
        let report = diagnostics(&trace);
        let w0 = trace.samples[0].w;
        let scale = w0.abs().max(core::f64::consts::PI);
        assert!(report.max_w_drift <= 1e-6 * scale, "{report:?}");
    }
}
