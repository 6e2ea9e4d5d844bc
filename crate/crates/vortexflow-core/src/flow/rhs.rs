//! Right-hand sides of the two motion laws.

use super::{FlowError, FlowKind, DEFAULT_COLLISION_RADIUS};
use crate::energy::{skew_grad_w, VortexConfiguration};
use crate::geometry::{chordal_distance_chart, ChartPoint, Vec2};
use alloc::vec::Vec;

/// Chart velocities of every vortex under the given dynamics.
///
/// The gradient branch evaluates the planar system
/// `dp_i/dt = ((1+r_i^2)^2/2) (p_i/(1+r_i^2) + d_i sum_{j!=i} d_j (p_i-p_j)/|p_i-p_j|^2)`
/// directly; the Hamiltonian branch evaluates `-(d_i/pi) (grad_g^perp W)|_{b_i}`
/// through the energy module.  The two routes agree with the corresponding
/// energy gradients to roundoff.
///
/// Fails with [`FlowError::NearCollision`] when two vortices are chordally
/// closer than a tenth of the default collision radius.
pub fn flow_rhs(cfg: &VortexConfiguration, kind: FlowKind) -> Result<Vec<Vec2>, FlowError> {
    let guard = DEFAULT_COLLISION_RADIUS / 10.0;
    for i in 0..cfg.vortices.len() {
        for j in 0..i {
            let d = chordal_distance_chart(&cfg.vortices[i].position, &cfg.vortices[j].position);
            if d < guard {
                return Err(FlowError::NearCollision { i: j, j: i, chordal: d });
            }
        }
    }
    match kind {
        FlowKind::Gradient => {
            let positions: Vec<ChartPoint> = cfg.vortices.iter().map(|v| v.position).collect();
            let degrees: Vec<i8> = cfg.vortices.iter().map(|v| v.degree).collect();
            Ok(gradient_velocities(&positions, &degrees))
        }
        FlowKind::Hamiltonian => (0..cfg.vortices.len())
            .map(|i| {
                let skew = skew_grad_w(cfg, i).map_err(FlowError::InvalidConfiguration)?;
                let di = cfg.vortices[i].degree as f64;
                Ok(skew * (-di / core::f64::consts::PI))
            })
            .collect(),
    }
}

/// Gradient-flow velocities over raw position/degree slices (no guard).
pub(super) fn gradient_velocities(positions: &[ChartPoint], degrees: &[i8]) -> Vec<Vec2> {
    let n = positions.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let pi = positions[i];
        let r2 = pi.norm_sq();
        let di = degrees[i] as f64;
        let mut interaction = Vec2::ZERO;
        for (j, pj) in positions.iter().enumerate() {
            if j == i {
                continue;
            }
            let sep = pi.to_vec2() - pj.to_vec2();
            interaction = interaction + sep * ((degrees[j] as f64) / sep.dot(&sep));
        }
        let inner = pi.to_vec2() * (1.0 / (1.0 + r2)) + interaction * di;
        out.push(inner * ((1.0 + r2) * (1.0 + r2) / 2.0));
    }
    out
}

/// Hamiltonian velocities over raw slices (no guard):
/// `v_i = -d_i e^{-2f(p_i)} J [grad f(p_i) - 2 d_i sum_j d_j (p_i-p_j)/|p_i-p_j|^2]`.
pub(super) fn hamiltonian_velocities(positions: &[ChartPoint], degrees: &[i8]) -> Vec<Vec2> {
    let n = positions.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let pi = positions[i];
        let r2 = pi.norm_sq();
        let di = degrees[i] as f64;
        let mut interaction = Vec2::ZERO;
        for (j, pj) in positions.iter().enumerate() {
            if j == i {
                continue;
            }
            let sep = pi.to_vec2() - pj.to_vec2();
            interaction = interaction + sep * ((degrees[j] as f64) / sep.dot(&sep));
        }
        let grad_f = Vec2::new(-2.0 * pi.p1 / (1.0 + r2), -2.0 * pi.p2 / (1.0 + r2));
        let bracket = grad_f - interaction * (2.0 * di);
        let e_m2f = (1.0 + r2) * (1.0 + r2) / 4.0;
        out.push(bracket.perp() * (-di * e_m2f));
    }
    out
}

pub(super) fn velocities(positions: &[ChartPoint], degrees: &[i8], kind: FlowKind) -> Vec<Vec2> {
    match kind {
        FlowKind::Gradient => gradient_velocities(positions, degrees),
        FlowKind::Hamiltonian => hamiltonian_velocities(positions, degrees),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::grad_w;
    use core::f64::consts::PI;

    fn pair(q: f64) -> VortexConfiguration {
        VortexConfiguration::new(
            &[(ChartPoint::new(q, 0.0), 1), (ChartPoint::new(-q, 0.0), -1)],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_pair_is_stationary_for_both_flows() {
        for kind in [FlowKind::Gradient, FlowKind::Hamiltonian] {
            let v = flow_rhs(&pair(1.0), kind).unwrap();
            assert!(v[0].norm() < 1e-14 && v[1].norm() < 1e-14, "{kind:?}");
        }
    }

    #[test]
    fn half_q_pair_velocity() {
        let v = flow_rhs(&pair(0.5), FlowKind::Gradient).unwrap();
        assert!((v[0].x - (-0.46875)).abs() < 1e-14);
        assert!(v[0].y.abs() < 1e-15);
        assert!((v[1].x - 0.46875).abs() < 1e-14);
    }

    #[test]
    fn gradient_rhs_matches_energy_gradient() {
        use crate::testutil::random_configuration;
        use rand_chacha::ChaCha8Rng;
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let cfg = random_configuration(&mut rng, 3, 2.0, 0.05);
            let v = flow_rhs(&cfg, FlowKind::Gradient).unwrap();
            for i in 0..cfg.len() {
                let expect = grad_w(&cfg, i).unwrap() * (-1.0 / PI);
                let err = (v[i] - expect).norm();
                assert!(err < 1e-12 * (1.0 + expect.norm()), "vortex {i}: err {err}");
            }
        }
    }

    #[test]
    fn slice_velocities_match_public_rhs() {
        use crate::testutil::random_configuration;
        use rand_chacha::ChaCha8Rng;
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [FlowKind::Gradient, FlowKind::Hamiltonian] {
            for _ in 0..20 {
                let cfg = random_configuration(&mut rng, 2, 2.0, 0.05);
                let positions: Vec<_> = cfg.vortices.iter().map(|v| v.position).collect();
                let degrees: Vec<_> = cfg.vortices.iter().map(|v| v.degree).collect();
                let a = flow_rhs(&cfg, kind).unwrap();
                let b = velocities(&positions, &degrees, kind);
                for i in 0..a.len() {
                    assert!((a[i] - b[i]).norm() < 1e-13 * (1.0 + a[i].norm()));
                }
            }
        }
    }

    #[test]
    fn near_collision_guard_trips() {
        let cfg = pair(2e-5);
        assert!(matches!(
            flow_rhs(&cfg, FlowKind::Gradient),
            Err(FlowError::NearCollision { .. })
        ));
    }
}
