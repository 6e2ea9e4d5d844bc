//! Shared helpers for unit tests.

use crate::energy::VortexConfiguration;
use crate::geometry::ChartPoint;
use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random valid configuration of `2 * n_pairs` vortices in the chart disk of
/// radius `r_max`, alternating degrees, pairwise chart separation >= `min_sep`.
pub fn random_configuration(
    rng: &mut ChaCha8Rng,
    n_pairs: usize,
    r_max: f64,
    min_sep: f64,
) -> VortexConfiguration {
    let mut pairs: Vec<(ChartPoint, i8)> = Vec::new();
    while pairs.len() < 2 * n_pairs {
        let x = (2.0 * uniform(rng) - 1.0) * r_max;
        let y = (2.0 * uniform(rng) - 1.0) * r_max;
        let cand = ChartPoint::new(x, y);
        if pairs.iter().all(|(p, _)| p.distance(&cand) >= min_sep) {
            let degree = if pairs.len() % 2 == 0 { 1 } else { -1 };
            pairs.push((cand, degree));
        }
    }
    VortexConfiguration::new(&pairs, 0.0).unwrap()
}
