//! Cap-clustered annihilation scan.
//!
//! Samples `2n` vortices of alternating degree uniformly in the spherical cap
//! `A_s = { x3 <= -sqrt(1 - s^2) }` and integrates the gradient flow with
//! collision continuation.  Under the clustering hypothesis
//! `sqrt(1 - s^2) > (n - 1)/n` every trial must annihilate completely, and no
//! later than `T = ln(1/kappa)` with `kappa = n sqrt(1 - s^2) - (n - 1)`;
//! the scan records each trial's completion time against that bound (plus a
//! slack absorbing the finite collision radius).

use super::{integrate, FlowError, FlowKind, FlowSpec, Termination};
use crate::energy::VortexConfiguration;
use crate::geometry::{chordal_distance, stereo_project, SpherePoint};
use crate::math;
use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Time of final annihilation, if the configuration emptied.
    pub annihilation_time: Option<f64>,
    pub collisions: usize,
    /// `annihilation_time <= bound + slack`.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub n_pairs: usize,
    pub cap_s: f64,
    pub kappa: f64,
    /// `ln(1/kappa)`.
    pub bound_time: f64,
    pub slack: f64,
    pub outcomes: Vec<TrialOutcome>,
    pub fraction_within_bound: f64,
    pub max_annihilation_time: Option<f64>,
}

fn mix_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 of (seed + golden-ratio stride per trial)
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `2n` alternating-degree vortices i.i.d. uniformly in the cap `A_s`,
/// rejection-sampling until all pairwise chordal separations reach `min_sep`.
pub fn sample_cap_configuration(
    rng: &mut ChaCha8Rng,
    n_pairs: usize,
    s: f64,
    min_sep: f64,
) -> VortexConfiguration {
    let x3_max = -math::sqrt(1.0 - s * s);
    loop {
        let mut points: Vec<SpherePoint> = Vec::with_capacity(2 * n_pairs);
        while points.len() < 2 * n_pairs {
            // Uniform area measure: x3 uniform on [-1, x3_max], azimuth uniform.
            let x3 = -1.0 + uniform(rng) * (x3_max + 1.0);
            let phi = uniform(rng) * core::f64::consts::TAU;
            let rho = math::sqrt((1.0 - x3 * x3).max(0.0));
            let cand = SpherePoint::new(rho * math::cos(phi), rho * math::sin(phi), x3);
            if points.iter().all(|p| chordal_distance(p, &cand) >= min_sep) {
                points.push(cand);
            }
        }
        let pairs: Vec<_> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let degree = if i % 2 == 0 { 1i8 } else { -1i8 };
                (stereo_project(p).expect("cap points are chartable"), degree)
            })
            .collect();
        if let Ok(cfg) = VortexConfiguration::new(&pairs, 0.0) {
            return cfg;
        }
    }
}

/// Runs a single scan trial with a deterministic per-trial seed.
pub fn annihilation_trial(
    n_pairs: usize,
    s: f64,
    trial: usize,
    seed: u64,
    spec: &FlowSpec,
    bound_time: f64,
    slack: f64,
) -> Result<TrialOutcome, FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, trial));
    let min_sep = 10.0 * spec.collision_radius;
    let cfg = sample_cap_configuration(&mut rng, n_pairs, s, min_sep);
    let trace = integrate(&cfg, spec)?;
    let annihilation_time = trace.annihilation_time();
    let within_bound = matches!(trace.termination, Termination::AllAnnihilated)
        && annihilation_time.map(|t| t <= bound_time + slack).unwrap_or(false);
    Ok(TrialOutcome {
        trial,
        annihilation_time,
        collisions: trace.collisions.len(),
        within_bound,
    })
}

/// Runs `trials` independent cap trials and reports completion statistics.
///
/// Fails with [`FlowError::CapAssumptionViolated`] unless
/// `sqrt(1 - s^2) > (n - 1)/n`.  Trials are deterministic in `(seed, trial)`
/// and independent of each other, so callers may distribute them freely.
pub fn annihilation_scan(
    n_pairs: usize,
    s: f64,
    trials: usize,
    seed: u64,
    base_spec: &FlowSpec,
) -> Result<ScanReport, FlowError> {
    if n_pairs == 0 {
        return Err(FlowError::InvalidSpec("scan needs at least one vortex pair"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(FlowError::InvalidSpec("cap parameter s must lie in [0, 1)"));
    }
    let root = math::sqrt(1.0 - s * s);
    let n = n_pairs as f64;
    if root <= (n - 1.0) / n {
        return Err(FlowError::CapAssumptionViolated { n: n_pairs, s });
    }
    let kappa = n * root - (n - 1.0);
    let bound_time = math::ln(1.0 / kappa);
    let slack = 10.0 * base_spec.collision_radius;

    let mut spec = *base_spec;
    spec.kind = FlowKind::Gradient;
    // Leave room past the bound so violations are observed, not clipped.
    spec.max_time = bound_time + slack + 1.0;

    let mut outcomes = Vec::with_capacity(trials);
    for trial in 0..trials {
        outcomes.push(annihilation_trial(n_pairs, s, trial, seed, &spec, bound_time, slack)?);
    }
    let within = outcomes.iter().filter(|o| o.within_bound).count();
    let max_annihilation_time = outcomes
        .iter()
        .filter_map(|o| o.annihilation_time)
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
    Ok(ScanReport {
        n_pairs,
        cap_s: s,
        kappa,
        bound_time,
        slack,
        fraction_within_bound: within as f64 / trials.max(1) as f64,
        outcomes,
        max_annihilation_time,
    })
}
