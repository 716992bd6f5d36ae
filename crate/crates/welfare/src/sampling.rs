//! Seeded random samples for the invariance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use welfare_core::lab::{InvarianceKind, InvarianceSample, MIN_INVARIANCE_SAMPLES};
use welfare_core::SwfFamily;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// The invariance each closed-form family is expected to satisfy.
pub fn invariance_kind(family: &SwfFamily) -> Option<InvarianceKind> {
    match family {
        SwfFamily::KolmAtkinson { .. } => Some(InvarianceKind::Scale),
        SwfFamily::KolmPollak { .. } => Some(InvarianceKind::Translation),
        SwfFamily::Cpie { .. } => Some(InvarianceKind::Compound),
        SwfFamily::Tabulated(_) => None,
    }
}

/// `n` samples of `(y₁, y₂, parameter)` inside the family's domain:
/// scale factors in `[0.01, 100]`, shifts in `[0, 50/max(α, 0.01)]` capped at
/// 500, exponents in `[0.3, 3]`.
pub fn invariance_samples(family: &SwfFamily, kind: InvarianceKind, n: usize, seed: u64) -> Vec<InvarianceSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi, plo, phi) = match (kind, family) {
        (InvarianceKind::Scale, _) => (0.1, 1e4, 0.01, 100.0),
        (InvarianceKind::Translation, SwfFamily::KolmPollak { alpha }) => {
            let span = (100.0 / alpha.max(0.01)).min(1000.0);
            (0.0, span, 0.0, span / 2.0)
        }
        (InvarianceKind::Translation, _) => (0.0, 100.0, 0.0, 50.0),
        (InvarianceKind::Compound, _) => {
            let c = family.lower_bound().get();
            (c * 1.01, c * 1e3, 0.3, 3.0)
        }
    };
    (0..n)
        .map(|_| InvarianceSample {
            y1: rng.random_range(lo..hi),
            y2: rng.random_range(lo..hi),
            parameter: rng.random_range(plo..phi),
        })
        .collect()
}

pub fn default_sample_count() -> usize {
    MIN_INVARIANCE_SAMPLES
}
