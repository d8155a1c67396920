//! Seeded random Morse data for property suites and the `sample` command.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::level::Level;
use crate::model::{CobordismFlags, CriticalPoint, MorseDatum, PointKind, Trajectory};
use crate::table::admissible;

/// A valid datum with open flags, up to `max_points` points with distinct
/// four-digit values, and trajectories drawn only among admissible pairs.
pub fn random_datum(rng: &mut impl Rng, n: u32, max_points: usize) -> MorseDatum {
    let count = rng.gen_range(0..=max_points);
    let mut values = BTreeSet::new();
    while values.len() < count {
        values.insert(rng.gen_range(1..10_000i64));
    }
    let mut values: Vec<i64> = values.into_iter().collect();
    values.shuffle(rng);
    let points: Vec<CriticalPoint> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let kind = PointKind::ALL[rng.gen_range(0..3)];
            let range = kind.index_range(n);
            let index = rng.gen_range(*range.start()..=*range.end());
            CriticalPoint::new(format!("p{i}"), kind, index, Level::from_ratio(v, 10_000))
        })
        .collect();
    let mut trajectories = Vec::new();
    for a in &points {
        for b in &points {
            if a.value < b.value
                && admissible((b.kind, b.index), (a.kind, a.index), n).unwrap_or(false)
                && rng.gen_bool(0.3)
            {
                trajectories.push(Trajectory {
                    from: a.id.clone(),
                    to: b.id.clone(),
                    multiplicity: rng.gen_range(1..=2),
                });
            }
        }
    }
    MorseDatum::new(CobordismFlags::open(n), points, trajectories)
}

/// `count` data with `n` drawn from `dims`, each generated from its own
/// stream derived from `seed`.
pub fn random_suite(
    seed: u64,
    count: usize,
    dims: std::ops::RangeInclusive<u32>,
    max_points: usize,
) -> Vec<MorseDatum> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let n = rng.gen_range(dims.clone());
            random_datum(&mut rng, n, max_points)
        })
        .collect()
}
