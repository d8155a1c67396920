use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use halfhandle::homology::{generator_counts, relative_euler_characteristic};
use halfhandle::model::{lift_boundary_datum, validate, BoundarySign};
use halfhandle::moves::random::random_datum;
use halfhandle::moves::{normal_form, FlagAuthority};
use halfhandle::oracle::{BuildMove, CobordismBuild, OneManifoldState, Shape, Site};
use halfhandle::{CobordismFlags, Level, MorseDatum};

fn datum(seed: u64, n: u32, max_points: usize) -> MorseDatum {
    random_datum(&mut ChaCha8Rng::seed_from_u64(seed), n, max_points)
}

/// `Σ₀` with every mark named `m{i}`, plus the bands pairing marks in the
/// order given by `pairing`. Marks past the last band stay as passengers.
fn band_build(shapes: &[(bool, usize)], pairing: &[usize], bands: usize) -> CobordismBuild {
    let mut next = 0;
    let sigma0 = shapes
        .iter()
        .map(|&(circle, count)| {
            let marks = (next..next + count).map(|i| format!("m{i}")).collect();
            next += count;
            (if circle { Shape::Circle } else { Shape::Interval }, marks)
        })
        .collect();
    let moves = (0..bands)
        .map(|b| BuildMove {
            level: Level::from_ratio(b as i64 + 1, bands as i64 + 1),
            site: Site::Band {
                feet: [format!("m{}", pairing[2 * b]), format!("m{}", pairing[2 * b + 1])],
                twisted: false,
            },
        })
        .collect();
    CobordismBuild::new(OneManifoldState::new(sigma0).unwrap(), moves).unwrap()
}

fn shapes_and_pairing() -> impl Strategy<Value = (Vec<(bool, usize)>, Vec<usize>, usize)> {
    prop::collection::vec((any::<bool>(), 1usize..5), 1..5).prop_flat_map(|shapes| {
        let total: usize = shapes.iter().map(|s| s.1).sum();
        let pairing = Just((0..total).collect::<Vec<_>>()).prop_shuffle();
        (Just(shapes), pairing, 0..=total / 2)
    })
}

fn final_shapes(b: &CobordismBuild) -> Vec<(Shape, Vec<String>)> {
    let mut v: Vec<_> = b
        .states()
        .last()
        .unwrap()
        .components
        .iter()
        .map(|c| {
            let mut m = c.marks.clone();
            m.sort();
            (c.shape, m)
        })
        .collect();
    v.sort_by(|a, b| (a.0 == Shape::Circle, &a.1).cmp(&(b.0 == Shape::Circle, &b.1)));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_keeps_relative_chi(seed in any::<u64>(), n in 1u32..=4) {
        let d = datum(seed, n, 10);
        let nf = normal_form(&d, &FlagAuthority).unwrap();
        let chi = relative_euler_characteristic(&d);
        prop_assert_eq!(relative_euler_characteristic(&nf.datum), chi);
        for e in &nf.trace.entries {
            prop_assert_eq!(e.chi_before, chi);
            prop_assert_eq!(e.chi_after, chi);
        }
    }

    #[test]
    fn normal_form_is_valid_and_verified(seed in any::<u64>(), n in 1u32..=4) {
        let nf = normal_form(&datum(seed, n, 10), &FlagAuthority).unwrap();
        prop_assert!(validate(&nf.datum).is_empty());
        prop_assert!(nf.decomposition.verify(&nf.datum).is_ok());
    }

    #[test]
    fn normal_form_is_idempotent(seed in any::<u64>(), n in 1u32..=4) {
        let once = normal_form(&datum(seed, n, 10), &FlagAuthority).unwrap();
        let twice = normal_form(&once.datum, &FlagAuthority).unwrap();
        prop_assert_eq!(twice.datum, once.datum);
    }

    #[test]
    fn lifted_boundary_data_are_valid(
        n in 1u32..=4,
        raw in prop::collection::btree_map(1i64..1000, 0u32..=4, 0..8),
        stable in any::<bool>(),
    ) {
        let pts: Vec<(u32, Level)> = raw.into_iter().map(|(v, k)| (k.min(n), Level::from_ratio(v, 1000))).collect();
        let sign = if stable { BoundarySign::AllStable } else { BoundarySign::AllUnstable };
        let d = lift_boundary_datum(&pts, sign, CobordismFlags::open(n)).unwrap();
        prop_assert!(validate(&d).is_empty());
        prop_assert_eq!(d.points.len(), pts.len());
    }

    #[test]
    fn datum_json_round_trips(seed in any::<u64>(), n in 1u32..=4) {
        let d = datum(seed, n, 12);
        let back = MorseDatum::from_json(&d.to_json()).unwrap();
        prop_assert_eq!(back.digest(), d.digest());
        prop_assert_eq!(back, d);
    }

    #[test]
    fn generator_counts_sum_to_relative_chi(seed in any::<u64>(), n in 1u32..=5) {
        let d = datum(seed, n, 12);
        prop_assert_eq!(generator_counts(&d).alternating_sum(), relative_euler_characteristic(&d));
    }

    #[test]
    fn band_steps_change_components_by_at_most_one((shapes, pairing, bands) in shapes_and_pairing()) {
        let b = band_build(&shapes, &pairing, bands);
        for (i, s) in b.steps().iter().enumerate() {
            let delta = s.effect.outputs.len() as i64 - s.effect.inputs.len() as i64;
            prop_assert!((-1..=1).contains(&delta));
            prop_assert_eq!(b.states()[i + 1].chi(), b.states()[i].chi());
            prop_assert_eq!(b.states()[i + 1].boundary_points(), b.states()[i].boundary_points());
        }
        prop_assert_eq!(b.chi_omega(), b.sigma0().chi() - bands as i64);
    }

    #[test]
    fn replay_is_deterministic((shapes, pairing, bands) in shapes_and_pairing()) {
        let a = band_build(&shapes, &pairing, bands);
        let b = CobordismBuild::from_json(&a.to_json()).unwrap();
        prop_assert!(a.verify_replay());
        prop_assert_eq!(a.states(), b.states());
        prop_assert_eq!(a.steps(), b.steps());
    }

    #[test]
    fn final_level_ignores_band_order((shapes, pairing, bands) in shapes_and_pairing()) {
        let forward = band_build(&shapes, &pairing, bands);
        let mut swapped = pairing.clone();
        for b in 0..bands / 2 {
            let (x, y) = (b, bands - 1 - b);
            swapped.swap(2 * x, 2 * y);
            swapped.swap(2 * x + 1, 2 * y + 1);
        }
        let backward = band_build(&shapes, &swapped, bands);
        prop_assert_eq!(final_shapes(&forward), final_shapes(&backward));
    }

    #[test]
    fn chi_agrees_from_every_level((shapes, pairing, bands) in shapes_and_pairing()) {
        let b = band_build(&shapes, &pairing, bands);
        let chi = b.chi_omega();
        for i in 0..b.states().len() {
            prop_assert_eq!(b.chi_from_level(i), chi);
        }
        let d = b.to_datum();
        prop_assert_eq!(relative_euler_characteristic(&d), chi - b.sigma0().chi());
        prop_assert!(validate(&d).is_empty());
    }
}
