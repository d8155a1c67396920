//! Canonical level schedule.
//!
//! With `θ = 1/(4n+6)`, interior index-`k` points sit near `4kθ` (index 0
//! near `θ`, index `n+1` near `1-θ`), boundary stable index-`k` points near
//! `(4k-1)θ` and boundary unstable index-`k` points near `(4k+1)θ`. Boundary
//! unstable points of index 0 sit near `1.5θ`, between the index-0 interior
//! band and the first boundary stable band.

use std::collections::BTreeMap;

use serde_json::json;

use super::{assign, require_valid, MoveError};
use crate::level::Level;
use crate::model::{MorseDatum, PointId, PointKind};
use crate::trace::MoveTrace;

pub fn theta(n: u32) -> Level {
    Level::from_ratio(1, 4 * n as i64 + 6)
}

pub fn nominal_value(kind: PointKind, k: u32, n: u32) -> Level {
    let t = theta(n);
    let k = k as i64;
    let n = n as i64;
    let times = |num: i64, den: i64| &t * &Level::from_ratio(num, den);
    match kind {
        PointKind::Interior if k == 0 => t.clone(),
        PointKind::Interior if k == n + 1 => times(4 * n + 5, 1),
        PointKind::Interior => times(4 * k, 1),
        PointKind::BoundaryStable => times(4 * k - 1, 1),
        PointKind::BoundaryUnstable if k == 0 => times(3, 2),
        PointKind::BoundaryUnstable => times(4 * k + 1, 1),
    }
}

pub fn band_radius(kind: PointKind, k: u32, n: u32) -> Level {
    let t = theta(n);
    if kind == PointKind::BoundaryUnstable && k == 0 {
        &t * &Level::from_ratio(1, 8)
    } else {
        &t * &Level::from_ratio(1, 4)
    }
}

/// Regular values `c < d` separating the bottom and top groups of the
/// schedule.
pub fn tg2_regular_values(n: u32) -> (Level, Level) {
    let t = theta(n);
    (
        &t * &Level::from_ratio(7, 2),
        &t * &Level::from_ratio(8 * n as i64 + 1, 2),
    )
}

/// Scheduled value of every point. Members of one band are spread evenly
/// around its centre in id order and rounded to terminating decimals.
pub fn scheduled_values(datum: &MorseDatum) -> BTreeMap<PointId, Level> {
    let n = datum.n();
    let mut bands: BTreeMap<(PointKind, u32), Vec<&PointId>> = BTreeMap::new();
    for p in &datum.points {
        bands.entry((p.kind, p.index)).or_default().push(&p.id);
    }
    let mut out = BTreeMap::new();
    for ((kind, k), mut ids) in bands {
        ids.sort();
        let m = ids.len() as i64;
        let centre = nominal_value(kind, k, n);
        let spacing = &(&band_radius(kind, k, n) * &Level::from_integer(2)) / &Level::from_integer(m + 1);
        let digits = Level::digits_below(&(&spacing / &Level::from_integer(100)));
        for (j, id) in ids.into_iter().enumerate() {
            let offset = &spacing * &Level::from_ratio(2 * j as i64 - (m - 1), 2);
            out.insert(id.clone(), (&centre + &offset).round_decimal(digits));
        }
    }
    out
}

/// Note recorded when two boundary points change their relative order.
pub(crate) fn boundary_swap_note(before: &MorseDatum, after: &MorseDatum) -> Option<String> {
    let bnd: Vec<_> = before.points.iter().filter(|p| p.kind.is_boundary()).collect();
    for (i, p) in bnd.iter().enumerate() {
        for q in &bnd[i + 1..] {
            let (Some(p2), Some(q2)) = (after.point(&p.id), after.point(&q.id)) else {
                continue;
            };
            if (p.value < q.value) != (p2.value < q2.value) {
                return Some(format!(
                    "boundary points {} and {} exchanged order; the metric is changed away from their flow sets",
                    p.id, q.id
                ));
            }
        }
    }
    None
}

/// Moves every point into its scheduled band.
pub fn global_rearrange(datum: &MorseDatum, trace: &mut MoveTrace) -> Result<MorseDatum, MoveError> {
    require_valid(datum)?;
    let values = scheduled_values(datum);
    for t in &datum.trajectories {
        if values[&t.from] >= values[&t.to] {
            return Err(MoveError::ScheduleConflict {
                from: t.from.clone(),
                to: t.to.clone(),
            });
        }
    }
    let out = assign(datum, &values)?;
    trace.record(
        "global_rearrange",
        json!({ "theta": theta(datum.n()).to_string() }),
        datum,
        &out,
        boundary_swap_note(datum, &out),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CobordismFlags, CriticalPoint, Trajectory};

    fn lv(s: &str) -> Level {
        s.parse().unwrap()
    }

    #[test]
    fn theta_for_n1() {
        assert_eq!(theta(1), lv("0.1"));
        assert_eq!(nominal_value(PointKind::Interior, 1, 1), lv("0.4"));
        assert_eq!(nominal_value(PointKind::Interior, 0, 1), lv("0.1"));
        assert_eq!(nominal_value(PointKind::Interior, 2, 1), lv("0.9"));
    }

    #[test]
    fn single_interior_point_lands_on_four_theta() {
        let d = MorseDatum::new(
            CobordismFlags::open(1),
            vec![CriticalPoint::new("z", PointKind::Interior, 1, lv("0.77"))],
            vec![],
        );
        let out = global_rearrange(&d, &mut MoveTrace::new()).unwrap();
        assert_eq!(out.points[0].value, lv("0.4"));
    }

    #[test]
    fn stable_before_unstable() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("s", PointKind::BoundaryStable, 1, lv("0.5")),
                CriticalPoint::new("u", PointKind::BoundaryUnstable, 1, lv("0.6")),
            ],
            vec![Trajectory::new("s", "u", 1)],
        );
        let out = global_rearrange(&d, &mut MoveTrace::new()).unwrap();
        let t = theta(2);
        let s = &out.point(&"s".into()).unwrap().value;
        let u = &out.point(&"u".into()).unwrap().value;
        assert!((s - &(&t * &Level::from_integer(3))).abs() < Level::from_ratio(1, 10_000));
        assert!((u - &(&t * &Level::from_integer(5))).abs() < Level::from_ratio(1, 10_000));
        assert!(s < u);
        assert!(s.is_terminating() && u.is_terminating());
    }

    #[test]
    fn empty_datum() {
        let d = MorseDatum::empty(CobordismFlags::open(3));
        assert_eq!(global_rearrange(&d, &mut MoveTrace::new()).unwrap(), d);
    }

    #[test]
    fn bands_are_distinct_and_inside_radius() {
        for n in 1..=4u32 {
            let mut pts = Vec::new();
            let mut v = 1;
            for kind in PointKind::ALL {
                for k in kind.index_range(n) {
                    for j in 0..5 {
                        pts.push(CriticalPoint::new(
                            format!("{kind:?}{k}_{j}"),
                            kind,
                            k,
                            Level::from_ratio(v, 1000),
                        ));
                        v += 1;
                    }
                }
            }
            let d = MorseDatum::new(CobordismFlags::open(n), pts, vec![]);
            let out = global_rearrange(&d, &mut MoveTrace::new()).unwrap();
            assert!(out.is_valid());
            for p in &out.points {
                let gap = (&p.value - &nominal_value(p.kind, p.index, n)).abs();
                assert!(gap < band_radius(p.kind, p.index, n), "{p:?}");
            }
        }
    }
}
