//! Guarded rewrite moves on Morse data.
//!
//! Every move takes a datum, checks its preconditions, returns the rewritten
//! datum and appends an entry to a [`MoveTrace`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::json;
use thiserror::Error;

use crate::homology::GradedRanks;
use crate::level::Level;
use crate::model::{validate, MorseDatum, PointId, PointKind, Violation};
use crate::trace::MoveTrace;

mod cancel;
mod normal;
pub mod random;
mod schedule;
mod split;
mod technical;

pub use cancel::cancel_pair;
pub use normal::{normal_form, BlockLabel, NormalForm, SplitBlock, SplitDecomposition};
pub use schedule::{band_radius, global_rearrange, nominal_value, scheduled_values, tg2_regular_values, theta};
pub use split::{
    split_all_interior, split_interior, FlagAuthority, OracleCertificate, SplitAuthority, SplitCertificate, SplitPlan,
};
pub use technical::{is_technically_good, make_technically_good, tg_report, TechnicallyGood, TgReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("unknown point {0}")]
    UnknownPoint(PointId),
    #[error("datum is not valid: {}", list(.0))]
    InvalidDatum(Vec<Violation>),
    #[error("same-level marker is set; only the level-reordering step may run")]
    SameLevelActive,
    #[error("order conflict: trajectory {from}->{to} would not increase")]
    OrderConflict { from: PointId, to: PointId },
    #[error("value {value} for {point} outside (0,1)")]
    RangeError { point: PointId, value: Level },
    #[error("assigned values are not pairwise distinct ({0})")]
    DuplicateValue(Level),
    #[error("schedule conflict: trajectory {from}->{to} is reversed by the canonical schedule")]
    ScheduleConflict { from: PointId, to: PointId },
    #[error("{point} has index {index}; only interior points of index 1..={n} can be split")]
    IndexOutOfRange { point: PointId, index: u32, n: u32 },
    #[error("{0} is not an interior point")]
    NotInterior(PointId),
    #[error("obstruction: {0}")]
    Obstruction(String),
    #[error("datum is not technically good: {0}")]
    NotTechnicallyGood(String),
    #[error("{z} and {w} mix an interior and a boundary point; the cobordism they span is not a product")]
    MixedInteriorBoundary { z: PointId, w: PointId },
    #[error(
        "{z} and {w} mix boundary stable and boundary unstable points; H_*(Omega,Sigma_0) != 0 (ranks {certificate})"
    )]
    StableUnstableMix {
        z: PointId,
        w: PointId,
        certificate: String,
    },
    #[error("{z} and {w} are not joined by exactly one trajectory of multiplicity 1 that touches nothing else")]
    NonUniqueTrajectory { z: PointId, w: PointId },
    #[error("index of {w} must exceed index of {z} by one")]
    IndexMismatch { z: PointId, w: PointId },
    #[error("datum does not match the oracle build: {0}")]
    BuildMismatch(String),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub(crate) fn ranks_text(g: &GradedRanks) -> String {
    let parts: Vec<String> = g.0.iter().map(|(d, r)| format!("H_{d}: {r}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub(crate) fn require_valid(datum: &MorseDatum) -> Result<(), MoveError> {
    if datum.same_level {
        return Err(MoveError::SameLevelActive);
    }
    let v = validate(datum);
    if v.is_empty() {
        Ok(())
    } else {
        Err(MoveError::InvalidDatum(v))
    }
}

fn require_point<'a>(datum: &'a MorseDatum, id: &PointId) -> Result<&'a crate::model::CriticalPoint, MoveError> {
    datum.point(id).ok_or_else(|| MoveError::UnknownPoint(id.clone()))
}

/// Points reachable from `start` along recorded trajectories.
fn reachable(datum: &MorseDatum, start: &PointId) -> BTreeSet<PointId> {
    let mut succ: HashMap<&PointId, Vec<&PointId>> = HashMap::new();
    for t in &datum.trajectories {
        succ.entry(&t.from).or_default().push(&t.to);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(p) = stack.pop() {
        for q in succ.get(p).into_iter().flatten() {
            if seen.insert((*q).clone()) {
                stack.push(q);
            }
        }
    }
    seen
}

/// `true` iff no chain of recorded trajectories joins `p` and `q`.
pub fn can_reorder(datum: &MorseDatum, p: &PointId, q: &PointId) -> Result<bool, MoveError> {
    require_point(datum, p)?;
    require_point(datum, q)?;
    Ok(!reachable(datum, p).contains(q) && !reachable(datum, q).contains(p))
}

/// Reassigns critical values, keeping every recorded trajectory increasing.
pub fn set_values(
    datum: &MorseDatum,
    assignments: &BTreeMap<PointId, Level>,
    trace: &mut MoveTrace,
) -> Result<MorseDatum, MoveError> {
    let out = assign(datum, assignments)?;
    trace.record(
        "set_values",
        json!({ "assignments": assignments.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<BTreeMap<_, _>>() }),
        datum,
        &out,
        None,
    );
    Ok(out)
}

pub(crate) fn assign(datum: &MorseDatum, assignments: &BTreeMap<PointId, Level>) -> Result<MorseDatum, MoveError> {
    let mut out = datum.clone();
    for (id, value) in assignments {
        if !value.in_open_unit() {
            return Err(MoveError::RangeError {
                point: id.clone(),
                value: value.clone(),
            });
        }
        out.point_mut(id)
            .ok_or_else(|| MoveError::UnknownPoint(id.clone()))?
            .value = value.clone();
    }
    if !out.same_level {
        let mut seen = BTreeSet::new();
        for p in &out.points {
            if !seen.insert(&p.value) {
                return Err(MoveError::DuplicateValue(p.value.clone()));
            }
        }
    }
    for t in &out.trajectories {
        let a = require_point(&out, &t.from)?;
        let b = require_point(&out, &t.to)?;
        if a.value >= b.value {
            return Err(MoveError::OrderConflict {
                from: t.from.clone(),
                to: t.to.clone(),
            });
        }
    }
    Ok(out)
}

/// No interior points and every boundary point boundary stable.
pub fn is_left_product(datum: &MorseDatum) -> bool {
    datum.points.iter().all(|p| p.kind == PointKind::BoundaryStable)
}

/// No interior points and every boundary point boundary unstable.
pub fn is_right_product(datum: &MorseDatum) -> bool {
    datum.points.iter().all(|p| p.kind == PointKind::BoundaryUnstable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CobordismFlags, CriticalPoint, Trajectory};

    fn lv(s: &str) -> Level {
        s.parse().unwrap()
    }

    fn chain() -> MorseDatum {
        MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("a", PointKind::Interior, 0, lv("0.1")),
                CriticalPoint::new("b", PointKind::Interior, 1, lv("0.3")),
                CriticalPoint::new("c", PointKind::Interior, 2, lv("0.6")),
                CriticalPoint::new("d", PointKind::Interior, 2, lv("0.7")),
            ],
            vec![Trajectory::new("a", "b", 1), Trajectory::new("b", "c", 2)],
        )
    }

    #[test]
    fn reorder_examples() {
        let d = chain();
        assert!(can_reorder(&d, &"b".into(), &"d".into()).unwrap());
        assert!(!can_reorder(&d, &"a".into(), &"b".into()).unwrap());
        assert!(!can_reorder(&d, &"c".into(), &"a".into()).unwrap());
        assert!(can_reorder(&d, &"a".into(), &"zz".into()).is_err());
    }

    #[test]
    fn set_values_examples() {
        let d = chain();
        let mut tr = MoveTrace::new();
        let swap = BTreeMap::from([("c".into(), lv("0.7")), ("d".into(), lv("0.6"))]);
        let out = set_values(&d, &swap, &mut tr).unwrap();
        assert_eq!(out.point(&"d".into()).unwrap().value, lv("0.6"));
        assert_eq!(tr.len(), 1);
        let bad = BTreeMap::from([("b".into(), lv("0.65"))]);
        assert_eq!(
            set_values(&d, &bad, &mut tr),
            Err(MoveError::OrderConflict {
                from: "b".into(),
                to: "c".into()
            })
        );
        let out = set_values(&d, &BTreeMap::new(), &mut tr).unwrap();
        assert_eq!(out, d);
        let range = BTreeMap::from([("d".into(), lv("1"))]);
        assert!(matches!(
            set_values(&d, &range, &mut tr),
            Err(MoveError::RangeError { .. })
        ));
    }

    #[test]
    fn product_detection() {
        let mut d = MorseDatum::empty(CobordismFlags::open(2));
        assert!(is_left_product(&d) && is_right_product(&d));
        d.points
            .push(CriticalPoint::new("y", PointKind::BoundaryStable, 1, lv("0.5")));
        assert!(is_left_product(&d) && !is_right_product(&d));
        d.points[0].kind = PointKind::Interior;
        assert!(!is_left_product(&d) && !is_right_product(&d));
    }
}
