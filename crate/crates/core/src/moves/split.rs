//! Pushing interior critical points to the boundary.

use std::collections::BTreeMap;

use serde_json::json;

use super::technical::tg_report;
use super::{assign, require_valid, MoveError};
use crate::level::Level;
use crate::model::{CriticalPoint, MorseDatum, PointId, PointKind, Trajectory};
use crate::trace::MoveTrace;

/// Evidence from the `n = 1` surface oracle that the critical level
/// component through a point meets `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCertificate {
    pub(crate) level: Level,
    pub(crate) move_index: usize,
    pub(crate) reason: String,
}

impl OracleCertificate {
    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn move_index(&self) -> usize {
        self.move_index
    }

    pub fn reason(&self) -> &str {
        &self.reason
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitCertificate {
    /// The declared flags exclude closed components of `Σ₀`, `Σ₁` and `Ω`.
    FlagBased,
    OracleBased(OracleCertificate),
}

impl SplitCertificate {
    fn tag(&self) -> &'static str {
        match self {
            SplitCertificate::FlagBased => "flags",
            SplitCertificate::OracleBased(_) => "oracle",
        }
    }
}

/// How the interior points of a datum get split: in what order they are
/// placed on levels and what certifies each split.
pub struct SplitPlan {
    /// Bottom-to-top order for the candidates; `None` keeps current values.
    pub order: Option<Vec<PointId>>,
    pub certificates: BTreeMap<PointId, SplitCertificate>,
}

pub trait SplitAuthority {
    /// Checks run before any move of the normal-form pipeline.
    fn precheck(&self, datum: &MorseDatum) -> Result<(), MoveError>;
    fn plan(&self, datum: &MorseDatum, candidates: &[PointId]) -> Result<SplitPlan, MoveError>;
}

/// Certifies splits from the declared closed-component flags alone.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlagAuthority;

impl SplitAuthority for FlagAuthority {
    fn precheck(&self, datum: &MorseDatum) -> Result<(), MoveError> {
        if datum.flags.any_closed() {
            return Err(MoveError::Obstruction(flag_diagnosis(datum, None)));
        }
        Ok(())
    }

    fn plan(&self, datum: &MorseDatum, candidates: &[PointId]) -> Result<SplitPlan, MoveError> {
        self.precheck(datum)?;
        Ok(SplitPlan {
            order: None,
            certificates: candidates
                .iter()
                .map(|id| (id.clone(), SplitCertificate::FlagBased))
                .collect(),
        })
    }
}

fn flag_diagnosis(datum: &MorseDatum, z: Option<&PointId>) -> String {
    let f = &datum.flags;
    let mut closed = Vec::new();
    if f.closed_sigma0 {
        closed.push("Sigma_0");
    }
    if f.closed_sigma1 {
        closed.push("Sigma_1");
    }
    if f.closed_omega {
        closed.push("Omega");
    }
    let subject = match z {
        Some(z) => format!("cannot certify that the critical level component through {z} meets Y"),
        None => "cannot certify that critical level components meet Y".to_string(),
    };
    let mut msg = format!("{subject}; closed components declared in {}", closed.join(", "));
    let interior: Vec<_> = datum.points.iter().filter(|p| p.kind == PointKind::Interior).collect();
    if f.n == 1 && interior.len() == datum.points.len() && interior.iter().filter(|p| p.index == 1).count() == 1 {
        msg.push_str(" (pair-of-pants configuration: the level through the saddle is closed and Y is empty)");
    }
    msg
}

fn fresh_id(datum: &MorseDatum, base: String) -> PointId {
    let mut id = PointId(base);
    while datum.contains(&id) {
        id.0.push('\'');
    }
    id
}

/// Replaces the interior point `z` of index `1..=n` by a boundary stable
/// point just below and a boundary unstable point just above it, joined by a
/// single trajectory. Trajectories into `z` now end at the stable point and
/// trajectories out of `z` start at the unstable one.
pub fn split_interior(
    datum: &MorseDatum,
    z: &PointId,
    certificate: &SplitCertificate,
    trace: &mut MoveTrace,
) -> Result<MorseDatum, MoveError> {
    require_valid(datum)?;
    let p = datum.point(z).ok_or_else(|| MoveError::UnknownPoint(z.clone()))?;
    if p.kind != PointKind::Interior {
        return Err(MoveError::NotInterior(z.clone()));
    }
    let n = datum.n();
    if p.index == 0 || p.index > n {
        return Err(MoveError::IndexOutOfRange {
            point: z.clone(),
            index: p.index,
            n,
        });
    }
    if *certificate == SplitCertificate::FlagBased && datum.flags.any_closed() {
        return Err(MoveError::Obstruction(flag_diagnosis(datum, Some(z))));
    }

    let v = p.value.clone();
    let mut gap = Level::from_ratio(1, 5);
    gap = Level::min(&gap, &v);
    gap = Level::min(&gap, &(&Level::one() - &v));
    for q in &datum.points {
        if &q.id != z {
            gap = Level::min(&gap, &(&q.value - &v).abs());
        }
    }
    let w = &gap / &Level::from_integer(4);

    let mut out = datum.clone();
    let zs = fresh_id(datum, format!("{z}.s"));
    let zu = fresh_id(datum, format!("{z}.u"));
    let k = p.index;
    out.points.retain(|q| &q.id != z);
    out.points.push(CriticalPoint {
        id: zs.clone(),
        kind: PointKind::BoundaryStable,
        index: k,
        value: &v - &w,
    });
    out.points.push(CriticalPoint {
        id: zu.clone(),
        kind: PointKind::BoundaryUnstable,
        index: k,
        value: &v + &w,
    });
    for t in &mut out.trajectories {
        if &t.to == z {
            t.to = zs.clone();
        }
        if &t.from == z {
            t.from = zu.clone();
        }
    }
    out.trajectories.push(Trajectory {
        from: zs.clone(),
        to: zu.clone(),
        multiplicity: 1,
    });
    trace.record(
        "split_interior",
        json!({
            "point": z.to_string(),
            "certificate": certificate.tag(),
            "stable": zs.to_string(),
            "unstable": zu.to_string(),
            "offset": w.to_string(),
        }),
        datum,
        &out,
        None,
    );
    Ok(out)
}

/// Splits every interior point of index `1..=n` of a technically good datum.
pub fn split_all_interior(
    datum: &MorseDatum,
    authority: &dyn SplitAuthority,
    trace: &mut MoveTrace,
) -> Result<MorseDatum, MoveError> {
    require_valid(datum)?;
    let report = tg_report(datum);
    if !report.all() {
        return Err(MoveError::NotTechnicallyGood(report.failures().join("; ")));
    }
    let n = datum.n();
    let mut candidates: Vec<&CriticalPoint> = datum
        .points
        .iter()
        .filter(|p| p.kind == PointKind::Interior && (1..=n).contains(&p.index))
        .collect();
    candidates.sort_by(|a, b| a.value.cmp(&b.value));
    let ids: Vec<PointId> = candidates.iter().map(|p| p.id.clone()).collect();
    if ids.is_empty() {
        return Ok(datum.clone());
    }
    let plan = authority.plan(datum, &ids)?;

    let mut current = datum.clone();
    if let Some(order) = &plan.order {
        current = relevel(&current, order, trace)?;
    }
    let mut order: Vec<PointId> = ids.clone();
    order.sort_by(|a, b| current.point(a).unwrap().value.cmp(&current.point(b).unwrap().value));
    for z in &order {
        let cert = plan
            .certificates
            .get(z)
            .ok_or_else(|| MoveError::Obstruction(format!("no certificate for splitting {z}")))?;
        current = split_interior(&current, z, cert, trace)?;
    }
    Ok(current)
}

/// Parks the points of `order` on one level, then hands them the levels
/// they held before, bottom to top in the given order.
fn relevel(datum: &MorseDatum, order: &[PointId], trace: &mut MoveTrace) -> Result<MorseDatum, MoveError> {
    let mut levels: Vec<Level> = order
        .iter()
        .map(|id| {
            datum
                .point(id)
                .map(|p| p.value.clone())
                .ok_or_else(|| MoveError::UnknownPoint(id.clone()))
        })
        .collect::<Result<_, _>>()?;
    levels.sort();
    let Some(bottom) = levels.first().cloned() else {
        return Ok(datum.clone());
    };

    let mut parked = datum.clone();
    parked.same_level = true;
    let park: BTreeMap<PointId, Level> = order.iter().map(|id| (id.clone(), bottom.clone())).collect();
    let parked = assign(&parked, &park)?;
    trace.record(
        "same_level",
        json!({ "points": order.iter().map(ToString::to_string).collect::<Vec<_>>(), "level": bottom.to_string() }),
        datum,
        &parked,
        None,
    );

    let mut placed = parked.clone();
    placed.same_level = false;
    let spread: BTreeMap<PointId, Level> = order.iter().cloned().zip(levels).collect();
    let placed = assign(&placed, &spread)?;
    trace.record(
        "relevel",
        json!({ "order": order.iter().map(ToString::to_string).collect::<Vec<_>>() }),
        &parked,
        &placed,
        None,
    );
    Ok(placed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::relative_euler_characteristic;
    use crate::model::{validate, CobordismFlags};

    fn lv(s: &str) -> Level {
        s.parse().unwrap()
    }

    fn one(n: u32, k: u32, v: &str) -> MorseDatum {
        MorseDatum::new(
            CobordismFlags::open(n),
            vec![CriticalPoint::new("z", PointKind::Interior, k, lv(v))],
            vec![],
        )
    }

    #[test]
    fn split_of_a_lone_saddle() {
        let d = one(2, 1, "0.5");
        let mut tr = MoveTrace::new();
        let out = split_interior(&d, &"z".into(), &SplitCertificate::FlagBased, &mut tr).unwrap();
        let s = out.point(&"z.s".into()).unwrap();
        let u = out.point(&"z.u".into()).unwrap();
        assert_eq!(
            (s.kind, s.index, s.value.clone()),
            (PointKind::BoundaryStable, 1, lv("0.45"))
        );
        assert_eq!(
            (u.kind, u.index, u.value.clone()),
            (PointKind::BoundaryUnstable, 1, lv("0.55"))
        );
        assert_eq!(out.trajectories, vec![Trajectory::new("z.s", "z.u", 1)]);
        assert!(validate(&out).is_empty());
        assert_eq!(relative_euler_characteristic(&out), relative_euler_characteristic(&d));
        assert!(tr.conserves_chi());
    }

    #[test]
    fn index_guards() {
        let mut tr = MoveTrace::new();
        for k in [0, 3] {
            let d = one(2, k, "0.5");
            assert!(matches!(
                split_interior(&d, &"z".into(), &SplitCertificate::FlagBased, &mut tr),
                Err(MoveError::IndexOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn closed_flags_block_flag_certificates() {
        let mut d = one(1, 1, "0.5");
        d.flags.closed_sigma0 = true;
        let err = split_interior(&d, &"z".into(), &SplitCertificate::FlagBased, &mut MoveTrace::new()).unwrap_err();
        match err {
            MoveError::Obstruction(msg) => assert!(msg.contains("pair-of-pants")),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn trajectories_follow_the_split() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("a", PointKind::Interior, 0, lv("0.1")),
                CriticalPoint::new("z", PointKind::Interior, 1, lv("0.5")),
                CriticalPoint::new("b", PointKind::Interior, 2, lv("0.9")),
            ],
            vec![Trajectory::new("a", "z", 2), Trajectory::new("z", "b", 1)],
        );
        let out = split_interior(&d, &"z".into(), &SplitCertificate::FlagBased, &mut MoveTrace::new()).unwrap();
        assert!(validate(&out).is_empty(), "{:?}", validate(&out));
        assert!(out.trajectories.contains(&Trajectory::new("a", "z.s", 2)));
        assert!(out.trajectories.contains(&Trajectory::new("z.u", "b", 1)));
    }

    #[test]
    fn split_all_two_saddles() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("p", PointKind::Interior, 1, lv("0.4")),
                CriticalPoint::new("q", PointKind::Interior, 1, lv("0.45")),
            ],
            vec![],
        );
        let out = split_all_interior(&d, &FlagAuthority, &mut MoveTrace::new()).unwrap();
        assert_eq!(out.points.len(), 4);
        assert_eq!(out.trajectories.len(), 2);
        assert!(out.points.iter().all(|p| p.kind.is_boundary()));
    }

    #[test]
    fn split_all_leaves_extreme_indices() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("a", PointKind::Interior, 0, lv("0.1")),
                CriticalPoint::new("b", PointKind::Interior, 3, lv("0.9")),
            ],
            vec![],
        );
        assert_eq!(
            split_all_interior(&d, &FlagAuthority, &mut MoveTrace::new()).unwrap(),
            d
        );
    }

    #[test]
    fn split_all_needs_technically_good_input() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![
                CriticalPoint::new("a", PointKind::Interior, 2, lv("0.2")),
                CriticalPoint::new("b", PointKind::Interior, 1, lv("0.5")),
            ],
            vec![],
        );
        assert!(matches!(
            split_all_interior(&d, &FlagAuthority, &mut MoveTrace::new()),
            Err(MoveError::NotTechnicallyGood(_))
        ));
    }
}
