use serde_json::json;

use super::{ranks_text, require_valid, MoveError};
use crate::homology::generator_counts;
use crate::model::{MorseDatum, PointId, PointKind};
use crate::trace::MoveTrace;

/// Guard of [`cancel_pair`] without performing the move.
pub(crate) fn check_cancel(datum: &MorseDatum, z: &PointId, w: &PointId) -> Result<(), MoveError> {
    let pz = datum.point(z).ok_or_else(|| MoveError::UnknownPoint(z.clone()))?;
    let pw = datum.point(w).ok_or_else(|| MoveError::UnknownPoint(w.clone()))?;
    use PointKind::*;
    match (pz.kind, pw.kind) {
        (Interior, BoundaryStable | BoundaryUnstable) | (BoundaryStable | BoundaryUnstable, Interior) => {
            return Err(MoveError::MixedInteriorBoundary {
                z: z.clone(),
                w: w.clone(),
            });
        }
        (BoundaryStable, BoundaryUnstable) | (BoundaryUnstable, BoundaryStable) => {
            let pair = MorseDatum::new(datum.flags, vec![pz.clone(), pw.clone()], vec![]);
            let ranks = generator_counts(&pair);
            debug_assert!(!ranks.is_zero());
            return Err(MoveError::StableUnstableMix {
                z: z.clone(),
                w: w.clone(),
                certificate: ranks_text(&ranks),
            });
        }
        _ => {}
    }
    if pw.index != pz.index + 1 {
        return Err(MoveError::IndexMismatch {
            z: z.clone(),
            w: w.clone(),
        });
    }
    let touching: Vec<_> = datum
        .trajectories
        .iter()
        .filter(|t| &t.from == z || &t.to == z || &t.from == w || &t.to == w)
        .collect();
    let unique = touching.len() == 1 && {
        let t = touching[0];
        &t.from == z && &t.to == w && t.multiplicity == 1
    };
    if !unique {
        return Err(MoveError::NonUniqueTrajectory {
            z: z.clone(),
            w: w.clone(),
        });
    }
    Ok(())
}

/// Removes `z` and `w = z + 1 index`, joined by a single trajectory. Both
/// must be interior, both boundary stable or both boundary unstable.
pub fn cancel_pair(
    datum: &MorseDatum,
    z: &PointId,
    w: &PointId,
    trace: &mut MoveTrace,
) -> Result<MorseDatum, MoveError> {
    require_valid(datum)?;
    check_cancel(datum, z, w)?;
    let mut out = datum.clone();
    out.points.retain(|p| &p.id != z && &p.id != w);
    out.trajectories.retain(|t| !(&t.from == z && &t.to == w));
    trace.record(
        "cancel_pair",
        json!({ "lower": z.to_string(), "upper": w.to_string() }),
        datum,
        &out,
        None,
    );
    Ok(out)
}
