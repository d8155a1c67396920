//! Splitting into left and right product blocks.

use std::fmt;

use serde::{Serialize, Serializer};

use super::schedule::{global_rearrange, theta};
use super::split::{split_all_interior, SplitAuthority};
use super::technical::make_technically_good;
use super::{require_valid, MoveError};
use crate::level::Level;
use crate::model::{CriticalPoint, MorseDatum, PointId, PointKind};
use crate::trace::MoveTrace;

/// Block `Ω_s` for `s = twice / 2`, `0 <= s <= n+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockLabel {
    pub twice: u32,
}

impl BlockLabel {
    /// Block that must hold a point of this kind and index, if any.
    pub fn for_point(kind: PointKind, k: u32, n: u32) -> Option<Self> {
        let twice = match kind {
            PointKind::Interior if k == 0 => 0,
            PointKind::Interior if k == n + 1 => 2 * n + 2,
            PointKind::Interior => return None,
            PointKind::BoundaryStable => 2 * k - 1,
            PointKind::BoundaryUnstable => 2 * k,
        };
        Some(BlockLabel { twice })
    }

    pub fn admits(&self, p: &CriticalPoint, n: u32) -> bool {
        BlockLabel::for_point(p.kind, p.index, n) == Some(*self)
    }

    /// `[4sθ, (4s+2)θ]`.
    pub fn window(&self, n: u32) -> (Level, Level) {
        let t = theta(n);
        let lo = &t * &Level::from_integer(2 * self.twice as i64);
        let hi = &t * &Level::from_integer(2 * self.twice as i64 + 2);
        (lo, hi)
    }

    /// Left product blocks sit at half-integer `s`.
    pub fn is_left(&self) -> bool {
        self.twice % 2 == 1
    }
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "Omega_{}", self.twice / 2)
        } else {
            write!(f, "Omega_{}/2", self.twice)
        }
    }
}

impl Serialize for BlockLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitBlock {
    pub label: BlockLabel,
    pub window: (Level, Level),
    pub members: Vec<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitDecomposition {
    pub n: u32,
    pub theta: Level,
    pub blocks: Vec<SplitBlock>,
}

impl SplitDecomposition {
    /// Partitions a datum without interior points of index `1..=n` into the
    /// `2n+3` blocks, members in value order.
    pub fn partition(datum: &MorseDatum) -> Result<Self, MoveError> {
        let n = datum.n();
        let mut blocks: Vec<SplitBlock> = (0..=2 * n + 2)
            .map(|twice| {
                let label = BlockLabel { twice };
                SplitBlock {
                    label,
                    window: label.window(n),
                    members: Vec::new(),
                }
            })
            .collect();
        for p in datum.points_by_value() {
            let label = BlockLabel::for_point(p.kind, p.index, n)
                .ok_or_else(|| MoveError::NotTechnicallyGood(format!("interior point {} was not split", p.id)))?;
            blocks[label.twice as usize].members.push(p.id.clone());
        }
        Ok(SplitDecomposition {
            n,
            theta: theta(n),
            blocks,
        })
    }

    /// Checks block membership, window containment and monotone windows.
    pub fn verify(&self, datum: &MorseDatum) -> Result<(), String> {
        let n = self.n;
        if datum.n() != n || self.theta != theta(n) {
            return Err("dimension or spacing does not match the datum".into());
        }
        let mut seen = 0;
        for (i, b) in self.blocks.iter().enumerate() {
            if b.label.twice as usize != i || b.window != b.label.window(n) {
                return Err(format!("block {i} has label {} or window out of place", b.label));
            }
            if let Some(next) = self.blocks.get(i + 1) {
                if !(b.window.0 < b.window.1 && b.window.1 <= next.window.0) {
                    return Err(format!("windows of {} and {} are not increasing", b.label, next.label));
                }
            }
            for id in &b.members {
                let p = datum
                    .point(id)
                    .ok_or_else(|| format!("{id} is not a point of the datum"))?;
                if !b.label.admits(p, n) {
                    return Err(format!(
                        "{id} ({:?} {}) does not belong in {}",
                        p.kind, p.index, b.label
                    ));
                }
                if !(b.window.0 < p.value && p.value < b.window.1) {
                    return Err(format!("{id} at {} lies outside the window of {}", p.value, b.label));
                }
                seen += 1;
            }
        }
        if seen != datum.points.len() {
            return Err("some points are in no block".into());
        }
        Ok(())
    }

    pub fn populated(&self) -> impl Iterator<Item = &SplitBlock> {
        self.blocks.iter().filter(|b| !b.members.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub decomposition: SplitDecomposition,
    pub trace: MoveTrace,
    pub datum: MorseDatum,
}

/// Technically good form, then every interior point of index `1..=n`
/// split to the boundary, then the canonical schedule, then blocks.
pub fn normal_form(datum: &MorseDatum, authority: &dyn SplitAuthority) -> Result<NormalForm, MoveError> {
    require_valid(datum)?;
    authority.precheck(datum)?;
    let mut trace = MoveTrace::new();
    let good = make_technically_good(datum, &mut trace)?;
    let split = split_all_interior(&good.datum, authority, &mut trace)?;
    let placed = global_rearrange(&split, &mut trace)?;
    let decomposition = SplitDecomposition::partition(&placed)?;
    debug_assert_eq!(decomposition.verify(&placed), Ok(()));
    Ok(NormalForm {
        decomposition,
        trace,
        datum: placed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{lift_boundary_datum, BoundarySign, CobordismFlags};
    use crate::moves::FlagAuthority;

    fn lv(s: &str) -> Level {
        s.parse().unwrap()
    }

    #[test]
    fn labels_and_windows() {
        assert_eq!(BlockLabel { twice: 0 }.to_string(), "Omega_0");
        assert_eq!(BlockLabel { twice: 1 }.to_string(), "Omega_1/2");
        assert_eq!(BlockLabel { twice: 4 }.to_string(), "Omega_2");
        let (lo, hi) = BlockLabel { twice: 1 }.window(1);
        assert_eq!((lo, hi), (lv("0.2"), lv("0.4")));
    }

    #[test]
    fn left_product_fills_half_blocks() {
        let flags = CobordismFlags::open(2);
        let d = lift_boundary_datum(
            &[(0, lv("0.3")), (1, lv("0.5")), (2, lv("0.7"))],
            BoundarySign::AllStable,
            flags,
        )
        .unwrap();
        let nf = normal_form(&d, &FlagAuthority).unwrap();
        assert!(nf.decomposition.populated().all(|b| b.label.is_left()));
        assert_eq!(nf.decomposition.populated().count(), 3);
        nf.decomposition.verify(&nf.datum).unwrap();
    }

    #[test]
    fn lone_saddle_in_dimension_two() {
        let d = MorseDatum::new(
            CobordismFlags::open(2),
            vec![CriticalPoint::new("z", PointKind::Interior, 1, lv("0.5"))],
            vec![],
        );
        let nf = normal_form(&d, &FlagAuthority).unwrap();
        let pop: Vec<_> = nf
            .decomposition
            .populated()
            .map(|b| (b.label.to_string(), b.members.clone()))
            .collect();
        assert_eq!(
            pop,
            vec![
                ("Omega_1/2".to_string(), vec![PointId::from("z.s")]),
                ("Omega_1".to_string(), vec![PointId::from("z.u")]),
            ]
        );
        assert!(nf.trace.conserves_chi());
    }

    #[test]
    fn empty_datum_has_empty_blocks() {
        let nf = normal_form(&MorseDatum::empty(CobordismFlags::open(3)), &FlagAuthority).unwrap();
        assert_eq!(nf.decomposition.blocks.len(), 9);
        assert_eq!(nf.decomposition.populated().count(), 0);
    }

    #[test]
    fn closed_flags_are_an_obstruction() {
        let mut d = MorseDatum::empty(CobordismFlags::open(2));
        d.flags.closed_omega = true;
        assert!(matches!(
            normal_form(&d, &FlagAuthority),
            Err(MoveError::Obstruction(_))
        ));
    }
}
