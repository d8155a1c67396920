//! Technically good Morse data.
//!
//! TG1: a lower index means a lower value. TG2: regular values `c < d`
//! separate the index-0 and boundary stable index-1 points (below `c`) and
//! the index-`(n+1)` and boundary unstable index-`n` points (above `d`) from
//! the rest. TG3 and TG4: no cancellable interior pair of indices `(0, 1)`
//! or `(n, n+1)`.

use serde::Serialize;

use super::cancel::{cancel_pair, check_cancel};
use super::schedule::global_rearrange;
use super::{require_valid, MoveError};
use crate::model::{CriticalPoint, MorseDatum, PointId, PointKind};
use crate::trace::MoveTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TgReport {
    pub tg1: bool,
    pub tg2: bool,
    pub tg3: bool,
    pub tg4: bool,
}

impl TgReport {
    pub fn all(&self) -> bool {
        self.tg1 && self.tg2 && self.tg3 && self.tg4
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.tg1 {
            v.push("TG1 (index order of values)");
        }
        if !self.tg2 {
            v.push("TG2 (bottom and top groups)");
        }
        if !self.tg3 {
            v.push("TG3 (cancellable interior 0/1 pair)");
        }
        if !self.tg4 {
            v.push("TG4 (cancellable interior n/n+1 pair)");
        }
        v
    }
}

fn is_low(p: &CriticalPoint) -> bool {
    p.index == 0 || (p.kind == PointKind::BoundaryStable && p.index == 1)
}

fn is_high(p: &CriticalPoint, n: u32) -> bool {
    p.index == n + 1 || (p.kind == PointKind::BoundaryUnstable && p.index == n)
}

/// First cancellable interior pair with indices `(lo, lo+1)`, smallest ids
/// first.
fn cancellable_pair(datum: &MorseDatum, lo: u32) -> Option<(PointId, PointId)> {
    let mut lower: Vec<_> = datum
        .points
        .iter()
        .filter(|p| p.kind == PointKind::Interior && p.index == lo)
        .map(|p| &p.id)
        .collect();
    let mut upper: Vec<_> = datum
        .points
        .iter()
        .filter(|p| p.kind == PointKind::Interior && p.index == lo + 1)
        .map(|p| &p.id)
        .collect();
    lower.sort();
    upper.sort();
    for z in &lower {
        for w in &upper {
            if check_cancel(datum, z, w).is_ok() {
                return Some(((*z).clone(), (*w).clone()));
            }
        }
    }
    None
}

pub fn tg_report(datum: &MorseDatum) -> TgReport {
    let n = datum.n();
    let pts = &datum.points;
    let tg1 = pts
        .iter()
        .all(|p| pts.iter().all(|q| p.index >= q.index || p.value < q.value));
    let max_low = pts.iter().filter(|p| is_low(p)).map(|p| &p.value).max();
    let min_high = pts.iter().filter(|p| is_high(p, n)).map(|p| &p.value).min();
    let low_ok = max_low.is_none_or(|m| pts.iter().filter(|p| !is_low(p)).all(|p| &p.value > m));
    let high_ok = min_high.is_none_or(|m| pts.iter().filter(|p| !is_high(p, n)).all(|p| &p.value < m));
    let tg3 = cancellable_pair(datum, 0).is_none();
    let tg4 = cancellable_pair(datum, n).is_none();
    TgReport {
        tg1,
        tg2: low_ok && high_ok,
        tg3,
        tg4,
    }
}

pub fn is_technically_good(datum: &MorseDatum) -> bool {
    tg_report(datum).all()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TechnicallyGood {
    pub datum: MorseDatum,
    pub cancelled: Vec<(PointId, PointId)>,
}

/// Rearranges to the canonical schedule, then cancels interior pairs of
/// indices `(0, 1)` and `(n, n+1)` joined by a unique trajectory. A datum
/// that is already technically good is returned unchanged.
pub fn make_technically_good(datum: &MorseDatum, trace: &mut MoveTrace) -> Result<TechnicallyGood, MoveError> {
    require_valid(datum)?;
    if is_technically_good(datum) {
        return Ok(TechnicallyGood {
            datum: datum.clone(),
            cancelled: Vec::new(),
        });
    }
    let mut current = global_rearrange(datum, trace)?;
    let mut cancelled = Vec::new();
    let n = datum.n();
    while let Some((z, w)) = cancellable_pair(&current, 0).or_else(|| cancellable_pair(&current, n)) {
        current = cancel_pair(&current, &z, &w, trace)?;
        cancelled.push((z, w));
    }
    debug_assert!(is_technically_good(&current));
    Ok(TechnicallyGood {
        datum: current,
        cancelled,
    })
}
