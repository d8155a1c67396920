//! Half-handles, their relative homology and their effect on level sets.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{MorseDatum, PointKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HalfHandleSpec {
    pub side: Side,
    pub index: u32,
    pub n: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("{side:?} half-handle of index {index} does not exist when n = {n}")]
    InvalidSpec { side: Side, index: u32, n: u32 },
}

impl HalfHandleSpec {
    pub fn new(side: Side, index: u32, n: u32) -> Result<Self, HomologyError> {
        let spec = HalfHandleSpec { side, index, n };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), HomologyError> {
        let ok = self.n >= 1
            && match self.side {
                Side::Right => self.index <= self.n,
                Side::Left => (1..=self.n + 1).contains(&self.index),
            };
        if ok {
            Ok(())
        } else {
            Err(HomologyError::InvalidSpec {
                side: self.side,
                index: self.index,
                n: self.n,
            })
        }
    }

    /// The half-handle crossed at a boundary critical point.
    pub fn for_point(kind: PointKind, index: u32, n: u32) -> Option<Self> {
        let side = match kind {
            PointKind::BoundaryStable => Side::Left,
            PointKind::BoundaryUnstable => Side::Right,
            PointKind::Interior => return None,
        };
        HalfHandleSpec::new(side, index, n).ok()
    }
}

/// Ranks of a graded free abelian group, zero ranks omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GradedRanks(pub BTreeMap<u32, u64>);

impl GradedRanks {
    pub fn single(degree: u32) -> Self {
        let mut m = BTreeMap::new();
        m.insert(degree, 1);
        GradedRanks(m)
    }

    pub fn rank(&self, degree: u32) -> u64 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|&r| r == 0)
    }

    pub fn alternating_sum(&self) -> i64 {
        self.0
            .iter()
            .map(|(&d, &r)| if d % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    fn bump(&mut self, degree: u32) {
        *self.0.entry(degree).or_insert(0) += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativePair {
    /// `(H, B)`: the half-handle relative to its attaching region.
    HB,
    /// `(C, B₀)`: the core relative to its lower boundary.
    CB0,
}

pub fn half_handle_relative_homology(spec: HalfHandleSpec, pair: RelativePair) -> Result<GradedRanks, HomologyError> {
    spec.check()?;
    Ok(match (spec.side, pair) {
        (Side::Right, _) => GradedRanks::single(spec.index),
        (Side::Left, RelativePair::HB) => GradedRanks::default(),
        (Side::Left, RelativePair::CB0) => GradedRanks::single(spec.index - 1),
    })
}

fn sign(k: u32) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `χ(Ω, Σ₀)`: interior points and boundary unstable points count with
/// sign `(-1)^k`, boundary stable points not at all.
pub fn relative_euler_characteristic(datum: &MorseDatum) -> i64 {
    datum
        .points
        .iter()
        .filter(|p| p.kind != PointKind::BoundaryStable)
        .map(|p| sign(p.index))
        .sum()
}

/// One generator per interior handle and per right half-handle.
pub fn generator_counts(datum: &MorseDatum) -> GradedRanks {
    let mut g = GradedRanks::default();
    for p in &datum.points {
        if p.kind != PointKind::BoundaryStable {
            g.bump(p.index);
        }
    }
    debug_assert_eq!(g.alternating_sum(), relative_euler_characteristic(datum));
    g
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryEffect {
    pub spec: HalfHandleSpec,
    /// Index of the ordinary handle added to `Y`.
    pub y_handle_index: u32,
    pub effect_on_sigma: String,
    /// Index of the surgery performed on `M`.
    pub m_surgery_index: u32,
    /// Index of the handle added to `Ω`, if any.
    pub omega_handle_index: Option<u32>,
}

pub fn surgery_effect_descriptor(spec: HalfHandleSpec) -> Result<SurgeryEffect, HomologyError> {
    spec.check()?;
    let (k, n) = (spec.index, spec.n);
    Ok(match spec.side {
        Side::Right => SurgeryEffect {
            spec,
            y_handle_index: k,
            effect_on_sigma: format!(
                "attach index-{k} handle N = D^{k} x D^{} along B0 = S^{} x D^{}",
                n - k,
                k as i64 - 1,
                n - k
            ),
            m_surgery_index: k,
            omega_handle_index: Some(k),
        },
        Side::Left => SurgeryEffect {
            spec,
            y_handle_index: k - 1,
            effect_on_sigma: format!(
                "detach index-{} handle (remove B = D^{} x D^{})",
                k - 1,
                k - 1,
                n + 1 - k
            ),
            m_surgery_index: k - 1,
            omega_handle_index: None,
        },
    })
}
