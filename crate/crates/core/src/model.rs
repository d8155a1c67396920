//! Symbolic Morse data on a cobordism of manifolds with boundary.
//!
//! A [`MorseDatum`] records the combinatorial shadow of a Morse function `F`
//! on a cobordism `(Ω, Y)` between `(Σ₀, M₀)` and `(Σ₁, M₁)`: the ambient
//! dimension, the critical points with their kind, index and value, the
//! gradient trajectories known to connect them, and flags declaring closed
//! components. Trajectories are explicit data; nothing here infers a flow line.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::level::Level;
use crate::table;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Interior,
    BoundaryStable,
    BoundaryUnstable,
}

impl PointKind {
    pub const ALL: [PointKind; 3] = [
        PointKind::Interior,
        PointKind::BoundaryStable,
        PointKind::BoundaryUnstable,
    ];

    /// Admissible Morse indices for this kind when `dim Σ = n`.
    pub fn index_range(self, n: u32) -> std::ops::RangeInclusive<u32> {
        match self {
            PointKind::Interior => 0..=n + 1,
            PointKind::BoundaryStable => 1..=n + 1,
            PointKind::BoundaryUnstable => 0..=n,
        }
    }

    pub fn is_boundary(self) -> bool {
        !matches!(self, PointKind::Interior)
    }

    pub fn label(self) -> &'static str {
        match self {
            PointKind::Interior => "interior",
            PointKind::BoundaryStable => "b. stable",
            PointKind::BoundaryUnstable => "b. unstable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPoint {
    pub id: PointId,
    pub kind: PointKind,
    pub index: u32,
    pub value: Level,
}

impl CriticalPoint {
    pub fn new(id: impl Into<String>, kind: PointKind, index: u32, value: Level) -> Self {
        CriticalPoint {
            id: PointId(id.into()),
            kind,
            index,
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub from: PointId,
    pub to: PointId,
    pub multiplicity: u32,
}

impl Trajectory {
    pub fn new(from: impl Into<String>, to: impl Into<String>, multiplicity: u32) -> Self {
        Trajectory {
            from: PointId(from.into()),
            to: PointId(to.into()),
            multiplicity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFlags {
    pub closed_sigma0: bool,
    pub closed_sigma1: bool,
    pub closed_omega: bool,
}

/// Dimension of `Σ` together with the declared closed-component flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CobordismFlags {
    pub n: u32,
    pub closed_sigma0: bool,
    pub closed_sigma1: bool,
    pub closed_omega: bool,
}

impl CobordismFlags {
    pub fn open(n: u32) -> Self {
        CobordismFlags {
            n,
            closed_sigma0: false,
            closed_sigma1: false,
            closed_omega: false,
        }
    }

    pub fn any_closed(&self) -> bool {
        self.closed_sigma0 || self.closed_sigma1 || self.closed_omega
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseDatum {
    pub flags: CobordismFlags,
    pub points: Vec<CriticalPoint>,
    pub trajectories: Vec<Trajectory>,
    /// Set only while interior index-1 points are parked on one level during
    /// the `n = 1` relabelling; every other move requires it cleared.
    pub same_level: bool,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("boundary index {index} out of range 0..={n}")]
    IndexOutOfRange { index: u32, n: u32 },
    #[error("boundary value {0} outside (0,1)")]
    ValueOutOfRange(Level),
    #[error("boundary values are not pairwise distinct ({0})")]
    DuplicateValue(Level),
    #[error("n must be at least 1")]
    ZeroDimension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    DimensionZero,
    DuplicateId {
        point: PointId,
    },
    IndexOutOfRange {
        point: PointId,
        kind: PointKind,
        index: u32,
    },
    ValueOutOfRange {
        point: PointId,
        value: Level,
    },
    SharedValue {
        first: PointId,
        second: PointId,
        value: Level,
    },
    UnknownEndpoint {
        from: PointId,
        to: PointId,
        missing: PointId,
    },
    ZeroMultiplicity {
        from: PointId,
        to: PointId,
    },
    SelfLoop {
        point: PointId,
    },
    DuplicateTrajectory {
        from: PointId,
        to: PointId,
    },
    NotIncreasing {
        from: PointId,
        to: PointId,
    },
    Inadmissible {
        from: PointId,
        to: PointId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionZero => write!(f, "n must be at least 1"),
            Violation::DuplicateId { point } => write!(f, "point id {point} used twice"),
            Violation::IndexOutOfRange { point, kind, index } => {
                write!(f, "{point}: index {index} not allowed for {}", kind.label())
            }
            Violation::ValueOutOfRange { point, value } => {
                write!(f, "{point}: value {value} outside (0,1)")
            }
            Violation::SharedValue { first, second, value } => {
                write!(f, "{first} and {second} share the value {value}")
            }
            Violation::UnknownEndpoint { from, to, missing } => {
                write!(f, "trajectory {from}->{to}: unknown point {missing}")
            }
            Violation::ZeroMultiplicity { from, to } => {
                write!(f, "trajectory {from}->{to}: multiplicity must be positive")
            }
            Violation::SelfLoop { point } => write!(f, "trajectory from {point} to itself"),
            Violation::DuplicateTrajectory { from, to } => {
                write!(f, "trajectory {from}->{to} recorded twice")
            }
            Violation::NotIncreasing { from, to } => {
                write!(f, "trajectory {from}->{to}: F does not increase")
            }
            Violation::Inadmissible { from, to } => {
                write!(f, "trajectory {from}->{to}: excluded by the Morse-Smale table")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundarySign {
    AllStable,
    AllUnstable,
}

impl MorseDatum {
    pub fn empty(flags: CobordismFlags) -> Self {
        MorseDatum {
            flags,
            points: Vec::new(),
            trajectories: Vec::new(),
            same_level: false,
        }
    }

    pub fn new(flags: CobordismFlags, points: Vec<CriticalPoint>, trajectories: Vec<Trajectory>) -> Self {
        MorseDatum {
            flags,
            points,
            trajectories,
            same_level: false,
        }
    }

    pub fn n(&self) -> u32 {
        self.flags.n
    }

    pub fn point(&self, id: &PointId) -> Option<&CriticalPoint> {
        self.points.iter().find(|p| &p.id == id)
    }

    pub fn point_mut(&mut self, id: &PointId) -> Option<&mut CriticalPoint> {
        self.points.iter_mut().find(|p| &p.id == id)
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.point(id).is_some()
    }

    pub fn trajectories_touching<'a>(&'a self, id: &'a PointId) -> impl Iterator<Item = &'a Trajectory> + 'a {
        self.trajectories.iter().filter(move |t| &t.from == id || &t.to == id)
    }

    /// Points sorted by value, ties broken by id.
    pub fn points_by_value(&self) -> Vec<&CriticalPoint> {
        let mut pts: Vec<_> = self.points.iter().collect();
        pts.sort_by(|a, b| a.value.cmp(&b.value).then_with(|| a.id.cmp(&b.id)));
        pts
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }

    /// Short content hash of the canonical document form.
    pub fn digest(&self) -> String {
        let doc = serde_json::to_string(&self.to_document()).expect("datum serializes");
        let hash = Sha256::digest(doc.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_document(&self) -> DatumDocument {
        DatumDocument {
            n: self.flags.n,
            flags: ClosedFlags {
                closed_sigma0: self.flags.closed_sigma0,
                closed_sigma1: self.flags.closed_sigma1,
                closed_omega: self.flags.closed_omega,
            },
            points: self.points.clone(),
            trajectories: self.trajectories.clone(),
        }
    }

    pub fn from_document(doc: DatumDocument) -> Self {
        MorseDatum {
            flags: CobordismFlags {
                n: doc.n,
                closed_sigma0: doc.flags.closed_sigma0,
                closed_sigma1: doc.flags.closed_sigma1,
                closed_omega: doc.flags.closed_omega,
            },
            points: doc.points,
            trajectories: doc.trajectories,
            same_level: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: DatumDocument = serde_json::from_str(text)?;
        Ok(Self::from_document(doc))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("datum serializes")
    }
}

/// On-disk form of a datum. Unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDocument {
    pub n: u32,
    pub flags: ClosedFlags,
    pub points: Vec<CriticalPoint>,
    pub trajectories: Vec<Trajectory>,
}

/// Lists every broken structural invariant of `datum`. An empty list means
/// the datum is valid.
pub fn validate(datum: &MorseDatum) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = datum.n();
    if n == 0 {
        out.push(Violation::DimensionZero);
    }

    let mut by_id: HashMap<&PointId, &CriticalPoint> = HashMap::new();
    for p in &datum.points {
        if by_id.insert(&p.id, p).is_some() {
            out.push(Violation::DuplicateId { point: p.id.clone() });
        }
        if !p.kind.index_range(n).contains(&p.index) {
            out.push(Violation::IndexOutOfRange {
                point: p.id.clone(),
                kind: p.kind,
                index: p.index,
            });
        }
        if !p.value.in_open_unit() {
            out.push(Violation::ValueOutOfRange {
                point: p.id.clone(),
                value: p.value.clone(),
            });
        }
    }

    if !datum.same_level {
        let mut seen: BTreeMap<&Level, &PointId> = BTreeMap::new();
        for p in &datum.points {
            if let Some(first) = seen.insert(&p.value, &p.id) {
                out.push(Violation::SharedValue {
                    first: first.clone(),
                    second: p.id.clone(),
                    value: p.value.clone(),
                });
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for t in &datum.trajectories {
        if !pairs.insert((&t.from, &t.to)) {
            out.push(Violation::DuplicateTrajectory {
                from: t.from.clone(),
                to: t.to.clone(),
            });
        }
        if t.multiplicity == 0 {
            out.push(Violation::ZeroMultiplicity {
                from: t.from.clone(),
                to: t.to.clone(),
            });
        }
        if t.from == t.to {
            out.push(Violation::SelfLoop { point: t.from.clone() });
            continue;
        }
        let (Some(src), Some(dst)) = (by_id.get(&t.from), by_id.get(&t.to)) else {
            let missing = if by_id.contains_key(&t.from) { &t.to } else { &t.from };
            out.push(Violation::UnknownEndpoint {
                from: t.from.clone(),
                to: t.to.clone(),
                missing: missing.clone(),
            });
            continue;
        };
        if src.value >= dst.value {
            out.push(Violation::NotIncreasing {
                from: t.from.clone(),
                to: t.to.clone(),
            });
        }
        let valid_kinds = src.kind.index_range(n).contains(&src.index) && dst.kind.index_range(n).contains(&dst.index);
        if valid_kinds && n > 0 {
            // A trajectory from p2 to p1 needs W^s(p1) ∩ W^u(p2) non-empty.
            let ok = table::admissible((dst.kind, dst.index), (src.kind, src.index), n).unwrap_or(false);
            if !ok {
                out.push(Violation::Inadmissible {
                    from: t.from.clone(),
                    to: t.to.clone(),
                });
            }
        }
    }
    out
}

/// Extends a Morse function on `Y` to `Ω`. With [`BoundarySign::AllStable`]
/// every boundary critical point of index `k` becomes boundary stable of
/// index `k + 1`; with [`BoundarySign::AllUnstable`] it stays at index `k`.
pub fn lift_boundary_datum(
    boundary_points: &[(u32, Level)],
    sign: BoundarySign,
    flags: CobordismFlags,
) -> Result<MorseDatum, ModelError> {
    let n = flags.n;
    if n == 0 {
        return Err(ModelError::ZeroDimension);
    }
    let mut seen = BTreeSet::new();
    let mut points = Vec::with_capacity(boundary_points.len());
    for (i, (index, value)) in boundary_points.iter().enumerate() {
        if *index > n {
            return Err(ModelError::IndexOutOfRange { index: *index, n });
        }
        if !value.in_open_unit() {
            return Err(ModelError::ValueOutOfRange(value.clone()));
        }
        if !seen.insert(value.clone()) {
            return Err(ModelError::DuplicateValue(value.clone()));
        }
        let (kind, idx) = match sign {
            BoundarySign::AllStable => (PointKind::BoundaryStable, index + 1),
            BoundarySign::AllUnstable => (PointKind::BoundaryUnstable, *index),
        };
        points.push(CriticalPoint::new(format!("y{}", i + 1), kind, idx, value.clone()));
    }
    Ok(MorseDatum::new(flags, points, Vec::new()))
}
