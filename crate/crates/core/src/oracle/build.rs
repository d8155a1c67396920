//! Builds: an initial level set and a leveled list of attachments, replayed
//! exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::state::{Effect, OneManifoldState, Shape};
use super::OracleError;
use crate::level::Level;
use crate::model::{CobordismFlags, CriticalPoint, MorseDatum, PointKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttachKind {
    Interior,
    Right,
    Left,
}

/// Where and how a handle or half-handle is attached. Components are named
/// through marks they carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Site {
    /// Interior 0-handle: a new circle.
    Birth { marks: Vec<String> },
    /// Interior 1-handle with feet at two marks.
    Band { feet: [String; 2], twisted: bool },
    /// Interior 2-handle capping the circle through a mark.
    Cap { component: String },
    /// Right 0-half-handle: a new interval.
    HalfBirth { marks: Vec<String> },
    /// Right 1-half-handle joining two points of `M`.
    Join { from: String, to: String },
    /// Left 1-half-handle: an arc is removed just after a mark.
    Cut { at: String },
    /// Left 2-half-handle: a whole interval is removed.
    Detach { component: String },
}

impl Site {
    pub fn kind(&self) -> (AttachKind, u32) {
        match self {
            Site::Birth { .. } => (AttachKind::Interior, 0),
            Site::Band { .. } => (AttachKind::Interior, 1),
            Site::Cap { .. } => (AttachKind::Interior, 2),
            Site::HalfBirth { .. } => (AttachKind::Right, 0),
            Site::Join { .. } => (AttachKind::Right, 1),
            Site::Cut { .. } => (AttachKind::Left, 1),
            Site::Detach { .. } => (AttachKind::Left, 2),
        }
    }

    pub fn is_band(&self) -> bool {
        matches!(self, Site::Band { .. })
    }

    /// Marks that must exist when the site is applied.
    pub fn referenced_marks(&self) -> Vec<&str> {
        match self {
            Site::Birth { .. } | Site::HalfBirth { .. } => vec![],
            Site::Band { feet, .. } => vec![&feet[0], &feet[1]],
            Site::Cap { component } | Site::Detach { component } => vec![component],
            Site::Join { from, to } => vec![from, to],
            Site::Cut { at } => vec![at],
        }
    }

    pub fn apply(&self, state: &mut OneManifoldState) -> Result<Effect, OracleError> {
        match self {
            Site::Birth { marks } => state.create(Shape::Circle, marks.clone()),
            Site::Band { feet, twisted } => state.band(&feet[0], &feet[1], *twisted),
            Site::Cap { component } => state.delete(component, Shape::Circle),
            Site::HalfBirth { marks } => state.create(Shape::Interval, marks.clone()),
            Site::Join { from, to } => state.join(from, to),
            Site::Cut { at } => state.cut(at),
            Site::Detach { component } => state.delete(component, Shape::Interval),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildMove {
    pub level: Level,
    pub site: Site,
}

impl BuildMove {
    /// Contribution to `χ(Ω)`: `(-1)^k` for interior handles and right
    /// half-handles, nothing for left half-handles.
    pub fn chi_contribution(&self) -> i64 {
        match self.site.kind() {
            (AttachKind::Left, _) => 0,
            (_, k) => 1 - 2 * (k % 2) as i64,
        }
    }

    /// Contribution read from the top down: `(-1)^k` for interior handles and
    /// left half-handles.
    pub fn dual_chi_contribution(&self) -> i64 {
        match self.site.kind() {
            (AttachKind::Right, _) => 0,
            (_, k) => 1 - 2 * (k % 2) as i64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ComponentDoc {
    Bare(Shape),
    Marked { shape: Shape, marks: Vec<String> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveDoc {
    level: Level,
    kind: AttachKind,
    index: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feet: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    twisted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    at: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildDoc {
    sigma0: Vec<ComponentDoc>,
    #[serde(default)]
    moves: Vec<MoveDoc>,
}

fn need<T>(field: Option<T>, name: &str, i: usize) -> Result<T, OracleError> {
    field.ok_or_else(|| OracleError::SiteMismatch(format!("move {i}: missing field `{name}`")))
}

impl MoveDoc {
    fn to_move(self, i: usize) -> Result<BuildMove, OracleError> {
        let site = match (self.kind, self.index) {
            (AttachKind::Interior, 0) => Site::Birth {
                marks: self.marks.unwrap_or_default(),
            },
            (AttachKind::Interior, 1) => Site::Band {
                feet: need(self.feet, "feet", i)?,
                twisted: self.twisted,
            },
            (AttachKind::Interior, 2) => Site::Cap {
                component: need(self.component, "component", i)?,
            },
            (AttachKind::Right, 0) => Site::HalfBirth {
                marks: self.marks.unwrap_or_default(),
            },
            (AttachKind::Right, 1) => Site::Join {
                from: need(self.from, "from", i)?,
                to: need(self.to, "to", i)?,
            },
            (AttachKind::Left, 1) => Site::Cut {
                at: need(self.at, "at", i)?,
            },
            (AttachKind::Left, 2) => Site::Detach {
                component: need(self.component, "component", i)?,
            },
            (kind, k) => {
                return Err(OracleError::SiteMismatch(format!(
                    "move {i}: no {kind:?} attachment of index {k} on a surface"
                )))
            }
        };
        Ok(BuildMove {
            level: self.level,
            site,
        })
    }

    fn from_move(m: &BuildMove) -> Self {
        let (kind, index) = m.site.kind();
        let mut d = MoveDoc {
            level: m.level.clone(),
            kind,
            index,
            marks: None,
            feet: None,
            twisted: false,
            component: None,
            from: None,
            to: None,
            at: None,
        };
        match &m.site {
            Site::Birth { marks } | Site::HalfBirth { marks } => d.marks = Some(marks.clone()),
            Site::Band { feet, twisted } => {
                d.feet = Some(feet.clone());
                d.twisted = *twisted;
            }
            Site::Cap { component } | Site::Detach { component } => d.component = Some(component.clone()),
            Site::Join { from, to } => {
                d.from = Some(from.clone());
                d.to = Some(to.clone());
            }
            Site::Cut { at } => d.at = Some(at.clone()),
        }
        d
    }
}

/// How each attachment changed the level set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub move_index: usize,
    #[serde(flatten)]
    pub effect: Effect,
}

/// A connected component of `Ω`, assembled from the level-set components it
/// sweeps out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaComponent {
    pub level_components: Vec<usize>,
    pub moves: Vec<usize>,
    pub meets_y: bool,
    pub meets_sigma0: bool,
    pub meets_sigma1: bool,
    pub sigma0_circles: usize,
    pub sigma1_circles: usize,
    pub chi: i64,
}

impl OmegaComponent {
    pub fn is_closed(&self) -> bool {
        !self.meets_y && !self.meets_sigma0 && !self.meets_sigma1
    }

    /// Three boundary circles, one saddle and nothing else.
    pub fn is_pair_of_pants(&self) -> bool {
        !self.meets_y && self.sigma0_circles + self.sigma1_circles == 3 && self.chi == -1 && self.moves.len() == 1
    }
}

/// An initial level set `Σ₀` with leveled attachments and every
/// intermediate level set, cached at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismBuild {
    sigma0: OneManifoldState,
    moves: Vec<BuildMove>,
    states: Vec<OneManifoldState>,
    steps: Vec<Step>,
}

impl CobordismBuild {
    /// Validates levels (in `(0, 1)`, non-decreasing) and replays every
    /// attachment.
    pub fn new(sigma0: OneManifoldState, moves: Vec<BuildMove>) -> Result<Self, OracleError> {
        for (i, m) in moves.iter().enumerate() {
            if !m.level.in_open_unit() {
                return Err(OracleError::InvalidLevel(format!(
                    "move {i}: level {} outside (0,1)",
                    m.level
                )));
            }
            if i > 0 && m.level < moves[i - 1].level {
                return Err(OracleError::InvalidLevel(format!(
                    "move {i}: level {} below the previous level {}",
                    m.level,
                    moves[i - 1].level
                )));
            }
        }
        let (states, steps) = replay(&sigma0, &moves)?;
        Ok(CobordismBuild {
            sigma0,
            moves,
            states,
            steps,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let doc: BuildDoc = serde_json::from_str(text).map_err(|e| OracleError::Parse(e.to_string()))?;
        let sigma0 = OneManifoldState::new(
            doc.sigma0
                .into_iter()
                .map(|c| match c {
                    ComponentDoc::Bare(s) => (s, vec![]),
                    ComponentDoc::Marked { shape, marks } => (shape, marks),
                })
                .collect(),
        )?;
        let moves = doc
            .moves
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.to_move(i))
            .collect::<Result<Vec<_>, _>>()?;
        CobordismBuild::new(sigma0, moves)
    }

    pub fn to_json(&self) -> String {
        let doc = BuildDoc {
            sigma0: self
                .sigma0
                .components
                .iter()
                .map(|c| ComponentDoc::Marked {
                    shape: c.shape,
                    marks: c.marks.clone(),
                })
                .collect(),
            moves: self.moves.iter().map(MoveDoc::from_move).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("build serializes")
    }

    pub fn sigma0(&self) -> &OneManifoldState {
        &self.sigma0
    }

    pub fn moves(&self) -> &[BuildMove] {
        &self.moves
    }

    /// `states()[i]` is the level set after the first `i` attachments.
    pub fn states(&self) -> &[OneManifoldState] {
        &self.states
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn has_ties(&self) -> bool {
        self.moves.windows(2).any(|w| w[0].level == w[1].level)
    }

    /// The regular level carrying `states()[i]`: 0, the midpoints between
    /// consecutive attachment levels, and 1.
    pub fn state_level(&self, i: usize) -> Level {
        if i == 0 {
            Level::zero()
        } else if i == self.moves.len() {
            Level::one()
        } else {
            &(&self.moves[i - 1].level + &self.moves[i].level) / &Level::from_integer(2)
        }
    }

    /// Replays from `Σ₀` and compares with the cached states.
    pub fn verify_replay(&self) -> bool {
        replay(&self.sigma0, &self.moves)
            .map(|(s, _)| s == self.states)
            .unwrap_or(false)
    }

    /// `χ(Ω) = χ(Σ₀) + Σ (-1)^k` over interior handles and right
    /// half-handles.
    pub fn chi_omega(&self) -> i64 {
        self.sigma0.chi() + self.moves.iter().map(BuildMove::chi_contribution).sum::<i64>()
    }

    /// `χ(Ω)` recomputed by cutting along the level set after `i`
    /// attachments: the part above is counted upwards from `Σ_i`, the part
    /// below downwards from `Σ_i`, where left and right half-handles trade
    /// roles.
    pub fn chi_from_level(&self, i: usize) -> i64 {
        let below: i64 = self.moves[..i].iter().map(BuildMove::dual_chi_contribution).sum();
        let above: i64 = self.moves[i..].iter().map(BuildMove::chi_contribution).sum();
        self.states[i].chi() + below + above
    }

    pub fn omega_components(&self) -> Vec<OmegaComponent> {
        let total = self
            .states
            .iter()
            .flat_map(|s| s.components.iter().map(|c| c.id + 1))
            .max()
            .unwrap_or(0);
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for s in &self.steps {
            let ids: Vec<usize> = s.effect.inputs.iter().chain(&s.effect.outputs).copied().collect();
            for w in ids.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, OmegaComponent> = BTreeMap::new();
        let mut seen = vec![false; total];
        let last = self.states.len() - 1;
        for (si, state) in self.states.iter().enumerate() {
            for c in &state.components {
                let root = find(&mut parent, c.id);
                let g = groups.entry(root).or_insert_with(|| OmegaComponent {
                    level_components: vec![],
                    moves: vec![],
                    meets_y: false,
                    meets_sigma0: false,
                    meets_sigma1: false,
                    sigma0_circles: 0,
                    sigma1_circles: 0,
                    chi: 0,
                });
                if !seen[c.id] {
                    seen[c.id] = true;
                    g.level_components.push(c.id);
                }
                if c.shape == Shape::Interval {
                    g.meets_y = true;
                }
                if si == 0 {
                    g.meets_sigma0 = true;
                    g.chi += (c.shape == Shape::Interval) as i64;
                    g.sigma0_circles += (c.shape == Shape::Circle) as usize;
                }
                if si == last {
                    g.meets_sigma1 = true;
                    g.sigma1_circles += (c.shape == Shape::Circle) as usize;
                }
            }
        }
        for s in &self.steps {
            let any = s.effect.inputs.iter().chain(&s.effect.outputs).next().copied();
            // Every attachment touches at least one component: births create one,
            // deaths remove one.
            let root = find(&mut parent, any.expect("attachment touches a component"));
            let g = groups.get_mut(&root).expect("component recorded");
            g.moves.push(s.move_index);
            g.chi += self.moves[s.move_index].chi_contribution();
            if self.moves[s.move_index].site.kind().0 != AttachKind::Interior {
                g.meets_y = true;
            }
        }
        groups.into_values().collect()
    }

    pub fn flags(&self) -> CobordismFlags {
        let last = self.states.last().expect("at least one state");
        CobordismFlags {
            n: 1,
            closed_sigma0: self.sigma0.count(Shape::Circle) > 0,
            closed_sigma1: last.count(Shape::Circle) > 0,
            closed_omega: self.omega_components().iter().any(OmegaComponent::is_closed),
        }
    }

    /// The symbolic datum: one point `m{i}` per attachment, interior
    /// handles as interior points, right half-handles as boundary unstable
    /// and left half-handles as boundary stable points, valued at their
    /// levels.
    pub fn to_datum(&self) -> MorseDatum {
        let points = self
            .moves
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let (kind, k) = m.site.kind();
                let kind = match kind {
                    AttachKind::Interior => PointKind::Interior,
                    AttachKind::Right => PointKind::BoundaryUnstable,
                    AttachKind::Left => PointKind::BoundaryStable,
                };
                CriticalPoint::new(format!("m{i}"), kind, k, m.level.clone())
            })
            .collect();
        let mut d = MorseDatum::new(self.flags(), points, vec![]);
        d.same_level = self.has_ties();
        d
    }

    /// The same attachments in a new order with new levels.
    pub(crate) fn rebuilt(&self, moves: Vec<BuildMove>) -> Result<Self, OracleError> {
        CobordismBuild::new(self.sigma0.clone(), moves)
    }
}

fn replay(sigma0: &OneManifoldState, moves: &[BuildMove]) -> Result<(Vec<OneManifoldState>, Vec<Step>), OracleError> {
    let mut states = vec![sigma0.clone()];
    let mut steps = Vec::new();
    let mut current = sigma0.clone();
    for (i, m) in moves.iter().enumerate() {
        let effect = m.site.apply(&mut current).map_err(|e| e.at_move(i))?;
        steps.push(Step { move_index: i, effect });
        states.push(current.clone());
    }
    Ok((states, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::relative_euler_characteristic;
    use crate::model::validate;

    pub(crate) const PANTS: &str = r#"{
        "sigma0": [{"shape": "circle", "marks": ["p"]}, {"shape": "circle", "marks": ["q"]}],
        "moves": [{"level": "0.5", "kind": "interior", "index": 1, "feet": ["p", "q"]}]
    }"#;

    #[test]
    fn pair_of_pants() {
        let b = CobordismBuild::from_json(PANTS).unwrap();
        assert_eq!(b.chi_omega(), -1);
        assert_eq!(b.states()[1].count(Shape::Circle), 1);
        let omega = b.omega_components();
        assert_eq!(omega.len(), 1);
        assert!(omega[0].is_pair_of_pants() && !omega[0].meets_y);
        let f = b.flags();
        assert!(f.closed_sigma0 && f.closed_sigma1 && !f.closed_omega);
        let d = b.to_datum();
        assert!(validate(&d).is_empty());
        assert_eq!(relative_euler_characteristic(&d), b.chi_omega() - b.sigma0().chi());
    }

    #[test]
    fn trivial_and_product_builds() {
        let b = CobordismBuild::from_json(r#"{"sigma0": ["circle"]}"#).unwrap();
        assert_eq!(b.chi_omega(), 0);
        let b = CobordismBuild::from_json(
            r#"{"sigma0": [{"shape": "interval", "marks": ["a"]}],
                "moves": [{"level": "0.5", "kind": "left", "index": 2, "component": "a"}]}"#,
        )
        .unwrap();
        assert_eq!(b.moves()[0].chi_contribution(), 0);
        assert_eq!(b.chi_omega(), 1);
        assert!(b.states()[1].components.is_empty());
    }

    #[test]
    fn closed_omega_component() {
        let b = CobordismBuild::from_json(
            r#"{"sigma0": ["interval"],
                "moves": [{"level": "0.3", "kind": "interior", "index": 0, "marks": ["s"]},
                          {"level": "0.6", "kind": "interior", "index": 2, "component": "s"}]}"#,
        )
        .unwrap();
        assert!(b.flags().closed_omega);
        assert_eq!(b.chi_omega(), 3);
    }

    #[test]
    fn json_round_trip_and_replay() {
        let b = CobordismBuild::from_json(PANTS).unwrap();
        let again = CobordismBuild::from_json(&b.to_json()).unwrap();
        assert_eq!(b, again);
        assert!(b.verify_replay());
        for i in 0..=b.moves().len() {
            assert_eq!(b.chi_from_level(i), b.chi_omega());
        }
    }

    #[test]
    fn bad_documents() {
        assert!(matches!(
            CobordismBuild::from_json(r#"{"sigma0": [], "moves": [{"level": "1.5", "kind": "interior", "index": 0}]}"#),
            Err(OracleError::InvalidLevel(_))
        ));
        assert!(matches!(
            CobordismBuild::from_json(r#"{"sigma0": [], "moves": [{"level": "0.5", "kind": "left", "index": 0}]}"#),
            Err(OracleError::SiteMismatch(_))
        ));
        assert!(matches!(
            CobordismBuild::from_json(
                r#"{"sigma0": ["circle"], "moves": [{"level": "0.5", "kind": "interior", "index": 1, "feet": ["x", "y"]}]}"#
            ),
            Err(OracleError::AtMove(0, _))
        ));
        assert!(matches!(CobordismBuild::from_json("{"), Err(OracleError::Parse(_))));
    }
}
