//! Closed level components, split certificates and band reordering.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::build::{BuildMove, CobordismBuild, Site};
use super::state::{OneManifoldState, Shape};
use super::OracleError;
use crate::level::Level;
use crate::model::{MorseDatum, PointId};
use crate::moves::{MoveError, OracleCertificate, SplitAuthority, SplitCertificate, SplitPlan};

/// A circle in the level set at a regular level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedLevel {
    pub level: Level,
    pub state: usize,
    pub component: usize,
    pub marks: Vec<String>,
}

/// Every circle of every cached level set, bottom to top.
pub fn detect_closed_levels(build: &CobordismBuild) -> Vec<ClosedLevel> {
    let mut out = Vec::new();
    for (i, s) in build.states().iter().enumerate() {
        for c in s.components.iter().filter(|c| c.shape == Shape::Circle) {
            out.push(ClosedLevel {
                level: build.state_level(i),
                state: i,
                component: c.id,
                marks: c.marks.clone(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Refusal {
    /// Other attachments share the level, so it is not a level of a single
    /// critical point.
    SameLevel { others: Vec<usize> },
    /// Both feet lie on circles: the critical level component is closed.
    ClosedCriticalComponent { components: Vec<usize>, diagnosis: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SplitVerdict {
    Certified {
        move_index: usize,
        level: Level,
        reason: String,
    },
    Refused {
        move_index: usize,
        level: Level,
        refusal: Refusal,
    },
}

impl SplitVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, SplitVerdict::Certified { .. })
    }

    pub fn move_index(&self) -> usize {
        match self {
            SplitVerdict::Certified { move_index, .. } | SplitVerdict::Refused { move_index, .. } => *move_index,
        }
    }
}

fn feet(site: &Site) -> Option<&[String; 2]> {
    match site {
        Site::Band { feet, .. } => Some(feet),
        _ => None,
    }
}

fn foot_on_interval<'a>(state: &OneManifoldState, feet: &'a [String; 2]) -> Option<&'a str> {
    feet.iter()
        .find(|f| state.locate(f).map(|c| c.shape == Shape::Interval).unwrap_or(false))
        .map(String::as_str)
}

fn verdict(build: &CobordismBuild, i: usize) -> SplitVerdict {
    let m = &build.moves()[i];
    let level = m.level.clone();
    let feet = feet(&m.site).expect("band");
    let others: Vec<usize> = (0..build.moves().len())
        .filter(|&j| j != i && build.moves()[j].level == m.level)
        .collect();
    if !others.is_empty() {
        return SplitVerdict::Refused {
            move_index: i,
            level,
            refusal: Refusal::SameLevel { others },
        };
    }
    let below = &build.states()[i];
    if let Some(f) = foot_on_interval(below, feet) {
        return SplitVerdict::Certified {
            move_index: i,
            level,
            reason: format!("foot {f} lies on an interval, so the critical level component meets Y"),
        };
    }
    let mut components: Vec<usize> = feet.iter().filter_map(|f| below.locate(f).ok()).map(|c| c.id).collect();
    components.dedup();
    let mut diagnosis = format!("the critical level component through m{i} is a union of closed circles");
    if let Some(omega) = build.omega_components().into_iter().find(|o| o.moves.contains(&i)) {
        if omega.is_pair_of_pants() {
            diagnosis.push_str(" (pair-of-pants configuration: the level through the saddle is closed and Y is empty)");
        } else if !omega.meets_y {
            diagnosis.push_str("; its component of Omega does not meet Y");
        }
    }
    SplitVerdict::Refused {
        move_index: i,
        level,
        refusal: Refusal::ClosedCriticalComponent { components, diagnosis },
    }
}

/// Verdicts for the interior 1-handles at `level`, optionally only those
/// whose feet lie on the component through the mark `component`.
pub fn certify_split(
    build: &CobordismBuild,
    level: &Level,
    component: Option<&str>,
) -> Result<Vec<SplitVerdict>, OracleError> {
    let picked: Vec<usize> = (0..build.moves().len())
        .filter(|&i| {
            let m = &build.moves()[i];
            let Some(feet) = feet(&m.site) else {
                return false;
            };
            if &m.level != level {
                return false;
            }
            match component {
                None => true,
                Some(mark) => {
                    let below = &build.states()[i];
                    let target = below.locate(mark).map(|c| c.id).ok();
                    feet.iter()
                        .any(|f| f == mark || below.locate(f).map(|c| c.id).ok() == target && target.is_some())
                }
            }
        })
        .collect();
    if picked.is_empty() {
        return Err(OracleError::UnknownSite(match component {
            Some(c) => format!("no interior 1-handle at level {level} on the component through {c}"),
            None => format!("no interior 1-handle at level {level}"),
        }));
    }
    Ok(picked.into_iter().map(|i| verdict(build, i)).collect())
}

/// Verdicts for every interior 1-handle, bottom to top.
pub fn certify_all(build: &CobordismBuild) -> Vec<SplitVerdict> {
    (0..build.moves().len())
        .filter(|&i| build.moves()[i].site.is_band())
        .map(|i| verdict(build, i))
        .collect()
}

/// A build whose interior 1-handles have been redistributed over their
/// slots so that every one of them is certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reordered {
    pub build: CobordismBuild,
    /// `origin[j]` is the index in the original build of the move at `j`.
    pub origin: Vec<usize>,
    /// Original indices of the interior 1-handles, bottom to top.
    pub order: Vec<usize>,
    pub verdicts: Vec<SplitVerdict>,
}

struct Search<'a> {
    moves: &'a [BuildMove],
    bands: Vec<usize>,
    dead: HashSet<(usize, u64)>,
}

impl Search<'_> {
    // Band surgeries at distinct feet commute, so the level set at a slot is
    // determined by which bands were placed below it.
    fn run(&mut self, pos: usize, mask: u64, state: OneManifoldState, order: &mut Vec<usize>) -> bool {
        if pos == self.moves.len() {
            return true;
        }
        if !self.moves[pos].site.is_band() {
            let mut next = state;
            return self.moves[pos].site.apply(&mut next).is_ok() && self.run(pos + 1, mask, next, order);
        }
        if self.dead.contains(&(pos, mask)) {
            return false;
        }
        for bi in 0..self.bands.len() {
            if mask & (1 << bi) != 0 {
                continue;
            }
            let site = &self.moves[self.bands[bi]].site;
            if foot_on_interval(&state, feet(site).expect("band")).is_none() {
                continue;
            }
            let mut next = state.clone();
            if site.apply(&mut next).is_err() {
                continue;
            }
            order.push(self.bands[bi]);
            if self.run(pos + 1, mask | (1 << bi), next, order) {
                return true;
            }
            order.pop();
        }
        self.dead.insert((pos, mask));
        false
    }
}

/// Levels made strictly increasing: each run of equal levels is spread
/// evenly below the next distinct level (or 1).
fn spread_ties(levels: &[Level]) -> Vec<Level> {
    let mut out = levels.to_vec();
    let mut i = 0;
    while i < levels.len() {
        let mut j = i;
        while j + 1 < levels.len() && levels[j + 1] == levels[i] {
            j += 1;
        }
        let v = &levels[i];
        let w = levels.get(j + 1).cloned().unwrap_or_else(Level::one);
        let m = (j - i + 1) as i64;
        let gap = &(&w - v) / &Level::from_integer(m + 1);
        for r in 0..m {
            out[i + r as usize] = v + &(&gap * &Level::from_integer(r));
        }
        i = j + 1;
    }
    out
}

/// Searches for an assignment of the interior 1-handles to their slots in
/// which each has a foot on an interval of the level set below, trying
/// earlier handles first, then spreads tied levels apart.
pub fn reorder(build: &CobordismBuild) -> Result<Reordered, OracleError> {
    let moves = build.moves();
    let bands: Vec<usize> = (0..moves.len()).filter(|&i| moves[i].site.is_band()).collect();
    if bands.len() > 64 {
        return Err(OracleError::Stuck(format!(
            "{} interior 1-handles exceed the search limit of 64",
            bands.len()
        )));
    }
    let mut search = Search {
        moves,
        bands: bands.clone(),
        dead: HashSet::new(),
    };
    let mut order = Vec::new();
    if !search.run(0, 0, build.sigma0().clone(), &mut order) {
        return Err(OracleError::Stuck(format!(
            "no order of the interior 1-handles {} puts a foot of each on an interval",
            bands.iter().map(|i| format!("m{i}")).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut origin: Vec<usize> = (0..moves.len()).collect();
    for (slot, &b) in bands.iter().zip(&order) {
        origin[*slot] = b;
    }
    let levels = spread_ties(&moves.iter().map(|m| m.level.clone()).collect::<Vec<_>>());
    let rebuilt = origin
        .iter()
        .zip(levels)
        .map(|(&o, level)| BuildMove {
            level,
            site: moves[o].site.clone(),
        })
        .collect();
    let rebuilt = build.rebuilt(rebuilt)?;
    let verdicts = certify_all(&rebuilt);
    Ok(Reordered {
        build: rebuilt,
        origin,
        order,
        verdicts,
    })
}

/// Certifies splits of the interior 1-handles of a datum produced by
/// [`CobordismBuild::to_datum`] from the replayed surface.
#[derive(Clone, Debug)]
pub struct OracleAuthority {
    build: CobordismBuild,
}

impl OracleAuthority {
    pub fn new(build: CobordismBuild) -> Self {
        OracleAuthority { build }
    }

    fn move_of(&self, id: &PointId) -> Result<usize, MoveError> {
        let i = id
            .as_str()
            .strip_prefix('m')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i < self.build.moves().len() && self.build.moves()[i].site.is_band());
        i.ok_or_else(|| MoveError::BuildMismatch(format!("{id} is not an interior 1-handle of the build")))
    }

    fn diagnosis(&self, stuck: &OracleError) -> String {
        for v in certify_all(&self.build) {
            if let SplitVerdict::Refused {
                move_index,
                refusal: Refusal::ClosedCriticalComponent { diagnosis, .. },
                ..
            } = v
            {
                return format!("cannot certify the split of m{move_index}: {diagnosis}");
            }
        }
        stuck.to_string()
    }
}

impl SplitAuthority for OracleAuthority {
    fn precheck(&self, _datum: &MorseDatum) -> Result<(), MoveError> {
        Ok(())
    }

    fn plan(&self, _datum: &MorseDatum, candidates: &[PointId]) -> Result<SplitPlan, MoveError> {
        let wanted: BTreeMap<usize, PointId> = candidates
            .iter()
            .map(|id| self.move_of(id).map(|i| (i, id.clone())))
            .collect::<Result<_, _>>()?;
        let r = reorder(&self.build).map_err(|e| MoveError::Obstruction(self.diagnosis(&e)))?;
        let mut certificates = BTreeMap::new();
        for v in &r.verdicts {
            let original = r.origin[v.move_index()];
            let Some(id) = wanted.get(&original) else {
                continue;
            };
            match v {
                SplitVerdict::Certified { level, reason, .. } => {
                    certificates.insert(
                        id.clone(),
                        SplitCertificate::OracleBased(OracleCertificate {
                            level: level.clone(),
                            move_index: original,
                            reason: reason.clone(),
                        }),
                    );
                }
                SplitVerdict::Refused { .. } => {
                    return Err(MoveError::Obstruction(format!(
                        "m{original} is refused after reordering"
                    )));
                }
            }
        }
        let order = r.order.iter().filter_map(|i| wanted.get(i).cloned()).collect();
        Ok(SplitPlan {
            order: Some(order),
            certificates,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{normal_form, FlagAuthority};

    pub(crate) const FIG10_SAME_LEVEL: &str = r#"{
        "sigma0": [{"shape": "interval", "marks": ["a1", "a2", "b1", "b2"]}],
        "moves": [
            {"level": "0.5", "kind": "interior", "index": 1, "feet": ["a1", "b1"]},
            {"level": "0.5", "kind": "interior", "index": 1, "feet": ["a2", "b2"]}
        ]
    }"#;

    const PANTS: &str = r#"{
        "sigma0": [{"shape": "circle", "marks": ["p"]}, {"shape": "circle", "marks": ["q"]}],
        "moves": [{"level": "0.5", "kind": "interior", "index": 1, "feet": ["p", "q"]}]
    }"#;

    const FAILING_ORDER: &str = r#"{
        "sigma0": [{"shape": "interval", "marks": ["a1", "a2", "x", "b2", "c", "b1", "y", "d"]}],
        "moves": [
            {"level": "0.2", "kind": "interior", "index": 1, "feet": ["a1", "b1"]},
            {"level": "0.4", "kind": "interior", "index": 1, "feet": ["a2", "b2"]},
            {"level": "0.6", "kind": "interior", "index": 1, "feet": ["x", "y"]},
            {"level": "0.8", "kind": "interior", "index": 1, "feet": ["c", "d"]}
        ]
    }"#;

    fn lv(s: &str) -> Level {
        s.parse().unwrap()
    }

    #[test]
    fn same_level_placement_is_refused_and_reordering_certifies() {
        let b = CobordismBuild::from_json(FIG10_SAME_LEVEL).unwrap();
        let closed = detect_closed_levels(&b);
        assert_eq!(closed.len(), 1);
        assert_eq!(closed[0].level, lv("0.5"));
        assert_eq!(b.states()[1].count(Shape::Circle), 1);
        let v = certify_split(&b, &lv("0.5"), None).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| matches!(
            v,
            SplitVerdict::Refused {
                refusal: Refusal::SameLevel { .. },
                ..
            }
        )));
        let r = reorder(&b).unwrap();
        assert!(!r.build.has_ties());
        assert_eq!(r.verdicts.len(), 2);
        assert!(r.verdicts.iter().all(SplitVerdict::is_certified));
        assert_eq!(r.build.chi_omega(), b.chi_omega());
    }

    #[test]
    fn naive_order_refuses_and_reordering_fixes_it() {
        let b = CobordismBuild::from_json(FAILING_ORDER).unwrap();
        let v = certify_all(&b);
        assert!(v[0].is_certified());
        assert!(!v[1].is_certified());
        let r = reorder(&b).unwrap();
        assert!(r.verdicts.iter().all(SplitVerdict::is_certified));
        assert_ne!(r.order, vec![0, 1, 2, 3]);
        assert_eq!(
            r.build.states().last().unwrap().count(Shape::Interval),
            b.states().last().unwrap().count(Shape::Interval)
        );
        assert_eq!(
            r.build.states().last().unwrap().count(Shape::Circle),
            b.states().last().unwrap().count(Shape::Circle)
        );
    }

    #[test]
    fn pair_of_pants_is_refused() {
        let b = CobordismBuild::from_json(PANTS).unwrap();
        let v = certify_split(&b, &lv("0.5"), Some("p")).unwrap();
        match &v[0] {
            SplitVerdict::Refused {
                refusal: Refusal::ClosedCriticalComponent { diagnosis, .. },
                ..
            } => assert!(diagnosis.contains("pair-of-pants")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(reorder(&b), Err(OracleError::Stuck(_))));
        assert_eq!(detect_closed_levels(&b).len(), 3);
    }

    #[test]
    fn interval_supported_points_are_certified() {
        let b = CobordismBuild::from_json(
            r#"{"sigma0": [{"shape": "interval", "marks": ["a", "b"]}, {"shape": "interval", "marks": ["c"]}],
                "moves": [{"level": "0.5", "kind": "interior", "index": 1, "feet": ["a", "c"]}]}"#,
        )
        .unwrap();
        assert!(certify_all(&b).iter().all(SplitVerdict::is_certified));
        assert!(detect_closed_levels(&b).is_empty());
        assert!(matches!(
            certify_split(&b, &lv("0.4"), None),
            Err(OracleError::UnknownSite(_))
        ));
    }

    #[test]
    fn authority_in_the_pipeline() {
        let pants = CobordismBuild::from_json(PANTS).unwrap();
        let err = normal_form(&pants.to_datum(), &OracleAuthority::new(pants.clone())).unwrap_err();
        assert!(
            matches!(&err, MoveError::Obstruction(m) if m.contains("pair-of-pants")),
            "{err}"
        );
        assert!(matches!(
            normal_form(&pants.to_datum(), &FlagAuthority),
            Err(MoveError::Obstruction(_))
        ));

        let b = CobordismBuild::from_json(FAILING_ORDER).unwrap();
        let nf = normal_form(&b.to_datum(), &OracleAuthority::new(b.clone())).unwrap();
        assert!(nf.decomposition.verify(&nf.datum).is_ok());
        assert_eq!(
            nf.trace.names().into_iter().filter(|n| *n == "split_interior").count(),
            4
        );
    }

    #[test]
    fn ties_spread() {
        let l = spread_ties(&[lv("0.5"), lv("0.5"), lv("0.8")]);
        assert_eq!(l, vec![lv("0.5"), lv("0.6"), lv("0.8")]);
        let l = spread_ties(&[lv("0.5"), lv("0.5")]);
        assert_eq!(l, vec![lv("0.5"), lv("2/3")]);
    }
}
