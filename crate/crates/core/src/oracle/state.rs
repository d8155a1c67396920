//! Compact 1-manifolds with named marks and the attachment effects on them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Circle,
    Interval,
}

/// A component with marks in order: from the in-end to the out-end of an
/// interval, or cyclically around a circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub id: usize,
    pub shape: Shape,
    pub marks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneManifoldState {
    pub components: Vec<Component>,
    #[serde(skip)]
    next_id: usize,
}

/// What an attachment consumed and produced, by component id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Effect {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum End {
    In,
    Out,
    /// Just after the cut at a foot.
    After(usize),
    /// Just before the cut at a foot.
    Before(usize),
}

struct Segment {
    start: End,
    marks: Vec<String>,
    end: End,
}

impl OneManifoldState {
    pub fn new(shapes: Vec<(Shape, Vec<String>)>) -> Result<Self, OracleError> {
        let mut s = OneManifoldState {
            components: Vec::new(),
            next_id: 0,
        };
        for (shape, marks) in shapes {
            s.create(shape, marks)?;
        }
        Ok(s)
    }

    pub fn chi(&self) -> i64 {
        self.count(Shape::Interval) as i64
    }

    /// Number of points of `M`: two per interval.
    pub fn boundary_points(&self) -> usize {
        2 * self.count(Shape::Interval)
    }

    pub fn count(&self, shape: Shape) -> usize {
        self.components.iter().filter(|c| c.shape == shape).count()
    }

    pub fn component(&self, id: usize) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn locate(&self, mark: &str) -> Result<&Component, OracleError> {
        self.components
            .iter()
            .find(|c| c.marks.iter().any(|m| m == mark))
            .ok_or_else(|| OracleError::UnknownMark(mark.to_string()))
    }

    fn all_marks(&self) -> BTreeSet<&str> {
        self.components
            .iter()
            .flat_map(|c| c.marks.iter().map(String::as_str))
            .collect()
    }

    fn push(&mut self, shape: Shape, marks: Vec<String>) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        self.components.push(Component { id, shape, marks });
        id
    }

    fn remove(&mut self, id: usize) -> Component {
        let i = self
            .components
            .iter()
            .position(|c| c.id == id)
            .expect("component present");
        self.components.remove(i)
    }

    /// A new component: a circle for an interior 0-handle, an interval for a
    /// right 0-half-handle.
    pub fn create(&mut self, shape: Shape, marks: Vec<String>) -> Result<Effect, OracleError> {
        let existing = self.all_marks();
        let mut fresh = BTreeSet::new();
        for m in &marks {
            if existing.contains(m.as_str()) || !fresh.insert(m.as_str()) {
                return Err(OracleError::DuplicateMark(m.clone()));
            }
        }
        let id = self.push(shape, marks);
        Ok(Effect {
            inputs: vec![],
            outputs: vec![id],
        })
    }

    /// Removes the component through `mark`, which must have `shape`: a
    /// circle capped by an interior 2-handle, or a whole interval detached by
    /// a left 2-half-handle.
    pub fn delete(&mut self, mark: &str, shape: Shape) -> Result<Effect, OracleError> {
        let c = self.locate(mark)?;
        if c.shape != shape {
            return Err(OracleError::SiteMismatch(format!(
                "component through {mark} is a {:?}, expected a {:?}",
                c.shape, shape
            )));
        }
        let id = c.id;
        self.remove(id);
        Ok(Effect {
            inputs: vec![id],
            outputs: vec![],
        })
    }

    /// Joins the out-end of the interval through `from` to the in-end of the
    /// interval through `to` (a right 1-half-handle).
    pub fn join(&mut self, from: &str, to: &str) -> Result<Effect, OracleError> {
        let a = self.locate(from)?.clone();
        let b = self.locate(to)?.clone();
        for c in [&a, &b] {
            if c.shape != Shape::Interval {
                return Err(OracleError::SiteMismatch(format!(
                    "right 1-half-handle needs endpoints, component {} is a circle",
                    c.id
                )));
            }
        }
        self.remove(a.id);
        let out = if a.id == b.id {
            self.push(Shape::Circle, a.marks)
        } else {
            self.remove(b.id);
            let mut marks = a.marks;
            marks.extend(b.marks);
            self.push(Shape::Interval, marks)
        };
        Ok(Effect {
            inputs: if a.id == b.id { vec![a.id] } else { vec![a.id, b.id] },
            outputs: vec![out],
        })
    }

    /// Cuts the component through `at` just after that mark (a left
    /// 1-half-handle removes an arc there).
    pub fn cut(&mut self, at: &str) -> Result<Effect, OracleError> {
        let c = self.locate(at)?.clone();
        let i = c.marks.iter().position(|m| m == at).expect("mark located");
        self.remove(c.id);
        let outputs = match c.shape {
            Shape::Interval => {
                let (a, b) = c.marks.split_at(i + 1);
                vec![
                    self.push(Shape::Interval, a.to_vec()),
                    self.push(Shape::Interval, b.to_vec()),
                ]
            }
            Shape::Circle => {
                let mut marks = c.marks[i + 1..].to_vec();
                marks.extend_from_slice(&c.marks[..=i]);
                vec![self.push(Shape::Interval, marks)]
            }
        };
        Ok(Effect {
            inputs: vec![c.id],
            outputs,
        })
    }

    /// Surgery along an interior 1-handle with feet at marks `p` and `q`.
    ///
    /// The components through the feet are cut open at both feet into
    /// segments, and the band reglues them crosswise: leaving a segment just
    /// before one foot continues just after the other foot. The resulting
    /// strands are traced into intervals (from in-ends) and circles (the
    /// rest). The feet marks are consumed. With the feet on
    ///
    /// * one circle `[p A q B]`: circles `A` and `B`;
    /// * two circles `[p A]`, `[q B]`: the circle `A B`;
    /// * one interval `[A p X q B]`: the interval `A B` and the circle `X`;
    /// * two intervals `[A p B]`, `[C q D]`: intervals `A D` and `C B`;
    /// * a circle `[p X]` and an interval `[A q B]`: the interval `A X B`.
    ///
    /// Regluing end to end instead would reverse an orientation.
    pub fn band(&mut self, p: &str, q: &str, twisted: bool) -> Result<Effect, OracleError> {
        if twisted {
            return Err(OracleError::NonOrientable);
        }
        if p == q {
            return Err(OracleError::SiteMismatch(format!("band feet coincide at {p}")));
        }
        let cp = self.locate(p)?.clone();
        let cq = self.locate(q)?.clone();
        let feet = [p, q];
        let involved: Vec<Component> = if cp.id == cq.id { vec![cp] } else { vec![cp, cq] };

        let mut segments: Vec<Segment> = Vec::new();
        for c in &involved {
            let cuts: Vec<(usize, usize)> = c
                .marks
                .iter()
                .enumerate()
                .filter_map(|(i, m)| feet.iter().position(|f| *f == m).map(|f| (i, f)))
                .collect();
            match c.shape {
                Shape::Interval => {
                    let mut start = End::In;
                    let mut from = 0;
                    for &(i, f) in &cuts {
                        segments.push(Segment {
                            start,
                            marks: c.marks[from..i].to_vec(),
                            end: End::Before(f),
                        });
                        start = End::After(f);
                        from = i + 1;
                    }
                    segments.push(Segment {
                        start,
                        marks: c.marks[from..].to_vec(),
                        end: End::Out,
                    });
                }
                Shape::Circle => {
                    for (j, &(i, f)) in cuts.iter().enumerate() {
                        let (next_i, next_f) = cuts[(j + 1) % cuts.len()];
                        let marks = if next_i > i {
                            c.marks[i + 1..next_i].to_vec()
                        } else {
                            let mut m = c.marks[i + 1..].to_vec();
                            m.extend_from_slice(&c.marks[..next_i]);
                            m
                        };
                        segments.push(Segment {
                            start: End::After(f),
                            marks,
                            end: End::Before(next_f),
                        });
                    }
                }
            }
        }

        let starting: BTreeMap<End, usize> = segments.iter().enumerate().map(|(i, s)| (s.start, i)).collect();
        let next = |end: End| -> Option<usize> {
            match end {
                End::Before(f) => starting.get(&End::After(1 - f)).copied(),
                _ => None,
            }
        };

        for c in &involved {
            self.remove(c.id);
        }
        let mut used = vec![false; segments.len()];
        let mut outputs = Vec::new();
        let trace = |first: usize, used: &mut Vec<bool>| -> (Vec<String>, bool) {
            let mut marks = Vec::new();
            let mut i = first;
            loop {
                used[i] = true;
                marks.extend(segments[i].marks.iter().cloned());
                match next(segments[i].end) {
                    Some(j) if j == first => return (marks, false),
                    Some(j) => i = j,
                    None => return (marks, true),
                }
            }
        };
        let interval_starts: Vec<usize> = (0..segments.len()).filter(|&i| segments[i].start == End::In).collect();
        let mut traced = Vec::new();
        for i in interval_starts {
            let (marks, open) = trace(i, &mut used);
            debug_assert!(open);
            traced.push((Shape::Interval, marks));
        }
        for i in 0..segments.len() {
            if !used[i] {
                let (marks, _) = trace(i, &mut used);
                traced.push((Shape::Circle, marks));
            }
        }
        for (shape, marks) in traced {
            outputs.push(self.push(shape, marks));
        }
        Ok(Effect {
            inputs: involved.iter().map(|c| c.id).collect(),
            outputs,
        })
    }
}
