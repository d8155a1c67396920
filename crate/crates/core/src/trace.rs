//! Record of the moves applied to a datum.

use serde::Serialize;
use serde_json::Value;

use crate::homology::relative_euler_characteristic;
use crate::model::{DatumDocument, MorseDatum};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    #[serde(rename = "move")]
    pub name: String,
    pub params: Value,
    pub pre_hash: String,
    pub post_hash: String,
    pub chi_before: i64,
    pub chi_after: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub datum: DatumDocument,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub same_level: bool,
}

impl TraceEntry {
    pub fn conserves_chi(&self) -> bool {
        self.chi_before == self.chi_after
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MoveTrace {
    pub entries: Vec<TraceEntry>,
}

impl MoveTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, name: &str, params: Value, before: &MorseDatum, after: &MorseDatum, note: Option<String>) {
        self.entries.push(TraceEntry {
            name: name.to_string(),
            params,
            pre_hash: before.digest(),
            post_hash: after.digest(),
            chi_before: relative_euler_characteristic(before),
            chi_after: relative_euler_characteristic(after),
            note,
            datum: after.to_document(),
            same_level: after.same_level,
        });
    }

    pub fn extend(&mut self, other: MoveTrace) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn conserves_chi(&self) -> bool {
        self.entries.iter().all(TraceEntry::conserves_chi)
    }

    /// Every recorded intermediate datum, in order.
    pub fn snapshots(&self) -> impl Iterator<Item = MorseDatum> + '_ {
        self.entries.iter().map(|e| {
            let mut d = MorseDatum::from_document(e.datum.clone());
            d.same_level = e.same_level;
            d
        })
    }
}
