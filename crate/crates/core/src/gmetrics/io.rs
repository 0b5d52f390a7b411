//! JSON interchange for tables.

use serde::{Deserialize, Serialize};

use super::{HMetricTable, PointSet};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub multiset: Vec<String>,
    pub d: f64,
}

/// `{ "k": int, "points": [string], "entries": [{ "multiset": [...], "d": number }] }`
///
/// Entries may list raw tuples in any order; permutations of one multiset
/// must carry the same value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub k: usize,
    pub points: Vec<String>,
    pub entries: Vec<TableEntry>,
}

impl TableFile {
    pub fn from_table(table: &HMetricTable) -> Self {
        Self {
            k: table.k(),
            points: table.points().labels().to_vec(),
            entries: table
                .multisets()
                .map(|m| TableEntry { multiset: m.labelled(table.points()), d: table.get(&m) })
                .collect(),
        }
    }

    pub fn into_table(self) -> Result<HMetricTable> {
        let points = PointSet::new(self.points)?;
        let entries = self
            .entries
            .into_iter()
            .map(|e| {
                let idx = e.multiset.iter().map(|l| points.index_of(l)).collect::<Result<Vec<_>>>()?;
                Ok((idx, e.d))
            })
            .collect::<Result<Vec<_>>>()?;
        HMetricTable::from_entries(self.k, points, entries)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl HMetricTable {
    pub fn from_json(s: &str) -> Result<Self> {
        TableFile::from_json(s)?.into_table()
    }

    pub fn to_json(&self) -> Result<String> {
        TableFile::from_table(self).to_json()
    }
}
