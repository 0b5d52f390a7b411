use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmetrics::PointSet;

/// A request located at a point of a (generalized) metric space.
///
/// `point` indexes into the [`PointSet`] the request lives in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedRequest {
    pub id: u64,
    pub point: usize,
    pub arrival: f64,
}

impl TimedRequest {
    pub fn new(id: u64, point: usize, arrival: f64) -> Self {
        Self { id, point, arrival }
    }
}

/// One request as stored on disk, with the point given by label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestEntry {
    pub id: u64,
    pub point: String,
    pub arrival: f64,
}

/// Parses a JSON array of [`RequestEntry`] against `points`.
pub fn requests_from_json(s: &str, points: &PointSet) -> Result<Vec<TimedRequest>> {
    let entries: Vec<RequestEntry> = serde_json::from_str(s)?;
    let mut seen = HashSet::new();
    entries
        .into_iter()
        .map(|e| {
            if !seen.insert(e.id) {
                return Err(Error::InvalidRequest(format!("duplicate request id {}", e.id)));
            }
            if !(e.arrival.is_finite() && e.arrival >= 0.0) {
                return Err(Error::InvalidRequest(format!("request {} has arrival {}", e.id, e.arrival)));
            }
            Ok(TimedRequest::new(e.id, points.index_of(&e.point)?, e.arrival))
        })
        .collect()
}

pub fn requests_to_json(requests: &[TimedRequest], points: &PointSet) -> Result<String> {
    let entries: Vec<RequestEntry> = requests
        .iter()
        .map(|r| RequestEntry { id: r.id, point: points.label(r.point).to_string(), arrival: r.arrival })
        .collect();
    Ok(serde_json::to_string_pretty(&entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let points = PointSet::new(["a", "b"]).unwrap();
        let reqs = vec![TimedRequest::new(0, 1, 0.5), TimedRequest::new(3, 0, 1.0)];
        let json = requests_to_json(&reqs, &points).unwrap();
        assert_eq!(requests_from_json(&json, &points).unwrap(), reqs);
    }

    #[test]
    fn rejects_bad_entries() {
        let points = PointSet::new(["a"]).unwrap();
        assert!(requests_from_json(r#"[{"id":0,"point":"z","arrival":0}]"#, &points).is_err());
        assert!(requests_from_json(r#"[{"id":0,"point":"a","arrival":-1}]"#, &points).is_err());
        let dup = r#"[{"id":0,"point":"a","arrival":0},{"id":0,"point":"a","arrival":1}]"#;
        assert!(requests_from_json(dup, &points).is_err());
    }
}
