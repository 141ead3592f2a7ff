//! Machine-readable bound reports shared by the divergence, typicality and
//! dilution layers.

use serde::Serialize;
use std::collections::BTreeMap;

/// One checked inequality `lhs <= rhs + tolerance` with its slack.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl BoundReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("tolerance".to_string(), serde_json::json!(tolerance));
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs <= rhs + tolerance,
            slack: rhs - lhs,
            params,
        }
    }

    pub fn with_param(mut self, key: &str, value: serde_json::Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn satisfied_tracks_tolerance() {
        let ok = BoundReport::new("x", 1.0, 1.0, 1e-9);
        assert!(ok.satisfied);
        assert_eq!(ok.slack, 0.0);
        let close = BoundReport::new("x", 1.0 + 5e-10, 1.0, 1e-9);
        assert!(close.satisfied);
        let bad = BoundReport::new("x", 1.1, 1.0, 1e-9);
        assert!(!bad.satisfied);
    }

    #[test]
    fn serializes_with_params() {
        let r = BoundReport::new("bound", 0.5, 1.0, 0.0).with_param("d_k", serde_json::json!(2));
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"d_k\":2"));
        assert!(s.contains("\"satisfied\":true"));
    }
}
