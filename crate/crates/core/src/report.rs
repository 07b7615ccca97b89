//! Report documents written by every operation.
//!
//! A report is one JSON object with the fields `tool_version`, `group`,
//! `operation`, `params`, `seed`, `result` and `elapsed_ms`, in that order.
//! `elapsed_ms` is the only field that varies between identical runs;
//! [`Report::canonical_json`] leaves it out.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::Group;
use crate::TOOL_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEcho {
    pub spec: String,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub group: Option<GroupEcho>,
    pub operation: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub result: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(
        operation: &str,
        group: Option<(&str, &Group)>,
        params: serde_json::Value,
        seed: Option<u64>,
        result: &impl Serialize,
    ) -> Result<Self> {
        Ok(Self {
            tool_version: TOOL_VERSION.to_string(),
            group: group.map(|(spec, g)| GroupEcho {
                spec: spec.to_string(),
                order: g.order(),
            }),
            operation: operation.to_string(),
            params,
            seed,
            result: serde_json::to_value(result)?,
            elapsed_ms: None,
        })
    }

    pub fn with_elapsed(mut self, ms: u64) -> Self {
        self.elapsed_ms = Some(ms);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report without its timing field, for comparisons and hashing.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.elapsed_ms = None;
        copy.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `"p/q"` in lowest terms (`"1"` for one).
pub fn ratio_string(r: &Ratio<u128>) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GroupSpec;
    use crate::density::{exact_density, DEFAULT_DENSITY_BUDGET};
    use serde_json::json;

    #[test]
    fn round_trip_and_field_order() {
        let g = GroupSpec::Symmetric(3).build().unwrap();
        let d = exact_density(&g, 2, DEFAULT_DENSITY_BUDGET).unwrap();
        let r = Report::new("density", Some(("S3", &g)), json!({"k": 2}), None, &d)
            .unwrap()
            .with_elapsed(5);
        let text = r.to_json();
        assert_eq!(Report::from_json(&text).unwrap(), r);
        let keys = ["tool_version", "group", "operation", "params", "seed", "result", "elapsed_ms"];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(!r.canonical_json().contains("elapsed_ms"));
        assert_eq!(ratio_string(&d.exact().unwrap()), "3/4");
    }
}
