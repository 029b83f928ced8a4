//! Pass/fail records produced by the verification routines.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{QPoly, Series};

/// One checked instance of an identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub identity: String,
    pub indices: Value,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<QPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<QPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Exact comparison. Both sides are kept only when they differ.
    pub fn compare(identity: impl Into<String>, indices: Value, lhs: &QPoly, rhs: &QPoly) -> Self {
        let pass = lhs == rhs;
        CheckRecord {
            identity: identity.into(),
            indices,
            pass,
            lhs: (!pass).then(|| lhs.clone()),
            rhs: (!pass).then(|| rhs.clone()),
            note: None,
        }
    }

    /// Coefficientwise comparison up to the smaller of the two orders.
    pub fn compare_series(identity: impl Into<String>, indices: Value, lhs: &Series, rhs: &Series) -> Self {
        let order = lhs.order().min(rhs.order());
        Self::compare(
            identity,
            indices,
            lhs.truncate(order).poly(),
            rhs.truncate(order).poly(),
        )
    }

    /// A record for a check that has no polynomial sides.
    pub fn boolean(identity: impl Into<String>, indices: Value, pass: bool, note: Option<String>) -> Self {
        CheckRecord {
            identity: identity.into(),
            indices,
            pass,
            lhs: None,
            rhs: None,
            note,
        }
    }

    /// A failing record carrying an error message.
    pub fn error(identity: impl Into<String>, indices: Value, err: impl std::fmt::Display) -> Self {
        Self::boolean(identity, indices, false, Some(err.to_string()))
    }
}

pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.pass)
}
