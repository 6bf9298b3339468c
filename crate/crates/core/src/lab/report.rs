//! Outcome records for the machine checks.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Verified,
    Falsified,
    UndecidableAtPrecision,
    /// the hypothesis set is empty for these parameters (counts as verified)
    Vacuous,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub params: serde_json::Value,
    pub status: CheckStatus,
    /// indices found, lattice digests, element coefficients, counterexamples
    pub witness: serde_json::Value,
    pub precision: i64,
    pub millis: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Verified | CheckStatus::Vacuous)
    }
}
