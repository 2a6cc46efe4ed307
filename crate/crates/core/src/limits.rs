use serde::{Deserialize, Serialize};

/// Resource caps shared by every refinement loop in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest precision (in bits) requested from any enclosure.
    pub precision_budget_bits: u64,
    /// Largest number of Engel digits extracted by any search.
    pub engel_depth_cap: usize,
    /// Largest |exponent| materialized as an exact power.
    pub exponent_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            precision_budget_bits: 4096,
            engel_depth_cap: 10_000,
            exponent_cap: 1_000_000,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> crate::Result<()> {
        if self.precision_budget_bits == 0 || self.engel_depth_cap == 0 || self.exponent_cap == 0 {
            return Err(crate::Error::invalid("all limits must be positive"));
        }
        Ok(())
    }
}
