//! Budget guard for exhaustive enumerations.
//!
//! Every enumeration entry point charges the shared counter per visited
//! object and fails deterministically once the cap is hit. When the total
//! demand is known up front (Gaussian binomial counts), it is reported in
//! the error so the caller can see what would have been required.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Default cap on visited objects per run.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("enumeration budget of {limit} exceeded{}", match required { Some(r) => format!(" (run would visit {r} objects)"), None => String::new() })]
pub struct BudgetExceeded {
    pub limit: u64,
    pub required: Option<u128>,
}

#[derive(Clone)]
pub struct Budget {
    limit: u64,
    used: Arc<AtomicU64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget {
            limit,
            used: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn unlimited() -> Budget {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Charge `n` visited objects.
    pub fn charge(&self, n: u64) -> Result<(), BudgetExceeded> {
        let prev = self.used.fetch_add(n, Ordering::Relaxed);
        if prev.saturating_add(n) > self.limit {
            return Err(BudgetExceeded {
                limit: self.limit,
                required: None,
            });
        }
        Ok(())
    }

    /// Fail up front when the known total demand exceeds the budget.
    pub fn require(&self, total: u128) -> Result<(), BudgetExceeded> {
        if total > (self.limit - self.used().min(self.limit)) as u128 {
            return Err(BudgetExceeded {
                limit: self.limit,
                required: Some(total),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charges_until_cap() {
        let b = Budget::new(10);
        assert!(b.charge(6).is_ok());
        assert!(b.charge(4).is_ok());
        assert!(b.charge(1).is_err());
    }

    #[test]
    fn require_reports_demand() {
        let b = Budget::new(10);
        let err = b.require(1000).unwrap_err();
        assert_eq!(err.required, Some(1000));
    }
}
