//! Enumeration budgets.
//!
//! Exhaustive sweeps (corpus enumeration, brute-force path sums, probe runs)
//! check their work estimate against a budget before starting. The default
//! can be overridden with the `AUTOMATA_BUDGET` environment variable.

use crate::{Error, Result};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Current enumeration budget: `AUTOMATA_BUDGET` if set and parseable,
/// otherwise [`DEFAULT_ENUMERATION_BUDGET`].
pub fn enumeration_budget() -> u128 {
    std::env::var("AUTOMATA_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

/// Errors with [`Error::BudgetExceeded`] when `needed` exceeds the budget.
pub fn check(needed: u128) -> Result<()> {
    let budget = enumeration_budget();
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Like [`check`] but against an explicit cap instead of the global budget.
pub fn check_against(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
