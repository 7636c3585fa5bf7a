//! Budgets that guard dense allocations and brute-force enumerations.

/// Default cap on the number of enumerated index strings.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_BUDGET`].
pub const ENUM_BUDGET_ENV: &str = "RN_ENUM_BUDGET";

/// Largest joint Hilbert dimension `d_S * d_R` the dense oracle accepts.
pub const DEFAULT_ORACLE_CAP: usize = 64;

/// Default memory budget for reservoir-network construction, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Enumeration budget, honouring `RN_ENUM_BUDGET` when it parses as an integer.
pub fn enumeration_budget() -> u64 {
    std::env::var(ENUM_BUDGET_ENV).ok().and_then(|v| v.trim().parse::<u64>().ok()).unwrap_or(DEFAULT_ENUM_BUDGET)
}

/// `base^exp` saturating at `u64::MAX`.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base as u64) {
            Some(v) => v,
            None => return u64::MAX,
        };
    }
    acc
}
