//! Size caps shared by every constructor that can blow up.

use std::sync::OnceLock;

/// Default bound on the number of elements of any lattice we build.
pub const DEFAULT_LATTICE_CAP: usize = 20_000;
/// Largest base set for which the full partition lattice is built.
pub const DEFAULT_PARTITION_CAP: usize = 8;
/// Largest algebra accepted by the congruence machinery.
pub const DEFAULT_ALGEBRA_CAP: usize = 12;
/// Largest universe of a power algebra `A^n(alpha)`.
pub const DEFAULT_POWER_CAP: usize = 4096;
/// Default number of term evaluations an exhaustive identity check may spend.
pub const DEFAULT_EVAL_BUDGET: u64 = 100_000_000;

/// The environment variable that overrides [`DEFAULT_LATTICE_CAP`].
pub const CAP_ENV: &str = "CONGFORGE_CAP";

/// Global lattice size cap, read once from `CONGFORGE_CAP` if set.
pub fn lattice_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_LATTICE_CAP)
    })
}
