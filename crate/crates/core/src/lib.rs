//! Evaluation, closed-form constant bounds, extremal search and lemma checks
//! for the series inequality
//!
//! ```text
//! ∑ aₙᵖAₙ^q (∑_{k≥n} aₖ^{1+p/q})ʳ ≤ K(p,q,r) ∑ (aₙᵖAₙ^q)^{1+r/q},   Aₙ = a₁ + … + aₙ,
//! ```
//!
//! over finite nonnegative sequences.
//!
//! - [`sequence`]: both sides of the main form, its reversed (tail-sum)
//!   form, and the related prefix-weighted instances.
//! - [`bounds`]: every closed-form upper bound on `K(p,q,r)` and the best
//!   of them, with derivation trees.
//! - [`search`]: seeded simplex search for large ratios (lower bounds on `K`).
//! - [`verify`]: checks of the auxiliary inequalities and randomized suites.

pub mod bounds;
pub mod error;
pub mod numeric;
pub mod parallel;
pub mod search;
pub mod sequence;
pub mod verify;

pub use bounds::{
    bennett_bound, best_bound, c_delta, case_p1_bound, cor0_bound, k_r1_bound, minimize_c_delta, reduction_exponents,
    reduction_small_r, thm2_bound, BoundEngine, BoundValue, DeltaInterval, DeltaMinimum, Detail, Rule,
};
pub use error::{IneqError, Result};
pub use parallel::Parallelism;
pub use search::{local_refine, search_lower_bound, SearchConfig, SearchOutcome};
pub use sequence::{
    ctz_exponents, evaluate_ctz, evaluate_dual, evaluate_eq3, evaluate_littlewood, evaluate_main, partial_sums,
    CtzExponents, ParamTriple, RatioEval, Sequence,
};
pub use verify::{
    check_copson, check_copson_dual, check_tail_bound, check_tail_bound_finite, run_suite, suite_instance, CheckReport,
    Suite, SuiteSummary, Witness,
};
