//! Polynomial coefficients `C(n, q, k) = [x^k] (1 + x + ... + x^{q-1})^n`.
//!
//! The crate is split along the lines of what each part computes:
//!
//! * [`exact`] holds the exact engines (sliding-window row recurrence, the
//!   alternating binomial sum, and a high-precision trigonometric integral)
//!   together with the classical identity checks.
//! * [`saddle`] solves the saddle-point equation of
//!   `f(z) = ((1 - z^q) / (1 - z))^n` and evaluates the resulting
//!   asymptotic estimates in log-space.
//! * [`compositions`] counts compositions with bounded or exactly-bounded
//!   largest part, including a brute-force enumerator used as an oracle.
//! * [`unimodality`] turns q-indexed count sequences into unimodality
//!   verdicts and runs the scans over `n` (or `k`).
//!
//! Exact values are [`Nat`]s (GMP integers); real values are MPFR floats
//! ([`Real`]) whose working precision is always passed explicitly as a
//! [`Precision`].

pub mod compositions;
pub mod error;
pub mod exact;
pub mod quadrature;
pub mod real;
pub mod saddle;
pub mod unimodality;

pub use error::{Error, Result};
pub use exact::{
    binomial, check_identities, coeff, coeff_altsum, coeff_quadrature, coeff_row, CoeffRow, IdentityReport,
    Nat,
};
pub use real::{Precision, Real};
pub use saddle::{
    approx_root, baseline_estimate, corollary35_estimate, hayman_estimate, lemma33_bound_check,
    log_deriv_ratio, ratio_table, solve_saddle, ApproxVariant, BaselineKind, Estimate, SaddlePoint,
};
pub use unimodality::{
    conjecture_scan, or_scan, predicted_q, surrogate_t_analysis, verdict, CellBudget, UnimodalityReport,
};
