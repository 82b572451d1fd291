//! Exact engines for `C(n, q, k)`.
//!
//! Three routes compute the same numbers:
//!
//! * the row recurrence over `n` (a sliding window of width `q`, so each
//!   cell costs one big-integer addition and one subtraction),
//! * the alternating binomial sum
//!   `sum_i (-1)^i C(n, i) C(n + k - iq - 1, n - 1)`,
//! * the trigonometric integral in [`crate::quadrature`], evaluated at
//!   high precision (a numerical cross-check only).
//!
//! `q = 0` is treated as the zero polynomial, so `C(n, 0, k) = [n = 0, k = 0]`.
//! That convention keeps the largest-part differences in
//! [`crate::compositions`] total.

use std::fmt;

use rug::ops::Pow;
use rug::Integer;

use crate::error::{domain, Result};

pub use crate::quadrature::coeff_quadrature;

/// Arbitrary-precision nonnegative integer.
pub type Nat = Integer;

/// One full coefficient row of `(1 + x + ... + x^{q-1})^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffRow {
    n: u32,
    q: u32,
    coeffs: Vec<Nat>,
}

impl CoeffRow {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `(q - 1) n`, the largest exponent with a nonzero coefficient.
    pub fn degree(&self) -> u64 {
        degree(self.n, self.q)
    }

    pub fn coeffs(&self) -> &[Nat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Nat> {
        self.coeffs
    }

    /// Coefficient at `k`, zero outside the support.
    pub fn get(&self, k: i64) -> Nat {
        usize::try_from(k).ok().and_then(|k| self.coeffs.get(k)).cloned().unwrap_or_default()
    }

    /// Largest coefficient of the row.
    pub fn max(&self) -> &Nat {
        self.coeffs.iter().max().expect("rows are never empty")
    }

    pub fn sum(&self) -> Nat {
        self.coeffs.iter().sum()
    }
}

fn degree(n: u32, q: u32) -> u64 {
    u64::from(q.saturating_sub(1)) * u64::from(n)
}

/// Columns `0..=min(cap, (q-1)n)` of the coefficient row, built by the
/// first-order recurrence over `n`. Column `j` of row `n` only depends on
/// columns `<= j` of row `n - 1`, so truncating at `cap` is exact.
fn dp_prefix(n: u32, q: u32, cap: u64) -> Vec<Nat> {
    debug_assert!(q >= 1);
    let width = (q - 1) as usize;
    let cap = usize::try_from(cap).expect("column cap exceeds addressable memory");
    let mut row = vec![Nat::from(1)];
    for step in 1..=n as usize {
        let len = (width * step).min(cap) + 1;
        let mut next = Vec::with_capacity(len);
        let mut window = Nat::new();
        for k in 0..len {
            if let Some(v) = row.get(k) {
                window += v;
            }
            if k >= q as usize {
                if let Some(v) = row.get(k - q as usize) {
                    window -= v;
                }
            }
            next.push(window.clone());
        }
        row = next;
    }
    row
}

/// Full coefficient row of `(1 + x + ... + x^{q-1})^n`.
pub fn coeff_row(n: u32, q: u32) -> Result<CoeffRow> {
    if q == 0 {
        return domain("coeff_row requires q >= 1");
    }
    let coeffs = dp_prefix(n, q, degree(n, q));
    Ok(CoeffRow { n, q, coeffs })
}

/// `C(n, q, k)`; zero for `k < 0` or `k > (q-1)n`.
///
/// Uses the palindromic symmetry to move `k` to the left half of the row and
/// then runs the row recurrence only up to column `k`.
pub fn coeff(n: u32, q: u32, k: i64) -> Nat {
    if q == 0 {
        return Nat::from(u32::from(n == 0 && k == 0));
    }
    let deg = degree(n, q);
    let Ok(k) = u64::try_from(k) else {
        return Nat::new();
    };
    if k > deg {
        return Nat::new();
    }
    let k = k.min(deg - k);
    dp_prefix(n, q, k).swap_remove(k as usize)
}

/// Number of terms the alternating sum needs for `(n, q, k)`.
pub(crate) fn altsum_terms(n: u32, q: u32, k: u64) -> u64 {
    if q == 0 || n == 0 || k > degree(n, q) {
        return 0;
    }
    u64::from(n).min(k / u64::from(q)) + 1
}

/// `C(n, q, k)` from `sum_{i>=0} (-1)^i C(n, i) C(n + k - iq - 1, n - 1)`.
///
/// Terms with `iq > k` vanish, so the sum stops at `i = min(n, k / q)`.
/// Intermediate partial sums are signed; the result is not.
pub fn coeff_altsum(n: u32, q: u32, k: u64) -> Nat {
    if q == 0 {
        return Nat::from(u32::from(n == 0 && k == 0));
    }
    if n == 0 {
        return Nat::from(u32::from(k == 0));
    }
    if k > degree(n, q) {
        return Nat::new();
    }
    let top = u64::from(n).min(k / u64::from(q));
    let mut sum = Integer::new();
    let mut choose_n_i = Integer::from(1);
    for i in 0..=top {
        let upper = u64::from(n) + k - i * u64::from(q) - 1;
        let mut term = Integer::from(upper).binomial(n - 1);
        term *= &choose_n_i;
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        // C(n, i + 1) = C(n, i) (n - i) / (i + 1), exact.
        choose_n_i *= u64::from(n) - i;
        choose_n_i /= i + 1;
    }
    debug_assert!(sum >= 0, "alternating sum went negative: {sum}");
    sum
}

/// Binomial coefficient `C(n, k)`, zero for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> Nat {
    let Ok(k) = u64::try_from(k) else {
        return Nat::new();
    };
    if k > n {
        return Nat::new();
    }
    let k = k.min(n - k);
    let k = u32::try_from(k).expect("binomial lower index exceeds u32");
    Integer::from(n).binomial(k)
}

/// The four classical identities checked on one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `C(n,q,k) = sum_{i<q} C(n-1,q,k-i)`
    QTermRecurrence,
    /// `C(n,q,k) = C(n-1,q,k) + C(n,q,k-1) - C(n-1,q,k-q)`
    ThreeTermRecurrence,
    /// `C(n,q,k) = C(n,q,(q-1)n-k)`
    Symmetry,
    /// `sum_k C(n,q,k) = q^n`
    RowSum,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Identity::QTermRecurrence => "q-term recurrence",
            Identity::ThreeTermRecurrence => "three-term recurrence",
            Identity::Symmetry => "symmetry",
            Identity::RowSum => "row sum",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub n: u32,
    pub q: u32,
    pub recurrence_ok: bool,
    pub three_term_ok: bool,
    pub symmetry_ok: bool,
    pub row_sum_ok: bool,
    /// Earliest failing identity and the column where it failed (`None` for
    /// the row sum, which has no column).
    pub first_failure: Option<(Identity, Option<u64>)>,
}

impl IdentityReport {
    pub fn all_ok(&self) -> bool {
        self.recurrence_ok && self.three_term_ok && self.symmetry_ok && self.row_sum_ok
    }
}

/// Checks the q-term recurrence, the three-term recurrence, palindromic
/// symmetry and the row sum on row `n` (against row `n - 1`).
pub fn check_identities(n: u32, q: u32) -> Result<IdentityReport> {
    if n == 0 {
        return domain("check_identities requires n >= 1");
    }
    if q < 2 {
        return domain("check_identities requires q >= 2");
    }
    let cur = coeff_row(n, q)?;
    let prev = coeff_row(n - 1, q)?;
    Ok(identities_on_rows(&cur, &prev))
}

fn identities_on_rows(cur: &CoeffRow, prev: &CoeffRow) -> IdentityReport {
    let (n, q) = (cur.n(), cur.q());
    let deg = cur.degree() as i64;
    let mut report = IdentityReport {
        n,
        q,
        recurrence_ok: true,
        three_term_ok: true,
        symmetry_ok: true,
        row_sum_ok: true,
        first_failure: None,
    };
    let fail = |report: &mut IdentityReport, which: Identity, k: Option<u64>| {
        match which {
            Identity::QTermRecurrence => report.recurrence_ok = false,
            Identity::ThreeTermRecurrence => report.three_term_ok = false,
            Identity::Symmetry => report.symmetry_ok = false,
            Identity::RowSum => report.row_sum_ok = false,
        }
        if report.first_failure.is_none() {
            report.first_failure = Some((which, k));
        }
    };
    for k in 0..=deg {
        let value = cur.get(k);
        let q_term: Nat = (0..i64::from(q)).map(|i| prev.get(k - i)).sum();
        if q_term != value {
            fail(&mut report, Identity::QTermRecurrence, Some(k as u64));
        }
        let three = prev.get(k) + cur.get(k - 1) - prev.get(k - i64::from(q));
        if three != value {
            fail(&mut report, Identity::ThreeTermRecurrence, Some(k as u64));
        }
        if cur.get(deg - k) != value {
            fail(&mut report, Identity::Symmetry, Some(k as u64));
        }
    }
    if cur.sum() != Integer::from(q).pow(n) {
        fail(&mut report, Identity::RowSum, None);
    }
    report
}
