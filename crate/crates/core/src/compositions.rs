//! Counting compositions of `k` with bounded parts.
//!
//! * `b(k, n, q)`: compositions of `k` into exactly `n` parts, each in `1..=q`.
//!   Equal to `C(n, q, k - n)` since `(x + ... + x^q)^n = x^n (1 + ... + x^{q-1})^n`.
//! * `a(k, n, q) = b(k, n, q) - b(k, n, q - 1)`: largest part exactly `q`.
//! * `b(k, q)`: any number of parts, each at most `q`, with generating
//!   function `(1 - x) / (1 - 2x + x^{q+1})`.
//! * `a(k, q) = b(k, q) - b(k, q - 1)`.
//!
//! `b(k, 0) = [k = 0]` and `b(k, n, 0) = [k = 0, n = 0]`, so the differences
//! are defined at `q = 1` as well.

use crate::error::{domain, Result};
use crate::exact::{coeff, Nat};

/// Compositions of `k` into exactly `n` parts, each between 1 and `q`.
pub fn b_knq(k: u64, n: u32, q: u32) -> Nat {
    if k < u64::from(n) {
        return Nat::new();
    }
    let shifted = i64::try_from(k - u64::from(n)).expect("k fits i64");
    coeff(n, q, shifted)
}

/// Compositions of `k` into exactly `n` parts whose largest part is `q`.
pub fn a_knq(k: u64, n: u32, q: u32) -> Nat {
    match q.checked_sub(1) {
        Some(below) => b_knq(k, n, q) - b_knq(k, n, below),
        None => b_knq(k, n, 0),
    }
}

/// `b(k, q)` for `k = 0..=k_max`.
///
/// Multiplying out `(1 - 2x + x^{q+1}) B(x) = 1 - x` gives
/// `b(k) = 2 b(k-1) - b(k-q-1) - [k = 1]` with `b(0) = 1` and `b(j) = 0`
/// for `j < 0`. The `[k = 1]` term is the numerator's `-x`.
pub fn b_kq_row(k_max: u64, q: u32) -> Vec<Nat> {
    let len = usize::try_from(k_max).expect("k_max exceeds addressable memory") + 1;
    let lag = q as usize + 1;
    let mut row: Vec<Nat> = Vec::with_capacity(len);
    row.push(Nat::from(1));
    for k in 1..len {
        let mut next = Nat::from(&row[k - 1] << 1u32);
        if k == 1 {
            next -= 1u32;
        }
        if k >= lag {
            next -= &row[k - lag];
        }
        row.push(next);
    }
    row
}

/// Compositions of `k` (any number of parts) whose largest part is `q`.
pub fn a_kq(k: u64, q: u32) -> Nat {
    let idx = usize::try_from(k).expect("k exceeds addressable memory");
    let upper = b_kq_row(k, q).swap_remove(idx);
    match q.checked_sub(1) {
        Some(below) => upper - b_kq_row(k, below).swap_remove(idx),
        None => upper,
    }
}

/// What the brute-force enumerator counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartConstraint {
    /// Every part is at most `q`.
    MaxPart(u32),
    /// The largest part is exactly `q`.
    ExactLargest(u32),
}

/// Largest `k` the enumerator accepts.
pub const MAX_ENUMERATION_K: u32 = 25;

/// Counts compositions of `k` by walking every one of them.
///
/// `n = None` counts over all part counts. Kept deliberately naive: it is the
/// ground truth the closed forms are checked against.
pub fn enumerate_oracle(k: u32, n: Option<u32>, constraint: PartConstraint) -> Result<Nat> {
    if k > MAX_ENUMERATION_K {
        return domain(format!("enumeration is limited to k <= {MAX_ENUMERATION_K}, got k = {k}"));
    }
    let (bound, exact) = match constraint {
        PartConstraint::MaxPart(q) => (q, false),
        PartConstraint::ExactLargest(q) => (q, true),
    };
    let mut count = 0u64;
    walk(k, 0, 0, bound, &mut |parts, largest| {
        if n.is_none_or(|n| n == parts) && (!exact || largest == bound) {
            count += 1;
        }
    });
    Ok(Nat::from(count))
}

fn walk(remaining: u32, parts: u32, largest: u32, bound: u32, visit: &mut impl FnMut(u32, u32)) {
    if remaining == 0 {
        visit(parts, largest);
        return;
    }
    for part in 1..=remaining.min(bound) {
        walk(remaining - part, parts + 1, largest.max(part), bound, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| Nat::from(x)).collect()
    }

    #[test]
    fn fixed_part_examples() {
        assert_eq!(b_knq(4, 2, 3), 3);
        assert_eq!(b_knq(3, 4, 5), 0);
        assert_eq!(b_knq(8, 4, 4), 31);
        assert_eq!(a_knq(8, 4, 3), 18);
        assert_eq!(a_knq(8, 4, 6), 0);
        assert_eq!(a_knq(4, 4, 1), 1);
        assert_eq!(a_knq(0, 0, 0), 1);
    }

    #[test]
    fn aggregated_examples() {
        assert_eq!(b_kq_row(4, 2), ints(&[1, 1, 2, 3, 5]));
        assert_eq!(b_kq_row(4, 4), ints(&[1, 1, 2, 4, 8]));
        assert_eq!(b_kq_row(4, 9), ints(&[1, 1, 2, 4, 8]));
        assert_eq!(b_kq_row(0, 3), ints(&[1]));
        assert_eq!(b_kq_row(5, 0), ints(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(a_kq(4, 2), 4);
        assert_eq!(a_kq(4, 4), 1);
        assert_eq!(a_kq(4, 5), 0);
        assert_eq!(a_kq(7, 1), 1);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(enumerate_oracle(5, None, PartConstraint::MaxPart(5)).unwrap(), 16);
        assert_eq!(enumerate_oracle(6, Some(3), PartConstraint::MaxPart(3)).unwrap(), 7);
        assert_eq!(enumerate_oracle(6, Some(3), PartConstraint::ExactLargest(3)).unwrap(), 6);
        assert_eq!(enumerate_oracle(0, None, PartConstraint::MaxPart(2)).unwrap(), 1);
        assert!(enumerate_oracle(26, None, PartConstraint::MaxPart(3)).is_err());
    }

    #[test]
    fn counters_match_enumeration() {
        for k in 0..=12u32 {
            for q in 0..=k + 1 {
                let k64 = u64::from(k);
                let agg_b = enumerate_oracle(k, None, PartConstraint::MaxPart(q)).unwrap();
                assert_eq!(b_kq_row(k64, q)[k as usize], agg_b, "b({k},{q})");
                if k >= 1 && q >= 1 {
                    let agg_a = enumerate_oracle(k, None, PartConstraint::ExactLargest(q)).unwrap();
                    assert_eq!(a_kq(k64, q), agg_a, "a({k},{q})");
                }
                for n in 1..=k {
                    let b = enumerate_oracle(k, Some(n), PartConstraint::MaxPart(q)).unwrap();
                    assert_eq!(b_knq(k64, n, q), b, "b({k},{n},{q})");
                    if q >= 1 {
                        let a = enumerate_oracle(k, Some(n), PartConstraint::ExactLargest(q)).unwrap();
                        assert_eq!(a_knq(k64, n, q), a, "a({k},{n},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn parts_sum_to_aggregate() {
        for q in 1..=10u32 {
            let row = b_kq_row(60, q);
            for k in 1..=60u64 {
                let total: Nat = (1..=k as u32).map(|n| b_knq(k, n, q)).sum();
                assert_eq!(total, row[k as usize], "k={k} q={q}");
            }
        }
    }

    proptest! {
        #[test]
        fn differences_telescope(k in 1u64..80, q in 1u32..20) {
            let total: Nat = (1..=q).map(|j| a_kq(k, j)).sum();
            prop_assert_eq!(total, b_kq_row(k, q).swap_remove(k as usize));
        }

        #[test]
        fn unrestricted_limit(k in 1u64..120) {
            let q = u32::try_from(k).unwrap();
            let expected = Nat::from(1) << (k as u32 - 1);
            prop_assert_eq!(b_kq_row(k, q).swap_remove(k as usize), expected);
        }
    }
}
