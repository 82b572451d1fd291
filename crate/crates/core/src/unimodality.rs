//! Unimodality verdicts for q-indexed count sequences and the scans built on
//! them.
//!
//! Unimodality is plateau tolerant: a sequence is unimodal when it never
//! rises strictly after having fallen strictly. Exact integer sequences can
//! tie at the top, so the maximiser is a set.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::compositions::b_kq_row;
use crate::error::{domain, Error, Result};
use crate::exact::{altsum_terms, coeff_altsum, Nat};
use crate::real::{Precision, Real};

/// A strict rise at `index` after the sequence had strictly fallen at
/// `fell_at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Violation {
    pub index: u64,
    pub fell_at: u64,
}

/// Predicted maximiser set and how the observed one relates to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub predicted: Vec<u64>,
    /// Some maximiser is predicted.
    pub hit_any: bool,
    /// Every maximiser is predicted.
    pub hit_all: bool,
}

impl Prediction {
    /// Both strengths at once: the maximiser set meets the predicted set and
    /// lies inside it.
    pub fn hit(&self) -> bool {
        self.hit_any && self.hit_all
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodalityReport {
    pub label: String,
    /// `(index, value)` pairs; empty when the producer did not retain them.
    pub sequence: Vec<(u64, Nat)>,
    pub is_unimodal: bool,
    /// Every index attaining the maximum, ascending.
    pub argmax: Vec<u64>,
    pub first_violation: Option<Violation>,
    pub prediction: Option<Prediction>,
}

impl UnimodalityReport {
    /// Attaches a predicted maximiser set.
    pub fn with_prediction(mut self, predicted: &[u64]) -> Self {
        let mut predicted = predicted.to_vec();
        predicted.sort_unstable();
        predicted.dedup();
        let hit_any = self.argmax.iter().any(|q| predicted.contains(q));
        let hit_all = self.argmax.iter().all(|q| predicted.contains(q));
        self.prediction = Some(Prediction { predicted, hit_any, hit_all });
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Online verdict: values arrive in index order and only the running
/// maximum and the previous value are kept (plus the full sequence when
/// `retain` is set).
#[derive(Debug, Clone, Default)]
pub struct VerdictBuilder {
    retain: bool,
    sequence: Vec<(u64, Nat)>,
    last: Option<(u64, Nat)>,
    fell_at: Option<u64>,
    first_violation: Option<Violation>,
    max: Option<Nat>,
    argmax: Vec<u64>,
}

impl VerdictBuilder {
    pub fn new(retain: bool) -> Self {
        VerdictBuilder { retain, ..Default::default() }
    }

    pub fn push(&mut self, index: u64, value: Nat) -> Result<()> {
        if let Some((last_index, last_value)) = &self.last {
            if index <= *last_index {
                return domain(format!(
                    "sequence indices must be strictly increasing ({index} after {last_index})"
                ));
            }
            if value < *last_value {
                self.fell_at.get_or_insert(index);
            } else if value > *last_value {
                if let (Some(fell_at), None) = (self.fell_at, self.first_violation) {
                    self.first_violation = Some(Violation { index, fell_at });
                }
            }
        }
        match &self.max {
            Some(m) if value < *m => {}
            Some(m) if value == *m => self.argmax.push(index),
            _ => {
                self.max = Some(value.clone());
                self.argmax.clear();
                self.argmax.push(index);
            }
        }
        if self.retain {
            self.sequence.push((index, value.clone()));
        }
        self.last = Some((index, value));
        Ok(())
    }

    pub fn finish(self, label: impl Into<String>) -> Result<UnimodalityReport> {
        if self.last.is_none() {
            return Err(Error::EmptyInput);
        }
        Ok(UnimodalityReport {
            label: label.into(),
            sequence: self.sequence,
            is_unimodal: self.first_violation.is_none(),
            argmax: self.argmax,
            first_violation: self.first_violation,
            prediction: None,
        })
    }
}

/// Unimodality verdict for an indexed sequence (indices strictly increasing).
pub fn verdict(sequence: &[(u64, Nat)]) -> Result<UnimodalityReport> {
    let mut builder = VerdictBuilder::new(true);
    for (index, value) in sequence {
        builder.push(*index, value.clone())?;
    }
    builder.finish("")
}

/// `{floor(log_{1+1/c} n), floor(log_{1+1/c} n) + 1}`.
///
/// The floor is the largest `f` with `(c+1)^f <= n c^f`, decided in exact
/// integer arithmetic, so exact powers land on their exponent.
pub fn predicted_q(n: u64, c: u64) -> Result<[u64; 2]> {
    if n == 0 || c == 0 {
        return domain(format!("predicted_q requires n >= 1 and c >= 1, got n = {n}, c = {c}"));
    }
    let mut f = 0u32;
    let mut lhs = Nat::from(c + 1);
    let mut rhs = Nat::from(n) * c;
    while lhs <= rhs {
        f += 1;
        lhs *= c + 1;
        rhs *= c;
    }
    Ok([u64::from(f), u64::from(f) + 1])
}

/// Upper limit on big-integer operations per scan cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellBudget(pub u64);

impl Default for CellBudget {
    fn default() -> Self {
        CellBudget(10_000_000)
    }
}

impl CellBudget {
    fn check(self, cell: u64, needed: u64) -> Result<()> {
        if needed > self.0 {
            return Err(Error::ResourceLimit { cell, needed, budget: self.0 });
        }
        Ok(())
    }
}

/// One `n` of the composition-count scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureRow {
    pub n: u32,
    pub c: u32,
    pub q_min: u32,
    pub q_max: u32,
    pub report: UnimodalityReport,
}

/// Big-integer operations for one conjecture row: four per alternating-sum
/// term over `q = c..=cn+1`.
fn conjecture_cost(n: u32, c: u32) -> u64 {
    let k = u64::from(c) * u64::from(n);
    (c..=(c * n + 1)).map(|q| 4 * altsum_terms(n, q, k)).sum()
}

/// For each `n`, the sequence `q -> a((c+1)n, n, q) = C(n,q,cn) - C(n,q-1,cn)`
/// over `q = c+1 ..= cn+1` (below that no composition fits, above it the
/// count is zero), with its verdict and the predicted maximiser set.
///
/// Cells run in parallel; rows come back ordered by `n`.
pub fn conjecture_scan(
    n_range: RangeInclusive<u32>,
    c: u32,
    budget: CellBudget,
) -> Result<Vec<ConjectureRow>> {
    if c == 0 {
        return domain("conjecture_scan requires c >= 1");
    }
    if *n_range.start() == 0 {
        return domain("conjecture_scan requires n >= 1");
    }
    let ns: Vec<u32> = n_range.collect();
    for &n in &ns {
        budget.check(u64::from(n), conjecture_cost(n, c))?;
    }
    ns.into_par_iter().map(|n| conjecture_row(n, c)).collect()
}

/// A single conjecture row, without the budget check.
pub fn conjecture_row(n: u32, c: u32) -> Result<ConjectureRow> {
    let k = u64::from(c) * u64::from(n);
    let (q_min, q_max) = (c + 1, c * n + 1);
    let mut builder = VerdictBuilder::new(true);
    let mut below = coeff_altsum(n, q_min - 1, k);
    for q in q_min..=q_max {
        let here = coeff_altsum(n, q, k);
        builder.push(u64::from(q), Nat::from(&here - &below))?;
        below = here;
    }
    let report = builder
        .finish(format!("a({}n,n,q) n={n}", c + 1))?
        .with_prediction(&predicted_q(u64::from(n), u64::from(c))?);
    Ok(ConjectureRow { n, c, q_min, q_max, report })
}

/// One `k` of the largest-part scan over all compositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrRow {
    pub k: u64,
    pub q_min: u64,
    pub q_max: u64,
    pub report: UnimodalityReport,
}

impl OrRow {
    /// Maximiser inside `{floor(log2 k), floor(log2 k) + 1}` and unimodal.
    pub fn holds(&self) -> bool {
        self.report.is_unimodal && self.report.prediction.as_ref().is_some_and(|p| p.hit_all)
    }
}

/// For each `k`, the sequence `q -> a(k, q)` for `q = 1..=k` with its verdict
/// and the predicted set `{floor(log2 k), floor(log2 k) + 1}`.
///
/// Rows `b(., q)` are produced in parallel batches and fed to per-`k` online
/// verdicts in increasing `q`; sequences are kept only when `retain` is set.
pub fn or_scan(k_range: RangeInclusive<u64>, budget: CellBudget, retain: bool) -> Result<Vec<OrRow>> {
    let (k_min, k_max) = (*k_range.start(), *k_range.end());
    if k_min == 0 {
        return domain("or_scan requires k >= 1");
    }
    if k_min > k_max {
        return Ok(Vec::new());
    }
    for k in k_range.clone() {
        budget.check(k, 2 * k)?;
    }
    let q_top = u32::try_from(k_max).map_err(|_| Error::Domain("k_max exceeds u32".into()))?;
    let mut builders: Vec<VerdictBuilder> = k_range.clone().map(|_| VerdictBuilder::new(retain)).collect();
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut previous = b_kq_row(k_max, 0);
    let mut q = 1u32;
    while q <= q_top {
        let upto = q_top.min(q + batch as u32 - 1);
        let rows: Vec<Vec<Nat>> = (q..=upto).into_par_iter().map(|j| b_kq_row(k_max, j)).collect();
        for (offset, row) in rows.into_iter().enumerate() {
            let j = q + offset as u32;
            let first = u64::from(j).max(k_min);
            builders[(first - k_min) as usize..].par_iter_mut().enumerate().try_for_each(
                |(i, builder)| {
                    let k = first + i as u64;
                    let value = Nat::from(&row[k as usize] - &previous[k as usize]);
                    builder.push(u64::from(j), value)
                },
            )?;
            previous = row;
        }
        q = upto + 1;
    }
    builders
        .into_iter()
        .zip(k_range)
        .map(|(builder, k)| {
            let report = builder.finish(format!("a({k},q)"))?.with_prediction(&predicted_q(k, 1)?);
            Ok(OrRow { k, q_min: 1, q_max: k, report })
        })
        .collect()
}

/// How the `theta` terms of the surrogate are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaMode {
    /// `theta_1 = theta_2 = 0`
    Nominal,
    /// Every `theta` ranges over `[-1, 1]` independently for each `B(q)`.
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    Indeterminate,
}

impl Sign {
    fn of(x: &Real) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_sign_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateRow {
    pub q: u32,
    /// `T(q+1) - T(q)` at the nominal thetas.
    pub value: Option<Real>,
    /// Bracket over all thetas (interval mode).
    pub bracket: Option<(Real, Real)>,
    pub sign: Sign,
}

/// A change between consecutive determinate nonzero signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignChange {
    /// Last `q` carrying the old sign.
    pub before: u32,
    /// First `q` carrying the new sign.
    pub after: u32,
    pub from: Sign,
    pub to: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateReport {
    pub n: u64,
    pub mode: ThetaMode,
    pub rows: Vec<SurrogateRow>,
    pub sign_changes: Vec<SignChange>,
}

/// `B(q) = (1 + (q^2-6q)/2^q + t1 q^2/2^{2q}) (1 - 1/2^{q-2} + t2 q^2/2^{2q})^n`.
fn surrogate_b(n: u64, q: u32, theta1: i32, theta2: i32, bits: u32) -> Real {
    let q_i = i32::try_from(q).expect("q fits i32");
    let pow2 = |e: i32| Float::with_val(bits, Float::u_exp(1, e));
    let qq = i64::from(q) * i64::from(q);
    let small = pow2(-2 * q_i) * qq;
    let prefactor = Float::with_val(bits, 1)
        + pow2(-q_i) * (qq - 6 * i64::from(q))
        + Float::with_val(bits, &small * theta1);
    let base = Float::with_val(bits, 1) - pow2(2 - q_i) + small * theta2;
    prefactor * (base.ln() * n).exp()
}

/// Second differences `T(q+1) - T(q) = B(q+2) + B(q) - 2 B(q+1)` of the
/// main term of the `c = 1` estimate, as a function of `q` for fixed `n`.
///
/// Requires `q_min >= 4` and `2^{q_max} <= n^2`.
pub fn surrogate_t_analysis(
    n: u64,
    q_range: RangeInclusive<u32>,
    mode: ThetaMode,
    prec: Precision,
) -> Result<SurrogateReport> {
    let (q_min, q_max) = (*q_range.start(), *q_range.end());
    if q_min < 4 || q_min > q_max {
        return domain(format!("surrogate analysis needs 4 <= q_min <= q_max, got {q_min}..={q_max}"));
    }
    if Nat::from(1) << q_max > Nat::from(n).pow(2u32) {
        return domain(format!("surrogate analysis needs 2^q_max <= n^2 (q_max = {q_max}, n = {n})"));
    }
    let bits = prec.bits();
    let rows: Vec<SurrogateRow> = q_range
        .into_par_iter()
        .map(|q| match mode {
            ThetaMode::Nominal => {
                let b = |j: u32| surrogate_b(n, j, 0, 0, bits);
                let value = b(q + 2) + b(q) - b(q + 1) * 2u32;
                SurrogateRow { q, sign: Sign::of(&value), value: Some(value), bracket: None }
            }
            ThetaMode::Interval => {
                let lo = |j: u32| surrogate_b(n, j, -1, -1, bits);
                let hi = |j: u32| surrogate_b(n, j, 1, 1, bits);
                let lower = lo(q + 2) + lo(q) - hi(q + 1) * 2u32;
                let upper = hi(q + 2) + hi(q) - lo(q + 1) * 2u32;
                let sign = if lower.is_sign_positive() && !lower.is_zero() {
                    Sign::Positive
                } else if upper.is_sign_negative() && !upper.is_zero() {
                    Sign::Negative
                } else if lower.is_zero() && upper.is_zero() {
                    Sign::Zero
                } else {
                    Sign::Indeterminate
                };
                SurrogateRow { q, value: None, bracket: Some((lower, upper)), sign }
            }
        })
        .collect();
    let mut sign_changes = Vec::new();
    let mut last: Option<(u32, Sign)> = None;
    for row in &rows {
        if matches!(row.sign, Sign::Positive | Sign::Negative) {
            if let Some((before, from)) = last {
                if from != row.sign {
                    sign_changes.push(SignChange { before, after: row.q, from, to: row.sign });
                }
            }
            last = Some((row.q, row.sign));
        }
    }
    Ok(SurrogateReport { n, mode, rows, sign_changes })
}

/// The two limiting second differences behind the surrogate's sign pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSignFacts {
    /// `e^{-1/4} + e^{-1} - 2 e^{-1/2}`
    pub below_peak: Real,
    /// `e^{-1/2} + e^{-2} - 2 e^{-1}`
    pub above_peak: Real,
}

impl ScalarSignFacts {
    pub fn hold(&self) -> bool {
        self.below_peak.is_sign_negative()
            && !self.below_peak.is_zero()
            && self.above_peak.is_sign_positive()
            && !self.above_peak.is_zero()
    }
}

pub fn scalar_sign_facts(prec: Precision) -> ScalarSignFacts {
    let bits = prec.bits();
    let e = |x: f64| Float::with_val(bits, x).exp();
    ScalarSignFacts {
        below_peak: e(-0.25) + e(-1.0) - e(-0.5) * 2u32,
        above_peak: e(-0.5) + e(-2.0) - e(-1.0) * 2u32,
    }
}
