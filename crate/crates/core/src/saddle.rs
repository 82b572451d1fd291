//! Saddle-point asymptotics for `C(n, q, cn)`.
//!
//! For `f(z) = ((1 - z^q) / (1 - z))^n` the saddle equation
//! `z f'(z) / f(z) = cn` reduces to an equation in `z` alone,
//!
//! ```text
//! x (1/(1-x) - q x^{q-1}/(1-x^q)) = c,
//! ```
//!
//! whose root `r` in `(0, 1)` exists exactly when `c < (q-1)/2`. Hayman's
//! estimate then reads
//!
//! ```text
//! C(n, q, cn) ~ phi(r) / sqrt(2 pi n) * ((1 - r^q) / ((1 - r) r^c))^n,
//! phi(r) = (r/(1-r)^2 - q^2 r^q/(1-r^q)^2)^{-1/2}.
//! ```
//!
//! Everything is evaluated in log-space so that `n` in the millions stays
//! finite.

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Error, Result};
use crate::exact::{coeff, Nat};
use crate::real::{Precision, Real};

/// `a(x)/n = x (1/(1-x) - q x^{q-1}/(1-x^q))`, the per-factor mean of the
/// saddle-point equation. Strictly increasing from 0 to `(q-1)/2` on `(0, 1)`.
pub fn log_deriv_ratio(x: &Real, q: u32) -> Result<Real> {
    if q < 2 {
        return domain("log_deriv_ratio requires q >= 2");
    }
    if !(*x > 0 && *x < 1) {
        return domain(format!("log_deriv_ratio requires 0 < x < 1, got {x}"));
    }
    Ok(ratio_unchecked(x, q))
}

fn ratio_unchecked(x: &Real, q: u32) -> Real {
    let bits = x.prec();
    let xq1 = Float::with_val(bits, x.pow(q - 1));
    let xq = Float::with_val(bits, &xq1 * x);
    let one_minus_x = Float::with_val(bits, 1 - x);
    let one_minus_xq = Float::with_val(bits, 1 - &xq);
    let first = Float::with_val(bits, 1) / one_minus_x;
    let second = xq1 * q / one_minus_xq;
    (first - second) * x
}

/// `b(x)/n = x/(1-x)^2 - q^2 x^q/(1-x^q)^2`; equals `1/phi(x)^2`.
pub fn per_factor_variance(x: &Real, q: u32) -> Real {
    let bits = x.prec();
    let xq = Float::with_val(bits, x.pow(q));
    let one_minus_x = Float::with_val(bits, 1 - x);
    let one_minus_xq = Float::with_val(bits, 1 - &xq);
    let first = Float::with_val(bits, x / one_minus_x.square());
    let second = xq * (u64::from(q) * u64::from(q)) / one_minus_xq.square();
    first - second
}

/// `phi(r) = (b(r)/n)^{-1/2}`.
pub fn phi(r: &Real, q: u32) -> Real {
    per_factor_variance(r, q).recip_sqrt()
}

/// `(q-2) x^{q+1} - (q-1) x^q + 2x - 1`, the polynomial form of the `c = 1`
/// saddle equation. Its positive roots are 1 and the saddle radius.
pub fn c1_polynomial(x: &Real, q: u32) -> Real {
    let bits = x.prec();
    let xq = Float::with_val(bits, x.pow(q));
    let xq1 = Float::with_val(bits, &xq * x);
    let q = i64::from(q);
    xq1 * (q - 2) - xq * (q - 1) + Float::with_val(bits, x * 2u32) - 1u32
}

/// Solved saddle radius for `k = cn`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub q: u32,
    pub c: u32,
    pub precision: Precision,
    /// Root of `log_deriv_ratio(r, q) = c` in `(0, 1)`.
    pub r: Real,
    pub phi: Real,
    /// `log_deriv_ratio(r, q) - c`.
    pub residual: Real,
    pub iterations: u32,
}

fn check_saddle_domain(q: u32, c: u32) -> Result<()> {
    if q < 2 || c < 1 {
        return domain(format!("saddle point requires q >= 2 and c >= 1, got q = {q}, c = {c}"));
    }
    if u64::from(q) <= 2 * u64::from(c) + 1 {
        return domain(format!(
            "saddle point requires q > 2c + 1 (got q = {q}, c = {c}): k = cn is at or right of the \
             row center (q-1)n/2 and the saddle degenerates at r = 1; use the mirrored index \
             (q-1-c)n or the central (andre) baseline"
        ));
    }
    Ok(())
}

const MAX_ITERATIONS: u32 = 2_000;

/// Solves `log_deriv_ratio(r, q) = c` for `r` in `(0, 1)`.
///
/// Bisects on `[eps, 1 - eps]` (`eps = 10^{-digits/2}`) until the bracket is
/// narrower than `2^-10`, then runs Newton steps, falling back to bisection
/// whenever a step leaves the bracket.
pub fn solve_saddle(q: u32, c: u32, prec: Precision) -> Result<SaddlePoint> {
    check_saddle_domain(q, c)?;
    let bits = prec.bits();
    let target = Float::with_val(bits, c);
    let g = |x: &Real| ratio_unchecked(x, q) - &target;

    let eps = prec.pow10(-((prec.decimal_digits() / 2).max(1) as i32));
    let mut lo = eps.clone();
    let mut hi = Float::with_val(bits, 1 - &eps);
    if g(&lo) >= 0 || g(&hi) <= 0 {
        return Err(Error::Convergence(format!(
            "saddle equation does not change sign on [eps, 1-eps] for q = {q}, c = {c}"
        )));
    }

    let coarse = Float::with_val(bits, Float::u_exp(1, -10));
    let mut iterations = 0;
    while Float::with_val(bits, &hi - &lo) > coarse {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        if g(&mid) < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let step_tol = Float::with_val(bits, Float::u_exp(1, 6 - bits as i32));
    let mut x = Float::with_val(bits, &lo + &hi) / 2u32;
    loop {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Convergence(format!(
                "no convergence after {MAX_ITERATIONS} iterations for q = {q}, c = {c}"
            )));
        }
        let gx = g(&x);
        if gx.is_zero() {
            break;
        }
        if gx < 0 {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        // d/dx of log_deriv_ratio is (b(x)/n) / x.
        let slope = per_factor_variance(&x, q) / &x;
        let step = Float::with_val(bits, &gx / &slope);
        let candidate = Float::with_val(bits, &x - &step);
        let next = if candidate > lo && candidate < hi {
            candidate
        } else {
            Float::with_val(bits, &lo + &hi) / 2u32
        };
        let moved = Float::with_val(bits, &next - &x).abs();
        x = next;
        if moved <= step_tol {
            break;
        }
    }

    let residual = g(&x);
    let tol = prec.residual_tolerance();
    if Float::with_val(bits, residual.abs_ref()) > tol {
        return Err(Error::Convergence(format!(
            "residual {} above tolerance for q = {q}, c = {c}",
            residual.to_f64()
        )));
    }
    if c == 1 {
        let poly = c1_polynomial(&x, q);
        if poly.abs() > tol {
            return Err(Error::Convergence(format!("c = 1 root fails the polynomial form for q = {q}")));
        }
    }
    let phi = phi(&x, q);
    Ok(SaddlePoint { q, c, precision: prec, r: x, phi, residual, iterations })
}

/// Refined window `(q^3 - q^2)/2^{2q+2} <= deviation <= q^3/2^{2q+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedSandwich {
    pub lower: Real,
    pub upper: Real,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl RefinedSandwich {
    pub fn pass(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Location of the `c = 1` saddle radius relative to `1/2 + q/2^{q+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma33Report {
    pub q: u32,
    pub r: Real,
    /// `r - 1/2 - q/2^{q+2}`
    pub deviation: Real,
    /// `q^3 / 2^{2q}`
    pub bound: Real,
    pub pass: bool,
    /// Present for `q > 16`.
    pub refined: Option<RefinedSandwich>,
}

impl Lemma33Report {
    pub fn refined_pass(&self) -> Option<bool> {
        self.refined.as_ref().map(RefinedSandwich::pass)
    }
}

/// Checks `|r - 1/2 - q/2^{q+2}| <= q^3/2^{2q}` for the `c = 1` root and,
/// for `q > 16`, the refined two-sided window.
pub fn lemma33_bound_check(q: u32, prec: Precision) -> Result<Lemma33Report> {
    if q < 4 {
        return domain(format!("bound check requires q >= 4, got q = {q}"));
    }
    // The bound is about 2^{-2q}; it must sit well above the residual.
    let needed = (2.0 * f64::from(q) * std::f64::consts::LOG10_2).ceil() as u32 + 15;
    if prec.decimal_digits() < needed {
        return domain(format!(
            "bound check at q = {q} needs at least {needed} digits, got {}",
            prec.decimal_digits()
        ));
    }
    let sp = solve_saddle(q, 1, prec)?;
    let bits = prec.bits();
    let q_i = i32::try_from(q).expect("q fits i32");
    let pow2 = |e: i32| Float::with_val(bits, Float::u_exp(1, e));
    let centre = Float::with_val(bits, 0.5) + pow2(-(q_i + 2)) * q;
    let deviation = Float::with_val(bits, &sp.r - &centre);
    let q3 = Float::with_val(bits, u64::from(q).pow(3));
    let q2 = Float::with_val(bits, u64::from(q).pow(2));
    let bound = Float::with_val(bits, &q3 * pow2(-2 * q_i));
    let pass = Float::with_val(bits, deviation.abs_ref()) <= bound;
    let refined = (q > 16).then(|| {
        let lower = (Float::with_val(bits, &q3 - &q2)) * pow2(-(2 * q_i + 2));
        let upper = Float::with_val(bits, &q3 * pow2(-(2 * q_i + 2)));
        RefinedSandwich { lower_ok: lower <= deviation, upper_ok: deviation <= upper, lower, upper }
    });
    Ok(Lemma33Report { q, r: sp.r, deviation, bound, pass, refined })
}

/// The two printed two-term expansions of the saddle radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxVariant {
    /// `1/d + q/(c^2 d^{q+2})`
    Thm12,
    /// `1/d + q/d^{q+2}`
    Thm36,
}

/// Two-term approximation of the saddle radius, `d = 1 + 1/c`.
pub fn approx_root(q: u32, c: u32, variant: ApproxVariant, prec: Precision) -> Result<Real> {
    if q < 4 {
        return domain(format!("approx_root requires q >= 4, got q = {q}"));
    }
    check_saddle_domain(q, c)?;
    let bits = prec.bits();
    let inv_d = Float::with_val(bits, c) / (c + 1);
    let d = Float::with_val(bits, c + 1) / c;
    let mut second = Float::with_val(bits, q) / d.pow(q + 2);
    if variant == ApproxVariant::Thm12 {
        second /= u64::from(c) * u64::from(c);
    }
    Ok(inv_d + second)
}

/// Empirical exponent `p` in `r - 1/d ~ q / (c^p d^{q+2})`, from the solved
/// root: `p = -log((r - 1/d) d^{q+2} / q) / log c`. Requires `c >= 2`.
pub fn second_term_exponent(q: u32, c: u32, prec: Precision) -> Result<Real> {
    if c < 2 {
        return domain("the c-exponent is only identifiable for c >= 2");
    }
    let sp = solve_saddle(q, c, prec)?;
    let bits = prec.bits();
    let d = Float::with_val(bits, c + 1) / c;
    let gap = Float::with_val(bits, &sp.r - Float::with_val(bits, c) / (c + 1));
    let coefficient = gap * d.pow(q + 2) / q;
    Ok(-coefficient.ln() / Float::with_val(bits, c).ln())
}

/// An asymptotic value carried as its natural logarithm, with an optional
/// log-space envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub log_value: Real,
    pub lower: Option<Real>,
    pub upper: Option<Real>,
}

impl Estimate {
    pub fn point(log_value: Real) -> Self {
        Estimate { log_value, lower: None, upper: None }
    }

    /// `exp(log_value)` as an `f64`, when it is representable.
    pub fn linear(&self) -> Option<f64> {
        let v = Float::with_val(self.log_value.prec(), self.log_value.exp_ref()).to_f64();
        (v.is_finite() && v > 0.0).then_some(v)
    }

    /// `exact / estimate`, computed as `exp(log exact - log_value)`.
    pub fn ratio_to(&self, exact: &Nat) -> Real {
        let bits = self.log_value.prec();
        (log_nat(exact, bits) - &self.log_value).exp()
    }

    /// Whether `log_x` lies inside the envelope (`None` without one).
    pub fn envelope_contains(&self, log_x: &Real) -> Option<bool> {
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => Some(lo <= log_x && log_x <= hi),
            _ => None,
        }
    }
}

/// Natural log of a positive integer.
pub fn log_nat(x: &Nat, bits: u32) -> Real {
    Float::with_val(bits, x).ln()
}

/// Hayman's estimate of `C(n, q, cn)` at an already solved saddle point.
pub fn hayman_estimate_at(sp: &SaddlePoint, n: u64) -> Estimate {
    let bits = sp.precision.bits();
    let r = &sp.r;
    let rq = Float::with_val(bits, r.pow(sp.q));
    let rc = Float::with_val(bits, r.pow(sp.c));
    let base = Float::with_val(bits, 1 - rq) / (Float::with_val(bits, 1 - r) * rc);
    let two_pi_n = sp.precision.pi() * 2u32 * n;
    let log_value = Float::with_val(bits, sp.phi.ln_ref()) - two_pi_n.ln() / 2u32 + base.ln() * n;
    Estimate::point(log_value)
}

/// Hayman's saddle-point estimate of `C(n, q, cn)` (log-space).
pub fn hayman_estimate(n: u64, q: u32, c: u32, prec: Precision) -> Result<Estimate> {
    if n == 0 {
        return domain("hayman_estimate requires n >= 1");
    }
    let sp = solve_saddle(q, c, prec)?;
    Ok(hayman_estimate_at(&sp, n))
}

/// The simplified `c = 1` form with unknown `theta_1, theta_2` in `[-1, 1]`:
///
/// ```text
/// (1 + (q^2-6q)/2^q + theta_1 q^2/2^{2q}) 2^n / sqrt(pi n)
///     * (1 - 1/2^{q-2} + theta_2 q^2/2^{2q})^n
/// ```
///
/// `log_value` takes both thetas as 0; `lower`/`upper` take them as -1/+1.
pub fn corollary35_estimate(n: u64, q: u32, prec: Precision) -> Result<Estimate> {
    if q <= 3 {
        return domain(format!("corollary estimate requires q > 3, got q = {q}"));
    }
    if n == 0 {
        return domain("corollary estimate requires n >= 1");
    }
    let bits = prec.bits();
    let at = |theta: i32| {
        let q_i = i32::try_from(q).expect("q fits i32");
        let pow2 = |e: i32| Float::with_val(bits, Float::u_exp(1, e));
        let qq = i64::from(q) * i64::from(q);
        let wiggle = pow2(-2 * q_i) * qq * theta;
        let prefactor = Float::with_val(bits, 1) + pow2(-q_i) * (qq - 6 * i64::from(q)) + &wiggle;
        let base = Float::with_val(bits, 1) - pow2(2 - q_i) + &wiggle;
        let pi_n = prec.pi() * n;
        prefactor.ln() + Float::with_val(bits, 2).ln() * n - pi_n.ln() / 2u32 + base.ln() * n
    };
    Ok(Estimate { log_value: at(0), lower: Some(at(-1)), upper: Some(at(1)) })
}

/// Classical closed-form asymptotics used as baselines.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineKind {
    /// `C(n, cFrac n) ~ (2 pi (c - c^2) n)^{-1/2} (c^{-c} (1-c)^{-(1-c)})^n`
    Binomial { c_frac: Real },
    /// `C(n, 3, n) ~ 3^{n + 1/2} / (2 sqrt(pi n))`
    TrinomialCentral,
    /// `max_k C(n, q, k) ~ q^n sqrt(6 / ((q^2 - 1) pi n))`
    AndreSup { q: u32 },
}

pub fn baseline_estimate(kind: &BaselineKind, n: u64, prec: Precision) -> Result<Estimate> {
    if n == 0 {
        return domain("baseline estimates require n >= 1");
    }
    let bits = prec.bits();
    let pi = prec.pi();
    let log_value = match kind {
        BaselineKind::Binomial { c_frac } => {
            if !(*c_frac > 0 && *c_frac < 1) {
                return domain(format!("binomial baseline requires 0 < cFrac < 1, got {c_frac}"));
            }
            let c = Float::with_val(bits, c_frac);
            let one_minus = Float::with_val(bits, 1 - &c);
            let spread = Float::with_val(bits, &c * &one_minus) * n * 2u32 * &pi;
            let entropy = -(Float::with_val(bits, &c * Float::with_val(bits, c.ln_ref()))
                + Float::with_val(bits, &one_minus * Float::with_val(bits, one_minus.ln_ref())));
            -spread.ln() / 2u32 + entropy * n
        }
        BaselineKind::TrinomialCentral => {
            let three = Float::with_val(bits, 3).ln();
            let half_n = Float::with_val(bits, n) + 0.5;
            three * half_n - Float::with_val(bits, 2).ln() - (pi * n).ln() / 2u32
        }
        BaselineKind::AndreSup { q } => {
            if *q < 2 {
                return domain("andre baseline requires q >= 2");
            }
            let q2m1 = u64::from(*q) * u64::from(*q) - 1;
            let ratio = Float::with_val(bits, 6) / (pi * n * q2m1);
            Float::with_val(bits, *q).ln() * n + ratio.ln() / 2u32
        }
    };
    Ok(Estimate::point(log_value))
}

/// One row of an exact-vs-estimate convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub n: u32,
    pub log_exact: Real,
    pub log_estimate: Real,
    /// `exact / estimate`
    pub ratio: Real,
}

impl RatioRow {
    /// `|ratio - 1|`
    pub fn error(&self) -> Real {
        Float::with_val(self.ratio.prec(), &self.ratio - 1u32).abs()
    }
}

/// Compares `C(n, q, cn)` with Hayman's estimate for every `n` in `ns`.
/// Rows come back sorted by `n`; the exact coefficients are computed in
/// parallel.
pub fn ratio_table(q: u32, c: u32, ns: &[u32], prec: Precision) -> Result<Vec<RatioRow>> {
    use rayon::prelude::*;

    if ns.contains(&0) {
        return domain("ratio_table requires every n >= 1");
    }
    let sp = solve_saddle(q, c, prec)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let bits = prec.bits();
    Ok(ns
        .par_iter()
        .map(|&n| {
            let exact = coeff(n, q, i64::from(c) * i64::from(n));
            let log_exact = log_nat(&exact, bits);
            let log_estimate = hayman_estimate_at(&sp, u64::from(n)).log_value;
            let ratio = Float::with_val(bits, &log_exact - &log_estimate).exp();
            RatioRow { n, log_exact, log_estimate, ratio }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn f(v: f64) -> Real {
        p().real(v)
    }

    #[test]
    fn ratio_limits() {
        let tiny = p().pow10(-40);
        assert!(log_deriv_ratio(&tiny, 5).unwrap() < 1e-39);
        let near_one = Float::with_val(p().bits(), 1 - p().pow10(-20));
        let v = log_deriv_ratio(&near_one, 5).unwrap();
        assert!((v.to_f64() - 2.0).abs() < 1e-15);
        assert!(log_deriv_ratio(&f(0.0), 4).is_err());
        assert!(log_deriv_ratio(&f(1.0), 4).is_err());
        assert!(log_deriv_ratio(&f(0.5), 1).is_err());
    }

    #[test]
    fn ratio_matches_rational_form() {
        // -x (q x^{q-1} - q x^q - 1 + x^q) / ((1 - x^q)(1 - x))
        let x = f(0.5);
        let q = 4u32;
        let bits = p().bits();
        let xq = Float::with_val(bits, (&x).pow(q));
        let xq1 = Float::with_val(bits, (&x).pow(q - 1));
        let num = -(Float::with_val(bits, &xq1 * q) - Float::with_val(bits, &xq * q) - 1u32 + &xq) * &x;
        let den = Float::with_val(bits, 1 - &xq) * Float::with_val(bits, 1 - &x);
        let oracle = num / den;
        let v = log_deriv_ratio(&x, q).unwrap();
        assert!(v > 0 && v < 1.5);
        assert!(Float::with_val(bits, v - oracle).abs() < p().pow10(-55));
    }

    #[test]
    fn q10_root_sits_in_the_printed_window() {
        let sp = solve_saddle(10, 1, p()).unwrap();
        assert!(sp.r > 0.501487 && sp.r < 0.503395, "r = {}", sp.r);
        assert!(sp.phi > 0);
        assert!(Float::with_val(p().bits(), sp.residual.abs_ref()) <= p().residual_tolerance());
    }

    #[test]
    fn q4_root_matches_quintic_bisection() {
        // 2x^5 - 3x^4 + 2x - 1 on (0, 0.9): negative at 0, positive at 0.9.
        let bits = p().bits();
        let poly = |x: &Float| {
            let x4 = Float::with_val(bits, x.pow(4u32));
            let x5 = Float::with_val(bits, &x4 * x);
            x5 * 2u32 - x4 * 3u32 + Float::with_val(bits, x * 2u32) - 1u32
        };
        let mut lo = Float::with_val(bits, 0);
        let mut hi = Float::with_val(bits, 0.9);
        for _ in 0..200 {
            let mid = Float::with_val(bits, &lo + &hi) / 2u32;
            if poly(&mid) < 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sp = solve_saddle(4, 1, p()).unwrap();
        assert!(Float::with_val(bits, &sp.r - &lo).abs() < p().pow10(-30));
    }

    #[test]
    fn central_targets_are_rejected() {
        assert!(matches!(solve_saddle(5, 2, p()), Err(Error::Domain(_))));
        assert!(matches!(solve_saddle(3, 1, p()), Err(Error::Domain(_))));
        assert!(matches!(hayman_estimate(100, 5, 2, p()), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_squared_times_variance_is_one() {
        for (q, c) in [(5, 1), (7, 2), (12, 3), (40, 1)] {
            let sp = solve_saddle(q, c, p()).unwrap();
            let b = per_factor_variance(&sp.r, q);
            let prod = Float::with_val(p().bits(), sp.phi.square_ref()) * b;
            assert!(Float::with_val(p().bits(), prod - 1u32).abs() < p().pow10(-50));
        }
    }

    #[test]
    fn bound_check_examples() {
        let r5 = lemma33_bound_check(5, p()).unwrap();
        assert!(r5.pass);
        assert_eq!(r5.bound, Float::with_val(p().bits(), 125) / 1024u32);
        assert!(r5.refined.is_none());

        let r64 = lemma33_bound_check(64, p()).unwrap();
        assert!(r64.pass);
        assert!(r64.deviation.clone().abs() < Float::with_val(p().bits(), Float::u_exp(1, -100)));

        assert!(lemma33_bound_check(3, p()).is_err());
        assert!(lemma33_bound_check(200, p()).is_err());
    }

    #[test]
    fn refined_window_at_q20() {
        // Measured: deviation = 8.688e-10; window is [1.728e-9, 1.819e-9].
        // The upper side holds, the lower side does not (the deviation is
        // about half the printed lower bound).
        let r = lemma33_bound_check(20, Precision::digits(40)).unwrap();
        assert!(r.pass);
        let refined = r.refined.as_ref().unwrap();
        assert!(refined.upper_ok);
        assert!(!refined.lower_ok);
        assert_eq!(r.refined_pass(), Some(false));
        assert!((r.deviation.to_f64() - 8.688_003_2e-10).abs() < 1e-16);
    }

    #[test]
    fn approx_root_variants() {
        let v = approx_root(10, 1, ApproxVariant::Thm12, p()).unwrap();
        assert_eq!(v, Float::with_val(p().bits(), 0.502_441_406_25));
        let w = approx_root(10, 1, ApproxVariant::Thm36, p()).unwrap();
        assert_eq!(v, w);
        let a = approx_root(12, 2, ApproxVariant::Thm12, p()).unwrap();
        let b = approx_root(12, 2, ApproxVariant::Thm36, p()).unwrap();
        assert_ne!(a, b);
        assert!(approx_root(3, 1, ApproxVariant::Thm12, p()).is_err());
    }

    #[test]
    fn c_squared_variant_tracks_the_root() {
        for q in [12u32, 20, 30] {
            let r = solve_saddle(q, 2, p()).unwrap().r;
            let a = approx_root(q, 2, ApproxVariant::Thm12, p()).unwrap();
            let b = approx_root(q, 2, ApproxVariant::Thm36, p()).unwrap();
            let da = Float::with_val(p().bits(), &r - a).abs();
            let db = Float::with_val(p().bits(), &r - b).abs();
            assert!(da < db, "q = {q}");
        }
        let e = second_term_exponent(40, 2, p()).unwrap();
        assert!((e.to_f64() - 2.0).abs() < 1e-4, "exponent {e}");
    }

    #[test]
    fn hayman_small_n_is_finite() {
        let e = hayman_estimate(1, 5, 1, p()).unwrap();
        assert!(e.log_value.is_finite());
        assert!(e.linear().is_some());
    }

    #[test]
    fn hayman_stays_finite_for_huge_n() {
        let e = hayman_estimate(1_000_000, 9, 2, p()).unwrap();
        assert!(e.log_value.is_finite());
        assert!(e.linear().is_none());
        let c = corollary35_estimate(1_000_000, 9, p()).unwrap();
        assert!(c.log_value.is_finite());
        let a = baseline_estimate(&BaselineKind::AndreSup { q: 9 }, 1_000_000, p()).unwrap();
        assert!(a.log_value.is_finite());
    }

    #[test]
    fn corollary_envelope_width_at_q4() {
        let n = 50u64;
        let e = corollary35_estimate(n, 4, p()).unwrap();
        let width = Float::with_val(p().bits(), e.upper.as_ref().unwrap() - e.lower.as_ref().unwrap());
        let bits = p().bits();
        let base = Float::with_val(bits, 1.0 - 0.25 + 16.0 / 256.0)
            / Float::with_val(bits, 1.0 - 0.25 - 16.0 / 256.0);
        let pref = Float::with_val(bits, 0.5 + 16.0 / 256.0) / Float::with_val(bits, 0.5 - 16.0 / 256.0);
        let expected = base.ln() * n + pref.ln();
        assert!(Float::with_val(bits, width - expected).abs() < p().pow10(-50));
        let lo = e.lower.as_ref().unwrap();
        let hi = e.upper.as_ref().unwrap();
        assert!(*lo <= e.log_value && e.log_value <= *hi);
    }

    #[test]
    fn corollary_envelope_collapses_for_large_q() {
        let e = corollary35_estimate(100, 20, p()).unwrap();
        let width = Float::with_val(p().bits(), e.upper.as_ref().unwrap() - e.lower.as_ref().unwrap());
        // 2 q^2 / 2^{2q} (1/P + n/B) to first order, P and B the nominal factors.
        let wiggle = 2.0 * 400.0 / 2f64.powi(40);
        let prefactor = 1.0 + (400.0 - 120.0) / 2f64.powi(20);
        let base = 1.0 - 2f64.powi(-18);
        let expected = wiggle * (1.0 / prefactor + 100.0 / base);
        assert!((width.to_f64() / expected - 1.0).abs() < 1e-6);
        assert!(corollary35_estimate(100, 3, p()).is_err());
    }

    #[test]
    fn corollary_literal_form_is_far_from_hayman() {
        // The closed form uses 2^n (1 - 1/2^{q-2})^n while the saddle
        // base is 4 (1 - 2^{-q}); the gap grows like n log 2.
        let n = 500;
        let cor = corollary35_estimate(n, 8, p()).unwrap();
        let hay = hayman_estimate(n, 8, 1, p()).unwrap();
        let log_exact = log_nat(&coeff(n as u32, 8, n as i64), p().bits());
        assert!((cor.log_value.to_f64() - 335.080_367).abs() < 1e-5);
        assert!((hay.log_value.to_f64() - 686.725_866).abs() < 1e-5);
        assert_eq!(cor.envelope_contains(&log_exact), Some(false));
    }

    #[test]
    fn baselines() {
        let half = BaselineKind::Binomial { c_frac: f(0.5) };
        let e = baseline_estimate(&half, 100, p()).unwrap();
        let ratio = e.ratio_to(&crate::exact::binomial(100, 50)).to_f64();
        assert!((ratio - 1.0).abs() < 0.01);
        assert!(baseline_estimate(&BaselineKind::Binomial { c_frac: f(1.0) }, 10, p()).is_err());
        assert!(baseline_estimate(&BaselineKind::AndreSup { q: 1 }, 10, p()).is_err());
        assert!(baseline_estimate(&BaselineKind::TrinomialCentral, 0, p()).is_err());
    }

    #[test]
    fn ratio_table_shapes() {
        let rows = ratio_table(4, 1, &[50], p()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].ratio > 0 && rows[0].ratio.is_finite());

        let rows = ratio_table(6, 2, &[400, 100], p()).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![100, 400]);
        assert!(rows[1].error() < rows[0].error());
    }

    #[test]
    fn mirrored_index_gives_the_same_comparison() {
        let (n, q, c) = (60u32, 7u32, 2u32);
        let est = hayman_estimate(u64::from(n), q, c, p()).unwrap();
        let direct = coeff(n, q, i64::from(c * n));
        let mirrored = coeff(n, q, i64::from((q - 1) * n - c * n));
        assert_eq!(est.ratio_to(&direct), est.ratio_to(&mirrored));
    }
}
