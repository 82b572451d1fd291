//! Composite Gauss-Legendre quadrature at MPFR precision, and the
//! trigonometric-integral route to `C(n, q, k)`:
//!
//! ```text
//! C(n, q, k) = (2/pi) * int_0^{pi/2} (sin(q t) / sin t)^n cos(((q-1)n - 2k) t) dt
//! ```
//!
//! The integrand is bounded by `q^n` and oscillates with frequency up to
//! `2(q-1)n`, so the panel count scales with `n q` and the working precision
//! is raised by `n log2 q` bits to absorb the cancellation.

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Result};
use crate::real::{Precision, Real};

/// Largest `n` the integral route accepts.
pub const MAX_QUADRATURE_N: u32 = 30;

/// Nodes per panel. With `n q` panels a panel spans at most half a period of
/// the fastest component, where 24 nodes are far below the target error.
const ORDER: usize = 24;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

impl GaussLegendre {
    /// Computes the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize, bits: u32) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let m = order as u32;
        let pi = Float::with_val(bits, rug::float::Constant::Pi);
        let tol = Float::with_val(bits, Float::u_exp(1, 8 - bits as i32));
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 1..=m {
            // Tricomi's initial guess.
            let mut x = Float::with_val(bits, &pi * (f64::from(i) - 0.25)) / (f64::from(m) + 0.5);
            x.cos_mut();
            let mut deriv;
            let mut iters = 0;
            loop {
                let (p, dp) = legendre(m, &x);
                deriv = dp;
                let step = Float::with_val(bits, &p / &deriv);
                x -= &step;
                iters += 1;
                if step.abs() <= tol || iters > 200 {
                    break;
                }
            }
            let (_, dp) = legendre(m, &x);
            deriv = dp;
            let one_minus_x2 = Float::with_val(bits, 1) - Float::with_val(bits, x.square_ref());
            let w = Float::with_val(bits, 2) / (one_minus_x2 * deriv.square());
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// Maps the rule onto each of `panels` equal subintervals of `[a, b]` and
    /// calls `visit(t, w)` for every (abscissa, weight) pair.
    pub fn for_each_point(&self, a: &Real, b: &Real, panels: usize, mut visit: impl FnMut(&Real, &Real)) {
        let bits = a.prec().max(b.prec());
        let width = Float::with_val(bits, b - a) / panels as u32;
        let half = Float::with_val(bits, &width / 2u32);
        for p in 0..panels {
            let mid = Float::with_val(bits, a + Float::with_val(bits, &width * (p as u32))) + &half;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let t = Float::with_val(bits, &half * x) + &mid;
                let wt = Float::with_val(bits, &half * w);
                visit(&t, &wt);
            }
        }
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn integrate(&self, a: &Real, b: &Real, panels: usize, mut f: impl FnMut(&Real) -> Real) -> Real {
        let bits = a.prec().max(b.prec());
        let mut total = Float::new(bits);
        self.for_each_point(a, b, panels, |t, w| total += f(t) * w);
        total
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: u32, x: &Real) -> (Real, Real) {
    let bits = x.prec();
    let mut p_prev = Float::with_val(bits, 1);
    let mut p = x.clone();
    for j in 2..=m {
        let next =
            (Float::with_val(bits, x * &p) * (2 * j - 1) - Float::with_val(bits, &p_prev * (j - 1))) / j;
        p_prev = std::mem::replace(&mut p, next);
    }
    if m == 0 {
        return (Float::with_val(bits, 1), Float::new(bits));
    }
    // P'_m = m (x P_m - P_{m-1}) / (x^2 - 1)
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let dp = (Float::with_val(bits, x * &p) - &p_prev) * m / x2m1;
    (p, dp)
}

fn check_args(n: u32, q: u32) -> Result<()> {
    if q < 2 {
        return domain("coeff_quadrature requires q >= 2");
    }
    if n > MAX_QUADRATURE_N {
        return domain(format!(
            "coeff_quadrature supports n <= {MAX_QUADRATURE_N} (oscillation limit), got n = {n}"
        ));
    }
    Ok(())
}

/// Working bits: requested precision plus headroom for the `q^n` magnitude.
fn working_bits(n: u32, q: u32, prec: Precision) -> u32 {
    let growth = (f64::from(n) * f64::from(q).log2()).ceil() as u32;
    prec.bits() + growth + 32
}

fn panels(n: u32, q: u32) -> usize {
    (n as usize * q as usize).max(2)
}

/// `(sin(q t) / sin t)^n`, using the limit `q^n` where `sin t = 0`.
fn kernel(t: &Real, n: u32, q: u32) -> Real {
    let bits = t.prec();
    let s = Float::with_val(bits, t.sin_ref());
    if s.is_zero() {
        return Float::with_val(bits, q).pow(n);
    }
    let sq = Float::with_val(bits, t * q).sin();
    (sq / s).pow(n)
}

/// Numerical value of `C(n, q, k)` from the trigonometric integral.
pub fn coeff_quadrature(n: u32, q: u32, k: u64, prec: Precision) -> Result<Real> {
    check_args(n, q)?;
    let deg = u64::from(q - 1) * u64::from(n);
    if k > deg {
        return domain(format!("coeff_quadrature requires k <= (q-1)n = {deg}, got k = {k}"));
    }
    let bits = working_bits(n, q, prec);
    let rule = GaussLegendre::new(ORDER, bits);
    let freq = deg as i64 - 2 * k as i64;
    let zero = Float::new(bits);
    let half_pi = Float::with_val(bits, rug::float::Constant::Pi) / 2u32;
    let integral = rule.integrate(&zero, &half_pi, panels(n, q), |t| {
        let c = Float::with_val(bits, t * freq).cos();
        kernel(t, n, q) * c
    });
    Ok(finish(integral, prec))
}

/// The whole row `k = 0..=(q-1)n` from one pass over the quadrature nodes.
///
/// `cos(j t)` for all needed `j` comes from the Chebyshev recurrence
/// `cos((j+2)t) = 2 cos(2t) cos(jt) - cos((j-2)t)`.
pub fn quadrature_row(n: u32, q: u32, prec: Precision) -> Result<Vec<Real>> {
    check_args(n, q)?;
    let deg = (q as usize - 1) * n as usize;
    let bits = working_bits(n, q, prec);
    let rule = GaussLegendre::new(ORDER, bits);
    let zero = Float::new(bits);
    let half_pi = Float::with_val(bits, rug::float::Constant::Pi) / 2u32;
    let parity = (deg % 2) as u32;
    // Frequencies |deg - 2k| take the values parity, parity + 2, ..., deg.
    let mut sums = vec![Float::new(bits); deg / 2 + 1];
    rule.for_each_point(&zero, &half_pi, panels(n, q), |t, w| {
        let g = kernel(t, n, q) * w;
        let cos2 = Float::with_val(bits, t * 2u32).cos();
        // cos((parity - 2) t) = cos((2 - parity) t)
        let mut prev = Float::with_val(bits, t * (2 - parity)).cos();
        let mut current = Float::with_val(bits, t * parity).cos();
        for (idx, slot) in sums.iter_mut().enumerate() {
            if idx > 0 {
                let next = Float::with_val(bits, &cos2 * &current) * 2u32 - &prev;
                prev = std::mem::replace(&mut current, next);
            }
            *slot += Float::with_val(bits, &g * &current);
        }
    });
    // sums[idx] holds frequency parity + 2 idx, i.e. k = (deg - parity)/2 - idx
    // and its mirror deg - k.
    let mut row = vec![Float::new(prec.bits()); deg + 1];
    for (idx, s) in sums.into_iter().enumerate() {
        let freq = parity as usize + 2 * idx;
        let k = (deg - freq) / 2;
        let value = finish(s, prec);
        row[deg - k] = value.clone();
        row[k] = value;
    }
    Ok(row)
}

fn finish(integral: Real, prec: Precision) -> Real {
    let bits = integral.prec();
    let scale = Float::with_val(bits, 2u32) / Float::with_val(bits, rug::float::Constant::Pi);
    Float::with_val(prec.bits(), integral * scale)
}
