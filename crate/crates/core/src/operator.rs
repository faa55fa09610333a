//! The bilinear fractional integral
//! T(f1, f2)(x) = iint f1(s) f2(t) (|x-s| + |x-t|)^(alpha-1) ds dt
//! on step-function inputs, together with its spatial integrals.
//!
//! Pointwise values come from exact box integrals: every support rectangle is
//! split at s = x and t = x into quadrants on which the kernel is a power of
//! a linear form, and each quadrant is a second difference of the
//! antiderivative w^(alpha+1) / (alpha (alpha+1)). Exactness here removes
//! quadrature error from every identity check built on top.

use crate::error::{Error, Result};
use crate::funcspace::StepFunction;
use crate::quad::{self, QuadOptions, QuadOutcome};

/// Numeric result of an adaptive quadrature: value, error estimate, count.
pub type QuadResult = QuadOutcome<f64>;

/// A fully specified operator application: two step-function factors and the
/// exponent offset alpha in (0, 1), i.e. order gamma = alpha + 1 in (1, 2).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorInstance {
    f1: StepFunction,
    f2: StepFunction,
    alpha: f64,
}

impl OperatorInstance {
    pub fn new(f1: StepFunction, f2: StepFunction, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(OperatorInstance { f1, f2, alpha })
    }

    pub fn f1(&self) -> &StepFunction {
        &self.f1
    }

    pub fn f2(&self) -> &StepFunction {
        &self.f2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Radius of the union of the two supports.
    pub fn support_radius(&self) -> f64 {
        self.f1.support_radius().max(self.f2.support_radius())
    }

    fn coefficient_boxes(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        let mut out = Vec::new();
        let b1 = self.f1.breakpoints();
        let b2 = self.f2.breakpoints();
        for (i, v) in self.f1.values().iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            for (j, w) in self.f2.values().iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                out.push((b1[i], b1[i + 1], b2[j], b2[j + 1], v * w));
            }
        }
        out
    }
}

/// antiderivative of w^(alpha-1) integrated twice: w^(alpha+1)/(alpha(alpha+1))
fn kernel_antideriv(w: f64, alpha: f64) -> f64 {
    w.powf(alpha + 1.0) / (alpha * (alpha + 1.0))
}

/// Box integral of (u + v)^(alpha-1) over [a,b] x [c,d] with all corners >= 0.
fn positive_quadrant_box(a: f64, b: f64, c: f64, d: f64, alpha: f64) -> f64 {
    kernel_antideriv(b + d, alpha) - kernel_antideriv(a + d, alpha)
        - kernel_antideriv(b + c, alpha)
        + kernel_antideriv(a + c, alpha)
}

fn box_integral_unchecked(x: f64, alpha: f64, c1: f64, d1: f64, c2: f64, d2: f64) -> f64 {
    // shift so the kink point sits at the origin, then split by sign and
    // reflect negative pieces onto the positive axis
    let (u1, u2) = (c1 - x, d1 - x);
    let (v1, v2) = (c2 - x, d2 - x);

    let mut parts_u: [(f64, f64); 2] = [(0.0, 0.0); 2];
    let mut nu = 0;
    if u1 < 0.0 {
        parts_u[nu] = ((-u2).max(0.0), -u1);
        nu += 1;
    }
    if u2 > 0.0 {
        parts_u[nu] = (u1.max(0.0), u2);
        nu += 1;
    }
    let mut parts_v: [(f64, f64); 2] = [(0.0, 0.0); 2];
    let mut nv = 0;
    if v1 < 0.0 {
        parts_v[nv] = ((-v2).max(0.0), -v1);
        nv += 1;
    }
    if v2 > 0.0 {
        parts_v[nv] = (v1.max(0.0), v2);
        nv += 1;
    }

    let mut acc = 0.0;
    for &(a, b) in &parts_u[..nu] {
        for &(c, d) in &parts_v[..nv] {
            acc += positive_quadrant_box(a, b, c, d, alpha);
        }
    }
    acc
}

/// iint over [c1,d1] x [c2,d2] of (|x-s| + |x-t|)^(alpha-1) ds dt,
/// in closed form. Finite and strictly positive for every x.
pub fn box_integral(x: f64, alpha: f64, c1: f64, d1: f64, c2: f64, d2: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if !(c1 < d1 && c2 < d2) {
        return Err(Error::InvalidBox);
    }
    Ok(box_integral_unchecked(x, alpha, c1, d1, c2, d2))
}

/// Pointwise operator value at x, exact up to rounding.
pub fn operator_eval(op: &OperatorInstance, x: f64) -> f64 {
    let mut acc = 0.0;
    for (c1, d1, c2, d2, coeff) in op.coefficient_boxes() {
        acc += coeff * box_integral_unchecked(x, op.alpha(), c1, d1, c2, d2);
    }
    acc
}

/// Independent route: 2D adaptive quadrature over the support rectangles,
/// with panels split along s = x and t = x so only the integrable point
/// singularity at s = t = x needs grading.
pub fn operator_eval_quadrature(op: &OperatorInstance, x: f64, tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let pairs = op.coefficient_boxes();
    if pairs.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let alpha = op.alpha();
    let per_pair_tol = tol / pairs.len() as f64;
    let budget = 40_000_000 / pairs.len();

    let mut total = QuadResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };
    for (c1, d1, c2, d2, coeff) in pairs {
        let boxes = split_box_at(x, c1, d1, c2, d2);
        let opts = QuadOptions::new(per_pair_tol / coeff.abs().max(1e-300))
            .with_max_evals(budget);
        let integrand =
            |s: f64, t: f64| ((x - s).abs() + (x - t).abs()).powf(alpha - 1.0);
        match quad::integrate_2d(integrand, &boxes, &opts) {
            Ok(o) => {
                total.value += coeff * o.value;
                total.error_estimate += coeff.abs() * o.error_estimate;
                total.evaluations += o.evaluations;
            }
            Err(e) => {
                return Err(Error::BudgetExceeded {
                    value: total.value + coeff * e.best.value,
                    error_estimate: total.error_estimate + coeff.abs() * e.best.error_estimate,
                    budget: e.budget,
                });
            }
        }
    }
    Ok(total)
}

fn split_box_at(x: f64, c1: f64, d1: f64, c2: f64, d2: f64) -> Vec<(f64, f64, f64, f64)> {
    let xs: Vec<f64> = if x > c1 && x < d1 {
        vec![c1, x, d1]
    } else {
        vec![c1, d1]
    };
    let ys: Vec<f64> = if x > c2 && x < d2 {
        vec![c2, x, d2]
    } else {
        vec![c2, d2]
    };
    let mut boxes = Vec::new();
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            boxes.push((wx[0], wx[1], wy[0], wy[1]));
        }
    }
    boxes
}

/// iint over [c1,d1] x [c2,d2] of |t - s|^alpha ds dt, in closed form via the
/// global antiderivative -|t-s|^(alpha+2)/((alpha+1)(alpha+2)), valid whether
/// or not the box straddles the diagonal.
pub fn abs_power_box_integral(c1: f64, d1: f64, c2: f64, d2: f64, alpha: f64) -> Result<f64> {
    if !(c1 < d1 && c2 < d2) {
        return Err(Error::InvalidBox);
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let b = |s: f64, t: f64| (t - s).abs().powf(alpha + 2.0) / ((alpha + 1.0) * (alpha + 2.0));
    Ok(-(b(d1, d2) - b(c1, d2) - b(d1, c2) + b(c1, c2)))
}

/// Closed form for the spatial integral of the operator:
/// ((alpha-1)/alpha) iint f1(s) f2(t) |t-s|^alpha ds dt.
///
/// The identity this value realizes requires at least one factor to have a
/// vanishing zeroth moment; violating inputs are rejected rather than
/// silently producing a number the identity does not cover.
pub fn integral_identity_rhs(op: &OperatorInstance) -> Result<f64> {
    let m1 = op.f1().moment(0);
    let m2 = op.f2().moment(0);
    if m1.abs() > 1e-12 && m2.abs() > 1e-12 {
        return Err(Error::MomentHypothesis { m1, m2 });
    }
    let mut acc = 0.0;
    for (c1, d1, c2, d2, coeff) in op.coefficient_boxes() {
        acc += coeff * abs_power_box_integral(c1, d1, c2, d2, op.alpha())?;
    }
    Ok((op.alpha() - 1.0) / op.alpha() * acc)
}

/// integral over [-R, R] of the operator output, exactly, by exchanging the
/// order of integration: each support rectangle contributes the closed-form
/// box integrals of the three truncated-kernel pieces.
pub fn operator_integral_truncated(op: &OperatorInstance, radius: f64) -> Result<f64> {
    let support = op.support_radius();
    if !(radius > support) {
        return Err(Error::RadiusTooSmall { radius, support });
    }
    let a = op.alpha();
    let denom = (a + 1.0) * (a + 2.0);
    let p2 = |w: f64| w.powf(a + 2.0) / denom;
    let mut acc = 0.0;
    for (c1, d1, c2, d2, coeff) in op.coefficient_boxes() {
        let gap_piece = (a - 1.0) / a * abs_power_box_integral(c1, d1, c2, d2, a)?;
        let plus = p2(2.0 * radius + d1 + d2) - p2(2.0 * radius + c1 + d2)
            - p2(2.0 * radius + d1 + c2)
            + p2(2.0 * radius + c1 + c2);
        let minus = p2(2.0 * radius - d1 - d2) - p2(2.0 * radius - c1 - d2)
            - p2(2.0 * radius - d1 - c2)
            + p2(2.0 * radius - c1 - c2);
        acc += coeff * (gap_piece + (plus + minus) / (2.0 * a));
    }
    Ok(acc)
}

/// Two-point Richardson extrapolation of `operator_integral_truncated` to
/// R -> infinity using the known tail exponent alpha - 2: when both factors
/// have vanishing zeroth moments, value(R) = V + c R^(alpha-2) + o(R^(alpha-2)).
pub fn operator_integral_extrapolated(op: &OperatorInstance, radius: f64) -> Result<f64> {
    let v1 = operator_integral_truncated(op, radius)?;
    let v2 = operator_integral_truncated(op, 2.0 * radius)?;
    let q = 2f64.powf(op.alpha() - 2.0);
    Ok((v2 - q * v1) / (1.0 - q))
}

/// The closed form of iint a1(s) a2(t) |t-s|^alpha ds dt for the built-in
/// atom pair: (4*3^(alpha+2) - 4^(alpha+2) - 6*2^(alpha+2) + 4) / ((alpha+1)(alpha+2)).
/// Strictly positive on the open interval (0, 1), vanishing at both endpoints.
pub fn counterexample_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let p = alpha + 2.0;
    Ok((4.0 * 3f64.powf(p) - 4f64.powf(p) - 6.0 * 2f64.powf(p) + 4.0)
        / ((alpha + 1.0) * (alpha + 2.0)))
}

/// Independent quadrature route for `counterexample_value`: 2D adaptive
/// integration of a1(s) a2(t) |t-s|^alpha over the support rectangles.
pub fn counterexample_value_quadrature(alpha: f64, tol: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let a1 = crate::funcspace::atom_a1();
    let a2 = crate::funcspace::atom_a2();
    let op = OperatorInstance::new(a1, a2, alpha)?;
    let pairs = op.coefficient_boxes();
    let per_pair_tol = tol / pairs.len() as f64;
    let mut acc = 0.0;
    for (c1, d1, c2, d2, coeff) in pairs {
        let opts = QuadOptions::new(per_pair_tol).with_max_evals(10_000_000);
        let out = quad::integrate_2d(|s, t| (t - s).abs().powf(alpha), &[(c1, d1, c2, d2)], &opts)
            .map_err(|e| e.into_crate_error())?;
        acc += coeff * out.value;
    }
    Ok(acc)
}
