//! Smooth maximal-function diagnostics.
//!
//! The maximal function M f(x) = sup over t > 0 of |(phi_t * f)(x)|, with
//! phi the unit-mass Gaussian and phi_t(x) = phi(x/t)/t, decides membership
//! in the Hardy spaces: its L^p norm is the H^p quasi-norm. For step
//! functions the convolution is a closed-form sum of normal-CDF differences;
//! for operator outputs it is quadrature of the exact pointwise values
//! against the Gaussian. The sup over dilations is taken on a saturated
//! dyadic grid with golden-section refinement in log t.
//!
//! The headline diagnostic: the truncated L^1 norm of M applied to the
//! operator output on the built-in atom pair grows like a constant times
//! ln R, because a nonzero spatial integral forces a c/|x| envelope; the
//! same norm for a single atom (vanishing integral) stabilizes.

use crate::error::{Error, Result};
use crate::funcspace::StepFunction;
use crate::operator::{self, OperatorInstance};
use crate::quad::{self, QuadOptions};
use crate::special::{normal_cdf, normal_pdf};
use serde::{Deserialize, Serialize};

/// sup over u of u phi(u) for the unit-mass Gaussian: the one-bump envelope
/// constant relating M f(x) to |integral f| / |x| at large |x|.
pub fn envelope_constant() -> f64 {
    normal_pdf(1.0)
}

/// Dilation grid for the sup over t: dyadic exponents [k_min, k_max] plus
/// golden-section refinement steps around the best dyadic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationGrid {
    pub k_min: i32,
    pub k_max: i32,
    pub refine: u32,
}

impl Default for DilationGrid {
    fn default() -> Self {
        // saturated for every profile point used in reports: widening past
        // 2^+-12 moves values by less than 1e-6 relative
        DilationGrid {
            k_min: -12,
            k_max: 12,
            refine: 28,
        }
    }
}

impl DilationGrid {
    pub fn new(k_min: i32, k_max: i32, refine: u32) -> Result<Self> {
        if k_min >= k_max {
            return Err(Error::InvalidDilationRange { k_min, k_max });
        }
        Ok(DilationGrid {
            k_min,
            k_max,
            refine,
        })
    }

    pub fn t_range(&self) -> (f64, f64) {
        (2f64.powi(self.k_min), 2f64.powi(self.k_max))
    }
}

/// (phi_t * f)(x) in closed form: sum of scaled normal-CDF differences over
/// the step intervals, with phi the unit-mass Gaussian.
pub fn gaussian_smooth(f: &StepFunction, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTolerance(t));
    }
    let bp = f.breakpoints();
    let mut acc = 0.0;
    for (i, v) in f.values().iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        acc += v * (normal_cdf((x - bp[i]) / t) - normal_cdf((x - bp[i + 1]) / t));
    }
    Ok(acc)
}

/// Golden-section maximization of |g(2^tau)| over tau in [lo, hi].
fn refine_log_dyadic<G: Fn(f64) -> Result<f64>>(
    g: &G,
    mut lo: f64,
    mut hi: f64,
    iterations: u32,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let eval = |tau: f64| -> Result<f64> { Ok(g(2f64.powf(tau))?.abs()) };
    let mut best = eval(0.5 * (lo + hi))?;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..iterations {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        }
        best = best.max(f1.max(f2));
    }
    Ok(best)
}

fn dyadic_sup<G: Fn(f64) -> Result<f64>>(g: &G, grid: &DilationGrid) -> Result<f64> {
    let mut best_k = grid.k_min;
    let mut best = 0.0f64;
    for k in grid.k_min..=grid.k_max {
        let v = g(2f64.powi(k))?.abs();
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let refined = refine_log_dyadic(g, (best_k - 1) as f64, (best_k + 1) as f64, grid.refine)?;
    Ok(best.max(refined))
}

/// M f(x): sup of |phi_t * f| over the dilation grid.
pub fn maximal_function(f: &StepFunction, x: f64, grid: &DilationGrid) -> Result<f64> {
    if grid.k_min >= grid.k_max {
        return Err(Error::InvalidDilationRange {
            k_min: grid.k_min,
            k_max: grid.k_max,
        });
    }
    dyadic_sup(&|t: f64| gaussian_smooth(f, t, x), grid)
}

/// (phi_t * T(f1,f2))(x) by adaptive quadrature of the closed-form operator
/// values against the Gaussian. No closed form exists for this convolution.
pub fn operator_smooth(op: &OperatorInstance, t: f64, x: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTolerance(t));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    // beyond ten standard deviations the Gaussian mass against an L1
    // function is far below every tolerance used here
    let lo = x - 10.0 * t;
    let hi = x + 10.0 * t;
    let norm = (2.0 * std::f64::consts::PI).sqrt() * t;

    let mut splits: Vec<f64> = op
        .f1()
        .breakpoints()
        .iter()
        .chain(op.f2().breakpoints().iter())
        .copied()
        .collect();
    splits.push(x);
    for j in [1.0, 2.0, 4.0, 6.0, 8.0] {
        splits.push(x - j * t);
        splits.push(x + j * t);
    }
    let opts = QuadOptions::new(tol)
        .with_splits(&splits)
        .with_max_evals(2_000_000);
    let out = quad::integrate(
        |y: f64| {
            let u = (x - y) / t;
            operator::operator_eval(op, y) * (-0.5 * u * u).exp() / norm
        },
        lo,
        hi,
        &opts,
    )
    .map_err(|e| e.into_crate_error())?;
    Ok(out.value)
}

/// M applied to the operator output at one point.
pub fn maximal_function_of_operator(
    op: &OperatorInstance,
    x: f64,
    grid: &DilationGrid,
    tol: f64,
) -> Result<f64> {
    dyadic_sup(&|t: f64| operator_smooth(op, t, x, tol), grid)
}

/// Sampled maximal-function profile on an increasing grid, with the dilation
/// range the sup was taken over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalProfile {
    pub sample_points: Vec<f64>,
    pub values: Vec<f64>,
    pub dilation_range: (f64, f64),
}

impl MaximalProfile {
    pub fn coverage(&self) -> (f64, f64) {
        (
            *self.sample_points.first().unwrap_or(&0.0),
            *self.sample_points.last().unwrap_or(&0.0),
        )
    }
}

/// Symmetric sample grid for profiles: a uniform core over [-4, 4] and
/// dyadic rings with a fixed panel count out to `radius`, so every dyadic
/// truncation radius lands exactly on a grid point.
pub fn profile_grid(radius: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let core = 4.0f64.min(radius);
    let n_core = 128;
    for i in 0..=n_core {
        pts.push(-core + 2.0 * core * i as f64 / n_core as f64);
    }
    let per_ring = 16;
    let mut lo = core;
    while lo < radius {
        let hi = (2.0 * lo).min(radius);
        for i in 1..=per_ring {
            let y = lo + (hi - lo) * i as f64 / per_ring as f64;
            pts.push(y);
            pts.push(-y);
        }
        lo = hi;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Profile of M f over `profile_grid(radius)` for a step function.
pub fn step_maximal_profile(
    f: &StepFunction,
    radius: f64,
    grid: &DilationGrid,
) -> Result<MaximalProfile> {
    let pts = profile_grid(radius);
    let values: Result<Vec<f64>> = pts.iter().map(|x| maximal_function(f, *x, grid)).collect();
    Ok(MaximalProfile {
        sample_points: pts,
        values: values?,
        dilation_range: grid.t_range(),
    })
}

/// Profile of M T(f1,f2) over `profile_grid(radius)`; sample points are
/// independent, so they are computed in parallel and stored in grid order.
pub fn operator_maximal_profile(
    op: &OperatorInstance,
    radius: f64,
    grid: &DilationGrid,
    tol: f64,
) -> Result<MaximalProfile> {
    use rayon::prelude::*;
    let pts = profile_grid(radius);
    let values: Result<Vec<f64>> = pts
        .par_iter()
        .map(|x| maximal_function_of_operator(op, *x, grid, tol))
        .collect();
    Ok(MaximalProfile {
        sample_points: pts,
        values: values?,
        dilation_range: grid.t_range(),
    })
}

/// Truncated L^p quasi-norm of a sampled profile over [-R, R]: composite
/// trapezoid of values^p on the stored grid, linearly interpolated at the
/// cut, raised to 1/p.
pub fn truncated_lp_norm(profile: &MaximalProfile, p: f64, radius: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NonPositiveTolerance(p));
    }
    let (lo, hi) = profile.coverage();
    if !(radius > 0.0) || lo > -radius || hi < radius {
        return Err(Error::ProfileCoverage { lo, hi, radius });
    }
    let xs = &profile.sample_points;
    let vs = &profile.values;
    let value_at = |x: f64| -> f64 {
        match xs.binary_search_by(|q| q.total_cmp(&x)) {
            Ok(i) => vs[i],
            Err(i) => {
                let (x0, x1) = (xs[i - 1], xs[i]);
                let w = (x - x0) / (x1 - x0);
                vs[i - 1] * (1.0 - w) + vs[i] * w
            }
        }
    };
    let mut acc = 0.0;
    let mut prev_x = -radius;
    let mut prev_v = value_at(-radius).powf(p);
    for (x, v) in xs.iter().zip(vs.iter()) {
        if *x <= -radius {
            continue;
        }
        let (cx, cv) = if *x >= radius {
            (radius, value_at(radius).powf(p))
        } else {
            (*x, v.powf(p))
        };
        acc += 0.5 * (prev_v + cv) * (cx - prev_x);
        prev_x = cx;
        prev_v = cv;
        if *x >= radius {
            break;
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Growth verdict for a truncated-norm sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Diverging,
    Converging,
}

/// Truncated L^1 norms of a maximal function over dyadic radii, the fitted
/// slope against ln R, and the one-bump prediction it is compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub radii: Vec<f64>,
    pub truncated_norms: Vec<f64>,
    pub fitted_slope_vs_log_r: f64,
    pub predicted_slope: f64,
    pub verdict: Verdict,
}

impl DivergenceReport {
    /// (R, truncated_norm) rows for CSV emission.
    pub fn norm_rows(&self) -> Vec<(f64, f64)> {
        self.radii
            .iter()
            .copied()
            .zip(self.truncated_norms.iter().copied())
            .collect()
    }
}

/// Least-squares slope of the norms against ln R over the last three radii.
fn fitted_slope(radii: &[f64], norms: &[f64]) -> f64 {
    let n = radii.len();
    let take = 3.min(n);
    let xs: Vec<f64> = radii[n - take..].iter().map(|r| r.ln()).collect();
    let ys = &norms[n - take..];
    let mx = xs.iter().sum::<f64>() / take as f64;
    let my = ys.iter().sum::<f64>() / take as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

fn verdict_for(slope: f64, predicted: f64, norms: &[f64]) -> Verdict {
    if predicted > 1e-12 {
        if slope > 0.5 * predicted {
            Verdict::Diverging
        } else {
            Verdict::Converging
        }
    } else {
        // no predicted growth: call it diverging only on more than 1%
        // relative growth over the last dyadic step
        let n = norms.len();
        let last = norms[n - 1];
        let prev = norms[n - 2].max(f64::MIN_POSITIVE);
        if (last - prev) / prev > 0.01 {
            Verdict::Diverging
        } else {
            Verdict::Converging
        }
    }
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[0] < w[1])) || radii[0] <= 0.0 {
        return Err(Error::InvalidBreakpoints);
    }
    Ok(())
}

/// The H^1-failure demonstration: truncated L^1 norms of M T(a1, a2) against
/// dyadic radii, fitted slope versus ln R, and the predicted slope
/// 2 envelope_constant |integral T|, with integral T from the closed-form
/// identity. Requires the identity hypothesis and a nonzero integral.
pub fn h1_divergence_report(
    op: &OperatorInstance,
    radii: &[f64],
    grid: &DilationGrid,
    tol: f64,
) -> Result<DivergenceReport> {
    validate_radii(radii)?;
    let integral = operator::integral_identity_rhs(op)?;
    let radius = *radii.last().unwrap();
    let profile = operator_maximal_profile(op, radius, grid, tol)?;
    let norms: Result<Vec<f64>> = radii
        .iter()
        .map(|r| truncated_lp_norm(&profile, 1.0, *r))
        .collect();
    let norms = norms?;
    let slope = fitted_slope(radii, &norms);
    let predicted = 2.0 * envelope_constant() * integral.abs();
    Ok(DivergenceReport {
        radii: radii.to_vec(),
        truncated_norms: norms.clone(),
        fitted_slope_vs_log_r: slope,
        predicted_slope: predicted,
        verdict: verdict_for(slope, predicted, &norms),
    })
}

/// Control report: the same truncated-norm scan for M of a single step
/// function, predicted slope 2 envelope_constant |integral f|.
pub fn step_divergence_report(
    f: &StepFunction,
    radii: &[f64],
    grid: &DilationGrid,
) -> Result<DivergenceReport> {
    validate_radii(radii)?;
    let radius = *radii.last().unwrap();
    let profile = step_maximal_profile(f, radius, grid)?;
    let norms: Result<Vec<f64>> = radii
        .iter()
        .map(|r| truncated_lp_norm(&profile, 1.0, *r))
        .collect();
    let norms = norms?;
    let slope = fitted_slope(radii, &norms);
    let predicted = 2.0 * envelope_constant() * f.moment(0).abs();
    Ok(DivergenceReport {
        radii: radii.to_vec(),
        truncated_norms: norms.clone(),
        fitted_slope_vs_log_r: slope,
        predicted_slope: predicted,
        verdict: verdict_for(slope, predicted, &norms),
    })
}
