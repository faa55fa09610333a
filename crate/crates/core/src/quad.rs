//! Adaptive Gauss-Kronrod quadrature, 1D and 2D.
//!
//! The 7/15 pair gives a cheap embedded error estimate; panels are kept in a
//! priority queue and the worst one is bisected (quadrisected in 2D) until the
//! summed estimate drops below the requested absolute tolerance or the
//! evaluation budget runs out. Callers pass initial split points at known
//! kinks and singular lines so the estimator never has to discover them.

use num_complex::Complex64;

/// 15-point Kronrod abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights for the odd-indexed abscissae of `XGK` (plus centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_95,
    0.417_959_183_673_469_4,
];

const EVALS_PER_PANEL: usize = 15;
const EVALS_PER_BOX: usize = 225;

/// Value types the quadrature engine can accumulate.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome<V> {
    pub value: V,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Budget exhaustion, carrying the best estimate reached so far.
#[derive(Debug, Clone, Copy)]
pub struct BudgetError<V> {
    pub best: QuadOutcome<V>,
    pub budget: usize,
}

impl<V> BudgetError<V> {
    pub fn into_crate_error(self) -> crate::Error
    where
        V: QuadValue,
    {
        crate::Error::BudgetExceeded {
            value: self.best.value.norm(),
            error_estimate: self.best.error_estimate,
            budget: self.budget,
        }
    }
}

/// Options for a single adaptive integration call.
#[derive(Debug, Clone)]
pub struct QuadOptions {
    /// Target absolute accuracy for the summed panel estimates.
    pub abs_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
    /// Interior points the initial panels must break at.
    pub split_points: Vec<f64>,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            max_evals: 2_000_000,
            split_points: Vec::new(),
        }
    }

    pub fn with_splits(mut self, splits: &[f64]) -> Self {
        self.split_points = splits.to_vec();
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }
}

/// One 7/15 panel: Kronrod value, error estimate, and |f| integral estimate.
fn gk15<V, F>(f: &F, a: f64, b: f64) -> (V, f64)
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center.scale(WGK[7]);
    let mut gauss = f_center.scale(WG[3]);
    let mut resabs = f_center.norm() * WGK[7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1.add(f2);
        kronrod = kronrod.add(sum.scale(WGK[j]));
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss.add(sum.scale(WG[j / 2]));
        }
    }

    let value = kronrod.scale(half);
    let raw_err = kronrod.sub(gauss).norm() * half.abs();
    // keep the estimate honest on panels where the difference underflows
    let floor = 50.0 * f64::EPSILON * resabs * half.abs();
    (value, raw_err.max(floor))
}

#[derive(Debug)]
struct Segment<V> {
    err: f64,
    a: f64,
    b: f64,
    value: V,
    refinable: bool,
}

/// A panel can be bisected as long as its midpoint is representable strictly
/// between the edges; this lets refinement grade all the way into an
/// endpoint singularity at 0 while still terminating at rounding scale.
fn splittable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a && mid < b
}

/// Adaptive 1D integration of `f` over `[a, b]`.
pub fn integrate<V, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadOutcome<V>, BudgetError<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if a == b {
        return Ok(QuadOutcome {
            value: V::zero(),
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut edges: Vec<f64> = vec![lo];
    let mut splits: Vec<f64> = opts
        .split_points
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    splits.sort_by(f64::total_cmp);
    splits.dedup();
    edges.extend(splits);
    edges.push(hi);

    let mut evals = 0usize;
    let mut segments: Vec<Segment<V>> = Vec::new();
    for w in edges.windows(2) {
        let (value, err) = gk15(&f, w[0], w[1]);
        evals += EVALS_PER_PANEL;
        segments.push(Segment {
            err,
            a: w[0],
            b: w[1],
            value,
            refinable: splittable(w[0], w[1]),
        });
    }

    loop {
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        if total_err <= opts.abs_tol {
            break;
        }
        // worst refinable panel; ties broken by left edge for determinism
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.refinable)
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err).then(y.a.total_cmp(&x.a)))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(make_budget_error(&segments, sign, evals, opts.max_evals));
        };
        if evals + 2 * EVALS_PER_PANEL > opts.max_evals {
            return Err(make_budget_error(&segments, sign, evals, opts.max_evals));
        }
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        for (x0, x1) in [(seg.a, mid), (mid, seg.b)] {
            let (value, err) = gk15(&f, x0, x1);
            evals += EVALS_PER_PANEL;
            segments.push(Segment {
                err,
                a: x0,
                b: x1,
                value,
                refinable: splittable(x0, x1),
            });
        }
    }

    let mut value = V::zero();
    let mut err = 0.0;
    for s in &segments {
        value = value.add(s.value);
        err += s.err;
    }
    Ok(QuadOutcome {
        value: value.scale(sign),
        error_estimate: err,
        evaluations: evals,
    })
}

fn make_budget_error<V: QuadValue>(
    segments: &[Segment<V>],
    sign: f64,
    evals: usize,
    budget: usize,
) -> BudgetError<V> {
    let mut value = V::zero();
    let mut err = 0.0;
    for s in segments {
        value = value.add(s.value);
        err += s.err;
    }
    BudgetError {
        best: QuadOutcome {
            value: value.scale(sign),
            error_estimate: err,
            evaluations: evals,
        },
        budget,
    }
}

/// Split points covering at most half an oscillation of frequency `freq`
/// per panel over `[a, b]`.
pub fn oscillation_splits(a: f64, b: f64, freq: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if freq.abs() <= f64::EPSILON || a >= b {
        return pts;
    }
    let width = std::f64::consts::PI / freq.abs();
    let n = ((b - a) / width).ceil() as usize;
    if n <= 1 || n > 100_000 {
        return pts;
    }
    let h = (b - a) / n as f64;
    for k in 1..n {
        pts.push(a + h * k as f64);
    }
    pts
}

// ---------------------------------------------------------------------------
// 2D tensor-product rule with quadrisection refinement
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Box2 {
    err: f64,
    c1: f64,
    d1: f64,
    c2: f64,
    d2: f64,
    value: f64,
    refinable: bool,
}

/// Tensor 7/15 rule on one box.
fn gk15_2d<F>(f: &F, c1: f64, d1: f64, c2: f64, d2: f64) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let cx = 0.5 * (c1 + d1);
    let hx = 0.5 * (d1 - c1);
    let cy = 0.5 * (c2 + d2);
    let hy = 0.5 * (d2 - c2);

    // sample the full 15x15 grid once
    let mut nodes_x = [0.0f64; 15];
    let mut nodes_y = [0.0f64; 15];
    let mut wk_x = [0.0f64; 15];
    let mut wk_y = [0.0f64; 15];
    for j in 0..7 {
        nodes_x[j] = cx - hx * XGK[j];
        nodes_x[14 - j] = cx + hx * XGK[j];
        nodes_y[j] = cy - hy * XGK[j];
        nodes_y[14 - j] = cy + hy * XGK[j];
        wk_x[j] = WGK[j];
        wk_x[14 - j] = WGK[j];
        wk_y[j] = WGK[j];
        wk_y[14 - j] = WGK[j];
    }
    nodes_x[7] = cx;
    nodes_y[7] = cy;
    wk_x[7] = WGK[7];
    wk_y[7] = WGK[7];

    // Gauss weights on the shared odd-indexed nodes (1,3,5,7,9,11,13)
    let mut wg_x = [0.0f64; 15];
    for j in 0..3 {
        wg_x[2 * j + 1] = WG[j];
        wg_x[13 - 2 * j] = WG[j];
    }
    wg_x[7] = WG[3];

    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, &x) in nodes_x.iter().enumerate() {
        for (j, &y) in nodes_y.iter().enumerate() {
            let v = f(x, y);
            kronrod += wk_x[i] * wk_y[j] * v;
            if i % 2 == 1 && j % 2 == 1 {
                gauss += wg_x[i] * wg_x[j] * v;
            }
        }
    }
    let scale = hx * hy;
    let value = kronrod * scale;
    let err = (kronrod - gauss).abs() * scale.abs();
    let floor = 50.0 * f64::EPSILON * value.abs();
    (value, err.max(floor))
}

/// Adaptive 2D integration over a union of disjoint boxes `(c1, d1, c2, d2)`.
pub fn integrate_2d<F>(
    f: F,
    boxes: &[(f64, f64, f64, f64)],
    opts: &QuadOptions,
) -> Result<QuadOutcome<f64>, BudgetError<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let mut evals = 0usize;
    let mut cells: Vec<Box2> = Vec::new();
    for &(c1, d1, c2, d2) in boxes {
        if c1 >= d1 || c2 >= d2 {
            continue;
        }
        let (value, err) = gk15_2d(&f, c1, d1, c2, d2);
        evals += EVALS_PER_BOX;
        cells.push(Box2 {
            err,
            c1,
            d1,
            c2,
            d2,
            value,
            refinable: splittable(c1, d1) && splittable(c2, d2),
        });
    }

    loop {
        let total_err: f64 = cells.iter().map(|b| b.err).sum();
        if total_err <= opts.abs_tol {
            break;
        }
        let worst = cells
            .iter()
            .enumerate()
            .filter(|(_, b)| b.refinable)
            .max_by(|(_, x), (_, y)| {
                x.err
                    .total_cmp(&y.err)
                    .then(y.c1.total_cmp(&x.c1))
                    .then(y.c2.total_cmp(&x.c2))
            })
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(budget_error_2d(&cells, evals, opts.max_evals));
        };
        if evals + 4 * EVALS_PER_BOX > opts.max_evals {
            return Err(budget_error_2d(&cells, evals, opts.max_evals));
        }
        let b = cells.swap_remove(idx);
        let mx = 0.5 * (b.c1 + b.d1);
        let my = 0.5 * (b.c2 + b.d2);
        for (x0, x1) in [(b.c1, mx), (mx, b.d1)] {
            for (y0, y1) in [(b.c2, my), (my, b.d2)] {
                let (value, err) = gk15_2d(&f, x0, x1, y0, y1);
                evals += EVALS_PER_BOX;
                cells.push(Box2 {
                    err,
                    c1: x0,
                    d1: x1,
                    c2: y0,
                    d2: y1,
                    value,
                    refinable: splittable(x0, x1) && splittable(y0, y1),
                });
            }
        }
    }

    let mut value = 0.0;
    let mut err = 0.0;
    for b in &cells {
        value += b.value;
        err += b.err;
    }
    Ok(QuadOutcome {
        value,
        error_estimate: err,
        evaluations: evals,
    })
}

fn budget_error_2d(cells: &[Box2], evals: usize, budget: usize) -> BudgetError<f64> {
    let mut value = 0.0;
    let mut err = 0.0;
    for b in cells {
        value += b.value;
        err += b.err;
    }
    BudgetError {
        best: QuadOutcome {
            value,
            error_estimate: err,
            evaluations: evals,
        },
        budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        let wgk_sum: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let wg_sum: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert_relative_eq!(wgk_sum, 2.0, max_relative = 1e-15);
        assert_relative_eq!(wg_sum, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        // Kronrod-15 integrates degree <= 22 exactly; check a few monomials
        let opts = QuadOptions::new(1e-12);
        for k in [4usize, 9, 13] {
            let out = integrate(|x: f64| x.powi(k as i32), 0.0, 1.0, &opts).unwrap();
            assert_relative_eq!(out.value, 1.0 / (k as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn smooth_integral() {
        let opts = QuadOptions::new(1e-12);
        let out = integrate(|x: f64| x.exp(), 0.0, 1.0, &opts).unwrap();
        assert_relative_eq!(out.value, std::f64::consts::E - 1.0, max_relative = 1e-13);
        assert!(out.error_estimate <= 1e-12);
    }

    #[test]
    fn endpoint_singularity_graded_by_refinement() {
        // integral of x^(-1/2) over (0, 1] = 2; the nodes never touch 0
        let opts = QuadOptions::new(1e-10).with_max_evals(500_000);
        let out = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, &opts).unwrap();
        assert_relative_eq!(out.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn oscillatory_with_splits() {
        // integral of sin(50 x) over [0, pi] = (1 - cos(50 pi))/50 = 0
        let splits = oscillation_splits(0.0, std::f64::consts::PI, 50.0);
        let opts = QuadOptions::new(1e-12).with_splits(&splits);
        let out = integrate(|x: f64| (50.0 * x).sin(), 0.0, std::f64::consts::PI, &opts).unwrap();
        assert!(out.value.abs() < 1e-11, "got {}", out.value);
    }

    #[test]
    fn complex_integrand() {
        // integral over [0, 1] of e^{i x} = sin 1 + i(1 - cos 1)
        let opts = QuadOptions::new(1e-13);
        let out = integrate(
            |x: f64| Complex64::new(x.cos(), x.sin()),
            0.0,
            1.0,
            &opts,
        )
        .unwrap();
        assert_relative_eq!(out.value.re, 1f64.sin(), max_relative = 1e-13);
        assert_relative_eq!(out.value.im, 1.0 - 1f64.cos(), max_relative = 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let opts = QuadOptions::new(1e-12);
        let fwd = integrate(|x: f64| x * x, 0.0, 2.0, &opts).unwrap();
        let rev = integrate(|x: f64| x * x, 2.0, 0.0, &opts).unwrap();
        assert_relative_eq!(fwd.value, -rev.value, max_relative = 1e-14);
    }

    #[test]
    fn budget_error_carries_best_estimate() {
        let opts = QuadOptions::new(1e-30).with_max_evals(200);
        let err = integrate(|x: f64| x.sqrt().recip(), 1e-300, 1.0, &opts).unwrap_err();
        assert!(err.best.evaluations <= 200);
        assert!(err.best.value > 0.0);
    }

    #[test]
    fn two_dimensional_smooth() {
        let opts = QuadOptions::new(1e-11);
        let out = integrate_2d(|x, y| x * y + 1.0, &[(0.0, 1.0, 0.0, 1.0)], &opts).unwrap();
        assert_relative_eq!(out.value, 1.25, max_relative = 1e-13);
    }

    #[test]
    fn two_dimensional_corner_singularity() {
        // iint over [0,1]^2 of (x + y)^(-1/2) = (2/3)*(2*2^(3/2) - 4) ... check
        // against the elementary antiderivative value 4(sqrt(2) - 1)*2/3
        let opts = QuadOptions::new(1e-9).with_max_evals(3_000_000);
        let out = integrate_2d(
            |x, y| (x + y).sqrt().recip(),
            &[(0.0, 1.0, 0.0, 1.0)],
            &opts,
        )
        .unwrap();
        let exact = (8.0 / 3.0) * (std::f64::consts::SQRT_2 - 1.0);
        assert_relative_eq!(out.value, exact, max_relative = 1e-8);
    }
}
