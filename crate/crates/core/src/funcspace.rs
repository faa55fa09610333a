//! Compactly supported step functions: the atom type every operator input
//! uses. Construction validates the breakpoint grid; integration and moments
//! are closed-form polynomial sums, never quadrature.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A piecewise-constant function with bounded support.
///
/// `values[i]` is the value on the open interval `(breakpoints[i],
/// breakpoints[i+1])`; the function is identically zero outside
/// `[breakpoints.first(), breakpoints.last()]`. Point evaluation at a
/// breakpoint follows the right-limit convention, which is irrelevant to
/// every integral computed from it but keeps evaluation deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Build a step function from its breakpoint grid and interval values.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidBreakpoints);
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidBreakpoints);
        }
        if values.len() != breakpoints.len() - 1 {
            return Err(Error::ValueCountMismatch {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len() - 1,
                got: values.len(),
            });
        }
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right-limit evaluation; exactly zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        if x < self.breakpoints[0] || x >= self.breakpoints[n - 1] {
            return 0.0;
        }
        // index of the interval whose left edge is <= x
        let idx = match self
            .breakpoints
            .binary_search_by(|b| b.total_cmp(&x))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Smallest closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    /// max(|a|, |b|) over the support interval [a, b].
    pub fn support_radius(&self) -> f64 {
        let (a, b) = self.support();
        a.abs().max(b.abs())
    }

    /// k-th moment, integral of x^k f(x) dx, in closed form.
    pub fn moment(&self, k: u32) -> f64 {
        let p = k as i32 + 1;
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let lo = self.breakpoints[i];
            let hi = self.breakpoints[i + 1];
            acc += v * (hi.powi(p) - lo.powi(p)) / p as f64;
        }
        acc
    }

    /// Shift the function right by `h`: the result at x equals self at x - h.
    pub fn translate(&self, h: f64) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.iter().map(|b| b + h).collect(),
            values: self.values.clone(),
        }
    }

    /// Pointwise scalar multiple.
    pub fn scale(&self, c: f64) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Dilation: the result at x equals self at lambda * x, for lambda > 0.
    pub fn dilate(&self, lambda: f64) -> Result<StepFunction> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidBreakpoints);
        }
        Ok(StepFunction {
            breakpoints: self.breakpoints.iter().map(|b| b / lambda).collect(),
            values: self.values.clone(),
        })
    }

    /// Pointwise sum on the merged breakpoint grid. Duplicated breakpoints
    /// coalesce and identical adjacent values merge, so the representation
    /// stays canonical.
    pub fn add(&self, other: &StepFunction) -> StepFunction {
        let mut grid: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();

        let mut values = Vec::with_capacity(grid.len() - 1);
        for w in grid.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            values.push(self.eval(mid) + other.eval(mid));
        }
        canonicalize(grid, values)
    }

    /// Report the moments up to `max_order` together with a verdict on
    /// whether all of them vanish below `tol` in absolute value.
    pub fn vanishing_moments(&self, max_order: u32, tol: f64) -> Result<MomentReport> {
        if !(tol > 0.0) {
            return Err(Error::NonPositiveTolerance(tol));
        }
        let moment_values: Vec<f64> = (0..=max_order).map(|k| self.moment(k)).collect();
        let all_vanish = moment_values.iter().all(|m| m.abs() <= tol);
        Ok(MomentReport {
            order: max_order,
            moment_values,
            all_vanish,
        })
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            breakpoints: Vec<f64>,
            values: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        StepFunction::new(raw.breakpoints, raw.values).map_err(serde::de::Error::custom)
    }
}

fn canonicalize(grid: Vec<f64>, values: Vec<f64>) -> StepFunction {
    debug_assert_eq!(values.len() + 1, grid.len());
    // merge adjacent intervals carrying the same value
    let mut bp = vec![grid[0]];
    let mut vals: Vec<f64> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if let Some(last) = vals.last() {
            if last == v {
                *bp.last_mut().unwrap() = grid[i + 1];
                continue;
            }
        }
        vals.push(*v);
        bp.push(grid[i + 1]);
    }
    // trim zero-valued edges, keeping at least one interval
    while vals.len() > 1 && vals[0] == 0.0 {
        vals.remove(0);
        bp.remove(0);
    }
    while vals.len() > 1 && *vals.last().unwrap() == 0.0 {
        vals.pop();
        bp.pop();
    }
    StepFunction {
        breakpoints: bp,
        values: vals,
    }
}

/// Moments of a step function up to a given order, with a vanishing verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: u32,
    pub moment_values: Vec<f64>,
    pub all_vanish: bool,
}

/// The oscillating atom supported on (-1, 1): +1 on (-1, 0), -1 on (0, 1).
pub fn atom_a1() -> StepFunction {
    StepFunction::new(vec![-1.0, 0.0, 1.0], vec![1.0, -1.0]).expect("static atom")
}

/// The translate of `atom_a1` by 2, supported on (1, 3).
pub fn atom_a2() -> StepFunction {
    atom_a1().translate(2.0)
}

/// Indicator of the interval (c, d).
pub fn indicator(c: f64, d: f64) -> Result<StepFunction> {
    StepFunction::new(vec![c, d], vec![1.0])
}

/// Largest moment order that must vanish for membership in H^p on the line:
/// floor(1/p - 1), clamped at zero for p >= 1.
pub fn required_moment_order(p: f64) -> u32 {
    if p >= 1.0 {
        0
    } else {
        (1.0 / p - 1.0).floor().max(0.0) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn construction_and_point_values() {
        let f = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.eval(-0.1), 0.0);
        assert_eq!(f.eval(0.0), 1.0); // right limit
        assert_eq!(f.eval(1.0), 0.0); // right limit outside support

        let a = StepFunction::new(vec![-1.0, 0.0, 1.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(a.eval(-0.5), 1.0);
        assert_eq!(a.eval(0.5), -1.0);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            StepFunction::new(vec![1.0, 0.0], vec![1.0]).unwrap_err(),
            Error::InvalidBreakpoints
        );
        assert_eq!(
            StepFunction::new(vec![0.0, 0.0], vec![1.0]).unwrap_err(),
            Error::InvalidBreakpoints
        );
        assert_eq!(
            StepFunction::new(vec![0.0], vec![]).unwrap_err(),
            Error::InvalidBreakpoints
        );
        assert!(matches!(
            StepFunction::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap_err(),
            Error::ValueCountMismatch { .. }
        ));
    }

    #[test]
    fn atoms_match_their_definition() {
        let a1 = atom_a1();
        assert_eq!(a1.breakpoints(), &[-1.0, 0.0, 1.0]);
        assert_eq!(a1.values(), &[1.0, -1.0]);
        let a2 = atom_a2();
        assert_eq!(a2.breakpoints(), &[1.0, 2.0, 3.0]);
        assert_eq!(a2.values(), &[1.0, -1.0]);
        assert_eq!(a2.moment(0), 0.0);
    }

    #[test]
    fn moments_closed_form() {
        let a1 = atom_a1();
        assert_eq!(a1.moment(0), 0.0);
        assert_relative_eq!(a1.moment(1), -1.0, max_relative = 1e-15);
        let ind = indicator(0.0, 1.0).unwrap();
        assert_eq!(ind.moment(0), 1.0);
        assert_relative_eq!(ind.moment(1), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn moment_matches_riemann_sum() {
        // brute-force oracle on a 10^6-point grid
        let f = StepFunction::new(vec![-3.5, -1.0, 0.25, 2.0, 4.0], vec![1.5, -0.5, 2.0, -1.25])
            .unwrap();
        for k in 0..4u32 {
            let n = 1_000_000usize;
            let (a, b) = (-4.0, 4.0);
            let h = (b - a) / n as f64;
            let riemann: f64 = (0..n)
                .map(|i| {
                    let x: f64 = a + (i as f64 + 0.5) * h;
                    x.powi(k as i32) * f.eval(x)
                })
                .sum::<f64>()
                * h;
            let exact = f.moment(k);
            assert_relative_eq!(exact, riemann, max_relative = 1e-6);
        }
    }

    #[test]
    fn translate_moves_the_support() {
        let a1 = atom_a1();
        let a2 = a1.translate(2.0);
        assert_eq!(a2.eval(1.5), 1.0);
        assert_eq!(a2.eval(2.5), -1.0);
        assert_eq!(a1.translate(0.0), a1);
        assert_eq!(a2.moment(0), 0.0);
    }

    #[test]
    fn vanishing_moment_reports() {
        let a1 = atom_a1();
        assert!(a1.vanishing_moments(0, 1e-12).unwrap().all_vanish);
        let r = a1.vanishing_moments(1, 1e-12).unwrap();
        assert!(!r.all_vanish);
        assert_relative_eq!(r.moment_values[1], -1.0, max_relative = 1e-15);
        let ind = indicator(0.0, 1.0).unwrap();
        assert!(!ind.vanishing_moments(0, 1e-12).unwrap().all_vanish);
        assert!(a1.vanishing_moments(0, -1.0).is_err());
    }

    #[test]
    fn addition_merges_and_canonicalizes() {
        let a = indicator(0.0, 2.0).unwrap();
        let b = indicator(1.0, 3.0).unwrap();
        let sum = a.add(&b);
        assert_eq!(sum.eval(0.5), 1.0);
        assert_eq!(sum.eval(1.5), 2.0);
        assert_eq!(sum.eval(2.5), 1.0);
        assert_eq!(sum.breakpoints(), &[0.0, 1.0, 2.0, 3.0]);

        // cancellation trims the dead interval
        let c = a.add(&a.scale(-1.0));
        assert_eq!(c.values().iter().filter(|v| **v != 0.0).count(), 0);
    }

    #[test]
    fn required_order_for_hp() {
        assert_eq!(required_moment_order(1.0), 0);
        assert_eq!(required_moment_order(1.0 / 1.5), 0); // p = (alpha+1)^-1, alpha = 0.5
        assert_eq!(required_moment_order(0.5), 1);
        assert_eq!(required_moment_order(0.25), 3);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let a1 = atom_a1();
        let text = serde_json::to_string(&a1).unwrap();
        assert!(text.contains("breakpoints"));
        let back: StepFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a1);
        let bad: std::result::Result<StepFunction, _> =
            serde_json::from_str(r#"{"breakpoints":[1.0,0.0],"values":[1.0]}"#);
        assert!(bad.is_err());
    }

    fn arbitrary_step() -> impl Strategy<Value = StepFunction> {
        (2usize..6)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(-4.0f64..4.0, n),
                    proptest::collection::vec(-2.0f64..2.0, n - 1),
                )
            })
            .prop_filter_map("degenerate grid", |(mut bp, vals)| {
                bp.sort_by(f64::total_cmp);
                bp.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
                if bp.len() < 2 {
                    return None;
                }
                let vals = vals[..bp.len() - 1].to_vec();
                StepFunction::new(bp, vals).ok()
            })
    }

    proptest! {
        #[test]
        fn moments_are_linear(f in arbitrary_step(), g in arbitrary_step(),
                              a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0u32..4) {
            let combo = f.scale(a).add(&g.scale(b));
            let lhs = combo.moment(k);
            let rhs = a * f.moment(k) + b * g.moment(k);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        #[test]
        fn translation_preserves_mass(f in arbitrary_step(), h in -5.0f64..5.0) {
            let shifted = f.translate(h);
            prop_assert!((shifted.moment(0) - f.moment(0)).abs() <= 1e-12 * (1.0 + f.moment(0).abs()));
        }

        #[test]
        fn evaluation_agrees_after_round_trip(f in arbitrary_step(), x in -5.0f64..5.0) {
            let text = serde_json::to_string(&f).unwrap();
            let back: StepFunction = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.eval(x), f.eval(x));
        }
    }
}
