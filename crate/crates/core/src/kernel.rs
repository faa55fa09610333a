//! The two-anchor kernel K(x) = (|x-s| + |x-t|)^(alpha-1): pointwise values,
//! exact truncated integrals, and its distributional Fourier transform.
//!
//! With the convention f^(xi) = integral of f(x) e^{-i x xi} dx, the
//! transform splits into a homogeneous singular term proportional to
//! |xi|^(-alpha) and a regular remainder that extends continuously to xi = 0.
//! Every term is symmetric under exchanging s and t (the dependence is only
//! through |t - s| and s + t), so the s < t and s > t readings agree
//! term by term; the unit tests pin this down numerically as well.

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use num_complex::Complex64;

pub use crate::special::gamma_fn;

/// Carrier for transform values.
pub type ComplexValue = Complex64;

/// The kernel parameters: two anchors and the exponent offset alpha in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
}

impl KernelSpec {
    pub fn new(s: f64, t: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(KernelSpec { s, t, alpha })
    }

    /// Width |t - s| of the plateau between the anchors.
    pub fn gap(&self) -> f64 {
        (self.t - self.s).abs()
    }

    /// Midpoint (s + t)/2 controlling the modulation of the transform.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.s + self.t)
    }

    fn require_distinct(&self) -> Result<()> {
        if self.s == self.t {
            Err(Error::CoincidentAnchors(self.s))
        } else {
            Ok(())
        }
    }
}

/// Pointwise kernel value (|x-s| + |x-t|)^(alpha-1).
///
/// Defined for every x except the degenerate x = s = t where the kernel is
/// +infinity. Between the anchors the value is the plateau |t-s|^(alpha-1).
pub fn kernel_eval(k: &KernelSpec, x: f64) -> Result<f64> {
    let d = (x - k.s).abs() + (x - k.t).abs();
    if d == 0.0 {
        return Err(Error::SingularKernelPoint(x));
    }
    Ok(d.powf(k.alpha - 1.0))
}

/// integral over [-R, R] of the kernel, in closed form:
/// ((alpha-1)/alpha)|t-s|^alpha + ((2R+s+t)^alpha + (2R-s-t)^alpha)/(2 alpha).
///
/// The three pieces are the elementary antiderivatives over x < min(s,t),
/// the plateau, and x > max(s,t); the formula extends continuously to s = t.
pub fn kernel_truncated_integral(k: &KernelSpec, radius: f64) -> Result<f64> {
    let support = k.s.abs().max(k.t.abs());
    if !(radius > support) {
        return Err(Error::RadiusTooSmall { radius, support });
    }
    let a = k.alpha;
    let gap = k.gap();
    let sum = k.s + k.t;
    Ok((a - 1.0) / a * gap.powf(a)
        + ((2.0 * radius + sum).powf(a) + (2.0 * radius - sum).powf(a)) / (2.0 * a))
}

/// Value of the non-singular transform terms at xi = 0:
/// ((alpha-1)/alpha) |t-s|^alpha, which is negative for alpha in (0,1)
/// and extends continuously to 0 at s = t.
pub fn kernel_regular_part_at_zero(k: &KernelSpec) -> f64 {
    (k.alpha - 1.0) / k.alpha * k.gap().powf(k.alpha)
}

/// The constant in the transform of |x|^(alpha-1):
/// |x|^(alpha-1) ^ (xi) = -2 Gamma(alpha) sin((alpha-1) pi / 2) |xi|^(-alpha).
/// Strictly positive on (0, 1) because the sine factor is negative there.
pub fn frac_power_ft_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let g = gamma_fn(alpha)?;
    Ok(-2.0 * g * ((alpha - 1.0) * std::f64::consts::FRAC_PI_2).sin())
}

/// integral over [0, L] of x^alpha sin(x xi) dx, absolute accuracy ~1e-10.
///
/// Branches at |L xi| = 2: alternating power series below, adaptive panel
/// quadrature with at most half an oscillation per panel above.
pub fn incomplete_sine_integral(length: f64, alpha: f64, xi: f64) -> f64 {
    if length <= 0.0 || xi == 0.0 {
        return 0.0;
    }
    if (length * xi).abs() <= 2.0 {
        incomplete_sine_integral_series(length, alpha, xi)
    } else {
        incomplete_sine_integral_quadrature(length, alpha, xi)
    }
}

/// Series branch: sum_k (-1)^k xi^(2k+1) L^(alpha+2k+2) / ((2k+1)! (alpha+2k+2)).
/// Factorially convergent for |L xi| of order one.
pub fn incomplete_sine_integral_series(length: f64, alpha: f64, xi: f64) -> f64 {
    if length <= 0.0 || xi == 0.0 {
        return 0.0;
    }
    let z = xi * length;
    let mut term = xi * length.powf(alpha + 2.0) / (alpha + 2.0);
    let mut sum = term;
    let mut k = 0u32;
    while term.abs() > 1e-18 * (1.0 + sum.abs()) && k < 80 {
        let kk = k as f64;
        // ratio of consecutive terms of the alternating series
        term *= -(z * z) * (alpha + 2.0 * kk + 2.0)
            / ((2.0 * kk + 2.0) * (2.0 * kk + 3.0) * (alpha + 2.0 * kk + 4.0));
        sum += term;
        k += 1;
    }
    sum
}

/// Quadrature branch: adaptive Gauss-Kronrod with oscillation-aware initial
/// panels (width at most pi/|xi|); refinement grades the x^alpha endpoint.
pub fn incomplete_sine_integral_quadrature(length: f64, alpha: f64, xi: f64) -> f64 {
    if length <= 0.0 || xi == 0.0 {
        return 0.0;
    }
    let splits = quad::oscillation_splits(0.0, length, xi);
    let opts = QuadOptions::new(1e-12)
        .with_splits(&splits)
        .with_max_evals(400_000);
    let out = quad::integrate(|x: f64| x.powf(alpha) * (x * xi).sin(), 0.0, length, &opts);
    match out {
        Ok(o) => o.value,
        Err(e) => e.best.value,
    }
}

/// The homogeneous singular transform term
/// 2^(alpha-1) c(alpha) e^{-i xi (s+t)/2} |xi|^(-alpha)
/// with c(alpha) = `frac_power_ft_constant`.
pub fn kernel_fourier_singular(k: &KernelSpec, xi: f64) -> Result<ComplexValue> {
    k.require_distinct()?;
    if xi == 0.0 {
        return Err(Error::SingularFrequency);
    }
    let c = frac_power_ft_constant(k.alpha)?;
    let amp = 2f64.powf(k.alpha - 1.0) * c * xi.abs().powf(-k.alpha);
    Ok(modulation(k, xi) * amp)
}

/// Full distributional Fourier transform of the kernel at xi != 0.
pub fn kernel_fourier(k: &KernelSpec, xi: f64) -> Result<ComplexValue> {
    k.require_distinct()?;
    if xi == 0.0 {
        return Err(Error::SingularFrequency);
    }
    Ok(kernel_fourier_singular(k, xi)? + kernel_fourier_regular(k, xi)?)
}

/// Transform with the singular term removed; continuous at xi = 0 where it
/// equals `kernel_regular_part_at_zero`.
///
/// The three pieces: the plateau contribution |t-s|^alpha sinc((t-s) xi / 2),
/// the endpoint cosine -(|t-s|^alpha/alpha) cos(|t-s| xi / 2), and the
/// incomplete-sine correction -(2^alpha xi / alpha) S(|t-s|/2, alpha, xi),
/// all carried by the common phase e^{-i xi (s+t)/2}.
pub fn kernel_fourier_regular(k: &KernelSpec, xi: f64) -> Result<ComplexValue> {
    k.require_distinct()?;
    let a = k.alpha;
    let gap = k.gap();
    let half_gap = 0.5 * gap;

    let plateau = gap.powf(a) * sinc(half_gap * xi);
    let cosine = -(gap.powf(a) / a) * (half_gap * xi).cos();
    let sine_corr = -(2f64.powf(a) * xi / a) * incomplete_sine_integral(half_gap, a, xi);

    Ok(modulation(k, xi) * (plateau + cosine + sine_corr))
}

fn modulation(k: &KernelSpec, xi: f64) -> ComplexValue {
    let phase = -xi * k.midpoint();
    Complex64::new(phase.cos(), phase.sin())
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(s: f64, t: f64, alpha: f64) -> KernelSpec {
        KernelSpec::new(s, t, alpha).unwrap()
    }

    #[test]
    fn spec_validates_alpha() {
        assert!(KernelSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(KernelSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(KernelSpec::new(0.0, 1.0, -0.3).is_err());
        assert!(KernelSpec::new(0.0, 1.0, 0.5).is_ok());
    }

    #[test]
    fn pointwise_values() {
        let k = spec(0.0, 2.0, 0.5);
        assert_relative_eq!(
            kernel_eval(&k, 1.0).unwrap(),
            2f64.powf(-0.5),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            kernel_eval(&k, 5.0).unwrap(),
            8f64.powf(-0.5),
            max_relative = 1e-15
        );
        // degenerate anchors still evaluate pointwise away from the spike
        let kd = spec(0.0, 0.0, 0.5);
        assert_relative_eq!(
            kernel_eval(&kd, 1.0).unwrap(),
            2f64.powf(-0.5),
            max_relative = 1e-15
        );
        assert_eq!(
            kernel_eval(&kd, 0.0).unwrap_err(),
            Error::SingularKernelPoint(0.0)
        );
    }

    #[test]
    fn truncated_integral_examples() {
        let k = spec(-1.0, 1.0, 0.5);
        assert_relative_eq!(
            kernel_truncated_integral(&k, 2.0).unwrap(),
            4.0 - std::f64::consts::SQRT_2,
            max_relative = 1e-14
        );
        let kd = spec(0.0, 0.0, 0.5);
        assert_relative_eq!(
            kernel_truncated_integral(&kd, 1.0).unwrap(),
            2.0 * std::f64::consts::SQRT_2,
            max_relative = 1e-14
        );
        assert!(kernel_truncated_integral(&k, 0.5).is_err());
        assert!(kernel_truncated_integral(&k, 1.0).is_err());
    }

    #[test]
    fn truncated_integral_matches_quadrature() {
        // breakpoint-aware adaptive quadrature as the independent route
        let cases = [
            (-1.0, 1.0, 0.5, 2.0),
            (0.0, 2.0, 0.3, 5.0),
            (2.0, -3.0, 0.8, 4.0),
            (-0.25, 0.75, 0.1, 8.0),
        ];
        for &(s, t, alpha, radius) in &cases {
            let k = spec(s, t, alpha);
            let opts = QuadOptions::new(1e-11)
                .with_splits(&[s, t])
                .with_max_evals(1_000_000);
            let quad_val = quad::integrate(
                |x: f64| ((x - s).abs() + (x - t).abs()).powf(alpha - 1.0),
                -radius,
                radius,
                &opts,
            )
            .unwrap();
            let exact = kernel_truncated_integral(&k, radius).unwrap();
            assert_relative_eq!(exact, quad_val.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn truncated_integral_derivative_is_boundary_value() {
        // d/dR of the truncated integral equals K(R) + K(-R)
        let k = spec(0.3, -1.2, 0.45);
        for &radius in &[2.0, 4.0, 9.0] {
            let h = 1e-5;
            let fd = (kernel_truncated_integral(&k, radius + h).unwrap()
                - kernel_truncated_integral(&k, radius - h).unwrap())
                / (2.0 * h);
            let boundary =
                kernel_eval(&k, radius).unwrap() + kernel_eval(&k, -radius).unwrap();
            assert_relative_eq!(fd, boundary, max_relative = 1e-5);
        }
    }

    #[test]
    fn regular_part_at_zero_examples() {
        assert_relative_eq!(
            kernel_regular_part_at_zero(&spec(0.0, 1.0, 0.5)),
            -1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            kernel_regular_part_at_zero(&spec(0.0, 2.0, 0.5)),
            -std::f64::consts::SQRT_2,
            max_relative = 1e-15
        );
        assert_eq!(kernel_regular_part_at_zero(&spec(1.0, 1.0, 0.7)), 0.0);
    }

    #[test]
    fn ft_constant_values() {
        assert_relative_eq!(
            frac_power_ft_constant(0.5).unwrap(),
            (2.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            frac_power_ft_constant(0.25).unwrap(),
            6.699_253_574_152_692,
            max_relative = 1e-12
        );
        // vanishes toward alpha = 1 and stays positive inside (0, 1)
        assert!(frac_power_ft_constant(0.999_999).unwrap() < 1e-4);
        for i in 1..100 {
            assert!(frac_power_ft_constant(i as f64 / 100.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn sine_integral_series_value() {
        // alternating series oracle, frozen from sum_k (-1)^k/((2k+1)!(2k+2.5))
        let v = incomplete_sine_integral_series(1.0, 0.5, 1.0);
        assert_relative_eq!(v, 0.364_221_932_032_132_4, max_relative = 1e-12);
        // brute-force Riemann oracle
        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                x.sqrt() * x.sin()
            })
            .sum::<f64>()
            * h;
        assert_relative_eq!(v, riemann, max_relative = 1e-9);
    }

    #[test]
    fn sine_integral_edge_cases() {
        assert_eq!(incomplete_sine_integral(1.0, 0.5, 0.0), 0.0);
        assert_eq!(incomplete_sine_integral(0.0, 0.5, 3.0), 0.0);
        // odd in xi
        let k = incomplete_sine_integral(1.5, 0.3, 2.0);
        assert_relative_eq!(
            incomplete_sine_integral(1.5, 0.3, -2.0),
            -k,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sine_integral_branches_agree_on_overlap() {
        // 1 <= |L xi| <= 4
        for &(l, alpha, xi) in &[
            (1.0, 0.5, 1.0),
            (1.0, 0.2, 2.5),
            (0.5, 0.8, 7.0),
            (2.0, 0.5, 2.0),
            (1.3, 0.35, 3.0),
        ] {
            let s = incomplete_sine_integral_series(l, alpha, xi);
            let q = incomplete_sine_integral_quadrature(l, alpha, xi);
            assert!((s - q).abs() <= 1e-9, "series {s} vs quad {q}");
        }
    }

    #[test]
    fn fourier_requires_distinct_anchors_and_nonzero_xi() {
        let k = spec(1.0, 1.0, 0.5);
        assert!(matches!(
            kernel_fourier(&k, 1.0).unwrap_err(),
            Error::CoincidentAnchors(_)
        ));
        let k = spec(0.0, 1.0, 0.5);
        assert_eq!(kernel_fourier(&k, 0.0).unwrap_err(), Error::SingularFrequency);
        assert!(kernel_fourier_regular(&k, 0.0).is_ok());
    }

    #[test]
    fn fourier_regular_at_zero_matches_limit() {
        let k = spec(0.0, 1.0, 0.5);
        let v = kernel_fourier_regular(&k, 0.0).unwrap();
        assert_relative_eq!(v.re, -1.0, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
        // continuity toward 0 of the regular part
        let near = kernel_fourier(&k, 0.01).unwrap() - kernel_fourier_singular(&k, 0.01).unwrap();
        assert!((near.re - (-1.0)).abs() < 1e-3);
        // real-valued at xi = 0 for generic anchors
        let k2 = spec(-2.0, 0.7, 0.3);
        assert_eq!(kernel_fourier_regular(&k2, 0.0).unwrap().im, 0.0);
    }

    #[test]
    fn fourier_is_sum_of_singular_and_regular() {
        let k = spec(-1.0, 2.0, 0.7);
        for &xi in &[0.1, -0.6, 3.0, 17.0] {
            let full = kernel_fourier(&k, xi).unwrap();
            let sum = kernel_fourier_singular(&k, xi).unwrap()
                + kernel_fourier_regular(&k, xi).unwrap();
            assert_eq!(full, sum);
        }
    }

    #[test]
    fn plateau_term_matches_oriented_integral_form() {
        // |t-s|^(alpha-1) sgn(t-s) (e^{-i s xi} - e^{-i t xi})/(i xi) equals the
        // sinc form used in the implementation, for s < t and s > t alike
        for &(s, t) in &[(0.0, 1.0), (2.0, -3.0), (-1.0, 2.0)] {
            let alpha = 0.6;
            for &xi in &[0.3, -1.7, 4.0] {
                let num = Complex64::new(0.0, -s * xi).exp() - Complex64::new(0.0, -t * xi).exp();
                let oriented = num / Complex64::new(0.0, xi);
                let expected =
                    oriented * (t - s).abs().powf(alpha - 1.0) * (t - s).signum();
                let gap = (t - s).abs();
                let sinc_form = Complex64::new(0.0, -xi * 0.5 * (s + t)).exp()
                    * gap.powf(alpha)
                    * super::sinc(0.5 * (t - s) * xi);
                assert_relative_eq!(expected.re, sinc_form.re, max_relative = 1e-12);
                assert_relative_eq!(expected.im, sinc_form.im, epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn eval_symmetries(s in -4.0f64..4.0, t in -4.0f64..4.0,
                           alpha in 0.05f64..0.95, x in -6.0f64..6.0) {
            prop_assume!((x - s).abs() + (x - t).abs() > 0.0);
            let k = spec(s, t, alpha);
            let swapped = spec(t, s, alpha);
            let reflected = spec(-s, -t, alpha);
            let v = kernel_eval(&k, x).unwrap();
            prop_assert_eq!(v, kernel_eval(&swapped, x).unwrap());
            prop_assert!((v - kernel_eval(&reflected, -x).unwrap()).abs() <= 1e-15 * v.abs());
        }

        #[test]
        fn fourier_conjugate_symmetry(s in -3.0f64..3.0, dt in 0.1f64..3.0,
                                      alpha in 0.1f64..0.9, xi in 0.05f64..8.0) {
            let k = spec(s, s + dt, alpha);
            let plus = kernel_fourier(&k, xi).unwrap();
            let minus = kernel_fourier(&k, -xi).unwrap();
            prop_assert_eq!(minus, plus.conj());
        }

        #[test]
        fn fourier_swap_symmetry(s in -3.0f64..3.0, dt in 0.1f64..3.0,
                                 alpha in 0.1f64..0.9, xi in -6.0f64..6.0) {
            prop_assume!(xi != 0.0);
            let k = spec(s, s + dt, alpha);
            let swapped = spec(s + dt, s, alpha);
            prop_assert_eq!(
                kernel_fourier(&k, xi).unwrap(),
                kernel_fourier(&swapped, xi).unwrap()
            );
        }

        #[test]
        fn fourier_translation_modulation(s in -2.0f64..2.0, dt in 0.2f64..2.5,
                                          h in -3.0f64..3.0, alpha in 0.15f64..0.85,
                                          xi in 0.1f64..5.0) {
            let k = spec(s, s + dt, alpha);
            let shifted = spec(s + h, s + dt + h, alpha);
            let lhs = kernel_fourier(&shifted, xi).unwrap();
            let rhs = Complex64::new(0.0, -h * xi).exp() * kernel_fourier(&k, xi).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }
}
