//! Dependency-free special functions: Euler gamma, error function, and the
//! standard normal CDF. Accuracy targets are driven by the verification
//! tolerances used elsewhere in the crate (1e-13 relative for gamma on (0, 2],
//! better than 1e-12 for erf).

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6;

/// Lanczos coefficients, g = 7, n = 9 (the GSL set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler gamma function for positive real arguments.
///
/// Lanczos approximation with reflection below 1/2; relative error is below
/// 1e-13 on (0, 2] (checked against the reflection and duplication identities
/// in the tests).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::GammaDomain(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_P[0];
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            acc += p / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Error function, accurate to ~1e-15 absolute over the whole line.
///
/// Small arguments use the cancellation-free confluent series
/// erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_n (2x^2)^n / (2n+1)!!,
/// large arguments the Legendre continued fraction for erfc.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        erf_series(x)
    } else {
        1.0 - erfc_cf(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 3.0 {
        1.0 - erf(x)
    } else {
        erfc_cf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let z = 2.0 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut odd = 1.0;
    for _ in 0..200 {
        odd += 2.0;
        term *= z / odd;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * x * (-x * x).exp() * sum
}

/// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// evaluated by the modified Lentz algorithm; for x >= 3 it converges in a
/// few dozen iterations to machine precision.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let b0 = x;
    let mut f = if b0.abs() < TINY { TINY } else { b0 };
    let mut c = f;
    let mut d = 0.0;
    for n in 1..200 {
        let a = n as f64 / 2.0;
        let b = x;
        d = b + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / SQRT_PI / f
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density (2*pi)^{-1/2} e^{-z^2/2}.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
