//! Composite quadrature on uniformly spaced samples.
//!
//! Simpson's rule needs an even number of intervals. When a slice has an odd
//! interval count (half-line integrals on some grids), the last three
//! intervals are covered by Simpson's 3/8 rule instead, which keeps the
//! fourth-order accuracy. Two nodes fall back to the trapezoid rule.

use std::ops::{Add, Mul};

use num_complex::Complex64;

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Quadrature weights (including the step) for `len` equally spaced nodes.
pub fn simpson_weights(len: usize, step: f64) -> Vec<f64> {
    let mut w = vec![0.0; len];
    match len {
        0 | 1 => return w,
        2 => {
            w[0] = step / 2.0;
            w[1] = step / 2.0;
            return w;
        }
        _ => {}
    }
    let intervals = len - 1;
    // Simpson section covers nodes 0..=simpson_end.
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    if simpson_end > 0 {
        w[0] += step / 3.0;
        w[simpson_end] += step / 3.0;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_end).skip(1) {
            *wi += if i % 2 == 1 { 4.0 * step / 3.0 } else { 2.0 * step / 3.0 };
        }
    }
    if simpson_end != intervals {
        let k = simpson_end;
        let c = 3.0 * step / 8.0;
        w[k] += c;
        w[k + 1] += 3.0 * c;
        w[k + 2] += 3.0 * c;
        w[k + 3] += c;
    }
    w
}

pub fn simpson<T: Integrand>(values: &[T], step: f64) -> T {
    let weights = simpson_weights(values.len(), step);
    weighted_sum(values, &weights)
}

/// Sum in node order; keeps conjugate symmetry exact for complex integrands.
pub fn weighted_sum<T: Integrand>(values: &[T], weights: &[f64]) -> T {
    values
        .iter()
        .zip(weights)
        .fold(T::zero(), |acc, (&v, &w)| acc + v * w)
}

/// Composite trapezoid rule, kept as an independent cross-check.
pub fn trapezoid<T: Integrand>(values: &[T], step: f64) -> T {
    match values.len() {
        0 | 1 => T::zero(),
        n => {
            let interior = values[1..n - 1].iter().fold(T::zero(), |acc, &v| acc + v);
            (interior + (values[0] + values[n - 1]) * 0.5) * step
        }
    }
}
