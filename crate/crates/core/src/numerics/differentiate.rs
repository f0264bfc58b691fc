//! One-sided limits by Richardson extrapolation and five-point finite
//! differences.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limit {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitSpec {
    /// Largest probe distance from `x0`.
    pub initial_step: f64,
    pub levels: usize,
    /// Accept when the extrapolation error is below `tol * max(1, |value|)`.
    pub tol: f64,
}

impl Default for LimitSpec {
    fn default() -> Self {
        LimitSpec {
            initial_step: 1e-2,
            levels: 10,
            tol: 1e-7,
        }
    }
}

/// Richardson-extrapolated one-sided limit of `f` at `x0`.
///
/// Probes `f(x0 ± h / 2^k)` and eliminates successive powers of `h`. A
/// sequence that never settles (e.g. a pole) yields [`Error::Divergence`].
pub fn one_sided_limit<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    side: Side,
    spec: &LimitSpec,
) -> Result<Limit> {
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let levels = spec.levels.max(2);
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut best = Limit {
        value: f64::NAN,
        error: f64::INFINITY,
    };
    for k in 0..levels {
        let h = spec.initial_step / f64::powi(2.0, k as i32);
        let v = f(x0 + sign * h);
        if !v.is_finite() {
            return Err(Error::Divergence { x: x0 });
        }
        let mut row = vec![v];
        for j in 1..=k {
            let factor = f64::powi(2.0, j as i32) - 1.0;
            let next = row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / factor;
            row.push(next);
        }
        if k >= 1 {
            // Compare each new entry with its predecessor on the same column
            // and in the same row; the smaller discrepancy wins.
            for j in 1..=k {
                let err = (row[j] - row[j - 1])
                    .abs()
                    .max((row[j] - table[k - 1][j - 1]).abs());
                if err < best.error {
                    best = Limit {
                        value: row[j],
                        error: err,
                    };
                }
            }
        }
        table.push(row);
    }
    if best.error <= spec.tol * best.value.abs().max(1.0) {
        Ok(best)
    } else {
        Err(Error::Divergence { x: x0 })
    }
}

/// Values a stencil can combine: plain numbers or whole jets.
pub trait Stencil:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl Stencil for f64 {}
impl Stencil for Jet {}

/// Five-point first derivative of `f` at `x` with step `h`, keeping every
/// stencil point inside `[lo, hi]` (central when possible, otherwise fully
/// one-sided). Fourth order in `h` either way.
pub fn derivative<T: Stencil, F: Fn(f64) -> T>(f: F, x: f64, h: f64, lo: f64, hi: f64) -> T {
    if x - 2.0 * h >= lo && x + 2.0 * h <= hi {
        (f(x - 2.0 * h) - f(x - h) * 8.0 + f(x + h) * 8.0 - f(x + 2.0 * h)) * (1.0 / (12.0 * h))
    } else if x + 4.0 * h <= hi || x - 4.0 * h < lo {
        one_sided_derivative(f, x, h, Side::Right)
    } else {
        one_sided_derivative(f, x, h, Side::Left)
    }
}

/// Fully one-sided five-point derivative.
pub fn one_sided_derivative<T: Stencil, F: Fn(f64) -> T>(f: F, x: f64, h: f64, side: Side) -> T {
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let s = |k: f64| f(x + sign * k * h);
    (s(0.0) * -25.0 + s(1.0) * 48.0 - s(2.0) * 36.0 + s(3.0) * 16.0 - s(4.0) * 3.0)
        * (sign / (12.0 * h))
}

/// Derivative with a differentiability check: the left and right difference
/// quotients (where the stencil fits in `[lo, hi]`) must agree, and halving
/// the step must not change the estimate materially.
pub fn checked_derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    h: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let d1 = derivative(&f, x, h, lo, hi);
    let d2 = derivative(&f, x, 2.0 * h, lo, hi);
    let scale = d1.abs().max(1.0);
    if !d1.is_finite() || (d1 - d2).abs() > 1e-4 * scale {
        return Err(Error::NonDifferentiable { x });
    }
    if x - 4.0 * h >= lo && x + 4.0 * h <= hi {
        let left = one_sided_derivative(&f, x, h, Side::Left);
        let right = one_sided_derivative(&f, x, h, Side::Right);
        if (left - right).abs() > 1e-4 * scale {
            return Err(Error::NonDifferentiable { x });
        }
    }
    Ok(d1)
}
