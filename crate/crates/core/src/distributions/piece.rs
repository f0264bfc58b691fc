//! Smooth pieces of a piecewise function of `x in [0, 1]`.
//!
//! A [`PieceFn`] is a small expression tree evaluated on jets, so every piece
//! yields its derivatives exactly. Sampled data enters via Hermite cells,
//! whose derivatives are those of the interpolant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::jet::Jet;
use crate::profiles::{AngleProfile, HermiteCell, Param};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PieceFn {
    Zero,
    Constant {
        value: f64,
    },
    /// `sum c_k x^k`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// One smooth branch of an angle profile, read through `x = sin phi` or
    /// `x = cos phi`.
    Profile {
        profile: AngleProfile,
        param: Param,
        branch: usize,
    },
    /// One cell of a sampled profile, read through `param`.
    Hermite {
        cell: HermiteCell,
        param: Param,
    },
    /// `3 (1 - r^2) / (8 pi A^5)` with `A = sqrt(1 - r^2 + r^2 x^2)`.
    BarrelDensity {
        r: f64,
    },
    /// Density of the generating measure of the polar of `B_{3,1}` in
    /// `x = cos phi`; nonzero for `x > 1/sqrt 2`.
    RemarkTwoDensity {
        scale: f64,
    },
    Scaled {
        factor: f64,
        of: Box<PieceFn>,
    },
    Sum {
        terms: Vec<PieceFn>,
    },
    Product {
        factors: Vec<PieceFn>,
    },
    /// Exact derivative through the jet of `of`.
    Derivative {
        of: Box<PieceFn>,
    },
}

/// What is known about the sign of a piece without sampling it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignHint {
    Zero,
    Nonnegative,
    Nonpositive,
    Unknown,
}

impl SignHint {
    fn of(v: f64) -> Self {
        if v == 0.0 {
            SignHint::Zero
        } else if v > 0.0 {
            SignHint::Nonnegative
        } else {
            SignHint::Nonpositive
        }
    }

    fn flip(self) -> Self {
        match self {
            SignHint::Nonnegative => SignHint::Nonpositive,
            SignHint::Nonpositive => SignHint::Nonnegative,
            s => s,
        }
    }
}

impl PieceFn {
    pub fn constant(value: f64) -> Self {
        if value == 0.0 {
            PieceFn::Zero
        } else {
            PieceFn::Constant { value }
        }
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        PieceFn::Polynomial {
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        if factor == 1.0 {
            return self;
        }
        match self {
            PieceFn::Zero => PieceFn::Zero,
            _ if factor == 0.0 => PieceFn::Zero,
            PieceFn::Constant { value } => PieceFn::constant(value * factor),
            PieceFn::Polynomial { coeffs } => PieceFn::Polynomial {
                coeffs: coeffs.iter().map(|c| c * factor).collect(),
            },
            PieceFn::Scaled { factor: f, of } => of.scaled(f * factor),
            other => PieceFn::Scaled {
                factor,
                of: Box::new(other),
            },
        }
    }

    pub fn sum(terms: Vec<PieceFn>) -> Self {
        let mut flat: Vec<PieceFn> = Vec::new();
        for t in terms {
            match t {
                PieceFn::Zero => {}
                PieceFn::Sum { terms } => flat.extend(terms),
                t => flat.push(t),
            }
        }
        match flat.len() {
            0 => PieceFn::Zero,
            1 => flat.pop().unwrap_or(PieceFn::Zero),
            _ => PieceFn::Sum { terms: flat },
        }
    }

    pub fn product(factors: Vec<PieceFn>) -> Self {
        if factors.iter().any(|f| matches!(f, PieceFn::Zero)) {
            return PieceFn::Zero;
        }
        let mut scale = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                PieceFn::Constant { value } => scale *= value,
                f => rest.push(f),
            }
        }
        let core = match rest.len() {
            0 => PieceFn::Constant { value: 1.0 },
            1 => rest.pop().unwrap_or(PieceFn::Zero),
            _ => PieceFn::Product { factors: rest },
        };
        core.scaled(scale)
    }

    /// Exact derivative, folded where the result is again elementary.
    pub fn derivative(self) -> Self {
        match self {
            PieceFn::Zero | PieceFn::Constant { .. } => PieceFn::Zero,
            PieceFn::Polynomial { coeffs } => {
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c)
                    .collect();
                if d.iter().all(|c| *c == 0.0) {
                    PieceFn::Zero
                } else {
                    PieceFn::Polynomial { coeffs: d }
                }
            }
            PieceFn::Scaled { factor, of } => of.derivative().scaled(factor),
            PieceFn::Sum { terms } => {
                PieceFn::sum(terms.into_iter().map(PieceFn::derivative).collect())
            }
            other => PieceFn::Derivative {
                of: Box::new(other),
            },
        }
    }

    /// Evaluate on a jet: the result is `self` composed with `x`.
    pub fn eval(&self, x: Jet) -> Jet {
        match self {
            PieceFn::Zero => Jet::ZERO,
            PieceFn::Constant { value } => Jet::constant(*value),
            PieceFn::Polynomial { coeffs } => {
                let mut acc = Jet::ZERO;
                for c in coeffs.iter().rev() {
                    acc = acc * x + *c;
                }
                acc
            }
            PieceFn::Profile {
                profile,
                param,
                branch,
            } => profile.branch_jet(*branch, *param, x),
            PieceFn::Hermite { cell, param } => {
                let angle = match param {
                    Param::Sin => x.asin(),
                    Param::Cos => x.acos(),
                };
                cell.eval_jet(angle)
            }
            PieceFn::BarrelDensity { r } => {
                let r2 = r * r;
                let a2 = x * x * r2 + (1.0 - r2);
                a2.powf(-2.5) * (3.0 * (1.0 - r2) / (8.0 * PI))
            }
            PieceFn::RemarkTwoDensity { scale } => {
                let x2 = x * x;
                let s = (x2 * 2.0 - 1.0).sqrt();
                let one_plus = s + 1.0;
                (x2 + s) / (one_plus * one_plus * x2 * x * s) * *scale
            }
            PieceFn::Scaled { factor, of } => of.eval(x) * *factor,
            PieceFn::Sum { terms } => terms.iter().fold(Jet::ZERO, |acc, t| acc + t.eval(x)),
            PieceFn::Product { factors } => factors
                .iter()
                .fold(Jet::constant(1.0), |acc, f| acc * f.eval(x)),
            PieceFn::Derivative { of } => {
                of.eval(Jet::variable(x.value())).differentiate().compose(x)
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(Jet::constant(x)).value()
    }

    /// Taylor coefficients at `x`.
    pub fn taylor(&self, x: f64) -> Jet {
        self.eval(Jet::variable(x))
    }

    /// Whether the piece is a closed form (no sampled data involved).
    pub fn is_exact(&self) -> bool {
        match self {
            PieceFn::Hermite { .. } => false,
            PieceFn::Profile { profile, .. } => !matches!(profile, AngleProfile::Sampled(_)),
            PieceFn::Scaled { of, .. } | PieceFn::Derivative { of } => of.is_exact(),
            PieceFn::Sum { terms: v } | PieceFn::Product { factors: v } => {
                v.iter().all(PieceFn::is_exact)
            }
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PieceFn::Zero)
    }

    /// Sign known from the closed form alone.
    pub fn sign_hint(&self) -> SignHint {
        match self {
            PieceFn::Zero => SignHint::Zero,
            PieceFn::Constant { value } => SignHint::of(*value),
            PieceFn::BarrelDensity { r } => SignHint::of(1.0 - r * r),
            PieceFn::RemarkTwoDensity { scale } => SignHint::of(*scale),
            PieceFn::Scaled { factor, of } => {
                let s = of.sign_hint();
                if *factor == 0.0 {
                    SignHint::Zero
                } else if *factor > 0.0 {
                    s
                } else {
                    s.flip()
                }
            }
            _ => SignHint::Unknown,
        }
    }
}
