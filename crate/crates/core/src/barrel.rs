//! Closed forms for the barrel `B_{n,r}`: the function `G(x) = g(acos x)`
//! obtained by inverting the Radon transform of its norm, the generating
//! distribution on `S^3`, and the generating density of the polar of
//! `B_{3,1}`.
//!
//! `G` has two branches split at `x_r = r / sqrt(1 + r^2)`:
//!
//! | | `[0, x_r)` | `(x_r, 1]` |
//! |---|---|---|
//! | `G`   | `(1 - 2x^2) / sqrt(1 - x^2)` | `(1 - r^2) / (A (rx + A)^2)` |
//! | `G'`  | `(2x^3 - 3x) / (1 - x^2)^{3/2}` | `r (2A + rx)(rx - A) / (A^3 (A + rx))` |
//! | `G''` | `-3 / (1 - x^2)^{5/2}` | `3 r^2 (1 - r^2) / A^5` |
//!
//! with `A = sqrt(1 - r^2 + r^2 x^2)`. The inner `G''` is negative: that sign
//! is what makes the operator vanish on `[0, x_r)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use crate::distributions::{
    Atom, LatitudeMeasure, Piece, PieceFn, PiecewiseSmoothFn, SphericalDistributionRS,
};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::profiles::{check_radius, AngleProfile, Param};
use crate::transforms::cosine_forward;

/// Height `x_r = r / sqrt(1 + r^2) = sin(arctan r)` where the flat facet ends.
pub fn breakpoint_x(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(r / (1.0 + r * r).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GBranch {
    /// `[0, x_r)`
    Inner,
    /// `[x_r, 1]`
    Outer,
}

pub fn g_branch(r: f64, x: f64) -> Result<GBranch> {
    Ok(if x < breakpoint_x(r)? {
        GBranch::Inner
    } else {
        GBranch::Outer
    })
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("x = {x} outside [0, 1]")))
    }
}

/// Derivative of order `order` (0, 1 or 2) of `G` along `branch`, evaluated
/// at `x` (the branch formula is used even outside its own interval).
pub fn g_on_branch(branch: GBranch, order: usize, r: f64, x: f64) -> Result<f64> {
    check_radius(r)?;
    check_x(x)?;
    let a = (1.0 - r * r + r * r * x * x).sqrt();
    let s = 1.0 - x * x;
    let v = match (branch, order) {
        (GBranch::Inner, 0) => (1.0 - 2.0 * x * x) / s.sqrt(),
        (GBranch::Inner, 1) => (2.0 * x * x * x - 3.0 * x) / s.powf(1.5),
        (GBranch::Inner, 2) => -3.0 / s.powf(2.5),
        (GBranch::Outer, 0) => (1.0 - r * r) / (a * (r * x + a).powi(2)),
        (GBranch::Outer, 1) => r * (2.0 * a + r * x) * (r * x - a) / (a.powi(3) * (a + r * x)),
        (GBranch::Outer, 2) => 3.0 * r * r * (1.0 - r * r) / a.powi(5),
        _ => {
            return Err(Error::domain(format!(
                "derivative order {order} not tabulated"
            )))
        }
    };
    Ok(v)
}

pub fn g_profile(r: f64, x: f64) -> Result<f64> {
    g_on_branch(g_branch(r, x)?, 0, r, x)
}

/// `G'` on the branch containing `x` (the outer one at `x_r`).
pub fn g_d1(r: f64, x: f64) -> Result<f64> {
    g_on_branch(g_branch(r, x)?, 1, r, x)
}

/// Smooth part of `G''`; the atom at `x_r` lives in the distribution.
pub fn g_d2(r: f64, x: f64) -> Result<f64> {
    g_on_branch(g_branch(r, x)?, 2, r, x)
}

/// Jump `G'(x_r+) - G'(x_r-) = r (r^2 + 1)^2`.
pub fn jump_constant_c(r: f64) -> f64 {
    r * (r * r + 1.0).powi(2)
}

/// Weight `(1 - x_r^2) c(r) / 8 pi = r (r^2 + 1) / 8 pi` of the atom at `x_r`.
pub fn atom_weight(r: f64) -> f64 {
    r * (r * r + 1.0) / (8.0 * PI)
}

/// Generating distribution of `B_{4,r}`: zero below `x_r`, density
/// `3 (1 - r^2) / (8 pi A^5)` above, and an atom at `x_r`. At `r = 1` the
/// density is stored as the zero function.
pub fn generating_distribution_closed(r: f64) -> Result<SphericalDistributionRS> {
    let xr = breakpoint_x(r)?;
    let outer = if r == 1.0 {
        PieceFn::Zero
    } else {
        PieceFn::BarrelDensity { r }
    };
    let density = PiecewiseSmoothFn::new(vec![
        Piece::new(0.0, xr, PieceFn::Zero),
        Piece::new(xr, 1.0, outer),
    ])?;
    SphericalDistributionRS::new(
        4,
        density,
        vec![Atom {
            x: xr,
            weight: atom_weight(r),
        }],
        vec![],
    )
}

/// Whether the polar of `B_{n,r}` is a zonoid, read off from the sign of the
/// generating distribution.
pub fn is_polar_zonoid(r: f64) -> Result<bool> {
    Ok(generating_distribution_closed(r)?.is_measure())
}

/// Generating density of the polar of `B_{3,1}` at polar angle `phi`, up to
/// the positive constant `scale`. It vanishes for `phi >= pi/4` and blows up
/// like `(cos 2 phi)^{-1/2}` as `phi -> pi/4` from below.
pub fn b3_polar_generating_density(phi: f64, scale: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::domain(format!("angle {phi} outside [0, pi/2]")));
    }
    if !(scale > 0.0) {
        return Err(Error::domain(format!(
            "scale must be positive, got {scale}"
        )));
    }
    if phi == FRAC_PI_4 {
        return Err(Error::domain("density is singular at phi = pi/4"));
    }
    if phi > FRAC_PI_4 {
        return Ok(0.0);
    }
    Ok(b3_polar_density_from_edge(FRAC_PI_4 - phi, scale))
}

/// The density at `phi = pi/4 - delta`, `0 < delta <= pi/4`, written with
/// `cos 2 phi = sin 2 delta` so it stays accurate right next to the edge.
pub fn b3_polar_density_from_edge(delta: f64, scale: f64) -> f64 {
    let c = (FRAC_PI_4 - delta).cos();
    let s = (2.0 * delta).sin().sqrt();
    scale * (c * c + s) / ((1.0 + s).powi(2) * c.powi(3) * s)
}

/// The same density as a distribution on `S^2` in `x = cos phi`.
pub fn b3_polar_distribution(scale: f64) -> Result<SphericalDistributionRS> {
    b3_polar_generating_density(0.0, scale)?;
    let density = PiecewiseSmoothFn::new(vec![
        Piece::new(0.0, FRAC_1_SQRT_2, PieceFn::Zero),
        Piece::new(FRAC_1_SQRT_2, 1.0, PieceFn::RemarkTwoDensity { scale })
            .with_singularities(Some(-0.5), None),
    ])?;
    SphericalDistributionRS::from_density(3, density)
}

/// Fix the free constant by matching the cosine transform to the norm of
/// `B_{3,1}` at the equator: `scale = f_1(pi/2) / T(unscaled)(t = 0)`.
pub fn fit_b3_polar_scale(quad: &QuadratureSpec) -> Result<f64> {
    let unscaled = LatitudeMeasure::from_distribution(&b3_polar_distribution(1.0)?)?;
    let target = AngleProfile::BarrelNorm { r: 1.0 }.value_at(Param::Cos, 0.0);
    Ok(target / cosine_forward(&unscaled, 0.0, quad)?)
}
