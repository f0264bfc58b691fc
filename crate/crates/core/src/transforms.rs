//! Spherical Radon transform of rotationally symmetric functions, its
//! inversion for `n = 4`, the cosine transform of latitude measures, and the
//! differential operator that turns `R^{-1}` into `T^{-1}` on `S^3`.
//!
//! Normalization: [`cosine_kernel`] is the *mean* of `|<u, w>|` over a
//! latitude sphere and [`jacobian`] its surface measure per unit height, so
//! the cosine transform of a latitude measure is `sum mass * K`. An integral
//! over the latitude set `v_4 = 1/sqrt 2` of the points `(v, 1)`, which have
//! norm `sqrt 2`, as it is sometimes written without normalization, equals
//! [`SHIFTED_LATITUDE_FACTOR`]` * K`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::distributions::{
    derivative_of_distribution, jacobian, multiply_smooth, LatitudeMeasure, Piece, PieceFn,
    PiecewiseSmoothFn, SphericalDistributionRS,
};
use crate::error::{Error, Result};
use crate::numerics::{integrate, EndpointSingularity, QuadratureSpec};
use crate::profiles::{AngleProfile, Param};

/// `4 pi sqrt 2`: surface area `4 pi` of the latitude 2-sphere at height
/// `1/sqrt 2` rescaled to radius 1, times the norm `sqrt 2` of its points.
pub const SHIFTED_LATITUDE_FACTOR: f64 = 4.0 * PI * SQRT_2;

/// Surface measure `omega_k` of the unit sphere in `R^k`.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(k - 2) / (k - 2) as f64,
    }
}

/// `2 omega_{n-2} / omega_{n-1}`.
fn radon_constant(n: usize) -> f64 {
    2.0 * sphere_area(n - 2) / sphere_area(n - 1)
}

fn check_radon_dim(n: usize) -> Result<()> {
    if n >= 3 {
        Ok(())
    } else {
        Err(Error::InvalidDimension {
            n,
            reason: "the rotationally symmetric Radon transform needs n >= 3",
        })
    }
}

/// `c_n x^{3-n} int_0^x G(t) (x^2 - t^2)^{(n-4)/2} dt` after `t = x sin psi`,
/// which turns it into `c_n int_0^{pi/2} G(x sin psi) cos^{n-3} psi dpsi`.
fn radon_abel<G: Fn(f64) -> f64>(
    big_g: G,
    breaks: &[f64],
    singular_at_one: bool,
    n: usize,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_radon_dim(n)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "Radon height x = {x} outside [0, 1]"
        )));
    }
    if x == 0.0 {
        return Ok(big_g(0.0));
    }
    let mut nodes = vec![0.0];
    nodes.extend(
        breaks
            .iter()
            .filter(|&&b| b > 0.0 && b < x)
            .map(|&b| (b / x).asin()),
    );
    nodes.push(FRAC_PI_2);
    let power = n as i32 - 3;
    let last = nodes.len() - 2;
    let mut total = 0.0;
    for (i, w) in nodes.windows(2).enumerate() {
        let sing = EndpointSingularity::from_flags(false, singular_at_one && x == 1.0 && i == last);
        total += integrate(
            |psi: f64| big_g(x * psi.sin()) * psi.cos().powi(power),
            w[0],
            w[1],
            &quad.with_singularity(sing),
        )?;
    }
    Ok(radon_constant(n) * total)
}

/// `f(asin x) = (R g)` for an even profile `g`, read through `G(t) = g(acos t)`.
pub fn radon_forward_rotsym(
    g: &AngleProfile,
    n: usize,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let breaks = g.x_breaks(Param::Cos);
    radon_abel(|t| g.value_at(Param::Cos, t), &breaks, false, n, x, quad)
}

/// Same transform for `G` given directly as a piecewise function of `t`.
pub fn radon_forward_piecewise(
    big_g: &PiecewiseSmoothFn,
    n: usize,
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let singular = big_g
        .pieces()
        .last()
        .is_some_and(|p| p.right_singularity.is_some());
    let eval = |t: f64| {
        let p = &big_g.pieces()[big_g.piece_index(t)];
        p.func.value(t)
    };
    radon_abel(eval, &big_g.breakpoints(), singular, n, x, quad)
}

/// Whether `f(asin x)` has an infinite derivative at `x = 1`.
fn steep_at_equator(f: &AngleProfile) -> bool {
    match f {
        AngleProfile::Sampled(_) => true,
        AngleProfile::Trig { b, .. } => *b != 0.0,
        _ => false,
    }
}

/// Invert the `n = 4` transform: `G(x) = d/dx (x f(asin x))`.
///
/// Every branch is differentiated exactly on jets; for sampled profiles that
/// is the derivative of the interpolant inside each cell (finite differences
/// in `x` are ill-conditioned in the last cells, which shrink quadratically
/// towards `x = 1`). A jump of `G` at a branch point means `x f(asin x)` is
/// not differentiable there, which is reported with its location.
pub fn radon_invert_n4(f: &AngleProfile) -> Result<PiecewiseSmoothFn> {
    let x_times = |p: PieceFn| PieceFn::product(vec![PieceFn::polynomial(&[0.0, 1.0]), p]);
    let mut pieces: Vec<Piece> = match f {
        AngleProfile::Sampled(s) => (0..s.cell_count())
            .map(|k| {
                let cell = s.cell(k);
                let (lo, hi) = (cell.phi[0].sin(), cell.phi[1].sin());
                Piece::new(
                    lo,
                    hi,
                    x_times(PieceFn::Hermite {
                        cell,
                        param: Param::Sin,
                    })
                    .derivative(),
                )
            })
            .collect(),
        _ => {
            let mut bounds = vec![0.0];
            bounds.extend(f.x_breaks(Param::Sin));
            bounds.push(1.0);
            bounds
                .windows(2)
                .map(|w| {
                    let branch = f.branch_of(Param::Sin.to_angle(0.5 * (w[0] + w[1])));
                    let profile = PieceFn::Profile {
                        profile: f.clone(),
                        param: Param::Sin,
                        branch,
                    };
                    Piece::new(w[0], w[1], x_times(profile).derivative())
                })
                .collect()
        }
    };
    if steep_at_equator(f) {
        if let Some(last) = pieces.last_mut() {
            last.right_singularity = Some(-0.5);
        }
    }
    let g = PiecewiseSmoothFn::new(pieces)?;
    for (k, b) in g.breakpoints().into_iter().enumerate() {
        if g.jump(k)? != 0.0 {
            return Err(Error::NonDifferentiable { x: b });
        }
    }
    Ok(g)
}

/// Mean of `|<u, w>|` over `w` uniform on the latitude sphere `w_n = x0`, for
/// any unit `u` with `u_n = t`.
pub fn cosine_kernel(t: f64, x0: f64, n: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) || !(-1.0..=1.0).contains(&x0) {
        return Err(Error::domain(format!(
            "kernel arguments ({t}, {x0}) outside [-1, 1]"
        )));
    }
    let a = (t * x0).abs();
    let b = ((1.0 - t * t) * (1.0 - x0 * x0)).sqrt();
    if a >= b {
        return Ok(a);
    }
    match n {
        // <u, w> = a + b s with s uniform on [-1, 1]
        4 => Ok((a * a + b * b) / (2.0 * b)),
        // <u, w> = a + b cos theta with theta uniform on the circle
        3 => Ok((2.0 / PI) * (a * (a / b).asin() + (b * b - a * a).sqrt())),
        _ => Err(Error::InvalidDimension {
            n,
            reason: "closed-form cosine kernel exists for n = 3 and n = 4",
        }),
    }
}

/// `(T mu)(u)` for any unit `u` with `u_n = t`.
pub fn cosine_forward(mu: &LatitudeMeasure, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    let n = mu.n;
    cosine_kernel(t, 0.0, n)?;
    let kink = (1.0 - t * t).sqrt();
    let mut total = 0.0;
    for p in mu.density.pieces() {
        if p.func.is_zero() {
            continue;
        }
        let [a, b] = p.interval;
        let mut nodes = vec![a];
        if kink > a && kink < b {
            nodes.push(kink);
        }
        nodes.push(b);
        let last = nodes.len() - 2;
        for (i, w) in nodes.windows(2).enumerate() {
            let left = i == 0 && p.left_singularity.is_some();
            // the Jacobian has a square-root endpoint at the pole
            let right = i == last && (p.right_singularity.is_some() || (n == 4 && b == 1.0));
            let spec = quad.with_singularity(EndpointSingularity::from_flags(left, right));
            total += integrate(
                |x| {
                    let k = cosine_kernel(t, x, n).unwrap_or(f64::NAN);
                    k * p.func.value(x) * 2.0 * jacobian(n, x)
                },
                w[0],
                w[1],
                &spec,
            )?;
        }
    }
    for atom in &mu.atoms {
        total += atom.mass * cosine_kernel(t, atom.x, n)?;
    }
    Ok(total)
}

/// `(1/8 pi) ((1 - x^2) G'' - 3 x G' + 3 G)` in the sense of distributions.
///
/// This is `(1 / 2 omega_3)(Delta_4 + 3)` acting on `g(acos x)`: jumps of `G'`
/// become atoms and jumps of `G` become first delta-derivatives.
pub fn apply_d(big_g: &PiecewiseSmoothFn) -> Result<SphericalDistributionRS> {
    let d0 = SphericalDistributionRS::from_density(4, big_g.clone())?;
    let d1 = derivative_of_distribution(&d0)?;
    let d2 = derivative_of_distribution(&d1)?;
    let sum = multiply_smooth(&d2, &PieceFn::polynomial(&[1.0, 0.0, -1.0]))
        .add(&multiply_smooth(&d1, &PieceFn::polynomial(&[0.0, -3.0])))?
        .add(&d0.scaled(3.0))?;
    Ok(sum.scaled(1.0 / (2.0 * sphere_area(3))))
}

/// `T^{-1} f = (1 / 2 omega_3)(Delta_4 + 3) R^{-1} f` on `S^3`.
pub fn generating_distribution_pipeline(
    f: &AngleProfile,
    n: usize,
) -> Result<SphericalDistributionRS> {
    if n != 4 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the inversion pipeline is implemented for n = 4 only",
        });
    }
    apply_d(&radon_invert_n4(f)?)
}
