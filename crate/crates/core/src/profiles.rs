//! Closed-form profiles of the barrel body `B_{n,r} = B_2^n + r B_2^{n-1}`
//! and its polar, gauge evaluation, and sampled angle profiles.
//!
//! Profiles live on the polar angle `phi` in `[0, pi/2]`, measured from the
//! rotation axis `e_n`; the extension to `[0, pi]` is even about `pi/2`.
//! Two reparameterizations appear throughout the crate and are named
//! explicitly: [`Param::Sin`] uses `x = sin phi` (the Radon side) and
//! [`Param::Cos`] uses `x = cos phi` (the height of a point on the sphere).

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Angle tolerance when validating `phi` against `[0, pi/2]`.
const ANGLE_SLACK: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrelParams {
    pub n: usize,
    pub r: f64,
}

impl BarrelParams {
    pub fn new(n: usize, r: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "barrel bodies need n >= 3",
            });
        }
        check_radius(r)?;
        Ok(BarrelParams { n, r })
    }

    /// Dimension check for the closed-form pipeline (n = 3 or 4).
    pub fn require_closed_form_dim(&self) -> Result<()> {
        match self.n {
            3 | 4 => Ok(()),
            n => Err(Error::InvalidDimension {
                n,
                reason: "closed-form pipeline supports n = 3 and n = 4",
            }),
        }
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("radius must be positive, got {r}")))
    }
}

pub(crate) fn check_angle(phi: f64) -> Result<f64> {
    if (-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&phi) {
        Ok(phi.clamp(0.0, FRAC_PI_2))
    } else {
        Err(Error::domain(format!("angle {phi} outside [0, pi/2]")))
    }
}

/// Which coordinate stands in for the angle: `x = sin phi` or `x = cos phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Sin,
    Cos,
}

impl Param {
    pub fn to_x(self, phi: f64) -> f64 {
        match self {
            Param::Sin => phi.sin(),
            Param::Cos => phi.cos(),
        }
    }

    pub fn to_angle(self, x: f64) -> f64 {
        match self {
            Param::Sin => x.clamp(-1.0, 1.0).asin(),
            Param::Cos => x.clamp(-1.0, 1.0).acos(),
        }
    }

    /// `sin phi` and `cos phi` as jets in the variable `x`, plus their squares
    /// computed without the square root (which is singular where it vanishes).
    fn trig_of(self, x: Jet) -> TrigJets {
        let x2 = x * x;
        let other2 = 1.0 - x2;
        let other = other2.sqrt();
        match self {
            Param::Sin => TrigJets {
                sin: x,
                cos: other,
                cos2: other2,
            },
            Param::Cos => TrigJets {
                sin: other,
                cos: x,
                cos2: x2,
            },
        }
    }

    fn angle_of(self, x: Jet) -> Jet {
        match self {
            Param::Sin => x.asin(),
            Param::Cos => x.acos(),
        }
    }
}

struct TrigJets {
    sin: Jet,
    cos: Jet,
    cos2: Jet,
}

/// Norm of `B_{n,r}` restricted to the sphere, as a function of the polar angle.
pub fn barrel_norm_profile(params: &BarrelParams, phi: f64) -> Result<f64> {
    check_radius(params.r)?;
    let phi = check_angle(phi)?;
    let r = params.r;
    Ok(if phi <= r.atan() {
        phi.cos()
    } else {
        let c = phi.cos();
        1.0 / (r * phi.sin() + (1.0 - r * r * c * c).sqrt())
    })
}

/// Support function `1 + r sin phi` of `B_{n,r}`.
pub fn barrel_support_profile(params: &BarrelParams, phi: f64) -> Result<f64> {
    check_radius(params.r)?;
    let phi = check_angle(phi)?;
    Ok(1.0 + params.r * phi.sin())
}

/// Radial function of the polar body, the reciprocal of the support function.
pub fn polar_radial_profile(params: &BarrelParams, phi: f64) -> Result<f64> {
    Ok(1.0 / barrel_support_profile(params, phi)?)
}

/// Boundary of the central section of the polar of `B_{3,1}`: `|y| = (1 - x^2)/2`.
pub fn polar_section_curve(x: f64) -> Result<f64> {
    if x.abs() > 1.0 || !x.is_finite() {
        return Err(Error::domain(format!(
            "section curve needs |x| <= 1, got {x}"
        )));
    }
    Ok((1.0 - x * x) / 2.0)
}

/// Polar angle of `point` folded into `[0, pi/2]`, together with the
/// horizontal radius and the absolute height.
pub fn polar_coordinates(point: &[f64]) -> (f64, f64, f64) {
    let (last, rest) = point
        .split_last()
        .map(|(l, r)| (*l, r))
        .unwrap_or((0.0, &[]));
    let rho = rest.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = last.abs();
    (rho.atan2(h), rho, h)
}

/// Minkowski functional of `B_{n,r}`; `gauge(p) <= 1` iff `p` lies in the body.
pub fn gauge(params: &BarrelParams, point: &[f64]) -> Result<f64> {
    check_radius(params.r)?;
    if point.len() != params.n {
        return Err(Error::domain(format!(
            "point has {} coordinates, expected {}",
            point.len(),
            params.n
        )));
    }
    let (_, rho, h) = polar_coordinates(point);
    Ok(gauge_from_cylindrical(params.r, rho, h))
}

/// Gauge in terms of horizontal radius `rho` and height `h >= 0`.
pub(crate) fn gauge_from_cylindrical(r: f64, rho: f64, h: f64) -> f64 {
    if rho == 0.0 && h == 0.0 {
        return 0.0;
    }
    if rho <= r * h {
        // flat facet at height 1
        h
    } else {
        let norm2 = rho * rho + h * h;
        norm2 / (r * rho + (norm2 - r * r * h * h).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    #[default]
    MonotoneCubic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub phi: f64,
    pub value: f64,
}

/// Profile given by samples on a strictly increasing grid covering `[0, pi/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRecord", into = "SampledRecord")]
pub struct SampledProfile {
    phi: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    interpolation: Interpolation,
}

#[derive(Serialize, Deserialize)]
struct SampledRecord {
    #[serde(default)]
    interpolation: Interpolation,
    samples: Vec<Sample>,
}

impl TryFrom<SampledRecord> for SampledProfile {
    type Error = Error;
    fn try_from(rec: SampledRecord) -> Result<Self> {
        let (phi, values) = rec.samples.iter().map(|s| (s.phi, s.value)).unzip();
        SampledProfile::new(phi, values, rec.interpolation)
    }
}

impl From<SampledProfile> for SampledRecord {
    fn from(p: SampledProfile) -> Self {
        SampledRecord {
            interpolation: p.interpolation,
            samples: p.samples(),
        }
    }
}

/// One cubic Hermite cell of a sampled profile, in the angle variable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteCell {
    pub phi: [f64; 2],
    pub value: [f64; 2],
    pub slope: [f64; 2],
}

impl HermiteCell {
    pub fn eval_jet(&self, phi: Jet) -> Jet {
        let h = self.phi[1] - self.phi[0];
        let s = (phi - self.phi[0]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = s3 * 2.0 - s2 * 3.0 + 1.0;
        let h10 = s3 - s2 * 2.0 + s;
        let h01 = s2 * 3.0 - s3 * 2.0;
        let h11 = s3 - s2;
        h00 * self.value[0]
            + h10 * (h * self.slope[0])
            + h01 * self.value[1]
            + h11 * (h * self.slope[1])
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.eval_jet(Jet::constant(phi)).value()
    }
}

impl SampledProfile {
    pub fn new(phi: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if phi.len() != values.len() || phi.len() < 2 {
            return Err(Error::Malformed(
                "sampled profile needs matching grids of length >= 2".into(),
            ));
        }
        if phi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Malformed(
                "angle grid must be strictly increasing".into(),
            ));
        }
        if phi[0].abs() > ANGLE_SLACK || (phi[phi.len() - 1] - FRAC_PI_2).abs() > 1e-12 {
            return Err(Error::Malformed(
                "angle grid must contain both 0 and pi/2".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("profile values must be finite".into()));
        }
        let slopes = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::MonotoneCubic => monotone_slopes(&phi, &values),
        };
        Ok(SampledProfile {
            phi,
            values,
            slopes,
            interpolation,
        })
    }

    /// Sample `f` on `count` equally spaced angles in `[0, pi/2]`.
    pub fn from_fn<F: Fn(f64) -> f64>(
        f: F,
        count: usize,
        interpolation: Interpolation,
    ) -> Result<Self> {
        let grid = angle_grid(count.max(2));
        let values = grid.iter().map(|&p| f(p)).collect();
        SampledProfile::new(grid, values, interpolation)
    }

    pub fn grid(&self) -> &[f64] {
        &self.phi
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn samples(&self) -> Vec<Sample> {
        self.phi
            .iter()
            .zip(&self.values)
            .map(|(&phi, &value)| Sample { phi, value })
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn cell(&self, k: usize) -> HermiteCell {
        let (p0, p1) = (self.phi[k], self.phi[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let slope = match self.interpolation {
            Interpolation::Linear => {
                let s = (y1 - y0) / (p1 - p0);
                [s, s]
            }
            Interpolation::MonotoneCubic => [self.slopes[k], self.slopes[k + 1]],
        };
        HermiteCell {
            phi: [p0, p1],
            value: [y0, y1],
            slope,
        }
    }

    /// Cell containing `phi`; at an interior knot the cell to the right.
    pub fn cell_index(&self, phi: f64) -> usize {
        let k = self.phi.partition_point(|&p| p <= phi);
        k.saturating_sub(1).min(self.cell_count() - 1)
    }

    pub fn eval(&self, phi: f64) -> Result<f64> {
        let phi = check_angle(phi)?;
        Ok(self.cell(self.cell_index(phi)).eval(phi))
    }
}

/// Fritsch-Carlson monotone cubic slopes.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// `count` equally spaced angles covering `[0, pi/2]`.
pub fn angle_grid(count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|k| {
            if k == count - 1 {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * k as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Even profile on `[0, pi/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngleProfile {
    /// Norm of `B_{n,r}`.
    BarrelNorm {
        r: f64,
    },
    /// Support function `1 + r sin phi` of `B_{n,r}`.
    BarrelSupport {
        r: f64,
    },
    /// Radial function `1 / (1 + r sin phi)` of the polar body.
    PolarRadial {
        r: f64,
    },
    /// `a + b cos phi + c sin phi`; covers the Euclidean ball (`a = 1`) and the
    /// support of a coaxial sub-ball (`c = r`).
    Trig {
        a: f64,
        b: f64,
        c: f64,
    },
    Sampled(SampledProfile),
}

/// Role a profile plays, used to reject meaningless combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileRole {
    Norm,
    Support,
    Radial,
    Generic,
}

impl AngleProfile {
    pub fn barrel_norm(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(AngleProfile::BarrelNorm { r })
    }

    pub fn barrel_support(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(AngleProfile::BarrelSupport { r })
    }

    pub fn polar_radial(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(AngleProfile::PolarRadial { r })
    }

    pub fn constant(value: f64) -> Self {
        AngleProfile::Trig {
            a: value,
            b: 0.0,
            c: 0.0,
        }
    }

    /// Norm (and support function) of the Euclidean unit ball.
    pub fn euclidean() -> Self {
        Self::constant(1.0)
    }

    pub fn role(&self) -> ProfileRole {
        match self {
            AngleProfile::BarrelNorm { .. } => ProfileRole::Norm,
            AngleProfile::BarrelSupport { .. } | AngleProfile::Trig { .. } => ProfileRole::Support,
            AngleProfile::PolarRadial { .. } => ProfileRole::Radial,
            AngleProfile::Sampled(_) => ProfileRole::Generic,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AngleProfile::BarrelNorm { .. } => "barrel_norm",
            AngleProfile::BarrelSupport { .. } => "barrel_support",
            AngleProfile::PolarRadial { .. } => "polar_radial",
            AngleProfile::Trig { .. } => "trig",
            AngleProfile::Sampled(_) => "sampled",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            AngleProfile::BarrelNorm { r }
            | AngleProfile::BarrelSupport { r }
            | AngleProfile::PolarRadial { r } => Some(*r),
            _ => None,
        }
    }

    pub fn eval(&self, phi: f64) -> Result<f64> {
        let phi = check_angle(phi)?;
        match self {
            AngleProfile::BarrelNorm { r } => {
                barrel_norm_profile(&BarrelParams { n: 3, r: *r }, phi)
            }
            AngleProfile::BarrelSupport { r } => {
                barrel_support_profile(&BarrelParams { n: 3, r: *r }, phi)
            }
            AngleProfile::PolarRadial { r } => {
                polar_radial_profile(&BarrelParams { n: 3, r: *r }, phi)
            }
            AngleProfile::Trig { a, b, c } => Ok(a + b * phi.cos() + c * phi.sin()),
            AngleProfile::Sampled(s) => s.eval(phi),
        }
    }

    /// Interior angles where the profile is not smooth, increasing.
    pub fn angle_breaks(&self) -> Vec<f64> {
        match self {
            AngleProfile::BarrelNorm { r } => vec![r.atan()],
            AngleProfile::Sampled(s) => s.grid()[1..s.grid().len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    /// Number of smooth branches (one more than the number of breaks).
    pub fn branch_count(&self) -> usize {
        self.angle_breaks().len() + 1
    }

    /// Branch containing `phi`; at a break the branch with larger angles.
    pub fn branch_of(&self, phi: f64) -> usize {
        self.angle_breaks().partition_point(|&b| b <= phi)
    }

    /// Breaks mapped to the `x` variable of `param`, increasing in `x`.
    pub fn x_breaks(&self, param: Param) -> Vec<f64> {
        let mut xs: Vec<f64> = self.angle_breaks().iter().map(|&p| param.to_x(p)).collect();
        xs.sort_by(f64::total_cmp);
        xs
    }

    /// Branch `branch` as an analytic function of `x` (extended past its own
    /// interval by the same formula), evaluated on a jet.
    pub fn branch_jet(&self, branch: usize, param: Param, x: Jet) -> Jet {
        match self {
            AngleProfile::BarrelNorm { r } => {
                let r = *r;
                let t = param.trig_of(x);
                if branch == 0 {
                    t.cos
                } else {
                    (t.sin * r + (1.0 - t.cos2 * (r * r)).sqrt()).recip()
                }
            }
            AngleProfile::BarrelSupport { r } => param.trig_of(x).sin * *r + 1.0,
            AngleProfile::PolarRadial { r } => (param.trig_of(x).sin * *r + 1.0).recip(),
            AngleProfile::Trig { a, b, c } => {
                let t = param.trig_of(x);
                // skip vanishing terms: their jets may be singular at the ends
                let mut out = Jet::constant(*a);
                if *b != 0.0 {
                    out += t.cos * *b;
                }
                if *c != 0.0 {
                    out += t.sin * *c;
                }
                out
            }
            AngleProfile::Sampled(sp) => sp
                .cell(branch.min(sp.cell_count() - 1))
                .eval_jet(param.angle_of(x)),
        }
    }

    /// `f(asin x)` or `f(acos x)` at a plain point.
    pub fn value_at(&self, param: Param, x: f64) -> f64 {
        let phi = param.to_angle(x);
        self.branch_jet(self.branch_of(phi), param, Jet::constant(x))
            .value()
    }
}

/// Pointwise sum of two support-function profiles.
///
/// Ball plus coaxial sub-ball is recognized and returned in closed form;
/// sampled inputs are summed on the merged angle grid.
pub fn support_sum(a: &AngleProfile, b: &AngleProfile) -> Result<AngleProfile> {
    for p in [a, b] {
        if matches!(p.role(), ProfileRole::Norm | ProfileRole::Radial) {
            return Err(Error::IncompatibleKind(format!(
                "{} is not a support function",
                p.kind_name()
            )));
        }
    }
    let as_trig = |p: &AngleProfile| match p {
        AngleProfile::Trig { a, b, c } => Some((*a, *b, *c)),
        AngleProfile::BarrelSupport { r } => Some((1.0, 0.0, *r)),
        _ => None,
    };
    if let (Some(x), Some(y)) = (as_trig(a), as_trig(b)) {
        let (ta, tb, tc) = (x.0 + y.0, x.1 + y.1, x.2 + y.2);
        if ta == 1.0 && tb == 0.0 && tc > 0.0 {
            return Ok(AngleProfile::BarrelSupport { r: tc });
        }
        return Ok(AngleProfile::Trig {
            a: ta,
            b: tb,
            c: tc,
        });
    }
    let mut grid: Vec<f64> = Vec::new();
    let mut interpolation = Interpolation::MonotoneCubic;
    for p in [a, b] {
        if let AngleProfile::Sampled(s) = p {
            grid.extend_from_slice(s.grid());
            if s.interpolation() == Interpolation::Linear {
                interpolation = Interpolation::Linear;
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    let values = grid
        .iter()
        .map(|&phi| Ok(a.eval(phi)? + b.eval(phi)?))
        .collect::<Result<Vec<f64>>>()?;
    let n = grid.len();
    grid[0] = 0.0;
    grid[n - 1] = FRAC_PI_2;
    Ok(AngleProfile::Sampled(SampledProfile::new(
        grid,
        values,
        interpolation,
    )?))
}

/// CSV table `phi,value` of a profile over `count` equally spaced angles.
pub fn profile_csv(profile: &AngleProfile, count: usize) -> Result<String> {
    let mut out = String::from("phi,value\n");
    for phi in angle_grid(count) {
        let _ = writeln!(out, "{phi},{}", profile.eval(phi)?);
    }
    Ok(out)
}

/// Serialized form `{kind, r, n, samples}` of a profile tabulated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub n: usize,
    pub samples: Vec<Sample>,
}

impl ProfileDocument {
    pub fn tabulate(profile: &AngleProfile, n: usize, count: usize) -> Result<Self> {
        let samples = angle_grid(count)
            .into_iter()
            .map(|phi| {
                Ok(Sample {
                    phi,
                    value: profile.eval(phi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProfileDocument {
            kind: profile.kind_name().to_string(),
            r: profile.radius(),
            n,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn bp(r: f64) -> BarrelParams {
        BarrelParams::new(4, r).unwrap()
    }

    #[test]
    fn norm_profile_examples() {
        assert_eq!(barrel_norm_profile(&bp(1.0), 0.0).unwrap(), 1.0);
        assert!((barrel_norm_profile(&bp(1.0), FRAC_PI_2).unwrap() - 0.5).abs() < 1e-16);
        let r: f64 = 2.0;
        let phi = r.atan();
        let first = phi.cos();
        let second = 1.0 / (r * phi.sin() + (1.0 - r * r * phi.cos().powi(2)).sqrt());
        let expect = 1.0 / 5f64.sqrt();
        assert!((first - expect).abs() < 1e-15);
        assert!((second - expect).abs() < 1e-15);
        assert!((barrel_norm_profile(&bp(r), phi).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn support_and_radial_examples() {
        assert_eq!(barrel_support_profile(&bp(1.0), FRAC_PI_2).unwrap(), 2.0);
        assert_eq!(barrel_support_profile(&bp(0.5), 0.0).unwrap(), 1.0);
        assert_eq!(barrel_support_profile(&bp(0.5), FRAC_PI_2).unwrap(), 1.5);
        assert_eq!(polar_radial_profile(&bp(1.0), FRAC_PI_2).unwrap(), 0.5);
        assert_eq!(polar_radial_profile(&bp(1.0), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn polar_radial_lies_on_section_curve() {
        // Radial point at angle phi from the axis: height rho cos phi, lateral
        // offset rho sin phi. With the axis as the curve's x coordinate the
        // lateral offset must equal (1 - x^2)/2.
        let p = BarrelParams::new(3, 1.0).unwrap();
        for k in 0..=40 {
            let phi = FRAC_PI_2 * k as f64 / 40.0;
            let rho = polar_radial_profile(&p, phi).unwrap();
            let (x, y) = (rho * phi.cos(), rho * phi.sin());
            assert!(
                (y - polar_section_curve(x).unwrap()).abs() <= 1e-12,
                "phi = {phi}"
            );
        }
        let rho = polar_radial_profile(&p, FRAC_PI_4).unwrap();
        let x = rho * FRAC_PI_4.cos();
        assert!((rho * FRAC_PI_4.sin() - polar_section_curve(x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn section_curve_examples() {
        assert_eq!(polar_section_curve(0.0).unwrap(), 0.5);
        assert_eq!(polar_section_curve(1.0).unwrap(), 0.0);
        assert!((polar_section_curve(0.6).unwrap() - 0.32).abs() < 1e-16);
        assert!(polar_section_curve(1.01).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(barrel_norm_profile(&BarrelParams { n: 4, r: -1.0 }, 0.1).is_err());
        assert!(barrel_norm_profile(&bp(1.0), 1.7).is_err());
        assert!(barrel_norm_profile(&bp(1.0), -0.1).is_err());
        assert!(BarrelParams::new(2, 1.0).is_err());
        assert!(BarrelParams::new(5, 1.0)
            .unwrap()
            .require_closed_form_dim()
            .is_err());
    }

    #[test]
    fn gauge_examples() {
        let p = bp(1.0);
        assert_eq!(gauge(&p, &[0.0, 0.0, 0.0, 1.0]).unwrap(), 1.0);
        assert!((gauge(&p, &[2.0, 0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gauge(&p, &[0.5, 0.0, 0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(gauge(&p, &[0.0; 4]).unwrap(), 0.0);
        assert!(gauge(&p, &[1.0, 0.0]).is_err());
    }

    /// Minkowski membership oracle: p in B + rD iff the horizontal excess
    /// beyond r fits in the unit ball together with the height.
    fn in_body(r: f64, rho: f64, h: f64) -> bool {
        let excess = (rho - r).max(0.0);
        excess * excess + h * h <= 1.0 + 1e-12
    }

    #[test]
    fn gauge_matches_membership_oracle() {
        let r = 0.7;
        for i in 0..30 {
            for j in 0..30 {
                let (rho, h) = (2.0 * i as f64 / 29.0, 1.2 * j as f64 / 29.0);
                let g = gauge_from_cylindrical(r, rho, h);
                if (g - 1.0).abs() > 1e-9 {
                    assert_eq!(g < 1.0, in_body(r, rho, h), "rho = {rho}, h = {h}, g = {g}");
                }
            }
        }
    }

    #[test]
    fn gauge_is_dimension_independent() {
        let (p3, p4) = (BarrelParams::new(3, 0.9).unwrap(), bp(0.9));
        for k in 0..20 {
            let phi = FRAC_PI_2 * k as f64 / 19.0;
            let s = 1.3;
            let a = gauge(&p3, &[s * phi.sin(), 0.0, s * phi.cos()]).unwrap();
            let b = gauge(
                &p4,
                &[
                    0.0,
                    s * phi.sin() * 0.6,
                    s * phi.sin() * 0.8,
                    -s * phi.cos(),
                ],
            )
            .unwrap();
            assert!((a - b).abs() <= 1e-14, "phi = {phi}");
        }
    }

    #[test]
    fn gauge_radial_duality_by_bisection() {
        for r in [0.3, 1.0, 2.5] {
            let p = bp(r);
            for k in 0..=16 {
                let phi = FRAC_PI_2 * k as f64 / 16.0;
                let dir = [phi.sin(), 0.0, 0.0, phi.cos()];
                let (mut lo, mut hi) = (0.0, 10.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let pt: Vec<f64> = dir.iter().map(|d| d * mid).collect();
                    if gauge(&p, &pt).unwrap() <= 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let f = barrel_norm_profile(&p, phi).unwrap();
                assert!((f * lo - 1.0).abs() <= 1e-9, "r = {r}, phi = {phi}");
            }
        }
    }

    #[test]
    fn radial_does_not_exceed_support() {
        for r in [0.2, 1.0, 3.0] {
            for k in 0..=50 {
                let phi = FRAC_PI_2 * k as f64 / 50.0;
                let f = barrel_norm_profile(&bp(r), phi).unwrap();
                assert!(1.0 / f <= 1.0 + r * phi.sin() + 1e-15);
            }
        }
    }

    #[test]
    fn support_sum_examples() {
        let ball = AngleProfile::euclidean();
        let sub = AngleProfile::Trig {
            a: 0.0,
            b: 0.0,
            c: 0.6,
        };
        assert_eq!(
            support_sum(&ball, &sub).unwrap(),
            AngleProfile::BarrelSupport { r: 0.6 }
        );
        let point = AngleProfile::constant(0.0);
        assert_eq!(
            support_sum(&ball, &point).unwrap(),
            AngleProfile::constant(1.0)
        );
        assert!(support_sum(&ball, &AngleProfile::BarrelNorm { r: 1.0 }).is_err());

        let s1 = SampledProfile::from_fn(|p| p.sin(), 5, Interpolation::MonotoneCubic).unwrap();
        let s2 = SampledProfile::from_fn(|p| p.cos(), 7, Interpolation::MonotoneCubic).unwrap();
        let sum = support_sum(
            &AngleProfile::Sampled(s1.clone()),
            &AngleProfile::Sampled(s2.clone()),
        )
        .unwrap();
        let AngleProfile::Sampled(merged) = &sum else {
            panic!()
        };
        assert_eq!(merged.grid().len(), 9); // 5 + 7 - shared {0, pi/4, pi/2}
        for &phi in merged.grid() {
            let expect = s1.eval(phi).unwrap() + s2.eval(phi).unwrap();
            assert!((sum.eval(phi).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn sampled_profile_validation_and_interpolation() {
        assert!(
            SampledProfile::new(vec![0.0, 1.0], vec![1.0, 1.0], Interpolation::Linear).is_err()
        );
        assert!(SampledProfile::new(
            vec![0.0, 1.0, FRAC_PI_2],
            vec![1.0, 1.0],
            Interpolation::Linear
        )
        .is_err());
        assert!(SampledProfile::new(
            vec![0.0, 1.0, 0.5, FRAC_PI_2],
            vec![1.0; 4],
            Interpolation::Linear
        )
        .is_err());
        let s = SampledProfile::from_fn(|p| p.cos(), 41, Interpolation::MonotoneCubic).unwrap();
        for k in 0..100 {
            let phi = FRAC_PI_2 * (k as f64 + 0.5) / 100.0;
            let err = (s.eval(phi).unwrap() - phi.cos()).abs();
            // harmonic-mean slopes lose an order next to the extremum at 0
            assert!(err < 1e-4, "phi = {phi}: {err}");
        }
        assert!(s.eval(1.6).is_err());
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let phi = angle_grid(6);
        let values = vec![0.0, 0.0, 0.1, 0.9, 1.0, 1.0];
        let s = SampledProfile::new(phi, values, Interpolation::MonotoneCubic).unwrap();
        let mut prev = -1.0;
        for k in 0..=500 {
            let v = s.eval(FRAC_PI_2 * k as f64 / 500.0).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn parameterized_branches_match_angle_evaluation() {
        let profiles = [
            AngleProfile::BarrelNorm { r: 0.8 },
            AngleProfile::BarrelSupport { r: 0.8 },
            AngleProfile::PolarRadial { r: 1.2 },
            AngleProfile::Trig {
                a: 0.3,
                b: -0.2,
                c: 0.5,
            },
            AngleProfile::Sampled(
                SampledProfile::from_fn(|p| 1.0 + p * p, 9, Interpolation::MonotoneCubic).unwrap(),
            ),
        ];
        for p in &profiles {
            for k in 0..=20 {
                let phi = FRAC_PI_2 * k as f64 / 20.0;
                let want = p.eval(phi).unwrap();
                for param in [Param::Sin, Param::Cos] {
                    let got = p.value_at(param, param.to_x(phi));
                    assert!(
                        (got - want).abs() < 1e-12,
                        "{} {param:?} phi = {phi}",
                        p.kind_name()
                    );
                }
            }
        }
    }

    #[test]
    fn json_shapes() {
        let p = AngleProfile::BarrelNorm { r: 1.0 };
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"kind":"barrel_norm","r":1.0}"#
        );
        let s = AngleProfile::Sampled(
            SampledProfile::from_fn(|p| p, 3, Interpolation::Linear).unwrap(),
        );
        let text = serde_json::to_string(&s).unwrap();
        assert!(
            text.starts_with(r#"{"kind":"sampled","interpolation":"linear","samples":[{"phi":0.0"#)
        );
        let back: AngleProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let doc = ProfileDocument::tabulate(&p, 3, 5).unwrap();
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["kind"], "barrel_norm");
        assert_eq!(v["n"], 3);
        assert_eq!(v["samples"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn csv_export() {
        let csv = profile_csv(&AngleProfile::BarrelNorm { r: 1.0 }, 5).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "phi,value");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], "0,1");
    }
}
