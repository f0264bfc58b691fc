//! Numerical evidence for the zonoid claim: forward residuals, a discretized
//! nonnegative recovery of the generating measure, threshold sweeps, and the
//! structural checks on facets, equal-modulus directions and direct sums.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barrel::is_polar_zonoid;
use crate::distributions::{jacobian, LatitudeAtom, LatitudeMeasure};
use crate::error::{Error, Result};
use crate::numerics::{nnls_solve, NnlsProblem, QuadratureSpec};
use crate::profiles::{gauge, AngleProfile, BarrelParams, Param, ProfileRole};
use crate::transforms::{cosine_forward, cosine_kernel};

pub const DEFAULT_LAT_GRID: usize = 200;
pub const DEFAULT_T_GRID: usize = 400;
/// Sup residual at or below which the recovery counts as a positive measure.
pub const ACCEPT_RESIDUAL: f64 = 1e-4;
/// Sup residual at or above which no positive measure is considered close.
pub const REJECT_RESIDUAL: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const CERTIFY_SCHEMA: &str = "zonopolar.certify/1";
pub const SWEEP_SCHEMA: &str = "zonopolar.sweep/1";

/// `sup_t |T mu(t) - f(acos |t|)|` over `t_grid`.
pub fn forward_residual(
    mu: &LatitudeMeasure,
    f: &AngleProfile,
    t_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    let errs: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let lhs = cosine_forward(mu, t, quad)?;
            Ok((lhs - f.value_at(Param::Cos, t.abs())).abs())
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Chebyshev-Lobatto heights on `[0, 1]`, clustered at both ends.
pub fn latitude_grid(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::domain("latitude grid needs at least two nodes"));
    }
    let m = (count - 1) as f64;
    Ok((0..count)
        .map(|j| 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / m).cos()))
        .collect())
}

/// Heights `t = cos phi` for `phi` equally spaced in `[0, pi/2]`.
pub fn direction_grid(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::domain("direction grid needs at least two nodes"));
    }
    let m = (count - 1) as f64;
    Ok((0..count)
        .map(|i| (FRAC_PI_2 * i as f64 / m).cos().max(0.0))
        .collect())
}

/// Trapezoid cell widths for `nodes`.
fn cell_widths(nodes: &[f64]) -> Vec<f64> {
    let k = nodes.len();
    (0..k)
        .map(|j| {
            let lo = if j == 0 { nodes[0] } else { nodes[j - 1] };
            let hi = if j + 1 == k {
                nodes[k - 1]
            } else {
                nodes[j + 1]
            };
            0.5 * (hi - lo)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    Inconclusive,
    Negative,
}

impl Verdict {
    pub fn from_residual(residual: f64, accept: f64, reject: f64) -> Self {
        if residual <= accept {
            Verdict::Positive
        } else if residual >= reject {
            Verdict::Negative
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Contiguous run of grid nodes carrying recovered mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassCluster {
    pub lo: f64,
    pub hi: f64,
    /// Mass-weighted mean height.
    pub center: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: String,
    pub profile: String,
    pub r: Option<f64>,
    pub n: usize,
    pub lat_grid: usize,
    pub t_grid: usize,
    pub residual: f64,
    pub accept_threshold: f64,
    pub reject_threshold: f64,
    pub verdict: Verdict,
    pub total_mass: f64,
    pub clusters: Vec<MassCluster>,
    /// Nonzero recovered masses at their grid heights.
    pub atoms: Vec<LatitudeAtom>,
    /// Recovered masses divided by `2 J_n(x) dx`, `None` where that vanishes.
    pub density: Vec<(f64, Option<f64>)>,
    pub threshold: Option<f64>,
}

impl CertificateReport {
    pub fn measure(&self) -> Result<LatitudeMeasure> {
        LatitudeMeasure::from_atoms(self.n, self.atoms.clone())
    }

    /// Recovered mass with height in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.x >= lo && a.x <= hi)
            .map(|a| a.mass)
            .sum()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let r = self.r.map(|r| format!("{r}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "profile    {} (r = {r}, n = {})\n",
            self.profile, self.n
        ));
        s.push_str(&format!(
            "grids      {} latitudes x {} directions\n",
            self.lat_grid, self.t_grid
        ));
        s.push_str(&format!("residual   {:.3e}\n", self.residual));
        s.push_str(&format!(
            "verdict    {:?} (accept <= {:.0e}, reject >= {:.0e})\n",
            self.verdict, self.accept_threshold, self.reject_threshold
        ));
        s.push_str(&format!("mass       {:.6}\n", self.total_mass));
        s.push_str("clusters   lo         hi         center     mass\n");
        for c in &self.clusters {
            s.push_str(&format!(
                "           {:<10.6} {:<10.6} {:<10.6} {:.6e}\n",
                c.lo, c.hi, c.center, c.mass
            ));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifySpec {
    pub lat_grid: usize,
    pub t_grid: usize,
    pub accept: f64,
    pub reject: f64,
}

impl Default for CertifySpec {
    fn default() -> Self {
        CertifySpec {
            lat_grid: DEFAULT_LAT_GRID,
            t_grid: DEFAULT_T_GRID,
            accept: ACCEPT_RESIDUAL,
            reject: REJECT_RESIDUAL,
        }
    }
}

fn clusters(nodes: &[f64], masses: &[f64]) -> Vec<MassCluster> {
    let mut out: Vec<MassCluster> = Vec::new();
    let mut open = false;
    for (j, (&x, &m)) in nodes.iter().zip(masses).enumerate() {
        if m <= 0.0 {
            open = false;
            continue;
        }
        match out.last_mut() {
            Some(c) if open => {
                c.center = (c.center * c.mass + x * m) / (c.mass + m);
                c.mass += m;
                c.hi = x;
            }
            _ => out.push(MassCluster {
                lo: x,
                hi: x,
                center: x,
                mass: m,
            }),
        }
        open = j + 1 < nodes.len();
    }
    out
}

/// Fit `f` by a nonnegative combination of latitude atoms and grade the fit.
pub fn nnls_certify(f: &AngleProfile, n: usize, spec: &CertifySpec) -> Result<CertificateReport> {
    if f.role() == ProfileRole::Radial {
        return Err(Error::IncompatibleKind(format!(
            "{} is a radial function, not a norm",
            f.kind_name()
        )));
    }
    cosine_kernel(0.0, 0.0, n)?;
    let nodes = latitude_grid(spec.lat_grid)?;
    let ts = direction_grid(spec.t_grid)?;
    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| {
            nodes
                .iter()
                .map(|&x| cosine_kernel(t, x, n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let matrix = DMatrix::from_fn(ts.len(), nodes.len(), |i, j| rows[i][j]);
    let target: Vec<f64> = ts.iter().map(|&t| f.value_at(Param::Cos, t)).collect();
    let target = DVector::from_vec(target);
    let sol = nnls_solve(&NnlsProblem::new(matrix.clone(), target.clone())?)?;
    let masses = sol.coefficients;
    let fitted = &matrix * DVector::from_column_slice(&masses);
    let residual = (fitted - &target).amax();

    let widths = cell_widths(&nodes);
    let density = nodes
        .iter()
        .zip(&masses)
        .zip(&widths)
        .map(|((&x, &m), &w)| {
            let d = 2.0 * jacobian(n, x) * w;
            (x, (d > 0.0).then(|| m / d))
        })
        .collect();
    let atoms = nodes
        .iter()
        .zip(&masses)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&x, &mass)| LatitudeAtom { x, mass })
        .collect();
    Ok(CertificateReport {
        schema: CERTIFY_SCHEMA.into(),
        profile: f.kind_name().to_string(),
        r: f.radius(),
        n,
        lat_grid: spec.lat_grid,
        t_grid: spec.t_grid,
        residual,
        accept_threshold: spec.accept,
        reject_threshold: spec.reject,
        verdict: Verdict::from_residual(residual, spec.accept, spec.reject),
        total_mass: masses.iter().sum(),
        clusters: clusters(&nodes, &masses),
        atoms,
        density,
        threshold: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    ClosedForm,
    Nnls,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub lo: f64,
    pub hi: f64,
    pub probe: f64,
    pub zonoid: bool,
    /// NNLS residual at the probe (numerical mode only).
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub mode: SweepMode,
    pub r_star: f64,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub history: Vec<SweepStep>,
}

/// Bisect for the radius where the polar stops being a zonoid.
pub fn threshold_sweep(
    r_lo: f64,
    r_hi: f64,
    tol: f64,
    mode: SweepMode,
    n: usize,
    spec: &CertifySpec,
) -> Result<SweepReport> {
    if !(r_lo > 0.0 && r_lo < r_hi && r_hi.is_finite()) {
        return Err(Error::domain(format!("bad bracket [{r_lo}, {r_hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let probe = |r: f64| -> Result<(bool, Option<f64>)> {
        match mode {
            SweepMode::ClosedForm => Ok((is_polar_zonoid(r)?, None)),
            SweepMode::Nnls => {
                let rep = nnls_certify(&AngleProfile::barrel_norm(r)?, n, spec)?;
                Ok((rep.verdict == Verdict::Positive, Some(rep.residual)))
            }
        }
    };
    let mut history = Vec::new();
    let (z_lo, res_lo) = probe(r_lo)?;
    history.push(SweepStep {
        lo: r_lo,
        hi: r_hi,
        probe: r_lo,
        zonoid: z_lo,
        residual: res_lo,
    });
    let (z_hi, res_hi) = probe(r_hi)?;
    history.push(SweepStep {
        lo: r_lo,
        hi: r_hi,
        probe: r_hi,
        zonoid: z_hi,
        residual: res_hi,
    });
    if z_lo == z_hi {
        return Err(Error::NoBracket { lo: r_lo, hi: r_hi });
    }
    let (mut lo, mut hi) = (r_lo, r_hi);
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        let (z, res) = probe(mid)?;
        history.push(SweepStep {
            lo,
            hi,
            probe: mid,
            zonoid: z,
            residual: res,
        });
        if z == z_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SweepReport {
        schema: SWEEP_SCHEMA.into(),
        mode,
        r_star: 0.5 * (lo + hi),
        lo: r_lo,
        hi: r_hi,
        tol,
        history,
    })
}

/// Random horizontal vector of length at most `radius` in `R^{n-1}`, padded
/// with a zero last coordinate.
fn horizontal_sample(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let mut c: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let len2: f64 = c.iter().map(|v| v * v).sum();
        if len2 <= 1.0 {
            c.iter_mut().for_each(|v| *v *= radius);
            c.push(0.0);
            return c;
        }
    }
}

/// Largest deviation seen by [`facet_gauge_check`].
pub fn facet_gauge_deviation(params: &BarrelParams, samples: usize, seed: u64) -> Result<f64> {
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let c = horizontal_sample(&mut rng, n, params.r);
        let plus: Vec<f64> = e.iter().zip(&c).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = e.iter().zip(&c).map(|(a, b)| a - b).collect();
        let sum: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
        let gp = gauge(params, &plus)?;
        let gm = gauge(params, &minus)?;
        let gs = gauge(params, &sum)?;
        worst = worst
            .max((gp - 1.0).abs())
            .max((gs - 2.0).abs())
            .max((gp + gm - 2.0).abs());
    }
    Ok(worst)
}

/// The disc `e_n + c`, `|c| <= r`, lies in the boundary, and the norm is
/// additive along it.
pub fn facet_gauge_check(params: &BarrelParams, samples: usize, seed: u64) -> Result<bool> {
    Ok(facet_gauge_deviation(params, samples, seed)? <= 1e-12)
}

/// All unit `u` with `|<u, x_1>| = ... = |<u, x_n>|` for a basis `x_i`.
pub fn equal_modulus_directions(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = basis.len();
    if n == 0 || basis.iter().any(|v| v.len() != n) {
        return Err(Error::Malformed("expected n vectors in R^n".into()));
    }
    if n > 20 {
        return Err(Error::Malformed("too many sign patterns".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| basis[i][j]);
    let sv = m.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::SingularBasis);
    }
    let lu = m.lu();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for pattern in 0..(1u64 << n) {
        let s = DVector::from_fn(n, |i, _| if pattern >> i & 1 == 1 { -1.0 } else { 1.0 });
        let u = lu.solve(&s).ok_or(Error::SingularBasis)?;
        let u = u.normalize();
        let dup = out.iter().any(|v| {
            v.iter()
                .zip(u.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                < 1e-9
        });
        if !dup {
            out.push(u.iter().copied().collect());
        }
    }
    Ok(out)
}

/// Gauge of `B + C` when `splitter` projects onto the two summands:
/// `x -> max(gauge_b(Px), gauge_c(Qx))`.
pub fn direct_sum_gauge<B, C, S>(gauge_b: B, gauge_c: C, splitter: S) -> impl Fn(&[f64]) -> f64
where
    B: Fn(&[f64]) -> f64,
    C: Fn(&[f64]) -> f64,
    S: Fn(&[f64]) -> (Vec<f64>, Vec<f64>),
{
    move |x| {
        let (p, q) = splitter(x);
        gauge_b(&p).max(gauge_c(&q))
    }
}

/// Splits `R^n` into the first `k` coordinates and the rest.
pub fn coordinate_splitter(k: usize) -> impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>) {
    move |x| {
        let k = k.min(x.len());
        (x[..k].to_vec(), x[k..].to_vec())
    }
}

/// `| ||(x+y)+(x-y)|| + ||(x+y)-(x-y)|| - 2 (||x+y|| + ||x-y||) |`.
pub fn summand_defect(norm: impl Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> f64 {
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let s: Vec<f64> = p.iter().zip(&m).map(|(a, b)| a + b).collect();
    let d: Vec<f64> = p.iter().zip(&m).map(|(a, b)| a - b).collect();
    (norm(&s) + norm(&d) - 2.0 * (norm(&p) + norm(&m))).abs()
}
