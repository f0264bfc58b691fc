//! Rotationally symmetric distributions on the sphere, written in the height
//! variable `x = |cos phi|`: a piecewise smooth density, Dirac atoms and
//! derivatives of Dirac atoms.
//!
//! All calculus here is in `x` alone. The surface Jacobian enters only when a
//! distribution is turned into a [`LatitudeMeasure`].

mod latitude;
mod piece;

pub use latitude::{jacobian, LatitudeAtom, LatitudeMeasure};
pub use piece::{PieceFn, SignHint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet};
use crate::numerics::{
    integrate, one_sided_limit, EndpointSingularity, LimitSpec, QuadratureSpec, Side,
};

/// Jumps below this (relative) size between exact pieces are roundoff.
const EXACT_JUMP_TOL: f64 = 1e-12;
/// Jump threshold for pieces built from sampled data.
const SAMPLED_JUMP_TOL: f64 = 1e-7;
/// Two locations closer than this are the same point.
const LOCATION_TOL: f64 = 1e-14;

/// One interval of a [`PiecewiseSmoothFn`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: [f64; 2],
    #[serde(flatten)]
    pub func: PieceFn,
    /// Exponent `e > -1` of an integrable blow-up `|x - a|^e` at the left end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_singularity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_singularity: Option<f64>,
}

impl Piece {
    pub fn new(a: f64, b: f64, func: PieceFn) -> Self {
        Piece {
            interval: [a, b],
            func,
            left_singularity: None,
            right_singularity: None,
        }
    }

    pub fn with_singularities(mut self, left: Option<f64>, right: Option<f64>) -> Self {
        self.left_singularity = left;
        self.right_singularity = right;
        self
    }

    pub fn width(&self) -> f64 {
        self.interval[1] - self.interval[0]
    }

    fn quadrature_flags(&self) -> EndpointSingularity {
        EndpointSingularity::from_flags(
            self.left_singularity.is_some(),
            self.right_singularity.is_some(),
        )
    }

    /// Limit of the piece at one of its own endpoints.
    fn endpoint_limit(&self, at_right_end: bool) -> Result<f64> {
        let (x, flag, side) = if at_right_end {
            (self.interval[1], self.right_singularity, Side::Left)
        } else {
            (self.interval[0], self.left_singularity, Side::Right)
        };
        if flag.is_some_and(|e| e < 0.0) {
            return Err(Error::InfiniteJump { x });
        }
        let v = if self.func.is_exact() {
            self.func.value(x)
        } else {
            let spec = LimitSpec {
                initial_step: (0.25 * self.width()).min(1e-2),
                ..LimitSpec::default()
            };
            one_sided_limit(|s| self.func.value(s), x, side, &spec)
                .map_err(|_| Error::InfiniteJump { x })?
                .value
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InfiniteJump { x })
        }
    }
}

/// Piecewise smooth function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct PiecewiseSmoothFn {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for PiecewiseSmoothFn {
    type Error = Error;
    fn try_from(pieces: Vec<Piece>) -> Result<Self> {
        PiecewiseSmoothFn::new(pieces)
    }
}

impl From<PiecewiseSmoothFn> for Vec<Piece> {
    fn from(f: PiecewiseSmoothFn) -> Self {
        f.pieces
    }
}

impl PiecewiseSmoothFn {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
            return Err(Error::Malformed(
                "piecewise function needs at least one piece".into(),
            ));
        };
        if first.interval[0] != 0.0 || last.interval[1] != 1.0 {
            return Err(Error::Malformed("pieces must cover [0, 1]".into()));
        }
        for p in &pieces {
            if !(p.interval[0] < p.interval[1]) {
                return Err(Error::Malformed(format!("empty interval {:?}", p.interval)));
            }
            for e in [p.left_singularity, p.right_singularity]
                .into_iter()
                .flatten()
            {
                if !(e > -1.0) {
                    return Err(Error::Malformed(format!(
                        "non-integrable singularity exponent {e}"
                    )));
                }
            }
        }
        if pieces
            .windows(2)
            .any(|w| w[0].interval[1] != w[1].interval[0])
        {
            return Err(Error::Malformed("pieces must be contiguous".into()));
        }
        Ok(PiecewiseSmoothFn { pieces })
    }

    pub fn single(func: PieceFn) -> Self {
        PiecewiseSmoothFn {
            pieces: vec![Piece::new(0.0, 1.0, func)],
        }
    }

    pub fn zero() -> Self {
        Self::single(PieceFn::Zero)
    }

    pub fn constant(value: f64) -> Self {
        Self::single(PieceFn::constant(value))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[1..].iter().map(|p| p.interval[0]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.func.is_zero())
    }

    /// Piece containing `x`; at a breakpoint the piece to the right.
    pub fn piece_index(&self, x: f64) -> usize {
        let k = self.pieces.partition_point(|p| p.interval[0] <= x);
        k.saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("x = {x} outside [0, 1]")));
        }
        Ok(self.pieces[self.piece_index(x)].func.value(x))
    }

    /// Jet at `x`, using the piece on the given side of a breakpoint.
    pub fn taylor(&self, x: f64, side: Side) -> Jet {
        let mut k = self.piece_index(x);
        if side == Side::Left && k > 0 && x == self.pieces[k].interval[0] {
            k -= 1;
        }
        self.pieces[k].func.taylor(x)
    }

    /// Apply `op` to every piece; `shift` is added to singularity exponents.
    fn map(&self, shift: f64, op: impl Fn(&PieceFn) -> PieceFn) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                interval: p.interval,
                func: op(&p.func),
                left_singularity: p.left_singularity.map(|e| e + shift),
                right_singularity: p.right_singularity.map(|e| e + shift),
            })
            .collect();
        PiecewiseSmoothFn { pieces }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(0.0, |f| f.clone().scaled(c))
    }

    /// Pointwise product with a smooth function.
    pub fn multiply(&self, a: &PieceFn) -> Self {
        self.map(0.0, |f| PieceFn::product(vec![a.clone(), f.clone()]))
    }

    /// Classical derivative on each open piece.
    pub fn piecewise_derivative(&self) -> Self {
        self.map(-1.0, |f| f.clone().derivative())
    }

    /// Sum on the merged partition.
    pub fn add(&self, other: &PiecewiseSmoothFn) -> Self {
        let mut nodes: Vec<f64> = self.breakpoints();
        nodes.extend(other.breakpoints());
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut bounds = vec![0.0];
        bounds.extend(nodes);
        bounds.push(1.0);
        let pieces = bounds
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let (p, q) = (
                    &self.pieces[self.piece_index(mid)],
                    &other.pieces[other.piece_index(mid)],
                );
                // a flag survives only where the segment shares the flagged end
                let left = |p: &Piece| p.left_singularity.filter(|_| p.interval[0] == w[0]);
                let right = |p: &Piece| p.right_singularity.filter(|_| p.interval[1] == w[1]);
                let worst = |x: Option<f64>, y: Option<f64>| match (x, y) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                Piece {
                    interval: [w[0], w[1]],
                    func: PieceFn::sum(vec![p.func.clone(), q.func.clone()]),
                    left_singularity: worst(left(p), left(q)),
                    right_singularity: worst(right(p), right(q)),
                }
            })
            .collect();
        PiecewiseSmoothFn { pieces }
    }

    /// `f(b+) - f(b-)` at interior breakpoint `k` (between pieces `k`, `k+1`).
    pub fn jump(&self, k: usize) -> Result<f64> {
        let left = self.pieces[k].endpoint_limit(true)?;
        let right = self.pieces[k + 1].endpoint_limit(false)?;
        let tol = if self.pieces[k].func.is_exact() && self.pieces[k + 1].func.is_exact() {
            EXACT_JUMP_TOL
        } else {
            SAMPLED_JUMP_TOL
        };
        let jump = right - left;
        Ok(if jump.abs() > tol * left.abs().max(right.abs()).max(1.0) {
            jump
        } else {
            0.0
        })
    }

    /// `int_0^1 f(x) w(x) dx`, piece by piece.
    pub fn integrate_weighted(&self, w: impl Fn(f64) -> f64, quad: &QuadratureSpec) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            if p.func.is_zero() {
                continue;
            }
            let spec = quad.with_singularity(p.quadrature_flags());
            total += integrate(
                |x| p.func.value(x) * w(x),
                p.interval[0],
                p.interval[1],
                &spec,
            )?;
        }
        Ok(total)
    }

    /// Whether every piece is nonnegative: exact sign information where the
    /// closed form provides it, otherwise a sampled check with a small
    /// relative tolerance.
    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().all(|p| match p.func.sign_hint() {
            SignHint::Zero | SignHint::Nonnegative => true,
            SignHint::Nonpositive => false,
            SignHint::Unknown => {
                let m = 64;
                let values: Vec<f64> = (0..m)
                    .map(|i| {
                        let s =
                            0.5 - 0.5 * (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos();
                        p.func.value(p.interval[0] + s * p.width())
                    })
                    .collect();
                let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
                values.iter().all(|v| v.is_finite() && *v >= -1e-9 * scale)
            }
        })
    }
}

/// Distributional derivative of a piecewise smooth function: the classical
/// derivative on each piece plus one atom per interior jump.
pub fn distributional_derivative(f: &PiecewiseSmoothFn) -> Result<(PiecewiseSmoothFn, Vec<Atom>)> {
    let mut atoms = Vec::new();
    for (k, b) in f.breakpoints().into_iter().enumerate() {
        let jump = f.jump(k)?;
        if jump != 0.0 {
            atoms.push(Atom { x: b, weight: jump });
        }
    }
    Ok((f.piecewise_derivative(), atoms))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub weight: f64,
}

/// `weight * delta^(order)(x - x0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaDerivative {
    pub x: f64,
    pub weight: f64,
    pub order: u32,
}

/// Rotationally symmetric distribution on `S^{n-1}` in the height variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct SphericalDistributionRS {
    pub n: usize,
    pub density: PiecewiseSmoothFn,
    pub atoms: Vec<Atom>,
    #[serde(rename = "deltaDerivatives")]
    pub delta_derivatives: Vec<DeltaDerivative>,
}

#[derive(Deserialize)]
struct RawDistribution {
    n: usize,
    density: PiecewiseSmoothFn,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default, rename = "deltaDerivatives")]
    delta_derivatives: Vec<DeltaDerivative>,
}

impl TryFrom<RawDistribution> for SphericalDistributionRS {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        SphericalDistributionRS::new(raw.n, raw.density, raw.atoms, raw.delta_derivatives)
    }
}

fn check_location(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Malformed(format!("location {x} outside [0, 1]")))
    }
}

impl SphericalDistributionRS {
    /// Validated constructor; coincident terms are merged and zero weights dropped.
    pub fn new(
        n: usize,
        density: PiecewiseSmoothFn,
        atoms: Vec<Atom>,
        delta_derivatives: Vec<DeltaDerivative>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension {
                n,
                reason: "sphere dimension parameter must be at least 2",
            });
        }
        for a in &atoms {
            check_location(a.x)?;
            if !a.weight.is_finite() {
                return Err(Error::Malformed("atom weight must be finite".into()));
            }
        }
        for d in &delta_derivatives {
            check_location(d.x)?;
            if !d.weight.is_finite() || d.order == 0 {
                return Err(Error::Malformed(
                    "delta derivatives need finite weight and order >= 1".into(),
                ));
            }
        }
        Ok(SphericalDistributionRS {
            n,
            density,
            atoms: merge_atoms(atoms),
            delta_derivatives: merge_delta_derivatives(delta_derivatives),
        })
    }

    pub fn from_density(n: usize, density: PiecewiseSmoothFn) -> Result<Self> {
        Self::new(n, density, Vec::new(), Vec::new())
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_density(n, PiecewiseSmoothFn::zero())
    }

    pub fn is_measure(&self) -> bool {
        self.delta_derivatives.is_empty()
            && self.atoms.iter().all(|a| a.weight >= 0.0)
            && self.density.is_nonnegative()
    }

    pub fn scaled(&self, c: f64) -> Self {
        SphericalDistributionRS {
            n: self.n,
            density: self.density.scaled(c),
            atoms: merge_atoms(
                self.atoms
                    .iter()
                    .map(|a| Atom {
                        x: a.x,
                        weight: c * a.weight,
                    })
                    .collect(),
            ),
            delta_derivatives: merge_delta_derivatives(
                self.delta_derivatives
                    .iter()
                    .map(|d| DeltaDerivative {
                        weight: c * d.weight,
                        ..*d
                    })
                    .collect(),
            ),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "cannot add distributions for n = {} and n = {}",
                self.n, other.n
            )));
        }
        let atoms = self.atoms.iter().chain(&other.atoms).copied().collect();
        let dd = self
            .delta_derivatives
            .iter()
            .chain(&other.delta_derivatives)
            .copied()
            .collect();
        Self::new(self.n, self.density.add(&other.density), atoms, dd)
    }

    /// Weight of the atom at `x`, or zero.
    pub fn atom_at(&self, x: f64, tol: f64) -> Option<Atom> {
        self.atoms.iter().copied().find(|a| (a.x - x).abs() <= tol)
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if (last.x - a.x).abs() <= LOCATION_TOL => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out.retain(|a| a.weight != 0.0);
    out
}

fn merge_delta_derivatives(mut terms: Vec<DeltaDerivative>) -> Vec<DeltaDerivative> {
    terms.sort_by(|a, b| a.order.cmp(&b.order).then(a.x.total_cmp(&b.x)));
    let mut out: Vec<DeltaDerivative> = Vec::with_capacity(terms.len());
    for d in terms {
        match out.last_mut() {
            Some(last) if last.order == d.order && (last.x - d.x).abs() <= LOCATION_TOL => {
                last.weight += d.weight
            }
            _ => out.push(d),
        }
    }
    out.retain(|d| d.weight != 0.0);
    out
}

/// Derivative in the sense of distributions: jumps of the density become
/// atoms, atoms become first delta-derivatives, and orders go up by one.
pub fn derivative_of_distribution(d: &SphericalDistributionRS) -> Result<SphericalDistributionRS> {
    let (density, atoms) = distributional_derivative(&d.density)?;
    let mut dd: Vec<DeltaDerivative> = d
        .atoms
        .iter()
        .map(|a| DeltaDerivative {
            x: a.x,
            weight: a.weight,
            order: 1,
        })
        .collect();
    dd.extend(d.delta_derivatives.iter().map(|t| DeltaDerivative {
        order: t.order + 1,
        ..*t
    }));
    SphericalDistributionRS::new(d.n, density, atoms, dd)
}

/// Product with a smooth function `a`, using
/// `a delta^(k) = sum_j (-1)^j C(k, j) a^(j)(x0) delta^(k-j)`.
pub fn multiply_smooth(d: &SphericalDistributionRS, a: &PieceFn) -> SphericalDistributionRS {
    let mut atoms: Vec<Atom> = d
        .atoms
        .iter()
        .map(|t| Atom {
            x: t.x,
            weight: a.value(t.x) * t.weight,
        })
        .collect();
    let mut dd = Vec::new();
    for t in &d.delta_derivatives {
        let jet = a.taylor(t.x);
        let k = t.order;
        for j in 0..=k {
            let binom =
                factorial(k as usize) / (factorial(j as usize) * factorial((k - j) as usize));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * binom * jet.derivative(j as usize) * t.weight;
            if k == j {
                atoms.push(Atom { x: t.x, weight: w });
            } else {
                dd.push(DeltaDerivative {
                    x: t.x,
                    weight: w,
                    order: k - j,
                });
            }
        }
    }
    SphericalDistributionRS {
        n: d.n,
        density: d.density.multiply(a),
        atoms: merge_atoms(atoms),
        delta_derivatives: merge_delta_derivatives(dd),
    }
}

/// `<d, psi> = int density psi + sum w psi(x0) + sum (-1)^k w psi^(k)(x0)`.
///
/// `psi` is evaluated on jets so its derivatives are exact. The density
/// integral is taken in `x` alone, without the surface Jacobian.
pub fn pair_with_test_function(
    d: &SphericalDistributionRS,
    psi: impl Fn(Jet) -> Jet,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut total = d
        .density
        .integrate_weighted(|x| psi(Jet::constant(x)).value(), quad)?;
    for a in &d.atoms {
        total += a.weight * psi(Jet::constant(a.x)).value();
    }
    for t in &d.delta_derivatives {
        let sign = if t.order % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * t.weight * psi(Jet::variable(t.x)).derivative(t.order as usize);
    }
    Ok(total)
}
