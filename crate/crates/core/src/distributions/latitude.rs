use serde::{Deserialize, Serialize};

use super::{PiecewiseSmoothFn, SphericalDistributionRS};
use crate::error::{Error, Result};
use crate::numerics::{integrate, EndpointSingularity, QuadratureSpec};
use crate::transforms::sphere_area;

/// Surface measure of the latitude set `{v in S^{n-1} : v_n = x}` per unit
/// height, `omega_{n-1} (1 - x^2)^{(n-3)/2}`. `J_4 = 4 pi sqrt(1 - x^2)`,
/// `J_3 = 2 pi`.
pub fn jacobian(n: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0);
    let base = sphere_area(n - 1);
    match n {
        3 => base,
        4 => base * s.sqrt(),
        _ => base * s.powf((n as f64 - 3.0) / 2.0),
    }
}

/// Point mass on a whole latitude set (both hemispheres).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatitudeAtom {
    pub x: f64,
    pub mass: f64,
}

/// Positive rotationally symmetric measure on `S^{n-1}`. The density is per
/// unit surface area; atoms carry their spherical mass directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatitudeMeasure {
    pub n: usize,
    pub density: PiecewiseSmoothFn,
    pub atoms: Vec<LatitudeAtom>,
}

impl LatitudeMeasure {
    /// Convert from the height calculus: an atom `w delta(x - x0)` at
    /// `0 < x0` sits on two latitude sets and has mass `2 w J_n(x0)`; on the
    /// equator there is only one.
    pub fn from_distribution(d: &SphericalDistributionRS) -> Result<Self> {
        if !d.is_measure() {
            return Err(Error::NotAMeasure);
        }
        let atoms = d
            .atoms
            .iter()
            .map(|a| LatitudeAtom {
                x: a.x,
                mass: hemisphere_factor(a.x) * a.weight * jacobian(d.n, a.x),
            })
            .collect();
        Ok(LatitudeMeasure {
            n: d.n,
            density: d.density.clone(),
            atoms,
        })
    }

    /// Purely atomic measure, e.g. the output of a discretized recovery.
    pub fn from_atoms(n: usize, atoms: Vec<LatitudeAtom>) -> Result<Self> {
        Self::new(n, PiecewiseSmoothFn::zero(), atoms)
    }

    pub fn new(n: usize, density: PiecewiseSmoothFn, atoms: Vec<LatitudeAtom>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "latitude measures need n >= 3",
            });
        }
        if atoms
            .iter()
            .any(|a| !(0.0..=1.0).contains(&a.x) || !(a.mass >= 0.0) || !a.mass.is_finite())
        {
            return Err(Error::NotAMeasure);
        }
        if !density.is_nonnegative() {
            return Err(Error::NotAMeasure);
        }
        Ok(LatitudeMeasure { n, density, atoms })
    }

    /// `int_{S^{n-1}} psi(|v_n|) d mu(v)`.
    pub fn integrate(&self, psi: impl Fn(f64) -> f64, quad: &QuadratureSpec) -> Result<f64> {
        let n = self.n;
        let smooth = self
            .density
            .integrate_weighted(|x| psi(x) * 2.0 * jacobian(n, x), quad)?;
        Ok(smooth + self.atoms.iter().map(|a| a.mass * psi(a.x)).sum::<f64>())
    }

    pub fn total_mass(&self, quad: &QuadratureSpec) -> Result<f64> {
        self.integrate(|_| 1.0, quad)
    }

    /// Mass carried by heights in `[lo, hi]` (atoms and density).
    pub fn mass_between(&self, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
        let n = self.n;
        let mut total: f64 = self
            .atoms
            .iter()
            .filter(|a| a.x >= lo && a.x <= hi)
            .map(|a| a.mass)
            .sum();
        for p in self.density.pieces() {
            let (a, b) = (p.interval[0].max(lo), p.interval[1].min(hi));
            if a >= b || p.func.is_zero() {
                continue;
            }
            let sing = EndpointSingularity::from_flags(
                p.left_singularity.is_some() && a == p.interval[0],
                p.right_singularity.is_some() && b == p.interval[1],
            );
            total += integrate(
                |x| p.func.value(x) * 2.0 * jacobian(n, x),
                a,
                b,
                &quad.with_singularity(sing),
            )?;
        }
        Ok(total)
    }
}

fn hemisphere_factor(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Atom;
    use std::f64::consts::PI;

    #[test]
    fn jacobians() {
        assert!((jacobian(4, 0.0) - 4.0 * PI).abs() < 1e-14);
        assert_eq!(jacobian(4, 1.0), 0.0);
        assert!((jacobian(3, 0.3) - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn sphere_areas_from_latitude_integration() {
        let quad = QuadratureSpec::default();
        for (n, area) in [(3, 4.0 * PI), (4, 2.0 * PI * PI)] {
            let m = LatitudeMeasure::new(n, PiecewiseSmoothFn::constant(1.0), vec![]).unwrap();
            assert!((m.total_mass(&quad).unwrap() - area).abs() < 1e-10);
        }
    }

    #[test]
    fn atom_mass_convention() {
        let d = SphericalDistributionRS::new(
            4,
            PiecewiseSmoothFn::zero(),
            vec![
                Atom {
                    x: 0.5,
                    weight: 1.0,
                },
                Atom {
                    x: 0.0,
                    weight: 1.0,
                },
            ],
            vec![],
        )
        .unwrap();
        let m = LatitudeMeasure::from_distribution(&d).unwrap();
        assert!((m.atoms[0].mass - 4.0 * PI).abs() < 1e-14);
        assert!((m.atoms[1].mass - 2.0 * 4.0 * PI * 0.75f64.sqrt()).abs() < 1e-14);
        assert!(LatitudeMeasure::from_distribution(&d.scaled(-1.0)).is_err());
    }

    #[test]
    fn mass_between_counts_window_only() {
        let quad = QuadratureSpec::default();
        let m = LatitudeMeasure::new(
            3,
            PiecewiseSmoothFn::constant(1.0),
            vec![LatitudeAtom { x: 0.5, mass: 2.0 }],
        )
        .unwrap();
        let w = m.mass_between(0.25, 0.75, &quad).unwrap();
        assert!((w - (2.0 + 2.0 * 2.0 * PI * 0.5)).abs() < 1e-12);
    }
}
