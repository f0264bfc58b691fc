use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use zonopolar::barrel::{
    atom_weight, breakpoint_x, g_on_branch, is_polar_zonoid, jump_constant_c, GBranch,
};
use zonopolar::certify::{equal_modulus_directions, facet_gauge_check};
use zonopolar::distributions::{
    derivative_of_distribution, pair_with_test_function, Atom, Piece, PieceFn, PiecewiseSmoothFn,
    SphericalDistributionRS,
};
use zonopolar::jet::Jet;
use zonopolar::numerics::{integrate, nnls_solve, NnlsProblem, QuadratureSpec};
use zonopolar::profiles::{
    gauge, AngleProfile, BarrelParams, Interpolation, Param, SampledProfile,
};
use zonopolar::transforms::{cosine_kernel, radon_forward_piecewise, radon_invert_n4};

fn radius() -> impl Strategy<Value = f64> {
    0.05f64..3.0
}

fn angle() -> impl Strategy<Value = f64> {
    0.0f64..=FRAC_PI_2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_times_support_at_least_one(r in radius(), phi in angle()) {
        let f = AngleProfile::barrel_norm(r).unwrap().eval(phi).unwrap();
        let h = AngleProfile::barrel_support(r).unwrap().eval(phi).unwrap();
        let rho = AngleProfile::polar_radial(r).unwrap().eval(phi).unwrap();
        prop_assert!(f * h >= 1.0 - 1e-12);
        prop_assert!((rho * h - 1.0).abs() < 1e-14);
        prop_assert!(f <= 1.0 + 1e-15 && f > 0.0);
    }

    #[test]
    fn gauge_is_one_on_the_boundary(r in radius(), phi in angle(), n in 3usize..=4) {
        let f = AngleProfile::barrel_norm(r).unwrap().eval(phi).unwrap();
        let mut p = vec![0.0; n];
        p[0] = phi.sin() / f;
        p[n - 1] = phi.cos() / f;
        let g = gauge(&BarrelParams::new(n, r).unwrap(), &p).unwrap();
        prop_assert!((g - 1.0).abs() < 1e-12, "{}", g);
    }

    #[test]
    fn gauge_is_a_norm(
        r in radius(),
        a in prop::array::uniform3(-2.0f64..2.0),
        b in prop::array::uniform3(-2.0f64..2.0),
        s in 0.1f64..5.0,
    ) {
        let p = BarrelParams::new(3, r).unwrap();
        let ga = gauge(&p, &a).unwrap();
        let gb = gauge(&p, &b).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert!(gauge(&p, &sum).unwrap() <= ga + gb + 1e-12);
        let scaled: Vec<f64> = a.iter().map(|x| -s * x).collect();
        prop_assert!((gauge(&p, &scaled).unwrap() - s * ga).abs() <= 1e-12 * (1.0 + s * ga));
    }

    #[test]
    fn g_is_continuous_with_jump_c(r in radius()) {
        let xr = breakpoint_x(r).unwrap();
        let inner = g_on_branch(GBranch::Inner, 0, r, xr).unwrap();
        let outer = g_on_branch(GBranch::Outer, 0, r, xr).unwrap();
        prop_assert!((inner - outer).abs() < 1e-12);
        let d1 = g_on_branch(GBranch::Outer, 1, r, xr).unwrap() - g_on_branch(GBranch::Inner, 1, r, xr).unwrap();
        let c = jump_constant_c(r);
        prop_assert!((d1 - c).abs() <= 1e-10 * c.max(1.0));
        prop_assert!(((1.0 - xr * xr) * c / (8.0 * PI) - atom_weight(r)).abs() <= 1e-14 * c.max(1.0));
    }

    #[test]
    fn zonoid_iff_r_at_most_one(r in radius()) {
        prop_assert_eq!(is_polar_zonoid(r).unwrap(), r <= 1.0);
    }

    #[test]
    fn kernel_is_symmetric_and_bounded(t in -1.0f64..=1.0, x in -1.0f64..=1.0, n in 3usize..=4) {
        let k = cosine_kernel(t, x, n).unwrap();
        prop_assert!((k - cosine_kernel(x, t, n).unwrap()).abs() < 1e-14);
        prop_assert!(k >= (t * x).abs() - 1e-15);
        prop_assert!(k <= 1.0 + 1e-15);
    }

    #[test]
    fn jet_chain_rule(x in 0.05f64..0.95) {
        // d/dx asin(x)^2 = 2 asin(x) / sqrt(1 - x^2)
        let j = Jet::variable(x).asin();
        let sq = j * j;
        let want = 2.0 * x.asin() / (1.0 - x * x).sqrt();
        prop_assert!((sq.derivative(1) - want).abs() < 1e-12 * want.max(1.0));
        let outer = Jet::variable(x.asin()).sin();
        prop_assert!((outer.compose(j).value() - x).abs() < 1e-15);
        prop_assert!((outer.compose(j).derivative(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_is_exact_on_polynomials(c in prop::collection::vec(-3.0f64..3.0, 1..8), a in -2.0f64..0.0, b in 0.0f64..2.0) {
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let exact: f64 = c.iter().enumerate().map(|(k, ck)| ck * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k + 1) as f64).sum();
        let got = integrate(p, a, b, &QuadratureSpec::default()).unwrap();
        prop_assert!((got - exact).abs() < 1e-10 * (1.0 + exact.abs()));
    }

    #[test]
    fn nnls_satisfies_kkt(seed in 0u64..10_000, m in 4usize..12, k in 2usize..8) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, k, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let sol = nnls_solve(&NnlsProblem::new(a.clone(), b.clone()).unwrap()).unwrap();
        let x = DVector::from_column_slice(&sol.coefficients);
        prop_assert!(x.iter().all(|v| *v >= 0.0));
        let grad = a.transpose() * (&a * &x - &b);
        for j in 0..k {
            if x[j] > 0.0 {
                prop_assert!(grad[j].abs() < 1e-8, "{}", grad[j]);
            } else {
                prop_assert!(grad[j] > -1e-8, "{}", grad[j]);
            }
        }
        prop_assert!(((&a * &x - &b).norm() - sol.residual_norm).abs() < 1e-10);
    }

    #[test]
    fn derivative_moves_to_the_test_function(
        cut in 0.1f64..0.9,
        lo in -2.0f64..2.0,
        hi in -2.0f64..2.0,
        w in 0.0f64..1.0,
        x0 in 0.05f64..0.95,
    ) {
        let dens = PiecewiseSmoothFn::new(vec![
            Piece::new(0.0, cut, PieceFn::constant(lo)),
            Piece::new(cut, 1.0, PieceFn::polynomial(&[hi, 1.0])),
        ]).unwrap();
        let d = SphericalDistributionRS::new(4, dens, vec![Atom { x: x0, weight: w }], vec![]).unwrap();
        let dd = derivative_of_distribution(&d).unwrap();
        let quad = QuadratureSpec::default();
        // test functions vanishing at both ends of [0, 1]
        let psi = |x: Jet| x * (Jet::constant(1.0) - x) * (x * 3.0).cos();
        let dpsi = |x: Jet| psi(Jet::variable(x.value())).differentiate().compose(x);
        let lhs = pair_with_test_function(&dd, psi, &quad).unwrap();
        let rhs = -pair_with_test_function(&d, dpsi, &quad).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn radon_round_trip_on_trig(a in 0.0f64..2.0, b in 0.0f64..1.0, c in 0.0f64..1.0, x in 0.01f64..1.0) {
        let f = AngleProfile::Trig { a, b, c };
        let g = radon_invert_n4(&f).unwrap();
        let back = radon_forward_piecewise(&g, 4, x, &QuadratureSpec::default()).unwrap();
        prop_assert!((back - f.value_at(Param::Sin, x)).abs() < 1e-8);
    }

    #[test]
    fn sampled_profile_interpolates_its_samples(count in 3usize..40, r in radius()) {
        let f = AngleProfile::barrel_norm(r).unwrap();
        let s = SampledProfile::from_fn(|p| f.eval(p).unwrap(), count, Interpolation::MonotoneCubic).unwrap();
        for (phi, v) in s.grid().iter().zip(s.values()) {
            prop_assert!((s.eval(*phi).unwrap() - v).abs() < 1e-14);
        }
        let json = serde_json::to_string(&AngleProfile::Sampled(s.clone())).unwrap();
        let back: AngleProfile = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, AngleProfile::Sampled(s));
    }

    #[test]
    fn facets_lie_on_the_boundary(r in radius(), n in 3usize..=4, seed in 0u64..1000) {
        prop_assert!(facet_gauge_check(&BarrelParams::new(n, r).unwrap(), 20, seed).unwrap());
    }

    #[test]
    fn equal_modulus_count_is_bounded(entries in prop::collection::vec(-1.0f64..1.0, 9)) {
        let basis: Vec<Vec<f64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        if let Ok(dirs) = equal_modulus_directions(&basis) {
            prop_assert!(dirs.len() <= 8);
            prop_assert!(dirs.len() % 2 == 0);
            for u in &dirs {
                prop_assert!((u.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
