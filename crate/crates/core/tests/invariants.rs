use approx::assert_relative_eq;
use fgle::experiments::{inject, restrict};
use fgle::linalg::lu_factor;
use fgle::stepper::{Integrator, OutputPolicy};
use fgle::wsgd::{apply_fractional_laplacian, assemble_operator, h_function};
use fgle::{
    Complex64, ComplexField, GridSpec, ModelParams, SolverSettings, SquareMatrix, TimeGrid,
    WsgdWeights,
};
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![1.0001..2.0f64, Just(2.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_and_direct_sum_agree(a in alpha(), u in complex_vec(23), h in 0.01..1.0f64) {
        let w = WsgdWeights::for_grid(a, 24).unwrap();
        let op = assemble_operator(&w, 24).unwrap();
        let by_matrix = op.apply(&u, h);
        let direct = apply_fractional_laplacian(&u, &w, h).unwrap();
        let scale = by_matrix.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (x, y) in by_matrix.iter().zip(&direct) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn quadratic_form_is_real_positive_and_splits(a in alpha(), u in complex_vec(31), h in 0.01..1.0f64) {
        let op = assemble_operator(&WsgdWeights::for_grid(a, 32).unwrap(), 32).unwrap();
        let q = op.quadratic_form(&u, h);
        let l = op.lambda_norm_sq(&u, h);
        prop_assert!(q.re > 0.0);
        prop_assert!(q.im.abs() <= 1e-12 * q.re);
        assert_relative_eq!(q.re, l, max_relative = 1e-11);
    }

    #[test]
    fn angular_factor_is_nondecreasing(a in alpha(), w0 in 0.0..std::f64::consts::PI, dw in 0.0..0.5f64) {
        let w1 = (w0 + dw).min(std::f64::consts::PI);
        prop_assert!(h_function(a, w1).unwrap() >= h_function(a, w0).unwrap() - 1e-12);
    }

    #[test]
    fn lu_solves_shifted_operator(a in alpha(), b in complex_vec(15), tau in 0.001..1.0f64) {
        let op = assemble_operator(&WsgdWeights::for_grid(a, 16).unwrap(), 16).unwrap();
        let c = op.matrix();
        let shift = Complex64::new(0.3, 0.7) * tau;
        let a_mat = SquareMatrix::from_fn(15, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            Complex64::new(d, 0.0) + shift * c[(i, j)]
        });
        let x = lu_factor(a_mat.clone()).unwrap().solve_slice(&b).unwrap();
        for (ax, bi) in a_mat.mul_vec(&x).iter().zip(&b) {
            prop_assert!((ax - bi).norm() < 1e-12);
        }
    }

    #[test]
    fn inject_then_restrict_is_identity(u in complex_vec(9), ratio in 1usize..6) {
        let coarse = ComplexField::new(u, 0.5);
        let back = restrict(&inject(&coarse, ratio), ratio).unwrap();
        prop_assert_eq!(back.values(), coarse.values());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn energy_identity_holds_for_random_coefficients(
        a in alpha(),
        upsilon in 0.0..2.0f64,
        eta in -2.0..2.0f64,
        kappa in 0.0..2.0f64,
        zeta in -2.0..2.0f64,
        gamma in -2.0..1.0f64,
    ) {
        let params = ModelParams { upsilon, eta, kappa, zeta, gamma, alpha: a };
        let grid = GridSpec::with_spacing(-6.0, 6.0, 0.1).unwrap();
        let time = TimeGrid::new(0.2, 10).unwrap();
        let it = Integrator::new(params, grid, time.tau(), SolverSettings::default()).unwrap();
        let traj = fgle::stepper::run_with(
            &it,
            &time,
            grid.sample(|x| Complex64::new((-2.0 * x * x).exp(), 0.5 * x * (-x * x).exp())),
            &OutputPolicy::default(),
        )
        .unwrap();
        for d in &traj.diagnostics {
            prop_assert!(d.energy_identity_residual < 1e-10, "{d:?}");
        }
        if kappa >= 0.0 && gamma <= 0.0 {
            for p in traj.norms_sq.windows(2) {
                prop_assert!(p[1] <= p[0] * (1.0 + 1e-12));
            }
        }
    }
}
