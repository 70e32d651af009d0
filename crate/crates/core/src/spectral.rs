//! Semi-discrete Fourier transform of grid functions and the fractional
//! Sobolev (semi-)norms defined through it:
//!
//! ```text
//! û(k)        = (2π)^{−1/2} h Σ_j u_j e^{−ikx_j},          |k| ≤ π/h
//! |u|²_{H^σ_h} = ∫_{−π/h}^{π/h} |k|^{2σ} |û(k)|² dk
//! ‖u‖²_{H^σ_h} = ‖u‖²_h + |u|²_{H^σ_h}
//! ```
//!
//! Interior node `j` (1-based) sits at `x_j = j·h`. Shifting the origin only
//! multiplies `û` by a unimodular factor, so none of the norms depend on it.
//!
//! The integrals are evaluated with composite 16-point Gauss–Legendre panels
//! on `[0, π/h]`, folding `k` and `−k` together, with the panel at `k = 0`
//! refined geometrically to absorb the `|k|^{2σ}` kink.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexField;
use crate::quadrature::{GradedRule, POINTS_PER_PANEL};
use crate::wsgd::{apply_fractional_laplacian, c_alpha, WsgdWeights};

/// Relative tolerance of the spectral-equivalence margins.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNormSpec {
    sigma: f64,
    quadrature_points: usize,
    h: f64,
}

impl SobolevNormSpec {
    /// `quadrature_points` must be at least `8·nodes`.
    pub fn new(sigma: f64, quadrature_points: usize, h: f64, nodes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::invalid(
                "sigma",
                format!("{sigma} is outside [0, 1]"),
            ));
        }
        if quadrature_points < 8 * nodes.max(1) {
            return Err(Error::invalid(
                "quadrature_points",
                format!("{quadrature_points} < 8 x {nodes} nodes"),
            ));
        }
        if !(h > 0.0) {
            return Err(Error::invalid("h", format!("{h} must be positive")));
        }
        Ok(Self {
            sigma,
            quadrature_points,
            h,
        })
    }

    /// Default resolution: `16·(M − 1)` points for a field of `M − 1` values.
    pub fn for_field(sigma: f64, u: &ComplexField) -> Result<Self> {
        Self::new(sigma, 16 * u.len().max(1), u.h(), u.len())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn quadrature_points(&self) -> usize {
        self.quadrature_points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_points(self, quadrature_points: usize) -> Self {
        Self {
            quadrature_points,
            ..self
        }
    }

    fn rule(&self) -> GradedRule {
        let panels = (self.quadrature_points / POINTS_PER_PANEL).max(1);
        GradedRule::new(PI / self.h, panels)
    }
}

// û(k) with x_j = j·h, j = 1..=len; no range check.
fn transform(values: &[Complex64], h: f64, k: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -k * h);
    let mut phase = step;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &u) in values.iter().enumerate() {
        // Re-anchor the recurrence periodically to bound phase drift.
        if j % 64 == 63 {
            phase = Complex64::from_polar(1.0, -k * h * (j + 1) as f64);
        }
        acc += u * phase;
        phase *= step;
    }
    acc * (h / (2.0 * PI).sqrt())
}

/// `û(k)` for `|k| ≤ π/h`.
pub fn semidiscrete_fourier(u: &ComplexField, k: f64) -> Result<Complex64> {
    let limit = PI / u.h();
    if !(k.abs() <= limit * (1.0 + 1e-12)) {
        return Err(Error::invalid("k", format!("|{k}| exceeds pi/h = {limit}")));
    }
    Ok(transform(u.values(), u.h(), k))
}

fn spec_matches(u: &ComplexField, spec: &SobolevNormSpec) -> Result<()> {
    if u.h() != spec.h {
        return Err(Error::SpacingMismatch(u.h(), spec.h));
    }
    Ok(())
}

/// `|u|²_{H^σ_h}`.
pub fn sobolev_seminorm_sq(u: &ComplexField, spec: &SobolevNormSpec) -> Result<f64> {
    spec_matches(u, spec)?;
    let (values, h) = (u.values(), u.h());
    let two_sigma = 2.0 * spec.sigma;
    let real = u.is_real();
    let rule = spec.rule();
    Ok(rule.integrate(|k| {
        let plus = transform(values, h, k).norm_sqr();
        let minus = if real {
            plus
        } else {
            transform(values, h, -k).norm_sqr()
        };
        k.powf(two_sigma) * (plus + minus)
    }))
}

/// `‖u‖²_{H^σ_h} = ‖u‖²_h + |u|²_{H^σ_h}`.
pub fn sobolev_norm_sq(u: &ComplexField, spec: &SobolevNormSpec) -> Result<f64> {
    Ok(u.norm_sq() + sobolev_seminorm_sq(u, spec)?)
}

/// `∫_{−π/h}^{π/h} û(k)·conj(v̂(k)) dk`, which equals `(u, v)_h`.
pub fn spectral_inner(
    u: &ComplexField,
    v: &ComplexField,
    quadrature_points: usize,
) -> Result<Complex64> {
    u.check_compatible(v)?;
    let h = u.h();
    let panels = (quadrature_points / POINTS_PER_PANEL).max(1);
    let rule = GradedRule::new(PI / h, panels);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&k, &w) in rule.nodes.iter().zip(&rule.weights) {
        for kk in [k, -k] {
            acc += w * transform(u.values(), h, kk) * transform(v.values(), h, kk).conj();
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEquivalenceReport {
    pub alpha: f64,
    /// `(Δ_h^α u, u)_h`.
    pub quadratic_form: Complex64,
    /// `|u|²_{H^{α/2}_h}`.
    pub seminorm_sq: f64,
    pub c_alpha: f64,
    /// `(Δ_h^α u, u)_h − C_α|u|²`.
    pub lower_margin: f64,
    /// `|u|² − (Δ_h^α u, u)_h`.
    pub upper_margin: f64,
    pub tolerance: f64,
}

impl EnergyEquivalenceReport {
    pub fn holds(&self) -> bool {
        self.lower_margin >= -self.tolerance && self.upper_margin >= -self.tolerance
    }
}

/// Evaluates both sides of `C_α|u|²_{H^{α/2}_h} ≤ (Δ_h^α u, u)_h ≤ |u|²_{H^{α/2}_h}`.
pub fn verify_energy_equivalence(
    u: &ComplexField,
    weights: &WsgdWeights,
) -> Result<EnergyEquivalenceReport> {
    let alpha = weights.alpha();
    let h = u.h();
    let lap = ComplexField::new(apply_fractional_laplacian(u.values(), weights, h)?, h);
    let quadratic_form = lap.inner(u)?;
    let seminorm_sq = sobolev_seminorm_sq(u, &SobolevNormSpec::for_field(alpha / 2.0, u)?)?;
    let ca = c_alpha(alpha)?;
    Ok(EnergyEquivalenceReport {
        alpha,
        quadratic_form,
        seminorm_sq,
        c_alpha: ca,
        lower_margin: quadratic_form.re - ca * seminorm_sq,
        upper_margin: seminorm_sq - quadratic_form.re,
        tolerance: EQUIVALENCE_TOL * seminorm_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport {
    /// `‖u‖_{H^{σ₀}_h}`.
    pub lhs: f64,
    /// `√2·‖u‖_{H^σ_h}^{σ₀/σ}·‖u‖_h^{1−σ₀/σ}`.
    pub rhs: f64,
}

impl InterpolationReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

fn interpolation_exponent(sigma0: f64, sigma: f64) -> Result<f64> {
    if !(0.0 <= sigma0 && sigma0 <= sigma && sigma <= 1.0) {
        return Err(Error::invalid(
            "sigma",
            format!("need 0 <= sigma0 <= sigma <= 1, got ({sigma0}, {sigma})"),
        ));
    }
    Ok(if sigma == 0.0 { 1.0 } else { sigma0 / sigma })
}

/// Interpolation inequality between Sobolev norms, checked with the
/// largest admissible constant `√2`.
pub fn verify_interpolation(
    u: &ComplexField,
    sigma0: f64,
    sigma: f64,
) -> Result<InterpolationReport> {
    let theta = interpolation_exponent(sigma0, sigma)?;
    let lhs = sobolev_norm_sq(u, &SobolevNormSpec::for_field(sigma0, u)?)?.sqrt();
    let top = sobolev_norm_sq(u, &SobolevNormSpec::for_field(sigma, u)?)?.sqrt();
    let rhs = 2f64.sqrt() * top.powf(theta) * u.l2_norm().powf(1.0 - theta);
    Ok(InterpolationReport { lhs, rhs })
}

/// Empirical constant of the discrete Gagliardo–Nirenberg inequality:
/// `‖u‖_{l^p_h} / (‖u‖_{H^σ_h}^{σ₀/σ}·‖u‖_h^{1−σ₀/σ})`. Diagnostic only.
pub fn gagliardo_nirenberg_ratio(u: &ComplexField, p: f64, sigma0: f64, sigma: f64) -> Result<f64> {
    let theta = interpolation_exponent(sigma0, sigma)?;
    let top = sobolev_norm_sq(u, &SobolevNormSpec::for_field(sigma, u)?)?.sqrt();
    let lp = if p.is_infinite() {
        u.linf_norm()
    } else {
        u.lp_norm(p)
    };
    Ok(lp / (top.powf(theta) * u.l2_norm().powf(1.0 - theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng, n: usize, h: f64) -> ComplexField {
        ComplexField::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            h,
        )
    }

    #[test]
    fn transform_of_zero() {
        let u = ComplexField::zeros(10, 0.1);
        for k in [-31.0, 0.0, 5.5, 31.4] {
            assert_eq!(
                semidiscrete_fourier(&u, k).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn transform_of_impulse_has_flat_modulus() {
        let u = ComplexField::impulse(9, 4, 1.0);
        for i in 0..=20 {
            let k = -PI + 2.0 * PI * i as f64 / 20.0;
            let m = semidiscrete_fourier(&u, k).unwrap().norm();
            assert!((m - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_rejects_out_of_band() {
        let u = ComplexField::zeros(4, 0.5);
        assert!(semidiscrete_fourier(&u, 2.0 * PI / 0.5).is_err());
    }

    #[test]
    fn transform_against_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = random_field(&mut rng, 300, 0.07);
        let k = 17.3;
        let direct: Complex64 = u
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| v * Complex64::from_polar(1.0, -k * 0.07 * (j + 1) as f64))
            .sum::<Complex64>()
            * (0.07 / (2.0 * PI).sqrt());
        assert!((semidiscrete_fourier(&u, k).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in [7, 31, 63] {
            let h = 0.2;
            let u = random_field(&mut rng, n, h);
            let v = random_field(&mut rng, n, h);
            let lhs = u.inner(&v).unwrap();
            let rhs = spectral_inner(&u, &v, 16 * n).unwrap();
            assert!((lhs - rhs).norm() < 1e-8 * lhs.norm(), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn sigma_zero_gives_l2() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u = random_field(&mut rng, 63, 0.3);
        let s = sobolev_seminorm_sq(&u, &SobolevNormSpec::for_field(0.0, &u).unwrap()).unwrap();
        assert!((s - u.norm_sq()).abs() < 1e-8 * u.norm_sq());
    }

    #[test]
    fn seminorm_of_zero() {
        let u = ComplexField::zeros(20, 0.1);
        let s = sobolev_seminorm_sq(&u, &SobolevNormSpec::for_field(0.7, &u).unwrap()).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn h1_seminorm_of_impulse() {
        // |û|² = h²/2π, so ∫ k² h²/2π dk = (h²/2π)(2/3)(π/h)³ = π²/(3h).
        let h = 0.25;
        let u = ComplexField::impulse(15, 6, h);
        let s = sobolev_seminorm_sq(&u, &SobolevNormSpec::for_field(1.0, &u).unwrap()).unwrap();
        let exact = PI * PI / (3.0 * h);
        assert!((s - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for sigma in [0.0, 0.3, 0.6, 0.75, 0.9, 1.0] {
            let u = random_field(&mut rng, 63, 0.1);
            let spec = SobolevNormSpec::for_field(sigma, &u).unwrap();
            let a = sobolev_seminorm_sq(&u, &spec).unwrap();
            let b =
                sobolev_seminorm_sq(&u, &spec.with_points(2 * spec.quadrature_points())).unwrap();
            assert!((a - b).abs() < 1e-8 * b, "sigma {sigma}: {a} vs {b}");
        }
    }

    #[test]
    fn real_fast_path_agrees_with_complex_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let re: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = ComplexField::from_real(&re, 0.15);
        let mut v = u.clone();
        // Tiny imaginary part disables the real shortcut without moving the norm.
        v.values_mut()[0].im = 1e-300;
        let spec = SobolevNormSpec::for_field(0.8, &u).unwrap();
        let a = sobolev_seminorm_sq(&u, &spec).unwrap();
        let b = sobolev_seminorm_sq(&v, &spec).unwrap();
        assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn spec_validation() {
        assert!(SobolevNormSpec::new(1.1, 1000, 0.1, 10).is_err());
        assert!(SobolevNormSpec::new(-0.1, 1000, 0.1, 10).is_err());
        assert!(SobolevNormSpec::new(0.5, 79, 0.1, 10).is_err());
        assert!(SobolevNormSpec::new(0.5, 80, 0.1, 10).is_ok());
    }

    #[test]
    fn energy_equivalence_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for alpha in [1.2, 1.5, 1.8, 2.0] {
            let m = 64;
            let h = 20.0 / m as f64;
            let w = WsgdWeights::for_grid(alpha, m).unwrap();
            for _ in 0..25 {
                let u = random_field(&mut rng, m - 1, h);
                let r = verify_energy_equivalence(&u, &w).unwrap();
                assert!(r.holds(), "{r:?}");
                assert!(r.quadratic_form.re > 0.0);
                assert!(r.quadratic_form.im.abs() < 1e-12 * r.quadratic_form.re);
            }
        }
    }

    #[test]
    fn energy_equivalence_impulse() {
        for alpha in [1.2, 1.5, 1.8, 2.0] {
            let w = WsgdWeights::for_grid(alpha, 64).unwrap();
            let u = ComplexField::impulse(63, 30, 0.3);
            assert!(verify_energy_equivalence(&u, &w).unwrap().holds());
        }
    }

    #[test]
    fn interpolation_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let u = random_field(&mut rng, 63, 0.3);
        for (s0, s) in [(0.4, 0.4), (0.0, 0.7), (0.5, 0.9), (0.0, 0.0), (1.0, 1.0)] {
            let r = verify_interpolation(&u, s0, s).unwrap();
            assert!(r.holds(), "({s0}, {s}): {r:?}");
        }
        assert!(verify_interpolation(&u, 0.8, 0.5).is_err());
    }

    #[test]
    fn gagliardo_nirenberg_ratio_is_finite_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let u = random_field(&mut rng, 63, 0.3);
        for p in [2.0, 3.0, 4.0, f64::INFINITY] {
            let r = gagliardo_nirenberg_ratio(&u, p, 0.5, 0.9).unwrap();
            assert!(r.is_finite() && r > 0.0);
        }
    }
}
