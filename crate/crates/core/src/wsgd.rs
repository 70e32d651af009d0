//! Weighted and shifted Grünwald difference (WSGD) discretization of the
//! fractional Laplacian `(−Δ)^{α/2}` with extended homogeneous Dirichlet
//! data.
//!
//! The left and right shifted Grünwald formulas with shifts 1, 0, −1 are
//! combined with weights `λ₁, λ₀, λ₋₁` so that the first-order error terms
//! cancel. On a grid of `M` cells the resulting operator acts on the
//! interior values as `h^{−α}·C`, where
//!
//! ```text
//! C = (W + Wᵀ) / (2 cos(απ/2))
//! ```
//!
//! and `W` is the lower Hessenberg Toeplitz matrix with first column
//! `(w₁, w₂, …, w_{M−1})` and first row `(w₁, w₀, 0, …, 0)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, inner_product, norm_sq, CholeskyFactor, SquareMatrix};

/// Truncation length used by the coefficient property checks.
pub const PROPERTY_TRUNCATION: usize = 2048;

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Grünwald coefficients `g_0, …, g_L` of `(1 − z)^α` by the two-term
/// recursion `g_l = (1 − (α+1)/l)·g_{l−1}`.
pub fn grunwald_coeffs(alpha: f64, len: usize) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    if len < 2 {
        return Err(Error::invalid("L", format!("need L >= 2, got {len}")));
    }
    Ok(grunwald_recursion(alpha, len))
}

// No range check: also used for the order α−1 partial-sum identity in tests.
pub(crate) fn grunwald_recursion(alpha: f64, len: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(len + 1);
    g.push(1.0);
    for l in 1..=len {
        let prev = g[l - 1];
        g.push((1.0 - (alpha + 1.0) / l as f64) * prev);
    }
    g
}

/// `(λ₁, λ₀, λ₋₁)`.
pub fn wsgd_lambdas(alpha: f64) -> (f64, f64, f64) {
    let a2 = alpha * alpha;
    (
        (a2 + 3.0 * alpha + 2.0) / 12.0,
        (4.0 - a2) / 6.0,
        (a2 - 3.0 * alpha + 2.0) / 12.0,
    )
}

/// Grünwald coefficients and the WSGD weights built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct WsgdWeights {
    alpha: f64,
    lambda1: f64,
    lambda0: f64,
    lambda_m1: f64,
    g: Vec<f64>,
    w: Vec<f64>,
}

impl WsgdWeights {
    /// Weights `w_0, …, w_L`.
    pub fn new(alpha: f64, len: usize) -> Result<Self> {
        let g = grunwald_coeffs(alpha, len)?;
        let (lambda1, lambda0, lambda_m1) = wsgd_lambdas(alpha);
        let w = (0..=len)
            .map(|l| {
                let mut v = lambda1 * g[l];
                if l >= 1 {
                    v += lambda0 * g[l - 1];
                }
                if l >= 2 {
                    v += lambda_m1 * g[l - 2];
                }
                v
            })
            .collect();
        Ok(Self {
            alpha,
            lambda1,
            lambda0,
            lambda_m1,
            g,
            w,
        })
    }

    /// Exactly the weights an `M`-cell grid touches: `w_0, …, w_{M−1}`.
    pub fn for_grid(alpha: f64, cells: usize) -> Result<Self> {
        Self::new(alpha, cells.saturating_sub(1).max(2))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambdas(&self) -> (f64, f64, f64) {
        (self.lambda1, self.lambda0, self.lambda_m1)
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Truncation index `L`; there are `L + 1` weights.
    pub fn truncation(&self) -> usize {
        self.w.len() - 1
    }

    /// Adds `delta` to `w[index]`. Only for negative controls of the
    /// property checks.
    #[doc(hidden)]
    pub fn perturb(&mut self, index: usize, delta: f64) {
        self.w[index] += delta;
    }

    fn denominator(&self) -> f64 {
        2.0 * (self.alpha * PI / 2.0).cos()
    }
}

/// One named inequality and how far inside (positive) or outside
/// (negative) it is satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct WeightReport {
    pub alpha: f64,
    pub checks: Vec<PropertyCheck>,
    /// `Σ_{l=0}^{L} w_l`.
    pub total_sum: f64,
    /// Bound on the neglected tail `Σ_{l>L} w_l`.
    pub tail_bound: f64,
}

impl WeightReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Bound on `Σ_{l>L} w_l`: the next `4L` terms summed directly plus a
/// power-law remainder beyond them.
///
/// For large `l`, `w_l ~ c·l^{−α−1}` with `w_l·l^{α+1}` decreasing toward
/// `c`, so `Σ_{l>n} w_l ≤ w_n·n/α`.
pub fn tail_bound(alpha: f64, len: usize) -> f64 {
    let far = 5 * len;
    let ext = WsgdWeights::new(alpha, far).expect("alpha validated by caller");
    let w = ext.w();
    let direct: f64 = w[len + 1..=far].iter().sum();
    let remainder = w[far] * far as f64 / alpha;
    direct + remainder.max(0.0)
}

/// Evaluates the sign pattern of the weights on the stored truncation:
/// `w_0 > 0`, `w_1 < 0`, `w_l > 0` for `l ≥ 3`, `w_0 + w_2 > 0`, every
/// partial sum `Σ_{l=0}^{m} w_l < 0` for `1 ≤ m ≤ L`, and the truncated total
/// within the tail bound below zero. The inequalities are strict for
/// `α < 2` and non-strict at `α = 2`, where the stencil degenerates to
/// `(1, −2, 1)`.
pub fn check_weight_properties(weights: &WsgdWeights) -> WeightReport {
    let w = weights.w();
    let strict = weights.alpha < 2.0;
    let positive = |m: f64| PropertyCheck {
        name: "",
        passed: if strict { m > 0.0 } else { m >= 0.0 },
        margin: m,
    };
    let named = |name, mut c: PropertyCheck| {
        c.name = name;
        c
    };

    let mut checks = vec![
        named("w0 > 0", positive(w[0])),
        named("w1 < 0", positive(-w[1])),
        named("w0 + w2 > 0", positive(w[0] + w[2])),
    ];
    if w.len() > 3 {
        let min_tail = w[3..].iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(named("w_l > 0 for l >= 3", positive(min_tail)));
    }
    let mut partial = w[0];
    let mut max_partial = f64::NEG_INFINITY;
    for &wl in &w[1..] {
        partial += wl;
        max_partial = max_partial.max(partial);
    }
    checks.push(named("partial sums < 0", positive(-max_partial)));

    let total_sum = partial;
    let tail = tail_bound(weights.alpha, weights.truncation());
    let in_band = total_sum <= 0.0 && total_sum > -tail - f64::EPSILON;
    checks.push(PropertyCheck {
        name: "total sum in (-tail, 0]",
        passed: in_band,
        margin: (-total_sum).min(total_sum + tail),
    });

    WeightReport {
        alpha: weights.alpha,
        checks,
        total_sum,
        tail_bound: tail,
    }
}

/// The matrix `C` of the discrete operator on `M − 1` interior nodes, with
/// its Cholesky factor.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    alpha: f64,
    cells: usize,
    matrix: SquareMatrix<f64>,
    chol: CholeskyFactor,
}

/// Builds `C = (W + Wᵀ)/(2cos(απ/2))` for a grid of `cells = M` cells and
/// factors it.
///
/// `W + Wᵀ` depends only on `|i − j|`: `2w₁` on the diagonal, `w₀ + w₂` on
/// the first off-diagonals and `w_{d+1}` at distance `d ≥ 2`. Building from
/// the distance keeps `C` bitwise symmetric.
pub fn assemble_operator(weights: &WsgdWeights, cells: usize) -> Result<OperatorMatrix> {
    if cells < 3 {
        return Err(Error::invalid("M", format!("need M >= 3, got {cells}")));
    }
    let w = weights.w();
    if w.len() < cells {
        return Err(Error::invalid(
            "weights",
            format!("{} weights cannot cover M = {cells}", w.len()),
        ));
    }
    let n = cells - 1;
    let denom = weights.denominator();
    let band: Vec<f64> = (0..n)
        .map(|d| match d {
            0 => 2.0 * w[1],
            1 => w[0] + w[2],
            _ => w[d + 1],
        })
        .map(|v| v / denom)
        .collect();
    let matrix = SquareMatrix::from_fn(n, |i, j| band[i.abs_diff(j)]);
    let chol = cholesky(&matrix)?;
    Ok(OperatorMatrix {
        alpha: weights.alpha,
        cells,
        matrix,
        chol,
    })
}

impl OperatorMatrix {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of grid cells `M`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Matrix dimension `M − 1`.
    pub fn size(&self) -> usize {
        self.cells - 1
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.matrix
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.chol
    }

    /// `Δ_h^α u = h^{−α}·C·u`.
    pub fn apply(&self, u: &[Complex64], h: f64) -> Vec<Complex64> {
        let scale = h.powf(-self.alpha);
        self.matrix
            .mul_complex(u)
            .into_iter()
            .map(|v| v * scale)
            .collect()
    }

    /// `(Δ_h^α u, u)_h` from the matrix.
    pub fn quadratic_form(&self, u: &[Complex64], h: f64) -> Complex64 {
        inner_product(&self.apply(u, h), u, h)
    }

    /// `Λ^α u = h^{−α/2}·Gᵀu`, where `C = G·Gᵀ`.
    pub fn lambda_apply(&self, u: &[Complex64], h: f64) -> Vec<Complex64> {
        let scale = h.powf(-self.alpha / 2.0);
        self.chol
            .apply_upper(u)
            .into_iter()
            .map(|v| v * scale)
            .collect()
    }

    /// `‖Λ^α u‖²_h`.
    pub fn lambda_norm_sq(&self, u: &[Complex64], h: f64) -> f64 {
        h.powf(-self.alpha) * norm_sq(&self.chol.apply_upper(u), h)
    }
}

/// `Δ_h^α u` by the direct double sum over the shifted Grünwald stencils,
/// with `u` zero outside the interior. `u` holds the `M − 1` interior values.
pub fn apply_fractional_laplacian(
    u: &[Complex64],
    weights: &WsgdWeights,
    h: f64,
) -> Result<Vec<Complex64>> {
    let cells = u.len() + 1;
    let w = weights.w();
    if w.len() < cells {
        return Err(Error::LengthMismatch {
            expected: cells,
            actual: w.len(),
        });
    }
    // Grid value at node index k (0..=M), zero on the boundary.
    let at = |k: isize| -> Complex64 {
        if k >= 1 && (k as usize) < cells {
            u[k as usize - 1]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let scale = 1.0 / (weights.denominator() * h.powf(weights.alpha));
    let out = (1..cells)
        .map(|j| {
            let j = j as isize;
            // Terms landing on the zero boundary values are skipped.
            let left: Complex64 = (0..=j).map(|l| at(j - l + 1) * w[l as usize]).sum();
            let right: Complex64 = (0..=cells as isize - j)
                .map(|l| at(j + l - 1) * w[l as usize])
                .sum();
            (left + right) * scale
        })
        .collect();
    Ok(out)
}

fn check_frequency(omega: f64) -> Result<()> {
    if (0.0..=PI).contains(&omega) {
        Ok(())
    } else {
        Err(Error::invalid(
            "omega",
            format!("{omega} is outside [0, pi]"),
        ))
    }
}

/// `h(α, ω) = λ₁cos(α(ω−π)/2 − ω) + λ₀cos(α(ω−π)/2) + λ₋₁cos(α(ω−π)/2 + ω)`,
/// the angular factor of the operator's symbol; nondecreasing on `[0, π]`.
pub fn h_function(alpha: f64, omega: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    check_frequency(omega)?;
    let (l1, l0, lm1) = wsgd_lambdas(alpha);
    let phase = alpha / 2.0 * (omega - PI);
    Ok(l1 * (phase - omega).cos() + l0 * phase.cos() + lm1 * (phase + omega).cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub closed_form: f64,
    pub series: f64,
}

/// Symbol `f(α, θ)` of `h^α Δ_h^α` at `θ = hk`, so that
/// `(Δ_h^α u, u)_h = ∫ h^{−α} f(α, hk) |û(k)|² dk`.
///
/// `closed_form` is `(2 sin(θ/2))^α h(α,θ) / cos(απ/2)`; `series` sums
/// `Σ_{j=0}^{L} w_j cos((j−1)θ) / cos(απ/2)` directly.
pub fn symbol_f(alpha: f64, theta: f64, len: usize) -> Result<SymbolValue> {
    let h = h_function(alpha, theta)?;
    let cos_a = (alpha * PI / 2.0).cos();
    let closed_form = (2.0 * (theta / 2.0).sin()).powf(alpha) / cos_a * h;
    let weights = WsgdWeights::new(alpha, len)?;
    let series = weights
        .w()
        .iter()
        .enumerate()
        .map(|(j, w)| w * ((j as f64 - 1.0) * theta).cos())
        .sum::<f64>()
        / cos_a;
    Ok(SymbolValue {
        closed_form,
        series,
    })
}

/// Lower spectral-equivalence constant `C_α = 2^α(1−α²)/(3π^α cos(απ/2))`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    Ok(
        2f64.powf(alpha) * (1.0 - alpha * alpha)
            / (3.0 * PI.powf(alpha) * (alpha * PI / 2.0).cos()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sampled_alphas() -> Vec<f64> {
        (1..=20).map(|i| 1.0 + i as f64 / 21.0).collect()
    }

    #[test]
    fn grunwald_alpha_two_is_binomial() {
        assert_eq!(
            grunwald_coeffs(2.0, 4).unwrap(),
            vec![1.0, -2.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn grunwald_first_coefficient() {
        for a in [1.01, 1.3, 1.77, 2.0] {
            assert!((grunwald_coeffs(a, 2).unwrap()[1] + a).abs() < 1e-15);
        }
    }

    #[test]
    fn grunwald_second_coefficient_closed_form() {
        // α(α−1)/2 at α = 1.5
        let g = grunwald_coeffs(1.5, 2).unwrap();
        assert!((g[2] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn grunwald_matches_product_formula() {
        for a in [1.1, 1.5, 1.9, 2.0] {
            let g = grunwald_coeffs(a, 64).unwrap();
            let mut binom = 1.0;
            for (l, &gl) in g.iter().enumerate() {
                if l > 0 {
                    // (−1)^l C(α, l) = Π_{k=1}^{l} (k − 1 − α)/k
                    binom *= (l as f64 - 1.0 - a) / l as f64;
                }
                if binom == 0.0 {
                    assert_eq!(gl, 0.0);
                } else {
                    assert!(((gl - binom) / binom).abs() < 1e-12, "alpha {a}, l {l}");
                }
            }
        }
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        for a in [0.9, 1.0, 2.0001, f64::NAN] {
            assert!(matches!(
                grunwald_coeffs(a, 4),
                Err(Error::AlphaOutOfRange(_))
            ));
            assert!(WsgdWeights::new(a, 4).is_err());
            assert!(c_alpha(a).is_err());
        }
        assert!(grunwald_coeffs(1.5, 1).is_err());
    }

    #[test]
    fn alpha_two_weights_are_three_point_stencil() {
        let w = WsgdWeights::new(2.0, 4).unwrap();
        assert_eq!(w.lambdas(), (1.0, 0.0, 0.0));
        assert_eq!(w.w(), &[1.0, -2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn lambdas_at_one_and_a_half() {
        let w = WsgdWeights::new(1.5, 2).unwrap();
        let (l1, l0, lm1) = w.lambdas();
        assert!((l1 - 35.0 / 48.0).abs() < 1e-15);
        assert!((l0 - 7.0 / 24.0).abs() < 1e-15);
        assert!((lm1 + 1.0 / 48.0).abs() < 1e-15);
        assert!((w.w()[1] - (l1 * -1.5 + l0)).abs() < 1e-15);
        assert!((w.w()[0] - l1).abs() == 0.0);
    }

    #[test]
    fn lambdas_sum_to_one() {
        for a in sampled_alphas() {
            let (l1, l0, lm1) = wsgd_lambdas(a);
            assert!((l1 + l0 + lm1 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_sums_match_lower_order_grunwald() {
        // Σ_{l≤n} g_l^{(α)} = g_n^{(α−1)} since (1−z)^α/(1−z) = (1−z)^{α−1},
        // so Σ_{l≤n} w_l = λ₁G_n + λ₀G_{n−1} + λ₋₁G_{n−2}.
        for a in [1.1, 1.5, 1.9] {
            let n = 300;
            let w = WsgdWeights::new(a, n).unwrap();
            let big_g = grunwald_recursion(a - 1.0, n);
            let (l1, l0, lm1) = w.lambdas();
            let mut s = 0.0;
            for m in 0..=n {
                s += w.w()[m];
                let mut expected = l1 * big_g[m];
                if m >= 1 {
                    expected += l0 * big_g[m - 1];
                }
                if m >= 2 {
                    expected += lm1 * big_g[m - 2];
                }
                assert!((s - expected).abs() < 1e-13, "alpha {a}, m {m}");
            }
        }
    }

    #[test]
    fn sign_properties_hold_for_sampled_alphas() {
        // w0 + w1 = -(α+2)(α²+2α-5)/12 changes sign at α = √6 - 1, so the
        // first partial sum is positive below it; everything else holds.
        let threshold = 6f64.sqrt() - 1.0;
        for a in sampled_alphas() {
            let report =
                check_weight_properties(&WsgdWeights::new(a, PROPERTY_TRUNCATION).unwrap());
            let failures: Vec<&str> = report.failures().map(|c| c.name).collect();
            if a < threshold {
                assert_eq!(failures, ["partial sums < 0"], "alpha {a}");
            } else {
                assert!(failures.is_empty(), "alpha {a}: {failures:?}");
            }
        }
    }

    #[test]
    fn first_partial_sum_closed_form() {
        for a in [1.05, 1.3, 1.449, 1.45, 1.7, 2.0] {
            let w = WsgdWeights::new(a, 4).unwrap();
            let expected = -(a + 2.0) * (a * a + 2.0 * a - 5.0) / 12.0;
            assert!((w.w()[0] + w.w()[1] - expected).abs() < 1e-15, "alpha {a}");
        }
    }

    #[test]
    fn partial_sums_from_two_on_are_negative() {
        for a in sampled_alphas() {
            let w = WsgdWeights::new(a, PROPERTY_TRUNCATION).unwrap();
            let mut s = w.w()[0] + w.w()[1];
            for &wl in &w.w()[2..] {
                s += wl;
                assert!(s < 0.0, "alpha {a}");
            }
        }
    }

    #[test]
    fn alpha_two_properties_are_non_strict() {
        let w = WsgdWeights::new(2.0, 64).unwrap();
        assert!(w.w()[3..].iter().all(|&v| v == 0.0));
        assert_eq!(w.w()[0] + w.w()[1], -1.0);
        assert_eq!(w.w()[0] + w.w()[1] + w.w()[2], 0.0);
        let report = check_weight_properties(&w);
        assert!(report.all_passed(), "{:?}", report.checks);
        assert_eq!(report.total_sum, 0.0);
    }

    #[test]
    fn total_sum_shrinks_with_truncation() {
        let short = check_weight_properties(&WsgdWeights::new(1.1, 64).unwrap());
        let long = check_weight_properties(&WsgdWeights::new(1.1, 4096).unwrap());
        assert!(long.total_sum.abs() < short.total_sum.abs());
        for r in [short, long] {
            assert!(
                r.checks
                    .iter()
                    .find(|c| c.name.starts_with("total"))
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn tail_power_law_is_an_upper_bound() {
        // w_l·l^{α+1} decreasing for large l underwrites the remainder bound.
        for a in sampled_alphas() {
            let w = WsgdWeights::new(a, 20_000).unwrap();
            let scaled: Vec<f64> = (1000..=20_000)
                .step_by(100)
                .map(|l| w.w()[l] * (l as f64).powf(a + 1.0))
                .collect();
            assert!(scaled.windows(2).all(|p| p[1] <= p[0]), "alpha {a}");
        }
    }

    #[test]
    fn perturbed_weight_is_detected() {
        let mut w = WsgdWeights::new(1.5, 256).unwrap();
        w.perturb(10, -1.0);
        let report = check_weight_properties(&w);
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert!(failed.contains(&"w_l > 0 for l >= 3"), "{failed:?}");
    }

    #[test]
    fn alpha_two_operator_is_classical_laplacian() {
        for m in [3, 5, 12] {
            let op = assemble_operator(&WsgdWeights::for_grid(2.0, m).unwrap(), m).unwrap();
            let c = op.matrix();
            for i in 0..m - 1 {
                for j in 0..m - 1 {
                    let expected = match i.abs_diff(j) {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 0.0,
                    };
                    assert_eq!(c[(i, j)], expected);
                }
            }
        }
    }

    #[test]
    fn operator_matches_impulse_responses() {
        let m = 6;
        let w = WsgdWeights::for_grid(1.5, m).unwrap();
        let op = assemble_operator(&w, m).unwrap();
        for j in 0..m - 1 {
            let mut e = vec![Complex64::new(0.0, 0.0); m - 1];
            e[j] = Complex64::new(1.0, 0.0);
            let col = apply_fractional_laplacian(&e, &w, 1.0).unwrap();
            for (i, v) in col.iter().enumerate() {
                assert!((v.re - op.matrix()[(i, j)]).abs() < 1e-15);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn operator_is_symmetric_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for a in [1.05, 1.3, 1.6, 1.9, 2.0] {
            let m = 40;
            let op = assemble_operator(&WsgdWeights::for_grid(a, m).unwrap(), m).unwrap();
            assert!(op.matrix().is_symmetric());
            assert!(op.cholesky().min_pivot() > 0.0);
            for _ in 0..100 {
                let u: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let cu = op.matrix().mul_vec(&u);
                let q: f64 = cu.iter().zip(&u).map(|(a, b)| a * b).sum();
                assert!(q > 0.0);
            }
        }
    }

    #[test]
    fn assemble_rejects_short_weights_and_tiny_grid() {
        let w = WsgdWeights::new(1.5, 4).unwrap();
        assert!(assemble_operator(&w, 8).is_err());
        assert!(assemble_operator(&w, 2).is_err());
    }

    #[test]
    fn apply_alpha_two_impulse() {
        let w = WsgdWeights::for_grid(2.0, 8).unwrap();
        let mut u = vec![Complex64::new(0.0, 0.0); 7];
        u[3] = Complex64::new(1.0, 0.0);
        let out = apply_fractional_laplacian(&u, &w, 1.0).unwrap();
        let expected = [0.0, 0.0, -1.0, 2.0, -1.0, 0.0, 0.0];
        for (o, e) in out.iter().zip(expected) {
            assert_eq!(o.re, e);
        }
    }

    #[test]
    fn apply_zero_is_zero() {
        let w = WsgdWeights::for_grid(1.7, 10).unwrap();
        let out = apply_fractional_laplacian(&[Complex64::new(0.0, 0.0); 9], &w, 0.3).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn apply_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = 50;
        let h = 0.17;
        let w = WsgdWeights::for_grid(1.5, m).unwrap();
        let op = assemble_operator(&w, m).unwrap();
        let u: Vec<Complex64> = (0..m - 1)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let direct = apply_fractional_laplacian(&u, &w, h).unwrap();
        let viamat = op.apply(&u, h);
        let scale = viamat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in direct.iter().zip(&viamat) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn apply_rejects_insufficient_weights() {
        let w = WsgdWeights::new(1.5, 3).unwrap();
        assert!(apply_fractional_laplacian(&[Complex64::new(1.0, 0.0); 9], &w, 1.0).is_err());
    }

    #[test]
    fn h_function_endpoints() {
        for a in sampled_alphas().into_iter().chain([2.0]) {
            assert!((h_function(a, 0.0).unwrap() - (a * PI / 2.0).cos()).abs() < 1e-14);
            assert!((h_function(a, PI).unwrap() - (1.0 - a * a) / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn h_function_constant_at_alpha_two() {
        for i in 0..=200 {
            let om = PI * i as f64 / 200.0;
            assert!((h_function(2.0, om).unwrap() + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn h_function_domain() {
        assert!(h_function(1.5, -0.1).is_err());
        assert!(h_function(1.5, PI + 1e-9).is_err());
    }

    #[test]
    fn symbol_vanishes_at_zero() {
        let s = symbol_f(1.5, 0.0, 64).unwrap();
        assert_eq!(s.closed_form, 0.0);
    }

    #[test]
    fn symbol_alpha_two_at_pi() {
        let s = symbol_f(2.0, PI, 8).unwrap();
        assert!((s.closed_form - 4.0).abs() < 1e-14);
        assert!((s.series - 4.0).abs() < 1e-14);
    }

    #[test]
    fn symbol_series_converges() {
        let s = symbol_f(1.5, PI / 2.0, 4096).unwrap();
        assert!((s.closed_form - s.series).abs() < 1e-6);
    }

    #[test]
    fn symbol_between_bounds() {
        for a in sampled_alphas().into_iter().chain([2.0]) {
            let ca = c_alpha(a).unwrap();
            for i in 0..=100 {
                let th = PI * i as f64 / 100.0;
                let f = symbol_f(a, th, 2).unwrap().closed_form;
                assert!(ca * th.powf(a) <= f + 1e-12, "alpha {a}, theta {th}");
                assert!(f <= th.powf(a) + 1e-12, "alpha {a}, theta {th}");
            }
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn c_alpha_values() {
        assert!((c_alpha(2.0).unwrap() - 4.0 / (PI * PI)).abs() < 1e-15);
        // 40-digit reference evaluation.
        assert!((c_alpha(1.5).unwrap() - 0.299_311_870_208_610_936).abs() < 1e-15);
        assert!((c_alpha(1.2).unwrap() - 0.276_061_094_337_403_425).abs() < 1e-15);
        for a in sampled_alphas() {
            assert!(c_alpha(a).unwrap() > 0.0);
        }
    }
}
