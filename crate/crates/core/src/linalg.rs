//! Grid functions, discrete inner products and norms, and the two dense
//! factorizations the solver needs: a real Cholesky split of the operator
//! matrix and a complex LU of the time-stepping matrix, factored once and
//! reused for every right-hand side.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivot magnitude below which [`lu_factor`] reports a singular matrix.
pub const SINGULAR_PIVOT: f64 = 1e-300;

/// Complex grid function on the interior nodes `x_1, …, x_{M−1}`.
///
/// Values outside the interior are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    values: Vec<Complex64>,
    h: f64,
}

impl ComplexField {
    pub fn new(values: Vec<Complex64>, h: f64) -> Self {
        Self { values, h }
    }

    pub fn zeros(len: usize, h: f64) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], h)
    }

    pub fn from_real(values: &[f64], h: f64) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), h)
    }

    /// Unit impulse at interior index `j` (0-based).
    pub fn impulse(len: usize, j: usize, h: f64) -> Self {
        let mut f = Self::zeros(len, h);
        f.values[j] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn check_compatible(&self, other: &ComplexField) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        if self.h != other.h {
            return Err(Error::SpacingMismatch(self.h, other.h));
        }
        Ok(())
    }

    /// `(u, v)_h = h Σ u_j conj(v_j)`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(inner_product(&self.values, &other.values, self.h))
    }

    /// `‖u‖²_h`.
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.values, self.h)
    }

    /// `‖u‖_h`.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `‖u‖_{l^p_h} = (h Σ |u_j|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, self.h, p)
    }

    /// `‖u‖_{l^∞_h} = max |u_j|`.
    pub fn linf_norm(&self) -> f64 {
        linf_norm(&self.values)
    }
}

pub fn inner_product(u: &[Complex64], v: &[Complex64], h: f64) -> Complex64 {
    h * u
        .iter()
        .zip(v)
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
}

pub fn norm_sq(u: &[Complex64], h: f64) -> f64 {
    h * u.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

pub fn lp_norm(u: &[Complex64], h: f64, p: f64) -> f64 {
    (h * u.iter().map(|z| z.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
}

pub fn linf_norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds from row-major data; `data.len()` must be a perfect square.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl SquareMatrix<f64> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, b)| b * a)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl SquareMatrix<Complex64> {
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Cholesky split `C = G·Gᵀ` of a symmetric positive definite matrix.
///
/// `G` is stored lower-triangular. The operator `Λ` of the energy estimates
/// is `h^{−α/2}·Gᵀ`, so that `(Cu, u) = ‖Gᵀu‖²`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: SquareMatrix<f64>,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &SquareMatrix<f64> {
        &self.lower
    }

    pub fn size(&self) -> usize {
        self.lower.size()
    }

    /// Upper-triangular `R = Gᵀ`, with `C = RᵀR`.
    pub fn upper(&self) -> SquareMatrix<f64> {
        self.lower.transpose()
    }

    /// Smallest diagonal entry of `G` (square root of the smallest pivot).
    pub fn min_pivot(&self) -> f64 {
        (0..self.size())
            .map(|i| self.lower[(i, i)])
            .fold(f64::INFINITY, f64::min)
    }

    /// `Gᵀ·x`.
    pub fn apply_upper(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        // (Gᵀx)_j = Σ_{i ≥ j} G_ij x_i; walk G by rows for contiguous access.
        for i in 0..n {
            let xi = x[i];
            let row = self.lower.row(i);
            for (o, &g) in out[..=i].iter_mut().zip(&row[..=i]) {
                *o += xi * g;
            }
        }
        out
    }

    /// `G·Gᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> SquareMatrix<f64> {
        let n = self.size();
        let g = &self.lower;
        SquareMatrix::from_fn(n, |i, j| {
            let k_max = i.min(j);
            (0..=k_max).map(|k| g[(i, k)] * g[(j, k)]).sum()
        })
    }
}

/// Cholesky factorization of a symmetric matrix; only the lower triangle is
/// read.
pub fn cholesky(c: &SquareMatrix<f64>) -> Result<CholeskyFactor> {
    let n = c.size();
    let mut g = SquareMatrix::<f64>::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let (gi, gj) = (g.row(i), g.row(j));
            let dot: f64 = gi[..j].iter().zip(&gj[..j]).map(|(a, b)| a * b).sum();
            let s = c[(i, j)] - dot;
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                g[(i, i)] = s.sqrt();
            } else {
                g[(i, j)] = s / g[(j, j)];
            }
        }
    }
    Ok(CholeskyFactor { lower: g })
}

/// LU factorization `P·A = L·U` with partial pivoting. Immutable once built;
/// any number of right-hand sides may be solved against it.
#[derive(Debug, Clone)]
pub struct FactorizedSystem {
    n: usize,
    // Unit-lower L below the diagonal, U on and above it.
    lu: Vec<Complex64>,
    // perm[i] = original row now in position i.
    perm: Vec<usize>,
}

pub fn lu_factor(a: SquareMatrix<Complex64>) -> Result<FactorizedSystem> {
    let n = a.size();
    let mut lu = a.data;
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, magnitude) =
            (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if !(magnitude >= SINGULAR_PIVOT) {
            return Err(Error::Singular {
                column: k,
                magnitude,
            });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        let (upper, lower) = lu.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n + k + 1..k * n + n];
        for row in lower.chunks_exact_mut(n) {
            let factor = row[k] / pivot;
            row[k] = factor;
            if factor != Complex64::new(0.0, 0.0) {
                for (r, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *r -= factor * u;
                }
            }
        }
    }
    Ok(FactorizedSystem { n, lu, perm })
}

impl FactorizedSystem {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` into `x`. `b` and `x` must both have length `n`.
    pub fn solve_into(&self, b: &[Complex64], x: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        for len in [b.len(), x.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        for (xi, &p) in x.iter_mut().zip(&self.perm) {
            *xi = b[p];
        }
        for i in 1..n {
            let row = &self.lu[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: Complex64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(())
    }

    pub fn solve_slice(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        self.solve_into(b, &mut x)?;
        Ok(x)
    }

    pub fn solve(&self, b: &ComplexField) -> Result<ComplexField> {
        Ok(ComplexField::new(self.solve_slice(b.values())?, b.h()))
    }
}
