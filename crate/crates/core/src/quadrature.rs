//! Gauss–Legendre rules and composite integration on graded panels.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`,
/// by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

// (P_n(x), P_n'(x))
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[0, upper]`: `panels` equal panels, the first of
/// which is split geometrically toward 0 (`grading` halvings) so that
/// integrands like `k^s·smooth(k)` with `s ≥ 0` are resolved.
#[derive(Debug, Clone)]
pub struct GradedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const POINTS_PER_PANEL: usize = 16;
const GRADING_LEVELS: usize = 48;

impl GradedRule {
    pub fn new(upper: f64, panels: usize) -> Self {
        let (x, w) = gauss_legendre(POINTS_PER_PANEL);
        let width = upper / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push = |lo: f64, hi: f64| {
            let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        };
        let mut hi = width;
        for _ in 0..GRADING_LEVELS {
            push(hi / 2.0, hi);
            hi /= 2.0;
        }
        for p in 1..panels {
            push(p as f64 * width, (p + 1) as f64 * width);
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
