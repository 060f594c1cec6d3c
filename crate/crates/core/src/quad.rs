//! Quadrature rules and the segment-average kernel.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Moments `M_n(theta) = int_0^1 s^n e^{i theta s} ds` for `n = 0, 1, 2`.
///
/// Uses the power series below `|theta| = 2` and the upward recurrence
/// `M_n = (e^{i theta} - n M_{n-1}) / (i theta)` above it.
pub fn segment_moments(theta: f64) -> [Complex64; 3] {
    if theta.abs() < 2.0 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let z = I * theta;
        let mut term = Complex64::new(1.0, 0.0); // (i theta)^j / j!
        for j in 0..40 {
            for (n, m) in out.iter_mut().enumerate() {
                *m += term / (n + j + 1) as f64;
            }
            term *= z / (j + 1) as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
        out
    } else {
        let e = Complex64::from_polar(1.0, theta);
        let it = I * theta;
        let m0 = (e - 1.0) / it;
        let m1 = (e - m0) / it;
        let m2 = (e - 2.0 * m1) / it;
        [m0, m1, m2]
    }
}

/// `phi1(theta) = (e^{i theta} - 1) / (i theta)`, the average of `e^{i theta s}`
/// over `s in [0, 1]`, with `phi1(0) = 1`.
pub fn phi1(theta: f64) -> Complex64 {
    segment_moments(theta)[0]
}

/// `(phi1, phi1', phi1'')` at `theta`.
pub fn phi1_with_derivatives(theta: f64) -> (Complex64, Complex64, Complex64) {
    let [m0, m1, m2] = segment_moments(theta);
    (m0, I * m1, -m2)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (n + 1) / 2;
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[0, 1]` with `panels` equal panels of
/// `order` nodes each.
#[derive(Debug, Clone)]
pub struct SegmentRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SegmentRule {
    pub fn composite(panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| f(s) * w)
            .sum()
    }
}

/// Uniform nodes `-1/2 + j/n`, `j = 0..n`, of the periodic trapezoid rule on
/// `[-1/2, 1/2)`.
pub fn centered_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |j| -0.5 + j as f64 / n as f64)
}
