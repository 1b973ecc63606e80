//! Gauss-Legendre quadrature and piecewise integration helpers.

use std::f64::consts::PI;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from Chebyshev starting
    /// points. Exact for polynomials of degree up to 2n - 1.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
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
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * sum
    }

    /// Integrates over consecutive segments `[breaks[i], breaks[i+1]]`.
    pub fn integrate_segments<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F) -> f64 {
        breaks
            .windows(2)
            .filter(|s| s[1] > s[0])
            .map(|s| self.integrate(s[0], s[1], &f))
            .sum()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Points in `[lo, hi]` where the integer-valued `label` changes, located by
/// scanning `scan` equal cells and bisecting each change to machine precision.
pub fn locate_changes<F: Fn(f64) -> i64>(lo: f64, hi: f64, scan: usize, label: F) -> Vec<f64> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let step = (hi - lo) / scan as f64;
    let mut x0 = lo;
    let mut l0 = label(x0);
    for i in 1..=scan {
        let x1 = if i == scan { hi } else { lo + step * i as f64 };
        let l1 = label(x1);
        if l1 != l0 {
            let (mut a, mut b) = (x0, x1);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if label(m) == l0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        x0 = x1;
        l0 = l1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights_small_orders() {
        let r = GaussLegendre::new(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
        let r3 = GaussLegendre::new(3);
        assert!((r3.weights[1] - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(r3.nodes[1], 0.0);
    }

    #[test]
    fn exact_on_polynomials() {
        let r = GaussLegendre::new(64);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        // x^7 - 3x^2 + 1 on [-0.3, 0.9]
        let f = |x: f64| x.powi(7) - 3.0 * x * x + 1.0;
        let anti = |x: f64| x.powi(8) / 8.0 - x.powi(3) + x;
        let exact = anti(0.9) - anti(-0.3);
        assert!((r.integrate(-0.3, 0.9, f) - exact).abs() < 1e-14);
    }

    #[test]
    fn smooth_function() {
        let r = GaussLegendre::new(64);
        assert!((r.integrate(0.0, PI, f64::sin) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn locate_sign_changes() {
        let roots = locate_changes(-1.0, 1.0, 10_000, |x| (x - 0.123_456_789 > 0.0) as i64);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 0.123_456_789).abs() < 1e-15);
        assert!(locate_changes(0.0, 1.0, 100, |_| 1).is_empty());
    }
}
