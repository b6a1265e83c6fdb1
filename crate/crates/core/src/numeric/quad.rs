//! Gauss-Legendre quadrature: fixed rules and an adaptive composite driver.
//!
//! The adaptive driver bisects panels until the 32-point rule on a panel
//! agrees with the sum of the rules on its two halves. Integrands used in
//! this crate are analytic on the closed interval (endpoint singularities are
//! removed by substitution beforehand), so the rule converges geometrically
//! and the acceptance test is conservative.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The 32-point rule used for every panel.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// One accepted panel of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// Settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_depth: u32,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            initial_panels: 4,
            max_depth: 48,
        }
    }
}

/// Integrates `f` over [a, b] and returns the accepted panels in order.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: Adaptive,
) -> Result<Vec<Panel>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure(format!(
            "non-finite interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(vec![Panel {
            lo: a,
            hi: b,
            value: 0.0,
        }]);
    }
    let rule = gl32();
    let n0 = opts.initial_panels.max(1);
    let width = b - a;
    let mut stack: Vec<(f64, f64, f64, u32)> = Vec::with_capacity(64);
    let mut estimate = 0.0;
    for i in (0..n0).rev() {
        let lo = a + width * i as f64 / n0 as f64;
        let hi = if i + 1 == n0 {
            b
        } else {
            a + width * (i + 1) as f64 / n0 as f64
        };
        let v = rule.integrate(&mut f, lo, hi);
        estimate += v.abs();
        stack.push((lo, hi, v, 0));
    }
    if !estimate.is_finite() {
        return Err(Error::QuadratureFailure(
            "integrand is not finite on the interval".into(),
        ));
    }

    let mut out = Vec::new();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        let refined = left + right;
        if !refined.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "integrand is not finite on [{lo}, {mid}, {hi}]"
            )));
        }
        let share = ((hi - lo) / width).abs();
        let tol = (opts.rel_tol * estimate).max(opts.abs_tol) * share.max(1e-3);
        if (refined - whole).abs() <= tol || (hi - lo).abs() <= 1e-15 * width.abs() {
            out.push(Panel {
                lo,
                hi,
                value: refined,
            });
        } else if depth >= opts.max_depth {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{lo}, {hi}] after {depth} bisections"
            )));
        } else {
            // Push right first so panels come out left to right.
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(out)
}

/// Adaptive composite Gauss-Legendre integral of `f` over [a, b].
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: Adaptive,
) -> Result<f64> {
    let panels = integrate_panels(f, a, b, opts)?;
    Ok(neumaier_sum(panels.iter().map(|p| p.value)))
}

/// Adaptive integral with the default tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_adaptive(f, a, b, Adaptive::default())
}

/// Compensated summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // degree 9 is exact for 5 nodes
        let v = rule.integrate(|x| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = gl32().weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let r = gl32();
        for i in 1..r.len() {
            assert!(r.nodes()[i] > r.nodes()[i - 1]);
        }
        for i in 0..r.len() {
            assert!((r.nodes()[i] + r.nodes()[r.len() - 1 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_near_singular_endpoint() {
        // sqrt(eps + t^2) on [0, 1]: branch points at +-i sqrt(eps)
        let eps: f64 = 1e-10;
        let v = integrate(|t| (eps + t * t).sqrt(), 0.0, 1.0).unwrap();
        let exact =
            0.5 * ((1.0 + eps).sqrt() + eps * ((1.0 + (1.0 + eps).sqrt()) / eps.sqrt()).ln());
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn panels_tile_the_interval() {
        let panels = integrate_panels(|x| (-x * x).exp(), -3.0, 2.0, Adaptive::default()).unwrap();
        assert_eq!(panels.first().unwrap().lo, -3.0);
        assert_eq!(panels.last().unwrap().hi, 2.0);
        for w in panels.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
    }

    #[test]
    fn divergent_integrand_is_reported() {
        let opts = Adaptive {
            max_depth: 20,
            ..Adaptive::default()
        };
        let r = integrate_adaptive(|x| 1.0 / x, 0.0, 1.0, opts);
        assert!(matches!(r, Err(Error::QuadratureFailure(_))));
        let r = integrate(|_| f64::NAN, 0.0, 1.0);
        assert!(matches!(r, Err(Error::QuadratureFailure(_))));
    }
}
