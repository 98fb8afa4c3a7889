//! Gauss rules on segments and composite collapsed-Gauss rules on polygons.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Highest polynomial degree the rules are generated for.
pub const MAX_ORDER: usize = 40;

#[derive(Debug, Clone, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], exact up to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

fn points_for_order(order: usize) -> Result<usize> {
    if order > MAX_ORDER {
        return Err(Error::QuadratureOrder { requested: order, max: MAX_ORDER });
    }
    Ok(order / 2 + 1)
}

/// Rule on the segment `a -> b`, exact for polynomials of degree <= `order`.
pub fn segment_rule(a: Point, b: Point, order: usize) -> Result<QuadratureRule> {
    let n = points_for_order(order)?;
    let (x, w) = gauss_legendre(n);
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let mut rule = QuadratureRule { points: Vec::with_capacity(n), weights: Vec::with_capacity(n) };
    for (xi, wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi + 1.0);
        rule.points.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        rule.weights.push(0.5 * wi * len);
    }
    Ok(rule)
}

/// Collapsed (Duffy) tensor Gauss rule on a triangle, exact for total degree <= `order`.
pub fn triangle_rule(tri: &[Point; 3], order: usize, out: &mut QuadratureRule) -> Result<()> {
    // The collapse adds one degree in the second direction.
    let n = points_for_order(order + 1)?;
    let (x, w) = gauss_legendre(n);
    let [a, b, c] = *tri;
    let jac = ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
    for (xv, wv) in x.iter().zip(&w) {
        let v = 0.5 * (xv + 1.0);
        for (xu, wu) in x.iter().zip(&w) {
            let u = 0.5 * (xu + 1.0);
            let (s, t) = (u * (1.0 - v), v);
            out.points.push([
                a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            ]);
            out.weights.push(0.25 * wu * wv * (1.0 - v) * jac);
        }
    }
    Ok(())
}

/// Composite rule over a sub-triangulation.
pub fn composite_rule(triangles: &[[Point; 3]], order: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    for t in triangles {
        triangle_rule(t, order, &mut rule)?;
    }
    Ok(rule)
}
