//! Modal basis: tensor Legendre polynomials on the element bounding box,
//! orthonormal on the box, filtered to total degree <= p.

use crate::geometry::Point;

pub fn n_modes(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

#[derive(Debug, Clone)]
pub struct Basis {
    pub degree: usize,
    center: Point,
    half: Point,
    /// (x-degree, y-degree) of each mode, ordered by total degree.
    exponents: Vec<(usize, usize)>,
}

impl Basis {
    pub fn new(bbox: [f64; 4], degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(n_modes(degree));
        for total in 0..=degree {
            for j in 0..=total {
                exponents.push((total - j, j));
            }
        }
        Self {
            degree,
            center: [0.5 * (bbox[0] + bbox[1]), 0.5 * (bbox[2] + bbox[3])],
            half: [0.5 * (bbox[1] - bbox[0]), 0.5 * (bbox[3] - bbox[2])],
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    /// Normalized Legendre values and derivatives in both directions.
    fn legendre(&self, p: Point) -> ([Vec<f64>; 2], [Vec<f64>; 2]) {
        let n = self.degree + 1;
        let mut v = [vec![0.0; n], vec![0.0; n]];
        let mut d = [vec![0.0; n], vec![0.0; n]];
        for c in 0..2 {
            let z = (p[c] - self.center[c]) / self.half[c];
            let (vals, ders) = (&mut v[c], &mut d[c]);
            vals[0] = 1.0;
            ders[0] = 0.0;
            if n > 1 {
                vals[1] = z;
                ders[1] = 1.0;
            }
            for k in 1..n.saturating_sub(1) {
                vals[k + 1] = ((2 * k + 1) as f64 * z * vals[k] - k as f64 * vals[k - 1]) / (k + 1) as f64;
                ders[k + 1] = ders[k - 1] + (2 * k + 1) as f64 * vals[k];
            }
            let scale = 1.0 / self.half[c].sqrt();
            for k in 0..n {
                let s = ((2 * k + 1) as f64 * 0.5).sqrt() * scale;
                vals[k] *= s;
                ders[k] *= s / self.half[c];
            }
        }
        (v, d)
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out, None);
        out
    }

    pub fn eval_grad(&self, p: Point) -> Vec<[f64; 2]> {
        let mut vals = vec![0.0; self.len()];
        let mut grads = vec![[0.0; 2]; self.len()];
        self.eval_into(p, &mut vals, Some(&mut grads));
        grads
    }

    pub fn eval_into(&self, p: Point, vals: &mut [f64], grads: Option<&mut [[f64; 2]]>) {
        let (v, d) = self.legendre(p);
        for (m, &(i, j)) in self.exponents.iter().enumerate() {
            vals[m] = v[0][i] * v[1][j];
        }
        if let Some(g) = grads {
            for (m, &(i, j)) in self.exponents.iter().enumerate() {
                g[m] = [d[0][i] * v[1][j], v[0][i] * d[1][j]];
            }
        }
    }
}
