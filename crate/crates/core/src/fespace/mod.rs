//! Discontinuous polynomial spaces on polygons: basis, quadrature, dof layout
//! and L2 projection.

mod basis;
mod quadrature;

pub use basis::{n_modes, Basis};
pub use quadrature::{composite_rule, gauss_legendre, segment_rule, triangle_rule, QuadratureRule, MAX_ORDER};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{PolyElement, PolyMesh, Region};

/// Composite rule over the element's sub-triangles, exact up to `order`.
pub fn volume_quadrature(element: &PolyElement, order: usize) -> Result<QuadratureRule> {
    composite_rule(&element.subtriangles, order)
}

/// Gauss rule on face `f`, exact up to `order`.
pub fn face_quadrature(mesh: &PolyMesh, f: usize, order: usize) -> Result<QuadratureRule> {
    let [a, b] = mesh.face_points(f);
    segment_rule(a, b, order)
}

pub fn basis_of(element: &PolyElement) -> Basis {
    Basis::new(element.bbox, element.degree)
}

/// Default volume/face quadrature order for degree `p`.
pub fn assembly_order(p: usize) -> usize {
    2 * p + 2
}

/// Quadrature order used for error measurement and non-polynomial data.
pub fn measurement_order(p: usize) -> usize {
    2 * p + 4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    VectorElastic,
    ScalarAcoustic,
}

impl SpaceKind {
    pub fn region(self) -> Region {
        match self {
            SpaceKind::VectorElastic => Region::Elastic,
            SpaceKind::ScalarAcoustic => Region::Acoustic,
        }
    }

    pub fn components(self) -> usize {
        match self {
            SpaceKind::VectorElastic => 2,
            SpaceKind::ScalarAcoustic => 1,
        }
    }
}

/// Degree-of-freedom layout. Within an element, dofs are component-major:
/// `offset + component * n_modes + mode`.
#[derive(Debug, Clone)]
pub struct DgSpace {
    kind: SpaceKind,
    offsets: Vec<Option<usize>>,
    modes: Vec<usize>,
    total: usize,
}

impl DgSpace {
    pub fn new(mesh: &PolyMesh, kind: SpaceKind) -> Self {
        let mut offsets = vec![None; mesh.n_elements()];
        let mut modes = vec![0; mesh.n_elements()];
        let mut total = 0;
        for (k, e) in mesh.elements().iter().enumerate() {
            if e.region == kind.region() {
                offsets[k] = Some(total);
                modes[k] = n_modes(e.degree);
                total += kind.components() * modes[k];
            }
        }
        Self { kind, offsets, modes, total }
    }

    pub fn elastic(mesh: &PolyMesh) -> Self {
        Self::new(mesh, SpaceKind::VectorElastic)
    }

    pub fn acoustic(mesh: &PolyMesh) -> Self {
        Self::new(mesh, SpaceKind::ScalarAcoustic)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn n_dofs(&self) -> usize {
        self.total
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn offset(&self, k: usize) -> Option<usize> {
        self.offsets[k]
    }

    pub fn n_modes(&self, k: usize) -> usize {
        self.modes[k]
    }

    /// Number of dofs owned by element `k` (0 outside the space's region).
    pub fn local_dofs(&self, k: usize) -> usize {
        if self.offsets[k].is_some() {
            self.components() * self.modes[k]
        } else {
            0
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.offsets[k].is_some()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.iter().enumerate().filter(|(_, o)| o.is_some()).map(|(k, _)| k)
    }

    /// `(offset, len)` dof ranges of all elements in the space, in element order.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        self.elements().map(|k| (self.offsets[k].unwrap(), self.local_dofs(k))).collect()
    }

    /// Value of the discrete field on element `k` at `p` (component `c`).
    pub fn eval(&self, mesh: &PolyMesh, coeffs: &[f64], k: usize, p: Point) -> [f64; 2] {
        let off = self.offsets[k].expect("element outside the space");
        let basis = basis_of(mesh.element(k));
        let phi = basis.eval(p);
        let n = phi.len();
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate().take(self.components()) {
            *o = phi.iter().enumerate().map(|(m, v)| v * coeffs[off + c * n + m]).sum();
        }
        out
    }

    /// Gradient of component `c` on element `k` at `p`.
    pub fn eval_grad(&self, mesh: &PolyMesh, coeffs: &[f64], k: usize, c: usize, p: Point) -> [f64; 2] {
        let off = self.offsets[k].expect("element outside the space");
        let basis = basis_of(mesh.element(k));
        let g = basis.eval_grad(p);
        let n = g.len();
        let mut out = [0.0; 2];
        for (m, gm) in g.iter().enumerate() {
            let a = coeffs[off + c * n + m];
            out[0] += a * gm[0];
            out[1] += a * gm[1];
        }
        out
    }
}

/// Basis values and gradients tabulated at a rule's points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub rule: QuadratureRule,
    pub n_modes: usize,
    /// `values[q * n_modes + m]`
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn new(basis: &Basis, rule: QuadratureRule) -> Self {
        let nm = basis.len();
        let nq = rule.len();
        let mut values = vec![0.0; nq * nm];
        let mut grads = vec![[0.0; 2]; nq * nm];
        for (q, &p) in rule.points.iter().enumerate() {
            basis.eval_into(p, &mut values[q * nm..(q + 1) * nm], Some(&mut grads[q * nm..(q + 1) * nm]));
        }
        Self { rule, n_modes: nm, values, grads }
    }

    #[inline]
    pub fn phi(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_modes..(q + 1) * self.n_modes]
    }

    #[inline]
    pub fn grad(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_modes..(q + 1) * self.n_modes]
    }
}

pub fn tabulate_volume(element: &PolyElement, order: usize) -> Result<Tabulation> {
    Ok(Tabulation::new(&basis_of(element), volume_quadrature(element, order)?))
}

/// Local mass matrix `(phi_i, phi_j)_K` of the modal basis.
pub fn local_mass(tab: &Tabulation) -> DMatrix<f64> {
    let n = tab.n_modes;
    let mut m = DMatrix::zeros(n, n);
    for (q, &w) in tab.rule.weights.iter().enumerate() {
        let phi = tab.phi(q);
        for i in 0..n {
            let wi = w * phi[i];
            for j in 0..n {
                m[(i, j)] += wi * phi[j];
            }
        }
    }
    m
}

/// Element-wise L2 projection of a field with `space.components()` components.
pub fn l2_project<F>(mesh: &PolyMesh, space: &DgSpace, field: F) -> Result<Vec<f64>>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let nc = space.components();
    let locals: Vec<(usize, Vec<f64>)> = space
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| -> Result<(usize, Vec<f64>)> {
            let e = mesh.element(k);
            let tab = tabulate_volume(e, measurement_order(e.degree))?;
            let chol = local_mass(&tab).cholesky().ok_or(Error::SingularMass(k))?;
            let n = tab.n_modes;
            let mut out = vec![0.0; nc * n];
            let mut rhs = vec![DVector::zeros(n); nc];
            for (q, (&p, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                let f = field(p);
                let phi = tab.phi(q);
                for c in 0..nc {
                    for m in 0..n {
                        rhs[c][m] += w * f[c] * phi[m];
                    }
                }
            }
            for c in 0..nc {
                let sol = chol.solve(&rhs[c]);
                out[c * n..(c + 1) * n].copy_from_slice(sol.as_slice());
            }
            Ok((k, out))
        })
        .collect::<Result<_>>()?;
    let mut coeffs = vec![0.0; space.n_dofs()];
    for (k, local) in locals {
        let off = space.offset(k).unwrap();
        coeffs[off..off + local.len()].copy_from_slice(&local);
    }
    Ok(coeffs)
}
