//! Norms, energies, errors against exact solutions, convergence rates and
//! numerical checks of the trace/coercivity inequalities.

mod diagnostics;
mod rates;

pub use diagnostics::{coercivity_wedge, rayleigh_quotients, verify_flux_trace_scaling, FluxTraceReport, RayleighReport};
pub use rates::{least_squares_slope, rate_table, RateRow, RateTable};

use rayon::prelude::*;

use crate::assembly::{dof_point, Discretization, SystemMatrices};
use crate::error::Result;
use crate::fespace::{basis_of, face_quadrature, measurement_order, tabulate_volume, SpaceKind};
use crate::geometry::Point;
use crate::mesh::FaceKind;
use crate::sparse::CsrMatrix;
use crate::timestepper::State;

/// Norms of one pair of fields (errors or plain values).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NormReport {
    pub dg_e: f64,
    pub dg_a: f64,
    pub l2_e: f64,
    pub l2_a: f64,
    pub t: f64,
}

/// Value and gradient of an exact elastic field.
pub type ElasticExact<'a> = &'a (dyn Fn(Point) -> ([f64; 2], [[f64; 2]; 2]) + Sync);
/// Value and gradient of an exact acoustic field.
pub type AcousticExact<'a> = &'a (dyn Fn(Point) -> (f64, [f64; 2]) + Sync);

/// Squared volume and face contributions, summed in element/face order.
fn squared_norms(
    disc: &Discretization,
    kind: SpaceKind,
    coeffs: &[f64],
    exact: &(dyn Fn(Point) -> ([f64; 2], [[f64; 2]; 2]) + Sync),
) -> Result<(f64, f64)> {
    let mesh = &disc.mesh;
    let space = disc.space(kind);
    let nc = space.components();
    let elems: Vec<usize> = space.elements().collect();
    let vols: Vec<(f64, f64)> = elems
        .par_iter()
        .map(|&k| -> Result<(f64, f64)> {
            let e = mesh.element(k);
            let tab = tabulate_volume(e, measurement_order(e.degree))?;
            let mat = disc.materials.get(k);
            let off = space.offset(k).unwrap();
            let n = tab.n_modes;
            let (mut energy, mut l2) = (0.0, 0.0);
            for (q, (&p, &w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                let (mut val, mut grad) = exact(p);
                for c in 0..nc {
                    for m in 0..n {
                        let a = coeffs[off + c * n + m];
                        let d = dof_point(kind, mat, c, tab.phi(q)[m], tab.grad(q)[m]);
                        for r in 0..2 {
                            val[r] -= a * d.value[r];
                            for s in 0..2 {
                                grad[r][s] -= a * d.grad[r][s];
                            }
                        }
                    }
                }
                l2 += w * (val[0] * val[0] + val[1] * val[1]);
                energy += w * match kind {
                    SpaceKind::VectorElastic => {
                        let eps = [
                            [grad[0][0], 0.5 * (grad[0][1] + grad[1][0])],
                            [0.5 * (grad[0][1] + grad[1][0]), grad[1][1]],
                        ];
                        let tr = eps[0][0] + eps[1][1];
                        let ee: f64 = eps.iter().flatten().map(|x| x * x).sum();
                        2.0 * mat.mu * ee + mat.lambda * tr * tr
                    }
                    SpaceKind::ScalarAcoustic => mat.rho_a * (grad[0][0] * grad[0][0] + grad[0][1] * grad[0][1]),
                };
            }
            Ok((energy, l2))
        })
        .collect::<Result<_>>()?;

    let faces: Vec<usize> = (0..mesh.faces().len())
        .filter(|&f| {
            let fk = mesh.faces()[f].kind;
            match kind {
                SpaceKind::VectorElastic => fk.is_elastic(),
                SpaceKind::ScalarAcoustic => fk.is_acoustic(),
            }
        })
        .collect();
    let jumps: Vec<f64> = faces
        .par_iter()
        .map(|&f| -> Result<f64> {
            let face = &mesh.faces()[f];
            let kappa = match face.kind {
                FaceKind::InteriorElastic | FaceKind::BoundaryElasticDirichlet => {
                    crate::assembly::stabilization_eta(mesh, f, &disc.materials, &disc.stabilization)?
                }
                _ => crate::assembly::stabilization_chi(mesh, f, &disc.materials, &disc.stabilization)?,
            };
            let pmax = face.right.map_or(0, |r| mesh.element(r).degree).max(mesh.element(face.left).degree);
            let rule = face_quadrature(mesh, f, measurement_order(pmax))?;
            let trace = |k: usize, p: Point| -> [f64; 2] {
                let b = basis_of(mesh.element(k));
                let v = b.eval(p);
                let off = space.offset(k).unwrap();
                let mut out = [0.0; 2];
                for (c, o) in out.iter_mut().enumerate().take(nc) {
                    *o = v.iter().enumerate().map(|(m, x)| x * coeffs[off + c * b.len() + m]).sum();
                }
                out
            };
            let mut s = 0.0;
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                let left = trace(face.left, p);
                // The exact field is continuous, so only boundary faces see it.
                let other = match face.right {
                    Some(r) => trace(r, p),
                    None => exact(p).0,
                };
                let j = [left[0] - other[0], left[1] - other[1]];
                s += w * kappa * (j[0] * j[0] + j[1] * j[1]);
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;

    let vol: f64 = vols.iter().map(|v| v.0).sum();
    let l2: f64 = vols.iter().map(|v| v.1).sum();
    let jump: f64 = jumps.iter().sum();
    Ok((vol + jump, l2))
}

/// dG and L2 norms of discrete fields, by quadrature.
pub fn dg_norms(disc: &Discretization, u: &[f64], phi: &[f64]) -> Result<NormReport> {
    let zero = |_: Point| ([0.0; 2], [[0.0; 2]; 2]);
    let (dge, l2e) = squared_norms(disc, SpaceKind::VectorElastic, u, &zero)?;
    let (dga, l2a) = squared_norms(disc, SpaceKind::ScalarAcoustic, phi, &zero)?;
    Ok(NormReport { dg_e: dge.sqrt(), dg_a: dga.sqrt(), l2_e: l2e.sqrt(), l2_a: l2a.sqrt(), t: 0.0 })
}

/// Norms of `exact - discrete`; jump terms carry the discrete jumps and, on
/// Dirichlet faces, the difference to the exact trace.
pub fn errors_vs_exact(
    disc: &Discretization,
    u: &[f64],
    phi: &[f64],
    exact_u: ElasticExact<'_>,
    exact_phi: AcousticExact<'_>,
    t: f64,
) -> Result<NormReport> {
    let (dge, l2e) = squared_norms(disc, SpaceKind::VectorElastic, u, exact_u)?;
    let phi_as_vec = |p: Point| {
        let (v, g) = exact_phi(p);
        ([v, 0.0], [g, [0.0; 2]])
    };
    let (dga, l2a) = squared_norms(disc, SpaceKind::ScalarAcoustic, phi, &phi_as_vec)?;
    Ok(NormReport { dg_e: dge.sqrt(), dg_a: dga.sqrt(), l2_e: l2e.sqrt(), l2_a: l2a.sqrt(), t })
}

/// Matrices entering the discrete energy.
#[derive(Debug, Clone)]
pub struct EnergyNorm {
    m_e1: CsrMatrix,
    m_e3: CsrMatrix,
    n_e: CsrMatrix,
    m_a: CsrMatrix,
    n_a: CsrMatrix,
}

/// Elastic and acoustic energies and their Euclidean combination.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Energy {
    pub elastic: f64,
    pub acoustic: f64,
    pub total: f64,
}

impl EnergyNorm {
    pub fn new(disc: &Discretization, system: &SystemMatrices) -> Result<Self> {
        let (n_e, n_a) = disc.norm_matrices()?;
        Ok(Self::from_parts(system, n_e, n_a))
    }

    pub fn from_parts(system: &SystemMatrices, n_e: CsrMatrix, n_a: CsrMatrix) -> Self {
        Self { m_e1: system.m_e1.clone(), m_e3: system.m_e3.clone(), n_e, m_a: system.m_a.clone(), n_a }
    }

    /// `E_e^2 = v'M1 v + u'M3 u + u'N_e u`, `E_a^2 = w'Ma w + phi'N_a phi`,
    /// with backward-difference velocities.
    pub fn eval(&self, state: &State) -> Energy {
        let (v, w) = state.velocities();
        let (u, phi) = (&state.u_curr, &state.phi_curr);
        let e2 = self.m_e1.bilinear(&v, &v) + self.m_e3.bilinear(u, u) + self.n_e.bilinear(u, u);
        let a2 = self.m_a.bilinear(&w, &w) + self.n_a.bilinear(phi, phi);
        Energy { elastic: e2.max(0.0).sqrt(), acoustic: a2.max(0.0).sqrt(), total: (e2 + a2).max(0.0).sqrt() }
    }
}

pub fn energy_norm(state: &State, norm: &EnergyNorm) -> f64 {
    norm.eval(state).total
}

/// `(t, E_total)` pairs from recorded samples.
pub fn energy_trace(samples: &[crate::timestepper::EnergySample]) -> Vec<(f64, f64)> {
    samples.iter().map(|s| (s.t, s.total)).collect()
}

/// Trapezoidal integral of a sampled function.
pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    ts.windows(2).zip(ys.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Material, StabilizationParams};
    use crate::fespace::l2_project;
    use crate::mesh::{classify_faces, generate_mesh, tests::two_rectangles, MeshParams};

    fn rock() -> Material {
        Material { rho_e: 2.7, lambda: 51.20, mu: 26.29, zeta: 0.0, rho_a: 1.0, c: 1.0 }
    }

    fn disc(n: usize, p: usize) -> Discretization {
        let mut mesh = generate_mesh(&MeshParams::unit_bidomain(n, n, 12)).unwrap();
        mesh.set_uniform_degree(p);
        Discretization::uniform(mesh, rock(), StabilizationParams::default()).unwrap()
    }

    #[test]
    fn zero_fields_have_zero_norms() {
        let d = disc(4, 1);
        let r = dg_norms(&d, &vec![0.0; d.elastic.n_dofs()], &vec![0.0; d.acoustic.n_dofs()]).unwrap();
        assert_eq!(r, NormReport::default());
    }

    #[test]
    fn gradient_of_x_on_the_acoustic_square() {
        let d = Discretization::uniform(classify_faces(&two_rectangles()).unwrap(), rock(), StabilizationParams::default()).unwrap();
        let x = l2_project(&d.mesh, &d.acoustic, |p| [p[0], 0.0]).unwrap();
        let (vol, _) = squared_norms(&d, SpaceKind::ScalarAcoustic, &x, &|_| ([0.0; 2], [[0.0; 2]; 2])).unwrap();
        let (_, n_a) = d.norm_matrices().unwrap();
        // Volume part is 1; the rest is the boundary penalty on the trace of x.
        let vol_only = d.form(SpaceKind::ScalarAcoustic, crate::assembly::FormParts::VOLUME).unwrap();
        assert!((vol_only.bilinear(&x, &x) - 1.0).abs() < 1e-12);
        assert!((n_a.bilinear(&x, &x) - vol).abs() < 1e-10 * vol);
    }

    #[test]
    fn continuous_fields_have_no_interior_jumps() {
        let d = disc(5, 2);
        let u = l2_project(&d.mesh, &d.elastic, |p| [p[0] * p[1], 1.0 - p[1] * p[1]]).unwrap();
        let pen = d.form(SpaceKind::VectorElastic, crate::assembly::FormParts::PENALTY).unwrap();
        // Only boundary faces remain: compare against the same field with exact boundary data.
        let exact = |p: Point| ([p[0] * p[1], 1.0 - p[1] * p[1]], [[p[1], p[0]], [0.0, -2.0 * p[1]]]);
        let (err, l2) = squared_norms(&d, SpaceKind::VectorElastic, &u, &exact).unwrap();
        assert!(err < 1e-18 && l2 < 1e-24, "{err} {l2}");
        assert!(pen.bilinear(&u, &u) > 0.0);
    }

    #[test]
    fn norm_matrices_match_quadrature() {
        let d = disc(4, 2);
        let (n_e, n_a) = d.norm_matrices().unwrap();
        let u: Vec<f64> = (0..d.elastic.n_dofs()).map(|i| ((i * 7) % 11) as f64 / 11.0 - 0.5).collect();
        let phi: Vec<f64> = (0..d.acoustic.n_dofs()).map(|i| ((i * 5) % 13) as f64 / 13.0 - 0.5).collect();
        let r = dg_norms(&d, &u, &phi).unwrap();
        assert!((n_e.bilinear(&u, &u).sqrt() - r.dg_e).abs() < 1e-10 * r.dg_e);
        assert!((n_a.bilinear(&phi, &phi).sqrt() - r.dg_a).abs() < 1e-10 * r.dg_a);
    }

    #[test]
    fn energy_splits_into_subdomain_parts() {
        let d = disc(4, 1);
        let sys = d.system().unwrap();
        let norm = EnergyNorm::new(&d, &sys).unwrap();
        let mut s = State::zero(d.elastic.n_dofs(), d.acoustic.n_dofs(), 0.01);
        assert_eq!(norm.eval(&s).total, 0.0);
        s.u_curr.iter_mut().enumerate().for_each(|(i, v)| *v = (i as f64).sin());
        s.phi_prev.iter_mut().enumerate().for_each(|(i, v)| *v = (i as f64).cos());
        let e = norm.eval(&s);
        assert!((e.total.powi(2) - e.elastic.powi(2) - e.acoustic.powi(2)).abs() < 1e-12 * e.total.powi(2));
    }
}
