use rayon::prelude::*;

use super::material::{face_penalty, Material, MaterialMap, StabilizationParams};
use crate::error::Result;
use crate::fespace::{assembly_order, basis_of, face_quadrature, local_mass, tabulate_volume, DgSpace, SpaceKind};
use crate::mesh::{FaceKind, PolyMesh};
use crate::sparse::CsrMatrix;

type Entries = Vec<(usize, usize, f64)>;

/// Weights of the pieces of a symmetric dG bilinear form.
///
/// With `F` the flux (`sigma(u)` or `rho_a grad phi`), `[.]` the jump and
/// `{.}` the average, the form is
/// `volume (F(u), grad v) - consistency (<{F(u)}, [v]> + <[u], {F(v)}>)
///  + penalty <kappa [u], [v]> + flux_gram <kappa^-1 {F(u)}, {F(v)}>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormParts {
    pub volume: f64,
    pub consistency: f64,
    pub penalty: f64,
    pub flux_gram: f64,
}

impl FormParts {
    pub const SIPG: Self = Self { volume: 1.0, consistency: 1.0, penalty: 1.0, flux_gram: 0.0 };
    pub const DG_NORM: Self = Self { volume: 1.0, consistency: 0.0, penalty: 1.0, flux_gram: 0.0 };
    pub const VOLUME: Self = Self { volume: 1.0, consistency: 0.0, penalty: 0.0, flux_gram: 0.0 };
    pub const CONSISTENCY: Self = Self { volume: 0.0, consistency: 1.0, penalty: 0.0, flux_gram: 0.0 };
    pub const PENALTY: Self = Self { volume: 0.0, consistency: 0.0, penalty: 1.0, flux_gram: 0.0 };
    pub const FLUX_GRAM: Self = Self { volume: 0.0, consistency: 0.0, penalty: 0.0, flux_gram: 1.0 };

    fn has_faces(&self) -> bool {
        self.consistency != 0.0 || self.penalty != 0.0 || self.flux_gram != 0.0
    }
}

/// Value, gradient and flux of one vector-valued basis function at a point.
/// Scalar fields use the first component / first row only.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DofPoint {
    pub value: [f64; 2],
    pub grad: [[f64; 2]; 2],
    pub flux: [[f64; 2]; 2],
}

/// Basis function `e_c phi` (elastic) or `phi` (acoustic, `c = 0`) with gradient `g`.
pub fn dof_point(kind: SpaceKind, mat: &Material, c: usize, phi: f64, g: [f64; 2]) -> DofPoint {
    let mut d = DofPoint::default();
    match kind {
        SpaceKind::VectorElastic => {
            d.value[c] = phi;
            d.grad[c] = g;
            for a in 0..2 {
                for b in 0..2 {
                    d.flux[a][b] = mat.mu * (d.grad[a][b] + d.grad[b][a]);
                }
                d.flux[a][a] += mat.lambda * g[c];
            }
        }
        SpaceKind::ScalarAcoustic => {
            d.value[0] = phi;
            d.grad[0] = g;
            d.flux[0] = [mat.rho_a * g[0], mat.rho_a * g[1]];
        }
    }
    d
}

#[inline]
fn frob(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn mat_vec(a: &[[f64; 2]; 2], n: [f64; 2]) -> [f64; 2] {
    [a[0][0] * n[0] + a[0][1] * n[1], a[1][0] * n[0] + a[1][1] * n[1]]
}

/// All local dofs of an element evaluated from basis values/gradients at one point.
pub(crate) fn element_dofs(
    kind: SpaceKind,
    mat: &Material,
    phi: &[f64],
    grads: &[[f64; 2]],
    out: &mut Vec<DofPoint>,
) {
    out.clear();
    for c in 0..kind.components() {
        for (m, &g) in grads.iter().enumerate() {
            out.push(dof_point(kind, mat, c, phi[m], g));
        }
    }
}

pub(crate) fn face_belongs(kind: SpaceKind, fk: FaceKind) -> bool {
    match kind {
        SpaceKind::VectorElastic => fk.is_elastic(),
        SpaceKind::ScalarAcoustic => fk.is_acoustic(),
    }
}

fn volume_entries(mesh: &PolyMesh, space: &DgSpace, mats: &MaterialMap, k: usize, w_vol: f64) -> Result<Entries> {
    let e = mesh.element(k);
    let off = space.offset(k).unwrap();
    let tab = tabulate_volume(e, assembly_order(e.degree))?;
    let kind = space.kind();
    let nd = space.local_dofs(k);
    let mut local = vec![0.0; nd * nd];
    let mut pts = Vec::with_capacity(nd);
    for (q, &w) in tab.rule.weights.iter().enumerate() {
        element_dofs(kind, mats.get(k), tab.phi(q), tab.grad(q), &mut pts);
        for i in 0..nd {
            let gi = &pts[i].grad;
            for j in 0..nd {
                local[i * nd + j] += w * frob(&pts[j].flux, gi);
            }
        }
    }
    let mut out = Vec::with_capacity(nd * nd);
    for i in 0..nd {
        for j in 0..nd {
            out.push((off + i, off + j, w_vol * local[i * nd + j]));
        }
    }
    Ok(out)
}

fn face_entries(
    mesh: &PolyMesh,
    space: &DgSpace,
    mats: &MaterialMap,
    stab: &StabilizationParams,
    f: usize,
    parts: FormParts,
) -> Result<Entries> {
    let face = &mesh.faces()[f];
    let kind = space.kind();
    let kappa = face_penalty(mesh, f, mats, stab)?;
    let mut sides = vec![(face.left, 1.0)];
    if let Some(r) = face.right {
        sides.push((r, -1.0));
    }
    let avg = if face.right.is_some() { 0.5 } else { 1.0 };
    let pmax = sides.iter().map(|&(k, _)| mesh.element(k).degree).max().unwrap();
    let rule = face_quadrature(mesh, f, assembly_order(pmax))?;
    let n = face.normal;

    let mut dofs = Vec::new();
    for &(k, _) in &sides {
        let off = space.offset(k).unwrap();
        dofs.extend(off..off + space.local_dofs(k));
    }
    let nd = dofs.len();
    let mut local = vec![0.0; nd * nd];
    // Per quadrature point: signed value (jump), averaged traction, averaged flux.
    let mut jump = vec![[0.0; 2]; nd];
    let mut trac = vec![[0.0; 2]; nd];
    let mut flux = vec![[[0.0; 2]; 2]; nd];
    let bases: Vec<_> = sides.iter().map(|&(k, _)| basis_of(mesh.element(k))).collect();
    let mut pts = Vec::new();
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        let mut at = 0;
        for (s, &(k, sign)) in sides.iter().enumerate() {
            let b = &bases[s];
            let mut vals = vec![0.0; b.len()];
            let mut grads = vec![[0.0; 2]; b.len()];
            b.eval_into(p, &mut vals, Some(&mut grads));
            element_dofs(kind, mats.get(k), &vals, &grads, &mut pts);
            for d in &pts {
                jump[at] = [sign * d.value[0], sign * d.value[1]];
                let fl = [
                    [avg * d.flux[0][0], avg * d.flux[0][1]],
                    [avg * d.flux[1][0], avg * d.flux[1][1]],
                ];
                trac[at] = mat_vec(&fl, n);
                flux[at] = fl;
                at += 1;
            }
        }
        for i in 0..nd {
            for j in 0..nd {
                let mut v = 0.0;
                if parts.consistency != 0.0 {
                    v -= parts.consistency * (dot(trac[j], jump[i]) + dot(jump[j], trac[i]));
                }
                if parts.penalty != 0.0 {
                    v += parts.penalty * kappa * dot(jump[j], jump[i]);
                }
                if parts.flux_gram != 0.0 {
                    v += parts.flux_gram / kappa * frob(&flux[j], &flux[i]);
                }
                local[i * nd + j] += w * v;
            }
        }
    }
    let mut out = Vec::with_capacity(nd * nd);
    for i in 0..nd {
        for j in 0..nd {
            out.push((dofs[i], dofs[j], local[i * nd + j]));
        }
    }
    Ok(out)
}

/// Assembles the weighted combination of dG terms described by `parts` on one space.
/// Interface faces never contribute.
pub fn assemble_form(
    mesh: &PolyMesh,
    space: &DgSpace,
    mats: &MaterialMap,
    stab: &StabilizationParams,
    parts: FormParts,
) -> Result<CsrMatrix> {
    let n = space.n_dofs();
    let mut entries: Entries = Vec::new();
    if parts.volume != 0.0 {
        let elems: Vec<usize> = space.elements().collect();
        let chunks: Vec<Entries> = elems
            .par_iter()
            .map(|&k| volume_entries(mesh, space, mats, k, parts.volume))
            .collect::<Result<_>>()?;
        entries.extend(chunks.into_iter().flatten());
    }
    if parts.has_faces() {
        let faces: Vec<usize> = (0..mesh.faces().len())
            .filter(|&f| face_belongs(space.kind(), mesh.faces()[f].kind))
            .collect();
        let chunks: Vec<Entries> = faces
            .par_iter()
            .map(|&f| face_entries(mesh, space, mats, stab, f, parts))
            .collect::<Result<_>>()?;
        entries.extend(chunks.into_iter().flatten());
    }
    Ok(CsrMatrix::from_triplets(n, n, entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassKind {
    /// `(rho_e u, v)`
    ElasticDensity,
    /// `(2 rho_e zeta u, v)`
    ElasticDamping,
    /// `(rho_e zeta^2 u, v)`
    ElasticDampingSquared,
    /// `(c^-2 rho_a phi, psi)`
    Acoustic,
}

impl MassKind {
    fn coefficient(self, m: &Material) -> f64 {
        match self {
            MassKind::ElasticDensity => m.rho_e,
            MassKind::ElasticDamping => 2.0 * m.rho_e * m.zeta,
            MassKind::ElasticDampingSquared => m.rho_e * m.zeta * m.zeta,
            MassKind::Acoustic => m.rho_a / (m.c * m.c),
        }
    }
}

/// Block-diagonal weighted mass matrix. Elements with a zero coefficient store nothing.
pub fn assemble_mass(mesh: &PolyMesh, space: &DgSpace, mats: &MaterialMap, which: MassKind) -> Result<CsrMatrix> {
    let n = space.n_dofs();
    let elems: Vec<usize> = space.elements().collect();
    let chunks: Vec<Entries> = elems
        .par_iter()
        .map(|&k| -> Result<Entries> {
            let coef = which.coefficient(mats.get(k));
            if coef == 0.0 {
                return Ok(Vec::new());
            }
            let e = mesh.element(k);
            let m = local_mass(&tabulate_volume(e, assembly_order(e.degree))?);
            let off = space.offset(k).unwrap();
            let nm = m.nrows();
            let mut out = Vec::with_capacity(space.components() * nm * nm);
            for c in 0..space.components() {
                let base = off + c * nm;
                for i in 0..nm {
                    for j in 0..nm {
                        out.push((base + i, base + j, coef * m[(i, j)]));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(CsrMatrix::from_triplets(n, n, chunks.into_iter().flatten().collect()))
}

/// `C_e[i, j] = int_{Gamma_I} rho_a psi_j (n_e . v_i)`, with `n_e` pointing out of the solid.
pub fn assemble_coupling(mesh: &PolyMesh, elastic: &DgSpace, acoustic: &DgSpace, mats: &MaterialMap) -> Result<CsrMatrix> {
    let faces: Vec<usize> = (0..mesh.faces().len()).filter(|&f| mesh.faces()[f].kind == FaceKind::Interface).collect();
    let chunks: Vec<Entries> = faces
        .par_iter()
        .map(|&f| -> Result<Entries> {
            let face = &mesh.faces()[f];
            let (ke, ka) = (face.left, face.right.expect("interface face without acoustic neighbour"));
            let (ee, ea) = (mesh.element(ke), mesh.element(ka));
            let rule = face_quadrature(mesh, f, assembly_order(ee.degree.max(ea.degree)))?;
            let (be, ba) = (basis_of(ee), basis_of(ea));
            let (ne, na) = (be.len(), ba.len());
            let rho_a = mats.get(ka).rho_a;
            let mut local = vec![0.0; 2 * ne * na];
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                let (ve, va) = (be.eval(p), ba.eval(p));
                for c in 0..2 {
                    let wn = w * rho_a * face.normal[c];
                    for m in 0..ne {
                        for j in 0..na {
                            local[(c * ne + m) * na + j] += wn * ve[m] * va[j];
                        }
                    }
                }
            }
            let (oe, oa) = (elastic.offset(ke).unwrap(), acoustic.offset(ka).unwrap());
            let mut out = Vec::with_capacity(local.len());
            for i in 0..2 * ne {
                for j in 0..na {
                    out.push((oe + i, oa + j, local[i * na + j]));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(CsrMatrix::from_triplets(
        elastic.n_dofs(),
        acoustic.n_dofs(),
        chunks.into_iter().flatten().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Discretization, StabilizationParams};
    use crate::fespace::{l2_project, SpaceKind::*};
    use crate::mesh::{classify_faces, generate_mesh, tests::two_rectangles, MeshParams, Region};

    fn rock() -> Material {
        Material { rho_e: 2.7, lambda: 51.20, mu: 26.29, zeta: 0.0, rho_a: 1.0, c: 1.0 }
    }

    fn disc(mesh: PolyMesh) -> Discretization {
        Discretization::uniform(mesh, rock(), StabilizationParams::default()).unwrap()
    }

    #[test]
    fn rigid_motions_are_in_the_volume_kernel() {
        let d = disc(generate_mesh(&MeshParams::unit_bidomain(3, 3, 2)).unwrap());
        let vol = d.form(VectorElastic, FormParts::VOLUME).unwrap();
        for field in [|_: [f64; 2]| [1.0, 0.0], |_: [f64; 2]| [0.0, 1.0], |p: [f64; 2]| [-p[1], p[0]]] {
            let v = l2_project(&d.mesh, &d.elastic, field).unwrap();
            assert!(vol.bilinear(&v, &v).abs() < 1e-12);
        }
        // With every term the rigid rotation is no longer free.
        let a = d.form(VectorElastic, FormParts::SIPG).unwrap();
        let v = l2_project(&d.mesh, &d.elastic, |p| [-p[1], p[0]]).unwrap();
        assert!(a.bilinear(&v, &v) > 1.0);
    }

    #[test]
    fn constants_are_in_the_acoustic_kernel_without_boundary() {
        let d = disc(generate_mesh(&MeshParams::unit_bidomain(4, 6, 3)).unwrap());
        let one = l2_project(&d.mesh, &d.acoustic, |_| [1.0, 0.0]).unwrap();
        let parts = [FormParts::VOLUME, FormParts::CONSISTENCY, FormParts::PENALTY];
        // Interior faces see zero jumps; boundary faces do not.
        let interior = |parts| {
            let m = d.form(ScalarAcoustic, parts).unwrap();
            m.bilinear(&one, &one)
        };
        assert!(interior(parts[0]).abs() < 1e-12);
        assert!(interior(parts[2]) > 0.0);
    }

    #[test]
    fn linear_field_on_a_square() {
        let mut mesh = classify_faces(&two_rectangles()).unwrap();
        mesh.set_uniform_degree(1);
        let d = disc(mesh);
        let x = l2_project(&d.mesh, &d.acoustic, |p| [p[0], 0.0]).unwrap();
        let vol = d.form(ScalarAcoustic, FormParts::VOLUME).unwrap();
        assert!((vol.bilinear(&x, &x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stiffness_matrices_are_symmetric() {
        let mut mesh = generate_mesh(&MeshParams::unit_bidomain(6, 6, 4)).unwrap();
        mesh.set_region_degree(Region::Elastic, 2);
        mesh.set_region_degree(Region::Acoustic, 3);
        let s = disc(mesh).system().unwrap();
        for a in [&s.a_e, &s.a_a, &s.m_e1, &s.m_a] {
            assert!(a.asymmetry() <= 1e-12 * a.max_abs());
        }
        assert_eq!(s.m_e2.nnz(), 0);
        assert_eq!(s.m_e3.nnz(), 0);
    }

    #[test]
    fn coupling_on_two_rectangles() {
        let mut mesh = classify_faces(&two_rectangles()).unwrap();
        mesh.set_uniform_degree(1);
        let d = disc(mesh);
        let s = d.system().unwrap();
        // Constant modes are 1/sqrt(area) = 1 on unit squares; the face has length 1.
        assert!((s.c_e.get(0, 0) - 1.0).abs() < 1e-14);
        // y-component rows vanish since n_e = (1, 0).
        let n = 3;
        for i in n..2 * n {
            assert!(s.c_e.row(i).1.iter().all(|&v| v == 0.0));
        }
        let ct = s.c_e.transpose();
        let sum = CsrMatrix::linear_combination(1.0, &s.c_a(), 1.0, &ct);
        assert_eq!(sum.max_abs(), 0.0);
    }

    #[test]
    fn mass_scales_with_density() {
        let mut mesh = classify_faces(&two_rectangles()).unwrap();
        mesh.set_uniform_degree(1);
        let d = disc(mesh);
        let s = d.system().unwrap();
        assert!((s.m_e1.get(0, 0) - 2.7).abs() < 1e-14);
        let one = l2_project(&d.mesh, &d.acoustic, |_| [1.0, 0.0]).unwrap();
        assert!((s.m_a.bilinear(&one, &one) - 1.0).abs() < 1e-12);
    }
}
