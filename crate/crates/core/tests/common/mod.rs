//! Dense quadrature-loop reference assembly, written directly from the
//! bilinear forms with the closed-form penalty constants. Shares only the
//! basis, the quadrature rules and the dof layout with the library.
#![allow(dead_code)]

use elastoacoustic::assembly::{BoundaryPenalty, Discretization};
use elastoacoustic::fespace::{basis_of, face_quadrature, volume_quadrature};
use elastoacoustic::mesh::{FaceKind, Region};
use elastoacoustic::sparse::CsrMatrix;

pub type Dense = Vec<Vec<f64>>;

pub struct Oracle {
    pub m_e1: Dense,
    pub m_e2: Dense,
    pub m_e3: Dense,
    pub a_e: Dense,
    pub c_e: Dense,
    pub m_a: Dense,
    pub a_a: Dense,
}

fn zeros(r: usize, c: usize) -> Dense {
    vec![vec![0.0; c]; r]
}

/// Integrands are polynomials of degree <= 2p on straight pieces, so any rule
/// of order >= 2p is exact; the reference uses 2p + 3 (the assembly uses 2p + 2).
fn order(p: usize) -> usize {
    2 * p + 3
}

/// Elastic trial/test function: component `c`, mode `m`.
fn vec_dof(off: usize, n: usize, c: usize, m: usize) -> usize {
    off + c * n + m
}

pub fn oracle(d: &Discretization) -> Oracle {
    let mesh = &d.mesh;
    let (ne, na) = (d.elastic.n_dofs(), d.acoustic.n_dofs());
    let mut o = Oracle {
        m_e1: zeros(ne, ne),
        m_e2: zeros(ne, ne),
        m_e3: zeros(ne, ne),
        a_e: zeros(ne, ne),
        c_e: zeros(ne, na),
        m_a: zeros(na, na),
        a_a: zeros(na, na),
    };
    let st = d.stabilization;

    for (k, e) in mesh.elements().iter().enumerate() {
        let mat = d.materials.get(k);
        let b = basis_of(e);
        let n = b.len();
        let rule = volume_quadrature(e, order(e.degree)).unwrap();
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            let v = b.eval(p);
            let g = b.eval_grad(p);
            match e.region {
                Region::Elastic => {
                    let off = d.elastic.offset(k).unwrap();
                    for ci in 0..2 {
                        for mi in 0..n {
                            let i = vec_dof(off, n, ci, mi);
                            for cj in 0..2 {
                                for mj in 0..n {
                                    let j = vec_dof(off, n, cj, mj);
                                    if ci == cj {
                                        let vv = w * v[mi] * v[mj];
                                        o.m_e1[i][j] += mat.rho_e * vv;
                                        o.m_e2[i][j] += 2.0 * mat.rho_e * mat.zeta * vv;
                                        o.m_e3[i][j] += mat.rho_e * mat.zeta * mat.zeta * vv;
                                    }
                                    // sigma(phi_j) : eps(phi_i), phi_j = e_cj v_mj
                                    let gi = grad_tensor(ci, g[mi]);
                                    let gj = grad_tensor(cj, g[mj]);
                                    let s = stress(mat.mu, mat.lambda, gj);
                                    let eps = sym(gi);
                                    o.a_e[i][j] += w * ddot(s, eps);
                                }
                            }
                        }
                    }
                }
                Region::Acoustic => {
                    let off = d.acoustic.offset(k).unwrap();
                    for mi in 0..n {
                        for mj in 0..n {
                            o.m_a[off + mi][off + mj] += w * mat.rho_a / (mat.c * mat.c) * v[mi] * v[mj];
                            o.a_a[off + mi][off + mj] += w * mat.rho_a * (g[mi][0] * g[mj][0] + g[mi][1] * g[mj][1]);
                        }
                    }
                }
            }
        }
    }

    for (f, face) in mesh.faces().iter().enumerate() {
        let left = mesh.element(face.left);
        let right = face.right.map(|r| mesh.element(r));
        let pmax = left.degree.max(right.map_or(0, |r| r.degree));
        let rule = face_quadrature(mesh, f, order(pmax)).unwrap();
        let nrm = face.normal;
        match face.kind {
            FaceKind::Interface => {
                let ka = face.right.unwrap();
                let rho_a = d.materials.get(ka).rho_a;
                let (be, ba) = (basis_of(left), basis_of(mesh.element(ka)));
                let (oe, oa) = (d.elastic.offset(face.left).unwrap(), d.acoustic.offset(ka).unwrap());
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let (ve, va) = (be.eval(p), ba.eval(p));
                    for c in 0..2 {
                        for m in 0..be.len() {
                            for j in 0..ba.len() {
                                o.c_e[vec_dof(oe, be.len(), c, m)][oa + j] += w * rho_a * nrm[c] * ve[m] * va[j];
                            }
                        }
                    }
                }
            }
            kind => {
                let elastic = kind.is_elastic();
                // Neighbour list: (element, sign of the outward normal relative to `nrm`).
                let mut sides = vec![(face.left, 1.0)];
                if let Some(r) = face.right {
                    sides.push((r, -1.0));
                }
                let avg = if sides.len() == 2 { 0.5 } else { 1.0 };
                let local = |k: usize| {
                    let e = mesh.element(k);
                    let m = d.materials.get(k);
                    let coef = if elastic { 2.0 * m.mu + 2.0 * m.lambda } else { m.rho_a };
                    coef * (e.degree * e.degree) as f64 / e.diameter
                };
                let scale = if elastic { st.alpha } else { st.beta };
                let kappa = match face.right {
                    Some(r) => scale * local(face.left).max(local(r)),
                    None => match st.boundary {
                        BoundaryPenalty::Scaled => scale * local(face.left),
                        BoundaryPenalty::Unscaled => local(face.left),
                    },
                };
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    // Per side: (dof index, jump vector [v] n-contracted, average flux . n)
                    let mut funcs: Vec<(usize, [f64; 2], [f64; 2])> = Vec::new();
                    for &(k, sgn) in &sides {
                        let e = mesh.element(k);
                        let mat = d.materials.get(k);
                        let b = basis_of(e);
                        let (v, g) = (b.eval(p), b.eval_grad(p));
                        let n = b.len();
                        if elastic {
                            let off = d.elastic.offset(k).unwrap();
                            for c in 0..2 {
                                for m in 0..n {
                                    let mut val = [0.0; 2];
                                    val[c] = sgn * v[m];
                                    let s = stress(mat.mu, mat.lambda, grad_tensor(c, g[m]));
                                    let flux = [avg * (s[0][0] * nrm[0] + s[0][1] * nrm[1]), avg * (s[1][0] * nrm[0] + s[1][1] * nrm[1])];
                                    funcs.push((vec_dof(off, n, c, m), val, flux));
                                }
                            }
                        } else {
                            let off = d.acoustic.offset(k).unwrap();
                            for m in 0..n {
                                let flux = avg * mat.rho_a * (g[m][0] * nrm[0] + g[m][1] * nrm[1]);
                                funcs.push((off + m, [sgn * v[m], 0.0], [flux, 0.0]));
                            }
                        }
                    }
                    let target = if elastic { &mut o.a_e } else { &mut o.a_a };
                    for &(i, ji, fi) in &funcs {
                        for &(j, jj, fj) in &funcs {
                            let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
                            target[i][j] += w * (-dot(fj, ji) - dot(jj, fi) + kappa * dot(jj, ji));
                        }
                    }
                }
            }
        }
    }
    o
}

/// Gradient of `e_c v`: row `c` holds `grad v`.
fn grad_tensor(c: usize, g: [f64; 2]) -> [[f64; 2]; 2] {
    let mut t = [[0.0; 2]; 2];
    t[c] = g;
    t
}

fn sym(g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let o = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], o], [o, g[1][1]]]
}

fn stress(mu: f64, lambda: f64, g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let e = sym(g);
    let tr = e[0][0] + e[1][1];
    [[2.0 * mu * e[0][0] + lambda * tr, 2.0 * mu * e[0][1]], [2.0 * mu * e[1][0], 2.0 * mu * e[1][1] + lambda * tr]]
}

fn ddot(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// `max |A - B| / max(max |B|, tiny)`.
pub fn rel_diff(a: &CsrMatrix, b: &Dense) -> f64 {
    let ad = a.to_dense();
    let scale = b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = ad.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Acoustic-side coupling `C_a[j, i] = (rho_a v_i . n_a, psi_j)` integrated over
/// the interface from the fluid element's point of view.
pub fn acoustic_side_coupling(d: &Discretization) -> Dense {
    let mesh = &d.mesh;
    let (ne, na) = (d.elastic.n_dofs(), d.acoustic.n_dofs());
    let mut c = zeros(na, ne);
    for (f, face) in mesh.faces().iter().enumerate() {
        if face.kind != FaceKind::Interface {
            continue;
        }
        let ka = face.right.unwrap();
        let ea = mesh.element(ka);
        let mid = {
            let [a, b] = mesh.face_points(f);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        };
        // Outward from the fluid element.
        let mut n_a = [-face.normal[0], -face.normal[1]];
        if (mid[0] - ea.centroid[0]) * n_a[0] + (mid[1] - ea.centroid[1]) * n_a[1] < 0.0 {
            n_a = [-n_a[0], -n_a[1]];
        }
        let ee = mesh.element(face.left);
        let rule = face_quadrature(mesh, f, 2 * ee.degree.max(ea.degree) + 2).unwrap();
        let (be, ba) = (basis_of(ee), basis_of(ea));
        let rho_a = d.materials.get(ka).rho_a;
        let (oe, oa) = (d.elastic.offset(face.left).unwrap(), d.acoustic.offset(ka).unwrap());
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            let (ve, va) = (be.eval(p), ba.eval(p));
            for comp in 0..2 {
                let wn = w * rho_a * n_a[comp];
                for m in 0..be.len() {
                    for j in 0..ba.len() {
                        c[oa + j][vec_dof(oe, be.len(), comp, m)] += wn * ve[m] * va[j];
                    }
                }
            }
        }
    }
    c
}
