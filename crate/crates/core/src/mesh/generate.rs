//! Clipped-Voronoi polygonal mesh generation with Lloyd relaxation.
//!
//! Each subdomain is meshed on its own, so no cell ever crosses the interface
//! line. Traces of the two subdomain meshes on the interface generally do not
//! share vertices; [`classify_faces`](super::classify_faces) splits those
//! edges so each interface face has exactly one neighbour per side.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{classify_faces, DomainBox, PolyMesh, RawElement, RawMesh, Region};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct MeshParams {
    pub domain: DomainBox,
    pub interface_x: f64,
    pub n_elastic: usize,
    pub n_acoustic: usize,
    pub lloyd_iterations: usize,
    pub seed: u64,
    pub degree: usize,
    /// Build the lower half in y and mirror it, giving a mesh symmetric about
    /// the horizontal mid-line. Each subdomain then gets `2 * ceil(n / 2)` cells.
    pub mirror_y: bool,
}

impl MeshParams {
    /// The rectangle (-1, 1) x (0, 1) with the interface at x = 0.
    pub fn unit_bidomain(n_elastic: usize, n_acoustic: usize, seed: u64) -> Self {
        Self {
            domain: DomainBox::new(-1.0, 1.0, 0.0, 1.0),
            interface_x: 0.0,
            n_elastic,
            n_acoustic,
            lloyd_iterations: 100,
            seed,
            degree: 1,
            mirror_y: false,
        }
    }
}

pub fn generate_mesh(params: &MeshParams) -> Result<PolyMesh> {
    let d = params.domain;
    if params.n_elastic == 0 || params.n_acoustic == 0 {
        return Err(Error::MeshGeneration("each subdomain needs at least one cell".into()));
    }
    if !(params.interface_x > d.x_min && params.interface_x < d.x_max) || !(d.y_max > d.y_min) {
        return Err(Error::MeshGeneration(format!(
            "interface x = {} is not strictly inside ({}, {})",
            params.interface_x, d.x_min, d.x_max
        )));
    }
    if params.degree == 0 {
        return Err(Error::MeshGeneration("polynomial degree must be >= 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let y_mid = 0.5 * (d.y_min + d.y_max);
    let y_top = if params.mirror_y { y_mid } else { d.y_max };
    let boxes = [
        (Region::Elastic, params.n_elastic, [d.x_min, params.interface_x, d.y_min, y_top]),
        (Region::Acoustic, params.n_acoustic, [params.interface_x, d.x_max, d.y_min, y_top]),
    ];

    let mut cells: Vec<(Region, Vec<Point>)> = Vec::new();
    for (region, n, bx) in boxes {
        let n = if params.mirror_y { n.div_ceil(2) } else { n };
        let mut seeds: Vec<Point> = (0..n)
            .map(|_| [rng.random_range(bx[0]..bx[1]), rng.random_range(bx[2]..bx[3])])
            .collect();
        let mut polys = voronoi_cells(&seeds, bx)?;
        for _ in 0..params.lloyd_iterations {
            seeds = polys.iter().map(|p| geometry::centroid(p)).collect();
            polys = voronoi_cells(&seeds, bx)?;
        }
        let mean = (bx[1] - bx[0]) * (bx[3] - bx[2]) / n as f64;
        for (i, p) in polys.iter().enumerate() {
            let a = geometry::signed_area(p);
            if !(a > 1e-12 * mean) {
                return Err(Error::MeshGeneration(format!(
                    "degenerate Voronoi cell {i} in the {region:?} subdomain (area {a:e})"
                )));
            }
        }
        let mirrored: Vec<Vec<Point>> = if params.mirror_y {
            polys
                .iter()
                .map(|p| p.iter().rev().map(|q| [q[0], (d.y_min + d.y_max) - q[1]]).collect())
                .collect()
        } else {
            Vec::new()
        };
        cells.extend(polys.into_iter().map(|p| (region, p)));
        cells.extend(mirrored.into_iter().map(|p| (region, p)));
    }

    let raw = weld(&cells, d, params.interface_x, params.degree)?;
    classify_faces(&raw)
}

/// Voronoi cells of `seeds` clipped to the box `[x0, x1, y0, y1]`.
fn voronoi_cells(seeds: &[Point], bx: [f64; 4]) -> Result<Vec<Vec<Point>>> {
    let n = seeds.len();
    let (w, h) = (bx[1] - bx[0], bx[3] - bx[2]);
    let cell = ((w * h) / n as f64).sqrt().max(1e-300);
    let (gx, gy) = (((w / cell).ceil() as usize).max(1), ((h / cell).ceil() as usize).max(1));
    let key = |p: Point| -> (usize, usize) {
        (
            (((p[0] - bx[0]) / cell) as usize).min(gx - 1),
            (((p[1] - bx[2]) / cell) as usize).min(gy - 1),
        )
    };
    let mut grid = vec![Vec::new(); gx * gy];
    for (i, &s) in seeds.iter().enumerate() {
        let (a, b) = key(s);
        grid[b * gx + a].push(i);
    }
    let square = vec![[bx[0], bx[2]], [bx[1], bx[2]], [bx[1], bx[3]], [bx[0], bx[3]]];

    let mut out = Vec::with_capacity(n);
    for (i, &s) in seeds.iter().enumerate() {
        let mut poly = square.clone();
        let (ci, cj) = key(s);
        let mut ring = 0usize;
        loop {
            // Visit buckets on the square ring at Chebyshev distance `ring`.
            let (i0, i1) = (ci as isize - ring as isize, ci as isize + ring as isize);
            let (j0, j1) = (cj as isize - ring as isize, cj as isize + ring as isize);
            let mut any_bucket = false;
            for bj in j0..=j1 {
                for bi in i0..=i1 {
                    if bi != i0 && bi != i1 && bj != j0 && bj != j1 {
                        continue;
                    }
                    if bi < 0 || bj < 0 || bi as usize >= gx || bj as usize >= gy {
                        continue;
                    }
                    any_bucket = true;
                    for &j in &grid[bj as usize * gx + bi as usize] {
                        if j == i {
                            continue;
                        }
                        let t = seeds[j];
                        if t == s {
                            return Err(Error::MeshGeneration(format!(
                                "Voronoi seeds {i} and {j} coincide"
                            )));
                        }
                        let mid = [0.5 * (s[0] + t[0]), 0.5 * (s[1] + t[1])];
                        poly = geometry::clip_half_plane(&poly, mid, geometry::sub(t, s));
                    }
                }
            }
            // Any seed beyond this ring is at least `ring * cell` away; it can only
            // cut the cell if that is less than twice the cell's radius.
            let radius = poly.iter().map(|&p| geometry::dist(p, s)).fold(0.0, f64::max);
            if !any_bucket || ring as f64 * cell > 2.0 * radius {
                break;
            }
            ring += 1;
        }
        if poly.len() < 3 {
            return Err(Error::MeshGeneration(format!("degenerate Voronoi cell {i}")));
        }
        out.push(poly);
    }
    Ok(out)
}

/// Merges coincident cell vertices into a shared vertex list and snaps vertices
/// close to the box sides or the interface line onto them.
fn weld(cells: &[(Region, Vec<Point>)], d: DomainBox, interface_x: f64, degree: usize) -> Result<RawMesh> {
    let tol = 1e-10 * d.diagonal();
    let cell = tol * 4.0;
    let key = |p: Point| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut elements = Vec::with_capacity(cells.len());

    let snap = |mut p: Point| -> Point {
        for x in [d.x_min, d.x_max, interface_x] {
            if (p[0] - x).abs() <= tol {
                p[0] = x;
            }
        }
        for y in [d.y_min, d.y_max] {
            if (p[1] - y).abs() <= tol {
                p[1] = y;
            }
        }
        p
    };

    for (k, (region, poly)) in cells.iter().enumerate() {
        let mut ids = Vec::with_capacity(poly.len());
        for &p in poly {
            let p = snap(p);
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &v in list {
                            if geometry::dist(vertices[v], p) <= tol {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                grid.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            ids.push(id);
        }
        ids.dedup();
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() < 3 {
            return Err(Error::MeshGeneration(format!("cell {k} collapsed while merging vertices")));
        }
        elements.push(RawElement { vertex_ids: ids, region: *region, degree });
    }
    Ok(RawMesh { vertices, elements, domain: d, interface_x })
}
