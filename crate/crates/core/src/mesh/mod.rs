//! Interface-compliant polygonal meshes of a rectangular elastic/acoustic bi-domain.
//!
//! A [`PolyMesh`] is built from a [`RawMesh`] (vertices plus counter-clockwise
//! element vertex loops) by [`classify_faces`]. Construction splits element
//! edges at every vertex lying on them, so hanging nodes are handled by
//! treating each resulting straight piece as a face shared by exactly two
//! elements (or one on the domain boundary).

mod generate;
mod io;
mod quality;
mod subtriangulate;

pub use generate::{generate_mesh, MeshParams};
pub use io::{format_mesh, parse_mesh, read_mesh, write_mesh};
pub use quality::{quality_report, QualityReport};
pub use subtriangulate::subtriangulate;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Elastic,
    Acoustic,
}

impl Region {
    pub fn tag(self) -> char {
        match self {
            Region::Elastic => 'e',
            Region::Acoustic => 'a',
        }
    }

    pub fn other(self) -> Region {
        match self {
            Region::Elastic => Region::Acoustic,
            Region::Acoustic => Region::Elastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceKind {
    InteriorElastic,
    InteriorAcoustic,
    BoundaryElasticDirichlet,
    BoundaryAcousticDirichlet,
    Interface,
}

impl FaceKind {
    pub fn is_boundary(self) -> bool {
        matches!(self, FaceKind::BoundaryElasticDirichlet | FaceKind::BoundaryAcousticDirichlet)
    }

    pub fn is_elastic(self) -> bool {
        matches!(self, FaceKind::InteriorElastic | FaceKind::BoundaryElasticDirichlet)
    }

    pub fn is_acoustic(self) -> bool {
        matches!(self, FaceKind::InteriorAcoustic | FaceKind::BoundaryAcousticDirichlet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl DomainBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn diagonal(&self) -> f64 {
        (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        (p[0] - self.x_min).abs() <= tol
            || (p[0] - self.x_max).abs() <= tol
            || (p[1] - self.y_min).abs() <= tol
            || (p[1] - self.y_max).abs() <= tol
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p[0] >= self.x_min - tol
            && p[0] <= self.x_max + tol
            && p[1] >= self.y_min - tol
            && p[1] <= self.y_max + tol
    }
}

/// Unprocessed element description: a counter-clockwise vertex loop plus tags.
#[derive(Debug, Clone, PartialEq)]
pub struct RawElement {
    pub vertex_ids: Vec<usize>,
    pub region: Region,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<Point>,
    pub elements: Vec<RawElement>,
    pub domain: DomainBox,
    pub interface_x: f64,
}

#[derive(Debug, Clone)]
pub struct PolyElement {
    pub vertex_ids: Vec<usize>,
    pub region: Region,
    pub degree: usize,
    pub area: f64,
    /// h_K: largest distance between two vertices.
    pub diameter: f64,
    pub centroid: Point,
    /// `[x_min, x_max, y_min, y_max]`
    pub bbox: [f64; 4],
    pub subtriangles: Vec<[Point; 3]>,
    /// Faces of this element in boundary order.
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Endpoints, ordered counter-clockwise with respect to `left`.
    pub endpoints: [usize; 2],
    pub kind: FaceKind,
    /// For interface faces this is always the elastic element.
    pub left: usize,
    pub right: Option<usize>,
    /// Unit normal pointing out of `left`.
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaceCounts {
    pub interior_elastic: usize,
    pub interior_acoustic: usize,
    pub boundary_elastic: usize,
    pub boundary_acoustic: usize,
    pub interface: usize,
}

impl FaceCounts {
    pub fn total(&self) -> usize {
        self.interior_elastic
            + self.interior_acoustic
            + self.boundary_elastic
            + self.boundary_acoustic
            + self.interface
    }
}

impl fmt::Display for FaceCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "interior_elastic={} interior_acoustic={} boundary_elastic={} boundary_acoustic={} interface={}",
            self.interior_elastic,
            self.interior_acoustic,
            self.boundary_elastic,
            self.boundary_acoustic,
            self.interface
        )
    }
}

#[derive(Debug, Clone)]
pub struct PolyMesh {
    vertices: Vec<Point>,
    elements: Vec<PolyElement>,
    faces: Vec<Face>,
    domain: DomainBox,
    interface_x: f64,
}

impl PolyMesh {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[PolyElement] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &PolyElement {
        &self.elements[k]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn domain(&self) -> DomainBox {
        self.domain
    }

    pub fn interface_x(&self) -> f64 {
        self.interface_x
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Vertex coordinates of element `k` in counter-clockwise order.
    pub fn polygon(&self, k: usize) -> Vec<Point> {
        self.elements[k].vertex_ids.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn face_points(&self, f: usize) -> [Point; 2] {
        let e = self.faces[f].endpoints;
        [self.vertices[e[0]], self.vertices[e[1]]]
    }

    /// Largest element diameter.
    pub fn h_max(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    pub fn region_elements(&self, region: Region) -> impl Iterator<Item = usize> + '_ {
        self.elements
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.region == region)
            .map(|(k, _)| k)
    }

    pub fn region_area(&self, region: Region) -> f64 {
        self.elements.iter().filter(|e| e.region == region).map(|e| e.area).sum()
    }

    pub fn face_counts(&self) -> FaceCounts {
        let mut c = FaceCounts::default();
        for f in &self.faces {
            match f.kind {
                FaceKind::InteriorElastic => c.interior_elastic += 1,
                FaceKind::InteriorAcoustic => c.interior_acoustic += 1,
                FaceKind::BoundaryElasticDirichlet => c.boundary_elastic += 1,
                FaceKind::BoundaryAcousticDirichlet => c.boundary_acoustic += 1,
                FaceKind::Interface => c.interface += 1,
            }
        }
        c
    }

    /// Sets the polynomial degree of every element in `region`.
    pub fn set_region_degree(&mut self, region: Region, degree: usize) {
        for e in self.elements.iter_mut().filter(|e| e.region == region) {
            e.degree = degree;
        }
    }

    pub fn set_uniform_degree(&mut self, degree: usize) {
        for e in &mut self.elements {
            e.degree = degree;
        }
    }

    pub fn set_degree(&mut self, k: usize, degree: usize) {
        self.elements[k].degree = degree;
    }

    pub fn max_degree(&self) -> usize {
        self.elements.iter().map(|e| e.degree).max().unwrap_or(0)
    }

    /// Element containing `p`, if any (first match for points on shared edges).
    pub fn locate(&self, p: Point) -> Option<usize> {
        let tol = 1e-12 * self.domain.diagonal();
        self.elements.iter().position(|e| {
            p[0] >= e.bbox[0] - tol
                && p[0] <= e.bbox[1] + tol
                && p[1] >= e.bbox[2] - tol
                && p[1] <= e.bbox[3] + tol
                && geometry::contains(
                    &e.vertex_ids.iter().map(|&v| self.vertices[v]).collect::<Vec<_>>(),
                    p,
                    tol,
                )
        })
    }

    /// The raw description this mesh was built from (after edge splitting).
    pub fn to_raw(&self) -> RawMesh {
        RawMesh {
            vertices: self.vertices.clone(),
            elements: self
                .elements
                .iter()
                .map(|e| RawElement {
                    vertex_ids: e.vertex_ids.clone(),
                    region: e.region,
                    degree: e.degree,
                })
                .collect(),
            domain: self.domain,
            interface_x: self.interface_x,
        }
    }

    /// Mirror image across the interface line with elastic and acoustic tags swapped.
    pub fn reflect_across_interface(&self) -> Result<PolyMesh> {
        let xi = self.interface_x;
        let mut raw = self.to_raw();
        for v in &mut raw.vertices {
            v[0] = 2.0 * xi - v[0];
        }
        for e in &mut raw.elements {
            e.vertex_ids.reverse();
            e.region = e.region.other();
        }
        raw.domain = DomainBox::new(
            2.0 * xi - self.domain.x_max,
            2.0 * xi - self.domain.x_min,
            self.domain.y_min,
            self.domain.y_max,
        );
        classify_faces(&raw)
    }
}

fn geometric_tolerance(domain: &DomainBox) -> f64 {
    1e-12 * domain.diagonal().max(1.0)
}

/// Inserts every mesh vertex lying on the interior of an element edge into that
/// edge, then drops repeated consecutive vertices.
fn split_edges(vertices: &[Point], loops: &mut [Vec<usize>], tol: f64) {
    // Bucket grid over the vertex cloud.
    let bb = geometry::bounding_box(vertices);
    let n = vertices.len().max(1);
    let span = (bb[1] - bb[0]).max(bb[3] - bb[2]).max(tol);
    let cells = ((n as f64).sqrt().ceil() as usize).clamp(1, 1024);
    let cell = span / cells as f64 * (1.0 + 1e-9);
    let key = |p: Point| -> (usize, usize) {
        (
            (((p[0] - bb[0]) / cell) as usize).min(cells - 1),
            (((p[1] - bb[2]) / cell) as usize).min(cells - 1),
        )
    };
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &p) in vertices.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }

    for lp in loops.iter_mut() {
        let m = lp.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let a = lp[i];
            let b = lp[(i + 1) % m];
            out.push(a);
            let (pa, pb) = (vertices[a], vertices[b]);
            let lo = key([pa[0].min(pb[0]) - tol, pa[1].min(pb[1]) - tol]);
            let hi = key([pa[0].max(pb[0]) + tol, pa[1].max(pb[1]) + tol]);
            let mut inner: Vec<(f64, usize)> = Vec::new();
            for gx in lo.0..=hi.0 {
                for gy in lo.1..=hi.1 {
                    if let Some(ids) = grid.get(&(gx, gy)) {
                        for &v in ids {
                            if v != a && v != b && geometry::on_open_segment(pa, pb, vertices[v], tol)
                            {
                                inner.push((geometry::dist(pa, vertices[v]), v));
                            }
                        }
                    }
                }
            }
            inner.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            out.extend(inner.into_iter().map(|(_, v)| v));
        }
        out.dedup();
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        *lp = out;
    }
}

/// Builds the classified mesh: splits edges at hanging vertices, computes element
/// geometry and sub-triangulations, and assigns every face exactly one kind.
pub fn classify_faces(raw: &RawMesh) -> Result<PolyMesh> {
    let tol = geometric_tolerance(&raw.domain);
    let nv = raw.vertices.len();
    for (i, v) in raw.vertices.iter().enumerate() {
        if !v[0].is_finite() || !v[1].is_finite() {
            return Err(Error::Topology(format!("vertex {i} has non-finite coordinates")));
        }
    }
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(raw.elements.len());
    for (k, e) in raw.elements.iter().enumerate() {
        if e.vertex_ids.len() < 3 {
            return Err(Error::Element { element: k, reason: "fewer than 3 vertices".into() });
        }
        if let Some(&bad) = e.vertex_ids.iter().find(|&&v| v >= nv) {
            return Err(Error::Element {
                element: k,
                reason: format!("vertex id {bad} out of range (have {nv})"),
            });
        }
        if e.degree == 0 {
            return Err(Error::Element { element: k, reason: "polynomial degree must be >= 1".into() });
        }
        loops.push(e.vertex_ids.clone());
    }
    split_edges(&raw.vertices, &mut loops, tol);

    // Which side of the interface each region occupies (+1 right, -1 left).
    let mut side: [Option<f64>; 2] = [None, None];
    let mut elements = Vec::with_capacity(loops.len());
    for (k, (lp, e)) in loops.into_iter().zip(&raw.elements).enumerate() {
        if lp.len() < 3 {
            return Err(Error::Element { element: k, reason: "degenerate vertex loop".into() });
        }
        let poly: Vec<Point> = lp.iter().map(|&v| raw.vertices[v]).collect();
        let area = geometry::signed_area(&poly);
        if area <= 0.0 {
            return Err(Error::Element {
                element: k,
                reason: format!("vertices not counter-clockwise or zero area (signed area {area:e})"),
            });
        }
        let offsets: Vec<f64> = poly.iter().map(|p| p[0] - raw.interface_x).collect();
        let s = if offsets.iter().all(|&d| d <= tol) {
            -1.0
        } else if offsets.iter().all(|&d| d >= -tol) {
            1.0
        } else {
            return Err(Error::Element {
                element: k,
                reason: "element crosses the interface line".into(),
            });
        };
        let slot = &mut side[e.region as usize];
        match slot {
            None => *slot = Some(s),
            Some(prev) if *prev != s => {
                return Err(Error::Element {
                    element: k,
                    reason: format!("{:?} element lies on the wrong side of the interface", e.region),
                })
            }
            _ => {}
        }
        let subtriangles = subtriangulate(&poly).map_err(|reason| Error::Element { element: k, reason })?;
        elements.push(PolyElement {
            vertex_ids: lp,
            region: e.region,
            degree: e.degree,
            area,
            diameter: geometry::diameter(&poly),
            centroid: geometry::centroid(&poly),
            bbox: geometry::bounding_box(&poly),
            subtriangles,
            faces: Vec::new(),
        });
    }
    if let (Some(a), Some(b)) = (side[0], side[1]) {
        if a == b {
            return Err(Error::Topology("elastic and acoustic elements on the same side".into()));
        }
    }

    // Edge matching on unordered vertex pairs.
    let mut edge_owner: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let mut edge_order: Vec<(usize, usize)> = Vec::new();
    for (k, e) in elements.iter().enumerate() {
        let m = e.vertex_ids.len();
        for i in 0..m {
            let a = e.vertex_ids[i];
            let b = e.vertex_ids[(i + 1) % m];
            let key = (a.min(b), a.max(b));
            let owners = edge_owner.entry(key).or_default();
            if owners.is_empty() {
                edge_order.push(key);
            }
            owners.push((k, i));
        }
    }

    let mut faces = Vec::with_capacity(edge_order.len());
    for key in edge_order {
        let owners = &edge_owner[&key];
        let (ka, ia) = owners[0];
        let ea = &elements[ka];
        let m = ea.vertex_ids.len();
        let (a, b) = (ea.vertex_ids[ia], ea.vertex_ids[(ia + 1) % m]);
        let (pa, pb) = (raw.vertices[a], raw.vertices[b]);
        match owners.len() {
            1 => {
                let d = raw.domain;
                let both = |c: usize, v: f64| (pa[c] - v).abs() <= tol && (pb[c] - v).abs() <= tol;
                let on_box = both(0, d.x_min) || both(0, d.x_max) || both(1, d.y_min) || both(1, d.y_max);
                if !on_box {
                    return Err(Error::Topology(format!(
                        "edge ({a}, {b}) of element {ka} has no neighbour but is not on the domain boundary"
                    )));
                }
                let kind = match ea.region {
                    Region::Elastic => FaceKind::BoundaryElasticDirichlet,
                    Region::Acoustic => FaceKind::BoundaryAcousticDirichlet,
                };
                faces.push(make_face([a, b], [pa, pb], kind, ka, None));
            }
            2 => {
                let (kb, _) = owners[1];
                let eb = &elements[kb];
                if ka == kb {
                    return Err(Error::Element { element: ka, reason: "repeated edge".into() });
                }
                if ea.region == eb.region {
                    let kind = match ea.region {
                        Region::Elastic => FaceKind::InteriorElastic,
                        Region::Acoustic => FaceKind::InteriorAcoustic,
                    };
                    faces.push(make_face([a, b], [pa, pb], kind, ka, Some(kb)));
                } else {
                    let on_line = (pa[0] - raw.interface_x).abs() <= tol
                        && (pb[0] - raw.interface_x).abs() <= tol;
                    if !on_line {
                        return Err(Error::Topology(format!(
                            "face ({a}, {b}) separates elements {ka} and {kb} of different regions off the interface line"
                        )));
                    }
                    if ea.region == Region::Elastic {
                        faces.push(make_face([a, b], [pa, pb], FaceKind::Interface, ka, Some(kb)));
                    } else {
                        faces.push(make_face([b, a], [pb, pa], FaceKind::Interface, kb, Some(ka)));
                    }
                }
            }
            n => {
                return Err(Error::Topology(format!(
                    "edge ({a}, {b}) shared by {n} elements"
                )))
            }
        }
    }
    for (f, face) in faces.iter().enumerate() {
        elements[face.left].faces.push(f);
        if let Some(r) = face.right {
            elements[r].faces.push(f);
        }
    }

    let mesh = PolyMesh {
        vertices: raw.vertices.clone(),
        elements,
        faces,
        domain: raw.domain,
        interface_x: raw.interface_x,
    };
    let total: f64 = mesh.elements.iter().map(|e| e.area).sum();
    let expected = raw.domain.area();
    if (total - expected).abs() > 1e-10 * expected {
        return Err(Error::Topology(format!(
            "element areas sum to {total} but the domain area is {expected}"
        )));
    }
    Ok(mesh)
}

fn make_face(ids: [usize; 2], pts: [Point; 2], kind: FaceKind, left: usize, right: Option<usize>) -> Face {
    let d = geometry::sub(pts[1], pts[0]);
    let length = d[0].hypot(d[1]);
    Face {
        endpoints: ids,
        kind,
        left,
        right,
        normal: [d[1] / length, -d[0] / length],
        length,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn two_rectangles() -> RawMesh {
        RawMesh {
            vertices: vec![
                [-1.0, 0.0],
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 1.0],
                [0.0, 1.0],
                [-1.0, 1.0],
            ],
            elements: vec![
                RawElement { vertex_ids: vec![0, 1, 4, 5], region: Region::Elastic, degree: 1 },
                RawElement { vertex_ids: vec![1, 2, 3, 4], region: Region::Acoustic, degree: 1 },
            ],
            domain: DomainBox::new(-1.0, 1.0, 0.0, 1.0),
            interface_x: 0.0,
        }
    }

    #[test]
    fn two_rectangle_classification() {
        let mesh = classify_faces(&two_rectangles()).unwrap();
        let c = mesh.face_counts();
        assert_eq!(
            c,
            FaceCounts {
                interior_elastic: 0,
                interior_acoustic: 0,
                boundary_elastic: 3,
                boundary_acoustic: 3,
                interface: 1
            }
        );
        let iface = mesh.faces().iter().find(|f| f.kind == FaceKind::Interface).unwrap();
        assert_eq!(iface.left, 0);
        assert_eq!(iface.right, Some(1));
        assert_eq!(iface.normal, [1.0, 0.0]);
        assert_eq!(iface.length, 1.0);
    }

    #[test]
    fn hanging_node_is_split() {
        // Acoustic side cut in two horizontally: the elastic square sees a hanging node.
        let raw = RawMesh {
            vertices: vec![
                [-1.0, 0.0],
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 0.5],
                [0.0, 0.5],
                [1.0, 1.0],
                [0.0, 1.0],
                [-1.0, 1.0],
            ],
            elements: vec![
                RawElement { vertex_ids: vec![0, 1, 6, 7], region: Region::Elastic, degree: 1 },
                RawElement { vertex_ids: vec![1, 2, 3, 4], region: Region::Acoustic, degree: 1 },
                RawElement { vertex_ids: vec![4, 3, 5, 6], region: Region::Acoustic, degree: 1 },
            ],
            domain: DomainBox::new(-1.0, 1.0, 0.0, 1.0),
            interface_x: 0.0,
        };
        let mesh = classify_faces(&raw).unwrap();
        assert_eq!(mesh.element(0).vertex_ids, vec![0, 1, 4, 6, 7]);
        let c = mesh.face_counts();
        assert_eq!(c.interface, 2);
        assert_eq!(c.interior_acoustic, 1);
        for f in mesh.faces().iter().filter(|f| f.kind == FaceKind::Interface) {
            assert_eq!(f.left, 0);
            assert_eq!(f.length, 0.5);
        }
    }

    #[test]
    fn mixed_region_face_off_interface_is_rejected() {
        let mut raw = two_rectangles();
        raw.interface_x = 0.5;
        assert!(classify_faces(&raw).is_err());
    }

    #[test]
    fn gap_in_mesh_is_rejected() {
        let mut raw = two_rectangles();
        raw.elements.pop();
        assert!(matches!(classify_faces(&raw), Err(Error::Topology(_))));
    }

    #[test]
    fn clockwise_element_is_rejected() {
        let mut raw = two_rectangles();
        raw.elements[0].vertex_ids.reverse();
        assert!(matches!(classify_faces(&raw), Err(Error::Element { element: 0, .. })));
    }

    #[test]
    fn reflection_swaps_region_counts() {
        let mesh = classify_faces(&two_rectangles()).unwrap();
        let r = mesh.reflect_across_interface().unwrap();
        let (a, b) = (mesh.face_counts(), r.face_counts());
        assert_eq!(a.boundary_elastic, b.boundary_acoustic);
        assert_eq!(a.interface, b.interface);
        let iface = r.faces().iter().find(|f| f.kind == FaceKind::Interface).unwrap();
        assert_eq!(r.element(iface.left).region, Region::Elastic);
        // Regions swap sides too, so the elastic part is back on the left.
        assert_eq!(iface.normal, [1.0, 0.0]);
    }
}
