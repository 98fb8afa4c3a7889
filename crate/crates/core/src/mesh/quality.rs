use std::fmt;

use super::{FaceCounts, PolyMesh};
use crate::geometry;

/// Neighbour diameter ratios above this are flagged.
pub const H_RATIO_FLAG: f64 = 4.0;
/// Neighbour degree ratios above this are flagged.
pub const P_RATIO_FLAG: f64 = 2.0;
/// `h_K |F| / (d |K_F|)` above this is flagged.
pub const SIMPLEX_RATIO_FLAG: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct QualityReport {
    pub n_elements: usize,
    pub face_counts: FaceCounts,
    pub h_min: f64,
    pub h_max: f64,
    /// Max over face-sharing pairs of `h_+ / h_-` (>= 1); `None` without pairs.
    pub max_h_ratio: Option<f64>,
    pub max_p_ratio: Option<f64>,
    /// Per element, the max over its faces of `h_K |F| / (d |K_F|)` where `K_F`
    /// is the fan triangle spanned by the centroid and `F`.
    pub simplex_ratio: Vec<f64>,
    pub flags: Vec<String>,
}

impl QualityReport {
    pub fn max_simplex_ratio(&self) -> f64 {
        self.simplex_ratio.iter().copied().fold(0.0, f64::max)
    }
}

pub fn quality_report(mesh: &PolyMesh) -> QualityReport {
    let mut max_h: Option<f64> = None;
    let mut max_p: Option<f64> = None;
    for face in mesh.faces() {
        let Some(r) = face.right else { continue };
        let (a, b) = (mesh.element(face.left), mesh.element(r));
        let hr = a.diameter.max(b.diameter) / a.diameter.min(b.diameter);
        let pr = a.degree.max(b.degree) as f64 / a.degree.min(b.degree) as f64;
        max_h = Some(max_h.map_or(hr, |m| m.max(hr)));
        max_p = Some(max_p.map_or(pr, |m| m.max(pr)));
    }

    let mut flags = Vec::new();
    let simplex_ratio: Vec<f64> = mesh
        .elements()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let c = e.centroid;
            let worst = e
                .faces
                .iter()
                .map(|&f| {
                    let [a, b] = mesh.face_points(f);
                    let tri = geometry::triangle_area(c, a, b).abs();
                    e.diameter * mesh.faces()[f].length / (2.0 * tri)
                })
                .fold(0.0, f64::max);
            if worst > SIMPLEX_RATIO_FLAG {
                flags.push(format!("element {k}: simplex height ratio {worst:.3}"));
            }
            worst
        })
        .collect();
    if let Some(h) = max_h.filter(|&h| h > H_RATIO_FLAG) {
        flags.push(format!("neighbour diameter ratio {h:.3} exceeds {H_RATIO_FLAG}"));
    }
    if let Some(p) = max_p.filter(|&p| p > P_RATIO_FLAG) {
        flags.push(format!("neighbour degree ratio {p:.3} exceeds {P_RATIO_FLAG}"));
    }

    let hs = mesh.elements().iter().map(|e| e.diameter);
    QualityReport {
        n_elements: mesh.n_elements(),
        face_counts: mesh.face_counts(),
        h_min: hs.clone().fold(f64::INFINITY, f64::min),
        h_max: hs.fold(0.0, f64::max),
        max_h_ratio: max_h,
        max_p_ratio: max_p,
        simplex_ratio,
        flags,
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements: {}", self.n_elements)?;
        writeln!(f, "faces: {} ({})", self.face_counts.total(), self.face_counts)?;
        writeln!(f, "h_min: {:.6e}", self.h_min)?;
        writeln!(f, "h_max: {:.6e}", self.h_max)?;
        match (self.max_h_ratio, self.max_p_ratio) {
            (Some(h), Some(p)) => {
                writeln!(f, "max neighbour h ratio: {h:.6}")?;
                writeln!(f, "max neighbour p ratio: {p:.6}")?;
            }
            _ => writeln!(f, "neighbour ratios: no interior pairs")?,
        }
        writeln!(f, "max simplex height ratio: {:.6}", self.max_simplex_ratio())?;
        if self.flags.is_empty() {
            writeln!(f, "flags: none")
        } else {
            for flag in &self.flags {
                writeln!(f, "flag: {flag}")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::tests::two_rectangles;
    use crate::mesh::{classify_faces, DomainBox, RawElement, RawMesh, Region};

    #[test]
    fn uniform_pair_has_unit_ratios() {
        let mesh = classify_faces(&two_rectangles()).unwrap();
        let r = quality_report(&mesh);
        assert_eq!(r.max_h_ratio, Some(1.0));
        assert_eq!(r.max_p_ratio, Some(1.0));
        assert!(r.flags.is_empty());
        // Rectangle 1 x 1, centroid fan: side faces give h*|F| / (2 |K_F|) = sqrt(2) * 1 / (2 * 0.25).
        assert!((r.max_simplex_ratio() - 2f64.sqrt() * 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_element_has_no_pairs() {
        let raw = RawMesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            elements: vec![RawElement { vertex_ids: vec![0, 1, 2, 3], region: Region::Acoustic, degree: 2 }],
            domain: DomainBox::new(0.0, 1.0, 0.0, 1.0),
            interface_x: -0.5,
        };
        let mesh = classify_faces(&raw).unwrap();
        let r = quality_report(&mesh);
        assert_eq!(r.max_h_ratio, None);
        assert!(r.to_string().contains("no interior pairs"));
    }
}
