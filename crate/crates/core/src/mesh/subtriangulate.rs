use crate::geometry::{self, Point};

/// Splits a simple counter-clockwise polygon into non-overlapping triangles.
///
/// Uses a fan from the area centroid when every fan triangle has positive
/// area (always the case for convex cells), otherwise falls back to ear
/// clipping. The error string names what went wrong; callers attach the
/// element id.
pub fn subtriangulate(poly: &[Point]) -> Result<Vec<[Point; 3]>, String> {
    let area = geometry::signed_area(poly);
    if area <= 0.0 {
        return Err(format!("non-positive polygon area {area:e}"));
    }
    let c = geometry::centroid(poly);
    let n = poly.len();
    let min_area = 1e-14 * area;
    let fan: Vec<[Point; 3]> = (0..n).map(|i| [c, poly[i], poly[(i + 1) % n]]).collect();
    if fan.iter().all(|t| geometry::triangle_area(t[0], t[1], t[2]) > min_area) {
        return Ok(fan);
    }
    ear_clip(poly, area)
}

fn ear_clip(poly: &[Point], area: f64) -> Result<Vec<[Point; 3]>, String> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::with_capacity(poly.len() - 2);
    let tol = 1e-14 * area;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if geometry::triangle_area(a, b, c) <= tol {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != ia
                    && j != ib
                    && j != ic
                    && geometry::triangle_area(a, b, poly[j]) >= -tol
                    && geometry::triangle_area(b, c, poly[j]) >= -tol
                    && geometry::triangle_area(c, a, poly[j]) >= -tol
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return Err("ear clipping failed (self-intersecting polygon?)".into());
        }
    }
    let (a, b, c) = (poly[idx[0]], poly[idx[1]], poly[idx[2]]);
    if geometry::triangle_area(a, b, c) <= 0.0 {
        return Err("ear clipping left a degenerate triangle".into());
    }
    tris.push([a, b, c]);
    Ok(tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(tris: &[[Point; 3]]) -> f64 {
        tris.iter().map(|t| geometry::triangle_area(t[0], t[1], t[2])).sum()
    }

    #[test]
    fn unit_square_gives_four_quarter_triangles() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = subtriangulate(&sq).unwrap();
        assert_eq!(t.len(), 4);
        for tri in &t {
            assert!((geometry::triangle_area(tri[0], tri[1], tri[2]) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn regular_hexagon_gives_congruent_triangles() {
        let s = 1.3;
        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_3 * k as f64;
                [2.0 + s * a.cos(), -1.0 + s * a.sin()]
            })
            .collect();
        let t = subtriangulate(&hex).unwrap();
        assert_eq!(t.len(), 6);
        let expect = 3f64.sqrt() / 4.0 * s * s;
        for tri in &t {
            assert!((geometry::triangle_area(tri[0], tri[1], tri[2]) - expect).abs() < 1e-14);
            assert!((geometry::dist(tri[1], tri[2]) - s).abs() < 1e-14);
        }
    }

    #[test]
    fn non_star_shaped_polygon_uses_ear_clipping() {
        // A thin "C" whose centroid lies outside the polygon.
        let c = [
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 0.2],
            [0.2, 0.2],
            [0.2, 2.8],
            [3.0, 2.8],
            [3.0, 3.0],
            [0.0, 3.0],
        ];
        let t = subtriangulate(&c).unwrap();
        assert_eq!(t.len(), 6);
        assert!((total(&t) - geometry::signed_area(&c)).abs() < 1e-12);
        assert!(t.iter().all(|x| geometry::triangle_area(x[0], x[1], x[2]) > 0.0));
    }

    #[test]
    fn clockwise_polygon_is_rejected() {
        let sq = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(subtriangulate(&sq).is_err());
    }
}
