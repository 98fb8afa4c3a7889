//! Planar geometry helpers shared by the mesh generator and the finite element code.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Signed area of the triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Shoelace formula; positive for counter-clockwise polygons.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s
}

/// Area centroid of a simple polygon.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a = signed_area(poly);
    if a.abs() < f64::MIN_POSITIVE {
        let inv = 1.0 / n as f64;
        return poly
            .iter()
            .fold([0.0, 0.0], |acc, p| [acc[0] + p[0] * inv, acc[1] + p[1] * inv]);
    }
    // Shift to the first vertex to limit cancellation on far-from-origin cells.
    let o = poly[0];
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = sub(poly[i], o);
        let q = sub(poly[(i + 1) % n], o);
        let w = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    [o[0] + cx / (6.0 * a), o[1] + cy / (6.0 * a)]
}

/// Largest vertex-to-vertex distance.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max(dist(poly[i], poly[j]));
        }
    }
    d
}

/// Axis-aligned bounding box as `[x_min, x_max, y_min, y_max]`.
pub fn bounding_box(poly: &[Point]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in poly {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].max(p[0]);
        b[2] = b[2].min(p[1]);
        b[3] = b[3].max(p[1]);
    }
    b
}

/// Clips a convex polygon against the half-plane `{p : (p - origin) . normal <= 0}`.
pub fn clip_half_plane(poly: &[Point], origin: Point, normal: Point) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let da = dot(sub(a, origin), normal);
        let db = dot(sub(b, origin), normal);
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Winding-number point-in-polygon test; points on the boundary count as inside.
pub fn contains(poly: &[Point], p: Point, tol: f64) -> bool {
    let n = poly.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = sub(b, a);
        let len = dot(e, e).sqrt();
        let c = cross(e, sub(p, a));
        if c.abs() <= tol * len {
            let s = dot(sub(p, a), e);
            if s >= -tol * len && s <= len * len + tol * len {
                return true;
            }
        }
        if a[1] <= p[1] {
            if b[1] > p[1] && c > 0.0 {
                winding += 1;
            }
        } else if b[1] <= p[1] && c < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// True when `p` lies on the open segment `(a, b)` within `tol`.
pub fn on_open_segment(a: Point, b: Point, p: Point, tol: f64) -> bool {
    let e = sub(b, a);
    let len2 = dot(e, e);
    if len2 == 0.0 {
        return false;
    }
    let len = len2.sqrt();
    let w = sub(p, a);
    if cross(e, w).abs() > tol * len {
        return false;
    }
    let s = dot(w, e) / len;
    s > tol && s < len - tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon(side: f64) -> Vec<Point> {
        (0..6)
            .map(|k| {
                let a = std::f64::consts::PI / 3.0 * k as f64;
                [side * a.cos(), side * a.sin()]
            })
            .collect()
    }

    #[test]
    fn square_area_and_centroid() {
        let sq = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        assert_eq!(signed_area(&sq), 2.0);
        assert_eq!(centroid(&sq), [1.0, 0.5]);
        assert!((diameter(&sq) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hexagon_area_matches_closed_form() {
        let s = 0.7;
        let h = hexagon(s);
        let exact = 1.5 * 3f64.sqrt() * s * s;
        assert!((signed_area(&h) - exact).abs() < 1e-14);
        let c = centroid(&h);
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
    }

    #[test]
    fn clipping_halves_a_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let half = clip_half_plane(&sq, [0.5, 0.0], [1.0, 0.0]);
        assert_eq!(half.len(), 4);
        assert!((signed_area(&half) - 0.5).abs() < 1e-15);
        // Intersections on axis-aligned edges stay exactly on those edges.
        assert!(half.iter().all(|p| p[1] == 0.0 || p[1] == 1.0));
    }

    #[test]
    fn point_location() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(contains(&sq, [0.5, 0.5], 1e-12));
        assert!(contains(&sq, [1.0, 0.3], 1e-12));
        assert!(!contains(&sq, [1.1, 0.3], 1e-12));
        assert!(on_open_segment([0.0, 0.0], [1.0, 0.0], [0.25, 0.0], 1e-12));
        assert!(!on_open_segment([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], 1e-12));
    }
}
