use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::assembly::Discretization;
use crate::error::Result;
use crate::geometry::Point;
use crate::mesh::Region;
use crate::timestepper::{EnergySample, ProbeSample, Snapshot};

/// 17 significant digits, round-trip exact.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn energy_csv(samples: &[EnergySample]) -> String {
    let mut s = String::from("t,E_elastic,E_acoustic,E_total\n");
    for e in samples {
        let _ = writeln!(s, "{},{},{},{}", num(e.t), num(e.elastic), num(e.acoustic), num(e.total));
    }
    s
}

pub fn probes_csv(samples: &[ProbeSample], points: &[Point]) -> String {
    let mut s = String::from("t,probe,x,y,u_x,u_y,phi\n");
    for p in samples {
        let [x, y] = points[p.probe];
        let [ux, uy, phi] = p.values;
        let _ = writeln!(s, "{},{},{},{},{},{},{}", num(p.t), p.probe, num(x), num(y), num(ux), num(uy), num(phi));
    }
    s
}

/// Legacy ASCII VTK on the subtriangulation. Vertices are duplicated per
/// element so the discontinuous fields are sampled without averaging;
/// `u` is zero on the fluid and `phi` zero on the solid.
pub fn snapshot_vtk(disc: &Discretization, snap: &Snapshot) -> String {
    let mesh = &disc.mesh;
    let mut points = Vec::new();
    let mut disp = Vec::new();
    let mut phi = Vec::new();
    let mut region = Vec::new();
    for (k, e) in mesh.elements().iter().enumerate() {
        for tri in &e.subtriangles {
            for &p in tri {
                points.push(p);
                match e.region {
                    Region::Elastic => {
                        disp.push(disc.elastic.eval(mesh, &snap.u, k, p));
                        phi.push(0.0);
                    }
                    Region::Acoustic => {
                        disp.push([0.0; 2]);
                        phi.push(disc.acoustic.eval(mesh, &snap.phi, k, p)[0]);
                    }
                }
            }
            region.push(if e.region == Region::Elastic { 0 } else { 1 });
        }
    }
    let n_tri = points.len() / 3;
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "elastoacoustic step {} t={}", snap.n, num(snap.t));
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{} {} 0", num(p[0]), num(p[1]));
    }
    let _ = writeln!(s, "CELLS {} {}", n_tri, 4 * n_tri);
    for t in 0..n_tri {
        let _ = writeln!(s, "3 {} {} {}", 3 * t, 3 * t + 1, 3 * t + 2);
    }
    let _ = writeln!(s, "CELL_TYPES {n_tri}");
    for _ in 0..n_tri {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "CELL_DATA {n_tri}\nSCALARS region int 1\nLOOKUP_TABLE default");
    for r in &region {
        let _ = writeln!(s, "{r}");
    }
    let _ = writeln!(s, "POINT_DATA {}\nVECTORS displacement double", points.len());
    for d in &disp {
        let _ = writeln!(s, "{} {} 0", num(d[0]), num(d[1]));
    }
    let _ = writeln!(s, "SCALARS phi double 1\nLOOKUP_TABLE default");
    for v in &phi {
        let _ = writeln!(s, "{}", num(*v));
    }
    s
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn energy_header() {
        let s = energy_csv(&[EnergySample { n: 1, t: 0.5, elastic: 1.0, acoustic: 2.0, total: 3.0 }]);
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "t,E_elastic,E_acoustic,E_total");
        assert_eq!(lines.next().unwrap().split(',').count(), 4);
    }
}
