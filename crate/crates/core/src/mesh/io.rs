//! Plain-text mesh format.
//!
//! ```text
//! polymesh 2d v1
//! vertices N
//! x y                      (N lines, shortest round-trip decimal)
//! elements M
//! region degree k id_1 ... id_k   (M lines, region is `e` or `a`)
//! ```
//!
//! Faces are derived on load. The domain box is the vertex bounding box and the
//! interface abscissa is recovered from the vertices shared by both regions.

use std::fmt::Write as _;
use std::path::Path;

use super::{classify_faces, DomainBox, PolyMesh, RawElement, RawMesh, Region};
use crate::error::{Error, Result};
use crate::geometry;

const HEADER: &str = "polymesh 2d v1";

pub fn format_mesh(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "vertices {}", mesh.vertices().len());
    for v in mesh.vertices() {
        // `{:?}` prints the shortest representation that parses back bit-exactly.
        let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
    }
    let _ = writeln!(s, "elements {}", mesh.n_elements());
    for e in mesh.elements() {
        let _ = write!(s, "{} {} {}", e.region.tag(), e.degree, e.vertex_ids.len());
        for id in &e.vertex_ids {
            let _ = write!(s, " {id}");
        }
        s.push('\n');
    }
    s
}

pub fn write_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

pub fn parse_mesh(text: &str) -> Result<PolyMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header != HEADER {
        return Err(parse_err(ln, format!("expected header `{HEADER}`")));
    }

    let count = |(ln, l): (usize, &str), what: &str| -> Result<usize> {
        let mut it = l.split_whitespace();
        if it.next() != Some(what) {
            return Err(parse_err(ln, format!("expected `{what} <count>`")));
        }
        let n = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, format!("missing or invalid {what} count")))?;
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        Ok(n)
    };

    let nv = count(lines.next().ok_or_else(|| parse_err(ln + 1, "missing vertex block"))?, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    let mut last = ln;
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(last + 1, "too few vertex lines"))?;
        last = ln;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad coordinate: {e}")))?;
        if xy.len() != 2 || !xy.iter().all(|v| v.is_finite()) {
            return Err(parse_err(ln, "expected two finite coordinates"));
        }
        vertices.push([xy[0], xy[1]]);
    }

    let ne = count(lines.next().ok_or_else(|| parse_err(last + 1, "missing element block"))?, "elements")?;
    let mut elements = Vec::with_capacity(ne);
    let mut element_lines = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(last + 1, "too few element lines"))?;
        last = ln;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let region = match toks.first() {
            Some(&"e") => Region::Elastic,
            Some(&"a") => Region::Acoustic,
            _ => return Err(parse_err(ln, "element line must start with region tag `e` or `a`")),
        };
        let num = |i: usize, what: &str| -> Result<usize> {
            toks.get(i)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(ln, format!("missing or invalid {what}")))
        };
        let degree = num(1, "degree")?;
        if degree == 0 {
            return Err(parse_err(ln, "degree must be >= 1"));
        }
        let k = num(2, "vertex count")?;
        if toks.len() != 3 + k {
            return Err(parse_err(ln, format!("expected {k} vertex ids, found {}", toks.len() - 3)));
        }
        let ids = (0..k).map(|i| num(3 + i, "vertex id")).collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = ids.iter().find(|&&v| v >= nv) {
            return Err(parse_err(ln, format!("vertex id {bad} out of range (have {nv} vertices)")));
        }
        elements.push(RawElement { vertex_ids: ids, region, degree });
        element_lines.push(ln);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected content after the element block"));
    }

    let bb = geometry::bounding_box(&vertices);
    let domain = DomainBox::new(bb[0], bb[1], bb[2], bb[3]);
    let interface_x = infer_interface(&vertices, &elements).ok_or_else(|| {
        parse_err(last, "could not infer the interface: no vertex is shared by both regions")
    })?;
    let raw = RawMesh { vertices, elements, domain, interface_x };
    classify_faces(&raw).map_err(|e| match e {
        Error::Element { element, reason } => parse_err(element_lines[element], reason),
        other => other,
    })
}

fn infer_interface(vertices: &[[f64; 2]], elements: &[RawElement]) -> Option<f64> {
    let mut seen = vec![0u8; vertices.len()];
    for e in elements {
        let bit = match e.region {
            Region::Elastic => 1,
            Region::Acoustic => 2,
        };
        for &v in &e.vertex_ids {
            seen[v] |= bit;
        }
    }
    // Shared vertices all sit on the interface line; take the most common abscissa.
    let mut xs: Vec<f64> = seen
        .iter()
        .zip(vertices)
        .filter(|(&s, _)| s == 3)
        .map(|(_, v)| v[0])
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut best = None;
    let mut i = 0;
    while i < xs.len() {
        let j = xs[i..].iter().take_while(|&&x| x == xs[i]).count();
        if best.is_none_or(|(_, c)| j > c) {
            best = Some((xs[i], j));
        }
        i += j;
    }
    best.map(|(x, _)| x)
}
