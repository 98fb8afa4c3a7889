//! Generates a Voronoi mesh of the two-subdomain rectangle and prints its
//! quality report. Pass a path to also write the mesh file.
//!
//!     cargo run --example polygonal_mesh -- 120 mesh.txt

use elastoacoustic::mesh::{generate_mesh, quality_report, write_mesh, MeshParams};

fn main() -> elastoacoustic::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(60);

    let mut params = MeshParams::unit_bidomain(n / 2, n - n / 2, 1);
    params.lloyd_iterations = 50;
    let mesh = generate_mesh(&params)?;

    let r = quality_report(&mesh);
    let fc = r.face_counts;
    println!("{} elements, {} faces ({} on the interface)", r.n_elements, fc.total(), fc.interface);
    println!("h in [{:.4}, {:.4}], neighbour h ratio <= {:.2}", r.h_min, r.h_max, r.max_h_ratio.unwrap_or(1.0));
    println!("max simplex ratio {:.3}", r.max_simplex_ratio());
    let sides: Vec<usize> = mesh.elements().iter().map(|e| e.vertex_ids.len()).collect();
    println!("vertices per element: {} to {}", sides.iter().min().unwrap(), sides.iter().max().unwrap());

    if let Some(path) = args.get(1) {
        write_mesh(&mesh, path)?;
        println!("wrote {path}");
    }
    Ok(())
}
