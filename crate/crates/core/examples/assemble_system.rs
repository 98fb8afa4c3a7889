//! Assembles the seven matrices of the coupled system on a small mesh and
//! prints their sizes, symmetry and the explicit time step bound.

use elastoacoustic::assembly::{Discretization, StabilizationParams};
use elastoacoustic::mesh::{generate_mesh, MeshParams};
use elastoacoustic::scenarios::rock;
use elastoacoustic::sparse::CsrMatrix;
use elastoacoustic::timestepper::estimate_stable_dt;

fn main() -> elastoacoustic::Result<()> {
    let mut mesh = generate_mesh(&MeshParams::unit_bidomain(20, 20, 4))?;
    mesh.set_uniform_degree(2);
    let disc = Discretization::uniform(mesh, rock(), StabilizationParams::default())?;
    let sys = disc.system()?;

    println!("elastic dofs {}, acoustic dofs {}", sys.n_elastic(), sys.n_acoustic());
    for (name, m) in [
        ("M_e1", &sys.m_e1),
        ("A_e", &sys.a_e),
        ("C_e", &sys.c_e),
        ("M_a", &sys.m_a),
        ("A_a", &sys.a_a),
    ] {
        println!("{name:5} {:>4} x {:<4} nnz {:>6}  max|a_ij - a_ji| {:.1e}", m.nrows(), m.ncols(), m.nnz(), if m.nrows() == m.ncols() { m.asymmetry() } else { 0.0 });
    }
    // The fluid-side coupling is the negative transpose.
    let skew = CsrMatrix::linear_combination(1.0, &sys.c_a(), 1.0, &sys.c_e.transpose());
    println!("max|C_a + C_e^T| = {:e}", skew.max_abs());
    println!("stable dt estimate {:.3e}", estimate_stable_dt(&sys, 1.0)?);

    if let Some(dir) = std::env::args().nth(1) {
        sys.dump(std::path::Path::new(&dir))?;
        println!("matrices written to {dir}");
    }
    Ok(())
}
