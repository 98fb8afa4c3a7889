//! Coercivity and flux-trace checks of the interior penalty forms for a few
//! penalty constants.

use elastoacoustic::analysis::{coercivity_wedge, rayleigh_quotients, verify_flux_trace_scaling};
use elastoacoustic::assembly::{Discretization, StabilizationParams};
use elastoacoustic::mesh::{generate_mesh, MeshParams};
use elastoacoustic::scenarios::rock;

fn main() -> elastoacoustic::Result<()> {
    let mut mesh = generate_mesh(&MeshParams::unit_bidomain(30, 30, 9))?;
    mesh.set_uniform_degree(2);
    for alpha in [1.0, 4.0, 10.0, 40.0] {
        let d = Discretization::uniform(mesh.clone(), rock(), StabilizationParams::new(alpha, alpha))?;
        let r = rayleigh_quotients(&d, 50, 1)?;
        let wedge = coercivity_wedge(&d, 50, 1)?;
        println!(
            "alpha = beta = {alpha:4}: Rayleigh solid [{:.3}, {:.3}], fluid [{:.3}, {:.3}], min (norm + consistency) / norm {wedge:.3}",
            r.min_e, r.max_e, r.min_a, r.max_a
        );
    }
    let d = Discretization::uniform(mesh, rock(), StabilizationParams::default())?;
    let rep = verify_flux_trace_scaling(&d, &[1.0, 4.0, 16.0], 50, 2)?;
    let (fe, fa) = rep.step_factors();
    println!("flux-trace ratio per 4x penalty: solid {fe:.4?}, fluid {fa:.4?}");
    Ok(())
}
