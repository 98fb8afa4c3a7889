//! Runs the manufactured elasto-acoustic solution for a short time and
//! reports the energy and the final errors.

use elastoacoustic::analysis::EnergyNorm;
use elastoacoustic::assembly::StabilizationParams;
use elastoacoustic::mesh::{generate_mesh, MeshParams};
use elastoacoustic::scenarios::{test_case_1, Simulation};
use elastoacoustic::timestepper::{Startup, State};

fn main() -> elastoacoustic::Result<()> {
    let scenario = test_case_1()?;
    let mut mesh = generate_mesh(&MeshParams::unit_bidomain(40, 40, 1))?;
    mesh.set_uniform_degree(2);
    let sim = Simulation::new(&scenario, mesh, StabilizationParams::default())?;
    let energy = EnergyNorm::new(&sim.disc, &sim.system)?;

    let (dt, final_time) = (1e-4, 0.1);
    let state = sim.run(&scenario, dt, final_time, Startup::Taylor1, &mut |s: &State| {
        if s.n % 200 == 0 {
            let e = energy.eval(s);
            println!("t = {:.3}  E = {:.6e} (solid {:.4e}, fluid {:.4e})", s.t(), e.total, e.elastic, e.acoustic);
        }
        Ok(())
    })?;

    let err = sim.errors(&scenario, &state)?;
    println!("errors at t = {:.2}: dG {:.3e} / {:.3e}, L2 {:.3e} / {:.3e}", err.t, err.dg_e, err.dg_a, err.l2_e, err.l2_a);
    Ok(())
}
