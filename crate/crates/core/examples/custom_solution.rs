//! A user-defined manufactured solution: a standing acoustic mode that leaves
//! the solid at rest. Forcing terms are derived from the expression.

use elastoacoustic::assembly::StabilizationParams;
use elastoacoustic::mesh::{generate_mesh, MeshParams};
use elastoacoustic::scenarios::{custom_scenario, CustomSpec, Simulation};
use elastoacoustic::timestepper::{Startup, State};

const SPEC: &str = r#"
final_time = 0.1
dt = 1e-4

[material]
rho_e = 1.0
lambda = 2.0
mu = 1.0
rho_a = 1.0
c = 1.0

# phi = x^2 sin(pi y) cos(2 t): zero value and normal derivative on x = 0
[[phi]]
x = 2
fy = "sin"
ky = 3.141592653589793
ft = "cos"
kt = 2.0
"#;

fn main() -> elastoacoustic::Result<()> {
    let spec: CustomSpec = toml::from_str(SPEC).map_err(|e| elastoacoustic::Error::Config(e.to_string()))?;
    let scenario = custom_scenario(&spec)?;
    for n in [20, 80] {
        let mut mesh = generate_mesh(&MeshParams::unit_bidomain(n, n, 5))?;
        mesh.set_uniform_degree(2);
        let sim = Simulation::new(&scenario, mesh, StabilizationParams::default())?;
        let state = sim.run(&scenario, spec.dt, spec.final_time, Startup::Taylor1, &mut |_: &State| Ok(()))?;
        let e = sim.errors(&scenario, &state)?;
        println!("{:3} elements: L2 error phi {:.3e}, u {:.3e}", 2 * n, e.l2_a, e.l2_e);
    }
    Ok(())
}
