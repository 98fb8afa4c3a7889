use super::Scenario;
use crate::analysis::{errors_vs_exact, NormReport};
use crate::assembly::{Discretization, LoadOperator, StabilizationParams, SystemMatrices};
use crate::error::{Error, Result};
use crate::fespace::l2_project;
use crate::mesh::PolyMesh;
use crate::timestepper::{self, build_operator, n_steps, startup, startup_taylor2, Observer, Startup, State};

/// A scenario discretized on a mesh: matrices and load vectors, ready to run.
pub struct Simulation {
    pub disc: Discretization,
    pub system: SystemMatrices,
    pub loads: LoadOperator,
}

impl Simulation {
    pub fn new(scenario: &Scenario, mesh: PolyMesh, stabilization: StabilizationParams) -> Result<Self> {
        let (d, s) = (mesh.domain(), scenario.domain);
        let tol = 1e-9;
        if (d.x_min - s.x_min).abs() > tol
            || (d.x_max - s.x_max).abs() > tol
            || (d.y_min - s.y_min).abs() > tol
            || (d.y_max - s.y_max).abs() > tol
            || (mesh.interface_x() - scenario.interface_x).abs() > tol
        {
            return Err(Error::Config(format!(
                "mesh domain {d:?} with interface x = {} does not match scenario '{}'",
                mesh.interface_x(),
                scenario.name
            )));
        }
        let disc = Discretization::uniform(mesh, scenario.material, stabilization)?;
        let system = disc.system()?;
        let loads = LoadOperator::new(&disc, &scenario.load_terms())?;
        Ok(Self { disc, system, loads })
    }

    /// Projected initial data advanced to level 1.
    pub fn initial_state(&self, scenario: &Scenario, dt: f64, rule: Startup) -> Result<State> {
        let (mesh, e, a) = (&self.disc.mesh, &self.disc.elastic, &self.disc.acoustic);
        let init = &scenario.initial;
        let u0 = l2_project(mesh, e, |p| (init.u0)(p))?;
        let v0 = l2_project(mesh, e, |p| (init.u1)(p))?;
        let phi0 = l2_project(mesh, a, |p| (init.phi0)(p))?;
        let psi0 = l2_project(mesh, a, |p| (init.phi1)(p))?;
        match rule {
            Startup::Taylor1 => Ok(startup(u0, v0, phi0, psi0, dt)),
            Startup::Taylor2 => {
                let (fe, fa) = self.loads.eval(0.0);
                startup_taylor2(&self.system, u0, v0, phi0, psi0, &fe, &fa, dt)
            }
        }
    }

    /// Runs to `final_time` and returns the last state.
    pub fn run(
        &self,
        scenario: &Scenario,
        dt: f64,
        final_time: f64,
        rule: Startup,
        observer: &mut dyn Observer,
    ) -> Result<State> {
        let n_levels = n_steps(final_time, dt)?;
        let op = build_operator(&self.system, dt)?;
        let mut state = self.initial_state(scenario, dt, rule)?;
        timestepper::run(&op, &self.loads, &mut state, n_levels, observer)?;
        Ok(state)
    }

    /// Errors of `state` against the exact solution at the state's time.
    pub fn errors(&self, scenario: &Scenario, state: &State) -> Result<NormReport> {
        let ex = scenario
            .exact
            .as_ref()
            .ok_or_else(|| Error::Config(format!("scenario '{}' has no exact solution", scenario.name)))?;
        let t = state.t();
        let exact_u = |p| ((ex.u)(p, t), (ex.grad_u)(p, t));
        let exact_phi = |p| ((ex.phi)(p, t), (ex.grad_phi)(p, t));
        errors_vs_exact(&self.disc, &state.u_curr, &state.phi_curr, &exact_u, &exact_phi, t)
    }
}
