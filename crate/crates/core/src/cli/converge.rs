use std::fmt::Write as _;

use super::config::{DiscretizationConfig, DtPolicy, HStudy, PStudy, StudyTime, NORMS};
use super::output::num;
use crate::analysis::{rate_table, NormReport, RateRow, RateTable};
use crate::assembly::StabilizationParams;
use crate::error::{Error, Result};
use crate::mesh::{generate_mesh, MeshParams, PolyMesh};
use crate::scenarios::{Scenario, Simulation};
use crate::timestepper::State;

/// One solved refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyLevel {
    pub n_elements: usize,
    pub h: f64,
    pub degree: usize,
    pub dofs: usize,
    pub dt: f64,
    pub errors: NormReport,
}

impl StudyLevel {
    /// Errors in [`NORMS`] order.
    pub fn error_columns(&self) -> [f64; 4] {
        [self.errors.dg_e, self.errors.dg_a, self.errors.l2_e, self.errors.l2_a]
    }
}

/// Unit-bidomain mesh with `total` cells split evenly between the subdomains.
pub fn study_mesh(total: usize, lloyd_iterations: usize, seed: u64) -> Result<PolyMesh> {
    let ne = total / 2;
    let mut p = MeshParams::unit_bidomain(ne.max(1), (total - ne).max(1), seed);
    p.lloyd_iterations = lloyd_iterations;
    generate_mesh(&p)
}

/// Largest step `<= dt` that divides `final_time`.
pub fn fit_dt(dt: f64, final_time: f64) -> f64 {
    let n = (final_time / dt * (1.0 - 1e-12)).ceil().max(1.0);
    final_time / n
}

pub fn solve_level(
    scenario: &Scenario,
    mesh: PolyMesh,
    stabilization: StabilizationParams,
    dt: f64,
    time: &StudyTime,
) -> Result<StudyLevel> {
    let (n_elements, h, degree) = (mesh.n_elements(), mesh.h_max(), mesh.max_degree());
    let sim = Simulation::new(scenario, mesh, stabilization)?;
    let state = sim.run(scenario, dt, time.final_time, time.startup, &mut |_: &State| Ok(()))?;
    let errors = sim.errors(scenario, &state)?;
    let dofs = sim.disc.elastic.n_dofs() + sim.disc.acoustic.n_dofs();
    log::info!(
        "{n_elements} elements, p = {degree}, h = {h:.4}, dt = {dt:.3e}: dG ({:.3e}, {:.3e}), L2 ({:.3e}, {:.3e})",
        errors.dg_e,
        errors.dg_a,
        errors.l2_e,
        errors.l2_a
    );
    Ok(StudyLevel { n_elements, h, degree, dofs, dt, errors })
}

pub fn h_study(
    scenario: &Scenario,
    study: &HStudy,
    time: &StudyTime,
    disc: &DiscretizationConfig,
    lloyd_iterations: usize,
    seed: u64,
) -> Result<Vec<StudyLevel>> {
    let stab = disc.stabilization()?;
    let mut meshes = Vec::new();
    for n in study.element_counts()? {
        let mut m = study_mesh(n, lloyd_iterations, seed)?;
        m.set_uniform_degree(study.degree);
        meshes.push(m);
    }
    let h0 = meshes.iter().map(PolyMesh::h_max).fold(0.0, f64::max);
    meshes
        .into_iter()
        .map(|m| {
            let dt = match time.dt_policy {
                DtPolicy::Fixed => time.dt,
                DtPolicy::Proportional => fit_dt(time.dt * m.h_max() / h0, time.final_time),
            };
            solve_level(scenario, m, stab, dt, time)
        })
        .collect()
}

pub fn p_study(
    scenario: &Scenario,
    study: &PStudy,
    time: &StudyTime,
    disc: &DiscretizationConfig,
    lloyd_iterations: usize,
    seed: u64,
) -> Result<Vec<StudyLevel>> {
    let stab = disc.stabilization()?;
    let base = study_mesh(study.elements, lloyd_iterations, seed)?;
    study
        .degrees
        .iter()
        .map(|&p| {
            let mut m = base.clone();
            m.set_uniform_degree(p);
            solve_level(scenario, m, stab, time.dt, time)
        })
        .collect()
}

pub fn h_table(levels: &[StudyLevel]) -> Result<RateTable> {
    let rows = levels.iter().map(|l| RateRow { h: l.h, dofs: l.dofs, errors: l.error_columns().to_vec() }).collect();
    rate_table(&NORMS, rows)
}

/// `e_p / e_{p+1}` per norm for consecutive levels.
pub fn successive_ratios(levels: &[StudyLevel]) -> Vec<[f64; 4]> {
    levels
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].error_columns(), w[1].error_columns());
            std::array::from_fn(|j| a[j] / b[j])
        })
        .collect()
}

pub fn rates_h_csv(table: &RateTable) -> String {
    let mut s = format!("h,dofs,{}\n", NORMS.join(","));
    for r in &table.rows {
        let errs: Vec<String> = r.errors.iter().map(|&e| num(e)).collect();
        let _ = writeln!(s, "{},{},{}", num(r.h), r.dofs, errs.join(","));
    }
    s
}

pub fn rates_p_csv(levels: &[StudyLevel]) -> String {
    let mut s = format!("p,dofs,{}\n", NORMS.join(","));
    for l in levels {
        let errs: Vec<String> = l.error_columns().iter().map(|&e| num(e)).collect();
        let _ = writeln!(s, "{},{},{}", l.degree, l.dofs, errs.join(","));
    }
    s
}

fn selected(norms: &[String]) -> Result<Vec<usize>> {
    norms
        .iter()
        .map(|n| NORMS.iter().position(|m| m == n).ok_or_else(|| Error::Config(format!("unknown norm '{n}'"))))
        .collect()
}

pub fn h_summary(table: &RateTable, norms: &[String]) -> Result<String> {
    let parts: Vec<String> = selected(norms)?
        .into_iter()
        .map(|j| format!("{}={:.3}{}", NORMS[j], table.slopes[j], if table.monotone[j] { "" } else { " (non-monotone)" }))
        .collect();
    Ok(format!("h-study slopes: {}", parts.join(", ")))
}

pub fn p_summary(levels: &[StudyLevel], norms: &[String]) -> Result<String> {
    let ratios = successive_ratios(levels);
    let parts: Vec<String> = selected(norms)?
        .into_iter()
        .map(|j| {
            let r: Vec<String> = ratios.iter().map(|r| format!("{:.2}", r[j])).collect();
            format!("{} ratios [{}]", NORMS[j], r.join(", "))
        })
        .collect();
    Ok(format!("p-study: {}", parts.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fitted_dt_divides_the_interval() {
        assert_eq!(fit_dt(1e-4, 0.2), 0.2 / 2000.0);
        let dt = fit_dt(0.03, 0.2);
        assert!(dt <= 0.03 && ((0.2 / dt).round() - 0.2 / dt).abs() < 1e-9);
    }

    #[test]
    fn study_mesh_splits_evenly() {
        let m = study_mesh(10, 5, 3).unwrap();
        assert_eq!(m.n_elements(), 10);
        assert_eq!(m.region_elements(crate::mesh::Region::Elastic).count(), 5);
    }
}
