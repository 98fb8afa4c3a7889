//! Small h-refinement study for the manufactured solution with fitted slopes.
//! The full study lives in configs/converge_test1.toml.

use elastoacoustic::cli::config::{DiscretizationConfig, DtPolicy, HStudy, StudyTime};
use elastoacoustic::cli::converge::{h_study, h_table};
use elastoacoustic::scenarios::test_case_1;
use elastoacoustic::timestepper::Startup;

fn main() -> elastoacoustic::Result<()> {
    let scenario = test_case_1()?;
    let degree = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let study = HStudy { degree, elements: vec![20, 40, 80, 160], base_elements: None, refinements: None };
    let time = StudyTime { dt: 1e-4, dt_policy: DtPolicy::Fixed, final_time: 0.05, startup: Startup::Taylor1 };
    let levels = h_study(&scenario, &study, &time, &DiscretizationConfig::default(), 50, 1)?;

    let table = h_table(&levels)?;
    println!("{:>8} {:>6} {:>11} {:>11} {:>11} {:>11}", "h", "dofs", "dG u", "dG phi", "L2 u", "L2 phi");
    for r in &table.rows {
        println!("{:8.4} {:6} {:11.3e} {:11.3e} {:11.3e} {:11.3e}", r.h, r.dofs, r.errors[0], r.errors[1], r.errors[2], r.errors[3]);
    }
    let s = &table.slopes;
    println!("slopes: dG {:.2} / {:.2}, L2 {:.2} / {:.2} (expected about {} and {})", s[0], s[1], s[2], s[3], degree, degree + 1);
    Ok(())
}
