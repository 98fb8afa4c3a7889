use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{Discretization, FormParts};
use crate::error::Result;
use crate::fespace::SpaceKind;

fn random_fields(n: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Max over random fields of `||kappa^-1/2 {F(v)}||_faces / ||F(v) : grad v||^1/2_volume`
/// for each penalty scale (applied to both `alpha` and `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct FluxTraceReport {
    pub scales: Vec<f64>,
    pub max_ratio_e: Vec<f64>,
    pub max_ratio_a: Vec<f64>,
}

impl FluxTraceReport {
    /// Successive ratios `r_{k+1} / r_k` for the elastic and acoustic inequality.
    pub fn step_factors(&self) -> (Vec<f64>, Vec<f64>) {
        let f = |r: &[f64]| r.windows(2).map(|w| w[1] / w[0]).collect();
        (f(&self.max_ratio_e), f(&self.max_ratio_a))
    }
}

pub fn verify_flux_trace_scaling(disc: &Discretization, scales: &[f64], samples: usize, seed: u64) -> Result<FluxTraceReport> {
    let ve = disc.form(SpaceKind::VectorElastic, FormParts::VOLUME)?;
    let va = disc.form(SpaceKind::ScalarAcoustic, FormParts::VOLUME)?;
    let fe = random_fields(disc.elastic.n_dofs(), samples, seed);
    let fa = random_fields(disc.acoustic.n_dofs(), samples, seed.wrapping_add(1));
    let mut report = FluxTraceReport { scales: scales.to_vec(), max_ratio_e: Vec::new(), max_ratio_a: Vec::new() };
    for &s in scales {
        let mut d = disc.clone();
        d.stabilization.alpha = s;
        d.stabilization.beta = s;
        let ge = d.form(SpaceKind::VectorElastic, FormParts::FLUX_GRAM)?;
        let ga = d.form(SpaceKind::ScalarAcoustic, FormParts::FLUX_GRAM)?;
        let max_e = fe.iter().map(|v| ratio(ge.bilinear(v, v), ve.bilinear(v, v))).fold(0.0, f64::max);
        let max_a = fa.iter().map(|v| ratio(ga.bilinear(v, v), va.bilinear(v, v))).fold(0.0, f64::max);
        report.max_ratio_e.push(max_e);
        report.max_ratio_a.push(max_a);
    }
    Ok(report)
}

/// Range of `v'Av / ||v||_dG^2` over random fields, per subdomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighReport {
    pub min_e: f64,
    pub max_e: f64,
    pub min_a: f64,
    pub max_a: f64,
}

pub fn rayleigh_quotients(disc: &Discretization, samples: usize, seed: u64) -> Result<RayleighReport> {
    let (ne, na) = disc.norm_matrices()?;
    let ae = disc.form(SpaceKind::VectorElastic, FormParts::SIPG)?;
    let aa = disc.form(SpaceKind::ScalarAcoustic, FormParts::SIPG)?;
    let range = |a: &crate::sparse::CsrMatrix, n: &crate::sparse::CsrMatrix, fields: Vec<Vec<f64>>| {
        fields.iter().map(|v| a.bilinear(v, v) / n.bilinear(v, v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| (lo.min(q), hi.max(q)))
    };
    let (min_e, max_e) = range(&ae, &ne, random_fields(disc.elastic.n_dofs(), samples, seed));
    let (min_a, max_a) = range(&aa, &na, random_fields(disc.acoustic.n_dofs(), samples, seed.wrapping_add(1)));
    Ok(RayleighReport { min_e, max_e, min_a, max_a })
}

/// Min over random pairs `W = (v, psi)` of
/// `(||W||_dG^2 - 2 <{sigma(v)}, [v]> - 2 <{rho_a grad psi}, [psi]>) / ||W||_dG^2`.
pub fn coercivity_wedge(disc: &Discretization, samples: usize, seed: u64) -> Result<f64> {
    let (ne, na) = disc.norm_matrices()?;
    let ce = disc.form(SpaceKind::VectorElastic, FormParts::CONSISTENCY)?;
    let ca = disc.form(SpaceKind::ScalarAcoustic, FormParts::CONSISTENCY)?;
    let fe = random_fields(disc.elastic.n_dofs(), samples, seed);
    let fa = random_fields(disc.acoustic.n_dofs(), samples, seed.wrapping_add(1));
    Ok(fe
        .iter()
        .zip(&fa)
        .map(|(v, psi)| {
            let norm2 = ne.bilinear(v, v) + na.bilinear(psi, psi);
            // The consistency form already carries the factor -2.
            (norm2 + ce.bilinear(v, v) + ca.bilinear(psi, psi)) / norm2
        })
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Material, StabilizationParams};
    use crate::mesh::{generate_mesh, MeshParams};

    fn disc(p: usize) -> Discretization {
        let mut mesh = generate_mesh(&MeshParams::unit_bidomain(8, 8, 21)).unwrap();
        mesh.set_uniform_degree(p);
        let m = Material { rho_e: 2.7, lambda: 51.20, mu: 26.29, zeta: 0.0, rho_a: 1.0, c: 1.0 };
        Discretization::uniform(mesh, m, StabilizationParams::default()).unwrap()
    }

    #[test]
    fn trace_ratio_halves_when_penalty_quadruples() {
        let r = verify_flux_trace_scaling(&disc(2), &[1.0, 4.0, 16.0], 10, 3).unwrap();
        let (fe, fa) = r.step_factors();
        for f in fe.iter().chain(&fa) {
            assert!((f - 0.5).abs() < 0.5 * 0.15, "{r:?}");
        }
    }

    #[test]
    fn zero_field_ratio_is_zero() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
    }

    #[test]
    fn sipg_is_coercive_at_default_penalty() {
        let d = disc(2);
        assert!(coercivity_wedge(&d, 20, 5).unwrap() >= 0.1);
        let r = rayleigh_quotients(&d, 20, 5).unwrap();
        assert!(r.min_e >= 0.1 && r.max_e <= 100.0, "{r:?}");
        assert!(r.min_a >= 0.1 && r.max_a <= 100.0, "{r:?}");
    }
}
