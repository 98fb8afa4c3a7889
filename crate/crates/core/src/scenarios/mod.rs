//! Manufactured and physical test problems on `(-1, 1) x (0, 1)` with the
//! solid on the left of `x = 0` and the fluid on the right.

mod custom;
mod simulation;
mod source;

pub use custom::{custom_scenario, CustomSpec, Expr, Profile, Term};
pub use simulation::Simulation;
pub use source::PointSource;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{LoadTerms, Material, SeparableTerm};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::DomainBox;
use crate::timestepper::{Field, InitialData};

pub type VectorFn = Arc<dyn Fn(Point, f64) -> [f64; 2] + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(Point, f64) -> [[f64; 2]; 2] + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

/// Exact fields. `grad_u(p, t)[c]` is the gradient of component `c`.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: VectorFn,
    pub grad_u: TensorFn,
    pub du: VectorFn,
    pub phi: ScalarFn,
    pub grad_phi: VectorFn,
    pub dphi: ScalarFn,
}

impl ExactSolution {
    /// Initial data `(u, u_t, phi, phi_t)` at `t = 0`.
    pub fn initial_data(&self) -> InitialData {
        let (u, du, phi, dphi) = (self.u.clone(), self.du.clone(), self.phi.clone(), self.dphi.clone());
        let u0: Field = Arc::new(move |p| u(p, 0.0));
        let u1: Field = Arc::new(move |p| du(p, 0.0));
        let phi0: Field = Arc::new(move |p| [phi(p, 0.0), 0.0]);
        let phi1: Field = Arc::new(move |p| [dphi(p, 0.0), 0.0]);
        InitialData { u0, u1, phi0, phi1 }
    }
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub material: Material,
    pub domain: DomainBox,
    pub interface_x: f64,
    pub exact: Option<ExactSolution>,
    /// Body forces and Dirichlet data; point sources are kept separately.
    pub loads: LoadTerms,
    pub initial: InitialData,
    pub sources: Vec<PointSource>,
    pub final_time: f64,
    pub dt: f64,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("material", &self.material)
            .field("sources", &self.sources)
            .field("final_time", &self.final_time)
            .field("dt", &self.dt)
            .finish_non_exhaustive()
    }
}

/// Largest residuals found by [`Scenario::self_check`], relative to the size of
/// the terms involved.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelfCheck {
    pub derivatives: f64,
    pub elastic_residual: f64,
    pub acoustic_residual: f64,
    pub transmission: f64,
}

const FD_STEP: f64 = 1e-5;
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const TRANSMISSION_TOL: f64 = 1e-10;

fn sum_terms(terms: &[SeparableTerm], p: Point, t: f64) -> [f64; 2] {
    terms.iter().fold([0.0; 2], |acc, term| {
        let v = term.eval(p, t);
        [acc[0] + v[0], acc[1] + v[1]]
    })
}

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (f(x + FD_STEP) - f(x - FD_STEP)) / (2.0 * FD_STEP)
}

fn shift(p: Point, dir: usize, s: f64) -> Point {
    let mut q = p;
    q[dir] += s;
    q
}

fn stress(m: &Material, g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let div = g[0][0] + g[1][1];
    let mut s = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            s[r][c] = m.mu * (g[r][c] + g[c][r]) + if r == c { m.lambda * div } else { 0.0 };
        }
    }
    s
}

fn rel(err: f64, scale: f64) -> f64 {
    err.abs() / scale.abs().max(1.0)
}

impl Scenario {
    /// Body force on the solid at `(p, t)`.
    pub fn force_e(&self, p: Point, t: f64) -> [f64; 2] {
        sum_terms(&self.loads.volume_e, p, t)
    }

    /// Acoustic source at `(p, t)`, point sources included.
    pub fn force_a(&self, p: Point, t: f64) -> f64 {
        sum_terms(&self.loads.volume_a, p, t)[0] + self.sources.iter().map(|s| s.eval(p, t)).sum::<f64>()
    }

    /// Load terms with point sources folded into the acoustic volume terms.
    pub fn load_terms(&self) -> LoadTerms {
        let mut terms = self.loads.clone();
        terms.volume_a.extend(self.sources.iter().map(PointSource::term));
        terms
    }

    fn sample(&self, rng: &mut ChaCha8Rng, elastic: bool) -> (Point, f64) {
        let d = self.domain;
        let (x0, x1) = if elastic { (d.x_min, self.interface_x) } else { (self.interface_x, d.x_max) };
        let x = rng.random_range(x0..x1);
        let y = rng.random_range(d.y_min..d.y_max);
        (([x, y]), rng.random_range(0.0..self.final_time))
    }

    /// Checks the exact solution against the forcing through the strong
    /// equations, its derivative closures against finite differences, and the
    /// transmission conditions on the interface. No-op without exact solution.
    pub fn self_check(&self, samples: usize, seed: u64) -> Result<SelfCheck> {
        let Some(ex) = &self.exact else { return Ok(SelfCheck::default()) };
        let m = &self.material;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = SelfCheck::default();
        for _ in 0..samples {
            let (p, t) = self.sample(&mut rng, true);
            let g = (ex.grad_u)(p, t);
            let du = (ex.du)(p, t);
            for c in 0..2 {
                for s in 0..2 {
                    let fd = central(|z| (ex.u)(shift(p, s, z - p[s]), t)[c], p[s]);
                    out.derivatives = out.derivatives.max(rel(fd - g[c][s], g[c][s]));
                }
                let fd = central(|z| (ex.u)(p, z)[c], t);
                out.derivatives = out.derivatives.max(rel(fd - du[c], du[c]));
            }
            let u = (ex.u)(p, t);
            let f = self.force_e(p, t);
            for c in 0..2 {
                let acc = central(|z| (ex.du)(p, z)[c], t);
                let div: f64 = (0..2)
                    .map(|s| central(|z| stress(m, (ex.grad_u)(shift(p, s, z - p[s]), t))[c][s], p[s]))
                    .sum();
                let inertia = m.rho_e * (acc + 2.0 * m.zeta * du[c] + m.zeta * m.zeta * u[c]);
                let scale = inertia.abs().max(div.abs()).max(f[c].abs());
                out.elastic_residual = out.elastic_residual.max(rel(f[c] - (inertia - div), scale));
            }

            let (p, t) = self.sample(&mut rng, false);
            let gp = (ex.grad_phi)(p, t);
            for s in 0..2 {
                let fd = central(|z| (ex.phi)(shift(p, s, z - p[s]), t), p[s]);
                out.derivatives = out.derivatives.max(rel(fd - gp[s], gp[s]));
            }
            let dphi = (ex.dphi)(p, t);
            out.derivatives = out.derivatives.max(rel(central(|z| (ex.phi)(p, z), t) - dphi, dphi));
            let acc = central(|z| (ex.dphi)(p, z), t) / (m.c * m.c);
            let lap: f64 = (0..2).map(|s| central(|z| (ex.grad_phi)(shift(p, s, z - p[s]), t)[s], p[s])).sum();
            let f = self.force_a(p, t);
            let scale = acc.abs().max(lap.abs()).max(f.abs());
            out.acoustic_residual = out.acoustic_residual.max(rel(f - (acc - lap), scale));

            // Interface: sigma(u) n_e = -rho_a phi_t n_e and grad phi . n_a = -u_t . n_a,
            // with n_e = (1, 0) = -n_a.
            let y = rng.random_range(self.domain.y_min..self.domain.y_max);
            let q = [self.interface_x, y];
            let sig = stress(m, (ex.grad_u)(q, t));
            let pr = -m.rho_a * (ex.dphi)(q, t);
            let du = (ex.du)(q, t);
            let gp = (ex.grad_phi)(q, t);
            let scale = sig[0][0].abs().max(sig[1][0].abs()).max(pr.abs()).max(gp[0].abs()).max(du[0].abs());
            let res = (sig[0][0] - pr).abs().max(sig[1][0].abs()).max((gp[0] + du[0]).abs());
            out.transmission = out.transmission.max(rel(res, scale));
        }
        if out.derivatives > DERIVATIVE_TOL {
            return Err(Error::Scenario(format!(
                "{}: derivative closures disagree with finite differences ({:.3e})",
                self.name, out.derivatives
            )));
        }
        if out.elastic_residual > RESIDUAL_TOL || out.acoustic_residual > RESIDUAL_TOL {
            return Err(Error::Scenario(format!(
                "{}: forcing does not match the exact solution (elastic {:.3e}, acoustic {:.3e})",
                self.name, out.elastic_residual, out.acoustic_residual
            )));
        }
        if out.transmission > TRANSMISSION_TOL {
            return Err(Error::Scenario(format!(
                "{}: exact solution violates the transmission conditions ({:.3e})",
                self.name, out.transmission
            )));
        }
        Ok(out)
    }
}

pub fn rock() -> Material {
    Material { rho_e: 2.7, lambda: 51.20, mu: 26.29, zeta: 0.0, rho_a: 1.0, c: 1.0 }
}

fn unit_box() -> DomainBox {
    DomainBox::new(-1.0, 1.0, 0.0, 1.0)
}

fn vector_term(s: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static, t: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SeparableTerm {
    SeparableTerm::new(s, t)
}

fn scalar_term(s: impl Fn(Point) -> f64 + Send + Sync + 'static, t: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SeparableTerm {
    SeparableTerm::new(move |p| [s(p), 0.0], t)
}

/// `u = x^2 cos(pi x / 2) sin(pi y) (1, 1) cos(sqrt2 pi t)`,
/// `phi = x^2 sin(pi x) sin(pi y) sin(sqrt2 pi t)`, homogeneous Dirichlet data.
pub fn test_case_1() -> Result<Scenario> {
    let m = rock();
    let w = 2f64.sqrt() * PI;
    let h = PI / 2.0;
    // u_x = u_y = X(x) Y(y) cos(wt)
    let x0 = move |x: f64| x * x * (h * x).cos();
    let x1 = move |x: f64| 2.0 * x * (h * x).cos() - h * x * x * (h * x).sin();
    let x2 = move |x: f64| (2.0 - h * h * x * x) * (h * x).cos() - 4.0 * h * x * (h * x).sin();
    let y0 = |y: f64| (PI * y).sin();
    let y1 = |y: f64| PI * (PI * y).cos();
    let y2 = |y: f64| -PI * PI * (PI * y).sin();
    // phi = P(x) Y(y) sin(wt)
    let p0 = |x: f64| x * x * (PI * x).sin();
    let p1 = |x: f64| 2.0 * x * (PI * x).sin() + PI * x * x * (PI * x).cos();
    let p2 = |x: f64| (2.0 - PI * PI * x * x) * (PI * x).sin() + 4.0 * PI * x * (PI * x).cos();

    let g = move |p: Point| x0(p[0]) * y0(p[1]);
    let exact = ExactSolution {
        u: Arc::new(move |p, t| [g(p) * (w * t).cos(); 2]),
        grad_u: Arc::new(move |p, t| {
            let r = [x1(p[0]) * y0(p[1]) * (w * t).cos(), x0(p[0]) * y1(p[1]) * (w * t).cos()];
            [r, r]
        }),
        du: Arc::new(move |p, t| [-w * g(p) * (w * t).sin(); 2]),
        phi: Arc::new(move |p, t| p0(p[0]) * y0(p[1]) * (w * t).sin()),
        grad_phi: Arc::new(move |p, t| {
            let s = (w * t).sin();
            [p1(p[0]) * y0(p[1]) * s, p0(p[0]) * y1(p[1]) * s]
        }),
        dphi: Arc::new(move |p, t| w * p0(p[0]) * y0(p[1]) * (w * t).cos()),
    };

    // div sigma(g (1,1)) = mu lap g (1,1) + (mu + lambda) grad(g_x + g_y)
    let fe = move |p: Point| {
        let (x, y) = (p[0], p[1]);
        let gxx = x2(x) * y0(y);
        let gxy = x1(x) * y1(y);
        let gyy = x0(x) * y2(y);
        let lap = gxx + gyy;
        let inertia = -w * w * m.rho_e * x0(x) * y0(y);
        [
            inertia - m.mu * lap - (m.mu + m.lambda) * (gxx + gxy),
            inertia - m.mu * lap - (m.mu + m.lambda) * (gxy + gyy),
        ]
    };
    let fa = move |p: Point| {
        let (x, y) = (p[0], p[1]);
        -w * w / (m.c * m.c) * p0(x) * y0(y) - (p2(x) * y0(y) + p0(x) * y2(y))
    };
    let loads = LoadTerms {
        volume_e: vec![vector_term(fe, move |t| (w * t).cos())],
        volume_a: vec![scalar_term(fa, move |t| (w * t).sin())],
        ..LoadTerms::default()
    };
    finish(Scenario {
        name: "test1".into(),
        material: m,
        domain: unit_box(),
        interface_x: 0.0,
        initial: exact.initial_data(),
        exact: Some(exact),
        loads,
        sources: Vec::new(),
        final_time: 1.0,
        dt: 1e-4,
    })
}

/// `u = (cos(4 pi x / c_p), cos(4 pi x / c_s)) cos(4 pi t)`, `phi = sin(4 pi x) sin(4 pi t)`.
/// Both fields solve the homogeneous equations; Dirichlet data are the exact traces.
pub fn test_case_2() -> Result<Scenario> {
    let m = rock();
    let w = 4.0 * PI;
    let (kp, ks) = (w / m.c_p(), w / m.c_s());
    let exact = ExactSolution {
        u: Arc::new(move |p, t| [(kp * p[0]).cos() * (w * t).cos(), (ks * p[0]).cos() * (w * t).cos()]),
        grad_u: Arc::new(move |p, t| {
            let c = (w * t).cos();
            [[-kp * (kp * p[0]).sin() * c, 0.0], [-ks * (ks * p[0]).sin() * c, 0.0]]
        }),
        du: Arc::new(move |p, t| {
            let s = -w * (w * t).sin();
            [(kp * p[0]).cos() * s, (ks * p[0]).cos() * s]
        }),
        phi: Arc::new(move |p, t| (w * p[0]).sin() * (w * t).sin()),
        grad_phi: Arc::new(move |p, t| [w * (w * p[0]).cos() * (w * t).sin(), 0.0]),
        dphi: Arc::new(move |p, t| w * (w * p[0]).sin() * (w * t).cos()),
    };
    let loads = LoadTerms {
        dirichlet_e: vec![vector_term(move |p| [(kp * p[0]).cos(), (ks * p[0]).cos()], move |t| (w * t).cos())],
        dirichlet_a: vec![scalar_term(move |p| (w * p[0]).sin(), move |t| (w * t).sin())],
        ..LoadTerms::default()
    };
    finish(Scenario {
        name: "test2".into(),
        material: m,
        domain: unit_box(),
        interface_x: 0.0,
        initial: exact.initial_data(),
        exact: Some(exact),
        loads,
        sources: Vec::new(),
        final_time: 0.8,
        dt: 1e-4,
    })
}

pub const DEFAULT_SOURCE_WIDTH: f64 = 0.025;

/// Ricker point source at `(0.2, 0.5)` in the fluid, zero initial data and body force.
pub fn test_case_3(sigma: f64) -> Result<Scenario> {
    let m = Material { rho_e: 2.5, lambda: 20.0, mu: 10.0, zeta: 0.0, rho_a: 1.0, c: 1.5 };
    let source = PointSource::new([0.2, 0.5], 0.1, 576.0, sigma)?;
    let s = Scenario {
        name: "test3".into(),
        material: m,
        domain: unit_box(),
        interface_x: 0.0,
        exact: None,
        loads: LoadTerms::default(),
        initial: InitialData::zero(),
        sources: vec![source],
        final_time: 1.0,
        dt: 1e-5,
    };
    for src in &s.sources {
        src.check_placement(&s.domain, s.interface_x)?;
    }
    finish(s)
}

fn finish(s: Scenario) -> Result<Scenario> {
    s.material.validate()?;
    s.self_check(20, 0x5eed)?;
    Ok(s)
}

/// Scenario by config name; `custom` goes through [`custom_scenario`].
pub fn by_name(name: &str, sigma: f64) -> Result<Scenario> {
    match name {
        "test1" => test_case_1(),
        "test2" => test_case_2(),
        "test3" => test_case_3(sigma),
        other => Err(Error::Config(format!("unknown scenario '{other}' (expected test1, test2, test3 or custom)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test1_vanishes_on_the_interface_and_at_t0() {
        let s = test_case_1().unwrap();
        let ex = s.exact.as_ref().unwrap();
        for i in 0..10 {
            let y = i as f64 / 9.0;
            for t in [0.0, 0.3, 0.77] {
                assert_eq!((ex.u)([0.0, y], t), [0.0, 0.0]);
                assert_eq!((ex.phi)([0.0, y], t), 0.0);
            }
            assert_eq!((ex.phi)([0.5, y], 0.0), 0.0);
        }
    }

    #[test]
    fn test1_initial_velocity_of_potential() {
        let s = test_case_1().unwrap();
        let p = [0.3, 0.6];
        let expect = 2f64.sqrt() * PI * 0.09 * (0.3 * PI).sin() * (0.6 * PI).sin();
        assert!(((s.initial.phi1)(p)[0] - expect).abs() < 1e-14);
        assert_eq!((s.initial.u1)([-0.4, 0.2]), [0.0, 0.0]);
    }

    #[test]
    fn self_checks_pass_on_many_samples() {
        for s in [test_case_1().unwrap(), test_case_2().unwrap()] {
            let r = s.self_check(200, 99).unwrap();
            assert!(r.elastic_residual <= RESIDUAL_TOL && r.acoustic_residual <= RESIDUAL_TOL, "{r:?}");
        }
    }

    #[test]
    fn wrong_forcing_is_caught() {
        let mut s = test_case_1().unwrap();
        s.loads.volume_a[0] = scalar_term(|p| p[0], |t| t);
        assert!(matches!(s.self_check(20, 1), Err(Error::Scenario(_))));
    }

    #[test]
    fn test2_wave_speeds() {
        let m = test_case_2().unwrap().material;
        let direct = (103.78f64 / 2.7).sqrt();
        assert!((m.c_p() - direct).abs() < 1e-14);
        assert!((m.c_p() - 6.1995).abs() < 5e-4);
        assert!((m.c_s() - (26.29f64 / 2.7).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn test2_transmission_holds_on_the_interface() {
        let s = test_case_2().unwrap();
        let ex = s.exact.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (y, t) = (rng.random_range(0.0..1.0), rng.random_range(0.0..0.8));
            let q = [0.0, y];
            // n_a = (-1, 0)
            let res = -(ex.grad_phi)(q, t)[0] + -(ex.du)(q, t)[0];
            assert!(res.abs() <= 1e-10);
            let sig = stress(&s.material, (ex.grad_u)(q, t));
            assert!(sig[0][0].abs() <= 1e-10 && sig[1][0].abs() <= 1e-10);
        }
    }

    #[test]
    fn test3_has_only_the_point_source() {
        let s = test_case_3(DEFAULT_SOURCE_WIDTH).unwrap();
        assert!(s.exact.is_none());
        assert!(s.loads.volume_e.is_empty());
        assert_eq!(s.force_e([-0.5, 0.5], 0.1), [0.0, 0.0]);
        assert_eq!((s.initial.u0)([-0.5, 0.5]), [0.0, 0.0]);
        assert_eq!(s.load_terms().volume_a.len(), 1);
    }

    #[test]
    fn unknown_name_is_a_config_error() {
        assert!(matches!(by_name("test4", 0.02), Err(Error::Config(_))));
    }
}
