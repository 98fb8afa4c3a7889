//! User-defined manufactured solutions.
//!
//! Each field is a sum of terms `c x^a y^b X(kx x) Y(ky y) T(kt t)` with
//! `X, Y, T` one of `one`, `sin`, `cos`. Forcings are obtained by exact
//! differentiation of the terms; Dirichlet data are the exact traces.
//!
//! ```toml
//! [[custom.u_x]]
//! c = 1.0
//! x = 2
//! fx = "cos"
//! kx = 1.5707963267948966
//! fy = "sin"
//! ky = 3.141592653589793
//! ft = "cos"
//! kt = 4.442882938158366
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{finish, ExactSolution, Scenario};
use crate::assembly::{LoadTerms, Material, SeparableTerm};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::DomainBox;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    One,
    Sin,
    Cos,
}

impl Profile {
    fn eval(self, z: f64) -> f64 {
        match self {
            Profile::One => 1.0,
            Profile::Sin => z.sin(),
            Profile::Cos => z.cos(),
        }
    }

    /// `(factor, profile)` with `d/dz P(k z) = factor * k * profile(k z)`.
    fn derivative(self) -> Option<(f64, Profile)> {
        match self {
            Profile::One => None,
            Profile::Sin => Some((1.0, Profile::Cos)),
            Profile::Cos => Some((-1.0, Profile::Sin)),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub x: u32,
    #[serde(default)]
    pub y: u32,
    #[serde(default)]
    pub fx: Profile,
    #[serde(default)]
    pub kx: f64,
    #[serde(default)]
    pub fy: Profile,
    #[serde(default)]
    pub ky: f64,
    #[serde(default)]
    pub ft: Profile,
    #[serde(default)]
    pub kt: f64,
}

impl Term {
    pub fn space(&self, p: Point) -> f64 {
        self.c * p[0].powi(self.x as i32) * p[1].powi(self.y as i32) * self.fx.eval(self.kx * p[0]) * self.fy.eval(self.ky * p[1])
    }

    pub fn time(&self, t: f64) -> f64 {
        self.ft.eval(self.kt * t)
    }

    pub fn eval(&self, p: Point, t: f64) -> f64 {
        self.space(p) * self.time(t)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Expr(pub Vec<Term>);

#[derive(Clone, Copy)]
enum Var {
    X,
    Y,
    T,
}

impl Expr {
    pub fn eval(&self, p: Point, t: f64) -> f64 {
        self.0.iter().map(|term| term.eval(p, t)).sum()
    }

    fn diff(&self, v: Var) -> Expr {
        let mut out = Vec::new();
        for t in &self.0 {
            let (power, profile, k) = match v {
                Var::X => (Some(t.x), t.fx, t.kx),
                Var::Y => (Some(t.y), t.fy, t.ky),
                Var::T => (None, t.ft, t.kt),
            };
            if let Some(a) = power.filter(|&a| a > 0) {
                let mut d = *t;
                d.c *= a as f64;
                match v {
                    Var::X => d.x -= 1,
                    _ => d.y -= 1,
                }
                out.push(d);
            }
            if let Some((f, prof)) = profile.derivative() {
                let mut d = *t;
                d.c *= f * k;
                match v {
                    Var::X => d.fx = prof,
                    Var::Y => d.fy = prof,
                    Var::T => d.ft = prof,
                }
                out.push(d);
            }
        }
        out.retain(|t| t.c != 0.0);
        Expr(out)
    }

    pub fn dx(&self) -> Expr {
        self.diff(Var::X)
    }

    pub fn dy(&self) -> Expr {
        self.diff(Var::Y)
    }

    pub fn dt(&self) -> Expr {
        self.diff(Var::T)
    }

    pub fn scaled(&self, s: f64) -> Expr {
        Expr(self.0.iter().map(|t| Term { c: t.c * s, ..*t }).filter(|t| t.c != 0.0).collect())
    }

    fn plus(mut self, other: Expr) -> Expr {
        self.0.extend(other.0);
        self
    }

    /// Separable load terms placing this expression in component `c`.
    fn terms(&self, c: usize) -> Vec<SeparableTerm> {
        self.0
            .iter()
            .map(|&t| {
                SeparableTerm::new(
                    move |p| {
                        let mut v = [0.0; 2];
                        v[c] = t.space(p);
                        v
                    },
                    move |s| t.time(s),
                )
            })
            .collect()
    }
}

fn default_final_time() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub material: Material,
    #[serde(default)]
    pub u_x: Expr,
    #[serde(default)]
    pub u_y: Expr,
    #[serde(default)]
    pub phi: Expr,
    #[serde(default = "default_final_time")]
    pub final_time: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

/// Builds the scenario and runs its self-check; fails if the solution does not
/// satisfy the transmission conditions on `x = 0`.
pub fn custom_scenario(spec: &CustomSpec) -> Result<Scenario> {
    let m = spec.material;
    m.validate()?;
    if !(spec.final_time > 0.0 && spec.dt > 0.0) {
        return Err(Error::Config("custom scenario needs positive final_time and dt".into()));
    }
    let ux = spec.u_x.clone();
    let uy = spec.u_y.clone();
    let phi = spec.phi.clone();

    let (uxx, uxy, uxyy) = (ux.dx().dx(), ux.dx().dy(), ux.dy().dy());
    let (uyxx, uyxy, uyyy) = (uy.dx().dx(), uy.dx().dy(), uy.dy().dy());
    let inertia = |e: &Expr| {
        e.dt().dt().scaled(m.rho_e).plus(e.dt().scaled(2.0 * m.zeta * m.rho_e)).plus(e.scaled(m.zeta * m.zeta * m.rho_e))
    };
    let fx = inertia(&ux)
        .plus(uxx.scaled(-(m.lambda + 2.0 * m.mu)))
        .plus(uxyy.scaled(-m.mu))
        .plus(uyxy.scaled(-(m.lambda + m.mu)));
    let fy = inertia(&uy)
        .plus(uyxx.scaled(-m.mu))
        .plus(uyyy.scaled(-(m.lambda + 2.0 * m.mu)))
        .plus(uxy.scaled(-(m.lambda + m.mu)));
    let fa = phi.dt().dt().scaled(1.0 / (m.c * m.c)).plus(phi.dx().dx().scaled(-1.0)).plus(phi.dy().dy().scaled(-1.0));

    let mut volume_e = fx.terms(0);
    volume_e.extend(fy.terms(1));
    let mut dirichlet_e = ux.terms(0);
    dirichlet_e.extend(uy.terms(1));
    let loads = LoadTerms { volume_e, volume_a: fa.terms(0), dirichlet_e, dirichlet_a: phi.terms(0) };

    let grads = [[ux.dx(), ux.dy()], [uy.dx(), uy.dy()]];
    let (dux, duy) = (ux.dt(), uy.dt());
    let (ux2, uy2, phi2) = (ux.clone(), uy.clone(), phi.clone());
    let (pgx, pgy, pdt) = (phi.dx(), phi.dy(), phi.dt());
    let exact = ExactSolution {
        u: Arc::new(move |p, t| [ux2.eval(p, t), uy2.eval(p, t)]),
        grad_u: Arc::new(move |p, t| {
            [[grads[0][0].eval(p, t), grads[0][1].eval(p, t)], [grads[1][0].eval(p, t), grads[1][1].eval(p, t)]]
        }),
        du: Arc::new(move |p, t| [dux.eval(p, t), duy.eval(p, t)]),
        phi: Arc::new(move |p, t| phi2.eval(p, t)),
        grad_phi: Arc::new(move |p, t| [pgx.eval(p, t), pgy.eval(p, t)]),
        dphi: Arc::new(move |p, t| pdt.eval(p, t)),
    };
    finish(Scenario {
        name: "custom".into(),
        material: m,
        domain: DomainBox::new(-1.0, 1.0, 0.0, 1.0),
        interface_x: 0.0,
        initial: exact.initial_data(),
        exact: Some(exact),
        loads,
        sources: Vec::new(),
        final_time: spec.final_time,
        dt: spec.dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::scenarios::rock;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn term(c: f64, x: u32, fx: Profile, kx: f64, fy: Profile, ky: f64, ft: Profile, kt: f64) -> Term {
        Term { c, x, y: 0, fx, kx, fy, ky, ft, kt }
    }

    #[test]
    fn derivatives_of_a_monomial_times_cosine() {
        // d/dx x^2 cos(3x) = 2x cos(3x) - 3x^2 sin(3x)
        let e = Expr(vec![term(1.0, 2, Profile::Cos, 3.0, Profile::One, 0.0, Profile::One, 0.0)]);
        let x: f64 = 0.7;
        let expect = 2.0 * x * (3.0 * x).cos() - 3.0 * x * x * (3.0 * x).sin();
        assert!((e.dx().eval([x, 0.2], 0.0) - expect).abs() < 1e-14);
        assert!(e.dy().0.is_empty());
        assert!(e.dt().0.is_empty());
    }

    #[test]
    fn parses_from_toml() {
        let src = r#"
            final_time = 0.5
            [material]
            rho_e = 2.7
            lambda = 51.2
            mu = 26.29
            rho_a = 1.0
            c = 1.0
            [[u_x]]
            c = 2.0
            x = 2
            fx = "cos"
            kx = 1.0
            ft = "sin"
            kt = 2.0
        "#;
        let spec: CustomSpec = toml::from_str(src).unwrap();
        assert_eq!(spec.u_x.0.len(), 1);
        assert_eq!(spec.u_x.0[0].fy, Profile::One);
        assert_eq!(spec.dt, 1e-4);
    }

    #[test]
    fn test1_written_as_terms_passes() {
        let w = 2f64.sqrt() * PI;
        let u = Expr(vec![term(1.0, 2, Profile::Cos, PI / 2.0, Profile::Sin, PI, Profile::Cos, w)]);
        let spec = CustomSpec {
            material: rock(),
            u_x: u.clone(),
            u_y: u,
            phi: Expr(vec![term(1.0, 2, Profile::Sin, PI, Profile::Sin, PI, Profile::Sin, w)]),
            final_time: 1.0,
            dt: 1e-4,
        };
        let s = custom_scenario(&spec).unwrap();
        let reference = crate::scenarios::test_case_1().unwrap();
        for p in [[-0.3, 0.4], [-0.9, 0.1]] {
            let (a, b) = (s.force_e(p, 0.37), reference.force_e(p, 0.37));
            assert!((a[0] - b[0]).abs() < 1e-10 * b[0].abs().max(1.0));
            assert!((a[1] - b[1]).abs() < 1e-10 * b[1].abs().max(1.0));
        }
        let p = [0.45, 0.8];
        assert!((s.force_a(p, 0.61) - reference.force_a(p, 0.61)).abs() < 1e-10);
    }

    #[test]
    fn transmission_violation_is_rejected() {
        // Nonzero potential rate on the interface without matching traction.
        let spec = CustomSpec {
            material: rock(),
            u_x: Expr::default(),
            u_y: Expr::default(),
            phi: Expr(vec![term(1.0, 0, Profile::Cos, 1.0, Profile::One, 0.0, Profile::Sin, 1.0)]),
            final_time: 1.0,
            dt: 1e-4,
        };
        assert!(matches!(custom_scenario(&spec), Err(Error::Scenario(_))));
    }

    proptest! {
        #[test]
        fn symbolic_dx_matches_finite_differences(
            c in -2.0f64..2.0, a in 0u32..4, kx in 0.1f64..4.0, x in -1.0f64..1.0, y in 0.0f64..1.0,
            sin in any::<bool>(),
        ) {
            let fx = if sin { Profile::Sin } else { Profile::Cos };
            let e = Expr(vec![Term { c, x: a, y: 1, fx, kx, fy: Profile::Cos, ky: 2.0, ft: Profile::One, kt: 0.0 }]);
            let h = 1e-5;
            let fd = (e.eval([x + h, y], 0.0) - e.eval([x - h, y], 0.0)) / (2.0 * h);
            prop_assert!((fd - e.dx().eval([x, y], 0.0)).abs() < 1e-6);
        }
    }
}
