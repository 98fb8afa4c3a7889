use std::f64::consts::PI;

use crate::assembly::SeparableTerm;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::DomainBox;

/// Quadrature orders added for the mollified Dirac.
const SOURCE_EXTRA_ORDER: usize = 12;

/// Ricker wavelet in time times a normalized Gaussian of width `sigma` in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub center: Point,
    pub t0: f64,
    /// Shape parameter, in 1/time^2.
    pub a: f64,
    pub sigma: f64,
}

impl PointSource {
    pub fn new(center: Point, t0: f64, a: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Scenario(format!("source width must be positive, got {sigma}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Scenario(format!("Ricker parameter must be positive, got {a}")));
        }
        Ok(Self { center, t0, a, sigma })
    }

    /// `-2 pi a (1 - 2 pi a (t - t0)^2) exp(-pi a (t - t0)^2)`
    pub fn ricker(&self, t: f64) -> f64 {
        let s = PI * self.a * (t - self.t0).powi(2);
        -2.0 * PI * self.a * (1.0 - 2.0 * s) * (-s).exp()
    }

    pub fn mollifier(&self, p: Point) -> f64 {
        let r2 = (p[0] - self.center[0]).powi(2) + (p[1] - self.center[1]).powi(2);
        let s2 = self.sigma * self.sigma;
        (-r2 / (2.0 * s2)).exp() / (2.0 * PI * s2)
    }

    pub fn eval(&self, p: Point, t: f64) -> f64 {
        self.ricker(t) * self.mollifier(p)
    }

    pub fn term(&self) -> SeparableTerm {
        let s = *self;
        SeparableTerm::new(move |p| [s.mollifier(p), 0.0], move |t| s.ricker(t)).with_extra_order(SOURCE_EXTRA_ORDER)
    }

    /// Mass of the Gaussian inside `[x0, x1] x [y0, y1]`.
    pub fn mass_inside(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let cdf = |z: f64, c: f64| 0.5 * (1.0 + libm::erf((z - c) / (self.sigma * std::f64::consts::SQRT_2)));
        let (cx, cy) = (self.center[0], self.center[1]);
        (cdf(x1, cx) - cdf(x0, cx)) * (cdf(y1, cy) - cdf(y0, cy))
    }

    /// The center must lie strictly inside the fluid part of `domain`; warns when
    /// the Gaussian loses more than 0.1% of its mass outside.
    pub fn check_placement(&self, domain: &DomainBox, interface_x: f64) -> Result<()> {
        let [x, y] = self.center;
        if !(x > interface_x && x < domain.x_max && y > domain.y_min && y < domain.y_max) {
            return Err(Error::Scenario(format!("point source {:?} is not inside the fluid", self.center)));
        }
        let mass = self.mass_inside(interface_x, domain.x_max, domain.y_min, domain.y_max);
        if mass < 0.999 {
            log::warn!("only {:.4} of the source mass lies inside the fluid; reduce the width", mass);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_source() -> PointSource {
        PointSource::new([0.2, 0.5], 0.1, 576.0, 0.025).unwrap()
    }

    #[test]
    fn ricker_peak_value() {
        assert_eq!(reference_source().ricker(0.1), -2.0 * PI * 576.0);
        assert!((reference_source().ricker(0.1) + 3619.1).abs() < 0.05);
    }

    #[test]
    fn gaussian_is_normalized() {
        // Midpoint rule over a +-8 sigma square.
        let s = reference_source();
        let n = 400;
        let h = 16.0 * s.sigma / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = [s.center[0] - 8.0 * s.sigma + (i as f64 + 0.5) * h, s.center[1] - 8.0 * s.sigma + (j as f64 + 0.5) * h];
                total += s.mollifier(p) * h * h;
            }
        }
        assert!((total - 1.0).abs() < 1e-10);
        assert!((s.mass_inside(-1.0, 2.0, -1.0, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fluid_keeps_the_mass_for_narrow_sources() {
        for sigma in [0.01, 0.025, 0.04] {
            let s = PointSource { sigma, ..reference_source() };
            assert!((s.mass_inside(0.0, 1.0, 0.0, 1.0) - 1.0).abs() < 1e-6, "{sigma}");
        }
    }

    #[test]
    fn bad_sources_are_rejected() {
        assert!(PointSource::new([0.2, 0.5], 0.1, 576.0, 0.0).is_err());
        let d = DomainBox::new(-1.0, 1.0, 0.0, 1.0);
        let s = PointSource { center: [-0.2, 0.5], ..reference_source() };
        assert!(s.check_placement(&d, 0.0).is_err());
    }
}
