use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mesh::{FaceKind, PolyMesh};

/// Isotropic solid and fluid coefficients. Each element reads the fields of
/// its own region.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Material {
    pub rho_e: f64,
    pub lambda: f64,
    pub mu: f64,
    #[serde(default)]
    pub zeta: f64,
    pub rho_a: f64,
    pub c: f64,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rho_e > 0.0
            && self.rho_a > 0.0
            && self.mu > 0.0
            && self.lambda >= 0.0
            && self.c > 0.0
            && self.zeta >= 0.0
            && [self.rho_e, self.rho_a, self.mu, self.lambda, self.c, self.zeta].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid material {self:?}")))
        }
    }

    /// Largest eigenvalue of the elasticity tensor in Mandel notation, i.e.
    /// its operator norm. Equals `2 mu + 2 lambda` in 2D.
    pub fn c_bar(&self) -> f64 {
        let (l, m) = (self.lambda, self.mu);
        let voigt = Matrix3::new(l + 2.0 * m, l, 0.0, l, l + 2.0 * m, 0.0, 0.0, 0.0, 2.0 * m);
        SymmetricEigen::new(voigt).eigenvalues.max()
    }

    /// Pressure wave speed.
    pub fn c_p(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho_e).sqrt()
    }

    /// Shear wave speed.
    pub fn c_s(&self) -> f64 {
        (self.mu / self.rho_e).sqrt()
    }
}

/// Per-element coefficients.
#[derive(Debug, Clone)]
pub struct MaterialMap {
    per_element: Vec<Material>,
}

impl MaterialMap {
    pub fn uniform(n_elements: usize, m: Material) -> Self {
        Self { per_element: vec![m; n_elements] }
    }

    pub fn from_vec(per_element: Vec<Material>) -> Self {
        Self { per_element }
    }

    #[inline]
    pub fn get(&self, k: usize) -> &Material {
        &self.per_element[k]
    }

    pub fn validate(&self, n_elements: usize) -> Result<()> {
        if self.per_element.len() != n_elements {
            return Err(Error::Config(format!(
                "{} materials for {} elements",
                self.per_element.len(),
                n_elements
            )));
        }
        self.per_element.iter().try_for_each(Material::validate)
    }
}

/// How the penalty on Dirichlet faces is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPenalty {
    /// `alpha C p^2 / h` (resp. `beta`), like interior faces.
    #[default]
    Scaled,
    /// `C p^2 / h` without the user constant.
    Unscaled,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StabilizationParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub boundary: BoundaryPenalty,
}

impl Default for StabilizationParams {
    fn default() -> Self {
        Self { alpha: 10.0, beta: 10.0, boundary: BoundaryPenalty::Scaled }
    }
}

impl StabilizationParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("penalty constants must be positive, got alpha={} beta={}", self.alpha, self.beta)))
        }
    }
}

/// Penalty value from `(coefficient, degree, diameter)` of the face neighbours.
pub fn penalty(
    scale: f64,
    left: (f64, usize, f64),
    right: Option<(f64, usize, f64)>,
    boundary: BoundaryPenalty,
) -> f64 {
    let local = |(c, p, h): (f64, usize, f64)| c * (p * p) as f64 / h;
    match right {
        Some(r) => scale * local(left).max(local(r)),
        None => match boundary {
            BoundaryPenalty::Scaled => scale * local(left),
            BoundaryPenalty::Unscaled => local(left),
        },
    }
}

/// Elastic penalty `eta` on an elastic interior or Dirichlet face.
pub fn stabilization_eta(mesh: &PolyMesh, f: usize, mats: &MaterialMap, params: &StabilizationParams) -> Result<f64> {
    let face = &mesh.faces()[f];
    if !face.kind.is_elastic() {
        return Err(Error::Contract(format!("eta requested on {:?} face {f}", face.kind)));
    }
    let data = |k: usize| {
        let e = mesh.element(k);
        (mats.get(k).c_bar(), e.degree, e.diameter)
    };
    Ok(penalty(params.alpha, data(face.left), face.right.map(data), params.boundary))
}

/// Acoustic penalty `chi` on an acoustic interior or Dirichlet face.
pub fn stabilization_chi(mesh: &PolyMesh, f: usize, mats: &MaterialMap, params: &StabilizationParams) -> Result<f64> {
    let face = &mesh.faces()[f];
    if !face.kind.is_acoustic() {
        return Err(Error::Contract(format!("chi requested on {:?} face {f}", face.kind)));
    }
    let data = |k: usize| {
        let e = mesh.element(k);
        (mats.get(k).rho_a, e.degree, e.diameter)
    };
    Ok(penalty(params.beta, data(face.left), face.right.map(data), params.boundary))
}

/// Penalty of whichever field lives on face `f`.
pub(crate) fn face_penalty(mesh: &PolyMesh, f: usize, mats: &MaterialMap, params: &StabilizationParams) -> Result<f64> {
    match mesh.faces()[f].kind {
        FaceKind::InteriorElastic | FaceKind::BoundaryElasticDirichlet => stabilization_eta(mesh, f, mats, params),
        FaceKind::InteriorAcoustic | FaceKind::BoundaryAcousticDirichlet => stabilization_chi(mesh, f, mats, params),
        FaceKind::Interface => Err(Error::Contract(format!("no penalty on interface face {f}"))),
    }
}
