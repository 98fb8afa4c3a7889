//! TOML configuration for `run` and `converge`. See `configs/` for examples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryPenalty, StabilizationParams};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{generate_mesh, read_mesh, MeshParams, PolyMesh, Region};
use crate::scenarios::{self, custom_scenario, CustomSpec, Scenario, DEFAULT_SOURCE_WIDTH};
use crate::timestepper::Startup;

fn default_seed() -> u64 {
    1
}

fn default_lloyd() -> usize {
    100
}

fn default_alpha() -> f64 {
    10.0
}

fn default_safety() -> f64 {
    0.5
}

fn default_sigma() -> f64 {
    DEFAULT_SOURCE_WIDTH
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Either a mesh file or generator parameters for the unit bidomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub n_elastic: usize,
    #[serde(default)]
    pub n_acoustic: usize,
    #[serde(default = "default_lloyd")]
    pub lloyd_iterations: usize,
    #[serde(default)]
    pub mirror_y: bool,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { file: None, n_elastic: 50, n_acoustic: 50, lloyd_iterations: default_lloyd(), mirror_y: false }
    }
}

impl MeshConfig {
    pub fn params(&self, seed: u64) -> MeshParams {
        let mut p = MeshParams::unit_bidomain(self.n_elastic, self.n_acoustic, seed);
        p.lloyd_iterations = self.lloyd_iterations;
        p.mirror_y = self.mirror_y;
        p
    }

    /// Loads or generates the mesh; relative file paths resolve against `base`.
    pub fn build(&self, seed: u64, base: &Path) -> Result<PolyMesh> {
        match &self.file {
            Some(f) => {
                let path = if f.is_absolute() { f.clone() } else { base.join(f) };
                if !path.exists() {
                    return Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("mesh file {} does not exist", path.display()))));
                }
                read_mesh(path)
            }
            None => {
                if self.n_elastic == 0 || self.n_acoustic == 0 {
                    return Err(Error::Config("mesh needs n_elastic and n_acoustic > 0 or a file".into()));
                }
                generate_mesh(&self.params(seed))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub degree: Option<usize>,
    pub degree_elastic: Option<usize>,
    pub degree_acoustic: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_alpha")]
    pub beta: f64,
    #[serde(default)]
    pub boundary_penalty: BoundaryPenalty,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self { degree: Some(2), degree_elastic: None, degree_acoustic: None, alpha: 10.0, beta: 10.0, boundary_penalty: BoundaryPenalty::Scaled }
    }
}

impl DiscretizationConfig {
    pub fn stabilization(&self) -> Result<StabilizationParams> {
        let s = StabilizationParams { alpha: self.alpha, beta: self.beta, boundary: self.boundary_penalty };
        s.validate()?;
        Ok(s)
    }

    /// Applies the configured degrees; per-region values override `degree`.
    pub fn apply_degrees(&self, mesh: &mut PolyMesh) -> Result<()> {
        if let Some(p) = self.degree {
            mesh.set_uniform_degree(p);
        }
        if let Some(p) = self.degree_elastic {
            mesh.set_region_degree(Region::Elastic, p);
        }
        if let Some(p) = self.degree_acoustic {
            mesh.set_region_degree(Region::Acoustic, p);
        }
        if mesh.elements().iter().any(|e| e.degree == 0) {
            return Err(Error::Config("polynomial degree must be at least 1".into()));
        }
        Ok(())
    }
}

/// `dt = 1e-4` or `dt = "auto"` (CFL estimate times `safety`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStep {
    Fixed(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Scenario default when absent.
    pub dt: Option<TimeStep>,
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// Scenario default when absent.
    pub final_time: Option<f64>,
    #[serde(default)]
    pub startup: Startup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    #[serde(default)]
    pub energy_every: usize,
    #[serde(default)]
    pub probe_every: usize,
    #[serde(default)]
    pub probes: Vec<Point>,
    #[serde(default)]
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_out(), energy_every: 0, probe_every: 0, probes: Vec::new(), snapshot_every: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self { sigma: default_sigma() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub threads: Option<usize>,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub source: SourceConfig,
    pub custom: Option<CustomSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DtPolicy {
    #[default]
    Fixed,
    /// `dt` scales with `h` relative to the coarsest mesh.
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HStudy {
    pub degree: usize,
    /// Total element counts, split evenly between the subdomains.
    #[serde(default)]
    pub elements: Vec<usize>,
    /// Alternative to `elements`: `base_elements * 2^k` for `k < refinements`.
    pub base_elements: Option<usize>,
    pub refinements: Option<usize>,
}

impl HStudy {
    pub fn element_counts(&self) -> Result<Vec<usize>> {
        let counts = match (self.elements.is_empty(), self.base_elements, self.refinements) {
            (false, None, None) => self.elements.clone(),
            (true, Some(b), Some(r)) => (0..r).map(|k| b << k).collect(),
            _ => return Err(Error::Config("h study needs either `elements` or `base_elements` + `refinements`".into())),
        };
        if counts.len() < 2 {
            return Err(Error::Config(format!("rate fit needs at least 2 refinement levels, got {}", counts.len())));
        }
        if counts.iter().any(|&n| n < 2) {
            return Err(Error::Config("each level needs at least 2 elements".into()));
        }
        Ok(counts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PStudy {
    pub elements: usize,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyTime {
    pub dt: f64,
    #[serde(default)]
    pub dt_policy: DtPolicy,
    pub final_time: f64,
    #[serde(default)]
    pub startup: Startup,
}

fn default_norms() -> Vec<String> {
    NORMS.iter().map(|s| s.to_string()).collect()
}

/// Error norms in CSV column order.
pub const NORMS: [&str; 4] = ["err_dG_u", "err_dG_phi", "err_L2_u", "err_L2_phi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub scenario: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub threads: Option<usize>,
    #[serde(default = "default_lloyd")]
    pub lloyd_iterations: usize,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    pub time: StudyTime,
    pub h: Option<HStudy>,
    pub p: Option<PStudy>,
    #[serde(default = "default_norms")]
    pub norms: Vec<String>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub custom: Option<CustomSpec>,
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display()))))
}

/// Scenario from its config name, with the custom section when needed.
pub fn build_scenario(name: &str, sigma: f64, custom: Option<&CustomSpec>) -> Result<Scenario> {
    match (name, custom) {
        ("custom", Some(spec)) => custom_scenario(spec),
        ("custom", None) => Err(Error::Config("scenario 'custom' needs a [custom] section".into())),
        (other, _) => scenarios::by_name(other, sigma),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = parse(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.discretization.stabilization()?;
        if self.discretization.degree.is_none() && (self.discretization.degree_elastic.is_none() || self.discretization.degree_acoustic.is_none()) {
            return Err(Error::Config("set `degree` or both `degree_elastic` and `degree_acoustic`".into()));
        }
        if [self.discretization.degree, self.discretization.degree_elastic, self.discretization.degree_acoustic].contains(&Some(0)) {
            return Err(Error::Config("polynomial degree must be at least 1".into()));
        }
        match self.time.dt {
            Some(TimeStep::Fixed(dt)) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
            Some(TimeStep::Auto(_)) if !(self.time.safety > 0.0 && self.time.safety <= 1.0) => {
                return Err(Error::Config(format!("safety must be in (0, 1], got {}", self.time.safety)));
            }
            _ => {}
        }
        if let Some(t) = self.time.final_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("final_time must be positive, got {t}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        build_scenario(&self.scenario, self.source.sigma, self.custom.as_ref())
    }
}

impl ConvergenceConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = parse(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.discretization.stabilization()?;
        if self.h.is_none() && self.p.is_none() {
            return Err(Error::Config("convergence config needs an [h] or [p] study".into()));
        }
        if let Some(h) = &self.h {
            h.element_counts()?;
            if h.degree == 0 {
                return Err(Error::Config("polynomial degree must be at least 1".into()));
            }
        }
        if let Some(p) = &self.p {
            if p.degrees.len() < 2 || p.degrees.contains(&0) {
                return Err(Error::Config("p study needs at least 2 degrees, all >= 1".into()));
            }
        }
        if !(self.time.dt > 0.0 && self.time.final_time > 0.0) {
            return Err(Error::Config("dt and final_time must be positive".into()));
        }
        if let Some(n) = self.norms.iter().find(|n| !NORMS.contains(&n.as_str())) {
            return Err(Error::Config(format!("unknown norm '{n}' (expected one of {NORMS:?})")));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        build_scenario(&self.scenario, DEFAULT_SOURCE_WIDTH, self.custom.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_config() {
        let c = RunConfig::from_toml("scenario = \"test1\"").unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.discretization.degree, Some(2));
        assert_eq!(c.time.dt, None);
        assert_eq!(c.output.dir, PathBuf::from("out"));
    }

    #[test]
    fn auto_and_fixed_time_steps() {
        let c = RunConfig::from_toml("scenario = \"test1\"\n[time]\ndt = \"auto\"\nsafety = 0.4").unwrap();
        assert_eq!(c.time.dt, Some(TimeStep::Auto(AutoTag::Auto)));
        let c = RunConfig::from_toml("scenario = \"test1\"\n[time]\ndt = 1e-3").unwrap();
        assert_eq!(c.time.dt, Some(TimeStep::Fixed(1e-3)));
        assert!(RunConfig::from_toml("scenario = \"test1\"\n[time]\ndt = -1.0").is_err());
        assert!(RunConfig::from_toml("scenario = \"test1\"\n[time]\ndt = \"later\"").is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "scenario = \"test1\"\n[discretization]\ndegree = 0",
            "scenario = \"test1\"\n[discretization]\nalpha = -1.0",
            "scenario = \"test1\"\nunknown = 3",
            "scenario = \"test1\"\nthreads = 0",
        ] {
            assert!(matches!(RunConfig::from_toml(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn missing_mesh_file_is_reported() {
        let m = MeshConfig { file: Some("does/not/exist.mesh".into()), ..MeshConfig::default() };
        assert!(matches!(m.build(1, Path::new(".")), Err(Error::Io(_))));
    }

    #[test]
    fn refinement_count_doubles() {
        let h = HStudy { degree: 2, elements: vec![], base_elements: Some(50), refinements: Some(4) };
        assert_eq!(h.element_counts().unwrap(), vec![50, 100, 200, 400]);
    }

    #[test]
    fn single_level_study_is_rejected() {
        let text = "scenario = \"test1\"\n[time]\ndt = 1e-4\nfinal_time = 0.2\n[h]\ndegree = 2\nelements = [50]";
        assert!(matches!(ConvergenceConfig::from_toml(text), Err(Error::Config(_))));
    }

    #[test]
    fn custom_needs_its_section() {
        let c = RunConfig::from_toml("scenario = \"custom\"").unwrap();
        assert!(matches!(c.scenario(), Err(Error::Config(_))));
    }
}
