use crate::analysis::EnergyNorm;
use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::geometry::Point;

use super::{Observer, State};

/// What to record during a run. A period of 0 disables that output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeConfig {
    pub energy_every: usize,
    pub probe_every: usize,
    pub points: Vec<Point>,
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub n: usize,
    pub t: f64,
    pub elastic: f64,
    pub acoustic: f64,
    pub total: f64,
}

/// Point values `[u_x, u_y, phi]`; the field absent at the probe location reads 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub n: usize,
    pub t: f64,
    pub probe: usize,
    pub values: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Observer that samples energy, point values and full snapshots.
/// The final level is always recorded.
pub struct Recorder<'a> {
    disc: &'a Discretization,
    norm: Option<EnergyNorm>,
    config: ProbeConfig,
    located: Vec<usize>,
    n_levels: usize,
    pub energy: Vec<EnergySample>,
    pub probes: Vec<ProbeSample>,
    pub snapshots: Vec<Snapshot>,
}

impl<'a> Recorder<'a> {
    pub fn new(disc: &'a Discretization, norm: Option<EnergyNorm>, config: ProbeConfig, n_levels: usize) -> Result<Self> {
        let located = config
            .points
            .iter()
            .map(|&p| disc.mesh.locate(p).ok_or_else(|| Error::Config(format!("probe {p:?} lies outside the mesh"))))
            .collect::<Result<_>>()?;
        if config.energy_every > 0 && norm.is_none() {
            return Err(Error::Contract("energy sampling needs an energy norm".into()));
        }
        Ok(Self { disc, norm, config, located, n_levels, energy: Vec::new(), probes: Vec::new(), snapshots: Vec::new() })
    }

    fn due(&self, every: usize, n: usize) -> bool {
        every > 0 && (n % every == 0 || n == 1 || n == self.n_levels)
    }

    pub fn probe_values(&self, state: &State, probe: usize) -> [f64; 3] {
        let (k, p) = (self.located[probe], self.config.points[probe]);
        let d = self.disc;
        if d.elastic.contains(k) {
            let u = d.elastic.eval(&d.mesh, &state.u_curr, k, p);
            [u[0], u[1], 0.0]
        } else {
            [0.0, 0.0, d.acoustic.eval(&d.mesh, &state.phi_curr, k, p)[0]]
        }
    }
}

impl Observer for Recorder<'_> {
    fn observe(&mut self, state: &State) -> Result<()> {
        let (n, t) = (state.n, state.t());
        if self.due(self.config.energy_every, n) {
            if let Some(norm) = &self.norm {
                let e = norm.eval(state);
                self.energy.push(EnergySample { n, t, elastic: e.elastic, acoustic: e.acoustic, total: e.total });
            }
        }
        if self.due(self.config.probe_every, n) {
            for probe in 0..self.located.len() {
                let values = self.probe_values(state, probe);
                self.probes.push(ProbeSample { n, t, probe, values });
            }
        }
        if self.due(self.config.snapshot_every, n) {
            self.snapshots.push(Snapshot { n, t, u: state.u_curr.clone(), phi: state.phi_curr.clone() });
        }
        Ok(())
    }
}
