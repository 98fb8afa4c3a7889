//! Leap-frog integration of the coupled second-order system
//!
//! ```text
//! M1 U'' + M2 U' + (A + M3) U + C Phi' = F_e
//! Ma Phi'' + Aa Phi - C^T U'       = F_a
//! ```
//!
//! with centred differences. The coupling enters the left-hand side through
//! the centred velocity, so each step solves
//! `[[M1 + dt/2 M2, dt/2 C], [-dt/2 C^T, Ma]] [U+; Phi+] = rhs`.
//! All mass matrices are block diagonal, so the solve reduces to a Schur
//! complement on the elastic dofs of elements touching the interface.

mod blockdiag;
mod probes;

pub use blockdiag::BlockDiagonal;
pub use probes::{EnergySample, ProbeConfig, ProbeSample, Recorder, Snapshot};

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::assembly::{Discretization, LoadOperator, SystemMatrices};
use crate::error::{Error, Result};
use crate::fespace::l2_project;
use crate::geometry::Point;
use crate::sparse::CsrMatrix;

/// Two consecutive time levels of both fields.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    pub phi_prev: Vec<f64>,
    pub phi_curr: Vec<f64>,
    /// Index of the current level.
    pub n: usize,
    pub dt: f64,
}

impl State {
    pub fn zero(n_e: usize, n_a: usize, dt: f64) -> Self {
        Self {
            u_prev: vec![0.0; n_e],
            u_curr: vec![0.0; n_e],
            phi_prev: vec![0.0; n_a],
            phi_curr: vec![0.0; n_a],
            n: 1,
            dt,
        }
    }

    pub fn t(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Backward-difference velocities `((U^n - U^{n-1}) / dt, (Phi^n - Phi^{n-1}) / dt)`.
    pub fn velocities(&self) -> (Vec<f64>, Vec<f64>) {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) / self.dt).collect();
        (d(&self.u_curr, &self.u_prev), d(&self.phi_curr, &self.phi_prev))
    }
}

pub type Field = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// Initial displacement/velocity and potential/potential rate. Scalar fields
/// use the first component.
#[derive(Clone)]
pub struct InitialData {
    pub u0: Field,
    pub u1: Field,
    pub phi0: Field,
    pub phi1: Field,
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InitialData { .. }")
    }
}

impl InitialData {
    pub fn zero() -> Self {
        let z: Field = Arc::new(|_| [0.0; 2]);
        Self { u0: z.clone(), u1: z.clone(), phi0: z.clone(), phi1: z }
    }
}

/// Projects the initial data and takes the startup step `X^1 = X^0 + dt V^0`.
pub fn initial_state(disc: &Discretization, data: &InitialData, dt: f64) -> Result<State> {
    let (mesh, e, a) = (&disc.mesh, &disc.elastic, &disc.acoustic);
    let u0 = l2_project(mesh, e, |p| (data.u0)(p))?;
    let v0 = l2_project(mesh, e, |p| (data.u1)(p))?;
    let phi0 = l2_project(mesh, a, |p| (data.phi0)(p))?;
    let psi0 = l2_project(mesh, a, |p| (data.phi1)(p))?;
    Ok(startup(u0, v0, phi0, psi0, dt))
}

/// `State` at level 1 from coefficient vectors of the initial data.
pub fn startup(u0: Vec<f64>, v0: Vec<f64>, phi0: Vec<f64>, psi0: Vec<f64>, dt: f64) -> State {
    let u1 = u0.iter().zip(&v0).map(|(u, v)| u + dt * v).collect();
    let phi1 = phi0.iter().zip(&psi0).map(|(p, v)| p + dt * v).collect();
    State { u_prev: u0, u_curr: u1, phi_prev: phi0, phi_curr: phi1, n: 1, dt }
}

/// First step rule. `Taylor1` is `X^1 = X^0 + dt V^0`; `Taylor2` adds
/// `dt^2/2` times the acceleration the system prescribes at `t = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Startup {
    #[default]
    Taylor1,
    Taylor2,
}

/// `State` at level 1 with the `Taylor2` rule; `fe0`, `fa0` are the loads at `t = 0`.
#[allow(clippy::too_many_arguments)]
pub fn startup_taylor2(
    m: &SystemMatrices,
    u0: Vec<f64>,
    v0: Vec<f64>,
    phi0: Vec<f64>,
    psi0: Vec<f64>,
    fe0: &[f64],
    fa0: &[f64],
    dt: f64,
) -> Result<State> {
    // M1 a = Fe - M2 v - (A + M3) u - C psi
    let mut ae = fe0.to_vec();
    m.m_e2.mul_vec_add(-1.0, &v0, &mut ae);
    m.a_e.mul_vec_add(-1.0, &u0, &mut ae);
    m.m_e3.mul_vec_add(-1.0, &u0, &mut ae);
    m.c_e.mul_vec_add(-1.0, &psi0, &mut ae);
    BlockDiagonal::new(&m.m_e1, &m.elastic_blocks)?.solve_in_place(&mut ae);
    // Ma b = Fa - Aa phi + C^T v
    let mut aa = fa0.to_vec();
    m.a_a.mul_vec_add(-1.0, &phi0, &mut aa);
    m.c_e.transpose().mul_vec_add(1.0, &v0, &mut aa);
    BlockDiagonal::new(&m.m_a, &m.acoustic_blocks)?.solve_in_place(&mut aa);
    let h2 = 0.5 * dt * dt;
    let u1 = (0..u0.len()).map(|i| u0[i] + dt * v0[i] + h2 * ae[i]).collect();
    let phi1 = (0..phi0.len()).map(|i| phi0[i] + dt * psi0[i] + h2 * aa[i]).collect();
    Ok(State { u_prev: u0, u_curr: u1, phi_prev: phi0, phi_curr: phi1, n: 1, dt })
}

/// Dense Schur complement on the elastic dofs coupled to the fluid.
#[derive(Debug, Clone)]
struct Schur {
    dofs: Vec<usize>,
    factor: Cholesky<f64, Dyn>,
}

/// Factorized left block and the right-hand-side matrices for a fixed `dt`.
#[derive(Debug, Clone)]
pub struct LeapfrogOperator {
    dt: f64,
    /// `M1 + dt/2 M2`
    p: CsrMatrix,
    p_inv: BlockDiagonal,
    m_a: CsrMatrix,
    m_a_inv: BlockDiagonal,
    c: CsrMatrix,
    ct: CsrMatrix,
    schur: Option<Schur>,
    /// `-M1 + dt/2 M2`
    r_prev: CsrMatrix,
    /// `2 M1 - dt^2 (A + M3)`
    k_e: CsrMatrix,
    /// `2 Ma - dt^2 Aa`
    k_a: CsrMatrix,
}

pub fn build_operator(m: &SystemMatrices, dt: f64) -> Result<LeapfrogOperator> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let h = 0.5 * dt;
    let p = CsrMatrix::linear_combination(1.0, &m.m_e1, h, &m.m_e2);
    let p_inv = BlockDiagonal::new(&p, &m.elastic_blocks)?;
    let m_a_inv = BlockDiagonal::new(&m.m_a, &m.acoustic_blocks)?;
    let ct = m.c_e.transpose();

    // Elastic blocks with any coupling entry.
    let coupled: Vec<(usize, usize)> = m
        .elastic_blocks
        .iter()
        .copied()
        .filter(|&(off, len)| (off..off + len).any(|i| m.c_e.row(i).1.iter().any(|&v| v != 0.0)))
        .collect();
    let schur = if coupled.is_empty() {
        None
    } else {
        let dofs: Vec<usize> = coupled.iter().flat_map(|&(off, len)| off..off + len).collect();
        let ni = dofs.len();
        // Z = Ma^-1 C_I^T, column by column.
        let mut z = DMatrix::zeros(m.n_acoustic(), ni);
        let mut col = vec![0.0; m.n_acoustic()];
        for (c, &i) in dofs.iter().enumerate() {
            col.fill(0.0);
            let (js, vs) = m.c_e.row(i);
            for (&j, &v) in js.iter().zip(vs) {
                col[j] = v;
            }
            m_a_inv.solve_in_place(&mut col);
            z.column_mut(c).copy_from_slice(&col);
        }
        let mut s = DMatrix::zeros(ni, ni);
        for (r, &i) in dofs.iter().enumerate() {
            let (js, vs) = m.c_e.row(i);
            for c in 0..ni {
                let cz: f64 = js.iter().zip(vs).map(|(&j, &v)| v * z[(j, c)]).sum();
                s[(r, c)] = h * h * cz;
            }
            let (pj, pv) = p.row(i);
            for (&j, &v) in pj.iter().zip(pv) {
                if let Ok(c) = dofs.binary_search(&j) {
                    s[(r, c)] += v;
                }
            }
        }
        // Symmetrize round-off before factorizing.
        let s = (&s + s.transpose()) * 0.5;
        let factor = Cholesky::new(s).ok_or_else(|| Error::Factorization("interface Schur complement is not positive definite".into()))?;
        Some(Schur { dofs, factor })
    };

    let r_prev = CsrMatrix::linear_combination(-1.0, &m.m_e1, h, &m.m_e2);
    let stiff = CsrMatrix::linear_combination(1.0, &m.a_e, 1.0, &m.m_e3);
    let k_e = CsrMatrix::linear_combination(2.0, &m.m_e1, -dt * dt, &stiff);
    let k_a = CsrMatrix::linear_combination(2.0, &m.m_a, -dt * dt, &m.a_a);
    Ok(LeapfrogOperator {
        dt,
        p,
        p_inv,
        m_a: m.m_a.clone(),
        m_a_inv,
        c: m.c_e.clone(),
        ct,
        schur,
        r_prev,
        k_e,
        k_a,
    })
}

impl LeapfrogOperator {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_elastic(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_acoustic(&self) -> usize {
        self.m_a.nrows()
    }

    /// The left block as an explicit sparse matrix (elastic dofs first).
    pub fn left_block(&self) -> CsrMatrix {
        let (ne, na) = (self.n_elastic(), self.n_acoustic());
        let h = 0.5 * self.dt;
        let mut t: Vec<(usize, usize, f64)> = self.p.iter().collect();
        t.extend(self.c.iter().map(|(i, j, v)| (i, ne + j, h * v)));
        t.extend(self.ct.iter().map(|(i, j, v)| (ne + i, j, -h * v)));
        t.extend(self.m_a.iter().map(|(i, j, v)| (ne + i, ne + j, v)));
        CsrMatrix::from_triplets(ne + na, ne + na, t)
    }

    /// Solves the left block for `(b1, b2)`.
    pub fn solve(&self, b1: &[f64], b2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * self.dt;
        let t = self.m_a_inv.solve(b2);
        let mut r = b1.to_vec();
        self.c.mul_vec_add(-h, &t, &mut r);
        let mut x = r.clone();
        self.p_inv.solve_in_place(&mut x);
        if let Some(s) = &self.schur {
            let rhs = DVector::from_iterator(s.dofs.len(), s.dofs.iter().map(|&i| r[i]));
            let sol = s.factor.solve(&rhs);
            for (k, &i) in s.dofs.iter().enumerate() {
                x[i] = sol[k];
            }
        }
        let mut y = b2.to_vec();
        self.ct.mul_vec_add(h, &x, &mut y);
        self.m_a_inv.solve_in_place(&mut y);
        (x, y)
    }

    /// Advances `state` by one level with loads evaluated at the current time.
    pub fn step(&self, state: &mut State, fe: &[f64], fa: &[f64]) -> Result<()> {
        let (dt, h) = (self.dt, 0.5 * self.dt);
        let mut b1 = vec![0.0; self.n_elastic()];
        self.r_prev.mul_vec(&state.u_prev, &mut b1);
        self.c.mul_vec_add(h, &state.phi_prev, &mut b1);
        self.k_e.mul_vec_add(1.0, &state.u_curr, &mut b1);
        b1.iter_mut().zip(fe).for_each(|(b, f)| *b += dt * dt * f);

        let mut b2 = vec![0.0; self.n_acoustic()];
        self.m_a.mul_vec(&state.phi_prev, &mut b2);
        b2.iter_mut().for_each(|b| *b = -*b);
        self.ct.mul_vec_add(-h, &state.u_prev, &mut b2);
        self.k_a.mul_vec_add(1.0, &state.phi_curr, &mut b2);
        b2.iter_mut().zip(fa).for_each(|(b, f)| *b += dt * dt * f);

        let (x, y) = self.solve(&b1, &b2);
        let next_n = state.n + 1;
        if x.iter().chain(&y).any(|v| !v.is_finite() || v.abs() > DIVERGENCE_THRESHOLD) {
            return Err(Error::Divergence { step: next_n, time: next_n as f64 * dt });
        }
        state.u_prev = std::mem::replace(&mut state.u_curr, x);
        state.phi_prev = std::mem::replace(&mut state.phi_curr, y);
        state.n = next_n;
        Ok(())
    }
}

/// Coefficients beyond this magnitude are reported as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e150;

/// Single step, free-function form.
pub fn step(op: &LeapfrogOperator, state: &mut State, fe: &[f64], fa: &[f64]) -> Result<()> {
    op.step(state, fe, fa)
}

/// Power-iteration estimate of the largest eigenvalue of
/// `blockdiag(M1, Ma)^-1 blockdiag(A + M3, Aa)`.
pub fn max_generalized_eigenvalue(m: &SystemMatrices) -> Result<f64> {
    const MAX_ITER: usize = 10_000;
    let (ne, na) = (m.n_elastic(), m.n_acoustic());
    let n = ne + na;
    if n == 0 {
        return Err(Error::Contract("no degrees of freedom".into()));
    }
    let me = BlockDiagonal::new(&m.m_e1, &m.elastic_blocks)?;
    let ma = BlockDiagonal::new(&m.m_a, &m.acoustic_blocks)?;
    let ke = CsrMatrix::linear_combination(1.0, &m.a_e, 1.0, &m.m_e3);
    let apply_k = |x: &[f64]| -> Vec<f64> {
        let mut y = ke.apply(&x[..ne]);
        y.extend(m.a_a.apply(&x[ne..]));
        y
    };
    let m_dot = |x: &[f64], y: &[f64]| m.m_e1.bilinear(&x[..ne], &y[..ne]) + m.m_a.bilinear(&x[ne..], &y[ne..]);

    // Deterministic, well-mixed start vector.
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let h = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let norm = m_dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut lambda = 0.0;
    for it in 0..MAX_ITER {
        let kx = apply_k(&x);
        let next_lambda: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
        let mut y = kx;
        me.solve_in_place(&mut y[..ne]);
        ma.solve_in_place(&mut y[ne..]);
        let norm = m_dot(&y, &y).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
        if it > 10 && (next_lambda - lambda).abs() <= 1e-6 * next_lambda.abs() {
            return Ok(next_lambda);
        }
        lambda = next_lambda;
    }
    Err(Error::PowerIteration(MAX_ITER))
}

/// `safety * 2 / sqrt(lambda_max)`; the coupling is ignored, which the safety factor absorbs.
pub fn estimate_stable_dt(m: &SystemMatrices, safety: f64) -> Result<f64> {
    let lambda = max_generalized_eigenvalue(m)?;
    if lambda <= 0.0 {
        return Err(Error::Contract(format!("non-positive spectral estimate {lambda}")));
    }
    Ok(safety * 2.0 / lambda.sqrt())
}

/// Number of steps `N_T = round(T / dt)`; `dt` must divide `T`.
pub fn n_steps(final_time: f64, dt: f64) -> Result<usize> {
    if !(final_time > 0.0 && dt > 0.0) {
        return Err(Error::Config(format!("need T > 0 and dt > 0 (T={final_time}, dt={dt})")));
    }
    let n = (final_time / dt).round();
    if n < 1.0 || (n * dt - final_time).abs() > 1e-9 * final_time {
        return Err(Error::Config(format!("dt = {dt} does not divide T = {final_time}")));
    }
    Ok(n as usize)
}

pub trait Observer {
    fn observe(&mut self, state: &State) -> Result<()>;
}

impl<F: FnMut(&State) -> Result<()>> Observer for F {
    fn observe(&mut self, state: &State) -> Result<()> {
        self(state)
    }
}

/// Runs from level 1 to level `n_levels` (`N_T`), calling `observer` at level 1 and
/// after every step. Loads are evaluated at the time of the current level.
pub fn run(
    op: &LeapfrogOperator,
    loads: &LoadOperator,
    state: &mut State,
    n_levels: usize,
    observer: &mut dyn Observer,
) -> Result<()> {
    let (mut fe, mut fa) = (vec![0.0; op.n_elastic()], vec![0.0; op.n_acoustic()]);
    observer.observe(state)?;
    while state.n < n_levels {
        if !loads.is_zero() {
            loads.eval_into(state.t(), &mut fe, &mut fa);
        }
        op.step(state, &fe, &fa)?;
        observer.observe(state)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1x1 elastic system `m u'' + k u = 0` and no fluid.
    pub(crate) fn scalar_system(m: f64, k: f64) -> SystemMatrices {
        let one = |v: f64| CsrMatrix::from_triplets(1, 1, vec![(0, 0, v)]);
        SystemMatrices {
            m_e1: one(m),
            m_e2: CsrMatrix::zeros(1, 1),
            m_e3: CsrMatrix::zeros(1, 1),
            a_e: one(k),
            c_e: CsrMatrix::zeros(1, 0),
            m_a: CsrMatrix::zeros(0, 0),
            a_a: CsrMatrix::zeros(0, 0),
            elastic_blocks: vec![(0, 1)],
            acoustic_blocks: vec![],
        }
    }

    #[test]
    fn scalar_recurrence_matches_hand_values() {
        let op = build_operator(&scalar_system(1.0, 1.0), 0.1).unwrap();
        let mut s = startup(vec![1.0], vec![0.0], vec![], vec![], 0.1);
        assert_eq!(s.u_curr, vec![1.0]);
        op.step(&mut s, &[0.0], &[]).unwrap();
        assert!((s.u_curr[0] - 0.99).abs() < 1e-15);
        op.step(&mut s, &[0.0], &[]).unwrap();
        assert!((s.u_curr[0] - 0.9701).abs() < 1e-15);
        assert_eq!(s.n, 3);
    }

    #[test]
    fn scalar_cfl_estimate() {
        let dt = estimate_stable_dt(&scalar_system(1.0, 4.0), 0.5).unwrap();
        assert!((dt - 0.5).abs() < 1e-12);
    }

    #[test]
    fn step_count() {
        assert_eq!(n_steps(1.0, 1e-4).unwrap(), 10_000);
        assert_eq!(n_steps(0.2, 0.1).unwrap(), 2);
        assert!(n_steps(1.0, 0.3).is_err());
    }

    #[test]
    fn zero_state_stays_zero() {
        let op = build_operator(&scalar_system(2.0, 3.0), 0.01).unwrap();
        let mut s = State::zero(1, 0, 0.01);
        op.step(&mut s, &[0.0], &[]).unwrap();
        assert_eq!(s.u_curr, vec![0.0]);
    }

    #[test]
    fn blow_up_is_reported() {
        // dt far beyond 2 / sqrt(k / m).
        let op = build_operator(&scalar_system(1.0, 1.0), 3.0).unwrap();
        let mut s = startup(vec![1.0], vec![0.0], vec![], vec![], 3.0);
        let loads = LoadOperator::zero(1, 0);
        let err = run(&op, &loads, &mut s, 100_000, &mut |_: &State| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    fn coupled_system(zeta: f64) -> SystemMatrices {
        use crate::assembly::{Discretization, Material, StabilizationParams};
        use crate::mesh::{generate_mesh, MeshParams};
        let mut mesh = generate_mesh(&MeshParams::unit_bidomain(4, 4, 7)).unwrap();
        mesh.set_uniform_degree(2);
        let m = Material { rho_e: 2.7, lambda: 51.20, mu: 26.29, zeta, rho_a: 1.0, c: 1.0 };
        Discretization::uniform(mesh, m, StabilizationParams::default()).unwrap().system().unwrap()
    }

    fn wiggle(n: usize, s: f64) -> Vec<f64> {
        (0..n).map(|i| ((i as f64 + s) * 1.37).sin()).collect()
    }

    #[test]
    fn decoupled_solve_is_two_mass_solves() {
        let mut m = coupled_system(0.0);
        m.c_e = CsrMatrix::zeros(m.n_elastic(), m.n_acoustic());
        let op = build_operator(&m, 1e-3).unwrap();
        let (b1, b2) = (wiggle(m.n_elastic(), 0.0), wiggle(m.n_acoustic(), 1.0));
        let (x, y) = op.solve(&b1, &b2);
        let ex = BlockDiagonal::new(&m.m_e1, &m.elastic_blocks).unwrap().solve(&b1);
        let ey = BlockDiagonal::new(&m.m_a, &m.acoustic_blocks).unwrap().solve(&b2);
        for (a, b) in x.iter().zip(&ex).chain(y.iter().zip(&ey)) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn coupled_solve_has_small_residual() {
        let m = coupled_system(0.3);
        let op = build_operator(&m, 1e-2).unwrap();
        let (ne, na) = (m.n_elastic(), m.n_acoustic());
        let (b1, b2) = (wiggle(ne, 0.0), wiggle(na, 1.0));
        let (x, y) = op.solve(&b1, &b2);
        let xy: Vec<f64> = x.into_iter().chain(y).collect();
        let b: Vec<f64> = b1.into_iter().chain(b2).collect();
        let r = op.left_block().apply(&xy);
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let diff: Vec<f64> = r.iter().zip(&b).map(|(a, c)| a - c).collect();
        assert!(norm(&diff) <= 1e-11 * norm(&b));
    }

    #[test]
    fn coupling_entries_scale_with_dt() {
        let m = coupled_system(0.0);
        let (a, b) = (build_operator(&m, 2e-3).unwrap().left_block(), build_operator(&m, 1e-3).unwrap().left_block());
        let ne = m.n_elastic();
        let mut seen = 0;
        for (i, j, v) in a.iter() {
            if (i < ne) != (j < ne) {
                assert_eq!(b.get(i, j), 0.5 * v);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn stiffer_system_halves_the_estimate() {
        let m = coupled_system(0.0);
        let mut m4 = m.clone();
        m4.a_e = m.a_e.scaled(4.0);
        m4.a_a = m.a_a.scaled(4.0);
        let (d1, d4) = (estimate_stable_dt(&m, 0.5).unwrap(), estimate_stable_dt(&m4, 0.5).unwrap());
        assert!((d4 / d1 - 0.5).abs() < 0.01 * 0.5);
    }

    #[test]
    fn first_order_startup_limits_accuracy_to_first_order() {
        let err = |dt: f64| {
            let op = build_operator(&scalar_system(1.0, 1.0), dt).unwrap();
            let mut s = startup(vec![1.0], vec![0.0], vec![], vec![], dt);
            run(&op, &LoadOperator::zero(1, 0), &mut s, n_steps(1.0, dt).unwrap(), &mut |_: &State| Ok(())).unwrap();
            (s.u_curr[0] - 1f64.cos()).abs()
        };
        let ratio = err(0.01) / err(0.005);
        assert!((ratio - 2.0).abs() <= 0.1, "{ratio}");
    }

    #[test]
    fn second_order_in_time() {
        let err = |dt: f64| {
            let op = build_operator(&scalar_system(1.0, 1.0), dt).unwrap();
            let m = scalar_system(1.0, 1.0);
            let mut s = startup_taylor2(&m, vec![1.0], vec![0.0], vec![], vec![], &[0.0], &[], dt).unwrap();
            let loads = LoadOperator::zero(1, 0);
            run(&op, &loads, &mut s, n_steps(1.0, dt).unwrap(), &mut |_: &State| Ok(())).unwrap();
            (s.u_curr[0] - 1f64.cos()).abs()
        };
        let ratio = err(0.01) / err(0.005);
        assert!((ratio - 4.0).abs() <= 0.4, "{ratio}");
    }
}
