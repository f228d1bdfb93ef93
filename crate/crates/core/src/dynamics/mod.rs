//! Time evolution of KdV, scaled ILW, the low-frequency system and the
//! coupled low/residual system.
//!
//! All equations share the form `v̂_t = i p̃_δ(ξ) v̂ + N(v)^`. The linear part is
//! integrated exactly through the integrating factor `e^{i t p̃_δ}`; the
//! nonlinearity is advanced with classical RK4 in the interaction picture
//! (integrating-factor RK4). Products are formed on the grid and truncated to
//! the retained band `|k| ≤ K`.

mod export;

pub use export::{read_trajectory, write_trajectory, TrajectoryManifest, TRAJECTORY_SCHEMA_VERSION};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{RealGrid, SpectralField, Transformer};
use crate::symbols::{p_tilde, DepthParameter};

/// Values above this modulus (or non-finite) count as blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;
/// Relative energy above the retained band tolerated on input.
pub const ALIASING_TOLERANCE: f64 = 1e-13;
pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    /// `v_t + v_xxx = (v²)_x`; the depth is ignored.
    KdV,
    /// `v_t - G̃_δ v_xx = (v²)_x`.
    ScaledIlw,
    /// Scaled ILW with `P_{1/δ}` applied to the data and to both sides of the product.
    LowFrequency,
    /// The pair `(v_low, v_res)` whose sum solves the scaled ILW.
    CoupledLowResidual,
}

impl EquationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EquationKind::KdV => "kdv",
            EquationKind::ScaledIlw => "scaled-ilw",
            EquationKind::LowFrequency => "low-frequency",
            EquationKind::CoupledLowResidual => "coupled-low-residual",
        }
    }

    pub fn is_coupled(self) -> bool {
        self == EquationKind::CoupledLowResidual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: RealGrid,
    pub delta: DepthParameter,
    /// Requested step; shortened so that a whole number of steps reaches `horizon`.
    pub dt: f64,
    pub horizon: f64,
    pub dealias_fraction: f64,
    pub record_every: usize,
    /// Sobolev index used for the `H^s` diagnostic.
    pub sobolev_index: f64,
    /// When false only the linear flow is applied.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn new(grid: RealGrid, delta: DepthParameter, dt: f64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            delta,
            dt,
            horizon,
            dealias_fraction: DEFAULT_DEALIAS_FRACTION,
            record_every: 1,
            sobolev_index: 0.0,
            nonlinear: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_sobolev_index(mut self, s: f64) -> Self {
        self.sobolev_index = s;
        self
    }

    pub fn with_dealias_fraction(mut self, f: f64) -> Self {
        self.dealias_fraction = f;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_delta(mut self, delta: DepthParameter) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Parameter(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Parameter(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Parameter("record_every must be >= 1".into()));
        }
        if !self.sobolev_index.is_finite() {
            return Err(Error::Parameter("sobolev_index must be finite".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// The step actually taken: `horizon / steps()`.
    pub fn effective_dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }
}

/// A single field, or the low/residual pair of the coupled system.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Single(SpectralField),
    Coupled {
        low: SpectralField,
        residual: SpectralField,
    },
}

impl State {
    pub fn grid(&self) -> &RealGrid {
        match self {
            State::Single(f) => f.grid(),
            State::Coupled { low, .. } => low.grid(),
        }
    }

    /// `v` itself, or `v_low + v_res`.
    pub fn total(&self) -> SpectralField {
        match self {
            State::Single(f) => f.clone(),
            State::Coupled { low, residual } => low.add(residual),
        }
    }

    pub fn components(&self) -> Vec<&SpectralField> {
        match self {
            State::Single(f) => vec![f],
            State::Coupled { low, residual } => vec![low, residual],
        }
    }

    pub fn single(&self) -> Option<&SpectralField> {
        match self {
            State::Single(f) => Some(f),
            State::Coupled { .. } => None,
        }
    }

    pub fn residual(&self) -> Option<&SpectralField> {
        match self {
            State::Single(_) => None,
            State::Coupled { residual, .. } => Some(residual),
        }
    }

    pub fn low(&self) -> Option<&SpectralField> {
        match self {
            State::Single(_) => None,
            State::Coupled { low, .. } => Some(low),
        }
    }

    fn to_buffers(&self) -> Vec<Vec<Complex64>> {
        self.components()
            .into_iter()
            .map(|f| f.coeffs().to_vec())
            .collect()
    }

    fn from_buffers(grid: RealGrid, coupled: bool, bufs: &[Vec<Complex64>]) -> Self {
        let field = |b: &Vec<Complex64>| SpectralField::from_coeffs_unchecked(grid, b.clone());
        if coupled {
            State::Coupled {
                low: field(&bufs[0]),
                residual: field(&bufs[1]),
            }
        } else {
            State::Single(field(&bufs[0]))
        }
    }
}

/// Per-snapshot diagnostics. Norms refer to the total field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub time: f64,
    pub l2: f64,
    pub hs: f64,
    /// Energy fraction in the outer fifth of the retained band (resolution check).
    pub edge_fraction: f64,
    /// `‖P⊥_{1/δ} v‖²` of the low component (of `v` for the single-field kinds).
    pub high_band_mass: f64,
    /// Real part of the ξ = 0 coefficient.
    pub mean: f64,
    /// `‖v_res‖_{L²}` for the coupled system, 0 otherwise.
    pub residual_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub kind: EquationKind,
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
    pub diagnostics: Vec<Diagnostics>,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> &State {
        self.snapshots.last().expect("a record holds at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub value: f64,
    /// True when the initial norm vanished and `value` is an absolute drift.
    pub absolute: bool,
}

/// `max_t |‖v(t)‖ - ‖v(0)‖| / ‖v(0)‖` over the recorded snapshots.
pub fn l2_drift(record: &TrajectoryRecord) -> Drift {
    let n0 = record.diagnostics.first().map_or(0.0, |d| d.l2);
    let worst = record
        .diagnostics
        .iter()
        .map(|d| (d.l2 - n0).abs())
        .fold(0.0, f64::max);
    if n0 == 0.0 {
        Drift {
            value: worst,
            absolute: true,
        }
    } else {
        Drift {
            value: worst / n0,
            absolute: false,
        }
    }
}

pub struct Solver {
    kind: EquationKind,
    config: SolverConfig,
    dt: f64,
    steps: usize,
    transformer: Transformer,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// `iξ` on the retained band, 0 elsewhere.
    deriv: Vec<Complex64>,
    low_mask: Vec<bool>,
    dealias_limit: usize,
    phys: [Vec<f64>; 3],
    spec: [Vec<Complex64>; 2],
    stages: [Vec<Vec<Complex64>>; 5],
}

impl Solver {
    pub fn new(kind: EquationKind, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid;
        let n = grid.mode_count();
        let delta = if kind == EquationKind::KdV {
            DepthParameter::KDV
        } else {
            config.delta
        };
        let dt = config.effective_dt();
        let symbol: Vec<f64> = (0..n).map(|i| p_tilde(delta, grid.frequency(i))).collect();
        let half = symbol.iter().map(|&p| Complex64::cis(0.5 * dt * p)).collect();
        let full = symbol.iter().map(|&p| Complex64::cis(dt * p)).collect();
        let dealias_limit = grid.dealias_limit(config.dealias_fraction);
        let deriv = (0..n)
            .map(|i| {
                if grid.wavenumber(i).unsigned_abs() as usize <= dealias_limit {
                    Complex64::new(0.0, grid.frequency(i))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let cutoff = match kind {
            EquationKind::LowFrequency | EquationKind::CoupledLowResidual => delta.cutoff(),
            _ => f64::INFINITY,
        };
        let low_limit = grid.low_band_limit(cutoff);
        let low_mask = (0..n)
            .map(|i| grid.wavenumber(i).unsigned_abs() as usize <= low_limit)
            .collect();
        let comps = if kind.is_coupled() { 2 } else { 1 };
        let zeros = || vec![vec![Complex64::new(0.0, 0.0); n]; comps];
        Ok(Self {
            kind,
            config,
            dt,
            steps: config.steps(),
            transformer: Transformer::new(grid),
            half,
            full,
            deriv,
            low_mask,
            dealias_limit,
            phys: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            spec: [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]],
            stages: [zeros(), zeros(), zeros(), zeros(), zeros()],
        })
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Largest retained wavenumber `K`.
    pub fn dealias_limit(&self) -> usize {
        self.dealias_limit
    }

    /// The same solver stepping backwards in time.
    pub fn reversed(&self) -> Self {
        let mut r = Solver::new(self.kind, self.config).expect("config already validated");
        r.dt = -self.dt;
        for (h, f) in r.half.iter_mut().zip(r.full.iter_mut()) {
            *h = h.conj();
            *f = f.conj();
        }
        r
    }

    fn in_low(&self, i: usize) -> bool {
        self.low_mask[i]
    }

    /// Initial state for data `φ`: truncated to the retained band, projected
    /// onto `{|ξ| ≤ 1/δ}` for the low system, and split for the coupled one.
    pub fn initial_state(&self, phi: &SpectralField) -> State {
        let grid = *phi.grid();
        let k = self.dealias_limit;
        let zero = Complex64::new(0.0, 0.0);
        let band = |keep: &dyn Fn(usize) -> bool| {
            let c = phi
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    if grid.wavenumber(i).unsigned_abs() as usize <= k && keep(i) {
                        c
                    } else {
                        zero
                    }
                })
                .collect();
            SpectralField::from_coeffs_unchecked(grid, c)
        };
        match self.kind {
            EquationKind::KdV | EquationKind::ScaledIlw => State::Single(band(&|_| true)),
            EquationKind::LowFrequency => State::Single(band(&|i| self.in_low(i))),
            EquationKind::CoupledLowResidual => State::Coupled {
                low: band(&|i| self.in_low(i)),
                residual: band(&|i| !self.in_low(i)),
            },
        }
    }

    fn check_state(&self, state: &State) -> Result<()> {
        if state.grid() != &self.config.grid {
            return Err(Error::Precondition("state lives on a different grid".into()));
        }
        match (state, self.kind.is_coupled()) {
            (State::Single(_), false) | (State::Coupled { .. }, true) => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "state shape does not match equation kind {}",
                    self.kind.as_str()
                )))
            }
        }
        for f in state.components() {
            let frac = f.energy_fraction_above(self.dealias_limit);
            if frac > ALIASING_TOLERANCE {
                return Err(Error::Aliasing { fraction: frac });
            }
        }
        Ok(())
    }

    fn check_support(&self, state: &State) -> Result<()> {
        let low = match (self.kind, state) {
            (EquationKind::LowFrequency, State::Single(f)) => f,
            (EquationKind::CoupledLowResidual, State::Coupled { low, .. }) => low,
            _ => return Ok(()),
        };
        let leak = low
            .coeffs()
            .iter()
            .enumerate()
            .any(|(i, c)| !self.in_low(i) && c.norm_sqr() != 0.0);
        if leak {
            return Err(Error::Precondition(
                "low-frequency data must vanish above 1/delta".into(),
            ));
        }
        Ok(())
    }

    fn to_physical(&mut self, src: &[Complex64], slot: usize, time: f64, masked: bool) -> Result<()> {
        let mut buf = std::mem::take(&mut self.spec[0]);
        for (i, (b, c)) in buf.iter_mut().zip(src).enumerate() {
            *b = if !masked || self.low_mask[i] {
                *c
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let mut out = std::mem::take(&mut self.phys[slot]);
        self.transformer.inverse_into(&buf, &mut out);
        self.spec[0] = buf;
        let bad = out.iter().any(|v| !(v.abs() <= BLOW_UP_THRESHOLD));
        self.phys[slot] = out;
        if bad {
            return Err(Error::BlowUp {
                time,
                partial: None,
            });
        }
        Ok(())
    }

    /// Forward transform of `phys[slot]` into `spec[1]`, then `iξ` on the retained band.
    fn derivative_of_product(&mut self, slot: usize) {
        let src = std::mem::take(&mut self.phys[slot]);
        let mut out = std::mem::take(&mut self.spec[1]);
        self.transformer.forward_into(&src, &mut out);
        for (o, d) in out.iter_mut().zip(&self.deriv) {
            *o *= d;
        }
        self.phys[slot] = src;
        self.spec[1] = out;
    }

    fn rhs_into(&mut self, u: &[Vec<Complex64>], out: &mut [Vec<Complex64>], time: f64) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        match self.kind {
            EquationKind::KdV | EquationKind::ScaledIlw | EquationKind::LowFrequency => {
                let project = self.kind == EquationKind::LowFrequency;
                self.to_physical(&u[0], 0, time, project)?;
                for v in self.phys[0].iter_mut() {
                    *v *= *v;
                }
                self.derivative_of_product(0);
                for (i, (o, s)) in out[0].iter_mut().zip(&self.spec[1]).enumerate() {
                    *o = if !project || self.low_mask[i] { *s } else { zero };
                }
            }
            EquationKind::CoupledLowResidual => {
                self.to_physical(&u[0], 0, time, true)?;
                self.to_physical(&u[1], 1, time, false)?;
                {
                    let [low, res, prod] = &mut self.phys;
                    for ((p, l), r) in prod.iter_mut().zip(low.iter()).zip(res.iter()) {
                        *p = r * r + 2.0 * r * l;
                    }
                    for l in low.iter_mut() {
                        *l *= *l;
                    }
                }
                // (v_low)² split between the two equations
                self.derivative_of_product(0);
                for (i, s) in self.spec[1].iter().enumerate() {
                    if self.low_mask[i] {
                        out[0][i] = *s;
                        out[1][i] = zero;
                    } else {
                        out[0][i] = zero;
                        out[1][i] = *s;
                    }
                }
                self.derivative_of_product(2);
                for (o, s) in out[1].iter_mut().zip(&self.spec[1]) {
                    *o += s;
                }
            }
        }
        Ok(())
    }

    /// `N(state)`; the state must be dealiased.
    pub fn nonlinear_rhs(&mut self, state: &State) -> Result<State> {
        self.check_state(state)?;
        let u = state.to_buffers();
        let mut out = u.clone();
        self.rhs_into(&u, &mut out, 0.0)?;
        Ok(State::from_buffers(self.config.grid, self.kind.is_coupled(), &out))
    }

    fn advance(&mut self, u: &mut [Vec<Complex64>], time: f64) -> Result<()> {
        if !self.config.nonlinear {
            for comp in u.iter_mut() {
                for (c, e) in comp.iter_mut().zip(&self.full) {
                    *c *= e;
                }
            }
            return Ok(());
        }
        let dt = self.dt;
        let [mut a, mut b, mut c, mut d, mut tmp] = std::mem::take(&mut self.stages);
        let res = (|| -> Result<()> {
            self.rhs_into(u, &mut a, time)?;
            for m in 0..u.len() {
                for i in 0..u[m].len() {
                    tmp[m][i] = self.half[i] * (u[m][i] + a[m][i] * (0.5 * dt));
                }
            }
            self.rhs_into(&tmp, &mut b, time + 0.5 * dt)?;
            for m in 0..u.len() {
                for i in 0..u[m].len() {
                    tmp[m][i] = self.half[i] * u[m][i] + b[m][i] * (0.5 * dt);
                }
            }
            self.rhs_into(&tmp, &mut c, time + 0.5 * dt)?;
            for m in 0..u.len() {
                for i in 0..u[m].len() {
                    tmp[m][i] = self.full[i] * u[m][i] + self.half[i] * c[m][i] * dt;
                }
            }
            self.rhs_into(&tmp, &mut d, time + dt)?;
            for m in 0..u.len() {
                for i in 0..u[m].len() {
                    let e = self.half[i];
                    let e2 = self.full[i];
                    u[m][i] = e2 * u[m][i]
                        + (e2 * a[m][i] + e * (b[m][i] + c[m][i]) * 2.0 + d[m][i]) * (dt / 6.0);
                }
            }
            Ok(())
        })();
        self.stages = [a, b, c, d, tmp];
        res
    }

    /// One integrating-factor RK4 step from `time`.
    pub fn step(&mut self, state: &State, time: f64) -> Result<State> {
        self.check_state(state)?;
        let mut u = state.to_buffers();
        self.advance(&mut u, time)?;
        Ok(State::from_buffers(self.config.grid, self.kind.is_coupled(), &u))
    }

    fn diagnostics(&self, state: &State, time: f64) -> Diagnostics {
        let total = state.total();
        let k = self.dealias_limit;
        let edge = ((4 * k) / 5).min(k);
        let low = match state {
            State::Single(f) => f,
            State::Coupled { low, .. } => low,
        };
        let high_band_mass = low
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.low_mask[*i])
            // fold from +0 so an empty band prints as 0, not -0
            .fold(0.0, |acc, (_, c)| acc + c.norm_sqr())
            / self.config.grid.box_length();
        Diagnostics {
            time,
            l2: total.l2_norm(),
            hs: total.sobolev_norm(self.config.sobolev_index),
            edge_fraction: total.energy_fraction_above(edge),
            high_band_mass,
            mean: total.mean_coefficient().re,
            residual_l2: state.residual().map_or(0.0, |r| r.l2_norm()),
        }
    }

    /// Runs to the horizon, recording every `record_every` steps and at the end.
    pub fn evolve(&mut self, initial: &State) -> Result<TrajectoryRecord> {
        self.check_state(initial)?;
        self.check_support(initial)?;
        let grid = self.config.grid;
        let coupled = self.kind.is_coupled();
        let mut record = TrajectoryRecord {
            kind: self.kind,
            config: self.config,
            times: vec![0.0],
            snapshots: vec![initial.clone()],
            diagnostics: vec![self.diagnostics(initial, 0.0)],
        };
        let mut u = initial.to_buffers();
        for n in 0..self.steps {
            let t = n as f64 * self.dt;
            if let Err(e) = self.advance(&mut u, t) {
                return Err(match e {
                    Error::BlowUp { time, .. } => Error::BlowUp {
                        time,
                        partial: Some(Box::new(record)),
                    },
                    other => other,
                });
            }
            let done = n + 1;
            if done % self.config.record_every == 0 || done == self.steps {
                let t1 = if done == self.steps {
                    self.config.horizon
                } else {
                    done as f64 * self.dt
                };
                if u.iter().flatten().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(Error::BlowUp {
                        time: t1,
                        partial: Some(Box::new(record)),
                    });
                }
                let state = State::from_buffers(grid, coupled, &u);
                record.diagnostics.push(self.diagnostics(&state, t1));
                record.times.push(t1);
                record.snapshots.push(state);
            }
        }
        Ok(record)
    }
}

/// `N(state)` for a solver built from `config`.
pub fn nonlinear_rhs(kind: EquationKind, state: &State, config: &SolverConfig) -> Result<State> {
    Solver::new(kind, *config)?.nonlinear_rhs(state)
}

/// One step of size `config.effective_dt()` from time 0.
pub fn step(kind: EquationKind, state: &State, config: &SolverConfig) -> Result<State> {
    Solver::new(kind, *config)?.step(state, 0.0)
}

pub fn evolve(kind: EquationKind, initial: &State, config: &SolverConfig) -> Result<TrajectoryRecord> {
    Solver::new(kind, *config)?.evolve(initial)
}

/// Prepares `φ` for `kind` (see [`Solver::initial_state`]) and evolves it.
pub fn evolve_from(kind: EquationKind, phi: &SpectralField, config: &SolverConfig) -> Result<TrajectoryRecord> {
    let mut solver = Solver::new(kind, *config)?;
    let init = solver.initial_state(phi);
    solver.evolve(&init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(n: usize, delta: f64, dt: f64, t: f64) -> SolverConfig {
        let grid = RealGrid::new(40.0 * PI, n).unwrap();
        SolverConfig::new(grid, DepthParameter::new(delta).unwrap(), dt, t).unwrap()
    }

    fn gaussian(grid: RealGrid) -> SpectralField {
        SpectralField::from_fn(grid, |x| (-x * x).exp())
    }

    #[test]
    fn config_validation() {
        let grid = RealGrid::new(10.0, 16).unwrap();
        let d = DepthParameter::new(0.5).unwrap();
        assert!(SolverConfig::new(grid, d, 0.0, 1.0).is_err());
        assert!(SolverConfig::new(grid, d, 0.1, -1.0).is_err());
        let c = SolverConfig::new(grid, d, 0.3, 1.0).unwrap();
        assert_eq!(c.steps(), 4);
        assert_eq!(c.effective_dt(), 0.25);
        assert_eq!(SolverConfig::new(grid, d, 0.1, 1.0).unwrap().steps(), 10);
        assert!(c.with_dealias_fraction(1.5).validate().is_err());
    }

    #[test]
    fn zero_state_zero_rhs() {
        let c = cfg(64, 0.5, 0.01, 0.1);
        for kind in [EquationKind::KdV, EquationKind::LowFrequency] {
            let z = State::Single(SpectralField::zeros(c.grid));
            let r = nonlinear_rhs(kind, &z, &c).unwrap();
            assert!(r.total().coeffs().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn cosine_rhs_matches_convolution() {
        // ∂x(cos²(mx)) = -m sin(2mx)
        let grid = RealGrid::new(2.0 * PI, 32).unwrap();
        let c = SolverConfig::new(grid, DepthParameter::KDV, 0.1, 1.0).unwrap();
        let m = 3.0;
        let v = SpectralField::from_fn(grid, |x| (m * x).cos());
        let r = nonlinear_rhs(EquationKind::KdV, &State::Single(v), &c).unwrap();
        let expect = SpectralField::from_fn(grid, |x| -m * (2.0 * m * x).sin());
        assert!(r.total().sub(&expect).l2_norm() < 1e-13);
    }

    #[test]
    fn aliased_input_rejected() {
        let grid = RealGrid::new(2.0 * PI, 32).unwrap();
        let c = SolverConfig::new(grid, DepthParameter::KDV, 0.1, 1.0).unwrap();
        let v = SpectralField::from_fn(grid, |x| (14.0 * x).cos());
        assert!(matches!(
            nonlinear_rhs(EquationKind::KdV, &State::Single(v), &c),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn linear_step_is_exact_propagator() {
        let c = cfg(1024, 0.3, 0.05, 1.0).linear_only();
        let g = gaussian(c.grid);
        let s = step(EquationKind::ScaledIlw, &State::Single(g.clone()), &c).unwrap();
        for (i, (a, b)) in s.total().coeffs().iter().zip(g.coeffs()).enumerate() {
            let e = crate::symbols::propagator_phase(c.delta, 0.05, c.grid.frequency(i));
            assert!((a - b * e).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_flow_is_reversible() {
        let c = cfg(1024, 0.3, 0.05, 1.0).linear_only();
        let mut fwd = Solver::new(EquationKind::ScaledIlw, c).unwrap();
        let mut back = fwd.reversed();
        let s0 = fwd.initial_state(&gaussian(c.grid));
        let s1 = back.step(&fwd.step(&s0, 0.0).unwrap(), 0.05).unwrap();
        let err = s1.total().sub(&s0.total()).l2_norm() / s0.total().l2_norm();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn zero_data_stay_zero() {
        let c = cfg(128, 0.25, 0.01, 0.2);
        for kind in [
            EquationKind::KdV,
            EquationKind::ScaledIlw,
            EquationKind::LowFrequency,
            EquationKind::CoupledLowResidual,
        ] {
            let rec = evolve_from(kind, &SpectralField::zeros(c.grid), &c).unwrap();
            assert!(rec.snapshots.iter().all(|s| s.total().l2_norm() == 0.0));
            let d = l2_drift(&rec);
            assert!(d.absolute && d.value == 0.0);
        }
    }

    #[test]
    fn mean_is_conserved() {
        let c = cfg(256, 0.25, 0.01, 0.5).with_record_every(10);
        let phi = SpectralField::from_fn(c.grid, |x| (-(x - 1.0).powi(2)).exp() + 0.5 * (-x * x / 4.0).exp());
        for kind in [EquationKind::KdV, EquationKind::LowFrequency, EquationKind::CoupledLowResidual] {
            let rec = evolve_from(kind, &phi, &c).unwrap();
            let m0 = rec.diagnostics[0].mean;
            for d in &rec.diagnostics {
                assert!((d.mean - m0).abs() <= 1e-14 * m0.abs(), "{kind:?}");
            }
        }
    }

    #[test]
    fn depth_zero_reproduces_kdv_bitwise() {
        let c = cfg(256, 0.0, 0.01, 0.3).with_record_every(5);
        let phi = gaussian(c.grid);
        let kdv = evolve_from(EquationKind::KdV, &phi, &c).unwrap();
        for kind in [EquationKind::ScaledIlw, EquationKind::LowFrequency] {
            let other = evolve_from(kind, &phi, &c).unwrap();
            assert_eq!(other.snapshots, kdv.snapshots, "{kind:?}");
        }
    }

    #[test]
    fn blow_up_reports_time_and_partial_record() {
        let grid = RealGrid::new(2.0 * PI, 64).unwrap();
        let c = SolverConfig::new(grid, DepthParameter::KDV, 0.5, 50.0).unwrap();
        let phi = SpectralField::from_fn(grid, |x| 200.0 * x.cos());
        match evolve_from(EquationKind::KdV, &phi, &c) {
            Err(Error::BlowUp { time, partial }) => {
                assert!(time > 0.0 && time < 50.0);
                assert!(!partial.unwrap().is_empty());
            }
            other => panic!("expected blow-up, got {:?}", other.map(|r| r.len())),
        }
    }

    #[test]
    fn low_frequency_support_enforced_on_input() {
        let c = cfg(128, 0.5, 0.01, 0.1);
        let phi = gaussian(c.grid);
        let mut solver = Solver::new(EquationKind::LowFrequency, c).unwrap();
        let raw = State::Single(phi.project_low(c.grid.frequency(c.grid.dealias_limit(2.0 / 3.0))));
        assert!(matches!(solver.evolve(&raw), Err(Error::Precondition(_))));
    }
}
