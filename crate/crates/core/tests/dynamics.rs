use std::f64::consts::PI;

use ilw_core::dynamics::{evolve_from, l2_drift, nonlinear_rhs, Solver};
use ilw_core::{DepthParameter, EquationKind, RealGrid, SolverConfig, SpectralField, State};

fn grid() -> RealGrid {
    RealGrid::new(40.0 * PI, 1024).unwrap()
}

fn gaussian(amp: f64) -> SpectralField {
    SpectralField::from_fn(grid(), |x| amp * (-x * x).exp())
}

fn config(delta: f64, dt: f64, horizon: f64) -> SolverConfig {
    SolverConfig::new(grid(), DepthParameter::new(delta).unwrap(), dt, horizon).unwrap()
}

#[test]
fn kdv_conserves_l2_over_long_run() {
    let rec = evolve_from(EquationKind::KdV, &gaussian(1.0), &config(0.0, 5e-3, 5.0)).unwrap();
    let d = l2_drift(&rec);
    assert!(!d.absolute);
    assert!(d.value < 1e-8, "{}", d.value);
}

#[test]
fn under_resolved_step_shows_drift() {
    let rec = evolve_from(EquationKind::KdV, &gaussian(3.0), &config(0.0, 0.05, 5.0)).unwrap();
    let d = l2_drift(&rec).value;
    assert!(d > 1e-4, "{d}");
}

#[test]
fn linear_flow_has_no_drift() {
    let cfg = config(0.5, 1e-2, 2.0).linear_only();
    let rec = evolve_from(EquationKind::ScaledIlw, &gaussian(1.0), &cfg).unwrap();
    assert!(l2_drift(&rec).value < 1e-14);
}

#[test]
fn zero_data_drift_is_absolute() {
    let rec = evolve_from(EquationKind::KdV, &SpectralField::zeros(grid()), &config(0.0, 1e-2, 0.1)).unwrap();
    let d = l2_drift(&rec);
    assert!(d.absolute);
    assert_eq!(d.value, 0.0);
}

#[test]
fn mean_conserved_for_every_kind() {
    let phi = gaussian(1.0);
    for kind in [
        EquationKind::KdV,
        EquationKind::ScaledIlw,
        EquationKind::LowFrequency,
        EquationKind::CoupledLowResidual,
    ] {
        let rec = evolve_from(kind, &phi, &config(0.25, 1e-2, 1.0)).unwrap();
        let m0 = rec.snapshots[0].total().mean_coefficient();
        for s in &rec.snapshots {
            assert!((s.total().mean_coefficient() - m0).norm() < 1e-13, "{}", kind.as_str());
        }
    }
}

#[test]
fn times_increase_and_end_on_horizon() {
    let rec = evolve_from(EquationKind::ScaledIlw, &gaussian(1.0), &config(0.3, 0.03, 1.0).with_record_every(4)).unwrap();
    assert_eq!(rec.times.len(), rec.snapshots.len());
    assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*rec.times.last().unwrap(), 1.0);
}

#[test]
fn trajectories_depend_continuously_on_depth() {
    // sup-in-time L² distance between adjacent dyadic depths
    let phi = gaussian(1.0);
    let finals: Vec<Vec<SpectralField>> = (1..=6)
        .map(|j| {
            let rec = evolve_from(EquationKind::ScaledIlw, &phi, &config(2f64.powi(-j), 5e-3, 1.0)).unwrap();
            rec.snapshots.iter().map(|s| s.total()).collect()
        })
        .collect();
    let gaps: Vec<f64> = finals
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| a.sub(b).l2_norm()).fold(0.0, f64::max))
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}

#[test]
fn coupled_residual_unforced_by_narrow_low_field() {
    // (P v)² lives in |ξ| ≤ 2/(3δ) < 1/δ, so nothing leaks to the residual
    let delta = 0.5;
    let cfg = config(delta, 1e-2, 1.0);
    let low = gaussian(1.0).project_low(1.0 / (3.0 * delta));
    let state = State::Coupled {
        low: low.clone(),
        residual: SpectralField::zeros(grid()),
    };
    let rhs = nonlinear_rhs(EquationKind::CoupledLowResidual, &state, &cfg).unwrap();
    assert!(rhs.residual().unwrap().l2_norm() < 1e-14);
    assert!(rhs.low().unwrap().l2_norm() > 1e-3);
}

#[test]
fn backward_solver_undoes_linear_flow() {
    let cfg = config(0.7, 0.01, 0.5).linear_only();
    let mut fwd = Solver::new(EquationKind::ScaledIlw, cfg).unwrap();
    let mut bwd = fwd.reversed();
    let s0 = fwd.initial_state(&gaussian(1.0));
    let mut s = s0.clone();
    for _ in 0..10 {
        s = fwd.step(&s, 0.0).unwrap();
    }
    for _ in 0..10 {
        s = bwd.step(&s, 0.0).unwrap();
    }
    assert!(s.total().sub(&s0.total()).l2_norm() < 1e-13);
}
