//! Fast sanity suite over every module, for `ilw selftest`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_from, nonlinear_rhs, step, EquationKind, SolverConfig, State};
use crate::experiments::{
    gateaux_fd_crosscheck, gateaux_second_derivative_quadrature, run_convergence,
    tail_profile, ConvergenceStudySpec, FdCheckSpec, InstabilityWitnessSpec, Profile,
    RunSettings,
};
use crate::resonance::{xi_kdv, xi_kdv_factored, xi_tilde, FrequencyTriple};
use crate::spectral::{RealGrid, SpectralField};
use crate::symbols::{coth_minus_inverse, p_tilde, propagator_phase, DepthParameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfCheck {
    pub module: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(module: &str, name: &str, f: impl FnOnce() -> Result<bool, String>) -> SelfCheck {
    let (passed, detail) = match f() {
        Ok(p) => (p, String::new()),
        Err(e) => (false, e),
    };
    SelfCheck {
        module: module.into(),
        name: name.into(),
        passed,
        detail,
    }
}

fn small_settings() -> RunSettings {
    RunSettings {
        box_length: 20.0 * PI,
        modes: 128,
        dt: 0.01,
        record_every: 5,
        dealias_fraction: 2.0 / 3.0,
    }
}

pub fn run() -> Vec<SelfCheck> {
    let e = |x: crate::Error| x.to_string();
    let mut out = Vec::new();

    out.push(check("spectral_core", "constant_field_transform", || {
        let g = RealGrid::new(10.0, 32).map_err(e)?;
        let f = SpectralField::from_fn(g, |_| 1.0);
        Ok((f.coeffs()[0].re - 10.0).abs() < 1e-12)
    }));
    out.push(check("spectral_core", "projector_ties_low", || {
        let g = RealGrid::new(2.0 * PI, 32).map_err(e)?;
        Ok(g.low_band_limit(3.0) == 3 && g.dealias_limit(2.0 / 3.0) == 10)
    }));
    out.push(check("spectral_core", "zero_inverse", || {
        let g = RealGrid::new(5.0, 16).map_err(e)?;
        let v = crate::spectral::inverse_transform(&SpectralField::zeros(g)).map_err(e)?;
        Ok(v.iter().all(|x| *x == 0.0))
    }));

    out.push(check("symbols", "kdv_branch", || {
        Ok(p_tilde(DepthParameter::KDV, 1.7) == 1.7 * 1.7 * 1.7)
    }));
    out.push(check("symbols", "negative_depth_rejected", || {
        Ok(DepthParameter::new(-1.0).is_err())
    }));
    out.push(check("symbols", "small_argument_limit", || {
        Ok((coth_minus_inverse(1e-6) - 1e-6 / 3.0).abs() < 1e-19)
    }));
    out.push(check("symbols", "propagator_at_zero_time", || {
        Ok(propagator_phase(DepthParameter::new(0.3).map_err(e)?, 0.0, 5.0) == 1.0.into())
    }));

    out.push(check("resonance", "kdv_factorisation", || {
        let t = FrequencyTriple::new(1.5, -0.25);
        Ok((xi_kdv(&t) - xi_kdv_factored(&t)).abs() < 1e-15)
    }));
    out.push(check("resonance", "zero_entry_vanishes", || {
        let d = DepthParameter::new(0.4).map_err(e)?;
        Ok(xi_tilde(d, &FrequencyTriple::new(0.0, 2.0)) == 0.0)
    }));
    out.push(check("resonance", "kdv_limit", || {
        let t = FrequencyTriple::new(0.7, 1.1);
        Ok(xi_tilde(DepthParameter::KDV, &t) == xi_kdv(&t))
    }));

    out.push(check("dynamics", "zero_rhs", || {
        let s = small_settings();
        let cfg = s.solver_config(0.5, 0.1, 0.0).map_err(e)?;
        let z = State::Single(SpectralField::zeros(cfg.grid));
        let r = nonlinear_rhs(EquationKind::ScaledIlw, &z, &cfg).map_err(e)?;
        Ok(r.total().l2_norm() == 0.0)
    }));
    out.push(check("dynamics", "linear_step_exact", || {
        let g = RealGrid::new(2.0 * PI, 32).map_err(e)?;
        let d = DepthParameter::new(0.5).map_err(e)?;
        let cfg = SolverConfig::new(g, d, 0.1, 1.0).map_err(e)?.linear_only();
        let f = SpectralField::from_fn(g, |x| (2.0 * x).cos());
        let s = step(EquationKind::ScaledIlw, &State::Single(f.clone()), &cfg).map_err(e)?;
        let worst = s
            .total()
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .enumerate()
            .map(|(i, (a, b))| (a - b * propagator_phase(d, 0.1, g.frequency(i))).norm())
            .fold(0.0, f64::max);
        Ok(worst < 1e-14)
    }));
    out.push(check("dynamics", "zero_data_zero_trajectory", || {
        let cfg = small_settings().solver_config(0.25, 0.1, 0.0).map_err(e)?;
        let rec = evolve_from(EquationKind::CoupledLowResidual, &SpectralField::zeros(cfg.grid), &cfg)
            .map_err(e)?;
        Ok(rec.snapshots.iter().all(|s| s.total().l2_norm() == 0.0))
    }));

    out.push(check("experiments", "zero_data_convergence", || {
        let spec = ConvergenceStudySpec {
            profile: Profile::Zero,
            horizon: 0.1,
            delta_grid: vec![0.5, 0.25],
            settings: small_settings(),
            ..Default::default()
        };
        let r = run_convergence(&spec).map_err(e)?;
        Ok(r.column("sup_error").unwrap_or_default().iter().all(|v| *v == 0.0) && r.passed())
    }));
    out.push(check("experiments", "kdv_depth_in_grid", || {
        let spec = ConvergenceStudySpec {
            horizon: 0.1,
            delta_grid: vec![0.0],
            settings: small_settings(),
            ..Default::default()
        };
        let r = run_convergence(&spec).map_err(e)?;
        Ok(r.column("sup_error") == Some(vec![0.0]) && r.passed())
    }));
    out.push(check("experiments", "tail_beyond_grid_vanishes", || {
        let s = small_settings();
        let cfg = s.solver_config(0.5, 0.1, 0.0).map_err(e)?;
        let phi = Profile::default().sample(cfg.grid);
        let rec = evolve_from(EquationKind::LowFrequency, &phi, &cfg).map_err(e)?;
        Ok(tail_profile(&rec, &[cfg.grid.max_frequency()], 0.0) == vec![0.0])
    }));
    out.push(check("experiments", "witness_zero_time", || {
        let spec = InstabilityWitnessSpec {
            t: 0.0,
            ..Default::default()
        };
        Ok(gateaux_second_derivative_quadrature(&spec, 1e3).map_err(e)?.norm == 0.0)
    }));
    out.push(check("experiments", "fd_check_zero_data", || {
        let spec = FdCheckSpec {
            t: 0.05,
            settings: RunSettings {
                record_every: 1_000,
                ..small_settings()
            },
            ..Default::default()
        };
        let r = gateaux_fd_crosscheck(&spec, &SpectralField::zeros(spec.settings.grid().map_err(e)?))
            .map_err(e)?;
        Ok(r.passed() && r.column("discrepancy").unwrap_or_default().iter().all(|v| *v == 0.0))
    }));
    out
}
