//! Mesh-free second Gâteaux derivative on the band `I1 + I2` for two-band data.
//!
//! With `α = δ N^{-1-θ}`, `I1 = [α, 2α]` and `I2 = [N, N + α]`, the profile at
//! `ξ = N + η`, `η ∈ [α, 3α]`, is
//!
//! ```text
//! F(ξ) = -2ξ/(α N^s) ∫_{I1 ∩ (ξ - I2)} (e^{-it Ξ̃(ξ, ξ1, ξ - ξ1)} - 1) / Ξ̃ dξ1
//! ```
//!
//! up to the unimodular factor `e^{it p̃(ξ)}`, which is dropped. `ξ` is carried
//! as the offset `η` because `α` falls far below the spacing of doubles near `N`.
//! Norms are `(∫ ⟨ξ⟩^{2s} |F|² dξ)^{1/2}` with no `2π` factor.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{log_log_fit, ExperimentReport, Series, Verdict};
use crate::error::{Error, Result};
use crate::quadrature::CompositeGauss;
use crate::resonance::{xi_tilde, FrequencyTriple};
use crate::symbols::DepthParameter;

/// Two refinement levels must agree to this relative accuracy.
pub const REFINEMENT_TOLERANCE: f64 = 1e-6;
/// Required `N δ`.
pub const MIN_SEPARATION: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstabilityWitnessSpec {
    pub s: f64,
    pub delta: f64,
    pub t: f64,
    pub theta: f64,
    pub n_grid: Vec<f64>,
    /// Gauss–Legendre order on every panel.
    pub quadrature_points: usize,
    /// Panels per half of the outer band and for the inner integral.
    pub panels: usize,
    pub slope_tolerance: f64,
    pub gap_tolerance: f64,
    /// Fits with a larger rms residual are reported as inconclusive.
    pub max_fit_residual: f64,
}

impl Default for InstabilityWitnessSpec {
    fn default() -> Self {
        Self {
            s: 0.0,
            delta: 0.1,
            t: 0.01,
            theta: 0.1,
            n_grid: vec![1e3, 1e4, 1e5, 1e6],
            quadrature_points: 16,
            panels: 2,
            slope_tolerance: 0.05,
            gap_tolerance: 0.1,
            max_fit_residual: 0.05,
        }
    }
}

impl InstabilityWitnessSpec {
    pub fn alpha(&self, n: f64) -> f64 {
        self.delta * n.powf(-1.0 - self.theta)
    }

    pub fn target_slope(&self) -> f64 {
        (1.0 - self.theta) / 2.0
    }

    fn validate_geometry(&self, n: f64) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Parameter(format!(
                "delta must satisfy 0 < delta ≤ 1, got {}",
                self.delta
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Parameter(format!(
                "theta must satisfy 0 < theta < 1, got {}",
                self.theta
            )));
        }
        if !self.s.is_finite() || !self.t.is_finite() {
            return Err(Error::Parameter("s and t must be finite".into()));
        }
        if self.quadrature_points == 0 || self.panels == 0 {
            return Err(Error::Parameter(
                "quadrature_points and panels must be >= 1".into(),
            ));
        }
        if !(n.is_finite() && n * self.delta >= MIN_SEPARATION) {
            return Err(Error::Parameter(format!(
                "N must satisfy N ≥ {MIN_SEPARATION}/delta, got {n}"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0.0 {
            return Err(Error::Parameter("t must be nonzero".into()));
        }
        if self.n_grid.len() < 2 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "n_grid must hold at least two increasing values".into(),
            ));
        }
        for &n in &self.n_grid {
            self.validate_geometry(n)?;
        }
        Ok(())
    }
}

/// `‖φ‖_{H^s}` for `φ̂ = α^{-1/2}` on `±I1` and `α^{-1/2} N^{-s}` on `±I2`.
///
/// The spectrum is piecewise constant, so the norm reduces to integrals of
/// `⟨ξ⟩^{2s}` over two short intervals (16-point Gauss, exact to rounding).
pub fn witness_data_norm(s: f64, alpha: f64, n: f64) -> f64 {
    let g = CompositeGauss::new(16);
    let low = g.integrate(alpha, 2.0 * alpha, 1, |x| (1.0 + x * x).powf(s));
    // ⟨N + η⟩^{2s} N^{-2s}
    let high = g.integrate(0.0, alpha, 1, |eta| {
        let r = 1.0 + eta / n;
        (n.powi(-2) + r * r).powf(s)
    });
    (2.0 * (low + high) / alpha).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessProfile {
    pub n: f64,
    pub alpha: f64,
    /// Offsets `η = ξ - N` of the quadrature nodes.
    pub eta: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Same with the integrand replaced by its small-phase limit `-it`.
    pub surrogate: Vec<Complex64>,
    pub norm: f64,
    pub surrogate_norm: f64,
    /// `‖F - F_sur‖ / ‖F_sur‖` on the band.
    pub relative_gap: f64,
    /// Relative change of `norm` under panel doubling.
    pub refinement_change: f64,
}

/// `(e^{-itx} - 1)/x`, with the removable singularity filled in.
fn phase_kernel(t: f64, x: f64) -> Complex64 {
    let w = t * x;
    if w.abs() < 1e-8 {
        return Complex64::new(-0.5 * t * w, -t * (1.0 - w * w / 6.0));
    }
    let h = 0.5 * w;
    // e^{-iw} - 1 = -2 sin²(w/2) - i sin w
    Complex64::new(-2.0 * h.sin().powi(2), -w.sin()) / x
}

fn profile_at_level(
    spec: &InstabilityWitnessSpec,
    n: f64,
    panels: usize,
) -> WitnessProfile {
    let delta = DepthParameter::new(spec.delta).expect("validated");
    let alpha = spec.alpha(n);
    let g = CompositeGauss::new(spec.quadrature_points);
    let mut outer = g.points(alpha, 2.0 * alpha, panels);
    outer.extend(g.points(2.0 * alpha, 3.0 * alpha, panels));

    let mut eta = Vec::with_capacity(outer.len());
    let mut weights = Vec::with_capacity(outer.len());
    let mut values = Vec::with_capacity(outer.len());
    let mut surrogate = Vec::with_capacity(outer.len());
    let (mut nrm, mut nrm_sur, mut nrm_gap) = (0.0, 0.0, 0.0);
    for (e, w) in outer {
        let (lo, hi) = if e <= 2.0 * alpha {
            (alpha, e)
        } else {
            (e - alpha, 2.0 * alpha)
        };
        let integral = g.integrate_complex(lo, hi, panels, |xi1| {
            // ξ2 = N + (η - ξ1) ∈ I2
            let tri = FrequencyTriple::new(xi1, n + (e - xi1));
            phase_kernel(spec.t, xi_tilde(delta, &tri))
        });
        let length = hi - lo;
        // -2ξ/(α N^s) and ⟨ξ⟩^s/N^s, with r = ξ/N
        let r = 1.0 + e / n;
        let pref = -2.0 * r * n.powf(1.0 - spec.s) / alpha;
        let weight = (n.powi(-2) + r * r).powf(0.5 * spec.s) * n.powf(spec.s);
        let f = integral * pref;
        let f_sur = Complex64::new(0.0, -spec.t * length) * pref;
        nrm += w * (weight * f.norm()).powi(2);
        nrm_sur += w * (weight * f_sur.norm()).powi(2);
        nrm_gap += w * (weight * (f - f_sur).norm()).powi(2);
        eta.push(e);
        weights.push(w);
        values.push(f);
        surrogate.push(f_sur);
    }
    let norm = nrm.sqrt();
    let surrogate_norm = nrm_sur.sqrt();
    WitnessProfile {
        n,
        alpha,
        eta,
        weights,
        values,
        surrogate,
        norm,
        surrogate_norm,
        relative_gap: if surrogate_norm == 0.0 { 0.0 } else { nrm_gap.sqrt() / surrogate_norm },
        refinement_change: 0.0,
    }
}

/// Band profile and `H^s` norm of the second Gâteaux derivative at frequency scale `N`.
pub fn gateaux_second_derivative_quadrature(
    spec: &InstabilityWitnessSpec,
    n: f64,
) -> Result<WitnessProfile> {
    spec.validate_geometry(n)?;
    let coarse = profile_at_level(spec, n, spec.panels);
    let mut fine = profile_at_level(spec, n, 2 * spec.panels);
    let change = if fine.norm == 0.0 {
        coarse.norm
    } else {
        (fine.norm - coarse.norm).abs() / fine.norm
    };
    fine.refinement_change = change;
    if change > REFINEMENT_TOLERANCE {
        return Err(Error::Quadrature { rel_diff: change });
    }
    Ok(fine)
}

pub fn run_instability(spec: &InstabilityWitnessSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let profiles: Vec<Result<WitnessProfile>> = spec
        .n_grid
        .par_iter()
        .map(|&n| gateaux_second_derivative_quadrature(spec, n))
        .collect();
    let profiles: Vec<WitnessProfile> = profiles.into_iter().collect::<Result<_>>()?;

    let mut report = ExperimentReport::new(
        "instability",
        serde_json::to_value(spec)?,
        &[
            "n",
            "alpha",
            "phi_norm",
            "band_norm",
            "surrogate_norm",
            "relative_gap",
            "refinement_change",
        ],
    );
    let mut phi_norms = Vec::new();
    for p in &profiles {
        let phi = witness_data_norm(spec.s, p.alpha, p.n);
        phi_norms.push(phi);
        report.rows.push(vec![
            p.n,
            p.alpha,
            phi,
            p.norm,
            p.surrogate_norm,
            p.relative_gap,
            p.refinement_change,
        ]);
    }
    let ns: Vec<f64> = profiles.iter().map(|p| p.n).collect();
    let norms: Vec<f64> = profiles.iter().map(|p| p.norm).collect();
    let gaps: Vec<f64> = profiles.iter().map(|p| p.relative_gap).collect();
    report.series.push(Series {
        name: "band_norm".into(),
        x: ns.clone(),
        y: norms.clone(),
    });
    report.series.push(Series {
        name: "relative_gap".into(),
        x: ns.clone(),
        y: gaps.clone(),
    });

    let (lo, hi) = phi_norms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    report.verdicts.push(Verdict::check(
        "data_norm_bounded",
        if lo < 0.5 { lo } else { hi },
        lo >= 0.5 && hi <= 4.0,
        "every ||phi||_{H^s} in [0.5, 4]",
    ));

    let target = spec.target_slope();
    let fit = log_log_fit(&ns, &norms)?;
    report.push_fit("band_norm_vs_n", fit);
    let mut v = Verdict::within(
        "band_norm_slope",
        fit.slope,
        target - spec.slope_tolerance,
        target + spec.slope_tolerance,
    );
    if fit.residual > spec.max_fit_residual {
        v.outcome = super::report::Outcome::Inconclusive;
        report.notes.push(format!(
            "band norm fit residual {} exceeds {}",
            fit.residual, spec.max_fit_residual
        ));
    }
    report.verdicts.push(v);

    match log_log_fit(&ns, &gaps) {
        Ok(gfit) => {
            report.push_fit("gap_vs_n", gfit);
            report.verdicts.push(Verdict::within(
                "gap_exponent",
                gfit.slope,
                -spec.theta - spec.gap_tolerance,
                -spec.theta + spec.gap_tolerance,
            ));
        }
        Err(e) => {
            report.notes.push(format!("gap fit unavailable: {e}"));
            report.verdicts.push(Verdict {
                name: "gap_exponent".into(),
                outcome: super::report::Outcome::Inconclusive,
                measured: f64::NAN,
                tolerance: format!("in [{}, {}]", -spec.theta - spec.gap_tolerance, -spec.theta + spec.gap_tolerance),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limits() {
        let k = phase_kernel(2.0, 1e-12);
        assert!((k - Complex64::new(0.0, -2.0)).norm() < 1e-11);
        let x = 0.7;
        let exact = (Complex64::new(0.0, -1.3 * x).exp() - 1.0) / x;
        assert!((phase_kernel(1.3, x) - exact).norm() < 1e-15);
        // continuity across the switch
        let a = phase_kernel(1.0, 0.99999999e-8);
        let b = phase_kernel(1.0, 1.00000001e-8);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn zero_time_gives_zero_profile() {
        let spec = InstabilityWitnessSpec {
            t: 0.0,
            ..Default::default()
        };
        let p = gateaux_second_derivative_quadrature(&spec, 1e3).unwrap();
        assert_eq!(p.norm, 0.0);
        assert!(p.values.iter().all(|v| v.norm() == 0.0));
        assert!(run_instability(&spec).is_err());
    }

    #[test]
    fn data_norm_near_two() {
        for s in [0.0, 1.0, 2.5] {
            for n in [1e3, 1e9] {
                let a = 0.1 * f64::powf(n, -1.1);
                let v = witness_data_norm(s, a, n);
                // corrections are O(s α/N)
                assert!((v - 2.0).abs() < 1e-5, "{s} {n} {v}");
            }
        }
        // s = 0 is exact: 2(α + α)/α = 4
        assert!((witness_data_norm(0.0, 1e-5, 1e4) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn geometry_checked() {
        let spec = InstabilityWitnessSpec::default();
        assert!(gateaux_second_derivative_quadrature(&spec, 50.0).is_err());
        assert!(InstabilityWitnessSpec { delta: 1.5, ..Default::default() }.validate().is_err());
    }
}
