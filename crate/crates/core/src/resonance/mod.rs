//! Resonance functions `Φ(ξ) - Φ(ξ1) - Φ(ξ2)` on the constraint `ξ = ξ1 + ξ2`,
//! the derivative of the scaled ILW resonance along the constraint, and the
//! bounds used with it.

mod compensated;
pub mod sweep;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{rational_series, SeriesSum};
use crate::symbols::{h_delta, p_tilde, DepthParameter};
use compensated::Dd;

/// Relative condition number above which [`xi_tilde_direct`] flags cancellation.
pub const CANCELLATION_WARNING: f64 = 1e6;
/// [`xi_tilde`] uses the direct difference only below this condition number.
pub const DIRECT_CONDITION_LIMIT: f64 = 1e4;
/// [`xi_tilde`] switches from the series to the Benjamin–Ono split above this `δ ξ_max`.
pub const SERIES_LIMIT: f64 = 40.0;
/// Tolerance used by [`xi_tilde`] when it falls back to the series.
pub const SERIES_TOL: f64 = 1e-16;
/// High band means `ξ_max ≥ HIGH_BAND_FACTOR / δ`.
pub const HIGH_BAND_FACTOR: f64 = 10.0;

/// `(ξ, ξ1, ξ2)` with `ξ = ξ1 + ξ2`. Only `ξ1, ξ2` are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTriple {
    xi1: f64,
    xi2: f64,
}

impl FrequencyTriple {
    pub fn new(xi1: f64, xi2: f64) -> Self {
        Self { xi1, xi2 }
    }

    /// Triple with output `ξ` and first input `ξ1`; `ξ2 = ξ - ξ1`.
    pub fn from_output(xi: f64, xi1: f64) -> Self {
        Self { xi1, xi2: xi - xi1 }
    }

    pub fn xi(&self) -> f64 {
        self.xi1 + self.xi2
    }

    pub fn xi1(&self) -> f64 {
        self.xi1
    }

    pub fn xi2(&self) -> f64 {
        self.xi2
    }

    /// `[ξ, ξ1, ξ2]`.
    pub fn entries(&self) -> [f64; 3] {
        [self.xi(), self.xi1, self.xi2]
    }

    /// `[ξ_max, ξ_med, ξ_min]` of the magnitudes.
    pub fn ordered_magnitudes(&self) -> [f64; 3] {
        let mut m = self.entries().map(f64::abs);
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.xi2, self.xi1)
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.xi1, -self.xi2)
    }

    pub fn has_zero(&self) -> bool {
        self.entries().iter().any(|&x| x == 0.0)
    }

    /// Whether `|ξ|, |ξ1|, |ξ2| ≤ 1/δ`.
    pub fn in_band(&self, delta: DepthParameter) -> bool {
        self.ordered_magnitudes()[0] <= delta.cutoff()
    }

    fn xi_exact(&self) -> Dd {
        Dd::from_sum(self.xi1, self.xi2)
    }
}

/// `ξ³ - ξ1³ - ξ2³`, evaluated in double-double so small entries keep their
/// relative accuracy.
pub fn xi_kdv(t: &FrequencyTriple) -> f64 {
    let x = t.xi_exact().cube();
    let a = Dd::from(t.xi1).cube();
    let b = Dd::from(t.xi2).cube();
    x.sub(a).sub(b).hi
}

/// `3 ξ ξ1 ξ2`.
pub fn xi_kdv_factored(t: &FrequencyTriple) -> f64 {
    3.0 * t.xi() * t.xi1 * t.xi2
}

/// `|ξ|ξ - |ξ1|ξ1 - |ξ2|ξ2`, in double-double.
pub fn xi_bo(t: &FrequencyTriple) -> f64 {
    let x = t.xi_exact().signed_square();
    let a = Dd::from(t.xi1).signed_square();
    let b = Dd::from(t.xi2).signed_square();
    x.sub(a).sub(b).hi
}

/// `2 sgn(M) · (product of the other two)`, where `M` is the entry of largest
/// magnitude. Its modulus is `2 ξ_med ξ_min`.
pub fn xi_bo_factored(t: &FrequencyTriple) -> f64 {
    let e = t.entries();
    let mut imax = 0;
    for i in 1..3 {
        if e[i].abs() > e[imax].abs() {
            imax = i;
        }
    }
    let others: f64 = (0..3).filter(|&i| i != imax).map(|i| e[i]).product();
    2.0 * e[imax].signum() * others
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectEvaluation {
    pub value: f64,
    /// `(|p̃(ξ)| + |p̃(ξ1)| + |p̃(ξ2)|) / |value|`.
    pub condition: f64,
    /// Set when `condition` exceeds [`CANCELLATION_WARNING`]; use the series form instead.
    pub cancellation_warning: bool,
}

/// `p̃_δ(ξ) - p̃_δ(ξ1) - p̃_δ(ξ2)`. For `δ = 0` this is [`xi_kdv`].
pub fn xi_tilde_direct(delta: DepthParameter, t: &FrequencyTriple) -> DirectEvaluation {
    if delta.is_kdv() {
        return DirectEvaluation {
            value: xi_kdv(t),
            condition: 1.0,
            cancellation_warning: false,
        };
    }
    let [x, a, b] = t.entries().map(|v| p_tilde(delta, v));
    let value = x - a - b;
    let mass = x.abs() + a.abs() + b.abs();
    // a zero entry makes the difference exact, since p̃ is evaluated oddly
    let condition = if mass == 0.0 || t.has_zero() {
        1.0
    } else if value == 0.0 {
        f64::INFINITY
    } else {
        mass / value.abs()
    };
    DirectEvaluation {
        value,
        condition,
        cancellation_warning: condition > CANCELLATION_WARNING,
    }
}

fn require_positive_depth(delta: DepthParameter) -> Result<f64> {
    if delta.is_kdv() {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    Ok(delta.value())
}

fn poles(d: f64, t: &FrequencyTriple) -> [f64; 3] {
    t.entries().map(|x| (d * x) * (d * x))
}

/// `ξ1² + ξ1ξ2 + ξ2²`.
fn quad_form(t: &FrequencyTriple) -> f64 {
    t.xi1 * t.xi1 + t.xi1 * t.xi2 + t.xi2 * t.xi2
}

/// `6ξξ1ξ2 Σ_k π²k²(3π²k² + δ²(ξ1²+ξ1ξ2+ξ2²)) / ∏_j(π²k² + δ²ξ_j²)`.
///
/// Every summand is positive, so the sign is that of `ξξ1ξ2`. The remainder
/// after the directly summed terms is accelerated; `tol` bounds the relative
/// size of the last expansion term kept.
pub fn xi_tilde_series(
    delta: DepthParameter,
    t: &FrequencyTriple,
    tol: f64,
) -> Result<SeriesSum> {
    let d = require_positive_depth(delta)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let num = [0.0, d * d * quad_form(t), 3.0];
    let mut sum = rational_series(&num, &poles(d, t), tol);
    let pref = 6.0 * t.xi() * t.xi1 * t.xi2;
    sum.value *= pref;
    sum.tail_bound *= pref.abs();
    Ok(sum)
}

/// `sgn(x) · 2x²/(e^{2δ|x|} - 1)`, the gap between `x² coth(δx)` and `x|x|`.
fn bo_excess(d: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let v = 2.0 * x * x / (2.0 * d * x.abs()).exp_m1();
    v.copysign(x)
}

/// `(3/δ)(Ξ_BO + e(ξ) - e(ξ1) - e(ξ2))`, accurate when every large entry has `δ|ξ_j| ≫ 1`.
fn xi_tilde_bo_split(d: f64, t: &FrequencyTriple) -> f64 {
    let [x, a, b] = t.entries();
    let corr = bo_excess(d, x) - bo_excess(d, a) - bo_excess(d, b);
    3.0 / d * (xi_bo_factored(t) + corr)
}

/// Scaled ILW resonance `Ξ̃_δ` with full relative accuracy.
///
/// Uses the direct difference when it is well conditioned, the accelerated
/// series when `δ ξ_max ≤` [`SERIES_LIMIT`], and the Benjamin–Ono split beyond.
pub fn xi_tilde(delta: DepthParameter, t: &FrequencyTriple) -> f64 {
    let direct = xi_tilde_direct(delta, t);
    if delta.is_kdv() || direct.condition <= DIRECT_CONDITION_LIMIT {
        return direct.value;
    }
    let d = delta.value();
    if d * t.ordered_magnitudes()[0] <= SERIES_LIMIT {
        match xi_tilde_series(delta, t, SERIES_TOL) {
            Ok(s) => s.value,
            Err(_) => unreachable!("delta and tol checked"),
        }
    } else {
        xi_tilde_bo_split(d, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LowBand,
    HighBand,
    Mixed,
}

impl Regime {
    pub fn classify(delta: DepthParameter, t: &FrequencyTriple) -> Self {
        let cutoff = delta.cutoff();
        let m = t.ordered_magnitudes()[0];
        if m <= cutoff {
            Regime::LowBand
        } else if m >= HIGH_BAND_FACTOR * cutoff {
            Regime::HighBand
        } else {
            Regime::Mixed
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::LowBand => "low-band",
            Regime::HighBand => "high-band",
            Regime::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityRatio {
    pub regime: Regime,
    pub ratio: f64,
}

/// `|Ξ̃_δ| / |ξξ1ξ2|` in the low band (and mixed), `|Ξ̃_δ| / (ξ_min ξ_max / δ)` in the high band.
pub fn lemma22_ratio(delta: DepthParameter, t: &FrequencyTriple) -> Result<ComparabilityRatio> {
    if t.has_zero() {
        return Err(Error::DegenerateInput(format!(
            "all frequencies must be nonzero, got {:?}",
            t.entries()
        )));
    }
    let regime = Regime::classify(delta, t);
    let value = xi_tilde(delta, t).abs();
    let ratio = match regime {
        Regime::LowBand | Regime::Mixed => value / (t.xi() * t.xi1 * t.xi2).abs(),
        Regime::HighBand => {
            let [mx, _, mn] = t.ordered_magnitudes();
            value / (mn * mx / delta.value())
        }
    };
    Ok(ComparabilityRatio { regime, ratio })
}

/// Both parts of `∂_{ξ1} Ξ̃_δ(ξ, ξ1, ξ - ξ1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianTerms {
    /// `3ξ(ξ - 2ξ1) Σ_k 2π²k²(3π²k² + δ²Q) / ∏_{j=0}^2(π²k² + δ²ξ_j²)`.
    pub main: f64,
    /// `3δξξ1ξ2 Σ_k 2π²k² A_k / ∏_{j=0}^2(π²k² + δ²ξ_j²)`.
    pub correction: f64,
}

impl JacobianTerms {
    pub fn value(&self) -> f64 {
        self.main + self.correction
    }
}

/// Series for the derivative of `ξ1 ↦ Ξ̃_δ(ξ, ξ1, ξ - ξ1)`. On the KdV branch
/// this is `3ξ(ξ - 2ξ1)`.
pub fn jacobian_terms(delta: DepthParameter, xi: f64, xi1: f64) -> JacobianTerms {
    let dd = xi - 2.0 * xi1;
    if delta.is_kdv() {
        return JacobianTerms {
            main: 3.0 * xi * dd,
            correction: 0.0,
        };
    }
    let d = delta.value();
    let t = FrequencyTriple::from_output(xi, xi1);
    let (x1, x2) = (t.xi1, t.xi2);
    let [b0, b1, b2] = poles(d, &t);
    let d2 = d * d;
    let first = rational_series(&[0.0, 2.0 * d2 * quad_form(&t), 6.0], &[b0, b1, b2], SERIES_TOL);
    // B(u) = 5u² + δ²(ξ1² - 4ξ1ξ2 + ξ2²) u - δ⁴ξ1ξ2(2ξ1² + 3ξ1ξ2 + 2ξ2²)
    let bq1 = d2 * (x1 * x1 - 4.0 * x1 * x2 + x2 * x2);
    let bq0 = -d2 * d2 * x1 * x2 * (2.0 * x1 * x1 + 3.0 * x1 * x2 + 2.0 * x2 * x2);
    let second = rational_series(
        &[0.0, 2.0 * bq0, 2.0 * bq1, 10.0],
        &[b0, b1, b2, b1, b2],
        SERIES_TOL,
    );
    JacobianTerms {
        main: 3.0 * xi * dd * first.value,
        // ξ2 - ξ1 = ξ - 2ξ1
        correction: 3.0 * d2 * xi * x1 * x2 * dd * second.value,
    }
}

/// `∂_{ξ1} Ξ̃_δ(ξ, ξ1, ξ - ξ1)`.
pub fn jacobian_mu(delta: DepthParameter, xi: f64, xi1: f64) -> f64 {
    jacobian_terms(delta, xi, xi1).value()
}

/// Fourth-order centred difference of `ξ1 ↦ Ξ̃_δ(ξ, ξ1, ξ - ξ1)` with step `h`.
pub fn jacobian_mu_fd(delta: DepthParameter, xi: f64, xi1: f64, h: f64) -> f64 {
    let f = |s: f64| xi_tilde(delta, &FrequencyTriple::from_output(xi, xi1 + s));
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

/// `|B_{δ,k}| / ∏_{j=1}^2(π²k² + δ²ξ_j²)` for an in-band triple.
pub fn bx5_bound(delta: DepthParameter, t: &FrequencyTriple, k: u64) -> Result<f64> {
    let d = require_positive_depth(delta)?;
    if k == 0 {
        return Err(Error::Parameter("k must be a positive integer".into()));
    }
    let limit = delta.cutoff() * (1.0 + 1e-12);
    if t.ordered_magnitudes()[0] > limit {
        return Err(Error::Precondition(format!(
            "frequencies {:?} leave the band |ξ| <= 1/δ = {}",
            t.entries(),
            delta.cutoff()
        )));
    }
    let u = PI * PI * (k as f64) * (k as f64);
    let (x1, x2) = (t.xi1, t.xi2);
    let d2 = d * d;
    let b = 5.0 * u * u + u * d2 * (x1 * x1 - 4.0 * x1 * x2 + x2 * x2)
        - d2 * d2 * x1 * x2 * (2.0 * x1 * x1 + 3.0 * x1 * x2 + 2.0 * x2 * x2);
    let den = (u + d2 * x1 * x1) * (u + d2 * x2 * x2);
    Ok(b.abs() / den)
}

/// `|Ξ_KdV - Ξ̃_δ| = |ξ³h(δ,ξ) - ξ1³h(δ,ξ1) - ξ2³h(δ,ξ2)|`.
pub fn kdv_resonance_gap(delta: DepthParameter, t: &FrequencyTriple) -> f64 {
    if delta.is_kdv() {
        return 0.0;
    }
    let [x, a, b] = t.entries().map(|v| v * v * v * h_delta(delta, v));
    (x - a - b).abs()
}

/// `3δ²ξ_max⁵`, the bound guaranteed for [`kdv_resonance_gap`].
pub fn kdv_resonance_gap_bound(delta: DepthParameter, t: &FrequencyTriple) -> f64 {
    let m = t.ordered_magnitudes()[0];
    3.0 * delta.value().powi(2) * m.powi(5)
}
