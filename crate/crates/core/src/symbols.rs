//! Dispersion multipliers of the scaled ILW family.
//!
//! `L_δ(ξ) = (3ξ/δ)(coth(δξ) - 1/(δξ))`, `p̃_δ(ξ) = ξ L_δ(ξ)` and
//! `h(δ, ξ) = 1 - L_δ(ξ)/ξ²`. The depth `δ = 0` is the KdV branch with
//! `p̃_0(ξ) = ξ³` exactly.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{rational_series, SeriesSum};
use crate::spectral::RealGrid;

/// Below this `|x|` the Laurent series is used for `coth x - 1/x`.
pub const LAURENT_SWITCH: f64 = 1e-2;
/// Above this `|x|` the closed form `coth x - 1/x` is used directly.
pub const DIRECT_SWITCH: f64 = 2.0;
const CF_DEPTH: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DepthParameter(f64);

impl DepthParameter {
    pub const KDV: DepthParameter = DepthParameter(0.0);

    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Parameter(format!(
                "delta must satisfy delta ≥ 0 and be finite, got {delta}"
            )));
        }
        // normalise -0.0
        Ok(Self(delta.abs()))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_kdv(self) -> bool {
        self.0 == 0.0
    }

    /// The projector cutoff `1/δ`; infinite on the KdV branch.
    pub fn cutoff(self) -> f64 {
        if self.is_kdv() {
            f64::INFINITY
        } else {
            1.0 / self.0
        }
    }
}

impl TryFrom<f64> for DepthParameter {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DepthParameter> for f64 {
    fn from(d: DepthParameter) -> f64 {
        d.0
    }
}

impl fmt::Display for DepthParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ = {}", self.0)
    }
}

/// `x²/(5 + x²/(7 + x²/(9 + ...)))`, so that `coth x - 1/x = x/(3 + t)`.
fn continued_fraction_tail(x2: f64) -> f64 {
    let mut acc = 0.0;
    for j in (0..CF_DEPTH).rev() {
        acc = x2 / ((2 * j + 5) as f64 + acc);
    }
    acc
}

/// `coth x - 1/x`, odd, with the removable singularity at 0 filled in.
///
/// Laurent series below [`LAURENT_SWITCH`], the continued fraction of `tanh`
/// up to [`DIRECT_SWITCH`], and the closed form beyond.
pub fn coth_minus_inverse(x: f64) -> f64 {
    let a = x.abs();
    let v = if a < LAURENT_SWITCH {
        let a2 = a * a;
        a * (1.0 / 3.0 - a2 * (1.0 / 45.0 - a2 * (2.0 / 945.0)))
    } else if a < DIRECT_SWITCH {
        a / (3.0 + continued_fraction_tail(a * a))
    } else {
        1.0 / a.tanh() - 1.0 / a
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `L_δ(ξ)`; equals `ξ²` on the KdV branch.
pub fn l_delta(delta: DepthParameter, xi: f64) -> f64 {
    if delta.is_kdv() {
        return xi * xi;
    }
    let d = delta.value();
    let a = xi.abs();
    let y = d * a;
    if y < DIRECT_SWITCH {
        // ξ² · 3/(3 + t) avoids dividing by δ when δξ is small
        a * a * (3.0 / (3.0 + continued_fraction_tail(y * y)))
    } else {
        3.0 * a / d * coth_minus_inverse(y)
    }
}

/// `h(δ, ξ) = 1 - L_δ(ξ)/ξ²`, in `[0, 1]`; 0 for `δ = 0` or `ξ = 0`.
pub fn h_delta(delta: DepthParameter, xi: f64) -> f64 {
    if delta.is_kdv() || xi == 0.0 {
        return 0.0;
    }
    let y = delta.value() * xi.abs();
    let h = if y < DIRECT_SWITCH {
        let t = continued_fraction_tail(y * y);
        t / (3.0 + t)
    } else {
        1.0 - 3.0 * coth_minus_inverse(y) / y
    };
    h.clamp(0.0, 1.0)
}

/// `p̃_δ(ξ) = ξ L_δ(ξ)`; `ξ³` when `δ = 0`.
pub fn p_tilde(delta: DepthParameter, xi: f64) -> f64 {
    if delta.is_kdv() {
        return xi * xi * xi;
    }
    xi * l_delta(delta, xi)
}

/// `e^{i t p̃_δ(ξ)}`.
pub fn propagator_phase(delta: DepthParameter, t: f64, xi: f64) -> Complex64 {
    Complex64::cis(t * p_tilde(delta, xi))
}

/// Partial-fraction form `L_δ(ξ) = 6ξ² Σ_k 1/(π²k² + δ²ξ²)`, used as an
/// independent oracle for [`l_delta`].
pub fn l_delta_series(delta: DepthParameter, xi: f64, tol: f64) -> Result<SeriesSum> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let y = delta.value() * xi;
    let mut sum = rational_series(&[1.0], &[y * y], tol);
    let pref = 6.0 * xi * xi;
    sum.value *= pref;
    sum.tail_bound *= pref;
    Ok(sum)
}

/// `p̃_δ` tabulated on a grid in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierTable {
    grid: RealGrid,
    delta: DepthParameter,
    values: Vec<f64>,
}

impl MultiplierTable {
    pub fn new(grid: RealGrid, delta: DepthParameter) -> Self {
        let values = (0..grid.mode_count())
            .map(|i| p_tilde(delta, grid.frequency(i)))
            .collect();
        Self {
            grid,
            delta,
            values,
        }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn delta(&self) -> DepthParameter {
        self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `e^{i t p̃_δ(ξ_k)}` per index.
    pub fn phases(&self, t: f64) -> Vec<Complex64> {
        self.values.iter().map(|&p| Complex64::cis(t * p)).collect()
    }
}
