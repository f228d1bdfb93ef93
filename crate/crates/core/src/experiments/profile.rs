//! Named analytic initial data.

use serde::{Deserialize, Serialize};

use crate::spectral::{RealGrid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// `a · exp(-((x - c)/w)²)`
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `a · exp(-(x/w)²) · cos(k x)`
    WavePacket {
        amplitude: f64,
        width: f64,
        wavenumber: f64,
    },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Gaussian {
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
        }
    }
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian {
                amplitude,
                width,
                center,
            } => amplitude * (-((x - center) / width).powi(2)).exp(),
            Profile::WavePacket {
                amplitude,
                width,
                wavenumber,
            } => amplitude * (-(x / width).powi(2)).exp() * (wavenumber * x).cos(),
        }
    }

    pub fn sample(&self, grid: RealGrid) -> SpectralField {
        SpectralField::from_fn(grid, |x| self.eval(x))
    }
}
