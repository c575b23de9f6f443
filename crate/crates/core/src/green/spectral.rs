use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default exclusion window around `2 sqrt(2)` and the band edges.
pub const DEFAULT_EXCLUSION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    /// Real `k` in `(0, 3)`: propagating lattice waves, limiting absorption needed.
    PassBand,
    /// Complex `k^2` off `[0, 9]`: the Green's function decays exponentially.
    StopBand,
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Band::PassBand => "pass-band",
            Band::StopBand => "stop-band",
        })
    }
}

impl std::str::FromStr for Band {
    type Err = Error;
    fn from_str(s: &str) -> Result<Band> {
        match s {
            "pass-band" | "pass" => Ok(Band::PassBand),
            "stop-band" | "stop" => Ok(Band::StopBand),
            other => Err(Error::InvalidArgument(format!("unknown band {other:?}"))),
        }
    }
}

/// A validated wave number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    band: Band,
    k2: Complex64,
    delta: f64,
}

impl SpectralParameter {
    pub fn pass_band(k: f64) -> Result<Self> {
        Self::pass_band_with_window(k, DEFAULT_EXCLUSION)
    }

    pub fn pass_band_with_window(k: f64, delta: f64) -> Result<Self> {
        check_window(delta)?;
        if !k.is_finite() || k <= delta || k >= 3.0 - delta {
            return Err(Error::OutOfBand { k });
        }
        if (k - 8f64.sqrt()).abs() <= delta {
            return Err(Error::ExcludedPoint { k, delta });
        }
        Ok(SpectralParameter {
            band: Band::PassBand,
            k2: Complex64::new(k * k, 0.0),
            delta,
        })
    }

    pub fn stop_band(k2: Complex64) -> Result<Self> {
        Self::stop_band_with_window(k2, DEFAULT_EXCLUSION)
    }

    pub fn stop_band_with_window(k2: Complex64, delta: f64) -> Result<Self> {
        check_window(delta)?;
        if !(k2.re.is_finite() && k2.im.is_finite()) || distance_to_spectrum(k2) <= delta {
            return Err(Error::NearSpectrum {
                re: k2.re,
                im: k2.im,
                delta,
            });
        }
        Ok(SpectralParameter {
            band: Band::StopBand,
            k2,
            delta,
        })
    }

    /// Validates either a real `k` (pass band) or a complex `k^2` (stop band).
    pub fn validate(band: Band, k_or_k2: Complex64, delta: f64) -> Result<Self> {
        match band {
            Band::PassBand => {
                if k_or_k2.im != 0.0 {
                    return Err(Error::InvalidArgument("pass-band k must be real".into()));
                }
                Self::pass_band_with_window(k_or_k2.re, delta)
            }
            Band::StopBand => Self::stop_band_with_window(k_or_k2, delta),
        }
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn k2(&self) -> Complex64 {
        self.k2
    }

    /// The real wave number in the pass band.
    pub fn k(&self) -> Option<f64> {
        match self.band {
            Band::PassBand => Some(self.k2.re.sqrt()),
            Band::StopBand => None,
        }
    }

    pub fn exclusion_window(&self) -> f64 {
        self.delta
    }

    /// Pins `k^2` to a stored value that rounds from `k * k` differently.
    pub(crate) fn with_stored_k2(mut self, k2: Complex64) -> Self {
        self.k2 = k2;
        self
    }
}

/// Free-function form of [`SpectralParameter::validate`].
pub fn validate_spectral(k_or_k2: Complex64, band: Band, delta: f64) -> Result<SpectralParameter> {
    SpectralParameter::validate(band, k_or_k2, delta)
}

fn check_window(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exclusion window must be positive, got {delta}")))
    }
}

fn distance_to_spectrum(z: Complex64) -> f64 {
    let re = z.re.clamp(0.0, 9.0);
    (z - Complex64::new(re, 0.0)).norm()
}
