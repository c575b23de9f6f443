//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use trihelm::{Band, Complex64, EpsSchedule, GridPolicy, SpectralParameter, Window, DEFAULT_EXCLUSION};

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<f64>,
    /// `[re, im]`.
    pub k2: Option<[f64; 2]>,
    pub mode: Option<String>,
    pub exclusion_window: Option<f64>,
    pub eps_schedule: Option<Vec<f64>>,
    /// Starting quadrature grid size `M`.
    pub grid: Option<usize>,
    pub radius: Option<usize>,
    pub window: Option<WindowConfig>,
    pub openings: Option<Vec<i64>>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub x1_min: i64,
    pub x1_max: i64,
    #[serde(default = "first_row")]
    pub x2_min: i64,
    pub x2_max: i64,
}

fn first_row() -> i64 {
    1
}

impl WindowConfig {
    pub fn window(self) -> trihelm::Result<Window> {
        Window::new(self.x1_min, self.x1_max, self.x2_min, self.x2_max)
    }
}

impl std::str::FromStr for WindowConfig {
    type Err = String;

    /// `X1_MIN,X1_MAX,X2_MAX`, rows starting at `x2 = 1`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts = parse_list::<i64>(s)?;
        match parts[..] {
            [x1_min, x1_max, x2_max] => Ok(WindowConfig {
                x1_min,
                x1_max,
                x2_min: 1,
                x2_max,
            }),
            _ => Err(format!("expected X1_MIN,X1_MAX,X2_MAX, got {s:?}")),
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|part| part.trim().parse::<T>().map_err(|e| format!("{part:?}: {e}")))
        .collect()
}

/// `RE` or `RE,IM`.
pub fn parse_k2(s: &str) -> Result<Complex64, String> {
    match parse_list::<f64>(s)?[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

/// Flags shared by every command that builds a table or evaluates `G`.
#[derive(Args, Debug, Default, Clone)]
pub struct SpectralArgs {
    /// Wave number in the pass band (0, 3).
    #[arg(long)]
    pub k: Option<f64>,
    /// Complex k^2 off the spectrum, as RE or RE,IM.
    #[arg(long, value_parser = parse_k2, allow_hyphen_values = true)]
    pub k2: Option<Complex64>,
    /// `pass` or `stop`; inferred from --k / --k2 when omitted.
    #[arg(long)]
    pub mode: Option<String>,
    /// Exclusion window around 2*sqrt(2) (pass band) or the spectrum (stop band).
    #[arg(long)]
    pub exclusion_window: Option<f64>,
    /// Absorption values for the eps -> 0 extrapolation, decreasing.
    #[arg(long, value_delimiter = ',')]
    pub eps_schedule: Option<Vec<f64>>,
    /// Starting quadrature grid size M.
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Flags merged over a file, flags winning.
pub struct Resolved<'a> {
    pub file: &'a FileConfig,
    pub args: &'a SpectralArgs,
}

impl Resolved<'_> {
    pub fn spectral(&self) -> Result<SpectralParameter> {
        let k = self.args.k.or(self.file.k);
        let k2 = self.args.k2.or(self.file.k2.map(|[re, im]| Complex64::new(re, im)));
        let mode = self.args.mode.as_deref().or(self.file.mode.as_deref());
        let band = match (mode, k, k2) {
            (Some(m), _, _) => m.parse::<Band>()?,
            (None, Some(_), _) => Band::PassBand,
            (None, None, Some(_)) => Band::StopBand,
            (None, None, None) => bail!(trihelm::Error::InvalidArgument(
                "no wave number given: pass --k or --k2 (or set k / k2 in the config)".into()
            )),
        };
        let delta = self
            .args
            .exclusion_window
            .or(self.file.exclusion_window)
            .unwrap_or(DEFAULT_EXCLUSION);
        let p = match band {
            Band::PassBand => {
                let k = k.ok_or_else(|| {
                    trihelm::Error::InvalidArgument("pass-band mode needs --k".into())
                })?;
                SpectralParameter::pass_band_with_window(k, delta)?
            }
            Band::StopBand => {
                let k2 = match (k2, k) {
                    (Some(k2), _) => k2,
                    (None, Some(k)) => Complex64::new(k * k, 0.0),
                    (None, None) => bail!(trihelm::Error::InvalidArgument("stop-band mode needs --k2".into())),
                };
                SpectralParameter::stop_band_with_window(k2, delta)?
            }
        };
        Ok(p)
    }

    pub fn schedule(&self) -> Result<EpsSchedule> {
        match self.args.eps_schedule.as_ref().or(self.file.eps_schedule.as_ref()) {
            Some(v) => Ok(EpsSchedule::new(v.clone())?),
            None => Ok(EpsSchedule::default()),
        }
    }

    pub fn grid(&self) -> GridPolicy {
        let mut policy = GridPolicy::default();
        if let Some(m) = self.args.grid.or(self.file.grid) {
            policy.start = m;
        }
        policy
    }
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let config: FileConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    Ok(config)
}
