//! On-disk cache of Green's-function tables.
//!
//! Files are named by a SHA-256 digest of every build input, radius
//! included, so a hit returns exactly the table a cold build would produce.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::green::extrapolate::EpsSchedule;
use crate::green::recursion::RecursionSettings;
use crate::green::spectral::{Band, SpectralParameter};
use crate::green::table::{recursion_table, GreenTable, SCHEMA_VERSION};

pub const CACHE_ENV: &str = "TRIHELM_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// The cached file was unreadable and has been replaced.
    Rebuilt,
}

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

#[derive(Serialize)]
struct Key<'a> {
    schema_version: u32,
    band: Band,
    k2: [u64; 2],
    exclusion_window: u64,
    radius: usize,
    eps_schedule: Vec<u64>,
    settings: &'a RecursionSettings,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> TableCache {
        TableCache { dir: dir.into() }
    }

    /// `$TRIHELM_CACHE_DIR`, else `$XDG_CACHE_HOME/trihelm`, else
    /// `$HOME/.cache/trihelm`, else `.trihelm-cache`.
    pub fn from_env() -> TableCache {
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            return TableCache::new(dir);
        }
        if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
            return TableCache::new(Path::new(&dir).join("trihelm"));
        }
        if let Some(home) = std::env::var_os("HOME") {
            return TableCache::new(Path::new(&home).join(".cache").join("trihelm"));
        }
        TableCache::new(".trihelm-cache")
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(
        &self,
        spectral: &SpectralParameter,
        radius: usize,
        schedule: &EpsSchedule,
        settings: &RecursionSettings,
    ) -> PathBuf {
        let key = Key {
            schema_version: SCHEMA_VERSION,
            band: spectral.band(),
            k2: [spectral.k2().re.to_bits(), spectral.k2().im.to_bits()],
            exclusion_window: spectral.exclusion_window().to_bits(),
            radius,
            eps_schedule: match spectral.band() {
                Band::PassBand => schedule.as_slice().iter().map(|e| e.to_bits()).collect(),
                Band::StopBand => Vec::new(),
            },
            settings,
        };
        let bytes = serde_json::to_vec(&key).expect("key serializes");
        let digest = hex::encode(Sha256::digest(&bytes));
        self.dir.join(format!("green-{}.json", &digest[..24]))
    }

    /// Loads the matching table or builds and stores it.
    pub fn load_or_build(
        &self,
        spectral: &SpectralParameter,
        radius: usize,
        schedule: &EpsSchedule,
        settings: &RecursionSettings,
    ) -> Result<(Arc<GreenTable>, CacheStatus)> {
        let path = self.path_for(spectral, radius, schedule, settings);
        let mut status = CacheStatus::Built;
        if path.exists() {
            match GreenTable::load(&path) {
                Ok(t) if t.radius() == radius && t.spectral() == spectral => {
                    log::info!("loaded table from {}", path.display());
                    return Ok((Arc::new(t), CacheStatus::Hit));
                }
                Ok(_) => {
                    log::warn!("cached table {} does not match its key; rebuilding", path.display());
                    status = CacheStatus::Rebuilt;
                }
                Err(e) => {
                    log::warn!("cached table unusable ({e}); rebuilding");
                    status = CacheStatus::Rebuilt;
                }
            }
        }
        log::info!("building table: k^2 = {}, radius {radius}", spectral.k2());
        let table = recursion_table(spectral, radius, schedule, settings)?;
        self.store(&path, &table)?;
        Ok((Arc::new(table), status))
    }

    fn store(&self, path: &Path, table: &GreenTable) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let tmp = path.with_extension("json.tmp");
        table.save(&tmp)?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}
