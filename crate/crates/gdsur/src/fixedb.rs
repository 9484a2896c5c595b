//! Process-wide cache of fixed-b critical-value tables, optionally backed by
//! a directory named by `GDSUR_CACHE_DIR`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

use gdsur_core::inference::{kernel_eigenvalues, FixedBTable};
use serde::{Deserialize, Serialize};

pub const CACHE_DIR_ENV: &str = "GDSUR_CACHE_DIR";
/// Bump when the table construction changes; old files are then ignored.
pub const CACHE_FORMAT_VERSION: u32 = 1;
/// Seed used for every table built through the cache.
pub const FIXED_B_SEED: u64 = 7919;

/// What a table is built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableSpec {
    pub b: f64,
    pub q: usize,
    pub n_grid: usize,
    pub n_sims: usize,
    pub seed: u64,
}

impl TableSpec {
    pub fn new(b: f64, q: usize) -> Self {
        use gdsur_core::inference::{DEFAULT_N_GRID, DEFAULT_N_SIMS};
        Self { b, q, n_grid: DEFAULT_N_GRID, n_sims: DEFAULT_N_SIMS, seed: FIXED_B_SEED }
    }

    fn key(&self) -> (u64, usize, usize, usize, u64) {
        (self.b.to_bits(), self.q, self.n_grid, self.n_sims, self.seed)
    }

    fn file_name(&self) -> String {
        format!(
            "fixedb-v{CACHE_FORMAT_VERSION}-b{:016x}-q{}-n{}-s{}-seed{}.json",
            self.b.to_bits(),
            self.q,
            self.n_grid,
            self.n_sims,
            self.seed
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    format_version: u32,
    b: f64,
    q: usize,
    n_grid: usize,
    n_sims: usize,
    seed: u64,
    draws: Vec<f64>,
}

type Key = (u64, usize, usize, usize, u64);
type EigenMap = HashMap<(u64, usize), Arc<Vec<f64>>>;

pub struct FixedBCache {
    dir: Option<PathBuf>,
    tables: RwLock<HashMap<Key, Arc<FixedBTable>>>,
    eigen: RwLock<EigenMap>,
}

impl FixedBCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir, tables: RwLock::default(), eigen: RwLock::default() }
    }

    /// Cache shared by the whole process, disk-backed when `GDSUR_CACHE_DIR`
    /// is set.
    pub fn global() -> &'static FixedBCache {
        static CACHE: OnceLock<FixedBCache> = OnceLock::new();
        CACHE.get_or_init(|| FixedBCache::new(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn table(&self, spec: TableSpec) -> gdsur_core::Result<Arc<FixedBTable>> {
        if let Some(t) = self.tables.read().expect("cache lock").get(&spec.key()) {
            return Ok(t.clone());
        }
        let table = match self.load(&spec) {
            Some(t) => t,
            None => {
                let lambda = self.eigenvalues(spec.b, spec.n_grid)?;
                let t = FixedBTable::from_eigenvalues(&lambda, spec.b, spec.q, spec.n_grid, spec.n_sims, spec.seed)?;
                self.store(&spec, &t);
                t
            }
        };
        let table = Arc::new(table);
        // a concurrent builder may have won; both produced the same table
        Ok(self.tables.write().expect("cache lock").entry(spec.key()).or_insert(table).clone())
    }

    fn eigenvalues(&self, b: f64, n_grid: usize) -> gdsur_core::Result<Arc<Vec<f64>>> {
        let key = (b.to_bits(), n_grid);
        if let Some(l) = self.eigen.read().expect("cache lock").get(&key) {
            return Ok(l.clone());
        }
        let l = Arc::new(kernel_eigenvalues(b, n_grid)?);
        Ok(self.eigen.write().expect("cache lock").entry(key).or_insert(l).clone())
    }

    fn load(&self, spec: &TableSpec) -> Option<FixedBTable> {
        let path = self.dir.as_ref()?.join(spec.file_name());
        let text = std::fs::read_to_string(&path).ok()?;
        let f: TableFile = match serde_json::from_str(&text) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("ignoring unreadable fixed-b cache file {}: {e}", path.display());
                return None;
            }
        };
        let matches = f.format_version == CACHE_FORMAT_VERSION
            && f.b.to_bits() == spec.b.to_bits()
            && (f.q, f.n_grid, f.n_sims, f.seed) == (spec.q, spec.n_grid, spec.n_sims, spec.seed)
            && f.draws.len() == spec.n_sims;
        if !matches {
            log::warn!("ignoring stale fixed-b cache file {}", path.display());
            return None;
        }
        Some(FixedBTable { b: f.b, q: f.q, n_grid: f.n_grid, seed: f.seed, draws: f.draws })
    }

    fn store(&self, spec: &TableSpec, t: &FixedBTable) {
        let Some(dir) = &self.dir else { return };
        let file = TableFile {
            format_version: CACHE_FORMAT_VERSION,
            b: t.b,
            q: t.q,
            n_grid: t.n_grid,
            n_sims: t.draws.len(),
            seed: t.seed,
            draws: t.draws.clone(),
        };
        let path = dir.join(spec.file_name());
        let tmp = dir.join(format!("{}.tmp{}", spec.file_name(), std::process::id()));
        let res = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&tmp, serde_json::to_vec(&file).expect("table serializes")))
            .and_then(|_| std::fs::rename(&tmp, &path));
        if let Err(e) = res {
            log::warn!("could not write fixed-b cache file {}: {e}", path.display());
        }
    }
}
