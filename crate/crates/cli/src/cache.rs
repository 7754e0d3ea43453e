//! On-disk family cache keyed by system hash, precision and multi-index.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use log::{debug, warn};
use nikhp_core::asymptotics::FamilySource;
use nikhp_core::hermite_pade::{solve_type_i, solve_type_ii, FamilyKind, FamilyRecord, SystemRef};
use nikhp_core::{MultiIndex, Result, TypeIFamily, TypeIIFamily};

pub const CACHE_ENV: &str = "NIKHP_CACHE_DIR";

/// `$NIKHP_CACHE_DIR`, else `$XDG_CACHE_HOME/nikhp`, else `~/.cache/nikhp`,
/// else `.nikhp-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("nikhp");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h).join(".cache").join("nikhp");
    }
    PathBuf::from(".nikhp-cache")
}

type Slot<T> = Arc<OnceLock<Result<Arc<T>>>>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub repaired: usize,
}

/// Families for one system. Concurrent requests for the same key wait for a
/// single solve; the solvers do not use the thread pool, so a waiting worker
/// can never be the one that owns the key.
pub struct FamilyCache {
    dir: PathBuf,
    system: SystemRef,
    type_i: Mutex<HashMap<Vec<usize>, Slot<TypeIFamily>>>,
    type_ii: Mutex<HashMap<Vec<usize>, Slot<TypeIIFamily>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    repaired: AtomicUsize,
    tmp_counter: AtomicUsize,
}

impl FamilyCache {
    pub fn new(dir: impl Into<PathBuf>, system: SystemRef) -> FamilyCache {
        FamilyCache {
            dir: dir.into(),
            system,
            type_i: Mutex::new(HashMap::new()),
            type_ii: Mutex::new(HashMap::new()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            repaired: AtomicUsize::new(0),
            tmp_counter: AtomicUsize::new(0),
        }
    }

    pub fn system(&self) -> &SystemRef {
        &self.system
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            repaired: self.repaired.load(Ordering::Relaxed),
        }
    }

    /// `<dir>/<system hash>/p<precision>/<kind>/<n_1>-...-<n_m>.json`.
    pub fn path(&self, kind: FamilyKind, n: &MultiIndex) -> PathBuf {
        let kind = match kind {
            FamilyKind::TypeI => "type-i",
            FamilyKind::TypeII => "type-ii",
        };
        let name: Vec<String> = n.components().iter().map(|c| c.to_string()).collect();
        self.dir
            .join(self.system.content_hash())
            .join(format!("p{}", self.system.prec()))
            .join(kind)
            .join(format!("{}.json", name.join("-")))
    }

    fn slot<T>(map: &Mutex<HashMap<Vec<usize>, Slot<T>>>, n: &MultiIndex) -> Slot<T> {
        let mut g = map.lock().unwrap();
        g.entry(n.components().to_vec()).or_default().clone()
    }

    fn load_or_solve<T>(
        &self,
        kind: FamilyKind,
        n: &MultiIndex,
        rebuild: impl Fn(&FamilyRecord) -> Result<T>,
        solve: impl Fn() -> Result<T>,
        record: impl Fn(&T) -> FamilyRecord,
    ) -> Result<T> {
        let path = self.path(kind, n);
        match fs::read_to_string(&path) {
            Ok(text) => match FamilyRecord::from_json(&text).and_then(|r| rebuild(&r)) {
                Ok(f) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    debug!("cache hit {}", path.display());
                    return Ok(f);
                }
                Err(e) => {
                    warn!("discarding corrupt cache entry {}: {e}", path.display());
                    self.repaired.fetch_add(1, Ordering::Relaxed);
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => warn!("cannot read cache entry {}: {e}", path.display()),
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let f = solve()?;
        if let Err(e) = self.store(&path, &record(&f).to_json()) {
            warn!("cannot write cache entry {}: {e}", path.display());
        }
        Ok(f)
    }

    /// Write to a sibling temporary file and rename it into place.
    fn store(&self, path: &Path, text: &str) -> std::io::Result<()> {
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            ".{}.{}.{}.tmp",
            path.file_name().unwrap().to_string_lossy(),
            std::process::id(),
            self.tmp_counter.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)
    }
}

fn shared<T>(slot: &Slot<T>, init: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
    match slot.get_or_init(|| init().map(Arc::new)) {
        Ok(f) => Ok(f.clone()),
        Err(e) => Err(e.duplicate()),
    }
}

impl FamilySource for FamilyCache {
    fn type_ii(&self, n: &MultiIndex) -> Result<Arc<TypeIIFamily>> {
        let slot = Self::slot(&self.type_ii, n);
        shared(&slot, || {
            self.load_or_solve(
                FamilyKind::TypeII,
                n,
                |r| r.rebuild_type_ii(self.system.clone()),
                || solve_type_ii(self.system.clone(), n),
                FamilyRecord::from_type_ii,
            )
        })
    }

    fn type_i(&self, n: &MultiIndex) -> Result<Arc<TypeIFamily>> {
        let sys = self.system.as_nikishin()?.clone();
        let slot = Self::slot(&self.type_i, n);
        shared(&slot, || {
            self.load_or_solve(
                FamilyKind::TypeI,
                n,
                |r| r.rebuild_type_i(sys.clone()),
                || solve_type_i(sys.clone(), n),
                FamilyRecord::from_type_i,
            )
        })
    }
}
