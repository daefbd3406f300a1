//! Content-addressed store of solved ground states.
//!
//! Entries are the ground-state JSON artifacts, named by the SHA-256 of the
//! solve inputs and the artifact format tag. Access is serialized through one
//! lock; an unreadable entry is reported and treated as a miss.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use dicke_cat::dicke::DickeParams;
use dicke_cat::ground::{GroundState, GROUND_STATE_FORMAT};
use dicke_cat::lanczos::LanczosSettings;
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
    lock: Mutex<()>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub bytes: u64,
}

/// Hex key for a solve. Floats enter by their bit patterns.
pub fn cache_key(params: &DickeParams, settings: &LanczosSettings) -> String {
    let text = format!(
        "{GROUND_STATE_FORMAT}|atoms={}|g={:016x}|wc={:016x}|wa={:016x}|cutoff={}|tol={:016x}|max_iter={}|krylov={}|seed={}",
        params.atoms,
        params.g.to_bits(),
        params.omega_cav.to_bits(),
        params.omega_atom.to_bits(),
        params.n_cutoff,
        settings.tol.to_bits(),
        settings.max_iter,
        settings.krylov_dim,
        settings.seed,
    );
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, lock: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn lookup(&self, params: &DickeParams, settings: &LanczosSettings) -> Option<GroundState> {
        let key = cache_key(params, settings);
        let path = self.path(&key);
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return None,
            Err(e) => {
                eprintln!("warning: cache entry {} unreadable ({e}); solving afresh", path.display());
                return None;
            }
        };
        match GroundState::from_json(&text) {
            Ok(g) if g.params() == params => Some(g),
            Ok(_) => {
                eprintln!("warning: cache entry {} holds different parameters; solving afresh", path.display());
                None
            }
            Err(e) => {
                eprintln!("warning: cache entry {} is corrupt ({e}); solving afresh", path.display());
                None
            }
        }
    }

    pub fn store(&self, settings: &LanczosSettings, ground: &GroundState) -> io::Result<()> {
        let key = cache_key(ground.params(), settings);
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let tmp = self.dir.join(format!(".{key}.tmp"));
        fs::write(&tmp, ground.to_json())?;
        fs::rename(tmp, self.path(&key))
    }

    pub fn entries(&self) -> io::Result<Vec<CacheEntry>> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(key) = name.strip_suffix(".json").filter(|k| !k.starts_with('.')) {
                out.push(CacheEntry { key: key.to_string(), bytes: entry.metadata()?.len() });
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }

    /// Removes every entry and returns how many there were.
    pub fn clear(&self) -> io::Result<usize> {
        let entries = self.entries()?;
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        for e in &entries {
            fs::remove_file(self.path(&e.key))?;
        }
        Ok(entries.len())
    }
}
