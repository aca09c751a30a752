//! Content-addressed artifact cache.
//!
//! Keys hash the command, its parameters and the format version. Entries are
//! model files; a hit is used only if it parses and its content hash checks
//! out, otherwise it is rebuilt and overwritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::modelfile::{ModelFile, FORMAT_VERSION};

pub const ENV_VAR: &str = "AINF_CACHE_DIR";

pub struct Cache {
    dir: PathBuf,
}

/// Whether a lookup was served from disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    Rebuilt,
}

impl Cache {
    /// `--cache-dir`, else `$AINF_CACHE_DIR`, else `.cache/`.
    pub fn locate(flag: Option<&Path>) -> Cache {
        let dir = match flag {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os(ENV_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".cache")),
        };
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(command: &str, params: &[(String, String)]) -> String {
        let mut h = Sha256::new();
        h.update(format!("format_version={FORMAT_VERSION}\ncommand={command}\n"));
        for (k, v) in params {
            h.update(format!("{k}={v}\n"));
        }
        format!("{:x}", h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.model"))
    }

    /// A cached, hash-valid model file, or `None`, plus whether something
    /// unusable was found on disk.
    pub fn get(&self, key: &str) -> (Option<ModelFile>, bool) {
        match fs::read_to_string(self.path(key)) {
            Ok(text) => match ModelFile::parse(&text) {
                Ok(f) => (Some(f), false),
                Err(_) => (None, true),
            },
            Err(_) => (None, false),
        }
    }

    /// Write via a temporary file in the same directory, then rename.
    pub fn put(&self, key: &str, file: &ModelFile) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(file.emit().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    /// Cached value for `key`, or `build()` stored under it.
    pub fn get_or_build<E>(
        &self,
        key: &str,
        build: impl FnOnce() -> Result<ModelFile, E>,
    ) -> Result<(ModelFile, Lookup), E> {
        let (hit, corrupt) = self.get(key);
        if let Some(f) = hit {
            return Ok((f, Lookup::Hit));
        }
        let f = build()?;
        let _ = self.put(key, &f);
        Ok((f, if corrupt { Lookup::Rebuilt } else { Lookup::Miss }))
    }
}
