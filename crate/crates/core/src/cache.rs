//! On-disk amplitude cache: exact text serializations of ring elements
//! keyed by (g, h, n), with a content checksum per file and atomic writes.
//!
//! Ring elements are exact and truncation-free, so cache keys carry no
//! truncation order; series evaluations are always recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::ring::RingElement;
use crate::{Error, Result};

/// Environment variable naming the default cache root.
pub const CACHE_ENV: &str = "QEHAE_CACHE";

/// File-backed store of amplitude serializations.
pub struct AmplitudeCache {
    root: PathBuf,
}

fn checksum(body: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    format!("{:x}", hasher.finalize())
}

impl AmplitudeCache {
    /// Open (creating if needed) a cache rooted at `dir`.
    pub fn open(dir: &Path) -> Result<AmplitudeCache> {
        fs::create_dir_all(dir)?;
        Ok(AmplitudeCache { root: dir.to_path_buf() })
    }

    /// Open the cache named by `QEHAE_CACHE`, if the variable is set.
    pub fn from_env() -> Result<Option<AmplitudeCache>> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) => Ok(Some(Self::open(Path::new(&dir))?)),
            None => Ok(None),
        }
    }

    fn path(&self, g: u32, h: u32, n: u32) -> PathBuf {
        self.root.join(format!("amp_{g}_{h}_{n}.ring"))
    }

    /// Write one amplitude atomically: temp file, then rename into place.
    pub fn store(&self, g: u32, h: u32, n: u32, e: &RingElement) -> Result<()> {
        let body = e.serialize();
        let content = format!("sha256 {}\n{body}", checksum(&body));
        let target = self.path(g, h, n);
        let tmp = target.with_extension(format!("tmp.{}", std::process::id()));
        fs::write(&tmp, content)?;
        fs::rename(&tmp, &target)?;
        Ok(())
    }

    /// Read one amplitude back, verifying the checksum line.
    pub fn load(&self, g: u32, h: u32, n: u32) -> Result<Option<RingElement>> {
        let target = self.path(g, h, n);
        let content = match fs::read_to_string(&target) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let name = target.display().to_string();
        let (header, body) = content
            .split_once('\n')
            .ok_or_else(|| Error::CacheCorrupt(format!("{name}: missing checksum line")))?;
        let digest = header
            .strip_prefix("sha256 ")
            .ok_or_else(|| Error::CacheCorrupt(format!("{name}: bad checksum header")))?;
        if digest != checksum(body) {
            return Err(Error::CacheCorrupt(format!("{name}: checksum mismatch")));
        }
        Ok(Some(RingElement::parse(body)?))
    }

    /// Keys currently present, sorted.
    pub fn keys(&self) -> Result<Vec<(u32, u32, u32)>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(rest) = name.strip_prefix("amp_").and_then(|s| s.strip_suffix(".ring")) {
                let parts: Vec<_> = rest.split('_').collect();
                if parts.len() == 3 {
                    if let (Ok(g), Ok(h), Ok(n)) =
                        (parts[0].parse(), parts[1].parse(), parts[2].parse())
                    {
                        out.push((g, h, n));
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Basis, B1, Q1};

    fn sample() -> RingElement {
        let e = RingElement::generator(Basis::I, B1)
            .mul(&RingElement::generator(Basis::I, Q1))
            .unwrap();
        e.with_weights(-1, 2)
    }

    #[test]
    fn store_load_roundtrip() {
        let dir = std::env::temp_dir().join(format!("qehae-cache-{}", std::process::id()));
        let cache = AmplitudeCache::open(&dir).unwrap();
        let e = sample();
        cache.store(1, 2, 3, &e).unwrap();
        let back = cache.load(1, 2, 3).unwrap().unwrap();
        assert_eq!(back.serialize(), e.serialize());
        assert_eq!(cache.keys().unwrap(), vec![(1, 2, 3)]);
        assert!(cache.load(0, 0, 0).unwrap().is_none());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corruption_is_detected() {
        let dir = std::env::temp_dir().join(format!("qehae-corrupt-{}", std::process::id()));
        let cache = AmplitudeCache::open(&dir).unwrap();
        cache.store(0, 3, 0, &sample()).unwrap();
        let path = dir.join("amp_0_3_0.ring");
        let mut content = fs::read_to_string(&path).unwrap();
        content.push_str("0 0 0 0 0 0 0 0 0 0 1\n");
        fs::write(&path, content).unwrap();
        match cache.load(0, 3, 0) {
            Err(Error::CacheCorrupt(m)) => assert!(m.contains("checksum mismatch")),
            other => panic!("expected corruption error, got {other:?}"),
        }
        fs::remove_dir_all(&dir).unwrap();
    }
}
