//! Memoization of class polynomials in memory and optionally on disk.
//!
//! Disk format, one file per discriminant: a first line `d h`, then h + 1
//! decimal coefficients low-to-high, one per line.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;

use super::{hilbert_class_polynomial, ClassPolynomial};
use crate::error::{Error, Result};
use crate::quadforms::{class_number, Discriminant};

/// Shared store of class polynomials, safe to use from several threads.
#[derive(Debug, Default)]
pub struct ClassPolyStore {
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<Discriminant, Arc<ClassPolynomial>>>,
}

impl ClassPolyStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Store backed by files in `dir` (created if missing).
    pub fn with_dir(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(ClassPolyStore {
            dir: Some(dir.as_ref().to_path_buf()),
            mem: Mutex::default(),
        })
    }

    fn path(&self, d: Discriminant) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|dir| dir.join(format!("hilbert_{}.txt", d.abs())))
    }

    pub fn get(&self, d: Discriminant) -> Result<Arc<ClassPolynomial>> {
        if let Some(h) = self.mem.lock().unwrap().get(&d) {
            return Ok(Arc::clone(h));
        }
        let from_disk = self
            .path(d)
            .and_then(|path| fs::read_to_string(path).ok())
            .and_then(|text| parse(d, &text).ok());
        let h = match from_disk {
            Some(h) => h,
            None => {
                let h = hilbert_class_polynomial(d)?;
                if let Some(path) = self.path(d) {
                    write_atomic(&path, &render(&h))?;
                }
                h
            }
        };
        let h = Arc::new(h);
        self.mem.lock().unwrap().insert(d, Arc::clone(&h));
        Ok(h)
    }
}

pub(crate) fn render(h: &ClassPolynomial) -> String {
    let mut out = format!("{} {}\n", h.discriminant(), h.degree());
    for c in h.coeffs() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Parses and validates a cache file against the expected d and h(d).
pub(crate) fn parse(d: Discriminant, text: &str) -> Result<ClassPolynomial> {
    let bad = |why: &str| Error::MalformedTable(format!("class polynomial {d}: {why}"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
    let h = class_number(d);
    if header.len() != 2 || header[0] != d.to_string() || header[1] != h.to_string() {
        return Err(bad("header mismatch"));
    }
    let coeffs = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<BigInt>().map_err(|_| bad("bad coefficient")))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() != h + 1 || !coeffs[h].is_one() {
        return Err(bad("wrong degree or not monic"));
    }
    Ok(ClassPolynomial::from_parts(d, coeffs))
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension(format!(
        "tmp{}.{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
