//! Resumable JSON-lines orbit cache.
//!
//! One record per line: `{map_hash, n, numer, denom, factor_data}` with the
//! value stored homogeneously (`∞` is `1/0`). Loading re-validates every
//! line against the map, so a tampered or foreign file is rejected with the
//! offending line number instead of silently poisoning a report.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{from_homogeneous, homogeneous, parse_ext_rational, ExtRational};
use crate::error::{Error, Result};
use crate::map::RationalMap;
use crate::places_q::{is_probable_prime, FactoredValue};
use crate::zsigmondy::{primitive_part, zsigmondy_report_resuming, ZsigmondyConfig, ZsigmondyReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub map_hash: String,
    pub n: u32,
    #[serde(with = "crate::arith::bigint_dec")]
    pub numer: BigInt,
    #[serde(with = "crate::arith::bigint_dec")]
    pub denom: BigInt,
    /// Factorization of the primitive part at level `n`, when computed.
    pub factor_data: Option<FactoredValue>,
}

impl CacheRecord {
    pub fn value(&self) -> ExtRational {
        from_homogeneous(self.numer.clone(), self.denom.clone())
    }
}

/// Identifies a scan: the map, the starting point and the factoring budget.
pub fn map_hash(map: &RationalMap, alpha: &ExtRational, budget: u64) -> String {
    let key = format!("q|{}|{}|{}", map.render(), alpha, budget);
    hex::encode(Sha256::digest(key.as_bytes()))
}

/// Default cache file for a scan inside `dir`.
pub fn default_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("{hash}.jsonl"))
}

/// Reads and validates a cache file; a missing file is an empty cache.
pub fn load(path: &Path, map: &RationalMap, alpha: &ExtRational, budget: u64) -> Result<Vec<CacheRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let hash = map_hash(map, alpha, budget);
    let mut records: Vec<CacheRecord> = Vec::new();
    let mut values: Vec<ExtRational> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let bad = |msg: String| Error::Cache { line: line_no, msg };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CacheRecord = serde_json::from_str(&line).map_err(|e| bad(format!("unparseable record: {e}")))?;
        if rec.map_hash != hash {
            return Err(bad("map hash does not match this map, point and budget; refusing to resume".into()));
        }
        let expected_n = records.len() as u32 + 1;
        if rec.n != expected_n {
            return Err(bad(format!("expected level {expected_n}, found {}", rec.n)));
        }
        if rec.denom.is_negative() || (rec.numer.is_zero() && rec.denom.is_zero()) {
            return Err(bad("malformed value".into()));
        }
        let value = rec.value();
        let prev = values.last().unwrap_or(alpha);
        if value != map.evaluate(prev) || homogeneous(&value) != (rec.numer.clone(), rec.denom.clone()) {
            return Err(bad(format!("level {} value does not follow from level {}", rec.n, rec.n - 1)));
        }
        values.push(value);
        if let Some(fd) = &rec.factor_data {
            let pp = primitive_part(&values, rec.n).map_err(|e| bad(e.to_string()))?;
            if fd.reconstruct() != pp {
                return Err(bad("factor data does not reconstruct the primitive part".into()));
            }
            if let Some(p) = fd.primes().find(|p| !is_probable_prime(p)) {
                return Err(bad(format!("listed factor {p} is not prime")));
            }
        }
        records.push(rec);
    }
    Ok(records)
}

pub fn append(path: &Path, records: &[CacheRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| Error::Invariant(e.to_string()))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}

/// Zsigmondy scan that resumes from `path` and appends the new levels.
pub fn zsigmondy_cached(map: &RationalMap, alpha: &ExtRational, cfg: &ZsigmondyConfig, path: &Path) -> Result<ZsigmondyReport> {
    let cached = load(path, map, alpha, cfg.budget)?;
    let usable = &cached[..cached.len().min(cfg.max_n as usize)];
    let values: Vec<ExtRational> = usable.iter().map(CacheRecord::value).collect();
    let factors: HashMap<u32, FactoredValue> = usable
        .iter()
        .filter_map(|r| r.factor_data.clone().map(|f| (r.n, f)))
        .collect();
    let report = zsigmondy_report_resuming(map, alpha, cfg, &values, &factors)?;

    let hash = map_hash(map, alpha, cfg.budget);
    let fresh: Vec<CacheRecord> = report
        .records
        .iter()
        .filter(|r| r.n as usize > cached.len())
        .map(|r| {
            let value = parse_ext_rational(&r.value)?;
            let (numer, denom) = homogeneous(&value);
            Ok(CacheRecord {
                map_hash: hash.clone(),
                n: r.n,
                numer,
                denom,
                factor_data: r.factorization.clone(),
            })
        })
        .collect::<Result<_>>()?;
    append(path, &fresh)?;
    Ok(report)
}
