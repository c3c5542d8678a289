//! Smallest-prime-factor sieve with persistent cache.
//!
//! A linear sieve records the smallest prime factor of every n in [2, N],
//! which makes per-element mu(n) and Lambda(n) queries O(log n). Primality
//! is kept alongside as a bit table. Tables are immutable after
//! construction and freely shareable across threads.

use crate::error::{Error, Result};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Hard ceiling on sieve size unless a caller raises it explicitly.
pub const DEFAULT_MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Magic string at the head of every cache file.
const CACHE_MAGIC: &[u8; 10] = b"CHEBSIEVE1";

/// Primality and smallest-prime-factor tables for [2, N].
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: u64,
    /// Bit n set iff n is prime; indexed directly by n.
    primality: Vec<u64>,
    /// smallest_prime_factor[n] is the least prime dividing n (entries 0 and 1 unused).
    smallest_prime_factor: Vec<u32>,
}

impl SieveTable {
    /// Sieve [2, N] with the default size ceiling.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_capped(limit, DEFAULT_MAX_SIEVE_LIMIT)
    }

    /// Sieve [2, N] with an explicit size ceiling.
    pub fn build_capped(limit: u64, max_limit: u64) -> Result<Self> {
        if limit < 2 || limit > max_limit {
            return Err(Error::SieveLimit {
                requested: limit,
                max: max_limit,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let spf_i = spf[i];
            for &p in &primes {
                if p > spf_i || (p as usize) > n / i {
                    break;
                }
                spf[i * p as usize] = p;
            }
        }
        Ok(Self::from_spf(limit, spf))
    }

    fn from_spf(limit: u64, spf: Vec<u32>) -> Self {
        let n = limit as usize;
        let mut bits = vec![0u64; n / 64 + 1];
        for i in 2..=n {
            if spf[i] as usize == i {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        SieveTable {
            limit,
            primality: bits,
            smallest_prime_factor: spf,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// True iff n is prime. n must be at most the sieve limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "is_prime({n}) beyond sieve limit {}", self.limit);
        n >= 2 && self.primality[(n / 64) as usize] & (1 << (n % 64)) != 0
    }

    /// Least prime factor of n, for n in [2, limit].
    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        assert!(
            (2..=self.limit).contains(&n),
            "smallest_prime_factor({n}) outside [2, {}]",
            self.limit
        );
        self.smallest_prime_factor[n as usize] as u64
    }

    pub(crate) fn check_bound(&self, value: u64) -> Result<()> {
        if value > self.limit {
            Err(Error::BeyondSieveLimit {
                value,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Cache file name for a given limit inside `dir`.
    pub fn cache_path(dir: &Path, limit: u64) -> PathBuf {
        dir.join(format!("chebsieve-{limit}.bin"))
    }

    /// Load the cached table for `limit` from `dir`, or build and cache it.
    ///
    /// A corrupt, truncated, or mismatched cache file is rebuilt silently;
    /// failure to write the cache is ignored (the in-memory table is still
    /// returned).
    pub fn load_or_build(limit: u64, dir: &Path) -> Result<Self> {
        Self::load_or_build_capped(limit, dir, DEFAULT_MAX_SIEVE_LIMIT)
    }

    pub fn load_or_build_capped(limit: u64, dir: &Path, max_limit: u64) -> Result<Self> {
        if limit < 2 || limit > max_limit {
            return Err(Error::SieveLimit {
                requested: limit,
                max: max_limit,
            });
        }
        let path = Self::cache_path(dir, limit);
        if let Some(table) = Self::read_cache(&path, limit) {
            return Ok(table);
        }
        let table = Self::build_capped(limit, max_limit)?;
        let _ = table.write_cache_file(&path);
        Ok(table)
    }

    /// Write the table to the cache file for its limit inside `dir`.
    pub fn write_cache(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = Self::cache_path(dir, self.limit);
        self.write_cache_file(&path)?;
        Ok(path)
    }

    fn write_cache_file(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
        out.write_all(CACHE_MAGIC).map_err(io_err)?;
        out.write_all(&self.limit.to_le_bytes()).map_err(io_err)?;
        for n in 2..=self.limit as usize {
            out.write_all(&self.smallest_prime_factor[n].to_le_bytes())
                .map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    /// Returns None on any structural mismatch so the caller rebuilds.
    fn read_cache(path: &Path, expected_limit: u64) -> Option<Self> {
        let mut file = fs::File::open(path).ok()?;
        let expected_len = 10 + 8 + 4 * (expected_limit - 1);
        if file.metadata().ok()?.len() != expected_len {
            return None;
        }
        let mut magic = [0u8; 10];
        file.read_exact(&mut magic).ok()?;
        if &magic != CACHE_MAGIC {
            return None;
        }
        let mut limit_bytes = [0u8; 8];
        file.read_exact(&mut limit_bytes).ok()?;
        if u64::from_le_bytes(limit_bytes) != expected_limit {
            return None;
        }
        let n = expected_limit as usize;
        let mut raw = Vec::with_capacity(4 * (n - 1));
        file.read_to_end(&mut raw).ok()?;
        if raw.len() != 4 * (n - 1) {
            return None;
        }
        let mut spf = vec![0u32; n + 1];
        for (i, chunk) in raw.chunks_exact(4).enumerate() {
            spf[i + 2] = u32::from_le_bytes(chunk.try_into().ok()?);
        }
        // Spot-check a few entries; a file of the right shape but wrong
        // content (e.g. a different tool's data) is rebuilt.
        if spf[2] != 2 || spf[3] != 3 || (n >= 4 && spf[4] != 2) || spf[n] == 0 {
            return None;
        }
        Some(Self::from_spf(expected_limit, spf))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent trial-division primality, used as the oracle.
    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn primes_up_to_ten() {
        let sieve = SieveTable::build(10).unwrap();
        let primes: Vec<u64> = (2..=10).filter(|&n| sieve.is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
    }

    #[test]
    fn pi_100_matches_trial_division() {
        let sieve = SieveTable::build(100).unwrap();
        let count = (2..=100).filter(|&n| sieve.is_prime(n)).count();
        let oracle = (2..=100u64).filter(|&n| is_prime_trial(n)).count();
        assert_eq!(count, 25);
        assert_eq!(count, oracle);
    }

    #[test]
    fn smallest_prime_factor_divides_and_is_prime() {
        let sieve = SieveTable::build(10_000).unwrap();
        for n in 2..=10_000u64 {
            let p = sieve.smallest_prime_factor(n);
            assert_eq!(n % p, 0, "spf({n}) = {p} must divide n");
            assert!(is_prime_trial(p), "spf({n}) = {p} must be prime");
            // Least: no smaller prime divides n.
            for q in 2..p {
                assert!(n % q != 0 || !is_prime_trial(q));
            }
        }
    }

    #[test]
    fn limit_out_of_range_is_rejected() {
        let err = SieveTable::build(1).unwrap_err();
        assert!(matches!(err, Error::SieveLimit { requested: 1, .. }));
        let err = SieveTable::build_capped(1000, 100).unwrap_err();
        assert!(matches!(err, Error::SieveLimit { requested: 1000, max: 100 }));
    }

    #[test]
    fn cache_round_trip_preserves_table() {
        let dir = tempfile::tempdir().unwrap();
        let built = SieveTable::build(5000).unwrap();
        built.write_cache(dir.path()).unwrap();
        let loaded = SieveTable::load_or_build(5000, dir.path()).unwrap();
        assert_eq!(built.limit, loaded.limit);
        assert_eq!(built.smallest_prime_factor, loaded.smallest_prime_factor);
        assert_eq!(built.primality, loaded.primality);
    }

    #[test]
    fn corrupt_cache_is_rebuilt_silently() {
        let dir = tempfile::tempdir().unwrap();
        let path = SieveTable::cache_path(dir.path(), 100);
        // Right length, corrupted magic.
        let mut bytes = vec![0u8; 10 + 8 + 4 * 99];
        bytes[..10].copy_from_slice(b"NOTASIEVE0");
        fs::write(&path, &bytes).unwrap();
        let table = SieveTable::load_or_build(100, dir.path()).unwrap();
        assert!(table.is_prime(97));
        // And the rebuild replaced the bad file with a loadable one.
        assert!(SieveTable::read_cache(&path, 100).is_some());
    }

    #[test]
    fn truncated_cache_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let path = SieveTable::cache_path(dir.path(), 100);
        fs::write(&path, b"CHEBSIEVE1").unwrap();
        let table = SieveTable::load_or_build(100, dir.path()).unwrap();
        assert_eq!(table.smallest_prime_factor(91), 7);
    }

    #[test]
    fn cache_file_layout_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let table = SieveTable::build(10).unwrap();
        let path = table.write_cache(dir.path()).unwrap();
        let bytes = fs::read(path).unwrap();
        assert_eq!(&bytes[..10], b"CHEBSIEVE1");
        assert_eq!(u64::from_le_bytes(bytes[10..18].try_into().unwrap()), 10);
        // Entries for n = 2..=10: spf = 2,3,2,5,2,7,2,3,2.
        let spf: Vec<u32> = bytes[18..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        assert_eq!(spf, vec![2, 3, 2, 5, 2, 7, 2, 3, 2]);
    }
}
