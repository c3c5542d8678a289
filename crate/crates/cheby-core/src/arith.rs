//! Arithmetic functions derived from a sieve: mu, Lambda, psi, theta, pi,
//! and the log-factorial S(x) = sum of log n for n <= x.
//!
//! psi, theta and pi are exposed both as point queries and as prefix tables
//! so that verification scans over millions of consecutive x stay O(1) per
//! point. All log accumulation is compensated.

use crate::error::Result;
use crate::kahan::KahanSum;
use crate::sieve::SieveTable;
use std::sync::Arc;

/// Derived views over a [`SieveTable`].
#[derive(Debug, Clone)]
pub struct ArithFunctions {
    sieve: Arc<SieveTable>,
    /// psi_prefix[n] = sum of Lambda(m) for m <= n.
    psi_prefix: Vec<f64>,
    /// theta_prefix[n] = sum of log p over primes p <= n.
    theta_prefix: Vec<f64>,
    /// pi_prefix[n] = number of primes <= n.
    pi_prefix: Vec<u32>,
}

impl ArithFunctions {
    pub fn new(sieve: Arc<SieveTable>) -> Self {
        let n = sieve.limit() as usize;
        let mut psi_prefix = vec![0.0; n + 1];
        let mut theta_prefix = vec![0.0; n + 1];
        let mut pi_prefix = vec![0u32; n + 1];
        let mut psi_acc = KahanSum::new();
        let mut theta_acc = KahanSum::new();
        let mut count = 0u32;
        for m in 2..=n as u64 {
            let lambda = von_mangoldt_from(&sieve, m);
            if lambda != 0.0 {
                psi_acc.add(lambda);
            }
            if sieve.is_prime(m) {
                theta_acc.add(lambda);
                count += 1;
            }
            psi_prefix[m as usize] = psi_acc.value();
            theta_prefix[m as usize] = theta_acc.value();
            pi_prefix[m as usize] = count;
        }
        ArithFunctions {
            sieve,
            psi_prefix,
            theta_prefix,
            pi_prefix,
        }
    }

    /// Convenience constructor: build the sieve and the derived tables.
    pub fn build(limit: u64) -> Result<Self> {
        Ok(Self::new(Arc::new(SieveTable::build(limit)?)))
    }

    pub fn sieve(&self) -> &SieveTable {
        &self.sieve
    }

    pub fn limit(&self) -> u64 {
        self.sieve.limit()
    }

    /// Mobius function: 0 if n has a squared prime factor, else (-1)^omega(n).
    pub fn mobius(&self, n: u64) -> Result<i32> {
        if n == 1 {
            return Ok(1);
        }
        self.sieve.check_bound(n)?;
        let mut rest = n;
        let mut sign = 1i32;
        while rest > 1 {
            let p = self.sieve.smallest_prime_factor(rest);
            rest /= p;
            if rest % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        Ok(sign)
    }

    /// Von Mangoldt function: log p when n = p^m, else 0.
    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        if n == 1 {
            return Ok(0.0);
        }
        self.sieve.check_bound(n)?;
        Ok(von_mangoldt_from(&self.sieve, n))
    }

    /// psi(x) = sum of Lambda(n) over n <= x.
    pub fn psi(&self, x: f64) -> Result<f64> {
        let n = self.floor_in_range(x)?;
        Ok(self.psi_prefix[n as usize])
    }

    /// theta(x) = sum of log p over primes p <= x.
    pub fn theta(&self, x: f64) -> Result<f64> {
        let n = self.floor_in_range(x)?;
        Ok(self.theta_prefix[n as usize])
    }

    /// pi(x) = number of primes <= x.
    pub fn pi(&self, x: f64) -> Result<u64> {
        let n = self.floor_in_range(x)?;
        Ok(self.pi_prefix[n as usize] as u64)
    }

    /// Prefix view of psi at integer arguments; index n holds psi(n).
    pub fn psi_table(&self) -> &[f64] {
        &self.psi_prefix
    }

    /// Prefix view of theta at integer arguments.
    pub fn theta_table(&self) -> &[f64] {
        &self.theta_prefix
    }

    /// Prefix view of pi at integer arguments.
    pub fn pi_table(&self) -> &[u32] {
        &self.pi_prefix
    }

    /// S(x) = sum of log n for n <= x, compensated. S(0) = S(1) = 0.
    ///
    /// Needs no sieve data and accepts any nonnegative x; cost is O(x).
    pub fn log_factorial(&self, x: f64) -> f64 {
        log_factorial(x)
    }

    /// max over integer x in [2, N] of psi(x)/x.
    ///
    /// The measured ratio stands in for the unspecified constant in the
    /// classical psi(x) = O(x) bound.
    pub fn sup_psi_ratio(&self, n: u64) -> Result<f64> {
        if n < 2 {
            return Err(crate::error::Error::InvalidArgument(format!(
                "sup_psi_ratio needs N >= 2, got {n}"
            )));
        }
        self.sieve.check_bound(n)?;
        let mut best = f64::NEG_INFINITY;
        for x in 2..=n {
            let ratio = self.psi_prefix[x as usize] / x as f64;
            if ratio > best {
                best = ratio;
            }
        }
        Ok(best)
    }

    fn floor_in_range(&self, x: f64) -> Result<u64> {
        assert!(x >= 0.0 && x.is_finite(), "argument must be a nonnegative real");
        let n = x.floor() as u64;
        if n < 2 {
            return Ok(0); // tables hold 0.0 / 0 at indices 0 and 1
        }
        self.sieve.check_bound(n)?;
        Ok(n)
    }
}

/// Standalone S(x) = sum of log n for n <= x.
pub fn log_factorial(x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "argument must be a nonnegative real");
    let top = x.floor() as u64;
    let mut acc = KahanSum::new();
    for n in 2..=top {
        acc.add((n as f64).ln());
    }
    acc.value()
}

fn von_mangoldt_from(sieve: &SieveTable, n: u64) -> f64 {
    debug_assert!(n >= 2);
    let p = sieve.smallest_prime_factor(n);
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
    }
    if rest == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}
