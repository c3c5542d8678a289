//! The Diamond-Erdos truncated Mobius construction.
//!
//! mu_T agrees with mu below the truncation point T and takes one rational
//! terminal value at T chosen so the set balances exactly. Viewed as a
//! coefficient set it feeds the same bound machinery as the hand-picked
//! historical sets, and its log-weight A_T approaches 1 as T grows, which is
//! what drives the constants toward the prime number theorem.

use crate::arith::ArithFunctions;
use crate::coeff::{derive_bounds, CoefficientSet};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::rational::{self, Rational};
use crate::zeta::zeta;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// mu truncated at T: mu(n) for n < T, a balancing rational at n = T,
/// zero beyond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedMobius {
    t: u64,
    /// values[n - 1] = mu_T(n) for n in [1, T].
    values: Vec<Rational>,
}

/// Build mu_T. The terminal value is -T * sum_{j<T} mu(j)/j, exact, which
/// forces sum_{n<=T} mu_T(n)/n = 0 identically.
pub fn build_mu_t(t: u64, fns: &ArithFunctions) -> Result<TruncatedMobius> {
    if t < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation point must be at least 2, got {t}"
        )));
    }
    fns.sieve().check_bound(t)?;
    let mut values = Vec::with_capacity(t as usize);
    let mut partial = Rational::zero(); // sum_{j<T} mu(j)/j
    for j in 1..t {
        let mu = fns.mobius(j)?;
        values.push(Rational::from_integer(BigInt::from(mu)));
        if mu != 0 {
            partial += Rational::new(BigInt::from(mu), BigInt::from(j));
        }
    }
    let terminal = -Rational::from_integer(BigInt::from(t)) * partial;
    values.push(terminal);
    Ok(TruncatedMobius { t, values })
}

impl TruncatedMobius {
    pub fn truncation(&self) -> u64 {
        self.t
    }

    /// mu_T(n); zero for n > T.
    pub fn value(&self, n: u64) -> Rational {
        if n == 0 || n > self.t {
            Rational::zero()
        } else {
            self.values[(n - 1) as usize].clone()
        }
    }

    /// The rational terminal value mu_T(T).
    pub fn terminal(&self) -> &Rational {
        &self.values[(self.t - 1) as usize]
    }

    /// sum_{n<=T} mu_T(n)/n, exact; identically zero by construction.
    pub fn balance(&self) -> Rational {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v / Rational::from_integer(BigInt::from(i as u64 + 1)))
            .fold(Rational::zero(), |acc, term| acc + term)
    }

    /// The nonzero entries (n, mu_T(n)) as a coefficient set, unscaled so
    /// the absolute threshold behind the upper bound stays meaningful.
    pub fn as_coefficient_set(&self) -> CoefficientSet {
        let entries: Vec<(u64, Rational)> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u64 + 1, v.clone()))
            .collect();
        CoefficientSet::new(entries).expect("mu_T support is nonempty with nonzero entries")
    }

    /// m_T(n) = sum of mu_T(d) over divisors d of n: the convolution of
    /// mu_T with the constant-one function. Exact.
    pub fn unit_convolution(&self, n: u64) -> Rational {
        assert!(n >= 1, "n must be positive");
        let mut total = Rational::zero();
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                if d <= self.t {
                    total += self.value(d);
                }
                let other = n / d;
                if other != d && other <= self.t {
                    total += self.value(other);
                }
            }
            d += 1;
        }
        total
    }

    /// M_T(x) = sum_{n<=x} m_T(n), computed exactly as
    /// sum_{d<=min(T,x)} mu_T(d) * floor(x/d).
    pub fn unit_convolution_sum(&self, x: f64) -> Rational {
        assert!(x >= 0.0 && x.is_finite(), "x must be a nonnegative real");
        self.unit_convolution_sum_int(x.floor() as u64)
    }

    fn unit_convolution_sum_int(&self, xi: u64) -> Rational {
        let mut total = Rational::zero();
        for d in 1..=self.t.min(xi) {
            let v = &self.values[(d - 1) as usize];
            if !v.is_zero() {
                total += v * Rational::from_integer(BigInt::from(xi / d));
            }
        }
        total
    }

    /// Log-weight A_T = -sum_{j<=T} mu_T(j) log(j)/j.
    pub fn log_weight(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (i, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let j = (i + 1) as f64;
            acc.add(rational::to_f64(v) * j.ln() / j);
        }
        -acc.value()
    }
}

/// One row of the T-indexed convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub t: u64,
    /// A_T, the log-weight of mu_T.
    pub log_weight: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// lcm(1..T) when it is within the period cap, else None. The bound
    /// constants are only derived for rows where this is present.
    pub period: Option<u64>,
}

/// Rows for T in [2, t_max]. alpha and beta come from the full bound
/// derivation whenever lcm(1..T) fits the period cap; they may still be
/// absent for rows whose profile fails a bound hypothesis.
pub fn convergence_table(
    t_max: u64,
    period_cap: u64,
    fns: &ArithFunctions,
) -> Result<Vec<ConvergenceRow>> {
    if t_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "table needs t_max >= 2, got {t_max}"
        )));
    }
    fns.sieve().check_bound(t_max)?;
    let mut rows = Vec::with_capacity((t_max - 1) as usize);
    let mut lcm_running = BigUint::one();
    for t in 2..=t_max {
        lcm_running = lcm_running.lcm(&BigUint::from(t));
        let mu = build_mu_t(t, fns)?;
        let period = lcm_running.to_u64().filter(|&l| l <= period_cap);
        let (alpha, beta) = match period {
            Some(_) => {
                let derivation = derive_bounds(&mu.as_coefficient_set(), period_cap)?;
                (derivation.alpha, derivation.beta)
            }
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            t,
            log_weight: mu.log_weight(),
            alpha,
            beta,
            period,
        });
    }
    Ok(rows)
}

/// The hyperbola-method split of sum_{ij<=x} Lambda(i) m_T(j) at y = T-1.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolaDecomposition {
    pub x: f64,
    pub t: u64,
    /// sum_{j<=T-1} psi(x/j) m_T(j).
    pub psi_side: f64,
    /// sum_{i<=x/(T-1)} M_T(x/i) Lambda(i).
    pub convolution_side: f64,
    /// M_T(T-1) * psi(x/(T-1)).
    pub cross_term: f64,
    /// psi_side + convolution_side - cross_term; equals the double sum.
    pub total: f64,
}

/// Split the double sum along the hyperbola ij = x at j = T-1.
///
/// The identity is exact; the three terms reproduce the direct double sum
/// up to float rounding.
pub fn hyperbola_decomposition(
    x: f64,
    mu: &TruncatedMobius,
    fns: &ArithFunctions,
) -> Result<HyperbolaDecomposition> {
    assert!(x.is_finite(), "x must be finite");
    let t = mu.truncation();
    if x < t as f64 {
        return Err(Error::InvalidArgument(format!(
            "hyperbola split needs x >= T, got x = {x}, T = {t}"
        )));
    }
    let xi = x.floor() as u64;
    fns.sieve().check_bound(xi)?;

    let mut psi_side = KahanSum::new();
    for j in 1..=(t - 1).min(xi) {
        let m = mu.unit_convolution(j);
        if !m.is_zero() {
            psi_side.add(rational::to_f64(&m) * fns.psi((xi / j) as f64)?);
        }
    }

    let split = xi / (t - 1);
    let mut convolution_side = KahanSum::new();
    for i in 2..=split {
        let lambda = fns.von_mangoldt(i)?;
        if lambda == 0.0 {
            continue;
        }
        let m_sum = mu.unit_convolution_sum_int(xi / i);
        if !m_sum.is_zero() {
            convolution_side.add(rational::to_f64(&m_sum) * lambda);
        }
    }

    let cross_term =
        rational::to_f64(&mu.unit_convolution_sum_int(t - 1)) * fns.psi((xi / (t - 1)) as f64)?;

    let psi_side = psi_side.value();
    let convolution_side = convolution_side.value();
    Ok(HyperbolaDecomposition {
        x,
        t,
        psi_side,
        convolution_side,
        cross_term,
        total: psi_side + convolution_side - cross_term,
    })
}

/// Residual of the truncated-Mobius approximation to psi(x) = x:
/// sum_{n<=x} (log * mu_T)(n) - x, computed as sum_j mu_T(j) S(x/j) - x.
///
/// For balanced mu_T the sum is A_T * x + O(T log x), so the residual over
/// x approaches A_T - 1.
pub fn psi_approx_residual(x: f64, mu: &TruncatedMobius, fns: &ArithFunctions) -> Result<f64> {
    assert!(x >= 0.0 && x.is_finite(), "x must be a nonnegative real");
    let xi = x.floor() as u64;
    fns.sieve().check_bound(xi)?;
    let mut acc = KahanSum::new();
    for j in 1..=mu.truncation() {
        let v = mu.value(j);
        if v.is_zero() || j > xi {
            continue;
        }
        acc.add(rational::to_f64(&v) * fns.log_factorial((xi / j) as f64));
    }
    Ok(acc.value() - x)
}

/// Both sides of the Mellin average-value identity
///   s * integral_1^U Mtilde(u) u^(-s-1) du  ->  1 / zeta(s+1),
/// where Mtilde(u) = sum_{i<=u} mu(i)/i.
#[derive(Debug, Clone, Copy)]
pub struct MellinCheck {
    /// The truncated integral, computed exactly piecewise over the steps
    /// of Mtilde.
    pub integral: f64,
    /// 1 / zeta(s+1).
    pub zeta_reciprocal: f64,
}

/// Evaluate the truncated Mellin integral and its limit value.
///
/// Mtilde is a step function, so the integral is the finite sum
/// sum_n Mtilde(n) * (n^-s - (n+1)^-s) with a partial last piece when U is
/// not an integer. Agreement improves as U grows.
pub fn mellin_zeta_check(s: f64, u_limit: f64, fns: &ArithFunctions) -> Result<MellinCheck> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mellin check needs s > 0, got {s}"
        )));
    }
    assert!(u_limit >= 0.0 && u_limit.is_finite(), "U must be a nonnegative real");
    let top = u_limit.floor() as u64;
    fns.sieve().check_bound(top)?;

    let zeta_reciprocal = 1.0 / zeta(s + 1.0);
    if u_limit <= 1.0 {
        // Empty integration range.
        return Ok(MellinCheck {
            integral: 0.0,
            zeta_reciprocal,
        });
    }

    let mut m_tilde = KahanSum::new(); // sum_{i<=n} mu(i)/i
    m_tilde.add(1.0);
    let mut integral = KahanSum::new();
    for n in 1..=top {
        if n > 1 {
            let mu = fns.mobius(n)?;
            if mu != 0 {
                m_tilde.add(mu as f64 / n as f64);
            }
        }
        let left = n as f64;
        let right = ((n + 1) as f64).min(u_limit);
        if right <= left {
            break;
        }
        // s * integral_left^right u^(-s-1) du = left^-s - right^-s.
        integral.add(m_tilde.value() * (left.powf(-s) - right.powf(-s)));
    }

    Ok(MellinCheck {
        integral: integral.value(),
        zeta_reciprocal,
    })
}
