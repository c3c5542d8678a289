//! Coefficient sets and the bound constants they generate.
//!
//! A coefficient set assigns a nonzero rational weight a(d) to each divisor
//! d of a finite support D. When the set is balanced (sum a(d)/d = 0), the
//! step function E(t) = sum over d of a(d) * floor(t/d) is periodic with
//! period lcm(D), and profiling one period yields explicit constants
//! (alpha, beta) with alpha * x/log x < pi(x) < beta * x/log x for large x.

use crate::arith::ArithFunctions;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::rational::{self, Rational};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Finite support D with nonzero rational weights a(d), sorted by d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSet {
    entries: Vec<(u64, Rational)>,
    balance: Rational,
}

impl CoefficientSet {
    /// Build from (d, a(d)) pairs. Entries are sorted by d; duplicate d,
    /// zero coefficients, d = 0, and empty supports are rejected.
    pub fn new(mut entries: Vec<(u64, Rational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ParseSet {
                item: String::new(),
                reason: "support must be nonempty".into(),
            });
        }
        entries.sort_by_key(|&(d, _)| d);
        for window in entries.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::ParseSet {
                    item: window[1].0.to_string(),
                    reason: "duplicate divisor".into(),
                });
            }
        }
        for (d, a) in &entries {
            if *d < 1 {
                return Err(Error::ParseSet {
                    item: d.to_string(),
                    reason: "divisor must be at least 1".into(),
                });
            }
            if a.is_zero() {
                return Err(Error::ParseSet {
                    item: d.to_string(),
                    reason: "coefficient must be nonzero".into(),
                });
            }
        }
        let balance = entries
            .iter()
            .map(|(d, a)| a / Rational::from_integer(BigInt::from(*d)))
            .fold(Rational::zero(), |acc, term| acc + term);
        Ok(CoefficientSet { entries, balance })
    }

    /// Parse the set grammar: comma-separated items `d:num` or `d:num/den`,
    /// whitespace ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut entries = Vec::new();
        for item in stripped.split(',') {
            let bad = |reason: &str| Error::ParseSet {
                item: item.to_string(),
                reason: reason.into(),
            };
            let (d_text, a_text) = item
                .split_once(':')
                .ok_or_else(|| bad("expected d:num or d:num/den"))?;
            let d: u64 = d_text.parse().map_err(|_| bad("divisor must be a positive integer"))?;
            if d < 1 {
                return Err(bad("divisor must be at least 1"));
            }
            let a = rational::parse(a_text).ok_or_else(|| bad("coefficient must be num or num/den"))?;
            if a.is_zero() {
                return Err(bad("coefficient must be nonzero"));
            }
            entries.push((d, a));
        }
        // Re-check duplicates here so the error names the item as written.
        let mut seen = entries.iter().map(|&(d, _)| d).collect::<Vec<_>>();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::ParseSet {
                item: w[0].to_string(),
                reason: "duplicate divisor".into(),
            });
        }
        Self::new(entries)
    }

    /// Canonical text: sorted by d, sign always printed, `num/den` for
    /// non-integers. Round-trips through [`CoefficientSet::parse`].
    pub fn canonical_text(&self) -> String {
        let items: Vec<String> = self
            .entries
            .iter()
            .map(|(d, a)| {
                let sign = if a.is_negative() { '-' } else { '+' };
                format!("{d}:{sign}{}", rational::render(&a.abs()))
            })
            .collect();
        items.join(",")
    }

    pub fn entries(&self) -> &[(u64, Rational)] {
        &self.entries
    }

    /// Support size |D|.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the support is nonempty by construction
    }

    pub fn coefficient(&self, d: u64) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&d, |&(dd, _)| dd)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    /// Exact balance sum a(d)/d; zero iff the set is balanced.
    pub fn balance(&self) -> &Rational {
        &self.balance
    }

    pub fn is_balanced(&self) -> bool {
        self.balance.is_zero()
    }

    /// lcm of the support, exact.
    pub fn lcm(&self) -> BigUint {
        self.entries
            .iter()
            .map(|&(d, _)| BigUint::from(d))
            .fold(BigUint::one(), |acc, d| acc.lcm(&d))
    }

    /// Log-weight A = -sum a(d) log(d)/d, compensated binary64.
    pub fn log_weight(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (d, a) in &self.entries {
            let df = *d as f64;
            acc.add(rational::to_f64(a) * df.ln() / df);
        }
        -acc.value()
    }

    /// E(t) = sum a(d) * floor(t/d), exact. Constant on [n, n+1) for
    /// integer n, so only floor(t) matters.
    pub fn eval_e(&self, t: f64) -> Rational {
        assert!(t >= 0.0 && t.is_finite(), "t must be a nonnegative real");
        self.eval_e_at_int(t.floor() as u64)
    }

    /// E at an exact rational point; used to test the fractional-part form.
    pub fn eval_e_rational(&self, t: &Rational) -> Rational {
        assert!(!t.is_negative(), "t must be nonnegative");
        let mut total = Rational::zero();
        for (d, a) in &self.entries {
            let quotient = t / Rational::from_integer(BigInt::from(*d));
            total += a * quotient.floor();
        }
        total
    }

    fn eval_e_at_int(&self, n: u64) -> Rational {
        let mut total = Rational::zero();
        for (d, a) in &self.entries {
            let q = n / d;
            if q > 0 {
                total += a * Rational::from_integer(BigInt::from(q));
            }
        }
        total
    }

    /// The set with every coefficient multiplied by c > 0.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument(
                "scale factor must be positive".into(),
            ));
        }
        Self::new(
            self.entries
                .iter()
                .map(|(d, a)| (*d, a * c))
                .collect(),
        )
    }
}

impl std::fmt::Display for CoefficientSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

/// Default ceiling on lcm(D) for full-period scans.
pub const DEFAULT_PERIOD_CAP: u64 = 10_000_000;

/// E profiled over one full period [0, lcm(D)).
#[derive(Debug, Clone)]
pub struct PeriodProfile {
    /// Period L = lcm(D).
    pub period: u64,
    /// E(n) for n in [0, L); exactly `period` entries, values\[0\] = 0.
    pub values: Vec<Rational>,
    pub e_min: Rational,
    pub e_max: Rational,
    /// Largest r <= L+1 with E(n) >= 1 on all of [1, r). rho = 2 means
    /// E(1) >= 1; rho = 1 means the run is empty.
    pub rho: u64,
    /// True iff e_min >= 0.
    pub nonnegative: bool,
}

/// Everything the scan produces except the materialized values.
#[derive(Debug, Clone)]
pub(crate) struct ScanSummary {
    period: u64,
    e_min: Rational,
    e_max: Rational,
    rho: u64,
    nonnegative: bool,
    /// Set when an abort-on-negative scan stopped early; extrema are then partial.
    aborted: bool,
}

/// Coefficients rescaled to a common integer denominator, for the i128 scan
/// fast path. `scaled[i] = a(d_i) * denominator` exactly.
struct ScaledCoefficients {
    divisors: Vec<u64>,
    scaled: Vec<i128>,
    denominator: BigInt,
    denominator_f64: f64,
}

impl ScaledCoefficients {
    /// None when the scaled values could overflow i128 during a scan whose
    /// arguments reach `max_argument`.
    fn try_new(set: &CoefficientSet, max_argument: u64) -> Option<Self> {
        let q = set
            .entries
            .iter()
            .map(|(_, a)| a.denom().magnitude().clone())
            .fold(BigUint::one(), |acc, d| acc.lcm(&d));
        let q = BigInt::from(q);
        let mut divisors = Vec::with_capacity(set.len());
        let mut scaled = Vec::with_capacity(set.len());
        let mut abs_sum = BigInt::zero();
        for (d, a) in &set.entries {
            let v = (a * &q).to_integer();
            abs_sum += v.abs();
            divisors.push(*d);
            scaled.push(v.to_i128()?);
        }
        // Partial sums during evaluation stay within abs_sum * max_argument.
        let bound = abs_sum * BigInt::from(max_argument.max(1));
        if bound > BigInt::from(i128::MAX / 4) {
            return None;
        }
        let denominator_f64 = q.to_f64()?;
        Some(ScaledCoefficients {
            divisors,
            scaled,
            denominator: q,
            denominator_f64,
        })
    }

    /// E(n) * denominator, exact.
    fn eval_scaled(&self, n: u64) -> i128 {
        let mut total = 0i128;
        for (d, c) in self.divisors.iter().zip(&self.scaled) {
            let q = (n / d) as i128;
            total += c * q;
        }
        total
    }

    /// E(n) as f64; exact whenever the scaled value fits 53 bits.
    fn eval_f64(&self, n: u64) -> f64 {
        self.eval_scaled(n) as f64 / self.denominator_f64
    }

    fn to_rational(&self, scaled_value: i128) -> Rational {
        Rational::new(BigInt::from(scaled_value), self.denominator.clone())
    }
}

fn scan_period(
    set: &CoefficientSet,
    period_cap: u64,
    materialize: bool,
    abort_on_negative: bool,
) -> Result<(ScanSummary, Option<Vec<Rational>>)> {
    if !set.is_balanced() {
        return Err(Error::Unbalanced {
            balance: set.balance().clone(),
        });
    }
    let lcm = set.lcm();
    let period = match lcm.to_u64() {
        Some(l) if l <= period_cap => l,
        _ => {
            return Err(Error::PeriodCapExceeded {
                lcm,
                cap: period_cap,
            })
        }
    };

    if let Some(fast) = ScaledCoefficients::try_new(set, period) {
        let mut values = materialize.then(|| Vec::with_capacity(period as usize));
        let mut min = 0i128;
        let mut max = 0i128;
        let mut rho = 0u64;
        let one = match fast.denominator.to_i128() {
            Some(q) => q,
            None => return Ok(scan_period_big(set, period, materialize, abort_on_negative)),
        };
        for n in 0..period {
            let e = fast.eval_scaled(n);
            if let Some(v) = values.as_mut() {
                v.push(fast.to_rational(e));
            }
            if e < min {
                min = e;
            }
            if e > max {
                max = e;
            }
            if n >= 1 && rho == 0 && e < one {
                rho = n;
            }
            if abort_on_negative && e < 0 {
                return Ok((
                    ScanSummary {
                        period,
                        e_min: fast.to_rational(min),
                        e_max: fast.to_rational(max),
                        rho: if rho == 0 { period } else { rho },
                        nonnegative: false,
                        aborted: true,
                    },
                    None,
                ));
            }
        }
        // E(L) = E(0) = 0 < 1 closes the initial run at L if nothing did.
        if rho == 0 {
            rho = period;
        }
        let summary = ScanSummary {
            period,
            e_min: fast.to_rational(min),
            e_max: fast.to_rational(max),
            rho,
            nonnegative: min >= 0,
            aborted: false,
        };
        return Ok((summary, values));
    }

    Ok(scan_period_big(set, period, materialize, abort_on_negative))
}

/// Arbitrary-precision scan; only reached for coefficient sets whose scaled
/// magnitudes exceed the i128 fast path.
fn scan_period_big(
    set: &CoefficientSet,
    period: u64,
    materialize: bool,
    abort_on_negative: bool,
) -> (ScanSummary, Option<Vec<Rational>>) {
    let mut values = materialize.then(|| Vec::with_capacity(period as usize));
    let mut min = Rational::zero();
    let mut max = Rational::zero();
    let mut rho = 0u64;
    let one = Rational::one();
    for n in 0..period {
        let e = set.eval_e_at_int(n);
        if e < min {
            min = e.clone();
        }
        if e > max {
            max = e.clone();
        }
        if n >= 1 && rho == 0 && e < one {
            rho = n;
        }
        let negative = e.is_negative();
        if let Some(v) = values.as_mut() {
            v.push(e);
        }
        if abort_on_negative && negative {
            return (
                ScanSummary {
                    period,
                    e_min: min,
                    e_max: max,
                    rho: if rho == 0 { period } else { rho },
                    nonnegative: false,
                    aborted: true,
                },
                None,
            );
        }
    }
    if rho == 0 {
        rho = period;
    }
    let nonnegative = !min.is_negative();
    (
        ScanSummary {
            period,
            e_min: min,
            e_max: max,
            rho,
            nonnegative,
            aborted: false,
        },
        values,
    )
}

/// Profile E over one full period.
///
/// Errors: [`Error::Unbalanced`] for unbalanced sets (E is not periodic
/// without balance) and [`Error::PeriodCapExceeded`] when lcm(D) is beyond
/// `period_cap`. Memory is proportional to the period.
pub fn period_profile(set: &CoefficientSet, period_cap: u64) -> Result<PeriodProfile> {
    let (summary, values) = scan_period(set, period_cap, true, false)?;
    Ok(PeriodProfile {
        period: summary.period,
        values: values.expect("materialized scan"),
        e_min: summary.e_min,
        e_max: summary.e_max,
        rho: summary.rho,
        nonnegative: summary.nonnegative,
    })
}

/// The constants a balanced set yields, with applicability diagnostics.
#[derive(Debug, Clone)]
pub struct BoundDerivation {
    /// Log-weight A.
    pub log_weight: f64,
    /// Lower constant alpha = A / e_max; present iff `lower_applicable`.
    pub alpha: Option<f64>,
    /// Upper constant beta = A * rho / (rho - 1); present iff `upper_applicable`.
    pub beta: Option<f64>,
    pub lower_applicable: bool,
    pub upper_applicable: bool,
    /// One line per failed hypothesis, plus caveats on the derived constants.
    pub diagnostics: Vec<String>,
}

/// Derive (alpha, beta) from a full-period scan.
///
/// The lower constant needs E >= 0 everywhere and e_max > 0; the upper
/// additionally needs an initial run E >= 1 on [1, rho) with rho >= 2.
/// Hypothesis failures produce diagnostics, never fabricated constants.
pub fn derive_bounds(set: &CoefficientSet, period_cap: u64) -> Result<BoundDerivation> {
    let (summary, _) = scan_period(set, period_cap, false, false)?;
    Ok(derive_from_summary(set, &summary))
}

/// Same derivation, reusing an existing profile.
pub fn derive_bounds_from_profile(set: &CoefficientSet, profile: &PeriodProfile) -> BoundDerivation {
    let summary = ScanSummary {
        period: profile.period,
        e_min: profile.e_min.clone(),
        e_max: profile.e_max.clone(),
        rho: profile.rho,
        nonnegative: profile.nonnegative,
        aborted: false,
    };
    derive_from_summary(set, &summary)
}

fn derive_from_summary(set: &CoefficientSet, summary: &ScanSummary) -> BoundDerivation {
    let log_weight = set.log_weight();
    let mut diagnostics = Vec::new();

    let lower_applicable = summary.nonnegative && summary.e_max.is_positive();
    if !summary.nonnegative {
        diagnostics.push(format!(
            "no bounds: E takes negative values on the period (min E = {})",
            rational::render(&summary.e_min)
        ));
    } else if !summary.e_max.is_positive() {
        diagnostics.push("no lower bound: E is identically zero".into());
    }

    let alpha = lower_applicable.then(|| scale_invariant_alpha(set, &summary.e_max));

    let upper_applicable = summary.nonnegative && summary.rho >= 2;
    if summary.nonnegative && summary.rho < 2 {
        diagnostics.push(
            "no upper bound: E(1) < 1, so there is no initial run to telescope (rho = 1)".into(),
        );
    }
    let beta = upper_applicable.then(|| {
        let rho = summary.rho as f64;
        log_weight * (rho / (rho - 1.0))
    });
    if upper_applicable {
        diagnostics.push(
            "note: beta depends on the absolute threshold E >= 1 and changes under coefficient rescaling; alpha does not".into(),
        );
    }

    BoundDerivation {
        log_weight,
        alpha,
        beta,
        lower_applicable,
        upper_applicable,
        diagnostics,
    }
}

/// alpha = A / e_max, evaluated as the log-weight of the set rescaled by
/// 1/e_max. The rescaling is exact rational arithmetic, so coefficient sets
/// that are positive multiples of one another get bit-identical alphas.
fn scale_invariant_alpha(set: &CoefficientSet, e_max: &Rational) -> f64 {
    let mut acc = KahanSum::new();
    for (d, a) in set.entries() {
        let df = *d as f64;
        acc.add(rational::to_f64(&(a / e_max)) * df.ln() / df);
    }
    -acc.value()
}

/// The two rearrangements of the double sum behind the bound derivation,
/// plus the leading term A*x they both approximate.
#[derive(Debug, Clone, Copy)]
pub struct IdentitySums {
    /// sum over l <= x of Lambda(l) * E(x/l).
    pub lambda_side: f64,
    /// sum over d in D of a(d) * S(x/d).
    pub log_factorial_side: f64,
    /// A * x.
    pub a_times_x: f64,
}

/// Evaluate both sides of the finite rearrangement
/// sum_d a(d) S(x/d) = sum_l Lambda(l) E(x/l).
///
/// The two sides are the same finite sum reordered, so they agree to float
/// rounding; both approach A*x + O(log x) for balanced sets.
pub fn identity_sums(set: &CoefficientSet, x: f64, fns: &ArithFunctions) -> Result<IdentitySums> {
    assert!(x >= 0.0 && x.is_finite(), "x must be a nonnegative real");
    let xi = x.floor() as u64;
    fns.sieve().check_bound(xi)?;

    let fast = ScaledCoefficients::try_new(set, xi);
    let mut lambda_side = KahanSum::new();
    for l in 2..=xi {
        let lambda = fns.von_mangoldt(l)?;
        if lambda == 0.0 {
            continue;
        }
        let e = match &fast {
            Some(f) => f.eval_f64(xi / l),
            None => rational::to_f64(&set.eval_e_at_int(xi / l)),
        };
        if e != 0.0 {
            lambda_side.add(lambda * e);
        }
    }

    let mut log_side = KahanSum::new();
    for (d, a) in set.entries() {
        let s = fns.log_factorial((xi / d) as f64);
        log_side.add(rational::to_f64(a) * s);
    }

    Ok(IdentitySums {
        lambda_side: lambda_side.value(),
        log_factorial_side: log_side.value(),
        a_times_x: set.log_weight() * x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rational, rational_int};

    fn set(text: &str) -> CoefficientSet {
        CoefficientSet::parse(text).unwrap()
    }

    fn first_set() -> CoefficientSet {
        set("1:1,2:-2")
    }

    fn set_1850() -> CoefficientSet {
        set("1:1,2:-1,3:-1,5:-1,30:1")
    }

    #[test]
    fn parse_first_set() {
        let s = first_set();
        assert_eq!(
            s.entries(),
            &[(1, rational_int(1)), (2, rational_int(-2))]
        );
    }

    #[test]
    fn parse_1850_set() {
        let s = set_1850();
        assert_eq!(s.len(), 5);
        assert_eq!(s.coefficient(30), Some(&rational_int(1)));
        assert_eq!(s.coefficient(5), Some(&rational_int(-1)));
    }

    #[test]
    fn parse_rejects_duplicates_zero_and_bad_items() {
        assert!(matches!(
            CoefficientSet::parse("2:1,2:3"),
            Err(Error::ParseSet { item, .. }) if item == "2"
        ));
        assert!(CoefficientSet::parse("1:0").is_err());
        assert!(CoefficientSet::parse("0:1").is_err());
        assert!(CoefficientSet::parse("1:1,junk").is_err());
        assert!(CoefficientSet::parse("1:1/0").is_err());
        assert!(CoefficientSet::parse("").is_err());
    }

    #[test]
    fn parse_ignores_whitespace_and_accepts_fractions() {
        let s = set(" 1 : 1 ,\t3 : -3/2 ");
        assert_eq!(s.coefficient(3), Some(&rational(-3, 2)));
    }

    #[test]
    fn canonical_text_round_trips_and_prints_signs() {
        let s = set("2:-1, 1:1, 3:-3/2");
        assert_eq!(s.canonical_text(), "1:+1,2:-1,3:-3/2");
        assert_eq!(CoefficientSet::parse(&s.canonical_text()).unwrap(), s);
    }

    #[test]
    fn balance_examples() {
        assert!(first_set().is_balanced());
        assert!(set_1850().is_balanced());
        assert_eq!(set("1:1").balance(), &rational_int(1));
    }

    #[test]
    fn log_weight_examples() {
        assert!((first_set().log_weight() - 2f64.ln()).abs() < 1e-15);
        assert!((set_1850().log_weight() - 0.921292).abs() < 1e-6);
        assert_eq!(set("1:7").log_weight(), 0.0);
    }

    #[test]
    fn eval_e_matches_case_table() {
        let s = first_set();
        assert_eq!(s.eval_e(1.5), rational_int(1));
        assert_eq!(s.eval_e(0.5), rational_int(0));
        // 1850 set at t = 7: 7 - 3 - 2 - 1 + 0.
        assert_eq!(set_1850().eval_e(7.0), rational_int(1));
    }

    #[test]
    fn profile_first_set() {
        let p = period_profile(&first_set(), DEFAULT_PERIOD_CAP).unwrap();
        assert_eq!(p.period, 2);
        assert_eq!(p.values, vec![rational_int(0), rational_int(1)]);
        assert_eq!(p.e_min, rational_int(0));
        assert_eq!(p.e_max, rational_int(1));
        assert_eq!(p.rho, 2);
        assert!(p.nonnegative);
    }

    #[test]
    fn profile_1850_set_against_brute_scan() {
        let s = set_1850();
        let p = period_profile(&s, DEFAULT_PERIOD_CAP).unwrap();
        assert_eq!(p.period, 30);
        assert_eq!(p.rho, 6);
        assert_eq!(p.e_min, rational_int(0));
        assert_eq!(p.e_max, rational_int(1));
        // Independent brute evaluation of E(n) straight from the definition.
        for n in 0..30u64 {
            let direct: Rational = s
                .entries()
                .iter()
                .map(|(d, a)| a * rational_int((n / d) as i64))
                .fold(Rational::zero(), |acc, t| acc + t);
            assert_eq!(p.values[n as usize], direct, "E({n})");
        }
    }

    #[test]
    fn profile_one_three_set() {
        let p = period_profile(&set("1:1,3:-3"), DEFAULT_PERIOD_CAP).unwrap();
        assert_eq!(p.period, 3);
        assert_eq!(
            p.values,
            vec![rational_int(0), rational_int(1), rational_int(2)]
        );
        assert_eq!(p.e_max, rational_int(2));
    }

    #[test]
    fn profile_needs_balance() {
        assert!(matches!(
            period_profile(&set("1:1"), DEFAULT_PERIOD_CAP),
            Err(Error::Unbalanced { .. })
        ));
    }

    #[test]
    fn profile_respects_period_cap() {
        let s = set("1:1,9973:-9973");
        assert!(matches!(
            period_profile(&s, 100),
            Err(Error::PeriodCapExceeded { cap: 100, .. })
        ));
        assert!(period_profile(&s, 10_000).is_ok());
    }

    #[test]
    fn derive_bounds_first_set() {
        let b = derive_bounds(&first_set(), DEFAULT_PERIOD_CAP).unwrap();
        assert!((b.log_weight - 0.693147).abs() < 1e-6);
        assert!((b.alpha.unwrap() - 0.693147).abs() < 1e-6);
        assert!((b.beta.unwrap() - 1.386294).abs() < 1e-6);
        assert!(b.lower_applicable && b.upper_applicable);
    }

    #[test]
    fn derive_bounds_1850_set() {
        let b = derive_bounds(&set_1850(), DEFAULT_PERIOD_CAP).unwrap();
        assert!((b.alpha.unwrap() - 0.921292).abs() < 1e-6);
        assert!((b.beta.unwrap() - 1.105550).abs() < 1e-6);
    }

    #[test]
    fn derive_bounds_unbalanced_reports() {
        assert!(matches!(
            derive_bounds(&set("1:1"), DEFAULT_PERIOD_CAP),
            Err(Error::Unbalanced { .. })
        ));
    }

    #[test]
    fn derive_bounds_without_initial_run_has_no_beta() {
        // {2:1,4:-2} is balanced and nonnegative but E(1) = 0.
        let b = derive_bounds(&set("2:1,4:-2"), DEFAULT_PERIOD_CAP).unwrap();
        assert!(b.lower_applicable);
        assert!(!b.upper_applicable);
        assert!(b.beta.is_none());
        assert!(b.diagnostics.iter().any(|d| d.contains("no upper bound")));
    }

    #[test]
    fn derive_bounds_negative_e_has_no_bounds() {
        // {1:-1,2:2} is balanced with E(1) = -1.
        let b = derive_bounds(&set("1:-1,2:2"), DEFAULT_PERIOD_CAP).unwrap();
        assert!(!b.lower_applicable && !b.upper_applicable);
        assert!(b.alpha.is_none() && b.beta.is_none());
        assert!(b.diagnostics.iter().any(|d| d.contains("negative")));
    }

    #[test]
    fn alpha_is_bit_invariant_under_rescaling() {
        let s = first_set();
        let b1 = derive_bounds(&s, DEFAULT_PERIOD_CAP).unwrap();
        for c in [rational_int(3), rational(7, 5), rational_int(2)] {
            let scaled = s.scaled(&c).unwrap();
            let b2 = derive_bounds(&scaled, DEFAULT_PERIOD_CAP).unwrap();
            assert_eq!(b1.alpha.unwrap().to_bits(), b2.alpha.unwrap().to_bits());
        }
    }

    #[test]
    fn derivation_orders_alpha_weight_beta() {
        for text in ["1:1,2:-2", "1:1,2:-1,3:-1,5:-1,30:1", "1:2,2:-4"] {
            let b = derive_bounds(&set(text), DEFAULT_PERIOD_CAP).unwrap();
            let (alpha, beta) = (b.alpha.unwrap(), b.beta.unwrap());
            assert!(alpha <= b.log_weight && b.log_weight <= beta, "{text}");
        }
    }

    #[test]
    fn identity_sums_first_set_small() {
        let fns = ArithFunctions::build(1000).unwrap();
        let sums = identity_sums(&first_set(), 100.0, &fns).unwrap();
        let rel = (sums.lambda_side - sums.log_factorial_side).abs()
            / sums.lambda_side.abs().max(1.0);
        assert!(rel < 1e-8, "relative gap {rel}");
    }

    #[test]
    fn identity_sums_beyond_limit_is_bounds_error() {
        let fns = ArithFunctions::build(100).unwrap();
        assert!(identity_sums(&first_set(), 101.0, &fns).is_err());
    }

    #[test]
    fn scaled_rejects_nonpositive_factor() {
        assert!(first_set().scaled(&rational_int(0)).is_err());
        assert!(first_set().scaled(&rational_int(-2)).is_err());
    }
}
