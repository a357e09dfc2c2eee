//! Closed-form invariant arithmetic for Lefschetz fibrations over the sphere.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::decimal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("genus {got} below minimum {need}")]
    GenusTooSmall { need: usize, got: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },
    #[error("sigma + e = {0} is not divisible by 4")]
    Divisibility(BigInt),
    #[error("chi_f = {0} is not positive; slope undefined")]
    NonPositiveChi(BigInt),
}

/// `(g, n, e, σ)` with the derived slope dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FibrationInvariants {
    genus: usize,
    letters: Option<BigInt>,
    euler: BigInt,
    sigma: BigInt,
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

impl FibrationInvariants {
    pub fn new(genus: usize, euler: impl Into<BigInt>, sigma: impl Into<BigInt>) -> Result<Self, LedgerError> {
        if genus == 0 {
            return Err(LedgerError::GenusTooSmall { need: 1, got: 0 });
        }
        Ok(Self {
            genus,
            letters: None,
            euler: euler.into(),
            sigma: sigma.into(),
        })
    }

    /// From an all-positive factorization with `n` letters: `e = 4 − 4g + n`.
    pub fn from_word_data(genus: usize, n: impl Into<BigInt>, sigma: impl Into<BigInt>) -> Result<Self, LedgerError> {
        let n = n.into();
        let e = int(4 - 4 * genus as i64) + &n;
        Ok(Self::new(genus, e, sigma)?.with_letters(n))
    }

    /// Inverts the dictionary: `σ = c₁² − 8χ_h`, `e = 12χ_h − c₁²`.
    pub fn from_k_chi(genus: usize, k_squared: impl Into<BigInt>, chi_f: impl Into<BigInt>) -> Result<Self, LedgerError> {
        let g1 = int(genus as i64 - 1);
        let chi_h = chi_f.into() - &g1;
        let c1sq = k_squared.into() - &g1 * 8;
        Self::new(genus, &chi_h * 12 - &c1sq, &c1sq - &chi_h * 8)
    }

    pub fn with_letters(mut self, n: impl Into<BigInt>) -> Self {
        self.letters = Some(n.into());
        self
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> Option<&BigInt> {
        self.letters.as_ref()
    }

    pub fn euler(&self) -> &BigInt {
        &self.euler
    }

    pub fn sigma(&self) -> &BigInt {
        &self.sigma
    }

    pub fn c1_squared(&self) -> BigInt {
        &self.sigma * 3 + &self.euler * 2
    }

    pub fn chi_h(&self) -> Result<BigInt, LedgerError> {
        let s = &self.sigma + &self.euler;
        let (q, r) = s.div_rem(&int(4));
        if !r.is_zero() {
            return Err(LedgerError::Divisibility(s));
        }
        Ok(q)
    }

    pub fn k_squared(&self) -> BigInt {
        self.c1_squared() + int(8 * (self.genus as i64 - 1))
    }

    pub fn chi_f(&self) -> Result<BigInt, LedgerError> {
        Ok(self.chi_h()? + int(self.genus as i64 - 1))
    }

    pub fn slope(&self) -> Result<BigRational, LedgerError> {
        let chi = self.chi_f()?;
        if !chi.is_positive() {
            return Err(LedgerError::NonPositiveChi(chi));
        }
        Ok(BigRational::new(self.k_squared(), chi))
    }

    fn check_genus(&self, other: &Self) -> Result<(), LedgerError> {
        if self.genus != other.genus {
            return Err(LedgerError::GenusMismatch {
                left: self.genus,
                right: other.genus,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FibrationInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={} e={} sigma={}", self.genus, self.euler, self.sigma)?;
        if let Some(n) = &self.letters {
            write!(f, " n={n}")?;
        }
        match (self.chi_f(), self.slope()) {
            (Ok(chi), Ok(l)) => write!(f, " K2={} chi_f={chi} lambda={l}", self.k_squared()),
            _ => Ok(()),
        }
    }
}

fn require_genus(g: usize, need: usize) -> Result<(), LedgerError> {
    if g < need {
        return Err(LedgerError::GenusTooSmall { need, got: g });
    }
    Ok(())
}

fn check_h(g: usize, h: usize) -> Result<(), LedgerError> {
    require_genus(g, 3)?;
    if h == 0 || h + 2 > g {
        return Err(LedgerError::OutOfRange(format!("need 1 <= h <= g-2, got h={h}, g={g}")));
    }
    Ok(())
}

/// Fibration of the generalized Matsumoto relator.
pub fn matsumoto_invariants(g: usize) -> Result<FibrationInvariants, LedgerError> {
    require_genus(g, 2)?;
    let gi = g as i64;
    let (n, sigma) = if g % 2 == 0 { (2 * gi + 4, -4) } else { (2 * gi + 10, -8) };
    FibrationInvariants::from_word_data(g, n, sigma)
}

/// Fibration of the hyperelliptic relator `h_g`.
pub fn hyperelliptic_invariants(g: usize) -> Result<FibrationInvariants, LedgerError> {
    require_genus(g, 1)?;
    let gi = g as i64;
    FibrationInvariants::from_word_data(g, 8 * gi + 4, -4 * (gi + 1))
}

/// Untwisted or twisted fiber sum: `σ` and `n` add, `e = e₁ + e₂ − (4 − 4g)`.
pub fn ledger_fiber_sum(x: &FibrationInvariants, y: &FibrationInvariants) -> Result<FibrationInvariants, LedgerError> {
    x.check_genus(y)?;
    let e = &x.euler + &y.euler - int(4 - 4 * x.genus as i64);
    let mut out = FibrationInvariants::new(x.genus, e, &x.sigma + &y.sigma)?;
    if let (Some(a), Some(b)) = (&x.letters, &y.letters) {
        out.letters = Some(a + b);
    }
    Ok(out)
}

/// Fiber sum of `k ≥ 1` copies of `x`.
pub fn fiber_sum_copies(x: &FibrationInvariants, k: &BigInt) -> Result<FibrationInvariants, LedgerError> {
    if !k.is_positive() {
        return Err(LedgerError::OutOfRange(format!("need at least one copy, got {k}")));
    }
    let base = int(4 - 4 * x.genus as i64);
    let e = (&x.euler - &base) * k + &base;
    let mut out = FibrationInvariants::new(x.genus, e, &x.sigma * k)?;
    out.letters = x.letters.as_ref().map(|n| n * k);
    Ok(out)
}

/// `(dE, dσ) = (−4h² − 5h, 2h² + 3h)` of the star substitution.
pub fn star_deltas(h: usize) -> (i64, i64) {
    let h = h as i64;
    (-4 * h * h - 5 * h, 2 * h * h + 3 * h)
}

/// One star substitution; letter count drops by `4h² + 5h`.
pub fn apply_star_substitution(x: &FibrationInvariants, h: usize) -> Result<FibrationInvariants, LedgerError> {
    check_h(x.genus, h)?;
    let (de, ds) = star_deltas(h);
    let mut out = FibrationInvariants::new(x.genus, &x.euler + de, &x.sigma + ds)?;
    out.letters = x.letters.as_ref().map(|n| n + de);
    Ok(out)
}

/// `(2h+1)(2h+2)`.
pub fn block_count(h: usize) -> usize {
    (2 * h + 1) * (2 * h + 2)
}

/// `(2h+1)(2h+2)` Matsumoto blocks followed by one star substitution.
pub fn theorem_ledger(g: usize, h: usize) -> Result<FibrationInvariants, LedgerError> {
    check_h(g, h)?;
    let blocks = fiber_sum_copies(&matsumoto_invariants(g)?, &BigInt::from(block_count(h)))?;
    apply_star_substitution(&blocks, h)
}

/// Closed-form slope of the high-slope family.
pub fn theorem_slope(g: usize, h: usize) -> Result<BigRational, LedgerError> {
    check_h(g, h)?;
    let (g, h) = (g as i64, h as i64);
    let (num, den) = if g % 2 == 0 {
        (2 * (14 * h * h + 21 * h + 8), (h + 1) * (4 * g * h + 2 * g - h))
    } else {
        (2 * (30 * h * h + 45 * h + 16), (h + 1) * (4 * g * h + 2 * g + 3 * h + 2))
    };
    Ok(BigRational::from_integer(int(8)) - BigRational::new(int(num), int(den)))
}

/// Stages `1..=m` of the iterated construction.
pub fn corollary_iterate(g: usize, h: usize, m: usize) -> Result<Vec<FibrationInvariants>, LedgerError> {
    if m == 0 {
        return Err(LedgerError::OutOfRange("need m >= 1".into()));
    }
    let n = BigInt::from(block_count(h));
    let mut out = vec![theorem_ledger(g, h)?];
    while out.len() < m {
        let prev = out.last().expect("nonempty");
        let next = apply_star_substitution(&fiber_sum_copies(prev, &n)?, h)?;
        out.push(next);
    }
    Ok(out)
}

/// Limit of the iterated slopes.
pub fn slope_limit(g: usize, h: usize) -> Result<BigRational, LedgerError> {
    check_h(g, h)?;
    let (gi, hi) = (g as i64, h as i64);
    let c = if g % 2 == 0 { gi } else { gi + 1 };
    let num = 2 * ((16 * gi - 18) * hi * hi + (24 * gi - 25) * hi + 4 * (gi - 1));
    let den = (4 * c - 1) * hi * hi + (6 * c - 1) * hi + c;
    Ok(BigRational::new(int(num), int(den)))
}

/// Real maximizer of `slope_limit(g, ·)`.
pub fn h_max_estimate(g: usize) -> f64 {
    let g = g as f64;
    if g as usize % 2 == 0 {
        (2.0 * (g - 2.0) + (4.0 * g * g + 5.0 * g - 12.0).sqrt()) / 7.0
    } else {
        (2.0 * (g - 3.0) + (4.0 * g * g + 21.0 * g - 39.0).sqrt()) / 15.0
    }
}

/// Best integer `h` among the floor and ceiling of `h_max_estimate`, clamped to `[1, g-2]`;
/// ties go to the smaller `h`.
pub fn h_max(g: usize) -> Result<usize, LedgerError> {
    require_genus(g, 3)?;
    let x = h_max_estimate(g);
    let clamp = |h: f64| (h.max(1.0) as usize).clamp(1, g - 2);
    let lo = clamp(x.floor());
    let hi = clamp(x.ceil());
    let (l_lo, l_hi) = (slope_limit(g, lo)?, slope_limit(g, hi)?);
    Ok(if l_hi > l_lo { hi } else { lo })
}

/// Upper bound `2 + (4g − 8)/2ⁿ` for the low-slope family.
pub fn low_slope_bound(g: usize, n: u32) -> Result<BigRational, LedgerError> {
    require_genus(g, 3)?;
    let pow = num_traits::pow(int(2), n as usize);
    Ok(BigRational::from_integer(int(2)) + BigRational::new(int(4 * g as i64 - 8), pow))
}

pub const CSV_HEADER: &str = "g,h,m,Ksq,chi,lambda_num,lambda_den,lambda_decimal";

/// One line of the ledger CSV; `lambda_decimal` has 12 places after the point.
pub fn csv_row(h: Option<usize>, m: Option<usize>, x: &FibrationInvariants) -> Result<String, LedgerError> {
    let lambda = x.slope()?;
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    Ok(format!(
        "{},{},{},{},{},{},{},{}",
        x.genus,
        opt(h),
        opt(m),
        x.k_squared(),
        x.chi_f()?,
        lambda.numer(),
        lambda.denom(),
        decimal::fixed(&lambda, 12)
    ))
}

/// `λ` as an `f64`, for sanity prints only.
pub fn approx_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn kc(x: &FibrationInvariants) -> (BigInt, BigInt) {
        (x.k_squared(), x.chi_f().unwrap())
    }

    #[test]
    fn matsumoto_values() {
        let m2 = matsumoto_invariants(2).unwrap();
        assert_eq!((m2.euler().clone(), m2.sigma().clone()), (int(4), int(-4)));
        assert_eq!(kc(&m2), (int(4), int(1)));
        assert_eq!(m2.slope().unwrap(), q(4, 1));
        let m3 = matsumoto_invariants(3).unwrap();
        assert_eq!((m3.euler().clone(), m3.sigma().clone()), (int(8), int(-8)));
        assert_eq!(kc(&m3), (int(8), int(2)));
        assert_eq!(matsumoto_invariants(4).unwrap().slope().unwrap(), q(6, 1));
        assert!(matches!(matsumoto_invariants(1), Err(LedgerError::GenusTooSmall { .. })));
        for g in 2..=10 {
            let m = matsumoto_invariants(g).unwrap();
            let gi = g as i64;
            assert_eq!(m.k_squared(), int(4 * gi - 4));
            let want = if g % 2 == 0 { q(8 * (gi - 1), gi) } else { q(8 * (gi - 1), gi + 1) };
            assert_eq!(m.slope().unwrap(), want);
        }
    }

    #[test]
    fn hyperelliptic_values() {
        for g in 1..=8 {
            let x = hyperelliptic_invariants(g).unwrap();
            let gi = g as i64;
            assert_eq!(x.euler(), &int(4 * (gi + 2)));
            assert_eq!(x.slope().unwrap(), q(4 * gi - 4, gi));
        }
        assert_eq!(kc(&hyperelliptic_invariants(4).unwrap()), (int(12), int(4)));
    }

    #[test]
    fn dictionary_round_trip() {
        let x = FibrationInvariants::from_k_chi(4, 141, 23).unwrap();
        assert_eq!(kc(&x), (int(141), int(23)));
        assert_eq!(x.k_squared(), x.sigma() * 3 + x.euler() * 2 + int(24));
        let bad = FibrationInvariants::new(2, 3, 0).unwrap();
        assert!(matches!(bad.chi_h(), Err(LedgerError::Divisibility(_))));
        let flat = FibrationInvariants::new(1, 0, 0).unwrap();
        assert!(matches!(flat.slope(), Err(LedgerError::NonPositiveChi(_))));
    }

    #[test]
    fn fiber_sums() {
        let m2 = matsumoto_invariants(2).unwrap();
        let s = ledger_fiber_sum(&m2, &m2).unwrap();
        assert_eq!(kc(&s), (int(8), int(2)));
        assert_eq!(s.slope().unwrap(), q(4, 1));
        assert_eq!(s.letters(), Some(&int(16)));
        let mix = ledger_fiber_sum(&matsumoto_invariants(4).unwrap(), &hyperelliptic_invariants(4).unwrap()).unwrap();
        assert_eq!(mix.slope().unwrap(), q(4, 1));
        assert!(ledger_fiber_sum(&m2, &matsumoto_invariants(3).unwrap()).is_err());
        let twelve = fiber_sum_copies(&matsumoto_invariants(4).unwrap(), &int(12)).unwrap();
        assert_eq!(kc(&twelve), (int(144), int(24)));
        let mut acc = matsumoto_invariants(4).unwrap();
        for _ in 1..12 {
            acc = ledger_fiber_sum(&acc, &matsumoto_invariants(4).unwrap()).unwrap();
        }
        assert_eq!(acc, twelve);
    }

    #[test]
    fn star_substitution_values() {
        let x = FibrationInvariants::from_k_chi(4, 144, 24).unwrap();
        let y = apply_star_substitution(&x, 1).unwrap();
        assert_eq!(kc(&y), (int(141), int(23)));
        let z = apply_star_substitution(&x, 2).unwrap();
        assert_eq!(kc(&z), (int(134), int(21)));
        for h in 1..=5 {
            let (de, ds) = star_deltas(h);
            let dk = 3 * ds + 2 * de;
            let hi = h as i64;
            assert_eq!(dk, -(2 * hi * hi + hi));
        }
        assert!(apply_star_substitution(&x, 3).is_err());
        assert!(apply_star_substitution(&x, 0).is_err());
    }

    #[test]
    fn theorem_values() {
        assert_eq!(theorem_slope(4, 1).unwrap(), q(141, 23));
        assert_eq!(theorem_slope(3, 1).unwrap(), q(93, 23));
        assert!(theorem_slope(4, 0).is_err());
        assert!(theorem_slope(2, 1).is_err());
        for g in 3..=8 {
            for h in 1..=g - 2 {
                assert_eq!(theorem_ledger(g, h).unwrap().slope().unwrap(), theorem_slope(g, h).unwrap());
            }
        }
        assert_eq!(theorem_ledger(4, 1).unwrap().letters(), Some(&int(135)));
        assert_eq!(theorem_ledger(3, 1).unwrap().letters(), Some(&int(183)));
    }

    #[test]
    fn iteration_values() {
        let seq = corollary_iterate(4, 1, 3).unwrap();
        let slopes: Vec<_> = seq.iter().map(|x| x.slope().unwrap()).collect();
        assert_eq!(slopes, vec![q(141, 23), q(1689, 275), q(20265, 3299)]);
        assert_eq!(kc(&seq[1]), (int(1689), int(275)));
        assert_eq!(seq[1].letters(), Some(&int(1611)));
        assert_eq!(slope_limit(4, 1).unwrap(), q(43, 7));
        assert_eq!(slope_limit(3, 1).unwrap(), q(85, 21));
        assert_eq!(slope_limit(4, 2).unwrap(), q(338, 55));
        for (g, h) in [(3, 1), (4, 1), (4, 2), (6, 2), (7, 3)] {
            let lim = slope_limit(g, h).unwrap();
            let seq = corollary_iterate(g, h, 6).unwrap();
            let slopes: Vec<_> = seq.iter().map(|x| x.slope().unwrap()).collect();
            for w in slopes.windows(2) {
                assert!(w[0] < w[1]);
                assert!((&lim - &w[1]).abs() < (&lim - &w[0]).abs());
            }
            assert!(slopes.iter().all(|s| s < &lim));
            // fixed point of K → N K − a, χ → N χ − b from the Matsumoto block
            let n = block_count(h) as i64;
            let m = matsumoto_invariants(g).unwrap();
            let hi = h as i64;
            let a = BigRational::new(int(2 * hi * hi + hi), int(n - 1));
            let b = BigRational::new(int(hi * hi + hi), int(2 * (n - 1)));
            let fixed = (BigRational::from_integer(m.k_squared()) - a) / (BigRational::from_integer(m.chi_f().unwrap()) - b);
            assert_eq!(fixed, lim);
        }
        assert!(corollary_iterate(4, 1, 0).is_err());
    }

    #[test]
    fn h_max_values() {
        assert_eq!(h_max(4).unwrap(), 2);
        assert_eq!(h_max(3).unwrap(), 1);
        for g in 3..=40 {
            let best = (1..=g - 2)
                .max_by(|&a, &b| slope_limit(g, a).unwrap().cmp(&slope_limit(g, b).unwrap()).then(b.cmp(&a)))
                .unwrap();
            assert_eq!(h_max(g).unwrap(), best, "g={g}");
            assert!(slope_limit(g, best).unwrap() < q(8, 1));
        }
    }

    #[test]
    fn low_slope_values() {
        assert_eq!(low_slope_bound(3, 0).unwrap(), q(6, 1));
        assert_eq!(low_slope_bound(5, 3).unwrap(), q(7, 2));
        assert!(low_slope_bound(5, 60).unwrap() < BigRational::new(int(2), int(1)) + q(1, 1_000_000));
    }

    #[test]
    fn csv_formatting() {
        let x = theorem_ledger(4, 1).unwrap();
        assert_eq!(csv_row(Some(1), Some(1), &x).unwrap(), "4,1,1,141,23,141,23,6.130434782609");
        assert_eq!(CSV_HEADER.split(',').count(), 8);
    }
}
