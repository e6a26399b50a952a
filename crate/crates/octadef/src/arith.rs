//! Integer helpers: primality, factorization, factorials, and certified
//! rational bounds on natural logarithms.
//!
//! Nothing here ever rounds: logarithm comparisons are made through exact
//! rational intervals that are widened until the comparison is decisive.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin for u64 (the base set below is exact for all
/// 64-bit inputs).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorization by trial division, `(prime, exponent)` pairs in
/// ascending prime order. Bails out instead of stalling when the input has
/// two prime factors beyond the trial-division horizon.
pub fn factor_u64(mut x: u64) -> Result<Vec<(u64, u32)>> {
    const TRIAL_LIMIT: u64 = 1_000_000;
    if x == 0 {
        return Err(Error::FactorRange("0".into()));
    }
    let mut factors = Vec::new();
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        if e > 0 {
            factors.push((p, e));
        }
    };
    let mut e = 0;
    while x % 2 == 0 {
        x /= 2;
        e += 1;
    }
    push(2, e, &mut factors);
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && p * p <= x {
        let mut e = 0;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        push(p, e, &mut factors);
        p += 2;
    }
    if x > 1 {
        if is_prime_u64(x) {
            push(x, 1, &mut factors);
        } else if let Some(r) = exact_sqrt(x) {
            // x = r^2 with r prime (r > TRIAL_LIMIT would have been caught)
            push(r, 2, &mut factors);
        } else {
            return Err(Error::FactorRange(x.to_string()));
        }
    }
    Ok(factors)
}

fn exact_sqrt(x: u64) -> Option<u64> {
    let r = (x as f64).sqrt() as u64;
    for c in r.saturating_sub(2)..=r + 2 {
        if c.checked_mul(c) == Some(x) {
            return if is_prime_u64(c) { Some(c) } else { None };
        }
    }
    None
}

pub fn is_squarefree_u64(x: u64) -> Result<bool> {
    Ok(factor_u64(x)?.iter().all(|&(_, e)| e == 1))
}

pub fn smallest_prime_factor_u64(x: u64) -> Result<u64> {
    factor_u64(x).map(|f| f[0].0)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn big_to_u64(x: &BigInt) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::FactorRange(x.to_string()))
}

/// Certified rational interval `(lo, hi)` with `lo <= ln(x) <= hi`.
///
/// Uses the atanh series after reducing the argument into [1, 2) by powers
/// of two, so the series variable stays in [0, 1/3] and the tail bound
/// `z^(2K+1) / ((2K+1)(1 - z^2))` is sharp. `terms` is the number of series
/// terms kept; widening it tightens the interval.
pub fn ln_bounds(x: &BigRational, terms: usize) -> Result<(BigRational, BigRational)> {
    if !x.is_positive() {
        return Err(Error::Precondition(format!("ln of non-positive value {x}")));
    }
    let one = BigRational::one();
    if x == &one {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    if x < &one {
        let (lo, hi) = ln_bounds(&(one / x), terms)?;
        return Ok((-hi, -lo));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut y = x.clone();
    let mut halvings = 0u32;
    while y >= two {
        y /= &two;
        halvings += 1;
    }
    let (y_lo, y_hi) = atanh_series_bounds(&y, terms);
    if halvings == 0 {
        return Ok((y_lo, y_hi));
    }
    let (ln2_lo, ln2_hi) = atanh_series_bounds(&two, terms);
    let h = BigInt::from(halvings);
    Ok((
        y_lo + BigRational::from_integer(h.clone()) * ln2_lo,
        y_hi + BigRational::from_integer(h) * ln2_hi,
    ))
}

/// Series bounds for ln(y) with y in [1, 2]: partial sums of
/// 2 * sum z^(2k+1)/(2k+1), z = (y-1)/(y+1), plus the geometric tail bound.
fn atanh_series_bounds(y: &BigRational, terms: usize) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let z = (y - &one) / (y + &one);
    if z.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    for k in 0..terms {
        sum += &power / BigRational::from_integer(BigInt::from(2 * k + 1));
        power *= &z2;
    }
    // power now holds z^(2*terms+1)
    let tail = &power
        / (BigRational::from_integer(BigInt::from(2 * terms + 1)) * (&one - &z2));
    let two = BigRational::from_integer(BigInt::from(2));
    (&two * &sum, two * (sum + tail))
}

/// Decides `lhs >= (1/2) * ln(x) / ln(ln(x))` exactly for rational x with
/// ln(x) > 1, widening the log intervals until the comparison is strict.
pub fn geq_half_log_ratio(lhs: &BigRational, x: &BigRational) -> Result<bool> {
    let two = BigRational::from_integer(BigInt::from(2));
    for &terms in &[12usize, 24, 48, 96, 192] {
        let (l_lo, l_hi) = ln_bounds(x, terms)?;
        if l_lo <= BigRational::one() {
            continue; // interval too loose to take ln of; widen
        }
        let (ll_lo, _) = ln_bounds(&l_lo, terms)?;
        let (_, ll_hi) = ln_bounds(&l_hi, terms)?;
        if !ll_lo.is_positive() {
            continue;
        }
        let rhs_lo = &l_lo / (&two * &ll_hi);
        let rhs_hi = &l_hi / (&two * &ll_lo);
        if lhs >= &rhs_hi {
            return Ok(true);
        }
        if lhs < &rhs_lo {
            return Ok(false);
        }
    }
    Err(Error::Internal(
        "logarithm interval comparison did not become decisive".into(),
    ))
}
