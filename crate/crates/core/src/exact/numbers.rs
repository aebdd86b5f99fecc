//! Exact rationals and the integer sequences used throughout the crate.

use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `num/den`, or `num` when the denominator is 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `m!!` with `0!! = 1!! = (-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigInt> {
    if m < -1 {
        return Err(Error::Domain(format!("double factorial of {m} < -1")));
    }
    Ok(double_factorial_table(m))
}

fn double_factorial_table(m: i64) -> BigInt {
    static TABLE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    // index i holds (i - 1)!!
    let table = TABLE.get_or_init(|| RwLock::new(vec![BigInt::one(), BigInt::one(), BigInt::one()]));
    let idx = (m + 1) as usize;
    if let Some(v) = table.read().unwrap().get(idx) {
        return v.clone();
    }
    let mut t = table.write().unwrap();
    while t.len() <= idx {
        let k = t.len() as i64 - 1;
        let next = &t[t.len() - 2] * k;
        t.push(next);
    }
    t[idx].clone()
}

/// `(2k - 1)!!` for `k >= 0`, the form that appears in Laplace transforms.
pub(crate) fn odd_double_factorial(k: u32) -> BigInt {
    double_factorial_table(2 * k as i64 - 1)
}

/// `D! / prod(parts!)` when the parts sum to `D`, and 0 otherwise.
pub fn multinomial(total: i64, parts: &[i64]) -> Result<Rational> {
    if let Some(p) = parts.iter().find(|&&p| p < 0) {
        return Err(Error::Domain(format!("negative multinomial part {p}")));
    }
    if total < 0 || parts.iter().sum::<i64>() != total {
        return Ok(Rational::zero());
    }
    let den = parts.iter().fold(BigInt::one(), |acc, &p| acc * factorial(p as u32));
    Ok(Rational::new(factorial(total as u32), den))
}

/// Bernoulli number `B_m` in the convention `B_1 = -1/2`.
pub fn bernoulli(m: u32) -> Rational {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]));
    if let Some(b) = cache.read().unwrap().get(m as usize) {
        return b.clone();
    }
    let mut b = cache.write().unwrap();
    while b.len() <= m as usize {
        // sum_{j=0}^{k} C(k+1, j) B_j = 0 solved for B_k
        let k = b.len() as u64;
        let s = b.iter().enumerate().fold(Rational::zero(), |acc, (j, bj)| {
            acc + bj * Rational::from_integer(binomial(k + 1, j as u64))
        });
        b.push(-s / Rational::from_integer(BigInt::from(k + 1)));
    }
    b[m as usize].clone()
}

/// `zeta(1 - 2g) = -B_{2g} / (2g)` for `g >= 1`.
pub fn zeta_negative_odd(g: i64) -> Result<Rational> {
    if g < 1 {
        return Err(Error::Domain(format!("zeta(1 - 2g) requires g >= 1, got g = {g}")));
    }
    Ok(-bernoulli(2 * g as u32) / int(2 * g))
}

/// Converts to `f64` through an exact integer quotient carrying 64 extra bits,
/// so the result is within one ulp of the true value.
pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let (n, d) = if shift >= 0 {
        (num, den << shift as u64)
    } else {
        (num << (-shift) as u64, den)
    };
    let quotient = n / d;
    let mantissa: f64 = quotient.to_string().parse().unwrap_or(f64::NAN);
    let v = mantissa * 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_recurrence_holds() {
        for m in 1..=40u64 {
            let s = (0..=m).fold(Rational::zero(), |acc, j| {
                acc + bernoulli(j as u32) * Rational::from_integer(binomial(m + 1, j))
            });
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(5).unwrap(), BigInt::from(15));
        assert_eq!(double_factorial(0).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(-1).unwrap(), BigInt::from(1));
        assert!(double_factorial(-2).is_err());
        for m in 1..60 {
            assert_eq!(double_factorial(m).unwrap(), double_factorial(m - 2).unwrap() * m);
        }
    }

    #[test]
    fn multinomial_cases() {
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), int(2));
        assert_eq!(multinomial(2, &[0, 0, 0, 0, 2]).unwrap(), int(1));
        assert_eq!(multinomial(3, &[1, 1, 2]).unwrap(), int(0));
        assert!(multinomial(1, &[2, -1]).is_err());
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_negative_odd(1).unwrap(), rat(-1, 12));
        assert_eq!(zeta_negative_odd(2).unwrap(), rat(1, 120));
        assert_eq!(zeta_negative_odd(3).unwrap(), rat(-1, 252));
        assert!(zeta_negative_odd(0).is_err());
    }

    #[test]
    fn text_round_trip() {
        for q in [rat(-691, 2730), int(7), int(0), rat(1, 7962624)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
        assert_eq!(format_rational(&rat(29, 5760)), "29/5760");
        assert_eq!(format_rational(&int(-3)), "-3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_conversion() {
        assert_eq!(to_f64(&rat(1, 2)), 0.5);
        assert_eq!(to_f64(&rat(-3, 4)), -0.75);
        let third = to_f64(&rat(1, 3));
        assert!((third - 1.0 / 3.0).abs() < 1e-16);
        let big = Rational::from_integer(factorial(40)) / int(7);
        let expect = 8.159152832478977e47 / 7.0;
        assert!(((to_f64(&big) - expect) / expect).abs() < 1e-15);
    }
}
