//! Exact rational helpers and the scalar abstraction shared by the
//! coefficient-level algorithms.
//!
//! The basis conversions and the operator chain `D`, `H`, `T` only need ring
//! operations and division by small integers, so they are written once over
//! [`Coefficient`] and instantiated with `f64` for production use and with
//! [`BigRational`] for exact verification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Scalar type usable by the generic coefficient routines.
pub trait Coefficient: Clone + Num + FromPrimitive {
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_u64(n as u64).expect("integer is representable")
    }
}

impl<T: Clone + Num + FromPrimitive> Coefficient for T {}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Truncated exponential series `Σ_{j<terms} x^j / j!`.
///
/// For `|x| ≤ 1` and `terms = 40` the truncation error is below `1e-47`.
pub fn exp_series(x: &BigRational, terms: usize) -> BigRational {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for j in 0..terms {
        sum += &term;
        term = term * x / int(j as i64 + 1);
    }
    sum
}

/// Decimal rendering with `digits` significant figures, for reports.
pub fn to_sci(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x < &BigRational::zero();
    let mut v = if neg { -x.clone() } else { x.clone() };
    let ten = int(10);
    let mut exp10: i64 = 0;
    while v >= ten {
        v /= &ten;
        exp10 += 1;
    }
    while v < BigRational::one() {
        v *= &ten;
        exp10 -= 1;
    }
    let scale = num_traits::pow(BigInt::from(10), digits.saturating_sub(1));
    let m = (v * BigRational::from_integer(scale.clone())).round().to_integer();
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, head, tail, exp10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_series_matches_float() {
        let e = exp_series(&frac(1, 2), 40);
        assert!((to_f64(&e) - 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn sci_rendering() {
        assert_eq!(to_sci(&frac(-1, 8), 3), "-1.25e-1");
        assert_eq!(to_sci(&int(12345), 2), "1.2e4");
    }
}
