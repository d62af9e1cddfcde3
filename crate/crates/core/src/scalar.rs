//! Scalar abstraction shared by the exact (rational) and floating point paths.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Field element usable for Markov kernels and generating functions.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// `self^k` by repeated squaring.
    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Exact rational scalar.
pub type Rational = BigRational;

/// Shorthand for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// q-deformed integer `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn q_int<S: Scalar>(q: &S, n: u32) -> S {
    let mut acc = S::zero();
    let mut p = S::one();
    for _ in 0..n {
        acc = acc + p.clone();
        p = p * q.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_integers() {
        let q = rat(1, 2);
        assert_eq!(q_int(&q, 0), rat(0, 1));
        assert_eq!(q_int(&q, 1), rat(1, 1));
        assert_eq!(q_int(&q, 3), rat(7, 4));
        assert_eq!(q_int(&1.0f64, 2), 2.0);
        assert_eq!(rat(2, 3).powi(3), rat(8, 27));
    }
}
