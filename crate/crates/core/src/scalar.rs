//! Exact scalar tower: arbitrary-precision rationals and the ring trait
//! shared by polynomials, rational functions and dense matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator (the `num-rational` canonical form).
pub type Rat = BigRational;

/// Build `n/d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Build the integer `n` as a [`Rat`].
pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// `base^exp` for integer (possibly negative) exponents.
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    let p = base.pow(exp.unsigned_abs() as i32);
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Falling factorial u(u-1)...(u-m+1), exact.
pub fn falling(u: &Rat, m: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 0..m {
        acc *= u - rat_i(j as i64);
    }
    acc
}

/// Binomial coefficient as a rational.
pub fn binom(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= rat_i((n - j) as i64);
        acc /= rat_i((j + 1) as i64);
    }
    acc
}

/// n! as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 2..=n {
        acc *= rat_i(j as i64);
    }
    acc
}

/// Commutative ring with exact division, the base interface for the generic
/// dense-matrix and polynomial code.
///
/// `exact_div` must be used only when divisibility is guaranteed (Bareiss
/// pivots, normalized polynomial division); it panics otherwise.
pub trait Ring:
    Clone
    + PartialEq
    + std::fmt::Debug
    + num_traits::Zero
    + num_traits::One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
{
    fn exact_div(&self, other: &Self) -> Self;

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

impl Ring for Rat {
    fn exact_div(&self, other: &Self) -> Self {
        assert!(!Zero::is_zero(other), "division by zero");
        self / other
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// Convert a rational to f64 for the numeric eigen-layer.
pub fn rat_to_f64(x: &Rat) -> f64 {
    // Split into integer part and remainder to keep precision for big values.
    let n = x.numer();
    let d = x.denom();
    let (q, r) = (n / d, n % d);
    let qf = q.to_string().parse::<f64>().unwrap_or(0.0);
    let rf = {
        let rn = r.to_string().parse::<f64>().unwrap_or(0.0);
        let rd = d.to_string().parse::<f64>().unwrap_or(1.0);
        rn / rd
    };
    qf + rf
}

/// Magnitude of a rational as f64, used in degeneracy detection.
pub fn rat_abs_f64(x: &Rat) -> f64 {
    rat_to_f64(&x.abs())
}
