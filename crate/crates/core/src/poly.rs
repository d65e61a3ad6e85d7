//! Dense univariate polynomials over an exact ring.

use crate::scalar::{rat_i, Rat, Ring};
use num_traits::{One, Zero};

/// Polynomial with coefficients stored low degree first; the zero polynomial
/// has an empty coefficient vector and no trailing zero is ever kept.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T: Ring> {
    pub coeffs: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.normalize();
        p
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly { coeffs: vec![T::zero(), T::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add_ref(&other.coeff(k)));
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).sub_ref(&other.coeff(k)));
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Substitute x -> x + shift (Taylor shift by Horner).
    pub fn shift_var(&self, shift: &T) -> Self {
        let mut acc = Poly::zero();
        let lin = Poly::from_coeffs(vec![shift.clone(), T::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut m = T::zero();
            for _ in 0..k {
                m = m.add_ref(&T::one());
            }
            out.push(c.mul_ref(&m));
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Polynomials over the rationals, the workhorse coefficient type.
pub type PolyRat = Poly<Rat>;

impl PolyRat {
    /// Euclidean division, panics if divisor is zero. Returns (quotient, remainder).
    pub fn div_rem(&self, div: &PolyRat) -> (PolyRat, PolyRat) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let mut rem = self.clone();
        let mut quo = vec![Rat::zero(); self.coeffs.len().saturating_sub(div.coeffs.len() - 1)];
        let dlead = div.leading();
        while !rem.is_zero() && rem.degree() >= div.degree() {
            let k = (rem.degree() - div.degree()) as usize;
            let c = rem.leading() / &dlead;
            for (j, d) in div.coeffs.iter().enumerate() {
                let t = d * &c;
                rem.coeffs[k + j] -= t;
            }
            rem.normalize();
            quo[k] = c;
        }
        (Poly::from_coeffs(quo), rem)
    }

    pub fn gcd(&self, other: &PolyRat) -> PolyRat {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&(Rat::one() / lead))
    }

    /// The monic polynomial prod (x - r) over the given roots.
    pub fn from_roots(roots: &[Rat]) -> PolyRat {
        let mut acc = Poly::one();
        for r in roots {
            acc = acc.mul(&Poly::from_coeffs(vec![-r.clone(), Rat::one()]));
        }
        acc
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::scalar::rat_to_f64).collect()
    }
}

impl<T: Ring> std::ops::Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Self {
        Poly::add(&self, &rhs)
    }
}

impl<T: Ring> std::ops::Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Self {
        Poly::sub(&self, &rhs)
    }
}

impl<T: Ring> std::ops::Mul for Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Self {
        Poly::mul(&self, &rhs)
    }
}

impl<T: Ring> std::ops::Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Self {
        Poly::neg(&self)
    }
}

impl<T: Ring> num_traits::Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Ring> num_traits::One for Poly<T> {
    fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }
}

impl<T: Ring> Ring for Poly<T> {
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn exact_div(&self, other: &Self) -> Self {
        // Exact division in T[x]; used by Bareiss where divisibility holds.
        assert!(!other.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Poly::zero();
        }
        let mut rem = self.clone();
        let mut quo = vec![T::zero(); self.coeffs.len() - other.coeffs.len() + 1];
        let dlead = other.leading();
        while !rem.is_zero() && rem.degree() >= other.degree() {
            let k = (rem.degree() - other.degree()) as usize;
            let c = rem.leading().exact_div(&dlead);
            for (j, d) in other.coeffs.iter().enumerate() {
                rem.coeffs[k + j] = rem.coeffs[k + j].sub_ref(&d.mul_ref(&c));
            }
            rem.normalize();
            quo[k] = c;
        }
        assert!(rem.is_zero(), "inexact polynomial division");
        Poly::from_coeffs(quo)
    }
}

/// Render with a chosen variable name, rationals as num/den.
pub fn poly_to_string(p: &PolyRat, var: &str) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = vec![];
    for (k, c) in p.coeffs.iter().enumerate() {
        if Zero::is_zero(c) {
            continue;
        }
        let cs = c.to_string();
        let part = match k {
            0 => cs,
            1 => format!("{cs}*{var}"),
            _ => format!("{cs}*{var}^{k}"),
        };
        parts.push(part);
    }
    parts.join(" + ")
}

/// Monic falling-factorial basis polynomial u(u-1)...(u-m+1) in the variable.
pub fn falling_poly(m: u32) -> PolyRat {
    let mut acc = Poly::one();
    for j in 0..m {
        acc = acc.mul(&Poly::from_coeffs(vec![-rat_i(j as i64), Rat::one()]));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn arithmetic() {
        let p = Poly::from_coeffs(vec![rat_i(1), rat_i(2)]); // 1 + 2x
        let q = Poly::from_coeffs(vec![rat_i(-1), rat_i(1)]); // -1 + x
        assert_eq!(p.mul(&q), Poly::from_coeffs(vec![rat_i(-1), rat_i(-1), rat_i(2)]));
        assert_eq!(p.eval(&rat(1, 2)), rat_i(2));
    }

    #[test]
    fn division_and_gcd() {
        // (x^2 - 1) = (x - 1)(x + 1)
        let p = Poly::from_coeffs(vec![rat_i(-1), rat_i(0), rat_i(1)]);
        let d = Poly::from_coeffs(vec![rat_i(-1), rat_i(1)]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_coeffs(vec![rat_i(1), rat_i(1)]));
        let g = p.gcd(&d);
        assert_eq!(g, d);
    }

    #[test]
    fn taylor_shift() {
        // (x+1)^2 = x^2 + 2x + 1
        let p = Poly::from_coeffs(vec![rat_i(0), rat_i(0), rat_i(1)]);
        let s = p.shift_var(&rat_i(1));
        assert_eq!(s, Poly::from_coeffs(vec![rat_i(1), rat_i(2), rat_i(1)]));
    }

    #[test]
    fn falling_basis() {
        // u(u-1) = u^2 - u
        assert_eq!(falling_poly(2), Poly::from_coeffs(vec![rat_i(0), rat_i(-1), rat_i(1)]));
    }
}
