//! Univariate rational functions over the rationals, with exact Laurent
//! expansion around arbitrary finite points.
//!
//! Canonical form: numerator and denominator coprime, denominator monic,
//! zero is 0/1. One symbolic slot is enough for every identity here; the
//! variable name is purely presentational.

use crate::poly::{Poly, PolyRat};
use crate::scalar::{Rat, Ring};
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    pub num: PolyRat,
    pub den: PolyRat,
}

impl RatFunc {
    pub fn new(num: PolyRat, den: PolyRat) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = RatFunc { num, den };
        f.normalize();
        f
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: PolyRat) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    /// The variable z.
    pub fn var() -> Self {
        RatFunc { num: Poly::x(), den: Poly::one() }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let lead = self.den.leading();
        if !lead.is_one() {
            let inv = Rat::one() / lead;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == 0
    }

    pub fn as_poly(&self) -> Option<PolyRat> {
        if self.is_poly() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatFunc::new(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den))
    }

    /// Evaluate at a point; None at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if Zero::is_zero(&d) {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// Order of vanishing at p: positive for zeros, negative for poles,
    /// zero for a finite nonzero value.
    pub fn order_at(&self, p: &Rat) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        let count = |poly: &PolyRat| {
            let mut k = 0i64;
            let mut q = poly.shift_var(p);
            while !q.coeffs.is_empty() && Zero::is_zero(&q.coeffs[0]) {
                q.coeffs.remove(0);
                k += 1;
            }
            k
        };
        count(&self.num) - count(&self.den)
    }

    /// Coefficients of (z-p)^m for m in order_from..=order_to of the Laurent
    /// expansion around p, exact.
    pub fn laurent_at(&self, p: &Rat, order_from: i64, order_to: i64) -> Vec<Rat> {
        assert!(order_from <= order_to);
        if self.is_zero() {
            return vec![Rat::zero(); (order_to - order_from + 1) as usize];
        }
        // Shift to w = z - p, strip common powers of w.
        let mut n = self.num.shift_var(p);
        let mut d = self.den.shift_var(p);
        let mut shift = 0i64;
        while !n.coeffs.is_empty() && Zero::is_zero(&n.coeffs[0]) {
            n.coeffs.remove(0);
            shift += 1;
        }
        while !d.coeffs.is_empty() && Zero::is_zero(&d.coeffs[0]) {
            d.coeffs.remove(0);
            shift -= 1;
        }
        assert!(!d.coeffs.is_empty(), "pole of the reduced denominator not cancelled");
        // Series of n/d around w=0 up to the needed order.
        let need = order_to - shift;
        let mut series: Vec<Rat> = vec![];
        if need >= 0 {
            let d0 = d.coeffs[0].clone();
            for k in 0..=(need as usize) {
                let mut acc = n.coeff(k);
                for j in 0..k {
                    acc -= d.coeff(k - j) * &series[j];
                }
                series.push(acc / &d0);
            }
        }
        (order_from..=order_to)
            .map(|m| {
                let idx = m - shift;
                if idx < 0 {
                    Rat::zero()
                } else {
                    series.get(idx as usize).cloned().unwrap_or_else(Rat::zero)
                }
            })
            .collect()
    }

    /// Residue at p: the (z-p)^(-1) Laurent coefficient.
    pub fn residue_at(&self, p: &Rat) -> Rat {
        self.laurent_at(p, -1, -1).remove(0)
    }

    /// Taylor coefficients in 1/z around z = infinity, orders 0..=order.
    /// f(z) = c0 + c1/z + c2/z^2 + ... requires deg num <= deg den.
    pub fn expand_at_infinity(&self, order: usize) -> Vec<Rat> {
        if self.is_zero() {
            return vec![Rat::zero(); order + 1];
        }
        assert!(
            self.num.degree() <= self.den.degree(),
            "expansion at infinity needs a function bounded at infinity"
        );
        // Substitute z = 1/w: f = (w^k n(1/w)) / (w^k d(1/w)) with k = deg den.
        let k = self.den.degree() as usize;
        let rev = |p: &PolyRat| {
            let mut c = vec![Rat::zero(); k + 1];
            for (i, a) in p.coeffs.iter().enumerate() {
                c[k - i] = a.clone();
            }
            Poly::from_coeffs(c)
        };
        let f = RatFunc::new(rev(&self.num), rev(&self.den));
        f.laurent_at(&Rat::zero(), 0, order as i64)
    }
}

impl std::ops::Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: Self) -> Self {
        RatFunc::add(&self, &rhs)
    }
}

impl std::ops::Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: Self) -> Self {
        RatFunc::sub(&self, &rhs)
    }
}

impl std::ops::Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: Self) -> Self {
        RatFunc::mul(&self, &rhs)
    }
}

impl std::ops::Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> Self {
        RatFunc::neg(&self)
    }
}

impl num_traits::Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl num_traits::One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl Ring for RatFunc {
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
        self.div(other)
    }
}
