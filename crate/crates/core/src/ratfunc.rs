//! Rational functions in one variable, always kept in canonical form:
//! numerator and denominator coprime, denominator monic. Two values are equal
//! exactly when their canonical forms coincide.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc<T> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Field> RatFunc<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly<T>, den: Poly<T>) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).unwrap().0, den.div_rem(&g).unwrap().0)
            }
        };
        Self::normalize_lead(num, den)
    }

    fn normalize_lead(num: Poly<T>, den: Poly<T>) -> Self {
        let lead = den.leading().expect("nonzero denominator").clone();
        if lead.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lead.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn numer(&self) -> &Poly<T> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial this function equals; errors with the remainder of
    /// numerator by denominator when the function is not a polynomial.
    pub fn exact_poly_quotient(&self) -> Result<Poly<T>>
    where
        T: fmt::Display,
    {
        if self.den.is_one() {
            return Ok(self.num.clone());
        }
        let (_, rem) = self.num.div_rem(&self.den)?;
        Err(Error::NonzeroRemainder { remainder: rem.to_string() })
    }

    pub fn eval(&self, x: &T) -> Result<T> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole("denominator vanishes at evaluation point".into()));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly<T>) -> Self {
        self.clone() * Self::from_poly(p.clone())
    }

    /// `f(γx)`.
    pub fn scale_arg(&self, gamma: &T) -> Self {
        Self::normalize_lead(self.num.scale_arg(gamma), self.den.scale_arg(gamma))
    }

    /// `(f(qx) - f(x)) / ((q - 1) x)`, the Euler–Jackson operator extended to
    /// rational functions.
    pub fn dq(&self, q: &T) -> Self {
        if self.is_polynomial() {
            return Self::from_poly(self.num.scale(&self.den.coeff(0).recip()).dq(q));
        }
        let diff = self.scale_arg(q) - self.clone();
        let step = Poly::monomial(q.clone() - T::one(), 1);
        diff / Self::from_poly(step)
    }

    pub fn dq_inv(&self, q: &T) -> Self {
        self.dq(&q.recip())
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.clone() * Self { num: rhs.den.clone(), den: rhs.num.clone() }.renormalized())
    }

    fn renormalized(self) -> Self {
        Self::normalize_lead(self.num, self.den)
    }

    /// Coefficient-wise map into another field (e.g. exact to floating point).
    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> RatFunc<U> {
        RatFunc::canonical(self.num.map(&f), self.den.map(&f))
    }
}

impl<T: Field> Zero for RatFunc<T> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<T: Field> One for RatFunc<T> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<T: Field> Add for RatFunc<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if self.den == rhs.den {
            return Self::canonical(&self.num + &rhs.num, self.den);
        }
        let g = self.den.gcd(&rhs.den);
        let lcof = rhs.den.div_rem(&g).unwrap().0;
        let rcof = self.den.div_rem(&g).unwrap().0;
        let num = &(&self.num * &lcof) + &(&rhs.num * &rcof);
        Self::canonical(num, &self.den * &lcof)
    }
}

impl<T: Field> Neg for RatFunc<T> {
    type Output = Self;

    fn neg(self) -> Self {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl<T: Field> Sub for RatFunc<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Field> Mul for RatFunc<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        // cross-cancel so the product is already reduced
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let cut = |p: &Poly<T>, g: &Poly<T>| {
            if g.is_constant() {
                p.clone()
            } else {
                p.div_rem(g).unwrap().0
            }
        };
        let num = &cut(&self.num, &g1) * &cut(&rhs.num, &g2);
        let den = &cut(&self.den, &g2) * &cut(&rhs.den, &g1);
        Self::normalize_lead(num, den)
    }
}

/// Panics on division by the zero function; see [`RatFunc::try_div`].
impl<T: Field> Div for RatFunc<T> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).expect("division by the zero rational function")
    }
}

impl<T: Field> Field for RatFunc<T> {
    fn from_i64(n: i64) -> Self {
        Self::constant(T::from_i64(n))
    }
}

impl<T: Field + fmt::Display> fmt::Display for RatFunc<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(cs: &[i64]) -> Poly<Rational> {
        Poly::from_coeffs(cs.iter().map(|&c| r(c, 1)).collect())
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFunc<Rational> {
        RatFunc::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn canonical_form_is_reduced_and_monic() {
        // (2x^2 - 2) / (4x - 4) = (x + 1) / 2 = (1/2) x + 1/2
        let f = rf(&[-2, 0, 2], &[-4, 4]);
        assert!(f.denom().is_one());
        assert_eq!(f.numer(), &Poly::from_coeffs(vec![r(1, 2), r(1, 2)]));
        let g = rf(&[1], &[6, 3]);
        assert!(g.denom().is_monic());
        assert_eq!(g.numer(), &Poly::constant(r(1, 3)));
        assert_eq!(RatFunc::new(p(&[1]), Poly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn self_quotient_is_one() {
        let a = rf(&[1, 2, 3], &[5, 0, 1]);
        assert_eq!(a.try_div(&a).unwrap(), RatFunc::one());
        assert_eq!(a.try_div(&RatFunc::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn exact_poly_quotient_of_factorable() {
        let f = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(f.exact_poly_quotient().unwrap(), p(&[1, 1]));
        let g = rf(&[1, 0, 1], &[-1, 1]);
        assert!(matches!(g.exact_poly_quotient(), Err(Error::NonzeroRemainder { .. })));
    }

    #[test]
    fn dq_of_reciprocal() {
        // D_q (1/x) = -1/(q x^2)
        let q = r(3, 5);
        let f = rf(&[1], &[0, 1]);
        let expected = RatFunc::new(Poly::constant(-q.recip()), p(&[0, 0, 1])).unwrap();
        assert_eq!(f.dq(&q), expected);
    }

    #[test]
    fn dq_of_x_over_x_plus_one() {
        // D_q [x/(x+1)] = 1/((qx+1)(x+1)); the mixed quotient rule
        // (D_q n · d - n(qx) · D_q d)/(d · d(qx)) would give a different answer.
        let q = r(1, 2);
        let f = rf(&[0, 1], &[1, 1]);
        let den = &p(&[1, 1]) * &Poly::from_coeffs(vec![r(1, 1), q.clone()]);
        assert_eq!(f.dq(&q), RatFunc::new(Poly::one(), den).unwrap());
    }

    #[test]
    fn eval_detects_poles() {
        let f = rf(&[1], &[-3, 1]);
        assert!(matches!(f.eval(&r(3, 1)), Err(Error::Pole(_))));
        assert_eq!(f.eval(&r(4, 1)).unwrap(), r(1, 1));
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rational>> {
        proptest::collection::vec((-9i64..=9, 1i64..=4), 0..=max_deg + 1)
            .prop_map(|cs| Poly::from_coeffs(cs.into_iter().map(|(n, d)| r(n, d)).collect()))
    }

    fn ratfunc() -> impl Strategy<Value = RatFunc<Rational>> {
        (small_poly(3), small_poly(3))
            .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
            .prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
    }

    /// The quotient rule that follows from the q-product rule.
    fn quotient_rule(f: &RatFunc<Rational>, q: &Rational) -> RatFunc<Rational> {
        let (n, d) = (f.numer(), f.denom());
        let top = &(&n.dq(q) * d) - &(n * &d.dq(q));
        RatFunc::new(top, d * &d.scale_arg(q)).unwrap()
    }

    proptest! {
        #[test]
        fn field_laws(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!((a.clone() - b.clone()) + b.clone(), a.clone());
            if !b.is_zero() {
                prop_assert_eq!(a.clone() / b.clone() * b.clone(), a.clone());
            }
        }

        #[test]
        fn canonical_invariants(a in ratfunc(), b in ratfunc()) {
            let s = a * b;
            prop_assert!(s.denom().is_monic());
            prop_assert!(s.numer().gcd(s.denom()).is_constant());
        }

        #[test]
        fn dq_agrees_with_quotient_rule(f in ratfunc(), q in prop_oneof![Just(r(1, 2)), Just(r(3, 5))]) {
            prop_assert_eq!(f.dq(&q), quotient_rule(&f, &q));
        }

        #[test]
        fn dq_product_rule(f in ratfunc(), g in ratfunc(), q in prop_oneof![Just(r(1, 2)), Just(r(3, 5))]) {
            let lhs = (f.clone() * g.clone()).dq(&q);
            let rhs = f.scale_arg(&q) * g.dq(&q) + g.clone() * f.dq(&q);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dq_matches_polynomial_dq(n in small_poly(6), d in small_poly(2), q in prop_oneof![Just(r(1, 2)), Just(r(3, 5))]) {
            prop_assume!(!d.is_zero());
            let prod = &n * &d;
            let f = RatFunc::new(prod.clone(), d).unwrap();
            let poly = f.exact_poly_quotient().unwrap();
            prop_assert_eq!(f.dq(&q).exact_poly_quotient().unwrap(), poly.dq(&q));
        }
    }
}
