//! Dense univariate polynomials and the Euler–Jackson q-difference operators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qcore::q_number;
use crate::scalar::Field;

/// Polynomial stored as coefficients indexed by degree, trailing zeros trimmed.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Field> Default for Poly<T> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<T: Field> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Poly::monomial(T::one(), 1)
    }

    pub fn monomial(c: T, degree: usize) -> Self {
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(coeffs)
    }

    /// `x - root`
    pub fn linear_root(root: T) -> Self {
        Poly::from_coeffs(vec![-root, T::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// `p(γx)`: coefficient `c_k` becomes `c_k γ^k`.
    pub fn scale_arg(&self, gamma: &T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.clone() * pow.clone());
            pow = pow * gamma.clone();
        }
        Poly::from_coeffs(out)
    }

    /// Euler–Jackson q-derivative, applied coefficient-wise:
    /// `x^k ↦ [k]_q x^{k-1}`.
    pub fn dq(&self, q: &T) -> Self {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * q_number(k as i64, q))
            .collect();
        Poly::from_coeffs(out)
    }

    /// The q-derivative with base `q^{-1}`.
    pub fn dq_inv(&self, q: &T) -> Self {
        self.dq(&q.recip())
    }

    /// `k`-fold iterate of [`Poly::dq`]; `k = 0` is the identity.
    pub fn dq_iter(&self, q: &T, k: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..k {
            if p.is_zero() {
                break;
            }
            p = p.dq(q);
        }
        p
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Euclidean division over a field.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d_deg = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[d_deg].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![T::zero(); rem.len() - d_deg];
        for i in (0..quot.len()).rev() {
            let c = rem[i + d_deg].clone() * lead_inv.clone();
            if c.is_zero() {
                continue;
            }
            for (k, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + k] = rem[i + k].clone() - c.clone() * dc.clone();
            }
            quot[i] = c;
        }
        rem.truncate(d_deg);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Quotient when `divisor` divides `self` exactly; a nonzero remainder is
    /// reported as an error.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self>
    where
        T: fmt::Display,
    {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NonzeroRemainder { remainder: r.to_string() })
        }
    }

    /// Scales to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<T: Field> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Field> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Field> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::from_coeffs(out)
    }
}

impl<T: Field> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Field> $tr for Poly<T> {
            type Output = Poly<T>;

            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }

        impl<T: Field> $tr<&Poly<T>> for Poly<T> {
            type Output = Poly<T>;

            fn $m(self, rhs: &Poly<T>) -> Poly<T> {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: Field> Neg for Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl<T: Field> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Field> One for Poly<T> {
    fn one() -> Self {
        Poly::one()
    }
}

/// Highest degree first, e.g. `x^3 - 98/125*x`.
impl<T: Field + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let (neg, mag) = match text.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, text),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == "1";
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
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

    fn p(cs: &[(i64, i64)]) -> Poly<Rational> {
        Poly::from_coeffs(cs.iter().map(|&(n, d)| r(n, d)).collect())
    }

    /// Direct difference quotient `(p(qx) - p(x)) / ((q - 1) x)` via exact division.
    fn dq_oracle(f: &Poly<Rational>, q: &Rational) -> Poly<Rational> {
        let num = &f.scale_arg(q) - f;
        let den = Poly::monomial(q.clone() - r(1, 1), 1);
        num.exact_div(&den).unwrap()
    }

    #[test]
    fn trims_trailing_zeros() {
        let z = p(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(z.degree(), Some(0));
        assert!(p(&[(0, 1)]).is_zero());
        assert_eq!(Poly::<Rational>::zero().degree(), None);
    }

    #[test]
    fn dq_examples() {
        let q = r(3, 5);
        assert!(Poly::constant(r(7, 2)).dq(&q).is_zero());
        assert_eq!(Poly::<Rational>::x().dq(&q), Poly::one());
        assert_eq!(Poly::monomial(r(1, 1), 3).dq(&q), Poly::monomial(r(49, 25), 2));
    }

    #[test]
    fn dq_inv_examples() {
        let q = r(3, 5);
        assert!(Poly::constant(r(4, 1)).dq_inv(&q).is_zero());
        assert_eq!(Poly::monomial(r(1, 1), 2).dq_inv(&q), Poly::monomial(r(8, 3), 1));
    }

    #[test]
    fn dq_iter_examples() {
        let q = r(3, 5);
        let f = p(&[(1, 3), (2, 1), (-5, 7)]);
        assert_eq!(f.dq_iter(&q, 0), f);
        assert_eq!(Poly::monomial(r(1, 1), 2).dq_iter(&q, 2), Poly::constant(r(8, 5)));
        assert!(f.dq_iter(&q, 3).is_zero());
    }

    #[test]
    fn scale_arg_examples() {
        let q = r(3, 5);
        let s = p(&[(-1, 1), (0, 1), (1, 1)]);
        assert_eq!(s.scale_arg(&r(1, 1)), s);
        assert_eq!(s.scale_arg(&q.recip()), p(&[(-1, 1), (0, 1), (25, 9)]));
        assert_eq!(Poly::constant(r(2, 9)).scale_arg(&r(7, 1)), Poly::constant(r(2, 9)));
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[(-1, 1), (0, 1), (1, 1)]);
        let b = p(&[(-1, 1), (1, 1)]);
        assert_eq!(a.exact_div(&b).unwrap(), p(&[(1, 1), (1, 1)]));
        assert!(matches!(
            a.exact_div(&p(&[(2, 1), (1, 1)])),
            Err(Error::NonzeroRemainder { .. })
        ));
        assert_eq!(a.div_rem(&Poly::zero()), Err(Error::DivisionByZero));
        let g = (&a * &p(&[(3, 1), (1, 1)])).gcd(&(&a * &p(&[(1, 2), (2, 1)])));
        assert_eq!(g, a);
    }

    #[test]
    fn display_is_readable() {
        let f = p(&[(0, 1), (-98, 125), (0, 1), (1, 1)]);
        assert_eq!(f.to_string(), "x^3 - 98/125*x");
        assert_eq!(p(&[(-2, 5), (0, 1), (1, 1)]).to_string(), "x^2 - 2/5");
        assert_eq!(Poly::<Rational>::zero().to_string(), "0");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=9).prop_map(|(n, d)| r(n, d))
    }

    fn poly_upto(deg: usize) -> impl Strategy<Value = Poly<Rational>> {
        proptest::collection::vec(small_rational(), 0..=deg + 1).prop_map(Poly::from_coeffs)
    }

    fn q_param() -> impl Strategy<Value = Rational> {
        prop_oneof![Just(r(1, 2)), Just(r(3, 5)), Just(r(9, 10)), Just(r(2, 7))]
    }

    proptest! {
        #[test]
        fn dq_matches_difference_quotient(f in poly_upto(8), q in q_param()) {
            prop_assert_eq!(f.dq(&q), dq_oracle(&f, &q));
        }

        #[test]
        fn product_rule(f in poly_upto(8), g in poly_upto(8), q in q_param()) {
            let lhs = (&f * &g).dq(&q);
            let rhs = &(&f.scale_arg(&q) * &g.dq(&q)) + &(&g * &f.dq(&q));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift_identity(f in poly_upto(8), q in q_param()) {
            // D_q f(z) = (D_{1/q} f)(qz)
            prop_assert_eq!(f.dq(&q), f.dq_inv(&q).scale_arg(&q));
        }

        #[test]
        fn dq_dq_inv_commutation(f in poly_upto(8), q in q_param()) {
            let lhs = f.dq_inv(&q).dq(&q);
            let rhs = f.dq(&q).dq_inv(&q).scale(&q.recip());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn chain_rule(f in poly_upto(8), q in q_param(), gamma in small_rational()) {
            let lhs = f.scale_arg(&gamma).dq(&q);
            let rhs = f.dq(&q).scale_arg(&gamma).scale(&gamma);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dq_lowers_degree_by_one(f in poly_upto(8), q in q_param()) {
            if let Some(d) = f.degree().filter(|&d| d > 0) {
                prop_assert_eq!(f.dq(&q).degree(), Some(d - 1));
            }
        }

        #[test]
        fn product_degree_adds(f in poly_upto(6), g in poly_upto(6)) {
            if let (Some(a), Some(b)) = (f.degree(), g.degree()) {
                prop_assert_eq!((&f * &g).degree(), Some(a + b));
            }
        }

        #[test]
        fn div_rem_reconstructs(f in poly_upto(8), g in poly_upto(4)) {
            prop_assume!(!g.is_zero());
            let (quot, rem) = f.div_rem(&g).unwrap();
            prop_assert_eq!(&(&quot * &g) + &rem, f);
            prop_assert!(rem.degree() < g.degree());
        }
    }
}
