//! q-calculus primitives: q-numbers, q-factorials, q-Pochhammer symbols,
//! Gaussian binomials, q-falling factorials, the Jackson–Hahn–Cigler
//! q-subtraction and terminating basic hypergeometric sums.
//!
//! Everything is generic over [`Field`]; with [`Rational`] every result is
//! exact.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, Rational};

/// `[n]_q = (1 - q^n) / (1 - q)`, defined for every integer `n`.
///
/// Computed as the geometric sum `1 + q + … + q^{n-1}` for `n ≥ 0` and as
/// `-q^n [−n]_q` for negative `n`, so no division by `1 - q` happens.
pub fn q_number<T: Field>(n: i64, q: &T) -> T {
    if n < 0 {
        return -(q.powi(n) * q_number(-n, q));
    }
    let mut acc = T::zero();
    let mut pow = T::one();
    for _ in 0..n {
        acc = acc + pow.clone();
        pow = pow * q.clone();
    }
    acc
}

/// `[n]_q! = [n]_q [n-1]_q ⋯ [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial<T: Field>(n: i64, q: &T) -> Result<T> {
    if n < 0 {
        return Err(Error::Domain(format!("q-factorial of negative n = {n}")));
    }
    Ok((1..=n).fold(T::one(), |acc, k| acc * q_number(k, q)))
}

/// Finite q-Pochhammer symbol `(a;q)_n = ∏_{i<n} (1 - a q^i)`.
pub fn q_pochhammer<T: Field>(a: &T, q: &T, n: usize) -> T {
    let mut acc = T::one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = acc * (T::one() - aq.clone());
        aq = aq * q.clone();
    }
    acc
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn q_binomial<T: Field>(n: usize, k: usize, q: &T) -> Result<T> {
    if k > n {
        return Err(Error::Domain(format!("q-binomial with k = {k} > n = {n}")));
    }
    let k = k.min(n - k);
    let mut num = T::one();
    let mut den = T::one();
    for i in 1..=k {
        num = num * q_number((n - k + i) as i64, q);
        den = den * q_number(i as i64, q);
    }
    Ok(num / den)
}

/// q-falling factorial `[n]_q^{(k)} = ∏_{i<k} [n - i]_q`.
///
/// Equal to `(q^{-n};q)_k (q-1)^{-k} q^{kn - C(k,2)}`; the product form keeps
/// every intermediate free of negative powers of `q`. Vanishes when
/// `0 ≤ n < k`.
pub fn q_falling_factorial<T: Field>(n: i64, k: usize, q: &T) -> T {
    let mut acc = T::one();
    for i in 0..k as i64 {
        let f = q_number(n - i, q);
        if f.is_zero() {
            return T::zero();
        }
        acc = acc * f;
    }
    acc
}

/// `(x ⊟_q y)^n = Σ_k [n choose k]_q q^{C(k,2)} (-y)^k x^{n-k}` as a
/// polynomial in `x`; monic of degree `n`.
pub fn jhc_power<T: Field>(y: &T, n: usize, q: &T) -> Poly<T> {
    let mut coeffs = vec![T::zero(); n + 1];
    let mut neg_y_pow = T::one();
    for k in 0..=n {
        let binom = q_binomial(n, k, q).expect("k ≤ n");
        let c = binom * q.powi(binomial2(k)) * neg_y_pow.clone();
        coeffs[n - k] = c;
        neg_y_pow = neg_y_pow * -y.clone();
    }
    Poly::from_coeffs(coeffs)
}

/// `C(k, 2)` as an exponent.
pub(crate) fn binomial2(k: usize) -> i64 {
    let k = k as i64;
    k * (k - 1) / 2
}

/// Terminating (or explicitly truncated) basic hypergeometric sum
/// `_rφ_s(a; b; q, z)` over `k = 0 .. terms - 1`, including the
/// `((-1)^k q^{C(k,2)})^{1+s-r}` factor.
///
/// The sum stops early once a term vanishes (a numerator parameter hit
/// `q^{-m}`). A vanishing denominator factor before that point is a pole.
pub fn basic_hypergeometric<T: Field>(
    numerator: &[T],
    denominator: &[T],
    q: &T,
    z: &T,
    terms: usize,
) -> Result<T> {
    let excess = 1 + denominator.len() as i64 - numerator.len() as i64;
    let mut sum = T::zero();
    let mut term = T::one();
    let mut qk = T::one();
    for k in 0..terms {
        if term.is_zero() {
            break;
        }
        sum = sum + term.clone();
        if k + 1 == terms {
            break;
        }
        let mut ratio = z.clone();
        for a in numerator {
            ratio = ratio * (T::one() - a.clone() * qk.clone());
        }
        let mut den = T::one() - qk.clone() * q.clone();
        for b in denominator {
            den = den * (T::one() - b.clone() * qk.clone());
        }
        if excess != 0 {
            let sign = if excess % 2 == 0 { T::one() } else { -T::one() };
            ratio = ratio * sign * qk.powi(excess);
        }
        if ratio.is_zero() {
            break;
        }
        if den.is_zero() {
            return Err(Error::Pole(format!(
                "denominator Pochhammer vanishes at k = {}",
                k + 1
            )));
        }
        term = term * ratio / den;
        qk = qk * q.clone();
    }
    Ok(sum)
}

/// Point-mass specification of a Sobolev context.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    /// Scaled mass `λ̂`, used directly by the exact layer.
    Exact { lambda_hat: Rational },
    /// Inner-product mass `λ`; converted to `λ̂` through the norm constant at
    /// `digits` significant digits.
    Numeric { lambda: Rational, digits: u64 },
}

/// Parameters shared by every family computation: `0 < q < 1`, `|α| > 1`,
/// derivative order `j` and the mass.
#[derive(Clone, Debug, PartialEq)]
pub struct QContext {
    q: Rational,
    alpha: Rational,
    j: usize,
    mass: Mass,
}

impl QContext {
    pub fn new(q: Rational, alpha: Rational, j: usize, mass: Mass) -> Result<Self> {
        check_q(&q)?;
        if alpha.abs() <= Rational::one() {
            return Err(Error::Domain(format!("|alpha| must exceed 1, got {alpha}")));
        }
        let m = match &mass {
            Mass::Exact { lambda_hat } => lambda_hat,
            Mass::Numeric { lambda, .. } => lambda,
        };
        if m.is_negative() {
            return Err(Error::Domain(format!("mass must be nonnegative, got {m}")));
        }
        Ok(QContext { q, alpha, j, mass })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn mass(&self) -> &Mass {
        &self.mass
    }
}

/// Rejects bases outside the open unit interval.
pub fn check_q(q: &Rational) -> Result<()> {
    if q.is_positive() && q < &Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must lie in (0, 1), got {q}")))
    }
}
