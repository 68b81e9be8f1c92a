//! Christoffel–Darboux kernels of the q-Hermite I family and the closed-form
//! coefficient functions expressing their partial q-derivatives through
//! `H_n` and `H_{n-1}`.
//!
//! All kernels use the normalized norms `ĥ_k` and are curried at `y = y0`.
//! Functions taking an index `n` panic when the family is shallower than the
//! formula requires; the callers in this crate extend it first.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::qcore::{jhc_power, q_factorial, q_number};
use crate::qhermite::HermiteFamily;
use crate::ratfunc::RatFunc;
use crate::scalar::Field;

/// `K̂^{(i,j)}_n(x, y0) = Σ_{k ≤ n} D_q^i H_k(x) · D_q^j H_k(y0) / ĥ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSlice<T> {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub y0: T,
    pub poly: Poly<T>,
}

/// Brute-force kernel sum; the reference every closed form is checked against.
pub fn kernel_direct<T: Field>(
    family: &HermiteFamily<T>,
    n: usize,
    i: usize,
    j: usize,
    y0: &T,
) -> KernelSlice<T> {
    let q = family.q();
    let mut poly = Poly::zero();
    for k in 0..=n {
        let h = family.poly(k);
        let weight = h.dq_iter(q, j).eval(y0) / family.normalized_norm(k).clone();
        if !weight.is_zero() {
            poly = &poly + &h.dq_iter(q, i).scale(&weight);
        }
    }
    KernelSlice { n, i, j, y0: y0.clone(), poly }
}

/// `K̂^{(j,j)}_n(y0, y0) = Σ_{k ≤ n} (D_q^j H_k(y0))² / ĥ_k`, a sum of squares.
pub fn kernel_diagonal<T: Field>(family: &HermiteFamily<T>, n: usize, j: usize, y0: &T) -> T {
    (0..=n).fold(T::zero(), |acc, k| {
        let d = family.forward_shift(k, j).eval(y0);
        acc + d.clone() * d / family.normalized_norm(k).clone()
    })
}

/// Christoffel–Darboux form
/// `(H_{n+1}(x)H_n(y0) - H_{n+1}(y0)H_n(x)) / ((x - y0) ĥ_n)`.
pub fn cd_kernel<T: Field>(family: &HermiteFamily<T>, n: usize, y0: &T) -> RatFunc<T> {
    let (hn, hn1) = (family.poly(n), family.poly(n + 1));
    let num = &hn1.scale(&hn.eval(y0)) - &hn.scale(&hn1.eval(y0));
    let den = Poly::linear_root(y0.clone()).scale(family.normalized_norm(n));
    RatFunc::new(num, den).expect("x - y0 is nonzero")
}

/// The polynomial a rational function is supposed to equal, or an identity
/// violation naming the failed identity.
pub fn expect_poly<T: Field + fmt::Display>(
    value: &RatFunc<T>,
    identity: &str,
    n: usize,
) -> Result<Poly<T>> {
    value.exact_poly_quotient().map_err(|e| match e {
        Error::NonzeroRemainder { remainder } => Error::IdentityViolation {
            identity: identity.to_string(),
            n,
            residual: remainder,
        },
        other => other,
    })
}

/// Coefficients with `A·H_n + B·H_{n-1} = K̂^{(0,j)}_{n-1}(x, y0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ABPair<T> {
    pub a: RatFunc<T>,
    pub b: RatFunc<T>,
}

/// Coefficients with `C·H_n + D·H_{n-1} = K̂^{(i,j)}_{n-1}(x, y0)` for
/// `i = 1` or `i = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CDPair<T> {
    pub c: RatFunc<T>,
    pub d: RatFunc<T>,
}

fn combine<T: Field>(
    family: &HermiteFamily<T>,
    n: usize,
    on_n: &RatFunc<T>,
    on_prev: &RatFunc<T>,
) -> RatFunc<T> {
    on_n.mul_poly(family.poly(n)) + on_prev.mul_poly(family.poly(n - 1))
}

impl<T: Field> ABPair<T> {
    /// `A·H_n + B·H_{n-1}`.
    pub fn combine(&self, family: &HermiteFamily<T>, n: usize) -> RatFunc<T> {
        combine(family, n, &self.a, &self.b)
    }
}

impl<T: Field> CDPair<T> {
    /// `C·H_n + D·H_{n-1}`.
    pub fn combine(&self, family: &HermiteFamily<T>, n: usize) -> RatFunc<T> {
        combine(family, n, &self.c, &self.d)
    }

    fn zero() -> Self {
        CDPair { c: RatFunc::zero(), d: RatFunc::zero() }
    }
}

/// Closed forms
/// `A_n^{(j)} = [j]_q! / (ĥ_{n-1} (x⊟y0)^{j+1}) · Σ_{k ≤ j} D_q^k H_{n-1}(y0) (x⊟y0)^k / [k]_q!`
/// and `B_n^{(j)}`, the same sum over `-H_n`.
pub fn ab_pair<T: Field>(family: &HermiteFamily<T>, n: usize, j: usize, y0: &T) -> Result<ABPair<T>> {
    if n == 0 {
        return Err(Error::Domain("A/B coefficients need n ≥ 1".into()));
    }
    let q = family.q();
    let mut sum_a = Poly::zero();
    let mut sum_b = Poly::zero();
    for k in 0..=j {
        let jhc = jhc_power(y0, k, q);
        let fact = q_factorial(k as i64, q)?;
        let da = family.forward_shift(n - 1, k).eval(y0) / fact.clone();
        let db = family.forward_shift(n, k).eval(y0) / fact;
        sum_a = &sum_a + &jhc.scale(&da);
        sum_b = &sum_b - &jhc.scale(&db);
    }
    let den = jhc_power(y0, j + 1, q).scale(family.normalized_norm(n - 1));
    let lead = q_factorial(j as i64, q)?;
    Ok(ABPair {
        a: RatFunc::new(sum_a.scale(&lead), den.clone())?,
        b: RatFunc::new(sum_b.scale(&lead), den)?,
    })
}

/// One derivative step: from coefficients `(P, Q)` of `K̂^{(i,j)}_{n-1}` to
/// those of `K̂^{(i+1,j)}_{n-1}`:
/// `P' = D_q P - [n-1]_q γ_{n-1}⁻¹ Q(qx)`,
/// `Q' = [n]_q P(qx) + [n-1]_q γ_{n-1}⁻¹ x Q(qx) + D_q Q`.
fn derivative_step<T: Field>(
    family: &HermiteFamily<T>,
    n: usize,
    p: &RatFunc<T>,
    r: &RatFunc<T>,
) -> CDPair<T> {
    let q = family.q();
    let ratio = q_number(n as i64 - 1, q) / family.gamma(n - 1).clone();
    let r_scaled = r.scale_arg(q);
    let c = p.dq(q) - r_scaled.scale(&ratio);
    let d = p.scale_arg(q).scale(&q_number(n as i64, q))
        + r_scaled.mul_poly(&Poly::monomial(ratio, 1))
        + r.dq(q);
    CDPair { c, d }
}

/// `(C_{1,n}, D_{1,n})`. For `n = 1` the closed form divides by `γ_0 = 0`;
/// there `K̂^{(1,j)}_0 = 0` and the zero pair is returned.
pub fn cd1_pair<T: Field>(family: &HermiteFamily<T>, n: usize, j: usize, y0: &T) -> Result<CDPair<T>> {
    match n {
        0 => Err(Error::Domain("C/D coefficients need n ≥ 1".into())),
        1 => Ok(CDPair::zero()),
        _ => {
            let ab = ab_pair(family, n, j, y0)?;
            Ok(derivative_step(family, n, &ab.a, &ab.b))
        }
    }
}

/// `(C_{2,n}, D_{2,n})`, obtained by applying the derivative step to
/// `(C_{1,n}, D_{1,n})`. Zero pair at `n = 1`.
pub fn cd2_pair<T: Field>(family: &HermiteFamily<T>, n: usize, j: usize, y0: &T) -> Result<CDPair<T>> {
    let first = cd1_pair(family, n, j, y0)?;
    if n == 1 {
        return Ok(first);
    }
    Ok(derivative_step(family, n, &first.c, &first.d))
}
