//! The q-Hermite I–Sobolev family `ℍ_n(x;q)`, orthogonal for
//! `⟨f,g⟩ = ∫ f g w d_q x + λ D_q^j f(α) D_q^j g(α)`.
//!
//! The exact layer works with the scaled mass `λ̂ = λ / V` and normalized
//! kernels, where `V` is [`crate::numeval::norm_constant`]. Every structural
//! identity is exposed as a residual: a rational function that is exactly zero
//! when the identity holds.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernels::{ab_pair, cd1_pair, cd2_pair, cd_kernel, kernel_diagonal, kernel_direct};
use crate::numeval::lambda_hat_from_lambda;
use crate::poly::Poly;
use crate::qcore::{basic_hypergeometric, binomial2, q_falling_factorial, q_number, Mass, QContext};
use crate::qhermite::{hermite_hypergeometric, HermiteFamily};
use crate::ratfunc::RatFunc;
use crate::scalar::{Field, Rational};

/// The connection coefficients `E_{k,n}`, `F_{k,n}` (`k = 1 … 8`) and `Ξ_{1,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ladder<T> {
    pub n: usize,
    e: Vec<RatFunc<T>>,
    f: Vec<RatFunc<T>>,
    pub xi1: RatFunc<T>,
}

impl<T> Ladder<T> {
    /// `E_{k,n}` for `1 ≤ k ≤ 8`.
    pub fn e(&self, k: usize) -> &RatFunc<T> {
        &self.e[k - 1]
    }

    /// `F_{k,n}` for `1 ≤ k ≤ 8`.
    pub fn f(&self, k: usize) -> &RatFunc<T> {
        &self.f[k - 1]
    }
}

/// Pieces of the connection formula
/// `ℍ_n = H_n - λ̂ · prefactor / (1 + λ̂ · diagonal) · kernel`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionTerms<T> {
    /// `[n]_q^{(j)} H_{n-j}(α)`.
    pub prefactor: T,
    /// `K̂^{(0,j)}_{n-1}(x, α)`.
    pub kernel: Poly<T>,
    /// `K̂^{(j,j)}_{n-1}(α, α)`.
    pub diagonal: T,
}

#[derive(Clone, Debug)]
pub struct SobolevFamily<T> {
    alpha: T,
    j: usize,
    mass_hat: T,
    depth: usize,
    base: HermiteFamily<T>,
    // c_n, the coefficient of K̂^{(0,j)}_{n-1} in ℍ_n, for n ≤ depth + 2
    coefs: Vec<T>,
    polys: Vec<Poly<T>>,
    // indexed by n, filled on first use for 2 ≤ n ≤ depth + 1
    ladders: Vec<OnceLock<Result<Ladder<T>>>>,
}

impl<T: Field + PartialOrd> SobolevFamily<T> {
    /// `ℍ_0 … ℍ_{depth+2}`; ladders for `2 ≤ n ≤ depth + 1` are computed on
    /// first use. That is enough for every residual with `n ≤ depth`.
    pub fn new(q: T, alpha: T, j: usize, mass_hat: T, depth: usize) -> Result<Self> {
        let base = HermiteFamily::build(q, depth + 2)?;
        Self::with_base(base, alpha, j, mass_hat, depth)
    }

    /// Same as [`SobolevFamily::new`] over a prebuilt (possibly modified)
    /// classical family, which is extended as needed.
    pub fn with_base(mut base: HermiteFamily<T>, alpha: T, j: usize, mass_hat: T, depth: usize) -> Result<Self> {
        if (alpha.clone() * alpha.clone()).partial_cmp(&T::one()) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain(format!("|alpha| must exceed 1, got {alpha:?}")));
        }
        if mass_hat < T::zero() {
            return Err(Error::Domain(format!("mass must be nonnegative, got {mass_hat:?}")));
        }
        base.extend_to(depth + 2);
        let mut family = SobolevFamily {
            alpha,
            j,
            mass_hat,
            depth,
            base,
            coefs: Vec::new(),
            polys: Vec::new(),
            ladders: Vec::new(),
        };
        family.coefs = (0..=depth + 2).map(|n| family.connection_coefficient(n)).collect();
        family.polys = (0..=depth + 2).map(|n| family.connection_poly(n)).collect();
        family.ladders = (0..=depth + 1).map(|_| OnceLock::new()).collect();
        Ok(family)
    }
}

impl SobolevFamily<Rational> {
    /// Builds the exact family of a context. A numeric mass `λ` is converted to
    /// `λ̂ = λ / V` rounded to the context's digit count.
    pub fn from_context(ctx: &QContext, depth: usize) -> Result<Self> {
        let mass_hat = match ctx.mass() {
            Mass::Exact { lambda_hat } => lambda_hat.clone(),
            Mass::Numeric { lambda, digits } => lambda_hat_from_lambda(lambda, ctx.q(), *digits)?,
        };
        Self::new(ctx.q().clone(), ctx.alpha().clone(), ctx.j(), mass_hat, depth)
    }
}

impl<T: Field> SobolevFamily<T> {
    pub fn q(&self) -> &T {
        self.base.q()
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn mass_hat(&self) -> &T {
        &self.mass_hat
    }

    /// Largest `n` for which every residual is available.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> &HermiteFamily<T> {
        &self.base
    }

    fn connection_coefficient(&self, n: usize) -> T {
        if n == 0 || n < self.j || self.mass_hat.is_zero() {
            return T::zero();
        }
        let terms = self.connection_terms(n);
        self.mass_hat.clone() * terms.prefactor / (T::one() + self.mass_hat.clone() * terms.diagonal)
    }

    fn connection_poly(&self, n: usize) -> Poly<T> {
        let h = self.base.poly(n).clone();
        if self.coefs[n].is_zero() {
            return h;
        }
        let kernel = kernel_direct(&self.base, n - 1, 0, self.j, &self.alpha).poly;
        &h - &kernel.scale(&self.coefs[n])
    }

    /// Prefactor, kernel and diagonal entering `ℍ_n`, for `n ≥ 1`.
    pub fn connection_terms(&self, n: usize) -> ConnectionTerms<T> {
        assert!(n >= 1, "the connection formula starts at n = 1");
        let prefactor = if n >= self.j {
            q_falling_factorial(n as i64, self.j, self.q()) * self.base.poly(n - self.j).eval(&self.alpha)
        } else {
            T::zero()
        };
        ConnectionTerms {
            prefactor,
            kernel: kernel_direct(&self.base, n - 1, 0, self.j, &self.alpha).poly,
            diagonal: kernel_diagonal(&self.base, n - 1, self.j, &self.alpha),
        }
    }

    /// `c_n = λ̂ [n]_q^{(j)} H_{n-j}(α) / (1 + λ̂ K̂^{(j,j)}_{n-1}(α,α))`, zero
    /// for `n < j`.
    pub fn connection_coefficient_at(&self, n: usize) -> &T {
        &self.coefs[n]
    }

    /// `ℍ_n` for `n ≤ depth + 2`.
    pub fn sobolev_poly(&self, n: usize) -> &Poly<T> {
        &self.polys[n]
    }

    /// `D_q ℍ_n = [n]_q H_{n-1} - c_n K̂^{(1,j)}_{n-1}(x, α)`.
    pub fn dq_sobolev(&self, n: usize) -> Poly<T> {
        self.derivative_formula(n, 1)
    }

    /// `D_q² ℍ_n = [n]_q^{(2)} H_{n-2} - c_n K̂^{(2,j)}_{n-1}(x, α)`.
    pub fn dq2_sobolev(&self, n: usize) -> Poly<T> {
        self.derivative_formula(n, 2)
    }

    fn derivative_formula(&self, n: usize, order: usize) -> Poly<T> {
        let shifted = self.base.forward_shift(n, order);
        if self.coefs[n].is_zero() {
            return shifted;
        }
        let kernel = kernel_direct(&self.base, n - 1, order, self.j, &self.alpha).poly;
        &shifted - &kernel.scale(&self.coefs[n])
    }

    /// `(E_{1,n}, F_{1,n}) = (1 - c_n A_n, -c_n B_n)`, so that
    /// `ℍ_n = E_{1,n} H_n + F_{1,n} H_{n-1}`.
    fn first_pair(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>)> {
        let c = &self.coefs[n];
        if c.is_zero() {
            return Ok((RatFunc::one(), RatFunc::zero()));
        }
        let ab = ab_pair(&self.base, n, self.j, &self.alpha)?;
        Ok((RatFunc::one() - ab.a.scale(c), -ab.b.scale(c)))
    }

    /// `(E_{3,n}, F_{3,n}) = (-c_n C_{1,n}, [n]_q - c_n D_{1,n})`.
    fn third_pair(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>)> {
        let c = &self.coefs[n];
        let qn = RatFunc::constant(q_number(n as i64, self.q()));
        if c.is_zero() {
            return Ok((RatFunc::zero(), qn));
        }
        let cd = cd1_pair(&self.base, n, self.j, &self.alpha)?;
        Ok((-cd.c.scale(c), qn - cd.d.scale(c)))
    }

    /// `E_{5,n} = -[n]_q^{(2)}/γ_{n-1} - c_n C_{2,n}`,
    /// `F_{5,n} = [n]_q^{(2)} x/γ_{n-1} - c_n D_{2,n}`.
    fn fifth_pair(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>)> {
        let ratio = q_falling_factorial(n as i64, 2, self.q()) / self.base.gamma(n - 1).clone();
        let e = RatFunc::constant(-ratio.clone());
        let f = RatFunc::from_poly(Poly::monomial(ratio, 1));
        let c = &self.coefs[n];
        if c.is_zero() {
            return Ok((e, f));
        }
        let cd = cd2_pair(&self.base, n, self.j, &self.alpha)?;
        Ok((e - cd.c.scale(c), f - cd.d.scale(c)))
    }

    /// All ladder entries at `n ≥ 2`; needs `ℍ_{n+1}` data, so `n ≤ depth + 1`.
    pub fn ladder_build(&self, n: usize) -> Result<Ladder<T>> {
        if n < 2 {
            return Err(Error::Domain(format!("ladder coefficients need n ≥ 2, got {n}")));
        }
        if n > self.depth + 1 {
            return Err(Error::Precondition(format!("ladder at n = {n} exceeds family depth {}", self.depth)));
        }
        let x = RatFunc::x();
        let gamma_prev = self.base.gamma(n - 1).clone();
        let (e1, f1) = self.first_pair(n)?;
        let (e1_prev, f1_prev) = self.first_pair(n - 1)?;
        let e2 = -f1_prev.scale(&gamma_prev.recip());
        let f2 = e1_prev - x.clone() * e2.clone();
        let xi1 = e1.clone() * f2.clone() - e2.clone() * f1.clone();
        let (e3, f3) = self.third_pair(n)?;
        let e4 = e3.clone() * f2.clone() - e2.clone() * f3.clone();
        let f4 = e1.clone() * f3.clone() - e3.clone() * f1.clone();
        let (e5, f5) = self.fifth_pair(n)?;
        let e6 = e5.clone() * f2.clone() - e2.clone() * f5.clone();
        let f6 = e1.clone() * f5.clone() - e5.clone() * f1.clone();
        let (e3_next, f3_next) = self.third_pair(n + 1)?;
        let e7 = x * e3_next.clone() + f3_next;
        let f7 = -e3_next.scale(self.base.gamma(n));
        let e8 = e7.clone() * f2.clone() - e2.clone() * f7.clone();
        let f8 = e1.clone() * f7.clone() - e7.clone() * f1.clone();
        Ok(Ladder {
            n,
            e: vec![e1, e2, e3, e4, e5, e6, e7, e8],
            f: vec![f1, f2, f3, f4, f5, f6, f7, f8],
            xi1,
        })
    }

    /// Cached ladder for `2 ≤ n ≤ depth + 1`.
    pub fn ladder(&self, n: usize) -> Result<&Ladder<T>> {
        if n < 2 || n > self.depth + 1 {
            return Err(Error::Domain(format!("no ladder at n = {n} (valid: 2 ..= {})", self.depth + 1)));
        }
        self.ladders[n].get_or_init(|| self.ladder_build(n)).as_ref().map_err(Clone::clone)
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n > self.depth {
            return Err(Error::Precondition(format!("n = {n} exceeds family depth {}", self.depth)));
        }
        Ok(())
    }

    fn sob(&self, n: usize) -> RatFunc<T> {
        RatFunc::from_poly(self.polys[n].clone())
    }

    fn classical(&self, n: usize) -> RatFunc<T> {
        RatFunc::from_poly(self.base.poly(n).clone())
    }

    /// `Ξ_{1,n} H_n - (ℍ_n F_{2,n} - ℍ_{n-1} F_{1,n})` and
    /// `Ξ_{1,n} H_{n-1} + (ℍ_n E_{2,n} - ℍ_{n-1} E_{1,n})`.
    pub fn xi_identities_residual(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>)> {
        self.check_depth(n)?;
        let l = self.ladder(n)?;
        let (s, s_prev) = (self.sob(n), self.sob(n - 1));
        let first = l.xi1.clone() * self.classical(n) - (s.clone() * l.f(2).clone() - s_prev.clone() * l.f(1).clone());
        let second = l.xi1.clone() * self.classical(n - 1) + (s * l.e(2).clone() - s_prev * l.e(1).clone());
        Ok((first, second))
    }

    /// `Ξ_{1,n} D_q ℍ_n - (E_{4,n} ℍ_n + F_{4,n} ℍ_{n-1})`.
    pub fn structure_relation_residual(&self, n: usize) -> Result<RatFunc<T>> {
        self.check_depth(n)?;
        let l = self.ladder(n)?;
        let lhs = l.xi1.clone() * RatFunc::from_poly(self.polys[n].dq(self.q()));
        Ok(lhs - self.in_sobolev_basis(n, l.e(4), l.f(4)))
    }

    /// `Ξ_{1,n} D_q² ℍ_n - (E_{6,n} ℍ_n + F_{6,n} ℍ_{n-1})`.
    pub fn second_structure_relation_residual(&self, n: usize) -> Result<RatFunc<T>> {
        self.check_depth(n)?;
        let l = self.ladder(n)?;
        let lhs = l.xi1.clone() * RatFunc::from_poly(self.polys[n].dq_iter(self.q(), 2));
        Ok(lhs - self.in_sobolev_basis(n, l.e(6), l.f(6)))
    }

    fn in_sobolev_basis(&self, n: usize, e: &RatFunc<T>, f: &RatFunc<T>) -> RatFunc<T> {
        e.mul_poly(&self.polys[n]) + f.mul_poly(&self.polys[n - 1])
    }

    fn in_classical_basis(&self, n: usize, e: &RatFunc<T>, f: &RatFunc<T>) -> RatFunc<T> {
        e.mul_poly(self.base.poly(n)) + f.mul_poly(self.base.poly(n - 1))
    }

    /// `(Ξ_{2,n}, α_n, β_n)` with `Ξ_{2,n} = Ξ_{1,n} E_{4,n+1}`,
    /// `α_n = Ξ_{1,n+1} E_{8,n} - Ξ_{1,n} F_{4,n+1}`, `β_n = Ξ_{1,n+1} F_{8,n}`.
    pub fn three_term_coeffs(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>, RatFunc<T>)> {
        self.check_depth(n)?;
        let (l, next) = (self.ladder(n)?, self.ladder(n + 1)?);
        let xi2 = l.xi1.clone() * next.e(4).clone();
        let a = next.xi1.clone() * l.e(8).clone() - l.xi1.clone() * next.f(4).clone();
        let b = next.xi1.clone() * l.f(8).clone();
        Ok((xi2, a, b))
    }

    /// `Ξ_{2,n} ℍ_{n+1} - α_n ℍ_n - β_n ℍ_{n-1}`.
    pub fn three_term_residual(&self, n: usize) -> Result<RatFunc<T>> {
        let (xi2, a, b) = self.three_term_coeffs(n)?;
        Ok(xi2 * self.sob(n + 1) - a * self.sob(n) - b * self.sob(n - 1))
    }

    /// `R_n = F_{4,n} Ξ_{1,n}`, `S_n = -F_{6,n} Ξ_{1,n}`,
    /// `T_n = E_{4,n} F_{6,n} - E_{6,n} F_{4,n}`.
    pub fn sde1_coeffs(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>, RatFunc<T>)> {
        self.check_depth(n)?;
        let l = self.ladder(n)?;
        let r = l.f(4).clone() * l.xi1.clone();
        let s = -(l.f(6).clone() * l.xi1.clone());
        let t = l.e(4).clone() * l.f(6).clone() - l.e(6).clone() * l.f(4).clone();
        Ok((r, s, t))
    }

    /// `R_n D_q² ℍ_n + S_n D_q ℍ_n + T_n ℍ_n`. Trivially zero for the constant
    /// `ℍ_0`; undefined at `n = 1`.
    pub fn sde1_residual(&self, n: usize) -> Result<RatFunc<T>> {
        if n == 0 {
            return Ok(RatFunc::zero());
        }
        let (r, s, t) = self.sde1_coeffs(n)?;
        let q = self.q();
        let h = &self.polys[n];
        Ok(r.mul_poly(&h.dq_iter(q, 2)) + s.mul_poly(&h.dq(q)) + t.mul_poly(h))
    }

    /// `R̄(x) = R(x/q)`, `S̄(x) = S(x/q) + (q⁻¹ - 1) x T(x/q)`, `T̄(x) = T(x/q)`.
    pub fn sde2_coeffs(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>, RatFunc<T>)> {
        let (r, s, t) = self.sde1_coeffs(n)?;
        let q_inv = self.q().recip();
        let t_bar = t.scale_arg(&q_inv);
        let shift = RatFunc::from_poly(Poly::monomial(q_inv.clone() - T::one(), 1));
        let s_bar = s.scale_arg(&q_inv) + shift * t_bar.clone();
        Ok((r.scale_arg(&q_inv), s_bar, t_bar))
    }

    /// `R̄_n D_{q⁻¹} D_q ℍ_n + S̄_n D_{q⁻¹} ℍ_n + T̄_n ℍ_n`, trivially zero at
    /// `n = 0`.
    pub fn sde2_residual(&self, n: usize) -> Result<RatFunc<T>> {
        if n == 0 {
            return Ok(RatFunc::zero());
        }
        let (r, s, t) = self.sde2_coeffs(n)?;
        let q = self.q();
        let h = &self.polys[n];
        Ok(r.mul_poly(&h.dq(q).dq_inv(q)) + s.mul_poly(&h.dq_inv(q)) + t.mul_poly(h))
    }

    /// `(ϑ_n, ψ_n)` with `ϑ_n = -q^{n-2} [n]_q E_{1,n} / F_{1,n} - [n-1]_q` and
    /// `ψ_n = ((1-q) ϑ_n + 1)⁻¹`.
    pub fn hypergeometric_params(&self, n: usize) -> Result<(RatFunc<T>, RatFunc<T>)> {
        if self.mass_hat.is_zero() {
            return Err(Error::Precondition(
                "λ̂ = 0: use the classical ₂φ₁ representation of H_n".into(),
            ));
        }
        if n == 0 {
            return Err(Error::Domain("hypergeometric representation needs n ≥ 1".into()));
        }
        let q = self.q();
        let (e1, f1) = self.first_pair(n)?;
        if f1.is_zero() {
            return Err(Error::Precondition(format!("F_1 vanishes at n = {n}; ℍ_n = H_n there")));
        }
        let scale = q.powi(n as i64 - 2) * q_number(n as i64, q);
        let theta = -(e1 / f1).scale(&scale) - RatFunc::constant(q_number(n as i64 - 1, q));
        let psi = RatFunc::one().try_div(&(theta.scale(&(T::one() - q.clone())) + RatFunc::one()))?;
        Ok((theta, psi))
    }

    /// Prefactor times `₃φ₂(q^{-n}, x^{-1}, ψ_n; 0, ψ_n/q; q, -qx)`, minus `ℍ_n`.
    /// The prefactor is `-F_{1,n}(1 - ψ_n/q) q^{C(n,2)-n+2} / ([n]_q ψ_n (1-q))`.
    pub fn hypergeometric_rep_residual(&self, n: usize) -> Result<RatFunc<T>> {
        let (_, psi) = self.hypergeometric_params(n)?;
        let q = self.q();
        let (_, f1) = self.first_pair(n)?;
        let lift = |t: T| RatFunc::constant(t);
        let psi_over_q = psi.scale(&q.recip());
        let x_inv = RatFunc::one().try_div(&RatFunc::x())?;
        let series = basic_hypergeometric(
            &[lift(q.powi(-(n as i64))), x_inv, psi.clone()],
            &[RatFunc::zero(), psi_over_q.clone()],
            &lift(q.clone()),
            &RatFunc::x().scale(&-q.clone()),
            n + 1,
        )?;
        let numer = -(f1 * (RatFunc::one() - psi_over_q)).scale(&q.powi(binomial2(n) - n as i64 + 2));
        let denom = psi.scale(&(q_number(n as i64, q) * (T::one() - q.clone())));
        Ok(numer.try_div(&denom)? * series - self.sob(n))
    }

    /// Checks `D_q^j ℍ_n(α) = [n]_q^{(j)} H_{n-j}(α) / (1 + λ̂ K̂^{(j,j)}_{n-1}(α,α))`
    /// and returns the difference as a constant.
    pub fn point_derivative_residual(&self, n: usize) -> RatFunc<T> {
        let lhs = self.polys[n].dq_iter(self.q(), self.j).eval(&self.alpha);
        let rhs = if n == 0 {
            self.base.forward_shift(0, self.j).eval(&self.alpha)
        } else {
            let t = self.connection_terms(n);
            t.prefactor / (T::one() + self.mass_hat.clone() * t.diagonal)
        };
        RatFunc::constant(lhs - rhs)
    }

    /// Residual of one identity at index `n`. Errors mean `n` lies outside the
    /// identity's range, not that the identity failed.
    pub fn residual(&self, identity: Identity, n: usize) -> Result<RatFunc<T>> {
        let (lo, hi) = identity.range(self.depth);
        if n < lo || n > hi {
            return Err(Error::Domain(format!("{} is checked for {lo} ≤ n ≤ {hi}, got {n}", identity.name())));
        }
        let q = self.q().clone();
        let base = &self.base;
        let alpha = &self.alpha;
        let poly = RatFunc::from_poly;
        Ok(match identity {
            Identity::Recurrence => {
                let gamma = q.powi(n as i64 - 1) * (T::one() - q.powi(n as i64));
                poly(&(base.poly(n + 1) - &(&Poly::x() * base.poly(n))) + &base.poly(n - 1).scale(&gamma))
            }
            Identity::ForwardShift => {
                let mut worst = RatFunc::zero();
                for k in 0..=n + 1 {
                    let r = poly(&base.poly(n).dq_iter(&q, k) - &base.forward_shift(n, k));
                    if !r.is_zero() {
                        worst = r;
                        break;
                    }
                }
                worst
            }
            Identity::ClassicalSode => poly(base.classical_sode_residual(n)),
            Identity::ClassicalHypergeometric => poly(&hermite_hypergeometric(n, &q) - base.poly(n)),
            Identity::ChristoffelDarboux => {
                cd_kernel(base, n, alpha) - poly(kernel_direct(base, n, 0, 0, alpha).poly)
            }
            Identity::Kernel0j => {
                ab_pair(base, n, self.j, alpha)?.combine(base, n)
                    - poly(kernel_direct(base, n - 1, 0, self.j, alpha).poly)
            }
            Identity::Kernel1j => {
                cd1_pair(base, n, self.j, alpha)?.combine(base, n)
                    - poly(kernel_direct(base, n - 1, 1, self.j, alpha).poly)
            }
            Identity::Kernel2j => {
                cd2_pair(base, n, self.j, alpha)?.combine(base, n)
                    - poly(kernel_direct(base, n - 1, 2, self.j, alpha).poly)
            }
            Identity::Connection => {
                let (e1, f1) = self.first_pair(n)?;
                self.sob(n) - self.in_classical_basis(n, &e1, &f1)
            }
            Identity::ConnectionShift => {
                let l = self.ladder(n)?;
                self.sob(n - 1) - self.in_classical_basis(n, l.e(2), l.f(2))
            }
            Identity::PointDerivative => self.point_derivative_residual(n),
            Identity::DqCorollary => poly(&self.polys[n].dq(&q) - &self.dq_sobolev(n)),
            Identity::Dq2Corollary => poly(&self.polys[n].dq_iter(&q, 2) - &self.dq2_sobolev(n)),
            Identity::DqConnection => {
                let l = self.ladder(n)?;
                poly(self.polys[n].dq(&q)) - self.in_classical_basis(n, l.e(3), l.f(3))
            }
            Identity::Dq2Connection => {
                let l = self.ladder(n)?;
                poly(self.polys[n].dq_iter(&q, 2)) - self.in_classical_basis(n, l.e(5), l.f(5))
            }
            Identity::XiFirst => self.xi_identities_residual(n)?.0,
            Identity::XiSecond => self.xi_identities_residual(n)?.1,
            Identity::StructureRelation => self.structure_relation_residual(n)?,
            Identity::SecondStructureRelation => self.second_structure_relation_residual(n)?,
            Identity::ThreeTerm => self.three_term_residual(n)?,
            Identity::Sde1 => self.sde1_residual(n)?,
            Identity::Sde2 => self.sde2_residual(n)?,
            Identity::Hypergeometric => self.hypergeometric_rep_residual(n)?,
        })
    }

    /// Like [`SobolevFamily::residual`], but a nonzero residual becomes an
    /// [`Error::IdentityViolation`].
    pub fn check(&self, identity: Identity, n: usize) -> Result<()>
    where
        T: fmt::Display,
    {
        let r = self.residual(identity, n)?;
        if r.is_zero() {
            Ok(())
        } else {
            Err(Error::IdentityViolation {
                identity: identity.name().to_string(),
                n,
                residual: r.to_string(),
            })
        }
    }
}

/// Every identity the family can verify, classical ones included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    Recurrence,
    ForwardShift,
    ClassicalSode,
    ClassicalHypergeometric,
    ChristoffelDarboux,
    Kernel0j,
    Kernel1j,
    Kernel2j,
    Connection,
    ConnectionShift,
    PointDerivative,
    DqCorollary,
    Dq2Corollary,
    DqConnection,
    Dq2Connection,
    XiFirst,
    XiSecond,
    StructureRelation,
    SecondStructureRelation,
    ThreeTerm,
    Sde1,
    Sde2,
    Hypergeometric,
}

impl Identity {
    pub const ALL: [Identity; 23] = [
        Identity::Recurrence,
        Identity::ForwardShift,
        Identity::ClassicalSode,
        Identity::ClassicalHypergeometric,
        Identity::ChristoffelDarboux,
        Identity::Kernel0j,
        Identity::Kernel1j,
        Identity::Kernel2j,
        Identity::Connection,
        Identity::ConnectionShift,
        Identity::PointDerivative,
        Identity::DqCorollary,
        Identity::Dq2Corollary,
        Identity::DqConnection,
        Identity::Dq2Connection,
        Identity::XiFirst,
        Identity::XiSecond,
        Identity::StructureRelation,
        Identity::SecondStructureRelation,
        Identity::ThreeTerm,
        Identity::Sde1,
        Identity::Sde2,
        Identity::Hypergeometric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Recurrence => "recurrence",
            Identity::ForwardShift => "forward_shift",
            Identity::ClassicalSode => "classical_sode",
            Identity::ClassicalHypergeometric => "classical_hypergeometric",
            Identity::ChristoffelDarboux => "christoffel_darboux",
            Identity::Kernel0j => "kernel_0j",
            Identity::Kernel1j => "kernel_1j",
            Identity::Kernel2j => "kernel_2j",
            Identity::Connection => "connection",
            Identity::ConnectionShift => "connection_shift",
            Identity::PointDerivative => "point_derivative",
            Identity::DqCorollary => "dq_corollary",
            Identity::Dq2Corollary => "dq2_corollary",
            Identity::DqConnection => "dq_connection",
            Identity::Dq2Connection => "dq2_connection",
            Identity::XiFirst => "xi_first",
            Identity::XiSecond => "xi_second",
            Identity::StructureRelation => "structure_relation",
            Identity::SecondStructureRelation => "second_structure_relation",
            Identity::ThreeTerm => "three_term",
            Identity::Sde1 => "sde1",
            Identity::Sde2 => "sde2",
            Identity::Hypergeometric => "hypergeometric",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Identity::ALL.into_iter().find(|id| id.name() == name)
    }

    /// Indices `lo ..= hi` at which the identity is checked in a family of the
    /// given depth.
    pub fn range(self, depth: usize) -> (usize, usize) {
        match self {
            Identity::Recurrence => (1, depth + 1),
            Identity::ForwardShift
            | Identity::ClassicalSode
            | Identity::ClassicalHypergeometric
            | Identity::ChristoffelDarboux
            | Identity::PointDerivative
            | Identity::DqCorollary
            | Identity::Dq2Corollary => (0, depth),
            Identity::Kernel0j | Identity::Kernel1j | Identity::Kernel2j | Identity::Connection => (1, depth),
            Identity::Hypergeometric => (1, depth),
            _ => (2, depth),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn example(mass_hat: Rational, depth: usize) -> SobolevFamily<Rational> {
        SobolevFamily::new(r(3, 5), r(3, 1), 2, mass_hat, depth).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SobolevFamily::new(r(3, 5), r(1, 1), 2, r(1, 1), 3).is_err());
        assert!(SobolevFamily::new(r(3, 5), r(3, 1), 2, r(-1, 1), 3).is_err());
        assert!(SobolevFamily::new(r(5, 3), r(3, 1), 2, r(1, 1), 3).is_err());
    }

    #[test]
    fn low_degrees_coincide_with_classical() {
        let f = example(r(1, 1), 4);
        for k in 0..=2 {
            assert_eq!(f.sobolev_poly(k), f.base().poly(k));
        }
        assert_ne!(f.sobolev_poly(3), f.base().poly(3));
        assert!(kernel_direct(f.base(), 1, 0, 2, &r(3, 1)).poly.is_zero());
    }

    #[test]
    fn zero_mass_is_classical() {
        let f = example(r(0, 1), 5);
        for n in 0..=5 {
            assert_eq!(f.sobolev_poly(n), f.base().poly(n));
        }
        let l = f.ladder(3).unwrap();
        assert_eq!(l.e(1), &RatFunc::one());
        assert!(l.f(1).is_zero());
        assert!(l.e(3).is_zero());
        assert_eq!(l.f(3), &RatFunc::constant(q_number(3, &r(3, 5))));
        let (a, b) = f.xi_identities_residual(4).unwrap();
        assert!(a.is_zero() && b.is_zero());
        assert!(matches!(f.hypergeometric_rep_residual(3), Err(Error::Precondition(_))));
    }

    #[test]
    fn monic_of_exact_degree() {
        let f = example(r(3, 5), 6);
        for n in 0..=6 {
            assert_eq!(f.sobolev_poly(n).degree(), Some(n));
            assert!(f.sobolev_poly(n).is_monic());
        }
    }

    #[test]
    fn derivative_corollaries() {
        let f = example(r(3, 5), 5);
        let q = r(3, 5);
        assert_eq!(f.dq_sobolev(2), f.base().poly(1).scale(&q_number(2, &q)));
        assert_eq!(f.dq_sobolev(4), f.sobolev_poly(4).dq(&q));
        assert_eq!(f.dq2_sobolev(5), f.sobolev_poly(5).dq(&q).dq(&q));
    }

    #[test]
    fn worked_residuals_vanish() {
        let f = example(r(3, 5), 6);
        assert!(f.structure_relation_residual(3).unwrap().is_zero());
        assert!(f.second_structure_relation_residual(4).unwrap().is_zero());
        for n in [3, 6] {
            let (a, b) = f.xi_identities_residual(n).unwrap();
            assert!(a.is_zero() && b.is_zero(), "n = {n}");
            assert!(f.sde1_residual(n).unwrap().is_zero(), "n = {n}");
        }
        for n in [3, 5] {
            assert!(f.three_term_residual(n).unwrap().is_zero(), "n = {n}");
        }
        for n in [4, 6] {
            assert!(f.sde2_residual(n).unwrap().is_zero(), "n = {n}");
        }
        for n in [3, 4, 5] {
            assert!(f.hypergeometric_rep_residual(n).unwrap().is_zero(), "n = {n}");
        }
    }

    #[test]
    fn small_index_conventions() {
        let f = example(r(1, 1), 3);
        assert!(f.sde1_residual(0).unwrap().is_zero());
        assert!(f.sde2_residual(0).unwrap().is_zero());
        assert!(f.sde1_residual(1).is_err());
        assert!(f.ladder_build(1).is_err());
        assert!(f.residual(Identity::ThreeTerm, 4).is_err());
    }

    #[test]
    fn every_identity_holds_at_the_worked_context() {
        let f = example(r(3, 5), 5);
        for id in Identity::ALL {
            let (lo, hi) = id.range(f.depth());
            for n in lo..=hi {
                match f.check(id, n) {
                    Ok(()) | Err(Error::Precondition(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn pure_point_mass_without_derivative() {
        let f = SobolevFamily::new(r(1, 2), r(-2, 1), 0, r(2, 3), 5).unwrap();
        assert_eq!(f.sobolev_poly(0), f.base().poly(0));
        assert_ne!(f.sobolev_poly(1), f.base().poly(1));
        for id in Identity::ALL {
            let (lo, hi) = id.range(f.depth());
            for n in lo..=hi {
                match f.check(id, n) {
                    Ok(()) | Err(Error::Precondition(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn corrupted_gamma_is_reported() {
        let mut base = HermiteFamily::build(r(3, 5), 6).unwrap();
        base.override_gamma(3, r(1, 7));
        let f = SobolevFamily::with_base(base, r(3, 1), 2, r(1, 1), 4).unwrap();
        let err = f.check(Identity::Recurrence, 3).unwrap_err();
        assert!(matches!(err, Error::IdentityViolation { n: 3, .. }));
        assert!(f.check(Identity::Recurrence, 2).is_ok());
    }

    #[test]
    fn identity_names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(Identity::from_name(id.name()), Some(id));
        }
        assert_eq!(Identity::from_name("nope"), None);
    }

    #[test]
    fn numeric_mass_context() {
        let ctx = QContext::new(r(3, 5), r(3, 1), 2, Mass::Numeric { lambda: r(3, 5), digits: 40 }).unwrap();
        let f = SobolevFamily::from_context(&ctx, 3).unwrap();
        let lh = num_traits::ToPrimitive::to_f64(f.mass_hat()).unwrap();
        assert!((lh - 0.6 / 1.495_356_291_238_751_3).abs() < 1e-15);
        assert!(f.check(Identity::ThreeTerm, 3).is_ok());
    }
}
