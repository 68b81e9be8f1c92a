//! The monic discrete q-Hermite I family `H_n(x;q)`.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::qcore::{binomial2, q_falling_factorial, q_number, q_pochhammer};
use crate::scalar::Field;

/// `H_0 … H_N` together with the recurrence coefficients `γ_1 … γ_N` and the
/// normalized norms `ĥ_n = (q;q)_n q^{C(n,2)}`.
///
/// The true squared norm is `ĥ_n` times the constant
/// `(1-q)(q;q)_∞(-1;q)_∞(-q;q)_∞`, which the exact layer never needs.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteFamily<T> {
    q: T,
    polys: Vec<Poly<T>>,
    // gammas[n] = γ_n; gammas[0] = 0 is a placeholder so indices line up
    gammas: Vec<T>,
    normalized_norms: Vec<T>,
}

impl<T: Field + PartialOrd> HermiteFamily<T> {
    /// Builds `H_0 … H_N` from `H_{n+1} = x H_n - γ_n H_{n-1}`.
    pub fn build(q: T, depth: usize) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::Domain(format!("q must lie in (0, 1), got {q:?}")));
        }
        let mut family = HermiteFamily {
            q,
            polys: vec![Poly::one()],
            gammas: vec![T::zero()],
            normalized_norms: vec![T::one()],
        };
        family.extend_to(depth);
        Ok(family)
    }
}

impl<T: Field> HermiteFamily<T> {
    pub fn q(&self) -> &T {
        &self.q
    }

    /// Largest index `N` currently cached.
    pub fn depth(&self) -> usize {
        self.polys.len() - 1
    }

    /// Extends the cache so that `depth() ≥ n`.
    pub fn extend_to(&mut self, n: usize) {
        while self.depth() < n {
            let m = self.depth();
            let gamma = self.q.powi(m as i64) * (T::one() - self.q.powi(m as i64 + 1));
            self.gammas.push(gamma);
            let norm = self.normalized_norms[m].clone() * self.gammas[m + 1].clone();
            self.normalized_norms.push(norm);
            let next = self.next_poly(m);
            self.polys.push(next);
        }
    }

    fn next_poly(&self, m: usize) -> Poly<T> {
        let xh = &Poly::x() * &self.polys[m];
        if m == 0 {
            xh
        } else {
            &xh - &self.polys[m - 1].scale(&self.gammas[m])
        }
    }

    /// `H_n`. Panics when `n > depth()`.
    pub fn poly(&self, n: usize) -> &Poly<T> {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[Poly<T>] {
        &self.polys
    }

    /// `γ_n = q^{n-1}(1 - q^n)` for `1 ≤ n ≤ depth()`.
    pub fn gamma(&self, n: usize) -> &T {
        assert!(n >= 1, "γ_0 is not defined");
        &self.gammas[n]
    }

    /// `ĥ_n = (q;q)_n q^{C(n,2)}`.
    pub fn normalized_norm(&self, n: usize) -> &T {
        &self.normalized_norms[n]
    }

    /// Replaces `γ_n` and rebuilds every `H_m`, `m ≥ n`, from the corrupted
    /// recurrence. Norms are left untouched, so downstream identities fail;
    /// this exists to exercise failure reporting.
    pub fn override_gamma(&mut self, n: usize, value: T) {
        assert!(n >= 1 && n <= self.depth(), "γ index out of range");
        self.gammas[n] = value;
        for m in n..self.depth() {
            self.polys[m + 1] = self.next_poly(m);
        }
    }

    /// `[n]_q^{(k)} H_{n-k}`, the `k`-th q-derivative of `H_n`.
    pub fn forward_shift(&self, n: usize, k: usize) -> Poly<T> {
        if k > n {
            return Poly::zero();
        }
        self.polys[n - k].scale(&q_falling_factorial(n as i64, k, &self.q))
    }

    /// `σ D_q D_{q⁻¹} H_n + τ D_q H_n + λ_{n,q} H_n` with `σ = x² - 1`,
    /// `τ = x/(1-q)` and `λ_{n,q} = [n]_q([1-n]_q - 1/(1-q))`. Identically
    /// zero for the genuine family.
    pub fn classical_sode_residual(&self, n: usize) -> Poly<T> {
        let q = &self.q;
        let h = &self.polys[n];
        let one_minus_q = T::one() - q.clone();
        let sigma = Poly::from_coeffs(vec![-T::one(), T::zero(), T::one()]);
        let tau = Poly::monomial(one_minus_q.recip(), 1);
        let lambda = q_number(n as i64, q)
            * (q_number(1 - n as i64, q) - one_minus_q.recip());
        let second = &sigma * &h.dq_inv(q).dq(q);
        let first = &tau * &h.dq(q);
        &(&second + &first) + &h.scale(&lambda)
    }
}

/// `q^{C(n,2)} ₂φ₁(q^{-n}, x^{-1}; 0; q, -qx)` expanded as a polynomial, using
/// `(x^{-1};q)_k x^k = ∏_{i<k} (x - q^i)`.
pub fn hermite_hypergeometric<T: Field>(n: usize, q: &T) -> Poly<T> {
    let q_inv_n = q.powi(-(n as i64));
    let mut sum = Poly::zero();
    let mut kernel = Poly::one();
    let mut neg_q_pow = T::one();
    for k in 0..=n {
        let coef = q_pochhammer(&q_inv_n, q, k) / q_pochhammer(q, q, k) * neg_q_pow.clone();
        sum = &sum + &kernel.scale(&coef);
        kernel = &kernel * &Poly::linear_root(q.powi(k as i64));
        neg_q_pow = neg_q_pow * -q.clone();
    }
    sum.scale(&q.powi(binomial2(n)))
}
