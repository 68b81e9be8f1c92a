//! High-precision numerics: infinite q-Pochhammer products, the orthogonality
//! weight, Jackson q-integrals, the Sobolev inner product and Gram matrices.
//!
//! Every routine is generic over [`RealScalar`]; [`BigFloat`] at the
//! configured precision is the intended scalar, `f64` works for quick looks.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::qcore::{Mass, QContext};
use crate::scalar::{BigFloat, RealScalar, Rational};

/// Working precision (significant decimal digits) and relative truncation
/// tolerance for infinite sums and products.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConfig {
    precision: u64,
    tail_tol: Rational,
}

pub const DEFAULT_PRECISION: u64 = 34;
pub const MIN_PRECISION: u64 = 15;

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            precision: DEFAULT_PRECISION,
            tail_tol: Rational::new(1.into(), num_traits::pow(10.into(), 25)),
        }
    }
}

impl NumericConfig {
    /// `precision ≥ 15` and `0 < tail_tol < 10⁻⁶`.
    pub fn new(precision: u64, tail_tol: Rational) -> Result<Self> {
        if precision < MIN_PRECISION {
            return Err(Error::Domain(format!(
                "precision must be at least {MIN_PRECISION} digits, got {precision}"
            )));
        }
        let bound = Rational::new(1.into(), 1_000_000.into());
        if !tail_tol.is_positive() || tail_tol >= bound {
            return Err(Error::Domain(format!("tail_tol must lie in (0, 1e-6), got {tail_tol}")));
        }
        Ok(NumericConfig { precision, tail_tol })
    }

    /// Default tolerance at the given precision.
    pub fn with_precision(precision: u64) -> Result<Self> {
        Self::new(precision, Self::default().tail_tol)
    }

    pub fn precision(&self) -> u64 {
        self.precision
    }

    pub fn tail_tol(&self) -> &Rational {
        &self.tail_tol
    }

    /// An exact rational rounded to the working precision.
    pub fn scalar<T: RealScalar>(&self, r: &Rational) -> T {
        T::from_rational(r, self.precision)
    }
}

/// `(a;q)_∞`, truncated once `|a| q^k < tail_tol (1 - q)`; the neglected
/// factors then change the product by a relative amount of order `tail_tol`.
pub fn inf_pochhammer<T: RealScalar>(a: &T, q: &T, cfg: &NumericConfig) -> T {
    let one = T::one();
    let threshold = cfg.scalar::<T>(&cfg.tail_tol) * (one.clone() - q.clone());
    let mut acc = one.clone();
    let mut term = a.clone();
    while term.abs() >= threshold {
        acc = acc * (one.clone() - term.clone());
        term = term * q.clone();
    }
    acc
}

/// `w(x) = (qx;q)_∞ (-qx;q)_∞`.
pub fn weight<T: RealScalar>(x: &T, q: &T, cfg: &NumericConfig) -> T {
    let qx = q.clone() * x.clone();
    inf_pochhammer(&qx, q, cfg) * inf_pochhammer(&-qx, q, cfg)
}

/// Jackson integral `∫_{-1}^{1} f d_q x = (1-q) Σ_{n≥0} q^n [f(q^n) + f(-q^n)]`.
///
/// `sup` bounds `|f|` on `[-1, 1]`. The tail beyond `M` terms is at most
/// `2 sup q^M`; summation stops once that is below `tail_tol` relative to the
/// partial sum, or below `tail_tol²` absolutely.
pub fn q_integral<T: RealScalar>(f: impl Fn(&T) -> T, q: &T, sup: &T, cfg: &NumericConfig) -> T {
    jackson_sum(|_, x| f(x), q, sup, cfg)
}

fn jackson_sum<T: RealScalar>(
    mut f: impl FnMut(usize, &T) -> T,
    q: &T,
    sup: &T,
    cfg: &NumericConfig,
) -> T {
    let tol: T = cfg.scalar(&cfg.tail_tol);
    let floor = tol.clone() * tol.clone();
    let two_sup = T::from_i64(2) * sup.abs();
    let mut sum = T::zero();
    let mut qn = T::one();
    let mut m = 0;
    loop {
        let value = f(m, &qn) + f(m, &-qn.clone());
        sum = sum + qn.clone() * value;
        qn = qn * q.clone();
        m += 1;
        let tail = two_sup.clone() * qn.clone();
        if tail <= tol.clone() * sum.abs() || qn <= floor {
            break;
        }
    }
    (T::one() - q.clone()) * sum
}

/// `∫_{-1}^{1} p(x) w(x) d_q x` for a polynomial with exact coefficients.
///
/// The weight at `±q^m` is `W_m = (q^{m+1};q)_∞(-q^{m+1};q)_∞`, obtained from
/// `W_0 = (q²;q²)_∞` through `W_m = W_{m-1} / (1 - q^{2m})`; it never exceeds 1,
/// so `Σ|c_k|` bounds the integrand.
pub fn weighted_poly_integral<T: RealScalar>(p: &Poly<Rational>, q: &Rational, cfg: &NumericConfig) -> T {
    let pt: Poly<T> = p.map(|c| cfg.scalar(c));
    let qt: T = cfg.scalar(q);
    let q2 = qt.clone() * qt.clone();
    let sup = p.coeffs().iter().fold(Rational::zero(), |acc, c| acc + c.abs());
    let sup: T = cfg.scalar(&sup);
    let mut w = inf_pochhammer(&q2, &q2, cfg);
    let mut q2m = T::one();
    jackson_sum(
        move |m, x| {
            // called twice per node, for +q^m and then -q^m
            if m > 0 && *x > T::zero() {
                q2m = q2m.clone() * q2.clone();
                w = w.clone() / (T::one() - q2m.clone());
            }
            pt.eval(x) * w.clone()
        },
        &qt,
        &sup,
        cfg,
    )
}

/// `V = (1-q)(q;q)_∞(-1;q)_∞(-q;q)_∞`, so that `‖H_n‖² = ĥ_n V`.
pub fn norm_constant<T: RealScalar>(q: &Rational, cfg: &NumericConfig) -> T {
    let qt: T = cfg.scalar(q);
    let one = T::one();
    (one.clone() - qt.clone())
        * inf_pochhammer(&qt, &qt, cfg)
        * inf_pochhammer(&-one, &qt, cfg)
        * inf_pochhammer(&-qt.clone(), &qt, cfg)
}

/// Inner-product mass `λ` of a context; an exact `λ̂` is rescaled by `V`.
pub fn context_lambda<T: RealScalar>(ctx: &QContext, cfg: &NumericConfig) -> T {
    match ctx.mass() {
        Mass::Numeric { lambda, .. } => cfg.scalar(lambda),
        Mass::Exact { lambda_hat } => cfg.scalar::<T>(lambda_hat) * norm_constant(ctx.q(), cfg),
    }
}

/// `⟨f, g⟩ = ∫ f g w d_q x + λ D_q^j f(α) D_q^j g(α)`. The derivative values
/// are computed exactly and rounded once.
pub fn sobolev_inner<T: RealScalar>(
    f: &Poly<Rational>,
    g: &Poly<Rational>,
    ctx: &QContext,
    cfg: &NumericConfig,
) -> T {
    let lambda = context_lambda(ctx, cfg);
    sobolev_inner_with(f, g, ctx, &lambda, cfg)
}

fn sobolev_inner_with<T: RealScalar>(
    f: &Poly<Rational>,
    g: &Poly<Rational>,
    ctx: &QContext,
    lambda: &T,
    cfg: &NumericConfig,
) -> T {
    let (q, alpha, j) = (ctx.q(), ctx.alpha(), ctx.j());
    let integral: T = weighted_poly_integral(&(f * g), q, cfg);
    let point = f.dq_iter(q, j).eval(alpha) * g.dq_iter(q, j).eval(alpha);
    integral + lambda.clone() * cfg.scalar::<T>(&point)
}

/// Gram matrix `G[m][n] = ⟨p_m, p_n⟩`.
pub fn gram_matrix<T: RealScalar>(polys: &[Poly<Rational>], ctx: &QContext, cfg: &NumericConfig) -> Vec<Vec<T>> {
    let lambda: T = context_lambda(ctx, cfg);
    let mut g = vec![vec![T::zero(); polys.len()]; polys.len()];
    for m in 0..polys.len() {
        for n in m..polys.len() {
            let v = sobolev_inner_with(&polys[m], &polys[n], ctx, &lambda, cfg);
            g[n][m] = v.clone();
            g[m][n] = v;
        }
    }
    g
}

/// `max_{m≠n} |G[m][n]| / √(G[m][m] G[n][n])`, computed in `f64`.
pub fn max_relative_off_diagonal<T: RealScalar>(gram: &[Vec<T>]) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..gram.len() {
        for n in 0..gram.len() {
            if m != n {
                let scale = (gram[m][m].to_f64() * gram[n][n].to_f64()).sqrt();
                worst = worst.max(gram[m][n].to_f64().abs() / scale);
            }
        }
    }
    worst
}

/// Converts an inner-product mass to `λ̂ = λ / V`, rounded to `digits`
/// significant digits.
pub fn lambda_hat_from_lambda(lambda: &Rational, q: &Rational, digits: u64) -> Result<Rational> {
    let cfg = NumericConfig::with_precision(digits.max(MIN_PRECISION) + 10)?;
    let v: BigFloat = norm_constant(q, &cfg);
    Ok(crate::scalar::round_rational(&(lambda / v.to_rational()), digits))
}
