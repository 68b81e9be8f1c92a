//! Exact and high-precision computation with discrete q-Hermite I
//! polynomials and their Sobolev-type modification.
//!
//! The algebra is generic over [`Field`]. Identity verification uses
//! [`Rational`] (the `Exact*` aliases below); the numeric layer uses
//! [`BigFloat`].

pub mod error;
pub mod kernels;
pub mod numeval;
pub mod poly;
pub mod qcore;
pub mod qhermite;
pub mod ratfunc;
pub mod scalar;
pub mod sobolev;

pub use error::{Error, Result};
pub use numeval::NumericConfig;
pub use poly::Poly;
pub use qcore::{Mass, QContext};
pub use qhermite::HermiteFamily;
pub use ratfunc::RatFunc;
pub use scalar::{BigFloat, Field, RealScalar, Rational};
pub use sobolev::{Identity, SobolevFamily};

pub type ExactPoly = Poly<Rational>;
pub type ExactRatFunc = RatFunc<Rational>;
pub type ExactHermiteFamily = HermiteFamily<Rational>;
pub type ExactSobolevFamily = SobolevFamily<Rational>;
pub type Poly64 = Poly<f64>;
pub type HermiteFamily64 = HermiteFamily<f64>;
