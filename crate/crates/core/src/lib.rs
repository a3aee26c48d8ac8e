//! Exact Hecke operators on power series and hypergeometric functions.
//!
//! The operators
//!
//! ```text
//! (U_n f)(x) = Σ c_{nk} x^k            (V_n f)(x) = f(x^n)
//! ```
//!
//! act on truncated power series ([`series`]) and, in closed form, on
//! hypergeometric terms `c0 · x^j · pFq(a; b; s·x)` ([`hyper`], [`hecke`]).
//! [`spectral`] decides which hypergeometric terms are eigenfunctions of
//! `U_n`, and [`lang`] is a small expression language over all of it.
//!
//! All arithmetic is exact over the Gaussian rationals ([`arith`]).

pub mod arith;
pub mod hecke;
pub mod hyper;
pub mod lang;
pub mod series;
pub mod spectral;

pub use arith::{ArithError, GaussianRational, Rational};
pub use hecke::{u_closed_form, TransformError, TransformReport};
pub use hyper::{GammaCounts, HyperError, HypergeometricTerm};
pub use lang::{eval_series, eval_symbolic, parse, Expr, LangError, ParseError};
pub use series::{PowerSeries, SeriesError};
pub use spectral::{EigenClass, EigenReport, SpectralError};
