//! Closed-form action of `U_n` on `x^j · pFq`.
//!
//! Splitting every Pochhammer symbol along residue classes mod `n` turns
//! `U_n(x^j · pFq(a; b; x))` back into a single hypergeometric term with
//! `n·p` upper and `n·(q+1)` materialized lower parameters:
//!
//! * `n | j`: shift `j/n`, parameters `(a + l − 1)/n` for `l = 1..n`.
//! * `n ∤ j`: shift `1 + ⌊j/n⌋`, parameters `(a + r + l)/n` where
//!   `r = n − 1 − (j mod n)`, and the constant picks up
//!   `s^{r+1} ∏(a_i)_{r+1} / ∏(b_i)_{r+1}` from the leftover factors.
//!
//! In both cases the argument scale becomes `s^n · n^{n(p−q−1)}`, which is
//! just `s^n` for balanced terms.

use serde::Serialize;
use thiserror::Error;

use crate::arith::GaussianRational;
use crate::hyper::{offset_r, pochhammer, HyperError, HypergeometricTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("operator index must be at least 1")]
    ZeroIndex,
    #[error("n = {n} divides j = {j}; use the divisible-case map")]
    InvalidOperator { n: u64, j: u64 },
    #[error("lower parameter b = {b} with l = {l} maps to the nonpositive integer {value}")]
    InvalidParameter {
        b: Box<GaussianRational>,
        l: u64,
        value: Box<GaussianRational>,
    },
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

/// Both parameter lists after the map, lower list k! slot included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedParameters {
    pub upper: Vec<GaussianRational>,
    pub lower_full: Vec<GaussianRational>,
}

/// `(p + base + l)/n` for every parameter `p` and `l = 1..n`, tagged with
/// the parameter index and `l`.
fn spread(
    params: &[GaussianRational],
    n: u64,
    base: i64,
) -> impl Iterator<Item = (usize, u64, GaussianRational)> + '_ {
    let inv_n = GaussianRational::from_integer(n).recip().expect("n ≥ 1");
    params.iter().enumerate().flat_map(move |(i, p)| {
        let inv_n = inv_n.clone();
        (1..=n).map(move |l| {
            let value = (p + GaussianRational::from_integer(base + l as i64)) * &inv_n;
            (i, l, value)
        })
    })
}

fn map_lists(
    upper: &[GaussianRational],
    lower_full: &[GaussianRational],
    n: u64,
    base: i64,
) -> Result<MappedParameters, TransformError> {
    let upper = spread(upper, n, base).map(|(_, _, c)| c).collect();
    let lower_full = spread(lower_full, n, base)
        .map(|(i, l, d)| {
            if d.is_nonpositive_integer() {
                Err(TransformError::InvalidParameter {
                    b: Box::new(lower_full[i].clone()),
                    l,
                    value: Box::new(d),
                })
            } else {
                Ok(d)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MappedParameters { upper, lower_full })
}

/// Parameter map for `n | j`: each `a` becomes `(a + l − 1)/n`, `l = 1..n`.
///
/// The k! slot `1` maps to `1/n, …, (n−1)/n, 1`, and that final `1` serves
/// as the k! slot of the output, so the output lower list has `n(q+1)`
/// entries of which `n(q+1) − 1` are genuine denominators.
pub fn parameter_map_divides(
    upper: &[GaussianRational],
    lower_full: &[GaussianRational],
    n: u64,
) -> Result<MappedParameters, TransformError> {
    if n == 0 {
        return Err(TransformError::ZeroIndex);
    }
    map_lists(upper, lower_full, n, -1)
}

/// Parameter map for `n ∤ j`: each `a` becomes `(a + r + l)/n`, `l = 1..n`,
/// with `r = n − 1 − (j mod n)`. Returns the map together with `r`.
pub fn parameter_map_nondivides(
    upper: &[GaussianRational],
    lower_full: &[GaussianRational],
    n: u64,
    j: u64,
) -> Result<(MappedParameters, u64), TransformError> {
    if n == 0 {
        return Err(TransformError::ZeroIndex);
    }
    if j.is_multiple_of(n) {
        return Err(TransformError::InvalidOperator { n, j });
    }
    let r = offset_r(n, j);
    Ok((map_lists(upper, lower_full, n, r as i64)?, r))
}

/// Outcome of [`u_closed_form`]. `output` is not normalized, so its lists
/// have exactly the `n·p` / `n·(q+1)` shape produced by the parameter map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub n: u64,
    pub case_divides: bool,
    /// `n − 1 − (j mod n)` when `n ∤ j`, otherwise 0.
    pub r: u64,
    pub input: HypergeometricTerm,
    pub output: HypergeometricTerm,
}

/// `U_n` applied to a hypergeometric term, in closed form.
///
/// The output generates exactly the series `u_apply(n, to_series(t, …))`.
pub fn u_closed_form(n: u64, t: &HypergeometricTerm) -> Result<TransformReport, TransformError> {
    if n == 0 {
        return Err(TransformError::ZeroIndex);
    }
    let j = t.shift() as u64;
    let p = t.upper().len() as i64;
    let q_plus_1 = t.lower_full().len() as i64;
    let s = t.arg_scale();
    let nq = GaussianRational::from_integer(n);
    let arg_scale =
        s.pow(n as i64).expect("s ≠ 0") * nq.pow(n as i64 * (p - q_plus_1)).expect("n ≥ 1");

    let case_divides = j.is_multiple_of(n);
    let (mapped, r, shift, c0) = if case_divides {
        let mapped = parameter_map_divides(t.upper(), t.lower_full(), n)?;
        (mapped, 0, j / n, t.c0().clone())
    } else {
        let (mapped, r) = parameter_map_nondivides(t.upper(), t.lower_full(), n, j)?;
        // The kept coefficients start at index r+1 of the input, so the
        // first r+1 factors of every Pochhammer symbol and of s^k move
        // into the constant.
        let head: GaussianRational = t.upper().iter().map(|a| pochhammer(a, r + 1)).product();
        let foot: GaussianRational = t
            .lower_full()
            .iter()
            .map(|b| pochhammer(b, r + 1))
            .product();
        let c0 = t.c0() * s.pow(r as i64 + 1).expect("s ≠ 0") * head / foot;
        (mapped, r, 1 + j / n, c0)
    };
    let output = HypergeometricTerm::new(
        c0,
        shift as usize,
        mapped.upper,
        mapped.lower_full,
        arg_scale,
    )?;
    Ok(TransformReport {
        n,
        case_divides,
        r,
        input: t.clone(),
        output,
    })
}

/// Checks `Σc − Σd = Σa − Σb + (n−1)(p−q−1)/2` for the divisible case.
///
/// The identity is insensitive to whether the k! slot is counted, since it
/// contributes 1 to both `Σb` and `Σd`; the materialized lists are used.
pub fn sum_invariant_check(t: &HypergeometricTerm, n: u64) -> Result<bool, TransformError> {
    let j = t.shift() as u64;
    if n == 0 {
        return Err(TransformError::ZeroIndex);
    }
    if !j.is_multiple_of(n) {
        return Err(TransformError::InvalidOperator { n, j });
    }
    let mapped = parameter_map_divides(t.upper(), t.lower_full(), n)?;
    let sum = |v: &[GaussianRational]| v.iter().cloned().sum::<GaussianRational>();
    let lhs = sum(&mapped.upper) - sum(&mapped.lower_full);
    let p = t.upper().len() as i64;
    let q = t.lower_full().len() as i64 - 1;
    let correction = GaussianRational::from_ratio((n as i64 - 1) * (p - q - 1), 2).expect("2 ≠ 0");
    let rhs = sum(t.upper()) - sum(t.lower_full()) + correction;
    Ok(lhs == rhs)
}
