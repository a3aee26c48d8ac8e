//! Truncated shifted power series and the operators that act on them.
//!
//! A [`PowerSeries`] is `x^shift · (c_0 + c_1 x + … + c_{L-1} x^{L-1})`
//! together with the promise that every exponent below
//! `known_to = shift + L` is determined. Coefficients at or past `known_to`
//! are unknown, never zero: operations that shorten a series (most notably
//! [`u_apply`], which keeps one coefficient in `n`) shrink `known_to`
//! accordingly instead of padding.
//!
//! The Hecke pair acts on coefficient sequences:
//!
//! ```text
//! (U_n f)(x) = Σ c_{nk} x^k          (V_n f)(x) = f(x^n)
//! ```
//!
//! Inner products are returned as the coefficient sequence of the
//! polynomial in `R²` multiplying `2πi`; the `2πi` is never stored.

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{GaussianRational, Rational};

/// Truncation order used when the caller does not pick one.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("invalid operator index n = {0}; n must be at least 1")]
    InvalidOperator(u64),
    #[error("comparison up to exponent {requested} but only {available} exponents are known")]
    TruncationTooShort { requested: usize, available: usize },
    #[error("invalid series encoding: {0}")]
    Encoding(String),
}

#[derive(Clone)]
pub struct PowerSeries {
    shift: usize,
    coeffs: Vec<GaussianRational>,
}

impl PowerSeries {
    /// `x^shift · Σ coeffs[t] x^t`, known up to `shift + coeffs.len()`.
    pub fn new(shift: usize, coeffs: Vec<GaussianRational>) -> Self {
        PowerSeries { shift, coeffs }
    }

    /// Dense series whose coefficient at `x^e` is `coeffs[e]`.
    pub fn from_dense(coeffs: Vec<GaussianRational>) -> Self {
        PowerSeries::new(0, coeffs)
    }

    /// The zero series known up to `known_to`.
    pub fn zero(known_to: usize) -> Self {
        PowerSeries::new(0, vec![GaussianRational::zero(); known_to])
    }

    /// Builds the window `shift..known_to` from a coefficient function.
    pub fn from_fn(
        shift: usize,
        known_to: usize,
        mut coeff: impl FnMut(usize) -> GaussianRational,
    ) -> Self {
        let shift = shift.min(known_to);
        PowerSeries::new(shift, (shift..known_to).map(&mut coeff).collect())
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn known_to(&self) -> usize {
        self.shift + self.coeffs.len()
    }

    /// Stored window; `coeffs()[t]` multiplies `x^(shift + t)`.
    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    /// Coefficient of `x^e`, or `None` past the truncation boundary.
    pub fn coeff(&self, e: usize) -> Option<GaussianRational> {
        if e < self.shift {
            Some(GaussianRational::zero())
        } else {
            self.coeffs.get(e - self.shift).cloned()
        }
    }

    fn coeff_ref(&self, e: usize) -> Option<&GaussianRational> {
        e.checked_sub(self.shift).and_then(|t| self.coeffs.get(t))
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|t| t + self.shift)
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    /// Moves leading zeros into the shift so it is the true vanishing order.
    /// The zero series becomes shift 0 with an all-zero window.
    pub fn normalized(&self) -> Self {
        match self.first_nonzero() {
            Some(e) => PowerSeries::new(e, self.coeffs[e - self.shift..].to_vec()),
            None => PowerSeries::zero(self.known_to()),
        }
    }

    /// Forgets every coefficient at or past `known_to`.
    pub fn truncate(&self, known_to: usize) -> Self {
        let known_to = known_to.min(self.known_to());
        PowerSeries::from_fn(self.shift, known_to, |e| {
            self.coeffs[e - self.shift].clone()
        })
    }

    /// Coefficients at exponents `0..known_to`, zeros below the shift included.
    pub fn dense(&self) -> Vec<GaussianRational> {
        (0..self.known_to())
            .map(|e| self.coeff(e).expect("in range"))
            .collect()
    }
}

/// Semantic equality: same truncation boundary and the same coefficient at
/// every known exponent, regardless of how the window is stored.
impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.known_to() == other.known_to()
            && (0..self.known_to()).all(|e| self.coeff(e) == other.coeff(e))
    }
}

impl Eq for PowerSeries {}

impl std::fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x^{}·[", self.shift)?;
        for (t, c) in self.coeffs.iter().enumerate() {
            if t > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] + O(x^{})", self.known_to())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    shift: usize,
    known_to: usize,
    coeffs: Vec<(String, String)>,
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesJson {
            shift: self.shift,
            known_to: self.known_to(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (c.re.to_string(), c.im.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SeriesJson::deserialize(deserializer)?;
        if raw.shift + raw.coeffs.len() != raw.known_to {
            return Err(D::Error::custom(SeriesError::Encoding(format!(
                "known_to {} does not equal shift {} plus {} coefficients",
                raw.known_to,
                raw.shift,
                raw.coeffs.len()
            ))));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|(re, im)| {
                Ok(GaussianRational::new(
                    re.parse::<Rational>().map_err(D::Error::custom)?,
                    im.parse::<Rational>().map_err(D::Error::custom)?,
                ))
            })
            .collect::<Result<_, D::Error>>()?;
        Ok(PowerSeries::new(raw.shift, coeffs))
    }
}

fn check_index(n: u64) -> Result<usize, SeriesError> {
    if n == 0 {
        return Err(SeriesError::InvalidOperator(n));
    }
    usize::try_from(n).map_err(|_| SeriesError::InvalidOperator(n))
}

/// `U_n`: the coefficient of `x^m` in the result is the coefficient of
/// `x^{nm}` in `f`.
///
/// For `f = x^j Σ a_k x^k` the result has shift `j/n` when `n | j` and
/// `1 + ⌊j/n⌋` otherwise; it is known up to `⌈known_to / n⌉`.
pub fn u_apply(n: u64, f: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let n = check_index(n)?;
    let known_to = f.known_to().div_ceil(n);
    let shift = f.shift.div_ceil(n);
    Ok(PowerSeries::from_fn(shift, known_to, |m| {
        f.coeff_ref(n * m).expect("n·m below known_to").clone()
    }))
}

/// `V_n f = f(x^n)`.
pub fn v_apply(n: u64, f: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let n = check_index(n)?;
    let known = f.known_to();
    let known_to = if known == 0 { 0 } else { n * (known - 1) + 1 };
    Ok(PowerSeries::from_fn(n * f.shift, known_to, |e| {
        if e % n == 0 {
            f.coeff_ref(e / n).expect("e/n below known_to").clone()
        } else {
            GaussianRational::zero()
        }
    }))
}

/// Coefficientwise product `Σ c_k d_k x^k`.
pub fn hadamard(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let known_to = f.known_to().min(g.known_to());
    PowerSeries::from_fn(f.shift.max(g.shift), known_to, |e| {
        f.coeff_ref(e).expect("known") * g.coeff_ref(e).expect("known")
    })
}

/// Coefficients `s_k = c_k · conj(d_k)` of the polynomial in `R²` such that
/// `⟨f, g⟩_R = 2πi Σ s_k R^{2k}`.
pub fn inner_product(f: &PowerSeries, g: &PowerSeries) -> Vec<GaussianRational> {
    let known_to = f.known_to().min(g.known_to());
    (0..known_to)
        .map(|k| match (f.coeff_ref(k), g.coeff_ref(k)) {
            (Some(c), Some(d)) => c * d.conj(),
            _ => GaussianRational::zero(),
        })
        .collect()
}

/// Checks `⟨f, V_n g⟩_R = ⟨U_n f, g⟩_{R^n}` as polynomials in `R²`.
///
/// The right side is computed in `R` and then re-indexed through
/// `R → R^n`, so its index `k` lands at `n·k`. Both sides are compared on
/// the range where both are known.
pub fn adjoint_check(n: u64, f: &PowerSeries, g: &PowerSeries) -> Result<bool, SeriesError> {
    let step = check_index(n)?;
    let lhs = inner_product(f, &v_apply(n, g)?);
    let rhs = inner_product(&u_apply(n, f)?, g);
    let common = match rhs.len() {
        0 => 0,
        len => lhs.len().min(step * (len - 1) + 1),
    };
    Ok((0..common).all(|k| {
        let expected = if k % step == 0 {
            rhs[k / step].clone()
        } else {
            GaussianRational::zero()
        };
        lhs[k] == expected
    }))
}

/// The Euler operator `x·d/dx`: the coefficient of `x^e` is multiplied by `e`.
pub fn euler_apply(f: &PowerSeries) -> PowerSeries {
    PowerSeries::from_fn(f.shift, f.known_to(), |e| {
        GaussianRational::from_integer(e as u64) * f.coeff_ref(e).expect("known")
    })
    .normalized()
}

/// `Σ_{k≥1} k^i x^k`, known up to `order`.
///
/// `i = -s` gives the polylogarithm `Li_s`; `i ≥ 0` gives
/// `(x·d/dx)^i` applied to `x/(1-x)`.
pub fn polylog_series(i: i64, order: usize) -> PowerSeries {
    PowerSeries::from_fn(1, order, |k| {
        GaussianRational::from_integer(k as u64)
            .pow(i)
            .expect("k ≥ 1 is nonzero")
    })
}

/// `V_n ∘ U_n`: keeps the coefficients at exponents divisible by `n`.
pub fn vnun_projection(n: u64, f: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let step = check_index(n)?;
    Ok(PowerSeries::from_fn(f.shift, f.known_to(), |e| {
        if e % step == 0 {
            f.coeff_ref(e).expect("known").clone()
        } else {
            GaussianRational::zero()
        }
    }))
}

pub fn add(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let known_to = f.known_to().min(g.known_to());
    PowerSeries::from_fn(f.shift.min(g.shift), known_to, |e| {
        f.coeff(e).expect("known") + g.coeff(e).expect("known")
    })
}

pub fn scale(c: &GaussianRational, f: &PowerSeries) -> PowerSeries {
    PowerSeries::new(f.shift, f.coeffs.iter().map(|x| c * x).collect())
}

/// Multiplication by `x^j`.
pub fn shift_by(j: usize, f: &PowerSeries) -> PowerSeries {
    PowerSeries::new(f.shift + j, f.coeffs.clone())
}

/// First exponent below `order` where `f` and `g` differ.
pub fn first_mismatch(
    f: &PowerSeries,
    g: &PowerSeries,
    order: usize,
) -> Result<Option<usize>, SeriesError> {
    let available = f.known_to().min(g.known_to());
    if order > available {
        return Err(SeriesError::TruncationTooShort {
            requested: order,
            available,
        });
    }
    Ok((0..order).find(|&e| f.coeff(e) != g.coeff(e)))
}

/// True when `f` and `g` agree at every exponent below `order`.
pub fn equal_to_order(f: &PowerSeries, g: &PowerSeries, order: usize) -> Result<bool, SeriesError> {
    Ok(first_mismatch(f, g, order)?.is_none())
}

/// `gcd(n, m)` for operator indices.
pub fn index_gcd(n: u64, m: u64) -> u64 {
    n.gcd(&m)
}
