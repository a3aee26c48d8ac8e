//! Pochhammer symbols and symbolic hypergeometric terms.
//!
//! A [`HypergeometricTerm`] stands for
//!
//! ```text
//! c0 · x^j · Σ_k (a_1)_k ⋯ (a_p)_k / ((b_1)_k ⋯ (b_{q+1})_k) · (s·x)^k
//! ```
//!
//! where the lower list always carries the entry `b_{q+1} = 1` that
//! absorbs the `k!` of the usual `pFq` normalization. That entry is called
//! the k! slot below. Keeping it materialized means every coefficient is a
//! plain ratio of Pochhammer products and the closed-form `U_n` action can
//! map it like any other lower parameter.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::GaussianRational;
use crate::series::PowerSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("lower parameter b{index} = {value} is a nonpositive integer")]
    InvalidParameter {
        index: usize,
        value: Box<GaussianRational>,
    },
    #[error("lower parameter list has no entry equal to 1 for the k! slot")]
    MissingFactorialSlot,
    #[error("argument scale must be nonzero")]
    ZeroArgScale,
    #[error("n = {n} divides j = {j}; the offset split needs n ∤ j")]
    InvalidOperator { n: u64, j: u64 },
    #[error("invalid term encoding: {0}")]
    Encoding(String),
}

/// Ascending factorial `(a)_k = a(a+1)⋯(a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &GaussianRational, k: u64) -> GaussianRational {
    (0..k)
        .map(|i| a + GaussianRational::from_integer(i))
        .product()
}

/// `n^{kn} · ∏_{j=0}^{n-1} ((a+j)/n)_k`, which equals `(a)_{kn}`.
pub fn pochhammer_split(a: &GaussianRational, n: u64, k: u64) -> GaussianRational {
    let nq = GaussianRational::from_integer(n);
    let scale = nq.pow((k * n) as i64).expect("n ≥ 1");
    let inv_n = nq.recip().expect("n ≥ 1");
    (0..n)
        .map(|j| pochhammer(&((a + GaussianRational::from_integer(j)) * &inv_n), k))
        .fold(scale, |acc, x| acc * x)
}

/// The offset between consecutive kept exponents when `n ∤ j`:
/// `r = n(1 − {j/n}) − 1 = n − 1 − (j mod n)`.
pub fn offset_r(n: u64, j: u64) -> u64 {
    n - 1 - (j % n)
}

/// `n^{nk} · (a)_{r+1} · ∏_{i=r+1}^{r+n} ((a+i)/n)_k` with `r = offset_r(n, j)`,
/// which equals `(a)_N` for `N = n(k+1) − (j mod n)`.
pub fn pochhammer_offset(
    a: &GaussianRational,
    n: u64,
    k: u64,
    j: u64,
) -> Result<GaussianRational, HyperError> {
    if n == 0 || j.is_multiple_of(n) {
        return Err(HyperError::InvalidOperator { n, j });
    }
    let r = offset_r(n, j);
    let nq = GaussianRational::from_integer(n);
    let inv_n = nq.recip().expect("n ≥ 1");
    let head = nq.pow((n * k) as i64).expect("n ≥ 1") * pochhammer(a, r + 1);
    Ok((r + 1..=r + n)
        .map(|i| pochhammer(&((a + GaussianRational::from_integer(i)) * &inv_n), k))
        .fold(head, |acc, x| acc * x))
}

/// Counts of parameters equal to 1, upper (`gamma_a`) and lower (`gamma_b`,
/// k! slot included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCounts {
    pub gamma_a: usize,
    pub gamma_b: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HypergeometricTerm {
    c0: GaussianRational,
    shift: usize,
    upper: Vec<GaussianRational>,
    lower_full: Vec<GaussianRational>,
    arg_scale: GaussianRational,
}

impl HypergeometricTerm {
    /// Builds a term from the materialized lower list (k! slot included).
    pub fn new(
        c0: GaussianRational,
        shift: usize,
        upper: Vec<GaussianRational>,
        lower_full: Vec<GaussianRational>,
        arg_scale: GaussianRational,
    ) -> Result<Self, HyperError> {
        validate_lower(&lower_full)?;
        if !lower_full.iter().any(GaussianRational::is_one) {
            return Err(HyperError::MissingFactorialSlot);
        }
        if arg_scale.is_zero() {
            return Err(HyperError::ZeroArgScale);
        }
        Ok(HypergeometricTerm {
            c0,
            shift,
            upper,
            lower_full,
            arg_scale,
        })
    }

    /// `x^shift · pFq(upper; lower; x)` in textbook form: `lower` omits the
    /// k! slot, which is appended here.
    pub fn pfq(
        shift: usize,
        upper: Vec<GaussianRational>,
        mut lower: Vec<GaussianRational>,
    ) -> Result<Self, HyperError> {
        lower.push(GaussianRational::one());
        HypergeometricTerm::new(
            GaussianRational::one(),
            shift,
            upper,
            lower,
            GaussianRational::one(),
        )
    }

    /// `1/(1−x) = 1F0(1;;x)`.
    pub fn geometric() -> Self {
        HypergeometricTerm::pfq(0, vec![GaussianRational::one()], vec![]).expect("valid")
    }

    /// `Σ_{k≥1} k^i x^k` as `x · pFq`.
    ///
    /// For `i = -a < 0` this is `x · (1,…,1 [a+1 times]; 2,…,2 [a times])`;
    /// for `i = a > 0` it is `x · (2,…,2 [a times]; 1,…,1 [a-1 times])`;
    /// `i = 0` is `x/(1−x)`.
    pub fn polylog(i: i64) -> Self {
        let one = GaussianRational::one;
        let two = || GaussianRational::from_integer(2);
        let a = i.unsigned_abs() as usize;
        let (upper, lower) = if i > 0 {
            (vec![two(); a], vec![one(); a - 1])
        } else {
            (vec![one(); a + 1], vec![two(); a])
        };
        HypergeometricTerm::pfq(1, upper, lower).expect("valid")
    }

    pub fn c0(&self) -> &GaussianRational {
        &self.c0
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn upper(&self) -> &[GaussianRational] {
        &self.upper
    }

    /// Lower parameters with the k! slot included.
    pub fn lower_full(&self) -> &[GaussianRational] {
        &self.lower_full
    }

    pub fn arg_scale(&self) -> &GaussianRational {
        &self.arg_scale
    }

    pub fn with_c0(&self, c0: GaussianRational) -> Self {
        HypergeometricTerm { c0, ..self.clone() }
    }

    pub fn with_shift(&self, shift: usize) -> Self {
        HypergeometricTerm {
            shift,
            ..self.clone()
        }
    }

    /// Lower parameters in textbook form: one entry equal to 1 removed.
    pub fn lower_textbook(&self) -> Vec<GaussianRational> {
        let mut lower = self.lower_full.clone();
        let slot = lower
            .iter()
            .rposition(GaussianRational::is_one)
            .expect("k! slot present");
        lower.remove(slot);
        lower
    }

    /// True when the series is a polynomial: some upper parameter is a
    /// nonpositive integer, or the constant is zero.
    pub fn is_terminating(&self) -> bool {
        self.c0.is_zero()
            || self
                .upper
                .iter()
                .any(GaussianRational::is_nonpositive_integer)
    }
}

fn validate_lower(lower: &[GaussianRational]) -> Result<(), HyperError> {
    match lower
        .iter()
        .position(GaussianRational::is_nonpositive_integer)
    {
        Some(index) => Err(HyperError::InvalidParameter {
            index: index + 1,
            value: Box::new(lower[index].clone()),
        }),
        None => Ok(()),
    }
}

impl std::fmt::Debug for HypergeometricTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}·x^{}·F({:?}; {:?}; {}·x)",
            self.c0, self.shift, self.upper, self.lower_full, self.arg_scale
        )
    }
}

/// Coefficient of `x^{j+k}`: `c0 · s^k · ∏(a_i)_k / ∏(b_i)_k`.
pub fn coefficient(t: &HypergeometricTerm, k: u64) -> GaussianRational {
    let num: GaussianRational = t.upper.iter().map(|a| pochhammer(a, k)).product();
    let den: GaussianRational = t.lower_full.iter().map(|b| pochhammer(b, k)).product();
    let s_k = t.arg_scale.pow(k as i64).expect("arg_scale is nonzero");
    &t.c0 * s_k * num / den
}

/// Coefficients `0..count` of the term, via the ratio recurrence
/// `c_{k+1} = c_k · s · ∏(a_i+k) / ∏(b_i+k)`.
pub fn coefficients(t: &HypergeometricTerm, count: usize) -> Vec<GaussianRational> {
    let mut out = Vec::with_capacity(count);
    let mut current = t.c0.clone();
    for k in 0..count {
        if k > 0 {
            let shift = GaussianRational::from_integer((k - 1) as u64);
            let num: GaussianRational = t.upper.iter().map(|a| a + &shift).product();
            let den: GaussianRational = t.lower_full.iter().map(|b| b + &shift).product();
            current = current * &t.arg_scale * num / den;
        }
        out.push(current.clone());
    }
    out
}

/// The term as a power series with `order` coefficients after the shift.
pub fn to_series(t: &HypergeometricTerm, order: usize) -> PowerSeries {
    PowerSeries::new(t.shift, coefficients(t, order))
}

/// The term as a power series known up to exponent `known_to`.
pub fn to_series_known_to(t: &HypergeometricTerm, known_to: usize) -> PowerSeries {
    if known_to <= t.shift {
        return PowerSeries::new(known_to, Vec::new());
    }
    to_series(t, known_to - t.shift)
}

/// Cancels equal upper/lower pairs and sorts both lists canonically.
///
/// One lower entry equal to 1 is reserved as the k! slot before cancelling,
/// so the generated series never changes.
pub fn normalize(t: &HypergeometricTerm) -> HypergeometricTerm {
    let mut lower = t.lower_textbook();
    let mut upper = t.upper.clone();
    upper.sort();
    lower.sort();
    let (mut kept_upper, mut kept_lower) = (Vec::new(), Vec::new());
    let (mut ui, mut li) = (0, 0);
    while ui < upper.len() && li < lower.len() {
        match upper[ui].cmp(&lower[li]) {
            std::cmp::Ordering::Less => {
                kept_upper.push(upper[ui].clone());
                ui += 1;
            }
            std::cmp::Ordering::Greater => {
                kept_lower.push(lower[li].clone());
                li += 1;
            }
            std::cmp::Ordering::Equal => {
                ui += 1;
                li += 1;
            }
        }
    }
    kept_upper.extend_from_slice(&upper[ui..]);
    kept_lower.extend_from_slice(&lower[li..]);
    kept_lower.push(GaussianRational::one());
    kept_lower.sort();
    HypergeometricTerm {
        c0: t.c0.clone(),
        shift: t.shift,
        upper: kept_upper,
        lower_full: kept_lower,
        arg_scale: t.arg_scale.clone(),
    }
}

pub fn gamma_counts(t: &HypergeometricTerm) -> GammaCounts {
    let ones = |params: &[GaussianRational]| params.iter().filter(|p| p.is_one()).count();
    GammaCounts {
        gamma_a: ones(&t.upper),
        gamma_b: ones(&t.lower_full),
    }
}

/// `Σ upper − Σ lower_full`.
pub fn param_sum_delta(t: &HypergeometricTerm) -> GaussianRational {
    t.upper.iter().cloned().sum::<GaussianRational>()
        - t.lower_full.iter().cloned().sum::<GaussianRational>()
}

/// `p = q + 1`, i.e. as many upper parameters as materialized lower ones.
pub fn is_balanced(t: &HypergeometricTerm) -> bool {
    t.upper.len() == t.lower_full.len()
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c0: String,
    shift: usize,
    upper: Vec<String>,
    lower: Vec<String>,
    arg_scale: String,
}

impl Serialize for HypergeometricTerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let text = |v: &[GaussianRational]| v.iter().map(|x| x.to_string()).collect();
        TermJson {
            c0: self.c0.to_string(),
            shift: self.shift,
            upper: text(&self.upper),
            lower: text(&self.lower_full),
            arg_scale: self.arg_scale.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HypergeometricTerm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = TermJson::deserialize(deserializer)?;
        let scalar = |s: &str| s.parse::<GaussianRational>().map_err(D::Error::custom);
        let list = |v: &[String]| v.iter().map(|s| scalar(s)).collect::<Result<Vec<_>, _>>();
        HypergeometricTerm::new(
            scalar(&raw.c0)?,
            raw.shift,
            list(&raw.upper)?,
            list(&raw.lower)?,
            scalar(&raw.arg_scale)?,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn qs(items: &[&str]) -> Vec<GaussianRational> {
        items.iter().map(|s| q(s)).collect()
    }

    fn term(shift: usize, upper: &[&str], lower_full: &[&str]) -> HypergeometricTerm {
        HypergeometricTerm::new(q("1"), shift, qs(upper), qs(lower_full), q("1")).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&q("1"), 4), q("24"));
        assert_eq!(pochhammer(&q("0"), 3), q("0"));
        assert_eq!(pochhammer(&q("3"), 4), q("360"));
        assert_eq!(pochhammer(&q("1/2+1*i"), 0), q("1"));
    }

    #[test]
    fn split_examples() {
        // 2^4 · (1/2)_2 · (1)_2 = 16 · 3/4 · 2
        assert_eq!(pochhammer_split(&q("1"), 2, 2), q("24"));
        assert_eq!(pochhammer_split(&q("5/3"), 1, 4), pochhammer(&q("5/3"), 4));
        assert_eq!(pochhammer_split(&q("5/3"), 4, 0), q("1"));
    }

    #[test]
    fn offset_examples() {
        assert_eq!(offset_r(2, 1), 0);
        assert_eq!(pochhammer_offset(&q("1"), 2, 1, 1).unwrap(), q("6"));
        assert_eq!(pochhammer_offset(&q("1/2"), 3, 0, 2).unwrap(), q("1/2"));
        // k = 0 leaves (a)_{r+1}: n = 5, j = 2 gives r = 2
        assert_eq!(
            pochhammer_offset(&q("2/7"), 5, 0, 2).unwrap(),
            pochhammer(&q("2/7"), 3)
        );
        assert_eq!(
            pochhammer_offset(&q("1"), 3, 1, 6),
            Err(HyperError::InvalidOperator { n: 3, j: 6 })
        );
    }

    #[test]
    fn dilogarithm_coefficients() {
        let li2 = term(1, &["1", "1", "1"], &["2", "2", "1"]);
        assert_eq!(coefficient(&li2, 3), q("1/16"));
        assert_eq!(coefficient(&li2, 0), q("1"));
        assert_eq!(li2, HypergeometricTerm::polylog(-2));
        let zero_top = term(0, &["0", "5"], &["1"]);
        assert!((1..6).all(|k| coefficient(&zero_top, k).is_zero()));
    }

    #[test]
    fn series_examples() {
        let exp = term(0, &["7/3"], &["7/3", "1"]);
        assert_eq!(
            to_series(&exp, 4).coeffs(),
            &qs(&["1", "1", "1/2", "1/6"])[..]
        );
        let squares = term(1, &["2", "2"], &["1", "1"]);
        assert_eq!(to_series(&squares, 3).coeffs(), &qs(&["1", "4", "9"])[..]);
        let geom = term(0, &["1"], &["1"]);
        assert_eq!(to_series(&geom, 5).coeffs(), &qs(&["1"; 5])[..]);
        assert_eq!(to_series_known_to(&squares, 4).known_to(), 4);
    }

    #[test]
    fn normalize_examples() {
        let t = term(0, &["5/7", "3/2"], &["3/2", "1"]);
        let n = normalize(&t);
        assert_eq!(n.upper(), &qs(&["5/7"])[..]);
        assert_eq!(n.lower_full(), &qs(&["1"])[..]);
        // (1)_k² / (1)_k = k!: the lone 1 below is the k! slot and stays.
        let t = term(0, &["1", "1"], &["1"]);
        let n = normalize(&t);
        assert_eq!(n, t);
        assert_eq!(to_series(&n, 10), to_series(&t, 10));
        // a second lower 1 does cancel
        let t = term(0, &["1", "1"], &["1", "1"]);
        assert_eq!(normalize(&t), term(0, &["1"], &["1"]));
        assert_eq!(normalize(&normalize(&t)), normalize(&t));
    }

    #[test]
    fn gamma_and_sums() {
        let li2 = HypergeometricTerm::polylog(-2);
        let squares = term(1, &["2", "2"], &["1", "1"]);
        let bare = term(0, &[], &["1"]);
        assert_eq!(
            gamma_counts(&li2),
            GammaCounts {
                gamma_a: 3,
                gamma_b: 1
            }
        );
        assert_eq!(
            gamma_counts(&squares),
            GammaCounts {
                gamma_a: 0,
                gamma_b: 2
            }
        );
        assert_eq!(
            gamma_counts(&bare),
            GammaCounts {
                gamma_a: 0,
                gamma_b: 1
            }
        );
        assert_eq!(param_sum_delta(&li2), q("-2"));
        assert_eq!(param_sum_delta(&squares), q("2"));
        assert!(is_balanced(&li2));
        assert!(!is_balanced(&term(0, &["7/3"], &["7/3", "1"])));
        assert!(!is_balanced(&bare));
    }

    #[test]
    fn validation() {
        assert_eq!(
            HypergeometricTerm::new(q("1"), 0, vec![], qs(&["1", "-2"]), q("1")),
            Err(HyperError::InvalidParameter {
                index: 2,
                value: Box::new(q("-2"))
            })
        );
        assert_eq!(
            HypergeometricTerm::new(q("1"), 0, vec![], qs(&["2"]), q("1")),
            Err(HyperError::MissingFactorialSlot)
        );
        assert_eq!(
            HypergeometricTerm::new(q("1"), 0, vec![], qs(&["1"]), q("0")),
            Err(HyperError::ZeroArgScale)
        );
        // upper parameters may terminate the series
        assert!(HypergeometricTerm::new(q("1"), 0, qs(&["-3"]), qs(&["1"]), q("1")).is_ok());
    }

    #[test]
    fn json_encoding() {
        let t = HypergeometricTerm::new(q("2"), 3, qs(&["1/2"]), qs(&["1"]), q("1*i")).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(
            text,
            r#"{"c0":"2","shift":3,"upper":["1/2"],"lower":["1"],"arg_scale":"1*i"}"#
        );
        assert_eq!(
            serde_json::from_str::<HypergeometricTerm>(&text).unwrap(),
            t
        );
        assert!(serde_json::from_str::<HypergeometricTerm>(
            r#"{"c0":"1","shift":0,"upper":[],"lower":["0","1"],"arg_scale":"1"}"#
        )
        .is_err());
    }

    fn arb_param() -> impl Strategy<Value = GaussianRational> {
        (-9i64..=9, 1i64..=9, 0i64..=1).prop_map(|(n, d, im)| {
            GaussianRational::new(
                crate::Rational::new(n, d).unwrap(),
                crate::Rational::from_integer(im),
            )
        })
    }

    fn arb_lower() -> impl Strategy<Value = GaussianRational> {
        arb_param().prop_filter("valid lower", |b| !b.is_nonpositive_integer())
    }

    fn arb_term() -> impl Strategy<Value = HypergeometricTerm> {
        // Parameters come from a small pool so cancellations actually happen.
        let pool = prop::collection::vec(arb_lower(), 1..4);
        (
            pool,
            0usize..4,
            prop::collection::vec((any::<bool>(), 0usize..4), 0..5),
        )
            .prop_flat_map(|(pool, shift, picks)| {
                let pick = |i: usize| pool[i % pool.len()].clone();
                let mut upper = Vec::new();
                let mut lower = Vec::new();
                for (top, i) in picks {
                    if top {
                        upper.push(pick(i));
                    } else {
                        lower.push(pick(i));
                    }
                }
                lower.push(GaussianRational::one());
                Just(HypergeometricTerm::new(q("3/2"), shift, upper, lower, q("-1/2")).unwrap())
            })
    }

    proptest! {
        #[test]
        fn split_matches_direct(a in arb_param(), n in 1u64..=8, k in 0u64..=10) {
            prop_assert_eq!(pochhammer_split(&a, n, k), pochhammer(&a, n * k));
        }

        #[test]
        fn offset_matches_direct(a in arb_param(), n in 2u64..=8, k in 0u64..=10, j in 0u64..40) {
            prop_assume!(j % n != 0);
            let big_n = n * (k + 1) - j % n;
            prop_assert_eq!(pochhammer_offset(&a, n, k, j).unwrap(), pochhammer(&a, big_n));
        }

        #[test]
        fn recurrence_and_shift_relation(c in arb_lower(), k in 0u64..=12) {
            let next = pochhammer(&c, k + 1);
            prop_assert_eq!(next, pochhammer(&c, k) * (&c + GaussianRational::from_integer(k)));
            // k + c = c (c+1)_k / (c)_k
            let c1 = &c + GaussianRational::one();
            let rhs = &c * pochhammer(&c1, k) / pochhammer(&c, k);
            prop_assert_eq!(GaussianRational::from_integer(k) + &c, rhs);
        }

        #[test]
        fn normalize_preserves_series(t in arb_term()) {
            let n = normalize(&t);
            prop_assert_eq!(to_series(&n, 40), to_series(&t, 40));
            prop_assert_eq!(normalize(&n), n.clone());
            // only (1,1) pairs beyond the slot can change the gamma counts,
            // and they change both by the same amount
            let (g, h) = (gamma_counts(&t), gamma_counts(&n));
            prop_assert_eq!(g.gamma_a - h.gamma_a, g.gamma_b - h.gamma_b);
        }

        #[test]
        fn direct_coefficients_match_recurrence(t in arb_term()) {
            let fast = coefficients(&t, 12);
            for (k, c) in fast.iter().enumerate() {
                prop_assert_eq!(c, &coefficient(&t, k as u64));
            }
        }
    }
}
