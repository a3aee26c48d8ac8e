//! Eigenfunctions of `U_n` among hypergeometric terms.
//!
//! Up to a nonzero constant, the only non-terminating terms `x^j · pFq`
//! with `U_n f = λ f` are
//!
//! * the geometric series `1/(1−x)` (`j = 0`, `λ = 1`),
//! * `Σ k^{−a} x^k = x · F(1,…,1; 2,…,2, 1)` with `λ = n^{−a}`,
//! * `Σ k^a x^k = x · F(2,…,2; 1,…,1)` with `λ = n^a`.
//!
//! [`eigen_classify`] recognizes these shapes structurally and refuses to
//! answer unless three independent routes to `λ` agree: `n^{γ_b − γ_a}`,
//! the ratio `∏(a_i)_{n−1} / ∏(b_i)_{n−1}`, and a direct coefficient check
//! on the expanded series ([`eigen_check_numeric`]).

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{ArithError, GaussianRational};
use crate::hyper::{
    gamma_counts, is_balanced, normalize, pochhammer, to_series_known_to, GammaCounts, HyperError,
    HypergeometricTerm,
};
use crate::series::{polylog_series, scale, u_apply, PowerSeries, SeriesError};

/// Coefficients compared by the numeric cross-check in [`eigen_classify`].
pub const CHECK_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("the series has no nonzero known coefficient")]
    ZeroSeries,
    #[error("only {0} coefficients can be compared; need at least 2 past the leading one")]
    InsufficientOrder(usize),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("internal disagreement: {0}")]
    Disagreement(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Outcome of testing `U_n f = λ f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenReport {
    pub is_eigen: bool,
    pub eigenvalue: Option<GaussianRational>,
    pub gamma: Option<GammaCounts>,
    /// First exponent `k` with `c_{nk} ≠ λ c_k`.
    pub witness: Option<usize>,
    pub checked_to: usize,
}

impl Serialize for EigenReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("is_eigen", &self.is_eigen)?;
        if let Some(lambda) = &self.eigenvalue {
            map.serialize_entry("eigenvalue", &lambda.to_string())?;
        }
        if let Some(g) = &self.gamma {
            map.serialize_entry("gamma_a", &g.gamma_a)?;
            map.serialize_entry("gamma_b", &g.gamma_b)?;
        }
        if let Some(w) = self.witness {
            map.serialize_entry("witness", &w)?;
        }
        map.serialize_entry("checked_to", &self.checked_to)?;
        map.end()
    }
}

/// Structural class of a hypergeometric eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClass {
    /// `Σ k^a x^k`, `a ≥ 1`: upper all 2, lower all 1.
    RationalEuler(u32),
    /// `Σ k^{−a} x^k`, `a ≥ 0`: upper all 1, lower all 2 plus the k! slot.
    Polylog(u32),
    /// `1/(1−x)`.
    Geometric,
    NotEigen,
}

impl EigenClass {
    pub fn is_eigen(&self) -> bool {
        !matches!(self, EigenClass::NotEigen)
    }

    /// The exponent `i` with `λ = n^i`.
    pub fn exponent(&self) -> Option<i64> {
        match *self {
            EigenClass::RationalEuler(a) => Some(a as i64),
            EigenClass::Polylog(a) => Some(-(a as i64)),
            EigenClass::Geometric => Some(0),
            EigenClass::NotEigen => None,
        }
    }
}

impl Serialize for EigenClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        let (kind, a) = match *self {
            EigenClass::RationalEuler(a) => ("RationalEuler", Some(a)),
            EigenClass::Polylog(a) => ("Polylog", Some(a)),
            EigenClass::Geometric => ("Geometric", None),
            EigenClass::NotEigen => ("NotEigen", None),
        };
        map.serialize_entry("kind", kind)?;
        if let Some(a) = a {
            map.serialize_entry("a", &a)?;
        }
        map.end()
    }
}

/// Tests `U_n f = λ f` coefficientwise.
///
/// `λ` is read off the first nonzero coefficient of `f` at exponent `e₀`
/// as `(U_n f)_{e₀} / f_{e₀}`; every exponent where both `U_n f` and `f`
/// are known is then compared.
pub fn eigen_check_numeric(f: &PowerSeries, n: u64) -> Result<EigenReport, SpectralError> {
    let image = u_apply(n, f)?;
    let lead = f.first_nonzero().ok_or(SpectralError::ZeroSeries)?;
    let checked_to = image.known_to().min(f.known_to());
    if checked_to < lead + 2 {
        return Err(SpectralError::InsufficientOrder(checked_to));
    }
    let lambda = image.coeff(lead).expect("known") / f.coeff(lead).expect("known");
    let scaled = scale(&lambda, f);
    let witness = (0..checked_to).find(|&e| image.coeff(e) != scaled.coeff(e));
    Ok(EigenReport {
        is_eigen: witness.is_none(),
        eigenvalue: witness.is_none().then_some(lambda),
        gamma: None,
        witness,
        checked_to,
    })
}

fn all_equal(params: &[GaussianRational], value: i64) -> bool {
    let v = GaussianRational::from_integer(value);
    params.iter().all(|p| *p == v)
}

/// Shape of an already normalized term, ignoring constant and argument scale.
fn structural_class(t: &HypergeometricTerm) -> EigenClass {
    let upper = t.upper();
    let lower = t.lower_textbook();
    match t.shift() {
        0 if upper.len() == 1 && upper[0].is_one() && lower.is_empty() => EigenClass::Geometric,
        1 if !upper.is_empty()
            && all_equal(upper, 1)
            && all_equal(&lower, 2)
            && lower.len() + 1 == upper.len() =>
        {
            EigenClass::Polylog(lower.len() as u32)
        }
        1 if !upper.is_empty()
            && all_equal(upper, 2)
            && all_equal(&lower, 1)
            && lower.len() + 1 == upper.len() =>
        {
            EigenClass::RationalEuler(upper.len() as u32)
        }
        _ => EigenClass::NotEigen,
    }
}

/// Classifies `t` as an eigenfunction of `U_n`.
///
/// Terminating terms (zero constant, or a nonpositive-integer upper
/// parameter) are polynomials outside the structure theorem; they are
/// classed `NotEigen` and the numeric report is returned as observed, which
/// may still show a trivial eigenrelation such as `U_n(x) = 0`.
///
/// Returns [`SpectralError::Disagreement`] if the structural answer and the
/// numeric check ever disagree, or the three eigenvalue routes differ.
pub fn eigen_classify(
    t: &HypergeometricTerm,
    n: u64,
) -> Result<(EigenClass, EigenReport), SpectralError> {
    if n < 2 {
        return Err(SpectralError::InvalidOperator(format!(
            "n = {n}; need n ≥ 2"
        )));
    }
    let norm = normalize(t);
    let series = to_series_known_to(t, n as usize * CHECK_ORDER);
    let numeric = match eigen_check_numeric(&series, n) {
        Ok(report) => report,
        Err(SpectralError::ZeroSeries) => EigenReport {
            is_eigen: false,
            eigenvalue: None,
            gamma: None,
            witness: None,
            checked_to: 0,
        },
        Err(e) => return Err(e),
    };
    if t.is_terminating() {
        return Ok((EigenClass::NotEigen, numeric));
    }

    // U_n sees s^{nk} against s^k, so the scale must satisfy s^{n−1} = 1.
    let scale_ok = t.arg_scale().pow(n as i64 - 1)?.is_one();
    let class = if scale_ok {
        structural_class(&norm)
    } else {
        EigenClass::NotEigen
    };

    if !class.is_eigen() {
        if numeric.is_eigen {
            return Err(SpectralError::Disagreement(format!(
                "{t:?} has no eigen shape but U_{n} scales it by {:?} to order {}",
                numeric.eigenvalue, numeric.checked_to
            )));
        }
        return Ok((EigenClass::NotEigen, numeric));
    }

    let gamma = gamma_counts(&norm);
    let nq = GaussianRational::from_integer(n);
    let by_gamma = nq.pow(gamma.gamma_b as i64 - gamma.gamma_a as i64)?;
    let ratio = |params: &[GaussianRational]| -> GaussianRational {
        params.iter().map(|p| pochhammer(p, n - 1)).product()
    };
    let by_ratio = ratio(norm.upper()) / ratio(norm.lower_full());
    let routes_agree = numeric.eigenvalue.as_ref() == Some(&by_gamma) && by_ratio == by_gamma;
    if !routes_agree {
        return Err(SpectralError::Disagreement(format!(
            "{t:?} under U_{n}: n^(γb−γa) = {by_gamma}, ratio = {by_ratio}, observed = {:?}",
            numeric.eigenvalue
        )));
    }
    Ok((
        class,
        EigenReport {
            gamma: Some(gamma),
            ..numeric
        },
    ))
}

/// Compares the multisets
/// `{a_i − 1, (b_i − 1)/n, …, (b_i + n − 2)/n}` and
/// `{b_i − 1, (a_i − 1)/n, …, (a_i + n − 2)/n}` built from a balanced
/// shift-1 term (lower list k! slot included).
pub fn root_multiset_check(t: &HypergeometricTerm, n: u64) -> Result<bool, SpectralError> {
    if n == 0 || !is_balanced(t) || t.shift() != 1 {
        return Err(SpectralError::InvalidOperator(format!(
            "root multisets need a balanced term with shift 1 and n ≥ 1; got {t:?}, n = {n}"
        )));
    }
    let one = GaussianRational::one();
    let inv_n = GaussianRational::from_integer(n).recip()?;
    let build = |own: &[GaussianRational], other: &[GaussianRational]| {
        let mut set: Vec<GaussianRational> = own.iter().map(|a| a - &one).collect();
        for b in other {
            for l in 0..n {
                set.push((b - &one + GaussianRational::from_integer(l)) * &inv_n);
            }
        }
        set.sort();
        set
    };
    Ok(build(t.upper(), t.lower_full()) == build(t.lower_full(), t.upper()))
}

/// Checks `U_n(Σ k^i x^k) = n^i · Σ k^i x^k` for every `i` in `exponents`,
/// comparing `order` coefficients of the image.
pub fn spectrum_witness(
    n: u64,
    exponents: std::ops::RangeInclusive<i64>,
    order: usize,
) -> Result<Vec<(i64, EigenReport)>, SpectralError> {
    if n < 2 {
        return Err(SpectralError::InvalidOperator(format!(
            "n = {n}; need n ≥ 2"
        )));
    }
    let nq = GaussianRational::from_integer(n);
    exponents
        .map(|i| {
            let f = polylog_series(i, n as usize * order);
            let report = eigen_check_numeric(&f, n)?;
            let expected = nq.pow(i)?;
            if !report.is_eigen || report.eigenvalue.as_ref() != Some(&expected) {
                return Err(SpectralError::Disagreement(format!(
                    "U_{n} on Σ k^{i} x^k: expected eigenvalue {expected}, got {report:?}"
                )));
            }
            Ok((i, report))
        })
        .collect()
}

/// True when `t` is an eigenfunction of every `U_n` with `n` in `indices`.
///
/// For terms in the unscaled variable (`arg_scale = 1`) being an
/// eigenfunction does not depend on `n`; a split verdict there is reported
/// as a [`SpectralError::Disagreement`].
pub fn simultaneous_eigen_check(
    t: &HypergeometricTerm,
    indices: &[u64],
) -> Result<bool, SpectralError> {
    let classes = indices
        .iter()
        .map(|&n| eigen_classify(t, n).map(|(class, _)| class))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = classes.first() else {
        return Ok(false);
    };
    let uniform = classes.iter().all(|c| c == first);
    if !uniform && t.arg_scale().is_one() {
        return Err(SpectralError::Disagreement(format!(
            "{t:?} is classified differently across {indices:?}: {classes:?}"
        )));
    }
    Ok(uniform && first.is_eigen())
}

/// Verdict of [`multiplicative_classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicativeReport {
    pub is_cm: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(u64, u64)>,
}

/// `c(m) = ∏(a_i)_{m−1} / ∏(b_i)_{m−1}` for `m = 1..=bound`; index 0 unused.
pub fn cm_coefficients(
    upper: &[GaussianRational],
    lower_full: &[GaussianRational],
    bound: u64,
) -> Vec<GaussianRational> {
    let mut out = vec![GaussianRational::zero(), GaussianRational::one()];
    for m in 1..bound {
        let step = GaussianRational::from_integer(m - 1);
        let num: GaussianRational = upper.iter().map(|a| a + &step).product();
        let den: GaussianRational = lower_full.iter().map(|b| b + &step).product();
        let next = &out[m as usize] * num / den;
        out.push(next);
    }
    out
}

/// Decides whether `c(m)` is completely multiplicative on `1..=bound`.
///
/// The brute-force check `c(mk) = c(m) c(k)` for `2 ≤ m, k`, `mk ≤ bound`
/// and the structural check (the parameters are those of `Σ k^{±a} x^k`)
/// must agree; when they do and `c` is multiplicative, `c(m) = m^e` with
/// `e = γ_b − γ_a` is confirmed for every `m ≤ bound`.
pub fn multiplicative_classify(
    upper: &[GaussianRational],
    lower_full: &[GaussianRational],
    bound: u64,
) -> Result<MultiplicativeReport, SpectralError> {
    if bound < 4 {
        return Err(SpectralError::InvalidOperator(format!("bound {bound} < 4")));
    }
    if let Some(zero) = upper.iter().find(|a| a.is_zero()) {
        return Err(SpectralError::InvalidOperator(format!(
            "upper parameter {zero} makes c(m) vanish for m ≥ 2"
        )));
    }
    let term = HypergeometricTerm::new(
        GaussianRational::one(),
        1,
        upper.to_vec(),
        lower_full.to_vec(),
        GaussianRational::one(),
    )?;
    let c = cm_coefficients(upper, lower_full, bound);
    let witness = (2..=bound)
        .flat_map(|m| (2..=bound / m).map(move |k| (m, k)))
        .find(|&(m, k)| c[(m * k) as usize] != &c[m as usize] * &c[k as usize]);

    let norm = normalize(&term);
    let structural = !term.is_terminating() && structural_class(&norm).is_eigen();
    if structural != witness.is_none() {
        return Err(SpectralError::Disagreement(format!(
            "brute force says {} but the parameter structure says {} for {upper:?} / {lower_full:?}",
            if witness.is_none() { "multiplicative" } else { "not multiplicative" },
            if structural { "eigen shape" } else { "no eigen shape" },
        )));
    }
    if !structural {
        return Ok(MultiplicativeReport {
            is_cm: false,
            exponent: None,
            witness,
        });
    }
    let gamma = gamma_counts(&norm);
    let exponent = gamma.gamma_b as i64 - gamma.gamma_a as i64;
    for m in 1..=bound {
        let expected = GaussianRational::from_integer(m).pow(exponent)?;
        if c[m as usize] != expected {
            return Err(SpectralError::Disagreement(format!(
                "c({m}) = {} but m^{exponent} = {expected}",
                c[m as usize]
            )));
        }
    }
    Ok(MultiplicativeReport {
        is_cm: true,
        exponent: Some(exponent),
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::to_series;
    use crate::series::polylog_series;

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
    fn numeric_examples() {
        let report = eigen_check_numeric(&polylog_series(-2, 100), 3).unwrap();
        assert!(report.is_eigen);
        assert_eq!(report.eigenvalue, Some(q("1/9")));
        assert_eq!(report.checked_to, 34);

        let exp = to_series(&term(0, &[], &["1"]), 30);
        let report = eigen_check_numeric(&exp, 2).unwrap();
        assert!(!report.is_eigen);
        assert_eq!(report.witness, Some(1));
        assert_eq!(report.eigenvalue, None);

        let geom = to_series(&HypergeometricTerm::geometric(), 30);
        for n in 2..6 {
            let report = eigen_check_numeric(&geom, n).unwrap();
            assert_eq!(report.eigenvalue, Some(q("1")));
        }
    }

    #[test]
    fn numeric_errors() {
        assert_eq!(
            eigen_check_numeric(&PowerSeries::zero(10), 2),
            Err(SpectralError::ZeroSeries)
        );
        assert_eq!(
            eigen_check_numeric(&polylog_series(1, 3), 2),
            Err(SpectralError::InsufficientOrder(2))
        );
    }

    #[test]
    fn classify_examples() {
        let (class, report) = eigen_classify(&HypergeometricTerm::polylog(-2), 2).unwrap();
        assert_eq!(class, EigenClass::Polylog(2));
        assert_eq!(report.eigenvalue, Some(q("1/4")));
        assert_eq!(
            report.gamma,
            Some(GammaCounts {
                gamma_a: 3,
                gamma_b: 1
            })
        );

        let (class, report) = eigen_classify(&term(1, &["2", "2"], &["1", "1"]), 3).unwrap();
        assert_eq!(class, EigenClass::RationalEuler(2));
        assert_eq!(report.eigenvalue, Some(q("9")));

        let (class, report) = eigen_classify(&term(0, &[], &["1"]), 3).unwrap();
        assert_eq!(class, EigenClass::NotEigen);
        assert!(report.witness.is_some());

        let (class, report) = eigen_classify(&term(2, &["1", "1"], &["2", "1"]), 2).unwrap();
        assert_eq!(class, EigenClass::NotEigen);
        assert!(report.witness.is_some());

        let (class, _) =
            eigen_classify(&HypergeometricTerm::geometric().with_c0(q("-5/2")), 4).unwrap();
        assert_eq!(class, EigenClass::Geometric);
        let (class, _) = eigen_classify(&HypergeometricTerm::polylog(0), 7).unwrap();
        assert_eq!(class, EigenClass::Polylog(0));
    }

    #[test]
    fn classify_handles_scaled_and_terminating_terms() {
        // Σ (−1)^{k−1} k x^k is an eigenfunction for odd n only.
        let t = HypergeometricTerm::new(q("1"), 1, qs(&["2"]), qs(&["1"]), q("-1")).unwrap();
        assert_eq!(
            eigen_classify(&t, 3).unwrap().0,
            EigenClass::RationalEuler(1)
        );
        assert_eq!(eigen_classify(&t, 2).unwrap().0, EigenClass::NotEigen);
        assert!(!simultaneous_eigen_check(&t, &[2, 3]).unwrap());
        // x alone: U_n(x) = 0 for n ≥ 2
        let x = term(1, &["0"], &["1"]);
        let (class, report) = eigen_classify(&x, 2).unwrap();
        assert_eq!(class, EigenClass::NotEigen);
        assert_eq!(report.eigenvalue, Some(q("0")));
    }

    #[test]
    fn root_multisets() {
        assert!(root_multiset_check(&HypergeometricTerm::polylog(-2), 2).unwrap());
        assert!(root_multiset_check(&term(1, &["2", "2"], &["1", "1"]), 2).unwrap());
        assert!(!root_multiset_check(&term(1, &["3"], &["1"]), 2).unwrap());
        assert!(root_multiset_check(&term(0, &["3"], &["1"]), 2).is_err());
        assert!(root_multiset_check(&term(1, &["3", "3"], &["1"]), 2).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let reports = spectrum_witness(2, -3..=3, 32).unwrap();
        let values: Vec<_> = reports
            .iter()
            .map(|(_, r)| r.eigenvalue.clone().unwrap())
            .collect();
        assert_eq!(values, qs(&["1/8", "1/4", "1/2", "1", "2", "4", "8"]));
        let reports = spectrum_witness(5, -2..=-2, 16).unwrap();
        assert_eq!(reports[0].1.eigenvalue, Some(q("1/25")));
        assert_eq!(reports[0].1.checked_to, 16);
    }

    #[test]
    fn simultaneous_examples() {
        assert!(simultaneous_eigen_check(&HypergeometricTerm::polylog(-2), &[2, 3, 4, 5]).unwrap());
        assert!(!simultaneous_eigen_check(&term(0, &[], &["1"]), &[2, 3]).unwrap());
        assert!(simultaneous_eigen_check(&HypergeometricTerm::geometric(), &[2, 3, 9]).unwrap());
    }

    #[test]
    fn multiplicative_examples() {
        let r = multiplicative_classify(&qs(&["2", "2"]), &qs(&["1", "1"]), 30).unwrap();
        assert_eq!((r.is_cm, r.exponent), (true, Some(2)));
        let r = multiplicative_classify(&qs(&["1", "1", "1"]), &qs(&["2", "2", "1"]), 30).unwrap();
        assert_eq!((r.is_cm, r.exponent), (true, Some(-2)));
        let r = multiplicative_classify(&qs(&["1/2"]), &qs(&["1"]), 8).unwrap();
        assert!(!r.is_cm);
        assert_eq!(r.witness, Some((2, 2)));
        let c = cm_coefficients(&qs(&["1/2"]), &qs(&["1"]), 8);
        assert_eq!((c[4].clone(), &c[2] * &c[2]), (q("5/16"), q("1/4")));
        assert!(multiplicative_classify(&qs(&["2"]), &qs(&["1"]), 3).is_err());
    }

    #[test]
    fn report_json() {
        let (class, report) = eigen_classify(&HypergeometricTerm::polylog(-2), 2).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            r#"{"is_eigen":true,"eigenvalue":"1/4","gamma_a":3,"gamma_b":1,"checked_to":64}"#
        );
        assert_eq!(
            serde_json::to_string(&class).unwrap(),
            r#"{"kind":"Polylog","a":2}"#
        );
    }
}
