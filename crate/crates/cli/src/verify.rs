//! Seeded verification suites.
//!
//! Every suite runs independent trials, each drawing from its own
//! [`SplitMix64`] stream seeded by [`trial_seed`]. Trials run on the rayon
//! pool and are collected in trial order, so the report is the same however
//! the work is scheduled.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hecke::hecke::{sum_invariant_check, u_closed_form, TransformError};
use hecke::hyper::{
    gamma_counts, is_balanced, normalize, param_sum_delta, pochhammer, pochhammer_offset,
    pochhammer_split, to_series_known_to,
};
use hecke::series::{
    adjoint_check, euler_apply, first_mismatch, inner_product, polylog_series, u_apply, v_apply,
    vnun_projection, PowerSeries,
};
use hecke::spectral::{
    cm_coefficients, eigen_classify, multiplicative_classify, root_multiset_check,
    simultaneous_eigen_check, spectrum_witness, EigenClass,
};
use hecke::{GaussianRational, HypergeometricTerm};

use crate::rng::{trial_seed, SplitMix64};

pub const SUITES: [&str; 7] = [
    "algebra",
    "pochhammer",
    "transform",
    "adjoint",
    "eigen",
    "spectrum",
    "multiplicative",
];

/// Indices for which eigen-terms are cross-checked.
pub const EIGEN_INDICES: [u64; 5] = [2, 3, 4, 5, 7];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: u64,
    pub description: String,
    /// Everything needed to replay the trial: seed, suite, trial index,
    /// the trial's sub-seed and the drawn parameters.
    pub reproduction: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRun {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub order: usize,
    pub failures: Vec<Failure>,
}

impl VerificationRun {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Truncation order used when none is given. For `multiplicative` it is the
/// bound on `m·k`; `pochhammer` ignores it.
pub fn default_order(suite: &str) -> usize {
    match suite {
        "algebra" => 240,
        "transform" => 40,
        "spectrum" => 128,
        "multiplicative" => 24,
        _ => 64,
    }
}

/// A failed check: description plus the parameters drawn so far.
type TrialError = (String, Value);
type TrialResult = Result<(), TrialError>;

fn trial_fn(suite: &str) -> Option<fn(&mut SplitMix64, usize) -> TrialResult> {
    Some(match suite {
        "algebra" => algebra_trial,
        "pochhammer" => pochhammer_trial,
        "transform" => transform_trial,
        "adjoint" => adjoint_trial,
        "eigen" => eigen_trial,
        "spectrum" => spectrum_trial,
        "multiplicative" => multiplicative_trial,
        _ => return None,
    })
}

/// Runs `trials` trials of `suite`; `None` if the suite name is unknown.
pub fn run_suite(
    suite: &str,
    trials: u64,
    seed: u64,
    order: Option<usize>,
) -> Option<VerificationRun> {
    let run_trial = trial_fn(suite)?;
    let order = order.unwrap_or_else(|| default_order(suite));
    let failures: Vec<Failure> = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let sub_seed = trial_seed(seed, suite, trial);
            let mut rng = SplitMix64::new(sub_seed);
            let outcome = catch_unwind(AssertUnwindSafe(|| run_trial(&mut rng, order)))
                .unwrap_or_else(|panic| {
                    let message = panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Err((format!("panic: {message}"), Value::Null))
                });
            outcome.err().map(|(description, params)| Failure {
                trial,
                description,
                reproduction: json!({
                    "seed": seed,
                    "suite": suite,
                    "trial": trial,
                    "sub_seed": sub_seed,
                    "order": order,
                    "params": params,
                }),
            })
        })
        .collect();
    Some(VerificationRun {
        suite: suite.to_string(),
        seed,
        trials,
        order,
        failures,
    })
}

fn fail<T>(params: &Value, description: impl Into<String>) -> Result<T, TrialError> {
    Err((description.into(), params.clone()))
}

/// Turns a library error into a trial failure.
fn lift<T, E: std::fmt::Display>(params: &Value, r: Result<T, E>) -> Result<T, TrialError> {
    r.or_else(|e| fail(params, format!("unexpected error: {e}")))
}

/// Compares two series on their common known range.
fn same(params: &Value, label: &str, lhs: &PowerSeries, rhs: &PowerSeries) -> TrialResult {
    let common = lhs.known_to().min(rhs.known_to());
    match first_mismatch(lhs, rhs, common) {
        Ok(None) => Ok(()),
        Ok(Some(e)) => fail(params, format!("{label}: sides differ at x^{e}")),
        Err(e) => fail(params, format!("{label}: {e}")),
    }
}

fn random_series(rng: &mut SplitMix64, known_to: usize) -> PowerSeries {
    let shift = (rng.range(0, 3) as usize).min(known_to);
    let coeffs = (shift..known_to).map(|_| rng.coefficient()).collect();
    PowerSeries::new(shift, coeffs)
}

fn index(rng: &mut SplitMix64, hi: i64) -> u64 {
    rng.range(1, hi) as u64
}

fn algebra_trial(rng: &mut SplitMix64, order: usize) -> TrialResult {
    let f = random_series(rng, order);
    let (n, m, k, j) = (
        index(rng, 12),
        index(rng, 12),
        index(rng, 12),
        index(rng, 12),
    );
    let h = random_series(rng, order / n as usize + 1);
    let p = json!({ "n": n, "m": m, "k": k, "j": j, "f": f, "h": h });
    let u = |n: u64, f: &PowerSeries| lift(&p, u_apply(n, f));
    let v = |n: u64, f: &PowerSeries| lift(&p, v_apply(n, f));

    same(&p, "U_n U_m = U_nm", &u(n, &u(m, &f)?)?, &u(n * m, &f)?)?;
    same(&p, "V_n V_m = V_nm", &v(n, &v(m, &f)?)?, &v(n * m, &f)?)?;
    same(&p, "U_n V_n = Id", &u(n, &v(n, &f)?)?, &f)?;
    let g = hecke::series::index_gcd(n, m);
    same(
        &p,
        "U_n V_m = V_(m/g) U_(n/g)",
        &u(n, &v(m, &f)?)?,
        &v(m / g, &u(n / g, &f)?)?,
    )?;
    let vm = v(m, &f)?;
    same(
        &p,
        "U_kj V_m = U_k U_j V_m",
        &u(k * j, &vm)?,
        &u(k, &u(j, &vm)?)?,
    )?;

    // V_n U_n is the projection onto exponents divisible by n.
    let proj = lift(&p, vnun_projection(n, &f))?;
    same(
        &p,
        "projection = V_n U_n",
        &proj,
        &v(n, &u(n, &f)?)?.truncate(f.known_to()),
    )?;
    same(
        &p,
        "projection idempotent",
        &lift(&p, vnun_projection(n, &proj))?,
        &proj,
    )?;
    let supported = (0..f.known_to())
        .all(|e| (e as u64).is_multiple_of(n) || f.coeff(e).is_some_and(|c| c.is_zero()));
    if (proj == f) != supported {
        return fail(
            &p,
            "projection fixes f exactly when f lives on multiples of n: violated",
        );
    }
    let on_multiples = v(n, &h)?;
    same(
        &p,
        "projection fixes V_n h",
        &lift(&p, vnun_projection(n, &on_multiples))?,
        &on_multiples,
    )
}

fn random_parameter(rng: &mut SplitMix64) -> GaussianRational {
    let re = rng.small_rational();
    if rng.chance(1, 4) {
        re + rng.small_rational() * GaussianRational::i()
    } else {
        re
    }
}

fn pochhammer_trial(rng: &mut SplitMix64, _order: usize) -> TrialResult {
    let a = random_parameter(rng);
    let n = index(rng, 6);
    let k = rng.range(0, 8) as u64;
    let p = json!({ "a": a.to_string(), "n": n, "k": k });
    if pochhammer(&a, k * n) != pochhammer_split(&a, n, k) {
        return fail(&p, "(a)_{kn} differs from its split over residues");
    }

    let n = rng.range(2, 6) as u64;
    let j = n * rng.range(0, 5) as u64 + rng.range(1, n as i64 - 1) as u64;
    let p = json!({ "a": a.to_string(), "n": n, "k": k, "j": j });
    let big_n = n * (k + 1) - j % n;
    if pochhammer(&a, big_n) != lift(&p, pochhammer_offset(&a, n, k, j))? {
        return fail(
            &p,
            format!("(a)_N with N = {big_n} differs from its offset split"),
        );
    }
    Ok(())
}

fn random_term(rng: &mut SplitMix64, max_shift: i64, scaled: bool) -> HypergeometricTerm {
    let p = rng.range(0, 3);
    let q = rng.range(0, 3);
    let upper = (0..p).map(|_| random_parameter(rng)).collect();
    let mut lower: Vec<GaussianRational> = (0..q).map(|_| rng.lower_parameter()).collect();
    lower.push(GaussianRational::one());
    let c0 = random_parameter(rng);
    let arg_scale = if scaled && rng.chance(2, 3) {
        random_parameter(rng)
    } else {
        GaussianRational::one()
    };
    let shift = rng.range(0, max_shift) as usize;
    HypergeometricTerm::new(c0, shift, upper, lower, arg_scale).expect("lower parameters valid")
}

const RESAMPLE_LIMIT: usize = 1000;

fn transform_trial(rng: &mut SplitMix64, order: usize) -> TrialResult {
    let n = index(rng, 5);
    // Resample until the transformed lower parameters are valid too.
    let mut attempt = 0;
    let (t, report) = loop {
        let t = random_term(rng, 7, true);
        match u_closed_form(n, &t) {
            Ok(report) => break (t, report),
            Err(TransformError::InvalidParameter { .. }) if attempt < RESAMPLE_LIMIT => {
                attempt += 1
            }
            Err(e) => {
                return fail(
                    &json!({ "n": n, "term": t }),
                    format!("closed form failed: {e}"),
                )
            }
        }
    };
    let p = json!({ "n": n, "term": t });
    let closed = to_series_known_to(&report.output, order);
    let oracle = lift(
        &p,
        u_apply(n, &to_series_known_to(&t, n as usize * order + n as usize)),
    )?
    .truncate(order);
    match lift(&p, first_mismatch(&closed, &oracle, order))? {
        None => {}
        Some(e) => {
            return fail(
                &p,
                format!("closed form differs from termwise U_n at x^{e}"),
            )
        }
    }
    if is_balanced(&report.output) != is_balanced(&t) {
        return fail(&p, "U_n changed whether the term is balanced");
    }

    // Divisible case: the parameter-sum identity.
    let t1 = t.with_shift(n as usize * rng.range(0, 3) as usize);
    let p = json!({ "n": n, "term": t1 });
    // (b + l − 1)/n is never a nonpositive integer for a valid b, so no
    // resampling is needed here.
    let report = lift(&p, u_closed_form(n, &t1))?;
    if !lift(&p, sum_invariant_check(&t1, n))? {
        return fail(&p, "parameter-sum identity violated");
    }
    let preserved = param_sum_delta(&report.output) == param_sum_delta(&t1);
    if n >= 2 && preserved != is_balanced(&t1) {
        return fail(
            &p,
            "parameter-sum delta preserved for an unbalanced term or lost for a balanced one",
        );
    }
    Ok(())
}

fn adjoint_trial(rng: &mut SplitMix64, order: usize) -> TrialResult {
    let f = random_series(rng, order);
    let g = random_series(rng, order);
    let n = index(rng, 6);
    let p = json!({ "n": n, "f": f, "g": g });
    if !lift(&p, adjoint_check(n, &f, &g))? {
        return fail(&p, "<f, V_n g>_R differs from <U_n f, g>_(R^n)");
    }
    let fg = inner_product(&f, &g);
    let gf = inner_product(&g, &f);
    if fg.iter().zip(&gf).any(|(x, y)| *x != y.conj()) {
        return fail(&p, "inner product is not Hermitian");
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Geometric,
    Polylog(u32),
    RationalEuler(u32),
}

impl Shape {
    fn class(self) -> EigenClass {
        match self {
            Shape::Geometric => EigenClass::Geometric,
            Shape::Polylog(a) => EigenClass::Polylog(a),
            Shape::RationalEuler(a) => EigenClass::RationalEuler(a),
        }
    }

    fn random(rng: &mut SplitMix64) -> Shape {
        match rng.below(3) {
            0 => Shape::Geometric,
            1 => Shape::Polylog(rng.range(0, 4) as u32),
            _ => Shape::RationalEuler(rng.range(1, 4) as u32),
        }
    }

    /// Shift and parameter lists (k! slot included), with up to two
    /// cancelling pairs mixed in and both lists shuffled.
    fn parameters(
        self,
        rng: &mut SplitMix64,
    ) -> (usize, Vec<GaussianRational>, Vec<GaussianRational>) {
        let int = |v: i64| GaussianRational::from_integer(v);
        let (shift, mut upper, mut lower) = match self {
            Shape::Geometric => (0, vec![int(1)], vec![int(1)]),
            Shape::Polylog(a) => (1, vec![int(1); a as usize + 1], vec![int(2); a as usize]),
            Shape::RationalEuler(a) => (1, vec![int(2); a as usize], vec![int(1); a as usize - 1]),
        };
        if !matches!(self, Shape::Geometric) {
            lower.push(int(1));
        }
        for _ in 0..rng.range(0, 2) {
            let r = rng.lower_parameter();
            upper.push(r.clone());
            lower.push(r);
        }
        rng.shuffle(&mut upper);
        rng.shuffle(&mut lower);
        (shift, upper, lower)
    }
}

fn term(
    c0: GaussianRational,
    shift: usize,
    upper: Vec<GaussianRational>,
    lower: Vec<GaussianRational>,
    arg_scale: GaussianRational,
) -> HypergeometricTerm {
    HypergeometricTerm::new(c0, shift, upper, lower, arg_scale).expect("valid planted term")
}

/// Checks everything an accepted eigen-term must satisfy, for every index
/// in [`EIGEN_INDICES`].
fn accepted_checks(p: &Value, t: &HypergeometricTerm, class: EigenClass) -> TrialResult {
    let exponent = class.exponent().expect("eigen class");
    let norm = normalize(t);
    if !is_balanced(&norm) {
        return fail(p, "accepted eigen-term is not balanced");
    }
    let gamma = gamma_counts(&norm);
    for n in EIGEN_INDICES {
        let nq = GaussianRational::from_integer(n);
        let (class_n, report) = lift(p, eigen_classify(t, n))?;
        if class_n != class {
            return fail(
                p,
                format!("U_{n} classifies as {class_n:?}, expected {class:?}"),
            );
        }
        let expected = lift(p, nq.pow(exponent))?;
        if report.eigenvalue.as_ref() != Some(&expected) {
            return fail(
                p,
                format!(
                    "U_{n}: eigenvalue {:?}, expected n^{exponent}",
                    report.eigenvalue
                ),
            );
        }
        let side = |count: usize,
                    params: &[GaussianRational]|
         -> Result<GaussianRational, TrialError> {
            let product: GaussianRational = params.iter().map(|a| pochhammer(a, n - 1)).product();
            Ok(lift(p, nq.pow(count as i64))? * product)
        };
        if side(gamma.gamma_a, norm.upper())? != side(gamma.gamma_b, norm.lower_full())? {
            return fail(p, format!("U_{n}: n^γa ∏(a)_(n−1) ≠ n^γb ∏(b)_(n−1)"));
        }
        if norm.shift() == 1 && !lift(p, root_multiset_check(&norm, n))? {
            return fail(p, format!("U_{n}: root multisets differ for an eigen-term"));
        }
    }
    if !lift(p, simultaneous_eigen_check(t, &EIGEN_INDICES))? {
        return fail(p, "not a simultaneous eigenfunction");
    }
    if t.shift() == 1 {
        // c_k = k^exponent · c_1
        let series = to_series_known_to(t, 65);
        let c1 = series.coeff(1).expect("known");
        for k in 1..65u64 {
            let expected = lift(p, GaussianRational::from_integer(k).pow(exponent))? * &c1;
            if series.coeff(k as usize) != Some(expected) {
                return fail(p, format!("coefficient of x^{k} is not k^{exponent}·c_1"));
            }
        }
    }
    Ok(())
}

fn eigen_trial(rng: &mut SplitMix64, _order: usize) -> TrialResult {
    let n = *rng.pick(&EIGEN_INDICES);
    let shape = Shape::random(rng);
    let c0 = rng.small_rational();
    let (shift, mut upper, mut lower) = shape.parameters(rng);
    let one = GaussianRational::one();
    match rng.below(5) {
        // planted eigen-terms
        0 | 1 => {
            let t = term(c0, shift, upper, lower, one);
            let p = json!({ "n": n, "term": t, "kind": "planted" });
            let (class, _) = lift(&p, eigen_classify(&t, n))?;
            if class != shape.class() {
                return fail(&p, format!("planted {shape:?} classified as {class:?}"));
            }
            accepted_checks(&p, &t, class)
        }
        // perturbed: a non-integer offset on one parameter, or a scale with
        // s^(n−1) ≠ 1
        2 => {
            let mut arg_scale = one.clone();
            match rng.below(3) {
                0 => {
                    let i = rng.below(upper.len() as u64) as usize;
                    upper[i] = &upper[i] + rng.fractional();
                }
                1 => {
                    let i = rng.below(lower.len() as u64) as usize;
                    lower[i] = &lower[i] + rng.fractional();
                    if !lower.iter().any(GaussianRational::is_one) {
                        lower.push(one.clone());
                        upper.push(one.clone());
                    }
                }
                _ => loop {
                    arg_scale = rng.small_rational();
                    if !arg_scale.is_one() && arg_scale != -one.clone() {
                        break;
                    }
                },
            }
            let t = term(c0, shift, upper, lower, arg_scale);
            let p = json!({ "n": n, "term": t, "kind": "perturbed" });
            let (class, report) = lift(&p, eigen_classify(&t, n))?;
            if class.is_eigen() || report.witness.is_none() {
                return fail(
                    &p,
                    format!("perturbed term accepted or missing witness: {report:?}"),
                );
            }
            // The multisets see only parameters, so a scale perturbation
            // leaves them equal.
            let norm = normalize(&t);
            let parameters_moved = t.arg_scale().is_one();
            if parameters_moved
                && norm.shift() == 1
                && is_balanced(&norm)
                && lift(&p, root_multiset_check(&norm, n))?
            {
                return fail(&p, "root multisets agree for a rejected term");
            }
            if lift(&p, simultaneous_eigen_check(&t, &EIGEN_INDICES))? {
                return fail(&p, "rejected term is a simultaneous eigenfunction");
            }
            Ok(())
        }
        // planted shapes moved to a higher shift
        3 => {
            let t = term(c0, rng.range(2, 5) as usize, upper, lower, one);
            let p = json!({ "n": n, "term": t, "kind": "shifted" });
            let (class, report) = lift(&p, eigen_classify(&t, n))?;
            if class.is_eigen() || report.witness.is_none() {
                return fail(
                    &p,
                    format!("shift ≥ 2 term accepted or missing witness: {report:?}"),
                );
            }
            Ok(())
        }
        // unconstrained random terms
        _ => {
            let t = random_term(rng, 2, false);
            let p = json!({ "n": n, "term": t, "kind": "random" });
            let (class, report) = lift(&p, eigen_classify(&t, n))?;
            if class.is_eigen() {
                return accepted_checks(&p, &t, class);
            }
            if !t.is_terminating() && report.witness.is_none() {
                return fail(&p, format!("rejected without witness: {report:?}"));
            }
            Ok(())
        }
    }
}

fn spectrum_trial(rng: &mut SplitMix64, order: usize) -> TrialResult {
    let extra = index(rng, 12).max(2);
    let p = json!({ "indices": [2, 3, 5, extra], "exponents": [-4, 4] });
    for n in [2, 3, 5, extra] {
        lift(&p, spectrum_witness(n, -4..=4, order))?;
        let nq = GaussianRational::from_integer(n);
        for i in -4..=4 {
            let (_, report) = lift(&p, eigen_classify(&HypergeometricTerm::polylog(i), n))?;
            if report.eigenvalue != Some(lift(&p, nq.pow(i))?) {
                return fail(&p, format!("symbolic Σ k^{i} x^k under U_{n}: {report:?}"));
            }
        }
    }
    // (x d/dx)^i of the geometric series is Σ k^i x^k.
    let mut f = PowerSeries::from_fn(0, order, |_| GaussianRational::one());
    for i in 1..=4 {
        f = euler_apply(&f);
        same(
            &p,
            &format!("euler^{i} geom"),
            &f,
            &polylog_series(i, order),
        )?;
    }
    Ok(())
}

fn multiplicative_trial(rng: &mut SplitMix64, bound: usize) -> TrialResult {
    let bound = bound as u64;
    let (upper, lower, planted) = if rng.chance(1, 2) {
        let shape = loop {
            let s = Shape::random(rng);
            if !matches!(s, Shape::Geometric) {
                break s;
            }
        };
        let (_, upper, lower) = shape.parameters(rng);
        (upper, lower, Some(shape))
    } else {
        let upper = (0..rng.range(0, 3))
            .map(|_| rng.lower_parameter())
            .collect();
        let mut lower: Vec<GaussianRational> = (0..rng.range(0, 3))
            .map(|_| rng.lower_parameter())
            .collect();
        lower.push(GaussianRational::one());
        (upper, lower, None)
    };
    let text = |v: &[GaussianRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let p = json!({ "upper": text(&upper), "lower_full": text(&lower), "bound": bound });
    let report = lift(&p, multiplicative_classify(&upper, &lower, bound))?;
    if let Some(shape) = planted {
        if !report.is_cm || report.exponent != shape.class().exponent() {
            return fail(&p, format!("planted {shape:?}: {report:?}"));
        }
    }
    if let Some((m, k)) = report.witness {
        let c = cm_coefficients(&upper, &lower, bound);
        if c[(m * k) as usize] == &c[m as usize] * &c[k as usize] {
            return fail(
                &p,
                format!("witness ({m}, {k}) does not violate multiplicativity"),
            );
        }
    } else if !report.is_cm {
        return fail(&p, "not multiplicative but no witness");
    }
    Ok(())
}
