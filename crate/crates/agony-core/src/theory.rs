//! First-order hierarchy theory for the RSBM with uniform class sizes:
//! closed-form hierarchy estimates for planted, merged, split, and
//! inverted rankings; expected agonies for general exponents; resolution
//! thresholds; and the piecewise laws for the optimal class count at
//! `d = 0, 1, 2`.
//!
//! # Conventions
//!
//! The planted model has `R = 2^a` classes of `n` nodes each
//! (`N = n 2^a`). Alternative rankings are parametrized by a real `b`:
//! `b > 0` merges `2^b` adjacent classes into one (leaving
//! `R~ = 2^{a-b}` classes), `b < 0` splits every class into `2^{-b}`
//! parts, `b = 0` is the planted ranking itself, and `b = a` is the
//! trivial single-class ranking. Inverted rankings reverse the class
//! order after merging/splitting.
//!
//! All quantities here are *first-order* estimates in `1/N`: expected
//! agonies are computed with pair counts `b_k = sum_i n_i n_{i+k}` whose
//! `k = 0` term includes the diagonal (`b_0 = sum_i n_i^2`), and the
//! hierarchy of a ranking family is estimated as `1 - E[A] / E[m]`.
//!
//! The closed-form curves (`hbar_direct_d1`, ...) and the general-d sums
//! (`expected_agony_direct` / `expected_agony_inverted`) are implemented
//! independently and cross-checked in the test suite; the general sums
//! are the source of truth.
//!
//! Two parameter regimes are analyzed: "twitter-like" hierarchies with
//! `p >= q > s` (forward links reach any higher class) and
//! "military-like" hierarchies with `q = 0` (forward links only reach
//! the adjacent class). Other regimes are flagged as uncovered rather
//! than extrapolated.

use alloc::vec::Vec;

/// Errors produced by the theory module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    /// The exponent must be finite and non-negative.
    #[error("exponent d = {0} must be finite and >= 0")]
    InvalidExponent(f64),
    /// A numeric parameter must be finite.
    #[error("parameter {name} = {value} must be finite")]
    NotFinite {
        /// Parameter name.
        name: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The power-of-two exponent `a` must be at least 1.
    #[error("a must be >= 1 (R = 2^a classes)")]
    ZeroA,
    /// At least one class is required.
    #[error("the class count must be >= 1")]
    NoClasses,
    /// The merge/split parameter lies outside the meaningful range.
    #[error("b = {b} is out of range for a = {a} (need b <= a)")]
    BOutOfRange {
        /// Offending merge/split parameter.
        b: f64,
        /// Power-of-two exponent.
        a: u32,
    },
    /// General-d expected agonies are sums over integer class structures;
    /// `2^{a-b}` must be an integer.
    #[error("2^(a-b) = {count} is not an integer class count")]
    NonIntegerClassCount {
        /// The offending real class count.
        count: f64,
    },
    /// The implied class count is too large to sum over.
    #[error("class count {count} exceeds the evaluation limit 2^22")]
    ClassCountTooLarge {
        /// The offending class count.
        count: f64,
    },
    /// The expected edge count vanishes, so hierarchy is undefined.
    #[error("expected edge count is zero at these parameters")]
    DegenerateEnsemble,
    /// The d = 0 optimum formula needs `N` divisible by `R = 2^a`.
    #[error("N = {n} is not a multiple of R = {r}")]
    NotMultipleOfR {
        /// Total node count.
        n: u64,
        /// Class count.
        r: u64,
    },
    /// Scaling tables need at least three values of `a`.
    #[error("scaling check needs >= 3 values of a, got {0}")]
    TooFewScalePoints(usize),
}

fn check_finite(name: &'static str, value: f64) -> Result<(), TheoryError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(TheoryError::NotFinite { name, value })
    }
}

fn check_exponent(d: f64) -> Result<(), TheoryError> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(TheoryError::InvalidExponent(d))
    }
}

/// Validated inputs for the general-d expected-agony formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TheoryInputs {
    p: f64,
    q: f64,
    s: f64,
    a: u32,
    b: f64,
    n_per_class: f64,
}

impl TheoryInputs {
    /// Validates the parameters: finite `p`, `q`, `s`, `b`; `a >= 1`;
    /// `b <= a`; `n_per_class > 0`.
    ///
    /// # Errors
    ///
    /// [`TheoryError`] variants naming the violated constraint.
    pub fn new(
        p: f64,
        q: f64,
        s: f64,
        a: u32,
        b: f64,
        n_per_class: f64,
    ) -> Result<Self, TheoryError> {
        check_finite("p", p)?;
        check_finite("q", q)?;
        check_finite("s", s)?;
        check_finite("b", b)?;
        check_finite("n_per_class", n_per_class)?;
        if a == 0 {
            return Err(TheoryError::ZeroA);
        }
        if b > a as f64 {
            return Err(TheoryError::BOutOfRange { b, a });
        }
        if n_per_class <= 0.0 {
            return Err(TheoryError::NotFinite { name: "n_per_class", value: n_per_class });
        }
        Ok(Self { p, q, s, a, b, n_per_class })
    }

    /// Adjacent-forward probability `p`.
    #[must_use]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Distant-forward probability `q`.
    #[must_use]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Backward/within probability `s`.
    #[must_use]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Power-of-two exponent `a` (`R = 2^a`).
    #[must_use]
    pub fn a(&self) -> u32 {
        self.a
    }

    /// Merge (`b > 0`) / split (`b < 0`) parameter.
    #[must_use]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Planted class size `n = N / R`.
    #[must_use]
    pub fn n_per_class(&self) -> f64 {
        self.n_per_class
    }
}

/// The common denominator
/// `D = 2^a (2p - 3q + s) + 4^a (q + s) - 2p + 2q`; the expected edge
/// count is `E[m] = n^2 D / 2`.
fn common_denominator(p: f64, q: f64, s: f64, a: u32) -> f64 {
    let big_a = libm::exp2(a as f64);
    big_a * (2.0 * p - 3.0 * q + s) + big_a * big_a * (q + s) - 2.0 * p + 2.0 * q
}

/// First-order expected edge count of the uniform RSBM:
/// `n^2 (s R (R + 1) / 2 + p (R - 1) + q (R - 1)(R - 2) / 2)` with
/// `R = 2^a` and `n` nodes per class.
#[must_use]
pub fn expected_m(p: f64, q: f64, s: f64, a: u32, n_per_class: f64) -> f64 {
    let r = libm::exp2(a as f64);
    n_per_class
        * n_per_class
        * (s * r * (r + 1.0) / 2.0 + p * (r - 1.0) + q * (r - 1.0) * (r - 2.0) / 2.0)
}

/// Rounds `2^x` to an integer class count, guarding non-integral and
/// oversized values.
fn integer_count(x: f64) -> Result<u64, TheoryError> {
    let value = libm::exp2(x);
    if value > (1u64 << 22) as f64 {
        return Err(TheoryError::ClassCountTooLarge { count: value });
    }
    let rounded = libm::round(value);
    if (value - rounded).abs() > 1e-9 * value.max(1.0) || rounded < 1.0 {
        return Err(TheoryError::NonIntegerClassCount { count: value });
    }
    Ok(rounded as u64)
}

/// First-order hierarchy of the planted ranking for any class count
/// `R >= 1` (uniform sizes; the class size cancels):
/// `1 - s sum_k (k+1)^d b_k / (p b_1 + q sum_{k>=2} b_k + s sum_k b_k)`.
///
/// # Errors
///
/// [`TheoryError::DegenerateEnsemble`] when the expected edge count is
/// zero (`p = q = s = 0`); validation errors for bad `d` or `R`.
pub fn hbar_planted(d: f64, p: f64, q: f64, s: f64, r: u32) -> Result<f64, TheoryError> {
    check_exponent(d)?;
    check_finite("p", p)?;
    check_finite("q", q)?;
    check_finite("s", s)?;
    if r == 0 {
        return Err(TheoryError::NoClasses);
    }
    if r as u64 > 1 << 22 {
        return Err(TheoryError::ClassCountTooLarge { count: r as f64 });
    }
    let mut weighted_back = 0.0f64;
    let mut denom = 0.0f64;
    for k in 0..r {
        // Uniform sizes: b_k / n^2 = R - k (the k = 0 term includes the
        // diagonal, first-order convention).
        let pairs = (r - k) as f64;
        weighted_back += s * libm::pow((k + 1) as f64, d) * pairs;
        denom += s * pairs;
        if k == 1 {
            denom += p * pairs;
        } else if k >= 2 {
            denom += q * pairs;
        }
    }
    if denom == 0.0 {
        return Err(TheoryError::DegenerateEnsemble);
    }
    Ok(1.0 - weighted_back / denom)
}

/// First-order expected agony of the direct ranking `r^(b)` at exponent
/// `d`: merged classes for `b >= 0`, split classes for `b < 0`.
///
/// `2^{a-b}` must round to an integer (the sums run over integer class
/// structures); the curve in between is interpolated by the closed forms.
///
/// # Errors
///
/// [`TheoryError::NonIntegerClassCount`] / domain validation errors.
pub fn expected_agony_direct(d: f64, inputs: &TheoryInputs) -> Result<f64, TheoryError> {
    check_exponent(d)?;
    let (p, q, s, a, b, n) = (inputs.p, inputs.q, inputs.s, inputs.a, inputs.b, inputs.n_per_class);
    let count = integer_count(a as f64 - b)?;
    if b >= 0.0 {
        // Merge: R~ = 2^{a-b} super-classes of n 2^b nodes.
        let rt = count;
        let bf = libm::exp2(b);
        let np2 = (n * bf) * (n * bf);
        let mut cross = 0.0f64;
        for k in 1..rt {
            cross += libm::pow((k + 1) as f64, d) * (rt - k) as f64;
        }
        let within =
            (bf - 1.0) * p + (bf / 2.0) * (bf + 1.0) * s + (bf / 2.0 - 1.0) * (bf - 1.0) * q;
        Ok(s * np2 * cross + rt as f64 * n * n * within)
    } else {
        // Split: every class divided into beta = 2^{-b} parts of n / beta
        // nodes; only backward (s) pairs are penalized.
        let total = count;
        let beta = libm::exp2(-b);
        let np2 = (n / beta) * (n / beta);
        let mut sum = 0.0f64;
        for k in 0..total {
            sum += libm::pow((k + 1) as f64, d) * (total - k) as f64;
        }
        Ok(s * np2 * sum)
    }
}

/// First-order expected agony of the inverted ranking `r^(i,b)` at
/// exponent `d` (classes merged/split as in [`expected_agony_direct`],
/// then the class order reversed).
///
/// # Errors
///
/// As [`expected_agony_direct`].
pub fn expected_agony_inverted(d: f64, inputs: &TheoryInputs) -> Result<f64, TheoryError> {
    check_exponent(d)?;
    let (p, q, s, a, b, n) = (inputs.p, inputs.q, inputs.s, inputs.a, inputs.b, inputs.n_per_class);
    let count = integer_count(a as f64 - b)?;
    if b >= 0.0 {
        let rt = count;
        let bf = libm::exp2(b);
        let np2 = (n * bf) * (n * bf);
        let mut cross = 0.0f64;
        for k in 2..rt {
            cross += libm::pow((k + 1) as f64, d) * (rt - k) as f64;
        }
        let adjacent = libm::exp2(d) * n * n * (rt as f64 - 1.0) * ((bf * bf - 1.0) * q + p);
        let within =
            (bf - 1.0) * p + (bf / 2.0 - 1.0) * (bf - 1.0) * q + (bf / 2.0) * (bf + 1.0) * s;
        Ok(q * np2 * cross + adjacent + rt as f64 * n * n * within)
    } else {
        let r = integer_count(a as f64)?;
        let beta = count / r; // 2^{-b}, exact: count = R * beta
        let np2 = (n / beta as f64) * (n / beta as f64);
        let mut t1 = 0.0f64;
        let mut t2 = 0.0f64;
        for k in 0..beta {
            let kf = k as f64;
            t1 += libm::pow((k + 1) as f64, d)
                * (r as f64 * (beta - k) as f64 * s + (r as f64 - 1.0) * kf * p);
            t2 += libm::pow((k + 1 + beta) as f64, d)
                * ((r as f64 - 1.0) * (beta - k) as f64 * p + (r as f64 - 2.0) * kf * q);
        }
        let far = (r - 2) * beta;
        let mut t3 = 0.0f64;
        for k in 0..=far {
            t3 += libm::pow((k + 1 + 2 * beta) as f64, d) * (far - k) as f64;
        }
        Ok(np2 * (t1 + t2 + q * t3))
    }
}

fn curve_domain(b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<(f64, f64, f64), TheoryError> {
    check_finite("b", b)?;
    check_finite("p", p)?;
    check_finite("q", q)?;
    check_finite("s", s)?;
    if a == 0 {
        return Err(TheoryError::ZeroA);
    }
    if !(0.0..=a as f64).contains(&b) {
        return Err(TheoryError::BOutOfRange { b, a });
    }
    let denom = common_denominator(p, q, s, a);
    if denom == 0.0 {
        return Err(TheoryError::DegenerateEnsemble);
    }
    Ok((libm::exp2(a as f64), libm::exp2(b), denom))
}

/// Closed-form first-order hierarchy of the direct merged ranking at
/// `d = 1`, continuous in `0 <= b <= a`.
///
/// # Errors
///
/// Domain validation ([`TheoryError::BOutOfRange`],
/// [`TheoryError::DegenerateEnsemble`]).
pub fn hbar_direct_d1(b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<f64, TheoryError> {
    let (big_a, big_b, denom) = curve_domain(b, p, q, s, a)?;
    let num = (1.0 / big_b)
        * (big_a - big_b)
        * (6.0 * p + 3.0 * (-2.0 + big_a * big_b) * q - big_a * (big_a + big_b) * s);
    Ok(num / (3.0 * denom))
}

/// Closed-form first-order hierarchy of the inverted merged ranking at
/// `d = 1`, continuous in `0 <= b <= a`.
///
/// # Errors
///
/// As [`hbar_direct_d1`].
pub fn hbar_inverted_d1(b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<f64, TheoryError> {
    let (big_a, big_b, denom) = curve_domain(b, p, q, s, a)?;
    let num = (1.0 / big_b)
        * (big_b - big_a)
        * (big_a * big_b * (q - 3.0 * s) + (big_a * big_a - 6.0) * q + 6.0 * p);
    Ok(num / (3.0 * denom))
}

/// Closed-form first-order hierarchy of the direct merged ranking at
/// `d = 2`, continuous in `0 <= b <= a`.
///
/// # Errors
///
/// As [`hbar_direct_d1`].
pub fn hbar_direct_d2(b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<f64, TheoryError> {
    let (big_a, big_b, denom) = curve_domain(b, p, q, s, a)?;
    let num = -libm::exp2(-2.0 * b - 1.0)
        * (big_a - big_b)
        * (2.0 * big_a * big_b * big_b * (2.0 * s - 3.0 * q)
            + 5.0 * s * big_a * big_a * big_b
            + big_a * big_a * big_a * s
            - 12.0 * big_b * (p - q));
    Ok(num / (3.0 * denom))
}

/// Closed-form first-order hierarchy of the inverted merged ranking at
/// `d = 2`, continuous in `0 <= b <= a`.
///
/// # Errors
///
/// As [`hbar_direct_d1`].
pub fn hbar_inverted_d2(b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<f64, TheoryError> {
    let (big_a, big_b, denom) = curve_domain(b, p, q, s, a)?;
    let num = libm::exp2(-2.0 * b - 1.0)
        * (big_b - big_a)
        * (2.0 * big_a * big_b * big_b * (2.0 * q - 3.0 * s)
            + (5.0 * big_a * big_a - 36.0) * big_b * q
            + big_a * big_a * big_a * q
            + 36.0 * big_b * p);
    Ok(num / (3.0 * denom))
}

/// Resolution thresholds for `d = 1`.
///
/// The `s_*` fields are the regime boundaries; `b_star` / `b_i_star` are
/// the continuous optimizers of the direct / inverted curves, present when
/// an `s` was supplied and the formula's domain guard passes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdSetD1 {
    /// Merge onset: above this `s` the planted ranking is no longer the
    /// direct optimum.
    pub s_m: f64,
    /// Two-class onset: above this `s` the direct optimum has 2 classes.
    pub s_2: f64,
    /// Optimal merge parameter `b*(s) = log2((2^{2a} s + 6(q - p)) /
    /// (3q - s)) / 2`, for `s_m < s < s_2`.
    pub b_star: Option<f64>,
    /// Military regime: above this `s` the inverted two-class ranking
    /// beats the planted one.
    pub s_i: f64,
    /// Military regime: the planted hierarchy crosses zero here.
    pub s_1: f64,
    /// Military regime: the inverted two-class hierarchy crosses zero.
    pub s_2_i: f64,
    /// Military regime: above this `s` the inverted optimum has more than
    /// two classes (`s_3^i = 3 s_2^i`).
    pub s_3_i: f64,
    /// Optimal inverted merge parameter `b^{i,*}(s) = log2(2p / s) / 2`.
    pub b_i_star: Option<f64>,
}

/// Evaluates every `d = 1` threshold closed form at `(p, q, a)`;
/// optimizers are filled in when `s` is given.
///
/// The formulas describe the regimes `p >= q > s` (twitter-like, direct
/// family) and `q = 0` (military-like, inverted family).
///
/// # Errors
///
/// Validation only ([`TheoryError::ZeroA`], non-finite parameters).
pub fn thresholds_d1(
    p: f64,
    q: f64,
    s: Option<f64>,
    a: u32,
) -> Result<ThresholdSetD1, TheoryError> {
    check_finite("p", p)?;
    check_finite("q", q)?;
    if let Some(sv) = s {
        check_finite("s", sv)?;
    }
    if a == 0 {
        return Err(TheoryError::ZeroA);
    }
    let a1 = libm::exp2(a as f64);
    let a2 = libm::exp2(2.0 * a as f64);
    let a3 = libm::exp2(3.0 * a as f64);
    let b_star = s.and_then(|sv| {
        let arg = (a2 * sv + 6.0 * (q - p)) / (3.0 * q - sv);
        (arg.is_finite() && arg > 0.0).then(|| 0.5 * libm::log2(arg))
    });
    let b_i_star = s.and_then(|sv| {
        let arg = 2.0 * p / sv;
        (arg.is_finite() && arg > 0.0).then(|| 0.5 * libm::log2(arg))
    });
    Ok(ThresholdSetD1 {
        s_m: (6.0 * (a1 - 1.0) * p - 3.0 * (a1 - 2.0) * q) / (a1 - a2 + a3),
        s_2: (3.0 / 7.0) * ((a2 - 12.0) * q + 12.0 * p) / a2,
        b_star,
        s_i: 12.0 * p / (3.0 * a1 + 2.0 * a2 - 2.0),
        s_1: 6.0 * p / (a1 * (1.0 + a1)),
        s_2_i: 4.0 * p / a2,
        s_3_i: 12.0 * p / a2,
        b_i_star,
    })
}

/// Resolution thresholds for `d = 2`; fields mirror [`ThresholdSetD1`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdSetD2 {
    /// Merge onset of the direct family.
    pub s_2m: f64,
    /// Above this `s` the best direct estimate is the trivial ranking.
    pub s_21: f64,
    /// Optimal merge parameter `b_2*(s)` (Cardano closed form), present
    /// when the radicand and logarithm guards pass.
    pub b2_star: Option<f64>,
    /// Military regime: the planted hierarchy crosses zero.
    pub s_21_0: f64,
    /// Military regime: the inverted two-class hierarchy crosses zero.
    pub s_22_i: f64,
    /// Military regime: more than two inverted classes pay off
    /// (`s_{2,3}^i = 3 s_{2,2}^i`).
    pub s_23_i: f64,
    /// Optimal inverted merge parameter `b_2^{i,*}(s) = log2(6p / s) / 2`.
    pub b2_i_star: Option<f64>,
}

/// The Cardano closed form for the optimal direct merge parameter at
/// `d = 2`: `2^{b_2*}` is the unique positive root of the cubic first
/// derivative of the `d = 2` direct curve.
fn b2_star_formula(p: f64, q: f64, s: f64, a: u32) -> Option<f64> {
    let e2a = libm::exp2(2.0 * a as f64);
    let e3a = libm::exp2(3.0 * a as f64);
    let e6a = libm::exp2(6.0 * a as f64);
    let u = 3.0 * q - 2.0 * s;
    let w = e2a * s - 3.0 * p + 3.0 * q;
    // Inner radicand: 3^6 2^{6a} s^2 (3q - 2s)^4 - 2^5 3^3 (3q - 2s)^3
    // (4^a s - 3p + 3q)^3.
    let radicand = 729.0 * e6a * s * s * libm::pow(u, 4.0) - 864.0 * libm::pow(u, 3.0) * w * w * w;
    if !(radicand.is_finite() && radicand >= 0.0) {
        return None;
    }
    let root = libm::sqrt(radicand);
    // Gamma = root + 3^5 2^{3a} q^2 s - 3^4 2^{3a+2} q s^2 + 3^3 2^{3a+2} s^3.
    let gamma = root + 243.0 * e3a * q * q * s - 324.0 * e3a * q * s * s + 108.0 * e3a * s * s * s;
    if !(gamma.is_finite() && gamma > 0.0) || u == 0.0 {
        return None;
    }
    let term1 = 2.0 * libm::cbrt(2.0) * w / libm::cbrt(gamma);
    let term2 = libm::cbrt(gamma / 3.0) / (libm::cbrt(18.0) * u);
    let x = term1 + term2;
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    Some(libm::log2(x))
}

/// Evaluates every `d = 2` threshold closed form at `(p, q, a)`;
/// optimizers are filled in when `s` is given and their domain guards
/// pass (otherwise `None`, never a numeric exception).
///
/// # Errors
///
/// Validation only, as [`thresholds_d1`].
pub fn thresholds_d2(
    p: f64,
    q: f64,
    s: Option<f64>,
    a: u32,
) -> Result<ThresholdSetD2, TheoryError> {
    check_finite("p", p)?;
    check_finite("q", q)?;
    if let Some(sv) = s {
        check_finite("s", sv)?;
    }
    if a == 0 {
        return Err(TheoryError::ZeroA);
    }
    let a1 = libm::exp2(a as f64);
    let a2 = libm::exp2(2.0 * a as f64);
    let a3 = libm::exp2(3.0 * a as f64);
    let b2_star = s.and_then(|sv| b2_star_formula(p, q, sv, a));
    let b2_i_star = s.and_then(|sv| {
        let arg = 6.0 * p / sv;
        (arg.is_finite() && arg > 0.0).then(|| 0.5 * libm::log2(arg))
    });
    Ok(ThresholdSetD2 {
        s_2m: 6.0 * ((2.0 / a1) * (q - p) + 2.0 * p - q) / (-3.0 * a1 + 2.0 * a3 + a2 + 4.0),
        s_21: (a2 * q + 4.0 * p - 4.0 * q) / (3.0 * a2),
        b2_star,
        s_21_0: 12.0 * p / (a1 * (5.0 * a1 + a2 + 4.0)),
        s_22_i: 12.0 * p / a2,
        s_23_i: 36.0 * p / a2,
        b2_i_star,
    })
}

/// Which branch of the piecewise optimum applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Regime {
    /// The planted ranking is optimal (all `R = 2^a` classes resolved).
    Planted,
    /// A merged direct ranking with the continuous optimizer `b*`.
    MergedOptimal,
    /// The two-class direct ranking (`b = a - 1`).
    TwoClasses,
    /// The trivial single-class ranking (hierarchy estimate 0).
    Trivial,
    /// The inverted two-class ranking (`b = a - 1`, order reversed).
    InvertedTwoClasses,
    /// An inverted ranking at the continuous optimizer `b^{i,*}`.
    InvertedOptimal,
    /// Parameters outside the analyzed regimes (`p >= q > s` or `q = 0`);
    /// no estimate is offered.
    Uncovered,
}

/// The piecewise first-order optimum for `d = 1` or `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalSummary {
    /// Selected branch.
    pub regime: Regime,
    /// First-order estimate of the optimal hierarchy (`None` when the
    /// regime is uncovered).
    pub hbar_star: Option<f64>,
    /// The branch's merge parameter (0 for planted, `a - 1` for
    /// two-class branches, the continuous optimizer otherwise; `a` for
    /// the trivial branch).
    pub b_star: Option<f64>,
    /// Continuous optimal class count `2^{a - b*}`.
    pub r_star: Option<f64>,
    /// Best integer-feasible class count (argmax of the branch's curve
    /// family over integer class counts `1..=2^a`).
    pub r_star_int: Option<u32>,
}

/// Argmax of `curve(b)` over integer class counts `R~ = 1..=2^a`
/// evaluated at `b = a - log2(R~)`; ties keep the smaller class count.
fn integer_argmax(a: u32, curve: impl Fn(f64) -> Option<f64>) -> Option<(u32, f64)> {
    if a > 22 {
        return None;
    }
    let r = 1u32 << a;
    let mut best: Option<(u32, f64)> = None;
    for rt in 1..=r {
        let b = a as f64 - libm::log2(rt as f64);
        if let Some(h) = curve(b) {
            if best.map_or(true, |(_, bh)| h > bh) {
                best = Some((rt, h));
            }
        }
    }
    best
}

fn summary_branch(
    regime: Regime,
    b: f64,
    a: u32,
    hbar: Option<f64>,
    r_int: Option<u32>,
) -> OptimalSummary {
    OptimalSummary {
        regime,
        hbar_star: hbar,
        b_star: Some(b),
        r_star: Some(libm::exp2(a as f64 - b)),
        r_star_int: r_int,
    }
}

const UNCOVERED: OptimalSummary = OptimalSummary {
    regime: Regime::Uncovered,
    hbar_star: None,
    b_star: None,
    r_star: None,
    r_star_int: None,
};

/// The piecewise `d = 1` optimum.
///
/// Twitter-like regime (`p >= q > s`): planted for `s <= s_m`, merged at
/// `b*` for `s_m < s < s_2`, two classes for `s >= s_2`. Military-like
/// regime (`q = 0`): planted for `s <= s_i`, inverted two-class for
/// `s_i < s <= s_3^i`, inverted at `b^{i,*}` beyond. Anything else is
/// reported as [`Regime::Uncovered`].
///
/// # Errors
///
/// Validation only.
pub fn optimal_summary_d1(p: f64, q: f64, s: f64, a: u32) -> Result<OptimalSummary, TheoryError> {
    check_finite("s", s)?;
    let th = thresholds_d1(p, q, Some(s), a)?;
    let direct = |b: f64| hbar_direct_d1(b, p, q, s, a).ok();
    let inverted = |b: f64| hbar_inverted_d1(b, p, q, s, a).ok();
    if q == 0.0 {
        if s <= th.s_i {
            let h = hbar_direct_d1(0.0, p, q, s, a)?;
            return Ok(summary_branch(Regime::Planted, 0.0, a, Some(h), int_pow2(a)));
        }
        if s <= th.s_3_i {
            let b = a as f64 - 1.0;
            let h = hbar_inverted_d1(b, p, q, s, a)?;
            return Ok(summary_branch(Regime::InvertedTwoClasses, b, a, Some(h), Some(2)));
        }
        let b = th.b_i_star.unwrap_or(a as f64 - 1.0);
        let h = hbar_inverted_d1(b, p, q, s, a)?;
        let r_int = integer_argmax(a, inverted).map(|(rt, _)| rt);
        return Ok(summary_branch(Regime::InvertedOptimal, b, a, Some(h), r_int));
    }
    if p >= q && q > s {
        if s <= th.s_m {
            let h = hbar_direct_d1(0.0, p, q, s, a)?;
            return Ok(summary_branch(Regime::Planted, 0.0, a, Some(h), int_pow2(a)));
        }
        if s < th.s_2 {
            let best_int = integer_argmax(a, direct);
            return Ok(match th.b_star {
                Some(b) if (0.0..=a as f64).contains(&b) => {
                    let h = hbar_direct_d1(b, p, q, s, a)?;
                    summary_branch(Regime::MergedOptimal, b, a, Some(h), best_int.map(|(rt, _)| rt))
                }
                _ => {
                    // Domain guard failed; fall back to the integer argmax.
                    let (rt, h) = best_int.unwrap_or((1, 0.0));
                    let b = a as f64 - libm::log2(rt as f64);
                    summary_branch(Regime::MergedOptimal, b, a, Some(h), Some(rt))
                }
            });
        }
        let b = a as f64 - 1.0;
        let h = hbar_direct_d1(b, p, q, s, a)?;
        return Ok(summary_branch(Regime::TwoClasses, b, a, Some(h), Some(2)));
    }
    Ok(UNCOVERED)
}

/// The `d = 0` optimum: all-singleton classes are always optimal to first
/// order, with
/// `h_0* = 1 - 2^{2a} (N + 1) s / (D N)` where `D` is the common
/// denominator; under the hierarchy constraint this is at least 1/2.
///
/// # Errors
///
/// [`TheoryError::NotMultipleOfR`] unless `R = 2^a` divides `n_total`;
/// [`TheoryError::DegenerateEnsemble`] when `D = 0`.
pub fn optimal_summary_d0(
    p: f64,
    q: f64,
    s: f64,
    a: u32,
    n_total: u64,
) -> Result<OptimalSummaryD0, TheoryError> {
    check_finite("p", p)?;
    check_finite("q", q)?;
    check_finite("s", s)?;
    if a == 0 {
        return Err(TheoryError::ZeroA);
    }
    let r = 1u64
        .checked_shl(a)
        .filter(|&r| r <= n_total)
        .ok_or(TheoryError::NotMultipleOfR { n: n_total, r: 1u64 << a.min(63) })?;
    if n_total % r != 0 {
        return Err(TheoryError::NotMultipleOfR { n: n_total, r });
    }
    let denom = common_denominator(p, q, s, a);
    if denom == 0.0 {
        return Err(TheoryError::DegenerateEnsemble);
    }
    let nf = n_total as f64;
    let hbar = 1.0 - libm::exp2(2.0 * a as f64) * (nf + 1.0) * s / (denom * nf);
    Ok(OptimalSummaryD0 { hbar_star: hbar, r_star: n_total })
}

/// The `d = 0` optimum report.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalSummaryD0 {
    /// First-order optimal hierarchy estimate.
    pub hbar_star: f64,
    /// Optimal class count: one node per class.
    pub r_star: u64,
}

/// The piecewise `d = 2` optimum.
///
/// Twitter-like regime: planted for `s <= s_{2,m}`, merged at `b_2*` for
/// `s_{2,m} < s <= s_{2,1}`, trivial (estimate 0) beyond. Military-like
/// regime: planted for `s < s_{2,1}^0`, trivial for
/// `s_{2,1}^0 <= s <= s_{2,2}^i`, inverted two-class for
/// `s_{2,2}^i < s < s_{2,3}^i`, inverted at `b_2^{i,*}` beyond.
///
/// # Errors
///
/// Validation only.
pub fn optimal_summary_d2(p: f64, q: f64, s: f64, a: u32) -> Result<OptimalSummary, TheoryError> {
    check_finite("s", s)?;
    let th = thresholds_d2(p, q, Some(s), a)?;
    let direct = |b: f64| hbar_direct_d2(b, p, q, s, a).ok();
    let inverted = |b: f64| hbar_inverted_d2(b, p, q, s, a).ok();
    if q == 0.0 {
        if s < th.s_21_0 {
            let h = hbar_direct_d2(0.0, p, q, s, a)?;
            return Ok(summary_branch(Regime::Planted, 0.0, a, Some(h), int_pow2(a)));
        }
        if s <= th.s_22_i {
            return Ok(summary_branch(Regime::Trivial, a as f64, a, Some(0.0), Some(1)));
        }
        if s < th.s_23_i {
            let b = a as f64 - 1.0;
            let h = hbar_inverted_d2(b, p, q, s, a)?;
            return Ok(summary_branch(Regime::InvertedTwoClasses, b, a, Some(h), Some(2)));
        }
        let b = th.b2_i_star.unwrap_or(a as f64 - 1.0);
        let h = hbar_inverted_d2(b, p, q, s, a)?;
        let r_int = integer_argmax(a, inverted).map(|(rt, _)| rt);
        return Ok(summary_branch(Regime::InvertedOptimal, b, a, Some(h), r_int));
    }
    if p >= q && q > s {
        if s <= th.s_2m {
            let h = hbar_direct_d2(0.0, p, q, s, a)?;
            return Ok(summary_branch(Regime::Planted, 0.0, a, Some(h), int_pow2(a)));
        }
        if s <= th.s_21 {
            let best_int = integer_argmax(a, direct);
            return Ok(match th.b2_star {
                Some(b) if (0.0..=a as f64).contains(&b) => {
                    let h = hbar_direct_d2(b, p, q, s, a)?;
                    summary_branch(Regime::MergedOptimal, b, a, Some(h), best_int.map(|(rt, _)| rt))
                }
                _ => {
                    let (rt, h) = best_int.unwrap_or((1, 0.0));
                    let b = a as f64 - libm::log2(rt as f64);
                    summary_branch(Regime::MergedOptimal, b, a, Some(h), Some(rt))
                }
            });
        }
        return Ok(summary_branch(Regime::Trivial, a as f64, a, Some(0.0), Some(1)));
    }
    Ok(UNCOVERED)
}

fn int_pow2(a: u32) -> Option<u32> {
    (a < 32).then(|| 1u32 << a)
}

/// One row of the [`scaling_check`] table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScalingRow {
    /// Power-of-two exponent.
    pub a: u32,
    /// Class count `R = 2^a`.
    pub r: f64,
    /// `d = 1` merge-onset threshold.
    pub s_m: f64,
    /// `s_m R^2`; converges to `6p - 3q` as `a` grows.
    pub s_m_r2: f64,
    /// `d = 2` merge-onset threshold.
    pub s_2m: f64,
    /// `s_{2,m} R^3`; converges to `3 (2p - q)` as `a` grows.
    pub s_2m_r3: f64,
}

/// Tabulates the resolution-threshold scaling over a range of `a` values:
/// `s_m ~ (6p - 3q) / R^2` and `s_{2,m} ~ 3 (2p - q) / R^3`.
///
/// # Errors
///
/// [`TheoryError::TooFewScalePoints`] for fewer than three `a` values;
/// validation errors otherwise.
pub fn scaling_check(p: f64, q: f64, a_values: &[u32]) -> Result<Vec<ScalingRow>, TheoryError> {
    if a_values.len() < 3 {
        return Err(TheoryError::TooFewScalePoints(a_values.len()));
    }
    let mut rows = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let d1 = thresholds_d1(p, q, None, a)?;
        let d2 = thresholds_d2(p, q, None, a)?;
        let r = libm::exp2(a as f64);
        rows.push(ScalingRow {
            a,
            r,
            s_m: d1.s_m,
            s_m_r2: d1.s_m * r * r,
            s_2m: d2.s_2m,
            s_2m_r3: d2.s_2m * r * r * r,
        });
    }
    Ok(rows)
}
