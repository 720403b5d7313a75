//! Finite nonnegative sequences and exact evaluation of both sides of each
//! inequality instance.
//!
//! Every instance handled here is homogeneous: scaling the sequence by `λ`
//! multiplies both sides by `λ^D` for an instance-specific degree `D`. The
//! evaluators divide the sequence by its largest term, sum in that
//! normalized frame (where the dominant summand on each side is at least 1),
//! and rescale by `max^D` at the end. The ratio is taken in the normalized
//! frame, so it stays finite even when `lhs`/`rhs` themselves overflow.

use serde::{Deserialize, Serialize};

use crate::error::{IneqError, Result};
use crate::numeric::{pow0, prefix_sums, tail_sums, CompensatedSum};

/// Slack used when testing closed parameter constraints such as
/// `(p(q+r)-q)/p ≥ 1`, so that values landing on the boundary after one
/// rounding are still accepted.
pub(crate) const CONSTRAINT_SLACK: f64 = 1e-12;

/// A finite list of nonnegative, finite terms `a_1..a_N` with `N ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sequence {
    terms: Vec<f64>,
}

impl Sequence {
    pub fn new(terms: Vec<f64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(IneqError::InvalidSequence(
                "sequence must have at least one term".into(),
            ));
        }
        if let Some((i, t)) = terms.iter().enumerate().find(|(_, t)| !t.is_finite() || **t < 0.0) {
            return Err(IneqError::InvalidSequence(format!(
                "term a_{} = {t} is not a finite nonnegative number",
                i + 1
            )));
        }
        Ok(Self { terms })
    }

    /// `a_1 = 1`, every other term zero.
    pub fn spike(len: usize) -> Self {
        let mut terms = vec![0.0; len.max(1)];
        terms[0] = 1.0;
        Self { terms }
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_term(&self) -> f64 {
        self.terms.iter().copied().fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.terms.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn has_positive(&self) -> bool {
        self.terms.iter().any(|&t| t > 0.0)
    }

    pub fn reversed(&self) -> Self {
        Self {
            terms: self.terms.iter().rev().copied().collect(),
        }
    }

    /// Multiplies every term by `factor`, which must be finite and nonnegative.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.terms.iter().map(|t| t * factor).collect())
    }

    /// Appends `extra` zero terms.
    pub fn zero_padded(&self, extra: usize) -> Self {
        let mut terms = self.terms.clone();
        terms.resize(terms.len() + extra, 0.0);
        Self { terms }
    }

    /// Rescales to unit sum. Fails on an all-zero sequence.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(IneqError::Degenerate("cannot normalize an all-zero sequence".into()));
        }
        Ok(Self {
            terms: self.terms.iter().map(|t| t / total).collect(),
        })
    }

    fn require_positive(&self) -> Result<()> {
        if self.has_positive() {
            Ok(())
        } else {
            Err(IneqError::Degenerate("sequence has no positive term".into()))
        }
    }

    /// Terms divided by the largest term, together with that largest term.
    fn max_normalized(&self) -> (Vec<f64>, f64) {
        let m = self.max_term();
        if m == 1.0 {
            (self.terms.clone(), 1.0)
        } else {
            (self.terms.iter().map(|t| t / m).collect(), m)
        }
    }
}

impl TryFrom<Vec<f64>> for Sequence {
    type Error = IneqError;

    fn try_from(terms: Vec<f64>) -> Result<Self> {
        Sequence::new(terms)
    }
}

impl From<Sequence> for Vec<f64> {
    fn from(s: Sequence) -> Self {
        s.terms
    }
}

/// A validated exponent triple: `p ≥ 1`, `q > 0`, `r > 0`, `(p(q+r)-q)/p ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTriple {
    p: f64,
    q: f64,
    r: f64,
}

impl ParamTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let ctx = || format!("p = {p}, q = {q}, r = {r}");
        if !(p.is_finite() && q.is_finite() && r.is_finite()) {
            return Err(IneqError::domain("p, q, r finite", ctx()));
        }
        if p < 1.0 {
            return Err(IneqError::domain("p ≥ 1", ctx()));
        }
        if q <= 0.0 {
            return Err(IneqError::domain("q > 0", ctx()));
        }
        if r <= 0.0 {
            return Err(IneqError::domain("r > 0", ctx()));
        }
        if (p * (q + r) - q) / p < 1.0 - CONSTRAINT_SLACK {
            return Err(IneqError::domain("(p(q+r)-q)/p ≥ 1", ctx()));
        }
        Ok(Self { p, q, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `(p(q+r)-q)/p`, the base of the classical bound.
    pub fn bennett_base(&self) -> f64 {
        (self.p * (self.q + self.r) - self.q) / self.p
    }

    /// Parameters `(p(1+(r-1)/q), q+r-1)` of the `r = 1` problem every
    /// reduction rule lands on.
    pub fn reduced_pq(&self) -> (f64, f64) {
        (self.p * (1.0 + (self.r - 1.0) / self.q), self.q + self.r - 1.0)
    }

    /// Common homogeneity degree `(p+q)(1+r/q)` of both sides of the main form.
    pub fn degree(&self) -> f64 {
        (self.p + self.q) * (1.0 + self.r / self.q)
    }
}

/// Both sides of one inequality instance and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEval {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioEval {
    /// Builds the result from sums taken in the max-normalized frame.
    fn from_normalized(lhs: f64, rhs: f64, max_term: f64, degree: f64) -> Self {
        let scale = if max_term == 1.0 {
            1.0
        } else {
            (degree * max_term.ln()).exp()
        };
        Self {
            lhs: lhs * scale,
            rhs: rhs * scale,
            ratio: lhs / rhs,
        }
    }
}

/// Prefix sums `A_n` and tail sums `A_{n,N}` of `a`.
pub fn partial_sums(a: &Sequence) -> (Vec<f64>, Vec<f64>) {
    (prefix_sums(&a.terms), tail_sums(&a.terms))
}

/// `∑ aₙᵖAₙ^q (∑_{k≥n} aₖ^{1+p/q})ʳ` against `∑ (aₙᵖAₙ^q)^{1+r/q}`.
pub fn evaluate_main(a: &Sequence, params: &ParamTriple) -> Result<RatioEval> {
    a.require_positive()?;
    let ParamTriple { p, q, r } = *params;
    let (x, m) = a.max_normalized();
    let heads = prefix_sums(&x);
    let inner: Vec<f64> = x.iter().map(|&t| pow0(t, 1.0 + p / q)).collect();
    let tails = tail_sums(&inner);

    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    for n in 0..x.len() {
        if x[n] == 0.0 {
            continue;
        }
        let base = pow0(x[n], p) * pow0(heads[n], q);
        lhs.add(base * pow0(tails[n], r));
        rhs.add(pow0(base, 1.0 + r / q));
    }
    Ok(RatioEval::from_normalized(lhs.value(), rhs.value(), m, params.degree()))
}

/// The reversed form: `∑ aₙᵖA_{n,N}^q (∑_{k≤n} aₖ^{1+p/q})ʳ` against
/// `∑ (aₙᵖA_{n,N}^q)^{1+r/q}`, with tail sums `A_{n,N}` in place of prefix sums.
pub fn evaluate_dual(a: &Sequence, params: &ParamTriple) -> Result<RatioEval> {
    a.require_positive()?;
    let ParamTriple { p, q, r } = *params;
    let (x, m) = a.max_normalized();
    let tails = tail_sums(&x);
    let inner: Vec<f64> = x.iter().map(|&t| pow0(t, 1.0 + p / q)).collect();
    let heads = prefix_sums(&inner);

    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    for n in (0..x.len()).rev() {
        if x[n] == 0.0 {
            continue;
        }
        let base = pow0(x[n], p) * pow0(tails[n], q);
        lhs.add(base * pow0(heads[n], r));
        rhs.add(pow0(base, 1.0 + r / q));
    }
    Ok(RatioEval::from_normalized(lhs.value(), rhs.value(), m, params.degree()))
}

/// Littlewood's original instance, `(p, q, r) = (1, 2, 2)`.
pub fn evaluate_littlewood(a: &Sequence) -> Result<RatioEval> {
    let params = ParamTriple { p: 1.0, q: 2.0, r: 2.0 };
    evaluate_main(a, &params)
}

/// `∑ aₙ^outer · ∑_{k≤n} aₖ^inner Aₖ^weight` and `∑ aₙ^α Aₙ^β` in the
/// max-normalized frame.
fn nested_prefix_sides(x: &[f64], outer: f64, inner: f64, weight: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let heads = prefix_sums(x);
    let mut running = CompensatedSum::new();
    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    for n in 0..x.len() {
        if x[n] == 0.0 {
            continue;
        }
        running.add(pow0(x[n], inner) * pow0(heads[n], weight));
        lhs.add(pow0(x[n], outer) * running.value());
        rhs.add(pow0(x[n], alpha) * pow0(heads[n], beta));
    }
    (lhs.value(), rhs.value())
}

/// `∑ aₙ³ ∑_{k≤n} aₖ²Aₖ` against `∑ aₙ⁴Aₙ²`, without any constant.
pub fn evaluate_eq3(a: &Sequence) -> Result<RatioEval> {
    a.require_positive()?;
    let (x, m) = a.max_normalized();
    let (lhs, rhs) = nested_prefix_sides(&x, 3.0, 2.0, 1.0, 4.0, 2.0);
    Ok(RatioEval::from_normalized(lhs, rhs, m, 6.0))
}

/// Exponents `α`, `β`, `δ` of the prefix-weighted inequality with constant `2^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtzExponents {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

/// Validates `p, q ≥ 1`, `r > 0`, `r(p-1) ≤ 2(q-1)` and returns `(α, β, δ)`.
pub fn ctz_exponents(p: f64, q: f64, r: f64) -> Result<CtzExponents> {
    let ctx = || format!("p = {p}, q = {q}, r = {r}");
    if !(p.is_finite() && q.is_finite() && r.is_finite()) {
        return Err(IneqError::domain("p, q, r finite", ctx()));
    }
    if p < 1.0 {
        return Err(IneqError::domain("p ≥ 1", ctx()));
    }
    if q < 1.0 {
        return Err(IneqError::domain("q ≥ 1", ctx()));
    }
    if r <= 0.0 {
        return Err(IneqError::domain("r > 0", ctx()));
    }
    if r * (p - 1.0) > 2.0 * (q - 1.0) + CONSTRAINT_SLACK {
        return Err(IneqError::domain("r(p-1) ≤ 2(q-1)", ctx()));
    }
    Ok(CtzExponents {
        alpha: ((p - 1.0) * (q + r) + p * p + 1.0) / (p + 1.0),
        beta: (2.0 * q + 2.0 * r + p - 1.0) / (p + 1.0),
        delta: (q + r - 1.0) / (p + q + r),
    })
}

/// `∑ aₙᵖ ∑_{k≤n} aₖ^q Aₖʳ` against `2^δ ∑ aₙ^α Aₙ^β`; the constant is
/// folded into `rhs`, so the inequality holds iff `ratio ≤ 1`.
pub fn evaluate_ctz(a: &Sequence, p: f64, q: f64, r: f64) -> Result<RatioEval> {
    let exps = ctz_exponents(p, q, r)?;
    a.require_positive()?;
    let (x, m) = a.max_normalized();
    let (lhs, rhs) = nested_prefix_sides(&x, p, q, r, exps.alpha, exps.beta);
    let rhs = rhs * exps.delta.exp2();
    Ok(RatioEval::from_normalized(lhs, rhs, m, p + q + r))
}
