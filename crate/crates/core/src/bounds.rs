//! Closed-form upper bounds on the best constant `K(p,q,r)`.
//!
//! Every rule produces a [`BoundValue`] carrying the numeric bound and the
//! derivation that led to it. The composite rules for `r ≠ 1` all reduce to
//! the `r = 1` problem at the parameters `(p(1+(r-1)/q), q+r-1)`, so the
//! derivation trees are at most two levels deep.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{IneqError, Result};
use crate::sequence::{ParamTriple, CONSTRAINT_SLACK};

/// Number of grid points scanned before golden-section refinement.
pub const DELTA_GRID_POINTS: usize = 256;
/// Final bracket width of the golden-section refinement.
pub const DELTA_REFINE_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Bennett,
    Eq5Min,
    Eq7DeltaMin,
    Thm2RegimeA,
    Thm2RegimeB,
    ReductionSmallR,
    CaseP1,
    ExactOne,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A named intermediate recorded in a derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detail {
    Num(f64),
    Text(String),
}

impl From<f64> for Detail {
    fn from(x: f64) -> Self {
        Detail::Num(x)
    }
}

impl From<&str> for Detail {
    fn from(s: &str) -> Self {
        Detail::Text(s.to_owned())
    }
}

/// An upper bound on `K(p,q,r)` and the rule tree that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub rule: Rule,
    pub value: f64,
    pub detail: BTreeMap<String, Detail>,
    pub children: Vec<BoundValue>,
}

impl BoundValue {
    fn leaf(rule: Rule, value: f64) -> Self {
        Self {
            rule,
            value,
            detail: BTreeMap::new(),
            children: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<Detail>) -> Self {
        self.detail.insert(key.to_owned(), value.into());
        self
    }

    fn with_child(mut self, child: BoundValue) -> Self {
        self.children.push(child);
        self
    }

    pub fn detail_num(&self, key: &str) -> Option<f64> {
        match self.detail.get(key) {
            Some(Detail::Num(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn detail_text(&self, key: &str) -> Option<&str> {
        match self.detail.get(key) {
            Some(Detail::Text(s)) => Some(s),
            _ => None,
        }
    }
}

/// The admissible range `q(p-1)/(p(q+1)-q) ≤ δ ≤ 1` for `C(p,q,δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl DeltaInterval {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_pq(p, q)?;
        Ok(Self {
            lo: q * (p - 1.0) / (p * (q + 1.0) - q),
            hi: 1.0,
        })
    }

    pub fn contains(&self, delta: f64) -> bool {
        delta >= self.lo - CONSTRAINT_SLACK && delta <= self.hi + CONSTRAINT_SLACK
    }
}

/// Result of minimizing `C(p,q,·)` over its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMinimum {
    pub delta_star: f64,
    pub c_star: f64,
    pub interval: DeltaInterval,
}

impl DeltaMinimum {
    /// True when the minimizer lies strictly inside the interval.
    pub fn is_interior(&self) -> bool {
        self.delta_star > self.interval.lo + 1e-9 && self.delta_star < self.interval.hi - 1e-9
    }
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    let ctx = || format!("p = {p}, q = {q}");
    if !(p.is_finite() && q.is_finite()) {
        return Err(IneqError::domain("p, q finite", ctx()));
    }
    if p < 1.0 {
        return Err(IneqError::domain("p ≥ 1", ctx()));
    }
    if q <= 0.0 {
        return Err(IneqError::domain("q > 0", ctx()));
    }
    Ok(())
}

fn require_p_above_one(p: f64, q: f64) -> Result<()> {
    check_pq(p, q)?;
    if p <= 1.0 {
        return Err(IneqError::Singular(format!(
            "C(p,q,δ) is undefined at p = {p}; use K(1,q,1) = 1"
        )));
    }
    Ok(())
}

/// `((p(q+r)-q)/p)^r`.
pub fn bennett_bound(params: &ParamTriple) -> BoundValue {
    let base = params.bennett_base();
    BoundValue::leaf(Rule::Bennett, base.powf(params.r()))
        .with("base", base)
        .with("exponent", params.r())
}

/// `C(p,q,δ) = (δk(1 + 1/(1/(p-1) + δk - 1)))^δ` with `k = 1 + p/(q(p-1))`.
pub fn c_delta(p: f64, q: f64, delta: f64) -> Result<f64> {
    require_p_above_one(p, q)?;
    let interval = DeltaInterval::new(p, q)?;
    if !delta.is_finite() || !interval.contains(delta) {
        return Err(IneqError::domain(
            "q(p-1)/(p(q+1)-q) ≤ δ ≤ 1",
            format!("δ = {delta}, interval [{}, {}]", interval.lo, interval.hi),
        ));
    }
    Ok(c_delta_unchecked(p, q, delta))
}

fn c_delta_unchecked(p: f64, q: f64, delta: f64) -> f64 {
    let k = 1.0 + p / (q * (p - 1.0));
    let dk = delta * k;
    let inner = 1.0 / (p - 1.0) + dk - 1.0;
    (dk * (1.0 + 1.0 / inner)).powf(delta)
}

/// Minimizes `C(p,q,·)` by a uniform grid scan followed by golden-section
/// refinement around the best grid cell. Ties go to the smallest `δ`.
pub fn minimize_c_delta(p: f64, q: f64) -> Result<DeltaMinimum> {
    require_p_above_one(p, q)?;
    let interval = DeltaInterval::new(p, q)?;
    let DeltaInterval { lo, hi } = interval;
    let f = |d: f64| c_delta_unchecked(p, q, d);

    let last = DELTA_GRID_POINTS - 1;
    let grid: Vec<f64> = (0..DELTA_GRID_POINTS)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => lo + (hi - lo) * i as f64 / last as f64,
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&d| f(d)).collect();
    let mut best = 0;
    for i in 1..grid.len() {
        if values[i] < values[best] {
            best = i;
        }
    }

    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(last)];
    let (d_ref, c_ref) = golden_section(f, a, b, DELTA_REFINE_WIDTH);

    let (delta_star, c_star) = if c_ref < values[best] || (c_ref == values[best] && d_ref < grid[best]) {
        (d_ref, c_ref)
    } else {
        (grid[best], values[best])
    };
    Ok(DeltaMinimum {
        delta_star,
        c_star,
        interval,
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`; returns the best
/// point evaluated.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fd < fc { (d, fd) } else { (c, fc) };
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 || (fc == best.1 && c < best.0) {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Exponents `(e1, e2)` of the Hölder split that reduces `K(p,q,r)` to the
/// `r = 1` problem and to `K(1, q/p, (p(q+r)-q)/p)`; they sum to 1.
pub fn reduction_exponents(p: f64, q: f64, r: f64) -> Result<(f64, f64)> {
    check_pq(p, q)?;
    if !(r.is_finite() && r >= 1.0) {
        return Err(IneqError::domain("r ≥ 1", format!("r = {r}")));
    }
    if p == 1.0 && r == 1.0 {
        return Err(IneqError::Degenerate(
            "reduction exponents are undefined at p = r = 1".into(),
        ));
    }
    let den = p * q + p * (r - 1.0) - q;
    Ok((q * (p - 1.0) / den, p * (r - 1.0) / den))
}

/// Bound on `K(1,q,r)` from a bound `k_base` on `K(1+(r-1)/q, q+r-1, 1)`:
/// `r^{r-1}·k_base` for `r ≥ 2`, `r·k_base^{r-1}` for `1 ≤ r ≤ 2`.
pub fn case_p1_bound(q: f64, r: f64, k_base: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(IneqError::domain("q > 0", format!("q = {q}")));
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(IneqError::domain("r ≥ 1", format!("r = {r}")));
    }
    if r >= 2.0 {
        Ok(r.powf(r - 1.0) * k_base)
    } else {
        Ok(r * k_base.powf(r - 1.0))
    }
}

/// Bound values computed during one derivation, keyed by rule and rounded
/// parameters.
#[derive(Debug, Default)]
pub struct BoundEngine {
    cache: HashMap<(Rule, [i64; 3]), BoundValue>,
}

fn cache_key(rule: Rule, xs: [f64; 3]) -> (Rule, [i64; 3]) {
    (rule, xs.map(|x| (x * 1e12).round() as i64))
}

impl BoundEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.len()
    }

    /// Bound on `K(p,q,1)`: exactly 1 at `p = 1`, otherwise the smaller of
    /// the classical bound and `min_δ C(p,q,δ)`.
    pub fn k_r1_bound(&mut self, p: f64, q: f64) -> Result<BoundValue> {
        check_pq(p, q)?;
        if p == 1.0 {
            return Ok(BoundValue::leaf(Rule::ExactOne, 1.0));
        }
        let key = cache_key(Rule::Eq7DeltaMin, [p, q, 1.0]);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let params = ParamTriple::new(p, q, 1.0)?;
        let classical = bennett_bound(&params);
        let min = minimize_c_delta(p, q)?;
        let (value, winner) = if min.c_star < classical.value {
            (min.c_star, "c_delta")
        } else {
            (classical.value, "bennett")
        };
        let v = BoundValue::leaf(Rule::Eq7DeltaMin, value)
            .with("delta_lo", min.interval.lo)
            .with("delta_hi", min.interval.hi)
            .with("delta_star", min.delta_star)
            .with("c_star", min.c_star)
            .with("winner", winner)
            .with_child(classical);
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    /// Composite bound for `r ≥ 1`, `(p, r) ≠ (1, 1)`, taking the minimum of
    /// every regime formula that applies at `s = q + r - q/p`.
    pub fn thm2_bound(&mut self, params: &ParamTriple) -> Result<BoundValue> {
        let (p, q, r) = (params.p(), params.q(), params.r());
        if r < 1.0 {
            return Err(IneqError::domain("r ≥ 1", format!("r = {r}")));
        }
        if p == 1.0 && r == 1.0 {
            return Err(IneqError::domain("(p, r) ≠ (1, 1)", "p = 1, r = 1"));
        }
        let s = q + r - q / p;
        if s < 1.0 - CONSTRAINT_SLACK {
            return Err(IneqError::Regime(s));
        }
        let key = cache_key(Rule::Thm2RegimeA, [p, q, r]);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }

        let (bp, bq) = params.reduced_pq();
        let base = self.k_r1_bound(bp, bq)?;
        let k_base = base.value;
        let b = params.bennett_base();
        let (_, e2) = reduction_exponents(p, q, r)?;
        let in_a = s >= 2.0 - CONSTRAINT_SLACK;
        let in_b = s <= 2.0 + CONSTRAINT_SLACK;
        let cand_a = in_a.then(|| k_base * b.powf(r - 1.0));
        let cand_b = in_b.then(|| k_base.powf(r - e2) * b.powf(e2));

        let (rule, value) = match (cand_a, cand_b) {
            (Some(a), Some(bv)) if bv < a => (Rule::Thm2RegimeB, bv),
            (Some(a), _) => (Rule::Thm2RegimeA, a),
            (None, Some(bv)) => (Rule::Thm2RegimeB, bv),
            (None, None) => unreachable!("s ≥ 1 lies in at least one regime"),
        };

        let mut v = BoundValue::leaf(rule, value)
            .with("s", s)
            .with("k_base", k_base)
            .with("base_p", bp)
            .with("base_q", bq)
            .with("bennett_base", b)
            .with("e2", e2);
        if let Some(a) = cand_a {
            v = v.with("regime_a", a);
        }
        if let Some(bv) = cand_b {
            v = v.with("regime_b", bv);
        }
        let v = if p == 1.0 {
            // e1 = 0, so the split is the p = 1 partial-summation bound itself
            let direct = case_p1_bound(q, r, k_base)?;
            let mut v = v.with("case_p1", direct);
            if direct < v.value {
                v.value = direct;
            }
            v.rule = Rule::CaseP1;
            v
        } else {
            v
        };
        let v = v.with_child(base);
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    /// `K(p,q,r) ≤ K(p(1+(r-1)/q), q+r-1, 1)^r` for `0 < r ≤ 1`.
    pub fn reduction_small_r(&mut self, params: &ParamTriple) -> Result<BoundValue> {
        let r = params.r();
        if r > 1.0 {
            return Err(IneqError::domain("r ≤ 1", format!("r = {r}")));
        }
        let (bp, bq) = params.reduced_pq();
        if bq <= 0.0 {
            return Err(IneqError::domain("q+r-1 > 0", format!("q+r-1 = {bq}")));
        }
        if bp < 1.0 - CONSTRAINT_SLACK {
            return Err(IneqError::domain("p(1+(r-1)/q) ≥ 1", format!("p(1+(r-1)/q) = {bp}")));
        }
        let base = self.k_r1_bound(bp.max(1.0), bq)?;
        Ok(BoundValue::leaf(Rule::ReductionSmallR, base.value.powf(r))
            .with("base_p", bp)
            .with("base_q", bq)
            .with_child(base))
    }

    /// Every rule that applies at `params`, in a fixed order.
    pub fn candidates(&mut self, params: &ParamTriple) -> Result<Vec<BoundValue>> {
        let (p, q, r) = (params.p(), params.q(), params.r());
        let mut out = Vec::new();
        if p == 1.0 && r == 1.0 {
            out.push(BoundValue::leaf(Rule::ExactOne, 1.0));
        } else {
            if r == 1.0 {
                out.push(self.k_r1_bound(p, q)?);
            }
            if r >= 1.0 {
                out.push(self.thm2_bound(params)?);
            }
        }
        if r <= 1.0 {
            out.push(self.reduction_small_r(params)?);
        }
        out.push(bennett_bound(params));
        Ok(out)
    }

    /// The smallest applicable bound, returned with its own derivation.
    pub fn best_bound(&mut self, params: &ParamTriple) -> Result<BoundValue> {
        let cands = self.candidates(params)?;
        let mut best: Option<BoundValue> = None;
        for c in cands {
            if best.as_ref().is_none_or(|b| c.value < b.value) {
                best = Some(c);
            }
        }
        Ok(best.expect("the classical bound always applies"))
    }
}

pub fn k_r1_bound(p: f64, q: f64) -> Result<BoundValue> {
    BoundEngine::new().k_r1_bound(p, q)
}

pub fn thm2_bound(params: &ParamTriple) -> Result<BoundValue> {
    BoundEngine::new().thm2_bound(params)
}

pub fn reduction_small_r(params: &ParamTriple) -> Result<BoundValue> {
    BoundEngine::new().reduction_small_r(params)
}

pub fn best_bound(params: &ParamTriple) -> Result<BoundValue> {
    BoundEngine::new().best_bound(params)
}

/// Three-term closed form for `K(p,q,1)`: the classical bound and `C` at
/// both ends of the δ-interval. At `p = 1` only the classical term applies.
pub fn cor0_bound(p: f64, q: f64) -> Result<BoundValue> {
    check_pq(p, q)?;
    let t1 = (p * (q + 1.0) - q) / p;
    if p == 1.0 {
        return Ok(BoundValue::leaf(Rule::Eq5Min, t1)
            .with("term_bennett", t1)
            .with("winner", "bennett"));
    }
    let t2 = p.powf((p - 1.0) * q / ((p - 1.0) * q + p));
    let t3 = (1.0 + (p - 1.0) * q / (p + q)) * (1.0 + p / (q * (p - 1.0)));
    let (mut value, mut winner) = (t1, "bennett");
    if t2 < value {
        (value, winner) = (t2, "delta_lo");
    }
    if t3 < value {
        (value, winner) = (t3, "delta_one");
    }
    Ok(BoundValue::leaf(Rule::Eq5Min, value)
        .with("term_bennett", t1)
        .with("term_delta_lo", t2)
        .with("term_delta_one", t3)
        .with("winner", winner))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, q: f64, r: f64) -> ParamTriple {
        ParamTriple::new(p, q, r).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        crate::numeric::rel_diff(a, b)
    }

    #[test]
    fn bennett_examples() {
        assert_eq!(bennett_bound(&params(1.0, 2.0, 2.0)).value, 4.0);
        assert_eq!(bennett_bound(&params(2.0, 1.0, 1.0)).value, 1.5);
        for q in [0.25, 1.0, 3.0, 17.0] {
            assert_eq!(bennett_bound(&params(1.0, q, 1.0)).value, 1.0);
        }
    }

    #[test]
    fn c_delta_values() {
        assert!(rel(c_delta(6.0, 6.0, 1.0).unwrap(), 4.2) < 1e-15);
        assert!(rel(c_delta(6.0, 6.0, 5.0 / 6.0).unwrap(), 6f64.powf(5.0 / 6.0)) < 1e-14);
        // high-precision reference value
        let v = c_delta(6.0, 6.0, 23.0 / 24.0).unwrap();
        assert!(rel(v, 4.168_758_620_305_256) < 1e-13);
        assert!(v < 4.2);
    }

    #[test]
    fn c_delta_errors() {
        assert!(matches!(c_delta(1.0, 2.0, 1.0), Err(IneqError::Singular(_))));
        assert!(matches!(c_delta(0.5, 2.0, 1.0), Err(IneqError::Domain { .. })));
        assert!(matches!(c_delta(6.0, 6.0, 0.5), Err(IneqError::Domain { .. })));
        assert!(matches!(c_delta(6.0, 6.0, 1.01), Err(IneqError::Domain { .. })));
    }

    #[test]
    fn delta_interval() {
        let i = DeltaInterval::new(6.0, 6.0).unwrap();
        assert!(rel(i.lo, 5.0 / 6.0) < 1e-15);
        assert_eq!(i.hi, 1.0);
        assert_eq!(DeltaInterval::new(1.0, 3.0).unwrap().lo, 0.0);
    }

    #[test]
    fn minimize_examples() {
        let m = minimize_c_delta(6.0, 6.0).unwrap();
        assert!(m.is_interior());
        assert!(m.c_star < 4.2);
        assert!(rel(m.c_star, 4.167_774_305_896_72) < 1e-12);
        assert!((m.delta_star - 0.949_954_413_846_569).abs() < 1e-6);

        let m = minimize_c_delta(1.5, 3.0).unwrap();
        assert_eq!(m.delta_star, 0.5);
        assert!(rel(m.c_star, 1.5f64.sqrt()) < 1e-15);

        let m = minimize_c_delta(2.0, 1.0).unwrap();
        assert!(m.c_star <= 2f64.powf(1.0 / 3.0) * (1.0 + 1e-15));

        assert!(matches!(minimize_c_delta(1.0, 1.0), Err(IneqError::Singular(_))));
    }

    #[test]
    fn minimum_never_exceeds_endpoints() {
        for p in [1.1, 1.5, 2.0, 3.0, 6.0, 10.0, 40.0] {
            for q in [0.2, 0.5, 1.0, 3.0, 6.0, 25.0] {
                let m = minimize_c_delta(p, q).unwrap();
                let lo = c_delta(p, q, m.interval.lo).unwrap();
                let hi = c_delta(p, q, 1.0).unwrap();
                assert!(m.c_star <= lo.min(hi), "p={p} q={q}");
                assert!(m.interval.contains(m.delta_star));
            }
        }
    }

    #[test]
    fn k_r1_examples() {
        for q in [0.5, 1.0, 2.0, 10.0] {
            let b = k_r1_bound(1.0, q).unwrap();
            assert_eq!((b.rule, b.value), (Rule::ExactOne, 1.0));
        }
        let b = k_r1_bound(6.0, 6.0).unwrap();
        assert_eq!(b.rule, Rule::Eq7DeltaMin);
        assert!(b.value < 4.2);
        let b = k_r1_bound(1.5, 3.0).unwrap();
        assert!(rel(b.value, 1.224_744_871_391_589) < 1e-15);
        assert!(k_r1_bound(0.9, 1.0).is_err());
    }

    #[test]
    fn cor0_examples() {
        let b = cor0_bound(6.0, 6.0).unwrap();
        assert!((b.value - 4.2).abs() < 1e-12);
        assert_eq!(b.detail_text("winner"), Some("delta_one"));
        let b = cor0_bound(2.0, 1.0).unwrap();
        assert!((b.value - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(b.detail_text("winner"), Some("delta_lo"));
        let b = cor0_bound(1.5, 3.0).unwrap();
        assert!(rel(b.value, 1.5f64.sqrt()) < 1e-15);
        assert_eq!(b.detail_num("term_bennett"), Some(2.0));
        assert!(rel(b.detail_num("term_delta_one").unwrap(), 8.0 / 3.0) < 1e-15);
        assert_eq!(cor0_bound(1.0, 4.0).unwrap().value, 1.0);
    }

    #[test]
    fn reduction_exponent_examples() {
        assert_eq!(reduction_exponents(1.0, 2.0, 2.0).unwrap(), (0.0, 1.0));
        assert_eq!(reduction_exponents(2.0, 2.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(reduction_exponents(2.0, 2.0, 2.0).unwrap(), (0.5, 0.5));
        assert!(matches!(
            reduction_exponents(1.0, 2.0, 1.0),
            Err(IneqError::Degenerate(_))
        ));
        assert!(reduction_exponents(2.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn case_p1_examples() {
        let v = case_p1_bound(2.0, 2.0, 1.5f64.sqrt()).unwrap();
        assert!(rel(v, 6f64.sqrt()) < 1e-15);
        assert_eq!(case_p1_bound(3.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(case_p1_bound(1.0, 3.0, 1.7).unwrap(), 9.0 * 1.7);
        assert!(case_p1_bound(1.0, 0.5, 1.0).is_err());
        // branches meet at r = 2
        let k = 1.37;
        assert_eq!(2f64.powf(1.0) * k, 2.0 * k.powf(1.0));
    }

    #[test]
    fn thm2_examples() {
        let b = thm2_bound(&params(1.0, 2.0, 2.0)).unwrap();
        assert!(rel(b.value, 6f64.sqrt()) < 1e-15);
        assert_eq!(b.rule, Rule::CaseP1);
        assert_eq!(b.children[0].value, k_r1_bound(1.5, 3.0).unwrap().value);

        for (p, q) in [(2.0, 1.0), (6.0, 6.0), (3.0, 0.5)] {
            let t = thm2_bound(&params(p, q, 1.0)).unwrap();
            assert_eq!(t.value, k_r1_bound(p, q).unwrap().value);
        }

        let b = thm2_bound(&params(2.0, 0.5, 1.2)).unwrap();
        assert_eq!(b.rule, Rule::Thm2RegimeB);
        assert!(rel(b.detail_num("e2").unwrap(), 4.0 / 9.0) < 1e-15);
        assert!(rel(b.value, 1.501_654_288_918_299) < 1e-13);

        assert!(thm2_bound(&params(1.0, 2.0, 1.0)).is_err());
        assert!(thm2_bound(&params(2.0, 2.0, 0.5)).is_err());
    }

    #[test]
    fn small_r_examples() {
        for (p, q) in [(2.0, 1.0), (6.0, 6.0)] {
            let b = reduction_small_r(&params(p, q, 1.0)).unwrap();
            assert_eq!(b.value, k_r1_bound(p, q).unwrap().value);
        }
        let b = reduction_small_r(&params(2.0, 2.0, 0.5)).unwrap();
        assert!(b.value <= 1.5f64.powf(1.0 / 6.0) * (1.0 + 1e-15));
        assert!(rel(b.value, 1.069_913_193_933_663) < 1e-13);
        assert!(ParamTriple::new(1.0, 2.0, 0.5).is_err());
        assert!(reduction_small_r(&params(2.0, 2.0, 1.5)).is_err());
    }

    #[test]
    fn best_bound_examples() {
        let b = best_bound(&params(1.0, 2.0, 2.0)).unwrap();
        assert!(rel(b.value, 6f64.sqrt()) < 1e-15);
        for q in [0.5, 1.0, 7.0] {
            let b = best_bound(&params(1.0, q, 1.0)).unwrap();
            assert_eq!((b.rule, b.value), (Rule::ExactOne, 1.0));
        }
        let b = best_bound(&params(6.0, 6.0, 1.0)).unwrap();
        assert_eq!(b.rule, Rule::Eq7DeltaMin);
        assert!(b.value < 4.2);
    }

    #[test]
    fn engine_reuses_base_derivations() {
        let mut engine = BoundEngine::new();
        let pr = params(3.0, 2.0, 1.0);
        engine.best_bound(&pr).unwrap();
        // one k_r1 entry and one thm2 entry, even though three rules used the base
        assert_eq!(engine.cached_entries(), 2);
    }
}
