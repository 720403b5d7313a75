//! Finite-instance checks of the auxiliary inequalities (Copson's inequality
//! and its tail-sum dual, the negative-power tail bounds) and seeded suites
//! that run them, and the main-form properties, over random instances.
//!
//! Every statement checked here is a theorem, so a failing check always
//! points at an evaluation bug.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundEngine;
use crate::error::{IneqError, Result};
use crate::numeric::{compensated_sum, pow0, prefix_sums, rel_diff, tail_sums};
use crate::parallel::Parallelism;
use crate::sequence::{evaluate_ctz, evaluate_dual, evaluate_eq3, evaluate_main, ParamTriple, Sequence};

/// Relative slack allowed by [`CheckReport::holds`].
pub const HOLDS_TOLERANCE: f64 = 1e-9;
/// Maximum relative per-field discrepancy accepted by the duality suite.
pub const DUALITY_TOLERANCE: f64 = 1e-12;
/// Longest random sequence drawn by the suites.
pub const MAX_RANDOM_LEN: usize = 32;

pub const GRID_P: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 6.0, 10.0];
pub const GRID_Q: [f64; 5] = [0.5, 1.0, 2.0, 6.0, 10.0];
pub const GRID_R: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 5.0];

/// The inputs a check was run on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sequences: BTreeMap<String, Vec<f64>>,
    pub exponents: BTreeMap<String, f64>,
    pub indices: BTreeMap<String, usize>,
}

impl Witness {
    fn seq(mut self, name: &str, s: &Sequence) -> Self {
        self.sequences.insert(name.into(), s.terms().to_vec());
        self
    }

    fn exp(mut self, name: &str, v: f64) -> Self {
        self.exponents.insert(name.into(), v);
        self
    }

    fn idx(mut self, name: &str, v: usize) -> Self {
        self.indices.insert(name.into(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub witness: Witness,
}

impl CheckReport {
    pub fn new(lhs: f64, rhs: f64, witness: Witness) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs * (1.0 + HOLDS_TOLERANCE),
            witness,
        }
    }

    /// `lhs / rhs`, the quantity the suites rank instances by.
    pub fn tightness(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else if self.rhs == 0.0 {
            f64::INFINITY
        } else {
            self.lhs / self.rhs
        }
    }
}

fn check_copson_exponents(c: f64, d: f64) -> Result<()> {
    let ctx = || format!("c = {c}, d = {d}");
    if !(c.is_finite() && d.is_finite()) {
        return Err(IneqError::domain("c, d finite", ctx()));
    }
    if c <= 1.0 {
        return Err(IneqError::domain("c > 1", ctx()));
    }
    if d < c {
        return Err(IneqError::domain("d ≥ c", ctx()));
    }
    Ok(())
}

fn check_lengths(lambda: &Sequence, x: &Sequence) -> Result<()> {
    if lambda.len() != x.len() {
        return Err(IneqError::InvalidSequence(format!(
            "λ has {} terms but x has {}",
            lambda.len(),
            x.len()
        )));
    }
    Ok(())
}

/// `∑ λₙΛₙ^{-c}(∑_{k≤n} λₖxₖ)^d ≤ (d/(c-1))^d ∑ λₙΛₙ^{d-c}xₙ^d`, `d ≥ c > 1`, `λ₁ > 0`.
pub fn check_copson(lambda: &Sequence, x: &Sequence, c: f64, d: f64) -> Result<CheckReport> {
    check_copson_exponents(c, d)?;
    check_lengths(lambda, x)?;
    let l = lambda.terms();
    if l[0] <= 0.0 {
        return Err(IneqError::Degenerate("λ₁ must be positive".into()));
    }
    let big = prefix_sums(l);
    let weighted: Vec<f64> = l.iter().zip(x.terms()).map(|(a, b)| a * b).collect();
    let inner = prefix_sums(&weighted);
    let lhs = compensated_sum(
        (0..l.len())
            .filter(|&n| l[n] > 0.0)
            .map(|n| l[n] * big[n].powf(-c) * pow0(inner[n], d)),
    );
    let sum = compensated_sum(
        (0..l.len())
            .filter(|&n| l[n] > 0.0)
            .map(|n| l[n] * big[n].powf(d - c) * pow0(x.terms()[n], d)),
    );
    let rhs = (d / (c - 1.0)).powf(d) * sum;
    Ok(CheckReport::new(
        lhs,
        rhs,
        Witness::default()
            .seq("lambda", lambda)
            .seq("x", x)
            .exp("c", c)
            .exp("d", d),
    ))
}

/// `∑ λₙ(Λ*ₙ)^{-c}(∑_{k≥n} λₖxₖ)^d ≤ (d/(c-1))^d ∑ λₙ(Λ*ₙ)^{d-c}xₙ^d` with
/// tail sums `Λ*ₙ`, for strictly positive `λ`.
pub fn check_copson_dual(lambda: &Sequence, x: &Sequence, c: f64, d: f64) -> Result<CheckReport> {
    check_copson_exponents(c, d)?;
    check_lengths(lambda, x)?;
    let l = lambda.terms();
    if let Some(i) = l.iter().position(|&v| v <= 0.0) {
        return Err(IneqError::domain("λₙ > 0 for all n", format!("λ_{} = {}", i + 1, l[i])));
    }
    let big = tail_sums(l);
    let weighted: Vec<f64> = l.iter().zip(x.terms()).map(|(a, b)| a * b).collect();
    let inner = tail_sums(&weighted);
    let lhs = compensated_sum((0..l.len()).map(|n| l[n] * big[n].powf(-c) * pow0(inner[n], d)));
    let sum = compensated_sum((0..l.len()).map(|n| l[n] * big[n].powf(d - c) * pow0(x.terms()[n], d)));
    let rhs = (d / (c - 1.0)).powf(d) * sum;
    Ok(CheckReport::new(
        lhs,
        rhs,
        Witness::default()
            .seq("lambda", lambda)
            .seq("x", x)
            .exp("c", c)
            .exp("d", d),
    ))
}

fn check_negative(p: f64) -> Result<()> {
    if p.is_finite() && p < 0.0 {
        Ok(())
    } else {
        Err(IneqError::domain("p < 0", format!("p = {p}")))
    }
}

/// `∑_{k=n}^{N} aₖAₖ^{p-1} ≤ (1-1/p)Aₙᵖ` for `p < 0`, `a₁ > 0`; `n` is 1-based.
pub fn check_tail_bound(a: &Sequence, p: f64, n: usize) -> Result<CheckReport> {
    check_negative(p)?;
    let t = a.terms();
    if t[0] <= 0.0 {
        return Err(IneqError::Degenerate("a₁ must be positive".into()));
    }
    if n == 0 || n > t.len() {
        return Err(IneqError::domain("1 ≤ n ≤ N", format!("n = {n}, N = {}", t.len())));
    }
    let heads = prefix_sums(t);
    let lhs = compensated_sum(
        (n - 1..t.len())
            .filter(|&k| t[k] > 0.0)
            .map(|k| t[k] * heads[k].powf(p - 1.0)),
    );
    let rhs = (1.0 - 1.0 / p) * heads[n - 1].powf(p);
    Ok(CheckReport::new(
        lhs,
        rhs,
        Witness::default().seq("a", a).exp("p", p).idx("n", n),
    ))
}

/// `∑_{k=1}^{N} aₖA_{k,M}^{p-1} ≤ (1-1/p)A_{N,M}^p` for `p < 0`, positive `a`,
/// `M ≥ N ≥ 1`, with `A_{k,M} = aₖ + … + a_M`.
pub fn check_tail_bound_finite(a: &Sequence, p: f64, n_cap: usize, m_cap: usize) -> Result<CheckReport> {
    check_negative(p)?;
    let t = a.terms();
    if let Some(i) = t.iter().position(|&v| v <= 0.0) {
        return Err(IneqError::domain("aₙ > 0 for all n", format!("a_{} = {}", i + 1, t[i])));
    }
    if n_cap == 0 || n_cap > m_cap {
        return Err(IneqError::domain("M ≥ N ≥ 1", format!("N = {n_cap}, M = {m_cap}")));
    }
    if m_cap > t.len() {
        return Err(IneqError::domain(
            "sequence length ≥ M",
            format!("M = {m_cap}, length = {}", t.len()),
        ));
    }
    let tails = tail_sums(&t[..m_cap]);
    let lhs = compensated_sum((0..n_cap).map(|k| t[k] * tails[k].powf(p - 1.0)));
    let rhs = (1.0 - 1.0 / p) * tails[n_cap - 1].powf(p);
    Ok(CheckReport::new(
        lhs,
        rhs,
        Witness::default()
            .seq("a", a)
            .exp("p", p)
            .idx("N", n_cap)
            .idx("M", m_cap),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Copson,
    CopsonDual,
    Tail,
    TailFinite,
    Eq2Dominance,
    Eq3,
    Eq4,
    Duality,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Copson,
        Suite::CopsonDual,
        Suite::Tail,
        Suite::TailFinite,
        Suite::Eq2Dominance,
        Suite::Eq3,
        Suite::Eq4,
        Suite::Duality,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Copson => "copson",
            Suite::CopsonDual => "copson-dual",
            Suite::Tail => "tail",
            Suite::TailFinite => "tail-finite",
            Suite::Eq2Dominance => "eq2-dominance",
            Suite::Eq3 => "eq3",
            Suite::Eq4 => "eq4",
            Suite::Duality => "duality",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = IneqError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| IneqError::UnknownSuite(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    /// Trial with the largest `lhs / rhs` (smallest relative slack).
    pub worst_trial: usize,
    pub worst_tightness: f64,
    pub worst: CheckReport,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-3.0..=3.0))
}

/// Log-uniform terms on `[1e-3, 1e3]`; with `zero_rate > 0`, terms after
/// the first are zero with that probability.
fn random_sequence(rng: &mut ChaCha8Rng, len: usize, zero_rate: f64) -> Sequence {
    let terms = (0..len)
        .map(|i| {
            if i > 0 && zero_rate > 0.0 && rng.gen_bool(zero_rate) {
                0.0
            } else {
                log_uniform(rng)
            }
        })
        .collect();
    Sequence::new(terms).expect("generated terms are finite and nonnegative")
}

/// A mix of unstructured and structured shapes for the main-form suites.
fn random_shaped_sequence(rng: &mut ChaCha8Rng, len: usize) -> Sequence {
    let scale = log_uniform(rng);
    let terms: Vec<f64> = match rng.gen_range(0..4) {
        0 => return random_sequence(rng, len, 0.0),
        1 => {
            let rho: f64 = rng.gen_range(0.3..=1.2);
            (0..len).map(|i| scale * rho.powi(i as i32)).collect()
        }
        2 => {
            let s: f64 = rng.gen_range(0.0..=3.0);
            (0..len).map(|i| scale * ((i + 1) as f64).powf(-s)).collect()
        }
        _ => return random_sequence(rng, len, 0.5),
    };
    Sequence::new(terms).expect("generated terms are finite and nonnegative")
}

fn random_copson_exponents(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let c = rng.gen_range(1.05..=8.0);
    let d = rng.gen_range(1.05..=8.0);
    if d >= c {
        (c, d)
    } else {
        (d, c)
    }
}

fn random_len(rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(1..=MAX_RANDOM_LEN)
}

fn grid_params(rng: &mut ChaCha8Rng) -> ParamTriple {
    let p = GRID_P[rng.gen_range(0..GRID_P.len())];
    let q = GRID_Q[rng.gen_range(0..GRID_Q.len())];
    let r = GRID_R[rng.gen_range(0..GRID_R.len())];
    ParamTriple::new(p, q, r).expect("grid triples with r ≥ 1 are valid")
}

/// Best bounds for every grid triple, indexed like [`grid_index`].
fn grid_bounds() -> Result<Vec<f64>> {
    let mut engine = BoundEngine::new();
    let mut out = Vec::with_capacity(GRID_P.len() * GRID_Q.len() * GRID_R.len());
    for p in GRID_P {
        for q in GRID_Q {
            for r in GRID_R {
                out.push(engine.best_bound(&ParamTriple::new(p, q, r)?)?.value);
            }
        }
    }
    Ok(out)
}

fn grid_index(params: &ParamTriple) -> usize {
    let pos = |xs: &[f64], v: f64| xs.iter().position(|&x| x == v).expect("grid value");
    (pos(&GRID_P, params.p()) * GRID_Q.len() + pos(&GRID_Q, params.q())) * GRID_R.len() + pos(&GRID_R, params.r())
}

/// Regenerates and checks trial `trial` of `suite` under `seed`.
pub fn suite_instance(suite: Suite, seed: u64, trial: usize) -> Result<CheckReport> {
    let bounds = match suite {
        Suite::Eq2Dominance => Some(grid_bounds()?),
        _ => None,
    };
    instance(suite, seed, trial, bounds.as_deref())
}

fn instance(suite: Suite, seed: u64, trial: usize, bounds: Option<&[f64]>) -> Result<CheckReport> {
    let mut rng = trial_rng(seed, trial);
    let len = random_len(&mut rng);
    match suite {
        Suite::Copson => {
            let lambda = random_sequence(&mut rng, len, 0.1);
            let x = random_sequence(&mut rng, len, 0.1);
            let (c, d) = random_copson_exponents(&mut rng);
            check_copson(&lambda, &x, c, d)
        }
        Suite::CopsonDual => {
            let lambda = random_sequence(&mut rng, len, 0.0);
            let x = random_sequence(&mut rng, len, 0.1);
            let (c, d) = random_copson_exponents(&mut rng);
            check_copson_dual(&lambda, &x, c, d)
        }
        Suite::Tail => {
            let a = random_sequence(&mut rng, len, 0.1);
            let p = rng.gen_range(-10.0..-0.1);
            let n = rng.gen_range(1..=len);
            check_tail_bound(&a, p, n)
        }
        Suite::TailFinite => {
            let a = random_sequence(&mut rng, len, 0.0);
            let p = rng.gen_range(-10.0..-0.1);
            let m = rng.gen_range(1..=len);
            let n = rng.gen_range(1..=m);
            check_tail_bound_finite(&a, p, n, m)
        }
        Suite::Eq2Dominance => {
            let params = grid_params(&mut rng);
            let a = random_shaped_sequence(&mut rng, len);
            let ratio = evaluate_main(&a, &params)?.ratio;
            let bound = match bounds {
                Some(b) => b[grid_index(&params)],
                None => BoundEngine::new().best_bound(&params)?.value,
            };
            Ok(CheckReport::new(
                ratio,
                bound,
                Witness::default()
                    .seq("a", &a)
                    .exp("p", params.p())
                    .exp("q", params.q())
                    .exp("r", params.r()),
            ))
        }
        Suite::Eq3 => {
            let a = random_sequence(&mut rng, len, 0.1);
            let ratio = evaluate_eq3(&a)?.ratio;
            Ok(CheckReport::new(
                ratio,
                2f64.powf(1.0 / 3.0),
                Witness::default().seq("a", &a),
            ))
        }
        Suite::Eq4 => {
            let a = random_sequence(&mut rng, len, 0.1);
            // 2^δ is folded into the right side, so the inequality reads ratio ≤ 1
            let ratio = evaluate_ctz(&a, 3.0, 2.0, 1.0)?.ratio;
            Ok(CheckReport::new(
                ratio,
                1.0,
                Witness::default()
                    .seq("a", &a)
                    .exp("p", 3.0)
                    .exp("q", 2.0)
                    .exp("r", 1.0),
            ))
        }
        Suite::Duality => {
            let params = grid_params(&mut rng);
            let a = random_sequence(&mut rng, len, 0.1);
            let dual = evaluate_dual(&a, &params)?;
            let main = evaluate_main(&a.reversed(), &params)?;
            let gap = rel_diff(dual.lhs, main.lhs)
                .max(rel_diff(dual.rhs, main.rhs))
                .max(rel_diff(dual.ratio, main.ratio));
            let mut report = CheckReport::new(
                gap,
                DUALITY_TOLERANCE,
                Witness::default()
                    .seq("a", &a)
                    .exp("p", params.p())
                    .exp("q", params.q())
                    .exp("r", params.r()),
            );
            report.holds = gap <= DUALITY_TOLERANCE;
            Ok(report)
        }
    }
}

/// Runs `trials` seeded instances of `suite`. Trial `i` draws from stream `i`
/// of a generator seeded with `seed`, so any witness can be regenerated with
/// [`suite_instance`].
pub fn run_suite(suite: Suite, trials: usize, seed: u64, parallelism: Parallelism) -> Result<SuiteSummary> {
    if trials == 0 {
        return Err(IneqError::InvalidConfig("trials must be at least 1".into()));
    }
    let bounds = match suite {
        Suite::Eq2Dominance => Some(grid_bounds()?),
        _ => None,
    };
    let reports = parallelism.map(trials, |t| instance(suite, seed, t, bounds.as_deref()));
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;

    let violations = reports.iter().filter(|r| !r.holds).count();
    let mut worst = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.tightness() > reports[worst].tightness() {
            worst = i;
        }
    }
    Ok(SuiteSummary {
        suite,
        trials,
        seed,
        violations,
        worst_trial: worst,
        worst_tightness: reports[worst].tightness(),
        worst: reports[worst].clone(),
    })
}
