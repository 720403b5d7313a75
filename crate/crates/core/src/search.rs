//! Numerical lower bounds on `K(p,q,r)`: maximize the main-form ratio over
//! sequences of a fixed length with a seeded simplex search.
//!
//! Sequences are parameterized as `aᵢ = exp(tᵢ)` with `t ∈ [-30, 30]ⁿ`. The
//! ratio is scale invariant, so only differences of the `tᵢ` matter; decoded
//! terms below `1e-13` times the largest one are set to exactly zero, which
//! makes sparse (spike-like) sequences reachable.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{IneqError, Result};
use crate::parallel::Parallelism;
use crate::sequence::{evaluate_main, ParamTriple, Sequence};

pub const MAX_SEARCH_LEN: usize = 64;
const T_MIN: f64 = -30.0;
const T_MAX: f64 = 30.0;
/// Terms below this fraction of the largest term are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;
/// Half-width of the box random start points are drawn from.
const START_SPREAD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Sequence length.
    pub n: usize,
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub max_iters: usize,
    pub seed: u64,
    /// Convergence threshold on the spread of objective values over the simplex.
    pub tol: f64,
    /// Coordinate hill-climb sweeps applied to each restart's simplex result.
    pub refine_sweeps: usize,
    /// Extra start points, run after the seeded restarts. Shorter sequences
    /// are zero-padded and longer ones truncated to `n`.
    pub warm_starts: Vec<Sequence>,
    pub parallelism: Parallelism,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n: 16,
            restarts: 32,
            max_iters: 2000,
            seed: 0,
            tol: 1e-10,
            refine_sweeps: 8,
            warm_starts: Vec::new(),
            parallelism: Parallelism::Auto,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SEARCH_LEN {
            return Err(IneqError::InvalidConfig(format!(
                "n must lie in 1..={MAX_SEARCH_LEN}, got {}",
                self.n
            )));
        }
        if self.restarts == 0 {
            return Err(IneqError::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(IneqError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(IneqError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_ratio: f64,
    /// Witness, normalized to unit sum.
    pub best_sequence: Sequence,
    pub best_restart: usize,
    pub restarts_run: usize,
    pub evaluations: u64,
    pub converged: Vec<bool>,
    pub ratios: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct RestartResult {
    ratio: f64,
    sequence: Sequence,
    evaluations: u64,
    converged: bool,
}

/// Maps search coordinates to a sequence whose largest term is 1.
fn decode(t: &[f64]) -> Sequence {
    let top = t
        .iter()
        .map(|x| x.clamp(T_MIN, T_MAX))
        .fold(f64::NEG_INFINITY, f64::max);
    let terms = t
        .iter()
        .map(|x| {
            let v = (x.clamp(T_MIN, T_MAX) - top).exp();
            if v < ZERO_THRESHOLD {
                0.0
            } else {
                v
            }
        })
        .collect();
    Sequence::new(terms).expect("exp of finite values is finite and positive")
}

/// Inverse of [`decode`] up to scale: largest term maps to `t = 0`, zeros to `-30`.
fn encode(a: &Sequence, n: usize) -> Vec<f64> {
    let m = a.max_term();
    (0..n)
        .map(|i| match a.terms().get(i) {
            Some(&x) if x > 0.0 && m > 0.0 => (x / m).ln().max(T_MIN),
            _ => T_MIN,
        })
        .collect()
}

/// Maximizes the ratio of the main form over length-`config.n` sequences.
///
/// Restart 0 starts from the spike `(1, 0, ..., 0)`; restart `i ≥ 1` draws its
/// start point from a generator seeded with `seed ^ i`. Results do not depend
/// on the parallel schedule.
pub fn search_lower_bound(params: &ParamTriple, config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let n = config.n;
    let total = config.restarts + config.warm_starts.len();

    let start = |i: usize| -> Vec<f64> {
        if i == 0 {
            encode(&Sequence::spike(n), n)
        } else if i < config.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ i as u64);
            (0..n).map(|_| rng.gen_range(-START_SPREAD..=START_SPREAD)).collect()
        } else {
            encode(&config.warm_starts[i - config.restarts], n)
        }
    };

    let results: Vec<Result<RestartResult>> = config.parallelism.map(total, |i| run_restart(params, config, start(i)));
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.ratio > results[best].ratio {
            best = i;
        }
    }
    Ok(SearchOutcome {
        best_ratio: results[best].ratio,
        best_sequence: results[best].sequence.clone(),
        best_restart: best,
        restarts_run: total,
        evaluations: results.iter().map(|r| r.evaluations).sum(),
        converged: results.iter().map(|r| r.converged).collect(),
        ratios: results.iter().map(|r| r.ratio).collect(),
        n,
        seed: config.seed,
    })
}

fn run_restart(params: &ParamTriple, config: &SearchConfig, x0: Vec<f64>) -> Result<RestartResult> {
    let evals = Cell::new(0u64);
    let objective = |t: &[f64]| -> f64 {
        evals.set(evals.get() + 1);
        // decode always yields a positive term, so evaluation cannot fail
        evaluate_main(&decode(t), params).map_or(f64::INFINITY, |e| -e.ratio)
    };
    let nm = nelder_mead(objective, x0, 1.0, config.max_iters, config.tol);
    let (sequence, ratio, refine_evals) = refine(&decode(&nm.x), params, config.refine_sweeps)?;
    Ok(RestartResult {
        ratio,
        sequence,
        evaluations: evals.get() + refine_evals,
        converged: nm.converged,
    })
}

struct SimplexResult {
    x: Vec<f64>,
    converged: bool,
}

/// Downhill simplex minimization with standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2), kept inside the
/// search box. Stops when the objective spread over the simplex drops to `tol`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: Vec<f64>, step: f64, max_iters: usize, tol: f64) -> SimplexResult {
    let dim = x0.len();
    let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(T_MIN, T_MAX)).collect() };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let mut v = x0.clone();
        v[i] += if v[i] + step <= T_MAX { step } else { -step };
        let v = clamp(v);
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut converged = false;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        if (f_worst - f_best).abs() <= tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let along = |from: &[f64], coef: f64| -> Vec<f64> {
            clamp(centroid.iter().zip(from).map(|(c, x)| c + coef * (x - c)).collect())
        };

        let worst = simplex[dim].0.clone();
        let reflected = along(&worst, -1.0);
        let f_r = f(&reflected);
        let f_second = simplex[dim - 1].1;

        if f_r < f_best {
            let expanded = along(&worst, -2.0);
            let f_e = f(&expanded);
            simplex[dim] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < f_second {
            simplex[dim] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < f_worst {
                let c = along(&worst, -0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = along(&worst, 0.5);
                let fc = f(&c);
                (c, fc)
            };
            if f_c < f_r.min(f_worst) {
                simplex[dim] = (contracted, f_c);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v = clamp(best.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect());
                    let fv = f(&v);
                    *entry = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex.swap_remove(0).0,
        converged,
    }
}

/// Coordinate-wise multiplicative hill climb: each sweep tries the factors
/// `1 ± 10^{-k}`, `k = 1..6`, on every nonzero term and keeps strict
/// improvements. Returns the unit-sum result; zero terms stay zero.
pub fn local_refine(a: &Sequence, params: &ParamTriple, steps: usize) -> Result<Sequence> {
    refine(a, params, steps).map(|(s, _, _)| s)
}

fn refine(a: &Sequence, params: &ParamTriple, steps: usize) -> Result<(Sequence, f64, u64)> {
    let mut current = a.normalized()?;
    let mut best = evaluate_main(&current, params)?.ratio;
    let mut evals = 1u64;
    for _ in 0..steps {
        let mut improved = false;
        for i in 0..current.len() {
            if current.terms()[i] == 0.0 {
                continue;
            }
            for k in 1..=6 {
                let h = 10f64.powi(-k);
                for factor in [1.0 + h, 1.0 - h] {
                    let mut terms = current.terms().to_vec();
                    terms[i] *= factor;
                    let candidate = Sequence::new(terms)?.normalized()?;
                    let ratio = evaluate_main(&candidate, params)?.ratio;
                    evals += 1;
                    if ratio > best {
                        best = ratio;
                        current = candidate;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((current, best, evals))
}
