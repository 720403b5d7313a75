use ineqlab::{
    bennett_bound, c_delta, cor0_bound, minimize_c_delta, search_lower_bound, BoundEngine, IneqError, Parallelism,
    ParamTriple, SearchConfig, Suite,
};
use serde_json::Value;

use crate::report::{object, NamedResult, ReportDocument, Status};

/// Slack allowed between a search result and the proved bound it must stay under.
const SEARCH_BOUND_SLACK: f64 = 1e-6;

/// A failed invocation: bad flags or parameters outside a rule's domain.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<IneqError> for UsageError {
    fn from(e: IneqError) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<ReportDocument, UsageError>;

fn parse_list(flag: &str, raw: &str) -> Result<Vec<f64>, UsageError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("--{flag}: `{s}` is not a number")))
        })
        .collect()
}

fn triple_object(p: f64, q: f64, r: f64) -> Value {
    object([("p", Value::from(p)), ("q", Value::from(q)), ("r", Value::from(r))])
}

/// Every rule that applies at one triple, then the best one with its derivation.
fn bound_records(engine: &mut BoundEngine, params: &ParamTriple, prefix: &str) -> Result<Vec<NamedResult>, IneqError> {
    let (p, q, r) = (params.p(), params.q(), params.r());
    let name = |s: &str| format!("{prefix}{s}");
    let mut out = Vec::new();

    let bennett = bennett_bound(params);
    out.push(
        NamedResult::new(name("bennett"), bennett.value)
            .reference(bennett.rule.to_string())
            .data(&bennett),
    );
    if r == 1.0 {
        let eq5 = cor0_bound(p, q)?;
        out.push(
            NamedResult::new(name("eq5"), eq5.value)
                .reference(eq5.rule.to_string())
                .data(&eq5),
        );
        let k = engine.k_r1_bound(p, q)?;
        out.push(
            NamedResult::new(name("k_r1"), k.value)
                .reference(k.rule.to_string())
                .data(&k),
        );
    }
    if r >= 1.0 && !(p == 1.0 && r == 1.0) {
        let t = engine.thm2_bound(params)?;
        out.push(
            NamedResult::new(name("thm2"), t.value)
                .reference(t.rule.to_string())
                .data(&t),
        );
    }
    if r <= 1.0 {
        let s = engine.reduction_small_r(params)?;
        out.push(
            NamedResult::new(name("reduction_small_r"), s.value)
                .reference(s.rule.to_string())
                .data(&s),
        );
    }
    let best = engine.best_bound(params)?;
    out.push(
        NamedResult::new(name("best"), best.value)
            .reference(best.rule.to_string())
            .data(&best),
    );
    Ok(out)
}

pub fn bound(p: &str, q: &str, r: &str, grid: bool) -> CmdResult {
    let (ps, qs, rs) = (parse_list("p", p)?, parse_list("q", q)?, parse_list("r", r)?);
    let mut engine = BoundEngine::new();

    if !grid {
        if ps.len() != 1 || qs.len() != 1 || rs.len() != 1 {
            return Err(UsageError("parameter lists need --grid".into()));
        }
        let params = ParamTriple::new(ps[0], qs[0], rs[0])?;
        let results = bound_records(&mut engine, &params, "")?;
        return Ok(ReportDocument::new(
            "bound",
            triple_object(ps[0], qs[0], rs[0]),
            results,
            Status::Pass,
        ));
    }

    let mut results = Vec::new();
    for &pv in &ps {
        for &qv in &qs {
            for &rv in &rs {
                let prefix = format!("p={pv},q={qv},r={rv}/");
                match ParamTriple::new(pv, qv, rv) {
                    Ok(params) => results.extend(bound_records(&mut engine, &params, &prefix)?),
                    Err(e) => results.push(NamedResult {
                        name: format!("{prefix}skipped"),
                        value: None,
                        reference: Some(e.to_string()),
                        pass: None,
                        data: None,
                    }),
                }
            }
        }
    }
    let params = object([
        ("p", Value::from(ps)),
        ("q", Value::from(qs)),
        ("r", Value::from(rs)),
        ("grid", Value::from(true)),
    ]);
    Ok(ReportDocument::new("bound", params, results, Status::Pass))
}

pub struct SearchArgs {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub n: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

pub fn search(args: &SearchArgs, parallelism: Parallelism) -> CmdResult {
    let params = ParamTriple::new(args.p, args.q, args.r)?;
    let config = SearchConfig {
        n: args.n,
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        parallelism,
        ..SearchConfig::default()
    };
    let outcome = search_lower_bound(&params, &config)?;
    let bound = BoundEngine::new().best_bound(&params)?;
    let within = outcome.best_ratio <= bound.value + SEARCH_BOUND_SLACK;

    let results = vec![
        NamedResult::new("best_ratio", outcome.best_ratio)
            .reference(format!("upper bound {}", crate::report::fmt_num(bound.value)))
            .pass(within)
            .data(&outcome.best_sequence),
        NamedResult::new("best_bound", bound.value).reference(bound.rule.to_string()),
        NamedResult::new("gap", bound.value - outcome.best_ratio),
        NamedResult::new("evaluations", outcome.evaluations as f64),
        NamedResult::new("restarts_run", outcome.restarts_run as f64),
        NamedResult::new("best_restart", outcome.best_restart as f64),
        NamedResult::new("converged", outcome.converged.iter().filter(|&&c| c).count() as f64),
    ];
    let mut params_obj = triple_object(args.p, args.q, args.r);
    if let Value::Object(m) = &mut params_obj {
        m.insert("n".into(), Value::from(args.n));
        m.insert("restarts".into(), Value::from(args.restarts));
        m.insert("max_iters".into(), Value::from(args.max_iters));
        m.insert("seed".into(), Value::from(args.seed));
    }
    let status = if within { Status::Pass } else { Status::Fail };
    Ok(ReportDocument::new("search", params_obj, results, status))
}

pub fn verify(suite: &str, trials: usize, seed: u64, parallelism: Parallelism) -> CmdResult {
    let suite: Suite = suite.parse().map_err(|e: IneqError| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        UsageError(format!("{e}; expected one of {}", names.join(", ")))
    })?;
    let summary = ineqlab::run_suite(suite, trials, seed, parallelism)?;
    let ok = summary.passed();
    let results = vec![
        NamedResult::new("violations", summary.violations as f64)
            .reference("0")
            .pass(ok),
        NamedResult::new("trials", summary.trials as f64),
        NamedResult::new("worst_tightness", summary.worst_tightness)
            .reference(format!("trial {}", summary.worst_trial))
            .data(&summary.worst),
    ];
    let params = object([
        ("suite", Value::from(suite.name())),
        ("trials", Value::from(trials)),
        ("seed", Value::from(seed)),
    ]);
    Ok(ReportDocument::new(
        "verify",
        params,
        results,
        if ok { Status::Pass } else { Status::Fail },
    ))
}

fn rel(a: f64, b: f64) -> f64 {
    ineqlab::numeric::rel_diff(a, b)
}

/// The published constants, each checked against its tolerance.
pub fn claims() -> Result<Vec<NamedResult>, IneqError> {
    let mut engine = BoundEngine::new();
    let sqrt6 = 6f64.sqrt();
    let cbrt2 = 2f64.powf(1.0 / 3.0);
    let mut rows = Vec::new();

    let b = bennett_bound(&ParamTriple::new(1.0, 2.0, 2.0)?).value;
    rows.push(NamedResult::new("bennett(1,2,2)", b).reference("4").pass(b == 4.0));

    let t = engine.thm2_bound(&ParamTriple::new(1.0, 2.0, 2.0)?)?.value;
    rows.push(
        NamedResult::new("thm2(1,2,2)", t)
            .reference("sqrt(6)")
            .pass(rel(t, sqrt6) <= 1e-9 && t <= sqrt6 + 1e-12),
    );

    let c0 = cor0_bound(6.0, 6.0)?.value;
    rows.push(
        NamedResult::new("cor0(6,6)", c0)
            .reference("21/5")
            .pass((c0 - 4.2).abs() <= 1e-12),
    );

    let cd = c_delta(6.0, 6.0, 23.0 / 24.0)?;
    rows.push(
        NamedResult::new("c_delta(6,6,23/24)", cd)
            .reference("< 21/5")
            .pass(cd < 4.2),
    );

    let m = minimize_c_delta(6.0, 6.0)?;
    rows.push(
        NamedResult::new("min_c_delta(6,6)", m.c_star)
            .reference("< 21/5, interior delta")
            .pass(m.c_star < 4.2 && m.is_interior())
            .data(&m),
    );

    for q in [1.0, 2.0, 5.0] {
        let k = engine.k_r1_bound(1.0, q)?.value;
        rows.push(
            NamedResult::new(format!("k_r1(1,{q})"), k)
                .reference("1")
                .pass(k == 1.0),
        );
    }

    let c = cor0_bound(2.0, 1.0)?.value;
    rows.push(
        NamedResult::new("cor0(2,1)", c)
            .reference("2^(1/3)")
            .pass((c - cbrt2).abs() <= 1e-12),
    );
    Ok(rows)
}

pub fn reproduce() -> CmdResult {
    let rows = claims()?;
    let ok = rows.iter().all(|r| r.pass != Some(false));
    Ok(ReportDocument::new(
        "reproduce",
        Value::Object(Default::default()),
        rows,
        if ok { Status::Pass } else { Status::Fail },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_claim_passes() {
        for row in claims().unwrap() {
            assert_eq!(row.pass, Some(true), "{}", row.name);
        }
    }

    #[test]
    fn lists_need_grid() {
        assert!(bound("1,2", "1", "1", false).is_err());
        let doc = bound("1,0.5", "2", "2,0.5", true).unwrap();
        assert!(doc.results.iter().any(|r| r.name.ends_with("skipped")));
        assert!(doc.results.iter().any(|r| r.name == "p=1,q=2,r=2/best"));
    }

    #[test]
    fn bad_number_is_usage_error() {
        assert!(bound("x", "1", "1", false).is_err());
    }
}
