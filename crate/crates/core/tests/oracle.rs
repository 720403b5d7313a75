//! Evaluators checked against naive double-loop summation straight from the
//! definitions (no normalization, no compensated sums, no shared helpers).

use ineqlab::{evaluate_ctz, evaluate_dual, evaluate_eq3, evaluate_main, ParamTriple, Sequence};
use proptest::prelude::*;

fn naive_main(a: &[f64], p: f64, q: f64, r: f64) -> (f64, f64) {
    let n = a.len();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        let big: f64 = a[..=i].iter().sum();
        let tail: f64 = a[i..].iter().map(|x| x.powf(1.0 + p / q)).sum();
        lhs += a[i].powf(p) * big.powf(q) * tail.powf(r);
        rhs += (a[i].powf(p) * big.powf(q)).powf(1.0 + r / q);
    }
    (lhs, rhs)
}

fn naive_dual(a: &[f64], p: f64, q: f64, r: f64) -> (f64, f64) {
    let n = a.len();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        let tail: f64 = a[i..].iter().sum();
        let head: f64 = a[..=i].iter().map(|x| x.powf(1.0 + p / q)).sum();
        lhs += a[i].powf(p) * tail.powf(q) * head.powf(r);
        rhs += (a[i].powf(p) * tail.powf(q)).powf(1.0 + r / q);
    }
    (lhs, rhs)
}

fn naive_nested(a: &[f64], outer: f64, inner: f64, weight: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..a.len() {
        let mut s = 0.0;
        for k in 0..=i {
            let big: f64 = a[..=k].iter().sum();
            s += a[k].powf(inner) * big.powf(weight);
        }
        lhs += a[i].powf(outer) * s;
        let big: f64 = a[..=i].iter().sum();
        rhs += a[i].powf(alpha) * big.powf(beta);
    }
    (lhs, rhs)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn terms() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..10.0], 1..24)
        .prop_filter("needs a positive term", |v| v.iter().any(|&x| x > 0.0))
}

fn params() -> impl Strategy<Value = ParamTriple> {
    (1.0f64..4.0, 0.3f64..4.0, 0.3f64..3.0).prop_filter_map("valid triple", |(p, q, r)| ParamTriple::new(p, q, r).ok())
}

proptest! {
    #[test]
    fn main_matches_naive(v in terms(), pr in params()) {
        let a = Sequence::new(v.clone()).unwrap();
        let e = evaluate_main(&a, &pr).unwrap();
        let (l, r) = naive_main(&v, pr.p(), pr.q(), pr.r());
        prop_assert!(rel(e.lhs, l) < 1e-10, "lhs {} vs {}", e.lhs, l);
        prop_assert!(rel(e.rhs, r) < 1e-10, "rhs {} vs {}", e.rhs, r);
        prop_assert!(rel(e.ratio, l / r) < 1e-10);
    }

    #[test]
    fn dual_matches_naive(v in terms(), pr in params()) {
        let a = Sequence::new(v.clone()).unwrap();
        let e = evaluate_dual(&a, &pr).unwrap();
        let (l, r) = naive_dual(&v, pr.p(), pr.q(), pr.r());
        prop_assert!(rel(e.lhs, l) < 1e-10);
        prop_assert!(rel(e.rhs, r) < 1e-10);
    }

    #[test]
    fn eq3_and_ctz_match_naive(v in terms()) {
        let a = Sequence::new(v.clone()).unwrap();
        let e = evaluate_eq3(&a).unwrap();
        let (l, r) = naive_nested(&v, 3.0, 2.0, 1.0, 4.0, 2.0);
        prop_assert!(rel(e.lhs, l) < 1e-10);
        prop_assert!(rel(e.rhs, r) < 1e-10);

        // a second admissible triple, exponents written out from their definitions
        let (p, q, rr) = (2.0, 2.0, 0.5);
        let alpha = ((p - 1.0) * (q + rr) + p * p + 1.0) / (p + 1.0);
        let beta = (2.0 * q + 2.0 * rr + p - 1.0) / (p + 1.0);
        let delta = (q + rr - 1.0) / (p + q + rr);
        let e = evaluate_ctz(&a, p, q, rr).unwrap();
        let (l, r) = naive_nested(&v, p, q, rr, alpha, beta);
        prop_assert!(rel(e.lhs, l) < 1e-10);
        prop_assert!(rel(e.rhs, 2f64.powf(delta) * r) < 1e-10);
    }
}

#[test]
fn interchanged_forms_agree() {
    // the 3/2 inequality is the (2,1,1) main form with the order of summation swapped
    let a = Sequence::new(vec![0.4, 1.3, 0.0, 2.2, 0.9, 0.05]).unwrap();
    let x = evaluate_eq3(&a).unwrap();
    let y = evaluate_main(&a, &ParamTriple::new(2.0, 1.0, 1.0).unwrap()).unwrap();
    assert!(rel(x.lhs, y.lhs) < 1e-13);
    assert!(rel(x.rhs, y.rhs) < 1e-13);
}
