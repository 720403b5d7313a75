use ineqlab::numeric::rel_diff;
use ineqlab::verify::{GRID_P, GRID_Q, GRID_R};
use ineqlab::{
    bennett_bound, best_bound, c_delta, check_tail_bound, cor0_bound, evaluate_dual, evaluate_littlewood,
    evaluate_main, k_r1_bound, minimize_c_delta, reduction_exponents, thm2_bound, DeltaInterval, ParamTriple, Sequence,
};
use proptest::prelude::*;

fn terms(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![1 => Just(0.0), 5 => (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))],
        1..=max_len,
    )
    .prop_filter("needs a positive term", |v| v.iter().any(|&x| x > 0.0))
}

fn params() -> impl Strategy<Value = ParamTriple> {
    (1.0f64..8.0, 0.2f64..8.0, 0.1f64..5.0).prop_filter_map("valid triple", |(p, q, r)| ParamTriple::new(p, q, r).ok())
}

fn grid_params() -> impl Strategy<Value = ParamTriple> {
    (0..GRID_P.len(), 0..GRID_Q.len(), 0..GRID_R.len())
        .prop_map(|(i, j, k)| ParamTriple::new(GRID_P[i], GRID_Q[j], GRID_R[k]).unwrap())
}

proptest! {
    #[test]
    fn scale_invariance(v in terms(32), pr in params(), log_scale in -6.0f64..6.0) {
        let a = Sequence::new(v).unwrap();
        let scaled = a.scaled(10f64.powf(log_scale)).unwrap();
        let x = evaluate_main(&a, &pr).unwrap().ratio;
        let y = evaluate_main(&scaled, &pr).unwrap().ratio;
        prop_assert!(rel_diff(x, y) <= 1e-9);
    }

    #[test]
    fn duality(v in terms(64), pr in params()) {
        let a = Sequence::new(v).unwrap();
        let d = evaluate_dual(&a, &pr).unwrap();
        let m = evaluate_main(&a.reversed(), &pr).unwrap();
        prop_assert!(rel_diff(d.lhs, m.lhs) <= 1e-12);
        prop_assert!(rel_diff(d.rhs, m.rhs) <= 1e-12);
    }

    #[test]
    fn zero_padding(v in terms(32), pr in params(), extra in 1usize..8) {
        let a = Sequence::new(v).unwrap();
        prop_assert_eq!(evaluate_main(&a, &pr).unwrap(), evaluate_main(&a.zero_padded(extra), &pr).unwrap());
    }

    #[test]
    fn littlewood_specialization(v in terms(32)) {
        let a = Sequence::new(v).unwrap();
        let pr = ParamTriple::new(1.0, 2.0, 2.0).unwrap();
        prop_assert_eq!(evaluate_littlewood(&a).unwrap(), evaluate_main(&a, &pr).unwrap());
    }

    #[test]
    fn ratio_never_exceeds_best_bound(v in terms(32), pr in params()) {
        let a = Sequence::new(v).unwrap();
        let ratio = evaluate_main(&a, &pr).unwrap().ratio;
        let bound = best_bound(&pr).unwrap().value;
        prop_assert!(ratio <= bound * (1.0 + 1e-9), "ratio {ratio} > bound {bound}");
    }

    #[test]
    fn grid_dominance(v in terms(32), pr in grid_params()) {
        let a = Sequence::new(v).unwrap();
        let ratio = evaluate_main(&a, &pr).unwrap().ratio;
        prop_assert!(ratio <= best_bound(&pr).unwrap().value * (1.0 + 1e-9));
    }

    #[test]
    fn best_bound_at_least_one(pr in params()) {
        let b = best_bound(&pr).unwrap();
        prop_assert!(b.value >= 1.0 && b.value.is_finite());
        prop_assert!(b.value <= bennett_bound(&pr).value);
    }

    #[test]
    fn exponent_partition(p in 1.0f64..20.0, q in 0.05f64..20.0, r in 1.0f64..20.0) {
        prop_assume!(!(p == 1.0 && r == 1.0));
        let (e1, e2) = reduction_exponents(p, q, r).unwrap();
        prop_assert!((e1 + e2 - 1.0).abs() <= 1e-14);
        prop_assert!(e1 >= 0.0 && e2 >= 0.0);
    }

    #[test]
    fn cor0_never_beats_delta_minimum(p in 1.0f64..30.0, q in 0.05f64..30.0) {
        let c0 = cor0_bound(p, q).unwrap().value;
        let k = k_r1_bound(p, q).unwrap().value;
        prop_assert!(c0 >= k - 1e-12);
    }

    #[test]
    fn c_star_bounded_by_grid(p in 1.01f64..30.0, q in 0.05f64..30.0, t in 0.0f64..=1.0) {
        let m = minimize_c_delta(p, q).unwrap();
        let i = DeltaInterval::new(p, q).unwrap();
        let d = i.lo + t * (i.hi - i.lo);
        prop_assert!(m.c_star <= c_delta(p, q, d).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn tail_bound_monotone_in_truncation(v in prop::collection::vec(0.01f64..10.0, 2..32), p in -10.0f64..-0.1, cut in 1usize..31) {
        let cut = cut.min(v.len() - 1);
        let n = 1;
        let short = check_tail_bound(&Sequence::new(v[..cut].to_vec()).unwrap(), p, n).unwrap();
        let long = check_tail_bound(&Sequence::new(v.clone()).unwrap(), p, n).unwrap();
        prop_assert!(long.lhs >= short.lhs);
        prop_assert_eq!(long.rhs, short.rhs);
        prop_assert!(long.holds && short.holds);
    }
}

#[test]
fn refinement_on_grid() {
    for p in GRID_P {
        for q in GRID_Q {
            for r in GRID_R {
                if p == 1.0 && r == 1.0 {
                    continue;
                }
                let pr = ParamTriple::new(p, q, r).unwrap();
                let t = thm2_bound(&pr).unwrap().value;
                let b = bennett_bound(&pr).value;
                assert!(t <= b + 1e-9, "({p},{q},{r}): thm2 {t} > bennett {b}");
            }
        }
    }
}

#[test]
fn endpoint_identities() {
    for p in [1.5, 2.0, 6.0, 10.0] {
        for q in [0.5, 1.0, 3.0, 6.0] {
            let lo = DeltaInterval::new(p, q).unwrap().lo;
            assert!(rel_diff(c_delta(p, q, lo).unwrap(), p.powf(lo)) <= 1e-10);
            let third = (1.0 + (p - 1.0) * q / (p + q)) * (1.0 + p / (q * (p - 1.0)));
            assert!(rel_diff(c_delta(p, q, 1.0).unwrap(), third) <= 1e-10);
        }
    }
}

#[test]
fn regime_boundary_takes_both_formulas() {
    // (2, 1, 1.5) sits on q + r - q/p = 2
    let pr = ParamTriple::new(2.0, 1.0, 1.5).unwrap();
    let b = thm2_bound(&pr).unwrap();
    assert_eq!(b.detail_num("s"), Some(2.0));
    let a = b.detail_num("regime_a").unwrap();
    let bb = b.detail_num("regime_b").unwrap();
    assert_eq!(b.value, a.min(bb));
}
