use optiquad::expr::{eval_jet, eval_value, parse, BinaryOp, ExprNode, Func};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = ExprNode> {
    prop_oneof![Just(ExprNode::Var), (0.1f64..3.0).prop_map(ExprNode::Const)]
}

/// Trees of depth at most 5 built from operations that stay smooth and
/// finite near the sample points used below.
fn smooth_expr() -> impl Strategy<Value = ExprNode> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| ExprNode::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| ExprNode::binary(BinaryOp::Add, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| ExprNode::binary(BinaryOp::Sub, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| ExprNode::binary(BinaryOp::Mul, l, r)),
            inner.clone().prop_map(|e| ExprNode::call(Func::Sin, vec![e])),
            inner.clone().prop_map(|e| ExprNode::call(Func::Cos, vec![e])),
            inner.clone().prop_map(|e| ExprNode::call(
                Func::Exp,
                vec![ExprNode::call(Func::Sin, vec![e])]
            )),
            inner.clone().prop_map(|e| ExprNode::call(
                Func::Sqrt,
                vec![ExprNode::binary(BinaryOp::Add, ExprNode::Const(1.0), ExprNode::binary(BinaryOp::Mul, e.clone(), e))]
            )),
            (inner.clone(), 0u32..4).prop_map(|(e, k)| ExprNode::binary(BinaryOp::Pow, e, ExprNode::Const(k as f64))),
            inner.prop_map(|e| ExprNode::binary(
                BinaryOp::Div,
                e.clone(),
                ExprNode::binary(BinaryOp::Add, ExprNode::Const(2.0), ExprNode::call(Func::Cos, vec![e]))
            )),
        ]
    })
}

/// Any tree the grammar can express, including domain-restricted calls.
fn any_expr() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        Just(ExprNode::Var),
        (0.0f64..1e6).prop_map(ExprNode::Const),
        (1e-8f64..1e-3).prop_map(ExprNode::Const),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let ops = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
            Just(BinaryOp::Pow)
        ];
        let funcs = proptest::sample::select(Func::ALL.to_vec());
        prop_oneof![
            inner.clone().prop_map(|e| ExprNode::Neg(Box::new(e))),
            (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| ExprNode::binary(op, l, r)),
            (funcs, inner.clone(), inner).prop_map(|(f, x, y)| {
                let args = if f.arity() == 2 { vec![x, y] } else { vec![x] };
                ExprNode::call(f, args)
            }),
        ]
    })
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivatives_match_finite_differences(e in smooth_expr(), t in -1.0f64..1.0) {
        prop_assume!(e.depth() <= 5);
        let j = eval_jet(&e, t).unwrap();
        let f = |x: f64| eval_value(&e, x).unwrap();
        prop_assert_eq!(j.v, f(t));
        // first derivative: central difference at h = 1e-5
        let h1 = 1e-5;
        let d1 = (f(t + h1) - f(t - h1)) / (2.0 * h1);
        prop_assume!(j.v.abs() < 1e6 && j.d1.abs() < 1e6 && j.d2.abs() < 1e6);
        prop_assert!(rel_close(j.d1, d1, 1e-5), "f' = {} vs {} for {}", j.d1, d1, e);
        // second derivative: central difference of the exact first derivative at h = 1e-4
        let h2 = 1e-4;
        let g = |x: f64| eval_jet(&e, x).unwrap().d1;
        let d2 = (g(t + h2) - g(t - h2)) / (2.0 * h2);
        prop_assert!(rel_close(j.d2, d2, 1e-5), "f'' = {} vs {} for {}", j.d2, d2, e);
    }

    #[test]
    fn print_then_parse_round_trips(e in any_expr()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
        prop_assert_eq!(back.to_string(), text);
    }
}

mod rules_and_composite {
    use super::smooth_expr;
    use optiquad::analysis::{build_info, sample_range, Overrides, SamplingConfig};
    use optiquad::bounds::{best_bounds, bound_first_range, bound_gruss_first, bound_gruss_second, bound_second_range, bound_second_sup};
    use optiquad::composite::{
        composite_correction, composite_estimate, composite_estimate_per_panel, omega_n, sigma_n, summed_panel_corrections,
        CompositeConfig,
    };
    use optiquad::function::Order;
    use optiquad::rules::{correction_p, optimal_rule_estimate, Interval};
    use proptest::prelude::*;

    fn interval() -> impl Strategy<Value = Interval> {
        (-2.0f64..1.0, 0.05f64..2.0).prop_map(|(a, l)| Interval::new(a, a + l).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn corrected_rule_is_exact_on_cubics(c in proptest::array::uniform4(-3.0f64..3.0), iv in interval()) {
            let f = move |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
            let df = |t: f64| c[1] + t * (2.0 * c[2] + t * 3.0 * c[3]);
            let anti = |t: f64| t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
            let exact = anti(iv.b()) - anti(iv.a());
            let r = exact - optimal_rule_estimate(&f, &iv).unwrap() - correction_p(df(iv.a()), df(iv.b()), &iv);
            prop_assert!(r.abs() < 1e-12, "residual {r}");
        }

        #[test]
        fn affine_covariance(c in 0.2f64..3.0, d in -1.0f64..1.0, iv in interval()) {
            let f = |u: f64| (1.3 * u).sin() + u * u;
            let g = move |t: f64| f(c * t + d);
            let mapped = Interval::new(c * iv.a() + d, c * iv.b() + d).unwrap();
            let lhs = optimal_rule_estimate(&g, &iv).unwrap();
            let rhs = optimal_rule_estimate(&f, &mapped).unwrap() / c;
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn grouped_form_matches_panel_sum(n in 1usize..300, iv in interval()) {
            let f = |t: f64| (2.0 * t).cos() * t.exp();
            let cfg = CompositeConfig::new(iv, n).unwrap();
            let g = composite_estimate(&f, &cfg).unwrap();
            let p = composite_estimate_per_panel(&f, &cfg).unwrap();
            prop_assert!((g - p).abs() < 1e-13);
        }

        #[test]
        fn panel_corrections_telescope(n in 1usize..40, iv in interval(), seed in proptest::collection::vec(-5.0f64..5.0, 41)) {
            let cfg = CompositeConfig::new(iv, n).unwrap();
            let d = &seed[..=n];
            let summed = summed_panel_corrections(d, &cfg);
            prop_assert!((summed - composite_correction(d[0], d[n], &cfg)).abs() < 1e-15);
        }

        #[test]
        fn bounds_are_nonnegative_and_homogeneous(x in 0.0f64..5.0, y in 0.0f64..5.0, l in 0.1f64..3.0, s in 0.2f64..4.0) {
            let (lo, hi) = (x.min(y), x.max(y));
            let iv = Interval::new(0.0, l).unwrap();
            let scaled = Interval::new(0.0, s * l).unwrap();
            let checks = [
                (bound_second_sup(hi, &iv).unwrap().value, bound_second_sup(hi, &scaled).unwrap().value, 3.0),
                (bound_first_range(lo, hi, &iv).unwrap().value, bound_first_range(lo, hi, &scaled).unwrap().value, 2.0),
                (bound_gruss_first(hi, &iv).unwrap().value, bound_gruss_first(hi, &scaled).unwrap().value, 1.5),
                (bound_second_range(lo, hi, &iv).unwrap().value, bound_second_range(lo, hi, &scaled).unwrap().value, 3.0),
                (bound_gruss_second(hi, &iv).unwrap().value, bound_gruss_second(hi, &scaled).unwrap().value, 2.5),
            ];
            for (base, big, degree) in checks {
                prop_assert!(base >= 0.0);
                let want = base * s.powf(degree);
                prop_assert!((big - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn sigma_n_is_at_most_sqrt_n_omega_n(e in smooth_expr(), iv in interval()) {
            for n in [1usize, 2, 4, 8] {
                let cfg = CompositeConfig::new(iv, n).unwrap();
                for order in [Order::First, Order::Second] {
                    if let (Some(s), Some(w)) = (sigma_n(&e, order, &cfg), omega_n(&e, order, &cfg)) {
                        prop_assert!(s <= (n as f64).sqrt() * w + 1e-12, "{e}: sigma_n {s} > sqrt({n}) omega_n {w}");
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn absent_ranges_give_no_range_bounds(shift in 0.0f64..1.0, k in 1u32..3) {
            // t^(k+1/2) on [shift-ish, 1]: the k-th derivative is singular at 0
            let text = format!("(t - {shift:?})^{}", k as f64 + 0.5);
            let f = optiquad::expr::parse(&text).unwrap();
            let iv = Interval::new(shift, shift + 1.0).unwrap();
            let cfg = SamplingConfig::default();
            let info = build_info(&f, &iv, &Overrides::default(), &cfg).unwrap();
            let bounds = best_bounds(&info, &iv).unwrap_or_default();
            for order in [Order::First, Order::Second] {
                if sample_range(&f, order, &iv, &cfg).is_none() {
                    let tags = match order {
                        Order::First => ["FirstRange", "FirstLower", "FirstUpper"],
                        Order::Second => ["SecondRange", "SecondLower", "SecondUpper"],
                    };
                    prop_assert!(bounds.iter().all(|b| !tags.contains(&b.tag.name())));
                }
            }
        }
    }
}
