use hecke::hyper::to_series_known_to;
use hecke::lang::{eval_series, eval_symbolic, parse, LangError};
use proptest::prelude::*;

const CORPUS: [&str; 50] = [
    "geom",
    "polylog(-2)",
    "polylog(0)",
    "polylog(4)",
    "pFq([], [])",
    "pFq([1], [])",
    "pFq([1], [1])",
    "pFq([1/2], [])",
    "pFq([1, 1, 1], [2, 2])",
    "pFq([2, 2], [1])",
    "pFq([1/3, -2/7], [5/2], scale=-4)",
    "pFq([1+1*i], [2-1/2*i], scale=1*i)",
    "pFq([-3], [1/2])",
    "x^1*pFq([1,1,1],[2,2])",
    "x^0*pFq([1],[])",
    "x^7*pFq([1/2], [3/4], scale=2/3)",
    "x^2*x^3*pFq([1], [])",
    "x^2*geom",
    "x^4*polylog(-1)",
    "x^1*x^1*polylog(2)",
    "x^3*hadamard(geom, geom)",
    "x^2*(U(2) geom)",
    "U(3) x^1*pFq([1,1,1],[2,2])",
    "U(2) polylog(-2)",
    "U(1) geom",
    "U(2) U(3) polylog(-1)",
    "V(2) geom",
    "V(3) U(3) polylog(1)",
    "U(2) V(2) pFq([1/2], [])",
    "euler geom",
    "euler^3 geom",
    "euler^0 polylog(2)",
    "U(5) euler^2 geom",
    "hadamard(polylog(-1), polylog(-1))",
    "hadamard(geom + polylog(1), U(2) geom)",
    "hadamard(hadamard(geom, geom), geom)",
    "geom + geom",
    "geom - geom",
    "geom + polylog(-2) + polylog(2)",
    "geom + (polylog(1) + polylog(2))",
    "2*geom",
    "-3/4*polylog(-3)",
    "1/2+1*i*U(2) geom",
    "-1*i*(geom + geom)",
    "2*geom - 3*polylog(1)",
    "U(2) (3*geom)",
    "V(2) (geom + x^1*geom)",
    "euler (U(2) polylog(-2) + geom)",
    "( ( geom ) )",
    "U(4)U(2)V(8)hadamard(geom,polylog(-1))-1/3*x^2*pFq([],[1/2],scale=-1)",
];

#[test]
fn corpus_round_trips_through_display() {
    for text in CORPUS {
        let e = parse(text).unwrap_or_else(|err| panic!("{text}: {err}"));
        let printed = e.to_string();
        let again = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(again, e, "{text} printed as {printed}");
        // printing is a fixed point after one pass
        assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn corpus_symbolic_agrees_with_series() {
    for text in CORPUS {
        let e = parse(text).unwrap();
        match eval_symbolic(&e) {
            Ok(t) => assert_eq!(
                to_series_known_to(&t, 40),
                eval_series(&e, 40).unwrap(),
                "{text}"
            ),
            Err(LangError::NotClosedForm(_)) => {}
            Err(err) => panic!("{text}: {err}"),
        }
    }
}

#[test]
fn parse_errors_point_at_first_unextendable_byte() {
    // (input, offset)
    let cases = [
        ("U(2", 3),
        ("U(2) ", 5),
        ("V() geom", 2),
        ("euler^ geom", 7),
        ("pFq([1], [2]", 12),
        ("pFq([1], [2], scale 3)", 20),
        ("pFq([1 2], [])", 7),
        ("x^*geom", 2),
        ("x^2 geom", 4),
        ("geom +", 6),
        ("hadamard(geom)", 13),
        ("3 * * geom", 4),
        ("polylog(1/2)", 9),
        ("geom)", 4),
        ("Geom", 0),
    ];
    for (text, offset) in cases {
        let err = parse(text).unwrap_err();
        assert_eq!(err.offset, offset, "{text}: {err}");
        assert!(err.offset <= text.len());
    }
}

fn scalar() -> impl Strategy<Value = String> {
    (-9i64..=9, 1i64..=9)
        .prop_filter("nonzero", |(p, _)| *p != 0)
        .prop_map(|(p, q)| format!("{p}/{q}"))
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("geom".to_string()),
        (-3i64..=3).prop_map(|i| format!("polylog({i})")),
        (
            prop::collection::vec(scalar(), 0..3),
            prop::collection::vec(scalar(), 0..3),
            prop_oneof![Just("1".to_string()), scalar()],
            0usize..4,
        )
            .prop_map(|(a, b, s, j)| format!(
                "x^{j}*pFq([{}], [{}], scale={s})",
                a.join(", "),
                b.join(", ")
            )),
    ]
}

/// Chains of scalings, shifts and `U(n)` over a closed-form leaf.
fn closed_expr() -> impl Strategy<Value = String> {
    leaf().prop_recursive(3, 8, 1, |inner| {
        prop_oneof![
            (1u64..=4, inner.clone()).prop_map(|(n, e)| format!("U({n}) ({e})")),
            (scalar(), inner.clone()).prop_map(|(c, e)| format!("{c}*({e})")),
            (0usize..3, inner).prop_map(|(j, e)| format!("x^{j}*({e})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbolic_and_series_evaluation_agree(text in closed_expr()) {
        // Literals with invalid lower parameters are rejected by the parser.
        let Ok(e) = parse(&text) else { return Ok(()) };
        match eval_symbolic(&e) {
            Ok(t) => prop_assert_eq!(to_series_known_to(&t, 40), eval_series(&e, 40).unwrap()),
            // a transformed lower parameter became a nonpositive integer
            Err(LangError::Transform(_)) => {}
            Err(err) => prop_assert!(false, "{}: {}", text, err),
        }
    }

    #[test]
    fn random_expressions_round_trip(text in closed_expr()) {
        let Ok(e) = parse(&text) else { return Ok(()) };
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }
}
