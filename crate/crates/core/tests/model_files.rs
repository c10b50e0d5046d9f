use proptest::prelude::*;

use qpcalc::model::{parse_expr, parse_model, resolve_source, run_checks, RunOptions};

fn bundled() -> Vec<(String, String)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qp"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn reprinted_models_give_identical_reports() {
    for (name, src) in bundled() {
        let printed = parse_model(&src).unwrap().to_source();
        let a = run_checks(&resolve_source(&src).unwrap(), &name, &RunOptions::default()).unwrap();
        let b = run_checks(&resolve_source(&printed).unwrap(), &name, &RunOptions::default()).unwrap();
        assert_eq!(qpcalc::model::emit_json(&a), qpcalc::model::emit_json(&b), "{name}");
    }
}

#[test]
fn expected_verdicts() {
    let failing = ["poisson_formal.qp", "su2_broken.qp", "twisted_poisson.qp"];
    for (name, src) in bundled() {
        let r = run_checks(&resolve_source(&src).unwrap(), &name, &RunOptions::default()).unwrap();
        assert_eq!(r.passed(), !failing.contains(&name.as_str()), "{name}");
    }
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(|n| n.to_string()),
        (1i64..4).prop_map(|i| format!("x[{i}]")),
        (1i64..4, 1i64..4).prop_map(|(i, j)| format!("pi[{i},{j}]")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*{b}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), 1i64..5).prop_map(|(a, d)| format!("({a})/{d}")),
            (inner.clone(), 1i64..4).prop_map(|(a, i)| format!("({a}),x[{i}]")),
            inner.prop_map(|a| format!("sum(i in 1..2) ({a})*x[i]")),
        ]
    })
}

proptest! {
    #[test]
    fn expression_round_trip(src in expr()) {
        let e = parse_expr(&src).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(&e, &again);
        prop_assert_eq!(e.to_string(), again.to_string());
    }

    #[test]
    fn printed_expressions_evaluate_the_same(src in expr()) {
        let head = "coords x[1..3]:0\nsymbol pi^2_0 antisymmetric\ntheta = ";
        let a = resolve_source(&format!("{head}{src}\n")).unwrap();
        let printed = parse_expr(&src).unwrap().to_string();
        let b = resolve_source(&format!("{head}{printed}\n")).unwrap();
        prop_assert_eq!(a.theta.unwrap().0, b.theta.unwrap().0);
    }
}
