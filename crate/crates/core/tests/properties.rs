use proptest::prelude::*;

use cpn_surface::expr::{conjugate_expression, evaluate, parse, Bindings, EvalPoint};
use cpn_surface::geometry::metric_at;
use cpn_surface::matrix::{c, frob, Mat, C};
use cpn_surface::model::{el_residual_at, projector_at, scalar_invariants_at, AffineSolution};
use cpn_surface::solutions::{monomial_family, wronskian_mixed};
use cpn_surface::symmetry::apply_projective;

fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("xi".to_string()),
        Just("xibar".to_string()),
        Just("i".to_string()),
        (1u8..9).prop_map(|k| format!("{}", k as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})+({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})-({b})")),
            (inner.clone(), 1u8..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("exp(({a})/4)")),
            inner.clone().prop_map(|a| format!("cosh(({a})/4)")),
            inner.prop_map(|a| format!("({a})/(2+xi*xibar)")),
        ]
    })
}

fn point() -> impl Strategy<Value = C> {
    (-1.2f64..1.2, -1.2f64..1.2).prop_map(|(x, y)| c(x, y))
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec((-2i32..3, -2i32..3), 1..4).prop_map(|coeffs| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, (re, im))| format!("({re}+{im}*i)*xi^{k}"))
            .collect::<Vec<_>>()
            .join("+")
    })
}

fn unitary(seed: [f64; 18], n: usize) -> Mat {
    Mat::from_fn(n, n, |i, j| c(seed[2 * (i * n + j)], seed[2 * (i * n + j) + 1])).qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_round_trips(text in expr_text(), z in point()) {
        let e = parse(&text).unwrap();
        let again = parse(&e.to_string()).unwrap();
        let p = EvalPoint::new(z);
        prop_assert!(close(evaluate(&e, &p).unwrap(), evaluate(&again, &p).unwrap(), 1e-12));
    }

    #[test]
    fn conjugation_conjugates_values(text in expr_text(), z in point()) {
        let e = parse(&text).unwrap();
        let p = EvalPoint::new(z);
        let v = evaluate(&e, &p).unwrap();
        let w = evaluate(&conjugate_expression(&e), &p).unwrap();
        prop_assert!(close(w, v.conj(), 1e-12), "{} vs {}", w, v.conj());
        prop_assert_eq!(conjugate_expression(&conjugate_expression(&e)).to_string(), e.to_string());
    }

    #[test]
    fn projector_is_a_rank_two_hermitian_idempotent(w1 in poly(), w2 in poly(), z in point()) {
        let s = AffineSolution::parse(&[&w1, &w2], Bindings::new()).unwrap();
        let p = projector_at(&s, z).unwrap();
        prop_assert!(p.hermitian_defect() < 1e-12);
        prop_assert!(p.idempotent_defect() < 1e-12);
        prop_assert!((p.trace() - 2.0).norm() < 1e-12);
    }

    #[test]
    fn holomorphic_metrics_are_conformal_and_positive(w1 in poly(), w2 in poly(), z in point()) {
        let s = AffineSolution::parse(&[&w1, &w2], Bindings::new()).unwrap();
        let m = metric_at(&s, z).unwrap();
        prop_assert!(m.q() >= 0.0);
        prop_assert!(m.j().norm() < 1e-12 * (1.0 + m.q()));
        prop_assert!(el_residual_at(&s, z).unwrap().max() < 1e-9);
    }

    #[test]
    fn monomial_metric_matches_closed_form(
        a1 in (-2.0f64..2.0, -2.0f64..2.0),
        a2 in (-2.0f64..2.0, -2.0f64..2.0),
        m in 1u8..4,
        n in 1u8..5,
        z in point(),
    ) {
        prop_assume!(z.norm() > 0.1);
        let e = monomial_family(c(a1.0, a1.1), c(a2.0, a2.1), m as f64, n as f64);
        let s = e.solution().unwrap();
        let (_, q) = e.closed_form.as_ref().unwrap().metric(z).unwrap();
        let got = metric_at(&s, z).unwrap().q();
        prop_assert!((got - q).abs() < 1e-10 * (1.0 + q), "{} vs {}", got, q);
    }

    #[test]
    fn wronskian_output_solves_the_equations(g2 in poly(), g3 in poly(), z in point()) {
        prop_assume!(g2 != g3);
        let e = match wronskian_mixed("w", ["1", &g2, &g3]) {
            Ok(e) => e,
            Err(_) => return Ok(()),
        };
        let s = e.solution().unwrap();
        if let Ok(r) = el_residual_at(&s, z) {
            let a = scalar_invariants_at(&s, z).unwrap().q;
            prop_assume!(r.max().is_finite() && a.is_finite());
            prop_assert!(r.max() < 1e-7 * (1.0 + a), "{}", r.max());
        }
    }

    #[test]
    fn unitary_action_keeps_q(seed in prop::array::uniform18(-1.0f64..1.0), z in point()) {
        let s = AffineSolution::parse(&["xi", "xi^2/2"], Bindings::new()).unwrap();
        let u = unitary(seed, 3);
        prop_assume!(frob(&u) > 0.0);
        if let Ok(t) = apply_projective(&u, &s) {
            let (a, b) = (scalar_invariants_at(&s, z).unwrap(), scalar_invariants_at(&t, z));
            if let Ok(b) = b {
                prop_assert!((a.q - b.q).abs() < 1e-10 * (1.0 + a.q));
            }
        }
    }
}
