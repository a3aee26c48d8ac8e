use hecke::hecke::u_closed_form;
use hecke::hyper::to_series_known_to;
use hecke::series::{
    adjoint_check, equal_to_order, index_gcd, u_apply, v_apply, vnun_projection, PowerSeries,
};
use hecke::{GaussianRational, HypergeometricTerm};
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = GaussianRational> {
    (-20i64..=20, 1i64..=6, -3i64..=3).prop_map(|(p, q, im)| {
        GaussianRational::from_ratio(p, q).unwrap()
            + GaussianRational::from_integer(im) * GaussianRational::i()
    })
}

fn series(len: usize) -> impl Strategy<Value = PowerSeries> {
    (0usize..4, prop::collection::vec(coefficient(), len))
        .prop_map(|(shift, coeffs)| PowerSeries::new(shift, coeffs))
}

fn agree(f: &PowerSeries, g: &PowerSeries) -> bool {
    equal_to_order(f, g, f.known_to().min(g.known_to())).unwrap()
}

proptest! {
    #[test]
    fn u_and_v_compose_multiplicatively(f in series(120), n in 1u64..=12, m in 1u64..=12) {
        let uu = u_apply(n, &u_apply(m, &f).unwrap()).unwrap();
        prop_assert!(agree(&uu, &u_apply(n * m, &f).unwrap()));
        let vv = v_apply(n, &v_apply(m, &f).unwrap()).unwrap();
        prop_assert!(agree(&vv, &v_apply(n * m, &f).unwrap()));
    }

    #[test]
    fn u_is_a_left_inverse_of_v(f in series(60), n in 1u64..=12) {
        prop_assert_eq!(u_apply(n, &v_apply(n, &f).unwrap()).unwrap(), f);
    }

    #[test]
    fn u_and_v_commute_after_removing_the_gcd(f in series(120), n in 1u64..=12, m in 1u64..=12) {
        let g = index_gcd(n, m);
        let lhs = u_apply(n, &v_apply(m, &f).unwrap()).unwrap();
        let rhs = v_apply(m / g, &u_apply(n / g, &f).unwrap()).unwrap();
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn projection_is_idempotent(f in series(80), n in 1u64..=8) {
        let p = vnun_projection(n, &f).unwrap();
        prop_assert_eq!(vnun_projection(n, &p).unwrap(), p.clone());
        prop_assert!(agree(&p, &v_apply(n, &u_apply(n, &f).unwrap()).unwrap()));
    }

    #[test]
    fn v_is_adjoint_to_u(f in series(60), g in series(60), n in 1u64..=6) {
        prop_assert!(adjoint_check(n, &f, &g).unwrap());
    }

    #[test]
    fn closed_form_matches_termwise(
        upper in prop::collection::vec((-9i64..=9, 1i64..=9), 0..3),
        lower in prop::collection::vec((1i64..=9, 1i64..=9), 0..3),
        j in 0usize..8,
        n in 1u64..=5,
    ) {
        let q = |(p, d): (i64, i64)| GaussianRational::from_ratio(p, d).unwrap();
        // positive lower parameters keep every transformed one valid
        let t = HypergeometricTerm::pfq(j, upper.into_iter().map(q).collect(), lower.into_iter().map(q).collect())
            .unwrap();
        let closed = u_closed_form(n, &t).unwrap().output;
        let order = 24;
        let oracle = u_apply(n, &to_series_known_to(&t, n as usize * order + n as usize)).unwrap();
        prop_assert!(equal_to_order(&to_series_known_to(&closed, order), &oracle, order).unwrap());
    }
}
