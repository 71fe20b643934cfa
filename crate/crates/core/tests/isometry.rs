use hecke_trace_core::isometry::{apply, classify, delta, rotation, CMat, Isometry, Kind, PointH3};
use hecke_trace_core::scalars::C64;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

prop_compose! {
    fn arb_c64()(re in -2.0f64..2.0, im in -2.0f64..2.0) -> C64 {
        C64::new(re, im)
    }
}

prop_compose! {
    fn arb_isometry()(a in arb_c64(), b in arb_c64(), c in arb_c64(), d in arb_c64()) -> Isometry {
        let m = CMat { a, b, c, d };
        let m = if m.det().norm() < 0.1 { CMat { a: a + 3.0, b, c, d: d + 3.0 } } else { m };
        Isometry::from_complex(m).expect("nonsingular")
    }
}

prop_compose! {
    fn arb_point()(x in -1.0f64..1.0, y in -1.0f64..1.0, r in 0.2f64..3.0) -> PointH3 {
        PointH3::new(C64::new(x, y), r).unwrap()
    }
}

/// Loxodromic, elliptic or diagonal elements, each hidden by a random conjugator.
fn arb_classifiable() -> impl Strategy<Value = Isometry> {
    prop_oneof![
        arb_isometry(),
        (0.05f64..3.1, arb_isometry()).prop_map(|(phi, c)| c.conjugate(&rotation(phi))),
        (1.05f64..4.0, -3.1f64..3.1, arb_isometry())
            .prop_map(|(m, arg, c)| c.conjugate(&Isometry::diag(C64::from_polar(m, arg)).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn delta_is_invariant(g in arb_isometry(), p in arb_point(), q in arb_point()) {
        let before = delta(&p, &q);
        let after = delta(&apply(&g, &p), &apply(&g, &q));
        prop_assert!(close(before, after), "{before} vs {after}");
    }

    #[test]
    fn action_is_a_group_action(g in arb_isometry(), h in arb_isometry(), p in arb_point()) {
        let two_steps = apply(&g, &apply(&h, &p));
        let one_step = apply(&g.mul(&h), &p);
        // compare as points through the invariant distance
        prop_assert!(close(delta(&two_steps, &one_step), 1.0));
        prop_assert!(close(delta(&apply(&g.inverse(), &apply(&g, &p)), &p), 1.0));
    }

    #[test]
    fn classification_is_conjugation_invariant(t in arb_classifiable(), c in arb_isometry()) {
        let (a, b) = match (classify(&t), classify(&c.conjugate(&t))) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(x), Err(y)) => {
                prop_assert_eq!(x, y);
                return Ok(());
            }
            (x, y) => {
                prop_assert!(false, "{x:?} vs {y:?}");
                unreachable!()
            }
        };
        prop_assert_eq!(a.kind, b.kind);
        match a.kind {
            Kind::Loxodromic => prop_assert!(close(a.norm.unwrap(), b.norm.unwrap())),
            Kind::Elliptic => prop_assert!(close(a.half_angle.unwrap(), b.half_angle.unwrap())),
            _ => {}
        }
        prop_assert!((a.trace_sq - b.trace_sq).norm() <= 1e-9 * (1.0 + a.trace_sq.norm()));
    }
}

#[test]
fn conjugate_is_inverse_t_c() {
    let t = Isometry::diag(C64::new(2.0, 1.0)).unwrap();
    let c = Isometry::from_complex(CMat {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.5, 0.0),
        c: C64::new(0.0, 0.0),
        d: C64::new(1.0, 0.0),
    })
    .unwrap();
    assert!(c.conjugate(&t).eq_tol(&c.inverse().mul(&t).mul(&c), 1e-12));
}
