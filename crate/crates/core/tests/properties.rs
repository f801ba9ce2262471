use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use sistab_core::{exact_div, Cq, DegreeTuple, Mat, TrigPoly};

const DIM: usize = 2;

fn coeff() -> impl Strategy<Value = Cq> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| Cq::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into())))
}

fn poly() -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(((-2i32..=2), (-2i32..=2), coeff()), 0..5).prop_map(|terms| {
        let mut p = TrigPoly::zero(DIM);
        for (a, b, c) in terms {
            p.add_term(DegreeTuple(vec![a, b]), &c);
        }
        p
    })
}

fn nonzero_poly() -> impl Strategy<Value = TrigPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn matrix(n: usize) -> impl Strategy<Value = Mat<TrigPoly>> {
    prop::collection::vec(poly(), n * n).prop_map(move |v| Mat::from_vec(n, n, v).unwrap())
}

fn torus_point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(0.0..std::f64::consts::TAU, DIM)
        .prop_map(|t| t.into_iter().map(|a| Complex64::from_polar(1.0, a)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &TrigPoly::one(DIM), a.clone());
    }

    #[test]
    fn product_evaluates_pointwise(a in poly(), b in poly(), z in torus_point()) {
        let lhs = (&a * &b).eval(&z).unwrap();
        let rhs = a.eval(&z).unwrap() * b.eval(&z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn circle_conj_is_conjugate_on_torus(a in poly(), z in torus_point()) {
        let lhs = a.circle_conj().eval(&z).unwrap();
        let rhs = a.eval(&z).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        prop_assert!((&a * &a.circle_conj()).is_hermitian());
    }

    #[test]
    fn det_expansions_agree(m in matrix(3)) {
        prop_assert_eq!(m.det().unwrap(), m.det_leibniz().unwrap());
    }

    #[test]
    fn det_is_multiplicative(a in matrix(2), b in matrix(2)) {
        let ab = a.matmul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
    }

    #[test]
    fn exact_div_inverts_product(a in poly(), b in nonzero_poly()) {
        prop_assert_eq!(exact_div(&(&a * &b), &b).unwrap(), a);
    }

    #[test]
    fn text_round_trip(a in poly()) {
        prop_assert_eq!(TrigPoly::parse_text(&a.to_text(), DIM).unwrap(), a);
    }
}
