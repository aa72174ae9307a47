//! Charts, vector-valued differential forms, vector fields and the
//! exterior-calculus operators over [`Scalar`](crate::scalar::Scalar).

mod chart;
mod field;
mod form;
pub mod json;
mod map;

pub use chart::{Chart, Role};
pub use field::VField;
pub use form::{normalize_indices, Key, VForm};
pub use map::ChartMap;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::random;
    use crate::scalar::{int, parse_scalar, Scalar, Var};
    use proptest::prelude::*;
    use std::collections::HashMap;
    use std::sync::Arc;

    fn v(name: &str) -> Var {
        Var::new(name)
    }

    fn s(src: &str) -> Scalar {
        parse_scalar(src).unwrap()
    }

    /// Six coordinates, model space R^3 (n=2, k=1).
    fn chart6() -> Arc<Chart> {
        let coords = ["x1", "x2", "y1", "p1_1", "p2_1", "p"]
            .iter()
            .map(|c| {
                let role = match &c[..1] {
                    "x" => Role::Base,
                    "y" => Role::Fiber,
                    _ => Role::Momentum,
                };
                (v(c), role)
            })
            .collect();
        Chart::new("test6", coords, 2, 1).unwrap()
    }

    fn dx(c: &Arc<Chart>, name: &str) -> VForm {
        VForm::dvar(c, v(name)).unwrap()
    }

    fn fun(c: &Arc<Chart>, src: &str) -> VForm {
        VForm::function(c, s(src))
    }

    fn del(c: &Arc<Chart>, name: &str) -> VField {
        VField::coordinate(c, v(name)).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let c = chart6();
        assert!(dx(&c, "x1").wedge(&dx(&c, "x1")).unwrap().is_zero());
        let lhs = fun(&c, "x1")
            .wedge(&dx(&c, "x2"))
            .unwrap()
            .wedge(&dx(&c, "x1"))
            .unwrap();
        let rhs = VForm::monomial(&c, &[v("x1"), v("x2")], &[], s("-x1")).unwrap();
        assert_eq!(lhs, rhs);
        // Two vector-valued 1-forms commute: (-1)^{1·1 + 1·1} = +1.
        let r1 = VForm::value_basis(&c, 1).unwrap();
        let r3 = VForm::value_basis(&c, 3).unwrap();
        let a = dx(&c, "x1").wedge(&r1).unwrap();
        let b = fun(&c, "y1")
            .wedge(&dx(&c, "p"))
            .unwrap()
            .wedge(&r3)
            .unwrap();
        assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
    }

    #[test]
    fn ext_d_examples() {
        let c = chart6();
        let a = fun(&c, "x1").wedge(&dx(&c, "x2")).unwrap();
        assert_eq!(a.ext_d(), dx(&c, "x1").wedge(&dx(&c, "x2")).unwrap());
        assert!(dx(&c, "x1").ext_d().is_zero());
    }

    #[test]
    fn interior_examples() {
        let c = chart6();
        let vol = dx(&c, "x1").wedge(&dx(&c, "x2")).unwrap();
        let d1x1 = vol.interior(&del(&c, "x1")).unwrap();
        assert_eq!(d1x1, dx(&c, "x2"));
        assert_eq!(d1x1.interior(&del(&c, "x2")).unwrap(), VForm::one(&c));
        assert_eq!(vol.interior(&del(&c, "x2")).unwrap(), dx(&c, "x1").neg());
        assert_eq!(
            VForm::one(&c).interior(&del(&c, "x1")).unwrap_err(),
            Error::DegreeZero
        );
    }

    #[test]
    fn lie_derivative_example() {
        let c = chart6();
        let a = fun(&c, "x1").wedge(&dx(&c, "x2")).unwrap();
        assert_eq!(a.lie_derivative(&del(&c, "x1")).unwrap(), dx(&c, "x2"));
    }

    #[test]
    fn wedge_power_examples() {
        let c = chart6();
        assert_eq!(dx(&c, "x1").wedge_power(0).unwrap(), VForm::one(&c));
        assert!(dx(&c, "x1").wedge_power(2).unwrap().is_zero());
    }

    #[test]
    fn pair_value_examples() {
        let c = chart6();
        let a = dx(&c, "x1")
            .wedge(&VForm::value_basis(&c, 1).unwrap())
            .unwrap();
        let mut cov = std::collections::BTreeMap::new();
        cov.insert(vec![1u8], int(1));
        assert_eq!(a.pair_value(&cov, 1).unwrap(), dx(&c, "x1"));
        assert!(a.pair_value(&Default::default(), 1).unwrap().is_zero());
        assert!(matches!(
            a.pair_value(&cov, 2),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = chart6();
        let b = Chart::new("other", vec![(v("x1"), Role::Base)], 1, 0).unwrap();
        let err = dx(&a, "x1")
            .wedge(&VForm::dvar(&b, v("x1")).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::ChartMismatch(..)));
    }

    #[test]
    fn pullback_examples() {
        let c = chart6();
        let a = random::form(&mut random::trial_rng(7, 0), &c, 2, 1, 4, 2);
        assert_eq!(ChartMap::identity(&c).pullback(&a).unwrap(), a);

        let line = Chart::new("line", vec![(v("x1"), Role::Base)], 1, 0).unwrap();
        let square = ChartMap::new(&line, &line, vec![s("x1^2")]).unwrap();
        let pulled = square
            .pullback(&VForm::dvar(&line, v("x1")).unwrap())
            .unwrap();
        assert_eq!(
            pulled,
            VForm::function(&line, s("2*x1"))
                .wedge(&VForm::dvar(&line, v("x1")).unwrap())
                .unwrap()
        );

        let pole = ChartMap::new(&line, &line, vec![s("0")]).unwrap();
        let f = VForm::function(&line, s("1/x1"));
        assert_eq!(pole.pullback(&f).unwrap_err(), Error::PoleAtSubstitution);
    }

    #[test]
    fn pushforward_examples() {
        let line = Chart::new("line", vec![(v("x1"), Role::Base)], 1, 0).unwrap();
        let double = ChartMap::new(&line, &line, vec![s("2*x1")]).unwrap();
        let pt: HashMap<Var, _> = [(v("x1"), int(3))].into_iter().collect();
        let x = VField::coordinate(&line, v("x1")).unwrap();
        assert_eq!(double.pushforward(&x, &pt).unwrap(), vec![int(2)]);
        let c = chart6();
        let y = random::field(&mut random::trial_rng(3, 1), &c, 2);
        let pt: HashMap<Var, _> = c.vars().map(|u| (u, int(1))).collect();
        assert_eq!(
            ChartMap::identity(&c).pushforward(&y, &pt).unwrap(),
            y.evaluate(&pt).unwrap()
        );
    }

    fn sign(e: usize) -> Scalar {
        if e.is_multiple_of(2) {
            Scalar::one()
        } else {
            Scalar::int(-1)
        }
    }

    fn shapes() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
        (any::<u64>(), 0usize..=3, 0usize..=2, 0usize..=2, 0usize..=1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn d_squared_vanishes((seed, p, r, _, _) in shapes()) {
            let c = chart6();
            let a = random::form(&mut random::trial_rng(seed, 0), &c, p, r, 3, 3);
            prop_assert!(a.ext_d().ext_d().is_zero());
        }

        #[test]
        fn graded_commutativity((seed, p, r, q, s_) in shapes()) {
            let c = chart6();
            let mut rng = random::trial_rng(seed, 0);
            let a = random::form(&mut rng, &c, p, r, 3, 2);
            let b = random::form(&mut rng, &c, q, s_, 3, 2);
            let lhs = a.wedge(&b).unwrap();
            let rhs = b.wedge(&a).unwrap().scale(&sign(p * q + r * s_));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn interior_is_antiderivation((seed, p, r, q, s_) in shapes()) {
            let c = chart6();
            let mut rng = random::trial_rng(seed, 1);
            let a = random::form(&mut rng, &c, p.max(1), r, 3, 2);
            let b = random::form(&mut rng, &c, q.max(1), s_, 3, 2);
            let x = random::field(&mut rng, &c, 2);
            let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
            let rhs = a.interior(&x).unwrap().wedge(&b).unwrap()
                .add(&a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign(a.form_degree()))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz_rule_for_d((seed, p, r, q, s_) in shapes()) {
            let c = chart6();
            let mut rng = random::trial_rng(seed, 2);
            let a = random::form(&mut rng, &c, p, r, 2, 2);
            let b = random::form(&mut rng, &c, q, s_, 2, 2);
            let lhs = a.wedge(&b).unwrap().ext_d();
            let rhs = a.ext_d().wedge(&b).unwrap()
                .add(&a.wedge(&b.ext_d()).unwrap().scale(&sign(p))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lie_derivative_is_a_derivation((seed, p, r, q, s_) in shapes()) {
            let c = chart6();
            let mut rng = random::trial_rng(seed, 3);
            let a = random::form(&mut rng, &c, p, r, 2, 2);
            let b = random::form(&mut rng, &c, q, s_, 2, 2);
            let x = random::field(&mut rng, &c, 1);
            let lhs = a.wedge(&b).unwrap().lie_derivative(&x).unwrap();
            let rhs = a.lie_derivative(&x).unwrap().wedge(&b).unwrap()
                .add(&a.wedge(&b.lie_derivative(&x).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            let dl = a.ext_d().lie_derivative(&x).unwrap();
            prop_assert_eq!(dl, a.lie_derivative(&x).unwrap().ext_d());
        }

        #[test]
        fn pullback_commutes_with_wedge_and_d((seed, p, r, q, s_) in shapes()) {
            let c = chart6();
            let mut rng = random::trial_rng(seed, 4);
            let vars: Vec<Var> = c.vars().collect();
            let assignment = vars.iter().map(|_| random::polynomial(&mut rng, &vars, 2, 2)).collect();
            let m = ChartMap::new(&c, &c, assignment).unwrap();
            let a = random::form(&mut rng, &c, p.min(2), r, 2, 1);
            let b = random::form(&mut rng, &c, q.min(1), s_, 2, 1);
            let lhs = m.pullback(&a.wedge(&b).unwrap()).unwrap();
            let rhs = m.pullback(&a).unwrap().wedge(&m.pullback(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(m.pullback(&a.ext_d()).unwrap(), m.pullback(&a).unwrap().ext_d());
        }
    }
}
