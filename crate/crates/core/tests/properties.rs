use std::collections::HashMap;

use proptest::prelude::*;

use msx_core::exterior::VForm;
use msx_core::hamilton::{contraction_identity, hamiltonian_vf_z, momentum_observable_z, ProjectableField};
use msx_core::poisson::bracket_z;
use msx_core::random::{self, TrialRng};
use msx_core::scalar::var::{base, fiber};
use msx_core::scalar::{Rational, Scalar, Var};
use msx_core::spaces::{euler_field, make_chart, theta_lvy, theta_z, SpaceKind};

fn vars4() -> Vec<Var> {
    vec![base(1), base(2), fiber(1), fiber(2)]
}

fn scalar(rng: &mut TrialRng) -> Scalar {
    let vars = vars4();
    let num = random::polynomial(rng, &vars, 3, 3);
    let den = random::polynomial(rng, &vars, 2, 2);
    if den.is_zero() {
        num
    } else {
        num.try_div(&den).unwrap()
    }
}

fn sizes() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), prop::sample::select(vec![(1usize, 1usize), (2, 1), (1, 2), (2, 2)]))
        .prop_map(|(s, (n, k))| (s, n, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scalar_field_axioms(seed in any::<u64>()) {
        let mut rng = random::trial_rng(seed, 0);
        let (a, b, c) = (scalar(&mut rng), scalar(&mut rng), scalar(&mut rng));
        prop_assert_eq!(&(&(&a + &b) + &c), &(&a + &(&b + &c)));
        prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn mixed_partials_commute(seed in any::<u64>()) {
        let a = scalar(&mut random::trial_rng(seed, 1));
        let (x, y) = (base(1), fiber(2));
        prop_assert_eq!(a.partial(x).partial(y), a.partial(y).partial(x));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(seed in any::<u64>()) {
        let mut rng = random::trial_rng(seed, 2);
        let (a, b) = (scalar(&mut rng), scalar(&mut rng));
        let point: HashMap<Var, Rational> = vars4().into_iter().map(|v| (v, random::rational(&mut rng))).collect();
        if let (Ok(ea), Ok(eb)) = (a.evaluate(&point), b.evaluate(&point)) {
            prop_assert_eq!((&a * &b).evaluate(&point).unwrap(), &ea * &eb);
            prop_assert_eq!((&a + &b).evaluate(&point).unwrap(), &ea + &eb);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_fields_project_to_their_generators((seed, n, k) in sizes()) {
        let mut rng = random::trial_rng(seed, 3);
        let v = random::projectable_field(&mut rng, n, k, 2);
        let w = random::projectable_field(&mut rng, n, k, 2);
        let project = |x: &msx_core::exterior::VField| {
            let vi = (1..=n).map(|i| x.component(base(i))).collect();
            let va = (1..=k).map(|a| x.component(fiber(a))).collect();
            ProjectableField::new(n, k, vi, va).unwrap()
        };
        let (xv, xw) = (hamiltonian_vf_z(&v).unwrap(), hamiltonian_vf_z(&w).unwrap());
        prop_assert_eq!(project(&xv), v.clone());
        prop_assert_eq!(project(&xv.bracket(&xw).unwrap()), v.bracket(&w).unwrap());
    }

    #[test]
    fn bracket_of_fields_hooks_into_momentum((seed, n, k) in sizes()) {
        let mut rng = random::trial_rng(seed, 4);
        let v = random::projectable_field(&mut rng, n, k, 2);
        let w = random::projectable_field(&mut rng, n, k, 2);
        let commutator = hamiltonian_vf_z(&v).unwrap().bracket(&hamiltonian_vf_z(&w).unwrap()).unwrap();
        let lhs = theta_z(n, k).unwrap().interior(&commutator).unwrap();
        prop_assert_eq!(lhs, momentum_observable_z(&v.bracket(&w).unwrap()).unwrap().body);
    }

    #[test]
    fn bracket_on_z_is_antisymmetric((seed, n, k) in sizes()) {
        let mut rng = random::trial_rng(seed, 5);
        let v = random::projectable_field(&mut rng, n, k, 2);
        let w = random::projectable_field(&mut rng, n, k, 2);
        prop_assert_eq!(bracket_z(&v, &w).unwrap().value, bracket_z(&w, &v).unwrap().value.neg());
    }

    #[test]
    fn euler_field_kills_exact_differentials((seed, n, k) in sizes()) {
        let chart = make_chart(SpaceKind::z(n, k).unwrap()).unwrap();
        let mut rng = random::trial_rng(seed, 6);
        let a = random::form(&mut rng, &chart, n.saturating_sub(2), 0, 2, 2);
        let e = euler_field(n, k).unwrap();
        prop_assert!(a.ext_d().ext_d().interior(&e).unwrap().is_zero());
    }

    #[test]
    fn tensorial_contraction_identity((seed, n, k) in sizes(), m in 1usize..=3) {
        let v = random::projectable_field(&mut random::trial_rng(seed, 7), n, k, 2);
        prop_assert!(contraction_identity(&v, m.min(n + k)).unwrap());
    }
}

#[test]
fn d_of_theta_powers() {
    for (n, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
        let theta = theta_lvy(n, k).unwrap();
        let dtheta = theta.ext_d();
        for m in 1..=3 {
            let lhs = theta.wedge_power(m).unwrap().ext_d();
            let rhs = dtheta
                .wedge(&theta.wedge_power(m - 1).unwrap())
                .unwrap()
                .scale(&Scalar::int(m as i64));
            assert_eq!(lhs, rhs, "n={n} k={k} m={m}");
        }
    }
}

#[test]
fn z_is_a_cotangent_bundle_when_n_is_one() {
    for k in 1..=3 {
        let theta = theta_z(1, k).unwrap();
        let chart = theta.chart().clone();
        let mut expected = VForm::dvar(&chart, base(1))
            .unwrap()
            .scale(&Scalar::var(msx_core::scalar::var::energy()));
        for a in 1..=k {
            let t = VForm::dvar(&chart, fiber(a))
                .unwrap()
                .scale(&Scalar::var(msx_core::scalar::var::multimomentum(1, a)));
            expected = expected.add(&t).unwrap();
        }
        assert_eq!(theta, expected, "k={k}");
    }
}
