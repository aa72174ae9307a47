//! Exact arithmetic: rationals, sparse multivariate polynomials, and
//! rational functions ([`Scalar`]) over named chart coordinates.

mod poly;
mod rational_fn;
pub mod var;

pub use poly::{Monomial, Polynomial};
pub use rational_fn::{ArithOp, Scalar};
pub use var::Var;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

use crate::error::Result;

/// Parse an arithmetic expression such as `x1^2*y1 - 3/2*x2` into a Scalar.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    crate::cli::expr::parse_expr(src)?.eval()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::collections::HashMap;

    fn s(src: &str) -> Scalar {
        parse_scalar(src).unwrap()
    }

    fn pt(pairs: &[(&str, Rational)]) -> HashMap<Var, Rational> {
        pairs
            .iter()
            .map(|(k, v)| (Var::new(k), v.clone()))
            .collect()
    }

    #[test]
    fn additive_cancellation() {
        let a = s("x1").try_div(&s("y1")).unwrap();
        let b = &s("1") - &a;
        assert_eq!(&a + &b, Scalar::one());
        assert!((&a + &b).is_polynomial());
    }

    #[test]
    fn factorization_identity_by_cross_multiplication() {
        let lhs =
            Scalar::fraction(s("x1^2 - 1").numer().clone(), s("x1 - 1").numer().clone()).unwrap();
        assert_eq!(lhs, s("x1 + 1"));
    }

    #[test]
    fn rational_coefficient_cancellation() {
        let a = s("2/3*x1");
        let b = s("3/2*x1");
        let prod = &a * &b;
        assert_eq!(prod, s("x1^2"));
        assert_eq!(prod.to_string(), "x1^2");
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            Scalar::arith(&s("x1"), &Scalar::zero(), ArithOp::Div).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn partial_examples() {
        assert_eq!(s("x1^2*y1").partial(Var::new("x1")), s("2*x1*y1"));
        assert_eq!(s("1/x1").partial(Var::new("x1")), s("-1/x1^2"));
        assert!(s("7/3").partial(Var::new("x1")).is_zero());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            s("x1^2 + y1")
                .evaluate(&pt(&[("x1", int(2)), ("y1", int(1))]))
                .unwrap(),
            int(5)
        );
        assert_eq!(
            s("1/x1").evaluate(&pt(&[("x1", int(0))])).unwrap_err(),
            Error::PoleAtPoint
        );
        let det = s("a*d - b*c");
        let id = pt(&[("a", int(1)), ("b", int(0)), ("c", int(0)), ("d", int(1))]);
        assert_eq!(det.evaluate(&id).unwrap(), int(1));
    }

    #[test]
    fn substitution_and_poles() {
        let f = s("x1^2 + y1");
        let g = f
            .substitute(&|v: Var| (v.name() == "x1").then(|| s("2*y1")))
            .unwrap();
        assert_eq!(g, s("4*y1^2 + y1"));
        let h = s("1/(x1 - y1)");
        let err = h
            .substitute(&|v: Var| (v.name() == "x1").then(|| s("y1")))
            .unwrap_err();
        assert_eq!(err, Error::PoleAtSubstitution);
    }
}
