use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Monomial, Polynomial, Rational, Var};
use crate::error::{Error, Result};

/// A rational function `num / den` over the rationals.
///
/// No multivariate GCD is taken. After each operation integer scaling is
/// pushed into the numerator (the denominator's leading coefficient is 1),
/// shared monomial factors are cancelled and, when the denominator divides
/// the numerator exactly, the quotient replaces the fraction. Equality is
/// decided by cross-multiplication.
#[derive(Clone)]
pub struct Scalar {
    num: Polynomial,
    den: Polynomial,
}

/// Field operation selector for [`Scalar::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::from_poly(Polynomial::zero())
    }

    pub fn one() -> Scalar {
        Scalar::from_poly(Polynomial::one())
    }

    pub fn from_poly(p: Polynomial) -> Scalar {
        Scalar {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn from_rational(q: Rational) -> Scalar {
        Scalar::from_poly(Polynomial::constant(q))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_rational(Rational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(Rational::new(n.into(), d.into()))
    }

    pub fn var(v: Var) -> Scalar {
        Scalar::from_poly(Polynomial::var(v))
    }

    /// `num / den`, reduced as described on the type.
    pub fn fraction(num: Polynomial, den: Polynomial) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_one() {
            return Scalar { num, den };
        }
        if let Some(c) = den.as_constant() {
            return Scalar::from_poly(num.scale(&c.recip()));
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_monomial(&g).expect("gcd divides"),
                den.div_monomial(&g).expect("gcd divides"),
            )
        };
        if let Some(c) = den.as_constant() {
            return Scalar::from_poly(num.scale(&c.recip()));
        }
        let lc = den.leading_term().map(|(_, c)| c.clone()).expect("nonzero");
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if let Some(q) = num.div_exact(&den) {
            return Scalar::from_poly(q);
        }
        Scalar { num, den }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value, if this Scalar does not depend on any variable.
    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut vars = self.num.variables();
        vars.extend(self.den.variables());
        vars
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.variables().contains(&v)
    }

    pub fn arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
        Ok(match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a.try_div(b)?,
        })
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::normalized(
            &self.num * &rhs.den,
            &self.den * &rhs.num,
        ))
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().try_div(self)
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        Scalar {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Exact partial derivative by the quotient rule.
    pub fn partial(&self, v: Var) -> Scalar {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Scalar::from_poly(dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Scalar::normalized(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Scalar::normalized(num, &self.den * &self.den)
    }

    pub fn evaluate(&self, point: &HashMap<Var, Rational>) -> Result<Rational> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.evaluate(point)? / d)
    }

    /// Replace variables by Scalars; variables the map leaves alone stay symbolic.
    pub fn substitute(&self, map: &impl Fn(Var) -> Option<Scalar>) -> Result<Scalar> {
        let mut cache: HashMap<Var, Option<Scalar>> = HashMap::new();
        let num = substitute_poly(&self.num, map, &mut cache);
        if self.den.is_one() {
            return Ok(num);
        }
        let den = substitute_poly(&self.den, map, &mut cache);
        if den.is_zero() {
            return Err(Error::PoleAtSubstitution);
        }
        num.try_div(&den)
    }
}

fn substitute_poly(
    p: &Polynomial,
    map: &impl Fn(Var) -> Option<Scalar>,
    cache: &mut HashMap<Var, Option<Scalar>>,
) -> Scalar {
    let mut total = Scalar::zero();
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut t = Scalar::from_poly(Polynomial::constant(c.clone()));
        for &(v, e) in m.factors() {
            let image = cache.entry(v).or_insert_with(|| map(v)).clone();
            match image {
                Some(s) => t = &t * &s.pow(e),
                None => kept.push((v, e)),
            }
        }
        if !kept.is_empty() {
            t = &t
                * &Scalar::from_poly(Polynomial::term(
                    Rational::one(),
                    Monomial::from_pairs(kept),
                ));
        }
        total = &total + &t;
    }
    total
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for Scalar {}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::normalized(&self.num + &rhs.num, self.den.clone());
        }
        Scalar::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::normalized(&self.num - &rhs.num, self.den.clone());
        }
        Scalar::normalized(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(&self.num * &rhs.num);
        }
        Scalar::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Zero for Scalar {
    fn zero() -> Scalar {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Scalar {
        Scalar::one()
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Scalar {
        Scalar::from_rational(q)
    }
}

impl From<Polynomial> for Scalar {
    fn from(p: Polynomial) -> Scalar {
        Scalar::from_poly(p)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
