use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::chart::{same_chart, Chart};
use crate::error::Result;
use crate::scalar::{Rational, Scalar, Var};

/// Vector field on a chart, one Scalar component per coordinate.
#[derive(Clone)]
pub struct VField {
    chart: Arc<Chart>,
    comps: Vec<Scalar>,
}

impl VField {
    pub fn zero(chart: &Arc<Chart>) -> VField {
        VField {
            chart: chart.clone(),
            comps: vec![Scalar::zero(); chart.dim()],
        }
    }

    /// Coordinate field `∂/∂v`.
    pub fn coordinate(chart: &Arc<Chart>, v: Var) -> Result<VField> {
        let i = chart.require(v)?;
        let mut out = VField::zero(chart);
        out.comps[i] = Scalar::one();
        Ok(out)
    }

    pub fn from_pairs(
        chart: &Arc<Chart>,
        pairs: impl IntoIterator<Item = (Var, Scalar)>,
    ) -> Result<VField> {
        let mut out = VField::zero(chart);
        for (v, s) in pairs {
            let i = chart.require(v)?;
            out.comps[i] = &out.comps[i] + &s;
        }
        Ok(out)
    }

    pub fn from_components(chart: &Arc<Chart>, comps: Vec<Scalar>) -> VField {
        assert_eq!(comps.len(), chart.dim(), "one component per coordinate");
        VField {
            chart: chart.clone(),
            comps,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn component_at(&self, i: usize) -> &Scalar {
        &self.comps[i]
    }

    /// Component along `v`; zero when `v` is not a coordinate.
    pub fn component(&self, v: Var) -> Scalar {
        self.chart
            .index_of(v)
            .map_or_else(Scalar::zero, |i| self.comps[i].clone())
    }

    pub fn set(&mut self, v: Var, s: Scalar) -> Result<()> {
        let i = self.chart.require(v)?;
        self.comps[i] = s;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for v in f.variables() {
            if let Some(i) = self.chart.index_of(v) {
                if !self.comps[i].is_zero() {
                    acc = &acc + &(&self.comps[i] * &f.partial(v));
                }
            }
        }
        acc
    }

    /// `[X, Y]^μ = X(Y^μ) − Y(X^μ)`.
    pub fn bracket(&self, other: &VField) -> Result<VField> {
        same_chart(&self.chart, &other.chart)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| &self.apply(b) - &other.apply(a))
            .collect();
        Ok(VField::from_components(&self.chart, comps))
    }

    fn zip(&self, other: &VField, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<VField> {
        same_chart(&self.chart, &other.chart)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(VField::from_components(&self.chart, comps))
    }

    pub fn add(&self, other: &VField) -> Result<VField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VField) -> Result<VField> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> VField {
        VField::from_components(&self.chart, self.comps.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> VField {
        VField::from_components(&self.chart, self.comps.iter().map(|c| -c).collect())
    }

    pub fn substitute(&self, map: &impl Fn(Var) -> Option<Scalar>) -> Result<VField> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.substitute(map))
            .collect::<Result<_>>()?;
        Ok(VField::from_components(&self.chart, comps))
    }

    pub fn evaluate(&self, point: &HashMap<Var, Rational>) -> Result<Vec<Rational>> {
        self.comps.iter().map(|c| c.evaluate(point)).collect()
    }

    /// Nonzero components in chart order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Var, &Scalar)> {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.chart.var(i), c))
    }
}

impl PartialEq for VField {
    fn eq(&self, other: &VField) -> bool {
        *self.chart == *other.chart && self.comps == other.comps
    }
}

impl fmt::Display for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (v, c) in self.nonzero() {
            if any {
                f.write_str(" + ")?;
            }
            any = true;
            if c.as_constant()
                .is_some_and(|q| q == Rational::from_integer(1.into()))
            {
                write!(f, "∂{v}")?;
            } else {
                write!(f, "({c}) ∂{v}")?;
            }
        }
        if !any {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VField[{}]({self})", self.chart.name())
    }
}
