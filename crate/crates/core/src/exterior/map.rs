use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use super::chart::{same_chart, Chart};
use super::field::VField;
use super::form::{Key, VForm};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Var};

/// Smooth map between charts given by coordinate expressions: each target
/// coordinate is assigned a Scalar over the source coordinates.
#[derive(Clone, Debug)]
pub struct ChartMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    assignment: Vec<Scalar>,
}

impl ChartMap {
    pub fn new(
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        assignment: Vec<Scalar>,
    ) -> Result<ChartMap> {
        if assignment.len() != target.dim() {
            return Err(Error::BadDimensions(format!(
                "{} assignments for {} target coordinates",
                assignment.len(),
                target.dim()
            )));
        }
        Ok(ChartMap {
            source: source.clone(),
            target: target.clone(),
            assignment,
        })
    }

    pub fn identity(chart: &Arc<Chart>) -> ChartMap {
        let assignment = chart.vars().map(Scalar::var).collect();
        ChartMap {
            source: chart.clone(),
            target: chart.clone(),
            assignment,
        }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn assignment(&self) -> impl Iterator<Item = (Var, &Scalar)> {
        self.target.vars().zip(&self.assignment)
    }

    pub fn image_of(&self, v: Var) -> Option<&Scalar> {
        self.target.index_of(v).map(|i| &self.assignment[i])
    }

    fn substitution(&self) -> impl Fn(Var) -> Option<Scalar> + '_ {
        move |v| self.target.index_of(v).map(|i| self.assignment[i].clone())
    }

    /// `m*a`: substitute the assignments into the coefficients and replace each
    /// `d(target coordinate)` by the differential of its assignment.
    pub fn pullback(&self, a: &VForm) -> Result<VForm> {
        same_chart(a.chart(), &self.target)?;
        let differentials: Vec<VForm> = self
            .assignment
            .iter()
            .map(|s| VForm::function(&self.source, s.clone()).ext_d())
            .collect();
        let subst = self.substitution();
        let mut out = VForm::zero(&self.source, a.form_degree(), a.value_degree());
        for (k, c) in a.terms() {
            let coeff = c.substitute(&subst)?;
            if coeff.is_zero() {
                continue;
            }
            let mut piece = VForm::function(&self.source, coeff);
            for &i in &k.form {
                piece = piece.wedge(&differentials[i as usize])?;
            }
            for (pk, pc) in piece.terms() {
                out.add_term(
                    Key {
                        form: pk.form.clone(),
                        value: k.value.clone(),
                    },
                    pc.clone(),
                );
            }
        }
        Ok(out)
    }

    /// Values of the target coordinates at the image of a source point.
    pub fn image_point(&self, point: &HashMap<Var, Rational>) -> Result<HashMap<Var, Rational>> {
        self.target
            .vars()
            .zip(&self.assignment)
            .map(|(v, s)| Ok((v, s.evaluate(point)?)))
            .collect()
    }

    /// Jacobian-vector product `dm(X)` at a point, as target components.
    pub fn pushforward(&self, x: &VField, point: &HashMap<Var, Rational>) -> Result<Vec<Rational>> {
        same_chart(x.chart(), &self.source)?;
        let xv = x.evaluate(point)?;
        self.assignment
            .iter()
            .map(|s| {
                let mut acc = Rational::zero();
                for (i, xi) in xv.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    let d = s.partial(self.source.var(i));
                    if !d.is_zero() {
                        acc += d.evaluate(point)? * xi;
                    }
                }
                Ok(acc)
            })
            .collect()
    }
}
