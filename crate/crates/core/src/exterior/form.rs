use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::chart::{same_chart, Chart};
use super::field::VField;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Var};

/// Sort `idx` in place; `Some(true)` when the permutation was odd, `None` on a repeat.
pub fn normalize_indices(idx: &mut [u8]) -> Option<bool> {
    let mut odd = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] >= idx[j] {
            if idx[j - 1] == idx[j] {
                return None;
            }
            idx.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    Some(odd)
}

/// Basis element `dx^I ⊗ R_J` with both index lists strictly increasing.
/// Form indices are chart positions; value indices run over 1..=n+k,
/// 1..=n being the r̂ block and n+1..=n+k the ŝ block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub form: Vec<u8>,
    pub value: Vec<u8>,
}

/// Differential form of degree `p` with values in the degree-`r` exterior
/// power of the model space.
#[derive(Clone)]
pub struct VForm {
    chart: Arc<Chart>,
    p: usize,
    r: usize,
    terms: BTreeMap<Key, Scalar>,
}

impl VForm {
    pub fn zero(chart: &Arc<Chart>, p: usize, r: usize) -> VForm {
        VForm {
            chart: chart.clone(),
            p,
            r,
            terms: BTreeMap::new(),
        }
    }

    /// Real-valued function.
    pub fn function(chart: &Arc<Chart>, f: Scalar) -> VForm {
        let mut out = VForm::zero(chart, 0, 0);
        out.add_term(
            Key {
                form: vec![],
                value: vec![],
            },
            f,
        );
        out
    }

    pub fn one(chart: &Arc<Chart>) -> VForm {
        VForm::function(chart, Scalar::one())
    }

    /// The coordinate differential `dv`.
    pub fn dvar(chart: &Arc<Chart>, v: Var) -> Result<VForm> {
        let i = chart.require(v)? as u8;
        let mut out = VForm::zero(chart, 1, 0);
        out.add_term(
            Key {
                form: vec![i],
                value: vec![],
            },
            Scalar::one(),
        );
        Ok(out)
    }

    /// The constant model-space basis element `R_μ` (1-based).
    pub fn value_basis(chart: &Arc<Chart>, mu: usize) -> Result<VForm> {
        if mu == 0 || mu > chart.model_dim() {
            return Err(Error::Invalid(format!(
                "value index {mu} outside 1..={}",
                chart.model_dim()
            )));
        }
        let mut out = VForm::zero(chart, 0, 1);
        out.add_term(
            Key {
                form: vec![],
                value: vec![mu as u8],
            },
            Scalar::one(),
        );
        Ok(out)
    }

    /// `coeff · dv₁∧⋯∧dv_p ⊗ R_{μ₁}∧⋯∧R_{μ_r}`; unsorted input is normalized with its sign.
    pub fn monomial(
        chart: &Arc<Chart>,
        form: &[Var],
        value: &[usize],
        coeff: Scalar,
    ) -> Result<VForm> {
        let mut f: Vec<u8> = form
            .iter()
            .map(|v| chart.require(*v).map(|i| i as u8))
            .collect::<Result<_>>()?;
        if let Some(&mu) = value.iter().find(|&&mu| mu == 0 || mu > chart.model_dim()) {
            return Err(Error::Invalid(format!("value index {mu} out of range")));
        }
        let mut val: Vec<u8> = value.iter().map(|&mu| mu as u8).collect();
        let mut out = VForm::zero(chart, f.len(), val.len());
        let (Some(s1), Some(s2)) = (normalize_indices(&mut f), normalize_indices(&mut val)) else {
            return Ok(out);
        };
        out.add_term(
            Key {
                form: f,
                value: val,
            },
            if s1 != s2 { -coeff } else { coeff },
        );
        Ok(out)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn form_degree(&self) -> usize {
        self.p
    }

    pub fn value_degree(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &Key) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of `dv₁∧⋯∧dv_p ⊗ R_J` with sign absorbed for unsorted input.
    pub fn coefficient_of(&self, form: &[Var], value: &[usize]) -> Result<Scalar> {
        let probe = VForm::monomial(&self.chart, form, value, Scalar::one())?;
        Ok(match probe.terms.iter().next() {
            Some((key, sign)) => sign * &self.coefficient(key),
            None => Scalar::zero(),
        })
    }

    /// The function part of a degree-0 real form.
    pub fn as_function(&self) -> Option<Scalar> {
        if self.p != 0 || self.r != 0 {
            return None;
        }
        Some(self.coefficient(&Key {
            form: vec![],
            value: vec![],
        }))
    }

    pub(crate) fn add_term(&mut self, key: Key, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(key.form.len(), self.p);
        debug_assert_eq!(key.value.len(), self.r);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_shape(&self, other: &VForm) -> Result<()> {
        same_chart(&self.chart, &other.chart)?;
        if (self.p, self.r) != (other.p, other.r) {
            return Err(Error::DegreeMismatch {
                expected: format!("({}, {})", self.p, self.r),
                found: format!("({}, {})", other.p, other.r),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &VForm) -> Result<VForm> {
        if other.is_zero() && same_chart(&self.chart, &other.chart).is_ok() {
            return Ok(self.clone());
        }
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VForm) -> Result<VForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VForm {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &Scalar) -> VForm {
        if s.is_zero() {
            return VForm::zero(&self.chart, self.p, self.r);
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rational(&self, q: &Rational) -> VForm {
        self.scale(&Scalar::from_rational(q.clone()))
    }

    fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> VForm {
        let mut out = VForm::zero(&self.chart, self.p, self.r);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    /// Apply a fallible map to every coefficient.
    pub fn try_map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<VForm> {
        let mut out = VForm::zero(&self.chart, self.p, self.r);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn substitute(&self, map: &impl Fn(Var) -> Option<Scalar>) -> Result<VForm> {
        self.try_map_coeffs(|c| c.substitute(map))
    }

    /// Coefficients evaluated at a point, kept as constant Scalars.
    pub fn evaluate(&self, point: &std::collections::HashMap<Var, Rational>) -> Result<VForm> {
        self.try_map_coeffs(|c| c.evaluate(point).map(Scalar::from_rational))
    }

    /// Sum of a list of forms of the given shape.
    pub fn sum<'a>(
        chart: &Arc<Chart>,
        p: usize,
        r: usize,
        items: impl IntoIterator<Item = &'a VForm>,
    ) -> Result<VForm> {
        let mut out = VForm::zero(chart, p, r);
        for f in items {
            out = out.add(f)?;
        }
        Ok(out)
    }

    /// `(α ⊗ R_I) ∧ (β ⊗ R_J) = (α∧β) ⊗ (R_I∧R_J)`.
    pub fn wedge(&self, other: &VForm) -> Result<VForm> {
        same_chart(&self.chart, &other.chart)?;
        let mut out = VForm::zero(&self.chart, self.p + other.p, self.r + other.r);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut form = ka.form.clone();
                form.extend_from_slice(&kb.form);
                let Some(s1) = normalize_indices(&mut form) else {
                    continue;
                };
                let mut value = ka.value.clone();
                value.extend_from_slice(&kb.value);
                let Some(s2) = normalize_indices(&mut value) else {
                    continue;
                };
                let c = ca * cb;
                out.add_term(Key { form, value }, if s1 != s2 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `∧^m a`, with `∧^0 a = 1`.
    pub fn wedge_power(&self, m: usize) -> Result<VForm> {
        let mut out = VForm::one(&self.chart);
        for _ in 0..m {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// Exterior derivative; the new differential goes in front.
    pub fn ext_d(&self) -> VForm {
        let mut out = VForm::zero(&self.chart, self.p + 1, self.r);
        for (k, c) in &self.terms {
            for v in c.variables() {
                let Some(i) = self.chart.index_of(v) else {
                    continue;
                };
                let i = i as u8;
                if k.form.contains(&i) {
                    continue;
                }
                let dc = c.partial(v);
                if dc.is_zero() {
                    continue;
                }
                let mut form = Vec::with_capacity(k.form.len() + 1);
                form.push(i);
                form.extend_from_slice(&k.form);
                let odd = normalize_indices(&mut form).expect("distinct");
                out.add_term(
                    Key {
                        form,
                        value: k.value.clone(),
                    },
                    if odd { -dc } else { dc },
                );
            }
        }
        out
    }

    /// `X ⌟ a`, contracting the first form slot.
    pub fn interior(&self, x: &VField) -> Result<VForm> {
        same_chart(&self.chart, x.chart())?;
        if self.p == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = VForm::zero(&self.chart, self.p - 1, self.r);
        for (k, c) in &self.terms {
            for (s, &i) in k.form.iter().enumerate() {
                let xi = x.component_at(i as usize);
                if xi.is_zero() {
                    continue;
                }
                let mut form = k.form.clone();
                form.remove(s);
                let t = xi * c;
                out.add_term(
                    Key {
                        form,
                        value: k.value.clone(),
                    },
                    if s % 2 == 1 { -t } else { t },
                );
            }
        }
        Ok(out)
    }

    /// Interior product that maps 0-forms to zero instead of failing.
    pub fn hook(&self, x: &VField) -> Result<VForm> {
        if self.p == 0 {
            same_chart(&self.chart, x.chart())?;
            return Ok(VForm::zero(&self.chart, 0, self.r));
        }
        self.interior(x)
    }

    /// `ℒ_X a = X⌟da + d(X⌟a)`.
    pub fn lie_derivative(&self, x: &VField) -> Result<VForm> {
        let first = self.ext_d().interior(x)?;
        if self.p == 0 {
            return Ok(first);
        }
        first.add(&self.interior(x)?.ext_d())
    }

    /// Pair the value part against a degree-r covector given by its components on sorted index sets.
    pub fn pair_value(&self, cov: &BTreeMap<Vec<u8>, Rational>, degree: usize) -> Result<VForm> {
        if degree != self.r {
            return Err(Error::DegreeMismatch {
                expected: format!("value degree {}", self.r),
                found: format!("covector degree {degree}"),
            });
        }
        let mut out = VForm::zero(&self.chart, self.p, 0);
        for (k, c) in &self.terms {
            if let Some(v) = cov.get(&k.value) {
                if !v.is_zero() {
                    out.add_term(
                        Key {
                            form: k.form.clone(),
                            value: vec![],
                        },
                        c.scale(v),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Component along a single value index set, as a real-valued form.
    pub fn value_component(&self, value: &[u8]) -> VForm {
        let mut out = VForm::zero(&self.chart, self.p, 0);
        for (k, c) in &self.terms {
            if k.value == value {
                out.add_term(
                    Key {
                        form: k.form.clone(),
                        value: vec![],
                    },
                    c.clone(),
                );
            }
        }
        out
    }

    /// Variables in coefficients that are not coordinates of the chart.
    pub fn foreign_variables(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self
            .terms
            .values()
            .flat_map(|c| c.variables())
            .filter(|v| !self.chart.has(*v))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn basis_label(&self, k: &Key) -> String {
        let mut s = String::new();
        for (t, &i) in k.form.iter().enumerate() {
            if t > 0 {
                s.push('∧');
            }
            s.push('d');
            s.push_str(self.chart.var(i as usize).name());
        }
        if !k.value.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str("⊗ ");
            let n = self.chart.n();
            for (t, &mu) in k.value.iter().enumerate() {
                if t > 0 {
                    s.push('∧');
                }
                let mu = mu as usize;
                if mu <= n {
                    s.push_str(&format!("r{mu}"));
                } else {
                    s.push_str(&format!("s{}", mu - n));
                }
            }
        }
        s
    }
}

impl PartialEq for VForm {
    fn eq(&self, other: &VForm) -> bool {
        *self.chart == *other.chart
            && (self.p, self.r) == (other.p, other.r)
            && self.terms == other.terms
    }
}

impl fmt::Display for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (t, (k, c)) in self.terms.iter().enumerate() {
            if t > 0 {
                f.write_str(" + ")?;
            }
            let label = self.basis_label(k);
            if label.is_empty() {
                write!(f, "{c}")?;
            } else if is_unit(c) {
                f.write_str(&label)?;
            } else {
                write!(f, "({c}) {label}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VForm[{}; p={}, r={}]({self})",
            self.chart.name(),
            self.p,
            self.r
        )
    }
}

fn is_unit(c: &Scalar) -> bool {
    c.as_constant()
        .is_some_and(|q| q == Rational::from_integer(1.into()))
}
