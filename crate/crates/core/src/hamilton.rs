//! Momentum observables, structure-equation solving and Hamiltonian vector
//! fields on Z, L_VY and LM.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{Chart, Key, VField, VForm};
use crate::linalg::{solve, Solution};
use crate::scalar::var::{base, energy, fiber, frame_xx, frame_yx, frame_yy, multimomentum};
use crate::scalar::{Scalar, Var};
use crate::spaces::{self, make_chart, on_y, SpaceKind, SpaceTag};

/// Vector field on Y, `v = v^i(x)∂x_i + v^A(x, y)∂y_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectableField {
    n: usize,
    k: usize,
    vi: Vec<Scalar>,
    va: Vec<Scalar>,
}

fn check_y_components(n: usize, k: usize, vi: &[Scalar], va: &[Scalar]) -> Result<()> {
    if vi.len() != n || va.len() != k {
        return Err(Error::BadDimensions(format!(
            "expected {n} base and {k} fiber components, got {} and {}",
            vi.len(),
            va.len()
        )));
    }
    for s in vi.iter().chain(va) {
        if let Some(v) = s.variables().into_iter().find(|v| !on_y(*v, n, k)) {
            return Err(Error::Invalid(format!(
                "component depends on {v}, which is not a coordinate of Y"
            )));
        }
    }
    Ok(())
}

impl ProjectableField {
    pub fn new(n: usize, k: usize, vi: Vec<Scalar>, va: Vec<Scalar>) -> Result<Self> {
        check_y_components(n, k, &vi, &va)?;
        for (i, s) in vi.iter().enumerate() {
            if let Some(y) = s.variables().into_iter().find(|v| v.is_fiber()) {
                return Err(Error::NotProjectable(format!("v^{} depends on {y}", i + 1)));
            }
        }
        Ok(ProjectableField { n, k, vi, va })
    }

    pub fn zero(n: usize, k: usize) -> Self {
        ProjectableField {
            n,
            k,
            vi: vec![Scalar::zero(); n],
            va: vec![Scalar::zero(); k],
        }
    }

    /// Build from named components such as `x1 -> 1, y1 -> y1^2`.
    pub fn from_named(n: usize, k: usize, pairs: &[(Var, Scalar)]) -> Result<Self> {
        let mut vi = vec![Scalar::zero(); n];
        let mut va = vec![Scalar::zero(); k];
        for (v, s) in pairs {
            if let Some(i) = (1..=n).find(|&i| base(i) == *v) {
                vi[i - 1] = &vi[i - 1] + s;
            } else if let Some(a) = (1..=k).find(|&a| fiber(a) == *v) {
                va[a - 1] = &va[a - 1] + s;
            } else {
                return Err(Error::Invalid(format!("{v} is not a coordinate of Y")));
            }
        }
        ProjectableField::new(n, k, vi, va)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `v^i`, 1-based.
    pub fn base_component(&self, i: usize) -> &Scalar {
        &self.vi[i - 1]
    }

    /// `v^A`, 1-based.
    pub fn fiber_component(&self, a: usize) -> &Scalar {
        &self.va[a - 1]
    }

    pub fn base_components(&self) -> &[Scalar] {
        &self.vi
    }

    pub fn fiber_components(&self) -> &[Scalar] {
        &self.va
    }

    pub fn is_zero(&self) -> bool {
        self.vi.iter().chain(&self.va).all(Scalar::is_zero)
    }

    /// The same field on any chart that contains the Y coordinates.
    pub fn on_chart(&self, chart: &Arc<Chart>) -> Result<VField> {
        let pairs = (1..=self.n)
            .map(|i| (base(i), self.vi[i - 1].clone()))
            .chain((1..=self.k).map(|a| (fiber(a), self.va[a - 1].clone())));
        VField::from_pairs(chart, pairs)
    }

    /// Lie bracket on Y.
    pub fn bracket(&self, other: &ProjectableField) -> Result<ProjectableField> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::BadDimensions(
                "brackets of fields over different Y".into(),
            ));
        }
        let y = make_chart(SpaceKind::y(self.n, self.k)?)?;
        let b = self.on_chart(&y)?.bracket(&other.on_chart(&y)?)?;
        ProjectableField::from_field(self.n, self.k, &b)
    }

    /// Read the x and y components of a field, ignoring all others.
    pub fn from_field(n: usize, k: usize, x: &VField) -> Result<ProjectableField> {
        let vi = (1..=n).map(|i| x.component(base(i))).collect();
        let va = (1..=k).map(|a| x.component(fiber(a))).collect();
        ProjectableField::new(n, k, vi, va)
    }

    pub fn scale(&self, c: &Scalar) -> ProjectableField {
        ProjectableField {
            n: self.n,
            k: self.k,
            vi: self.vi.iter().map(|s| s * c).collect(),
            va: self.va.iter().map(|s| s * c).collect(),
        }
    }
}

impl fmt::Display for ProjectableField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        let comps = (1..=self.n)
            .map(|i| (base(i), &self.vi[i - 1]))
            .chain((1..=self.k).map(|a| (fiber(a), &self.va[a - 1])));
        for (v, c) in comps {
            if c.is_zero() {
                continue;
            }
            if any {
                f.write_str(" + ")?;
            }
            any = true;
            write!(f, "({c}) ∂{v}")?;
        }
        if !any {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// An observable on a space: an (n−1)-form on Z or a value-degree-1 function on L_VY or LM.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub kind: SpaceKind,
    pub body: VForm,
}

impl Observable {
    pub fn new(kind: SpaceKind, body: VForm) -> Result<Observable> {
        let chart = make_chart(kind)?;
        if *body.chart().as_ref() != *chart {
            return Err(Error::ChartMismatch(
                body.chart().name().into(),
                chart.name().into(),
            ));
        }
        let expected = match kind.tag {
            SpaceTag::Z => (kind.n - 1, 0),
            SpaceTag::LVY | SpaceTag::LM => (0, 1),
            _ => {
                return Err(Error::Invalid(format!(
                    "no observables are defined on {kind}"
                )))
            }
        };
        if (body.form_degree(), body.value_degree()) != expected {
            return Err(Error::DegreeMismatch {
                expected: format!("{expected:?}"),
                found: format!("({}, {})", body.form_degree(), body.value_degree()),
            });
        }
        Ok(Observable { kind, body })
    }
}

/// `f_v = (p^i_A v^A + p v^i) d^{n-1}x_i − p^i_A v^j dy^A ∧ d^{n-2}x_{ij}` on Z.
pub fn momentum_observable_z(v: &ProjectableField) -> Result<Observable> {
    let (n, k) = (v.n, v.k);
    let kind = SpaceKind::z(n, k)?;
    let chart = make_chart(kind)?;
    let vol = spaces::volume_forms(&chart, 2)?;
    let p = Scalar::var(energy());
    let mut out = VForm::zero(&chart, n - 1, 0);
    for i in 1..=n {
        let mut c = &p * &v.vi[i - 1];
        for a in 1..=k {
            c = &c + &(&Scalar::var(multimomentum(i, a)) * &v.va[a - 1]);
        }
        out = out.add(&vol.d1(i).scale(&c))?;
    }
    if n >= 2 {
        for i in 1..=n {
            for j in 1..=n {
                if i == j || v.vi[j - 1].is_zero() {
                    continue;
                }
                for a in 1..=k {
                    let c = -(&Scalar::var(multimomentum(i, a)) * &v.vi[j - 1]);
                    let dy = VForm::monomial(&chart, &[fiber(a)], &[], c)?;
                    out = out.add(&dy.wedge(vol.d2(i, j))?)?;
                }
            }
        }
    }
    Observable::new(kind, out)
}

/// Closed-form `X_{f_v}` on Z.
pub fn hamiltonian_vf_z(v: &ProjectableField) -> Result<VField> {
    let (n, k) = (v.n, v.k);
    let chart = make_chart(SpaceKind::z(n, k)?)?;
    let d = |s: &Scalar, var: Var| s.partial(var);
    let pm = |i: usize, a: usize| Scalar::var(multimomentum(i, a));
    let p = Scalar::var(energy());
    let mut x = v.on_chart(&chart)?;
    let div: Scalar = (1..=n).fold(Scalar::zero(), |acc, j| &acc + &d(&v.vi[j - 1], base(j)));
    for i in 1..=n {
        for a in 1..=k {
            let mut c = -(&pm(i, a) * &div);
            for j in 1..=n {
                c = &c + &(&pm(j, a) * &d(&v.vi[i - 1], base(j)));
            }
            for b in 1..=k {
                c = &c - &(&pm(i, b) * &d(&v.va[b - 1], fiber(a)));
            }
            x.set(multimomentum(i, a), c)?;
        }
    }
    let mut c = &p * &div;
    for i in 1..=n {
        for a in 1..=k {
            c = &c + &(&pm(i, a) * &d(&v.va[a - 1], base(i)));
        }
    }
    x.set(energy(), -c)?;
    Ok(x)
}

/// Coefficient matrix of `X ↦ X ⌟ omega` in the basis of `(form, value)` index pairs.
pub fn contraction_system(omega: &VForm) -> Result<(Vec<Key>, Vec<Vec<Scalar>>)> {
    let chart = omega.chart().clone();
    if omega.form_degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let cols: Vec<VForm> = chart
        .vars()
        .map(|v| omega.interior(&VField::coordinate(&chart, v)?))
        .collect::<Result<_>>()?;
    let mut rows: BTreeMap<Key, usize> = BTreeMap::new();
    for col in &cols {
        for (key, _) in col.terms() {
            let next = rows.len();
            rows.entry(key.clone()).or_insert(next);
        }
    }
    let mut a = vec![vec![Scalar::zero(); cols.len()]; rows.len()];
    for (c, col) in cols.iter().enumerate() {
        for (key, coeff) in col.terms() {
            a[rows[key]][c] = coeff.clone();
        }
    }
    let mut keys = vec![
        Key {
            form: vec![],
            value: vec![]
        };
        rows.len()
    ];
    for (key, i) in rows {
        keys[i] = key;
    }
    Ok((keys, a))
}

/// Solve `X ⌟ omega = rhs` for X by coefficient matching and fraction-free elimination.
pub fn solve_interior(omega: &VForm, rhs: &VForm) -> Result<VField> {
    if **omega.chart() != **rhs.chart() {
        return Err(Error::ChartMismatch(
            omega.chart().name().into(),
            rhs.chart().name().into(),
        ));
    }
    if omega.form_degree() == 0
        || rhs.form_degree() + 1 != omega.form_degree()
        || rhs.value_degree() != omega.value_degree()
    {
        return Err(Error::DegreeMismatch {
            expected: format!(
                "({}, {})",
                omega.form_degree().saturating_sub(1),
                omega.value_degree()
            ),
            found: format!("({}, {})", rhs.form_degree(), rhs.value_degree()),
        });
    }
    let (keys, a) = contraction_system(omega)?;
    let index: BTreeMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut b = vec![Scalar::zero(); keys.len()];
    for (key, c) in rhs.terms() {
        match index.get(key) {
            Some(&i) => b[i] = c.clone(),
            None => return Err(Error::NotAllowable),
        }
    }
    match solve(a, b) {
        Solution::Unique(x) => Ok(VField::from_components(omega.chart(), x)),
        Solution::Inconsistent => Err(Error::NotAllowable),
        Solution::Underdetermined { kernel_dim } => Err(Error::SingularStructure { kernel_dim }),
    }
}

/// Dimension of the kernel of `X ↦ X ⌟ omega` over the chart's function field.
pub fn kernel_dim(omega: &VForm) -> Result<usize> {
    let (_, a) = contraction_system(omega)?;
    let dim = omega.chart().dim();
    if a.is_empty() {
        return Ok(dim);
    }
    let b = vec![Scalar::zero(); a.len()];
    Ok(match solve(a, b) {
        Solution::Underdetermined { kernel_dim } => kernel_dim,
        _ => 0,
    })
}

/// `dΘ` on Z, `i*dθ` on L_VY, `dθ` on LM.
pub fn structure_form(kind: SpaceKind) -> Result<VForm> {
    Ok(match kind.tag {
        SpaceTag::Z => spaces::theta_z(kind.n, kind.k)?.ext_d(),
        SpaceTag::LVY => spaces::theta_lvy(kind.n, kind.k)?.ext_d(),
        SpaceTag::LM => spaces::theta_lm(kind.n)?.ext_d(),
        _ => {
            return Err(Error::Invalid(format!(
                "no structure equation is solved on {kind}"
            )))
        }
    })
}

/// Solve the structure equation `X ⌟ dP = −df` for X.
pub fn solve_structure(d_potential: &VForm, f: &Observable) -> Result<VField> {
    solve_interior(d_potential, &f.body.ext_d().neg())
}

/// `f̂ = f^i π^j_i ⊗ r̂_j + f^A π^B_A ⊗ ŝ_B + f^i π^B_i ⊗ ŝ_B` for arbitrary components
/// over Y. Projectability is not required here.
pub fn tensorial_from_components(
    n: usize,
    k: usize,
    fi: &[Scalar],
    fa: &[Scalar],
) -> Result<Observable> {
    check_y_components(n, k, fi, fa)?;
    let kind = SpaceKind::lvy(n, k)?;
    let chart = make_chart(kind)?;
    let mut comps = vec![Scalar::zero(); n + k];
    for (i, f) in fi.iter().enumerate().map(|(i, f)| (i + 1, f)) {
        for j in 1..=n {
            comps[j - 1] = &comps[j - 1] + &(f * &Scalar::var(frame_xx(j, i)));
        }
        for b in 1..=k {
            comps[n + b - 1] = &comps[n + b - 1] + &(f * &Scalar::var(frame_yx(b, i)));
        }
    }
    for (a, f) in fa.iter().enumerate().map(|(a, f)| (a + 1, f)) {
        for b in 1..=k {
            comps[n + b - 1] = &comps[n + b - 1] + &(f * &Scalar::var(frame_yy(b, a)));
        }
    }
    Observable::new(kind, vector_function(&chart, comps)?)
}

/// `Σ_μ c_μ ⊗ R_μ`.
pub fn vector_function(chart: &Arc<Chart>, comps: Vec<Scalar>) -> Result<VForm> {
    let mut out = VForm::zero(chart, 0, 1);
    for (mu, c) in comps.into_iter().enumerate() {
        out = out.add(&VForm::monomial(chart, &[], &[mu + 1], c)?)?;
    }
    Ok(out)
}

/// Components `f̂^μ` of a value-degree-1 function, μ = 1..=n+k.
pub fn vector_components(f: &VForm) -> Vec<Scalar> {
    (1..=f.chart().model_dim())
        .map(|mu| {
            f.coefficient(&Key {
                form: vec![],
                value: vec![mu as u8],
            })
        })
        .collect()
}

/// The tensorial function of a projectable field.
pub fn tensorial_from_vf_lvy(v: &ProjectableField) -> Result<Observable> {
    tensorial_from_components(v.n, v.k, &v.vi, &v.va)
}

/// Closed-form `X_f̂` on L_VY.
pub fn hamiltonian_vf_lvy(v: &ProjectableField) -> Result<VField> {
    let (n, k) = (v.n, v.k);
    let chart = make_chart(SpaceKind::lvy(n, k)?)?;
    let mut x = v.on_chart(&chart)?;
    for i in 1..=n {
        for j in 1..=n {
            let mut c = Scalar::zero();
            for l in 1..=n {
                c = &c - &(&v.vi[l - 1].partial(base(j)) * &Scalar::var(frame_xx(i, l)));
            }
            x.set(frame_xx(i, j), c)?;
        }
    }
    for a in 1..=k {
        for b in 1..=k {
            let mut c = Scalar::zero();
            for cc in 1..=k {
                c = &c - &(&v.va[cc - 1].partial(fiber(b)) * &Scalar::var(frame_yy(a, cc)));
            }
            x.set(frame_yy(a, b), c)?;
        }
        for i in 1..=n {
            let mut c = Scalar::zero();
            for j in 1..=n {
                c = &c - &(&v.vi[j - 1].partial(base(i)) * &Scalar::var(frame_yx(a, j)));
            }
            for b in 1..=k {
                c = &c - &(&v.va[b - 1].partial(base(i)) * &Scalar::var(frame_yy(a, b)));
            }
            x.set(frame_yx(a, i), c)?;
        }
    }
    Ok(x)
}

/// Parts of an allowable value-degree-1 function on L_VY:
/// `f̂^i = g^j π^i_j + ξ^i`, `f̂^{n+B} = g^i π^B_i + g^A π^B_A + ζ^B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hf1Parts {
    pub g_base: Vec<Scalar>,
    pub g_fiber: Vec<Scalar>,
    pub xi: Vec<Scalar>,
    pub zeta: Vec<Scalar>,
    pub field: VField,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Allowable(Hf1Parts),
    NotAllowable,
}

fn depends_only_on(s: &Scalar, allowed: impl Fn(Var) -> bool) -> bool {
    s.variables().into_iter().all(allowed)
}

/// Decide whether a value-degree-1 function on L_VY (n, k ≥ 2) admits a
/// Hamiltonian vector field, and if so split it into its template parts.
pub fn classify_hf1_lvy(f: &VForm) -> Result<Classification> {
    let chart = f.chart().clone();
    let kind = spaces::kind_of(&chart)
        .filter(|k| k.tag == SpaceTag::LVY)
        .ok_or_else(|| Error::ChartMismatch(chart.name().into(), "LVY".into()))?;
    let (n, k) = (kind.n, kind.k);
    if n < 2 || k < 2 {
        return Err(Error::OutOfCharacterizedRegime { n, k });
    }
    let obs = Observable::new(kind, f.clone())?;
    let field = match solve_structure(&structure_form(kind)?, &obs) {
        Ok(x) => x,
        Err(Error::NotAllowable) => return Ok(Classification::NotAllowable),
        Err(e) => return Err(e),
    };
    let comps = vector_components(f);
    let on_x = |v: Var| (1..=n).any(|i| base(i) == v);
    let mismatch = || Error::Invalid("solver accepted a function outside the HF¹ template".into());

    let g_base: Vec<Scalar> = (1..=n).map(|j| comps[0].partial(frame_xx(1, j))).collect();
    let mut xi = Vec::with_capacity(n);
    for i in 1..=n {
        let mut r = comps[i - 1].clone();
        for j in 1..=n {
            r = &r - &(&g_base[j - 1] * &Scalar::var(frame_xx(i, j)));
        }
        if !depends_only_on(&r, on_x) {
            return Err(mismatch());
        }
        xi.push(r);
    }
    let g_fiber: Vec<Scalar> = (1..=k).map(|a| comps[n].partial(frame_yy(1, a))).collect();
    let mut zeta = Vec::with_capacity(k);
    for b in 1..=k {
        let mut r = comps[n + b - 1].clone();
        for i in 1..=n {
            r = &r - &(&g_base[i - 1] * &Scalar::var(frame_yx(b, i)));
        }
        for a in 1..=k {
            r = &r - &(&g_fiber[a - 1] * &Scalar::var(frame_yy(b, a)));
        }
        if !depends_only_on(&r, |v| on_y(v, n, k)) {
            return Err(mismatch());
        }
        zeta.push(r);
    }
    if !g_base.iter().all(|g| depends_only_on(g, on_x))
        || !g_fiber
            .iter()
            .all(|g| depends_only_on(g, |v| on_y(v, n, k)))
    {
        return Err(mismatch());
    }
    Ok(Classification::Allowable(Hf1Parts {
        g_base,
        g_fiber,
        xi,
        zeta,
        field,
    }))
}

/// `f̂ = f^i π^j_i ⊗ r_j` on LM for a base field with components `f^i(x)`.
pub fn tensorial_lm(f: &[Scalar]) -> Result<Observable> {
    let n = f.len();
    let kind = SpaceKind::lm(n)?;
    let chart = make_chart(kind)?;
    check_base_only(f)?;
    let comps = (1..=n)
        .map(|j| {
            (1..=n).fold(Scalar::zero(), |acc, i| {
                &acc + &(&f[i - 1] * &Scalar::var(frame_xx(j, i)))
            })
        })
        .collect();
    Observable::new(kind, vector_function(&chart, comps)?)
}

fn check_base_only(f: &[Scalar]) -> Result<()> {
    let n = f.len();
    for s in f {
        if let Some(v) = s
            .variables()
            .into_iter()
            .find(|v| !(1..=n).any(|i| base(i) == *v))
        {
            return Err(Error::Invalid(format!(
                "base field component depends on {v}"
            )));
        }
    }
    Ok(())
}

/// `X_f̂ = f^i ∂x_i − ∂f^i/∂x^j π^k_i ∂/∂π^k_j` on LM.
pub fn natural_lift_lm(f: &[Scalar]) -> Result<VField> {
    let n = f.len();
    let chart = make_chart(SpaceKind::lm(n)?)?;
    check_base_only(f)?;
    let mut x = VField::zero(&chart);
    for i in 1..=n {
        x.set(base(i), f[i - 1].clone())?;
    }
    for kk in 1..=n {
        for j in 1..=n {
            let mut c = Scalar::zero();
            for i in 1..=n {
                c = &c - &(&f[i - 1].partial(base(j)) * &Scalar::var(frame_xx(kk, i)));
            }
            x.set(frame_xx(kk, j), c)?;
        }
    }
    Ok(x)
}

/// Both sides of `d(f̂ ∧ ∧^m θ) = −X_f̂ ⌟ (dθ ∧ ∧^m θ)` on L_VY.
#[derive(Clone, Debug)]
pub struct DegreeMReport {
    pub m: usize,
    pub consistent: bool,
    pub lhs: VForm,
    pub rhs: VForm,
}

pub fn solve_structure_m(v: &ProjectableField, m: usize) -> Result<DegreeMReport> {
    let (n, k) = (v.n, v.k);
    if m > n + k {
        return Err(Error::BadDegree(format!("m = {m} outside 0..={}", n + k)));
    }
    let theta = spaces::theta_lvy(n, k)?;
    let power = theta.wedge_power(m)?;
    let f = tensorial_from_vf_lvy(v)?;
    let x = hamiltonian_vf_lvy(v)?;
    let lhs = f.body.wedge(&power)?.ext_d();
    let rhs = theta.ext_d().wedge(&power)?.interior(&x)?.neg();
    Ok(DegreeMReport {
        m,
        consistent: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Check `X_f̂ ⌟ ∧^m θ = m f̂ ∧ ∧^{m−1} θ` for m ≥ 1.
pub fn contraction_identity(v: &ProjectableField, m: usize) -> Result<bool> {
    if m == 0 {
        return Err(Error::BadDegree("m must be at least 1".into()));
    }
    let theta = spaces::theta_lvy(v.n, v.k)?;
    let x = hamiltonian_vf_lvy(v)?;
    let f = tensorial_from_vf_lvy(v)?;
    let lhs = theta.wedge_power(m)?.interior(&x)?;
    let rhs = f
        .body
        .wedge(&theta.wedge_power(m - 1)?)?
        .scale(&Scalar::int(m as i64));
    Ok(lhs == rhs)
}
