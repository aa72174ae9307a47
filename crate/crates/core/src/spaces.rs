//! Canonical charts and canonical geometric objects of each space.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exterior::{Chart, Role, VField, VForm};
use crate::scalar::var::{base, energy, fiber, frame_xx, frame_yx, frame_yy, multimomentum};
use crate::scalar::{Scalar, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceTag {
    /// Configuration bundle, coordinates `(x, y)`.
    Y,
    /// Affine multiphase space, `(x, y, p^j_B, p)`.
    Z,
    /// Linear multiphase space carrying the TX-valued potential.
    JstarGunther,
    /// Linear multiphase space carrying the n-form-valued potential.
    JstarKT,
    /// Vertically adapted frame bundle, `(x, y, π^i_j, π^A_B, π^A_i)`.
    LVY,
    /// Linear frame bundle of the base, `(x, π^i_j)`.
    LM,
}

impl SpaceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceTag::Y => "Y",
            SpaceTag::Z => "Z",
            SpaceTag::JstarGunther => "Jstar.gunther",
            SpaceTag::JstarKT => "Jstar.kt",
            SpaceTag::LVY => "LVY",
            SpaceTag::LM => "LM",
        }
    }

    pub fn parse(name: &str) -> Option<SpaceTag> {
        Some(match name {
            "Y" => SpaceTag::Y,
            "Z" => SpaceTag::Z,
            "Jstar.gunther" => SpaceTag::JstarGunther,
            "Jstar.kt" => SpaceTag::JstarKT,
            "LVY" => SpaceTag::LVY,
            "LM" => SpaceTag::LM,
            _ => return None,
        })
    }
}

/// A space together with its dimensions. `k` is 0 for LM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceKind {
    pub tag: SpaceTag,
    pub n: usize,
    pub k: usize,
}

impl SpaceKind {
    pub fn new(tag: SpaceTag, n: usize, k: usize) -> Result<SpaceKind> {
        if n == 0 {
            return Err(Error::BadDimensions(format!(
                "{}: n must be at least 1",
                tag.as_str()
            )));
        }
        match tag {
            SpaceTag::LM if k != 0 => Err(Error::BadDimensions("LM takes n only".into())),
            SpaceTag::LM => Ok(SpaceKind { tag, n, k: 0 }),
            _ if k == 0 => Err(Error::BadDimensions(format!(
                "{}: k must be at least 1",
                tag.as_str()
            ))),
            _ => Ok(SpaceKind { tag, n, k }),
        }
    }

    pub fn y(n: usize, k: usize) -> Result<SpaceKind> {
        SpaceKind::new(SpaceTag::Y, n, k)
    }

    pub fn z(n: usize, k: usize) -> Result<SpaceKind> {
        SpaceKind::new(SpaceTag::Z, n, k)
    }

    pub fn lvy(n: usize, k: usize) -> Result<SpaceKind> {
        SpaceKind::new(SpaceTag::LVY, n, k)
    }

    pub fn lm(n: usize) -> Result<SpaceKind> {
        SpaceKind::new(SpaceTag::LM, n, 0)
    }

    pub fn chart(self) -> Result<Arc<Chart>> {
        make_chart(self)
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            SpaceTag::LM => write!(f, "LM(n={})", self.n),
            t => write!(f, "{}(n={},k={})", t.as_str(), self.n, self.k),
        }
    }
}

fn chart_cache() -> &'static Mutex<HashMap<SpaceKind, Arc<Chart>>> {
    static CACHE: OnceLock<Mutex<HashMap<SpaceKind, Arc<Chart>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The chart of a space. Charts are shared, so repeated calls return the same `Arc`.
pub fn make_chart(kind: SpaceKind) -> Result<Arc<Chart>> {
    let kind = SpaceKind::new(kind.tag, kind.n, kind.k)?;
    if let Some(c) = chart_cache().lock().expect("chart cache").get(&kind) {
        return Ok(c.clone());
    }
    let (n, k) = (kind.n, kind.k);
    let mut coords: Vec<(Var, Role)> = (1..=n).map(|i| (base(i), Role::Base)).collect();
    if kind.tag != SpaceTag::LM {
        coords.extend((1..=k).map(|a| (fiber(a), Role::Fiber)));
    }
    match kind.tag {
        SpaceTag::Y => {}
        SpaceTag::Z | SpaceTag::JstarGunther | SpaceTag::JstarKT => {
            for j in 1..=n {
                for b in 1..=k {
                    coords.push((multimomentum(j, b), Role::Momentum));
                }
            }
            if kind.tag == SpaceTag::Z {
                coords.push((energy(), Role::Momentum));
            }
        }
        SpaceTag::LVY | SpaceTag::LM => {
            for i in 1..=n {
                for j in 1..=n {
                    coords.push((frame_xx(i, j), Role::Frame));
                }
            }
            if kind.tag == SpaceTag::LVY {
                for a in 1..=k {
                    for b in 1..=k {
                        coords.push((frame_yy(a, b), Role::Frame));
                    }
                }
                for a in 1..=k {
                    for i in 1..=n {
                        coords.push((frame_yx(a, i), Role::Frame));
                    }
                }
            }
        }
    }
    let chart = Chart::new(kind.to_string(), coords, n, k)?;
    chart_cache()
        .lock()
        .expect("chart cache")
        .insert(kind, chart.clone());
    Ok(chart)
}

/// The space a chart was built for, recovered from its name.
pub fn kind_of(chart: &Chart) -> Option<SpaceKind> {
    let name = chart.name();
    let (tag, _) = name.split_once('(')?;
    let tag = SpaceTag::parse(tag)?;
    SpaceKind::new(tag, chart.n(), chart.k()).ok()
}

/// `d^n x`, `d^{n-1}x_i = ∂x_i ⌟ d^n x` and `d^{n-2}x_{ij} = ∂x_j ⌟ (∂x_i ⌟ d^n x)`.
#[derive(Clone, Debug)]
pub struct VolumeForms {
    pub top: VForm,
    /// Indexed by `i - 1`.
    pub minus1: Vec<VForm>,
    /// Indexed by `(i - 1, j - 1)`; empty when n = 1.
    pub minus2: Vec<Vec<VForm>>,
}

impl VolumeForms {
    pub fn d1(&self, i: usize) -> &VForm {
        &self.minus1[i - 1]
    }

    pub fn d2(&self, i: usize, j: usize) -> &VForm {
        &self.minus2[i - 1][j - 1]
    }
}

/// Volume forms of the base up to the requested contraction depth (0, 1 or 2).
pub fn volume_forms(chart: &Arc<Chart>, depth: usize) -> Result<VolumeForms> {
    let n = chart.n();
    let xs: Vec<Var> = (1..=n).map(base).collect();
    let top = VForm::monomial(chart, &xs, &[], Scalar::one())?;
    let dels: Vec<VField> = xs
        .iter()
        .map(|v| VField::coordinate(chart, *v))
        .collect::<Result<_>>()?;
    let mut minus1 = Vec::new();
    if depth >= 1 {
        for d in &dels {
            minus1.push(top.interior(d)?);
        }
    }
    let mut minus2 = Vec::new();
    if depth >= 2 && n >= 2 {
        for a in &minus1 {
            minus2.push(
                dels.iter()
                    .map(|d| a.interior(d))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }
    Ok(VolumeForms {
        top,
        minus1,
        minus2,
    })
}

/// Connection coefficients `γ^A_j` over Y, stored as `gamma[A-1][j-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoefficients {
    n: usize,
    k: usize,
    gamma: Vec<Vec<Scalar>>,
}

impl ConnectionCoefficients {
    pub fn new(n: usize, k: usize, gamma: Vec<Vec<Scalar>>) -> Result<Self> {
        if gamma.len() != k || gamma.iter().any(|row| row.len() != n) {
            return Err(Error::BadDimensions(format!("connection must be {k}x{n}")));
        }
        for s in gamma.iter().flatten() {
            if let Some(v) = s.variables().into_iter().find(|v| !on_y(*v, n, k)) {
                return Err(Error::Invalid(format!(
                    "connection coefficient depends on {v}, which is not a coordinate of Y"
                )));
            }
        }
        Ok(ConnectionCoefficients { n, k, gamma })
    }

    pub fn zero(n: usize, k: usize) -> Self {
        ConnectionCoefficients {
            n,
            k,
            gamma: vec![vec![Scalar::zero(); n]; k],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `γ^A_j` with 1-based indices.
    pub fn get(&self, a: usize, j: usize) -> &Scalar {
        &self.gamma[a - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.gamma
    }
}

/// Whether `v` is one of `x1..xn, y1..yk`.
pub fn on_y(v: Var, n: usize, k: usize) -> bool {
    (1..=n).any(|i| base(i) == v) || (1..=k).any(|a| fiber(a) == v)
}

/// Pulled-back soldering form on L_VY:
/// `π^i_j dx^j ⊗ r̂_i + (π^A_j dx^j + π^A_B dy^B) ⊗ ŝ_A`.
pub fn theta_lvy(n: usize, k: usize) -> Result<VForm> {
    let chart = make_chart(SpaceKind::lvy(n, k)?)?;
    let mut out = VForm::zero(&chart, 1, 1);
    for i in 1..=n {
        for j in 1..=n {
            out = out.add(&VForm::monomial(
                &chart,
                &[base(j)],
                &[i],
                Scalar::var(frame_xx(i, j)),
            )?)?;
        }
    }
    for a in 1..=k {
        for j in 1..=n {
            out = out.add(&VForm::monomial(
                &chart,
                &[base(j)],
                &[n + a],
                Scalar::var(frame_yx(a, j)),
            )?)?;
        }
        for b in 1..=k {
            out = out.add(&VForm::monomial(
                &chart,
                &[fiber(b)],
                &[n + a],
                Scalar::var(frame_yy(a, b)),
            )?)?;
        }
    }
    Ok(out)
}

/// Soldering form on LM: `π^i_j dx^j ⊗ r_i`.
pub fn theta_lm(n: usize) -> Result<VForm> {
    let chart = make_chart(SpaceKind::lm(n)?)?;
    let mut out = VForm::zero(&chart, 1, 1);
    for i in 1..=n {
        for j in 1..=n {
            out = out.add(&VForm::monomial(
                &chart,
                &[base(j)],
                &[i],
                Scalar::var(frame_xx(i, j)),
            )?)?;
        }
    }
    Ok(out)
}

/// Canonical n-form on Z: `p^i_A dy^A ∧ d^{n-1}x_i + p d^n x`.
pub fn theta_z(n: usize, k: usize) -> Result<VForm> {
    theta_z_scaled(n, k, &Scalar::one())
}

/// `Θ` with the `p d^n x` term multiplied by `c`; `c = 1` gives the canonical form.
pub fn theta_z_scaled(n: usize, k: usize, c: &Scalar) -> Result<VForm> {
    let chart = make_chart(SpaceKind::z(n, k)?)?;
    let vol = volume_forms(&chart, 1)?;
    let mut out = vol.top.scale(&(c * &Scalar::var(energy())));
    for i in 1..=n {
        for a in 1..=k {
            let t = VForm::monomial(&chart, &[fiber(a)], &[], Scalar::var(multimomentum(i, a)))?
                .wedge(vol.d1(i))?;
            out = out.add(&t)?;
        }
    }
    Ok(out)
}

/// `Σ_i (p^i_A dy^A + p^i_A γ^A_j dx^j)` component attached to index `i`.
fn gamma_one_form(chart: &Arc<Chart>, gamma: &ConnectionCoefficients, i: usize) -> Result<VForm> {
    let mut out = VForm::zero(chart, 1, 0);
    for a in 1..=gamma.k() {
        let p = Scalar::var(multimomentum(i, a));
        out = out.add(&VForm::monomial(chart, &[fiber(a)], &[], p.clone())?)?;
        for j in 1..=gamma.n() {
            let c = &p * gamma.get(a, j);
            out = out.add(&VForm::monomial(chart, &[base(j)], &[], c)?)?;
        }
    }
    Ok(out)
}

/// Connection-dependent potential on J*Y.
///
/// The TX-valued version is `(p^i_A dy^A + p^i_A γ^A_j dx^j) ⊗ ∂x_i`, stored with
/// `∂x_i` as the r̂ value index `i`. The n-form version replaces `⊗ ∂x_i` by
/// `∧ d^{n-1}x_i` and is real valued.
pub fn theta_gamma(tag: SpaceTag, gamma: &ConnectionCoefficients) -> Result<VForm> {
    let (n, k) = (gamma.n(), gamma.k());
    let chart = make_chart(SpaceKind::new(tag, n, k)?)?;
    match tag {
        SpaceTag::JstarGunther => {
            let mut out = VForm::zero(&chart, 1, 1);
            for i in 1..=n {
                let e = VForm::value_basis(&chart, i)?;
                out = out.add(&gamma_one_form(&chart, gamma, i)?.wedge(&e)?)?;
            }
            Ok(out)
        }
        SpaceTag::JstarKT => {
            let vol = volume_forms(&chart, 1)?;
            let mut out = VForm::zero(&chart, n, 0);
            for i in 1..=n {
                out = out.add(&gamma_one_form(&chart, gamma, i)?.wedge(vol.d1(i))?)?;
            }
            Ok(out)
        }
        _ => Err(Error::BadDimensions(format!(
            "connection potentials live on J*Y, not {}",
            tag.as_str()
        ))),
    }
}

/// The unique field `E` on Z with `E ⌟ dΘ = Θ`.
pub fn euler_field(n: usize, k: usize) -> Result<VField> {
    let theta = theta_z(n, k)?;
    crate::hamilton::solve_interior(&theta.ext_d(), &theta).map_err(|e| match e {
        Error::NotAllowable | Error::SingularStructure { .. } => Error::SolveFailed(e.to_string()),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamilton::{momentum_observable_z, ProjectableField};
    use crate::scalar::parse_scalar;

    fn s(src: &str) -> Scalar {
        parse_scalar(src).unwrap()
    }

    fn mono(c: &Arc<Chart>, form: &[&str], value: &[usize], coeff: &str) -> VForm {
        let vars: Vec<Var> = form.iter().map(|v| Var::new(v)).collect();
        VForm::monomial(c, &vars, value, s(coeff)).unwrap()
    }

    fn sum(items: &[VForm]) -> VForm {
        let first = &items[0];
        VForm::sum(
            first.chart(),
            first.form_degree(),
            first.value_degree(),
            items,
        )
        .unwrap()
    }

    #[test]
    fn chart_sizes() {
        let z = make_chart(SpaceKind::z(1, 1).unwrap()).unwrap();
        let names: Vec<&str> = z.vars().map(|v| v.name()).collect();
        assert_eq!(names, ["x1", "y1", "p1_1", "p"]);
        assert_eq!(make_chart(SpaceKind::lvy(2, 1).unwrap()).unwrap().dim(), 10);
        assert_eq!(make_chart(SpaceKind::lm(2).unwrap()).unwrap().dim(), 6);
        for (n, k) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            let jg = make_chart(SpaceKind::new(SpaceTag::JstarGunther, n, k).unwrap()).unwrap();
            let jk = make_chart(SpaceKind::new(SpaceTag::JstarKT, n, k).unwrap()).unwrap();
            assert_eq!(jg.dim(), n + k + n * k);
            assert_eq!(jk.dim(), n + k + n * k);
            let z = make_chart(SpaceKind::z(n, k).unwrap()).unwrap();
            assert_eq!(z.dim(), n + k + n * k + 1);
            let l = make_chart(SpaceKind::lvy(n, k).unwrap()).unwrap();
            assert_eq!(l.dim(), n + k + n * n + k * k + n * k);
        }
        assert!(matches!(SpaceKind::z(0, 1), Err(Error::BadDimensions(_))));
        assert!(matches!(SpaceKind::lvy(1, 0), Err(Error::BadDimensions(_))));
        assert_eq!(
            kind_of(&make_chart(SpaceKind::lm(3).unwrap()).unwrap()),
            Some(SpaceKind::lm(3).unwrap())
        );
    }

    #[test]
    fn volume_form_contractions() {
        let c1 = make_chart(SpaceKind::z(1, 1).unwrap()).unwrap();
        let v1 = volume_forms(&c1, 2).unwrap();
        assert_eq!(v1.top, mono(&c1, &["x1"], &[], "1"));
        assert_eq!(*v1.d1(1), VForm::one(&c1));
        assert!(v1.minus2.is_empty());

        let c2 = make_chart(SpaceKind::z(2, 1).unwrap()).unwrap();
        let v2 = volume_forms(&c2, 2).unwrap();
        assert_eq!(*v2.d1(1), mono(&c2, &["x2"], &[], "1"));
        assert_eq!(*v2.d1(2), mono(&c2, &["x1"], &[], "-1"));
        assert_eq!(*v2.d2(1, 2), VForm::one(&c2));
        assert_eq!(*v2.d2(2, 1), VForm::one(&c2).neg());
        assert!(v2.d2(1, 1).is_zero());
    }

    #[test]
    fn soldering_form_lvy() {
        let th = theta_lvy(1, 1).unwrap();
        let c = th.chart().clone();
        let expected = sum(&[
            mono(&c, &["x1"], &[1], "pxx1_1"),
            mono(&c, &["x1"], &[2], "pyx1_1"),
            mono(&c, &["y1"], &[2], "pyy1_1"),
        ]);
        assert_eq!(th, expected);

        // d of the soldering form: dπ^i_j∧dx^j ⊗ r̂_i + (dπ^A_i∧dx^i + dπ^A_B∧dy^B) ⊗ ŝ_A.
        let th = theta_lvy(2, 2).unwrap();
        let c = th.chart().clone();
        let mut expected = VForm::zero(&c, 2, 1);
        for i in 1..=2 {
            for j in 1..=2 {
                let t =
                    VForm::monomial(&c, &[frame_xx(i, j), base(j)], &[i], Scalar::one()).unwrap();
                expected = expected.add(&t).unwrap();
            }
        }
        for a in 1..=2 {
            for i in 1..=2 {
                let t = VForm::monomial(&c, &[frame_yx(a, i), base(i)], &[2 + a], Scalar::one())
                    .unwrap();
                expected = expected.add(&t).unwrap();
            }
            for b in 1..=2 {
                let t = VForm::monomial(&c, &[frame_yy(a, b), fiber(b)], &[2 + a], Scalar::one())
                    .unwrap();
                expected = expected.add(&t).unwrap();
            }
        }
        let dth = th.ext_d();
        assert_eq!(dth, expected);

        // No dx∧dy terms in the r̂ block.
        for (key, _) in dth.terms() {
            if (key.value[0] as usize) <= 2 {
                let roles: Vec<Role> = key.form.iter().map(|&i| c.role(i as usize)).collect();
                assert!(!(roles.contains(&Role::Base) && roles.contains(&Role::Fiber)));
            }
        }
    }

    #[test]
    fn soldering_form_is_horizontal() {
        for (n, k) in [(1, 1), (2, 1), (2, 2)] {
            let th = theta_lvy(n, k).unwrap();
            let c = th.chart().clone();
            for (v, role) in c.coords() {
                if *role == Role::Frame {
                    assert!(th
                        .interior(&VField::coordinate(&c, *v).unwrap())
                        .unwrap()
                        .is_zero());
                }
            }
        }
    }

    #[test]
    fn d_of_wedge_power_n1_k1() {
        let th = theta_lvy(1, 1).unwrap();
        let lhs = th.wedge_power(2).unwrap().ext_d();
        let rhs = th.ext_d().wedge(&th).unwrap().scale(&Scalar::int(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_on_z() {
        let t1 = theta_z(1, 1).unwrap();
        let c1 = t1.chart().clone();
        assert_eq!(
            t1,
            sum(&[
                mono(&c1, &["y1"], &[], "p1_1"),
                mono(&c1, &["x1"], &[], "p")
            ])
        );

        let t2 = theta_z(2, 1).unwrap();
        let c2 = t2.chart().clone();
        let expected = sum(&[
            mono(&c2, &["y1", "x2"], &[], "p1_1"),
            mono(&c2, &["y1", "x1"], &[], "-p2_1"),
            mono(&c2, &["x1", "x2"], &[], "p"),
        ]);
        assert_eq!(t2, expected);
        assert_eq!((t2.form_degree(), t2.value_degree()), (2, 0));

        // n = 1: cotangent shape p_A dy^A + p dx.
        let t = theta_z(1, 3).unwrap();
        let c = t.chart().clone();
        let expected = sum(&[
            mono(&c, &["y1"], &[], "p1_1"),
            mono(&c, &["y2"], &[], "p1_2"),
            mono(&c, &["y3"], &[], "p1_3"),
            mono(&c, &["x1"], &[], "p"),
        ]);
        assert_eq!(t, expected);
        assert!(t.ext_d().ext_d().is_zero());
    }

    #[test]
    fn connection_potentials() {
        let zero = ConnectionCoefficients::zero(1, 1);
        let g = theta_gamma(SpaceTag::JstarGunther, &zero).unwrap();
        let c = g.chart().clone();
        assert_eq!(g, mono(&c, &["y1"], &[1], "p1_1"));

        let constant = ConnectionCoefficients::new(1, 1, vec![vec![s("5/2")]]).unwrap();
        let g = theta_gamma(SpaceTag::JstarGunther, &constant).unwrap();
        assert_eq!(
            g,
            sum(&[
                mono(&c, &["y1"], &[1], "p1_1"),
                mono(&c, &["x1"], &[1], "5/2*p1_1")
            ])
        );

        let kt = theta_gamma(SpaceTag::JstarKT, &ConnectionCoefficients::zero(2, 1)).unwrap();
        let c = kt.chart().clone();
        assert_eq!(
            kt,
            sum(&[
                mono(&c, &["y1", "x2"], &[], "p1_1"),
                mono(&c, &["y1", "x1"], &[], "-p2_1")
            ])
        );

        assert!(ConnectionCoefficients::new(2, 1, vec![vec![s("1")]]).is_err());
        assert!(ConnectionCoefficients::new(1, 1, vec![vec![s("p")]]).is_err());
        assert!(theta_gamma(SpaceTag::Z, &zero).is_err());
    }

    #[test]
    fn euler_field_examples() {
        let e = euler_field(1, 1).unwrap();
        let c = e.chart().clone();
        let expected =
            VField::from_pairs(&c, [(Var::new("p1_1"), s("p1_1")), (Var::new("p"), s("p"))])
                .unwrap();
        assert_eq!(e, expected);

        let e = euler_field(2, 1).unwrap();
        for v in (1..=2).map(base).chain([fiber(1)]) {
            assert!(e.component(v).is_zero());
        }
        let theta = theta_z(2, 1).unwrap();
        assert_eq!(theta.ext_d().interior(&e).unwrap(), theta);

        let v = ProjectableField::new(2, 1, vec![s("0"), s("0")], vec![s("1")]).unwrap();
        let f = momentum_observable_z(&v).unwrap();
        assert_eq!(f.body.ext_d().interior(&e).unwrap(), f.body);
    }
}
