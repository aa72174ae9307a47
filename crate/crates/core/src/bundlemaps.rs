//! The adapted group, its actions, frames at points, the associated-bundle
//! representative maps and the connection correspondences.
//!
//! Frames are matrices `E` whose column μ holds the chart components of the
//! frame vector μ in the order `x1..xn, y1..yk`. The L_VY coordinates of a
//! frame are the entries of the coframe `π = E⁻¹`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{ChartMap, VField, VForm};
use crate::hamilton::{hamiltonian_vf_lvy, hamiltonian_vf_z, ProjectableField};
use crate::linalg::{Matrix, QMatrix};
use crate::scalar::var::{base, energy, fiber, frame_xx, frame_yx, frame_yy, multimomentum};
use crate::scalar::{Rational, Scalar, Var};
use crate::spaces::{make_chart, theta_lvy, theta_z, ConnectionCoefficients, SpaceKind};

type SMatrix = Matrix<Scalar>;

fn shape(what: &str, m: &QMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::ShapeMismatch(format!(
            "{what} must be {rows}x{cols}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn invert(m: &QMatrix) -> QMatrix {
    m.inverse().expect("block checked invertible")
}

fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.mul(b).expect("conformable blocks")
}

/// `[[top_left, 0], [bottom_left, bottom_right]]`.
fn lower_block(top_left: &QMatrix, bottom_left: &QMatrix, bottom_right: &QMatrix) -> QMatrix {
    let (n, k) = (top_left.rows(), bottom_right.rows());
    QMatrix::from_fn(n + k, n + k, |r, c| match (r < n, c < n) {
        (true, true) => top_left[(r, c)].clone(),
        (true, false) => Rational::zero(),
        (false, true) => bottom_left[(r - n, c)].clone(),
        (false, false) => bottom_right[(r - n, c - n)].clone(),
    })
}

fn rows_range(m: &QMatrix, from: usize, to: usize) -> QMatrix {
    let rows: Vec<usize> = (from..to).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    m.select(&rows, &cols)
}

fn block(m: &QMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QMatrix {
    m.select(&rows.collect::<Vec<_>>(), &cols.collect::<Vec<_>>())
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64)
        .map(|i| Rational::from_integer(i.into()))
        .product()
}

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// An element `(N, K, A)` of the adapted group, the block matrix `[[N, 0], [A, K]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    n: QMatrix,
    k: QMatrix,
    a: QMatrix,
}

impl GroupElement {
    pub fn new(n: QMatrix, k: QMatrix, a: QMatrix) -> Result<GroupElement> {
        shape("N", &n, n.rows(), n.rows())?;
        shape("K", &k, k.rows(), k.rows())?;
        shape("A", &a, k.rows(), n.rows())?;
        if n.rows() == 0 || k.rows() == 0 {
            return Err(Error::ShapeMismatch("group blocks must be nonempty".into()));
        }
        if n.det()?.is_zero() || k.det()?.is_zero() {
            return Err(Error::Invalid("N and K must be invertible".into()));
        }
        Ok(GroupElement { n, k, a })
    }

    pub fn identity(n: usize, k: usize) -> GroupElement {
        GroupElement {
            n: QMatrix::identity(n),
            k: QMatrix::identity(k),
            a: QMatrix::zeros(k, n),
        }
    }

    /// `(I, I, A)`.
    pub fn translation(a: QMatrix) -> Result<GroupElement> {
        let (k, n) = (a.rows(), a.cols());
        GroupElement::new(QMatrix::identity(n), QMatrix::identity(k), a)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n.rows(), self.k.rows())
    }

    pub fn n_block(&self) -> &QMatrix {
        &self.n
    }

    pub fn k_block(&self) -> &QMatrix {
        &self.k
    }

    pub fn a_block(&self) -> &QMatrix {
        &self.a
    }

    pub fn to_block(&self) -> QMatrix {
        lower_block(&self.n, &self.a, &self.k)
    }

    /// Reads `(N, K, A)` back from a block lower-triangular matrix.
    pub fn from_block(m: &QMatrix, n: usize) -> Result<GroupElement> {
        let d = m.rows();
        if m.cols() != d || n == 0 || n >= d {
            return Err(Error::ShapeMismatch(format!(
                "cannot split a {}x{} matrix at {n}",
                d,
                m.cols()
            )));
        }
        if !block(m, 0..n, n..d)
            .to_rows()
            .iter()
            .flatten()
            .all(Zero::is_zero)
        {
            return Err(Error::ShapeMismatch("top-right block is not zero".into()));
        }
        GroupElement::new(
            block(m, 0..n, 0..n),
            block(m, n..d, n..d),
            block(m, n..d, 0..n),
        )
    }

    /// `(N₁N₂, K₁K₂, A₁N₂ + K₁A₂)`.
    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(GroupElement {
            n: mul(&self.n, &other.n),
            k: mul(&self.k, &other.k),
            a: mul(&self.a, &other.n).add(&mul(&self.k, &other.a))?,
        })
    }

    /// `(N⁻¹, K⁻¹, −K⁻¹AN⁻¹)`.
    pub fn inverse(&self) -> GroupElement {
        let ni = invert(&self.n);
        let ki = invert(&self.k);
        let a = mul(&mul(&ki, &self.a), &ni).scale(&-Rational::one());
        GroupElement { n: ni, k: ki, a }
    }
}

/// A point of L_VY: a base point `(x, y)` and a vertically adapted frame there.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePoint {
    n: usize,
    k: usize,
    base: Vec<Rational>,
    e: QMatrix,
}

impl FramePoint {
    pub fn new(n: usize, k: usize, base: Vec<Rational>, e: QMatrix) -> Result<FramePoint> {
        if base.len() != n + k {
            return Err(Error::ShapeMismatch(format!(
                "base point needs {} values, got {}",
                n + k,
                base.len()
            )));
        }
        shape("frame", &e, n + k, n + k)?;
        if !block(&e, 0..n, n..n + k)
            .to_rows()
            .iter()
            .flatten()
            .all(Zero::is_zero)
        {
            return Err(Error::ShapeMismatch(
                "the last k frame vectors must be vertical".into(),
            ));
        }
        if e.det()?.is_zero() {
            return Err(Error::SingularFrame);
        }
        Ok(FramePoint { n, k, base, e })
    }

    pub fn from_blocks(
        base: Vec<Rational>,
        exx: &QMatrix,
        eyx: &QMatrix,
        eyy: &QMatrix,
    ) -> Result<FramePoint> {
        let (n, k) = (exx.rows(), eyy.rows());
        shape("Exx", exx, n, n)?;
        shape("Eyy", eyy, k, k)?;
        shape("Eyx", eyx, k, n)?;
        FramePoint::new(n, k, base, lower_block(exx, eyx, eyy))
    }

    /// The coordinate frame `{∂x_i, ∂y_A}` at a base point.
    pub fn coordinate_frame(n: usize, k: usize, base: Vec<Rational>) -> Result<FramePoint> {
        FramePoint::new(n, k, base, QMatrix::identity(n + k))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn frame(&self) -> &QMatrix {
        &self.e
    }

    pub fn exx(&self) -> QMatrix {
        block(&self.e, 0..self.n, 0..self.n)
    }

    pub fn eyx(&self) -> QMatrix {
        block(&self.e, self.n..self.n + self.k, 0..self.n)
    }

    pub fn eyy(&self) -> QMatrix {
        block(&self.e, self.n..self.n + self.k, self.n..self.n + self.k)
    }

    /// Dual coframe `E⁻¹`; row μ holds the components of the covector μ.
    pub fn coframe(&self) -> QMatrix {
        invert(&self.e)
    }

    /// `(π^i_j, π^A_B, π^A_i)` as matrices.
    pub fn pi_blocks(&self) -> (QMatrix, QMatrix, QMatrix) {
        let (n, d) = (self.n, self.n + self.k);
        let c = self.coframe();
        (
            block(&c, 0..n, 0..n),
            block(&c, n..d, n..d),
            block(&c, n..d, 0..n),
        )
    }

    /// Values of `x, y` at the base point.
    pub fn base_point(&self) -> HashMap<Var, Rational> {
        (1..=self.n)
            .map(base)
            .chain((1..=self.k).map(fiber))
            .zip(self.base.iter().cloned())
            .collect()
    }

    /// Values of every L_VY chart coordinate at this frame.
    pub fn lvy_point(&self) -> HashMap<Var, Rational> {
        let (n, k) = (self.n, self.k);
        let (pxx, pyy, pyx) = self.pi_blocks();
        let mut out = self.base_point();
        for i in 0..n {
            for j in 0..n {
                out.insert(frame_xx(i + 1, j + 1), pxx[(i, j)].clone());
            }
        }
        for a in 0..k {
            for b in 0..k {
                out.insert(frame_yy(a + 1, b + 1), pyy[(a, b)].clone());
            }
            for i in 0..n {
                out.insert(frame_yx(a + 1, i + 1), pyx[(a, i)].clone());
            }
        }
        out
    }

    /// Inverse of [`FramePoint::lvy_point`].
    pub fn from_lvy_point(
        n: usize,
        k: usize,
        point: &HashMap<Var, Rational>,
    ) -> Result<FramePoint> {
        let get = |v: Var| {
            point
                .get(&v)
                .cloned()
                .ok_or_else(|| Error::MissingValue(v.name().to_string()))
        };
        let base_vals = (1..=n)
            .map(base)
            .chain((1..=k).map(fiber))
            .map(get)
            .collect::<Result<Vec<_>>>()?;
        let mut pi = QMatrix::zeros(n + k, n + k);
        for i in 0..n {
            for j in 0..n {
                pi[(i, j)] = get(frame_xx(i + 1, j + 1))?;
            }
        }
        for a in 0..k {
            for b in 0..k {
                pi[(n + a, n + b)] = get(frame_yy(a + 1, b + 1))?;
            }
            for i in 0..n {
                pi[(n + a, i)] = get(frame_yx(a + 1, i + 1))?;
            }
        }
        let e = pi.inverse().ok_or(Error::SingularFrame)?;
        FramePoint::new(n, k, base_vals, e)
    }

    /// Right action `w·g`: `(y, {e_j N^j_i + ε_B A^B_i, ε_B K^B_A})`.
    pub fn act(&self, g: &GroupElement) -> Result<FramePoint> {
        if g.dims() != (self.n, self.k) {
            return Err(Error::ShapeMismatch(format!(
                "group element {:?} on a frame of shape ({}, {})",
                g.dims(),
                self.n,
                self.k
            )));
        }
        let (exx, eyx, eyy) = (self.exx(), self.eyx(), self.eyy());
        let new_e = mul(&exx, &g.n);
        let new_y = mul(&eyx, &g.n).add(&mul(&eyy, &g.a))?;
        let new_v = mul(&eyy, &g.k);
        FramePoint::from_blocks(self.base.clone(), &new_e, &new_y, &new_v)
    }
}

/// The label `(B, λ)` of a point of Z over a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumLabel {
    pub b: QMatrix,
    pub lambda: Rational,
}

impl MomentumLabel {
    pub fn new(b: QMatrix, lambda: Rational) -> MomentumLabel {
        MomentumLabel { b, lambda }
    }

    pub fn zero(n: usize, k: usize) -> MomentumLabel {
        MomentumLabel::new(QMatrix::zeros(n, k), Rational::zero())
    }

    fn check(&self, n: usize, k: usize) -> Result<()> {
        shape("B", &self.b, n, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionVariant {
    Frame,
    Coframe,
    KnAffine,
    NkLinear,
    NkNormalized,
    NkR,
}

impl ActionVariant {
    pub const ALL: [ActionVariant; 6] = [
        ActionVariant::Frame,
        ActionVariant::Coframe,
        ActionVariant::KnAffine,
        ActionVariant::NkLinear,
        ActionVariant::NkNormalized,
        ActionVariant::NkR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionVariant::Frame => "frame",
            ActionVariant::Coframe => "coframe",
            ActionVariant::KnAffine => "kn_affine",
            ActionVariant::NkLinear => "nk_linear",
            ActionVariant::NkNormalized => "nk_normalized",
            ActionVariant::NkR => "nk_r",
        }
    }

    pub fn parse(name: &str) -> Option<ActionVariant> {
        ActionVariant::ALL.into_iter().find(|v| v.as_str() == name)
    }

    /// Frames and coframes are acted on from the right, the rest from the left.
    pub fn is_right(self) -> bool {
        matches!(self, ActionVariant::Frame | ActionVariant::Coframe)
    }
}

/// Whatever a group action moves.
#[derive(Clone, Debug, PartialEq)]
pub enum Operand {
    Frame(FramePoint),
    /// A coframe `E⁻¹`, rows are covectors.
    Coframe(QMatrix),
    Matrix(QMatrix),
    Label(MomentumLabel),
}

pub fn group_action(
    variant: ActionVariant,
    g: &GroupElement,
    operand: &Operand,
) -> Result<Operand> {
    match (variant, operand) {
        (ActionVariant::Frame, Operand::Frame(w)) => Ok(Operand::Frame(w.act(g)?)),
        (ActionVariant::Coframe, Operand::Coframe(c)) => {
            Ok(Operand::Coframe(coframe_action(g, c)?))
        }
        (ActionVariant::KnAffine, Operand::Matrix(w)) => Ok(Operand::Matrix(kn_affine(g, w)?)),
        (ActionVariant::NkLinear, Operand::Matrix(b)) => Ok(Operand::Matrix(nk_linear(g, b)?)),
        (ActionVariant::NkNormalized, Operand::Matrix(b)) => {
            Ok(Operand::Matrix(nk_normalized(g, b)?))
        }
        (ActionVariant::NkR, Operand::Label(l)) => Ok(Operand::Label(nk_r(g, l)?)),
        (v, _) => Err(Error::ShapeMismatch(format!(
            "operand does not fit the {} action",
            v.as_str()
        ))),
    }
}

/// Coframe transformation dual to the frame action:
/// `e^i ↦ (N⁻¹)^i_j e^j`, `ε^A ↦ −(K⁻¹AN⁻¹)^A_j e^j + (K⁻¹)^A_B ε^B`.
pub fn coframe_action(g: &GroupElement, c: &QMatrix) -> Result<QMatrix> {
    let (n, k) = g.dims();
    shape("coframe", c, n + k, n + k)?;
    let ni = invert(&g.n);
    let ki = invert(&g.k);
    let top = rows_range(c, 0, n);
    let bottom = rows_range(c, n, n + k);
    let new_top = mul(&ni, &top);
    let mix = mul(&mul(&ki, &g.a), &ni);
    let new_bottom = mul(&ki, &bottom).sub(&mul(&mix, &top))?;
    Ok(QMatrix::from_fn(n + k, n + k, |r, col| {
        if r < n {
            new_top[(r, col)].clone()
        } else {
            new_bottom[(r - n, col)].clone()
        }
    }))
}

/// `KWN⁻¹ − AN⁻¹` on k×n matrices.
pub fn kn_affine(g: &GroupElement, w: &QMatrix) -> Result<QMatrix> {
    let (n, k) = g.dims();
    shape("W", w, k, n)?;
    let ni = invert(&g.n);
    mul(&mul(&g.k, w), &ni).sub(&mul(&g.a, &ni))
}

/// `KWN⁻¹` on k×n matrices, the linear part of [`kn_affine`].
pub fn kn_linear(g: &GroupElement, w: &QMatrix) -> Result<QMatrix> {
    let (n, k) = g.dims();
    shape("W", w, k, n)?;
    Ok(mul(&mul(&g.k, w), &invert(&g.n)))
}

/// `NBK⁻¹` on n×k matrices.
pub fn nk_linear(g: &GroupElement, b: &QMatrix) -> Result<QMatrix> {
    let (n, k) = g.dims();
    shape("B", b, n, k)?;
    Ok(mul(&mul(&g.n, b), &invert(&g.k)))
}

/// `det(N⁻¹) NBK⁻¹`.
pub fn nk_normalized(g: &GroupElement, b: &QMatrix) -> Result<QMatrix> {
    let d = g.n.det()?;
    Ok(nk_linear(g, b)?.scale(&d.recip()))
}

/// `det(N⁻¹) (NBK⁻¹, λ − Tr(BK⁻¹A))`.
pub fn nk_r(g: &GroupElement, label: &MomentumLabel) -> Result<MomentumLabel> {
    let (n, k) = g.dims();
    label.check(n, k)?;
    let dinv = g.n.det()?.recip();
    let b = nk_linear(g, &label.b)?.scale(&dinv);
    let tr = mul(&mul(&label.b, &invert(&g.k)), &g.a).trace();
    Ok(MomentumLabel::new(b, (&label.lambda - tr) * dinv))
}

fn y_chart(n: usize, k: usize) -> Result<std::sync::Arc<crate::exterior::Chart>> {
    make_chart(SpaceKind::y(n, k)?)
}

/// `ρ_Z[w, (B, λ)] = B^j_B ε^B ∧ ω(e)_j + λ ω(e)` as a constant n-form on the Y chart,
/// with `ω(e) = e^1 ∧ ⋯ ∧ e^n` and `ω(e)_j = e_j ⌟ ω(e)`.
pub fn rho_z(w: &FramePoint, label: &MomentumLabel) -> Result<VForm> {
    let (n, k) = (w.n, w.k);
    label.check(n, k)?;
    let chart = y_chart(n, k)?;
    let c = w.coframe();
    let covector = |mu: usize| -> Result<VForm> {
        let mut out = VForm::zero(&chart, 1, 0);
        for nu in 0..n + k {
            let q = &c[(mu, nu)];
            if !q.is_zero() {
                let term = VForm::dvar(&chart, chart.var(nu))?.scale_rational(q);
                out = out.add(&term)?;
            }
        }
        Ok(out)
    };
    let vector = |mu: usize| -> VField {
        VField::from_components(
            &chart,
            (0..n + k)
                .map(|r| Scalar::from_rational(w.e[(r, mu)].clone()))
                .collect(),
        )
    };
    let mut omega = VForm::one(&chart);
    for i in 0..n {
        omega = omega.wedge(&covector(i)?)?;
    }
    let mut z = omega.scale_rational(&label.lambda);
    for j in 0..n {
        let omega_j = omega.interior(&vector(j))?;
        for b in 0..k {
            let coeff = &label.b[(j, b)];
            if !coeff.is_zero() {
                z = z.add(&covector(n + b)?.wedge(&omega_j)?.scale_rational(coeff))?;
            }
        }
    }
    Ok(z)
}

fn constant_of(f: &VForm) -> Result<Rational> {
    f.as_function()
        .and_then(|s| s.as_constant())
        .ok_or_else(|| Error::Invalid("expected a constant coefficient".into()))
}

/// Recovers `(p^j_B, p)` from an n-form at a point:
/// `p = ∂x_n ⌟ ⋯ ⌟ ∂x_1 ⌟ z` and
/// `p^j_B = (−1)^{j−1} ∂x_n ⌟ ⋯ ⌟ (omit ∂x_j) ⌟ ⋯ ⌟ ∂x_1 ⌟ ∂y_B ⌟ z`.
pub fn z_coordinates(z: &VForm, n: usize, k: usize) -> Result<(QMatrix, Rational)> {
    let chart = z.chart().clone();
    if z.form_degree() != n || z.value_degree() != 0 {
        return Err(Error::DegreeMismatch {
            expected: format!("real {n}-form"),
            found: format!("({}, {})", z.form_degree(), z.value_degree()),
        });
    }
    let dx = (1..=n)
        .map(|i| VField::coordinate(&chart, base(i)))
        .collect::<Result<Vec<_>>>()?;
    let dy = (1..=k)
        .map(|a| VField::coordinate(&chart, fiber(a)))
        .collect::<Result<Vec<_>>>()?;
    let mut top = z.clone();
    for d in &dx {
        top = top.interior(d)?;
    }
    let p = constant_of(&top)?;
    let mut pm = QMatrix::zeros(n, k);
    for (b, db) in dy.iter().enumerate() {
        let vertical = z.interior(db)?;
        for j in 0..n {
            let mut acc = vertical.clone();
            for (i, d) in dx.iter().enumerate() {
                if i != j {
                    acc = acc.interior(d)?;
                }
            }
            pm[(j, b)] = constant_of(&acc)? * sign(j % 2 == 1);
        }
    }
    Ok((pm, p))
}

fn sym_matrix(rows: usize, cols: usize, var: impl Fn(usize, usize) -> Var) -> SMatrix {
    SMatrix::from_fn(rows, cols, |r, c| Scalar::var(var(r + 1, c + 1)))
}

fn lift(m: &QMatrix) -> SMatrix {
    m.map(|q| Scalar::from_rational(q.clone()))
}

fn smul(a: &SMatrix, b: &SMatrix) -> SMatrix {
    a.mul(b).expect("conformable blocks")
}

/// `φ_{(B,λ)}`: L_VY → Z with `x, y` fixed,
/// `p^j_B = (adj π_xx · B · π_yy)^j_B` and `p = Tr(B π_yx adj π_xx) + λ det π_xx`.
pub fn phi_b_lambda(label: &MomentumLabel, n: usize, k: usize) -> Result<ChartMap> {
    label.check(n, k)?;
    let source = make_chart(SpaceKind::lvy(n, k)?)?;
    let target = make_chart(SpaceKind::z(n, k)?)?;
    let pxx = sym_matrix(n, n, frame_xx);
    let pyy = sym_matrix(k, k, frame_yy);
    let pyx = sym_matrix(k, n, frame_yx);
    let det = pxx.det()?;
    let adj = pxx.adjugate()?;
    let b = lift(&label.b);
    let pm = smul(&smul(&adj, &b), &pyy);
    let p = &smul(&smul(&b, &pyx), &adj).trace()
        + &(&det * &Scalar::from_rational(label.lambda.clone()));
    let mut assignment: Vec<Scalar> = (1..=n)
        .map(base)
        .chain((1..=k).map(fiber))
        .map(Scalar::var)
        .collect();
    for j in 0..n {
        for bb in 0..k {
            assignment.push(pm[(j, bb)].clone());
        }
    }
    assignment.push(p);
    ChartMap::new(&source, &target, assignment)
}

/// Components of the covector `V(B, λ)` on sorted value index sets (1-based, fiber
/// indices shifted by n): `λ/n!` on `{1..n}`, and on `{1..n}∖{j} ∪ {n+A}` the
/// value `(−1)^{n−1} (1/n!) B^j_A ε_{j,rest}`.
pub fn pairing_covector(
    label: &MomentumLabel,
    n: usize,
    k: usize,
) -> Result<BTreeMap<Vec<u8>, Rational>> {
    label.check(n, k)?;
    let nf = factorial(n);
    let mut cov = BTreeMap::new();
    cov.insert((1..=n as u8).collect::<Vec<u8>>(), &label.lambda / &nf);
    for j in 1..=n {
        for a in 1..=k {
            let mut key: Vec<u8> = (1..=n as u8).filter(|&i| i as usize != j).collect();
            key.push((n + a) as u8);
            let s = sign((n - 1) % 2 == 1) * sign((j - 1) % 2 == 1);
            cov.insert(key, s * &label.b[(j - 1, a - 1)] / &nf);
        }
    }
    Ok(cov)
}

/// Both sides of `φ_{(B,λ)}*Θ = ⟨∧^n θ, V(B,λ)⟩` on L_VY.
#[derive(Clone, Debug)]
pub struct PairingCheck {
    pub pullback: VForm,
    pub pairing: VForm,
}

impl PairingCheck {
    pub fn holds(&self) -> bool {
        self.pullback == self.pairing
    }
}

pub fn pairing_identity(label: &MomentumLabel, n: usize, k: usize) -> Result<PairingCheck> {
    let phi = phi_b_lambda(label, n, k)?;
    let pullback = phi.pullback(&theta_z(n, k)?)?;
    let pairing = theta_lvy(n, k)?
        .wedge_power(n)?
        .pair_value(&pairing_covector(label, n, k)?, n)?;
    Ok(PairingCheck { pullback, pairing })
}

/// Representative maps of associated bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentativeKind {
    /// `[[w, W]] ↦ −W^B_j (π_*e)^j ⊗ ε_B`, linear multivelocities.
    Psi,
    /// `[w, W] ↦ −W^B_j (π_*e)^j ⊗ ε_B + (π_*e)^j ⊗ e_j`, jet coordinates.
    PsiHat,
    /// `[w, B] ↦ B^j_C ε^C|_V ⊗ f_j`.
    RhoGu,
    /// `[w, B] ↦ B^j_C ε^C|_V ⊗ ω(π_*e)_j`.
    RhoKT,
}

impl RepresentativeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RepresentativeKind::Psi => "psi",
            RepresentativeKind::PsiHat => "psi_hat",
            RepresentativeKind::RhoGu => "rho_Gu",
            RepresentativeKind::RhoKT => "rho_KT",
        }
    }

    pub fn parse(name: &str) -> Option<RepresentativeKind> {
        [
            RepresentativeKind::Psi,
            RepresentativeKind::PsiHat,
            RepresentativeKind::RhoGu,
            RepresentativeKind::RhoKT,
        ]
        .into_iter()
        .find(|k| k.as_str() == name)
    }
}

/// An image point: the base point and the fiber coordinates as a matrix.
/// For ψ and ψ̂ the matrix is k×n (`v^A_i`, resp. `γ^A_i`); for ρ_Gu and ρ_KT it is n×k (`p^j_B`).
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentativePoint {
    pub kind: RepresentativeKind,
    pub base: Vec<Rational>,
    pub fiber: QMatrix,
}

impl RepresentativePoint {
    /// Named coordinates in chart order.
    pub fn coordinates(&self) -> Vec<(String, Rational)> {
        let mut out = Vec::new();
        let (r, c) = (self.fiber.rows(), self.fiber.cols());
        for i in 0..r {
            for j in 0..c {
                let name = match self.kind {
                    RepresentativeKind::Psi => format!("v{}_{}", i + 1, j + 1),
                    RepresentativeKind::PsiHat => format!("g{}_{}", i + 1, j + 1),
                    _ => multimomentum(i + 1, j + 1).name().to_string(),
                };
                out.push((name, self.fiber[(i, j)].clone()));
            }
        }
        out
    }
}

pub fn representative_map(
    kind: RepresentativeKind,
    w: &FramePoint,
    m: &QMatrix,
) -> Result<RepresentativePoint> {
    let (n, k) = (w.n, w.k);
    let (pxx, pyy, _) = w.pi_blocks();
    let (exx, eyx, eyy) = (w.exx(), w.eyx(), w.eyy());
    let fiber = match kind {
        RepresentativeKind::Psi | RepresentativeKind::PsiHat => {
            shape("W", m, k, n)?;
            let vel = mul(&mul(&eyy, m), &pxx).scale(&-Rational::one());
            if kind == RepresentativeKind::Psi {
                vel
            } else {
                vel.add(&mul(&eyx, &pxx))?
            }
        }
        RepresentativeKind::RhoGu | RepresentativeKind::RhoKT => {
            shape("B", m, n, k)?;
            let lin = mul(&mul(&exx, m), &pyy);
            if kind == RepresentativeKind::RhoGu {
                lin
            } else {
                lin.scale(&pxx.det()?)
            }
        }
    };
    Ok(RepresentativePoint {
        kind,
        base: w.base.clone(),
        fiber,
    })
}

fn lvy_offsets(n: usize, k: usize) -> (usize, usize, usize) {
    let xx = n + k;
    let yy = xx + n * n;
    let yx = yy + k * k;
    (xx, yy, yx)
}

/// The chart formula for `φ_{(B,λ)*}X` at a frame, given the L_VY components of `X`
/// there. `trace_sign` multiplies the `B π_yx π⁻¹ X_xx π⁻¹` term of the `p`
/// component; differentiating `p` gives `−1`.
pub fn pushforward_formula(
    label: &MomentumLabel,
    w: &FramePoint,
    x: &[Rational],
    trace_sign: i64,
) -> Result<Vec<Rational>> {
    let (n, k) = (w.n, w.k);
    label.check(n, k)?;
    let (oxx, oyy, oyx) = lvy_offsets(n, k);
    if x.len() != oyx + k * n {
        return Err(Error::ShapeMismatch(format!(
            "expected {} components, got {}",
            oyx + k * n,
            x.len()
        )));
    }
    let xxx = QMatrix::from_fn(n, n, |i, j| x[oxx + i * n + j].clone());
    let xyy = QMatrix::from_fn(k, k, |a, b| x[oyy + a * k + b].clone());
    let xyx = QMatrix::from_fn(k, n, |a, i| x[oyx + a * n + i].clone());
    let (pxx, pyy, pyx) = w.pi_blocks();
    let q = invert(&pxx);
    let d = pxx.det()?;
    let b = &label.b;
    let tr = mul(&q, &xxx).trace();
    let qb = mul(&q, b);
    let pm = mul(&qb, &xyy)
        .sub(&mul(&mul(&mul(&q, &xxx), &qb), &pyy))?
        .add(&mul(&qb, &pyy).scale(&tr))?
        .scale(&d);
    let bpyx = mul(b, &pyx);
    let first =
        mul(&mul(&mul(&bpyx, &q), &xxx), &q).trace() * Rational::from_integer(trace_sign.into());
    let second = mul(&mul(b, &xyx), &q).trace();
    let third = mul(&bpyx, &q).trace() * &tr;
    let p = (first + second + third + &label.lambda * &tr) * &d;
    let mut out: Vec<Rational> = x[..n + k].to_vec();
    for j in 0..n {
        for bb in 0..k {
            out.push(pm[(j, bb)].clone());
        }
    }
    out.push(p);
    Ok(out)
}

/// One sample of the pushforward comparison, as Z-chart components.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardSample {
    pub jacobian: Vec<Rational>,
    pub expected: Vec<Rational>,
    pub formula: Vec<Rational>,
}

impl PushforwardSample {
    pub fn holds(&self) -> bool {
        self.jacobian == self.expected && self.formula == self.jacobian
    }
}

/// `φ_{(B,λ)*} X_{f̂_v}` by the Jacobian and by the chart formula, against `X_{f_v}` at the image.
pub fn pushforward_check(
    v: &ProjectableField,
    label: &MomentumLabel,
    points: &[FramePoint],
) -> Result<Vec<PushforwardSample>> {
    let (n, k) = (v.n(), v.k());
    let phi = phi_b_lambda(label, n, k)?;
    let xhat = hamiltonian_vf_lvy(v)?;
    let xz = hamiltonian_vf_z(v)?;
    points
        .iter()
        .map(|w| {
            if (w.n, w.k) != (n, k) {
                return Err(Error::ShapeMismatch(
                    "frame and field dimensions differ".into(),
                ));
            }
            let pt = w.lvy_point();
            let jacobian = phi.pushforward(&xhat, &pt)?;
            let expected = xz.evaluate(&phi.image_point(&pt)?)?;
            let formula = pushforward_formula(label, w, &xhat.evaluate(&pt)?, -1)?;
            Ok(PushforwardSample {
                jacobian,
                expected,
                formula,
            })
        })
        .collect()
}

/// A G_A-equivariant map `λ`: L_VY → R^{k×n}, stored as `lambda[B-1][i-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryBreaker {
    n: usize,
    k: usize,
    lambda: Vec<Vec<Scalar>>,
}

impl SymmetryBreaker {
    pub fn new(n: usize, k: usize, lambda: Vec<Vec<Scalar>>) -> Result<SymmetryBreaker> {
        if lambda.len() != k || lambda.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "symmetry breaker must be {k}x{n}"
            )));
        }
        let chart = make_chart(SpaceKind::lvy(n, k)?)?;
        if let Some(v) = lambda
            .iter()
            .flatten()
            .flat_map(|s| s.variables())
            .find(|v| !chart.has(*v))
        {
            return Err(Error::Invalid(format!("{v} is not an L_VY coordinate")));
        }
        Ok(SymmetryBreaker { n, k, lambda })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `λ^B_i`, 1-based.
    pub fn get(&self, b: usize, i: usize) -> &Scalar {
        &self.lambda[b - 1][i - 1]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.lambda
    }

    pub fn evaluate(&self, w: &FramePoint) -> Result<QMatrix> {
        let pt = w.lvy_point();
        let rows = self
            .lambda
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.evaluate(&pt))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        QMatrix::from_rows(rows)
    }

    /// `λ(w·g) = g⁻¹·λ(w)` under the affine action on k×n matrices.
    pub fn equivariant_at(&self, w: &FramePoint, g: &GroupElement) -> Result<bool> {
        Ok(self.evaluate(&w.act(g)?)? == kn_affine(&g.inverse(), &self.evaluate(w)?)?)
    }
}

fn scalar_div(m: &SMatrix, d: &Scalar) -> Result<SMatrix> {
    let rows = m
        .to_rows()
        .into_iter()
        .map(|r| r.iter().map(|s| s.try_div(d)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    SMatrix::from_rows(rows)
}

/// `λ_γ = ε^A|_V(γ(e_i)) E^i_A`, i.e. `λ^B_i = π^B_A (e^j_i γ^A_j + e^A_i)` with the frame
/// blocks `e = π⁻¹` written out through adjugates.
pub fn connection_to_lambda(gamma: &ConnectionCoefficients) -> Result<SymmetryBreaker> {
    let (n, k) = (gamma.n(), gamma.k());
    let pxx = sym_matrix(n, n, frame_xx);
    let pyy = sym_matrix(k, k, frame_yy);
    let pyx = sym_matrix(k, n, frame_yx);
    let exx = scalar_div(&pxx.adjugate()?, &pxx.det()?)?;
    let eyy = scalar_div(&pyy.adjugate()?, &pyy.det()?)?;
    let eyx = smul(&smul(&eyy, &pyx), &exx).map(|s| -s);
    let g = SMatrix::from_rows(gamma.rows().to_vec())?;
    let lam = smul(&pyy, &smul(&g, &exx).add(&eyx)?);
    SymmetryBreaker::new(n, k, lam.to_rows())
}

/// The connection at the base point of `w` determined by `λ(w)`: the projection with
/// `γ(ε_A) = ε_A` and `γ(e_j) = λ^B_j ε_B`, in coordinates `γ = E_yy (λ π_xx + π_yx)`.
pub fn lambda_to_connection(
    lam: &SymmetryBreaker,
    w: &FramePoint,
) -> Result<ConnectionCoefficients> {
    if (lam.n, lam.k) != (w.n, w.k) {
        return Err(Error::ShapeMismatch(
            "symmetry breaker and frame dimensions differ".into(),
        ));
    }
    let l = lam.evaluate(w)?;
    let (pxx, _, pyx) = w.pi_blocks();
    let g = mul(&w.eyy(), &mul(&l, &pxx).add(&pyx)?);
    let rows = g
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Scalar::from_rational).collect())
        .collect();
    ConnectionCoefficients::new(w.n, w.k, rows)
}

/// `γ` evaluated at a base point, as a k×n matrix.
pub fn connection_at(
    gamma: &ConnectionCoefficients,
    point: &HashMap<Var, Rational>,
) -> Result<QMatrix> {
    let rows = gamma
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| s.evaluate(point))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(rows)
}

/// `p^i_A dy^A ∧ d^{n−1}x_i + p d^n x ↦ (p + p^i_A γ^A_i) d^n x` on the Z chart.
pub fn splitting_map(gamma: &ConnectionCoefficients) -> Result<VForm> {
    let (n, k) = (gamma.n(), gamma.k());
    let chart = make_chart(SpaceKind::z(n, k)?)?;
    let mut coeff = Scalar::var(energy());
    for i in 1..=n {
        for a in 1..=k {
            coeff = &coeff + &(&Scalar::var(multimomentum(i, a)) * gamma.get(a, i));
        }
    }
    let xs: Vec<Var> = (1..=n).map(base).collect();
    VForm::monomial(&chart, &xs, &[], coeff)
}

/// `dλ_γ(A*)` next to `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatConnectionReport {
    pub result: Vec<Vec<Scalar>>,
    pub expected: QMatrix,
}

impl FlatConnectionReport {
    pub fn holds(&self) -> bool {
        self.result.iter().enumerate().all(|(b, row)| {
            row.iter()
                .enumerate()
                .all(|(i, s)| *s == Scalar::from_rational(self.expected[(b, i)].clone()))
        })
    }
}

/// The fundamental vertical field of `A ∈ R^{k×n}`: the velocity of `t ↦ w·(I, I, tA)`,
/// which in L_VY coordinates is `−(A π_xx)^B_j ∂/∂π^B_j`.
pub fn fundamental_vertical_field(a: &QMatrix, n: usize, k: usize) -> Result<VField> {
    shape("A", a, k, n)?;
    let chart = make_chart(SpaceKind::lvy(n, k)?)?;
    let apx = smul(&lift(a), &sym_matrix(n, n, frame_xx));
    let mut pairs = Vec::new();
    for b in 0..k {
        for j in 0..n {
            pairs.push((frame_yx(b + 1, j + 1), -apx[(b, j)].clone()));
        }
    }
    VField::from_pairs(&chart, pairs)
}

pub fn fundamental_vertical_check(
    gamma: &ConnectionCoefficients,
    a: &QMatrix,
) -> Result<FlatConnectionReport> {
    let (n, k) = (gamma.n(), gamma.k());
    let lam = connection_to_lambda(gamma)?;
    let star = fundamental_vertical_field(a, n, k)?;
    let result = lam
        .rows()
        .iter()
        .map(|r| r.iter().map(|s| star.apply(s)).collect())
        .collect();
    Ok(FlatConnectionReport {
        result,
        expected: a.clone(),
    })
}
