//! Poisson brackets on Z and L_VY, with their decompositions.

use crate::error::{Error, Result};
use crate::exterior::{VField, VForm};
use crate::hamilton::{
    hamiltonian_vf_lvy, hamiltonian_vf_z, momentum_observable_z, natural_lift_lm, solve_structure,
    structure_form, tensorial_from_vf_lvy, tensorial_lm, Observable, ProjectableField,
};
use crate::scalar::Scalar;
use crate::spaces::{self, SpaceKind};

/// A bracket value together with an independently computed split into a
/// tensorial part and an exact part.
#[derive(Clone, Debug)]
pub struct BracketResult {
    pub value: VForm,
    pub decomposition: Option<(VForm, VForm)>,
}

impl BracketResult {
    /// Whether `value = tensorial + exact` holds exactly.
    pub fn decomposition_holds(&self) -> Result<bool> {
        match &self.decomposition {
            Some((t, e)) => Ok(self.value == t.add(e)?),
            None => Ok(true),
        }
    }
}

/// `{f_v, f_w} = −X_{f_v} ⌟ (X_{f_w} ⌟ dΘ)`, decomposed as
/// `(f_{[v,w]}, −d(X_{f_v} ⌟ (X_{f_w} ⌟ Θ)))`.
pub fn bracket_z(v: &ProjectableField, w: &ProjectableField) -> Result<BracketResult> {
    bracket_z_with(v, w, &spaces::theta_z(v.n(), v.k())?)
}

/// [`bracket_z`] against an arbitrary potential on Z, used to probe mutated forms.
pub fn bracket_z_with(
    v: &ProjectableField,
    w: &ProjectableField,
    theta: &VForm,
) -> Result<BracketResult> {
    let xv = hamiltonian_vf_z(v)?;
    let xw = hamiltonian_vf_z(w)?;
    let value = theta.ext_d().interior(&xw)?.interior(&xv)?.neg();
    let tensorial = momentum_observable_z(&v.bracket(w)?)?.body;
    let exact = theta.interior(&xw)?.hook(&xv)?.ext_d().neg();
    Ok(BracketResult {
        value,
        decomposition: Some((tensorial, exact)),
    })
}

/// The exact term `−d(X_{f_v} ⌟ (X_{f_w} ⌟ Θ))` alone.
pub fn exact_term_z(v: &ProjectableField, w: &ProjectableField) -> Result<VForm> {
    let theta = spaces::theta_z(v.n(), v.k())?;
    let xv = hamiltonian_vf_z(v)?;
    let xw = hamiltonian_vf_z(w)?;
    Ok(theta.interior(&xw)?.hook(&xv)?.ext_d().neg())
}

/// Both routes of the tensorial bracket on L_VY.
#[derive(Clone, Debug)]
pub struct T1vBracket {
    pub observable: Observable,
    /// `X_f̂(ĝ) = X_f̂ ⌟ dĝ`.
    pub directional: VForm,
    /// `−X_f̂ ⌟ (X_ĝ ⌟ i*dθ)`.
    pub contraction: VForm,
}

impl T1vBracket {
    pub fn routes_agree(&self) -> bool {
        self.directional == self.contraction
    }
}

/// `{f̂, ĝ} = X_f̂(ĝ) = −X_f̂ ⌟ (X_ĝ ⌟ i*dθ)` for the tensorial functions of v and w.
pub fn bracket_t1v(v: &ProjectableField, w: &ProjectableField) -> Result<T1vBracket> {
    let kind = SpaceKind::lvy(v.n(), v.k())?;
    let xf = hamiltonian_vf_lvy(v)?;
    let xg = hamiltonian_vf_lvy(w)?;
    let g = tensorial_from_vf_lvy(w)?;
    let directional = g.body.ext_d().interior(&xf)?;
    let contraction = structure_form(kind)?.interior(&xg)?.interior(&xf)?.neg();
    Ok(T1vBracket {
        observable: Observable::new(kind, directional.clone())?,
        directional,
        contraction,
    })
}

/// Bracket on the degree-m representation:
/// value `−X_f̂ ⌟ (X_ĝ ⌟ (i*dθ ∧ ∧^m θ))`, decomposition
/// `({f̂,ĝ} ∧ ∧^m θ, m·d(f̂ ∧ ĝ ∧ ∧^{m−1} θ))`.
pub fn bracket_degree_m(
    v: &ProjectableField,
    w: &ProjectableField,
    m: usize,
) -> Result<BracketResult> {
    let (n, k) = (v.n(), v.k());
    if m > n + k {
        return Err(Error::BadDegree(format!("m = {m} outside 0..={}", n + k)));
    }
    let theta = spaces::theta_lvy(n, k)?;
    let power = theta.wedge_power(m)?;
    let xf = hamiltonian_vf_lvy(v)?;
    let xg = hamiltonian_vf_lvy(w)?;
    let value = theta
        .ext_d()
        .wedge(&power)?
        .interior(&xg)?
        .interior(&xf)?
        .neg();
    let b = bracket_t1v(v, w)?.directional;
    let tensorial = b.wedge(&power)?;
    let exact = if m == 0 {
        VForm::zero(theta.chart(), value.form_degree(), value.value_degree())
    } else {
        let f = tensorial_from_vf_lvy(v)?.body;
        let g = tensorial_from_vf_lvy(w)?.body;
        f.wedge(&g)?
            .wedge(&theta.wedge_power(m - 1)?)?
            .ext_d()
            .scale(&Scalar::int(m as i64))
    };
    Ok(BracketResult {
        value,
        decomposition: Some((tensorial, exact)),
    })
}

/// `{f̂, {ĝ, ĥ}} + {ĝ, {ĥ, f̂}} + {ĥ, {f̂, ĝ}}` on L_VY. Inner brackets get their
/// Hamiltonian fields from the structure-equation solver.
pub fn jacobiator_t1v(
    u: &ProjectableField,
    v: &ProjectableField,
    w: &ProjectableField,
) -> Result<VForm> {
    let kind = SpaceKind::lvy(u.n(), u.k())?;
    let dtheta = structure_form(kind)?;
    let outer =
        |a: &ProjectableField, b: &ProjectableField, c: &ProjectableField| -> Result<VForm> {
            let inner = bracket_t1v(b, c)?.observable;
            // Solving for the inner bracket's field checks it is again Hamiltonian.
            solve_structure(&dtheta, &inner)?;
            inner.body.ext_d().interior(&hamiltonian_vf_lvy(a)?)
        };
    outer(u, v, w)?.add(&outer(v, w, u)?)?.add(&outer(w, u, v)?)
}

/// The bracket on LM for degree-one observables: `X_f̂(ĝ)` and `−X_f̂ ⌟ (X_ĝ ⌟ dθ)`.
pub fn bracket_lm(f: &[Scalar], g: &[Scalar]) -> Result<(VForm, VForm)> {
    let kind = SpaceKind::lm(f.len())?;
    let xf: VField = natural_lift_lm(f)?;
    let xg = natural_lift_lm(g)?;
    let gh = tensorial_lm(g)?;
    let directional = gh.body.ext_d().interior(&xf)?;
    let contraction = structure_form(kind)?.interior(&xg)?.interior(&xf)?.neg();
    Ok((directional, contraction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn s(src: &str) -> Scalar {
        parse_scalar(src).unwrap()
    }

    fn pf(n: usize, k: usize, vi: &[&str], va: &[&str]) -> ProjectableField {
        ProjectableField::new(
            n,
            k,
            vi.iter().map(|t| s(t)).collect(),
            va.iter().map(|t| s(t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn bracket_z_constant_fields() {
        let v = pf(2, 1, &["1", "0"], &["0"]);
        let w = pf(2, 1, &["0", "1"], &["0"]);
        let b = bracket_z(&v, &w).unwrap();
        let (t, e) = b.decomposition.clone().unwrap();
        assert!(t.is_zero());
        assert_eq!(b.value, e);
        assert!(b.decomposition_holds().unwrap());
        assert!(bracket_z(&v, &v).unwrap().value.is_zero());
    }

    #[test]
    fn bracket_z_fiber_fields() {
        let v = pf(1, 1, &["0"], &["1"]);
        let w = pf(1, 1, &["0"], &["y1"]);
        let b = bracket_z(&v, &w).unwrap();
        let (t, _) = b.decomposition.clone().unwrap();
        assert_eq!(t, momentum_observable_z(&v).unwrap().body);
        assert!(b.decomposition_holds().unwrap());
    }

    #[test]
    fn exact_term_is_nonzero_somewhere() {
        let v = pf(2, 1, &["1", "0"], &["0"]);
        let w = pf(2, 1, &["0", "0"], &["x2"]);
        assert!(!exact_term_z(&v, &w).unwrap().is_zero());
    }

    #[test]
    fn tensorial_bracket_examples() {
        let v = pf(2, 1, &["1", "0"], &["0"]);
        let w = pf(2, 1, &["0", "1"], &["0"]);
        assert!(bracket_t1v(&v, &w).unwrap().observable.body.is_zero());

        let v = pf(1, 1, &["x1"], &["0"]);
        let w = pf(1, 1, &["1"], &["0"]);
        let b = bracket_t1v(&v, &w).unwrap();
        assert!(b.routes_agree());
        assert_eq!(
            b.observable,
            tensorial_from_vf_lvy(&pf(1, 1, &["-1"], &["0"])).unwrap()
        );

        let v = pf(1, 1, &["0"], &["1"]);
        let w = pf(1, 1, &["0"], &["y1"]);
        let b = bracket_t1v(&v, &w).unwrap();
        assert!(b.routes_agree());
        assert_eq!(b.observable, tensorial_from_vf_lvy(&v).unwrap());
    }

    #[test]
    fn degree_m_examples() {
        let v = pf(1, 1, &["1"], &["0"]);
        let w = pf(1, 1, &["0"], &["1"]);
        let b0 = bracket_degree_m(&v, &w, 0).unwrap();
        assert_eq!(b0.value, bracket_t1v(&v, &w).unwrap().contraction);
        let b1 = bracket_degree_m(&v, &w, 1).unwrap();
        assert!(b1.decomposition_holds().unwrap());
        let v = pf(2, 1, &["x1 + 1", "x2"], &["y1 + x1"]);
        let w = pf(2, 1, &["x2", "1"], &["2*y1"]);
        assert!(bracket_degree_m(&v, &w, 1)
            .unwrap()
            .decomposition_holds()
            .unwrap());
        assert!(matches!(
            bracket_degree_m(&v, &w, 4),
            Err(Error::BadDegree(_))
        ));
    }

    #[test]
    fn jacobi_small() {
        let u = pf(1, 1, &["x1^2"], &["y1"]);
        let v = pf(1, 1, &["1"], &["x1*y1"]);
        let w = pf(1, 1, &["x1"], &["y1^2"]);
        assert!(jacobiator_t1v(&u, &v, &w).unwrap().is_zero());
    }

    #[test]
    fn lm_bracket_routes_agree() {
        let (a, b) = bracket_lm(&[s("x1"), s("x2^2")], &[s("1"), s("x1")]).unwrap();
        assert_eq!(a, b);
    }
}
