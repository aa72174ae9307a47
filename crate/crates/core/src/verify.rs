//! Randomized and exhaustive verification suites.
//!
//! Each suite draws trial `i` from `random::trial_rng(seed, i)`, runs the trials in
//! parallel and reports them in index order, so a report depends only on its
//! parameters.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundlemaps::{
    connection_at, connection_to_lambda, fundamental_vertical_check, lambda_to_connection, nk_r,
    pairing_identity, phi_b_lambda, pushforward_check, rho_z, z_coordinates, FramePoint,
};
use crate::error::{Error, Result};
use crate::exterior::VForm;
use crate::hamilton::{
    classify_hf1_lvy, hamiltonian_vf_lvy, hamiltonian_vf_z, kernel_dim, momentum_observable_z,
    solve_interior, solve_structure, solve_structure_m, structure_form, tensorial_from_components,
    tensorial_from_vf_lvy, vector_function, Classification, ProjectableField,
};
use crate::poisson::{bracket_degree_m, bracket_z_with};
use crate::random::{self, TrialRng};
use crate::scalar::var::{base, energy, fiber, frame_xx, frame_yx, frame_yy, multimomentum};
use crate::scalar::{Rational, Scalar, Var};
use crate::spaces::{make_chart, theta_lvy, theta_z_scaled, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "&'static str")]
pub enum SuiteId {
    Multistruc,
    Xhooktheta,
    Lieconstant,
    Pbexact,
    Euler,
    Nkstruc,
    Constraint,
    Hflvy,
    Binomial,
    Nondegen,
    Thm71,
    Thm72,
    Thm73,
    RhoZWelldef,
    ConnectionRoundtrip,
    FlatConnection,
}

impl From<SuiteId> for &'static str {
    fn from(id: SuiteId) -> &'static str {
        id.as_str()
    }
}

impl SuiteId {
    pub const ALL: [SuiteId; 16] = [
        SuiteId::Multistruc,
        SuiteId::Xhooktheta,
        SuiteId::Lieconstant,
        SuiteId::Pbexact,
        SuiteId::Euler,
        SuiteId::Nkstruc,
        SuiteId::Constraint,
        SuiteId::Hflvy,
        SuiteId::Binomial,
        SuiteId::Nondegen,
        SuiteId::Thm71,
        SuiteId::Thm72,
        SuiteId::Thm73,
        SuiteId::RhoZWelldef,
        SuiteId::ConnectionRoundtrip,
        SuiteId::FlatConnection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Multistruc => "multistruc",
            SuiteId::Xhooktheta => "xhooktheta",
            SuiteId::Lieconstant => "lieconstant",
            SuiteId::Pbexact => "pbexact",
            SuiteId::Euler => "euler",
            SuiteId::Nkstruc => "nkstruc",
            SuiteId::Constraint => "constraint",
            SuiteId::Hflvy => "hflvy",
            SuiteId::Binomial => "binomial",
            SuiteId::Nondegen => "nondegen",
            SuiteId::Thm71 => "thm71",
            SuiteId::Thm72 => "thm72",
            SuiteId::Thm73 => "thm73",
            SuiteId::RhoZWelldef => "rhoZ-welldef",
            SuiteId::ConnectionRoundtrip => "connection-roundtrip",
            SuiteId::FlatConnection => "flat-connection",
        }
    }

    /// The property a suite checks and the module entry points it exercises.
    pub fn property(self) -> (&'static str, &'static str) {
        match self {
            SuiteId::Multistruc => ("solver output for X⌟dΘ = −df_v equals the closed-form X_{f_v} on Z", "hamilton::solve_interior, hamilton::hamiltonian_vf_z"),
            SuiteId::Xhooktheta => ("X_{f_v} ⌟ Θ = f_v", "hamilton::hamiltonian_vf_z, hamilton::momentum_observable_z"),
            SuiteId::Lieconstant => ("ℒ_{X_{f_v}} Θ = 0", "hamilton::hamiltonian_vf_z, exterior::VForm::lie_derivative"),
            SuiteId::Pbexact => ("{f_v, f_w} = f_{[v,w]} − d(X_{f_v} ⌟ (X_{f_w} ⌟ Θ))", "poisson::bracket_z"),
            SuiteId::Euler => ("E ⌟ dΘ = Θ and E ⌟ df_v = f_v", "spaces::euler_field"),
            SuiteId::Nkstruc => ("solver output for X⌟i*dθ = −df̂_v equals the closed-form X_{f̂_v}; degree-m equation for m > 0", "hamilton::solve_structure, hamilton::hamiltonian_vf_lvy, hamilton::solve_structure_m"),
            SuiteId::Constraint => ("tensorial functions of non-projectable fields are rejected as not allowable", "hamilton::solve_structure"),
            SuiteId::Hflvy => ("template elements g·π + (ξ, ζ) are accepted with the same parts", "hamilton::classify_hf1_lvy"),
            SuiteId::Binomial => ("∧^m i*θ = Σ_l C(m,l) (θ^A ŝ_A)^l ∧ (θ^i r̂_i)^{m−l}", "exterior::VForm::wedge_power, spaces::theta_lvy"),
            SuiteId::Nondegen => ("X ↦ X ⌟ d(∧^m i*θ) has trivial kernel at sampled frames, 1 ≤ m ≤ n+k−1", "hamilton::kernel_dim"),
            SuiteId::Thm71 => ("φ_{(B,λ)}*Θ = ⟨∧^n i*θ, V(B,λ)⟩", "bundlemaps::pairing_identity"),
            SuiteId::Thm72 => ("φ_{(B,λ)*} X_{f̂_v} = X_{f_v} by Jacobian and by chart formula", "bundlemaps::pushforward_check"),
            SuiteId::Thm73 => ("degree-m bracket = {f̂,ĝ} ∧ ∧^mθ + m d(f̂ ∧ ĝ ∧ ∧^{m−1}θ)", "poisson::bracket_degree_m"),
            SuiteId::RhoZWelldef => ("ρ_Z(w·g, g⁻¹·(B,λ)) = ρ_Z(w,(B,λ)) and its Z coordinates match φ_{(B,λ)}", "bundlemaps::rho_z, bundlemaps::z_coordinates, bundlemaps::phi_b_lambda"),
            SuiteId::ConnectionRoundtrip => ("γ → λ_γ → γ, λ_γ equivariance and frame independence", "bundlemaps::connection_to_lambda, bundlemaps::lambda_to_connection"),
            SuiteId::FlatConnection => ("dλ_γ(A*) = A", "bundlemaps::fundamental_vertical_check"),
        }
    }

    pub fn default_params(self) -> SuiteParams {
        let (n, k) = match self {
            SuiteId::Hflvy => (2, 2),
            SuiteId::FlatConnection => (1, 2),
            _ => (2, 1),
        };
        SuiteParams {
            n,
            k,
            m: None,
            trials: 10,
            seed: 0,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SuiteId> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown verification suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub n: usize,
    pub k: usize,
    pub m: Option<usize>,
    pub trials: usize,
    pub seed: u64,
}

/// Knobs that deliberately break the geometry, for mutation testing.
#[derive(Clone, Debug, PartialEq)]
pub struct Mutation {
    /// Factor applied to the `p d^n x` term of Θ.
    pub theta_scale: Rational,
}

impl Default for Mutation {
    fn default() -> Mutation {
        Mutation {
            theta_scale: Rational::one(),
        }
    }
}

impl Mutation {
    pub fn is_identity(&self) -> bool {
        self.theta_scale.is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub property: &'static str,
    pub params: SuiteParams,
    pub rng: &'static str,
    pub mutated: bool,
    pub pass: bool,
    pub passed: usize,
    pub failed: usize,
    pub trials: Vec<TrialOutcome>,
}

type Check = Result<std::result::Result<(), String>>;

fn expect(cond: bool, what: &str) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn validate(id: SuiteId, p: &SuiteParams) -> Result<()> {
    let bad = |msg: String| Err(Error::BadDimensions(format!("{id}: {msg}")));
    if p.n == 0 || p.k == 0 {
        return bad("n and k must be at least 1".into());
    }
    if p.n + p.k > 5 {
        return bad("n + k above 5 is outside the desk-scale range".into());
    }
    if p.trials == 0 {
        return bad("at least one trial is required".into());
    }
    let m_max = match id {
        SuiteId::Binomial => Some(3),
        SuiteId::Nondegen => Some(p.n + p.k - 1),
        SuiteId::Nkstruc | SuiteId::Thm73 => Some(p.n + p.k),
        _ => None,
    };
    match (p.m, m_max) {
        (Some(_), None) => return bad("this suite takes no m".into()),
        (Some(m), Some(max)) if m > max => return bad(format!("m = {m} outside 0..={max}")),
        (Some(0), _) if id == SuiteId::Nondegen => return bad("m must be at least 1".into()),
        _ => {}
    }
    match id {
        SuiteId::Hflvy if p.n < 2 || p.k < 2 => {
            bad("the template is characterized for n, k >= 2 only".into())
        }
        SuiteId::Nondegen if p.n + p.k > 4 => bad("n + k must be at most 4".into()),
        _ => Ok(()),
    }
}

pub fn run_suite(id: SuiteId, params: SuiteParams) -> Result<SuiteReport> {
    run_suite_with(id, params, &Mutation::default())
}

pub fn run_suite_with(
    id: SuiteId,
    params: SuiteParams,
    mutation: &Mutation,
) -> Result<SuiteReport> {
    validate(id, &params)?;
    let ctx = Context::new(id, params, mutation)?;
    let trials: Vec<TrialOutcome> = (0..params.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::trial_rng(params.seed, i as u64);
            let (pass, detail) = match ctx.trial(&mut rng) {
                Ok(Ok(())) => (true, None),
                Ok(Err(why)) => (false, Some(why)),
                Err(e) => (false, Some(format!("error: {e}"))),
            };
            TrialOutcome {
                index: i,
                pass,
                detail,
            }
        })
        .collect();
    let passed = trials.iter().filter(|t| t.pass).count();
    Ok(SuiteReport {
        suite: id,
        property: id.property().0,
        params,
        rng: random::RNG_ALGORITHM,
        mutated: !mutation.is_identity(),
        pass: passed == trials.len(),
        passed,
        failed: trials.len() - passed,
        trials,
    })
}

/// Per-suite data shared by all trials.
struct Context {
    id: SuiteId,
    n: usize,
    k: usize,
    m: Option<usize>,
    theta: Option<VForm>,
    forms: Vec<(usize, VForm)>,
}

impl Context {
    fn new(id: SuiteId, p: SuiteParams, mutation: &Mutation) -> Result<Context> {
        let (n, k) = (p.n, p.k);
        let uses_z = matches!(
            id,
            SuiteId::Multistruc
                | SuiteId::Xhooktheta
                | SuiteId::Lieconstant
                | SuiteId::Pbexact
                | SuiteId::Euler
        );
        let theta = if uses_z {
            Some(theta_z_scaled(
                n,
                k,
                &Scalar::from_rational(mutation.theta_scale.clone()),
            )?)
        } else {
            None
        };
        let mut forms = Vec::new();
        if id == SuiteId::Nondegen {
            let th = theta_lvy(n, k)?;
            let ms: Vec<usize> = match p.m {
                Some(m) => vec![m],
                None => (1..n + k).collect(),
            };
            for m in ms {
                forms.push((m, th.wedge_power(m)?.ext_d()));
            }
        }
        Ok(Context {
            id,
            n,
            k,
            m: p.m,
            theta,
            forms,
        })
    }

    fn theta(&self) -> &VForm {
        self.theta.as_ref().expect("suite works on Z")
    }

    fn trial(&self, rng: &mut TrialRng) -> Check {
        let (n, k) = (self.n, self.k);
        match self.id {
            SuiteId::Multistruc => {
                let v = random::projectable_field(rng, n, k, 2);
                let f = momentum_observable_z(&v)?;
                let solved = match solve_interior(&self.theta().ext_d(), &f.body.ext_d().neg()) {
                    Ok(x) => x,
                    Err(e @ (Error::NotAllowable | Error::SingularStructure { .. })) => {
                        return Ok(Err(e.to_string()))
                    }
                    Err(e) => return Err(e),
                };
                Ok(expect(
                    solved == hamiltonian_vf_z(&v)?,
                    "solver and closed form differ",
                ))
            }
            SuiteId::Xhooktheta => {
                let v = random::projectable_field(rng, n, k, 2);
                let lhs = self.theta().interior(&hamiltonian_vf_z(&v)?)?;
                Ok(expect(
                    lhs == momentum_observable_z(&v)?.body,
                    "X_{f_v} ⌟ Θ differs from f_v",
                ))
            }
            SuiteId::Lieconstant => {
                let v = random::projectable_field(rng, n, k, 2);
                let l = self.theta().lie_derivative(&hamiltonian_vf_z(&v)?)?;
                Ok(expect(l.is_zero(), "ℒ_{X_{f_v}} Θ is nonzero"))
            }
            SuiteId::Pbexact => {
                let v = random::projectable_field(rng, n, k, 2);
                let w = random::projectable_field(rng, n, k, 2);
                let b = bracket_z_with(&v, &w, self.theta())?;
                Ok(expect(
                    b.decomposition_holds()?,
                    "bracket differs from tensorial + exact parts",
                ))
            }
            SuiteId::Euler => {
                let theta = self.theta();
                let e = match solve_interior(&theta.ext_d(), theta) {
                    Ok(e) => e,
                    Err(e @ (Error::NotAllowable | Error::SingularStructure { .. })) => {
                        return Ok(Err(e.to_string()))
                    }
                    Err(e) => return Err(e),
                };
                let v = random::projectable_field(rng, n, k, 2);
                let f = momentum_observable_z(&v)?.body;
                if theta.ext_d().interior(&e)? != *theta {
                    return Ok(Err("E ⌟ dΘ differs from Θ".into()));
                }
                Ok(expect(
                    f.ext_d().interior(&e)? == f,
                    "E ⌟ df_v differs from f_v",
                ))
            }
            SuiteId::Nkstruc => {
                let v = random::projectable_field(rng, n, k, 2);
                match self.m.unwrap_or(0) {
                    0 => {
                        let kind = SpaceKind::lvy(n, k)?;
                        let x =
                            solve_structure(&structure_form(kind)?, &tensorial_from_vf_lvy(&v)?)?;
                        Ok(expect(
                            x == hamiltonian_vf_lvy(&v)?,
                            "solver and closed form differ",
                        ))
                    }
                    m => Ok(expect(
                        solve_structure_m(&v, m)?.consistent,
                        "degree-m structure equation fails",
                    )),
                }
            }
            SuiteId::Constraint => {
                let (vi, va) = random::non_projectable_components(rng, n, k, 2);
                let f = tensorial_from_components(n, k, &vi, &va)?;
                match solve_structure(&structure_form(SpaceKind::lvy(n, k)?)?, &f) {
                    Err(Error::NotAllowable) => Ok(Ok(())),
                    Ok(_) => Ok(Err("non-projectable tensorial function was solved".into())),
                    Err(e) => Err(e),
                }
            }
            SuiteId::Hflvy => hflvy_trial(rng, n, k),
            SuiteId::Binomial => binomial_trial(rng, n, k, self.m),
            SuiteId::Nondegen => {
                let w = random::frame_point(rng, n, k);
                let pt = w.lvy_point();
                for (m, form) in &self.forms {
                    let dim = kernel_dim(&form.evaluate(&pt)?)?;
                    if dim != 0 {
                        return Ok(Err(format!("kernel of dimension {dim} at m = {m}")));
                    }
                }
                Ok(Ok(()))
            }
            SuiteId::Thm71 => {
                let label = random::momentum_label(rng, n, k);
                Ok(expect(
                    pairing_identity(&label, n, k)?.holds(),
                    "pullback and pairing differ",
                ))
            }
            SuiteId::Thm72 => {
                let v = random::projectable_field(rng, n, k, 2);
                let label = random::momentum_label(rng, n, k);
                let points: Vec<FramePoint> = (0..THM72_POINTS)
                    .map(|_| random::frame_point(rng, n, k))
                    .collect();
                let samples = pushforward_check(&v, &label, &points)?;
                match samples.iter().position(|s| !s.holds()) {
                    None => Ok(Ok(())),
                    Some(i) => Ok(Err(format!("sample point {i} disagrees"))),
                }
            }
            SuiteId::Thm73 => {
                let v = random::projectable_field(rng, n, k, 1);
                let w = random::projectable_field(rng, n, k, 1);
                let ms: Vec<usize> = match self.m {
                    Some(m) => vec![m],
                    None => {
                        let mut ms = vec![0, 1, n - 1];
                        ms.sort_unstable();
                        ms.dedup();
                        ms
                    }
                };
                for m in ms {
                    if !bracket_degree_m(&v, &w, m)?.decomposition_holds()? {
                        return Ok(Err(format!("decomposition fails at m = {m}")));
                    }
                }
                Ok(Ok(()))
            }
            SuiteId::RhoZWelldef => {
                let w = random::frame_point(rng, n, k);
                let g = random::group_element(rng, n, k);
                let label = random::momentum_label(rng, n, k);
                let z = rho_z(&w, &label)?;
                if rho_z(&w.act(&g)?, &nk_r(&g.inverse(), &label)?)? != z {
                    return Ok(Err("ρ_Z differs on two representatives".into()));
                }
                let (pm, p) = z_coordinates(&z, n, k)?;
                let img = phi_b_lambda(&label, n, k)?.image_point(&w.lvy_point())?;
                let coords_match = img[&energy()] == p
                    && (1..=n)
                        .all(|j| (1..=k).all(|b| img[&multimomentum(j, b)] == pm[(j - 1, b - 1)]));
                Ok(expect(
                    coords_match,
                    "contracted coordinates differ from φ_{(B,λ)}",
                ))
            }
            SuiteId::ConnectionRoundtrip => {
                let gamma = random::connection(rng, n, k, 1);
                let lam = connection_to_lambda(&gamma)?;
                let w = random::frame_point(rng, n, k);
                let g = random::group_element(rng, n, k);
                if !lam.equivariant_at(&w, &g)? {
                    return Ok(Err("λ_γ is not equivariant".into()));
                }
                let back = lambda_to_connection(&lam, &w)?;
                let direct = connection_at(&gamma, &w.base_point())?;
                if connection_at(&back, &Default::default())? != direct {
                    return Ok(Err("round trip changes γ".into()));
                }
                Ok(expect(
                    lambda_to_connection(&lam, &w.act(&g)?)? == back,
                    "γ depends on the frame",
                ))
            }
            SuiteId::FlatConnection => {
                let gamma = random::connection(rng, n, k, 1);
                let a = random::matrix(rng, k, n);
                Ok(expect(
                    fundamental_vertical_check(&gamma, &a)?.holds(),
                    "dλ_γ(A*) differs from A",
                ))
            }
        }
    }
}

/// Frames sampled per `thm72` trial.
pub const THM72_POINTS: usize = 20;

fn hflvy_trial(rng: &mut TrialRng, n: usize, k: usize) -> Check {
    let xs: Vec<Var> = (1..=n).map(base).collect();
    let mut ys = xs.clone();
    ys.extend((1..=k).map(fiber));
    let g_base: Vec<Scalar> = (0..n).map(|_| random::polynomial(rng, &xs, 2, 2)).collect();
    let g_fiber: Vec<Scalar> = (0..k).map(|_| random::polynomial(rng, &ys, 2, 2)).collect();
    let xi: Vec<Scalar> = (0..n).map(|_| random::polynomial(rng, &xs, 2, 2)).collect();
    let zeta: Vec<Scalar> = (0..k).map(|_| random::polynomial(rng, &ys, 2, 2)).collect();
    let v = ProjectableField::new(n, k, g_base.clone(), g_fiber.clone())?;
    let chart = make_chart(SpaceKind::lvy(n, k)?)?;
    let shift = vector_function(&chart, xi.iter().chain(&zeta).cloned().collect())?;
    let f = tensorial_from_vf_lvy(&v)?.body.add(&shift)?;
    match classify_hf1_lvy(&f)? {
        Classification::NotAllowable => Ok(Err("template element rejected".into())),
        Classification::Allowable(parts) => Ok(expect(
            parts.g_base == g_base
                && parts.g_fiber == g_fiber
                && parts.xi == xi
                && parts.zeta == zeta,
            "recovered parts differ from the generated ones",
        )),
    }
}

/// `C(m, l)`.
fn choose(m: usize, l: usize) -> i64 {
    (0..l).fold(1i64, |acc, i| acc * (m - i) as i64 / (i + 1) as i64)
}

/// The two halves of `i*θ`, assembled from chart coordinates:
/// `θ^i ⊗ r̂_i` and `θ^A ⊗ ŝ_A`.
fn theta_halves(n: usize, k: usize) -> Result<(VForm, VForm)> {
    let chart = make_chart(SpaceKind::lvy(n, k)?)?;
    let mut horizontal = VForm::zero(&chart, 1, 1);
    let mut vertical = VForm::zero(&chart, 1, 1);
    for i in 1..=n {
        let r = VForm::value_basis(&chart, i)?;
        for j in 1..=n {
            let t = VForm::dvar(&chart, base(j))?.scale(&Scalar::var(frame_xx(i, j)));
            horizontal = horizontal.add(&t.wedge(&r)?)?;
        }
    }
    for a in 1..=k {
        let s = VForm::value_basis(&chart, n + a)?;
        for j in 1..=n {
            let t = VForm::dvar(&chart, base(j))?.scale(&Scalar::var(frame_yx(a, j)));
            vertical = vertical.add(&t.wedge(&s)?)?;
        }
        for b in 1..=k {
            let t = VForm::dvar(&chart, fiber(b))?.scale(&Scalar::var(frame_yy(a, b)));
            vertical = vertical.add(&t.wedge(&s)?)?;
        }
    }
    Ok((horizontal, vertical))
}

/// Checks the binomial expansion of `∧^m i*θ`. Deterministic; the rng picks which m to
/// check when none is fixed.
fn binomial_trial(rng: &mut TrialRng, n: usize, k: usize, m: Option<usize>) -> Check {
    use rand::Rng;
    let m = m.unwrap_or_else(|| rng.gen_range(0..=3));
    let theta = theta_lvy(n, k)?;
    let (h, v) = theta_halves(n, k)?;
    let chart = theta.chart().clone();
    let mut expansion = VForm::zero(&chart, m, m);
    for l in 0..=m {
        let term = v.wedge_power(l)?.wedge(&h.wedge_power(m - l)?)?;
        expansion = expansion.add(&term.scale(&Scalar::int(choose(m, l))))?;
    }
    Ok(expect(
        theta.wedge_power(m)? == expansion,
        &format!("expansion differs at m = {m}"),
    ))
}

/// Markdown table mapping every suite to the property and entry points it checks.
pub fn traceability_markdown() -> String {
    let mut out = String::from("| suite | property | checked through |\n|---|---|---|\n");
    for id in SuiteId::ALL {
        let (prop, entry) = id.property();
        out.push_str(&format!(
            "| `{id}` | {} | `{}` |\n",
            prop.replace('|', "\\|"),
            entry
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(id: SuiteId, n: usize, k: usize, trials: usize) -> SuiteParams {
        SuiteParams {
            n,
            k,
            trials,
            seed: 1,
            ..id.default_params()
        }
    }

    #[test]
    fn every_suite_passes_at_default_size() {
        for id in SuiteId::ALL {
            let p = SuiteParams {
                trials: 2,
                ..id.default_params()
            };
            let r = run_suite(id, p).unwrap();
            assert!(r.pass, "{id}: {:?}", r.trials);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let p = params(SuiteId::Pbexact, 2, 1, 4);
        assert_eq!(
            run_suite(SuiteId::Pbexact, p).unwrap(),
            run_suite(SuiteId::Pbexact, p).unwrap()
        );
    }

    #[test]
    fn parameters_are_validated() {
        let bad = SuiteParams {
            m: Some(2),
            ..SuiteId::Pbexact.default_params()
        };
        assert!(matches!(
            run_suite(SuiteId::Pbexact, bad),
            Err(Error::BadDimensions(_))
        ));
        let bad = SuiteParams {
            n: 1,
            ..SuiteId::Hflvy.default_params()
        };
        assert!(run_suite(SuiteId::Hflvy, bad).is_err());
        let bad = SuiteParams {
            n: 3,
            k: 2,
            ..SuiteId::Nondegen.default_params()
        };
        assert!(run_suite(SuiteId::Nondegen, bad).is_err());
        assert!("nope".parse::<SuiteId>().is_err());
        assert_eq!(
            "rhoZ-welldef".parse::<SuiteId>().unwrap(),
            SuiteId::RhoZWelldef
        );
    }

    #[test]
    fn mutated_theta_breaks_suites() {
        let mutation = Mutation {
            theta_scale: Rational::from_integer(2.into()),
        };
        let failing = [
            SuiteId::Multistruc,
            SuiteId::Xhooktheta,
            SuiteId::Lieconstant,
            SuiteId::Pbexact,
            SuiteId::Euler,
        ]
        .into_iter()
        .filter(|&id| {
            !run_suite_with(id, params(id, 2, 1, 3), &mutation)
                .unwrap()
                .pass
        })
        .count();
        assert!(failing >= 3, "only {failing} suites noticed the mutation");
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(
            (0..=4).map(|l| choose(4, l)).collect::<Vec<_>>(),
            [1, 4, 6, 4, 1]
        );
    }

    #[test]
    fn traceability_covers_all_suites() {
        let t = traceability_markdown();
        assert_eq!(t.lines().count(), 2 + SuiteId::ALL.len());
        assert!(t.contains("`connection-roundtrip`"));
    }
}
