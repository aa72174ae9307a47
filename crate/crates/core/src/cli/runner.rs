//! Executes scripts against the engine and assembles the JSON document.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use super::ast::{HamSource, ObsSource, Script, Statement, StmtKind};
use super::cursor::Pos;
use super::expr::Expr;
use crate::bundlemaps::{phi_b_lambda, MomentumLabel};
use crate::error::{Error, Result};
use crate::exterior::json::{field_json, form_json, map_json};
use crate::exterior::{ChartMap, VField, VForm};
use crate::hamilton::{
    hamiltonian_vf_lvy, hamiltonian_vf_z, momentum_observable_z, natural_lift_lm, solve_interior,
    solve_structure, structure_form, tensorial_from_vf_lvy, tensorial_lm, vector_function,
    Observable, ProjectableField,
};
use crate::linalg::QMatrix;
use crate::poisson::{bracket_degree_m, bracket_lm, bracket_z, BracketResult};
use crate::scalar::{Rational, Var};
use crate::spaces::{euler_field, make_chart, theta_z, SpaceKind, SpaceTag};
use crate::verify::{run_suite, SuiteParams, SuiteReport};

/// A module error tagged with the statement that raised it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub pos: Pos,
    pub statement: String,
    pub error: Error,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: in `{}`: {}",
            self.pos.line, self.pos.col, self.statement, self.error
        )
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone)]
enum Binding {
    Field(ProjectableField),
    Observable(Observable),
    Vector(VField),
    Bracket(BracketResult),
    Map(ChartMap),
}

/// What a statement produced for the output document.
#[derive(Debug, Clone)]
pub enum Output {
    Emit {
        name: String,
        value: Value,
        text: String,
    },
    Verify(SuiteReport),
}

impl Output {
    pub fn ok(&self) -> bool {
        match self {
            Output::Emit { .. } => true,
            Output::Verify(r) => r.pass,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Output::Emit { name, value, .. } => {
                json!({ "kind": "emit", "name": name, "value": value })
            }
            Output::Verify(r) => json!({ "kind": "verify", "report": r }),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Output::Emit { name, text, .. } => format!("{name} = {text}"),
            Output::Verify(r) => verify_line(r),
        }
    }
}

pub fn verify_line(r: &SuiteReport) -> String {
    let p = &r.params;
    let m = p.m.map(|m| format!(",m={m}")).unwrap_or_default();
    format!(
        "{} {}(n={},k={}{m},trials={},seed={}): {}/{} trials passed",
        if r.pass { "PASS" } else { "FAIL" },
        r.suite,
        p.n,
        p.k,
        p.trials,
        p.seed,
        r.passed,
        r.passed + r.failed
    )
}

/// Interpreter state: current chart, bindings and the default seed for `verify`.
pub struct Runner {
    seed: u64,
    chart: Option<SpaceKind>,
    bindings: HashMap<String, (Option<SpaceKind>, Binding)>,
}

impl Runner {
    pub fn new(seed: u64) -> Runner {
        Runner {
            seed,
            chart: None,
            bindings: HashMap::new(),
        }
    }

    pub fn run(&mut self, script: &Script) -> std::result::Result<Vec<Output>, RunError> {
        let mut out = Vec::new();
        for stmt in &script.statements {
            if let Some(o) = self.exec(stmt)? {
                out.push(o);
            }
        }
        Ok(out)
    }

    pub fn exec(&mut self, stmt: &Statement) -> std::result::Result<Option<Output>, RunError> {
        self.exec_kind(&stmt.kind).map_err(|error| RunError {
            pos: stmt.pos,
            statement: stmt.to_string(),
            error,
        })
    }

    fn chart(&self) -> Result<SpaceKind> {
        self.chart
            .ok_or_else(|| Error::Invalid("no chart declared".into()))
    }

    fn get(&self, name: &str) -> Result<&Binding> {
        let (kind, b) = self
            .bindings
            .get(name)
            .ok_or_else(|| Error::UnboundName(name.into()))?;
        if let (Some(kind), Ok(current)) = (kind, self.chart()) {
            if *kind != current {
                return Err(Error::ChartMismatch(kind.to_string(), current.to_string()));
            }
        }
        Ok(b)
    }

    fn field(&self, name: &str) -> Result<&ProjectableField> {
        match self.get(name)? {
            Binding::Field(v) => Ok(v),
            _ => Err(Error::Invalid(format!(
                "`{name}` is not a vector field on Y"
            ))),
        }
    }

    fn unsupported(kind: SpaceKind, what: &str) -> Error {
        Error::Invalid(format!("{what} is not available on {kind}"))
    }

    fn exec_kind(&mut self, stmt: &StmtKind) -> Result<Option<Output>> {
        let (name, value) = match stmt {
            StmtKind::Chart { space, n, k } => {
                let kind = SpaceKind::new(*space, *n, *k)?;
                make_chart(kind)?;
                self.chart = Some(kind);
                return Ok(None);
            }
            StmtKind::Verify { suite, args } => {
                let mut p = SuiteParams {
                    seed: self.seed,
                    ..suite.default_params()
                };
                for (key, v) in args {
                    let small = || {
                        usize::try_from(*v)
                            .map_err(|_| Error::BadDimensions(format!("{key} = {v} too large")))
                    };
                    match key.as_str() {
                        "n" => p.n = small()?,
                        "k" => p.k = small()?,
                        "m" => p.m = Some(small()?),
                        "trials" => p.trials = small()?,
                        _ => p.seed = *v,
                    }
                }
                return Ok(Some(Output::Verify(run_suite(*suite, p)?)));
            }
            StmtKind::Emit { name } => {
                let (value, text) = match self.get(name)? {
                    Binding::Field(v) => (
                        json!({ "type": "projectable_field", "text": v.to_string() }),
                        v.to_string(),
                    ),
                    Binding::Observable(f) => (
                        json!({ "type": "observable", "form": form_json(&f.body) }),
                        f.body.to_string(),
                    ),
                    Binding::Vector(x) => (
                        json!({ "type": "vector_field", "field": field_json(x) }),
                        x.to_string(),
                    ),
                    Binding::Bracket(b) => bracket_json(b)?,
                    Binding::Map(m) => {
                        let text = m
                            .assignment()
                            .map(|(v, s)| format!("{v} -> {s}"))
                            .collect::<Vec<_>>()
                            .join(", ");
                        (json!({ "type": "map", "map": map_json(m) }), text)
                    }
                };
                return Ok(Some(Output::Emit {
                    name: name.clone(),
                    value,
                    text,
                }));
            }
            StmtKind::Let { name, components } => {
                let kind = self.chart()?;
                let pairs = components
                    .iter()
                    .map(|(c, e)| Ok((Var::new(c), e.eval()?)))
                    .collect::<Result<Vec<_>>>()?;
                let v = if kind.tag == SpaceTag::LM {
                    let fi = ProjectableField::from_named(kind.n, 1, &pairs)?;
                    if !fi.fiber_components()[0].is_zero() {
                        return Err(Error::Invalid(
                            "fields on LM have base components only".into(),
                        ));
                    }
                    fi
                } else {
                    ProjectableField::from_named(kind.n, kind.k, &pairs)?
                };
                (name, (None, Binding::Field(v)))
            }
            StmtKind::Obs { name, source } => {
                let kind = self.chart()?;
                let f = match (source, kind.tag) {
                    (ObsSource::Momentum(v), SpaceTag::Z) => momentum_observable_z(self.field(v)?)?,
                    (ObsSource::Momentum(v), SpaceTag::LVY) => {
                        tensorial_from_vf_lvy(self.field(v)?)?
                    }
                    (ObsSource::Momentum(v), SpaceTag::LM) => {
                        tensorial_lm(self.field(v)?.base_components())?
                    }
                    (ObsSource::Vector(es), SpaceTag::LVY | SpaceTag::LM) => {
                        let comps = es.iter().map(Expr::eval).collect::<Result<Vec<_>>>()?;
                        Observable::new(kind, vector_function(&make_chart(kind)?, comps)?)?
                    }
                    _ => return Err(Runner::unsupported(kind, "this observable")),
                };
                (name, (Some(kind), Binding::Observable(f)))
            }
            StmtKind::Ham { name, source } => {
                let kind = self.chart()?;
                let x = match (source, kind.tag) {
                    (HamSource::Solve(f), SpaceTag::Z) => {
                        let Binding::Observable(f) = self.get(f)? else {
                            return Err(Error::Invalid(format!("`{f}` is not an observable")));
                        };
                        solve_interior(&theta_z(kind.n, kind.k)?.ext_d(), &f.body.ext_d().neg())?
                    }
                    (HamSource::Solve(f), SpaceTag::LVY | SpaceTag::LM) => {
                        let Binding::Observable(f) = self.get(f)? else {
                            return Err(Error::Invalid(format!("`{f}` is not an observable")));
                        };
                        solve_structure(&structure_form(kind)?, f)?
                    }
                    (HamSource::Closed(v), SpaceTag::Z) => hamiltonian_vf_z(self.field(v)?)?,
                    (HamSource::Closed(v), SpaceTag::LVY) => hamiltonian_vf_lvy(self.field(v)?)?,
                    (HamSource::Closed(v), SpaceTag::LM) => {
                        natural_lift_lm(self.field(v)?.base_components())?
                    }
                    (HamSource::Euler, SpaceTag::Z) => euler_field(kind.n, kind.k)?,
                    _ => return Err(Runner::unsupported(kind, "this Hamiltonian field")),
                };
                (name, (Some(kind), Binding::Vector(x)))
            }
            StmtKind::Bracket {
                name,
                left,
                right,
                m,
            } => {
                let kind = self.chart()?;
                let (v, w) = (self.field(left)?, self.field(right)?);
                let b = match (kind.tag, m) {
                    (SpaceTag::Z, None) => bracket_z(v, w)?,
                    (SpaceTag::LVY, m) => bracket_degree_m(v, w, m.unwrap_or(0))?,
                    (SpaceTag::LM, None) => {
                        let (directional, value) =
                            bracket_lm(v.base_components(), w.base_components())?;
                        let zero =
                            VForm::zero(value.chart(), value.form_degree(), value.value_degree());
                        BracketResult {
                            value,
                            decomposition: Some((directional, zero)),
                        }
                    }
                    _ => return Err(Runner::unsupported(kind, "this bracket")),
                };
                (name, (Some(kind), Binding::Bracket(b)))
            }
            StmtKind::Map { name, b, lambda } => {
                let kind = self.chart()?;
                if kind.tag != SpaceTag::LVY {
                    return Err(Runner::unsupported(kind, "phi"));
                }
                let rows = b
                    .iter()
                    .map(|r| r.iter().map(constant).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let bm = if rows.is_empty() {
                    QMatrix::zeros(0, 0)
                } else {
                    QMatrix::from_rows(rows)?
                };
                let label = MomentumLabel::new(bm, constant(lambda)?);
                (
                    name,
                    (
                        Some(kind),
                        Binding::Map(phi_b_lambda(&label, kind.n, kind.k)?),
                    ),
                )
            }
        };
        self.bindings.insert(name.clone(), value);
        Ok(None)
    }
}

fn constant(e: &Expr) -> Result<Rational> {
    e.eval()?
        .as_constant()
        .ok_or_else(|| Error::Invalid(format!("`{e}` is not a rational constant")))
}

fn bracket_json(b: &BracketResult) -> Result<(Value, String)> {
    let mut v = json!({
        "type": "bracket",
        "value": form_json(&b.value),
        "decomposition_holds": b.decomposition_holds()?,
    });
    if let Some((t, e)) = &b.decomposition {
        v["tensorial"] = form_json(t);
        v["exact"] = form_json(e);
    }
    Ok((v, b.value.to_string()))
}

/// The JSON document for a run: `{results, ok}`, or `{error, ok: false}` if a
/// statement failed.
pub fn document(outputs: &[Output], error: Option<&RunError>) -> Value {
    let results: Vec<Value> = outputs.iter().map(Output::to_json).collect();
    let mut doc = json!({
        "results": results,
        "ok": error.is_none() && outputs.iter().all(Output::ok),
    });
    if let Some(e) = error {
        doc["error"] = json!({
            "line": e.pos.line,
            "col": e.pos.col,
            "statement": e.statement,
            "message": e.error.to_string(),
        });
    }
    doc
}

/// Runs a script with a fresh interpreter.
pub fn run(script: &Script, seed: u64) -> std::result::Result<Vec<Output>, RunError> {
    Runner::new(seed).run(script)
}
