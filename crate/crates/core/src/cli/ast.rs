//! Script syntax tree and its canonical rendering.

use std::fmt;

use super::cursor::Pos;
use super::expr::Expr;
use crate::spaces::SpaceTag;
use crate::verify::SuiteId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Script {
    pub statements: Vec<Statement>,
}

/// A statement and where it starts. Equality ignores the position.
#[derive(Debug, Clone, Eq)]
pub struct Statement {
    pub pos: Pos,
    pub kind: StmtKind,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    /// `chart Z(n=2,k=1)`; `chart LM(n=2)` for LM.
    Chart {
        space: SpaceTag,
        n: usize,
        k: usize,
    },
    /// `let v = vf{x1: expr, y1: expr}`
    Let {
        name: String,
        components: Vec<(String, Expr)>,
    },
    Obs {
        name: String,
        source: ObsSource,
    },
    Ham {
        name: String,
        source: HamSource,
    },
    /// `bracket b = pb(v, w)` or `pb(v, w, m=1)` on LVY.
    Bracket {
        name: String,
        left: String,
        right: String,
        m: Option<usize>,
    },
    /// `map m = phi(B=[[1],[0]], lambda=2)`
    Map {
        name: String,
        b: Vec<Vec<Expr>>,
        lambda: Expr,
    },
    /// `verify pbexact(n=2,k=1,trials=10,seed=1)`
    Verify {
        suite: SuiteId,
        args: Vec<(String, u64)>,
    },
    Emit {
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObsSource {
    /// `momentum(v)`: f_v on Z, the tensorial function of v on LVY or LM.
    Momentum(String),
    /// `vec[e1, ..., e_{n+k}]`: a vector-valued function on LVY or LM.
    Vector(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HamSource {
    /// Run the structure-equation solver on an observable.
    Solve(String),
    /// The closed-form Hamiltonian field of a projectable field.
    Closed(String),
    /// The Euler field on Z.
    Euler,
}

impl StmtKind {
    /// Name the statement binds, if any.
    pub fn binds(&self) -> Option<&str> {
        match self {
            StmtKind::Let { name, .. }
            | StmtKind::Obs { name, .. }
            | StmtKind::Ham { name, .. }
            | StmtKind::Bracket { name, .. }
            | StmtKind::Map { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Names the statement reads.
    pub fn uses(&self) -> Vec<&str> {
        match self {
            StmtKind::Obs {
                source: ObsSource::Momentum(v),
                ..
            } => vec![v],
            StmtKind::Ham {
                source: HamSource::Solve(v) | HamSource::Closed(v),
                ..
            } => vec![v],
            StmtKind::Bracket { left, right, .. } => vec![left, right],
            StmtKind::Emit { name } => vec![name],
            _ => Vec::new(),
        }
    }

    /// Whether the statement needs a chart in scope.
    pub fn needs_chart(&self) -> bool {
        !matches!(
            self,
            StmtKind::Chart { .. } | StmtKind::Verify { .. } | StmtKind::Emit { .. }
        )
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for StmtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StmtKind::Chart {
                space: SpaceTag::LM,
                n,
                ..
            } => write!(f, "chart LM(n={n})"),
            StmtKind::Chart { space, n, k } => write!(f, "chart {}(n={n},k={k})", space.as_str()),
            StmtKind::Let { name, components } => {
                let body: Vec<String> = components
                    .iter()
                    .map(|(c, e)| format!("{c}: {e}"))
                    .collect();
                write!(f, "let {name} = vf{{{}}}", body.join(", "))
            }
            StmtKind::Obs {
                name,
                source: ObsSource::Momentum(v),
            } => write!(f, "obs {name} = momentum({v})"),
            StmtKind::Obs {
                name,
                source: ObsSource::Vector(es),
            } => write!(f, "obs {name} = vec[{}]", join(es)),
            StmtKind::Ham { name, source } => match source {
                HamSource::Solve(v) => write!(f, "ham {name} = solve({v})"),
                HamSource::Closed(v) => write!(f, "ham {name} = closed({v})"),
                HamSource::Euler => write!(f, "ham {name} = euler()"),
            },
            StmtKind::Bracket {
                name,
                left,
                right,
                m,
            } => {
                write!(f, "bracket {name} = pb({left}, {right}")?;
                if let Some(m) = m {
                    write!(f, ", m={m}")?;
                }
                f.write_str(")")
            }
            StmtKind::Map { name, b, lambda } => {
                let rows: Vec<String> = b.iter().map(|r| format!("[{}]", join(r))).collect();
                write!(
                    f,
                    "map {name} = phi(B=[{}], lambda={lambda})",
                    rows.join(", ")
                )
            }
            StmtKind::Verify { suite, args } => {
                let a: Vec<String> = args.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "verify {suite}({})", a.join(","))
            }
            StmtKind::Emit { name } => write!(f, "emit {name}"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Canonical source text of a script, one statement per line.
pub fn render(script: &Script) -> String {
    script.to_string()
}
