//! Line-oriented script parser.

use std::collections::HashSet;

use super::ast::{HamSource, ObsSource, Script, Statement, StmtKind};
use super::cursor::Cursor;
use super::expr::{expr, Expr};
use crate::error::{Error, Result};
use crate::spaces::SpaceTag;
use crate::verify::SuiteId;

const VERIFY_ARGS: [&str; 5] = ["n", "k", "m", "trials", "seed"];

/// Names bound so far and whether a chart has been declared. Carried across
/// calls so the repl can parse one line at a time.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    bound: HashSet<String>,
    chart: bool,
}

impl Scope {
    /// Checks a statement against the scope and records what it binds.
    fn admit(&mut self, stmt: &Statement) -> Result<()> {
        if let Some(name) = stmt
            .kind
            .uses()
            .into_iter()
            .find(|u| !self.bound.contains(*u))
        {
            return Err(Error::UnboundName(name.to_string()));
        }
        if stmt.kind.needs_chart() && !self.chart {
            return Err(Error::Syntax {
                line: stmt.pos.line,
                col: stmt.pos.col,
                msg: "no chart declared before this statement".into(),
            });
        }
        if matches!(stmt.kind, StmtKind::Chart { .. }) {
            self.chart = true;
        }
        if let Some(name) = stmt.kind.binds() {
            self.bound.insert(name.to_string());
        }
        Ok(())
    }

    pub fn parse(&mut self, src: &str) -> Result<Script> {
        let mut c = Cursor::new(src);
        let mut statements = Vec::new();
        loop {
            c.skip_ws();
            if c.at_end() {
                break;
            }
            let stmt = statement(&mut c)?;
            c.skip_inline_ws();
            if !c.at_end() && !c.eat('\n') {
                return Err(c.error("expected end of line after statement"));
            }
            self.admit(&stmt)?;
            statements.push(stmt);
        }
        Ok(Script { statements })
    }
}

pub fn parse(src: &str) -> Result<Script> {
    Scope::default().parse(src)
}

fn ws(c: &mut Cursor) {
    c.skip_inline_ws();
}

fn keyword_arg(c: &mut Cursor, key: &str) -> Result<()> {
    ws(c);
    let at = c.pos();
    let got = c.ident()?;
    if got != key {
        return Err(Error::Syntax {
            line: at.line,
            col: at.col,
            msg: format!("expected `{key}`, found `{got}`"),
        });
    }
    ws(c);
    c.expect('=')?;
    ws(c);
    Ok(())
}

fn number(c: &mut Cursor) -> Result<usize> {
    let d = c.digits()?;
    d.parse().map_err(|_| c.error("integer out of range"))
}

fn binding(c: &mut Cursor) -> Result<String> {
    ws(c);
    let name = c.ident()?;
    ws(c);
    c.expect('=')?;
    ws(c);
    Ok(name)
}

/// `(name)` after a constructor word.
fn single_name(c: &mut Cursor) -> Result<String> {
    ws(c);
    c.expect('(')?;
    ws(c);
    let name = c.ident()?;
    ws(c);
    c.expect(')')?;
    Ok(name)
}

fn constructor(c: &mut Cursor, allowed: &[&str]) -> Result<String> {
    let at = c.pos();
    let word = c.ident()?;
    if allowed.contains(&word.as_str()) {
        Ok(word)
    } else {
        Err(Error::Syntax {
            line: at.line,
            col: at.col,
            msg: format!("expected one of {}, found `{word}`", allowed.join(", ")),
        })
    }
}

fn expr_list(c: &mut Cursor, close: char) -> Result<Vec<Expr>> {
    let mut out = Vec::new();
    c.skip_ws();
    if c.eat(close) {
        return Ok(out);
    }
    loop {
        out.push(expr(c)?);
        c.skip_ws();
        if c.eat(close) {
            return Ok(out);
        }
        c.expect(',')?;
        c.skip_ws();
    }
}

fn statement(c: &mut Cursor) -> Result<Statement> {
    let pos = c.pos();
    let word = c.ident()?;
    let kind = match word.as_str() {
        "chart" => {
            ws(c);
            let at = c.pos();
            let name = c.ident()?;
            let space = SpaceTag::parse(&name).ok_or(Error::Syntax {
                line: at.line,
                col: at.col,
                msg: format!("unknown space `{name}`"),
            })?;
            ws(c);
            c.expect('(')?;
            keyword_arg(c, "n")?;
            let n = number(c)?;
            let k = if space == SpaceTag::LM {
                0
            } else {
                ws(c);
                c.expect(',')?;
                keyword_arg(c, "k")?;
                number(c)?
            };
            ws(c);
            c.expect(')')?;
            StmtKind::Chart { space, n, k }
        }
        "let" => {
            let name = binding(c)?;
            constructor(c, &["vf"])?;
            ws(c);
            c.expect('{')?;
            let mut components = Vec::new();
            c.skip_ws();
            if !c.eat('}') {
                loop {
                    c.skip_ws();
                    let coord = c.ident()?;
                    ws(c);
                    c.expect(':')?;
                    components.push((coord, expr(c)?));
                    c.skip_ws();
                    if c.eat('}') {
                        break;
                    }
                    c.expect(',')?;
                }
            }
            StmtKind::Let { name, components }
        }
        "obs" => {
            let name = binding(c)?;
            let source = match constructor(c, &["momentum", "vec"])?.as_str() {
                "momentum" => ObsSource::Momentum(single_name(c)?),
                _ => {
                    ws(c);
                    c.expect('[')?;
                    ObsSource::Vector(expr_list(c, ']')?)
                }
            };
            StmtKind::Obs { name, source }
        }
        "ham" => {
            let name = binding(c)?;
            let source = match constructor(c, &["solve", "closed", "euler"])?.as_str() {
                "solve" => HamSource::Solve(single_name(c)?),
                "closed" => HamSource::Closed(single_name(c)?),
                _ => {
                    ws(c);
                    c.expect('(')?;
                    ws(c);
                    c.expect(')')?;
                    HamSource::Euler
                }
            };
            StmtKind::Ham { name, source }
        }
        "bracket" => {
            let name = binding(c)?;
            constructor(c, &["pb"])?;
            ws(c);
            c.expect('(')?;
            ws(c);
            let left = c.ident()?;
            ws(c);
            c.expect(',')?;
            ws(c);
            let right = c.ident()?;
            ws(c);
            let m = if c.eat(',') {
                keyword_arg(c, "m")?;
                Some(number(c)?)
            } else {
                None
            };
            ws(c);
            c.expect(')')?;
            StmtKind::Bracket {
                name,
                left,
                right,
                m,
            }
        }
        "map" => {
            let name = binding(c)?;
            constructor(c, &["phi"])?;
            ws(c);
            c.expect('(')?;
            keyword_arg(c, "B")?;
            c.expect('[')?;
            let mut b = Vec::new();
            c.skip_ws();
            if !c.eat(']') {
                loop {
                    c.skip_ws();
                    c.expect('[')?;
                    b.push(expr_list(c, ']')?);
                    c.skip_ws();
                    if c.eat(']') {
                        break;
                    }
                    c.expect(',')?;
                }
            }
            ws(c);
            c.expect(',')?;
            keyword_arg(c, "lambda")?;
            let lambda = expr(c)?;
            ws(c);
            c.expect(')')?;
            StmtKind::Map { name, b, lambda }
        }
        "verify" => {
            ws(c);
            let at = c.pos();
            let id = c.suite_ident()?;
            let suite = id.parse::<SuiteId>().map_err(|_| Error::Syntax {
                line: at.line,
                col: at.col,
                msg: format!("unknown verification suite `{id}`"),
            })?;
            ws(c);
            let mut args: Vec<(String, u64)> = Vec::new();
            if c.eat('(') {
                ws(c);
                if !c.eat(')') {
                    loop {
                        ws(c);
                        let at = c.pos();
                        let key = c.ident()?;
                        if !VERIFY_ARGS.contains(&key.as_str())
                            || args.iter().any(|(k, _)| *k == key)
                        {
                            return Err(Error::Syntax {
                                line: at.line,
                                col: at.col,
                                msg: format!("unexpected or repeated argument `{key}`"),
                            });
                        }
                        ws(c);
                        c.expect('=')?;
                        ws(c);
                        let d = c.digits()?;
                        args.push((key, d.parse().map_err(|_| c.error("integer out of range"))?));
                        ws(c);
                        if c.eat(')') {
                            break;
                        }
                        c.expect(',')?;
                    }
                }
            }
            StmtKind::Verify { suite, args }
        }
        "emit" => {
            ws(c);
            StmtKind::Emit { name: c.ident()? }
        }
        other => {
            return Err(Error::Syntax {
                line: pos.line,
                col: pos.col,
                msg: format!("unknown statement `{other}`"),
            })
        }
    };
    Ok(Statement { pos, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::ast::render;

    #[test]
    fn four_statement_script() {
        let s = parse("chart Z(n=2,k=1)\nlet v = vf{x1:1}\nobs f = momentum(v)\nham X = solve(f)")
            .unwrap();
        assert_eq!(s.statements.len(), 4);
        assert_eq!(s.statements[3].pos.line, 4);
        assert_eq!(
            s.statements[3].kind,
            StmtKind::Ham {
                name: "X".into(),
                source: HamSource::Solve("f".into())
            }
        );
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(parse("").unwrap().statements.is_empty());
        assert!(parse("# nothing\n\n   \n").unwrap().statements.is_empty());
    }

    #[test]
    fn unbound_name_reported_first() {
        assert_eq!(
            parse("ham X = solve(g)"),
            Err(Error::UnboundName("g".into()))
        );
        assert_eq!(
            parse("chart Z(n=1,k=1)\nemit q"),
            Err(Error::UnboundName("q".into()))
        );
    }

    #[test]
    fn chart_required() {
        assert!(matches!(
            parse("let v = vf{x1: 1}"),
            Err(Error::Syntax {
                line: 1,
                col: 1,
                ..
            })
        ));
        assert!(parse("verify thm71(n=1,k=1)").is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(
            parse("chart Q(n=1,k=1)"),
            Err(Error::Syntax {
                line: 1,
                col: 7,
                ..
            })
        ));
        assert!(matches!(
            parse("chart Z(n=1,k=1)\nobs f = moment(v)"),
            Err(Error::Syntax {
                line: 2,
                col: 9,
                ..
            })
        ));
        assert!(matches!(
            parse("verify thm71(q=1)"),
            Err(Error::Syntax {
                line: 1,
                col: 14,
                ..
            })
        ));
        assert!(matches!(
            parse("chart Z(n=1,k=1) emit"),
            Err(Error::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn render_round_trip() {
        let src = "chart LVY(n=2, k=1)  # frames\n\
                   let v = vf{x1: x1^2 - 1/2, y1: x2*y1}\n\
                   let w = vf{}\n\
                   obs f = momentum(v)\n\
                   obs g = vec[1, x1, -y1]\n\
                   ham X = closed(v)\n\
                   ham Y = solve(g)\n\
                   bracket b = pb(v, w, m=1)\n\
                   map m = phi(B=[[1], [-2/3]], lambda=3)\n\
                   verify rhoZ-welldef(n=2,k=1,trials=3)\n\
                   verify thm71\n\
                   chart LM(n=2)\n\
                   ham E = euler()\n\
                   emit m\n";
        let script = parse(src).unwrap();
        let text = render(&script);
        assert_eq!(parse(&text).unwrap(), script);
        assert_eq!(render(&parse(&text).unwrap()), text);
    }
}
