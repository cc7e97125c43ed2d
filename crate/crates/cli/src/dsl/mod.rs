//! The session language.
//!
//! ```text
//! file   := decl* opdef*
//! decl   := ("base" | "fiber" | "param") ident+ ";"
//! opdef  := "op" ident "=" "[" expr ("," expr)* "]" ";"
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | atom ("^" int)?
//! atom   := int | ident | ident "[" int ("," int)* "]" | "(" expr ")"
//! ```
//!
//! Jet variables are written `u_xxy` (fiber name, underscore, one base
//! letter per derivative) or `u[2,1]` (explicit multi-index). A bare fiber
//! name is the order-zero jet. Division is only by nonzero constants.

mod lexer;
mod parser;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use jetcalc_core::{JetCoordinate, MultiIndex, PolyExpr, Rational, Signature, VectorOperator};
use num_traits::Zero;

use parser::{Ast, DeclKind, Expr, Parser};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    Undeclared,
    Duplicate,
    Semantic,
}

impl ParseErrorKind {
    fn label(&self) -> &'static str {
        match self {
            Self::Lexical => "lexical error",
            Self::Syntax => "syntax error",
            Self::Undeclared => "undeclared symbol",
            Self::Duplicate => "duplicate name",
            Self::Semantic => "invalid session",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {}: {message}", kind.label())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind,
            pos,
            message: message.into(),
        }
    }
}

/// Declarations plus named operators, in definition order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    signature: Arc<Signature>,
    ops: Vec<(String, VectorOperator)>,
}

impl Session {
    pub fn new(signature: Arc<Signature>) -> Self {
        Self {
            signature,
            ops: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn get(&self, name: &str) -> Option<&VectorOperator> {
        self.ops.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn operators(&self) -> &[(String, VectorOperator)] {
        &self.ops
    }

    /// Adds or replaces an operator.
    pub fn define(&mut self, name: &str, op: VectorOperator) {
        match self.ops.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = op,
            None => self.ops.push((name.to_string(), op)),
        }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = &self.signature;
        writeln!(f, "base {};", sig.base_names().join(" "))?;
        writeln!(f, "fiber {};", sig.fiber_names().join(" "))?;
        if !sig.param_names().is_empty() {
            writeln!(f, "param {};", sig.param_names().join(" "))?;
        }
        for (name, op) in &self.ops {
            let comps: Vec<String> = op.components().iter().map(|c| c.to_string()).collect();
            writeln!(f, "op {name} = [{}];", comps.join(", "))?;
        }
        Ok(())
    }
}

pub fn parse(src: &str) -> Result<Session, ParseError> {
    let (toks, end) = lexer::tokenize(src)?;
    let ast = Parser::new(toks, end).file()?;
    build(&ast, end)
}

/// Parses only declarations; operator definitions are an error.
pub fn parse_declarations(src: &str) -> Result<Arc<Signature>, ParseError> {
    let (toks, end) = lexer::tokenize(src)?;
    let ast = Parser::new(toks, end).file()?;
    if let Some(op) = ast.ops.first() {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            op.pos,
            "expected declarations only",
        ));
    }
    signature(&ast, end)
}

/// Parses one expression over `sig`.
pub fn parse_expr(src: &str, sig: &Arc<Signature>) -> Result<PolyExpr, ParseError> {
    let (toks, end) = lexer::tokenize(src)?;
    let expr = Parser::new(toks, end).lone_expr()?;
    lower(&expr, sig)
}

/// Parses an operator given as a list of component expressions.
pub fn parse_operator<S: AsRef<str>>(
    components: &[S],
    sig: &Arc<Signature>,
) -> Result<VectorOperator, ParseError> {
    if components.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            Pos { line: 1, col: 1 },
            "an operator needs at least one component",
        ));
    }
    let comps = components
        .iter()
        .map(|c| parse_expr(c.as_ref(), sig))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorOperator::new(sig, comps).expect("components share the signature"))
}

fn signature(ast: &Ast, end: Pos) -> Result<Arc<Signature>, ParseError> {
    let (mut base, mut fiber, mut params) = (Vec::new(), Vec::new(), Vec::new());
    let mut seen = HashSet::new();
    for decl in &ast.decls {
        for (name, pos) in &decl.names {
            if !seen.insert(name.as_str()) {
                return Err(ParseError::new(
                    ParseErrorKind::Duplicate,
                    *pos,
                    format!("`{name}` is declared twice"),
                ));
            }
            if name.contains('_') {
                return Err(ParseError::new(
                    ParseErrorKind::Semantic,
                    *pos,
                    format!("declared name `{name}` must not contain `_`"),
                ));
            }
            match decl.kind {
                DeclKind::Base => base.push(name.clone()),
                DeclKind::Fiber => fiber.push(name.clone()),
                DeclKind::Param => params.push(name.clone()),
            }
        }
    }
    let pos = ast.ops.first().map_or(end, |o| o.pos);
    if base.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            pos,
            "no base variables declared",
        ));
    }
    if fiber.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            pos,
            "no fiber variables declared",
        ));
    }
    Signature::new(base, fiber, params)
        .map_err(|e| ParseError::new(ParseErrorKind::Semantic, pos, e.to_string()))
}

fn build(ast: &Ast, end: Pos) -> Result<Session, ParseError> {
    let sig = signature(ast, end)?;
    let mut session = Session::new(sig.clone());
    for op in &ast.ops {
        if session.get(&op.name).is_some() {
            return Err(ParseError::new(
                ParseErrorKind::Duplicate,
                op.pos,
                format!("operator `{}` is defined twice", op.name),
            ));
        }
        let comps = op
            .components
            .iter()
            .map(|e| lower(e, &sig))
            .collect::<Result<Vec<_>, _>>()?;
        session.define(
            &op.name,
            VectorOperator::new(&sig, comps).expect("components share the signature"),
        );
    }
    Ok(session)
}

fn resolve(name: &str, pos: Pos, sig: &Arc<Signature>) -> Result<JetCoordinate, ParseError> {
    let undeclared = || {
        ParseError::new(
            ParseErrorKind::Undeclared,
            pos,
            format!("`{name}` is not declared"),
        )
    };
    if let Some(i) = sig.base_index(name) {
        return Ok(JetCoordinate::base(i));
    }
    if let Some(k) = sig.param_index(name) {
        return Ok(JetCoordinate::param(k));
    }
    if let Some(j) = sig.fiber_index(name) {
        return Ok(JetCoordinate::jet(j, MultiIndex::zero(sig.n())));
    }
    let (fib, letters) = name.rsplit_once('_').ok_or_else(undeclared)?;
    let j = sig.fiber_index(fib).ok_or_else(undeclared)?;
    if letters.is_empty() {
        return Err(undeclared());
    }
    let mut exps = vec![0u32; sig.n()];
    for ch in letters.chars() {
        let i = sig
            .base_names()
            .iter()
            .position(|b| b.len() == 1 && b.starts_with(ch))
            .ok_or_else(|| {
                ParseError::new(
                    ParseErrorKind::Undeclared,
                    pos,
                    format!("`{ch}` in `{name}` is not a one-letter base variable"),
                )
            })?;
        exps[i] += 1;
    }
    Ok(JetCoordinate::jet(
        j,
        MultiIndex::new(&exps).expect("n is in range"),
    ))
}

fn lower(e: &Expr, sig: &Arc<Signature>) -> Result<PolyExpr, ParseError> {
    Ok(match e {
        Expr::Int(n) => PolyExpr::constant(sig, Rational::from_integer(n.clone())),
        Expr::Name { name, pos } => {
            PolyExpr::coord(sig, resolve(name, *pos, sig)?).expect("resolved in the signature")
        }
        Expr::Indexed { name, index, pos } => {
            let j = sig.fiber_index(name).ok_or_else(|| {
                ParseError::new(
                    ParseErrorKind::Undeclared,
                    *pos,
                    format!("`{name}` is not a declared fiber variable"),
                )
            })?;
            if index.len() != sig.n() {
                return Err(ParseError::new(
                    ParseErrorKind::Semantic,
                    *pos,
                    format!(
                        "multi-index of `{name}` has {} entries, expected {}",
                        index.len(),
                        sig.n()
                    ),
                ));
            }
            let sigma = MultiIndex::new(index).expect("length checked");
            PolyExpr::coord(sig, JetCoordinate::jet(j, sigma)).expect("in range")
        }
        Expr::Neg(a) => -&lower(a, sig)?,
        Expr::Add(a, b) => &lower(a, sig)? + &lower(b, sig)?,
        Expr::Sub(a, b) => &lower(a, sig)? - &lower(b, sig)?,
        Expr::Mul(a, b) => &lower(a, sig)? * &lower(b, sig)?,
        Expr::Div(a, b, pos) => {
            let d = lower(b, sig)?.as_constant().ok_or_else(|| {
                ParseError::new(
                    ParseErrorKind::Semantic,
                    *pos,
                    "division is only by constants",
                )
            })?;
            if d.is_zero() {
                return Err(ParseError::new(
                    ParseErrorKind::Semantic,
                    *pos,
                    "division by zero",
                ));
            }
            lower(a, sig)?.scale(&d.recip())
        }
        Expr::Pow(a, k) => lower(a, sig)?.pow(*k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use jetcalc_core::jacobi_bracket;

    const INTRO: &str = "base x; fiber u; param c; op F = [u_x^2]; op G = [u_x + c*x];";

    #[test]
    fn intro_session() {
        let s = parse(INTRO).unwrap();
        let sig = s.signature().clone();
        let p = PolyExpr::jet(&sig, 0, &[1]).unwrap();
        assert_eq!(s.get("F").unwrap().component(0), &(&p * &p));
        let bracket = jacobi_bracket(s.get("F").unwrap(), s.get("G").unwrap()).unwrap();
        assert_eq!(bracket.to_string(), "2*c*u_x");
    }

    #[test]
    fn unbalanced_bracket() {
        let err = parse("op F = [u_x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.message.contains("end of input"), "{err}");
        assert_eq!(err.pos, Pos { line: 1, col: 12 });
    }

    #[test]
    fn undeclared_symbol() {
        let err = parse("base x; fiber u; op F = [v];").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Undeclared);
        assert_eq!(err.pos, Pos { line: 1, col: 26 });
        assert!(err.to_string().contains("`v`"));
        let err = parse("base x; fiber u; op F = [u_y];").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Undeclared);
    }

    #[test]
    fn duplicates() {
        let err = parse("base x; fiber x; op F = [x];").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Duplicate);
        let err = parse("base x; fiber u; op F = [u]; op F = [x];").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Duplicate);
        assert_eq!(err.pos, Pos { line: 1, col: 33 });
    }

    #[test]
    fn jet_spellings_agree() {
        let s =
            parse("base x y; fiber u v; op A = [u_xxy, v_yx]; op B = [u[2,1], v[1,1]];").unwrap();
        assert_eq!(s.get("A"), s.get("B"));
        let err = parse("base x y; fiber u; op A = [u[1]];").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Semantic);
    }

    #[test]
    fn arithmetic() {
        let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
        let e = parse_expr("(u + 1)^2 / 2 - 1/2*u^2 - -u", &sig).unwrap();
        assert_eq!(e.to_string(), "2*u + 1/2");
        assert_eq!(parse_expr("-u^2", &sig).unwrap().to_string(), "-u^2");
        assert!(parse_expr("u / x", &sig).is_err());
        assert!(parse_expr("u / (c - c)", &sig).is_err());
        assert!(parse_expr("u^2^2", &sig).is_err());
        assert!(parse_expr("u u", &sig).is_err());
    }

    #[test]
    fn declarations_come_first() {
        let err = parse("base x; fiber u; op F = [u]; param c;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(parse("fiber u; op F = [u];").is_err());
    }

    #[test]
    fn round_trip() {
        let s = parse(INTRO).unwrap();
        let printed = s.to_string();
        assert_eq!(
            printed,
            "base x;\nfiber u;\nparam c;\nop F = [u_x^2];\nop G = [u_x + c*x];\n"
        );
        assert_eq!(parse(&printed).unwrap(), s);
    }

    #[test]
    fn long_base_names_round_trip() {
        let s = parse("base t xi; fiber w; op K = [w[2,1]*t - 3/4*w[0,1]^2];").unwrap();
        let printed = s.to_string();
        assert!(printed.contains("w[2,1]"), "{printed}");
        assert_eq!(parse(&printed).unwrap(), s);
    }
}
