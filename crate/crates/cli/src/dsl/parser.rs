use num_bigint::BigInt;

use super::lexer::{Tok, Token};
use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Name {
        name: String,
        pos: Pos,
    },
    Indexed {
        name: String,
        index: Vec<u32>,
        pos: Pos,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Base,
    Fiber,
    Param,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub names: Vec<(String, Pos)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDef {
    pub name: String,
    pub pos: Pos,
    pub components: Vec<Expr>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ast {
    pub decls: Vec<Decl>,
    pub ops: Vec<OpDef>,
}

const MAX_EXPONENT: u32 = 256;

pub struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: Pos,
}

impl Parser {
    pub fn new(toks: Vec<Token>, end: Pos) -> Self {
        Self { toks, at: 0, end }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let msg = match self.toks.get(self.at) {
            Some(t) => format!("unexpected {}, expected {expected}", t.tok.describe()),
            None => format!("unexpected end of input, expected {expected}"),
        };
        ParseError::new(ParseErrorKind::Syntax, self.pos(), msg)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat(&tok) {
            Ok(pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok((s, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn small_int(&mut self, what: &str) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v = u32::try_from(n).map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::Syntax,
                        pos,
                        format!("{what} `{n}` is too large"),
                    )
                })?;
                self.at += 1;
                Ok(v)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// `file := decl* opdef*`
    pub fn file(&mut self) -> Result<Ast, ParseError> {
        let mut ast = Ast::default();
        while let Some(tok) = self.peek() {
            let keyword = match tok {
                Tok::Ident(k) => k.as_str(),
                _ => return Err(self.unexpected("`base`, `fiber`, `param` or `op`")),
            };
            let kind = match keyword {
                "base" => Some(DeclKind::Base),
                "fiber" => Some(DeclKind::Fiber),
                "param" => Some(DeclKind::Param),
                "op" => None,
                _ => return Err(self.unexpected("`base`, `fiber`, `param` or `op`")),
            };
            match kind {
                Some(kind) => {
                    if !ast.ops.is_empty() {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax,
                            self.pos(),
                            "declarations must precede operator definitions",
                        ));
                    }
                    self.at += 1;
                    let mut names = vec![self.ident()?];
                    while matches!(self.peek(), Some(Tok::Ident(_))) {
                        names.push(self.ident()?);
                    }
                    self.expect(Tok::Semi)?;
                    ast.decls.push(Decl { kind, names });
                }
                None => {
                    self.at += 1;
                    ast.ops.push(self.opdef()?);
                }
            }
        }
        Ok(ast)
    }

    /// `opdef := "op" ident "=" "[" expr ("," expr)* "]" ";"`
    fn opdef(&mut self) -> Result<OpDef, ParseError> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBracket)?;
        let mut components = vec![self.expr()?];
        loop {
            if self.eat(&Tok::Comma) {
                components.push(self.expr()?);
            } else if self.eat(&Tok::RBracket) {
                break;
            } else {
                return Err(self.unexpected("`,` or `]`"));
            }
        }
        self.expect(Tok::Semi)?;
        Ok(OpDef {
            name,
            pos,
            components,
        })
    }

    /// A single expression spanning all remaining tokens.
    pub fn lone_expr(&mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return Err(self.unexpected("an operator or end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Slash) {
                let pos = self.pos();
                self.at += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat(&Tok::Plus) {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let pos = self.pos();
        let k = self.small_int("a non-negative integer exponent")?;
        if k > MAX_EXPONENT {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                pos,
                format!("exponent {k} exceeds {MAX_EXPONENT}"),
            ));
        }
        if self.peek() == Some(&Tok::Caret) {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                self.pos(),
                "chained exponents need parentheses",
            ));
        }
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                // `u[2,1]` unless the bracket opens an operator list
                if self.peek() == Some(&Tok::LBracket)
                    && matches!(
                        self.toks.get(self.at + 1).map(|t| &t.tok),
                        Some(Tok::Int(_))
                    )
                {
                    self.at += 1;
                    let mut index = vec![self.small_int("an index")?];
                    while self.eat(&Tok::Comma) {
                        index.push(self.small_int("an index")?);
                    }
                    self.expect(Tok::RBracket)?;
                    return Ok(Expr::Indexed { name, index, pos });
                }
                Ok(Expr::Name { name, pos })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
