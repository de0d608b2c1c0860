//! Recursive-descent parser for the theory DSL.
//!
//! ```text
//! sort R;
//! op add : R, R -> R;
//! const c3 : R;
//! pred P : R, R;
//! axiom [x:R] |- add(x, c3) = add(c3, x);
//! schema distinct R { c0 c1 }
//! schema cover R { c0 c1 }
//! schema graph add { (c0, c0) -> c0; (c0, c1) -> c1; }
//! ```
//!
//! Formulas: `true`, `false`, `t1 = t2`, `P(t, ...)`, `and(f, ...)`,
//! `or(f, ...)`, `exists (y:R) f`. Variables are resolved against the
//! ambient context by name and stored positionally.

use super::ast::{Axiom, Formula, OpDecl, PredDecl, SchemaAxiom, Sequent, Signature, Term, Theory};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Arrow,
    Turnstile,
    Equals,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '.' {
                    ident.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(ident), line: tline, col: tcol });
            continue;
        }
        let tok = match c {
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBrack
            }
            ']' => {
                bump(&mut chars);
                Tok::RBrack
            }
            '{' => {
                bump(&mut chars);
                Tok::LBrace
            }
            '}' => {
                bump(&mut chars);
                Tok::RBrace
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            ';' => {
                bump(&mut chars);
                Tok::Semi
            }
            ':' => {
                bump(&mut chars);
                Tok::Colon
            }
            '=' => {
                bump(&mut chars);
                Tok::Equals
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        Tok::Arrow
                    }
                    _ => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            message: "expected '>' after '-'".into(),
                        })
                    }
                }
            }
            '|' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('-') => {
                        bump(&mut chars);
                        Tok::Turnstile
                    }
                    _ => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            message: "expected '-' after '|'".into(),
                        })
                    }
                }
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push(Spanned { tok, line: tline, col: tcol });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or_else(|| {
                self.toks.last().map(|s| (s.line, s.col + 1)).unwrap_or((1, 1))
            })
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, message: message.into() }
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let got = self.peek().cloned();
        if got.as_ref() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {tok:?}, found {got:?}")))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => Err(self.err(format!("expected identifier, found {other:?}"))),
        }
    }

    fn sort_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut sorts = vec![self.ident()?];
        while self.eat(Tok::Comma) {
            sorts.push(self.ident()?);
        }
        Ok(sorts)
    }

    // term := ident | ident "(" termlist ")"
    fn term(&mut self, ctx: &[(String, String)]) -> Result<Term, ParseError> {
        let name = self.ident()?;
        if self.eat(Tok::LParen) {
            let mut args = Vec::new();
            if !self.eat(Tok::RParen) {
                loop {
                    args.push(self.term(ctx)?);
                    if self.eat(Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            return Ok(Term::App(name, args));
        }
        // bare identifier: context variable shadows a constant
        if let Some(pos) = ctx.iter().position(|(n, _)| *n == name) {
            return Ok(Term::Var(pos));
        }
        Ok(Term::App(name, Vec::new()))
    }

    fn formula(&mut self, ctx: &[(String, String)]) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Ident(kw)) if kw == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(kw)) if kw == "false" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(kw)) if kw == "and" || kw == "or" => {
                let kw = kw.clone();
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let mut parts = Vec::new();
                if !self.eat(Tok::RParen) {
                    loop {
                        parts.push(self.formula(ctx)?);
                        if self.eat(Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(if kw == "and" { Formula::And(parts) } else { Formula::Or(parts) })
            }
            Some(Tok::Ident(kw)) if kw == "exists" => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let var = self.ident()?;
                self.expect(Tok::Colon)?;
                let sort = self.ident()?;
                self.expect(Tok::RParen)?;
                let mut inner = Vec::with_capacity(ctx.len() + 1);
                inner.push((var, sort.clone()));
                inner.extend_from_slice(ctx);
                let body = self.formula(&inner)?;
                Ok(Formula::Exists(sort, Box::new(body)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula(ctx)?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => {
                let t = self.term(ctx)?;
                if self.eat(Tok::Equals) {
                    let u = self.term(ctx)?;
                    return Ok(Formula::Eq(t, u));
                }
                // a bare application must be a predicate atom
                match t {
                    Term::App(name, args) if self.sig.pred(&name).is_some() => {
                        Ok(Formula::Pred(name, args))
                    }
                    _ => Err(self.err("expected a formula")),
                }
            }
        }
    }

    fn formula_list(&mut self, ctx: &[(String, String)], stop: &Tok) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == Some(stop) {
            return Ok(out);
        }
        loop {
            out.push(self.formula(ctx)?);
            if self.peek() == Some(stop) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn context(&mut self) -> Result<Vec<(String, String)>, ParseError> {
        self.expect(Tok::LBrack)?;
        let mut ctx = Vec::new();
        if self.eat(Tok::RBrack) {
            return Ok(ctx);
        }
        loop {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let sort = self.ident()?;
            ctx.push((name, sort));
            if self.eat(Tok::RBrack) {
                return Ok(ctx);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let ctx = self.context()?;
        let lhs = self.formula_list(&ctx, &Tok::Turnstile)?;
        self.expect(Tok::Turnstile)?;
        let rhs = self.formula_list(&ctx, &Tok::Semi)?;
        self.expect(Tok::Semi)?;
        Ok(Sequent { context: ctx.into_iter().map(|(_, s)| s).collect(), lhs, rhs })
    }

    fn schema_axiom(&mut self) -> Result<SchemaAxiom, ParseError> {
        let kind = self.ident()?;
        match kind.as_str() {
            "distinct" | "cover" => {
                let sort = self.ident()?;
                self.expect(Tok::LBrace)?;
                let mut constants = Vec::new();
                while !self.eat(Tok::RBrace) {
                    constants.push(self.ident()?);
                }
                Ok(if kind == "distinct" {
                    SchemaAxiom::DistinctConstants { sort, constants }
                } else {
                    SchemaAxiom::CoverByConstants { sort, constants }
                })
            }
            "graph" => {
                let op = self.ident()?;
                self.expect(Tok::LBrace)?;
                let mut rows = Vec::new();
                while !self.eat(Tok::RBrace) {
                    self.expect(Tok::LParen)?;
                    let mut inputs = Vec::new();
                    if !self.eat(Tok::RParen) {
                        loop {
                            inputs.push(self.ident()?);
                            if self.eat(Tok::RParen) {
                                break;
                            }
                            self.expect(Tok::Comma)?;
                        }
                    }
                    self.expect(Tok::Arrow)?;
                    let output = self.ident()?;
                    self.expect(Tok::Semi)?;
                    rows.push((inputs, output));
                }
                Ok(SchemaAxiom::OpGraph { op, rows })
            }
            other => Err(self.err(format!("unknown schema axiom kind: {other}"))),
        }
    }
}

/// Parses a complete theory. Declarations must precede the axioms that use
/// them (the printer emits them in that order).
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let toks = lex(text)?;
    let mut thy = Theory::default();
    let mut pos = 0usize;
    while pos < toks.len() {
        // snapshot the signature so declarations are visible to later items
        let sig = thy.signature.clone();
        let mut p = Parser { toks: toks.clone(), pos, sig: &sig };
        let keyword = p.ident()?;
        match keyword.as_str() {
            "sort" => {
                let name = p.ident()?;
                p.expect(Tok::Semi)?;
                thy.signature.sorts.push(name);
            }
            "op" => {
                let name = p.ident()?;
                p.expect(Tok::Colon)?;
                let args = p.sort_list()?;
                p.expect(Tok::Arrow)?;
                let result = p.ident()?;
                p.expect(Tok::Semi)?;
                thy.signature.operations.push(OpDecl { name, args, result });
            }
            "const" => {
                let name = p.ident()?;
                p.expect(Tok::Colon)?;
                let result = p.ident()?;
                p.expect(Tok::Semi)?;
                thy.signature.operations.push(OpDecl { name, args: Vec::new(), result });
            }
            "pred" => {
                let name = p.ident()?;
                let args = if p.eat(Tok::Colon) { p.sort_list()? } else { Vec::new() };
                p.expect(Tok::Semi)?;
                thy.signature.predicates.push(PredDecl { name, args });
            }
            "axiom" => {
                let seq = p.sequent()?;
                thy.axioms.push(Axiom::Sequent(seq));
            }
            "schema" => {
                let ax = p.schema_axiom()?;
                thy.axioms.push(Axiom::Schema(ax));
            }
            other => {
                return Err(p.err(format!("expected a declaration or axiom, found '{other}'")))
            }
        }
        pos = p.pos;
    }
    Ok(thy)
}

/// Parses one formula against a signature and a named context (for
/// interpretation files and tests).
pub fn parse_formula_in(
    sig: &Signature,
    ctx: &[(String, String)],
    text: &str,
) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, sig };
    let f = p.formula(ctx)?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

/// Parses one term against a named context.
pub fn parse_term_in(
    sig: &Signature,
    ctx: &[(String, String)],
    text: &str,
) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, sig };
    let t = p.term(ctx)?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}
