//! Parser for the expression text grammar used by all loaders.
//!
//! Infix `+ - * / ^`, function calls `sin(...)`, `pow(e, k)` as integer
//! powers, jet coordinates `y[i;01]` / `c[a;01]` by field index or
//! `name[;01]` by declared field name, base coordinates by declared name or
//! `x0..`, and parameters by declared name. Multi-index characters are
//! digits or single-character base-coordinate names. Canonical printing
//! round-trips through this grammar.

use crate::expr::{Atom, Expression, ExprError, FuncKind};
use crate::index::MultiIndex;
use crate::jet::JetModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at column {col}: {msg}")]
pub struct ParseError {
    /// 1-based character offset into the parsed string.
    pub col: usize,
    pub msg: String,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    depth: usize,
    model: &'a JetModel,
}

const MAX_DEPTH: usize = 128;

pub fn parse_expr(model: &JetModel, src: &str) -> Result<Expression, ParseError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        depth: 0,
        model,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    model
        .validate_expr(&e)
        .map_err(|er| ParseError {
            col: 1,
            msg: er.to_string(),
        })?;
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            col: self.pos + 1,
            msg: msg.to_string(),
        }
    }

    fn expr_err(&self, e: ExprError) -> ParseError {
        ParseError {
            col: self.pos + 1,
            msg: e.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|e| self.expr_err(e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nests too deeply"));
        }
        Ok(())
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.enter()?;
                let e = self.factor();
                self.depth -= 1;
                Ok(e?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.enter()?;
                let e = self.factor();
                self.depth -= 1;
                e
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            return base.pow(e as i64).map_err(|er| self.expr_err(er));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let neg = self.eat('-');
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let v: i32 = digits
            .parse()
            .map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn primary(&mut self) -> Result<Expression, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                self.enter()?;
                let e = self.expr();
                self.depth -= 1;
                let e = e?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected character `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let n: num_bigint::BigInt = digits
            .parse()
            .map_err(|_| self.err("bad integer literal"))?;
        Ok(Expression::from_rat(crate::expr::Rat::from(n)))
    }

    fn ident(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();

        // function call or pow(e, k)
        if self.peek() == Some('(') {
            if name == "pow" {
                self.pos += 1;
                self.enter()?;
                let arg = self.expr();
                self.depth -= 1;
                let arg = arg?;
                self.expect(',')?;
                let k = self.integer()?;
                self.expect(')')?;
                return arg.pow(k as i64).map_err(|e| self.expr_err(e));
            }
            if let Some(kind) = FuncKind::from_name(&name) {
                self.pos += 1;
                self.enter()?;
                let arg = self.expr();
                self.depth -= 1;
                let arg = arg?;
                self.expect(')')?;
                return Expression::func(kind, arg).map_err(|e| self.expr_err(e));
            }
            return Err(self.err(&format!("unknown function `{name}`")));
        }

        // jet coordinate with explicit bracket
        if self.peek() == Some('[') {
            return self.jet_bracket(&name);
        }

        // plain names: base coordinate, parameter, or order-0 field
        if let Some(l) = self.model.base_names().iter().position(|b| *b == name) {
            return Ok(Expression::base(l as u32));
        }
        if let Some(p) = self.model.param_names().iter().position(|q| *q == name) {
            return Ok(Expression::param(p as u32));
        }
        if let Some(i) = self.model.even_names().iter().position(|f| *f == name) {
            return Ok(Expression::jet(
                crate::expr::Field::Even(i as u32),
                MultiIndex::empty(),
            ));
        }
        if let Some(a) = self.model.odd_names().iter().position(|f| *f == name) {
            return Ok(Expression::jet(
                crate::expr::Field::Odd(a as u32),
                MultiIndex::empty(),
            ));
        }
        Err(self.err(&format!("undeclared field {name}")))
    }

    fn jet_bracket(&mut self, head: &str) -> Result<Expression, ParseError> {
        self.expect('[')?;
        // the part before `;` is empty (named field) or an integer index
        let mut index_digits = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            index_digits.push(self.bump().unwrap());
        }
        self.expect(';')?;
        let mut entries = Vec::new();
        loop {
            match self.peek() {
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                Some(c) if c.is_ascii_digit() => {
                    self.pos += 1;
                    entries.push(c as u8 - b'0');
                }
                Some(c) if c.is_alphabetic() => {
                    self.pos += 1;
                    let s = c.to_string();
                    match self.model.base_names().iter().position(|b| *b == s) {
                        Some(l) => entries.push(l as u8),
                        None => {
                            return Err(self.err(&format!(
                                "`{c}` is not a base coordinate name"
                            )))
                        }
                    }
                }
                Some(c) => return Err(self.err(&format!("bad multi-index character `{c}`"))),
                None => return Err(self.err("unterminated multi-index")),
            }
        }
        let mi = MultiIndex::from_slice(&entries);
        for l in mi.iter() {
            if l as u32 >= self.model.base_dim() {
                return Err(self.err(&format!("base index {l} out of range")));
            }
        }
        let field = if index_digits.is_empty() {
            if let Some(i) = self.model.even_names().iter().position(|f| *f == head) {
                crate::expr::Field::Even(i as u32)
            } else if let Some(a) = self.model.odd_names().iter().position(|f| *f == head) {
                crate::expr::Field::Odd(a as u32)
            } else {
                return Err(self.err(&format!("undeclared field {head}")));
            }
        } else {
            let idx: u32 = index_digits
                .parse()
                .map_err(|_| self.err("field index out of range"))?;
            match head {
                "y" if idx < self.model.n_even() => crate::expr::Field::Even(idx),
                "c" if idx < self.model.n_odd() => crate::expr::Field::Odd(idx),
                _ => return Err(self.err(&format!("undeclared field {head}[{idx};...]"))),
            }
        };
        let _ = Atom::jet(field, mi.clone());
        Ok(Expression::jet(field, mi))
    }
}
