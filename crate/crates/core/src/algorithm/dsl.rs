//! The guarded-rule language.
//!
//! ```text
//! # comments run to end of line
//! var l:1;
//! var k:3;
//! up:   l == 0 && k > P0.k && k > P1.k -> l := 1
//! down: l == 1 && (k <= P0.k || k <= P1.k) -> l := 0
//! ```
//!
//! A program declares bit-fields of the node's register (`var name:bits;`,
//! first declaration in the least-significant bits) followed by rules
//! `label: guard -> assign {; assign}`. Expressions may read the node's own
//! fields by name, a neighbor's field as `P<k>.name` (`L<k>` is accepted as
//! a synonym), the identifier `ID`, integer literals and `true`/`false`.
//! Operators, loosest first: `||`, `&&`, comparisons (`== != < <= > >=`,
//! non-associative), `+ -`, `* %`, unary `!`.
//!
//! Arithmetic is on 128-bit signed integers with wrapping; `%` is Euclidean
//! and `x % 0 = x`. An assignment stores its value modulo `2^width`. All
//! assignments of one command read the old state.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use thiserror::Error;

use crate::{Ident, State, MAX_WIDTH};

/// A bit-field of the register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    /// Field name.
    pub name: String,
    /// Bit offset from the least-significant bit.
    pub offset: u32,
    /// Width in bits.
    pub width: u32,
}

impl VarDecl {
    fn read(&self, state: State) -> State {
        (state >> self.offset) & crate::model::state_mask(self.width)
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// Expression tree. Variable references are indices into the declarations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Integer literal.
    Int(u64),
    /// `true` / `false`.
    Bool(bool),
    /// The node's identifier.
    Id,
    /// One of the node's own fields.
    Own(usize),
    /// A field of the neighbor behind `port`.
    Neighbor {
        /// Port index.
        port: usize,
        /// Field index.
        var: usize,
    },
    /// Boolean negation.
    Not(Box<Expr>),
    /// Binary operation.
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Not(e) => e.visit(f),
            Expr::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}

/// `field := value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assign {
    /// Target field index.
    pub var: usize,
    /// Right-hand side (integer typed).
    pub value: Expr,
}

/// `label: guard -> command`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    /// Name used in reports.
    pub label: String,
    /// Boolean guard.
    pub guard: Expr,
    /// Simultaneous assignments.
    pub command: Vec<Assign>,
}

/// A parsed program: field layout plus ordered rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSet {
    vars: Vec<VarDecl>,
    rules: Vec<Rule>,
}

/// Inputs visible to a rule.
pub(crate) struct Env<'a> {
    pub id: Ident,
    pub own: State,
    pub view: &'a [State],
}

impl RuleSet {
    /// Field declarations in layout order.
    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    /// Rules in priority order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Sum of declared widths.
    pub fn width(&self) -> u32 {
        self.vars.iter().map(|v| v.width).sum()
    }

    /// Looks up a field by name.
    pub fn var(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| v.name == name)
    }

    /// Highest port index referenced, if any.
    pub fn max_port(&self) -> Option<usize> {
        let mut max = None;
        self.for_each_expr(|e| {
            if let Expr::Neighbor { port, .. } = e {
                max = Some(max.map_or(*port, |m: usize| m.max(*port)));
            }
        });
        max
    }

    /// First rule (label, port) reading a port `>= degree`.
    pub fn port_beyond(&self, degree: usize) -> Option<(&str, usize)> {
        self.rules.iter().find_map(|rule| {
            let mut bad = None;
            let mut check = |e: &Expr| {
                if let Expr::Neighbor { port, .. } = e {
                    if *port >= degree && bad.is_none() {
                        bad = Some(*port);
                    }
                }
            };
            rule.guard.visit(&mut check);
            for a in &rule.command {
                a.value.visit(&mut check);
            }
            bad.map(|p| (rule.label.as_str(), p))
        })
    }

    /// True iff some guard or command reads `ID`.
    pub fn mentions_id(&self) -> bool {
        let mut found = false;
        self.for_each_expr(|e| found |= matches!(e, Expr::Id));
        found
    }

    fn for_each_expr(&self, mut f: impl FnMut(&Expr)) {
        for rule in &self.rules {
            rule.guard.visit(&mut f);
            for a in &rule.command {
                a.value.visit(&mut f);
            }
        }
    }

    fn eval(&self, e: &Expr, env: &Env<'_>) -> i128 {
        match e {
            Expr::Int(v) => *v as i128,
            Expr::Bool(b) => *b as i128,
            Expr::Id => env.id as i128,
            Expr::Own(v) => self.vars[*v].read(env.own) as i128,
            Expr::Neighbor { port, var } => self.vars[*var].read(env.view[*port]) as i128,
            Expr::Not(e) => (self.eval(e, env) == 0) as i128,
            Expr::Binary(op, a, b) => {
                let x = self.eval(a, env);
                match op {
                    BinOp::And => return (x != 0 && self.eval(b, env) != 0) as i128,
                    BinOp::Or => return (x != 0 || self.eval(b, env) != 0) as i128,
                    _ => {}
                }
                let y = self.eval(b, env);
                match op {
                    BinOp::Add => x.wrapping_add(y),
                    BinOp::Sub => x.wrapping_sub(y),
                    BinOp::Mul => x.wrapping_mul(y),
                    BinOp::Mod => {
                        if y == 0 {
                            x
                        } else {
                            x.rem_euclid(y.wrapping_abs())
                        }
                    }
                    BinOp::Eq => (x == y) as i128,
                    BinOp::Ne => (x != y) as i128,
                    BinOp::Lt => (x < y) as i128,
                    BinOp::Le => (x <= y) as i128,
                    BinOp::Gt => (x > y) as i128,
                    BinOp::Ge => (x >= y) as i128,
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        }
    }

    /// Index of the first rule whose guard holds.
    pub(crate) fn first_enabled(&self, env: &Env<'_>) -> Option<usize> {
        self.rules.iter().position(|r| self.eval(&r.guard, env) != 0)
    }

    /// Applies rule `index`'s command to `env.own`.
    pub(crate) fn fire(&self, index: usize, env: &Env<'_>) -> State {
        let values: Vec<(usize, i128)> = self.rules[index]
            .command
            .iter()
            .map(|a| (a.var, self.eval(&a.value, env)))
            .collect();
        values.into_iter().fold(env.own, |state, (var, value)| {
            let decl = &self.vars[var];
            let field = value.rem_euclid(1i128 << decl.width) as State;
            let mask = crate::model::state_mask(decl.width) << decl.offset;
            (state & !mask) | (field << decl.offset)
        })
    }
}

/// Where and why parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    /// 1-based line.
    pub line: usize,
    /// 1-based column.
    pub column: usize,
    /// What went wrong.
    pub kind: ParseErrorKind,
}

/// Parse failure categories.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[allow(missing_docs)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("integer literal out of range")]
    IntOverflow,
    #[error("undeclared variable {0:?}")]
    UndeclaredVariable(String),
    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),
    #[error("rule label {0:?} used twice")]
    DuplicateLabel(String),
    #[error("{0:?} is reserved")]
    Reserved(String),
    #[error("declarations must precede rules")]
    LateDeclaration,
    #[error("field width must be between 1 and {MAX_WIDTH}, got {0}")]
    BadWidth(u64),
    #[error("bit-width overflow: fields need {required} bits but the register has {declared}")]
    WidthOverflow { declared: u32, required: u32 },
    #[error("fields cover {required} bits but the register has {declared}")]
    WidthShortfall { declared: u32, required: u32 },
    #[error("port {port} does not exist on a degree-{degree} node")]
    NoSuchPort { port: usize, degree: usize },
    #[error("type error: expected {expected} expression")]
    Type { expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Colon,
    Assign,
    Semi,
    Arrow,
    LParen,
    RParen,
    Dot,
    Op(BinOp),
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Int(v) => write!(f, "{v}"),
            Tok::Colon => f.write_str("':'"),
            Tok::Assign => f.write_str("':='"),
            Tok::Semi => f.write_str("';'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Op(op) => write!(f, "'{}'", op.symbol()),
            Tok::Bang => f.write_str("'!'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let err = |kind| ParseError { line: l, column: col, kind };
        let mut bump = |chars: &mut core::iter::Peekable<core::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                s.push(bump(&mut chars).unwrap());
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                bump(&mut chars);
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as u64))
                    .ok_or(err(ParseErrorKind::IntOverflow))?;
            }
            Tok::Int(v)
        } else {
            bump(&mut chars);
            let next = chars.peek().copied();
            let (tok, pair) = match (c, next) {
                (':', Some('=')) => (Tok::Assign, true),
                (':', _) => (Tok::Colon, false),
                (';', _) => (Tok::Semi, false),
                ('-', Some('>')) => (Tok::Arrow, true),
                ('-', _) => (Tok::Op(BinOp::Sub), false),
                ('+', _) => (Tok::Op(BinOp::Add), false),
                ('*', _) => (Tok::Op(BinOp::Mul), false),
                ('%', _) => (Tok::Op(BinOp::Mod), false),
                ('(', _) => (Tok::LParen, false),
                (')', _) => (Tok::RParen, false),
                ('.', _) => (Tok::Dot, false),
                ('=', Some('=')) => (Tok::Op(BinOp::Eq), true),
                ('!', Some('=')) => (Tok::Op(BinOp::Ne), true),
                ('!', _) => (Tok::Bang, false),
                ('<', Some('=')) => (Tok::Op(BinOp::Le), true),
                ('<', _) => (Tok::Op(BinOp::Lt), false),
                ('>', Some('=')) => (Tok::Op(BinOp::Ge), true),
                ('>', _) => (Tok::Op(BinOp::Gt), false),
                ('&', Some('&')) => (Tok::Op(BinOp::And), true),
                ('|', Some('|')) => (Tok::Op(BinOp::Or), true),
                _ => return Err(err(ParseErrorKind::UnexpectedChar(c))),
            };
            if pair {
                bump(&mut chars);
            }
            tok
        };
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "integer",
            Ty::Bool => "boolean",
        }
    }
}

const RESERVED: [&str; 4] = ["var", "ID", "true", "false"];

/// `P3` / `L3` → `Some(3)`.
fn port_token(s: &str) -> Option<usize> {
    let digits = s.strip_prefix('P').or_else(|| s.strip_prefix('L'))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    vars: Vec<VarDecl>,
    width: Option<u32>,
    degree: Option<usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError { line: t.line, column: t.column, kind }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::Unexpected { expected: expected.into(), found: self.peek().to_string() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    fn program(mut self) -> Result<RuleSet, ParseError> {
        let mut rules: Vec<Rule> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Semi => {
                    self.next();
                }
                Tok::Ident(s) if s == "var" => {
                    if !rules.is_empty() {
                        return Err(self.error_here(ParseErrorKind::LateDeclaration));
                    }
                    self.declaration()?;
                }
                Tok::Ident(_) => {
                    let start = self.pos;
                    let rule = self.rule()?;
                    if rules.iter().any(|r| r.label == rule.label) {
                        let t = &self.toks[start];
                        return Err(ParseError {
                            line: t.line,
                            column: t.column,
                            kind: ParseErrorKind::DuplicateLabel(rule.label),
                        });
                    }
                    rules.push(rule);
                }
                _ => return Err(self.unexpected("a declaration or a rule")),
            }
        }
        let total: u32 = self.vars.iter().map(|v| v.width).sum();
        if let Some(declared) = self.width {
            if total < declared {
                return Err(self.error_here(ParseErrorKind::WidthShortfall { declared, required: total }));
            }
        }
        Ok(RuleSet { vars: self.vars, rules })
    }

    fn declaration(&mut self) -> Result<(), ParseError> {
        let at = self.pos;
        self.next();
        let name_at = self.pos;
        let name = self.ident("a variable name")?;
        let here = |p: &Parser, kind| {
            let t = &p.toks[name_at];
            ParseError { line: t.line, column: t.column, kind }
        };
        if RESERVED.contains(&name.as_str()) || port_token(&name).is_some() {
            return Err(here(self, ParseErrorKind::Reserved(name)));
        }
        if self.lookup(&name).is_some() {
            return Err(here(self, ParseErrorKind::DuplicateVariable(name)));
        }
        self.expect(Tok::Colon, "':'")?;
        let width = match self.next() {
            Tok::Int(w) if (1..=MAX_WIDTH as u64).contains(&w) => w as u32,
            Tok::Int(w) => {
                self.pos -= 1;
                return Err(self.error_here(ParseErrorKind::BadWidth(w)));
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a bit width"));
            }
        };
        let offset: u32 = self.vars.iter().map(|v| v.width).sum();
        let required = offset + width;
        let limit = self.width.unwrap_or(MAX_WIDTH);
        if required > limit {
            let t = &self.toks[at];
            return Err(ParseError {
                line: t.line,
                column: t.column,
                kind: ParseErrorKind::WidthOverflow { declared: limit, required },
            });
        }
        self.vars.push(VarDecl { name, offset, width });
        if *self.peek() != Tok::Eof {
            self.expect(Tok::Semi, "';'")?;
        }
        Ok(())
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let label = self.ident("a rule label")?;
        self.expect(Tok::Colon, "':' after the rule label")?;
        let guard = self.typed(Ty::Bool)?;
        self.expect(Tok::Arrow, "'->'")?;
        let mut command = Vec::new();
        loop {
            let target_at = self.pos;
            let target = self.ident("an assignment target")?;
            let var = self.lookup(&target).ok_or_else(|| {
                let t = &self.toks[target_at];
                ParseError { line: t.line, column: t.column, kind: ParseErrorKind::UndeclaredVariable(target) }
            })?;
            self.expect(Tok::Assign, "':='")?;
            let value = self.typed(Ty::Int)?;
            command.push(Assign { var, value });
            // another assignment follows iff `; name :=`
            if *self.peek() == Tok::Semi
                && matches!(self.peek2(), Tok::Ident(_))
                && self.toks.get(self.pos + 2).is_some_and(|t| t.tok == Tok::Assign)
            {
                self.next();
                continue;
            }
            break;
        }
        Ok(Rule { label, guard, command })
    }

    fn typed(&mut self, want: Ty) -> Result<Expr, ParseError> {
        let at = self.pos;
        let (e, ty) = self.or()?;
        if ty != want {
            let t = &self.toks[at];
            return Err(ParseError { line: t.line, column: t.column, kind: ParseErrorKind::Type { expected: want.name() } });
        }
        Ok(e)
    }

    fn operand(&mut self, want: Ty, at: usize, got: Ty) -> Result<(), ParseError> {
        if want != got {
            let t = &self.toks[at];
            return Err(ParseError { line: t.line, column: t.column, kind: ParseErrorKind::Type { expected: want.name() } });
        }
        Ok(())
    }

    fn or(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        let (mut lhs, ty) = self.and()?;
        while *self.peek() == Tok::Op(BinOp::Or) {
            self.operand(Ty::Bool, at, ty)?;
            self.next();
            let at_r = self.pos;
            let (rhs, rty) = self.and()?;
            self.operand(Ty::Bool, at_r, rty)?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn and(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        let (mut lhs, ty) = self.comparison()?;
        while *self.peek() == Tok::Op(BinOp::And) {
            self.operand(Ty::Bool, at, ty)?;
            self.next();
            let at_r = self.pos;
            let (rhs, rty) = self.comparison()?;
            self.operand(Ty::Bool, at_r, rty)?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn comparison(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        let (lhs, ty) = self.additive()?;
        let op = match self.peek() {
            Tok::Op(op @ (BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)) => *op,
            _ => return Ok((lhs, ty)),
        };
        self.next();
        let at_r = self.pos;
        let (rhs, rty) = self.additive()?;
        if matches!(op, BinOp::Eq | BinOp::Ne) {
            self.operand(ty, at_r, rty)?;
        } else {
            self.operand(Ty::Int, at, ty)?;
            self.operand(Ty::Int, at_r, rty)?;
        }
        Ok((Expr::Binary(op, Box::new(lhs), Box::new(rhs)), Ty::Bool))
    }

    fn additive(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        let (mut lhs, ty) = self.multiplicative()?;
        while let Tok::Op(op @ (BinOp::Add | BinOp::Sub)) = *self.peek() {
            self.operand(Ty::Int, at, ty)?;
            self.next();
            let at_r = self.pos;
            let (rhs, rty) = self.multiplicative()?;
            self.operand(Ty::Int, at_r, rty)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn multiplicative(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        let (mut lhs, ty) = self.unary()?;
        while let Tok::Op(op @ (BinOp::Mul | BinOp::Mod)) = *self.peek() {
            self.operand(Ty::Int, at, ty)?;
            self.next();
            let at_r = self.pos;
            let (rhs, rty) = self.unary()?;
            self.operand(Ty::Int, at_r, rty)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, ty))
    }

    fn unary(&mut self) -> Result<(Expr, Ty), ParseError> {
        if *self.peek() == Tok::Bang {
            self.next();
            let at = self.pos;
            let (e, ty) = self.unary()?;
            self.operand(Ty::Bool, at, ty)?;
            return Ok((Expr::Not(Box::new(e)), Ty::Bool));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<(Expr, Ty), ParseError> {
        let at = self.pos;
        match self.next() {
            Tok::Int(v) => Ok((Expr::Int(v), Ty::Int)),
            Tok::LParen => {
                let e = self.or()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(s) => {
                let here = |p: &Parser, kind| {
                    let t = &p.toks[at];
                    ParseError { line: t.line, column: t.column, kind }
                };
                match s.as_str() {
                    "ID" => return Ok((Expr::Id, Ty::Int)),
                    "true" => return Ok((Expr::Bool(true), Ty::Bool)),
                    "false" => return Ok((Expr::Bool(false), Ty::Bool)),
                    _ => {}
                }
                if let Some(port) = port_token(&s) {
                    if *self.peek() == Tok::Dot {
                        self.next();
                        if let Some(degree) = self.degree {
                            if port >= degree {
                                return Err(here(self, ParseErrorKind::NoSuchPort { port, degree }));
                            }
                        }
                        let name_at = self.pos;
                        let name = self.ident("a field name after '.'")?;
                        let var = self.lookup(&name).ok_or_else(|| {
                            let t = &self.toks[name_at];
                            ParseError { line: t.line, column: t.column, kind: ParseErrorKind::UndeclaredVariable(name) }
                        })?;
                        return Ok((Expr::Neighbor { port, var }, Ty::Int));
                    }
                }
                let var = self.lookup(&s).ok_or_else(|| here(self, ParseErrorKind::UndeclaredVariable(s)))?;
                Ok((Expr::Own(var), Ty::Int))
            }
            _ => {
                self.pos = at;
                Err(self.unexpected("an expression"))
            }
        }
    }
}

/// Parses a program without register-width or degree constraints.
pub fn parse_rules(source: &str) -> Result<RuleSet, ParseError> {
    parse_rules_with(source, None, None)
}

/// Parses a program for a `width`-bit register on degree-`degree` nodes.
/// With a width, the declared fields must cover it exactly.
pub fn parse_rules_with(source: &str, width: Option<u32>, degree: Option<usize>) -> Result<RuleSet, ParseError> {
    let toks = lex(source)?;
    Parser { toks, pos: 0, vars: Vec::new(), width, degree }.program()
}

/// Pretty-prints a program. `parse_rules(&render(rs)) == Ok(rs)`.
pub fn render(rules: &RuleSet) -> String {
    let mut out = String::new();
    for v in &rules.vars {
        let _ = writeln!(out, "var {}:{};", v.name, v.width);
    }
    for r in &rules.rules {
        let _ = write!(out, "{}: {} ->", r.label, render_expr(rules, &r.guard));
        for (i, a) in r.command.iter().enumerate() {
            let sep = if i == 0 { " " } else { "; " };
            let _ = write!(out, "{sep}{} := {}", rules.vars[a.var].name, render_expr(rules, &a.value));
        }
        out.push('\n');
    }
    out
}

fn render_expr(rules: &RuleSet, e: &Expr) -> String {
    match e {
        Expr::Int(v) => format!("{v}"),
        Expr::Bool(b) => format!("{b}"),
        Expr::Id => "ID".into(),
        Expr::Own(v) => rules.vars[*v].name.clone(),
        Expr::Neighbor { port, var } => format!("P{port}.{}", rules.vars[*var].name),
        Expr::Not(e) => format!("!{}", render_operand(rules, e)),
        Expr::Binary(op, a, b) => {
            format!("{} {} {}", render_operand(rules, a), op.symbol(), render_operand(rules, b))
        }
    }
}

fn render_operand(rules: &RuleSet, e: &Expr) -> String {
    match e {
        Expr::Binary(..) => format!("({})", render_expr(rules, e)),
        _ => render_expr(rules, e),
    }
}

impl RuleSet {
    /// Builds a rule set from parts; used by tests and generators. Field
    /// offsets are recomputed from declaration order.
    pub fn from_parts(vars: Vec<(String, u32)>, rules: Vec<Rule>) -> Self {
        let mut offset = 0;
        let vars = vars
            .into_iter()
            .map(|(name, width)| {
                let v = VarDecl { name, offset, width };
                offset += width;
                v
            })
            .collect();
        RuleSet { vars, rules }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn env(id: Ident, own: State, view: &[State]) -> Env<'_> {
        Env { id, own, view }
    }

    #[test]
    fn minimal_program() {
        let rs = parse_rules_with("var s:1; r1: (s == L0.s) -> s := 1 - s", Some(1), Some(2)).unwrap();
        assert_eq!(rs.vars().len(), 1);
        assert_eq!(rs.rules().len(), 1);
        assert_eq!(rs.rules()[0].label, "r1");
        assert_eq!(
            rs.rules()[0].guard,
            Expr::Binary(BinOp::Eq, Box::new(Expr::Own(0)), Box::new(Expr::Neighbor { port: 0, var: 0 }))
        );
        let e = env(4, 0, &[0, 1]);
        let r = rs.first_enabled(&e).unwrap();
        assert_eq!(rs.fire(r, &e), 1);
        assert_eq!(rs.first_enabled(&env(4, 0, &[1, 1])), None);
    }

    #[test]
    fn id_reference() {
        let rs = parse_rules("var s:1; r1: (ID % 2 == 1) -> s := 1").unwrap();
        assert!(rs.mentions_id());
        assert!(rs.first_enabled(&env(7, 0, &[])).is_some());
        assert!(rs.first_enabled(&env(8, 0, &[])).is_none());
    }

    #[test]
    fn width_overflow() {
        let err = parse_rules_with("var s:2; var t:1; r: true -> s := 0", Some(2), None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::WidthOverflow { declared: 2, required: 3 });
        assert_eq!((err.line, err.column), (1, 10));
        let err = parse_rules_with("var s:1;", Some(2), None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::WidthShortfall { declared: 2, required: 1 });
    }

    #[test]
    fn error_positions() {
        let err = parse_rules("var s:1;\nr: s == x -> s := 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredVariable("x".into()));
        assert_eq!((err.line, err.column), (2, 9));
        let err = parse_rules_with("var s:1;\nr: s == P2.s -> s := 0", None, Some(2)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NoSuchPort { port: 2, degree: 2 });
        assert_eq!((err.line, err.column), (2, 9));
        let err = parse_rules("var s:1; r: s == 1 -> s := 0 $").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));
        let err = parse_rules("var s:1; r: s + 1 -> s := 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Type { expected: "boolean" });
        let err = parse_rules("var s:1; r: true -> s := s == 1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Type { expected: "integer" });
        let err = parse_rules("var s:1; r: true -> s := 0\nvar t:1;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::LateDeclaration);
        let err = parse_rules("var ID:1;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Reserved("ID".into()));
        let err = parse_rules("var s:1; a: true -> s := 0\na: true -> s := 1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateLabel("a".into()));
        let err = parse_rules("var s:0;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadWidth(0));
    }

    #[test]
    fn multi_assignment_and_comments() {
        let src = "# swap fields\nvar a:2; var b:2;\nswap: a != b -> a := b; b := a # simultaneous\nnext: true -> a := a + 1";
        let rs = parse_rules(src).unwrap();
        assert_eq!(rs.rules().len(), 2);
        assert_eq!(rs.rules()[0].command.len(), 2);
        // a in bits 0-1, b in bits 2-3
        let own = 0b11_01;
        let e = env(1, own, &[]);
        let r = rs.first_enabled(&e).unwrap();
        assert_eq!(rs.fire(r, &e), 0b01_11);
        let e = env(1, 0b11_11, &[]);
        assert_eq!(rs.first_enabled(&e), Some(1));
        assert_eq!(rs.fire(1, &e), 0b11_00, "assignment wraps modulo 2^width");
    }

    #[test]
    fn arithmetic_semantics() {
        let rs = parse_rules("var s:3; r: true -> s := (0 - 1) % 0").unwrap();
        // (0 - 1) % 0 = -1, stored modulo 8
        assert_eq!(rs.fire(0, &env(1, 0, &[])), 7);
        let rs = parse_rules("var s:3; r: true -> s := (0 - 3) % 5").unwrap();
        assert_eq!(rs.fire(0, &env(1, 0, &[])), 2);
        let rs = parse_rules("var s:3; r: !(ID > 3) && (true || false) -> s := ID * 2 + 1").unwrap();
        assert_eq!(rs.first_enabled(&env(4, 0, &[])), None);
        assert_eq!(rs.fire(0, &env(3, 0, &[])), 7);
    }

    #[test]
    fn render_roundtrip() {
        let src = "var l:1; var k:3;\nup: l == 0 && k > P0.k && k > P1.k -> l := 1\nfix: !(k == ID % 8) || false -> k := ID % 8; l := 0";
        let rs = parse_rules(src).unwrap();
        assert_eq!(parse_rules(&render(&rs)).unwrap(), rs);
        let from = RuleSet::from_parts(vec![("s".into(), 1)], vec![]);
        assert_eq!(parse_rules(&render(&from)).unwrap(), from);
    }
}
