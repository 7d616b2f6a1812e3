//! Lexer and recursive-descent parser for types, terms and formulas.
//!
//! Identifiers resolve innermost binder first, then declared variables, then
//! declared constants, then library constants. A bare `S` that resolves to
//! none of these is the successor.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::library;
use crate::term::{type_check, Const, Term, TypeError, TypingContext, Var};
use crate::types::FiniteType;

const KEYWORDS: &[&str] = &[
    "forall",
    "exists",
    "forall^st",
    "exists^st",
    "st",
    "in",
    "true",
    "false",
    "rec",
    "append",
    "len",
    "succ",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: `{name}` is not bound and carries no type annotation")]
    TypeAnnotationMissing {
        name: String,
        line: usize,
        col: usize,
    },
    #[error(transparent)]
    Type(#[from] TypeError),
}

impl ParseError {
    fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::TypeAnnotationMissing { line, col, .. } => (*line, *col),
            ParseError::Type(_) => (usize::MAX, usize::MAX),
        }
    }
}

/// Declared free variables and opaque constants in scope for a parse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    vars: Vec<Var>,
    consts: Vec<Const>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_var(&mut self, name: impl Into<String>, ty: FiniteType) {
        let name = name.into();
        self.vars.retain(|v| v.name != name);
        self.vars.push(Var::new(name, ty));
    }

    pub fn declare_const(&mut self, name: impl Into<String>, ty: FiniteType) {
        let name = name.into();
        self.consts.retain(|c| c.name != name);
        self.consts.push(Const { name, ty });
    }

    pub fn var(&self, name: &str) -> Option<&Var> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&Const> {
        self.consts.iter().find(|c| c.name == name)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn consts(&self) -> &[Const] {
        &self.consts
    }

    pub fn context(&self) -> TypingContext {
        let mut ctx = TypingContext::new();
        for v in &self.vars {
            ctx.push(v.name.clone(), v.ty.clone());
        }
        ctx
    }
}

// Lexer --------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Backslash,
    Bang,
    Eq,
    Neq,
    Le,
    Arrow,
    Or,
    And,
    Tilde,
    Star,
    Empty,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Num(n) => return write!(f, "`{n}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Backslash => "`\\`",
            Tok::Bang => "`!`",
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::Le => "`<=`",
            Tok::Arrow => "`->`",
            Tok::Or => "`\\/`",
            Tok::And => "`/\\`",
            Tok::Tilde => "`~`",
            Tok::Star => "`*`",
            Tok::Empty => "`<>`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let peek = |i: usize| chars.get(i).copied();
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '=' => Tok::Eq,
            '~' => Tok::Tilde,
            '*' => Tok::Star,
            '!' if peek(i + 1) == Some('=') => {
                adv = 2;
                Tok::Neq
            }
            '!' => Tok::Bang,
            '<' if peek(i + 1) == Some('=') => {
                adv = 2;
                Tok::Le
            }
            '<' if peek(i + 1) == Some('>') => {
                adv = 2;
                Tok::Empty
            }
            '-' if peek(i + 1) == Some('>') => {
                adv = 2;
                Tok::Arrow
            }
            '\\' if peek(i + 1) == Some('/') => {
                adv = 2;
                Tok::Or
            }
            '\\' => Tok::Backslash,
            '/' if peek(i + 1) == Some('\\') => {
                adv = 2;
                Tok::And
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i + adv < chars.len() && chars[i + adv].is_ascii_digit() {
                    adv += 1;
                }
                let text: String = chars[start..start + adv].iter().collect();
                let n = text.parse().map_err(|_| ParseError::Syntax {
                    line: l0,
                    col: c0,
                    expected: "a numeral that fits in 64 bits".into(),
                    found: text.clone(),
                })?;
                Tok::Num(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i + adv < chars.len()
                    && (chars[i + adv].is_alphanumeric()
                        || chars[i + adv] == '_'
                        || chars[i + adv] == '\'')
                {
                    adv += 1;
                }
                let mut text: String = chars[start..start + adv].iter().collect();
                if (text == "forall" || text == "exists")
                    && chars.get(i + adv..i + adv + 3) == Some(&['^', 's', 't'][..])
                {
                    adv += 3;
                    text.push_str("^st");
                }
                Tok::Ident(text)
            }
            other => {
                return Err(ParseError::Syntax {
                    line: l0,
                    col: c0,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        out.push(Token {
            tok,
            line: l0,
            col: c0,
        });
        i += adv;
        col += adv;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

// Parser -------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Term,
    Formula,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    /// Free variables introduced by `st(x:ty)` annotations.
    annotated: Vec<Var>,
    scope: Vec<Var>,
    mode: Mode,
}

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Copy)]
enum QKind {
    Forall,
    Exists,
    ForallSt,
    ExistsSt,
}

enum Binder {
    Typed(Var, Option<Term>),
    Bounded(Var, Term),
}

impl<'a> Parser<'a> {
    fn new(toks: Vec<Token>, sig: &'a Signature, mode: Mode) -> Self {
        Parser {
            toks,
            pos: 0,
            sig,
            annotated: Vec::new(),
            scope: Vec::new(),
            mode,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.into(),
            found: t.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    // Types

    fn ty(&mut self) -> PResult<FiniteType> {
        let dom = self.ty_atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let cod = self.ty()?;
            Ok(FiniteType::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn ty_atom(&mut self) -> PResult<FiniteType> {
        let t = match self.peek().clone() {
            Tok::Num(n) if n <= 16 => FiniteType::pure(n as usize),
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                return Ok(self.wrap_stars(t));
            }
            _ => return Err(self.error("a type")),
        };
        self.bump();
        Ok(self.wrap_stars(t))
    }

    fn wrap_stars(&mut self, mut t: FiniteType) -> FiniteType {
        while *self.peek() == Tok::Star {
            self.bump();
            t = FiniteType::seq(t);
        }
        t
    }

    // Terms

    fn resolve(&self, name: &str, line: usize, col: usize) -> PResult<Option<Term>> {
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == name) {
            return Ok(Some(v.term()));
        }
        if let Some(v) = self.sig.var(name) {
            return Ok(Some(v.term()));
        }
        if let Some(v) = self.annotated.iter().find(|v| v.name == name) {
            return Ok(Some(v.term()));
        }
        if let Some(c) = self.sig.constant(name) {
            return Ok(Some(Term::Const(c.clone())));
        }
        if library::lookup(name).is_some() {
            return Ok(Some(library::term(name)));
        }
        if name == "S" {
            return Ok(None);
        }
        Err(match self.mode {
            Mode::Formula => ParseError::TypeAnnotationMissing {
                name: name.into(),
                line,
                col,
            },
            Mode::Term => ParseError::Type(TypeError::UnboundVariable(name.into())),
        })
    }

    fn term(&mut self) -> PResult<Term> {
        if *self.peek() == Tok::Backslash {
            return self.lambda();
        }
        let mut head = self.app_item()?;
        loop {
            if *self.peek() == Tok::Backslash {
                let arg = self.lambda()?;
                head = Term::app(head, arg);
                break;
            }
            if !self.starts_item() {
                break;
            }
            let arg = self.app_item()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn lambda(&mut self) -> PResult<Term> {
        self.expect(Tok::Backslash)?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Dot)?;
        let x = Var::new(name, ty);
        self.scope.push(x.clone());
        let body = self.term();
        self.scope.pop();
        Ok(Term::lam(x, body?))
    }

    fn starts_item(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::LParen | Tok::Empty => true,
            Tok::Ident(s) => {
                !KEYWORDS.contains(&s.as_str())
                    || matches!(s.as_str(), "rec" | "append" | "len" | "succ")
            }
            _ => false,
        }
    }

    /// An application argument: a successor prefix or an indexed atom.
    fn app_item(&mut self) -> PResult<Term> {
        if self.is_kw("succ") {
            self.bump();
            return Ok(Term::succ(self.app_item()?));
        }
        if let Tok::Ident(s) = self.peek().clone() {
            if s == "S" {
                let t = &self.toks[self.pos];
                if self.resolve("S", t.line, t.col)?.is_none() {
                    self.bump();
                    return Ok(Term::succ(self.app_item()?));
                }
            }
        }
        let mut t = self.atom()?;
        while *self.peek() == Tok::Bang {
            self.bump();
            let i = self.atom()?;
            t = Term::idx(t, i);
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        let tok = self.toks[self.pos].clone();
        match tok.tok {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::num(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Empty => {
                self.bump();
                self.expect(Tok::LBrack)?;
                let ty = self.ty()?;
                self.expect(Tok::RBrack)?;
                Ok(Term::SeqEmpty(ty))
            }
            Tok::Ident(ref s) if s == "rec" => {
                self.bump();
                self.expect(Tok::LBrack)?;
                let ty = self.ty()?;
                self.expect(Tok::RBrack)?;
                Ok(Term::Rec(ty))
            }
            Tok::Ident(ref s) if s == "append" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::append(a, b))
            }
            Tok::Ident(ref s) if s == "len" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::len(a))
            }
            Tok::Ident(ref s) if !KEYWORDS.contains(&s.as_str()) => {
                match self.resolve(s, tok.line, tok.col)? {
                    Some(t) => {
                        self.bump();
                        Ok(t)
                    }
                    None => Err(self.error("a term (use `(S t)` for a successor)")),
                }
            }
            _ => Err(self.error("a term")),
        }
    }

    // Formulas

    fn context(&self) -> TypingContext {
        let mut ctx = self.sig.context();
        for v in self.annotated.iter().chain(&self.scope) {
            ctx.push(v.name.clone(), v.ty.clone());
        }
        ctx
    }

    fn formula(&mut self) -> PResult<Formula> {
        if let Some(k) = self.quantifier_kw() {
            return self.quantified(k);
        }
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantifier_kw(&self) -> Option<QKind> {
        match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "forall" => Some(QKind::Forall),
                "exists" => Some(QKind::Exists),
                "forall^st" => Some(QKind::ForallSt),
                "exists^st" => Some(QKind::ExistsSt),
                _ => None,
            },
            _ => None,
        }
    }

    fn quantified(&mut self, kind: QKind) -> PResult<Formula> {
        self.bump();
        let mut binders = Vec::new();
        let pushed_before = self.scope.len();
        let res = (|| {
            loop {
                let name = self.ident()?;
                let b = if *self.peek() == Tok::Le && matches!(kind, QKind::Forall | QKind::Exists)
                {
                    self.bump();
                    let bound = self.term()?;
                    Binder::Bounded(Var::nat(name), bound)
                } else {
                    self.expect(Tok::Colon)?;
                    let ty = self.ty()?;
                    let within =
                        if self.is_kw("in") && matches!(kind, QKind::Forall | QKind::Exists) {
                            self.bump();
                            Some(self.term()?)
                        } else {
                            None
                        };
                    Binder::Typed(Var::new(name, ty), within)
                };
                let v = match &b {
                    Binder::Typed(v, _) | Binder::Bounded(v, _) => v.clone(),
                };
                self.scope.push(v);
                binders.push(b);
                if *self.peek() == Tok::Comma {
                    self.bump();
                    continue;
                }
                break;
            }
            self.expect(Tok::Dot)?;
            self.formula()
        })();
        self.scope.truncate(pushed_before);
        let mut body = res?;
        for b in binders.into_iter().rev() {
            body = match (kind, b) {
                (QKind::Forall, Binder::Typed(v, None)) => Formula::forall(v, body),
                (QKind::Forall, Binder::Typed(v, Some(s))) => Formula::forall_in(v, s, body),
                (QKind::Forall, Binder::Bounded(v, t)) => Formula::bforall(v, t, body),
                (QKind::Exists, Binder::Typed(v, None)) => Formula::exists(v, body),
                (QKind::Exists, Binder::Typed(v, Some(s))) => Formula::exists_in(v, s, body),
                (QKind::Exists, Binder::Bounded(v, t)) => Formula::bexists(v, t, body),
                (QKind::ForallSt, Binder::Typed(v, _)) => Formula::forall_st(v, body),
                (QKind::ExistsSt, Binder::Typed(v, _)) => Formula::exists_st(v, body),
                (_, Binder::Bounded(..)) => {
                    unreachable!("bounded binders only for internal quantifiers")
                }
            };
        }
        Ok(body)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let Some(k) = self.quantifier_kw() {
            return self.quantified(k);
        }
        if self.is_kw("true") {
            self.bump();
            return Ok(Formula::top());
        }
        if self.is_kw("false") {
            self.bump();
            return Ok(Formula::bottom());
        }
        if self.is_kw("st") {
            return self.st_atom();
        }
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            match self.relation() {
                Ok(f) => return Ok(f),
                Err(as_term) => {
                    let after_term = self.pos;
                    self.pos = save;
                    self.bump();
                    let res = self.formula().and_then(|f| {
                        self.expect(Tok::RParen)?;
                        Ok(f)
                    });
                    return match res {
                        Ok(f) => Ok(f),
                        Err(as_formula) => {
                            // report whichever reading got further
                            if as_term.position() > as_formula.position()
                                || (as_term.position() == as_formula.position()
                                    && after_term > self.pos)
                            {
                                Err(as_term)
                            } else {
                                Err(as_formula)
                            }
                        }
                    };
                }
            }
        }
        self.relation()
    }

    fn st_atom(&mut self) -> PResult<Formula> {
        self.bump();
        self.expect(Tok::LParen)?;
        let t = self.term()?;
        let ty = if *self.peek() == Tok::Colon {
            self.bump();
            self.ty()?
        } else {
            type_check(&t, &self.context())?
        };
        self.expect(Tok::RParen)?;
        Ok(Formula::St(ty, t))
    }

    fn relation(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::eq(lhs, self.term()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::neq(lhs, self.term()?))
            }
            Tok::Le => {
                self.bump();
                Ok(Formula::le(lhs, self.term()?))
            }
            Tok::Ident(s) if s == "in" => {
                self.bump();
                Ok(Formula::mem(lhs, self.term()?))
            }
            _ => Err(self.error("`=`, `!=`, `<=` or `in`")),
        }
    }

    /// Collects `st(x : ty)` annotations on otherwise unknown names.
    fn prescan_annotations(&mut self) -> PResult<()> {
        let mut i = 0;
        while i + 4 < self.toks.len() {
            let hit = matches!(&self.toks[i].tok, Tok::Ident(s) if s == "st")
                && self.toks[i + 1].tok == Tok::LParen
                && matches!(&self.toks[i + 2].tok, Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                && self.toks[i + 3].tok == Tok::Colon;
            if hit {
                let name = match &self.toks[i + 2].tok {
                    Tok::Ident(s) => s.clone(),
                    _ => unreachable!(),
                };
                let save = self.pos;
                self.pos = i + 4;
                let ty = self.ty()?;
                self.pos = save;
                let known = self.sig.var(&name).is_some()
                    || self.sig.constant(&name).is_some()
                    || self.annotated.iter().any(|v| v.name == name);
                if !known {
                    self.annotated.push(Var::new(name, ty));
                }
            }
            i += 1;
        }
        Ok(())
    }
}

pub fn parse_type(src: &str) -> Result<FiniteType, ParseError> {
    let sig = Signature::new();
    let mut p = Parser::new(lex(src)?, &sig, Mode::Term);
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses and typechecks a term; free variables must be declared in `sig`.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser::new(lex(src)?, sig, Mode::Term);
    let t = p.term()?;
    p.finish()?;
    type_check(&t, &sig.context())?;
    Ok(t)
}

/// Parses and typechecks a formula. Free variables come from `sig` or from
/// `st(x : ty)` annotations inside the formula.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(lex(src)?, sig, Mode::Formula);
    p.prescan_annotations()?;
    let f = p.formula()?;
    p.finish()?;
    f.type_check(&p.context())?;
    Ok(f)
}
