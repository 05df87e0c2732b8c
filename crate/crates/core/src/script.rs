//! The `.weil` script format: lexer, parser, canonical printer and
//! elaboration into objects, maps, fields, diagrams and cones.
//!
//! ```text
//! obj Dpair = D(2)
//! map plus : D -> Dpair := d1, d1
//! field X on 2 := x2, -x1
//! diagram T {
//!   node L : D
//!   node R : D
//!   node B : One
//!   arrow l : L -> B := W[zl]
//!   arrow r : R -> B := W[zr]
//! }
//! check limit T apex Dpair leg L : W[i1] leg R : W[i2]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;

use crate::algebra::{AlgebraHom, WeilAlgebra};
use crate::error::{Error, Result};
use crate::limits::{Cone, WeilDiagram};
use crate::object::{InfinitesimalMap, InfinitesimalObject};
use crate::point::PolyMap;
use crate::poly::{Polynomial, Rational};

/// Source position. Positions never take part in equality, so a script
/// and its reprinted form compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObjExpr {
    D,
    Power(usize, Vec<Vec<usize>>),
    Pairwise(usize),
    Higher(u32),
    Named(Name),
    Oplus(Vec<ObjExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub map: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LegDecl {
    pub node: Name,
    pub map: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Limit { diagram: Name, apex: ObjExpr, legs: Vec<LegDecl> },
    Cone(Name),
    Map(Name),
    Bracket(Name, Name),
    Jacobi(Name, Name, Name),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Obj { name: Name, expr: ObjExpr },
    Map { name: Name, source: ObjExpr, target: ObjExpr, components: Vec<Polynomial> },
    Field { name: Name, dim: usize, components: Vec<Polynomial> },
    Diagram { name: Name, nodes: Vec<(Name, ObjExpr)>, arrows: Vec<ArrowDecl> },
    Cone { name: Name, diagram: Name, apex: ObjExpr, legs: Vec<LegDecl> },
    Check { pos: Pos, check: Check },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Script {
    pub stmts: Vec<Stmt>,
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Pos,
}

const SYMBOLS: [&str; 17] = ["(+)", ":=", "->", "=", ":", ",", "(", ")", "{", "}", "[", "]", "^", "+", "-", "*", "/"];

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let digits: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Int(digits.parse().expect("digits")), pos });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| s.chars().enumerate().all(|(k, sc)| chars.get(i + k) == Some(&sc))) {
            i += sym.len();
            col += sym.len();
            out.push(Token { tok: Tok::Sym(sym), pos });
        } else {
            return Err(syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column: col } });
    Ok(out)
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

const KEYWORDS: [&str; 13] = ["obj", "map", "field", "diagram", "node", "arrow", "cone", "check", "limit", "apex", "leg", "on", "for"];

/// Splits `d12` / `x3` into prefix letter and 1-based index.
fn variable(ident: &str) -> Option<(char, usize)> {
    let mut chars = ident.chars();
    let prefix = chars.next()?;
    let rest = chars.as_str();
    if !prefix.is_ascii_lowercase() || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&i: &usize| i >= 1).map(|i| (prefix, i))
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<Pos> {
        let t = self.next();
        match t.tok {
            Tok::Sym(s) if s == sym => Ok(t.pos),
            other => Err(syntax(t.pos, format!("expected `{sym}`, found {}", Self::describe(&other)))),
        }
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(s) if *s == sym)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Pos> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if s == kw => Ok(t.pos),
            other => Err(syntax(t.pos, format!("expected `{kw}`, found {}", Self::describe(&other)))),
        }
    }

    fn name(&mut self) -> Result<Name> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok(Name { text: s, pos: t.pos }),
            other => Err(syntax(t.pos, format!("expected a name, found {}", Self::describe(&other)))),
        }
    }

    fn int(&mut self) -> Result<(BigInt, Pos)> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok((n, t.pos)),
            other => Err(syntax(t.pos, format!("expected an integer, found {}", Self::describe(&other)))),
        }
    }

    fn small_int(&mut self) -> Result<usize> {
        let (n, pos) = self.int()?;
        usize::try_from(n).ok().filter(|&v| v <= 64).ok_or_else(|| syntax(pos, "integer too large"))
    }

    fn script(&mut self) -> Result<Script> {
        let mut stmts = Vec::new();
        while self.peek().tok != Tok::Eof {
            stmts.push(self.stmt()?);
        }
        Ok(Script { stmts })
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let t = self.next();
        let kw = match &t.tok {
            Tok::Ident(s) => s.clone(),
            other => return Err(syntax(t.pos, format!("expected a statement, found {}", Self::describe(other)))),
        };
        match kw.as_str() {
            "obj" => {
                let name = self.name()?;
                self.expect_sym("=")?;
                Ok(Stmt::Obj { name, expr: self.obj_expr()? })
            }
            "map" => {
                let name = self.name()?;
                self.expect_sym(":")?;
                let source = self.obj_expr()?;
                self.expect_sym("->")?;
                let target = self.obj_expr()?;
                self.expect_sym(":=")?;
                Ok(Stmt::Map { name, source, target, components: self.components('d')? })
            }
            "field" => {
                let name = self.name()?;
                self.expect_keyword("on")?;
                let dim = self.small_int()?;
                self.expect_sym(":=")?;
                Ok(Stmt::Field { name, dim, components: self.components('x')? })
            }
            "diagram" => self.diagram(),
            "cone" => {
                let name = self.name()?;
                self.expect_keyword("for")?;
                let diagram = self.name()?;
                self.expect_keyword("apex")?;
                let apex = self.obj_expr()?;
                Ok(Stmt::Cone { name, diagram, apex, legs: self.legs()? })
            }
            "check" => self.check(t.pos),
            _ => Err(syntax(t.pos, format!("unknown statement `{kw}`"))),
        }
    }

    fn diagram(&mut self) -> Result<Stmt> {
        let name = self.name()?;
        self.expect_sym("{")?;
        let mut nodes = Vec::new();
        let mut arrows = Vec::new();
        loop {
            if self.at_keyword("node") {
                self.next();
                let n = self.name()?;
                self.expect_sym(":")?;
                nodes.push((n, self.obj_expr()?));
            } else if self.at_keyword("arrow") {
                self.next();
                let a = self.name()?;
                self.expect_sym(":")?;
                let source = self.name()?;
                self.expect_sym("->")?;
                let target = self.name()?;
                self.expect_sym(":=")?;
                let map = self.hom_ref()?;
                arrows.push(ArrowDecl { name: a, source, target, map });
            } else {
                break;
            }
        }
        self.expect_sym("}")?;
        Ok(Stmt::Diagram { name, nodes, arrows })
    }

    fn hom_ref(&mut self) -> Result<Name> {
        self.expect_keyword("W")?;
        self.expect_sym("[")?;
        let n = self.name()?;
        self.expect_sym("]")?;
        Ok(n)
    }

    fn legs(&mut self) -> Result<Vec<LegDecl>> {
        let mut legs = Vec::new();
        while self.at_keyword("leg") {
            self.next();
            let node = self.name()?;
            self.expect_sym(":")?;
            legs.push(LegDecl { node, map: self.hom_ref()? });
        }
        if legs.is_empty() {
            return Err(syntax(self.peek().pos, "expected at least one `leg`"));
        }
        Ok(legs)
    }

    fn check(&mut self, pos: Pos) -> Result<Stmt> {
        let t = self.next();
        let kind = match &t.tok {
            Tok::Ident(s) => s.clone(),
            other => return Err(syntax(t.pos, format!("expected a check kind, found {}", Self::describe(other)))),
        };
        let check = match kind.as_str() {
            "limit" => {
                let diagram = self.name()?;
                self.expect_keyword("apex")?;
                let apex = self.obj_expr()?;
                Check::Limit { diagram, apex, legs: self.legs()? }
            }
            "cone" => Check::Cone(self.name()?),
            "map" => Check::Map(self.name()?),
            "bracket" => Check::Bracket(self.name()?, self.name()?),
            "jacobi" => Check::Jacobi(self.name()?, self.name()?, self.name()?),
            _ => return Err(syntax(t.pos, format!("unknown check `{kind}`"))),
        };
        Ok(Stmt::Check { pos, check })
    }

    fn obj_expr(&mut self) -> Result<ObjExpr> {
        let mut parts = vec![self.obj_atom()?];
        while self.at_sym("(+)") {
            self.next();
            parts.push(self.obj_atom()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { ObjExpr::Oplus(parts) })
    }

    fn obj_atom(&mut self) -> Result<ObjExpr> {
        let t = self.next();
        let ident = match &t.tok {
            Tok::Ident(s) => s.clone(),
            other => return Err(syntax(t.pos, format!("expected an object, found {}", Self::describe(other)))),
        };
        if let Some(k) = ident.strip_prefix("D_") {
            let k: u32 = k.parse().ok().filter(|&k| (1..=32).contains(&k)).ok_or_else(|| syntax(t.pos, "bad order in `D_k`"))?;
            return Ok(ObjExpr::Higher(k));
        }
        if ident != "D" {
            if KEYWORDS.contains(&ident.as_str()) {
                return Err(syntax(t.pos, format!("expected an object, found `{ident}`")));
            }
            return Ok(ObjExpr::Named(Name { text: ident, pos: t.pos }));
        }
        if self.at_sym("^") {
            self.next();
            let n = self.small_int()?;
            let mut seqs = Vec::new();
            if self.at_sym("{") {
                self.next();
                while self.at_sym("(") {
                    self.next();
                    let mut seq = vec![self.small_int()?];
                    while self.at_sym(",") {
                        self.next();
                        seq.push(self.small_int()?);
                    }
                    self.expect_sym(")")?;
                    seqs.push(seq);
                }
                if seqs.is_empty() {
                    return Err(syntax(self.peek().pos, "expected `(` starting a relation"));
                }
                self.expect_sym("}")?;
            }
            return Ok(ObjExpr::Power(n, seqs));
        }
        if self.at_sym("(") {
            self.next();
            let n = self.small_int()?;
            self.expect_sym(")")?;
            return Ok(ObjExpr::Pairwise(n));
        }
        Ok(ObjExpr::D)
    }

    fn at_poly_start(&self) -> bool {
        match &self.peek().tok {
            Tok::Int(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "-" | "+"),
            Tok::Ident(s) => variable(s).is_some(),
            Tok::Eof => false,
        }
    }

    fn components(&mut self, prefix: char) -> Result<Vec<Polynomial>> {
        let mut comps = Vec::new();
        if !self.at_poly_start() {
            return Ok(comps);
        }
        comps.push(self.poly(prefix)?);
        while self.at_sym(",") {
            self.next();
            comps.push(self.poly(prefix)?);
        }
        Ok(comps)
    }

    fn poly(&mut self, prefix: char) -> Result<Polynomial> {
        let mut acc = if self.at_sym("-") {
            self.next();
            self.term(prefix)?.neg()
        } else {
            if self.at_sym("+") {
                self.next();
            }
            self.term(prefix)?
        };
        loop {
            if self.at_sym("+") {
                self.next();
                acc = acc.add(&self.term(prefix)?);
            } else if self.at_sym("-") {
                self.next();
                acc = acc.sub(&self.term(prefix)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, prefix: char) -> Result<Polynomial> {
        let mut acc = self.factor(prefix)?;
        while self.at_sym("*") {
            self.next();
            acc = acc.mul(&self.factor(prefix)?);
        }
        Ok(acc)
    }

    fn factor(&mut self, prefix: char) -> Result<Polynomial> {
        let base = self.atom(prefix)?;
        if self.at_sym("^") {
            self.next();
            let e = self.small_int()?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self, prefix: char) -> Result<Polynomial> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => {
                let mut r = Rational::from_integer(n);
                if self.at_sym("/") {
                    self.next();
                    let (d, pos) = self.int()?;
                    if d == BigInt::from(0) {
                        return Err(syntax(pos, "zero denominator"));
                    }
                    r /= Rational::from_integer(d);
                }
                Ok(Polynomial::constant(0, r))
            }
            Tok::Sym("(") => {
                let p = self.poly(prefix)?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Sym("-") => Ok(self.factor(prefix)?.neg()),
            Tok::Ident(s) => match variable(&s) {
                Some((p, i)) if p == prefix => Ok(Polynomial::var(i, i - 1)),
                _ => Err(syntax(t.pos, format!("expected a variable `{prefix}1`, `{prefix}2`, ..., found `{s}`"))),
            },
            other => Err(syntax(t.pos, format!("expected a polynomial term, found {}", Self::describe(&other)))),
        }
    }
}

/// Parses a script and resolves every name against earlier declarations.
pub fn parse_script(text: &str) -> Result<Script> {
    let script = Parser { toks: lex(text)?, at: 0 }.script()?;
    resolve(&script)?;
    Ok(script)
}

/// Parses a comma-separated polynomial list over `prefix1, prefix2, ...`.
pub fn parse_components(text: &str, prefix: char) -> Result<Vec<Polynomial>> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let comps = p.components(prefix)?;
    if p.peek().tok != Tok::Eof {
        return Err(syntax(p.peek().pos, format!("unexpected {}", Parser::describe(&p.peek().tok))));
    }
    Ok(comps)
}

/// Parses a single object expression (no names).
pub fn parse_object(text: &str) -> Result<InfinitesimalObject> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let expr = p.obj_expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(syntax(p.peek().pos, format!("unexpected {}", Parser::describe(&p.peek().tok))));
    }
    eval_obj(&expr, &HashMap::new())
}

// ---------------------------------------------------------------- resolution

#[derive(Default)]
struct Scope {
    kinds: HashMap<&'static str, HashMap<String, ()>>,
    diagram_nodes: HashMap<String, Vec<String>>,
}

impl Scope {
    fn declare(&mut self, kind: &'static str, name: &Name) -> Result<()> {
        let table = self.kinds.entry(kind).or_default();
        if table.insert(name.text.clone(), ()).is_some() {
            return Err(Error::Duplicate { line: name.pos.line, column: name.pos.column, kind, name: name.text.clone() });
        }
        Ok(())
    }

    fn require(&self, kind: &'static str, name: &Name) -> Result<()> {
        if self.kinds.get(kind).is_some_and(|t| t.contains_key(&name.text)) {
            Ok(())
        } else {
            Err(unresolved(name))
        }
    }

    fn require_node(&self, diagram: &Name, node: &Name) -> Result<()> {
        if self.diagram_nodes.get(&diagram.text).is_some_and(|ns| ns.contains(&node.text)) {
            Ok(())
        } else {
            Err(unresolved(node))
        }
    }
}

fn unresolved(name: &Name) -> Error {
    Error::Unresolved { line: name.pos.line, column: name.pos.column, name: name.text.clone() }
}

fn resolve_obj(scope: &Scope, expr: &ObjExpr) -> Result<()> {
    match expr {
        ObjExpr::Named(n) => scope.require("obj", n),
        ObjExpr::Oplus(parts) => parts.iter().try_for_each(|p| resolve_obj(scope, p)),
        _ => Ok(()),
    }
}

fn resolve(script: &Script) -> Result<()> {
    let mut scope = Scope::default();
    for stmt in &script.stmts {
        match stmt {
            Stmt::Obj { name, expr } => {
                resolve_obj(&scope, expr)?;
                scope.declare("obj", name)?;
            }
            Stmt::Map { name, source, target, .. } => {
                resolve_obj(&scope, source)?;
                resolve_obj(&scope, target)?;
                scope.declare("map", name)?;
            }
            Stmt::Field { name, .. } => scope.declare("field", name)?,
            Stmt::Diagram { name, nodes, arrows } => {
                let mut local = Scope::default();
                for (n, obj) in nodes {
                    resolve_obj(&scope, obj)?;
                    local.declare("node", n)?;
                }
                for a in arrows {
                    local.require("node", &a.source)?;
                    local.require("node", &a.target)?;
                    scope.require("map", &a.map)?;
                    local.declare("arrow", &a.name)?;
                }
                scope.declare("diagram", name)?;
                scope.diagram_nodes.insert(name.text.clone(), nodes.iter().map(|(n, _)| n.text.clone()).collect());
            }
            Stmt::Cone { name, diagram, apex, legs } => {
                resolve_legs(&scope, diagram, apex, legs)?;
                scope.declare("cone", name)?;
            }
            Stmt::Check { check, .. } => match check {
                Check::Limit { diagram, apex, legs } => resolve_legs(&scope, diagram, apex, legs)?,
                Check::Cone(n) => scope.require("cone", n)?,
                Check::Map(n) => scope.require("map", n)?,
                Check::Bracket(x, y) => {
                    scope.require("field", x)?;
                    scope.require("field", y)?;
                }
                Check::Jacobi(x, y, z) => {
                    for n in [x, y, z] {
                        scope.require("field", n)?;
                    }
                }
            },
        }
    }
    Ok(())
}

fn resolve_legs(scope: &Scope, diagram: &Name, apex: &ObjExpr, legs: &[LegDecl]) -> Result<()> {
    scope.require("diagram", diagram)?;
    resolve_obj(scope, apex)?;
    let mut seen = Scope::default();
    for leg in legs {
        scope.require_node(diagram, &leg.node)?;
        scope.require("map", &leg.map)?;
        seen.declare("leg", &leg.node)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- printer

fn print_obj(expr: &ObjExpr, out: &mut String) {
    match expr {
        ObjExpr::D => out.push('D'),
        ObjExpr::Power(n, seqs) => {
            let _ = write!(out, "D^{n}");
            if !seqs.is_empty() {
                out.push('{');
                for s in seqs {
                    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                    let _ = write!(out, "({})", parts.join(","));
                }
                out.push('}');
            }
        }
        ObjExpr::Pairwise(n) => {
            let _ = write!(out, "D({n})");
        }
        ObjExpr::Higher(k) => {
            let _ = write!(out, "D_{k}");
        }
        ObjExpr::Named(n) => out.push_str(&n.text),
        ObjExpr::Oplus(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" (+) ");
                }
                print_obj(p, out);
            }
        }
    }
}

fn print_components(comps: &[Polynomial], prefix: &str) -> String {
    comps.iter().map(|c| c.render(prefix)).collect::<Vec<_>>().join(", ")
}

fn print_legs(legs: &[LegDecl], out: &mut String, sep: &str) {
    for leg in legs {
        let _ = write!(out, "{sep}leg {} : W[{}]", leg.node, leg.map);
    }
}

/// Canonical text: one statement per line, diagram and cone bodies indented.
pub fn print_script(script: &Script) -> String {
    let mut out = String::new();
    for stmt in &script.stmts {
        match stmt {
            Stmt::Obj { name, expr } => {
                let _ = write!(out, "obj {name} = ");
                print_obj(expr, &mut out);
            }
            Stmt::Map { name, source, target, components } => {
                let _ = write!(out, "map {name} : ");
                print_obj(source, &mut out);
                out.push_str(" -> ");
                print_obj(target, &mut out);
                out.push_str(" :=");
                if !components.is_empty() {
                    let _ = write!(out, " {}", print_components(components, "d"));
                }
            }
            Stmt::Field { name, dim, components } => {
                let _ = write!(out, "field {name} on {dim} :=");
                if !components.is_empty() {
                    let _ = write!(out, " {}", print_components(components, "x"));
                }
            }
            Stmt::Diagram { name, nodes, arrows } => {
                let _ = writeln!(out, "diagram {name} {{");
                for (n, obj) in nodes {
                    let _ = write!(out, "  node {n} : ");
                    print_obj(obj, &mut out);
                    out.push('\n');
                }
                for a in arrows {
                    let _ = writeln!(out, "  arrow {} : {} -> {} := W[{}]", a.name, a.source, a.target, a.map);
                }
                out.push('}');
            }
            Stmt::Cone { name, diagram, apex, legs } => {
                let _ = write!(out, "cone {name} for {diagram} apex ");
                print_obj(apex, &mut out);
                print_legs(legs, &mut out, "\n  ");
            }
            Stmt::Check { check, .. } => match check {
                Check::Limit { diagram, apex, legs } => {
                    let _ = write!(out, "check limit {diagram} apex ");
                    print_obj(apex, &mut out);
                    print_legs(legs, &mut out, " ");
                }
                Check::Cone(n) => {
                    let _ = write!(out, "check cone {n}");
                }
                Check::Map(n) => {
                    let _ = write!(out, "check map {n}");
                }
                Check::Bracket(x, y) => {
                    let _ = write!(out, "check bracket {x} {y}");
                }
                Check::Jacobi(x, y, z) => {
                    let _ = write!(out, "check jacobi {x} {y} {z}");
                }
            },
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_script(self))
    }
}

// ---------------------------------------------------------------- elaboration

/// Everything a script declares, elaborated. Declarations that fail to
/// elaborate are recorded in `failures` and left out of the tables.
#[derive(Default)]
pub struct Environment {
    pub objects: HashMap<String, InfinitesimalObject>,
    pub maps: HashMap<String, InfinitesimalMap>,
    pub fields: HashMap<String, PolyMap>,
    pub diagrams: HashMap<String, WeilDiagram>,
    pub cones: HashMap<String, (String, Cone)>,
    pub failures: BTreeMap<String, (Pos, Error)>,
}

fn eval_obj(expr: &ObjExpr, objects: &HashMap<String, InfinitesimalObject>) -> Result<InfinitesimalObject> {
    match expr {
        ObjExpr::D => Ok(InfinitesimalObject::d()),
        ObjExpr::Power(n, seqs) => InfinitesimalObject::new(*n, &vec![2; *n], seqs),
        ObjExpr::Pairwise(n) => Ok(InfinitesimalObject::pairwise(*n)),
        ObjExpr::Higher(k) => Ok(InfinitesimalObject::higher(*k)),
        ObjExpr::Named(n) => objects.get(&n.text).cloned().ok_or_else(|| unresolved(n)),
        ObjExpr::Oplus(parts) => {
            let objs = parts.iter().map(|p| eval_obj(p, objects)).collect::<Result<Vec<_>>>()?;
            crate::object::oplus_all(&objs)
        }
    }
}

impl Environment {
    fn object(&self, expr: &ObjExpr) -> Result<InfinitesimalObject> {
        match expr {
            ObjExpr::Named(n) => self.objects.get(&n.text).cloned().ok_or_else(|| self.dependency(n)),
            other => eval_obj(other, &self.objects),
        }
    }

    fn map(&self, n: &Name) -> Result<&InfinitesimalMap> {
        self.maps.get(&n.text).ok_or_else(|| self.dependency(n))
    }

    pub fn field(&self, n: &Name) -> Result<&PolyMap> {
        self.fields.get(&n.text).ok_or_else(|| self.dependency(n))
    }

    /// The error for a reference to a declaration that failed.
    fn dependency(&self, n: &Name) -> Error {
        match self.failures.get(&n.text) {
            Some((_, e)) => e.clone(),
            None => unresolved(n),
        }
    }

    /// Builds a cone from leg declarations, inferring a missing leg from
    /// an arrow out of a node that already has one.
    pub fn build_cone(&self, diagram_name: &Name, apex: &ObjExpr, legs: &[LegDecl]) -> Result<Cone> {
        let diagram = self.diagrams.get(&diagram_name.text).ok_or_else(|| self.dependency(diagram_name))?;
        let apex_obj = self.object(apex)?;
        let apex_alg = WeilAlgebra::of(&apex_obj);
        let mut slots: Vec<Option<AlgebraHom>> = vec![None; diagram.nodes().len()];
        for leg in legs {
            let idx = diagram.node_index(&leg.node.text).ok_or_else(|| unresolved(&leg.node))?;
            let map = self.map(&leg.map)?;
            if map.target() != &apex_obj {
                return Err(Error::MalformedCone(format!("leg `{}` does not start at apex {}", leg.map, apex_obj)));
            }
            slots[idx] = Some(AlgebraHom::induced(map));
        }
        loop {
            let mut progress = false;
            for arrow in diagram.arrows() {
                if slots[arrow.target].is_none() {
                    if let Some(src) = &slots[arrow.source] {
                        slots[arrow.target] = Some(src.then(&arrow.hom)?);
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        let legs = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::MalformedCone(format!("no leg to node `{}`", diagram.nodes()[i].0))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Cone { apex: apex_alg, legs })
    }

    fn elaborate_stmt(&mut self, stmt: &Stmt) -> Option<(Name, Result<()>)> {
        match stmt {
            Stmt::Obj { name, expr } => {
                let r = eval_obj(expr, &self.objects).map(|o| {
                    self.objects.insert(name.text.clone(), o);
                });
                Some((name.clone(), r))
            }
            Stmt::Map { name, source, target, components } => {
                let r = (|| {
                    let m = InfinitesimalMap::new(self.object(source)?, self.object(target)?, components.clone())?;
                    self.maps.insert(name.text.clone(), m);
                    Ok(())
                })();
                Some((name.clone(), r))
            }
            Stmt::Field { name, dim, components } => {
                let r = (|| {
                    if components.len() != *dim {
                        return Err(Error::ArityMismatch { expected: *dim, found: components.len() });
                    }
                    self.fields.insert(name.text.clone(), PolyMap::new(*dim, components.clone())?);
                    Ok(())
                })();
                Some((name.clone(), r))
            }
            Stmt::Diagram { name, nodes, arrows } => {
                let r = (|| {
                    let mut d = WeilDiagram::new();
                    for (n, obj) in nodes {
                        d.add_node(&n.text, WeilAlgebra::of(&self.object(obj)?))?;
                    }
                    for a in arrows {
                        d.add_arrow(&a.name.text, &a.source.text, &a.target.text, AlgebraHom::induced(self.map(&a.map)?))?;
                    }
                    self.diagrams.insert(name.text.clone(), d);
                    Ok(())
                })();
                Some((name.clone(), r))
            }
            Stmt::Cone { name, diagram, apex, legs } => {
                let r = self.build_cone(diagram, apex, legs).map(|c| {
                    self.cones.insert(name.text.clone(), (diagram.text.clone(), c));
                });
                Some((name.clone(), r))
            }
            Stmt::Check { .. } => None,
        }
    }

    pub fn cone(&self, n: &Name) -> Result<&(String, Cone)> {
        self.cones.get(&n.text).ok_or_else(|| self.dependency(n))
    }

    pub fn diagram(&self, n: &str) -> Option<&WeilDiagram> {
        self.diagrams.get(n)
    }

    pub fn map_named(&self, n: &str) -> Option<&InfinitesimalMap> {
        self.maps.get(n)
    }

    pub fn object_named(&self, n: &str) -> Option<&InfinitesimalObject> {
        self.objects.get(n)
    }
}

/// Elaborates every declaration in order; failures are collected.
pub fn elaborate(script: &Script) -> Environment {
    let mut env = Environment::default();
    for stmt in &script.stmts {
        if let Some((name, Err(e))) = env.elaborate_stmt(stmt) {
            env.failures.insert(name.text.clone(), (name.pos, e));
        }
    }
    env
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    #[test]
    fn pairwise_sugar() {
        let s = parse_script("obj Dpair = D(2)").unwrap();
        let env = elaborate(&s);
        assert_eq!(env.objects["Dpair"], InfinitesimalObject::simplicial(2, &[&[1, 2]]));
    }

    #[test]
    fn map_components_parse() {
        let s = parse_script("obj Dpair = D(2)\nmap plus : D -> Dpair := d1, d1").unwrap();
        match &s.stmts[1] {
            Stmt::Map { components, .. } => {
                assert_eq!(components, &vec![Polynomial::var(1, 0), Polynomial::var(1, 0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn object_e_parses() {
        let s = parse_script("obj E = D^4{(1,3)(2,3)(1,4)(2,4)(3,4)}").unwrap();
        let env = elaborate(&s);
        assert_eq!(
            env.objects["E"],
            InfinitesimalObject::simplicial(4, &[&[1, 3], &[2, 3], &[1, 4], &[2, 4], &[3, 4]])
        );
    }

    #[test]
    fn rational_literals_and_powers() {
        let comps = parse_components("3/2*d1^2 - (d1 + 2)*d2, -d1", 'd').unwrap();
        assert_eq!(comps[0].render("d"), "-2*d2 + 3/2*d1^2 - d1*d2");
        assert_eq!(comps[1], Polynomial::var(1, 0).neg());
        assert_eq!(parse_components("1/3", 'd').unwrap()[0], Polynomial::constant(0, crate::poly::rat(1, 3)));
        assert_eq!(parse_components("7", 'd').unwrap()[0], Polynomial::constant(0, int(7)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_script("obj A = D\nmap f : A -> A := d1 +").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err:?}");
        let err = parse_script("obj A = D\n  obj B = @").unwrap_err();
        assert_eq!(err, Error::Syntax { line: 2, column: 11, message: "unexpected character `@`".into() });
    }

    #[test]
    fn unresolved_and_duplicate_names() {
        let err = parse_script("obj A = D\nmap f : A -> B := d1").unwrap_err();
        assert_eq!(err, Error::Unresolved { line: 2, column: 14, name: "B".into() });
        let err = parse_script("obj A = D\nobj A = D^2").unwrap_err();
        assert_eq!(err, Error::Duplicate { line: 2, column: 5, kind: "obj", name: "A".into() });
    }

    #[test]
    fn ill_defined_map_is_recorded() {
        let s = parse_script("obj Sq = D^2\nmap s : Sq -> D := d1 + d2").unwrap();
        let env = elaborate(&s);
        let (_, err) = &env.failures["s"];
        assert_eq!(err, &Error::IllDefinedMap { generator: "X1^2".into(), residue: "2*X1*X2".into() });
    }

    #[test]
    fn round_trip_is_stable() {
        let text = "# comment\nobj A = D\nobj P = A (+) A (+) D\nobj H = D_2\nobj Q = D^3{(1,2)(2,3)}\nobj One = D^0\n\
                    map f : A -> P := d1, -d1, 1/2*d1\nmap z : A -> One :=\nfield X on 2 := x2^2, -3*x1\n\
                    diagram T { node a : A node b : One arrow e : a -> b := W[z] }\n\
                    cone c for T apex A leg a : W[f]\ncheck cone c\ncheck limit T apex A leg a : W[f]\n\
                    check map f\ncheck bracket X X\ncheck jacobi X X X\n";
        let first = parse_script(text).unwrap();
        let printed = print_script(&first);
        let second = parse_script(&printed).unwrap();
        assert_eq!(first, second);
        assert_eq!(print_script(&second), printed);
    }

    #[test]
    fn empty_script() {
        assert_eq!(parse_script("  # nothing\n").unwrap(), Script::default());
    }
}
