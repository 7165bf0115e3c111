//! Text format for structures and parametrized families.
//!
//! ```text
//! # standard Sasakian structure on R^3
//! name: darboux_3
//! dimension: 3
//! coords: x, y, z
//! domain: [-1, 1], [-1, 1], [-1, 1]
//! phi:
//!   0, 1, 0
//!   -1, 0, 0
//!   0, y, 0
//! xi: 0, 0, 2
//! eta: -0.5*y, 0, 0.5
//! g:
//!   0.25*y^2 + 0.25, 0, -0.25*y
//!   0.25, 0
//!   0.25
//! ```
//!
//! Matrix sections take one row per line; `g` rows may be full or start at
//! the diagonal. Vector sections may continue over several lines. An
//! optional `[family]` section declares parameters (`param: eps in [0, 1]`)
//! that the expressions above may use, a `sampler:` (`grid 5` or
//! `random 100 seed 0`) and the per-sample `points:`, `vectors:`, `seed:`.

use std::sync::Arc;

use crate::error::{ParseError, ParseErrorKind, Result};
use crate::expr::{CoordExpr, ExprNames, FUNCTIONS};
use crate::kernel::{MetricFieldExpr, OneFormFieldExpr, Tensor11FieldExpr, VectorFieldExpr};
use crate::sampling::{DomainBox, SamplingPlan};
use crate::search::{scan_plan, FamilySpec, FamilyTemplate, ParamRange, ParamSampler};
use crate::structure::AcmStructure;

type PResult<T> = std::result::Result<T, ParseError>;

/// A parsed structure file. `g` is stored in full, symmetric by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFile {
    pub name: String,
    pub coords: Vec<String>,
    pub domain: Vec<(f64, f64)>,
    pub phi: Vec<Vec<CoordExpr>>,
    pub xi: Vec<CoordExpr>,
    pub eta: Vec<CoordExpr>,
    pub g: Vec<Vec<CoordExpr>>,
    pub family: Option<FamilySection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySection {
    pub params: Vec<ParamRange>,
    pub sampler: ParamSampler,
    pub plan: SamplingPlan,
}

impl StructureFile {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn names(&self) -> ExprNames {
        let params = self.family.as_ref().map_or_else(Vec::new, |f| f.params.iter().map(|p| p.name.clone()).collect());
        ExprNames::new(self.coords.clone(), params)
    }

    pub fn from_structure(s: &AcmStructure) -> Self {
        Self {
            name: s.name.clone(),
            coords: s.coords.clone(),
            domain: s.domain.intervals.clone(),
            phi: s.phi.0.clone(),
            xi: s.xi.0.clone(),
            eta: s.eta.0.clone(),
            g: mirror_upper(s.g.0.clone()),
            family: None,
        }
    }

    pub fn from_family(f: &FamilySpec) -> Self {
        let t = &f.template;
        Self {
            name: f.name.clone(),
            coords: t.coords.clone(),
            domain: t.domain.intervals.clone(),
            phi: t.phi.0.clone(),
            xi: t.xi.0.clone(),
            eta: t.eta.0.clone(),
            g: mirror_upper(t.g.0.clone()),
            family: Some(FamilySection { params: f.params.clone(), sampler: f.sampler, plan: f.plan }),
        }
    }

    fn template(&self) -> Result<FamilyTemplate> {
        Ok(FamilyTemplate {
            coords: self.coords.clone(),
            phi: Tensor11FieldExpr(self.phi.clone()),
            xi: VectorFieldExpr(self.xi.clone()),
            eta: OneFormFieldExpr(self.eta.clone()),
            g: MetricFieldExpr(self.g.clone()),
            domain: DomainBox::new(self.domain.clone())?,
        })
    }

    /// The structure, if the file has no `[family]` section.
    pub fn to_structure(&self) -> Result<AcmStructure> {
        if self.family.is_some() {
            return Err(crate::Error::Invalid(format!("`{}` describes a family, not a single structure", self.name)));
        }
        let t = self.template()?;
        AcmStructure::new(self.name.clone(), t.coords, t.phi, t.xi, t.eta, t.g, t.domain)
    }

    /// The family, if the file has a `[family]` section.
    pub fn to_family(&self) -> Result<FamilySpec> {
        let fam = self
            .family
            .as_ref()
            .ok_or_else(|| crate::Error::Invalid(format!("`{}` has no [family] section", self.name)))?;
        Ok(FamilySpec {
            name: self.name.clone(),
            template: self.template()?,
            params: fam.params.clone(),
            sampler: fam.sampler,
            plan: fam.plan,
        })
    }

    /// Render in the text format; `parse` of the result gives back an equal
    /// value.
    pub fn to_text(&self) -> String {
        let names = self.names();
        let show = |e: &CoordExpr| e.display(&names).to_string();
        let row = |r: &[CoordExpr]| r.iter().map(show).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        out.push_str(&format!("name: {}\n", self.name));
        out.push_str(&format!("dimension: {}\n", self.dim()));
        out.push_str(&format!("coords: {}\n", self.coords.join(", ")));
        let dom: Vec<String> = self.domain.iter().map(|(lo, hi)| format!("[{lo:?}, {hi:?}]")).collect();
        out.push_str(&format!("domain: {}\n", dom.join(", ")));
        out.push_str("phi:\n");
        for r in &self.phi {
            out.push_str(&format!("  {}\n", row(r)));
        }
        out.push_str(&format!("xi: {}\n", row(&self.xi)));
        out.push_str(&format!("eta: {}\n", row(&self.eta)));
        out.push_str("g:\n");
        for (i, r) in self.g.iter().enumerate() {
            out.push_str(&format!("  {}\n", row(&r[i..])));
        }
        if let Some(f) = &self.family {
            out.push_str("[family]\n");
            for p in &f.params {
                out.push_str(&format!("param: {} in [{:?}, {:?}]\n", p.name, p.lo, p.hi));
            }
            match f.sampler {
                ParamSampler::Grid { per_axis } => out.push_str(&format!("sampler: grid {per_axis}\n")),
                ParamSampler::Random { count, seed } => out.push_str(&format!("sampler: random {count} seed {seed}\n")),
            }
            out.push_str(&format!("points: {}\nvectors: {}\nseed: {}\n", f.plan.points, f.plan.vectors, f.plan.seed));
        }
        out
    }
}

fn mirror_upper(mut m: Vec<Vec<CoordExpr>>) -> Vec<Vec<CoordExpr>> {
    for i in 0..m.len() {
        for j in 0..i {
            m[i][j] = m[j][i].clone();
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number { value: f64, integer: Option<i64> },
    Ident(String),
    Sym(char),
    Newline,
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Number { .. } => "number".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn err(kind: ParseErrorKind, at: &Token, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        kind,
        line: at.line,
        column: at.column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn syntax(at: &Token, expected: &[&str]) -> ParseError {
    let msg = format!("unexpected {}; expected {}", at.describe(), expected.join(" or "));
    err(ParseErrorKind::Syntax, at, msg, expected)
}

fn lex(src: &str) -> PResult<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in src.split('\n').enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let at = |i: usize| (li + 1, i + 1);
        while i < chars.len() {
            let c = chars[i];
            let (l, col) = at(i);
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut integer = true;
                if i < chars.len() && chars[i] == '.' {
                    integer = false;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        integer = false;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let tok = Token { tok: Tok::Sym('0'), line: l, column: col };
                let value: f64 = text.parse().map_err(|_| syntax(&tok, &["number"]))?;
                if !value.is_finite() {
                    return Err(err(ParseErrorKind::Syntax, &tok, format!("number `{text}` is out of range"), &["number"]));
                }
                let integer = if integer { text.parse::<i64>().ok() } else { None };
                out.push(Token { tok: Tok::Number { value, integer }, line: l, column: col });
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l, column: col });
            } else if "+-*/^(),:[]".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line: l, column: col });
                i += 1;
            } else {
                let tok = Token { tok: Tok::Sym(c), line: l, column: col };
                return Err(err(ParseErrorKind::Syntax, &tok, format!("unexpected character `{c}`"), &[]));
            }
        }
        out.push(Token { tok: Tok::Newline, line: li + 1, column: chars.len() + 1 });
    }
    let last = out.last().map_or((1, 1), |t| (t.line, t.column));
    out.push(Token { tok: Tok::Eof, line: last.0, column: last.1 });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Expressions

const EXPR_START: [&str; 4] = ["number", "identifier", "`(`", "`-`"];

/// Parses one expression from a token slice that ends with a sentinel
/// (newline, comma or end of input).
struct ExprParser<'a> {
    toks: &'a [Token],
    pos: usize,
    names: &'a ExprNames,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> &'a Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, k: usize) -> &'a Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> &'a Token {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expr(&mut self) -> PResult<CoordExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.sym('+') {
                self.bump();
                lhs = CoordExpr::Add(Arc::new(lhs), Arc::new(self.term()?));
            } else if self.sym('-') {
                self.bump();
                lhs = CoordExpr::Sub(Arc::new(lhs), Arc::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<CoordExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.sym('*') {
                self.bump();
                lhs = CoordExpr::Mul(Arc::new(lhs), Arc::new(self.unary()?));
            } else if self.sym('/') {
                self.bump();
                lhs = CoordExpr::Div(Arc::new(lhs), Arc::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<CoordExpr> {
        if self.sym('-') {
            // `-3` is a negative literal unless it is the base of a power.
            if let Tok::Number { value, .. } = self.peek_at(1).tok {
                if self.peek_at(2).tok != Tok::Sym('^') {
                    self.pos += 2;
                    return Ok(CoordExpr::Const(-value));
                }
            }
            self.bump();
            return Ok(CoordExpr::Neg(Arc::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<CoordExpr> {
        let base = self.primary()?;
        if !self.sym('^') {
            return Ok(base);
        }
        self.bump();
        let negative = self.sym('-');
        if negative {
            self.bump();
        }
        let t = self.bump();
        match t.tok {
            Tok::Number { integer: Some(n), .. } => {
                let n = if negative { -n } else { n };
                let n = i32::try_from(n)
                    .map_err(|_| err(ParseErrorKind::Syntax, t, "exponent out of range", &["integer exponent"]))?;
                Ok(CoordExpr::Pow(Arc::new(base), n))
            }
            _ => Err(syntax(t, &["integer exponent"])),
        }
    }

    fn primary(&mut self) -> PResult<CoordExpr> {
        let t = self.bump();
        match &t.tok {
            Tok::Number { value, .. } => Ok(CoordExpr::Const(*value)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::Sym(')') {
                    return Err(syntax(close, &["`)`", "operator"]));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if FUNCTIONS.contains(&name.as_str()) {
                    let open = self.bump();
                    if open.tok != Tok::Sym('(') {
                        return Err(syntax(open, &["`(`"]));
                    }
                    let arg = Arc::new(self.expr()?);
                    let close = self.bump();
                    if close.tok != Tok::Sym(')') {
                        return Err(syntax(close, &["`)`", "operator"]));
                    }
                    return Ok(match name.as_str() {
                        "sin" => CoordExpr::Sin(arg),
                        "cos" => CoordExpr::Cos(arg),
                        "exp" => CoordExpr::Exp(arg),
                        _ => CoordExpr::Log(arg),
                    });
                }
                if let Some(i) = self.names.coords.iter().position(|c| c == name) {
                    return Ok(CoordExpr::Var(i));
                }
                if let Some(i) = self.names.params.iter().position(|c| c == name) {
                    return Ok(CoordExpr::Param(i));
                }
                let mut known: Vec<&str> = self.names.coords.iter().map(String::as_str).collect();
                known.extend(self.names.params.iter().map(String::as_str));
                known.extend(FUNCTIONS);
                Err(err(
                    ParseErrorKind::UnknownIdentifier,
                    t,
                    format!("unknown identifier `{name}` (known: {})", known.join(", ")),
                    &known,
                ))
            }
            _ => Err(syntax(t, &EXPR_START)),
        }
    }
}

/// Parse a standalone expression over the given names.
pub fn parse_expr(src: &str, names: &ExprNames) -> PResult<CoordExpr> {
    let toks = lex(src)?;
    let toks: Vec<Token> = toks.into_iter().filter(|t| t.tok != Tok::Newline).collect();
    let mut p = ExprParser { toks: &toks, pos: 0, names };
    let e = p.expr()?;
    let rest = p.peek();
    if rest.tok != Tok::Eof {
        return Err(syntax(rest, &["operator", "end of input"]));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// File structure

const STRUCTURE_KEYS: [&str; 8] = ["name", "dimension", "coords", "domain", "phi", "xi", "eta", "g"];
const FAMILY_KEYS: [&str; 5] = ["param", "sampler", "points", "vectors", "seed"];

/// A section header and the token rows belonging to it. Each row ends with
/// its newline token.
struct Section<'a> {
    key: &'a Token,
    key_name: String,
    rows: Vec<&'a [Token]>,
}

fn split_lines(toks: &[Token]) -> Vec<&[Token]> {
    let mut lines = Vec::new();
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if matches!(t.tok, Tok::Newline | Tok::Eof) {
            lines.push(&toks[start..=i]);
            start = i + 1;
        }
    }
    lines
}

fn is_blank(line: &[Token]) -> bool {
    matches!(line[0].tok, Tok::Newline | Tok::Eof)
}

struct Sections<'a> {
    main: Vec<Section<'a>>,
    family: Option<(&'a Token, Vec<Section<'a>>)>,
}

fn sectionize(toks: &[Token]) -> PResult<Sections<'_>> {
    let mut main: Vec<Section> = Vec::new();
    let mut family: Option<(&Token, Vec<Section>)> = None;
    for line in split_lines(toks) {
        if is_blank(line) {
            continue;
        }
        // Every line ends with a newline or end-of-input token; reads past
        // the end see that token.
        let at = |i: usize| &line[i.min(line.len() - 1)];
        let first = at(0);
        if first.tok == Tok::Sym('[') {
            match &at(1).tok {
                Tok::Ident(k) if k == "family" => {}
                _ => return Err(syntax(at(1), &["`family`"])),
            }
            if at(2).tok != Tok::Sym(']') {
                return Err(syntax(at(2), &["`]`"]));
            }
            if !matches!(at(3).tok, Tok::Newline | Tok::Eof) {
                return Err(syntax(at(3), &["end of line"]));
            }
            if family.is_some() {
                return Err(err(ParseErrorKind::Syntax, first, "duplicate [family] section", &[]));
            }
            family = Some((first, Vec::new()));
            continue;
        }
        if let (Tok::Ident(k), Tok::Sym(':')) = (&first.tok, &at(1).tok) {
            let allowed: &[&str] = if family.is_some() { &FAMILY_KEYS } else { &STRUCTURE_KEYS };
            if !allowed.contains(&k.as_str()) {
                let expected: Vec<String> = allowed.iter().map(|s| format!("`{s}:`")).collect();
                let exp: Vec<&str> = expected.iter().map(String::as_str).collect();
                return Err(err(ParseErrorKind::Syntax, first, format!("unknown section `{k}`"), &exp));
            }
            let list = match &mut family {
                Some((_, f)) => f,
                None => &mut main,
            };
            if k != "param" && list.iter().any(|s| &s.key_name == k) {
                return Err(err(ParseErrorKind::Syntax, first, format!("duplicate section `{k}`"), &[]));
            }
            let rest = &line[2..];
            let rows = if is_blank(rest) { Vec::new() } else { vec![rest] };
            list.push(Section { key: first, key_name: k.clone(), rows });
            continue;
        }
        let list = match &mut family {
            Some((_, f)) => f,
            None => &mut main,
        };
        match list.last_mut() {
            Some(s) => s.rows.push(line),
            None => return Err(syntax(first, &["section header such as `name:`"])),
        }
    }
    Ok(Sections { main, family })
}

fn find<'s, 'a>(list: &'s [Section<'a>], key: &str) -> Option<&'s Section<'a>> {
    list.iter().find(|s| s.key_name == key)
}

fn end_token(toks: &[Token]) -> &Token {
    toks.last().expect("lexer always emits end of input")
}

fn require<'s, 'a>(list: &'s [Section<'a>], key: &str, eof: &Token) -> PResult<&'s Section<'a>> {
    find(list, key).ok_or_else(|| {
        let expected = format!("`{key}:`");
        err(ParseErrorKind::Syntax, eof, format!("missing section `{key}`"), &[expected.as_str()])
    })
}

/// Split a row at commas into item slices, each ending with a sentinel.
fn items(row: &[Token]) -> PResult<Vec<&[Token]>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, t) in row.iter().enumerate() {
        let end = matches!(t.tok, Tok::Newline | Tok::Eof);
        if t.tok == Tok::Sym(',') || end {
            if i == start {
                if end && out.is_empty() {
                    break;
                }
                return Err(syntax(t, &EXPR_START));
            }
            out.push(&row[start..=i]);
            start = i + 1;
            if end {
                break;
            }
        }
    }
    Ok(out)
}

fn parse_item(item: &[Token], names: &ExprNames) -> PResult<CoordExpr> {
    let mut p = ExprParser { toks: item, pos: 0, names };
    let e = p.expr()?;
    let rest = p.peek();
    if p.pos != item.len() - 1 {
        return Err(syntax(rest, &["operator", "`,`", "end of line"]));
    }
    Ok(e)
}

fn expr_row(row: &[Token], names: &ExprNames) -> PResult<Vec<CoordExpr>> {
    items(row)?.into_iter().map(|it| parse_item(it, names)).collect()
}

fn mismatch(at: &Token, what: &str, expected: usize, found: usize) -> ParseError {
    err(
        ParseErrorKind::DimensionMismatch,
        at,
        format!("{what}: expected {expected} entries, found {found}"),
        &[],
    )
}

fn vector_section(s: &Section, names: &ExprNames, d: usize) -> PResult<Vec<CoordExpr>> {
    let mut out = Vec::new();
    for row in &s.rows {
        out.extend(expr_row(row, names)?);
    }
    if out.len() != d {
        return Err(mismatch(s.key, &format!("section `{}`", s.key_name), d, out.len()));
    }
    Ok(out)
}

fn matrix_section(s: &Section, names: &ExprNames, d: usize, triangular: bool) -> PResult<Vec<Vec<CoordExpr>>> {
    if s.rows.len() != d {
        return Err(err(
            ParseErrorKind::DimensionMismatch,
            s.key,
            format!("section `{}`: expected {d} rows, found {}", s.key_name, s.rows.len()),
            &[],
        ));
    }
    let mut m = Vec::new();
    for (i, row) in s.rows.iter().enumerate() {
        let mut r = expr_row(row, names)?;
        if triangular && r.len() == d - i && i > 0 {
            let mut full = vec![CoordExpr::zero(); i];
            full.append(&mut r);
            r = full;
        } else if r.len() != d {
            let what = format!("section `{}` row {}", s.key_name, i + 1);
            return Err(mismatch(&row[0], &what, d, r.len()));
        }
        m.push(r);
    }
    Ok(m)
}

/// A signed literal: `-` followed by a number, or a number.
fn signed_number(toks: &[Token], pos: &mut usize) -> PResult<f64> {
    let neg = toks[*pos].tok == Tok::Sym('-');
    if neg {
        *pos += 1;
    }
    match toks[*pos].tok {
        Tok::Number { value, .. } => {
            *pos += 1;
            Ok(if neg { -value } else { value })
        }
        _ => Err(syntax(&toks[*pos], &["number"])),
    }
}

fn expect_sym(toks: &[Token], pos: &mut usize, c: char) -> PResult<()> {
    if toks[*pos].tok == Tok::Sym(c) {
        *pos += 1;
        Ok(())
    } else {
        let want = format!("`{c}`");
        Err(syntax(&toks[*pos], &[want.as_str()]))
    }
}

/// `[lo, hi]`
fn interval(toks: &[Token], pos: &mut usize) -> PResult<(f64, f64)> {
    let open = &toks[*pos];
    expect_sym(toks, pos, '[')?;
    let lo = signed_number(toks, pos)?;
    expect_sym(toks, pos, ',')?;
    let hi = signed_number(toks, pos)?;
    expect_sym(toks, pos, ']')?;
    if lo > hi {
        return Err(err(ParseErrorKind::Syntax, open, format!("empty interval [{lo}, {hi}]"), &[]));
    }
    Ok((lo, hi))
}

fn at_end(toks: &[Token], pos: usize) -> PResult<()> {
    if matches!(toks[pos].tok, Tok::Newline | Tok::Eof) {
        Ok(())
    } else {
        Err(syntax(&toks[pos], &["end of line"]))
    }
}

fn single_row<'a>(s: &Section<'a>) -> PResult<&'a [Token]> {
    match s.rows.as_slice() {
        [row] => Ok(row),
        [] => Err(syntax(&s.key, &["value after `:`"])),
        [_, second, ..] => Err(syntax(&second[0], &["section header"])),
    }
}

fn identifier(toks: &[Token], pos: &mut usize) -> PResult<String> {
    match &toks[*pos].tok {
        Tok::Ident(s) => {
            *pos += 1;
            Ok(s.clone())
        }
        _ => Err(syntax(&toks[*pos], &["identifier"])),
    }
}

fn unsigned(toks: &[Token], pos: &mut usize) -> PResult<u64> {
    match toks[*pos].tok {
        Tok::Number { integer: Some(n), .. } if n >= 0 => {
            *pos += 1;
            Ok(n as u64)
        }
        _ => Err(syntax(&toks[*pos], &["non-negative integer"])),
    }
}

fn keyword(toks: &[Token], pos: &mut usize, word: &str) -> PResult<()> {
    if toks[*pos].tok == Tok::Ident(word.into()) {
        *pos += 1;
        Ok(())
    } else {
        let want = format!("`{word}`");
        Err(syntax(&toks[*pos], &[want.as_str()]))
    }
}

fn check_new_name(t: &Token, name: &str, taken: &[String]) -> PResult<()> {
    if FUNCTIONS.contains(&name) || name == "in" {
        return Err(err(ParseErrorKind::Syntax, t, format!("`{name}` is reserved"), &["identifier"]));
    }
    if taken.iter().any(|n| n == name) {
        return Err(err(ParseErrorKind::Syntax, t, format!("`{name}` is declared twice"), &[]));
    }
    Ok(())
}

fn family_section(list: &[Section], coords: &[String]) -> PResult<FamilySection> {
    let mut params: Vec<ParamRange> = Vec::new();
    let mut taken: Vec<String> = coords.to_vec();
    for s in list.iter().filter(|s| s.key_name == "param") {
        let row = single_row(s)?;
        let mut pos = 0;
        let name_tok = &row[0];
        let name = identifier(row, &mut pos)?;
        check_new_name(name_tok, &name, &taken)?;
        keyword(row, &mut pos, "in")?;
        let (lo, hi) = interval(row, &mut pos)?;
        at_end(row, pos)?;
        taken.push(name.clone());
        params.push(ParamRange { name, lo, hi });
    }
    let sampler = match find(list, "sampler") {
        None => ParamSampler::Random { count: 100, seed: 0 },
        Some(s) => {
            let row = single_row(s)?;
            let mut pos = 0;
            let kind_tok = &row[0];
            let kind = identifier(row, &mut pos)?;
            let out = match kind.as_str() {
                "grid" => ParamSampler::Grid { per_axis: unsigned(row, &mut pos)? as usize },
                "random" => {
                    let count = unsigned(row, &mut pos)? as usize;
                    let seed = if row[pos].tok == Tok::Ident("seed".into()) {
                        pos += 1;
                        unsigned(row, &mut pos)?
                    } else {
                        0
                    };
                    ParamSampler::Random { count, seed }
                }
                _ => return Err(syntax(kind_tok, &["`grid`", "`random`"])),
            };
            at_end(row, pos)?;
            out
        }
    };
    let mut plan = scan_plan();
    for (key, slot) in [("points", 0), ("vectors", 1), ("seed", 2)] {
        if let Some(s) = find(list, key) {
            let row = single_row(s)?;
            let mut pos = 0;
            let v = unsigned(row, &mut pos)?;
            at_end(row, pos)?;
            match slot {
                0 => plan.points = v as usize,
                1 => plan.vectors = v as usize,
                _ => plan.seed = v,
            }
        }
    }
    Ok(FamilySection { params, sampler, plan })
}

/// Parse a structure or family file. Every failure carries a 1-based line
/// and column.
pub fn parse(src: &str) -> PResult<StructureFile> {
    let toks = lex(src)?;
    let eof = end_token(&toks);
    let sections = sectionize(&toks)?;
    let main = &sections.main;

    let name_sec = require(main, "name", eof)?;
    let row = single_row(name_sec)?;
    let mut pos = 0;
    let name = identifier(row, &mut pos)?;
    at_end(row, pos)?;

    let coords_sec = require(main, "coords", eof)?;
    let mut coords: Vec<String> = Vec::new();
    for item in items(single_row(coords_sec)?)? {
        let mut pos = 0;
        let c = identifier(item, &mut pos)?;
        if !matches!(item[pos].tok, Tok::Sym(',') | Tok::Newline | Tok::Eof) {
            return Err(syntax(&item[pos], &["`,`", "end of line"]));
        }
        check_new_name(&item[0], &c, &coords)?;
        coords.push(c);
    }
    let d = coords.len();
    if let Some(s) = find(main, "dimension") {
        let row = single_row(s)?;
        let mut pos = 0;
        let dim_tok = &row[0];
        let dim = unsigned(row, &mut pos)? as usize;
        at_end(row, pos)?;
        if dim < 3 || dim % 2 == 0 {
            return Err(err(
                ParseErrorKind::NonOddDimension,
                dim_tok,
                format!("dimension must be odd and at least 3, got {dim}"),
                &[],
            ));
        }
        if dim != d {
            return Err(mismatch(coords_sec.key, "section `coords`", dim, d));
        }
    }
    if d < 3 || d % 2 == 0 {
        return Err(err(
            ParseErrorKind::NonOddDimension,
            coords_sec.key,
            format!("dimension must be odd and at least 3, got {d} coordinates"),
            &[],
        ));
    }

    let family = match &sections.family {
        Some((_, list)) => Some(family_section(list, &coords)?),
        None => None,
    };
    let params = family.as_ref().map_or_else(Vec::new, |f| f.params.iter().map(|p| p.name.clone()).collect());
    let names = ExprNames::new(coords.clone(), params);

    let domain = match find(main, "domain") {
        None => vec![(-1.0, 1.0); d],
        Some(s) => {
            let row = single_row(s)?;
            let mut pos = 0;
            let mut out = vec![interval(row, &mut pos)?];
            while row[pos].tok == Tok::Sym(',') {
                pos += 1;
                out.push(interval(row, &mut pos)?);
            }
            at_end(row, pos)?;
            if out.len() != d {
                return Err(mismatch(s.key, "section `domain`", d, out.len()));
            }
            out
        }
    };

    let phi = matrix_section(require(main, "phi", eof)?, &names, d, false)?;
    let xi = vector_section(require(main, "xi", eof)?, &names, d)?;
    let eta = vector_section(require(main, "eta", eof)?, &names, d)?;
    let g_sec = require(main, "g", eof)?;
    let g_full = matrix_section(g_sec, &names, d, true)?;
    check_symmetric(&g_full, g_sec, &domain, &family)?;
    let g = mirror_upper(g_full);

    Ok(StructureFile { name, coords, domain, phi, xi, eta, g, family })
}

/// Lower-triangle entries given explicitly must agree with the upper ones;
/// compared at the domain center (parameters at their midpoints).
fn check_symmetric(
    g: &[Vec<CoordExpr>],
    s: &Section,
    domain: &[(f64, f64)],
    family: &Option<FamilySection>,
) -> PResult<()> {
    let center: Vec<f64> = domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mids: Vec<f64> = family.as_ref().map_or_else(Vec::new, |f| f.params.iter().map(|p| 0.5 * (p.lo + p.hi)).collect());
    let value = |e: &CoordExpr| e.substitute_params(&mids).and_then(|e| e.eval(&center)).ok();
    for i in 0..g.len() {
        for j in 0..i {
            if g[i][j] == g[j][i] || (g[i][j].is_zero() && s.rows[i].len() < g.len() + 1) {
                continue;
            }
            if let (Some(a), Some(b)) = (value(&g[i][j]), value(&g[j][i])) {
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        &s.rows[i][0],
                        format!("g is not symmetric: entry ({}, {}) differs from ({}, {})", i + 1, j + 1, j + 1, i + 1),
                        &[],
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::error::ParseErrorKind as K;

    const DARBOUX: &str = "\
# standard Sasakian R^3
name: darboux_3
dimension: 3
coords: x, y, z
domain: [-1, 1], [-1, 1], [-1, 1]
phi:
  0, 1, 0
  -1, 0, 0
  0, y, 0
xi: 0, 0, 2
eta: -0.5*y, 0, 0.5
g:
  0.25*y^2 + 0.25, 0, -0.25*y
  0.25, 0
  0.25
";

    #[test]
    fn parses_hand_written_file() {
        let f = parse(DARBOUX).unwrap();
        assert_eq!(f.name, "darboux_3");
        assert_eq!(f.coords, vec!["x", "y", "z"]);
        assert_eq!(f.g[2][0], f.g[0][2]);
        assert_eq!(f.phi[1][0], CoordExpr::Const(-1.0));
        let s = f.to_structure().unwrap();
        let p = crate::kernel::ChartPoint::new(vec![0.2, 0.4, -0.3]).unwrap();
        let want = catalog::standard_darboux(1).structure.g.at(&p).unwrap().g;
        let got = s.g.at(&p).unwrap().g;
        for (a, b) in want.iter().flatten().zip(got.iter().flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn catalog_round_trips() {
        for e in catalog::entries() {
            let f = StructureFile::from_structure(&e.structure);
            let text = f.to_text();
            let back = parse(&text).unwrap_or_else(|err| panic!("{}: {err}\n{text}", e.name));
            assert_eq!(back, f, "{text}");
        }
    }

    #[test]
    fn family_round_trips() {
        for fam in crate::search::builtin_families() {
            let f = StructureFile::from_family(&fam);
            let text = f.to_text();
            let back = parse(&text).unwrap_or_else(|err| panic!("{}: {err}\n{text}", fam.name));
            assert_eq!(back, f);
            assert_eq!(back.to_family().unwrap().parameter_values(), fam.parameter_values());
        }
    }

    #[test]
    fn printer_output_reparses_to_same_tree() {
        let names = ExprNames::new(vec!["x".into(), "y".into()], vec![]);
        for src in ["-2.0^2", "(-2.0)^2", "-x^2", "a", "x - -3.0", "-(2.0)", "x^-1", "(x^2)^3", "sin(-x)*-1.5e-7", "x/(y/x)", "--x"] {
            let Ok(e) = parse_expr(src, &names) else { continue };
            let printed = e.display(&names).to_string();
            assert_eq!(parse_expr(&printed, &names).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn minus_literal_binds_below_power() {
        let names = ExprNames::new(vec!["x".into()], vec![]);
        assert_eq!(parse_expr("-2^2", &names).unwrap().eval(&[0.0]).unwrap(), -4.0);
        assert_eq!(parse_expr("-2*x", &names).unwrap().eval(&[3.0]).unwrap(), -6.0);
        assert_eq!(parse_expr("2-3-4", &names).unwrap().eval(&[0.0]).unwrap(), -5.0);
        assert_eq!(parse_expr("2^-1", &names).unwrap().eval(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn unknown_identifier_is_located() {
        let src = DARBOUX.replace("0, y, 0", "0, w, 0");
        let e = parse(&src).unwrap_err();
        assert_eq!(e.kind, K::UnknownIdentifier);
        assert_eq!((e.line, e.column), (9, 6));
    }

    #[test]
    fn syntax_error_lists_expected_tokens() {
        let src = DARBOUX.replace("xi: 0, 0, 2", "xi: 0, 0 +, 2");
        let e = parse(&src).unwrap_err();
        assert_eq!(e.kind, K::Syntax);
        assert_eq!(e.line, 10);
        assert_eq!(e.column, 11);
        assert!(e.expected.contains(&"number".to_string()));
    }

    #[test]
    fn dimension_errors() {
        let e = parse(&DARBOUX.replace("dimension: 3", "dimension: 4")).unwrap_err();
        assert_eq!(e.kind, K::NonOddDimension);
        let e = parse(&DARBOUX.replace("eta: -0.5*y, 0, 0.5", "eta: -0.5*y, 0")).unwrap_err();
        assert_eq!(e.kind, K::DimensionMismatch);
        assert!(e.message.contains("eta"), "{}", e.message);
        let e = parse(&DARBOUX.replace("  0.25, 0\n", "  0.25, 0, 1, 2\n")).unwrap_err();
        assert_eq!(e.kind, K::DimensionMismatch);
        assert!(e.message.contains("`g` row 2"), "{}", e.message);
    }

    #[test]
    fn asymmetric_full_metric_is_rejected() {
        let src = DARBOUX.replace("  0.25, 0\n", "  1, 0.25, 0\n");
        let e = parse(&src).unwrap_err();
        assert!(e.message.contains("symmetric"), "{}", e.message);
    }

    #[test]
    fn parameters_outside_family_are_unknown() {
        let src = DARBOUX.replace("xi: 0, 0, 2", "xi: 0, 0, 2 + eps");
        assert_eq!(parse(&src).unwrap_err().kind, K::UnknownIdentifier);
        let fam = format!("{}[family]\nparam: eps in [0, 1]\nsampler: grid 3\n", src);
        let f = parse(&fam).unwrap();
        assert_eq!(f.to_family().unwrap().parameter_values().len(), 3);
        assert!(f.to_structure().is_err());
    }
}
