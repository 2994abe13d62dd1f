//! The modal first-order language: signatures, contexts, terms, and
//! formulas with box abstraction.
//!
//! Variables are de Bruijn *levels* into an ambient context: `Var(i)`
//! is slot `i` counting from the left, and a quantifier binds the next
//! slot after the context it lives over.  Levels are stable under
//! appending to the context, so weakening is a no-op and substitution
//! of context variables can never capture.  Surface names are stored
//! on binders and contexts purely for printing; [`alpha_eq`] ignores
//! them.
//!
//! A box abstraction `box {ctx | body}(args)` carries its own context.
//! Its body is closed over that context alone, so substitution rewrites
//! the argument terms and never enters the body.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SyntaxError {
    UnknownSort(String),
    UnknownPredicate(String),
    UnknownFunction(String),
    UnknownVariable(String),
    /// A level pointing outside the context it is read against.
    BadLevel(usize),
    DuplicateSymbol(String),
    DuplicateVariable(String),
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    SortMismatch {
        expected: String,
        got: String,
    },
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::UnknownSort(s) => write!(f, "unknown sort {s}"),
            SyntaxError::UnknownPredicate(s) => write!(f, "unknown predicate {s}"),
            SyntaxError::UnknownFunction(s) => write!(f, "unknown function {s}"),
            SyntaxError::UnknownVariable(s) => write!(f, "unknown variable {s}"),
            SyntaxError::BadLevel(i) => write!(f, "variable level {i} outside the context"),
            SyntaxError::DuplicateSymbol(s) => write!(f, "duplicate symbol {s}"),
            SyntaxError::DuplicateVariable(s) => write!(f, "duplicate variable {s}"),
            SyntaxError::ArityMismatch {
                symbol,
                expected,
                got,
            } => write!(f, "{symbol} expects {expected} arguments, got {got}"),
            SyntaxError::SortMismatch { expected, got } => {
                write!(f, "expected sort {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for SyntaxError {}

/// Sorts, predicate symbols, and function symbols.  Symbol names are
/// globally distinct so a parser can tell atoms from terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    sorts: Vec<String>,
    preds: BTreeMap<String, Vec<String>>,
    funcs: BTreeMap<String, (Vec<String>, String)>,
}

impl Signature {
    pub fn new(
        sorts: Vec<String>,
        preds: Vec<(String, Vec<String>)>,
        funcs: Vec<(String, Vec<String>, String)>,
    ) -> Result<Signature, SyntaxError> {
        let mut sig = Signature {
            sorts: Vec::new(),
            preds: BTreeMap::new(),
            funcs: BTreeMap::new(),
        };
        for s in sorts {
            if sig.sorts.contains(&s) {
                return Err(SyntaxError::DuplicateSymbol(s));
            }
            sig.sorts.push(s);
        }
        for (name, args) in preds {
            sig.add_pred(name, args)?;
        }
        for (name, args, result) in funcs {
            sig.add_func(name, args, result)?;
        }
        Ok(sig)
    }

    pub fn add_pred(&mut self, name: String, args: Vec<String>) -> Result<(), SyntaxError> {
        if self.preds.contains_key(&name) || self.funcs.contains_key(&name) {
            return Err(SyntaxError::DuplicateSymbol(name));
        }
        for s in &args {
            if !self.sorts.contains(s) {
                return Err(SyntaxError::UnknownSort(s.clone()));
            }
        }
        self.preds.insert(name, args);
        Ok(())
    }

    pub fn add_func(
        &mut self,
        name: String,
        args: Vec<String>,
        result: String,
    ) -> Result<(), SyntaxError> {
        if self.preds.contains_key(&name) || self.funcs.contains_key(&name) {
            return Err(SyntaxError::DuplicateSymbol(name));
        }
        for s in args.iter().chain([&result]) {
            if !self.sorts.contains(s) {
                return Err(SyntaxError::UnknownSort(s.clone()));
            }
        }
        self.funcs.insert(name, (args, result));
        Ok(())
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
    }

    pub fn pred(&self, name: &str) -> Option<&[String]> {
        self.preds.get(name).map(Vec::as_slice)
    }

    pub fn func(&self, name: &str) -> Option<(&[String], &str)> {
        self.funcs
            .get(name)
            .map(|(args, result)| (args.as_slice(), result.as_str()))
    }

    /// Predicate names in sorted order.
    pub fn pred_names(&self) -> impl Iterator<Item = &str> {
        self.preds.keys().map(String::as_str)
    }

    /// Function names in sorted order.
    pub fn func_names(&self) -> impl Iterator<Item = &str> {
        self.funcs.keys().map(String::as_str)
    }
}

/// An ordered list of named, sorted variables.  Names are distinct.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Context {
    entries: Vec<(String, String)>,
}

impl Context {
    pub fn empty() -> Context {
        Context::default()
    }

    pub fn new(entries: Vec<(String, String)>) -> Result<Context, SyntaxError> {
        for (i, (name, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(SyntaxError::DuplicateVariable(name.clone()));
            }
        }
        Ok(Context { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn name(&self, slot: usize) -> &str {
        &self.entries[slot].0
    }

    pub fn sort(&self, slot: usize) -> &str {
        &self.entries[slot].1
    }

    pub fn sorts(&self) -> Vec<String> {
        self.entries.iter().map(|(_, s)| s.clone()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Innermost slot with the given name.
    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.entries.iter().rposition(|(n, _)| n == name)
    }

    /// The context with one more entry.  Shadowing is allowed here; the
    /// printer disambiguates when it matters.
    pub fn extended(&self, name: &str, sort: &str) -> Context {
        let mut entries = self.entries.clone();
        entries.push((name.to_owned(), sort.to_owned()));
        Context { entries }
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Term {
    /// Level into the ambient context.
    Var(usize),
    App(String, Vec<Term>),
}

/// `box {ctx | body}(args)` without the arguments.  The body is a
/// formula over `ctx` alone.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoxAbstraction {
    pub ctx: Context,
    pub body: Box<Formula>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Bottom,
    Implies(Box<Formula>, Box<Formula>),
    /// Binds the next level after the ambient context; the stored name
    /// and sort are the binder surface.
    Forall(String, String, Box<Formula>),
    BoxApp(BoxAbstraction, Vec<Term>),
}

/// `~a` as the primitive `a -> false`.
pub fn not(f: Formula) -> Formula {
    Formula::Implies(Box::new(f), Box::new(Formula::Bottom))
}

/// `a & b` as `~(a -> ~b)`.
pub fn and(a: Formula, b: Formula) -> Formula {
    not(Formula::Implies(Box::new(a), Box::new(not(b))))
}

/// `a | b` as `~a -> b`.
pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(not(a)), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn forall(name: &str, sort: &str, body: Formula) -> Formula {
    Formula::Forall(name.to_owned(), sort.to_owned(), Box::new(body))
}

/// `exists x:s. f` as `~forall x:s. ~f`.
pub fn exists(name: &str, sort: &str, body: Formula) -> Formula {
    not(forall(name, sort, not(body)))
}

/// `dia {ctx | body}(args)` as `~box {ctx | ~body}(args)`.
pub fn dia(ctx: Context, body: Formula, args: Vec<Term>) -> Formula {
    not(Formula::BoxApp(
        BoxAbstraction {
            ctx,
            body: Box::new(not(body)),
        },
        args,
    ))
}

/// Sort of a term over a context, with full symbol checking.
pub fn term_sort(sig: &Signature, ctx: &Context, t: &Term) -> Result<String, SyntaxError> {
    match t {
        Term::Var(i) => {
            if *i >= ctx.len() {
                return Err(SyntaxError::BadLevel(*i));
            }
            Ok(ctx.sort(*i).to_owned())
        }
        Term::App(name, args) => {
            let (arg_sorts, result) = sig
                .func(name)
                .ok_or_else(|| SyntaxError::UnknownFunction(name.clone()))?;
            if arg_sorts.len() != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: name.clone(),
                    expected: arg_sorts.len(),
                    got: args.len(),
                });
            }
            let result = result.to_owned();
            let arg_sorts: Vec<String> = arg_sorts.to_vec();
            for (want, arg) in arg_sorts.iter().zip(args) {
                let got = term_sort(sig, ctx, arg)?;
                if got != *want {
                    return Err(SyntaxError::SortMismatch {
                        expected: want.clone(),
                        got,
                    });
                }
            }
            Ok(result)
        }
    }
}

/// Full well-formedness of a formula over a context: symbols known,
/// arities and sorts matching, box contexts valid and closed.
pub fn well_formed(sig: &Signature, ctx: &Context, f: &Formula) -> Result<(), SyntaxError> {
    match f {
        Formula::Atom(name, args) => {
            let arg_sorts = sig
                .pred(name)
                .ok_or_else(|| SyntaxError::UnknownPredicate(name.clone()))?
                .to_vec();
            if arg_sorts.len() != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: name.clone(),
                    expected: arg_sorts.len(),
                    got: args.len(),
                });
            }
            for (want, arg) in arg_sorts.iter().zip(args) {
                let got = term_sort(sig, ctx, arg)?;
                if got != *want {
                    return Err(SyntaxError::SortMismatch {
                        expected: want.clone(),
                        got,
                    });
                }
            }
            Ok(())
        }
        Formula::Eq(a, b) => {
            let sa = term_sort(sig, ctx, a)?;
            let sb = term_sort(sig, ctx, b)?;
            if sa != sb {
                return Err(SyntaxError::SortMismatch {
                    expected: sa,
                    got: sb,
                });
            }
            Ok(())
        }
        Formula::Bottom => Ok(()),
        Formula::Implies(a, b) => {
            well_formed(sig, ctx, a)?;
            well_formed(sig, ctx, b)
        }
        Formula::Forall(name, sort, body) => {
            if !sig.has_sort(sort) {
                return Err(SyntaxError::UnknownSort(sort.clone()));
            }
            well_formed(sig, &ctx.extended(name, sort), body)
        }
        Formula::BoxApp(bx, args) => {
            for (name, sort) in bx.ctx.entries() {
                if !sig.has_sort(sort) {
                    return Err(SyntaxError::UnknownSort(sort.clone()));
                }
                let _ = name;
            }
            well_formed(sig, &bx.ctx, &bx.body)?;
            if bx.ctx.len() != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: "box".to_string(),
                    expected: bx.ctx.len(),
                    got: args.len(),
                });
            }
            for (slot, arg) in args.iter().enumerate() {
                let got = term_sort(sig, ctx, arg)?;
                if got != bx.ctx.sort(slot) {
                    return Err(SyntaxError::SortMismatch {
                        expected: bx.ctx.sort(slot).to_owned(),
                        got,
                    });
                }
            }
            Ok(())
        }
    }
}

/// Validating constructors: build the node, then check it.
pub fn mk_atom(
    sig: &Signature,
    ctx: &Context,
    name: &str,
    args: Vec<Term>,
) -> Result<Formula, SyntaxError> {
    let f = Formula::Atom(name.to_owned(), args);
    well_formed(sig, ctx, &f)?;
    Ok(f)
}

pub fn mk_eq(sig: &Signature, ctx: &Context, a: Term, b: Term) -> Result<Formula, SyntaxError> {
    let f = Formula::Eq(a, b);
    well_formed(sig, ctx, &f)?;
    Ok(f)
}

pub fn mk_box(
    sig: &Signature,
    ctx: &Context,
    box_ctx: Context,
    body: Formula,
    args: Vec<Term>,
) -> Result<Formula, SyntaxError> {
    let f = Formula::BoxApp(
        BoxAbstraction {
            ctx: box_ctx,
            body: Box::new(body),
        },
        args,
    );
    well_formed(sig, ctx, &f)?;
    Ok(f)
}

/// The formula with all surface names blanked.  Two formulas are
/// alpha-equivalent exactly when their canonical forms are equal.  The
/// result is for comparison only; its contexts bypass the distinctness
/// rule and it must not be printed.
pub fn canonical(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_, _) | Formula::Eq(_, _) | Formula::Bottom => f.clone(),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(canonical(a)), Box::new(canonical(b)))
        }
        Formula::Forall(_, sort, body) => {
            Formula::Forall(String::new(), sort.clone(), Box::new(canonical(body)))
        }
        Formula::BoxApp(bx, args) => Formula::BoxApp(
            BoxAbstraction {
                ctx: Context {
                    entries: bx
                        .ctx
                        .entries()
                        .iter()
                        .map(|(_, s)| (String::new(), s.clone()))
                        .collect(),
                },
                body: Box::new(canonical(&bx.body)),
            },
            args.clone(),
        ),
    }
}

/// Structural equality ignoring binder and context surface names.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    canonical(a) == canonical(b)
}

/// Alpha-equality of box abstractions: same context sorts, bodies
/// alpha-equal.
pub fn alpha_eq_box(a: &BoxAbstraction, b: &BoxAbstraction) -> bool {
    a.ctx.sorts() == b.ctx.sorts() && alpha_eq(&a.body, &b.body)
}

/// Ambient levels actually used by the formula.  Box bodies contribute
/// nothing (they are closed); binder levels are filtered by `ambient`.
pub fn free_slots(f: &Formula, ambient: usize) -> BTreeSet<usize> {
    fn term_slots(t: &Term, ambient: usize, out: &mut BTreeSet<usize>) {
        match t {
            Term::Var(i) => {
                if *i < ambient {
                    out.insert(*i);
                }
            }
            Term::App(_, args) => {
                for a in args {
                    term_slots(a, ambient, out);
                }
            }
        }
    }
    fn go(f: &Formula, ambient: usize, out: &mut BTreeSet<usize>) {
        match f {
            Formula::Atom(_, args) => {
                for a in args {
                    term_slots(a, ambient, out);
                }
            }
            Formula::Eq(a, b) => {
                term_slots(a, ambient, out);
                term_slots(b, ambient, out);
            }
            Formula::Bottom => {}
            Formula::Implies(a, b) => {
                go(a, ambient, out);
                go(b, ambient, out);
            }
            Formula::Forall(_, _, body) => go(body, ambient, out),
            Formula::BoxApp(_, args) => {
                for a in args {
                    term_slots(a, ambient, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, ambient, &mut out);
    out
}

fn substitute_term(t: &Term, map: &BTreeMap<usize, Term>) -> Term {
    match t {
        Term::Var(i) => map.get(i).cloned().unwrap_or_else(|| t.clone()),
        Term::App(name, args) => Term::App(
            name.clone(),
            args.iter().map(|a| substitute_term(a, map)).collect(),
        ),
    }
}

/// Context-preserving substitution: replaces mapped levels, leaves the
/// rest alone.  Replacement terms live over the same ambient context,
/// so descending under a binder needs no adjustment; keys must be
/// ambient levels, never binder levels.  Box bodies are never entered:
/// only box arguments are rewritten.
pub fn substitute(f: &Formula, map: &BTreeMap<usize, Term>) -> Formula {
    match f {
        Formula::Atom(name, args) => Formula::Atom(
            name.clone(),
            args.iter().map(|a| substitute_term(a, map)).collect(),
        ),
        Formula::Eq(a, b) => Formula::Eq(substitute_term(a, map), substitute_term(b, map)),
        Formula::Bottom => Formula::Bottom,
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(substitute(a, map)),
            Box::new(substitute(b, map)),
        ),
        Formula::Forall(name, sort, body) => Formula::Forall(
            name.clone(),
            sort.clone(),
            Box::new(substitute(body, map)),
        ),
        Formula::BoxApp(bx, args) => Formula::BoxApp(
            bx.clone(),
            args.iter().map(|a| substitute_term(a, map)).collect(),
        ),
    }
}

pub fn substitute_one(f: &Formula, slot: usize, t: &Term) -> Formula {
    let mut map = BTreeMap::new();
    map.insert(slot, t.clone());
    substitute(f, &map)
}

fn reindex_term(t: &Term, terms: &[Term]) -> Term {
    match t {
        Term::Var(i) => terms[*i].clone(),
        Term::App(name, args) => Term::App(
            name.clone(),
            args.iter().map(|a| reindex_term(a, terms)).collect(),
        ),
    }
}

/// Total substitution into a new context: `terms[i]` replaces level `i`
/// and is a term over the target context of length `to_len`.  Binder
/// levels are renumbered to sit after the target context, which is what
/// makes instantiation (a context that shrinks) and weakening or
/// renaming (an arbitrary re-wiring) both come out right.  Box bodies
/// stay untouched.
pub fn reindex_substitute(f: &Formula, terms: &[Term], to_len: usize) -> Formula {
    match f {
        Formula::Atom(name, args) => Formula::Atom(
            name.clone(),
            args.iter().map(|a| reindex_term(a, terms)).collect(),
        ),
        Formula::Eq(a, b) => Formula::Eq(reindex_term(a, terms), reindex_term(b, terms)),
        Formula::Bottom => Formula::Bottom,
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(reindex_substitute(a, terms, to_len)),
            Box::new(reindex_substitute(b, terms, to_len)),
        ),
        Formula::Forall(name, sort, body) => {
            let mut extended = terms.to_vec();
            extended.push(Term::Var(to_len));
            Formula::Forall(
                name.clone(),
                sort.clone(),
                Box::new(reindex_substitute(body, &extended, to_len + 1)),
            )
        }
        Formula::BoxApp(bx, args) => Formula::BoxApp(
            bx.clone(),
            args.iter().map(|a| reindex_term(a, terms)).collect(),
        ),
    }
}

/// Instantiates the last context variable: `body` lives over a context
/// of length `ctx_len + 1` and the result lives over the first
/// `ctx_len` slots with `t` in place of the last.
pub fn instantiate_last(body: &Formula, ctx_len: usize, t: &Term) -> Formula {
    let mut terms: Vec<Term> = (0..ctx_len).map(Term::Var).collect();
    terms.push(t.clone());
    reindex_substitute(body, &terms, ctx_len)
}

/// Every box abstraction in the formula, innermost first, deduplicated
/// up to alpha-equivalence.  Traversal is depth-first left-to-right, so
/// the order is deterministic.
pub fn boxed_closure(f: &Formula) -> Vec<BoxAbstraction> {
    fn go(f: &Formula, out: &mut Vec<BoxAbstraction>) {
        match f {
            Formula::Atom(_, _) | Formula::Eq(_, _) | Formula::Bottom => {}
            Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Forall(_, _, body) => go(body, out),
            Formula::BoxApp(bx, _) => {
                go(&bx.body, out);
                if !out.iter().any(|seen| alpha_eq_box(seen, bx)) {
                    out.push(bx.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

const KEYWORDS: [&str; 6] = ["forall", "exists", "box", "dia", "false", "ctx"];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A parse failure with its position, 1-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, PartialEq, Eq, Debug)]
enum TokKind {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Bar,
    Turnstile,
    Arrow,
    Equal,
    Tilde,
    Amp,
    Eof,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("'{s}'"),
            TokKind::LParen => "'('".to_string(),
            TokKind::RParen => "')'".to_string(),
            TokKind::LBrace => "'{'".to_string(),
            TokKind::RBrace => "'}'".to_string(),
            TokKind::Comma => "','".to_string(),
            TokKind::Dot => "'.'".to_string(),
            TokKind::Colon => "':'".to_string(),
            TokKind::Bar => "'|'".to_string(),
            TokKind::Turnstile => "'|-'".to_string(),
            TokKind::Arrow => "'->'".to_string(),
            TokKind::Equal => "'='".to_string(),
            TokKind::Tilde => "'~'".to_string(),
            TokKind::Amp => "'&'".to_string(),
            TokKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Tok {
    kind: TokKind,
    line: u32,
    col: u32,
}

fn lex(src: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let (tline, tcol) = (line, col);
        let push = |kind: TokKind, toks: &mut Vec<Tok>| {
            toks.push(Tok {
                kind,
                line: tline,
                col: tcol,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '(' => push(TokKind::LParen, &mut toks),
            ')' => push(TokKind::RParen, &mut toks),
            '{' => push(TokKind::LBrace, &mut toks),
            '}' => push(TokKind::RBrace, &mut toks),
            ',' => push(TokKind::Comma, &mut toks),
            '.' => push(TokKind::Dot, &mut toks),
            ':' => push(TokKind::Colon, &mut toks),
            '=' => push(TokKind::Equal, &mut toks),
            '~' => push(TokKind::Tilde, &mut toks),
            '&' => push(TokKind::Amp, &mut toks),
            '|' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    push(TokKind::Turnstile, &mut toks);
                    i += 1;
                    col += 1;
                } else {
                    push(TokKind::Bar, &mut toks);
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    push(TokKind::Arrow, &mut toks);
                    i += 1;
                    col += 1;
                } else {
                    return Err(ParseError {
                        line,
                        col,
                        message: "expected '->'".to_string(),
                    });
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push(Tok {
                    kind: TokKind::Ident(src[start..i].to_owned()),
                    line: tline,
                    col: tcol,
                });
                continue;
            }
            _ => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
        i += 1;
        col += 1;
    }
    toks.push(Tok {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<Tok>,
    pos: usize,
    /// Name and sort per level: ambient context entries, then binders.
    scope: Vec<(String, String)>,
}

impl<'a> Parser<'a> {
    fn new(sig: &'a Signature, ctx: &Context, src: &str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            sig,
            toks: lex(src)?,
            pos: 0,
            scope: ctx.entries().to_vec(),
        })
    }

    fn peek(&self) -> &TokKind {
        &self.toks[self.pos].kind
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn fail<T>(&self, message: String) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, message })
    }

    fn bump(&mut self) -> TokKind {
        let kind = self.toks[self.pos].kind.clone();
        if kind != TokKind::Eof {
            self.pos += 1;
        }
        kind
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ParseError> {
        if self.peek() == &kind {
            self.bump();
            Ok(())
        } else {
            self.fail(format!(
                "expected {}, found {}",
                kind.describe(),
                self.peek().describe()
            ))
        }
    }

    /// An identifier that is not a reserved word.
    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            TokKind::Ident(name) if !is_keyword(&name) => {
                self.bump();
                Ok(name)
            }
            other => self.fail(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn keyword(&self, name: &str) -> bool {
        matches!(self.peek(), TokKind::Ident(s) if s == name)
    }

    fn sort_name(&mut self) -> Result<String, ParseError> {
        let at = self.here();
        let name = self.ident("a sort")?;
        if !self.sig.has_sort(&name) {
            return Err(ParseError {
                line: at.0,
                col: at.1,
                message: format!("unknown sort {name}"),
            });
        }
        Ok(name)
    }

    /// `IDENT ':' IDENT` pairs separated by commas, ending before `stop`.
    fn bindings(&mut self, stop: &TokKind) -> Result<Vec<(String, String)>, ParseError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        if self.peek() == stop {
            return Ok(entries);
        }
        loop {
            let at = self.here();
            let name = self.ident("a variable binding")?;
            if entries.iter().any(|(n, _)| n == &name) {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!("duplicate variable {name}"),
                });
            }
            self.expect(TokKind::Colon)?;
            let sort = self.sort_name()?;
            entries.push((name, sort));
            if !self.eat(&TokKind::Comma) {
                break;
            }
        }
        Ok(entries)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_level()?;
        if self.eat(&TokKind::Arrow) {
            let rhs = self.formula()?;
            Ok(implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and_level()?;
        while self.eat(&TokKind::Bar) {
            let rhs = self.and_level()?;
            acc = or(acc, rhs);
        }
        Ok(acc)
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&TokKind::Amp) {
            let rhs = self.unary()?;
            acc = and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&TokKind::Tilde) {
            return Ok(not(self.unary()?));
        }
        if self.keyword("forall") || self.keyword("exists") {
            return self.quantifier();
        }
        self.primary()
    }

    /// Quantifier bodies extend as far right as possible.
    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = self.keyword("forall");
        self.bump();
        let name = self.ident("a variable binding")?;
        self.expect(TokKind::Colon)?;
        let sort = self.sort_name()?;
        self.expect(TokKind::Dot)?;
        self.scope.push((name.clone(), sort.clone()));
        let body = self.formula()?;
        self.scope.pop();
        Ok(if universal {
            forall(&name, &sort, body)
        } else {
            exists(&name, &sort, body)
        })
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.keyword("false") {
            self.bump();
            return Ok(Formula::Bottom);
        }
        if self.eat(&TokKind::LParen) {
            let f = self.formula()?;
            self.expect(TokKind::RParen)?;
            return Ok(f);
        }
        if self.keyword("box") || self.keyword("dia") {
            return self.modal();
        }
        if let TokKind::Ident(name) = self.peek().clone() {
            if is_keyword(&name) {
                return self.fail(format!("unexpected keyword '{name}'"));
            }
            if self.sig.pred(&name).is_some() && self.toks[self.pos + 1].kind == TokKind::LParen
            {
                return self.atom();
            }
            let at = self.here();
            let (a, sa) = self.term()?;
            self.expect(TokKind::Equal)?;
            let (b, sb) = self.term()?;
            if sa != sb {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!("cannot equate sort {sa} with sort {sb}"),
                });
            }
            return Ok(Formula::Eq(a, b));
        }
        self.fail(format!(
            "expected a formula, found {}",
            self.peek().describe()
        ))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        let name = self.ident("a predicate")?;
        let expected = self.sig.pred(&name).expect("caller checked").to_vec();
        let args = self.term_list()?;
        if args.len() != expected.len() {
            return Err(ParseError {
                line: at.0,
                col: at.1,
                message: format!(
                    "{name} expects {} arguments, got {}",
                    expected.len(),
                    args.len()
                ),
            });
        }
        for (want, (_, got)) in expected.iter().zip(&args) {
            if want != got {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!("{name} expects sort {want}, got {got}"),
                });
            }
        }
        Ok(Formula::Atom(name, args.into_iter().map(|(t, _)| t).collect()))
    }

    fn modal(&mut self) -> Result<Formula, ParseError> {
        let necessity = self.keyword("box");
        let at = self.here();
        self.bump();
        self.expect(TokKind::LBrace)?;
        let entries = self.bindings(&TokKind::Bar)?;
        self.expect(TokKind::Bar)?;
        let box_ctx = Context::new(entries).expect("bindings are distinct");
        let saved = core::mem::replace(&mut self.scope, box_ctx.entries().to_vec());
        let body = self.formula()?;
        self.scope = saved;
        self.expect(TokKind::RBrace)?;
        let args = self.term_list()?;
        if args.len() != box_ctx.len() {
            return Err(ParseError {
                line: at.0,
                col: at.1,
                message: format!(
                    "box expects {} arguments, got {}",
                    box_ctx.len(),
                    args.len()
                ),
            });
        }
        for (slot, (_, got)) in args.iter().enumerate() {
            if box_ctx.sort(slot) != got {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!(
                        "box argument {} expects sort {}, got {got}",
                        slot + 1,
                        box_ctx.sort(slot)
                    ),
                });
            }
        }
        let args: Vec<Term> = args.into_iter().map(|(t, _)| t).collect();
        Ok(if necessity {
            Formula::BoxApp(
                BoxAbstraction {
                    ctx: box_ctx,
                    body: Box::new(body),
                },
                args,
            )
        } else {
            dia(box_ctx, body, args)
        })
    }

    /// `'(' (term (',' term)*)? ')'` with the sort of each term.
    fn term_list(&mut self) -> Result<Vec<(Term, String)>, ParseError> {
        self.expect(TokKind::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&TokKind::RParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&TokKind::Comma) {
                    break;
                }
            }
            self.expect(TokKind::RParen)?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<(Term, String), ParseError> {
        let at = self.here();
        let name = self.ident("a term")?;
        if self.peek() == &TokKind::LParen {
            let (expected, result) = match self.sig.func(&name) {
                Some((args, result)) => (args.to_vec(), result.to_owned()),
                None => {
                    return Err(ParseError {
                        line: at.0,
                        col: at.1,
                        message: format!("unknown function {name}"),
                    });
                }
            };
            let args = self.term_list()?;
            if args.len() != expected.len() {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!(
                        "{name} expects {} arguments, got {}",
                        expected.len(),
                        args.len()
                    ),
                });
            }
            for (want, (_, got)) in expected.iter().zip(&args) {
                if want != got {
                    return Err(ParseError {
                        line: at.0,
                        col: at.1,
                        message: format!("{name} expects sort {want}, got {got}"),
                    });
                }
            }
            Ok((
                Term::App(name, args.into_iter().map(|(t, _)| t).collect()),
                result,
            ))
        } else {
            match self.scope.iter().rposition(|(n, _)| n == &name) {
                Some(slot) => Ok((Term::Var(slot), self.scope[slot].1.clone())),
                None => Err(ParseError {
                    line: at.0,
                    col: at.1,
                    message: format!("unknown variable {name}"),
                }),
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek() == &TokKind::Eof {
            Ok(())
        } else {
            self.fail(format!(
                "expected end of input, found {}",
                self.peek().describe()
            ))
        }
    }
}

/// Parses a formula over the given context.  Name resolution, arity,
/// and sort checking happen during the parse, so a returned formula is
/// always well formed.
pub fn parse_formula(sig: &Signature, ctx: &Context, src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(sig, ctx, src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(sig: &Signature, ctx: &Context, src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(sig, ctx, src)?;
    let (t, _) = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a bare context list such as `x:s, y:t`.
pub fn parse_context(sig: &Signature, src: &str) -> Result<Context, ParseError> {
    let mut p = Parser::new(sig, &Context::empty(), src)?;
    let entries = p.bindings(&TokKind::Eof)?;
    p.finish()?;
    Ok(Context::new(entries).expect("bindings are distinct"))
}

/// Parses a sequent line `ctx x:s, y:t |- formula`.
pub fn parse_sequent(sig: &Signature, src: &str) -> Result<(Context, Formula), ParseError> {
    let mut p = Parser::new(sig, &Context::empty(), src)?;
    if !p.keyword("ctx") {
        return p.fail("expected 'ctx'".to_string());
    }
    p.bump();
    let entries = p.bindings(&TokKind::Turnstile)?;
    p.expect(TokKind::Turnstile)?;
    let ctx = Context::new(entries).expect("bindings are distinct");
    p.scope = ctx.entries().to_vec();
    let f = p.formula()?;
    p.finish()?;
    Ok((ctx, f))
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = if base.is_empty() { "v".to_owned() } else { base.to_owned() };
    if is_keyword(&name) {
        name.push('\'');
    }
    while taken.iter().any(|t| t == &name) {
        name.push('\'');
    }
    name
}

pub fn print_term(t: &Term, names: &[String]) -> String {
    match t {
        Term::Var(i) => names[*i].clone(),
        Term::App(name, args) => {
            let parts: Vec<String> = args.iter().map(|a| print_term(a, names)).collect();
            format!("{name}({})", parts.join(", "))
        }
    }
}

/// Prints in the primitive grammar: sugar is not reconstructed, so a
/// negation appears as `f -> false`.  Binder names that collide with a
/// name already in scope are freshened with primes, which keeps
/// reparsing over the same context alpha-faithful.
pub fn print_formula(f: &Formula, names: &[String]) -> String {
    let mut names = names.to_vec();
    print_prec(f, &mut names, 0)
}

fn print_prec(f: &Formula, names: &mut Vec<String>, min_prec: u8) -> String {
    match f {
        Formula::Atom(name, args) => {
            let parts: Vec<String> = args.iter().map(|a| print_term(a, names)).collect();
            format!("{name}({})", parts.join(", "))
        }
        Formula::Eq(a, b) => format!("{} = {}", print_term(a, names), print_term(b, names)),
        Formula::Bottom => "false".to_string(),
        Formula::Implies(a, b) => {
            let s = format!(
                "{} -> {}",
                print_prec(a, names, 1),
                print_prec(b, names, 0)
            );
            if min_prec > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Formula::Forall(name, sort, body) => {
            let binder = fresh_name(name, names);
            names.push(binder.clone());
            let s = format!("forall {binder}:{sort}. {}", print_prec(body, names, 0));
            names.pop();
            if min_prec > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Formula::BoxApp(bx, args) => {
            let mut box_names: Vec<String> = Vec::new();
            let mut bindings: Vec<String> = Vec::new();
            for (name, sort) in bx.ctx.entries() {
                let fresh = fresh_name(name, &box_names);
                bindings.push(format!("{fresh}:{sort}"));
                box_names.push(fresh);
            }
            let body = print_prec(&bx.body, &mut box_names, 0);
            let parts: Vec<String> = args.iter().map(|a| print_term(a, names)).collect();
            format!("box {{{} | {body}}}({})", bindings.join(", "), parts.join(", "))
        }
    }
}

/// Prints a sequent line that [`parse_sequent`] reads back.
pub fn print_sequent(ctx: &Context, f: &Formula) -> String {
    let bindings: Vec<String> = ctx
        .entries()
        .iter()
        .map(|(n, s)| format!("{n}:{s}"))
        .collect();
    let head = if bindings.is_empty() {
        "ctx".to_string()
    } else {
        format!("ctx {}", bindings.join(", "))
    };
    format!("{head} |- {}", print_formula(f, &ctx.names()))
}

/// Deterministic formula sampler for stress tests: well formed over the
/// given context by construction, depth-bounded, seeded.
pub fn sample_formula(sig: &Signature, ctx: &Context, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scope: Vec<(String, String)> = ctx.entries().to_vec();
    gen_formula(sig, &scope, 3, &mut rng)
}

/// Sorts from which a depth-bounded term can be built over the scope.
fn producible_sorts(sig: &Signature, scope: &[(String, String)]) -> Vec<String> {
    let mut got: Vec<String> = Vec::new();
    for (_, s) in scope {
        if !got.contains(s) {
            got.push(s.clone());
        }
    }
    loop {
        let mut grew = false;
        for name in sig.func_names().collect::<Vec<_>>() {
            let (args, result) = sig.func(name).expect("listed");
            if args.iter().all(|a| got.contains(a)) && !got.contains(&result.to_owned()) {
                got.push(result.to_owned());
                grew = true;
            }
        }
        if !grew {
            return got;
        }
    }
}

fn gen_term(
    sig: &Signature,
    scope: &[(String, String)],
    sort: &str,
    depth: u32,
    rng: &mut ChaCha8Rng,
) -> Option<Term> {
    let vars: Vec<usize> = scope
        .iter()
        .enumerate()
        .filter(|(_, (_, s))| s == sort)
        .map(|(i, _)| i)
        .collect();
    let producible = producible_sorts(sig, scope);
    let funcs: Vec<&str> = sig
        .func_names()
        .filter(|name| {
            let (args, result) = sig.func(name).expect("listed");
            result == sort && args.iter().all(|a| producible.contains(a))
        })
        .collect();
    let use_func = !funcs.is_empty() && (vars.is_empty() || (depth > 0 && rng.next_u32() % 3 == 0));
    if use_func {
        let name = funcs[rng.next_u32() as usize % funcs.len()];
        let arg_sorts = sig.func(name).expect("listed").0.to_vec();
        let mut args = Vec::new();
        for s in &arg_sorts {
            args.push(gen_term(sig, scope, s, depth.saturating_sub(1), rng)?);
        }
        Some(Term::App(name.to_owned(), args))
    } else if !vars.is_empty() {
        Some(Term::Var(vars[rng.next_u32() as usize % vars.len()]))
    } else {
        None
    }
}

fn gen_formula(
    sig: &Signature,
    scope: &[(String, String)],
    depth: u32,
    rng: &mut ChaCha8Rng,
) -> Formula {
    let producible = producible_sorts(sig, scope);
    for _ in 0..16 {
        let kind = rng.next_u32() % if depth == 0 { 3 } else { 7 };
        match kind {
            0 => {
                // An atom whose argument sorts are all producible.
                let preds: Vec<&str> = sig
                    .pred_names()
                    .filter(|p| {
                        sig.pred(p)
                            .expect("listed")
                            .iter()
                            .all(|s| producible.contains(s))
                    })
                    .collect();
                if preds.is_empty() {
                    continue;
                }
                let name = preds[rng.next_u32() as usize % preds.len()];
                let sorts = sig.pred(name).expect("listed").to_vec();
                let mut args = Vec::new();
                let mut ok = true;
                for s in &sorts {
                    match gen_term(sig, scope, s, 1, rng) {
                        Some(t) => args.push(t),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Formula::Atom(name.to_owned(), args);
                }
            }
            1 => {
                if producible.is_empty() {
                    continue;
                }
                let sort = &producible[rng.next_u32() as usize % producible.len()];
                if let (Some(a), Some(b)) = (
                    gen_term(sig, scope, sort, 1, rng),
                    gen_term(sig, scope, sort, 1, rng),
                ) {
                    return Formula::Eq(a, b);
                }
            }
            2 => return Formula::Bottom,
            3 => {
                let a = gen_formula(sig, scope, depth - 1, rng);
                let b = gen_formula(sig, scope, depth - 1, rng);
                return implies(a, b);
            }
            4 => {
                let sort = &sig.sorts()[rng.next_u32() as usize % sig.sorts().len()];
                let name = format!("q{}", scope.len());
                let mut inner = scope.to_vec();
                inner.push((name.clone(), sort.clone()));
                let body = gen_formula(sig, &inner, depth - 1, rng);
                return forall(&name, sort, body);
            }
            5 => {
                // A box abstraction applied to terms from the scope.
                if producible.is_empty() {
                    continue;
                }
                let width = (rng.next_u32() % 2 + 1) as usize;
                let mut entries = Vec::new();
                let mut args = Vec::new();
                let mut ok = true;
                for j in 0..width {
                    let sort = &producible[rng.next_u32() as usize % producible.len()];
                    match gen_term(sig, scope, sort, 1, rng) {
                        Some(t) => {
                            entries.push((format!("b{j}"), sort.clone()));
                            args.push(t);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let body = gen_formula(sig, &entries, depth - 1, rng);
                let ctx = Context::new(entries).expect("fresh names");
                return Formula::BoxApp(
                    BoxAbstraction {
                        ctx,
                        body: Box::new(body),
                    },
                    args,
                );
            }
            _ => {
                let a = gen_formula(sig, scope, depth - 1, rng);
                return not(a);
            }
        }
    }
    Formula::Bottom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_sig() -> Signature {
        Signature::new(
            vec!["s".into(), "t".into()],
            vec![
                ("P".into(), vec!["s".into()]),
                ("Q".into(), vec!["s".into(), "t".into()]),
                ("R".into(), vec![]),
            ],
            vec![
                ("f".into(), vec!["s".into()], "s".into()),
                ("g".into(), vec!["s".into(), "t".into()], "t".into()),
                ("c".into(), vec![], "s".into()),
            ],
        )
        .unwrap()
    }

    fn ctx(entries: &[(&str, &str)]) -> Context {
        Context::new(
            entries
                .iter()
                .map(|(n, s)| ((*n).into(), (*s).into()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_builds_levels_with_max_scope_bodies() {
        let sig = test_sig();
        let f = parse_formula(&sig, &Context::empty(), "forall x:s. P(x) -> P(f(x))").unwrap();
        let expected = forall(
            "x",
            "s",
            implies(
                Formula::Atom("P".into(), vec![Term::Var(0)]),
                Formula::Atom("P".into(), vec![Term::App("f".into(), vec![Term::Var(0)])]),
            ),
        );
        assert_eq!(f, expected);
        well_formed(&sig, &Context::empty(), &f).unwrap();
    }

    #[test]
    fn shadowed_binder_prints_freshened_and_round_trips() {
        let sig = test_sig();
        let c = ctx(&[("x", "s")]);
        let f = forall("x", "s", Formula::Eq(Term::Var(0), Term::Var(1)));
        let printed = print_formula(&f, &c.names());
        assert_eq!(printed, "forall x':s. x = x'");
        let back = parse_formula(&sig, &c, &printed).unwrap();
        assert!(alpha_eq(&back, &f));
    }

    #[test]
    fn instantiation_renumbers_nested_binders() {
        let sig = test_sig();
        let c = ctx(&[("x", "s"), ("y", "s")]);
        // Over x:s, y:s the body of forall z reads z = y.
        let f = parse_formula(&sig, &c, "forall z:s. z = y").unwrap();
        match &f {
            Formula::Forall(_, _, body) => {
                assert_eq!(**body, Formula::Eq(Term::Var(2), Term::Var(1)));
                let inst = instantiate_last(
                    &forall("z", "s", (**body).clone()),
                    1,
                    &Term::App("c".into(), vec![]),
                );
                // Over x:s alone: forall z:s. z = c(), binder renumbered.
                let expected = forall(
                    "z",
                    "s",
                    Formula::Eq(Term::Var(1), Term::App("c".into(), vec![])),
                );
                assert_eq!(inst, expected);
                well_formed(&sig, &ctx(&[("x", "s")]), &inst).unwrap();
            }
            other => panic!("expected forall, got {other:?}"),
        }
    }

    #[test]
    fn substitution_rewrites_box_arguments_but_not_bodies() {
        let sig = test_sig();
        let c = ctx(&[("x", "s")]);
        let f = parse_formula(&sig, &c, "box {y:s | P(y)}(x)").unwrap();
        let fx = Term::App("f".into(), vec![Term::Var(0)]);
        let g = substitute_one(&f, 0, &fx);
        match (&f, &g) {
            (Formula::BoxApp(bx_before, _), Formula::BoxApp(bx_after, args)) => {
                assert_eq!(bx_before, bx_after);
                assert_eq!(args, &vec![fx.clone()]);
            }
            other => panic!("expected boxes, got {other:?}"),
        }
        well_formed(&sig, &c, &g).unwrap();
    }

    #[test]
    fn boxed_closure_is_inner_first_and_alpha_deduplicated() {
        let sig = test_sig();
        let c = ctx(&[("x", "s")]);
        let f = parse_formula(
            &sig,
            &c,
            "box {u:s | box {y:s | P(y)}(u)}(x) & box {z:s | P(z)}(x)",
        )
        .unwrap();
        let closure = boxed_closure(&f);
        assert_eq!(closure.len(), 2);
        // Innermost box first; the alpha-variant box {z | P(z)} collapses
        // into it.
        let inner = parse_formula(&sig, &c, "box {y:s | P(y)}(x)").unwrap();
        match inner {
            Formula::BoxApp(bx, _) => assert!(alpha_eq_box(&closure[0], &bx)),
            _ => unreachable!(),
        }
        assert_eq!(closure[1].ctx.sorts(), vec!["s".to_string()]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let sig = test_sig();
        let err = parse_formula(&sig, &Context::empty(), "forall x:s P(x)").unwrap_err();
        assert_eq!((err.line, err.col), (1, 12));
        assert!(err.message.contains("'.'"), "{err}");

        let err = parse_formula(&sig, &Context::empty(), "P(y)").unwrap_err();
        assert!(err.message.contains("unknown variable y"), "{err}");
        assert_eq!((err.line, err.col), (1, 3));

        let err = parse_formula(&sig, &Context::empty(), "forall x:s.\nQ(x)").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("Q expects 2 arguments"), "{err}");

        let err = parse_formula(&sig, &ctx(&[("x", "s"), ("y", "t")]), "x = y").unwrap_err();
        assert!(err.message.contains("cannot equate"), "{err}");
    }

    #[test]
    fn alpha_eq_ignores_names_but_not_sorts() {
        let sig = test_sig();
        let a = parse_formula(&sig, &Context::empty(), "forall x:s. P(x)").unwrap();
        let b = parse_formula(&sig, &Context::empty(), "forall y:s. P(y)").unwrap();
        assert!(alpha_eq(&a, &b));
        assert_ne!(a, b);
        let c = forall("x", "t", Formula::Bottom);
        let d = forall("x", "s", Formula::Bottom);
        assert!(!alpha_eq(&c, &d));
    }

    #[test]
    fn sugar_desugars_to_primitives() {
        let sig = test_sig();
        let f = parse_formula(&sig, &Context::empty(), "exists x:s. P(x)").unwrap();
        let expected = not(forall(
            "x",
            "s",
            not(Formula::Atom("P".into(), vec![Term::Var(0)])),
        ));
        assert_eq!(f, expected);

        let g = parse_formula(&sig, &ctx(&[("x", "s")]), "dia {y:s | P(y)}(x)").unwrap();
        match &g {
            Formula::Implies(inner, bottom) => {
                assert_eq!(**bottom, Formula::Bottom);
                match &**inner {
                    Formula::BoxApp(bx, args) => {
                        assert_eq!(args, &vec![Term::Var(0)]);
                        assert!(alpha_eq(
                            &bx.body,
                            &not(Formula::Atom("P".into(), vec![Term::Var(0)]))
                        ));
                    }
                    other => panic!("expected box, got {other:?}"),
                }
            }
            other => panic!("expected negation, got {other:?}"),
        }

        let h = parse_formula(&sig, &Context::empty(), "R() & ~R() | R()").unwrap();
        let r = || Formula::Atom("R".into(), vec![]);
        assert_eq!(h, or(and(r(), not(r())), r()));
    }

    #[test]
    fn well_formed_rejects_bad_nodes() {
        let sig = test_sig();
        let c = ctx(&[("x", "s")]);
        let bad = Formula::Atom("S".into(), vec![]);
        assert_eq!(
            well_formed(&sig, &c, &bad).unwrap_err(),
            SyntaxError::UnknownPredicate("S".into())
        );
        let bad = Formula::Atom("P".into(), vec![]);
        assert!(matches!(
            well_formed(&sig, &c, &bad).unwrap_err(),
            SyntaxError::ArityMismatch { expected: 1, got: 0, .. }
        ));
        let bad = Formula::Eq(Term::Var(0), Term::Var(9));
        assert_eq!(
            well_formed(&sig, &c, &bad).unwrap_err(),
            SyntaxError::BadLevel(9)
        );
        let bad = forall("y", "u", Formula::Bottom);
        assert_eq!(
            well_formed(&sig, &c, &bad).unwrap_err(),
            SyntaxError::UnknownSort("u".into())
        );
        assert_eq!(
            Context::new(vec![("x".into(), "s".into()), ("x".into(), "t".into())]).unwrap_err(),
            SyntaxError::DuplicateVariable("x".into())
        );
    }

    #[test]
    fn sequent_lines_round_trip() {
        let sig = test_sig();
        let (c, f) =
            parse_sequent(&sig, "ctx x:s, y:t |- Q(x, y) -> exists z:s. z = x").unwrap();
        assert_eq!(c, ctx(&[("x", "s"), ("y", "t")]));
        let printed = print_sequent(&c, &f);
        let (c2, f2) = parse_sequent(&sig, &printed).unwrap();
        assert_eq!(c2, c);
        assert!(alpha_eq(&f2, &f));

        let (c3, f3) = parse_sequent(&sig, "ctx |- R()").unwrap();
        assert!(c3.is_empty());
        assert_eq!(f3, Formula::Atom("R".into(), vec![]));
        assert_eq!(print_sequent(&c3, &f3), "ctx |- R()");
    }

    #[test]
    fn free_slots_sees_through_binders_and_not_into_boxes() {
        let sig = test_sig();
        let c = ctx(&[("x", "s"), ("y", "t")]);
        let f = parse_formula(&sig, &c, "forall z:s. Q(z, y) & box {w:s | P(w)}(x)").unwrap();
        assert_eq!(
            free_slots(&f, c.len()).into_iter().collect::<Vec<_>>(),
            vec![0, 1]
        );
        let g = parse_formula(&sig, &c, "box {w:s | P(w)}(c())").unwrap();
        assert!(free_slots(&g, c.len()).is_empty());
    }

    #[test]
    fn sampled_formulas_round_trip_through_the_printer() {
        let sig = test_sig();
        let c = ctx(&[("x", "s"), ("y", "t")]);
        for seed in 0..60 {
            let f = sample_formula(&sig, &c, seed);
            well_formed(&sig, &c, &f).unwrap();
            let printed = print_formula(&f, &c.names());
            let back = parse_formula(&sig, &c, &printed)
                .unwrap_or_else(|e| panic!("seed {seed}: {e} in {printed}"));
            assert!(alpha_eq(&back, &f), "seed {seed}: {printed}");
        }
    }
}
