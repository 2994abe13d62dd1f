//! Classical models, counterpart relations, and the evaluation functor
//! they generate.
//!
//! The pipeline: [`demodalize`] extends a signature with one fresh
//! predicate symbol per boxed subformula, so a classical first-order
//! model can carry modal information as stored extensions.  A
//! [`CounterpartFamily`] relates two such models sort by sort;
//! [`counterpart_check`] verifies the modal-transformation conditions
//! (function preservation, the diamond condition over a finite probe
//! set, quotient respect), [`close_counterpart`] saturates a seed under
//! function application, and [`maximal_counterpart`] computes the
//! largest family the per-pair conditions allow.  [`build_evaluation`]
//! assembles verified models and families into a relational G-set
//! interpretation over the graph with one vertex per model, and
//! [`representation_report`] compares the diamond computed there
//! against the stored extensions: the counterpart-computed diamond must
//! be contained in the stored one; the unrealized remainder is listed
//! as gaps.
//!
//! Tuple and subset extensions of a family are always derived from the
//! per-sort relations, never stored.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitSet;
use crate::gset::{product_over, GSetError, Graph, MSubobject, Morphism, RelGSet};
use crate::report::{LawReport, Witness};
use crate::semantics::{Evaluator, Interpretation, SemanticsError};
use crate::syntax::{
    alpha_eq_box, boxed_closure, dia, print_formula, print_sequent, well_formed, BoxAbstraction,
    Context, Formula, Signature, SyntaxError, Term,
};

#[derive(Clone, PartialEq, Debug)]
pub enum HarnessError {
    /// A box abstraction with no symbol in the model's table.
    UnknownBoxSymbol(String),
    /// Models or declarations whose shapes disagree.
    SignatureMismatch(String),
    /// An unknown sort, predicate, function, or model name.
    UnknownSymbol(String),
    /// An edge family failed verification; the law names the condition.
    EdgeNotVerified { edge: String, law: String },
    Syntax(SyntaxError),
    Semantics(SemanticsError),
    Core(GSetError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::UnknownBoxSymbol(b) => write!(f, "no symbol stored for {b}"),
            HarnessError::SignatureMismatch(s) => write!(f, "signature mismatch: {s}"),
            HarnessError::UnknownSymbol(s) => write!(f, "unknown symbol {s}"),
            HarnessError::EdgeNotVerified { edge, law } => {
                write!(f, "edge {edge} fails {law}")
            }
            HarnessError::Syntax(e) => write!(f, "{e}"),
            HarnessError::Semantics(e) => write!(f, "{e}"),
            HarnessError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for HarnessError {}

impl From<SyntaxError> for HarnessError {
    fn from(e: SyntaxError) -> Self {
        HarnessError::Syntax(e)
    }
}

impl From<SemanticsError> for HarnessError {
    fn from(e: SemanticsError) -> Self {
        HarnessError::Semantics(e)
    }
}

impl From<GSetError> for HarnessError {
    fn from(e: GSetError) -> Self {
        HarnessError::Core(e)
    }
}

/// A formula over an explicit context, standing in for one subobject in
/// the diamond condition.  Reports record probes so runs reproduce.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Probe {
    pub ctx: Context,
    pub formula: Formula,
}

impl Probe {
    pub fn display(&self) -> String {
        print_sequent(&self.ctx, &self.formula)
    }
}

/// The diamond of a probe over its own context, applied to the context
/// variables.  This is the formula the counterpart conditions evaluate
/// on the left model.
pub fn probe_diamond(p: &Probe) -> Formula {
    dia(
        p.ctx.clone(),
        p.formula.clone(),
        (0..p.ctx.len()).map(Term::Var).collect(),
    )
}

fn display_box(bx: &BoxAbstraction) -> String {
    let entries: Vec<String> = bx
        .ctx
        .entries()
        .iter()
        .map(|(n, s)| format!("{n}:{s}"))
        .collect();
    format!(
        "box {{{} | {}}}",
        entries.join(", "),
        print_formula(&bx.body, &bx.ctx.names())
    )
}

/// An expanded signature together with the naming of its fresh box
/// predicates, in closure order.
#[derive(Clone, PartialEq, Debug)]
pub struct Demodalized {
    sig: Signature,
    boxes: Vec<(String, BoxAbstraction)>,
}

impl Demodalized {
    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn boxes(&self) -> &[(String, BoxAbstraction)] {
        &self.boxes
    }

    /// The fresh symbol for an abstraction, matched up to alpha.
    pub fn box_symbol(&self, bx: &BoxAbstraction) -> Option<&str> {
        self.boxes
            .iter()
            .find(|(_, seen)| alpha_eq_box(seen, bx))
            .map(|(name, _)| name.as_str())
    }

    pub fn symbol_box(&self, name: &str) -> Option<&BoxAbstraction> {
        self.boxes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, bx)| bx)
    }

    /// Same base signature and the same box table up to alpha.
    pub fn same_table(&self, other: &Demodalized) -> bool {
        self.sig == other.sig
            && self.boxes.len() == other.boxes.len()
            && self
                .boxes
                .iter()
                .zip(&other.boxes)
                .all(|((n, b), (m, c))| n == m && alpha_eq_box(b, c))
    }
}

/// Extends the signature with a fresh predicate symbol per alpha-class
/// of box abstraction occurring in the probe formulas, inner boxes
/// first.  Symbols are named `B1`, `B2`, ... skipping names the
/// signature already uses.
pub fn demodalize(sig: &Signature, probes: &[Probe]) -> Result<Demodalized, HarnessError> {
    let mut closure: Vec<BoxAbstraction> = Vec::new();
    for p in probes {
        well_formed(sig, &p.ctx, &p.formula)?;
        for bx in boxed_closure(&p.formula) {
            if !closure.iter().any(|seen| alpha_eq_box(seen, &bx)) {
                closure.push(bx);
            }
        }
    }
    let mut out = Demodalized {
        sig: sig.clone(),
        boxes: Vec::new(),
    };
    let mut counter = 1usize;
    for bx in closure {
        let name = loop {
            let candidate = format!("B{counter}");
            counter += 1;
            if out.sig.pred(&candidate).is_none() && out.sig.func(&candidate).is_none() {
                break candidate;
            }
        };
        out.sig.add_pred(name.clone(), bx.ctx.sorts())?;
        out.boxes.push((name, bx));
    }
    Ok(out)
}

/// [`demodalize`] over the probes' own diamonds, so the expanded
/// signature carries a symbol for every box the counterpart conditions
/// evaluate (the box inside each `dia {ctx | probe}` plus everything
/// nested in the probes themselves).
pub fn demodalize_diamonds(
    sig: &Signature,
    probes: &[Probe],
) -> Result<Demodalized, HarnessError> {
    let wrapped: Vec<Probe> = probes
        .iter()
        .map(|p| Probe {
            ctx: p.ctx.clone(),
            formula: probe_diamond(p),
        })
        .collect();
    demodalize(sig, &wrapped)
}

/// A finite classical structure for a de-modalized signature: carriers
/// per sort, total function tables, and predicate extensions covering
/// the box symbols.  Construction validates totality and containment,
/// so evaluation never hits shape errors.
#[derive(Clone, PartialEq, Debug)]
pub struct ClassicalModel {
    name: String,
    dem: Demodalized,
    carriers: BTreeMap<String, Vec<String>>,
    funcs: BTreeMap<String, BTreeMap<Vec<String>, String>>,
    preds: BTreeMap<String, BTreeSet<Vec<String>>>,
}

fn all_tuples(carriers: &BTreeMap<String, Vec<String>>, sorts: &[String]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for sort in sorts {
        let mut next = Vec::new();
        for tuple in &out {
            for v in &carriers[sort] {
                let mut t = tuple.clone();
                t.push(v.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

impl ClassicalModel {
    pub fn new(
        name: impl Into<String>,
        dem: Demodalized,
        carriers: BTreeMap<String, Vec<String>>,
        funcs: BTreeMap<String, BTreeMap<Vec<String>, String>>,
        preds: BTreeMap<String, BTreeSet<Vec<String>>>,
    ) -> Result<ClassicalModel, HarnessError> {
        let sig = dem.sig().clone();
        for sort in carriers.keys() {
            if !sig.has_sort(sort) {
                return Err(HarnessError::UnknownSymbol(sort.clone()));
            }
        }
        let mut full_carriers = BTreeMap::new();
        for sort in sig.sorts() {
            let elems = carriers.get(sort).cloned().unwrap_or_default();
            for (i, e) in elems.iter().enumerate() {
                if elems[..i].contains(e) {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "duplicate element {e} in the {sort} carrier"
                    )));
                }
            }
            full_carriers.insert(sort.clone(), elems);
        }
        for f in funcs.keys() {
            if sig.func(f).is_none() {
                return Err(HarnessError::UnknownSymbol(f.clone()));
            }
        }
        let mut full_funcs = BTreeMap::new();
        for f in sig.func_names().map(String::from).collect::<Vec<_>>() {
            let (args, result) = sig.func(&f).expect("listed");
            let (args, result) = (args.to_vec(), result.to_string());
            let table = funcs.get(&f).cloned().unwrap_or_default();
            let domain = all_tuples(&full_carriers, &args);
            for tuple in &domain {
                let Some(value) = table.get(tuple) else {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "function {f} has no value at ({})",
                        tuple.join(", ")
                    )));
                };
                if !full_carriers[&result].contains(value) {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "function {f} maps ({}) outside the {result} carrier",
                        tuple.join(", ")
                    )));
                }
            }
            for tuple in table.keys() {
                if !domain.contains(tuple) {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "function {f} has an entry at ({}) outside its domain",
                        tuple.join(", ")
                    )));
                }
            }
            full_funcs.insert(f, table);
        }
        for p in preds.keys() {
            if sig.pred(p).is_none() {
                return Err(HarnessError::UnknownSymbol(p.clone()));
            }
        }
        let mut full_preds = BTreeMap::new();
        for p in sig.pred_names().map(String::from).collect::<Vec<_>>() {
            let args = sig.pred(&p).expect("listed").to_vec();
            let extension = preds.get(&p).cloned().unwrap_or_default();
            for tuple in &extension {
                if tuple.len() != args.len()
                    || tuple
                        .iter()
                        .zip(&args)
                        .any(|(e, sort)| !full_carriers[sort].contains(e))
                {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "extension of {p} contains ({}) outside the carriers",
                        tuple.join(", ")
                    )));
                }
            }
            full_preds.insert(p, extension);
        }
        Ok(ClassicalModel {
            name: name.into(),
            dem,
            carriers: full_carriers,
            funcs: full_funcs,
            preds: full_preds,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn demodalized(&self) -> &Demodalized {
        &self.dem
    }

    pub fn sig(&self) -> &Signature {
        self.dem.sig()
    }

    pub fn carrier(&self, sort: &str) -> &[String] {
        &self.carriers[sort]
    }

    pub fn pred_extension(&self, pred: &str) -> &BTreeSet<Vec<String>> {
        &self.preds[pred]
    }

    pub fn func_value(&self, func: &str, args: &[String]) -> &str {
        self.funcs[func]
            .get(args)
            .expect("function tables are total")
    }

    /// Same de-modalized signature, so formulas transfer.
    pub fn same_signature(&self, other: &ClassicalModel) -> bool {
        self.dem.same_table(&other.dem)
    }

    fn eval_term(&self, env: &[String], t: &Term) -> String {
        match t {
            Term::Var(i) => env[*i].clone(),
            Term::App(f, args) => {
                let vals: Vec<String> = args.iter().map(|a| self.eval_term(env, a)).collect();
                self.func_value(f, &vals).to_string()
            }
        }
    }

    fn sat(&self, env: &mut Vec<String>, f: &Formula) -> Result<bool, HarnessError> {
        match f {
            Formula::Atom(p, terms) => {
                let vals: Vec<String> = terms.iter().map(|t| self.eval_term(env, t)).collect();
                Ok(self.preds[p].contains(&vals))
            }
            Formula::Eq(a, b) => Ok(self.eval_term(env, a) == self.eval_term(env, b)),
            Formula::Bottom => Ok(false),
            Formula::Implies(a, b) => Ok(!self.sat(env, a)? || self.sat(env, b)?),
            Formula::Forall(_, sort, body) => {
                for v in self.carrier(sort).to_vec() {
                    env.push(v);
                    let ok = self.sat(env, body)?;
                    env.pop();
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::BoxApp(bx, args) => {
                let Some(symbol) = self.dem.box_symbol(bx) else {
                    return Err(HarnessError::UnknownBoxSymbol(display_box(bx)));
                };
                let vals: Vec<String> = args.iter().map(|t| self.eval_term(env, t)).collect();
                Ok(self.preds[symbol].contains(&vals))
            }
        }
    }

    /// Classical satisfaction at one environment.  Boxes are read
    /// atomically through the stored extension of their symbol.
    pub fn satisfies(
        &self,
        ctx: &Context,
        env: &[String],
        f: &Formula,
    ) -> Result<bool, HarnessError> {
        well_formed(self.sig(), ctx, f)?;
        if env.len() != ctx.len() {
            return Err(HarnessError::SignatureMismatch(format!(
                "environment of length {} for a context of length {}",
                env.len(),
                ctx.len()
            )));
        }
        for (slot, v) in env.iter().enumerate() {
            if !self.carrier(ctx.sort(slot)).contains(v) {
                return Err(HarnessError::SignatureMismatch(format!(
                    "{v} is not in the {} carrier",
                    ctx.sort(slot)
                )));
            }
        }
        self.sat(&mut env.to_vec(), f)
    }
}

/// The extension of a formula over a context: every environment tuple
/// that satisfies it.
pub fn eval_classical(
    m: &ClassicalModel,
    ctx: &Context,
    f: &Formula,
) -> Result<BTreeSet<Vec<String>>, HarnessError> {
    well_formed(m.sig(), ctx, f)?;
    let mut out = BTreeSet::new();
    for env in all_tuples(&m.carriers, &ctx.sorts()) {
        if m.sat(&mut env.clone(), f)? {
            out.insert(env);
        }
    }
    Ok(out)
}

/// A sort-indexed relation between the carriers of two models over the
/// same de-modalized signature.
#[derive(Clone, PartialEq, Debug)]
pub struct CounterpartFamily {
    left: ClassicalModel,
    right: ClassicalModel,
    relations: BTreeMap<String, BTreeSet<(String, String)>>,
}

impl CounterpartFamily {
    /// Validates that every pair lies within the carriers; sorts with
    /// no entry get the empty relation.
    pub fn new(
        left: ClassicalModel,
        right: ClassicalModel,
        relations: BTreeMap<String, BTreeSet<(String, String)>>,
    ) -> Result<CounterpartFamily, HarnessError> {
        for sort in relations.keys() {
            if !left.sig().has_sort(sort) {
                return Err(HarnessError::UnknownSymbol(sort.clone()));
            }
        }
        let mut full = BTreeMap::new();
        for sort in left.sig().sorts() {
            let pairs = relations.get(sort).cloned().unwrap_or_default();
            for (a, b) in &pairs {
                if !left.carrier(sort).contains(a) || !right.carrier(sort).contains(b) {
                    return Err(HarnessError::SignatureMismatch(format!(
                        "pair ({a}, {b}) lies outside the {sort} carriers"
                    )));
                }
            }
            full.insert(sort.clone(), pairs);
        }
        Ok(CounterpartFamily {
            left,
            right,
            relations: full,
        })
    }

    pub fn left(&self) -> &ClassicalModel {
        &self.left
    }

    pub fn right(&self) -> &ClassicalModel {
        &self.right
    }

    pub fn relations(&self) -> &BTreeMap<String, BTreeSet<(String, String)>> {
        &self.relations
    }

    pub fn pairs(&self, sort: &str) -> &BTreeSet<(String, String)> {
        &self.relations[sort]
    }

    pub fn related(&self, sort: &str, a: &str, b: &str) -> bool {
        self.relations[sort].contains(&(a.to_string(), b.to_string()))
    }

    pub fn pair_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    /// Componentwise-related tuple pairs over a sort list: the derived
    /// tuple extension of the family.
    pub fn related_tuples(&self, sorts: &[String]) -> Vec<(Vec<String>, Vec<String>)> {
        let mut out = vec![(Vec::new(), Vec::new())];
        for sort in sorts {
            let mut next = Vec::new();
            for (l, r) in &out {
                for (a, b) in self.pairs(sort) {
                    let mut l2 = l.clone();
                    let mut r2 = r.clone();
                    l2.push(a.clone());
                    r2.push(b.clone());
                    next.push((l2, r2));
                }
            }
            out = next;
        }
        out
    }
}

fn note_witness(note: String) -> Witness {
    Witness {
        note,
        ..Witness::default()
    }
}

fn shared_signature(left: &ClassicalModel, right: &ClassicalModel) -> Result<(), HarnessError> {
    if left.same_signature(right) {
        Ok(())
    } else {
        Err(HarnessError::SignatureMismatch(
            "models interpret different de-modalized signatures".to_string(),
        ))
    }
}

fn validate_quotient_decls(
    sig: &Signature,
    quotient_decls: &[String],
) -> Result<(), HarnessError> {
    for q in quotient_decls {
        match sig.func(q) {
            Some((args, _)) if args.len() == 1 => {}
            Some(_) => {
                return Err(HarnessError::SignatureMismatch(format!(
                    "quotient symbol {q} is not unary"
                )))
            }
            None => {
                return Err(HarnessError::SignatureMismatch(format!(
                    "quotient symbol {q} is not a function symbol"
                )))
            }
        }
    }
    Ok(())
}

fn function_preservation(family: &CounterpartFamily) -> Result<LawReport, HarnessError> {
    let law = "counterpart.functions";
    let sig = family.left().sig().clone();
    for f in sig.func_names() {
        let (args, result) = sig.func(f).expect("listed");
        for (l, r) in family.related_tuples(args) {
            let va = family.left().func_value(f, &l).to_string();
            let vb = family.right().func_value(f, &r).to_string();
            if !family.related(result, &va, &vb) {
                return Ok(LawReport::fails(
                    law,
                    note_witness(format!(
                        "{f} sends related ({}) , ({}) to unrelated ({va}, {vb}) at sort {result}",
                        l.join(", "),
                        r.join(", ")
                    )),
                ));
            }
        }
    }
    Ok(LawReport::holds(law))
}

fn probe_condition(family: &CounterpartFamily, probes: &[Probe]) -> Result<LawReport, HarnessError> {
    let law = "counterpart.probes";
    for p in probes {
        let diamond = probe_diamond(p);
        for (l, r) in family.related_tuples(&p.ctx.sorts()) {
            if family.right().satisfies(&p.ctx, &r, &p.formula)?
                && !family.left().satisfies(&p.ctx, &l, &diamond)?
            {
                return Ok(LawReport::fails(
                    law,
                    note_witness(format!(
                        "probe {}: right satisfies at ({}), left misses the diamond at ({})",
                        p.display(),
                        r.join(", "),
                        l.join(", ")
                    )),
                ));
            }
        }
    }
    Ok(LawReport::holds(law))
}

fn quotient_respect(
    family: &CounterpartFamily,
    quotient_decls: &[String],
) -> Result<LawReport, HarnessError> {
    let law = "counterpart.quotients";
    for q in quotient_decls {
        let (args, result) = family.left().sig().func(q).expect("validated");
        let dom_sort = args[0].clone();
        let result = result.to_string();
        for (a, b) in family.pairs(&result) {
            let found = family.pairs(&dom_sort).iter().any(|(a2, b2)| {
                family.left().func_value(q, core::slice::from_ref(a2)) == a
                    && family.right().func_value(q, core::slice::from_ref(b2)) == b
            });
            if !found {
                return Ok(LawReport::fails(
                    law,
                    note_witness(format!(
                        "pair ({a}, {b}) at sort {result} has no related {q}-preimages"
                    )),
                ));
            }
        }
    }
    Ok(LawReport::holds(law))
}

/// The verification record for one family, with the probe set written
/// out so a failing run replays.
#[derive(Clone, Debug)]
pub struct CounterpartReport {
    pub probes: Vec<String>,
    pub laws: Vec<LawReport>,
}

impl CounterpartReport {
    pub fn passes(&self) -> bool {
        self.laws.iter().all(LawReport::holds_up)
    }
}

/// Checks the three modal-transformation conditions: every function
/// symbol maps related arguments to related values; for every probe and
/// componentwise-related tuple pair, right-satisfaction forces the
/// diamond on the left; every declared quotient symbol admits related
/// preimages for each related pair at its result sort.
pub fn counterpart_check(
    family: &CounterpartFamily,
    probes: &[Probe],
    quotient_decls: &[String],
) -> Result<CounterpartReport, HarnessError> {
    shared_signature(family.left(), family.right())?;
    validate_quotient_decls(family.left().sig(), quotient_decls)?;
    Ok(CounterpartReport {
        probes: probes.iter().map(Probe::display).collect(),
        laws: vec![
            function_preservation(family)?,
            probe_condition(family, probes)?,
            quotient_respect(family, quotient_decls)?,
        ],
    })
}

/// The least family containing the seed and closed under function
/// application: related arguments propagate to related values, saturated
/// to a fixpoint.  Tuple closure is definitional (tuples are derived),
/// so only the function condition generates new pairs.
pub fn close_counterpart(
    seed: &BTreeMap<String, BTreeSet<(String, String)>>,
    left: &ClassicalModel,
    right: &ClassicalModel,
) -> Result<CounterpartFamily, HarnessError> {
    shared_signature(left, right)?;
    let mut family = CounterpartFamily::new(left.clone(), right.clone(), seed.clone())?;
    let funcs: Vec<String> = left.sig().func_names().map(String::from).collect();
    loop {
        let mut added = false;
        for f in &funcs {
            let (args, result) = left.sig().func(f).expect("listed");
            let (args, result) = (args.to_vec(), result.to_string());
            for (l, r) in family.related_tuples(&args) {
                let va = left.func_value(f, &l).to_string();
                let vb = right.func_value(f, &r).to_string();
                if !family.related(&result, &va, &vb) {
                    family
                        .relations
                        .get_mut(&result)
                        .expect("all sorts present")
                        .insert((va, vb));
                    added = true;
                }
            }
        }
        if !added {
            return Ok(family);
        }
    }
}

fn pair_passes_probes(
    left: &ClassicalModel,
    right: &ClassicalModel,
    probes: &[Probe],
    sort: &str,
    a: &str,
    b: &str,
) -> Result<bool, HarnessError> {
    for p in probes {
        if p.ctx.len() != 1 || p.ctx.sort(0) != sort {
            continue;
        }
        if right.satisfies(&p.ctx, &[b.to_string()], &p.formula)?
            && !left.satisfies(&p.ctx, &[a.to_string()], &probe_diamond(p))?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The largest family satisfying the per-pair conditions, computed as a
/// greatest fixpoint: start from every pair passing the single-variable
/// probe condition, then repeatedly delete pairs whose images under a
/// unary function symbol are gone or whose quotient preimages are gone.
/// Constants and wider function symbols do not drive deletion; they are
/// verified after the fact by [`counterpart_check`] and
/// [`maximality_probe`].
pub fn maximal_counterpart(
    left: &ClassicalModel,
    right: &ClassicalModel,
    probes: &[Probe],
    quotient_decls: &[String],
) -> Result<CounterpartFamily, HarnessError> {
    shared_signature(left, right)?;
    validate_quotient_decls(left.sig(), quotient_decls)?;
    let mut relations: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
    for sort in left.sig().sorts() {
        let mut pairs = BTreeSet::new();
        for a in left.carrier(sort) {
            for b in right.carrier(sort) {
                if pair_passes_probes(left, right, probes, sort, a, b)? {
                    pairs.insert((a.clone(), b.clone()));
                }
            }
        }
        relations.insert(sort.clone(), pairs);
    }
    let unary: Vec<(String, String, String)> = left
        .sig()
        .func_names()
        .filter_map(|f| {
            let (args, result) = left.sig().func(f).expect("listed");
            (args.len() == 1).then(|| (f.to_string(), args[0].clone(), result.to_string()))
        })
        .collect();
    loop {
        let mut doomed: Vec<(String, (String, String))> = Vec::new();
        for (f, dom, cod) in &unary {
            for (a, b) in &relations[dom] {
                let va = left.func_value(f, core::slice::from_ref(a)).to_string();
                let vb = right.func_value(f, core::slice::from_ref(b)).to_string();
                if !relations[cod].contains(&(va, vb)) {
                    doomed.push((dom.clone(), (a.clone(), b.clone())));
                }
            }
        }
        for q in quotient_decls {
            let (args, result) = left.sig().func(q).expect("validated");
            let dom_sort = &args[0];
            for (a, b) in &relations[result] {
                let found = relations[dom_sort].iter().any(|(a2, b2)| {
                    left.func_value(q, core::slice::from_ref(a2)) == a
                        && right.func_value(q, core::slice::from_ref(b2)) == b
                });
                if !found {
                    doomed.push((result.to_string(), (a.clone(), b.clone())));
                }
            }
        }
        if doomed.is_empty() {
            return CounterpartFamily::new(left.clone(), right.clone(), relations);
        }
        for (sort, pair) in doomed {
            relations.get_mut(&sort).expect("all sorts present").remove(&pair);
        }
    }
}

/// Absent pairs whose addition keeps every condition: the probe
/// condition for the new pair, quotient respect, and function
/// preservation on every related tuple the new pair participates in.
/// An empty result certifies maximality under single-pair additions.
pub fn maximality_probe(
    family: &CounterpartFamily,
    probes: &[Probe],
    quotient_decls: &[String],
) -> Result<Vec<(String, String, String)>, HarnessError> {
    shared_signature(family.left(), family.right())?;
    validate_quotient_decls(family.left().sig(), quotient_decls)?;
    let mut admissible = Vec::new();
    for sort in family.left().sig().sorts() {
        for a in family.left().carrier(sort) {
            for b in family.right().carrier(sort) {
                if family.related(sort, a, b) {
                    continue;
                }
                let mut extended = family.relations().clone();
                extended
                    .get_mut(sort)
                    .expect("all sorts present")
                    .insert((a.clone(), b.clone()));
                let candidate = CounterpartFamily::new(
                    family.left().clone(),
                    family.right().clone(),
                    extended,
                )?;
                let report = counterpart_check(&candidate, probes, quotient_decls)?;
                if report.passes() {
                    admissible.push((sort.clone(), a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(admissible)
}

/// One edge of the evaluation graph: a named verified family.
#[derive(Clone, Debug)]
pub struct EvaluationEdge {
    pub name: String,
    pub family: CounterpartFamily,
}

fn model_index(models: &[ClassicalModel], m: &ClassicalModel) -> Result<usize, HarnessError> {
    let idx = models
        .iter()
        .position(|cand| cand.name() == m.name())
        .ok_or_else(|| HarnessError::UnknownSymbol(m.name().to_string()))?;
    if &models[idx] != m {
        return Err(HarnessError::SignatureMismatch(format!(
            "edge endpoint {} differs from the listed model of that name",
            m.name()
        )));
    }
    Ok(idx)
}

/// Assembles verified models and families into an interpretation over
/// the graph with one vertex per model and one edge per family: each
/// sort becomes the relational G-set with that sort's carriers and
/// relations, predicates become the per-model extensions, functions the
/// per-model tables.  Every edge is re-verified against the probes
/// first.
pub fn build_evaluation(
    models: &[ClassicalModel],
    edges: &[EvaluationEdge],
    probes: &[Probe],
    quotient_decls: &[String],
) -> Result<Interpretation, HarnessError> {
    let Some(first) = models.first() else {
        return Err(HarnessError::SignatureMismatch(
            "no models supplied".to_string(),
        ));
    };
    for m in models {
        shared_signature(first, m)?;
    }
    for e in edges {
        model_index(models, e.family.left())?;
        model_index(models, e.family.right())?;
        let report = counterpart_check(&e.family, probes, quotient_decls)?;
        if let Some(failed) = report.laws.iter().find(|l| !l.holds_up()) {
            return Err(HarnessError::EdgeNotVerified {
                edge: e.name.clone(),
                law: failed.law.clone(),
            });
        }
    }
    let graph = Graph::new(
        models.iter().map(|m| m.name().to_string()).collect(),
        edges
            .iter()
            .map(|e| {
                (
                    e.name.clone(),
                    e.family.left().name().to_string(),
                    e.family.right().name().to_string(),
                )
            })
            .collect(),
    )?;
    let sig = first.sig().clone();
    let mut sorts = BTreeMap::new();
    for sort in sig.sorts() {
        let carriers: Vec<Vec<String>> = models.iter().map(|m| m.carrier(sort).to_vec()).collect();
        let mut relations = Vec::new();
        for e in edges {
            let src = e.family.left();
            let dst = e.family.right();
            let pairs: Vec<(usize, usize)> = e
                .family
                .pairs(sort)
                .iter()
                .map(|(a, b)| {
                    let ai = src
                        .carrier(sort)
                        .iter()
                        .position(|x| x == a)
                        .expect("validated");
                    let bi = dst
                        .carrier(sort)
                        .iter()
                        .position(|x| x == b)
                        .expect("validated");
                    (ai, bi)
                })
                .collect();
            relations.push(pairs);
        }
        sorts.insert(
            sort.clone(),
            RelGSet::from_parts(graph.clone(), carriers, relations)?,
        );
    }
    let elem_index = |sort: &str, v: usize, name: &str| -> usize {
        models[v]
            .carrier(sort)
            .iter()
            .position(|x| x == name)
            .expect("validated")
    };
    let mut preds = BTreeMap::new();
    for p in sig.pred_names().map(String::from).collect::<Vec<_>>() {
        let args = sig.pred(&p).expect("listed").to_vec();
        let factors: Vec<RelGSet> = args.iter().map(|s| sorts[s].clone()).collect();
        let product = product_over(graph.clone(), &factors)?;
        let mut parts = Vec::new();
        for (v, m) in models.iter().enumerate() {
            let mut bits = BitSet::new(product.object.carrier(v).len());
            for tuple in m.pred_extension(&p) {
                let indices: Vec<usize> = tuple
                    .iter()
                    .zip(&args)
                    .map(|(name, sort)| elem_index(sort, v, name))
                    .collect();
                bits.insert(product.tuple_to_index(v, &indices));
            }
            parts.push(bits);
        }
        preds.insert(p, MSubobject::new(product.object, parts));
    }
    let mut funcs = BTreeMap::new();
    for f in sig.func_names().map(String::from).collect::<Vec<_>>() {
        let (args, result) = sig.func(&f).expect("listed");
        let (args, result) = (args.to_vec(), result.to_string());
        let factors: Vec<RelGSet> = args.iter().map(|s| sorts[s].clone()).collect();
        let product = product_over(graph.clone(), &factors)?;
        let cod = sorts[&result].clone();
        let mut index_map = Vec::new();
        for (v, m) in models.iter().enumerate() {
            let mut row = Vec::new();
            for idx in 0..product.object.carrier(v).len() {
                let tuple = product.index_to_tuple(v, idx);
                let names: Vec<String> = tuple
                    .iter()
                    .zip(&args)
                    .map(|(i, sort)| m.carrier(sort)[*i].clone())
                    .collect();
                row.push(elem_index(&result, v, m.func_value(&f, &names)));
            }
            index_map.push(row);
        }
        funcs.insert(f, Morphism::from_index_map(product.object, cod, index_map)?);
    }
    Ok(Interpretation::new(sig, graph, sorts, preds, funcs)?)
}

/// The two diamond readings of one probe at one model, compared.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbeComparison {
    pub model: String,
    pub probe: String,
    /// Tuples in the diamond computed from the counterpart relations.
    pub counterpart: BTreeSet<Vec<String>>,
    /// Tuples in the stored diamond extension.
    pub stored: BTreeSet<Vec<String>>,
    /// Counterpart minus stored: must be empty on verified edges.
    pub violations: BTreeSet<Vec<String>>,
    /// Stored minus counterpart: stored witnesses with no realizing
    /// edge at this scale.
    pub gaps: BTreeSet<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct RepresentationReport {
    pub probes: Vec<String>,
    pub comparisons: Vec<ProbeComparison>,
}

impl RepresentationReport {
    /// The verified direction: every counterpart-computed diamond is
    /// contained in the stored one.
    pub fn direction_holds(&self) -> bool {
        self.comparisons.iter().all(|c| c.violations.is_empty())
    }

    pub fn gap_free(&self) -> bool {
        self.comparisons.iter().all(|c| c.gaps.is_empty())
    }
}

/// Builds the evaluation interpretation and compares, per model and
/// probe, the diamond computed through the counterpart relations
/// against the stored diamond extension.
pub fn representation_report(
    models: &[ClassicalModel],
    edges: &[EvaluationEdge],
    probes: &[Probe],
    quotient_decls: &[String],
) -> Result<RepresentationReport, HarnessError> {
    let interp = build_evaluation(models, edges, probes, quotient_decls)?;
    let mut evaluator = Evaluator::new(&interp);
    let mut comparisons = Vec::new();
    for p in probes {
        let diamond = probe_diamond(p);
        let sub = evaluator.eval(&p.ctx, &diamond)?;
        let product = interp.ctx_product(&p.ctx)?;
        let factor_objects: Vec<&RelGSet> = p
            .ctx
            .sorts()
            .iter()
            .map(|s| interp.sort_object(s))
            .collect::<Result<_, _>>()?;
        for (v, m) in models.iter().enumerate() {
            let mut counterpart = BTreeSet::new();
            for idx in sub.part(v).iter() {
                let tuple = product.index_to_tuple(v, idx);
                let names: Vec<String> = tuple
                    .iter()
                    .zip(&factor_objects)
                    .map(|(i, obj)| obj.carrier(v)[*i].clone())
                    .collect();
                counterpart.insert(names);
            }
            let stored = eval_classical(m, &p.ctx, &diamond)?;
            let violations = counterpart.difference(&stored).cloned().collect();
            let gaps = stored.difference(&counterpart).cloned().collect();
            comparisons.push(ProbeComparison {
                model: m.name().to_string(),
                probe: p.display(),
                counterpart,
                stored,
                violations,
                gaps,
            });
        }
    }
    Ok(RepresentationReport {
        probes: probes.iter().map(Probe::display).collect(),
        comparisons,
    })
}
