//! Evaluating the modal language in relational structures.
//!
//! An interpretation sends each sort to an object, each predicate to a
//! subobject of the product of its argument sorts, and each function
//! symbol to a morphism between such products.  A formula over a
//! context then denotes a subobject of the context product: terms
//! become morphisms built from projections and tupling, the connectives
//! act through the Boolean lattice, a quantifier projects away its
//! (last) slot, and a box abstraction pulls the necessity of its body
//! back along the tuple of argument terms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::gset::{
    bang, compose, direct_image, product_over, project_product, pullback_sub, tuple_morphism,
    GSetError, Graph, MSubobject, Morphism, Product, RelGSet,
};
use crate::syntax::{canonical, Context, Formula, Signature, SyntaxError, Term};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SemanticsError {
    /// A symbol without an assignment, or an assignment without a symbol.
    UnknownSymbol(String),
    /// An assignment whose shape disagrees with the signature.
    SignatureMismatch(String),
    Syntax(SyntaxError),
    Core(GSetError),
}

impl fmt::Display for SemanticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsError::UnknownSymbol(s) => write!(f, "unknown symbol {s}"),
            SemanticsError::SignatureMismatch(s) => write!(f, "signature mismatch: {s}"),
            SemanticsError::Syntax(e) => write!(f, "{e}"),
            SemanticsError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SemanticsError {}

impl From<SyntaxError> for SemanticsError {
    fn from(e: SyntaxError) -> Self {
        SemanticsError::Syntax(e)
    }
}

impl From<GSetError> for SemanticsError {
    fn from(e: GSetError) -> Self {
        SemanticsError::Core(e)
    }
}

/// An assignment of objects, subobjects, and morphisms to a signature,
/// validated on construction so evaluation cannot hit shape errors.
#[derive(Clone, Debug)]
pub struct Interpretation {
    sig: Signature,
    graph: Arc<Graph>,
    sorts: BTreeMap<String, RelGSet>,
    preds: BTreeMap<String, MSubobject>,
    funcs: BTreeMap<String, Morphism>,
}

impl Interpretation {
    pub fn new(
        sig: Signature,
        graph: Arc<Graph>,
        sorts: BTreeMap<String, RelGSet>,
        preds: BTreeMap<String, MSubobject>,
        funcs: BTreeMap<String, Morphism>,
    ) -> Result<Interpretation, SemanticsError> {
        for name in sorts.keys() {
            if !sig.has_sort(name) {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        for sort in sig.sorts() {
            let obj = sorts
                .get(sort)
                .ok_or_else(|| SemanticsError::UnknownSymbol(sort.clone()))?;
            if obj.graph() != &graph {
                return Err(SemanticsError::SignatureMismatch(format!(
                    "sort {sort} lives over a different graph"
                )));
            }
        }
        let interp = Interpretation {
            sig,
            graph,
            sorts,
            preds,
            funcs,
        };
        for name in interp.preds.keys() {
            if interp.sig.pred(name).is_none() {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        for name in interp.funcs.keys() {
            if interp.sig.func(name).is_none() {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        let pred_names: Vec<String> = interp.sig.pred_names().map(String::from).collect();
        for name in pred_names {
            let args = interp.sig.pred(&name).expect("listed").to_vec();
            let sub = interp
                .preds
                .get(&name)
                .ok_or_else(|| SemanticsError::UnknownSymbol(name.clone()))?;
            let ambient = interp.sorts_product(&args)?;
            if sub.ambient() != &ambient.object {
                return Err(SemanticsError::SignatureMismatch(format!(
                    "predicate {name} is not a subobject of its argument product"
                )));
            }
        }
        let func_names: Vec<String> = interp.sig.func_names().map(String::from).collect();
        for name in func_names {
            let (args, result) = {
                let (a, r) = interp.sig.func(&name).expect("listed");
                (a.to_vec(), r.to_string())
            };
            let mor = interp
                .funcs
                .get(&name)
                .ok_or_else(|| SemanticsError::UnknownSymbol(name.clone()))?;
            let dom = interp.sorts_product(&args)?;
            if mor.dom() != &dom.object || mor.cod() != &interp.sorts[&result] {
                return Err(SemanticsError::SignatureMismatch(format!(
                    "function {name} has the wrong endpoints"
                )));
            }
        }
        Ok(interp)
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn sort_object(&self, name: &str) -> Result<&RelGSet, SemanticsError> {
        self.sorts
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownSymbol(name.to_string()))
    }

    pub fn pred_sub(&self, name: &str) -> Result<&MSubobject, SemanticsError> {
        self.preds
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownSymbol(name.to_string()))
    }

    pub fn func_morphism(&self, name: &str) -> Result<&Morphism, SemanticsError> {
        self.funcs
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownSymbol(name.to_string()))
    }

    /// Product of the objects interpreting a list of sort names.
    fn sorts_product(&self, sorts: &[String]) -> Result<Product, SemanticsError> {
        let factors: Vec<RelGSet> = sorts
            .iter()
            .map(|s| self.sort_object(s).cloned())
            .collect::<Result<_, _>>()?;
        Ok(product_over(self.graph.clone(), &factors)?)
    }

    /// The context product object; the empty context gives the terminal.
    pub fn ctx_product(&self, ctx: &Context) -> Result<Product, SemanticsError> {
        self.sorts_product(&ctx.sorts())
    }

    /// Interprets a term as a morphism from the context product to the
    /// object of the term's sort: variables become projections,
    /// applications compose the function morphism with the tuple of
    /// interpreted arguments.
    pub fn term_morphism(&self, ctx: &Context, t: &Term) -> Result<Morphism, SemanticsError> {
        let product = self.ctx_product(ctx)?;
        self.term_morphism_in(&product, ctx, t)
    }

    fn term_morphism_in(
        &self,
        product: &Product,
        ctx: &Context,
        t: &Term,
    ) -> Result<Morphism, SemanticsError> {
        match t {
            Term::Var(i) => {
                if *i >= ctx.len() {
                    return Err(SemanticsError::Syntax(SyntaxError::BadLevel(*i)));
                }
                Ok(product.projections[*i].clone())
            }
            Term::App(name, args) => {
                let func = self.func_morphism(name)?.clone();
                let components: Vec<Morphism> = args
                    .iter()
                    .map(|a| self.term_morphism_in(product, ctx, a))
                    .collect::<Result<_, _>>()?;
                let tuple = if components.is_empty() {
                    // Zero-ary application factors through the terminal.
                    bang(&product.object)
                } else {
                    tuple_morphism(&product.object, &components)?
                };
                Ok(compose(&tuple, &func)?)
            }
        }
    }
}

/// Formula evaluator with a cache keyed by context sorts and the
/// alpha-canonical formula, so alpha-variants share work.
pub struct Evaluator<'a> {
    interp: &'a Interpretation,
    memo: BTreeMap<String, MSubobject>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation) -> Evaluator<'a> {
        Evaluator {
            interp,
            memo: BTreeMap::new(),
        }
    }

    pub fn eval(&mut self, ctx: &Context, f: &Formula) -> Result<MSubobject, SemanticsError> {
        let key = format!("{:?}#{:?}", ctx.sorts(), canonical(f));
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let result = self.eval_uncached(ctx, f)?;
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    fn eval_uncached(&mut self, ctx: &Context, f: &Formula) -> Result<MSubobject, SemanticsError> {
        let interp = self.interp;
        let product = interp.ctx_product(ctx)?;
        match f {
            Formula::Atom(name, args) => {
                let sub = interp.pred_sub(name)?.clone();
                let components: Vec<Morphism> = args
                    .iter()
                    .map(|a| interp.term_morphism_in(&product, ctx, a))
                    .collect::<Result<_, _>>()?;
                let tuple = if components.is_empty() {
                    bang(&product.object)
                } else {
                    tuple_morphism(&product.object, &components)?
                };
                Ok(pullback_sub(&tuple, &sub)?)
            }
            Formula::Eq(a, b) => {
                let fa = interp.term_morphism_in(&product, ctx, a)?;
                let fb = interp.term_morphism_in(&product, ctx, b)?;
                if fa.cod() != fb.cod() {
                    return Err(SemanticsError::SignatureMismatch(
                        "equated terms land in different objects".to_string(),
                    ));
                }
                Ok(crate::gset::equalizer(&fa, &fb)?)
            }
            Formula::Bottom => Ok(MSubobject::bottom(&product.object)),
            Formula::Implies(a, b) => {
                let sa = self.eval(ctx, a)?;
                let sb = self.eval(ctx, b)?;
                Ok(sa.neg().join(&sb)?)
            }
            Formula::Forall(name, sort, body) => {
                let extended = ctx.extended(name, sort);
                let inner = self.eval(&extended, body)?;
                let factors: Vec<RelGSet> = extended
                    .sorts()
                    .iter()
                    .map(|s| interp.sort_object(s).cloned())
                    .collect::<Result<_, _>>()?;
                let keep: Vec<usize> = (0..ctx.len()).collect();
                let proj = project_product(&factors, &keep)?;
                // Universal quantification as the negated direct image
                // of the negation along the projection dropping the
                // bound slot.
                Ok(direct_image(&proj, &inner.neg())?.neg())
            }
            Formula::BoxApp(bx, args) => {
                let body = self.eval(&bx.ctx, &bx.body)?;
                let boxed = crate::gset::boxm(&body);
                let components: Vec<Morphism> = args
                    .iter()
                    .map(|a| interp.term_morphism_in(&product, ctx, a))
                    .collect::<Result<_, _>>()?;
                let tuple = if components.is_empty() {
                    bang(&product.object)
                } else {
                    tuple_morphism(&product.object, &components)?
                };
                Ok(pullback_sub(&tuple, &boxed)?)
            }
        }
    }
}

/// Evaluates one formula; for many formulas over one interpretation,
/// keep an [`Evaluator`] instead.
pub fn interpret_formula(
    interp: &Interpretation,
    ctx: &Context,
    f: &Formula,
) -> Result<MSubobject, SemanticsError> {
    Evaluator::new(interp).eval(ctx, f)
}

/// Whether the formula denotes the whole context product.
pub fn validates(
    interp: &Interpretation,
    ctx: &Context,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    let sub = interpret_formula(interp, ctx, f)?;
    Ok(sub == MSubobject::top(sub.ambient()))
}

/// Verdict for one axiom of a theory.
#[derive(Clone, Debug)]
pub struct ModelCheck {
    pub name: String,
    pub holds: bool,
    /// A context-product element outside the denotation, as
    /// (vertex name, element name).
    pub counterexample: Option<(String, String)>,
}

/// Checks every axiom, reporting a witness for each failure.  The
/// interpretation is a model exactly when all entries hold.
pub fn is_model(
    interp: &Interpretation,
    axioms: &[(String, Context, Formula)],
) -> Result<Vec<ModelCheck>, SemanticsError> {
    let mut eval = Evaluator::new(interp);
    let mut out = Vec::new();
    for (name, ctx, f) in axioms {
        let sub = eval.eval(ctx, f)?;
        let mut counterexample = None;
        'search: for v in 0..sub.ambient().graph().vertex_count() {
            for i in 0..sub.ambient().carrier(v).len() {
                if !sub.part(v).contains(i) {
                    counterexample = Some((
                        sub.ambient().graph().vertex_name(v).to_string(),
                        sub.ambient().carrier(v)[i].clone(),
                    ));
                    break 'search;
                }
            }
        }
        out.push(ModelCheck {
            name: name.clone(),
            holds: counterexample.is_none(),
            counterexample,
        });
    }
    Ok(out)
}
