//! Hilbert-style proof checking for the modal calculus.
//!
//! A derivation is a numbered list of sequents, each justified by an
//! axiom schema (tautology instances, box distribution, quantifier and
//! equality axioms, continuity) or an inference rule (modus ponens,
//! necessitation, universal introduction, instantiation) applied to
//! earlier lines.  Justifications carry explicit witnesses, so checking
//! is pure pattern matching up to alpha-equivalence: no unification and
//! no search.
//!
//! `box phi` over a context abbreviates the box abstraction of the
//! whole context applied to its own variables; [`whole_context_box`]
//! builds that form and the box-distribution, necessitation, and
//! continuity checks insist on it.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::semantics::{is_model, validates, Interpretation, SemanticsError};
use crate::syntax::{
    alpha_eq, free_slots, instantiate_last, reindex_substitute, term_sort, well_formed,
    BoxAbstraction, Context, Formula, Signature, SyntaxError, Term,
};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProofError {
    /// The line does not match the cited schema or rule shape.
    SchemaMismatch(String),
    BadPremiseIndex(usize),
    SideConditionViolated(String),
    UnknownAxiom(String),
    /// Tautology checking caps the propositional skeleton at 16 atoms.
    TooManyAtoms(usize),
    Syntax(SyntaxError),
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofError::SchemaMismatch(s) => write!(f, "schema mismatch: {s}"),
            ProofError::BadPremiseIndex(i) => write!(f, "bad premise index {i}"),
            ProofError::SideConditionViolated(s) => write!(f, "side condition violated: {s}"),
            ProofError::UnknownAxiom(s) => write!(f, "unknown theory axiom {s}"),
            ProofError::TooManyAtoms(n) => write!(f, "{n} distinct atoms exceed the 16-atom cap"),
            ProofError::Syntax(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ProofError {}

impl From<SyntaxError> for ProofError {
    fn from(e: SyntaxError) -> Self {
        ProofError::Syntax(e)
    }
}

/// A formula over an explicit context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sequent {
    pub ctx: Context,
    pub formula: Formula,
}

impl Sequent {
    /// Alpha-matching of sequents: context variable names are printing
    /// surface, so only the sort lists and the formulas (up to alpha)
    /// count.
    pub fn matches(&self, other: &Sequent) -> bool {
        self.ctx.sorts() == other.ctx.sorts() && alpha_eq(&self.formula, &other.formula)
    }
}

/// A named axiom set over a signature.
#[derive(Clone, Debug)]
pub struct Theory {
    pub name: String,
    pub sig: Signature,
    pub axioms: Vec<(String, Sequent)>,
}

impl Theory {
    pub fn axiom(&self, name: &str) -> Option<&Sequent> {
        self.axioms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    /// Axioms in the triple shape the semantics module consumes.
    pub fn axiom_triples(&self) -> Vec<(String, Context, Formula)> {
        self.axioms
            .iter()
            .map(|(n, s)| (n.clone(), s.ctx.clone(), s.formula.clone()))
            .collect()
    }
}

/// Why a line holds.  Premise indices are 1-based and point strictly
/// backwards.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Justification {
    Taut,
    BoxDis,
    ForallEx { term: Term, var: String },
    Refl,
    Repl {
        var: String,
        t1: Term,
        t2: Term,
        body: Formula,
    },
    Cont {
        ctx: Context,
        body: Formula,
        terms: Vec<Term>,
    },
    TheoryAxiom(String),
    Mp(usize, usize),
    Nec(usize),
    ForallIn(usize, String),
    Inst(usize, Vec<(String, Term)>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Line {
    pub sequent: Sequent,
    pub just: Justification,
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub theory: String,
    pub lines: Vec<Line>,
}

/// `(box {ctx | f})(ctx variables)`: the whole-context reading of
/// `box f` over `ctx`.
pub fn whole_context_box(ctx: &Context, f: &Formula) -> Formula {
    Formula::BoxApp(
        BoxAbstraction {
            ctx: ctx.clone(),
            body: Box::new(f.clone()),
        },
        (0..ctx.len()).map(Term::Var).collect(),
    )
}

/// Propositional skeleton: bottoms and implications stay structural,
/// every other node becomes an atom identified up to alpha.
enum Skel {
    False,
    Atom(usize),
    Implies(Box<Skel>, Box<Skel>),
}

fn skeleton(f: &Formula, atoms: &mut Vec<Formula>) -> Skel {
    match f {
        Formula::Bottom => Skel::False,
        Formula::Implies(a, b) => Skel::Implies(
            Box::new(skeleton(a, atoms)),
            Box::new(skeleton(b, atoms)),
        ),
        other => {
            let id = match atoms.iter().position(|seen| alpha_eq(seen, other)) {
                Some(id) => id,
                None => {
                    atoms.push(other.clone());
                    atoms.len() - 1
                }
            };
            Skel::Atom(id)
        }
    }
}

fn skel_eval(s: &Skel, assignment: u32) -> bool {
    match s {
        Skel::False => false,
        Skel::Atom(id) => assignment >> id & 1 == 1,
        Skel::Implies(a, b) => !skel_eval(a, assignment) || skel_eval(b, assignment),
    }
}

/// Whether the formula is a substitution instance of a propositional
/// tautology, decided by truth table over the skeleton atoms.
pub fn taut_instance(f: &Formula) -> Result<bool, ProofError> {
    let mut atoms = Vec::new();
    let skel = skeleton(f, &mut atoms);
    if atoms.len() > 16 {
        return Err(ProofError::TooManyAtoms(atoms.len()));
    }
    let rows = 1u32 << atoms.len();
    Ok((0..rows).all(|assignment| skel_eval(&skel, assignment)))
}

fn mismatch<T>(reason: &str) -> Result<T, ProofError> {
    Err(ProofError::SchemaMismatch(reason.to_string()))
}

/// A box applied to exactly the line's context variables, returning the
/// body.
fn open_whole_context_box<'f>(
    f: &'f Formula,
    ctx: &Context,
    which: &str,
) -> Result<&'f Formula, ProofError> {
    match f {
        Formula::BoxApp(bx, args) => {
            if bx.ctx.sorts() != ctx.sorts() {
                return mismatch(&format!(
                    "{which}: box abstraction context differs from the line context"
                ));
            }
            let identity: Vec<Term> = (0..ctx.len()).map(Term::Var).collect();
            if args != &identity {
                return mismatch(&format!(
                    "{which}: box is not applied to the context variables"
                ));
            }
            Ok(&bx.body)
        }
        _ => mismatch(&format!("{which}: expected a box")),
    }
}

fn premise<'a>(prior: &'a [Line], idx: usize) -> Result<&'a Sequent, ProofError> {
    if idx == 0 || idx > prior.len() {
        return Err(ProofError::BadPremiseIndex(idx));
    }
    Ok(&prior[idx - 1].sequent)
}

fn same_context(a: &Context, b: &Context, what: &str) -> Result<(), ProofError> {
    if a.sorts() == b.sorts() {
        Ok(())
    } else {
        mismatch(&format!("{what}: context sorts differ"))
    }
}

/// Checks one line against the theory and the lines before it.
pub fn check_line(
    sig: &Signature,
    theory: &Theory,
    prior: &[Line],
    line: &Line,
) -> Result<(), ProofError> {
    let ctx = &line.sequent.ctx;
    let f = &line.sequent.formula;
    well_formed(sig, ctx, f)?;
    match &line.just {
        Justification::Taut => {
            if taut_instance(f)? {
                Ok(())
            } else {
                mismatch("not a tautology instance")
            }
        }
        Justification::BoxDis => {
            // box(phi -> psi) -> (box phi -> box psi), all three boxes
            // over the whole context.
            let Formula::Implies(lhs, rhs) = f else {
                return mismatch("box distribution: expected an implication");
            };
            let Formula::Implies(mid, end) = &**rhs else {
                return mismatch("box distribution: expected a nested implication");
            };
            let joint = open_whole_context_box(lhs, ctx, "box distribution antecedent")?;
            let Formula::Implies(phi, psi) = joint else {
                return mismatch("box distribution: antecedent box body is not an implication");
            };
            let phi_again = open_whole_context_box(mid, ctx, "box distribution second box")?;
            let psi_again = open_whole_context_box(end, ctx, "box distribution third box")?;
            if !alpha_eq(phi_again, phi) {
                return mismatch("box distribution: second box body differs from the antecedent");
            }
            if !alpha_eq(psi_again, psi) {
                return mismatch("box distribution: third box body differs from the consequent");
            }
            Ok(())
        }
        Justification::ForallEx { term, var } => {
            let Formula::Implies(lhs, rhs) = f else {
                return mismatch("universal elimination: expected an implication");
            };
            let Formula::Forall(name, sort, body) = &**lhs else {
                return mismatch("universal elimination: antecedent is not universal");
            };
            if name != var {
                return mismatch(&format!(
                    "universal elimination: justification names {var}, binder is {name}"
                ));
            }
            let got = term_sort(sig, ctx, term)?;
            if &got != sort {
                return mismatch(&format!(
                    "universal elimination: term of sort {got} for a {sort} binder"
                ));
            }
            let expected = instantiate_last(body, ctx.len(), term);
            if alpha_eq(rhs, &expected) {
                Ok(())
            } else {
                mismatch("universal elimination: consequent is not the instantiated body")
            }
        }
        Justification::Refl => match f {
            Formula::Eq(a, b) if a == b => Ok(()),
            Formula::Eq(_, _) => mismatch("reflexivity: sides differ"),
            _ => mismatch("reflexivity: expected an equality"),
        },
        Justification::Repl { var, t1, t2, body } => {
            let s1 = term_sort(sig, ctx, t1)?;
            let s2 = term_sort(sig, ctx, t2)?;
            if s1 != s2 {
                return mismatch(&format!(
                    "replacement: terms of different sorts {s1} and {s2}"
                ));
            }
            well_formed(sig, &ctx.extended(var, &s1), body)?;
            let expected = Formula::Implies(
                Box::new(Formula::Eq(t1.clone(), t2.clone())),
                Box::new(Formula::Implies(
                    Box::new(instantiate_last(body, ctx.len(), t1)),
                    Box::new(instantiate_last(body, ctx.len(), t2)),
                )),
            );
            if alpha_eq(f, &expected) {
                Ok(())
            } else {
                mismatch("replacement: line is not the instantiated schema")
            }
        }
        Justification::Cont {
            ctx: box_ctx,
            body,
            terms,
        } => {
            well_formed(sig, box_ctx, body)?;
            if terms.len() != box_ctx.len() {
                return mismatch(&format!(
                    "continuity: {} terms for a {}-variable abstraction",
                    terms.len(),
                    box_ctx.len()
                ));
            }
            for (slot, t) in terms.iter().enumerate() {
                let got = term_sort(sig, ctx, t)?;
                if got != box_ctx.sort(slot) {
                    return mismatch(&format!(
                        "continuity: term {} has sort {got}, abstraction wants {}",
                        slot + 1,
                        box_ctx.sort(slot)
                    ));
                }
            }
            let applied = Formula::BoxApp(
                BoxAbstraction {
                    ctx: box_ctx.clone(),
                    body: Box::new(body.clone()),
                },
                terms.clone(),
            );
            let pushed = whole_context_box(ctx, &reindex_substitute(body, terms, ctx.len()));
            let expected = Formula::Implies(Box::new(applied), Box::new(pushed));
            if alpha_eq(f, &expected) {
                Ok(())
            } else {
                mismatch("continuity: line is not the instantiated schema")
            }
        }
        Justification::TheoryAxiom(name) => {
            let Some(axiom) = theory.axiom(name) else {
                return Err(ProofError::UnknownAxiom(name.clone()));
            };
            if axiom.matches(&line.sequent) {
                Ok(())
            } else {
                mismatch(&format!("line is not axiom {name} up to alpha"))
            }
        }
        Justification::Mp(i, j) => {
            let antecedent = premise(prior, *i)?;
            let implication = premise(prior, *j)?;
            same_context(&antecedent.ctx, ctx, "modus ponens antecedent")?;
            same_context(&implication.ctx, ctx, "modus ponens implication")?;
            let Formula::Implies(a, b) = &implication.formula else {
                return mismatch("modus ponens: second premise is not an implication");
            };
            if !alpha_eq(a, &antecedent.formula) {
                return mismatch("modus ponens: antecedents do not match");
            }
            if alpha_eq(b, f) {
                Ok(())
            } else {
                mismatch("modus ponens: conclusion differs from the consequent")
            }
        }
        Justification::Nec(i) => {
            let prem = premise(prior, *i)?;
            same_context(&prem.ctx, ctx, "necessitation")?;
            let expected = whole_context_box(ctx, &prem.formula);
            if alpha_eq(f, &expected) {
                Ok(())
            } else {
                mismatch("necessitation: line is not the whole-context box of the premise")
            }
        }
        Justification::ForallIn(i, var) => {
            let prem = premise(prior, *i)?;
            let Some(k) = prem.ctx.lookup(var) else {
                return mismatch(&format!(
                    "universal introduction: {var} is not in the premise context"
                ));
            };
            let n = prem.ctx.len();
            let y_sort = prem.ctx.sort(k).to_string();
            let Formula::Implies(phi, psi) = &prem.formula else {
                return mismatch("universal introduction: premise is not an implication");
            };
            if free_slots(phi, n).contains(&k) {
                return Err(ProofError::SideConditionViolated(format!(
                    "{var} occurs in the antecedent"
                )));
            }
            let shrunk: Vec<String> = (0..n)
                .filter(|j| *j != k)
                .map(|j| prem.ctx.sort(j).to_string())
                .collect();
            if ctx.sorts() != shrunk {
                return mismatch(
                    "universal introduction: line context is not the premise context minus the variable",
                );
            }
            // Reindexing that drops slot k; the antecedent never uses k
            // (checked above), the consequent sends it to the new bound
            // slot.
            let mut drop_map: Vec<Term> = Vec::new();
            let mut move_map: Vec<Term> = Vec::new();
            for j in 0..n {
                if j == k {
                    drop_map.push(Term::Var(0));
                    move_map.push(Term::Var(n - 1));
                } else {
                    let shifted = if j < k { j } else { j - 1 };
                    drop_map.push(Term::Var(shifted));
                    move_map.push(Term::Var(shifted));
                }
            }
            let phi_shrunk = reindex_substitute(phi, &drop_map, n - 1);
            let psi_moved = reindex_substitute(psi, &move_map, n);
            let expected = Formula::Implies(
                Box::new(phi_shrunk),
                Box::new(Formula::Forall(
                    var.clone(),
                    y_sort,
                    Box::new(psi_moved),
                )),
            );
            if alpha_eq(f, &expected) {
                Ok(())
            } else {
                mismatch("universal introduction: line is not the generalized premise")
            }
        }
        Justification::Inst(i, assignments) => {
            let prem = premise(prior, *i)?;
            let mut terms: Vec<Term> = Vec::new();
            for slot in 0..prem.ctx.len() {
                let name = prem.ctx.name(slot);
                let Some((_, t)) = assignments.iter().find(|(n, _)| n == name) else {
                    return mismatch(&format!("instantiation: no term for {name}"));
                };
                let got = term_sort(sig, ctx, t)?;
                if got != prem.ctx.sort(slot) {
                    return mismatch(&format!(
                        "instantiation: {name} wants sort {}, term has {got}",
                        prem.ctx.sort(slot)
                    ));
                }
                terms.push(t.clone());
            }
            for (name, _) in assignments {
                if prem.ctx.lookup(name).is_none() {
                    return mismatch(&format!(
                        "instantiation: {name} is not a premise variable"
                    ));
                }
            }
            let expected = reindex_substitute(&prem.formula, &terms, ctx.len());
            if alpha_eq(f, &expected) {
                Ok(())
            } else {
                mismatch("instantiation: line is not the substituted premise")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LineVerdict {
    /// 1-based line number.
    pub line: usize,
    pub error: Option<ProofError>,
}

#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub accepted: bool,
    pub verdicts: Vec<LineVerdict>,
}

impl DerivationReport {
    pub fn first_failure(&self) -> Option<(usize, &ProofError)> {
        self.verdicts
            .iter()
            .find_map(|v| v.error.as_ref().map(|e| (v.line, e)))
    }
}

/// Checks every line; never fails as a whole.  Later lines are checked
/// against earlier ones even when those earlier lines were rejected, so
/// one bad step yields exactly one verdict.
pub fn check_derivation(theory: &Theory, derivation: &Derivation) -> DerivationReport {
    let mut verdicts = Vec::new();
    for (i, line) in derivation.lines.iter().enumerate() {
        let result = check_line(&theory.sig, theory, &derivation.lines[..i], line);
        verdicts.push(LineVerdict {
            line: i + 1,
            error: result.err(),
        });
    }
    DerivationReport {
        accepted: verdicts.iter().all(|v| v.error.is_none()),
        verdicts,
    }
}

#[derive(Clone, Debug)]
pub enum AuditError {
    /// An interpretation that fails a theory axiom cannot audit
    /// soundness.
    NotAModel {
        interpretation: usize,
        axiom: String,
    },
    Semantics(SemanticsError),
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::NotAModel {
                interpretation,
                axiom,
            } => write!(
                f,
                "interpretation {interpretation} is not a model: axiom {axiom} fails"
            ),
            AuditError::Semantics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for AuditError {}

impl From<SemanticsError> for AuditError {
    fn from(e: SemanticsError) -> Self {
        AuditError::Semantics(e)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AuditViolation {
    pub line: usize,
    pub interpretation: usize,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    /// Lines that were accepted and therefore audited.
    pub audited_lines: Vec<usize>,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every accepted line must denote the whole context product in every
/// supplied model of the theory.  Interpretations are pre-screened:
/// one failing an axiom aborts with [`AuditError::NotAModel`].
pub fn soundness_audit(
    theory: &Theory,
    derivation: &Derivation,
    interpretations: &[Interpretation],
) -> Result<AuditReport, AuditError> {
    let axioms = theory.axiom_triples();
    for (index, interp) in interpretations.iter().enumerate() {
        if interp.sig() != &theory.sig {
            return Err(AuditError::Semantics(SemanticsError::SignatureMismatch(
                format!("interpretation {index} interprets a different signature"),
            )));
        }
        for check in is_model(interp, &axioms)? {
            if !check.holds {
                return Err(AuditError::NotAModel {
                    interpretation: index,
                    axiom: check.name,
                });
            }
        }
    }
    let report = check_derivation(theory, derivation);
    let mut audited_lines = Vec::new();
    let mut violations = Vec::new();
    for verdict in &report.verdicts {
        if verdict.error.is_some() {
            continue;
        }
        audited_lines.push(verdict.line);
        let sequent = &derivation.lines[verdict.line - 1].sequent;
        for (index, interp) in interpretations.iter().enumerate() {
            if !validates(interp, &sequent.ctx, &sequent.formula)? {
                violations.push(AuditViolation {
                    line: verdict.line,
                    interpretation: index,
                });
            }
        }
    }
    Ok(AuditReport {
        audited_lines,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gset::{Morphism, RelGSet};
    use crate::syntax::{parse_formula, parse_sequent, parse_term};
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn test_sig() -> Signature {
        Signature::new(
            vec!["U".into(), "W".into()],
            vec![
                ("P".into(), vec!["U".into()]),
                ("O".into(), vec!["W".into()]),
                ("R".into(), vec![]),
            ],
            vec![
                ("e".into(), vec!["U".into()], "W".into()),
                ("n".into(), vec!["U".into()], "U".into()),
                ("k0".into(), vec![], "W".into()),
            ],
        )
        .unwrap()
    }

    fn empty_theory() -> Theory {
        Theory {
            name: "empty".into(),
            sig: test_sig(),
            axioms: Vec::new(),
        }
    }

    fn seq(sig: &Signature, line: &str) -> Sequent {
        let (ctx, formula) = parse_sequent(sig, line).unwrap();
        Sequent { ctx, formula }
    }

    fn check_one(theory: &Theory, prior: &[Line], line: &str, just: Justification) -> Result<(), ProofError> {
        let sequent = seq(&theory.sig, line);
        check_line(&theory.sig, theory, prior, &Line { sequent, just })
    }

    #[test]
    fn tautology_instances_by_truth_table() {
        let sig = test_sig();
        let ctx_u = parse_sequent(&sig, "ctx x:U |- P(x)").unwrap().0;
        let yes = parse_formula(&sig, &ctx_u, "P(x) -> P(x)").unwrap();
        assert!(taut_instance(&yes).unwrap());
        let ex_falso =
            parse_formula(&sig, &ctx_u, "false -> box {y:U | P(y)}(x)").unwrap();
        assert!(taut_instance(&ex_falso).unwrap());
        let no = parse_formula(&sig, &ctx_u, "box {y:U | P(y)}(x) -> P(x)").unwrap();
        assert!(!taut_instance(&no).unwrap());
        // Alpha-variant quantified subformulas count as one atom.
        let alpha =
            parse_formula(&sig, &ctx_u, "(forall y:U. P(y)) -> (forall z:U. P(z))").unwrap();
        assert!(taut_instance(&alpha).unwrap());
    }

    #[test]
    fn tautology_atom_cap() {
        let sig = test_sig();
        let ctx_u = parse_sequent(&sig, "ctx x:U |- P(x)").unwrap().0;
        // 17 distinct atoms P(n^k(x)) joined by implications.
        let mut term = "x".to_string();
        let mut f = parse_formula(&sig, &ctx_u, "P(x)").unwrap();
        for _ in 0..16 {
            term = format!("n({term})");
            let atom = parse_formula(&sig, &ctx_u, &format!("P({term})")).unwrap();
            f = Formula::Implies(Box::new(f), Box::new(atom));
        }
        assert_eq!(taut_instance(&f).unwrap_err(), ProofError::TooManyAtoms(17));
    }

    #[test]
    fn necessitation_on_a_tautology() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let l1 = Line {
            sequent: seq(sig, "ctx x:U |- P(x) -> P(x)"),
            just: Justification::Taut,
        };
        check_line(sig, &theory, &[], &l1).unwrap();
        let l2 = Line {
            sequent: seq(sig, "ctx x:U |- box {x:U | P(x) -> P(x)}(x)"),
            just: Justification::Nec(1),
        };
        check_line(sig, &theory, &[l1.clone()], &l2).unwrap();
        // A box over a different body is rejected.
        let err = check_one(
            &theory,
            &[l1],
            "ctx x:U |- box {x:U | P(x)}(x)",
            Justification::Nec(1),
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn box_distribution_shape() {
        let theory = empty_theory();
        check_one(
            &theory,
            &[],
            "ctx x:U |- box {x:U | P(x) -> P(n(x))}(x) -> (box {x:U | P(x)}(x) -> box {x:U | P(n(x))}(x))",
            Justification::BoxDis,
        )
        .unwrap();
        // Consequent box body must be the consequent of the first box.
        let err = check_one(
            &theory,
            &[],
            "ctx x:U |- box {x:U | P(x) -> P(n(x))}(x) -> (box {x:U | P(x)}(x) -> box {x:U | P(x)}(x))",
            Justification::BoxDis,
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
        // Boxes must take the whole context.
        let err = check_one(
            &theory,
            &[],
            "ctx x:U |- box {y:U | P(y) -> P(y)}(n(x)) -> (box {y:U | P(y)}(n(x)) -> box {y:U | P(y)}(n(x)))",
            Justification::BoxDis,
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn universal_elimination_with_witness_term() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let t = parse_term(sig, &parse_sequent(sig, "ctx x:U |- P(x)").unwrap().0, "n(x)")
            .unwrap();
        check_one(
            &theory,
            &[],
            "ctx x:U |- (forall y:U. P(y)) -> P(n(x))",
            Justification::ForallEx {
                term: t.clone(),
                var: "y".into(),
            },
        )
        .unwrap();
        // Wrong witness: the consequent instantiates with x, not n(x).
        let err = check_one(
            &theory,
            &[],
            "ctx x:U |- (forall y:U. P(y)) -> P(x)",
            Justification::ForallEx {
                term: t,
                var: "y".into(),
            },
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn reflexivity_and_replacement() {
        let theory = empty_theory();
        let sig = &theory.sig;
        check_one(&theory, &[], "ctx x:U |- x = x", Justification::Refl).unwrap();
        check_one(
            &theory,
            &[],
            "ctx x:U |- e(x) = e(x)",
            Justification::Refl,
        )
        .unwrap();
        let err = check_one(
            &theory,
            &[],
            "ctx x:U |- x = n(x)",
            Justification::Refl,
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));

        let ctx_u = parse_sequent(sig, "ctx x:U |- P(x)").unwrap().0;
        let t1 = parse_term(sig, &ctx_u, "x").unwrap();
        let t2 = parse_term(sig, &ctx_u, "n(x)").unwrap();
        let body = parse_formula(sig, &ctx_u.extended("y", "U"), "P(y)").unwrap();
        check_one(
            &theory,
            &[],
            "ctx x:U |- x = n(x) -> (P(x) -> P(n(x)))",
            Justification::Repl {
                var: "y".into(),
                t1: t1.clone(),
                t2,
                body: body.clone(),
            },
        )
        .unwrap();
        // Swapped witnesses no longer match the line.
        let t2 = parse_term(sig, &ctx_u, "n(x)").unwrap();
        let err = check_one(
            &theory,
            &[],
            "ctx x:U |- x = n(x) -> (P(x) -> P(n(x)))",
            Justification::Repl {
                var: "y".into(),
                t1: t2,
                t2: t1,
                body,
            },
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn continuity_instance_from_the_schema() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let ctx_z = parse_sequent(sig, "ctx z:U |- P(z)").unwrap().0;
        let box_ctx = parse_sequent(sig, "ctx x:W |- O(x)").unwrap().0;
        let body = parse_formula(sig, &box_ctx, "O(x)").unwrap();
        let term = parse_term(sig, &ctx_z, "e(z)").unwrap();
        check_one(
            &theory,
            &[],
            "ctx z:U |- box {x:W | O(x)}(e(z)) -> box {z:U | O(e(z))}(z)",
            Justification::Cont {
                ctx: box_ctx.clone(),
                body: body.clone(),
                terms: vec![term.clone()],
            },
        )
        .unwrap();
        // The pushed-in side must be the whole-context box of the
        // substituted body, not the original abstraction again.
        let err = check_one(
            &theory,
            &[],
            "ctx z:U |- box {x:W | O(x)}(e(z)) -> box {w:W | O(w)}(e(z))",
            Justification::Cont {
                ctx: box_ctx,
                body,
                terms: vec![term],
            },
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn modus_ponens_indices_and_shapes() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let l1 = Line {
            sequent: seq(sig, "ctx x:U |- P(x) -> P(x)"),
            just: Justification::Taut,
        };
        let l2 = Line {
            sequent: seq(
                sig,
                "ctx x:U |- (P(x) -> P(x)) -> (P(x) -> (P(x) -> P(x)))",
            ),
            just: Justification::Taut,
        };
        let prior = [l1, l2];
        check_one(
            &theory,
            &prior,
            "ctx x:U |- P(x) -> (P(x) -> P(x))",
            Justification::Mp(1, 2),
        )
        .unwrap();
        // Swapped order: premise 2 is not the antecedent of premise 1.
        let err = check_one(
            &theory,
            &prior,
            "ctx x:U |- P(x) -> (P(x) -> P(x))",
            Justification::Mp(2, 1),
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
        let err = check_one(
            &theory,
            &prior,
            "ctx x:U |- P(x) -> (P(x) -> P(x))",
            Justification::Mp(5, 2),
        )
        .unwrap_err();
        assert_eq!(err, ProofError::BadPremiseIndex(5));
    }

    #[test]
    fn universal_introduction_with_side_condition() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let l1 = Line {
            sequent: seq(sig, "ctx y:U |- R() -> P(y)"),
            just: Justification::Taut, // shape only; not actually a tautology
        };
        check_one(
            &theory,
            &[l1],
            "ctx |- R() -> forall y:U. P(y)",
            Justification::ForallIn(1, "y".into()),
        )
        .unwrap();
        // The generalized variable occurring in the antecedent is
        // exactly what the side condition forbids.
        let l1 = Line {
            sequent: seq(sig, "ctx y:U |- P(y) -> P(y)"),
            just: Justification::Taut,
        };
        let err = check_one(
            &theory,
            &[l1],
            "ctx |- R() -> forall y:U. P(y)",
            Justification::ForallIn(1, "y".into()),
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SideConditionViolated(_)));
        // Mid-context generalization reindexes the remaining variables.
        let l1 = Line {
            sequent: seq(sig, "ctx y:U, z:U |- z = z -> P(y)"),
            just: Justification::Taut, // shape only
        };
        check_one(
            &theory,
            &[l1],
            "ctx z:U |- z = z -> forall y:U. P(y)",
            Justification::ForallIn(1, "y".into()),
        )
        .unwrap();
    }

    #[test]
    fn instantiation_renames_weakens_and_substitutes() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let l1 = Line {
            sequent: seq(sig, "ctx x:U |- P(x) -> P(x)"),
            just: Justification::Taut,
        };
        let prior = [l1];
        let ctx_z = parse_sequent(sig, "ctx z:U |- P(z)").unwrap().0;
        // Substitute a compound term.
        check_one(
            &theory,
            &prior,
            "ctx z:U |- P(n(z)) -> P(n(z))",
            Justification::Inst(
                1,
                vec![("x".into(), parse_term(sig, &ctx_z, "n(z)").unwrap())],
            ),
        )
        .unwrap();
        // Rename.
        check_one(
            &theory,
            &prior,
            "ctx z:U |- P(z) -> P(z)",
            Justification::Inst(
                1,
                vec![("x".into(), parse_term(sig, &ctx_z, "z").unwrap())],
            ),
        )
        .unwrap();
        // Weaken into a wider context.
        let wide = parse_sequent(sig, "ctx x:U, w:W |- P(x)").unwrap().0;
        check_one(
            &theory,
            &prior,
            "ctx x:U, w:W |- P(x) -> P(x)",
            Justification::Inst(
                1,
                vec![("x".into(), parse_term(sig, &wide, "x").unwrap())],
            ),
        )
        .unwrap();
        // A missing assignment is rejected.
        let err = check_one(
            &theory,
            &prior,
            "ctx z:U |- P(z) -> P(z)",
            Justification::Inst(1, vec![]),
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
    }

    #[test]
    fn theory_axioms_match_up_to_alpha() {
        let sig = test_sig();
        let mut theory = empty_theory();
        theory
            .axioms
            .push(("p-total".into(), seq(&sig, "ctx x:U |- P(x)")));
        check_one(
            &theory,
            &[],
            "ctx u:U |- P(u)",
            Justification::TheoryAxiom("p-total".into()),
        )
        .unwrap();
        let err = check_one(
            &theory,
            &[],
            "ctx u:U |- P(n(u))",
            Justification::TheoryAxiom("p-total".into()),
        )
        .unwrap_err();
        assert!(matches!(err, ProofError::SchemaMismatch(_)));
        let err = check_one(
            &theory,
            &[],
            "ctx u:U |- P(u)",
            Justification::TheoryAxiom("missing".into()),
        )
        .unwrap_err();
        assert_eq!(err, ProofError::UnknownAxiom("missing".into()));
    }

    #[test]
    fn derivation_report_pins_the_failing_line() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let good = Derivation {
            theory: theory.name.clone(),
            lines: vec![
                Line {
                    sequent: seq(sig, "ctx x:U |- P(x) -> P(x)"),
                    just: Justification::Taut,
                },
                Line {
                    sequent: seq(sig, "ctx x:U |- box {x:U | P(x) -> P(x)}(x)"),
                    just: Justification::Nec(1),
                },
            ],
        };
        let report = check_derivation(&theory, &good);
        assert!(report.accepted);
        let mut bad = good.clone();
        bad.lines[1].just = Justification::Nec(2);
        let report = check_derivation(&theory, &bad);
        assert!(!report.accepted);
        let (line, err) = report.first_failure().unwrap();
        assert_eq!(line, 2);
        assert_eq!(*err, ProofError::BadPremiseIndex(2));
    }

    fn test_interp() -> Interpretation {
        let graph = fixtures::f1_graph();
        let x1 = fixtures::f1_x1();
        let x1f = fixtures::f1_x1f();
        let mut sorts = BTreeMap::new();
        sorts.insert("U".to_string(), x1.clone());
        sorts.insert("W".to_string(), x1f.clone());
        let mut preds = BTreeMap::new();
        preds.insert("P".to_string(), fixtures::sub(&x1, &[("a", &["1"])]));
        preds.insert("O".to_string(), fixtures::sub(&x1f, &[("a", &["0"])]));
        preds.insert(
            "R".to_string(),
            crate::gset::MSubobject::top(&RelGSet::terminal(graph.clone())),
        );
        let mut funcs = BTreeMap::new();
        funcs.insert("e".to_string(), fixtures::f1_e_x1_to_x1f());
        funcs.insert("n".to_string(), Morphism::identity(&x1));
        funcs.insert(
            "k0".to_string(),
            Morphism::from_index_map(RelGSet::terminal(graph.clone()), x1f, vec![vec![0]])
                .unwrap(),
        );
        Interpretation::new(test_sig(), graph, sorts, preds, funcs).unwrap()
    }

    #[test]
    fn soundness_audit_validates_accepted_lines() {
        let theory = empty_theory();
        let sig = &theory.sig;
        let derivation = Derivation {
            theory: theory.name.clone(),
            lines: vec![
                Line {
                    sequent: seq(sig, "ctx x:U |- P(x) -> P(x)"),
                    just: Justification::Taut,
                },
                Line {
                    sequent: seq(sig, "ctx x:U |- box {x:U | P(x) -> P(x)}(x)"),
                    just: Justification::Nec(1),
                },
                Line {
                    sequent: seq(sig, "ctx z:U |- box {x:W | O(x)}(e(z)) -> box {z:U | O(e(z))}(z)"),
                    just: Justification::Cont {
                        ctx: parse_sequent(sig, "ctx x:W |- O(x)").unwrap().0,
                        body: parse_formula(
                            sig,
                            &parse_sequent(sig, "ctx x:W |- O(x)").unwrap().0,
                            "O(x)",
                        )
                        .unwrap(),
                        terms: vec![parse_term(
                            sig,
                            &parse_sequent(sig, "ctx z:U |- P(z)").unwrap().0,
                            "e(z)",
                        )
                        .unwrap()],
                    },
                },
            ],
        };
        let report = check_derivation(&theory, &derivation);
        assert!(report.accepted, "{:?}", report.first_failure());
        let audit = soundness_audit(&theory, &derivation, &[test_interp()]).unwrap();
        assert!(audit.sound());
        assert_eq!(audit.audited_lines, [1, 2, 3]);
    }

    #[test]
    fn audit_rejects_non_models_up_front() {
        let sig = test_sig();
        let mut theory = empty_theory();
        theory
            .axioms
            .push(("p-total".into(), seq(&sig, "ctx x:U |- P(x)")));
        let derivation = Derivation {
            theory: theory.name.clone(),
            lines: Vec::new(),
        };
        let err = soundness_audit(&theory, &derivation, &[test_interp()]).unwrap_err();
        match err {
            AuditError::NotAModel {
                interpretation,
                axiom,
            } => {
                assert_eq!(interpretation, 0);
                assert_eq!(axiom, "p-total");
            }
            other => panic!("expected NotAModel, got {other}"),
        }
    }
}
