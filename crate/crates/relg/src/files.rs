//! On-disk formats for the command line: JSON documents for relational
//! G-sets, interpretations, probe sets, classical models, and pair
//! families, plus line-oriented theory and proof scripts.
//!
//! Every JSON document carries a `"version": 1` field and is rejected
//! otherwise.  Elements are always referred to by their carrier names,
//! never by index, so files stay readable and survive reordering of
//! unrelated entries.  Formulas, sequents, and terms embedded in any
//! format use the grammar of `relg_core::syntax` as plain strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use relg_core::bits::BitSet;
use relg_core::gset::{product_over, Graph, MSubobject, Morphism, Product, RelGSet};
use relg_core::harness::{ClassicalModel, Demodalized, Probe};
use relg_core::proof::{Derivation, Justification, Line, Sequent, Theory};
use relg_core::semantics::Interpretation;
use relg_core::syntax::{
    parse_context, parse_formula, parse_sequent, parse_term, term_sort, ParseError, Signature,
};

#[derive(Debug, Error)]
pub enum FileError {
    // Display already embeds the inner error, so these variants carry
    // no #[source]: an alternate-format print would repeat the message.
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{path}: {err}")]
    Json { path: String, err: serde_json::Error },
    #[error("{path}: version {found} is not supported (expected 1)")]
    Version { path: String, found: u32 },
    #[error("{path}:{line}: {message}")]
    Line {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Content { path: String, message: String },
}

impl FileError {
    fn content(path: &Path, message: impl Into<String>) -> FileError {
        FileError::Content {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    fn line(path: &Path, line: usize, message: impl Into<String>) -> FileError {
        FileError::Line {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    /// A single-line embedded formula reports its column against the
    /// hosting file line.
    fn embedded(path: &Path, line: usize, err: ParseError) -> FileError {
        FileError::line(path, line, format!("col {}: {}", err.col, err.message))
    }
}

fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|err| FileError::Io {
        path: path.display().to_string(),
        err,
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|err| FileError::Json {
        path: path.display().to_string(),
        err,
    })
}

fn check_version(path: &Path, found: u32) -> Result<(), FileError> {
    if found != 1 {
        return Err(FileError::Version {
            path: path.display().to_string(),
            found,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Relational G-set documents.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeFile {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

/// A relational G-set: carriers per vertex name, relation pairs per
/// edge name.  Missing vertices get empty carriers, missing edges empty
/// relations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub graph: GraphFile,
    #[serde(default)]
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

fn build_graph(path: &Path, g: &GraphFile) -> Result<Arc<Graph>, FileError> {
    Graph::new(
        g.vertices.clone(),
        g.edges
            .iter()
            .map(|e| (e.name.clone(), e.src.clone(), e.dst.clone()))
            .collect(),
    )
    .map_err(|e| FileError::content(path, e.to_string()))
}

pub fn load_model(path: &Path) -> Result<RelGSet, FileError> {
    let doc: ModelFile = read_json(path)?;
    check_version(path, doc.version)?;
    let graph = build_graph(path, &doc.graph)?;
    RelGSet::new(graph, &doc.carriers, &doc.relations)
        .map_err(|e| FileError::content(path, e.to_string()))
}

/// The document for an in-memory object, used when reports embed
/// objects as witnesses.
pub fn model_file_of(x: &RelGSet) -> ModelFile {
    let graph = x.graph();
    let vertices: Vec<String> = (0..graph.vertex_count())
        .map(|v| graph.vertex_name(v).to_string())
        .collect();
    let edges = (0..graph.edge_count())
        .map(|e| {
            let edge = graph.edge(e);
            EdgeFile {
                name: edge.name.clone(),
                src: vertices[edge.src].clone(),
                dst: vertices[edge.dst].clone(),
            }
        })
        .collect();
    let carriers = (0..graph.vertex_count())
        .map(|v| (vertices[v].clone(), x.carrier(v).to_vec()))
        .collect();
    let relations = (0..graph.edge_count())
        .map(|e| {
            let edge = graph.edge(e);
            let pairs = x
                .relation(e)
                .iter()
                .map(|(a, b)| {
                    (
                        x.carrier(edge.src)[*a].clone(),
                        x.carrier(edge.dst)[*b].clone(),
                    )
                })
                .collect();
            (edge.name.clone(), pairs)
        })
        .collect();
    ModelFile {
        version: 1,
        graph: GraphFile { vertices, edges },
        carriers,
        relations,
    }
}

// ---------------------------------------------------------------------
// Signatures and interpretations.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FuncDecl {
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignatureFile {
    pub sorts: Vec<String>,
    #[serde(default)]
    pub preds: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub funcs: BTreeMap<String, FuncDecl>,
}

fn build_signature(path: &Path, s: &SignatureFile) -> Result<Signature, FileError> {
    Signature::new(
        s.sorts.clone(),
        s.preds.iter().map(|(n, a)| (n.clone(), a.clone())).collect(),
        s.funcs
            .iter()
            .map(|(n, d)| (n.clone(), d.args.clone(), d.result.clone()))
            .collect(),
    )
    .map_err(|e| FileError::content(path, e.to_string()))
}

/// Carrier-and-relation body of one sort inside an interpretation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SortBody {
    #[serde(default)]
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

/// An interpretation: the shared graph, the signature, one G-set body
/// per sort, predicate extensions as element-name tuples per vertex,
/// and function tables as rows `[arg1, .., argN, value]` per vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpFile {
    pub version: u32,
    pub graph: GraphFile,
    pub signature: SignatureFile,
    pub sorts: BTreeMap<String, SortBody>,
    #[serde(default)]
    pub preds: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default)]
    pub funcs: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

/// Resolves one element name inside a factor carrier.
fn elem_index(
    path: &Path,
    factor: &RelGSet,
    v: usize,
    name: &str,
    what: &str,
) -> Result<usize, FileError> {
    factor.carrier(v).iter().position(|e| e == name).ok_or_else(|| {
        FileError::content(
            path,
            format!(
                "{what}: element {name} is not in the {} carrier",
                factor.graph().vertex_name(v)
            ),
        )
    })
}

/// A tuple of element names over per-factor carriers, as a product index.
fn tuple_index(
    path: &Path,
    product: &Product,
    factors: &[RelGSet],
    v: usize,
    names: &[String],
    what: &str,
) -> Result<usize, FileError> {
    if names.len() != factors.len() {
        return Err(FileError::content(
            path,
            format!(
                "{what}: tuple {names:?} has {} entries, expected {}",
                names.len(),
                factors.len()
            ),
        ));
    }
    let mut idx = Vec::with_capacity(names.len());
    for (f, name) in factors.iter().zip(names) {
        idx.push(elem_index(path, f, v, name, what)?);
    }
    Ok(product.tuple_to_index(v, &idx))
}

pub fn load_interp(path: &Path) -> Result<Interpretation, FileError> {
    let doc: InterpFile = read_json(path)?;
    check_version(path, doc.version)?;
    let graph = build_graph(path, &doc.graph)?;
    let sig = build_signature(path, &doc.signature)?;

    let mut sorts = BTreeMap::new();
    for sort in sig.sorts() {
        let body = doc.sorts.get(sort).ok_or_else(|| {
            FileError::content(path, format!("sort {sort} has no carrier entry"))
        })?;
        let x = RelGSet::new(graph.clone(), &body.carriers, &body.relations)
            .map_err(|e| FileError::content(path, format!("sort {sort}: {e}")))?;
        sorts.insert(sort.clone(), x);
    }

    let mut preds = BTreeMap::new();
    for name in sig.pred_names() {
        let args = sig.pred(name).expect("listed").to_vec();
        let factors: Vec<RelGSet> = args.iter().map(|s| sorts[s].clone()).collect();
        let product = product_over(graph.clone(), &factors)
            .map_err(|e| FileError::content(path, e.to_string()))?;
        let empty = BTreeMap::new();
        let rows = doc.preds.get(name).unwrap_or(&empty);
        for v in rows.keys() {
            if graph.vertex_index(v).is_none() {
                return Err(FileError::content(
                    path,
                    format!("predicate {name}: unknown vertex {v}"),
                ));
            }
        }
        let mut parts = Vec::new();
        for v in 0..graph.vertex_count() {
            let mut bits = BitSet::new(product.object.carrier(v).len());
            if let Some(tuples) = rows.get(graph.vertex_name(v)) {
                for t in tuples {
                    let what = format!("predicate {name}");
                    bits.insert(tuple_index(path, &product, &factors, v, t, &what)?);
                }
            }
            parts.push(bits);
        }
        preds.insert(name.to_string(), MSubobject::new(product.object, parts));
    }

    let mut funcs = BTreeMap::new();
    for name in sig.func_names() {
        let (args, result) = sig.func(name).expect("listed");
        let factors: Vec<RelGSet> = args.iter().map(|s| sorts[s].clone()).collect();
        let product = product_over(graph.clone(), &factors)
            .map_err(|e| FileError::content(path, e.to_string()))?;
        let cod = sorts[result].clone();
        let rows = doc.funcs.get(name).ok_or_else(|| {
            FileError::content(path, format!("function {name} has no table"))
        })?;
        for v in rows.keys() {
            if graph.vertex_index(v).is_none() {
                return Err(FileError::content(
                    path,
                    format!("function {name}: unknown vertex {v}"),
                ));
            }
        }
        let mut map = Vec::new();
        for v in 0..graph.vertex_count() {
            let dom_len = product.object.carrier(v).len();
            let mut row: Vec<Option<usize>> = vec![None; dom_len];
            if let Some(table) = rows.get(graph.vertex_name(v)) {
                for entry in table {
                    let what = format!("function {name}");
                    let Some((value, tuple)) = entry.split_last() else {
                        return Err(FileError::content(
                            path,
                            format!("function {name}: empty table row"),
                        ));
                    };
                    let at = tuple_index(path, &product, &factors, v, tuple, &what)?;
                    let val = elem_index(path, &cod, v, value, &what)?;
                    if row[at].is_some() {
                        return Err(FileError::content(
                            path,
                            format!("function {name}: duplicate row for {tuple:?}"),
                        ));
                    }
                    row[at] = Some(val);
                }
            }
            let total: Option<Vec<usize>> = row.into_iter().collect();
            let Some(total) = total else {
                return Err(FileError::content(
                    path,
                    format!(
                        "function {name}: table is not total at vertex {}",
                        graph.vertex_name(v)
                    ),
                ));
            };
            map.push(total);
        }
        let mor = Morphism::from_index_map(product.object, cod, map)
            .map_err(|e| FileError::content(path, format!("function {name}: {e}")))?;
        funcs.insert(name.to_string(), mor);
    }

    Interpretation::new(sig, graph, sorts, preds, funcs)
        .map_err(|e| FileError::content(path, e.to_string()))
}

// ---------------------------------------------------------------------
// Probe sets.

/// The signature the probes speak, the probe sequents themselves, and
/// the function symbols declared as quotients for the respect check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbesFile {
    pub version: u32,
    pub signature: SignatureFile,
    pub probes: Vec<String>,
    #[serde(default)]
    pub quotients: Vec<String>,
}

pub struct ProbeSet {
    pub sig: Signature,
    pub probes: Vec<Probe>,
    pub quotients: Vec<String>,
}

pub fn load_probes(path: &Path) -> Result<ProbeSet, FileError> {
    let doc: ProbesFile = read_json(path)?;
    check_version(path, doc.version)?;
    let sig = build_signature(path, &doc.signature)?;
    let mut probes = Vec::new();
    for (i, src) in doc.probes.iter().enumerate() {
        let (ctx, formula) = parse_sequent(&sig, src).map_err(|e| {
            FileError::content(path, format!("probe {}: col {}: {}", i + 1, e.col, e.message))
        })?;
        probes.push(Probe { ctx, formula });
    }
    Ok(ProbeSet {
        sig,
        probes,
        quotients: doc.quotients,
    })
}

// ---------------------------------------------------------------------
// Classical models.

/// A classical first-order structure over a de-modalized signature:
/// carriers per sort, function tables as rows `[arg1, .., argN, value]`,
/// predicate extensions as tuples.  Box symbols appear as ordinary
/// predicates under their `B1, B2, ..` names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassicalModelFile {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub funcs: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub preds: BTreeMap<String, Vec<Vec<String>>>,
}

pub fn load_classical(path: &Path, dem: &Demodalized) -> Result<ClassicalModel, FileError> {
    let doc: ClassicalModelFile = read_json(path)?;
    check_version(path, doc.version)?;
    let mut funcs = BTreeMap::new();
    for (name, rows) in &doc.funcs {
        let mut table = BTreeMap::new();
        for entry in rows {
            let Some((value, args)) = entry.split_last() else {
                return Err(FileError::content(
                    path,
                    format!("function {name}: empty table row"),
                ));
            };
            if table.insert(args.to_vec(), value.clone()).is_some() {
                return Err(FileError::content(
                    path,
                    format!("function {name}: duplicate row for {args:?}"),
                ));
            }
        }
        funcs.insert(name.clone(), table);
    }
    let preds: BTreeMap<String, BTreeSet<Vec<String>>> = doc
        .preds
        .iter()
        .map(|(n, rows)| (n.clone(), rows.iter().cloned().collect()))
        .collect();
    ClassicalModel::new(doc.name, dem.clone(), doc.carriers, funcs, preds)
        .map_err(|e| FileError::content(path, e.to_string()))
}

// ---------------------------------------------------------------------
// Pair families.

/// Sort-indexed pairs of element names.  Used for counterpart seeds
/// (only `pairs` read), for evaluation edges (`name`, `left`, `right`
/// select the endpoints), and for equivalence relations on one object
/// (keys are then vertex names).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairsFile {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub left: String,
    #[serde(default)]
    pub right: String,
    #[serde(default)]
    pub pairs: BTreeMap<String, Vec<(String, String)>>,
}

pub fn load_pairs(path: &Path) -> Result<PairsFile, FileError> {
    let doc: PairsFile = read_json(path)?;
    check_version(path, doc.version)?;
    Ok(doc)
}

pub fn pair_sets(doc: &PairsFile) -> BTreeMap<String, BTreeSet<(String, String)>> {
    doc.pairs
        .iter()
        .map(|(s, ps)| (s.clone(), ps.iter().cloned().collect()))
        .collect()
}

/// Reads a pairs document as a relation subobject of `x` squared,
/// resolving element names per vertex.
pub fn load_relation(path: &Path, x: &RelGSet) -> Result<(Product, MSubobject), FileError> {
    let doc = load_pairs(path)?;
    let square = product_over(x.graph().clone(), &[x.clone(), x.clone()])
        .map_err(|e| FileError::content(path, e.to_string()))?;
    let graph = x.graph().clone();
    for v in doc.pairs.keys() {
        if graph.vertex_index(v).is_none() {
            return Err(FileError::content(path, format!("unknown vertex {v}")));
        }
    }
    let mut parts = Vec::new();
    for v in 0..graph.vertex_count() {
        let mut bits = BitSet::new(square.object.carrier(v).len());
        if let Some(pairs) = doc.pairs.get(graph.vertex_name(v)) {
            for (a, b) in pairs {
                let ia = elem_index(path, x, v, a, "relation")?;
                let ib = elem_index(path, x, v, b, "relation")?;
                bits.insert(square.tuple_to_index(v, &[ia, ib]));
            }
        }
        parts.push(bits);
    }
    let sub = MSubobject::new(square.object.clone(), parts);
    Ok((square, sub))
}

// ---------------------------------------------------------------------
// Theory scripts.

/// Line-oriented theory format.  `#` starts a comment; blank lines are
/// skipped.  Declarations come first, axioms after:
///
/// ```text
/// theory NAME
/// sort U
/// pred P : U
/// pred R :
/// func e : U -> W
/// func k0 : -> W
/// axiom ax_name : ctx x:U |- P(x)
/// ```
pub fn load_theory(path: &Path) -> Result<Theory, FileError> {
    let text = read_text(path)?;
    let mut name: Option<String> = None;
    let mut sorts: Vec<String> = Vec::new();
    let mut preds: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut funcs: Vec<(usize, String, Vec<String>, String)> = Vec::new();
    let mut axiom_lines: Vec<(usize, String, String)> = Vec::new();

    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "theory" => {
                if name.replace(rest.to_string()).is_some() {
                    return Err(FileError::line(path, no, "second theory line"));
                }
                if rest.is_empty() {
                    return Err(FileError::line(path, no, "theory line needs a name"));
                }
            }
            "sort" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(FileError::line(path, no, "expected: sort NAME"));
                }
                if sorts.contains(&rest.to_string()) {
                    return Err(FileError::line(path, no, format!("duplicate sort {rest}")));
                }
                sorts.push(rest.to_string());
            }
            "pred" => {
                let Some((pname, args)) = rest.split_once(':') else {
                    return Err(FileError::line(path, no, "expected: pred NAME : SORTS"));
                };
                let args: Vec<String> =
                    args.split_whitespace().map(String::from).collect();
                preds.push((no, pname.trim().to_string(), args));
            }
            "func" => {
                let Some((fname, sig_part)) = rest.split_once(':') else {
                    return Err(FileError::line(
                        path,
                        no,
                        "expected: func NAME : SORTS -> SORT",
                    ));
                };
                let Some((args, result)) = sig_part.split_once("->") else {
                    return Err(FileError::line(
                        path,
                        no,
                        "expected: func NAME : SORTS -> SORT",
                    ));
                };
                let args: Vec<String> =
                    args.split_whitespace().map(String::from).collect();
                let result = result.trim();
                if result.is_empty() || result.contains(char::is_whitespace) {
                    return Err(FileError::line(path, no, "function needs one result sort"));
                }
                funcs.push((no, fname.trim().to_string(), args, result.to_string()));
            }
            "axiom" => {
                let Some((aname, seq)) = rest.split_once(':') else {
                    return Err(FileError::line(path, no, "expected: axiom NAME : SEQUENT"));
                };
                axiom_lines.push((no, aname.trim().to_string(), seq.trim().to_string()));
            }
            other => {
                return Err(FileError::line(path, no, format!("unknown directive {other}")));
            }
        }
    }

    let mut sig = Signature::new(sorts, Vec::new(), Vec::new())
        .map_err(|e| FileError::content(path, e.to_string()))?;
    for (no, pname, args) in preds {
        sig.add_pred(pname, args)
            .map_err(|e| FileError::line(path, no, e.to_string()))?;
    }
    for (no, fname, args, result) in funcs {
        sig.add_func(fname, args, result)
            .map_err(|e| FileError::line(path, no, e.to_string()))?;
    }

    let mut axioms = Vec::new();
    for (no, aname, seq) in axiom_lines {
        if axioms.iter().any(|(n, _)| *n == aname) {
            return Err(FileError::line(path, no, format!("duplicate axiom {aname}")));
        }
        let (ctx, formula) =
            parse_sequent(&sig, &seq).map_err(|e| FileError::embedded(path, no, e))?;
        axioms.push((aname, Sequent { ctx, formula }));
    }

    let name = name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "theory".to_string())
    });
    Ok(Theory { name, sig, axioms })
}

// ---------------------------------------------------------------------
// Proof scripts.

/// Splits at top-level occurrences of `sep`, where parentheses and
/// braces guard nesting.  Embedded sequent text never contains either
/// separator, so one depth counter suffices.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Argument list of one justification: `name` or `name(a; b; c)`.
fn just_parts<'a>(
    path: &Path,
    no: usize,
    text: &'a str,
) -> Result<(&'a str, Vec<&'a str>), FileError> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return Ok((text, Vec::new()));
    };
    if !text.ends_with(')') {
        return Err(FileError::line(path, no, "justification arguments do not close"));
    }
    let name = text[..open].trim();
    let inner = &text[open + 1..text.len() - 1];
    Ok((name, split_top(inner, ';').into_iter().map(str::trim).collect()))
}

fn premise_index(path: &Path, no: usize, s: &str) -> Result<usize, FileError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| FileError::line(path, no, format!("premise index {s:?} is not a number")))
}

fn arity_error(path: &Path, no: usize, rule: &str, want: &str) -> FileError {
    FileError::line(path, no, format!("{rule} expects arguments ({want})"))
}

/// Line-oriented proof format.  `#` starts a comment; an optional
/// `proof NAME` line may come first; every other line is
///
/// ```text
/// N. SEQUENT ; RULE(ARGS)
/// ```
///
/// with `N` the 1-based position.  Rule argument shapes:
/// `Taut`, `BoxDis`, `Refl` (none); `ForallEx(term; var)`;
/// `Repl(var; t1; t2; body)`; `Cont(bindings; body; t1, t2, ..)`;
/// `TheoryAxiom(name)`; `MP(i, j)`; `Nec(i)`; `ForallIn(i; var)`;
/// `Inst(i; x := t, y := u, ..)`.  Terms and bodies are read over the
/// line's own context (`Repl` bodies over it extended by `var`, `Cont`
/// bodies over the given bindings).
pub fn load_proof(path: &Path, sig: &Signature) -> Result<Derivation, FileError> {
    let text = read_text(path)?;
    let mut name: Option<String> = None;
    let mut lines: Vec<Line> = Vec::new();

    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("proof") {
            if rest.starts_with(char::is_whitespace) {
                let rest = rest.trim();
                if name.replace(rest.to_string()).is_some() || !lines.is_empty() {
                    return Err(FileError::line(path, no, "misplaced proof line"));
                }
                continue;
            }
        }
        let Some((num, rest)) = line.split_once('.') else {
            return Err(FileError::line(path, no, "expected: N. SEQUENT ; RULE"));
        };
        let Ok(num) = num.trim().parse::<usize>() else {
            return Err(FileError::line(path, no, format!("bad line number {num:?}")));
        };
        if num != lines.len() + 1 {
            return Err(FileError::line(
                path,
                no,
                format!("line numbered {num} is the {}th step", lines.len() + 1),
            ));
        }
        let Some((seq_src, just_src)) = rest.split_once(';') else {
            return Err(FileError::line(path, no, "missing ; RULE after the sequent"));
        };
        let (ctx, formula) =
            parse_sequent(sig, seq_src.trim()).map_err(|e| FileError::embedded(path, no, e))?;

        let (rule, args) = just_parts(path, no, just_src)?;
        let parse_t = |src: &str| {
            parse_term(sig, &ctx, src.trim()).map_err(|e| FileError::embedded(path, no, e))
        };
        let just = match (rule, args.as_slice()) {
            ("Taut", []) => Justification::Taut,
            ("BoxDis", []) => Justification::BoxDis,
            ("Refl", []) => Justification::Refl,
            ("ForallEx", [term, var]) => Justification::ForallEx {
                term: parse_t(term)?,
                var: var.to_string(),
            },
            ("Repl", [var, t1, t2, body]) => {
                let t1 = parse_t(t1)?;
                let t2 = parse_t(t2)?;
                let sort = term_sort(sig, &ctx, &t1)
                    .map_err(|e| FileError::line(path, no, e.to_string()))?;
                let inner = ctx.extended(var, &sort);
                let body = parse_formula(sig, &inner, body.trim())
                    .map_err(|e| FileError::embedded(path, no, e))?;
                Justification::Repl {
                    var: var.to_string(),
                    t1,
                    t2,
                    body,
                }
            }
            ("Cont", [bindings, body, terms]) => {
                let bctx = parse_context(sig, bindings.trim())
                    .map_err(|e| FileError::embedded(path, no, e))?;
                let body = parse_formula(sig, &bctx, body.trim())
                    .map_err(|e| FileError::embedded(path, no, e))?;
                let terms = split_top(terms, ',')
                    .into_iter()
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(parse_t)
                    .collect::<Result<Vec<_>, _>>()?;
                Justification::Cont {
                    ctx: bctx,
                    body,
                    terms,
                }
            }
            ("TheoryAxiom", [axiom]) => Justification::TheoryAxiom(axiom.to_string()),
            ("MP", [both]) => {
                let parts = split_top(both, ',');
                let [i, j] = parts.as_slice() else {
                    return Err(arity_error(path, no, "MP", "i, j"));
                };
                Justification::Mp(premise_index(path, no, i)?, premise_index(path, no, j)?)
            }
            ("Nec", [i]) => Justification::Nec(premise_index(path, no, i)?),
            ("ForallIn", [i, var]) => {
                Justification::ForallIn(premise_index(path, no, i)?, var.to_string())
            }
            ("Inst", [i, assigns]) => {
                let i = premise_index(path, no, i)?;
                let mut map = Vec::new();
                for a in split_top(assigns, ',') {
                    let a = a.trim();
                    if a.is_empty() {
                        continue;
                    }
                    let Some((var, term)) = a.split_once(":=") else {
                        return Err(FileError::line(
                            path,
                            no,
                            format!("Inst assignment {a:?} is not VAR := TERM"),
                        ));
                    };
                    map.push((var.trim().to_string(), parse_t(term)?));
                }
                Justification::Inst(i, map)
            }
            ("Taut" | "BoxDis" | "Refl", _) => {
                return Err(FileError::line(path, no, format!("{rule} takes no arguments")));
            }
            ("ForallEx", _) => return Err(arity_error(path, no, rule, "term; var")),
            ("Repl", _) => return Err(arity_error(path, no, rule, "var; t1; t2; body")),
            ("Cont", _) => return Err(arity_error(path, no, rule, "bindings; body; terms")),
            ("TheoryAxiom", _) => return Err(arity_error(path, no, rule, "name")),
            ("MP", _) => return Err(arity_error(path, no, rule, "i, j")),
            ("Nec", _) => return Err(arity_error(path, no, rule, "i")),
            ("ForallIn", _) => return Err(arity_error(path, no, rule, "i; var")),
            ("Inst", _) => return Err(arity_error(path, no, rule, "i; assignments")),
            (other, _) => {
                return Err(FileError::line(path, no, format!("unknown rule {other}")));
            }
        };
        lines.push(Line {
            sequent: Sequent { ctx, formula },
            just,
        });
    }

    let name = name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "proof".to_string())
    });
    Ok(Derivation {
        theory: name,
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use relg_core::fixtures;
    use relg_core::proof::check_derivation;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn model_files_round_trip_the_fixtures() {
        let dir = tempfile::tempdir().unwrap();
        for (name, x) in [
            ("f1", fixtures::f1_x1()),
            ("f1f", fixtures::f1_x1f()),
            ("f1e", fixtures::f1_x1e()),
            ("f2", fixtures::f2_y()),
            ("f3", fixtures::f3_w()),
        ] {
            let doc = model_file_of(&x);
            let text = serde_json::to_string_pretty(&doc).unwrap();
            let p = write(&dir, &format!("{name}.json"), &text);
            assert_eq!(load_model(&p).unwrap(), x, "{name}");
        }
    }

    #[test]
    fn model_loader_rejects_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "v2.json",
            r#"{"version":2,"graph":{"vertices":["a"],"edges":[]}}"#,
        );
        assert!(matches!(load_model(&p), Err(FileError::Version { found: 2, .. })));

        let p = write(
            &dir,
            "loose.json",
            r#"{"version":1,"graph":{"vertices":["a"],"edges":[]},
                "carriers":{"b":["0"]}}"#,
        );
        assert!(matches!(load_model(&p), Err(FileError::Content { .. })));

        let p = write(&dir, "junk.json", "не json");
        assert!(matches!(load_model(&p), Err(FileError::Json { .. })));
    }

    #[test]
    fn theory_script_declares_and_parses_axioms() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "t.thy",
            "# a comment\n\
             theory T\n\
             sort U\n\
             sort W\n\
             pred P : U\n\
             pred R :\n\
             func e : U -> W\n\
             func k0 : -> W\n\
             axiom p_or_not : ctx x:U |- P(x) | ~P(x)\n",
        );
        let t = load_theory(&p).unwrap();
        assert_eq!(t.name, "T");
        assert_eq!(t.sig.sorts(), ["U", "W"]);
        assert_eq!(t.sig.pred("R").unwrap().len(), 0);
        assert_eq!(t.sig.func("k0").unwrap(), (&[][..], "W"));
        assert_eq!(t.axioms.len(), 1);
        assert!(t.axiom("p_or_not").is_some());
    }

    #[test]
    fn theory_script_line_errors_cite_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.thy", "theory T\nsort U\nwibble X\n");
        let Err(FileError::Line { line, .. }) = load_theory(&p) else {
            panic!("expected a line error");
        };
        assert_eq!(line, 3);

        let p = write(
            &dir,
            "badax.thy",
            "theory T\nsort U\npred P : U\naxiom a : ctx x:U |- Q(x)\n",
        );
        let Err(FileError::Line { line, .. }) = load_theory(&p) else {
            panic!("expected a line error");
        };
        assert_eq!(line, 4);
    }

    fn proof_sig() -> Signature {
        load_theory_text(
            "theory T\nsort U\nsort W\npred P : U\npred O : W\npred R :\n\
             func e : U -> W\nfunc n : U -> U\nfunc k0 : -> W\n",
        )
        .sig
    }

    fn load_theory_text(text: &str) -> Theory {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "t.thy", text);
        load_theory(&p).unwrap()
    }

    #[test]
    fn proof_script_parses_every_rule_shape() {
        let sig = proof_sig();
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "p.prf",
            "proof demo\n\
             1. ctx x:U |- P(x) -> P(x) ; Taut\n\
             2. ctx x:U |- box {x:U | P(x) -> P(x)}(x) ; Nec(1)\n\
             3. ctx x:U |- (forall y:U. P(y)) -> P(n(x)) ; ForallEx(n(x); y)\n\
             4. ctx x:U |- x = x ; Refl\n\
             5. ctx x:U |- x = n(x) -> (P(x) -> P(n(x))) ; Repl(y; x; n(x); P(y))\n\
             6. ctx z:U |- box {x:W | O(x)}(e(z)) -> box {z:U | O(e(z))}(z) ; Cont(x:W; O(x); e(z))\n\
             7. ctx z:U |- P(n(z)) -> P(n(z)) ; Inst(1; x := n(z))\n\
             8. ctx x:U |- P(x) ; TheoryAxiom(missing)\n\
             9. ctx x:U |- P(x) -> P(x) ; MP(1, 2)\n\
             10. ctx |- R() -> forall y:U. (P(y) -> P(y)) ; ForallIn(1; y)\n",
        );
        let d = load_proof(&p, &sig).unwrap();
        assert_eq!(d.theory, "demo");
        assert_eq!(d.lines.len(), 10);
        assert!(matches!(d.lines[0].just, Justification::Taut));
        assert!(matches!(d.lines[1].just, Justification::Nec(1)));
        assert!(matches!(d.lines[4].just, Justification::Repl { .. }));
        assert!(matches!(
            d.lines[5].just,
            Justification::Cont { ref terms, .. } if terms.len() == 1
        ));
        assert!(matches!(d.lines[8].just, Justification::Mp(1, 2)));
    }

    #[test]
    fn proof_script_enforces_line_numbering() {
        let sig = proof_sig();
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "p.prf", "2. ctx x:U |- P(x) -> P(x) ; Taut\n");
        let Err(FileError::Line { line: 1, .. }) = load_proof(&p, &sig) else {
            panic!("expected a numbering error");
        };
    }

    #[test]
    fn parsed_two_line_necessity_proof_checks_out() {
        let theory = load_theory_text(
            "theory emp\nsort U\nsort W\npred P : U\npred O : W\npred R :\n\
             func e : U -> W\nfunc n : U -> U\nfunc k0 : -> W\n",
        );
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "nec.prf",
            "1. ctx x:U |- P(x) -> P(x) ; Taut\n\
             2. ctx x:U |- box {x:U | P(x) -> P(x)}(x) ; Nec(1)\n",
        );
        let d = load_proof(&p, &theory.sig).unwrap();
        let report = check_derivation(&theory, &d);
        assert!(report.accepted, "{:?}", report.first_failure());
    }

    #[test]
    fn relation_and_pairs_files_resolve_names() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "r.json",
            r#"{"version":1,"pairs":{"a":[["0","0"],["0","1"],["1","0"],["1","1"]]}}"#,
        );
        let x = fixtures::f1_x1();
        let (square, sub) = load_relation(&p, &x).unwrap();
        assert_eq!(sub.part(0).iter().count(), 4);
        assert_eq!(square.object.carrier(0).len(), 4);

        let p = write(&dir, "bad.json", r#"{"version":1,"pairs":{"a":[["0","9"]]}}"#);
        assert!(matches!(load_relation(&p, &x), Err(FileError::Content { .. })));
    }
}
