//! Objects, maps, limits, images, and subobject structure.
//!
//! A [`Graph`] is a finite set of named vertices and named directed edges.
//! A [`RelGSet`] over it carries a finite ordered carrier per vertex and a
//! binary relation per edge (as sorted index pairs between the source and
//! target carriers).  A [`Morphism`] is a vertex-indexed family of carrier
//! maps that sends related pairs to related pairs.
//!
//! Subobjects in the distinguished class M are exactly the carrier-subset
//! families with the restricted relations, so an [`MSubobject`] stores only
//! its parts (one bit set per vertex); the induced relations are implicit
//! and can be reified with [`sub_object`].  The possibility operator
//! [`dia`] reads the edge relations: an element is possible when some edge
//! relates it to a member of the subobject at the edge's target.
//!
//! Everything here is exact and deterministic.  Carrier order is the
//! declared order, products list tuples lexicographically by component,
//! and enumerations walk bit masks in ascending order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitSet;

/// Default ceiling on the total carrier size for exhaustive subobject
/// enumeration (2^14 subsets).
pub const DEFAULT_ENUM_BOUND: usize = 14;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum GSetError {
    DuplicateName(String),
    UnknownVertex(String),
    UnknownEdge(String),
    UnknownElement { vertex: String, element: String },
    PairOutOfCarrier { edge: String, pair: (String, String) },
    GraphMismatch,
    NotRelationPreserving { edge: String, pair: (String, String) },
    CompositionMismatch,
    NotParallel,
    AmbientMismatch,
    NotTotal { vertex: String },
    TooLarge { total: usize, bound: usize },
}

impl fmt::Display for GSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSetError::DuplicateName(n) => write!(f, "duplicate name {n:?}"),
            GSetError::UnknownVertex(v) => write!(f, "unknown vertex {v:?}"),
            GSetError::UnknownEdge(e) => write!(f, "unknown edge {e:?}"),
            GSetError::UnknownElement { vertex, element } => {
                write!(f, "unknown element {element:?} at vertex {vertex:?}")
            }
            GSetError::PairOutOfCarrier { edge, pair } => write!(
                f,
                "relation pair ({}, {}) on edge {edge:?} falls outside the carriers",
                pair.0, pair.1
            ),
            GSetError::GraphMismatch => write!(f, "objects live over different graphs"),
            GSetError::NotRelationPreserving { edge, pair } => write!(
                f,
                "map does not preserve the relation on edge {edge:?} at pair ({}, {})",
                pair.0, pair.1
            ),
            GSetError::CompositionMismatch => {
                write!(f, "codomain of the first map differs from domain of the second")
            }
            GSetError::NotParallel => write!(f, "maps are not parallel"),
            GSetError::AmbientMismatch => write!(f, "subobjects live in different ambients"),
            GSetError::NotTotal { vertex } => {
                write!(f, "map is not total on the carrier at vertex {vertex:?}")
            }
            GSetError::TooLarge { total, bound } => write!(
                f,
                "total carrier size {total} exceeds the enumeration bound {bound}"
            ),
        }
    }
}

impl core::error::Error for GSetError {}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite directed multigraph with named vertices and edges.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, src, dst)` triples.
    pub fn new<S: Into<String>>(
        vertices: Vec<S>,
        edges: Vec<(S, S, S)>,
    ) -> Result<Arc<Graph>, GSetError> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(GSetError::DuplicateName(v.clone()));
            }
        }
        let mut out = Vec::new();
        for (name, src, dst) in edges {
            let name: String = name.into();
            let src: String = src.into();
            let dst: String = dst.into();
            if out.iter().any(|e: &Edge| e.name == name) {
                return Err(GSetError::DuplicateName(name));
            }
            let src = vertices
                .iter()
                .position(|v| *v == src)
                .ok_or(GSetError::UnknownVertex(src))?;
            let dst = vertices
                .iter()
                .position(|v| *v == dst)
                .ok_or(GSetError::UnknownVertex(dst))?;
            out.push(Edge { name, src, dst });
        }
        Ok(Arc::new(Graph {
            vertices,
            edges: out,
        }))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }
}

/// A finite relational G-set: one carrier per vertex, one relation per edge.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RelGSet {
    graph: Arc<Graph>,
    carriers: Vec<Vec<String>>,
    relations: Vec<Vec<(usize, usize)>>,
}

impl RelGSet {
    /// Builds an object from name-level data.  Vertices or edges missing
    /// from the maps get empty carriers or relations; unknown keys and
    /// out-of-carrier pairs are rejected.
    pub fn new(
        graph: Arc<Graph>,
        carriers: &BTreeMap<String, Vec<String>>,
        relations: &BTreeMap<String, Vec<(String, String)>>,
    ) -> Result<RelGSet, GSetError> {
        for v in carriers.keys() {
            if graph.vertex_index(v).is_none() {
                return Err(GSetError::UnknownVertex(v.clone()));
            }
        }
        for e in relations.keys() {
            if graph.edge_index(e).is_none() {
                return Err(GSetError::UnknownEdge(e.clone()));
            }
        }
        let carrier_vec: Vec<Vec<String>> = (0..graph.vertex_count())
            .map(|v| carriers.get(graph.vertex_name(v)).cloned().unwrap_or_default())
            .collect();
        for (v, c) in carrier_vec.iter().enumerate() {
            for (i, name) in c.iter().enumerate() {
                if c[..i].contains(name) {
                    return Err(GSetError::DuplicateName(format!(
                        "{} at vertex {}",
                        name,
                        graph.vertex_name(v)
                    )));
                }
            }
        }
        let mut relation_vec: Vec<Vec<(usize, usize)>> = Vec::new();
        for e in 0..graph.edge_count() {
            let edge = graph.edge(e);
            let mut pairs = Vec::new();
            for (a, b) in relations.get(&edge.name).map_or(&[][..], |p| &p[..]) {
                let ai = carrier_vec[edge.src].iter().position(|x| x == a);
                let bi = carrier_vec[edge.dst].iter().position(|x| x == b);
                match (ai, bi) {
                    (Some(ai), Some(bi)) => pairs.push((ai, bi)),
                    _ => {
                        return Err(GSetError::PairOutOfCarrier {
                            edge: edge.name.clone(),
                            pair: (a.clone(), b.clone()),
                        })
                    }
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
            relation_vec.push(pairs);
        }
        Ok(RelGSet {
            graph,
            carriers: carrier_vec,
            relations: relation_vec,
        })
    }

    /// Builds an object from index-level data, validating bounds.
    pub fn from_parts(
        graph: Arc<Graph>,
        carriers: Vec<Vec<String>>,
        mut relations: Vec<Vec<(usize, usize)>>,
    ) -> Result<RelGSet, GSetError> {
        assert_eq!(carriers.len(), graph.vertex_count());
        assert_eq!(relations.len(), graph.edge_count());
        for (e, pairs) in relations.iter_mut().enumerate() {
            let edge = graph.edge(e);
            for (a, b) in pairs.iter() {
                if *a >= carriers[edge.src].len() || *b >= carriers[edge.dst].len() {
                    return Err(GSetError::PairOutOfCarrier {
                        edge: edge.name.clone(),
                        pair: (a.to_string(), b.to_string()),
                    });
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
        }
        Ok(RelGSet {
            graph,
            carriers,
            relations,
        })
    }

    /// The terminal object: a one-point carrier everywhere, every edge
    /// relation the full singleton pair.
    pub fn terminal(graph: Arc<Graph>) -> RelGSet {
        let carriers = vec![vec!["*".to_string()]; graph.vertex_count()];
        let relations = vec![vec![(0, 0)]; graph.edge_count()];
        RelGSet {
            graph,
            carriers,
            relations,
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn carrier(&self, v: usize) -> &[String] {
        &self.carriers[v]
    }

    pub fn relation(&self, e: usize) -> &[(usize, usize)] {
        &self.relations[e]
    }

    pub fn elem_index(&self, v: usize, name: &str) -> Option<usize> {
        self.carriers[v].iter().position(|x| x == name)
    }

    pub fn has_pair(&self, e: usize, a: usize, b: usize) -> bool {
        self.relations[e].binary_search(&(a, b)).is_ok()
    }

    /// Sum of carrier sizes over all vertices.
    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for RelGSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.graph.vertex_count() {
            if v > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{{{}}}", self.graph.vertex_name(v), self.carriers[v].join(","))?;
        }
        for e in 0..self.graph.edge_count() {
            let edge = self.graph.edge(e);
            let pairs: Vec<String> = self.relations[e]
                .iter()
                .map(|(a, b)| {
                    format!(
                        "({},{})",
                        self.carriers[edge.src][*a], self.carriers[edge.dst][*b]
                    )
                })
                .collect();
            write!(f, "; {}:{{{}}}", edge.name, pairs.join(","))?;
        }
        Ok(())
    }
}

/// A relation-preserving vertex-indexed family of carrier maps.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Morphism {
    dom: RelGSet,
    cod: RelGSet,
    map: Vec<Vec<usize>>,
}

impl Morphism {
    /// Builds a morphism from name-level component maps.
    pub fn new(
        dom: RelGSet,
        cod: RelGSet,
        components: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Morphism, GSetError> {
        if dom.graph != cod.graph {
            return Err(GSetError::GraphMismatch);
        }
        for v in components.keys() {
            if dom.graph.vertex_index(v).is_none() {
                return Err(GSetError::UnknownVertex(v.clone()));
            }
        }
        let mut map = Vec::new();
        for v in 0..dom.graph.vertex_count() {
            let vname = dom.graph.vertex_name(v);
            let empty = BTreeMap::new();
            let comp = components.get(vname).unwrap_or(&empty);
            let mut row = Vec::new();
            for x in dom.carrier(v) {
                let y = comp.get(x).ok_or_else(|| GSetError::NotTotal {
                    vertex: vname.to_string(),
                })?;
                let yi = cod.elem_index(v, y).ok_or_else(|| GSetError::UnknownElement {
                    vertex: vname.to_string(),
                    element: y.clone(),
                })?;
                row.push(yi);
            }
            for x in comp.keys() {
                if dom.elem_index(v, x).is_none() {
                    return Err(GSetError::UnknownElement {
                        vertex: vname.to_string(),
                        element: x.clone(),
                    });
                }
            }
            map.push(row);
        }
        Morphism::from_index_map(dom, cod, map)
    }

    /// Builds a morphism from index-level component maps, checking totality
    /// and relation preservation.
    pub fn from_index_map(
        dom: RelGSet,
        cod: RelGSet,
        map: Vec<Vec<usize>>,
    ) -> Result<Morphism, GSetError> {
        if dom.graph != cod.graph {
            return Err(GSetError::GraphMismatch);
        }
        assert_eq!(map.len(), dom.graph.vertex_count());
        for v in 0..map.len() {
            if map[v].len() != dom.carrier(v).len() {
                return Err(GSetError::NotTotal {
                    vertex: dom.graph.vertex_name(v).to_string(),
                });
            }
            for y in &map[v] {
                if *y >= cod.carrier(v).len() {
                    return Err(GSetError::UnknownElement {
                        vertex: dom.graph.vertex_name(v).to_string(),
                        element: y.to_string(),
                    });
                }
            }
        }
        for e in 0..dom.graph.edge_count() {
            let edge = dom.graph.edge(e);
            for (a, b) in dom.relation(e) {
                let fa = map[edge.src][*a];
                let fb = map[edge.dst][*b];
                if !cod.has_pair(e, fa, fb) {
                    return Err(GSetError::NotRelationPreserving {
                        edge: edge.name.clone(),
                        pair: (
                            dom.carrier(edge.src)[*a].clone(),
                            dom.carrier(edge.dst)[*b].clone(),
                        ),
                    });
                }
            }
        }
        Ok(Morphism { dom, cod, map })
    }

    pub fn identity(x: &RelGSet) -> Morphism {
        let map = x.carriers.iter().map(|c| (0..c.len()).collect()).collect();
        Morphism {
            dom: x.clone(),
            cod: x.clone(),
            map,
        }
    }

    pub fn dom(&self) -> &RelGSet {
        &self.dom
    }

    pub fn cod(&self) -> &RelGSet {
        &self.cod
    }

    pub fn apply(&self, v: usize, idx: usize) -> usize {
        self.map[v][idx]
    }

    pub fn index_map(&self) -> &[Vec<usize>] {
        &self.map
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in 0..self.dom.graph.vertex_count() {
            for (i, x) in self.dom.carrier(v).iter().enumerate() {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(
                    f,
                    "{}.{}->{}",
                    self.dom.graph.vertex_name(v),
                    x,
                    self.cod.carrier(v)[self.map[v][i]]
                )?;
            }
        }
        if first {
            write!(f, "(empty)")?;
        }
        Ok(())
    }
}

/// `compose(f, g)` is `f` followed by `g`; requires `cod(f) = dom(g)`.
pub fn compose(f: &Morphism, g: &Morphism) -> Result<Morphism, GSetError> {
    if f.cod != g.dom {
        return Err(GSetError::CompositionMismatch);
    }
    let map = f
        .map
        .iter()
        .enumerate()
        .map(|(v, row)| row.iter().map(|i| g.map[v][*i]).collect())
        .collect();
    Ok(Morphism {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        map,
    })
}

/// Structural classification flags for a morphism.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Flags {
    /// Pointwise injective.
    pub mono: bool,
    /// Pointwise surjective; these are exactly the left class of the
    /// image factorization.
    pub epi_e: bool,
    /// Equalizer of its cokernel pair (computed via the explicit pushout).
    pub regular_mono: bool,
    /// Mono whose domain relations are the full preimages of the codomain
    /// relations; these are the distinguished subobject inclusions.
    pub in_m: bool,
    /// Has a two-sided inverse morphism.
    pub iso: bool,
}

/// Computes all classification flags for a morphism.
pub fn classify(f: &Morphism) -> Flags {
    let mono = (0..f.map.len()).all(|v| {
        let mut seen = vec![false; f.cod.carrier(v).len()];
        f.map[v].iter().all(|y| !core::mem::replace(&mut seen[*y], true))
    });
    let epi_e = (0..f.map.len()).all(|v| {
        let mut seen = vec![false; f.cod.carrier(v).len()];
        for y in &f.map[v] {
            seen[*y] = true;
        }
        seen.iter().all(|s| *s)
    });
    let in_m = mono && relations_are_induced(f);
    let regular_mono = mono && cokernel_pair_equalizes(f);
    let iso = mono && epi_e && inverse(f).is_some();
    Flags {
        mono,
        epi_e,
        regular_mono,
        in_m,
        iso,
    }
}

fn relations_are_induced(f: &Morphism) -> bool {
    (0..f.dom.graph.edge_count()).all(|e| {
        let edge = f.dom.graph.edge(e);
        let mut induced: Vec<(usize, usize)> = Vec::new();
        for a in 0..f.dom.carrier(edge.src).len() {
            for b in 0..f.dom.carrier(edge.dst).len() {
                if f.cod.has_pair(e, f.map[edge.src][a], f.map[edge.dst][b]) {
                    induced.push((a, b));
                }
            }
        }
        induced == f.dom.relation(e)
    })
}

/// The two-sided inverse of `f`, when `f` is an isomorphism.
pub fn inverse(f: &Morphism) -> Option<Morphism> {
    let mut inv_map = Vec::new();
    for v in 0..f.map.len() {
        if f.dom.carrier(v).len() != f.cod.carrier(v).len() {
            return None;
        }
        let mut row = vec![usize::MAX; f.cod.carrier(v).len()];
        for (x, y) in f.map[v].iter().enumerate() {
            if row[*y] != usize::MAX {
                return None;
            }
            row[*y] = x;
        }
        inv_map.push(row);
    }
    Morphism::from_index_map(f.cod.clone(), f.dom.clone(), inv_map).ok()
}

/// Cokernel pair of `f: A -> X`: the two injections `X -> X +_A X` into the
/// pushout of `f` along itself.
pub fn cokernel_pair(f: &Morphism) -> (Morphism, Morphism) {
    let x = &f.cod;
    let graph = x.graph.clone();
    // Pushout carriers: two copies of X glued along the image of f.
    // Classes are named "x" when glued, "L:x" / "R:x" otherwise.
    let mut carriers = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for v in 0..graph.vertex_count() {
        let mut in_image = vec![false; x.carrier(v).len()];
        for a in 0..f.dom.carrier(v).len() {
            in_image[f.map[v][a]] = true;
        }
        let mut names = Vec::new();
        let mut lrow = Vec::new();
        let mut rrow = Vec::new();
        for (i, name) in x.carrier(v).iter().enumerate() {
            if in_image[i] {
                lrow.push(names.len());
                rrow.push(names.len());
                names.push(name.clone());
            } else {
                lrow.push(names.len());
                names.push(format!("L:{name}"));
                rrow.push(usize::MAX);
            }
        }
        for (i, name) in x.carrier(v).iter().enumerate() {
            if !in_image[i] {
                rrow[i] = names.len();
                names.push(format!("R:{name}"));
            }
        }
        carriers.push(names);
        left.push(lrow);
        right.push(rrow);
    }
    let mut relations = Vec::new();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        let mut pairs = Vec::new();
        for (a, b) in x.relation(e) {
            pairs.push((left[edge.src][*a], left[edge.dst][*b]));
            pairs.push((right[edge.src][*a], right[edge.dst][*b]));
        }
        pairs.sort_unstable();
        pairs.dedup();
        relations.push(pairs);
    }
    let pushout = RelGSet {
        graph,
        carriers,
        relations,
    };
    let j1 = Morphism {
        dom: x.clone(),
        cod: pushout.clone(),
        map: left,
    };
    let j2 = Morphism {
        dom: x.clone(),
        cod: pushout,
        map: right,
    };
    (j1, j2)
}

fn cokernel_pair_equalizes(f: &Morphism) -> bool {
    let (j1, j2) = cokernel_pair(f);
    let eq = equalizer(&j1, &j2).expect("cokernel pair is parallel");
    // f is the equalizer of its cokernel pair iff its carrier image is the
    // equalizer part and its domain relations match the induced ones.
    for v in 0..f.dom.graph.vertex_count() {
        let image = BitSet::from_indices(
            f.cod.carrier(v).len(),
            f.map[v].iter().copied(),
        );
        if image != eq.parts[v] {
            return false;
        }
    }
    for e in 0..f.dom.graph.edge_count() {
        let edge = f.dom.graph.edge(e);
        let mut forward: Vec<(usize, usize)> = f
            .dom
            .relation(e)
            .iter()
            .map(|(a, b)| (f.map[edge.src][*a], f.map[edge.dst][*b]))
            .collect();
        forward.sort_unstable();
        forward.dedup();
        let induced: Vec<(usize, usize)> = f
            .cod
            .relation(e)
            .iter()
            .copied()
            .filter(|(a, b)| eq.parts[edge.src].contains(*a) && eq.parts[edge.dst].contains(*b))
            .collect();
        if forward != induced {
            return false;
        }
    }
    true
}

/// A product together with its projections and per-vertex factor sizes.
#[derive(Clone, Debug)]
pub struct Product {
    pub object: RelGSet,
    pub projections: Vec<Morphism>,
    /// `sizes[v][i]` is the carrier size of factor `i` at vertex `v`.
    pub sizes: Vec<Vec<usize>>,
}

impl Product {
    /// Row-major index of a tuple at vertex `v`.
    pub fn tuple_to_index(&self, v: usize, tuple: &[usize]) -> usize {
        tuple_index(&self.sizes[v], tuple)
    }

    /// Tuple of factor indices for a product carrier index at vertex `v`.
    pub fn index_to_tuple(&self, v: usize, idx: usize) -> Vec<usize> {
        tuple_split(&self.sizes[v], idx)
    }
}

/// Row-major tuple index: the first component is most significant, so the
/// carrier lists tuples in lexicographic order.
pub fn tuple_index(sizes: &[usize], tuple: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), tuple.len());
    let mut idx = 0;
    for (t, s) in tuple.iter().zip(sizes) {
        debug_assert!(t < s);
        idx = idx * s + t;
    }
    idx
}

/// Inverse of [`tuple_index`].
pub fn tuple_split(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = idx % sizes[i];
        idx /= sizes[i];
    }
    out
}

/// Finite product of objects over a common graph.  The empty product is
/// the terminal object; a singleton product is the factor itself.
pub fn product_n(factors: &[RelGSet]) -> Result<Product, GSetError> {
    let Some(first) = factors.first() else {
        panic!("product_n needs the graph for an empty product; use product_over");
    };
    product_over(first.graph.clone(), factors)
}

/// Like [`product_n`] but usable for the empty product.
pub fn product_over(graph: Arc<Graph>, factors: &[RelGSet]) -> Result<Product, GSetError> {
    for x in factors {
        if x.graph != graph {
            return Err(GSetError::GraphMismatch);
        }
    }
    if factors.len() == 1 {
        let x = factors[0].clone();
        let sizes = (0..graph.vertex_count())
            .map(|v| vec![x.carrier(v).len()])
            .collect();
        return Ok(Product {
            projections: vec![Morphism::identity(&x)],
            object: x,
            sizes,
        });
    }
    let sizes: Vec<Vec<usize>> = (0..graph.vertex_count())
        .map(|v| factors.iter().map(|x| x.carrier(v).len()).collect())
        .collect();
    let mut carriers = Vec::new();
    for v in 0..graph.vertex_count() {
        let count: usize = sizes[v].iter().product();
        let mut names = Vec::with_capacity(count);
        for idx in 0..count {
            let tuple = tuple_split(&sizes[v], idx);
            if factors.is_empty() {
                names.push("*".to_string());
            } else {
                let parts: Vec<&str> = tuple
                    .iter()
                    .enumerate()
                    .map(|(i, t)| factors[i].carrier(v)[*t].as_str())
                    .collect();
                names.push(format!("({})", parts.join(",")));
            }
        }
        carriers.push(names);
    }
    let mut relations = Vec::new();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        let mut pairs = Vec::new();
        let src_count: usize = sizes[edge.src].iter().product();
        let dst_count: usize = sizes[edge.dst].iter().product();
        for a in 0..src_count {
            let ta = tuple_split(&sizes[edge.src], a);
            for b in 0..dst_count {
                let tb = tuple_split(&sizes[edge.dst], b);
                let related = factors
                    .iter()
                    .enumerate()
                    .all(|(i, x)| x.has_pair(e, ta[i], tb[i]));
                if related {
                    pairs.push((a, b));
                }
            }
        }
        relations.push(pairs);
    }
    let object = RelGSet {
        graph: graph.clone(),
        carriers,
        relations,
    };
    let mut projections = Vec::new();
    for (i, x) in factors.iter().enumerate() {
        let map = (0..graph.vertex_count())
            .map(|v| {
                let count: usize = sizes[v].iter().product();
                (0..count).map(|idx| tuple_split(&sizes[v], idx)[i]).collect()
            })
            .collect();
        projections.push(Morphism {
            dom: object.clone(),
            cod: x.clone(),
            map,
        });
    }
    Ok(Product {
        object,
        projections,
        sizes,
    })
}

/// The pairing `<f_1, .., f_n> : dom -> cod(f_1) x .. x cod(f_n)`.
/// All components must share the domain `dom`; an empty list gives the
/// unique map to the terminal object.
pub fn tuple_morphism(dom: &RelGSet, components: &[Morphism]) -> Result<Morphism, GSetError> {
    for f in components {
        if f.dom != *dom {
            return Err(GSetError::CompositionMismatch);
        }
    }
    let cods: Vec<RelGSet> = components.iter().map(|f| f.cod.clone()).collect();
    let prod = product_over(dom.graph.clone(), &cods)?;
    if components.len() == 1 {
        return Ok(components[0].clone());
    }
    let map = (0..dom.graph.vertex_count())
        .map(|v| {
            (0..dom.carrier(v).len())
                .map(|a| {
                    let tuple: Vec<usize> =
                        components.iter().map(|f| f.map[v][a]).collect();
                    prod.tuple_to_index(v, &tuple)
                })
                .collect()
        })
        .collect();
    Ok(Morphism {
        dom: dom.clone(),
        cod: prod.object,
        map,
    })
}

/// The product map `f_1 x .. x f_n : prod(doms) -> prod(cods)`.
pub fn product_morphism(components: &[Morphism]) -> Result<Morphism, GSetError> {
    assert!(!components.is_empty());
    let doms: Vec<RelGSet> = components.iter().map(|f| f.dom.clone()).collect();
    let cods: Vec<RelGSet> = components.iter().map(|f| f.cod.clone()).collect();
    let dprod = product_over(components[0].dom.graph.clone(), &doms)?;
    let cprod = product_over(components[0].dom.graph.clone(), &cods)?;
    let graph = components[0].dom.graph.clone();
    let map = (0..graph.vertex_count())
        .map(|v| {
            let count: usize = dprod.sizes[v].iter().product();
            (0..count)
                .map(|idx| {
                    let tuple = dprod.index_to_tuple(v, idx);
                    let image: Vec<usize> = components
                        .iter()
                        .zip(&tuple)
                        .map(|(f, t)| f.map[v][*t])
                        .collect();
                    cprod.tuple_to_index(v, &image)
                })
                .collect()
        })
        .collect();
    Ok(Morphism {
        dom: dprod.object,
        cod: cprod.object,
        map,
    })
}

/// Projection of a product onto a sublist of its factors,
/// `prod(factors) -> prod(factors[keep])`.
pub fn project_product(factors: &[RelGSet], keep: &[usize]) -> Result<Morphism, GSetError> {
    assert!(!factors.is_empty());
    let graph = factors[0].graph.clone();
    let dprod = product_over(graph.clone(), factors)?;
    let kept: Vec<RelGSet> = keep.iter().map(|i| factors[*i].clone()).collect();
    let cprod = product_over(graph.clone(), &kept)?;
    let map = (0..graph.vertex_count())
        .map(|v| {
            let count: usize = dprod.sizes[v].iter().product();
            (0..count)
                .map(|idx| {
                    let tuple = dprod.index_to_tuple(v, idx);
                    let sel: Vec<usize> = keep.iter().map(|i| tuple[*i]).collect();
                    cprod.tuple_to_index(v, &sel)
                })
                .collect()
        })
        .collect();
    Ok(Morphism {
        dom: dprod.object,
        cod: cprod.object,
        map,
    })
}

/// The unique map to the terminal object.
pub fn bang(x: &RelGSet) -> Morphism {
    let terminal = RelGSet::terminal(x.graph.clone());
    let map = x.carriers.iter().map(|c| vec![0; c.len()]).collect();
    Morphism {
        dom: x.clone(),
        cod: terminal,
        map,
    }
}

/// A distinguished subobject: a family of carrier subsets.  The relations
/// are always the restrictions of the ambient ones, so only the parts are
/// stored; [`sub_object`] reifies the induced object.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct MSubobject {
    ambient: RelGSet,
    parts: Vec<BitSet>,
}

impl MSubobject {
    pub fn new(ambient: RelGSet, parts: Vec<BitSet>) -> MSubobject {
        assert_eq!(parts.len(), ambient.graph.vertex_count());
        for (v, p) in parts.iter().enumerate() {
            assert_eq!(p.universe_len(), ambient.carrier(v).len());
        }
        MSubobject { ambient, parts }
    }

    /// Builds a subobject from element names per vertex.
    pub fn from_names(
        ambient: &RelGSet,
        parts: &BTreeMap<String, Vec<String>>,
    ) -> Result<MSubobject, GSetError> {
        for v in parts.keys() {
            if ambient.graph.vertex_index(v).is_none() {
                return Err(GSetError::UnknownVertex(v.clone()));
            }
        }
        let mut out = Vec::new();
        for v in 0..ambient.graph.vertex_count() {
            let mut bits = BitSet::new(ambient.carrier(v).len());
            let vname = ambient.graph.vertex_name(v);
            for name in parts.get(vname).map_or(&[][..], |p| &p[..]) {
                let i = ambient
                    .elem_index(v, name)
                    .ok_or_else(|| GSetError::UnknownElement {
                        vertex: vname.to_string(),
                        element: name.clone(),
                    })?;
                bits.insert(i);
            }
            out.push(bits);
        }
        Ok(MSubobject {
            ambient: ambient.clone(),
            parts: out,
        })
    }

    pub fn top(ambient: &RelGSet) -> MSubobject {
        let parts = ambient.carriers.iter().map(|c| BitSet::full(c.len())).collect();
        MSubobject {
            ambient: ambient.clone(),
            parts,
        }
    }

    pub fn bottom(ambient: &RelGSet) -> MSubobject {
        let parts = ambient.carriers.iter().map(|c| BitSet::new(c.len())).collect();
        MSubobject {
            ambient: ambient.clone(),
            parts,
        }
    }

    pub fn ambient(&self) -> &RelGSet {
        &self.ambient
    }

    pub fn parts(&self) -> &[BitSet] {
        &self.parts
    }

    pub fn part(&self, v: usize) -> &BitSet {
        &self.parts[v]
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(BitSet::is_empty)
    }

    fn check_ambient(&self, other: &MSubobject) -> Result<(), GSetError> {
        if self.ambient != other.ambient {
            return Err(GSetError::AmbientMismatch);
        }
        Ok(())
    }

    pub fn meet(&self, other: &MSubobject) -> Result<MSubobject, GSetError> {
        self.check_ambient(other)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.intersection(b))
            .collect();
        Ok(MSubobject {
            ambient: self.ambient.clone(),
            parts,
        })
    }

    pub fn join(&self, other: &MSubobject) -> Result<MSubobject, GSetError> {
        self.check_ambient(other)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.union(b))
            .collect();
        Ok(MSubobject {
            ambient: self.ambient.clone(),
            parts,
        })
    }

    pub fn neg(&self) -> MSubobject {
        let parts = self.parts.iter().map(BitSet::complement).collect();
        MSubobject {
            ambient: self.ambient.clone(),
            parts,
        }
    }

    pub fn leq(&self, other: &MSubobject) -> Result<bool, GSetError> {
        self.check_ambient(other)?;
        Ok(self
            .parts
            .iter()
            .zip(&other.parts)
            .all(|(a, b)| a.is_subset(b)))
    }

    /// Names of the member elements at vertex `v`.
    pub fn part_names(&self, v: usize) -> Vec<String> {
        self.parts[v]
            .iter()
            .map(|i| self.ambient.carrier(v)[i].clone())
            .collect()
    }
}

impl fmt::Display for MSubobject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.ambient.graph.vertex_count() {
            if v > 0 {
                write!(f, " ")?;
            }
            write!(
                f,
                "{}:{{{}}}",
                self.ambient.graph.vertex_name(v),
                self.part_names(v).join(",")
            )?;
        }
        Ok(())
    }
}

/// Reifies a subobject as an object with the restricted relations,
/// together with its inclusion.
pub fn sub_object(s: &MSubobject) -> (RelGSet, Morphism) {
    let ambient = &s.ambient;
    let graph = ambient.graph.clone();
    let mut carriers = Vec::new();
    let mut incl = Vec::new();
    for v in 0..graph.vertex_count() {
        let members: Vec<usize> = s.parts[v].iter().collect();
        carriers.push(
            members
                .iter()
                .map(|i| ambient.carrier(v)[*i].clone())
                .collect(),
        );
        incl.push(members);
    }
    let mut relations = Vec::new();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        let mut pairs = Vec::new();
        for (ai, a) in incl[edge.src].iter().enumerate() {
            for (bi, b) in incl[edge.dst].iter().enumerate() {
                if ambient.has_pair(e, *a, *b) {
                    pairs.push((ai, bi));
                }
            }
        }
        pairs.sort_unstable();
        relations.push(pairs);
    }
    let object = RelGSet {
        graph,
        carriers,
        relations,
    };
    let inclusion = Morphism {
        dom: object.clone(),
        cod: ambient.clone(),
        map: incl,
    };
    (object, inclusion)
}

/// Equalizer of a parallel pair, as a subobject of the common domain.
pub fn equalizer(f: &Morphism, g: &Morphism) -> Result<MSubobject, GSetError> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(GSetError::NotParallel);
    }
    let parts = (0..f.dom.graph.vertex_count())
        .map(|v| {
            BitSet::from_indices(
                f.dom.carrier(v).len(),
                (0..f.dom.carrier(v).len()).filter(|a| f.map[v][*a] == g.map[v][*a]),
            )
        })
        .collect();
    Ok(MSubobject {
        ambient: f.dom.clone(),
        parts,
    })
}

/// A pullback square for `f: X -> Z`, `g: Y -> Z`, computed as the
/// equalizer of `f . pi_1` and `g . pi_2` inside `X x Y`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: RelGSet,
    pub to_x: Morphism,
    pub to_y: Morphism,
    /// The pullback as a subobject of `X x Y`.
    pub sub: MSubobject,
}

pub fn pullback(f: &Morphism, g: &Morphism) -> Result<Pullback, GSetError> {
    if f.cod != g.cod {
        return Err(GSetError::CompositionMismatch);
    }
    let prod = product_n(&[f.dom.clone(), g.dom.clone()])?;
    let left = compose(&prod.projections[0], f)?;
    let right = compose(&prod.projections[1], g)?;
    let sub = equalizer(&left, &right)?;
    let (object, incl) = sub_object(&sub);
    let to_x = compose(&incl, &prod.projections[0])?;
    let to_y = compose(&incl, &prod.projections[1])?;
    Ok(Pullback {
        object,
        to_x,
        to_y,
        sub,
    })
}

/// Inverse image of a subobject of the codomain along a morphism.
pub fn pullback_sub(f: &Morphism, s: &MSubobject) -> Result<MSubobject, GSetError> {
    if s.ambient != f.cod {
        return Err(GSetError::AmbientMismatch);
    }
    let parts = (0..f.dom.graph.vertex_count())
        .map(|v| {
            BitSet::from_indices(
                f.dom.carrier(v).len(),
                (0..f.dom.carrier(v).len()).filter(|a| s.parts[v].contains(f.map[v][*a])),
            )
        })
        .collect();
    Ok(MSubobject {
        ambient: f.dom.clone(),
        parts,
    })
}

/// Direct image of a subobject of the domain along a morphism: the
/// distinguished part of the factorization of the composite inclusion.
pub fn direct_image(f: &Morphism, s: &MSubobject) -> Result<MSubobject, GSetError> {
    if s.ambient != f.dom {
        return Err(GSetError::AmbientMismatch);
    }
    let parts = (0..f.dom.graph.vertex_count())
        .map(|v| {
            BitSet::from_indices(
                f.cod.carrier(v).len(),
                s.parts[v].iter().map(|a| f.map[v][a]),
            )
        })
        .collect();
    Ok(MSubobject {
        ambient: f.cod.clone(),
        parts,
    })
}

/// Possibility: an element lies in `dia(s)` when some edge relates it to a
/// member of `s` at the edge's target vertex.
pub fn dia(s: &MSubobject) -> MSubobject {
    let x = &s.ambient;
    let graph = &x.graph;
    let mut parts: Vec<BitSet> = x
        .carriers
        .iter()
        .map(|c| BitSet::new(c.len()))
        .collect();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        for (a, b) in x.relation(e) {
            if s.parts[edge.dst].contains(*b) {
                parts[edge.src].insert(*a);
            }
        }
    }
    MSubobject {
        ambient: x.clone(),
        parts,
    }
}

/// Necessity, defined as the De Morgan dual of [`dia`].
pub fn boxm(s: &MSubobject) -> MSubobject {
    dia(&s.neg()).neg()
}

/// Image subobject of a morphism.
pub fn image(f: &Morphism) -> MSubobject {
    let parts = (0..f.cod.graph.vertex_count())
        .map(|v| {
            BitSet::from_indices(f.cod.carrier(v).len(), f.map[v].iter().copied())
        })
        .collect();
    MSubobject {
        ambient: f.cod.clone(),
        parts,
    }
}

/// Factors `f` as a pointwise surjection followed by a distinguished
/// inclusion, `f = m . e` in diagram order `compose(e, m)`.
pub fn factorize(f: &Morphism) -> (Morphism, Morphism) {
    let img = image(f);
    let (obj, incl) = sub_object(&img);
    let map = (0..f.dom.graph.vertex_count())
        .map(|v| {
            f.map[v]
                .iter()
                .map(|y| img.parts[v].iter().position(|i| i == *y).unwrap())
                .collect()
        })
        .collect();
    let e = Morphism {
        dom: f.dom.clone(),
        cod: obj,
        map,
    };
    (e, incl)
}

/// Diagonal fillers of a commuting square: given `e: A -> B`,
/// `m: S -> T`, `u: A -> S`, `v: B -> T` with
/// `compose(e, v) = compose(u, m)`, returns every `w: B -> S` with
/// `compose(e, w) = u` and `compose(w, m) = v`.
pub fn fillers(
    e: &Morphism,
    m: &Morphism,
    u: &Morphism,
    v: &Morphism,
) -> Result<Vec<Morphism>, GSetError> {
    if compose(e, v)? != compose(u, m)? {
        return Err(GSetError::CompositionMismatch);
    }
    let mut out = Vec::new();
    for w in enumerate_morphisms(&e.cod, &m.dom)? {
        if compose(e, &w)? == *u && compose(&w, m)? == *v {
            out.push(w);
        }
    }
    Ok(out)
}

/// Number of subobjects of `x` (2 to the total carrier size).
pub fn subobject_count(x: &RelGSet) -> u128 {
    1u128 << x.total_size()
}

/// Global bit mask of a subobject, inverse to [`subobject_from_mask`].
pub fn mask_of_sub(s: &MSubobject) -> u128 {
    assert!(s.ambient().total_size() <= 128);
    let mut mask = 0u128;
    let mut offset = 0;
    for p in s.parts() {
        for i in p.iter() {
            mask |= 1u128 << (offset + i);
        }
        offset += p.universe_len();
    }
    mask
}

/// The graph of a morphism as a subobject of `dom x cod`.
pub fn graph_of(h: &Morphism) -> Result<MSubobject, GSetError> {
    let pairing = tuple_morphism(h.dom(), &[Morphism::identity(h.dom()), h.clone()])?;
    Ok(image(&pairing))
}

/// The subobject of `x` selected by a global bit mask.  Bit positions run
/// through the carriers in vertex order, elements in carrier order, least
/// significant bit first.
pub fn subobject_from_mask(x: &RelGSet, mask: u128) -> MSubobject {
    let mut parts = Vec::new();
    let mut offset = 0;
    for c in &x.carriers {
        parts.push(BitSet::from_mask(c.len(), mask >> offset));
        offset += c.len();
    }
    MSubobject {
        ambient: x.clone(),
        parts,
    }
}

/// Enumerates all subobjects of `x` in ascending mask order.  Fails with
/// [`GSetError::TooLarge`] when the total carrier size exceeds `bound`.
pub fn enumerate_subobjects(
    x: &RelGSet,
    bound: usize,
) -> Result<impl Iterator<Item = MSubobject> + '_, GSetError> {
    let total = x.total_size();
    if total > bound {
        return Err(GSetError::TooLarge { total, bound });
    }
    Ok((0..1u128 << total).map(move |mask| subobject_from_mask(x, mask)))
}

/// Enumerates every morphism `x -> y` by filtering all carrier maps for
/// relation preservation, in lexicographic order of the component maps.
pub fn enumerate_morphisms(x: &RelGSet, y: &RelGSet) -> Result<Vec<Morphism>, GSetError> {
    if x.graph != y.graph {
        return Err(GSetError::GraphMismatch);
    }
    // If any carrier of y is empty while x's is not, there are no maps.
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    // Flatten (vertex, element) slots in order.
    let slots: Vec<usize> = (0..x.graph.vertex_count())
        .flat_map(|v| core::iter::repeat(v).take(x.carrier(v).len()))
        .collect();
    while let Some(partial) = stack.pop() {
        if partial.len() == slots.len() {
            let mut map = Vec::new();
            let mut it = partial.iter();
            for v in 0..x.graph.vertex_count() {
                map.push(
                    (0..x.carrier(v).len())
                        .map(|_| *it.next().unwrap())
                        .collect::<Vec<usize>>(),
                );
            }
            if let Ok(m) = Morphism::from_index_map(x.clone(), y.clone(), map) {
                out.push(m);
            }
            continue;
        }
        let v = slots[partial.len()];
        // Push in reverse so smaller images pop first; an empty target
        // carrier kills the branch.
        for img in (0..y.carrier(v).len()).rev() {
            let mut next = partial.clone();
            next.push(img);
            stack.push(next);
        }
    }
    Ok(out)
}
