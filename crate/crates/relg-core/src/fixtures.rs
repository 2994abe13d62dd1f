//! Small example objects used throughout the test-suite, docs, and the
//! bundled corpus.
//!
//! Family 1 lives over a one-vertex graph with a single loop `k` and
//! carries the two-point carrier `{0,1}` with, respectively, the single
//! pair `(0,1)`, all four pairs, and no pairs.  Family 2 lives over two
//! vertices joined by one edge; family 3 over one vertex with two loops.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::gset::{Graph, MSubobject, Morphism, RelGSet};

/// One vertex `a`, one loop `k : a -> a`.
pub fn f1_graph() -> Arc<Graph> {
    Graph::new(vec!["a"], vec![("k", "a", "a")]).unwrap()
}

fn over(
    graph: Arc<Graph>,
    carriers: &[(&str, &[&str])],
    relations: &[(&str, &[(&str, &str)])],
) -> RelGSet {
    let carriers: BTreeMap<String, Vec<String>> = carriers
        .iter()
        .map(|(v, es)| (v.to_string(), es.iter().map(|e| e.to_string()).collect()))
        .collect();
    let relations: BTreeMap<String, Vec<(String, String)>> = relations
        .iter()
        .map(|(e, ps)| {
            (
                e.to_string(),
                ps.iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect(),
            )
        })
        .collect();
    RelGSet::new(graph, &carriers, &relations).unwrap()
}

/// Carrier `{0,1}`, relation `k = {(0,1)}`.
pub fn f1_x1() -> RelGSet {
    over(f1_graph(), &[("a", &["0", "1"])], &[("k", &[("0", "1")])])
}

/// Carrier `{0,1}`, relation `k` full.
pub fn f1_x1f() -> RelGSet {
    over(
        f1_graph(),
        &[("a", &["0", "1"])],
        &[("k", &[("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")])],
    )
}

/// Carrier `{0,1}`, relation `k` empty.
pub fn f1_x1e() -> RelGSet {
    over(f1_graph(), &[("a", &["0", "1"])], &[])
}

/// The identity-carrier map `X1 -> X1F` (relations only grow).
pub fn f1_e_x1_to_x1f() -> Morphism {
    Morphism::from_index_map(f1_x1(), f1_x1f(), vec![vec![0, 1]]).unwrap()
}

/// The identity-carrier map `X1E -> X1` (relations only grow).
pub fn f1_v_x1e_to_x1() -> Morphism {
    Morphism::from_index_map(f1_x1e(), f1_x1(), vec![vec![0, 1]]).unwrap()
}

/// The three family-1 objects in a fixed order.
pub fn f1_objects() -> Vec<RelGSet> {
    vec![f1_x1(), f1_x1f(), f1_x1e()]
}

/// Two vertices `a`, `b`, one edge `k : a -> b`.
pub fn f2_graph() -> Arc<Graph> {
    Graph::new(vec!["a", "b"], vec![("k", "a", "b")]).unwrap()
}

/// Carriers `a:{p,q}`, `b:{r,s}`; relation `k = {(p,r),(p,s)}`.
pub fn f2_y() -> RelGSet {
    over(
        f2_graph(),
        &[("a", &["p", "q"]), ("b", &["r", "s"])],
        &[("k", &[("p", "r"), ("p", "s")])],
    )
}

/// One vertex `a`, two loops `k1, k2 : a -> a`.
pub fn f3_graph() -> Arc<Graph> {
    Graph::new(vec!["a"], vec![("k1", "a", "a"), ("k2", "a", "a")]).unwrap()
}

/// Carrier `{0,1,2}`; relations `k1 = {(0,1)}`, `k2 = {(0,2)}`.
pub fn f3_w() -> RelGSet {
    over(
        f3_graph(),
        &[("a", &["0", "1", "2"])],
        &[("k1", &[("0", "1")]), ("k2", &[("0", "2")])],
    )
}

/// Convenience subobject constructor from element names per vertex.
pub fn sub(ambient: &RelGSet, parts: &[(&str, &[&str])]) -> MSubobject {
    let parts: BTreeMap<String, Vec<String>> = parts
        .iter()
        .map(|(v, es)| (v.to_string(), es.iter().map(|e| e.to_string()).collect()))
        .collect();
    MSubobject::from_names(ambient, &parts).unwrap()
}
