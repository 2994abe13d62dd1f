//! Quotients, disjoint unions, and the triple factorization.
//!
//! A map is a *quotient map* when it is pointwise surjective and every
//! related pair in the codomain lifts to a related pair in the domain.
//! Quotient maps are exactly the maps arising from [`quotient`] by an
//! equivalence subobject, they satisfy a parameterized interaction law
//! with possibility ([`check_quotient_axiom`]), and together with
//! disjoint unions they make every map factor as
//! quotient ; mono-epi comparison ; distinguished inclusion
//! ([`triple_factorize`]).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gset::{
    classify, compose, dia, direct_image, product_morphism, product_n, pullback_sub, tuple_index,
    tuple_split, GSetError, MSubobject, Morphism, RelGSet,
};
use crate::laws::{subobject_supply, EnumConfig, ZBattery};
use crate::report::{LawReport, Witness};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ColimError {
    /// The relation's ambient is not the square of the stated object.
    AmbientNotSquare,
    NotEquivalence,
    /// The kernel of the map does not contain the kernel of the quotient.
    KernelNotContained,
    CodomainMismatch,
    Core(GSetError),
}

impl fmt::Display for ColimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColimError::AmbientNotSquare => {
                write!(f, "relation does not live in the square of the object")
            }
            ColimError::NotEquivalence => write!(f, "relation is not an equivalence"),
            ColimError::KernelNotContained => {
                write!(f, "kernel of the quotient is not below the kernel of the map")
            }
            ColimError::CodomainMismatch => write!(f, "maps do not share a codomain"),
            ColimError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ColimError {}

impl From<GSetError> for ColimError {
    fn from(e: GSetError) -> Self {
        ColimError::Core(e)
    }
}

/// Decodes a subobject of `x . x` into per-vertex pair lists.
fn square_pairs(r: &MSubobject, x: &RelGSet) -> Result<Vec<Vec<(usize, usize)>>, ColimError> {
    let square = product_n(&[x.clone(), x.clone()])?;
    if r.ambient() != &square.object {
        return Err(ColimError::AmbientNotSquare);
    }
    Ok((0..x.graph().vertex_count())
        .map(|v| {
            let n = x.carrier(v).len();
            r.part(v)
                .iter()
                .map(|idx| {
                    let t = tuple_split(&[n, n], idx);
                    (t[0], t[1])
                })
                .collect()
        })
        .collect())
}

/// Whether a subobject of `x . x` is reflexive, symmetric, and transitive
/// at every vertex.
pub fn is_equivalence(r: &MSubobject, x: &RelGSet) -> Result<bool, ColimError> {
    let pairs = square_pairs(r, x)?;
    for (v, ps) in pairs.iter().enumerate() {
        let n = x.carrier(v).len();
        let has = |a: usize, b: usize| ps.contains(&(a, b));
        for a in 0..n {
            if !has(a, a) {
                return Ok(false);
            }
        }
        for (a, b) in ps {
            if !has(*b, *a) {
                return Ok(false);
            }
            for (b2, c) in ps {
                if b == b2 && !has(*a, *c) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A quotient object with its projection and the class assignment.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub object: RelGSet,
    pub q: Morphism,
    /// `classes[v][elem]` is the class index of the element, matching the
    /// quotient carrier order.  Class representatives are the least
    /// members in carrier order and name the classes.
    pub classes: Vec<Vec<usize>>,
}

/// Quotient of `x` by an equivalence subobject of `x . x`.
pub fn quotient(x: &RelGSet, r: &MSubobject) -> Result<Quotient, ColimError> {
    if !is_equivalence(r, x)? {
        return Err(ColimError::NotEquivalence);
    }
    let pairs = square_pairs(r, x)?;
    let graph = x.graph().clone();
    let mut classes = Vec::new();
    let mut carriers = Vec::new();
    for v in 0..graph.vertex_count() {
        let n = x.carrier(v).len();
        // Representative of each element: the least related element.
        let mut rep: Vec<usize> = (0..n).collect();
        for (a, b) in &pairs[v] {
            if b < a {
                // Walking pairs in any order is fine: equivalences make
                // the least related element well defined per class.
                rep[*a] = rep[*a].min(*b);
            }
        }
        // Chase to the fixed point (rep of my rep).
        for a in 0..n {
            let mut r0 = rep[a];
            while rep[r0] != r0 {
                r0 = rep[r0];
            }
            rep[a] = r0;
        }
        let mut class_reps: Vec<usize> = rep.iter().copied().collect::<Vec<_>>();
        class_reps.sort_unstable();
        class_reps.dedup();
        let class_of: Vec<usize> = (0..n)
            .map(|a| class_reps.binary_search(&rep[a]).unwrap())
            .collect();
        carriers.push(
            class_reps
                .iter()
                .map(|r0| x.carrier(v)[*r0].clone())
                .collect::<Vec<String>>(),
        );
        classes.push(class_of);
    }
    let mut relations = Vec::new();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        let mut rel: Vec<(usize, usize)> = x
            .relation(e)
            .iter()
            .map(|(a, b)| (classes[edge.src][*a], classes[edge.dst][*b]))
            .collect();
        rel.sort_unstable();
        rel.dedup();
        relations.push(rel);
    }
    let object = RelGSet::from_parts(graph, carriers, relations)?;
    let q = Morphism::from_index_map(x.clone(), object.clone(), classes.clone())?;
    Ok(Quotient { object, q, classes })
}

/// Whether equivalent pairs chained through `rep` collapse correctly is
/// guaranteed by transitivity; this check instead certifies an arbitrary
/// map: pointwise surjective and every codomain relation pair lifts.
pub fn is_quotient_map(q: &Morphism) -> LawReport {
    let law = "quotient.map";
    let flags = classify(q);
    if !flags.epi_e {
        return LawReport::fails(
            law,
            Witness {
                morphism: Some(q.clone()),
                note: "not pointwise surjective".to_string(),
                ..Witness::default()
            },
        );
    }
    let graph = q.dom().graph();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        for (u, v) in q.cod().relation(e) {
            let lifts = q.dom().relation(e).iter().any(|(a, b)| {
                q.apply(edge.src, *a) == *u && q.apply(edge.dst, *b) == *v
            });
            if !lifts {
                return LawReport::fails(
                    law,
                    Witness {
                        morphism: Some(q.clone()),
                        element: Some((
                            graph.vertex_name(edge.src).to_string(),
                            q.cod().carrier(edge.src)[*u].clone(),
                        )),
                        note: format!(
                            "codomain pair ({},{}) on edge {} does not lift",
                            q.cod().carrier(edge.src)[*u],
                            q.cod().carrier(edge.dst)[*v],
                            edge.name
                        ),
                        ..Witness::default()
                    },
                );
            }
        }
    }
    LawReport::holds(law)
}

/// The parameterized interaction law of a quotient with possibility:
/// `dia(S) <= exists_(q x 1_Z)( dia( (q x 1_Z)* S ) )` for every battery
/// member `Z` and every subobject `S` of `cod(q) x Z`.
pub fn check_quotient_axiom(
    q: &Morphism,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<LawReport, ColimError> {
    let law = "quotient.axiom";
    for (zname, z) in battery.members() {
        let qz = product_morphism(&[q.clone(), Morphism::identity(z)])?;
        let (ss, sampled) = subobject_supply(qz.cod(), cfg);
        for s in &ss {
            let lhs = dia(s);
            let rhs = direct_image(&qz, &dia(&pullback_sub(&qz, s)?))?;
            if !lhs.leq(&rhs).expect("same ambient") {
                let mut w = Witness {
                    morphism: Some(q.clone()),
                    subobjects: vec![s.clone()],
                    lhs: Some(lhs.clone()),
                    rhs: Some(rhs.clone()),
                    note: format!("dia(S) escapes the lifted possibility over {zname}"),
                    ..Witness::default()
                };
                w.objects.push(z.clone());
                w.element = {
                    let mut found = None;
                    'search: for v in 0..lhs.ambient().graph().vertex_count() {
                        for i in lhs.part(v).iter() {
                            if !rhs.part(v).contains(i) {
                                found = Some((
                                    lhs.ambient().graph().vertex_name(v).to_string(),
                                    lhs.ambient().carrier(v)[i].clone(),
                                ));
                                break 'search;
                            }
                        }
                    }
                    found
                };
                return Ok(LawReport::fails(law, w).mark_sampled(sampled));
            }
        }
    }
    Ok(LawReport::holds(law))
}

/// A disjoint union with its two injections.
#[derive(Clone, Debug)]
pub struct DisjointUnion {
    pub object: RelGSet,
    pub inj_a: Morphism,
    pub inj_b: Morphism,
}

/// Tag-and-union coproduct carrier: left elements as `L:name`, right
/// elements as `R:name`, relations the two disjoint copies.
pub fn disjoint_union(a: &RelGSet, b: &RelGSet) -> Result<DisjointUnion, ColimError> {
    if a.graph() != b.graph() {
        return Err(ColimError::Core(GSetError::GraphMismatch));
    }
    let graph = a.graph().clone();
    let mut carriers = Vec::new();
    for v in 0..graph.vertex_count() {
        let mut names: Vec<String> = a.carrier(v).iter().map(|n| format!("L:{n}")).collect();
        names.extend(b.carrier(v).iter().map(|n| format!("R:{n}")));
        carriers.push(names);
    }
    let mut relations = Vec::new();
    for e in 0..graph.edge_count() {
        let edge = graph.edge(e);
        let offset_src = a.carrier(edge.src).len();
        let offset_dst = a.carrier(edge.dst).len();
        let mut rel: Vec<(usize, usize)> = a.relation(e).to_vec();
        rel.extend(
            b.relation(e)
                .iter()
                .map(|(x, y)| (x + offset_src, y + offset_dst)),
        );
        rel.sort_unstable();
        relations.push(rel);
    }
    let object = RelGSet::from_parts(graph.clone(), carriers, relations)?;
    let inj_a = Morphism::from_index_map(
        a.clone(),
        object.clone(),
        (0..graph.vertex_count())
            .map(|v| (0..a.carrier(v).len()).collect())
            .collect(),
    )?;
    let inj_b = Morphism::from_index_map(
        b.clone(),
        object.clone(),
        (0..graph.vertex_count())
            .map(|v| {
                let off = a.carrier(v).len();
                (0..b.carrier(v).len()).map(|i| i + off).collect()
            })
            .collect(),
    )?;
    Ok(DisjointUnion {
        object,
        inj_a,
        inj_b,
    })
}

/// Structural laws of a disjoint union: both injections distinguished,
/// their images complementary, and possibility staying inside each summand.
pub fn disjoint_union_report(du: &DisjointUnion) -> Vec<LawReport> {
    let mut out = Vec::new();
    let a_img = crate::gset::image(&du.inj_a);
    let b_img = crate::gset::image(&du.inj_b);
    let in_m = classify(&du.inj_a).in_m && classify(&du.inj_b).in_m;
    out.push(if in_m {
        LawReport::holds("djunion.injections-distinguished")
    } else {
        LawReport::fails(
            "djunion.injections-distinguished",
            Witness {
                note: "an injection is not a distinguished inclusion".to_string(),
                ..Witness::default()
            },
        )
    });
    let complement = a_img.meet(&b_img).expect("same ambient").is_empty()
        && a_img.join(&b_img).expect("same ambient") == MSubobject::top(&du.object);
    out.push(if complement {
        LawReport::holds("djunion.complement")
    } else {
        LawReport::fails(
            "djunion.complement",
            Witness {
                subobjects: vec![a_img.clone(), b_img.clone()],
                note: "injection images are not complementary".to_string(),
                ..Witness::default()
            },
        )
    });
    let closed = dia(&a_img).leq(&a_img).expect("same ambient")
        && dia(&b_img).leq(&b_img).expect("same ambient");
    out.push(if closed {
        LawReport::holds("djunion.dia-closure")
    } else {
        LawReport::fails(
            "djunion.dia-closure",
            Witness {
                subobjects: vec![a_img, b_img],
                note: "possibility leaks across the summands".to_string(),
                ..Witness::default()
            },
        )
    });
    out
}

/// The copairing `[f, g]` through a disjoint union: the unique map with
/// `copair . inj_a = f` and `copair . inj_b = g`.
pub fn copair(
    inj_a: &Morphism,
    inj_b: &Morphism,
    f: &Morphism,
    g: &Morphism,
) -> Result<Morphism, ColimError> {
    if f.cod() != g.cod() {
        return Err(ColimError::CodomainMismatch);
    }
    if inj_a.cod() != inj_b.cod() || f.dom() != inj_a.dom() || g.dom() != inj_b.dom() {
        return Err(ColimError::Core(GSetError::CompositionMismatch));
    }
    let union = inj_a.cod();
    let graph = union.graph().clone();
    let mut map = Vec::new();
    for v in 0..graph.vertex_count() {
        let mut row = vec![usize::MAX; union.carrier(v).len()];
        for a in 0..f.dom().carrier(v).len() {
            row[inj_a.apply(v, a)] = f.apply(v, a);
        }
        for b in 0..g.dom().carrier(v).len() {
            row[inj_b.apply(v, b)] = g.apply(v, b);
        }
        if row.iter().any(|x| *x == usize::MAX) {
            // The injections do not jointly cover the union object.
            return Err(ColimError::Core(GSetError::NotTotal {
                vertex: graph.vertex_name(v).to_string(),
            }));
        }
        map.push(row);
    }
    Ok(Morphism::from_index_map(
        union.clone(),
        f.cod().clone(),
        map,
    )?)
}

/// Kernel of a map: the pairs identified by it, as a subobject of the
/// square of the domain.
pub fn kernel(f: &Morphism) -> Result<MSubobject, ColimError> {
    let x = f.dom();
    let square = product_n(&[x.clone(), x.clone()])?;
    let parts = (0..x.graph().vertex_count())
        .map(|v| {
            let n = x.carrier(v).len();
            crate::bits::BitSet::from_indices(
                n * n,
                (0..n).flat_map(move |a| (0..n).map(move |b| (a, b))).filter_map(|(a, b)| {
                    if f.apply(v, a) == f.apply(v, b) {
                        Some(tuple_index(&[n, n], &[a, b]))
                    } else {
                        None
                    }
                }),
            )
        })
        .collect();
    Ok(MSubobject::new(square.object, parts))
}

/// The mediating map through a quotient: given `q : X -> Q` with
/// `ker(q) <= ker(f)`, the unique `m : Q -> cod(f)` with `m . q = f`.
pub fn mediate(q: &Morphism, f: &Morphism) -> Result<Morphism, ColimError> {
    if q.dom() != f.dom() {
        return Err(ColimError::Core(GSetError::CompositionMismatch));
    }
    let kq = kernel(q)?;
    let kf = kernel(f)?;
    if !kq.leq(&kf).expect("same ambient") {
        return Err(ColimError::KernelNotContained);
    }
    if !classify(q).epi_e {
        return Err(ColimError::Core(GSetError::NotTotal {
            vertex: "quotient is not pointwise surjective".to_string(),
        }));
    }
    let graph = q.dom().graph().clone();
    let mut map = Vec::new();
    for v in 0..graph.vertex_count() {
        let mut row = vec![usize::MAX; q.cod().carrier(v).len()];
        for a in 0..q.dom().carrier(v).len() {
            row[q.apply(v, a)] = f.apply(v, a);
        }
        map.push(row);
    }
    Ok(Morphism::from_index_map(
        q.cod().clone(),
        f.cod().clone(),
        map,
    )?)
}

/// The three-stage factorization of a map: the quotient by its kernel,
/// the mono-and-surjective comparison, and the image inclusion.
#[derive(Clone, Debug)]
pub struct TripleFactorization {
    /// Quotient of the domain by the kernel.
    pub q: Morphism,
    /// Comparison from the quotient onto the image object; always mono
    /// and pointwise surjective but in general not distinguished.
    pub i: Morphism,
    /// The image inclusion, always distinguished.
    pub m: Morphism,
    /// Replayable certificates: quotient-map check for `q`, classification
    /// of `i` and `m`, and the recomposition identity.
    pub certificates: Vec<LawReport>,
}

pub fn triple_factorize(f: &Morphism) -> Result<TripleFactorization, ColimError> {
    let ker = kernel(f)?;
    let quot = quotient(f.dom(), &ker)?;
    let (e, m) = crate::gset::factorize(f);
    let i = mediate(&quot.q, &e)?;
    let mut certificates = vec![is_quotient_map(&quot.q)];
    let i_flags = classify(&i);
    certificates.push(if i_flags.mono && i_flags.epi_e {
        LawReport::holds("triple.comparison-mono-epi")
    } else {
        LawReport::fails(
            "triple.comparison-mono-epi",
            Witness {
                morphism: Some(i.clone()),
                note: "comparison is not mono and pointwise surjective".to_string(),
                ..Witness::default()
            },
        )
    });
    certificates.push(if classify(&m).in_m {
        LawReport::holds("triple.inclusion-distinguished")
    } else {
        LawReport::fails(
            "triple.inclusion-distinguished",
            Witness {
                morphism: Some(m.clone()),
                note: "image inclusion is not distinguished".to_string(),
                ..Witness::default()
            },
        )
    });
    let recomposed = compose(&compose(&quot.q, &i)?, &m)?;
    certificates.push(if recomposed == *f {
        LawReport::holds("triple.recompose")
    } else {
        LawReport::fails(
            "triple.recompose",
            Witness {
                morphism: Some(recomposed.clone()),
                note: "q;i;m differs from the original map".to_string(),
                ..Witness::default()
            },
        )
    });
    Ok(TripleFactorization {
        q: quot.q,
        i,
        m,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gset::{enumerate_morphisms, enumerate_subobjects, image};
    use crate::report::Status;

    fn all_equivalences(x: &RelGSet) -> Vec<MSubobject> {
        let square = product_n(&[x.clone(), x.clone()]).unwrap();
        enumerate_subobjects(&square.object, 18)
            .unwrap()
            .filter(|r| is_equivalence(r, x).unwrap())
            .collect()
    }

    #[test]
    fn total_quotient_of_x1_is_a_point_with_loop() {
        let x1 = fixtures::f1_x1();
        let square = product_n(&[x1.clone(), x1.clone()]).unwrap();
        let total = MSubobject::top(&square.object);
        let q = quotient(&x1, &total).unwrap();
        assert_eq!(q.object.carrier(0), ["0"]);
        assert_eq!(q.object.relation(0), [(0, 0)]);
        assert_eq!(q.classes, [[0, 0]]);
        assert!(is_quotient_map(&q.q).holds_up());
    }

    #[test]
    fn ambient_and_equivalence_errors() {
        let x1 = fixtures::f1_x1();
        let not_square = MSubobject::top(&x1);
        assert_eq!(
            is_equivalence(&not_square, &x1).err().unwrap(),
            ColimError::AmbientNotSquare
        );
        let square = product_n(&[x1.clone(), x1.clone()]).unwrap();
        let empty = MSubobject::bottom(&square.object);
        assert!(!is_equivalence(&empty, &x1).unwrap());
        assert_eq!(
            quotient(&x1, &empty).err().unwrap(),
            ColimError::NotEquivalence
        );
    }

    #[test]
    fn kernel_of_quotient_recovers_the_equivalence() {
        for x in [fixtures::f1_x1(), fixtures::f1_x1f(), fixtures::f3_w()] {
            for r in all_equivalences(&x) {
                let q = quotient(&x, &r).unwrap();
                assert_eq!(kernel(&q.q).unwrap(), r);
            }
        }
    }

    #[test]
    fn quotient_axiom_agrees_with_quotient_maps_on_f1() {
        let cfg = EnumConfig::default();
        let battery = ZBattery::new(fixtures::f1_graph());
        for x in fixtures::f1_objects() {
            for y in fixtures::f1_objects() {
                for f in enumerate_morphisms(&x, &y).unwrap() {
                    if !classify(&f).epi_e {
                        continue;
                    }
                    let is_q = is_quotient_map(&f).holds_up();
                    let axiom = check_quotient_axiom(&f, &battery, &cfg).unwrap();
                    assert_eq!(
                        is_q,
                        axiom.holds_up(),
                        "quotient characterization split on {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn sparse_surjection_fails_axiom_with_replayable_witness() {
        // Identity carriers X1E -> X1: surjective but the pair (0,1) does
        // not lift, and the axiom fails at S = {1} over the terminal.
        let v = fixtures::f1_v_x1e_to_x1();
        assert_eq!(is_quotient_map(&v).status, Status::Fails);
        let cfg = EnumConfig::default();
        let battery = ZBattery::new(fixtures::f1_graph());
        let r = check_quotient_axiom(&v, &battery, &cfg).unwrap();
        assert_eq!(r.status, Status::Fails);
        let w = r.witness.as_ref().unwrap();
        let qz = product_morphism(&[v.clone(), Morphism::identity(&w.objects[0])]).unwrap();
        let s = &w.subobjects[0];
        let lhs = dia(s);
        let rhs = direct_image(&qz, &dia(&pullback_sub(&qz, s).unwrap())).unwrap();
        assert!(!lhs.leq(&rhs).unwrap());
    }

    #[test]
    fn disjoint_union_laws_and_copair_uniqueness() {
        let x1 = fixtures::f1_x1();
        let x1e = fixtures::f1_x1e();
        let du = disjoint_union(&x1, &x1e).unwrap();
        assert_eq!(du.object.carrier(0), ["L:0", "L:1", "R:0", "R:1"]);
        for r in disjoint_union_report(&du) {
            assert!(r.holds_up(), "{r}");
        }
        // Copair of e and the constant-0 map into X1F, checked universal
        // by brute force.
        let x1f = fixtures::f1_x1f();
        let f = fixtures::f1_e_x1_to_x1f();
        let g = Morphism::from_index_map(x1e.clone(), x1f.clone(), vec![vec![0, 0]]).unwrap();
        let h = copair(&du.inj_a, &du.inj_b, &f, &g).unwrap();
        assert_eq!(compose(&du.inj_a, &h).unwrap(), f);
        assert_eq!(compose(&du.inj_b, &h).unwrap(), g);
        let candidates: Vec<Morphism> = enumerate_morphisms(&du.object, &x1f)
            .unwrap()
            .into_iter()
            .filter(|c| {
                compose(&du.inj_a, c).unwrap() == f && compose(&du.inj_b, c).unwrap() == g
            })
            .collect();
        assert_eq!(candidates, [h]);
    }

    #[test]
    fn copair_rejects_mismatched_codomains() {
        let x1 = fixtures::f1_x1();
        let du = disjoint_union(&x1, &x1).unwrap();
        let f = Morphism::identity(&x1);
        let g = fixtures::f1_e_x1_to_x1f();
        assert_eq!(
            copair(&du.inj_a, &du.inj_b, &f, &g).err().unwrap(),
            ColimError::CodomainMismatch
        );
    }

    #[test]
    fn mediate_requires_kernel_containment() {
        let x1 = fixtures::f1_x1();
        let square = product_n(&[x1.clone(), x1.clone()]).unwrap();
        let total = quotient(&x1, &MSubobject::top(&square.object)).unwrap();
        // ker(total.q) is everything; the identity does not contain it.
        assert_eq!(
            mediate(&total.q, &Morphism::identity(&x1)).err().unwrap(),
            ColimError::KernelNotContained
        );
        // Mediating the map itself gives the unique factorization.
        let b = crate::gset::bang(&x1);
        let m = mediate(&total.q, &b).unwrap();
        assert_eq!(compose(&total.q, &m).unwrap(), b);
    }

    #[test]
    fn post_quotient_comparison_is_mono() {
        // Whenever f factors as q ; m through a quotient with
        // ker(q) <= ker(f), the second factor is mono exactly when the
        // quotient collapsed the whole kernel: any kernel pair q kept
        // apart is a pair of distinct classes that m must merge.
        let objects = fixtures::f1_objects();
        for x in &objects {
            for y in &objects {
                for f in enumerate_morphisms(x, y).unwrap() {
                    let ker_f = kernel(&f).unwrap();
                    for r in all_equivalences(x) {
                        let quot = quotient(x, &r).unwrap();
                        let ker_q = kernel(&quot.q).unwrap();
                        if !ker_q.leq(&ker_f).unwrap() {
                            continue;
                        }
                        let m = mediate(&quot.q, &f).unwrap();
                        let collapsed = ker_f.leq(&ker_q).unwrap();
                        assert_eq!(classify(&m).mono, collapsed, "comparison for {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn triple_factorization_of_constant_map() {
        let x1f = fixtures::f1_x1f();
        let const0 =
            Morphism::from_index_map(x1f.clone(), x1f.clone(), vec![vec![0, 0]]).unwrap();
        let t = triple_factorize(&const0).unwrap();
        assert!(t.certificates.iter().all(LawReport::holds_up));
        // Kernel is total, so the quotient is a single class; the image
        // object is {0} with its loop, and the comparison is iso.
        assert_eq!(t.q.cod().carrier(0), ["0"]);
        assert!(classify(&t.i).iso);
        assert!(classify(&t.m).in_m);
        assert_eq!(image(&const0).part_names(0), ["0"]);
    }

    #[test]
    fn triple_factorization_comparison_not_always_iso() {
        // For e : X1 -> X1F the kernel is discrete, so q is iso and the
        // comparison carries the relation growth: mono + surjective but
        // not distinguished.
        let e = fixtures::f1_e_x1_to_x1f();
        let t = triple_factorize(&e).unwrap();
        assert!(t.certificates.iter().all(LawReport::holds_up));
        let flags = classify(&t.i);
        assert!(flags.mono && flags.epi_e);
        assert!(!flags.in_m);
        assert!(!flags.iso);
    }
}
