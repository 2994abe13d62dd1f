//! Law suites: doctrine, modal interaction, optional extras, openness,
//! and the saturation notions (brittle subspaces, functional and
//! continuous relations, brittle isomorphisms).
//!
//! The universally quantified laws range over every subobject of the
//! relevant object when its total carrier fits under the configured
//! enumeration bound; beyond that the checks fall back to a seeded random
//! sample and the resulting reports are marked sampled.  Laws about "all
//! objects Z" range over a [`ZBattery`]: the terminal object, one
//! singleton-pair object per edge, and any caller-supplied extras.
//!
//! The doctrine and modal entry points exist in two forms: the plain one
//! uses the real image and possibility operators, and a `_with` variant
//! takes the operator as an argument so a corrupted operator can be
//! injected to prove the checks have teeth.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bits::BitSet;
use crate::gset::{
    classify, compose, dia, direct_image, enumerate_subobjects, mask_of_sub, product_morphism,
    product_n, project_product, pullback, pullback_sub, sub_object, subobject_from_mask,
    GSetError, Graph, MSubobject, Morphism, RelGSet,
};
use crate::report::{LawReport, Status, Witness};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LawsError {
    NotMono,
    AmbientMismatch,
    MissingCompositionTable,
    BadCompositionTable(String),
    Core(GSetError),
}

impl fmt::Display for LawsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawsError::NotMono => write!(f, "map is not a mono"),
            LawsError::AmbientMismatch => {
                write!(f, "subobject does not live in the stated product")
            }
            LawsError::MissingCompositionTable => {
                write!(f, "lax functoriality needs a composition table")
            }
            LawsError::BadCompositionTable(msg) => write!(f, "bad composition table: {msg}"),
            LawsError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LawsError {}

impl From<GSetError> for LawsError {
    fn from(e: GSetError) -> Self {
        LawsError::Core(e)
    }
}

/// Enumeration policy for the universally quantified checks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EnumConfig {
    /// Exhaustive enumeration is used up to this total carrier size.
    pub bound: usize,
    /// Number of sampled instances beyond the bound.
    pub sample: usize,
    /// Seed for the sampled fallback.
    pub seed: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            bound: crate::gset::DEFAULT_ENUM_BOUND,
            sample: 512,
            seed: 0,
        }
    }
}

fn random_sub(x: &RelGSet, rng: &mut ChaCha8Rng) -> MSubobject {
    let parts = (0..x.graph().vertex_count())
        .map(|v| {
            let n = x.carrier(v).len();
            let mut bits = BitSet::new(n);
            let mut i = 0;
            while i < n {
                let w = rng.next_u64();
                for j in 0..64.min(n - i) {
                    if w >> j & 1 == 1 {
                        bits.insert(i + j);
                    }
                }
                i += 64;
            }
            bits
        })
        .collect();
    MSubobject::new(x.clone(), parts)
}

/// All subobjects when the object fits under the bound, otherwise a
/// seeded sample; the flag says which happened.
pub fn subobject_supply(x: &RelGSet, cfg: &EnumConfig) -> (Vec<MSubobject>, bool) {
    match enumerate_subobjects(x, cfg.bound) {
        Ok(it) => (it.collect(), false),
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (
                (0..cfg.sample).map(|_| random_sub(x, &mut rng)).collect(),
                true,
            )
        }
    }
}

/// Carrier policy at vertices not touched by the singled-out edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ZCarrierStyle {
    /// Empty carriers away from the edge (the default battery).
    #[default]
    Empty,
    /// One-point carriers away from the edge (for sensitivity runs).
    Singleton,
}

/// The stock of parameter objects used to stabilize laws: the terminal
/// object, one singleton-pair object per edge (a single point at the
/// edge's endpoints, related only along that edge), and optional extras.
#[derive(Clone, Debug)]
pub struct ZBattery {
    members: Vec<(String, RelGSet)>,
    graph: Arc<Graph>,
}

impl ZBattery {
    pub fn new(graph: Arc<Graph>) -> ZBattery {
        ZBattery::with_style(graph, ZCarrierStyle::Empty)
    }

    pub fn with_style(graph: Arc<Graph>, style: ZCarrierStyle) -> ZBattery {
        let mut members = vec![(
            "terminal".to_string(),
            RelGSet::terminal(graph.clone()),
        )];
        for e in 0..graph.edge_count() {
            let edge = graph.edge(e);
            let mut carriers: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for v in 0..graph.vertex_count() {
                let incident = v == edge.src || v == edge.dst;
                let carrier = if incident || style == ZCarrierStyle::Singleton {
                    vec!["*".to_string()]
                } else {
                    vec![]
                };
                carriers.insert(graph.vertex_name(v).to_string(), carrier);
            }
            let mut relations: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
            relations.insert(
                edge.name.clone(),
                vec![("*".to_string(), "*".to_string())],
            );
            let z = RelGSet::new(graph.clone(), &carriers, &relations)
                .expect("singleton-pair object is well formed");
            members.push((format!("edge:{}", edge.name), z));
        }
        ZBattery { members, graph }
    }

    /// Appends a caller-supplied member.
    pub fn push_extra(&mut self, z: RelGSet) -> Result<(), GSetError> {
        if z.graph() != &self.graph {
            return Err(GSetError::GraphMismatch);
        }
        self.members.push((format!("extra:{}", self.members.len()), z));
        Ok(())
    }

    pub fn members(&self) -> &[(String, RelGSet)] {
        &self.members
    }
}

/// A finite instance to run law suites over: some objects and some maps
/// over one graph.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub objects: Vec<RelGSet>,
    pub morphisms: Vec<Morphism>,
}

impl Diagram {
    pub fn new(objects: Vec<RelGSet>, morphisms: Vec<Morphism>) -> Result<Diagram, GSetError> {
        let graph = objects
            .first()
            .map(|x| x.graph().clone())
            .or_else(|| morphisms.first().map(|f| f.dom().graph().clone()));
        if let Some(graph) = graph {
            for x in &objects {
                if x.graph() != &graph {
                    return Err(GSetError::GraphMismatch);
                }
            }
            for f in &morphisms {
                if f.dom().graph() != &graph {
                    return Err(GSetError::GraphMismatch);
                }
            }
        }
        Ok(Diagram { objects, morphisms })
    }

    /// The default instance for a single object: the object, its square,
    /// both projections, the diagonal, and every endomorphism.
    pub fn span_of(x: &RelGSet) -> Result<Diagram, GSetError> {
        let prod = product_n(&[x.clone(), x.clone()])?;
        let diagonal = crate::gset::tuple_morphism(
            x,
            &[Morphism::identity(x), Morphism::identity(x)],
        )?;
        let mut morphisms = vec![diagonal];
        morphisms.extend(prod.projections.iter().cloned());
        morphisms.extend(crate::gset::enumerate_morphisms(x, x)?);
        Ok(Diagram {
            objects: vec![x.clone(), prod.object],
            morphisms,
        })
    }
}

/// Image operator signature, injectable for mutation testing.
pub type ImageOp<'a> = &'a dyn Fn(&Morphism, &MSubobject) -> MSubobject;
/// Possibility operator signature, injectable for mutation testing.
pub type DiaOp<'a> = &'a dyn Fn(&MSubobject) -> MSubobject;

fn real_image(f: &Morphism, s: &MSubobject) -> MSubobject {
    direct_image(f, s).expect("ambient checked by caller")
}

fn first_diff(lhs: &MSubobject, rhs: &MSubobject) -> Option<(String, String)> {
    let x = lhs.ambient();
    for v in 0..x.graph().vertex_count() {
        for i in 0..x.carrier(v).len() {
            if lhs.part(v).contains(i) != rhs.part(v).contains(i) {
                return Some((
                    x.graph().vertex_name(v).to_string(),
                    x.carrier(v)[i].clone(),
                ));
            }
        }
    }
    None
}

fn inequality_witness(
    morphism: Option<&Morphism>,
    subobjects: &[&MSubobject],
    lhs: &MSubobject,
    rhs: &MSubobject,
    note: &str,
) -> Witness {
    Witness {
        objects: Vec::new(),
        morphism: morphism.cloned(),
        subobjects: subobjects.iter().map(|s| (*s).clone()).collect(),
        element: first_diff(lhs, rhs),
        lhs: Some(lhs.clone()),
        rhs: Some(rhs.clone()),
        note: note.to_string(),
    }
}

/// Checks `exists_f -| pullback_f` as the two-sided inequality
/// `exists_f(S) <= T  iff  S <= f*(T)` over all (or sampled) pairs.
fn adjunction_report(f: &Morphism, image_op: ImageOp, cfg: &EnumConfig) -> LawReport {
    let law = "doctrine.adjunction";
    let exhaustive = f.dom().total_size() <= cfg.bound && f.cod().total_size() <= cfg.bound;
    if exhaustive {
        for s_mask in 0..crate::gset::subobject_count(f.dom()) {
            let s = subobject_from_mask(f.dom(), s_mask);
            let img = image_op(f, &s);
            for t_mask in 0..crate::gset::subobject_count(f.cod()) {
                let t = subobject_from_mask(f.cod(), t_mask);
                if let Some(r) = adjunction_violation(f, &s, &t, &img) {
                    return r;
                }
            }
        }
        LawReport::holds(law)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.sample {
            let s = random_sub(f.dom(), &mut rng);
            let t = random_sub(f.cod(), &mut rng);
            let img = image_op(f, &s);
            if let Some(r) = adjunction_violation(f, &s, &t, &img) {
                return r.mark_sampled(true);
            }
        }
        LawReport::holds(law).mark_sampled(true)
    }
}

fn adjunction_violation(
    f: &Morphism,
    s: &MSubobject,
    t: &MSubobject,
    img: &MSubobject,
) -> Option<LawReport> {
    let left = img.leq(t).expect("same ambient");
    let back = pullback_sub(f, t).expect("ambient checked");
    let right = s.leq(&back).expect("same ambient");
    if left != right {
        let note = if left {
            "image below T but S not below f*(T)"
        } else {
            "S below f*(T) but image not below T"
        };
        Some(LawReport::fails(
            "doctrine.adjunction",
            inequality_witness(Some(f), &[s, t], img, &back, note),
        ))
    } else {
        None
    }
}

fn frobenius_report(f: &Morphism, image_op: ImageOp, cfg: &EnumConfig) -> LawReport {
    let law = "doctrine.frobenius";
    let (ss, s_sampled) = subobject_supply(f.dom(), cfg);
    let (ts, t_sampled) = subobject_supply(f.cod(), cfg);
    let sampled = s_sampled || t_sampled;
    for s in &ss {
        for t in &ts {
            let ft = pullback_sub(f, t).expect("ambient checked");
            let lhs = image_op(f, &s.meet(&ft).expect("same ambient"));
            let rhs = image_op(f, s).meet(t).expect("same ambient");
            if lhs != rhs {
                return LawReport::fails(
                    law,
                    inequality_witness(
                        Some(f),
                        &[s, t],
                        &lhs,
                        &rhs,
                        "exists_f(S and f*T) differs from exists_f(S) and T",
                    ),
                )
                .mark_sampled(sampled);
            }
        }
    }
    LawReport::holds(law).mark_sampled(sampled)
}

fn beck_chevalley_report(
    f: &Morphism,
    g: &Morphism,
    image_op: ImageOp,
    cfg: &EnumConfig,
) -> Result<LawReport, GSetError> {
    let law = "doctrine.beck-chevalley";
    let pb = pullback(f, g)?;
    let (ss, sampled) = subobject_supply(f.dom(), cfg);
    for s in &ss {
        let lhs = pullback_sub(g, &image_op(f, s))?;
        let rhs = image_op(&pb.to_y, &pullback_sub(&pb.to_x, s)?);
        if lhs != rhs {
            return Ok(LawReport::fails(
                law,
                inequality_witness(
                    Some(g),
                    &[s],
                    &lhs,
                    &rhs,
                    "g*(exists_f S) differs from exists along the pullback",
                ),
            )
            .mark_sampled(sampled));
        }
    }
    Ok(LawReport::holds(law).mark_sampled(sampled))
}

fn first_component_report(diagram: &Diagram) -> LawReport {
    let law = "doctrine.first-component";
    for h in &diagram.morphisms {
        for l in &diagram.morphisms {
            if h.cod() != l.dom() {
                continue;
            }
            let hl = compose(h, l).expect("endpoints checked");
            if classify(&hl).in_m && !classify(h).in_m {
                return LawReport::fails(
                    law,
                    Witness {
                        morphism: Some(h.clone()),
                        note: "composite is distinguished but its first factor is not"
                            .to_string(),
                        ..Witness::default()
                    },
                );
            }
        }
    }
    LawReport::holds(law)
}

/// Doctrine suite: adjunction, Frobenius, Beck-Chevalley over all
/// same-codomain pairs, and the first-component property.
pub fn doctrine_report(diagram: &Diagram, cfg: &EnumConfig) -> Result<Vec<LawReport>, LawsError> {
    doctrine_report_with(diagram, cfg, &real_image)
}

/// Doctrine suite with an injectable image operator.
pub fn doctrine_report_with(
    diagram: &Diagram,
    cfg: &EnumConfig,
    image_op: ImageOp,
) -> Result<Vec<LawReport>, LawsError> {
    let mut out = Vec::new();
    for f in &diagram.morphisms {
        out.push(adjunction_report(f, image_op, cfg));
        out.push(frobenius_report(f, image_op, cfg));
    }
    for f in &diagram.morphisms {
        for g in &diagram.morphisms {
            if f.cod() == g.cod() {
                out.push(beck_chevalley_report(f, g, image_op, cfg)?);
            }
        }
    }
    out.push(first_component_report(diagram));
    Ok(merge_reports(out))
}

/// Folds per-instance reports of the same law into one report per law,
/// keeping the first failure witness.
fn merge_reports(reports: Vec<LawReport>) -> Vec<LawReport> {
    let mut order: Vec<String> = Vec::new();
    let mut merged: BTreeMap<String, LawReport> = BTreeMap::new();
    for r in reports {
        if !order.contains(&r.law) {
            order.push(r.law.clone());
        }
        match merged.get_mut(&r.law) {
            None => {
                merged.insert(r.law.clone(), r);
            }
            Some(prev) => {
                prev.sampled |= r.sampled;
                if prev.status == Status::Holds && r.status == Status::Fails {
                    prev.status = Status::Fails;
                    prev.witness = r.witness;
                }
            }
        }
    }
    order
        .into_iter()
        .map(|law| merged.remove(&law).unwrap())
        .collect()
}

/// Join-preservation and bottom-preservation of the possibility operator
/// on one object, exhaustively by bit masks or sampled.
fn k_law_reports(x: &RelGSet, dia_op: DiaOp, cfg: &EnumConfig) -> Vec<LawReport> {
    let join_law = "modal.join";
    let bottom_law = "modal.bottom";
    let bot = MSubobject::bottom(x);
    let dia_bot = dia_op(&bot);
    let bottom_report = if dia_bot.is_empty() {
        LawReport::holds(bottom_law)
    } else {
        LawReport::fails(
            bottom_law,
            inequality_witness(None, &[&bot], &dia_bot, &bot, "dia(bottom) is not bottom"),
        )
    };
    let total = x.total_size();
    if total <= cfg.bound {
        // Precompute dia on every mask, then compare joins by mask algebra.
        let count = 1u128 << total;
        let dia_mask: Vec<u128> = (0..count)
            .map(|m| mask_of_sub(&dia_op(&subobject_from_mask(x, m))))
            .collect();
        for s in 0..count {
            for t in 0..count {
                if dia_mask[(s | t) as usize] != dia_mask[s as usize] | dia_mask[t as usize] {
                    let sv = subobject_from_mask(x, s);
                    let tv = subobject_from_mask(x, t);
                    let lhs = dia_op(&sv.join(&tv).expect("same ambient"));
                    let rhs = dia_op(&sv).join(&dia_op(&tv)).expect("same ambient");
                    return vec![
                        LawReport::fails(
                            join_law,
                            inequality_witness(
                                None,
                                &[&sv, &tv],
                                &lhs,
                                &rhs,
                                "dia(S or T) differs from dia(S) or dia(T)",
                            ),
                        ),
                        bottom_report,
                    ];
                }
            }
        }
        vec![LawReport::holds(join_law), bottom_report]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.sample {
            let s = random_sub(x, &mut rng);
            let t = random_sub(x, &mut rng);
            let lhs = dia_op(&s.join(&t).expect("same ambient"));
            let rhs = dia_op(&s).join(&dia_op(&t)).expect("same ambient");
            if lhs != rhs {
                return vec![
                    LawReport::fails(
                        join_law,
                        inequality_witness(
                            None,
                            &[&s, &t],
                            &lhs,
                            &rhs,
                            "dia(S or T) differs from dia(S) or dia(T)",
                        ),
                    )
                    .mark_sampled(true),
                    bottom_report.mark_sampled(true),
                ];
            }
        }
        vec![
            LawReport::holds(join_law).mark_sampled(true),
            bottom_report.mark_sampled(true),
        ]
    }
}

fn continuity_report(f: &Morphism, dia_op: DiaOp, cfg: &EnumConfig) -> LawReport {
    let law = "modal.continuity";
    let (ts, sampled) = subobject_supply(f.cod(), cfg);
    for t in &ts {
        let lhs = dia_op(&pullback_sub(f, t).expect("ambient checked"));
        let rhs = pullback_sub(f, &dia_op(t)).expect("ambient checked");
        if !lhs.leq(&rhs).expect("same ambient") {
            return LawReport::fails(
                law,
                inequality_witness(
                    Some(f),
                    &[t],
                    &lhs,
                    &rhs,
                    "dia(f*S) not below f*(dia S)",
                ),
            )
            .mark_sampled(sampled);
        }
    }
    LawReport::holds(law).mark_sampled(sampled)
}

/// Checks the stabilized subspace equation for a distinguished mono `m`
/// over every battery member: `dia(S) = (m x 1_Z)* dia(exists_(m x 1_Z) S)`.
fn subspace_report(
    m: &Morphism,
    battery: &ZBattery,
    dia_op: DiaOp,
    cfg: &EnumConfig,
) -> Result<LawReport, LawsError> {
    let law = "modal.subspace";
    for (zname, z) in battery.members() {
        let mz = product_morphism(&[m.clone(), Morphism::identity(z)])?;
        let (ss, sampled) = subobject_supply(mz.dom(), cfg);
        for s in &ss {
            let lhs = dia_op(s);
            let rhs = pullback_sub(&mz, &dia_op(&direct_image(&mz, s)?))?;
            if lhs != rhs {
                let mut w = inequality_witness(
                    Some(m),
                    &[s],
                    &lhs,
                    &rhs,
                    &format!("subspace equation fails over {zname}"),
                );
                w.objects.push(z.clone());
                return Ok(LawReport::fails(law, w).mark_sampled(sampled));
            }
        }
    }
    Ok(LawReport::holds(law))
}

/// Modal suite: join and bottom preservation on every object, continuity
/// for every map, and the stabilized subspace law for every distinguished
/// mono in the diagram.
pub fn modal_law_report(
    diagram: &Diagram,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<Vec<LawReport>, LawsError> {
    modal_law_report_with(diagram, battery, cfg, &dia)
}

/// Modal suite with an injectable possibility operator.
pub fn modal_law_report_with(
    diagram: &Diagram,
    battery: &ZBattery,
    cfg: &EnumConfig,
    dia_op: DiaOp,
) -> Result<Vec<LawReport>, LawsError> {
    let mut out = Vec::new();
    for x in &diagram.objects {
        out.extend(k_law_reports(x, dia_op, cfg));
    }
    for f in &diagram.morphisms {
        out.push(continuity_report(f, dia_op, cfg));
        if classify(f).in_m {
            out.push(subspace_report(f, battery, dia_op, cfg)?);
        }
    }
    Ok(merge_reports(out))
}

/// Composition data for the lax functoriality check: declared composite
/// edges and declared identity edges.
#[derive(Clone, Debug, Default)]
pub struct CompositionTable {
    /// `(k, l) -> m` meaning edge `k` followed by edge `l` composes to `m`.
    pub composites: BTreeMap<(String, String), String>,
    /// `vertex -> e` declaring `e` as the identity edge at the vertex.
    pub identities: BTreeMap<String, String>,
}

impl CompositionTable {
    fn validate(&self, graph: &Graph) -> Result<(), LawsError> {
        for ((k, l), m) in &self.composites {
            let (k_e, l_e, m_e) = (
                graph
                    .edge_index(k)
                    .ok_or_else(|| LawsError::BadCompositionTable(format!("unknown edge {k:?}")))?,
                graph
                    .edge_index(l)
                    .ok_or_else(|| LawsError::BadCompositionTable(format!("unknown edge {l:?}")))?,
                graph
                    .edge_index(m)
                    .ok_or_else(|| LawsError::BadCompositionTable(format!("unknown edge {m:?}")))?,
            );
            let (k_e, l_e, m_e) = (graph.edge(k_e), graph.edge(l_e), graph.edge(m_e));
            if k_e.dst != l_e.src || m_e.src != k_e.src || m_e.dst != l_e.dst {
                return Err(LawsError::BadCompositionTable(format!(
                    "composite {k}.{l} = {m} has mismatched endpoints"
                )));
            }
        }
        for (v, e) in &self.identities {
            let vi = graph
                .vertex_index(v)
                .ok_or_else(|| LawsError::BadCompositionTable(format!("unknown vertex {v:?}")))?;
            let ei = graph
                .edge_index(e)
                .ok_or_else(|| LawsError::BadCompositionTable(format!("unknown edge {e:?}")))?;
            let edge = graph.edge(ei);
            if edge.src != vi || edge.dst != vi {
                return Err(LawsError::BadCompositionTable(format!(
                    "identity edge {e} is not a loop at {v}"
                )));
            }
        }
        Ok(())
    }
}

fn s4_reports(x: &RelGSet, cfg: &EnumConfig) -> Vec<LawReport> {
    let (ss, sampled) = subobject_supply(x, cfg);
    let mut increasing = None;
    let mut idempotence = None;
    for s in &ss {
        let d = dia(s);
        if increasing.is_none() && !s.leq(&d).expect("same ambient") {
            increasing = Some(LawReport::fails(
                "optional.s4-increasing",
                inequality_witness(None, &[s], s, &d, "S not below dia(S)"),
            ));
        }
        if idempotence.is_none() && dia(&d) != d {
            idempotence = Some(LawReport::fails(
                "optional.s4-idempotence",
                inequality_witness(None, &[s], &dia(&d), &d, "dia(dia S) differs from dia(S)"),
            ));
        }
    }
    vec![
        increasing
            .unwrap_or_else(|| LawReport::holds("optional.s4-increasing"))
            .mark_sampled(sampled),
        idempotence
            .unwrap_or_else(|| LawReport::holds("optional.s4-idempotence"))
            .mark_sampled(sampled),
    ]
}

fn variable_independence_report(x: &RelGSet, cfg: &EnumConfig) -> Result<LawReport, LawsError> {
    let law = "optional.variable-independence";
    let prod = product_n(&[x.clone(), x.clone()])?;
    let (ss, sampled) = subobject_supply(x, cfg);
    for s1 in &ss {
        for s2 in &ss {
            let lhs = pullback_sub(&prod.projections[0], &dia(s1))?
                .meet(&pullback_sub(&prod.projections[1], &dia(s2))?)?;
            let rhs = dia(
                &pullback_sub(&prod.projections[0], s1)?
                    .meet(&pullback_sub(&prod.projections[1], s2)?)?,
            );
            if lhs != rhs {
                let mut w = inequality_witness(
                    None,
                    &[s1, s2],
                    &lhs,
                    &rhs,
                    "possibility does not split across the product factors",
                );
                w.objects.push(prod.object.clone());
                return Ok(LawReport::fails(law, w).mark_sampled(sampled));
            }
        }
    }
    Ok(LawReport::holds(law).mark_sampled(sampled))
}

fn lax_object_report(x: &RelGSet, table: &CompositionTable) -> LawReport {
    let law = "optional.lax";
    let graph = x.graph();
    for v in 0..graph.vertex_count() {
        let vname = graph.vertex_name(v);
        match table.identities.get(vname) {
            None => {
                return LawReport::fails(
                    law,
                    Witness {
                        element: Some((vname.to_string(), String::new())),
                        note: format!("no identity edge declared for vertex {vname}"),
                        ..Witness::default()
                    },
                );
            }
            Some(e) => {
                let ei = graph.edge_index(e).expect("table validated");
                for a in 0..x.carrier(v).len() {
                    if !x.has_pair(ei, a, a) {
                        return LawReport::fails(
                            law,
                            Witness {
                                element: Some((vname.to_string(), x.carrier(v)[a].clone())),
                                note: format!(
                                    "identity pair missing on edge {e} at {}",
                                    x.carrier(v)[a]
                                ),
                                ..Witness::default()
                            },
                        );
                    }
                }
            }
        }
    }
    for ((k, l), m) in &table.composites {
        let ki = graph.edge_index(k).expect("table validated");
        let li = graph.edge_index(l).expect("table validated");
        let mi = graph.edge_index(m).expect("table validated");
        for (a, b) in x.relation(ki) {
            for (b2, c) in x.relation(li) {
                if b == b2 && !x.has_pair(mi, *a, *c) {
                    let src = graph.edge(ki).src;
                    return LawReport::fails(
                        law,
                        Witness {
                            element: Some((
                                graph.vertex_name(src).to_string(),
                                x.carrier(src)[*a].clone(),
                            )),
                            note: format!(
                                "composite pair missing: {k};{l} relates it but {m} does not"
                            ),
                            ..Witness::default()
                        },
                    );
                }
            }
        }
    }
    LawReport::holds(law)
}

/// Optional extras: the two closure laws and variable independence on
/// every object (none of which hold in general here), plus lax
/// functoriality when a composition table is supplied.
pub fn optional_law_report(
    diagram: &Diagram,
    table: Option<&CompositionTable>,
    cfg: &EnumConfig,
) -> Result<Vec<LawReport>, LawsError> {
    let mut out = Vec::new();
    for x in &diagram.objects {
        out.extend(s4_reports(x, cfg));
        out.push(variable_independence_report(x, cfg)?);
    }
    if let Some(table) = table {
        out.extend(lax_report(diagram, Some(table))?);
    }
    Ok(merge_reports(out))
}

/// Lax functoriality alone; requires a composition table.
pub fn lax_report(
    diagram: &Diagram,
    table: Option<&CompositionTable>,
) -> Result<Vec<LawReport>, LawsError> {
    let table = table.ok_or(LawsError::MissingCompositionTable)?;
    let graph = diagram
        .objects
        .first()
        .map(|x| x.graph().clone())
        .ok_or(LawsError::MissingCompositionTable)?;
    table.validate(&graph)?;
    Ok(merge_reports(
        diagram
            .objects
            .iter()
            .map(|x| lax_object_report(x, table))
            .collect(),
    ))
}

/// Relational composition `R ; T` of `R <= X x Y` and `T <= Y x Z`,
/// computed as the image along the outer projection of the meet of the
/// two cylinders inside `X x Y x Z`.
pub fn rel_compose(
    r: &MSubobject,
    t: &MSubobject,
    x: &RelGSet,
    y: &RelGSet,
    z: &RelGSet,
) -> Result<MSubobject, LawsError> {
    let xy = product_n(&[x.clone(), y.clone()])?;
    let yz = product_n(&[y.clone(), z.clone()])?;
    if r.ambient() != &xy.object || t.ambient() != &yz.object {
        return Err(LawsError::AmbientMismatch);
    }
    let factors = [x.clone(), y.clone(), z.clone()];
    let p_xy = project_product(&factors, &[0, 1])?;
    let p_yz = project_product(&factors, &[1, 2])?;
    let p_xz = project_product(&factors, &[0, 2])?;
    let meet = pullback_sub(&p_xy, r)?.meet(&pullback_sub(&p_yz, t)?)?;
    Ok(direct_image(&p_xz, &meet)?)
}

/// Openness verdicts for one map.
#[derive(Clone, Debug)]
pub struct OpennessReport {
    /// `h*(dia S) <= dia(h* S)` for all S over the codomain.
    pub open: LawReport,
    /// `h x 1_Z` open for every battery member.
    pub stably_open: LawReport,
    /// `dia(exists_h S) <= exists_h(dia S)` for all S over the domain.
    pub barcan: LawReport,
    /// For a mono in the left-orthogonal class, open and Barcan must
    /// agree; true when that implication is respected (vacuously true
    /// otherwise).
    pub lem_bf_consistent: bool,
}

fn open_check(h: &Morphism, cfg: &EnumConfig) -> LawReport {
    let law = "openness.open";
    let (ss, sampled) = subobject_supply(h.cod(), cfg);
    for s in &ss {
        let lhs = pullback_sub(h, &dia(s)).expect("ambient checked");
        let rhs = dia(&pullback_sub(h, s).expect("ambient checked"));
        if !lhs.leq(&rhs).expect("same ambient") {
            return LawReport::fails(
                law,
                inequality_witness(Some(h), &[s], &lhs, &rhs, "h*(dia S) not below dia(h* S)"),
            )
            .mark_sampled(sampled);
        }
    }
    LawReport::holds(law).mark_sampled(sampled)
}

/// Openness, stable openness over the battery, the Barcan inequality, and
/// their mutual consistency for the given map.
pub fn openness_report(
    h: &Morphism,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<OpennessReport, LawsError> {
    let open = open_check(h, cfg);
    let mut stably_open = LawReport::holds("openness.stable");
    for (zname, z) in battery.members() {
        let hz = product_morphism(&[h.clone(), Morphism::identity(z)])?;
        let mut inner = open_check(&hz, cfg);
        if inner.status == Status::Fails {
            inner.law = "openness.stable".to_string();
            if let Some(w) = &mut inner.witness {
                w.objects.push(z.clone());
                w.note = format!("{} (over {zname})", w.note);
            }
            stably_open = inner;
            break;
        }
        stably_open.sampled |= inner.sampled;
    }
    let barcan_law = "openness.barcan";
    let (ss, sampled) = subobject_supply(h.dom(), cfg);
    let mut barcan = LawReport::holds(barcan_law).mark_sampled(sampled);
    for s in &ss {
        let lhs = dia(&direct_image(h, s)?);
        let rhs = direct_image(h, &dia(s))?;
        if !lhs.leq(&rhs).expect("same ambient") {
            barcan = LawReport::fails(
                barcan_law,
                inequality_witness(
                    Some(h),
                    &[s],
                    &lhs,
                    &rhs,
                    "dia(exists_h S) not below exists_h(dia S)",
                ),
            )
            .mark_sampled(sampled);
            break;
        }
    }
    let flags = classify(h);
    let lem_bf_consistent =
        !(flags.mono && flags.epi_e) || (open.status == barcan.status);
    Ok(OpennessReport {
        open,
        stably_open,
        barcan,
        lem_bf_consistent,
    })
}

/// Checks whether a mono is a brittle subspace: the subspace equation,
/// stabilized over the battery, holds for every subobject of its domain.
pub fn is_brittle_subspace(
    m: &Morphism,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<LawReport, LawsError> {
    if !classify(m).mono {
        return Err(LawsError::NotMono);
    }
    let mut r = subspace_report(m, battery, &dia, cfg)?;
    r.law = "saturation.brittle-subspace".to_string();
    Ok(r)
}

/// Verdicts for a relation viewed as a candidate map.
#[derive(Clone, Debug)]
pub struct BrittleMorphismReport {
    /// The projection to the source is mono and in the left class.
    pub functional: LawReport,
    /// `dia(R ; S) <= R ; dia(S)` over the battery.
    pub continuous: LawReport,
    /// The realizing map, extracted when both checks pass.
    pub realization: Option<Morphism>,
}

/// Checks functionality and continuity of `r <= X x Y` and extracts the
/// realizing morphism when both hold.
pub fn brittle_morphism(
    r: &MSubobject,
    x: &RelGSet,
    y: &RelGSet,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<BrittleMorphismReport, LawsError> {
    let xy = product_n(&[x.clone(), y.clone()])?;
    if r.ambient() != &xy.object {
        return Err(LawsError::AmbientMismatch);
    }
    let (_, incl) = sub_object(r);
    let to_x = compose(&incl, &xy.projections[0])?;
    let flags = classify(&to_x);
    let functional = if flags.mono && flags.epi_e {
        LawReport::holds("saturation.functional")
    } else {
        LawReport::fails(
            "saturation.functional",
            Witness {
                subobjects: vec![r.clone()],
                note: if flags.mono {
                    "projection to the source is not pointwise surjective".to_string()
                } else {
                    "projection to the source is not mono".to_string()
                },
                ..Witness::default()
            },
        )
    };
    let mut continuous = LawReport::holds("saturation.continuous");
    'outer: for (zname, z) in battery.members() {
        let yz = product_n(&[y.clone(), z.clone()])?;
        let (ss, sampled) = subobject_supply(&yz.object, cfg);
        for s in &ss {
            let lhs = dia(&rel_compose(r, s, x, y, z)?);
            let rhs = rel_compose(r, &dia(s), x, y, z)?;
            if !lhs.leq(&rhs).expect("same ambient") {
                let mut w = inequality_witness(
                    None,
                    &[r, s],
                    &lhs,
                    &rhs,
                    &format!("dia(R;S) not below R;dia(S) over {zname}"),
                );
                w.objects.push(z.clone());
                continuous = LawReport::fails("saturation.continuous", w).mark_sampled(sampled);
                break 'outer;
            }
        }
        continuous.sampled |= sampled;
    }
    let realization = if functional.holds_up() && continuous.holds_up() {
        extract_realization(r, x, y, &xy)
    } else {
        None
    };
    Ok(BrittleMorphismReport {
        functional,
        continuous,
        realization,
    })
}

fn extract_realization(
    r: &MSubobject,
    x: &RelGSet,
    y: &RelGSet,
    xy: &crate::gset::Product,
) -> Option<Morphism> {
    let mut map = Vec::new();
    for v in 0..x.graph().vertex_count() {
        let mut row = vec![usize::MAX; x.carrier(v).len()];
        for idx in r.part(v).iter() {
            let tuple = xy.index_to_tuple(v, idx);
            if row[tuple[0]] != usize::MAX {
                return None;
            }
            row[tuple[0]] = tuple[1];
        }
        if row.iter().any(|t| *t == usize::MAX) {
            return None;
        }
        map.push(row);
    }
    Morphism::from_index_map(x.clone(), y.clone(), map).ok()
}

/// Verdicts for a candidate brittle isomorphism.
#[derive(Clone, Debug)]
pub struct BrittleIsoReport {
    pub mono: bool,
    pub epi_e: bool,
    pub stably_open: LawReport,
    /// Mono, in the left class, and stably open.
    pub brittle: bool,
    /// The inverse, present exactly when the map is an isomorphism.
    pub inverse: Option<Morphism>,
}

pub fn brittle_iso(
    h: &Morphism,
    battery: &ZBattery,
    cfg: &EnumConfig,
) -> Result<BrittleIsoReport, LawsError> {
    let flags = classify(h);
    let openness = openness_report(h, battery, cfg)?;
    let brittle = flags.mono && flags.epi_e && openness.stably_open.holds_up();
    Ok(BrittleIsoReport {
        mono: flags.mono,
        epi_e: flags.epi_e,
        stably_open: openness.stably_open,
        brittle,
        inverse: crate::gset::inverse(h),
    })
}

/// Enumerates the inclusion-shaped monos into `x`: every carrier subset
/// family equipped with every subrelation of the induced one, included
/// into `x`.  Distinguished inclusions are exactly those keeping the full
/// induced relations.
pub fn enumerate_inclusion_monos(x: &RelGSet) -> Result<Vec<Morphism>, GSetError> {
    let mut out = Vec::new();
    for s in enumerate_subobjects(x, crate::gset::DEFAULT_ENUM_BOUND)? {
        let (obj, incl) = sub_object(&s);
        // Enumerate subrelations of the induced relations, edge by edge.
        let rel_sizes: Vec<usize> = (0..obj.graph().edge_count())
            .map(|e| obj.relation(e).len())
            .collect();
        let total_pairs: usize = rel_sizes.iter().sum();
        if total_pairs > 20 {
            return Err(GSetError::TooLarge {
                total: total_pairs,
                bound: 20,
            });
        }
        for mask in 0..1u64 << total_pairs {
            let mut relations = Vec::new();
            let mut offset = 0;
            for e in 0..obj.graph().edge_count() {
                let pairs: Vec<(usize, usize)> = obj
                    .relation(e)
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> (offset + i) & 1 == 1)
                    .map(|(_, p)| *p)
                    .collect();
                offset += rel_sizes[e];
                relations.push(pairs);
            }
            let dom = RelGSet::from_parts(
                obj.graph().clone(),
                (0..obj.graph().vertex_count())
                    .map(|v| obj.carrier(v).to_vec())
                    .collect(),
                relations,
            )?;
            let m = Morphism::from_index_map(dom, x.clone(), incl.index_map().to_vec())
                .expect("shrinking relations keeps the inclusion a morphism");
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gset::{boxm, enumerate_morphisms, tuple_morphism};

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn battery_members_for_each_family() {
        let b1 = ZBattery::new(fixtures::f1_graph());
        assert_eq!(
            b1.members().iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
            ["terminal", "edge:k"]
        );
        // Over the loop graph the singleton-pair member coincides with the
        // terminal object.
        assert_eq!(b1.members()[0].1, b1.members()[1].1);

        let b3 = ZBattery::new(fixtures::f3_graph());
        let zk1 = &b3.members()[1].1;
        let k1 = zk1.graph().edge_index("k1").unwrap();
        let k2 = zk1.graph().edge_index("k2").unwrap();
        assert_eq!(zk1.relation(k1), [(0, 0)]);
        assert!(zk1.relation(k2).is_empty());

        // Over the two-vertex graph with the Empty style, the member for k
        // has singleton carriers at both endpoints.
        let b2 = ZBattery::new(fixtures::f2_graph());
        let zk = &b2.members()[1].1;
        assert_eq!(zk.carrier(0), ["*"]);
        assert_eq!(zk.carrier(1), ["*"]);
        let b2s = ZBattery::with_style(fixtures::f2_graph(), ZCarrierStyle::Singleton);
        assert_eq!(b2s.members()[1].1.carrier(0), ["*"]);
    }

    #[test]
    fn doctrine_laws_hold_on_f1_diagram() {
        let diagram = Diagram::new(
            fixtures::f1_objects(),
            vec![
                Morphism::identity(&fixtures::f1_x1()),
                fixtures::f1_e_x1_to_x1f(),
                fixtures::f1_v_x1e_to_x1(),
            ],
        )
        .unwrap();
        let reports = doctrine_report(&diagram, &cfg()).unwrap();
        assert!(reports.iter().all(LawReport::holds_up), "{reports:?}");
    }

    #[test]
    fn corrupted_image_is_caught_with_witness() {
        // Image minus one point breaks the adjunction.
        let diagram = Diagram::new(
            vec![fixtures::f1_x1()],
            vec![Morphism::identity(&fixtures::f1_x1())],
        )
        .unwrap();
        let corrupt: ImageOp = &|f, s| {
            let honest = direct_image(f, s).unwrap();
            let mut parts = honest.parts().to_vec();
            let first = parts[0].iter().next();
            if let Some(first) = first {
                parts[0].remove(first);
            }
            MSubobject::new(honest.ambient().clone(), parts)
        };
        let reports = doctrine_report_with(&diagram, &cfg(), corrupt).unwrap();
        let adj = reports.iter().find(|r| r.law == "doctrine.adjunction").unwrap();
        assert_eq!(adj.status, Status::Fails);
        let w = adj.witness.as_ref().unwrap();
        // Replay: the recorded subobjects really violate the adjunction
        // under the corrupted image.
        let s = &w.subobjects[0];
        let t = &w.subobjects[1];
        let f = w.morphism.as_ref().unwrap();
        let img = corrupt(f, s);
        let left = img.leq(t).unwrap();
        let right = s.leq(&pullback_sub(f, t).unwrap()).unwrap();
        assert_ne!(left, right);
    }

    #[test]
    fn modal_suite_on_f1_span() {
        let diagram = Diagram::span_of(&fixtures::f1_x1()).unwrap();
        let battery = ZBattery::new(fixtures::f1_graph());
        let reports = modal_law_report(&diagram, &battery, &cfg()).unwrap();
        assert!(reports.iter().all(LawReport::holds_up), "{reports:?}");
    }

    #[test]
    fn mutated_dia_fails_join_law() {
        let diagram = Diagram::new(vec![fixtures::f1_x1f()], vec![]).unwrap();
        let battery = ZBattery::new(fixtures::f1_graph());
        // Complement the honest result.  On the full relation dia sends
        // every nonempty part to everything, so negation collapses those
        // to empty while the empty part blows up to everything: joins
        // with one empty argument no longer commute with the operator.
        let mutated: DiaOp = &|s| dia(s).neg();
        let reports = modal_law_report_with(&diagram, &battery, &cfg(), mutated).unwrap();
        let join = reports.iter().find(|r| r.law == "modal.join").unwrap();
        assert_eq!(join.status, Status::Fails);
        assert!(join.witness.is_some());
    }

    #[test]
    fn projection_is_continuous_but_not_open() {
        let x1 = fixtures::f1_x1();
        let prod = product_n(&[x1.clone(), x1.clone()]).unwrap();
        let pi1 = prod.projections[0].clone();
        let battery = ZBattery::new(fixtures::f1_graph());
        let diagram = Diagram::new(vec![x1.clone()], vec![pi1.clone()]).unwrap();
        let reports = modal_law_report(&diagram, &battery, &cfg()).unwrap();
        let cont = reports.iter().find(|r| r.law == "modal.continuity").unwrap();
        assert!(cont.holds_up());

        let open = openness_report(&pi1, &battery, &cfg()).unwrap();
        assert_eq!(open.open.status, Status::Fails);
        // pi1*(dia {1}) = {(0,0),(0,1)} but dia(pi1*{1}) = {(0,0)}.
        let w = open.open.witness.as_ref().unwrap();
        let s = &w.subobjects[0];
        assert_eq!(*s, fixtures::sub(&x1, &[("a", &["1"])]));
        let lhs = pullback_sub(&pi1, &dia(s)).unwrap();
        let rhs = dia(&pullback_sub(&pi1, s).unwrap());
        assert_eq!(lhs.part_names(0), ["(0,0)", "(0,1)"]);
        assert_eq!(rhs.part_names(0), ["(0,0)"]);
        assert!(open.lem_bf_consistent);
    }

    #[test]
    fn s4_fails_on_x1_with_recorded_witnesses() {
        let diagram = Diagram::new(vec![fixtures::f1_x1()], vec![]).unwrap();
        let reports = optional_law_report(&diagram, None, &cfg()).unwrap();
        let x1 = fixtures::f1_x1();
        let inc = reports
            .iter()
            .find(|r| r.law == "optional.s4-increasing")
            .unwrap();
        assert_eq!(inc.status, Status::Fails);
        assert_eq!(
            inc.witness.as_ref().unwrap().subobjects[0],
            fixtures::sub(&x1, &[("a", &["0"])])
        );
        let idem = reports
            .iter()
            .find(|r| r.law == "optional.s4-idempotence")
            .unwrap();
        assert_eq!(
            idem.witness.as_ref().unwrap().subobjects[0],
            fixtures::sub(&x1, &[("a", &["1"])])
        );
        // The closure failure replays by hand: {1} is not below
        // dia({1}) = {0}.
        let s = fixtures::sub(&x1, &[("a", &["1"])]);
        assert!(!s.leq(&dia(&s)).unwrap());
        assert_eq!(dia(&s), fixtures::sub(&x1, &[("a", &["0"])]));
    }

    #[test]
    fn variable_independence_fails_on_w() {
        let diagram = Diagram::new(vec![fixtures::f3_w()], vec![]).unwrap();
        let reports = optional_law_report(&diagram, None, &cfg()).unwrap();
        let vi = reports
            .iter()
            .find(|r| r.law == "optional.variable-independence")
            .unwrap();
        assert_eq!(vi.status, Status::Fails);
        let w = vi.witness.as_ref().unwrap();
        let x = fixtures::f3_w();
        assert_eq!(w.subobjects[0], fixtures::sub(&x, &[("a", &["1"])]));
        assert_eq!(w.subobjects[1], fixtures::sub(&x, &[("a", &["2"])]));
        assert_eq!(
            w.element,
            Some(("a".to_string(), "(0,0)".to_string()))
        );
    }

    #[test]
    fn lax_requires_table_and_reports_missing_identity() {
        let diagram = Diagram::new(vec![fixtures::f1_x1()], vec![]).unwrap();
        assert_eq!(
            lax_report(&diagram, None).err().unwrap(),
            LawsError::MissingCompositionTable
        );
        let mut table = CompositionTable::default();
        table
            .composites
            .insert(("k".to_string(), "k".to_string()), "k".to_string());
        let reports = lax_report(&diagram, Some(&table)).unwrap();
        assert_eq!(reports[0].status, Status::Fails);
        assert!(reports[0]
            .witness
            .as_ref()
            .unwrap()
            .note
            .contains("no identity edge"));
    }

    #[test]
    fn rel_compose_matches_hand_computation() {
        let x1 = fixtures::f1_x1();
        let xx = product_n(&[x1.clone(), x1.clone()]).unwrap();
        // Graph of the identity composed with T gives T back.
        let id_graph = crate::gset::graph_of(&Morphism::identity(&x1)).unwrap();
        for t in enumerate_subobjects(&xx.object, 14).unwrap() {
            let composed = rel_compose(&id_graph, &t, &x1, &x1, &x1).unwrap();
            assert_eq!(composed, t);
        }
        // The swap relation picks elements whose partner lies in S.
        let swap = fixtures::sub(&xx.object, &[("a", &["(0,1)", "(1,0)"])]);
        let terminal = RelGSet::terminal(fixtures::f1_graph());
        let x1t = product_n(&[x1.clone(), terminal.clone()]).unwrap();
        let s = fixtures::sub(&x1t.object, &[("a", &["(0,*)"])]);
        let composed = rel_compose(&swap, &s, &x1, &x1, &terminal).unwrap();
        assert_eq!(composed.part_names(0), ["(1,*)"]);
    }

    #[test]
    fn swap_relation_is_functional_but_not_continuous() {
        let x1 = fixtures::f1_x1();
        let xx = product_n(&[x1.clone(), x1.clone()]).unwrap();
        let swap = fixtures::sub(&xx.object, &[("a", &["(0,1)", "(1,0)"])]);
        let battery = ZBattery::new(fixtures::f1_graph());
        let report = brittle_morphism(&swap, &x1, &x1, &battery, &cfg()).unwrap();
        assert!(report.functional.holds_up());
        assert_eq!(report.continuous.status, Status::Fails);
        assert!(report.realization.is_none());
    }

    #[test]
    fn graphs_of_morphisms_are_functional_and_continuous() {
        let x1 = fixtures::f1_x1();
        let x1f = fixtures::f1_x1f();
        let battery = ZBattery::new(fixtures::f1_graph());
        for h in enumerate_morphisms(&x1, &x1f).unwrap() {
            let g = crate::gset::graph_of(&h).unwrap();
            let report = brittle_morphism(&g, &x1, &x1f, &battery, &cfg()).unwrap();
            assert!(report.functional.holds_up());
            assert!(report.continuous.holds_up(), "graph of {h}");
            assert_eq!(report.realization, Some(h));
        }
    }

    #[test]
    fn induced_inclusions_are_brittle_subspaces_and_sparse_ones_are_not() {
        let x1 = fixtures::f1_x1();
        let battery = ZBattery::new(fixtures::f1_graph());
        let s = fixtures::sub(&x1, &[("a", &["0", "1"])]);
        let (_, incl) = sub_object(&s);
        assert!(is_brittle_subspace(&incl, &battery, &cfg())
            .unwrap()
            .holds_up());
        // The identity-carrier mono X1E -> X1 drops the relation pair, and
        // the subspace equation fails on S = {1} over the edge member.
        let v = fixtures::f1_v_x1e_to_x1();
        let r = is_brittle_subspace(&v, &battery, &cfg()).unwrap();
        assert_eq!(r.status, Status::Fails);
        // Not-a-mono is rejected.
        let x1f = fixtures::f1_x1f();
        let collapse =
            Morphism::from_index_map(x1f.clone(), x1f.clone(), vec![vec![0, 0]]).unwrap();
        assert_eq!(
            is_brittle_subspace(&collapse, &battery, &cfg()).err().unwrap(),
            LawsError::NotMono
        );
    }

    #[test]
    fn brittle_subspace_failure_replays_from_spec_example() {
        // Over Z = the edge member for k, S = {(1,*)} in X1E x Z has empty
        // dia, while the pullback side contains (0,*).
        let x1 = fixtures::f1_x1();
        let x1e = fixtures::f1_x1e();
        let v = fixtures::f1_v_x1e_to_x1();
        let battery = ZBattery::new(fixtures::f1_graph());
        let z = &battery.members()[1].1;
        let mz = product_morphism(&[v.clone(), Morphism::identity(z)]).unwrap();
        let az = product_n(&[x1e.clone(), z.clone()]).unwrap();
        let s = fixtures::sub(&az.object, &[("a", &["(1,*)"])]);
        let lhs = dia(&s);
        assert!(lhs.is_empty());
        let rhs = pullback_sub(&mz, &dia(&direct_image(&mz, &s).unwrap())).unwrap();
        assert_eq!(rhs.part_names(0), ["(0,*)"]);
        let _ = x1;
    }

    #[test]
    fn openness_of_identity_and_barcan_equivalence() {
        let x1 = fixtures::f1_x1();
        let battery = ZBattery::new(fixtures::f1_graph());
        let id = Morphism::identity(&x1);
        let r = openness_report(&id, &battery, &cfg()).unwrap();
        assert!(r.open.holds_up());
        assert!(r.stably_open.holds_up());
        assert!(r.barcan.holds_up());
        assert!(r.lem_bf_consistent);

        // e: X1 -> X1F is mono and pointwise surjective; open fails via
        // S = {0}: e*(dia {0}) = {0,1} but dia(e*{0}) is empty.
        let e = fixtures::f1_e_x1_to_x1f();
        let re = openness_report(&e, &battery, &cfg()).unwrap();
        assert_eq!(re.open.status, Status::Fails);
        assert!(re.lem_bf_consistent);
        let x1f = fixtures::f1_x1f();
        let s0 = fixtures::sub(&x1f, &[("a", &["0"])]);
        assert_eq!(
            pullback_sub(&e, &dia(&s0)).unwrap(),
            fixtures::sub(&x1, &[("a", &["0", "1"])])
        );
        assert!(dia(&pullback_sub(&e, &s0).unwrap()).is_empty());
    }

    #[test]
    fn brittle_iso_matches_iso_on_f1() {
        let battery = ZBattery::new(fixtures::f1_graph());
        for x in fixtures::f1_objects() {
            for y in fixtures::f1_objects() {
                for h in enumerate_morphisms(&x, &y).unwrap() {
                    let r = brittle_iso(&h, &battery, &cfg()).unwrap();
                    assert_eq!(
                        r.brittle,
                        classify(&h).iso,
                        "brittle-iso disagreement on {h}"
                    );
                    assert_eq!(r.inverse.is_some(), classify(&h).iso);
                }
            }
        }
    }

    #[test]
    fn box_is_dual_on_fixture_w() {
        let w = fixtures::f3_w();
        for s in enumerate_subobjects(&w, 14).unwrap() {
            assert_eq!(boxm(&s), dia(&s.neg()).neg());
        }
        // tuple_morphism pairing consistency: diagonal lands in the graph
        // of the identity.
        let x1 = fixtures::f1_x1();
        let diag = tuple_morphism(&x1, &[Morphism::identity(&x1), Morphism::identity(&x1)])
            .unwrap();
        assert_eq!(
            crate::gset::image(&diag),
            crate::gset::graph_of(&Morphism::identity(&x1)).unwrap()
        );
    }
}
