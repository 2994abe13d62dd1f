#![cfg_attr(not(test), no_std)]
//! Finite relational G-sets and their counterpart modalities.
//!
//! A *relational G-set* over a finite graph G assigns a finite carrier to
//! every vertex and a binary relation to every edge.  These objects form a
//! category with finite limits, a stable image factorization whose
//! subobjects carry Boolean algebra structure, and a possibility operator
//! on subobjects read off from the edge relations.  This crate computes
//! all of that structure explicitly and layers on top of it:
//!
//! * law suites that certify (or refute, with replayable witnesses) the
//!   lattice, adjunction, and modal-interaction laws an instance enjoys
//!   ([`laws`]),
//! * quotients, disjoint unions, and the triple factorization of an
//!   arbitrary map ([`colim`]),
//! * a typed modal first-order language with box abstraction and a
//!   substitution operator that never enters box bodies ([`syntax`]),
//! * evaluation of that language inside a relational G-set interpretation
//!   ([`semantics`]),
//! * a positional proof checker for the Hilbert-style calculus of the
//!   language ([`proof`]),
//! * a harness relating families of classical first-order models linked by
//!   counterpart relations to the G-set semantics ([`harness`]).
//!
//! Everything is deterministic: carriers keep their declared order, subsets
//! are bitsets over that order, and all maps are B-tree based, so equal
//! inputs produce byte-identical reports.  The crate is `no_std` + `alloc`;
//! IO and file formats live in the companion `relg` crate.

extern crate alloc;

pub mod bits;
pub mod colim;
pub mod fixtures;
pub mod gset;
pub mod harness;
pub mod laws;
pub mod proof;
pub mod report;
pub mod semantics;
pub mod syntax;
