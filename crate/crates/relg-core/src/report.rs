//! Structured verdicts for law checks.
//!
//! Every failing report carries a [`Witness`] with enough concrete data
//! (objects, map, subobject arguments, separating element, both sides) to
//! replay the violated law through the operations in [`crate::gset`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::gset::{MSubobject, Morphism, RelGSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Holds,
    Fails,
}

/// Concrete data reproducing a law violation.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Witness {
    /// Auxiliary objects the law ranges over (for example a battery member).
    pub objects: Vec<RelGSet>,
    /// The map the law is about, when there is one.
    pub morphism: Option<Morphism>,
    /// Subobject arguments in the law's argument order.
    pub subobjects: Vec<MSubobject>,
    /// A `(vertex, element)` separating the two sides.
    pub element: Option<(String, String)>,
    /// Left-hand side as computed.
    pub lhs: Option<MSubobject>,
    /// Right-hand side as computed.
    pub rhs: Option<MSubobject>,
    /// What inequality the data exhibits.
    pub note: String,
}

#[derive(Clone, PartialEq, Debug)]
pub struct LawReport {
    pub law: String,
    pub status: Status,
    /// True when the check ran on a seeded sample instead of the full
    /// subobject enumeration.
    pub sampled: bool,
    pub witness: Option<Witness>,
}

impl LawReport {
    pub fn holds(law: impl Into<String>) -> LawReport {
        LawReport {
            law: law.into(),
            status: Status::Holds,
            sampled: false,
            witness: None,
        }
    }

    pub fn fails(law: impl Into<String>, witness: Witness) -> LawReport {
        LawReport {
            law: law.into(),
            status: Status::Fails,
            sampled: false,
            witness: Some(witness),
        }
    }

    pub fn mark_sampled(mut self, sampled: bool) -> LawReport {
        self.sampled = sampled;
        self
    }

    pub fn holds_up(&self) -> bool {
        self.status == Status::Holds
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}",
            self.law,
            match self.status {
                Status::Holds => "holds",
                Status::Fails => "fails",
            }
        )?;
        if self.sampled {
            write!(f, " [sampled]")?;
        }
        if let Some(w) = &self.witness {
            if !w.note.is_empty() {
                write!(f, " ({})", w.note)?;
            }
            for (i, s) in w.subobjects.iter().enumerate() {
                write!(f, "\n  S{}: {}", i + 1, s)?;
            }
            if let Some(m) = &w.morphism {
                write!(f, "\n  map: {m}")?;
            }
            if let Some((v, e)) = &w.element {
                write!(f, "\n  at: {v}.{e}")?;
            }
            if let Some(l) = &w.lhs {
                write!(f, "\n  lhs: {l}")?;
            }
            if let Some(r) = &w.rhs {
                write!(f, "\n  rhs: {r}")?;
            }
        }
        Ok(())
    }
}
