//! The two-layer formula language.
//!
//! The inner layer describes facts and explicit beliefs: atoms, negation,
//! conjunction, and the graded explicit-belief operator `B{i,k}` (an agent
//! stores a formula with at least the given weight). The outer layer adds the
//! graded distributed-belief box `D{J,k}` over nonempty agent groups. A box
//! can never occur inside an explicit-belief body; the types enforce that.
//!
//! Derived connectives (`->`, `|`, `<->`, `true`/`false` shorthands at the
//! surface, `Dhat`, `disagree`) are expanded by the parser and the builder
//! methods, so everything past this module handles only `~`, `&`, `B`, `D`
//! and the two constants.

mod parse;
mod print;

pub use parse::{parse, parse_inner, parse_inner_with_agents, parse_with_agents, ParseError};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::agents::{Agent, Group};
use crate::grades::Grade;

/// An atomic proposition name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: impl AsRef<str>) -> Self {
        Atom(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Atom({})", self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::new(s)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Atom::new)
    }
}

/// True when `name` lexes as a plain identifier and is not a reserved word,
/// so it can round-trip through the concrete syntax.
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "true" | "false" | "disagree")
}

/// True when `name` can appear where an agent is expected (identifier or a
/// bare nonnegative integer, matching the lexer).
pub fn is_valid_agent_name(name: &str) -> bool {
    is_valid_atom_name(name) || (!name.is_empty() && name.chars().all(|c| c.is_ascii_digit()))
}

/// A fact/explicit-belief layer formula.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum InnerFormula {
    Top,
    Bot,
    Atom(Atom),
    Not(Arc<InnerFormula>),
    And(Arc<InnerFormula>, Arc<InnerFormula>),
    Tri {
        agent: Agent,
        grade: Grade,
        body: Arc<InnerFormula>,
    },
}

impl InnerFormula {
    pub fn atom(name: impl AsRef<str>) -> Arc<Self> {
        Arc::new(InnerFormula::Atom(Atom::new(name)))
    }

    pub fn top() -> Arc<Self> {
        Arc::new(InnerFormula::Top)
    }

    pub fn bot() -> Arc<Self> {
        Arc::new(InnerFormula::Bot)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(body: Arc<Self>) -> Arc<Self> {
        Arc::new(InnerFormula::Not(body))
    }

    pub fn and(a: Arc<Self>, b: Arc<Self>) -> Arc<Self> {
        Arc::new(InnerFormula::And(a, b))
    }

    /// Explicit-belief operator; the grade must be at least 1.
    pub fn tri(agent: Agent, grade: Grade, body: Arc<Self>) -> Arc<Self> {
        assert!(
            grade >= Grade::ONE,
            "explicit-belief grade must be at least 1"
        );
        Arc::new(InnerFormula::Tri { agent, grade, body })
    }

    fn node_count(&self) -> usize {
        match self {
            InnerFormula::Top | InnerFormula::Bot | InnerFormula::Atom(_) => 1,
            InnerFormula::Not(x) => 1 + x.node_count(),
            InnerFormula::And(a, b) => 1 + a.node_count() + b.node_count(),
            InnerFormula::Tri { body, .. } => 1 + body.node_count(),
        }
    }

    fn connective_count(&self) -> usize {
        match self {
            InnerFormula::Top | InnerFormula::Bot | InnerFormula::Atom(_) => 0,
            InnerFormula::Not(x) => 1 + x.connective_count(),
            InnerFormula::And(a, b) => 1 + a.connective_count() + b.connective_count(),
            InnerFormula::Tri { body, .. } => 1 + body.connective_count(),
        }
    }
}

/// A distributed-belief layer formula. Box-free formulas are always kept in
/// the `Inner` embedding: the constructors push `~` and `&` inside it, so
/// structural equality doubles as equality of the written form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum OuterFormula {
    Inner(Arc<InnerFormula>),
    Not(Arc<OuterFormula>),
    And(Arc<OuterFormula>, Arc<OuterFormula>),
    Box {
        group: Group,
        grade: u64,
        body: Arc<OuterFormula>,
    },
}

impl OuterFormula {
    pub fn lift(inner: Arc<InnerFormula>) -> Self {
        OuterFormula::Inner(inner)
    }

    pub fn atom(name: impl AsRef<str>) -> Self {
        OuterFormula::Inner(InnerFormula::atom(name))
    }

    pub fn top() -> Self {
        OuterFormula::Inner(InnerFormula::top())
    }

    pub fn bot() -> Self {
        OuterFormula::Inner(InnerFormula::bot())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        match self {
            OuterFormula::Inner(a) => OuterFormula::Inner(InnerFormula::neg(a)),
            other => OuterFormula::Not(Arc::new(other)),
        }
    }

    pub fn and(self, rhs: Self) -> Self {
        match (self, rhs) {
            (OuterFormula::Inner(a), OuterFormula::Inner(b)) => {
                OuterFormula::Inner(InnerFormula::and(a, b))
            }
            (a, b) => OuterFormula::And(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn tri(agent: Agent, grade: Grade, body: Arc<InnerFormula>) -> Self {
        OuterFormula::Inner(InnerFormula::tri(agent, grade, body))
    }

    pub fn boxed(group: Group, grade: u64, body: Self) -> Self {
        OuterFormula::Box {
            group,
            grade,
            body: Arc::new(body),
        }
    }

    pub fn imp(self, rhs: Self) -> Self {
        self.and(rhs.neg()).neg()
    }

    pub fn or(self, rhs: Self) -> Self {
        self.neg().and(rhs.neg()).neg()
    }

    pub fn iff(self, rhs: Self) -> Self {
        self.clone().imp(rhs.clone()).and(rhs.imp(self))
    }

    /// `Dhat{J,k}`: compatibility with the group's pooled beliefs.
    pub fn diamond(group: Group, grade: u64, body: Self) -> Self {
        OuterFormula::boxed(group, grade, body.neg()).neg()
    }

    /// `disagree{J,k}`: the group's pooled beliefs force falsum within any
    /// removal of importance below `k`. Requires `k >= 1`.
    pub fn disagree(group: Group, strength: u64) -> Self {
        assert!(strength >= 1, "disagreement strength must be at least 1");
        OuterFormula::boxed(group, strength - 1, OuterFormula::bot())
    }

    /// Uniform view across the two layers, for rule-driven code.
    pub fn shape(&self) -> Shape<'_> {
        match self {
            OuterFormula::Inner(a) => match a.as_ref() {
                InnerFormula::Top => Shape::Top,
                InnerFormula::Bot => Shape::Bot,
                InnerFormula::Atom(p) => Shape::Atom(p),
                InnerFormula::Not(x) => Shape::Not(OuterFormula::Inner(x.clone())),
                InnerFormula::And(x, y) => Shape::And(
                    OuterFormula::Inner(x.clone()),
                    OuterFormula::Inner(y.clone()),
                ),
                InnerFormula::Tri { agent, grade, body } => Shape::Tri {
                    agent,
                    grade: *grade,
                    body,
                },
            },
            OuterFormula::Not(x) => Shape::Not(x.as_ref().clone()),
            OuterFormula::And(x, y) => Shape::And(x.as_ref().clone(), y.as_ref().clone()),
            OuterFormula::Box { group, grade, body } => Shape::Box {
                group,
                grade: *grade,
                body,
            },
        }
    }

    /// The embedded inner formula, when the formula is box-free.
    pub fn as_inner(&self) -> Option<&Arc<InnerFormula>> {
        match self {
            OuterFormula::Inner(a) => Some(a),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            OuterFormula::Inner(a) => a.node_count(),
            OuterFormula::Not(x) => 1 + x.node_count(),
            OuterFormula::And(a, b) => 1 + a.node_count() + b.node_count(),
            OuterFormula::Box { body, .. } => 1 + body.node_count(),
        }
    }

    /// Number of connectives and modalities (`~`, `&`, `B`, `D`); the measure
    /// that shrinks along every tableau branch.
    pub fn connective_count(&self) -> usize {
        match self {
            OuterFormula::Inner(a) => a.connective_count(),
            OuterFormula::Not(x) => 1 + x.connective_count(),
            OuterFormula::And(a, b) => 1 + a.connective_count() + b.connective_count(),
            OuterFormula::Box { body, .. } => 1 + body.connective_count(),
        }
    }

    /// Maximum nesting depth of `D` boxes.
    pub fn modal_depth(&self) -> usize {
        match self {
            OuterFormula::Inner(_) => 0,
            OuterFormula::Not(x) => x.modal_depth(),
            OuterFormula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            OuterFormula::Box { body, .. } => 1 + body.modal_depth(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for f in subformula_closure(self) {
            if let Shape::Atom(p) = f.shape() {
                out.insert(p.clone());
            }
        }
        out
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        for f in subformula_closure(self) {
            match f.shape() {
                Shape::Tri { agent, .. } => {
                    out.insert(agent.clone());
                }
                Shape::Box { group, .. } => out.extend(group.members().cloned()),
                _ => {}
            }
        }
        out
    }
}

/// One level of structure, with inner formulas transparently lifted.
pub enum Shape<'a> {
    Top,
    Bot,
    Atom(&'a Atom),
    Not(OuterFormula),
    And(OuterFormula, OuterFormula),
    Tri {
        agent: &'a Agent,
        grade: Grade,
        body: &'a Arc<InnerFormula>,
    },
    Box {
        group: &'a Group,
        grade: u64,
        body: &'a Arc<OuterFormula>,
    },
}

/// All subformulas of `phi`, itself included, with inner subformulas (those
/// inside explicit-belief bodies too) lifted into the outer layer.
pub fn subformula_closure(phi: &OuterFormula) -> BTreeSet<OuterFormula> {
    let mut out = BTreeSet::new();
    collect(phi, &mut out);
    out
}

fn collect(phi: &OuterFormula, out: &mut BTreeSet<OuterFormula>) {
    if !out.insert(phi.clone()) {
        return;
    }
    match phi.shape() {
        Shape::Top | Shape::Bot | Shape::Atom(_) => {}
        Shape::Not(x) => collect(&x, out),
        Shape::And(a, b) => {
            collect(&a, out);
            collect(&b, out);
        }
        Shape::Tri { body, .. } => collect(&OuterFormula::Inner(body.clone()), out),
        Shape::Box { body, .. } => collect(body, out),
    }
}

/// The inner formulas occurring anywhere in `phi` (box-free subformulas and
/// everything inside explicit-belief bodies). Candidate belief material.
pub fn inner_subformulas(phi: &OuterFormula) -> BTreeSet<Arc<InnerFormula>> {
    subformula_closure(phi)
        .into_iter()
        .filter_map(|f| match f {
            OuterFormula::Inner(a) => Some(a),
            _ => None,
        })
        .collect()
}
