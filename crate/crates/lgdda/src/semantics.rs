//! Belief-base semantics.
//!
//! A state couples one graded belief base per agent with a valuation of the
//! environment. A model is a designated state plus a finite context of
//! candidate states. A group's pooled base is the weight-sum of its members'
//! bases; a context state is the more implausible for the group the more
//! pooled weight it falsifies. The distributed-belief box quantifies over
//! context states within the given implausibility budget.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::agents::{Agent, Group};
use crate::formula::{Atom, InnerFormula, OuterFormula, Shape};
use crate::grades::{grade_sum, min_star, Grade};

/// A finite-support mapping from explicit-belief formulas to positive weights.
/// Absent formulas carry weight 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct BeliefBase {
    entries: BTreeMap<Arc<InnerFormula>, Grade>,
}

impl BeliefBase {
    pub fn new() -> Self {
        BeliefBase::default()
    }

    /// Builds a base from weighted formulas; zero weights are dropped and
    /// duplicate formulas keep their maximum weight.
    pub fn from_entries(entries: impl IntoIterator<Item = (Arc<InnerFormula>, Grade)>) -> Self {
        let mut base = BeliefBase::new();
        for (formula, grade) in entries {
            base.insert(formula, grade);
        }
        base
    }

    pub fn insert(&mut self, formula: Arc<InnerFormula>, grade: Grade) {
        if grade >= Grade::ONE {
            let slot = self.entries.entry(formula).or_insert(Grade::ZERO);
            *slot = (*slot).max(grade);
        }
    }

    pub fn weight(&self, formula: &InnerFormula) -> Grade {
        self.entries.get(formula).copied().unwrap_or(Grade::ZERO)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Arc<InnerFormula>, Grade)> + '_ {
        self.entries.iter().map(|(f, g)| (f, *g))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Total weight of the base; the natural exhaustion bound for
    /// disagreement probing.
    pub fn total_weight(&self) -> Grade {
        grade_sum(self.entries.values().copied())
    }
}

impl FromIterator<(Arc<InnerFormula>, Grade)> for BeliefBase {
    fn from_iter<I: IntoIterator<Item = (Arc<InnerFormula>, Grade)>>(iter: I) -> Self {
        BeliefBase::from_entries(iter)
    }
}

/// One belief base per declared agent, plus the actual environment.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct State {
    bases: BTreeMap<Agent, BeliefBase>,
    valuation: BTreeSet<Atom>,
}

impl State {
    /// A state over the declared agents; agents without an explicit base get
    /// an empty one. Bases for undeclared agents are rejected.
    pub fn new(
        agents: &BTreeSet<Agent>,
        bases: impl IntoIterator<Item = (Agent, BeliefBase)>,
        valuation: impl IntoIterator<Item = Atom>,
    ) -> Result<Self, SemanticsError> {
        let mut map: BTreeMap<Agent, BeliefBase> = agents
            .iter()
            .map(|a| (a.clone(), BeliefBase::new()))
            .collect();
        for (agent, base) in bases {
            match map.get_mut(&agent) {
                Some(slot) => *slot = base,
                None => return Err(SemanticsError::UndeclaredAgent(agent)),
            }
        }
        Ok(State {
            bases: map,
            valuation: valuation.into_iter().collect(),
        })
    }

    pub fn base(&self, agent: &Agent) -> &BeliefBase {
        static EMPTY: std::sync::OnceLock<BeliefBase> = std::sync::OnceLock::new();
        self.bases
            .get(agent)
            .unwrap_or_else(|| EMPTY.get_or_init(BeliefBase::new))
    }

    pub fn bases(&self) -> impl Iterator<Item = (&Agent, &BeliefBase)> + '_ {
        self.bases.iter()
    }

    pub fn valuation(&self) -> &BTreeSet<Atom> {
        &self.valuation
    }

    pub fn satisfies_atom(&self, atom: &Atom) -> bool {
        self.valuation.contains(atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("agent not declared: {0}")]
    UndeclaredAgent(Agent),
}

/// Truth of an explicit-belief layer formula at a state.
pub fn eval_state(state: &State, formula: &InnerFormula) -> bool {
    match formula {
        InnerFormula::Top => true,
        InnerFormula::Bot => false,
        InnerFormula::Atom(p) => state.satisfies_atom(p),
        InnerFormula::Not(x) => !eval_state(state, x),
        InnerFormula::And(a, b) => eval_state(state, a) && eval_state(state, b),
        InnerFormula::Tri { agent, grade, body } => state.base(agent).weight(body) >= *grade,
    }
}

/// The group's pooled base: per formula, the sum of the members' weights.
pub fn merged_base(state: &State, group: &Group) -> BeliefBase {
    let mut merged: BTreeMap<Arc<InnerFormula>, Grade> = BTreeMap::new();
    for agent in group.members() {
        for (formula, grade) in state.base(agent).support() {
            let slot = merged.entry(formula.clone()).or_insert(Grade::ZERO);
            *slot = *slot + grade;
        }
    }
    BeliefBase { entries: merged }
}

/// How implausible `target` is for `group` at `state`: the pooled weight of
/// everything the group stores that `target` falsifies. Only the pooled
/// support matters; absent formulas contribute nothing.
pub fn implausibility(state: &State, target: &State, group: &Group) -> Grade {
    grade_sum(
        merged_base(state, group)
            .support()
            .filter(|(formula, _)| !eval_state(target, formula))
            .map(|(_, grade)| grade),
    )
}

/// A designated state together with its finite context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Magbm {
    pub agents: BTreeSet<Agent>,
    pub designated: State,
    pub context: Vec<State>,
}

impl Magbm {
    pub fn new(agents: BTreeSet<Agent>, designated: State, context: Vec<State>) -> Self {
        Magbm {
            agents,
            designated,
            context,
        }
    }
}

/// Truth of a formula at the model's designated state.
pub fn check(model: &Magbm, formula: &OuterFormula) -> bool {
    check_at(model, &model.designated, formula)
}

fn check_at(model: &Magbm, state: &State, formula: &OuterFormula) -> bool {
    match formula.shape() {
        Shape::Top => true,
        Shape::Bot => false,
        Shape::Atom(p) => state.satisfies_atom(p),
        Shape::Not(x) => !check_at(model, state, &x),
        Shape::And(a, b) => check_at(model, state, &a) && check_at(model, state, &b),
        Shape::Tri { agent, grade, body } => state.base(agent).weight(body) >= grade,
        Shape::Box { group, grade, body } => model
            .context
            .iter()
            .filter(|s| implausibility(state, s, group) <= Grade::Finite(grade))
            .all(|s| check_at(model, s, body)),
    }
}

/// The least implausibility any context state has for the group at the
/// designated state; `w` when the context is empty. For every `k >= 1`,
/// `disagree{J,k}` holds in the model exactly when this is at least `k`.
pub fn disagreement_degree(model: &Magbm, group: &Group) -> Grade {
    min_star(
        model
            .context
            .iter()
            .map(|s| implausibility(&model.designated, s, group)),
    )
}

/// The committee model used across the test suite: four evaluators, a shared
/// funding rule, split opinions on the two quality criteria, and a context of
/// all eight environments with empty bases.
#[cfg(test)]
pub(crate) fn committee(k: [u64; 5]) -> Magbm {
    let g = Grade::Finite;
    let ags: BTreeSet<Agent> = ["Ann", "Bob", "Cath", "John"].iter().map(Agent::new).collect();
    let base = |entries: &[(&str, Grade)]| {
        BeliefBase::from_entries(
            entries
                .iter()
                .map(|(text, w)| (crate::formula::parse_inner(text).unwrap(), *w)),
        )
    };
    let rule = "in <-> (id & hi)";
    let bases = [
        (Agent::new("Ann"), base(&[(rule, g(k[0])), ("id", g(k[1]))])),
        (Agent::new("Bob"), base(&[(rule, g(k[0])), ("hi", g(k[2]))])),
        (Agent::new("Cath"), base(&[(rule, g(k[0])), ("~id", g(k[3]))])),
        (Agent::new("John"), base(&[(rule, g(k[0])), ("~hi", g(k[4]))])),
    ];
    let designated = State::new(&ags, bases, [Atom::new("id"), Atom::new("hi")]).unwrap();
    let mut context = Vec::new();
    for mask in 0u8..8 {
        let mut val = Vec::new();
        for (bit, name) in ["in", "id", "hi"].iter().enumerate() {
            if mask & (1 << bit) != 0 {
                val.push(Atom::new(name));
            }
        }
        context.push(State::new(&ags, [], val).unwrap());
    }
    Magbm::new(ags, designated, context)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn ag(s: &str) -> Agent {
        Agent::new(s)
    }

    fn agents(names: &[&str]) -> BTreeSet<Agent> {
        names.iter().map(Agent::new).collect()
    }

    fn group(names: &[&str]) -> Group {
        Group::new(names.iter().map(Agent::new)).unwrap()
    }

    fn base(entries: &[(&str, Grade)]) -> BeliefBase {
        BeliefBase::from_entries(
            entries
                .iter()
                .map(|(text, g)| (crate::formula::parse_inner(text).unwrap(), *g)),
        )
    }

    fn g(n: u64) -> Grade {
        Grade::Finite(n)
    }

    #[test]
    fn base_drops_zero_entries() {
        let b = base(&[("p", g(0)), ("q", g(2))]);
        assert_eq!(b.len(), 1);
        assert_eq!(b.weight(&InnerFormula::atom("p")), g(0));
        assert_eq!(b.weight(&InnerFormula::atom("q")), g(2));
    }

    #[test]
    fn eval_triangle_thresholds() {
        let ags = agents(&["1"]);
        let s = State::new(&ags, [(ag("1"), base(&[("p", g(2))]))], []).unwrap();
        assert!(eval_state(&s, &crate::formula::parse_inner("B{1,2} p").unwrap()));
        assert!(!eval_state(&s, &crate::formula::parse_inner("B{1,3} p").unwrap()));
    }

    #[test]
    fn eval_boolean_clauses() {
        let ags = agents(&["1"]);
        let s = State::new(&ags, [], [Atom::new("p")]).unwrap();
        assert!(!eval_state(&s, &crate::formula::parse_inner("~p & q").unwrap()));
        assert!(eval_state(&s, &crate::formula::parse_inner("p | q").unwrap()));
    }

    #[test]
    fn merged_base_sums_disjoint_supports() {
        let ags = agents(&["Ann", "Cath"]);
        let s = State::new(
            &ags,
            [
                (ag("Ann"), base(&[("id", g(1))])),
                (ag("Cath"), base(&[("~id", g(1))])),
            ],
            [],
        )
        .unwrap();
        let m = merged_base(&s, &group(&["Ann", "Cath"]));
        assert_eq!(m.weight(&crate::formula::parse_inner("id").unwrap()), g(1));
        assert_eq!(m.weight(&crate::formula::parse_inner("~id").unwrap()), g(1));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn merged_base_adds_shared_support() {
        let ags = agents(&["1", "2"]);
        let s = State::new(
            &ags,
            [
                (ag("1"), base(&[("p", g(2))])),
                (ag("2"), base(&[("p", g(3))])),
            ],
            [],
        )
        .unwrap();
        assert_eq!(
            merged_base(&s, &group(&["1", "2"])).weight(&InnerFormula::atom("p")),
            g(5)
        );
    }

    #[test]
    fn merged_base_omega_absorbs() {
        let ags = agents(&["1", "2"]);
        let s = State::new(
            &ags,
            [
                (ag("1"), base(&[("p", Grade::Omega)])),
                (ag("2"), base(&[("p", g(1))])),
            ],
            [],
        )
        .unwrap();
        assert_eq!(
            merged_base(&s, &group(&["1", "2"])).weight(&InnerFormula::atom("p")),
            Grade::Omega
        );
    }

    #[test]
    fn implausibility_counts_falsified_weight() {
        let ags = agents(&["Ann", "Cath"]);
        let s = State::new(
            &ags,
            [
                (ag("Ann"), base(&[("id", g(1))])),
                (ag("Cath"), base(&[("~id", g(1))])),
            ],
            [],
        )
        .unwrap();
        let target = State::new(&ags, [], [Atom::new("id")]).unwrap();
        // exactly ~id is falsified at a target satisfying id
        assert_eq!(implausibility(&s, &target, &group(&["Ann", "Cath"])), g(1));
    }

    #[test]
    fn implausibility_of_empty_bases_is_zero() {
        let ags = agents(&["1"]);
        let s = State::new(&ags, [], []).unwrap();
        let t = State::new(&ags, [], [Atom::new("p")]).unwrap();
        assert_eq!(implausibility(&s, &t, &group(&["1"])), g(0));
    }

    #[test]
    fn implausibility_omega_summand() {
        let ags = agents(&["1"]);
        let s = State::new(&ags, [(ag("1"), base(&[("p", Grade::Omega)]))], []).unwrap();
        let t = State::new(&ags, [], []).unwrap();
        assert_eq!(implausibility(&s, &t, &group(&["1"])), Grade::Omega);
    }

    #[test]
    fn box_over_empty_context_is_vacuous() {
        let ags = agents(&["1"]);
        let s = State::new(&ags, [], []).unwrap();
        let m = Magbm::new(ags, s, vec![]);
        assert!(check(&m, &parse("D{1,0} false").unwrap()));
        assert_eq!(disagreement_degree(&m, &group(&["1"])), Grade::Omega);
    }

    #[test]
    fn committee_group_verdicts() {
        let m = committee([1, 1, 1, 1, 1]);
        assert!(check(&m, &parse("D{Ann Bob,0} in").unwrap()));
        assert!(check(&m, &parse("D{Cath John,0} ~in").unwrap()));
        // beyond their strength, the belief gives out
        assert!(!check(&m, &parse("D{Ann Bob,1} in").unwrap()));
    }

    #[test]
    fn committee_disagreement_degrees() {
        let m = committee([1, 1, 1, 1, 1]);
        assert_eq!(
            disagreement_degree(&m, &group(&["Ann", "Bob", "Cath", "John"])),
            g(2)
        );
        assert_eq!(disagreement_degree(&m, &group(&["Ann", "Bob"])), g(0));
        assert_eq!(disagreement_degree(&m, &group(&["Cath", "John"])), g(0));
        // asymmetric strengths: min of the id weights plus min of the hi
        // weights, so min(2,1) + min(1,2)
        let m = committee([1, 2, 1, 1, 2]);
        assert_eq!(
            disagreement_degree(&m, &group(&["Ann", "Bob", "Cath", "John"])),
            g(2)
        );
    }

    #[test]
    fn committee_disagreement_brute_force_agrees() {
        // independent route: hand enumeration of the eight context states
        let m = committee([1, 1, 1, 1, 1]);
        let j = group(&["Ann", "Bob", "Cath", "John"]);
        let mut best = Grade::Omega;
        for target in &m.context {
            let mut falsified = Grade::ZERO;
            for (formula, grade) in merged_base(&m.designated, &j).support() {
                if !eval_state(target, formula) {
                    falsified = falsified + grade;
                }
            }
            best = best.min(falsified);
        }
        assert_eq!(best, g(2));
        assert_eq!(disagreement_degree(&m, &j), best);
    }

    #[test]
    fn disagree_contract_matches_degree() {
        let m = committee([1, 2, 1, 1, 2]);
        for j in [
            group(&["Ann", "Bob"]),
            group(&["Cath", "John"]),
            group(&["Ann", "Bob", "Cath", "John"]),
        ] {
            let degree = disagreement_degree(&m, &j);
            for k in 1..=7u64 {
                let f = OuterFormula::disagree(j.clone(), k);
                assert_eq!(check(&m, &f), degree >= g(k), "group {j} k={k}");
            }
        }
    }
}
