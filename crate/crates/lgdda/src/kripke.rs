//! Kripke-style doxastic models.
//!
//! A model holds a finite world set, one belief base per agent and world, a
//! valuation, and optionally an explicit group-indexed distance table. When
//! the table is absent, distances are derived from the bases: the distance
//! from `w` to `u` for a group is the pooled weight, at `w`, of everything
//! the group stores that `u` falsifies. Entries missing from an explicit
//! table mean "unreachable" (`w`).
//!
//! Two validation modes mirror the two model classes: the strict mode checks
//! that the table *equals* the derived distances and is additive on groups;
//! the relaxed mode checks the two axiomatizable conditions (the table bounds
//! the derived distance from above, and every finite group distance splits
//! into per-agent shares dominating each subgroup distance).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::agents::{all_groups, Agent, Group};
use crate::formula::{Atom, InnerFormula, OuterFormula, Shape};
use crate::grades::{grade_sum, partition_iter, Grade};
use crate::semantics::{BeliefBase, State};

/// A world identifier. Cheap to clone; ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(Arc<str>);

impl WorldId {
    pub fn new(name: impl AsRef<str>) -> Self {
        WorldId(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WorldId({})", self.0)
    }
}

impl From<&str> for WorldId {
    fn from(s: &str) -> Self {
        WorldId::new(s)
    }
}

impl Serialize for WorldId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for WorldId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(WorldId::new)
    }
}

/// Explicit distance table, sparse over (group, from, to); missing entries
/// read as `w`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RhoTable {
    entries: BTreeMap<(Group, WorldId, WorldId), Grade>,
}

impl RhoTable {
    pub fn new() -> Self {
        RhoTable::default()
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (Group, WorldId, WorldId, Grade)>,
    ) -> Result<Self, KripkeError> {
        let mut table = RhoTable::new();
        for (group, from, to, d) in entries {
            table.set(group, from, to, d)?;
        }
        Ok(table)
    }

    /// Inserts an entry; duplicates are rejected (storing `w` is allowed and
    /// equivalent to omission).
    pub fn set(
        &mut self,
        group: Group,
        from: WorldId,
        to: WorldId,
        d: Grade,
    ) -> Result<(), KripkeError> {
        match self.entries.entry((group, from, to)) {
            std::collections::btree_map::Entry::Occupied(e) => {
                let (group, from, to) = e.key().clone();
                Err(KripkeError::DuplicateRhoEntry { group, from, to })
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(d);
                Ok(())
            }
        }
    }

    pub fn get(&self, group: &Group, from: &WorldId, to: &WorldId) -> Grade {
        self.entries
            .get(&(group.clone(), from.clone(), to.clone()))
            .copied()
            .unwrap_or(Grade::Omega)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Group, WorldId, WorldId), Grade)> + '_ {
        self.entries.iter().map(|(k, v)| (k, *v))
    }
}

/// A doxastic model, covering both flavors: with `rho: None` distances are
/// derived from the bases (the strict class by construction); with an
/// explicit table the model is whatever the table says, and the validators
/// tell you which class it falls in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DoxModel {
    agents: BTreeSet<Agent>,
    worlds: Vec<WorldId>,
    designated: WorldId,
    valuation: BTreeMap<Atom, BTreeSet<WorldId>>,
    dox: BTreeMap<(Agent, WorldId), BeliefBase>,
    rho: Option<RhoTable>,
}

impl DoxModel {
    pub fn new(
        agents: BTreeSet<Agent>,
        worlds: Vec<WorldId>,
        designated: WorldId,
        valuation: BTreeMap<Atom, BTreeSet<WorldId>>,
        dox: BTreeMap<(Agent, WorldId), BeliefBase>,
        rho: Option<RhoTable>,
    ) -> Result<Self, KripkeError> {
        let world_set: BTreeSet<&WorldId> = worlds.iter().collect();
        if world_set.len() != worlds.len() {
            let dup = worlds
                .iter()
                .find(|w| worlds.iter().filter(|v| v == w).count() > 1)
                .expect("duplicate exists");
            return Err(KripkeError::DuplicateWorld(dup.clone()));
        }
        if !world_set.contains(&designated) {
            return Err(KripkeError::UnknownWorld(designated));
        }
        for ws in valuation.values() {
            for w in ws {
                if !world_set.contains(w) {
                    return Err(KripkeError::UnknownWorld(w.clone()));
                }
            }
        }
        for (agent, world) in dox.keys() {
            if !agents.contains(agent) {
                return Err(KripkeError::UndeclaredAgent(agent.clone()));
            }
            if !world_set.contains(world) {
                return Err(KripkeError::UnknownWorld(world.clone()));
            }
        }
        if let Some(table) = &rho {
            for ((group, from, to), _) in table.iter() {
                for a in group.members() {
                    if !agents.contains(a) {
                        return Err(KripkeError::UndeclaredAgent(a.clone()));
                    }
                }
                if !world_set.contains(from) {
                    return Err(KripkeError::UnknownWorld(from.clone()));
                }
                if !world_set.contains(to) {
                    return Err(KripkeError::UnknownWorld(to.clone()));
                }
            }
        }
        Ok(DoxModel {
            agents,
            worlds,
            designated,
            valuation,
            dox,
            rho,
        })
    }

    pub fn agents(&self) -> &BTreeSet<Agent> {
        &self.agents
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn designated(&self) -> &WorldId {
        &self.designated
    }

    pub fn valuation(&self) -> &BTreeMap<Atom, BTreeSet<WorldId>> {
        &self.valuation
    }

    pub fn rho(&self) -> Option<&RhoTable> {
        self.rho.as_ref()
    }

    pub fn base(&self, agent: &Agent, world: &WorldId) -> &BeliefBase {
        static EMPTY: std::sync::OnceLock<BeliefBase> = std::sync::OnceLock::new();
        self.dox
            .get(&(agent.clone(), world.clone()))
            .unwrap_or_else(|| EMPTY.get_or_init(BeliefBase::new))
    }

    pub fn dox_entries(&self) -> impl Iterator<Item = (&(Agent, WorldId), &BeliefBase)> + '_ {
        self.dox.iter()
    }

    pub fn satisfies_atom(&self, world: &WorldId, atom: &Atom) -> bool {
        self.valuation
            .get(atom)
            .is_some_and(|ws| ws.contains(world))
    }

    /// The belief-base state a world induces: its bases plus the atoms true
    /// there.
    pub fn world_state(&self, world: &WorldId) -> State {
        let bases = self
            .agents
            .iter()
            .map(|a| (a.clone(), self.base(a, world).clone()));
        let valuation = self
            .valuation
            .iter()
            .filter(|(_, ws)| ws.contains(world))
            .map(|(p, _)| p.clone());
        State::new(&self.agents, bases, valuation).expect("model agents are declared")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KripkeError {
    #[error("unknown world: {0}")]
    UnknownWorld(WorldId),
    #[error("duplicate world: {0}")]
    DuplicateWorld(WorldId),
    #[error("agent not declared: {0}")]
    UndeclaredAgent(Agent),
    #[error("duplicate distance entry for ({group}, {from}, {to})")]
    DuplicateRhoEntry {
        group: Group,
        from: WorldId,
        to: WorldId,
    },
    #[error("model has no explicit distance table")]
    MissingRho,
    #[error("agent set of size {count} exceeds the configured limit {max}")]
    TooManyAgents { count: usize, max: usize },
}

/// Caps the group-exponential operations (validation, copy-per-group
/// transformation). Distance tables range over all nonempty subgroups, so
/// past a handful of agents they stop being practical.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_agents: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_agents: 8 }
    }
}

fn check_agent_limit(model: &DoxModel, limits: &Limits) -> Result<(), KripkeError> {
    if model.agents.len() > limits.max_agents {
        return Err(KripkeError::TooManyAgents {
            count: model.agents.len(),
            max: limits.max_agents,
        });
    }
    Ok(())
}

/// Distance derived from the bases alone: the pooled weight at `from` of the
/// group's stored formulas falsified at `to`. Evaluation of the stored
/// formulas never consults distances, so the derivation is well-founded.
pub fn derived_rho(model: &DoxModel, group: &Group, from: &WorldId, to: &WorldId) -> Grade {
    let mut support: BTreeSet<&Arc<InnerFormula>> = BTreeSet::new();
    for agent in group.members() {
        support.extend(model.base(agent, from).support().map(|(f, _)| f));
    }
    grade_sum(support.into_iter().filter(|f| !eval_inner(model, to, f)).map(
        |formula| {
            grade_sum(
                group
                    .members()
                    .map(|agent| model.base(agent, from).weight(formula)),
            )
        },
    ))
}

/// The distance evaluation actually uses: the explicit table when present,
/// the derived distance otherwise.
pub fn effective_rho(model: &DoxModel, group: &Group, from: &WorldId, to: &WorldId) -> Grade {
    match &model.rho {
        Some(table) => table.get(group, from, to),
        None => derived_rho(model, group, from, to),
    }
}

/// Truth of an explicit-belief layer formula at a world.
pub fn eval_inner(model: &DoxModel, world: &WorldId, formula: &InnerFormula) -> bool {
    match formula {
        InnerFormula::Top => true,
        InnerFormula::Bot => false,
        InnerFormula::Atom(p) => model.satisfies_atom(world, p),
        InnerFormula::Not(x) => !eval_inner(model, world, x),
        InnerFormula::And(a, b) => eval_inner(model, world, a) && eval_inner(model, world, b),
        InnerFormula::Tri { agent, grade, body } => model.base(agent, world).weight(body) >= *grade,
    }
}

/// Truth of a formula at a world.
pub fn eval_world(model: &DoxModel, world: &WorldId, formula: &OuterFormula) -> bool {
    match formula.shape() {
        Shape::Top => true,
        Shape::Bot => false,
        Shape::Atom(p) => model.satisfies_atom(world, p),
        Shape::Not(x) => !eval_world(model, world, &x),
        Shape::And(a, b) => eval_world(model, world, &a) && eval_world(model, world, &b),
        Shape::Tri { agent, grade, body } => model.base(agent, world).weight(body) >= grade,
        Shape::Box { group, grade, body } => model
            .worlds
            .iter()
            .filter(|u| effective_rho(model, group, world, u) <= Grade::Finite(grade))
            .all(|u| eval_world(model, u, body)),
    }
}

/// Truth at the designated world.
pub fn eval_designated(model: &DoxModel, formula: &OuterFormula) -> bool {
    eval_world(model, &model.designated, formula)
}

/// Which defining condition a violation is against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Condition {
    /// Explicit distance below the base-derived distance.
    DoxLowerBound,
    /// No division of the group distance dominates every subgroup distance.
    PartitionWitness,
    /// Explicit distance differs from the base-derived distance.
    DoxEquality,
    /// Group distance is not the sum of its members' distances.
    GroupAdditivity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::DoxLowerBound => "dox-lower-bound",
            Condition::PartitionWitness => "partition-witness",
            Condition::DoxEquality => "dox-equality",
            Condition::GroupAdditivity => "group-additivity",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub condition: Condition,
    pub group: Group,
    pub from: WorldId,
    pub to: WorldId,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated for group {{{}}} at ({}, {}): {}",
            self.condition, self.group, self.from, self.to, self.detail
        )
    }
}

/// Outcome of model validation; every violation is reported, not just the
/// first, since transformation debugging needs the full picture.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the two relaxed distance conditions against an explicit table.
pub fn validate_qngdm(model: &DoxModel) -> Result<ValidationReport, KripkeError> {
    validate_qngdm_with(model, &Limits::default())
}

pub fn validate_qngdm_with(
    model: &DoxModel,
    limits: &Limits,
) -> Result<ValidationReport, KripkeError> {
    check_agent_limit(model, limits)?;
    let table = model.rho.as_ref().ok_or(KripkeError::MissingRho)?;
    let mut report = ValidationReport::default();
    for group in all_groups(&model.agents) {
        for from in &model.worlds {
            for to in &model.worlds {
                let bound = table.get(&group, from, to);
                let Grade::Finite(k) = bound else { continue };
                let derived = derived_rho(model, &group, from, to);
                if bound < derived {
                    report.violations.push(Violation {
                        condition: Condition::DoxLowerBound,
                        group: group.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        detail: format!("table says {bound}, bases require at least {derived}"),
                    });
                }
                let subgroups = group.proper_subgroups();
                let witnessed = partition_iter(Grade::Finite(k), &group)
                    .expect("finite grade")
                    .any(|delta| {
                        subgroups.iter().all(|sub| {
                            Grade::Finite(delta.sum_over(sub.members()))
                                >= table.get(sub, from, to)
                        })
                    });
                if !witnessed {
                    report.violations.push(Violation {
                        condition: Condition::PartitionWitness,
                        group: group.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        detail: format!(
                            "no division of {k} among the members dominates every subgroup distance"
                        ),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Checks that an explicit table matches the base-derived distances exactly
/// (and, redundantly but directly, that it is additive on groups).
pub fn validate_ngdm(model: &DoxModel) -> Result<ValidationReport, KripkeError> {
    validate_ngdm_with(model, &Limits::default())
}

pub fn validate_ngdm_with(
    model: &DoxModel,
    limits: &Limits,
) -> Result<ValidationReport, KripkeError> {
    check_agent_limit(model, limits)?;
    let table = model.rho.as_ref().ok_or(KripkeError::MissingRho)?;
    let mut report = ValidationReport::default();
    for group in all_groups(&model.agents) {
        for from in &model.worlds {
            for to in &model.worlds {
                let stored = table.get(&group, from, to);
                let derived = derived_rho(model, &group, from, to);
                if stored != derived {
                    report.violations.push(Violation {
                        condition: Condition::DoxEquality,
                        group: group.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        detail: format!("table says {stored}, bases derive {derived}"),
                    });
                }
                let split = grade_sum(
                    group
                        .members()
                        .map(|a| table.get(&Group::singleton(a.clone()), from, to)),
                );
                if stored != split {
                    report.violations.push(Violation {
                        condition: Condition::GroupAdditivity,
                        group: group.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        detail: format!("table says {stored}, member distances sum to {split}"),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Materializes the derived distances as an explicit table (finite entries
/// only). The result always validates in the strict mode.
pub fn derived_rho_table(model: &DoxModel) -> RhoTable {
    let mut table = RhoTable::new();
    for group in all_groups(&model.agents) {
        for from in &model.worlds {
            for to in &model.worlds {
                let d = derived_rho(model, &group, from, to);
                if d.is_finite() {
                    table
                        .set(group.clone(), from.clone(), to.clone(), d)
                        .expect("distinct keys");
                }
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_inner};

    fn ag(s: &str) -> Agent {
        Agent::new(s)
    }

    fn w(s: &str) -> WorldId {
        WorldId::new(s)
    }

    fn g(n: u64) -> Grade {
        Grade::Finite(n)
    }

    fn group(names: &[&str]) -> Group {
        Group::new(names.iter().map(Agent::new)).unwrap()
    }

    fn base(entries: &[(&str, Grade)]) -> BeliefBase {
        BeliefBase::from_entries(
            entries
                .iter()
                .map(|(text, grade)| (parse_inner(text).unwrap(), *grade)),
        )
    }

    #[allow(clippy::type_complexity)]
    fn model(
        agents: &[&str],
        worlds: &[&str],
        designated: &str,
        valuation: &[(&str, &[&str])],
        dox: &[(&str, &str, &[(&str, Grade)])],
        rho: Option<&[(&[&str], &str, &str, Grade)]>,
    ) -> DoxModel {
        let table = rho.map(|entries| {
            RhoTable::from_entries(entries.iter().map(|(j, from, to, d)| {
                (group(j), w(from), w(to), *d)
            }))
            .unwrap()
        });
        DoxModel::new(
            agents.iter().map(Agent::new).collect(),
            worlds.iter().map(WorldId::new).collect(),
            w(designated),
            valuation
                .iter()
                .map(|(p, ws)| (Atom::new(p), ws.iter().map(WorldId::new).collect()))
                .collect(),
            dox.iter()
                .map(|(a, world, entries)| ((ag(a), w(world)), base(entries)))
                .collect(),
            table,
        )
        .unwrap()
    }

    #[test]
    fn derived_rho_nothing_falsified() {
        let m = model(
            &["1"],
            &["w", "u"],
            "w",
            &[("p", &["u"])],
            &[("1", "w", &[("p", g(2))])],
            None,
        );
        assert_eq!(derived_rho(&m, &group(&["1"]), &w("w"), &w("u")), g(0));
    }

    #[test]
    fn derived_rho_sums_group_weights() {
        let m = model(
            &["1", "2"],
            &["w", "u"],
            "w",
            &[],
            &[
                ("1", "w", &[("p", g(2))]),
                ("2", "w", &[("p", g(1))]),
            ],
            None,
        );
        assert_eq!(derived_rho(&m, &group(&["1", "2"]), &w("w"), &w("u")), g(3));
    }

    #[test]
    fn derived_rho_evaluates_nested_triangles_at_target() {
        // agent 1 believes that agent 2 believes q; at u, agent 2 does not
        let m = model(
            &["1", "2"],
            &["w", "u"],
            "w",
            &[],
            &[("1", "w", &[("B{2,1} q", g(1))])],
            None,
        );
        assert_eq!(derived_rho(&m, &group(&["1"]), &w("w"), &w("u")), g(1));
        // and once agent 2 does believe q at u, nothing is falsified
        let m2 = model(
            &["1", "2"],
            &["w", "u"],
            "w",
            &[],
            &[
                ("1", "w", &[("B{2,1} q", g(1))]),
                ("2", "u", &[("q", g(1))]),
            ],
            None,
        );
        assert_eq!(derived_rho(&m2, &group(&["1"]), &w("w"), &w("u")), g(0));
    }

    #[test]
    fn eval_world_triangle_clause() {
        let m = model(&["1"], &["w"], "w", &[], &[("1", "w", &[("p", g(2))])], None);
        assert!(eval_world(&m, &w("w"), &parse("B{1,2} p").unwrap()));
        assert!(!eval_world(&m, &w("w"), &parse("B{1,3} p").unwrap()));
    }

    #[test]
    fn eval_world_box_with_unreachable_self() {
        // explicit table, no entries: every distance is w
        let m = model(&["1"], &["w"], "w", &[], &[], Some(&[]));
        assert!(eval_world(&m, &w("w"), &parse("D{1,0} false").unwrap()));
    }

    #[test]
    fn eval_world_box_ranges_by_distance() {
        let m = model(
            &["1"],
            &["w", "u"],
            "w",
            &[("p", &["u"])],
            &[],
            Some(&[(&["1"], "w", "u", g(1))]),
        );
        assert!(eval_world(&m, &w("w"), &parse("D{1,1} p").unwrap()));
        // within budget 0 no world qualifies, vacuous truth
        assert!(eval_world(&m, &w("w"), &parse("D{1,0} p").unwrap()));
    }

    #[test]
    fn validate_qngdm_vacuous_on_all_omega() {
        let m = model(&["1", "2"], &["w", "u"], "w", &[], &[], Some(&[]));
        assert!(validate_qngdm(&m).unwrap().ok());
    }

    #[test]
    fn validate_qngdm_flags_dox_lower_bound() {
        let m = model(
            &["1"],
            &["w", "u"],
            "w",
            &[],
            &[("1", "w", &[("p", g(1))])],
            Some(&[(&["1"], "w", "u", g(0))]),
        );
        let report = validate_qngdm(&m).unwrap();
        assert!(!report.ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::DoxLowerBound));
    }

    #[test]
    fn validate_qngdm_flags_missing_partition_witness() {
        // both member distances are 1, but the pair distance 1 cannot cover both
        let m = model(
            &["1", "2"],
            &["w", "u"],
            "w",
            &[],
            &[],
            Some(&[
                (&["1", "2"], "w", "u", g(1)),
                (&["1"], "w", "u", g(1)),
                (&["2"], "w", "u", g(1)),
            ]),
        );
        let report = validate_qngdm(&m).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].condition, Condition::PartitionWitness);
        assert_eq!(report.violations[0].group, group(&["1", "2"]));
    }

    #[test]
    fn validate_ngdm_accepts_derived_table() {
        let m = model(
            &["1", "2"],
            &["w", "u"],
            "w",
            &[("p", &["w"])],
            &[
                ("1", "w", &[("p", g(2))]),
                ("2", "w", &[("p", g(1)), ("q", g(1))]),
            ],
            None,
        );
        let table = derived_rho_table(&m);
        let m = DoxModel::new(
            m.agents.clone(),
            m.worlds.clone(),
            m.designated.clone(),
            m.valuation.clone(),
            m.dox.clone(),
            Some(table),
        )
        .unwrap();
        assert!(validate_ngdm(&m).unwrap().ok());
        // any strict-mode model also passes the relaxed mode
        assert!(validate_qngdm(&m).unwrap().ok());
    }

    #[test]
    fn validate_ngdm_flags_non_additive_table() {
        let m = model(
            &["1", "2"],
            &["w"],
            "w",
            &[],
            &[],
            Some(&[
                (&["1"], "w", "w", g(0)),
                (&["2"], "w", "w", g(0)),
                (&["1", "2"], "w", "w", g(1)),
            ]),
        );
        let report = validate_ngdm(&m).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::GroupAdditivity));
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::DoxEquality));
    }

    #[test]
    fn validate_requires_table() {
        let m = model(&["1"], &["w"], "w", &[], &[], None);
        assert_eq!(validate_ngdm(&m).unwrap_err(), KripkeError::MissingRho);
        assert_eq!(validate_qngdm(&m).unwrap_err(), KripkeError::MissingRho);
    }

    #[test]
    fn agent_limit_enforced() {
        let names: Vec<String> = (0..9).map(|i| format!("a{i}")).collect();
        let m = DoxModel::new(
            names.iter().map(Agent::new).collect(),
            vec![w("w")],
            w("w"),
            BTreeMap::new(),
            BTreeMap::new(),
            Some(RhoTable::new()),
        )
        .unwrap();
        assert!(matches!(
            validate_qngdm(&m),
            Err(KripkeError::TooManyAgents { count: 9, max: 8 })
        ));
    }

    #[test]
    fn world_state_matches_inner_evaluation() {
        let m = model(
            &["1"],
            &["w", "u"],
            "w",
            &[("p", &["w"])],
            &[("1", "w", &[("p", g(2)), ("B{1,1} q", g(1))])],
            None,
        );
        for world in ["w", "u"] {
            let state = m.world_state(&w(world));
            for text in ["p", "~p & B{1,2} p", "B{1,1} B{1,1} q", "B{1,3} p"] {
                let f = parse_inner(text).unwrap();
                assert_eq!(
                    crate::semantics::eval_state(&state, &f),
                    eval_inner(&m, &w(world), &f),
                    "world {world}, formula {text}"
                );
            }
        }
    }

    #[test]
    fn duplicate_rho_entry_rejected() {
        let mut table = RhoTable::new();
        table.set(group(&["1"]), w("w"), w("w"), g(0)).unwrap();
        assert!(matches!(
            table.set(group(&["1"]), w("w"), w("w"), g(1)),
            Err(KripkeError::DuplicateRhoEntry { .. })
        ));
    }
}
