//! Satisfaction-preserving model transformations.
//!
//! Four constructions shuttle a pointed model between the three semantics
//! while preserving the truth of a designated formula:
//!
//! - [`filtrate`]: quotient a model by agreement on all subformulas of the
//!   formula, bounding the world count by an exponential in the closure size;
//! - [`qngdm_to_ngdm`]: repair a relaxed model into a strict one, first by
//!   copying each world per group (distances split along partition
//!   witnesses), then by adding one characterizing atom per copy whose weight
//!   tops the derived distance up to the stored one;
//! - [`ngdm_to_magbm`]: read each world of a strict model as a belief-base
//!   state, the whole world set becoming the context;
//! - [`magbm_to_qngdm`]: re-package a belief-base model as worlds, with
//!   distances computed from the pooled bases and the designated state kept
//!   unreachable unless it already sits in the context.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::agents::{all_groups, Group};
use crate::formula::{subformula_closure, Atom, InnerFormula, OuterFormula, Shape};
use crate::grades::{max_star, min_star, partition_iter, Grade, Partition};
use crate::kripke::{
    effective_rho, eval_inner, eval_world, validate_ngdm_with, validate_qngdm_with, DoxModel,
    KripkeError, Limits, RhoTable, ValidationReport, WorldId,
};
use crate::semantics::{implausibility, BeliefBase, Magbm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("input fails {mode} validation: {}", summarize(.report))]
    InvalidInput {
        mode: &'static str,
        report: ValidationReport,
    },
    #[error("no partition witness for group {{{group}}} at ({from}, {to}); input is not a valid relaxed model")]
    NoPartitionWitness {
        group: Group,
        from: WorldId,
        to: WorldId,
    },
    #[error("characterizing atom {0} collides with an existing atom")]
    AtomCollision(Atom),
    #[error("generated world name collides: {0}")]
    WorldNameCollision(String),
}

fn summarize(report: &ValidationReport) -> String {
    let head: Vec<String> = report
        .violations
        .iter()
        .take(3)
        .map(|v| v.to_string())
        .collect();
    format!("{} violation(s), e.g. {}", report.violations.len(), head.join("; "))
}

/// A model with an explicit table must validate in the relaxed mode; a model
/// with derived distances is strict by construction, hence fine as-is.
fn ensure_qngdm(model: &DoxModel, limits: &Limits) -> Result<(), TransformError> {
    if model.rho().is_none() {
        return Ok(());
    }
    let report = validate_qngdm_with(model, limits)?;
    if report.ok() {
        Ok(())
    } else {
        Err(TransformError::InvalidInput {
            mode: "relaxed",
            report,
        })
    }
}

fn ensure_ngdm(model: &DoxModel, limits: &Limits) -> Result<(), TransformError> {
    if model.rho().is_none() {
        return Ok(());
    }
    let report = validate_ngdm_with(model, limits)?;
    if report.ok() {
        Ok(())
    } else {
        Err(TransformError::InvalidInput {
            mode: "strict",
            report,
        })
    }
}

/// Quotients the model by agreement on every subformula of `phi`. The result
/// has at most `2^|closure|` worlds (and never more than the input), still
/// validates in the relaxed mode, and agrees with the input on every
/// subformula of `phi` (each class versus any of its members).
pub fn filtrate(model: &DoxModel, phi: &OuterFormula) -> Result<DoxModel, TransformError> {
    filtrate_with(model, phi, &Limits::default())
}

pub fn filtrate_with(
    model: &DoxModel,
    phi: &OuterFormula,
    limits: &Limits,
) -> Result<DoxModel, TransformError> {
    ensure_qngdm(model, limits)?;
    let closure: Vec<OuterFormula> = subformula_closure(phi).into_iter().collect();

    // classes of the agreement relation, in order of first representative
    let mut class_of: BTreeMap<WorldId, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<WorldId>> = Vec::new();
    let mut signatures: Vec<Vec<bool>> = Vec::new();
    for world in model.worlds() {
        let sig: Vec<bool> = closure.iter().map(|f| eval_world(model, world, f)).collect();
        match signatures.iter().position(|s| *s == sig) {
            Some(idx) => {
                classes[idx].push(world.clone());
                class_of.insert(world.clone(), idx);
            }
            None => {
                class_of.insert(world.clone(), classes.len());
                classes.push(vec![world.clone()]);
                signatures.push(sig);
            }
        }
    }

    let class_ids: Vec<WorldId> = (0..classes.len())
        .map(|i| WorldId::new(format!("c{i}")))
        .collect();

    // triangle grades mentioned in the closure, per (agent, body)
    let mut tri_candidates: BTreeMap<(crate::agents::Agent, Arc<InnerFormula>), Vec<Grade>> =
        BTreeMap::new();
    for f in &closure {
        if let Shape::Tri { agent, grade, body } = f.shape() {
            tri_candidates
                .entry((agent.clone(), body.clone()))
                .or_default()
                .push(grade);
        }
    }

    let mut dox: BTreeMap<(crate::agents::Agent, WorldId), BeliefBase> = BTreeMap::new();
    for (idx, members) in classes.iter().enumerate() {
        for agent in model.agents() {
            let mut base = BeliefBase::new();
            for ((cand_agent, body), grades) in &tri_candidates {
                if cand_agent != agent {
                    continue;
                }
                let witnessed = max_star(grades.iter().copied().filter(|k| {
                    members
                        .iter()
                        .all(|u| model.base(agent, u).weight(body) >= *k)
                }));
                base.insert(body.clone(), witnessed);
            }
            if !base.is_empty() {
                dox.insert((agent.clone(), class_ids[idx].clone()), base);
            }
        }
    }

    // a class satisfies an atom when all its members do
    let mut valuation: BTreeMap<Atom, BTreeSet<WorldId>> = BTreeMap::new();
    for atom in model.valuation().keys() {
        let holder: BTreeSet<WorldId> = classes
            .iter()
            .enumerate()
            .filter(|(_, members)| members.iter().all(|u| model.satisfies_atom(u, atom)))
            .map(|(i, _)| class_ids[i].clone())
            .collect();
        if !holder.is_empty() {
            valuation.insert(atom.clone(), holder);
        }
    }

    let mut table = RhoTable::new();
    for group in all_groups(model.agents()) {
        for (i, from_members) in classes.iter().enumerate() {
            for (j, to_members) in classes.iter().enumerate() {
                let d = min_star(from_members.iter().flat_map(|u| {
                    to_members
                        .iter()
                        .map(|v| effective_rho(model, &group, u, v))
                }));
                if d.is_finite() {
                    table
                        .set(group.clone(), class_ids[i].clone(), class_ids[j].clone(), d)
                        .expect("distinct keys");
                }
            }
        }
    }

    let designated = class_ids[class_of[model.designated()]].clone();
    Ok(DoxModel::new(
        model.agents().clone(),
        class_ids,
        designated,
        valuation,
        dox,
        Some(table),
    )?)
}

fn copy_world_id(world: &WorldId, group: &Group) -> String {
    let tag: Vec<&str> = group.members().map(|a| a.name()).collect();
    format!("{}__{}", world, tag.join("_"))
}

/// Repairs a relaxed model into a strict one while preserving the truth of
/// `phi` at the designated point. The output has `|W| * (2^|Agt| - 1)` worlds
/// and fresh `__chi_*` atoms; it fails if those names collide with atoms of
/// `phi`, of the stored beliefs, or of the valuation.
pub fn qngdm_to_ngdm(model: &DoxModel, phi: &OuterFormula) -> Result<DoxModel, TransformError> {
    qngdm_to_ngdm_with(model, phi, &Limits::default())
}

pub fn qngdm_to_ngdm_with(
    model: &DoxModel,
    phi: &OuterFormula,
    limits: &Limits,
) -> Result<DoxModel, TransformError> {
    ensure_qngdm(model, limits)?;
    let groups = all_groups(model.agents());
    if groups.is_empty() {
        // no agents: no distances to repair, just materialize an empty table
        return Ok(DoxModel::new(
            model.agents().clone(),
            model.worlds().to_vec(),
            model.designated().clone(),
            model.valuation().clone(),
            model
                .dox_entries()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            Some(RhoTable::new()),
        )?)
    }

    // stage 1: one copy of each world per group; distances to a copy tagged J
    // split the original distance along a partition witness for (J, w, u)
    let mut copy_ids: BTreeMap<(WorldId, Group), WorldId> = BTreeMap::new();
    let mut copy_order: Vec<WorldId> = Vec::new();
    let mut seen = BTreeSet::new();
    for world in model.worlds() {
        for group in &groups {
            let id = copy_world_id(world, group);
            if !seen.insert(id.clone()) {
                return Err(TransformError::WorldNameCollision(id));
            }
            let wid = WorldId::new(&id);
            copy_ids.insert((world.clone(), group.clone()), wid.clone());
            copy_order.push(wid);
        }
    }

    let mut table = RhoTable::new();
    for from in model.worlds() {
        for to in model.worlds() {
            for target_tag in &groups {
                let Grade::Finite(k) = effective_rho(model, target_tag, from, to) else {
                    continue;
                };
                let subgroups = target_tag.subgroups();
                let witness: Option<Partition> = partition_iter(Grade::Finite(k), target_tag)
                    .expect("finite grade")
                    .find(|delta| {
                        subgroups
                            .iter()
                            .filter(|sub| sub.len() < target_tag.len())
                            .all(|sub| {
                                Grade::Finite(delta.sum_over(sub.members()))
                                    >= effective_rho(model, sub, from, to)
                            })
                    });
                let delta = witness.ok_or_else(|| TransformError::NoPartitionWitness {
                    group: target_tag.clone(),
                    from: from.clone(),
                    to: to.clone(),
                })?;
                let target = &copy_ids[&(to.clone(), target_tag.clone())];
                for source_tag in &groups {
                    let source = &copy_ids[&(from.clone(), source_tag.clone())];
                    for sub in &subgroups {
                        table
                            .set(
                                sub.clone(),
                                source.clone(),
                                target.clone(),
                                Grade::Finite(delta.sum_over(sub.members())),
                            )
                            .expect("distinct keys");
                    }
                }
            }
        }
    }

    // stage 2: characterizing atoms, one per copy, false exactly there; their
    // weights lift every derived distance up to the stored one
    let mut taken: BTreeSet<Atom> = phi.atoms();
    for (_, base) in model.dox_entries() {
        for (formula, _) in base.support() {
            taken.extend(OuterFormula::lift(formula.clone()).atoms());
        }
    }
    taken.extend(model.valuation().keys().cloned());

    let mut chi: BTreeMap<WorldId, Atom> = BTreeMap::new();
    for id in &copy_order {
        let sanitized: String = id
            .name()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        let atom = Atom::new(format!("__chi_{sanitized}"));
        if taken.contains(&atom) || chi.values().any(|a| *a == atom) {
            return Err(TransformError::AtomCollision(atom));
        }
        chi.insert(id.clone(), atom);
    }

    let mut dox: BTreeMap<(crate::agents::Agent, WorldId), BeliefBase> = BTreeMap::new();
    for ((source_world, _), source_copy) in &copy_ids {
        for agent in model.agents() {
            let original = model.base(agent, source_world);
            let mut base = original.clone();
            let singleton = Group::singleton(agent.clone());
            for ((target_world, _), target_copy) in &copy_ids {
                let stored = table.get(&singleton, source_copy, target_copy);
                let weight = match stored {
                    Grade::Omega => Grade::Omega,
                    Grade::Finite(stored) => {
                        let falsified = crate::grades::grade_sum(
                            original
                                .support()
                                .filter(|(f, _)| !eval_inner(model, target_world, f))
                                .map(|(_, g)| g),
                        );
                        let falsified = falsified
                            .as_finite()
                            .expect("relaxed condition bounds falsified weight");
                        assert!(
                            falsified <= stored,
                            "stage-1 distance fell below the falsified weight"
                        );
                        Grade::Finite(stored - falsified)
                    }
                };
                if weight > Grade::ZERO {
                    base.insert(
                        InnerFormula::atom(chi[target_copy].name()),
                        weight,
                    );
                }
            }
            if !base.is_empty() {
                dox.insert((agent.clone(), source_copy.clone()), base);
            }
        }
    }

    let mut valuation: BTreeMap<Atom, BTreeSet<WorldId>> = BTreeMap::new();
    for (atom, holders) in model.valuation() {
        let lifted: BTreeSet<WorldId> = copy_ids
            .iter()
            .filter(|((w, _), _)| holders.contains(w))
            .map(|(_, copy)| copy.clone())
            .collect();
        if !lifted.is_empty() {
            valuation.insert(atom.clone(), lifted);
        }
    }
    for (copy, atom) in &chi {
        let everywhere_else: BTreeSet<WorldId> = copy_order
            .iter()
            .filter(|c| *c != copy)
            .cloned()
            .collect();
        valuation.insert(atom.clone(), everywhere_else);
    }

    let full_group = groups.last().expect("nonempty agent set").clone();
    debug_assert_eq!(full_group.len(), model.agents().len());
    let designated = copy_ids[&(model.designated().clone(), full_group)].clone();

    Ok(DoxModel::new(
        model.agents().clone(),
        copy_order,
        designated,
        valuation,
        dox,
        Some(table),
    )?)
}

/// Reads a strict model as a belief-base model: every world becomes a context
/// state, the designated world the designated state.
pub fn ngdm_to_magbm(model: &DoxModel) -> Result<Magbm, TransformError> {
    ngdm_to_magbm_with(model, &Limits::default())
}

pub fn ngdm_to_magbm_with(model: &DoxModel, limits: &Limits) -> Result<Magbm, TransformError> {
    ensure_ngdm(model, limits)?;
    let context = model
        .worlds()
        .iter()
        .map(|w| model.world_state(w))
        .collect();
    Ok(Magbm::new(
        model.agents().clone(),
        model.world_state(model.designated()),
        context,
    ))
}

/// Re-packages a belief-base model as a relaxed doxastic model: one world per
/// context entry, distances from pooled-base implausibility, the designated
/// state getting its own unreachable world unless it equals a context state.
pub fn magbm_to_qngdm(model: &Magbm) -> Result<DoxModel, TransformError> {
    magbm_to_qngdm_with(model, &Limits::default())
}

pub fn magbm_to_qngdm_with(model: &Magbm, limits: &Limits) -> Result<DoxModel, TransformError> {
    if model.agents.len() > limits.max_agents {
        return Err(KripkeError::TooManyAgents {
            count: model.agents.len(),
            max: limits.max_agents,
        }
        .into());
    }
    let mut worlds: Vec<WorldId> = (0..model.context.len())
        .map(|i| WorldId::new(format!("u{i}")))
        .collect();
    let mut states: Vec<&crate::semantics::State> = model.context.iter().collect();
    let designated = match model.context.iter().position(|s| *s == model.designated) {
        Some(i) => worlds[i].clone(),
        None => {
            let s0 = WorldId::new("s0");
            worlds.push(s0.clone());
            states.push(&model.designated);
            s0
        }
    };

    let mut dox: BTreeMap<(crate::agents::Agent, WorldId), BeliefBase> = BTreeMap::new();
    let mut valuation: BTreeMap<Atom, BTreeSet<WorldId>> = BTreeMap::new();
    for (idx, state) in states.iter().enumerate() {
        for (agent, base) in state.bases() {
            if !base.is_empty() {
                dox.insert((agent.clone(), worlds[idx].clone()), base.clone());
            }
        }
        for atom in state.valuation() {
            valuation
                .entry(atom.clone())
                .or_default()
                .insert(worlds[idx].clone());
        }
    }

    // distances into context worlds are the pooled-base values; distances
    // into a separate designated world stay omitted, i.e. unreachable
    let mut table = RhoTable::new();
    for group in all_groups(&model.agents) {
        for (i, source) in states.iter().enumerate() {
            for (j, target) in states.iter().enumerate().take(model.context.len()) {
                let d = implausibility(source, target, &group);
                if d.is_finite() {
                    table
                        .set(group.clone(), worlds[i].clone(), worlds[j].clone(), d)
                        .expect("distinct keys");
                }
            }
        }
    }

    Ok(DoxModel::new(
        model.agents.clone(),
        worlds,
        designated,
        valuation,
        dox,
        Some(table),
    )?)
}
