//! Axiom-schema instantiation.
//!
//! Each schema of the logic is exposed as a constructor producing a concrete
//! formula, with the schema's side conditions enforced; a bounded, fully
//! deterministic corpus enumerates instances for validity testing. The
//! necessitation rule is a formula transformer ([`nec`]) rather than a
//! schema: lift an already-valid formula under any box and it must stay
//! valid.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::agents::{all_groups, Agent, Group};
use crate::formula::{InnerFormula, OuterFormula};
use crate::grades::{grade_sum, partitions, Grade};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("monotonicity requires the stronger grade on the left")]
    GradeOrder,
    #[error("group monotonicity requires the left group inside the right")]
    GroupOrder,
    #[error("every explicit-belief premise must belong to the box group")]
    AgentOutsideGroup,
    #[error("conflicting grades for one (agent, body) premise")]
    ConflictingGrades,
    #[error("every box premise must use a subgroup of the box group")]
    GroupOutsideGroup,
}

/// An explicit-belief premise for [`int_tri_box`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TriSpec {
    pub agent: Agent,
    pub grade: Grade,
    pub body: Arc<InnerFormula>,
}

/// A box premise for [`int_box_box`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct BoxSpec {
    pub group: Group,
    pub grade: u64,
    pub body: OuterFormula,
}

fn conjoin(items: impl IntoIterator<Item = OuterFormula>) -> OuterFormula {
    let items: Vec<OuterFormula> = items.into_iter().collect();
    items
        .into_iter()
        .rev()
        .reduce(|acc, x| x.and(acc))
        .unwrap_or_else(OuterFormula::top)
}

fn disjoin(items: impl IntoIterator<Item = OuterFormula>) -> OuterFormula {
    let items: Vec<OuterFormula> = items.into_iter().collect();
    items
        .into_iter()
        .rev()
        .reduce(|acc, x| x.or(acc))
        .unwrap_or_else(OuterFormula::bot)
}

/// Distribution of the box over implication.
pub fn k_axiom(group: Group, grade: u64, phi: OuterFormula, psi: OuterFormula) -> OuterFormula {
    let premise = OuterFormula::boxed(group.clone(), grade, phi.clone().imp(psi.clone()));
    premise.imp(
        OuterFormula::boxed(group.clone(), grade, phi).imp(OuterFormula::boxed(group, grade, psi)),
    )
}

/// Explicit belief at a grade entails it at any weaker grade.
pub fn mon_tri(
    agent: Agent,
    strong: Grade,
    weak: Grade,
    body: Arc<InnerFormula>,
) -> Result<OuterFormula, AxiomError> {
    if strong < weak {
        return Err(AxiomError::GradeOrder);
    }
    Ok(OuterFormula::tri(agent.clone(), strong, body.clone())
        .imp(OuterFormula::tri(agent, weak, body)))
}

/// Distributed belief at a budget entails it at any smaller budget.
pub fn mon_grade(
    group: Group,
    strong: u64,
    weak: u64,
    body: OuterFormula,
) -> Result<OuterFormula, AxiomError> {
    if strong < weak {
        return Err(AxiomError::GradeOrder);
    }
    Ok(OuterFormula::boxed(group.clone(), strong, body.clone())
        .imp(OuterFormula::boxed(group, weak, body)))
}

/// Distributed belief of a group persists in any supergroup.
pub fn mon_group(
    group: Group,
    supergroup: Group,
    grade: u64,
    body: OuterFormula,
) -> Result<OuterFormula, AxiomError> {
    if !group.is_subset(&supergroup) {
        return Err(AxiomError::GroupOrder);
    }
    Ok(OuterFormula::boxed(group, grade, body.clone())
        .imp(OuterFormula::boxed(supergroup, grade, body)))
}

/// Interaction of explicit beliefs with the box: the group believes, within
/// budget `k`, that its stored premises hold apart from some subset whose
/// total importance fits the budget. Duplicate premises collapse; one grade
/// per (agent, body) pair is required, and every agent must be in the group.
pub fn int_tri_box(
    premises: &[TriSpec],
    group: Group,
    grade: u64,
) -> Result<OuterFormula, AxiomError> {
    let omega: BTreeSet<TriSpec> = premises.iter().cloned().collect();
    for spec in &omega {
        if !group.contains(&spec.agent) {
            return Err(AxiomError::AgentOutsideGroup);
        }
    }
    let mut keys: BTreeSet<(&Agent, &Arc<InnerFormula>)> = BTreeSet::new();
    for spec in &omega {
        if !keys.insert((&spec.agent, &spec.body)) {
            return Err(AxiomError::ConflictingGrades);
        }
    }
    let omega: Vec<TriSpec> = omega.into_iter().collect();
    let antecedent = conjoin(
        omega
            .iter()
            .map(|s| OuterFormula::tri(s.agent.clone(), s.grade, s.body.clone())),
    );
    let mut disjuncts = Vec::new();
    for mask in 0u64..(1 << omega.len()) {
        let removed_weight = grade_sum(
            omega
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.grade),
        );
        if removed_weight > Grade::Finite(grade) {
            continue;
        }
        let kept_bodies: BTreeSet<Arc<InnerFormula>> = omega
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) == 0)
            .map(|(_, s)| s.body.clone())
            .collect();
        disjuncts.push(conjoin(kept_bodies.into_iter().map(OuterFormula::lift)));
    }
    Ok(antecedent.imp(OuterFormula::boxed(group, grade, disjoin(disjuncts))))
}

/// Interaction of boxes across groups: subgroup beliefs survive in the big
/// group for every division of its budget that keeps their own budgets
/// intact. Every premise group must sit inside the box group.
pub fn int_box_box(
    premises: &[BoxSpec],
    group: Group,
    grade: u64,
) -> Result<OuterFormula, AxiomError> {
    let psi: BTreeSet<BoxSpec> = premises.iter().cloned().collect();
    for spec in &psi {
        if !spec.group.is_subset(&group) {
            return Err(AxiomError::GroupOutsideGroup);
        }
    }
    let psi: Vec<BoxSpec> = psi.into_iter().collect();
    let antecedent = conjoin(
        psi.iter()
            .map(|s| OuterFormula::boxed(s.group.clone(), s.grade, s.body.clone())),
    );
    let mut disjuncts = Vec::new();
    for delta in partitions(Grade::Finite(grade), &group).expect("finite grade") {
        let kept: BTreeSet<OuterFormula> = psi
            .iter()
            .filter(|s| delta.sum_over(s.group.members()) <= s.grade)
            .map(|s| s.body.clone())
            .collect();
        disjuncts.push(conjoin(kept));
    }
    Ok(antecedent.imp(OuterFormula::boxed(group, grade, disjoin(disjuncts))))
}

/// Necessitation as a transformer: the lift of a valid formula is valid.
pub fn nec(group: Group, grade: u64, phi: OuterFormula) -> OuterFormula {
    OuterFormula::boxed(group, grade, phi)
}

/// Enumeration bounds for [`corpus`].
#[derive(Clone, Copy, Debug)]
pub struct CorpusBounds {
    /// Agents are named "1".."n".
    pub agents: usize,
    /// Box grades range 0..=max; belief grades 1..=max plus `w`.
    pub max_grade: u64,
    /// Atom pool size ("p", "q", ...).
    pub atoms: usize,
    /// Premise-set size cap for the belief/box interaction schema.
    pub max_omega: usize,
    /// Premise-set size cap for the box/box interaction schema.
    pub max_psi: usize,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        CorpusBounds {
            agents: 2,
            max_grade: 2,
            atoms: 2,
            max_omega: 2,
            max_psi: 2,
        }
    }
}

const ATOM_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

fn atom_pool(bounds: &CorpusBounds) -> Vec<OuterFormula> {
    assert!(bounds.atoms <= ATOM_NAMES.len(), "atom pool too large");
    ATOM_NAMES[..bounds.atoms]
        .iter()
        .map(OuterFormula::atom)
        .collect()
}

fn body_pool(bounds: &CorpusBounds) -> Vec<OuterFormula> {
    let atoms = atom_pool(bounds);
    if atoms.is_empty() {
        vec![OuterFormula::top(), OuterFormula::bot()]
    } else {
        atoms
    }
}

fn tri_grades(bounds: &CorpusBounds) -> Vec<Grade> {
    (1..=bounds.max_grade)
        .map(Grade::Finite)
        .chain([Grade::Omega])
        .collect()
}

fn size_capped_subsets<T: Clone>(items: &[T], max_size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    fn go<T: Clone>(items: &[T], start: usize, cur: &mut Vec<T>, max: usize, out: &mut Vec<Vec<T>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, i + 1, cur, max, out);
            cur.pop();
        }
    }
    go(items, 0, &mut Vec::new(), max_size, &mut out);
    out.sort_by_key(|s| s.len());
    out
}

/// Every schema instance within the bounds, in a fixed order. Every returned
/// formula is expected valid; the tableau suite asserts exactly that.
pub fn corpus(bounds: &CorpusBounds) -> Vec<OuterFormula> {
    let agents: BTreeSet<Agent> = (1..=bounds.agents)
        .map(|i| Agent::new(i.to_string()))
        .collect();
    let groups = all_groups(&agents);
    let bodies = body_pool(bounds);
    let box_grades: Vec<u64> = (0..=bounds.max_grade).collect();
    let mut out = Vec::new();

    for group in &groups {
        for &k in &box_grades {
            for phi in &bodies {
                for psi in &bodies {
                    out.push(k_axiom(group.clone(), k, phi.clone(), psi.clone()));
                }
            }
        }
    }

    for agent in &agents {
        for strong in tri_grades(bounds) {
            for weak in tri_grades(bounds) {
                if strong < weak {
                    continue;
                }
                for body in &bodies {
                    if let Some(inner) = body.as_inner() {
                        out.push(
                            mon_tri(agent.clone(), strong, weak, inner.clone())
                                .expect("grades ordered"),
                        );
                    }
                }
            }
        }
    }

    for group in &groups {
        for &strong in &box_grades {
            for &weak in &box_grades {
                if strong < weak {
                    continue;
                }
                for body in &bodies {
                    out.push(
                        mon_grade(group.clone(), strong, weak, body.clone())
                            .expect("grades ordered"),
                    );
                }
            }
        }
    }

    for group in &groups {
        for supergroup in &groups {
            if !group.is_subset(supergroup) {
                continue;
            }
            for &k in &box_grades {
                for body in &bodies {
                    out.push(
                        mon_group(group.clone(), supergroup.clone(), k, body.clone())
                            .expect("groups ordered"),
                    );
                }
            }
        }
    }

    for group in &groups {
        let mut elements = Vec::new();
        for agent in group.members() {
            for body in &bodies {
                if let Some(inner) = body.as_inner() {
                    for grade in tri_grades(bounds) {
                        elements.push(TriSpec {
                            agent: agent.clone(),
                            grade,
                            body: inner.clone(),
                        });
                    }
                }
            }
        }
        for premises in size_capped_subsets(&elements, bounds.max_omega) {
            if int_tri_box(&premises, group.clone(), 0).is_err() {
                continue; // conflicting grades for one (agent, body)
            }
            for &k in &box_grades {
                out.push(int_tri_box(&premises, group.clone(), k).expect("checked above"));
            }
        }
    }

    for group in &groups {
        let mut elements = Vec::new();
        for subgroup in group.subgroups() {
            for &k in &box_grades {
                for body in &bodies {
                    elements.push(BoxSpec {
                        group: subgroup.clone(),
                        grade: k,
                        body: body.clone(),
                    });
                }
            }
        }
        for premises in size_capped_subsets(&elements, bounds.max_psi) {
            for &k in &box_grades {
                out.push(int_box_box(&premises, group.clone(), k).expect("subgroups checked"));
            }
        }
    }

    out
}
