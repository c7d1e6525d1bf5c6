//! Tableau decision procedure with countermodel extraction.
//!
//! A node is a set of formulas read conjunctively. Boolean structure is
//! saturated in place (double negations, conjunctions) or by branching
//! (negated conjunctions); a node closes on falsum, a complementary pair, or
//! an explicit-belief clash (a stored grade meets or exceeds a negated one).
//! Each negative box in an open saturated node is eliminated by guessing how
//! its budget splits among the group and which stored beliefs survive at the
//! witnessing successor: a division `delta` of the budget forces every
//! positive box whose subgroup share fits its grade, and a belief selection
//! is admissible when each member's dropped weight stays within their share.
//! The node is satisfiable exactly when every negative box has some
//! satisfiable successor node, and those successor choices assemble directly
//! into a model.
//!
//! The search is depth-first, one branch live at a time; successor candidates
//! are generated lazily in a fixed order (divisions lexicographically,
//! selections smallest-first), so runs are reproducible. `order_seed`
//! deliberately permutes the exploration order to exercise the claim that
//! verdicts do not depend on it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::agents::{Agent, Group};
use crate::formula::{InnerFormula, OuterFormula, Shape};
use crate::grades::{grade_sum, max_star, partitions, Grade, Partition};
use crate::kripke::{
    eval_designated, validate_qngdm_with, DoxModel, KripkeError, Limits, RhoTable, WorldId,
};
use crate::rng::SplitMix64;
use crate::semantics::BeliefBase;
use std::sync::Arc;

/// A tableau node: a finite set of formulas, all asserted at once.
pub type Node = BTreeSet<OuterFormula>;

/// Total connective-and-modality count of a node; every successor node is
/// strictly smaller, which is what bounds the branch length.
pub fn node_size(node: &Node) -> usize {
    node.iter().map(OuterFormula::connective_count).sum()
}

/// Resource budgets and exploration-order controls. Budgets default to
/// unbounded; exceeding one is an error, never a verdict.
#[derive(Clone, Debug, Default)]
pub struct TableauConfig {
    /// Cap on modal recursion depth.
    pub max_depth: Option<usize>,
    /// Cap on successor candidates generated per negative-box elimination.
    pub max_denominators: Option<u64>,
    /// When set, permutes box/division/selection exploration order.
    pub order_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Deepest modal recursion reached (root node is depth 0).
    pub max_depth: usize,
    pub nodes_visited: u64,
    pub denominators_generated: u64,
    /// Most formulas simultaneously held on the live branch.
    pub peak_branch_formulas: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("modal recursion depth exceeded the configured limit {limit}")]
    DepthBudget { limit: usize },
    #[error("negative-box elimination exceeded the configured limit of {limit} successor candidates")]
    DenominatorBudget { limit: u64 },
    #[error("extracted model failed re-verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SatResult {
    Sat,
    Unsat,
}

/// Witness data for one satisfiable node: the saturated formula set, plus one
/// chosen successor per negative box.
#[derive(Clone, Debug)]
pub struct SatTrace {
    pub formulas: Node,
    pub successors: Vec<BoxSuccessor>,
}

#[derive(Clone, Debug)]
pub struct BoxSuccessor {
    pub group: Group,
    pub grade: u64,
    pub body: OuterFormula,
    pub witness: Partition,
    pub trace: SatTrace,
}

/// One successor candidate of a negative-box elimination, materialized.
#[derive(Clone, Debug)]
pub struct Denominator {
    pub witness: Partition,
    pub formulas: Node,
    /// The eliminated negative box, as it appears in the node.
    pub source: OuterFormula,
}

/// What was asked of [`decide_formula`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Sat,
    Valid,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Sat,
    Unsat,
    Valid,
    Invalid,
}

impl Outcome {
    /// Exit-code convention: affirmative outcomes are 0, negative 1.
    pub fn affirmative(self) -> bool {
        matches!(self, Outcome::Sat | Outcome::Valid)
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Sat => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Valid => "valid",
            Outcome::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Witness model of the query (`sat` mode) or countermodel of the
    /// formula (`valid` mode); present only when extraction was requested
    /// and the relevant node was satisfiable.
    pub model: Option<DoxModel>,
    pub stats: Stats,
}

/// Decides satisfiability of a single formula, or its validity via the
/// negation. Extracted models are re-verified (evaluation plus the relaxed
/// model conditions) before being returned.
pub fn decide_formula(
    phi: &OuterFormula,
    mode: Mode,
    extract: bool,
    config: &TableauConfig,
) -> Result<Verdict, TableauError> {
    let query = match mode {
        Mode::Sat => phi.clone(),
        Mode::Valid => phi.clone().neg(),
    };
    let mut engine = Engine::new(config);
    let trace = engine.decide([query.clone()].into(), 0)?;
    let stats = engine.stats;
    assert!(
        stats.max_depth <= query.modal_depth() + 1,
        "branch depth {} escaped the modal depth bound {}",
        stats.max_depth,
        query.modal_depth() + 1
    );
    let model = match (&trace, extract) {
        (Some(trace), true) => {
            let model = extract_model(trace, &query.agents());
            verify_extraction(&model, &query)?;
            Some(model)
        }
        _ => None,
    };
    let outcome = match (mode, trace.is_some()) {
        (Mode::Sat, true) => Outcome::Sat,
        (Mode::Sat, false) => Outcome::Unsat,
        (Mode::Valid, true) => Outcome::Invalid,
        (Mode::Valid, false) => Outcome::Valid,
    };
    Ok(Verdict {
        outcome,
        model,
        stats,
    })
}

/// Decides satisfiability of a set of formulas.
pub fn decide_node(node: &Node, config: &TableauConfig) -> Result<(SatResult, Stats), TableauError> {
    let (trace, stats) = decide_node_traced(node, config)?;
    let result = if trace.is_some() {
        SatResult::Sat
    } else {
        SatResult::Unsat
    };
    Ok((result, stats))
}

/// Like [`decide_node`], returning the chosen open successor per negative box
/// when satisfiable.
pub fn decide_node_traced(
    node: &Node,
    config: &TableauConfig,
) -> Result<(Option<SatTrace>, Stats), TableauError> {
    let mut engine = Engine::new(config);
    let trace = engine.decide(node.clone(), 0)?;
    let bound = node.iter().map(OuterFormula::modal_depth).max().unwrap_or(0) + 1;
    assert!(
        engine.stats.max_depth <= bound,
        "branch depth {} escaped the modal depth bound {bound}",
        engine.stats.max_depth
    );
    Ok((trace, engine.stats))
}

/// Materializes every successor candidate of eliminating `negbox` in `node`,
/// deduplicated by formula set (first witness kept). `negbox` must be a
/// negative box belonging to the node.
pub fn box_elim(node: &Node, negbox: &OuterFormula) -> Vec<Denominator> {
    assert!(node.contains(negbox), "negative box must belong to the node");
    let (group, grade, body) = match negbox.shape() {
        Shape::Not(inner) => match inner.shape() {
            Shape::Box { group, grade, body } => {
                (group.clone(), grade, body.as_ref().clone())
            }
            _ => panic!("formula is not a negative box"),
        },
        _ => panic!("formula is not a negative box"),
    };
    let mut x = node.clone();
    x.remove(negbox);
    let numerator_size = node_size(node);
    let mut seen: BTreeSet<Node> = BTreeSet::new();
    let mut out = Vec::new();
    let mut iter = DenomIter::new(&x, &group, grade, &body);
    while let Some((witness, formulas)) = iter.next() {
        debug_assert!(node_size(&formulas) < numerator_size);
        if seen.insert(formulas.clone()) {
            out.push(Denominator {
                witness,
                formulas,
                source: negbox.clone(),
            });
        }
    }
    out
}

/// Builds the model a satisfiable decision describes: one world per trace
/// node, bases read off the stored positive beliefs, and each chosen box
/// witness attaching its successor at the split distances (all other
/// distances unreachable). `agents` should be the query's agent set so that
/// validation sweeps the right groups.
pub fn extract_model(trace: &SatTrace, agents: &BTreeSet<Agent>) -> DoxModel {
    let mut builder = ModelBuilder::default();
    let designated = builder.add(trace);
    DoxModel::new(
        agents.clone(),
        builder.worlds,
        designated,
        builder.valuation,
        builder.dox,
        Some(builder.rho),
    )
    .expect("extracted model parts are consistent")
}

#[derive(Default)]
struct ModelBuilder {
    worlds: Vec<WorldId>,
    valuation: BTreeMap<crate::formula::Atom, BTreeSet<WorldId>>,
    dox: BTreeMap<(Agent, WorldId), BeliefBase>,
    rho: RhoTable,
}

impl ModelBuilder {
    fn add(&mut self, trace: &SatTrace) -> WorldId {
        let id = WorldId::new(format!("w{}", self.worlds.len()));
        self.worlds.push(id.clone());

        let mut tri: BTreeMap<(Agent, Arc<InnerFormula>), Vec<Grade>> = BTreeMap::new();
        for f in &trace.formulas {
            match f.shape() {
                Shape::Atom(p) => {
                    self.valuation
                        .entry(p.clone())
                        .or_default()
                        .insert(id.clone());
                }
                Shape::Tri { agent, grade, body } => {
                    tri.entry((agent.clone(), body.clone())).or_default().push(grade);
                }
                _ => {}
            }
        }
        let mut bases: BTreeMap<Agent, BeliefBase> = BTreeMap::new();
        for ((agent, body), grades) in tri {
            bases
                .entry(agent)
                .or_default()
                .insert(body, max_star(grades));
        }
        for (agent, base) in bases {
            self.dox.insert((agent, id.clone()), base);
        }

        for succ in &trace.successors {
            let child = self.add(&succ.trace);
            for sub in succ.group.subgroups() {
                let d = Grade::Finite(succ.witness.sum_over(sub.members()));
                self.rho
                    .set(sub, id.clone(), child.clone(), d)
                    .expect("one edge per (group, parent, child)");
            }
        }
        id
    }
}

fn verify_extraction(model: &DoxModel, query: &OuterFormula) -> Result<(), TableauError> {
    if !eval_designated(model, query) {
        return Err(TableauError::VerificationFailed(format!(
            "extracted model does not satisfy {query}"
        )));
    }
    let limits = Limits {
        max_agents: model.agents().len().max(Limits::default().max_agents),
    };
    let report = validate_qngdm_with(model, &limits)?;
    if !report.ok() {
        return Err(TableauError::VerificationFailed(format!(
            "extracted model violates the relaxed conditions: {}",
            report.violations[0]
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// engine

struct Engine<'c> {
    config: &'c TableauConfig,
    stats: Stats,
    live: usize,
}

impl<'c> Engine<'c> {
    fn new(config: &'c TableauConfig) -> Self {
        Engine {
            config,
            stats: Stats::default(),
            live: 0,
        }
    }

    fn decide(&mut self, mut node: Node, depth: usize) -> Result<Option<SatTrace>, TableauError> {
        if let Some(limit) = self.config.max_depth {
            if depth > limit {
                return Err(TableauError::DepthBudget { limit });
            }
        }
        self.stats.nodes_visited += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);

        // in-place saturation of the linear boolean rules
        loop {
            if is_closed(&node) {
                return Ok(None);
            }
            let mut additions: Vec<OuterFormula> = Vec::new();
            for f in &node {
                match f.shape() {
                    Shape::Not(g) => {
                        if let Shape::Not(h) = g.shape() {
                            if !node.contains(&h) {
                                additions.push(h);
                            }
                        }
                    }
                    Shape::And(a, b) => {
                        if !node.contains(&a) {
                            additions.push(a);
                        }
                        if !node.contains(&b) {
                            additions.push(b);
                        }
                    }
                    _ => {}
                }
            }
            if additions.is_empty() {
                break;
            }
            node.extend(additions);
        }

        self.live += node.len();
        self.stats.peak_branch_formulas = self.stats.peak_branch_formulas.max(self.live);
        let result = self.decide_saturated(&node, depth);
        self.live -= node.len();
        result
    }

    /// Branch on the first unfulfilled negated conjunction; once none remain,
    /// eliminate the negative boxes.
    fn decide_saturated(
        &mut self,
        node: &Node,
        depth: usize,
    ) -> Result<Option<SatTrace>, TableauError> {
        for f in node {
            if let Shape::Not(g) = f.shape() {
                if let Shape::And(a, b) = g.shape() {
                    let (na, nb) = (a.neg(), b.neg());
                    if node.contains(&na) || node.contains(&nb) {
                        continue;
                    }
                    let mut order = [na, nb];
                    if let Some(mut rng) = self.order_rng(depth) {
                        rng.shuffle(&mut order);
                    }
                    let [first, second] = order;
                    let mut left = node.clone();
                    left.insert(first);
                    if let Some(trace) = self.decide(left, depth)? {
                        return Ok(Some(trace));
                    }
                    let mut right = node.clone();
                    right.insert(second);
                    return self.decide(right, depth);
                }
            }
        }

        let mut negboxes: Vec<(Group, u64, OuterFormula)> = Vec::new();
        for f in node {
            if let Shape::Not(g) = f.shape() {
                if let Shape::Box { group, grade, body } = g.shape() {
                    negboxes.push((group.clone(), grade, body.as_ref().clone()));
                }
            }
        }
        if let Some(mut rng) = self.order_rng(depth) {
            rng.shuffle(&mut negboxes);
        }

        let mut successors = Vec::new();
        for (group, grade, body) in negboxes {
            let negbox = OuterFormula::boxed(group.clone(), grade, body.clone()).neg();
            let mut x = node.clone();
            x.remove(&negbox);
            match self.eliminate(&x, &group, grade, &body, depth)? {
                Some((witness, trace)) => successors.push(BoxSuccessor {
                    group,
                    grade,
                    body,
                    witness,
                    trace,
                }),
                None => return Ok(None),
            }
        }
        Ok(Some(SatTrace {
            formulas: node.clone(),
            successors,
        }))
    }

    /// Searches the successor candidates of one negative box for a
    /// satisfiable one, depth-first, skipping duplicate candidate sets.
    fn eliminate(
        &mut self,
        x: &Node,
        group: &Group,
        grade: u64,
        body: &OuterFormula,
        depth: usize,
    ) -> Result<Option<(Partition, SatTrace)>, TableauError> {
        let mut generated: u64 = 0;
        let mut seen: BTreeSet<Node> = BTreeSet::new();
        let mut run = |engine: &mut Self,
                       witness: Partition,
                       formulas: Node|
         -> Result<Option<(Partition, SatTrace)>, TableauError> {
            generated += 1;
            if let Some(limit) = engine.config.max_denominators {
                if generated > limit {
                    return Err(TableauError::DenominatorBudget { limit });
                }
            }
            engine.stats.denominators_generated += 1;
            if !seen.insert(formulas.clone()) {
                return Ok(None);
            }
            Ok(engine
                .decide(formulas, depth + 1)?
                .map(|trace| (witness, trace)))
        };

        if let Some(mut rng) = self.order_rng(depth) {
            // seeded mode trades laziness for a full shuffle
            let mut all: Vec<(Partition, Node)> = Vec::new();
            let mut iter = DenomIter::new(x, group, grade, body);
            while let Some(pair) = iter.next() {
                all.push(pair);
            }
            rng.shuffle(&mut all);
            for (witness, formulas) in all {
                if let Some(found) = run(self, witness, formulas)? {
                    return Ok(Some(found));
                }
            }
        } else {
            let mut iter = DenomIter::new(x, group, grade, body);
            while let Some((witness, formulas)) = iter.next() {
                if let Some(found) = run(self, witness, formulas)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }

    fn order_rng(&self, depth: usize) -> Option<SplitMix64> {
        self.config.order_seed.map(|seed| {
            SplitMix64::new(
                seed ^ self.stats.nodes_visited.wrapping_mul(0x9e3779b9) ^ (depth as u64) << 32,
            )
        })
    }
}

/// Closure test: falsum, negated verum, a complementary pair, or a stored
/// belief grade meeting a negated one.
fn is_closed(node: &Node) -> bool {
    let mut strongest: BTreeMap<(&Agent, &Arc<InnerFormula>), Grade> = BTreeMap::new();
    for f in node {
        if let Shape::Tri { agent, grade, body } = f.shape() {
            let slot = strongest.entry((agent, body)).or_insert(Grade::ZERO);
            *slot = (*slot).max(grade);
        }
    }
    for f in node {
        match f.shape() {
            Shape::Bot => return true,
            Shape::Not(g) => {
                if node.contains(&g) {
                    return true;
                }
                match g.shape() {
                    Shape::Top => return true,
                    // ~B{i,k'} against B{i,k} with k' <= k
                    Shape::Tri { agent, grade, body }
                        if strongest
                            .get(&(agent, body))
                            .is_some_and(|stored| grade <= *stored) =>
                    {
                        return true;
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    false
}

// ---------------------------------------------------------------------------
// successor candidate generation

/// Lazily enumerates the `(division, node)` successor candidates of a
/// negative-box elimination: divisions of the budget in lexicographic order,
/// and for each, belief-keeping selections smallest-first. A selection keeps
/// a (member, body) pair in the successor; it is admissible when every
/// member's dropped weight fits their share of the division.
struct DenomIter {
    deltas: Vec<Partition>,
    delta_idx: usize,
    neg_body: OuterFormula,
    /// positive boxes of the source node: (group, grade, body)
    boxes: Vec<(Group, u64, OuterFormula)>,
    /// per (member, body): the strongest stored grade
    pool: Vec<PoolEntry>,
    group: Group,
    forced: Option<Node>,
    subsets: SubsetIter,
}

struct PoolEntry {
    agent: Agent,
    body: Arc<InnerFormula>,
    strongest: Grade,
}

impl DenomIter {
    fn new(x: &Node, group: &Group, grade: u64, body: &OuterFormula) -> Self {
        let deltas = partitions(Grade::Finite(grade), group).expect("box grades are finite");
        let mut boxes = Vec::new();
        let mut strongest: BTreeMap<(Agent, Arc<InnerFormula>), Grade> = BTreeMap::new();
        for f in x {
            match f.shape() {
                Shape::Box {
                    group: j,
                    grade: k,
                    body: b,
                } if j.is_subset(group) => {
                    boxes.push((j.clone(), k, b.as_ref().clone()));
                }
                Shape::Tri {
                    agent,
                    grade: k,
                    body: b,
                } if group.contains(agent) => {
                    let slot = strongest
                        .entry((agent.clone(), b.clone()))
                        .or_insert(Grade::ZERO);
                    *slot = (*slot).max(k);
                }
                _ => {}
            }
        }
        let pool: Vec<PoolEntry> = strongest
            .into_iter()
            .map(|((agent, body), strongest)| PoolEntry {
                agent,
                body,
                strongest,
            })
            .collect();
        let subsets = SubsetIter::new(pool.len());
        DenomIter {
            deltas,
            delta_idx: 0,
            neg_body: body.clone().neg(),
            boxes,
            pool,
            group: group.clone(),
            forced: None,
            subsets,
        }
    }

    fn forced_for(&self, delta: &Partition) -> Node {
        let mut forced: Node = [self.neg_body.clone()].into();
        for (j, k, b) in &self.boxes {
            if delta.sum_over(j.members()) <= *k {
                forced.insert(b.clone());
            }
        }
        forced
    }

    fn admissible(&self, delta: &Partition, mask: u64) -> bool {
        self.group.members().all(|agent| {
            let dropped = grade_sum(self.pool.iter().enumerate().filter_map(|(i, e)| {
                (e.agent == *agent && mask & (1 << i) == 0).then_some(e.strongest)
            }));
            dropped <= Grade::Finite(delta.share(agent))
        })
    }

    #[allow(clippy::should_implement_trait)]
    fn next(&mut self) -> Option<(Partition, Node)> {
        loop {
            if self.delta_idx >= self.deltas.len() {
                return None;
            }
            let delta = self.deltas[self.delta_idx].clone();
            if self.forced.is_none() {
                self.forced = Some(self.forced_for(&delta));
            }
            match self.subsets.next() {
                None => {
                    self.delta_idx += 1;
                    self.forced = None;
                    self.subsets = SubsetIter::new(self.pool.len());
                }
                Some(mask) => {
                    if !self.admissible(&delta, mask) {
                        continue;
                    }
                    let mut formulas = self.forced.clone().expect("computed above");
                    for (i, entry) in self.pool.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            formulas.insert(OuterFormula::lift(entry.body.clone()));
                        }
                    }
                    return Some((delta, formulas));
                }
            }
        }
    }
}

/// Subsets of `0..n` as bitmasks, in size order and lexicographic within a
/// size (Gosper's hack).
struct SubsetIter {
    n: usize,
    size: usize,
    mask: Option<u64>,
}

impl SubsetIter {
    fn new(n: usize) -> Self {
        assert!(n < 64, "selection pool too large");
        SubsetIter {
            n,
            size: 0,
            mask: Some(0),
        }
    }

    fn next(&mut self) -> Option<u64> {
        let current = self.mask?;
        self.mask = if current == 0 {
            (self.n > 0).then_some(1)
        } else {
            let c = current & current.wrapping_neg();
            let r = current + c;
            let next = (((r ^ current) >> 2) / c) | r;
            if next < (1u64 << self.n) {
                Some(next)
            } else if self.size + 1 < self.n {
                self.size += 1;
                Some((1u64 << (self.size + 1)) - 1)
            } else {
                None
            }
        };
        Some(current)
    }
}
