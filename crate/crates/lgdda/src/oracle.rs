//! Brute-force cross-validation of the tableau.
//!
//! Two independent pieces: a seeded random formula generator, and a bounded
//! exhaustive search over derived-distance models (worlds, valuations over
//! the formula's atoms, belief weights over a capped pool of the formula's
//! inner subformulas). A found model is a proof of satisfiability; exhaustion
//! is evidence only within the bounds. The candidate space is indexed, so the
//! search partitions cleanly across threads while "first model" stays the
//! first in enumeration order; the sequential entry points return identical
//! results.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::agents::{Agent, Group};
use crate::formula::{inner_subformulas, Atom, InnerFormula, OuterFormula, Shape};
use crate::grades::{grade_sum, Grade};
use crate::kripke::{eval_designated, DoxModel, WorldId};
use crate::rng::SplitMix64;
use crate::semantics::BeliefBase;
use crate::tableau::{decide_formula, Mode, Outcome, TableauConfig, TableauError};

/// Weights steering the random generator's connective choice.
#[derive(Clone, Copy, Debug)]
pub struct ConnectiveWeights {
    pub atom: u32,
    pub not: u32,
    pub and: u32,
    pub tri: u32,
    pub boxed: u32,
}

// Conjunction-heavy defaults: random boolean trees rarely contradict, and a
// corpus with almost no unsatisfiable members exercises the oracle poorly.
impl Default for ConnectiveWeights {
    fn default() -> Self {
        ConnectiveWeights {
            atom: 1,
            not: 4,
            and: 7,
            tri: 2,
            boxed: 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Agents are named "1".."n".
    pub agents: usize,
    /// Atoms are named "p", "q", ... .
    pub atoms: usize,
    /// Belief grades 1..=max, box budgets 0..=max.
    pub max_grade: u64,
    /// Maximum tree depth; depth 0 is an atom.
    pub max_depth: usize,
    pub seed: u64,
    pub weights: ConnectiveWeights,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            agents: 2,
            atoms: 2,
            max_grade: 2,
            max_depth: 3,
            seed: 0,
            weights: ConnectiveWeights::default(),
        }
    }
}

const ATOM_NAMES: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "x"];

/// Deterministic-per-seed random formula respecting the two-layer grammar.
pub fn random_formula(cfg: &GenConfig) -> OuterFormula {
    assert!(cfg.agents >= 1 && cfg.agents <= 8, "1..=8 agents supported");
    assert!(cfg.atoms >= 1 && cfg.atoms <= ATOM_NAMES.len());
    assert!(cfg.max_grade >= 1);
    let mut rng = SplitMix64::new(cfg.seed);
    gen(cfg, &mut rng, cfg.max_depth, false)
}

fn gen(cfg: &GenConfig, rng: &mut SplitMix64, depth: usize, inner_only: bool) -> OuterFormula {
    let w = &cfg.weights;
    let choices: &[(u32, u8)] = if depth == 0 {
        &[(1, 0)]
    } else if inner_only {
        &[(w.atom, 0), (w.not, 1), (w.and, 2), (w.tri, 3)]
    } else {
        &[(w.atom, 0), (w.not, 1), (w.and, 2), (w.tri, 3), (w.boxed, 4)]
    };
    let total: u32 = choices.iter().map(|(wt, _)| wt).sum();
    let mut roll = rng.below(total.max(1) as u64) as u32;
    let mut pick = 0u8;
    for (wt, tag) in choices {
        if roll < *wt {
            pick = *tag;
            break;
        }
        roll -= wt;
    }
    match pick {
        0 => OuterFormula::atom(ATOM_NAMES[rng.below(cfg.atoms as u64) as usize]),
        1 => gen(cfg, rng, depth - 1, inner_only).neg(),
        2 => {
            let a = gen(cfg, rng, depth - 1, inner_only);
            let b = gen(cfg, rng, depth - 1, inner_only);
            a.and(b)
        }
        3 => {
            let agent = Agent::new((1 + rng.below(cfg.agents as u64)).to_string());
            let grade = Grade::Finite(1 + rng.below(cfg.max_grade));
            let body = gen(cfg, rng, depth - 1, true);
            OuterFormula::tri(
                agent,
                grade,
                body.as_inner().expect("inner-only generation").clone(),
            )
        }
        _ => {
            let mask = 1 + rng.below((1u64 << cfg.agents) - 1);
            let members = (0..cfg.agents)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| Agent::new((i + 1).to_string()));
            let group = Group::new(members).expect("mask is nonzero");
            let grade = rng.below(cfg.max_grade + 1);
            OuterFormula::boxed(group, grade, gen(cfg, rng, depth - 1, false))
        }
    }
}

/// Bounds for [`bounded_search`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    /// Largest world count tried.
    pub max_worlds: usize,
    /// Belief weights drawn from 0..=max plus `w`.
    pub max_grade: u64,
    /// Cap on the candidate-belief pool per (agent, world); the pool holds
    /// the formula's belief bodies first, then its other inner subformulas.
    pub max_support: usize,
    /// Cap on candidate models examined across one search.
    pub budget: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_worlds: 2,
            max_grade: 2,
            max_support: 2,
            budget: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration budget of {budget} candidate models exhausted")]
    BudgetExhausted { budget: u64 },
}

/// One world-count level of the candidate space: a mixed-radix index over
/// valuation bits and per-(world, agent, pool-formula) weight digits.
struct Level {
    n_worlds: usize,
    atoms: Vec<Atom>,
    agents: Vec<Agent>,
    pool: Vec<Arc<InnerFormula>>,
    weight_radix: u64,
    total: u128,
    // lookup side of the candidate evaluator
    agent_index: BTreeMap<Agent, usize>,
    pool_index: BTreeMap<Arc<InnerFormula>, usize>,
    atom_index: BTreeMap<Atom, usize>,
    radix_pow: Vec<u128>,
}

impl Level {
    fn new(phi: &OuterFormula, bounds: &SearchBounds, n_worlds: usize) -> Level {
        let atoms: Vec<Atom> = phi.atoms().into_iter().collect();
        let agents: Vec<Agent> = phi.agents().into_iter().collect();

        // belief bodies first, then any other inner subformula, capped
        let mut pool: Vec<Arc<InnerFormula>> = Vec::new();
        let mut seen = BTreeSet::new();
        for f in crate::formula::subformula_closure(phi) {
            if let Shape::Tri { body, .. } = f.shape() {
                if seen.insert(body.clone()) {
                    pool.push(body.clone());
                }
            }
        }
        pool.sort();
        let mut rest: Vec<Arc<InnerFormula>> = inner_subformulas(phi)
            .into_iter()
            .filter(|f| !seen.contains(f))
            .collect();
        rest.sort();
        pool.extend(rest);
        pool.truncate(bounds.max_support);

        let weight_radix = bounds.max_grade + 2; // absent, 1..=max, w
        let val_bits = (n_worlds * atoms.len()) as u32;
        let weight_digits = (n_worlds * agents.len() * pool.len()) as u32;
        assert!(val_bits < 127, "candidate space index exceeds 128 bits");
        let total = (1u128 << val_bits)
            .checked_mul(
                (weight_radix as u128)
                    .checked_pow(weight_digits)
                    .expect("candidate space index exceeds 128 bits"),
            )
            .expect("candidate space index exceeds 128 bits");
        let radix_pow = (0..=weight_digits)
            .map(|j| (weight_radix as u128).pow(j))
            .collect();
        Level {
            agent_index: agents.iter().cloned().zip(0..).collect(),
            pool_index: pool.iter().cloned().zip(0..).collect(),
            atom_index: atoms.iter().cloned().zip(0..).collect(),
            n_worlds,
            atoms,
            agents,
            pool,
            weight_radix,
            total,
            radix_pow,
        }
    }

    fn max_finite(&self) -> u64 {
        self.weight_radix - 2
    }

    fn weight_digits(&self) -> usize {
        self.n_worlds * self.agents.len() * self.pool.len()
    }

    /// True when candidate `index` satisfies `phi` at the first world.
    /// Allocation-free; the hot path of the search.
    fn satisfies(&self, index: u128, phi: &OuterFormula) -> bool {
        Candidate { level: self, index }.outer(0, phi)
    }

    /// Decodes a candidate index into a derived-distance model. Weight digits
    /// vary fastest, valuation bits slowest, so candidates with fewer beliefs
    /// and emptier valuations come first.
    fn decode(&self, index: u128) -> DoxModel {
        let candidate = Candidate { level: self, index };
        let worlds: Vec<WorldId> = (0..self.n_worlds)
            .map(|i| WorldId::new(format!("w{i}")))
            .collect();

        let mut valuation: BTreeMap<Atom, BTreeSet<WorldId>> = BTreeMap::new();
        for (w, world) in worlds.iter().enumerate() {
            for (j, atom) in self.atoms.iter().enumerate() {
                if candidate.atom_bit(w, j) {
                    valuation
                        .entry(atom.clone())
                        .or_default()
                        .insert(world.clone());
                }
            }
        }

        let mut dox: BTreeMap<(Agent, WorldId), BeliefBase> = BTreeMap::new();
        for (w, world) in worlds.iter().enumerate() {
            for (a, agent) in self.agents.iter().enumerate() {
                let mut base = BeliefBase::new();
                for (j, formula) in self.pool.iter().enumerate() {
                    base.insert(formula.clone(), candidate.weight(w, a, j));
                }
                if !base.is_empty() {
                    dox.insert((agent.clone(), world.clone()), base);
                }
            }
        }

        DoxModel::new(
            self.agents.iter().cloned().collect(),
            worlds.clone(),
            worlds[0].clone(),
            valuation,
            dox,
            None,
        )
        .expect("decoded model parts are consistent")
    }
}

/// A candidate model viewed in place: valuation bits and weight digits are
/// read straight out of the index.
struct Candidate<'l> {
    level: &'l Level,
    index: u128,
}

impl Candidate<'_> {
    fn atom_bit(&self, world: usize, atom: usize) -> bool {
        let level = self.level;
        let val_bits = self.index / level.radix_pow[level.weight_digits()];
        let pos = world * level.atoms.len() + atom;
        (val_bits >> pos) & 1 == 1
    }

    fn weight(&self, world: usize, agent: usize, pool: usize) -> Grade {
        let level = self.level;
        let pos = (world * level.agents.len() + agent) * level.pool.len() + pool;
        let digit =
            (self.index / level.radix_pow[pos] % level.weight_radix as u128) as u64;
        match digit {
            0 => Grade::ZERO,
            d if d <= level.max_finite() => Grade::Finite(d),
            _ => Grade::Omega,
        }
    }

    fn stored_weight(&self, world: usize, agent: &Agent, body: &Arc<InnerFormula>) -> Grade {
        match (
            self.level.agent_index.get(agent),
            self.level.pool_index.get(body),
        ) {
            (Some(&a), Some(&j)) => self.weight(world, a, j),
            _ => Grade::ZERO,
        }
    }

    fn inner(&self, world: usize, f: &InnerFormula) -> bool {
        match f {
            InnerFormula::Top => true,
            InnerFormula::Bot => false,
            InnerFormula::Atom(p) => self
                .level
                .atom_index
                .get(p)
                .is_some_and(|&j| self.atom_bit(world, j)),
            InnerFormula::Not(x) => !self.inner(world, x),
            InnerFormula::And(a, b) => self.inner(world, a) && self.inner(world, b),
            InnerFormula::Tri { agent, grade, body } => {
                self.stored_weight(world, agent, body) >= *grade
            }
        }
    }

    /// Derived distance: pooled weight at `from` of pool formulas falsified
    /// at `to`.
    fn rho(&self, group: &Group, from: usize, to: usize) -> Grade {
        let mut sum = Grade::ZERO;
        for (j, formula) in self.level.pool.iter().enumerate() {
            let pooled = grade_sum(group.members().filter_map(|agent| {
                self.level
                    .agent_index
                    .get(agent)
                    .map(|&a| self.weight(from, a, j))
            }));
            if pooled > Grade::ZERO && !self.inner(to, formula) {
                sum = sum + pooled;
            }
        }
        sum
    }

    // plain matches, no `shape()`: cloning shared Arcs in this loop would
    // serialize the worker threads on refcount cache lines
    fn outer(&self, world: usize, phi: &OuterFormula) -> bool {
        match phi {
            OuterFormula::Inner(a) => self.inner(world, a),
            OuterFormula::Not(x) => !self.outer(world, x),
            OuterFormula::And(a, b) => self.outer(world, a) && self.outer(world, b),
            OuterFormula::Box { group, grade, body } => {
                (0..self.level.n_worlds).all(|u| {
                    self.rho(group, world, u) > Grade::Finite(*grade) || self.outer(u, body)
                })
            }
        }
    }
}

/// Exhaustively searches derived-distance models for one satisfying `phi` at
/// its first world, smallest candidates first. `Ok(None)` means no model
/// within bounds; a budget overrun is an error, not evidence.
pub fn bounded_search(
    phi: &OuterFormula,
    bounds: &SearchBounds,
) -> Result<Option<DoxModel>, OracleError> {
    #[cfg(feature = "parallel")]
    {
        search_impl(phi, bounds, |level, limit| {
            let limit = usize::try_from(limit).expect("budget fits the address space");
            // coarse batches: candidates cost microseconds, so fine-grained
            // splitting would eat the speedup
            (0..limit)
                .into_par_iter()
                .with_min_len(8192)
                .find_first(|&i| level.satisfies(i as u128, phi))
                .map(|i| level.decode(i as u128))
        })
    }
    #[cfg(not(feature = "parallel"))]
    {
        bounded_search_seq(phi, bounds)
    }
}

/// Sequential [`bounded_search`]; same results, one thread.
pub fn bounded_search_seq(
    phi: &OuterFormula,
    bounds: &SearchBounds,
) -> Result<Option<DoxModel>, OracleError> {
    search_impl(phi, bounds, |level, limit| {
        (0..limit)
            .find(|&i| level.satisfies(i as u128, phi))
            .map(|i| level.decode(i as u128))
    })
}

fn search_impl(
    phi: &OuterFormula,
    bounds: &SearchBounds,
    mut scan: impl FnMut(&Level, u64) -> Option<DoxModel>,
) -> Result<Option<DoxModel>, OracleError> {
    let mut remaining = bounds.budget;
    for n_worlds in 1..=bounds.max_worlds {
        let level = Level::new(phi, bounds, n_worlds);
        let limit = level.total.min(remaining as u128) as u64;
        if let Some(model) = scan(&level, limit) {
            // the in-place evaluator found it; the materialized model is
            // re-checked by the reference evaluator before leaving
            assert!(
                eval_designated(&model, phi),
                "candidate evaluator disagreed with the model evaluator"
            );
            return Ok(Some(model));
        }
        if (limit as u128) < level.total {
            return Err(OracleError::BudgetExhausted {
                budget: bounds.budget,
            });
        }
        remaining -= limit;
    }
    Ok(None)
}

/// Outcome counts of one cross-check run. Serializes stably, so identical
/// seeds and bounds reproduce identical reports byte for byte.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub n: usize,
    pub seed: u64,
    /// Satisfiable, extracted model re-verified.
    pub sat: usize,
    /// Unsatisfiable, confirmed by exhausting the bounded space.
    pub unsat_confirmed: usize,
    /// Unsatisfiable, oracle budget ran out before exhaustion.
    pub unsat_unconfirmed: usize,
    pub max_tableau_depth: usize,
}

/// A disagreement between the tableau and the oracle, with the offending
/// artifacts serialized for reproduction.
#[derive(Debug, Clone, thiserror::Error, Serialize)]
#[error("cross-check failure on formula #{index} `{formula}`: {kind}")]
pub struct CrossCheckFailure {
    pub index: usize,
    pub formula: String,
    pub kind: String,
    pub artifacts: serde_json::Value,
}

#[derive(Debug, thiserror::Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    Failure(Box<CrossCheckFailure>),
    #[error("tableau error on formula #{index} `{formula}`: {source}")]
    Tableau {
        index: usize,
        formula: String,
        source: TableauError,
    },
}

/// Runs `n` seeded random formulas through the tableau and cross-validates:
/// satisfiable verdicts must carry a model that re-verifies (the tableau
/// already enforces that), unsatisfiable ones must survive the bounded
/// search. Any disagreement aborts the run.
pub fn cross_check(
    n: usize,
    cfg: &GenConfig,
    bounds: &SearchBounds,
) -> Result<CrossCheckReport, CrossCheckError> {
    #[cfg(feature = "parallel")]
    {
        let results: Vec<Result<FormulaOutcome, CrossCheckError>> = (0..n)
            .into_par_iter()
            .map(|i| check_one(i, cfg, bounds))
            .collect();
        merge(n, cfg.seed, results)
    }
    #[cfg(not(feature = "parallel"))]
    {
        cross_check_seq(n, cfg, bounds)
    }
}

/// Sequential [`cross_check`]; same report, one thread.
pub fn cross_check_seq(
    n: usize,
    cfg: &GenConfig,
    bounds: &SearchBounds,
) -> Result<CrossCheckReport, CrossCheckError> {
    let results: Vec<Result<FormulaOutcome, CrossCheckError>> =
        (0..n).map(|i| check_one(i, cfg, bounds)).collect();
    merge(n, cfg.seed, results)
}

enum FormulaOutcome {
    Sat { depth: usize },
    UnsatConfirmed { depth: usize },
    UnsatUnconfirmed { depth: usize },
}

/// Per-index formula seed, decorrelated from neighboring indices.
fn formula_seed(master: u64, index: usize) -> u64 {
    SplitMix64::new(master ^ (index as u64).wrapping_mul(0xa076_1d64_78bd_642f)).next_u64()
}

/// The `index`-th formula of the corpus [`cross_check`] walks for the given
/// configuration, so other suites can re-examine the same formulas.
pub fn corpus_formula(cfg: &GenConfig, index: usize) -> OuterFormula {
    random_formula(&GenConfig {
        seed: formula_seed(cfg.seed, index),
        ..*cfg
    })
}

fn check_one(
    index: usize,
    cfg: &GenConfig,
    bounds: &SearchBounds,
) -> Result<FormulaOutcome, CrossCheckError> {
    let phi = corpus_formula(cfg, index);
    let verdict = decide_formula(&phi, Mode::Sat, true, &TableauConfig::default()).map_err(
        |source| CrossCheckError::Tableau {
            index,
            formula: phi.to_string(),
            source,
        },
    )?;
    let depth = verdict.stats.max_depth;
    match verdict.outcome {
        Outcome::Sat => {
            // extraction is re-verified inside decide_formula; reaching here
            // means the model checked out
            debug_assert!(verdict.model.is_some());
            Ok(FormulaOutcome::Sat { depth })
        }
        Outcome::Unsat => match bounded_search(&phi, bounds) {
            Ok(None) => Ok(FormulaOutcome::UnsatConfirmed { depth }),
            Ok(Some(model)) => {
                let artifacts = serde_json::json!({
                    "model": crate::json::dox_model_to_value(&model),
                });
                Err(CrossCheckError::Failure(Box::new(CrossCheckFailure {
                    index,
                    formula: phi.to_string(),
                    kind: "tableau says unsat but the bounded search found a model".into(),
                    artifacts,
                })))
            }
            Err(OracleError::BudgetExhausted { .. }) => {
                Ok(FormulaOutcome::UnsatUnconfirmed { depth })
            }
        },
        Outcome::Valid | Outcome::Invalid => unreachable!("sat mode"),
    }
}

fn merge(
    n: usize,
    seed: u64,
    results: Vec<Result<FormulaOutcome, CrossCheckError>>,
) -> Result<CrossCheckReport, CrossCheckError> {
    let mut report = CrossCheckReport {
        n,
        seed,
        ..Default::default()
    };
    for result in results {
        match result? {
            FormulaOutcome::Sat { depth } => {
                report.sat += 1;
                report.max_tableau_depth = report.max_tableau_depth.max(depth);
            }
            FormulaOutcome::UnsatConfirmed { depth } => {
                report.unsat_confirmed += 1;
                report.max_tableau_depth = report.max_tableau_depth.max(depth);
            }
            FormulaOutcome::UnsatUnconfirmed { depth } => {
                report.unsat_unconfirmed += 1;
                report.max_tableau_depth = report.max_tableau_depth.max(depth);
            }
        }
    }
    Ok(report)
}
