//! JSON wire formats.
//!
//! Belief-base model:
//! ```json
//! {"agents": ["Ann"],
//!  "designated": {"valuation": ["p"], "bases": {"Ann": [["p", 1]]}},
//!  "context": [{"valuation": [], "bases": {}}]}
//! ```
//!
//! Doxastic model:
//! ```json
//! {"agents": ["1"], "worlds": ["w", "u"], "designated": "w",
//!  "valuation": {"p": ["u"]},
//!  "dox": {"1": {"w": [["p", 2]]}},
//!  "rho": [{"group": ["1"], "from": "w", "to": "u", "d": 1}]}
//! ```
//!
//! Grades are integers or the string `"w"`; formulas are strings in the
//! concrete grammar; omitted distance entries mean unreachable; the `rho`
//! field itself is optional (absent = derived distances). Verdicts serialize
//! as `{"result": ..., "model": ..., "stats": {...}}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agents::{Agent, Group};
use crate::formula::{
    is_valid_agent_name, is_valid_atom_name, parse_inner_with_agents, Atom, ParseError,
};
use crate::grades::Grade;
use crate::kripke::{DoxModel, KripkeError, RhoTable, WorldId};
use crate::semantics::{BeliefBase, Magbm, SemanticsError, State};
use crate::tableau::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("in formula {context:?}: {source}")]
    Formula { context: String, source: ParseError },
    #[error("invalid atom name {0:?}")]
    BadAtomName(String),
    #[error("invalid agent name {0:?}")]
    BadAgentName(String),
    #[error("distance entry with an empty group")]
    EmptyGroup,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("unrecognized model layout (expected a \"context\" or a \"worlds\" field)")]
    UnknownKind,
}

fn syntax(e: serde_json::Error) -> JsonError {
    JsonError::Syntax(e.to_string())
}

#[derive(Serialize, Deserialize, Default)]
struct StateDto {
    #[serde(default)]
    valuation: Vec<String>,
    #[serde(default)]
    bases: BTreeMap<String, Vec<(String, Grade)>>,
}

#[derive(Serialize, Deserialize)]
struct MagbmDto {
    agents: Vec<String>,
    designated: StateDto,
    #[serde(default)]
    context: Vec<StateDto>,
}

#[derive(Serialize, Deserialize)]
struct RhoEntryDto {
    group: Vec<String>,
    from: String,
    to: String,
    d: Grade,
}

#[derive(Serialize, Deserialize)]
struct DoxModelDto {
    agents: Vec<String>,
    worlds: Vec<String>,
    designated: String,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    dox: BTreeMap<String, BTreeMap<String, Vec<(String, Grade)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<Vec<RhoEntryDto>>,
}

fn check_agents(names: &[String]) -> Result<BTreeSet<Agent>, JsonError> {
    for name in names {
        if !is_valid_agent_name(name) {
            return Err(JsonError::BadAgentName(name.clone()));
        }
    }
    Ok(names.iter().map(Agent::new).collect())
}

fn check_atom(name: &str) -> Result<Atom, JsonError> {
    if !is_valid_atom_name(name) {
        return Err(JsonError::BadAtomName(name.to_string()));
    }
    Ok(Atom::new(name))
}

fn base_from_dto(
    entries: &[(String, Grade)],
    agents: &BTreeSet<Agent>,
) -> Result<BeliefBase, JsonError> {
    let mut base = BeliefBase::new();
    for (text, grade) in entries {
        let formula =
            parse_inner_with_agents(text, agents).map_err(|source| JsonError::Formula {
                context: text.clone(),
                source,
            })?;
        base.insert(formula, *grade);
    }
    Ok(base)
}

fn base_to_dto(base: &BeliefBase) -> Vec<(String, Grade)> {
    base.support().map(|(f, g)| (f.to_string(), g)).collect()
}

fn state_from_dto(dto: &StateDto, agents: &BTreeSet<Agent>) -> Result<State, JsonError> {
    let mut bases = Vec::new();
    for (agent, entries) in &dto.bases {
        bases.push((Agent::new(agent), base_from_dto(entries, agents)?));
    }
    let valuation = dto
        .valuation
        .iter()
        .map(|p| check_atom(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(State::new(agents, bases, valuation)?)
}

fn state_to_dto(state: &State) -> StateDto {
    StateDto {
        valuation: state.valuation().iter().map(|p| p.to_string()).collect(),
        bases: state
            .bases()
            .filter(|(_, b)| !b.is_empty())
            .map(|(a, b)| (a.to_string(), base_to_dto(b)))
            .collect(),
    }
}

pub fn magbm_from_str(text: &str) -> Result<Magbm, JsonError> {
    let dto: MagbmDto = serde_json::from_str(text).map_err(syntax)?;
    magbm_from_dto(dto)
}

fn magbm_from_dto(dto: MagbmDto) -> Result<Magbm, JsonError> {
    let agents = check_agents(&dto.agents)?;
    let designated = state_from_dto(&dto.designated, &agents)?;
    let context = dto
        .context
        .iter()
        .map(|s| state_from_dto(s, &agents))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Magbm::new(agents, designated, context))
}

pub fn magbm_to_value(model: &Magbm) -> Value {
    let dto = MagbmDto {
        agents: model.agents.iter().map(|a| a.to_string()).collect(),
        designated: state_to_dto(&model.designated),
        context: model.context.iter().map(state_to_dto).collect(),
    };
    serde_json::to_value(dto).expect("model serializes")
}

pub fn dox_model_from_str(text: &str) -> Result<DoxModel, JsonError> {
    let dto: DoxModelDto = serde_json::from_str(text).map_err(syntax)?;
    dox_model_from_dto(dto)
}

fn dox_model_from_dto(dto: DoxModelDto) -> Result<DoxModel, JsonError> {
    let agents = check_agents(&dto.agents)?;
    let worlds: Vec<WorldId> = dto.worlds.iter().map(WorldId::new).collect();
    let mut valuation: BTreeMap<Atom, BTreeSet<WorldId>> = BTreeMap::new();
    for (atom, holders) in &dto.valuation {
        valuation.insert(
            check_atom(atom)?,
            holders.iter().map(WorldId::new).collect(),
        );
    }
    let mut dox: BTreeMap<(Agent, WorldId), BeliefBase> = BTreeMap::new();
    for (agent, per_world) in &dto.dox {
        for (world, entries) in per_world {
            let base = base_from_dto(entries, &agents)?;
            if !base.is_empty() {
                dox.insert((Agent::new(agent), WorldId::new(world)), base);
            }
        }
    }
    let rho = match dto.rho {
        None => None,
        Some(entries) => {
            let mut table = RhoTable::new();
            for entry in entries {
                let group = Group::new(entry.group.iter().map(Agent::new))
                    .map_err(|_| JsonError::EmptyGroup)?;
                table.set(
                    group,
                    WorldId::new(&entry.from),
                    WorldId::new(&entry.to),
                    entry.d,
                )?;
            }
            Some(table)
        }
    };
    Ok(DoxModel::new(
        agents,
        worlds,
        WorldId::new(&dto.designated),
        valuation,
        dox,
        rho,
    )?)
}

pub fn dox_model_to_value(model: &DoxModel) -> Value {
    let mut dox: BTreeMap<String, BTreeMap<String, Vec<(String, Grade)>>> = BTreeMap::new();
    for ((agent, world), base) in model.dox_entries() {
        if !base.is_empty() {
            dox.entry(agent.to_string())
                .or_default()
                .insert(world.to_string(), base_to_dto(base));
        }
    }
    let dto = DoxModelDto {
        agents: model.agents().iter().map(|a| a.to_string()).collect(),
        worlds: model.worlds().iter().map(|w| w.to_string()).collect(),
        designated: model.designated().to_string(),
        valuation: model
            .valuation()
            .iter()
            .filter(|(_, ws)| !ws.is_empty())
            .map(|(p, ws)| (p.to_string(), ws.iter().map(|w| w.to_string()).collect()))
            .collect(),
        dox,
        rho: model.rho().map(|table| {
            table
                .iter()
                .map(|((group, from, to), d)| RhoEntryDto {
                    group: group.members().map(|a| a.to_string()).collect(),
                    from: from.to_string(),
                    to: to.to_string(),
                    d,
                })
                .collect()
        }),
    };
    serde_json::to_value(dto).expect("model serializes")
}

/// A model file of either layout, told apart by its fields.
pub enum ModelFile {
    Magbm(Magbm),
    Dox(DoxModel),
}

pub fn model_from_str(text: &str) -> Result<ModelFile, JsonError> {
    let probe: Value = serde_json::from_str(text).map_err(syntax)?;
    let object = probe.as_object().ok_or(JsonError::UnknownKind)?;
    if object.contains_key("worlds") {
        Ok(ModelFile::Dox(dox_model_from_str(text)?))
    } else if object.contains_key("context") || object.contains_key("designated") {
        Ok(ModelFile::Magbm(magbm_from_str(text)?))
    } else {
        Err(JsonError::UnknownKind)
    }
}

pub fn verdict_to_value(verdict: &Verdict) -> Value {
    serde_json::json!({
        "result": verdict.outcome,
        "model": verdict.model.as_ref().map(dox_model_to_value),
        "stats": verdict.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::eval_designated;
    use crate::semantics::check;

    #[test]
    fn magbm_round_trip() {
        let text = r#"{
            "agents": ["Ann", "Bob"],
            "designated": {"valuation": ["p"], "bases": {"Ann": [["p", 1], ["~q", "w"]]}},
            "context": [{"valuation": []}, {"valuation": ["p", "q"]}]
        }"#;
        let model = magbm_from_str(text).unwrap();
        assert_eq!(model.context.len(), 2);
        let value = magbm_to_value(&model);
        let again = magbm_from_str(&value.to_string()).unwrap();
        assert_eq!(model, again);
        assert!(check(&model, &crate::formula::parse("B{Ann,1} p").unwrap()));
    }

    #[test]
    fn dox_model_round_trip() {
        let text = r#"{
            "agents": ["1"], "worlds": ["w", "u"], "designated": "w",
            "valuation": {"p": ["u"]},
            "dox": {"1": {"w": [["p", 2]]}},
            "rho": [{"group": ["1"], "from": "w", "to": "u", "d": 1}]
        }"#;
        let model = dox_model_from_str(text).unwrap();
        let value = dox_model_to_value(&model);
        let again = dox_model_from_str(&value.to_string()).unwrap();
        assert_eq!(model, again);
        assert!(eval_designated(
            &model,
            &crate::formula::parse("Dhat{1,1} p").unwrap()
        ));
    }

    #[test]
    fn rho_omitted_means_derived() {
        let text = r#"{"agents": ["1"], "worlds": ["w"], "designated": "w"}"#;
        let model = dox_model_from_str(text).unwrap();
        assert!(model.rho().is_none());
        // with rho present but empty, everything is unreachable instead
        let text = r#"{"agents": ["1"], "worlds": ["w"], "designated": "w", "rho": []}"#;
        let model = dox_model_from_str(text).unwrap();
        assert!(model.rho().is_some());
    }

    #[test]
    fn kind_detection() {
        assert!(matches!(
            model_from_str(r#"{"agents": [], "worlds": ["w"], "designated": "w"}"#),
            Ok(ModelFile::Dox(_))
        ));
        assert!(matches!(
            model_from_str(r#"{"agents": [], "designated": {}, "context": []}"#),
            Ok(ModelFile::Magbm(_))
        ));
        assert!(matches!(
            model_from_str(r#"{"foo": 1}"#),
            Err(JsonError::UnknownKind)
        ));
    }

    #[test]
    fn zero_grades_are_dropped_quietly() {
        let text = r#"{
            "agents": ["1"],
            "designated": {"bases": {"1": [["p", 0], ["q", 1]]}},
            "context": []
        }"#;
        let model = magbm_from_str(text).unwrap();
        let base = model.designated.base(&Agent::new("1"));
        assert_eq!(base.len(), 1);
    }

    #[test]
    fn rejects_bad_names_and_formulas() {
        let err = magbm_from_str(
            r#"{"agents": ["a b"], "designated": {}, "context": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::BadAgentName(_)));

        let err = magbm_from_str(
            r#"{"agents": ["1"], "designated": {"valuation": ["true"]}, "context": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::BadAtomName(_)));

        let err = magbm_from_str(
            r#"{"agents": ["1"], "designated": {"bases": {"1": [["D{1,0} p", 1]]}}, "context": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::Formula { .. }));

        let err = magbm_from_str(
            r#"{"agents": ["1"], "designated": {"bases": {"2": [["p", 1]]}}, "context": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::Formula { .. }) || matches!(err, JsonError::Semantics(_)));
    }

    #[test]
    fn undeclared_world_rejected() {
        let err = dox_model_from_str(
            r#"{"agents": ["1"], "worlds": ["w"], "designated": "u"}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::Kripke(KripkeError::UnknownWorld(_))));
    }
}
