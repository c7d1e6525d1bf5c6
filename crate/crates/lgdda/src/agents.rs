//! Agent names and nonempty agent groups.
//!
//! Agents are ordered by name; that ordering is the one global tie-break used
//! everywhere determinism matters (partition enumeration, group iteration,
//! world naming in transformations).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An agent name. Cheap to clone; ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(Arc<str>);

impl Agent {
    pub fn new(name: impl AsRef<str>) -> Self {
        Agent(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Agent({})", self.0)
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Self {
        Agent::new(s)
    }
}

impl Serialize for Agent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Agent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Agent::new)
    }
}

/// A nonempty set of agents. Shared immutably, so clones are pointer bumps.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group(Arc<BTreeSet<Agent>>);

impl Group {
    /// Builds a group from its members. Empty input is rejected.
    pub fn new(members: impl IntoIterator<Item = Agent>) -> Result<Self, EmptyGroup> {
        let set: BTreeSet<Agent> = members.into_iter().collect();
        if set.is_empty() {
            return Err(EmptyGroup);
        }
        Ok(Group(Arc::new(set)))
    }

    pub fn singleton(agent: Agent) -> Self {
        Group::new([agent]).expect("singleton group is nonempty")
    }

    pub fn members(&self) -> impl Iterator<Item = &Agent> + '_ {
        self.0.iter()
    }

    // no is_empty: groups are nonempty by construction
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, agent: &Agent) -> bool {
        self.0.contains(agent)
    }

    pub fn is_subset(&self, other: &Group) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn as_set(&self) -> &BTreeSet<Agent> {
        &self.0
    }

    /// All nonempty subgroups, in a deterministic order (by size, then by
    /// member order). Includes the group itself.
    pub fn subgroups(&self) -> Vec<Group> {
        let members: Vec<Agent> = self.0.iter().cloned().collect();
        assert!(members.len() < 64, "subgroup enumeration limited to 63 agents");
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << members.len()) {
            let subset = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.clone());
            out.push(Group::new(subset).expect("mask is nonzero"));
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Nonempty *proper* subgroups.
    pub fn proper_subgroups(&self) -> Vec<Group> {
        let mut subs = self.subgroups();
        subs.retain(|g| g.len() < self.len());
        subs
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in self.0.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let members = Vec::<Agent>::deserialize(d)?;
        Group::new(members).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Error for an attempted empty group.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("group of agents must be nonempty")]
pub struct EmptyGroup;

/// Enumerates all nonempty groups over a declared agent set, in the order
/// used by the model transformations (size, then member order).
pub fn all_groups(agents: &BTreeSet<Agent>) -> Vec<Group> {
    match Group::new(agents.iter().cloned()) {
        Ok(g) => g.subgroups(),
        Err(EmptyGroup) => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag(s: &str) -> Agent {
        Agent::new(s)
    }

    #[test]
    fn group_rejects_empty() {
        assert_eq!(Group::new([]), Err(EmptyGroup));
    }

    #[test]
    fn group_dedups_and_orders() {
        let g = Group::new([ag("b"), ag("a"), ag("b")]).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.to_string(), "a b");
    }

    #[test]
    fn subgroups_of_pair() {
        let g = Group::new([ag("1"), ag("2")]).unwrap();
        let subs: Vec<String> = g.subgroups().iter().map(|s| s.to_string()).collect();
        assert_eq!(subs, vec!["1", "2", "1 2"]);
        let proper: Vec<String> = g.proper_subgroups().iter().map(|s| s.to_string()).collect();
        assert_eq!(proper, vec!["1", "2"]);
    }

    #[test]
    fn all_groups_count() {
        let agents: BTreeSet<Agent> = ["a", "b", "c"].into_iter().map(ag).collect();
        assert_eq!(all_groups(&agents).len(), 7);
    }
}
