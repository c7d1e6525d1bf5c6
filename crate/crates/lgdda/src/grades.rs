//! Arithmetic and combinatorics over the grade domain: the natural numbers
//! extended with an absorbing top element `w` (written ω in math text).
//!
//! Grades measure belief strength, implausibility, and distance. Sums absorb
//! `w`; the empty-set extrema default to the identity of the other bound:
//! a minimum over nothing is `w`, a maximum over nothing is `0`.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::agents::{Agent, Group};

/// An element of the extended naturals: a finite count or `w`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grade {
    Finite(u64),
    Omega,
}

pub use Grade::Omega;

impl Grade {
    pub const ZERO: Grade = Grade::Finite(0);
    pub const ONE: Grade = Grade::Finite(1);

    pub fn is_finite(self) -> bool {
        matches!(self, Grade::Finite(_))
    }

    pub fn as_finite(self) -> Option<u64> {
        match self {
            Grade::Finite(n) => Some(n),
            Grade::Omega => None,
        }
    }

    /// Subtraction against a finite amount: `w - n = w`, and finite
    /// differences must not underflow.
    pub fn saturating_omega_sub(self, rhs: u64) -> Grade {
        match self {
            Grade::Omega => Grade::Omega,
            Grade::Finite(n) => Grade::Finite(
                n.checked_sub(rhs)
                    .expect("grade subtraction must not underflow"),
            ),
        }
    }
}

impl From<u64> for Grade {
    fn from(n: u64) -> Self {
        Grade::Finite(n)
    }
}

impl Add for Grade {
    type Output = Grade;

    fn add(self, rhs: Grade) -> Grade {
        match (self, rhs) {
            (Grade::Finite(a), Grade::Finite(b)) => {
                Grade::Finite(a.checked_add(b).expect("grade sum overflow"))
            }
            _ => Grade::Omega,
        }
    }
}

impl Sum for Grade {
    fn sum<I: Iterator<Item = Grade>>(iter: I) -> Grade {
        iter.fold(Grade::ZERO, Add::add)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Finite(n) => write!(f, "{n}"),
            Grade::Omega => f.write_str("w"),
        }
    }
}

impl fmt::Debug for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Grade {
    type Err = GradeError;

    fn from_str(s: &str) -> Result<Self, GradeError> {
        if s == "w" {
            return Ok(Grade::Omega);
        }
        s.parse::<u64>()
            .map(Grade::Finite)
            .map_err(|_| GradeError::Malformed(s.to_string()))
    }
}

// Grades travel in JSON as plain integers, with the string "w" for omega.
impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Grade::Finite(n) => s.serialize_u64(*n),
            Grade::Omega => s.serialize_str("w"),
        }
    }
}

impl<'de> Deserialize<'de> for Grade {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Grade::Finite(n)),
            Raw::Str(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradeError {
    #[error("not a grade: {0:?} (expected a nonnegative integer or \"w\")")]
    Malformed(String),
    #[error("partition of infinite grade")]
    PartitionOfOmega,
}

/// Sum of a collection of grades; `w` absorbs.
pub fn grade_sum(values: impl IntoIterator<Item = Grade>) -> Grade {
    values.into_iter().sum()
}

/// Minimum with the empty-set default `w`.
pub fn min_star(values: impl IntoIterator<Item = Grade>) -> Grade {
    values.into_iter().min().unwrap_or(Grade::Omega)
}

/// Maximum with the empty-set default `0`.
pub fn max_star(values: impl IntoIterator<Item = Grade>) -> Grade {
    values.into_iter().max().unwrap_or(Grade::ZERO)
}

/// A division of a finite grade among the agents of a group: every member is
/// assigned a finite share and the shares sum to the divided grade.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    shares: BTreeMap<Agent, u64>,
}

impl Partition {
    pub fn share(&self, agent: &Agent) -> u64 {
        *self
            .shares
            .get(agent)
            .expect("agent outside the partitioned group")
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> + '_ {
        self.shares.keys()
    }

    /// Sum of the shares of the given agents (not necessarily the full group).
    pub fn sum_over<'a>(&self, agents: impl IntoIterator<Item = &'a Agent>) -> u64 {
        agents.into_iter().map(|a| self.share(a)).sum()
    }

    pub fn total(&self) -> u64 {
        self.shares.values().sum()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.shares.iter()).finish()
    }
}

/// Lazily enumerates all divisions of `k` among the members of a group, in
/// lexicographic order over the agent ordering: the first agent's share runs
/// 0..=k, then recursively for the remainder.
pub struct PartitionIter {
    members: Vec<Agent>,
    // shares for members[..depth] chosen so far; None once exhausted
    state: Option<Vec<u64>>,
    k: u64,
}

impl PartitionIter {
    fn new(k: u64, group: &Group) -> Self {
        let members: Vec<Agent> = group.members().cloned().collect();
        let mut first = vec![0; members.len()];
        // lexicographically least: everything on the last agent
        *first.last_mut().expect("group is nonempty") = k;
        PartitionIter {
            members,
            state: Some(first),
            k,
        }
    }

    fn emit(&self, shares: &[u64]) -> Partition {
        Partition {
            shares: self
                .members
                .iter()
                .cloned()
                .zip(shares.iter().copied())
                .collect(),
        }
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let shares = self.state.take()?;
        let out = self.emit(&shares);
        // advance: find the rightmost position before the last that can take
        // one unit from the tail, standard stars-and-bars successor
        let n = shares.len();
        let mut next = shares;
        let mut idx = None;
        for i in (0..n.saturating_sub(1)).rev() {
            let tail: u64 = next[i + 1..].iter().sum();
            if tail > 0 {
                idx = Some(i);
                break;
            }
        }
        if let Some(i) = idx {
            next[i] += 1;
            let used: u64 = next[..=i].iter().sum();
            for v in &mut next[i + 1..] {
                *v = 0;
            }
            next[n - 1] = self.k - used;
            self.state = Some(next);
        }
        Some(out)
    }
}

/// All divisions of `k` among the group, materialized in enumeration order.
/// The count is C(k + |J| - 1, |J| - 1). `w` cannot be divided.
pub fn partitions(k: Grade, group: &Group) -> Result<Vec<Partition>, GradeError> {
    Ok(partition_iter(k, group)?.collect())
}

/// Iterator form of [`partitions`], for callers that want to stop early.
pub fn partition_iter(k: Grade, group: &Group) -> Result<PartitionIter, GradeError> {
    match k {
        Grade::Omega => Err(GradeError::PartitionOfOmega),
        Grade::Finite(k) => Ok(PartitionIter::new(k, group)),
    }
}

/// Binomial coefficient, used to cross-check partition counts.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
