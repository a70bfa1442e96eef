// SPDX-License-Identifier: Apache-2.0

//! Worst-case query counts of deterministic classical algorithms, with and
//! without advanced knowledge of half the problem setter's choice.
//!
//! The count is the minimax value of the query game: the algorithm picks an
//! argument, an adversary answers with any value consistent with some
//! remaining candidate, and the game ends once every remaining candidate
//! gives the same answer to the goal.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::measurement::{measure, Observable};
use crate::oracles::{simon_period, Family, FamilyKind, FunctionTable};
use crate::sharing::{Share, SharingEngine};
use crate::state::{Register, TOLERANCE};
use crate::unitaries::{default_rounds, Pipeline};

/// Upper bound on the number of knowledge states the exhaustive search may visit.
pub const MAX_GAME_STATES: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// Learn `b` itself.
    IdentifyB,
    /// Grover: find the marked argument. Deutsch–Jozsa: constant or
    /// balanced. Simon: the period.
    SolveProblem,
}

fn answer(kind: FamilyKind, goal: Goal, t: &FunctionTable) -> Result<u64> {
    Ok(match (goal, kind) {
        (Goal::IdentifyB, _) | (Goal::SolveProblem, FamilyKind::Grover) => t.choice().value(),
        (Goal::SolveProblem, FamilyKind::DeutschJozsa) => u64::from(t.is_constant()),
        (Goal::SolveProblem, FamilyKind::Simon) => simon_period(t)?.h.value(),
    })
}

/// What a classical algorithm knows about `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeState {
    candidates: Vec<BitString>,
    log: Vec<(BitString, BitString)>,
}

impl KnowledgeState {
    /// No knowledge beyond the family.
    pub fn full(family: &Family) -> Self {
        KnowledgeState { candidates: family.members().iter().map(|t| t.choice()).collect(), log: Vec::new() }
    }

    /// The members agreeing with `share`.
    pub fn from_share(family: &Family, share: &Share) -> Result<Self> {
        let candidates: Vec<BitString> = share.candidates(family).iter().map(|t| t.choice()).collect();
        Self::from_candidates(family, &candidates)
    }

    pub fn from_candidates(family: &Family, candidates: &[BitString]) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Argument("knowledge must leave at least one candidate".into()));
        }
        let mut sorted = Vec::with_capacity(candidates.len());
        for b in candidates {
            family.member(b)?;
            sorted.push(*b);
        }
        sorted.sort_by_key(|b| family.position(b));
        sorted.dedup();
        Ok(KnowledgeState { candidates: sorted, log: Vec::new() })
    }

    /// Records `f(a) = value` and drops the candidates that disagree.
    pub fn observe(&self, family: &Family, a: &BitString, value: &BitString) -> Result<Self> {
        let mut candidates = Vec::new();
        for b in &self.candidates {
            if family.member(b)?.value(a.value()) == value.value() {
                candidates.push(*b);
            }
        }
        if candidates.is_empty() {
            return Err(Error::Argument(format!("no candidate has f({a}) = {value}")));
        }
        let mut log = self.log.clone();
        log.push((*a, *value));
        Ok(KnowledgeState { candidates, log })
    }

    pub fn candidates(&self) -> &[BitString] {
        &self.candidates
    }

    pub fn log(&self) -> &[(BitString, BitString)] {
        &self.log
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryGameResult {
    pub worst_case_queries: u32,
    /// Every first query achieving the minimax value (empty when no query is needed).
    pub optimal_first_queries: Vec<BitString>,
}

struct Game<'f> {
    tables: Vec<&'f FunctionTable>,
    answers: Vec<u64>,
    domain: u64,
}

impl Game<'_> {
    fn settled(&self, set: &FixedBitSet) -> bool {
        let mut it = set.ones().map(|i| self.answers[i]);
        let first = it.next();
        it.all(|x| Some(x) == first)
    }

    fn split(&self, set: &FixedBitSet, a: u64) -> Vec<FixedBitSet> {
        let mut classes: BTreeMap<u64, FixedBitSet> = BTreeMap::new();
        for i in set.ones() {
            classes
                .entry(self.tables[i].value(a))
                .or_insert_with(|| FixedBitSet::with_capacity(self.tables.len()))
                .insert(i);
        }
        classes.into_values().collect()
    }

    fn value(&self, set: &FixedBitSet, memo: &mut HashMap<FixedBitSet, u32>) -> Result<u32> {
        if self.settled(set) {
            return Ok(0);
        }
        if let Some(&v) = memo.get(set) {
            return Ok(v);
        }
        let mut best: Option<u32> = None;
        for a in 0..self.domain {
            let classes = self.split(set, a);
            if classes.len() < 2 {
                continue;
            }
            let mut worst = 0;
            for c in &classes {
                worst = worst.max(self.value(c, memo)?);
                if best.is_some_and(|b| worst + 1 >= b) {
                    break;
                }
            }
            best = Some(best.map_or(worst + 1, |b| b.min(worst + 1)));
        }
        let v = best.ok_or_else(|| {
            Error::Family("candidates with different answers cannot be told apart by any query".into())
        })?;
        memo.insert(set.clone(), v);
        Ok(v)
    }
}

/// Estimated number of distinct candidate sets reachable by queries.
fn state_bound(tables: &[&FunctionTable], domain: u64) -> u64 {
    let by_subsets = if tables.len() >= 63 { u64::MAX } else { 1u64 << tables.len() };
    let mut by_tables: u64 = 1;
    for a in 0..domain {
        let mut values: Vec<u64> = tables.iter().map(|t| t.value(a)).collect();
        values.sort_unstable();
        values.dedup();
        by_tables = by_tables.saturating_mul(values.len() as u64 + 1);
    }
    by_subsets.min(by_tables)
}

pub fn worst_case_queries(family: &Family, goal: Goal, knowledge: &KnowledgeState) -> Result<QueryGameResult> {
    worst_case_queries_with(family, goal, knowledge, Parallelism::default())
}

/// Minimax search, fanned out over the first query.
pub fn worst_case_queries_with(
    family: &Family,
    goal: Goal,
    knowledge: &KnowledgeState,
    exec: Parallelism,
) -> Result<QueryGameResult> {
    let tables: Vec<&FunctionTable> =
        knowledge.candidates.iter().map(|b| family.member(b)).collect::<Result<_>>()?;
    let domain = family.domain_size();
    let bound = state_bound(&tables, domain);
    if bound > MAX_GAME_STATES {
        return Err(Error::Capability(format!(
            "exhaustive search over {} candidates could visit {bound} knowledge states (limit {MAX_GAME_STATES})",
            tables.len()
        )));
    }
    let answers = tables.iter().map(|t| answer(family.kind(), goal, t)).collect::<Result<_>>()?;
    let game = Game { tables, answers, domain };
    let mut root = FixedBitSet::with_capacity(game.tables.len());
    root.insert_range(..);
    if game.settled(&root) {
        return Ok(QueryGameResult { worst_case_queries: 0, optimal_first_queries: Vec::new() });
    }
    let per_query = exec.map_range(domain as usize, |a| -> Result<Option<u32>> {
        let classes = game.split(&root, a as u64);
        if classes.len() < 2 {
            return Ok(None);
        }
        let mut memo = HashMap::new();
        let mut worst = 0;
        for c in &classes {
            worst = worst.max(game.value(c, &mut memo)?);
        }
        Ok(Some(worst + 1))
    });
    let values: Vec<Option<u32>> = per_query.into_iter().collect::<Result<_>>()?;
    let best = values.iter().flatten().min().copied().ok_or_else(|| {
        Error::Family("candidates with different answers cannot be told apart by any query".into())
    })?;
    Ok(QueryGameResult {
        worst_case_queries: best,
        optimal_first_queries: values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == Some(best))
            .map(|(a, _)| BitString::from_value(a as u64, family.n()))
            .collect(),
    })
}

/// One row of the speed-up comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub kind: FamilyKind,
    pub n: u32,
    pub classical_no_knowledge: u32,
    /// Largest count over members and admissible Alice shares.
    pub classical_half_knowledge_max: u32,
    /// Smallest count over members and admissible Alice shares.
    pub classical_half_knowledge_min: u32,
    /// Oracle calls of the quantum algorithm: Grover rounds, one for
    /// Deutsch–Jozsa, n − 1 for Simon.
    pub quantum_oracle_calls: u32,
    /// Whether the quantum answer is read off with certainty (for Simon,
    /// after discarding the all-zero outcome).
    pub quantum_sharp: bool,
    /// Whether the quantum count equals every advanced-knowledge count.
    pub matches: bool,
}

fn quantum_calls(kind: FamilyKind, n: u32) -> u32 {
    match kind {
        FamilyKind::Simon => n - 1,
        _ => default_rounds(kind, n) as u32,
    }
}

fn quantum_sharp(family: &Family) -> Result<bool> {
    let kind = family.kind();
    let obs = Observable::content(Register::A);
    let pipeline = Pipeline::relativized(family.clone())?;
    for t in family.members() {
        let b = t.choice();
        let init = crate::measurement::project(&pipeline.initial_state(), &Observable::content(Register::B), &b)?;
        let dist = measure(&pipeline.run(&init.post)?, &obs)?;
        let sharp = match kind {
            FamilyKind::Grover => dist.iter().any(|o| o.eigenvalue == b && o.probability > 1.0 - TOLERANCE),
            FamilyKind::DeutschJozsa => {
                let p0 = dist.iter().find(|o| o.eigenvalue.is_zero()).map_or(0.0, |o| o.probability);
                !(TOLERANCE..=1.0 - TOLERANCE).contains(&p0)
            }
            // Certain only when a single nonzero string is orthogonal to h.
            FamilyKind::Simon => {
                let nonzero = dist.iter().filter(|o| !o.eigenvalue.is_zero() && o.probability > TOLERANCE).count();
                nonzero == 1
            }
        };
        if !sharp {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares classical counts with and without advanced knowledge against the
/// quantum oracle-call count.
pub fn speedup_report(family: &Family, exec: Parallelism) -> Result<SpeedupRow> {
    let goal = Goal::SolveProblem;
    let none = worst_case_queries_with(family, goal, &KnowledgeState::full(family), exec)?;
    let engine = SharingEngine::new(family.clone())?;
    let choices: Vec<BitString> = family.members().iter().map(|t| t.choice()).collect();
    let per_b = exec.map(&choices, |b| -> Result<Vec<u32>> {
        let mut shares: Vec<Share> = Vec::new();
        for pair in engine.enumerate_sharings(b, Parallelism::Sequential)? {
            for s in [pair.alice, pair.bob] {
                if !shares.contains(&s) {
                    shares.push(s);
                }
            }
        }
        shares
            .iter()
            .map(|s| {
                let k = KnowledgeState::from_share(family, s)?;
                Ok(worst_case_queries_with(family, goal, &k, Parallelism::Sequential)?.worst_case_queries)
            })
            .collect()
    });
    let mut counts = Vec::new();
    for c in per_b {
        counts.extend(c?);
    }
    let (max, min) = match (counts.iter().max(), counts.iter().min()) {
        (Some(&x), Some(&y)) => (x, y),
        _ => return Err(Error::Validation(format!("{} n={} admits no sharing", family.kind(), family.n()))),
    };
    let quantum = quantum_calls(family.kind(), family.n());
    Ok(SpeedupRow {
        kind: family.kind(),
        n: family.n(),
        classical_no_knowledge: none.worst_case_queries,
        classical_half_knowledge_max: max,
        classical_half_knowledge_min: min,
        quantum_oracle_calls: quantum,
        quantum_sharp: quantum_sharp(family)?,
        matches: max == quantum && min == quantum,
    })
}
