// SPDX-License-Identifier: Apache-2.0

//! Division of the projection on the problem setter's choice into two partial
//! projections, one credited to each measurement.
//!
//! A pair of shares is accepted when
//! 1. together they single out `b` within the family, with no information
//!    projected twice;
//! 2. each share on its own strictly lowers the entropy of both ρ_B and ρ_A
//!    of the final state, without fixing the solution by itself, and carries
//!    half of the choice (half the bits of `b` for Grover, half the table
//!    rows otherwise);
//!
//! and every pair meeting both conditions is returned.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::density::reduced_entropy;
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::measurement::{gf2_rank, project, Cell, Observable, Projection};
use crate::oracles::{Family, FamilyKind, FunctionTable};
use crate::state::{EnsembleState, Register, Registers, TOLERANCE};
use crate::unitaries::{Pipeline, Stage};

/// Parity observables on B with outcomes post-selected to match `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParityShare {
    width: u32,
    /// Reduced row-echelon basis of the spanned parity space.
    masks: Vec<u64>,
    outcomes: Vec<bool>,
}

impl ParityShare {
    /// The share spanned by `masks`, post-selected on `b`.
    pub fn new(masks: &[u64], b: &BitString) -> Result<Self> {
        let width = b.len();
        if masks.is_empty() || masks.iter().any(|&m| m == 0 || m >> width != 0) {
            return Err(Error::Argument("parity masks must be nonzero and fit the register".into()));
        }
        let masks = rref(masks);
        let outcomes = masks.iter().map(|&m| (m & b.value()).count_ones() % 2 == 1).collect();
        Ok(ParityShare { width, masks, outcomes })
    }

    /// Share made of single-cell observables.
    pub fn cells(positions: &[u32], b: &BitString) -> Result<Self> {
        let width = b.len();
        if positions.iter().any(|&p| p >= width) {
            return Err(Error::Argument(format!("cell outside a {width}-bit register")));
        }
        let masks: Vec<u64> = positions.iter().map(|&p| 1u64 << (width - 1 - p)).collect();
        Self::new(&masks, b)
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn rank(&self) -> usize {
        self.masks.len()
    }

    /// Whether the span is generated by single cells.
    pub fn is_cell_aligned(&self) -> bool {
        self.masks.iter().all(|m| m.count_ones() == 1)
    }

    fn admits(&self, b: u64) -> bool {
        self.masks.iter().zip(&self.outcomes).all(|(m, &o)| ((m & b).count_ones() % 2 == 1) == o)
    }
}

/// Canonical reduced row-echelon basis of the GF(2) span of `masks`.
fn rref(masks: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &m in masks {
        let mut x = m;
        for &b in &basis {
            if x & (1u64 << (63 - b.leading_zeros())) != 0 {
                x ^= b;
            }
        }
        if x != 0 {
            let lead = 1u64 << (63 - x.leading_zeros());
            for b in basis.iter_mut() {
                if *b & lead != 0 {
                    *b ^= x;
                }
            }
            basis.push(x);
        }
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    basis
}

/// A subset of the rows of `f_b`, with their values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfTable {
    source: BitString,
    n: u32,
    rows: BTreeMap<u64, u64>,
}

impl HalfTable {
    /// Rows `args` of `table`.
    pub fn of(table: &FunctionTable, args: &[u64]) -> Result<Self> {
        if args.is_empty() {
            return Err(Error::Argument("a half table needs at least one row".into()));
        }
        let mut rows = BTreeMap::new();
        for &a in args {
            if a >= table.domain_size() {
                return Err(Error::Argument(format!("row {a} outside the table")));
            }
            rows.insert(a, table.value(a));
        }
        Ok(HalfTable { source: table.choice(), n: table.n(), rows })
    }

    pub fn source(&self) -> BitString {
        self.source
    }

    pub fn rows(&self) -> &BTreeMap<u64, u64> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains_row(&self, a: u64) -> bool {
        self.rows.contains_key(&a)
    }

    fn admits(&self, t: &FunctionTable) -> bool {
        self.rows.iter().all(|(&a, &v)| t.value(a) == v)
    }
}

/// One of the two parts of a divided projection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Share {
    Parity(ParityShare),
    Rows(HalfTable),
}

impl Share {
    /// Amount of the choice carried: parity rank or row count.
    pub fn size(&self) -> usize {
        match self {
            Share::Parity(p) => p.rank(),
            Share::Rows(h) => h.len(),
        }
    }

    /// Whether the table `t` agrees with this share.
    pub fn admits(&self, t: &FunctionTable) -> bool {
        match self {
            Share::Parity(p) => p.admits(t.choice().value()),
            Share::Rows(h) => h.admits(t),
        }
    }

    /// Family members agreeing with this share.
    pub fn candidates<'f>(&self, family: &'f Family) -> Vec<&'f FunctionTable> {
        family.members().iter().filter(|t| self.admits(t)).collect()
    }

    /// The B observable whose post-selected outcome realizes the share, and
    /// that outcome.
    pub fn observable(&self, kind: FamilyKind, n: u32) -> (Observable, BitString) {
        match self {
            Share::Parity(p) => {
                let cells = p
                    .masks
                    .iter()
                    .map(|&m| Cell::Parity(BitString::from_value(m, p.width)))
                    .collect();
                let outcome = p.outcomes.iter().fold(0u64, |acc, &o| (acc << 1) | u64::from(o));
                (Observable::subset(Register::B, cells), BitString::from_value(outcome, p.rank() as u32))
            }
            Share::Rows(h) => {
                let w = kind.output_width(n);
                let mut cells = Vec::new();
                let mut outcome = 0u64;
                for (&a, &v) in &h.rows {
                    for k in 0..w {
                        cells.push(Cell::Bit(a as u32 * w + k));
                    }
                    outcome = (outcome << w) | v;
                }
                let bits = (h.rows.len() as u32) * w;
                (Observable::subset(Register::B, cells), BitString::from_value(outcome, bits))
            }
        }
    }

    fn label(&self, n: u32) -> String {
        match self {
            Share::Parity(p) => {
                let parts: Vec<String> = p
                    .masks
                    .iter()
                    .zip(&p.outcomes)
                    .map(|(&m, &o)| {
                        let name = if m.count_ones() == 1 {
                            format!("B{}", p.width - 1 - m.trailing_zeros())
                        } else {
                            format!("B[{}]", BitString::from_value(m, p.width))
                        };
                        format!("{name}={}", u8::from(o))
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
            Share::Rows(h) => {
                let w = h.source.len() / (1 << n);
                let parts: Vec<String> = h
                    .rows
                    .iter()
                    .map(|(&a, &v)| {
                        format!("{}:{}", BitString::from_value(a, n), BitString::from_value(v, w.max(1)))
                    })
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
        }
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Share::Parity(p) => p.width,
            Share::Rows(h) => h.n,
        };
        f.write_str(&self.label(n))
    }
}

/// A division of the projection on `b`: one share per measurement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SharingPair {
    pub alice: Share,
    pub bob: Share,
}

impl SharingPair {
    pub fn new(alice: Share, bob: Share) -> Self {
        SharingPair { alice, bob }
    }

    pub fn swapped(&self) -> Self {
        SharingPair { alice: self.bob.clone(), bob: self.alice.clone() }
    }

    /// Both assignments of the two shares to the two measurements.
    pub fn assignments(&self) -> [SharingPair; 2] {
        [self.clone(), self.swapped()]
    }

    /// True when both shares are spanned by single-cell observables (always
    /// the case for table-row shares).
    pub fn cells_only(&self) -> bool {
        [&self.alice, &self.bob].iter().all(|s| match s {
            Share::Parity(p) => p.is_cell_aligned(),
            Share::Rows(_) => true,
        })
    }
}

impl fmt::Display for SharingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.alice, self.bob)
    }
}

/// Why a share or a pair was rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "violation")]
pub enum Violation {
    /// The share is not of the kind the family uses, or disagrees with `b`.
    Inconsistent { reason: String },
    /// The two projections do not determine `b`.
    Underdetermined { remaining: Vec<BitString> },
    /// The two projections overlap: some information is projected twice.
    Redundant { overlap: String },
    /// The share's projection leaves the entropy of a register unchanged.
    NoEntropyReduction { register: Register, before: f64, after: f64 },
    /// The share alone already settles the problem.
    RevealsSolution { reason: String },
    /// The share does not carry half of the choice.
    WrongSize { size: usize, expected: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Inconsistent { reason } => write!(f, "inconsistent share: {reason}"),
            Violation::Underdetermined { remaining } => {
                write!(f, "does not determine the choice ({} candidates remain)", remaining.len())
            }
            Violation::Redundant { overlap } => write!(f, "projects twice on the same information ({overlap})"),
            Violation::NoEntropyReduction { register, before, after } => write!(
                f,
                "does not reduce the entropy of rho_{register:?} ({before:.6} -> {after:.6} bits)"
            ),
            Violation::RevealsSolution { reason } => write!(f, "share alone settles the problem: {reason}"),
            Violation::WrongSize { size, expected } => {
                write!(f, "share carries {size} units, expected one of {expected:?}")
            }
        }
    }
}

pub type Verdict = std::result::Result<(), Violation>;

/// Entropy change produced by one share on the final state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyDrop {
    pub b_before: f64,
    pub b_after: f64,
    pub a_before: f64,
    pub a_after: f64,
}

/// Result of carrying an Alice share back to the initial relativized state.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvancedKnowledge {
    pub share: Share,
    /// Projection of the initial state obtained by back evolution.
    pub projection: Projection,
    /// B values left in the back-evolved projection.
    pub initial_support: Vec<BitString>,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

/// Precomputed final state and entropies for one family.
#[derive(Debug, Clone)]
pub struct SharingEngine {
    family: Family,
    pipeline: Pipeline,
    final_state: EnsembleState,
    entropy_b: f64,
    entropy_a: f64,
}

impl SharingEngine {
    pub fn new(family: Family) -> Result<Self> {
        let pipeline = Pipeline::relativized(family.clone())?;
        let final_state = pipeline.final_state()?;
        let entropy_b = reduced_entropy(&final_state, Registers::B)?;
        let entropy_a = reduced_entropy(&final_state, Registers::A)?;
        Ok(SharingEngine { family, pipeline, final_state, entropy_b, entropy_a })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn final_state(&self) -> &EnsembleState {
        &self.final_state
    }

    /// `(S(ρ_B), S(ρ_A))` of the final state.
    pub fn final_entropies(&self) -> (f64, f64) {
        (self.entropy_b, self.entropy_a)
    }

    fn uses_parity_shares(&self) -> bool {
        self.family.kind() == FamilyKind::Grover
    }

    /// Allowed share sizes: half the bits of `b` (both roundings when the
    /// width is odd) or exactly half the table rows.
    pub fn half_sizes(&self) -> Vec<usize> {
        let n = self.family.n() as usize;
        if self.uses_parity_shares() {
            let mut v = vec![n / 2, n.div_ceil(2)];
            v.dedup();
            v
        } else {
            vec![1 << (n - 1)]
        }
    }

    fn table(&self, b: &BitString) -> Result<&FunctionTable> {
        self.family.member(b)
    }

    fn consistent(&self, share: &Share, b: &BitString) -> Verdict {
        let table = self.table(b).map_err(|e| Violation::Inconsistent { reason: e.to_string() })?;
        let kind_ok = matches!(
            (share, self.uses_parity_shares()),
            (Share::Parity(_), true) | (Share::Rows(_), false)
        );
        if !kind_ok {
            return Err(Violation::Inconsistent {
                reason: format!("{} shares are not used for {}", if self.uses_parity_shares() { "row" } else { "parity" }, self.family.kind()),
            });
        }
        let width_ok = match share {
            Share::Parity(p) => p.width == b.len(),
            Share::Rows(h) => h.n == self.family.n(),
        };
        if !width_ok || !share.admits(table) {
            return Err(Violation::Inconsistent { reason: format!("{share} disagrees with b = {b}") });
        }
        Ok(())
    }

    /// Entropies of ρ_B and ρ_A after post-selecting the share on the final state.
    pub fn entropy_drop(&self, share: &Share) -> Result<EntropyDrop> {
        let (obs, outcome) = share.observable(self.family.kind(), self.family.n());
        let proj = project(&self.final_state, &obs, &outcome)?;
        Ok(EntropyDrop {
            b_before: self.entropy_b,
            b_after: reduced_entropy(&proj.post, Registers::B)?,
            a_before: self.entropy_a,
            a_after: reduced_entropy(&proj.post, Registers::A)?,
        })
    }

    fn check_entropy(&self, share: &Share) -> Verdict {
        let drop = self.entropy_drop(share).map_err(|e| Violation::Inconsistent { reason: e.to_string() })?;
        if drop.b_after >= drop.b_before - TOLERANCE {
            return Err(Violation::NoEntropyReduction { register: Register::B, before: drop.b_before, after: drop.b_after });
        }
        if drop.a_after >= drop.a_before - TOLERANCE {
            return Err(Violation::NoEntropyReduction { register: Register::A, before: drop.a_before, after: drop.a_after });
        }
        Ok(())
    }

    fn check_size(&self, share: &Share) -> Verdict {
        let expected = self.half_sizes();
        if expected.contains(&share.size()) {
            Ok(())
        } else {
            Err(Violation::WrongSize { size: share.size(), expected })
        }
    }

    fn check_reveals(&self, share: &Share) -> Verdict {
        let Share::Rows(h) = share else { return Ok(()) };
        let distinct: BTreeSet<u64> = h.rows.values().copied().collect();
        match self.family.kind() {
            FamilyKind::DeutschJozsa if distinct.len() > 1 => Err(Violation::RevealsSolution {
                reason: "contains different values, so the function is already known to be balanced".into(),
            }),
            FamilyKind::DeutschJozsa if 2 * h.len() as u64 > self.family.domain_size() => {
                Err(Violation::RevealsSolution {
                    reason: "more than half the rows share one value, so the function is already known to be constant".into(),
                })
            }
            FamilyKind::Simon if distinct.len() < h.len() => Err(Violation::RevealsSolution {
                reason: "repeats a value, which already fixes the period".into(),
            }),
            _ => Ok(()),
        }
    }

    /// Per-share part of condition 2, for `b`.
    pub fn check_share(&self, share: &Share, b: &BitString) -> Verdict {
        self.consistent(share, b)?;
        if self.uses_parity_shares() {
            self.check_size(share)?;
            self.check_entropy(share)
        } else {
            self.check_entropy(share)?;
            self.check_reveals(share)?;
            self.check_size(share)
        }
    }

    /// Joint determination of `b` without duplicated information.
    pub fn check_condition_i(&self, pair: &SharingPair, b: &BitString) -> Verdict {
        self.consistent(&pair.alice, b)?;
        self.consistent(&pair.bob, b)?;
        match (&pair.alice, &pair.bob) {
            (Share::Parity(x), Share::Parity(y)) => {
                let joint: Vec<u64> = x.masks.iter().chain(&y.masks).copied().collect();
                let rank = gf2_rank(&joint);
                if rank < x.rank() + y.rank() {
                    return Err(Violation::Redundant {
                        overlap: format!("{} shared parity dimension(s)", x.rank() + y.rank() - rank),
                    });
                }
            }
            (Share::Rows(x), Share::Rows(y)) => {
                let common: Vec<String> = x
                    .rows
                    .keys()
                    .filter(|a| y.contains_row(**a))
                    .map(|&a| BitString::from_value(a, self.family.n()).to_string())
                    .collect();
                if !common.is_empty() {
                    return Err(Violation::Redundant { overlap: format!("rows {}", common.join(",")) });
                }
            }
            _ => unreachable!("consistency check rejects mixed share kinds"),
        }
        let remaining: Vec<BitString> = self
            .family
            .members()
            .iter()
            .filter(|t| pair.alice.admits(t) && pair.bob.admits(t))
            .map(|t| t.choice())
            .collect();
        if remaining != [*b] {
            return Err(Violation::Underdetermined { remaining });
        }
        Ok(())
    }

    /// Condition 2 for both shares of the pair.
    pub fn check_condition_ii(&self, pair: &SharingPair, b: &BitString) -> Verdict {
        self.check_share(&pair.alice, b)?;
        self.check_share(&pair.bob, b)
    }

    pub fn check_pair(&self, pair: &SharingPair, b: &BitString) -> Verdict {
        self.check_condition_i(pair, b)?;
        self.check_condition_ii(pair, b)
    }

    /// Every share of the candidate space for `b`: all parity subspaces of B
    /// for Grover, all nonempty proper row subsets otherwise.
    pub fn candidate_shares(&self, b: &BitString) -> Result<Vec<Share>> {
        let table = self.table(b)?;
        let out = if self.uses_parity_shares() {
            parity_subspaces(b.len())
                .into_iter()
                .map(|basis| ParityShare::new(&basis, b).map(Share::Parity))
                .collect::<Result<Vec<_>>>()?
        } else {
            let rows = table.domain_size();
            (1..(1u64 << rows) - 1)
                .map(|subset| {
                    let args: Vec<u64> = (0..rows).filter(|a| subset >> a & 1 == 1).collect();
                    HalfTable::of(table, &args).map(Share::Rows)
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(out)
    }

    /// Shares passing the per-share conditions, in canonical order.
    pub fn admissible_shares(&self, b: &BitString, exec: Parallelism) -> Result<Vec<Share>> {
        let candidates = self.candidate_shares(b)?;
        let verdicts = exec.map(&candidates, |s| self.check_share(s, b).is_ok());
        let mut out: Vec<Share> =
            candidates.into_iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(s, _)| s).collect();
        out.sort_by(|x, y| (x.size(), x).cmp(&(y.size(), y)));
        Ok(out)
    }

    /// All unordered pairs satisfying both conditions. Each pair is stored
    /// once, with the canonically smaller share as `alice`.
    pub fn enumerate_sharings(&self, b: &BitString, exec: Parallelism) -> Result<Vec<SharingPair>> {
        let shares = self.admissible_shares(b, exec)?;
        let pairs: Vec<(usize, usize)> = (0..shares.len()).tuple_combinations().collect();
        let ok = exec.map(&pairs, |&(i, j)| {
            let pair = SharingPair::new(shares[i].clone(), shares[j].clone());
            self.check_condition_i(&pair, b).is_ok()
        });
        Ok(pairs
            .into_iter()
            .zip(ok)
            .filter(|(_, ok)| *ok)
            .map(|((i, j), _)| SharingPair::new(shares[i].clone(), shares[j].clone()))
            .collect())
    }

    /// Admissible row shares of `b` (Deutsch–Jozsa and Simon only).
    pub fn good_half_tables(&self, b: &BitString) -> Result<Vec<HalfTable>> {
        if self.uses_parity_shares() {
            return Err(Error::Argument("half tables apply to table-valued families only".into()));
        }
        Ok(self
            .admissible_shares(b, Parallelism::Sequential)?
            .into_iter()
            .filter_map(|s| match s {
                Share::Rows(h) => Some(h),
                Share::Parity(_) => None,
            })
            .collect())
    }

    /// Post-selects the share on the final state and carries the projection
    /// back through every stage to the initial state.
    pub fn advanced_knowledge_projection(&self, b: &BitString, share: &Share) -> Result<AdvancedKnowledge> {
        self.check_share(share, b)
            .map_err(|v| Error::Argument(format!("{share} is not an admissible share of {b}: {v}")))?;
        let (obs, outcome) = share.observable(self.family.kind(), self.family.n());
        let end = project(&self.final_state, &obs, &outcome)?;
        let stages: Vec<Stage> = self.pipeline.stages();
        let back = end.back_evolve(&stages)?;
        let width = self.family.choice_width();
        Ok(AdvancedKnowledge {
            share: share.clone(),
            initial_support: back
                .post
                .support(Register::B)
                .into_iter()
                .map(|v| BitString::from_value(v, width))
                .collect(),
            entropy_before: reduced_entropy(&back.pre, Registers::B)?,
            entropy_after: reduced_entropy(&back.post, Registers::B)?,
            projection: back,
        })
    }
}

/// Canonical bases of every nonzero subspace of GF(2)^width.
fn parity_subspaces(width: u32) -> Vec<Vec<u64>> {
    let vectors: Vec<u64> = (1..1u64 << width).collect();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<u64>> = vec![Vec::new()];
    while let Some(basis) = frontier.pop() {
        for &v in &vectors {
            let mut extended = basis.clone();
            extended.push(v);
            let canon = rref(&extended);
            if canon.len() > basis.len() && seen.insert(canon.clone()) {
                frontier.push(canon);
            }
        }
    }
    let mut out: Vec<Vec<u64>> = seen.into_iter().collect();
    out.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
    out
}

/// Condition 1 for `pair` in `family`.
pub fn check_condition_i(pair: &SharingPair, family: &Family, b: &BitString) -> Result<Verdict> {
    Ok(SharingEngine::new(family.clone())?.check_condition_i(pair, b))
}

/// Condition 2 for `pair` in `family`.
pub fn check_condition_ii(pair: &SharingPair, family: &Family, b: &BitString) -> Result<Verdict> {
    Ok(SharingEngine::new(family.clone())?.check_condition_ii(pair, b))
}

pub fn enumerate_sharings(family: &Family, b: &BitString) -> Result<Vec<SharingPair>> {
    SharingEngine::new(family.clone())?.enumerate_sharings(b, Parallelism::default())
}

pub fn good_half_tables(family: &Family, b: &BitString) -> Result<Vec<HalfTable>> {
    SharingEngine::new(family.clone())?.good_half_tables(b)
}

pub fn advanced_knowledge_projection(family: &Family, b: &BitString, share: &Share) -> Result<AdvancedKnowledge> {
    SharingEngine::new(family.clone())?.advanced_knowledge_projection(b, share)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn engine(kind: FamilyKind, n: u32) -> SharingEngine {
        SharingEngine::new(Family::full(kind, n).unwrap()).unwrap()
    }

    fn rows(e: &SharingEngine, b: &str, args: &[&str]) -> Share {
        let t = e.family().member(&bs(b)).unwrap();
        let args: Vec<u64> = args.iter().map(|a| bs(a).value()).collect();
        Share::Rows(HalfTable::of(t, &args).unwrap())
    }

    fn cell(b: &str, pos: &[u32]) -> Share {
        Share::Parity(ParityShare::cells(pos, &bs(b)).unwrap())
    }

    #[test]
    fn subspace_counts() {
        // Gaussian binomials: 3 + 1 for n = 2; 15 + 35 + 15 + 1 for n = 4.
        assert_eq!(parity_subspaces(2).len(), 4);
        assert_eq!(parity_subspaces(4).len(), 66);
        assert_eq!(rref(&[0b11, 0b10]), rref(&[0b01, 0b10]));
    }

    #[test]
    fn grover_two_bits_has_three_pairs() {
        let e = engine(FamilyKind::Grover, 2);
        let pairs = e.enumerate_sharings(&bs("00"), Parallelism::Sequential).unwrap();
        let labels: Vec<String> = pairs.iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, ["{B1=0} / {B0=0}", "{B1=0} / {B[11]=0}", "{B0=0} / {B[11]=0}"]);
    }

    #[test]
    fn condition_i_examples() {
        let e = engine(FamilyKind::Grover, 2);
        let b = bs("00");
        assert!(e.check_condition_i(&SharingPair::new(cell("00", &[0]), cell("00", &[1])), &b).is_ok());
        assert!(matches!(
            e.check_condition_i(&SharingPair::new(cell("00", &[0]), cell("00", &[0])), &b),
            Err(Violation::Redundant { .. })
        ));
        let dj = engine(FamilyKind::DeutschJozsa, 2);
        let verdict = dj.check_condition_i(
            &SharingPair::new(rows(&dj, "0011", &["00"]), rows(&dj, "0011", &["11"])),
            &bs("0011"),
        );
        assert!(matches!(verdict, Err(Violation::Underdetermined { ref remaining }) if remaining.len() == 2));
    }

    #[test]
    fn condition_ii_examples() {
        let g = engine(FamilyKind::Grover, 4);
        let pair = SharingPair::new(cell("0000", &[0, 1]), cell("0000", &[2, 3]));
        assert!(g.check_pair(&pair, &bs("0000")).is_ok());

        let dj = engine(FamilyKind::DeutschJozsa, 2);
        let b = bs("0011");
        let good = SharingPair::new(rows(&dj, "0011", &["00", "01"]), rows(&dj, "0011", &["10", "11"]));
        assert!(dj.check_pair(&good, &b).is_ok());
        let bad = SharingPair::new(rows(&dj, "0011", &["00", "01"]), rows(&dj, "0011", &["11"]));
        assert!(dj.check_condition_i(&bad, &b).is_ok());
        assert!(matches!(
            dj.check_condition_ii(&bad, &b),
            Err(Violation::NoEntropyReduction { register: Register::A, .. })
        ));
    }

    #[test]
    fn dj_good_half_tables() {
        let dj = engine(FamilyKind::DeutschJozsa, 2);
        let tables = dj.good_half_tables(&bs("0011")).unwrap();
        let labels: Vec<String> = tables.iter().map(|h| Share::Rows(h.clone()).to_string()).collect();
        assert_eq!(labels, ["{00:0,01:0}", "{10:1,11:1}"]);
        assert_eq!(dj.good_half_tables(&bs("0000")).unwrap().len(), 6);
        assert_eq!(dj.enumerate_sharings(&bs("0000"), Parallelism::Sequential).unwrap().len(), 3);
        assert_eq!(dj.enumerate_sharings(&bs("0011"), Parallelism::Sequential).unwrap().len(), 1);
    }

    #[test]
    fn advanced_knowledge_halves_the_entropy() {
        let g = engine(FamilyKind::Grover, 2);
        let k = g.advanced_knowledge_projection(&bs("00"), &cell("00", &[0])).unwrap();
        assert_eq!(k.initial_support, [bs("00"), bs("01")]);
        assert!((k.entropy_before - 2.0).abs() < TOLERANCE);
        assert!((k.entropy_after - 1.0).abs() < TOLERANCE);

        let dj = engine(FamilyKind::DeutschJozsa, 2);
        let k = dj.advanced_knowledge_projection(&bs("0011"), &rows(&dj, "0011", &["00", "01"])).unwrap();
        assert_eq!(k.initial_support, [bs("0000"), bs("0011")]);

        let s = engine(FamilyKind::Simon, 2);
        let k = s.advanced_knowledge_projection(&bs("0011"), &rows(&s, "0011", &["01", "10"])).unwrap();
        assert_eq!(k.initial_support, [bs("0011"), bs("1010")]);

        assert!(g.advanced_knowledge_projection(&bs("00"), &cell("00", &[0, 1])).is_err());
    }

    #[test]
    fn swapped_pairs_stay_valid() {
        for (kind, n, b) in [(FamilyKind::Grover, 4, "0110"), (FamilyKind::Simon, 2, "0110"), (FamilyKind::DeutschJozsa, 2, "1111")] {
            let e = engine(kind, n);
            for pair in e.enumerate_sharings(&bs(b), Parallelism::default()).unwrap() {
                for assignment in pair.assignments() {
                    assert!(e.check_pair(&assignment, &bs(b)).is_ok(), "{assignment}");
                }
            }
        }
    }

    #[test]
    fn mixed_share_kinds_are_inconsistent() {
        let dj = engine(FamilyKind::DeutschJozsa, 2);
        let pair = SharingPair::new(cell("0011", &[0]), cell("0011", &[1]));
        assert!(matches!(dj.check_condition_i(&pair, &bs("0011")), Err(Violation::Inconsistent { .. })));
    }
}
