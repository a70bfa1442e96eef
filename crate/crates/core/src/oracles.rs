// SPDX-License-Identifier: Apache-2.0

//! Function families indexed by the problem setter's choice `b`.
//!
//! For Grover's family `b` is the marked argument and the table is the
//! Kronecker delta. For Deutsch–Jozsa and Simon `b` *is* the table: the
//! function values for increasing arguments, concatenated left to right.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::state::RegisterLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Grover,
    #[serde(rename = "dj")]
    DeutschJozsa,
    Simon,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Grover => "grover",
            FamilyKind::DeutschJozsa => "dj",
            FamilyKind::Simon => "simon",
        }
    }

    /// Width of `f_b(a)`.
    pub fn output_width(&self, n: u32) -> u32 {
        match self {
            FamilyKind::Grover | FamilyKind::DeutschJozsa => 1,
            FamilyKind::Simon => n - 1,
        }
    }

    /// Width of the identifier `b`.
    pub fn choice_width(&self, n: u32) -> u32 {
        match self {
            FamilyKind::Grover => n,
            FamilyKind::DeutschJozsa => 1 << n,
            FamilyKind::Simon => (1 << n) * (n - 1),
        }
    }

    /// Largest argument width for which the member list is enumerated.
    pub fn max_enumerable_n(&self) -> u32 {
        match self {
            FamilyKind::Grover => 6,
            FamilyKind::DeutschJozsa | FamilyKind::Simon => 4,
        }
    }

    fn min_n(&self) -> u32 {
        match self {
            FamilyKind::Simon => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grover" => Ok(FamilyKind::Grover),
            "dj" | "deutsch-jozsa" => Ok(FamilyKind::DeutschJozsa),
            "simon" => Ok(FamilyKind::Simon),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// The table of `f_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionTable {
    kind: FamilyKind,
    n: u32,
    b: BitString,
}

impl FunctionTable {
    /// Builds the table for `b` without checking the family invariant.
    pub fn new(kind: FamilyKind, n: u32, b: BitString) -> Result<Self> {
        if n < kind.min_n() || kind.choice_width(n) > BitString::MAX_LEN {
            return Err(Error::Capability(format!("{kind} with n = {n} is not representable")));
        }
        if b.len() != kind.choice_width(n) {
            return Err(Error::Argument(format!(
                "{kind} choice for n = {n} needs {} bits, got {b}",
                kind.choice_width(n)
            )));
        }
        Ok(FunctionTable { kind, n, b })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn choice(&self) -> BitString {
        self.b
    }

    pub fn output_width(&self) -> u32 {
        self.kind.output_width(self.n)
    }

    pub fn domain_size(&self) -> u64 {
        1 << self.n
    }

    /// `f_b(a)` as an integer of `output_width` bits.
    pub fn value(&self, a: u64) -> u64 {
        debug_assert!(a < self.domain_size());
        match self.kind {
            FamilyKind::Grover => u64::from(a == self.b.value()),
            _ => {
                let w = self.output_width();
                self.b.field(a as u32 * w, w)
            }
        }
    }

    /// `(a, f_b(a))` for increasing `a`.
    pub fn rows(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.domain_size()).map(move |a| (a, self.value(a)))
    }

    pub fn is_constant(&self) -> bool {
        self.rows().map(|(_, v)| v).all_equal()
    }

    /// Checks the family invariant of this table.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::Grover => Ok(()),
            FamilyKind::DeutschJozsa => {
                let ones = self.rows().filter(|(_, v)| *v == 1).count() as u64;
                if ones == 0 || ones == self.domain_size() || 2 * ones == self.domain_size() {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "table {} is neither constant nor balanced ({ones} ones in {} rows)",
                        self.b,
                        self.domain_size()
                    )))
                }
            }
            FamilyKind::Simon => simon_period(self).map(|_| ()),
        }
    }
}

impl fmt::Display for FunctionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f_{}", self.b)
    }
}

/// Hidden period `h` of a Simon table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimonPeriod {
    pub h: BitString,
}

/// The unique nonzero `h` with `f(a) = f(a ⊕ h)` for all `a`.
pub fn simon_period(table: &FunctionTable) -> Result<SimonPeriod> {
    let n = table.n();
    let mut by_value: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (a, v) in table.rows() {
        by_value.entry(v).or_default().push(a);
    }
    let fmt_arg = |a: u64| BitString::from_value(a, n).to_string();
    let mut offending = Vec::new();
    let mut periods = Vec::new();
    for (v, args) in &by_value {
        if args.len() == 2 {
            periods.push((args[0] ^ args[1], args.clone()));
        } else {
            offending.push(format!(
                "value {v} appears {} time(s) at rows [{}]",
                args.len(),
                args.iter().map(|&a| fmt_arg(a)).join(", ")
            ));
        }
    }
    if offending.is_empty() {
        let h = periods[0].0;
        for (p, args) in &periods {
            if *p != h {
                offending.push(format!(
                    "rows {} and {} pair with period {} instead of {}",
                    fmt_arg(args[0]),
                    fmt_arg(args[1]),
                    fmt_arg(*p),
                    fmt_arg(h)
                ));
            }
        }
        if offending.is_empty() {
            return Ok(SimonPeriod { h: BitString::from_value(h, n) });
        }
    }
    Err(Error::Validation(format!("{} is not a Simon table: {}", table, offending.join("; "))))
}

/// All `s` with `s · h = 0 (mod 2)`.
pub fn orthogonal_strings(h: &SimonPeriod, n: u32) -> Result<Vec<BitString>> {
    if h.h.len() != n {
        return Err(Error::Dimension(format!("period {} is not {n} bits wide", h.h)));
    }
    if h.h.is_zero() {
        return Err(Error::Argument("the period must be nonzero".into()));
    }
    Ok(BitString::all(n).filter(|s| !s.dot(&h.h)).collect())
}

/// The unique nonzero `h` orthogonal to every string in `strings`, if the
/// strings pin it down.
pub fn solve_period(strings: &[BitString], n: u32) -> Option<BitString> {
    let mut solutions = BitString::all(n).filter(|h| !h.is_zero() && strings.iter().all(|s| !s.dot(h)));
    let first = solutions.next()?;
    solutions.next().is_none().then_some(first)
}

/// A set of tables sharing a kind and argument width, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    kind: FamilyKind,
    n: u32,
    members: Vec<FunctionTable>,
}

impl Family {
    /// Every member of the family.
    pub fn full(kind: FamilyKind, n: u32) -> Result<Self> {
        Ok(Family { kind, n, members: enumerate_family(kind, n)? })
    }

    /// An explicit subset of the family; each choice is validated.
    pub fn with_members(kind: FamilyKind, n: u32, choices: &[BitString]) -> Result<Self> {
        let family = Self::with_members_unchecked(kind, n, choices)?;
        for t in &family.members {
            t.validate().map_err(|e| Error::Family(format!("{t}: {e}")))?;
        }
        Ok(family)
    }

    /// An explicit subset whose tables are not checked against the family
    /// invariant. Used to build negative controls.
    pub fn with_members_unchecked(kind: FamilyKind, n: u32, choices: &[BitString]) -> Result<Self> {
        if choices.is_empty() {
            return Err(Error::Argument("a family needs at least one member".into()));
        }
        let mut members = Vec::with_capacity(choices.len());
        for &b in choices {
            let t = FunctionTable::new(kind, n, b)?;
            if members.contains(&t) {
                return Err(Error::Argument(format!("duplicate member {b}")));
            }
            members.push(t);
        }
        Ok(Family { kind, n, members })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[FunctionTable] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, b: &BitString) -> Option<usize> {
        self.members.iter().position(|t| t.choice() == *b)
    }

    pub fn member(&self, b: &BitString) -> Result<&FunctionTable> {
        self.members
            .iter()
            .find(|t| t.choice() == *b)
            .ok_or_else(|| Error::Family(format!("{b} is not a {} member for n = {}", self.kind, self.n)))
    }

    pub fn output_width(&self) -> u32 {
        self.kind.output_width(self.n)
    }

    pub fn choice_width(&self) -> u32 {
        self.kind.choice_width(self.n)
    }

    pub fn domain_size(&self) -> u64 {
        1 << self.n
    }

    /// Register layout for simulating this family: B holds `b`, A the
    /// argument and V the function value.
    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new(self.choice_width(), self.n, self.output_width())
    }

    /// Checks every member against the family invariant.
    pub fn validate(&self) -> Result<()> {
        self.members.iter().try_for_each(FunctionTable::validate)
    }
}

/// `f(b, a)` for a member `b` of the full family.
pub fn evaluate(kind: FamilyKind, n: u32, b: &BitString, a: &BitString) -> Result<BitString> {
    let table = FunctionTable::new(kind, n, *b).map_err(|e| Error::Family(e.to_string()))?;
    table.validate().map_err(|e| Error::Family(e.to_string()))?;
    if a.len() != n {
        return Err(Error::Argument(format!("argument {a} is not {n} bits wide")));
    }
    Ok(BitString::from_value(table.value(a.value()), table.output_width()))
}

/// All members of a family, in canonical order: Grover by increasing `b`;
/// Deutsch–Jozsa as each table with a leading 0 (increasing) followed by its
/// complement; Simon by increasing period, then increasing table.
pub fn enumerate_family(kind: FamilyKind, n: u32) -> Result<Vec<FunctionTable>> {
    if n < kind.min_n() || n > kind.max_enumerable_n() {
        return Err(Error::Capability(format!(
            "{kind} enumeration supports n in {}..={}, got {n}",
            kind.min_n(),
            kind.max_enumerable_n()
        )));
    }
    let width = kind.choice_width(n);
    let table = |v: u64| FunctionTable { kind, n, b: BitString::from_value(v, width) };
    let out = match kind {
        FamilyKind::Grover => (0..1u64 << n).map(table).collect(),
        FamilyKind::DeutschJozsa => {
            let rows = 1u32 << n;
            let full = (1u64 << rows) - 1;
            (0..1u64 << (rows - 1))
                .filter(|v| matches!(v.count_ones(), c if c == 0 || 2 * c == rows))
                .flat_map(|v| [table(v), table(v ^ full)])
                .collect()
        }
        FamilyKind::Simon => {
            let w = n - 1;
            let cosets = 1usize << (n - 1);
            let mut out = Vec::new();
            for h in 1..1u64 << n {
                let reps: Vec<u64> = (0..1u64 << n).filter(|&a| a < a ^ h).collect();
                let mut group: Vec<FunctionTable> = (0..cosets as u64)
                    .permutations(cosets)
                    .map(|values| {
                        let mut row_value = vec![0u64; 1 << n];
                        for (rep, val) in reps.iter().zip(values) {
                            row_value[*rep as usize] = val;
                            row_value[(*rep ^ h) as usize] = val;
                        }
                        table(row_value.iter().fold(0u64, |acc, &v| (acc << w) | v))
                    })
                    .collect();
                group.sort();
                out.extend(group);
            }
            out
        }
    };
    Ok(out)
}

/// On-disk description of a family: `{"kind": "dj", "n": 2, "members": ["0011", ...]}`.
/// `members` is optional and defaults to the whole family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub kind: FamilyKind,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<BitString>>,
}

impl FamilyFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("family file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn into_family(self) -> Result<Family> {
        match self.members {
            None => Family::full(self.kind, self.n),
            Some(m) => Family::with_members(self.kind, self.n, &m),
        }
    }

    /// Like [`into_family`](Self::into_family) but leaves table invariants unchecked.
    pub fn into_family_unchecked(self) -> Result<Family> {
        match self.members {
            None => Family::full(self.kind, self.n),
            Some(m) => Family::with_members_unchecked(self.kind, self.n, &m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn choices(kind: FamilyKind, n: u32) -> Vec<String> {
        enumerate_family(kind, n).unwrap().iter().map(|t| t.choice().to_string()).collect()
    }

    #[test]
    fn member_counts_and_order() {
        assert_eq!(choices(FamilyKind::Grover, 2), ["00", "01", "10", "11"]);
        assert_eq!(
            choices(FamilyKind::DeutschJozsa, 2),
            ["0000", "1111", "0011", "1100", "0101", "1010", "0110", "1001"]
        );
        assert_eq!(choices(FamilyKind::Simon, 2), ["0011", "1100", "0101", "1010", "0110", "1001"]);
        // 2 constants + C(8,4) balanced; 7 periods × 4! value assignments.
        assert_eq!(enumerate_family(FamilyKind::DeutschJozsa, 3).unwrap().len(), 72);
        assert_eq!(enumerate_family(FamilyKind::Simon, 3).unwrap().len(), 168);
    }

    #[test]
    fn unsupported_sizes() {
        assert!(matches!(enumerate_family(FamilyKind::Grover, 7), Err(Error::Capability(_))));
        assert!(matches!(enumerate_family(FamilyKind::Simon, 1), Err(Error::Capability(_))));
        assert!(matches!(enumerate_family(FamilyKind::DeutschJozsa, 5), Err(Error::Capability(_))));
    }

    #[test]
    fn every_member_validates() {
        for kind in [FamilyKind::Grover, FamilyKind::DeutschJozsa, FamilyKind::Simon] {
            for n in 2..=3 {
                let family = Family::full(kind, n).unwrap();
                family.validate().unwrap();
                let mut sorted = family.members().to_vec();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), family.len());
            }
        }
    }

    #[test]
    fn grover_delta_sums_to_one() {
        for t in enumerate_family(FamilyKind::Grover, 3).unwrap() {
            assert_eq!(t.rows().map(|(_, v)| v).sum::<u64>(), 1);
        }
    }

    #[test]
    fn dj_has_two_constants_and_balanced_halves() {
        let members = enumerate_family(FamilyKind::DeutschJozsa, 3).unwrap();
        assert_eq!(members.iter().filter(|t| t.is_constant()).count(), 2);
        for t in members.iter().filter(|t| !t.is_constant()) {
            assert_eq!(t.rows().map(|(_, v)| v).sum::<u64>(), 4);
        }
    }

    #[test]
    fn evaluate_examples() {
        let g = FamilyKind::Grover;
        assert_eq!(evaluate(g, 2, &bs("00"), &bs("00")).unwrap(), bs("1"));
        assert_eq!(evaluate(g, 2, &bs("00"), &bs("01")).unwrap(), bs("0"));
        assert_eq!(evaluate(FamilyKind::DeutschJozsa, 2, &bs("0011"), &bs("10")).unwrap(), bs("1"));
        assert_eq!(evaluate(FamilyKind::Simon, 2, &bs("0011"), &bs("01")).unwrap(), bs("0"));
        assert!(matches!(
            evaluate(FamilyKind::DeutschJozsa, 2, &bs("0001"), &bs("00")),
            Err(Error::Family(_))
        ));
    }

    #[test]
    fn simon_periods_match_the_table_headers() {
        let expected = [("0011", "01"), ("1100", "01"), ("0101", "10"), ("1010", "10"), ("0110", "11"), ("1001", "11")];
        for (b, h) in expected {
            let t = FunctionTable::new(FamilyKind::Simon, 2, bs(b)).unwrap();
            assert_eq!(simon_period(&t).unwrap().h, bs(h), "b = {b}");
        }
    }

    #[test]
    fn simon_validation_lists_offending_rows() {
        let t = FunctionTable::new(FamilyKind::Simon, 2, bs("0001")).unwrap();
        let err = simon_period(&t).unwrap_err().to_string();
        assert!(err.contains("value 1 appears 1 time(s) at rows [11]"), "{err}");
        assert!(err.contains("value 0 appears 3 time(s)"), "{err}");
    }

    #[test]
    fn orthogonal_string_examples() {
        let s = orthogonal_strings(&SimonPeriod { h: bs("01") }, 2).unwrap();
        assert_eq!(s, [bs("00"), bs("10")]);
        let s = orthogonal_strings(&SimonPeriod { h: bs("11") }, 2).unwrap();
        assert_eq!(s, [bs("00"), bs("11")]);
        for h in BitString::all(4).filter(|h| !h.is_zero()) {
            assert_eq!(orthogonal_strings(&SimonPeriod { h }, 4).unwrap().len(), 8);
        }
        assert!(orthogonal_strings(&SimonPeriod { h: bs("00") }, 2).is_err());
    }

    #[test]
    fn period_recovery() {
        assert_eq!(solve_period(&[bs("10")], 2), Some(bs("01")));
        assert_eq!(solve_period(&[bs("110"), bs("011")], 3), Some(bs("111")));
        assert_eq!(solve_period(&[bs("00")], 2), None);
    }

    #[test]
    fn family_file_round_trip_and_validation() {
        let f = FamilyFile::parse(r#"{"kind": "dj", "n": 2, "members": ["0011", "0000"]}"#).unwrap();
        let family = f.clone().into_family().unwrap();
        assert_eq!(family.len(), 2);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(FamilyFile::parse(&text).unwrap(), f);

        let bad = FamilyFile::parse(r#"{"kind": "dj", "n": 2, "members": ["0001"]}"#).unwrap();
        assert!(matches!(bad.clone().into_family(), Err(Error::Family(_))));
        assert!(bad.into_family_unchecked().unwrap().validate().is_err());
        assert!(FamilyFile::parse(r#"{"kind": "shor", "n": 2}"#).is_err());
    }
}
