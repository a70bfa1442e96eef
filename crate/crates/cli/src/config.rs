// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use speedup_core::oracles::FamilyKind;
use speedup_core::{BitString, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Grover,
    Dj,
    Simon,
}

impl From<Algo> for FamilyKind {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Grover => FamilyKind::Grover,
            Algo::Dj => FamilyKind::DeutschJozsa,
            Algo::Simon => FamilyKind::Simon,
        }
    }
}

/// Whether the problem setter's measurement happens first or is deferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Measure B, then prepare the chosen value and run the algorithm.
    Bob,
    /// Leave B unmeasured until the end.
    Relativized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A bit string, or `random` to draw a family member with the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceSpec {
    Random,
    Given(BitString),
}

impl FromStr for ChoiceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.eq_ignore_ascii_case("random") {
            Ok(ChoiceSpec::Random)
        } else {
            s.parse().map(ChoiceSpec::Given)
        }
    }
}

impl fmt::Display for ChoiceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChoiceSpec::Random => f.write_str("random"),
            ChoiceSpec::Given(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for ChoiceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChoiceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Echo of the run parameters, with the choice resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algo: FamilyKind,
    pub n: u32,
    pub requested: ChoiceSpec,
    pub b: BitString,
    pub mode: Mode,
    pub seed: u64,
    pub family_members: usize,
}
