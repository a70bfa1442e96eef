// SPDX-License-Identifier: Apache-2.0

//! Seeded sampling of measurement outcomes and the iterated Simon run.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::measurement::{measure, project, MeasurementOutcome, Observable};
use crate::oracles::{solve_period, Family, FamilyKind};
use crate::state::{EnsembleState, Register};
use crate::unitaries::Pipeline;

/// Repeatable outcome sampler over a fixed distribution.
pub struct Sampler {
    outcomes: Vec<BitString>,
    index: WeightedIndex<f64>,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(dist: &[MeasurementOutcome], seed: u64) -> Result<Self> {
        let index = WeightedIndex::new(dist.iter().map(|o| o.probability))
            .map_err(|e| Error::Argument(format!("cannot sample from this distribution: {e}")))?;
        Ok(Sampler { outcomes: dist.iter().map(|o| o.eigenvalue).collect(), index, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn draw(&mut self) -> BitString {
        self.outcomes[self.index.sample(&mut self.rng)]
    }
}

/// Outcome counts over `shots` draws.
pub fn sample_counts(dist: &[MeasurementOutcome], shots: u64, seed: u64) -> Result<BTreeMap<BitString, u64>> {
    let mut sampler = Sampler::new(dist, seed)?;
    let mut counts: BTreeMap<BitString, u64> = dist.iter().map(|o| (o.eigenvalue, 0)).collect();
    for _ in 0..shots {
        *counts.entry(sampler.draw()).or_default() += 1;
    }
    Ok(counts)
}

/// Largest deviation of the observed frequencies from `dist`, in units of the
/// binomial standard deviation. Outcomes of probability 0 or 1 must match
/// exactly and report infinity otherwise.
pub fn born_z_score(dist: &[MeasurementOutcome], counts: &BTreeMap<BitString, u64>) -> f64 {
    let shots: u64 = counts.values().sum();
    let n = shots as f64;
    let mut worst: f64 = 0.0;
    for o in dist {
        let seen = *counts.get(&o.eigenvalue).unwrap_or(&0) as f64;
        let sigma = (o.probability * (1.0 - o.probability) / n).sqrt();
        let diff = (seen / n - o.probability).abs();
        worst = worst.max(if sigma > 0.0 { diff / sigma } else if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    let stray: u64 = counts.iter().filter(|(k, _)| !dist.iter().any(|o| o.eigenvalue == **k)).map(|(_, v)| v).sum();
    if stray > 0 { f64::INFINITY } else { worst }
}

/// Final A distribution of the algorithm for the choice `b`.
pub fn final_a_distribution(family: &Family, b: &BitString) -> Result<Vec<MeasurementOutcome>> {
    family.member(b)?;
    let pipeline = Pipeline::relativized(family.clone())?;
    let chosen: EnsembleState = project(&pipeline.initial_state(), &Observable::content(Register::B), b)?.post;
    measure(&pipeline.run(&chosen)?, &Observable::content(Register::A))
}

/// Outcome of iterating Simon's algorithm until the period is determined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonRecovery {
    pub choice: BitString,
    pub shots: u64,
    /// Shots whose outcome was the all-zero string and were thrown away.
    pub discarded: u64,
    /// Distinct nonzero strings in the order they were first seen.
    pub strings: Vec<BitString>,
    pub period: BitString,
}

/// Runs the algorithm for `b` until the collected strings fix the period.
pub fn recover_period(family: &Family, b: &BitString, seed: u64, max_shots: u64) -> Result<SimonRecovery> {
    if family.kind() != FamilyKind::Simon {
        return Err(Error::Argument("period recovery needs a Simon family".into()));
    }
    let n = family.n();
    let mut sampler = Sampler::new(&final_a_distribution(family, b)?, seed)?;
    let (mut shots, mut discarded) = (0, 0);
    let mut strings: Vec<BitString> = Vec::new();
    while shots < max_shots {
        shots += 1;
        let s = sampler.draw();
        if s.is_zero() {
            discarded += 1;
            continue;
        }
        if !strings.contains(&s) {
            strings.push(s);
        }
        if let Some(period) = solve_period(&strings, n) {
            return Ok(SimonRecovery { choice: *b, shots, discarded, strings, period });
        }
    }
    Err(Error::Numeric(format!("period of {b} not determined after {max_shots} shots")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::simon_period;

    #[test]
    fn simon_recovers_every_period() {
        let f = Family::full(FamilyKind::Simon, 2).unwrap();
        for t in f.members() {
            let r = recover_period(&f, &t.choice(), 7, 1000).unwrap();
            assert_eq!(r.period, simon_period(t).unwrap().h);
            assert_eq!(r.strings.len(), 1);
            assert!(!r.strings[0].dot(&r.period));
        }
    }

    #[test]
    fn counts_are_reproducible_and_close() {
        let f = Family::full(FamilyKind::Simon, 2).unwrap();
        let dist = final_a_distribution(&f, &"0011".parse().unwrap()).unwrap();
        let c1 = sample_counts(&dist, 10_000, 3).unwrap();
        assert_eq!(c1, sample_counts(&dist, 10_000, 3).unwrap());
        assert!(born_z_score(&dist, &c1) < 3.0);
    }
}
