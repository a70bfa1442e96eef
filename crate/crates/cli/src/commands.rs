// SPDX-License-Identifier: Apache-2.0

//! The work behind each subcommand, returning serializable documents.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use speedup_core::classical::{speedup_report, SpeedupRow};
use speedup_core::density::reduced_entropy;
use speedup_core::exec::Parallelism;
use speedup_core::histories::{check_reconstruction, full_bundle, parallelism_witness, superpose, ReconstructionReport};
use speedup_core::measurement::{measure, project, MeasurementOutcome, Observable};
use speedup_core::oracles::{Family, FamilyFile, FamilyKind};
use speedup_core::sampling::{recover_period, Sampler};
use speedup_core::sharing::{EntropyDrop, SharingEngine};
use speedup_core::state::{EnsembleState, PhaseTag, Register, Registers};
use speedup_core::unitaries::{Pipeline, PreparationPermutation};
use speedup_core::{BitString, Error, Result};

use crate::config::{ChoiceSpec, Mode, RunConfig};
use crate::trace::{MeasurementRecord, StageRecord, StateRecord, TraceDocument};

/// Shots allowed when iterating Simon's algorithm.
const SIMON_MAX_SHOTS: u64 = 10_000;

/// The family named on the command line: a file, or the whole family of
/// `kind` at `n`. A file must agree with any explicit `kind` or `n`.
pub fn load_family(kind: Option<FamilyKind>, n: Option<u32>, path: Option<&Path>, checked: bool) -> Result<Family> {
    match path {
        Some(p) => {
            let file = FamilyFile::load(p)?;
            if kind.is_some_and(|k| k != file.kind) || n.is_some_and(|n| n != file.n) {
                return Err(Error::Argument(format!(
                    "{} describes {} with n = {}, which conflicts with --algo/--n",
                    p.display(),
                    file.kind,
                    file.n
                )));
            }
            if checked { file.into_family() } else { file.into_family_unchecked() }
        }
        None => {
            let kind = kind.ok_or_else(|| Error::Argument("--algo is required without --family".into()))?;
            Family::full(kind, n.unwrap_or(2))
        }
    }
}

fn stage(name: &str, state: &EnsembleState) -> Result<StageRecord> {
    Ok(StageRecord {
        stage: name.to_string(),
        state: StateRecord::from_state(state),
        entropy_b: reduced_entropy(state, Registers::B)?,
        entropy_a: reduced_entropy(state, Registers::A)?,
    })
}

fn draw(dist: &[MeasurementOutcome], rng: &mut ChaCha8Rng) -> Result<BitString> {
    Ok(Sampler::new(dist, rng.random())?.draw())
}

/// Runs the algorithm for one choice and records every stage.
pub fn run(family: &Family, requested: ChoiceSpec, mode: Mode, seed: u64) -> Result<TraceDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = match requested {
        ChoiceSpec::Given(b) => {
            family.member(&b)?;
            b
        }
        ChoiceSpec::Random => family.members()[rng.random_range(0..family.len())].choice(),
    };
    let config = RunConfig {
        algo: family.kind(),
        n: family.n(),
        requested,
        b,
        mode,
        seed,
        family_members: family.len(),
    };
    let b_obs = Observable::content(Register::B);
    let a_obs = Observable::content(Register::A);
    let mut stages = Vec::new();
    let mut measurements = Vec::new();

    let last = match mode {
        Mode::Relativized => {
            let pipeline = Pipeline::relativized(family.clone())?;
            let trace = pipeline.trace(&pipeline.initial_state())?;
            for (name, s) in &trace {
                stages.push(stage(name, s)?);
            }
            let (name, fin) = trace.last().expect("nonempty trace");
            let dist = measure(fin, &b_obs)?;
            measurements.push(MeasurementRecord::new(name, b_obs.to_string(), &dist, b));
            let projected = project(fin, &b_obs, &b)?.post;
            stages.push(stage("P_B", &projected)?);
            projected
        }
        Mode::Bob => {
            let relativized = Pipeline::relativized(family.clone())?;
            let initial = relativized.initial_state();
            stages.push(stage("initial", &initial)?);
            let dist = measure(&initial, &b_obs)?;
            let r = draw(&dist, &mut rng)?;
            measurements.push(MeasurementRecord::new("initial", b_obs.to_string(), &dist, r));
            let selected = project(&initial, &b_obs, &r)?.post;
            stages.push(stage("P_B", &selected)?);
            let pipeline = Pipeline::new(family.clone(), PreparationPermutation::sending(&r, &b)?)?;
            let trace = pipeline.trace(&selected)?;
            for (name, s) in &trace[1..] {
                stages.push(stage(name, s)?);
            }
            trace.last().expect("nonempty trace").1.clone()
        }
    };

    let dist = measure(&last, &a_obs)?;
    let a = draw(&dist, &mut rng)?;
    let after = stages.last().expect("stages recorded").stage.clone();
    measurements.push(MeasurementRecord::new(&after, a_obs.to_string(), &dist, a));
    stages.push(stage("P_A", &project(&last, &a_obs, &a)?.post)?);

    let (solution, simon) = match family.kind() {
        FamilyKind::Grover => (format!("a={a}"), None),
        FamilyKind::DeutschJozsa => ((if a.is_zero() { "constant" } else { "balanced" }).to_string(), None),
        FamilyKind::Simon => {
            let rec = recover_period(family, &b, seed, SIMON_MAX_SHOTS)?;
            (format!("h={}", rec.period), Some(rec))
        }
    };
    Ok(TraceDocument { config, stages, measurements, solution, simon })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub alice: String,
    pub bob: String,
    pub cells_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareRecord {
    pub share: String,
    pub size: usize,
    /// Entropies of ρ_B and ρ_A of the final state before and after the projection.
    pub final_state: EntropyDrop,
    /// B values left after carrying the projection back to the initial state.
    pub advanced_knowledge: Vec<BitString>,
    pub initial_entropy_b: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareDocument {
    pub algo: FamilyKind,
    pub n: u32,
    pub b: BitString,
    pub pairs: Vec<PairRecord>,
    pub shares: Vec<ShareRecord>,
}

/// Every valid division of the projection on `b`.
pub fn share(family: &Family, b: &BitString) -> Result<ShareDocument> {
    let engine = SharingEngine::new(family.clone())?;
    let found = engine.enumerate_sharings(b, Parallelism::default())?;
    let mut distinct = Vec::new();
    for p in &found {
        for s in [&p.alice, &p.bob] {
            if !distinct.contains(s) {
                distinct.push(s.clone());
            }
        }
    }
    distinct.sort();
    let shares = distinct
        .iter()
        .map(|s| {
            let k = engine.advanced_knowledge_projection(b, s)?;
            Ok(ShareRecord {
                share: s.to_string(),
                size: s.size(),
                final_state: engine.entropy_drop(s)?,
                advanced_knowledge: k.initial_support,
                initial_entropy_b: (k.entropy_before, k.entropy_after),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ShareDocument {
        algo: family.kind(),
        n: family.n(),
        b: *b,
        pairs: found
            .iter()
            .map(|p| PairRecord { alice: p.alice.to_string(), bob: p.bob.to_string(), cells_only: p.cells_only() })
            .collect(),
        shares,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub history: String,
    pub b: BitString,
    pub a: BitString,
    pub v_before: BitString,
    pub v_after: BitString,
    pub tag: PhaseTag,
    pub sign: i8,
    pub shares: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryDocument {
    pub algo: FamilyKind,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<BitString>,
    pub histories: Vec<HistoryRecord>,
    /// Reconstruction check for the whole bundle, whatever `b` filter applies.
    pub reconstruction: ReconstructionReport,
    pub parallelism_witness: f64,
}

pub fn histories(family: &Family, b: Option<&BitString>) -> Result<HistoryDocument> {
    if let Some(b) = b {
        family.member(b)?;
    }
    let bundle = full_bundle(family, Parallelism::default())?;
    let reconstruction = check_reconstruction(&bundle, family)?;
    let witness = parallelism_witness(&superpose(&bundle)?.before, family.kind())?;
    Ok(HistoryDocument {
        algo: family.kind(),
        n: family.n(),
        b: b.copied(),
        histories: bundle
            .histories
            .iter()
            .filter(|h| b.is_none_or(|b| h.b == *b))
            .map(|h| HistoryRecord {
                history: h.describe(),
                b: h.b,
                a: h.a,
                v_before: h.v_before,
                v_after: h.v_after,
                tag: h.tag,
                sign: h.sign,
                shares: h.shares.iter().map(ToString::to_string).collect(),
            })
            .collect(),
        reconstruction,
        parallelism_witness: witness,
    })
}

pub fn report(families: &[Family]) -> Result<Vec<SpeedupRow>> {
    families.iter().map(|f| speedup_report(f, Parallelism::default())).collect()
}
