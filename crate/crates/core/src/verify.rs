// SPDX-License-Identifier: Apache-2.0

//! Named verification suites: each check compares a computed quantity with an
//! independently written reference and reports the deviation.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::classical::{speedup_report, worst_case_queries, Goal, KnowledgeState};
use crate::density::{ensemble_to_density, monte_carlo_density, reduced_entropy};
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::histories::{branch_under_ua, check_reconstruction, full_bundle, parallelism_witness, superpose};
use crate::measurement::{deferred_equivalence, project, Observable};
use crate::oracles::{simon_period, Family, FamilyKind};
use crate::sampling::{born_z_score, final_a_distribution, recover_period, sample_counts};
use crate::sharing::{HalfTable, ParityShare, Share, SharingEngine, SharingPair, Violation};
use crate::state::{EnsembleState, PhaseTag, Register, RegisterLayout, Registers, TOLERANCE};
use crate::unitaries::{Pipeline, PreparationPermutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    States,
    Entropies,
    Sharing,
    Histories,
    Classical,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::States, Suite::Entropies, Suite::Sharing, Suite::Histories, Suite::Classical];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::States => "states",
            Suite::Entropies => "entropies",
            Suite::Sharing => "sharing",
            Suite::Histories => "histories",
            Suite::Classical => "classical",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All].iter().chain(&Suite::EACH).find(|x| x.name() == s).copied().ok_or_else(|| {
            Error::Parse(format!("unknown suite '{s}' (expected states, entropies, sharing, histories, classical or all)"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    pub detail: String,
}

impl Check {
    fn within(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: deviation <= tolerance,
            deviation: Some(deviation),
            detail: format!("deviation {deviation:.3e}, tolerance {tolerance:.0e}"),
        }
    }

    fn equal<T: PartialEq + fmt::Debug>(name: impl Into<String>, got: T, want: T) -> Self {
        Check { name: name.into(), passed: got == want, deviation: None, detail: format!("got {got:?}, expected {want:?}") }
    }

    fn holds(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: ok, deviation: None, detail: detail.into() }
    }

    fn from_result(name: &str, r: Result<Vec<Check>>) -> Vec<Check> {
        r.unwrap_or_else(|e| vec![Check::holds(name, false, e.to_string())])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Hand-written states of the two-bit runs, built directly from their
/// amplitudes rather than through the simulator.
pub mod reference {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const DJ_ORDER: [&str; 8] = ["0000", "1111", "0011", "1100", "0101", "1010", "0110", "1001"];
    const SIMON_ORDER: [&str; 6] = ["0011", "1100", "0101", "1010", "0110", "1001"];

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bits(s: &str) -> u64 {
        u64::from_str_radix(s, 2).expect("literal")
    }

    /// Builds an ensemble from `(tag b, a, v, amplitude)` terms with B = `b`.
    fn ensemble(layout: RegisterLayout, terms: &[(u64, u64, u64, f64)]) -> EnsembleState {
        let mut s = EnsembleState::empty(layout);
        for &(b, a, v, x) in terms {
            let mut amps = vec![c(0.0); layout.dim()];
            amps[layout.compose(b, a, v)] = c(x);
            s.add_component(PhaseTag::Random(b), amps).expect("layout");
        }
        s
    }

    fn grover_layout() -> RegisterLayout {
        RegisterLayout::new(2, 2, 1).expect("small")
    }

    /// `½ Σ_b e^{iφ_b}|b⟩_B|b⟩_A`, with V idle in `|0⟩`.
    pub fn correlated_pair() -> EnsembleState {
        ensemble(grover_layout(), &(0..4).map(|b| (b, b, 0, 0.5)).collect::<Vec<_>>())
    }

    /// Grover initial relativized state.
    pub fn grover_initial() -> EnsembleState {
        let x = 1.0 / (4.0 * 2f64.sqrt());
        let terms: Vec<_> =
            (0..4).cartesian_product(0..4).flat_map(|(b, a)| [(b, a, 0, x), (b, a, 1, -x)]).collect();
        ensemble(grover_layout(), &terms)
    }

    /// Grover state after the first evaluation: the marked argument flips sign.
    pub fn grover_evaluated() -> EnsembleState {
        let x = 1.0 / (4.0 * 2f64.sqrt());
        let terms: Vec<_> = (0..4)
            .cartesian_product(0..4)
            .flat_map(|(b, a)| {
                let s = if a == b { -x } else { x };
                [(b, a, 0, s), (b, a, 1, -s)]
            })
            .collect();
        ensemble(grover_layout(), &terms)
    }

    /// Grover final relativized state: A holds b.
    pub fn grover_final() -> EnsembleState {
        let x = 1.0 / (2.0 * 2f64.sqrt());
        ensemble(grover_layout(), &(0..4).flat_map(|b| [(b, b, 0, x), (b, b, 1, -x)]).collect::<Vec<_>>())
    }

    /// Projection of the final state on `b`.
    pub fn grover_projected(b: u64) -> EnsembleState {
        ensemble(grover_layout(), &[(b, b, 0, FRAC_1_SQRT_2), (b, b, 1, -FRAC_1_SQRT_2)])
    }

    /// The problem setter's run with `b` prepared, at each stage: after the
    /// preparation, after the evaluation, after the rotation.
    pub fn grover_bob(b: u64) -> [EnsembleState; 3] {
        let x = 1.0 / (2.0 * 2f64.sqrt());
        let prepared: Vec<_> = (0..4).flat_map(|a| [(b, a, 0, x), (b, a, 1, -x)]).collect();
        let evaluated: Vec<_> = (0..4)
            .flat_map(|a| {
                let s = if a == b { -x } else { x };
                [(b, a, 0, s), (b, a, 1, -s)]
            })
            .collect();
        [ensemble(grover_layout(), &prepared), ensemble(grover_layout(), &evaluated), grover_projected(b)]
    }

    fn dj_layout() -> RegisterLayout {
        RegisterLayout::new(4, 2, 1).expect("small")
    }

    /// Deutsch–Jozsa initial relativized state (uniform, 1/8 per term).
    pub fn dj_initial() -> EnsembleState {
        let terms: Vec<_> = DJ_ORDER
            .iter()
            .cartesian_product(0..4)
            .flat_map(|(b, a)| [(bits(b), a, 0, 0.125), (bits(b), a, 1, -0.125)])
            .collect();
        ensemble(dj_layout(), &terms)
    }

    /// Deutsch–Jozsa final state: constant tables at A = 00, balanced ones at
    /// the string labelling their sign pattern, complements with a minus sign.
    pub fn dj_final() -> EnsembleState {
        let rows = [
            ("0000", "00", 1.0),
            ("1111", "00", -1.0),
            ("0011", "10", 1.0),
            ("1100", "10", -1.0),
            ("0101", "01", 1.0),
            ("1010", "01", -1.0),
            ("0110", "11", 1.0),
            ("1001", "11", -1.0),
        ];
        let terms: Vec<_> = rows
            .iter()
            .flat_map(|&(b, a, s)| [(bits(b), bits(a), 0, 0.25 * s), (bits(b), bits(a), 1, -0.25 * s)])
            .collect();
        ensemble(dj_layout(), &terms)
    }

    fn simon_layout() -> RegisterLayout {
        RegisterLayout::new(4, 2, 1).expect("small")
    }

    pub fn simon_initial() -> EnsembleState {
        let x = 1.0 / (2.0 * 6f64.sqrt());
        let terms: Vec<_> = SIMON_ORDER.iter().cartesian_product(0..4).map(|(b, a)| (bits(b), a, 0, x)).collect();
        ensemble(simon_layout(), &terms)
    }

    /// Simon final state: `[(|00⟩ + |s⟩)|f(00)⟩ + (|00⟩ − |s⟩)|1 − f(00)⟩] / (2√6)`
    /// with `s` the nonzero string orthogonal to the period.
    pub fn simon_final() -> EnsembleState {
        let x = 1.0 / (2.0 * 6f64.sqrt());
        let rows = [("0011", "10", 0), ("1100", "10", 1), ("0101", "01", 0), ("1010", "01", 1), ("0110", "11", 0), ("1001", "11", 1)];
        let terms: Vec<_> = rows
            .iter()
            .flat_map(|&(b, s, f0)| {
                let (b, s) = (bits(b), bits(s));
                [(b, 0, f0, x), (b, s, f0, x), (b, 0, 1 - f0, x), (b, s, 1 - f0, -x)]
            })
            .collect();
        ensemble(simon_layout(), &terms)
    }
}

fn family(kind: FamilyKind, n: u32) -> Result<Family> {
    Family::full(kind, n)
}

fn bs(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

fn state_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grover = Pipeline::relativized(family(FamilyKind::Grover, 2)?)?;
    let trace = grover.trace(&grover.initial_state())?;
    let at = |label: &str| trace.iter().find(|(l, _)| l == label).map(|(_, s)| s.clone()).expect("stage");
    out.push(Check::within("grover.2.initial", at("initial").max_deviation(&reference::grover_initial()), TOLERANCE));
    out.push(Check::within("grover.2.preparation_is_identity", at("U_B").max_deviation(&at("initial")), TOLERANCE));
    out.push(Check::within("grover.2.evaluated", at("U_f#1").max_deviation(&reference::grover_evaluated()), TOLERANCE));
    out.push(Check::within("grover.2.final", at("U_A#1").max_deviation(&reference::grover_final()), TOLERANCE));
    for (reg, name) in [(Register::B, "b"), (Register::A, "a")] {
        let p = project(&at("U_A#1"), &Observable::content(reg), &bs("00"))?;
        out.push(Check::within(
            format!("grover.2.projection_{name}"),
            p.post.max_deviation(&reference::grover_projected(0)),
            TOLERANCE,
        ));
    }

    // Measuring B first, for every outcome and every preparation.
    let f = family(FamilyKind::Grover, 2)?;
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for map in (0..4u64).permutations(4) {
        let perm = PreparationPermutation::from_map(2, map)?;
        let pipeline = Pipeline::new(f.clone(), perm.clone())?;
        for r in 0..4u64 {
            let first = project(&pipeline.initial_state(), &Observable::content(Register::B), &BitString::from_value(r, 2))?;
            let stages = pipeline.trace(&first.post)?;
            let expected = reference::grover_bob(perm.image(r));
            worst = worst.max(first.post.max_deviation(&reference::grover_bob(r)[0]));
            for (k, (_, s)) in stages.iter().skip(1).enumerate() {
                worst = worst.max(s.max_deviation(&expected[k]));
            }
            runs += 1;
        }
    }
    out.push(Check::within(format!("grover.2.bob_first ({runs} runs)"), worst, TOLERANCE));

    let dj = Pipeline::relativized(family(FamilyKind::DeutschJozsa, 2)?)?;
    out.push(Check::within("dj.2.initial", dj.initial_state().max_deviation(&reference::dj_initial()), TOLERANCE));
    out.push(Check::within("dj.2.final", dj.final_state()?.max_deviation(&reference::dj_final()), TOLERANCE));
    let simon = Pipeline::relativized(family(FamilyKind::Simon, 2)?)?;
    out.push(Check::within("simon.2.initial", simon.initial_state().max_deviation(&reference::simon_initial()), TOLERANCE));
    out.push(Check::within("simon.2.final", simon.final_state()?.max_deviation(&reference::simon_final()), TOLERANCE));

    for (kind, n) in [(FamilyKind::Grover, 2), (FamilyKind::DeutschJozsa, 2), (FamilyKind::Simon, 2), (FamilyKind::Grover, 3), (FamilyKind::Grover, 4)] {
        out.push(deferral_check(&family(kind, n)?)?);
    }

    let simon_family = family(FamilyKind::Simon, 2)?;
    for t in simon_family.members() {
        let b = t.choice();
        let r = recover_period(&simon_family, &b, b.value(), 1000)?;
        out.push(Check::equal(format!("simon.2.period.{b}"), r.period, simon_period(t)?.h));
        let dist = final_a_distribution(&simon_family, &b)?;
        let z = born_z_score(&dist, &sample_counts(&dist, 10_000, b.value())?);
        out.push(Check::within(format!("simon.2.born_frequencies.{b}"), z, 3.0));
    }
    Ok(out)
}

fn deferral_check(f: &Family) -> Result<Check> {
    let first = f.members()[0].choice();
    let mut worst: f64 = 0.0;
    for t in f.members() {
        let perm = PreparationPermutation::sending(&first, &t.choice())?;
        worst = worst.max(deferred_equivalence(f, &t.choice(), &perm)?.max_deviation);
    }
    Ok(Check::within(format!("{}.{}.deferred_measurement", f.kind(), f.n()), worst, TOLERANCE))
}

fn entropy_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let e = |s: &EnsembleState, r: Registers| reduced_entropy(s, r);
    out.push(Check::within("correlated_pair.entropy", (e(&reference::correlated_pair(), Registers::all())? - 2.0).abs(), TOLERANCE));
    let grover = Pipeline::relativized(family(FamilyKind::Grover, 2)?)?;
    let evaluated = grover.after_first_evaluation(&grover.initial_state())?;
    out.push(Check::within("grover.2.evaluated.S_B", (e(&evaluated, Registers::B)? - 2.0).abs(), TOLERANCE));
    let fin = grover.final_state()?;
    out.push(Check::within("grover.2.final.S_A", (e(&fin, Registers::A)? - 2.0).abs(), TOLERANCE));
    let dj = Pipeline::relativized(family(FamilyKind::DeutschJozsa, 2)?)?.final_state()?;
    out.push(Check::within("dj.2.final.S_B", (e(&dj, Registers::B)? - 3.0).abs(), TOLERANCE));
    out.push(Check::within("dj.2.final.S_A", (e(&dj, Registers::A)? - 2.0).abs(), TOLERANCE));
    let simon = Pipeline::relativized(family(FamilyKind::Simon, 2)?)?.final_state()?;
    out.push(Check::within("simon.2.final.S_B", (e(&simon, Registers::B)? - 6f64.log2()).abs(), TOLERANCE));

    for (kind, n) in [(FamilyKind::Grover, 2), (FamilyKind::DeutschJozsa, 2), (FamilyKind::Simon, 2), (FamilyKind::Grover, 3)] {
        out.push(rho_b_invariance(&family(kind, n)?)?);
    }

    for (name, state, subset) in [
        ("correlated_pair", reference::correlated_pair(), Registers::all()),
        ("grover.2.initial", reference::grover_initial(), Registers::B | Registers::A),
        ("grover.2.final", reference::grover_final(), Registers::B | Registers::A),
    ] {
        let exact = ensemble_to_density(&state, subset)?;
        let mc = monte_carlo_density(&state, subset, 100_000, 11)?;
        out.push(Check::within(format!("{name}.monte_carlo"), exact.max_deviation(&mc), 1e-2));
    }
    Ok(out)
}

fn rho_b_invariance(f: &Family) -> Result<Check> {
    let p = Pipeline::relativized(f.clone())?;
    let trace = p.trace(&p.initial_state())?;
    let first = ensemble_to_density(&trace[0].1, Registers::B)?;
    let mut worst: f64 = 0.0;
    for (_, s) in &trace[1..] {
        worst = worst.max(first.max_deviation(&ensemble_to_density(s, Registers::B)?));
    }
    Ok(Check::within(format!("{}.{}.rho_B_invariant", f.kind(), f.n()), worst, TOLERANCE))
}

fn rows(f: &Family, b: &str, args: &[&str]) -> Result<Share> {
    let args: Vec<u64> = args.iter().map(|a| bs(a).value()).collect();
    Ok(Share::Rows(HalfTable::of(f.member(&bs(b))?, &args)?))
}

fn sharing_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g2 = SharingEngine::new(family(FamilyKind::Grover, 2)?)?;
    for b in BitString::all(2) {
        let pairs = g2.enumerate_sharings(&b, Parallelism::default())?;
        out.push(Check::equal(format!("grover.2.{b}.pairs"), pairs.len(), 3));
        let rank_one = pairs.iter().all(|p| p.alice.size() == 1 && p.bob.size() == 1);
        out.push(Check::holds(format!("grover.2.{b}.one_bit_shares"), rank_one, "every share is a single parity"));
    }
    let g4 = SharingEngine::new(family(FamilyKind::Grover, 4)?)?;
    let b = bs("0110");
    let pair = SharingPair::new(
        Share::Parity(ParityShare::cells(&[0, 1], &b)?),
        Share::Parity(ParityShare::cells(&[2, 3], &b)?),
    );
    let found = g4.enumerate_sharings(&b, Parallelism::default())?.iter().any(|p| p.assignments().contains(&pair));
    out.push(Check::holds("grover.4.cell_halves", found, format!("{pair} among the sharings of {b}")));

    let dj_family = family(FamilyKind::DeutschJozsa, 2)?;
    let dj = SharingEngine::new(dj_family.clone())?;
    for t in dj_family.members().iter().filter(|t| !t.is_constant()) {
        let n = dj.enumerate_sharings(&t.choice(), Parallelism::default())?.len();
        out.push(Check::equal(format!("dj.2.{}.pairs", t.choice()), n, 1));
    }
    let b = bs("0011");
    let single_rows = SharingPair::new(rows(&dj_family, "0011", &["00"])?, rows(&dj_family, "0011", &["11"])?);
    let verdict = dj.check_pair(&single_rows, &b);
    out.push(Check::holds(
        "dj.2.rejects_single_rows",
        matches!(verdict, Err(Violation::Underdetermined { .. })),
        format!("{verdict:?}"),
    ));
    let uneven = SharingPair::new(rows(&dj_family, "0011", &["00", "01"])?, rows(&dj_family, "0011", &["11"])?);
    let verdict = dj.check_pair(&uneven, &b);
    out.push(Check::holds(
        "dj.2.rejects_uneven_split",
        matches!(verdict, Err(Violation::NoEntropyReduction { register: Register::A, .. })),
        format!("{verdict:?}"),
    ));

    let simon_family = family(FamilyKind::Simon, 2)?;
    let simon = SharingEngine::new(simon_family.clone())?;
    let tables = simon.good_half_tables(&b)?;
    for want in [["00", "11"], ["01", "10"]] {
        let Share::Rows(h) = rows(&simon_family, "0011", &want)? else { unreachable!() };
        out.push(Check::holds(
            format!("simon.2.0011.half_table.{}", want.join("+")),
            tables.contains(&h),
            format!("{} good half tables", tables.len()),
        ));
    }

    // Every admissible one-bit Grover share halves the entropy of B.
    let mut worst: f64 = 0.0;
    for b in BitString::all(2) {
        for share in g2.admissible_shares(&b, Parallelism::default())? {
            let k = g2.advanced_knowledge_projection(&b, &share)?;
            worst = worst.max((k.entropy_before - 2.0).abs()).max((k.entropy_after - 1.0).abs());
        }
    }
    out.push(Check::within("grover.2.entropy_halving", worst, TOLERANCE));
    Ok(out)
}

fn history_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (kind, n) in [(FamilyKind::Grover, 2), (FamilyKind::DeutschJozsa, 2), (FamilyKind::Simon, 2), (FamilyKind::Grover, 3)] {
        let f = family(kind, n)?;
        out.extend(bundle_checks(&f)?);
    }
    for (f, reference) in [
        (family(FamilyKind::Grover, 2)?, reference::grover_final()),
        (family(FamilyKind::DeutschJozsa, 2)?, reference::dj_final()),
        (family(FamilyKind::Simon, 2)?, reference::simon_final()),
    ] {
        let branched = branch_under_ua(&full_bundle(&f, Parallelism::default())?)?;
        out.push(Check::within(format!("{}.{}.branches_interfere", f.kind(), f.n()), branched.state.max_deviation(&reference), TOLERANCE));
    }
    Ok(out)
}

fn bundle_checks(f: &Family) -> Result<Vec<Check>> {
    let bundle = full_bundle(f, Parallelism::default())?;
    let report = check_reconstruction(&bundle, f)?;
    let prefix = format!("{}.{}", f.kind(), f.n());
    Ok(vec![
        Check::within(format!("{prefix}.histories_before"), report.before_deviation, TOLERANCE),
        Check::within(format!("{prefix}.histories_after"), report.after_deviation, TOLERANCE),
        Check::holds(format!("{prefix}.histories_complete"), report.missing.is_empty(), format!("{} uncovered components", report.missing.len())),
        Check::within(format!("{prefix}.parallelism_witness"), parallelism_witness(&superpose(&bundle)?.before, f.kind())?, TOLERANCE),
    ])
}

fn classical_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for kind in [FamilyKind::Grover, FamilyKind::DeutschJozsa, FamilyKind::Simon] {
        let row = speedup_report(&family(kind, 2)?, Parallelism::default())?;
        out.push(Check::equal(
            format!("{kind}.2.query_counts"),
            (row.classical_no_knowledge, row.classical_half_knowledge_max, row.quantum_oracle_calls),
            (3, 1, 1),
        ));
        out.push(Check::holds(format!("{kind}.2.advanced_knowledge_matches_quantum"), row.matches, format!("{row:?}")));
    }
    let g4 = family(FamilyKind::Grover, 4)?;
    let none = worst_case_queries(&g4, Goal::SolveProblem, &KnowledgeState::full(&g4))?.worst_case_queries;
    let quarter: Vec<BitString> = ["0000", "0001", "0010", "0011"].iter().map(|s| bs(s)).collect();
    let half = worst_case_queries(&g4, Goal::SolveProblem, &KnowledgeState::from_candidates(&g4, &quarter)?)?.worst_case_queries;
    out.push(Check::equal("grover.4.classical_counts", (none, half), (15, 3)));
    Ok(out)
}

/// Checks on an explicitly supplied family: its tables must be well formed,
/// and the evolution must respect the deferral and ρ_B invariants.
fn custom_checks(suite: Suite, f: &Family) -> Vec<Check> {
    let name = format!("oracle.{}.invariants", f.kind());
    if let Err(e) = f.validate() {
        return vec![Check::holds(name, false, e.to_string())];
    }
    let mut out = vec![Check::holds(name, true, format!("{} tables", f.len()))];
    let extra = match suite {
        Suite::States => deferral_check(f).map(|c| vec![c]),
        Suite::Entropies => rho_b_invariance(f).map(|c| vec![c]),
        Suite::Histories => bundle_checks(f),
        Suite::Sharing | Suite::Classical => Ok(Vec::new()),
        Suite::All => deferral_check(f).and_then(|d| Ok(vec![d, rho_b_invariance(f)?])),
    };
    out.extend(Check::from_result("custom_family", extra));
    out
}

/// Runs `suite` on the standard families, or only the generic checks on
/// `custom` when given.
pub fn run_suite(suite: Suite, custom: Option<&Family>) -> SuiteReport {
    let checks = match custom {
        Some(f) => custom_checks(suite, f),
        None => {
            let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
            let parts = Parallelism::default().map(&suites, |s| {
                let r = match s {
                    Suite::States => state_checks(),
                    Suite::Entropies => entropy_checks(),
                    Suite::Sharing => sharing_checks(),
                    Suite::Histories => history_checks(),
                    Suite::Classical => classical_checks(),
                    Suite::All => unreachable!(),
                };
                Check::from_result(s.name(), r)
            });
            parts.into_iter().flatten().collect()
        }
    };
    SuiteReport { suite, passed: checks.iter().all(|c| c.passed), checks }
}
