// SPDX-License-Identifier: Apache-2.0

//! Classical computation histories behind the first function evaluation.
//!
//! A history is a pair of sharp basis states `|b⟩|a⟩|v⟩ → |b⟩|a⟩|v ⊕ f_b(a)⟩`
//! multiplied by the random phase of `b` and the sign of the V component it
//! starts from. The queries come from Alice's half of the choice: Grover
//! queries the candidates her share leaves open, the table-valued families
//! query the rows her half table does not contain.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::oracles::{Family, FamilyKind};
use crate::sharing::{Share, SharingEngine};
use crate::state::{EnsembleState, PhaseTag, RegisterLayout, TOLERANCE};
use crate::unitaries::{apply_ua, Pipeline, Rotation};

/// One sharp trajectory through the evaluation stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    pub b: BitString,
    pub a: BitString,
    pub v_before: BitString,
    pub v_after: BitString,
    pub tag: PhaseTag,
    /// Sign of the initial V component, `+1` or `-1`.
    pub sign: i8,
    /// Alice shares that produced this history.
    pub shares: Vec<Share>,
}

/// What makes two histories the same history.
pub type HistoryId = (BitString, BitString, BitString, PhaseTag, i8);

impl History {
    pub fn id(&self) -> HistoryId {
        (self.b, self.a, self.v_before, self.tag, self.sign)
    }

    /// Basis indices of the before and after states.
    pub fn steps(&self, layout: &RegisterLayout) -> [usize; 2] {
        [
            layout.compose(self.b.value(), self.a.value(), self.v_before.value()),
            layout.compose(self.b.value(), self.a.value(), self.v_after.value()),
        ]
    }

    /// Human-readable trajectory, e.g. `+phi0 |00|00|0⟩ → |00|00|1⟩`.
    pub fn describe(&self) -> String {
        format!(
            "{}{} |{}|{}|{}⟩ → |{}|{}|{}⟩",
            if self.sign < 0 { "-" } else { "+" },
            self.tag,
            self.b,
            self.a,
            self.v_before,
            self.b,
            self.a,
            self.v_after
        )
    }
}

/// Duplicate-free set of histories for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryBundle {
    pub kind: FamilyKind,
    pub n: u32,
    pub histories: Vec<History>,
}

impl HistoryBundle {
    /// Merges `histories`, keeping one entry per identity and the union of
    /// their source shares.
    pub fn merge(kind: FamilyKind, n: u32, histories: impl IntoIterator<Item = History>) -> Self {
        let mut by_id: BTreeMap<HistoryId, History> = BTreeMap::new();
        for h in histories {
            by_id
                .entry(h.id())
                .and_modify(|e| {
                    for s in &h.shares {
                        if !e.shares.contains(s) {
                            e.shares.push(s.clone());
                        }
                    }
                })
                .or_insert(h);
        }
        HistoryBundle { kind, n, histories: by_id.into_values().collect() }
    }

    pub fn len(&self) -> usize {
        self.histories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histories.is_empty()
    }
}

fn signed_v_contents(kind: FamilyKind, n: u32) -> Vec<(u64, i8)> {
    crate::unitaries::v_factor(kind, n)
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > TOLERANCE)
        .map(|(v, c)| (v as u64, if c.re < 0.0 { -1 } else { 1 }))
        .collect()
}

fn queries(engine: &SharingEngine, share: &Share) -> Vec<u64> {
    let family = engine.family();
    match share {
        Share::Parity(_) => share.candidates(family).iter().map(|t| t.choice().value()).collect(),
        Share::Rows(h) => (0..family.domain_size()).filter(|a| !h.contains_row(*a)).collect(),
    }
}

fn histories_for(engine: &SharingEngine, b: &BitString, share: &Share) -> Result<Vec<History>> {
    engine
        .check_share(share, b)
        .map_err(|v| Error::Argument(format!("{share} is not an admissible share of {b}: {v}")))?;
    let family = engine.family();
    let (kind, n) = (family.kind(), family.n());
    let table = family.member(b)?;
    let vw = kind.output_width(n);
    let mut out = Vec::new();
    for a in queries(engine, share) {
        for &(v, sign) in &signed_v_contents(kind, n) {
            out.push(History {
                b: *b,
                a: BitString::from_value(a, n),
                v_before: BitString::from_value(v, vw),
                v_after: BitString::from_value(v ^ table.value(a), vw),
                tag: PhaseTag::Random(b.value()),
                sign,
                shares: vec![share.clone()],
            });
        }
    }
    Ok(out)
}

/// Histories generated by Alice holding `share` of `b`.
pub fn enumerate_histories(family: &Family, b: &BitString, share: &Share) -> Result<Vec<History>> {
    histories_for(&SharingEngine::new(family.clone())?, b, share)
}

/// Every history of every member, from every share that appears in a valid
/// sharing of that member, merged.
pub fn full_bundle(family: &Family, exec: Parallelism) -> Result<HistoryBundle> {
    let engine = SharingEngine::new(family.clone())?;
    let choices: Vec<BitString> = family.members().iter().map(|t| t.choice()).collect();
    let per_b = exec.map(&choices, |b| -> Result<Vec<History>> {
        let mut shares: Vec<Share> = Vec::new();
        for pair in engine.enumerate_sharings(b, Parallelism::Sequential)? {
            for s in [pair.alice, pair.bob] {
                if !shares.contains(&s) {
                    shares.push(s);
                }
            }
        }
        let mut out = Vec::new();
        for s in &shares {
            out.extend(histories_for(&engine, b, s)?);
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for h in per_b {
        all.extend(h?);
    }
    Ok(HistoryBundle::merge(family.kind(), family.n(), all))
}

/// The normalized superpositions of the before and after steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    pub before: EnsembleState,
    pub after: EnsembleState,
}

fn layout_of(bundle: &HistoryBundle) -> Result<RegisterLayout> {
    RegisterLayout::new(bundle.kind.choice_width(bundle.n), bundle.n, bundle.kind.output_width(bundle.n))
}

/// Adds up the histories, each with weight `sign`, in their phase tags.
pub fn superpose(bundle: &HistoryBundle) -> Result<Superposition> {
    if bundle.is_empty() {
        return Err(Error::Argument("cannot superpose an empty bundle".into()));
    }
    let layout = layout_of(bundle)?;
    let mut before = EnsembleState::empty(layout);
    let mut after = EnsembleState::empty(layout);
    for h in &bundle.histories {
        let [i, j] = h.steps(&layout);
        let w = Complex64::new(f64::from(h.sign), 0.0);
        let mut x = vec![Complex64::new(0.0, 0.0); layout.dim()];
        x[i] = w;
        before.add_component(h.tag, x)?;
        let mut y = vec![Complex64::new(0.0, 0.0); layout.dim()];
        y[j] = w;
        after.add_component(h.tag, y)?;
    }
    Ok(Superposition { before: before.normalized()?, after: after.normalized()? })
}

/// Comparison of a bundle's superposition with the simulated states around
/// the first evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub histories: usize,
    pub before_deviation: f64,
    pub after_deviation: f64,
    /// Basis labels of simulated components no history reaches.
    pub missing: Vec<String>,
    pub exact: bool,
}

/// Checks `bundle` against the relativized run of `family`.
pub fn check_reconstruction(bundle: &HistoryBundle, family: &Family) -> Result<ReconstructionReport> {
    let pipeline = Pipeline::relativized(family.clone())?;
    let init = pipeline.initial_state();
    let pre = crate::unitaries::apply_ub(&init, pipeline.permutation())?;
    let post = pipeline.after_first_evaluation(&init)?;
    let sup = superpose(bundle)?;
    let layout = pipeline.layout();
    let mut missing = Vec::new();
    for (tag, amps) in pre.components() {
        for (i, c) in amps.iter().enumerate() {
            if c.norm() > TOLERANCE && sup.before.amplitude(*tag, i).norm() <= TOLERANCE {
                missing.push(format!("{tag}:{}", layout.label(i)));
            }
        }
    }
    let before_deviation = sup.before.max_deviation(&pre);
    let after_deviation = sup.after.max_deviation(&post);
    Ok(ReconstructionReport {
        histories: bundle.len(),
        before_deviation,
        after_deviation,
        exact: missing.is_empty() && before_deviation <= TOLERANCE && after_deviation <= TOLERANCE,
        missing,
    })
}

/// Largest deviation, over B values in the support, between the normalized
/// A⊗V factor multiplying `|b⟩` and the uniform A superposition times the
/// initial V state of `kind`.
pub fn parallelism_witness(before: &EnsembleState, kind: FamilyKind) -> Result<f64> {
    let layout = before.layout();
    let v = crate::unitaries::v_factor(kind, layout.a);
    if v.len() != 1usize << layout.v {
        return Err(Error::Dimension(format!("layout does not fit {kind}")));
    }
    let na = 1usize << layout.a;
    let amp = 1.0 / (na as f64).sqrt();
    let reference: Vec<Complex64> = (0..na).flat_map(|_| v.iter().map(move |x| x * amp)).collect();
    let rest = reference.len();
    let mut worst: f64 = 0.0;
    for (_, amps) in before.components() {
        for block in amps.chunks(rest) {
            let norm = block.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm <= TOLERANCE {
                continue;
            }
            for (c, r) in block.iter().zip(&reference) {
                worst = worst.max((c / norm - r).norm());
            }
        }
    }
    Ok(worst)
}

/// U_A applied to one history's after-state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryBranch {
    pub history: usize,
    /// `(a', amplitude)` for every A value the branch reaches.
    pub amplitudes: Vec<(BitString, (f64, f64))>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branching {
    pub branches: Vec<HistoryBranch>,
    /// U_A applied to the after-superposition.
    pub state: EnsembleState,
}

/// Branches every history under the rotation that follows the evaluation.
pub fn branch_under_ua(bundle: &HistoryBundle) -> Result<Branching> {
    let layout = layout_of(bundle)?;
    let rotation = Rotation::for_kind(bundle.kind);
    let na = 1usize << layout.a;
    let branches = bundle
        .histories
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let mut a = vec![Complex64::new(0.0, 0.0); na];
            a[h.a.value() as usize] = Complex64::new(1.0, 0.0);
            rotation.apply_register(&mut a);
            HistoryBranch {
                history: k,
                amplitudes: a
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > TOLERANCE)
                    .map(|(x, c)| (BitString::from_value(x as u64, layout.a), (c.re, c.im)))
                    .collect(),
            }
        })
        .collect();
    let state = apply_ua(&superpose(bundle)?.after, rotation);
    Ok(Branching { branches, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharing::{HalfTable, ParityShare};
    use crate::state::Registers;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn family(kind: FamilyKind, n: u32) -> Family {
        Family::full(kind, n).unwrap()
    }

    fn rows(f: &Family, b: &str, args: &[&str]) -> Share {
        let args: Vec<u64> = args.iter().map(|a| bs(a).value()).collect();
        Share::Rows(HalfTable::of(f.member(&bs(b)).unwrap(), &args).unwrap())
    }

    #[test]
    fn grover_histories_one_and_two() {
        let f = family(FamilyKind::Grover, 2);
        let share = Share::Parity(ParityShare::cells(&[0], &bs("00")).unwrap());
        let hs = enumerate_histories(&f, &bs("00"), &share).unwrap();
        let texts: Vec<String> = hs.iter().filter(|h| h.a == bs("00")).map(History::describe).collect();
        assert_eq!(texts, ["+phi0 |00|00|0⟩ → |00|00|1⟩", "-phi0 |00|00|1⟩ → |00|00|0⟩"]);
        assert_eq!(hs.len(), 4);
    }

    #[test]
    fn dj_and_simon_histories() {
        let f = family(FamilyKind::DeutschJozsa, 2);
        let hs = enumerate_histories(&f, &bs("0011"), &rows(&f, "0011", &["00", "01"])).unwrap();
        let at10: Vec<&History> = hs.iter().filter(|h| h.a == bs("10")).collect();
        assert_eq!(at10.len(), 2);
        assert!(at10.iter().all(|h| h.v_after.value() == 1 - h.v_before.value()));

        let f = family(FamilyKind::Simon, 2);
        let hs = enumerate_histories(&f, &bs("0011"), &rows(&f, "0011", &["01", "10"])).unwrap();
        let a: Vec<String> = hs.iter().map(|h| h.a.to_string()).collect();
        assert_eq!(a, ["00", "11"]);
        assert_eq!(hs[0].v_after, bs("0"));
        assert_eq!(hs[1].v_after, bs("1"));
    }

    #[test]
    fn inadmissible_share_is_rejected() {
        let f = family(FamilyKind::DeutschJozsa, 2);
        assert!(enumerate_histories(&f, &bs("0011"), &rows(&f, "0011", &["00"])).is_err());
    }

    #[test]
    fn bundles_reconstruct_the_evaluation() {
        for (kind, n) in [
            (FamilyKind::Grover, 2),
            (FamilyKind::Grover, 3),
            (FamilyKind::DeutschJozsa, 2),
            (FamilyKind::Simon, 2),
        ] {
            let f = family(kind, n);
            let bundle = full_bundle(&f, Parallelism::default()).unwrap();
            let report = check_reconstruction(&bundle, &f).unwrap();
            assert!(report.exact, "{kind} n={n}: {report:?}");
            let sup = superpose(&bundle).unwrap();
            assert!(parallelism_witness(&sup.before, kind).unwrap() < TOLERANCE);
        }
    }

    #[test]
    fn grover_bundle_size_and_merge() {
        let f = family(FamilyKind::Grover, 2);
        let bundle = full_bundle(&f, Parallelism::Sequential).unwrap();
        // Every (b, a, v) exactly once.
        assert_eq!(bundle.len(), 4 * 4 * 2);
        let query_b = bundle.histories.iter().find(|h| h.a == h.b).unwrap();
        assert_eq!(query_b.shares.len(), 3);
        let doubled = HistoryBundle::merge(f.kind(), 2, bundle.histories.iter().chain(&bundle.histories).cloned());
        assert_eq!(superpose(&doubled).unwrap(), superpose(&bundle).unwrap());
    }

    #[test]
    fn branching_reaches_the_final_state() {
        for kind in [FamilyKind::Grover, FamilyKind::DeutschJozsa, FamilyKind::Simon] {
            let f = family(kind, 2);
            let bundle = full_bundle(&f, Parallelism::Sequential).unwrap();
            let branching = branch_under_ua(&bundle).unwrap();
            let final_state = Pipeline::relativized(f).unwrap().final_state().unwrap();
            assert!(branching.state.max_deviation(&final_state) < TOLERANCE, "{kind}");
        }
    }

    #[test]
    fn single_history_branches_with_inversion_weights() {
        let f = family(FamilyKind::Grover, 2);
        let share = Share::Parity(ParityShare::cells(&[0], &bs("00")).unwrap());
        let one = enumerate_histories(&f, &bs("00"), &share).unwrap().remove(0);
        let bundle = HistoryBundle::merge(FamilyKind::Grover, 2, [one]);
        let b = branch_under_ua(&bundle).unwrap();
        let weights: Vec<f64> = b.branches[0].amplitudes.iter().map(|(_, (re, _))| *re).collect();
        assert_eq!(weights, [-0.5, 0.5, 0.5, 0.5]);
        assert!((crate::density::reduced_entropy(&b.state, Registers::B).unwrap()).abs() < TOLERANCE);
    }
}
