// SPDX-License-Identifier: Apache-2.0

//! The three-stage unitary pipeline: preparation permutation on B, reversible
//! function evaluation into V, and a basis rotation of A.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracles::{Family, FamilyKind, FunctionTable};
use crate::state::{EnsembleState, PhaseTag, Register, RegisterLayout};

/// A permutation of the B-register basis values; identity on A and V.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreparationPermutation {
    width: u32,
    map: Vec<u64>,
}

impl PreparationPermutation {
    pub fn identity(width: u32) -> Self {
        PreparationPermutation { width, map: (0..1u64 << width).collect() }
    }

    /// Swaps `source` and `target`, fixing everything else.
    pub fn sending(source: &BitString, target: &BitString) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::Dimension(format!("cannot map {source} onto {target}")));
        }
        let mut p = Self::identity(source.len());
        p.map.swap(source.index(), target.index());
        Ok(p)
    }

    /// `map[x]` is the image of `x`; must be a bijection on `0..2^width`.
    pub fn from_map(width: u32, map: Vec<u64>) -> Result<Self> {
        if map.len() != 1 << width {
            return Err(Error::Argument(format!("permutation needs {} entries", 1u64 << width)));
        }
        let mut seen = vec![false; map.len()];
        for &y in &map {
            if y as usize >= map.len() || std::mem::replace(&mut seen[y as usize], true) {
                return Err(Error::Argument(format!("map is not a bijection (image {y} repeated or out of range)")));
            }
        }
        Ok(PreparationPermutation { width, map })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn image(&self, x: u64) -> u64 {
        self.map[x as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u64; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        PreparationPermutation { width: self.width, map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| x as u64 == y)
    }
}

/// Permutes the content of B. The random phase attached to a B value travels
/// with it and is renamed after its new value, so a tag always names the B
/// value it multiplies; independent phases stay independent.
pub fn apply_ub(state: &EnsembleState, perm: &PreparationPermutation) -> Result<EnsembleState> {
    let layout = state.layout();
    if perm.width() != layout.b {
        return Err(Error::Dimension(format!(
            "permutation acts on {} bits but B has {}",
            perm.width(),
            layout.b
        )));
    }
    let moved = state.map_components(|v| {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (i, &c) in v.iter().enumerate() {
            let b = layout.content(i, Register::B);
            let j = layout.compose(perm.image(b), layout.content(i, Register::A), layout.content(i, Register::V));
            out[j] = c;
        }
        out
    });
    Ok(moved.relabel_tags(|t| match t {
        PhaseTag::Random(x) if x < 1 << layout.b => PhaseTag::Random(perm.image(x)),
        other => other,
    }))
}

/// `|b⟩|a⟩|v⟩ → |b⟩|a⟩|v ⊕ f_b(a)⟩`, where `f_b` is read off the B content.
pub fn apply_uf(state: &EnsembleState, kind: FamilyKind, n: u32) -> Result<EnsembleState> {
    let layout = state.layout();
    if layout.a != n || layout.v != kind.output_width(n) || layout.b != kind.choice_width(n) {
        return Err(Error::Dimension(format!(
            "layout ({}, {}, {}) does not fit {kind} with n = {n}",
            layout.b, layout.a, layout.v
        )));
    }
    let tables: Vec<FunctionTable> = (0..1u64 << layout.b)
        .map(|b| FunctionTable::new(kind, n, BitString::from_value(b, layout.b)))
        .collect::<Result<_>>()?;
    Ok(state.map_components(|v| {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (i, &c) in v.iter().enumerate() {
            let b = layout.content(i, Register::B);
            let a = layout.content(i, Register::A);
            let val = layout.content(i, Register::V) ^ tables[b as usize].value(a);
            out[layout.compose(b, a, val)] = c;
        }
        out
    }))
}

/// Basis rotation applied to register A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    /// `2|s⟩⟨s| − I` with `|s⟩` the uniform superposition over A.
    InversionAboutMean,
    /// The n-fold Hadamard transform on A.
    HadamardA,
}

impl Rotation {
    pub fn for_kind(kind: FamilyKind) -> Self {
        match kind {
            FamilyKind::Grover => Rotation::InversionAboutMean,
            _ => Rotation::HadamardA,
        }
    }

    /// Applies the rotation to one A-register amplitude vector.
    pub fn apply_register(&self, amps: &mut [Complex64]) {
        match self {
            Rotation::InversionAboutMean => {
                let mean = amps.iter().sum::<Complex64>() / amps.len() as f64;
                amps.iter_mut().for_each(|x| *x = 2.0 * mean - *x);
            }
            Rotation::HadamardA => {
                let len = amps.len();
                let mut h = 1;
                while h < len {
                    for block in (0..len).step_by(2 * h) {
                        for i in block..block + h {
                            let (x, y) = (amps[i], amps[i + h]);
                            amps[i] = (x + y) * FRAC_1_SQRT_2;
                            amps[i + h] = (x - y) * FRAC_1_SQRT_2;
                        }
                    }
                    h *= 2;
                }
            }
        }
    }
}

/// Applies `rotation` to A, acting as the identity on B and V.
pub fn apply_ua(state: &EnsembleState, rotation: Rotation) -> EnsembleState {
    let layout = state.layout();
    state.map_components(|v| rotate_a(&layout, v, rotation))
}

fn rotate_a(layout: &RegisterLayout, v: &[Complex64], rotation: Rotation) -> Vec<Complex64> {
    let mut out = v.to_vec();
    let na = 1u64 << layout.a;
    let mut fiber = vec![Complex64::new(0.0, 0.0); na as usize];
    for b in 0..1u64 << layout.b {
        for val in 0..1u64 << layout.v {
            let base = layout.compose(b, 0, val);
            if (0..na).all(|a| v[base + layout.compose(0, a, 0)].norm_sqr() == 0.0) {
                continue;
            }
            for a in 0..na {
                fiber[a as usize] = v[layout.compose(b, a, val)];
            }
            rotation.apply_register(&mut fiber);
            for a in 0..na {
                out[layout.compose(b, a, val)] = fiber[a as usize];
            }
        }
    }
    out
}

/// One stage of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Prepare(PreparationPermutation),
    Evaluate { kind: FamilyKind, n: u32 },
    Rotate(Rotation),
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Prepare(_) => "U_B",
            Stage::Evaluate { .. } => "U_f",
            Stage::Rotate(_) => "U_A",
        }
    }

    pub fn apply(&self, state: &EnsembleState) -> Result<EnsembleState> {
        match self {
            Stage::Prepare(p) => apply_ub(state, p),
            Stage::Evaluate { kind, n } => apply_uf(state, *kind, *n),
            Stage::Rotate(r) => Ok(apply_ua(state, *r)),
        }
    }

    /// Applies the adjoint. Evaluation and both rotations are involutions.
    pub fn apply_inverse(&self, state: &EnsembleState) -> Result<EnsembleState> {
        match self {
            Stage::Prepare(p) => apply_ub(state, &p.inverse()),
            other => other.apply(state),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Applies the adjoints of `stages` in reverse order, undoing a forward run.
pub fn back_evolve(state: &EnsembleState, stages: &[Stage]) -> Result<EnsembleState> {
    stages.iter().rev().try_fold(state.clone(), |s, stage| stage.apply_inverse(&s))
}

/// Number of (evaluation, rotation) rounds: `⌊(π/4)·2^{n/2}⌋` for Grover, one
/// otherwise.
pub fn default_rounds(kind: FamilyKind, n: u32) -> usize {
    match kind {
        FamilyKind::Grover => ((PI / 4.0) * 2f64.powf(n as f64 / 2.0)).floor().max(1.0) as usize,
        _ => 1,
    }
}

/// The preparation stage followed by `rounds` (evaluation, rotation) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    family: Family,
    perm: PreparationPermutation,
    rounds: usize,
}

impl Pipeline {
    pub fn new(family: Family, perm: PreparationPermutation) -> Result<Self> {
        let layout = family.layout()?;
        if perm.width() != layout.b {
            return Err(Error::Dimension("preparation permutation width differs from B".into()));
        }
        let rounds = default_rounds(family.kind(), family.n());
        Ok(Pipeline { family, perm, rounds })
    }

    /// Pipeline with the identity preparation.
    pub fn relativized(family: Family) -> Result<Self> {
        let width = family.choice_width();
        Self::new(family, PreparationPermutation::identity(width))
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn permutation(&self) -> &PreparationPermutation {
        &self.perm
    }

    pub fn layout(&self) -> RegisterLayout {
        self.family.layout().expect("checked at construction")
    }

    pub fn stages(&self) -> Vec<Stage> {
        let mut stages = vec![Stage::Prepare(self.perm.clone())];
        for _ in 0..self.rounds {
            stages.push(Stage::Evaluate { kind: self.family.kind(), n: self.family.n() });
            stages.push(Stage::Rotate(Rotation::for_kind(self.family.kind())));
        }
        stages
    }

    /// Initial V content: `(|0⟩ − |1⟩)/√2` for phase-kickback families, all
    /// zeros for Simon.
    pub fn v_factor(&self) -> Vec<Complex64> {
        v_factor(self.family.kind(), self.family.n())
    }

    /// Uniform superposition over A.
    pub fn a_factor(&self) -> Vec<Complex64> {
        let na = 1usize << self.family.n();
        vec![Complex64::new(1.0 / (na as f64).sqrt(), 0.0); na]
    }

    /// B maximally mixed over the family members, each member carrying its own
    /// random phase; A uniform; V per [`v_factor`](Self::v_factor).
    pub fn initial_state(&self) -> EnsembleState {
        let weight = Complex64::new(1.0 / (self.family.len() as f64).sqrt(), 0.0);
        let entries: Vec<(PhaseTag, u64, Complex64)> = self
            .family
            .members()
            .iter()
            .map(|t| (PhaseTag::Random(t.choice().value()), t.choice().value(), weight))
            .collect();
        EnsembleState::mixture_product(self.layout(), &entries, &self.a_factor(), &self.v_factor())
            .expect("layout checked at construction")
    }

    /// Every intermediate state, starting with `initial` (labelled `"initial"`).
    pub fn trace(&self, initial: &EnsembleState) -> Result<Vec<(String, EnsembleState)>> {
        let mut out = vec![("initial".to_string(), initial.clone())];
        let mut round = 0;
        for stage in self.stages() {
            let next = stage.apply(&out.last().expect("nonempty").1)?;
            let label = match stage {
                Stage::Prepare(_) => stage.name().to_string(),
                Stage::Evaluate { .. } => {
                    round += 1;
                    format!("{}#{round}", stage.name())
                }
                Stage::Rotate(_) => format!("{}#{round}", stage.name()),
            };
            out.push((label, next));
        }
        Ok(out)
    }

    pub fn run(&self, initial: &EnsembleState) -> Result<EnsembleState> {
        self.stages().iter().try_fold(initial.clone(), |s, st| st.apply(&s))
    }

    /// State after the preparation and the first evaluation.
    pub fn after_first_evaluation(&self, initial: &EnsembleState) -> Result<EnsembleState> {
        let stages = self.stages();
        stages[..2].iter().try_fold(initial.clone(), |s, st| st.apply(&s))
    }

    /// Final pre-measurement state of the relativized run.
    pub fn final_state(&self) -> Result<EnsembleState> {
        self.run(&self.initial_state())
    }
}

pub(crate) fn v_factor(kind: FamilyKind, n: u32) -> Vec<Complex64> {
    let nv = 1usize << kind.output_width(n);
    let mut v = vec![Complex64::new(0.0, 0.0); nv];
    match kind {
        FamilyKind::Simon => v[0] = Complex64::new(1.0, 0.0),
        _ => {
            v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            v[1] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::ensemble_to_density;
    use crate::state::{Registers, TOLERANCE};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn grover2() -> Pipeline {
        Pipeline::relativized(Family::full(FamilyKind::Grover, 2).unwrap()).unwrap()
    }

    fn sharp(layout: RegisterLayout, b: u64, a_amps: [f64; 4], scale: f64) -> EnsembleState {
        let entries = [(PhaseTag::Fixed, b, c(scale))];
        let a: Vec<Complex64> = a_amps.iter().map(|&x| c(x)).collect();
        EnsembleState::mixture_product(layout, &entries, &a, &v_factor(FamilyKind::Grover, 2)).unwrap()
    }

    #[test]
    fn preparation_moves_b_only() {
        let p = grover2();
        let layout = p.layout();
        let before = sharp(layout, 0b01, [0.5; 4], 1.0);
        let perm = PreparationPermutation::sending(&bs("01"), &bs("00")).unwrap();
        let after = apply_ub(&before, &perm).unwrap();
        assert!(after.max_deviation(&sharp(layout, 0b00, [0.5; 4], 1.0)) < TOLERANCE);
        let same = apply_ub(&before, &PreparationPermutation::identity(2)).unwrap();
        assert_eq!(same, before);
    }

    #[test]
    fn preparation_fixes_the_full_mixture() {
        let p = grover2();
        let init = p.initial_state();
        for perm in [
            PreparationPermutation::sending(&bs("01"), &bs("00")).unwrap(),
            PreparationPermutation::from_map(2, vec![3, 0, 1, 2]).unwrap(),
        ] {
            let out = apply_ub(&init, &perm).unwrap();
            assert!(out.max_deviation(&init) < TOLERANCE);
            let (r0, r1) = (
                ensemble_to_density(&init, Registers::all()).unwrap(),
                ensemble_to_density(&out, Registers::all()).unwrap(),
            );
            assert!(r0.max_deviation(&r1) < TOLERANCE);
        }
    }

    #[test]
    fn non_bijective_map_rejected() {
        assert!(matches!(
            PreparationPermutation::from_map(2, vec![0, 0, 1, 2]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn evaluation_flips_value_on_the_marked_argument() {
        let layout = RegisterLayout::new(2, 2, 1).unwrap();
        let s = EnsembleState::basis(layout, layout.compose(0, 0, 0)).unwrap();
        let out = apply_uf(&s, FamilyKind::Grover, 2).unwrap();
        assert_eq!(out.amplitude(PhaseTag::Fixed, layout.compose(0, 0, 1)), c(1.0));
        let bad = RegisterLayout::new(2, 2, 2).unwrap();
        assert!(matches!(
            apply_uf(&EnsembleState::basis(bad, 0).unwrap(), FamilyKind::Grover, 2),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn grover_sharp_run() {
        let layout = grover2().layout();
        let s3 = sharp(layout, 0, [0.5; 4], 1.0);
        let s4 = apply_uf(&s3, FamilyKind::Grover, 2).unwrap();
        assert!(s4.max_deviation(&sharp(layout, 0, [-0.5, 0.5, 0.5, 0.5], 1.0)) < TOLERANCE);
        let s5 = apply_ua(&s4, Rotation::InversionAboutMean);
        assert!(s5.max_deviation(&sharp(layout, 0, [1.0, 0.0, 0.0, 0.0], 1.0)) < TOLERANCE);
    }

    #[test]
    fn round_counts() {
        assert_eq!(default_rounds(FamilyKind::Grover, 2), 1);
        assert_eq!(default_rounds(FamilyKind::Grover, 3), 2);
        assert_eq!(default_rounds(FamilyKind::Grover, 4), 3);
        assert_eq!(default_rounds(FamilyKind::Simon, 3), 1);
    }

    #[test]
    fn forward_then_back_is_identity() {
        for (kind, n) in [(FamilyKind::Grover, 3), (FamilyKind::DeutschJozsa, 2), (FamilyKind::Simon, 2)] {
            let family = Family::full(kind, n).unwrap();
            let first = family.members()[0].choice();
            let last = family.members()[family.len() - 1].choice();
            let p = Pipeline::new(family, PreparationPermutation::sending(&first, &last).unwrap()).unwrap();
            let init = p.initial_state();
            let back = back_evolve(&p.run(&init).unwrap(), &p.stages()).unwrap();
            assert!(back.max_deviation(&init) < TOLERANCE, "{kind}");
        }
    }

    fn arb_state() -> impl Strategy<Value = EnsembleState> {
        let layout = RegisterLayout::new(2, 2, 1).unwrap();
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * layout.dim()).prop_map(move |xs| {
            let mut s = EnsembleState::empty(layout);
            let (first, second) = xs.split_at(layout.dim());
            // Each random phase multiplies a single B value, as in the ensemble.
            for (tag, xs) in [(0u64, first), (3, second)] {
                let amps = xs
                    .iter()
                    .enumerate()
                    .map(|(k, &(r, i))| {
                        if layout.content(k, Register::B) == tag { Complex64::new(r, i) } else { Complex64::new(0.0, 0.0) }
                    })
                    .collect();
                s.add_component(PhaseTag::Random(tag), amps).unwrap();
            }
            s.normalized().unwrap()
        })
    }

    proptest! {
        #[test]
        fn stages_are_unitary_involutions_and_fix_rho_b(s in arb_state()) {
            let rb = ensemble_to_density(&s, Registers::B).unwrap();
            for stage in [
                Stage::Evaluate { kind: FamilyKind::Grover, n: 2 },
                Stage::Rotate(Rotation::InversionAboutMean),
                Stage::Rotate(Rotation::HadamardA),
            ] {
                let out = stage.apply(&s).unwrap();
                prop_assert!((out.norm_sqr() - 1.0).abs() < TOLERANCE);
                prop_assert!(stage.apply(&out).unwrap().max_deviation(&s) < TOLERANCE);
                let rb2 = ensemble_to_density(&out, Registers::B).unwrap();
                prop_assert!(rb.max_deviation(&rb2) < TOLERANCE);
            }
        }
    }
}
