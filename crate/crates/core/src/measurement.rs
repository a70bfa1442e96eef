// SPDX-License-Identifier: Apache-2.0

//! Content and parity observables, Born-rule distributions, post-selected
//! projections and the deferred-measurement check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::density::ensemble_to_density;
use crate::error::{Error, Result};
use crate::oracles::Family;
use crate::state::{EnsembleState, Register, Registers, TOLERANCE};
use crate::unitaries::{back_evolve, Pipeline, PreparationPermutation, Stage};

/// A one-bit observable on a register: a single cell or the XOR of several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    /// Content of the bit at this position (0 = leftmost).
    Bit(u32),
    /// Parity of the bits selected by the mask.
    Parity(BitString),
}

/// What is read out of the target register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableMode {
    FullContent,
    BitCell(u32),
    Parity(BitString),
    Subset(Vec<Cell>),
}

/// An observable diagonal in the computational basis of one register.
///
/// Every mode reduces to an ordered list of parity masks; the eigenvalue is
/// the bit string of those parities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observable {
    pub register: Register,
    pub mode: ObservableMode,
}

impl Observable {
    pub fn content(register: Register) -> Self {
        Observable { register, mode: ObservableMode::FullContent }
    }

    pub fn bit_cell(register: Register, pos: u32) -> Self {
        Observable { register, mode: ObservableMode::BitCell(pos) }
    }

    pub fn parity(register: Register, mask: BitString) -> Self {
        Observable { register, mode: ObservableMode::Parity(mask) }
    }

    pub fn subset(register: Register, cells: Vec<Cell>) -> Self {
        Observable { register, mode: ObservableMode::Subset(cells) }
    }

    /// Parity masks over a register of `width` bits, validated.
    pub fn masks(&self, width: u32) -> Result<Vec<u64>> {
        let cell_mask = |cell: &Cell| -> Result<u64> {
            match cell {
                Cell::Bit(pos) if *pos < width => Ok(1u64 << (width - 1 - pos)),
                Cell::Bit(pos) => Err(Error::Argument(format!("cell {pos} outside a {width}-bit register"))),
                Cell::Parity(m) if m.len() != width => {
                    Err(Error::Argument(format!("parity mask {m} is not {width} bits wide")))
                }
                Cell::Parity(m) if m.is_zero() => Err(Error::Argument("parity mask must be nonzero".into())),
                Cell::Parity(m) => Ok(m.value()),
            }
        };
        let masks = match &self.mode {
            ObservableMode::FullContent => (0..width).map(|p| 1u64 << (width - 1 - p)).collect(),
            ObservableMode::BitCell(p) => vec![cell_mask(&Cell::Bit(*p))?],
            ObservableMode::Parity(m) => vec![cell_mask(&Cell::Parity(*m))?],
            ObservableMode::Subset(cells) => {
                if cells.is_empty() {
                    return Err(Error::Argument("empty observable subset".into()));
                }
                let masks: Vec<u64> = cells.iter().map(cell_mask).collect::<Result<_>>()?;
                if gf2_rank(&masks) != masks.len() {
                    return Err(Error::Argument(
                        "subset members are not linearly independent parities".into(),
                    ));
                }
                masks
            }
        };
        Ok(masks)
    }

    fn eigenvalue_of(&self, masks: &[u64], content: u64) -> u64 {
        masks.iter().fold(0u64, |acc, m| (acc << 1) | u64::from((m & content).count_ones() % 2 == 1))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format!("{:?}", self.register);
        match &self.mode {
            ObservableMode::FullContent => write!(f, "{r}"),
            ObservableMode::BitCell(p) => write!(f, "{r}{p}"),
            ObservableMode::Parity(m) => write!(f, "{r}[{m}]"),
            ObservableMode::Subset(cells) => {
                let parts: Vec<String> = cells
                    .iter()
                    .map(|c| match c {
                        Cell::Bit(p) => format!("{r}{p}"),
                        Cell::Parity(m) => format!("{r}[{m}]"),
                    })
                    .collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

/// Rank over GF(2) of a set of bit masks.
pub fn gf2_rank(masks: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &m in masks {
        let mut x = m;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub eigenvalue: BitString,
    pub probability: f64,
}

/// Born-rule distribution of `obs` on `state`, nonzero outcomes only, in
/// increasing eigenvalue order.
pub fn measure(state: &EnsembleState, obs: &Observable) -> Result<Vec<MeasurementOutcome>> {
    let layout = state.layout();
    let masks = obs.masks(layout.width(obs.register))?;
    let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
    for (i, p) in state.basis_probabilities().into_iter().enumerate() {
        if p > 0.0 {
            *dist.entry(obs.eigenvalue_of(&masks, layout.content(i, obs.register))).or_default() += p;
        }
    }
    Ok(dist
        .into_iter()
        .filter(|(_, p)| *p > 1e-14)
        .map(|(e, p)| MeasurementOutcome {
            eigenvalue: BitString::from_value(e, masks.len() as u32),
            probability: p,
        })
        .collect())
}

/// Probability of one eigenvalue.
pub fn probability(state: &EnsembleState, obs: &Observable, outcome: &BitString) -> Result<f64> {
    Ok(measure(state, obs)?
        .into_iter()
        .find(|o| o.eigenvalue == *outcome)
        .map_or(0.0, |o| o.probability))
}

/// A post-selected projection: the state before, the renormalized state
/// after, and the pre-projection probability of the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub observable: Observable,
    pub outcome: BitString,
    pub pre: EnsembleState,
    pub post: EnsembleState,
    pub weight: f64,
}

impl Projection {
    /// Carries both ends of the projection back through `stages`.
    pub fn back_evolve(&self, stages: &[Stage]) -> Result<Projection> {
        Ok(Projection {
            observable: self.observable.clone(),
            outcome: self.outcome,
            pre: back_evolve(&self.pre, stages)?,
            post: back_evolve(&self.post, stages)?,
            weight: self.weight,
        })
    }
}

/// Drops the components inconsistent with `outcome` and renormalizes.
pub fn project(state: &EnsembleState, obs: &Observable, outcome: &BitString) -> Result<Projection> {
    let layout = state.layout();
    let masks = obs.masks(layout.width(obs.register))?;
    if outcome.len() as usize != masks.len() {
        return Err(Error::Argument(format!(
            "outcome {outcome} has {} bits, {obs} yields {}",
            outcome.len(),
            masks.len()
        )));
    }
    let kept = state
        .filter_basis(|i| obs.eigenvalue_of(&masks, layout.content(i, obs.register)) == outcome.value())
        .pruned();
    let weight = kept.norm_sqr();
    if weight <= TOLERANCE * TOLERANCE {
        return Err(Error::PostSelection(format!("{obs} = {outcome} has probability {weight:e}")));
    }
    Ok(Projection {
        observable: obs.clone(),
        outcome: *outcome,
        pre: state.clone(),
        post: kept.normalized()?,
        weight,
    })
}

/// One outcome of the problem setter's measurement in the deferred-measurement check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeferredOutcome {
    /// Outcome of measuring B before the pipeline.
    pub initial_b: BitString,
    /// The same outcome after the preparation permutation.
    pub prepared_b: BitString,
    pub probability_first: f64,
    pub probability_last: f64,
    /// Largest amplitude difference between the two final states.
    pub state_deviation: f64,
    /// Largest difference between the two A-outcome distributions.
    pub statistics_deviation: f64,
    /// Largest amplitude difference between the back-evolved end projection
    /// and the initial projection.
    pub back_evolution_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeferredReport {
    pub choice: BitString,
    pub source: BitString,
    pub outcomes: Vec<DeferredOutcome>,
    pub max_deviation: f64,
    pub equivalent: bool,
}

/// Compares measuring B first (then preparing, evaluating and rotating) with
/// measuring B at the end of the relativized run, for every possible outcome
/// of the problem setter's measurement.
pub fn deferred_equivalence(
    family: &Family,
    choice: &BitString,
    perm: &PreparationPermutation,
) -> Result<DeferredReport> {
    family.member(choice)?;
    let pipeline = Pipeline::new(family.clone(), perm.clone())?;
    let stages = pipeline.stages();
    let width = family.choice_width();
    let b_obs = Observable::content(Register::B);
    let a_obs = Observable::content(Register::A);
    let initial = pipeline.initial_state();
    let last = pipeline.run(&initial)?;

    let mut outcomes = Vec::new();
    for table in family.members() {
        let r = table.choice();
        let target = BitString::from_value(perm.image(r.value()), width);
        let first = project(&initial, &b_obs, &r)?;
        let bob_final = pipeline.run(&first.post)?;
        let end = project(&last, &b_obs, &target)?;
        let back = end.back_evolve(&stages)?;

        let dist = |s: &EnsembleState| -> Result<BTreeMap<BitString, f64>> {
            Ok(measure(s, &a_obs)?.into_iter().map(|o| (o.eigenvalue, o.probability)).collect())
        };
        let (d1, d2) = (dist(&bob_final)?, dist(&end.post)?);
        let statistics_deviation = d1
            .keys()
            .chain(d2.keys())
            .map(|k| (d1.get(k).unwrap_or(&0.0) - d2.get(k).unwrap_or(&0.0)).abs())
            .fold(0.0, f64::max);
        let rho_dev = ensemble_to_density(&bob_final, Registers::all())?
            .max_deviation(&ensemble_to_density(&end.post, Registers::all())?);

        outcomes.push(DeferredOutcome {
            initial_b: r,
            prepared_b: target,
            probability_first: first.weight,
            probability_last: end.weight,
            state_deviation: bob_final.max_deviation(&end.post).max(rho_dev),
            statistics_deviation,
            back_evolution_deviation: back.post.max_deviation(&first.post),
        });
    }
    let max_deviation = outcomes
        .iter()
        .flat_map(|o| {
            [
                (o.probability_first - o.probability_last).abs(),
                o.state_deviation,
                o.statistics_deviation,
                o.back_evolution_deviation,
            ]
        })
        .fold(0.0, f64::max);
    Ok(DeferredReport {
        choice: *choice,
        source: BitString::from_value(perm.inverse().image(choice.value()), width),
        outcomes,
        max_deviation,
        equivalent: max_deviation <= TOLERANCE,
    })
}

/// Joint distribution of two observables measured in both orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    /// `(first eigenvalue, second eigenvalue, probability)` measuring `first` first.
    pub joint: Vec<(BitString, BitString, f64)>,
    pub max_deviation: f64,
    pub order_free: bool,
    /// Whether the joint distribution factorizes into its marginals.
    pub independent: bool,
}

fn sequential_joint(
    state: &EnsembleState,
    first: &Observable,
    second: &Observable,
) -> Result<BTreeMap<(BitString, BitString), f64>> {
    let mut joint = BTreeMap::new();
    for o1 in measure(state, first)? {
        let proj = project(state, first, &o1.eigenvalue)?;
        for o2 in measure(&proj.post, second)? {
            joint.insert((o1.eigenvalue, o2.eigenvalue), o1.probability * o2.probability);
        }
    }
    Ok(joint)
}

/// Checks that measuring `first` then `second` gives the same joint
/// distribution as the reverse order.
pub fn commuting_order_check(state: &EnsembleState, first: &Observable, second: &Observable) -> Result<OrderReport> {
    let forward = sequential_joint(state, first, second)?;
    let reverse: BTreeMap<(BitString, BitString), f64> =
        sequential_joint(state, second, first)?.into_iter().map(|((y, x), p)| ((x, y), p)).collect();
    let max_deviation = forward
        .keys()
        .chain(reverse.keys())
        .map(|k| (forward.get(k).unwrap_or(&0.0) - reverse.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max);

    let m1: BTreeMap<BitString, f64> = measure(state, first)?.into_iter().map(|o| (o.eigenvalue, o.probability)).collect();
    let m2: BTreeMap<BitString, f64> = measure(state, second)?.into_iter().map(|o| (o.eigenvalue, o.probability)).collect();
    let independent = m1.iter().all(|(x, px)| {
        m2.iter().all(|(y, py)| (forward.get(&(*x, *y)).unwrap_or(&0.0) - px * py).abs() <= TOLERANCE)
    });
    Ok(OrderReport {
        joint: forward.into_iter().map(|((x, y), p)| (x, y, p)).collect(),
        max_deviation,
        order_free: max_deviation <= TOLERANCE,
        independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::reduced_entropy;
    use crate::oracles::FamilyKind;
    use crate::state::PhaseTag;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn grover_final() -> EnsembleState {
        Pipeline::relativized(Family::full(FamilyKind::Grover, 2).unwrap()).unwrap().final_state().unwrap()
    }

    #[test]
    fn content_of_b_on_the_mixture_is_uniform() {
        let p = Pipeline::relativized(Family::full(FamilyKind::Grover, 2).unwrap()).unwrap();
        let dist = measure(&p.initial_state(), &Observable::content(Register::B)).unwrap();
        assert_eq!(dist.len(), 4);
        for o in &dist {
            assert!((o.probability - 0.25).abs() < TOLERANCE);
        }
    }

    #[test]
    fn partial_projections_on_the_final_state() {
        let s = grover_final();
        let p0 = project(&s, &Observable::bit_cell(Register::B, 0), &bs("0")).unwrap();
        assert!((p0.weight - 0.5).abs() < TOLERANCE);
        assert_eq!(p0.post.support(Register::B).into_iter().collect::<Vec<_>>(), [0b00, 0b01]);
        let px = project(&s, &Observable::parity(Register::B, bs("11")), &bs("0")).unwrap();
        assert_eq!(px.post.support(Register::B).into_iter().collect::<Vec<_>>(), [0b00, 0b11]);
        // ρ_B goes from 2 bits to 1 bit.
        assert!((reduced_entropy(&s, Registers::B).unwrap() - 2.0).abs() < TOLERANCE);
        assert!((reduced_entropy(&px.post, Registers::B).unwrap() - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn zero_probability_outcome_is_rejected() {
        let layout = crate::state::RegisterLayout::new(1, 1, 1).unwrap();
        let s = EnsembleState::basis(layout, 0).unwrap();
        let err = project(&s, &Observable::content(Register::B), &bs("1")).unwrap_err();
        assert!(matches!(err, Error::PostSelection(_)));
    }

    #[test]
    fn dependent_subset_is_rejected() {
        let obs = Observable::subset(Register::B, vec![Cell::Bit(0), Cell::Bit(1), Cell::Parity(bs("11"))]);
        assert!(matches!(obs.masks(2), Err(Error::Argument(_))));
        assert!(Observable::parity(Register::B, bs("00")).masks(2).is_err());
        assert!(Observable::bit_cell(Register::B, 2).masks(2).is_err());
    }

    #[test]
    fn measuring_a_on_the_sharp_solution_leaves_it_unaltered() {
        let layout = crate::state::RegisterLayout::new(2, 2, 1).unwrap();
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); layout.dim()];
        amps[layout.compose(0, 0, 0)] = std::f64::consts::FRAC_1_SQRT_2.into();
        amps[layout.compose(0, 0, 1)] = (-std::f64::consts::FRAC_1_SQRT_2).into();
        let s = EnsembleState::pure(layout, amps).unwrap();
        let dist = measure(&s, &Observable::content(Register::A)).unwrap();
        assert_eq!(dist, [MeasurementOutcome { eigenvalue: bs("00"), probability: dist[0].probability }]);
        assert!((dist[0].probability - 1.0).abs() < TOLERANCE);
        let p = project(&s, &Observable::content(Register::A), &bs("00")).unwrap();
        assert!(p.post.max_deviation(&s) < TOLERANCE);
    }

    #[test]
    fn order_of_commuting_measurements_is_irrelevant() {
        let s = grover_final();
        let r = commuting_order_check(&s, &Observable::content(Register::A), &Observable::content(Register::B)).unwrap();
        assert!(r.order_free);
        assert!(!r.independent);
        assert_eq!(r.joint.len(), 4);
        assert!(r.joint.iter().all(|(a, b, p)| a == b && (p - 0.25).abs() < TOLERANCE));

        let r = commuting_order_check(&s, &Observable::bit_cell(Register::B, 0), &Observable::bit_cell(Register::B, 1)).unwrap();
        assert!(r.order_free && r.independent);

        let p = Pipeline::relativized(Family::full(FamilyKind::Grover, 2).unwrap()).unwrap();
        let r = commuting_order_check(&p.initial_state(), &Observable::content(Register::A), &Observable::content(Register::B)).unwrap();
        assert!(r.order_free && r.independent);
    }

    #[test]
    fn deferral_for_grover() {
        let family = Family::full(FamilyKind::Grover, 2).unwrap();
        let perm = PreparationPermutation::sending(&bs("01"), &bs("00")).unwrap();
        let r = deferred_equivalence(&family, &bs("00"), &perm).unwrap();
        assert!(r.equivalent, "{r:?}");
        assert_eq!(r.source, bs("01"));
        assert!(deferred_equivalence(&family, &bs("000"), &perm).is_err());
    }

    proptest! {
        #[test]
        fn born_consistency_and_idempotence(mask in 1u64..16, seed in any::<u64>()) {
            let family = Family::full(FamilyKind::DeutschJozsa, 2).unwrap();
            let s = Pipeline::relativized(family).unwrap().final_state().unwrap();
            let obs = Observable::parity(Register::B, BitString::from_value(mask, 4));
            let dist = measure(&s, &obs).unwrap();
            prop_assert!((dist.iter().map(|o| o.probability).sum::<f64>() - 1.0).abs() < TOLERANCE);
            let o = &dist[(seed % dist.len() as u64) as usize];
            let once = project(&s, &obs, &o.eigenvalue).unwrap();
            prop_assert!((once.weight - o.probability).abs() < TOLERANCE);
            let twice = project(&once.post, &obs, &o.eigenvalue).unwrap();
            prop_assert!(twice.post.max_deviation(&once.post) < TOLERANCE);
            prop_assert!(once.post.tags().iter().all(|t| matches!(t, PhaseTag::Random(_))));
        }
    }
}
