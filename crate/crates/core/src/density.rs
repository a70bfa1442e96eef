// SPDX-License-Identifier: Apache-2.0

//! Density operators: phase averaging, partial trace, von Neumann entropy and
//! the Monte Carlo cross-check of the phase average.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::state::{EnsembleState, PhaseTag, RegisterLayout, Registers, TOLERANCE};

/// Samples drawn per independently seeded Monte Carlo chunk.
const MC_CHUNK: usize = 2048;

/// A Hermitian, unit-trace, positive semidefinite operator on a subset of registers.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
    subset: Registers,
}

impl DensityOperator {
    /// Wraps a matrix after checking Hermiticity and unit trace.
    pub fn new(matrix: DMatrix<Complex64>, subset: Registers) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let rho = DensityOperator { matrix, subset };
        let herm = rho.hermiticity_defect();
        if herm > TOLERANCE {
            return Err(Error::Numeric(format!("matrix is not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TOLERANCE {
            return Err(Error::Numeric(format!("trace {tr} differs from 1")));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn subset(&self) -> Registers {
        self.subset
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)].norm() < 1e-14))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = if self.is_diagonal() {
            self.diagonal()
        } else {
            self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
        };
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Largest entrywise modulus difference.
    pub fn max_deviation(&self, other: &DensityOperator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn von_neumann_entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }
}

/// `-Σ λ log₂ λ` over the spectrum, with `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -TOLERANCE {
            return Err(Error::Numeric(format!("negative eigenvalue {lambda:e}")));
        }
        if lambda > 1e-15 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}

fn check_subset(subset: Registers) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Argument("reduction onto an empty register subset".into()));
    }
    Ok(())
}

/// Adds `Tr_complement |ψ⟩⟨ψ|` into `acc` for one amplitude vector.
fn accumulate_reduced(
    acc: &mut DMatrix<Complex64>,
    layout: &RegisterLayout,
    subset: Registers,
    amps: &[Complex64],
) {
    let complement = Registers::all() - subset;
    let mut groups: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (i, &c) in amps.iter().enumerate() {
        if c.norm_sqr() > 0.0 {
            let traced = if complement.is_empty() { 0 } else { layout.project_index(i, complement) };
            groups.entry(traced).or_default().push((layout.project_index(i, subset), c));
        }
    }
    for members in groups.values() {
        for &(k1, c1) in members {
            for &(k2, c2) in members {
                acc[(k1, k2)] += c1 * c2.conj();
            }
        }
    }
}

/// Exact phase average: `Σ_tag Tr_complement |v_tag⟩⟨v_tag|`. Cross terms between
/// distinct tags average to zero and are never formed.
pub fn ensemble_to_density(state: &EnsembleState, subset: Registers) -> Result<DensityOperator> {
    check_subset(subset)?;
    let layout = state.layout();
    let dim = 1usize << layout.subset_width(subset);
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (_, amps) in state.components() {
        accumulate_reduced(&mut acc, &layout, subset, amps);
    }
    DensityOperator::new(acc, subset)
}

/// Entropy in bits of the reduction of `state` onto `subset`.
pub fn reduced_entropy(state: &EnsembleState, subset: Registers) -> Result<f64> {
    von_neumann_entropy(&ensemble_to_density(state, subset)?)
}

/// Phase average estimated by drawing concrete uniform phases for every random
/// tag, averaging `|ψ⟩⟨ψ|` and reducing onto `subset`.
pub fn monte_carlo_density(
    state: &EnsembleState,
    subset: Registers,
    samples: usize,
    seed: u64,
) -> Result<DensityOperator> {
    monte_carlo_density_with(state, subset, samples, seed, Parallelism::default())
}

/// [`monte_carlo_density`] with an explicit schedule. The result is identical for
/// both schedules.
pub fn monte_carlo_density_with(
    state: &EnsembleState,
    subset: Registers,
    samples: usize,
    seed: u64,
    exec: Parallelism,
) -> Result<DensityOperator> {
    check_subset(subset)?;
    if samples == 0 {
        return Err(Error::Argument("Monte Carlo needs at least one sample".into()));
    }
    let layout = state.layout();
    let dim = 1usize << layout.subset_width(subset);
    let comps: Vec<(PhaseTag, &Vec<Complex64>)> = state.components().map(|(t, v)| (*t, v)).collect();
    let chunks = samples.div_ceil(MC_CHUNK);

    let partials = exec.map_range(chunks, |chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        let mut psi = vec![Complex64::new(0.0, 0.0); layout.dim()];
        for _ in 0..count {
            psi.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            for (tag, amps) in &comps {
                let phase = match tag {
                    PhaseTag::Fixed => Complex64::new(1.0, 0.0),
                    PhaseTag::Random(_) => {
                        Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
                    }
                };
                for (p, &a) in psi.iter_mut().zip(amps.iter()) {
                    *p += phase * a;
                }
            }
            accumulate_reduced(&mut acc, &layout, subset, &psi);
        }
        acc
    });

    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for p in partials {
        total += p;
    }
    total /= Complex64::new(samples as f64, 0.0);
    // Sample noise never breaks Hermiticity, but rounding can nudge the trace.
    let tr: f64 = total.diagonal().iter().map(|c| c.re).sum();
    total /= Complex64::new(tr, 0.0);
    DensityOperator::new(total, subset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// (1/2) Σ_b e^{iφ_b} |b⟩_B |b⟩_A |0⟩_V on two-qubit B and A.
    fn correlated_pair() -> EnsembleState {
        let layout = RegisterLayout::new(2, 2, 1).unwrap();
        let mut s = EnsembleState::empty(layout);
        for b in 0..4u64 {
            let mut amps = vec![c(0.0); layout.dim()];
            amps[layout.compose(b, b, 0)] = c(0.5);
            s.add_component(PhaseTag::Random(b), amps).unwrap();
        }
        s
    }

    #[test]
    fn correlated_pair_is_a_two_bit_mixture() {
        let rho = ensemble_to_density(&correlated_pair(), Registers::B | Registers::A).unwrap();
        assert_eq!(rho.dim(), 16);
        for i in 0..16 {
            for j in 0..16 {
                let expect = if i == j && (i >> 2) == (i & 3) { 0.25 } else { 0.0 };
                assert!((rho.matrix()[(i, j)] - c(expect)).norm() < 1e-12);
            }
        }
        assert!((rho.von_neumann_entropy().unwrap() - 2.0).abs() < TOLERANCE);
    }

    #[test]
    fn pure_state_is_rank_one() {
        let layout = RegisterLayout::new(1, 1, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(h);
        amps[7] = c(h);
        let s = EnsembleState::pure(layout, amps).unwrap();
        let rho = ensemble_to_density(&s, Registers::all()).unwrap();
        assert!(rho.von_neumann_entropy().unwrap().abs() < TOLERANCE);
        let ev = rho.eigenvalues();
        assert!((ev[7] - 1.0).abs() < 1e-12);
        // The GHZ-like reduction onto B alone is maximally mixed.
        let rb = ensemble_to_density(&s, Registers::B).unwrap();
        assert!((rb.von_neumann_entropy().unwrap() - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn maximally_mixed_two_qubits() {
        let m = DMatrix::from_diagonal_element(4, 4, c(0.25));
        let rho = DensityOperator::new(m, Registers::B).unwrap();
        assert!((rho.von_neumann_entropy().unwrap() - 2.0).abs() < TOLERANCE);
    }

    #[test]
    fn empty_subset_rejected() {
        assert!(matches!(
            ensemble_to_density(&correlated_pair(), Registers::empty()),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            monte_carlo_density(&correlated_pair(), Registers::B, 0, 1),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn non_psd_is_a_numeric_error() {
        let mut m = DMatrix::from_diagonal_element(2, 2, c(0.0));
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        let rho = DensityOperator::new(m, Registers::V).unwrap();
        assert!(matches!(rho.von_neumann_entropy(), Err(Error::Numeric(_))));
    }

    #[test]
    fn single_tag_monte_carlo_is_exact() {
        let layout = RegisterLayout::new(1, 1, 1).unwrap();
        let amps: Vec<Complex64> = (0..8).map(|i| c(if i % 3 == 0 { 0.5 } else { 0.0 })).collect();
        let s = EnsembleState::pure(layout, amps).unwrap().normalized().unwrap();
        let exact = ensemble_to_density(&s, Registers::B | Registers::V).unwrap();
        let mc = monte_carlo_density(&s, Registers::B | Registers::V, 1, 3).unwrap();
        assert!(exact.max_deviation(&mc) < 1e-12);
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let s = correlated_pair();
        let a = monte_carlo_density_with(&s, Registers::B, 5000, 9, Parallelism::Sequential).unwrap();
        let b = monte_carlo_density_with(&s, Registers::B, 5000, 9, Parallelism::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
