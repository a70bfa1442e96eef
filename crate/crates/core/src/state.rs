// SPDX-License-Identifier: Apache-2.0

//! Register layout and the random-phase ensemble representation of states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use bitflags::bitflags;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::{low_mask, BitString};
use crate::error::{Error, Result};

/// Absolute tolerance used for amplitude and entropy equality.
pub const TOLERANCE: f64 = 1e-9;

/// Largest total register width the dense simulator accepts.
pub const MAX_SIM_QUBITS: u32 = 16;

/// One of the three registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Register {
    /// The problem setter's register holding the choice `b`.
    B,
    /// The solver's argument register.
    A,
    /// The function-value register.
    V,
}

bitflags! {
    /// A subset of registers, used for reductions.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub struct Registers: u8 {
        const B = 0b100;
        const A = 0b010;
        const V = 0b001;
    }
}

impl From<Register> for Registers {
    fn from(r: Register) -> Self {
        match r {
            Register::B => Registers::B,
            Register::A => Registers::A,
            Register::V => Registers::V,
        }
    }
}

/// Widths of the B, A and V registers. Basis indices are row-major over
/// `(b, a, v)` with B most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub b: u32,
    pub a: u32,
    pub v: u32,
}

impl RegisterLayout {
    pub fn new(b: u32, a: u32, v: u32) -> Result<Self> {
        if b == 0 || a == 0 || v == 0 {
            return Err(Error::Dimension(format!("register widths must be >= 1, got ({b}, {a}, {v})")));
        }
        let total = b + a + v;
        if total > MAX_SIM_QUBITS {
            return Err(Error::Capability(format!(
                "{total} qubits exceed the dense simulator bound of {MAX_SIM_QUBITS}"
            )));
        }
        Ok(RegisterLayout { b, a, v })
    }

    pub fn qubits(&self) -> u32 {
        self.b + self.a + self.v
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits()
    }

    pub fn width(&self, r: Register) -> u32 {
        match r {
            Register::B => self.b,
            Register::A => self.a,
            Register::V => self.v,
        }
    }

    fn shift(&self, r: Register) -> u32 {
        match r {
            Register::B => self.a + self.v,
            Register::A => self.v,
            Register::V => 0,
        }
    }

    /// Content of register `r` in basis state `index`.
    pub fn content(&self, index: usize, r: Register) -> u64 {
        ((index as u64) >> self.shift(r)) & low_mask(self.width(r))
    }

    pub fn compose(&self, b: u64, a: u64, v: u64) -> usize {
        ((b << (self.a + self.v)) | (a << self.v) | v) as usize
    }

    /// Row-major basis index of `|b⟩|a⟩|v⟩`.
    pub fn basis_index(&self, b: &BitString, a: &BitString, v: &BitString) -> Result<usize> {
        for (s, r) in [(b, Register::B), (a, Register::A), (v, Register::V)] {
            if s.len() != self.width(r) {
                return Err(Error::Dimension(format!(
                    "{r:?} content {s} has width {} but the register has {}",
                    s.len(),
                    self.width(r)
                )));
            }
        }
        Ok(self.compose(b.value(), a.value(), v.value()))
    }

    /// Width in qubits of a register subset.
    pub fn subset_width(&self, subset: Registers) -> u32 {
        [Register::B, Register::A, Register::V]
            .into_iter()
            .filter(|r| subset.contains((*r).into()))
            .map(|r| self.width(r))
            .sum()
    }

    /// Index of `index` restricted to the registers of `subset`, keeping B ≻ A ≻ V order.
    pub fn project_index(&self, index: usize, subset: Registers) -> usize {
        let mut out = 0u64;
        for r in [Register::B, Register::A, Register::V] {
            if subset.contains(r.into()) {
                out = (out << self.width(r)) | self.content(index, r);
            }
        }
        out as usize
    }

    /// Label `b|a|v` of a basis state.
    pub fn label(&self, index: usize) -> String {
        format!(
            "{}|{}|{}",
            BitString::from_value(self.content(index, Register::B), self.b),
            BitString::from_value(self.content(index, Register::A), self.a),
            BitString::from_value(self.content(index, Register::V), self.v)
        )
    }

    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let parts: Vec<&str> = label.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("basis label {label:?} is not of the form b|a|v")));
        }
        let b: BitString = parts[0].parse()?;
        let a: BitString = parts[1].parse()?;
        let v: BitString = parts[2].parse()?;
        self.basis_index(&b, &a, &v)
    }
}

/// Identifier of one independent uniformly distributed random phase.
///
/// Random phases are keyed by the B-register basis value they multiply in the
/// problem setter's mixture. `Fixed` marks the deterministic part of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseTag {
    Fixed,
    Random(u64),
}

impl fmt::Display for PhaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseTag::Fixed => f.write_str("fixed"),
            PhaseTag::Random(k) => write!(f, "phi{k}"),
        }
    }
}

impl FromStr for PhaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "fixed" {
            return Ok(PhaseTag::Fixed);
        }
        s.strip_prefix("phi")
            .and_then(|k| k.parse().ok())
            .map(PhaseTag::Random)
            .ok_or_else(|| Error::Parse(format!("invalid phase tag {s:?}")))
    }
}

impl Serialize for PhaseTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhaseTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A mixed state written as a ket whose components carry independent random
/// phases: `Σ_tag e^{iφ_tag} |v_tag⟩`. The density operator is the phase
/// average of the ket-bra, in which cross-tag terms vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    layout: RegisterLayout,
    components: BTreeMap<PhaseTag, Vec<Complex64>>,
}

impl EnsembleState {
    pub fn empty(layout: RegisterLayout) -> Self {
        EnsembleState { layout, components: BTreeMap::new() }
    }

    /// Pure state with a single deterministic component.
    pub fn pure(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::empty(layout);
        s.add_component(PhaseTag::Fixed, amplitudes)?;
        Ok(s)
    }

    /// Sharp computational basis state.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::Dimension(format!("basis index {index} >= {}", layout.dim())));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::pure(layout, amps)
    }

    /// `Σ_k c_k e^{iφ_{tag_k}} |b_k⟩ ⊗ |α⟩_A ⊗ |ν⟩_V` for the given B entries and
    /// fixed A and V factors.
    pub fn mixture_product(
        layout: RegisterLayout,
        entries: &[(PhaseTag, u64, Complex64)],
        a_factor: &[Complex64],
        v_factor: &[Complex64],
    ) -> Result<Self> {
        if a_factor.len() != 1 << layout.a || v_factor.len() != 1 << layout.v {
            return Err(Error::Dimension("A or V factor length does not match the layout".into()));
        }
        let mut s = Self::empty(layout);
        for &(tag, b, c) in entries {
            if b >> layout.b != 0 {
                return Err(Error::Dimension(format!("B value {b} exceeds {} bits", layout.b)));
            }
            let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
            for (a, &ca) in a_factor.iter().enumerate() {
                for (v, &cv) in v_factor.iter().enumerate() {
                    amps[layout.compose(b, a as u64, v as u64)] = c * ca * cv;
                }
            }
            s.add_component(tag, amps)?;
        }
        Ok(s)
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    /// Adds `amplitudes` to the component of `tag`.
    pub fn add_component(&mut self, tag: PhaseTag, amplitudes: Vec<Complex64>) -> Result<()> {
        if amplitudes.len() != self.layout.dim() {
            return Err(Error::Dimension(format!(
                "component has {} amplitudes, layout needs {}",
                amplitudes.len(),
                self.layout.dim()
            )));
        }
        match self.components.get_mut(&tag) {
            Some(existing) => existing.iter_mut().zip(amplitudes).for_each(|(x, y)| *x += y),
            None => {
                self.components.insert(tag, amplitudes);
            }
        }
        Ok(())
    }

    pub fn components(&self) -> impl Iterator<Item = (&PhaseTag, &Vec<Complex64>)> {
        self.components.iter()
    }

    pub fn component(&self, tag: PhaseTag) -> Option<&[Complex64]> {
        self.components.get(&tag).map(|v| v.as_slice())
    }

    pub fn tags(&self) -> Vec<PhaseTag> {
        self.components.keys().copied().collect()
    }

    pub fn amplitude(&self, tag: PhaseTag, index: usize) -> Complex64 {
        self.components.get(&tag).map_or(Complex64::new(0.0, 0.0), |v| v[index])
    }

    /// `Σ_tag ‖v_tag‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.components.values().flat_map(|v| v.iter()).map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= TOLERANCE * TOLERANCE {
            return Err(Error::Numeric("cannot normalize a zero state".into()));
        }
        let scale = 1.0 / n.sqrt();
        for v in self.components.values_mut() {
            v.iter_mut().for_each(|c| *c *= scale);
        }
        Ok(self)
    }

    /// Applies a linear map to every component vector.
    pub fn map_components<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[Complex64]) -> Vec<Complex64>,
    {
        EnsembleState {
            layout: self.layout,
            components: self.components.iter().map(|(t, v)| (*t, f(v))).collect(),
        }
    }

    /// Renames phase tags by a bijection; independent phases stay independent.
    pub fn relabel_tags<F: Fn(PhaseTag) -> PhaseTag>(&self, f: F) -> Self {
        let mut out = Self::empty(self.layout);
        for (t, v) in &self.components {
            out.add_component(f(*t), v.clone()).expect("same layout");
        }
        out
    }

    /// Drops components whose norm is below the tolerance and flushes tiny amplitudes.
    pub fn pruned(mut self) -> Self {
        self.components.retain(|_, v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-24);
        for v in self.components.values_mut() {
            for c in v.iter_mut() {
                if c.norm() < 1e-15 {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
        self
    }

    /// Keeps only the basis states for which `keep` holds.
    pub fn filter_basis<F: Fn(usize) -> bool>(&self, keep: F) -> Self {
        self.map_components(|v| {
            v.iter()
                .enumerate()
                .map(|(i, &c)| if keep(i) { c } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
    }

    /// Largest per-tag, per-amplitude modulus difference. Missing tags count as zero vectors.
    pub fn max_deviation(&self, other: &EnsembleState) -> f64 {
        if self.layout != other.layout {
            return f64::INFINITY;
        }
        let tags: BTreeSet<PhaseTag> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        let mut worst = 0.0f64;
        for t in tags {
            for i in 0..self.layout.dim() {
                worst = worst.max((self.amplitude(t, i) - other.amplitude(t, i)).norm());
            }
        }
        worst
    }

    /// Values of register `r` carrying nonzero weight.
    pub fn support(&self, r: Register) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for v in self.components.values() {
            for (i, c) in v.iter().enumerate() {
                if c.norm_sqr() > 1e-20 {
                    out.insert(self.layout.content(i, r));
                }
            }
        }
        out
    }

    /// Probability of each basis index, summed over tags.
    pub fn basis_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.dim()];
        for v in self.components.values() {
            for (i, c) in v.iter().enumerate() {
                p[i] += c.norm_sqr();
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn basis_index_examples() {
        let l = RegisterLayout::new(2, 2, 1).unwrap();
        assert_eq!(l.basis_index(&bs("00"), &bs("00"), &bs("0")).unwrap(), 0);
        assert_eq!(l.basis_index(&bs("00"), &bs("00"), &bs("1")).unwrap(), 1);
        // b = 1 contributes 1·8, a = 2 contributes 2·2.
        assert_eq!(l.basis_index(&bs("01"), &bs("10"), &bs("0")).unwrap(), 12);
        assert!(matches!(
            l.basis_index(&bs("001"), &bs("10"), &bs("0")),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn basis_index_is_bijective() {
        let l = RegisterLayout::new(2, 3, 1).unwrap();
        let mut seen = BTreeSet::new();
        for b in BitString::all(2) {
            for a in BitString::all(3) {
                for v in BitString::all(1) {
                    let i = l.basis_index(&b, &a, &v).unwrap();
                    assert_eq!(l.content(i, Register::B), b.value());
                    assert_eq!(l.content(i, Register::A), a.value());
                    assert_eq!(l.parse_label(&l.label(i)).unwrap(), i);
                    assert!(seen.insert(i));
                }
            }
        }
        assert_eq!(seen.len(), l.dim());
    }

    #[test]
    fn layout_bounds() {
        assert!(matches!(RegisterLayout::new(0, 1, 1), Err(Error::Dimension(_))));
        assert!(matches!(RegisterLayout::new(16, 4, 1), Err(Error::Capability(_))));
    }

    #[test]
    fn tags_parse() {
        assert_eq!("fixed".parse::<PhaseTag>().unwrap(), PhaseTag::Fixed);
        assert_eq!("phi12".parse::<PhaseTag>().unwrap(), PhaseTag::Random(12));
        assert!("psi1".parse::<PhaseTag>().is_err());
    }

    #[test]
    fn project_index_keeps_order() {
        let l = RegisterLayout::new(2, 2, 1).unwrap();
        let i = l.compose(0b01, 0b10, 1);
        assert_eq!(l.project_index(i, Registers::B | Registers::A), 0b0110);
        assert_eq!(l.project_index(i, Registers::B | Registers::V), 0b011);
    }
}
