// SPDX-License-Identifier: Apache-2.0

//! Serializable run traces.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use speedup_core::measurement::MeasurementOutcome;
use speedup_core::sampling::SimonRecovery;
use speedup_core::state::{EnsembleState, PhaseTag, RegisterLayout};
use speedup_core::{BitString, Result};

use crate::config::RunConfig;

/// Amplitudes below this modulus are rounding residue and are left out of traces.
pub const NEGLIGIBLE: f64 = 1e-12;

/// Nonzero amplitudes of each phase-tagged component, keyed by `b|a|v`
/// basis labels; each amplitude is a `[re, im]` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub layout: RegisterLayout,
    pub components: BTreeMap<PhaseTag, BTreeMap<String, (f64, f64)>>,
}

impl StateRecord {
    pub fn from_state(state: &EnsembleState) -> Self {
        let layout = state.layout();
        let components = state
            .components()
            .map(|(tag, amps)| {
                let entries = amps
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > NEGLIGIBLE)
                    .map(|(i, c)| (layout.label(i), (c.re, c.im)))
                    .collect();
                (*tag, entries)
            })
            .collect();
        StateRecord { layout, components }
    }

    pub fn to_state(&self) -> Result<EnsembleState> {
        let layout = RegisterLayout::new(self.layout.b, self.layout.a, self.layout.v)?;
        let mut state = EnsembleState::empty(layout);
        for (tag, entries) in &self.components {
            let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
            for (label, &(re, im)) in entries {
                amps[layout.parse_label(label)?] = Complex64::new(re, im);
            }
            state.add_component(*tag, amps)?;
        }
        Ok(state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub state: StateRecord,
    /// Entropy of ρ_B in bits.
    pub entropy_b: f64,
    /// Entropy of ρ_A in bits.
    pub entropy_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Stage whose state is measured.
    pub after: String,
    pub observable: String,
    pub distribution: BTreeMap<BitString, f64>,
    pub selected: BitString,
}

impl MeasurementRecord {
    pub fn new(after: &str, observable: String, dist: &[MeasurementOutcome], selected: BitString) -> Self {
        MeasurementRecord {
            after: after.to_string(),
            observable,
            distribution: dist.iter().map(|o| (o.eigenvalue, o.probability)).collect(),
            selected,
        }
    }
}

/// Everything a run produced, in execution order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub config: RunConfig,
    pub stages: Vec<StageRecord>,
    pub measurements: Vec<MeasurementRecord>,
    /// The solution read off the final measurement.
    pub solution: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simon: Option<SimonRecovery>,
}
