use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, Gate, Instruction};

/// SI1000 noise strength. Every rate is derived from the CZ depolarization `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
}

impl NoiseParams {
    pub fn si1000(p: f64) -> Self {
        NoiseParams { p }
    }

    fn rate(&self, factor: f64) -> f64 {
        (self.p * factor).clamp(0.0, 1.0)
    }

    pub fn two_qubit(&self) -> f64 {
        self.rate(1.0)
    }
    pub fn single_qubit(&self) -> f64 {
        self.rate(0.1)
    }
    pub fn reset_flip(&self) -> f64 {
        self.rate(2.0)
    }
    pub fn measure_flip(&self) -> f64 {
        self.rate(5.0)
    }
    pub fn measure_depolarize(&self) -> f64 {
        self.rate(1.0)
    }
    pub fn idle_during_readout(&self) -> f64 {
        self.rate(2.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise strength {0} outside [0, 1]")]
    BadStrength(f64),
    #[error("instruction {index}: CX must be transpiled to CZ before noise is applied")]
    NotTranspiled { index: usize },
    #[error("instruction {index}: circuit already contains noise")]
    AlreadyNoisy { index: usize },
}

fn channel(gate: Gate, p: f64, qubits: impl IntoIterator<Item = u32>) -> Option<Instruction> {
    let inst = Instruction::on_qubits(gate, qubits).with_args([p]);
    (p > 0.0 && !inst.targets.is_empty()).then_some(inst)
}

/// Inserts SI1000 noise channels, layer by layer.
///
/// Layers containing an `MPP` are left noiseless. A qubit counts as idle in a layer
/// once it has been used by an earlier layer and is not touched by this one.
pub fn apply_noise(circuit: &Circuit, params: NoiseParams) -> Result<Circuit, NoiseError> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(NoiseError::BadStrength(params.p));
    }
    for (index, inst) in circuit.instructions.iter().enumerate() {
        if inst.gate == Gate::Cx {
            return Err(NoiseError::NotTranspiled { index });
        }
        if inst.gate.is_noise() || (matches!(inst.gate, Gate::M | Gate::Mx) && !inst.args.is_empty()) {
            return Err(NoiseError::AlreadyNoisy { index });
        }
    }

    let mut out = Circuit::new();
    let mut active: BTreeSet<u32> = BTreeSet::new();
    for (li, layer) in circuit.layers().into_iter().enumerate() {
        if li > 0 {
            out.tick();
        }
        let noiseless = layer.iter().any(|i| i.gate == Gate::Mpp);
        let mut touched: BTreeSet<u32> = BTreeSet::new();
        let mut readout_layer = false;
        let mut has_ops = false;

        for inst in layer {
            let mut inst = inst.clone();
            let gate = inst.gate;
            if !gate.is_annotation() {
                touched.extend(inst.qubits());
                has_ops |= !inst.targets.is_empty();
                readout_layer |= gate.is_reset() || matches!(gate, Gate::M | Gate::Mx);
            }
            if noiseless {
                out.push(inst);
                continue;
            }
            let after = match gate {
                Gate::Cz => channel(Gate::Depolarize2, params.two_qubit(), inst.qubits()),
                Gate::C1(_) => channel(Gate::Depolarize1, params.single_qubit(), inst.qubits()),
                Gate::R => channel(Gate::XError, params.reset_flip(), inst.qubits()),
                Gate::Rx => channel(Gate::ZError, params.reset_flip(), inst.qubits()),
                Gate::M | Gate::Mx => {
                    if params.measure_flip() > 0.0 {
                        inst.args = vec![params.measure_flip()];
                    }
                    channel(Gate::Depolarize1, params.measure_depolarize(), inst.qubits())
                }
                _ => None,
            };
            out.push(inst);
            out.instructions.extend(after);
        }

        if !noiseless && has_ops {
            let idle: Vec<u32> = active.difference(&touched).copied().collect();
            out.instructions.extend(channel(Gate::Depolarize1, params.single_qubit(), idle.iter().copied()));
            if readout_layer {
                out.instructions
                    .extend(channel(Gate::Depolarize1, params.idle_during_readout(), idle.iter().copied()));
            }
        }
        active.extend(touched);
    }
    Ok(out)
}
