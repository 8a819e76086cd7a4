use std::collections::BTreeMap;

use thiserror::Error;

use super::{Circuit, Clifford1, Gate, Instruction, Target};

#[derive(Debug, Error, PartialEq)]
pub enum TranspileError {
    #[error("instruction {index} ({gate}) is not supported before noise is applied")]
    Unsupported { index: usize, gate: &'static str },
}

/// Rewrites every `CX` layer as `H` on the targets, a `CZ` layer, then `H` on the targets.
///
/// Afterwards each maximal run of layers holding only single-qubit Cliffords is fused
/// into one layer of per-qubit composites, which cancels the adjacent Hadamards.
/// Composites equal to the identity are dropped, and so is a fused layer left empty.
pub fn transpile_to_cz(circuit: &Circuit) -> Result<Circuit, TranspileError> {
    if let Some((index, inst)) = circuit
        .instructions
        .iter()
        .enumerate()
        .find(|(_, i)| i.gate.is_noise() || (matches!(i.gate, Gate::M | Gate::Mx) && !i.args.is_empty()))
    {
        return Err(TranspileError::Unsupported { index, gate: inst.gate.name() });
    }

    let mut layers: Vec<Vec<Instruction>> = Vec::new();
    for layer in circuit.layers() {
        if !layer.iter().any(|i| i.gate == Gate::Cx) {
            layers.push(layer.to_vec());
            continue;
        }
        let mut pre = Vec::new();
        let mut mid = Vec::new();
        for inst in layer {
            if inst.gate == Gate::Cx {
                let targets: Vec<u32> = inst.targets.chunks_exact(2).filter_map(|p| p[1].qubit()).collect();
                pre.push(Instruction::on_qubits(Gate::H, targets));
                mid.push(Instruction { gate: Gate::Cz, args: Vec::new(), targets: inst.targets.clone() });
            } else {
                mid.push(inst.clone());
            }
        }
        layers.push(pre.clone());
        layers.push(mid);
        layers.push(pre);
    }

    let mut fused: Vec<Vec<Instruction>> = Vec::new();
    let mut run: Option<BTreeMap<u32, Clifford1>> = None;
    for layer in layers {
        let single_qubit_only = !layer.is_empty() && layer.iter().all(|i| matches!(i.gate, Gate::C1(_)));
        if single_qubit_only {
            let acc = run.get_or_insert_with(BTreeMap::new);
            for inst in &layer {
                let Gate::C1(c) = inst.gate else { unreachable!() };
                for q in inst.qubits() {
                    let entry = acc.entry(q).or_insert(Clifford1::I);
                    *entry = entry.then(c);
                }
            }
            continue;
        }
        if let Some(acc) = run.take() {
            flush(acc, &mut fused);
        }
        fused.push(layer);
    }
    if let Some(acc) = run.take() {
        flush(acc, &mut fused);
    }

    let mut out = Circuit::new();
    for (i, layer) in fused.into_iter().enumerate() {
        if i > 0 {
            out.tick();
        }
        out.instructions.extend(layer);
    }
    Ok(out)
}

fn flush(acc: BTreeMap<u32, Clifford1>, fused: &mut Vec<Vec<Instruction>>) {
    let mut by_gate: BTreeMap<Clifford1, Vec<u32>> = BTreeMap::new();
    for (q, c) in acc {
        if c != Clifford1::I {
            by_gate.entry(c).or_default().push(q);
        }
    }
    if by_gate.is_empty() {
        return;
    }
    fused.push(
        by_gate
            .into_iter()
            .map(|(c, qs)| Instruction::new(Gate::C1(c), qs.into_iter().map(Target::Qubit)))
            .collect(),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> String {
        transpile_to_cz(&text.parse().unwrap()).unwrap().to_string()
    }

    #[test]
    fn single_cx() {
        assert_eq!(run("CX 0 1"), "H 1\nTICK\nCZ 0 1\nTICK\nH 1\n");
    }

    #[test]
    fn leading_hadamard_cancels() {
        assert_eq!(run("H 1\nTICK\nCX 0 1"), "CZ 0 1\nTICK\nH 1\n");
    }

    #[test]
    fn sandwiched_s_becomes_sqrt_x() {
        assert_eq!(
            run("CX 0 1\nTICK\nS 1\nTICK\nCX 2 1"),
            "H 1\nTICK\nCZ 0 1\nTICK\nSQRT_X 1\nTICK\nCZ 2 1\nTICK\nH 1\n"
        );
    }

    #[test]
    fn non_cx_layers_pass_through() {
        assert_eq!(run("R 0 1\nTICK\nCZ 0 1\nTICK\nM 0 1"), "R 0 1\nTICK\nCZ 0 1\nTICK\nM 0 1\n");
    }

    #[test]
    fn noise_is_rejected_with_index() {
        let err = transpile_to_cz(&"H 0\nX_ERROR(0.1) 0".parse().unwrap()).unwrap_err();
        assert_eq!(err, TranspileError::Unsupported { index: 1, gate: "X_ERROR" });
    }
}
