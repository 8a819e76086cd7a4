//! Detector error model extraction by backward propagation of detector and
//! observable sensitivities.
//!
//! Walking the circuit in reverse, each qubit carries two bit sets over the
//! outputs (detectors then observables): the outputs whose backward-propagated
//! Pauli has an X component on the qubit, and those with a Z component. A Pauli
//! error at that point flips exactly the outputs it anticommutes with.

use std::collections::HashMap;

use crate::bits::BitVec;
use crate::circuit::{Circuit, Gate, Pauli};
use crate::sim::pauli_pair;

use super::model::{DetectorErrorModel, ErrorMechanism, Provenance, Term};
use super::DemError;

struct Sensitivity {
    xs: Vec<BitVec>,
    zs: Vec<BitVec>,
}

impl Sensitivity {
    fn flipped_by(&self, q: usize, p: Pauli) -> BitVec {
        match p {
            Pauli::X => self.zs[q].clone(),
            Pauli::Z => self.xs[q].clone(),
            Pauli::Y => {
                let mut v = self.xs[q].clone();
                v.xor_with(&self.zs[q]);
                v
            }
        }
    }

    fn add_pauli(&mut self, q: usize, p: Pauli, outputs: &BitVec) {
        let (x, z) = p.xz();
        if x {
            self.xs[q].xor_with(outputs);
        }
        if z {
            self.zs[q].xor_with(outputs);
        }
    }

    fn single(&mut self, q: usize, map: [(bool, bool, bool); 3]) {
        let (x, z) = (self.xs[q].clone(), self.zs[q].clone());
        let [ix, _, iz] = map;
        let mut nx = BitVec::zeros(x.len());
        let mut nz = BitVec::zeros(x.len());
        if ix.0 {
            nx.xor_with(&x);
        }
        if ix.1 {
            nz.xor_with(&x);
        }
        if iz.0 {
            nx.xor_with(&z);
        }
        if iz.1 {
            nz.xor_with(&z);
        }
        self.xs[q] = nx;
        self.zs[q] = nz;
    }

    fn xor_into(v: &mut [BitVec], dst: usize, src: usize) {
        if dst == src {
            return;
        }
        let (a, b) = if dst < src {
            let (lo, hi) = v.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = v.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        a.xor_with(b);
    }
}

/// Extracts the detector error model of a noisy circuit. Every Pauli term of every
/// channel becomes one digitized error; terms with equal signatures are merged.
pub fn extract_dem(circuit: &Circuit) -> Result<DetectorErrorModel, DemError> {
    let n = circuit.num_qubits();
    let num_det = circuit.num_detectors();
    let num_obs = circuit.num_observables();
    if num_obs > 64 {
        return Err(DemError::TooManyObservables(num_obs));
    }
    let width = num_det + num_obs;

    // Forward pass: absolute record index of each measurement, the detector index of
    // each DETECTOR, and the layer of each instruction.
    let mut first_record = Vec::with_capacity(circuit.len());
    let mut detector_index = Vec::with_capacity(circuit.len());
    let mut layer_of = Vec::with_capacity(circuit.len());
    let (mut measured, mut detectors, mut layer) = (0usize, 0usize, 0usize);
    for inst in &circuit.instructions {
        first_record.push(measured);
        detector_index.push(detectors);
        layer_of.push(layer);
        measured += inst.num_measurements();
        detectors += (inst.gate == Gate::Detector) as usize;
        layer += (inst.gate == Gate::Tick) as usize;
    }

    let mut record_outputs: Vec<BitVec> = vec![BitVec::zeros(width); measured];
    let mut sens = Sensitivity { xs: vec![BitVec::zeros(width); n], zs: vec![BitVec::zeros(width); n] };
    let mut signatures: HashMap<BitVec, usize> = HashMap::new();
    let mut mechanisms: Vec<(BitVec, f64, Vec<Provenance>)> = Vec::new();

    let mut emit = |outputs: BitVec, prov: Provenance| {
        if outputs.is_zero() {
            return;
        }
        let p = prov.probability;
        match signatures.get(&outputs) {
            Some(&i) => {
                let m = &mut mechanisms[i];
                m.1 = super::model::xor_probability(m.1, p);
                m.2.push(prov);
            }
            None => {
                signatures.insert(outputs.clone(), mechanisms.len());
                mechanisms.push((outputs, p, vec![prov]));
            }
        }
    };

    for (index, inst) in circuit.instructions.iter().enumerate().rev() {
        let qubits: Vec<usize> = inst.qubits().map(|q| q as usize).collect();
        let p = inst.args.first().copied().unwrap_or(0.0);
        let provenance = |qubits: Vec<u32>, term: Term, probability: f64| Provenance {
            instruction: index,
            layer: layer_of[index],
            channel: inst.gate,
            qubits,
            term,
            probability,
        };
        match inst.gate {
            Gate::Detector => {
                let d = detector_index[index];
                for k in inst.recs() {
                    record_outputs[first_record[index] - k as usize].toggle(d);
                }
            }
            Gate::ObservableInclude => {
                let o = num_det + p as usize;
                for k in inst.recs() {
                    record_outputs[first_record[index] - k as usize].toggle(o);
                }
            }
            Gate::M | Gate::Mx => {
                for (j, &q) in qubits.iter().enumerate() {
                    let r = first_record[index] + j;
                    let outputs = record_outputs[r].clone();
                    if p > 0.0 {
                        emit(outputs.clone(), provenance(vec![q as u32], Term::RecordFlip, p));
                    }
                    let basis = if inst.gate == Gate::M { Pauli::Z } else { Pauli::X };
                    sens.add_pauli(q, basis, &outputs);
                }
            }
            Gate::Mpp => {
                for (j, product) in inst.mpp_products().iter().enumerate() {
                    let outputs = record_outputs[first_record[index] + j].clone();
                    for &(q, pauli) in product {
                        sens.add_pauli(q as usize, pauli, &outputs);
                    }
                }
            }
            Gate::R | Gate::Rx => {
                for &q in &qubits {
                    let anti = if inst.gate == Gate::R { &sens.xs[q] } else { &sens.zs[q] };
                    if let Some(output) = anti.ones().next() {
                        return Err(DemError::NondeterministicOutput { output, instruction: index });
                    }
                    sens.xs[q].clear();
                    sens.zs[q].clear();
                }
            }
            Gate::C1(c) => {
                let map = c.inverse().bit_images();
                for &q in &qubits {
                    sens.single(q, map);
                }
            }
            Gate::Cx => {
                for pr in qubits.chunks_exact(2) {
                    Sensitivity::xor_into(&mut sens.xs, pr[1], pr[0]);
                    Sensitivity::xor_into(&mut sens.zs, pr[0], pr[1]);
                }
            }
            Gate::Cz => {
                for pr in qubits.chunks_exact(2) {
                    let (xa, xb) = (sens.xs[pr[0]].clone(), sens.xs[pr[1]].clone());
                    sens.zs[pr[0]].xor_with(&xb);
                    sens.zs[pr[1]].xor_with(&xa);
                }
            }
            Gate::XError | Gate::ZError if p > 0.0 => {
                let pauli = if inst.gate == Gate::XError { Pauli::X } else { Pauli::Z };
                for &q in &qubits {
                    emit(sens.flipped_by(q, pauli), provenance(vec![q as u32], Term::One(pauli), p));
                }
            }
            Gate::Depolarize1 if p > 0.0 => {
                for &q in &qubits {
                    for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                        emit(sens.flipped_by(q, pauli), provenance(vec![q as u32], Term::One(pauli), p / 3.0));
                    }
                }
            }
            Gate::Depolarize2 if p > 0.0 => {
                for pr in qubits.chunks_exact(2) {
                    for k in 1..16 {
                        let (a, b) = pauli_pair(k);
                        let mut outputs = BitVec::zeros(width);
                        if let Some(a) = a {
                            outputs.xor_with(&sens.flipped_by(pr[0], a));
                        }
                        if let Some(b) = b {
                            outputs.xor_with(&sens.flipped_by(pr[1], b));
                        }
                        let qs = vec![pr[0] as u32, pr[1] as u32];
                        emit(outputs, provenance(qs, Term::Two(a, b), p / 15.0));
                    }
                }
            }
            _ => {}
        }
    }

    if let Some(output) = sens.xs.iter().find_map(|v| v.ones().next()) {
        return Err(DemError::NondeterministicOutput { output, instruction: 0 });
    }

    let mut dem = DetectorErrorModel::new(num_det, num_obs);
    mechanisms.reverse();
    for (outputs, probability, mut provenance) in mechanisms {
        provenance.reverse();
        let mut detectors = Vec::new();
        let mut observables = 0u64;
        for o in outputs.ones() {
            if o < num_det {
                detectors.push(o as u32);
            } else {
                observables |= 1 << (o - num_det);
            }
        }
        dem.mechanisms.push(ErrorMechanism { probability, detectors, observables, provenance });
    }
    Ok(dem)
}
