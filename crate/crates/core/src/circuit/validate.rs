use std::collections::HashSet;
use std::fmt;

use super::{Circuit, Gate, Target};

/// One broken circuit invariant, located by instruction index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub instruction: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.instruction, self.message)
    }
}

/// Checks the structural invariants of a circuit. An empty report means the circuit is valid.
pub fn validate(circuit: &Circuit) -> Vec<Violation> {
    let mut report = Vec::new();
    let mut measured = 0usize;
    let mut busy: HashSet<u32> = HashSet::new();

    for (index, inst) in circuit.instructions.iter().enumerate() {
        let mut flag = |message: String| report.push(Violation { instruction: index, message });
        let gate = inst.gate;

        if gate.takes_probability() {
            if inst.args.len() > 1 {
                flag(format!("{gate} takes at most one probability"));
            }
            for &a in &inst.args {
                if !(0.0..=1.0).contains(&a) {
                    flag(format!("probability {a} outside [0, 1]"));
                }
            }
            if gate.is_noise() && inst.args.is_empty() {
                flag(format!("{gate} requires a probability"));
            }
        }

        let records_only = matches!(gate, Gate::Detector | Gate::ObservableInclude);
        let paulis_only = gate == Gate::Mpp;
        for t in &inst.targets {
            let ok = match t {
                Target::Rec(_) => records_only,
                Target::Pauli(..) | Target::Combiner => paulis_only,
                Target::Qubit(_) => !records_only && !paulis_only && gate != Gate::Tick,
            };
            if !ok {
                flag(format!("{gate} cannot take target {t:?}"));
            }
        }

        if records_only {
            for k in inst.recs() {
                if k as usize > measured {
                    flag(format!("rec[-{k}] refers before the first measurement or to a future one"));
                }
            }
        }
        if gate == Gate::ObservableInclude && (inst.args.len() != 1 || inst.args[0] < 0.0 || inst.args[0].fract() != 0.0) {
            flag("OBSERVABLE_INCLUDE needs one non-negative integer index".into());
        }

        if gate.is_two_qubit() {
            if inst.targets.len() % 2 != 0 {
                flag(format!("{gate} has an odd number of targets ({})", inst.targets.len()));
            }
            for pair in inst.targets.chunks_exact(2) {
                if pair[0] == pair[1] {
                    flag(format!("{gate} pair acts twice on {:?}", pair[0]));
                }
            }
        }

        if gate == Gate::Mpp {
            let t = &inst.targets;
            let bad_combiner = t.first() == Some(&Target::Combiner)
                || t.last() == Some(&Target::Combiner)
                || t.windows(2).any(|w| w[0] == Target::Combiner && w[1] == Target::Combiner);
            if bad_combiner {
                flag("misplaced `*` in MPP".into());
            }
            for product in inst.mpp_products() {
                let distinct: HashSet<u32> = product.iter().map(|&(q, _)| q).collect();
                if distinct.len() != product.len() {
                    flag("MPP product repeats a qubit".into());
                }
            }
        }

        if gate == Gate::Tick {
            busy.clear();
        } else if !gate.is_noise() && !gate.is_annotation() {
            let mut seen_here = HashSet::new();
            for q in inst.qubits() {
                if !seen_here.insert(q) && gate != Gate::Mpp {
                    flag(format!("qubit {q} targeted twice by one {gate}"));
                }
            }
            for q in seen_here {
                if !busy.insert(q) {
                    flag(format!("qubit {q} targeted twice in one layer"));
                }
            }
        }

        measured += inst.num_measurements();
    }
    report
}
