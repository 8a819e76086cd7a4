//! Circuit representation: instructions, qubit and record targets, TICK-delimited layers.

mod clifford;
mod noise;
mod text;
mod transpile;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use clifford::{Clifford1, SignedPauli};
pub use noise::{apply_noise, NoiseError, NoiseParams};
pub use text::ParseError;
pub use transpile::{transpile_to_cz, TranspileError};
pub use validate::{validate, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_xz(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A sparse Pauli product. Identity entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PauliString {
    terms: BTreeMap<u32, Pauli>,
}

impl PauliString {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies `pauli` onto `qubit`, ignoring phase.
    pub fn mul_term(&mut self, qubit: u32, pauli: Pauli) {
        let (x, z) = pauli.xz();
        let (ox, oz) = self.terms.get(&qubit).map_or((false, false), |p| p.xz());
        match Pauli::from_xz(x ^ ox, z ^ oz) {
            Some(p) => {
                self.terms.insert(qubit, p);
            }
            None => {
                self.terms.remove(&qubit);
            }
        }
    }

    pub fn get(&self, qubit: u32) -> Option<Pauli> {
        self.terms.get(&qubit).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Pauli)> + '_ {
        self.terms.iter().map(|(&q, &p)| (q, p))
    }

    /// MPP targets measuring this product (empty strings have no targets).
    pub fn to_targets(&self) -> Vec<Target> {
        let mut out = Vec::with_capacity(self.len() * 2);
        for (i, (q, p)) in self.iter().enumerate() {
            if i > 0 {
                out.push(Target::Combiner);
            }
            out.push(Target::Pauli(q, p));
        }
        out
    }
}

impl FromIterator<(u32, Pauli)> for PauliString {
    fn from_iter<T: IntoIterator<Item = (u32, Pauli)>>(iter: T) -> Self {
        let mut s = PauliString::new();
        for (q, p) in iter {
            s.mul_term(q, p);
        }
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("I");
        }
        for (i, (q, p)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    C1(Clifford1),
    Cx,
    Cz,
    /// Reset to `|0>`.
    R,
    /// Reset to `|+>`.
    Rx,
    /// Z-basis measurement; an optional argument is the record flip probability.
    M,
    Mx,
    /// Noiseless Pauli-product measurement.
    Mpp,
    Tick,
    Depolarize1,
    Depolarize2,
    XError,
    ZError,
    Detector,
    ObservableInclude,
    QubitCoords,
}

impl Gate {
    pub const H: Gate = Gate::C1(Clifford1::H);
    pub const S: Gate = Gate::C1(Clifford1::S);
    pub const S_DAG: Gate = Gate::C1(Clifford1::SDag);
    pub const I: Gate = Gate::C1(Clifford1::I);

    pub fn name(self) -> &'static str {
        match self {
            Gate::C1(c) => c.name(),
            Gate::Cx => "CX",
            Gate::Cz => "CZ",
            Gate::R => "R",
            Gate::Rx => "RX",
            Gate::M => "M",
            Gate::Mx => "MX",
            Gate::Mpp => "MPP",
            Gate::Tick => "TICK",
            Gate::Depolarize1 => "DEPOLARIZE1",
            Gate::Depolarize2 => "DEPOLARIZE2",
            Gate::XError => "X_ERROR",
            Gate::ZError => "Z_ERROR",
            Gate::Detector => "DETECTOR",
            Gate::ObservableInclude => "OBSERVABLE_INCLUDE",
            Gate::QubitCoords => "QUBIT_COORDS",
        }
    }

    pub fn from_name(name: &str) -> Option<Gate> {
        let upper = name.to_ascii_uppercase();
        let gate = match upper.as_str() {
            "CX" | "CNOT" | "ZCX" => Gate::Cx,
            "CZ" | "ZCZ" => Gate::Cz,
            "R" | "RZ" => Gate::R,
            "RX" => Gate::Rx,
            "M" | "MZ" => Gate::M,
            "MX" => Gate::Mx,
            "MPP" => Gate::Mpp,
            "TICK" => Gate::Tick,
            "DEPOLARIZE1" => Gate::Depolarize1,
            "DEPOLARIZE2" => Gate::Depolarize2,
            "X_ERROR" => Gate::XError,
            "Z_ERROR" => Gate::ZError,
            "DETECTOR" => Gate::Detector,
            "OBSERVABLE_INCLUDE" => Gate::ObservableInclude,
            "QUBIT_COORDS" => Gate::QubitCoords,
            "SQRT_Z" => Gate::S,
            "SQRT_Z_DAG" => Gate::S_DAG,
            other => Gate::C1(Clifford1::from_name(other)?),
        };
        Some(gate)
    }

    pub fn is_noise(self) -> bool {
        matches!(self, Gate::Depolarize1 | Gate::Depolarize2 | Gate::XError | Gate::ZError)
    }

    pub fn is_annotation(self) -> bool {
        matches!(self, Gate::Detector | Gate::ObservableInclude | Gate::QubitCoords)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, Gate::Cx | Gate::Cz | Gate::Depolarize2)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Gate::M | Gate::Mx | Gate::Mpp)
    }

    pub fn is_reset(self) -> bool {
        matches!(self, Gate::R | Gate::Rx)
    }

    /// Gates whose arguments are probabilities.
    pub fn takes_probability(self) -> bool {
        self.is_noise() || matches!(self, Gate::M | Gate::Mx)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Qubit(u32),
    /// Measurement record `rec[-k]`, stored as the positive lookback `k`.
    Rec(u32),
    /// A Pauli factor of an `MPP` product.
    Pauli(u32, Pauli),
    /// The `*` joining factors of one `MPP` product.
    Combiner,
}

impl Target {
    pub fn qubit(self) -> Option<u32> {
        match self {
            Target::Qubit(q) | Target::Pauli(q, _) => Some(q),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub args: Vec<f64>,
    pub targets: Vec<Target>,
}

impl Instruction {
    pub fn new(gate: Gate, targets: impl IntoIterator<Item = Target>) -> Self {
        Instruction { gate, args: Vec::new(), targets: targets.into_iter().collect() }
    }

    pub fn on_qubits(gate: Gate, qubits: impl IntoIterator<Item = u32>) -> Self {
        Self::new(gate, qubits.into_iter().map(Target::Qubit))
    }

    pub fn with_args(mut self, args: impl IntoIterator<Item = f64>) -> Self {
        self.args = args.into_iter().collect();
        self
    }

    /// Qubit indices in target order, skipping records and combiners.
    pub fn qubits(&self) -> impl Iterator<Item = u32> + '_ {
        self.targets.iter().filter_map(|t| t.qubit())
    }

    pub fn num_measurements(&self) -> usize {
        match self.gate {
            Gate::M | Gate::Mx => self.targets.len(),
            Gate::Mpp => {
                let paulis = self.targets.iter().filter(|t| matches!(t, Target::Pauli(..))).count();
                let combiners = self.targets.iter().filter(|t| matches!(t, Target::Combiner)).count();
                paulis.saturating_sub(combiners)
            }
            _ => 0,
        }
    }

    /// Splits `MPP` targets into products.
    pub fn mpp_products(&self) -> Vec<Vec<(u32, Pauli)>> {
        let mut out: Vec<Vec<(u32, Pauli)>> = Vec::new();
        let mut joined = false;
        for t in &self.targets {
            match *t {
                Target::Pauli(q, p) => {
                    if joined {
                        out.last_mut().expect("combiner follows a factor").push((q, p));
                    } else {
                        out.push(vec![(q, p)]);
                    }
                    joined = false;
                }
                Target::Combiner => joined = true,
                _ => {}
            }
        }
        out
    }

    /// Record lookbacks of a `DETECTOR` or `OBSERVABLE_INCLUDE`.
    pub fn recs(&self) -> impl Iterator<Item = u32> + '_ {
        self.targets.iter().filter_map(|t| match t {
            Target::Rec(k) => Some(*k),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, inst: Instruction) {
        self.instructions.push(inst);
    }

    /// Appends a gate on qubits, skipping it when there are no targets.
    pub fn gate(&mut self, gate: Gate, qubits: impl IntoIterator<Item = u32>) {
        let inst = Instruction::on_qubits(gate, qubits);
        if !inst.targets.is_empty() {
            self.push(inst);
        }
    }

    pub fn tick(&mut self) {
        self.push(Instruction::new(Gate::Tick, []));
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.instructions
            .iter()
            .flat_map(|i| i.qubits())
            .max()
            .map_or(0, |q| q as usize + 1)
    }

    pub fn num_measurements(&self) -> usize {
        self.instructions.iter().map(Instruction::num_measurements).sum()
    }

    pub fn num_detectors(&self) -> usize {
        self.instructions.iter().filter(|i| i.gate == Gate::Detector).count()
    }

    pub fn num_observables(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.gate == Gate::ObservableInclude)
            .map(|i| i.args.first().copied().unwrap_or(0.0) as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn num_ticks(&self) -> usize {
        self.instructions.iter().filter(|i| i.gate == Gate::Tick).count()
    }

    pub fn qubit_coords(&self) -> BTreeMap<u32, Vec<f64>> {
        let mut out = BTreeMap::new();
        for inst in self.instructions.iter().filter(|i| i.gate == Gate::QubitCoords) {
            for q in inst.qubits() {
                out.insert(q, inst.args.clone());
            }
        }
        out
    }

    /// Coordinate arguments of every detector, in detector order.
    pub fn detector_coords(&self) -> Vec<Vec<f64>> {
        self.instructions
            .iter()
            .filter(|i| i.gate == Gate::Detector)
            .map(|i| i.args.clone())
            .collect()
    }

    /// Detectors whose fourth coordinate is 1.
    pub fn postselected_detectors(&self) -> Vec<usize> {
        self.detector_coords()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.get(3) == Some(&1.0))
            .map(|(i, _)| i)
            .collect()
    }

    /// Splits the instruction list at TICKs. The TICKs themselves are not included.
    pub fn layers(&self) -> Vec<&[Instruction]> {
        self.instructions.split(|i| i.gate == Gate::Tick).collect()
    }

    pub fn has_noise(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| i.gate.is_noise() || (matches!(i.gate, Gate::M | Gate::Mx) && !i.args.is_empty()))
    }

    /// The circuit with every noise channel and measurement flip probability removed.
    pub fn without_noise(&self) -> Circuit {
        let instructions = self
            .instructions
            .iter()
            .filter(|i| !i.gate.is_noise())
            .map(|i| {
                let mut i = i.clone();
                if matches!(i.gate, Gate::M | Gate::Mx) {
                    i.args.clear();
                }
                i
            })
            .collect();
        Circuit { instructions }
    }

    /// Number of instructions in each gate class, keyed by name.
    pub fn gate_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for inst in &self.instructions {
            let n = if inst.gate.is_two_qubit() { inst.targets.len() / 2 } else { inst.targets.len().max(1) };
            *out.entry(inst.gate.name()).or_default() += n;
        }
        out
    }
}

impl FromIterator<Instruction> for Circuit {
    fn from_iter<T: IntoIterator<Item = Instruction>>(iter: T) -> Self {
        Circuit { instructions: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_string_drops_identities() {
        let mut s: PauliString = [(3, Pauli::X), (1, Pauli::Z)].into_iter().collect();
        s.mul_term(3, Pauli::Z);
        assert_eq!(s.get(3), Some(Pauli::Y));
        s.mul_term(1, Pauli::Z);
        assert_eq!(s.len(), 1);
        assert_eq!(s.to_string(), "Y3");
    }

    #[test]
    fn mpp_measurement_count() {
        let c: Circuit = "MPP X0*Z1 Y2 Z3*Z4*Z5".parse().unwrap();
        assert_eq!(c.num_measurements(), 3);
        assert_eq!(c.instructions[0].mpp_products()[2].len(), 3);
    }

    #[test]
    fn layers_split_on_tick() {
        let c: Circuit = "R 0 1\nTICK\nH 0\nTICK\nM 0 1".parse().unwrap();
        let layers = c.layers();
        assert_eq!(layers.len(), 3);
        assert_eq!(layers[1][0].gate, Gate::H);
    }
}
