use std::fmt;

use serde::{Serialize, Serializer};

use crate::circuit::{Gate, Pauli};

/// Which Pauli term of a noise channel a digitized error is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// A single-qubit Pauli (DEPOLARIZE1, X_ERROR, Z_ERROR).
    One(Pauli),
    /// A two-qubit Pauli with at least one non-identity factor (DEPOLARIZE2).
    Two(Option<Pauli>, Option<Pauli>),
    /// A classical measurement record flip.
    RecordFlip,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = |p: Option<Pauli>| p.map_or('I', Pauli::letter);
        match self {
            Term::One(p) => write!(f, "{p}"),
            Term::Two(a, b) => write!(f, "{}⊗{}", letter(*a), letter(*b)),
            Term::RecordFlip => f.write_str("flip"),
        }
    }
}

/// Where a digitized error comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub instruction: usize,
    /// Index of the TICK-delimited layer holding the channel.
    pub layer: usize,
    pub channel: Gate,
    pub qubits: Vec<u32>,
    pub term: Term,
    pub probability: f64,
}

impl Provenance {
    pub fn channel_name(&self) -> &'static str {
        match self.channel {
            Gate::M | Gate::Mx => "MERR",
            g => g.name(),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits: Vec<String> = self.qubits.iter().map(u32::to_string).collect();
        write!(
            f,
            "{} term {} on qubits {} at layer {} (instruction {}, p={})",
            self.channel_name(),
            self.term,
            qubits.join(","),
            self.layer,
            self.instruction,
            self.probability
        )
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Provenance", 6)?;
        st.serialize_field("instruction", &self.instruction)?;
        st.serialize_field("layer", &self.layer)?;
        st.serialize_field("channel", self.channel_name())?;
        st.serialize_field("qubits", &self.qubits)?;
        st.serialize_field("term", &self.term.to_string())?;
        st.serialize_field("probability", &self.probability)?;
        st.end()
    }
}

/// An independent error mechanism: fires `detectors` and flips the observables in `observables`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorMechanism {
    pub probability: f64,
    pub detectors: Vec<u32>,
    /// Bit `k` set means observable `k` flips.
    pub observables: u64,
    pub provenance: Vec<Provenance>,
}

impl ErrorMechanism {
    pub fn new(probability: f64, detectors: Vec<u32>, observables: u64) -> Self {
        ErrorMechanism { probability, detectors, observables, provenance: Vec::new() }
    }

    pub fn flips_observable(&self) -> bool {
        self.observables != 0
    }
}

/// Probability that exactly one of two independent events happens.
pub fn xor_probability(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DetectorErrorModel {
    pub mechanisms: Vec<ErrorMechanism>,
    pub num_detectors: usize,
    pub num_observables: usize,
}

impl DetectorErrorModel {
    pub fn new(num_detectors: usize, num_observables: usize) -> Self {
        DetectorErrorModel { mechanisms: Vec::new(), num_detectors, num_observables }
    }

    /// Adds a mechanism, merging it into an existing one with the same signature.
    pub fn add(&mut self, mechanism: ErrorMechanism) {
        if mechanism.detectors.is_empty() && mechanism.observables == 0 {
            return;
        }
        match self
            .mechanisms
            .iter_mut()
            .find(|m| m.detectors == mechanism.detectors && m.observables == mechanism.observables)
        {
            Some(m) => {
                m.probability = xor_probability(m.probability, mechanism.probability);
                m.provenance.extend(mechanism.provenance);
            }
            None => self.mechanisms.push(mechanism),
        }
    }

    pub fn len(&self) -> usize {
        self.mechanisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }

    /// Number of digitized terms behind the model (one per provenance entry).
    pub fn num_terms(&self) -> usize {
        self.mechanisms.iter().map(|m| m.provenance.len()).sum()
    }

    /// Text form: one `error(p) D.. L..` line per mechanism with provenance as a comment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.mechanisms {
            out.push_str(&format!("error({})", m.probability));
            for d in &m.detectors {
                out.push_str(&format!(" D{d}"));
            }
            for k in 0..64 {
                if m.observables >> k & 1 == 1 {
                    out.push_str(&format!(" L{k}"));
                }
            }
            if let Some(first) = m.provenance.first() {
                out.push_str(&format!(" # {first}"));
                if m.provenance.len() > 1 {
                    out.push_str(&format!(" (+{} more)", m.provenance.len() - 1));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_combines_by_xor() {
        let mut dem = DetectorErrorModel::new(2, 1);
        dem.add(ErrorMechanism::new(0.1, vec![0], 0));
        dem.add(ErrorMechanism::new(0.2, vec![0], 0));
        dem.add(ErrorMechanism::new(0.3, vec![0], 1));
        dem.add(ErrorMechanism::new(0.3, vec![], 0));
        assert_eq!(dem.len(), 2);
        assert!((dem.mechanisms[0].probability - 0.26).abs() < 1e-12);
        assert_eq!(dem.to_text(), "error(0.26) D0\nerror(0.3) D0 L0\n");
    }
}
