//! Circuit generators for the injection protocols and the memory experiment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Pauli};

mod assemble;
pub mod layout;
mod protocols;

pub use protocols::{
    build_hook, build_hook_pregrown, build_hook_with, build_li, build_memory, build_zz, HookSchedule, HOOK_SCHEDULE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Hook,
    HookPregrown,
    Li,
    Zz,
    ZzTweaked,
    Memory,
}

impl Protocol {
    pub const ALL: [Protocol; 6] =
        [Protocol::Hook, Protocol::HookPregrown, Protocol::Li, Protocol::Zz, Protocol::ZzTweaked, Protocol::Memory];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Hook => "hook",
            Protocol::HookPregrown => "hook_pregrown",
            Protocol::Li => "li",
            Protocol::Zz => "zz",
            Protocol::ZzTweaked => "zz_tweaked",
            Protocol::Memory => "memory",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| BuildError::UnknownProtocol(s.to_string()))
    }
}

/// The injected state. `I` is the `|i>` eigenstate of Y, `Plus` the `|+>` eigenstate of X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum State {
    Plus,
    I,
}

impl State {
    pub fn name(self) -> &'static str {
        match self {
            State::Plus => "plus",
            State::I => "i",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for State {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(State::Plus),
            "i" => Ok(State::I),
            _ => Err(BuildError::UnknownState(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalCheck {
    /// Noiseless measurement of every stabilizer and of the logical observable.
    #[default]
    NoiselessStabilizer,
    /// Noisy transversal X readout of the data qubits. Only valid for `|+>`.
    TransversalX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub protocol: Protocol,
    pub d_inject: usize,
    pub r_inject: usize,
    pub d: usize,
    pub r_hold: usize,
    pub state: State,
    pub final_check: FinalCheck,
}

impl InjectionSpec {
    pub fn new(protocol: Protocol, d_inject: usize, r_inject: usize, d: usize, r_hold: usize, state: State) -> Self {
        InjectionSpec { protocol, d_inject, r_inject, d, r_hold, state, final_check: FinalCheck::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedCircuit {
    pub circuit: Circuit,
    /// Detector indices whose firing discards the shot.
    pub postselected: Vec<usize>,
    /// Index of the observable that checks the injected state.
    pub observable: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),
    #[error("unknown state {0:?} (expected plus or i)")]
    UnknownState(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("schedule is unsatisfiable: {0}")]
    Unsatisfiable(String),
}

/// Builds the noiseless circuit of any protocol.
///
/// `Memory` runs `r_inject + 1 + r_hold` rounds at distance `d`, in the X basis for
/// `plus` and the Z basis for `i`, and postselects nothing.
pub fn build(spec: &InjectionSpec) -> Result<AnnotatedCircuit, BuildError> {
    match spec.protocol {
        Protocol::Hook => build_hook(spec),
        Protocol::HookPregrown => build_hook_pregrown(spec),
        Protocol::Li => build_li(spec),
        Protocol::Zz => build_zz(spec, false),
        Protocol::ZzTweaked => build_zz(spec, true),
        Protocol::Memory => {
            let basis = if spec.state == State::Plus { Pauli::X } else { Pauli::Z };
            build_memory(spec.d, spec.r_inject + 1 + spec.r_hold, basis)
        }
    }
}
