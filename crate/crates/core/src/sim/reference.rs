use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;

use super::symbolic::{run_symbolic, Affine};
use super::{RandomSource, SimError, TableauShot};

/// Noiseless values of a circuit's measurements, detectors and observables.
///
/// Measurements with a random noiseless outcome are stored as 0. Detectors and
/// observables are guaranteed not to depend on them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub measurements: Vec<bool>,
    pub random: Vec<bool>,
    pub detectors: Vec<bool>,
    pub observables: Vec<bool>,
}

fn source(form: &Affine, num_measurements: usize) -> RandomSource {
    let var = form.vars.ones().next().unwrap_or(0);
    if var < num_measurements {
        RandomSource::Measurement(var)
    } else {
        RandomSource::Reset(var - num_measurements)
    }
}

/// Computes the noiseless reference values, rejecting circuits whose detectors
/// or observables depend on a random measurement outcome.
pub fn compute_reference(circuit: &Circuit) -> Result<ReferenceFrame, SimError> {
    let run = run_symbolic(&circuit.without_noise());
    let m = run.records.len();
    if let Some((detector, form)) = run.detectors.iter().enumerate().find(|(_, f)| !f.is_constant()) {
        return Err(SimError::NondeterministicDetector { detector, origin: source(form, m) });
    }
    if let Some((observable, form)) = run.observables.iter().enumerate().find(|(_, f)| !f.is_constant()) {
        return Err(SimError::NondeterministicObservable { observable, origin: source(form, m) });
    }
    Ok(ReferenceFrame {
        measurements: run.records.iter().map(|f| f.constant).collect(),
        random: run.records.iter().map(|f| !f.is_constant()).collect(),
        detectors: run.detectors.iter().map(|f| f.constant).collect(),
        observables: run.observables.iter().map(|f| f.constant).collect(),
    })
}

/// Detection events and observable flips of a raw tableau shot relative to the reference.
pub fn detection_events(shot: &TableauShot, frame: &ReferenceFrame) -> (Vec<bool>, Vec<bool>) {
    let det = shot.detectors.iter().zip(&frame.detectors).map(|(a, b)| a ^ b).collect();
    let obs = shot.observables.iter().zip(&frame.observables).map(|(a, b)| a ^ b).collect();
    (det, obs)
}
