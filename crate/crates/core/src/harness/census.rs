use serde::Serialize;

use crate::builders::InjectionSpec;
use crate::dem::{extract_dem, find_distance1, find_distance2, Distance1, Distance2Report};

use super::{noisy_circuit, HarnessError};

/// Undetectable low-weight errors of a noisy protocol circuit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Census {
    pub spec: InjectionSpec,
    pub p: f64,
    /// Merged mechanisms in the detector error model.
    pub mechanisms: usize,
    pub distance1: Vec<Distance1>,
    pub distance2: Distance2Report,
}

pub fn census(spec: &InjectionSpec, p: f64) -> Result<Census, HarnessError> {
    let annotated = noisy_circuit(spec, p)?;
    let dem = extract_dem(&annotated.circuit)?;
    Ok(Census {
        spec: *spec,
        p,
        mechanisms: dem.len(),
        distance1: find_distance1(&dem, &annotated.postselected),
        distance2: find_distance2(&dem, &annotated.postselected, p),
    })
}
