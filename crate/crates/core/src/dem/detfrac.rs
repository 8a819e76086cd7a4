use crate::circuit::Circuit;
use crate::sim::{compute_reference, frame_sample, SimError};

/// Probability of a detector producing a detection event, averaged over all
/// detectors and `shots` samples of a noisy circuit.
pub fn detection_fraction(circuit: &Circuit, shots: usize, seed: u64) -> Result<f64, SimError> {
    let frame = compute_reference(&circuit.without_noise())?;
    let batch = frame_sample(circuit, &frame, shots, seed)?;
    let cells = (batch.num_detectors() * batch.num_shots()) as f64;
    if cells == 0.0 {
        return Ok(0.0);
    }
    Ok(batch.total_detection_events() as f64 / cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{apply_noise, NoiseParams};

    #[test]
    fn fraction_of_a_single_flipped_detector() {
        let c: Circuit = "R 0 1\nX_ERROR(1) 0\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]".parse().unwrap();
        assert_eq!(detection_fraction(&c, 1000, 3).unwrap(), 0.5);
    }

    #[test]
    fn zero_noise_gives_zero() {
        let c: Circuit = "R 0\nTICK\nM 0\nDETECTOR rec[-1]".parse().unwrap();
        let noisy = apply_noise(&c, NoiseParams::si1000(0.0)).unwrap();
        assert_eq!(detection_fraction(&noisy, 5000, 1).unwrap(), 0.0);
    }
}
