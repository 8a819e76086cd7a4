use std::collections::BTreeMap;

use crate::dem::DetectorErrorModel;

use super::DecodeError;

pub const ML_MAX_MECHANISMS: usize = 20;

/// Exact maximum-likelihood decoding by enumerating every subset of mechanisms.
///
/// Subsets consistent with the syndrome are grouped by the observables they flip and
/// the most probable group wins. Ties go to "no flip", then to the smaller mask.
pub fn decode_ml_bruteforce(dem: &DetectorErrorModel, syndrome: &[u32]) -> Result<u64, DecodeError> {
    let m = dem.mechanisms.len();
    if m > ML_MAX_MECHANISMS {
        return Err(DecodeError::TooManyMechanisms { found: m, limit: ML_MAX_MECHANISMS });
    }
    if dem.num_detectors > 64 {
        return Err(DecodeError::TooManyDetectors { found: dem.num_detectors, limit: 64 });
    }
    let target = syndrome.iter().fold(0u64, |acc, &d| acc ^ 1 << d);
    let signature: Vec<u64> = dem
        .mechanisms
        .iter()
        .map(|mech| mech.detectors.iter().fold(0u64, |acc, &d| acc ^ 1 << d))
        .collect();

    let mut totals: BTreeMap<u64, f64> = BTreeMap::new();
    for subset in 0u32..1 << m {
        let (mut dets, mut obs, mut p) = (0u64, 0u64, 1.0f64);
        for (i, mech) in dem.mechanisms.iter().enumerate() {
            if subset >> i & 1 == 1 {
                dets ^= signature[i];
                obs ^= mech.observables;
                p *= mech.probability;
            } else {
                p *= 1.0 - mech.probability;
            }
        }
        if dets == target {
            *totals.entry(obs).or_default() += p;
        }
    }
    let best = totals.values().copied().fold(0.0f64, f64::max);
    if totals.get(&0).is_some_and(|&p| p >= best) {
        return Ok(0);
    }
    Ok(totals.into_iter().find(|&(_, p)| p >= best).map_or(0, |(o, _)| o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::ErrorMechanism;

    fn model(mechs: Vec<ErrorMechanism>) -> DetectorErrorModel {
        let mut dem = DetectorErrorModel::new(2, 1);
        dem.mechanisms = mechs;
        dem
    }

    #[test]
    fn only_explanation_wins() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![0], 1)]);
        assert_eq!(decode_ml_bruteforce(&dem, &[0]).unwrap(), 1);
        assert_eq!(decode_ml_bruteforce(&dem, &[]).unwrap(), 0);
    }

    #[test]
    fn ties_predict_no_flip() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![0], 1), ErrorMechanism::new(0.1, vec![0], 0)]);
        assert_eq!(decode_ml_bruteforce(&dem, &[0]).unwrap(), 0);
    }

    #[test]
    fn too_many_mechanisms() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![0], 0); 21]);
        assert!(matches!(decode_ml_bruteforce(&dem, &[]), Err(DecodeError::TooManyMechanisms { .. })));
    }
}
