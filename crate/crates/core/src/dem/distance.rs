//! Census of undetectable low-weight logical errors.

use std::collections::HashMap;

use serde::Serialize;

use super::model::{DetectorErrorModel, Provenance};

/// A digitized error that flips an observable while firing no detector at all.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distance1 {
    pub observables: u64,
    pub provenance: Provenance,
}

/// Every digitized error that flips an observable without firing any detector.
///
/// Terms are reported individually, not merged, so each Pauli term of each
/// channel counts once. The `postselected` set cannot rescue such a term since it
/// fires nothing, and is accepted for symmetry with [`find_distance2`].
pub fn find_distance1(dem: &DetectorErrorModel, _postselected: &[usize]) -> Vec<Distance1> {
    dem.mechanisms
        .iter()
        .filter(|m| m.detectors.is_empty() && m.observables != 0)
        .flat_map(|m| m.provenance.iter().map(move |p| Distance1 { observables: m.observables, provenance: p.clone() }))
        .collect()
}

/// Sum of the distance-1 term probabilities that flip observable `k`.
pub fn distance1_floor(found: &[Distance1], k: usize) -> f64 {
    found.iter().filter(|d| d.observables >> k & 1 == 1).map(|d| d.provenance.probability).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distance2Report {
    /// Unordered pairs of digitized terms whose combined effect fires no detector and flips an observable.
    pub pairs: u64,
    /// Digitized terms taking part in at least one such pair.
    pub participating: usize,
    /// `Σ p_i p_j` over the pairs.
    pub pair_probability: f64,
    /// `pair_probability / p²`.
    pub c2: f64,
    /// Representative pairs: a few shared detector sets with one term from each side.
    pub examples: Vec<Distance2Example>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distance2Example {
    pub detectors: Vec<u32>,
    pub first: Provenance,
    pub second: Provenance,
}

/// Pairs of digitized terms that together are undetectable yet flip an observable.
///
/// Two terms combine to an empty syndrome exactly when they fire the same
/// (nonempty) detector set, so terms are grouped by detector set and, within a
/// group, every pair with differing observable masks counts.
pub fn find_distance2(dem: &DetectorErrorModel, _postselected: &[usize], p: f64) -> Distance2Report {
    let mut groups: HashMap<&[u32], HashMap<u64, Vec<&Provenance>>> = HashMap::new();
    for m in dem.mechanisms.iter().filter(|m| !m.detectors.is_empty()) {
        groups
            .entry(m.detectors.as_slice())
            .or_default()
            .entry(m.observables)
            .or_default()
            .extend(m.provenance.iter());
    }

    let mut keys: Vec<&[u32]> = groups.keys().copied().collect();
    keys.sort();
    let (mut pairs, mut participating, mut mass) = (0u64, 0usize, 0.0f64);
    let mut examples = Vec::new();
    for key in keys {
        let by_obs = &groups[key];
        if by_obs.len() < 2 {
            continue;
        }
        let mut classes: Vec<(u64, &Vec<&Provenance>)> = by_obs.iter().map(|(&o, v)| (o, v)).collect();
        classes.sort_by_key(|c| c.0);
        let total: usize = classes.iter().map(|c| c.1.len()).sum();
        participating += total;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let (a, b) = (classes[i].1, classes[j].1);
                pairs += (a.len() * b.len()) as u64;
                let pa: f64 = a.iter().map(|t| t.probability).sum();
                let pb: f64 = b.iter().map(|t| t.probability).sum();
                mass += pa * pb;
                if examples.len() < 16 {
                    examples.push(Distance2Example {
                        detectors: key.to_vec(),
                        first: a[0].clone(),
                        second: b[0].clone(),
                    });
                }
            }
        }
    }
    Distance2Report {
        pairs,
        participating,
        pair_probability: mass,
        c2: if p > 0.0 { mass / (p * p) } else { 0.0 },
        examples,
    }
}
