use std::collections::BTreeMap;

use crate::dem::{xor_probability, DetectorErrorModel};

use super::DecodeError;

/// Edge endpoints: a detector pair, or a detector and the boundary (`b == None`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub a: u32,
    pub b: Option<u32>,
}

impl EdgeKey {
    fn from_detectors(dets: &[u32]) -> Option<EdgeKey> {
        match *dets {
            [a] => Some(EdgeKey { a, b: None }),
            [a, b] => Some(EdgeKey { a: a.min(b), b: Some(a.max(b)) }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub key: EdgeKey,
    /// Chance that an odd number of the contributing mechanisms occur.
    pub probability: f64,
    /// `ln((1 - p) / p)` of the likeliest observable class, clamped at zero.
    pub weight: f64,
    /// Observable mask of the likeliest class.
    pub observables: u64,
    /// Indices of the model mechanisms that contribute to the edge.
    pub mechanisms: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodingGraph {
    pub num_detectors: usize,
    pub edges: Vec<Edge>,
    /// Detectors excluded from decoding because they are postselected.
    pub excluded: Vec<bool>,
    adjacency: Vec<Vec<(u32, u32)>>,
}

pub fn edge_weight(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    ((1.0 - p) / p).ln().max(0.0)
}

#[derive(Default)]
struct Classes {
    by_observables: BTreeMap<u64, (f64, Vec<usize>)>,
}

impl Classes {
    fn add(&mut self, observables: u64, p: f64, mechanism: usize) {
        let entry = self.by_observables.entry(observables).or_insert((0.0, Vec::new()));
        entry.0 = xor_probability(entry.0, p);
        entry.1.push(mechanism);
    }
}

/// Builds the matching graph of the mechanisms that avoid every postselected detector.
///
/// Mechanisms with more than two detectors are split into graphlike pieces that
/// already occur as edges: among all splits whose observable masks XOR to the
/// mechanism's mask, the one with the least total weight is used.
pub fn build_graph(dem: &DetectorErrorModel, postselected: &[usize]) -> Result<DecodingGraph, DecodeError> {
    let mut excluded = vec![false; dem.num_detectors];
    for &d in postselected {
        excluded[d] = true;
    }
    let visible = |dets: &[u32]| !dets.is_empty() && dets.iter().all(|&d| !excluded[d as usize]);

    let mut classes: BTreeMap<EdgeKey, Classes> = BTreeMap::new();
    for (i, m) in dem.mechanisms.iter().enumerate() {
        if let Some(key) = EdgeKey::from_detectors(&m.detectors).filter(|_| visible(&m.detectors)) {
            classes.entry(key).or_default().add(m.observables, m.probability, i);
        }
    }

    let candidates: BTreeMap<EdgeKey, Vec<(u64, f64)>> = classes
        .iter()
        .map(|(k, c)| (*k, c.by_observables.iter().map(|(&o, (p, _))| (o, edge_weight(*p))).collect()))
        .collect();
    let mut pieces = Vec::new();
    for (i, m) in dem.mechanisms.iter().enumerate() {
        if m.detectors.len() <= 2 || !visible(&m.detectors) {
            continue;
        }
        let split = decompose(&m.detectors, m.observables, &candidates)
            .ok_or_else(|| DecodeError::Undecomposable { mechanism: i, detectors: m.detectors.clone() })?;
        pieces.push((i, split));
    }
    for (i, split) in pieces {
        for (key, observables) in split {
            classes.entry(key).or_default().add(observables, dem.mechanisms[i].probability, i);
        }
    }

    let mut edges = Vec::with_capacity(classes.len());
    for (key, c) in classes {
        let mut probability = 0.0;
        let mut mechanisms = Vec::new();
        let mut best: Option<(f64, u64)> = None;
        for (&obs, (p, ms)) in &c.by_observables {
            probability = xor_probability(probability, *p);
            mechanisms.extend(ms.iter().copied());
            if best.is_none_or(|(bp, _)| *p > bp) {
                best = Some((*p, obs));
            }
        }
        mechanisms.sort_unstable();
        mechanisms.dedup();
        let (best_p, observables) = best.unwrap_or((0.0, 0));
        edges.push(Edge { key, probability, weight: edge_weight(best_p), observables, mechanisms });
    }

    let mut adjacency = vec![Vec::new(); dem.num_detectors + 1];
    let boundary = dem.num_detectors as u32;
    for (e, edge) in edges.iter().enumerate() {
        let b = edge.key.b.unwrap_or(boundary);
        adjacency[edge.key.a as usize].push((b, e as u32));
        adjacency[b as usize].push((edge.key.a, e as u32));
    }
    Ok(DecodingGraph { num_detectors: dem.num_detectors, edges, excluded, adjacency })
}

type Split = Vec<(EdgeKey, u64)>;

struct Search<'a> {
    dets: Vec<u32>,
    target: u64,
    candidates: &'a BTreeMap<EdgeKey, Vec<(u64, f64)>>,
    chosen: Split,
    best: Option<(f64, Split)>,
}

impl Search<'_> {
    fn go(&mut self, used: u64, acc: u64, cost: f64) {
        if self.best.as_ref().is_some_and(|b| cost >= b.0) {
            return;
        }
        let Some(i) = (0..self.dets.len()).find(|&i| used >> i & 1 == 0) else {
            if acc == self.target {
                self.best = Some((cost, self.chosen.clone()));
            }
            return;
        };
        let a = self.dets[i];
        let mut options = vec![(EdgeKey { a, b: None }, 1u64 << i)];
        for j in i + 1..self.dets.len() {
            if used >> j & 1 == 0 {
                options.push((EdgeKey { a, b: Some(self.dets[j]) }, 1 << i | 1 << j));
            }
        }
        for (key, mask) in options {
            let Some(classes) = self.candidates.get(&key) else { continue };
            for &(obs, w) in classes {
                self.chosen.push((key, obs));
                self.go(used | mask, acc ^ obs, cost + w);
                self.chosen.pop();
            }
        }
    }
}

fn decompose(dets: &[u32], observables: u64, candidates: &BTreeMap<EdgeKey, Vec<(u64, f64)>>) -> Option<Split> {
    if dets.len() > 64 {
        return None;
    }
    let mut dets = dets.to_vec();
    dets.sort_unstable();
    let mut search = Search { dets, target: observables, candidates, chosen: Vec::new(), best: None };
    search.go(0, 0, 0.0);
    search.best.map(|b| b.1)
}

impl DecodingGraph {
    pub fn boundary(&self) -> u32 {
        self.num_detectors as u32
    }

    pub fn num_nodes(&self) -> usize {
        self.num_detectors + 1
    }

    /// Neighbours of `node` as `(other endpoint, edge index)`. The boundary is node `num_detectors`.
    pub fn neighbours(&self, node: u32) -> &[(u32, u32)] {
        &self.adjacency[node as usize]
    }

    pub fn edge(&self, key: EdgeKey) -> Option<&Edge> {
        self.edges.iter().find(|e| e.key == key)
    }

    /// Multiplies every weight by `factor`.
    pub fn scale_weights(&mut self, factor: f64) {
        for e in &mut self.edges {
            e.weight *= factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::ErrorMechanism;

    fn model(mechs: Vec<ErrorMechanism>, dets: usize) -> DetectorErrorModel {
        let mut dem = DetectorErrorModel::new(dets, 1);
        dem.mechanisms = mechs;
        dem
    }

    #[test]
    fn boundary_and_internal_edges() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![1], 1), ErrorMechanism::new(0.1, vec![1, 2], 0)], 3);
        let g = build_graph(&dem, &[]).unwrap();
        assert_eq!(g.edges.len(), 2);
        let b = g.edge(EdgeKey { a: 1, b: None }).unwrap();
        assert_eq!(b.observables, 1);
        assert!((b.weight - 9f64.ln()).abs() < 1e-12);
        assert!(g.edge(EdgeKey { a: 1, b: Some(2) }).is_some());
    }

    #[test]
    fn hyperedge_splits_into_existing_edges() {
        let dem = model(
            vec![
                ErrorMechanism::new(0.1, vec![0, 1], 0),
                ErrorMechanism::new(0.1, vec![2], 1),
                ErrorMechanism::new(0.01, vec![0, 1, 2], 1),
            ],
            3,
        );
        let g = build_graph(&dem, &[]).unwrap();
        assert_eq!(g.edges.len(), 2);
        let e = g.edge(EdgeKey { a: 0, b: Some(1) }).unwrap();
        assert_eq!(e.mechanisms, vec![0, 2]);
        assert!((e.probability - xor_probability(0.1, 0.01)).abs() < 1e-15);
    }

    #[test]
    fn undecomposable_hyperedge_is_reported() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![0, 1, 2], 0)], 3);
        assert_eq!(
            build_graph(&dem, &[]).unwrap_err(),
            DecodeError::Undecomposable { mechanism: 0, detectors: vec![0, 1, 2] }
        );
    }

    #[test]
    fn postselected_detectors_remove_their_mechanisms() {
        let dem = model(vec![ErrorMechanism::new(0.1, vec![0, 1], 0), ErrorMechanism::new(0.1, vec![1], 0)], 2);
        let g = build_graph(&dem, &[0]).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert!(g.excluded[0]);
    }
}
