use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::convert::Infallible;

use petgraph::graph::UnGraph;
use rustworkx_core::max_weight_matching::max_weight_matching;

use super::graph::DecodingGraph;

/// Graphs with at most this many nodes get their all-pairs shortest paths precomputed.
pub const PRECOMPUTE_LIMIT: usize = 2048;

/// Syndromes with at most this many detection events are matched by dynamic
/// programming over subsets instead of the blossom algorithm.
pub const EXACT_LIMIT: usize = 12;

const WEIGHT_SCALE: f64 = 1e6;

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest-path distances and path observable masks from one source.
#[derive(Clone, Debug)]
struct Paths {
    dist: Vec<f64>,
    observables: Vec<u64>,
}

fn dijkstra(graph: &DecodingGraph, source: u32) -> Paths {
    let n = graph.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut observables = vec![0u64; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Reverse((Dist(0.0), source)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        // Paths continue through the boundary only when it is the source.
        if u == graph.boundary() && u != source {
            continue;
        }
        for &(v, e) in graph.neighbours(u) {
            let edge = &graph.edges[e as usize];
            let nd = d + edge.weight;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                observables[v as usize] = observables[u as usize] ^ edge.observables;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    Paths { dist, observables }
}

/// Minimum-weight perfect matching decoder over a [`DecodingGraph`].
pub struct MwpmDecoder {
    graph: DecodingGraph,
    table: Option<Vec<Paths>>,
}

impl MwpmDecoder {
    pub fn new(graph: DecodingGraph) -> Self {
        let table = (graph.num_nodes() <= PRECOMPUTE_LIMIT).then(|| {
            use rayon::prelude::*;
            (0..graph.num_nodes() as u32).into_par_iter().map(|s| dijkstra(&graph, s)).collect()
        });
        MwpmDecoder { graph, table }
    }

    pub fn graph(&self) -> &DecodingGraph {
        &self.graph
    }

    /// Predicted observable flips for a syndrome. Detectors excluded from the graph are ignored.
    pub fn decode(&self, syndrome: &[u32]) -> u64 {
        let fired: Vec<u32> = syndrome.iter().copied().filter(|&d| !self.graph.excluded[d as usize]).collect();
        let boundary = self.graph.boundary() as usize;
        let owned: Vec<Paths>;
        let rows: Vec<&Paths> = match &self.table {
            Some(table) => fired.iter().map(|&d| &table[d as usize]).collect(),
            None => {
                owned = fired.iter().map(|&d| dijkstra(&self.graph, d)).collect();
                owned.iter().collect()
            }
        };
        let pair = |i: usize, j: usize| (rows[i].dist[fired[j] as usize], rows[i].observables[fired[j] as usize]);
        let edge = |i: usize| (rows[i].dist[boundary], rows[i].observables[boundary]);

        let k = fired.len();
        let worth_pairing = |i: usize, j: usize| pair(i, j).0 < edge(i).0 + edge(j).0;
        // Two events are worth pairing only when that beats sending both to the
        // boundary, so events split into clusters that can be matched separately.
        let mut cluster: Vec<usize> = (0..k).collect();
        fn root(cluster: &mut [usize], mut i: usize) -> usize {
            while cluster[i] != i {
                cluster[i] = cluster[cluster[i]];
                i = cluster[i];
            }
            i
        }
        for i in 0..k {
            for j in i + 1..k {
                if worth_pairing(i, j) {
                    let (a, b) = (root(&mut cluster, i), root(&mut cluster, j));
                    cluster[a.max(b)] = a.min(b);
                }
            }
        }
        let mut prediction = 0;
        let mut members = Vec::new();
        for r in 0..k {
            if root(&mut cluster, r) != r {
                continue;
            }
            members.clear();
            members.extend((r..k).filter(|&i| root(&mut cluster, i) == r));
            let m = &members;
            let sub_pair = |a: usize, b: usize| pair(m[a], m[b]);
            let sub_edge = |a: usize| edge(m[a]);
            prediction ^= match m.len() {
                1 => edge(r).1,
                n if n <= EXACT_LIMIT => subset_matching(n, sub_pair, sub_edge),
                n => blossom_matching(n, sub_pair, sub_edge, |a, b| worth_pairing(m[a], m[b])),
            };
        }
        prediction
    }
}

/// Minimum-weight matching of `k` detection events by dynamic programming over
/// subsets. The lowest unmatched event is paired with the boundary or with a later
/// event; among equal weights the boundary and then the lower partner win.
fn subset_matching(k: usize, pair: impl Fn(usize, usize) -> (f64, u64), edge: impl Fn(usize) -> (f64, u64)) -> u64 {
    let full = (1usize << k) - 1;
    let mut cost = vec![f64::INFINITY; full + 1];
    let mut prediction = vec![0u64; full + 1];
    cost[0] = 0.0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let (w, o) = edge(i);
        let (mut best, mut obs) = (w + cost[rest], o ^ prediction[rest]);
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let (w, o) = pair(i, j);
            let remaining = rest & !(1 << j);
            let c = w + cost[remaining];
            if c < best {
                best = c;
                obs = o ^ prediction[remaining];
            }
        }
        cost[mask] = best;
        prediction[mask] = obs;
    }
    prediction[full]
}

/// Minimum-weight matching through a maximum-weight perfect matching on a doubled
/// graph: event `i` pairs with event `j`, or with its own boundary copy `k + i`.
/// Copies `k + i` and `k + j` pair for free, which is needed only when `i` and `j`
/// pair, so both edges exist only for pairs accepted by `candidate`.
fn blossom_matching(
    k: usize,
    pair: impl Fn(usize, usize) -> (f64, u64),
    edge: impl Fn(usize) -> (f64, u64),
    candidate: impl Fn(usize, usize) -> bool,
) -> u64 {
    let mut g: UnGraph<(), i128> = UnGraph::with_capacity(2 * k, k * k);
    for _ in 0..2 * k {
        g.add_node(());
    }
    let mut raw = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = pair(i, j).0;
            if d.is_finite() && candidate(i, j) {
                raw.push((i, j, (d * WEIGHT_SCALE).round() as i128));
                raw.push((k + i, k + j, 0));
            }
        }
        let d = edge(i).0;
        if d.is_finite() {
            raw.push((i, k + i, (d * WEIGHT_SCALE).round() as i128));
        }
    }
    let top = raw.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    for (a, b, w) in raw {
        g.add_edge((a as u32).into(), (b as u32).into(), top - w);
    }
    let matching = max_weight_matching(&g, true, |e| Ok::<i128, Infallible>(*e.weight()), false)
        .unwrap_or_else(|e| match e {});
    let mut prediction = 0;
    for (a, b) in matching {
        let (a, b) = (a.min(b), a.max(b));
        if b < k {
            prediction ^= pair(a, b).1;
        } else if a < k {
            prediction ^= edge(a).1;
        }
    }
    prediction
}

/// Decodes one syndrome. Builds a fresh decoder each call, so prefer [`MwpmDecoder`] for many shots.
pub fn decode_mwpm(graph: &DecodingGraph, syndrome: &[u32]) -> u64 {
    MwpmDecoder::new(graph.clone()).decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::build_graph;
    use crate::dem::{DetectorErrorModel, ErrorMechanism};

    fn repetition_line(n: usize, p: f64) -> DetectorErrorModel {
        // Detectors 0..n on a line, boundary at both ends; the left boundary edge flips L0.
        let mut dem = DetectorErrorModel::new(n, 1);
        dem.mechanisms.push(ErrorMechanism::new(p, vec![0], 1));
        for i in 0..n as u32 - 1 {
            dem.mechanisms.push(ErrorMechanism::new(p, vec![i, i + 1], 0));
        }
        dem.mechanisms.push(ErrorMechanism::new(p, vec![n as u32 - 1], 0));
        dem
    }

    #[test]
    fn empty_syndrome_predicts_nothing() {
        let g = build_graph(&repetition_line(5, 0.1), &[]).unwrap();
        assert_eq!(decode_mwpm(&g, &[]), 0);
    }

    #[test]
    fn single_detector_goes_to_nearest_boundary() {
        let dec = MwpmDecoder::new(build_graph(&repetition_line(5, 0.1), &[]).unwrap());
        assert_eq!(dec.decode(&[0]), 1);
        assert_eq!(dec.decode(&[1]), 1);
        assert_eq!(dec.decode(&[3]), 0);
        assert_eq!(dec.decode(&[0, 1]), 0);
    }

    #[test]
    fn blossom_pairs_many_detectors() {
        let dec = MwpmDecoder::new(build_graph(&repetition_line(9, 0.1), &[]).unwrap());
        assert_eq!(dec.decode(&[0, 1, 4, 5]), 0);
        assert_eq!(dec.decode(&[1, 4, 5]), 1);
        assert_eq!(dec.decode(&[0, 3, 4, 8]), 1);
    }

    #[test]
    fn subset_and_blossom_matchings_have_equal_weight() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let k = rng.random_range(1..=8);
            let w: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(1..50) as f64).collect()).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.random_range(1..50) as f64).collect();
            // Observable bit `i` marks event `i` going to the boundary, bit `8 + 8i + j` pairing `i` with `j`.
            let pair = |i: usize, j: usize| (w[i.min(j)][i.max(j)], 1u64 << (8 + 8 * i.min(j) + i.max(j)));
            let edge = |i: usize| (b[i], 1u64 << i);
            let weight = |m: u64| -> f64 {
                (0..64).filter(|&t| m >> t & 1 == 1).map(|t| if t < 8 { b[t] } else { let (i, j) = ((t - 8) / 8, (t - 8) % 8); w[i][j] }).sum()
            };
            let exact = subset_matching(k, pair, edge);
            let blossom = blossom_matching(k, pair, edge, |_, _| true);
            assert_eq!(weight(exact), weight(blossom), "k={k}");
        }
    }

    #[test]
    fn on_demand_paths_agree_with_table() {
        let g = build_graph(&repetition_line(9, 0.1), &[]).unwrap();
        let table = MwpmDecoder::new(g.clone());
        let lazy = MwpmDecoder { graph: g, table: None };
        for s in [&[0u32, 2, 7][..], &[1, 4, 5, 6, 8], &[3]] {
            assert_eq!(table.decode(s), lazy.decode(s));
        }
    }
}
