//! Bit-packed Pauli-frame sampling.
//!
//! Shots are processed in chunks of [`SHOTS_PER_CHUNK`]; every qubit carries one X
//! and one Z bit per shot, packed along the shot axis. Chunk `k` draws its noise
//! from a ChaCha8 stream keyed by `(seed, k)`, so a batch depends only on the
//! seed and the chunk indices, never on how chunks are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{transpose64, words_for};
use crate::circuit::{Circuit, Gate, Pauli};

use super::{pauli_pair, ReferenceFrame, ShotBatch, SimError};

const WORDS: usize = 16;
pub const SHOTS_PER_CHUNK: usize = 64 * WORDS;

#[derive(Clone, Copy, Debug)]
enum NoiseKind {
    X,
    Z,
    Depolarize1,
}

#[derive(Clone, Debug)]
enum Op {
    /// Linear action on (x, z): new_x = x·xx ⊕ z·zx, new_z = x·xz ⊕ z·zz.
    Single { q: usize, xx: bool, xz: bool, zx: bool, zz: bool },
    Cx { c: usize, t: usize },
    Cz { a: usize, b: usize },
    Reset { q: usize },
    Measure { q: usize, x_basis: bool, flip: f64 },
    Mpp { terms: Vec<(usize, Pauli)> },
    Noise1 { kind: NoiseKind, p: f64, qubits: Vec<usize> },
    Noise2 { p: f64, qubits: Vec<usize> },
    Detector { recs: Vec<usize> },
    Observable { index: usize, recs: Vec<usize> },
}

/// A circuit compiled for repeated frame sampling.
#[derive(Clone, Debug)]
pub struct FrameSampler {
    ops: Vec<Op>,
    num_qubits: usize,
    num_measurements: usize,
    num_detectors: usize,
    num_observables: usize,
}

impl FrameSampler {
    pub fn new(circuit: &Circuit, frame: &ReferenceFrame) -> Result<Self, SimError> {
        if frame.detectors.len() != circuit.num_detectors() {
            return Err(SimError::FrameMismatch {
                expected: frame.detectors.len(),
                found: circuit.num_detectors(),
            });
        }
        let mut ops = Vec::new();
        let mut measured = 0usize;
        for inst in &circuit.instructions {
            let qs: Vec<usize> = inst.qubits().map(|q| q as usize).collect();
            let p = inst.args.first().copied().unwrap_or(0.0);
            let absolute = |k: u32| measured - k as usize;
            match inst.gate {
                Gate::C1(c) => {
                    let [ix, _, iz] = c.bit_images();
                    if (ix.0, ix.1, iz.0, iz.1) != (true, false, false, true) {
                        for &q in &qs {
                            ops.push(Op::Single { q, xx: ix.0, xz: ix.1, zx: iz.0, zz: iz.1 });
                        }
                    }
                }
                Gate::Cx => ops.extend(qs.chunks_exact(2).map(|p| Op::Cx { c: p[0], t: p[1] })),
                Gate::Cz => ops.extend(qs.chunks_exact(2).map(|p| Op::Cz { a: p[0], b: p[1] })),
                Gate::R | Gate::Rx => ops.extend(qs.iter().map(|&q| Op::Reset { q })),
                Gate::M | Gate::Mx => {
                    for &q in &qs {
                        ops.push(Op::Measure { q, x_basis: inst.gate == Gate::Mx, flip: p });
                    }
                }
                Gate::Mpp => {
                    for product in inst.mpp_products() {
                        ops.push(Op::Mpp { terms: product.iter().map(|&(q, p)| (q as usize, p)).collect() });
                    }
                }
                Gate::XError | Gate::ZError | Gate::Depolarize1 if p > 0.0 => {
                    let kind = match inst.gate {
                        Gate::XError => NoiseKind::X,
                        Gate::ZError => NoiseKind::Z,
                        _ => NoiseKind::Depolarize1,
                    };
                    ops.push(Op::Noise1 { kind, p, qubits: qs });
                }
                Gate::Depolarize2 if p > 0.0 => ops.push(Op::Noise2 { p, qubits: qs }),
                Gate::Detector => ops.push(Op::Detector { recs: inst.recs().map(absolute).collect() }),
                Gate::ObservableInclude => {
                    ops.push(Op::Observable { index: p as usize, recs: inst.recs().map(absolute).collect() })
                }
                _ => {}
            }
            measured += inst.num_measurements();
        }
        Ok(FrameSampler {
            ops,
            num_qubits: circuit.num_qubits(),
            num_measurements: measured,
            num_detectors: circuit.num_detectors(),
            num_observables: circuit.num_observables(),
        })
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    /// Samples `num_shots` shots using chunks `first_chunk, first_chunk + 1, ...`.
    pub fn sample(&self, num_shots: usize, seed: u64, first_chunk: u64) -> ShotBatch {
        let chunks = num_shots.div_ceil(SHOTS_PER_CHUNK);
        let parts: Vec<(Vec<u64>, Vec<u64>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let shots = (num_shots - c * SHOTS_PER_CHUNK).min(SHOTS_PER_CHUNK);
                self.run_chunk(seed, first_chunk + c as u64, shots)
            })
            .collect();
        let mut det = Vec::with_capacity(num_shots * words_for(self.num_detectors));
        let mut obs = Vec::with_capacity(num_shots * words_for(self.num_observables));
        for (d, o) in parts {
            det.extend(d);
            obs.extend(o);
        }
        ShotBatch::from_parts(num_shots, self.num_detectors, self.num_observables, det, obs)
    }

    fn run_chunk(&self, seed: u64, chunk: u64, shots: usize) -> (Vec<u64>, Vec<u64>) {
        const W: usize = WORDS;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut xs = vec![0u64; self.num_qubits * W];
        let mut zs = vec![0u64; self.num_qubits * W];
        let mut records = vec![0u64; self.num_measurements * W];
        let mut dets = vec![0u64; words_for(self.num_detectors) * 64 * W];
        let mut obs = vec![0u64; self.num_observables.max(1) * W];
        let mut m = 0usize;
        let mut d = 0usize;

        for op in &self.ops {
            match op {
                Op::Single { q, xx, xz, zx, zz } => {
                    let (q, pick) = (*q, |b: bool, v: u64| if b { v } else { 0 });
                    for k in 0..W {
                        let x = xs[q * W + k];
                        let z = zs[q * W + k];
                        xs[q * W + k] = pick(*xx, x) ^ pick(*zx, z);
                        zs[q * W + k] = pick(*xz, x) ^ pick(*zz, z);
                    }
                }
                &Op::Cx { c, t } => {
                    for k in 0..W {
                        xs[t * W + k] ^= xs[c * W + k];
                        zs[c * W + k] ^= zs[t * W + k];
                    }
                }
                &Op::Cz { a, b } => {
                    for k in 0..W {
                        zs[a * W + k] ^= xs[b * W + k];
                        zs[b * W + k] ^= xs[a * W + k];
                    }
                }
                &Op::Reset { q } => {
                    xs[q * W..(q + 1) * W].fill(0);
                    zs[q * W..(q + 1) * W].fill(0);
                }
                &Op::Measure { q, x_basis, flip } => {
                    let src = if x_basis { &zs } else { &xs };
                    records[m * W..(m + 1) * W].copy_from_slice(&src[q * W..(q + 1) * W]);
                    if flip > 0.0 {
                        for_each_hit(&mut rng, flip, W * 64, |_, shot| records[m * W + shot / 64] ^= 1 << (shot % 64));
                    }
                    m += 1;
                }
                Op::Mpp { terms } => {
                    let rec = &mut records[m * W..(m + 1) * W];
                    rec.fill(0);
                    for &(q, p) in terms {
                        for k in 0..W {
                            rec[k] ^= match p {
                                Pauli::X => zs[q * W + k],
                                Pauli::Z => xs[q * W + k],
                                Pauli::Y => xs[q * W + k] ^ zs[q * W + k],
                            };
                        }
                    }
                    m += 1;
                }
                Op::Noise1 { kind, p, qubits } => {
                    for_each_hit(&mut rng, *p, qubits.len() * W * 64, |rng, idx| {
                        let q = qubits[idx / (W * 64)];
                        let shot = idx % (W * 64);
                        let bit = 1u64 << (shot % 64);
                        let slot = q * W + shot / 64;
                        let pauli = match kind {
                            NoiseKind::X => Pauli::X,
                            NoiseKind::Z => Pauli::Z,
                            NoiseKind::Depolarize1 => [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)],
                        };
                        let (fx, fz) = pauli.xz();
                        if fx {
                            xs[slot] ^= bit;
                        }
                        if fz {
                            zs[slot] ^= bit;
                        }
                    });
                }
                Op::Noise2 { p, qubits } => {
                    for_each_hit(&mut rng, *p, qubits.len() / 2 * W * 64, |rng, idx| {
                        let pair = idx / (W * 64);
                        let shot = idx % (W * 64);
                        let bit = 1u64 << (shot % 64);
                        let (pa, pb) = pauli_pair(rng.random_range(1..16));
                        for (q, pauli) in [(qubits[2 * pair], pa), (qubits[2 * pair + 1], pb)] {
                            if let Some(pauli) = pauli {
                                let (fx, fz) = pauli.xz();
                                let slot = q * W + shot / 64;
                                if fx {
                                    xs[slot] ^= bit;
                                }
                                if fz {
                                    zs[slot] ^= bit;
                                }
                            }
                        }
                    });
                }
                Op::Detector { recs } => {
                    let out = &mut dets[d * W..(d + 1) * W];
                    for &r in recs {
                        for k in 0..W {
                            out[k] ^= records[r * W + k];
                        }
                    }
                    d += 1;
                }
                Op::Observable { index, recs } => {
                    for &r in recs {
                        for k in 0..W {
                            obs[index * W + k] ^= records[r * W + k];
                        }
                    }
                }
            }
        }

        (
            to_shot_major(&dets, self.num_detectors, shots),
            to_shot_major(&obs, self.num_observables, shots),
        )
    }
}

/// Converts `rows × (64·WORDS)` row-major bits into `shots × ceil(rows/64)` shot-major words.
fn to_shot_major(rows_major: &[u64], rows: usize, shots: usize) -> Vec<u64> {
    let stride = words_for(rows);
    let mut out = vec![0u64; shots * stride];
    let mut block = [0u64; 64];
    for b in 0..stride {
        for w in 0..WORDS {
            if w * 64 >= shots {
                break;
            }
            for (i, slot) in block.iter_mut().enumerate() {
                let r = b * 64 + i;
                *slot = if r < rows { rows_major[r * WORDS + w] } else { 0 };
            }
            transpose64(&mut block);
            for (j, &v) in block.iter().enumerate() {
                let shot = w * 64 + j;
                if shot < shots {
                    out[shot * stride + b] = v;
                }
            }
        }
    }
    out
}

/// Calls `hit` for every index in `0..trials` that fires with probability `p`,
/// jumping between hits with geometrically distributed gaps.
fn for_each_hit(rng: &mut ChaCha8Rng, p: f64, trials: usize, mut hit: impl FnMut(&mut ChaCha8Rng, usize)) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..trials {
            hit(rng, i);
        }
        return;
    }
    let log_miss = (-p).ln_1p();
    let mut i = 0usize;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_miss).floor();
        if gap >= (trials - i) as f64 {
            return;
        }
        i += gap as usize;
        hit(rng, i);
        i += 1;
        if i >= trials {
            return;
        }
    }
}

/// Samples detection events and observable flips relative to the noiseless reference.
pub fn frame_sample(circuit: &Circuit, frame: &ReferenceFrame, num_shots: usize, seed: u64) -> Result<ShotBatch, SimError> {
    Ok(FrameSampler::new(circuit, frame)?.sample(num_shots, seed, 0))
}

/// As [`frame_sample`], on a dedicated pool of `threads` workers.
pub fn frame_sample_with_threads(
    circuit: &Circuit,
    frame: &ReferenceFrame,
    num_shots: usize,
    seed: u64,
    threads: usize,
) -> Result<ShotBatch, SimError> {
    let sampler = FrameSampler::new(circuit, frame)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    Ok(pool.install(|| sampler.sample(num_shots, seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::compute_reference;

    fn sample(text: &str, shots: usize, seed: u64) -> ShotBatch {
        let c: Circuit = text.parse().unwrap();
        let frame = compute_reference(&c).unwrap();
        frame_sample(&c, &frame, shots, seed).unwrap()
    }

    #[test]
    fn certain_flip_fires_every_shot() {
        let b = sample("R 0 1\nX_ERROR(1) 0\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]", 3000, 7);
        assert_eq!(b.detector_counts(), vec![3000, 0]);
    }

    #[test]
    fn noiseless_is_all_zero() {
        let b = sample("RX 0\nR 1\nCX 0 1\nM 1 0\nDETECTOR rec[-1] rec[-2]", 2000, 1);
        assert!(b.is_all_zero());
    }

    #[test]
    fn propagation_through_cx_and_h() {
        let b = sample(
            "R 0 1 2\nX_ERROR(1) 0\nCX 0 1\nH 2\nZ_ERROR(1) 2\nH 2\nM 0 1 2\nDETECTOR rec[-3]\nDETECTOR rec[-2]\n\
             DETECTOR rec[-1]\nOBSERVABLE_INCLUDE(0) rec[-2] rec[-3]",
            100,
            3,
        );
        assert_eq!(b.detector_counts(), vec![100, 100, 100]);
        assert_eq!(b.observable_counts(), vec![0]);
    }

    #[test]
    fn rates_follow_probabilities() {
        let b = sample("R 0\nX_ERROR(0.1) 0\nM(0.05) 0\nDETECTOR rec[-1]", 200_000, 11);
        let rate = b.detector_counts()[0] as f64 / 200_000.0;
        let expected = 0.1 * 0.95 + 0.9 * 0.05;
        assert!((rate - expected).abs() < 4.0 * (expected * (1.0 - expected) / 200_000.0).sqrt() + 1e-9, "{rate}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c: Circuit = "R 0 1\nDEPOLARIZE2(0.2) 0 1\nM 0 1\nDETECTOR rec[-1]\nDETECTOR rec[-2]".parse().unwrap();
        let frame = compute_reference(&c).unwrap();
        let one = frame_sample_with_threads(&c, &frame, 5000, 99, 1).unwrap();
        let three = frame_sample_with_threads(&c, &frame, 5000, 99, 3).unwrap();
        assert_eq!(one, three);
        let other_seed = frame_sample_with_threads(&c, &frame, 5000, 100, 1).unwrap();
        assert_ne!(one, other_seed);
    }
}
