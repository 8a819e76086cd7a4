//! Single-shot stabilizer simulation with noise sampling.
//!
//! The tableau is stored column-major: for each qubit, the X and Z bits of all
//! `2n` generator rows are packed into words, so gates touch a handful of words
//! and row multiplications run bit-parallel across rows.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::{words_for, Ones};
use crate::circuit::{Circuit, Clifford1, Gate, Pauli};

use super::symbolic::to_z_basis;
use super::{pauli_pair, SimError};

pub(crate) struct Tableau {
    n: usize,
    w: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    sign: Vec<u64>,
    b0: Vec<u64>,
    b1: Vec<u64>,
    mask: Vec<u64>,
}

#[inline]
fn get(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn flip(v: &mut [u64], i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

impl Tableau {
    pub fn new(n: usize) -> Self {
        let w = words_for(2 * n).max(1);
        let mut t = Tableau {
            n,
            w,
            xs: vec![0; n * w],
            zs: vec![0; n * w],
            sign: vec![0; w],
            b0: vec![0; w],
            b1: vec![0; w],
            mask: vec![0; w],
        };
        for q in 0..n {
            flip(&mut t.xs[q * w..(q + 1) * w], q);
            flip(&mut t.zs[q * w..(q + 1) * w], n + q);
        }
        t
    }

    #[inline]
    fn cols(&mut self, q: usize) -> (&mut [u64], &mut [u64]) {
        let w = self.w;
        (&mut self.xs[q * w..(q + 1) * w], &mut self.zs[q * w..(q + 1) * w])
    }

    pub fn c1(&mut self, q: usize, gate: Clifford1) {
        let [ix, iy, iz] = gate.bit_images();
        let w = self.w;
        for k in 0..w {
            let x = self.xs[q * w + k];
            let z = self.zs[q * w + k];
            let (ox, oy, oz) = (x & !z, x & z, !x & z);
            let pick = |m: u64, b: bool| if b { m } else { 0 };
            self.xs[q * w + k] = pick(ox, ix.0) | pick(oy, iy.0) | pick(oz, iz.0);
            self.zs[q * w + k] = pick(ox, ix.1) | pick(oy, iy.1) | pick(oz, iz.1);
            self.sign[k] ^= pick(ox, ix.2) | pick(oy, iy.2) | pick(oz, iz.2);
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        let w = self.w;
        for k in 0..w {
            let (xc, zc) = (self.xs[c * w + k], self.zs[c * w + k]);
            let (xt, zt) = (self.xs[t * w + k], self.zs[t * w + k]);
            self.sign[k] ^= xc & zt & !(xt ^ zc);
            self.xs[t * w + k] = xt ^ xc;
            self.zs[c * w + k] = zc ^ zt;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let w = self.w;
        for k in 0..w {
            let (xa, za) = (self.xs[a * w + k], self.zs[a * w + k]);
            let (xb, zb) = (self.xs[b * w + k], self.zs[b * w + k]);
            self.sign[k] ^= xa & xb & (za ^ zb);
            self.zs[a * w + k] = za ^ xb;
            self.zs[b * w + k] = zb ^ xa;
        }
    }

    pub fn pauli(&mut self, q: usize, p: Pauli) {
        let w = self.w;
        for k in 0..w {
            self.sign[k] ^= match p {
                Pauli::X => self.zs[q * w + k],
                Pauli::Z => self.xs[q * w + k],
                Pauli::Y => self.xs[q * w + k] ^ self.zs[q * w + k],
            };
        }
    }

    /// Z-basis measurement; `coin` supplies the outcome when it is random.
    pub fn measure_z(&mut self, q: usize, coin: impl FnOnce() -> bool) -> bool {
        let n = self.n;
        let w = self.w;
        let pivot = Ones::new(&self.xs[q * w..(q + 1) * w]).find(|&r| r >= n);
        match pivot {
            Some(p) => {
                self.mask.copy_from_slice(&self.xs[q * w..(q + 1) * w]);
                flip(&mut self.mask, p);
                self.b0.fill(0);
                self.b1.fill(0);
                for j in 0..n {
                    let px = get(&self.xs[j * w..], p);
                    let pz = get(&self.zs[j * w..], p);
                    if !px && !pz {
                        continue;
                    }
                    for k in 0..w {
                        let m = self.mask[k];
                        let x = self.xs[j * w + k];
                        let z = self.zs[j * w + k];
                        let (plus, minus) = match (px, pz) {
                            (true, false) => (z & x, z & !x),
                            (false, true) => (x & !z, x & z),
                            _ => (z & !x, x & !z),
                        };
                        let (plus, minus) = (plus & m, minus & m);
                        self.b1[k] ^= self.b0[k] & plus;
                        self.b0[k] ^= plus;
                        self.b1[k] ^= !self.b0[k] & minus;
                        self.b0[k] ^= minus;
                        if px {
                            self.xs[j * w + k] ^= m;
                        }
                        if pz {
                            self.zs[j * w + k] ^= m;
                        }
                    }
                }
                let sp = if get(&self.sign, p) { !0u64 } else { 0 };
                for k in 0..w {
                    self.sign[k] ^= self.mask[k] & (sp ^ self.b1[k]);
                }
                let d = p - n;
                for j in 0..n {
                    let (xc, zc) = self.cols(j);
                    let (bx, bz) = (get(xc, p), get(zc, p));
                    if get(xc, d) != bx {
                        flip(xc, d);
                    }
                    if get(zc, d) != bz {
                        flip(zc, d);
                    }
                    if bx {
                        flip(xc, p);
                    }
                    if bz {
                        flip(zc, p);
                    }
                }
                if get(&self.sign, d) != get(&self.sign, p) {
                    flip(&mut self.sign, d);
                }
                flip(&mut self.zs[q * w..(q + 1) * w], p);
                let outcome = coin();
                if get(&self.sign, p) != outcome {
                    flip(&mut self.sign, p);
                }
                outcome
            }
            None => self.deterministic_z(q),
        }
    }

    /// Sign of the stabilizer product equal to `Z_q`.
    fn deterministic_z(&mut self, q: usize) -> bool {
        let n = self.n;
        let w = self.w;
        self.mask.fill(0);
        for i in Ones::new(&self.xs[q * w..(q + 1) * w]) {
            if i < n {
                flip(&mut self.mask, n + i);
            }
        }
        let mut parity = 0u32;
        let mut y_count = 0u32;
        for k in 0..w {
            parity ^= (self.sign[k] & self.mask[k]).count_ones() & 1;
        }
        for j in 0..n {
            let mut carry = 0u64;
            for k in 0..w {
                let m = self.mask[k];
                let x = self.xs[j * w + k] & m;
                let z = self.zs[j * w + k] & m;
                y_count += (x & z).count_ones();
                let mut pre = z;
                pre ^= pre << 1;
                pre ^= pre << 2;
                pre ^= pre << 4;
                pre ^= pre << 8;
                pre ^= pre << 16;
                pre ^= pre << 32;
                let exclusive = (pre << 1) ^ carry.wrapping_neg();
                parity ^= (exclusive & x).count_ones() & 1;
                carry = (pre >> 63) ^ carry;
            }
        }
        debug_assert_eq!(y_count % 2, 0);
        (parity ^ (y_count / 2) & 1) == 1
    }

    pub fn reset_z(&mut self, q: usize, coin: impl FnOnce() -> bool) {
        if self.measure_z(q, coin) {
            self.pauli(q, Pauli::X);
        }
    }

    pub fn measure_product(&mut self, product: &[(u32, Pauli)], coin: impl FnOnce() -> bool) -> bool {
        let change = |t: &mut Tableau| {
            for &(q, p) in product {
                if let Some(c) = to_z_basis(p) {
                    t.c1(q as usize, c);
                }
            }
        };
        let root = product[0].0 as usize;
        let fold = |t: &mut Tableau| {
            for &(q, _) in &product[1..] {
                t.cx(q as usize, root);
            }
        };
        change(self);
        fold(self);
        let out = self.measure_z(root, coin);
        fold(self);
        change(self);
        out
    }
}

/// Raw outcome of one tableau shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauShot {
    pub measurements: Vec<bool>,
    /// Detector parities of the raw records (not relative to any reference).
    pub detectors: Vec<bool>,
    pub observables: Vec<bool>,
}

fn sample_pauli1(rng: &mut ChaCha8Rng) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)]
}

/// Runs one shot with a per-shot generator seeded from `seed`.
pub fn tableau_run(circuit: &Circuit, seed: u64) -> Result<TableauShot, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tableau_run_with(circuit, &mut rng)
}

pub fn tableau_run_with(circuit: &Circuit, rng: &mut ChaCha8Rng) -> Result<TableauShot, SimError> {
    let n = circuit.num_qubits();
    let mut t = Tableau::new(n);
    let mut records: Vec<bool> = Vec::with_capacity(circuit.num_measurements());
    let mut detectors = Vec::new();
    let mut observables = vec![false; circuit.num_observables()];

    for inst in &circuit.instructions {
        let qubits: Vec<usize> = inst.qubits().map(|q| q as usize).collect();
        let p = inst.args.first().copied().unwrap_or(0.0);
        match inst.gate {
            Gate::C1(c) => qubits.iter().for_each(|&q| t.c1(q, c)),
            Gate::Cx => qubits.chunks_exact(2).for_each(|pr| t.cx(pr[0], pr[1])),
            Gate::Cz => qubits.chunks_exact(2).for_each(|pr| t.cz(pr[0], pr[1])),
            Gate::R => qubits.iter().for_each(|&q| t.reset_z(q, || rng.random())),
            Gate::Rx => {
                for &q in &qubits {
                    t.c1(q, Clifford1::H);
                    t.reset_z(q, || rng.random());
                    t.c1(q, Clifford1::H);
                }
            }
            Gate::M | Gate::Mx => {
                for &q in &qubits {
                    let x_basis = inst.gate == Gate::Mx;
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                    let mut bit = t.measure_z(q, || rng.random());
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                    if p > 0.0 && rng.random::<f64>() < p {
                        bit = !bit;
                    }
                    records.push(bit);
                }
            }
            Gate::Mpp => {
                for product in inst.mpp_products() {
                    let bit = t.measure_product(&product, || rng.random());
                    records.push(bit);
                }
            }
            Gate::XError | Gate::ZError => {
                let pauli = if inst.gate == Gate::XError { Pauli::X } else { Pauli::Z };
                for &q in &qubits {
                    if rng.random::<f64>() < p {
                        t.pauli(q, pauli);
                    }
                }
            }
            Gate::Depolarize1 => {
                for &q in &qubits {
                    if rng.random::<f64>() < p {
                        let pauli = sample_pauli1(rng);
                        t.pauli(q, pauli);
                    }
                }
            }
            Gate::Depolarize2 => {
                for pr in qubits.chunks_exact(2) {
                    if rng.random::<f64>() < p {
                        let (a, b) = pauli_pair(rng.random_range(1..16));
                        if let Some(a) = a {
                            t.pauli(pr[0], a);
                        }
                        if let Some(b) = b {
                            t.pauli(pr[1], b);
                        }
                    }
                }
            }
            Gate::Detector => {
                detectors.push(inst.recs().fold(false, |acc, k| acc ^ records[records.len() - k as usize]));
            }
            Gate::ObservableInclude => {
                let k = p as usize;
                observables[k] ^= inst.recs().fold(false, |acc, k| acc ^ records[records.len() - k as usize]);
            }
            Gate::Tick | Gate::QubitCoords => {}
        }
    }
    Ok(TableauShot { measurements: records, detectors, observables })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shot(text: &str, seed: u64) -> TableauShot {
        tableau_run(&text.parse().unwrap(), seed).unwrap()
    }

    #[test]
    fn deterministic_zero_after_reset() {
        assert_eq!(shot("R 0\nM 0", 1).measurements, vec![false]);
        assert_eq!(shot("R 0\nX 0\nM 0", 1).measurements, vec![true]);
    }

    #[test]
    fn bell_pair_parity_is_even() {
        let c: Circuit = "H 0\nCX 0 1\nM 0 1".parse().unwrap();
        let mut ones = 0;
        for seed in 0..10_000 {
            let s = tableau_run(&c, seed).unwrap();
            assert_eq!(s.measurements[0], s.measurements[1]);
            ones += s.measurements[0] as usize;
        }
        assert!((4_500..5_500).contains(&ones), "{ones}");
    }

    #[test]
    fn ghz_and_y_eigenstates() {
        for seed in 0..200 {
            let s = shot("H 0\nCX 0 1 0 2\nMX 0 1 2\nDETECTOR rec[-1] rec[-2] rec[-3]", seed);
            assert!(!s.detectors[0]);
            let s = shot("RX 0\nS 0\nMPP Y0", seed);
            assert!(!s.measurements[0]);
            let s = shot("RX 0\nSQRT_X 0\nH 0\nS 0\nM 0\nM 0\nDETECTOR rec[-1] rec[-2]", seed);
            assert!(!s.detectors[0]);
        }
    }

    #[test]
    fn deterministic_measurement_with_many_generators() {
        for seed in 0..100 {
            let s = shot("H 0\nCX 0 1\nCX 1 2\nCX 2 3\nH 0 1 2 3\nCZ 0 1\nCZ 0 1\nH 0 1 2 3\nMPP Z0*Z3\nM 0 1 2 3", seed);
            assert!(!s.measurements[0]);
            let parity = s.measurements[1..].iter().fold(false, |a, &b| a ^ b);
            assert!(!parity);
        }
    }

    #[test]
    fn certain_errors_always_fire() {
        for seed in 0..20 {
            let s = shot("R 0\nX_ERROR(1) 0\nM 0", seed);
            assert!(s.measurements[0]);
            let s = shot("R 0\nM(1) 0", seed);
            assert!(s.measurements[0]);
        }
    }
}
