//! Stabilizer tableau whose row signs are affine functions of earlier random outcomes.
//!
//! Every random measurement introduces a fresh variable (its record index). A
//! deterministic measurement then yields an affine form over those variables,
//! which tells exactly which earlier records its value depends on.

use crate::bits::{words_for, BitVec};
use crate::circuit::{Circuit, Clifford1, Gate, Pauli};

/// A GF(2) affine form: `constant ⊕ (xor of the listed variables)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub constant: bool,
    pub vars: BitVec,
}

impl Affine {
    pub fn constant(value: bool, num_vars: usize) -> Self {
        Affine { constant: value, vars: BitVec::zeros(num_vars) }
    }

    pub fn variable(var: usize, num_vars: usize) -> Self {
        Affine { constant: false, vars: BitVec::from_indices(num_vars, [var]) }
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_zero()
    }

    pub fn xor_with(&mut self, other: &Affine) {
        self.constant ^= other.constant;
        self.vars.xor_with(&other.vars);
    }
}

pub(crate) struct SymbolicTableau {
    n: usize,
    nw: usize,
    num_vars: usize,
    /// Rows `0..n` are destabilizers, `n..2n` stabilizers; `2n` is scratch.
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<Affine>,
}

impl SymbolicTableau {
    pub fn new(n: usize, num_vars: usize) -> Self {
        let nw = words_for(n).max(1);
        let rows = 2 * n + 1;
        let mut t = SymbolicTableau {
            n,
            nw,
            num_vars,
            x: vec![0; rows * nw],
            z: vec![0; rows * nw],
            sign: vec![Affine::constant(false, num_vars); rows],
        };
        for q in 0..n {
            t.x[q * nw + q / 64] |= 1 << (q % 64);
            t.z[(n + q) * nw + q / 64] |= 1 << (q % 64);
        }
        t
    }

    #[inline]
    fn bit(v: &[u64], row: usize, nw: usize, q: usize) -> bool {
        v[row * nw + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn put(v: &mut [u64], row: usize, nw: usize, q: usize, b: bool) {
        let w = &mut v[row * nw + q / 64];
        let m = 1u64 << (q % 64);
        if b {
            *w |= m
        } else {
            *w &= !m
        }
    }

    pub fn c1(&mut self, q: usize, gate: Clifford1) {
        let images = gate.bit_images();
        for r in 0..2 * self.n {
            let x = Self::bit(&self.x, r, self.nw, q);
            let z = Self::bit(&self.z, r, self.nw, q);
            let (nx, nz, neg) = match (x, z) {
                (false, false) => continue,
                (true, false) => images[0],
                (true, true) => images[1],
                (false, true) => images[2],
            };
            Self::put(&mut self.x, r, self.nw, q, nx);
            Self::put(&mut self.z, r, self.nw, q, nz);
            self.sign[r].constant ^= neg;
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        for r in 0..2 * self.n {
            let (xc, zc) = (Self::bit(&self.x, r, self.nw, c), Self::bit(&self.z, r, self.nw, c));
            let (xt, zt) = (Self::bit(&self.x, r, self.nw, t), Self::bit(&self.z, r, self.nw, t));
            self.sign[r].constant ^= xc && zt && !(xt ^ zc);
            Self::put(&mut self.x, r, self.nw, t, xt ^ xc);
            Self::put(&mut self.z, r, self.nw, c, zc ^ zt);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for r in 0..2 * self.n {
            let (xa, za) = (Self::bit(&self.x, r, self.nw, a), Self::bit(&self.z, r, self.nw, a));
            let (xb, zb) = (Self::bit(&self.x, r, self.nw, b), Self::bit(&self.z, r, self.nw, b));
            self.sign[r].constant ^= xa && xb && (za ^ zb);
            Self::put(&mut self.z, r, self.nw, a, za ^ xb);
            Self::put(&mut self.z, r, self.nw, b, zb ^ xa);
        }
    }

    /// Multiplies row `i` into row `h`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let nw = self.nw;
        let (mut pos, mut neg) = (0u32, 0u32);
        for w in 0..nw {
            let (x1, z1) = (self.x[i * nw + w], self.z[i * nw + w]);
            let (x2, z2) = (self.x[h * nw + w], self.z[h * nw + w]);
            let xo = x1 & !z1;
            let zo = !x1 & z1;
            let y = x1 & z1;
            pos += ((xo & z2 & x2) | (zo & x2 & !z2) | (y & z2 & !x2)).count_ones();
            neg += ((xo & z2 & !x2) | (zo & x2 & z2) | (y & x2 & !z2)).count_ones();
            self.x[h * nw + w] ^= x1;
            self.z[h * nw + w] ^= z1;
        }
        let phase = (pos + 4 - neg % 4) % 4;
        let (lo, hi) = if h < i { self.sign.split_at_mut(i) } else { self.sign.split_at_mut(h) };
        let (sh, si) = if h < i { (&mut lo[h], &hi[0]) } else { (&mut hi[0], &lo[i]) };
        sh.xor_with(si);
        sh.constant ^= phase == 2;
    }

    fn clear_row(&mut self, r: usize) {
        let nw = self.nw;
        self.x[r * nw..(r + 1) * nw].fill(0);
        self.z[r * nw..(r + 1) * nw].fill(0);
        self.sign[r] = Affine::constant(false, self.num_vars);
    }

    /// Collapses `q` in the Z basis. Returns the pivot row for a random outcome,
    /// otherwise the deterministic outcome.
    fn collapse_z(&mut self, q: usize) -> Result<usize, Affine> {
        let n = self.n;
        let nw = self.nw;
        let Some(p) = (n..2 * n).find(|&r| Self::bit(&self.x, r, nw, q)) else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for i in 0..n {
                if Self::bit(&self.x, i, nw, q) {
                    self.rowsum(scratch, n + i);
                }
            }
            return Err(self.sign[scratch].clone());
        };
        for r in 0..2 * n {
            if r != p && Self::bit(&self.x, r, nw, q) {
                self.rowsum(r, p);
            }
        }
        let d = p - n;
        self.x.copy_within(p * nw..(p + 1) * nw, d * nw);
        self.z.copy_within(p * nw..(p + 1) * nw, d * nw);
        self.sign[d] = self.sign[p].clone();
        self.clear_row(p);
        Self::put(&mut self.z, p, nw, q, true);
        Ok(p)
    }

    /// Z-basis measurement. A random outcome is assigned variable `var`.
    pub fn measure_z(&mut self, q: usize, var: usize) -> Affine {
        match self.collapse_z(q) {
            Ok(p) => {
                self.sign[p] = Affine::variable(var, self.num_vars);
                self.sign[p].clone()
            }
            Err(outcome) => outcome,
        }
    }

    /// Resets `q` to `|0>`. A random collapse is tracked as variable `var`, so
    /// qubits entangled with `q` keep an honest dependence on it.
    pub fn reset_z(&mut self, q: usize, var: usize) {
        let outcome = self.measure_z(q, var);
        if outcome.constant || !outcome.vars.is_zero() {
            for r in 0..2 * self.n {
                if Self::bit(&self.z, r, self.nw, q) {
                    self.sign[r].xor_with(&outcome);
                }
            }
        }
    }
}

/// Noiseless symbolic evaluation of a circuit.
#[derive(Clone, Debug)]
pub struct SymbolicRun {
    /// Outcome of every measurement as a form over the random outcomes. Variable
    /// `k < records.len()` is measurement `k`; later variables are random resets.
    pub records: Vec<Affine>,
    pub detectors: Vec<Affine>,
    pub observables: Vec<Affine>,
}

/// Basis change taking `pauli` to `Z` (each is its own inverse).
pub(crate) fn to_z_basis(pauli: Pauli) -> Option<Clifford1> {
    match pauli {
        Pauli::X => Some(Clifford1::H),
        Pauli::Y => Some(Clifford1::HYz),
        Pauli::Z => None,
    }
}

pub fn run_symbolic(circuit: &Circuit) -> SymbolicRun {
    let n = circuit.num_qubits();
    let num_measurements = circuit.num_measurements();
    let num_resets: usize = circuit
        .instructions
        .iter()
        .filter(|i| i.gate.is_reset())
        .map(|i| i.targets.len())
        .sum();
    let num_vars = num_measurements + num_resets;
    let mut next_reset_var = num_measurements;
    let mut t = SymbolicTableau::new(n, num_vars);
    let mut records: Vec<Affine> = Vec::with_capacity(num_vars);
    let mut detectors = Vec::new();
    let mut observables: Vec<Affine> = vec![Affine::constant(false, num_vars); circuit.num_observables()];

    let parity = |records: &[Affine], recs: &mut dyn Iterator<Item = u32>| {
        let mut acc = Affine::constant(false, num_vars);
        for k in recs {
            acc.xor_with(&records[records.len() - k as usize]);
        }
        acc
    };

    for inst in &circuit.instructions {
        let qubits: Vec<usize> = inst.qubits().map(|q| q as usize).collect();
        match inst.gate {
            Gate::C1(c) => qubits.iter().for_each(|&q| t.c1(q, c)),
            Gate::Cx => qubits.chunks_exact(2).for_each(|p| t.cx(p[0], p[1])),
            Gate::Cz => qubits.chunks_exact(2).for_each(|p| t.cz(p[0], p[1])),
            Gate::R | Gate::Rx => {
                for &q in &qubits {
                    let x_basis = inst.gate == Gate::Rx;
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                    t.reset_z(q, next_reset_var);
                    next_reset_var += 1;
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                }
            }
            Gate::M | Gate::Mx => {
                for &q in &qubits {
                    let x_basis = inst.gate == Gate::Mx;
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                    let var = records.len();
                    records.push(t.measure_z(q, var));
                    if x_basis {
                        t.c1(q, Clifford1::H);
                    }
                }
            }
            Gate::Mpp => {
                for product in inst.mpp_products() {
                    let var = records.len();
                    records.push(measure_product(&mut t, &product, var));
                }
            }
            Gate::Detector => {
                let d = parity(&records, &mut inst.recs());
                detectors.push(d);
            }
            Gate::ObservableInclude => {
                let k = inst.args.first().copied().unwrap_or(0.0) as usize;
                let d = parity(&records, &mut inst.recs());
                observables[k].xor_with(&d);
            }
            _ => {}
        }
    }
    SymbolicRun { records, detectors, observables }
}

fn measure_product(t: &mut SymbolicTableau, product: &[(u32, Pauli)], var: usize) -> Affine {
    let change = |t: &mut SymbolicTableau| {
        for &(q, p) in product {
            if let Some(c) = to_z_basis(p) {
                t.c1(q as usize, c);
            }
        }
    };
    let fold = |t: &mut SymbolicTableau| {
        let root = product[0].0 as usize;
        for &(q, _) in &product[1..] {
            t.cx(q as usize, root);
        }
    };
    change(t);
    fold(t);
    let out = t.measure_z(product[0].0 as usize, var);
    fold(t);
    change(t);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> SymbolicRun {
        run_symbolic(&text.parse().unwrap())
    }

    #[test]
    fn reset_then_measure_is_zero() {
        let r = run("R 0\nM 0");
        assert_eq!(r.records[0], Affine::constant(false, 2));
    }

    #[test]
    fn plus_state_measured_in_z_is_random() {
        let r = run("H 0\nM 0\nM 0");
        assert_eq!(r.records[0], Affine::variable(0, 2));
        assert_eq!(r.records[1], Affine::variable(0, 2));
    }

    #[test]
    fn bell_pair_parity() {
        let r = run("H 0\nCX 0 1\nM 0 1\nDETECTOR rec[-1] rec[-2]");
        assert!(!r.records[0].is_constant());
        assert_eq!(r.detectors[0], Affine::constant(false, 2));
    }

    #[test]
    fn signs_through_cliffords() {
        assert!(run("X 0\nM 0").records[0].constant);
        assert!(run("RX 0\nZ 0\nMX 0").records[0].constant);
        assert!(!run("RX 0\nMX 0").records[0].constant);
        // S|+> is the +1 eigenstate of Y and S_DAG|+> the -1 eigenstate.
        assert!(!run("RX 0\nS 0\nMPP Y0").records[0].constant);
        assert!(run("RX 0\nS_DAG 0\nMPP Y0").records[0].constant);
        assert!(run("R 0 1\nX 1\nMPP Z0*Z1").records[0].constant);
        assert!(!run("RX 0 1\nMPP X0*X1").records[0].constant);
    }

    #[test]
    fn cz_matches_conjugated_cx() {
        let a = run("RX 0 1\nCZ 0 1\nMPP X0*Z1 Z0*X1");
        assert!(a.records.iter().all(|r| r.is_constant() && !r.constant));
    }

    #[test]
    fn reset_of_random_qubit_is_clean() {
        let r = run("H 0\nCX 0 1\nR 0\nM 0\nM 1");
        assert_eq!(r.records[0], Affine::constant(false, 3));
        assert_eq!(r.records[1].vars.ones().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn reset_of_flipped_qubit_is_clean() {
        let r = run("H 0\nCX 0 1\nM 1\nR 0\nM 0");
        assert_eq!(r.records[1], Affine::constant(false, 3));
    }
}
