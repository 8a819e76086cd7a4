//! Turns a per-round plan into a circuit, then annotates detectors and the
//! observable by symbolic simulation.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{Circuit, Gate, Instruction, Pauli, Target};
use crate::sim::{run_symbolic, Affine};

use super::layout::{Layout, Plaquette, Point, Region};
use super::{AnnotatedCircuit, BuildError};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Postselect {
    Nothing,
    All,
    /// Checks whose center lies within Chebyshev distance `radius` of `center`.
    Within { center: (f64, f64), radius: f64 },
}

impl Postselect {
    fn covers(&self, p: Plaquette) -> bool {
        match self {
            Postselect::Nothing => false,
            Postselect::All => true,
            Postselect::Within { center, radius } => {
                let c = p.center();
                (c.0 - center.0).abs().max((c.1 - center.1).abs()) <= *radius
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct RoundPlan {
    pub region: Region,
    /// Data qubits reset at the start of the round, with their basis.
    pub fresh: Vec<(Point, Pauli)>,
    /// Extra layers between the reset layer and the first two-qubit layer.
    pub prep: Vec<Vec<Instruction>>,
    pub orders: BTreeMap<Plaquette, [usize; 4]>,
    /// Single-qubit gate on a check's measure qubit between the second and third two-qubit layers.
    pub hook: Option<(Plaquette, Gate)>,
    /// Drop two-qubit gates that cannot act: a control still in `|0>` or a target still in `|+>`.
    pub omit_noop: bool,
    pub postselect: Postselect,
}

impl RoundPlan {
    pub fn plain(region: Region) -> Self {
        RoundPlan {
            region,
            fresh: Vec::new(),
            prep: Vec::new(),
            orders: BTreeMap::new(),
            hook: None,
            omit_noop: false,
            postselect: Postselect::Nothing,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Readout {
    /// Noiseless product measurements of every check and of the given logical.
    Noiseless { logical: Vec<(Point, Pauli)> },
    /// Noisy single-qubit measurement of every data qubit in `basis`.
    Data { basis: Pauli, logical: Vec<Point> },
}

struct Candidate {
    plaquette: Plaquette,
    own: Vec<usize>,
    previous: Option<usize>,
    postselected: bool,
}

struct Slot {
    /// Index of the instruction after which the detectors go.
    after: usize,
    measured: usize,
    round: usize,
    candidates: Vec<Candidate>,
}

struct Assembler<'a> {
    layout: &'a Layout,
    body: Circuit,
    measured: usize,
    last: BTreeMap<Plaquette, usize>,
    slots: Vec<Slot>,
}

impl Assembler<'_> {
    fn layer(&mut self, instructions: impl IntoIterator<Item = Instruction>) {
        let before = self.body.len();
        for inst in instructions {
            if !inst.targets.is_empty() {
                self.body.push(inst);
            }
        }
        if self.body.len() > before {
            self.body.tick();
        }
    }

    fn measure(&mut self, gate: Gate, qubits: &[u32]) -> Vec<usize> {
        if qubits.is_empty() {
            return Vec::new();
        }
        self.body.gate(gate, qubits.iter().copied());
        let recs = (self.measured..self.measured + qubits.len()).collect();
        self.measured += qubits.len();
        recs
    }

    fn round(&mut self, index: usize, plan: &RoundPlan) -> Result<(), BuildError> {
        let layout = self.layout;
        let plaquettes = plan.region.plaquettes();
        check_schedule(plan, &plaquettes)?;
        let of_basis = |b: Pauli| -> Vec<Plaquette> { plaquettes.iter().copied().filter(|p| p.basis() == b).collect() };
        let (xs, zs) = (of_basis(Pauli::X), of_basis(Pauli::Z));
        let sorted = |mut v: Vec<u32>| {
            v.sort_unstable();
            v
        };

        let fresh_of = |b: Pauli| plan.fresh.iter().filter(move |f| f.1 == b).map(|f| layout.data(f.0));
        let r = sorted(zs.iter().map(|&p| layout.measure(p)).chain(fresh_of(Pauli::Z)).collect());
        let rx = sorted(xs.iter().map(|&p| layout.measure(p)).chain(fresh_of(Pauli::X)).collect());
        self.layer([Instruction::on_qubits(Gate::R, r), Instruction::on_qubits(Gate::Rx, rx)]);
        for prep in &plan.prep {
            self.layer(prep.iter().cloned());
        }

        let mut still_fresh: BTreeMap<u32, Pauli> = plan.fresh.iter().map(|&(p, b)| (layout.data(p), b)).collect();
        for t in 0..4 {
            let mut targets = Vec::new();
            for &p in &plaquettes {
                let order = plan.orders.get(&p).copied().unwrap_or_else(|| p.standard_order());
                let corner = p.corners()[order[t]];
                if !plan.region.contains(corner) {
                    continue;
                }
                let (m, q) = (layout.measure(p), layout.data(corner));
                let noop = plan.omit_noop
                    && match (p.basis(), still_fresh.get(&q)) {
                        (Pauli::X, Some(Pauli::X)) | (Pauli::Z, Some(Pauli::Z)) => true,
                        _ => false,
                    };
                if noop {
                    continue;
                }
                if p.basis() == Pauli::X {
                    targets.push((m, q));
                    still_fresh.remove(&q);
                } else {
                    targets.push((q, m));
                    if still_fresh.get(&q) == Some(&Pauli::X) {
                        still_fresh.remove(&q);
                    }
                }
            }
            targets.sort_unstable();
            let cx = Instruction::new(Gate::Cx, targets.into_iter().flat_map(|(a, b)| [Target::Qubit(a), Target::Qubit(b)]));
            self.layer([cx]);
            if t == 1 {
                if let Some((p, gate)) = plan.hook {
                    self.layer([Instruction::on_qubits(gate, [layout.measure(p)])]);
                }
            }
        }

        let zq: Vec<u32> = zs.iter().map(|&p| layout.measure(p)).collect();
        let xq: Vec<u32> = xs.iter().map(|&p| layout.measure(p)).collect();
        let mut order: Vec<(u32, Plaquette)> = zs.iter().chain(&xs).map(|&p| (layout.measure(p), p)).collect();
        order.sort_unstable();
        let zrec = self.measure(Gate::M, &sorted(zq));
        let xrec = self.measure(Gate::Mx, &sorted(xq));
        let mut zi = zrec.into_iter();
        let mut xi = xrec.into_iter();
        let mut candidates = Vec::new();
        for (_, p) in order.iter().filter(|e| e.1.basis() == Pauli::Z).chain(order.iter().filter(|e| e.1.basis() == Pauli::X)) {
            let rec = if p.basis() == Pauli::Z { zi.next() } else { xi.next() }.unwrap();
            let previous = self.last.insert(*p, rec);
            candidates.push(Candidate { plaquette: *p, own: vec![rec], previous, postselected: plan.postselect.covers(*p) });
        }
        self.slots.push(Slot { after: self.body.len() - 1, measured: self.measured, round: index, candidates });
        self.body.tick();
        Ok(())
    }
}

fn layer_of(plan: &RoundPlan, p: Plaquette, corner: Point) -> Option<usize> {
    let order = plan.orders.get(&p).copied().unwrap_or_else(|| p.standard_order());
    let c = p.corners().iter().position(|&c| c == corner)?;
    order.iter().position(|&o| o == c)
}

/// Rejects schedules that touch a qubit twice in one layer, or that interleave an X
/// and a Z check so their measurements fail to commute.
fn check_schedule(plan: &RoundPlan, plaquettes: &[Plaquette]) -> Result<(), BuildError> {
    for order in plan.orders.values() {
        let mut seen = [false; 4];
        for &c in order {
            if c > 3 || std::mem::replace(&mut seen[c], true) {
                return Err(BuildError::Unsatisfiable(format!("{order:?} is not an ordering of the four corners")));
            }
        }
    }
    for (n, &p) in plaquettes.iter().enumerate() {
        for &q in &plaquettes[n + 1..] {
            let shared: Vec<Point> = p
                .corners()
                .into_iter()
                .filter(|c| q.corners().contains(c) && plan.region.contains(*c))
                .collect();
            let mut p_first = Vec::new();
            for &c in &shared {
                let (a, b) = (layer_of(plan, p, c), layer_of(plan, q, c));
                if a == b {
                    return Err(BuildError::Unsatisfiable(format!(
                        "checks {p:?} and {q:?} both touch data {c:?} in layer {}",
                        a.unwrap_or(0)
                    )));
                }
                p_first.push(a < b);
            }
            if p.basis() != q.basis() && p_first.windows(2).any(|w| w[0] != w[1]) {
                return Err(BuildError::Unsatisfiable(format!("checks {p:?} and {q:?} are interleaved")));
            }
        }
    }
    Ok(())
}

fn lookback(measured: usize, rec: usize) -> Target {
    Target::Rec((measured - rec) as u32)
}

fn form(parity: &[usize], records: &[Affine]) -> Affine {
    let mut form = records[parity[0]].clone();
    for &r in &parity[1..] {
        form.xor_with(&records[r]);
    }
    form
}

fn constant(parity: &[usize], records: &[Affine]) -> Option<Vec<usize>> {
    form(parity, records).is_constant().then(|| parity.to_vec())
}

/// Extends a parity by the earlier random records it depends on, when it depends on nothing else.
fn with_dependencies(parity: &[usize], records: &[Affine]) -> Option<Vec<usize>> {
    let vars: Vec<usize> = form(parity, records).vars.ones().collect();
    if vars.iter().all(|&v| v < records.len() && !parity.contains(&v)) {
        let mut out = parity.to_vec();
        out.extend(vars);
        Some(out)
    } else {
        None
    }
}

pub(crate) fn assemble(layout: &Layout, rounds: &[RoundPlan], readout: &Readout) -> Result<AnnotatedCircuit, BuildError> {
    let mut a = Assembler { layout, body: Circuit::new(), measured: 0, last: BTreeMap::new(), slots: Vec::new() };
    let used: BTreeSet<u32> = rounds
        .iter()
        .flat_map(|r| {
            let mut qs: Vec<u32> = r.region.data().into_iter().map(|p| layout.data(p)).collect();
            qs.extend(r.region.plaquettes().into_iter().map(|p| layout.measure(p)));
            qs
        })
        .collect();
    for (q, (x, y)) in layout.coords() {
        if used.contains(&q) {
            a.body.push(Instruction::on_qubits(Gate::QubitCoords, [q]).with_args([x, y]));
        }
    }
    for (index, plan) in rounds.iter().enumerate() {
        a.round(index, plan)?;
    }

    let last_region = rounds.last().ok_or_else(|| BuildError::InvalidSpec("no rounds".into()))?.region;
    let plaquettes = last_region.plaquettes();
    let final_round = rounds.len();
    let mut final_candidates = Vec::new();
    let logical_recs: Vec<usize>;
    match readout {
        Readout::Noiseless { logical } => {
            let mut products: Vec<Vec<(u32, Pauli)>> = plaquettes
                .iter()
                .map(|p| {
                    p.corners()
                        .iter()
                        .filter(|c| last_region.contains(**c))
                        .map(|&c| (layout.data(c), p.basis()))
                        .collect()
                })
                .collect();
            products.push(logical.iter().map(|&(c, b)| (layout.data(c), b)).collect());
            let targets = split_products(&products);
            a.body.push(Instruction::new(Gate::Mpp, targets));
            let start = a.measured;
            a.measured += products.len();
            for (n, p) in plaquettes.iter().enumerate() {
                let previous = a.last.get(p).copied();
                final_candidates.push(Candidate { plaquette: *p, own: vec![start + n], previous, postselected: false });
            }
            logical_recs = vec![start + plaquettes.len()];
        }
        Readout::Data { basis, logical } => {
            let data: Vec<Point> = {
                let mut d = last_region.data();
                d.sort_by_key(|&p| layout.data(p));
                d
            };
            let gate = if *basis == Pauli::X { Gate::Mx } else { Gate::M };
            let qubits: Vec<u32> = data.iter().map(|&p| layout.data(p)).collect();
            let recs = a.measure(gate, &qubits);
            let rec_of: BTreeMap<Point, usize> = data.iter().copied().zip(recs).collect();
            for p in plaquettes.iter().filter(|p| p.basis() == *basis) {
                let own: Vec<usize> = p.corners().iter().filter_map(|c| rec_of.get(c).copied()).collect();
                let previous = a.last.get(p).copied();
                final_candidates.push(Candidate { plaquette: *p, own, previous, postselected: false });
            }
            logical_recs = logical.iter().map(|p| rec_of[p]).collect();
        }
    }
    a.slots.push(Slot { after: a.body.len() - 1, measured: a.measured, round: final_round, candidates: final_candidates });

    let run = run_symbolic(&a.body);
    let records = &run.records;

    let mut detectors_after: BTreeMap<usize, Vec<Instruction>> = BTreeMap::new();
    let mut postselected = Vec::new();
    let mut num_detectors = 0;
    for slot in &a.slots {
        let entry = detectors_after.entry(slot.after).or_default();
        for c in &slot.candidates {
            let Some(parity) = detector_parity(c, records) else { continue };
            let (x, y) = c.plaquette.center();
            let targets = parity.iter().map(|&r| lookback(slot.measured, r));
            let flag = if c.postselected { 1.0 } else { 0.0 };
            entry.push(Instruction::new(Gate::Detector, targets).with_args([x, y, slot.round as f64, flag]));
            if c.postselected {
                postselected.push(num_detectors);
            }
            num_detectors += 1;
        }
    }

    let logical = constant(&logical_recs, records)
        .or_else(|| with_dependencies(&logical_recs, records))
        .ok_or_else(|| BuildError::Unsatisfiable("the logical observable is not deterministic".into()))?;

    let mut circuit = Circuit::new();
    for (index, inst) in a.body.instructions.into_iter().enumerate() {
        circuit.push(inst);
        if let Some(dets) = detectors_after.remove(&index) {
            for d in dets {
                circuit.push(d);
            }
        }
    }
    let measured = a.measured;
    circuit.push(
        Instruction::new(Gate::ObservableInclude, logical.iter().map(|&r| lookback(measured, r))).with_args([0.0]),
    );
    Ok(AnnotatedCircuit { circuit, postselected, observable: 0 })
}

fn detector_parity(c: &Candidate, records: &[Affine]) -> Option<Vec<usize>> {
    let mut with_previous = c.own.clone();
    with_previous.extend(c.previous);
    constant(&with_previous, records)
        .or_else(|| constant(&c.own, records))
        .or_else(|| with_dependencies(&c.own, records))
}

fn split_products(products: &[Vec<(u32, Pauli)>]) -> Vec<Target> {
    let mut targets = Vec::new();
    for product in products {
        for (n, &(q, b)) in product.iter().enumerate() {
            if n > 0 {
                targets.push(Target::Combiner);
            }
            targets.push(Target::Pauli(q, b));
        }
    }
    targets
}
