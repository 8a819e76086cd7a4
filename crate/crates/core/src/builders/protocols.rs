use crate::circuit::{Gate, Instruction, Pauli};

use super::assemble::{assemble, Postselect, Readout, RoundPlan};
use std::collections::BTreeMap;

use super::layout::{Layout, Plaquette, Point, Region, NE, NW, SE, SW, X_ORDER, Z_ORDER};
use super::{AnnotatedCircuit, BuildError, FinalCheck, InjectionSpec, Protocol, State};

/// First-round schedule of the hook construction. The bulk of the injection region
/// runs both check types in the vertically mirrored order, the checks around the
/// injection site get individual orders, and the four data qubits of the site start
/// in `|+>`. Later rounds use the standard orders.
pub const HOOK_SCHEDULE: HookSchedule = HookSchedule {
    first: ([SW, NW, SE, NE], [SW, SE, NW, NE]),
    local: [
        Some([SW, SE, NW, NE]),
        Some([SW, NW, SE, NE]),
        Some([NW, SW, NE, SE]),
        Some([SW, NW, SE, NE]),
        Some([SE, SW, NW, NE]),
        None,
        None,
        Some([SW, NE, SE, NW]),
        None,
    ],
    later: (X_ORDER, Z_ORDER),
    seed_plus: 0b1111,
};

/// Initialization basis of data qubit `p`: X on and above the diagonal through the
/// bottom-right corner, Z below it.
fn diagonal_basis(p: Point) -> Pauli {
    if p.1 - p.0 <= 0 {
        Pauli::X
    } else {
        Pauli::Z
    }
}

struct Geometry {
    layout: Layout,
    d: i32,
    inject: Region,
    full: Region,
    site: Plaquette,
}

impl Geometry {
    fn new(d: usize, d_inject: usize) -> Self {
        let d = d as i32;
        let k = (d_inject as i32).min(d);
        Geometry {
            layout: Layout::new(d as usize),
            d,
            inject: Region { x0: d - k, y0: d - k, k },
            full: Region { x0: 0, y0: 0, k: d },
            site: Plaquette { i: d - 1, j: d - 1 },
        }
    }

    fn apply_local(&self, plan: &mut RoundPlan, local: &[Option<[usize; 4]>; 9]) {
        for (n, order) in local.iter().enumerate() {
            let p = Plaquette { i: self.site.i + n as i32 % 3 - 1, j: self.site.j + n as i32 / 3 - 1 };
            if let (Some(order), true) = (order, plan.orders.contains_key(&p)) {
                plan.orders.insert(p, *order);
            }
        }
    }

    fn corner(&self, c: usize) -> Point {
        self.site.corners()[c]
    }

    fn data(&self, c: usize) -> u32 {
        self.layout.data(self.corner(c))
    }

    fn fresh(&self, region: Region, except: Option<Region>, basis: impl Fn(Point) -> Pauli) -> Vec<(Point, Pauli)> {
        region
            .data()
            .into_iter()
            .filter(|&p| !except.is_some_and(|e| e.contains(p)))
            .map(|p| (p, basis(p)))
            .collect()
    }

    fn readout(&self, spec: &InjectionSpec) -> Readout {
        let column = self.full.x_logical();
        match (spec.final_check, spec.state) {
            (FinalCheck::TransversalX, _) => Readout::Data { basis: Pauli::X, logical: column },
            (FinalCheck::NoiselessStabilizer, State::Plus) => {
                Readout::Noiseless { logical: column.into_iter().map(|p| (p, Pauli::X)).collect() }
            }
            (FinalCheck::NoiselessStabilizer, State::I) => {
                let corner = (self.d - 1, self.d - 1);
                let mut logical: Vec<(Point, Pauli)> =
                    column.into_iter().filter(|&p| p != corner).map(|p| (p, Pauli::X)).collect();
                logical.extend(self.full.z_logical().into_iter().filter(|&p| p != corner).map(|p| (p, Pauli::Z)));
                logical.push((corner, Pauli::Y));
                Readout::Noiseless { logical }
            }
        }
    }

    /// The postselected rounds at distance `d_inject`, growth to `d`, and the hold rounds.
    fn standard_rounds(&self, spec: &InjectionSpec, mut first: RoundPlan, omit_noop: bool) -> Vec<RoundPlan> {
        first.postselect = Postselect::All;
        let mut rounds = vec![first];
        for _ in 1..spec.r_inject {
            let mut r = RoundPlan::plain(self.inject);
            r.postselect = Postselect::All;
            rounds.push(r);
        }
        let mut grow = RoundPlan::plain(self.full);
        grow.fresh = self.fresh(self.full, Some(self.inject), diagonal_basis);
        grow.omit_noop = omit_noop;
        rounds.push(grow);
        for _ in 0..spec.r_hold {
            rounds.push(RoundPlan::plain(self.full));
        }
        rounds
    }
}

fn rotation(state: State) -> Gate {
    match state {
        State::I => Gate::S,
        State::Plus => Gate::I,
    }
}

pub(crate) fn validate_spec(spec: &InjectionSpec) -> Result<(), BuildError> {
    let bad = |m: String| Err(BuildError::InvalidSpec(m));
    let max_inject = if spec.protocol == Protocol::HookPregrown { 2 * spec.d - 1 } else { spec.d };
    if spec.d < 2 {
        return bad(format!("d={} must be at least 2", spec.d));
    }
    if spec.d_inject < 2 || spec.d_inject > max_inject {
        return bad(format!("d_inject={} must lie in 2..={max_inject}", spec.d_inject));
    }
    if spec.r_inject < 1 {
        return bad("r_inject must be at least 1".into());
    }
    if spec.final_check == FinalCheck::TransversalX && spec.state != State::Plus {
        return bad("transversal X readout only checks |+>".into());
    }
    Ok(())
}

/// Two-qubit layer orders used by the hook construction, as corner indices per layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HookSchedule {
    /// X and Z check orders in the first round.
    pub first: ([usize; 4], [usize; 4]),
    /// First-round overrides for the 3x3 block of checks centred on the injection
    /// check, row by row from the top-left.
    pub local: [Option<[usize; 4]>; 9],
    /// X and Z check orders in the later postselected rounds.
    pub later: ([usize; 4], [usize; 4]),
    /// Bit `k` set means site corner `k` (NW, NE, SW, SE) starts in `|+>`.
    pub seed_plus: u8,
}

impl HookSchedule {
    fn basis(&self, site: Plaquette, p: Point) -> Pauli {
        match site.corners().iter().position(|&c| c == p) {
            Some(k) if self.seed_plus >> k & 1 == 1 => Pauli::X,
            Some(_) => Pauli::Z,
            None => diagonal_basis(p),
        }
    }
}

fn uniform(region: Region, (x, z): ([usize; 4], [usize; 4])) -> BTreeMap<Plaquette, [usize; 4]> {
    region.plaquettes().into_iter().map(|p| (p, if p.basis() == Pauli::X { x } else { z })).collect()
}

pub fn build_hook_with(spec: &InjectionSpec, schedule: &HookSchedule) -> Result<AnnotatedCircuit, BuildError> {
    validate_spec(spec)?;
    let g = Geometry::new(spec.d, spec.d_inject);
    let mut first = RoundPlan::plain(g.inject);
    first.fresh = g.fresh(g.inject, None, |p| schedule.basis(g.site, p));
    first.orders = uniform(g.inject, schedule.first);
    g.apply_local(&mut first, &schedule.local);
    first.hook = Some((g.site, rotation(spec.state)));
    first.omit_noop = true;
    let mut rounds = g.standard_rounds(spec, first, true);
    for r in &mut rounds[1..spec.r_inject] {
        r.orders = uniform(g.inject, schedule.later);
    }
    assemble(&g.layout, &rounds, &g.readout(spec))
}

pub fn build_hook(spec: &InjectionSpec) -> Result<AnnotatedCircuit, BuildError> {
    build_hook_with(spec, &HOOK_SCHEDULE)
}

pub fn build_hook_pregrown(spec: &InjectionSpec) -> Result<AnnotatedCircuit, BuildError> {
    validate_spec(spec)?;
    let g = Geometry::new(spec.d, spec.d);
    let region = Postselect::Within { center: g.site.center(), radius: spec.d_inject as f64 / 2.0 };
    let mut rounds = Vec::new();
    for r in 0..spec.r_inject {
        let mut plan = RoundPlan::plain(g.full);
        if r == 0 {
            plan.fresh = g.fresh(g.full, None, |p| HOOK_SCHEDULE.basis(g.site, p));
            plan.orders = uniform(g.full, HOOK_SCHEDULE.first);
            g.apply_local(&mut plan, &HOOK_SCHEDULE.local);
            plan.hook = Some((g.site, rotation(spec.state)));
            plan.omit_noop = true;
        }
        plan.postselect = region.clone();
        rounds.push(plan);
    }
    for _ in 0..=spec.r_hold {
        rounds.push(RoundPlan::plain(g.full));
    }
    assemble(&g.layout, &rounds, &g.readout(spec))
}

pub fn build_li(spec: &InjectionSpec) -> Result<AnnotatedCircuit, BuildError> {
    validate_spec(spec)?;
    let g = Geometry::new(spec.d, spec.d_inject);
    let seed = g.corner(SE);
    let mut first = RoundPlan::plain(g.inject);
    first.fresh = g.fresh(g.inject, None, |p| if p == seed { Pauli::Z } else { diagonal_basis(p) });
    let q = g.data(SE);
    first.prep = vec![vec![Instruction::on_qubits(Gate::H, [q])], vec![Instruction::on_qubits(rotation(spec.state), [q])]];
    let rounds = g.standard_rounds(spec, first, false);
    assemble(&g.layout, &rounds, &g.readout(spec))
}

/// `ZZ^(1/2)` on the bottom pair of the seed block, up to single-qubit phases: `S_DAG ⊗ S_DAG` then `CZ`.
fn zz_rotation(g: &Geometry, state: State) -> Vec<Vec<Instruction>> {
    let pair = [g.data(SW), g.data(SE)];
    match state {
        State::Plus => Vec::new(),
        State::I => vec![
            vec![Instruction::on_qubits(Gate::S_DAG, pair)],
            vec![Instruction::on_qubits(Gate::Cz, pair)],
        ],
    }
}

pub fn build_zz(spec: &InjectionSpec, tweaked: bool) -> Result<AnnotatedCircuit, BuildError> {
    validate_spec(spec)?;
    let g = Geometry::new(spec.d, spec.d_inject);
    let seed: Vec<Point> = [NW, NE, SW, SE].iter().map(|&c| g.corner(c)).collect();
    let bottom = g.d - 1;
    let basis = |p: Point| -> Pauli {
        if seed.contains(&p) {
            Pauli::X
        } else if tweaked {
            diagonal_basis(p)
        } else if p.1 == bottom {
            Pauli::Z
        } else {
            Pauli::X
        }
    };
    let mut first = RoundPlan::plain(g.inject);
    first.fresh = g.fresh(g.inject, None, basis);
    first.prep = zz_rotation(&g, spec.state);
    first.omit_noop = tweaked;
    let rounds = g.standard_rounds(spec, first, tweaked);
    assemble(&g.layout, &rounds, &g.readout(spec))
}

/// A plain memory experiment: `rounds` rounds of a distance-`d` patch prepared and
/// read out in `basis`.
pub fn build_memory(d: usize, rounds: usize, basis: Pauli) -> Result<AnnotatedCircuit, BuildError> {
    if d < 2 || rounds < 1 || basis == Pauli::Y {
        return Err(BuildError::InvalidSpec(format!("memory needs d >= 2, rounds >= 1 and basis X or Z (got d={d}, rounds={rounds}, {basis:?})")));
    }
    let layout = Layout::new(d);
    let full = layout.full();
    let mut plans = Vec::new();
    for r in 0..rounds {
        let mut plan = RoundPlan::plain(full);
        if r == 0 {
            plan.fresh = full.data().into_iter().map(|p| (p, basis)).collect();
        }
        plans.push(plan);
    }
    let logical = if basis == Pauli::X { full.x_logical() } else { full.z_logical() };
    assemble(&layout, &plans, &Readout::Data { basis, logical })
}
