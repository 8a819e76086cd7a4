use proptest::prelude::*;

use hookinj::circuit::{apply_noise, transpile_to_cz, Circuit, Clifford1, Gate, Instruction, NoiseParams, Pauli, Target};
use hookinj::decode::{build_graph, MwpmDecoder};
use hookinj::dem::{find_distance1, find_distance2, DetectorErrorModel, ErrorMechanism, Provenance, Term};
use hookinj::harness::{deadline_success, likelihood_interval, pareto_frontier, CostPoint};
use hookinj::sim::{compute_reference, frame_sample};

#[derive(Clone, Copy, Debug)]
enum Op {
    One(u32, usize),
    Cx(u32, u32),
    Cz(u32, u32),
}

fn op(n: u32) -> impl Strategy<Value = Op> {
    let pair = (0..n, 1..n).prop_map(move |(a, k)| (a, (a + k) % n));
    prop_oneof![
        (0..n, 0..24usize).prop_map(|(q, g)| Op::One(q, g)),
        pair.clone().prop_map(|(a, b)| Op::Cx(a, b)),
        pair.prop_map(|(a, b)| Op::Cz(a, b)),
    ]
}

fn push(c: &mut Circuit, op: Op, inverse: bool) {
    match op {
        Op::One(q, g) => {
            let gate = Clifford1::ALL[g];
            c.gate(Gate::C1(if inverse { gate.inverse() } else { gate }), [q]);
        }
        Op::Cx(a, b) => c.gate(Gate::Cx, [a, b]),
        Op::Cz(a, b) => c.gate(Gate::Cz, [a, b]),
    }
    c.tick();
}

/// `U` followed by `U⁻¹` between a reset and a measurement: every record is a deterministic 0.
fn echo(n: u32, ops: &[Op]) -> Circuit {
    let mut c = Circuit::new();
    c.gate(Gate::R, 0..n);
    c.tick();
    for &o in ops {
        push(&mut c, o, false);
    }
    for &o in ops.iter().rev() {
        push(&mut c, o, true);
    }
    c.gate(Gate::M, 0..n);
    for k in 1..=n {
        c.push(Instruction::new(Gate::Detector, [Target::Rec(k)]));
    }
    c.push(Instruction::new(Gate::ObservableInclude, [Target::Rec(1)]).with_args([0.0]));
    c
}

fn circuit_case() -> impl Strategy<Value = (u32, Vec<Op>)> {
    (2u32..6).prop_flat_map(|n| (Just(n), prop::collection::vec(op(n), 0..24)))
}

fn provenance(k: usize, probability: f64) -> Provenance {
    Provenance {
        instruction: k,
        layer: k,
        channel: Gate::Depolarize1,
        qubits: vec![k as u32],
        term: Term::One(Pauli::X),
        probability,
    }
}

fn mechanisms() -> impl Strategy<Value = Vec<(Vec<u32>, u64, f64)>> {
    prop::collection::vec(
        (prop::collection::btree_set(0u32..6, 0..3), 0u64..2, 0.001f64..0.1)
            .prop_map(|(d, o, p)| (d.into_iter().collect(), o, p)),
        1..14,
    )
}

fn model(entries: &[(usize, &(Vec<u32>, u64, f64))]) -> DetectorErrorModel {
    let mut dem = DetectorErrorModel::new(6, 1);
    for &(k, (dets, obs, p)) in entries {
        let mut m = ErrorMechanism::new(*p, dets.clone(), *obs);
        m.provenance.push(provenance(k, *p));
        dem.add(m);
    }
    dem
}

fn graphlike() -> impl Strategy<Value = DetectorErrorModel> {
    prop::collection::vec((0u32..6, prop::option::of(0u32..6), 0u64..2, 0.01f64..0.3), 1..12).prop_map(|list| {
        let mut dem = DetectorErrorModel::new(6, 1);
        for (a, b, obs, p) in list {
            let dets = match b {
                Some(b) if b != a => vec![a.min(b), a.max(b)],
                _ => vec![a],
            };
            dem.add(ErrorMechanism::new(p, dets, obs));
        }
        dem
    })
}

fn cost_point(cost: f64, rate: f64) -> CostPoint {
    CostPoint {
        protocol: "hook".into(),
        state: "i".into(),
        r_inject: 2,
        d_inject: 5,
        expected_cost: cost,
        error_rate: rate,
        err_lo: rate,
        err_hi: rate,
        discard_rate: 0.5,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_round_trips((n, ops) in circuit_case(), p in 0.0f64..0.5) {
        let mut c = echo(n, &ops);
        c.push(Instruction::on_qubits(Gate::Depolarize2, [0, 1]).with_args([p]));
        c.push(Instruction::on_qubits(Gate::Mx, [0]).with_args([p]));
        let parsed: Circuit = c.to_string().parse().unwrap();
        prop_assert_eq!(parsed, c);
    }

    #[test]
    fn noise_removal_recovers_the_input((n, ops) in circuit_case(), p in 0.0f64..0.05) {
        let clean = transpile_to_cz(&echo(n, &ops)).unwrap();
        let noisy = apply_noise(&clean, NoiseParams::si1000(p)).unwrap();
        prop_assert_eq!(noisy.without_noise(), clean);
    }

    #[test]
    fn two_qubit_noise_sums_to_cz_count_times_p((n, ops) in circuit_case(), p in 0.0001f64..0.05) {
        let clean = transpile_to_cz(&echo(n, &ops)).unwrap();
        let noisy = apply_noise(&clean, NoiseParams::si1000(p)).unwrap();
        let cz_pairs: usize = clean.instructions.iter().filter(|i| i.gate == Gate::Cz).map(|i| i.targets.len() / 2).sum();
        let total: f64 = noisy
            .instructions
            .iter()
            .filter(|i| i.gate == Gate::Depolarize2)
            .map(|i| i.args[0] * (i.targets.len() / 2) as f64)
            .sum();
        prop_assert!((total - cz_pairs as f64 * p).abs() < 1e-12);
    }

    #[test]
    fn transpiling_preserves_determinism((n, ops) in circuit_case()) {
        let c = echo(n, &ops);
        let before = compute_reference(&c).unwrap();
        let after = compute_reference(&transpile_to_cz(&c).unwrap()).unwrap();
        prop_assert_eq!(before.detectors, after.detectors);
        prop_assert_eq!(before.observables, after.observables);
    }

    #[test]
    fn frame_flips_compose_linearly(
        (n, ops) in circuit_case(),
        first in prop::collection::vec((0usize..64, 0u32..6, any::<bool>()), 1..4),
        second in prop::collection::vec((0usize..64, 0u32..6, any::<bool>()), 1..4),
    ) {
        let base = echo(n, &ops);
        let frame = compute_reference(&base).unwrap();
        let measure_at = base.instructions.iter().position(|i| i.gate == Gate::M).unwrap();
        let flipped = |errors: &[(usize, u32, bool)]| {
            let mut c = base.clone();
            let mut sorted: Vec<(usize, u32, bool)> = errors.iter().map(|&(at, q, x)| (1 + at % measure_at, q, x)).collect();
            sorted.sort_by(|a, b| b.0.cmp(&a.0));
            for (at, q, x) in sorted {
                let gate = if x { Gate::XError } else { Gate::ZError };
                c.instructions.insert(at, Instruction::on_qubits(gate, [q % n]).with_args([1.0]));
            }
            let batch = frame_sample(&c, &frame, 64, 1).unwrap();
            (batch.detectors(0).to_vec(), batch.observables(0).to_vec())
        };
        let both: Vec<_> = first.iter().chain(&second).copied().collect();
        let (da, oa) = flipped(&first);
        let (db, ob) = flipped(&second);
        let (dc, oc) = flipped(&both);
        let xor = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x ^ y).collect::<Vec<_>>();
        prop_assert_eq!(dc, xor(&da, &db));
        prop_assert_eq!(oc, xor(&oa, &ob));
    }

    #[test]
    fn census_ignores_insertion_order(list in mechanisms(), seed in any::<u64>()) {
        let entries: Vec<(usize, &(Vec<u32>, u64, f64))> = list.iter().enumerate().collect();
        let mut shuffled = entries.clone();
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let (a, b) = (model(&entries), model(&shuffled));
        let key = |dem: &DetectorErrorModel| {
            let mut v: Vec<usize> = find_distance1(dem, &[]).iter().map(|d| d.provenance.instruction).collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&a), key(&b));
        let (ra, rb) = (find_distance2(&a, &[], 0.01), find_distance2(&b, &[], 0.01));
        prop_assert_eq!(ra.pairs, rb.pairs);
        prop_assert_eq!(ra.participating, rb.participating);
        prop_assert!((ra.c2 - rb.c2).abs() <= 1e-9 * ra.c2.abs().max(1.0));
    }

    #[test]
    fn empty_syndrome_never_flips(dem in graphlike()) {
        let decoder = MwpmDecoder::new(build_graph(&dem, &[]).unwrap());
        prop_assert_eq!(decoder.decode(&[]), 0);
    }

    #[test]
    fn scaling_weights_keeps_predictions(dem in graphlike(), factor in 0.1f64..10.0, fired in prop::collection::btree_set(0u32..6, 0..6)) {
        let graph = build_graph(&dem, &[]).unwrap();
        let mut scaled = graph.clone();
        scaled.scale_weights(factor);
        let syndrome: Vec<u32> = fired.into_iter().collect();
        let reachable = syndrome.iter().all(|&d| !graph.neighbours(d).is_empty());
        prop_assume!(reachable);
        prop_assert_eq!(MwpmDecoder::new(graph).decode(&syndrome), MwpmDecoder::new(scaled).decode(&syndrome));
    }

    #[test]
    fn likelihood_interval_contains_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as u64;
        let (lo, hi) = likelihood_interval(k, n, 1000.0).unwrap();
        let mle = k as f64 / n as f64;
        prop_assert!(lo <= mle + 1e-12 && mle <= hi + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
    }

    #[test]
    fn frontier_is_monotone_and_undominated(points in prop::collection::vec((1.0f64..1e4, 1e-6f64..1e-1), 1..30)) {
        let points: Vec<CostPoint> = points.into_iter().map(|(c, r)| cost_point(c, r)).collect();
        let front = pareto_frontier(&points);
        prop_assert!(!front.is_empty());
        for w in front.windows(2) {
            prop_assert!(w[0].expected_cost <= w[1].expected_cost);
            prop_assert!(w[0].error_rate >= w[1].error_rate);
        }
        for f in &front {
            let dominated = points.iter().any(|q| {
                q.expected_cost <= f.expected_cost && q.error_rate <= f.error_rate
                    && (q.expected_cost < f.expected_cost || q.error_rate < f.error_rate)
            });
            prop_assert!(!dominated);
        }
        for p in &points {
            let covered = front.iter().any(|f| f.expected_cost <= p.expected_cost && f.error_rate <= p.error_rate);
            prop_assert!(covered);
        }
    }

    #[test]
    fn deadline_success_is_monotone(cost in 1.0f64..1e5, budget in 0.0f64..1e6, extra in 0.0f64..1e5) {
        let base = deadline_success(cost, budget).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(deadline_success(cost, budget + extra).unwrap() >= base);
        prop_assert!(deadline_success(cost + extra, budget).unwrap() <= base);
    }
}
