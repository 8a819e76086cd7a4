use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hookinj::builders::{build_memory, InjectionSpec, Protocol, State};
use hookinj::circuit::{apply_noise, transpile_to_cz, Circuit, NoiseParams, Pauli};
use hookinj::dem::{extract_dem, xor_probability};
use hookinj::harness::noisy_circuit;
use hookinj::sim::{compute_reference, detection_events, frame_sample, frame_sample_with_threads, tableau_run_with};

fn noisy_memory(d: usize, rounds: usize, p: f64) -> Circuit {
    let built = build_memory(d, rounds, Pauli::Z).unwrap();
    apply_noise(&transpile_to_cz(&built.circuit).unwrap(), NoiseParams::si1000(p)).unwrap()
}

/// Largest per-detector z-score between two samples of firing counts.
fn worst_z(a: &[u64], na: usize, b: &[u64], nb: usize) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| **x + **y > 0)
        .map(|(&x, &y)| {
            let (ra, rb) = (x as f64 / na as f64, y as f64 / nb as f64);
            let pooled = (x + y) as f64 / (na + nb) as f64;
            let sd = (pooled * (1.0 - pooled) * (1.0 / na as f64 + 1.0 / nb as f64)).sqrt();
            (ra - rb).abs() / sd
        })
        .fold(0.0, f64::max)
}

#[test]
fn frame_and_tableau_fire_detectors_at_the_same_rates() {
    let circuits = [
        noisy_memory(3, 3, 0.01),
        noisy_circuit(&InjectionSpec::new(Protocol::Hook, 3, 2, 3, 1, State::I), 0.01).unwrap().circuit,
        noisy_circuit(&InjectionSpec::new(Protocol::ZzTweaked, 3, 1, 3, 1, State::Plus), 0.01).unwrap().circuit,
    ];
    for circuit in circuits {
        let frame = compute_reference(&circuit.without_noise()).unwrap();
        let shots = 20_000;
        let framed = frame_sample(&circuit, &frame, shots, 5).unwrap().detector_counts();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut tableau = vec![0u64; circuit.num_detectors()];
        for _ in 0..shots {
            let (det, _) = detection_events(&tableau_run_with(&circuit, &mut rng).unwrap(), &frame);
            tableau.iter_mut().zip(det).for_each(|(c, f)| *c += u64::from(f));
        }
        let z = worst_z(&framed, shots, &tableau, shots);
        assert!(z < 5.0, "worst detector differs by {z:.1} sigma");
    }
}

#[test]
fn detector_marginals_match_the_error_model() {
    let circuit = noisy_memory(3, 3, 0.005);
    let dem = extract_dem(&circuit).unwrap();
    let mut predicted = vec![0.0; dem.num_detectors];
    for m in &dem.mechanisms {
        for &d in &m.detectors {
            predicted[d as usize] = xor_probability(predicted[d as usize], m.probability);
        }
    }
    let shots = 100_000;
    let frame = compute_reference(&circuit.without_noise()).unwrap();
    let counts = frame_sample(&circuit, &frame, shots, 11).unwrap().detector_counts();
    for (d, (&count, &p)) in counts.iter().zip(&predicted).enumerate() {
        let sd = (p * (1.0 - p) / shots as f64).sqrt();
        let rate = count as f64 / shots as f64;
        assert!((rate - p).abs() < 5.0 * sd + 1e-9, "detector {d}: sampled {rate}, model {p}");
    }
}

#[test]
fn observable_flip_rate_matches_the_error_model() {
    let circuit = noisy_memory(3, 2, 0.01);
    let dem = extract_dem(&circuit).unwrap();
    let predicted = dem.mechanisms.iter().filter(|m| m.observables & 1 == 1).fold(0.0, |acc, m| xor_probability(acc, m.probability));
    let shots = 100_000;
    let frame = compute_reference(&circuit.without_noise()).unwrap();
    let flips = frame_sample(&circuit, &frame, shots, 12).unwrap().observable_counts()[0];
    let sd = (predicted * (1.0 - predicted) / shots as f64).sqrt();
    assert!((flips as f64 / shots as f64 - predicted).abs() < 5.0 * sd);
}

#[test]
fn zero_noise_gives_all_zero_batches() {
    for protocol in [Protocol::Hook, Protocol::HookPregrown, Protocol::Li, Protocol::Zz, Protocol::ZzTweaked] {
        let circuit = noisy_circuit(&InjectionSpec::new(protocol, 3, 2, 5, 2, State::I), 0.0).unwrap().circuit;
        let frame = compute_reference(&circuit).unwrap();
        assert!(frame_sample(&circuit, &frame, 1000, 3).unwrap().is_all_zero(), "{protocol:?}");
    }
}

#[test]
fn sampling_does_not_depend_on_thread_count() {
    let circuit = noisy_memory(5, 3, 0.003);
    let frame = compute_reference(&circuit.without_noise()).unwrap();
    let one = frame_sample_with_threads(&circuit, &frame, 5000, 9, 1).unwrap();
    let three = frame_sample_with_threads(&circuit, &frame, 5000, 9, 3).unwrap();
    assert_eq!(one, three);
}
