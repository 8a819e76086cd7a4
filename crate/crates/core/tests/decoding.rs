use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hookinj::builders::{build_memory, InjectionSpec, Protocol, State};
use hookinj::circuit::{apply_noise, transpile_to_cz, NoiseParams, Pauli};
use hookinj::decode::{build_graph, decode_ml_bruteforce, MwpmDecoder};
use hookinj::dem::{extract_dem, DetectorErrorModel, ErrorMechanism};
use hookinj::harness::noisy_circuit;

fn random_dem(rng: &mut ChaCha8Rng) -> DetectorErrorModel {
    let detectors = rng.random_range(1..=8u32);
    let mut dem = DetectorErrorModel::new(detectors as usize, 1);
    for _ in 0..rng.random_range(1..=12) {
        let a = rng.random_range(0..detectors);
        let b = rng.random_range(0..detectors);
        let dets = if a == b || rng.random_bool(0.3) { vec![a] } else { vec![a.min(b), a.max(b)] };
        dem.add(ErrorMechanism::new(rng.random_range(0.01..0.25), dets, u64::from(rng.random_bool(0.4))));
    }
    dem
}

/// Probability of every `(syndrome, observable)` outcome, by enumerating error subsets.
fn outcome_table(dem: &DetectorErrorModel) -> BTreeMap<u64, [f64; 2]> {
    let mut table: BTreeMap<u64, [f64; 2]> = BTreeMap::new();
    for subset in 0u32..1 << dem.mechanisms.len() {
        let (mut syndrome, mut obs, mut prob) = (0u64, 0usize, 1.0);
        for (i, m) in dem.mechanisms.iter().enumerate() {
            if subset >> i & 1 == 1 {
                syndrome ^= m.detectors.iter().fold(0, |acc, &d| acc ^ 1u64 << d);
                obs ^= m.observables as usize;
                prob *= m.probability;
            } else {
                prob *= 1.0 - m.probability;
            }
        }
        table.entry(syndrome).or_default()[obs] += prob;
    }
    table
}

fn fired(syndrome: u64) -> Vec<u32> {
    (0..64).filter(|d| syndrome >> d & 1 == 1).collect()
}

#[test]
fn brute_force_picks_the_likelier_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let dem = random_dem(&mut rng);
        for (syndrome, probs) in outcome_table(&dem) {
            let guess = decode_ml_bruteforce(&dem, &fired(syndrome)).unwrap();
            let expected = u64::from(probs[1] > probs[0]);
            assert_eq!(guess, expected, "syndrome {syndrome:b}: {probs:?}");
        }
    }
}

#[test]
fn matching_is_close_to_maximum_likelihood_on_small_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut mwpm_total, mut ml_total) = (0.0, 0.0);
    for _ in 0..500 {
        let dem = random_dem(&mut rng);
        let decoder = MwpmDecoder::new(build_graph(&dem, &[]).unwrap());
        assert_eq!(decoder.decode(&[]), 0);
        let (mut mwpm, mut ml) = (0.0, 0.0);
        for (syndrome, probs) in outcome_table(&dem) {
            let s = fired(syndrome);
            mwpm += probs[1 - (decoder.decode(&s) & 1) as usize];
            ml += probs[1 - decode_ml_bruteforce(&dem, &s).unwrap() as usize];
        }
        assert!(mwpm <= ml + 0.05, "mwpm {mwpm} vs ml {ml}");
        mwpm_total += mwpm;
        ml_total += ml;
    }
    assert!(mwpm_total >= ml_total - 1e-9);
}

#[test]
fn every_single_error_of_a_memory_experiment_is_corrected() {
    for d in [3, 5] {
        let built = build_memory(d, d, Pauli::Z).unwrap();
        let noisy = apply_noise(&transpile_to_cz(&built.circuit).unwrap(), NoiseParams::si1000(0.001)).unwrap();
        let dem = extract_dem(&noisy).unwrap();
        let decoder = MwpmDecoder::new(build_graph(&dem, &[]).unwrap());
        for m in &dem.mechanisms {
            assert_eq!(decoder.decode(&m.detectors), m.observables, "d={d} mechanism {:?}", m.detectors);
        }
    }
}

#[test]
fn injection_mechanisms_are_decoded_except_the_undetectable_ones() {
    let annotated = noisy_circuit(&InjectionSpec::new(Protocol::Hook, 5, 2, 7, 7, State::I), 0.001).unwrap();
    let dem = extract_dem(&annotated.circuit).unwrap();
    let decoder = MwpmDecoder::new(build_graph(&dem, &annotated.postselected).unwrap());
    let post: std::collections::BTreeSet<u32> = annotated.postselected.iter().map(|&d| d as u32).collect();
    let mut wrong = 0;
    for m in dem.mechanisms.iter().filter(|m| !m.detectors.iter().any(|d| post.contains(d))) {
        let predicted = decoder.decode(&m.detectors) >> annotated.observable & 1;
        if predicted != m.observables >> annotated.observable & 1 {
            assert!(m.detectors.is_empty(), "visible mechanism {:?} is miscorrected", m.detectors);
            wrong += 1;
        }
    }
    assert_eq!(wrong, 1);
}
