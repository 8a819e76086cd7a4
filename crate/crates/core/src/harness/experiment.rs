use rayon::prelude::*;

use crate::bits::BitVec;
use crate::builders::InjectionSpec;
use crate::decode::{build_graph, MwpmDecoder};
use crate::dem::extract_dem;
use crate::sim::{compute_reference, FrameSampler, SHOTS_PER_CHUNK};

use super::stats::TrialStats;
use super::{noisy_circuit, HarnessError};

/// Shots sampled between two checks of the stop rule.
pub const BATCH_SHOTS: usize = 1 << 16;

/// When to stop sampling: after `max_shots` shots or once `max_errors` undiscarded
/// logical errors were seen, whichever comes first. The rule is checked between
/// batches of [`BATCH_SHOTS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_shots: u64,
    pub max_errors: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_shots: 1_000_000, max_errors: 1000 }
    }
}

/// A noisy protocol circuit ready for repeated sampling and decoding.
pub struct Experiment {
    pub spec: InjectionSpec,
    pub p: f64,
    sampler: FrameSampler,
    decoder: MwpmDecoder,
    postselected: BitVec,
    observable: usize,
}

impl Experiment {
    pub fn new(spec: &InjectionSpec, p: f64) -> Result<Self, HarnessError> {
        let annotated = noisy_circuit(spec, p)?;
        let frame = compute_reference(&annotated.circuit.without_noise())?;
        let sampler = FrameSampler::new(&annotated.circuit, &frame)?;
        let dem = extract_dem(&annotated.circuit)?;
        let decoder = MwpmDecoder::new(build_graph(&dem, &annotated.postselected)?);
        let postselected = BitVec::from_indices(sampler.num_detectors(), annotated.postselected.iter().copied());
        Ok(Experiment { spec: *spec, p, sampler, decoder, postselected, observable: annotated.observable })
    }

    /// Samples batch `index` and returns its `(shots, discards, errors)`.
    fn batch(&self, index: u64, shots: usize, seed: u64) -> (u64, u64, u64) {
        let first_chunk = index * (BATCH_SHOTS / SHOTS_PER_CHUNK) as u64;
        let batch = self.sampler.sample(shots, seed, first_chunk);
        let mask = self.postselected.words();
        let (discards, errors) = (0..shots)
            .into_par_iter()
            .map(|s| {
                let det = batch.detectors(s);
                if det.iter().zip(mask).any(|(a, b)| a & b != 0) {
                    return (1u64, 0u64);
                }
                let syndrome: Vec<u32> = batch.fired(s).map(|d| d as u32).collect();
                let predicted = self.decoder.decode(&syndrome) >> self.observable & 1 == 1;
                (0, u64::from(predicted != batch.observable(s, self.observable)))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        (shots as u64, discards, errors)
    }

    pub fn run(&self, limits: Limits, seed: u64) -> TrialStats {
        let mut stats = TrialStats { spec: self.spec, p: self.p, shots: 0, discards: 0, errors: 0, seed };
        let mut index = 0;
        while stats.shots < limits.max_shots && stats.errors < limits.max_errors {
            let shots = (limits.max_shots - stats.shots).min(BATCH_SHOTS as u64) as usize;
            let (n, discards, errors) = self.batch(index, shots, seed);
            stats.shots += n;
            stats.discards += discards;
            stats.errors += errors;
            index += 1;
        }
        stats
    }
}

/// Builds, samples, postselects and decodes one configuration.
pub fn run_experiment(spec: &InjectionSpec, p: f64, limits: Limits, seed: u64) -> Result<TrialStats, HarnessError> {
    validate_limits(limits)?;
    Ok(Experiment::new(spec, p)?.run(limits, seed))
}

/// As [`run_experiment`], on a dedicated pool of `threads` workers. The result does
/// not depend on `threads`.
pub fn run_experiment_with_threads(
    spec: &InjectionSpec,
    p: f64,
    limits: Limits,
    seed: u64,
    threads: usize,
) -> Result<TrialStats, HarnessError> {
    validate_limits(limits)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(spec, p, limits, seed))
}

fn validate_limits(limits: Limits) -> Result<(), HarnessError> {
    if limits.max_shots == 0 || limits.max_errors == 0 {
        return Err(HarnessError::InvalidArgument("max shots and max errors must be at least 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{Protocol, State};

    #[test]
    fn noiseless_run_is_clean() {
        let spec = InjectionSpec::new(Protocol::Hook, 3, 1, 3, 1, State::I);
        let s = run_experiment(&spec, 0.0, Limits { max_shots: 5000, max_errors: 10 }, 1).unwrap();
        assert_eq!((s.shots, s.discards, s.errors), (5000, 0, 0));
    }

    #[test]
    fn stop_rule_counts_whole_batches() {
        let spec = InjectionSpec::new(Protocol::Hook, 3, 1, 3, 1, State::I);
        let s = run_experiment(&spec, 0.05, Limits { max_shots: 200_000, max_errors: 1 }, 4).unwrap();
        assert_eq!(s.shots, BATCH_SHOTS as u64);
        assert!(s.errors >= 1);
    }
}
