use std::io::{self, Read, Write};

use crate::bits::{words_for, Ones};

/// Detection events and observable flips for many shots, packed shot-major.
///
/// Each shot owns one row of `ceil(num_detectors / 64)` words of detector bits
/// and one row of `ceil(num_observables / 64)` words of observable bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotBatch {
    num_shots: usize,
    num_detectors: usize,
    num_observables: usize,
    det: Vec<u64>,
    obs: Vec<u64>,
}

impl ShotBatch {
    pub fn zeros(num_shots: usize, num_detectors: usize, num_observables: usize) -> Self {
        ShotBatch {
            num_shots,
            num_detectors,
            num_observables,
            det: vec![0; num_shots * words_for(num_detectors)],
            obs: vec![0; num_shots * words_for(num_observables)],
        }
    }

    pub(crate) fn from_parts(
        num_shots: usize,
        num_detectors: usize,
        num_observables: usize,
        det: Vec<u64>,
        obs: Vec<u64>,
    ) -> Self {
        assert_eq!(det.len(), num_shots * words_for(num_detectors));
        assert_eq!(obs.len(), num_shots * words_for(num_observables));
        ShotBatch { num_shots, num_detectors, num_observables, det, obs }
    }

    pub fn num_shots(&self) -> usize {
        self.num_shots
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn detector_stride(&self) -> usize {
        words_for(self.num_detectors)
    }

    pub fn detectors(&self, shot: usize) -> &[u64] {
        let s = self.detector_stride();
        &self.det[shot * s..(shot + 1) * s]
    }

    pub fn detectors_mut(&mut self, shot: usize) -> &mut [u64] {
        let s = self.detector_stride();
        &mut self.det[shot * s..(shot + 1) * s]
    }

    pub fn observables(&self, shot: usize) -> &[u64] {
        let s = words_for(self.num_observables);
        &self.obs[shot * s..(shot + 1) * s]
    }

    pub fn observables_mut(&mut self, shot: usize) -> &mut [u64] {
        let s = words_for(self.num_observables);
        &mut self.obs[shot * s..(shot + 1) * s]
    }

    pub fn detector(&self, shot: usize, d: usize) -> bool {
        self.detectors(shot)[d / 64] >> (d % 64) & 1 == 1
    }

    pub fn observable(&self, shot: usize, k: usize) -> bool {
        self.observables(shot)[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn fired(&self, shot: usize) -> Ones<'_> {
        Ones::new(self.detectors(shot))
    }

    /// Number of shots in which each detector fired.
    pub fn detector_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.num_detectors];
        for shot in 0..self.num_shots {
            for d in self.fired(shot) {
                counts[d] += 1;
            }
        }
        counts
    }

    pub fn observable_counts(&self) -> Vec<u64> {
        (0..self.num_observables)
            .map(|k| (0..self.num_shots).filter(|&s| self.observable(s, k)).count() as u64)
            .collect()
    }

    pub fn total_detection_events(&self) -> u64 {
        self.det.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.det.iter().chain(&self.obs).all(|&w| w == 0)
    }

    pub fn append(&mut self, other: &ShotBatch) {
        assert_eq!(self.num_detectors, other.num_detectors);
        assert_eq!(self.num_observables, other.num_observables);
        self.num_shots += other.num_shots;
        self.det.extend_from_slice(&other.det);
        self.obs.extend_from_slice(&other.obs);
    }
}

/// Writes the raw batch: a header of three little-endian `u64`s
/// `(num_shots, num_detectors, num_observables)`, then per shot the packed
/// detector words followed by the packed observable words, all little-endian.
pub fn write_dump(batch: &ShotBatch, mut out: impl Write) -> io::Result<()> {
    for h in [batch.num_shots, batch.num_detectors, batch.num_observables] {
        out.write_all(&(h as u64).to_le_bytes())?;
    }
    for shot in 0..batch.num_shots {
        for w in batch.detectors(shot).iter().chain(batch.observables(shot)) {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dump(mut input: impl Read) -> io::Result<ShotBatch> {
    let mut word = || -> io::Result<u64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let num_shots = word()? as usize;
    let num_detectors = word()? as usize;
    let num_observables = word()? as usize;
    let mut batch = ShotBatch::zeros(num_shots, num_detectors, num_observables);
    for shot in 0..num_shots {
        for k in 0..words_for(num_detectors) {
            batch.detectors_mut(shot)[k] = word()?;
        }
        for k in 0..words_for(num_observables) {
            batch.observables_mut(shot)[k] = word()?;
        }
    }
    Ok(batch)
}
