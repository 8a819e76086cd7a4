use serde::{Deserialize, Serialize};

use crate::builders::InjectionSpec;

use super::cost::expected_cost;
use super::HarnessError;

/// Intervals contain every rate whose likelihood is within this factor of the best.
pub const LIKELIHOOD_FACTOR: f64 = 1000.0;

/// Counts from one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub spec: InjectionSpec,
    pub p: f64,
    pub shots: u64,
    pub discards: u64,
    /// Logical errors among the undiscarded shots.
    pub errors: u64,
    pub seed: u64,
}

impl TrialStats {
    pub fn kept(&self) -> u64 {
        self.shots - self.discards
    }

    pub fn discard_rate(&self) -> Option<f64> {
        (self.shots > 0).then(|| self.discards as f64 / self.shots as f64)
    }

    /// Logical error rate over undiscarded shots.
    pub fn error_rate(&self) -> Option<f64> {
        (self.kept() > 0).then(|| self.errors as f64 / self.kept() as f64)
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        likelihood_interval(self.errors, self.kept(), LIKELIHOOD_FACTOR).ok()
    }

    pub fn expected_cost(&self) -> Option<f64> {
        expected_cost(&self.spec, self.discard_rate()?).ok()
    }

    pub fn row(&self) -> StatsRow {
        let interval = self.interval();
        StatsRow {
            protocol: self.spec.protocol.to_string(),
            state: self.spec.state.to_string(),
            p: self.p,
            d_inject: self.spec.d_inject,
            r_inject: self.spec.r_inject,
            d: self.spec.d,
            r_hold: self.spec.r_hold,
            shots: self.shots,
            discards: self.discards,
            errors: self.errors,
            discard_rate: self.discard_rate(),
            error_rate: self.error_rate(),
            err_lo: interval.map(|i| i.0),
            err_hi: interval.map(|i| i.1),
            expected_cost_qubit_rounds: self.expected_cost(),
            seed: self.seed,
        }
    }
}

/// One line of the CSV and JSON outputs. Undefined rates are left empty (`null` in JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub protocol: String,
    pub state: String,
    pub p: f64,
    pub d_inject: usize,
    pub r_inject: usize,
    pub d: usize,
    pub r_hold: usize,
    pub shots: u64,
    pub discards: u64,
    pub errors: u64,
    pub discard_rate: Option<f64>,
    pub error_rate: Option<f64>,
    pub err_lo: Option<f64>,
    pub err_hi: Option<f64>,
    pub expected_cost_qubit_rounds: Option<f64>,
    pub seed: u64,
}

fn log_likelihood(k: u64, n: u64, q: f64) -> f64 {
    let hits = if k == 0 { 0.0 } else { k as f64 * q.ln() };
    let misses = if k == n { 0.0 } else { (n - k) as f64 * (-q).ln_1p() };
    hits + misses
}

/// Bisects for the point where `above` switches from true at `inside` to false at `outside`.
fn boundary(mut inside: f64, mut outside: f64, above: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if above(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
        if (outside - inside).abs() <= 1e-7 * inside.abs().max(outside.abs()) {
            break;
        }
    }
    0.5 * (inside + outside)
}

/// Rates `q` whose binomial likelihood `q^k (1-q)^(n-k)` is at least the maximum divided by `factor`.
pub fn likelihood_interval(k: u64, n: u64, factor: f64) -> Result<(f64, f64), HarnessError> {
    if n == 0 {
        return Err(HarnessError::InvalidArgument("likelihood interval needs at least one shot".into()));
    }
    if k > n {
        return Err(HarnessError::InvalidArgument(format!("{k} errors out of {n} shots")));
    }
    if factor < 1.0 {
        return Err(HarnessError::InvalidArgument(format!("likelihood factor {factor} is below 1")));
    }
    let mle = k as f64 / n as f64;
    let threshold = log_likelihood(k, n, mle) - factor.ln();
    let above = |q: f64| log_likelihood(k, n, q) >= threshold;
    let lo = if k == 0 { 0.0 } else { boundary(mle, 0.0, above) };
    let hi = if k == n { 1.0 } else { boundary(mle, 1.0, above) };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_errors_has_closed_form_upper_end() {
        let (lo, hi) = likelihood_interval(0, 100, 1000.0).unwrap();
        let expected = 1.0 - 1000f64.powf(-1.0 / 100.0);
        assert_eq!(lo, 0.0);
        assert!((hi - expected).abs() < 1e-6 * expected);
        assert!((hi - 0.0668).abs() < 1e-4);
    }

    #[test]
    fn all_errors_reach_one() {
        let (lo, hi) = likelihood_interval(50, 50, 1000.0).unwrap();
        assert_eq!(hi, 1.0);
        assert!((lo - 1000f64.powf(-1.0 / 50.0)).abs() < 1e-6);
    }

    #[test]
    fn interval_contains_the_estimate() {
        let (lo, hi) = likelihood_interval(1, 1000, 1000.0).unwrap();
        assert!(lo < 1e-3 && 1e-3 < hi);
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert!(likelihood_interval(0, 0, 1000.0).is_err());
    }
}
