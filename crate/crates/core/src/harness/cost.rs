use serde::{Deserialize, Serialize};

use crate::builders::InjectionSpec;

use super::HarnessError;

/// Expected qubit·rounds spent per accepted attempt: a patch of `2·d_inject² - 1`
/// qubits held for `r_inject` rounds, repeated until an attempt survives.
///
/// Every attempt is charged in full, including attempts that could have been
/// abandoned before their last postselected round.
pub fn expected_cost(spec: &InjectionSpec, discard_rate: f64) -> Result<f64, HarnessError> {
    if !(0.0..1.0).contains(&discard_rate) {
        return Err(HarnessError::InvalidArgument(format!("discard rate {discard_rate} outside [0, 1)")));
    }
    let k = spec.d_inject as f64;
    Ok((2.0 * k * k - 1.0) * spec.r_inject as f64 / (1.0 - discard_rate))
}

/// Half life of a repeat-until-success process, approximated as 70% of its expected duration.
pub fn half_life(expected_cost: f64) -> f64 {
    0.7 * expected_cost
}

/// Chance that a repeat-until-success process with the given expected cost
/// finishes within `budget`: `1 - 2^(-budget / half_life)`.
pub fn deadline_success(expected_cost: f64, budget: f64) -> Result<f64, HarnessError> {
    if expected_cost <= 0.0 || budget < 0.0 || !expected_cost.is_finite() {
        return Err(HarnessError::InvalidArgument(format!(
            "need a positive expected cost and a nonnegative budget (got {expected_cost}, {budget})"
        )));
    }
    Ok(1.0 - (-budget / half_life(expected_cost)).exp2())
}

/// A point of the cost/error tradeoff, labelled by `(r_inject, d_inject)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub protocol: String,
    pub state: String,
    pub r_inject: usize,
    pub d_inject: usize,
    pub expected_cost: f64,
    pub error_rate: f64,
    pub err_lo: f64,
    pub err_hi: f64,
    pub discard_rate: f64,
}

fn dominates(a: &CostPoint, b: &CostPoint) -> bool {
    a.expected_cost <= b.expected_cost
        && a.error_rate <= b.error_rate
        && (a.expected_cost < b.expected_cost || a.error_rate < b.error_rate)
}

/// Points not dominated in (expected cost, error rate), sorted by cost.
pub fn pareto_frontier(points: &[CostPoint]) -> Vec<CostPoint> {
    let mut out: Vec<CostPoint> =
        points.iter().filter(|p| !points.iter().any(|q| dominates(q, p))).cloned().collect();
    out.sort_by(|a, b| a.expected_cost.total_cmp(&b.expected_cost).then(a.error_rate.total_cmp(&b.error_rate)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{Protocol, State};

    fn spec(d_inject: usize, r_inject: usize) -> InjectionSpec {
        InjectionSpec::new(Protocol::Hook, d_inject, r_inject, 15, 15, State::I)
    }

    fn point(cost: f64, rate: f64) -> CostPoint {
        CostPoint {
            protocol: "hook".into(),
            state: "i".into(),
            r_inject: 1,
            d_inject: 2,
            expected_cost: cost,
            error_rate: rate,
            err_lo: rate,
            err_hi: rate,
            discard_rate: 0.0,
        }
    }

    #[test]
    fn cost_without_discards() {
        assert_eq!(expected_cost(&spec(5, 2), 0.0).unwrap(), 98.0);
        assert_eq!(expected_cost(&spec(5, 2), 0.5).unwrap(), 196.0);
        assert!(expected_cost(&spec(5, 2), 1.0).is_err());
    }

    #[test]
    fn frontier_drops_dominated() {
        let pts = [point(100.0, 1e-3), point(200.0, 5e-4), point(150.0, 2e-3)];
        let f = pareto_frontier(&pts);
        assert_eq!(f.iter().map(|p| p.expected_cost).collect::<Vec<_>>(), vec![100.0, 200.0]);
        assert_eq!(pareto_frontier(&pts[..1]), vec![pts[0].clone()]);
    }

    #[test]
    fn deadline_half_lives() {
        let cost = 100.0;
        assert_eq!(deadline_success(cost, 0.0).unwrap(), 0.0);
        assert!((deadline_success(cost, half_life(cost)).unwrap() - 0.5).abs() < 1e-12);
        assert!(deadline_success(cost, 7.0 * half_life(cost)).unwrap() >= 0.99);
    }
}
