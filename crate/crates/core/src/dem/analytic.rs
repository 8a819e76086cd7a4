use serde::{Deserialize, Serialize};

use crate::builders::State;

/// Coefficients `(a, b)` of an error floor `a·p + b·p²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    pub linear: f64,
    pub quadratic: f64,
}

impl Floor {
    pub fn at(&self, p: f64) -> f64 {
        self.linear * p + self.quadratic * p * p
    }
}

/// Floors obtained by counting distance-1 and distance-2 mechanisms of the hook circuit:
/// `7p/30 + 56p²` for `|i>` and `5p/30 + 21p²` for `|+>`.
pub fn analytic_floor(state: State) -> Floor {
    match state {
        State::I => Floor { linear: 7.0 / 30.0, quadratic: 56.0 },
        State::Plus => Floor { linear: 5.0 / 30.0, quadratic: 21.0 },
    }
}

/// The alternative pairing `5p/30 + 56p²` / `7p/30 + 21p²`, which pairs each
/// linear term with the other state's quadratic term. Reported next to the
/// primary floors so both readings stay visible.
pub fn alternative_floor(state: State) -> Floor {
    match state {
        State::I => Floor { linear: 5.0 / 30.0, quadratic: 56.0 },
        State::Plus => Floor { linear: 7.0 / 30.0, quadratic: 21.0 },
    }
}

pub fn analytic_limit(state: State, p: f64) -> f64 {
    analytic_floor(state).at(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_at_one_per_mille() {
        let p: f64 = 0.001;
        let oracle_i = 7.0 * p / 30.0 + 56.0 * p.powi(2);
        let oracle_plus = 5.0 * p / 30.0 + 21.0 * p.powi(2);
        assert!((analytic_limit(State::I, p) - oracle_i).abs() < 1e-18);
        assert!((analytic_limit(State::Plus, p) - oracle_plus).abs() < 1e-18);
        assert!((analytic_limit(State::I, p) - 2.8933e-4).abs() < 1e-8);
        assert!((analytic_limit(State::Plus, p) - 1.8767e-4).abs() < 1e-8);
        assert_eq!(analytic_limit(State::I, 0.0), 0.0);
        assert_eq!(alternative_floor(State::I).at(0.0), 0.0);
    }
}
