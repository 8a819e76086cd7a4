use std::io::{Read, Write};
use std::ops::RangeInclusive;

use crate::builders::{InjectionSpec, Protocol, State};

use super::experiment::{Experiment, Limits};
use super::stats::{StatsRow, TrialStats};
use super::HarnessError;

pub const CSV_COLUMNS: [&str; 16] = [
    "protocol",
    "state",
    "p",
    "d_inject",
    "r_inject",
    "d",
    "r_hold",
    "shots",
    "discards",
    "errors",
    "discard_rate",
    "error_rate",
    "err_lo",
    "err_hi",
    "expected_cost_qubit_rounds",
    "seed",
];

/// A grid of configurations, each run with its own stop rule.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub protocols: Vec<Protocol>,
    pub states: Vec<State>,
    pub d_inject: RangeInclusive<usize>,
    pub r_inject: RangeInclusive<usize>,
    pub d: usize,
    pub r_hold: usize,
    pub ps: Vec<f64>,
    pub limits: Limits,
    pub seed: u64,
}

impl SweepPlan {
    /// The valid specs of the grid. Injection distances above `d` are kept only for
    /// the pregrown protocol, whose postselection region may exceed the patch.
    pub fn specs(&self) -> Vec<InjectionSpec> {
        let mut out = Vec::new();
        for &protocol in &self.protocols {
            for &state in &self.states {
                for d_inject in self.d_inject.clone() {
                    let limit = if protocol == Protocol::HookPregrown { 2 * self.d - 1 } else { self.d };
                    if d_inject > limit {
                        continue;
                    }
                    for r_inject in self.r_inject.clone() {
                        out.push(InjectionSpec::new(protocol, d_inject, r_inject, self.d, self.r_hold, state));
                    }
                }
            }
        }
        out
    }
}

/// Runs every configuration of the plan at every noise strength, calling `progress` after each.
pub fn sweep(plan: &SweepPlan, mut progress: impl FnMut(&TrialStats)) -> Result<Vec<TrialStats>, HarnessError> {
    let mut out = Vec::new();
    for spec in plan.specs() {
        for &p in &plan.ps {
            let stats = Experiment::new(&spec, p)?.run(plan.limits, plan.seed);
            progress(&stats);
            out.push(stats);
        }
    }
    Ok(out)
}

pub fn write_csv(rows: &[StatsRow], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<StatsRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(HarnessError::InvalidArgument(format!(
            "unexpected CSV header {header:?}, expected {CSV_COLUMNS:?}"
        )));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_json(rows: &[StatsRow], mut out: impl Write) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> SweepPlan {
        SweepPlan {
            protocols: vec![Protocol::Hook],
            states: vec![State::I],
            d_inject: 2..=7,
            r_inject: 1..=6,
            d: 7,
            r_hold: 7,
            ps: vec![0.001],
            limits: Limits::default(),
            seed: 0,
        }
    }

    #[test]
    fn hook_grid_has_thirty_six_variants() {
        assert_eq!(plan().specs().len(), 36);
    }

    #[test]
    fn pregrown_grid_reaches_past_the_patch() {
        let mut p = plan();
        p.protocols = vec![Protocol::HookPregrown];
        p.d_inject = 2..=11;
        assert_eq!(p.specs().len(), 60);
    }

    #[test]
    fn csv_header_matches_columns() {
        let spec = InjectionSpec::new(Protocol::Li, 3, 2, 5, 1, State::Plus);
        let stats = TrialStats { spec, p: 0.001, shots: 10, discards: 10, errors: 0, seed: 3 };
        let mut buf = Vec::new();
        write_csv(&[stats.row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(text.lines().nth(1).unwrap(), "li,plus,0.001,3,2,5,1,10,10,0,1.0,,,,,3");
        assert_eq!(read_csv(text.as_bytes()).unwrap(), vec![stats.row()]);
    }
}
