//! Batch trial execution and comparison against the exact oracle.
//!
//! Trials are embarrassingly parallel: each derives its own stream from
//! `(master_seed, trial_index)`, so the aggregate is a pure function of the
//! arguments no matter how the batch is scheduled.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::TrialRng;
use crate::scenario::{composite_key, run_trial, Distribution, Scenario};

/// Two-sided 95% normal quantile used for Wilson score intervals.
const WILSON_Z: f64 = 1.959963984540054;

/// z threshold for oracle agreement; chosen so a full CI suite has a
/// negligible flake rate.
pub const ORACLE_SIGMA: f64 = 5.0;

/// Outcome counts of a seeded batch, keyed by the composite outcome label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatSummary {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl StatSummary {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn freq(&self, label: &str) -> f64 {
        self.count(label) as f64 / self.total as f64
    }

    pub fn freqs(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(l, &c)| (l.clone(), c as f64 / self.total as f64))
            .collect()
    }

    /// Wilson score 95% half-width for one outcome's frequency.
    pub fn ci_halfwidth(&self, label: &str) -> f64 {
        let n = self.total as f64;
        let p = self.freq(label);
        let z2 = WILSON_Z * WILSON_Z;
        WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
    }

    pub fn ci_halfwidths(&self) -> BTreeMap<String, f64> {
        self.counts
            .keys()
            .map(|l| (l.clone(), self.ci_halfwidth(l)))
            .collect()
    }
}

/// Runs `trials` independent trials of the scenario and aggregates outcome
/// counts. Identical output for identical `(scenario, trials, master_seed)`
/// regardless of execution order or thread count.
pub fn run_many(s: &Scenario, trials: u64, master_seed: u64) -> Result<StatSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    s.validate()?;
    let events = s.observed_events();
    let events: Vec<String> = events.iter().map(|e| e.to_string()).collect();
    let counts = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = TrialRng::for_trial(master_seed, i);
            let record = run_trial(s, &mut rng)?;
            let labels: Vec<String> = events
                .iter()
                .map(|event| {
                    record
                        .label_of(event)
                        .map(str::to_string)
                        .ok_or_else(|| Error::LabelMismatch(format!("trial missing event {event}")))
                })
                .collect::<Result<_>>()?;
            Ok(composite_key(&events, &labels))
        })
        .try_fold(BTreeMap::<String, u64>::new, |mut acc, key: Result<String>| {
            *acc.entry(key?).or_insert(0) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    Ok(StatSummary {
        counts,
        total: trials,
    })
}

/// Agreement check for one outcome cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub key: String,
    pub expected: f64,
    pub count: u64,
    pub freq: f64,
    /// `(freq - p) / sqrt(p (1 - p) / N)`; absent for deterministic cells.
    pub z: Option<f64>,
    pub pass: bool,
}

/// Per-cell z-scores of a batch against the exact distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub cells: Vec<CellCheck>,
    pub total: u64,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.cells
            .iter()
            .filter_map(|c| c.z)
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

/// Compares empirical frequencies with the oracle at [`ORACLE_SIGMA`].
/// Deterministic cells (`p` equal to 0 or 1) pass only on exact counts.
/// Every observed label must appear in the oracle; oracle cells the batch
/// never produced count as zero.
pub fn compare_to_oracle(summary: &StatSummary, exact: &Distribution) -> Result<OracleReport> {
    let keyed = exact.keyed_cells();
    for label in summary.counts.keys() {
        if !keyed.iter().any(|(k, _)| k == label) {
            return Err(Error::LabelMismatch(format!(
                "batch produced outcome {label} absent from the oracle"
            )));
        }
    }
    let n = summary.total;
    let cells = keyed
        .into_iter()
        .map(|(key, p)| {
            let count = summary.count(&key);
            let freq = count as f64 / n as f64;
            let (z, pass) = if p <= 0.0 {
                (None, count == 0)
            } else if p >= 1.0 {
                (None, count == n)
            } else {
                let z = (freq - p) / (p * (1.0 - p) / n as f64).sqrt();
                (Some(z), z.abs() <= ORACLE_SIGMA)
            };
            CellCheck {
                key,
                expected: p,
                count,
                freq,
                z,
                pass,
            }
        })
        .collect();
    Ok(OracleReport { cells, total: n })
}
