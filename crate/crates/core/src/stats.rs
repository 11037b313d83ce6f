//! Per-worker counters.

use std::ops::AddAssign;

/// Counters collected by one worker; merged after the run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub propagations_total: u64,
    /// Subset of `propagations_total` spent inside vivification.
    pub propagations_vivify: u64,
    pub vivify_attempts: u64,
    pub vivify_successes: u64,
    pub literals_removed: u64,
    pub clauses_learned: u64,
    pub clauses_exported: u64,
    pub clauses_imported: u64,
    pub improvements_published: u64,
    pub improvements_adopted: u64,
    pub restarts: u64,
    pub reductions: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub buffer_overflows: u64,
}

impl Stats {
    /// Share of propagations spent on vivification, in percent.
    pub fn vivify_prop_pct(&self) -> f64 {
        if self.propagations_total == 0 {
            0.0
        } else {
            100.0 * self.propagations_vivify as f64 / self.propagations_total as f64
        }
    }

    /// Share of vivification attempts that shortened the clause, in percent.
    pub fn success_rate(&self) -> f64 {
        if self.vivify_attempts == 0 {
            0.0
        } else {
            100.0 * self.vivify_successes as f64 / self.vivify_attempts as f64
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.propagations_vivify <= self.propagations_total
            && self.vivify_successes <= self.vivify_attempts
            && self.improvements_published <= self.vivify_successes
    }

    pub fn sum<'a>(all: impl IntoIterator<Item = &'a Stats>) -> Stats {
        let mut total = Stats::default();
        for s in all {
            total += s;
        }
        total
    }
}

impl AddAssign<&Stats> for Stats {
    fn add_assign(&mut self, o: &Stats) {
        self.propagations_total += o.propagations_total;
        self.propagations_vivify += o.propagations_vivify;
        self.vivify_attempts += o.vivify_attempts;
        self.vivify_successes += o.vivify_successes;
        self.literals_removed += o.literals_removed;
        self.clauses_learned += o.clauses_learned;
        self.clauses_exported += o.clauses_exported;
        self.clauses_imported += o.clauses_imported;
        self.improvements_published += o.improvements_published;
        self.improvements_adopted += o.improvements_adopted;
        self.restarts += o.restarts;
        self.reductions += o.reductions;
        self.conflicts += o.conflicts;
        self.decisions += o.decisions;
        self.buffer_overflows += o.buffer_overflows;
    }
}
