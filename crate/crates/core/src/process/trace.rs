use std::io::{self, Write};

use crate::histogram::DegreeHistogram;

use super::{GrowthState, HyperedgeLog};

/// Counters after step `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub t: u64,
    /// `D_t`
    pub active_degree: u64,
    /// `A_t`
    pub active: u64,
    /// `I_t`
    pub inactive: u64,
    /// `Σ y` over vertex and edge events up to `t`
    pub added_cardinality: u64,
    /// `Σ Θ` up to `t`
    pub deactivated_degree: u64,
    /// number of deactivations up to `t`
    pub deactivations: u64,
}

impl TraceRow {
    /// Running mean of deactivated degrees, `None` before the first one.
    pub fn avg_deactivated_degree(&self) -> Option<f64> {
        (self.deactivations > 0).then(|| self.deactivated_degree as f64 / self.deactivations as f64)
    }
}

/// Column-oriented record of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    times: Vec<u64>,
    active_degree: Vec<u64>,
    active: Vec<u64>,
    inactive: Vec<u64>,
    added_cardinality: Vec<u64>,
    deactivated_degree: Vec<u64>,
    deactivations: Vec<u64>,
    pub snapshots: Vec<DegreeHistogram>,
    /// Step at which the process found no active vertex, if it did.
    pub terminated_at: Option<u64>,
    pub hyperedges: Option<HyperedgeLog>,
}

impl RunTrace {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            active_degree: Vec::with_capacity(n),
            active: Vec::with_capacity(n),
            inactive: Vec::with_capacity(n),
            added_cardinality: Vec::with_capacity(n),
            deactivated_degree: Vec::with_capacity(n),
            deactivations: Vec::with_capacity(n),
            ..Default::default()
        }
    }

    pub(crate) fn record(&mut self, s: &GrowthState) {
        self.push(TraceRow {
            t: s.time(),
            active_degree: s.active_degree_sum(),
            active: s.active_vertices(),
            inactive: s.inactive_vertices(),
            added_cardinality: s.added_cardinality(),
            deactivated_degree: s.deactivated_degree(),
            deactivations: s.deactivations(),
        });
    }

    fn push(&mut self, row: TraceRow) {
        self.times.push(row.t);
        self.active_degree.push(row.active_degree);
        self.active.push(row.active);
        self.inactive.push(row.inactive);
        self.added_cardinality.push(row.added_cardinality);
        self.deactivated_degree.push(row.deactivated_degree);
        self.deactivations.push(row.deactivations);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    /// `D_t` column.
    pub fn active_degree(&self) -> &[u64] {
        &self.active_degree
    }

    pub fn row(&self, i: usize) -> TraceRow {
        TraceRow {
            t: self.times[i],
            active_degree: self.active_degree[i],
            active: self.active[i],
            inactive: self.inactive[i],
            added_cardinality: self.added_cardinality[i],
            deactivated_degree: self.deactivated_degree[i],
            deactivations: self.deactivations[i],
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        (0..self.len()).map(|i| self.row(i))
    }

    pub fn last(&self) -> Option<TraceRow> {
        self.len().checked_sub(1).map(|i| self.row(i))
    }

    /// Row recorded exactly at step `t`.
    pub fn row_at(&self, t: u64) -> Option<TraceRow> {
        self.times.binary_search(&t).ok().map(|i| self.row(i))
    }

    /// State at step `t`: the row at `t`, or the frozen final row when the
    /// run terminated before `t`.
    pub fn state_at(&self, t: u64) -> Option<TraceRow> {
        match self.times.binary_search(&t) {
            Ok(i) => Some(self.row(i)),
            Err(i) if i == self.len() && self.terminated_at.is_some() => {
                self.last().map(|r| TraceRow { t, ..r })
            }
            Err(_) => None,
        }
    }

    /// Keeps only rows at the given times (using [`RunTrace::state_at`]).
    /// Snapshots and the hyperedge log are carried over.
    pub fn thinned(self, times: &[u64]) -> RunTrace {
        let mut out = RunTrace::with_capacity(times.len());
        for &t in times {
            if let Some(row) = self.state_at(t) {
                out.push(row);
            }
        }
        out.snapshots = self.snapshots;
        out.terminated_at = self.terminated_at;
        out.hyperedges = self.hyperedges;
        out
    }

    /// `t,D,A,I,avg_deact_degree`; the average is empty before the first
    /// deactivation.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,D,A,I,avg_deact_degree")?;
        for r in self.rows() {
            write!(out, "{},{},{},{},", r.t, r.active_degree, r.active, r.inactive)?;
            match r.avg_deactivated_degree() {
                Some(avg) => writeln!(out, "{avg}")?,
                None => writeln!(out)?,
            }
        }
        Ok(())
    }
}
