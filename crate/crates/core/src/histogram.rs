//! Degree-class counts `A_{k,t}` and `I_{k,t}` at one instant.

use std::collections::BTreeMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::sampler::DegreeIndex;

#[derive(Debug, Error)]
pub enum HistogramError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("degree histogram is empty")]
    Empty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub active: u64,
    pub inactive: u64,
}

impl ClassCounts {
    /// `N_k = A_k + I_k`.
    pub fn total(&self) -> u64 {
        self.active + self.inactive
    }
}

/// Map from degree `k >= 1` to the number of active and inactive vertices of
/// that degree, taken at step `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeHistogram {
    t: u64,
    classes: BTreeMap<u64, ClassCounts>,
}

impl DegreeHistogram {
    pub fn new(t: u64) -> Self {
        Self {
            t,
            classes: BTreeMap::new(),
        }
    }

    pub fn from_index(index: &DegreeIndex, t: u64) -> Self {
        let mut h = Self::new(t);
        for (degree, active) in index.iter() {
            let entry = h.classes.entry(degree).or_default();
            if active {
                entry.active += 1;
            } else {
                entry.inactive += 1;
            }
        }
        h
    }

    /// Pools plain degree counts (all treated as active).
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(t: u64, counts: I) -> Self {
        let mut h = Self::new(t);
        for (k, n) in counts {
            h.add(k, n, 0);
        }
        h
    }

    pub fn add(&mut self, k: u64, active: u64, inactive: u64) {
        if active == 0 && inactive == 0 {
            return;
        }
        let entry = self.classes.entry(k).or_default();
        entry.active += active;
        entry.inactive += inactive;
    }

    /// Adds all counts of `other` into `self`; the time stamp is kept.
    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (&k, c) in &other.classes {
            self.add(k, c.active, c.inactive);
        }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn set_time(&mut self, t: u64) {
        self.t = t;
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, k: u64) -> ClassCounts {
        self.classes.get(&k).copied().unwrap_or_default()
    }

    /// Degree classes in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, ClassCounts)> + '_ {
        self.classes.iter().map(|(&k, &c)| (k, c))
    }

    pub fn min_degree(&self) -> Option<u64> {
        self.classes.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.classes.keys().next_back().copied()
    }

    /// `A_t = Σ_k A_{k,t}`.
    pub fn active_total(&self) -> u64 {
        self.classes.values().map(|c| c.active).sum()
    }

    /// `I_t = Σ_k I_{k,t}`.
    pub fn inactive_total(&self) -> u64 {
        self.classes.values().map(|c| c.inactive).sum()
    }

    /// `|V_t|`.
    pub fn total(&self) -> u64 {
        self.classes.values().map(ClassCounts::total).sum()
    }

    /// `Σ_k k·A_{k,t}`, which must equal `D_t`.
    pub fn active_degree_sum(&self) -> u64 {
        self.classes.iter().map(|(&k, c)| k * c.active).sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,active,inactive")?;
        for (k, c) in self.iter() {
            writeln!(out, "{k},{},{}", c.active, c.inactive)?;
        }
        Ok(())
    }

    /// Reads the `k,active,inactive` format written by [`write_csv`]. A
    /// two-column `k,count` body is accepted as pooled counts.
    ///
    /// [`write_csv`]: DegreeHistogram::write_csv
    pub fn parse_csv(text: &str, t: u64) -> Result<Self, HistogramError> {
        let mut h = Self::new(t);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                continue;
            }
            let parse = |s: &str| {
                s.trim().parse::<u64>().map_err(|_| HistogramError::Parse {
                    line: i + 1,
                    message: format!("expected a non-negative integer, found {s:?}"),
                })
            };
            let fields: Vec<&str> = line.split(',').collect();
            let (k, a, d) = match fields.as_slice() {
                [k, n] => (parse(k)?, parse(n)?, 0),
                [k, a, d] => (parse(k)?, parse(a)?, parse(d)?),
                _ => {
                    return Err(HistogramError::Parse {
                        line: i + 1,
                        message: format!("expected 2 or 3 columns, found {}", fields.len()),
                    })
                }
            };
            if k == 0 {
                return Err(HistogramError::Parse {
                    line: i + 1,
                    message: "degree must be at least 1".into(),
                });
            }
            h.add(k, a, d);
        }
        if h.is_empty() {
            return Err(HistogramError::Empty);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::VertexId;

    #[test]
    fn from_index_counts_classes() {
        let mut idx = DegreeIndex::new();
        for d in [1, 1, 3, 2, 3] {
            idx.push_vertex(d);
        }
        idx.deactivate(VertexId(2)).unwrap();
        let h = DegreeHistogram::from_index(&idx, 9);
        assert_eq!(h.get(1), ClassCounts { active: 2, inactive: 0 });
        assert_eq!(h.get(3), ClassCounts { active: 1, inactive: 1 });
        assert_eq!(h.active_total(), 4);
        assert_eq!(h.inactive_total(), 1);
        assert_eq!(h.total(), 5);
        assert_eq!(h.active_degree_sum(), idx.total_weight());
    }

    #[test]
    fn csv_round_trip() {
        let mut h = DegreeHistogram::new(100);
        h.add(1, 10, 2);
        h.add(4, 0, 1);
        h.add(9, 3, 0);
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "k,active,inactive\n1,10,2\n4,0,1\n9,3,0\n");
        assert_eq!(DegreeHistogram::parse_csv(&text, 100).unwrap(), h);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            DegreeHistogram::parse_csv("k,active,inactive\n", 0),
            Err(HistogramError::Empty)
        ));
        assert!(matches!(
            DegreeHistogram::parse_csv("k,active,inactive\n1,2,x\n", 0),
            Err(HistogramError::Parse { line: 2, .. })
        ));
        let pooled = DegreeHistogram::parse_csv("1,5\n2,3\n", 0).unwrap();
        assert_eq!(pooled.total(), 8);
    }
}
