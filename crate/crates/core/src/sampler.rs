//! Degree-proportional vertex selection with permanent deactivation.
//!
//! [`DegreeIndex`] keeps the degree of every vertex in a Fenwick tree whose
//! leaves hold the degree of active vertices and zero for deactivated ones.
//! All mutations and selections are `O(log n)` and operate on exact integer
//! weights, so the active degree sum never drifts.

use std::fmt;

use thiserror::Error;

/// Dense, consecutive vertex identifier (the insertion order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("inactive vertex mutation: vertex {0} is deactivated")]
    InactiveVertex(VertexId),
    #[error("inactive vertex mutation: vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("no active vertices")]
    NoActiveVertices,
    #[error("sampling coordinate {0} is outside (0, 1]")]
    InvalidCoordinate(f64),
    #[error("rank {rank} is outside 1..={total}")]
    InvalidRank { rank: u64, total: u64 },
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

/// Degree table with an embedded prefix-sum tree.
///
/// `degree[v]` always holds the degree of `v`; once `v` is deactivated the
/// value is frozen and the corresponding tree leaf is zero.
#[derive(Clone, Debug, Default)]
pub struct DegreeIndex {
    /// 1-based Fenwick array; `tree[0]` is unused.
    tree: Vec<u64>,
    degree: Vec<u64>,
    active: Vec<bool>,
    total: u64,
    active_count: usize,
}

impl DegreeIndex {
    pub fn new() -> Self {
        Self {
            tree: vec![0],
            ..Default::default()
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut tree = Vec::with_capacity(n + 1);
        tree.push(0);
        Self {
            tree,
            degree: Vec::with_capacity(n),
            active: Vec::with_capacity(n),
            total: 0,
            active_count: 0,
        }
    }

    /// Number of vertices ever inserted, active or not.
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    /// Sum of the degrees of active vertices (`D_t`).
    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn inactive_count(&self) -> usize {
        self.len() - self.active_count
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        self.active.get(v.index()).copied().unwrap_or(false)
    }

    /// Current degree (frozen degree for deactivated vertices).
    pub fn degree(&self, v: VertexId) -> Option<u64> {
        self.degree.get(v.index()).copied()
    }

    /// Sampling weight: the degree if active, zero otherwise.
    pub fn weight(&self, v: VertexId) -> u64 {
        if self.is_active(v) {
            self.degree[v.index()]
        } else {
            0
        }
    }

    /// Degree recorded at deactivation, `None` while the vertex is active.
    pub fn frozen_degree(&self, v: VertexId) -> Option<u64> {
        match self.active.get(v.index()) {
            Some(false) => Some(self.degree[v.index()]),
            _ => None,
        }
    }

    /// Iterates `(degree, is_active)` over all vertices in id order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.degree.iter().copied().zip(self.active.iter().copied())
    }

    /// Appends an active vertex with the given positive degree.
    ///
    /// # Panics
    ///
    /// Panics if `initial_degree` is zero or the id space (`u32`) is exhausted.
    pub fn push_vertex(&mut self, initial_degree: u64) -> VertexId {
        assert!(initial_degree > 0, "vertices enter with a positive degree");
        let id = VertexId(u32::try_from(self.degree.len()).expect("vertex id overflow"));
        let i = self.tree.len();
        // The new node covers (i - lsb(i), i]; its children are already built.
        let mut node = initial_degree;
        let stop = i - lsb(i);
        let mut j = i - 1;
        while j > stop {
            node += self.tree[j];
            j -= lsb(j);
        }
        self.tree.push(node);
        self.degree.push(initial_degree);
        self.active.push(true);
        self.total += initial_degree;
        self.active_count += 1;
        id
    }

    fn check_active(&self, v: VertexId) -> Result<(), SamplerError> {
        match self.active.get(v.index()) {
            None => Err(SamplerError::UnknownVertex(v)),
            Some(false) => Err(SamplerError::InactiveVertex(v)),
            Some(true) => Ok(()),
        }
    }

    fn tree_add(&mut self, v: VertexId, delta: u64) {
        let mut i = v.index() + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += lsb(i);
        }
    }

    fn tree_sub(&mut self, v: VertexId, delta: u64) {
        let mut i = v.index() + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += lsb(i);
        }
    }

    /// Increases the degree of an active vertex by `delta` occurrences.
    pub fn add_degree(&mut self, v: VertexId, delta: u64) -> Result<(), SamplerError> {
        self.check_active(v)?;
        if delta == 0 {
            return Ok(());
        }
        self.degree[v.index()] += delta;
        self.total += delta;
        self.tree_add(v, delta);
        Ok(())
    }

    /// Removes `v` from the sampling pool and returns its frozen degree.
    pub fn deactivate(&mut self, v: VertexId) -> Result<u64, SamplerError> {
        self.check_active(v)?;
        let d = self.degree[v.index()];
        self.active[v.index()] = false;
        self.active_count -= 1;
        self.total -= d;
        self.tree_sub(v, d);
        Ok(d)
    }

    /// Inclusive prefix sum of weights over ids `0..=v`.
    pub fn prefix_weight(&self, v: VertexId) -> u64 {
        let mut i = (v.index() + 1).min(self.tree.len() - 1);
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= lsb(i);
        }
        sum
    }

    /// Smallest vertex whose inclusive prefix weight is `>= rank`, for
    /// `rank` in `1..=total_weight`. Deactivated vertices are never returned.
    pub fn select_rank(&self, rank: u64) -> Result<VertexId, SamplerError> {
        if self.total == 0 {
            return Err(SamplerError::NoActiveVertices);
        }
        if rank == 0 || rank > self.total {
            return Err(SamplerError::InvalidRank {
                rank,
                total: self.total,
            });
        }
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut remaining = rank;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] < remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        // `pos` is the largest 1-based index with prefix < rank, i.e. the
        // 0-based index of the answer.
        Ok(VertexId(pos as u32))
    }

    /// Degree-proportional selection from a coordinate `u` in `(0, 1]`:
    /// returns the smallest id whose inclusive prefix weight is at least
    /// `u * total_weight`.
    pub fn sample(&self, u: f64) -> Result<VertexId, SamplerError> {
        if self.total == 0 {
            return Err(SamplerError::NoActiveVertices);
        }
        if !(u > 0.0 && u <= 1.0) {
            return Err(SamplerError::InvalidCoordinate(u));
        }
        let target = (u * self.total as f64).ceil() as u64;
        self.select_rank(target.clamp(1, self.total))
    }
}
