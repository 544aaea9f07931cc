//! The growth process: vertex events, edge events and deactivation events.
//!
//! Each step consumes randomness in a fixed order so that runs are
//! bit-reproducible for a given seed:
//!
//! 1. one `f64` in `[0, 1)` picks the event type (`< p_v` vertex,
//!    `< p_v + p_e` edge, otherwise deactivation);
//! 2. for vertex and edge events, the cardinality law draws `y`;
//! 3. vertex selections follow one by one, each an integer rank drawn
//!    uniformly from `1..=D_t` and resolved by [`DegreeIndex::select_rank`].
//!
//! All selections of one event see the degree table as it was at the start
//! of the event; the new hyperedge is applied afterwards.

mod ensemble;
mod trace;

pub use ensemble::{ensemble, ensemble_map, ensemble_map_range, run_seed, SEED_DERIVATION_VERSION};
pub use trace::{RunTrace, TraceRow};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cardinality::CardinalityLaw;
use crate::histogram::DegreeHistogram;
use crate::params::{ParamError, Probabilities};
use crate::sampler::{DegreeIndex, SamplerError, VertexId};

/// Random number generator driving a single run.
pub type RunRng = ChaCha8Rng;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// A finite starting hypergraph; every vertex must lie in some hyperedge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialHypergraph {
    vertices: usize,
    hyperedges: Vec<Vec<u32>>,
}

impl Default for InitialHypergraph {
    /// A single vertex covered by one hyperedge of cardinality 1.
    fn default() -> Self {
        Self {
            vertices: 1,
            hyperedges: vec![vec![0]],
        }
    }
}

impl InitialHypergraph {
    pub fn new(vertices: usize, hyperedges: Vec<Vec<u32>>) -> Result<Self, ProcessError> {
        if vertices == 0 {
            return Err(ProcessError::Config("initial hypergraph has no vertices".into()));
        }
        let mut degree = vec![0u64; vertices];
        for edge in &hyperedges {
            if edge.is_empty() {
                return Err(ProcessError::Config("initial hyperedges must be non-empty".into()));
            }
            for &v in edge {
                let slot = degree.get_mut(v as usize).ok_or_else(|| {
                    ProcessError::Config(format!("initial hyperedge names unknown vertex {v}"))
                })?;
                *slot += 1;
            }
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(ProcessError::Config(format!(
                "initial vertex {v} belongs to no hyperedge"
            )));
        }
        Ok(Self {
            vertices,
            hyperedges,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn hyperedges(&self) -> &[Vec<u32>] {
        &self.hyperedges
    }

    fn degrees(&self) -> Vec<u64> {
        let mut degree = vec![0u64; self.vertices];
        for edge in &self.hyperedges {
            for &v in edge {
                degree[v as usize] += 1;
            }
        }
        degree
    }
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub probabilities: Probabilities,
    pub cardinality: CardinalityLaw,
    pub steps: u64,
    pub seed: u64,
    pub store_hyperedges: bool,
    /// Strictly increasing steps at which degree histograms are taken.
    pub snapshot_times: Vec<u64>,
    /// Trace rows are kept for steps divisible by this stride (and for the
    /// last executed step). `1` keeps every step.
    pub trace_stride: u64,
    pub initial: InitialHypergraph,
}

impl ModelParams {
    pub fn new(probabilities: Probabilities, cardinality: CardinalityLaw, steps: u64) -> Self {
        Self {
            probabilities,
            cardinality,
            steps,
            seed: 0,
            store_hyperedges: false,
            snapshot_times: Vec::new(),
            trace_stride: 1,
            initial: InitialHypergraph::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<u64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_trace_stride(mut self, stride: u64) -> Self {
        self.trace_stride = stride;
        self
    }

    pub fn with_hyperedge_log(mut self, on: bool) -> Self {
        self.store_hyperedges = on;
        self
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        let p = self.probabilities;
        // re-run the probability checks in case the struct was built by hand
        Probabilities::new(p.vertex(), p.edge(), p.deactivation())?;
        if self.trace_stride == 0 {
            return Err(ProcessError::Config("trace stride must be positive".into()));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProcessError::Config(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Flat storage of hyperedges added during a run (multiplicity by repetition).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HyperedgeLog {
    members: Vec<VertexId>,
    ends: Vec<usize>,
}

impl HyperedgeLog {
    fn push(&mut self, edge: impl IntoIterator<Item = VertexId>) {
        self.members.extend(edge);
        self.ends.push(self.members.len());
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[VertexId]> + '_ {
        let starts = std::iter::once(0).chain(self.ends.iter().copied());
        starts.zip(self.ends.iter().copied()).map(|(s, e)| &self.members[s..e])
    }

    /// One hyperedge per line, space-separated vertex ids.
    pub fn write_text<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for edge in self.iter() {
            let mut first = true;
            for v in edge {
                if !first {
                    out.write_all(b" ")?;
                }
                write!(out, "{v}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Outcome of one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepEvent {
    /// A new vertex joined together with `cardinality - 1` selected vertices.
    VertexAdded {
        vertex: VertexId,
        cardinality: u64,
        selected: Vec<VertexId>,
    },
    EdgeAdded {
        cardinality: u64,
        selected: Vec<VertexId>,
    },
    /// `degree` is `Θ_t`, the frozen degree of the deactivated vertex.
    Deactivated { vertex: VertexId, degree: u64 },
    /// No active vertex is left; the state is frozen.
    Terminated,
}

/// The evolving hypergraph and its bookkeeping counters.
#[derive(Clone, Debug)]
pub struct GrowthState {
    index: DegreeIndex,
    t: u64,
    initial_vertices: u64,
    initial_degree_sum: u64,
    vertex_events: u64,
    edge_events: u64,
    deactivations: u64,
    added_cardinality: u64,
    deactivated_degree: u64,
    terminated: bool,
    hyperedges: Option<HyperedgeLog>,
}

/// Builds the initial state from `params.initial`.
pub fn initialize(params: &ModelParams) -> Result<GrowthState, ProcessError> {
    params.validate()?;
    let degrees = params.initial.degrees();
    let mut index = DegreeIndex::with_capacity(degrees.len() + params.steps as usize / 2);
    for &d in &degrees {
        index.push_vertex(d);
    }
    let hyperedges = params.store_hyperedges.then(|| {
        let mut log = HyperedgeLog::default();
        for edge in params.initial.hyperedges() {
            log.push(edge.iter().map(|&v| VertexId(v)));
        }
        log
    });
    Ok(GrowthState {
        initial_degree_sum: index.total_weight(),
        initial_vertices: degrees.len() as u64,
        index,
        t: 0,
        vertex_events: 0,
        edge_events: 0,
        deactivations: 0,
        added_cardinality: 0,
        deactivated_degree: 0,
        terminated: false,
        hyperedges,
    })
}

impl GrowthState {
    pub fn index(&self) -> &DegreeIndex {
        &self.index
    }

    /// Number of executed steps.
    pub fn time(&self) -> u64 {
        self.t
    }

    /// `D_t`.
    pub fn active_degree_sum(&self) -> u64 {
        self.index.total_weight()
    }

    /// `A_t`.
    pub fn active_vertices(&self) -> u64 {
        self.index.active_count() as u64
    }

    /// `I_t`.
    pub fn inactive_vertices(&self) -> u64 {
        self.index.inactive_count() as u64
    }

    /// `|V_t|`.
    pub fn vertices(&self) -> u64 {
        self.index.len() as u64
    }

    pub fn initial_vertices(&self) -> u64 {
        self.initial_vertices
    }

    /// `D_0`.
    pub fn initial_degree_sum(&self) -> u64 {
        self.initial_degree_sum
    }

    pub fn vertex_events(&self) -> u64 {
        self.vertex_events
    }

    pub fn edge_events(&self) -> u64 {
        self.edge_events
    }

    pub fn deactivations(&self) -> u64 {
        self.deactivations
    }

    /// `Σ y` over applied vertex and edge events.
    pub fn added_cardinality(&self) -> u64 {
        self.added_cardinality
    }

    /// `Σ Θ` over applied deactivations.
    pub fn deactivated_degree(&self) -> u64 {
        self.deactivated_degree
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn hyperedges(&self) -> Option<&HyperedgeLog> {
        self.hyperedges.as_ref()
    }

    pub fn histogram(&self) -> DegreeHistogram {
        DegreeHistogram::from_index(&self.index, self.t)
    }

    /// Checks `D_t = D_0 + Σ y − Σ Θ` (exact).
    pub fn conservation_holds(&self) -> bool {
        self.initial_degree_sum + self.added_cardinality
            == self.active_degree_sum() + self.deactivated_degree
    }

    fn select_into<R: Rng + ?Sized>(
        &self,
        count: u64,
        rng: &mut R,
        out: &mut Vec<VertexId>,
    ) -> Result<(), SamplerError> {
        let total = self.index.total_weight();
        for _ in 0..count {
            let rank = rng.random_range(1..=total);
            out.push(self.index.select_rank(rank)?);
        }
        Ok(())
    }

    /// Performs one step of the process.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        probabilities: &Probabilities,
        law: &CardinalityLaw,
        rng: &mut R,
    ) -> Result<StepEvent, ProcessError> {
        if self.terminated || self.index.total_weight() == 0 {
            self.terminated = true;
            return Ok(StepEvent::Terminated);
        }
        let u: f64 = rng.random();
        let event = if u < probabilities.vertex() {
            let y = law.sample(rng);
            let mut selected = Vec::with_capacity(y as usize);
            self.select_into(y - 1, rng, &mut selected)?;
            let vertex = self.index.push_vertex(1);
            for &v in &selected {
                self.index.add_degree(v, 1)?;
            }
            if let Some(log) = &mut self.hyperedges {
                log.push(std::iter::once(vertex).chain(selected.iter().copied()));
            }
            self.vertex_events += 1;
            self.added_cardinality += y;
            StepEvent::VertexAdded {
                vertex,
                cardinality: y,
                selected,
            }
        } else if u < probabilities.growth() {
            let y = law.sample(rng);
            let mut selected = Vec::with_capacity(y as usize);
            self.select_into(y, rng, &mut selected)?;
            for &v in &selected {
                self.index.add_degree(v, 1)?;
            }
            if let Some(log) = &mut self.hyperedges {
                log.push(selected.iter().copied());
            }
            self.edge_events += 1;
            self.added_cardinality += y;
            StepEvent::EdgeAdded {
                cardinality: y,
                selected,
            }
        } else {
            let rank = rng.random_range(1..=self.index.total_weight());
            let vertex = self.index.select_rank(rank)?;
            let degree = self.index.deactivate(vertex)?;
            self.deactivations += 1;
            self.deactivated_degree += degree;
            StepEvent::Deactivated { vertex, degree }
        };
        self.t += 1;
        Ok(event)
    }
}

/// A run in progress: parameters, state and rng.
pub struct Simulation<'a> {
    params: &'a ModelParams,
    state: GrowthState,
    rng: RunRng,
}

impl<'a> Simulation<'a> {
    pub fn new(params: &'a ModelParams) -> Result<Self, ProcessError> {
        Ok(Self {
            state: initialize(params)?,
            rng: RunRng::seed_from_u64(params.seed),
            params,
        })
    }

    pub fn state(&self) -> &GrowthState {
        &self.state
    }

    pub fn step(&mut self) -> Result<StepEvent, ProcessError> {
        self.state
            .step(&self.params.probabilities, &self.params.cardinality, &mut self.rng)
    }

    /// Runs to `params.steps` (or termination) and returns the final state
    /// together with the recorded trace.
    pub fn run_to_end(mut self) -> Result<(GrowthState, RunTrace), ProcessError> {
        let params = self.params;
        let mut trace = RunTrace::with_capacity((params.steps / params.trace_stride) as usize + 1);
        let mut snapshots = params.snapshot_times.iter().copied().peekable();
        while let Some(&s) = snapshots.peek() {
            if s > 0 {
                break;
            }
            trace.snapshots.push(self.state.histogram());
            snapshots.next();
        }
        while self.state.t < params.steps {
            if let StepEvent::Terminated = self.step()? {
                trace.terminated_at = Some(self.state.t + 1);
                break;
            }
            let t = self.state.t;
            if t.is_multiple_of(params.trace_stride) || t == params.steps {
                trace.record(&self.state);
            }
            if snapshots.peek() == Some(&t) {
                trace.snapshots.push(self.state.histogram());
                snapshots.next();
            }
        }
        if trace.terminated_at.is_some() {
            if trace.times().last() != Some(&self.state.t) && self.state.t > 0 {
                trace.record(&self.state);
            }
            // the state is frozen from here on
            for s in snapshots.filter(|&s| s <= params.steps) {
                let mut h = self.state.histogram();
                h.set_time(s);
                trace.snapshots.push(h);
            }
        }
        trace.hyperedges = self.state.hyperedges.take();
        Ok((self.state, trace))
    }
}

/// Runs the process described by `params` from its initial hypergraph.
pub fn run(params: &ModelParams) -> Result<RunTrace, ProcessError> {
    Simulation::new(params)?.run_to_end().map(|(_, trace)| trace)
}
