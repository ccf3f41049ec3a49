//! K3-bootstrap closure, recorded activation processes and small exact
//! searches.

use std::collections::VecDeque;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, connected_components, BitMatrix, Edge, Graph, Triangle, UnionFind, Vertex};
use crate::seed::Seed;

/// One activation: `edge` is added, completing `triangle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActivationStep {
    pub edge: Edge,
    pub triangle: Triangle,
}

impl ActivationStep {
    pub fn new(edge: Edge, triangle: Triangle) -> Self {
        Self { edge, triangle }
    }

    /// The two edges of the triangle other than the activated one.
    pub fn supports(&self) -> [Edge; 2] {
        let apex = self.triangle.apex(self.edge);
        [Edge::new(self.edge.0, apex), Edge::new(self.edge.1, apex)]
    }
}

/// A starter `H`, inside an ambient graph, with ordered steps. Step `i`
/// (1-based) is `steps[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationProcess {
    pub starter: Graph,
    pub ambient: Graph,
    pub steps: Vec<ActivationStep>,
    pub target: Graph,
}

impl ActivationProcess {
    pub fn n(&self) -> usize {
        self.ambient.n()
    }

    /// Starter plus every activated edge.
    pub fn activated_graph(&self) -> Graph {
        self.starter.with_edges(self.steps.iter().map(|s| s.edge)).expect("edges in range")
    }

    pub fn with_target(mut self, target: Graph) -> Self {
        self.target = target;
        self
    }

    /// Checks every structural invariant of a process.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProcess(m));
        let n = self.ambient.n();
        if self.starter.n() != n || self.target.n() != n {
            return bad("starter, ambient and target must share the vertex set".into());
        }
        if !self.starter.is_subgraph_of(&self.ambient) {
            return bad("starter not contained in ambient".into());
        }
        let mut active = BitMatrix::new(n);
        for e in self.starter.edges() {
            active.set_sym(e.0 as usize, e.1 as usize);
        }
        let on = |a: &BitMatrix, e: Edge| a.get(e.0 as usize, e.1 as usize);
        for (i, s) in self.steps.iter().enumerate() {
            if !s.triangle.contains_edge(s.edge) {
                return bad(format!("step {}: edge {:?} not in triangle {:?}", i + 1, s.edge, s.triangle));
            }
            if !self.ambient.has_triangle(s.triangle) {
                return bad(format!("step {}: triangle {:?} not in ambient", i + 1, s.triangle));
            }
            if on(&active, s.edge) {
                return bad(format!("step {}: edge {:?} already active", i + 1, s.edge));
            }
            for f in s.supports() {
                if !on(&active, f) {
                    return bad(format!("step {}: support {:?} not yet active", i + 1, f));
                }
            }
            active.set_sym(s.edge.0 as usize, s.edge.1 as usize);
        }
        for e in self.target.edges() {
            if !on(&active, e) {
                return bad(format!("target edge {e:?} never activated"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> ProcessJson {
        ProcessJson {
            starter: self.starter.edge_vec(),
            steps: self.steps.iter().map(|s| StepJson { edge: s.edge, triangle: s.triangle }).collect(),
            n: Some(self.n()),
            ambient: Some(self.ambient.edge_vec()),
            target: Some(self.target.edge_vec()),
        }
    }

    /// Rebuilds a process. Missing ambient defaults to the activated graph
    /// plus all triangle edges; missing target defaults to the activated graph.
    pub fn from_json(j: &ProcessJson) -> Result<Self> {
        let max_label = j
            .starter
            .iter()
            .flat_map(|e| [e.0, e.1])
            .chain(j.steps.iter().flat_map(|s| s.triangle.0))
            .chain(j.ambient.iter().flatten().flat_map(|e| [e.0, e.1]))
            .max()
            .map_or(0, |m| m as usize + 1);
        let n = j.n.unwrap_or(max_label);
        let starter = Graph::from_edges(n, j.starter.iter().copied())?;
        let steps: Vec<ActivationStep> = j.steps.iter().map(|s| ActivationStep::new(s.edge, s.triangle)).collect();
        let ambient = match &j.ambient {
            Some(a) => Graph::from_edges(n, a.iter().copied())?,
            None => starter.with_edges(steps.iter().flat_map(|s| s.triangle.edges()))?,
        };
        let activated = starter.with_edges(steps.iter().map(|s| s.edge))?;
        let target = match &j.target {
            Some(t) => Graph::from_edges(n, t.iter().copied())?,
            None => activated,
        };
        let p = ActivationProcess { starter, ambient, steps, target };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepJson {
    pub edge: Edge,
    pub triangle: Triangle,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessJson {
    pub starter: Vec<Edge>,
    pub steps: Vec<StepJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Vec<Edge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<Edge>>,
}

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub closure: Graph,
    pub process: ActivationProcess,
    pub fully_activated: bool,
}

/// Which triangles may drive activation.
pub trait ClosureRule {
    fn n(&self) -> usize;
    /// Row of ambient neighbours of `v`, or `None` when the ambient graph
    /// is complete.
    fn ambient_row(&self, v: Vertex) -> Option<&[u64]>;
    /// Whether the triangle `missing ∪ {apex}` may activate `missing`,
    /// given that both edges to `apex` are active.
    fn allows(&self, missing: Edge, apex: Vertex) -> bool;
    fn ambient_edge_count(&self) -> usize;
}

pub struct GraphRule<'a>(pub &'a Graph);

impl ClosureRule for GraphRule<'_> {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn ambient_row(&self, v: Vertex) -> Option<&[u64]> {
        Some(self.0.bits().row(v as usize))
    }
    fn allows(&self, _missing: Edge, _apex: Vertex) -> bool {
        true
    }
    fn ambient_edge_count(&self) -> usize {
        self.0.m()
    }
}

pub(crate) enum Schedule {
    Fifo,
    Random(rand_chacha::ChaCha8Rng),
}

/// Output of the closure engine.
pub(crate) struct RawClosure {
    pub edges: Vec<Edge>,
    pub steps: Vec<ActivationStep>,
}

struct Engine<'a, R> {
    rule: &'a R,
    words: usize,
    active: BitMatrix,
    queued: BitMatrix,
    schedule: Schedule,
    fifo: VecDeque<ActivationStep>,
    pool: Vec<ActivationStep>,
    batch: Vec<ActivationStep>,
}

impl<R: ClosureRule> Engine<'_, R> {
    /// Queues every inactive edge completing a usable triangle with `x y`.
    fn enable(&mut self, x: Vertex, y: Vertex) {
        for (a, b) in [(x, y), (y, x)] {
            let amb = self.rule.ambient_row(a);
            for wi in 0..self.words {
                let mut m = self.active.row(b as usize)[wi] & !self.active.row(a as usize)[wi] & !self.queued.row(a as usize)[wi];
                if let Some(amb) = amb {
                    m &= amb[wi];
                }
                while m != 0 {
                    let w = (wi * 64 + m.trailing_zeros() as usize) as Vertex;
                    m &= m - 1;
                    if w == a {
                        continue;
                    }
                    let e = Edge::new(a, w);
                    if self.rule.allows(e, b) {
                        self.queued.set_sym(a as usize, w as usize);
                        self.batch.push(ActivationStep::new(e, Triangle::from_edge(e, b)));
                    }
                }
            }
        }
    }

    fn flush(&mut self) {
        self.batch.sort_unstable_by_key(|s| s.edge);
        match self.schedule {
            Schedule::Fifo => self.fifo.extend(self.batch.drain(..)),
            Schedule::Random(_) => self.pool.append(&mut self.batch),
        }
    }

    fn pop(&mut self) -> Option<ActivationStep> {
        match &mut self.schedule {
            Schedule::Fifo => self.fifo.pop_front(),
            Schedule::Random(rng) => {
                if self.pool.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..self.pool.len());
                    Some(self.pool.swap_remove(i))
                }
            }
        }
    }
}

/// Runs the closure. Each candidate is queued once, together with the
/// triangle that first enabled it; every batch of new candidates is sorted
/// lexicographically before entering the queue.
pub(crate) fn run_closure<R: ClosureRule>(rule: &R, starter: &Graph, schedule: Schedule, record: bool) -> RawClosure {
    let n = rule.n();
    let mut eng = Engine {
        rule,
        words: n.div_ceil(64),
        active: BitMatrix::new(n),
        queued: BitMatrix::new(n),
        schedule,
        fifo: VecDeque::new(),
        pool: Vec::new(),
        batch: Vec::new(),
    };
    let mut edges = starter.edge_vec();
    for e in &edges {
        eng.active.set_sym(e.0 as usize, e.1 as usize);
        eng.queued.set_sym(e.0 as usize, e.1 as usize);
    }
    for e in &edges {
        eng.enable(e.0, e.1);
    }
    eng.flush();
    let mut steps = Vec::new();
    while let Some(step) = eng.pop() {
        let e = step.edge;
        eng.active.set_sym(e.0 as usize, e.1 as usize);
        edges.push(e);
        if record {
            steps.push(step);
        }
        eng.enable(e.0, e.1);
        eng.flush();
    }
    RawClosure { edges, steps }
}

fn check_containment(starter: &Graph, ambient: &Graph) -> Result<()> {
    if starter.n() != ambient.n() {
        return Err(Error::Containment("starter and ambient differ in vertex count".into()));
    }
    if let Some(e) = starter.edges().find(|&e| !ambient.contains(e)) {
        return Err(Error::Containment(format!("starter edge {e:?} missing from ambient")));
    }
    Ok(())
}

fn closure_with(starter: &Graph, ambient: &Graph, schedule: Schedule) -> Result<ClosureResult> {
    check_containment(starter, ambient)?;
    let raw = run_closure(&GraphRule(ambient), starter, schedule, true);
    let closure = Graph::from_edges(ambient.n(), raw.edges)?;
    let fully_activated = closure.m() == ambient.m();
    let process = ActivationProcess { starter: starter.clone(), ambient: ambient.clone(), steps: raw.steps, target: closure.clone() };
    Ok(ClosureResult { closure, process, fully_activated })
}

/// K3-bootstrap closure of `starter` inside `ambient`, in canonical FIFO order.
pub fn k3_closure(starter: &Graph, ambient: &Graph) -> Result<ClosureResult> {
    closure_with(starter, ambient, Schedule::Fifo)
}

/// Same closure with candidates taken in a seeded random order.
pub fn k3_closure_shuffled(starter: &Graph, ambient: &Graph, seed: Seed) -> Result<ClosureResult> {
    closure_with(starter, ambient, Schedule::Random(seed.rng()))
}

/// Number of closure edges, without recording the process.
pub fn closure_size(starter: &Graph, ambient: &Graph) -> Result<usize> {
    check_containment(starter, ambient)?;
    Ok(run_closure(&GraphRule(ambient), starter, Schedule::Fifo, false).edges.len())
}

/// Whether the closure of `starter` is all of `ambient`.
pub fn fully_activates(starter: &Graph, ambient: &Graph) -> Result<bool> {
    Ok(closure_size(starter, ambient)? == ambient.m())
}

pub fn activates(starter: &Graph, ambient: &Graph, target: &Graph) -> Result<bool> {
    if !target.is_subgraph_of(ambient) {
        return Err(Error::Containment("target not contained in ambient".into()));
    }
    let c = k3_closure(starter, ambient)?;
    Ok(target.is_subgraph_of(&c.closure))
}

#[derive(Debug, Clone)]
pub struct WsatResult {
    pub value: usize,
    pub witness: Graph,
    /// The input was disconnected and `value` is the per-component sum.
    pub disconnected: bool,
}

pub const DEFAULT_VERTEX_BUDGET: usize = 8;

/// Exact weak saturation number of `g` for K3 by exhaustive search.
/// Subsets are tried by size from `n - 1` upward in lexicographic order, so
/// the witness is the lexicographically first minimum one.
pub fn wsat_exact_k3(g: &Graph, vertex_budget: usize) -> Result<WsatResult> {
    if g.n() > vertex_budget {
        return Err(Error::Feasibility(format!("n={} exceeds vertex budget {vertex_budget}", g.n())));
    }
    let comps = connected_components(g);
    if comps.len() <= 1 {
        let (value, witness) = wsat_connected(g)?;
        return Ok(WsatResult { value, witness, disconnected: false });
    }
    let mut value = 0;
    let mut witness_edges = Vec::new();
    for comp in comps {
        if comp.len() == 1 {
            continue;
        }
        let local: std::collections::HashMap<Vertex, Vertex> = comp.iter().enumerate().map(|(i, &v)| (v, i as Vertex)).collect();
        let sub = Graph::from_edges(
            comp.len(),
            g.edges().filter(|e| local.contains_key(&e.0)).map(|e| Edge::new(local[&e.0], local[&e.1])),
        )?;
        let (v, w) = wsat_connected(&sub)?;
        value += v;
        witness_edges.extend(w.edges().map(|e| Edge::new(comp[e.0 as usize], comp[e.1 as usize])));
    }
    Ok(WsatResult { value, witness: Graph::from_edges(g.n(), witness_edges)?, disconnected: true })
}

fn wsat_connected(g: &Graph) -> Result<(usize, Graph)> {
    let n = g.n();
    let edges = g.edge_vec();
    if n <= 1 {
        return Ok((0, Graph::empty(n)));
    }
    for k in n - 1..=edges.len() {
        for subset in edges.iter().copied().combinations(k) {
            let mut uf = UnionFind::new(n);
            let comps = n - subset.iter().filter(|e| uf.union(e.0 as usize, e.1 as usize)).count();
            if comps != 1 {
                continue;
            }
            let h = Graph::from_edges(n, subset)?;
            if fully_activates(&h, g)? {
                return Ok((k, h));
            }
        }
    }
    Err(Error::Internal("the graph itself always activates".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct TreeSearch {
    pub answer: Answer,
    pub witness: Option<Vec<Edge>>,
    pub trees_tested: usize,
}

/// Searches spanning trees of `g` for one whose closure is `g`.
pub fn exists_activating_spanning_tree(g: &Graph, tree_limit: usize) -> Result<TreeSearch> {
    if !g.is_connected() {
        return Ok(TreeSearch { answer: Answer::No, witness: None, trees_tested: 0 });
    }
    let mut tested = 0;
    for t in graph::spanning_trees(g, tree_limit)? {
        tested += 1;
        let tg = Graph::from_edges(g.n(), t.iter().copied())?;
        if fully_activates(&tg, g)? {
            return Ok(TreeSearch { answer: Answer::Yes, witness: Some(t), trees_tested: tested });
        }
    }
    let exhausted = match graph::spanning_tree_count_exact(g) {
        Some(c) => c <= tested as u128,
        None => false,
    };
    let answer = if exhausted { Answer::No } else { Answer::Unknown };
    Ok(TreeSearch { answer, witness: None, trees_tested: tested })
}
