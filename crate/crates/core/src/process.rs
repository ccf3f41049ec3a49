//! Contribution and excess of activation processes, nice processes and
//! their reduction, subprocesses and unions, and the diagram census.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{k3_closure, ActivationProcess, ActivationStep};
use crate::diagram::{activation_diagram, is_path, tree_filling, DiagramJson, PlanarDiagram};
use crate::error::{Error, Result};
use crate::graph::{gnp, Edge, Graph, Triangle, UnionFind, Vertex};
use crate::seed::Seed;
use crate::topology::{
    activation_complex_unchecked, check_cycle, clique_complex_2, cycle_edges, fundamental_cycles, same_cycle,
    FillingCertificate, TwoComplex,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAccount {
    pub edge: Edge,
    pub contribution: usize,
    pub excess: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcessLedger {
    /// One entry per edge of the activation complex, sorted by edge.
    pub edges: Vec<EdgeAccount>,
    pub total_excess: i64,
    /// d_H = |E(H)| - |V(H)| + 1.
    pub complexity: i64,
}

impl ExcessLedger {
    fn find(&self, e: Edge) -> Option<&EdgeAccount> {
        self.edges.binary_search_by(|a| a.edge.cmp(&e)).ok().map(|i| &self.edges[i])
    }

    pub fn contribution(&self, e: Edge) -> Option<usize> {
        self.find(e).map(|a| a.contribution)
    }

    pub fn excess(&self, e: Edge) -> Option<i64> {
        self.find(e).map(|a| a.excess)
    }

    pub fn is_nice(&self) -> bool {
        self.edges.iter().all(|a| a.excess >= 0)
    }
}

pub fn ledger(proc: &ActivationProcess) -> Result<ExcessLedger> {
    proc.validate()?;
    Ok(ledger_unchecked(proc))
}

fn ledger_unchecked(proc: &ActivationProcess) -> ExcessLedger {
    let k = activation_complex_unchecked(proc);
    let mut con: BTreeMap<Edge, usize> = k.edges().iter().map(|&e| (e, 0)).collect();
    for s in &proc.steps {
        for e in s.triangle.edges() {
            if e != s.edge {
                *con.get_mut(&e).expect("triangle edges lie in the complex") += 1;
            }
        }
    }
    let mut total = 0;
    let edges = con
        .into_iter()
        .map(|(edge, c)| {
            let excess = c as i64
                - match (proc.starter.contains(edge), proc.target.contains(edge)) {
                    (false, true) => 0,
                    (true, false) => 2,
                    _ => 1,
                };
            total += excess;
            EdgeAccount { edge, contribution: c, excess }
        })
        .collect();
    let h = &proc.starter;
    let complexity = h.m() as i64 - h.touched_vertices().len() as i64 + 1;
    ExcessLedger { edges, total_excess: total, complexity }
}

/// False for invalid processes.
pub fn is_nice(proc: &ActivationProcess) -> bool {
    ledger(proc).is_ok_and(|l| l.is_nice())
}

/// The first edge with negative excess: starter edges in lexicographic
/// order, then activated edges in step order.
fn first_negative(proc: &ActivationProcess, l: &ExcessLedger) -> Option<Edge> {
    let neg = |e: Edge| l.excess(e).is_some_and(|x| x < 0);
    proc.starter.edges().find(|&e| neg(e)).or_else(|| proc.steps.iter().map(|s| s.edge).find(|&e| neg(e)))
}

fn cycle_graph(n: usize, c: &[Vertex]) -> Result<Graph> {
    Graph::from_edges(n, cycle_edges(c))
}

/// The vertex cycle traced by a 2-regular connected edge set.
pub fn cycle_from_edges(edges: &[Edge]) -> Option<Vec<Vertex>> {
    if edges.len() < 3 {
        return None;
    }
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    if adj.values().any(|a| a.len() != 2) {
        return None;
    }
    let start = *adj.keys().next()?;
    let mut c = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        c.push(cur);
        let nb = &adj[&cur];
        let nx = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = nx;
    }
    (c.len() == edges.len()).then_some(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ReductionStep {
    RestrictComponent { vertices: Vec<Vertex> },
    DropTriangle { edge: Edge, triangle: Triangle },
    DropStarterEdge { edge: Edge },
    SwapStarterEdge { removed: Edge, added: Edge, triangle: Triangle },
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub process: ActivationProcess,
    pub certificate: FillingCertificate,
    pub trace: Vec<ReductionStep>,
}

fn k_of(p: &ActivationProcess) -> TwoComplex {
    activation_complex_unchecked(p)
}

/// Restricts to the component of K's 1-skeleton holding `c`.
fn restrict_to_component(p: &ActivationProcess, c: &[Vertex]) -> Option<(ActivationProcess, Vec<Vertex>)> {
    let k = k_of(p);
    let g = k.skeleton();
    let dist = crate::graph::bfs(&g, c[0]);
    let keep: Vec<Vertex> = k.vertices().iter().copied().filter(|&v| dist[v as usize] != usize::MAX).collect();
    if keep.len() == k.vertices().len() {
        return None;
    }
    let inside: HashSet<Vertex> = keep.iter().copied().collect();
    let steps = p.steps.iter().filter(|s| s.triangle.0.iter().all(|v| inside.contains(v))).copied().collect();
    let q = ActivationProcess { starter: p.starter.restrict(&keep), ambient: p.ambient.clone(), steps, target: p.target.clone() };
    Some((q, keep))
}

fn collapse_preimages(cert: &mut FillingCertificate, e: Edge) -> Result<()> {
    loop {
        let hit = cert.disc.live_darts().find(|&h| cert.disc.dart_edge(h) == e);
        let Some(h) = hit else { break };
        cert.disc.collapse_edge(h)?;
    }
    Ok(())
}

/// Refines `proc` to a nice subprocess activating `c`, carrying the filling
/// `cert` of `c` through each refinement by disc surgery.
pub fn reduce_to_nice(proc: &ActivationProcess, c: &[Vertex], cert: &FillingCertificate) -> Result<Reduction> {
    proc.validate()?;
    let k0 = k_of(proc);
    check_cycle(&k0, c)?;
    if !same_cycle(&cert.boundary_cycle, c) {
        return Err(Error::Precondition("certificate fills a different cycle".into()));
    }
    cert.validate(&k0).map_err(|e| Error::Precondition(format!("contractibility certificate rejected: {e}")))?;
    let degenerate = cert.disc.triangle_faces().into_iter().any(|f| cert.disc.face_labels(f).iter().collect::<BTreeSet<_>>().len() < 3);
    if degenerate {
        return Err(Error::Precondition("certificate has degenerate faces".into()));
    }
    let mut p = proc.clone().with_target(cycle_graph(proc.n(), c)?);
    p.validate()?;
    let mut cert = cert.clone();
    let mut trace = Vec::new();
    let breach = |m: String, trace: &[ReductionStep]| Error::Internal(format!("{m}; trace: {}", serde_json::to_string(trace).unwrap_or_default()));
    if let Some((q, keep)) = restrict_to_component(&p, c) {
        p = q;
        trace.push(ReductionStep::RestrictComponent { vertices: keep });
    }
    let cset: HashSet<Edge> = cycle_edges(c).into_iter().collect();
    loop {
        let l = ledger_unchecked(&p);
        let Some(e) = first_negative(&p, &l) else { break };
        let before = k_of(&p);
        if cset.contains(&e) {
            return Err(breach(format!("cycle edge {e:?} has negative excess"), &trace));
        }
        let con = l.contribution(e).unwrap_or(0);
        if !p.starter.contains(e) {
            let i = p.steps.iter().position(|s| s.edge == e).ok_or_else(|| breach(format!("{e:?} is never activated"), &trace))?;
            let step = p.steps.remove(i);
            collapse_preimages(&mut cert, e)?;
            trace.push(ReductionStep::DropTriangle { edge: e, triangle: step.triangle });
        } else if con == 0 {
            p.starter = p.starter.without_edge(e);
            trace.push(ReductionStep::DropStarterEdge { edge: e });
            if let Some((q, keep)) = restrict_to_component(&p, c) {
                p = q;
                trace.push(ReductionStep::RestrictComponent { vertices: keep });
            }
        } else if con == 1 {
            let i = p.steps.iter().position(|s| s.triangle.contains_edge(e)).expect("contribution counted a triangle");
            let step = p.steps.remove(i);
            p.starter = p.starter.without_edge(e).with_edges([step.edge])?;
            collapse_preimages(&mut cert, e)?;
            trace.push(ReductionStep::SwapStarterEdge { removed: e, added: step.edge, triangle: step.triangle });
        } else {
            return Err(breach(format!("starter edge {e:?} with contribution {con} has negative excess"), &trace));
        }
        p.validate().map_err(|err| breach(format!("refined process invalid: {err}"), &trace))?;
        let after = k_of(&p);
        if !after.is_subcomplex_of(&before) || after == before {
            return Err(breach("activation complex did not shrink".into(), &trace));
        }
        cert.validate(&after).map_err(|err| breach(format!("certificate lost: {err}"), &trace))?;
    }
    if !p.starter.is_connected_on_support() {
        return Err(breach("nice starter is disconnected".into(), &trace));
    }
    Ok(Reduction { process: p, certificate: cert, trace })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBoundReport {
    pub ell: usize,
    pub steps: usize,
    pub complex_edges: usize,
    pub starter_edges: usize,
    pub starter_vertices: usize,
    pub complexity: i64,
    pub excess: i64,
    /// 2s = 2|E(K)| - 2|E(H)|.
    pub double_counting: bool,
    /// |E(K)| = 3|E(H)| + exc - ell.
    pub edge_identity: bool,
    /// |E(K)| >= 3|V(H)| + 3 d_H + exc - (3 + ell).
    pub inequality: bool,
}

impl EdgeBoundReport {
    pub fn holds(&self) -> bool {
        self.double_counting && self.edge_identity && self.inequality
    }
}

pub fn edge_lower_bound_check(proc: &ActivationProcess) -> Result<EdgeBoundReport> {
    let l = ledger(proc)?;
    let target = proc.target.edge_vec();
    if cycle_from_edges(&target).is_none() {
        return Err(Error::NotACycle("target is not a cycle".into()));
    }
    if !l.is_nice() {
        return Err(Error::Precondition("process is not nice".into()));
    }
    let ell = target.len() as i64;
    let s = proc.steps.len() as i64;
    let k = l.edges.len() as i64;
    let h = proc.starter.m() as i64;
    let vh = proc.starter.touched_vertices().len() as i64;
    let exc = l.total_excess;
    Ok(EdgeBoundReport {
        ell: ell as usize,
        steps: s as usize,
        complex_edges: k as usize,
        starter_edges: h as usize,
        starter_vertices: vh as usize,
        complexity: l.complexity,
        excess: exc,
        double_counting: 2 * s == 2 * k - 2 * h,
        edge_identity: k == 3 * h + exc - ell,
        inequality: k >= 3 * vh + 3 * l.complexity + exc - (3 + ell),
    })
}

/// A subprocess of a shared parent: its own starter plus an increasing
/// list of parent step indices.
#[derive(Debug, Clone)]
pub struct SubprocessRef {
    parent: Arc<ActivationProcess>,
    starter: Graph,
    steps: Vec<usize>,
}

impl PartialEq for SubprocessRef {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.starter == other.starter && self.steps == other.steps
    }
}

impl SubprocessRef {
    pub fn new(parent: Arc<ActivationProcess>, starter: Graph, steps: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidProcess(m));
        if steps.windows(2).any(|w| w[0] >= w[1]) || steps.last().is_some_and(|&i| i >= parent.steps.len()) {
            return bad("step indices must be increasing and in range".into());
        }
        let k = activation_complex_unchecked(&parent);
        if let Some(e) = starter.edges().find(|e| !k.has_edge(*e)) {
            return bad(format!("starter edge {e:?} is outside the parent complex"));
        }
        let mut active: HashSet<Edge> = starter.edges().collect();
        for &i in &steps {
            let s = parent.steps[i];
            let missing: Vec<Edge> = s.triangle.edges().into_iter().filter(|e| !active.contains(e)).collect();
            if missing != [s.edge] {
                return bad(format!("parent step {} does not activate {:?} here", i + 1, s.edge));
            }
            active.insert(s.edge);
        }
        Ok(SubprocessRef { parent, starter, steps })
    }

    pub fn full(parent: Arc<ActivationProcess>) -> Self {
        let starter = parent.starter.clone();
        let steps = (0..parent.steps.len()).collect();
        SubprocessRef { parent, starter, steps }
    }

    pub fn parent(&self) -> &Arc<ActivationProcess> {
        &self.parent
    }

    pub fn starter(&self) -> &Graph {
        &self.starter
    }

    pub fn step_indices(&self) -> &[usize] {
        &self.steps
    }

    pub fn same_parent(&self, other: &SubprocessRef) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) || *self.parent == *other.parent
    }

    pub fn process(&self) -> ActivationProcess {
        let steps: Vec<ActivationStep> = self.steps.iter().map(|&i| self.parent.steps[i]).collect();
        let target = self.starter.with_edges(steps.iter().map(|s| s.edge)).expect("edges in range");
        ActivationProcess { starter: self.starter.clone(), ambient: self.parent.ambient.clone(), steps, target }
    }

    pub fn complex(&self) -> TwoComplex {
        activation_complex_unchecked(&self.process())
    }
}

/// Union of two subprocesses of one parent. The starter is grown step by
/// step from the two starters as supports are needed; starter edges lying
/// in no merged triangle are kept from the outset.
pub fn union(a1: &SubprocessRef, a2: &SubprocessRef) -> Result<SubprocessRef> {
    if !a1.same_parent(a2) {
        return Err(Error::Precondition("subprocesses have different parents".into()));
    }
    let parent = &a1.parent;
    let idx: Vec<usize> = a1.steps.iter().chain(&a2.steps).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let tri_edges: HashSet<Edge> = idx.iter().flat_map(|&i| parent.steps[i].triangle.edges()).collect();
    let both = a1.starter.union(&a2.starter);
    let mut h: BTreeSet<Edge> = both.edges().filter(|e| !tri_edges.contains(e)).collect();
    let mut active: HashSet<Edge> = h.iter().copied().collect();
    let mut activated: HashSet<Edge> = HashSet::new();
    for &i in &idx {
        let s = parent.steps[i];
        activated.insert(s.edge);
        if !s.supports().iter().all(|e| active.contains(e)) {
            for e in s.triangle.edges() {
                if !activated.contains(&e) {
                    if !both.contains(e) {
                        return Err(Error::Internal(format!("support {e:?} is in neither starter")));
                    }
                    h.insert(e);
                    active.insert(e);
                }
            }
        }
        active.insert(s.edge);
    }
    let starter = Graph::from_edges(parent.n(), h)?;
    SubprocessRef::new(parent.clone(), starter, idx)
}

/// Random subprocess: a random subset of parent steps, the supports they
/// need, and a few extra complex edges.
pub fn random_subprocess<R: Rng>(parent: &Arc<ActivationProcess>, rng: &mut R) -> SubprocessRef {
    let q: f64 = rng.gen_range(0.2..0.8);
    let steps: Vec<usize> = (0..parent.steps.len()).filter(|_| rng.gen_bool(q)).collect();
    let chosen: HashSet<Edge> = steps.iter().map(|&i| parent.steps[i].edge).collect();
    let mut active: HashSet<Edge> = HashSet::new();
    let mut h: BTreeSet<Edge> = BTreeSet::new();
    for &i in &steps {
        let s = parent.steps[i];
        for e in s.supports() {
            if active.insert(e) {
                h.insert(e);
            }
        }
        active.insert(s.edge);
    }
    for e in activation_complex_unchecked(parent).edges() {
        if !chosen.contains(e) && rng.gen_bool(0.1) {
            h.insert(*e);
        }
    }
    let starter = Graph::from_edges(parent.n(), h).expect("edges in range");
    SubprocessRef::new(parent.clone(), starter, steps).expect("supports were added")
}

#[derive(Debug, Clone)]
pub struct GluedFilling {
    pub union: SubprocessRef,
    pub cycle: Vec<Vertex>,
    pub certificate: FillingCertificate,
}

/// Glues fillings of `c1` and `c2` along their common path into a filling
/// of their symmetric difference inside the union's complex.
pub fn glue_fillings(
    a1: &SubprocessRef,
    a2: &SubprocessRef,
    c1: &[Vertex],
    c2: &[Vertex],
    f1: &FillingCertificate,
    f2: &FillingCertificate,
) -> Result<GluedFilling> {
    for (a, c, f) in [(a1, c1, f1), (a2, c2, f2)] {
        if !same_cycle(&f.boundary_cycle, c) {
            return Err(Error::Precondition("certificate fills a different cycle".into()));
        }
        f.validate(&a.complex()).map_err(|e| Error::Precondition(format!("filling rejected: {e}")))?;
    }
    let e1: BTreeSet<Edge> = cycle_edges(c1).into_iter().collect();
    let e2: BTreeSet<Edge> = cycle_edges(c2).into_iter().collect();
    let common: Vec<Edge> = e1.intersection(&e2).copied().collect();
    if common.is_empty() || !is_path(&common) {
        return Err(Error::Precondition("cycles do not meet in a path".into()));
    }
    let sym: Vec<Edge> = e1.symmetric_difference(&e2).copied().collect();
    let cycle = cycle_from_edges(&sym).ok_or_else(|| Error::NotACycle("symmetric difference is not a cycle".into()))?;
    let mut path = path_order(&common);
    let outer_map = |d: &PlanarDiagram| -> HashMap<(Vertex, Vertex), usize> {
        d.face_darts(d.outer_face()).into_iter().map(|h| ((d.label(d.origin(h)), d.label(d.dest(h))), h)).collect()
    };
    let mut d1 = f1.disc.clone();
    let m1 = outer_map(&d1);
    if !m1.contains_key(&(path[0], path[1])) {
        path.reverse();
    }
    let k = path.len() - 1;
    let mine: Vec<usize> = (0..k).map(|i| m1.get(&(path[i], path[i + 1])).copied()).collect::<Option<_>>().ok_or_else(|| Error::Internal("shared path missing from first boundary".into()))?;
    let mut d2 = f2.disc.clone();
    if !outer_map(&d2).contains_key(&(path[k], path[k - 1])) {
        d2.mirror();
    }
    let m2 = outer_map(&d2);
    let theirs: Vec<usize> = (0..k)
        .map(|j| m2.get(&(path[k - j], path[k - j - 1])).copied())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("shared path missing from second boundary".into()))?;
    d1.glue_along(&d2, &mine, &theirs)?;
    let u = union(a1, a2)?;
    let certificate = FillingCertificate { disc: d1, boundary_cycle: cycle.clone() };
    certificate.validate(&u.complex())?;
    Ok(GluedFilling { union: u, cycle, certificate })
}

/// Vertices of a path edge set in order, from its smaller end.
fn path_order(edges: &[Edge]) -> Vec<Vertex> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    let start = *adj.iter().find(|(_, a)| a.len() == 1).expect("paths have ends").0;
    let mut out = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = adj[&cur].iter().copied().find(|&x| Some(x) != prev);
        match next {
            Some(x) if out.len() <= edges.len() => {
                out.push(x);
                prev = Some(cur);
                cur = x;
            }
            _ => break,
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusGuard {
    pub max_v: usize,
    pub max_w: usize,
    pub max_labels: usize,
}

impl Default for CensusGuard {
    fn default() -> Self {
        CensusGuard { max_v: 6, max_w: 3, max_labels: 8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Census {
    pub ell: usize,
    pub v: usize,
    pub w: usize,
    pub n_labels: usize,
    /// Diagram classes on all label sets.
    pub count: u128,
    /// Classes on the label set {0..v-1} with outer cycle 0-1-...-(ell-1).
    pub base_count: usize,
    pub bound: String,
    pub within_bound: bool,
    /// Representative diagrams for the base label set and cycle.
    pub diagrams: Vec<DiagramJson>,
}

fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// n^v (2v)^(4w) w^w C(2v + w - 2, w) 2^(7v), with 0^0 = 1.
pub fn census_bound(n: usize, v: usize, w: usize) -> BigUint {
    let pow = |b: u64, e: usize| BigUint::from(b).pow(e as u32);
    pow(n as u64, v) * pow(2 * v as u64, 4 * w) * pow(w as u64, w) * binom((2 * v + w).saturating_sub(2) as u64, w as u64) * pow(2, 7 * v)
}

/// Whether the edge count forced on nice processes fits in K_v.
fn edge_count_feasible(ell: usize, v: usize, w: usize) -> bool {
    // |E(K)| = 3v - 3 + d + w - ell with d >= 0.
    3 * v + w <= v * (v - 1) / 2 + 3 + ell
}

/// Activation diagrams of nice ell-cycle processes with |V(H)| = v and
/// 2 d_H + exc = w, over labels in [n_labels], up to labelled isomorphism.
pub fn census_pvw(ell: usize, v: usize, w: usize, n_labels: usize, guard: CensusGuard) -> Result<Census> {
    if ell < 3 {
        return Err(Error::Parameter("cycle length must be at least 3".into()));
    }
    let bound = census_bound(n_labels, v, w);
    let empty = |bound: BigUint| Census {
        ell,
        v,
        w,
        n_labels,
        count: 0,
        base_count: 0,
        bound: bound.to_string(),
        within_bound: true,
        diagrams: Vec::new(),
    };
    if v < ell || n_labels < v || !edge_count_feasible(ell, v, w) {
        return Ok(empty(bound));
    }
    if v > guard.max_v || w > guard.max_w || n_labels > guard.max_labels {
        return Err(Error::Feasibility(format!(
            "census needs v <= {}, w <= {}, n_labels <= {}",
            guard.max_v, guard.max_w, guard.max_labels
        )));
    }
    let classes = enumerate_base(ell, v, w)?;
    let base = classes.len();
    let cycles = binom(v as u64, ell as u64) * (1..ell as u64).product::<u64>() / 2u32;
    let total = binom(n_labels as u64, v as u64) * cycles * base;
    let count: u128 = total.to_string().parse().map_err(|_| Error::Internal("census count overflow".into()))?;
    Ok(Census {
        ell,
        v,
        w,
        n_labels,
        count,
        base_count: base,
        within_bound: total <= bound,
        bound: bound.to_string(),
        diagrams: classes.into_values().map(|d| d.to_json()).collect(),
    })
}

struct CensusSearch<'a> {
    v: usize,
    index: &'a [Vec<usize>],
    ends: &'a [(Vertex, Vertex)],
    need: Vec<i64>,
    in_c: &'a [bool],
    active: Vec<bool>,
    con: Vec<i64>,
    over: i64,
    slack: i64,
    c_missing: usize,
    steps: Vec<ActivationStep>,
    keys: Vec<(usize, Vertex)>,
}

impl CensusSearch<'_> {
    fn tri_edges(&self, e: usize, z: Vertex) -> [usize; 3] {
        let (a, b) = self.ends[e];
        [e, self.index[a as usize][z as usize], self.index[b as usize][z as usize]]
    }

    fn dfs(&mut self, left: usize, found: &mut dyn FnMut(&[ActivationStep])) {
        if self.c_missing > left {
            return;
        }
        if left == 0 {
            if self.over == self.slack && (0..self.con.len()).all(|e| !self.active[e] || self.con[e] >= self.need[e]) {
                found(&self.steps);
            }
            return;
        }
        let last = self.keys.last().map(|&(e, z)| (e, z, self.tri_edges(e, z)));
        for e in 0..self.ends.len() {
            if self.active[e] {
                continue;
            }
            let (a, b) = self.ends[e];
            for z in 0..self.v as Vertex {
                if z == a || z == b {
                    continue;
                }
                let [_, ea, eb] = self.tri_edges(e, z);
                if !self.active[ea] || !self.active[eb] {
                    continue;
                }
                // Steps on edge-disjoint triangles commute without changing
                // the diagram; keep only the increasing order.
                if let Some((le, lz, lt)) = last {
                    if (e, z) < (le, lz) && [e, ea, eb].iter().all(|x| !lt.contains(x)) {
                        continue;
                    }
                }
                let gain = |s: &Self, f: usize| i64::from(s.con[f] >= s.need[f]);
                let delta = gain(self, ea) + gain(self, eb);
                if self.over + delta > self.slack {
                    continue;
                }
                self.over += delta;
                self.con[ea] += 1;
                self.con[eb] += 1;
                self.active[e] = true;
                if self.in_c[e] {
                    self.c_missing -= 1;
                }
                self.steps.push(ActivationStep { edge: Edge(a, b), triangle: Triangle::new(a, b, z) });
                self.keys.push((e, z));
                self.dfs(left - 1, found);
                self.keys.pop();
                self.steps.pop();
                if self.in_c[e] {
                    self.c_missing += 1;
                }
                self.active[e] = false;
                self.con[ea] -= 1;
                self.con[eb] -= 1;
                self.over -= delta;
            }
        }
    }
}

type Classes = BTreeMap<Vec<u64>, PlanarDiagram>;

/// Diagram classes for labels {0..v-1} and outer cycle 0-1-...-(ell-1),
/// keyed by canonical code. Starters are searched in parallel and merged in
/// enumeration order, so representatives are deterministic.
fn enumerate_base(ell: usize, v: usize, w: usize) -> Result<Classes> {
    let c: Vec<Vertex> = (0..ell as Vertex).collect();
    let cset: HashSet<Edge> = cycle_edges(&c).into_iter().collect();
    let kv = Graph::complete(v);
    let edges = kv.edge_vec();
    let mut index = vec![vec![usize::MAX; v]; v];
    for (i, e) in edges.iter().enumerate() {
        index[e.0 as usize][e.1 as usize] = i;
        index[e.1 as usize][e.0 as usize] = i;
    }
    let ends: Vec<(Vertex, Vertex)> = edges.iter().map(|e| (e.0, e.1)).collect();
    let in_c: Vec<bool> = edges.iter().map(|e| cset.contains(e)).collect();
    let target = cycle_graph(v, &c)?;
    let Some(s) = (2 * v + w).checked_sub(2 + ell) else { return Ok(Classes::new()) };
    let mut jobs = Vec::new();
    for d in 0..=w / 2 {
        let hsize = v - 1 + d;
        if hsize + s > edges.len() {
            continue;
        }
        for hs in edges.iter().copied().combinations(hsize) {
            let mut uf = UnionFind::new(v);
            let comps = v - hs.iter().filter(|e| uf.union(e.0 as usize, e.1 as usize)).count();
            if comps == 1 {
                jobs.push(((w - 2 * d) as i64, hs));
            }
        }
    }
    let per_starter: Vec<Result<Classes>> = jobs
        .par_iter()
        .map(|(slack, hs)| {
            let hset: HashSet<Edge> = hs.iter().copied().collect();
            let need = edges
                .iter()
                .map(|e| match (hset.contains(e), cset.contains(e)) {
                    (true, false) => 2,
                    (false, true) => 0,
                    _ => 1,
                })
                .collect();
            let mut search = CensusSearch {
                v,
                index: &index,
                ends: &ends,
                need,
                in_c: &in_c,
                active: edges.iter().map(|e| hset.contains(e)).collect(),
                con: vec![0; edges.len()],
                over: 0,
                slack: *slack,
                c_missing: edges.iter().filter(|e| cset.contains(e) && !hset.contains(e)).count(),
                steps: Vec::new(),
                keys: Vec::new(),
            };
            let starter = Graph::from_edges(v, hs.iter().copied())?;
            let mut classes = Classes::new();
            let mut err = None;
            search.dfs(s, &mut |steps| {
                if err.is_some() {
                    return;
                }
                let p = ActivationProcess { starter: starter.clone(), ambient: kv.clone(), steps: steps.to_vec(), target: target.clone() };
                debug_assert!(is_nice(&p));
                match activation_diagram(&p, &c) {
                    Ok(dg) => {
                        classes.entry(dg.canonical_code()).or_insert(dg);
                    }
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(classes), Err)
        })
        .collect();
    let mut classes = Classes::new();
    for part in per_starter {
        for (k, d) in part? {
            classes.entry(k).or_insert(d);
        }
    }
    Ok(classes)
}

pub fn census_csv(rows: &[Census], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ell", "v", "w", "n_labels", "count", "bound", "within_bound"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.ell.to_string(),
            r.v.to_string(),
            r.w.to_string(),
            r.n_labels.to_string(),
            r.count.to_string(),
            r.bound.clone(),
            r.within_bound.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// A nice process of a cycle with a filling carried through reduction.
#[derive(Debug, Clone)]
pub struct NiceInstance {
    pub original: ActivationProcess,
    pub cycle: Vec<Vertex>,
    pub reduction: Reduction,
}

/// Random spanning tree by shuffled Kruskal.
pub fn random_spanning_tree<R: Rng>(g: &Graph, rng: &mut R) -> Graph {
    let mut edges = g.edge_vec();
    edges.shuffle(rng);
    let mut uf = UnionFind::new(g.n());
    let keep: Vec<Edge> = edges.into_iter().filter(|e| uf.union(e.0 as usize, e.1 as usize)).collect();
    Graph::from_edges(g.n(), keep).expect("edges in range")
}

/// Keeps only the steps needed to activate the edges of `c`.
pub fn slice_to_cycle(proc: &ActivationProcess, c: &[Vertex]) -> Result<ActivationProcess> {
    let mut needed: HashSet<Edge> = cycle_edges(c).into_iter().collect();
    let mut keep = vec![false; proc.steps.len()];
    for (i, s) in proc.steps.iter().enumerate().rev() {
        if needed.contains(&s.edge) {
            keep[i] = true;
            needed.extend(s.supports());
        }
    }
    let steps = proc.steps.iter().zip(&keep).filter(|(_, &k)| k).map(|(s, _)| *s).collect();
    let p = ActivationProcess { starter: proc.starter.clone(), ambient: proc.ambient.clone(), steps, target: cycle_graph(proc.n(), c)? };
    p.validate()?;
    Ok(p)
}

/// One harness sample: a random graph, a random spanning tree, a random
/// cycle in the tree's closure, its tree filling and the nice reduction.
/// `None` when the sample has no usable cycle.
pub fn random_nice_instance(max_n: usize, seed: Seed) -> Result<Option<NiceInstance>> {
    let mut rng = seed.rng();
    let n = rng.gen_range(4..=max_n.max(4));
    let p = rng.gen_range(0.35..0.9);
    let g = gnp(n, p, Seed::new(rng.gen(), 0))?;
    if !g.is_connected() {
        return Ok(None);
    }
    let t = random_spanning_tree(&g, &mut rng);
    let r = k3_closure(&t, &g)?;
    let cycles = fundamental_cycles(&clique_complex_2(&r.closure));
    let Some(c) = cycles.choose(&mut rng).cloned() else {
        return Ok(None);
    };
    let sliced = slice_to_cycle(&r.process, &c)?;
    let cert = tree_filling(&sliced, &c)?;
    let reduction = reduce_to_nice(&sliced, &c, &cert)?;
    Ok(Some(NiceInstance { original: sliced, cycle: c, reduction }))
}

/// Collects `count` harness instances from consecutive streams of `master`.
pub fn nice_harness(count: usize, max_n: usize, master: u64) -> Result<Vec<NiceInstance>> {
    let mut out = Vec::with_capacity(count);
    let mut stream = 0;
    while out.len() < count {
        if let Some(x) = random_nice_instance(max_n, Seed::new(master, stream))? {
            out.push(x);
        }
        stream += 1;
    }
    Ok(out)
}
