//! Constructive activators: the diameter-4 tree and the Hamilton-path
//! activator built from friendly chains.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bootstrap::fully_activates;
use crate::error::{Error, Result};
use crate::graph::{bfs, Edge, Graph, Vertex};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootRule {
    /// Maximum degree, smallest label on ties.
    #[default]
    MaxDegree,
    Fixed(Vertex),
}

impl RootRule {
    pub fn pick(self, g: &Graph) -> Result<Vertex> {
        match self {
            RootRule::MaxDegree => Ok(max_degree_vertex(g)),
            RootRule::Fixed(v) if (v as usize) < g.n() => Ok(v),
            RootRule::Fixed(v) => Err(Error::Parameter(format!("root {v} outside [{}]", g.n()))),
        }
    }
}

fn max_degree_vertex(g: &Graph) -> Vertex {
    (0..g.n() as Vertex).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap_or(0)
}

/// Largest component of G[N(u) ∩ N(v)] for every u outside N(v) ∪ {v}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FriendlinessOracle {
    pub base: Vertex,
    pub components: BTreeMap<Vertex, Vec<Vertex>>,
}

impl FriendlinessOracle {
    pub fn component(&self, u: Vertex) -> Option<&[Vertex]> {
        self.components.get(&u).map(Vec::as_slice)
    }

    /// C(u) ∩ C(w) ≠ ∅; false when either vertex is outside the domain.
    pub fn friendly(&self, u: Vertex, w: Vertex) -> bool {
        match (self.component(u), self.component(w)) {
            (Some(a), Some(b)) => sorted_meet(a, b),
            _ => false,
        }
    }
}

fn sorted_meet(a: &[Vertex], b: &[Vertex]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Largest component of the subgraph induced by `s`, by word-parallel BFS.
/// Ties go to the component with the smallest label.
fn largest_induced_component(g: &Graph, s: &[Vertex], scratch: &mut [u64]) -> Vec<Vertex> {
    let bits = g.bits();
    scratch.iter_mut().for_each(|w| *w = 0);
    for &x in s {
        scratch[x as usize / 64] |= 1 << (x % 64);
    }
    let mut best: Vec<Vertex> = Vec::new();
    for &start in s {
        if scratch[start as usize / 64] >> (start % 64) & 1 == 0 {
            continue;
        }
        scratch[start as usize / 64] &= !(1 << (start % 64));
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let row = bits.row(comp[i] as usize);
            i += 1;
            for (wi, (word, r)) in scratch.iter_mut().zip(row).enumerate() {
                let mut m = *word & r;
                *word &= !m;
                while m != 0 {
                    comp.push((wi * 64 + m.trailing_zeros() as usize) as Vertex);
                    m &= m - 1;
                }
            }
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best.sort_unstable();
    best
}

fn components_around(g: &Graph, v: Vertex) -> BTreeMap<Vertex, Vec<Vertex>> {
    let nv = g.neighbors(v);
    let mut scratch = vec![0u64; g.n().div_ceil(64)];
    let mut out = BTreeMap::new();
    for u in 0..g.n() as Vertex {
        if u == v || g.has_edge(u, v) {
            continue;
        }
        let common: Vec<Vertex> = nv.iter().copied().filter(|&w| g.has_edge(u, w)).collect();
        out.insert(u, largest_induced_component(g, &common, &mut scratch));
    }
    out
}

pub fn friendliness(g: &Graph, v: Vertex) -> Result<FriendlinessOracle> {
    if v as usize >= g.n() {
        return Err(Error::Parameter(format!("vertex {v} outside [{}]", g.n())));
    }
    Ok(FriendlinessOracle { base: v, components: components_around(g, v) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBuildReport {
    pub root: Vertex,
    pub tree: Graph,
    pub diameter: usize,
    pub attach_failures: Vec<Vertex>,
    pub activated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReportJson {
    pub root: Vertex,
    pub tree: Vec<Edge>,
    pub diameter: usize,
    pub attach_failures: Vec<Vertex>,
    pub activated: bool,
}

impl TreeBuildReport {
    pub fn spanning(&self) -> bool {
        self.attach_failures.is_empty()
    }

    pub fn to_json(&self) -> TreeReportJson {
        TreeReportJson {
            root: self.root,
            tree: self.tree.edge_vec(),
            diameter: self.diameter,
            attach_failures: self.attach_failures.clone(),
            activated: self.activated,
        }
    }
}

/// Diameter of a tree on its touched vertices, by two sweeps.
fn tree_diameter(t: &Graph) -> usize {
    let Some(&s) = t.touched_vertices().first() else { return 0 };
    let far = |x: Vertex| {
        let d = bfs(t, x);
        let (v, &dv) = d.iter().enumerate().filter(|(_, &x)| x != usize::MAX).max_by_key(|(_, &x)| x).expect("source is reachable");
        (v as Vertex, dv)
    };
    far(far(s).0).1
}

/// The root star plus, for each vertex at distance two or more, one edge
/// to the smallest vertex of its giant common-neighbourhood component.
pub fn build_diameter4_tree(g: &Graph, root_rule: RootRule) -> Result<TreeBuildReport> {
    if g.n() < 3 {
        return Err(Error::Parameter("need at least 3 vertices".into()));
    }
    let root = root_rule.pick(g)?;
    let mut edges: Vec<Edge> = g.neighbors(root).iter().map(|&w| Edge::new(root, w)).collect();
    let mut attach_failures = Vec::new();
    for (u, c) in components_around(g, root) {
        match c.first() {
            Some(&w) => edges.push(Edge::new(u, w)),
            None => attach_failures.push(u),
        }
    }
    let tree = Graph::from_edges(g.n(), edges)?;
    let activated = attach_failures.is_empty() && fully_activates(&tree, g)?;
    Ok(TreeBuildReport { root, diameter: tree_diameter(&tree), tree, attach_failures, activated })
}

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamStage {
    Neighbourhood,
    Completion,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamPathReport {
    pub base: Vertex,
    /// Vertex order of the Hamilton path, when one was found.
    pub path: Option<Vec<Vertex>>,
    pub activated: bool,
    /// The stage whose node budget ran out.
    pub exhausted: Option<HamStage>,
    /// The staged construction was infeasible and a direct search was used.
    pub direct_fallback: bool,
    /// Friendly extensions made before the chain got stuck or hit its cap.
    pub chain_length: usize,
    /// Number of friendly candidates at each chain step.
    pub friendly_candidates: Vec<usize>,
}

impl HamPathReport {
    pub fn edges(&self) -> Option<Vec<Edge>> {
        self.path.as_ref().map(|p| p.windows(2).map(|w| Edge::new(w[0], w[1])).collect())
    }
}

enum Search {
    Found(Vec<Vertex>),
    Infeasible,
    Exhausted,
}

/// Backtracking Hamilton path over `allowed` vertices, trying neighbours
/// with fewest free neighbours first. With `start` the path begins there;
/// otherwise every allowed vertex is tried as a start, lowest degree first.
fn hamilton_path(g: &Graph, allowed: &[bool], start: Option<Vertex>, budget: usize) -> Search {
    let verts: Vec<Vertex> = (0..g.n() as Vertex).filter(|&v| allowed[v as usize]).collect();
    if verts.is_empty() {
        return Search::Found(Vec::new());
    }
    let mut starts = match start {
        Some(s) => vec![s],
        None => verts.clone(),
    };
    let free_deg = |used: &[bool], x: Vertex| g.neighbors(x).iter().filter(|&&y| allowed[y as usize] && !used[y as usize]).count();
    starts.sort_by_key(|&s| (free_deg(&vec![false; g.n()], s), s));
    let mut spent = 0;
    for s in starts {
        let mut used = vec![false; g.n()];
        used[s as usize] = true;
        let mut path = vec![s];
        // Candidate lists per depth, consumed from the back.
        let mut stack: Vec<Vec<Vertex>> = Vec::new();
        let order = |used: &[bool], x: Vertex| {
            let mut c: Vec<Vertex> = g.neighbors(x).iter().copied().filter(|&y| allowed[y as usize] && !used[y as usize]).collect();
            c.sort_by_key(|&y| std::cmp::Reverse((free_deg(used, y), std::cmp::Reverse(y))));
            c
        };
        stack.push(order(&used, s));
        while let Some(top) = stack.last_mut() {
            if path.len() == verts.len() {
                return Search::Found(path);
            }
            match top.pop() {
                Some(y) => {
                    spent += 1;
                    if spent > budget {
                        return Search::Exhausted;
                    }
                    used[y as usize] = true;
                    path.push(y);
                    let next = order(&used, y);
                    stack.push(next);
                }
                None => {
                    stack.pop();
                    let x = path.pop().expect("path tracks the stack");
                    used[x as usize] = false;
                }
            }
        }
    }
    Search::Infeasible
}

/// Path from `base` through N(base), a greedy chain of friendly vertices,
/// then any Hamilton completion of the rest; activation is tested by
/// closure. Each stage has its own node budget.
pub fn build_hamilton_path_activator(g: &Graph, seed: Seed, budget: usize) -> Result<HamPathReport> {
    let n = g.n();
    if n < 4 {
        return Err(Error::Parameter("need at least 4 vertices".into()));
    }
    let mut rng = seed.rng();
    let v = max_degree_vertex(g);
    let mut report = HamPathReport {
        base: v,
        path: None,
        activated: false,
        exhausted: None,
        direct_fallback: false,
        chain_length: 0,
        friendly_candidates: Vec::new(),
    };
    let staged = staged_path(g, v, budget, &mut rng, &mut report);
    let path = match staged {
        Search::Found(p) => p,
        Search::Exhausted => return Ok(report),
        Search::Infeasible => {
            report.direct_fallback = true;
            match hamilton_path(g, &vec![true; n], None, budget) {
                Search::Found(p) => p,
                Search::Exhausted => {
                    report.exhausted = Some(HamStage::Direct);
                    return Ok(report);
                }
                Search::Infeasible => return Ok(report),
            }
        }
    };
    let pg = Graph::from_edges(n, path.windows(2).map(|w| Edge::new(w[0], w[1])))?;
    report.activated = fully_activates(&pg, g)?;
    report.path = Some(path);
    Ok(report)
}

fn staged_path(g: &Graph, v: Vertex, budget: usize, rng: &mut impl rand::Rng, report: &mut HamPathReport) -> Search {
    let n = g.n();
    let mut in_nv = vec![false; n];
    for &w in g.neighbors(v) {
        in_nv[w as usize] = true;
    }
    let mut path = vec![v];
    match hamilton_path(g, &in_nv, None, budget) {
        Search::Found(p) if !p.is_empty() => path.extend(p),
        Search::Exhausted => {
            report.exhausted = Some(HamStage::Neighbourhood);
            return Search::Exhausted;
        }
        _ => return Search::Infeasible,
    }
    let oracle = FriendlinessOracle { base: v, components: components_around(g, v) };
    let mut used = vec![false; n];
    for &x in &path {
        used[x as usize] = true;
    }
    let w1 = *path.last().expect("nonempty");
    let mut end = w1;
    // Half of the outer vertices are left for the completion stage so that
    // the remaining induced graph stays dense enough to be traceable.
    let cap = oracle.components.len() / 2;
    while report.chain_length < cap {
        let cands: Vec<Vertex> = g
            .neighbors(end)
            .iter()
            .copied()
            .filter(|&x| !used[x as usize])
            .filter(|&x| if end == w1 { oracle.component(x).is_some_and(|c| c.binary_search(&w1).is_ok()) } else { oracle.friendly(end, x) })
            .collect();
        report.friendly_candidates.push(cands.len());
        let Some(&next) = cands.choose(rng) else { break };
        used[next as usize] = true;
        path.push(next);
        end = next;
        report.chain_length += 1;
    }
    let mut rest: Vec<bool> = used.iter().map(|&u| !u).collect();
    if rest.iter().all(|&r| !r) {
        return Search::Found(path);
    }
    rest[end as usize] = true;
    match hamilton_path(g, &rest, Some(end), budget) {
        Search::Found(p) => {
            path.extend(&p[1..]);
            Search::Found(path)
        }
        Search::Exhausted => {
            report.exhausted = Some(HamStage::Completion);
            Search::Exhausted
        }
        Search::Infeasible => Search::Infeasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gnp;

    fn is_hamiltonian(g: &Graph, p: &[Vertex]) -> bool {
        let mut seen = vec![false; g.n()];
        p.len() == g.n() && p.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true)) && p.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    #[test]
    fn complete_graph_gives_star() {
        for n in 3..9 {
            let r = build_diameter4_tree(&Graph::complete(n), RootRule::MaxDegree).unwrap();
            assert_eq!(r.tree, Graph::star(n, 0));
            assert_eq!(r.diameter, 2);
            assert!(r.activated);
        }
    }

    #[test]
    fn triangle_free_cycle_fails() {
        let r = build_diameter4_tree(&Graph::cycle(6), RootRule::Fixed(0)).unwrap();
        assert!(!r.activated);
        assert_eq!(r.attach_failures, vec![3]);
        let j = serde_json::to_value(r.to_json()).unwrap();
        assert_eq!(j["root"], 0);
        assert_eq!(j["tree"][0], serde_json::json!([0, 1]));
        assert_eq!(j["attach_failures"], serde_json::json!([3]));
    }

    #[test]
    fn random_trees_have_small_diameter() {
        for i in 0..20 {
            let g = gnp(60, 0.3, Seed::new(12, i)).unwrap();
            let r = build_diameter4_tree(&g, RootRule::MaxDegree).unwrap();
            assert!(r.tree.is_forest());
            if r.spanning() {
                assert!(r.diameter <= 4);
                assert_eq!(r.tree.m(), g.n() - 1);
            }
        }
    }

    #[test]
    fn friendliness_examples() {
        let k5 = Graph::complete(5);
        assert!(friendliness(&k5, 0).unwrap().components.is_empty());
        let o = friendliness(&Graph::cycle(6), 0).unwrap();
        assert!(o.components.values().all(|c| c.len() <= 1));
        let g = gnp(120, 0.2, Seed::new(3, 1)).unwrap();
        let o = friendliness(&g, 5).unwrap();
        let dom: Vec<Vertex> = o.components.keys().copied().collect();
        for &u in &dom {
            for &w in &dom {
                assert_eq!(o.friendly(u, w), o.friendly(w, u));
            }
        }
        assert!(friendliness(&g, 500).is_err());
    }

    #[test]
    fn components_match_generic_search() {
        let g = gnp(80, 0.25, Seed::new(4, 4)).unwrap();
        let o = friendliness(&g, 0).unwrap();
        for (&u, c) in &o.components {
            let common = crate::graph::common_neighborhood(&g, u, 0).unwrap();
            let keep: Vec<Edge> = g.edges().filter(|e| common.contains(&e.0) && common.contains(&e.1)).collect();
            let h = Graph::from_edges(g.n(), keep).unwrap();
            let mut best: Vec<Vertex> = Vec::new();
            for comp in crate::graph::connected_components(&h) {
                if common.contains(&comp[0]) && comp.len() > best.len() {
                    best = comp;
                }
            }
            assert_eq!(&best, c);
        }
    }

    #[test]
    fn hamilton_examples() {
        let k6 = Graph::complete(6);
        let r = build_hamilton_path_activator(&k6, Seed::new(1, 0), DEFAULT_NODE_BUDGET).unwrap();
        assert!(is_hamiltonian(&k6, r.path.as_ref().unwrap()));
        assert!(r.activated);
        let c5 = Graph::cycle(5);
        let r = build_hamilton_path_activator(&c5, Seed::new(1, 0), DEFAULT_NODE_BUDGET).unwrap();
        assert!(is_hamiltonian(&c5, r.path.as_ref().unwrap()));
        assert!(!r.activated);
        let two = Graph::from_pairs(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert!(build_hamilton_path_activator(&two, Seed::new(1, 0), DEFAULT_NODE_BUDGET).unwrap().path.is_none());
    }

    #[test]
    fn random_hamilton_paths_are_hamiltonian() {
        for i in 0..10 {
            let g = gnp(150, 0.2, Seed::new(21, i)).unwrap();
            let r = build_hamilton_path_activator(&g, Seed::new(22, i), DEFAULT_NODE_BUDGET).unwrap();
            if let Some(p) = &r.path {
                assert!(is_hamiltonian(&g, p));
                assert_eq!(r.edges().unwrap().len(), g.n() - 1);
            }
        }
    }
}
