//! Linial–Meshulam random 2-complexes and triadic activation.
//!
//! A sampled complex never stores its triangles: a triple is present when a
//! counter-based hash of (seed, triple) falls below `p`. Presence is then an
//! O(1) lookup, memory is constant in `n`, and complexes drawn from one seed
//! at different `p` are nested, which gives exact monotone coupling.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{run_closure, ActivationProcess, Answer, ClosureResult, ClosureRule, Schedule, TreeSearch};
use crate::error::{Error, Result};
use crate::graph::{self, Edge, Graph, Triangle, Vertex};
use crate::seed::{unit_from, Seed};

#[derive(Debug, Clone, PartialEq)]
enum Faces {
    Explicit(BTreeSet<Triangle>),
    Sampled { key: u64, p: f64 },
}

/// Complete 1-skeleton on `n` vertices plus a set of triangle faces.
#[derive(Debug, Clone, PartialEq)]
pub struct LmComplex {
    n: usize,
    faces: Faces,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LmJson {
    pub n: usize,
    pub triangles: Vec<Triangle>,
}

fn triple_rank(t: Triangle, n: usize) -> u64 {
    let [a, b, c] = t.0.map(u64::from);
    let n = n as u64;
    (a * n + b) * n + c
}

impl LmComplex {
    pub fn from_triangles<I: IntoIterator<Item = Triangle>>(n: usize, triangles: I) -> Result<Self> {
        let set: BTreeSet<Triangle> = triangles.into_iter().collect();
        if let Some(t) = set.iter().find(|t| t.0[2] as usize >= n || t.0[0] == t.0[1] || t.0[1] == t.0[2]) {
            return Err(Error::Parameter(format!("triangle {t:?} is not a triple of [{n}]")));
        }
        Ok(LmComplex { n, faces: Faces::Explicit(set) })
    }

    pub fn full(n: usize) -> Self {
        LmComplex { n, faces: Faces::Sampled { key: 0, p: 1.0 } }
    }

    pub fn empty(n: usize) -> Self {
        LmComplex { n, faces: Faces::Explicit(BTreeSet::new()) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, t: Triangle) -> bool {
        match &self.faces {
            Faces::Explicit(s) => s.contains(&t),
            Faces::Sampled { key, p } => *p >= 1.0 || unit_from(*key, triple_rank(t, self.n)) < *p,
        }
    }

    /// Present triangles in lexicographic order.
    pub fn triangles(&self) -> Vec<Triangle> {
        match &self.faces {
            Faces::Explicit(s) => s.iter().copied().collect(),
            Faces::Sampled { .. } => {
                let n = self.n as Vertex;
                let mut out = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            let t = Triangle([a, b, c]);
                            if self.contains(t) {
                                out.push(t);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn triangle_count(&self) -> usize {
        match &self.faces {
            Faces::Explicit(s) => s.len(),
            Faces::Sampled { .. } => self.triangles().len(),
        }
    }

    pub fn is_subcomplex_of(&self, other: &LmComplex) -> bool {
        self.n == other.n && self.triangles().into_iter().all(|t| other.contains(t))
    }

    pub fn to_json(&self) -> LmJson {
        LmJson { n: self.n, triangles: self.triangles() }
    }

    pub fn from_json(j: &LmJson) -> Result<Self> {
        Self::from_triangles(j.n, j.triangles.iter().copied())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// Each triangle of [n] independently with probability `p`.
pub fn sample_lm(n: usize, p: f64, seed: Seed) -> Result<LmComplex> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p={p} outside [0, 1]")));
    }
    Ok(LmComplex { n, faces: Faces::Sampled { key: seed.key(), p } })
}

struct LmRule<'a>(&'a LmComplex);

impl ClosureRule for LmRule<'_> {
    fn n(&self) -> usize {
        self.0.n
    }
    fn ambient_row(&self, _v: Vertex) -> Option<&[u64]> {
        None
    }
    fn allows(&self, missing: Edge, apex: Vertex) -> bool {
        self.0.contains(Triangle::from_edge(missing, apex))
    }
    fn ambient_edge_count(&self) -> usize {
        self.0.n * self.0.n.saturating_sub(1) / 2
    }
}

fn check_starter(starter: &Graph, x: &LmComplex) -> Result<()> {
    if starter.n() != x.n {
        return Err(Error::Containment("starter and complex differ in vertex count".into()));
    }
    Ok(())
}

/// Closure of `starter` in which only faces of `x` may activate edges.
pub fn triadic_closure(starter: &Graph, x: &LmComplex) -> Result<ClosureResult> {
    check_starter(starter, x)?;
    let rule = LmRule(x);
    let raw = run_closure(&rule, starter, Schedule::Fifo, true);
    let closure = Graph::from_edges(x.n, raw.edges)?;
    let fully_activated = closure.m() == rule.ambient_edge_count();
    let ambient = Graph::complete(x.n);
    let process = ActivationProcess { starter: starter.clone(), ambient, steps: raw.steps, target: closure.clone() };
    Ok(ClosureResult { closure, process, fully_activated })
}

/// Number of edges in the triadic closure, without recording steps.
pub fn triadic_closure_size(starter: &Graph, x: &LmComplex) -> Result<usize> {
    check_starter(starter, x)?;
    Ok(run_closure(&LmRule(x), starter, Schedule::Fifo, false).edges.len())
}

/// Whether the star at `center` triadically activates all of K_n.
pub fn star_activates(x: &LmComplex, center: Vertex) -> Result<bool> {
    if center as usize >= x.n {
        return Err(Error::Parameter(format!("center {center} outside [{}]", x.n)));
    }
    let size = triadic_closure_size(&Graph::star(x.n, center), x)?;
    Ok(size == LmRule(x).ambient_edge_count())
}

/// Searches spanning trees of K_n for one that triadically activates K_n.
pub fn exists_activating_spanning_tree_lm(x: &LmComplex, tree_limit: usize) -> Result<TreeSearch> {
    let kn = Graph::complete(x.n);
    let total = LmRule(x).ambient_edge_count();
    let mut tested = 0;
    for t in graph::spanning_trees(&kn, tree_limit)? {
        tested += 1;
        let tg = Graph::from_edges(x.n, t.iter().copied())?;
        if triadic_closure_size(&tg, x)? == total {
            return Ok(TreeSearch { answer: Answer::Yes, witness: Some(t), trees_tested: tested });
        }
    }
    // Cayley's formula counts the trees of K_n.
    let all = (x.n as f64).powi(x.n as i32 - 2);
    let answer = if x.n <= 2 || (tested as f64) >= all { Answer::No } else { Answer::Unknown };
    Ok(TreeSearch { answer, witness: None, trees_tested: tested })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gnp;
    use rand::Rng;

    fn naive_triadic(starter: &Graph, x: &LmComplex) -> Graph {
        let mut cur = starter.clone();
        let n = x.n() as Vertex;
        loop {
            let add: Vec<Edge> = Graph::complete(x.n())
                .edges()
                .filter(|&e| !cur.contains(e))
                .filter(|&e| (0..n).any(|w| e.0 != w && e.1 != w && cur.has_edge(e.0, w) && cur.has_edge(e.1, w) && x.contains(Triangle::from_edge(e, w))))
                .collect();
            if add.is_empty() {
                return cur;
            }
            cur = cur.with_edges(add).unwrap();
        }
    }

    #[test]
    fn trivial_extremes() {
        let full = sample_lm(7, 1.0, Seed::new(1, 0)).unwrap();
        assert_eq!(full.triangle_count(), 35);
        assert_eq!(sample_lm(7, 0.0, Seed::new(1, 0)).unwrap().triangle_count(), 0);
        assert!(sample_lm(7, 1.5, Seed::new(1, 0)).is_err());
        let star = Graph::star(7, 3);
        assert_eq!(triadic_closure(&star, &full).unwrap().closure, Graph::complete(7));
        assert_eq!(triadic_closure(&star, &LmComplex::empty(7)).unwrap().closure, star);
        assert!(star_activates(&full, 0).unwrap());
        assert!(!star_activates(&LmComplex::empty(5), 0).unwrap());
    }

    #[test]
    fn triangle_count_moments() {
        let x = sample_lm(200, 0.05, Seed::new(4, 2)).unwrap();
        let total = 200.0 * 199.0 * 198.0 / 6.0;
        let mean = total * 0.05;
        let sd = (total * 0.05 * 0.95f64).sqrt();
        assert!((x.triangle_count() as f64 - mean).abs() < 4.0 * sd);
    }

    #[test]
    fn book_over_a_star() {
        // Pages 012, 013, 014 open 12, 13, 14 from the star at 0; page 123
        // then closes 23, and 245 never has two active sides.
        let x = LmComplex::from_triangles(6, [Triangle([0, 1, 2]), Triangle([0, 1, 3]), Triangle([0, 1, 4]), Triangle([1, 2, 3]), Triangle([2, 4, 5])]).unwrap();
        let star = Graph::star(6, 0);
        let r = triadic_closure(&star, &x).unwrap();
        let want = star.with_edges([Edge(1, 2), Edge(1, 3), Edge(1, 4), Edge(2, 3)]).unwrap();
        assert_eq!(r.closure, want);
        assert_eq!(r.closure, naive_triadic(&star, &x));
        r.process.validate().unwrap();
        assert!(!r.fully_activated);
    }

    #[test]
    fn matches_naive_and_is_monotone() {
        let mut rng = Seed::new(8, 8).rng();
        for i in 0..40 {
            let n = rng.gen_range(4..=14);
            let p1 = rng.gen_range(0.05..0.5);
            let p2 = p1 + rng.gen_range(0.0..0.4);
            let seed = Seed::new(77, i);
            let (x1, x2) = (sample_lm(n, p1, seed).unwrap(), sample_lm(n, p2, seed).unwrap());
            assert!(x1.is_subcomplex_of(&x2));
            let h = gnp(n, 0.25, Seed::new(78, i)).unwrap();
            let c1 = triadic_closure(&h, &x1).unwrap();
            assert_eq!(c1.closure, naive_triadic(&h, &x1));
            c1.process.validate().unwrap();
            for s in &c1.process.steps {
                assert!(x1.contains(s.triangle));
            }
            assert!(c1.closure.is_subgraph_of(&triadic_closure(&h, &x2).unwrap().closure));
            let bigger = h.with_edges([Edge(0, 1)]).unwrap();
            assert!(c1.closure.is_subgraph_of(&triadic_closure(&bigger, &x1).unwrap().closure));
        }
    }

    #[test]
    fn json_roundtrip() {
        let x = sample_lm(9, 0.3, Seed::new(5, 5)).unwrap();
        let s = serde_json::to_string(&x.to_json()).unwrap();
        assert!(s.starts_with("{\"n\":9,\"triangles\":[["));
        let y = LmComplex::from_json_str(&s).unwrap();
        assert_eq!(y.triangles(), x.triangles());
        assert!(LmComplex::from_json_str("{\"n\":3,\"triangles\":[[0,1,3]]}").is_err());
    }

    #[test]
    fn tree_search_three_valued() {
        let full = LmComplex::full(5);
        assert_eq!(exists_activating_spanning_tree_lm(&full, 1000).unwrap().answer, Answer::Yes);
        let none = LmComplex::empty(4);
        assert_eq!(exists_activating_spanning_tree_lm(&none, 1000).unwrap().answer, Answer::No);
        assert_eq!(exists_activating_spanning_tree_lm(&none, 3).unwrap().answer, Answer::Unknown);
    }
}
