//! Simple undirected graphs on dense labels `0..n`.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::seed::Seed;

pub type Vertex = u32;

/// Unordered pair, stored with the smaller label first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 2]", into = "[u32; 2]")]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl TryFrom<[u32; 2]> for Edge {
    type Error = String;
    fn try_from(a: [u32; 2]) -> std::result::Result<Self, String> {
        if a[0] == a[1] {
            return Err(format!("self-loop at {}", a[0]));
        }
        Ok(Edge::new(a[0], a[1]))
    }
}

impl From<Edge> for [u32; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Unordered triple, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct Triangle(pub [Vertex; 3]);

impl Triangle {
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Triangle(t)
    }

    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [Edge(a, b), Edge(a, c), Edge(b, c)]
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.contains(e.0) && self.contains(e.1)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    /// The vertex opposite to `e`. Panics if `e` is not an edge of the triangle.
    pub fn apex(&self, e: Edge) -> Vertex {
        *self.0.iter().find(|&&v| !e.contains(v)).expect("edge not in triangle")
    }

    pub fn from_edge(e: Edge, apex: Vertex) -> Self {
        Triangle::new(e.0, e.1, apex)
    }
}

impl TryFrom<[u32; 3]> for Triangle {
    type Error = String;
    fn try_from(a: [u32; 3]) -> std::result::Result<Self, String> {
        if a[0] == a[1] || a[1] == a[2] || a[0] == a[2] {
            return Err(format!("degenerate triangle {a:?}"));
        }
        Ok(Triangle::new(a[0], a[1], a[2]))
    }
}

impl From<Triangle> for [u32; 3] {
    fn from(t: Triangle) -> Self {
        t.0
    }
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Square bit matrix, one row of words per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    #[inline]
    pub fn set_sym(&mut self, a: usize, b: usize) {
        self.set(a, b);
        self.set(b, a);
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Immutable simple graph with sorted adjacency lists and O(1) edge queries.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<Vertex>>,
    bits: BitMatrix,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, {:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, m: 0, adj: vec![Vec::new(); n], bits: BitMatrix::new(n) }
    }

    /// Builds a graph; duplicate edges are merged, loops and out-of-range
    /// endpoints are rejected.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for e in edges {
            if e.0 == e.1 {
                return Err(param(format!("self-loop at {}", e.0)));
            }
            if e.1 as usize >= n {
                return Err(param(format!("edge {e:?} out of range for n={n}")));
            }
            g.insert(e);
        }
        g.finish();
        Ok(g)
    }

    pub fn from_pairs(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::from_edges(n, pairs.iter().map(|&(a, b)| Edge::new(a, b)))
    }

    fn insert(&mut self, e: Edge) {
        let (a, b) = (e.0 as usize, e.1 as usize);
        if !self.bits.get(a, b) {
            self.bits.set_sym(a, b);
            self.adj[a].push(e.1);
            self.adj[b].push(e.0);
            self.m += 1;
        }
    }

    fn finish(&mut self) {
        for l in &mut self.adj {
            l.sort_unstable();
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n as Vertex {
            for b in a + 1..n as Vertex {
                g.insert(Edge(a, b));
            }
        }
        g.finish();
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n as Vertex).map(|i| Edge(i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut es: Vec<Edge> = (1..n as Vertex).map(|i| Edge(i - 1, i)).collect();
        es.push(Edge(0, n as Vertex - 1));
        Self::from_edges(n, es).unwrap()
    }

    pub fn star(n: usize, center: Vertex) -> Self {
        Self::from_edges(n, (0..n as Vertex).filter(|&v| v != center).map(|v| Edge::new(center, v))).unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && (a as usize) < self.n && (b as usize) < self.n && self.bits.get(a as usize, b as usize)
    }

    #[inline]
    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.0, e.1)
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, l)| {
            let a = a as Vertex;
            l.iter().filter(move |&&b| b > a).map(move |&b| Edge(a, b))
        })
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    pub fn has_triangle(&self, t: Triangle) -> bool {
        t.edges().iter().all(|&e| self.contains(e))
    }

    /// Triangles in lexicographic order.
    pub fn triangles(&self) -> Vec<Triangle> {
        let mut out = Vec::new();
        for a in 0..self.n as Vertex {
            for &b in self.neighbors(a).iter().filter(|&&b| b > a) {
                for &c in self.neighbors(b).iter().filter(|&&c| c > b) {
                    if self.has_edge(a, c) {
                        out.push(Triangle([a, b, c]));
                    }
                }
            }
        }
        out
    }

    /// Vertices incident to at least one edge.
    pub fn touched_vertices(&self) -> Vec<Vertex> {
        (0..self.n as Vertex).filter(|&v| self.degree(v) > 0).collect()
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n <= other.n && self.edges().all(|e| other.contains(e))
    }

    pub fn with_edges<I: IntoIterator<Item = Edge>>(&self, extra: I) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges().chain(extra))
    }

    pub fn without_edge(&self, e: Edge) -> Graph {
        Graph::from_edges(self.n, self.edges().filter(|&f| f != e)).unwrap()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        Graph::from_edges(self.n.max(other.n), self.edges().chain(other.edges())).unwrap()
    }

    /// Graph on the same label set keeping only edges with both ends in `keep`.
    pub fn restrict(&self, keep: &[Vertex]) -> Graph {
        let mut mask = vec![false; self.n];
        for &v in keep {
            mask[v as usize] = true;
        }
        Graph::from_edges(self.n, self.edges().filter(|e| mask[e.0 as usize] && mask[e.1 as usize])).unwrap()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || connected_components(self).len() == 1
    }

    /// Connected when isolated vertices are ignored.
    pub fn is_connected_on_support(&self) -> bool {
        let t = self.touched_vertices();
        if t.is_empty() {
            return true;
        }
        let d = bfs(self, t[0]);
        t.iter().all(|&v| d[v as usize] != usize::MAX)
    }

    pub fn is_forest(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        self.edges().all(|e| uf.union(e.0 as usize, e.1 as usize))
    }
}

/// Erdős–Rényi G(n, p). One uniform per pair in lexicographic order, so
/// equal seeds give nested graphs for increasing `p`.
pub fn gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(param(format!("p={p} outside [0,1]")));
    }
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for a in 0..n as Vertex {
        for b in a + 1..n as Vertex {
            let u: f64 = rng.gen();
            if u < p {
                g.insert(Edge(a, b));
            }
        }
    }
    g.finish();
    Ok(g)
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::complete(n)
}

/// Sorted common neighbourhood of `u` and `v`.
pub fn common_neighborhood(g: &Graph, u: Vertex, v: Vertex) -> Result<Vec<Vertex>> {
    if u == v {
        return Err(param("common neighbourhood needs distinct vertices"));
    }
    if u as usize >= g.n() || v as usize >= g.n() {
        return Err(param("vertex out of range"));
    }
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (small, other) = if a.len() <= b.len() { (a, v) } else { (b, u) };
    Ok(small.iter().copied().filter(|&w| g.has_edge(w, other)).collect())
}

/// BFS distances from `s`; unreachable vertices get `usize::MAX`.
pub fn bfs(g: &Graph, s: Vertex) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    let mut q = VecDeque::new();
    d[s as usize] = 0;
    q.push_back(s);
    while let Some(x) = q.pop_front() {
        for &y in g.neighbors(x) {
            if d[y as usize] == usize::MAX {
                d[y as usize] = d[x as usize] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// Components as sorted vertex lists, ordered by their smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() as Vertex {
        if seen[s as usize] {
            continue;
        }
        let mut comp = vec![s];
        seen[s as usize] = true;
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for &y in g.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Largest component; ties go to the component with the smallest label.
pub fn largest_component(g: &Graph) -> Vec<Vertex> {
    let mut best: Vec<Vertex> = Vec::new();
    for c in connected_components(g) {
        if c.len() > best.len() {
            best = c;
        }
    }
    best
}

/// Diameter, `None` when disconnected.
pub fn diameter(g: &Graph) -> Option<usize> {
    let mut best = 0;
    for s in 0..g.n() as Vertex {
        let d = bfs(g, s);
        for &x in &d {
            if x == usize::MAX {
                return None;
            }
            best = best.max(x);
        }
    }
    Some(best)
}

/// Diameter of the subgraph induced by the touched vertices.
pub fn support_diameter(g: &Graph) -> Option<usize> {
    let t = g.touched_vertices();
    let mut best = 0;
    for &s in &t {
        let d = bfs(g, s);
        for &v in &t {
            if d[v as usize] == usize::MAX {
                return None;
            }
            best = best.max(d[v as usize]);
        }
    }
    Some(best)
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Depth-first enumeration of spanning trees. Edges are decided in
/// lexicographic order, inclusion first; a branch is only explored when it
/// can still reach a spanning tree, so every leaf is a tree.
pub struct SpanningTrees {
    n: usize,
    edges: Vec<Edge>,
    stack: Vec<(usize, Vec<Edge>)>,
    remaining: usize,
}

impl SpanningTrees {
    fn completable(&self, from: usize, chosen: &[Edge]) -> bool {
        let mut uf = UnionFind::new(self.n);
        let mut comps = self.n;
        for e in chosen.iter().chain(&self.edges[from..]) {
            if uf.union(e.0 as usize, e.1 as usize) {
                comps -= 1;
            }
        }
        comps <= 1
    }

    fn acyclic_with(&self, chosen: &[Edge], e: Edge) -> bool {
        let mut uf = UnionFind::new(self.n);
        for f in chosen {
            uf.union(f.0 as usize, f.1 as usize);
        }
        uf.find(e.0 as usize) != uf.find(e.1 as usize)
    }
}

impl Iterator for SpanningTrees {
    type Item = Vec<Edge>;

    fn next(&mut self) -> Option<Vec<Edge>> {
        if self.remaining == 0 {
            return None;
        }
        while let Some((i, chosen)) = self.stack.pop() {
            if chosen.len() + 1 == self.n.max(1) {
                self.remaining -= 1;
                return Some(chosen);
            }
            if i >= self.edges.len() {
                continue;
            }
            if self.completable(i + 1, &chosen) {
                self.stack.push((i + 1, chosen.clone()));
            }
            let e = self.edges[i];
            if self.acyclic_with(&chosen, e) {
                let mut c = chosen;
                c.push(e);
                self.stack.push((i + 1, c));
            }
        }
        None
    }
}

/// Distinct spanning trees of a connected graph, at most `limit` of them.
pub fn spanning_trees(g: &Graph, limit: usize) -> Result<SpanningTrees> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(SpanningTrees { n: g.n(), edges: g.edge_vec(), stack: vec![(0, Vec::new())], remaining: limit })
}

fn laplacian_minor(g: &Graph) -> Vec<Vec<i128>> {
    let k = g.n().saturating_sub(1);
    let mut a = vec![vec![0i128; k]; k];
    for e in g.edges() {
        let (x, y) = (e.0 as usize, e.1 as usize);
        for &(p, q) in &[(x, y), (y, x)] {
            if p < k {
                a[p][p] += 1;
                if q < k {
                    a[p][q] -= 1;
                }
            }
        }
    }
    a
}

/// Exact matrix-tree count by fraction-free elimination; `None` on overflow.
pub fn spanning_tree_count_exact(g: &Graph) -> Option<u128> {
    if g.n() <= 1 {
        return Some(1);
    }
    let mut a = laplacian_minor(g);
    let k = a.len();
    let mut prev: i128 = 1;
    let mut sign = 1i128;
    for i in 0..k {
        if a[i][i] == 0 {
            let Some(r) = (i + 1..k).find(|&r| a[r][i] != 0) else {
                return Some(0);
            };
            a.swap(i, r);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                let v = a[r][c].checked_mul(a[i][i])?.checked_sub(a[r][i].checked_mul(a[i][c])?)?;
                a[r][c] = v / prev;
            }
            a[r][i] = 0;
        }
        prev = a[i][i];
    }
    let det = sign * a[k - 1][k - 1];
    u128::try_from(det).ok()
}

/// Matrix-tree count in floating point; 0 for disconnected graphs.
pub fn spanning_tree_count(g: &Graph) -> f64 {
    if let Some(c) = spanning_tree_count_exact(g) {
        return c as f64;
    }
    if !g.is_connected() {
        return 0.0;
    }
    let mut a: Vec<Vec<f64>> = laplacian_minor(g).into_iter().map(|r| r.into_iter().map(|x| x as f64).collect()).collect();
    let k = a.len();
    let mut log_det = 0.0;
    for i in 0..k {
        let p = (i..k).max_by(|&x, &y| a[x][i].abs().total_cmp(&a[y][i].abs())).unwrap();
        a.swap(i, p);
        let piv = a[i][i];
        if piv == 0.0 {
            return 0.0;
        }
        log_det += piv.abs().ln();
        for r in i + 1..k {
            let f = a[r][i] / piv;
            for c in i..k {
                a[r][c] -= f * a[i][c];
            }
        }
    }
    log_det.exp()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[u64; 2]>,
}

/// Maps raw labels to `0..n`. Labels already in range are kept; otherwise
/// the distinct labels are renumbered in sorted order.
fn remap(n: usize, raw: &[[u64; 2]]) -> Result<Vec<Edge>> {
    let in_range = raw.iter().flatten().all(|&x| (x as usize) < n && x < u32::MAX as u64);
    let lookup: Option<std::collections::BTreeMap<u64, u32>> = if in_range {
        None
    } else {
        let mut labels: Vec<u64> = raw.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() > n {
            return Err(Error::Parse(format!("{} distinct labels for n={n}", labels.len())));
        }
        Some(labels.into_iter().enumerate().map(|(i, l)| (l, i as u32)).collect())
    };
    let map = |x: u64| lookup.as_ref().map_or(x as u32, |m| m[&x]);
    raw.iter()
        .map(|&[a, b]| {
            if a == b {
                Err(Error::Parse(format!("self-loop at {a}")))
            } else {
                Ok(Edge::new(map(a), map(b)))
            }
        })
        .collect()
}

impl Graph {
    pub fn to_json(&self) -> GraphJson {
        GraphJson { n: self.n, edges: self.edges().map(|e| [e.0 as u64, e.1 as u64]).collect() }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph> {
        Graph::from_edges(j.n, remap(j.n, &j.edges)?)
    }

    pub fn from_json_str(s: &str) -> Result<Graph> {
        Graph::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m);
        for e in self.edges() {
            s.push_str(&format!("{} {}\n", e.0, e.1));
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let nums = parse_nums(head)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse(format!("bad header {head:?}")));
        };
        let mut raw = Vec::new();
        for l in lines {
            let v = parse_nums(l)?;
            let [a, b] = v[..] else {
                return Err(Error::Parse(format!("bad edge line {l:?}")));
            };
            raw.push([a, b]);
        }
        if raw.len() as u64 != m {
            return Err(Error::Parse(format!("header says {m} edges, found {}", raw.len())));
        }
        Graph::from_edges(n as usize, remap(n as usize, &raw)?)
    }

    /// Reads JSON or edge-list text, deciding by the first character.
    pub fn parse_any(text: &str) -> Result<Graph> {
        if text.trim_start().starts_with('{') {
            Graph::from_json_str(text)
        } else {
            Graph::from_edge_list(text)
        }
    }
}

fn parse_nums(line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(4, 1.0, Seed::from(1)).unwrap(), Graph::complete(4));
        assert_eq!(gnp(4, 0.0, Seed::from(1)).unwrap().m(), 0);
        assert!(gnp(4, 1.5, Seed::from(1)).is_err());
        assert!(gnp(4, -0.1, Seed::from(1)).is_err());
    }

    #[test]
    fn gnp_edge_count_moments() {
        let g = gnp(1000, 0.5, Seed::from(3)).unwrap();
        let mean = 249_750.0;
        let sd = (499_500.0f64 * 0.25).sqrt();
        assert!((g.m() as f64 - mean).abs() < 4.0 * sd, "{}", g.m());
    }

    #[test]
    fn gnp_coupling() {
        let s = Seed::new(9, 4);
        let a = gnp(60, 0.2, s).unwrap();
        let b = gnp(60, 0.35, s).unwrap();
        assert!(a.is_subgraph_of(&b));
        assert_eq!(a, gnp(60, 0.2, s).unwrap());
    }

    #[test]
    fn common_neighbourhoods() {
        let k4 = Graph::complete(4);
        assert_eq!(common_neighborhood(&k4, 0, 1).unwrap(), vec![2, 3]);
        assert_eq!(common_neighborhood(&Graph::path(3), 0, 2).unwrap(), vec![1]);
        assert!(common_neighborhood(&Graph::empty(3), 0, 2).unwrap().is_empty());
        assert!(common_neighborhood(&k4, 1, 1).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(connected_components(&g).len(), 2);
        assert_eq!(connected_components(&Graph::complete(5)).len(), 1);
        let g = Graph::from_pairs(5, &[(0, 1), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(largest_component(&g), vec![2, 3, 4]);
        let g = Graph::from_pairs(4, &[(2, 3), (0, 1)]).unwrap();
        assert_eq!(largest_component(&g), vec![0, 1]);
    }

    #[test]
    fn tree_counts() {
        assert_eq!(spanning_trees(&Graph::complete(3), 100).unwrap().count(), 3);
        assert_eq!(spanning_trees(&Graph::path(3), 100).unwrap().count(), 1);
        assert_eq!(spanning_trees(&Graph::complete(4), 100).unwrap().count(), 16);
        for n in 1..=5usize {
            let expect = (n as u128).pow(n.saturating_sub(2) as u32);
            let got = spanning_trees(&Graph::complete(n), 10_000).unwrap().count() as u128;
            assert_eq!(got, expect);
            assert_eq!(spanning_tree_count_exact(&Graph::complete(n)), Some(expect));
        }
        assert_eq!(spanning_trees(&Graph::complete(5), 7).unwrap().count(), 7);
        assert!(spanning_trees(&Graph::empty(2), 5).is_err());
        assert_eq!(spanning_tree_count_exact(&Graph::cycle(7)), Some(7));
    }

    #[test]
    fn trees_are_distinct_spanning_trees() {
        let g = gnp(7, 0.6, Seed::from(11)).unwrap();
        if !g.is_connected() {
            return;
        }
        let all: Vec<_> = spanning_trees(&g, usize::MAX).unwrap().collect();
        let set: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all.len() as u128, spanning_tree_count_exact(&g).unwrap());
        for t in &all {
            let tg = Graph::from_edges(7, t.iter().copied()).unwrap();
            assert!(tg.is_forest() && tg.is_connected() && tg.is_subgraph_of(&g));
        }
    }

    #[test]
    fn float_count_matches_cayley() {
        let c = spanning_tree_count(&Graph::complete(30));
        let expect = 30f64.powi(28);
        assert!((c / expect - 1.0).abs() < 1e-6);
        assert_eq!(spanning_tree_count(&Graph::empty(3)), 0.0);
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&Graph::star(6, 0)), Some(2));
        assert_eq!(diameter(&Graph::path(5)), Some(4));
        assert_eq!(diameter(&Graph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap()), None);
    }

    #[test]
    fn io_roundtrip_and_remap() {
        let g = gnp(12, 0.4, Seed::from(5)).unwrap();
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        let j = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(Graph::from_json_str(&j).unwrap(), g);
        let r = Graph::from_json_str(r#"{"n":3,"edges":[[10,20],[20,35]]}"#).unwrap();
        assert_eq!(r, Graph::path(3));
        let r = Graph::from_edge_list("3 2\n10 20\n20 35\n").unwrap();
        assert_eq!(r, Graph::path(3));
        assert!(Graph::from_edge_list("2 1\n1 1\n").is_err());
        assert!(Graph::from_edge_list("2 2\n0 1\n").is_err());
    }
}
