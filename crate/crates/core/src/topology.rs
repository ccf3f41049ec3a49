//! Two-dimensional simplicial complexes, mod-2 homology and certified
//! contractibility.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::bootstrap::ActivationProcess;
use crate::diagram::planar::PlanarDiagram;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Triangle, UnionFind, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "ComplexJson", into = "ComplexJson")]
pub struct TwoComplex {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<Edge>,
    triangles: BTreeSet<Triangle>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub triangles: Vec<Triangle>,
}

impl TryFrom<ComplexJson> for TwoComplex {
    type Error = Error;
    fn try_from(j: ComplexJson) -> Result<Self> {
        TwoComplex::new(j.vertices, j.edges, j.triangles)
    }
}

impl From<TwoComplex> for ComplexJson {
    fn from(x: TwoComplex) -> Self {
        ComplexJson {
            vertices: x.vertices.into_iter().collect(),
            edges: x.edges.into_iter().collect(),
            triangles: x.triangles.into_iter().collect(),
        }
    }
}

impl TwoComplex {
    /// Builds a complex, rejecting input that is not downward closed.
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = Edge>,
        triangles: impl IntoIterator<Item = Triangle>,
    ) -> Result<Self> {
        let x = TwoComplex {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
            triangles: triangles.into_iter().collect(),
        };
        for t in &x.triangles {
            if let Some(e) = t.edges().iter().find(|e| !x.edges.contains(e)) {
                return Err(Error::Parameter(format!("triangle {t:?} lacks edge {e:?}")));
            }
        }
        for e in &x.edges {
            if !x.vertices.contains(&e.0) || !x.vertices.contains(&e.1) {
                return Err(Error::Parameter(format!("edge {e:?} lacks a vertex")));
            }
        }
        Ok(x)
    }

    /// Builds the smallest complex containing the given simplices.
    pub fn closure_of(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = Edge>,
        triangles: impl IntoIterator<Item = Triangle>,
    ) -> Self {
        let triangles: BTreeSet<Triangle> = triangles.into_iter().collect();
        let mut edges: BTreeSet<Edge> = edges.into_iter().collect();
        edges.extend(triangles.iter().flat_map(|t| t.edges()));
        let mut vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        vertices.extend(edges.iter().flat_map(|e| [e.0, e.1]));
        TwoComplex { vertices, edges, triangles }
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn triangles(&self) -> &BTreeSet<Triangle> {
        &self.triangles
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn has_triangle(&self, t: Triangle) -> bool {
        self.triangles.contains(&t)
    }

    pub fn is_subcomplex_of(&self, other: &TwoComplex) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges) && self.triangles.is_subset(&other.triangles)
    }

    pub fn union(&self, other: &TwoComplex) -> TwoComplex {
        TwoComplex {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
            triangles: self.triangles.union(&other.triangles).copied().collect(),
        }
    }

    /// Disjoint union, shifting `other`'s labels past this complex's.
    pub fn disjoint_union(&self, other: &TwoComplex) -> TwoComplex {
        let off = self.vertices.iter().next_back().map_or(0, |&m| m + 1);
        TwoComplex {
            vertices: self.vertices.iter().copied().chain(other.vertices.iter().map(|v| v + off)).collect(),
            edges: self.edges.iter().copied().chain(other.edges.iter().map(|e| Edge(e.0 + off, e.1 + off))).collect(),
            triangles: self
                .triangles
                .iter()
                .copied()
                .chain(other.triangles.iter().map(|t| Triangle([t.0[0] + off, t.0[1] + off, t.0[2] + off])))
                .collect(),
        }
    }

    fn max_label(&self) -> usize {
        self.vertices.iter().next_back().map_or(0, |&m| m as usize + 1)
    }

    pub fn skeleton(&self) -> Graph {
        Graph::from_edges(self.max_label(), self.edges.iter().copied()).expect("edges in range")
    }

    pub fn is_connected(&self) -> bool {
        let Some(&first) = self.vertices.iter().next() else {
            return true;
        };
        let mut uf = UnionFind::new(self.max_label());
        for e in &self.edges {
            uf.union(e.0 as usize, e.1 as usize);
        }
        let r = uf.find(first as usize);
        self.vertices.iter().all(|&v| uf.find(v as usize) == r)
    }
}

pub fn clique_complex_2(g: &Graph) -> TwoComplex {
    TwoComplex { vertices: (0..g.n() as Vertex).collect(), edges: g.edges().collect(), triangles: g.triangles().into_iter().collect() }
}

/// The complex spanned by a process's triangles and its starter.
pub fn activation_complex(proc: &ActivationProcess) -> Result<TwoComplex> {
    proc.validate()?;
    Ok(activation_complex_unchecked(proc))
}

pub(crate) fn activation_complex_unchecked(proc: &ActivationProcess) -> TwoComplex {
    TwoComplex::closure_of(
        proc.starter.touched_vertices(),
        proc.starter.edges(),
        proc.steps.iter().map(|s| s.triangle),
    )
}

/// Vectors over GF(2) kept in reduced echelon form keyed by lowest set bit.
#[derive(Debug, Clone, Default)]
pub struct Gf2Basis {
    rows: HashMap<usize, Vec<u64>>,
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

impl Gf2Basis {
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        while let Some(p) = lowest_bit(&v) {
            match self.rows.get(&p) {
                Some(r) => v.iter_mut().zip(r).for_each(|(a, b)| *a ^= b),
                None => break,
            }
        }
        v
    }

    /// Fully reduces `v`: every pivot of the basis is cleared.
    fn reduce_full(&self, v: Vec<u64>) -> Vec<u64> {
        let mut v = self.reduce(v);
        loop {
            let mut changed = false;
            for (&p, r) in &self.rows {
                if v[p / 64] >> (p % 64) & 1 == 1 && lowest_bit(&v) != Some(p) {
                    v.iter_mut().zip(r).for_each(|(a, b)| *a ^= b);
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
            v = self.reduce(v);
        }
    }

    /// Adds `v`; returns whether it was independent.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let v = self.reduce(v);
        match lowest_bit(&v) {
            Some(p) => {
                self.rows.insert(p, v);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: Vec<u64>) -> bool {
        lowest_bit(&self.reduce_full(v)).is_none()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Edge indexing and boundary space of a complex.
struct ChainIndex {
    index: HashMap<Edge, usize>,
    words: usize,
    boundaries: Gf2Basis,
}

impl ChainIndex {
    fn new(x: &TwoComplex) -> Self {
        let index: HashMap<Edge, usize> = x.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let words = x.edges.len().div_ceil(64).max(1);
        let mut ci = ChainIndex { index, words, boundaries: Gf2Basis::default() };
        for t in &x.triangles {
            let v = ci.vector(&t.edges());
            ci.boundaries.insert(v);
        }
        ci
    }

    fn vector(&self, edges: &[Edge]) -> Vec<u64> {
        let mut v = vec![0u64; self.words];
        for e in edges {
            let i = self.index[e];
            v[i / 64] ^= 1 << (i % 64);
        }
        v
    }
}

/// Closed vertex walk `c0 c1 ... c(k-1)` as its list of edges.
pub fn cycle_edges(c: &[Vertex]) -> Vec<Edge> {
    (0..c.len()).map(|i| Edge::new(c[i], c[(i + 1) % c.len()])).collect()
}

/// Checks that `c` is a simple cycle of length at least 3 in `x`.
pub fn check_cycle(x: &TwoComplex, c: &[Vertex]) -> Result<()> {
    if c.len() < 3 {
        return Err(Error::NotACycle(format!("length {}", c.len())));
    }
    let distinct: BTreeSet<_> = c.iter().collect();
    if distinct.len() != c.len() {
        return Err(Error::NotACycle("repeated vertex".into()));
    }
    if let Some(e) = cycle_edges(c).into_iter().find(|&e| !x.has_edge(e)) {
        return Err(Error::NotACycle(format!("edge {e:?} not in complex")));
    }
    Ok(())
}

/// Fundamental cycles of a BFS spanning forest, one per non-tree edge.
pub fn fundamental_cycles(x: &TwoComplex) -> Vec<Vec<Vertex>> {
    let g = x.skeleton();
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut tree: BTreeSet<Edge> = BTreeSet::new();
    for &s in &x.vertices {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(a) = q.pop_front() {
            for &b in g.neighbors(a) {
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    parent[b as usize] = a as usize;
                    depth[b as usize] = depth[a as usize] + 1;
                    tree.insert(Edge::new(a, b));
                    q.push_back(b);
                }
            }
        }
    }
    let mut out = Vec::new();
    for e in &x.edges {
        if tree.contains(e) {
            continue;
        }
        let (mut a, mut b) = (e.0 as usize, e.1 as usize);
        let mut left = vec![a as Vertex];
        let mut right = vec![b as Vertex];
        while depth[a] > depth[b] {
            a = parent[a];
            left.push(a as Vertex);
        }
        while depth[b] > depth[a] {
            b = parent[b];
            right.push(b as Vertex);
        }
        while a != b {
            a = parent[a];
            b = parent[b];
            left.push(a as Vertex);
            right.push(b as Vertex);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        out.push(left);
    }
    out
}

#[derive(Debug, Clone)]
pub struct H1 {
    pub betti1: usize,
    /// Basis cycles that do not bound, one per dimension.
    pub witnesses: Vec<Vec<Vertex>>,
}

pub fn h1_z2(x: &TwoComplex) -> H1 {
    let ci = ChainIndex::new(x);
    let mut span = ci.boundaries.clone();
    let mut witnesses = Vec::new();
    for c in fundamental_cycles(x) {
        if span.insert(ci.vector(&cycle_edges(&c))) {
            witnesses.push(c);
        }
    }
    let mut uf = UnionFind::new(x.max_label());
    let mut comps = x.vertices.len();
    for e in &x.edges {
        if uf.union(e.0 as usize, e.1 as usize) {
            comps -= 1;
        }
    }
    let ker = x.edges.len() + comps - x.vertices.len();
    let betti1 = ker - ci.boundaries.rank();
    debug_assert_eq!(betti1, witnesses.len());
    H1 { betti1, witnesses }
}

/// Whether the cycle is a mod-2 boundary.
pub fn bounds_mod2(x: &TwoComplex, c: &[Vertex]) -> bool {
    let ci = ChainIndex::new(x);
    ci.boundaries.contains(ci.vector(&cycle_edges(c)))
}

/// A labelled disc whose boundary runs once around `boundary_cycle`.
#[derive(Debug, Clone)]
pub struct FillingCertificate {
    pub disc: PlanarDiagram,
    pub boundary_cycle: Vec<Vertex>,
}

fn cert_err(m: impl Into<String>) -> Error {
    Error::Certificate(m.into())
}

/// True if `a` is a rotation of `b` or of its reverse.
pub fn same_cycle(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let mut r: Vec<Vertex> = b.to_vec();
    for _ in 0..2 {
        for k in 0..r.len() {
            if (0..a.len()).all(|i| a[i] == r[(i + k) % r.len()]) {
                return true;
            }
        }
        r.reverse();
    }
    false
}

impl FillingCertificate {
    /// Re-checks the certificate from scratch against `x`.
    pub fn validate(&self, x: &TwoComplex) -> Result<()> {
        let d = &self.disc;
        if d.hole_face().is_some() {
            return Err(cert_err("disc still has a hole"));
        }
        d.check_structure()?;
        let ext = d.external_walk();
        let distinct: BTreeSet<_> = ext.iter().collect();
        if distinct.len() != ext.len() {
            return Err(cert_err("outer boundary is not a simple cycle"));
        }
        if !same_cycle(&d.external_labels(), &self.boundary_cycle) {
            return Err(cert_err(format!(
                "boundary {:?} does not match cycle {:?}",
                d.external_labels(),
                self.boundary_cycle
            )));
        }
        for f in d.triangle_faces() {
            let l = d.face_labels(f);
            let set: BTreeSet<Vertex> = l.iter().copied().collect();
            let ok = match set.len() {
                3 => x.has_triangle(Triangle::new(l[0], l[1], l[2])),
                2 => {
                    let v: Vec<_> = set.into_iter().collect();
                    x.has_edge(Edge(v[0], v[1]))
                }
                _ => x.vertices().contains(&l[0]),
            };
            if !ok {
                return Err(cert_err(format!("face labelled {l:?} is not a simplex")));
            }
        }
        for h in d.live_darts() {
            let (a, b) = (d.label(d.origin(h)), d.label(d.dest(h)));
            if a != b && !x.has_edge(Edge::new(a, b)) {
                return Err(cert_err(format!("edge {a}-{b} is not in the complex")));
            }
        }
        Ok(())
    }
}

/// Elementary operations on a hole walk, replayable on a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WalkOp {
    /// Insert an apex after position `i`, gluing a triangle on edge `i`.
    Glue(usize, Vertex),
    /// Fold edges `i` and `i + 1`, which trace the same edge back and forth.
    Zip(usize),
}

pub(crate) fn apply_op(w: &mut Vec<Vertex>, op: WalkOp) {
    match op {
        WalkOp::Glue(i, apex) => w.insert(i + 1, apex),
        WalkOp::Zip(i) => {
            let l = w.len();
            if l == 2 {
                w.clear();
            } else if i + 1 < l {
                w.drain(i..i + 2);
            } else {
                w.remove(i);
                w.remove(0);
            }
        }
    }
}

/// Applies recorded operations to the diagram whose hole walk matches the
/// word the operations were computed on.
pub(crate) fn replay(d: &mut PlanarDiagram, ops: &[WalkOp]) -> Result<()> {
    let mut darts = d.hole_darts();
    for &op in ops {
        match op {
            WalkOp::Glue(i, apex) => {
                let (c, dd) = d.glue_triangle(darts[i], apex)?;
                darts[i] = c;
                darts.insert(i + 1, dd);
            }
            WalkOp::Zip(i) => {
                d.zip(darts[i])?;
                let l = darts.len();
                if l == 2 {
                    darts.clear();
                } else if i + 1 < l {
                    darts.drain(i..i + 2);
                } else {
                    darts.remove(i);
                    darts.remove(0);
                }
            }
        }
    }
    Ok(())
}

/// Cancels backtracks until the walk is cyclically reduced.
pub(crate) fn free_reduce(w: &mut Vec<Vertex>, ops: &mut Vec<WalkOp>) {
    loop {
        let l = w.len();
        if l == 0 {
            return;
        }
        let Some(i) = (0..l).find(|&i| w[i] == w[(i + 2) % l]) else {
            return;
        };
        ops.push(WalkOp::Zip(i));
        apply_op(w, WalkOp::Zip(i));
    }
}

#[derive(Debug, Clone)]
pub enum Contractibility {
    Yes(FillingCertificate),
    No,
    Unknown { states: usize },
}

pub const DEFAULT_BUDGET: usize = 100_000;

struct Search<'a> {
    x: &'a TwoComplex,
    apexes: HashMap<Edge, Vec<Vertex>>,
    memo: HashMap<Vec<Vertex>, usize>,
    states: usize,
    budget: usize,
    ops: Vec<WalkOp>,
}

fn canonical_rotation(w: &[Vertex]) -> Vec<Vertex> {
    (0..w.len()).map(|k| w[k..].iter().chain(&w[..k]).copied().collect::<Vec<_>>()).min().unwrap_or_default()
}

impl Search<'_> {
    fn dfs(&mut self, word: Vec<Vertex>, depth: usize) -> Option<bool> {
        self.states += 1;
        if self.states > self.budget {
            return None;
        }
        let mark = self.ops.len();
        let mut word = word;
        free_reduce(&mut word, &mut self.ops);
        if word.is_empty() {
            return Some(true);
        }
        if depth == 0 {
            self.ops.truncate(mark);
            return Some(false);
        }
        let key = canonical_rotation(&word);
        if self.memo.get(&key).is_some_and(|&d| d >= depth) {
            self.ops.truncate(mark);
            return Some(false);
        }
        self.memo.insert(key, depth);
        let l = word.len();
        let mut moves: Vec<(bool, WalkOp)> = Vec::new();
        for i in 0..l {
            let (a, b, c) = (word[i], word[(i + 1) % l], word[(i + 2) % l]);
            if a != c && self.x.has_triangle(Triangle::new(a, b, c)) {
                moves.push((true, WalkOp::Glue(i, c)));
            }
        }
        for i in 0..l {
            let e = Edge::new(word[i], word[(i + 1) % l]);
            for &w in self.apexes.get(&e).map(|v| v.as_slice()).unwrap_or(&[]) {
                moves.push((false, WalkOp::Glue(i, w)));
            }
        }
        for (shortcut, op) in moves {
            let m2 = self.ops.len();
            let mut next = word.clone();
            self.ops.push(op);
            apply_op(&mut next, op);
            if shortcut {
                let WalkOp::Glue(i, _) = op else { unreachable!() };
                let z = (i + 1) % next.len();
                self.ops.push(WalkOp::Zip(z));
                apply_op(&mut next, WalkOp::Zip(z));
            }
            match self.dfs(next, depth - 1) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => self.ops.truncate(m2),
            }
        }
        self.ops.truncate(mark);
        Some(false)
    }
}

/// Three-valued contractibility of a cycle in `x`.
pub fn contractible(x: &TwoComplex, c: &[Vertex], budget: usize) -> Result<Contractibility> {
    check_cycle(x, c)?;
    if !bounds_mod2(x, c) {
        return Ok(Contractibility::No);
    }
    let mut apexes: HashMap<Edge, Vec<Vertex>> = HashMap::new();
    for t in x.triangles() {
        for e in t.edges() {
            apexes.entry(e).or_default().push(t.apex(e));
        }
    }
    let mut s = Search { x, apexes, memo: HashMap::new(), states: 0, budget, ops: Vec::new() };
    let mut depth = 1;
    loop {
        s.memo.clear();
        s.ops.clear();
        match s.dfs(c.to_vec(), depth) {
            Some(true) => break,
            Some(false) => depth += 1,
            None => return Ok(Contractibility::Unknown { states: s.states.min(budget) }),
        }
    }
    let mut disc = PlanarDiagram::from_cycle(c);
    replay(&mut disc, &s.ops)?;
    let cert = FillingCertificate { disc, boundary_cycle: c.to_vec() };
    cert.validate(x)?;
    Ok(Contractibility::Yes(cert))
}

#[derive(Debug, Clone)]
pub enum ScVerdict {
    /// Every fundamental cycle carries a validated filling.
    SimplyConnected(Vec<FillingCertificate>),
    NotSimplyConnected(Vec<Vertex>),
    Undetermined { cycle: Vec<Vertex>, budget: usize },
}

impl ScVerdict {
    /// Name used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            ScVerdict::SimplyConnected(_) => "basis-contractible",
            ScVerdict::NotSimplyConnected(_) => "not-simply-connected",
            ScVerdict::Undetermined { .. } => "undetermined",
        }
    }
}

pub fn simply_connected(x: &TwoComplex, budget: usize) -> Result<ScVerdict> {
    if !x.is_connected() {
        return Err(Error::Disconnected);
    }
    let h = h1_z2(x);
    if let Some(w) = h.witnesses.into_iter().next() {
        return Ok(ScVerdict::NotSimplyConnected(w));
    }
    let mut certs = Vec::new();
    for c in fundamental_cycles(x) {
        match contractible(x, &c, budget)? {
            Contractibility::Yes(cert) => certs.push(cert),
            Contractibility::Unknown { .. } => return Ok(ScVerdict::Undetermined { cycle: c, budget }),
            Contractibility::No => return Err(Error::Internal("cycle bounds mod 2 yet was refuted".into())),
        }
    }
    Ok(ScVerdict::SimplyConnected(certs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gnp;
    use crate::Seed;

    #[test]
    fn clique_complex_counts() {
        assert_eq!(clique_complex_2(&Graph::complete(4)).triangles().len(), 4);
        assert_eq!(clique_complex_2(&Graph::cycle(5)).triangles().len(), 0);
        assert_eq!(clique_complex_2(&Graph::complete(5)).triangles().len(), 10);
    }

    #[test]
    fn downward_closure_enforced() {
        assert!(TwoComplex::new([0, 1, 2], [Edge(0, 1)], [Triangle([0, 1, 2])]).is_err());
        assert!(TwoComplex::new([0], [Edge(0, 1)], []).is_err());
        let j = r#"{"vertices":[0,1,2],"edges":[[0,1],[1,2],[0,2]],"triangles":[[0,1,2]]}"#;
        let x: TwoComplex = serde_json::from_str(j).unwrap();
        assert_eq!(x.triangles().len(), 1);
        let back: TwoComplex = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn betti_numbers() {
        let k4 = clique_complex_2(&Graph::complete(4));
        assert_eq!(h1_z2(&k4).betti1, 0);
        let c5 = clique_complex_2(&Graph::cycle(5));
        let h = h1_z2(&c5);
        assert_eq!(h.betti1, 1);
        assert_eq!(h.witnesses.len(), 1);
        assert_eq!(h1_z2(&k4.disjoint_union(&c5)).betti1, 1);
        for n in 1..=6 {
            assert_eq!(h1_z2(&clique_complex_2(&Graph::complete(n))).betti1, 0);
        }
        let hollow = TwoComplex::closure_of([], Triangle([0, 1, 2]).edges(), []);
        assert_eq!(h1_z2(&hollow).betti1, 1);
    }

    #[test]
    fn contractibility_examples() {
        let k4 = clique_complex_2(&Graph::complete(4));
        match contractible(&k4, &[0, 1, 2], DEFAULT_BUDGET).unwrap() {
            Contractibility::Yes(c) => assert_eq!(c.disc.face_count(), 1),
            other => panic!("{other:?}"),
        }
        match contractible(&k4, &[0, 1, 2, 3], DEFAULT_BUDGET).unwrap() {
            Contractibility::Yes(c) => {
                assert_eq!(c.disc.face_count(), 2);
                c.validate(&k4).unwrap();
            }
            other => panic!("{other:?}"),
        }
        let c5 = clique_complex_2(&Graph::cycle(5));
        assert!(matches!(contractible(&c5, &[0, 1, 2, 3, 4], 10).unwrap(), Contractibility::No));
        assert!(contractible(&k4, &[0, 1], 10).is_err());
    }

    #[test]
    fn octahedron_equator_needs_expansion() {
        // Octahedron: poles 0 and 5 over the square 1-2-3-4.
        let mut tris = Vec::new();
        for (a, b) in [(1, 2), (2, 3), (3, 4), (1, 4)] {
            tris.push(Triangle::new(0, a, b));
            tris.push(Triangle::new(5, a, b));
        }
        // Without the bottom cap the equator bounds the top cap only.
        let x = TwoComplex::closure_of([], [], tris.into_iter().filter(|t| !t.contains(5)));
        match contractible(&x, &[1, 2, 3, 4], DEFAULT_BUDGET).unwrap() {
            Contractibility::Yes(c) => {
                c.validate(&x).unwrap();
                assert_eq!(c.disc.face_count(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simple_connectivity() {
        let k5 = clique_complex_2(&Graph::complete(5));
        let v = simply_connected(&k5, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.name(), "basis-contractible");
        if let ScVerdict::SimplyConnected(certs) = v {
            assert_eq!(certs.len(), 6);
            for c in certs {
                c.validate(&k5).unwrap();
            }
        }
        let single = clique_complex_2(&Graph::complete(3));
        assert_eq!(simply_connected(&single, 10).unwrap().name(), "basis-contractible");
        let c5 = clique_complex_2(&Graph::cycle(5));
        assert_eq!(simply_connected(&c5, 10).unwrap().name(), "not-simply-connected");
        let two = clique_complex_2(&Graph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap());
        assert!(simply_connected(&two, 10).is_err());
    }

    #[test]
    fn sparse_random_clique_complex_has_holes() {
        let mut holes = 0;
        for s in 0..5 {
            let g = gnp(200, 0.05, Seed::new(77, s)).unwrap();
            if h1_z2(&clique_complex_2(&g)).betti1 > 0 {
                holes += 1;
            }
        }
        assert!(holes >= 4);
    }

    #[test]
    fn activation_complex_omits_unused_triangles() {
        let k3 = Graph::complete(3);
        let p = ActivationProcess { starter: k3.clone(), ambient: k3.clone(), steps: vec![], target: k3 };
        let x = activation_complex(&p).unwrap();
        assert_eq!(x.triangles().len(), 0);
        assert_eq!(x.edges().len(), 3);
    }

    #[test]
    fn fundamental_cycles_are_cycles() {
        let g = gnp(12, 0.5, Seed::new(3, 3)).unwrap();
        let x = clique_complex_2(&g);
        let cs = fundamental_cycles(&x);
        assert_eq!(cs.len(), g.m() + crate::graph::connected_components(&g).len() - g.n());
        for c in cs {
            check_cycle(&x, &c).unwrap();
        }
    }
}
