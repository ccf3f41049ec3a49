//! Half-edge planar maps with labelled vertices.
//!
//! Every map has one outer face and at most one hole face; all other faces
//! are triangles. Darts are never reused after deletion. Disc vertices are
//! kept in a union-find so that zipping two boundary edges merges their
//! endpoints in O(1).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Vertex};

pub type Dart = usize;
pub type FaceId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Outer,
    Hole,
    Triangle,
}

#[derive(Debug, Clone)]
pub struct PlanarDiagram {
    origin: Vec<usize>,
    twin: Vec<Dart>,
    next: Vec<Dart>,
    prev: Vec<Dart>,
    face: Vec<FaceId>,
    dart_alive: Vec<bool>,
    marked: Vec<bool>,
    face_kind: Vec<FaceKind>,
    face_dart: Vec<Dart>,
    face_alive: Vec<bool>,
    vparent: Vec<usize>,
    vlabel: Vec<Vertex>,
    vertex_alive: Vec<bool>,
    outer: FaceId,
    hole: Option<FaceId>,
}

fn diag_err(m: impl Into<String>) -> Error {
    Error::Diagram(m.into())
}

impl PlanarDiagram {
    /// The degenerate annulus bounded on both sides by the closed walk
    /// `labels`: the outer face and the hole face share every edge.
    pub fn from_cycle(labels: &[Vertex]) -> Self {
        let l = labels.len();
        assert!(l >= 2, "cycle needs at least two vertices");
        let mut d = PlanarDiagram {
            origin: Vec::new(),
            twin: Vec::new(),
            next: Vec::new(),
            prev: Vec::new(),
            face: Vec::new(),
            dart_alive: Vec::new(),
            marked: Vec::new(),
            face_kind: Vec::new(),
            face_dart: Vec::new(),
            face_alive: Vec::new(),
            vparent: Vec::new(),
            vlabel: Vec::new(),
            vertex_alive: Vec::new(),
            outer: 0,
            hole: None,
        };
        let vs: Vec<usize> = labels.iter().map(|&x| d.new_vertex(x)).collect();
        let outer = d.new_face(FaceKind::Outer);
        let hole = d.new_face(FaceKind::Hole);
        d.outer = outer;
        d.hole = Some(hole);
        // inner[i]: v_i -> v_{i+1} on the hole; outer[i]: v_{i+1} -> v_i.
        let inner: Vec<Dart> = (0..l).map(|i| d.new_dart(vs[i], hole)).collect();
        let outer_d: Vec<Dart> = (0..l).map(|i| d.new_dart(vs[(i + 1) % l], outer)).collect();
        for i in 0..l {
            d.twin[inner[i]] = outer_d[i];
            d.twin[outer_d[i]] = inner[i];
            d.link(inner[i], inner[(i + 1) % l]);
            d.link(outer_d[(i + 1) % l], outer_d[i]);
        }
        d.face_dart[hole] = inner[0];
        d.face_dart[outer] = outer_d[l - 1];
        d
    }

    fn new_vertex(&mut self, label: Vertex) -> usize {
        self.vparent.push(self.vlabel.len());
        self.vlabel.push(label);
        self.vertex_alive.push(true);
        self.vlabel.len() - 1
    }

    fn new_face(&mut self, kind: FaceKind) -> FaceId {
        self.face_kind.push(kind);
        self.face_dart.push(usize::MAX);
        self.face_alive.push(true);
        self.face_kind.len() - 1
    }

    fn new_dart(&mut self, origin: usize, face: FaceId) -> Dart {
        let id = self.origin.len();
        self.origin.push(origin);
        self.twin.push(usize::MAX);
        self.next.push(usize::MAX);
        self.prev.push(usize::MAX);
        self.face.push(face);
        self.dart_alive.push(true);
        self.marked.push(false);
        if self.face_dart[face] == usize::MAX {
            self.face_dart[face] = id;
        }
        id
    }

    fn link(&mut self, a: Dart, b: Dart) {
        self.next[a] = b;
        self.prev[b] = a;
    }

    fn find(&self, mut v: usize) -> usize {
        while self.vparent[v] != v {
            v = self.vparent[v];
        }
        v
    }

    fn find_mut(&mut self, v: usize) -> usize {
        let r = self.find(v);
        let mut x = v;
        while self.vparent[x] != r {
            let nx = self.vparent[x];
            self.vparent[x] = r;
            x = nx;
        }
        r
    }

    fn merge(&mut self, keep: usize, gone: usize) {
        let (rk, rg) = (self.find_mut(keep), self.find_mut(gone));
        if rk != rg {
            self.vparent[rg] = rk;
            self.vertex_alive[rg] = false;
        }
    }

    pub fn origin(&self, h: Dart) -> usize {
        self.find(self.origin[h])
    }

    pub fn dest(&self, h: Dart) -> usize {
        self.origin(self.twin[h])
    }

    pub fn label(&self, v: usize) -> Vertex {
        self.vlabel[self.find(v)]
    }

    pub fn next(&self, h: Dart) -> Dart {
        self.next[h]
    }

    pub fn twin(&self, h: Dart) -> Dart {
        self.twin[h]
    }

    pub fn face_of(&self, h: Dart) -> FaceId {
        self.face[h]
    }

    pub fn face_kind(&self, f: FaceId) -> FaceKind {
        self.face_kind[f]
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer
    }

    pub fn hole_face(&self) -> Option<FaceId> {
        self.hole
    }

    /// Labels of a dart's endpoints as an ambient edge.
    pub fn dart_edge(&self, h: Dart) -> Edge {
        Edge::new(self.label(self.origin(h)), self.label(self.dest(h)))
    }

    pub fn face_darts(&self, f: FaceId) -> Vec<Dart> {
        let start = self.face_dart[f];
        let mut out = vec![start];
        let mut h = self.next[start];
        while h != start {
            out.push(h);
            h = self.next[h];
        }
        out
    }

    /// Darts of the hole face in cyclic order; empty for discs.
    pub fn hole_darts(&self) -> Vec<Dart> {
        self.hole.map_or_else(Vec::new, |f| self.face_darts(f))
    }

    /// Disc vertices of the hole walk.
    pub fn internal_walk(&self) -> Vec<usize> {
        self.hole_darts().iter().map(|&h| self.origin(h)).collect()
    }

    /// Disc vertices of the outer boundary, counterclockwise.
    pub fn external_walk(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.face_darts(self.outer).iter().map(|&h| self.dest(h)).collect();
        w.reverse();
        w
    }

    pub fn internal_labels(&self) -> Vec<Vertex> {
        self.internal_walk().into_iter().map(|v| self.label(v)).collect()
    }

    pub fn external_labels(&self) -> Vec<Vertex> {
        self.external_walk().into_iter().map(|v| self.label(v)).collect()
    }

    pub fn triangle_faces(&self) -> Vec<FaceId> {
        (0..self.face_kind.len()).filter(|&f| self.face_alive[f] && self.face_kind[f] == FaceKind::Triangle).collect()
    }

    pub fn face_count(&self) -> usize {
        self.triangle_faces().len()
    }

    /// Labels of a face's corners in cyclic order.
    pub fn face_labels(&self, f: FaceId) -> Vec<Vertex> {
        self.face_darts(f).iter().map(|&h| self.label(self.origin(h))).collect()
    }

    pub fn live_darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.origin.len()).filter(|&h| self.dart_alive[h])
    }

    pub fn vertex_count(&self) -> usize {
        let mut roots: Vec<usize> = self.live_darts().map(|h| self.origin(h)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn edge_count(&self) -> usize {
        self.live_darts().count() / 2
    }

    pub fn is_marked(&self, h: Dart) -> bool {
        self.marked[h]
    }

    pub fn set_marked(&mut self, h: Dart, on: bool) {
        self.marked[h] = on;
        let t = self.twin[h];
        self.marked[t] = on;
    }

    /// Glues a triangle with apex label `apex` onto hole dart `h` (u -> v).
    /// Returns the two new hole darts (u -> w, w -> v).
    pub fn glue_triangle(&mut self, h: Dart, apex: Vertex) -> Result<(Dart, Dart)> {
        let hole = self.hole.ok_or_else(|| diag_err("no hole to glue into"))?;
        if !self.dart_alive[h] || self.face[h] != hole {
            return Err(diag_err("dart is not on the hole boundary"));
        }
        if self.prev[h] == h {
            return Err(diag_err("hole of length one"));
        }
        let u = self.origin(h);
        let v = self.dest(h);
        let w = self.new_vertex(apex);
        let f = self.new_face(FaceKind::Triangle);
        let (p, nx) = (self.prev[h], self.next[h]);
        let a = self.new_dart(v, f);
        let b = self.new_dart(w, f);
        let c = self.new_dart(u, hole);
        let d = self.new_dart(w, hole);
        self.face[h] = f;
        self.face_dart[f] = h;
        self.twin[a] = d;
        self.twin[d] = a;
        self.twin[b] = c;
        self.twin[c] = b;
        self.link(h, a);
        self.link(a, b);
        self.link(b, h);
        self.link(p, c);
        self.link(c, d);
        self.link(d, nx);
        if self.face_dart[hole] == h {
            self.face_dart[hole] = c;
        }
        Ok((c, d))
    }

    /// Identifies the hole darts `h1 = (x -> y)` and `next(h1) = (y -> z)`,
    /// which must satisfy label(x) = label(z). Returns false if this closed
    /// the hole.
    pub fn zip(&mut self, h1: Dart) -> Result<bool> {
        let hole = self.hole.ok_or_else(|| diag_err("no hole to zip"))?;
        if !self.dart_alive[h1] || self.face[h1] != hole {
            return Err(diag_err("dart is not on the hole boundary"));
        }
        let h2 = self.next[h1];
        let x = self.origin(h1);
        let z = self.dest(h2);
        if self.vlabel[x] != self.vlabel[z] {
            return Err(diag_err("zipped darts are not mirror images"));
        }
        if self.twin[h1] == h2 {
            return Err(diag_err("cannot zip a dangling edge"));
        }
        let (t1, t2) = (self.twin[h1], self.twin[h2]);
        let mark = self.marked[h1] || self.marked[h2];
        self.twin[t1] = t2;
        self.twin[t2] = t1;
        self.marked[t1] = mark;
        self.marked[t2] = mark;
        self.dart_alive[h1] = false;
        self.dart_alive[h2] = false;
        let open = self.next[h2] != h1;
        if open {
            let (p, nx) = (self.prev[h1], self.next[h2]);
            self.link(p, nx);
            self.face_dart[hole] = nx;
        } else {
            self.face_alive[hole] = false;
            self.hole = None;
        }
        self.merge(x, z);
        Ok(open)
    }

    /// Removes the two triangles on either side of the edge of dart `h` and
    /// folds their remaining sides together, identifying the two apexes.
    /// Both triangles must have the same apex label and neither side may be
    /// a boundary face.
    pub fn collapse_edge(&mut self, h: Dart) -> Result<()> {
        let g = self.twin[h];
        let (f1, f2) = (self.face[h], self.face[g]);
        if self.face_kind[f1] != FaceKind::Triangle || self.face_kind[f2] != FaceKind::Triangle || f1 == f2 {
            return Err(diag_err("collapse needs two distinct triangles"));
        }
        // f1: h (u->v), b1 (v->z1), c1 (z1->u); f2: g (v->u), b2 (u->z2), c2 (z2->v)
        let (b1, c1) = (self.next[h], self.next[self.next[h]]);
        let (b2, c2) = (self.next[g], self.next[self.next[g]]);
        let z1 = self.origin(c1);
        let z2 = self.origin(c2);
        if self.vlabel[z1] != self.vlabel[z2] {
            return Err(diag_err("collapsed triangles have different apexes"));
        }
        // Side u-z: c1 with b2; side v-z: b1 with c2.
        let pairs = [(c1, b2), (b1, c2)];
        let kill = [h, g, b1, c1, b2, c2];
        for (p, q) in pairs {
            let (tp, tq) = (self.twin[p], self.twin[q]);
            if tp == q {
                continue;
            }
            self.twin[tp] = tq;
            self.twin[tq] = tp;
        }
        for d in kill {
            self.dart_alive[d] = false;
        }
        self.face_alive[f1] = false;
        self.face_alive[f2] = false;
        self.merge(z1, z2);
        self.prune_detached();
        Ok(())
    }

    /// Drops everything not reachable from the outer face, such as the
    /// sphere left behind when a fold closes a pocket, and retires
    /// vertices that no longer carry darts.
    fn prune_detached(&mut self) {
        let start = self.face_dart[self.outer];
        let mut reach = vec![false; self.origin.len()];
        let mut stack = vec![start];
        reach[start] = true;
        while let Some(h) = stack.pop() {
            for x in [self.next[h], self.twin[h]] {
                if !reach[x] {
                    reach[x] = true;
                    stack.push(x);
                }
            }
        }
        for h in 0..self.origin.len() {
            if self.dart_alive[h] && !reach[h] {
                self.dart_alive[h] = false;
                self.face_alive[self.face[h]] = false;
            }
        }
        let mut used = vec![false; self.vlabel.len()];
        for h in 0..self.origin.len() {
            if self.dart_alive[h] {
                used[self.find(self.origin[h])] = true;
            }
        }
        for v in 0..self.vlabel.len() {
            if self.vertex_alive[v] && !used[v] {
                self.vertex_alive[v] = false;
            }
        }
    }

    /// Reverses the orientation of every face.
    pub fn mirror(&mut self) {
        let live: Vec<Dart> = self.live_darts().collect();
        let new_origin: Vec<(Dart, usize)> = live.iter().map(|&h| (h, self.origin[self.twin[h]])).collect();
        let old_next = self.next.clone();
        let old_prev = self.prev.clone();
        for &h in &live {
            self.next[h] = old_prev[h];
            self.prev[h] = old_next[h];
        }
        for (h, o) in new_origin {
            self.origin[h] = o;
        }
    }

    /// Glues `other` onto this map along a shared boundary path. `mine` and
    /// `theirs` are the outer darts traversing the path in opposite
    /// directions: `mine[i]` runs opposite to `theirs[k - 1 - i]`.
    pub(crate) fn glue_along(&mut self, other: &PlanarDiagram, mine: &[Dart], theirs: &[Dart]) -> Result<()> {
        let k = mine.len();
        if k == 0 || theirs.len() != k {
            return Err(diag_err("gluing path must be non-empty and of equal length"));
        }
        let doff = self.origin.len();
        let foff = self.face_kind.len();
        let voff = self.vlabel.len();
        for i in 0..other.origin.len() {
            self.origin.push(other.origin[i] + voff);
            self.twin.push(other.twin[i] + doff);
            self.next.push(other.next[i] + doff);
            self.prev.push(other.prev[i] + doff);
            self.face.push(other.face[i] + foff);
            self.dart_alive.push(other.dart_alive[i]);
            self.marked.push(other.marked[i]);
        }
        for f in 0..other.face_kind.len() {
            self.face_kind.push(other.face_kind[f]);
            self.face_dart.push(other.face_dart[f].wrapping_add(doff));
            self.face_alive.push(other.face_alive[f] && f != other.outer);
        }
        for v in 0..other.vlabel.len() {
            self.vparent.push(other.vparent[v] + voff);
            self.vlabel.push(other.vlabel[v]);
            self.vertex_alive.push(other.vertex_alive[v]);
        }
        let their_outer = other.outer + foff;
        let theirs: Vec<Dart> = theirs.iter().map(|&d| d + doff).collect();
        // Relabel their outer darts as ours.
        for h in doff..self.origin.len() {
            if self.face[h] == their_outer {
                self.face[h] = self.outer;
            }
        }
        for i in 0..k {
            let a = mine[i];
            let b = theirs[k - 1 - i];
            if self.label(self.origin(a)) != self.label(self.dest(b)) || self.label(self.dest(a)) != self.label(self.origin(b)) {
                return Err(diag_err("gluing path labels disagree"));
            }
        }
        // Splice the outer cycles: drop the path darts on both sides.
        let a_first = mine[0];
        let a_last = mine[k - 1];
        let b_first = theirs[0];
        let b_last = theirs[k - 1];
        let (pa, na) = (self.prev[a_first], self.next[a_last]);
        let (pb, nb) = (self.prev[b_first], self.next[b_last]);
        let whole_a = na == a_first;
        let whole_b = nb == b_first;
        if whole_a && whole_b {
            return Err(diag_err("gluing would close the disc"));
        }
        if !whole_a && !whole_b {
            self.link(pa, nb);
            self.link(pb, na);
            self.face_dart[self.outer] = na;
        } else if whole_a {
            self.link(pb, nb);
            self.face_dart[self.outer] = nb;
        } else {
            self.link(pa, na);
            self.face_dart[self.outer] = na;
        }
        for i in 0..k {
            let a = mine[i];
            let b = theirs[k - 1 - i];
            let (ta, tb) = (self.twin[a], self.twin[b]);
            self.twin[ta] = tb;
            self.twin[tb] = ta;
            self.dart_alive[a] = false;
            self.dart_alive[b] = false;
            // a: p -> q, b: q -> p; merge b's endpoints into a's.
            let pairs = [(self.origin(a), self.dest(b)), (self.dest(a), self.origin(b))];
            for (keep, gone) in pairs {
                self.merge(keep, gone);
            }
        }
        Ok(())
    }

    /// Lexicographically least traversal code over all start darts and both
    /// orientations. Two maps get the same code iff they are isomorphic as
    /// labelled maps, possibly after reflection. Marks are ignored.
    pub fn canonical_code(&self) -> Vec<u64> {
        let live: Vec<Dart> = self.live_darts().collect();
        let mut best: Option<Vec<u64>> = None;
        let mut id: HashMap<Dart, u64> = HashMap::with_capacity(live.len());
        for mirrored in [false, true] {
            for &start in &live {
                id.clear();
                let mut order = vec![start];
                id.insert(start, 0);
                let mut code = Vec::with_capacity(4 * live.len());
                let mut i = 0;
                while i < order.len() {
                    let h = order[i];
                    i += 1;
                    let (step, label) = if mirrored {
                        (self.prev[h], self.label(self.dest(h)))
                    } else {
                        (self.next[h], self.label(self.origin(h)))
                    };
                    let kind = match self.face_kind[self.face[h]] {
                        FaceKind::Outer => 0,
                        FaceKind::Hole => 1,
                        FaceKind::Triangle => 2,
                    };
                    code.push(label as u64);
                    code.push(kind);
                    for d in [self.twin[h], step] {
                        let k = *id.entry(d).or_insert_with(|| {
                            order.push(d);
                            order.len() as u64 - 1
                        });
                        code.push(k);
                    }
                    if best.as_ref().is_some_and(|b| code.as_slice() > &b[..code.len().min(b.len())]) {
                        break;
                    }
                }
                if i == order.len() && best.as_ref().map_or(true, |b| code < *b) {
                    best = Some(code);
                }
            }
        }
        best.unwrap_or_default()
    }

    /// Checks the half-edge structure: twins, cycles, face kinds, vertex
    /// rotations and the Euler formula for a sphere.
    pub fn check_structure(&self) -> Result<()> {
        let live: Vec<Dart> = self.live_darts().collect();
        for &h in &live {
            let t = self.twin[h];
            if !self.dart_alive[t] || self.twin[t] != h || t == h {
                return Err(diag_err(format!("dart {h}: bad twin")));
            }
            let nx = self.next[h];
            if !self.dart_alive[nx] || self.prev[nx] != h || self.face[nx] != self.face[h] {
                return Err(diag_err(format!("dart {h}: bad next")));
            }
            if self.origin(nx) != self.dest(h) {
                return Err(diag_err(format!("dart {h}: next does not start at its end")));
            }
            if !self.face_alive[self.face[h]] {
                return Err(diag_err(format!("dart {h} in dead face")));
            }
        }
        let mut faces = 0;
        for f in 0..self.face_kind.len() {
            if !self.face_alive[f] {
                continue;
            }
            faces += 1;
            let ds = self.face_darts(f);
            if ds.iter().any(|&h| !self.dart_alive[h] || self.face[h] != f) {
                return Err(diag_err(format!("face {f} walk broken")));
            }
            if self.face_kind[f] == FaceKind::Triangle && ds.len() != 3 {
                return Err(diag_err(format!("bounded face {f} has {} sides", ds.len())));
            }
        }
        let in_faces: usize = (0..self.face_kind.len()).filter(|&f| self.face_alive[f]).map(|f| self.face_darts(f).len()).sum();
        if in_faces != live.len() {
            return Err(diag_err("some darts lie in no face walk"));
        }
        // One rotation orbit per vertex rules out pinched vertices.
        let mut seen: HashMap<Dart, ()> = HashMap::new();
        let mut orbit_roots: BTreeMap<usize, usize> = BTreeMap::new();
        for &h in &live {
            if seen.contains_key(&h) {
                continue;
            }
            let root = self.origin(h);
            *orbit_roots.entry(root).or_default() += 1;
            let mut d = h;
            loop {
                seen.insert(d, ());
                d = self.twin[self.prev[d]];
                if self.origin(d) != root {
                    return Err(diag_err("rotation leaves its vertex"));
                }
                if d == h {
                    break;
                }
            }
        }
        if let Some((v, _)) = orbit_roots.iter().find(|(_, &c)| c > 1) {
            return Err(diag_err(format!("vertex {v} is pinched")));
        }
        let v = orbit_roots.len() as i64;
        let e = live.len() as i64 / 2;
        if v - e + faces as i64 != 2 {
            return Err(diag_err(format!("Euler characteristic {} != 2", v - e + faces as i64)));
        }
        Ok(())
    }

    /// Live disc vertices in a canonical order: outer walk first, then by id.
    fn vertex_numbering(&self) -> BTreeMap<usize, usize> {
        let mut order: Vec<usize> = self.canonical_external_walk();
        let mut rest: Vec<usize> = self.live_darts().map(|h| self.origin(h)).collect();
        rest.sort_unstable();
        order.extend(rest);
        let mut map = BTreeMap::new();
        for v in order {
            let k = map.len();
            map.entry(v).or_insert(k);
        }
        map
    }

    /// The outer walk rotated to its lexicographically least label sequence.
    fn canonical_external_walk(&self) -> Vec<usize> {
        let w = self.external_walk();
        let labels: Vec<Vertex> = w.iter().map(|&v| self.label(v)).collect();
        let k = (0..w.len()).min_by_key(|&k| (labels[k..].iter().chain(&labels[..k]).copied().collect::<Vec<_>>(), k)).unwrap_or(0);
        w[k..].iter().chain(&w[..k]).copied().collect()
    }

    pub fn to_json(&self) -> DiagramJson {
        let num = self.vertex_numbering();
        let id = |v: usize| num[&v];
        let faces = self
            .triangle_faces()
            .into_iter()
            .map(|f| {
                let d = self.face_darts(f);
                [id(self.origin(d[0])), id(self.origin(d[1])), id(self.origin(d[2]))]
            })
            .collect();
        let labels = num.iter().map(|(&v, &k)| (k.to_string(), self.vlabel[v])).collect();
        let external = self.canonical_external_walk().into_iter().map(id).collect();
        let internal: Vec<usize> = self.internal_walk().into_iter().map(id).collect();
        let k = (0..internal.len()).min_by_key(|&k| internal[k..].iter().chain(&internal[..k]).copied().collect::<Vec<_>>()).unwrap_or(0);
        let internal = internal[k..].iter().chain(&internal[..k]).copied().collect();
        let mut marked: Vec<[usize; 2]> = self
            .live_darts()
            .filter(|&h| self.marked[h] && h < self.twin[h])
            .map(|h| {
                let (a, b) = (id(self.origin(h)), id(self.dest(h)));
                [a.min(b), a.max(b)]
            })
            .collect();
        marked.sort_unstable();
        DiagramJson { faces, labels, external, internal, marked }
    }

    /// Rebuilds a map from its JSON form. Maps with parallel edges between
    /// the same two disc vertices are ambiguous in this format and rejected.
    pub fn from_json(j: &DiagramJson) -> Result<Self> {
        let mut labels: BTreeMap<usize, Vertex> = BTreeMap::new();
        for (k, &l) in &j.labels {
            let v: usize = k.parse().map_err(|_| Error::Parse(format!("bad disc vertex {k:?}")))?;
            labels.insert(v, l);
        }
        let nv = labels.keys().next_back().map_or(0, |&m| m + 1);
        let mut d = PlanarDiagram {
            origin: Vec::new(),
            twin: Vec::new(),
            next: Vec::new(),
            prev: Vec::new(),
            face: Vec::new(),
            dart_alive: Vec::new(),
            marked: Vec::new(),
            face_kind: Vec::new(),
            face_dart: Vec::new(),
            face_alive: Vec::new(),
            vparent: Vec::new(),
            vlabel: Vec::new(),
            vertex_alive: Vec::new(),
            outer: 0,
            hole: None,
        };
        for v in 0..nv {
            let l = *labels.get(&v).ok_or_else(|| Error::Parse(format!("disc vertex {v} unlabelled")))?;
            d.new_vertex(l);
        }
        let mut by_ends: HashMap<(usize, usize), Vec<Dart>> = HashMap::new();
        let mut add_cycle = |d: &mut PlanarDiagram, f: FaceId, cyc: &[usize]| -> Result<()> {
            let ids: Vec<Dart> = (0..cyc.len()).map(|i| d.new_dart(cyc[i], f)).collect();
            for i in 0..cyc.len() {
                d.link(ids[i], ids[(i + 1) % cyc.len()]);
                let e = (cyc[i], cyc[(i + 1) % cyc.len()]);
                if e.0 >= nv || e.1 >= nv {
                    return Err(Error::Parse("disc vertex out of range".into()));
                }
                by_ends.entry(e).or_default().push(ids[i]);
            }
            Ok(())
        };
        let outer = d.new_face(FaceKind::Outer);
        d.outer = outer;
        if j.external.len() < 2 {
            return Err(Error::Parse("external walk too short".into()));
        }
        let mut ext = j.external.clone();
        ext.reverse();
        add_cycle(&mut d, outer, &ext)?;
        if !j.internal.is_empty() {
            let hole = d.new_face(FaceKind::Hole);
            d.hole = Some(hole);
            add_cycle(&mut d, hole, &j.internal)?;
        }
        for f in &j.faces {
            let id = d.new_face(FaceKind::Triangle);
            add_cycle(&mut d, id, f)?;
        }
        for (&(a, b), ds) in &by_ends {
            let back = by_ends.get(&(b, a)).ok_or_else(|| Error::Parse(format!("edge {a}-{b} has one side only")))?;
            if ds.len() != 1 || back.len() != 1 {
                return Err(Error::Parse(format!("edge {a}-{b} is ambiguous")));
            }
            d.twin[ds[0]] = back[0];
        }
        for m in &j.marked {
            let h = by_ends.get(&(m[0], m[1])).ok_or_else(|| Error::Parse("marked edge missing".into()))?[0];
            d.set_marked(h, true);
        }
        d.check_structure()?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub faces: Vec<[usize; 3]>,
    pub labels: BTreeMap<String, Vertex>,
    pub external: Vec<usize>,
    pub internal: Vec<usize>,
    pub marked: Vec<[usize; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_annulus_is_planar() {
        let d = PlanarDiagram::from_cycle(&[0, 1, 2]);
        d.check_structure().unwrap();
        assert_eq!(d.internal_labels(), vec![0, 1, 2]);
        assert_eq!(d.external_labels(), vec![0, 1, 2]);
        assert_eq!(d.face_count(), 0);
    }

    #[test]
    fn glue_then_zip_closes_a_triangle() {
        let mut d = PlanarDiagram::from_cycle(&[0, 1, 2]);
        let h = d.hole_darts()[0];
        let (c, _) = d.glue_triangle(h, 2).unwrap();
        d.check_structure().unwrap();
        assert_eq!(d.internal_labels(), vec![0, 2, 1, 2]);
        // hole: 0->2', 2'->1, 1->2, 2->0; zip 2'->1->2.
        let open = d.zip(d.next(c)).unwrap();
        assert!(open);
        d.check_structure().unwrap();
        assert_eq!(d.internal_labels().len(), 2);
        let h = d.hole_darts()[0];
        assert!(!d.zip(h).unwrap());
        d.check_structure().unwrap();
        assert_eq!(d.face_count(), 1);
        assert_eq!(d.vertex_count(), 3);
    }

    #[test]
    fn json_roundtrip() {
        let mut d = PlanarDiagram::from_cycle(&[4, 5, 6, 7]);
        let h = d.hole_darts()[1];
        d.glue_triangle(h, 9).unwrap();
        d.set_marked(d.hole_darts()[0], true);
        let j = d.to_json();
        let back = PlanarDiagram::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
        assert_eq!(back.internal_labels(), d.internal_labels());
    }

    #[test]
    fn canonical_code_ignores_rotation_and_reflection() {
        let mut a = PlanarDiagram::from_cycle(&[0, 1, 2]);
        a.glue_triangle(a.hole_darts()[0], 3).unwrap();
        let mut b = PlanarDiagram::from_cycle(&[1, 2, 0]);
        b.glue_triangle(b.hole_darts()[2], 3).unwrap();
        let mut c = PlanarDiagram::from_cycle(&[2, 1, 0]);
        c.glue_triangle(c.hole_darts()[1], 3).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        assert_eq!(a.canonical_code(), c.canonical_code());
        let mut d = PlanarDiagram::from_cycle(&[0, 1, 2]);
        d.glue_triangle(d.hole_darts()[1], 3).unwrap();
        assert_ne!(a.canonical_code(), d.canonical_code());
    }

    #[test]
    fn mirror_preserves_structure() {
        let mut d = PlanarDiagram::from_cycle(&[0, 1, 2, 3]);
        let h = d.hole_darts()[0];
        d.glue_triangle(h, 2).unwrap();
        d.mirror();
        d.check_structure().unwrap();
        let mut e = d.external_labels();
        e.reverse();
        assert_eq!(e.len(), 4);
    }
}
