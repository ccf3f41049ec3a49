//! Van Kampen style diagrams built from activation processes, and the
//! walk-decomposition property used to count them.

pub mod planar;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

pub use planar::{Dart, DiagramJson, FaceId, FaceKind, PlanarDiagram};

use crate::bootstrap::ActivationProcess;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::seed::Seed;
use crate::topology::{activation_complex_unchecked, cycle_edges, FillingCertificate};

pub const DEFAULT_MAX_FACES: usize = 1_000_000;

fn check_activates_cycle(proc: &ActivationProcess, c: &[Vertex]) -> Result<()> {
    if c.len() < 3 || c.iter().collect::<BTreeSet<_>>().len() != c.len() {
        return Err(Error::NotACycle(format!("{c:?}")));
    }
    let activated: HashSet<Edge> = proc.steps.iter().map(|s| s.edge).collect();
    for e in cycle_edges(c) {
        if !proc.starter.contains(e) && !activated.contains(&e) {
            return Err(Error::Precondition(format!("cycle edge {e:?} is not activated")));
        }
    }
    Ok(())
}

/// The algorithmic diagram together with how many boundary instances each
/// step was glued onto.
#[derive(Debug, Clone)]
pub struct AlgorithmicVk {
    pub diagram: PlanarDiagram,
    pub instances: Vec<usize>,
}

impl AlgorithmicVk {
    /// True when some step was glued onto two or more edges.
    pub fn has_repeats(&self) -> bool {
        self.instances.iter().any(|&k| k > 1)
    }
}

/// Backward construction: starting from `c`, glue step k's triangle onto
/// every hole edge labelled by its activated edge, for k = s down to 1.
pub fn algorithmic_vk(proc: &ActivationProcess, c: &[Vertex], max_faces: usize) -> Result<AlgorithmicVk> {
    check_activates_cycle(proc, c)?;
    let mut d = PlanarDiagram::from_cycle(c);
    let mut instances = vec![0; proc.steps.len()];
    let mut faces = 0usize;
    for (k, step) in proc.steps.iter().enumerate().rev() {
        let apex = step.triangle.apex(step.edge);
        let hits: Vec<Dart> = d.hole_darts().into_iter().filter(|&h| d.dart_edge(h) == step.edge).collect();
        faces += hits.len();
        if faces > max_faces {
            return Err(Error::Feasibility(format!("algorithmic diagram exceeds {max_faces} faces")));
        }
        instances[k] = hits.len();
        for h in hits {
            d.glue_triangle(h, apex)?;
        }
    }
    Ok(AlgorithmicVk { diagram: d, instances })
}

pub fn algorithmic_vk_diagram(proc: &ActivationProcess, c: &[Vertex]) -> Result<PlanarDiagram> {
    algorithmic_vk(proc, c, DEFAULT_MAX_FACES).map(|a| a.diagram)
}

/// Closes the hole of `d` by folding adjacent mirror edge pairs. Succeeds
/// exactly when the hole labels trace a closed walk that reduces to a point,
/// as every closed walk on a tree does.
pub fn glue_tree_walk(mut d: PlanarDiagram) -> Result<FillingCertificate> {
    let boundary_cycle = d.external_labels();
    let darts = d.hole_darts();
    let backtrack = |d: &PlanarDiagram, a: Dart, b: Dart| d.label(d.origin(a)) == d.label(d.dest(b));
    let mut stack: Vec<Dart> = Vec::with_capacity(darts.len());
    for h in darts {
        stack.push(h);
        while stack.len() >= 2 {
            let (a, b) = (stack[stack.len() - 2], stack[stack.len() - 1]);
            if !backtrack(&d, a, b) {
                break;
            }
            d.zip(a)?;
            stack.truncate(stack.len() - 2);
        }
    }
    let mut lo = 0;
    while stack.len() - lo >= 2 {
        let (a, b) = (stack[stack.len() - 1], stack[lo]);
        if !backtrack(&d, a, b) {
            break;
        }
        d.zip(a)?;
        stack.pop();
        lo += 1;
    }
    if stack.len() > lo {
        let rest: Vec<Vertex> = stack[lo..].iter().map(|&h| d.label(d.origin(h))).collect();
        return Err(Error::Precondition(format!("hole walk {rest:?} is not a tree walk")));
    }
    d.check_structure()?;
    Ok(FillingCertificate { disc: d, boundary_cycle })
}

/// Filling of `c` from a process whose starter is a tree, validated against
/// the process's activation complex.
pub fn tree_filling(proc: &ActivationProcess, c: &[Vertex]) -> Result<FillingCertificate> {
    let cert = glue_tree_walk(algorithmic_vk_diagram(proc, c)?)?;
    cert.validate(&activation_complex_unchecked(proc))?;
    Ok(cert)
}

/// The marked-edge variant: each step's triangle is glued once, onto the
/// unique marked hole edge carrying its activated edge.
pub fn activation_diagram(proc: &ActivationProcess, c: &[Vertex]) -> Result<PlanarDiagram> {
    check_activates_cycle(proc, c)?;
    if !proc.starter.is_connected_on_support() {
        return Err(Error::Precondition("starter is not connected".into()));
    }
    let mut d = PlanarDiagram::from_cycle(c);
    for h in d.hole_darts() {
        d.set_marked(h, true);
    }
    let mut marked: BTreeMap<Edge, Dart> = d.hole_darts().into_iter().map(|h| (d.dart_edge(h), h)).collect();
    for (k, step) in proc.steps.iter().enumerate().rev() {
        let h = marked.remove(&step.edge).ok_or_else(|| {
            Error::Diagram(format!("step {}: no marked edge labelled {:?}", k + 1, step.edge))
        })?;
        let apex = step.triangle.apex(step.edge);
        d.set_marked(h, false);
        let (a, b) = d.glue_triangle(h, apex)?;
        for side in [a, b] {
            let e = d.dart_edge(side);
            if let std::collections::btree_map::Entry::Vacant(v) = marked.entry(e) {
                v.insert(side);
                d.set_marked(side, true);
            }
        }
    }
    Ok(d)
}

/// Checks that edges covered once by the first i walks meet walk i + 1 in
/// a path, for every i. Preconditions are reported as errors, the property
/// itself as the boolean.
pub fn verify_walk_decomposition(trees: &[Vec<Edge>], walks: &[Vec<Vertex>]) -> Result<bool> {
    if trees.len() != walks.len() {
        return Err(Error::Precondition("one tree per walk".into()));
    }
    let mut prev: BTreeSet<Edge> = BTreeSet::new();
    let mut cover: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut ok = true;
    for (i, (t, w)) in trees.iter().zip(walks).enumerate() {
        let tree: BTreeSet<Edge> = t.iter().copied().collect();
        if !prev.is_subset(&tree) {
            return Err(Error::Precondition(format!("tree {i} does not contain tree {}", i.wrapping_sub(1))));
        }
        let n = tree.iter().map(|e| e.1 as usize + 1).max().unwrap_or(0);
        let g = Graph::from_edges(n, tree.iter().copied())?;
        if !g.is_forest() || !g.is_connected_on_support() {
            return Err(Error::Precondition(format!("graph {i} is not a tree")));
        }
        let wedges: Vec<Edge> = w.windows(2).map(|p| Edge::new(p[0], p[1])).collect();
        if let Some(e) = wedges.iter().find(|e| !tree.contains(e)) {
            return Err(Error::Precondition(format!("walk {i} leaves its tree at {e:?}")));
        }
        if i > 0 {
            let once: BTreeSet<Edge> = cover.iter().filter(|(_, &k)| k == 1).map(|(&e, _)| e).collect();
            let meet: Vec<Edge> = wedges.iter().copied().filter(|e| once.contains(e)).collect::<BTreeSet<_>>().into_iter().collect();
            ok &= is_path(&meet);
        }
        for e in &wedges {
            *cover.entry(*e).or_default() += 1;
        }
        if let Some(e) = tree.iter().find(|e| !matches!(cover.get(e), Some(1 | 2))) {
            return Err(Error::Precondition(format!("edge {e:?} covered {} times after walk {i}", cover.get(e).copied().unwrap_or(0))));
        }
        prev = tree;
    }
    Ok(ok)
}

/// An edge set, assumed acyclic, forming a single path (or empty).
pub(crate) fn is_path(edges: &[Edge]) -> bool {
    if edges.is_empty() {
        return true;
    }
    let mut deg: BTreeMap<Vertex, usize> = BTreeMap::new();
    for e in edges {
        *deg.entry(e.0).or_default() += 1;
        *deg.entry(e.1).or_default() += 1;
    }
    if deg.values().any(|&d| d > 2) {
        return false;
    }
    let n = deg.keys().next_back().map_or(0, |&m| m as usize + 1);
    let g = Graph::from_edges(n, edges.iter().copied()).expect("valid edges");
    g.is_connected_on_support()
}

/// A valid random instance: a depth-first double traversal of a random
/// tree, cut into segments, some reversed, reordered while every prefix
/// stays connected, and optionally truncated.
pub fn random_walk_instance(max_tree: usize, seed: Seed) -> (Vec<Vec<Edge>>, Vec<Vec<Vertex>>) {
    let mut rng = seed.rng();
    let n = rng.gen_range(2..=max_tree.max(2));
    let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in 1..n {
        let p = rng.gen_range(0..v);
        children[p].push(v as Vertex);
    }
    for c in &mut children {
        c.shuffle(&mut rng);
    }
    let mut tour = vec![0 as Vertex];
    fn dfs(v: Vertex, ch: &[Vec<Vertex>], tour: &mut Vec<Vertex>) {
        for &c in &ch[v as usize] {
            tour.push(c);
            dfs(c, ch, tour);
            tour.push(v);
        }
    }
    dfs(0, &children, &mut tour);
    let steps = tour.len() - 1;
    let k = rng.gen_range(1..=steps.min(6));
    let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, steps - 1, k - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(steps);
    let mut segs: Vec<Vec<Vertex>> = bounds.windows(2).map(|b| tour[b[0]..=b[1]].to_vec()).collect();
    for s in &mut segs {
        if rng.gen_bool(0.5) {
            s.reverse();
        }
    }
    // Reorder greedily: pick random segments that touch what is covered.
    let mut order: Vec<Vec<Vertex>> = Vec::new();
    let mut touched: BTreeSet<Vertex> = BTreeSet::new();
    while !segs.is_empty() {
        let fits: Vec<usize> = (0..segs.len()).filter(|&i| order.is_empty() || segs[i].iter().any(|v| touched.contains(v))).collect();
        let i = *fits.choose(&mut rng).expect("some segment touches the covered subtree");
        let s = segs.swap_remove(i);
        touched.extend(s.iter().copied());
        order.push(s);
    }
    let keep = rng.gen_range(1..=order.len());
    order.truncate(keep);
    let mut trees = Vec::new();
    let mut acc: BTreeSet<Edge> = BTreeSet::new();
    for w in &order {
        acc.extend(w.windows(2).map(|p| Edge::new(p[0], p[1])));
        trees.push(acc.iter().copied().collect());
    }
    (trees, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::k3_closure;
    use crate::bootstrap::ActivationStep;
    use crate::graph::Triangle;

    fn star_k4() -> ActivationProcess {
        let k4 = Graph::complete(4);
        let star = Graph::star(4, 0);
        let steps = vec![
            ActivationStep { edge: Edge(1, 2), triangle: Triangle([0, 1, 2]) },
            ActivationStep { edge: Edge(2, 3), triangle: Triangle([0, 2, 3]) },
            ActivationStep { edge: Edge(1, 3), triangle: Triangle([0, 1, 3]) },
        ];
        let target = Graph::from_pairs(4, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        ActivationProcess { starter: star, ambient: k4, steps, target }
    }

    #[test]
    fn one_step_triangle() {
        let k3 = Graph::complete(3);
        let path = Graph::path(3);
        let r = k3_closure(&path, &k3).unwrap();
        let vk = algorithmic_vk(&r.process, &[0, 1, 2], 100).unwrap();
        assert_eq!(vk.diagram.face_count(), 1);
        assert_eq!(vk.diagram.internal_labels().len(), 4);
        let cert = glue_tree_walk(vk.diagram).unwrap();
        assert!(cert.disc.hole_face().is_none());
        let ad = activation_diagram(&r.process, &[0, 1, 2]).unwrap();
        assert_eq!(ad.internal_labels().len(), 4);
    }

    #[test]
    fn star_cycle_diagrams() {
        let p = star_k4();
        let vk = algorithmic_vk(&p, &[1, 2, 3], 100).unwrap();
        assert_eq!(vk.instances, vec![1, 1, 1]);
        assert!(!vk.has_repeats());
        let hole = vk.diagram.internal_labels();
        assert_eq!(hole.len(), 6);
        assert!(cycle_edges(&hole).iter().all(|&e| p.starter.contains(e)));
        let cert = tree_filling(&p, &[1, 2, 3]).unwrap();
        assert_eq!(cert.disc.face_count(), 3);
        let ad = activation_diagram(&p, &[1, 2, 3]).unwrap();
        assert_eq!(ad.face_count(), 3);
        assert_eq!(ad.internal_labels().len(), 6);
        ad.check_structure().unwrap();
    }

    #[test]
    fn four_cycle_from_star() {
        let k4 = Graph::complete(4);
        let steps = vec![
            ActivationStep { edge: Edge(1, 2), triangle: Triangle([0, 1, 2]) },
            ActivationStep { edge: Edge(2, 3), triangle: Triangle([0, 2, 3]) },
        ];
        let target = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let p = ActivationProcess { starter: Graph::star(4, 0), ambient: k4, steps, target };
        let ad = activation_diagram(&p, &[0, 1, 2, 3]).unwrap();
        assert_eq!(ad.internal_labels().len(), 6);
        tree_filling(&p, &[0, 1, 2, 3]).unwrap();
    }

    #[test]
    fn repeated_instances_are_all_glued() {
        // Edge 02 is activated first and then used by both later triangles,
        // so it appears twice on the boundary when its round comes.
        let k5 = Graph::complete(5);
        let starter = Graph::from_pairs(5, &[(0, 1), (1, 2), (1, 3), (1, 4)]).unwrap();
        let steps = vec![
            ActivationStep { edge: Edge(0, 2), triangle: Triangle([0, 1, 2]) },
            ActivationStep { edge: Edge(0, 3), triangle: Triangle([0, 1, 3]) },
            ActivationStep { edge: Edge(2, 3), triangle: Triangle([0, 2, 3]) },
            ActivationStep { edge: Edge(0, 4), triangle: Triangle([0, 1, 4]) },
            ActivationStep { edge: Edge(2, 4), triangle: Triangle([0, 2, 4]) },
            ActivationStep { edge: Edge(3, 4), triangle: Triangle([0, 3, 4]) },
        ];
        let p = ActivationProcess { starter, ambient: k5.clone(), steps, target: k5 };
        p.validate().unwrap();
        let vk = algorithmic_vk(&p, &[2, 3, 4], 1000).unwrap();
        assert!(vk.has_repeats());
        assert!(vk.diagram.face_count() > p.steps.len());
        vk.diagram.check_structure().unwrap();
        glue_tree_walk(vk.diagram).unwrap().validate(&activation_complex_unchecked(&p)).unwrap();
    }

    #[test]
    fn non_tree_hole_is_rejected() {
        let d = PlanarDiagram::from_cycle(&[0, 1, 2]);
        assert!(matches!(glue_tree_walk(d), Err(Error::Precondition(_))));
        let d = PlanarDiagram::from_cycle(&[0, 1]);
        assert!(glue_tree_walk(d).is_ok());
    }

    #[test]
    fn unactivated_cycle_is_rejected() {
        let p = star_k4();
        assert!(activation_diagram(&p, &[0, 1, 4]).is_err());
        let mut q = p.clone();
        q.steps.pop();
        assert!(algorithmic_vk_diagram(&q, &[1, 2, 3]).is_err());
    }

    #[test]
    fn cycle_inside_starter_gives_bare_annulus() {
        let k3 = Graph::complete(3);
        let p = ActivationProcess { starter: k3.clone(), ambient: k3.clone(), steps: vec![], target: k3 };
        let d = activation_diagram(&p, &[0, 1, 2]).unwrap();
        assert_eq!(d.face_count(), 0);
        assert_eq!(d.internal_labels(), d.external_labels());
    }

    #[test]
    fn walk_decomposition_examples() {
        let tree = vec![Edge(0, 1), Edge(1, 2), Edge(1, 3)];
        let double = vec![0, 1, 2, 1, 3, 1, 0];
        assert!(verify_walk_decomposition(&[tree.clone()], &[double]).unwrap());
        let path = vec![Edge(0, 1), Edge(1, 2)];
        assert!(verify_walk_decomposition(&[path.clone()], &[vec![0, 1, 2]]).unwrap());
        assert!(verify_walk_decomposition(&[path.clone(), path.clone()], &[vec![0, 1, 2], vec![2, 1, 0]]).unwrap());
        assert!(verify_walk_decomposition(&[path.clone()], &[vec![0, 1, 2, 1, 0, 1]]).is_err());
        assert!(verify_walk_decomposition(&[tree], &[vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn random_instances_satisfy_the_property() {
        for s in 0..500 {
            let (t, w) = random_walk_instance(20, Seed::new(5, s));
            assert!(verify_walk_decomposition(&t, &w).unwrap(), "seed {s}");
        }
    }
}
