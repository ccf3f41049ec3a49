//! Seeded randomized property suite behind the `verify` command.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{k3_closure, k3_closure_shuffled};
use crate::diagram::{activation_diagram, random_walk_instance, verify_walk_decomposition};
use crate::error::Result;
use crate::graph::{gnp, Graph};
use crate::process::{edge_lower_bound_check, ledger, nice_harness, random_spanning_tree, random_subprocess, union};
use crate::seed::Seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Case counts per property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSize {
    pub confluence_pairs: usize,
    pub harness: usize,
    pub union_pairs: usize,
    pub walk_instances: usize,
}

impl SuiteSize {
    pub const FULL: SuiteSize = SuiteSize { confluence_pairs: 200, harness: 1000, union_pairs: 500, walk_instances: 10_000 };
    pub const QUICK: SuiteSize = SuiteSize { confluence_pairs: 20, harness: 50, union_pairs: 50, walk_instances: 500 };
}

struct Tally {
    property: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(property: &'static str) -> Self {
        Tally { property, cases: 0, failures: 0, first: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.first.get_or_insert_with(what);
        }
    }

    fn done(self) -> PropertyResult {
        PropertyResult { property: self.property.into(), cases: self.cases, failures: self.failures, first_failure: self.first }
    }
}

fn confluence(pairs: usize, master: u64) -> Result<PropertyResult> {
    let mut t = Tally::new("closure-confluence");
    let mut rng = Seed::new(master, 0).rng();
    for i in 0..pairs as u64 {
        let n = rng.gen_range(3..=12);
        let g = gnp(n, rng.gen_range(0.3..0.9), Seed::new(master, 1 + i))?;
        let h = Graph::from_edges(n, g.edges().filter(|_| rng.gen_bool(0.4)))?;
        let fifo = k3_closure(&h, &g)?.closure;
        let same = (0..10).map(|k| k3_closure_shuffled(&h, &g, Seed::derive(master, &[b"order", &i.to_le_bytes(), &[k]]))).all(|r| r.is_ok_and(|r| r.closure == fifo));
        t.record(same, || format!("pair {i}"));
    }
    Ok(t.done())
}

fn harness_laws(count: usize, master: u64) -> Result<[PropertyResult; 2]> {
    let mut ident = Tally::new("ledger-identity");
    let mut internal = Tally::new("internal-boundary-law");
    for (i, x) in nice_harness(count, 12, master)?.iter().enumerate() {
        let p = &x.reduction.process;
        ident.record(edge_lower_bound_check(p).is_ok_and(|r| r.holds()), || format!("instance {i}"));
        let law = match (activation_diagram(p, &x.cycle), ledger(p)) {
            (Ok(d), Ok(l)) => d.internal_labels().len() as i64 == 2 * p.starter.m() as i64 + l.total_excess,
            _ => false,
        };
        internal.record(law, || format!("instance {i}"));
    }
    Ok([ident.done(), internal.done()])
}

fn union_laws(pairs: usize, master: u64) -> Result<PropertyResult> {
    let mut t = Tally::new("union-laws");
    let mut rng = Seed::new(master, 0).rng();
    while t.cases < pairs {
        let n = rng.gen_range(5..=11);
        let g = gnp(n, rng.gen_range(0.4..0.9), Seed::new(master, rng.gen()))?;
        if !g.is_connected() {
            continue;
        }
        let tree = random_spanning_tree(&g, &mut rng);
        let parent = Arc::new(k3_closure(&tree, &g)?.process);
        let a1 = random_subprocess(&parent, &mut rng);
        let a2 = random_subprocess(&parent, &mut rng);
        let ok = union(&a1, &a2).is_ok_and(|u| u.complex() == a1.complex().union(&a2.complex())) && union(&a1, &a1).is_ok_and(|u| u == a1);
        let k = t.cases;
        t.record(ok, || format!("pair {k}"));
    }
    Ok(t.done())
}

fn walks(count: usize, master: u64) -> PropertyResult {
    let bad: Vec<usize> = (0..count)
        .into_par_iter()
        .filter(|&i| {
            let (trees, walks) = random_walk_instance(20, Seed::new(master, i as u64));
            !matches!(verify_walk_decomposition(&trees, &walks), Ok(true))
        })
        .collect();
    PropertyResult { property: "walk-decomposition".into(), cases: count, failures: bad.len(), first_failure: bad.first().map(|i| format!("instance {i}")) }
}

pub fn property_suite(size: SuiteSize, seed: u64) -> Result<Vec<PropertyResult>> {
    let sub = |tag: &[u8]| Seed::derive(seed, &[tag]).key();
    let [ident, internal] = harness_laws(size.harness, sub(b"harness"))?;
    Ok(vec![confluence(size.confluence_pairs, sub(b"confluence"))?, ident, internal, union_laws(size.union_pairs, sub(b"union"))?, walks(size.walk_instances, sub(b"walks"))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = property_suite(SuiteSize::QUICK, 1).unwrap();
        assert_eq!(r.len(), 5);
        for p in &r {
            assert!(p.passed(), "{p:?}");
            assert!(p.cases > 0);
        }
    }
}
