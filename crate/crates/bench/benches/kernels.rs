use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use triboot::bootstrap::k3_closure;
use triboot::graph::{gnp, Graph};
use triboot::lm::{sample_lm, star_activates};
use triboot::process::{census_pvw, nice_harness, CensusGuard};
use triboot::topology::{clique_complex_2, h1_z2};
use triboot::tree_builder::{build_diameter4_tree, RootRule};
use triboot::Seed;

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("k3_closure");
    for n in [200usize, 800] {
        let g = gnp(n, 1.5 * (n as f64).powf(-1.0 / 3.0), Seed::new(1, n as u64)).unwrap();
        let star = Graph::from_edges(n, g.neighbors(0).iter().map(|&w| triboot::Edge::new(0, w))).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(g, star), |b, (g, h)| b.iter(|| k3_closure(h, g).unwrap().closure.m()));
    }
    group.finish();
}

fn tree4(c: &mut Criterion) {
    let g = gnp(1000, 1.2 * 1000f64.powf(-1.0 / 3.0), Seed::new(2, 0)).unwrap();
    c.bench_function("diameter4_tree/1000", |b| b.iter(|| build_diameter4_tree(black_box(&g), RootRule::MaxDegree).unwrap().activated));
}

fn homology(c: &mut Criterion) {
    let x = clique_complex_2(&gnp(60, 0.3, Seed::new(3, 0)).unwrap());
    c.bench_function("h1_z2/60", |b| b.iter(|| h1_z2(black_box(&x)).betti1));
}

fn census(c: &mut Criterion) {
    c.bench_function("census/3,5,0", |b| b.iter(|| census_pvw(3, 5, 0, 5, CensusGuard::default()).unwrap().count));
}

fn harness(c: &mut Criterion) {
    c.bench_function("nice_harness/100", |b| b.iter(|| nice_harness(100, 12, 9).unwrap().len()));
}

fn lm_star(c: &mut Criterion) {
    let x = sample_lm(300, 1.0 / 300f64.sqrt(), Seed::new(4, 0)).unwrap();
    c.bench_function("lm_star/300", |b| b.iter(|| star_activates(black_box(&x), 0).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = closure, tree4, homology, census, harness, lm_star
}
criterion_main!(benches);
