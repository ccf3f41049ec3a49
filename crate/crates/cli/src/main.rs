//! `triboot` command line. Output is JSON on stdout unless `--human`.
//! Exit codes: 0 success, 1 a "no" or "unknown" answer, 2 bad usage or input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use triboot::bootstrap::{exists_activating_spanning_tree, k3_closure, k3_closure_shuffled, wsat_exact_k3, Answer, ProcessJson, DEFAULT_VERTEX_BUDGET};
use triboot::diagram::{activation_diagram, algorithmic_vk_diagram, tree_filling};
use triboot::experiments::{run_sweep, run_sweep_to, Model, SweepConfig, DEFAULT_TREE_LIMIT};
use triboot::graph::{gnp, Graph};
use triboot::lm::{sample_lm, star_activates, LmComplex};
use triboot::process::{census_pvw, ledger, reduce_to_nice, CensusGuard};
use triboot::topology::{clique_complex_2, h1_z2, simply_connected, ScVerdict, TwoComplex, DEFAULT_BUDGET};
use triboot::tree_builder::{build_diameter4_tree, build_hamilton_path_activator, RootRule, DEFAULT_NODE_BUDGET};
use triboot::verify::{property_suite, SuiteSize};
use triboot::{ActivationProcess, Error, Seed, Vertex, SCHEMA_VERSIONS};

fn long_version() -> &'static str {
    let schemas: Vec<String> = SCHEMA_VERSIONS.iter().map(|(k, v)| format!("{k} v{v}")).collect();
    Box::leak(format!("{}\nschemas: {}", env!("CARGO_PKG_VERSION"), schemas.join(", ")).into_boxed_str())
}

#[derive(Parser)]
#[command(name = "triboot", version, long_version = long_version(), about = "Triangle bootstrap percolation toolkit")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph.
    Gen(GenArgs),
    /// K3-bootstrap closure of a starter inside an ambient graph.
    Closure(ClosureArgs),
    /// Search for a spanning tree that activates the graph.
    FindTree(FindTreeArgs),
    /// Build the diameter-4 tree around a root and test activation.
    BuildTree4(Tree4Args),
    /// Build a Hamilton path activator.
    BuildHampath(HampathArgs),
    /// Simple-connectivity check of the triangle complex.
    CheckSc(CheckScArgs),
    /// Van Kampen or activation diagram of a process over a cycle.
    Diagram(DiagramArgs),
    /// Reduce a tree-started process to a nice one for a cycle.
    ReduceNice(CycleArgs),
    /// Count activation diagrams.
    Census(CensusArgs),
    /// Exact weak saturation number.
    Wsat(WsatArgs),
    /// Sample a Linial-Meshulam complex.
    LmSample(LmSampleArgs),
    /// Triadic activation from a star.
    LmStar(LmStarArgs),
    /// Threshold sweep.
    Sweep(SweepArgs),
    /// Randomized property suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Gnp,
    Complete,
    Cycle,
    Path,
    Star,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Edges,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "gnp")]
    model: GenModel,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "c")]
    p: Option<f64>,
    /// Sets p = c n^(-1/3).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ClosureArgs {
    #[arg(long)]
    starter: PathBuf,
    #[arg(long)]
    ambient: PathBuf,
    /// Activate in a random order drawn from this seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GraphArg {
    /// Graph as JSON or an edge list.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct FindTreeArgs {
    #[command(flatten)]
    g: GraphArg,
    #[arg(long, default_value_t = DEFAULT_TREE_LIMIT)]
    tree_limit: usize,
}

#[derive(Args)]
struct Tree4Args {
    #[command(flatten)]
    g: GraphArg,
    /// Root vertex; defaults to a maximum-degree vertex.
    #[arg(long)]
    root: Option<Vertex>,
}

#[derive(Args)]
struct HampathArgs {
    #[command(flatten)]
    g: GraphArg,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct CheckScArgs {
    /// Graph whose triangle complex is checked.
    #[arg(long, required_unless_present = "complex", conflicts_with = "complex")]
    graph: Option<PathBuf>,
    /// Complex JSON with vertices, edges and triangles.
    #[arg(long)]
    complex: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramKind {
    /// Every witness glued onto every boundary copy of its edge.
    Algorithmic,
    /// Each witness glued once onto a marked edge.
    Activation,
    /// Algorithmic diagram closed into a disc; needs a tree starter.
    Filling,
}

#[derive(Args)]
struct CycleArgs {
    /// Activation process JSON.
    #[arg(long)]
    process: PathBuf,
    /// Cycle vertices in order, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    cycle: Vec<Vertex>,
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    c: CycleArgs,
    #[arg(long, value_enum, default_value = "activation")]
    kind: DiagramKind,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, default_value_t = 3)]
    ell: usize,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    w: usize,
    /// Label set size; defaults to v.
    #[arg(long)]
    labels: Option<usize>,
    /// Print the full census record instead of the count.
    #[arg(long)]
    detail: bool,
}

#[derive(Args)]
struct WsatArgs {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    complete: Option<usize>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
    budget: usize,
    /// Print the witness starter as well as the value.
    #[arg(long)]
    detail: bool,
}

#[derive(Args)]
struct LmSampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct LmStarArgs {
    /// LM complex JSON; otherwise one is sampled.
    #[arg(long, conflicts_with_all = ["n", "p", "c", "seed"])]
    complex: Option<PathBuf>,
    #[arg(long, required_unless_present = "complex")]
    n: Option<usize>,
    #[arg(long, conflicts_with = "c")]
    p: Option<f64>,
    /// Sets p = c n^(-1/2).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, required_unless_present = "complex")]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    center: Vertex,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON or TOML sweep configuration.
    #[arg(long, conflicts_with_all = ["model", "n_list", "c_list", "trials"])]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model, required_unless_present = "config")]
    model: Option<Model>,
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    c_list: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Master seed; overrides the configuration file.
    #[arg(long, required_unless_present = "config")]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for sweep.csv and summary.json; otherwise CSV goes to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
    /// Record per-trial runtime in the diagnostics column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    seed: u64,
    /// Smaller case counts.
    #[arg(long)]
    quick: bool,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Fail {
    Usage(String),
    Answer,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Feasibility(m) => {
                eprintln!("triboot: instance too large: {m}");
                Fail::Answer
            }
            other => Fail::Usage(other.to_string()),
        }
    }
}

type Run = Result<bool, Fail>;

struct Out {
    human: bool,
}

impl Out {
    fn emit<T: Serialize>(&self, v: &T, human: impl FnOnce() -> String) -> Result<(), Fail> {
        if self.human {
            println!("{}", human());
        } else {
            println!("{}", serde_json::to_string(v).map_err(|e| Fail::Usage(e.to_string()))?);
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Fail> {
    Ok(Graph::parse_any(&read(path)?)?)
}

fn load_process(path: &Path) -> Result<ActivationProcess, Fail> {
    let j: ProcessJson = serde_json::from_str(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    Ok(ActivationProcess::from_json(&j)?)
}

fn answer_ok(a: Answer) -> bool {
    a == Answer::Yes
}

fn gen(a: GenArgs, out: &Out) -> Run {
    let g = match a.model {
        GenModel::Gnp => {
            let seed = a.seed.ok_or_else(|| Fail::Usage("gnp needs --seed".into()))?;
            let p = match (a.p, a.c) {
                (Some(p), _) => p,
                (None, Some(c)) => Model::GnpTree4.p(a.n, c),
                (None, None) => return Err(Fail::Usage("gnp needs --p or --c".into())),
            };
            gnp(a.n, p, Seed::new(seed, 0))?
        }
        GenModel::Complete => Graph::complete(a.n),
        GenModel::Cycle => Graph::cycle(a.n),
        GenModel::Path => Graph::path(a.n),
        GenModel::Star => Graph::star(a.n, 0),
    };
    match a.format {
        Format::Edges => print!("{}", g.to_edge_list()),
        Format::Json => out.emit(&g.to_json(), || format!("n={} m={}", g.n(), g.m()))?,
    }
    Ok(true)
}

fn closure(a: ClosureArgs, out: &Out) -> Run {
    let (h, g) = (load_graph(&a.starter)?, load_graph(&a.ambient)?);
    let r = match a.seed {
        Some(s) => k3_closure_shuffled(&h, &g, Seed::new(s, 0))?,
        None => k3_closure(&h, &g)?,
    };
    let v = json!({
        "closure": r.closure.to_json(),
        "fully_activated": r.fully_activated,
        "steps": r.process.to_json().steps,
    });
    out.emit(&v, || format!("closure has {} of {} edges after {} steps; fully activated: {}", r.closure.m(), g.m(), r.process.steps.len(), r.fully_activated))?;
    Ok(true)
}

fn find_tree(a: FindTreeArgs, out: &Out) -> Run {
    let g = load_graph(&a.g.graph)?;
    let r = exists_activating_spanning_tree(&g, a.tree_limit)?;
    let v = json!({ "answer": r.answer, "witness": r.witness, "trees_tested": r.trees_tested });
    out.emit(&v, || format!("{:?} after {} trees", r.answer, r.trees_tested))?;
    Ok(answer_ok(r.answer))
}

fn build_tree4(a: Tree4Args, out: &Out) -> Run {
    let g = load_graph(&a.g.graph)?;
    let rule = a.root.map_or(RootRule::MaxDegree, RootRule::Fixed);
    let r = build_diameter4_tree(&g, rule)?;
    out.emit(&r.to_json(), || format!("root {}, diameter {}, {} attach failures, activated: {}", r.root, r.diameter, r.attach_failures.len(), r.activated))?;
    Ok(r.activated)
}

fn build_hampath(a: HampathArgs, out: &Out) -> Run {
    let g = load_graph(&a.g.graph)?;
    let r = build_hamilton_path_activator(&g, Seed::new(a.seed, 0), a.budget)?;
    out.emit(&r, || match &r.path {
        Some(p) => format!("path of {} vertices from base {}; activated: {}", p.len(), r.base, r.activated),
        None => format!("no Hamilton path found (budget exhausted: {})", r.exhausted.is_some()),
    })?;
    Ok(r.activated)
}

fn check_sc(a: CheckScArgs, out: &Out) -> Run {
    let x: TwoComplex = match (&a.graph, &a.complex) {
        (Some(g), _) => clique_complex_2(&load_graph(g)?),
        (None, Some(c)) => serde_json::from_str(&read(c)?).map_err(|e| Fail::Usage(format!("{}: {e}", c.display())))?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let betti1 = h1_z2(&x).betti1;
    let verdict = match simply_connected(&x, a.budget) {
        Err(Error::Disconnected) => {
            out.emit(&json!({ "verdict": "disconnected", "betti1": betti1 }), || "complex is disconnected".into())?;
            return Ok(false);
        }
        r => r?,
    };
    let mut v = json!({ "verdict": verdict.name(), "betti1": betti1 });
    match &verdict {
        ScVerdict::SimplyConnected(certs) => {
            v["certificates"] = certs.iter().map(|c| json!({ "cycle": c.boundary_cycle, "disc": c.disc.to_json() })).collect();
        }
        ScVerdict::NotSimplyConnected(c) => v["cycle"] = json!(c),
        ScVerdict::Undetermined { cycle, budget } => {
            v["cycle"] = json!(cycle);
            v["budget"] = json!(budget);
        }
    }
    out.emit(&v, || format!("{} (betti1 = {betti1})", verdict.name()))?;
    Ok(matches!(verdict, ScVerdict::SimplyConnected(_)))
}

fn diagram(a: DiagramArgs, out: &Out) -> Run {
    let p = load_process(&a.c.process)?;
    let c = &a.c.cycle;
    let d = match a.kind {
        DiagramKind::Algorithmic => algorithmic_vk_diagram(&p, c)?,
        DiagramKind::Activation => activation_diagram(&p, c)?,
        DiagramKind::Filling => tree_filling(&p, c)?.disc,
    };
    out.emit(&d.to_json(), || format!("{} triangles, internal boundary length {}", d.triangle_faces().len(), d.internal_labels().len()))?;
    Ok(true)
}

fn reduce_nice(a: CycleArgs, out: &Out) -> Run {
    let p = load_process(&a.process)?;
    let cert = tree_filling(&p, &a.cycle)?;
    let r = reduce_to_nice(&p, &a.cycle, &cert)?;
    let l = ledger(&r.process)?;
    let v = json!({
        "process": r.process.to_json(),
        "trace": r.trace,
        "ledger": l,
        "certificate": r.certificate.disc.to_json(),
    });
    out.emit(&v, || format!("{} reduction steps; nice process has {} starter edges, {} steps, excess {}", r.trace.len(), r.process.starter.m(), r.process.steps.len(), l.total_excess))?;
    Ok(true)
}

fn census(a: CensusArgs, out: &Out) -> Run {
    let n = a.labels.unwrap_or(a.v);
    let c = census_pvw(a.ell, a.v, a.w, n, CensusGuard::default())?;
    let human = || format!("{} diagrams (bound {}, within: {})", c.count, c.bound, c.within_bound);
    if a.detail {
        out.emit(&c, human)?;
    } else {
        out.emit(&c.count, human)?;
    }
    Ok(true)
}

fn wsat(a: WsatArgs, out: &Out) -> Run {
    let g = match (a.complete, &a.graph) {
        (Some(n), _) => Graph::complete(n),
        (None, Some(p)) => load_graph(p)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let r = wsat_exact_k3(&g, a.budget)?;
    if a.detail {
        let v = json!({ "value": r.value, "witness": r.witness.to_json(), "disconnected": r.disconnected });
        out.emit(&v, || format!("wsat = {}", r.value))?;
    } else {
        out.emit(&r.value, || r.value.to_string())?;
    }
    Ok(true)
}

fn lm_sample(a: LmSampleArgs, out: &Out) -> Run {
    let x = sample_lm(a.n, a.p, Seed::new(a.seed, 0))?;
    let j = x.to_json();
    out.emit(&j, || format!("{} triangles on {} vertices", j.triangles.len(), j.n))?;
    Ok(true)
}

fn lm_star(a: LmStarArgs, out: &Out) -> Run {
    let x = match &a.complex {
        Some(path) => LmComplex::from_json_str(&read(path)?)?,
        None => {
            let (n, seed) = (a.n.expect("required by clap"), a.seed.expect("required by clap"));
            let p = match (a.p, a.c) {
                (Some(p), _) => p,
                (None, Some(c)) => Model::LmStar.p(n, c),
                (None, None) => return Err(Fail::Usage("lm-star needs --p, --c or --complex".into())),
            };
            sample_lm(n, p, Seed::new(seed, 0))?
        }
    };
    let ok = star_activates(&x, a.center)?;
    out.emit(&json!({ "n": x.n(), "center": a.center, "activated": ok }), || format!("star at {} activates K_{}: {ok}", a.center, x.n()))?;
    Ok(ok)
}

fn sweep(a: SweepArgs, out: &Out) -> Run {
    let mut cfg = match &a.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::new(a.model.expect("required by clap"), a.n_list.clone(), a.c_list.clone(), a.trials, a.seed.expect("required by clap")),
    };
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    cfg.apply_env()?;
    if a.jobs.is_some() {
        cfg.jobs = a.jobs;
    }
    if a.out_dir.is_some() {
        cfg.out_dir = a.out_dir.clone();
    }
    cfg.timestamp &= !a.no_timestamp;
    cfg.timing |= a.timing;
    if cfg.out_dir.is_some() {
        let r = run_sweep(&cfg)?;
        out.emit(&r, || {
            let fits: Vec<String> = r.fits.iter().map(|f| format!("n={}: c_hat={}", f.n, f.c_hat.map_or("none".into(), |c| format!("{c:.3}")))).collect();
            format!("{}; exponent {}", fits.join(", "), r.exponent.map_or("none".into(), |e| format!("{e:.3}")))
        })?;
    } else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        run_sweep_to(&cfg, Some(&mut lock))?;
        lock.flush().map_err(|e| Fail::Usage(e.to_string()))?;
    }
    Ok(true)
}

fn verify(a: VerifyArgs, out: &Out) -> Run {
    let size = if a.quick { SuiteSize::QUICK } else { SuiteSize::FULL };
    let r = property_suite(size, a.seed)?;
    let all = r.iter().all(|p| p.passed());
    out.emit(&json!({ "passed": all, "properties": r }), || {
        r.iter().map(|p| format!("{} {} ({} cases)", if p.passed() { "PASS" } else { "FAIL" }, p.property, p.cases)).collect::<Vec<_>>().join("\n")
    })?;
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { human: cli.human };
    let r = match cli.cmd {
        Cmd::Gen(a) => gen(a, &out),
        Cmd::Closure(a) => closure(a, &out),
        Cmd::FindTree(a) => find_tree(a, &out),
        Cmd::BuildTree4(a) => build_tree4(a, &out),
        Cmd::BuildHampath(a) => build_hampath(a, &out),
        Cmd::CheckSc(a) => check_sc(a, &out),
        Cmd::Diagram(a) => diagram(a, &out),
        Cmd::ReduceNice(a) => reduce_nice(a, &out),
        Cmd::Census(a) => census(a, &out),
        Cmd::Wsat(a) => wsat(a, &out),
        Cmd::LmSample(a) => lm_sample(a, &out),
        Cmd::LmStar(a) => lm_star(a, &out),
        Cmd::Sweep(a) => sweep(a, &out),
        Cmd::Verify(a) => verify(a, &out),
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) | Err(Fail::Answer) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("triboot: {m}");
            ExitCode::from(2)
        }
    }
}
