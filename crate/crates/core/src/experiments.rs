//! Seeded Monte Carlo sweeps over (n, c) grids, threshold fits, and the
//! tree-implies-simply-connected law.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{exists_activating_spanning_tree, fully_activates, k3_closure, Answer, TreeSearch};
use crate::diagram::tree_filling;
use crate::error::{Error, Result};
use crate::graph::{bfs, gnp, Edge, Graph, Vertex};
use crate::lm::{sample_lm, star_activates};
use crate::process::csv_err;
use crate::seed::Seed;
use crate::topology::{clique_complex_2, fundamental_cycles, h1_z2, simply_connected, ScVerdict};
use crate::tree_builder::{build_diameter4_tree, build_hamilton_path_activator, RootRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "gnp-tree4")]
    GnpTree4,
    #[serde(rename = "gnp-hampath")]
    GnpHampath,
    #[serde(rename = "gnp-sc")]
    GnpSc,
    #[serde(rename = "lm-star")]
    LmStar,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::GnpTree4 => "gnp-tree4",
            Model::GnpHampath => "gnp-hampath",
            Model::GnpSc => "gnp-sc",
            Model::LmStar => "lm-star",
        }
    }

    /// p = c n^(-1/3) for graph models, c n^(-1/2) for the LM star.
    pub fn p(self, n: usize, c: f64) -> f64 {
        let e = if self == Model::LmStar { -0.5 } else { -1.0 / 3.0 };
        (c * (n as f64).powf(e)).min(1.0)
    }

    pub fn exponent(self) -> f64 {
        if self == Model::LmStar {
            -0.5
        } else {
            -1.0 / 3.0
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Model::GnpTree4, Model::GnpHampath, Model::GnpSc, Model::LmStar]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Backtracking nodes per Hamilton search stage.
    pub node_budget: usize,
    /// Walk states per cycle in the contractibility search.
    pub contractibility: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { node_budget: crate::tree_builder::DEFAULT_NODE_BUDGET, contractibility: crate::topology::DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: Model,
    pub n_list: Vec<usize>,
    pub c_list: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    /// Worker threads; never affects output.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Write a `# generated` line at the top of the CSV.
    #[serde(default = "yes")]
    pub timestamp: bool,
    /// Record wall-clock runtime per trial, which makes output
    /// non-reproducible.
    #[serde(default)]
    pub timing: bool,
}

fn yes() -> bool {
    true
}

pub const ENV_JOBS: &str = "TRIBOOT_JOBS";
pub const ENV_OUT_DIR: &str = "TRIBOOT_OUT_DIR";

impl SweepConfig {
    pub fn new(model: Model, n_list: Vec<usize>, c_list: Vec<f64>, trials: usize, master_seed: u64) -> Self {
        SweepConfig { model, n_list, c_list, trials, master_seed, budgets: Budgets::default(), jobs: None, out_dir: None, timestamp: true, timing: false }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads JSON or TOML, chosen by extension and falling back to content.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_json_str(&text).or_else(|_| Self::from_toml_str(&text)),
        }
    }

    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(j) = std::env::var(ENV_JOBS) {
            self.jobs = Some(j.parse().map_err(|_| Error::Parameter(format!("{ENV_JOBS}={j:?} is not a count")))?);
        }
        if let Ok(d) = std::env::var(ENV_OUT_DIR) {
            self.out_dir = Some(PathBuf::from(d));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(m.into()));
        if self.n_list.is_empty() || self.c_list.is_empty() || self.trials == 0 {
            return bad("sweep needs n values, c values and trials");
        }
        if self.c_list.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return bad("c values must be finite and nonnegative");
        }
        let min_n = if self.model == Model::LmStar { 1 } else { 4 };
        if self.n_list.iter().any(|&n| n < min_n) {
            return bad("n too small for this model");
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive");
        }
        Ok(())
    }

    /// c is left out so that every c in the grid sees the same per-pair
    /// uniforms, which couples the cells monotonically.
    pub fn trial_seed(&self, n: usize, trial: usize) -> Seed {
        Seed::derive(self.master_seed, &[self.model.name().as_bytes(), &(n as u64).to_le_bytes(), &(trial as u64).to_le_bytes()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failure,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_diameter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub trial: usize,
    pub seed: String,
    pub outcome: Outcome,
    pub diag: Diagnostics,
}

/// One trial; trial-level errors become failures with a note.
pub fn run_trial(cfg: &SweepConfig, n: usize, c: f64, trial: usize) -> TrialRecord {
    let seed = cfg.trial_seed(n, trial);
    let p = cfg.model.p(n, c);
    let start = Instant::now();
    let (outcome, mut diag) = match trial_body(cfg, n, p, seed) {
        Ok(x) => x,
        Err(e) => (Outcome::Failure, Diagnostics { note: Some(e.to_string()), ..Default::default() }),
    };
    if cfg.timing {
        diag.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    TrialRecord { model: cfg.model, n, p, c, trial, seed: format!("{}:{}", seed.master, seed.stream), outcome, diag }
}

fn trial_body(cfg: &SweepConfig, n: usize, p: f64, seed: Seed) -> Result<(Outcome, Diagnostics)> {
    let won = |b: bool| if b { Outcome::Success } else { Outcome::Failure };
    match cfg.model {
        Model::GnpTree4 => {
            let g = gnp(n, p, seed)?;
            let r = build_diameter4_tree(&g, RootRule::MaxDegree)?;
            let diag = Diagnostics { edge_count: g.m(), tree_diameter: r.spanning().then_some(r.diameter), ..Default::default() };
            Ok((won(r.activated), diag))
        }
        Model::GnpHampath => {
            let g = gnp(n, p, seed)?;
            let sub = Seed::derive(seed.master, &[b"hampath", &seed.stream.to_le_bytes()]);
            let r = build_hamilton_path_activator(&g, sub, cfg.budgets.node_budget)?;
            let mut diag = Diagnostics { edge_count: g.m(), ..Default::default() };
            if let Some(stage) = r.exhausted {
                diag.note = Some(format!("budget exhausted in {stage:?}"));
                return Ok((Outcome::Unknown, diag));
            }
            if r.path.is_some() {
                diag.tree_diameter = Some(n - 1);
            }
            Ok((won(r.activated), diag))
        }
        Model::GnpSc => {
            let g = gnp(n, p, seed)?;
            let x = clique_complex_2(&g);
            let mut diag = Diagnostics { edge_count: g.m(), h1_rank: Some(h1_z2(&x).betti1), ..Default::default() };
            match simply_connected(&x, cfg.budgets.contractibility) {
                Ok(ScVerdict::SimplyConnected(_)) => Ok((Outcome::Success, diag)),
                Ok(ScVerdict::NotSimplyConnected(_)) => Ok((Outcome::Failure, diag)),
                Ok(ScVerdict::Undetermined { .. }) => Ok((Outcome::Unknown, diag)),
                Err(Error::Disconnected) => {
                    diag.note = Some("disconnected".into());
                    Ok((Outcome::Failure, diag))
                }
                Err(e) => Err(e),
            }
        }
        Model::LmStar => {
            let x = sample_lm(n, p, seed)?;
            let diag = Diagnostics { edge_count: n * n.saturating_sub(1) / 2, ..Default::default() };
            Ok((won(star_activates(&x, 0)?), diag))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval at 95%.
pub fn wilson(successes: usize, total: usize) -> Interval {
    if total == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let z = 1.959_963_984_540_054_f64;
    let nn = total as f64;
    let ph = successes as f64 / nn;
    let denom = 1.0 + z * z / nn;
    let centre = (ph + z * z / (2.0 * nn)) / denom;
    let half = z * (ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == total { 1.0 } else { (centre + half).min(1.0) };
    Interval { lo, hi }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub successes: usize,
    pub failures: usize,
    pub unknown: usize,
    /// Successes over decided trials; unknown trials are excluded.
    pub fraction: f64,
    pub wilson: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Logistic,
    Interpolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub n: usize,
    pub c_hat: Option<f64>,
    pub method: Option<FitMethod>,
    pub p_half: Option<f64>,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: Model,
    pub cells: Vec<CellStats>,
    pub fits: Vec<ThresholdFit>,
    /// Least-squares slope of ln p_half against ln n.
    pub exponent: Option<f64>,
}

impl SweepResult {
    pub fn all_monotone(&self) -> bool {
        self.fits.iter().all(|f| f.monotone)
    }
}

/// Maximum-likelihood logistic fit of success on c by Newton's method.
/// Returns (a, b) with logit = a + b c, or `None` when the data separate.
pub fn logistic_fit(points: &[(f64, usize, usize)]) -> Option<(f64, f64)> {
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, k, m) in points {
            let mu = 1.0 / (1.0 + (-(a + b * x)).exp());
            let r = k as f64 - m as f64 * mu;
            let w = m as f64 * mu * (1.0 - mu);
            ga += r;
            gb += r * x;
            haa += w;
            hab += w * x;
            hbb += w * x * x;
        }
        let det = haa * hbb - hab * hab;
        if det.abs() < 1e-12 {
            return None;
        }
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        a += da;
        b += db;
        if !a.is_finite() || !b.is_finite() || b.abs() > 1e4 {
            return None;
        }
        if da.abs() + db.abs() < 1e-10 {
            return (b > 0.0).then_some((a, b));
        }
    }
    None
}

/// First crossing of 1/2 by linear interpolation between grid points.
fn interpolate_half(cells: &[&CellStats]) -> Option<f64> {
    if let Some(c) = cells.iter().find(|c| c.fraction == 0.5) {
        return Some(c.c);
    }
    cells.windows(2).find(|w| (w[0].fraction - 0.5) * (w[1].fraction - 0.5) < 0.0).map(|w| {
        let t = (0.5 - w[0].fraction) / (w[1].fraction - w[0].fraction);
        w[0].c + t * (w[1].c - w[0].c)
    })
}

fn fit_threshold(model: Model, n: usize, cells: &[&CellStats]) -> ThresholdFit {
    let decided: Vec<&&CellStats> = cells.iter().filter(|c| c.successes + c.failures > 0).collect();
    let monotone = decided.windows(2).all(|w| w[1].fraction >= w[0].fraction);
    let pts: Vec<(f64, usize, usize)> = decided.iter().map(|c| (c.c, c.successes, c.successes + c.failures)).collect();
    let lo = cells.first().map_or(0.0, |c| c.c);
    let hi = cells.last().map_or(0.0, |c| c.c);
    let logistic = logistic_fit(&pts).map(|(a, b)| -a / b).filter(|&c| c >= lo && c <= hi);
    let (c_hat, method) = match logistic {
        Some(c) => (Some(c), Some(FitMethod::Logistic)),
        None => match interpolate_half(cells) {
            Some(c) => (Some(c), Some(FitMethod::Interpolation)),
            None => (None, None),
        },
    };
    ThresholdFit { n, c_hat, method, p_half: c_hat.map(|c| model.p(n, c)), monotone }
}

/// Least-squares slope of y on x.
pub fn slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn summarize(model: Model, records: &[TrialRecord]) -> SweepResult {
    let mut keys: Vec<(usize, f64)> = records.iter().map(|r| (r.n, r.c)).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    let cells: Vec<CellStats> = keys
        .iter()
        .map(|&(n, c)| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n && r.c == c).collect();
            let count = |o: Outcome| rs.iter().filter(|r| r.outcome == o).count();
            let (s, f, u) = (count(Outcome::Success), count(Outcome::Failure), count(Outcome::Unknown));
            let fraction = if s + f == 0 { 0.0 } else { s as f64 / (s + f) as f64 };
            CellStats { n, c, p: model.p(n, c), successes: s, failures: f, unknown: u, fraction, wilson: wilson(s, s + f) }
        })
        .collect();
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.dedup();
    let fits: Vec<ThresholdFit> = ns
        .iter()
        .map(|&n| {
            let row: Vec<&CellStats> = cells.iter().filter(|c| c.n == n).collect();
            fit_threshold(model, n, &row)
        })
        .collect();
    let pts: Vec<(f64, f64)> = fits.iter().filter_map(|f| f.p_half.map(|p| ((f.n as f64).ln(), p.ln()))).collect();
    SweepResult { model, cells, fits, exponent: slope(&pts) }
}

pub const CSV_HEADER: [&str; 8] = ["model", "n", "p", "c", "trial", "seed", "outcome", "diag_json"];

fn write_rows(w: &mut csv::Writer<&mut dyn Write>, rows: &[TrialRecord]) -> Result<()> {
    for r in rows {
        let outcome = serde_json::to_value(r.outcome)?;
        w.write_record([
            r.model.name().to_string(),
            r.n.to_string(),
            format!("{}", r.p),
            format!("{}", r.c),
            r.trial.to_string(),
            r.seed.clone(),
            outcome.as_str().unwrap_or_default().to_string(),
            serde_json::to_string(&r.diag)?,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every cell, streaming CSV rows to `csv_out` cell by cell in
/// (n, c, trial) order.
pub fn run_sweep_to(cfg: &SweepConfig, csv_out: Option<&mut dyn Write>) -> Result<(SweepResult, Vec<TrialRecord>)> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.unwrap_or(0)).build().map_err(|e| Error::Parameter(e.to_string()))?;
    let mut sink = csv_out;
    if let (Some(w), true) = (sink.as_mut(), cfg.timestamp) {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        writeln!(w, "# generated unix={secs}")?;
    }
    let mut writer = sink.map(|w| csv::WriterBuilder::new().from_writer(w));
    if let Some(w) = writer.as_mut() {
        w.write_record(CSV_HEADER).map_err(csv_err)?;
    }
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut cs = cfg.c_list.clone();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let mut all = Vec::new();
    for &n in &ns {
        for &c in &cs {
            let mut rows: Vec<TrialRecord> = pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, n, c, t)).collect());
            rows.sort_by_key(|r| r.trial);
            if let Some(w) = writer.as_mut() {
                write_rows(w, &rows)?;
            }
            all.extend(rows);
        }
    }
    Ok((summarize(cfg.model, &all), all))
}

/// Runs the sweep, writing `sweep.csv` and `summary.json` under the
/// configured output directory when there is one.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("sweep.csv"))?);
            let (res, _) = run_sweep_to(cfg, Some(&mut f))?;
            f.flush()?;
            std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&res)?)?;
            Ok(res)
        }
        None => Ok(run_sweep_to(cfg, None)?.0),
    }
}

fn bfs_tree(g: &Graph, root: Vertex) -> Option<Graph> {
    let d = bfs(g, root);
    if d.contains(&usize::MAX) {
        return None;
    }
    let edges = (0..g.n() as Vertex).filter(|&v| v != root).map(|v| {
        let parent = g.neighbors(v).iter().copied().find(|&u| d[u as usize] + 1 == d[v as usize]).expect("BFS parent");
        Edge::new(v, parent)
    });
    Graph::from_edges(g.n(), edges).ok()
}

/// Tree search that tries the diameter-4 and BFS trees from every root
/// before enumerating spanning trees. Same three-valued contract as the
/// plain enumeration.
pub fn search_activating_tree(g: &Graph, tree_limit: usize) -> Result<TreeSearch> {
    if !g.is_connected() || g.n() < 3 {
        return exists_activating_spanning_tree(g, tree_limit);
    }
    let mut tested = 0;
    for root in 0..g.n() as Vertex {
        let t4 = build_diameter4_tree(g, RootRule::Fixed(root))?;
        tested += 1;
        if t4.activated {
            return Ok(TreeSearch { answer: Answer::Yes, witness: Some(t4.tree.edge_vec()), trees_tested: tested });
        }
        if let Some(t) = bfs_tree(g, root) {
            tested += 1;
            if fully_activates(&t, g)? {
                return Ok(TreeSearch { answer: Answer::Yes, witness: Some(t.edge_vec()), trees_tested: tested });
            }
        }
    }
    let mut r = exists_activating_spanning_tree(g, tree_limit)?;
    r.trees_tested += tested;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawViolation {
    pub trial: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub n: usize,
    pub trials: usize,
    pub tree_found: usize,
    pub no_tree: usize,
    pub unknown: usize,
    /// Basis cycles certified by tree fillings across all successful trials.
    pub certified_cycles: usize,
    pub violations: Vec<LawViolation>,
}

pub const DEFAULT_TREE_LIMIT: usize = 20_000;

/// For each sample with an activating spanning tree, checks that the clique
/// complex has trivial H1 and that every fundamental cycle carries a
/// validated tree filling.
pub fn law_tree_implies_sc(n: usize, p: f64, trials: usize, master: u64, tree_limit: usize) -> Result<LawReport> {
    if n > 60 {
        return Err(Error::Feasibility("tree search needs n <= 60".into()));
    }
    let per: Vec<Result<(Answer, usize, Option<String>)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = gnp(n, p, Seed::new(master, t as u64))?;
            let ts = search_activating_tree(&g, tree_limit)?;
            let Some(w) = ts.witness.filter(|_| ts.answer == Answer::Yes) else { return Ok((ts.answer, 0, None)) };
            let tree = Graph::from_edges(n, w)?;
            let x = clique_complex_2(&g);
            let h = h1_z2(&x);
            if h.betti1 != 0 {
                return Ok((Answer::Yes, 0, Some(format!("H1 has rank {}", h.betti1))));
            }
            let proc = k3_closure(&tree, &g)?.process;
            let mut certified = 0;
            for c in fundamental_cycles(&x) {
                match tree_filling(&proc, &c).and_then(|cert| cert.validate(&x).map(|_| cert)) {
                    Ok(_) => certified += 1,
                    Err(e) => return Ok((Answer::Yes, certified, Some(format!("cycle {c:?}: {e}")))),
                }
            }
            Ok((Answer::Yes, certified, None))
        })
        .collect();
    let mut rep = LawReport { n, trials, tree_found: 0, no_tree: 0, unknown: 0, certified_cycles: 0, violations: Vec::new() };
    for (t, r) in per.into_iter().enumerate() {
        let (answer, certified, violation) = r?;
        match answer {
            Answer::Yes => rep.tree_found += 1,
            Answer::No => rep.no_tree += 1,
            Answer::Unknown => rep.unknown += 1,
        }
        rep.certified_cycles += certified;
        if let Some(reason) = violation {
            rep.violations.push(LawViolation { trial: t, reason });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 0/20 and 20/20 have closed forms; 10/20 is symmetric.
        let z2 = 1.959_963_984_540_054_f64.powi(2);
        let w0 = wilson(0, 20);
        assert_eq!(w0.lo, 0.0);
        assert!((w0.hi - z2 / (20.0 + z2)).abs() < 1e-12);
        let w = wilson(10, 20);
        assert!((w.lo + w.hi - 1.0).abs() < 1e-12);
        assert!((w.lo - 0.299_298_5).abs() < 1e-6);
        assert_eq!(wilson(0, 0), Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn logistic_recovers_the_midpoint() {
        let pts: Vec<(f64, usize, usize)> = (0..11)
            .map(|i| {
                let x = 0.6 + 0.1 * i as f64;
                let mu = 1.0 / (1.0 + (-(10.0 * (x - 1.1))).exp());
                (x, (mu * 1000.0).round() as usize, 1000)
            })
            .collect();
        let (a, b) = logistic_fit(&pts).unwrap();
        assert!((-a / b - 1.1).abs() < 1e-3);
        assert!((b - 10.0).abs() < 0.1);
        let separated = [(0.5, 0, 10), (1.0, 10, 10)];
        assert!(logistic_fit(&separated).is_none());
    }

    #[test]
    fn separated_cells_fall_back_to_interpolation() {
        let recs: Vec<TrialRecord> = [(0.8, 0usize), (1.0, 10), (1.2, 10)]
            .into_iter()
            .flat_map(|(c, s)| {
                (0..10).map(move |t| TrialRecord {
                    model: Model::GnpTree4,
                    n: 100,
                    p: 0.0,
                    c,
                    trial: t,
                    seed: String::new(),
                    outcome: if t < s { Outcome::Success } else { Outcome::Failure },
                    diag: Diagnostics::default(),
                })
            })
            .collect();
        let r = summarize(Model::GnpTree4, &recs);
        assert_eq!(r.fits[0].method, Some(FitMethod::Interpolation));
        assert!((r.fits[0].c_hat.unwrap() - 0.9).abs() < 1e-12);
        assert!(r.all_monotone());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [100.0f64, 1000.0, 10000.0].iter().map(|&n| (n.ln(), (2.0 * n.powf(-0.4)).ln())).collect();
        assert!((slope(&pts).unwrap() + 0.4).abs() < 1e-12);
        assert!(slope(&pts[..1]).is_none());
    }

    #[test]
    fn config_formats_and_env() {
        let j = r#"{"model":"lm-star","n_list":[50],"c_list":[0.5,1.0],"trials":3,"master_seed":9}"#;
        let a = SweepConfig::from_json_str(j).unwrap();
        let t = "model = \"lm-star\"\nn_list = [50]\nc_list = [0.5, 1.0]\ntrials = 3\nmaster_seed = 9\n";
        let b = SweepConfig::from_toml_str(t).unwrap();
        assert_eq!(a, b);
        assert!(a.timestamp);
        assert_eq!(a.budgets, Budgets::default());
        assert!(SweepConfig::from_json_str(r#"{"model":"nope","n_list":[],"c_list":[],"trials":1,"master_seed":0}"#).is_err());
    }

    #[test]
    fn seeds_ignore_c_and_separate_trials() {
        let cfg = SweepConfig::new(Model::GnpTree4, vec![100], vec![1.0, 1.2], 4, 3);
        assert_ne!(cfg.trial_seed(100, 0), cfg.trial_seed(100, 1));
        assert_ne!(cfg.trial_seed(100, 0), cfg.trial_seed(200, 0));
        let other = SweepConfig::new(Model::GnpSc, vec![100], vec![1.0], 4, 3);
        assert_ne!(cfg.trial_seed(100, 0), other.trial_seed(100, 0));
    }

    #[test]
    fn sweep_is_reproducible_across_workers() {
        let mut cfg = SweepConfig::new(Model::GnpTree4, vec![60, 120], vec![0.8, 1.2, 1.6, 2.4], 6, 5);
        cfg.timestamp = false;
        let run = |jobs| {
            let mut c = cfg.clone();
            c.jobs = Some(jobs);
            let mut buf = Vec::new();
            let (res, _) = run_sweep_to(&c, Some(&mut buf)).unwrap();
            (buf, res)
        };
        let (a, ra) = run(1);
        let (b, rb) = run(3);
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("model,n,p,c,trial,seed,outcome,diag_json\ngnp-tree4,60,"));
        assert_eq!(text.lines().count(), 1 + 2 * 4 * 6);
        for cell in &ra.cells {
            assert!(cell.wilson.lo <= cell.fraction && cell.fraction <= cell.wilson.hi);
        }
    }

    #[test]
    fn timestamp_line_is_optional() {
        let cfg = SweepConfig::new(Model::LmStar, vec![20], vec![1.0], 2, 1);
        let mut buf = Vec::new();
        run_sweep_to(&cfg, Some(&mut buf)).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("# generated unix="));
    }

    #[test]
    fn other_models_run() {
        for m in [Model::GnpHampath, Model::GnpSc, Model::LmStar] {
            let cfg = SweepConfig::new(m, vec![16], vec![1.0, 3.0], 3, 2);
            let (res, recs) = run_sweep_to(&cfg, None).unwrap();
            assert_eq!(recs.len(), 6);
            assert_eq!(res.cells.len(), 2);
        }
    }

    #[test]
    fn law_examples() {
        let full = law_tree_implies_sc(10, 1.0, 2, 1, 100).unwrap();
        assert_eq!(full.tree_found, 2);
        assert!(full.violations.is_empty());
        let sparse = law_tree_implies_sc(15, 0.1, 5, 1, 100).unwrap();
        assert!(sparse.violations.is_empty());
        assert!(sparse.no_tree + sparse.unknown >= 4);
        let mid = law_tree_implies_sc(12, 0.5, 6, 2, 200).unwrap();
        assert!(mid.violations.is_empty());
        assert!(law_tree_implies_sc(61, 0.5, 1, 1, 1).is_err());
    }
}
