use triboot::experiments::{law_tree_implies_sc, run_sweep, run_sweep_to, Model, Outcome, SweepConfig};

#[test]
fn tree4_well_above_threshold() {
    let cfg = SweepConfig::new(Model::GnpTree4, vec![3000], vec![1.3], 20, 21);
    let (res, recs) = run_sweep_to(&cfg, None).unwrap();
    assert!(res.cells[0].fraction >= 0.9, "{:?}", res.cells[0]);
    assert!(recs.iter().all(|r| r.outcome != Outcome::Unknown));
}

#[test]
fn sc_sweep_is_monotone_under_coupling() {
    let mut cfg = SweepConfig::new(Model::GnpSc, vec![40], vec![0.5, 1.0, 1.5, 2.0, 3.0], 10, 4);
    cfg.timestamp = false;
    let (res, recs) = run_sweep_to(&cfg, None).unwrap();
    assert!(res.all_monotone());
    // Trial by trial, a success at one c stays a success at every larger c.
    for t in 0..10 {
        let row: Vec<Outcome> = recs.iter().filter(|r| r.trial == t).map(|r| r.outcome).collect();
        if let Some(i) = row.iter().position(|&o| o == Outcome::Success) {
            assert!(row[i..].iter().all(|&o| o != Outcome::Failure), "trial {t}: {row:?}");
        }
    }
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::new(Model::LmStar, vec![40, 80], vec![0.3, 2.0], 4, 8);
    cfg.out_dir = Some(dir.path().to_path_buf());
    cfg.timestamp = false;
    let res = run_sweep(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 4);
    let again = tempfile::tempdir().unwrap();
    cfg.out_dir = Some(again.path().to_path_buf());
    cfg.jobs = Some(2);
    run_sweep(&cfg).unwrap();
    assert_eq!(csv, std::fs::read_to_string(again.path().join("sweep.csv")).unwrap());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["cells"].as_array().unwrap().len(), res.cells.len());
}

#[test]
fn law_examples_from_small_graphs() {
    let r = law_tree_implies_sc(10, 1.0, 1, 0, 10).unwrap();
    assert_eq!((r.tree_found, r.violations.len()), (1, 0));
    let sparse = law_tree_implies_sc(15, 0.1, 10, 3, 50).unwrap();
    assert_eq!(sparse.tree_found, 0);
}
