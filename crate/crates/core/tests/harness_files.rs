use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use quadtune_core::harness::io::{self, BandRow, BestRow, IterationRow, MetricsRow};
use quadtune_core::harness::{compare_fronts, run_campaign, Algorithm, ExperimentConfig};
use quadtune_core::Error;

fn small(algorithm: Algorithm, workers: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.algorithm = algorithm;
    cfg.experiment.trials = 2;
    cfg.experiment.workers = workers;
    cfg.set_population(8);
    cfg.set_iterations(3);
    cfg.simulation.t_final = 2.0;
    cfg
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn campaign_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_campaign(&small(Algorithm::Nsbbo, 1)).unwrap();
    let written = io::write_campaign(&report, dir.path()).unwrap();
    let names: Vec<String> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        [
            "campaign.csv",
            "best_nsbbo.csv",
            "front_nsbbo.csv",
            "traj_z.csv",
            "traj_theta.csv",
            "traj_phi.csv",
            "traj_thrust.csv"
        ]
    );

    let iters: Vec<IterationRow> = io::read_rows_file(&dir.path().join("campaign.csv")).unwrap();
    assert_eq!(iters, io::campaign_rows(&report));
    let best: Vec<BestRow> = io::read_rows_file(&dir.path().join("best_nsbbo.csv")).unwrap();
    assert_eq!(best, io::best_rows(&report));
    let thrust: Vec<BandRow> = io::read_rows_file(&dir.path().join("traj_thrust.csv")).unwrap();
    assert_eq!(thrust, io::band_rows(&report.trajectories.thrust, true));
    let z: Vec<BandRow> = io::read_rows_file(&dir.path().join("traj_z.csv")).unwrap();
    assert!(z.iter().all(|r| r.log10_mean.is_none()));

    let front = io::read_front_file(&dir.path().join("front_nsbbo.csv")).unwrap();
    let original = report.trials[0].front.as_ref().unwrap();
    assert_eq!(front.points(), original.points());
    for (a, b) in front.members.iter().zip(&original.members) {
        assert_eq!(a.genes, b.genes);
        assert_eq!(a.cost, b.cost);
    }
    assert_eq!(front.antichain_violations(), 0);
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    for alg in [Algorithm::Pso, Algorithm::Vepso] {
        let a = run_campaign(&small(alg, 1)).unwrap();
        let b = run_campaign(&small(alg, 4)).unwrap();
        assert!(a.same_results(&b), "{alg}");
        io::write_campaign(&a, one.path()).unwrap();
        io::write_campaign(&b, four.path()).unwrap();
    }
    assert_eq!(snapshot(one.path()), snapshot(four.path()));
}

#[test]
fn metrics_file_round_trips() {
    let fronts: Vec<(String, _)> = [Algorithm::Vebbo, Algorithm::Nsbbo]
        .into_iter()
        .map(|a| {
            let r = run_campaign(&small(a, 1)).unwrap();
            (a.to_string(), r.trials[0].front.clone().unwrap())
        })
        .collect();
    let cmp = compare_fronts(&fronts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metrics.csv");
    io::write_rows_file(&path, &io::metrics_rows(&cmp)).unwrap();
    let rows: Vec<MetricsRow> = io::read_rows_file(&path).unwrap();
    assert_eq!(rows, io::metrics_rows(&cmp));
    assert_eq!(rows.iter().filter(|r| r.record == "coverage").count(), 2);
    assert_eq!(rows.iter().filter(|r| r.record == "hypervolume").count(), 2);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("record,a,b,covered,total,hypervolume\n"));
}

#[test]
fn config_file_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[bbo]\npopulaton = 10\n").unwrap();
    match ExperimentConfig::load(&path) {
        Err(Error::Config(msg)) => assert!(
            msg.contains("bad.toml") && msg.contains("populaton"),
            "{msg}"
        ),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        ExperimentConfig::load(dir.path().join("missing.toml")),
        Err(Error::Config(_))
    ));
}

#[test]
fn saved_config_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    let cfg = small(Algorithm::Nspso, 2);
    fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
}
