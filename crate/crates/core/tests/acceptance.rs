//! Acceptance checks. Prints one line per criterion and exits non-zero
//! on any hard failure. Runs without the libtest harness so the lines
//! always reach the output.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use common::{brute_force_fronts, constant, drop_from, fall_with_drag, integrate, offset};
use nalgebra::Vector3;
use quadtune_core::bbo::run_bbo;
use quadtune_core::dynamics::step;
use quadtune_core::harness::{
    baseline_cost, io, run_campaign, run_campaign_observed, Algorithm, CampaignReport,
    ExperimentConfig, Summary,
};
use quadtune_core::pareto::non_dominated_sort;
use quadtune_core::pso::run_pso;
use quadtune_core::{
    aggregate, evaluate_objectives, normalized_hypervolume, relative_coverage, BboConfig,
    ControlInput, DroneParams, DroneState, EmigrationModel, Evaluator, ObjectiveVector,
    ParetoFront, PsoConfig, Reference, Sphere, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Ordering inverted, but not decisively.
    Warn,
    NotApplicable,
}

struct Verdict {
    status: Status,
    detail: String,
}

fn verdict(ok: bool, detail: String) -> Verdict {
    Verdict {
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn campaign(algorithm: Algorithm, trials: usize) -> CampaignReport {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.algorithm = algorithm;
    cfg.experiment.trials = trials;
    run_campaign(&cfg).unwrap()
}

fn baseline_is_beaten() -> Verdict {
    let baseline = baseline_cost(&ExperimentConfig::default()).unwrap();
    let mut parts = vec![format!("baseline={baseline:.4}")];
    let mut ok = true;
    for alg in [Algorithm::Bbo, Algorithm::Pso] {
        let started = Instant::now();
        let report = campaign(alg, 5);
        let mean = report.final_cost.mean;
        let gain = 1.0 - mean / baseline;
        ok &= gain >= 0.2;
        parts.push(format!(
            "{alg}_mean={mean:.4} ({:.1}% below, {:.1}s)",
            100.0 * gain,
            started.elapsed().as_secs_f64()
        ));
    }
    verdict(ok, parts.join(" "))
}

fn dynamics_oracles() -> Verdict {
    let none = ControlInput::default();
    let no_drag = DroneParams {
        ax: 0.0,
        ay: 0.0,
        az: 0.0,
        ..Default::default()
    };
    let s = integrate(drop_from(10.0), &none, &no_drag, 0.01, 100);
    let fall = (s.pos.z - (10.0 - 0.5 * no_drag.g))
        .abs()
        .max((s.vel.z + no_drag.g).abs());

    let p = DroneParams::default();
    let k = p.az / p.m;
    let mut s = drop_from(0.0);
    let mut drag_fall = 0.0f64;
    for n in 1..=100 {
        s = step(&s, &none, &p, 0.01).unwrap();
        let (z, v) = fall_with_drag(0.0, p.g, k, n as f64 * 0.01);
        drag_fall = drag_fall.max((s.pos.z - z).abs()).max((s.vel.z - v).abs());
    }

    let mut s = DroneState::at_rest(Vector3::new(0.3, -0.2, 2.0), Vector3::new(0.0, 0.0, 0.4));
    let hover = ControlInput::hover(&p);
    let mut drift = 0.0f64;
    for _ in 0..1000 {
        let next = step(&s, &hover, &p, 0.01).unwrap();
        drift = drift.max((next.to_vector() - s.to_vector()).amax());
        s = next;
    }

    let draggy = DroneParams {
        az: 2.0,
        ..Default::default()
    };
    let (exact, _) = fall_with_drag(0.0, draggy.g, draggy.az / draggy.m, 1.0);
    let err = |dt: f64| {
        let n = (1.0 / dt).round() as usize;
        (integrate(drop_from(0.0), &none, &draggy, dt, n).pos.z - exact).abs()
    };
    let ratio = err(0.1) / err(0.05);

    verdict(
        fall < 1e-6 && drag_fall < 1e-6 && drift < 1e-12 && ratio >= 8.0,
        format!(
            "free_fall_err={fall:.2e} drag_fall_err={drag_fall:.2e} hover_drift={drift:.2e} halving_ratio={ratio:.2}"
        ),
    )
}

fn objective_arithmetic() -> Verdict {
    let traj = constant(offset(-1.0, 0.5, -0.25, 2.0), 0.125, 8);
    let f = evaluate_objectives(&traj, &Reference::default());
    let cost = aggregate(&f, &Weights::uniform(4));
    let r = Reference {
        z: 1.5,
        phi: 0.1,
        theta: -0.2,
        psi: 0.3,
    };
    let zero = evaluate_objectives(&constant(r.equilibrium(), 0.01, 1001), &r);
    verdict(
        f.0 == [0.4375, 0.21875, 1.75, 0.875] && cost == 3.28125 && zero.0 == [0.0; 4],
        format!("constant_errors={:?} cost={cost} zero={:?}", f.0, zero.0),
    )
}

fn sorting_matches_brute_force() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=20);
        let coarse = rng.gen_bool(0.5);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..4)
                    .map(|_| {
                        if coarse {
                            rng.gen_range(0..4) as f64
                        } else {
                            rng.gen::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        if non_dominated_sort(&points) != brute_force_fronts(&points) {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("instances=1000 mismatches={mismatches}"),
    )
}

fn front(points: &[&[f64]]) -> ParetoFront {
    ParetoFront::from_objectives(points.iter().map(|p| ObjectiveVector(p.to_vec())).collect())
}

fn front_metrics() -> Verdict {
    let hv = |pts: &[&[f64]]| normalized_hypervolume(&front(pts)).unwrap();
    let hand = hv(&[&[1.0, 2.0, 3.0, 4.0]]) == 24.0
        && hv(&[&[1.0, 2.0, 3.0, 4.0], &[2.0, 2.0, 2.0, 2.0]]) == 20.0
        && hv(&[
            &[1.0, 1.0, 1.0, 1.0],
            &[1.0, 1.0, 1.0, 1.0],
            &[2.0, 1.0, 1.0, 1.0],
        ]) == 1.5;
    let a = front(&[&[1.0, 1.0]]);
    let b = front(&[&[2.0, 2.0], &[0.0, 3.0]]);
    let coverage = relative_coverage(&a, &b).unwrap() == (1, 2)
        && relative_coverage(&b, &a).unwrap() == (0, 1)
        && relative_coverage(&b, &b).unwrap() == (2, 2);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..30);
        let pts: Vec<ObjectiveVector> = (0..n)
            .map(|_| ObjectiveVector((0..4).map(|_| rng.gen_range(0.0..10.0)).collect()))
            .collect();
        let c: f64 = rng.gen_range(0.1..10.0);
        let s = normalized_hypervolume(&ParetoFront::from_objectives(pts.clone())).unwrap();
        let sc = normalized_hypervolume(&ParetoFront::from_objectives(
            pts.iter().map(|p| p.scaled(c)).collect(),
        ))
        .unwrap();
        let expected = c.powi(4) * s;
        worst = worst.max((sc - expected).abs() / expected.max(1.0));
    }
    verdict(
        hand && coverage && worst <= 1e-12,
        format!("hand_hv={hand} hand_coverage={coverage} homogeneity_rel_err={worst:.2e}"),
    )
}

fn archives_stay_antichains() -> Verdict {
    let mut parts = Vec::new();
    let mut total = 0;
    for alg in [
        Algorithm::Vebbo,
        Algorithm::Vepso,
        Algorithm::Nsbbo,
        Algorithm::Nspso,
    ] {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.algorithm = alg;
        cfg.experiment.trials = 1;
        cfg.set_iterations(10);
        let mut checks = 0;
        let mut violations = 0;
        run_campaign_observed(&cfg, &mut |_, _, archive| {
            checks += 1;
            violations += archive.to_front().antichain_violations();
        })
        .unwrap();
        total += violations;
        parts.push(format!("{alg}={violations}/{checks}it"));
    }
    verdict(total == 0, format!("violations {}", parts.join(" ")))
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

fn workers_are_invisible() -> Verdict {
    let mut identical = true;
    let mut seconds = [0.0; 2];
    for alg in [Algorithm::Bbo, Algorithm::Nspso] {
        let mut dirs = Vec::new();
        for (slot, workers) in [1, 4].into_iter().enumerate() {
            let mut cfg = ExperimentConfig::default();
            cfg.experiment.algorithm = alg;
            cfg.experiment.trials = 2;
            cfg.experiment.workers = workers;
            cfg.set_iterations(10);
            let started = Instant::now();
            let report = run_campaign(&cfg).unwrap();
            seconds[slot] += started.elapsed().as_secs_f64();
            let dir = tempfile::tempdir().unwrap();
            io::write_campaign(&report, dir.path()).unwrap();
            dirs.push(dir);
        }
        identical &= snapshot(dirs[0].path()) == snapshot(dirs[1].path());
    }
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let speedup = seconds[0] / seconds[1];
    let detail = format!("identical_files={identical} speedup={speedup:.2} cores={cores}");
    if cores < 4 {
        return Verdict {
            status: if identical {
                Status::NotApplicable
            } else {
                Status::Fail
            },
            detail: format!("{detail} (speedup not required below 4 cores)"),
        };
    }
    verdict(identical && speedup > 1.0, detail)
}

fn sphere_convergence() -> Verdict {
    let p = Sphere::new(4, 5.12);
    let eval = Evaluator::sequential(&p);
    let pso = PsoConfig {
        iterations: 50,
        ..Default::default()
    };
    let bbo = BboConfig {
        iterations: 50,
        ..Default::default()
    };
    let seeds = 0..5u64;
    let pso_med = median(
        &seeds
            .clone()
            .map(|s| run_pso(&eval, &pso, s).unwrap().best.cost)
            .collect::<Vec<_>>(),
    );
    let bbo_med = median(
        &seeds
            .map(|s| run_bbo(&eval, &bbo, s).unwrap().best.cost)
            .collect::<Vec<_>>(),
    );
    verdict(
        pso_med < 1e-2 && bbo_med < 1e-1,
        format!("pso_median={pso_med:.2e} bbo_median={bbo_med:.2e}"),
    )
}

/// Expects `median(low) <= median(high)`. An inversion larger than two
/// pooled standard deviations fails; a smaller one is only reported.
fn ordering(label: &str, low_name: &str, low: &[f64], high_name: &str, high: &[f64]) -> Verdict {
    let (ml, mh) = (median(low), median(high));
    let (sl, sh) = (Summary::of(low), Summary::of(high));
    let pooled = ((sl.std * sl.std + sh.std * sh.std) / 2.0).sqrt();
    let gap = ml - mh;
    let status = if gap <= 0.0 {
        Status::Pass
    } else if gap > 2.0 * pooled {
        Status::Fail
    } else {
        Status::Warn
    };
    Verdict {
        status,
        detail: format!(
            "{label}: {low_name} median={ml:.4} (std {:.4}) vs {high_name} median={mh:.4} (std {:.4}), gap={:.2} pooled std",
            sl.std,
            sh.std,
            if pooled > 0.0 { gap / pooled } else { 0.0 }
        ),
    }
}

fn repeated(alg: Algorithm, tweak: impl Fn(&mut ExperimentConfig)) -> Vec<CampaignReport> {
    (1..=5u64)
        .map(|seed| {
            let mut cfg = ExperimentConfig::default();
            cfg.experiment.algorithm = alg;
            cfg.experiment.trials = 1;
            cfg.experiment.seed = seed;
            tweak(&mut cfg);
            run_campaign(&cfg).unwrap()
        })
        .collect()
}

fn hypervolumes(reports: &[CampaignReport]) -> Vec<f64> {
    reports
        .iter()
        .map(|r| normalized_hypervolume(r.trials[0].front.as_ref().unwrap()).unwrap())
        .collect()
}

fn orderings() -> Vec<Verdict> {
    let ns = hypervolumes(&repeated(Algorithm::Nsbbo, |_| {}));
    let ve = hypervolumes(&repeated(Algorithm::Vebbo, |_| {}));
    let cost = |model| {
        repeated(Algorithm::Bbo, move |c| c.bbo.emigration = model)
            .iter()
            .map(|r| r.trials[0].final_cost)
            .collect::<Vec<_>>()
    };
    let linear = cost(EmigrationModel::Linear);
    let sinusoidal = cost(EmigrationModel::Sinusoidal);
    vec![
        ordering("hypervolume", "nsbbo", &ns, "vebbo", &ve),
        ordering("final cost", "linear", &linear, "sinusoidal", &sinusoidal),
    ]
}

fn trials_are_consistent(bbo: &CampaignReport, pso: &CampaignReport) -> Verdict {
    let cv = |r: &CampaignReport| r.final_cost.std / r.final_cost.mean;
    let (b, p) = (cv(bbo), cv(pso));
    verdict(
        b < 0.1 && p < 0.1,
        format!(
            "trials=10 bbo_cv={:.2}% pso_cv={:.2}%",
            100.0 * b,
            100.0 * p
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(String, Verdict)> = Vec::new();
    let mut record = |id: &str, v: Verdict| {
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::NotApplicable => "N/A ",
        };
        println!("criterion {id:<3} {tag}  {}", v.detail);
        results.push((id.to_string(), v));
    };

    record("1", baseline_is_beaten());
    record("2", dynamics_oracles());
    record("3", objective_arithmetic());
    record("4", sorting_matches_brute_force());
    record("5", front_metrics());
    record("6", archives_stay_antichains());
    record("7", workers_are_invisible());
    record("8", sphere_convergence());
    let mut ord = orderings().into_iter();
    record("9a", ord.next().unwrap());
    record("9b", ord.next().unwrap());
    let bbo = campaign(Algorithm::Bbo, 10);
    let pso = campaign(Algorithm::Pso, 10);
    record("10", trials_are_consistent(&bbo, &pso));

    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, v)| v.status == Status::Fail)
        .map(|(id, _)| id.as_str())
        .collect();
    if failed.is_empty() {
        println!("acceptance: no hard failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
