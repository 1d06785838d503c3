//! CSV outputs and their readers. Every file has one header row and prints
//! floats in shortest round-trip form, so reading a file back reproduces the
//! written values exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::control::PdGains;
use crate::error::{Error, Result};
use crate::evolution::Individual;
use crate::objectives::ObjectiveVector;
use crate::pareto::ParetoFront;

use super::campaign::{Band, CampaignReport, SweepRow, TimingRow};
use super::compare::FrontComparison;

/// One row of `campaign.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// One row of `metrics.csv`. `record` is `coverage`, `dominated` or
/// `hypervolume`; unused cells are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub record: String,
    pub a: Option<String>,
    pub b: Option<String>,
    pub covered: Option<usize>,
    pub total: Option<usize>,
    pub hypervolume: Option<f64>,
}

/// One row of a `traj_<signal>.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub t: f64,
    pub mean: f64,
    pub std: f64,
    /// Only in the thrust file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log10_mean: Option<f64>,
}

/// One row of `best_<alg>.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub trial: usize,
    pub seed: u64,
    pub cost: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub kp_phi: f64,
    pub kd_phi: f64,
    pub kp_theta: f64,
    pub kd_theta: f64,
    pub kp_psi: f64,
    pub kd_psi: f64,
    pub kp_z: f64,
    pub kd_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    pub axis: String,
    pub value: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingCsvRow {
    pub workers: usize,
    pub seconds: f64,
    pub evaluations_per_worker: usize,
    pub mean_cost: f64,
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn campaign_rows(report: &CampaignReport) -> Vec<IterationRow> {
    report
        .per_iteration
        .iter()
        .enumerate()
        .map(|(k, s)| IterationRow {
            iteration: k + 1,
            mean: s.mean,
            std: s.std,
            min: s.min,
            max: s.max,
        })
        .collect()
}

pub fn best_rows(report: &CampaignReport) -> Vec<BestRow> {
    report
        .trials
        .iter()
        .map(|t| {
            let f = t.best_objectives.as_slice();
            let g = t.best_gains;
            BestRow {
                trial: t.trial,
                seed: t.seed,
                cost: t.final_cost,
                f1: f[0],
                f2: f[1],
                f3: f[2],
                f4: f[3],
                kp_phi: g.kp_phi,
                kd_phi: g.kd_phi,
                kp_theta: g.kp_theta,
                kd_theta: g.kd_theta,
                kp_psi: g.kp_psi,
                kd_psi: g.kd_psi,
                kp_z: g.kp_z,
                kd_z: g.kd_z,
            }
        })
        .collect()
}

pub fn band_rows(band: &Band, log10: bool) -> Vec<BandRow> {
    (0..band.times.len())
        .map(|k| BandRow {
            t: band.times[k],
            mean: band.mean[k],
            std: band.std[k],
            log10_mean: log10.then(|| band.mean[k].log10()),
        })
        .collect()
}

pub fn metrics_rows(cmp: &FrontComparison) -> Vec<MetricsRow> {
    let mut rows = Vec::new();
    let n = cmp.names.len();
    for a in 0..n {
        for b in 0..n {
            if let Some((covered, total)) = cmp.coverage[a][b] {
                rows.push(MetricsRow {
                    record: "coverage".into(),
                    a: Some(cmp.names[a].clone()),
                    b: Some(cmp.names[b].clone()),
                    covered: Some(covered),
                    total: Some(total),
                    hypervolume: None,
                });
            }
        }
    }
    for b in 0..n {
        let (covered, total) = cmp.dominated[b];
        rows.push(MetricsRow {
            record: "dominated".into(),
            a: None,
            b: Some(cmp.names[b].clone()),
            covered: Some(covered),
            total: Some(total),
            hypervolume: None,
        });
    }
    for a in 0..n {
        rows.push(MetricsRow {
            record: "hypervolume".into(),
            a: Some(cmp.names[a].clone()),
            b: None,
            covered: None,
            total: None,
            hypervolume: Some(cmp.hypervolume[a]),
        });
    }
    rows
}

/// Objective columns `f1..fk`, then `cost`, then one column per gene (named
/// after the PD gains when there are eight).
pub fn write_front<W: Write>(out: W, front: &ParetoFront) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = front.num_objectives().unwrap_or(0);
    let dim = front.members.first().map_or(0, |m| m.genes.len());
    let mut header: Vec<String> = (1..=k).map(|i| format!("f{i}")).collect();
    header.push("cost".into());
    if dim == PdGains::DIM {
        header.extend(PdGains::NAMES.iter().map(|s| s.to_string()));
    } else {
        header.extend((1..=dim).map(|i| format!("x{i}")));
    }
    w.write_record(&header)?;
    for m in &front.members {
        let row = m
            .objectives()
            .as_slice()
            .iter()
            .chain(std::iter::once(&m.cost))
            .chain(&m.genes)
            .map(f64::to_string);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_front`]. Columns named `f<i>` are
/// objectives; `cost` is optional; every other column is a gene.
pub fn read_front<R: Read>(input: R) -> Result<ParetoFront> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let is_objective = |h: &str| {
        h.strip_prefix('f')
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    };
    let mut members = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let mut objectives = Vec::new();
        let mut genes = Vec::new();
        let mut cost = f64::NAN;
        for (name, cell) in header.iter().zip(record.iter()) {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Csv(format!(
                    "row {}: column {name}: bad number {cell:?}",
                    line + 2
                ))
            })?;
            if is_objective(name) {
                objectives.push(v);
            } else if name == "cost" {
                cost = v;
            } else {
                genes.push(v);
            }
        }
        if objectives.is_empty() {
            return Err(Error::Csv("front file has no f<i> columns".into()));
        }
        members.push(Individual::evaluated(
            genes,
            ObjectiveVector(objectives),
            cost,
        ));
    }
    Ok(ParetoFront::new(members))
}

pub fn write_front_file(path: &Path, front: &ParetoFront) -> Result<()> {
    write_front(create(path)?, front)
}

pub fn read_front_file(path: &Path) -> Result<ParetoFront> {
    read_front(open(path)?).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))
}

pub fn write_rows_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_rows(create(path)?, rows)
}

pub fn read_rows_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    read_rows(open(path)?)
}

/// Writes every campaign artifact into `dir` and returns the paths written.
pub fn write_campaign(report: &CampaignReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let alg = report.algorithm.name();
    let mut written = Vec::new();
    let mut emit = |name: String, result: Result<()>| -> Result<()> {
        result?;
        written.push(dir.join(name));
        Ok(())
    };

    let p = dir.join("campaign.csv");
    emit(
        "campaign.csv".into(),
        write_rows_file(&p, &campaign_rows(report)),
    )?;
    let name = format!("best_{alg}.csv");
    emit(
        name.clone(),
        write_rows_file(&dir.join(&name), &best_rows(report)),
    )?;
    if let Some(front) = report.trials.first().and_then(|t| t.front.as_ref()) {
        let name = format!("front_{alg}.csv");
        emit(name.clone(), write_front_file(&dir.join(&name), front))?;
    }
    let bands = &report.trajectories;
    for (signal, band, log10) in [
        ("z", &bands.z, false),
        ("theta", &bands.theta, false),
        ("phi", &bands.phi, false),
        ("thrust", &bands.thrust, true),
    ] {
        let name = format!("traj_{signal}.csv");
        emit(
            name.clone(),
            write_rows_file(&dir.join(&name), &band_rows(band, log10)),
        )?;
    }
    Ok(written)
}

pub fn sweep_rows(axis: &str, rows: &[SweepRow]) -> Vec<SweepCsvRow> {
    rows.iter()
        .map(|r| SweepCsvRow {
            axis: axis.to_string(),
            value: r.value.clone(),
            mean: r.cost.mean,
            std: r.cost.std,
            min: r.cost.min,
            max: r.cost.max,
        })
        .collect()
}

pub fn timing_rows(rows: &[TimingRow]) -> Vec<TimingCsvRow> {
    rows.iter()
        .map(|r| TimingCsvRow {
            workers: r.workers,
            seconds: r.seconds,
            evaluations_per_worker: r.evaluations_per_worker,
            mean_cost: r.final_costs.iter().sum::<f64>() / r.final_costs.len() as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_round_trip_is_exact() {
        let members = vec![
            Individual::evaluated(
                PdGains::conventional().to_array().to_vec(),
                ObjectiveVector(vec![0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300]),
                0.1 + 1.0 / 3.0,
            ),
            Individual::evaluated(
                vec![std::f64::consts::PI; 8],
                ObjectiveVector(vec![5e6, 0.0, 7.0, 1.5]),
                f64::MAX,
            ),
        ];
        let front = ParetoFront::new(members);
        let mut buf = Vec::new();
        write_front(&mut buf, &front).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("f1,f2,f3,f4,cost,kp_phi,"));
        assert_eq!(read_front(buf.as_slice()).unwrap(), front);
    }

    #[test]
    fn objective_only_front() {
        let front = ParetoFront::from_objectives(vec![ObjectiveVector(vec![1.0, 2.0])]);
        let back = read_front("f1,f2\n1,2\n".as_bytes()).unwrap();
        assert_eq!(back.points(), front.points());
        assert!(read_front("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_front("f1,f2\n1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn metrics_rows_round_trip() {
        let rows = vec![
            MetricsRow {
                record: "coverage".into(),
                a: Some("nsbbo".into()),
                b: Some("vepso".into()),
                covered: Some(3),
                total: Some(45),
                hypervolume: None,
            },
            MetricsRow {
                record: "hypervolume".into(),
                a: Some("nsbbo".into()),
                b: None,
                covered: None,
                total: None,
                hypervolume: Some(0.1 + 0.2),
            },
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("record,a,b,covered,total,hypervolume\n"));
        let back: Vec<MetricsRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn band_rows_round_trip() {
        let rows = vec![BandRow {
            t: 0.01,
            mean: 4.59108,
            std: 1.0 / 7.0,
            log10_mean: Some(4.59108f64.log10()),
        }];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        assert_eq!(read_rows::<_, BandRow>(buf.as_slice()).unwrap(), rows);
    }
}
