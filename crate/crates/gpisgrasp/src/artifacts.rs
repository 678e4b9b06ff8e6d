//! Run artifacts: CSV logs, the grasp list and the per-run summary.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! files are byte-identical whenever the run is.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use gpisgrasp_core::explorer::{ExplorationResult, GraspRecord, Observation, ShapeMetrics};

pub const CONFIG_FILE: &str = "config.toml";
pub const ITERATIONS_FILE: &str = "iterations.csv";
pub const PRIOR_FILE: &str = "prior.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const GRASPS_FILE: &str = "grasps.csv";
pub const SUMMARY_FILE: &str = "run.toml";
pub const CLOUD_FILE: &str = "cloud.xyz";
pub const INITIAL_SURFACE_FILE: &str = "surface_initial.obj";
pub const FINAL_SURFACE_FILE: &str = "surface_final.obj";

const QUERY_COLUMNS: [&str; 12] = [
    "thumb_x",
    "thumb_y",
    "thumb_z",
    "finger1_x",
    "finger1_y",
    "finger1_z",
    "finger2_u",
    "finger2_v",
    "yaw",
    "pitch",
    "roll",
    "approach_offset",
];

const TIP_COLUMNS: [&str; 9] = [
    "tip0_x", "tip0_y", "tip0_z", "tip1_x", "tip1_y", "tip1_z", "tip2_x", "tip2_y", "tip2_z",
];

pub fn iteration_header() -> Vec<&'static str> {
    let mut h = vec!["iter"];
    h.extend(QUERY_COLUMNS);
    h.extend(TIP_COLUMNS);
    h.extend(["contacts", "pfc", "y", "best_pfc", "hausdorff", "mean_variance", "wall_ms"]);
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn row(s: &mut String, o: &Observation, iter: usize, best: f64, m: Option<&ShapeMetrics>, wall_ms: f64) {
    let mut cells: Vec<String> = vec![iter.to_string()];
    cells.extend(o.query.to_array().iter().map(|v| v.to_string()));
    cells.extend(o.tips.iter().flat_map(|t| t.to_array()).map(|v| v.to_string()));
    cells.push(o.contact_flags());
    cells.push(o.pfc.to_string());
    cells.push(o.y.to_string());
    cells.push(best.to_string());
    cells.push(opt(m.and_then(|m| m.hausdorff)));
    cells.push(opt(m.map(|m| m.mean_variance)));
    cells.push(wall_ms.to_string());
    s.push_str(&cells.join(","));
    s.push('\n');
}

/// One row per executed exploration iteration.
pub fn iterations_csv(r: &ExplorationResult) -> String {
    let mut s = iteration_header().join(",");
    s.push('\n');
    for (k, o) in r.log.iter().enumerate() {
        row(&mut s, o, o.iteration, r.best_pfc_curve[k], r.metrics[k].as_ref(), r.wall_ms[k]);
    }
    s
}

/// Prior attempts in the iteration schema, numbered from 1.
pub fn prior_csv(prior: &[Observation]) -> String {
    let mut s = iteration_header().join(",");
    s.push('\n');
    let mut best = 0.0f64;
    for (k, o) in prior.iter().enumerate() {
        best = best.max(o.pfc);
        row(&mut s, o, k + 1, best, None, 0.0);
    }
    s
}

/// Initial metrics as iteration 0, then every measured iteration.
pub fn metrics_csv(r: &ExplorationResult) -> String {
    let mut s = String::from("iter,hausdorff,mean_variance\n");
    let initial = r.initial_metrics.iter().map(|m| (0, m));
    let later = r.log.iter().zip(&r.metrics).filter_map(|(o, m)| m.as_ref().map(|m| (o.iteration, m)));
    for (i, m) in initial.chain(later) {
        let _ = writeln!(s, "{i},{},{}", opt(m.hausdorff), m.mean_variance);
    }
    s
}

pub fn grasps_csv(grasps: &[GraspRecord]) -> String {
    let mut h = vec!["rank", "iter", "pfc", "wrist_x", "wrist_y", "wrist_z", "yaw", "pitch", "roll"];
    h.extend(TIP_COLUMNS);
    let mut s = h.join(",");
    s.push('\n');
    for (rank, g) in grasps.iter().enumerate() {
        let mut cells = vec![(rank + 1).to_string(), g.iteration.to_string(), g.pfc.to_string()];
        cells.extend(g.wrist_position.to_array().iter().map(|v| v.to_string()));
        cells.extend(g.wrist_euler.iter().map(|v| v.to_string()));
        cells.extend(g.tips.iter().flat_map(|t| t.to_array()).map(|v| v.to_string()));
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Explore,
    Baseline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Explore => "explore",
            Mode::Baseline => "baseline",
        }
    }
}

/// Per-run summary written next to the logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub object: String,
    pub seed: u64,
    pub iterations: usize,
    pub prior_attempts: usize,
    pub best_pfc: f64,
    pub stable_grasps: usize,
    pub com: [f64; 3],
    pub sigma_com: f64,
}

impl RunSummary {
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("summary always serializes")
    }
}

/// Columns of a CSV file by header name. Blank cells become `None`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: BTreeMap<String, Vec<Option<String>>>,
    pub rows: usize,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table, String> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
        if header.is_empty() {
            return Err("empty CSV".into());
        }
        let mut cols: Vec<Vec<Option<String>>> = vec![Vec::new(); header.len()];
        let mut rows = 0;
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            for (c, cell) in cols.iter_mut().zip(record.iter()) {
                c.push((!cell.is_empty()).then(|| cell.to_string()));
            }
            rows += 1;
        }
        Ok(Table {
            columns: header.into_iter().zip(cols).collect(),
            rows,
        })
    }

    /// Numeric column; blank cells are `None`.
    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>, String> {
        let col = self.columns.get(name).ok_or_else(|| format!("missing column {name}"))?;
        col.iter()
            .enumerate()
            .map(|(i, c)| match c {
                None => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| format!("column {name}, row {}: bad number {s:?}", i + 2)),
            })
            .collect()
    }

    /// Numeric column without blanks.
    pub fn required(&self, name: &str) -> Result<Vec<f64>, String> {
        self.numbers(name)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| format!("column {name}, row {}: blank", i + 2)))
            .collect()
    }
}
