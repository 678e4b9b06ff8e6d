//! Summaries across run directories: best-P_FC curves, cumulative stable
//! grasps, iterations to ten high-quality grasps, shape improvement.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::artifacts::{Mode, RunSummary, Table, ITERATIONS_FILE, METRICS_FILE, SUMMARY_FILE};
use crate::svg::{line_plot, Series};

/// Runs that have not collected enough grasps by this iteration count as
/// not converged.
pub const ITERATION_CAP: usize = 300;
pub const TARGET_GRASPS: usize = 10;
pub const TARGET_PFC: f64 = 0.8;

#[derive(Debug, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ReportError {
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct RunData {
    pub dir: PathBuf,
    pub name: String,
    pub summary: RunSummary,
    pub iter: Vec<usize>,
    pub pfc: Vec<f64>,
    pub best_pfc: Vec<f64>,
    /// `(iteration, hausdorff, mean_variance)`, iteration 0 first when present.
    pub metrics: Vec<(usize, Option<f64>, f64)>,
}

fn read_file(dir: &Path, name: &str) -> Result<String, ReportError> {
    let p = dir.join(name);
    std::fs::read_to_string(&p).map_err(|e| ReportError {
        path: p.display().to_string(),
        message: e.to_string(),
    })
}

impl RunData {
    pub fn load(dir: &Path) -> Result<RunData, ReportError> {
        let fail = |file: &str, message: String| ReportError {
            path: dir.join(file).display().to_string(),
            message,
        };
        let summary: RunSummary =
            toml::from_str(&read_file(dir, SUMMARY_FILE)?).map_err(|e| fail(SUMMARY_FILE, e.message().to_string()))?;
        let it = Table::parse(&read_file(dir, ITERATIONS_FILE)?).map_err(|m| fail(ITERATIONS_FILE, m))?;
        let num = |name: &str| it.required(name).map_err(|m| fail(ITERATIONS_FILE, m));
        let iter: Vec<usize> = num("iter")?.into_iter().map(|v| v as usize).collect();
        let pfc = num("pfc")?;
        let best_pfc = num("best_pfc")?;
        if iter.len() != summary.iterations {
            return Err(fail(
                ITERATIONS_FILE,
                format!("{} rows but the run summary records {} iterations", iter.len(), summary.iterations),
            ));
        }
        let mt = Table::parse(&read_file(dir, METRICS_FILE)?).map_err(|m| fail(METRICS_FILE, m))?;
        let m_iter = mt.required("iter").map_err(|m| fail(METRICS_FILE, m))?;
        let m_h = mt.numbers("hausdorff").map_err(|m| fail(METRICS_FILE, m))?;
        let m_v = mt.required("mean_variance").map_err(|m| fail(METRICS_FILE, m))?;
        let metrics = m_iter
            .into_iter()
            .zip(m_h)
            .zip(m_v)
            .map(|((i, h), v)| (i as usize, h, v))
            .collect();
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string());
        Ok(RunData {
            dir: dir.to_path_buf(),
            name,
            summary,
            iter,
            pfc,
            best_pfc,
            metrics,
        })
    }

    /// Iteration at which `TARGET_GRASPS` attempts exceeded `TARGET_PFC`,
    /// or `None` if that did not happen within `ITERATION_CAP`.
    pub fn iterations_to_target(&self) -> Option<usize> {
        let mut seen = 0;
        for (&i, &p) in self.iter.iter().zip(&self.pfc) {
            if i > ITERATION_CAP {
                break;
            }
            if p > TARGET_PFC {
                seen += 1;
                if seen >= TARGET_GRASPS {
                    return Some(i);
                }
            }
        }
        None
    }

    pub fn cumulative_stable(&self, pfc_min: f64) -> Vec<usize> {
        self.pfc
            .iter()
            .scan(0, |n, &p| {
                if p > pfc_min {
                    *n += 1;
                }
                Some(*n)
            })
            .collect()
    }

    fn first_last_metrics(&self) -> Option<((Option<f64>, f64), (Option<f64>, f64))> {
        let first = self.metrics.first()?;
        let last = self.metrics.last()?;
        Some(((first.1, first.2), (last.1, last.2)))
    }

    /// Relative Hausdorff improvement from the first to the last measurement, %.
    pub fn hausdorff_improvement(&self) -> Option<f64> {
        let ((h0, _), (h1, _)) = self.first_last_metrics()?;
        let (h0, h1) = (h0?, h1?);
        (h0 > 0.0).then(|| 100.0 * (h0 - h1) / h0)
    }

    pub fn variance_drop(&self) -> Option<f64> {
        let ((_, v0), (_, v1)) = self.first_last_metrics()?;
        (v0 > 0.0).then(|| 100.0 * (v0 - v1) / v0)
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "NA".into())
}

/// Median, with `(a + b) / 2` for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Iterations-to-target statistics for a group, non-converged runs counted
/// at the cap.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStats {
    pub runs: usize,
    pub converged: usize,
    pub mean: f64,
    pub median: f64,
    pub min: usize,
}

pub fn convergence_stats(runs: &[&RunData]) -> Option<ConvergenceStats> {
    let counts: Vec<usize> = runs.iter().map(|r| r.iterations_to_target().unwrap_or(ITERATION_CAP)).collect();
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    Some(ConvergenceStats {
        runs: runs.len(),
        converged: runs.iter().filter(|r| r.iterations_to_target().is_some()).count(),
        mean: values.iter().sum::<f64>() / values.len().max(1) as f64,
        median: median(&values)?,
        min: *counts.iter().min()?,
    })
}

/// Files written by `write_report`.
pub struct ReportFiles {
    pub written: Vec<PathBuf>,
    pub text: String,
}

pub fn write_report(runs: &[RunData], out: &Path, stable_pfc_min: f64) -> Result<ReportFiles, ReportError> {
    let io_err = |p: &Path, e: std::io::Error| ReportError {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<(), ReportError> {
        let p = out.join(name);
        std::fs::write(&p, text).map_err(|e| io_err(&p, e))?;
        written.push(p);
        Ok(())
    };

    let mut summary = String::from(
        "run,mode,object,seed,iterations,best_pfc,stable_grasps,iterations_to_10,hausdorff_improvement_pct,variance_drop_pct\n",
    );
    for r in runs {
        let to10 = r
            .iterations_to_target()
            .map(|i| i.to_string())
            .unwrap_or_else(|| "no convergence".into());
        let stable = r.cumulative_stable(stable_pfc_min).last().copied().unwrap_or(0);
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{}",
            r.name,
            r.summary.mode.name(),
            r.summary.object,
            r.summary.seed,
            r.iter.len(),
            r.best_pfc.last().copied().unwrap_or(0.0),
            stable,
            to10,
            cell(r.hausdorff_improvement()),
            cell(r.variance_drop()),
        );
    }
    put("summary.csv", &summary)?;

    let longest = runs.iter().map(|r| r.iter.len()).max().unwrap_or(0);
    let mut curves = String::from("iter");
    let mut stable = String::from("iter");
    for r in runs {
        curves.push(',');
        curves.push_str(&r.name);
        stable.push(',');
        stable.push_str(&r.name);
    }
    curves.push('\n');
    stable.push('\n');
    let counts: Vec<Vec<usize>> = runs.iter().map(|r| r.cumulative_stable(stable_pfc_min)).collect();
    for k in 0..longest {
        let _ = write!(curves, "{}", k + 1);
        let _ = write!(stable, "{}", k + 1);
        for (r, c) in runs.iter().zip(&counts) {
            curves.push(',');
            stable.push(',');
            if let Some(b) = r.best_pfc.get(k) {
                curves.push_str(&b.to_string());
                stable.push_str(&c[k].to_string());
            }
        }
        curves.push('\n');
        stable.push('\n');
    }
    put("best_pfc.csv", &curves)?;
    put("stable_grasps.csv", &stable)?;

    let series = |f: &dyn Fn(&RunData, usize) -> Vec<(f64, f64)>| -> Vec<Series> {
        runs.iter()
            .enumerate()
            .map(|(i, r)| Series {
                label: format!("{} ({})", r.name, r.summary.mode.name()),
                points: f(r, i),
            })
            .collect()
    };
    let best = series(&|r, _| r.iter.iter().zip(&r.best_pfc).map(|(&i, &b)| (i as f64, b)).collect());
    put("best_pfc.svg", &line_plot("Best P_FC", "iteration", "best P_FC", &best))?;
    let cum = series(&|r, i| r.iter.iter().zip(&counts[i]).map(|(&it, &c)| (it as f64, c as f64)).collect());
    put(
        "stable_grasps.svg",
        &line_plot(&format!("Grasps with P_FC > {stable_pfc_min}"), "iteration", "count", &cum),
    )?;
    let haus = series(&|r, _| r.metrics.iter().filter_map(|&(i, h, _)| h.map(|h| (i as f64, h))).collect());
    put("hausdorff.svg", &line_plot("Hausdorff distance to ground truth", "iteration", "distance", &haus))?;
    let var = series(&|r, _| r.metrics.iter().map(|&(i, _, v)| (i as f64, v)).collect());
    put("mean_variance.svg", &line_plot("Mean GPIS variance", "iteration", "variance", &var))?;

    let mut text = String::new();
    let mut groups = String::from("mode,object,runs,converged,mean_iterations,median_iterations,min_iterations\n");
    let mut keys: Vec<(Mode, String)> = runs.iter().map(|r| (r.summary.mode, r.summary.object.clone())).collect();
    keys.sort_by(|a, b| (a.0.name(), &a.1).cmp(&(b.0.name(), &b.1)));
    keys.dedup();
    for (mode, object) in keys {
        let members: Vec<&RunData> = runs.iter().filter(|r| r.summary.mode == mode && r.summary.object == object).collect();
        if let Some(s) = convergence_stats(&members) {
            let _ = writeln!(
                groups,
                "{},{},{},{},{},{},{}",
                mode.name(),
                object,
                s.runs,
                s.converged,
                s.mean,
                s.median,
                s.min
            );
            let _ = writeln!(
                text,
                "{} on {}: {} grasps with P_FC > {} after an average of {:.1} iterations (median {}, minimum {}); {}/{} runs converged within {}",
                mode.name(),
                object,
                TARGET_GRASPS,
                TARGET_PFC,
                s.mean,
                s.median,
                s.min,
                s.converged,
                s.runs,
                ITERATION_CAP
            );
        }
    }
    put("convergence.csv", &groups)?;
    put("report.txt", &text)?;
    Ok(ReportFiles { written, text })
}
