//! CSV output.
//!
//! * `<family>_<method>_t<trial>.csv`: one row per transition, header
//!   [`TRACE_HEADER`].
//! * `<family>_summary.csv`: one row per method, header [`SUMMARY_HEADER`],
//!   plus `mean_cost,mean_profit` for the Cobb–Douglas family.
//! * `<family>_<method>_curve.csv`: trial means per iteration (`n`) or per
//!   point of the elapsed-time grid (`t`).
//! * `<family>_failures.csv`: only written when some trial failed.
//!
//! Floats use the shortest representation that round-trips.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::runner::{ExperimentResult, MethodSummary};
use crate::problems::Family;
use crate::solvers::RunTrace;
use crate::Result;

pub const TRACE_HEADER: &str = "n,theta,residual,rel_obj,rel_iter,feas,eta,elapsed_s";
pub const SUMMARY_HEADER: &str =
    "method,trials_ok,trials_failed,mean_iters,mean_time_s,mean_final_obj,mean_final_feas";
/// Columns holding wall-clock measurements, skipped by determinism checks.
pub const TIMING_COLUMNS: [&str; 3] = ["elapsed_s", "mean_time_s", "t"];

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.n, r.theta, r.residual, r.rel_obj, r.rel_iter, r.feas, r.eta, r.elapsed_s
        );
    }
    out
}

pub fn summary_csv(summaries: &[MethodSummary], family: Family) -> String {
    let cost = family == Family::CobbDouglas;
    let mut out = String::from(SUMMARY_HEADER);
    if cost {
        out.push_str(",mean_cost,mean_profit");
    }
    out.push('\n');
    for s in summaries {
        let _ = write!(
            out,
            "{},{},{},{:?},{:?},{:?},{:?}",
            s.method,
            s.trials_ok,
            s.trials_failed,
            s.mean_iters,
            s.mean_time_s,
            s.mean_final_obj,
            s.mean_final_feas
        );
        if cost {
            let _ = write!(
                out,
                ",{:?},{:?}",
                s.mean_cost.unwrap_or(f64::NAN),
                s.mean_profit.unwrap_or(f64::NAN)
            );
        }
        out.push('\n');
    }
    out
}

pub fn curve_csv(summary: &MethodSummary) -> String {
    let mut out = String::new();
    let axis = if summary.time_axis { "t" } else { "n" };
    let _ = writeln!(out, "{axis},theta,residual,rel_obj,rel_iter,feas,count");
    for p in &summary.curve {
        let x = if summary.time_axis {
            format!("{:?}", p.x)
        } else {
            format!("{}", p.x as usize)
        };
        let _ = writeln!(
            out,
            "{x},{:?},{:?},{:?},{:?},{:?},{}",
            p.theta, p.residual, p.rel_obj, p.rel_iter, p.feas, p.count
        );
    }
    out
}

/// Writes every CSV of the experiment into `dir` and returns the paths in
/// write order.
pub fn write_experiment(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let family = result.family.name();
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    let mut failures = String::new();
    for record in &result.trials {
        for (method, run) in result.config.methods.iter().zip(&record.runs) {
            match run {
                Ok(run) => put(
                    format!("{family}_{}_t{}.csv", method.name, record.trial),
                    trace_csv(&run.trace),
                )?,
                Err(msg) => {
                    let _ = writeln!(
                        failures,
                        "{},{},{},\"{}\"",
                        method.name,
                        record.trial,
                        record.seed,
                        msg.replace('"', "\"\"")
                    );
                }
            }
        }
    }
    put(
        format!("{family}_summary.csv"),
        summary_csv(&result.summaries, result.family),
    )?;
    for s in &result.summaries {
        put(format!("{family}_{}_curve.csv", s.method), curve_csv(s))?;
    }
    if !failures.is_empty() {
        put(
            format!("{family}_failures.csv"),
            format!("method,trial,seed,error\n{failures}"),
        )?;
    }
    Ok(written)
}

/// Drops the timing columns from a CSV so two runs can be compared.
pub fn strip_timing_columns(csv: &str) -> String {
    let mut lines = csv.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let keep: Vec<bool> = header
        .split(',')
        .map(|c| !TIMING_COLUMNS.contains(&c))
        .collect();
    let filter = |line: &str| -> String {
        line.split(',')
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| v)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = filter(header);
    out.push('\n');
    for line in lines {
        out.push_str(&filter(line));
        out.push('\n');
    }
    out
}
