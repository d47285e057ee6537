//! CSV and JSON trace export. The CSV schema is the external contract:
//!
//! ```text
//! seed,step,axis,shots_step,cum_shots,kappa,y_hat,delta_energy,delta_fidelity
//! ```
//!
//! one row per optimizer step, floats in scientific notation with 13
//! significant digits. The JSON file mirrors the run configuration plus the
//! full traces and round-trips losslessly.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use super::config::RunConfig;
use crate::error::Error;
use crate::optim::{OptimizerTrace, Strategy, TraceStep};
use crate::Result;

pub const CSV_HEADER: &str =
    "seed,step,axis,shots_step,cum_shots,kappa,y_hat,delta_energy,delta_fidelity";

fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Renders traces to the fixed CSV schema.
pub fn render_csv(traces: &[OptimizerTrace]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for trace in traces {
        for step in &trace.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                trace.seed,
                step.step,
                step.axis,
                step.shots_step,
                step.cum_shots,
                fmt_float(step.kappa),
                fmt_float(step.y_hat),
                fmt_float(step.delta_energy),
                fmt_float(step.delta_fidelity),
            );
        }
    }
    out
}

pub fn write_csv(traces: &[OptimizerTrace], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(traces)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parses the fixed CSV schema back into per-seed traces (strategy and
/// calibration fields are not part of the CSV and come back as defaults).
pub fn parse_trace_csv(text: &str) -> Result<Vec<OptimizerTrace>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("trace csv", "empty file"))?;
    if header.trim() != CSV_HEADER {
        return Err(Error::parse(
            "trace csv",
            format!("unexpected header '{header}'"),
        ));
    }
    let mut traces: Vec<OptimizerTrace> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::parse(
                "trace csv",
                format!("line {}: expected 9 fields, got {}", lineno + 2, fields.len()),
            ));
        }
        let ctx = |what: &str| format!("trace csv line {} ({what})", lineno + 2);
        let seed: u64 = fields[0]
            .parse()
            .map_err(|e| Error::parse(ctx("seed"), format!("{e}")))?;
        let step = TraceStep {
            step: fields[1].parse().map_err(|e| Error::parse(ctx("step"), format!("{e}")))?,
            axis: fields[2].parse().map_err(|e| Error::parse(ctx("axis"), format!("{e}")))?,
            shots_step: fields[3]
                .parse()
                .map_err(|e| Error::parse(ctx("shots_step"), format!("{e}")))?,
            cum_shots: fields[4]
                .parse()
                .map_err(|e| Error::parse(ctx("cum_shots"), format!("{e}")))?,
            kappa: fields[5].parse().map_err(|e| Error::parse(ctx("kappa"), format!("{e}")))?,
            y_hat: fields[6].parse().map_err(|e| Error::parse(ctx("y_hat"), format!("{e}")))?,
            delta_energy: fields[7]
                .parse()
                .map_err(|e| Error::parse(ctx("delta_energy"), format!("{e}")))?,
            delta_fidelity: fields[8]
                .parse()
                .map_err(|e| Error::parse(ctx("delta_fidelity"), format!("{e}")))?,
        };
        match traces.last_mut() {
            Some(trace) if trace.seed == seed => trace.steps.push(step),
            _ => traces.push(OptimizerTrace {
                seed,
                strategy: Strategy::Nft,
                eta2: 0.0,
                sigma0_2: 0.0,
                steps: vec![step],
                final_point: vec![],
            }),
        }
    }
    Ok(traces)
}

/// Everything one experiment produced, as stored in the JSON export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: RunConfig,
    pub traces: Vec<OptimizerTrace>,
}

pub fn write_json(record: &ExperimentRecord, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(record)
        .map_err(|e| Error::parse("json export", e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_json(path: &Path) -> Result<ExperimentRecord> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse("json import", e.to_string()))
}
