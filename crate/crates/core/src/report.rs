//! Machine-readable run records and report writers.
//!
//! One [`RunRecord`] captures everything needed to reproduce one
//! enhancement byte-for-byte: input, method, the full parameter set and
//! the measured results. [`write_report_json`] adds a summary block in
//! the corpus-comparison shape — rows PSNR/AMMBE, one column per method,
//! each cell "mean ± population std". [`write_report_csv`] is the flat
//! per-(image, method) export.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::metrics::{summarize, MetricsReport, MetricsSummary};
use crate::params::EnhanceParams;
use crate::stats::SplitDecision;

/// JSON report schema version written by this crate.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One (input, method) run with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub input: String,
    /// Path of the written image, when one was written.
    pub output: Option<String>,
    pub params: EnhanceParams,
    /// Present when the duo-histogram path ran.
    pub split: Option<SplitDecision>,
    /// Absent when metrics were not computable (constant pass-through).
    pub metrics: Option<MetricsReport>,
    pub constant_passthrough: bool,
    pub tool_version: String,
}

fn cell(mean: f64, std: f64) -> serde_json::Value {
    json!({
        "mean": mean,
        "std": std,
        "display": format!("{mean:.4} \u{b1} {std:.4}"),
    })
}

/// Per-method aggregation of every record that carries metrics.
pub fn summarize_by_method(records: &[RunRecord]) -> BTreeMap<String, MetricsSummary> {
    let mut grouped: BTreeMap<String, Vec<MetricsReport>> = BTreeMap::new();
    for r in records {
        if let Some(m) = r.metrics {
            grouped.entry(r.params.method.to_string()).or_default().push(m);
        }
    }
    grouped
        .into_iter()
        .filter_map(|(method, reports)| summarize(&reports).ok().map(|s| (method, s)))
        .collect()
}

/// Full JSON report: schema version, per-image records and the summary
/// table. Errors on an empty record list.
pub fn write_report_json(records: &[RunRecord]) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    let summary = summarize_by_method(records);
    let columns: Vec<&String> = summary.keys().collect();
    let doc = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": records[0].tool_version,
        "uncertainty": "population standard deviation",
        "records": records,
        "summary": {
            "rows": ["psnr_db", "ammbe"],
            "columns": columns,
            "cells": {
                "psnr_db": summary
                    .iter()
                    .map(|(m, s)| (m.clone(), cell(s.psnr_mean, s.psnr_std)))
                    .collect::<serde_json::Map<_, _>>(),
                "ammbe": summary
                    .iter()
                    .map(|(m, s)| (m.clone(), cell(s.ammbe_mean, s.ammbe_std)))
                    .collect::<serde_json::Map<_, _>>(),
            },
            "samples": summary
                .iter()
                .map(|(m, s)| (m.clone(), json!(s.samples)))
                .collect::<serde_json::Map<_, _>>(),
            "excluded_infinite_psnr": summary
                .iter()
                .map(|(m, s)| (m.clone(), json!(s.excluded_infinite)))
                .collect::<serde_json::Map<_, _>>(),
        },
    });
    let mut out = serde_json::to_vec_pretty(&doc).expect("report serializes");
    out.push(b'\n');
    Ok(out)
}

/// Flat CSV export, one row per (image, method).
pub fn write_report_csv(records: &[RunRecord]) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "input",
        "method",
        "tau",
        "gamma",
        "mm_scale",
        "tiles_x",
        "tiles_y",
        "clip_limit",
        "beta",
        "branch",
        "split_level",
        "psnr_db",
        "rmse",
        "ammbe",
    ])
    .expect("csv header");
    for r in records {
        let clip = if r.params.clahe.clip_limit.is_finite() {
            r.params.clahe.clip_limit.to_string()
        } else {
            "inf".into()
        };
        let (beta, branch, split_level) = match &r.split {
            Some(s) => (s.beta.to_string(), s.branch.to_string(), s.split_level.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let (psnr, rmse, ammbe) = match &r.metrics {
            Some(m) => (m.psnr_db.to_string(), m.rmse.to_string(), m.ammbe.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            r.input.as_str(),
            &r.params.method.to_string(),
            &r.params.tau.to_string(),
            &r.params.gamma.to_string(),
            &r.params.mm_scale.to_string(),
            &r.params.clahe.tiles_x.to_string(),
            &r.params.clahe.tiles_y.to_string(),
            &clip,
            &beta,
            &branch,
            &split_level,
            &psnr,
            &rmse,
            &ammbe,
        ])
        .expect("csv row");
    }
    Ok(w.into_inner().expect("csv buffer"))
}
