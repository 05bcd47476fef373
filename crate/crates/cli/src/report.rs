use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;

use crate::config::FileConfig;
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct ReportArgs {
    /// Directory holding result files from `simulate` / `analyze`.
    #[arg(long = "in")]
    in_dir: Option<PathBuf>,

    /// Where to write the summary (defaults to the input directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Default, Clone)]
struct SummaryRow {
    source: String,
    method: String,
    axis: String,
    discoveries: Option<usize>,
    tpr_mean: Option<f64>,
    fdr_mean: Option<f64>,
}

pub fn run(args: ReportArgs, cfg: &FileConfig) -> CliResult {
    let in_dir = args
        .in_dir
        .or_else(|| cfg.get_string("in").map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("missing --in directory".into()))?;
    if !in_dir.is_dir() {
        return Err(CliError::Failure(anyhow::anyhow!(
            "{} is not a directory",
            in_dir.display()
        )));
    }
    let out_dir = args.out.unwrap_or_else(|| in_dir.clone());

    let mut rows: Vec<SummaryRow> = Vec::new();
    let eval_path = in_dir.join("eval_report.csv");
    if eval_path.is_file() {
        rows.extend(read_eval_report(&eval_path).map_err(CliError::Failure)?);
    }
    let disc_path = in_dir.join("discoveries.csv");
    if disc_path.is_file() {
        rows.extend(read_discoveries(&disc_path).map_err(CliError::Failure)?);
    }
    if rows.is_empty() {
        return Err(CliError::Failure(anyhow::anyhow!(
            "no eval_report.csv or discoveries.csv under {}",
            in_dir.display()
        )));
    }

    let fmt_opt = |v: &Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
    let disc_opt = |v: &Option<usize>| v.map_or(String::new(), |x| x.to_string());

    let summary_csv = out_dir.join("summary.csv");
    let mut text = String::from("source,method,axis,discoveries,tpr_mean,fdr_mean\n");
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.source,
            r.method,
            r.axis,
            disc_opt(&r.discoveries),
            fmt_opt(&r.tpr_mean),
            fmt_opt(&r.fdr_mean)
        ));
    }
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Failure(e.into()))?;
    std::fs::write(&summary_csv, text).map_err(|e| CliError::Failure(e.into()))?;

    let json_rows: Vec<serde_like::Row> = rows
        .iter()
        .map(|r| serde_like::Row {
            source: r.source.clone(),
            method: r.method.clone(),
            axis: r.axis.clone(),
            discoveries: r.discoveries,
            tpr_mean: r.tpr_mean,
            fdr_mean: r.fdr_mean,
        })
        .collect();
    std::fs::write(
        out_dir.join("summary.json"),
        serde_like::to_json(&json_rows),
    )
    .map_err(|e| CliError::Failure(e.into()))?;

    println!(
        "{:<18} {:<12} {:<12} {:>12} {:>10} {:>10}",
        "source", "method", "axis", "discoveries", "tpr_mean", "fdr_mean"
    );
    for r in &rows {
        println!(
            "{:<18} {:<12} {:<12} {:>12} {:>10} {:>10}",
            r.source,
            r.method,
            r.axis,
            disc_opt(&r.discoveries),
            fmt_opt(&r.tpr_mean),
            fmt_opt(&r.fdr_mean)
        );
    }
    println!("wrote {}", summary_csv.display());
    Ok(())
}

fn read_eval_report(path: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (m_idx, a_idx) = (col("method"), col("axis"));
    let (t_idx, f_idx) = (col("tpr_mean"), col("fdr_mean"));
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(SummaryRow {
            source: "eval_report".into(),
            method: m_idx.and_then(|i| record.get(i)).unwrap_or("").to_string(),
            axis: a_idx.and_then(|i| record.get(i)).unwrap_or("").to_string(),
            discoveries: None,
            tpr_mean: t_idx.and_then(|i| record.get(i)).and_then(|s| s.parse().ok()),
            fdr_mean: f_idx.and_then(|i| record.get(i)).and_then(|s| s.parse().ok()),
        });
    }
    Ok(rows)
}

fn read_discoveries(path: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (a_idx, m_idx, d_idx) = (col("axis"), col("method"), col("discoveries"));
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(SummaryRow {
            source: "discoveries".into(),
            method: m_idx.and_then(|i| record.get(i)).unwrap_or("").to_string(),
            axis: a_idx.and_then(|i| record.get(i)).unwrap_or("").to_string(),
            discoveries: d_idx.and_then(|i| record.get(i)).and_then(|s| s.parse().ok()),
            tpr_mean: None,
            fdr_mean: None,
        });
    }
    Ok(rows)
}

/// Hand-rolled JSON for the summary rows to keep the CLI dependency-light.
mod serde_like {
    pub struct Row {
        pub source: String,
        pub method: String,
        pub axis: String,
        pub discoveries: Option<usize>,
        pub tpr_mean: Option<f64>,
        pub fdr_mean: Option<f64>,
    }

    pub fn to_json(rows: &[Row]) -> String {
        let mut out = String::from("[\n");
        for (i, r) in rows.iter().enumerate() {
            out.push_str(&format!(
                "  {{\"source\": \"{}\", \"method\": \"{}\", \"axis\": \"{}\", \"discoveries\": {}, \"tpr_mean\": {}, \"fdr_mean\": {}}}{}\n",
                r.source,
                r.method,
                r.axis,
                r.discoveries.map_or("null".to_string(), |v| v.to_string()),
                r.tpr_mean.map_or("null".to_string(), |v| format!("{v}")),
                r.fdr_mean.map_or("null".to_string(), |v| format!("{v}")),
                if i + 1 == rows.len() { "" } else { "," }
            ));
        }
        out.push_str("]\n");
        out
    }
}
