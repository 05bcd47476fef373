//! CSV ingestion of GWAS-style summary tables and emission of result tables.
//!
//! Every CSV written here has a JSON mirror with identical field names.
//! Floats are serialized as decimal text with 17 significant digits, which
//! round-trips `f64` exactly, so repeated runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::data::{CovariateMatrix, DiscoveryResult, HypothesisSet};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::PcaModel;
use crate::pipeline::{EvalReport, SweepResult};
use crate::simgen::SimDataset;

/// Lossless decimal text for a 64-bit float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A loaded summary-statistics table: identifiers, p-values, and named
/// covariate columns.
#[derive(Debug, Clone)]
pub struct GwasTable {
    pub ids: Vec<String>,
    pub p_values: Vec<f64>,
    pub covariates: CovariateMatrix,
}

impl GwasTable {
    pub fn n_rows(&self) -> usize {
        self.p_values.len()
    }

    pub fn hypothesis_set(&self) -> Result<HypothesisSet> {
        HypothesisSet::new(self.p_values.clone())?.with_ids(self.ids.clone())
    }
}

/// Load a CSV with a header row; `p_column` holds the p-values, `id_column`
/// (when given) the identifiers, and every other column becomes a covariate
/// in file order. Rows are reported 1-based in errors.
pub fn load_gwas_csv(path: &Path, p_column: &str, id_column: Option<&str>) -> Result<GwasTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    for (i, name) in headers.iter().enumerate() {
        if headers[..i].contains(name) {
            return Err(Error::Format(format!("duplicate column header `{name}`")));
        }
    }
    let p_idx = headers
        .iter()
        .position(|h| h == p_column)
        .ok_or_else(|| Error::Format(format!("missing p-value column `{p_column}`")))?;
    let id_idx = match id_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Format(format!("missing id column `{name}`")))?,
        ),
        None => None,
    };

    let cov_indices: Vec<usize> = (0..headers.len())
        .filter(|&j| j != p_idx && Some(j) != id_idx)
        .collect();
    if cov_indices.is_empty() {
        return Err(Error::Format("no covariate columns in file".into()));
    }
    let cov_names: Vec<String> = cov_indices.iter().map(|&j| headers[j].clone()).collect();

    let mut ids = Vec::new();
    let mut p_values = Vec::new();
    let mut cov_data = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record?;
        let parse = |j: usize| -> Result<f64> {
            let cell = record.get(j).ok_or_else(|| Error::Cell {
                row,
                column: headers[j].clone(),
                detail: "missing cell".into(),
            })?;
            cell.trim().parse::<f64>().map_err(|_| Error::Cell {
                row,
                column: headers[j].clone(),
                detail: format!("cannot parse `{cell}` as a number"),
            })
        };
        let p = parse(p_idx)?;
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::Cell {
                row,
                column: headers[p_idx].clone(),
                detail: format!("p-value {p} outside [0, 1]"),
            });
        }
        p_values.push(p);
        ids.push(match id_idx {
            Some(j) => record.get(j).unwrap_or("").to_string(),
            None => row.to_string(),
        });
        for &j in &cov_indices {
            let v = parse(j)?;
            if !v.is_finite() {
                return Err(Error::Cell {
                    row,
                    column: headers[j].clone(),
                    detail: format!("non-finite covariate {v}"),
                });
            }
            cov_data.push(v);
        }
    }

    let matrix = Matrix::from_vec(p_values.len(), cov_indices.len(), cov_data)?;
    Ok(GwasTable {
        ids,
        p_values,
        covariates: CovariateMatrix::new(matrix, cov_names)?,
    })
}

/// Load either a plain summary CSV or a dataset export from
/// [`write_sim_dataset`] (recognized by its `id,p,truth,xstar,mu,...` header,
/// in which case only the covariate columns feed the table and the explicit
/// column names are ignored).
pub fn load_input(path: &Path, p_column: &str, id_column: Option<&str>) -> Result<GwasTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    drop(reader);
    if headers.len() >= 6 && headers[..5] == ["id", "p", "truth", "xstar", "mu"] {
        let columns = read_sim_dataset(path)?;
        let m = columns.h.len();
        return Ok(GwasTable {
            ids: (1..=m).map(|i| i.to_string()).collect(),
            p_values: columns.h.p_values().to_vec(),
            covariates: columns.x,
        });
    }
    load_gwas_csv(path, p_column, id_column)
}

/// Append a suffix without clobbering dots already in the file name.
fn with_suffix(base: &Path, suffix: &str) -> std::path::PathBuf {
    let mut os = base.as_os_str().to_owned();
    os.push(suffix);
    std::path::PathBuf::from(os)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| Error::Format(format!("json serialization: {e}")))?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReportRow<'a> {
    method: &'a str,
    axis: &'a str,
    tpr_mean: f64,
    tpr_se: f64,
    fdr_mean: f64,
    fdr_se: f64,
    n_reps: usize,
    alpha: f64,
}

/// Write `eval_report.csv` / `.json`: one row per (method, axis).
pub fn write_eval_report(report: &EvalReport, dir: &Path, csv: bool, json: bool) -> Result<()> {
    let rows: Vec<EvalReportRow> = report
        .rows
        .iter()
        .map(|r| EvalReportRow {
            method: &r.method,
            axis: &r.axis,
            tpr_mean: r.tpr_mean,
            tpr_se: r.tpr_se,
            fdr_mean: r.fdr_mean,
            fdr_se: r.fdr_se,
            n_reps: report.n_reps,
            alpha: report.alpha,
        })
        .collect();
    if csv {
        let mut out = create(&dir.join("eval_report.csv"))?;
        writeln!(
            out,
            "method,axis,tpr_mean,tpr_se,fdr_mean,fdr_se,n_reps,alpha"
        )?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.method,
                r.axis,
                fmt_f64(r.tpr_mean),
                fmt_f64(r.tpr_se),
                fmt_f64(r.fdr_mean),
                fmt_f64(r.fdr_se),
                r.n_reps,
                fmt_f64(r.alpha)
            )?;
        }
    }
    if json {
        write_json(&dir.join("eval_report.json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReplicateRow<'a> {
    replicate: usize,
    method: &'a str,
    axis: &'a str,
    tpr: f64,
    fdp: f64,
    discoveries: usize,
    n_alternatives: usize,
}

/// Per-replicate dump mirroring the evaluation table.
pub fn write_replicate_dump(report: &EvalReport, dir: &Path, csv: bool, json: bool) -> Result<()> {
    let mut rows = Vec::new();
    for row in &report.rows {
        for rep in 0..report.n_reps {
            rows.push(ReplicateRow {
                replicate: rep,
                method: &row.method,
                axis: &row.axis,
                tpr: row.per_rep_tpr[rep],
                fdp: row.per_rep_fdp[rep],
                discoveries: row.per_rep_discoveries[rep],
                n_alternatives: report.per_rep_alternatives[rep],
            });
        }
    }
    if csv {
        let mut out = create(&dir.join("per_replicate.csv"))?;
        writeln!(
            out,
            "replicate,method,axis,tpr,fdp,discoveries,n_alternatives"
        )?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.replicate,
                r.method,
                r.axis,
                fmt_f64(r.tpr),
                fmt_f64(r.fdp),
                r.discoveries,
                r.n_alternatives
            )?;
        }
    }
    if json {
        write_json(&dir.join("per_replicate.json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscoveryCountRow<'a> {
    axis: &'a str,
    method: &'a str,
    discoveries: usize,
    best: bool,
}

/// Per-axis discovery counts of a sweep (`discoveries.csv` / `.json`).
pub fn write_sweep_counts(
    sweep: &SweepResult,
    method: &str,
    dir: &Path,
    csv: bool,
    json: bool,
) -> Result<()> {
    let rows: Vec<DiscoveryCountRow> = sweep
        .axis_labels
        .iter()
        .enumerate()
        .map(|(i, label)| DiscoveryCountRow {
            axis: label,
            method,
            discoveries: sweep.discoveries[i],
            best: i == sweep.best_axis,
        })
        .collect();
    if csv {
        let mut out = create(&dir.join("discoveries.csv"))?;
        writeln!(out, "axis,method,discoveries,best")?;
        for r in &rows {
            writeln!(out, "{},{},{},{}", r.axis, r.method, r.discoveries, r.best)?;
        }
    }
    if json {
        write_json(&dir.join("discoveries.json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScatterRow<'a> {
    id: &'a str,
    p: f64,
    covariate_or_score: f64,
    rejected_by_method: bool,
    rejected_by_bh: bool,
}

/// Scatter-plot data for one axis: p-value vs covariate with rejection flags.
pub fn write_scatter(
    ids: &[String],
    p: &[f64],
    axis_values: &[f64],
    method_result: &DiscoveryResult,
    bh_result: &DiscoveryResult,
    path_base: &Path,
    csv: bool,
    json: bool,
) -> Result<()> {
    let rows: Vec<ScatterRow> = (0..p.len())
        .map(|i| ScatterRow {
            id: &ids[i],
            p: p[i],
            covariate_or_score: axis_values[i],
            rejected_by_method: method_result.rejected[i],
            rejected_by_bh: bh_result.rejected[i],
        })
        .collect();
    if csv {
        let mut out = create(&with_suffix(path_base, ".csv"))?;
        writeln!(out, "id,p,covariate_or_score,rejected_by_method,rejected_by_bh")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.id,
                fmt_f64(r.p),
                fmt_f64(r.covariate_or_score),
                r.rejected_by_method,
                r.rejected_by_bh
            )?;
        }
    }
    if json {
        write_json(&with_suffix(path_base, ".json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscoveryTableRow<'a> {
    id: &'a str,
    p: f64,
    adjusted: f64,
    rejected: bool,
}

/// Per-hypothesis discovery table for one result.
pub fn write_discovery_table(
    ids: &[String],
    p: &[f64],
    result: &DiscoveryResult,
    path_base: &Path,
    csv: bool,
    json: bool,
) -> Result<()> {
    let rows: Vec<DiscoveryTableRow> = (0..p.len())
        .map(|i| DiscoveryTableRow {
            id: &ids[i],
            p: p[i],
            adjusted: result.adjusted[i],
            rejected: result.rejected[i],
        })
        .collect();
    if csv {
        let mut out = create(&with_suffix(path_base, ".csv"))?;
        writeln!(out, "id,p,adjusted,rejected")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.id,
                fmt_f64(r.p),
                fmt_f64(r.adjusted),
                r.rejected
            )?;
        }
    }
    if json {
        write_json(&with_suffix(path_base, ".json"), &rows)?;
    }
    Ok(())
}

/// Export a simulated dataset (`id,p,truth,xstar,mu,x1..xd`).
pub fn write_sim_dataset(ds: &SimDataset, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    let d = ds.x.n_cols();
    let mut header = String::from("id,p,truth,xstar,mu");
    for name in ds.x.names() {
        header.push(',');
        header.push_str(name);
    }
    writeln!(out, "{header}")?;
    let truth = ds.h.truth().unwrap_or(&[]);
    for i in 0..ds.h.len() {
        let mut line = format!(
            "{},{},{}",
            i + 1,
            fmt_f64(ds.h.p_values()[i]),
            truth.get(i).copied().unwrap_or(0)
        );
        line.push(',');
        if let Some(xs) = &ds.xstar {
            line.push_str(&fmt_f64(xs[i]));
        }
        line.push(',');
        if let Some(mu) = &ds.mu {
            line.push_str(&fmt_f64(mu[i]));
        }
        for j in 0..d {
            line.push(',');
            line.push_str(&fmt_f64(ds.x.values().get(i, j)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Columns read back from a dataset export.
#[derive(Debug)]
pub struct SimDatasetColumns {
    pub h: HypothesisSet,
    pub x: CovariateMatrix,
    pub xstar: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
}

/// Reload a dataset written by [`write_sim_dataset`].
pub fn read_sim_dataset(path: &Path) -> Result<SimDatasetColumns> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expect = ["id", "p", "truth", "xstar", "mu"];
    if headers.len() < 6 || headers[..5] != expect {
        return Err(Error::Format(
            "expected dataset columns id,p,truth,xstar,mu,x1..".into(),
        ));
    }
    let cov_names: Vec<String> = headers[5..].to_vec();
    let d = cov_names.len();

    let mut p = Vec::new();
    let mut truth = Vec::new();
    let mut xstar = Vec::new();
    let mut mu = Vec::new();
    let mut cov = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record?;
        let cell = |j: usize| -> Result<&str> {
            record.get(j).ok_or_else(|| Error::Cell {
                row,
                column: headers[j].clone(),
                detail: "missing cell".into(),
            })
        };
        let num = |j: usize| -> Result<f64> {
            cell(j)?.parse::<f64>().map_err(|_| Error::Cell {
                row,
                column: headers[j].clone(),
                detail: "cannot parse number".into(),
            })
        };
        p.push(num(1)?);
        truth.push(num(2)? as u8);
        let xs = cell(3)?;
        if !xs.is_empty() {
            xstar.push(xs.parse::<f64>().map_err(|_| Error::Cell {
                row,
                column: "xstar".into(),
                detail: "cannot parse number".into(),
            })?);
        }
        let mv = cell(4)?;
        if !mv.is_empty() {
            mu.push(mv.parse::<f64>().map_err(|_| Error::Cell {
                row,
                column: "mu".into(),
                detail: "cannot parse number".into(),
            })?);
        }
        for j in 0..d {
            cov.push(num(5 + j)?);
        }
    }
    let m = p.len();
    Ok(SimDatasetColumns {
        h: HypothesisSet::new(p)?.with_truth(truth)?,
        x: CovariateMatrix::new(Matrix::from_vec(m, d, cov)?, cov_names)?,
        xstar: if xstar.len() == m { Some(xstar) } else { None },
        mu: if mu.len() == m { Some(mu) } else { None },
    })
}

#[derive(Serialize)]
struct LoadingRow<'a> {
    covariate: &'a str,
    #[serde(flatten)]
    loadings: std::collections::BTreeMap<String, f64>,
}

/// PC loadings table: one row per covariate, one column per requested PC
/// (1-based), optionally sorted descending by one PC's loading.
pub fn write_loadings(
    model: &PcaModel,
    names: &[String],
    pcs: &[usize],
    sort_by: Option<usize>,
    dir: &Path,
    csv: bool,
    json: bool,
) -> Result<()> {
    let d = model.n_components();
    for &pc in pcs.iter().chain(sort_by.iter()) {
        if pc == 0 || pc > d {
            return Err(Error::Index(format!("PC{pc} outside 1..={d}")));
        }
    }
    let mut order: Vec<usize> = (0..names.len()).collect();
    if let Some(pc) = sort_by {
        order.sort_by(|&a, &b| {
            model
                .loadings
                .get(b, pc - 1)
                .total_cmp(&model.loadings.get(a, pc - 1))
        });
    }
    if csv {
        let mut out = create(&dir.join("loadings.csv"))?;
        let mut header = String::from("covariate");
        for &pc in pcs {
            header.push_str(&format!(",PC{pc}"));
        }
        writeln!(out, "{header}")?;
        for &i in &order {
            let mut line = names[i].clone();
            for &pc in pcs {
                line.push(',');
                line.push_str(&fmt_f64(model.loadings.get(i, pc - 1)));
            }
            writeln!(out, "{line}")?;
        }
    }
    if json {
        let rows: Vec<LoadingRow> = order
            .iter()
            .map(|&i| LoadingRow {
                covariate: &names[i],
                loadings: pcs
                    .iter()
                    .map(|&pc| (format!("PC{pc}"), model.loadings.get(i, pc - 1)))
                    .collect(),
            })
            .collect();
        write_json(&dir.join("loadings.json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EigenvalueRow {
    component: usize,
    eigenvalue: f64,
    variance_fraction: f64,
}

pub fn write_eigenvalues(model: &PcaModel, dir: &Path, csv: bool, json: bool) -> Result<()> {
    let total: f64 = model.eigenvalues.iter().sum();
    let rows: Vec<EigenvalueRow> = model
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &ev)| EigenvalueRow {
            component: i + 1,
            eigenvalue: ev,
            variance_fraction: if total > 0.0 { ev / total } else { 0.0 },
        })
        .collect();
    if csv {
        let mut out = create(&dir.join("eigenvalues.csv"))?;
        writeln!(out, "component,eigenvalue,variance_fraction")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{}",
                r.component,
                fmt_f64(r.eigenvalue),
                fmt_f64(r.variance_fraction)
            )?;
        }
    }
    if json {
        write_json(&dir.join("eigenvalues.json"), &rows)?;
    }
    Ok(())
}

/// Score matrix export (`id,PC1..PCd`), preserving input order.
pub fn write_scores(model: &PcaModel, ids: &[String], dir: &Path, csv: bool, json: bool) -> Result<()> {
    let d = model.n_components();
    if csv {
        let mut out = create(&dir.join("scores.csv"))?;
        let mut header = String::from("id");
        for j in 1..=d {
            header.push_str(&format!(",PC{j}"));
        }
        writeln!(out, "{header}")?;
        for (i, id) in ids.iter().enumerate() {
            let mut line = id.clone();
            for j in 0..d {
                line.push(',');
                line.push_str(&fmt_f64(model.scores.get(i, j)));
            }
            writeln!(out, "{line}")?;
        }
    }
    if json {
        let rows: Vec<std::collections::BTreeMap<String, serde_json::Value>> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let mut row = std::collections::BTreeMap::new();
                row.insert("id".to_string(), serde_json::Value::from(id.clone()));
                for j in 0..d {
                    row.insert(
                        format!("PC{}", j + 1),
                        serde_json::Value::from(model.scores.get(i, j)),
                    );
                }
                row
            })
            .collect();
        write_json(&dir.join("scores.json"), &rows)?;
    }
    Ok(())
}
