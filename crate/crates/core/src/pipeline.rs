//! Axis sweeps and the Monte Carlo evaluation harness.
//!
//! `pc_select` runs a covariate-aware procedure once per principal-component
//! axis and keeps the axis with the most discoveries; `covariate_sweep` does
//! the same over the original columns. `monte_carlo` repeats a scenario over
//! seeded replicates, applies the configured methods, and aggregates
//! TPR/FDR against the simulated truth. Replicates are independent and may
//! run in parallel; each derives its own seed from the master seed, so the
//! report does not depend on the worker count.

use serde::Serialize;

use crate::data::{confusion_from_rejections, ConfusionCounts, DiscoveryResult, HypothesisSet};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::sampling::derive_seed;
use crate::par;
use crate::pca::{pca_fit, PcaMode};
use crate::procedures::{
    bh, boca_leek, bonferroni, ihw_naive, storey_qvalues, BocaLeekConfig, IhwConfig,
};
use crate::simgen::{scenario1, scenario2, SimDataset};
use crate::CovariateMatrix;

/// A covariate-aware procedure used in axis sweeps.
#[derive(Debug, Clone)]
pub enum SweepMethod {
    Ihw(IhwConfig),
    BocaLeek(BocaLeekConfig),
}

impl SweepMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepMethod::Ihw(_) => "ihw",
            SweepMethod::BocaLeek(_) => "boca_leek",
        }
    }

    fn run(&self, h: &HypothesisSet, axis: &[f64], alpha: f64) -> Result<DiscoveryResult> {
        match self {
            SweepMethod::Ihw(cfg) => {
                let cfg = IhwConfig {
                    alpha,
                    ..cfg.clone()
                };
                ihw_naive(h, axis, &cfg)
            }
            SweepMethod::BocaLeek(cfg) => {
                let cfg = BocaLeekConfig {
                    alpha,
                    ..cfg.clone()
                };
                let column = Matrix::from_vec(axis.len(), 1, axis.to_vec())?;
                let x = CovariateMatrix::new(column, vec!["axis".into()])?;
                boca_leek(h, &x, &cfg)
            }
        }
    }
}

/// Per-axis results of one sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_labels: Vec<String>,
    pub per_axis: Vec<DiscoveryResult>,
    pub discoveries: Vec<usize>,
    /// Index into `axis_labels` with the most discoveries (ties: lowest).
    pub best_axis: usize,
}

impl SweepResult {
    fn from_parts(axis_labels: Vec<String>, per_axis: Vec<DiscoveryResult>) -> Self {
        let discoveries: Vec<usize> = per_axis.iter().map(DiscoveryResult::discoveries).collect();
        let best_axis = discoveries
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        SweepResult {
            axis_labels,
            per_axis,
            discoveries,
            best_axis,
        }
    }

    pub fn best(&self) -> &DiscoveryResult {
        &self.per_axis[self.best_axis]
    }
}

/// Run `method` once per principal-component score axis and pick the axis
/// with the most discoveries.
pub fn pc_select(
    h: &HypothesisSet,
    x: &CovariateMatrix,
    method: &SweepMethod,
    alpha: f64,
    pca_mode: PcaMode,
) -> Result<SweepResult> {
    if x.n_rows() != h.len() {
        return Err(Error::Dimension(format!(
            "covariate rows {} != m = {}",
            x.n_rows(),
            h.len()
        )));
    }
    let model = pca_fit(x, pca_mode)?;
    let d = model.n_components();
    let mut per_axis = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);
    for j in 1..=d {
        let scores = model.score_column(j)?;
        per_axis.push(method.run(h, &scores, alpha)?);
        labels.push(format!("PC{j}"));
    }
    Ok(SweepResult::from_parts(labels, per_axis))
}

/// Run `method` once per original covariate column.
pub fn covariate_sweep(
    h: &HypothesisSet,
    x: &CovariateMatrix,
    method: &SweepMethod,
    alpha: f64,
) -> Result<SweepResult> {
    if x.n_rows() != h.len() {
        return Err(Error::Dimension(format!(
            "covariate rows {} != m = {}",
            x.n_rows(),
            h.len()
        )));
    }
    let mut per_axis = Vec::with_capacity(x.n_cols());
    for j in 0..x.n_cols() {
        per_axis.push(method.run(h, &x.column(j), alpha)?);
    }
    Ok(SweepResult::from_parts(x.names().to_vec(), per_axis))
}

/// Confusion counts for each result against the same truth labels.
pub fn evaluate(results: &[DiscoveryResult], truth: &[u8]) -> Result<Vec<ConfusionCounts>> {
    results
        .iter()
        .map(|r| confusion_from_rejections(&r.rejected, truth))
        .collect()
}

/// Which simulated scenario to draw replicates from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    One,
    Two { pi1: f64 },
}

impl Scenario {
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::One => "scenario1",
            Scenario::Two { .. } => "scenario2",
        }
    }

    fn generate(&self, m: usize, d: usize, seed: u64) -> Result<SimDataset> {
        match *self {
            Scenario::One => scenario1(m, d, seed),
            Scenario::Two { pi1 } => scenario2(m, d, pi1, seed),
        }
    }
}

/// Methods evaluated per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Bonferroni,
    Bh,
    Storey,
    /// IHW once per PC axis.
    IhwPcSweep,
    /// Boca-Leek once per PC axis.
    BocaLeekPcSweep,
    /// Boca-Leek with all covariate columns jointly (off by default).
    BocaLeekAllColumns,
}

#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub scenario: Scenario,
    pub m: usize,
    pub d: usize,
    pub n_reps: usize,
    pub alpha: f64,
    pub seed: u64,
    pub methods: Vec<MethodSpec>,
    pub storey_lambdas: Vec<f64>,
    pub ihw: IhwConfig,
    pub boca_leek: BocaLeekConfig,
    pub pca_mode: PcaMode,
}

impl MonteCarloConfig {
    /// Paper-style defaults: 30 covariates, all five methods, covariance PCA.
    pub fn new(scenario: Scenario, m: usize, n_reps: usize, alpha: f64, seed: u64) -> Self {
        MonteCarloConfig {
            scenario,
            m,
            d: 30,
            n_reps,
            alpha,
            seed,
            methods: vec![
                MethodSpec::Bonferroni,
                MethodSpec::Bh,
                MethodSpec::Storey,
                MethodSpec::IhwPcSweep,
                MethodSpec::BocaLeekPcSweep,
            ],
            storey_lambdas: crate::procedures::storey_lambda_grid(),
            ihw: IhwConfig {
                alpha,
                ..IhwConfig::default()
            },
            boca_leek: BocaLeekConfig {
                alpha,
                ..BocaLeekConfig::default()
            },
            pca_mode: PcaMode::Covariance,
        }
    }
}

/// One (method, axis) cell of the evaluation table.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub method: String,
    /// "-" for p-value-only methods, "PC1".. for sweep axes, "selected" for
    /// the per-replicate best axis.
    pub axis: String,
    pub tpr_mean: f64,
    pub tpr_se: f64,
    pub fdr_mean: f64,
    pub fdr_se: f64,
    pub per_rep_tpr: Vec<f64>,
    pub per_rep_fdp: Vec<f64>,
    pub per_rep_discoveries: Vec<usize>,
}

/// Averaged TPR/FDR per method and axis over the replicates.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub scenario: String,
    pub m: usize,
    pub d: usize,
    pub n_reps: usize,
    pub alpha: f64,
    pub seed: u64,
    pub mean_alternatives: f64,
    pub per_rep_alternatives: Vec<usize>,
    pub rows: Vec<EvalRow>,
}

struct ReplicateOutcome {
    n_alternatives: usize,
    /// (method, axis, counts, discoveries); identical keys in every replicate.
    cells: Vec<(String, String, ConfusionCounts, usize)>,
}

fn run_replicate(cfg: &MonteCarloConfig, rep: usize) -> Result<ReplicateOutcome> {
    let seed = derive_seed(cfg.seed, rep as u64);
    let ds = cfg.scenario.generate(cfg.m, cfg.d, seed)?;
    let truth = ds.h.truth().expect("simulated data carries truth").to_vec();

    let mut cells = Vec::new();
    let mut push = |method: &str, axis: &str, r: &DiscoveryResult| -> Result<()> {
        let counts = confusion_from_rejections(&r.rejected, &truth)?;
        cells.push((
            method.to_string(),
            axis.to_string(),
            counts,
            r.discoveries(),
        ));
        Ok(())
    };

    for method in &cfg.methods {
        match method {
            MethodSpec::Bonferroni => push("bonferroni", "-", &bonferroni(&ds.h, cfg.alpha)?)?,
            MethodSpec::Bh => push("bh", "-", &bh(&ds.h, cfg.alpha)?)?,
            MethodSpec::Storey => push(
                "storey",
                "-",
                &storey_qvalues(&ds.h, cfg.alpha, &cfg.storey_lambdas)?,
            )?,
            MethodSpec::IhwPcSweep => {
                let sweep = pc_select(
                    &ds.h,
                    &ds.x,
                    &SweepMethod::Ihw(cfg.ihw.clone()),
                    cfg.alpha,
                    cfg.pca_mode,
                )?;
                for (label, r) in sweep.axis_labels.iter().zip(&sweep.per_axis) {
                    push("ihw", label, r)?;
                }
                push("ihw", "selected", sweep.best())?;
            }
            MethodSpec::BocaLeekPcSweep => {
                let sweep = pc_select(
                    &ds.h,
                    &ds.x,
                    &SweepMethod::BocaLeek(cfg.boca_leek.clone()),
                    cfg.alpha,
                    cfg.pca_mode,
                )?;
                for (label, r) in sweep.axis_labels.iter().zip(&sweep.per_axis) {
                    push("boca_leek", label, r)?;
                }
                push("boca_leek", "selected", sweep.best())?;
            }
            MethodSpec::BocaLeekAllColumns => {
                let bl = BocaLeekConfig {
                    alpha: cfg.alpha,
                    ..cfg.boca_leek.clone()
                };
                push("boca_leek", "all_columns", &boca_leek(&ds.h, &ds.x, &bl)?)?;
            }
        }
    }

    Ok(ReplicateOutcome {
        n_alternatives: truth.iter().map(|&h| h as usize).sum(),
        cells,
    })
}

/// Generate `n_reps` seeded replicates, apply every configured method, and
/// average the confusion metrics.
pub fn monte_carlo(cfg: &MonteCarloConfig) -> Result<EvalReport> {
    if cfg.n_reps == 0 {
        return Err(Error::Validation("need at least one replicate".into()));
    }
    let outcomes: Vec<Result<ReplicateOutcome>> =
        par::map_indexed(cfg.n_reps, |rep| run_replicate(cfg, rep));
    let mut reps = Vec::with_capacity(cfg.n_reps);
    for outcome in outcomes {
        reps.push(outcome?);
    }

    let keys: Vec<(String, String)> = reps[0]
        .cells
        .iter()
        .map(|(m, a, _, _)| (m.clone(), a.clone()))
        .collect();
    for rep in &reps {
        let same = rep.cells.len() == keys.len()
            && rep
                .cells
                .iter()
                .zip(&keys)
                .all(|((m, a, _, _), (km, ka))| m == km && a == ka);
        if !same {
            return Err(Error::Numeric(
                "replicates produced differing method/axis tables".into(),
            ));
        }
    }

    let n = cfg.n_reps as f64;
    let rows = keys
        .iter()
        .enumerate()
        .map(|(idx, (method, axis))| {
            let tpr: Vec<f64> = reps.iter().map(|r| r.cells[idx].2.tpr).collect();
            let fdp: Vec<f64> = reps.iter().map(|r| r.cells[idx].2.fdp).collect();
            let disc: Vec<usize> = reps.iter().map(|r| r.cells[idx].3).collect();
            let (tpr_mean, tpr_se) = mean_se(&tpr, n);
            let (fdr_mean, fdr_se) = mean_se(&fdp, n);
            EvalRow {
                method: method.clone(),
                axis: axis.clone(),
                tpr_mean,
                tpr_se,
                fdr_mean,
                fdr_se,
                per_rep_tpr: tpr,
                per_rep_fdp: fdp,
                per_rep_discoveries: disc,
            }
        })
        .collect();

    let per_rep_alternatives: Vec<usize> = reps.iter().map(|r| r.n_alternatives).collect();
    let mean_alternatives = per_rep_alternatives.iter().sum::<usize>() as f64 / n;

    Ok(EvalReport {
        scenario: cfg.scenario.tag().to_string(),
        m: cfg.m,
        d: cfg.d,
        n_reps: cfg.n_reps,
        alpha: cfg.alpha,
        seed: cfg.seed,
        mean_alternatives,
        per_rep_alternatives,
        rows,
    })
}

fn mean_se(values: &[f64], n: f64) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl EvalReport {
    pub fn row(&self, method: &str, axis: &str) -> Option<&EvalRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.axis == axis)
    }

    /// Rows of one method across PC axes, in axis order.
    pub fn pc_rows(&self, method: &str) -> Vec<&EvalRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.axis.starts_with("PC"))
            .collect()
    }
}
