use std::path::PathBuf;

use clap::{Args, ValueEnum};

use covfdr::data::{DiscoveryResult, HypothesisSet};
use covfdr::io::{self, GwasTable};
use covfdr::matrix::Matrix;
use covfdr::pca::{pca_fit, PcaMode};
use covfdr::pipeline::{covariate_sweep, SweepMethod, SweepResult};
use covfdr::procedures::{
    bh, bonferroni, storey_lambda_grid, storey_qvalues, BocaLeekConfig, IhwConfig,
};
use covfdr::CovariateMatrix;

use crate::config::{resolve, resolve_opt, FileConfig};
use crate::{resolve_out_dir, CliError, CliResult, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bonferroni,
    Bh,
    Storey,
    Ihw,
    Bl,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Method as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Procedure to run.
    #[arg(long)]
    method: Option<Method>,

    /// Covariate selection: a column NAME, `pc:K`, `pc:all`, or `all`.
    #[arg(long)]
    covariate: Option<String>,

    #[arg(long)]
    alpha: Option<f64>,

    /// Output directory (or COVFDR_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Column holding the p-values.
    #[arg(long)]
    p_column: Option<String>,

    /// Column holding identifiers; row numbers when absent.
    #[arg(long)]
    id_column: Option<String>,

    /// Standardize columns before PCA (pc:* selections).
    #[arg(long)]
    standardize: Option<bool>,

    #[arg(long)]
    ihw_groups: Option<usize>,

    #[arg(long)]
    ihw_step: Option<f64>,

    #[arg(long)]
    ihw_max_weight: Option<f64>,

    #[arg(long)]
    bl_degree: Option<usize>,

    /// csv, json, or both.
    #[arg(long)]
    format: Option<OutputFormat>,
}

enum Selection {
    All,
    PcAll,
    Pc(usize),
    Name(String),
}

fn parse_selection(arg: &str) -> Result<Selection, CliError> {
    match arg {
        "all" => Ok(Selection::All),
        "pc:all" => Ok(Selection::PcAll),
        other => {
            if let Some(num) = other.strip_prefix("pc:") {
                let k: usize = num
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad PC index in `{other}`")))?;
                if k == 0 {
                    return Err(CliError::Usage("PC indices start at 1".into()));
                }
                Ok(Selection::Pc(k))
            } else {
                Ok(Selection::Name(other.to_string()))
            }
        }
    }
}

/// Axis columns to run/plot against, labelled.
fn build_axes(
    table: &GwasTable,
    selection: &Selection,
    pca_mode: PcaMode,
) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    match selection {
        Selection::All => Ok(table
            .covariates
            .names()
            .iter()
            .enumerate()
            .map(|(j, name)| (name.clone(), table.covariates.column(j)))
            .collect()),
        Selection::Name(name) => {
            let j = table.covariates.column_index(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown covariate `{name}`; available: {}",
                    table.covariates.names().join(", ")
                ))
            })?;
            Ok(vec![(name.clone(), table.covariates.column(j))])
        }
        Selection::PcAll => {
            let model = pca_fit(&table.covariates, pca_mode)?;
            (1..=model.n_components())
                .map(|j| Ok((format!("PC{j}"), model.score_column(j)?)))
                .collect::<Result<Vec<_>, covfdr::Error>>()
                .map_err(Into::into)
        }
        Selection::Pc(k) => {
            let model = pca_fit(&table.covariates, pca_mode)?;
            if *k > model.n_components() {
                return Err(CliError::Usage(format!(
                    "pc:{k} outside 1..={}",
                    model.n_components()
                )));
            }
            Ok(vec![(format!("PC{k}"), model.score_column(*k)?)])
        }
    }
}

fn file_label(axis: &str) -> String {
    axis.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn run(args: AnalyzeArgs, cfg: &FileConfig) -> CliResult {
    let flags = IhwFlags {
        groups: args.ihw_groups,
        step: args.ihw_step,
        max_weight: args.ihw_max_weight,
        bl_degree: args.bl_degree,
    };
    let input = resolve_opt(
        args.input,
        cfg.get_string("input").map(PathBuf::from),
    )
    .ok_or_else(|| CliError::Usage("missing --input file".into()))?;
    let method = resolve_opt(
        args.method,
        cfg.get_parsed("method").map_err(CliError::Failure)?,
    )
    .ok_or_else(|| CliError::Usage("missing --method".into()))?;
    let covariate_arg = args
        .covariate
        .or_else(|| cfg.get_string("covariate"))
        .unwrap_or_else(|| "all".to_string());
    let alpha = resolve(args.alpha, cfg.get_parsed("alpha").map_err(CliError::Failure)?, 0.05);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let p_column = args
        .p_column
        .or_else(|| cfg.get_string("p_column"))
        .unwrap_or_else(|| "p".to_string());
    let id_column = args.id_column.or_else(|| cfg.get_string("id_column"));
    let standardize = resolve(
        args.standardize,
        cfg.get_bool("standardize").map_err(CliError::Failure)?,
        true,
    );
    let format = resolve(
        args.format,
        cfg.get_parsed("format").map_err(CliError::Failure)?,
        OutputFormat::Both,
    );
    let out = resolve_out_dir(args.out, cfg)?;

    let table = io::load_input(&input, &p_column, id_column.as_deref())?;
    let h = table.hypothesis_set()?;
    let selection = parse_selection(&covariate_arg)?;
    let pca_mode = if standardize {
        PcaMode::Standardized
    } else {
        PcaMode::Covariance
    };
    let axes = build_axes(&table, &selection, pca_mode)?;
    let bh_result = bh(&h, alpha)?;

    match method {
        Method::Bonferroni | Method::Bh | Method::Storey => {
            let result = run_baseline(method, &h, alpha)?;
            let sweep = SweepResult {
                axis_labels: vec!["-".to_string()],
                discoveries: vec![result.discoveries()],
                per_axis: vec![result.clone()],
                best_axis: 0,
            };
            io::write_sweep_counts(&sweep, &result.method_tag, &out, format.csv(), format.json())?;
            io::write_discovery_table(
                &table.ids,
                &table.p_values,
                &result,
                &out.join("discovery_table"),
                format.csv(),
                format.json(),
            )?;
            for (label, values) in &axes {
                io::write_scatter(
                    &table.ids,
                    &table.p_values,
                    values,
                    &result,
                    &bh_result,
                    &out.join(format!("scatter_{}", file_label(label))),
                    format.csv(),
                    format.json(),
                )?;
            }
            println!(
                "{}: {} discoveries out of {} at alpha = {alpha}",
                result.method_tag,
                result.discoveries(),
                h.len()
            );
        }
        Method::Ihw | Method::Bl => {
            let merged = merge_with_config(cfg, &flags)?;
            let sweep_method = build_sweep_method(method, &merged, alpha)?;
            let (labels, data): (Vec<String>, Vec<Vec<f64>>) = axes.iter().cloned().unzip();
            let mut stacked = Matrix::zeros(h.len(), labels.len());
            for (j, col) in data.iter().enumerate() {
                for (i, &v) in col.iter().enumerate() {
                    stacked.set(i, j, v);
                }
            }
            let axis_matrix = CovariateMatrix::new(stacked, labels)?;
            let sweep = covariate_sweep(&h, &axis_matrix, &sweep_method, alpha)?;

            io::write_sweep_counts(&sweep, sweep_method.tag(), &out, format.csv(), format.json())?;
            for (i, (label, values)) in axes.iter().enumerate() {
                io::write_scatter(
                    &table.ids,
                    &table.p_values,
                    values,
                    &sweep.per_axis[i],
                    &bh_result,
                    &out.join(format!("scatter_{}", file_label(label))),
                    format.csv(),
                    format.json(),
                )?;
            }
            let best_label = &sweep.axis_labels[sweep.best_axis];
            io::write_discovery_table(
                &table.ids,
                &table.p_values,
                sweep.best(),
                &out.join(format!("discovery_table_{}", file_label(best_label))),
                format.csv(),
                format.json(),
            )?;
            println!(
                "{}: best axis {} with {} discoveries (bh: {})",
                sweep_method.tag(),
                best_label,
                sweep.discoveries[sweep.best_axis],
                bh_result.discoveries()
            );
            for (label, count) in sweep.axis_labels.iter().zip(&sweep.discoveries) {
                println!("  {label:<24} {count}");
            }
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn run_baseline(method: Method, h: &HypothesisSet, alpha: f64) -> Result<DiscoveryResult, CliError> {
    Ok(match method {
        Method::Bonferroni => bonferroni(h, alpha)?,
        Method::Bh => bh(h, alpha)?,
        Method::Storey => storey_qvalues(h, alpha, &storey_lambda_grid())?,
        _ => unreachable!("sweep methods handled separately"),
    })
}

struct IhwFlags {
    groups: Option<usize>,
    step: Option<f64>,
    max_weight: Option<f64>,
    bl_degree: Option<usize>,
}

fn merge_with_config(cfg: &FileConfig, flags: &IhwFlags) -> Result<IhwFlags, CliError> {
    Ok(IhwFlags {
        groups: flags
            .groups
            .or(cfg.get_parsed("ihw.groups").map_err(CliError::Failure)?),
        step: flags
            .step
            .or(cfg.get_parsed("ihw.step").map_err(CliError::Failure)?),
        max_weight: flags
            .max_weight
            .or(cfg.get_parsed("ihw.max_weight").map_err(CliError::Failure)?),
        bl_degree: flags
            .bl_degree
            .or(cfg.get_parsed("boca_leek.degree").map_err(CliError::Failure)?),
    })
}

fn build_sweep_method(
    method: Method,
    flags: &IhwFlags,
    alpha: f64,
) -> Result<SweepMethod, CliError> {
    Ok(match method {
        Method::Ihw => {
            let defaults = IhwConfig::default();
            SweepMethod::Ihw(IhwConfig {
                n_groups: flags.groups.unwrap_or(defaults.n_groups),
                weight_grid_step: flags.step.unwrap_or(defaults.weight_grid_step),
                max_weight: flags.max_weight.unwrap_or(defaults.max_weight),
                alpha,
            })
        }
        Method::Bl => {
            let defaults = BocaLeekConfig::default();
            SweepMethod::BocaLeek(BocaLeekConfig {
                smoothing_degree: flags.bl_degree.unwrap_or(defaults.smoothing_degree),
                alpha,
                ..defaults
            })
        }
        _ => unreachable!(),
    })
}
